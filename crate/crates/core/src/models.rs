//! Seeded random-graph generators and deterministic fixtures.
//!
//! Pair sampling draws row `u` (pairs `u < v`) from its own stream, so the
//! output depends only on the seed and never on evaluation order.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::graph::{Quotient, VertexPartition, WeightedGraph};
use crate::graphon::StepGraphon;
use crate::math;
use crate::rng;

const TOL: f64 = 1e-9;

/// A generator family with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    ErdosRenyi { n: usize, p: f64 },
    /// `b` is a row-major `k × k` matrix.
    Sbm { n: usize, b: Vec<f64>, rho: f64 },
    PowerLaw { n: usize, alpha: f64, beta: f64 },
    WRandom { graphon: StepGraphon, n: usize, rho: f64 },
    CliquePlusIsolated { n: usize, c: usize },
    CycleUnion { len: usize, copies: usize },
}

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::ErdosRenyi { .. } => "er",
            Self::Sbm { .. } => "sbm",
            Self::PowerLaw { .. } => "power_law",
            Self::WRandom { .. } => "w_random",
            Self::CliquePlusIsolated { .. } => "clique_plus_isolated",
            Self::CycleUnion { .. } => "cycle_union",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub family: Family,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn generate(&self) -> Result<WeightedGraph> {
        let seed = self.seed;
        match &self.family {
            Family::ErdosRenyi { n, p } => erdos_renyi(*n, *p, seed),
            Family::Sbm { n, b, rho } => sbm(*n, b, *rho, seed),
            Family::PowerLaw { n, alpha, beta } => power_law(*n, *alpha, *beta, seed),
            Family::WRandom { graphon, n, rho } => w_random(graphon, *n, *rho, seed),
            Family::CliquePlusIsolated { n, c } => clique_plus_isolated(*n, *c),
            Family::CycleUnion { len, copies } => cycle_union(*len, *copies),
        }
    }
}

/// Unit-weight simple graph with each pair `u < v` present with probability
/// `p(u, v)`, row `u` drawn from stream `offset + u`.
fn sample_pairs(n: usize, seed: u64, offset: u64, p: impl Fn(usize, usize) -> f64) -> Result<WeightedGraph> {
    let mut m = vec![0.0; n * n];
    for u in 0..n {
        let mut g = rng::stream(seed, offset + u as u64);
        for v in u + 1..n {
            if rng::bernoulli(&mut g, p(u, v)) {
                m[u * n + v] = 1.0;
                m[v * n + u] = 1.0;
            }
        }
    }
    WeightedGraph::new(vec![1.0; n], m)
}

fn probability(p: f64, what: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return invalid(format!("{what} must lie in [0, 1], got {p}"));
    }
    Ok(())
}

pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<WeightedGraph> {
    probability(p, "p")?;
    sample_pairs(n, seed, 0, |_, _| p)
}

/// Block of each vertex: the first `n mod k` blocks have `⌈n/k⌉` vertices,
/// the rest `⌊n/k⌋`, in vertex order.
pub fn sbm_blocks(n: usize, k: usize) -> Vec<usize> {
    let (base, extra) = (n / k, n % k);
    let mut out = Vec::with_capacity(n);
    for block in 0..k {
        let size = base + usize::from(block < extra);
        out.extend(core::iter::repeat_n(block, size));
    }
    out
}

/// `b` symmetric, nonnegative with `k⁻² Σ b_ij = 1`, and `ρ max b ≤ 1`.
pub fn sbm(n: usize, b: &[f64], rho: f64, seed: u64) -> Result<WeightedGraph> {
    let k = math::sqrt(b.len() as f64) as usize;
    if k == 0 || k * k != b.len() {
        return invalid("block matrix must be square and nonempty");
    }
    if b.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
        return invalid("block matrix entries must be finite and nonnegative");
    }
    for i in 0..k {
        for j in 0..i {
            if b[i * k + j] != b[j * k + i] {
                return invalid("block matrix must be symmetric");
            }
        }
    }
    let mean = b.iter().sum::<f64>() / (k * k) as f64;
    if (mean - 1.0).abs() > TOL {
        return invalid(format!("block matrix must average to 1, got {mean}"));
    }
    let bmax = b.iter().cloned().fold(0.0, f64::max);
    if !(rho >= 0.0) || rho * bmax > 1.0 + TOL {
        return invalid("need 0 <= rho <= 1 / max b");
    }
    let blocks = sbm_blocks(n, k);
    sample_pairs(n, seed, 0, |u, v| (rho * b[blocks[u] * k + blocks[v]]).min(1.0))
}

/// `p_ij = min(1, n^β (ij)^{-α})` with 1-based labels.
pub fn power_law_probability(n: usize, alpha: f64, beta: f64, i: usize, j: usize) -> f64 {
    let ij = ((i + 1) * (j + 1)) as f64;
    (math::powf(n as f64, beta) * math::powf(ij, -alpha)).min(1.0)
}

pub fn power_law(n: usize, alpha: f64, beta: f64, seed: u64) -> Result<WeightedGraph> {
    if !(alpha > 0.0 && alpha < 1.0) || !(beta >= 0.0 && beta < 2.0 * alpha) {
        return invalid("need 0 < alpha < 1 and 0 <= beta < 2 alpha");
    }
    sample_pairs(n, seed, 0, |u, v| power_law_probability(n, alpha, beta, u, v))
}

/// Latent positions from stream `u64::MAX`, pairs connected with probability
/// `min(1, ρ W(x_u, x_v))`.
pub fn w_random(w: &StepGraphon, n: usize, rho: f64, seed: u64) -> Result<WeightedGraph> {
    if w.values().iter().any(|&x| x < 0.0) {
        return invalid("graphon must be nonnegative");
    }
    if (w.integral() - 1.0).abs() > TOL {
        return invalid("graphon must integrate to 1");
    }
    if !(rho > 0.0 && rho <= 1.0) {
        return invalid("rho must lie in (0, 1]");
    }
    let bounds = w.boundaries();
    let mut pos = rng::stream(seed, u64::MAX);
    let step: Vec<usize> = (0..n)
        .map(|_| {
            let x = rng::unit(&mut pos);
            let s = bounds[1..].iter().position(|&b| x < b).unwrap_or(w.k() - 1);
            // skip zero-length steps that a rounding tie could select
            (s..w.k()).find(|&a| w.lengths()[a] > 0.0).unwrap_or(s)
        })
        .collect();
    sample_pairs(n, seed, 0, |u, v| (rho * w.value(step[u], step[v])).min(1.0))
}

/// `K_c` on vertices `0..c` plus `n − c` isolated vertices.
pub fn clique_plus_isolated(n: usize, c: usize) -> Result<WeightedGraph> {
    if c > n {
        return invalid(format!("clique size {c} exceeds n = {n}"));
    }
    let mut m = vec![0.0; n * n];
    for u in 0..c {
        for v in 0..c {
            if u != v {
                m[u * n + v] = 1.0;
            }
        }
    }
    WeightedGraph::new(vec![1.0; n], m)
}

/// Two-class partition of [`clique_plus_isolated`] putting `in_clique` clique
/// vertices and `size − in_clique` isolated vertices into class 0.
pub fn clique_split(n: usize, c: usize, size: usize, in_clique: usize) -> Result<VertexPartition> {
    if c > n || in_clique > c || size < in_clique || size - in_clique > n - c {
        return invalid("split does not fit the clique fixture");
    }
    let assign = (0..n)
        .map(|x| {
            let first = if x < c { x < in_clique } else { x - c < size - in_clique };
            usize::from(!first)
        })
        .collect();
    VertexPartition::new(assign, 2)
}

/// The quotient of [`clique_plus_isolated`] under [`clique_split`].
pub fn clique_split_target(n: usize, c: usize, size: usize, in_clique: usize) -> Result<Quotient> {
    clique_plus_isolated(n, c)?.quotient(&clique_split(n, c, size, in_clique)?)
}

/// Disjoint union of `copies` cycles of length `len`.
pub fn cycle_union(len: usize, copies: usize) -> Result<WeightedGraph> {
    if len < 3 || copies == 0 {
        return invalid("need cycle length >= 3 and at least one copy");
    }
    let mut edges = Vec::with_capacity(len * copies);
    for c in 0..copies {
        let base = c * len;
        for i in 0..len {
            edges.push((base + i, base + (i + 1) % len));
        }
    }
    WeightedGraph::simple(len * copies, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erdos_renyi_examples() {
        assert_eq!(erdos_renyi(20, 0.0, 1).unwrap().edge_count(), 0);
        let k = erdos_renyi(10, 1.0, 1).unwrap();
        assert!((k.density() - 0.9).abs() < 1e-15);
        let g = erdos_renyi(1000, 0.1, 7).unwrap();
        assert!((g.density() - 0.0999).abs() < 0.01);
        assert_eq!(g, erdos_renyi(1000, 0.1, 7).unwrap());
        assert!(erdos_renyi(5, 1.5, 0).is_err());
    }

    #[test]
    fn sbm_examples() {
        assert_eq!(sbm_blocks(7, 3), vec![0, 0, 0, 1, 1, 2, 2]);
        let ones = vec![1.0; 4];
        assert_eq!(sbm(50, &ones, 0.3, 4).unwrap(), erdos_renyi(50, 0.3, 4).unwrap());
        assert_eq!(sbm(30, &ones, 0.0, 4).unwrap().edge_count(), 0);
        let g = sbm(2000, &[1.6, 0.4, 0.4, 1.6], 0.2, 3).unwrap();
        let (mut within, mut pairs) = (0.0, 0.0);
        for u in 0..1000 {
            for v in u + 1..1000 {
                within += g.beta(u, v);
                pairs += 1.0;
            }
        }
        assert!((within / pairs - 0.32).abs() < 0.02);
        assert!(sbm(10, &[1.0, 2.0, 0.0, 1.0], 0.1, 0).is_err());
        assert!(sbm(10, &[2.0, 0.0, 0.0, 2.0], 0.6, 0).is_err());
    }

    #[test]
    fn power_law_examples() {
        assert!((power_law_probability(2, 0.5, 0.0, 0, 1) - 1.0 / math::sqrt(2.0)).abs() < 1e-15);
        let n = 1000;
        let (alpha, beta) = (0.4, 0.5);
        let (mut mean, mut var) = (0.0, 0.0);
        for i in 0..n {
            for j in i + 1..n {
                let p = power_law_probability(n, alpha, beta, i, j);
                mean += p;
                var += p * (1.0 - p);
            }
        }
        let g = power_law(n, alpha, beta, 11).unwrap();
        assert!((g.edge_count() as f64 - mean).abs() <= 3.0 * math::sqrt(var));
        let sparse = power_law(300, 0.9, 0.0, 2).unwrap();
        let top = (0..300).map(|x| sparse.degree(x)).fold(0.0, f64::max);
        assert!(power_law_probability(300, 0.9, 0.0, 0, 1) >= power_law_probability(300, 0.9, 0.0, 5, 1));
        assert!(top > 0.0);
        assert!(power_law(10, 0.3, 0.7, 0).is_err());
    }

    #[test]
    fn w_random_examples() {
        let one = StepGraphon::constant(1.0);
        let g = w_random(&one, 40, 0.25, 9).unwrap();
        assert_eq!(g, erdos_renyi(40, 0.25, 9).unwrap());
        assert_eq!(w_random(&one, 1, 0.5, 0).unwrap().edge_count(), 0);
        assert!(w_random(&StepGraphon::constant(-1.0), 5, 0.5, 0).is_err());
        assert!(w_random(&StepGraphon::constant(2.0), 5, 0.5, 0).is_err());
    }

    #[test]
    fn fixtures() {
        let k = clique_plus_isolated(6, 6).unwrap();
        assert_eq!(k.edge_count(), 15);
        assert_eq!(clique_plus_isolated(6, 1).unwrap().edge_count(), 0);
        assert!((clique_plus_isolated(100, 10).unwrap().density() - 0.009).abs() < 1e-15);
        let c4 = cycle_union(4, 1).unwrap();
        assert_eq!((c4.n(), c4.edge_count()), (4, 4));
        let c6 = cycle_union(6, 2).unwrap();
        assert_eq!((c6.n(), c6.edge_count()), (12, 12));
        let p = clique_split(10, 4, 5, 2).unwrap();
        assert_eq!(p.assignment(), &[0, 0, 1, 1, 0, 0, 0, 1, 1, 1]);
        let t = clique_split_target(10, 4, 5, 2).unwrap();
        assert_eq!(t.alpha(), &[0.5, 0.5]);
    }
}
