//! Certified brackets for the cut distance `δ_□` between step graphons.

use alloc::vec::Vec;

use crate::graph::WeightedGraph;
use crate::graphon::{difference, StepGraphon};
use crate::quotient::{directed_hausdorff, grid_size, sample_quotient_set};
use crate::rng;

/// Interval `[lower, upper]` known to contain a quantity. `exact` is set only
/// when the two ends agree to `1e-12`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceBound {
    pub lower: f64,
    pub upper: f64,
    pub exact: bool,
}

impl DistanceBound {
    pub(crate) fn new(lower: f64, upper: f64) -> Self {
        let lower = lower.max(0.0).min(upper);
        let exact = upper - lower <= 1e-12;
        Self {
            lower: if exact { upper } else { lower },
            upper,
            exact,
        }
    }

    /// A bracket on a signed quantity; only orders the endpoints.
    pub(crate) fn interval(lower: f64, upper: f64) -> Self {
        let lower = lower.min(upper);
        let exact = upper - lower <= 1e-12;
        Self {
            lower: if exact { upper } else { lower },
            upper,
            exact,
        }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        x >= self.lower - tol && x <= self.upper + tol
    }
}

/// Search limits for [`cut_distance`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutDistanceOptions {
    /// Maximum number of alignments tried by each search phase.
    pub budget: usize,
    pub seed: u64,
    /// Step count up to which cut norms are computed exactly.
    pub exact_steps: usize,
    /// Random restarts of the pair-swap search.
    pub restarts: usize,
    /// Largest quotient net built for the lower bound.
    pub net_points: u128,
    /// Largest number of point pairs compared for the lower bound.
    pub pair_cap: u128,
}

impl Default for CutDistanceOptions {
    fn default() -> Self {
        Self {
            budget: 720,
            seed: 0,
            exact_steps: 16,
            restarts: 4,
            net_points: 20_000,
            pair_cap: 2_000_000,
        }
    }
}

impl CutDistanceOptions {
    pub fn with_budget(budget: usize, seed: u64) -> Self {
        Self {
            budget,
            seed,
            ..Self::default()
        }
    }
}

/// Bracket for `δ_□(U, W)`.
///
/// The upper end is the smallest certified cut-norm bound of `U − W∘σ` over
/// the tried step alignments `σ`: identity, degree order, every permutation
/// of `W`'s steps or of a shared equal-length grid when that count fits the
/// budget, and pair-swap local search. The lower end is the best of
/// `|∫U − ∫W|` and `(d(x, net of Ŝ_q(B)) − radius)/q²` over points `x` of a
/// net of `Ŝ_q(A)` for `q ∈ {2, 3}` in both directions.
pub fn cut_distance(u: &StepGraphon, w: &StepGraphon, opts: &CutDistanceOptions) -> DistanceBound {
    let u = u.without_empty_steps();
    let w = w.without_empty_steps();
    let upper = upper_bound(&u, &w, opts);
    let mut lower = (u.integral() - w.integral()).abs();
    if lower < upper - 1e-12 {
        for q in [2usize, 3] {
            lower = lower.max(net_lower(&u, &w, q, opts));
            lower = lower.max(net_lower(&w, &u, q, opts));
        }
    }
    DistanceBound::new(lower, upper.max(lower))
}

/// `δ̂_□(G, G′)`: [`cut_distance`] of the normalized embeddings.
pub fn normalized_cut_distance(
    g: &WeightedGraph,
    g2: &WeightedGraph,
    opts: &CutDistanceOptions,
) -> DistanceBound {
    cut_distance(&StepGraphon::normalize(g), &StepGraphon::normalize(g2), opts)
}

fn eval(u: &StepGraphon, w: &StepGraphon, order: &[usize], kmax: usize) -> f64 {
    let wp = w.permute_steps(order).expect("order is a permutation");
    difference(u, &wp).cut_norm_upper(kmax)
}

fn degree_order(w: &StepGraphon) -> Vec<usize> {
    let deg: Vec<f64> = (0..w.k()).map(|a| w.degree(a)).collect();
    let mut order: Vec<usize> = (0..w.k()).collect();
    order.sort_by(|&a, &b| deg[b].total_cmp(&deg[a]).then(a.cmp(&b)));
    order
}

pub(crate) fn factorial_at_most(k: usize, budget: usize) -> bool {
    let mut f: usize = 1;
    for i in 2..=k {
        f = match f.checked_mul(i) {
            Some(x) => x,
            None => return false,
        };
        if f > budget {
            return false;
        }
    }
    true
}

pub(crate) fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn is_equal_steps(w: &StepGraphon) -> bool {
    let l = 1.0 / w.k() as f64;
    w.lengths().iter().all(|&x| (x - l).abs() <= 1e-12)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Both graphons on `m` equal cells, if they already have equal steps.
pub(crate) fn equal_grid(u: &StepGraphon, w: &StepGraphon) -> Option<(StepGraphon, StepGraphon)> {
    if !is_equal_steps(u) || !is_equal_steps(w) {
        return None;
    }
    let (ku, kw) = (u.k(), w.k());
    let m = ku / gcd(ku, kw) * kw;
    let lengths = alloc::vec![1.0 / m as f64; m];
    let pu: Vec<usize> = (0..m).map(|c| c / (m / ku)).collect();
    let pw: Vec<usize> = (0..m).map(|c| c / (m / kw)).collect();
    Some((u.refine(&lengths, &pu).ok()?, w.refine(&lengths, &pw).ok()?))
}

fn upper_bound(u: &StepGraphon, w: &StepGraphon, opts: &CutDistanceOptions) -> f64 {
    let kmax = opts.exact_steps;
    let identity: Vec<usize> = (0..w.k()).collect();
    let mut best = eval(u, w, &identity, kmax);
    if best == 0.0 {
        return 0.0;
    }
    // degree order on both sides
    let su = u.permute_steps(&degree_order(u)).expect("permutation");
    let dw = degree_order(w);
    best = best.min(eval(&su, w, &dw, kmax));

    let (base_u, base_w) = match equal_grid(u, w) {
        Some((gu, gw)) if gu.k() <= 64 => (gu, gw),
        _ => (u.clone(), w.clone()),
    };
    let k = base_w.k();
    if factorial_at_most(w.k(), opts.budget) {
        let mut p = identity.clone();
        loop {
            best = best.min(eval(u, w, &p, kmax));
            if best == 0.0 || !next_permutation(&mut p) {
                break;
            }
        }
    }
    if base_w.k() != w.k() && factorial_at_most(k, opts.budget) {
        let mut p: Vec<usize> = (0..k).collect();
        loop {
            best = best.min(eval(&base_u, &base_w, &p, kmax));
            if best == 0.0 || !next_permutation(&mut p) {
                break;
            }
        }
    }
    if best == 0.0 || k < 2 {
        return best;
    }
    // pair-swap descent from the degree alignment and random starts
    let du = degree_order(&base_u);
    let su = base_u.permute_steps(&du).expect("permutation");
    let mut starts = alloc::vec![degree_order(&base_w)];
    for r in 0..opts.restarts {
        let mut g = rng::stream(opts.seed, r as u64);
        let mut p: Vec<usize> = (0..k).collect();
        for i in (1..k).rev() {
            p.swap(i, rng::index(&mut g, i + 1));
        }
        starts.push(p);
    }
    let mut evals = 0usize;
    for mut p in starts {
        let mut cur = eval(&su, &base_w, &p, kmax);
        let mut improved = true;
        while improved && evals < opts.budget {
            improved = false;
            'scan: for i in 0..k {
                for j in i + 1..k {
                    p.swap(i, j);
                    let v = eval(&su, &base_w, &p, kmax);
                    evals += 1;
                    if v < cur - 1e-15 {
                        cur = v;
                        improved = true;
                        break 'scan;
                    }
                    p.swap(i, j);
                    if evals >= opts.budget {
                        break 'scan;
                    }
                }
            }
        }
        best = best.min(cur);
        if evals >= opts.budget {
            break;
        }
    }
    best
}

fn finest_parts(k: usize, q: usize, cap: u128) -> usize {
    let mut parts = 0;
    for n in 1..=256 {
        if grid_size(k, q, n) <= cap {
            parts = n;
        } else {
            break;
        }
    }
    parts
}

/// `(sup_{x ∈ net A} d(x, net B) − radius_B) / q²`, or 0 when the nets do not
/// fit the caps.
fn net_lower(a: &StepGraphon, b: &StepGraphon, q: usize, opts: &CutDistanceOptions) -> f64 {
    let nb = finest_parts(b.k(), q, opts.net_points);
    if nb == 0 {
        return 0.0;
    }
    let size_b = grid_size(b.k(), q, nb);
    let na = finest_parts(a.k(), q, (opts.pair_cap / size_b).min(opts.net_points));
    if na == 0 {
        return 0.0;
    }
    let (Ok(net_a), Ok(net_b)) = (
        sample_quotient_set(a, q, 1.0 / na as f64, 0, 0),
        sample_quotient_set(b, q, 1.0 / nb as f64, 0, 0),
    ) else {
        return 0.0;
    };
    let radius = net_b.meta.radius.unwrap_or(f64::INFINITY);
    match directed_hausdorff(&net_a.points, &net_b.points) {
        Ok(d) => ((d - radius) / (q * q) as f64).max(0.0),
        Err(_) => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn opts() -> CutDistanceOptions {
        CutDistanceOptions::default()
    }

    #[test]
    fn identical() {
        let w = StepGraphon::new(vec![0.2, 0.8], vec![1.0, 0.3, 0.3, 0.0]).unwrap();
        let d = cut_distance(&w, &w, &opts());
        assert_eq!((d.lower, d.upper, d.exact), (0.0, 0.0, true));
    }

    #[test]
    fn permuted_copy() {
        let w = StepGraphon::new(
            vec![0.2, 0.3, 0.5],
            vec![1.0, 0.3, 0.0, 0.3, 0.0, 2.0, 0.0, 2.0, 0.5],
        )
        .unwrap();
        let p = w.permute_steps(&[2, 0, 1]).unwrap();
        let d = cut_distance(&w, &p, &opts());
        assert!(d.upper < 1e-14);
    }

    #[test]
    fn constant_versus_block_diagonal() {
        let one = StepGraphon::constant(1.0);
        let y = StepGraphon::uniform_steps(vec![2.0, 0.0, 0.0, 2.0]).unwrap();
        let d = cut_distance(&one, &y, &opts());
        assert!((d.upper - 0.25).abs() < 1e-14);
        assert!(d.lower > 0.2 && d.lower <= d.upper);
    }

    #[test]
    fn normalization_removes_scale() {
        let g = WeightedGraph::simple(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let d = normalized_cut_distance(&g, &g.scale(3.0), &opts());
        assert_eq!(d.upper, 0.0);
        let k2 = WeightedGraph::simple(2, &[(0, 1)]).unwrap();
        let k3 = WeightedGraph::simple(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let d = normalized_cut_distance(&k2, &k3, &opts());
        assert!(d.lower <= d.upper && d.upper <= 0.5);
    }

    #[test]
    fn permutation_iterator_counts() {
        let mut p = alloc::vec![0, 1, 2, 3];
        let mut n = 1;
        while next_permutation(&mut p) {
            n += 1;
        }
        assert_eq!(n, 24);
    }
}
