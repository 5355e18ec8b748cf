//! Probabilities of quotient balls under a uniformly random coloring,
//! empirical rates, and the graphon rate function.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{ensure_dim, invalid, Error, Result};
use crate::graph::{Quotient, VertexPartition, WeightedGraph};
use crate::graphon::StepGraphon;
use crate::math::{self, LogSumExp};
use crate::quotient::{for_each_grid_partition, fractional_quotient, StepFractionalPartition};
use crate::rng;

/// Slack added to the ball radius.
pub const BALL_TOL: f64 = 1e-12;

/// How to evaluate a ball probability.
#[derive(Debug, Clone, PartialEq)]
pub enum BallMethod {
    /// All `q^n` maps; fails when `q^n > budget`.
    Enumeration { budget: u128 },
    /// Count tables over the vertex types of `classes`, on which the graph
    /// must be block constant; fails when the number of tables exceeds
    /// `budget`.
    Multinomial { classes: VertexPartition, budget: u128 },
    /// `samples` uniform maps, map `s` drawn from stream `s` of `seed`.
    MonteCarlo { samples: usize, seed: u64 },
}

/// Tag of a [`BallMethod`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateMethod {
    ExactEnumeration,
    ExactMultinomial,
    MonteCarlo,
}

impl RateMethod {
    pub fn tag(self) -> &'static str {
        match self {
            Self::ExactEnumeration => "exact_enumeration",
            Self::ExactMultinomial => "exact_multinomial",
            Self::MonteCarlo => "monte_carlo",
        }
    }
}

/// `−log P / n` for one graph. `value` is `∞` when the ball is empty. For
/// Monte Carlo, `stderr` is half the width of the Wilson interval (z = 1)
/// mapped to the rate scale; with zero hits `value` is only a lower bound
/// (from the upper Wilson limit) and `lower_bound_only` is set.
#[derive(Debug, Clone, PartialEq)]
pub struct RateEstimate {
    pub value: f64,
    pub n: usize,
    pub eps: f64,
    pub method: RateMethod,
    pub probability: f64,
    pub log_prob: f64,
    pub stderr: Option<f64>,
    pub lower_bound_only: bool,
}

fn check_target(q: usize, target: &Quotient, eps: f64) -> Result<()> {
    ensure_dim(q, target.q())?;
    if !(eps > 0.0) {
        return invalid("ball radius must be positive");
    }
    Ok(())
}

/// `P_{q,G}[d₁(target, G/φ) ≤ ε]` for a uniformly random `φ : V → [q]`.
pub fn quotient_ball_probability(
    g: &WeightedGraph,
    q: usize,
    target: &Quotient,
    eps: f64,
    method: &BallMethod,
) -> Result<RateEstimate> {
    check_target(q, target, eps)?;
    let n = g.n();
    let exact = |log_prob: f64, method| RateEstimate {
        value: if log_prob == f64::NEG_INFINITY { f64::INFINITY } else { (-log_prob / n as f64).max(0.0) },
        n,
        eps,
        method,
        probability: math::exp(log_prob),
        log_prob,
        stderr: None,
        lower_bound_only: false,
    };
    match method {
        BallMethod::Enumeration { budget } => {
            let needed = math::pow_saturating(q, n);
            if needed > *budget {
                return Err(Error::Budget { needed, budget: *budget });
            }
            let mut hits: u128 = 0;
            let mut err = None;
            math::for_each_map(n, q, |phi| {
                let p = VertexPartition::new(phi.to_vec(), q).expect("labels below q");
                match g.quotient(&p).and_then(|x| x.d1(target)) {
                    Ok(d) if d <= eps + BALL_TOL => hits += 1,
                    Ok(_) => {}
                    Err(e) => err = Some(e),
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
            let log_prob = if hits == 0 {
                f64::NEG_INFINITY
            } else {
                math::ln(hits as f64) - n as f64 * math::ln(q as f64)
            };
            Ok(exact(log_prob, RateMethod::ExactEnumeration))
        }
        BallMethod::Multinomial { classes, budget } => {
            let lp = multinomial_log_probability(g, q, target, eps, classes, *budget)?;
            Ok(exact(lp, RateMethod::ExactMultinomial))
        }
        BallMethod::MonteCarlo { samples, seed } => {
            if *samples == 0 {
                return invalid("monte carlo needs at least one sample");
            }
            let mut hits = 0usize;
            for s in 0..*samples {
                let mut r = rng::stream(*seed, s as u64);
                let phi: Vec<usize> = (0..n).map(|_| rng::index(&mut r, q)).collect();
                let p = VertexPartition::new(phi, q).expect("labels below q");
                if g.quotient(&p)?.d1(target)? <= eps + BALL_TOL {
                    hits += 1;
                }
            }
            let (lo, hi) = wilson(hits, *samples, 1.0);
            let nn = n as f64;
            let p = hits as f64 / *samples as f64;
            if hits == 0 {
                return Ok(RateEstimate {
                    value: -math::ln(hi) / nn,
                    n,
                    eps,
                    method: RateMethod::MonteCarlo,
                    probability: 0.0,
                    log_prob: f64::NEG_INFINITY,
                    stderr: None,
                    lower_bound_only: true,
                });
            }
            Ok(RateEstimate {
                value: (-math::ln(p) / nn).max(0.0),
                n,
                eps,
                method: RateMethod::MonteCarlo,
                probability: p,
                log_prob: math::ln(p),
                stderr: Some((math::ln(hi) - math::ln(lo)) / (2.0 * nn)),
                lower_bound_only: false,
            })
        }
    }
}

/// Wilson score interval for `hits` successes in `trials`.
pub fn wilson(hits: usize, trials: usize, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * math::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Per-type constants of a block-constant graph.
struct TypeTable {
    t: usize,
    sizes: Vec<usize>,
    weight: Vec<f64>,
    /// Edge weight between distinct vertices of types `μ, ν`.
    cross: Vec<f64>,
    /// Loop weight of type `μ`.
    diag: Vec<f64>,
}

fn type_table(g: &WeightedGraph, classes: &VertexPartition) -> Result<TypeTable> {
    ensure_dim(g.n(), classes.len())?;
    let t = classes.q();
    let n = g.n();
    let mut sizes = vec![0usize; t];
    let mut weight = vec![f64::NAN; t];
    let mut cross = vec![f64::NAN; t * t];
    let mut diag = vec![f64::NAN; t];
    let set = |slot: &mut f64, v: f64, what: &str| -> Result<()> {
        if slot.is_nan() {
            *slot = v;
            Ok(())
        } else if *slot != v {
            invalid(alloc::format!("graph is not block constant: {what} varies"))
        } else {
            Ok(())
        }
    };
    for x in 0..n {
        let mu = classes.class_of(x);
        sizes[mu] += 1;
        set(&mut weight[mu], g.alpha(x), "vertex weight")?;
        set(&mut diag[mu], g.beta(x, x), "loop weight")?;
        for y in 0..n {
            if y != x {
                let nu = classes.class_of(y);
                set(&mut cross[mu * t + nu], g.beta(x, y), "edge weight")?;
            }
        }
    }
    for v in weight.iter_mut().chain(cross.iter_mut()).chain(diag.iter_mut()) {
        if v.is_nan() {
            *v = 0.0;
        }
    }
    Ok(TypeTable { t, sizes, weight, cross, diag })
}

/// Log of the ball probability summed over count tables `k_{iμ}` with the
/// multiplicity `Π_μ n_μ! / Π_i k_{iμ}!`.
fn multinomial_log_probability(
    g: &WeightedGraph,
    q: usize,
    target: &Quotient,
    eps: f64,
    classes: &VertexPartition,
    budget: u128,
) -> Result<f64> {
    let tt = type_table(g, classes)?;
    let t = tt.t;
    let mut needed: u128 = 1;
    for &s in &tt.sizes {
        needed = needed.saturating_mul(math::compositions_count(s, q));
    }
    if needed > budget {
        return Err(Error::Budget { needed, budget });
    }
    let lf = math::log_factorials(g.n());
    let total = g.total_weight();
    let norm = total * total * g.density();
    let mut per_type: Vec<Vec<Vec<usize>>> = Vec::with_capacity(t);
    for &s in &tt.sizes {
        let mut comps = Vec::new();
        math::for_each_composition(s, q, |c| comps.push(c.to_vec()));
        per_type.push(comps);
    }
    let mut acc = LogSumExp::new();
    let mut alpha = vec![0.0; q];
    let mut sums = vec![0.0; q * q];
    let radices: Vec<usize> = per_type.iter().map(|c| c.len()).collect();
    let mut idx = vec![0usize; t];
    loop {
        // k[i][μ]
        let k = |i: usize, mu: usize| per_type[mu][idx[mu]][i] as f64;
        alpha.iter_mut().for_each(|a| *a = 0.0);
        sums.iter_mut().for_each(|s| *s = 0.0);
        for mu in 0..t {
            for i in 0..q {
                alpha[i] += tt.weight[mu] * k(i, mu) / total;
            }
        }
        if norm > 0.0 {
            for i in 0..q {
                for j in 0..q {
                    let mut s = 0.0;
                    for mu in 0..t {
                        for nu in 0..t {
                            s += tt.weight[mu] * tt.weight[nu] * k(i, mu) * k(j, nu) * tt.cross[mu * t + nu];
                        }
                    }
                    if i == j {
                        for mu in 0..t {
                            s -= tt.weight[mu] * tt.weight[mu] * k(i, mu) * (tt.cross[mu * t + mu] - tt.diag[mu]);
                        }
                    }
                    sums[i * q + j] = s / norm;
                }
            }
        }
        let d: f64 = alpha.iter().zip(target.alpha()).map(|(a, b)| (a - b).abs()).sum::<f64>()
            + sums.iter().zip(target.beta_matrix()).map(|(a, b)| (a - b).abs()).sum::<f64>();
        if d <= eps + BALL_TOL {
            let mut lw = 0.0;
            for mu in 0..t {
                lw += lf[tt.sizes[mu]];
                for i in 0..q {
                    lw -= lf[per_type[mu][idx[mu]][i]];
                }
            }
            acc.push(lw);
        }
        // odometer over the per-type compositions
        let mut pos = 0;
        loop {
            if pos == t {
                let lz = acc.value();
                return Ok(if lz == f64::NEG_INFINITY {
                    lz
                } else {
                    lz - g.n() as f64 * math::ln(q as f64)
                });
            }
            idx[pos] += 1;
            if idx[pos] < radices[pos] {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// One graph of a rate sequence together with its target and method.
#[derive(Debug, Clone, PartialEq)]
pub struct RateQuery {
    pub graph: WeightedGraph,
    pub target: Quotient,
    pub method: BallMethod,
}

/// `−log P / n` for each query, in order.
pub fn empirical_rate(queries: &[RateQuery], q: usize, eps: f64) -> Result<Vec<RateEstimate>> {
    queries
        .iter()
        .map(|r| quotient_ball_probability(&r.graph, q, &r.target, eps, &r.method))
        .collect()
}

/// Search settings for [`graphon_rate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphonRateOptions {
    /// Per-row simplex mesh of the candidate net.
    pub mesh: f64,
    pub restarts: usize,
    pub seed: u64,
    /// Constraint radius `d₁(W/ρ, target) ≤ tol`; defaults to the net radius.
    pub tol: Option<f64>,
    /// Largest net enumerated.
    pub net_limit: u128,
}

impl GraphonRateOptions {
    pub fn new(mesh: f64, seed: u64) -> Self {
        Self {
            mesh,
            restarts: 4,
            seed,
            tol: None,
            net_limit: 1_000_000,
        }
    }
}

/// Result of [`graphon_rate`]: `log q − Ent(ρ)` for the best feasible `ρ`
/// found, or `∞` when no candidate satisfies the constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphonRate {
    pub value: f64,
    pub tol: f64,
    /// Covering radius of the candidate net.
    pub radius: f64,
    pub rho: Option<StepFractionalPartition>,
}

/// `I_q(target, W) = inf { log q − Ent(ρ) : d₁(W/ρ, target) ≤ tol }`.
///
/// Candidates are the uniform partition and every partition on the per-row
/// simplex grid; each feasible candidate is then moved toward higher entropy
/// (toward the uniform partition, toward the row-constant partition with the
/// same class weights, and by penalized mean-field steps), keeping only
/// points that remain feasible.
pub fn graphon_rate(
    w: &StepGraphon,
    q: usize,
    target: &Quotient,
    opts: &GraphonRateOptions,
) -> Result<GraphonRate> {
    ensure_dim(q, target.q())?;
    if !(opts.mesh > 0.0) {
        return invalid("mesh must be positive");
    }
    let parts = math::ceil(1.0 / opts.mesh) as usize;
    let radius = 2.0 * (1.0 + 2.0 * w.sup_norm()) * q as f64 * opts.mesh;
    let tol = opts.tol.unwrap_or(radius);
    let lengths = w.lengths().to_vec();
    let logq = math::ln(q as f64);
    let dist = |rho: &StepFractionalPartition| -> f64 {
        fractional_quotient(w, rho)
            .and_then(|x| x.d1(target))
            .unwrap_or(f64::INFINITY)
    };
    let feasible = |rho: &StepFractionalPartition| dist(rho) <= tol + BALL_TOL;

    let uniform = StepFractionalPartition::uniform(lengths.clone(), q)?;
    if feasible(&uniform) {
        return Ok(GraphonRate {
            value: 0.0,
            tol,
            radius,
            rho: Some(uniform),
        });
    }
    let mut cands: Vec<(f64, StepFractionalPartition)> = Vec::new();
    for_each_grid_partition(&lengths, q, parts, opts.net_limit, |rho| {
        if feasible(rho) {
            cands.push((rho.entropy(), rho.clone()));
        }
    })?;
    if cands.is_empty() {
        return Ok(GraphonRate {
            value: f64::INFINITY,
            tol,
            radius,
            rho: None,
        });
    }
    cands.sort_by(|a, b| b.0.total_cmp(&a.0));
    cands.truncate(opts.restarts.max(1));
    let mut best = cands[0].clone();
    for (r, (_, start)) in cands.into_iter().enumerate() {
        let mut cur = start;
        for _ in 0..50 {
            let before = cur.entropy();
            let row_const = row_constant(&cur);
            for toward in [&uniform, &row_const] {
                if let Some(x) = push_toward(&cur, toward, &feasible) {
                    if x.entropy() > cur.entropy() {
                        cur = x;
                    }
                }
            }
            let mut g = rng::stream(opts.seed, r as u64);
            if let Some(x) = penalty_step(w, target, &cur, tol, &feasible, &mut g) {
                if x.entropy() > cur.entropy() {
                    cur = x;
                }
            }
            if cur.entropy() <= before + 1e-13 {
                break;
            }
        }
        let e = cur.entropy();
        if e > best.0 {
            best = (e, cur);
        }
    }
    Ok(GraphonRate {
        value: (logq - best.0).max(0.0),
        tol,
        radius,
        rho: Some(best.1),
    })
}

fn mix(a: &StepFractionalPartition, b: &StepFractionalPartition, t: f64) -> StepFractionalPartition {
    let weights = a
        .weights()
        .iter()
        .zip(b.weights())
        .map(|(x, y)| (1.0 - t) * x + t * y)
        .collect();
    StepFractionalPartition::new(a.lengths().to_vec(), weights, a.q()).expect("convex combination")
}

fn row_constant(rho: &StepFractionalPartition) -> StepFractionalPartition {
    let a = rho.alpha();
    let s: f64 = a.iter().sum();
    let row: Vec<f64> = a.iter().map(|x| x / s).collect();
    let weights = (0..rho.k()).flat_map(|_| row.iter().copied()).collect();
    StepFractionalPartition::new(rho.lengths().to_vec(), weights, rho.q()).expect("stochastic rows")
}

/// Largest `t` on a halving ladder with `mix(from, to, t)` feasible. Entropy
/// is concave, so any such point has entropy at least that of `from` when
/// `to` has larger entropy.
fn push_toward(
    from: &StepFractionalPartition,
    to: &StepFractionalPartition,
    feasible: &impl Fn(&StepFractionalPartition) -> bool,
) -> Option<StepFractionalPartition> {
    let mut t = 1.0;
    for _ in 0..30 {
        let x = mix(from, to, t);
        if feasible(&x) {
            return Some(x);
        }
        t *= 0.5;
    }
    None
}

/// One softmax step on `log ρ` against the gradient of
/// `½‖W/ρ − target‖²` scaled to the remaining slack; returned only when
/// feasible.
fn penalty_step(
    w: &StepGraphon,
    target: &Quotient,
    rho: &StepFractionalPartition,
    tol: f64,
    feasible: &impl Fn(&StepFractionalPartition) -> bool,
    g: &mut rng::StreamRng,
) -> Option<StepFractionalPartition> {
    let (k, q) = (rho.k(), rho.q());
    let x = fractional_quotient(w, rho).ok()?;
    let l = w.lengths();
    // ∂/∂ρ_μi of α_i and β_ij, contracted with the residual
    let ra: Vec<f64> = x.alpha().iter().zip(target.alpha()).map(|(a, b)| a - b).collect();
    let rb: Vec<f64> = x.beta_matrix().iter().zip(target.beta_matrix()).map(|(a, b)| a - b).collect();
    let mut grad = vec![0.0; k * q];
    for mu in 0..k {
        for i in 0..q {
            let mut s = l[mu] * ra[i];
            for nu in 0..k {
                let wv = w.value(mu, nu);
                if wv == 0.0 {
                    continue;
                }
                for j in 0..q {
                    s += 2.0 * l[mu] * l[nu] * wv * rho.get(nu, j) * rb[i * q + j];
                }
            }
            grad[mu * q + i] = s;
        }
    }
    let scale = 1.0 + rng::unit(g);
    for step in [1.0, 0.3, 0.1, 0.03] {
        let mut weights = vec![0.0; k * q];
        for mu in 0..k {
            let mut z = 0.0;
            for i in 0..q {
                // entropy ascent pulls toward uniform, the penalty toward the target
                let base = math::ln(rho.get(mu, i).max(1e-300));
                let v = math::exp((1.0 - 0.5 * step) * base - step * scale * grad[mu * q + i] / tol.max(1e-12));
                weights[mu * q + i] = v;
                z += v;
            }
            for i in 0..q {
                weights[mu * q + i] /= z;
            }
        }
        if let Ok(cand) = StepFractionalPartition::new(l.to_vec(), weights, q) {
            if feasible(&cand) && cand.entropy() > rho.entropy() {
                return Some(cand);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k2() -> WeightedGraph {
        WeightedGraph::simple(2, &[(0, 1)]).unwrap()
    }

    fn split() -> Quotient {
        Quotient::new(vec![0.5, 0.5], vec![0.0, 0.5, 0.5, 0.0]).unwrap()
    }

    const ENUM: BallMethod = BallMethod::Enumeration { budget: 1 << 20 };

    #[test]
    fn k2_balls() {
        let r = quotient_ball_probability(&k2(), 2, &split(), 0.01, &ENUM).unwrap();
        assert!((r.probability - 0.5).abs() < 1e-15);
        let one = Quotient::new(vec![1.0, 0.0], vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let r = quotient_ball_probability(&k2(), 2, &one, 0.01, &ENUM).unwrap();
        assert!((r.probability - 0.25).abs() < 1e-15);
        let r = quotient_ball_probability(&k2(), 2, &one, 4.0, &ENUM).unwrap();
        assert!((r.probability - 1.0).abs() < 1e-15);
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn empty_ball_is_infinite() {
        let far = Quotient::new(vec![0.5, 0.5], vec![0.0; 4]).unwrap();
        let r = quotient_ball_probability(&k2(), 2, &far, 0.01, &ENUM).unwrap();
        assert_eq!((r.probability, r.value), (0.0, f64::INFINITY));
    }

    #[test]
    fn q1_is_certain() {
        let g = WeightedGraph::simple(3, &[(0, 1)]).unwrap();
        let x = g.quotient(&VertexPartition::trivial(3)).unwrap();
        let r = quotient_ball_probability(&g, 1, &x, 0.01, &ENUM).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn budget_and_validation() {
        assert!(matches!(
            quotient_ball_probability(&k2(), 2, &split(), 0.01, &BallMethod::Enumeration { budget: 3 }),
            Err(Error::Budget { .. })
        ));
        assert!(quotient_ball_probability(&k2(), 2, &split(), 0.0, &ENUM).is_err());
        let not_block = WeightedGraph::simple(3, &[(0, 1)]).unwrap();
        let m = BallMethod::Multinomial {
            classes: VertexPartition::trivial(3),
            budget: 1000,
        };
        let t = Quotient::new(vec![0.5, 0.5], vec![0.0; 4]).unwrap();
        assert!(quotient_ball_probability(&not_block, 2, &t, 0.1, &m).is_err());
    }

    #[test]
    fn multinomial_matches_enumeration_on_k4() {
        let k4 = WeightedGraph::simple(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let m = BallMethod::Multinomial {
            classes: VertexPartition::trivial(4),
            budget: 1000,
        };
        let t = k4.quotient(&VertexPartition::new(vec![0, 0, 1, 1], 2).unwrap()).unwrap();
        let a = quotient_ball_probability(&k4, 2, &t, 0.01, &m).unwrap();
        let b = quotient_ball_probability(&k4, 2, &t, 0.01, &ENUM).unwrap();
        assert!((a.probability - b.probability).abs() < 1e-15);
        assert!((a.probability - 6.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn monte_carlo_brackets_truth() {
        let r = quotient_ball_probability(
            &k2(),
            2,
            &split(),
            0.01,
            &BallMethod::MonteCarlo { samples: 4000, seed: 1 },
        )
        .unwrap();
        assert!((r.probability - 0.5).abs() < 0.05);
        assert!(r.stderr.unwrap() > 0.0);
        let far = Quotient::new(vec![0.5, 0.5], vec![0.0; 4]).unwrap();
        let r = quotient_ball_probability(&k2(), 2, &far, 0.01, &BallMethod::MonteCarlo { samples: 100, seed: 1 })
            .unwrap();
        assert!(r.lower_bound_only && r.value.is_finite() && r.value > 0.0);
    }

    #[test]
    fn graphon_rate_examples() {
        let w = StepGraphon::new(vec![0.5, 0.5], vec![1.0, 0.2, 0.2, 0.0]).unwrap();
        let u = StepFractionalPartition::uniform(vec![0.5, 0.5], 2).unwrap();
        let t = fractional_quotient(&w, &u).unwrap();
        let mut o = GraphonRateOptions::new(0.25, 0);
        o.tol = Some(1e-9);
        assert_eq!(graphon_rate(&w, 2, &t, &o).unwrap().value, 0.0);

        let far = Quotient::new(vec![0.5, 0.5], vec![5.0, 0.0, 0.0, 5.0]).unwrap();
        let r = graphon_rate(&w, 2, &far, &GraphonRateOptions::new(0.25, 0)).unwrap();
        assert_eq!(r.value, f64::INFINITY);

        let z = Quotient::new(vec![0.5, 0.5], vec![0.0; 4]).unwrap();
        let r = graphon_rate(&StepGraphon::zero(), 2, &z, &o).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn graphon_rate_hard_split() {
        // the only partitions hitting the split quotient of a two-step
        // bipartite graphon are the hard splits, so the rate is log 2
        let w = StepGraphon::new(vec![0.5, 0.5], vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let t = Quotient::new(vec![0.5, 0.5], vec![0.0, 0.25, 0.25, 0.0]).unwrap();
        let mut o = GraphonRateOptions::new(0.1, 0);
        o.tol = Some(1e-9);
        let r = graphon_rate(&w, 2, &t, &o).unwrap();
        assert!((r.value - math::ln(2.0)).abs() < 1e-12);
    }
}
