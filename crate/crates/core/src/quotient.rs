//! Fractional partitions of step graphons, their quotients and entropy, and
//! finite nets of quotient sets under the Hausdorff metric.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{ensure_dim, invalid, Error, Result};
use crate::graph::{Quotient, VertexPartition, WeightedGraph};
use crate::graphon::StepGraphon;
use crate::math;
use crate::rng;

/// Largest net that [`sample_quotient_set`] materializes in grid mode.
pub const GRID_POINT_LIMIT: u128 = 10_000_000;

const ROW_TOL: f64 = 1e-12;

/// A step-constant fractional `q`-partition: row `μ` is the distribution of
/// step `μ` over the `q` classes.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFractionalPartition {
    lengths: Vec<f64>,
    weights: Vec<f64>,
    q: usize,
}

impl StepFractionalPartition {
    pub fn new(lengths: Vec<f64>, weights: Vec<f64>, q: usize) -> Result<Self> {
        let k = lengths.len();
        if q == 0 || k == 0 {
            return invalid("fractional partition needs k >= 1 steps and q >= 1 classes");
        }
        ensure_dim(k * q, weights.len())?;
        if lengths.iter().any(|&l| !l.is_finite() || l < 0.0) {
            return invalid("step lengths must be finite and nonnegative");
        }
        if (lengths.iter().sum::<f64>() - 1.0).abs() > ROW_TOL {
            return invalid("step lengths must sum to 1");
        }
        for mu in 0..k {
            let row = &weights[mu * q..(mu + 1) * q];
            if row.iter().any(|&r| !(-ROW_TOL..=1.0 + ROW_TOL).contains(&r)) {
                return invalid(format!("row {mu} has an entry outside [0,1]"));
            }
            if (row.iter().sum::<f64>() - 1.0).abs() > ROW_TOL {
                return invalid(format!("row {mu} does not sum to 1"));
            }
        }
        Ok(Self { lengths, weights, q })
    }

    /// Every row equal to `1/q`.
    pub fn uniform(lengths: Vec<f64>, q: usize) -> Result<Self> {
        let k = lengths.len();
        Self::new(lengths, vec![1.0 / q as f64; k * q], q)
    }

    /// 0/1 rows: step `μ` goes entirely to class `assignment[μ]`.
    pub fn hard(lengths: Vec<f64>, assignment: &[usize], q: usize) -> Result<Self> {
        ensure_dim(lengths.len(), assignment.len())?;
        let mut weights = vec![0.0; lengths.len() * q];
        for (mu, &i) in assignment.iter().enumerate() {
            if i >= q {
                return invalid(format!("class {i} out of range for q = {q}"));
            }
            weights[mu * q + i] = 1.0;
        }
        Self::new(lengths, weights, q)
    }

    /// `ρ_φ` on the steps of `W^G`.
    pub fn from_vertex_partition(g: &WeightedGraph, p: &VertexPartition) -> Result<Self> {
        ensure_dim(g.n(), p.len())?;
        let lengths = crate::graphon::StepGraphon::embed(g).lengths().to_vec();
        Self::hard(lengths, p.assignment(), p.q())
    }

    pub fn k(&self) -> usize {
        self.lengths.len()
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    /// Row-major `k × q` matrix.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn row(&self, mu: usize) -> &[f64] {
        &self.weights[mu * self.q..(mu + 1) * self.q]
    }

    #[inline]
    pub fn get(&self, mu: usize, i: usize) -> f64 {
        self.weights[mu * self.q + i]
    }

    /// `α_i(ρ) = Σ_μ len_μ ρ_{μi}`.
    pub fn alpha(&self) -> Vec<f64> {
        let mut a = vec![0.0; self.q];
        for mu in 0..self.k() {
            for (i, ai) in a.iter_mut().enumerate() {
                *ai += self.lengths[mu] * self.get(mu, i);
            }
        }
        a
    }

    /// `Ent(ρ) = Σ_μ len_μ H(ρ_μ)`, in `[0, log q]`.
    pub fn entropy(&self) -> f64 {
        (0..self.k())
            .map(|mu| self.lengths[mu] * math::shannon(self.row(mu)))
            .sum()
    }

    /// `Σ_μ len_μ Σ_i |ρ_{μi} − ρ′_{μi}|`.
    pub fn d1(&self, other: &Self) -> Result<f64> {
        ensure_dim(self.q, other.q)?;
        ensure_dim(self.k(), other.k())?;
        let mut acc = 0.0;
        for mu in 0..self.k() {
            let row: f64 = self
                .row(mu)
                .iter()
                .zip(other.row(mu))
                .map(|(a, b)| (a - b).abs())
                .sum();
            acc += self.lengths[mu] * row;
        }
        Ok(acc)
    }
}

/// `W/ρ`: `α_i = Σ_μ len_μ ρ_{μi}`, `β_ij = Σ_{μν} len_μ len_ν ρ_{μi} ρ_{νj} W_{μν}`.
pub fn fractional_quotient(w: &StepGraphon, rho: &StepFractionalPartition) -> Result<Quotient> {
    ensure_dim(w.k(), rho.k())?;
    if w
        .lengths()
        .iter()
        .zip(rho.lengths())
        .any(|(a, b)| (a - b).abs() > ROW_TOL)
    {
        return invalid("partition steps do not match the graphon steps");
    }
    let (k, q) = (w.k(), rho.q());
    let l = w.lengths();
    // m[ν][i] = len_ν ρ_{νi}
    let m: Vec<f64> = (0..k * q).map(|x| l[x / q] * rho.weights()[x]).collect();
    let mut alpha = vec![0.0; q];
    for nu in 0..k {
        for i in 0..q {
            alpha[i] += m[nu * q + i];
        }
    }
    // t[μ][j] = Σ_ν W_{μν} m[ν][j]
    let mut t = vec![0.0; k * q];
    for mu in 0..k {
        for nu in 0..k {
            let v = w.value(mu, nu);
            if v != 0.0 {
                for j in 0..q {
                    t[mu * q + j] += v * m[nu * q + j];
                }
            }
        }
    }
    let mut beta = vec![0.0; q * q];
    for mu in 0..k {
        for i in 0..q {
            let a = m[mu * q + i];
            if a != 0.0 {
                for j in 0..q {
                    beta[i * q + j] += a * t[mu * q + j];
                }
            }
        }
    }
    for i in 0..q {
        for j in i + 1..q {
            let s = 0.5 * (beta[i * q + j] + beta[j * q + i]);
            beta[i * q + j] = s;
            beta[j * q + i] = s;
        }
    }
    Ok(Quotient::from_parts_unchecked(alpha, beta))
}

/// `Ent(ρ)` as a free function.
pub fn entropy(rho: &StepFractionalPartition) -> f64 {
    rho.entropy()
}

/// How a [`QuotientSet`] was generated.
#[derive(Debug, Clone, PartialEq)]
pub struct NetMeta {
    pub q: usize,
    /// Per-row simplex mesh in grid mode.
    pub mesh: Option<f64>,
    /// Random partitions drawn in sampling mode.
    pub samples: usize,
    pub seed: u64,
    /// Certified `d₁` covering radius of `Ŝ_q(W)` by the points, when known.
    pub radius: Option<f64>,
    /// `‖W‖_∞` used in the radius bound.
    pub sup_norm: f64,
}

/// Finite subset of the quotient set `Ŝ_q(W)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientSet {
    pub points: Vec<Quotient>,
    pub meta: NetMeta,
}

impl QuotientSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `max(sup_a inf_b d₁, sup_b inf_a d₁)`.
pub fn hausdorff(a: &[Quotient], b: &[Quotient]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return invalid("hausdorff distance needs nonempty sets");
    }
    Ok(directed_hausdorff(a, b)?.max(directed_hausdorff(b, a)?))
}

/// `sup_{x∈a} inf_{y∈b} d₁(x, y)`.
pub fn directed_hausdorff(a: &[Quotient], b: &[Quotient]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return invalid("hausdorff distance needs nonempty sets");
    }
    let mut worst: f64 = 0.0;
    for x in a {
        let mut best = f64::INFINITY;
        for y in b {
            best = best.min(x.d1(y)?);
            if best <= worst {
                break;
            }
        }
        worst = worst.max(best);
    }
    Ok(worst)
}

/// Number of points in the per-row simplex grid with `parts` divisions.
pub fn grid_size(k: usize, q: usize, parts: usize) -> u128 {
    let per_row = math::compositions_count(parts, q);
    let mut total: u128 = 1;
    for _ in 0..k {
        total = total.saturating_mul(per_row);
    }
    total
}

/// Calls `f` with every partition whose rows lie on the simplex grid with
/// `parts` divisions; rows vary in odometer order.
pub fn for_each_grid_partition(
    lengths: &[f64],
    q: usize,
    parts: usize,
    limit: u128,
    mut f: impl FnMut(&StepFractionalPartition),
) -> Result<()> {
    let k = lengths.len();
    if q == 0 || parts == 0 {
        return invalid("grid needs q >= 1 and at least one division");
    }
    let needed = grid_size(k, q, parts);
    if needed > limit {
        return Err(Error::Budget { needed, budget: limit });
    }
    let mut rows: Vec<Vec<f64>> = Vec::new();
    math::for_each_composition(parts, q, |c| {
        rows.push(c.iter().map(|&x| x as f64 / parts as f64).collect());
    });
    let mut rho = StepFractionalPartition::uniform(lengths.to_vec(), q)?;
    math::for_each_map(k, rows.len(), |idx| {
        for (mu, &r) in idx.iter().enumerate() {
            rho.weights[mu * q..(mu + 1) * q].copy_from_slice(&rows[r]);
        }
        f(&rho);
    });
    Ok(())
}

/// Finite approximation of `Ŝ_q(W)`.
///
/// With `mesh > 0` every row runs over the simplex grid with `⌈1/mesh⌉`
/// divisions and the covering radius `2(1 + 2‖W‖_∞)·q·mesh` is recorded.
/// Otherwise `samples` random partitions are drawn (all hard partitions
/// first when there are at most `samples` of them) and no radius is claimed.
/// Points are deduplicated on 12-digit keys and kept in key order.
pub fn sample_quotient_set(
    w: &StepGraphon,
    q: usize,
    mesh: f64,
    samples: usize,
    seed: u64,
) -> Result<QuotientSet> {
    if q == 0 {
        return invalid("q must be positive");
    }
    let sup = w.sup_norm();
    let mut seen: BTreeMap<Vec<i64>, Quotient> = BTreeMap::new();
    let mut insert = |quo: Quotient| {
        seen.entry(quo.dedup_key()).or_insert(quo);
    };
    let meta;
    if mesh > 0.0 && mesh.is_finite() {
        let parts = math::ceil(1.0 / mesh) as usize;
        let mut err = None;
        for_each_grid_partition(w.lengths(), q, parts, GRID_POINT_LIMIT, |rho| {
            match fractional_quotient(w, rho) {
                Ok(x) => insert(x),
                Err(e) => err = Some(e),
            }
        })?;
        if let Some(e) = err {
            return Err(e);
        }
        meta = NetMeta {
            q,
            mesh: Some(mesh),
            samples: 0,
            seed,
            radius: Some(2.0 * (1.0 + 2.0 * sup) * q as f64 * mesh),
            sup_norm: sup,
        };
    } else if samples > 0 {
        let k = w.k();
        let lengths = w.lengths().to_vec();
        if math::pow_saturating(q, k) <= samples as u128 {
            let mut err = None;
            math::for_each_map(k, q, |a| {
                match StepFractionalPartition::hard(lengths.clone(), a, q)
                    .and_then(|rho| fractional_quotient(w, &rho))
                {
                    Ok(x) => insert(x),
                    Err(e) => err = Some(e),
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
        }
        for s in 0..samples {
            let mut g = rng::stream(seed, s as u64);
            // rows are pulled toward a shared centre so that α spreads over the
            // whole simplex instead of concentrating as k grows
            let centre = rng::simplex_point(&mut g, q);
            let pull = rng::unit(&mut g);
            let mut weights = Vec::with_capacity(k * q);
            for _ in 0..k {
                let row = if rng::bernoulli(&mut g, 0.5) {
                    let mut row = vec![0.0; q];
                    row[rng::index(&mut g, q)] = 1.0;
                    row
                } else {
                    rng::simplex_point(&mut g, q)
                };
                weights.extend(row.iter().zip(&centre).map(|(r, c)| pull * c + (1.0 - pull) * r));
            }
            let rho = StepFractionalPartition::new(lengths.clone(), weights, q)?;
            insert(fractional_quotient(w, &rho)?);
        }
        meta = NetMeta {
            q,
            mesh: None,
            samples,
            seed,
            radius: None,
            sup_norm: sup,
        };
    } else {
        return invalid("need mesh > 0 or samples > 0");
    }
    Ok(QuotientSet {
        points: seen.into_values().collect(),
        meta,
    })
}
