//! Step graphons: norms, the cut norm, averaging and common refinements.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{ensure_dim, invalid, Error, Result};
use crate::graph::WeightedGraph;
use crate::math;
use crate::rng;

/// Boundaries closer than this are merged when refining two step partitions.
pub const SNAP_TOL: f64 = 1e-12;

/// Hard ceiling on the number of steps for exhaustive cut-norm enumeration.
pub const CUT_EXACT_HARD_LIMIT: usize = 30;

/// A symmetric step function on `[0,1]²`: consecutive intervals of the given
/// lengths and a row-major `k × k` value matrix.
///
/// Zero-length steps are allowed (they come from zero-weight vertices) and
/// carry no mass.
#[derive(Debug, Clone, PartialEq)]
pub struct StepGraphon {
    lengths: Vec<f64>,
    values: Vec<f64>,
}

impl StepGraphon {
    pub fn new(lengths: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let k = lengths.len();
        if k == 0 {
            return invalid("graphon needs at least one step");
        }
        ensure_dim(k * k, values.len())?;
        if lengths.iter().any(|&l| !l.is_finite() || l < 0.0) {
            return invalid("step lengths must be finite and nonnegative");
        }
        let s: f64 = lengths.iter().sum();
        if (s - 1.0).abs() > SNAP_TOL {
            return invalid(format!("step lengths must sum to 1, sum to {s}"));
        }
        for a in 0..k {
            for b in 0..k {
                let v = values[a * k + b];
                if !v.is_finite() {
                    return invalid(format!("value ({a},{b}) is not finite"));
                }
                if v != values[b * k + a] {
                    return invalid(format!("values not symmetric at ({a},{b})"));
                }
            }
        }
        Ok(Self { lengths, values })
    }

    pub fn constant(c: f64) -> Self {
        Self {
            lengths: vec![1.0],
            values: vec![c],
        }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    /// `k` equal steps with the given values.
    pub fn uniform_steps(values: Vec<f64>) -> Result<Self> {
        let k = math::sqrt(values.len() as f64) as usize;
        ensure_dim(k * k, values.len())?;
        Self::new(vec![1.0 / k as f64; k], values)
    }

    /// `W^G`: step `x` has length `α_x / α_G` and the values are the edge
    /// weights.
    pub fn embed(g: &WeightedGraph) -> Self {
        let total = g.total_weight();
        Self {
            lengths: g.vertex_weights().iter().map(|&a| a / total).collect(),
            values: g.edge_matrix().to_vec(),
        }
    }

    /// `W^G / ‖G‖_1`, or the zero graphon on the same steps when `‖G‖_1 = 0`.
    pub fn normalize(g: &WeightedGraph) -> Self {
        let d = g.density();
        let w = Self::embed(g);
        if d == 0.0 {
            w.scale(0.0)
        } else {
            w.scale(1.0 / d)
        }
    }

    pub fn k(&self) -> usize {
        self.lengths.len()
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn value(&self, a: usize, b: usize) -> f64 {
        self.values[a * self.k() + b]
    }

    /// Cumulative step boundaries `0 = c_0 ≤ … ≤ c_k`.
    pub fn boundaries(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.k() + 1);
        let mut acc = 0.0;
        out.push(0.0);
        for &l in &self.lengths {
            acc += l;
            out.push(acc);
        }
        out
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            lengths: self.lengths.clone(),
            values: self.values.iter().map(|&v| c * v).collect(),
        }
    }

    /// `∫W`.
    pub fn integral(&self) -> f64 {
        let k = self.k();
        let mut acc = 0.0;
        for a in 0..k {
            for b in 0..k {
                acc += self.lengths[a] * self.lengths[b] * self.value(a, b);
            }
        }
        acc
    }

    /// `‖W‖_p`; `p = f64::INFINITY` gives the essential sup (max over cells
    /// of positive measure).
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if p.is_nan() || p < 1.0 {
            return invalid(format!("norm order must be >= 1, got {p}"));
        }
        let k = self.k();
        if p == f64::INFINITY {
            return Ok(self.sup_norm());
        }
        let mut acc = 0.0;
        for a in 0..k {
            for b in 0..k {
                let v = self.value(a, b).abs();
                if v != 0.0 {
                    let m = self.lengths[a] * self.lengths[b];
                    acc += m * if p == 1.0 { v } else { math::powf(v, p) };
                }
            }
        }
        Ok(if p == 1.0 { acc } else { math::powf(acc, 1.0 / p) })
    }

    /// `‖W‖_∞` over cells of positive measure.
    pub fn sup_norm(&self) -> f64 {
        let k = self.k();
        let mut best: f64 = 0.0;
        for a in 0..k {
            if self.lengths[a] == 0.0 {
                continue;
            }
            for b in 0..k {
                if self.lengths[b] > 0.0 {
                    best = best.max(self.value(a, b).abs());
                }
            }
        }
        best
    }

    /// `∫ W(x, y) dy` on step `a`.
    pub fn degree(&self, a: usize) -> f64 {
        (0..self.k()).map(|b| self.lengths[b] * self.value(a, b)).sum()
    }

    /// Reorders the intervals: step `i` of the result is step `order[i]` of
    /// `self`. Any reordering is a measure-preserving bijection of `[0,1]`.
    pub fn permute_steps(&self, order: &[usize]) -> Result<Self> {
        let k = self.k();
        ensure_dim(k, order.len())?;
        let mut seen = vec![false; k];
        for &o in order {
            if o >= k || seen[o] {
                return invalid("step order must be a permutation");
            }
            seen[o] = true;
        }
        let lengths = order.iter().map(|&o| self.lengths[o]).collect();
        let mut values = vec![0.0; k * k];
        for i in 0..k {
            for j in 0..k {
                values[i * k + j] = self.value(order[i], order[j]);
            }
        }
        Ok(Self { lengths, values })
    }

    /// Difference `self − other` for graphons on identical steps.
    pub fn sub_same_steps(&self, other: &Self) -> Result<Self> {
        ensure_dim(self.k(), other.k())?;
        if self
            .lengths
            .iter()
            .zip(&other.lengths)
            .any(|(a, b)| (a - b).abs() > SNAP_TOL)
        {
            return invalid("graphons do not share steps; refine them first");
        }
        Ok(Self {
            lengths: self.lengths.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Same function on a finer step structure: cell `i` has length
    /// `lengths[i]` and lies inside step `parent[i]`.
    pub fn refine(&self, lengths: &[f64], parent: &[usize]) -> Result<Self> {
        ensure_dim(lengths.len(), parent.len())?;
        let m = lengths.len();
        let mut values = vec![0.0; m * m];
        for a in 0..m {
            for b in 0..m {
                values[a * m + b] = self.value(parent[a], parent[b]);
            }
        }
        Self::new(lengths.to_vec(), values)
    }

    /// Drops zero-length steps.
    pub fn without_empty_steps(&self) -> Self {
        let keep: Vec<usize> = (0..self.k()).filter(|&a| self.lengths[a] > 0.0).collect();
        if keep.len() == self.k() {
            return self.clone();
        }
        let m = keep.len();
        let mut values = vec![0.0; m * m];
        for (i, &a) in keep.iter().enumerate() {
            for (j, &b) in keep.iter().enumerate() {
                values[i * m + j] = self.value(a, b);
            }
        }
        Self {
            lengths: keep.iter().map(|&a| self.lengths[a]).collect(),
            values,
        }
    }

    /// `W_P`: values replaced by length-weighted averages over the blocks of
    /// a grouping of the steps. The step structure is unchanged; blocks of
    /// zero measure get value zero.
    pub fn average(&self, groups: &[Vec<usize>]) -> Result<Self> {
        let k = self.k();
        let mut group_of = vec![usize::MAX; k];
        for (g, members) in groups.iter().enumerate() {
            for &a in members {
                if a >= k {
                    return invalid(format!("step {a} out of range"));
                }
                if group_of[a] != usize::MAX {
                    return invalid(format!("step {a} appears in two groups"));
                }
                group_of[a] = g;
            }
        }
        if group_of.contains(&usize::MAX) {
            return invalid("groups do not cover every step");
        }
        let m = groups.len();
        let mass: Vec<f64> = groups
            .iter()
            .map(|g| g.iter().map(|&a| self.lengths[a]).sum())
            .collect();
        let mut sums = vec![0.0; m * m];
        for a in 0..k {
            for b in 0..k {
                sums[group_of[a] * m + group_of[b]] +=
                    self.lengths[a] * self.lengths[b] * self.value(a, b);
            }
        }
        let mut values = vec![0.0; k * k];
        for a in 0..k {
            for b in 0..k {
                let (g, h) = (group_of[a], group_of[b]);
                let (lo, hi) = if g <= h { (g, h) } else { (h, g) };
                let w = mass[lo] * mass[hi];
                values[a * k + b] = if w > 0.0 { sums[lo * m + hi] / w } else { 0.0 };
            }
        }
        Ok(Self {
            lengths: self.lengths.clone(),
            values,
        })
    }

    /// Exact cut norm `sup_{S,T} |∫_{S×T} W|` by enumerating every union of
    /// steps `S` (Gray-code order) and taking the optimal `T` for each.
    ///
    /// Cost is `O(2^k · k)` over the positive-length steps; fails with
    /// [`Error::Budget`] when that count exceeds `kmax` (or 30).
    pub fn cut_norm_exact(&self, kmax: usize) -> Result<f64> {
        Ok(self.cut_norm_exact_witness(kmax)?.value)
    }

    /// [`StepGraphon::cut_norm_exact`] together with an optimal `(S, T)`.
    pub fn cut_norm_exact_witness(&self, kmax: usize) -> Result<CutWitness> {
        let active: Vec<usize> = (0..self.k()).filter(|&a| self.lengths[a] > 0.0).collect();
        let k = active.len();
        let limit = kmax.min(CUT_EXACT_HARD_LIMIT);
        if k > limit {
            return Err(Error::Budget {
                needed: k as u128,
                budget: limit as u128,
            });
        }
        // rows[μ][ν] = l_μ l_ν W_μν on active steps
        let mut rows = vec![0.0; k * k];
        for (i, &a) in active.iter().enumerate() {
            for (j, &b) in active.iter().enumerate() {
                rows[i * k + j] = self.lengths[a] * self.lengths[b] * self.value(a, b);
            }
        }
        let mut col = vec![0.0; k];
        let mut mask: u64 = 0;
        let mut best = (0.0f64, 0u64, 1.0f64);
        let total: u64 = 1u64 << k;
        for step in 1..total {
            let bit = step.trailing_zeros() as usize;
            mask ^= 1 << bit;
            if step % 4096 == 0 {
                col.iter_mut().for_each(|c| *c = 0.0);
                for i in (0..k).filter(|&i| mask >> i & 1 == 1) {
                    for j in 0..k {
                        col[j] += rows[i * k + j];
                    }
                }
            } else {
                let sign = if mask >> bit & 1 == 1 { 1.0 } else { -1.0 };
                for j in 0..k {
                    col[j] += sign * rows[bit * k + j];
                }
            }
            let (mut pos, mut neg) = (0.0, 0.0);
            for &c in &col {
                if c > 0.0 {
                    pos += c;
                } else {
                    neg -= c;
                }
            }
            if pos > best.0 {
                best = (pos, mask, 1.0);
            }
            if neg > best.0 {
                best = (neg, mask, -1.0);
            }
        }
        let (value, mask, sign) = best;
        let mut s = vec![false; self.k()];
        let mut t = vec![false; self.k()];
        let mut colsum = vec![0.0; k];
        for (i, &a) in active.iter().enumerate() {
            if mask >> i & 1 == 1 {
                s[a] = true;
                for j in 0..k {
                    colsum[j] += rows[i * k + j];
                }
            }
        }
        for (j, &b) in active.iter().enumerate() {
            t[b] = sign * colsum[j] > 0.0;
        }
        Ok(CutWitness {
            value,
            sign,
            s,
            t,
        })
    }

    /// Lower bound on the cut norm by alternating maximization over step
    /// unions `(S, T)` from `restarts` random starts (plus two deterministic
    /// ones). Deterministic given `seed`; restart `r` draws from stream `r`.
    pub fn cut_norm_lower(&self, restarts: usize, seed: u64) -> f64 {
        self.cut_norm_lower_witness(restarts, seed).value
    }

    /// [`StepGraphon::cut_norm_lower`] together with the best `(S, T)` found.
    pub fn cut_norm_lower_witness(&self, restarts: usize, seed: u64) -> CutWitness {
        let k = self.k();
        let mut best = CutWitness {
            value: 0.0,
            sign: 1.0,
            s: vec![false; k],
            t: vec![false; k],
        };
        let mut starts: Vec<Vec<bool>> = Vec::with_capacity(restarts + 2);
        starts.push(vec![true; k]);
        starts.push((0..k).map(|a| self.degree(a) > 0.0).collect());
        for r in 0..restarts {
            let mut g = rng::stream(seed, r as u64);
            starts.push((0..k).map(|_| rng::unit(&mut g) < 0.5).collect());
        }
        for start in starts {
            for sign in [1.0, -1.0] {
                let w = self.alternate(start.clone(), sign);
                if w.value > best.value {
                    best = w;
                }
            }
        }
        best
    }

    /// `acc[b] = Σ_{a ∈ set} l_a W(a, b)`.
    fn accumulate_rows(&self, set: &[bool], acc: &mut [f64]) {
        let k = self.k();
        acc.iter_mut().for_each(|c| *c = 0.0);
        for a in (0..k).filter(|&a| set[a]) {
            let la = self.lengths[a];
            let row = &self.values[a * k..(a + 1) * k];
            for (c, &v) in acc.iter_mut().zip(row) {
                *c += la * v;
            }
        }
    }

    fn alternate(&self, mut s: Vec<bool>, sign: f64) -> CutWitness {
        let k = self.k();
        let l = &self.lengths;
        let mut t = vec![false; k];
        let mut value = f64::NEG_INFINITY;
        let mut acc = vec![0.0; k];
        for _ in 0..200 {
            // best T for S
            self.accumulate_rows(&s, &mut acc);
            for b in 0..k {
                t[b] = sign * acc[b] * l[b] > 0.0;
            }
            // symmetry: column sums over T are row sums over T
            self.accumulate_rows(&t, &mut acc);
            let mut v = 0.0;
            for a in 0..k {
                let c = sign * acc[a] * l[a];
                s[a] = c > 0.0;
                if s[a] {
                    v += c;
                }
            }
            if v <= value + 1e-15 * v.abs().max(1e-300) {
                break;
            }
            value = v;
        }
        // recompute T for the final S so the witness is consistent
        self.accumulate_rows(&s, &mut acc);
        let mut v = 0.0;
        for b in 0..k {
            let c = sign * acc[b] * l[b];
            t[b] = c > 0.0;
            if t[b] {
                v += c;
            }
        }
        CutWitness {
            value: v.max(0.0),
            sign,
            s,
            t,
        }
    }

    /// Certified upper bound on the cut norm: exact when the positive-length
    /// steps number at most `kmax`; otherwise the steps are sorted by degree,
    /// merged into `kmax` consecutive groups `P`, and the bound
    /// `‖W_P‖_□ + ‖W − W_P‖_1` is returned.
    pub fn cut_norm_upper(&self, kmax: usize) -> f64 {
        let reduced = self.without_empty_steps();
        let kmax = kmax.clamp(1, CUT_EXACT_HARD_LIMIT);
        if let Ok(v) = reduced.cut_norm_exact(kmax) {
            return v;
        }
        let k = reduced.k();
        let mut order: Vec<usize> = (0..k).collect();
        let deg: Vec<f64> = (0..k).map(|a| reduced.degree(a)).collect();
        order.sort_by(|&a, &b| deg[b].total_cmp(&deg[a]).then(a.cmp(&b)));
        let groups: Vec<Vec<usize>> = (0..kmax)
            .map(|g| order[g * k / kmax..(g + 1) * k / kmax].to_vec())
            .filter(|g| !g.is_empty())
            .collect();
        let avg = reduced.average(&groups).expect("groups partition the steps");
        let residual = reduced
            .sub_same_steps(&avg)
            .expect("same steps")
            .lp_norm(1.0)
            .expect("p = 1");
        let coarse = compress_groups(&avg, &groups)
            .cut_norm_exact(kmax)
            .expect("at most kmax groups");
        (coarse + residual).min(reduced.lp_norm(1.0).expect("p = 1"))
    }

    /// `∫|W| 1[|W| ≥ K(ε)] ≤ ε` at every listed `(ε, K(ε))`. Reports the first
    /// violated pair and the worst excess.
    pub fn tails_check(&self, table: &[(f64, f64)]) -> Result<TailReport> {
        if table.is_empty() {
            return invalid("tail table must be nonempty");
        }
        if table.iter().any(|&(e, kk)| !(e > 0.0) || !(kk > 0.0)) {
            return invalid("tail table needs eps > 0 and K(eps) > 0");
        }
        let k = self.k();
        let mut first_violation = None;
        let mut worst: Option<(f64, f64)> = None;
        for &(eps, threshold) in table {
            let mut tail = 0.0;
            for a in 0..k {
                for b in 0..k {
                    let v = self.value(a, b).abs();
                    if v >= threshold {
                        tail += self.lengths[a] * self.lengths[b] * v;
                    }
                }
            }
            let excess = tail - eps;
            if excess > 0.0 && first_violation.is_none() {
                first_violation = Some((eps, tail));
            }
            if worst.is_none_or(|(_, e)| excess > e) {
                worst = Some((eps, excess));
            }
        }
        let (worst_eps, worst_excess) = worst.expect("table is nonempty");
        Ok(TailReport {
            pass: first_violation.is_none(),
            first_violation,
            worst_eps,
            worst_excess,
        })
    }
}

/// One step per group; values are the (constant) block values of `avg`.
pub(crate) fn compress_groups(avg: &StepGraphon, groups: &[Vec<usize>]) -> StepGraphon {
    let m = groups.len();
    let lengths: Vec<f64> = groups
        .iter()
        .map(|g| g.iter().map(|&a| avg.lengths[a]).sum())
        .collect();
    let mut values = vec![0.0; m * m];
    for g in 0..m {
        for h in 0..m {
            values[g * m + h] = avg.value(groups[g][0], groups[h][0]);
        }
    }
    StepGraphon { lengths, values }
}

/// Optimal or best-found `(S, T)` pair for the cut norm. `sign` is `+1` when
/// the integral over `S × T` is positive, `-1` when it is negative.
#[derive(Debug, Clone, PartialEq)]
pub struct CutWitness {
    pub value: f64,
    pub sign: f64,
    pub s: Vec<bool>,
    pub t: Vec<bool>,
}

/// Result of [`StepGraphon::tails_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct TailReport {
    pub pass: bool,
    /// `(ε, ∫|W| 1[|W| ≥ K(ε)])` for the first violated grid point.
    pub first_violation: Option<(f64, f64)>,
    pub worst_eps: f64,
    pub worst_excess: f64,
}

/// Default ε grid for tail checks.
pub const DEFAULT_TAIL_GRID: [f64; 4] = [0.5, 0.1, 0.05, 0.01];

/// Common refinement of two step partitions of `[0,1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Overlay {
    pub lengths: Vec<f64>,
    /// Step of the first graphon containing each cell.
    pub left: Vec<usize>,
    /// Step of the second graphon containing each cell.
    pub right: Vec<usize>,
}

/// Sorted union of both boundary sets (boundaries within [`SNAP_TOL`] merged).
pub fn common_refinement(u: &StepGraphon, w: &StepGraphon) -> Overlay {
    let bu = u.boundaries();
    let bw = w.boundaries();
    let (mut i, mut j) = (1usize, 1usize);
    let mut prev = 0.0;
    let mut out = Overlay {
        lengths: Vec::new(),
        left: Vec::new(),
        right: Vec::new(),
    };
    while i < bu.len() && j < bw.len() {
        let (a, b) = (bu[i], bw[j]);
        let next = if (a - b).abs() <= SNAP_TOL { a.max(b) } else { a.min(b) };
        let len = next - prev;
        if len > SNAP_TOL {
            out.lengths.push(len);
            out.left.push(i - 1);
            out.right.push(j - 1);
            prev = next;
        }
        if (a - b).abs() <= SNAP_TOL {
            i += 1;
            j += 1;
        } else if a < b {
            i += 1;
        } else {
            j += 1;
        }
    }
    if out.lengths.is_empty() {
        // both graphons carry all mass in a single cell
        out.lengths.push(1.0);
        out.left.push(first_positive(u));
        out.right.push(first_positive(w));
    }
    let s: f64 = out.lengths.iter().sum();
    out.lengths.iter_mut().for_each(|l| *l /= s);
    out
}

fn first_positive(w: &StepGraphon) -> usize {
    (0..w.k()).find(|&a| w.lengths[a] > 0.0).unwrap_or(0)
}

/// Both graphons expressed on their common refinement.
pub fn overlay(u: &StepGraphon, w: &StepGraphon) -> (StepGraphon, StepGraphon) {
    let o = common_refinement(u, w);
    let ur = u.refine(&o.lengths, &o.left).expect("refinement is valid");
    let wr = w.refine(&o.lengths, &o.right).expect("refinement is valid");
    (ur, wr)
}

/// `U − W` on the common refinement.
pub fn difference(u: &StepGraphon, w: &StepGraphon) -> StepGraphon {
    let (a, b) = overlay(u, w);
    a.sub_same_steps(&b).expect("same steps")
}
