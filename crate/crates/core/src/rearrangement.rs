//! Value distributions, monotone rearrangement on `‖x‖_∞` annuli, top-level
//! sets and the quasi-inner product bracket.

use alloc::vec;
use alloc::vec::Vec;

use crate::distance::{equal_grid, factorial_at_most, next_permutation, DistanceBound};
use crate::error::{invalid, Result};
use crate::graphon::{overlay, StepGraphon};
use crate::math;
use crate::rng;

const MASS_TOL: f64 = 1e-12;

/// Sorted `(value, mass)` pairs of a step graphon's level sets.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueDistribution {
    points: Vec<(f64, f64)>,
}

impl ValueDistribution {
    /// Masses positive, values strictly increasing, total mass 1.
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return invalid("distribution needs at least one atom");
        }
        if points.iter().any(|&(v, m)| !v.is_finite() || !(m > 0.0)) {
            return invalid("atoms need finite values and positive masses");
        }
        if points.windows(2).any(|p| p[0].0 >= p[1].0) {
            return invalid("values must be strictly increasing");
        }
        let total: f64 = points.iter().map(|p| p.1).sum();
        if (total - 1.0).abs() > MASS_TOL {
            return invalid("masses must sum to 1");
        }
        Ok(Self { points })
    }

    /// Level sets of `w`; values within `tol` of the previous atom's smallest
    /// value are merged into it (`tol = 0` merges only equal values).
    pub fn of(w: &StepGraphon, tol: f64) -> Self {
        let l = w.lengths();
        let mut cells: Vec<(f64, f64)> = Vec::new();
        for a in 0..w.k() {
            for b in 0..w.k() {
                let m = l[a] * l[b];
                if m > 0.0 {
                    cells.push((w.value(a, b), m));
                }
            }
        }
        cells.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut points: Vec<(f64, f64)> = Vec::new();
        let mut anchor = f64::NEG_INFINITY;
        for (v, m) in cells {
            match points.last_mut() {
                Some(last) if v - anchor <= tol => last.1 += m,
                _ => {
                    anchor = v;
                    points.push((v, m));
                }
            }
        }
        let total: f64 = points.iter().map(|p| p.1).sum();
        points.iter_mut().for_each(|p| p.1 /= total);
        Self { points }
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// `Pr[W > t]`.
    pub fn tail(&self, t: f64) -> f64 {
        self.points.iter().filter(|p| p.0 > t).map(|p| p.1).sum()
    }

    /// Atoms in decreasing value order with cumulative mass from the top.
    fn descending(&self) -> Vec<(f64, f64)> {
        let mut cum = 0.0;
        let mut out: Vec<(f64, f64)> = self
            .points
            .iter()
            .rev()
            .map(|&(v, m)| {
                cum += m;
                (v, cum)
            })
            .collect();
        if let Some(last) = out.last_mut() {
            last.1 = 1.0;
        }
        out
    }
}

/// `W*(x) = sup{t : Pr[W > t] > ‖x‖_∞²}` stored by annulus: `values[k]` on
/// `radii[k-1] ≤ ‖x‖_∞ < radii[k]` (with `radii[-1] = 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct Rearrangement {
    radii: Vec<f64>,
    values: Vec<f64>,
    distribution: ValueDistribution,
}

impl Rearrangement {
    pub fn of(w: &StepGraphon) -> Self {
        let distribution = ValueDistribution::of(w, 0.0);
        let desc = distribution.descending();
        Self {
            radii: desc.iter().map(|p| math::sqrt(p.1)).collect(),
            values: desc.iter().map(|p| p.0).collect(),
            distribution,
        }
    }

    /// Outer radius of each annulus; the last is 1.
    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// Annulus values, strictly decreasing outward.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn distribution(&self) -> &ValueDistribution {
        &self.distribution
    }

    pub fn value_at(&self, x1: f64, x2: f64) -> f64 {
        let r = x1.max(x2);
        let k = self.radii.iter().position(|&b| r < b).unwrap_or(self.radii.len() - 1);
        self.values[k]
    }

    /// One step per annulus, `value(a, b) = values[max(a, b)]`.
    pub fn to_step_graphon(&self) -> StepGraphon {
        let k = self.radii.len();
        let mut lengths = Vec::with_capacity(k);
        let mut prev = 0.0;
        for &r in &self.radii {
            lengths.push(r - prev);
            prev = r;
        }
        let mut values = vec![0.0; k * k];
        for a in 0..k {
            for b in 0..k {
                values[a * k + b] = self.values[a.max(b)];
            }
        }
        StepGraphon::new(lengths, values).expect("annuli form a valid step graphon")
    }
}

/// `W*` expanded to a step graphon with one step per distinct value.
pub fn monotone_rearrangement(w: &StepGraphon) -> StepGraphon {
    Rearrangement::of(w).to_step_graphon()
}

/// `E[W*Y*] = ∫_0^1 Q_W(s) Q_Y(s) ds` with `Q` the decreasing quantile
/// functions, since `‖x‖_∞²` is uniform on `[0,1]`.
pub fn rearranged_inner_product(w: &StepGraphon, y: &StepGraphon) -> f64 {
    let a = ValueDistribution::of(w, 0.0).descending();
    let b = ValueDistribution::of(y, 0.0).descending();
    let (mut i, mut j) = (0, 0);
    let mut prev = 0.0;
    let mut acc = 0.0;
    while i < a.len() && j < b.len() {
        let next = a[i].1.min(b[j].1);
        acc += (next - prev) * a[i].0 * b[j].0;
        prev = next;
        if a[i].1 <= next {
            i += 1;
        }
        if b[j].1 <= next {
            j += 1;
        }
    }
    acc
}

/// `E[WY]` on the common refinement.
pub fn inner_product(w: &StepGraphon, y: &StepGraphon) -> f64 {
    let (a, b) = overlay(w, y);
    same_step_product(&a, &b)
}

fn same_step_product(a: &StepGraphon, b: &StepGraphon) -> f64 {
    let l = a.lengths();
    let k = a.k();
    let mut acc = 0.0;
    for i in 0..k {
        for j in 0..k {
            acc += l[i] * l[j] * a.value(i, j) * b.value(i, j);
        }
    }
    acc
}

/// Indicator of a set of measure `λ` between `{W > M}` and `{W ≥ M}` for the
/// level `M` where the tail mass reaches `λ`. Boundary-level cells are taken
/// in order of `(min(a,b), max(a,b))`; a partially taken cell is realized by
/// splitting its lower-index step in place, so the result may have one more step than
/// `w`.
pub fn top_lambda(w: &StepGraphon, lambda: f64) -> Result<StepGraphon> {
    if !(0.0..=1.0).contains(&lambda) {
        return invalid("lambda must lie in [0, 1]");
    }
    let k = w.k();
    let l = w.lengths();
    // symmetric cell classes: (value, a, b, mass) with a ≤ b
    let mut cells: Vec<(f64, usize, usize, f64)> = Vec::new();
    for a in 0..k {
        for b in a..k {
            let m = if a == b { l[a] * l[a] } else { 2.0 * l[a] * l[b] };
            if m > 0.0 {
                cells.push((w.value(a, b), a, b, m));
            }
        }
    }
    cells.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut take = vec![false; k * k];
    let mut rest = lambda;
    let mut partial: Option<(usize, usize, f64)> = None;
    for &(_, a, b, m) in &cells {
        if rest <= MASS_TOL {
            break;
        }
        if m <= rest + MASS_TOL {
            take[a * k + b] = true;
            take[b * k + a] = true;
            rest -= m;
        } else {
            partial = Some((a, b, rest / m));
            break;
        }
    }
    let Some((a, b, frac)) = partial else {
        let values = take.iter().map(|&t| if t { 1.0 } else { 0.0 }).collect();
        return StepGraphon::new(l.to_vec(), values);
    };
    // split step a into a head (index a) and a tail (index a + 1)
    let head = if a == b { math::sqrt(frac) * l[a] } else { frac * l[a] };
    let mut lengths = l.to_vec();
    lengths[a] = head;
    lengths.insert(a + 1, l[a] - head);
    let parent = |i: usize| if i <= a { i } else { i - 1 };
    let n = k + 1;
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let (pi, pj) = (parent(i), parent(j));
            let mut t = take[pi * k + pj];
            if (pi, pj) == (a, b) || (pi, pj) == (b, a) {
                // within the split cell only the head part is taken
                t = if a == b { i == a && j == a } else { (i == a && pj == b) || (j == a && pi == b) };
            }
            values[i * n + j] = if t { 1.0 } else { 0.0 };
        }
    }
    StepGraphon::new(lengths, values)
}

/// No two positive-measure cells of the common refinement are ordered
/// oppositely by `u` and `w` (beyond `tol`).
pub fn is_aligned(u: &StepGraphon, w: &StepGraphon, tol: f64) -> bool {
    let (a, b) = overlay(u, w);
    let l = a.lengths();
    let k = a.k();
    let mut cells: Vec<(f64, f64)> = Vec::new();
    for i in 0..k {
        for j in 0..k {
            if l[i] * l[j] > 0.0 {
                cells.push((a.value(i, j), b.value(i, j)));
            }
        }
    }
    cells.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    let mut below = f64::NEG_INFINITY;
    let mut idx = 0;
    while idx < cells.len() {
        let level = cells[idx].0;
        let mut end = idx;
        while end < cells.len() && cells[end].0 - level <= tol {
            end += 1;
        }
        let (lo, hi) = (cells[idx].1, cells[end - 1].1);
        if lo < below - tol {
            return false;
        }
        below = below.max(hi);
        idx = end;
    }
    true
}

/// Distributions agree atom by atom after merging values within `tol`.
pub fn same_distribution_check(u: &StepGraphon, w: &StepGraphon, tol: f64) -> bool {
    let a = ValueDistribution::of(u, tol);
    let b = ValueDistribution::of(w, tol);
    a.points.len() == b.points.len()
        && a
            .points
            .iter()
            .zip(&b.points)
            .all(|(x, y)| (x.0 - y.0).abs() <= tol && (x.1 - y.1).abs() <= tol.max(MASS_TOL))
}

fn degree_order(w: &StepGraphon) -> Vec<usize> {
    let deg: Vec<f64> = (0..w.k()).map(|a| w.degree(a)).collect();
    let mut order: Vec<usize> = (0..w.k()).collect();
    order.sort_by(|&a, &b| deg[b].total_cmp(&deg[a]).then(a.cmp(&b)));
    order
}

/// `[max_φ E[W Y^φ], E[W*Y*]]` where `φ` ranges over step permutations of
/// `Y` (and of the common equal grid when both have equal steps): exhaustive
/// when `k! ≤ budget`, otherwise pair-swap ascent from the degree alignment
/// and seeded random starts.
pub fn quasi_inner_product_bounds(
    w: &StepGraphon,
    y: &StepGraphon,
    budget: usize,
    seed: u64,
) -> DistanceBound {
    let upper = rearranged_inner_product(w, y);
    let eval = |a: &StepGraphon, b: &StepGraphon, p: &[usize]| -> f64 {
        inner_product(a, &b.permute_steps(p).expect("permutation"))
    };
    let identity: Vec<usize> = (0..y.k()).collect();
    let mut best = eval(w, y, &identity);
    let sw = w.permute_steps(&degree_order(w)).expect("permutation");
    best = best.max(eval(&sw, y, &degree_order(y)));
    let done = |b: f64| upper - b <= 1e-12;
    let (base_w, base_y) = match equal_grid(w, y) {
        Some((gw, gy)) if gy.k() <= 64 => (gw, gy),
        _ => (w.clone(), y.clone()),
    };
    for (a, b) in [(w, y), (&base_w, &base_y)] {
        if !done(best) && factorial_at_most(b.k(), budget) {
            let mut p: Vec<usize> = (0..b.k()).collect();
            loop {
                best = best.max(eval(a, b, &p));
                if done(best) || !next_permutation(&mut p) {
                    break;
                }
            }
        }
    }
    let k = base_y.k();
    if !done(best) && k >= 2 && !factorial_at_most(k, budget) {
        let sw = base_w.permute_steps(&degree_order(&base_w)).expect("permutation");
        let mut starts = vec![degree_order(&base_y)];
        for r in 0..4u64 {
            let mut g = rng::stream(seed, r);
            let mut p: Vec<usize> = (0..k).collect();
            for i in (1..k).rev() {
                p.swap(i, rng::index(&mut g, i + 1));
            }
            starts.push(p);
        }
        let mut evals = 0usize;
        'starts: for mut p in starts {
            let mut cur = eval(&sw, &base_y, &p);
            let mut improved = true;
            while improved {
                improved = false;
                'scan: for i in 0..k {
                    for j in i + 1..k {
                        if evals >= budget {
                            best = best.max(cur);
                            break 'starts;
                        }
                        p.swap(i, j);
                        let v = eval(&sw, &base_y, &p);
                        evals += 1;
                        if v > cur + 1e-15 {
                            cur = v;
                            improved = true;
                            break 'scan;
                        }
                        p.swap(i, j);
                    }
                }
            }
            best = best.max(cur);
        }
    }
    DistanceBound::interval(best, upper)
}
