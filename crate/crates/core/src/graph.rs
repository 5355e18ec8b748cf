//! Weighted graphs, vertex partitions and graph quotients.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{ensure_dim, invalid, Error, Result};
use crate::math;

/// A weighted graph `G = (V, α, β)`: nonnegative vertex weights and a
/// symmetric real edge-weight matrix (row-major, self-loops allowed).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    weights: Vec<f64>,
    edges: Vec<f64>,
}

impl WeightedGraph {
    /// Builds a graph from vertex weights and a row-major `n × n` edge matrix.
    ///
    /// Rejects negative or non-finite weights, a nonpositive total weight and
    /// matrices that are not exactly symmetric.
    pub fn new(vertex_weights: Vec<f64>, edge_weights: Vec<f64>) -> Result<Self> {
        let n = vertex_weights.len();
        ensure_dim(n * n, edge_weights.len())?;
        if n == 0 {
            return invalid("graph must have at least one vertex");
        }
        for (x, &a) in vertex_weights.iter().enumerate() {
            if !a.is_finite() || a < 0.0 {
                return invalid(format!("vertex weight {a} at {x} must be finite and nonnegative"));
            }
        }
        let total: f64 = vertex_weights.iter().sum();
        if total <= 0.0 {
            return invalid("total vertex weight must be strictly positive");
        }
        for x in 0..n {
            for y in 0..n {
                let b = edge_weights[x * n + y];
                if !b.is_finite() {
                    return invalid(format!("edge weight ({x},{y}) is not finite"));
                }
                if b != edge_weights[y * n + x] {
                    return invalid(format!("edge weights not symmetric at ({x},{y})"));
                }
            }
        }
        Ok(Self {
            weights: vertex_weights,
            edges: edge_weights,
        })
    }

    /// Builds a graph from an edge list `(u, v, β_uv)`; absent pairs have
    /// weight zero and each pair is mirrored. A pair listed twice (in either
    /// orientation) is rejected.
    pub fn from_edges(vertex_weights: Vec<f64>, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let n = vertex_weights.len();
        let mut m = vec![0.0; n * n];
        let mut seen = vec![false; n * n];
        for &(u, v, b) in edges {
            if u >= n || v >= n {
                return invalid(format!("edge ({u},{v}) out of range for {n} vertices"));
            }
            if seen[u * n + v] {
                return invalid(format!("duplicate edge ({u},{v})"));
            }
            seen[u * n + v] = true;
            seen[v * n + u] = true;
            m[u * n + v] = b;
            m[v * n + u] = b;
        }
        Self::new(vertex_weights, m)
    }

    /// Simple graph: unit vertex weights, 0/1 edge weights, no loops.
    pub fn simple(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let list: Vec<_> = edges.iter().map(|&(u, v)| (u, v, 1.0)).collect();
        if edges.iter().any(|&(u, v)| u == v) {
            return invalid("simple graphs have no self-loops");
        }
        Self::from_edges(vec![1.0; n], &list)
    }

    /// Unit-weight graph on `n` vertices with no edges.
    pub fn edgeless(n: usize) -> Result<Self> {
        Self::new(vec![1.0; n], vec![0.0; n * n])
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn vertex_weights(&self) -> &[f64] {
        &self.weights
    }

    /// Row-major edge-weight matrix.
    pub fn edge_matrix(&self) -> &[f64] {
        &self.edges
    }

    #[inline]
    pub fn alpha(&self, x: usize) -> f64 {
        self.weights[x]
    }

    #[inline]
    pub fn beta(&self, x: usize, y: usize) -> f64 {
        self.edges[x * self.n() + y]
    }

    /// `α_G`, the total vertex weight.
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `α_max(G)`.
    pub fn max_weight(&self) -> f64 {
        self.weights.iter().copied().fold(0.0, f64::max)
    }

    /// `α_U(G)` for a vertex subset.
    pub fn subset_weight(&self, subset: &[usize]) -> f64 {
        subset.iter().map(|&x| self.weights[x]).sum()
    }

    /// Number of unordered pairs `{x, y}` (loops included) with `β_xy ≠ 0`.
    pub fn edge_count(&self) -> usize {
        let n = self.n();
        (0..n)
            .flat_map(|x| (x..n).map(move |y| (x, y)))
            .filter(|&(x, y)| self.beta(x, y) != 0.0)
            .count()
    }

    /// Unit vertex weights, 0/1 edge weights and an empty diagonal.
    pub fn is_simple(&self) -> bool {
        let n = self.n();
        self.weights.iter().all(|&a| a == 1.0)
            && self.edges.iter().all(|&b| b == 0.0 || b == 1.0)
            && (0..n).all(|x| self.beta(x, x) == 0.0)
    }

    /// Weighted degree `Σ_y α_y |β_xy|`.
    pub fn degree(&self, x: usize) -> f64 {
        let n = self.n();
        (0..n).map(|y| self.weights[y] * self.beta(x, y).abs()).sum()
    }

    /// `‖G‖_p` for `p ≥ 1`; pass `f64::INFINITY` for the max norm over pairs
    /// of positive-weight vertices.
    pub fn norm(&self, p: f64) -> Result<f64> {
        if p.is_nan() || p < 1.0 {
            return invalid(format!("norm order must be >= 1, got {p}"));
        }
        let n = self.n();
        if p == f64::INFINITY {
            let mut best: f64 = 0.0;
            for x in 0..n {
                if self.weights[x] <= 0.0 {
                    continue;
                }
                for y in 0..n {
                    if self.weights[y] > 0.0 {
                        best = best.max(self.beta(x, y).abs());
                    }
                }
            }
            return Ok(best);
        }
        let total = self.total_weight();
        let mut acc = 0.0;
        for x in 0..n {
            let ax = self.weights[x];
            if ax == 0.0 {
                continue;
            }
            for y in 0..n {
                let b = self.beta(x, y).abs();
                if b != 0.0 {
                    let w = ax * self.weights[y];
                    acc += w * if p == 1.0 { b } else { math::powf(b, p) };
                }
            }
        }
        acc /= total * total;
        Ok(if p == 1.0 { acc } else { math::powf(acc, 1.0 / p) })
    }

    /// The density `‖G‖_1`.
    pub fn density(&self) -> f64 {
        self.norm(1.0).expect("p = 1 is valid")
    }

    /// `cG`: same vertex weights, edge weights multiplied by `c`.
    pub fn scale(&self, c: f64) -> Self {
        Self {
            weights: self.weights.clone(),
            edges: self.edges.iter().map(|&b| c * b).collect(),
        }
    }

    /// Disjoint union, vertices of `other` numbered after those of `self`.
    pub fn disjoint_union(&self, other: &Self) -> Self {
        let (n1, n2) = (self.n(), other.n());
        let n = n1 + n2;
        let mut edges = vec![0.0; n * n];
        for x in 0..n1 {
            edges[x * n..x * n + n1].copy_from_slice(&self.edges[x * n1..(x + 1) * n1]);
        }
        for x in 0..n2 {
            let row = (n1 + x) * n + n1;
            edges[row..row + n2].copy_from_slice(&other.edges[x * n2..(x + 1) * n2]);
        }
        let mut weights = self.weights.clone();
        weights.extend_from_slice(&other.weights);
        Self { weights, edges }
    }

    /// Class-block sums `Σ_{u∈V_i, v∈V_j} α_u α_v β_uv`, row-major `q × q`.
    pub(crate) fn block_sums(&self, partition: &VertexPartition) -> Vec<f64> {
        let n = self.n();
        let q = partition.q();
        let phi = partition.assignment();
        // row pass: r[x][j] = Σ_{v∈V_j} α_v β_xv
        let mut out = vec![0.0; q * q];
        let mut row = vec![0.0; q];
        for x in 0..n {
            let ax = self.weights[x];
            if ax == 0.0 {
                continue;
            }
            row.iter_mut().for_each(|r| *r = 0.0);
            let bx = &self.edges[x * n..(x + 1) * n];
            for (v, &b) in bx.iter().enumerate() {
                if b != 0.0 {
                    row[phi[v]] += self.weights[v] * b;
                }
            }
            let i = phi[x];
            for j in 0..q {
                out[i * q + j] += ax * row[j];
            }
        }
        out
    }

    /// `G_P`: edge weights replaced by weighted block averages; zero on
    /// blocks touching a class of total weight zero.
    pub fn average_over(&self, partition: &VertexPartition) -> Result<Self> {
        ensure_dim(self.n(), partition.len())?;
        let q = partition.q();
        let sums = self.block_sums(partition);
        let cw = partition.class_weights(self)?;
        let n = self.n();
        let phi = partition.assignment();
        let mut edges = vec![0.0; n * n];
        for x in 0..n {
            for y in 0..n {
                let (i, j) = (phi[x], phi[y]);
                let w = cw[i] * cw[j];
                edges[x * n + y] = if cw[i] > 0.0 && cw[j] > 0.0 {
                    sums[i * q + j] / w
                } else {
                    0.0
                };
            }
        }
        // block averages are symmetric in exact arithmetic; enforce it bitwise
        for x in 0..n {
            for y in 0..x {
                edges[x * n + y] = edges[y * n + x];
            }
        }
        Ok(Self {
            weights: self.weights.clone(),
            edges,
        })
    }

    /// The `q`-quotient `G/φ`.
    pub fn quotient(&self, partition: &VertexPartition) -> Result<Quotient> {
        ensure_dim(self.n(), partition.len())?;
        let q = partition.q();
        let total = self.total_weight();
        let alpha: Vec<f64> = partition
            .class_weights(self)?
            .into_iter()
            .map(|w| w / total)
            .collect();
        let density = self.density();
        let beta = if density == 0.0 {
            vec![0.0; q * q]
        } else {
            let scale = 1.0 / (density * total * total);
            let mut s = self.block_sums(partition);
            s.iter_mut().for_each(|b| *b *= scale);
            for i in 0..q {
                for j in 0..i {
                    s[i * q + j] = s[j * q + i];
                }
            }
            s
        };
        Ok(Quotient { q, alpha, beta })
    }
}

/// A map `φ: V → [q]`; classes may be empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexPartition {
    assignment: Vec<usize>,
    q: usize,
}

impl VertexPartition {
    pub fn new(assignment: Vec<usize>, q: usize) -> Result<Self> {
        if q == 0 {
            return invalid("partition needs at least one class");
        }
        if let Some((x, &c)) = assignment.iter().enumerate().find(|(_, &c)| c >= q) {
            return invalid(format!("vertex {x} assigned to class {c} >= q = {q}"));
        }
        Ok(Self { assignment, q })
    }

    /// All vertices in class 0.
    pub fn trivial(n: usize) -> Self {
        Self {
            assignment: vec![0; n],
            q: 1,
        }
    }

    /// Every vertex in its own class.
    pub fn singletons(n: usize) -> Self {
        Self {
            assignment: (0..n).collect(),
            q: n.max(1),
        }
    }

    /// From explicit classes; every vertex `0..n` must appear exactly once.
    pub fn from_classes(n: usize, classes: &[Vec<usize>]) -> Result<Self> {
        let mut assignment = vec![usize::MAX; n];
        for (i, class) in classes.iter().enumerate() {
            for &x in class {
                if x >= n {
                    return invalid(format!("vertex {x} out of range"));
                }
                if assignment[x] != usize::MAX {
                    return invalid(format!("vertex {x} appears in two classes"));
                }
                assignment[x] = i;
            }
        }
        if assignment.contains(&usize::MAX) {
            return invalid("classes do not cover every vertex");
        }
        Self::new(assignment, classes.len())
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    #[inline]
    pub fn class_of(&self, x: usize) -> usize {
        self.assignment[x]
    }

    /// Vertex lists per class (classes may be empty).
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.q];
        for (x, &c) in self.assignment.iter().enumerate() {
            out[c].push(x);
        }
        out
    }

    pub fn nonempty_classes(&self) -> usize {
        let mut used = vec![false; self.q];
        self.assignment.iter().for_each(|&c| used[c] = true);
        used.into_iter().filter(|&u| u).count()
    }

    /// Unnormalized class weights `α_{V_i}(G)`.
    pub fn class_weights(&self, g: &WeightedGraph) -> Result<Vec<f64>> {
        ensure_dim(g.n(), self.len())?;
        let mut w = vec![0.0; self.q];
        for (x, &c) in self.assignment.iter().enumerate() {
            w[c] += g.alpha(x);
        }
        Ok(w)
    }

    /// Every class weight within `α_max(G)` of `α_G / q` (plus `1e-12`
    /// relative slack).
    pub fn is_equipartition(&self, g: &WeightedGraph) -> bool {
        let Ok(w) = self.class_weights(g) else {
            return false;
        };
        let total = g.total_weight();
        let target = total / self.q as f64;
        let slack = g.max_weight() + 1e-12 * total;
        w.iter().all(|&wi| (wi - target).abs() <= slack)
    }

    /// Drops empty classes and relabels the rest in order of first appearance.
    pub fn compact(&self) -> Self {
        let mut map = vec![usize::MAX; self.q];
        let mut next = 0;
        let assignment = self
            .assignment
            .iter()
            .map(|&c| {
                if map[c] == usize::MAX {
                    map[c] = next;
                    next += 1;
                }
                map[c]
            })
            .collect();
        Self {
            assignment,
            q: next.max(1),
        }
    }
}

/// A quotient `(α, β)`: class weights summing to one and a `q × q` matrix.
///
/// Graph quotients always satisfy `Σ|β_ij| ≤ 1`; fractional quotients of
/// graphons only satisfy `Σ|β_ij| ≤ ‖W‖_1`, so that bound is checked by
/// [`Quotient::in_unit_ball`] rather than at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Quotient {
    q: usize,
    alpha: Vec<f64>,
    beta: Vec<f64>,
}

impl Quotient {
    /// Validates `α ∈ [0,1]^q`, `Σα = 1` (to `1e-9`) and a `q × q` β.
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        let q = alpha.len();
        if q == 0 {
            return invalid("quotient needs q >= 1");
        }
        ensure_dim(q * q, beta.len())?;
        if alpha.iter().any(|&a| !(-1e-12..=1.0 + 1e-12).contains(&a)) {
            return invalid("alpha entries must lie in [0, 1]");
        }
        let s: f64 = alpha.iter().sum();
        if (s - 1.0).abs() > 1e-9 {
            return invalid(format!("alpha must sum to 1, sums to {s}"));
        }
        if beta.iter().any(|b| !b.is_finite()) {
            return invalid("beta entries must be finite");
        }
        Ok(Self { q, alpha, beta })
    }

    pub(crate) fn from_parts_unchecked(alpha: Vec<f64>, beta: Vec<f64>) -> Self {
        Self {
            q: alpha.len(),
            alpha,
            beta,
        }
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// Row-major `q × q` β.
    pub fn beta_matrix(&self) -> &[f64] {
        &self.beta
    }

    #[inline]
    pub fn beta(&self, i: usize, j: usize) -> f64 {
        self.beta[i * self.q + j]
    }

    /// `Σ_ij |β_ij|`.
    pub fn beta_l1(&self) -> f64 {
        self.beta.iter().map(|b| b.abs()).sum()
    }

    /// Membership in `S_q`: `Σ|β| ≤ 1` up to `1e-12`.
    pub fn in_unit_ball(&self) -> bool {
        self.beta_l1() <= 1.0 + 1e-12
    }

    /// `⟨β, J⟩ = Σ_ij β_ij J_ij` for a row-major `q × q` J.
    pub fn pair_with(&self, j: &[f64]) -> Result<f64> {
        ensure_dim(self.q * self.q, j.len())?;
        Ok(self.beta.iter().zip(j).map(|(b, c)| b * c).sum())
    }

    /// The `ℓ_1` distance `d_1` on `R^{q + q²}`.
    pub fn d1(&self, other: &Self) -> Result<f64> {
        ensure_dim(self.q, other.q)?;
        let a: f64 = self
            .alpha
            .iter()
            .zip(&other.alpha)
            .map(|(x, y)| (x - y).abs())
            .sum();
        let b: f64 = self
            .beta
            .iter()
            .zip(&other.beta)
            .map(|(x, y)| (x - y).abs())
            .sum();
        Ok(a + b)
    }

    /// Rounded key (12 decimal digits) for exact deduplication.
    pub fn dedup_key(&self) -> Vec<i64> {
        self.alpha
            .iter()
            .chain(&self.beta)
            .map(|&x| math::dedup_key(x))
            .collect()
    }
}

/// `S_q(G)`: every distinct quotient over all `q^n` maps, deduplicated after
/// rounding to 12 decimal digits and returned in lexicographic key order.
///
/// Fails with [`Error::Budget`] when `q^n > cap`.
pub fn enumerate_quotients(g: &WeightedGraph, q: usize, cap: u128) -> Result<Vec<Quotient>> {
    if q == 0 {
        return invalid("q must be >= 1");
    }
    let needed = math::pow_saturating(q, g.n());
    if needed > cap {
        return Err(Error::Budget { needed, budget: cap });
    }
    let mut seen: BTreeMap<Vec<i64>, Quotient> = BTreeMap::new();
    let mut err = None;
    math::for_each_map(g.n(), q, |phi| {
        let p = VertexPartition {
            assignment: phi.to_vec(),
            q,
        };
        match g.quotient(&p) {
            Ok(quot) => {
                seen.entry(quot.dedup_key()).or_insert(quot);
            }
            Err(e) => err = Some(e),
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(seen.into_values().collect())
}

/// Max-cut of a simple graph via its 2-quotients:
/// `|E(G)| · max_{(α,β) ∈ S_2(G)} (β_12 + β_21)`.
pub fn maxcut(g: &WeightedGraph) -> Result<f64> {
    if !g.is_simple() {
        return invalid("maxcut requires a simple graph");
    }
    let edges = g.edge_count() as f64;
    let quotients = enumerate_quotients(g, 2, u128::MAX)?;
    let best = quotients
        .iter()
        .map(|x| x.beta(0, 1) + x.beta(1, 0))
        .fold(0.0, f64::max);
    // the product is an integer cut size; strip floating residue
    Ok(math::round(edges * best))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k2() -> WeightedGraph {
        WeightedGraph::simple(2, &[(0, 1)]).unwrap()
    }

    fn k3() -> WeightedGraph {
        WeightedGraph::simple(3, &[(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    fn c4() -> WeightedGraph {
        WeightedGraph::simple(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap()
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(WeightedGraph::new(vec![0.0, 0.0], vec![0.0; 4]).is_err());
        assert!(WeightedGraph::new(vec![1.0, -1.0], vec![0.0; 4]).is_err());
        assert!(WeightedGraph::new(vec![1.0, 1.0], vec![0.0, 1.0, 2.0, 0.0]).is_err());
        assert!(WeightedGraph::new(vec![1.0], vec![0.0; 4]).is_err());
        assert!(WeightedGraph::from_edges(vec![1.0; 2], &[(0, 1, 1.0), (1, 0, 1.0)]).is_err());
        assert!(WeightedGraph::from_edges(vec![1.0; 2], &[(0, 2, 1.0)]).is_err());
    }

    #[test]
    fn norms() {
        assert!((k3().norm(1.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((k2().norm(2.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        let e = WeightedGraph::edgeless(4).unwrap();
        for p in [1.0, 2.0, 3.5, f64::INFINITY] {
            assert_eq!(e.norm(p).unwrap(), 0.0);
        }
        assert!(k2().norm(0.5).is_err());
        assert_eq!(k2().norm(f64::INFINITY).unwrap(), 1.0);
        // zero-weight vertices are ignored by the max norm
        let g = WeightedGraph::from_edges(vec![1.0, 0.0], &[(0, 1, 5.0)]).unwrap();
        assert_eq!(g.norm(f64::INFINITY).unwrap(), 0.0);
    }

    #[test]
    fn scaling() {
        assert_eq!(k2().scale(1.0), k2());
        assert_eq!(k2().scale(0.0).density(), 0.0);
        assert!((k3().scale(2.0).density() - 4.0 / 3.0).abs() < 1e-15);
        assert!((k3().scale(-2.0).density() - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn averaging() {
        let g = k2();
        assert_eq!(g.average_over(&VertexPartition::singletons(2)).unwrap(), g);

        // C4 with parts {0,2} and {1,3}: 1 across, 0 within
        let p = VertexPartition::new(vec![0, 1, 0, 1], 2).unwrap();
        let gp = c4().average_over(&p).unwrap();
        for x in 0..4 {
            for y in 0..4 {
                let expect = if p.class_of(x) == p.class_of(y) { 0.0 } else { 1.0 };
                assert_eq!(gp.beta(x, y), expect);
            }
        }

        let g = k3();
        let gp = g.average_over(&VertexPartition::trivial(3)).unwrap();
        for &b in gp.edge_matrix() {
            assert!((b - g.density()).abs() < 1e-15);
        }
        assert_eq!(gp.average_over(&VertexPartition::trivial(3)).unwrap(), gp);
    }

    #[test]
    fn averaging_zero_weight_block() {
        let g = WeightedGraph::from_edges(vec![1.0, 1.0, 0.0], &[(0, 1, 1.0), (1, 2, 3.0)]).unwrap();
        let p = VertexPartition::new(vec![0, 0, 1], 2).unwrap();
        let gp = g.average_over(&p).unwrap();
        assert_eq!(gp.beta(0, 2), 0.0);
        assert_eq!(gp.beta(2, 2), 0.0);
        assert!((gp.beta(0, 1) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn quotients_of_k2() {
        let g = k2();
        let same = g.quotient(&VertexPartition::new(vec![0, 0], 2).unwrap()).unwrap();
        assert_eq!(same.alpha(), &[1.0, 0.0]);
        assert_eq!(same.beta_matrix(), &[1.0, 0.0, 0.0, 0.0]);
        let split = g.quotient(&VertexPartition::new(vec![0, 1], 2).unwrap()).unwrap();
        assert_eq!(split.alpha(), &[0.5, 0.5]);
        assert_eq!(split.beta_matrix(), &[0.0, 0.5, 0.5, 0.0]);

        let e = WeightedGraph::edgeless(3).unwrap();
        let z = e.quotient(&VertexPartition::new(vec![0, 1, 1], 2).unwrap()).unwrap();
        assert!(z.beta_matrix().iter().all(|&b| b == 0.0));
    }

    #[test]
    fn quotient_enumeration() {
        let s = enumerate_quotients(&k2(), 2, 100).unwrap();
        assert_eq!(s.len(), 3);
        let single = enumerate_quotients(&WeightedGraph::edgeless(1).unwrap(), 2, 100).unwrap();
        assert_eq!(single.len(), 2);
        assert!(matches!(
            enumerate_quotients(&k2(), 2, 2),
            Err(Error::Budget { needed: 4, budget: 2 })
        ));
    }

    #[test]
    fn maxcut_small() {
        assert_eq!(maxcut(&c4()).unwrap(), 4.0);
        assert_eq!(maxcut(&k3()).unwrap(), 2.0);
        assert_eq!(maxcut(&WeightedGraph::edgeless(3).unwrap()).unwrap(), 0.0);
        assert!(maxcut(&k2().scale(2.0)).is_err());
    }

    #[test]
    fn equipartition_detection() {
        let g = WeightedGraph::edgeless(5).unwrap();
        assert!(VertexPartition::new(vec![0, 0, 0, 1, 1], 2).unwrap().is_equipartition(&g));
        assert!(!VertexPartition::new(vec![0, 0, 0, 0, 1], 2).unwrap().is_equipartition(&g));
    }

    #[test]
    fn union_blocks() {
        let u = k2().disjoint_union(&k3());
        assert_eq!(u.n(), 5);
        assert_eq!(u.edge_count(), 4);
        assert_eq!(u.beta(2, 3), 1.0);
        assert_eq!(u.beta(1, 2), 0.0);
    }
}
