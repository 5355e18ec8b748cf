//! Configuration energies, partition functions, and ground-state and free
//! energies for weighted graphs and step graphons.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{ensure_dim, invalid, Error, Result};
use crate::graph::{VertexPartition, WeightedGraph};
use crate::graphon::StepGraphon;
use crate::linalg;
use crate::math::{self, LogSumExp};
use crate::quotient::{fractional_quotient, StepFractionalPartition};
use crate::rng::{self, StreamRng};

/// Slack added to `ε` in the ensemble constraint `|α_i(φ) − a_i| ≤ ε`.
pub const FEASIBILITY_TOL: f64 = 1e-12;

/// Largest number of partition entries (`k·q`) handled by the exact face
/// enumeration in [`graphon_gse`].
pub const FACE_ENUMERATION_LIMIT: usize = 14;

/// Checks that `j` is a symmetric square matrix and returns its order.
pub fn coupling_order(j: &[f64]) -> Result<usize> {
    let q = math::sqrt(j.len() as f64) as usize;
    if q == 0 || q * q != j.len() {
        return invalid(format!("coupling matrix must be square, got {} entries", j.len()));
    }
    for a in 0..q {
        for b in 0..q {
            if !j[a * q + b].is_finite() {
                return invalid("coupling entries must be finite");
            }
            if j[a * q + b] != j[b * q + a] {
                return invalid(format!("coupling matrix not symmetric at ({a},{b})"));
            }
        }
    }
    Ok(q)
}

fn check_simplex(a: &[f64], q: usize) -> Result<()> {
    ensure_dim(q, a.len())?;
    if a.iter().any(|&x| !x.is_finite() || x < 0.0) {
        return invalid("target class weights must be nonnegative");
    }
    if (a.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
        return invalid("target class weights must sum to 1");
    }
    Ok(())
}

/// Spin-model parameters: coupling `J`, field `h`, target class weights `a`
/// and slack `ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingModel {
    q: usize,
    j: Vec<f64>,
    h: Vec<f64>,
    a: Vec<f64>,
    eps: f64,
}

impl CouplingModel {
    pub fn new(j: Vec<f64>, h: Vec<f64>, a: Vec<f64>, eps: f64) -> Result<Self> {
        let q = coupling_order(&j)?;
        ensure_dim(q, h.len())?;
        if h.iter().any(|x| !x.is_finite()) {
            return invalid("field entries must be finite");
        }
        check_simplex(&a, q)?;
        if !(eps >= 0.0) || !eps.is_finite() {
            return invalid("eps must be finite and nonnegative");
        }
        Ok(Self { q, j, h, a, eps })
    }

    /// Zero field.
    pub fn microcanonical(j: Vec<f64>, a: Vec<f64>, eps: f64) -> Result<Self> {
        let q = coupling_order(&j)?;
        Self::new(j, vec![0.0; q], a, eps)
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn j(&self) -> &[f64] {
        &self.j
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// `‖J‖_∞ = max |J_ij|`.
    pub fn j_sup(&self) -> f64 {
        sup(&self.j)
    }

    /// `‖J‖_1 = Σ |J_ij|`.
    pub fn j_l1(&self) -> f64 {
        self.j.iter().map(|x| x.abs()).sum()
    }
}

fn sup(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// The minimizer attached to an [`EnergyResult`].
#[derive(Debug, Clone, PartialEq)]
pub enum Optimizer {
    Graph(VertexPartition),
    Fractional(StepFractionalPartition),
    /// Free energies summarize every configuration.
    None,
}

/// How an [`EnergyResult`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyMethod {
    Enumeration,
    Anneal,
    ClosedForm,
    FaceEnumeration,
    ExchangeDescent,
    MeanField,
}

impl EnergyMethod {
    pub fn tag(self) -> &'static str {
        match self {
            Self::Enumeration => "enumeration",
            Self::Anneal => "anneal",
            Self::ClosedForm => "closed_form",
            Self::FaceEnumeration => "face_enumeration",
            Self::ExchangeDescent => "exchange_descent",
            Self::MeanField => "mean_field",
        }
    }
}

/// An energy value with its optimizer. `exact` holds only for enumeration,
/// exact face enumeration and closed forms; `resolution` bounds the numerical
/// error of exact values and is infinite for heuristic ones.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyResult {
    pub value: f64,
    pub optimizer: Optimizer,
    pub exact: bool,
    pub method: EnergyMethod,
    pub resolution: f64,
}

/// Per-graph constants: normalized vertex weights, edge weights and
/// `1/‖G‖_1` (0 when the graph has no edge mass).
struct Energetics<'a> {
    n: usize,
    w: Vec<f64>,
    b: &'a [f64],
    c: f64,
}

impl<'a> Energetics<'a> {
    fn new(g: &'a WeightedGraph) -> Self {
        let total = g.total_weight();
        let d = g.density();
        Self {
            n: g.n(),
            w: g.vertex_weights().iter().map(|&a| a / total).collect(),
            b: g.edge_matrix(),
            c: if d > 0.0 { 1.0 / d } else { 0.0 },
        }
    }

    /// `−(1/‖G‖_1) Σ_{u,v} w_u w_v β_uv J_{φ(u)φ(v)}`.
    fn energy(&self, phi: &[usize], j: &[f64], q: usize) -> f64 {
        if self.c == 0.0 {
            return 0.0;
        }
        let n = self.n;
        let mut acc = 0.0;
        for u in 0..n {
            let mut row = 0.0;
            for v in 0..n {
                let b = self.b[u * n + v];
                if b != 0.0 {
                    row += self.w[v] * b * j[phi[u] * q + phi[v]];
                }
            }
            acc += self.w[u] * row;
        }
        -self.c * acc
    }

    fn alpha(&self, phi: &[usize], q: usize) -> Vec<f64> {
        let mut a = vec![0.0; q];
        for (u, &i) in phi.iter().enumerate() {
            a[i] += self.w[u];
        }
        a
    }

    /// Energy change when `u` moves to class `to`.
    fn delta(&self, phi: &[usize], u: usize, to: usize, j: &[f64], q: usize) -> f64 {
        let from = phi[u];
        if from == to || self.c == 0.0 {
            return 0.0;
        }
        let n = self.n;
        let mut cross = 0.0;
        for v in 0..n {
            if v != u {
                let b = self.b[u * n + v];
                if b != 0.0 {
                    cross += self.w[v] * b * (j[to * q + phi[v]] - j[from * q + phi[v]]);
                }
            }
        }
        let own = self.w[u] * self.b[u * n + u] * (j[to * q + to] - j[from * q + from]);
        -self.c * self.w[u] * (2.0 * cross + own)
    }
}

fn feasible(alpha: &[f64], a: &[f64], eps: f64) -> bool {
    alpha
        .iter()
        .zip(a)
        .all(|(x, t)| (x - t).abs() <= eps + FEASIBILITY_TOL)
}

fn violation(alpha: &[f64], a: &[f64], eps: f64) -> f64 {
    alpha
        .iter()
        .zip(a)
        .map(|(x, t)| ((x - t).abs() - eps).max(0.0))
        .sum()
}

/// `E_φ(G, J)`, evaluated as a direct sum over vertex pairs.
pub fn config_energy(g: &WeightedGraph, j: &[f64], p: &VertexPartition) -> Result<f64> {
    let q = coupling_order(j)?;
    ensure_dim(q, p.q())?;
    ensure_dim(g.n(), p.len())?;
    Ok(Energetics::new(g).energy(p.assignment(), j, q))
}

fn check_budget(n: usize, q: usize, budget: u128) -> Result<()> {
    let needed = math::pow_saturating(q, n);
    if needed > budget {
        return Err(Error::Budget { needed, budget });
    }
    Ok(())
}

fn partition(phi: &[usize], q: usize) -> VertexPartition {
    VertexPartition::new(phi.to_vec(), q).expect("labels below q")
}

/// Annealing schedule: `T_t = ‖J‖_∞ γ^t` for `sweeps` sweeps of `n` moves,
/// best of `restarts` seeded runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealSchedule {
    pub restarts: usize,
    pub seed: u64,
    pub gamma: f64,
    pub sweeps: usize,
}

impl AnnealSchedule {
    pub fn new(seed: u64) -> Self {
        Self {
            restarts: 4,
            seed,
            gamma: 0.995,
            sweeps: 1500,
        }
    }
}

/// Search strategy for graph ground-state energies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GseMethod {
    /// All `q^n` maps; fails when `q^n > budget`.
    Exact { budget: u128 },
    Anneal(AnnealSchedule),
}

/// `E_{a,ε}(G, J) = min_{φ ∈ Ω_{a,ε}} E_φ(G, J)`.
pub fn microcanonical_gse(
    g: &WeightedGraph,
    m: &CouplingModel,
    method: GseMethod,
) -> Result<EnergyResult> {
    let en = Energetics::new(g);
    let q = m.q;
    match method {
        GseMethod::Exact { budget } => {
            check_budget(g.n(), q, budget)?;
            let mut best: Option<(f64, Vec<usize>)> = None;
            math::for_each_map(g.n(), q, |phi| {
                if feasible(&en.alpha(phi, q), &m.a, m.eps) {
                    let e = en.energy(phi, &m.j, q);
                    if best.as_ref().is_none_or(|(b, _)| e < *b) {
                        best = Some((e, phi.to_vec()));
                    }
                }
            });
            let (value, phi) = best.ok_or_else(infeasible)?;
            Ok(EnergyResult {
                value,
                optimizer: Optimizer::Graph(partition(&phi, q)),
                exact: true,
                method: EnergyMethod::Enumeration,
                resolution: 0.0,
            })
        }
        GseMethod::Anneal(s) => {
            let (value, phi) = anneal(&en, &m.j, q, None, Some((&m.a, m.eps)), &s)?;
            Ok(EnergyResult {
                value,
                optimizer: Optimizer::Graph(partition(&phi, q)),
                exact: false,
                method: EnergyMethod::Anneal,
                resolution: f64::INFINITY,
            })
        }
    }
}

fn infeasible() -> Error {
    Error::Infeasible("no map satisfies the class-weight constraint".into())
}

/// `F_{a,ε}(G, J) = −(1/n) log Σ_{φ ∈ Ω_{a,ε}} e^{−n E_φ}` by enumeration.
pub fn microcanonical_free_energy(
    g: &WeightedGraph,
    m: &CouplingModel,
    budget: u128,
) -> Result<EnergyResult> {
    let q = m.q;
    check_budget(g.n(), q, budget)?;
    let en = Energetics::new(g);
    let n = g.n() as f64;
    let mut z = LogSumExp::new();
    let mut any = false;
    math::for_each_map(g.n(), q, |phi| {
        if feasible(&en.alpha(phi, q), &m.a, m.eps) {
            any = true;
            z.push(-n * en.energy(phi, &m.j, q));
        }
    });
    if !any {
        return Err(infeasible());
    }
    Ok(EnergyResult {
        value: -z.value() / n,
        optimizer: Optimizer::None,
        exact: true,
        method: EnergyMethod::Enumeration,
        resolution: 0.0,
    })
}

fn field_term(alpha: &[f64], h: &[f64]) -> f64 {
    alpha.iter().zip(h).map(|(a, b)| a * b).sum()
}

/// `F(G, J, h) = −(1/n) log Σ_φ e^{−n E_φ + n⟨h, α(φ)⟩}` by enumeration.
pub fn free_energy(g: &WeightedGraph, j: &[f64], h: &[f64], budget: u128) -> Result<EnergyResult> {
    let q = coupling_order(j)?;
    ensure_dim(q, h.len())?;
    check_budget(g.n(), q, budget)?;
    let en = Energetics::new(g);
    let n = g.n() as f64;
    let mut z = LogSumExp::new();
    math::for_each_map(g.n(), q, |phi| {
        z.push(-n * (en.energy(phi, j, q) - field_term(&en.alpha(phi, q), h)));
    });
    Ok(EnergyResult {
        value: -z.value() / n,
        optimizer: Optimizer::None,
        exact: true,
        method: EnergyMethod::Enumeration,
        resolution: 0.0,
    })
}

/// `E(G, J, h) = min_φ (E_φ − ⟨h, α(φ)⟩)`.
pub fn ground_state_energy(
    g: &WeightedGraph,
    j: &[f64],
    h: &[f64],
    method: GseMethod,
) -> Result<EnergyResult> {
    let q = coupling_order(j)?;
    ensure_dim(q, h.len())?;
    let en = Energetics::new(g);
    match method {
        GseMethod::Exact { budget } => {
            check_budget(g.n(), q, budget)?;
            let mut best = (f64::INFINITY, Vec::new());
            math::for_each_map(g.n(), q, |phi| {
                let e = en.energy(phi, j, q) - field_term(&en.alpha(phi, q), h);
                if e < best.0 {
                    best = (e, phi.to_vec());
                }
            });
            Ok(EnergyResult {
                value: best.0,
                optimizer: Optimizer::Graph(partition(&best.1, q)),
                exact: true,
                method: EnergyMethod::Enumeration,
                resolution: 0.0,
            })
        }
        GseMethod::Anneal(s) => {
            let (value, phi) = anneal(&en, j, q, Some(h), None, &s)?;
            Ok(EnergyResult {
                value,
                optimizer: Optimizer::Graph(partition(&phi, q)),
                exact: false,
                method: EnergyMethod::Anneal,
                resolution: f64::INFINITY,
            })
        }
    }
}

/// Moves vertices from the most overfull class to the most underfull one
/// while that lowers the total violation; falls back to heaviest-first
/// filling of the largest deficit.
fn repair(en: &Energetics, phi: &mut [usize], q: usize, a: &[f64], eps: f64) -> bool {
    let mut alpha = en.alpha(phi, q);
    for _ in 0..4 * en.n * q + 4 {
        let v0 = violation(&alpha, a, eps);
        if feasible(&alpha, a, eps) {
            return true;
        }
        let over = (0..q)
            .max_by(|&x, &y| (alpha[x] - a[x]).total_cmp(&(alpha[y] - a[y])))
            .expect("q >= 1");
        let under = (0..q)
            .min_by(|&x, &y| (alpha[x] - a[x]).total_cmp(&(alpha[y] - a[y])))
            .expect("q >= 1");
        let mut best: Option<(f64, usize)> = None;
        for u in (0..en.n).filter(|&u| phi[u] == over) {
            let mut trial = alpha.clone();
            trial[over] -= en.w[u];
            trial[under] += en.w[u];
            let v = violation(&trial, a, eps);
            if v < v0 - 1e-15 && best.is_none_or(|(b, _)| v < b) {
                best = Some((v, u));
            }
        }
        match best {
            Some((_, u)) => {
                alpha[over] -= en.w[u];
                alpha[under] += en.w[u];
                phi[u] = under;
            }
            None => break,
        }
    }
    let mut order: Vec<usize> = (0..en.n).collect();
    order.sort_by(|&x, &y| en.w[y].total_cmp(&en.w[x]).then(x.cmp(&y)));
    let mut alpha = vec![0.0; q];
    for u in order {
        let i = (0..q)
            .max_by(|&x, &y| (a[x] - alpha[x]).total_cmp(&(a[y] - alpha[y])).then(y.cmp(&x)))
            .expect("q >= 1");
        phi[u] = i;
        alpha[i] += en.w[u];
    }
    feasible(&alpha, a, eps)
}

fn anneal(
    en: &Energetics,
    j: &[f64],
    q: usize,
    h: Option<&[f64]>,
    ensemble: Option<(&[f64], f64)>,
    s: &AnnealSchedule,
) -> Result<(f64, Vec<usize>)> {
    let n = en.n;
    let t0 = if sup(j) > 0.0 { sup(j) } else { 1.0 };
    let zero_h = vec![0.0; q];
    let h = h.unwrap_or(&zero_h);
    let objective = |phi: &[usize]| en.energy(phi, j, q) - field_term(&en.alpha(phi, q), h);
    let mut best: Option<(f64, Vec<usize>)> = None;
    for r in 0..s.restarts.max(1) {
        let mut g = rng::stream(s.seed, r as u64);
        let mut phi: Vec<usize> = (0..n).map(|_| rng::index(&mut g, q)).collect();
        if let Some((a, eps)) = ensemble {
            if !repair(en, &mut phi, q, a, eps) {
                continue;
            }
        }
        let mut alpha = en.alpha(&phi, q);
        let mut cur = objective(&phi);
        let mut temp = t0;
        for _ in 0..s.sweeps {
            for _ in 0..n {
                step(en, j, q, h, ensemble, &mut phi, &mut alpha, &mut cur, temp, &mut g);
            }
            temp *= s.gamma;
        }
        polish(en, j, q, h, ensemble, &mut phi, &mut alpha, &mut cur);
        // drift guard: report the recomputed energy
        let value = objective(&phi);
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, phi));
        }
    }
    best.ok_or_else(infeasible)
}

fn move_delta(en: &Energetics, j: &[f64], q: usize, h: &[f64], phi: &[usize], u: usize, to: usize) -> f64 {
    en.delta(phi, u, to, j, q) - en.w[u] * (h[to] - h[phi[u]])
}

fn admissible(alpha: &[f64], ensemble: Option<(&[f64], f64)>) -> bool {
    ensemble.is_none_or(|(a, eps)| feasible(alpha, a, eps))
}

#[allow(clippy::too_many_arguments)]
fn step(
    en: &Energetics,
    j: &[f64],
    q: usize,
    h: &[f64],
    ensemble: Option<(&[f64], f64)>,
    phi: &mut [usize],
    alpha: &mut [f64],
    cur: &mut f64,
    temp: f64,
    g: &mut StreamRng,
) {
    let n = en.n;
    let accept = |d: f64, g: &mut StreamRng| d <= 0.0 || rng::unit(g) < math::exp(-(n as f64) * d / temp);
    if q < 2 {
        return;
    }
    if n >= 2 && rng::bernoulli(g, 0.5) {
        let u = rng::index(g, n);
        let v = rng::index(g, n);
        let (i, k) = (phi[u], phi[v]);
        if i == k {
            return;
        }
        alpha[i] += en.w[v] - en.w[u];
        alpha[k] += en.w[u] - en.w[v];
        if admissible(alpha, ensemble) {
            let d1 = move_delta(en, j, q, h, phi, u, k);
            phi[u] = k;
            let d2 = move_delta(en, j, q, h, phi, v, i);
            if accept(d1 + d2, g) {
                phi[v] = i;
                *cur += d1 + d2;
                return;
            }
            phi[u] = i;
        }
        alpha[i] -= en.w[v] - en.w[u];
        alpha[k] -= en.w[u] - en.w[v];
    } else {
        let u = rng::index(g, n);
        let to = rng::index(g, q);
        let from = phi[u];
        if to == from {
            return;
        }
        alpha[from] -= en.w[u];
        alpha[to] += en.w[u];
        if admissible(alpha, ensemble) {
            let d = move_delta(en, j, q, h, phi, u, to);
            if accept(d, g) {
                phi[u] = to;
                *cur += d;
                return;
            }
        }
        alpha[from] += en.w[u];
        alpha[to] -= en.w[u];
    }
}

/// Zero-temperature descent over relabels and swaps until no move improves.
#[allow(clippy::too_many_arguments)]
fn polish(
    en: &Energetics,
    j: &[f64],
    q: usize,
    h: &[f64],
    ensemble: Option<(&[f64], f64)>,
    phi: &mut [usize],
    alpha: &mut [f64],
    cur: &mut f64,
) {
    let n = en.n;
    let mut improved = true;
    let mut rounds = 0;
    while improved && rounds < 100 {
        improved = false;
        rounds += 1;
        for u in 0..n {
            for to in 0..q {
                let from = phi[u];
                if to == from {
                    continue;
                }
                alpha[from] -= en.w[u];
                alpha[to] += en.w[u];
                let d = move_delta(en, j, q, h, phi, u, to);
                if admissible(alpha, ensemble) && d < -1e-15 {
                    phi[u] = to;
                    *cur += d;
                    improved = true;
                } else {
                    alpha[from] += en.w[u];
                    alpha[to] -= en.w[u];
                }
            }
        }
        for u in 0..n {
            for v in u + 1..n {
                let (i, k) = (phi[u], phi[v]);
                if i == k {
                    continue;
                }
                alpha[i] += en.w[v] - en.w[u];
                alpha[k] += en.w[u] - en.w[v];
                if admissible(alpha, ensemble) {
                    let d1 = move_delta(en, j, q, h, phi, u, k);
                    phi[u] = k;
                    let d2 = move_delta(en, j, q, h, phi, v, i);
                    if d1 + d2 < -1e-15 {
                        phi[v] = i;
                        *cur += d1 + d2;
                        improved = true;
                        continue;
                    }
                    phi[u] = i;
                }
                alpha[i] -= en.w[v] - en.w[u];
                alpha[k] -= en.w[u] - en.w[v];
            }
        }
    }
}

/// `E_ρ(W, J) = −Σ_ij J_ij β_ij(W/ρ)`.
pub fn graphon_energy(w: &StepGraphon, j: &[f64], rho: &StepFractionalPartition) -> Result<f64> {
    let q = coupling_order(j)?;
    ensure_dim(q, rho.q())?;
    let x = fractional_quotient(w, rho)?;
    Ok(-x.pair_with(j)?)
}

/// Options for the graphon ground-state and free-energy searches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphonSearch {
    pub restarts: usize,
    pub seed: u64,
    /// Mean-field iterations per restart.
    pub iters: usize,
    /// Largest `k·q` for exact face enumeration.
    pub face_limit: usize,
}

impl GraphonSearch {
    pub fn new(seed: u64) -> Self {
        Self {
            restarts: 8,
            seed,
            iters: 400,
            face_limit: FACE_ENUMERATION_LIMIT,
        }
    }
}

/// The optimization problem in mass variables `m_μi = len_μ ρ_μi` on the
/// positive-length steps: rows sum to `len_μ`, columns to `a_i`, and
/// `E = −Σ_{μν} W_μν Σ_{ij} J_ij m_μi m_νj`.
struct MassProblem {
    k: usize,
    q: usize,
    l: Vec<f64>,
    w: Vec<f64>,
    j: Vec<f64>,
    a: Vec<f64>,
    /// Original step index of each positive-length step.
    keep: Vec<usize>,
    k_full: usize,
}

impl MassProblem {
    fn new(w: &StepGraphon, j: &[f64], a: &[f64]) -> Result<Self> {
        let q = coupling_order(j)?;
        check_simplex(a, q)?;
        let keep: Vec<usize> = (0..w.k()).filter(|&s| w.lengths()[s] > 0.0).collect();
        let r = w.without_empty_steps();
        Ok(Self {
            k: r.k(),
            q,
            l: r.lengths().to_vec(),
            w: r.values().to_vec(),
            j: j.to_vec(),
            a: a.to_vec(),
            keep,
            k_full: w.k(),
        })
    }

    fn energy(&self, m: &[f64]) -> f64 {
        let (k, q) = (self.k, self.q);
        let mut acc = 0.0;
        for mu in 0..k {
            for nu in 0..k {
                let wv = self.w[mu * k + nu];
                if wv == 0.0 {
                    continue;
                }
                for i in 0..q {
                    let x = m[mu * q + i];
                    if x == 0.0 {
                        continue;
                    }
                    for jj in 0..q {
                        acc += wv * self.j[i * q + jj] * x * m[nu * q + jj];
                    }
                }
            }
        }
        -acc
    }

    /// `∂E/∂m_μi = −2 Σ_{νj} W_μν J_ij m_νj`.
    fn gradient(&self, m: &[f64]) -> Vec<f64> {
        let (k, q) = (self.k, self.q);
        let mut g = vec![0.0; k * q];
        for mu in 0..k {
            for nu in 0..k {
                let wv = self.w[mu * k + nu];
                if wv == 0.0 {
                    continue;
                }
                for i in 0..q {
                    let mut s = 0.0;
                    for jj in 0..q {
                        s += self.j[i * q + jj] * m[nu * q + jj];
                    }
                    g[mu * q + i] -= 2.0 * wv * s;
                }
            }
        }
        g
    }

    fn hess(&self, e: usize, f: usize) -> f64 {
        let q = self.q;
        -2.0 * self.w[(e / q) * self.k + f / q] * self.j[(e % q) * q + f % q]
    }

    fn entropy(&self, m: &[f64]) -> f64 {
        let q = self.q;
        let mut h = 0.0;
        for mu in 0..self.k {
            for i in 0..q {
                h += self.l[mu] * math::xlogx_neg(m[mu * q + i] / self.l[mu]);
            }
        }
        h
    }

    fn to_partition(&self, m: &[f64]) -> StepFractionalPartition {
        let q = self.q;
        let mut weights = vec![0.0; self.k_full * q];
        let mut lengths = vec![0.0; self.k_full];
        for s in 0..self.k_full {
            // zero-length steps carry the target distribution
            weights[s * q..(s + 1) * q].copy_from_slice(&self.a);
        }
        for (mu, &s) in self.keep.iter().enumerate() {
            lengths[s] = self.l[mu];
            let row: Vec<f64> = (0..q).map(|i| (m[mu * q + i] / self.l[mu]).clamp(0.0, 1.0)).collect();
            let t: f64 = row.iter().sum();
            for i in 0..q {
                weights[s * q + i] = row[i] / t;
            }
        }
        let total: f64 = lengths.iter().sum();
        lengths.iter_mut().for_each(|x| *x /= total);
        StepFractionalPartition::new(lengths, weights, q).expect("rows are stochastic")
    }

    /// North-west corner vertex of the transport polytope for the given row
    /// and column orders.
    fn corner(&self, rows: &[usize], cols: &[usize]) -> Vec<f64> {
        let q = self.q;
        let mut m = vec![0.0; self.k * q];
        let mut r = self.l.clone();
        let mut c = self.a.clone();
        let (mut x, mut y) = (0, 0);
        while x < rows.len() && y < cols.len() {
            let (mu, i) = (rows[x], cols[y]);
            let t = r[mu].min(c[i]);
            m[mu * q + i] += t;
            r[mu] -= t;
            c[i] -= t;
            if r[mu] <= c[i] {
                x += 1;
            } else {
                y += 1;
            }
        }
        m
    }

    fn uniform(&self) -> Vec<f64> {
        let q = self.q;
        (0..self.k * q).map(|e| self.l[e / q] * self.a[e % q]).collect()
    }

    fn random_corner(&self, g: &mut StreamRng) -> Vec<f64> {
        let mut rows: Vec<usize> = (0..self.k).collect();
        let mut cols: Vec<usize> = (0..self.q).collect();
        for i in (1..rows.len()).rev() {
            rows.swap(i, rng::index(g, i + 1));
        }
        for i in (1..cols.len()).rev() {
            cols.swap(i, rng::index(g, i + 1));
        }
        self.corner(&rows, &cols)
    }

    /// Constant value of `W` on positive-length steps, if any.
    fn constant_value(&self) -> Option<f64> {
        let c = self.w[0];
        self.w.iter().all(|&v| v == c).then_some(c)
    }

    fn closed_form_energy(&self) -> Option<f64> {
        if self.j.iter().all(|&x| x == 0.0) {
            return Some(0.0);
        }
        let c = self.constant_value()?;
        let q = self.q;
        let mut s = 0.0;
        for i in 0..q {
            for jj in 0..q {
                s += self.j[i * q + jj] * self.a[i] * self.a[jj];
            }
        }
        Some(-c * s)
    }
}

/// `E_a(W, J) = inf { E_ρ(W, J) : α(ρ) = a }` over step-constant `ρ`.
///
/// Closed forms cover `J = 0` and constant `W`. For `k·q ≤ face_limit` the
/// exact minimum is found by solving the stationarity system on every face
/// of the transport polytope (the minimizer with smallest support is the
/// unique stationary point of its face). Larger instances run pairwise mass
/// exchanges from `restarts` seeded starts and report an upper bound.
pub fn graphon_gse(
    w: &StepGraphon,
    j: &[f64],
    a: &[f64],
    opts: &GraphonSearch,
) -> Result<EnergyResult> {
    let p = MassProblem::new(w, j, a)?;
    if let Some(value) = p.closed_form_energy() {
        return Ok(EnergyResult {
            value,
            optimizer: Optimizer::Fractional(p.to_partition(&p.uniform())),
            exact: true,
            method: EnergyMethod::ClosedForm,
            resolution: 0.0,
        });
    }
    if p.k * p.q <= opts.face_limit.min(24) {
        if let Some(m) = face_enumeration(&p) {
            return Ok(EnergyResult {
                value: p.energy(&m),
                optimizer: Optimizer::Fractional(p.to_partition(&m)),
                exact: true,
                method: EnergyMethod::FaceEnumeration,
                resolution: 1e-9,
            });
        }
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    for r in 0..opts.restarts.max(1) {
        let mut m = if r == 0 {
            p.uniform()
        } else {
            let mut g = rng::stream(opts.seed, r as u64);
            p.random_corner(&mut g)
        };
        exchange_descent(&p, &mut m);
        let e = p.energy(&m);
        if best.as_ref().is_none_or(|(b, _)| e < *b) {
            best = Some((e, m));
        }
    }
    let (value, m) = best.expect("at least one restart");
    Ok(EnergyResult {
        value,
        optimizer: Optimizer::Fractional(p.to_partition(&m)),
        exact: false,
        method: EnergyMethod::ExchangeDescent,
        resolution: f64::INFINITY,
    })
}

fn face_enumeration(p: &MassProblem) -> Option<Vec<f64>> {
    let (k, q) = (p.k, p.q);
    let total = k * q;
    let mut best: Option<(f64, Vec<f64>)> = None;
    'pattern: for mask in 1u32..(1u32 << total) {
        let support: Vec<usize> = (0..total).filter(|&e| mask >> e & 1 == 1).collect();
        for mu in 0..k {
            if !(0..q).any(|i| mask >> (mu * q + i) & 1 == 1) {
                continue 'pattern;
            }
        }
        for i in 0..q {
            let used = (0..k).any(|mu| mask >> (mu * q + i) & 1 == 1);
            if used != (p.a[i] > 0.0) {
                continue 'pattern;
            }
        }
        let s = support.len();
        let rows = k + q;
        let mut a = vec![0.0; rows * s];
        let mut b = vec![0.0; rows];
        for (c, &e) in support.iter().enumerate() {
            a[(e / q) * s + c] = 1.0;
            a[(k + e % q) * s + c] = 1.0;
        }
        b[..k].copy_from_slice(&p.l);
        b[k..].copy_from_slice(&p.a);
        let Some((x0, basis)) = linalg::affine_solutions(a, b, rows, s) else {
            continue;
        };
        let d = basis.len();
        let x = if d == 0 {
            x0
        } else {
            // H_S N and the reduced system Nᵀ H_S N z = −Nᵀ H_S x0
            let hn: Vec<Vec<f64>> = basis
                .iter()
                .map(|v| {
                    (0..s)
                        .map(|r| (0..s).map(|c| p.hess(support[r], support[c]) * v[c]).sum())
                        .collect()
                })
                .collect();
            let mut mm = vec![0.0; d * d];
            let mut rhs = vec![0.0; d];
            for (x, nx) in basis.iter().enumerate() {
                for (y, hy) in hn.iter().enumerate() {
                    mm[x * d + y] = nx.iter().zip(hy).map(|(u, v)| u * v).sum();
                }
                let hx0: f64 = (0..s)
                    .map(|r| {
                        nx[r] * (0..s).map(|c| p.hess(support[r], support[c]) * x0[c]).sum::<f64>()
                    })
                    .sum();
                rhs[x] = -hx0;
            }
            let Some(z) = linalg::solve(mm, rhs, d) else {
                continue;
            };
            (0..s)
                .map(|c| x0[c] + basis.iter().zip(&z).map(|(v, zz)| v[c] * zz).sum::<f64>())
                .collect()
        };
        if x.iter().any(|&v| v < -1e-10) {
            continue;
        }
        let mut m = vec![0.0; total];
        for (c, &e) in support.iter().enumerate() {
            m[e] = x[c].max(0.0);
        }
        let e = p.energy(&m);
        if best.as_ref().is_none_or(|(b, _)| e < *b) {
            best = Some((e, m));
        }
    }
    best.map(|(_, m)| m)
}

/// Pairwise exchanges `m_μi += t, m_μj −= t, m_νi −= t, m_νj += t`, each
/// minimized exactly over its feasible interval, until none improves.
fn exchange_descent(p: &MassProblem, m: &mut [f64]) {
    let (k, q) = (p.k, p.q);
    for _ in 0..2000 {
        let mut improved = false;
        let mut g = p.gradient(m);
        for mu in 0..k {
            for nu in mu + 1..k {
                for i in 0..q {
                    for jj in i + 1..q {
                        let e = [mu * q + i, mu * q + jj, nu * q + i, nu * q + jj];
                        let d = [1.0, -1.0, -1.0, 1.0];
                        let slope: f64 = (0..4).map(|x| d[x] * g[e[x]]).sum();
                        let mut curv = 0.0;
                        for x in 0..4 {
                            for y in 0..4 {
                                curv += d[x] * d[y] * p.hess(e[x], e[y]);
                            }
                        }
                        let lo = -(m[e[0]].min(m[e[3]]));
                        let hi = m[e[1]].min(m[e[2]]);
                        if hi - lo <= 0.0 {
                            continue;
                        }
                        let phi = |t: f64| slope * t + 0.5 * curv * t * t;
                        let mut t = if phi(lo) < phi(hi) { lo } else { hi };
                        if curv > 0.0 {
                            let v = (-slope / curv).clamp(lo, hi);
                            if phi(v) < phi(t) {
                                t = v;
                            }
                        }
                        if phi(t) < -1e-15 {
                            for x in 0..4 {
                                m[e[x]] = (m[e[x]] + d[x] * t).max(0.0);
                            }
                            improved = true;
                            g = p.gradient(m);
                        }
                    }
                }
            }
        }
        if !improved {
            break;
        }
    }
}

/// `F_a(W, J) = inf { E_ρ(W, J) − Ent(ρ) : α(ρ) = a }` over step-constant `ρ`.
///
/// Closed forms: `−H(a)` when `J = 0` or `W = 0`, and
/// `−c Σ J_ij a_i a_j − H(a)` for constant `W = c`. Otherwise damped
/// mean-field iteration `ρ_μi ∝ exp(2φ_μi + λ_i)` with the dual `λ` fitted
/// color by color through bisection; the best feasible value is an upper
/// bound.
pub fn graphon_free_energy(
    w: &StepGraphon,
    j: &[f64],
    a: &[f64],
    opts: &GraphonSearch,
) -> Result<EnergyResult> {
    let p = MassProblem::new(w, j, a)?;
    let ha = math::shannon(a);
    if let Some(e) = p.closed_form_energy() {
        return Ok(EnergyResult {
            value: e - ha,
            optimizer: Optimizer::Fractional(p.to_partition(&p.uniform())),
            exact: true,
            method: EnergyMethod::ClosedForm,
            resolution: 0.0,
        });
    }
    if p.w.iter().all(|&v| v == 0.0) {
        return Ok(EnergyResult {
            value: -ha,
            optimizer: Optimizer::Fractional(p.to_partition(&p.uniform())),
            exact: true,
            method: EnergyMethod::ClosedForm,
            resolution: 0.0,
        });
    }
    let objective = |m: &[f64]| p.energy(m) - p.entropy(m);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for r in 0..opts.restarts.max(1) {
        let mut m = p.uniform();
        if r > 0 {
            let mut g = rng::stream(opts.seed, r as u64);
            let c = p.random_corner(&mut g);
            let theta = rng::unit(&mut g);
            m.iter_mut().zip(&c).for_each(|(x, y)| *x = (1.0 - theta) * *x + theta * y);
        }
        let mut cur = objective(&m);
        let mut keep = (cur, m.clone());
        for _ in 0..opts.iters {
            let target = mean_field_target(&p, &m);
            let damping = 0.5;
            m.iter_mut()
                .zip(&target)
                .for_each(|(x, y)| *x = (1.0 - damping) * *x + damping * y);
            let v = objective(&m);
            if v < keep.0 {
                keep = (v, m.clone());
            }
            if (cur - v).abs() < 1e-15 {
                break;
            }
            cur = v;
        }
        if best.as_ref().is_none_or(|(b, _)| keep.0 < *b) {
            best = Some(keep);
        }
    }
    let (value, m) = best.expect("at least one restart");
    Ok(EnergyResult {
        value,
        optimizer: Optimizer::Fractional(p.to_partition(&m)),
        exact: false,
        method: EnergyMethod::MeanField,
        resolution: f64::INFINITY,
    })
}

/// Mass matrix of `ρ_μi ∝ K_μi e^{λ_i}` with `K = exp(−∂E/∂m)` and `λ` such
/// that the column sums equal `a` to `1e-10`.
fn mean_field_target(p: &MassProblem, m: &[f64]) -> Vec<f64> {
    let (k, q) = (p.k, p.q);
    let g = p.gradient(m);
    let mut kern = vec![0.0; k * q];
    for mu in 0..k {
        let row = &g[mu * q..(mu + 1) * q];
        let top = (0..q)
            .filter(|&i| p.a[i] > 0.0)
            .map(|i| -row[i])
            .fold(f64::NEG_INFINITY, f64::max);
        for i in 0..q {
            if p.a[i] > 0.0 {
                kern[mu * q + i] = math::exp(-row[i] - top);
            }
        }
    }
    let mut lambda = vec![0.0; q];
    let masses = |lambda: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; k * q];
        for mu in 0..k {
            let top = (0..q)
                .filter(|&i| kern[mu * q + i] > 0.0)
                .map(|i| lambda[i])
                .fold(f64::NEG_INFINITY, f64::max);
            let mut z = 0.0;
            for i in 0..q {
                let v = kern[mu * q + i] * math::exp(lambda[i] - top);
                out[mu * q + i] = v;
                z += v;
            }
            for i in 0..q {
                out[mu * q + i] *= p.l[mu] / z;
            }
        }
        out
    };
    let column = |mm: &[f64], i: usize| (0..k).map(|mu| mm[mu * q + i]).sum::<f64>();
    for _ in 0..5000 {
        let mm = masses(&lambda);
        let resid = (0..q).map(|i| (column(&mm, i) - p.a[i]).abs()).fold(0.0, f64::max);
        if resid <= 1e-10 {
            return mm;
        }
        for i in (0..q).filter(|&i| p.a[i] > 0.0) {
            let f = |x: f64, lambda: &mut Vec<f64>| {
                lambda[i] = x;
                column(&masses(lambda), i) - p.a[i]
            };
            let (mut lo, mut hi) = (lambda[i] - 1.0, lambda[i] + 1.0);
            while f(lo, &mut lambda) > 0.0 && lo > -1e3 {
                lo -= 2.0 * (hi - lo);
            }
            while f(hi, &mut lambda) < 0.0 && hi < 1e3 {
                hi += 2.0 * (hi - lo);
            }
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if f(mid, &mut lambda) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo < 1e-14 * (1.0 + mid.abs()) {
                    break;
                }
            }
            lambda[i] = 0.5 * (lo + hi);
        }
    }
    masses(&lambda)
}
