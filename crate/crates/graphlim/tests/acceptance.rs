//! Acceptance criteria: one PASS/FAIL line each, nonzero exit on any FAIL.

use std::time::{Duration, Instant};

use graphlim_core::distance::{cut_distance, CutDistanceOptions};
use graphlim_core::graph::{enumerate_quotients, maxcut, Quotient, VertexPartition, WeightedGraph};
use graphlim_core::graphon::{difference, StepGraphon};
use graphlim_core::ld::{quotient_ball_probability, BallMethod};
use graphlim_core::models;
use graphlim_core::quotient::{entropy, fractional_quotient, StepFractionalPartition};
use graphlim_core::rearrangement::{inner_product, rearranged_inner_product};
use graphlim_core::regularity::{regularize, weak_regularity_partition, WeakRegularityOptions};
use graphlim_core::rng::{self, StreamRng as Rng};
use graphlim_core::statphys::{
    config_energy, free_energy, graphon_gse, ground_state_energy, microcanonical_free_energy, microcanonical_gse,
    CouplingModel, GraphonSearch, GseMethod,
};

const BUDGET: u128 = 1 << 22;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn uniform(g: &mut Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng::unit(g)
}

fn symmetric(g: &mut Rng, k: usize, lo: f64, hi: f64) -> Vec<f64> {
    let mut m = vec![0.0; k * k];
    for a in 0..k {
        for b in a..k {
            let x = uniform(g, lo, hi);
            m[a * k + b] = x;
            m[b * k + a] = x;
        }
    }
    m
}

fn random_graph(g: &mut Rng, n: usize) -> WeightedGraph {
    let alpha: Vec<f64> = (0..n).map(|_| uniform(g, 0.2, 2.0)).collect();
    let mut beta = symmetric(g, n, -1.0, 1.0);
    for x in 0..n {
        beta[x * n + x] = 0.0;
    }
    WeightedGraph::new(alpha, beta).unwrap()
}

fn random_lengths(g: &mut Rng, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| uniform(g, 0.05, 1.0)).collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|x| x / s).collect()
}

fn random_rho(g: &mut Rng, lengths: &[f64], q: usize) -> StepFractionalPartition {
    let weights: Vec<f64> = lengths.iter().flat_map(|_| rng::simplex_point(g, q)).collect();
    StepFractionalPartition::new(lengths.to_vec(), weights, q).unwrap()
}

fn for_each_map(n: usize, q: usize, mut f: impl FnMut(&[usize])) {
    let mut a = vec![0; n];
    loop {
        f(&a);
        let mut i = 0;
        while i < n {
            a[i] += 1;
            if a[i] < q {
                break;
            }
            a[i] = 0;
            i += 1;
        }
        if i == n {
            return;
        }
    }
}

fn c1_energy_quotient_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut maps = 0usize;
    for t in 0..200u64 {
        let mut g = rng::stream(101, t);
        let n = 1 + rng::index(&mut g, 8);
        let q = 1 + rng::index(&mut g, 3);
        let graph = random_graph(&mut g, n);
        let j = symmetric(&mut g, q, -2.0, 2.0);
        for_each_map(n, q, |a| {
            let p = VertexPartition::new(a.to_vec(), q).unwrap();
            let e = config_energy(&graph, &j, &p).unwrap();
            let pair = graph.quotient(&p).unwrap().pair_with(&j).unwrap();
            worst = worst.max((e + pair).abs());
            maps += 1;
        });
    }
    outcome(worst <= 1e-12, format!("max |E_phi + <beta, J>| = {worst:.3e} over {maps} maps"))
}

fn brute_maxcut(n: usize, edges: &[(usize, usize)]) -> usize {
    (0u32..1 << n)
        .map(|s| edges.iter().filter(|&&(u, v)| ((s >> u) ^ (s >> v)) & 1 == 1).count())
        .max()
        .unwrap_or(0)
}

fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for &(u, v) in edges {
            let y = if u == x { v } else if v == x { u } else { continue };
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Every isomorphism class has a labelling with non-increasing degrees, so
/// only those labelled graphs are checked.
fn c2_maxcut_identity() -> Outcome {
    let mut checked = 0usize;
    let mut mismatches = 0usize;
    for n in 1..=7usize {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        for mask in 0u32..1 << pairs.len() {
            let edges: Vec<(usize, usize)> =
                pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
            let mut deg = vec![0; n];
            for &(u, v) in &edges {
                deg[u] += 1;
                deg[v] += 1;
            }
            if deg.windows(2).any(|w| w[0] < w[1]) || !connected(n, &edges) {
                continue;
            }
            let g = WeightedGraph::simple(n, &edges).unwrap();
            if maxcut(&g).unwrap() != brute_maxcut(n, &edges) as f64 {
                mismatches += 1;
            }
            checked += 1;
        }
    }
    outcome(mismatches == 0, format!("{checked} connected graphs, {mismatches} mismatches"))
}

fn c3_sandwiches() -> Outcome {
    let mut worst = f64::INFINITY;
    let mut skipped = 0;
    for t in 0..100u64 {
        let mut g = rng::stream(303, t);
        let n = 2 + rng::index(&mut g, 9);
        let q = 1 + rng::index(&mut g, 3);
        let graph = random_graph(&mut g, n);
        let j = symmetric(&mut g, q, -2.0, 2.0);
        let h: Vec<f64> = (0..q).map(|_| uniform(&mut g, -1.0, 1.0)).collect();
        let lq = (q as f64).ln();
        let f = free_energy(&graph, &j, &h, BUDGET).unwrap().value;
        let e = ground_state_energy(&graph, &j, &h, GseMethod::Exact { budget: BUDGET }).unwrap().value;
        worst = worst.min(e - f).min(f + lq - e);
        let model = CouplingModel::microcanonical(j, vec![1.0 / q as f64; q], 0.5).unwrap();
        match (
            microcanonical_free_energy(&graph, &model, BUDGET),
            microcanonical_gse(&graph, &model, GseMethod::Exact { budget: BUDGET }),
        ) {
            (Ok(fm), Ok(em)) => worst = worst.min(em.value - fm.value).min(fm.value + lq - em.value),
            _ => skipped += 1,
        }
    }
    outcome(worst >= -1e-9, format!("min slack {worst:.3e}, {skipped} infeasible ensembles"))
}

fn c4_k2_closed_values() -> Outcome {
    let g = WeightedGraph::simple(2, &[(0, 1)]).unwrap();
    let m = CouplingModel::microcanonical(vec![0.0, 1.0, 1.0, 0.0], vec![0.5, 0.5], 0.5).unwrap();
    let gse = microcanonical_gse(&g, &m, GseMethod::Exact { budget: 4 }).unwrap().value;
    let f = microcanonical_free_energy(&g, &m, 4).unwrap().value;
    let oracle = -0.5 * (2.0 * std::f64::consts::E.powi(2) + 2.0).ln();
    outcome(
        (gse + 1.0).abs() <= 1e-9 && (f - oracle).abs() <= 1e-9,
        format!("gse {gse:.12}, free energy {f:.12} (closed form {oracle:.12})"),
    )
}

fn c5_quotient_lipschitz() -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    for t in 0..500u64 {
        let mut g = rng::stream(505, t);
        let k = 1 + rng::index(&mut g, 6);
        let q = 1 + rng::index(&mut g, 3);
        let lengths = random_lengths(&mut g, k);
        let u = StepGraphon::new(lengths.clone(), symmetric(&mut g, k, -1.0, 1.0)).unwrap();
        let w = StepGraphon::new(lengths.clone(), symmetric(&mut g, k, -1.0, 1.0)).unwrap();
        let rho = random_rho(&mut g, &lengths, q);
        let d1 = fractional_quotient(&u, &rho).unwrap().d1(&fractional_quotient(&w, &rho).unwrap()).unwrap();
        let cut = difference(&u, &w).cut_norm_exact(6).unwrap();
        worst = worst.max(d1 - (q * q) as f64 * cut);
    }
    outcome(worst <= 1e-10, format!("max d1 - q^2 cut = {worst:.3e}"))
}

fn c6_gse_continuity() -> Outcome {
    let search = GraphonSearch::new(6);
    let opts = CutDistanceOptions::with_budget(720, 6);
    let mut worst = f64::NEG_INFINITY;
    let mut certified = 0;
    for t in 0..200u64 {
        let mut g = rng::stream(606, t);
        let k = 1 + rng::index(&mut g, 3);
        let u = StepGraphon::new(random_lengths(&mut g, k), symmetric(&mut g, k, 0.0, 2.0)).unwrap();
        let k2 = 1 + rng::index(&mut g, 3);
        let w = StepGraphon::new(random_lengths(&mut g, k2), symmetric(&mut g, k2, 0.0, 2.0)).unwrap();
        let j = symmetric(&mut g, 2, -1.0, 1.0);
        let x = uniform(&mut g, 0.1, 0.9);
        let a = [x, 1.0 - x];
        let eu = graphon_gse(&u, &j, &a, &search).unwrap();
        let ew = graphon_gse(&w, &j, &a, &search).unwrap();
        if !(eu.exact && ew.exact) {
            continue;
        }
        certified += 1;
        let j1: f64 = j.iter().map(|v| v.abs()).sum();
        let delta = cut_distance(&u, &w, &opts).upper;
        worst = worst.max((eu.value - ew.value).abs() - j1 * delta - eu.resolution - ew.resolution);
    }
    outcome(
        certified > 0 && worst <= 0.0,
        format!("{certified} certified pairs, max excess {worst:.3e}"),
    )
}

fn f_tilde(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * (1.0 - x.ln())
    }
}

fn c7_entropy_continuity() -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    for t in 0..1000u64 {
        let mut g = rng::stream(707, t);
        let k = 1 + rng::index(&mut g, 5);
        let q = 2 + rng::index(&mut g, 3);
        let lengths = random_lengths(&mut g, k);
        let r1 = random_rho(&mut g, &lengths, q);
        // half the pairs are small perturbations, where the bound is tight
        let r2 = if t % 2 == 0 {
            random_rho(&mut g, &lengths, q)
        } else {
            let s = uniform(&mut g, 0.0, 0.05);
            let other = random_rho(&mut g, &lengths, q);
            let mixed: Vec<f64> = r1.weights().iter().zip(other.weights()).map(|(a, b)| (1.0 - s) * a + s * b).collect();
            StepFractionalPartition::new(lengths.clone(), mixed, q).unwrap()
        };
        let d = r1.d1(&r2).unwrap();
        let qf = q as f64;
        worst = worst.max((entropy(&r1) - entropy(&r2)).abs() - qf * f_tilde(d / qf));
    }
    outcome(worst <= 1e-12, format!("max excess {worst:.3e}"))
}

fn c8_rearrangement() -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    for t in 0..1000u64 {
        let mut g = rng::stream(808, t);
        let k = 1 + rng::index(&mut g, 6);
        let k2 = 1 + rng::index(&mut g, 6);
        let w = StepGraphon::new(random_lengths(&mut g, k), symmetric(&mut g, k, -1.0, 1.0)).unwrap();
        let y = StepGraphon::new(random_lengths(&mut g, k2), symmetric(&mut g, k2, -1.0, 1.0)).unwrap();
        worst = worst.max(inner_product(&w, &y) - rearranged_inner_product(&w, &y));
    }
    let mut gap: f64 = 0.0;
    for t in 0..200u64 {
        let mut g = rng::stream(809, t);
        let k = 1 + rng::index(&mut g, 6);
        let lengths = random_lengths(&mut g, k);
        let values = symmetric(&mut g, k, -1.0, 1.0);
        // an increasing function of W is aligned with W
        let image: Vec<f64> = values.iter().map(|x| 2.0 * x + x * x * x).collect();
        let w = StepGraphon::new(lengths.clone(), values).unwrap();
        let y = StepGraphon::new(lengths, image).unwrap();
        gap = gap.max((inner_product(&w, &y) - rearranged_inner_product(&w, &y)).abs());
    }
    outcome(
        worst <= 1e-12 && gap <= 1e-12,
        format!("max E[WY] - E[W*Y*] = {worst:.3e}, aligned gap {gap:.3e}"),
    )
}

fn c9_er_convergence() -> Outcome {
    let one = StepGraphon::constant(1.0);
    let mut good = 0;
    let mut lines = Vec::new();
    for seed in 0..5u64 {
        let mut seq = Vec::new();
        for n in [100, 400, 1600] {
            let g = models::erdos_renyi(n, 0.2, seed).unwrap();
            let mut opts = WeakRegularityOptions::new(seed);
            opts.class_cap = 16;
            let r = regularize(&g, 0.3, 16, &opts).unwrap();
            seq.push(difference(&r.graphon, &one).cut_norm_exact(16).unwrap());
        }
        if seq.windows(2).all(|w| w[1] <= w[0]) && seq[2] < 0.15 {
            good += 1;
        }
        lines.push(format!("[{:.3} {:.3} {:.3}]", seq[0], seq[1], seq[2]));
    }
    outcome(good >= 4, format!("{good}/5 seeds decreasing and < 0.15: {}", lines.join(" ")))
}

fn c10_clique_rate() -> Outcome {
    let (n, c) = (2000, 45);
    let g = models::clique_plus_isolated(n, c).unwrap();
    let target = models::clique_split_target(n, c, 500, 11).unwrap();
    let classes = models::clique_split(n, c, c, c).unwrap();
    let r = quotient_ball_probability(&g, 2, &target, 0.01, &BallMethod::Multinomial { classes, budget: 1 << 40 }).unwrap();
    let limit = 2f64.ln() + 0.25 * 0.25f64.ln() + 0.75 * 0.75f64.ln();
    outcome(
        (r.value - limit).abs() <= 0.02,
        format!("rate {:.5} vs log 2 - H(1/4,3/4) = {limit:.5} ({})", r.value, r.method.tag()),
    )
}

fn c11_counterexamples() -> Outcome {
    let mut worst: f64 = 0.0;
    for t in 0..30u64 {
        let mut g = rng::stream(1111, t);
        let n = 1 + rng::index(&mut g, 5);
        let q = 1 + rng::index(&mut g, 2);
        let graph = random_graph(&mut g, n);
        let j = symmetric(&mut g, q, -2.0, 2.0);
        let h: Vec<f64> = (0..q).map(|_| uniform(&mut g, -1.0, 1.0)).collect();
        let one = free_energy(&graph, &j, &h, BUDGET).unwrap().value;
        let two = free_energy(&graph.disjoint_union(&graph), &j, &h, BUDGET).unwrap().value;
        worst = worst.max((one - two).abs());
    }
    let c4 = models::cycle_union(4, 1).unwrap();
    let c6 = models::cycle_union(6, 1).unwrap();
    let fixtures: [[f64; 4]; 3] = [[1.0, 0.0, 0.0, 1.0], [0.0, 1.0, 1.0, 0.0], [2.0, -1.0, -1.0, 2.0]];
    let gaps: Vec<f64> = fixtures
        .iter()
        .map(|j| {
            let h = [0.0, 0.0];
            (free_energy(&c4, j, &h, BUDGET).unwrap().value - free_energy(&c6, j, &h, BUDGET).unwrap().value).abs()
        })
        .collect();
    let best = gaps.iter().cloned().fold(0.0, f64::max);
    outcome(
        worst <= 1e-9 && best > 1e-3,
        format!("union gap {worst:.3e}; |F(C4) - F(C6)| = {gaps:.4?}"),
    )
}

fn c12_weak_regularity() -> Outcome {
    let mut ok = 0;
    let mut worst: f64 = 0.0;
    for seed in 0..5u64 {
        let g = models::erdos_renyi(400, 0.1, seed).unwrap();
        let w = weak_regularity_partition(&g, 0.3, 4, &WeakRegularityOptions::new(seed)).unwrap();
        let l1 = g.norm(1.0).unwrap();
        worst = worst.max(w.lower / l1);
        if w.lower <= 0.3 * l1 {
            ok += 1;
        }
    }
    outcome(ok == 5, format!("{ok}/5 seeds, max lower/||G||_1 = {worst:.4}"))
}

fn c13_oracle_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    for t in 0..60u64 {
        let mut g = rng::stream(1313, t);
        let b = 1 + rng::index(&mut g, 3);
        let sizes: Vec<usize> = (0..b).map(|_| 1 + rng::index(&mut g, 4)).collect();
        let blocks: Vec<usize> = sizes.iter().enumerate().flat_map(|(i, &s)| std::iter::repeat_n(i, s)).collect();
        let n = blocks.len();
        let vals = symmetric(&mut g, b, 0.0, 1.0);
        let mut m = vec![0.0; n * n];
        for u in 0..n {
            for v in 0..n {
                if u != v {
                    m[u * n + v] = vals[blocks[u] * b + blocks[v]];
                }
            }
        }
        let graph = WeightedGraph::new(vec![1.0; n], m).unwrap();
        let phi: Vec<usize> = (0..n).map(|_| rng::index(&mut g, 2)).collect();
        let target = graph.quotient(&VertexPartition::new(phi, 2).unwrap()).unwrap();
        let eps = uniform(&mut g, 0.02, 0.5);
        let classes = VertexPartition::new(blocks, b).unwrap();
        let e = quotient_ball_probability(&graph, 2, &target, eps, &BallMethod::Enumeration { budget: BUDGET }).unwrap();
        let m = quotient_ball_probability(&graph, 2, &target, eps, &BallMethod::Multinomial { classes, budget: BUDGET }).unwrap();
        worst = worst.max((e.probability - m.probability).abs());
    }
    let corpus = vec![
        WeightedGraph::simple(2, &[(0, 1)]).unwrap(),
        models::cycle_union(4, 1).unwrap(),
        models::cycle_union(5, 1).unwrap(),
        models::cycle_union(6, 1).unwrap(),
        models::cycle_union(3, 2).unwrap(),
        models::clique_plus_isolated(6, 3).unwrap(),
        models::erdos_renyi(6, 0.5, 1).unwrap(),
        models::power_law(6, 0.5, 0.3, 1).unwrap(),
        models::sbm(6, &[1.8, 0.2, 0.2, 1.8], 0.5, 1).unwrap(),
        random_graph(&mut rng::stream(1314, 0), 6),
    ];
    let mut mismatched = 0;
    for g in &corpus {
        for q in 1..=3 {
            let mut keys: Vec<Vec<i64>> = enumerate_quotients(g, q, BUDGET).unwrap().iter().map(Quotient::dedup_key).collect();
            keys.sort();
            let mut direct = Vec::new();
            for_each_map(g.n(), q, |a| {
                direct.push(g.quotient(&VertexPartition::new(a.to_vec(), q).unwrap()).unwrap().dedup_key());
            });
            direct.sort();
            direct.dedup();
            if keys != direct {
                mismatched += 1;
            }
        }
    }
    outcome(
        worst <= 1e-12 && mismatched == 0,
        format!("max |P_multinomial - P_enumeration| = {worst:.3e}; {mismatched} quotient-set mismatches"),
    )
}

type Criterion = (u32, &'static str, fn() -> Outcome, Duration);

fn main() {
    let criteria: [Criterion; 13] = [
        (1, "energy-quotient identity", c1_energy_quotient_identity, Duration::from_secs(10)),
        (2, "maxcut identity", c2_maxcut_identity, Duration::from_secs(60)),
        (3, "sandwich inequalities", c3_sandwiches, Duration::MAX),
        (4, "K2 closed values", c4_k2_closed_values, Duration::MAX),
        (5, "quotient-map Lipschitz bound", c5_quotient_lipschitz, Duration::MAX),
        (6, "GSE cut-metric continuity", c6_gse_continuity, Duration::MAX),
        (7, "entropy continuity", c7_entropy_continuity, Duration::MAX),
        (8, "rearrangement inequality", c8_rearrangement, Duration::from_secs(30)),
        (9, "ER convergence diagnostic", c9_er_convergence, Duration::from_secs(300)),
        (10, "clique LD rate", c10_clique_rate, Duration::from_secs(60)),
        (11, "counterexample fixtures", c11_counterexamples, Duration::MAX),
        (12, "weak-regularity contract", c12_weak_regularity, Duration::from_secs(120)),
        (13, "oracle equivalence", c13_oracle_equivalence, Duration::MAX),
    ];
    let mut failed = 0;
    for (id, name, check, limit) in criteria {
        let start = Instant::now();
        let o = check();
        let took = start.elapsed();
        let pass = o.pass && took <= limit;
        if !pass {
            failed += 1;
        }
        let budget = if limit == Duration::MAX { String::new() } else { format!(" / {}s", limit.as_secs()) };
        println!(
            "{} {id:>2} {name}: {} [{:.2}s{budget}]",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            took.as_secs_f64()
        );
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
