//! Command-line front end: argument types and one runner per subcommand.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use graphlim_core::distance::{cut_distance, CutDistanceOptions, DistanceBound};
use graphlim_core::graph::{enumerate_quotients, Quotient, VertexPartition, WeightedGraph};
use graphlim_core::graphon::StepGraphon;
use graphlim_core::ld::{graphon_rate, quotient_ball_probability, BallMethod, GraphonRateOptions, RateEstimate};
use graphlim_core::models::{Family, GeneratorSpec};
use graphlim_core::quotient::{
    fractional_quotient, hausdorff, sample_quotient_set, NetMeta, QuotientSet, StepFractionalPartition,
};
use graphlim_core::regularity::{
    self, RegularityReport, SearchBudget, Verdict, WeakRegularity, WeakRegularityOptions, Witness,
};
use graphlim_core::statphys::{
    self, AnnealSchedule, EnergyResult, GraphonSearch, GseMethod, Optimizer,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{usage, CliError, CliResult};
use crate::io::{self, num, nums, GeneratorFile, GraphFile, GraphonFile, Input, ModelFile, QuotientFile, QuotientSetFile};
use crate::report::{envelope, Cell, Table};

#[derive(Debug, Parser, Serialize)]
#[command(name = "graphlim", version, about = "Graph-limit diagnostics: distances, quotients, energies, large deviations, regularity")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Sample a graph from a generator family.
    Generate(GenerateArgs),
    /// Bounds on the normalized cut distance between two inputs.
    Distance(DistanceArgs),
    /// Quotient sets and their Hausdorff distance.
    Quotients(QuotientsArgs),
    /// Ground-state and free energies.
    Energy(EnergyArgs),
    /// Quotient-ball probabilities and rates.
    Ld(LdArgs),
    /// Regularity checks, weak-regularity partitions and regularized graphons.
    Regularity(RegularityArgs),
    /// Diagnostics along a size ladder of one generator family.
    ConvergenceReport(ConvergenceArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Generate(_) => "generate",
            Self::Distance(_) => "distance",
            Self::Quotients(_) => "quotients",
            Self::Energy(_) => "energy",
            Self::Ld(_) => "ld",
            Self::Regularity(_) => "regularity",
            Self::ConvergenceReport(_) => "convergence-report",
        }
    }

    fn output(&self) -> &Output {
        match self {
            Self::Generate(a) => &a.out,
            Self::Distance(a) => &a.out,
            Self::Quotients(a) => &a.out,
            Self::Energy(a) => &a.out,
            Self::Ld(a) => &a.out,
            Self::Regularity(a) => &a.out,
            Self::ConvergenceReport(a) => &a.out,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args, Serialize)]
pub struct Output {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file (directory for convergence-report); stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args, Serialize, Default)]
pub struct FamilyArgs {
    /// er, sbm, power-law, w-random, clique, cycles.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Clique size.
    #[arg(long)]
    pub c: Option<usize>,
    /// Cycle length.
    #[arg(long)]
    pub len: Option<usize>,
    #[arg(long)]
    pub copies: Option<usize>,
    /// Block matrix rows separated by ';', entries by ','.
    #[arg(long)]
    pub blocks: Option<String>,
    /// Graphon JSON for w-random.
    #[arg(long)]
    pub graphon: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct GenerateArgs {
    /// Generator JSON; overrides the family flags.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[command(flatten)]
    pub family: FamilyArgs,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct DistanceArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub input2: PathBuf,
    /// Permutations tried by the alignment search.
    #[arg(long, default_value_t = 720)]
    pub budget: usize,
    /// Points per quotient net in the lower bound.
    #[arg(long, default_value_t = 20000)]
    pub samples: usize,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct QuotientsArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub input2: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub q: usize,
    /// Largest number of maps enumerated for a graph input.
    #[arg(long, default_value_t = 1 << 20)]
    pub budget: u64,
    /// Random fractional partitions for graphon inputs.
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
    /// Simplex grid mesh for graphon inputs (certified covering radius).
    #[arg(long)]
    pub mesh: Option<f64>,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct EnergyArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    /// Force exhaustive enumeration (fails with exit code 3 past the budget).
    #[arg(long, conflicts_with = "anneal")]
    pub exact: bool,
    /// Force simulated annealing for ground states.
    #[arg(long)]
    pub anneal: bool,
    #[arg(long, default_value_t = 1 << 22)]
    pub budget: u64,
    /// Annealing sweeps per restart.
    #[arg(long, default_value_t = 1500)]
    pub sweeps: usize,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LdMethod {
    Auto,
    Enumeration,
    Multinomial,
    MonteCarlo,
}

#[derive(Debug, Args, Serialize)]
pub struct LdArgs {
    /// Graph or graphon files; one output row each.
    #[arg(long, required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,
    /// Target quotient JSON `{"alpha", "beta"}`.
    #[arg(long)]
    pub target: PathBuf,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, value_enum, default_value_t = LdMethod::Auto)]
    pub method: LdMethod,
    #[arg(long, default_value_t = 1 << 24)]
    pub budget: u64,
    #[arg(long, default_value_t = 10000)]
    pub samples: usize,
    /// Grid mesh for graphon rates.
    #[arg(long, default_value_t = 0.1)]
    pub mesh: f64,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Lp,
    Uniform,
    Equipartition,
    Weak,
    Regularize,
}

#[derive(Debug, Args, Serialize)]
pub struct RegularityArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub check: Check,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    /// `eps:K` pairs separated by ',', e.g. `0.5:10,0.1:40`.
    #[arg(long)]
    pub table: Option<String>,
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Partitions evaluated by heuristic searches.
    #[arg(long, default_value_t = 20000)]
    pub budget: usize,
    #[arg(long, default_value_t = 50)]
    pub restarts: usize,
    #[arg(long, default_value_t = 64)]
    pub class_cap: usize,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct ConvergenceArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Comma-separated graph sizes.
    #[arg(long)]
    pub sizes: String,
    #[arg(long, default_value_t = 0.3)]
    pub eps: f64,
    /// Classes of the regularized graphons.
    #[arg(long, default_value_t = 16)]
    pub k: usize,
    #[arg(long, default_value_t = 2)]
    pub q: usize,
    /// Coupling model for the energy sequence (default: q = 2 cut model).
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Quotient samples and Monte Carlo maps per size.
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
    /// Ball radius for the rate sequence.
    #[arg(long, default_value_t = 0.1)]
    pub ld_eps: f64,
    #[arg(long, default_value_t = 200)]
    pub sweeps: usize,
    #[arg(long, default_value_t = 50)]
    pub restarts: usize,
    #[command(flatten)]
    pub out: Output,
}

/// What a subcommand produced: a report value, an optional table, or a data
/// file that replaces the report on stdout.
pub struct Outcome {
    pub result: Value,
    pub table: Option<Table>,
    pub data: Option<String>,
}

impl Outcome {
    fn report(result: Value) -> Self {
        Self {
            result,
            table: None,
            data: None,
        }
    }
}

/// Runs the parsed command and writes its output; returns the text printed
/// on stdout.
pub fn run(cli: &Cli) -> CliResult<String> {
    let out = cli.command.output();
    let outcome = match &cli.command {
        Command::Generate(a) => generate(a)?,
        Command::Distance(a) => distance(a)?,
        Command::Quotients(a) => quotients(a)?,
        Command::Energy(a) => energy(a)?,
        Command::Ld(a) => ld(a)?,
        Command::Regularity(a) => regularity_cmd(a)?,
        Command::ConvergenceReport(a) => return convergence(a, cli),
    };
    let config = serde_json::to_value(&cli.command).expect("config serializes");
    let report = envelope(cli.command.name(), out.seed, config, outcome.result);
    let text = match (out.format, &outcome.table) {
        (Format::Csv, Some(t)) => t.to_csv(),
        (Format::Csv, None) => return usage(format!("csv output is not available for {}", cli.command.name())),
        (Format::Json, _) => io::to_pretty(&report),
    };
    match (&out.out, outcome.data) {
        (Some(path), Some(data)) => {
            io::write_text(path, &data)?;
            Ok(text)
        }
        (None, Some(data)) => Ok(data),
        (Some(path), None) => {
            io::write_text(path, &text)?;
            Ok(String::new())
        }
        (None, None) => Ok(text),
    }
}

fn need<T: Copy>(x: Option<T>, flag: &str) -> CliResult<T> {
    x.ok_or_else(|| CliError::Usage(format!("missing --{flag}")))
}

fn parse_blocks(s: &str) -> CliResult<Vec<f64>> {
    let mut out = Vec::new();
    for row in s.split(';') {
        for x in row.split(',') {
            out.push(
                x.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::Usage(format!("bad block entry {x:?}")))?,
            );
        }
    }
    Ok(out)
}

fn family_spec(f: &FamilyArgs, n_override: Option<usize>, seed: u64) -> CliResult<GeneratorSpec> {
    let Some(name) = f.family.as_deref() else {
        return usage("missing --family (or --model)");
    };
    let n = || n_override.or(f.n).ok_or_else(|| CliError::Usage("missing --n".into()));
    let family = match name {
        "er" => Family::ErdosRenyi { n: n()?, p: need(f.p, "p")? },
        "sbm" => Family::Sbm {
            n: n()?,
            b: parse_blocks(f.blocks.as_deref().ok_or_else(|| CliError::Usage("missing --blocks".into()))?)?,
            rho: need(f.rho, "rho")?,
        },
        "power-law" => Family::PowerLaw {
            n: n()?,
            alpha: need(f.alpha, "alpha")?,
            beta: need(f.beta, "beta")?,
        },
        "w-random" => Family::WRandom {
            graphon: io::read_graphon(f.graphon.as_deref().ok_or_else(|| CliError::Usage("missing --graphon".into()))?)?,
            n: n()?,
            rho: need(f.rho, "rho")?,
        },
        "clique" => Family::CliquePlusIsolated { n: n()?, c: need(f.c, "c")? },
        "cycles" => {
            let len = need(f.len, "len")?;
            let copies = match n_override {
                Some(n) => (n / len).max(1),
                None => need(f.copies, "copies")?,
            };
            Family::CycleUnion { len, copies }
        }
        other => return usage(format!("unknown family {other:?}")),
    };
    Ok(GeneratorSpec { family, seed })
}

fn generate(a: &GenerateArgs) -> CliResult<Outcome> {
    let spec = match &a.model {
        Some(path) => io::read_json::<GeneratorFile>(path)?.to_spec()?,
        None => family_spec(&a.family, None, a.out.seed)?,
    };
    let g = spec.generate()?;
    let mut t = Table::new(&["family", "n", "edges", "density"]);
    t.push(vec![spec.family.tag().into(), g.n().into(), g.edge_count().into(), g.density().into()]);
    Ok(Outcome {
        result: json!({
            "family": spec.family.tag(),
            "seed": spec.seed,
            "n": g.n(),
            "edges": g.edge_count(),
            "density": num(g.density()),
            "path": a.out.out.as_ref().map(|p| p.display().to_string()),
        }),
        table: Some(t),
        data: Some(io::to_pretty(&GraphFile::from_graph(&g))),
    })
}

/// Graphs are normalized by their density; graphons are used as given.
fn as_graphon(input: Input, path: &Path) -> CliResult<StepGraphon> {
    match input {
        Input::Graph(g) => Ok(StepGraphon::normalize(&g)),
        Input::Graphon(w) => Ok(w),
        Input::QuotientSet(_) => usage(format!("{} holds a quotient set, not a graph or graphon", path.display())),
    }
}

fn bound_json(b: &DistanceBound) -> Value {
    json!({ "lower": num(b.lower), "upper": num(b.upper), "exact": b.exact })
}

fn distance(a: &DistanceArgs) -> CliResult<Outcome> {
    let u = as_graphon(io::read_input(&a.input)?, &a.input)?;
    let w = as_graphon(io::read_input(&a.input2)?, &a.input2)?;
    let mut opts = CutDistanceOptions::with_budget(a.budget, a.out.seed);
    opts.net_points = a.samples as u128;
    let b = cut_distance(&u, &w, &opts);
    let mut t = Table::new(&["lower", "upper", "exact"]);
    t.push(vec![b.lower.into(), b.upper.into(), b.exact.into()]);
    Ok(Outcome {
        result: bound_json(&b),
        table: Some(t),
        data: None,
    })
}

/// Exact quotient set of a graph when `q^n ≤ budget`, else a sampled net of
/// its normalized graphon; sampled (or grid) net of a graphon.
fn quotient_set(input: Input, q: usize, budget: u64, samples: usize, mesh: Option<f64>, seed: u64) -> CliResult<QuotientSet> {
    match input {
        Input::QuotientSet(s) => Ok(s),
        Input::Graph(g) if graphlim_core::math::pow_saturating(q, g.n()) <= budget as u128 => {
            let points = enumerate_quotients(&g, q, budget as u128)?;
            Ok(QuotientSet {
                points,
                meta: NetMeta {
                    q,
                    mesh: None,
                    samples: 0,
                    seed,
                    radius: Some(0.0),
                    sup_norm: StepGraphon::normalize(&g).sup_norm(),
                },
            })
        }
        Input::Graph(g) => Ok(sample_quotient_set(&StepGraphon::normalize(&g), q, 0.0, samples, seed)?),
        Input::Graphon(w) => Ok(sample_quotient_set(&w, q, mesh.unwrap_or(0.0), samples, seed)?),
    }
}

fn quotients(a: &QuotientsArgs) -> CliResult<Outcome> {
    let first = quotient_set(io::read_input(&a.input)?, a.q, a.budget, a.samples, a.mesh, a.out.seed)?;
    let Some(second) = &a.input2 else {
        let result = json!({ "q": first.meta.q, "points": first.len(), "radius": first.meta.radius.map(num) });
        return Ok(Outcome {
            result,
            table: None,
            data: Some(io::to_pretty(&QuotientSetFile::from_set(&first))),
        });
    };
    let other = quotient_set(io::read_input(second)?, a.q, a.budget, a.samples, a.mesh, a.out.seed)?;
    if first.meta.q != other.meta.q {
        return usage("quotient sets have different q");
    }
    let d = hausdorff(&first.points, &other.points)?;
    // covering radii turn the net distance into bounds for the full sets
    let slack = first.meta.radius.zip(other.meta.radius).map(|(r, s)| r + s);
    let mut t = Table::new(&["q", "points", "points2", "hausdorff", "lower", "upper"]);
    let (lo, hi) = match slack {
        Some(s) => (Some((d - s).max(0.0)), Some(d + s)),
        None => (None, None),
    };
    t.push(vec![a.q.into(), first.len().into(), other.len().into(), d.into(), lo.into(), hi.into()]);
    Ok(Outcome {
        result: json!({
            "q": a.q,
            "points": [first.len(), other.len()],
            "hausdorff": num(d),
            "radii": [first.meta.radius.map(num), other.meta.radius.map(num)],
            "lower": lo.map(num),
            "upper": hi.map(num),
        }),
        table: Some(t),
        data: None,
    })
}

fn optimizer_json(o: &Optimizer) -> Value {
    match o {
        Optimizer::Graph(p) => json!({ "assignment": p.assignment() }),
        Optimizer::Fractional(r) => {
            let rows: Vec<Value> = (0..r.k()).map(|mu| nums(r.row(mu))).collect();
            json!({ "step_lengths": nums(r.lengths()), "weights": rows })
        }
        Optimizer::None => Value::Null,
    }
}

pub fn energy_json(r: &EnergyResult) -> Value {
    json!({
        "value": num(r.value),
        "method": r.method.tag(),
        "exact_flag": r.exact,
        "resolution": num(r.resolution),
        "optimizer": optimizer_json(&r.optimizer),
    })
}

fn energy(a: &EnergyArgs) -> CliResult<Outcome> {
    let model: ModelFile = io::read_json(&a.model)?;
    let j = model.coupling()?;
    let q = model.q();
    let seed = a.out.seed;
    let mut t = Table::new(&["quantity", "value", "method", "exact_flag", "resolution"]);
    let mut row = |name: &str, r: &EnergyResult| {
        t.push(vec![name.into(), r.value.into(), r.method.tag().into(), r.exact.into(), r.resolution.into()]);
    };
    let result = match io::read_input(&a.input)? {
        Input::Graph(g) => {
            let fits = graphlim_core::math::pow_saturating(q, g.n()) <= a.budget as u128;
            let exact = a.exact || (!a.anneal && fits);
            let mut schedule = AnnealSchedule::new(seed);
            schedule.sweeps = a.sweeps;
            let method = if exact {
                GseMethod::Exact { budget: a.budget as u128 }
            } else {
                GseMethod::Anneal(schedule)
            };
            let (gse, free) = match model.microcanonical()? {
                Some(m) => (
                    statphys::microcanonical_gse(&g, &m, method)?,
                    if exact || fits {
                        Some(statphys::microcanonical_free_energy(&g, &m, a.budget as u128)?)
                    } else {
                        None
                    },
                ),
                None => {
                    let h = model.field();
                    (
                        statphys::ground_state_energy(&g, &j, &h, method)?,
                        if exact || fits {
                            Some(statphys::free_energy(&g, &j, &h, a.budget as u128)?)
                        } else {
                            None
                        },
                    )
                }
            };
            row("gse", &gse);
            if let Some(f) = &free {
                row("free_energy", f);
            }
            json!({
                "ensemble": if model.a.is_some() { "microcanonical" } else { "unrestricted" },
                "gse": energy_json(&gse),
                "free_energy": free.as_ref().map(energy_json),
            })
        }
        Input::Graphon(w) => {
            let Some(target) = &model.a else {
                return usage("graphon energies need a target vector a in the model");
            };
            let opts = GraphonSearch::new(seed);
            let gse = statphys::graphon_gse(&w, &j, target, &opts)?;
            let free = statphys::graphon_free_energy(&w, &j, target, &opts)?;
            row("gse", &gse);
            row("free_energy", &free);
            json!({ "ensemble": "graphon", "gse": energy_json(&gse), "free_energy": energy_json(&free) })
        }
        Input::QuotientSet(_) => return usage("energy needs a graph or graphon input"),
    };
    Ok(Outcome {
        result,
        table: Some(t),
        data: None,
    })
}

/// Vertices with equal weight, equal loop weight and equal edge weights to
/// every other vertex share a class.
pub fn twin_classes(g: &WeightedGraph) -> VertexPartition {
    let n = g.n();
    let mut reps: Vec<usize> = Vec::new();
    let mut assign = vec![0; n];
    for x in 0..n {
        let twin = reps.iter().position(|&r| {
            g.alpha(r) == g.alpha(x)
                && g.beta(r, r) == g.beta(x, x)
                && (0..n).filter(|&z| z != x && z != r).all(|z| g.beta(r, z) == g.beta(x, z))
        });
        assign[x] = match twin {
            Some(c) => c,
            None => {
                reps.push(x);
                reps.len() - 1
            }
        };
    }
    VertexPartition::new(assign, reps.len().max(1)).expect("labels below class count")
}

fn ball_method(g: &WeightedGraph, q: usize, a: &LdArgs, seed: u64) -> BallMethod {
    let budget = a.budget as u128;
    let mc = BallMethod::MonteCarlo { samples: a.samples, seed };
    match a.method {
        LdMethod::Enumeration => BallMethod::Enumeration { budget },
        LdMethod::Multinomial => BallMethod::Multinomial { classes: twin_classes(g), budget },
        LdMethod::MonteCarlo => mc,
        LdMethod::Auto => {
            if graphlim_core::math::pow_saturating(q, g.n()) <= budget {
                return BallMethod::Enumeration { budget };
            }
            let classes = twin_classes(g);
            let tables = classes
                .class_weights(g)
                .map(|_| {
                    let sizes: Vec<usize> = classes.classes().iter().map(Vec::len).collect();
                    sizes.iter().fold(1u128, |acc, &s| {
                        acc.saturating_mul(graphlim_core::math::compositions_count(s, q))
                    })
                })
                .unwrap_or(u128::MAX);
            if tables <= budget {
                BallMethod::Multinomial { classes, budget }
            } else {
                mc
            }
        }
    }
}

fn rate_row(t: &mut Table, r: &RateEstimate) {
    t.push(vec![
        r.n.into(),
        r.eps.into(),
        r.probability.into(),
        r.value.into(),
        r.stderr.into(),
        r.method.tag().into(),
    ]);
}

pub fn rate_json(r: &RateEstimate) -> Value {
    json!({
        "n": r.n,
        "eps": num(r.eps),
        "probability": num(r.probability),
        "log_prob": num(r.log_prob),
        "rate": num(r.value),
        "stderr": r.stderr.map(num),
        "method": r.method.tag(),
        "lower_bound_only": r.lower_bound_only,
    })
}

pub const RATE_COLUMNS: [&str; 6] = ["n", "eps", "probability", "rate", "stderr", "method"];

fn ld(a: &LdArgs) -> CliResult<Outcome> {
    let target = io::read_json::<QuotientFile>(&a.target)?.to_quotient()?;
    let q = target.q();
    let mut t = Table::new(&RATE_COLUMNS);
    let mut rows = Vec::new();
    for path in &a.input {
        match io::read_input(path)? {
            Input::Graph(g) => {
                let m = ball_method(&g, q, a, a.out.seed);
                let r = quotient_ball_probability(&g, q, &target, a.eps, &m)?;
                rate_row(&mut t, &r);
                rows.push(rate_json(&r));
            }
            Input::Graphon(w) => {
                let opts = GraphonRateOptions::new(a.mesh, a.out.seed);
                let r = graphon_rate(&w, q, &target, &opts)?;
                t.push(vec![Cell::Missing, a.eps.into(), Cell::Missing, r.value.into(), Some(r.tol).into(), "graphon".into()]);
                rows.push(json!({
                    "rate": num(r.value),
                    "tol": num(r.tol),
                    "radius": num(r.radius),
                    "method": "graphon",
                }));
            }
            Input::QuotientSet(_) => return usage("ld needs graph or graphon inputs"),
        }
    }
    Ok(Outcome {
        result: json!({ "q": q, "eps": num(a.eps), "rows": rows }),
        table: Some(t),
        data: None,
    })
}

fn parse_table(s: &str) -> CliResult<Vec<(f64, f64)>> {
    s.split(',')
        .map(|pair| {
            let (e, k) = pair
                .split_once(':')
                .ok_or_else(|| CliError::Usage(format!("table entry {pair:?} is not eps:K")))?;
            let p = |x: &str| x.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("bad number {x:?}")));
            Ok((p(e)?, p(k)?))
        })
        .collect()
}

pub fn regularity_json(r: &RegularityReport) -> Value {
    let verdict = match r.verdict {
        Verdict::Pass => json!({ "status": "pass", "certified": true }),
        Verdict::NoViolationFound { budget } => {
            json!({ "status": "no_violation_found", "certified": false, "budget": budget })
        }
        Verdict::Fail => json!({ "status": "fail", "certified": true }),
    };
    let witness = match &r.witness {
        None => Value::Null,
        Some(Witness::HeavyVertex { vertex, ratio, limit }) => {
            json!({ "type": "heavy_vertex", "vertex": vertex, "ratio": num(*ratio), "limit": num(*limit) })
        }
        Some(Witness::Partition { assignment, statistic, threshold, eps }) => json!({
            "type": "partition",
            "assignment": assignment,
            "statistic": num(*statistic),
            "threshold": num(*threshold),
            "eps": eps.map(num),
        }),
    };
    let p = &r.params;
    json!({
        "kind": r.kind.tag(),
        "params": {
            "C": p.c.map(num),
            "eta": p.eta.map(num),
            "p": p.p.map(num),
            "table": p.table.iter().map(|&(e, k)| json!([num(e), num(k)])).collect::<Vec<_>>(),
            "q": p.q,
        },
        "verdict": verdict,
        "witness": witness,
    })
}

fn weak_json(w: &WeakRegularity) -> Value {
    json!({
        "assignment": w.partition.assignment(),
        "classes": w.partition.q(),
        "lower": num(w.lower),
        "upper": num(w.upper),
        "threshold": num(w.threshold),
        "rounds": w.rounds,
        "converged": w.converged,
    })
}

fn regularity_cmd(a: &RegularityArgs) -> CliResult<Outcome> {
    let g = io::read_graph(&a.input)?;
    let search = SearchBudget::new(a.budget, a.out.seed);
    let weak = WeakRegularityOptions {
        restarts: a.restarts,
        class_cap: a.class_cap,
        seed: a.out.seed,
    };
    let table = || parse_table(a.table.as_deref().ok_or_else(|| CliError::Usage("missing --table".into()))?);
    let result = match a.check {
        Check::Lp => regularity_json(&regularity::upper_lp_regular_check(
            &g,
            need(a.c, "c")?,
            need(a.eta, "eta")?,
            a.p.unwrap_or(2.0),
            &search,
        )?),
        Check::Uniform => regularity_json(&regularity::uniform_upper_regular_check(&g, &table()?, need(a.eta, "eta")?, &search)?),
        Check::Equipartition => {
            regularity_json(&regularity::equipartition_upper_regular_check(&g, &table()?, need(a.q, "q")?, &search)?)
        }
        Check::Weak => weak_json(&regularity::weak_regularity_partition(&g, need(a.eps, "eps")?, a.k.unwrap_or(1), &weak)?),
        Check::Regularize => {
            let r = regularity::regularize(&g, need(a.eps, "eps")?, a.k.unwrap_or(1), &weak)?;
            json!({
                "graphon": serde_json::to_value(GraphonFile::from_graphon(&r.graphon)).expect("serializable"),
                "k_alpha_max": num(r.k_alpha_max),
                "l1": num(r.l1),
                "evidence": weak_json(&r.evidence),
            })
        }
    };
    Ok(Outcome::report(result))
}

/// The density-normalized limit object of a family, when it has one.
fn reference_graphon(spec: &GeneratorSpec) -> Option<StepGraphon> {
    match &spec.family {
        Family::ErdosRenyi { .. } => Some(StepGraphon::constant(1.0)),
        Family::Sbm { b, .. } => StepGraphon::uniform_steps(b.clone()).ok(),
        Family::WRandom { graphon, .. } => Some(graphon.clone()),
        _ => None,
    }
}

fn default_model() -> ModelFile {
    ModelFile {
        j: vec![vec![0.0, 1.0], vec![1.0, 0.0]],
        h: None,
        a: Some(vec![0.5, 0.5]),
        eps: Some(0.1),
    }
}

fn convergence(a: &ConvergenceArgs, cli: &Cli) -> CliResult<String> {
    let seed = a.out.seed;
    let sizes: Vec<usize> = a
        .sizes
        .split(',')
        .map(|s| s.trim().parse().map_err(|_| CliError::Usage(format!("bad size {s:?}"))))
        .collect::<CliResult<_>>()?;
    if sizes.is_empty() {
        return usage("--sizes is empty");
    }
    let model = match &a.model {
        Some(p) => io::read_json(p)?,
        None => default_model(),
    };
    let Some(cm) = model.microcanonical()? else {
        return usage("convergence-report needs a model with a target vector a");
    };
    let weak = WeakRegularityOptions {
        restarts: a.restarts,
        class_cap: a.k,
        seed,
    };
    let mut runs = Vec::new();
    for &n in &sizes {
        let spec = family_spec(&a.family, Some(n), seed)?;
        let g = spec.generate()?;
        let reg = regularity::regularize(&g, a.eps, a.k, &weak)?;
        runs.push((n, spec, g, reg));
    }
    let reference = match reference_graphon(&runs[0].1) {
        Some(w) => w,
        None => runs.last().expect("nonempty ladder").3.graphon.clone(),
    };
    let dist_opts = CutDistanceOptions::with_budget(720, seed);
    let ref_set = sample_quotient_set(&reference, a.q, 0.0, a.samples, seed)?;
    let uniform = StepFractionalPartition::uniform(reference.lengths().to_vec(), a.q)?;
    let target: Quotient = fractional_quotient(&reference, &uniform)?;
    let search = GraphonSearch::new(seed);
    let mut schedule = AnnealSchedule::new(seed);
    schedule.sweeps = a.sweeps;
    schedule.restarts = 1;

    let mut dist = Table::new(&["n", "density", "k_alpha_max", "residual_lower", "delta_lower", "delta_upper"]);
    let mut quot = Table::new(&["n", "points", "hausdorff"]);
    let mut ener = Table::new(&["n", "graph_gse", "graphon_gse", "graphon_free_energy"]);
    let mut rates = Table::new(&RATE_COLUMNS);
    for (n, _, g, reg) in &runs {
        let d = g.density();
        let b = cut_distance(&reg.graphon, &reference, &dist_opts);
        let residual = if d > 0.0 { reg.evidence.lower / d } else { 0.0 };
        dist.push(vec![(*n).into(), d.into(), reg.k_alpha_max.into(), residual.into(), b.lower.into(), b.upper.into()]);
        let set = sample_quotient_set(&reg.graphon, a.q, 0.0, a.samples, seed)?;
        quot.push(vec![(*n).into(), set.len().into(), hausdorff(&set.points, &ref_set.points)?.into()]);
        let gse = statphys::microcanonical_gse(g, &cm, GseMethod::Anneal(schedule))?;
        let wg = statphys::graphon_gse(&reg.graphon, cm.j(), cm.a(), &search)?;
        let wf = statphys::graphon_free_energy(&reg.graphon, cm.j(), cm.a(), &search)?;
        ener.push(vec![(*n).into(), gse.value.into(), wg.value.into(), wf.value.into()]);
        let mc = BallMethod::MonteCarlo { samples: a.samples, seed };
        rate_row(&mut rates, &quotient_ball_probability(g, a.q, &target, a.ld_eps, &mc)?);
    }
    let files = [("distance.csv", &dist), ("quotients.csv", &quot), ("energy.csv", &ener), ("ld.csv", &rates)];
    if let Some(dir) = &a.out.out {
        for (name, t) in files {
            io::write_text(&dir.join(name), &t.to_csv())?;
        }
    }
    let tables: serde_json::Map<String, Value> = files
        .iter()
        .map(|(name, t)| {
            let rows: Vec<Value> = t
                .rows
                .iter()
                .map(|r| {
                    let obj: serde_json::Map<String, Value> = t
                        .columns
                        .iter()
                        .zip(r)
                        .map(|(c, cell)| (c.to_string(), cell_json(cell)))
                        .collect();
                    Value::Object(obj)
                })
                .collect();
            (name.trim_end_matches(".csv").to_string(), Value::Array(rows))
        })
        .collect();
    let config = serde_json::to_value(&cli.command).expect("config serializes");
    let report = envelope(
        cli.command.name(),
        seed,
        config,
        json!({
            "reference": if reference_graphon(&runs[0].1).is_some() { "family_limit" } else { "largest_regularized" },
            "tables": tables,
        }),
    );
    let text = io::to_pretty(&report);
    if let Some(dir) = &a.out.out {
        io::write_text(&dir.join("report.json"), &text)?;
    }
    Ok(match a.out.format {
        Format::Json => text,
        Format::Csv => dist.to_csv(),
    })
}

fn cell_json(c: &Cell) -> Value {
    match c {
        Cell::Num(x) => num(*x),
        Cell::Int(x) => json!(x),
        Cell::Text(s) => json!(s),
        Cell::Bool(b) => json!(b),
        Cell::Missing => Value::Null,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use graphlim_core::models;

    #[test]
    fn twin_classes_of_clique_fixture() {
        let g = models::clique_plus_isolated(10, 4).unwrap();
        let t = twin_classes(&g);
        assert_eq!(t.q(), 2);
        assert_eq!(t.assignment(), &[0, 0, 0, 0, 1, 1, 1, 1, 1, 1]);
        let c = models::cycle_union(4, 1).unwrap();
        // opposite corners of C4 are twins
        assert_eq!(twin_classes(&c).assignment(), &[0, 1, 0, 1]);
    }

    #[test]
    fn table_parsing() {
        assert_eq!(parse_table("0.5:10, 0.1:40").unwrap(), vec![(0.5, 10.0), (0.1, 40.0)]);
        assert!(parse_table("0.5").is_err());
        assert_eq!(parse_blocks("1.6,0.4;0.4,1.6").unwrap().len(), 4);
    }
}
