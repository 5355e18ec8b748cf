//! JSON file formats and number formatting.
//!
//! Data files (graphs, graphons, quotient sets) keep full `f64` precision so
//! they reload bit for bit; report values are rounded to 12 significant
//! digits by [`num`].

use std::fs;
use std::path::Path;

use graphlim_core::graph::{Quotient, WeightedGraph};
use graphlim_core::graphon::StepGraphon;
use graphlim_core::models::{Family, GeneratorSpec};
use graphlim_core::quotient::{NetMeta, QuotientSet};
use graphlim_core::statphys::CouplingModel;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{usage, CliError, CliResult};

/// Rounds to 12 significant digits; non-finite values pass through.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// A report number: 12 significant digits, with `"inf"`, `"-inf"` and
/// `"nan"` as strings since JSON has no literal for them.
pub fn num(x: f64) -> Value {
    if x.is_nan() {
        Value::from("nan")
    } else if x.is_infinite() {
        Value::from(if x > 0.0 { "inf" } else { "-inf" })
    } else {
        Value::from(round12(x))
    }
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

/// CSV cell text for a number, same conventions as [`num`].
pub fn fmt12(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        (if x > 0.0 { "inf" } else { "-inf" }).into()
    } else {
        let r = round12(x);
        if r != 0.0 && !(1e-4..1e12).contains(&r.abs()) {
            format!("{r:e}")
        } else {
            format!("{r}")
        }
    }
}

fn rows(flat: &[f64], k: usize) -> Vec<Vec<f64>> {
    flat.chunks(k.max(1)).map(<[f64]>::to_vec).collect()
}

fn flatten(m: &[Vec<f64>], k: usize, what: &str) -> CliResult<Vec<f64>> {
    if m.len() != k || m.iter().any(|r| r.len() != k) {
        return usage(format!("{what} must be a {k} x {k} matrix"));
    }
    Ok(m.concat())
}

/// `{"vertex_weights": [...], "edges": [[u, v, beta], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub vertex_weights: Vec<f64>,
    pub edges: Vec<(usize, usize, f64)>,
}

impl GraphFile {
    /// Nonzero pairs `u ≤ v` in row order.
    pub fn from_graph(g: &WeightedGraph) -> Self {
        let n = g.n();
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u..n {
                let b = g.beta(u, v);
                if b != 0.0 {
                    edges.push((u, v, b));
                }
            }
        }
        Self {
            vertex_weights: g.vertex_weights().to_vec(),
            edges,
        }
    }

    pub fn to_graph(&self) -> CliResult<WeightedGraph> {
        Ok(WeightedGraph::from_edges(self.vertex_weights.clone(), &self.edges)?)
    }
}

/// `{"step_lengths": [...], "values": [[...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphonFile {
    pub step_lengths: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl GraphonFile {
    pub fn from_graphon(w: &StepGraphon) -> Self {
        Self {
            step_lengths: w.lengths().to_vec(),
            values: rows(w.values(), w.k()),
        }
    }

    pub fn to_graphon(&self) -> CliResult<StepGraphon> {
        let k = self.step_lengths.len();
        let values = flatten(&self.values, k, "graphon values")?;
        Ok(StepGraphon::new(self.step_lengths.clone(), values)?)
    }
}

/// `{"J": [[...]], "h": [...], "a": [...], "eps": ...}`; `h` defaults to
/// zero, and `a`, `eps` are needed only for microcanonical quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    #[serde(rename = "J")]
    pub j: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
}

impl ModelFile {
    pub fn q(&self) -> usize {
        self.j.len()
    }

    pub fn coupling(&self) -> CliResult<Vec<f64>> {
        flatten(&self.j, self.q(), "J")
    }

    pub fn field(&self) -> Vec<f64> {
        self.h.clone().unwrap_or_else(|| vec![0.0; self.q()])
    }

    /// The model with its target; `None` when `a` is absent.
    pub fn microcanonical(&self) -> CliResult<Option<CouplingModel>> {
        let Some(a) = &self.a else {
            return Ok(None);
        };
        let Some(eps) = self.eps else {
            return usage("model has a target vector a but no eps");
        };
        Ok(Some(CouplingModel::new(self.coupling()?, self.field(), a.clone(), eps)?))
    }
}

/// `{"alpha": [...], "beta": [[...]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuotientFile {
    pub alpha: Vec<f64>,
    pub beta: Vec<Vec<f64>>,
}

impl QuotientFile {
    pub fn from_quotient(x: &Quotient) -> Self {
        Self {
            alpha: x.alpha().to_vec(),
            beta: rows(x.beta_matrix(), x.q()),
        }
    }

    pub fn to_quotient(&self) -> CliResult<Quotient> {
        let q = self.alpha.len();
        Ok(Quotient::new(self.alpha.clone(), flatten(&self.beta, q, "beta")?)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetMetaFile {
    pub q: usize,
    pub mesh: Option<f64>,
    pub samples: usize,
    pub seed: u64,
    pub radius: Option<f64>,
    pub sup_norm: f64,
}

/// `{"points": [{"alpha", "beta"}, ...], "meta": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuotientSetFile {
    pub points: Vec<QuotientFile>,
    pub meta: NetMetaFile,
}

impl QuotientSetFile {
    pub fn from_set(s: &QuotientSet) -> Self {
        let m = &s.meta;
        Self {
            points: s.points.iter().map(QuotientFile::from_quotient).collect(),
            meta: NetMetaFile {
                q: m.q,
                mesh: m.mesh,
                samples: m.samples,
                seed: m.seed,
                radius: m.radius,
                sup_norm: m.sup_norm,
            },
        }
    }

    pub fn to_set(&self) -> CliResult<QuotientSet> {
        let m = &self.meta;
        let points = self
            .points
            .iter()
            .map(QuotientFile::to_quotient)
            .collect::<CliResult<Vec<_>>>()?;
        if points.iter().any(|p| p.q() != m.q) {
            return usage("quotient set mixes different q");
        }
        Ok(QuotientSet {
            points,
            meta: NetMeta {
                q: m.q,
                mesh: m.mesh,
                samples: m.samples,
                seed: m.seed,
                radius: m.radius,
                sup_norm: m.sup_norm,
            },
        })
    }
}

/// Generator families as they appear in JSON, tagged by `"family"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilyFile {
    Er { n: usize, p: f64 },
    Sbm { n: usize, b: Vec<Vec<f64>>, rho: f64 },
    PowerLaw { n: usize, alpha: f64, beta: f64 },
    WRandom { graphon: GraphonFile, n: usize, rho: f64 },
    CliquePlusIsolated { n: usize, c: usize },
    CycleUnion { len: usize, copies: usize },
}

/// A [`FamilyFile`] plus `"seed"` (default 0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorFile {
    #[serde(flatten)]
    pub family: FamilyFile,
    #[serde(default)]
    pub seed: u64,
}

impl GeneratorFile {
    pub fn to_spec(&self) -> CliResult<GeneratorSpec> {
        let family = match &self.family {
            FamilyFile::Er { n, p } => Family::ErdosRenyi { n: *n, p: *p },
            FamilyFile::Sbm { n, b, rho } => Family::Sbm {
                n: *n,
                b: flatten(b, b.len(), "block matrix")?,
                rho: *rho,
            },
            FamilyFile::PowerLaw { n, alpha, beta } => Family::PowerLaw {
                n: *n,
                alpha: *alpha,
                beta: *beta,
            },
            FamilyFile::WRandom { graphon, n, rho } => Family::WRandom {
                graphon: graphon.to_graphon()?,
                n: *n,
                rho: *rho,
            },
            FamilyFile::CliquePlusIsolated { n, c } => Family::CliquePlusIsolated { n: *n, c: *c },
            FamilyFile::CycleUnion { len, copies } => Family::CycleUnion {
                len: *len,
                copies: *copies,
            },
        };
        Ok(GeneratorSpec { family, seed: self.seed })
    }
}

/// Any object the CLI accepts through `--input`.
#[derive(Debug, Clone, PartialEq)]
pub enum Input {
    Graph(WeightedGraph),
    Graphon(StepGraphon),
    QuotientSet(QuotientSet),
}

impl Input {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Graph(_) => "graph",
            Self::Graphon(_) => "graphon",
            Self::QuotientSet(_) => "quotient_set",
        }
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// Dispatches on the distinguishing key of each format.
pub fn read_input(path: &Path) -> CliResult<Input> {
    let v: Value = read_json(path)?;
    let parse = |v: Value| -> CliResult<Input> {
        if v.get("vertex_weights").is_some() {
            Ok(Input::Graph(from_value::<GraphFile>(v, path)?.to_graph()?))
        } else if v.get("step_lengths").is_some() {
            Ok(Input::Graphon(from_value::<GraphonFile>(v, path)?.to_graphon()?))
        } else if v.get("points").is_some() {
            Ok(Input::QuotientSet(from_value::<QuotientSetFile>(v, path)?.to_set()?))
        } else {
            usage(format!("{} is not a graph, graphon or quotient set", path.display()))
        }
    };
    parse(v)
}

fn from_value<T: DeserializeOwned>(v: Value, path: &Path) -> CliResult<T> {
    serde_json::from_value(v).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_graph(path: &Path) -> CliResult<WeightedGraph> {
    read_json::<GraphFile>(path)?.to_graph()
}

pub fn read_graphon(path: &Path) -> CliResult<StepGraphon> {
    read_json::<GraphonFile>(path)?.to_graphon()
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn to_pretty<T: Serialize>(x: &T) -> String {
    let mut s = serde_json::to_string_pretty(x).expect("serializable");
    s.push('\n');
    s
}
