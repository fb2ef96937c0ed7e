//! Model, decomposition and report files, and Graphviz export.
//!
//! Models are single JSON documents:
//!
//! ```json
//! {
//!   "name": "example",
//!   "functional": [{"id": "f1", "description": "..."}],
//!   "scenarios": [{"id": "q1", "description": "...", "general_scenario": "g1"}],
//!   "constraints": [{"id": "c1", "members": ["q1"]}],
//!   "depends": [["f1", "f2"]],
//!   "derives": [["q1", "f1"]],
//!   "tradeoff": {"labels": ["g1"], "rows": [[0]]},
//!   "params": {"alpha": 0.5, "beta": 0.4, "gamma": 0.1, "lambda": -0.5, "k": 3},
//!   "raw_relevance": [{"a": "f1", "b": "q1", "sigma": 0.2}]
//! }
//! ```
//!
//! Requirements are declared functional first, then scenarios. When the
//! declaration order interleaves the two kinds an `order` list of all ids
//! records it; the solvers break ties by declaration order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    AttributePrimitive, ClosureMode, Coalition, Constraint, Decomposition, GameParams, Model, Requirement,
    RequirementId, RequirementKind, TradeoffMatrix, Violation,
};
use crate::solver::{SolveReport, UTILITY_EPS};
use crate::utility::GameContext;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    name: String,
    #[serde(default)]
    functional: Vec<FunctionalEntry>,
    #[serde(default)]
    scenarios: Vec<ScenarioEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    order: Option<Vec<String>>,
    #[serde(default)]
    constraints: Vec<ConstraintEntry>,
    #[serde(default)]
    depends: Vec<(String, String)>,
    #[serde(default)]
    derives: Vec<(String, String)>,
    #[serde(default)]
    tradeoff: TradeoffEntry,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    params: Option<ParamsEntry>,
    #[serde(default)]
    raw_relevance: Vec<RawEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionalEntry {
    id: String,
    #[serde(default)]
    description: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioEntry {
    id: String,
    #[serde(default)]
    description: String,
    general_scenario: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstraintEntry {
    id: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    description: String,
    members: Vec<String>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TradeoffEntry {
    labels: Vec<String>,
    rows: Vec<Vec<i8>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsEntry {
    alpha: f64,
    beta: f64,
    gamma: f64,
    lambda: f64,
    k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    closure: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    a: String,
    b: String,
    sigma: f64,
}

fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn pair_ids((a, b): (String, String)) -> (RequirementId, RequirementId) {
    (a.into(), b.into())
}

impl ModelFile {
    fn into_model(self) -> Result<Model> {
        let mut p = AttributePrimitive::new(self.name);
        let mut requirements: Vec<Requirement> = self
            .functional
            .into_iter()
            .map(|f| Requirement::functional(f.id, f.description))
            .chain(
                self.scenarios
                    .into_iter()
                    .map(|s| Requirement::scenario(s.id, s.description, s.general_scenario)),
            )
            .collect();
        if let Some(order) = self.order {
            let mut seen = BTreeSet::new();
            if let Some(dup) = requirements.iter().find(|r| !seen.insert(r.id.clone())) {
                return Err(Error::InvalidModel(vec![Violation::DuplicateRequirement(dup.id.clone())]));
            }
            let mut by_id: BTreeMap<String, Requirement> = requirements
                .drain(..)
                .map(|r| (r.id.as_str().to_string(), r))
                .collect();
            for id in order {
                let r = by_id
                    .remove(&id)
                    .ok_or_else(|| Error::InvalidModel(vec![Violation::UnknownRequirement {
                        context: "order".into(),
                        id: id.clone().into(),
                    }]))?;
                requirements.push(r);
            }
            if let Some(id) = by_id.into_keys().next() {
                return Err(Error::InvalidModel(vec![Violation::UnknownRequirement {
                    context: "order (missing)".into(),
                    id: id.into(),
                }]));
            }
        }
        p.requirements = requirements;
        p.constraints = self
            .constraints
            .into_iter()
            .map(|c| Constraint::new(c.id, c.members).with_description(c.description))
            .collect();
        p.depends = self.depends.into_iter().map(pair_ids).collect();
        p.derives = self.derives.into_iter().map(pair_ids).collect();
        p.tradeoff = TradeoffMatrix::new(self.tradeoff.labels, self.tradeoff.rows)?;
        for r in self.raw_relevance {
            p.set_raw_relevance(r.a, r.b, r.sigma);
        }
        let params = self
            .params
            .map(|e| -> Result<GameParams> {
                let closure = match e.closure {
                    Some(c) => c.parse()?,
                    None => ClosureMode::default(),
                };
                Ok(GameParams::new(e.alpha, e.beta, e.gamma, e.lambda, e.k)?.with_closure(closure))
            })
            .transpose()?;
        p.ensure_valid()?;
        Ok(Model::new(p, params))
    }

    fn from_model(m: &Model) -> Self {
        let p = &m.primitive;
        let interleaved = p
            .requirements
            .windows(2)
            .any(|w| !w[0].is_functional() && w[1].is_functional());
        ModelFile {
            name: p.name.clone(),
            functional: p
                .functional()
                .map(|r| FunctionalEntry {
                    id: r.id.to_string(),
                    description: r.description.clone(),
                })
                .collect(),
            scenarios: p
                .scenarios()
                .map(|r| ScenarioEntry {
                    id: r.id.to_string(),
                    description: r.description.clone(),
                    general_scenario: r.general_scenario.clone().unwrap_or_default(),
                })
                .collect(),
            order: interleaved.then(|| p.ids().map(ToString::to_string).collect()),
            constraints: p
                .constraints
                .iter()
                .map(|c| ConstraintEntry {
                    id: c.id.clone(),
                    description: c.description.clone(),
                    members: c.members.iter().map(ToString::to_string).collect(),
                })
                .collect(),
            depends: p.depends.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
            derives: p.derives.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
            tradeoff: TradeoffEntry {
                labels: p.tradeoff.labels().to_vec(),
                rows: p.tradeoff.rows().to_vec(),
            },
            params: m.params.map(|g| ParamsEntry {
                alpha: g.alpha,
                beta: g.beta,
                gamma: g.gamma,
                lambda: g.lambda,
                k: g.k,
                closure: (g.closure != ClosureMode::default()).then(|| g.closure.as_str().to_string()),
            }),
            raw_relevance: p
                .raw_relevance
                .iter()
                .map(|((a, b), s)| RawEntry {
                    a: a.to_string(),
                    b: b.to_string(),
                    sigma: *s,
                })
                .collect(),
        }
    }
}

/// Parses and validates a model document.
pub fn parse_model(text: &str) -> Result<Model> {
    serde_json::from_str::<ModelFile>(text)
        .map_err(parse_error)?
        .into_model()
}

/// Parses and validates a model already held as a JSON value.
pub fn model_from_value(value: serde_json::Value) -> Result<Model> {
    serde_json::from_value::<ModelFile>(value)
        .map_err(|e| Error::Parse {
            line: 0,
            column: 0,
            message: e.to_string(),
        })?
        .into_model()
}

/// The model document as a JSON value.
pub fn model_to_value(m: &Model) -> serde_json::Value {
    serde_json::to_value(ModelFile::from_model(m)).expect("model serializes")
}

pub fn load_model(path: impl AsRef<Path>) -> Result<Model> {
    parse_model(&read(path.as_ref())?)
}

/// Pretty JSON with a fixed key order and a trailing newline.
pub fn model_to_json(m: &Model) -> String {
    let mut out = serde_json::to_string_pretty(&ModelFile::from_model(m)).expect("model serializes");
    out.push('\n');
    out
}

pub fn save_model(m: &Model, path: impl AsRef<Path>) -> Result<()> {
    write(path.as_ref(), &model_to_json(m))
}

#[derive(Debug, Serialize)]
struct DecompositionFile {
    coalitions: Vec<Vec<String>>,
}

/// Accepts both plain member lists and the rows of a JSON report.
#[derive(Debug, Deserialize)]
struct DecompositionInput {
    coalitions: Vec<CoalitionInput>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum CoalitionInput {
    Members(Vec<String>),
    Row { members: Vec<String> },
}

pub fn parse_decomposition(text: &str) -> Result<Decomposition> {
    let file: DecompositionInput = serde_json::from_str(text).map_err(parse_error)?;
    Ok(Decomposition::new(
        file.coalitions
            .into_iter()
            .map(|c| match c {
                CoalitionInput::Members(m) | CoalitionInput::Row { members: m } => Coalition::new(m),
            })
            .collect(),
    ))
}

pub fn load_decomposition(path: impl AsRef<Path>) -> Result<Decomposition> {
    parse_decomposition(&read(path.as_ref())?)
}

pub fn decomposition_to_json(d: &Decomposition) -> String {
    let file = DecompositionFile {
        coalitions: d
            .coalitions
            .iter()
            .map(|c| c.members.iter().map(ToString::to_string).collect())
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&file).expect("decomposition serializes");
    out.push('\n');
    out
}

pub fn save_decomposition(d: &Decomposition, path: impl AsRef<Path>) -> Result<()> {
    write(path.as_ref(), &decomposition_to_json(d))
}

#[derive(Debug, Serialize)]
struct ReportFile<'a> {
    model: &'a str,
    mode: String,
    params: ParamsEntry,
    coalitions: Vec<ReportRow>,
    total_utility: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    stats: Option<StatsEntry<'a>>,
}

#[derive(Debug, Serialize)]
struct ReportRow {
    members: Vec<String>,
    utility: f64,
}

#[derive(Debug, Serialize)]
struct StatsEntry<'a> {
    subsets_evaluated: u64,
    merges: usize,
    total_utility_trace: &'a [f64],
    wall_time_ms: f64,
}

/// JSON report; coalitions keep the report's payoff order. Statistics,
/// which include wall-clock time, are emitted only when asked for.
pub fn report_to_json(ctx: &GameContext, report: &SolveReport, with_stats: bool) -> String {
    let g = ctx.params();
    let file = ReportFile {
        model: &ctx.primitive().name,
        mode: report.mode.to_string(),
        params: ParamsEntry {
            alpha: g.alpha,
            beta: g.beta,
            gamma: g.gamma,
            lambda: g.lambda,
            k: g.k,
            closure: Some(g.closure.as_str().to_string()),
        },
        coalitions: report
            .decomposition
            .coalitions
            .iter()
            .zip(&report.utilities)
            .map(|(c, &u)| ReportRow {
                members: c.members.iter().map(ToString::to_string).collect(),
                utility: u,
            })
            .collect(),
        total_utility: report.total_utility(),
        stats: with_stats.then(|| StatsEntry {
            subsets_evaluated: report.stats.subsets_evaluated,
            merges: report.stats.merges,
            total_utility_trace: &report.stats.total_utility_trace,
            wall_time_ms: report.stats.wall_time.as_secs_f64() * 1e3,
        }),
    };
    let mut out = serde_json::to_string_pretty(&file).expect("report serializes");
    out.push('\n');
    out
}

/// Plain-text table, one row per coalition ordered by payoff.
pub fn report_to_text(ctx: &GameContext, report: &SolveReport, with_stats: bool) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "model: {}   solver: {}", ctx.primitive().name, report.mode);
    let rows: Vec<(String, String, String)> = report
        .decomposition
        .coalitions
        .iter()
        .zip(&report.utilities)
        .enumerate()
        .map(|(i, (c, u))| {
            let members = c.members.iter().map(|m| m.as_str()).collect::<Vec<_>>().join(", ");
            (format!("D{}", i + 1), format!("{u:.3}"), members)
        })
        .collect();
    let w0 = rows.iter().map(|r| r.0.len()).max().unwrap_or(0).max("Element".len());
    let w1 = rows.iter().map(|r| r.1.len()).max().unwrap_or(0).max("Payoff".len());
    let _ = writeln!(out, "{:<w0$}  {:>w1$}  Requirements", "Element", "Payoff");
    for (name, utility, members) in &rows {
        let _ = writeln!(out, "{name:<w0$}  {utility:>w1$}  {members}");
    }
    let _ = writeln!(out, "total payoff: {:.3}", report.total_utility());
    if with_stats {
        let s = &report.stats;
        let _ = writeln!(
            out,
            "subsets evaluated: {}   merges: {}   time: {:.3} ms",
            s.subsets_evaluated,
            s.merges,
            s.wall_time.as_secs_f64() * 1e3
        );
    }
    out
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Interaction graph over all requirements. Each pair gets an edge colored by
/// the sign of its interaction inside the full requirement set: blue when
/// positive, red when negative, none when zero. Functional requirements are
/// boxes, scenarios ellipses. With a decomposition each coalition becomes a
/// cluster. Output depends only on the inputs.
pub fn export_dot(ctx: &GameContext, clusters: Option<&Decomposition>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "graph {} {{", quote(&ctx.primitive().name));
    let _ = writeln!(out, "  node [fontname=\"Helvetica\"];");
    let node = |i: usize| {
        let shape = if ctx.is_functional_idx(i) { "box" } else { "ellipse" };
        format!("{} [shape={shape}];", quote(ctx.id(i).as_str()))
    };
    let mut placed = BTreeSet::new();
    if let Some(d) = clusters {
        for (ci, c) in d.coalitions.iter().enumerate() {
            let _ = writeln!(out, "  subgraph cluster_{ci} {{");
            let _ = writeln!(out, "    label={};", quote(&format!("D{}", ci + 1)));
            let Ok(members) = ctx.indices(c) else { continue };
            for i in members {
                if placed.insert(i) {
                    let _ = writeln!(out, "    {}", node(i));
                }
            }
            let _ = writeln!(out, "  }}");
        }
    }
    for i in 0..ctx.len() {
        if !placed.contains(&i) {
            let _ = writeln!(out, "  {}", node(i));
        }
    }
    let all = ctx.all_indices();
    for a in 0..ctx.len() {
        for b in (a + 1)..ctx.len() {
            let v = ctx.pair_interaction_idx(a, b, &all);
            if v.abs() <= UTILITY_EPS {
                continue;
            }
            let color = if v > 0.0 { "blue" } else { "red" };
            let _ = writeln!(
                out,
                "  {} -- {} [color={color}, label=\"{v:.3}\"];",
                quote(ctx.id(a).as_str()),
                quote(ctx.id(b).as_str())
            );
        }
    }
    out.push_str("}\n");
    out
}

/// Counts of positive and negative edges in [`export_dot`] output.
pub fn dot_edge_counts(dot: &str) -> (usize, usize) {
    let blue = dot.lines().filter(|l| l.contains("color=blue")).count();
    let red = dot.lines().filter(|l| l.contains("color=red")).count();
    (blue, red)
}

/// Kind counts, for summaries.
pub fn kind_counts(p: &AttributePrimitive) -> (usize, usize) {
    let f = p.requirements.iter().filter(|r| r.kind == RequirementKind::Functional).count();
    (f, p.len() - f)
}
