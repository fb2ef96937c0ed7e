//! Decomposition sessions: a tree of primitives, each decomposed, split into
//! children, or terminated by the architect.

use std::collections::{BTreeMap, BTreeSet};

use archgame_core::model::{ClosureMode, Coalition, GameParams};
use archgame_core::solver::{self, SolveMode, SolveReport, DEFAULT_EXACT_CAP};
use archgame_core::{io, Error as CoreError, GameContext, Model};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::restrict::{restrict_with_warnings, Edits};

pub type NodeId = u64;

#[derive(Debug, Clone, PartialEq)]
pub enum SessionError {
    NotFound(String),
    Conflict(String),
    Invalid(String),
}

impl std::fmt::Display for SessionError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SessionError::NotFound(m) | SessionError::Conflict(m) | SessionError::Invalid(m) => f.write_str(m),
        }
    }
}

impl From<CoreError> for SessionError {
    fn from(e: CoreError) -> Self {
        SessionError::Invalid(e.to_string())
    }
}

pub type Result<T, E = SessionError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Open,
    Decomposed,
    Terminated,
}

/// Parameters as they travel over the wire.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsDoc {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub k: usize,
    #[serde(default)]
    pub closure: Option<String>,
}

impl ParamsDoc {
    pub fn to_params(&self) -> Result<GameParams> {
        let closure: ClosureMode = match &self.closure {
            Some(c) => c.parse()?,
            None => ClosureMode::default(),
        };
        Ok(GameParams::new(self.alpha, self.beta, self.gamma, self.lambda, self.k)?.with_closure(closure))
    }
}

impl From<GameParams> for ParamsDoc {
    fn from(g: GameParams) -> Self {
        ParamsDoc {
            alpha: g.alpha,
            beta: g.beta,
            gamma: g.gamma,
            lambda: g.lambda,
            k: g.k,
            closure: Some(g.closure.as_str().to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoalitionRow {
    pub members: Vec<String>,
    pub utility: f64,
}

/// A solver report in payload form. Utilities come from the solver; clients
/// display them as they are.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDoc {
    pub mode: String,
    pub k: Option<usize>,
    pub params: ParamsDoc,
    pub coalitions: Vec<CoalitionRow>,
    pub total_utility: f64,
    pub verified: bool,
}

impl ReportDoc {
    pub fn new(ctx: &GameContext, report: &SolveReport, verified: bool) -> Self {
        ReportDoc {
            mode: report.mode.to_string(),
            k: match report.mode {
                SolveMode::KCohesive(k) => Some(k),
                SolveMode::Exact => None,
            },
            params: (*ctx.params()).into(),
            coalitions: report
                .decomposition
                .coalitions
                .iter()
                .zip(&report.utilities)
                .map(|(c, &u)| CoalitionRow {
                    members: c.members.iter().map(ToString::to_string).collect(),
                    utility: u,
                })
                .collect(),
            total_utility: report.total_utility(),
            verified,
        }
    }
}

/// Which solver to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact { cap: usize },
    K(usize),
}

impl Mode {
    pub fn from_request(exact: bool, k: Option<usize>, cap: Option<usize>, params: &GameParams) -> Result<Mode> {
        if exact {
            if k.is_some() {
                return Err(SessionError::Invalid("`exact` and `k` are mutually exclusive".into()));
            }
            return Ok(Mode::Exact {
                cap: cap.unwrap_or(DEFAULT_EXACT_CAP),
            });
        }
        match k.unwrap_or(params.k) {
            0 => Err(SessionError::Invalid("k must be at least 1".into())),
            k => Ok(Mode::K(k)),
        }
    }
}

/// Runs a solver on a model and verifies the result in the same mode.
pub fn solve(model: &Model, mode: Mode) -> Result<ReportDoc> {
    let mut params = model.params_or_default();
    if let Mode::K(k) = mode {
        params = params.with_k(k);
    }
    let ctx = GameContext::new(model.primitive.clone(), params)?;
    let (report, check) = match mode {
        Mode::Exact { cap } => (solver::solve_exact_capped(&ctx, cap)?, SolveMode::Exact),
        Mode::K(k) => (solver::solve_k(&ctx, k), SolveMode::KCohesive(k)),
    };
    let cap = ctx.len().max(DEFAULT_EXACT_CAP);
    let verified = solver::verify_solution_capped(&ctx, &report.decomposition, check, cap)?.passed();
    Ok(ReportDoc::new(&ctx, &report, verified))
}

mod model_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &Model, s: S) -> std::result::Result<S::Ok, S::Error> {
        io::model_to_value(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Model, D::Error> {
        let v = Value::deserialize(d)?;
        io::model_from_value(v).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub parent: Option<NodeId>,
    /// Position of the originating coalition in the parent's report.
    pub origin: Option<usize>,
    /// Always carries parameters.
    #[serde(with = "model_serde")]
    pub model: Model,
    pub status: Status,
    pub report: Option<ReportDoc>,
    pub children: Vec<NodeId>,
    pub warnings: Vec<String>,
    /// Bumped on every change; a solve started earlier cannot be applied.
    pub revision: u64,
}

impl Node {
    pub fn params(&self) -> GameParams {
        self.model.params_or_default()
    }

    pub fn requirement_ids(&self) -> Vec<String> {
        self.model.primitive.ids().map(ToString::to_string).collect()
    }

    fn ensure_mutable(&self) -> Result<()> {
        if self.status == Status::Terminated {
            return Err(SessionError::Conflict(format!("node {} is terminated", self.id)));
        }
        if !self.children.is_empty() {
            return Err(SessionError::Conflict(format!("node {} already has children", self.id)));
        }
        Ok(())
    }
}

/// One accepted coalition and the edits for its child.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChildSpec {
    pub coalition: usize,
    #[serde(default)]
    pub edits: Edits,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Accepted {
    pub node: NodeId,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionTree {
    pub id: String,
    pub root: NodeId,
    pub nodes: BTreeMap<NodeId, Node>,
    pub next_node: NodeId,
    /// Requirements the architect dropped from the design.
    pub removed: BTreeSet<String>,
}

/// Why an export was refused.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    /// Root requirements in no terminated leaf and not removed.
    pub missing: Vec<String>,
    /// Leaves not yet terminated.
    pub unfinished: Vec<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportNode {
    pub id: NodeId,
    pub status: Status,
    pub requirements: Vec<String>,
    pub params: ParamsDoc,
    /// Utility of this node's coalition in its parent's report.
    pub utility: Option<f64>,
    pub report: Option<ReportDoc>,
    pub children: Vec<ExportNode>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportDoc {
    pub session: String,
    pub removed: Vec<String>,
    pub root: ExportNode,
}

impl SessionTree {
    pub fn new(id: impl Into<String>, mut model: Model) -> Result<Self> {
        let params = model.params_or_default();
        params.check()?;
        model.primitive.ensure_valid()?;
        model.params = Some(params);
        let root = Node {
            id: 0,
            parent: None,
            origin: None,
            model,
            status: Status::Open,
            report: None,
            children: Vec::new(),
            warnings: Vec::new(),
            revision: 0,
        };
        Ok(SessionTree {
            id: id.into(),
            root: 0,
            nodes: BTreeMap::from([(0, root)]),
            next_node: 1,
            removed: BTreeSet::new(),
        })
    }

    pub fn node(&self, id: NodeId) -> Result<&Node> {
        self.nodes
            .get(&id)
            .ok_or_else(|| SessionError::NotFound(format!("no node {id} in session {}", self.id)))
    }

    fn node_mut(&mut self, id: NodeId) -> Result<&mut Node> {
        let session = self.id.clone();
        self.nodes
            .get_mut(&id)
            .ok_or_else(|| SessionError::NotFound(format!("no node {id} in session {session}")))
    }

    pub fn set_params(&mut self, id: NodeId, params: GameParams) -> Result<()> {
        params.check()?;
        let node = self.node_mut(id)?;
        node.ensure_mutable()?;
        node.model.params = Some(params);
        node.report = None;
        node.status = Status::Open;
        node.revision += 1;
        Ok(())
    }

    /// Model and revision to solve outside the session lock.
    pub fn solve_snapshot(&self, id: NodeId) -> Result<(Model, u64)> {
        let node = self.node(id)?;
        node.ensure_mutable()?;
        Ok((node.model.clone(), node.revision))
    }

    pub fn apply_report(&mut self, id: NodeId, revision: u64, report: ReportDoc) -> Result<()> {
        let node = self.node_mut(id)?;
        node.ensure_mutable()?;
        if node.revision != revision {
            return Err(SessionError::Conflict(format!("node {id} changed while solving")));
        }
        node.report = Some(report);
        node.status = Status::Decomposed;
        node.revision += 1;
        Ok(())
    }

    pub fn decompose(&mut self, id: NodeId, mode: Mode) -> Result<ReportDoc> {
        let (model, revision) = self.solve_snapshot(id)?;
        let report = solve(&model, mode)?;
        self.apply_report(id, revision, report.clone())?;
        Ok(report)
    }

    /// Solves with other parameters without touching the session.
    pub fn what_if(&self, id: NodeId, params: Option<GameParams>, mode: Mode) -> Result<ReportDoc> {
        let node = self.node(id)?;
        let mut model = node.model.clone();
        if let Some(p) = params {
            p.check()?;
            model.params = Some(p);
        }
        solve(&model, mode)
    }

    /// Turns selected coalitions of the node's report into open children.
    /// `remove` drops requirements of this node from the design; they may not
    /// belong to an accepted coalition.
    pub fn accept_children(&mut self, id: NodeId, specs: &[ChildSpec], remove: &[String]) -> Result<Vec<Accepted>> {
        let node = self.node(id)?;
        match node.status {
            Status::Terminated => return Err(SessionError::Conflict(format!("node {id} is terminated"))),
            Status::Open => return Err(SessionError::Conflict(format!("node {id} has not been decomposed"))),
            Status::Decomposed => {}
        }
        let report = node.report.as_ref().expect("decomposed nodes carry a report");
        let taken: BTreeSet<usize> = node
            .children
            .iter()
            .filter_map(|c| self.nodes.get(c).and_then(|n| n.origin))
            .collect();
        let mut requested = BTreeSet::new();
        for spec in specs {
            if spec.coalition >= report.coalitions.len() {
                return Err(SessionError::Invalid(format!(
                    "coalition {} out of range (report has {})",
                    spec.coalition,
                    report.coalitions.len()
                )));
            }
            if taken.contains(&spec.coalition) || !requested.insert(spec.coalition) {
                return Err(SessionError::Conflict(format!("coalition {} already accepted", spec.coalition)));
            }
        }
        let accepted_members: BTreeSet<&String> = taken
            .iter()
            .chain(&requested)
            .flat_map(|&i| report.coalitions[i].members.iter())
            .collect();
        for r in remove {
            if !node.model.primitive.contains(&r.as_str().into()) {
                return Err(SessionError::Invalid(format!("`{r}` is not a requirement of node {id}")));
            }
            if accepted_members.contains(r) {
                return Err(SessionError::Invalid(format!("`{r}` belongs to an accepted coalition")));
            }
        }

        let mut children = Vec::new();
        for spec in specs {
            let coalition = Coalition::new(report.coalitions[spec.coalition].members.iter().map(String::as_str));
            let restricted = restrict_with_warnings(&node.model.primitive, &coalition, &spec.edits)?;
            children.push((spec.coalition, restricted));
        }
        let params = node.params();
        let mut out = Vec::new();
        for (origin, restricted) in children {
            let child_id = self.next_node;
            self.next_node += 1;
            self.nodes.insert(
                child_id,
                Node {
                    id: child_id,
                    parent: Some(id),
                    origin: Some(origin),
                    model: Model::new(restricted.primitive, Some(params)),
                    status: Status::Open,
                    report: None,
                    children: Vec::new(),
                    warnings: restricted.warnings.clone(),
                    revision: 0,
                },
            );
            out.push(Accepted {
                node: child_id,
                warnings: restricted.warnings,
            });
        }
        let node = self.node_mut(id)?;
        node.children.extend(out.iter().map(|a| a.node));
        node.revision += 1;
        self.removed.extend(remove.iter().cloned());
        Ok(out)
    }

    pub fn terminate(&mut self, id: NodeId) -> Result<()> {
        let node = self.node_mut(id)?;
        node.ensure_mutable()?;
        node.status = Status::Terminated;
        node.revision += 1;
        Ok(())
    }

    pub fn coverage(&self) -> CoverageReport {
        let mut covered = BTreeSet::new();
        let mut unfinished = Vec::new();
        for node in self.nodes.values().filter(|n| n.children.is_empty()) {
            if node.status == Status::Terminated {
                covered.extend(node.requirement_ids());
            } else {
                unfinished.push(node.id);
            }
        }
        let missing = self.nodes[&self.root]
            .requirement_ids()
            .into_iter()
            .filter(|r| !covered.contains(r) && !self.removed.contains(r))
            .collect();
        CoverageReport { missing, unfinished }
    }

    /// The architecture tree, or the coverage gaps preventing it.
    pub fn export(&self) -> Result<ExportDoc, CoverageReport> {
        let coverage = self.coverage();
        if !coverage.missing.is_empty() {
            return Err(coverage);
        }
        Ok(ExportDoc {
            session: self.id.clone(),
            removed: self.removed.iter().cloned().collect(),
            root: self.export_node(self.root),
        })
    }

    fn export_node(&self, id: NodeId) -> ExportNode {
        let node = &self.nodes[&id];
        let utility = node.parent.zip(node.origin).and_then(|(p, o)| {
            self.nodes[&p]
                .report
                .as_ref()
                .and_then(|r| r.coalitions.get(o))
                .map(|c| c.utility)
        });
        ExportNode {
            id,
            status: node.status,
            requirements: node.requirement_ids(),
            params: node.params().into(),
            utility,
            report: node.report.clone(),
            children: node.children.iter().map(|&c| self.export_node(c)).collect(),
        }
    }

    /// Checks the structural invariants of the tree.
    pub fn audit(&self) -> Result<(), String> {
        let root = self.nodes.get(&self.root).ok_or("root missing")?;
        if root.parent.is_some() || root.origin.is_some() {
            return Err("root has a parent".into());
        }
        let mut seen = BTreeSet::new();
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            if !seen.insert(id) {
                return Err(format!("node {id} reached twice"));
            }
            let node = self.nodes.get(&id).ok_or_else(|| format!("dangling child {id}"))?;
            if node.id != id {
                return Err(format!("node {id} stored under another id"));
            }
            if node.status == Status::Decomposed && node.report.is_none() {
                return Err(format!("node {id} decomposed without a report"));
            }
            if !node.children.is_empty() && node.status != Status::Decomposed {
                return Err(format!("node {id} has children but is {:?}", node.status));
            }
            let mut origins = BTreeSet::new();
            for &c in &node.children {
                let child = self.nodes.get(&c).ok_or_else(|| format!("dangling child {c}"))?;
                if child.parent != Some(id) {
                    return Err(format!("node {c} does not point back to {id}"));
                }
                let origin = child.origin.ok_or_else(|| format!("node {c} has no origin"))?;
                if !origins.insert(origin) {
                    return Err(format!("coalition {origin} of node {id} accepted twice"));
                }
                let row = node
                    .report
                    .as_ref()
                    .and_then(|r| r.coalitions.get(origin))
                    .ok_or_else(|| format!("node {c} refers to a missing coalition"))?;
                let ids: BTreeSet<String> = child.requirement_ids().into_iter().collect();
                if let Some(m) = row.members.iter().find(|m| !ids.contains(*m)) {
                    return Err(format!("node {c} lost requirement `{m}` of its coalition"));
                }
                stack.push(c);
            }
        }
        if seen.len() != self.nodes.len() {
            return Err("unreachable nodes in tree".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use archgame_core::corpus;

    fn tree() -> SessionTree {
        SessionTree::new("s", corpus::running_example()).unwrap()
    }

    #[test]
    fn decompose_running_example() {
        let mut t = tree();
        let r = t.decompose(0, Mode::K(4)).unwrap();
        assert_eq!(r.coalitions.len(), 2);
        assert_eq!(r.coalitions[0].members, ["f1", "f2", "q1", "q2"]);
        assert_eq!(r.coalitions[0].utility, 2.5);
        assert!(r.verified);
        assert_eq!(t.node(0).unwrap().status, Status::Decomposed);
        t.audit().unwrap();
    }

    #[test]
    fn terminated_nodes_are_frozen() {
        let mut t = tree();
        t.terminate(0).unwrap();
        assert!(matches!(t.decompose(0, Mode::K(3)), Err(SessionError::Conflict(_))));
        assert!(matches!(t.terminate(0), Err(SessionError::Conflict(_))));
        assert!(matches!(
            t.set_params(0, GameParams::default()),
            Err(SessionError::Conflict(_))
        ));
        assert!(matches!(t.node(9), Err(SessionError::NotFound(_))));
    }

    #[test]
    fn what_if_leaves_the_tree_alone() {
        let t = tree();
        let before = t.clone();
        let a = t.what_if(0, None, Mode::K(1)).unwrap();
        let b = t.what_if(0, None, Mode::K(1)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.mode, "1-cohesive");
        assert_eq!(a.coalitions.len(), 2);
        assert_eq!(t, before);
    }

    #[test]
    fn full_session_exports() {
        let mut t = tree();
        t.decompose(0, Mode::K(4)).unwrap();
        assert!(matches!(
            t.accept_children(0, &[ChildSpec { coalition: 2, ..Default::default() }], &[]),
            Err(SessionError::Invalid(_))
        ));
        let kids = t
            .accept_children(0, &[ChildSpec { coalition: 0, ..Default::default() }], &[])
            .unwrap();
        assert!(matches!(
            t.accept_children(0, &[ChildSpec { coalition: 0, ..Default::default() }], &[]),
            Err(SessionError::Conflict(_))
        ));
        t.audit().unwrap();
        let gap = t.export().unwrap_err();
        assert_eq!(gap.missing, ["f1", "f2", "f3", "q1", "q2", "q3"]);

        t.terminate(kids[0].node).unwrap();
        let gap = t.export().unwrap_err();
        assert_eq!(gap.missing, ["f3", "q3"]);
        assert!(gap.unfinished.is_empty());

        t.accept_children(0, &[], &["f3".into(), "q3".into()]).unwrap();
        let doc = t.export().unwrap();
        assert_eq!(doc.removed, ["f3", "q3"]);
        assert_eq!(doc.root.children[0].utility, Some(2.5));
        t.audit().unwrap();
    }

    #[test]
    fn removal_cannot_hit_accepted_members() {
        let mut t = tree();
        t.decompose(0, Mode::K(4)).unwrap();
        let err = t.accept_children(0, &[ChildSpec { coalition: 0, ..Default::default() }], &["q1".into()]);
        assert!(matches!(err, Err(SessionError::Invalid(_))));
        assert!(t.node(0).unwrap().children.is_empty());
    }

    #[test]
    fn stale_solves_are_rejected() {
        let mut t = tree();
        let (model, rev) = t.solve_snapshot(0).unwrap();
        t.set_params(0, GameParams::default().with_k(2)).unwrap();
        let r = solve(&model, Mode::K(3)).unwrap();
        assert!(matches!(t.apply_report(0, rev, r), Err(SessionError::Conflict(_))));
    }

    #[test]
    fn audit_catches_broken_links() {
        let mut t = tree();
        t.decompose(0, Mode::K(4)).unwrap();
        let kids = t
            .accept_children(0, &[ChildSpec { coalition: 1, ..Default::default() }], &[])
            .unwrap();
        t.nodes.get_mut(&kids[0].node).unwrap().parent = None;
        assert!(t.audit().is_err());
    }

    #[test]
    fn serde_round_trip() {
        let mut t = tree();
        t.decompose(0, Mode::Exact { cap: 20 }).unwrap();
        let text = serde_json::to_string(&t).unwrap();
        let back: SessionTree = serde_json::from_str(&text).unwrap();
        assert_eq!(back, t);
    }
}
