//! Resolution trees, steps and their serialized forms.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::model::{ChangeKind, Driver, InvariantPair, LocalModel, OmegaScaled};
use super::{ResolveError, Result};
use crate::blowup::{self, Center, ChartMap, ExcOrigin, ExceptionalEntry, ExceptionalLedger};
use crate::series::{self, Jet, PolyMap};

/// One transformation between a node and its parent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Step {
    /// Local model at `point`: `x = point + x'`.
    Translate { point: Vec<String> },
    /// Blow-up chart; indices are 1-based. `exponent` is the power of the
    /// exceptional factored from the strict transform.
    Blowup { center: Vec<usize>, chart: usize, exponent: u32 },
    /// `x = ψ(x')`.
    Coordinates { kind: ChangeKind, lifted: bool, map: Vec<Jet> },
}

impl Step {
    pub fn chart_map(&self, n: usize) -> Result<Option<ChartMap>> {
        match self {
            Step::Blowup { center, chart, .. } => {
                if center.iter().chain(std::iter::once(chart)).any(|&i| i == 0) {
                    return Err(ResolveError::Input("blow-up indices are 1-based".into()));
                }
                let c = Center::new(center.iter().map(|i| i - 1).collect(), n)?;
                Ok(Some(ChartMap::new(c, chart - 1, n)?))
            }
            _ => Ok(None),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Step::Translate { point } => format!("local model at ({})", point.join(", ")),
            Step::Blowup { center, chart, .. } => {
                let c: Vec<String> = center.iter().map(|i| format!("x{i}")).collect();
                format!("blow up {{{} = 0}}, chart {chart}", c.join(" = "))
            }
            Step::Coordinates { kind, lifted, .. } => {
                format!("{}{:?} coordinate change", if *lifted { "lifted " } else { "" }, kind).to_lowercase()
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Root,
    CoveringPiece,
    BlowupChart,
    CoordinateChange,
    Leaf,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerRecord {
    pub id: usize,
    pub origin: ExcOrigin,
    pub jet: Jet,
}

/// Strict transform and ledger at a node.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshot {
    pub strict: Jet,
    pub ledger: Vec<LedgerRecord>,
    pub old: Vec<usize>,
    pub driver: Driver,
}

impl Snapshot {
    pub fn of(m: &LocalModel) -> Self {
        Snapshot {
            strict: m.g.clone(),
            ledger: m
                .exceptionals
                .entries
                .iter()
                .map(|e| LedgerRecord { id: e.id, origin: e.origin, jet: e.jet.clone() })
                .collect(),
            old: m.old.iter().copied().collect(),
            driver: m.driver,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseInfo {
    /// `d!·|Ω|` at the start of the phase segment.
    pub budget: u128,
    /// Monomial-case blow-ups so far in the segment, this one included.
    pub used: u128,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: usize,
    pub parent: Option<usize>,
    pub kind: NodeKind,
    pub step: Option<Step>,
    pub center_indices: Vec<usize>,
    pub chart_index: Option<usize>,
    pub invariant_pair: Option<InvariantPair>,
    pub omega_scaled: Option<OmegaScaled>,
    pub phase: Option<PhaseInfo>,
    pub assumptions: Vec<String>,
    pub notes: Vec<String>,
    pub leaf_checks: BTreeMap<String, bool>,
    pub composed_map: Vec<String>,
    pub snapshot: Snapshot,
}

impl Node {
    pub(crate) fn new(kind: NodeKind, step: Option<Step>, m: &LocalModel) -> Self {
        let (center_indices, chart_index) = match &step {
            Some(Step::Blowup { center, chart, .. }) => (center.clone(), Some(*chart)),
            _ => (vec![], None),
        };
        Node {
            id: 0,
            parent: None,
            kind,
            step,
            center_indices,
            chart_index,
            invariant_pair: Some(m.pair()),
            omega_scaled: None,
            phase: None,
            assumptions: vec![],
            notes: vec![],
            leaf_checks: BTreeMap::new(),
            composed_map: vec![],
            snapshot: Snapshot::of(m),
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.kind == NodeKind::Leaf
    }

    pub fn passed(&self) -> bool {
        !self.leaf_checks.is_empty() && self.leaf_checks.values().all(|&b| b)
    }
}

/// Node with children, before ids are assigned.
#[derive(Clone, Debug)]
pub(crate) struct TNode {
    pub node: Node,
    pub children: Vec<TNode>,
}

impl TNode {
    pub fn leaf(node: Node) -> Self {
        TNode { node, children: vec![] }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Resolve,
    Monomialize,
    Rectilinearize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolutionTree {
    pub mode: Mode,
    pub vars: Vec<String>,
    pub input: Jet,
    /// Factors of `input` for rectilinearization.
    pub factors: Vec<Jet>,
    pub truncation: u32,
    /// Number of blow-ups; each contributes one node per chart.
    pub blowups: usize,
    pub nodes: Vec<Node>,
}

impl ResolutionTree {
    pub(crate) fn from_root(mode: Mode, vars: Vec<String>, input: Jet, factors: Vec<Jet>, truncation: u32, root: TNode) -> Self {
        let mut nodes = Vec::new();
        flatten(root, None, &mut nodes);
        let parents: std::collections::BTreeSet<Option<usize>> =
            nodes.iter().filter(|n| n.kind == NodeKind::BlowupChart).map(|n| n.parent).collect();
        let blowups = parents.len();
        ResolutionTree { mode, vars, input, factors, truncation, blowups, nodes }
    }

    pub fn nvars(&self) -> usize {
        self.input.nvars()
    }

    pub fn children(&self, id: usize) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(move |n| n.parent == Some(id))
    }

    pub fn leaves(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| n.is_leaf())
    }

    /// Nodes from the root down to `id`.
    pub fn path(&self, id: usize) -> Vec<&Node> {
        let mut out = vec![&self.nodes[id]];
        while let Some(p) = out.last().and_then(|n| n.parent) {
            out.push(&self.nodes[p]);
        }
        out.reverse();
        out
    }

    pub fn blowups_on_path(&self, id: usize) -> usize {
        self.path(id).iter().filter(|n| n.kind == NodeKind::BlowupChart).count()
    }

    /// Largest number of blow-ups on a root-to-leaf path.
    pub fn max_blowup_depth(&self) -> usize {
        self.leaves().map(|l| self.blowups_on_path(l.id)).max().unwrap_or(0)
    }

    /// Largest number of blow-ups on a path before the strict transform first
    /// has order at most 1.
    pub fn smooth_depth(&self) -> usize {
        self.leaves()
            .map(|l| {
                let mut count = 0;
                for n in self.path(l.id) {
                    if n.kind == NodeKind::BlowupChart {
                        count += 1;
                    }
                    if n.kind != NodeKind::Root && n.snapshot.strict.order().finite().is_some_and(|k| k <= 1) {
                        break;
                    }
                }
                count
            })
            .max()
            .unwrap_or(0)
    }

    pub fn all_leaves_pass(&self) -> bool {
        self.leaves().all(Node::passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tree serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| ResolveError::Input(format!("tree JSON: {e}")))
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph resolution {\n  node [shape=box, fontname=\"monospace\"];\n");
        for n in &self.nodes {
            let label = match (&n.step, n.kind) {
                (_, NodeKind::Root) => format!("root\\n{}", escape(&self.input.to_poly_string(&self.vars))),
                (_, NodeKind::Leaf) => format!("leaf {}\\n{}", n.id, escape(&n.snapshot.strict.to_string())),
                (Some(s), _) => format!("{} {}\\n{}", n.id, escape(&s.describe()), pair_label(n)),
                (None, _) => n.id.to_string(),
            };
            let style = if n.is_leaf() {
                if n.passed() {
                    ", style=filled, fillcolor=palegreen"
                } else {
                    ", style=filled, fillcolor=salmon"
                }
            } else {
                ""
            };
            let _ = writeln!(out, "  n{} [label=\"{}\"{}];", n.id, label, style);
            if let Some(p) = n.parent {
                let _ = writeln!(out, "  n{p} -> n{};", n.id);
            }
        }
        out.push_str("}\n");
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:?} of {} ({} blow-ups)", self.mode, self.input.to_poly_string(&self.vars), self.blowups);
        self.text_rec(0, 0, &mut out);
        out
    }

    fn text_rec(&self, id: usize, depth: usize, out: &mut String) {
        let n = &self.nodes[id];
        let pad = "  ".repeat(depth);
        let head = match (&n.step, n.kind) {
            (_, NodeKind::Root) => "root".to_string(),
            (_, NodeKind::Leaf) => {
                let status = if n.passed() { "PASS" } else { "FAIL" };
                format!("leaf [{status}] strict = {}", n.snapshot.strict)
            }
            (Some(s), _) => s.describe(),
            (None, _) => format!("{:?}", n.kind),
        };
        let _ = writeln!(out, "{pad}#{} {head} {}", n.id, pair_label(n));
        if let Some(o) = &n.omega_scaled {
            let _ = writeln!(out, "{pad}  Ω = {o}");
        }
        for a in &n.assumptions {
            let _ = writeln!(out, "{pad}  assume: {a}");
        }
        for c in self.children(id).map(|c| c.id).collect::<Vec<_>>() {
            self.text_rec(c, depth + 1, out);
        }
    }
}

fn pair_label(n: &Node) -> String {
    n.invariant_pair.map(|p| format!("(d, s) = ({}, {})", p.d, p.s)).unwrap_or_default()
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn flatten(t: TNode, parent: Option<usize>, out: &mut Vec<Node>) {
    let id = out.len();
    let mut node = t.node;
    node.id = id;
    node.parent = parent;
    out.push(node);
    for c in t.children {
        flatten(c, Some(id), out);
    }
}

/// A function followed along a path: its strict transform and the power of
/// each exceptional it has shed, so that the total transform is
/// `strict · Π E_k^{exps[k]}`.
#[derive(Clone, Debug)]
pub(crate) struct Track {
    pub strict: Jet,
    pub exps: BTreeMap<usize, u64>,
}

impl Track {
    pub fn new(strict: Jet) -> Self {
        Track { strict, exps: BTreeMap::new() }
    }

    /// Blows up, given each ledger entry's exponent along the chart; returns
    /// the exponent factored from the strict transform.
    pub fn blowup(&mut self, shed: &[(usize, u64)], new_id: usize, chart: &ChartMap) -> Result<u32> {
        let (e, h) = blowup::strict_transform_hypersurface(&self.strict, chart)?;
        let lifted: u64 = shed.iter().map(|(id, k)| self.exps.get(id).copied().unwrap_or(0) * k).sum();
        self.exps.insert(new_id, u64::from(e) + lifted);
        self.strict = h;
        Ok(e)
    }

    /// The strict transform and every exceptional it contains are
    /// monomial × unit in chart coordinates.
    pub fn is_monomial(&self, ledger: &ExceptionalLedger) -> bool {
        series::monomial_unit_decompose(&self.strict).is_some()
            && ledger
                .entries
                .iter()
                .all(|e| self.exps.get(&e.id).copied().unwrap_or(0) == 0 || series::monomial_unit_decompose(&e.jet).is_some())
    }
}

/// Power of `y_i` dividing the pullback of each ledger entry.
pub(crate) fn shed_exponents(ledger: &ExceptionalLedger, chart: &ChartMap) -> Result<Vec<(usize, u64)>> {
    ledger
        .entries
        .iter()
        .map(|e| Ok((e.id, u64::from(blowup::strict_transform_hypersurface(&e.jet, chart)?.0))))
        .collect()
}

/// Replays steps along a path, keeping the composite map and exact
/// exceptional exponents of the total transforms and of `det dφ`, which is
/// `det_unit · Π E_k^{det_exps[k]}`.
#[derive(Clone, Debug)]
pub(crate) struct Replay {
    pub tracks: Vec<Track>,
    pub ledger: ExceptionalLedger,
    pub phi: PolyMap,
    pub det_unit: Jet,
    pub det_exps: BTreeMap<usize, u64>,
    pub t0: u32,
}

impl Replay {
    pub fn new(fs: Vec<Jet>, t0: u32) -> Self {
        let n = fs[0].nvars();
        Replay {
            tracks: fs.into_iter().map(Track::new).collect(),
            ledger: ExceptionalLedger::new(),
            phi: PolyMap::identity(n, t0),
            det_unit: Jet::one(n, t0),
            det_exps: BTreeMap::new(),
            t0,
        }
    }

    pub fn g(&self) -> &Jet {
        &self.tracks[0].strict
    }

    /// Applies a blow-up or coordinate step. Returns the exponent factored
    /// from the first strict transform for blow-ups.
    pub fn apply(&mut self, step: &Step) -> Result<Option<u32>> {
        let n = self.g().nvars();
        match step {
            Step::Translate { .. } => Err(ResolveError::Input("translation inside a chart path".into())),
            Step::Blowup { .. } => {
                let chart = step.chart_map(n)?.expect("blow-up chart");
                let new_id = self.ledger.next_id;
                let shed = shed_exponents(&self.ledger, &chart)?;
                let mut first = None;
                for t in &mut self.tracks {
                    let e = t.blowup(&shed, new_id, &chart)?;
                    first.get_or_insert(e);
                }
                let lift = |exps: &BTreeMap<usize, u64>| -> u64 {
                    shed.iter().map(|(id, e)| exps.get(id).copied().unwrap_or(0) * e).sum()
                };
                let codim = chart.center.codim() as u64 - 1;
                let det_new = codim + lift(&self.det_exps);
                self.det_exps.insert(new_id, det_new);
                self.det_unit = blowup::blowup_pullback(&self.det_unit, &chart);
                self.ledger = self.ledger.blowup(&chart, self.t0)?;
                self.phi = PolyMap::new(self.phi.components().iter().map(|c| blowup::blowup_pullback(c, &chart)).collect())?;
                Ok(first)
            }
            Step::Coordinates { map, .. } => {
                let psi = PolyMap::new(map.clone())?;
                if psi.len() != n || psi.nvars() != n {
                    return Err(ResolveError::Input("coordinate map has the wrong shape".into()));
                }
                for t in &mut self.tracks {
                    t.strict = series::substitute(&t.strict, &psi)?;
                }
                self.ledger = self.ledger.substitute(&psi)?;
                self.phi = self.phi.compose(&psi)?;
                self.det_unit = &series::substitute(&self.det_unit, &psi)? * &psi.jacobian_determinant()?;
                Ok(None)
            }
        }
    }

    /// `Π E_k^{exps[k]}` as a jet.
    pub fn exceptional_power(&self, exps: &BTreeMap<usize, u64>, t: u32) -> Jet {
        let n = self.g().nvars();
        let mut acc = Jet::one(n, t);
        for e in &self.ledger.entries {
            let k = exps.get(&e.id).copied().unwrap_or(0);
            if k > 0 {
                acc = &acc * &e.jet.truncate_to(t).pow(u32::try_from(k).unwrap_or(u32::MAX));
            }
        }
        acc
    }
}

pub(crate) fn point_strings(p: &[BigRational]) -> Vec<String> {
    p.iter().map(ToString::to_string).collect()
}

pub(crate) fn ledger_from_records(records: &[LedgerRecord]) -> ExceptionalLedger {
    ExceptionalLedger {
        entries: records.iter().map(|r| ExceptionalEntry { id: r.id, jet: r.jet.clone(), origin: r.origin }).collect(),
        next_id: records.iter().map(|r| r.id + 1).max().unwrap_or(0),
    }
}
