//! The desingularization loop.
//!
//! A run processes one chart at a time. At each chart origin the goal is
//! tested first; otherwise a phase with fixed `(d, s)` starts: the driver is
//! prepared, its coefficient data are brought to the monomial case by a
//! sub-run on `N = {x_n = 0}`, and combinatorial centers are blown up until
//! the pair drops.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rayon::prelude::*;

use super::model::{
    coefficient_data, incomparable_pairs, least_omega, monomial_centers, monomial_data, order_of, power_difference,
    prepare_local_model, ChangeKind, Driver, InvariantPair, LocalModel, OmegaScaled,
};
use super::tree::{shed_exponents, Mode, Node, NodeKind, PhaseInfo, Step, TNode, Track};
use super::{Config, ResolveError, Result};
use crate::blowup::{self, Center, ChartMap, ExceptionalLedger};
use crate::series::{self, monomial_unit_decompose, Jet, PolyMap};

#[derive(Clone, Debug)]
pub(crate) struct State {
    pub model: LocalModel,
    /// Functions carried through a sub-run.
    pub tracked: Vec<Track>,
    /// Composite map from the local model, for top-level runs only.
    pub phi: Option<PolyMap>,
    pub depth: usize,
    pub t0: u32,
    /// Assumptions to record on the next nodes.
    pub pending: Vec<String>,
    /// Strict order when the old exceptionals were last fixed, and those ids.
    pub level: Option<(u32, BTreeSet<usize>)>,
}

impl State {
    pub fn top(g: Jet, t0: u32) -> Result<Self> {
        let n = g.nvars();
        Ok(State {
            model: LocalModel::new(g, ExceptionalLedger::new())?,
            tracked: vec![],
            phi: Some(PolyMap::identity(n, t0)),
            depth: 0,
            t0,
            pending: vec![],
            level: None,
        })
    }

    fn is_top(&self) -> bool {
        self.phi.is_some()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Goal {
    /// Strict transform of order ≤ 1 with normal crossings.
    Resolve,
    /// Every tracked function monomial × unit.
    Monomialize,
    /// No early exit; used to stop at the monomial case.
    Never,
}

#[derive(Clone, Debug)]
pub(crate) struct Phase {
    pair: InvariantPair,
    budget: Option<u128>,
    used: u128,
    expected: Option<OmegaScaled>,
}

impl Phase {
    fn new(pair: InvariantPair) -> Self {
        Phase { pair, budget: None, used: 0, expected: None }
    }
}

#[derive(Clone, Debug)]
pub(crate) enum Next {
    Fresh,
    Reduce(u32),
    Monomial(Phase),
}

pub(crate) struct Ctx<'a> {
    cfg: &'a Config,
    mode: Mode,
    blowups: AtomicUsize,
    work: AtomicUsize,
    /// When set, reduction stops at the monomial case and records models.
    pub collect: Option<Mutex<Vec<(LocalModel, Option<OmegaScaled>)>>>,
}

const MAX_STAGES: u32 = 3;

impl<'a> Ctx<'a> {
    pub fn new(cfg: &'a Config, mode: Mode) -> Self {
        Ctx { cfg, mode, blowups: AtomicUsize::new(0), work: AtomicUsize::new(0), collect: None }
    }

    pub fn run(&self, st: State, goal: Goal, next: Next) -> Result<Vec<TNode>> {
        if st.is_top() {
            if let Some(k) = self.cfg.stop_after {
                if st.depth >= k {
                    let mut leaf = self.node(NodeKind::Leaf, None, &st);
                    leaf.notes.push(format!("stopped after {k} blow-ups"));
                    return Ok(vec![TNode::leaf(leaf)]);
                }
            }
        }
        if let Some(nodes) = self.goal_reached(&st, goal)? {
            return Ok(nodes);
        }
        match next {
            Next::Fresh => self.fresh(st, goal),
            Next::Reduce(stage) => self.reduce(st, goal, stage),
            Next::Monomial(phase) => self.monomial(st, goal, phase),
        }
    }

    fn node(&self, kind: NodeKind, step: Option<Step>, st: &State) -> Node {
        let mut node = Node::new(kind, step, &st.model);
        node.assumptions = st.pending.clone();
        if let (Some(phi), NodeKind::BlowupChart | NodeKind::Leaf) = (&st.phi, kind) {
            let names = Jet::default_names(phi.nvars(), "y");
            node.composed_map =
                phi.components().iter().enumerate().map(|(i, c)| format!("x{} = {}", i + 1, c.to_poly_string(&names))).collect();
        }
        node
    }

    fn leaf(&self, st: &State) -> TNode {
        TNode::leaf(self.node(NodeKind::Leaf, None, st))
    }

    fn map_children<T: Sync>(&self, items: &[T], f: impl Fn(&T) -> Result<TNode> + Sync + Send) -> Result<Vec<TNode>> {
        if self.cfg.parallel {
            items.par_iter().map(f).collect()
        } else {
            items.iter().map(f).collect()
        }
    }

    fn count_blowup(&self, st: &State) -> Result<()> {
        if st.is_top() && self.blowups.fetch_add(1, Ordering::SeqCst) + 1 > self.cfg.max_blowups {
            return Err(ResolveError::Budget(format!("more than {} blow-ups", self.cfg.max_blowups)));
        }
        let cap = self.cfg.max_blowups.saturating_mul(32);
        if self.work.fetch_add(1, Ordering::SeqCst) + 1 > cap {
            return Err(ResolveError::Budget(format!("more than {cap} blow-ups including sub-runs")));
        }
        Ok(())
    }

    pub(crate) fn apply_blowup(&self, st: &State, chart: &ChartMap) -> Result<(State, Step)> {
        let (e, g) = blowup::strict_transform_hypersurface(&st.model.g, chart)?;
        let mut tracked = st.tracked.clone();
        if !tracked.is_empty() {
            let shed = shed_exponents(&st.model.exceptionals, chart)?;
            for t in &mut tracked {
                t.blowup(&shed, st.model.exceptionals.next_id, chart)?;
            }
        }
        let exceptionals = st.model.exceptionals.blowup(chart, st.t0)?;
        let phi = match &st.phi {
            Some(p) => Some(PolyMap::new(p.components().iter().map(|c| blowup::blowup_pullback(c, chart)).collect())?),
            None => None,
        };
        let mut model = LocalModel { g, exceptionals, ..st.model.clone() };
        if st.level.as_ref().is_some_and(|(l, _)| order_of(&model.g).is_ok_and(|o| o < *l)) {
            model.old = model.exceptionals.entries.iter().map(|e| e.id).collect();
            if let Driver::Exceptional(id) = model.driver {
                model.old.remove(&id);
            }
        }
        model.refresh()?;
        let step = Step::Blowup {
            center: chart.center.indices().iter().map(|i| i + 1).collect(),
            chart: chart.chart_index + 1,
            exponent: e,
        };
        Ok((State { model, tracked, phi, depth: st.depth + 1, t0: st.t0, pending: vec![], level: st.level.clone() }, step))
    }

    fn apply_coordinates(&self, st: &State, kind: ChangeKind, lifted: bool, psi: PolyMap) -> Result<(State, Step)> {
        let model = st.model.substitute(&psi)?;
        let tracked = st
            .tracked
            .iter()
            .map(|t| Ok(Track { strict: series::substitute(&t.strict, &psi)?, exps: t.exps.clone() }))
            .collect::<Result<Vec<_>>>()?;
        let phi = match &st.phi {
            Some(p) => Some(p.compose(&psi)?),
            None => None,
        };
        let step = Step::Coordinates { kind, lifted, map: psi.into_components() };
        Ok((State { model, tracked, phi, depth: st.depth, t0: st.t0, pending: vec![], level: st.level.clone() }, step))
    }

    /// Hypersurfaces that must cross normally at the origin.
    fn nc_set(m: &LocalModel) -> Result<Vec<&Jet>> {
        let mut v: Vec<&Jet> = m.exceptionals.through_origin().map(|e| &e.jet).collect();
        if order_of(&m.g)? == 1 {
            v.push(&m.g);
        }
        Ok(v)
    }

    pub(crate) fn leaf_ok(m: &LocalModel) -> Result<bool> {
        if order_of(&m.g)? > 1 {
            return Ok(false);
        }
        Ok(blowup::normal_crossings_jets(&Self::nc_set(m)?).holds)
    }

    fn tracked_monomial(st: &State) -> bool {
        st.tracked.iter().all(|t| t.is_monomial(&st.model.exceptionals))
    }

    /// Coordinates making every hypersurface of the normal-crossings set a
    /// coordinate hyperplane, unless they already are.
    fn rectifier(st: &State) -> Result<Option<PolyMap>> {
        let hs = Self::nc_set(&st.model)?;
        let mut seen = BTreeSet::new();
        let already = hs.iter().all(|h| {
            monomial_unit_decompose(h).is_some_and(|(e, _)| e.degree() == 1 && seen.insert(e.0.iter().position(|&x| x == 1)))
        });
        if already {
            return Ok(None);
        }
        let (psi, _) = blowup::rectifying_map(&hs, st.model.nvars(), st.t0)?;
        Ok(Some(psi))
    }

    fn goal_reached(&self, st: &State, goal: Goal) -> Result<Option<Vec<TNode>>> {
        match goal {
            Goal::Resolve => {
                if !Self::leaf_ok(&st.model)? {
                    return Ok(None);
                }
                if st.is_top() && self.mode != Mode::Resolve {
                    return Ok(Some(vec![self.finish_principal(st)?]));
                }
                Ok(Some(vec![self.leaf(st)]))
            }
            Goal::Monomialize => {
                if Self::tracked_monomial(st) {
                    return Ok(Some(vec![self.leaf(st)]));
                }
                if !Self::leaf_ok(&st.model)? {
                    return Ok(None);
                }
                let psi = Self::rectifier(st)?
                    .ok_or_else(|| ResolveError::Invariant("normal crossings without monomial data".into()))?;
                let (child, step) = self.apply_coordinates(st, ChangeKind::Rectify, false, psi)?;
                if !Self::tracked_monomial(&child) {
                    return Err(ResolveError::Invariant("rectified data are not monomial".into()));
                }
                let mut node = self.node(NodeKind::CoordinateChange, Some(step), &child);
                node.assumptions = st.pending.clone();
                Ok(Some(vec![TNode { node, children: vec![self.leaf(&child)] }]))
            }
            Goal::Never => Ok(None),
        }
    }

    /// Rectifies and blows up the smooth strict transform, leaving the total
    /// transform monomial in chart coordinates.
    fn finish_principal(&self, st: &State) -> Result<TNode> {
        let mut chain: Vec<Node> = Vec::new();
        let mut cur = st.clone();
        if let Some(psi) = Self::rectifier(&cur)? {
            let (child, step) = self.apply_coordinates(&cur, ChangeKind::Rectify, false, psi)?;
            chain.push(self.node(NodeKind::CoordinateChange, Some(step), &child));
            cur = child;
        }
        if order_of(&cur.model.g)? == 1 {
            let (e, _) = monomial_unit_decompose(&cur.model.g)
                .filter(|(e, _)| e.degree() == 1)
                .ok_or_else(|| ResolveError::Invariant("strict transform is not a coordinate".into()))?;
            let j = e.0.iter().position(|&x| x == 1).expect("unit exponent");
            let n = cur.model.nvars();
            let chart = ChartMap::new(Center::new(vec![j], n)?, j, n)?;
            self.count_blowup(&cur)?;
            let (child, step) = self.apply_blowup(&cur, &chart)?;
            let mut node = self.node(NodeKind::BlowupChart, Some(step), &child);
            node.notes.push("codimension-one blow-up along the strict transform".into());
            chain.push(node);
            cur = child;
        }
        let mut t = self.leaf(&cur);
        while let Some(n) = chain.pop() {
            t = TNode { node: n, children: vec![t] };
        }
        t.node.assumptions.extend(st.pending.iter().cloned());
        Ok(t)
    }

    /// Starts a phase. The exceptionals present when the strict order last
    /// dropped are the old ones; new ones join only at the next drop.
    fn fresh(&self, mut st: State, goal: Goal) -> Result<Vec<TNode>> {
        let m = &st.model;
        let ord = order_of(&m.g)?;
        let all: BTreeSet<usize> = m.exceptionals.entries.iter().map(|e| e.id).collect();
        let through: Vec<usize> = m.exceptionals.through_origin().map(|e| e.id).collect();
        let mut old = match &st.level {
            Some((l, ids)) if ord >= *l => ids.intersection(&all).copied().collect(),
            _ => all.clone(),
        };
        let driver = if ord >= 1 {
            Driver::Strict
        } else {
            let id = match through.iter().filter(|id| old.contains(id)).max() {
                Some(&id) => id,
                None => {
                    old = all.clone();
                    *through.iter().max().ok_or_else(|| ResolveError::Invariant("no hypersurface through the origin".into()))?
                }
            };
            Driver::Exceptional(id)
        };
        st.level = Some((ord, old.clone()));
        st.model = LocalModel::with_driver(m.g.clone(), m.exceptionals.clone(), old, driver)?;
        let prep = prepare_local_model(&st.model)?;
        self.chain(st, prep.changes, goal)
    }

    fn chain(&self, st: State, mut changes: Vec<(ChangeKind, PolyMap)>, goal: Goal) -> Result<Vec<TNode>> {
        if changes.is_empty() {
            return self.run(st, goal, Next::Reduce(1));
        }
        let (kind, psi) = changes.remove(0);
        let (child, step) = self.apply_coordinates(&st, kind, false, psi)?;
        let mut node = self.node(NodeKind::CoordinateChange, Some(step), &child);
        node.assumptions = st.pending.clone();
        Ok(vec![TNode { node, children: self.chain(child, changes, goal)? }])
    }

    fn reduce(&self, mut st: State, goal: Goal, stage: u32) -> Result<Vec<TNode>> {
        if !st.model.prepared {
            return Err(ResolveError::Invariant("reduction on unprepared coordinates".into()));
        }
        let data = coefficient_data(&st.model)?;
        for a in data.assumptions() {
            if !st.pending.contains(&a) {
                st.pending.push(a);
            }
        }
        let nz = data.nonzero();
        let md = monomial_data(&nz, st.model.d)?;
        let done = nz.is_empty() || md.as_ref().is_some_and(|md| incomparable_pairs(md).is_empty());
        if done {
            if let Some(c) = &self.collect {
                let omega = md.as_deref().filter(|m| !m.is_empty()).map(least_omega).transpose()?;
                c.lock().expect("collector").push((st.model.clone(), omega));
                return Ok(vec![self.leaf(&st)]);
            }
            let phase = Phase::new(st.model.pair());
            return self.monomial(st, goal, phase);
        }
        if stage > MAX_STAGES {
            return Err(ResolveError::Invariant("coefficient data did not reach the monomial case".into()));
        }
        let mut tracked: Vec<Jet> = nz.iter().map(|x| x.f.jet.clone()).collect();
        if let Some(md) = &md {
            for (i, j) in incomparable_pairs(md) {
                let diff = power_difference(&nz[i].f, &nz[j].f);
                if diff.is_zero() {
                    st.pending.push(format!(
                        "{} and {} powers agree, certified to degree {}",
                        nz[i].label,
                        nz[j].label,
                        diff.truncation()
                    ));
                } else {
                    tracked.push(diff);
                }
            }
        }
        let f = tracked.iter().skip(1).fold(tracked[0].clone(), |a, b| &a * b);
        let tracked = tracked.into_iter().map(Track::new).collect();
        if f.is_zero() {
            return Err(ResolveError::Truncation("product of coefficient data vanishes up to truncation".into()));
        }
        let sub = State {
            model: LocalModel::new(f, ExceptionalLedger::new())?,
            tracked,
            phi: None,
            depth: 0,
            t0: st.t0,
            pending: vec![],
            level: None,
        };
        let subs = self.run(sub, Goal::Monomialize, Next::Fresh)?;
        self.lift(st, &subs, goal, stage + 1)
    }

    /// Replays a sub-run on `N` as blow-ups and coordinate changes of `U`.
    fn lift(&self, st: State, subs: &[TNode], goal: Goal, stage: u32) -> Result<Vec<TNode>> {
        if let [only] = subs {
            if only.node.is_leaf() {
                let mut st = st;
                st.pending.extend(only.node.assumptions.iter().cloned());
                return self.run(st, goal, Next::Reduce(stage));
            }
        }
        let n = st.model.nvars();
        if subs.iter().any(|s| matches!(s.node.step, Some(Step::Blowup { .. }))) {
            self.count_blowup(&st)?;
        }
        self.map_children(subs, |sub| {
            let step = sub.node.step.as_ref().ok_or_else(|| ResolveError::Invariant("sub-run node without step".into()))?;
            let (mut child, lifted, kind) = match step {
                Step::Blowup { .. } => {
                    let ch = step.chart_map(n - 1)?.expect("chart");
                    let chart = ChartMap::new(ch.center.clone(), ch.chart_index, n)?;
                    let (c, s) = self.apply_blowup(&st, &chart)?;
                    (c, s, NodeKind::BlowupChart)
                }
                Step::Coordinates { kind, map, .. } => {
                    let t = map.iter().map(Jet::truncation).min().unwrap_or(st.t0);
                    let mut comps: Vec<Jet> = map.iter().map(|c| c.insert_variable(n - 1)).collect();
                    comps.push(Jet::variable(n, t, n - 1));
                    let (c, s) = self.apply_coordinates(&st, *kind, true, PolyMap::new(comps)?)?;
                    (c, s, NodeKind::CoordinateChange)
                }
                Step::Translate { .. } => return Err(ResolveError::Invariant("translation in a sub-run".into())),
            };
            if !child.model.prepared {
                return Err(ResolveError::Invariant("lifted step broke the prepared form".into()));
            }
            child.pending = sub.node.assumptions.clone();
            let mut node = self.node(kind, Some(lifted), &child);
            node.assumptions.extend(st.pending.iter().cloned());
            node.notes.push("lifted from the sub-run on N".into());
            child.pending.clear();
            let children = self.lift(child, &sub.children, goal, stage)?;
            Ok(TNode { node, children })
        })
    }

    fn monomial(&self, st: State, goal: Goal, phase: Phase) -> Result<Vec<TNode>> {
        let m = &st.model;
        let n = m.nvars();
        let d = m.d;
        if !m.prepared {
            return Err(ResolveError::Invariant("monomial step on unprepared coordinates".into()));
        }
        let data = coefficient_data(m)?;
        let nz = data.nonzero();
        if nz.is_empty() {
            if d < 2 {
                return self.run(st, goal, Next::Fresh);
            }
            let chart = ChartMap::new(Center::new(vec![n - 1], n)?, n - 1, n)?;
            self.count_blowup(&st)?;
            let (child, step) = self.apply_blowup(&st, &chart)?;
            self.check_exponent(m, &step, d)?;
            let mut node = self.node(NodeKind::BlowupChart, Some(step), &child);
            node.assumptions = st.pending.clone();
            node.notes.push("geometrically smooth: blow up N".into());
            let children = self.run(child, goal, Next::Fresh)?;
            return Ok(vec![TNode { node, children }]);
        }
        let md = monomial_data(&nz, d)?.ok_or_else(|| ResolveError::Invariant("coefficient data not monomial".into()))?;
        let omega = least_omega(&md)?;
        if let Some(exp) = &phase.expected {
            if *exp != omega {
                return Err(ResolveError::Invariant(format!("Ω bookkeeping {exp} disagrees with recomputed {omega}")));
            }
        }
        if omega.sum() < omega.scale {
            return Err(ResolveError::Invariant(format!("|Ω| < 1 at a point with pair ({}, {})", d, m.s)));
        }
        let budget = phase.budget.unwrap_or_else(|| omega.sum());
        let used = phase.used + 1;
        if used > budget {
            return Err(ResolveError::Invariant(format!("phase budget {budget} exceeded")));
        }
        let center = monomial_centers(&omega)?.remove(0);
        let set: Vec<usize> = center.indices().iter().copied().filter(|&i| i != n - 1).collect();
        let charts = ChartMap::charts(&center, n);
        self.count_blowup(&st)?;
        self.map_children(&charts, |chart| {
            let (mut child, step) = self.apply_blowup(&st, chart)?;
            self.check_exponent(m, &step, d)?;
            let pair = child.model.pair();
            let next = if pair == phase.pair {
                if chart.chart_index == n - 1 {
                    return Err(ResolveError::Invariant("pair persists in the x_n chart".into()));
                }
                let expected = omega.after_blowup(&set, chart.chart_index)?;
                if expected.sum() >= omega.sum() || expected.sum() < expected.scale {
                    return Err(ResolveError::Invariant(format!("no descent from Ω = {omega} to {expected}")));
                }
                Next::Monomial(Phase { pair, budget: Some(budget), used, expected: Some(expected) })
            } else if pair.d == phase.pair.d && pair.s < phase.pair.s && chart.chart_index != n - 1 {
                Next::Monomial(Phase::new(pair))
            } else {
                Next::Fresh
            };
            let mut node = self.node(NodeKind::BlowupChart, Some(step), &child);
            node.assumptions = st.pending.clone();
            node.omega_scaled = Some(omega.clone());
            node.phase = Some(PhaseInfo { budget, used });
            child.pending.clear();
            let children = self.run(child, goal, next)?;
            Ok(TNode { node, children })
        })
    }

    fn check_exponent(&self, m: &LocalModel, step: &Step, d: u32) -> Result<()> {
        if let (Driver::Strict, Step::Blowup { exponent, .. }) = (m.driver, step) {
            if *exponent != d {
                return Err(ResolveError::Invariant(format!("strict transform factored y^{exponent}, expected y^{d}")));
            }
        }
        Ok(())
    }
}
