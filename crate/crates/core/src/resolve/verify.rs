//! Independent re-check of a finished tree by replaying every path.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::tree::{ledger_from_records, Mode, NodeKind, Replay, ResolutionTree, Step};
use super::{ResolveError, Result};
use crate::blowup::normal_crossings_jets;
use crate::series::{self, Jet, OrderResult};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeafReport {
    pub leaf: usize,
    pub checks: BTreeMap<String, bool>,
    pub assumptions: Vec<String>,
    /// Description of the chart when a check fails.
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub leaves: Vec<LeafReport>,
    pub all_pass: bool,
    /// Every zero-test assumption in the tree, deduplicated, in node order.
    pub assumptions: Vec<String>,
}

impl VerifyReport {
    /// True iff the checks stored in `tree` agree with this report.
    pub fn matches_tree(&self, tree: &ResolutionTree) -> bool {
        self.leaves.iter().all(|l| tree.nodes.get(l.leaf).is_some_and(|n| n.leaf_checks == l.checks))
    }
}

fn parse_point(p: &[String]) -> Result<Vec<BigRational>> {
    p.iter()
        .map(|s| BigRational::from_str(s).map_err(|_| ResolveError::Input(format!("bad coordinate {s:?}"))))
        .collect()
}

/// Equality up to the smaller of the two truncations.
fn agrees(a: &Jet, b: &Jet) -> bool {
    let t = a.truncation().min(b.truncation());
    a.truncate_to(t) == b.truncate_to(t)
}

fn monomial_track(replay: &Replay, k: usize) -> bool {
    replay.tracks[k].is_monomial(&replay.ledger)
}

/// Replays every root-to-leaf path and checks the leaf conditions.
pub fn verify_resolution(tree: &ResolutionTree) -> Result<VerifyReport> {
    let mut leaves = Vec::new();
    let mut all_assumptions: Vec<String> = Vec::new();
    for n in &tree.nodes {
        for a in &n.assumptions {
            if !all_assumptions.contains(a) {
                all_assumptions.push(a.clone());
            }
        }
    }
    for leaf in tree.leaves() {
        leaves.push(check_leaf(tree, leaf.id)?);
    }
    let all_pass = leaves.iter().all(|l| l.checks.values().all(|&b| b));
    Ok(VerifyReport { leaves, all_pass, assumptions: all_assumptions })
}

fn check_leaf(tree: &ResolutionTree, id: usize) -> Result<LeafReport> {
    let path = tree.path(id);
    let mut assumptions = Vec::new();
    for n in &path {
        for a in &n.assumptions {
            if !assumptions.contains(a) {
                assumptions.push(a.clone());
            }
        }
    }
    let cover = path
        .iter()
        .find(|n| n.kind == NodeKind::CoveringPiece)
        .ok_or_else(|| ResolveError::Input(format!("leaf {id} has no covering piece")))?;
    let Some(Step::Translate { point }) = &cover.step else {
        return Err(ResolveError::Input("covering piece without a base point".into()));
    };
    let point = parse_point(point)?;
    if point.len() != tree.nvars() {
        return Err(ResolveError::Input("base point has the wrong dimension".into()));
    }
    let g0 = tree.input.truncate_to(tree.truncation).translate(&point)?;
    let factors: Vec<Jet> = tree.factors.iter().map(|f| f.translate(&point)).collect::<std::result::Result<_, _>>()?;

    let mut checks = BTreeMap::new();
    let mut fs = vec![g0.clone()];
    fs.extend(factors.iter().cloned());
    let mut replay = Replay::new(fs, tree.truncation);
    let mut replay_ok = true;
    let mut failure: Option<String> = None;
    for node in path.iter().skip_while(|n| n.kind != NodeKind::CoveringPiece).skip(1) {
        let Some(step) = &node.step else { continue };
        match replay.apply(step) {
            Ok(Some(e)) => {
                if let Step::Blowup { exponent, .. } = step {
                    if *exponent != e {
                        replay_ok = false;
                        failure.get_or_insert(format!("node {}: exponent {e} instead of {exponent}", node.id));
                    }
                }
            }
            Ok(None) => {}
            Err(err) => {
                replay_ok = false;
                failure.get_or_insert(format!("node {}: {err}", node.id));
                break;
            }
        }
    }
    let leaf = &tree.nodes[id];
    let snap_ledger = ledger_from_records(&leaf.snapshot.ledger);
    if replay_ok && (*replay.g() != leaf.snapshot.strict || replay.ledger.entries != snap_ledger.entries) {
        replay_ok = false;
        failure.get_or_insert("replayed strict transform or ledger differs from the snapshot".into());
    }
    checks.insert("replay".to_string(), replay_ok);

    let g = replay.g();
    let order = g.order();
    let order_ok = matches!(order, OrderResult::Finite(k) if k <= 1);
    checks.insert("strict_order_le_1".to_string(), order_ok);

    let mut set: Vec<&Jet> = replay.ledger.through_origin().map(|e| &e.jet).collect();
    if order == OrderResult::Finite(1) {
        set.push(g);
    }
    let nc = normal_crossings_jets(&set);
    checks.insert("normal_crossings".to_string(), nc.holds);
    if !nc.holds {
        failure.get_or_insert(format!(
            "strict transform {g}; exceptionals [{}]: {}",
            set.iter().map(|j| j.to_string()).collect::<Vec<_>>().join(", "),
            nc.reason.clone().unwrap_or_default()
        ));
    }

    let t = replay.t0;
    let total = series::substitute(&g0, &replay.phi)?;
    let tt_identity = agrees(&total, &(&replay.tracks[0].strict * &replay.exceptional_power(&replay.tracks[0].exps, t)));
    let det = replay.phi.jacobian_determinant()?;
    let det_identity = agrees(&det, &(&replay.det_unit * &replay.exceptional_power(&replay.det_exps, t)));
    let det_unit = replay.det_unit.order() == OrderResult::Finite(0);
    let tt_ok = tt_identity && nc.holds;
    let det_ok = det_identity && det_unit && nc.holds;
    checks.insert("total_transform_nc".to_string(), tt_ok);
    checks.insert("jacobian_nc".to_string(), det_ok);
    if !tt_identity {
        failure.get_or_insert(format!("total transform {total} does not factor through the exceptionals"));
    } else if !det_identity || !det_unit {
        failure.get_or_insert(format!("Jacobian {det} does not factor as a unit times exceptionals"));
    }

    if tree.mode != Mode::Resolve {
        let ok = tt_identity && monomial_track(&replay, 0);
        checks.insert("monomial_in_chart".to_string(), ok);
        if !ok {
            failure.get_or_insert(format!("total transform {total} is not monomial × unit in chart coordinates"));
        }
    }
    if tree.mode == Mode::Rectilinearize {
        for (k, f) in factors.iter().enumerate() {
            let tr = &replay.tracks[k + 1];
            let pulled = series::substitute(f, &replay.phi)?;
            let ok = agrees(&pulled, &(&tr.strict * &replay.exceptional_power(&tr.exps, t))) && monomial_track(&replay, k + 1);
            checks.insert(format!("factor_{}_monomial", k + 1), ok);
        }
    }
    let pass = checks.values().all(|&b| b);
    Ok(LeafReport { leaf: id, checks, assumptions, counterexample: if pass { None } else { failure.or(Some("check failed".into())) } })
}
