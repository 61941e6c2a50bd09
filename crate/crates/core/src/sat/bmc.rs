//! Bounded-reachability and inductiveness formula builders.

use std::collections::BTreeMap;

use crate::formula::{frame_equality, Formula};
use crate::system::TransitionSystem;

/// A formula over `s+1` vocabulary copies that is satisfiable iff some state
/// reachable from `Init` in **at most** `s` steps satisfies `psi`.
///
/// Each unrolling level disjoins a stuttering frame-equality step with the
/// transition relation, which gives the at-most-`s` semantics in one query.
/// The copy-`s` projection of a model is a state in the intersection.
pub fn bmc_reach_formula(ts: &TransitionSystem, s: u32, psi: &Formula) -> Formula {
    let mut parts = vec![ts.init.clone()];
    for k in 0..s {
        let step = ts.tr.rename_copies(&BTreeMap::from([(0, k), (1, k + 1)]));
        parts.push(Formula::or(vec![step, frame_equality(ts.n(), k, k + 1)]));
    }
    parts.push(psi.rename_copies(&BTreeMap::from([(0, s)])));
    Formula::and(parts)
}

/// `candidate ∧ Tr ∧ ¬candidate'`: satisfiable iff the candidate admits a
/// counterexample to induction.
pub fn cti_formula(ts: &TransitionSystem, candidate: &Formula) -> Formula {
    let primed = candidate.prime().expect("candidate is over the unprimed vocabulary");
    Formula::and(vec![candidate.clone(), ts.tr.clone(), primed.negated()])
}
