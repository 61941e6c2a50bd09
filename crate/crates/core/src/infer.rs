//! Interpolation-style invariant inference.
//!
//! Both engines start from the candidate `¬Bad` and strengthen it on every
//! counterexample to induction, never excluding a state reachable within `s`
//! steps:
//!
//! - [`dual_itp`] conjoins a minimal clause over the negated pre-state;
//! - [`cdnf_itp`] conjoins the monotonization of the `s`-reachable states
//!   w.r.t. the pre-state, so the candidate stays a conjunction of DNFs and
//!   converges in at most `|I|cnf` iterations whenever some `s`-fenced
//!   inductive invariant `I` exists.
//!
//! A returned invariant is always re-verified by three verification SAT
//! checks before being handed out; those checks are charged to the *plain*
//! counter so the per-kind counts reflect the inference loop alone.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::formula::Formula;
use crate::monotone::efficient_mono;
use crate::sat::{QueryCounts, QueryKind, ReachableOracle, SatContext};
use crate::system::TransitionSystem;
use crate::types::{Clause, State, TermList};

/// One strengthening step of the candidate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Conjunct {
    Clause(Clause),
    /// A monotonization of the `s`-reachable states w.r.t. the recorded
    /// counterexample pre-state.
    Monotonization { witness: State, terms: TermList },
}

impl Conjunct {
    pub fn to_formula(&self) -> Formula {
        match self {
            Conjunct::Clause(c) => c.to_formula(),
            Conjunct::Monotonization { terms, .. } => terms.to_formula(),
        }
    }
}

/// `¬Bad` strengthened by a list of conjuncts. Kept as a conjunction of
/// DNFs; never flattened to CNF.
#[derive(Clone, Debug)]
pub struct CandidateInvariant {
    pub base: Formula,
    pub conjuncts: Vec<Conjunct>,
}

impl CandidateInvariant {
    pub fn new(ts: &TransitionSystem) -> Self {
        CandidateInvariant { base: ts.bad.clone().negated(), conjuncts: Vec::new() }
    }

    pub fn to_formula(&self) -> Formula {
        let mut parts = vec![self.base.clone()];
        parts.extend(self.conjuncts.iter().map(Conjunct::to_formula));
        Formula::and(parts)
    }
}

#[derive(Clone, Debug)]
pub enum InferResult {
    Invariant(Formula),
    Unsafe,
    /// A counterexample pre-state was reachable within `s` steps: the caller
    /// should retry with a larger bound.
    RestartNeeded { s: u32 },
}

/// Query counters and loop iterations of one engine run.
#[derive(Clone, Copy, Debug, Default, serde::Serialize, serde::Deserialize)]
pub struct RunStats {
    pub queries: QueryCounts,
    pub iterations: u64,
}

#[derive(Clone, Debug)]
pub struct InferenceOutcome {
    pub result: InferResult,
    pub stats: RunStats,
    /// Counterexample-to-induction pre-states, in discovery order.
    pub counterexamples: Vec<State>,
    /// The final candidate, with the blocking history.
    pub candidate: CandidateInvariant,
}

/// Which inductive-invariant condition a verification found broken.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Condition {
    Initiation,
    Consecution,
    Safety,
}

impl std::fmt::Display for Condition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Condition::Initiation => write!(f, "Init => I"),
            Condition::Consecution => write!(f, "I and Tr => I'"),
            Condition::Safety => write!(f, "I => not Bad"),
        }
    }
}

#[derive(Debug, Error, Clone)]
pub enum InferError {
    #[error("soundness gate: returned candidate violates {condition}, witness {witness}")]
    Soundness { condition: Condition, witness: String },
    #[error("minimal clause requested for a state reachable in {s} steps: {state}")]
    StateReachable { state: State, s: u32 },
}

/// The three inductive-invariant conditions, checked by plain SAT calls.
/// `Err` carries the broken condition and a witness state (or transition).
pub fn verify_invariant(
    ctx: &SatContext,
    ts: &TransitionSystem,
    inv: &Formula,
) -> Result<(), InferError> {
    let vocab = ts.vocab();
    let witness = |st: &State| st.to_string();
    // (i) Init ⟹ I
    let q = Formula::and(vec![ts.init.clone(), inv.clone().negated()]);
    if let Some(w) = ctx.solve(&q, &vocab, QueryKind::Plain) {
        return Err(InferError::Soundness {
            condition: Condition::Initiation,
            witness: witness(&w),
        });
    }
    // (ii) I ∧ Tr ⟹ I'
    let q = crate::sat::cti_formula(ts, inv);
    let pair = ts.pair_vocab();
    if let Some(w) = ctx.solve(&q, &pair, QueryKind::Plain) {
        let pre = w.project_copy(0, &pair);
        let post = w.project_copy(1, &pair);
        return Err(InferError::Soundness {
            condition: Condition::Consecution,
            witness: format!("({pre}, {post})"),
        });
    }
    // (iii) I ⟹ ¬Bad
    let q = Formula::and(vec![inv.clone(), ts.bad.clone()]);
    if let Some(w) = ctx.solve(&q, &vocab, QueryKind::Plain) {
        return Err(InferError::Soundness { condition: Condition::Safety, witness: witness(&w) });
    }
    Ok(())
}

/// The minimal clause `c ⊆ ¬σ` with `R_s ⟹ c`, built by one pass over the
/// literals in ascending variable order; each drop is validated by one BMC
/// query. Errors when `σ` itself lies in `R_s`.
pub fn minimal_clause(
    ctx: &SatContext,
    ts: &TransitionSystem,
    s: u32,
    sigma: &State,
) -> Result<Clause, InferError> {
    let vocab = ts.vocab();
    let sigma_cube = sigma.to_cube(&vocab);
    if ctx.bmc_witness(ts, s, &sigma_cube.to_formula()).is_some() {
        return Err(InferError::StateReachable { state: sigma.clone(), s });
    }
    let mut clause = sigma_cube.negate_to_clause();
    for var in vocab.vars() {
        let dropped = clause.without_var(var);
        // R_s ⟹ dropped  ⟺  R_s ∩ ¬dropped = ∅
        let blocked = dropped.negate_to_cube().to_formula();
        if ctx.bmc_witness(ts, s, &blocked).is_none() {
            clause = dropped;
        }
    }
    Ok(clause)
}

fn finish(
    ctx: &SatContext,
    ts: &TransitionSystem,
    result: InferResult,
    before: QueryCounts,
    iterations: u64,
    counterexamples: Vec<State>,
    candidate: CandidateInvariant,
) -> Result<InferenceOutcome, InferError> {
    if let InferResult::Invariant(inv) = &result {
        verify_invariant(ctx, ts, inv)?;
    }
    Ok(InferenceOutcome {
        result,
        stats: RunStats { queries: ctx.counts().minus(&before), iterations },
        counterexamples,
        candidate,
    })
}

/// Model-based interpolation, dual version: block each counterexample
/// pre-state with a minimal clause that keeps every `s`-reachable state.
pub fn dual_itp(
    ctx: &SatContext,
    ts: &TransitionSystem,
    s: u32,
) -> Result<InferenceOutcome, InferError> {
    let before = ctx.counts();
    let mut candidate = CandidateInvariant::new(ts);
    let mut cexs = Vec::new();
    let mut iterations = 0;
    if ctx.bmc_witness(ts, s, &ts.bad).is_some() {
        return finish(ctx, ts, InferResult::Unsafe, before, iterations, cexs, candidate);
    }
    loop {
        let formula = candidate.to_formula();
        match ctx.check_inductive(ts, &formula) {
            None => {
                return finish(
                    ctx,
                    ts,
                    InferResult::Invariant(formula),
                    before,
                    iterations,
                    cexs,
                    candidate,
                );
            }
            Some((pre, _post)) => {
                cexs.push(pre.clone());
                match minimal_clause(ctx, ts, s, &pre) {
                    Ok(clause) => {
                        iterations += 1;
                        candidate.conjuncts.push(Conjunct::Clause(clause));
                    }
                    Err(InferError::StateReachable { .. }) => {
                        return finish(
                            ctx,
                            ts,
                            InferResult::RestartNeeded { s },
                            before,
                            iterations,
                            cexs,
                            candidate,
                        );
                    }
                    Err(e) => return Err(e),
                }
            }
        }
    }
}

/// CDNF interpolation: block each counterexample pre-state σ by conjoining
/// `M_σ(R_s)`, computed with the output-sensitive monotonization over the
/// bounded-reachability oracle.
pub fn cdnf_itp(
    ctx: &SatContext,
    ts: &TransitionSystem,
    s: u32,
) -> Result<InferenceOutcome, InferError> {
    let before = ctx.counts();
    let vocab = ts.vocab();
    let mut candidate = CandidateInvariant::new(ts);
    let mut cexs = Vec::new();
    let mut iterations = 0;
    if ctx.bmc_witness(ts, s, &ts.bad).is_some() {
        return finish(ctx, ts, InferResult::Unsafe, before, iterations, cexs, candidate);
    }
    loop {
        let formula = candidate.to_formula();
        match ctx.check_inductive(ts, &formula) {
            None => {
                return finish(
                    ctx,
                    ts,
                    InferResult::Invariant(formula),
                    before,
                    iterations,
                    cexs,
                    candidate,
                );
            }
            Some((pre, _post)) => {
                cexs.push(pre.clone());
                if ctx.bmc_witness(ts, s, &pre.to_cube(&vocab).to_formula()).is_some() {
                    return finish(
                        ctx,
                        ts,
                        InferResult::RestartNeeded { s },
                        before,
                        iterations,
                        cexs,
                        candidate,
                    );
                }
                iterations += 1;
                let mut oracle = ReachableOracle::new(ctx, ts, s);
                let run = efficient_mono(&mut oracle, &pre.to_cube(&vocab));
                candidate.conjuncts.push(Conjunct::Monotonization {
                    witness: pre,
                    terms: run.monotonization.terms,
                });
            }
        }
    }
}

/// The dual transition system `(Bad, Tr⁻¹, Init)`, where `Tr⁻¹` swaps the
/// vocabulary copies. Running [`cdnf_itp`] on it and negating the result
/// yields the backwards-fenced variant.
pub fn reverse_system(ts: &TransitionSystem) -> TransitionSystem {
    let swapped = ts.tr.rename_copies(&BTreeMap::from([(0, 1), (1, 0)]));
    TransitionSystem::new(ts.n(), ts.bad.clone(), swapped, ts.init.clone())
        .expect("reversal preserves scopes")
}
