//! SAT oracle plumbing: the solver contract, query accounting, and the
//! intersection-oracle interface used by the monotonization algorithms.

pub mod bmc;
pub mod cnf;
pub mod dimacs;
pub mod solver;

use std::cell::{Cell, RefCell};

use crate::formula::Formula;
use crate::system::TransitionSystem;
use crate::types::{State, Vocab};

pub use bmc::{bmc_reach_formula, cti_formula};
pub use cnf::{encode_cnf, CnfEncoding};
pub use dimacs::ExternalSolver;
pub use solver::{BuiltinSolver, Cnf, SatBackend};

/// Which counter a query is charged to.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum QueryKind {
    Plain,
    Bmc,
    Inductiveness,
}

/// Counts of SAT queries by kind. Monotonically nondecreasing within a run;
/// every solve increments exactly one counter.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, serde::Serialize, serde::Deserialize)]
pub struct QueryCounts {
    pub plain: u64,
    pub bmc: u64,
    pub inductiveness: u64,
}

impl QueryCounts {
    pub fn total(&self) -> u64 {
        self.plain + self.bmc + self.inductiveness
    }

    pub fn minus(&self, earlier: &QueryCounts) -> QueryCounts {
        QueryCounts {
            plain: self.plain - earlier.plain,
            bmc: self.bmc - earlier.bmc,
            inductiveness: self.inductiveness - earlier.inductiveness,
        }
    }
}

#[derive(Default)]
struct CounterCells {
    plain: Cell<u64>,
    bmc: Cell<u64>,
    inductiveness: Cell<u64>,
}

/// A SAT query engine with per-kind accounting. One instance per run,
/// single-threaded.
pub struct SatContext {
    backend: RefCell<Box<dyn SatBackend>>,
    counter: CounterCells,
}

impl SatContext {
    /// The built-in deterministic solver.
    pub fn new(seed: u64) -> SatContext {
        SatContext::with_backend(Box::new(BuiltinSolver { seed }))
    }

    pub fn with_backend(backend: Box<dyn SatBackend>) -> SatContext {
        SatContext { backend: RefCell::new(backend), counter: CounterCells::default() }
    }

    pub fn counts(&self) -> QueryCounts {
        QueryCounts {
            plain: self.counter.plain.get(),
            bmc: self.counter.bmc.get(),
            inductiveness: self.counter.inductiveness.get(),
        }
    }

    fn bump(&self, kind: QueryKind) {
        let cell = match kind {
            QueryKind::Plain => &self.counter.plain,
            QueryKind::Bmc => &self.counter.bmc,
            QueryKind::Inductiveness => &self.counter.inductiveness,
        };
        cell.set(cell.get() + 1);
    }

    /// One top-level SAT call. `None` iff `f` is unsatisfiable; otherwise a
    /// total assignment over `vocab` (variables not constrained by `f`
    /// default to false).
    pub fn solve(&self, f: &Formula, vocab: &Vocab, kind: QueryKind) -> Option<State> {
        self.bump(kind);
        let enc = encode_cnf(f);
        debug_assert!(
            enc.var_map.keys().all(|v| vocab.contains(*v)),
            "formula variables must lie inside the query vocabulary"
        );
        let model = self.backend.borrow_mut().solve_cnf(&enc.cnf)?;
        let mut state = State::all_false(vocab.len());
        for (var, &pool) in &enc.var_map {
            if let Some(pos) = vocab.position(*var) {
                state.set_bit(pos, model[pool]);
            }
        }
        Some(state)
    }

    pub fn is_sat(&self, f: &Formula, vocab: &Vocab, kind: QueryKind) -> bool {
        self.solve(f, vocab, kind).is_some()
    }

    /// BMC check: a witness state in `R_s ∩ psi`, or `None` when the
    /// intersection is empty. Charged to the BMC counter.
    pub fn bmc_witness(&self, ts: &TransitionSystem, s: u32, psi: &Formula) -> Option<State> {
        let f = bmc_reach_formula(ts, s, psi);
        let vocab = Vocab::with_copies(ts.n(), s + 1);
        let model = self.solve(&f, &vocab, QueryKind::Bmc)?;
        Some(model.project_copy(s, &vocab))
    }

    /// Inductiveness check: `None` iff `candidate ∧ Tr ⟹ candidate'`;
    /// otherwise a counterexample to induction `(σ, σ')`.
    pub fn check_inductive(
        &self,
        ts: &TransitionSystem,
        candidate: &Formula,
    ) -> Option<(State, State)> {
        let f = cti_formula(ts, candidate);
        let vocab = ts.pair_vocab();
        let model = self.solve(&f, &vocab, QueryKind::Inductiveness)?;
        Some((model.project_copy(0, &vocab), model.project_copy(1, &vocab)))
    }
}

/// An implicit set φ, answering `SAT(φ ∧ θ)` with a witness projected to the
/// designated vocabulary copy. The monotonization algorithm works through
/// this interface and never needs φ explicitly.
pub trait IntersectionOracle {
    fn vocab(&self) -> Vocab;

    /// A state satisfying both φ and `theta`, or `None` when φ ∧ θ is empty.
    fn witness(&mut self, theta: &Formula) -> Option<State>;
}

/// An explicitly given formula, queried with plain SAT calls.
pub struct FormulaOracle<'a> {
    ctx: &'a SatContext,
    formula: Formula,
    vocab: Vocab,
    kind: QueryKind,
}

impl<'a> FormulaOracle<'a> {
    pub fn new(ctx: &'a SatContext, formula: Formula, vocab: Vocab) -> Self {
        FormulaOracle { ctx, formula, vocab, kind: QueryKind::Plain }
    }

    pub fn with_kind(mut self, kind: QueryKind) -> Self {
        self.kind = kind;
        self
    }
}

impl IntersectionOracle for FormulaOracle<'_> {
    fn vocab(&self) -> Vocab {
        self.vocab
    }

    fn witness(&mut self, theta: &Formula) -> Option<State> {
        let q = Formula::and(vec![self.formula.clone(), theta.clone()]);
        self.ctx.solve(&q, &self.vocab, self.kind)
    }
}

/// The set of states reachable in at most `s` steps, presented as an
/// intersection oracle over the unprimed vocabulary. Every query is one BMC
/// call.
pub struct ReachableOracle<'a> {
    ctx: &'a SatContext,
    ts: &'a TransitionSystem,
    s: u32,
}

impl<'a> ReachableOracle<'a> {
    pub fn new(ctx: &'a SatContext, ts: &'a TransitionSystem, s: u32) -> Self {
        ReachableOracle { ctx, ts, s }
    }
}

impl IntersectionOracle for ReachableOracle<'_> {
    fn vocab(&self) -> Vocab {
        self.ts.vocab()
    }

    fn witness(&mut self, theta: &Formula) -> Option<State> {
        self.ctx.bmc_witness(self.ts, self.s, theta)
    }
}

/// The post-image of a frame, `Tr(ξ) ∪ Init`, presented implicitly: a query
/// `θ` is answered by solving `((ξ ∧ Tr) ∨ Init') ∧ θ'` and projecting the
/// model to the primed copy.
pub struct PostImageOracle<'a> {
    ctx: &'a SatContext,
    ts: &'a TransitionSystem,
    frame: Formula,
}

impl<'a> PostImageOracle<'a> {
    pub fn new(ctx: &'a SatContext, ts: &'a TransitionSystem, frame: Formula) -> Self {
        PostImageOracle { ctx, ts, frame }
    }
}

impl IntersectionOracle for PostImageOracle<'_> {
    fn vocab(&self) -> Vocab {
        self.ts.vocab()
    }

    fn witness(&mut self, theta: &Formula) -> Option<State> {
        let init_primed = self.ts.init.prime().expect("init is unprimed");
        let theta_primed = theta.prime().expect("queries are over the unprimed vocabulary");
        let q = Formula::and(vec![
            Formula::or(vec![
                Formula::and(vec![self.frame.clone(), self.ts.tr.clone()]),
                init_primed,
            ]),
            theta_primed,
        ]);
        let pair = self.ts.pair_vocab();
        let model = self.ctx.solve(&q, &pair, QueryKind::Plain)?;
        Some(model.project_copy(1, &pair))
    }
}
