//! Exact learning of CDNF formulas from equivalence and membership queries.
//!
//! The learner maintains a conjunction of pairs `(H_i, b_i)` where each
//! `H_i` is a `b_i`-monotone DNF built from membership-guided walks. A
//! counterexample that satisfies the hypothesis opens a new pair (it is a
//! negative example and becomes a basis state); one that falsifies the
//! hypothesis grows every violated `H_i` at once.

use thiserror::Error;

use crate::formula::Formula;
use crate::monotone::moncube;
use crate::oracle::ExplicitSet;
use crate::types::{State, TermList, Vocab};

/// Answers whether a hypothesis matches the hidden target, with a
/// differentiating counterexample otherwise.
pub trait EquivalenceOracle {
    fn eq(&mut self, hypothesis: &Formula) -> Option<State>;
}

/// Answers whether a state satisfies the hidden target.
pub trait MembershipOracle {
    fn mq(&mut self, x: &State) -> bool;
}

/// The learner's state: one `b_i`-monotone DNF per basis state, conjunction
/// semantics.
#[derive(Clone, Debug, Default)]
pub struct Hypothesis {
    pub pairs: Vec<(TermList, State)>,
}

impl Hypothesis {
    pub fn to_formula(&self) -> Formula {
        Formula::and(self.pairs.iter().map(|(h, _)| h.to_formula()).collect())
    }

    pub fn satisfied_by(&self, x: &State, vocab: &Vocab) -> bool {
        self.pairs.iter().all(|(h, _)| x.satisfies_dnf(h, vocab))
    }

    /// Syntactic check: every term of `H_i` omits all literals of `b_i`.
    pub fn is_b_monotone_form(&self, vocab: &Vocab) -> bool {
        self.pairs.iter().all(|(h, b)| {
            let b_cube = b.to_cube(vocab);
            h.terms.iter().all(|t| t.literals().iter().all(|l| !b_cube.contains(*l)))
        })
    }
}

#[derive(Clone, Copy, Debug, Default, serde::Serialize, serde::Deserialize)]
pub struct LearnStats {
    pub eq_queries: u64,
    pub mq_queries: u64,
    pub basis_size: u64,
}

#[derive(Clone, Debug)]
pub struct LearnOutcome {
    pub formula: Formula,
    pub hypothesis: Hypothesis,
    pub stats: LearnStats,
}

#[derive(Debug, Error, Clone)]
pub enum LearnError {
    #[error("inconsistent oracles: {detail} (state {state})")]
    InconsistentOracles { state: State, detail: String },
}

/// The membership-guided walk: flips variables of `σ` towards the basis
/// state `b` as long as membership holds, in ascending index order and
/// repeated passes. Requires `mq(σ) = true`. Returns `moncube(v, b)` for the
/// walked-down `v`, an implicant of `M_b(target)`.
pub fn gen_mq(
    sigma: &State,
    b: &State,
    mq: &mut dyn MembershipOracle,
    vocab: &Vocab,
) -> (crate::types::Cube, u64) {
    let mut v = sigma.clone();
    let mut queries = 0;
    let mut walked = true;
    while walked {
        walked = false;
        for pos in 0..vocab.len() {
            if v.bit(pos) == b.bit(pos) {
                continue;
            }
            let x = v.with_bit(pos, b.bit(pos));
            queries += 1;
            if mq.mq(&x) {
                v = x;
                walked = true;
            }
        }
    }
    (moncube(&v, &b.to_cube(vocab), vocab), queries)
}

/// Learns a formula equivalent to the oracles' target over `n` variables.
///
/// Aborts with [`LearnError::InconsistentOracles`] when an equivalence
/// counterexample does not actually differentiate (its membership
/// classification agrees with the hypothesis).
pub fn cdnf_learn(
    eq: &mut dyn EquivalenceOracle,
    mq: &mut dyn MembershipOracle,
    n: u32,
) -> Result<LearnOutcome, LearnError> {
    let vocab = Vocab::single(n);
    let mut hyp = Hypothesis::default();
    let mut stats = LearnStats::default();
    loop {
        stats.eq_queries += 1;
        let x = match eq.eq(&hyp.to_formula()) {
            None => {
                stats.basis_size = hyp.pairs.len() as u64;
                return Ok(LearnOutcome { formula: hyp.to_formula(), hypothesis: hyp, stats });
            }
            Some(x) => x,
        };
        let hyp_val = hyp.satisfied_by(&x, &vocab);
        stats.mq_queries += 1;
        let target_val = mq.mq(&x);
        if hyp_val == target_val {
            return Err(LearnError::InconsistentOracles {
                state: x,
                detail: format!(
                    "equivalence counterexample classified {target_val} by both sides"
                ),
            });
        }
        if hyp_val {
            // negative example: a new basis state with an empty DNF
            hyp.pairs.push((TermList::bottom(), x));
        } else {
            // positive example: grow every violated H_i
            let mut grew = false;
            let pairs = std::mem::take(&mut hyp.pairs);
            let mut updated = Vec::with_capacity(pairs.len());
            for (mut h, b) in pairs {
                if !x.satisfies_dnf(&h, &vocab) {
                    let (term, walk_queries) = gen_mq(&x, &b, mq, &vocab);
                    stats.mq_queries += walk_queries;
                    if !x.satisfies_cube(&term, &vocab) {
                        return Err(LearnError::InconsistentOracles {
                            state: x,
                            detail: "membership walk produced a term missing its seed"
                                .to_string(),
                        });
                    }
                    h.terms.push(term);
                    grew = true;
                }
                updated.push((h, b));
            }
            hyp.pairs = updated;
            debug_assert!(grew, "a falsified conjunction has a falsified conjunct");
        }
    }
}

/// Membership-query monotonization: computes a DNF covering of the target
/// set w.r.t. the basis state `b` using only membership walks, taking
/// positive examples lowest-index first. On a `b`-monotone target this
/// produces exactly the terms of the intersection-query algorithm, in the
/// same order; its query count, however, scales with the target's own DNF.
pub fn mq_monotonize(target: &ExplicitSet, b: &State, vocab: &Vocab) -> TermList {
    struct SetMq<'a> {
        set: &'a ExplicitSet,
    }
    impl MembershipOracle for SetMq<'_> {
        fn mq(&mut self, x: &State) -> bool {
            self.set.contains_state(x)
        }
    }
    let mut mq = SetMq { set: target };
    let mut covered = TermList::bottom();
    loop {
        let next = target
            .states()
            .find(|s| !s.satisfies_dnf(&covered, vocab));
        let sigma = match next {
            Some(s) => s,
            None => return covered,
        };
        let (term, _) = gen_mq(&sigma, b, &mut mq, vocab);
        covered.terms.push(term);
    }
}

/// An exhaustive teacher over all `2^n` states of an explicit target;
/// equivalence counterexamples are lowest-index first.
pub struct TabularTeacher {
    target: ExplicitSet,
    vocab: Vocab,
}

impl TabularTeacher {
    pub fn new(target: ExplicitSet, vocab: Vocab) -> Self {
        assert_eq!(target.bits(), vocab.len());
        TabularTeacher { target, vocab }
    }

    pub fn target(&self) -> &ExplicitSet {
        &self.target
    }
}

impl EquivalenceOracle for TabularTeacher {
    fn eq(&mut self, hypothesis: &Formula) -> Option<State> {
        (0..self.target.space()).map(|i| State::from_index(i, self.vocab.len())).find(|s| {
            hypothesis.eval(s, &self.vocab).expect("hypothesis scope")
                != self.target.contains_state(s)
        })
    }
}

impl MembershipOracle for TabularTeacher {
    fn mq(&mut self, x: &State) -> bool {
        self.target.contains_state(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::monotone::efficient_mono;
    use crate::oracle::{self, Caps, ExplicitOracle};
    use crate::parse::parse_formula;
    use crate::types::Cube;

    fn caps() -> Caps {
        Caps::default()
    }

    fn teacher_for(f: &str, n: u32) -> TabularTeacher {
        let vocab = Vocab::single(n);
        let set =
            ExplicitSet::from_formula(&parse_formula(f).unwrap(), &vocab, &caps()).unwrap();
        TabularTeacher::new(set, vocab)
    }

    fn learn_against(teacher: &mut TabularTeacher, n: u32) -> LearnOutcome {
        // the teacher plays both oracle roles; split via a small adapter
        struct Mq {
            target: ExplicitSet,
        }
        impl MembershipOracle for Mq {
            fn mq(&mut self, x: &State) -> bool {
                self.target.contains_state(x)
            }
        }
        let mut mq = Mq { target: teacher.target().clone() };
        cdnf_learn(teacher, &mut mq, n).unwrap()
    }

    #[test]
    fn constant_true_needs_one_query_and_no_basis() {
        let mut teacher = teacher_for("true", 3);
        let out = learn_against(&mut teacher, 3);
        assert_eq!(out.stats.eq_queries, 1);
        assert_eq!(out.stats.basis_size, 0);
        assert_eq!(out.formula, Formula::Const(true));
    }

    #[test]
    fn single_clause_needs_one_basis_state() {
        let mut teacher = teacher_for("(or (not p0) p1)", 3);
        let out = learn_against(&mut teacher, 3);
        assert_eq!(out.stats.basis_size, 1);
        let vocab = Vocab::single(3);
        for idx in 0..8 {
            let s = State::from_index(idx, 3);
            assert_eq!(
                out.formula.eval(&s, &vocab).unwrap(),
                teacher.target().contains_state(&s)
            );
        }
    }

    #[test]
    fn learns_random_trees_within_the_query_bound() {
        let caps = caps();
        let mut rng = gen::rng_from_seed(2024);
        for round in 0..60 {
            let n = 3 + round % 6; // up to n = 8
            let vocab = Vocab::single(n);
            let tree = gen::random_tree(&mut rng, n, 8);
            let set = ExplicitSet::from_dnf(&tree.to_dnf(), &vocab, &caps).unwrap();
            let mut teacher = TabularTeacher::new(set.clone(), vocab);
            let out = learn_against(&mut teacher, n);
            for idx in 0..set.space() {
                let s = State::from_index(idx, n as usize);
                assert_eq!(out.formula.eval(&s, &vocab).unwrap(), set.contains(idx));
            }
            assert!(out.hypothesis.is_b_monotone_form(&vocab));
            // eq-query bound in terms of the target's exact sizes
            let cnf = oracle::min_cnf_size(&set, &caps).unwrap() as u64;
            let dnf = oracle::min_dnf_size(&set, &caps).unwrap() as u64;
            let bound = cnf * (dnf * n as u64 + 1) + 1;
            assert!(
                out.stats.eq_queries <= bound,
                "eq {} > bound {bound} (cnf {cnf} dnf {dnf} n {n})",
                out.stats.eq_queries
            );
            assert_eq!(out.stats.basis_size as usize, out.hypothesis.pairs.len());
            assert!(out.stats.basis_size <= cnf.max(1));
        }
    }

    #[test]
    fn gen_mq_corner_cases() {
        let vocab = Vocab::single(4);
        let caps = caps();
        let sigma = State::from_index(0b0110, 4);
        // b = σ: nothing to walk, the empty cube comes back
        let set = ExplicitSet::from_members(4, [0b0110], &caps).unwrap();
        let mut teacher = TabularTeacher::new(set.clone(), vocab);
        let (term, queries) = gen_mq(&sigma, &sigma, &mut teacher, &vocab);
        assert_eq!(term, Cube::top());
        assert_eq!(queries, 0);
        // singleton target: no flip keeps membership, so v = σ
        let b = State::from_index(0b0000, 4);
        let (term, _) = gen_mq(&sigma, &b, &mut teacher, &vocab);
        assert_eq!(term, moncube(&sigma, &b.to_cube(&vocab), &vocab));
    }

    #[test]
    fn gen_mq_yields_implicants_of_the_monotonization() {
        let caps = caps();
        let mut rng = gen::rng_from_seed(321);
        for _ in 0..40 {
            let n = 6u32;
            let vocab = Vocab::single(n);
            let mut set = oracle::ExplicitSet::empty(n as usize, &caps).unwrap();
            for _ in 0..10 {
                set.insert(rand::Rng::gen_range(&mut rng, 0..set.space()));
            }
            let b = gen::random_state(&mut rng, n as usize);
            let sigma_idx = set.members().next().unwrap();
            let sigma = State::from_index(sigma_idx, n as usize);
            let mut teacher = TabularTeacher::new(set.clone(), vocab);
            let (term, _) = gen_mq(&sigma, &b, &mut teacher, &vocab);
            let mono =
                oracle::exact_monotonize(&set, &b.to_cube(&vocab), &vocab, &caps).unwrap();
            for idx in 0..set.space() {
                let s = State::from_index(idx, n as usize);
                if s.satisfies_cube(&term, &vocab) {
                    assert!(mono.contains(idx), "term not an implicant at {s}");
                }
            }
            // σ itself satisfies the term, i.e. the walked point is below σ
            assert!(sigma.satisfies_cube(&term, &vocab));
        }
    }

    #[test]
    fn membership_variant_matches_intersection_variant_on_monotone_targets() {
        let caps = caps();
        let mut rng = gen::rng_from_seed(555);
        for _ in 0..30 {
            let n = 2 + (rand::Rng::gen_range(&mut rng, 0..5u32));
            let vocab = Vocab::single(n);
            let mut seed_set = oracle::ExplicitSet::empty(n as usize, &caps).unwrap();
            for _ in 0..rand::Rng::gen_range(&mut rng, 1..=4) {
                seed_set.insert(rand::Rng::gen_range(&mut rng, 0..seed_set.space()));
            }
            let b = gen::random_state(&mut rng, n as usize);
            let b_cube = b.to_cube(&vocab);
            let target = oracle::exact_monotonize(&seed_set, &b_cube, &vocab, &caps).unwrap();
            let via_mq = mq_monotonize(&target, &b, &vocab);
            let mut oracle_view = ExplicitOracle::new(&target, vocab);
            let via_intersection = efficient_mono(&mut oracle_view, &b_cube);
            assert_eq!(&via_mq, via_intersection.terms());
        }
    }

    #[test]
    fn inconsistent_oracles_abort_with_diagnostics() {
        // an equivalence oracle that claims a non-differentiating state
        struct LyingEq;
        impl EquivalenceOracle for LyingEq {
            fn eq(&mut self, _h: &Formula) -> Option<State> {
                Some(State::from_index(0, 3))
            }
        }
        struct TrueMq;
        impl MembershipOracle for TrueMq {
            fn mq(&mut self, _x: &State) -> bool {
                true
            }
        }
        // hypothesis starts at `true`, MQ also says true: not differentiating
        let err = cdnf_learn(&mut LyingEq, &mut TrueMq, 3);
        assert!(matches!(err, Err(LearnError::InconsistentOracles { .. })));
    }
}
