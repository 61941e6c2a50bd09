//! Monotone-theory primitives and the output-sensitive monotonization
//! algorithm.
//!
//! For a cube `b`, the order `v ≤_b x` holds when `x` is obtained from `v`
//! by flipping variables of `dom(b)` away from the value `b` assigns them.
//! The least `b`-monotone overapproximation `M_b(φ)` contains `x` iff some
//! `v ⊨ φ` has `v ≤_b x`. [`efficient_mono`] computes `M_b(φ)` from an
//! intersection oracle for φ, term by term, producing the unique irredundant
//! DNF; its query count is proportional to the size of the *output*, not of
//! φ.

use crate::formula::Formula;
use crate::sat::IntersectionOracle;
use crate::types::{Cube, Literal, State, TermList, Vocab};

/// `v ≤_b x`: for every variable where they differ, the variable is in
/// `dom(b)` and `v` agrees with `b` on it.
pub fn leq_b(v: &State, x: &State, b: &Cube, vocab: &Vocab) -> bool {
    (0..vocab.len()).all(|pos| {
        v.bit(pos) == x.bit(pos)
            || b.value_of(vocab.var_at(pos)) == Some(v.bit(pos))
    })
}

/// The projection `x↓b`: agrees with `b` on its domain and with `x`
/// elsewhere.
pub fn project(x: &State, b: &Cube, vocab: &Vocab) -> State {
    let mut out = x.clone();
    for l in b.literals() {
        let pos = vocab.position(l.var).expect("cube scope within vocab");
        out.set_bit(pos, l.positive);
    }
    out
}

/// The smallest cube containing both states: the conjunction of the literals
/// on which they agree.
pub fn hamming_interval(x: &State, y: &State, vocab: &Vocab) -> Cube {
    debug_assert_eq!(x.len(), y.len());
    let lits: Vec<Literal> = (0..vocab.len())
        .filter(|&pos| x.bit(pos) == y.bit(pos))
        .map(|pos| Literal::new(vocab.var_at(pos), x.bit(pos)))
        .collect();
    Cube::new(lits).expect("one literal per position")
}

/// `v \ b`: the literals that hold in `v` except those present in `b` — the
/// least `b`-monotone cube containing `v`.
pub fn moncube(v: &State, b: &Cube, vocab: &Vocab) -> Cube {
    let lits: Vec<Literal> = (0..vocab.len())
        .map(|pos| Literal::new(vocab.var_at(pos), v.bit(pos)))
        .filter(|l| !b.contains(*l))
        .collect();
    Cube::new(lits).expect("one literal per position")
}

/// `M_b(t)` for a single term: drop the literals shared with `b`.
pub fn monotonize_term(t: &Cube, b: &Cube) -> Cube {
    let lits: Vec<Literal> =
        t.literals().iter().copied().filter(|l| !b.contains(*l)).collect();
    Cube::new(lits).expect("subset of a consistent cube")
}

/// Term-wise monotonization of a DNF: equivalent to `M_b(φ)`.
pub fn monotonize_dnf(phi: &TermList, b: &Cube) -> TermList {
    TermList::new(phi.terms.iter().map(|t| monotonize_term(t, b)).collect()).normalized()
}

/// A `b`-monotone DNF paired with the cube it was built against. Every term
/// omits all literals of the basis cube; after [`efficient_mono`] the terms
/// are exactly the non-trivial prime implicants of the monotonization.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Monotonization {
    pub basis: Cube,
    pub terms: TermList,
}

impl Monotonization {
    pub fn to_formula(&self) -> Formula {
        self.terms.to_formula()
    }

    /// Syntactic b-monotone form: no term carries a literal of the basis.
    pub fn is_syntactic_form(&self) -> bool {
        self.terms
            .terms
            .iter()
            .all(|t| t.literals().iter().all(|l| !self.basis.contains(*l)))
    }
}

/// The monotone hull as one monotonization per basis cube; the hull is their
/// conjunction.
pub fn monotone_hull(phi: &TermList, basis: &[Cube]) -> Vec<Monotonization> {
    basis
        .iter()
        .map(|b| Monotonization { basis: b.clone(), terms: monotonize_dnf(phi, b) })
        .collect()
}

/// The result of one [`efficient_mono`] run. `queries` counts oracle calls
/// made by this run alone; `iterations` counts outer-loop rounds, one per
/// output term.
#[derive(Clone, Debug)]
pub struct MonoRun {
    pub monotonization: Monotonization,
    pub iterations: u64,
    pub queries: u64,
}

impl MonoRun {
    pub fn terms(&self) -> &TermList {
        &self.monotonization.terms
    }

    /// The query budget the run must respect: `(N² + N + 1) · |terms|` where
    /// `N` is the vocabulary size. The degenerate φ ≡ false run spends one
    /// query on an empty output.
    pub fn query_bound(vocab: &Vocab, term_count: usize) -> u64 {
        let n = vocab.len() as u64;
        (n * n + n + 1) * term_count as u64
    }
}

/// Computes `M_b(φ)` for the implicit set φ behind the oracle.
///
/// Starting from `H = false`, repeatedly samples a state of `φ ∧ ¬H`,
/// walks it as close to `b` as the oracle permits, and disjoins the walked
/// state's moncube. Each disjoined term is a non-trivial prime implicant of
/// `M_b(φ)`, so the loop runs at most `|M_b(φ)|dnf` times and the whole run
/// makes at most `(N²+N+1) · |M_b(φ)|dnf` oracle queries.
pub fn efficient_mono(oracle: &mut dyn IntersectionOracle, b: &Cube) -> MonoRun {
    let vocab = oracle.vocab();
    debug_assert!(b.domain().all(|v| vocab.contains(v)));
    let mut terms = TermList::bottom();
    let mut iterations = 0u64;
    let mut queries = 0u64;
    loop {
        let not_h = terms.to_formula().negated();
        queries += 1;
        let sigma = match oracle.witness(&not_h) {
            Some(s) => s,
            None => break,
        };
        assert!(
            !sigma.satisfies_dnf(&terms, &vocab),
            "oracle returned a witness already covered by the candidate"
        );
        iterations += 1;
        let (v, walk_queries) = generalize(oracle, b, &sigma);
        queries += walk_queries;
        terms.terms.push(moncube(&v, b, &vocab));
    }
    MonoRun { monotonization: Monotonization { basis: b.clone(), terms }, iterations, queries }
}

/// The generalization walk of the monotonization algorithm.
///
/// Requires `σr ⊨ φ` (oracle-witnessed by the caller). Flips variables of
/// `dom(b)` towards `b`, in ascending position order and repeated passes,
/// keeping a flip only when the Hamming interval `[x, x↓b]` still intersects
/// φ. Variables outside `dom(b)` are never flipped. Returns the walked state
/// and the number of oracle queries spent.
pub fn generalize(
    oracle: &mut dyn IntersectionOracle,
    b: &Cube,
    sigma_r: &State,
) -> (State, u64) {
    let vocab = oracle.vocab();
    let dom: Vec<(usize, bool)> = b
        .literals()
        .iter()
        .map(|l| (vocab.position(l.var).expect("cube scope within vocab"), l.positive))
        .collect();
    let mut v = sigma_r.clone();
    let mut queries = 0u64;
    let mut walked = true;
    while walked {
        walked = false;
        for &(pos, bval) in &dom {
            if v.bit(pos) == bval {
                continue;
            }
            let x = v.with_bit(pos, bval);
            let interval = hamming_interval(&x, &project(&x, b, &vocab), &vocab);
            queries += 1;
            if oracle.witness(&interval.to_formula()).is_some() {
                v = x;
                walked = true;
            }
        }
    }
    (v, queries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{
        exact_monotonize, is_b_monotone, prime_implicants, Caps, ExplicitOracle, ExplicitSet,
    };
    use crate::parse::{formula_to_cube, parse_formula};
    use crate::sat::{FormulaOracle, SatContext};
    use crate::types::state_from_str;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn cube(text: &str) -> Cube {
        formula_to_cube(&parse_formula(text).unwrap()).unwrap()
    }

    fn all_false_cube(n: u32) -> Cube {
        let v = Vocab::single(n);
        State::all_false(n as usize).to_cube(&v)
    }

    #[test]
    fn leq_examples() {
        let v = Vocab::single(3);
        let b = all_false_cube(3);
        // 100 ≤_000 111, but 100 ≰_000 011
        assert!(leq_b(&state_from_str("100"), &state_from_str("111"), &b, &v));
        assert!(!leq_b(&state_from_str("100"), &state_from_str("011"), &b, &v));
        for idx in 0..8 {
            let s = State::from_index(idx, 3);
            assert!(leq_b(&s, &s, &cube("(and p0 (not p1))"), &v));
        }
    }

    #[test]
    fn projection_cases() {
        let v = Vocab::single(3);
        assert_eq!(
            project(&state_from_str("011"), &cube("(and p0 (not p1))"), &v),
            state_from_str("101")
        );
        let x = state_from_str("110");
        assert_eq!(project(&x, &Cube::top(), &v), x);
        let full = cube("(and p0 p1 (not p2))");
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..100 {
            let any = State::from_index(rng.gen_range(0..8), 3);
            assert_eq!(project(&any, &full, &v), state_from_str("110"));
        }
    }

    #[test]
    fn hamming_interval_cases() {
        let v = Vocab::single(3);
        let s = state_from_str("101");
        assert_eq!(hamming_interval(&s, &s, &v), s.to_cube(&v));
        assert_eq!(
            hamming_interval(&s, &state_from_str("001"), &v),
            cube("(and (not p1) p2)")
        );
        // models of the interval = states agreeing with both wherever they agree
        for xi in 0..16u64 {
            for yi in 0..16u64 {
                let v4 = Vocab::single(4);
                let (x, y) = (State::from_index(xi, 4), State::from_index(yi, 4));
                let interval = hamming_interval(&x, &y, &v4);
                for zi in 0..16u64 {
                    let z = State::from_index(zi, 4);
                    let expected = (0..4).all(|p| x.bit(p) != y.bit(p) || z.bit(p) == x.bit(p));
                    assert_eq!(z.satisfies_cube(&interval, &v4), expected);
                }
            }
        }
    }

    #[test]
    fn moncube_cases() {
        let v = Vocab::single(3);
        // v = 100, b = 000 → p0
        assert_eq!(
            moncube(&state_from_str("100"), &all_false_cube(3), &v),
            cube("p0")
        );
        // disjoint literal sets keep the whole state cube
        let all_true = State::all_true(3).to_cube(&v);
        assert_eq!(
            moncube(&State::all_false(3), &all_true, &v),
            State::all_false(3).to_cube(&v)
        );
        // b covering the state's literals drops everything
        assert_eq!(moncube(&state_from_str("100"), &cube("(and p0 (not p1) (not p2))"), &v), Cube::top());
        // single term of monotonize_dnf agrees
        let single = TermList::new(vec![state_from_str("100").to_cube(&v)]);
        assert_eq!(
            monotonize_dnf(&single, &all_false_cube(3)).terms,
            vec![cube("p0")]
        );
        // enumeration: models(moncube(v,b)) = {x : v ≤_b x}
        let caps = Caps::default();
        let b = cube("(and (not p0) (not p1) (not p2))");
        let vset = ExplicitSet::from_members(3, [0b001], &caps).unwrap();
        let m = exact_monotonize(&vset, &b, &v, &caps).unwrap();
        let mc = moncube(&state_from_str("100"), &b, &v);
        for idx in 0..8 {
            let s = State::from_index(idx, 3);
            assert_eq!(s.satisfies_cube(&mc, &v), m.contains(idx));
        }
    }

    #[test]
    fn monotonize_dnf_drops_shared_literals() {
        let b = all_false_cube(3);
        let phi = TermList::new(vec![cube("(and p0 (not p1) (not p2))")]);
        assert_eq!(monotonize_dnf(&phi, &b).terms, vec![cube("p0")]);
    }

    fn random_dnf(rng: &mut StdRng, n: u32, max_terms: usize) -> TermList {
        let count = rng.gen_range(1..=max_terms);
        let mut terms = Vec::with_capacity(count);
        for _ in 0..count {
            let mut lits = Vec::new();
            for i in 0..n {
                if rng.gen_bool(0.5) {
                    lits.push(Literal::new(crate::types::Var::new(i), rng.gen_bool(0.5)));
                }
            }
            terms.push(Cube::new(lits).unwrap());
        }
        TermList::new(terms)
    }

    fn random_partial_cube(rng: &mut StdRng, n: u32) -> Cube {
        let mut lits = Vec::new();
        for i in 0..n {
            if rng.gen_bool(0.6) {
                lits.push(Literal::new(crate::types::Var::new(i), rng.gen_bool(0.5)));
            }
        }
        Cube::new(lits).unwrap()
    }

    #[test]
    fn monotonize_dnf_matches_oracle_and_lemmas() {
        let caps = Caps::default();
        let mut rng = StdRng::seed_from_u64(21);
        for round in 0..150 {
            let n = rng.gen_range(2..=if round % 3 == 0 { 10 } else { 6 });
            let vocab = Vocab::single(n);
            let phi = random_dnf(&mut rng, n, 4);
            let b = random_partial_cube(&mut rng, n);
            let result = monotonize_dnf(&phi, &b);
            // agrees with the enumerated least overapproximation
            let phi_set = ExplicitSet::from_dnf(&phi, &vocab, &caps).unwrap();
            let expect = exact_monotonize(&phi_set, &b, &vocab, &caps).unwrap();
            let got = ExplicitSet::from_dnf(&result, &vocab, &caps).unwrap();
            assert_eq!(got, expect, "n={n} phi={phi} b={b}");
            // size cannot increase, and the operation is idempotent
            assert!(result.len() <= phi.len());
            assert_eq!(monotonize_dnf(&result, &b), result);
        }
    }

    #[test]
    fn monotone_operator_preserves_implication() {
        // φ1 ⟹ φ2 implies M_b(φ1) ⟹ M_b(φ2)
        let caps = Caps::default();
        let mut rng = StdRng::seed_from_u64(33);
        for _ in 0..60 {
            let n = rng.gen_range(2..=8);
            let vocab = Vocab::single(n);
            let phi2 = random_dnf(&mut rng, n, 4);
            // φ1: a random subset of φ2's terms, possibly strengthened
            let mut phi1_terms = Vec::new();
            for t in &phi2.terms {
                if !rng.gen_bool(0.7) {
                    continue;
                }
                let mut t = t.clone();
                if rng.gen_bool(0.3) {
                    let var = crate::types::Var::new(rng.gen_range(0..n));
                    if t.value_of(var).is_none() {
                        t.insert(Literal::new(var, rng.gen_bool(0.5))).unwrap();
                    }
                }
                phi1_terms.push(t);
            }
            let phi1 = TermList::new(phi1_terms);
            let b = random_partial_cube(&mut rng, n);
            let m1 = ExplicitSet::from_dnf(&monotonize_dnf(&phi1, &b), &vocab, &caps).unwrap();
            let m2 = ExplicitSet::from_dnf(&monotonize_dnf(&phi2, &b), &vocab, &caps).unwrap();
            assert!(m1.is_subset_of(&m2));
        }
    }

    #[test]
    fn hull_of_singleton_full_cube_is_plain_monotonization() {
        let mut rng = StdRng::seed_from_u64(8);
        let phi = random_dnf(&mut rng, 4, 3);
        let b = State::from_index(9, 4).to_cube(&Vocab::single(4));
        let hull = monotone_hull(&phi, std::slice::from_ref(&b));
        assert_eq!(hull.len(), 1);
        assert_eq!(hull[0].terms, monotonize_dnf(&phi, &b));
        assert!(hull[0].is_syntactic_form());
    }

    #[test]
    fn hull_overapproximates() {
        // Lemma-level property: φ ⟹ MHull(φ, B)
        let caps = Caps::default();
        let mut rng = StdRng::seed_from_u64(44);
        for _ in 0..40 {
            let n = rng.gen_range(2..=8);
            let vocab = Vocab::single(n);
            let phi = random_dnf(&mut rng, n, 4);
            let basis: Vec<Cube> =
                (0..rng.gen_range(1..=3)).map(|_| random_partial_cube(&mut rng, n)).collect();
            let hull = monotone_hull(&phi, &basis);
            let phi_set = ExplicitSet::from_dnf(&phi, &vocab, &caps).unwrap();
            let mut hull_set = ExplicitSet::full(n as usize, &caps).unwrap();
            for comp in &hull {
                hull_set =
                    hull_set.intersect(&ExplicitSet::from_dnf(&comp.terms, &vocab, &caps).unwrap());
            }
            assert!(phi_set.is_subset_of(&hull_set));
        }
    }

    #[test]
    fn span_membership_iff_hull_fixpoint() {
        // clauses excluding some basis state stay fixed under the hull; and a
        // hull fixpoint is by definition in the span
        let caps = Caps::default();
        let vocab = Vocab::single(4);
        let mut rng = StdRng::seed_from_u64(55);
        for _ in 0..40 {
            let basis_states: Vec<State> =
                (0..rng.gen_range(1..=3)).map(|_| State::from_index(rng.gen_range(0..16), 4)).collect();
            let basis: Vec<Cube> = basis_states.iter().map(|s| s.to_cube(&vocab)).collect();
            // φ = conjunction of clauses, each excluding some basis state
            let mut phi_set = ExplicitSet::full(4, &caps).unwrap();
            for _ in 0..rng.gen_range(1..=3) {
                let excluded = &basis_states[rng.gen_range(0..basis_states.len())];
                // a clause false at `excluded`: negate a few of its literals
                let mut lits = Vec::new();
                for p in 0..4u32 {
                    if rng.gen_bool(0.6) {
                        lits.push(Literal::new(crate::types::Var::new(p), !excluded.bit(p as usize)));
                    }
                }
                let clause = crate::types::Clause::new(lits).unwrap();
                let mut clause_set = ExplicitSet::empty(4, &caps).unwrap();
                for idx in 0..16 {
                    if State::from_index(idx, 4).satisfies_clause(&clause, &vocab) {
                        clause_set.insert(idx);
                    }
                }
                phi_set = phi_set.intersect(&clause_set);
            }
            let hull = crate::oracle::abstract_hull(&phi_set, &basis, &vocab, &caps).unwrap();
            assert_eq!(hull, phi_set, "clause-built φ must be a hull fixpoint");
        }
        // and a formula outside the span moves: a single state sharing a bit
        // with the basis cube grows under the hull
        let s = ExplicitSet::from_members(4, [0b0001], &caps).unwrap();
        let b = State::from_index(0b1111, 4).to_cube(&vocab);
        let hull = crate::oracle::abstract_hull(&s, &[b], &vocab, &caps).unwrap();
        assert_eq!(hull.members().collect::<Vec<_>>(), vec![0b0000, 0b0001]);
    }

    // --- efficient_mono -------------------------------------------------

    #[test]
    fn efficient_mono_on_false_costs_one_query() {
        let caps = Caps::default();
        let set = ExplicitSet::empty(4, &caps).unwrap();
        let mut oracle = ExplicitOracle::new(&set, Vocab::single(4));
        let run = efficient_mono(&mut oracle, &all_false_cube(4));
        assert!(run.terms().is_empty());
        assert_eq!(run.queries, 1);
        assert_eq!(run.iterations, 0);
        assert_eq!(oracle.queries, 1);
    }

    #[test]
    fn generalize_with_empty_domain_returns_input() {
        let caps = Caps::default();
        let set = ExplicitSet::from_members(3, [0b101], &caps).unwrap();
        let mut oracle = ExplicitOracle::new(&set, Vocab::single(3));
        let s = state_from_str("101");
        let (v, q) = generalize(&mut oracle, &Cube::top(), &s);
        assert_eq!(v, s);
        assert_eq!(q, 0);
        // already agreeing with b on all of dom(b): inner loop skips all
        let b = cube("(and p0 p2)");
        let (v, q) = generalize(&mut oracle, &b, &s);
        assert_eq!(v, s);
        assert_eq!(q, 0);
    }

    #[test]
    fn efficient_mono_matches_oracle_on_random_sets() {
        let caps = Caps::default();
        let mut rng = StdRng::seed_from_u64(77);
        for _ in 0..80 {
            let n = rng.gen_range(2..=8u32);
            let vocab = Vocab::single(n);
            let mut set = ExplicitSet::empty(n as usize, &caps).unwrap();
            for _ in 0..rng.gen_range(1..=1 << (n - 1)) {
                set.insert(rng.gen_range(0..set.space()));
            }
            let b = random_partial_cube(&mut rng, n);
            let mut oracle = ExplicitOracle::new(&set, vocab);
            let run = efficient_mono(&mut oracle, &b);
            let expect = exact_monotonize(&set, &b, &vocab, &caps).unwrap();
            let got = ExplicitSet::from_dnf(run.terms(), &vocab, &caps).unwrap();
            assert_eq!(got, expect);
            // output terms are exactly the prime implicants of the result
            let primes = prime_implicants(&expect, &b, &vocab, &caps).unwrap();
            assert_eq!(run.terms().clone().normalized(), primes);
            assert!(run.monotonization.is_syntactic_form());
            // iteration and query bounds
            assert_eq!(run.iterations as usize, run.terms().len());
            let bound = MonoRun::query_bound(&vocab, run.terms().len()).max(1);
            assert!(run.queries <= bound, "queries {} > bound {}", run.queries, bound);
            assert_eq!(run.queries, oracle.queries);
            // overapproximation
            assert!(set.is_subset_of(&got));
        }
    }

    #[test]
    fn efficient_mono_least_among_sampled_b_monotone_covers() {
        let caps = Caps::default();
        let mut rng = StdRng::seed_from_u64(99);
        for _ in 0..40 {
            let n = rng.gen_range(2..=6u32);
            let vocab = Vocab::single(n);
            let members: Vec<u64> =
                (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(0..1u64 << n)).collect();
            let set = ExplicitSet::from_members(n as usize, members, &caps).unwrap();
            let b = random_partial_cube(&mut rng, n);
            let mut oracle = ExplicitOracle::new(&set, vocab);
            let run = efficient_mono(&mut oracle, &b);
            let m_set = ExplicitSet::from_dnf(run.terms(), &vocab, &caps).unwrap();
            // ψ: random b-monotone DNF; when φ ⟹ ψ, also M_b(φ) ⟹ ψ
            for _ in 0..20 {
                let psi = monotonize_dnf(&random_dnf(&mut rng, n, 3), &b);
                let psi_set = ExplicitSet::from_dnf(&psi, &vocab, &caps).unwrap();
                assert!(is_b_monotone(&psi_set, &b, &vocab));
                if set.is_subset_of(&psi_set) {
                    assert!(m_set.is_subset_of(&psi_set));
                }
            }
        }
    }

    #[test]
    fn efficient_mono_against_sat_oracle() {
        // same answers through the SAT-backed formula oracle
        let caps = Caps::default();
        let ctx = SatContext::new(0);
        let mut rng = StdRng::seed_from_u64(123);
        for _ in 0..30 {
            let n = rng.gen_range(2..=7u32);
            let vocab = Vocab::single(n);
            let phi = random_dnf(&mut rng, n, 4);
            let b = random_partial_cube(&mut rng, n);
            let before = ctx.counts();
            let mut oracle = FormulaOracle::new(&ctx, phi.to_formula(), vocab);
            let run = efficient_mono(&mut oracle, &b);
            // counter instrumentation: every oracle call is one plain query
            assert_eq!(ctx.counts().minus(&before).plain, run.queries);
            let phi_set = ExplicitSet::from_dnf(&phi, &vocab, &caps).unwrap();
            let expect = exact_monotonize(&phi_set, &b, &vocab, &caps).unwrap();
            assert_eq!(ExplicitSet::from_dnf(run.terms(), &vocab, &caps).unwrap(), expect);
        }
    }

    #[test]
    fn generalize_lands_on_prime_implicants() {
        let caps = Caps::default();
        let mut rng = StdRng::seed_from_u64(17);
        for _ in 0..60 {
            let n = rng.gen_range(2..=8u32);
            let vocab = Vocab::single(n);
            let members: Vec<u64> =
                (0..rng.gen_range(1..=6)).map(|_| rng.gen_range(0..1u64 << n)).collect();
            let set = ExplicitSet::from_members(n as usize, members.clone(), &caps).unwrap();
            let b = random_partial_cube(&mut rng, n);
            let sigma = State::from_index(members[0], n as usize);
            let mut oracle = ExplicitOracle::new(&set, vocab);
            let (v, _) = generalize(&mut oracle, &b, &sigma);
            assert!(leq_b(&v, &sigma, &b, &vocab));
            let term = moncube(&v, &b, &vocab);
            let mono = exact_monotonize(&set, &b, &vocab, &caps).unwrap();
            let primes = prime_implicants(&mono, &b, &vocab, &caps).unwrap();
            assert!(primes.terms.contains(&term), "term {term} not prime");
        }
    }

    #[test]
    fn two_vocabulary_monotonization() {
        // the 2n-variable space is handled uniformly
        let caps = Caps::default();
        let n = 3u32;
        let pair = Vocab::pair(n);
        let mut rng = StdRng::seed_from_u64(31);
        for _ in 0..20 {
            let mut set = ExplicitSet::empty(pair.len(), &caps).unwrap();
            for _ in 0..rng.gen_range(1..=8) {
                set.insert(rng.gen_range(0..set.space()));
            }
            // two-vocabulary cube: constrain a mix of both copies
            let mut lits = Vec::new();
            for v in pair.vars() {
                if rng.gen_bool(0.5) {
                    lits.push(Literal::new(v, rng.gen_bool(0.5)));
                }
            }
            let b = Cube::new(lits).unwrap();
            let mut oracle = ExplicitOracle::new(&set, pair);
            let run = efficient_mono(&mut oracle, &b);
            let expect = exact_monotonize(&set, &b, &pair, &caps).unwrap();
            assert_eq!(ExplicitSet::from_dnf(run.terms(), &pair, &caps).unwrap(), expect);
        }
    }
}
