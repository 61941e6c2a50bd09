//! Abstract interpretation in the monotone-span domain.
//!
//! The domain is parametrized by a basis `B = b_1 ∨ … ∨ b_m` of cubes; the
//! abstraction of a set is the conjunction of its monotonizations per basis
//! cube. Kleene iteration from `Init` converges in at most
//!
//! ```text
//! Λ = ∏_j ( |M_{reflect(b∩) ∧ b_j'}(Tr)|dnf + |M_{b_j}(Init)|dnf )
//! ```
//!
//! steps, where `b∩` is the cube of literals shared by all basis cubes.
//! [`ai_direct`] recomputes the monotone hull of the post-image each round;
//! [`ai_efficient`] monotonizes `Tr ∨ Init'` once into a transformer table
//! and assembles each next iterate from term combinations whose pre-state
//! part intersects the current one. Both keep every iterate's stored term
//! count within `Λ`.

use thiserror::Error;

use crate::formula::Formula;
use crate::monotone::efficient_mono;
use crate::sat::{FormulaOracle, PostImageOracle, QueryCounts, QueryKind, SatContext};
use crate::system::TransitionSystem;
use crate::types::{Cube, TermList, Vocab};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AbsintError {
    #[error("the monotone basis must be nonempty")]
    EmptyBasis,
    #[error("iteration bound overflows 128-bit arithmetic")]
    Overflow,
}

/// A DNF representation `b_1 ∨ … ∨ b_m` of the basis, fixed for a whole run.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MonotoneBasis {
    cubes: Vec<Cube>,
}

impl MonotoneBasis {
    pub fn new(cubes: Vec<Cube>) -> Result<Self, AbsintError> {
        if cubes.is_empty() {
            return Err(AbsintError::EmptyBasis);
        }
        Ok(MonotoneBasis { cubes })
    }

    pub fn cubes(&self) -> &[Cube] {
        &self.cubes
    }

    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// The cube of literals appearing in every basis cube (`b∩`); empty when
/// nothing is shared.
pub fn cube_join(basis: &MonotoneBasis) -> Cube {
    let mut shared = basis.cubes()[0].clone();
    for b in &basis.cubes()[1..] {
        let lits: Vec<_> =
            shared.literals().iter().copied().filter(|l| b.contains(*l)).collect();
        shared = Cube::new(lits).expect("subset of a consistent cube");
    }
    shared
}

/// The two-vocabulary monotonization cube for component `j`:
/// `reflect(b∩) ∧ b_j'`.
pub fn component_cube(basis: &MonotoneBasis, j: usize) -> Cube {
    cube_join(basis)
        .reflect()
        .conjoin(&basis.cubes()[j].with_copy(1))
        .expect("distinct copies cannot conflict")
}

/// The restriction `t|copy` of a two-vocabulary term.
pub fn restrict_term(t: &Cube, copy: u32) -> Cube {
    t.restrict_to_copy(copy)
}

/// `M_{reflect(b∩) ∧ b_j'}(Tr ∨ Init')` per basis cube, each in irredundant
/// DNF over the pair vocabulary. Every term splits into a pre-state and a
/// post-state part.
#[derive(Clone, Debug)]
pub struct AbstractTransformerTable {
    pub components: Vec<TermList>,
}

pub fn abstract_tr(
    ctx: &SatContext,
    ts: &TransitionSystem,
    basis: &MonotoneBasis,
) -> AbstractTransformerTable {
    let init_primed = ts.init.prime().expect("init is unprimed");
    let transformer = Formula::or(vec![ts.tr.clone(), init_primed]);
    let pair = ts.pair_vocab();
    let components = (0..basis.len())
        .map(|j| {
            let mut oracle = FormulaOracle::new(ctx, transformer.clone(), pair);
            efficient_mono(&mut oracle, &component_cube(basis, j)).monotonization.terms
        })
        .collect();
    AbstractTransformerTable { components }
}

/// An iterate of the abstract iteration: the first one is a monotone hull
/// (one DNF per basis cube, conjunction semantics), later ones are plain
/// DNFs assembled from the transformer table.
#[derive(Clone, Debug)]
pub enum Iterate {
    Hull(Vec<TermList>),
    Dnf(TermList),
}

impl Iterate {
    pub fn to_formula(&self) -> Formula {
        match self {
            Iterate::Hull(components) => {
                Formula::and(components.iter().map(TermList::to_formula).collect())
            }
            Iterate::Dnf(terms) => terms.to_formula(),
        }
    }

    /// The stored-term metric bounded by Λ: the product of component sizes
    /// for hulls, the term count for DNFs.
    pub fn stored_terms(&self) -> u128 {
        match self {
            Iterate::Hull(components) => {
                components.iter().map(|c| c.len() as u128).product()
            }
            Iterate::Dnf(terms) => terms.len() as u128,
        }
    }
}

/// A finished abstract-interpretation run. `iterations` counts transformer
/// applications; the trace holds `iterations + 1` iterates ending in the
/// fixpoint.
#[derive(Clone, Debug)]
pub struct AiRun {
    pub trace: Vec<Iterate>,
    pub iterations: u64,
    pub queries: QueryCounts,
}

impl AiRun {
    pub fn fixpoint(&self) -> &Iterate {
        self.trace.last().expect("trace holds at least the first iterate")
    }
}

fn initial_hull(ctx: &SatContext, ts: &TransitionSystem, basis: &MonotoneBasis) -> Iterate {
    let vocab = ts.vocab();
    let components = basis
        .cubes()
        .iter()
        .map(|b| {
            let mut oracle = FormulaOracle::new(ctx, ts.init.clone(), vocab);
            efficient_mono(&mut oracle, b).monotonization.terms
        })
        .collect();
    Iterate::Hull(components)
}

/// `ξ_i ⟹ ξ_{i-1}`, realized as `UNSAT(ξ_i ∧ ¬ξ_{i-1})`.
fn converged(ctx: &SatContext, vocab: &Vocab, cur: &Formula, prev: &Formula) -> bool {
    let q = Formula::and(vec![cur.clone(), prev.clone().negated()]);
    !ctx.is_sat(&q, vocab, QueryKind::Plain)
}

/// Kleene iteration with the hull recomputed from the implicit post-image
/// every round.
pub fn ai_direct(ctx: &SatContext, ts: &TransitionSystem, basis: &MonotoneBasis) -> AiRun {
    let before = ctx.counts();
    let vocab = ts.vocab();
    let mut trace = vec![initial_hull(ctx, ts, basis)];
    let mut prev = Formula::Const(false);
    let mut iterations = 0;
    loop {
        let cur = trace.last().expect("nonempty").to_formula();
        if converged(ctx, &vocab, &cur, &prev) {
            break;
        }
        let components = basis
            .cubes()
            .iter()
            .map(|b| {
                let mut oracle = PostImageOracle::new(ctx, ts, cur.clone());
                efficient_mono(&mut oracle, b).monotonization.terms
            })
            .collect();
        trace.push(Iterate::Hull(components));
        prev = cur;
        iterations += 1;
    }
    AiRun { trace, iterations, queries: ctx.counts().minus(&before) }
}

/// Kleene iteration through the transformer table: each next iterate is the
/// disjunction, over all combinations of one table term per component whose
/// pre-state part intersects the current iterate, of the conjoined
/// post-state parts.
pub fn ai_efficient(ctx: &SatContext, ts: &TransitionSystem, basis: &MonotoneBasis) -> AiRun {
    let before = ctx.counts();
    let vocab = ts.vocab();
    let mut trace = vec![initial_hull(ctx, ts, basis)];
    let table = abstract_tr(ctx, ts, basis);
    let mut prev = Formula::Const(false);
    let mut iterations = 0;
    loop {
        let cur = trace.last().expect("nonempty").to_formula();
        if converged(ctx, &vocab, &cur, &prev) {
            break;
        }
        // pre-state filtering before forming cross products
        let admitted: Vec<Vec<&Cube>> = table
            .components
            .iter()
            .map(|component| {
                component
                    .terms
                    .iter()
                    .filter(|t| {
                        let pre = restrict_term(t, 0).to_formula();
                        ctx.is_sat(
                            &Formula::and(vec![cur.clone(), pre]),
                            &vocab,
                            QueryKind::Plain,
                        )
                    })
                    .collect()
            })
            .collect();
        // lexicographic combination enumeration
        let mut combos: Vec<Cube> = vec![Cube::top()];
        for column in &admitted {
            let mut next = Vec::new();
            for partial in &combos {
                for t in column {
                    if let Some(joined) = partial.conjoin(&restrict_term(t, 1)) {
                        next.push(joined);
                    }
                }
            }
            combos = next;
        }
        let mut terms = TermList::new(
            combos.into_iter().map(|post| post.with_copy(0)).collect(),
        );
        terms.prune_subsumed();
        trace.push(Iterate::Dnf(terms));
        prev = cur;
        iterations += 1;
    }
    AiRun { trace, iterations, queries: ctx.counts().minus(&before) }
}

/// One factor of the iteration bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct LambdaFactor {
    pub tr_terms: u64,
    pub init_terms: u64,
}

/// The iteration bound Λ with its per-component factors.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct LambdaBound {
    pub factors: Vec<LambdaFactor>,
    pub value: u128,
}

/// Computes `Λ = ∏_j (|M_{reflect(b∩)∧b_j'}(Tr)|dnf + |M_{b_j}(Init)|dnf)`.
/// Each factor's DNF size is the term count of a monotonization run, which
/// produces the unique irredundant DNF.
pub fn lambda_bound(
    ctx: &SatContext,
    ts: &TransitionSystem,
    basis: &MonotoneBasis,
) -> Result<LambdaBound, AbsintError> {
    let pair = ts.pair_vocab();
    let vocab = ts.vocab();
    let mut factors = Vec::with_capacity(basis.len());
    let mut value: u128 = 1;
    for j in 0..basis.len() {
        let mut tr_oracle = FormulaOracle::new(ctx, ts.tr.clone(), pair);
        let tr_terms = efficient_mono(&mut tr_oracle, &component_cube(basis, j)).terms().len();
        let mut init_oracle = FormulaOracle::new(ctx, ts.init.clone(), vocab);
        let init_terms = efficient_mono(&mut init_oracle, &basis.cubes()[j]).terms().len();
        let factor =
            LambdaFactor { tr_terms: tr_terms as u64, init_terms: init_terms as u64 };
        factors.push(factor);
        value = value
            .checked_mul(factor.tr_terms as u128 + factor.init_terms as u128)
            .ok_or(AbsintError::Overflow)?;
    }
    Ok(LambdaBound { factors, value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::oracle::{self, Caps, ExplicitSet};
    use crate::parse::{formula_to_cube, parse_formula, parse_system};
    use crate::types::{State, Var};

    fn caps() -> Caps {
        Caps::default()
    }

    fn cube(text: &str) -> Cube {
        formula_to_cube(&parse_formula(text).unwrap()).unwrap()
    }

    fn basis_of(cubes: Vec<Cube>) -> MonotoneBasis {
        MonotoneBasis::new(cubes).unwrap()
    }

    #[test]
    fn cube_join_cases() {
        let b = cube("(and p0 (not p1))");
        assert_eq!(cube_join(&basis_of(vec![b.clone()])), b);
        assert_eq!(
            cube_join(&basis_of(vec![cube("(and p0 p1)"), cube("(and p0 (not p1))")])),
            cube("p0")
        );
        assert_eq!(
            cube_join(&basis_of(vec![cube("p0"), cube("(not p0)")])),
            Cube::top()
        );
        assert!(MonotoneBasis::new(vec![]).is_err());
    }

    #[test]
    fn restriction_splits_terms() {
        let t = cube("(and p0 (not p1'))");
        assert_eq!(restrict_term(&t, 0), cube("p0"));
        assert_eq!(restrict_term(&t, 1), cube("(not p1')"));
        let pure = cube("(and p0 p2)");
        assert_eq!(restrict_term(&pure, 1), Cube::top());
        // the two halves partition the term
        for text in ["(and p0 p1' (not p2'))", "p1'", "true"] {
            let t = cube(text);
            assert_eq!(restrict_term(&t, 0).conjoin(&restrict_term(&t, 1)).unwrap(), t);
        }
    }

    #[test]
    fn parity_transformer_is_one_negated_literal_per_variable() {
        let n = 5;
        let ts = gen::parity_system(n);
        let basis = basis_of(vec![State::all_true(n as usize).to_cube(&ts.vocab())]);
        let ctx = SatContext::new(0);
        let table = abstract_tr(&ctx, &ts, &basis);
        assert_eq!(table.components.len(), 1);
        let mut expect: Vec<Cube> = (0..n)
            .map(|i| Cube::unit(crate::types::Literal::negative(Var::new(i).primed())))
            .collect();
        expect.sort();
        let mut got = table.components[0].clone();
        got.normalize();
        assert_eq!(got.terms, expect);
    }

    #[test]
    fn transformer_with_false_tr_is_init_only() {
        let ts = parse_system(
            "vars 3\ninit (and (not p0) (not p1) (not p2))\ntrans false\nbad false\n",
        )
        .unwrap();
        let basis = basis_of(vec![State::all_true(3).to_cube(&ts.vocab())]);
        let ctx = SatContext::new(0);
        let table = abstract_tr(&ctx, &ts, &basis);
        // M(Init') over the pair space: primed copy pinned to 0…0
        let caps = caps();
        let pair = ts.pair_vocab();
        let init_primed = ts.init.prime().unwrap();
        let set = ExplicitSet::from_formula(&init_primed, &pair, &caps).unwrap();
        let expect =
            oracle::exact_monotonize(&set, &component_cube(&basis, 0), &pair, &caps).unwrap();
        let got = ExplicitSet::from_dnf(&table.components[0], &pair, &caps).unwrap();
        assert_eq!(got, expect);
    }

    #[test]
    fn transformer_matches_oracle_on_random_systems() {
        let caps = caps();
        let mut rng = gen::rng_from_seed(901);
        for round in 0..25 {
            let n = 2 + round % 4; // up to n = 5: 10-bit pair space
            let ts = gen::random_system(&mut rng, n);
            let basis = gen::random_basis(&mut rng, n, 2);
            let ctx = SatContext::new(0);
            let table = abstract_tr(&ctx, &ts, &basis);
            let pair = ts.pair_vocab();
            let init_primed = ts.init.prime().unwrap();
            let transformer = Formula::or(vec![ts.tr.clone(), init_primed]);
            let set = ExplicitSet::from_formula(&transformer, &pair, &caps).unwrap();
            for (j, component) in table.components.iter().enumerate() {
                let expect =
                    oracle::exact_monotonize(&set, &component_cube(&basis, j), &pair, &caps)
                        .unwrap();
                let got = ExplicitSet::from_dnf(component, &pair, &caps).unwrap();
                assert_eq!(got, expect);
            }
        }
    }

    #[test]
    fn bottom_init_converges_immediately() {
        let ts = parse_system("vars 2\ninit false\ntrans true\nbad false\n").unwrap();
        let basis = basis_of(vec![State::all_true(2).to_cube(&ts.vocab())]);
        let ctx = SatContext::new(0);
        let run = ai_direct(&ctx, &ts, &basis);
        assert_eq!(run.iterations, 0);
        assert_eq!(run.trace.len(), 1);
        assert_eq!(run.fixpoint().stored_terms(), 0);
        let run = ai_efficient(&ctx, &ts, &basis);
        assert_eq!(run.iterations, 0);
    }

    #[test]
    fn parity_iterates_and_lambda() {
        let caps = caps();
        for n in [3u32, 5] {
            let ts = gen::parity_system(n);
            let vocab = ts.vocab();
            let basis = basis_of(vec![State::all_true(n as usize).to_cube(&vocab)]);
            let ctx = SatContext::new(0);
            let run = ai_direct(&ctx, &ts, &basis);
            // ξ0 = {0…0}; ξ1 = everything except 1…1; fixpoint at ξ2 ≡ ξ1
            let xi0 = ExplicitSet::from_formula(&run.trace[0].to_formula(), &vocab, &caps).unwrap();
            assert_eq!(xi0.members().collect::<Vec<_>>(), vec![0]);
            let xi1 = ExplicitSet::from_formula(&run.trace[1].to_formula(), &vocab, &caps).unwrap();
            let mut expect = ExplicitSet::full(n as usize, &caps).unwrap();
            expect.remove(expect.space() - 1);
            assert_eq!(xi1, expect);
            assert_eq!(run.iterations, 2);
            // Λ: Tr factor exactly n, Init factor 1
            let lam = lambda_bound(&ctx, &ts, &basis).unwrap();
            assert_eq!(lam.factors, vec![LambdaFactor { tr_terms: n as u64, init_terms: 1 }]);
            assert_eq!(lam.value, n as u128 + 1);
            assert!(run.iterations as u128 <= lam.value);
            // the efficient implementation agrees iterate by iterate
            let ctx2 = SatContext::new(0);
            let run2 = ai_efficient(&ctx2, &ts, &basis);
            assert_eq!(run2.trace.len(), run.trace.len());
            for (a, b) in run.trace.iter().zip(&run2.trace) {
                let sa = ExplicitSet::from_formula(&a.to_formula(), &vocab, &caps).unwrap();
                let sb = ExplicitSet::from_formula(&b.to_formula(), &vocab, &caps).unwrap();
                assert_eq!(sa, sb);
            }
        }
    }

    #[test]
    fn runs_match_enumeration_oracle() {
        let caps = caps();
        let mut rng = gen::rng_from_seed(73);
        for round in 0..20 {
            let n = 2 + round % 4;
            let ts = gen::random_system(&mut rng, n);
            let basis = gen::random_basis(&mut rng, n, 2);
            let vocab = ts.vocab();
            let ctx = SatContext::new(0);
            let direct = ai_direct(&ctx, &ts, &basis);
            let ctx = SatContext::new(0);
            let efficient = ai_efficient(&ctx, &ts, &basis);
            assert_eq!(direct.trace.len(), efficient.trace.len());
            // oracle iterate-by-iterate
            let init = ExplicitSet::from_formula(&ts.init, &vocab, &caps).unwrap();
            let mut expected =
                oracle::abstract_hull(&init, basis.cubes(), &vocab, &caps).unwrap();
            for (i, (a, b)) in direct.trace.iter().zip(&efficient.trace).enumerate() {
                let sa = ExplicitSet::from_formula(&a.to_formula(), &vocab, &caps).unwrap();
                let sb = ExplicitSet::from_formula(&b.to_formula(), &vocab, &caps).unwrap();
                assert_eq!(sa, expected, "direct iterate {i}");
                assert_eq!(sb, expected, "efficient iterate {i}");
                expected =
                    oracle::exact_abstract_iterate(&ts, basis.cubes(), &expected, &caps).unwrap();
            }
            // Kleene ascent until the convergence test fires
            for pair in direct.trace.windows(2) {
                let lo =
                    ExplicitSet::from_formula(&pair[0].to_formula(), &vocab, &caps).unwrap();
                let hi =
                    ExplicitSet::from_formula(&pair[1].to_formula(), &vocab, &caps).unwrap();
                assert!(lo.is_subset_of(&hi));
            }
            // iteration and stored-term bounds
            let ctx = SatContext::new(0);
            let lam = lambda_bound(&ctx, &ts, &basis).unwrap();
            assert!(direct.iterations as u128 <= lam.value);
            assert!(efficient.iterations as u128 <= lam.value);
            for it in &efficient.trace {
                assert!(it.stored_terms() <= lam.value);
            }
        }
    }

    #[test]
    fn lambda_degenerate_false_tr_single_state_init() {
        // Tr ≡ false, Init a single state, basis cube disjoint from Init's
        // literals: Λ = (0 + 1) = 1
        let ts = parse_system(
            "vars 3\ninit (and (not p0) (not p1) (not p2))\ntrans false\nbad false\n",
        )
        .unwrap();
        let basis = basis_of(vec![State::all_true(3).to_cube(&ts.vocab())]);
        let ctx = SatContext::new(0);
        let lam = lambda_bound(&ctx, &ts, &basis).unwrap();
        assert_eq!(lam.factors, vec![LambdaFactor { tr_terms: 0, init_terms: 1 }]);
        assert_eq!(lam.value, 1);
    }
}
