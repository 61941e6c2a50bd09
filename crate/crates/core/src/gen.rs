//! Benchmark-system generators and random samplers.
//!
//! Every fenced family follows the same certified construction: pick an
//! invariant `I`, route the transition relation so that the whole inner
//! boundary of `I` is reachable from the initial state within one step
//! (a star from `x0 ∈ I`, plus self-loops on every state), choose `Bad` as
//! the complement of one clause from a minimum CNF of `I`, and add escape
//! arcs from states between `I` and `¬Bad` into `Bad` so the run has real
//! counterexamples to block. Construction is heuristic; certification is
//! not: a candidate system is emitted only after the enumeration oracle
//! re-proves initiation, inductiveness, safety and the fence condition.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use thiserror::Error;

use crate::absint::MonotoneBasis;
use crate::dtree::DecisionTree;
use crate::formula::{frame_equality, Formula};
use crate::infer::reverse_system;
use crate::oracle::{self, Caps, ExplicitSet, OracleError};
use crate::system::TransitionSystem;
use crate::types::{Cube, Literal, State, TermList, Var, Vocab};

#[derive(Debug, Error)]
pub enum GenError {
    #[error("family `{family}` requires {requirement}, got n = {n}")]
    BadN { family: &'static str, requirement: &'static str, n: u32 },
    #[error("could not certify a generated system after {attempts} attempts")]
    Certification { attempts: u32 },
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// A reproducible generator stream.
pub fn rng_from_seed(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

// --- random samplers ----------------------------------------------------

pub fn random_state(rng: &mut StdRng, len: usize) -> State {
    State::from_index(rng.gen_range(0..1u64 << len), len)
}

/// A random consistent cube over `vocab`, each variable constrained with
/// probability `density`.
pub fn random_cube(rng: &mut StdRng, vocab: &Vocab, density: f64) -> Cube {
    let mut lits = Vec::new();
    for v in vocab.vars() {
        if rng.gen_bool(density) {
            lits.push(Literal::new(v, rng.gen_bool(0.5)));
        }
    }
    Cube::new(lits).expect("one literal per variable")
}

/// A random DNF with 1..=`max_terms` partial-cube terms.
pub fn random_dnf(rng: &mut StdRng, vocab: &Vocab, max_terms: usize, density: f64) -> TermList {
    let count = rng.gen_range(1..=max_terms);
    TermList::new((0..count).map(|_| random_cube(rng, vocab, density)).collect())
}

/// A random formula AST; used for random transition relations and tests.
pub fn random_formula(rng: &mut StdRng, vocab: &Vocab, depth: u32) -> Formula {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..8) {
            0 => Formula::Const(rng.gen_bool(0.5)),
            _ => {
                let pos = rng.gen_range(0..vocab.len());
                Formula::lit(vocab.var_at(pos), rng.gen_bool(0.5))
            }
        };
    }
    match rng.gen_range(0..5) {
        0 => random_formula(rng, vocab, depth - 1).negated(),
        1 => {
            let k = rng.gen_range(2..4);
            Formula::and((0..k).map(|_| random_formula(rng, vocab, depth - 1)).collect())
        }
        2 => {
            let k = rng.gen_range(2..4);
            Formula::or((0..k).map(|_| random_formula(rng, vocab, depth - 1)).collect())
        }
        3 => Formula::Xor(
            Box::new(random_formula(rng, vocab, depth - 1)),
            Box::new(random_formula(rng, vocab, depth - 1)),
        ),
        _ => Formula::Iff(
            Box::new(random_formula(rng, vocab, depth - 1)),
            Box::new(random_formula(rng, vocab, depth - 1)),
        ),
    }
}

/// A random system with a nonempty initial set.
pub fn random_system(rng: &mut StdRng, n: u32) -> TransitionSystem {
    let vocab = Vocab::single(n);
    let pair = Vocab::pair(n);
    let seed_state = random_state(rng, n as usize);
    let init = Formula::or(vec![
        seed_state.to_cube(&vocab).to_formula(),
        random_cube(rng, &vocab, 0.7).to_formula(),
    ]);
    let tr = random_formula(rng, &pair, 3);
    let bad = random_formula(rng, &vocab, 2);
    TransitionSystem::new(n, init, tr, bad).expect("sampled formulas are in scope")
}

/// A random basis of 1..=`max_m` cubes over the unprimed vocabulary.
pub fn random_basis(rng: &mut StdRng, n: u32, max_m: usize) -> MonotoneBasis {
    let vocab = Vocab::single(n);
    let m = rng.gen_range(1..=max_m);
    let cubes = (0..m)
        .map(|_| {
            if rng.gen_bool(0.5) {
                random_state(rng, n as usize).to_cube(&vocab)
            } else {
                random_cube(rng, &vocab, 0.6)
            }
        })
        .collect();
    MonotoneBasis::new(cubes).expect("m >= 1")
}

/// A random decision tree over distinct variables with at most `max_leaves`
/// leaves.
pub fn random_tree(rng: &mut StdRng, n: u32, max_leaves: usize) -> DecisionTree {
    fn build(rng: &mut StdRng, avail: &[Var], splits_left: &mut usize) -> DecisionTree {
        if avail.is_empty() || *splits_left == 0 || rng.gen_bool(0.25) {
            return DecisionTree::Leaf(rng.gen_bool(0.5));
        }
        *splits_left -= 1;
        let pick = rng.gen_range(0..avail.len());
        let var = avail[pick];
        let rest: Vec<Var> = avail.iter().copied().filter(|v| *v != var).collect();
        DecisionTree::Node {
            var,
            low: Box::new(build(rng, &rest, splits_left)),
            high: Box::new(build(rng, &rest, splits_left)),
        }
    }
    let vars: Vec<Var> = (0..n).map(Var::new).collect();
    let mut splits = max_leaves.saturating_sub(1);
    build(rng, &vars, &mut splits)
}

// --- paper families -----------------------------------------------------

/// Odd parity of the given variables, as a xor chain.
pub fn odd_parity(vars: impl IntoIterator<Item = Var>) -> Formula {
    let mut it = vars.into_iter();
    let first = Formula::Atom(it.next().expect("at least one variable"));
    it.fold(first, |acc, v| Formula::Xor(Box::new(acc), Box::new(Formula::Atom(v))))
}

/// The parity system: `Init` is the all-zeros state and the transition
/// relation moves from it to any state with an even number of ones. `Bad`
/// is the (unreachable) states of odd positive weight.
pub fn parity_system(n: u32) -> TransitionSystem {
    let vocab = Vocab::single(n);
    let zeros = State::all_false(n as usize).to_cube(&vocab);
    let even_post = odd_parity((0..n).map(|i| Var::new(i).primed())).negated();
    let tr = Formula::and(vec![zeros.to_formula(), even_post]);
    let bad = odd_parity((0..n).map(Var::new));
    TransitionSystem::new(n, zeros.to_formula(), tr, bad).expect("scopes by construction")
}

/// The "at least two bits are 0 and at least two bits are 1" invariant, in
/// its 2n-clause CNF form.
pub fn two_bits_invariant(n: u32) -> Formula {
    let mut clauses = Vec::new();
    for i in 0..n {
        // it is impossible that all bits but i are 1, likewise for 0
        clauses.push(Formula::or(
            (0..n).filter(|&j| j != i).map(|j| Formula::Atom(Var::new(j)).negated()).collect(),
        ));
        clauses.push(Formula::or(
            (0..n).filter(|&j| j != i).map(|j| Formula::Atom(Var::new(j))).collect(),
        ));
    }
    Formula::and(clauses)
}

/// Which certified family to emit.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Family {
    Parity,
    TwoBits,
    FencedRandom,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Parity => "parity",
            Family::TwoBits => "two-bits",
            Family::FencedRandom => "fenced-random",
        }
    }

    pub fn parse(text: &str) -> Option<Family> {
        match text {
            "parity" => Some(Family::Parity),
            "two-bits" => Some(Family::TwoBits),
            "fenced-random" => Some(Family::FencedRandom),
            _ => None,
        }
    }
}

/// Metadata accompanying a generated system.
#[derive(Clone, Debug)]
pub struct GenMeta {
    pub family: String,
    pub n: u32,
    pub seed: u64,
    pub fence_s: u32,
    pub invariant: Formula,
    pub cnf_size: Option<u64>,
    pub dnf_size: Option<u64>,
    pub basis: Vec<Cube>,
    pub backwards: bool,
    pub tree: Option<DecisionTree>,
}

#[derive(Clone, Debug)]
pub struct Generated {
    pub ts: TransitionSystem,
    pub meta: GenMeta,
}

impl Generated {
    /// The system file with the metadata as leading comments.
    pub fn to_file_string(&self) -> String {
        let mut comments = vec![
            format!("family: {}", self.meta.family),
            format!("n: {}", self.meta.n),
            format!("seed: {}", self.meta.seed),
            format!("s: {}", self.meta.fence_s),
            format!("invariant: {}", self.meta.invariant),
            format!("backwards: {}", self.meta.backwards),
        ];
        if let Some(c) = self.meta.cnf_size {
            comments.push(format!("cnf-size: {c}"));
        }
        if let Some(d) = self.meta.dnf_size {
            comments.push(format!("dnf-size: {d}"));
        }
        if !self.meta.basis.is_empty() {
            let cubes: Vec<String> = self.meta.basis.iter().map(|c| c.to_string()).collect();
            comments.push(format!("basis: {}", cubes.join(" ; ")));
        }
        if let Some(t) = &self.meta.tree {
            comments.push(format!("tree: {}", crate::parse::print_tree(t)));
        }
        crate::parse::print_system(&self.ts, &comments)
    }
}

/// Independent re-proof that `inv` is an `s`-forwards-fenced inductive
/// invariant of `ts`: initiation, explicit-graph inductiveness, safety, and
/// the fence condition.
pub fn certify_forwards(
    ts: &TransitionSystem,
    inv: &ExplicitSet,
    s: u32,
    caps: &Caps,
) -> Result<Result<(), String>, OracleError> {
    let vocab = ts.vocab();
    let init = ExplicitSet::from_formula(&ts.init, &vocab, caps)?;
    if !init.is_subset_of(inv) {
        return Ok(Err("initiation fails".to_string()));
    }
    let bad = ExplicitSet::from_formula(&ts.bad, &vocab, caps)?;
    if !bad.intersect(inv).is_empty() {
        return Ok(Err("invariant intersects bad".to_string()));
    }
    let post = oracle::post_image(ts, inv, caps)?;
    if !post.is_subset_of(inv) {
        return Ok(Err("invariant is not closed under transitions".to_string()));
    }
    match oracle::fence_check(ts, inv, s, caps)? {
        Ok(()) => Ok(Ok(())),
        Err(w) => Ok(Err(format!("boundary state {w} unreachable within {s} steps"))),
    }
}

/// The shared star construction. `escape_pool` lists states outside the
/// invariant that are allowed to jump into `Bad`.
fn star_transition(
    vocab: &Vocab,
    x0: &State,
    boundary: &ExplicitSet,
    escapes: &[(State, State)],
) -> Formula {
    let mut arcs = Vec::new();
    let x0_cube = x0.to_cube(vocab).to_formula();
    for target in boundary.states() {
        arcs.push(Formula::and(vec![
            x0_cube.clone(),
            target.to_cube(vocab).with_copy(1).to_formula(),
        ]));
    }
    arcs.push(frame_equality(vocab.n(), 0, 1));
    for (src, dst) in escapes {
        arcs.push(Formula::and(vec![
            src.to_cube(vocab).to_formula(),
            dst.to_cube(vocab).with_copy(1).to_formula(),
        ]));
    }
    Formula::or(arcs)
}

/// Builds a certified 1-forwards-fenced system around a given invariant
/// set. Returns `None` when the invariant is unusable (empty) or
/// certification fails.
fn fenced_from_invariant(
    rng: &mut StdRng,
    n: u32,
    inv: &ExplicitSet,
    caps: &Caps,
) -> Result<Option<(TransitionSystem, u64, u64)>, GenError> {
    let vocab = Vocab::single(n);
    if inv.is_empty() {
        return Ok(None);
    }
    let members: Vec<u64> = inv.members().collect();
    let x0 = State::from_index(members[rng.gen_range(0..members.len())], n as usize);
    let bnd = oracle::boundary(inv, caps)?;
    // Bad = the complement of one clause from a minimum CNF of the
    // invariant; the candidate ¬Bad then already implies that clause, so
    // the run spends its iterations on the remaining ones.
    let cover = oracle::min_cnf_cover(inv, &vocab, caps)?;
    let cnf_size = cover.len() as u64;
    let dnf_size = oracle::min_dnf_size(inv, caps)? as u64;
    let (bad_formula, bad_set) = if cover.is_empty() {
        (Formula::Const(false), ExplicitSet::empty(n as usize, caps)?)
    } else {
        let clause = &cover.clauses[rng.gen_range(0..cover.len())];
        let bad_cube = clause.negate_to_cube();
        let set = ExplicitSet::from_formula(&bad_cube.to_formula(), &vocab, caps)?;
        (bad_cube.to_formula(), set)
    };
    // escape sources: outside the invariant, outside bad
    let pool: Vec<u64> = inv
        .complement()
        .members()
        .filter(|&m| !bad_set.contains(m))
        .collect();
    let bad_states: Vec<u64> = bad_set.members().collect();
    let mut escapes = Vec::new();
    if !bad_states.is_empty() {
        let count = pool.len().min(rng.gen_range(2..=5));
        for _ in 0..count {
            let src = pool[rng.gen_range(0..pool.len())];
            let dst = bad_states[rng.gen_range(0..bad_states.len())];
            escapes.push((
                State::from_index(src, n as usize),
                State::from_index(dst, n as usize),
            ));
        }
    }
    let tr = star_transition(&vocab, &x0, &bnd, &escapes);
    let ts = TransitionSystem::new(n, x0.to_cube(&vocab).to_formula(), tr, bad_formula)
        .expect("constructed scopes");
    match certify_forwards(&ts, inv, 1, caps)? {
        Ok(()) => Ok(Some((ts, cnf_size, dnf_size))),
        Err(_) => Ok(None),
    }
}

fn meta(
    family: &str,
    n: u32,
    seed: u64,
    invariant: Formula,
    cnf: Option<u64>,
    dnf: Option<u64>,
) -> GenMeta {
    GenMeta {
        family: family.to_string(),
        n,
        seed,
        fence_s: 1,
        invariant,
        cnf_size: cnf,
        dnf_size: dnf,
        basis: Vec::new(),
        backwards: false,
        tree: None,
    }
}

const RETRY_BUDGET: u32 = 60;

/// Emits a certified system of the requested family.
pub fn generate(family: Family, n: u32, seed: u64, caps: &Caps) -> Result<Generated, GenError> {
    match family {
        Family::Parity => parity_family(n, seed, caps),
        Family::TwoBits => two_bits_family(n, seed, caps),
        Family::FencedRandom => fenced_random_family(n, seed, caps),
    }
}

fn parity_family(n: u32, seed: u64, caps: &Caps) -> Result<Generated, GenError> {
    if n < 3 || n % 2 == 0 {
        return Err(GenError::BadN { family: "parity", requirement: "an odd n >= 3", n });
    }
    let ts = parity_system(n);
    let vocab = ts.vocab();
    let invariant = odd_parity((0..n).map(Var::new)).negated();
    // certify: even-weight states are a 1-fenced inductive invariant
    if (n as usize) <= caps.loop_bits as usize {
        let inv = ExplicitSet::from_formula(&invariant, &vocab, caps)?;
        if let Err(why) = certify_forwards(&ts, &inv, 1, caps)? {
            panic!("parity construction failed its certification: {why}");
        }
    }
    let sizes_ok = n <= caps.minimize_bits;
    let (cnf, dnf) = if sizes_ok {
        let inv = ExplicitSet::from_formula(&invariant, &vocab, caps)?;
        (
            Some(oracle::min_cnf_size(&inv, caps)? as u64),
            Some(oracle::min_dnf_size(&inv, caps)? as u64),
        )
    } else {
        (None, None)
    };
    let mut m = meta("parity", n, seed, invariant, cnf, dnf);
    m.basis = vec![State::all_true(n as usize).to_cube(&vocab)];
    Ok(Generated { ts, meta: m })
}

fn two_bits_family(n: u32, seed: u64, caps: &Caps) -> Result<Generated, GenError> {
    if n < 5 {
        return Err(GenError::BadN { family: "two-bits", requirement: "n >= 5", n });
    }
    let vocab = Vocab::single(n);
    let invariant = two_bits_invariant(n);
    let inv_set = ExplicitSet::from_formula(&invariant, &vocab, caps)?;
    let mut rng = rng_from_seed(seed ^ 0x7b17);
    for _ in 0..RETRY_BUDGET {
        if let Some((ts, cnf, dnf)) = fenced_from_invariant(&mut rng, n, &inv_set, caps)? {
            let m = meta("two-bits", n, seed, invariant.clone(), Some(cnf), Some(dnf));
            return Ok(Generated { ts, meta: m });
        }
    }
    Err(GenError::Certification { attempts: RETRY_BUDGET })
}

fn fenced_random_family(n: u32, seed: u64, caps: &Caps) -> Result<Generated, GenError> {
    let vocab = Vocab::single(n);
    let mut rng = rng_from_seed(seed ^ 0x0f5d);
    for _ in 0..RETRY_BUDGET {
        let dnf = random_dnf(&mut rng, &vocab, 5, 0.55);
        let inv_set = ExplicitSet::from_dnf(&dnf, &vocab, caps)?;
        if inv_set.is_empty() || inv_set.count() == inv_set.space() {
            continue;
        }
        if let Some((ts, cnf, dnf_size)) = fenced_from_invariant(&mut rng, n, &inv_set, caps)? {
            let m = meta(
                "fenced-random",
                n,
                seed,
                dnf.to_formula(),
                Some(cnf),
                Some(dnf_size),
            );
            return Ok(Generated { ts, meta: m });
        }
    }
    Err(GenError::Certification { attempts: RETRY_BUDGET })
}

/// A certified fenced system whose invariant is a random decision tree with
/// at most `max_leaves` leaves. Used by the decision-tree bound suite.
pub fn fenced_tree_system(
    n: u32,
    max_leaves: usize,
    seed: u64,
    caps: &Caps,
) -> Result<Generated, GenError> {
    let vocab = Vocab::single(n);
    let mut rng = rng_from_seed(seed ^ 0x4d21);
    for _ in 0..RETRY_BUDGET {
        let tree = random_tree(&mut rng, n, max_leaves);
        let dnf = tree.to_dnf();
        let inv_set = ExplicitSet::from_dnf(&dnf, &vocab, caps)?;
        if inv_set.is_empty() || inv_set.count() == inv_set.space() {
            continue;
        }
        if let Some((ts, cnf, dnf_size)) = fenced_from_invariant(&mut rng, n, &inv_set, caps)? {
            let mut m = meta("fenced-tree", n, seed, dnf.to_formula(), Some(cnf), Some(dnf_size));
            m.tree = Some(tree);
            return Ok(Generated { ts, meta: m });
        }
    }
    Err(GenError::Certification { attempts: RETRY_BUDGET })
}

/// A certified fenced system with a monotone invariant (a random positive
/// DNF, hence upward closed).
pub fn fenced_monotone_system(n: u32, seed: u64, caps: &Caps) -> Result<Generated, GenError> {
    let vocab = Vocab::single(n);
    let mut rng = rng_from_seed(seed ^ 0x6a02);
    for _ in 0..RETRY_BUDGET {
        let mut terms = Vec::new();
        for _ in 0..rng.gen_range(1..=4) {
            let mut lits = Vec::new();
            for i in 0..n {
                if rng.gen_bool(0.4) {
                    lits.push(Literal::positive(Var::new(i)));
                }
            }
            if lits.is_empty() {
                lits.push(Literal::positive(Var::new(rng.gen_range(0..n))));
            }
            terms.push(Cube::new(lits).expect("positive literals"));
        }
        let dnf = TermList::new(terms);
        let inv_set = ExplicitSet::from_dnf(&dnf, &vocab, caps)?;
        if inv_set.is_empty() || inv_set.count() == inv_set.space() {
            continue;
        }
        if let Some((ts, cnf, dnf_size)) = fenced_from_invariant(&mut rng, n, &inv_set, caps)? {
            let m = meta(
                "fenced-monotone",
                n,
                seed,
                dnf.to_formula(),
                Some(cnf),
                Some(dnf_size),
            );
            return Ok(Generated { ts, meta: m });
        }
    }
    Err(GenError::Certification { attempts: RETRY_BUDGET })
}

/// A certified *backwards*-fenced system: every state of the outer boundary
/// `∂⁺(¬I)` reaches `Bad` in one step, while `I` remains inductive. The
/// reversed system is then 1-forwards fenced for `¬I`, which is what the
/// dual pipeline runs on.
pub fn backwards_fenced_system(n: u32, seed: u64, caps: &Caps) -> Result<Generated, GenError> {
    let vocab = Vocab::single(n);
    let mut rng = rng_from_seed(seed ^ 0x33c9);
    for _ in 0..RETRY_BUDGET {
        let dnf = random_dnf(&mut rng, &vocab, 4, 0.5);
        let inv_set = ExplicitSet::from_dnf(&dnf, &vocab, caps)?;
        let outside: Vec<u64> = inv_set.complement().members().collect();
        if inv_set.is_empty() || outside.is_empty() {
            continue;
        }
        let members: Vec<u64> = inv_set.members().collect();
        let x0 = State::from_index(members[rng.gen_range(0..members.len())], n as usize);
        let y0 = State::from_index(outside[rng.gen_range(0..outside.len())], n as usize);
        let outer = oracle::boundary(&inv_set.complement(), caps)?;
        let mut arcs = Vec::new();
        // the outer boundary drains into Bad in one step
        let y0_post = y0.to_cube(&vocab).with_copy(1).to_formula();
        for src in outer.states() {
            arcs.push(Formula::and(vec![
                src.to_cube(&vocab).to_formula(),
                y0_post.clone(),
            ]));
        }
        arcs.push(frame_equality(n, 0, 1));
        // arcs from x0 to a few invariant states make the dual run work
        for _ in 0..members.len().min(4) {
            let dst = State::from_index(members[rng.gen_range(0..members.len())], n as usize);
            arcs.push(Formula::and(vec![
                x0.to_cube(&vocab).to_formula(),
                dst.to_cube(&vocab).with_copy(1).to_formula(),
            ]));
        }
        let ts = TransitionSystem::new(
            n,
            x0.to_cube(&vocab).to_formula(),
            Formula::or(arcs),
            y0.to_cube(&vocab).to_formula(),
        )
        .expect("constructed scopes");
        // certification: the reversed system must be 1-forwards fenced for ¬I
        let rev = reverse_system(&ts);
        if certify_forwards(&rev, &inv_set.complement(), 1, caps)?.is_err() {
            continue;
        }
        let mut m = meta(
            "backwards-fenced",
            n,
            seed,
            dnf.to_formula(),
            Some(oracle::min_cnf_size(&inv_set, caps)? as u64),
            Some(oracle::min_dnf_size(&inv_set, caps)? as u64),
        );
        m.backwards = true;
        return Ok(Generated { ts, meta: m });
    }
    Err(GenError::Certification { attempts: RETRY_BUDGET })
}
