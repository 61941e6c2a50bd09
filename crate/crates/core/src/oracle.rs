//! Brute-force reference semantics over explicit state sets.
//!
//! Everything here enumerates the state space directly and is deliberately
//! written without reusing the algorithmic modules it cross-checks; only the
//! core value types are shared. Desk scale: capped at 2^20 states for plain
//! set storage and 2^12 for per-state inner loops.

use thiserror::Error;

use crate::formula::Formula;
use crate::sat::IntersectionOracle;
use crate::system::TransitionSystem;
use crate::types::{ClauseList, Cube, Literal, State, TermList, Vocab};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{op}: space of {bits} bits exceeds the configured cap of {cap}")]
    CapExceeded { op: &'static str, bits: usize, cap: u32 },
    #[error("the set is not b-monotone for the given cube")]
    NotBMonotone,
}

/// Enumeration caps; configuration, not constants.
#[derive(Clone, Copy, Debug)]
pub struct Caps {
    /// Max bits for bitmap storage.
    pub set_bits: u32,
    /// Max bits for operations with per-state inner loops.
    pub loop_bits: u32,
    /// Max bits for exact DNF/CNF minimization (cube enumeration + cover).
    pub minimize_bits: u32,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { set_bits: 20, loop_bits: 12, minimize_bits: 8 }
    }
}

fn check_cap(op: &'static str, bits: usize, cap: u32) -> Result<(), OracleError> {
    if bits as u32 > cap {
        Err(OracleError::CapExceeded { op, bits, cap })
    } else {
        Ok(())
    }
}

/// A set of states over a `bits`-variable space, stored as a membership
/// bitmap.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExplicitSet {
    bits: usize,
    words: Vec<u64>,
}

impl ExplicitSet {
    pub fn empty(bits: usize, caps: &Caps) -> Result<Self, OracleError> {
        check_cap("explicit set", bits, caps.set_bits)?;
        let words = vec![0u64; (1usize << bits).div_ceil(64)];
        Ok(ExplicitSet { bits, words })
    }

    pub fn full(bits: usize, caps: &Caps) -> Result<Self, OracleError> {
        let mut s = Self::empty(bits, caps)?;
        for idx in 0..s.space() {
            s.insert(idx);
        }
        Ok(s)
    }

    pub fn from_members(
        bits: usize,
        members: impl IntoIterator<Item = u64>,
        caps: &Caps,
    ) -> Result<Self, OracleError> {
        let mut s = Self::empty(bits, caps)?;
        for m in members {
            s.insert(m);
        }
        Ok(s)
    }

    /// All states satisfying `f`.
    pub fn from_formula(f: &Formula, vocab: &Vocab, caps: &Caps) -> Result<Self, OracleError> {
        let mut s = Self::empty(vocab.len(), caps)?;
        for idx in 0..s.space() {
            let st = State::from_index(idx, vocab.len());
            if f.eval(&st, vocab).expect("formula scope within vocab") {
                s.insert(idx);
            }
        }
        Ok(s)
    }

    pub fn from_dnf(dnf: &TermList, vocab: &Vocab, caps: &Caps) -> Result<Self, OracleError> {
        let mut s = Self::empty(vocab.len(), caps)?;
        for idx in 0..s.space() {
            if State::from_index(idx, vocab.len()).satisfies_dnf(dnf, vocab) {
                s.insert(idx);
            }
        }
        Ok(s)
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    /// Number of states in the space (2^bits).
    pub fn space(&self) -> u64 {
        1u64 << self.bits
    }

    pub fn contains(&self, idx: u64) -> bool {
        self.words[(idx / 64) as usize] >> (idx % 64) & 1 == 1
    }

    pub fn contains_state(&self, s: &State) -> bool {
        self.contains(s.to_index())
    }

    pub fn insert(&mut self, idx: u64) {
        self.words[(idx / 64) as usize] |= 1 << (idx % 64);
    }

    pub fn remove(&mut self, idx: u64) {
        self.words[(idx / 64) as usize] &= !(1 << (idx % 64));
    }

    pub fn count(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn members(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.space()).filter(move |&i| self.contains(i))
    }

    pub fn states(&self) -> impl Iterator<Item = State> + '_ {
        let bits = self.bits;
        self.members().map(move |i| State::from_index(i, bits))
    }

    pub fn complement(&self) -> ExplicitSet {
        let mut out = self.clone();
        for w in &mut out.words {
            *w = !*w;
        }
        // mask off the tail beyond 2^bits
        let tail = self.space() % 64;
        if tail != 0 {
            if let Some(last) = out.words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
        out
    }

    pub fn union(&self, other: &ExplicitSet) -> ExplicitSet {
        assert_eq!(self.bits, other.bits);
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect();
        ExplicitSet { bits: self.bits, words }
    }

    pub fn intersect(&self, other: &ExplicitSet) -> ExplicitSet {
        assert_eq!(self.bits, other.bits);
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect();
        ExplicitSet { bits: self.bits, words }
    }

    pub fn is_subset_of(&self, other: &ExplicitSet) -> bool {
        assert_eq!(self.bits, other.bits);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }
}

/// Positions of a cube's literals in a vocabulary, with the polarity the cube
/// requires.
fn cube_positions(b: &Cube, vocab: &Vocab) -> Vec<(usize, bool)> {
    b.literals()
        .iter()
        .map(|l| (vocab.position(l.var).expect("cube scope within vocab"), l.positive))
        .collect()
}

/// `{x : ∃v ∈ S, v ≤_b x}` — the least `b`-monotone overapproximation,
/// computed as a flip closure: starting from S, repeatedly flip bits away
/// from the value `b` assigns them.
pub fn exact_monotonize(
    set: &ExplicitSet,
    b: &Cube,
    vocab: &Vocab,
    caps: &Caps,
) -> Result<ExplicitSet, OracleError> {
    check_cap("exact_monotonize", set.bits(), caps.loop_bits)?;
    let dom = cube_positions(b, vocab);
    let mut out = set.clone();
    let mut stack: Vec<u64> = out.members().collect();
    while let Some(idx) = stack.pop() {
        for &(pos, positive) in &dom {
            let bit = idx >> pos & 1 == 1;
            if bit == positive {
                // agrees with b here; flipping moves away from b
                let next = idx ^ (1 << pos);
                if !out.contains(next) {
                    out.insert(next);
                    stack.push(next);
                }
            }
        }
    }
    Ok(out)
}

/// Whether flipping any bit of a member away from `b` stays in the set.
pub fn is_b_monotone(set: &ExplicitSet, b: &Cube, vocab: &Vocab) -> bool {
    let dom = cube_positions(b, vocab);
    set.members().all(|idx| {
        dom.iter().all(|&(pos, positive)| {
            let bit = idx >> pos & 1 == 1;
            bit != positive || set.contains(idx ^ (1 << pos))
        })
    })
}

/// The literals of a state's full cube minus those present in `b`.
fn state_cube_minus(idx: u64, b: &Cube, vocab: &Vocab) -> Cube {
    let mut lits = Vec::new();
    for pos in 0..vocab.len() {
        let var = vocab.var_at(pos);
        let positive = idx >> pos & 1 == 1;
        if b.value_of(var) != Some(positive) {
            lits.push(Literal::new(var, positive));
        }
    }
    Cube::new(lits).expect("one literal per variable")
}

/// The unique irredundant DNF of a `b`-monotone set: the disjunction of its
/// non-trivial prime implicants. The input must be `b`-monotone.
pub fn prime_implicants(
    set: &ExplicitSet,
    b: &Cube,
    vocab: &Vocab,
    caps: &Caps,
) -> Result<TermList, OracleError> {
    check_cap("prime_implicants", set.bits(), caps.loop_bits)?;
    if !is_b_monotone(set, b, vocab) {
        return Err(OracleError::NotBMonotone);
    }
    let dom = cube_positions(b, vocab);
    let mut terms = Vec::new();
    for idx in set.members() {
        // minimal w.r.t. ≤_b: every flip towards b leaves the set
        let minimal = dom.iter().all(|&(pos, positive)| {
            let bit = idx >> pos & 1 == 1;
            if bit == positive {
                true
            } else {
                let towards = idx ^ (1 << pos);
                !set.contains(towards)
            }
        });
        if minimal {
            terms.push(state_cube_minus(idx, b, vocab));
        }
    }
    Ok(TermList::new(terms).normalized())
}

/// BFS closure of `Init` under `Tr`, depth at most `s`.
pub fn reachable_upto(
    ts: &TransitionSystem,
    s: u32,
    caps: &Caps,
) -> Result<ExplicitSet, OracleError> {
    let vocab = ts.vocab();
    check_cap("reachable_upto", vocab.len(), caps.loop_bits)?;
    let mut reach = ExplicitSet::from_formula(&ts.init, &vocab, caps)?;
    let mut frontier: Vec<u64> = reach.members().collect();
    let pair = ts.pair_vocab();
    for _ in 0..s {
        let mut next = Vec::new();
        for &pre in &frontier {
            let pre_state = State::from_index(pre, vocab.len());
            for post in 0..reach.space() {
                if reach.contains(post) {
                    continue;
                }
                let post_state = State::from_index(post, vocab.len());
                let both = State::pair(&pre_state, &post_state);
                if ts.tr.eval(&both, &pair).expect("tr scope") {
                    reach.insert(post);
                    next.push(post);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(reach)
}

/// The exact post-image `Tr(S)`.
pub fn post_image(
    ts: &TransitionSystem,
    set: &ExplicitSet,
    caps: &Caps,
) -> Result<ExplicitSet, OracleError> {
    let vocab = ts.vocab();
    check_cap("post_image", vocab.len(), caps.loop_bits)?;
    let pair = ts.pair_vocab();
    let mut out = ExplicitSet::empty(vocab.len(), caps)?;
    for pre in set.members() {
        let pre_state = State::from_index(pre, vocab.len());
        for post in 0..out.space() {
            if out.contains(post) {
                continue;
            }
            let post_state = State::from_index(post, vocab.len());
            if ts.tr.eval(&State::pair(&pre_state, &post_state), &pair).expect("tr scope") {
                out.insert(post);
            }
        }
    }
    Ok(out)
}

/// The inner boundary `∂⁺(I)`: members with a Hamming-distance-1 neighbor
/// outside.
pub fn boundary(set: &ExplicitSet, caps: &Caps) -> Result<ExplicitSet, OracleError> {
    check_cap("boundary", set.bits(), caps.loop_bits)?;
    let mut out = ExplicitSet::empty(set.bits(), caps)?;
    for idx in set.members() {
        if (0..set.bits()).any(|p| !set.contains(idx ^ (1 << p))) {
            out.insert(idx);
        }
    }
    Ok(out)
}

/// Checks `∂⁺(I) ⊆ R_s`. The inner `Err(state)` carries an unfenced boundary
/// state.
pub fn fence_check(
    ts: &TransitionSystem,
    invariant: &ExplicitSet,
    s: u32,
    caps: &Caps,
) -> Result<Result<(), State>, OracleError> {
    let reach = reachable_upto(ts, s, caps)?;
    let bnd = boundary(invariant, caps)?;
    for idx in bnd.members() {
        if !reach.contains(idx) {
            return Ok(Err(State::from_index(idx, invariant.bits() )));
        }
    }
    Ok(Ok(()))
}

/// All prime implicants of an arbitrary set, by cube enumeration.
/// A cube is a `(fixed_mask, values)` pair over the state bits.
fn all_prime_implicants(set: &ExplicitSet) -> Vec<(u64, u64)> {
    let bits = set.bits();
    let is_implicant = |mask: u64, vals: u64| -> bool {
        let free: Vec<usize> = (0..bits).filter(|p| mask >> p & 1 == 0).collect();
        (0u64..1 << free.len()).all(|assign| {
            let mut idx = vals;
            for (k, &p) in free.iter().enumerate() {
                if assign >> k & 1 == 1 {
                    idx |= 1 << p;
                }
            }
            set.contains(idx)
        })
    };
    let mut primes = Vec::new();
    for mask in 0u64..1 << bits {
        let fixed: Vec<usize> = (0..bits).filter(|p| mask >> p & 1 == 1).collect();
        for choice in 0u64..1 << fixed.len() {
            let mut vals = 0u64;
            for (k, &p) in fixed.iter().enumerate() {
                if choice >> k & 1 == 1 {
                    vals |= 1 << p;
                }
            }
            if !is_implicant(mask, vals) {
                continue;
            }
            let prime = fixed
                .iter()
                .all(|&p| !is_implicant(mask & !(1 << p), vals & !(1 << p)));
            if prime {
                primes.push((mask, vals));
            }
        }
    }
    primes
}

fn cube_from_mask(mask: u64, vals: u64, vocab: &Vocab) -> Cube {
    let mut lits = Vec::new();
    for pos in 0..vocab.len() {
        if mask >> pos & 1 == 1 {
            lits.push(Literal::new(vocab.var_at(pos), vals >> pos & 1 == 1));
        }
    }
    Cube::new(lits).expect("one literal per position")
}

/// Minimum number of prime implicants covering `set`, with a witness cover,
/// by branch and bound over the prime-implicant table.
fn min_cover(set: &ExplicitSet) -> (usize, Vec<(u64, u64)>) {
    if set.is_empty() {
        return (0, Vec::new());
    }
    let primes = all_prime_implicants(set);
    let members: Vec<u64> = set.members().collect();
    let member_pos: std::collections::HashMap<u64, usize> =
        members.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let bits = set.bits();
    // coverage[k] = member indices covered by prime k
    let coverage: Vec<Vec<usize>> = primes
        .iter()
        .map(|&(mask, vals)| {
            let free: Vec<usize> = (0..bits).filter(|p| mask >> p & 1 == 0).collect();
            (0u64..1 << free.len())
                .map(|assign| {
                    let mut idx = vals;
                    for (k, &p) in free.iter().enumerate() {
                        if assign >> k & 1 == 1 {
                            idx |= 1 << p;
                        }
                    }
                    member_pos[&idx]
                })
                .collect()
        })
        .collect();
    let mut covered_by: Vec<Vec<usize>> = vec![Vec::new(); members.len()];
    for (k, cov) in coverage.iter().enumerate() {
        for &m in cov {
            covered_by[m].push(k);
        }
    }
    // bigger primes first, so the greedy-ish first descent sets a good bound
    for options in &mut covered_by {
        options.sort_by_key(|&k| std::cmp::Reverse(coverage[k].len()));
    }
    let max_cover = coverage.iter().map(Vec::len).max().unwrap_or(1).max(1);

    struct Search<'a> {
        coverage: &'a [Vec<usize>],
        covered_by: &'a [Vec<usize>],
        max_cover: usize,
        covered: Vec<u32>,
        uncovered: usize,
        picked: Vec<usize>,
        best: usize,
        best_pick: Vec<usize>,
    }

    impl Search<'_> {
        fn run(&mut self) {
            if self.uncovered == 0 {
                self.best = self.picked.len();
                self.best_pick = self.picked.clone();
                return;
            }
            // admissible bound: each further prime covers at most max_cover
            let lower = self.picked.len() + self.uncovered.div_ceil(self.max_cover);
            if lower >= self.best {
                return;
            }
            // branch on the uncovered member with the fewest covering primes
            let target = (0..self.covered.len())
                .filter(|&m| self.covered[m] == 0)
                .min_by_key(|&m| self.covered_by[m].len())
                .expect("uncovered > 0");
            let options = self.covered_by[target].clone();
            for k in options {
                for &m in &self.coverage[k] {
                    if self.covered[m] == 0 {
                        self.uncovered -= 1;
                    }
                    self.covered[m] += 1;
                }
                self.picked.push(k);
                self.run();
                self.picked.pop();
                for &m in &self.coverage[k] {
                    self.covered[m] -= 1;
                    if self.covered[m] == 0 {
                        self.uncovered += 1;
                    }
                }
            }
        }
    }

    let mut search = Search {
        coverage: &coverage,
        covered_by: &covered_by,
        max_cover,
        covered: vec![0; members.len()],
        uncovered: members.len(),
        picked: Vec::new(),
        best: usize::MAX,
        best_pick: Vec::new(),
    };
    search.run();
    (search.best, search.best_pick.iter().map(|&k| primes[k]).collect())
}

/// Exact `|S|dnf` and a witness minimum DNF.
pub fn min_dnf_cover(
    set: &ExplicitSet,
    vocab: &Vocab,
    caps: &Caps,
) -> Result<TermList, OracleError> {
    check_cap("min_dnf", set.bits(), caps.minimize_bits)?;
    let (_, cover) = min_cover(set);
    Ok(TermList::new(cover.iter().map(|&(m, v)| cube_from_mask(m, v, vocab)).collect())
        .normalized())
}

pub fn min_dnf_size(set: &ExplicitSet, caps: &Caps) -> Result<usize, OracleError> {
    check_cap("min_dnf", set.bits(), caps.minimize_bits)?;
    Ok(min_cover(set).0)
}

/// Exact `|S|cnf` via the complement: a minimum CNF of S is the negation of
/// a minimum DNF of ¬S.
pub fn min_cnf_size(set: &ExplicitSet, caps: &Caps) -> Result<usize, OracleError> {
    check_cap("min_cnf", set.bits(), caps.minimize_bits)?;
    Ok(min_cover(&set.complement()).0)
}

pub fn min_cnf_cover(
    set: &ExplicitSet,
    vocab: &Vocab,
    caps: &Caps,
) -> Result<ClauseList, OracleError> {
    let dnf = min_dnf_cover(&set.complement(), vocab, caps)?;
    let mut out = ClauseList::new(dnf.terms.iter().map(Cube::negate_to_clause).collect());
    out.normalize();
    Ok(out)
}

/// One exact abstract-interpretation step: `α_B(Tr(γ(ξ)) ∪ Init)`, where
/// the abstraction is the intersection of the exact monotonizations per
/// basis cube.
pub fn exact_abstract_iterate(
    ts: &TransitionSystem,
    basis: &[Cube],
    xi: &ExplicitSet,
    caps: &Caps,
) -> Result<ExplicitSet, OracleError> {
    let vocab = ts.vocab();
    let post = post_image(ts, xi, caps)?;
    let init = ExplicitSet::from_formula(&ts.init, &vocab, caps)?;
    abstract_hull(&post.union(&init), basis, &vocab, caps)
}

/// `α_B(S)`: the intersection of `exact_monotonize(S, b)` over the basis.
pub fn abstract_hull(
    set: &ExplicitSet,
    basis: &[Cube],
    vocab: &Vocab,
    caps: &Caps,
) -> Result<ExplicitSet, OracleError> {
    let mut out = ExplicitSet::full(set.bits(), caps)?;
    for b in basis {
        out = out.intersect(&exact_monotonize(set, b, vocab, caps)?);
    }
    Ok(out)
}

/// An explicit set as an intersection oracle, for cross-checking the
/// SAT-driven algorithms. Witnesses are lowest-index first.
pub struct ExplicitOracle<'a> {
    set: &'a ExplicitSet,
    vocab: Vocab,
    pub queries: u64,
}

impl<'a> ExplicitOracle<'a> {
    pub fn new(set: &'a ExplicitSet, vocab: Vocab) -> Self {
        assert_eq!(set.bits(), vocab.len());
        ExplicitOracle { set, vocab, queries: 0 }
    }
}

impl IntersectionOracle for ExplicitOracle<'_> {
    fn vocab(&self) -> Vocab {
        self.vocab
    }

    fn witness(&mut self, theta: &Formula) -> Option<State> {
        self.queries += 1;
        self.set.states().find(|s| theta.eval(s, &self.vocab).expect("theta scope"))
    }
}
