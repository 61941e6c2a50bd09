//! Vocabulary, literals, cubes, clauses, states and normal-form lists.
//!
//! A vocabulary has `n` Boolean variables and one or more *copies*: copy 0 is
//! the pre-state vocabulary, copy 1 the primed (post-state) vocabulary, and
//! higher copies appear in bounded unrollings. A primed variable is a
//! `(index, copy)` pair, never a shifted raw index.

use std::fmt;

use thiserror::Error;

/// A propositional variable: an index into the vocabulary plus a copy tag.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Var {
    pub copy: u32,
    pub index: u32,
}

impl Var {
    /// Variable `p<index>` in the unprimed vocabulary.
    pub fn new(index: u32) -> Self {
        Var { index, copy: 0 }
    }

    pub fn with_copy(index: u32, copy: u32) -> Self {
        Var { index, copy }
    }

    /// The same variable one copy up (`p` becomes `p'`).
    pub fn primed(self) -> Self {
        Var { index: self.index, copy: self.copy + 1 }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}", self.index)?;
        for _ in 0..self.copy {
            write!(f, "'")?;
        }
        Ok(())
    }
}

/// A variable or its negation.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Literal {
    pub var: Var,
    pub positive: bool,
}

impl Literal {
    pub fn new(var: Var, positive: bool) -> Self {
        Literal { var, positive }
    }

    pub fn positive(var: Var) -> Self {
        Literal { var, positive: true }
    }

    pub fn negative(var: Var) -> Self {
        Literal { var, positive: false }
    }

    pub fn negated(self) -> Self {
        Literal { var: self.var, positive: !self.positive }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "{}", self.var)
        } else {
            write!(f, "(not {})", self.var)
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CubeError {
    #[error("inconsistent cube: both {var} and its negation")]
    Inconsistent { var: Var },
    #[error("duplicate literal on {var} in clause")]
    DuplicateVar { var: Var },
}

/// A conjunction of a consistent set of literals. The empty cube is `true`.
///
/// Literals are kept sorted by variable; there is at most one literal per
/// variable. A cube may span several vocabulary copies.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Cube {
    lits: Vec<Literal>,
}

impl Cube {
    /// The empty cube, denoting `true`.
    pub fn top() -> Self {
        Cube { lits: Vec::new() }
    }

    pub fn new(mut lits: Vec<Literal>) -> Result<Self, CubeError> {
        lits.sort();
        lits.dedup();
        for pair in lits.windows(2) {
            if pair[0].var == pair[1].var {
                return Err(CubeError::Inconsistent { var: pair[0].var });
            }
        }
        Ok(Cube { lits })
    }

    /// Single-literal cube.
    pub fn unit(lit: Literal) -> Self {
        Cube { lits: vec![lit] }
    }

    /// Adds a literal, rejecting an insert that would make the cube
    /// inconsistent.
    pub fn insert(&mut self, lit: Literal) -> Result<(), CubeError> {
        match self.lits.binary_search_by(|l| l.var.cmp(&lit.var)) {
            Ok(i) => {
                if self.lits[i] == lit {
                    Ok(())
                } else {
                    Err(CubeError::Inconsistent { var: lit.var })
                }
            }
            Err(i) => {
                self.lits.insert(i, lit);
                Ok(())
            }
        }
    }

    pub fn literals(&self) -> &[Literal] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    /// The set of variables that appear in the cube.
    pub fn domain(&self) -> impl Iterator<Item = Var> + '_ {
        self.lits.iter().map(|l| l.var)
    }

    /// The polarity this cube assigns to `var`, if any.
    pub fn value_of(&self, var: Var) -> Option<bool> {
        self.lits
            .binary_search_by(|l| l.var.cmp(&var))
            .ok()
            .map(|i| self.lits[i].positive)
    }

    pub fn contains(&self, lit: Literal) -> bool {
        self.value_of(lit.var) == Some(lit.positive)
    }

    /// True if every literal of `self` also appears in `other` (so `other`
    /// implies `self`).
    pub fn subsumes(&self, other: &Cube) -> bool {
        self.lits.iter().all(|l| other.contains(*l))
    }

    /// Conjunction of two cubes; `None` when they conflict.
    pub fn conjoin(&self, other: &Cube) -> Option<Cube> {
        let mut out = self.clone();
        for &l in other.literals() {
            if out.insert(l).is_err() {
                return None;
            }
        }
        Some(out)
    }

    /// Negates every literal.
    pub fn reflect(&self) -> Cube {
        Cube { lits: self.lits.iter().map(|l| l.negated()).collect() }
    }

    /// The clause `¬cube`: the disjunction of the negated literals.
    pub fn negate_to_clause(&self) -> Clause {
        Clause { lits: self.lits.iter().map(|l| l.negated()).collect() }
    }

    /// Keeps only literals over the given copy.
    pub fn restrict_to_copy(&self, copy: u32) -> Cube {
        Cube { lits: self.lits.iter().copied().filter(|l| l.var.copy == copy).collect() }
    }

    /// Re-tags every literal with the given copy, keeping indices.
    pub fn with_copy(&self, copy: u32) -> Cube {
        let mut lits: Vec<Literal> = self
            .lits
            .iter()
            .map(|l| Literal::new(Var::with_copy(l.var.index, copy), l.positive))
            .collect();
        lits.sort();
        Cube { lits }
    }
}

impl fmt::Display for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.lits.len() {
            0 => write!(f, "true"),
            1 => write!(f, "{}", self.lits[0]),
            _ => {
                write!(f, "(and")?;
                for l in &self.lits {
                    write!(f, " {l}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// A disjunction of literals, at most one per variable. The empty clause is
/// `false`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Clause {
    lits: Vec<Literal>,
}

impl Clause {
    /// The empty clause, denoting `false`.
    pub fn bottom() -> Self {
        Clause { lits: Vec::new() }
    }

    pub fn new(mut lits: Vec<Literal>) -> Result<Self, CubeError> {
        lits.sort();
        lits.dedup();
        for pair in lits.windows(2) {
            if pair[0].var == pair[1].var {
                return Err(CubeError::DuplicateVar { var: pair[0].var });
            }
        }
        Ok(Clause { lits })
    }

    pub fn literals(&self) -> &[Literal] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn contains(&self, lit: Literal) -> bool {
        self.lits.binary_search(&lit).is_ok()
    }

    /// The clause with the literal on `var` removed.
    pub fn without_var(&self, var: Var) -> Clause {
        Clause { lits: self.lits.iter().copied().filter(|l| l.var != var).collect() }
    }

    /// The cube `¬clause`: the conjunction of the negated literals.
    pub fn negate_to_cube(&self) -> Cube {
        Cube { lits: self.lits.iter().map(|l| l.negated()).collect() }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.lits.len() {
            0 => write!(f, "false"),
            1 => write!(f, "{}", self.lits[0]),
            _ => {
                write!(f, "(or")?;
                for l in &self.lits {
                    write!(f, " {l}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// A DNF: the disjunction of its terms. The empty list denotes `false`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct TermList {
    pub terms: Vec<Cube>,
}

impl TermList {
    pub fn new(terms: Vec<Cube>) -> Self {
        TermList { terms }
    }

    pub fn bottom() -> Self {
        TermList { terms: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sorts and removes duplicate terms. No semantic minimization.
    pub fn normalize(&mut self) {
        self.terms.sort();
        self.terms.dedup();
    }

    pub fn normalized(mut self) -> Self {
        self.normalize();
        self
    }

    /// Removes terms subsumed by another term of the list (syntactic cube
    /// subsumption only).
    pub fn prune_subsumed(&mut self) {
        self.normalize();
        let terms = std::mem::take(&mut self.terms);
        let mut kept: Vec<Cube> = Vec::with_capacity(terms.len());
        for t in terms {
            if !kept.iter().any(|k| k.subsumes(&t)) {
                kept.retain(|k| !t.subsumes(k));
                kept.push(t);
            }
        }
        kept.sort();
        self.terms = kept;
    }
}

impl fmt::Display for TermList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.terms.len() {
            0 => write!(f, "false"),
            1 => write!(f, "{}", self.terms[0]),
            _ => {
                write!(f, "(or")?;
                for t in &self.terms {
                    write!(f, " {t}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// A CNF: the conjunction of its clauses. The empty list denotes `true`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ClauseList {
    pub clauses: Vec<Clause>,
}

impl ClauseList {
    pub fn new(clauses: Vec<Clause>) -> Self {
        ClauseList { clauses }
    }

    pub fn top() -> Self {
        ClauseList { clauses: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn normalize(&mut self) {
        self.clauses.sort();
        self.clauses.dedup();
    }
}

impl fmt::Display for ClauseList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.clauses.len() {
            0 => write!(f, "true"),
            1 => write!(f, "{}", self.clauses[0]),
            _ => {
                write!(f, "(and")?;
                for c in &self.clauses {
                    write!(f, " {c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// The ambient variable space: `n` variables in `copies` vocabulary copies.
///
/// Bit positions of [`State`]s are laid out copy-major: variable
/// `(index, copy)` sits at position `copy * n + index`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Vocab {
    n: u32,
    copies: u32,
}

impl Vocab {
    pub fn single(n: u32) -> Self {
        Vocab { n, copies: 1 }
    }

    /// Pre- and post-state copies: `p0..p{n-1}, p0'..p{n-1}'`.
    pub fn pair(n: u32) -> Self {
        Vocab { n, copies: 2 }
    }

    pub fn with_copies(n: u32, copies: u32) -> Self {
        assert!(copies >= 1);
        Vocab { n, copies }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn copies(&self) -> u32 {
        self.copies
    }

    /// Total number of variables (bit positions) in the space.
    pub fn len(&self) -> usize {
        (self.n * self.copies) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, var: Var) -> bool {
        var.index < self.n && var.copy < self.copies
    }

    pub fn position(&self, var: Var) -> Option<usize> {
        if self.contains(var) {
            Some((var.copy * self.n + var.index) as usize)
        } else {
            None
        }
    }

    pub fn var_at(&self, position: usize) -> Var {
        debug_assert!(position < self.len());
        Var { index: position as u32 % self.n, copy: position as u32 / self.n }
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        (0..self.len()).map(|p| self.var_at(p))
    }
}

/// A total Boolean assignment over a [`Vocab`], stored positionally.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct State {
    bits: Vec<bool>,
}

impl State {
    pub fn new(bits: Vec<bool>) -> Self {
        State { bits }
    }

    pub fn all_false(len: usize) -> Self {
        State { bits: vec![false; len] }
    }

    pub fn all_true(len: usize) -> Self {
        State { bits: vec![true; len] }
    }

    /// Decodes a state from the low bits of `index` (bit `i` of the index is
    /// position `i`).
    pub fn from_index(index: u64, len: usize) -> Self {
        State { bits: (0..len).map(|i| index >> i & 1 == 1).collect() }
    }

    /// Inverse of [`State::from_index`].
    pub fn to_index(&self) -> u64 {
        debug_assert!(self.bits.len() <= 64);
        self.bits
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &b)| if b { acc | 1 << i } else { acc })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, position: usize) -> bool {
        self.bits[position]
    }

    pub fn set_bit(&mut self, position: usize, value: bool) {
        self.bits[position] = value;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn value_of(&self, var: Var, vocab: &Vocab) -> Option<bool> {
        vocab.position(var).map(|p| self.bits[p])
    }

    /// The same state with one bit flipped.
    pub fn with_bit(&self, position: usize, value: bool) -> State {
        let mut s = self.clone();
        s.bits[position] = value;
        s
    }

    /// The full cube of all literals satisfied in this state.
    pub fn to_cube(&self, vocab: &Vocab) -> Cube {
        debug_assert_eq!(self.len(), vocab.len());
        Cube {
            lits: (0..self.len())
                .map(|p| Literal::new(vocab.var_at(p), self.bits[p]))
                .collect(),
        }
    }

    /// Positions `copy*n .. (copy+1)*n` as a single-vocabulary state.
    pub fn project_copy(&self, copy: u32, vocab: &Vocab) -> State {
        let n = vocab.n() as usize;
        let start = copy as usize * n;
        State { bits: self.bits[start..start + n].to_vec() }
    }

    /// Concatenates two single-vocabulary states into a pair-vocabulary one.
    pub fn pair(pre: &State, post: &State) -> State {
        let mut bits = pre.bits.clone();
        bits.extend_from_slice(&post.bits);
        State { bits }
    }

    pub fn satisfies_cube(&self, cube: &Cube, vocab: &Vocab) -> bool {
        cube.literals()
            .iter()
            .all(|l| self.value_of(l.var, vocab) == Some(l.positive))
    }

    pub fn satisfies_clause(&self, clause: &Clause, vocab: &Vocab) -> bool {
        clause
            .literals()
            .iter()
            .any(|l| self.value_of(l.var, vocab) == Some(l.positive))
    }

    pub fn satisfies_dnf(&self, dnf: &TermList, vocab: &Vocab) -> bool {
        dnf.terms.iter().any(|t| self.satisfies_cube(t, vocab))
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            write!(f, "{}", if b { '1' } else { '0' })?;
        }
        Ok(())
    }
}

/// Parses a `01` string into a state, low position first.
pub fn state_from_str(s: &str) -> State {
    State::new(s.chars().map(|c| c == '1').collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_rejects_inconsistent_insert() {
        let p0 = Var::new(0);
        let mut c = Cube::unit(Literal::positive(p0));
        assert_eq!(c.insert(Literal::positive(p0)), Ok(()));
        assert_eq!(
            c.insert(Literal::negative(p0)),
            Err(CubeError::Inconsistent { var: p0 })
        );
        assert_eq!(
            Cube::new(vec![Literal::positive(p0), Literal::negative(p0)]),
            Err(CubeError::Inconsistent { var: p0 })
        );
    }

    #[test]
    fn empty_cube_is_true_empty_clause_is_false() {
        let v = Vocab::single(3);
        let s = state_from_str("010");
        assert!(s.satisfies_cube(&Cube::top(), &v));
        assert!(!s.satisfies_clause(&Clause::bottom(), &v));
        assert_eq!(Cube::top().to_string(), "true");
        assert_eq!(Clause::bottom().to_string(), "false");
    }

    #[test]
    fn state_cube_round_trip() {
        let v = Vocab::single(4);
        let s = state_from_str("1010");
        let c = s.to_cube(&v);
        assert_eq!(c.len(), 4);
        assert!(s.satisfies_cube(&c, &v));
        for i in 0..4 {
            assert!(!s.with_bit(i, !s.bit(i)).satisfies_cube(&c, &v));
        }
    }

    #[test]
    fn pair_vocab_positions() {
        let v = Vocab::pair(3);
        assert_eq!(v.position(Var::new(2)), Some(2));
        assert_eq!(v.position(Var::new(1).primed()), Some(4));
        assert_eq!(v.position(Var::with_copy(0, 2)), None);
        assert_eq!(v.var_at(5), Var::with_copy(2, 1));
    }

    #[test]
    fn reflect_is_involution() {
        let d = Cube::new(vec![
            Literal::positive(Var::new(1)),
            Literal::negative(Var::new(3)),
        ])
        .unwrap();
        assert_eq!(d.reflect().reflect(), d);
        assert_eq!(Cube::top().reflect(), Cube::top());
    }

    #[test]
    fn subsumption_pruning_keeps_weakest_cubes() {
        let p = |i| Literal::positive(Var::new(i));
        let mut tl = TermList::new(vec![
            Cube::new(vec![p(0), p(1)]).unwrap(),
            Cube::unit(p(0)),
            Cube::new(vec![p(0), p(1)]).unwrap(),
            Cube::unit(p(2)),
        ]);
        tl.prune_subsumed();
        assert_eq!(tl.terms, vec![Cube::unit(p(0)), Cube::unit(p(2))]);
    }

    #[test]
    fn index_round_trip() {
        for i in 0..32u64 {
            assert_eq!(State::from_index(i, 5).to_index(), i);
        }
    }
}
