//! Boolean formula AST over one or more vocabulary copies.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::types::{Clause, ClauseList, Cube, State, TermList, Var, Vocab};

/// A Boolean combination of variables. `And`/`Or` are n-ary; `Xor`/`Iff` are
/// binary.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Formula {
    Const(bool),
    Atom(Var),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Xor(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("variable {var} is not covered by the assignment")]
    MissingVariable { var: Var },
    #[error("copy renaming does not cover occurring copy {copy} (variable {var})")]
    UnmappedCopy { var: Var, copy: u32 },
}

impl Formula {
    pub fn lit(var: Var, positive: bool) -> Formula {
        if positive {
            Formula::Atom(var)
        } else {
            Formula::Atom(var).negated()
        }
    }

    pub fn negated(self) -> Formula {
        Formula::Not(Box::new(self))
    }

    pub fn and(parts: Vec<Formula>) -> Formula {
        match parts.len() {
            0 => Formula::Const(true),
            1 => parts.into_iter().next().unwrap(),
            _ => Formula::And(parts),
        }
    }

    pub fn or(parts: Vec<Formula>) -> Formula {
        match parts.len() {
            0 => Formula::Const(false),
            1 => parts.into_iter().next().unwrap(),
            _ => Formula::Or(parts),
        }
    }

    /// Standard Boolean semantics under a total assignment; fails with the
    /// offending variable when the assignment does not cover it.
    pub fn eval(&self, state: &State, vocab: &Vocab) -> Result<bool, FormulaError> {
        match self {
            Formula::Const(b) => Ok(*b),
            Formula::Atom(v) => state
                .value_of(*v, vocab)
                .ok_or(FormulaError::MissingVariable { var: *v }),
            Formula::Not(f) => Ok(!f.eval(state, vocab)?),
            Formula::And(fs) => {
                let mut acc = true;
                for f in fs {
                    acc &= f.eval(state, vocab)?;
                }
                Ok(acc)
            }
            Formula::Or(fs) => {
                let mut acc = false;
                for f in fs {
                    acc |= f.eval(state, vocab)?;
                }
                Ok(acc)
            }
            Formula::Xor(a, b) => Ok(a.eval(state, vocab)? ^ b.eval(state, vocab)?),
            Formula::Iff(a, b) => Ok(a.eval(state, vocab)? == b.eval(state, vocab)?),
        }
    }

    /// All variables occurring in the formula.
    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Formula::Const(_) => {}
            Formula::Atom(v) => {
                out.insert(*v);
            }
            Formula::Not(f) => f.collect_vars(out),
            Formula::And(fs) | Formula::Or(fs) => {
                for f in fs {
                    f.collect_vars(out);
                }
            }
            Formula::Xor(a, b) | Formula::Iff(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// The set of vocabulary copies that occur.
    pub fn copies(&self) -> BTreeSet<u32> {
        self.vars().into_iter().map(|v| v.copy).collect()
    }

    /// Re-tags every variable occurrence per `mapping`; copies absent from
    /// the mapping are left intact. Structure is unchanged.
    pub fn rename_copies(&self, mapping: &BTreeMap<u32, u32>) -> Formula {
        match self {
            Formula::Const(b) => Formula::Const(*b),
            Formula::Atom(v) => {
                let copy = mapping.get(&v.copy).copied().unwrap_or(v.copy);
                Formula::Atom(Var::with_copy(v.index, copy))
            }
            Formula::Not(f) => f.rename_copies(mapping).negated(),
            Formula::And(fs) => {
                Formula::And(fs.iter().map(|f| f.rename_copies(mapping)).collect())
            }
            Formula::Or(fs) => {
                Formula::Or(fs.iter().map(|f| f.rename_copies(mapping)).collect())
            }
            Formula::Xor(a, b) => Formula::Xor(
                Box::new(a.rename_copies(mapping)),
                Box::new(b.rename_copies(mapping)),
            ),
            Formula::Iff(a, b) => Formula::Iff(
                Box::new(a.rename_copies(mapping)),
                Box::new(b.rename_copies(mapping)),
            ),
        }
    }

    /// Substitutes the primed copy for the unprimed one. The input must be a
    /// one-copy formula over the unprimed vocabulary.
    pub fn prime(&self) -> Result<Formula, FormulaError> {
        for v in self.vars() {
            if v.copy != 0 {
                return Err(FormulaError::UnmappedCopy { var: v, copy: v.copy });
            }
        }
        Ok(self.rename_copies(&BTreeMap::from([(0, 1)])))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Const(true) => write!(f, "true"),
            Formula::Const(false) => write!(f, "false"),
            Formula::Atom(v) => write!(f, "{v}"),
            Formula::Not(g) => write!(f, "(not {g})"),
            Formula::And(fs) => {
                write!(f, "(and")?;
                for g in fs {
                    write!(f, " {g}")?;
                }
                write!(f, ")")
            }
            Formula::Or(fs) => {
                write!(f, "(or")?;
                for g in fs {
                    write!(f, " {g}")?;
                }
                write!(f, ")")
            }
            Formula::Xor(a, b) => write!(f, "(xor {a} {b})"),
            Formula::Iff(a, b) => write!(f, "(iff {a} {b})"),
        }
    }
}

impl Cube {
    pub fn to_formula(&self) -> Formula {
        Formula::and(self.literals().iter().map(|l| Formula::lit(l.var, l.positive)).collect())
    }
}

impl Clause {
    pub fn to_formula(&self) -> Formula {
        Formula::or(self.literals().iter().map(|l| Formula::lit(l.var, l.positive)).collect())
    }
}

impl TermList {
    pub fn to_formula(&self) -> Formula {
        Formula::or(self.terms.iter().map(Cube::to_formula).collect())
    }
}

impl ClauseList {
    pub fn to_formula(&self) -> Formula {
        Formula::and(self.clauses.iter().map(Clause::to_formula).collect())
    }
}

/// `∧_i (p_i ↔ p_i')` between two copies, used by bounded unrollings.
pub fn frame_equality(n: u32, from_copy: u32, to_copy: u32) -> Formula {
    Formula::and(
        (0..n)
            .map(|i| {
                Formula::Iff(
                    Box::new(Formula::Atom(Var::with_copy(i, from_copy))),
                    Box::new(Formula::Atom(Var::with_copy(i, to_copy))),
                )
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{state_from_str, Literal};

    fn p(i: u32) -> Formula {
        Formula::Atom(Var::new(i))
    }

    #[test]
    fn eval_basic_connectives() {
        let v = Vocab::single(2);
        // p0 ∧ ¬p1 on (p0=1, p1=0)
        let f = Formula::and(vec![p(0), p(1).negated()]);
        assert_eq!(f.eval(&state_from_str("10"), &v), Ok(true));
        // xor(p0, p1) on (1, 1)
        let g = Formula::Xor(Box::new(p(0)), Box::new(p(1)));
        assert_eq!(g.eval(&state_from_str("11"), &v), Ok(false));
        assert_eq!(g.eval(&state_from_str("01"), &v), Ok(true));
        let h = Formula::Iff(Box::new(p(0)), Box::new(p(1)));
        assert_eq!(h.eval(&state_from_str("11"), &v), Ok(true));
    }

    #[test]
    fn eval_missing_variable_is_reported() {
        let v = Vocab::single(2);
        let f = p(5);
        assert_eq!(
            f.eval(&state_from_str("10"), &v),
            Err(FormulaError::MissingVariable { var: Var::new(5) })
        );
        let primed = Formula::Atom(Var::new(0).primed());
        assert_eq!(
            primed.eval(&state_from_str("10"), &v),
            Err(FormulaError::MissingVariable { var: Var::new(0).primed() })
        );
    }

    #[test]
    fn prime_retags_every_occurrence() {
        // p1 ∨ ¬p3 → p1' ∨ ¬p3'
        let f = Formula::or(vec![p(1), p(3).negated()]);
        let primed = f.prime().unwrap();
        assert_eq!(
            primed,
            Formula::or(vec![
                Formula::Atom(Var::new(1).primed()),
                Formula::Atom(Var::new(3).primed()).negated(),
            ])
        );
        assert_eq!(Formula::Const(true).prime(), Ok(Formula::Const(true)));
        assert!(Formula::Atom(Var::new(0).primed()).prime().is_err());
    }

    #[test]
    fn rename_is_identity_on_unmapped_copies() {
        // Tr-shaped formula over copies {0, 1}; rename copy 1 → 2.
        let tr = Formula::Iff(Box::new(Formula::Atom(Var::new(0).primed())), Box::new(p(0)));
        let renamed = tr.rename_copies(&BTreeMap::from([(1, 2)]));
        assert_eq!(
            renamed,
            Formula::Iff(
                Box::new(Formula::Atom(Var::with_copy(0, 2))),
                Box::new(p(0))
            )
        );
    }

    #[test]
    fn rename_back_is_structurally_identity() {
        let f = Formula::and(vec![
            p(0),
            Formula::Xor(Box::new(p(1)), Box::new(p(2).negated())),
        ]);
        let there = f.prime().unwrap();
        let back = there.rename_copies(&BTreeMap::from([(1, 0)]));
        assert_eq!(back, f);
    }

    #[test]
    fn cube_and_clause_formulas() {
        let v = Vocab::single(3);
        let c = Cube::new(vec![
            Literal::positive(Var::new(0)),
            Literal::negative(Var::new(2)),
        ])
        .unwrap();
        let f = c.to_formula();
        for idx in 0..8 {
            let s = State::from_index(idx, 3);
            assert_eq!(f.eval(&s, &v).unwrap(), s.satisfies_cube(&c, &v));
        }
        assert_eq!(Cube::top().to_formula(), Formula::Const(true));
        assert_eq!(Clause::bottom().to_formula(), Formula::Const(false));
    }
}
