//! Transition systems: `(n, Init, Tr, Bad)`.

use thiserror::Error;

use crate::formula::Formula;
use crate::types::{State, Var, Vocab};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SystemError {
    #[error("{section} must be over the unprimed vocabulary, found {var}")]
    PrimedVariable { section: &'static str, var: Var },
    #[error("{section} references {var}, outside the declared {n} variables")]
    VarOutOfRange { section: &'static str, var: Var, n: u32 },
}

/// A propositional transition system. `init` and `bad` are over the unprimed
/// vocabulary; `tr` may reference both copies.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TransitionSystem {
    n: u32,
    pub init: Formula,
    pub tr: Formula,
    pub bad: Formula,
}

impl TransitionSystem {
    pub fn new(n: u32, init: Formula, tr: Formula, bad: Formula) -> Result<Self, SystemError> {
        check_scope("init", &init, n, 0)?;
        check_scope("trans", &tr, n, 1)?;
        check_scope("bad", &bad, n, 0)?;
        Ok(TransitionSystem { n, init, tr, bad })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn vocab(&self) -> Vocab {
        Vocab::single(self.n)
    }

    pub fn pair_vocab(&self) -> Vocab {
        Vocab::pair(self.n)
    }

    /// Whether `(pre, post)` is a transition, by direct evaluation.
    pub fn is_transition(&self, pre: &State, post: &State) -> bool {
        let pair = State::pair(pre, post);
        self.tr
            .eval(&pair, &self.pair_vocab())
            .expect("tr is scope-checked at construction")
    }
}

fn check_scope(
    section: &'static str,
    f: &Formula,
    n: u32,
    max_copy: u32,
) -> Result<(), SystemError> {
    for var in f.vars() {
        if var.copy > max_copy {
            return Err(SystemError::PrimedVariable { section, var });
        }
        if var.index >= n {
            return Err(SystemError::VarOutOfRange { section, var, n });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_primed_init_and_bad() {
        let primed = Formula::Atom(Var::new(0).primed());
        let err = TransitionSystem::new(2, primed.clone(), Formula::Const(true), Formula::Const(false));
        assert!(matches!(err, Err(SystemError::PrimedVariable { section: "init", .. })));
        let err = TransitionSystem::new(2, Formula::Const(true), Formula::Const(true), primed);
        assert!(matches!(err, Err(SystemError::PrimedVariable { section: "bad", .. })));
    }

    #[test]
    fn rejects_out_of_range_vars() {
        let err = TransitionSystem::new(
            2,
            Formula::Atom(Var::new(2)),
            Formula::Const(true),
            Formula::Const(false),
        );
        assert!(matches!(err, Err(SystemError::VarOutOfRange { .. })));
    }
}
