//! Binary decision trees and their DNF/CNF readings.

use thiserror::Error;

use crate::types::{Clause, ClauseList, Cube, Literal, State, TermList, Var, Vocab};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("variable {var} tested twice on a root-to-leaf path")]
    RepeatedVariable { var: Var },
}

/// An internal node tests a variable: `low` is taken when it is false,
/// `high` when it is true. Size is the number of leaves.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum DecisionTree {
    Leaf(bool),
    Node { var: Var, low: Box<DecisionTree>, high: Box<DecisionTree> },
}

impl DecisionTree {
    /// Number of leaves.
    pub fn size(&self) -> usize {
        match self {
            DecisionTree::Leaf(_) => 1,
            DecisionTree::Node { low, high, .. } => low.size() + high.size(),
        }
    }

    /// Checks that every root-to-leaf path tests distinct variables.
    pub fn validate(&self) -> Result<(), TreeError> {
        fn walk(t: &DecisionTree, path: &mut Vec<Var>) -> Result<(), TreeError> {
            if let DecisionTree::Node { var, low, high } = t {
                if path.contains(var) {
                    return Err(TreeError::RepeatedVariable { var: *var });
                }
                path.push(*var);
                walk(low, path)?;
                walk(high, path)?;
                path.pop();
            }
            Ok(())
        }
        walk(self, &mut Vec::new())
    }

    pub fn eval(&self, state: &State, vocab: &Vocab) -> bool {
        match self {
            DecisionTree::Leaf(b) => *b,
            DecisionTree::Node { var, low, high } => {
                let bit = state
                    .value_of(*var, vocab)
                    .expect("state covers the tree's variables");
                if bit { high.eval(state, vocab) } else { low.eval(state, vocab) }
            }
        }
    }

    /// The disjunction over true-leaf paths, each path as the conjunction of
    /// its literals.
    pub fn to_dnf(&self) -> TermList {
        let mut terms = Vec::new();
        self.collect_paths(&mut Vec::new(), true, &mut |lits| {
            terms.push(Cube::new(lits.to_vec()).expect("path literals are distinct"));
        });
        TermList::new(terms).normalized()
    }

    /// The conjunction of the negations of false-leaf paths.
    pub fn to_cnf(&self) -> ClauseList {
        let mut clauses = Vec::new();
        self.collect_paths(&mut Vec::new(), false, &mut |lits| {
            let negated: Vec<Literal> = lits.iter().map(|l| l.negated()).collect();
            clauses.push(Clause::new(negated).expect("path literals are distinct"));
        });
        let mut out = ClauseList::new(clauses);
        out.normalize();
        out
    }

    fn collect_paths(
        &self,
        path: &mut Vec<Literal>,
        polarity: bool,
        sink: &mut impl FnMut(&[Literal]),
    ) {
        match self {
            DecisionTree::Leaf(b) => {
                if *b == polarity {
                    sink(path);
                }
            }
            DecisionTree::Node { var, low, high } => {
                path.push(Literal::negative(*var));
                low.collect_paths(path, polarity, sink);
                path.pop();
                path.push(Literal::positive(*var));
                high.collect_paths(path, polarity, sink);
                path.pop();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn leaf(b: bool) -> Box<DecisionTree> {
        Box::new(DecisionTree::Leaf(b))
    }

    #[test]
    fn single_leaf_true() {
        let t = DecisionTree::Leaf(true);
        assert_eq!(t.to_dnf(), TermList::new(vec![Cube::top()]));
        assert_eq!(t.to_cnf(), ClauseList::top());
        assert_eq!(t.size(), 1);
    }

    #[test]
    fn one_variable_tree() {
        let t = DecisionTree::Node { var: Var::new(1), low: leaf(false), high: leaf(true) };
        assert_eq!(
            t.to_dnf(),
            TermList::new(vec![Cube::unit(Literal::positive(Var::new(1)))])
        );
        assert_eq!(
            t.to_cnf(),
            ClauseList::new(vec![Clause::new(vec![Literal::positive(Var::new(1))]).unwrap()])
        );
    }

    #[test]
    fn repeated_variable_is_rejected() {
        let inner =
            DecisionTree::Node { var: Var::new(0), low: leaf(false), high: leaf(true) };
        let t = DecisionTree::Node {
            var: Var::new(0),
            low: Box::new(inner),
            high: leaf(true),
        };
        assert_eq!(
            t.validate(),
            Err(TreeError::RepeatedVariable { var: Var::new(0) })
        );
    }

    fn random_tree(rng: &mut StdRng, avail: &[Var], leaves_left: &mut usize) -> DecisionTree {
        if avail.is_empty() || *leaves_left <= 1 || rng.gen_bool(0.3) {
            return DecisionTree::Leaf(rng.gen_bool(0.5));
        }
        let var = avail[rng.gen_range(0..avail.len())];
        let rest: Vec<Var> = avail.iter().copied().filter(|v| *v != var).collect();
        *leaves_left -= 1;
        DecisionTree::Node {
            var,
            low: Box::new(random_tree(rng, &rest, leaves_left)),
            high: Box::new(random_tree(rng, &rest, leaves_left)),
        }
    }

    #[test]
    fn dnf_and_cnf_agree_with_eval_exhaustively() {
        let vocab = Vocab::single(4);
        let vars: Vec<Var> = (0..4).map(Var::new).collect();
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..50 {
            let mut budget = 8;
            let t = random_tree(&mut rng, &vars, &mut budget);
            t.validate().unwrap();
            let dnf = t.to_dnf();
            let cnf = t.to_cnf();
            assert_eq!(dnf.len() + cnf.len(), t.size());
            for idx in 0..16u64 {
                let s = State::from_index(idx, 4);
                let expect = t.eval(&s, &vocab);
                assert_eq!(s.satisfies_dnf(&dnf, &vocab), expect, "dnf mismatch on {s}");
                let cnf_val = cnf.clauses.iter().all(|c| s.satisfies_clause(c, &vocab));
                assert_eq!(cnf_val, expect, "cnf mismatch on {s}");
            }
        }
    }

    #[test]
    fn large_tree_spot_check_on_random_states() {
        let vocab = Vocab::single(12);
        let vars: Vec<Var> = (0..12).map(Var::new).collect();
        let mut rng = StdRng::seed_from_u64(11);
        let mut budget = 40;
        let t = random_tree(&mut rng, &vars, &mut budget);
        t.validate().unwrap();
        let dnf = t.to_dnf();
        let cnf = t.to_cnf();
        for _ in 0..1000 {
            let s = State::from_index(rng.gen_range(0..1 << 12), 12);
            let expect = t.eval(&s, &vocab);
            assert_eq!(s.satisfies_dnf(&dnf, &vocab), expect);
            assert_eq!(cnf.clauses.iter().all(|c| s.satisfies_clause(c, &vocab)), expect);
        }
    }
}
