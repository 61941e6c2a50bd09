//! Definitional CNF encoding with auxiliary variables.

use std::collections::BTreeMap;

use crate::formula::Formula;
use crate::sat::solver::{Cnf, Lit};
use crate::types::Var;

/// The encoding result: an equisatisfiable CNF plus the map from original
/// variables to pool indices. A model restricted through `var_map` is a model
/// of the original formula.
#[derive(Clone, Debug)]
pub struct CnfEncoding {
    pub cnf: Cnf,
    pub var_map: BTreeMap<Var, usize>,
}

struct Encoder {
    cnf: Cnf,
    var_map: BTreeMap<Var, usize>,
    true_lit: Option<Lit>,
}

impl Encoder {
    fn fresh(&mut self) -> usize {
        let v = self.cnf.num_vars;
        self.cnf.num_vars += 1;
        v
    }

    fn var_lit(&mut self, var: Var) -> Lit {
        if let Some(&v) = self.var_map.get(&var) {
            return Lit::new(v, true);
        }
        let v = self.fresh();
        self.var_map.insert(var, v);
        Lit::new(v, true)
    }

    /// A literal constrained true, for encoding constants.
    fn constant(&mut self, value: bool) -> Lit {
        let t = match self.true_lit {
            Some(t) => t,
            None => {
                let t = Lit::new(self.fresh(), true);
                self.cnf.add_clause(vec![t]);
                self.true_lit = Some(t);
                t
            }
        };
        if value {
            t
        } else {
            t.negated()
        }
    }

    fn encode(&mut self, f: &Formula) -> Lit {
        match f {
            Formula::Const(b) => self.constant(*b),
            Formula::Atom(v) => self.var_lit(*v),
            Formula::Not(inner) => self.encode(inner).negated(),
            Formula::And(parts) => {
                if parts.is_empty() {
                    return self.constant(true);
                }
                let lits: Vec<Lit> = parts.iter().map(|p| self.encode(p)).collect();
                let g = Lit::new(self.fresh(), true);
                let mut long = vec![g];
                for &l in &lits {
                    self.cnf.add_clause(vec![g.negated(), l]);
                    long.push(l.negated());
                }
                self.cnf.add_clause(long);
                g
            }
            Formula::Or(parts) => {
                if parts.is_empty() {
                    return self.constant(false);
                }
                let lits: Vec<Lit> = parts.iter().map(|p| self.encode(p)).collect();
                let g = Lit::new(self.fresh(), true);
                let mut long = vec![g.negated()];
                for &l in &lits {
                    self.cnf.add_clause(vec![g, l.negated()]);
                    long.push(l);
                }
                self.cnf.add_clause(long);
                g
            }
            Formula::Xor(a, b) => {
                let (a, b) = (self.encode(a), self.encode(b));
                let g = Lit::new(self.fresh(), true);
                self.cnf.add_clause(vec![g.negated(), a, b]);
                self.cnf.add_clause(vec![g.negated(), a.negated(), b.negated()]);
                self.cnf.add_clause(vec![g, a.negated(), b]);
                self.cnf.add_clause(vec![g, a, b.negated()]);
                g
            }
            Formula::Iff(a, b) => {
                let (a, b) = (self.encode(a), self.encode(b));
                let g = Lit::new(self.fresh(), true);
                self.cnf.add_clause(vec![g.negated(), a.negated(), b]);
                self.cnf.add_clause(vec![g.negated(), a, b.negated()]);
                self.cnf.add_clause(vec![g, a, b]);
                self.cnf.add_clause(vec![g, a.negated(), b.negated()]);
                g
            }
        }
    }
}

/// Encodes `f` into an equisatisfiable CNF and asserts it.
pub fn encode_cnf(f: &Formula) -> CnfEncoding {
    // keep the degenerate constants small
    match f {
        Formula::Const(false) => {
            let mut cnf = Cnf::new(0);
            cnf.add_clause(vec![]);
            return CnfEncoding { cnf, var_map: BTreeMap::new() };
        }
        Formula::Const(true) => {
            return CnfEncoding { cnf: Cnf::new(0), var_map: BTreeMap::new() };
        }
        _ => {}
    }
    let mut enc = Encoder { cnf: Cnf::new(0), var_map: BTreeMap::new(), true_lit: None };
    let root = enc.encode(f);
    enc.cnf.add_clause(vec![root]);
    CnfEncoding { cnf: enc.cnf, var_map: enc.var_map }
}
