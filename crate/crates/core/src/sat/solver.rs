//! Built-in CDCL solver: two-literal watching, 1-UIP clause learning,
//! fixed variable order with phase saving. Deterministic for a given seed.

/// A literal over the solver's variable pool: `var << 1 | negated`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: usize, positive: bool) -> Lit {
        Lit((var as u32) << 1 | u32::from(!positive))
    }

    pub fn var(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn positive(self) -> bool {
        self.0 & 1 == 0
    }

    pub fn negated(self) -> Lit {
        Lit(self.0 ^ 1)
    }

    fn code(self) -> usize {
        self.0 as usize
    }
}

/// CNF over an indexed variable pool.
#[derive(Clone, Debug, Default)]
pub struct Cnf {
    pub num_vars: usize,
    pub clauses: Vec<Vec<Lit>>,
}

impl Cnf {
    pub fn new(num_vars: usize) -> Self {
        Cnf { num_vars, clauses: Vec::new() }
    }

    pub fn add_clause(&mut self, lits: Vec<Lit>) {
        self.clauses.push(lits);
    }
}

pub struct Solver {
    clauses: Vec<Vec<Lit>>,
    // watches[lit.code()] lists clauses currently watching `lit`; a clause
    // watches its first two literals.
    watches: Vec<Vec<usize>>,
    assign: Vec<Option<bool>>,
    level: Vec<u32>,
    reason: Vec<Option<usize>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    phase: Vec<bool>,
    seen: Vec<bool>,
    ok: bool,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

impl Solver {
    pub fn new(cnf: &Cnf, seed: u64) -> Solver {
        let n = cnf.num_vars;
        let mut s = Solver {
            clauses: Vec::with_capacity(cnf.clauses.len()),
            watches: vec![Vec::new(); 2 * n],
            assign: vec![None; n],
            level: vec![0; n],
            reason: vec![None; n],
            trail: Vec::with_capacity(n),
            trail_lim: Vec::new(),
            qhead: 0,
            phase: (0..n).map(|v| splitmix64(seed ^ (v as u64 + 1)) & 1 == 1).collect(),
            seen: vec![false; n],
            ok: true,
        };
        for clause in &cnf.clauses {
            s.add_input_clause(clause);
            if !s.ok {
                break;
            }
        }
        s
    }

    fn add_input_clause(&mut self, lits: &[Lit]) {
        let mut lits = lits.to_vec();
        lits.sort_by_key(|l| l.code());
        lits.dedup();
        // tautological clause
        if lits.windows(2).any(|w| w[0].var() == w[1].var()) {
            return;
        }
        match lits.len() {
            0 => self.ok = false,
            1 => {
                if !self.enqueue(lits[0], None) {
                    self.ok = false;
                }
            }
            _ => {
                let idx = self.clauses.len();
                self.watches[lits[0].code()].push(idx);
                self.watches[lits[1].code()].push(idx);
                self.clauses.push(lits);
            }
        }
    }

    fn value(&self, lit: Lit) -> Option<bool> {
        self.assign[lit.var()].map(|b| b == lit.positive())
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    /// Makes `lit` true. Returns false if it is already false.
    fn enqueue(&mut self, lit: Lit, reason: Option<usize>) -> bool {
        match self.value(lit) {
            Some(false) => false,
            Some(true) => true,
            None => {
                let v = lit.var();
                self.assign[v] = Some(lit.positive());
                self.phase[v] = lit.positive();
                self.level[v] = self.decision_level();
                self.reason[v] = reason;
                self.trail.push(lit);
                true
            }
        }
    }

    /// Unit propagation; returns a conflicting clause index if any.
    fn propagate(&mut self) -> Option<usize> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let falsified = p.negated();
            let mut watchers = std::mem::take(&mut self.watches[falsified.code()]);
            let mut i = 0;
            while i < watchers.len() {
                let ci = watchers[i];
                // make the falsified literal clause[1]
                if self.clauses[ci][0] == falsified {
                    self.clauses[ci].swap(0, 1);
                }
                let first = self.clauses[ci][0];
                if self.value(first) == Some(true) {
                    i += 1;
                    continue;
                }
                // look for a replacement watch
                let mut moved = false;
                for k in 2..self.clauses[ci].len() {
                    let cand = self.clauses[ci][k];
                    if self.value(cand) != Some(false) {
                        self.clauses[ci].swap(1, k);
                        self.watches[cand.code()].push(ci);
                        watchers.swap_remove(i);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                if !self.enqueue(first, Some(ci)) {
                    // conflict: restore remaining watchers
                    self.watches[falsified.code()].extend_from_slice(&watchers);
                    self.qhead = self.trail.len();
                    return Some(ci);
                }
                i += 1;
            }
            self.watches[falsified.code()] = watchers;
        }
        None
    }

    /// 1-UIP conflict analysis. Returns the learned clause (asserting literal
    /// first) and the backjump level.
    fn analyze(&mut self, conflict: usize) -> (Vec<Lit>, u32) {
        let mut learned: Vec<Lit> = Vec::new();
        let mut counter = 0usize;
        let mut p: Option<Lit> = None;
        let mut idx = self.trail.len();
        let mut clause_idx = conflict;
        loop {
            let start = usize::from(p.is_some());
            for k in start..self.clauses[clause_idx].len() {
                let q = self.clauses[clause_idx][k];
                let v = q.var();
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    if self.level[v] == self.decision_level() {
                        counter += 1;
                    } else {
                        learned.push(q);
                    }
                }
            }
            // next marked literal on the trail
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var()] {
                    break;
                }
            }
            let lit = self.trail[idx];
            self.seen[lit.var()] = false;
            counter -= 1;
            if counter == 0 {
                p = Some(lit);
                break;
            }
            clause_idx = self.reason[lit.var()].expect("implied literal has a reason");
            // the reason clause has `lit` first
            debug_assert_eq!(self.clauses[clause_idx][0].var(), lit.var());
            p = Some(lit);
        }
        let uip = p.expect("conflict at a decision level above zero").negated();
        let mut clause = vec![uip];
        clause.extend_from_slice(&learned);
        for l in &learned {
            self.seen[l.var()] = false;
        }
        // backjump to the second-highest level in the clause; put a literal
        // of that level in watch position 1
        let mut bj = 0;
        let mut pos = 1;
        for (k, l) in clause.iter().enumerate().skip(1) {
            if self.level[l.var()] > bj {
                bj = self.level[l.var()];
                pos = k;
            }
        }
        if clause.len() > 1 {
            clause.swap(1, pos);
        }
        (clause, bj)
    }

    fn backtrack(&mut self, target: u32) {
        while self.decision_level() > target {
            let lim = self.trail_lim.pop().unwrap();
            for lit in self.trail.drain(lim..) {
                self.assign[lit.var()] = None;
                self.reason[lit.var()] = None;
            }
        }
        self.qhead = self.trail.len();
    }

    fn learn(&mut self, clause: Vec<Lit>) {
        let asserting = clause[0];
        if clause.len() == 1 {
            let ok = self.enqueue(asserting, None);
            debug_assert!(ok);
        } else {
            let idx = self.clauses.len();
            self.watches[clause[0].code()].push(idx);
            self.watches[clause[1].code()].push(idx);
            self.clauses.push(clause);
            let ok = self.enqueue(asserting, Some(idx));
            debug_assert!(ok);
        }
    }

    /// Lowest-index unassigned variable.
    fn pick_branch(&self) -> Option<usize> {
        self.assign.iter().position(|a| a.is_none())
    }

    pub fn solve(&mut self) -> Option<Vec<bool>> {
        if !self.ok {
            return None;
        }
        loop {
            if let Some(conflict) = self.propagate() {
                if self.decision_level() == 0 {
                    self.ok = false;
                    return None;
                }
                let (clause, bj) = self.analyze(conflict);
                self.backtrack(bj);
                self.learn(clause);
            } else {
                match self.pick_branch() {
                    Some(v) => {
                        self.trail_lim.push(self.trail.len());
                        let ok = self.enqueue(Lit::new(v, self.phase[v]), None);
                        debug_assert!(ok);
                    }
                    None => {
                        return Some(
                            self.assign.iter().map(|a| a.expect("total model")).collect(),
                        );
                    }
                }
            }
        }
    }
}

/// A pluggable CNF solver.
pub trait SatBackend {
    /// `None` means unsatisfiable; otherwise a total model over the pool.
    fn solve_cnf(&mut self, cnf: &Cnf) -> Option<Vec<bool>>;
}

/// The built-in solver. Each query is standalone.
#[derive(Clone, Copy, Debug)]
pub struct BuiltinSolver {
    pub seed: u64,
}

impl SatBackend for BuiltinSolver {
    fn solve_cnf(&mut self, cnf: &Cnf) -> Option<Vec<bool>> {
        Solver::new(cnf, self.seed).solve()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn check_model(cnf: &Cnf, model: &[bool]) -> bool {
        cnf.clauses
            .iter()
            .all(|c| c.iter().any(|l| model[l.var()] == l.positive()))
    }

    fn truth_table_sat(cnf: &Cnf) -> bool {
        (0u64..1 << cnf.num_vars).any(|m| {
            let model: Vec<bool> = (0..cnf.num_vars).map(|v| m >> v & 1 == 1).collect();
            check_model(cnf, &model)
        })
    }

    #[test]
    fn trivial_cases() {
        let mut cnf = Cnf::new(1);
        cnf.add_clause(vec![Lit::new(0, true)]);
        cnf.add_clause(vec![Lit::new(0, false)]);
        assert!(Solver::new(&cnf, 0).solve().is_none());

        let mut cnf = Cnf::new(2);
        cnf.add_clause(vec![Lit::new(0, true), Lit::new(1, true)]);
        let model = Solver::new(&cnf, 0).solve().unwrap();
        assert!(check_model(&cnf, &model));

        let mut cnf = Cnf::new(0);
        cnf.add_clause(vec![]);
        assert!(Solver::new(&cnf, 0).solve().is_none());
    }

    #[test]
    fn pigeonhole_3_into_2_is_unsat() {
        // var p*2+h: pigeon p in hole h
        let mut cnf = Cnf::new(6);
        for p in 0..3 {
            cnf.add_clause(vec![Lit::new(p * 2, true), Lit::new(p * 2 + 1, true)]);
        }
        for h in 0..2 {
            for p1 in 0..3 {
                for p2 in p1 + 1..3 {
                    cnf.add_clause(vec![
                        Lit::new(p1 * 2 + h, false),
                        Lit::new(p2 * 2 + h, false),
                    ]);
                }
            }
        }
        assert!(Solver::new(&cnf, 0).solve().is_none());
    }

    #[test]
    fn deterministic_under_seed() {
        let mut cnf = Cnf::new(6);
        cnf.add_clause(vec![Lit::new(0, true), Lit::new(3, true), Lit::new(5, false)]);
        cnf.add_clause(vec![Lit::new(1, false), Lit::new(2, true)]);
        let a = Solver::new(&cnf, 42).solve().unwrap();
        let b = Solver::new(&cnf, 42).solve().unwrap();
        assert_eq!(a, b);
    }

    fn arb_cnf() -> impl Strategy<Value = Cnf> {
        (2usize..9, 1usize..18).prop_flat_map(|(nv, nc)| {
            proptest::collection::vec(
                proptest::collection::vec((0..nv, any::<bool>()), 1..4),
                nc,
            )
            .prop_map(move |clauses| {
                let mut cnf = Cnf::new(nv);
                for c in clauses {
                    cnf.add_clause(c.into_iter().map(|(v, p)| Lit::new(v, p)).collect());
                }
                cnf
            })
        })
    }

    proptest! {
        #[test]
        fn agrees_with_truth_table(cnf in arb_cnf()) {
            let result = Solver::new(&cnf, 1).solve();
            match result {
                Some(model) => prop_assert!(check_model(&cnf, &model)),
                None => prop_assert!(!truth_table_sat(&cnf)),
            }
        }
    }
}
