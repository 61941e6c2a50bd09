//! DIMACS CNF serialization and the external-solver process hook.
//!
//! The hook spawns a process, feeds it DIMACS CNF on stdin and reads
//! `SAT`/`UNSAT` plus `v`-lines on stdout.

use std::io::Write;
use std::process::{Command, Stdio};

use thiserror::Error;

use crate::sat::solver::{Cnf, SatBackend};

#[derive(Debug, Error)]
pub enum DimacsError {
    #[error("failed to run external solver `{cmd}`: {source}")]
    Spawn { cmd: String, source: std::io::Error },
    #[error("external solver produced unreadable output: {0}")]
    BadOutput(String),
}

/// Renders a CNF in DIMACS format.
pub fn write_dimacs(cnf: &Cnf) -> String {
    let mut out = format!("p cnf {} {}\n", cnf.num_vars, cnf.clauses.len());
    for clause in &cnf.clauses {
        for lit in clause {
            let code = lit.var() as i64 + 1;
            let signed = if lit.positive() { code } else { -code };
            out.push_str(&signed.to_string());
            out.push(' ');
        }
        out.push_str("0\n");
    }
    out
}

/// Parses `SAT`/`UNSAT` plus `v`-lines into a model over `num_vars`
/// variables. Variables missing from the `v`-lines default to false.
pub fn parse_solver_output(text: &str, num_vars: usize) -> Result<Option<Vec<bool>>, DimacsError> {
    let mut verdict: Option<bool> = None;
    let mut model = vec![false; num_vars];
    for line in text.lines() {
        let line = line.trim();
        match line {
            "SAT" | "s SATISFIABLE" => verdict = Some(true),
            "UNSAT" | "s UNSATISFIABLE" => verdict = Some(false),
            _ => {
                if let Some(rest) = line.strip_prefix("v ") {
                    for tok in rest.split_whitespace() {
                        let val: i64 = tok
                            .parse()
                            .map_err(|_| DimacsError::BadOutput(format!("bad v-line token `{tok}`")))?;
                        if val == 0 {
                            continue;
                        }
                        let var = val.unsigned_abs() as usize - 1;
                        if var < num_vars {
                            model[var] = val > 0;
                        }
                    }
                }
            }
        }
    }
    match verdict {
        Some(true) => Ok(Some(model)),
        Some(false) => Ok(None),
        None => Err(DimacsError::BadOutput("no SAT/UNSAT verdict".to_string())),
    }
}

/// Runs an external DIMACS solver process per query.
#[derive(Clone, Debug)]
pub struct ExternalSolver {
    pub command: String,
    pub args: Vec<String>,
}

impl ExternalSolver {
    fn run(&self, cnf: &Cnf) -> Result<Option<Vec<bool>>, DimacsError> {
        let mut child = Command::new(&self.command)
            .args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| DimacsError::Spawn { cmd: self.command.clone(), source: e })?;
        child
            .stdin
            .take()
            .expect("stdin is piped")
            .write_all(write_dimacs(cnf).as_bytes())
            .map_err(|e| DimacsError::Spawn { cmd: self.command.clone(), source: e })?;
        let out = child
            .wait_with_output()
            .map_err(|e| DimacsError::Spawn { cmd: self.command.clone(), source: e })?;
        parse_solver_output(&String::from_utf8_lossy(&out.stdout), cnf.num_vars)
    }
}

impl SatBackend for ExternalSolver {
    fn solve_cnf(&mut self, cnf: &Cnf) -> Option<Vec<bool>> {
        match self.run(cnf) {
            Ok(res) => res,
            Err(e) => panic!("external solver failed: {e}"),
        }
    }
}
