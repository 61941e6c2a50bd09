//! Command implementations behind the `monotone-infer` binary.
//!
//! Exit codes: 0 success (invariant found / run completed), 1 unsafe or a
//! failed verification, 2 inconclusive (restart budget exhausted, or a
//! bench suite with failures), 3 unusable input, 4 generator certification
//! failure.

use std::time::Instant;

use thiserror::Error;

use crate::absint::{ai_direct, ai_efficient, lambda_bound, AiRun, MonotoneBasis};
use crate::bench;
use crate::formula::Formula;
use crate::gen::{self, Family};
use crate::infer::{cdnf_itp, dual_itp, verify_invariant, InferError, InferResult};
use crate::learn::{cdnf_learn, TabularTeacher};
use crate::oracle::{Caps, ExplicitSet};
use crate::parse::{self, ParseError};
use crate::report::RunReport;
use crate::sat::{QueryKind, SatContext};
use crate::system::TransitionSystem;
use crate::types::{State, Vocab};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Generator(#[from] gen::GenError),
    #[error("engine aborted: {0}")]
    Engine(String),
}

impl CliError {
    /// The process exit code this error maps to.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Input(_) => 3,
            CliError::Generator(gen::GenError::Certification { .. }) => 4,
            CliError::Generator(_) => 3,
            CliError::Engine(_) => 2,
        }
    }
}

/// A finished command: the report, the exit code, and an optional artifact
/// (generated file, bench table) to print before the report.
pub struct CmdOutput {
    pub report: RunReport,
    pub exit: i32,
    pub artifact: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum InferAlgo {
    CdnfItp,
    DualItp,
}

impl InferAlgo {
    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "cdnf-itp" => Some(InferAlgo::CdnfItp),
            "dual-itp" => Some(InferAlgo::DualItp),
            _ => None,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            InferAlgo::CdnfItp => "cdnf-itp",
            InferAlgo::DualItp => "dual-itp",
        }
    }
}

fn engine_err(e: InferError) -> CliError {
    CliError::Engine(e.to_string())
}

/// Runs an inference engine, doubling `s` on restart-needed up to the
/// restart cap.
pub fn cmd_infer(
    system_text: &str,
    algo: InferAlgo,
    mut s: u32,
    max_restarts: u32,
    seed: u64,
) -> Result<CmdOutput, CliError> {
    let started = Instant::now();
    let ts = parse::parse_system(system_text)?;
    let ctx = SatContext::new(seed);
    let mut restarts = 0;
    let mut iterations = 0;
    loop {
        let outcome = match algo {
            InferAlgo::CdnfItp => cdnf_itp(&ctx, &ts, s),
            InferAlgo::DualItp => dual_itp(&ctx, &ts, s),
        }
        .map_err(engine_err)?;
        iterations += outcome.stats.iterations;
        let finishing = |outcome_name: &str, invariant: Option<String>, exit: i32| {
            let counts = ctx.counts();
            let mut report = RunReport::new(algo.name(), outcome_name);
            report.invariant = invariant;
            report.queries_plain = Some(counts.plain);
            report.queries_bmc = Some(counts.bmc);
            report.queries_inductiveness = Some(counts.inductiveness);
            report.iterations = Some(iterations);
            report.restarts = Some(restarts);
            report.final_s = Some(s);
            report.wall_time_ms = started.elapsed().as_millis() as u64;
            CmdOutput { report, exit, artifact: None }
        };
        match outcome.result {
            InferResult::Invariant(f) => {
                return Ok(finishing("invariant", Some(f.to_string()), 0));
            }
            InferResult::Unsafe => return Ok(finishing("unsafe", None, 1)),
            InferResult::RestartNeeded { .. } => {
                if restarts >= max_restarts {
                    return Ok(finishing("inconclusive", None, 2));
                }
                restarts += 1;
                s = (2 * s).max(1);
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum AiMode {
    Efficient,
    Direct,
}

impl AiMode {
    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "efficient" => Some(AiMode::Efficient),
            "direct" => Some(AiMode::Direct),
            _ => None,
        }
    }
}

fn basis_from_inputs(
    system_text: &str,
    basis_text: Option<&str>,
) -> Result<MonotoneBasis, CliError> {
    let cubes = match basis_text {
        Some(text) => parse::parse_basis(text)?,
        None => {
            let meta = parse::read_metadata_comments(system_text);
            let line = meta
                .into_iter()
                .find(|(k, _)| k == "basis")
                .map(|(_, v)| v)
                .ok_or_else(|| {
                    CliError::Input(
                        "no basis: pass --basis or use a system file with basis metadata"
                            .to_string(),
                    )
                })?;
            let mut cubes = Vec::new();
            for part in line.split(';') {
                let f = parse::parse_formula(part.trim())?;
                cubes.push(parse::formula_to_cube(&f)?);
            }
            cubes
        }
    };
    MonotoneBasis::new(cubes).map_err(|e| CliError::Input(e.to_string()))
}

/// Abstract interpretation in the monotone-span domain, with the Λ bound,
/// per-iterate sizes, and a safety verdict in the report.
pub fn cmd_ai(
    system_text: &str,
    basis_text: Option<&str>,
    mode: AiMode,
    seed: u64,
) -> Result<CmdOutput, CliError> {
    let started = Instant::now();
    let ts = parse::parse_system(system_text)?;
    let basis = basis_from_inputs(system_text, basis_text)?;
    let ctx = SatContext::new(seed);
    let run = match mode {
        AiMode::Efficient => ai_efficient(&ctx, &ts, &basis),
        AiMode::Direct => ai_direct(&ctx, &ts, &basis),
    };
    let fix = run.fixpoint().to_formula();
    // safety verdict: fixpoint ∧ Bad unsatisfiable?
    let safe = !ctx.is_sat(
        &Formula::and(vec![fix.clone(), ts.bad.clone()]),
        &ts.vocab(),
        QueryKind::Plain,
    );
    let lambda = lambda_bound(&SatContext::new(seed), &ts, &basis)
        .map_err(|e| CliError::Input(e.to_string()))?;
    // at desk scale, also cross-check the two implementations
    let modes_equivalent = if ts.n() <= 8 {
        let other = match mode {
            AiMode::Efficient => ai_direct(&SatContext::new(seed), &ts, &basis),
            AiMode::Direct => ai_efficient(&SatContext::new(seed), &ts, &basis),
        };
        Some(traces_equivalent(&SatContext::new(seed), &ts, &run, &other))
    } else {
        None
    };
    let mut report = RunReport::new(
        match mode {
            AiMode::Efficient => "ai-efficient",
            AiMode::Direct => "ai-direct",
        },
        "fixpoint",
    );
    report.invariant = Some(fix.to_string());
    report.queries_plain = Some(run.queries.plain);
    report.queries_bmc = Some(run.queries.bmc);
    report.queries_inductiveness = Some(run.queries.inductiveness);
    report.iterations = Some(run.iterations);
    report.lambda = Some(lambda.value.to_string());
    report.lambda_factors =
        Some(lambda.factors.iter().map(|f| (f.tr_terms, f.init_terms)).collect());
    report.iterate_terms =
        Some(run.trace.iter().map(|it| it.stored_terms().min(u64::MAX as u128) as u64).collect());
    report.safe = Some(safe);
    report.modes_equivalent = modes_equivalent;
    report.wall_time_ms = started.elapsed().as_millis() as u64;
    Ok(CmdOutput { report, exit: 0, artifact: None })
}

/// Pairwise semantic equivalence of two iterate traces, by SAT.
fn traces_equivalent(
    ctx: &SatContext,
    ts: &TransitionSystem,
    a: &AiRun,
    b: &AiRun,
) -> bool {
    if a.trace.len() != b.trace.len() {
        return false;
    }
    let vocab = ts.vocab();
    a.trace.iter().zip(&b.trace).all(|(x, y)| {
        let (fx, fy) = (x.to_formula(), y.to_formula());
        let ltr = Formula::and(vec![fx.clone(), fy.clone().negated()]);
        let rtl = Formula::and(vec![fy, fx.negated()]);
        !ctx.is_sat(&ltr, &vocab, QueryKind::Plain) && !ctx.is_sat(&rtl, &vocab, QueryKind::Plain)
    })
}

/// Runs the exact learner against the exhaustive teacher for the target
/// formula.
pub fn cmd_learn(target_text: &str, n: u32, seed: u64) -> Result<CmdOutput, CliError> {
    let started = Instant::now();
    let _ = seed;
    const LEARN_CAP: u32 = 12;
    if n == 0 || n > LEARN_CAP {
        return Err(CliError::Input(format!(
            "the exhaustive teacher handles 1 <= n <= {LEARN_CAP}, got {n}"
        )));
    }
    let target = parse::parse_formula(target_text)?;
    let vocab = Vocab::single(n);
    for v in target.vars() {
        if !vocab.contains(v) {
            return Err(CliError::Input(format!(
                "target references {v}, outside the declared {n} variables"
            )));
        }
    }
    let caps = Caps::default();
    let set = ExplicitSet::from_formula(&target, &vocab, &caps)
        .map_err(|e| CliError::Input(e.to_string()))?;
    let mut eq = TabularTeacher::new(set.clone(), vocab);
    let mut mq = TabularTeacher::new(set.clone(), vocab);
    let out = cdnf_learn(&mut eq, &mut mq, n).map_err(|e| CliError::Engine(e.to_string()))?;
    // final verdict: exhaustive re-check of the learned formula
    let equivalent = (0..set.space()).all(|i| {
        let s = State::from_index(i, vocab.len());
        out.formula.eval(&s, &vocab).expect("learned formula scope") == set.contains(i)
    });
    let mut report = RunReport::new("cdnf-learn", if equivalent { "learned" } else { "mismatch" });
    report.invariant = Some(out.formula.to_string());
    report.eq_queries = Some(out.stats.eq_queries);
    report.mq_queries = Some(out.stats.mq_queries);
    report.basis_size = Some(out.stats.basis_size);
    report.equivalent = Some(equivalent);
    report.wall_time_ms = started.elapsed().as_millis() as u64;
    Ok(CmdOutput { report, exit: 0, artifact: None })
}

/// Emits a certified benchmark system with metadata comments.
pub fn cmd_gen(family: &str, n: u32, seed: u64) -> Result<CmdOutput, CliError> {
    let started = Instant::now();
    let family = Family::parse(family)
        .ok_or_else(|| CliError::Input(format!("unknown family `{family}`")))?;
    let caps = Caps::default();
    let generated = gen::generate(family, n, seed, &caps)?;
    let text = generated.to_file_string();
    let mut report = RunReport::new("gen", "ok");
    report.metadata = Some(
        parse::read_metadata_comments(&text)
            .into_iter()
            .collect(),
    );
    report.wall_time_ms = started.elapsed().as_millis() as u64;
    Ok(CmdOutput { report, exit: 0, artifact: Some(text) })
}

/// Checks the three inductive-invariant conditions by SAT; prints which
/// failed with a counterexample.
pub fn cmd_verify(
    system_text: &str,
    invariant_text: &str,
    seed: u64,
) -> Result<CmdOutput, CliError> {
    let started = Instant::now();
    let ts = parse::parse_system(system_text)?;
    let inv = parse::parse_formula(invariant_text)?;
    for v in inv.vars() {
        if v.copy != 0 || v.index >= ts.n() {
            return Err(CliError::Input(format!(
                "invariant references {v}, outside the system's unprimed vocabulary"
            )));
        }
    }
    let ctx = SatContext::new(seed);
    let (outcome, exit, detail) = match verify_invariant(&ctx, &ts, &inv) {
        Ok(()) => ("verified".to_string(), 0, None),
        Err(InferError::Soundness { condition, witness }) => {
            ("violated".to_string(), 1, Some(format!("condition {condition} fails at {witness}")))
        }
        Err(other) => return Err(CliError::Engine(other.to_string())),
    };
    let mut report = RunReport::new("verify", &outcome);
    if let Some(d) = detail {
        report.metadata = Some([("violation".to_string(), d)].into_iter().collect());
    }
    report.wall_time_ms = started.elapsed().as_millis() as u64;
    Ok(CmdOutput { report, exit, artifact: None })
}

/// Runs a bound-assertion suite and prints one pass/fail line per criterion.
pub fn cmd_bench(suite: &str, seed: u64) -> Result<CmdOutput, CliError> {
    let started = Instant::now();
    let results = bench::run_suite(suite, seed)
        .ok_or_else(|| CliError::Input(format!("unknown suite `{suite}`")))?;
    let mut table = String::new();
    for r in &results {
        table.push_str(&format!(
            "c{:02} {:<32} {} ({})\n",
            r.id,
            r.name,
            if r.pass { "PASS" } else { "FAIL" },
            r.details
        ));
    }
    let all_pass = results.iter().all(|r| r.pass);
    let mut report = RunReport::new("bench", if all_pass { "pass" } else { "fail" });
    report.metadata = Some(
        results
            .iter()
            .map(|r| (format!("c{:02}", r.id), if r.pass { "pass" } else { "fail" }.to_string()))
            .collect(),
    );
    report.wall_time_ms = started.elapsed().as_millis() as u64;
    Ok(CmdOutput {
        report,
        exit: if all_pass { 0 } else { 2 },
        artifact: Some(table),
    })
}
