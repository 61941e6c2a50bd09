//! Run reports: line-oriented key/value text plus a versioned JSON document.
//!
//! Reports are stable under fixed seeds: every field except the wall time is
//! byte-identical across runs of the same binary on the same inputs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: u32,
    pub algorithm: String,
    pub outcome: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invariant: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub queries_plain: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub queries_bmc: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub queries_inductiveness: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restarts: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_s: Option<u32>,
    /// Λ as a decimal string (it is a product and may exceed 64 bits).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_factors: Option<Vec<(u64, u64)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterate_terms: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub safe: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modes_equivalent: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eq_queries: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mq_queries: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis_size: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equivalent: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metadata: Option<BTreeMap<String, String>>,
    pub wall_time_ms: u64,
}

impl RunReport {
    pub fn new(algorithm: &str, outcome: &str) -> Self {
        RunReport {
            schema: SCHEMA_VERSION,
            algorithm: algorithm.to_string(),
            outcome: outcome.to_string(),
            ..Default::default()
        }
    }

    pub fn with_stats(mut self, stats: &crate::infer::RunStats) -> Self {
        self.queries_plain = Some(stats.queries.plain);
        self.queries_bmc = Some(stats.queries.bmc);
        self.queries_inductiveness = Some(stats.queries.inductiveness);
        self.iterations = Some(stats.iterations);
        self
    }

    /// The key/value text form; the wall-time line comes last.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| out.push_str(&format!("{k}: {v}\n"));
        put("schema", self.schema.to_string());
        put("algorithm", self.algorithm.clone());
        put("outcome", self.outcome.clone());
        if let Some(v) = &self.invariant {
            put("invariant", v.clone());
        }
        if let Some(v) = self.queries_plain {
            put("queries-plain", v.to_string());
        }
        if let Some(v) = self.queries_bmc {
            put("queries-bmc", v.to_string());
        }
        if let Some(v) = self.queries_inductiveness {
            put("queries-inductiveness", v.to_string());
        }
        if let Some(v) = self.iterations {
            put("iterations", v.to_string());
        }
        if let Some(v) = self.restarts {
            put("restarts", v.to_string());
        }
        if let Some(v) = self.final_s {
            put("final-s", v.to_string());
        }
        if let Some(v) = &self.lambda {
            put("lambda", v.clone());
        }
        if let Some(v) = &self.lambda_factors {
            let rendered: Vec<String> =
                v.iter().map(|(tr, init)| format!("{tr}+{init}")).collect();
            put("lambda-factors", rendered.join(" "));
        }
        if let Some(v) = &self.iterate_terms {
            let rendered: Vec<String> = v.iter().map(u64::to_string).collect();
            put("iterate-terms", rendered.join(" "));
        }
        if let Some(v) = self.safe {
            put("safe", v.to_string());
        }
        if let Some(v) = self.modes_equivalent {
            put("modes-equivalent", v.to_string());
        }
        if let Some(v) = self.eq_queries {
            put("eq-queries", v.to_string());
        }
        if let Some(v) = self.mq_queries {
            put("mq-queries", v.to_string());
        }
        if let Some(v) = self.basis_size {
            put("basis-size", v.to_string());
        }
        if let Some(v) = self.equivalent {
            put("equivalent", v.to_string());
        }
        if let Some(meta) = &self.metadata {
            for (k, v) in meta {
                put(&format!("meta-{k}"), v.clone());
            }
        }
        put("wall-time-ms", self.wall_time_ms.to_string());
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Strips the volatile wall-time line, for stability comparisons.
pub fn stable_text(report_text: &str) -> String {
    report_text
        .lines()
        .filter(|l| !l.starts_with("wall-time-ms:"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_and_json_round_trip() {
        let mut r = RunReport::new("cdnf-itp", "invariant");
        r.invariant = Some("(and p0 (not p1))".to_string());
        r.queries_bmc = Some(17);
        r.iterations = Some(3);
        r.wall_time_ms = 5;
        let text = r.to_text();
        assert!(text.starts_with("schema: 1\nalgorithm: cdnf-itp\noutcome: invariant\n"));
        assert!(text.contains("queries-bmc: 17\n"));
        assert!(text.trim_end().ends_with("wall-time-ms: 5"));
        let parsed: RunReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(parsed.queries_bmc, Some(17));
        assert_eq!(parsed.schema, SCHEMA_VERSION);
        // absent options stay out of the text
        assert!(!text.contains("lambda"));
    }

    #[test]
    fn stable_text_drops_only_wall_time() {
        let mut r = RunReport::new("gen", "ok");
        r.wall_time_ms = 99;
        let a = stable_text(&r.to_text());
        r.wall_time_ms = 1234;
        let b = stable_text(&r.to_text());
        assert_eq!(a, b);
        assert!(a.contains("algorithm: gen"));
    }
}
