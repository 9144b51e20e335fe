//! Verification reports: one record per check, each carrying the anchor
//! tag of the inequality or identity it verifies, the worst observed value,
//! its tolerance and the verdict.

use serde::Serialize;
use std::fmt::Write as _;

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub name: String,
    /// Tag of the inequality or identity this check verifies.
    pub anchor: String,
    /// Worst ratio or residual observed.
    pub worst: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRecord {
    pub fn bounded(name: &str, anchor: &str, worst: f64, tolerance: f64) -> CheckRecord {
        CheckRecord {
            name: name.to_string(),
            anchor: anchor.to_string(),
            worst,
            tolerance,
            pass: worst <= tolerance,
        }
    }

    pub fn flag(name: &str, anchor: &str, pass: bool) -> CheckRecord {
        CheckRecord {
            name: name.to_string(),
            anchor: anchor.to_string(),
            worst: if pass { 0.0 } else { 1.0 },
            tolerance: 0.0,
            pass,
        }
    }
}

/// Empirical and declared smoothing constants for one index pair.
#[derive(Clone, Debug, Serialize)]
pub struct PairConstants {
    pub a: f64,
    pub b: f64,
    pub a_emp: f64,
    pub b_emp: f64,
    pub a_declared: Option<f64>,
    pub b_declared: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstantsSection {
    pub pairs: Vec<PairConstants>,
    /// max(1, A_aa, B_aa) over the sigma indices.
    pub k0: f64,
    /// max(1, A_ab, B_ab) over ordered sigma-index pairs.
    pub k: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtensionRatio {
    /// Sampled ||g|| / ||f||.
    pub value: f64,
    /// Budgeted ceiling 100 K0 K.
    pub bound: f64,
    /// Ratio after doubling budgets, divided by the base ratio.
    pub stability: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub problem: String,
    pub seed: u64,
    pub budget: usize,
    pub constants: Option<ConstantsSection>,
    pub extension_ratio: Option<ExtensionRatio>,
    pub checks: Vec<CheckRecord>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn new(problem: String, seed: u64, budget: usize) -> VerificationReport {
        VerificationReport {
            problem,
            seed,
            budget,
            constants: None,
            extension_ratio: None,
            checks: Vec::new(),
            pass: true,
        }
    }

    pub fn push(&mut self, record: CheckRecord) {
        self.pass &= record.pass;
        self.checks.push(record);
    }

    pub fn finish(&mut self) {
        if let Some(ratio) = &self.extension_ratio {
            self.pass &= ratio.pass;
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# Verification report");
        let _ = writeln!(out);
        let _ = writeln!(out, "problem: {}", self.problem);
        let _ = writeln!(out, "seed: {}, budget: {}", self.seed, self.budget);
        if let Some(c) = &self.constants {
            let _ = writeln!(out, "\nK0 = {:.6e}, K = {:.6e}", c.k0, c.k);
            let _ = writeln!(out, "\n| a | b | A_emp | B_emp | A_decl | B_decl |");
            let _ = writeln!(out, "|---|---|-------|-------|--------|--------|");
            for p in &c.pairs {
                let fmt_opt = |v: Option<f64>| match v {
                    Some(x) => format!("{x:.4e}"),
                    None => "-".to_string(),
                };
                let _ = writeln!(
                    out,
                    "| {} | {} | {:.4e} | {:.4e} | {} | {} |",
                    p.a,
                    p.b,
                    p.a_emp,
                    p.b_emp,
                    fmt_opt(p.a_declared),
                    fmt_opt(p.b_declared)
                );
            }
        }
        if let Some(r) = &self.extension_ratio {
            let _ = writeln!(
                out,
                "\nextension ratio: {:.6e} (bound {:.6e}, stability {:.3}) -> {}",
                r.value,
                r.bound,
                r.stability,
                if r.pass { "pass" } else { "FAIL" }
            );
        }
        let _ = writeln!(out, "\n| check | anchor | worst | tolerance | verdict |");
        let _ = writeln!(out, "|-------|--------|-------|-----------|---------|");
        for c in &self.checks {
            let _ = writeln!(
                out,
                "| {} | {} | {:.6e} | {:.6e} | {} |",
                c.name,
                c.anchor,
                c.worst,
                c.tolerance,
                if c.pass { "pass" } else { "FAIL" }
            );
        }
        let _ = writeln!(
            out,
            "\noverall: {}",
            if self.pass { "PASS" } else { "FAIL" }
        );
        out
    }
}
