//! Empirical verification of the scale axioms: the two smoothing
//! inequalities, logarithmic convexity of the norms, and the bound on
//! differences of smoothing operators.
//!
//! All campaigns draw seeded random sparse elements and sweep a fixed theta
//! grid, so reports are reproducible and cheap.

use crate::element::Element;
use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::scale::Scale;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Fixed theta grid used by every campaign.
pub const THETA_GRID: [f64; 7] = [1.0, 1.5, 2.0, 4.0, 8.0, 16.0, 64.0];

/// Ratio above which the complementary inequality is flagged as divergent.
pub const DIVERGENCE_BOUND: f64 = 1e6;

/// Empirical constants for one index pair a <= b.
#[derive(Clone, Debug, Serialize)]
pub struct PairEstimate {
    pub a: f64,
    pub b: f64,
    /// max over samples and theta of ||S u||_b / (theta^(b-a) ||u||_a)
    pub a_emp: f64,
    /// max over samples and theta of ||u - S u||_a theta^(b-a) / ||u||_b
    pub b_emp: f64,
    /// true when b_emp exceeded the divergence bound
    pub diverged: bool,
    pub samples_used: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstantsReport {
    pub pairs: Vec<PairEstimate>,
}

/// Estimates the smoothing constants on random sparse elements. Samples of
/// zero norm are skipped.
pub fn estimate_smoothing_constants(
    scale: &Scale,
    sample_count: usize,
    seed: u64,
    index_pairs: &[(f64, f64)],
    mode: ExecMode,
) -> Result<ConstantsReport> {
    if sample_count == 0 {
        return Err(Error::EmptySample);
    }
    for &(a, b) in index_pairs {
        scale.index_set().check(a)?;
        scale.index_set().check(b)?;
        if a > b {
            return Err(Error::InvalidParams(format!(
                "index pair requires a <= b, got ({a}, {b})"
            )));
        }
    }
    let samples = draw_samples(scale, sample_count, seed);
    let mut pairs = Vec::with_capacity(index_pairs.len());
    for &(a, b) in index_pairs {
        let per_sample = exec::map_collect(mode, &samples, |u| {
            let mut worst_a = 0.0f64;
            let mut worst_b = 0.0f64;
            let mut used = false;
            let norm_a = scale.norm(a, u).expect("indices validated");
            let norm_b = scale.norm(b, u).expect("indices validated");
            for theta in THETA_GRID {
                let su = scale.smooth(theta, u).expect("theta in grid is >= 1");
                let pow = theta.powf(b - a);
                if norm_a > 0.0 {
                    let lhs = scale.norm(b, &su).expect("indices validated");
                    worst_a = worst_a.max(lhs / (pow * norm_a));
                    used = true;
                }
                if norm_b > 0.0 {
                    let residual = u.sub(&su);
                    let lhs = scale.norm(a, &residual).expect("indices validated");
                    worst_b = worst_b.max(lhs * pow / norm_b);
                    used = true;
                }
            }
            (worst_a, worst_b, used)
        });
        let mut a_emp = 0.0f64;
        let mut b_emp = 0.0f64;
        let mut samples_used = 0;
        for (wa, wb, used) in per_sample {
            a_emp = a_emp.max(wa);
            b_emp = b_emp.max(wb);
            samples_used += used as usize;
        }
        if samples_used == 0 {
            return Err(Error::EmptySample);
        }
        pairs.push(PairEstimate {
            a,
            b,
            a_emp,
            b_emp,
            diverged: b_emp > DIVERGENCE_BOUND,
            samples_used,
        });
    }
    Ok(ConstantsReport { pairs })
}

/// Report of the convexity and smoothing-difference checks.
#[derive(Clone, Debug, Serialize)]
pub struct ConvexityReport {
    /// max over samples of lhs/rhs for the interpolation inequality (<= 1
    /// when it holds with the declared constant)
    pub worst_interpolation: f64,
    /// max over samples of lhs/rhs for the difference bound
    pub worst_difference: f64,
    pub violations: usize,
    pub checks: usize,
}

/// Checks the interpolation inequality with the scale's constant over index
/// triples a <= b <= c, and the smoothing-difference bound over theta pairs.
/// Scales without declared constants are calibrated empirically first (with
/// a small slack factor to absorb sampled norms).
pub fn verify_convexity_bounds(
    scale: &Scale,
    sample_count: usize,
    seed: u64,
    triples: &[(f64, f64, f64)],
    theta_pairs: &[(f64, f64)],
    mode: ExecMode,
) -> Result<ConvexityReport> {
    if sample_count == 0 {
        return Err(Error::EmptySample);
    }
    for &(a, b, c) in triples {
        scale.index_set().check(a)?;
        scale.index_set().check(b)?;
        scale.index_set().check(c)?;
        if !(a <= b && b <= c) {
            return Err(Error::InvalidParams(format!(
                "triple must be ordered, got ({a}, {b}, {c})"
            )));
        }
    }
    let samples = draw_samples(scale, sample_count, seed);

    // resolve the constants, calibrating where nothing is declared
    let mut interp_consts = Vec::with_capacity(triples.len());
    for &(a, b, c) in triples {
        let c_val = match scale.interpolation_constant(a, b, c) {
            Some(v) => v,
            None => {
                let (a_ab, b_bc) = calibrate(scale, seed, (a, b), (b, c), mode)?;
                let t = if c == b { 1.0 } else { (c - b) / (c - a) };
                2.0 * a_ab.powf(t) * b_bc.powf(1.0 - t) * CALIBRATION_SLACK
            }
        };
        interp_consts.push(c_val);
    }
    let mut diff_consts = Vec::with_capacity(triples.len());
    for &(a, b, _) in triples {
        let c_val = match scale.difference_constant(a, b) {
            Some(v) => v,
            None => {
                let (p, q) = (a.min(b), a.max(b));
                let (a_pq, b_pq) = calibrate_pair(scale, seed, (p, q), mode)?;
                let (a_pp, b_pp) = calibrate_pair(scale, seed, (p, p), mode)?;
                let (a_qq, b_qq) = calibrate_pair(scale, seed, (q, q), mode)?;
                (b_pq * a_pp.max(a_qq)).max(a_pq * b_pp.max(b_qq)) * CALIBRATION_SLACK
            }
        };
        diff_consts.push(c_val);
    }

    let outcomes = exec::map_collect(mode, &samples, |u| {
        let mut worst_interp = 0.0f64;
        let mut worst_diff = 0.0f64;
        let mut violations = 0usize;
        let mut checks = 0usize;
        for (t_idx, &(a, b, c)) in triples.iter().enumerate() {
            let na = scale.norm(a, u).expect("validated");
            let nb = scale.norm(b, u).expect("validated");
            let nc = scale.norm(c, u).expect("validated");
            if na > 0.0 && nc > 0.0 {
                let expo = if c == a { 0.5 } else { (c - b) / (c - a) };
                let rhs = interp_consts[t_idx] * na.powf(expo) * nc.powf(1.0 - expo);
                let ratio = nb / rhs;
                worst_interp = worst_interp.max(ratio);
                checks += 1;
                if ratio > 1.0 + 1e-12 {
                    violations += 1;
                }
            }
            if na > 0.0 {
                for &(t1, t2) in theta_pairs {
                    let s1 = scale.smooth(t1, u).expect("theta >= 1");
                    let s2 = scale.smooth(t2, u).expect("theta >= 1");
                    let lhs = scale.norm(b, &s1.sub(&s2)).expect("validated");
                    let cap = diff_consts[t_idx] * t1.powf(b - a).max(t2.powf(b - a)) * na;
                    checks += 1;
                    if t1 == t2 {
                        if lhs != 0.0 {
                            violations += 1;
                        }
                        continue;
                    }
                    if cap > 0.0 {
                        let ratio = lhs / cap;
                        worst_diff = worst_diff.max(ratio);
                        if ratio > 1.0 + 1e-12 {
                            violations += 1;
                        }
                    }
                }
            }
        }
        (worst_interp, worst_diff, violations, checks)
    });

    let mut report = ConvexityReport {
        worst_interpolation: 0.0,
        worst_difference: 0.0,
        violations: 0,
        checks: 0,
    };
    for (wi, wd, v, c) in outcomes {
        report.worst_interpolation = report.worst_interpolation.max(wi);
        report.worst_difference = report.worst_difference.max(wd);
        report.violations += v;
        report.checks += c;
    }
    Ok(report)
}

const CALIBRATION_SLACK: f64 = 1.05;

fn calibrate_pair(
    scale: &Scale,
    seed: u64,
    pair: (f64, f64),
    mode: ExecMode,
) -> Result<(f64, f64)> {
    let report = estimate_smoothing_constants(scale, 64, seed ^ 0x5ca1e, &[pair], mode)?;
    let est = &report.pairs[0];
    Ok((est.a_emp.max(1e-9), est.b_emp.max(1e-9)))
}

fn calibrate(
    scale: &Scale,
    seed: u64,
    ab: (f64, f64),
    bc: (f64, f64),
    mode: ExecMode,
) -> Result<(f64, f64)> {
    let (a_ab, _) = calibrate_pair(scale, seed, ab, mode)?;
    let (_, b_bc) = calibrate_pair(scale, seed, bc, mode)?;
    Ok((a_ab, b_bc))
}

/// Worst violation of norm monotonicity ||u||_a <= slack * ||u||_b over
/// random samples; returns the max of ||u||_a / ||u||_b.
pub fn check_monotonicity(
    scale: &Scale,
    sample_count: usize,
    seed: u64,
    index_pairs: &[(f64, f64)],
    mode: ExecMode,
) -> Result<f64> {
    if sample_count == 0 {
        return Err(Error::EmptySample);
    }
    for &(a, b) in index_pairs {
        scale.index_set().check(a)?;
        scale.index_set().check(b)?;
    }
    let samples = draw_samples(scale, sample_count, seed);
    let ratios = exec::map_collect(mode, &samples, |u| {
        let mut worst = 0.0f64;
        for &(a, b) in index_pairs {
            let na = scale.norm(a, u).expect("validated");
            let nb = scale.norm(b, u).expect("validated");
            if nb > 0.0 {
                worst = worst.max(na / nb);
            }
        }
        worst
    });
    Ok(ratios.into_iter().fold(0.0, f64::max))
}

fn draw_samples(scale: &Scale, count: usize, seed: u64) -> Vec<Element> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| scale.random_element(&mut rng)).collect()
}
