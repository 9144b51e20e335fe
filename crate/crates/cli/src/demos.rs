//! Demonstrations: the composition counterexamples whose Lipschitz
//! quotients blow up like x^(-1/2), and the sequence-scale growth table.

use lipscale::exec::ExecMode;
use lipscale::nosmoothing::{
    diagonal_lower_bound_check, no_smoothing_growth_report, sign_correlation_sum, GrowthRow,
    SmoothingFamily,
};
use lipscale::scales::lp_truncation_matrix;
use serde::Serialize;

fn clamp01(t: f64) -> f64 {
    t.clamp(0.0, 1.0)
}

/// h(x, theta) = f(x, g(x, theta)) with f = sqrt on [0, 1] clamped and
/// g(x, .) = x clamped: the composition is sqrt(x), uniformly in theta.
pub fn composition_h(x: f64, _theta: f64) -> f64 {
    clamp01(x).sqrt()
}

/// Lipschitz quotient sup over theta of |h(x, theta) - h(0, theta)| / x.
pub fn sup_quotient(x: f64) -> f64 {
    let thetas: Vec<f64> = (0..=20).map(|i| -1.0 + 2.0 * i as f64 / 20.0).collect();
    thetas
        .iter()
        .map(|&t| (composition_h(x, t) - composition_h(0.0, t)).abs() / x)
        .fold(0.0, f64::max)
}

/// theta-derivative of the second composition at theta = 0: inside the
/// flat strip |x + theta| <= 1 the cutoff is identically one and the
/// derivative is (3/2) |x + theta|^(1/2) sign(x + theta).
pub fn theta_derivative_at_zero(x: f64) -> f64 {
    assert!(x.abs() <= 1.0, "outside the flat strip");
    1.5 * x.abs().sqrt() * x.signum()
}

/// Quotient of the theta-derivatives |d_theta h(x, 0) - d_theta h(0, 0)| / x.
pub fn derivative_quotient(x: f64) -> f64 {
    (theta_derivative_at_zero(x) - theta_derivative_at_zero(0.0)).abs() / x
}

#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleRow {
    pub example: &'static str,
    pub x: f64,
    pub quotient: f64,
    /// x^(-1/2): the growth rate both quotients follow.
    pub reference: f64,
}

/// Quotient tables of the two composition counterexamples.
pub fn counterexample_table() -> Vec<CounterexampleRow> {
    let xs = [1e-1, 1e-2, 1e-4];
    let mut rows = Vec::new();
    for &x in &xs {
        rows.push(CounterexampleRow {
            example: "sup_quotient",
            x,
            quotient: sup_quotient(x),
            reference: x.powf(-0.5),
        });
    }
    for &x in &xs {
        rows.push(CounterexampleRow {
            example: "derivative_quotient",
            x,
            quotient: derivative_quotient(x),
            reference: 1.5 * x.powf(-0.5),
        });
    }
    rows
}

#[derive(Clone, Debug, Serialize)]
pub struct LpDemoReport {
    /// Exhaustive sign-orthogonality sweep outcome.
    pub sign_sweep_ok: bool,
    pub sign_sweep_max_n: usize,
    /// First basis vector dropped by truncation at theta: the residual has
    /// norm one in every l^p, so no decaying bound accommodates it.
    pub truncation_witness: Option<TruncationWitness>,
    /// Diagonal lower-bound demonstration on the truncation matrix.
    pub truncation_rows: Vec<GrowthRow>,
    /// Growth of the contradiction ratio for a family obeying both bounds.
    pub hypothetical_rows: Vec<GrowthRow>,
    /// Consecutive-N ratio exponents, which approach b - a.
    pub growth_exponents: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TruncationWitness {
    pub theta: f64,
    pub k: usize,
    /// || e_k - S_theta e_k ||_p (any p).
    pub residual_norm: f64,
}

/// Full sequence-scale demonstration: orthogonality sums, the diagonal
/// bound on truncation matrices, the failed complementary inequality, and
/// the ratio growth that rules out any compliant family.
pub fn lp_demo(a: f64, b: f64, theta_star: f64, mode: ExecMode) -> anyhow::Result<LpDemoReport> {
    let max_n = 12;
    let mut sign_ok = true;
    for n in 1..=max_n {
        for k in 1..=n {
            for m in 1..=n {
                let expect = if k == m { 1i64 << n } else { 0 };
                sign_ok &= sign_correlation_sum(n, k, m, mode)? == expect;
            }
        }
    }

    // truncation matrix: hypothesis verified exhaustively, diagonal bound
    // reported; the dropped basis vector witnesses the failed premise
    let n_small = 8usize;
    let c = lp_truncation_matrix(theta_star, n_small)?;
    let q = 1.0 / b;
    let kept = (theta_star.floor() as usize).min(n_small);
    let bound = (kept as f64).powf(1.0 / q);
    let check = diagonal_lower_bound_check(&c, q.max(1.0), bound, mode)?;
    anyhow::ensure!(check.hypothesis_holds, "truncation hypothesis must hold");
    anyhow::ensure!(check.bound_holds, "diagonal bound must hold");

    let truncation_witness = if kept < n_small {
        Some(TruncationWitness {
            theta: theta_star,
            k: kept + 1,
            residual_norm: 1.0,
        })
    } else {
        None
    };

    let n_list: Vec<usize> = (4..=12).map(|e| 1usize << e).collect();
    let truncation_rows =
        no_smoothing_growth_report(a, b, SmoothingFamily::Truncation, &n_list, theta_star)?;
    let hypothetical_rows = no_smoothing_growth_report(
        a,
        b,
        SmoothingFamily::HalfDiagonal { a_const: 1.0 },
        &n_list,
        theta_star,
    )?;
    let growth_exponents = hypothetical_rows
        .windows(2)
        .map(|w| (w[1].ratio / w[0].ratio).log2() / ((w[1].n as f64) / (w[0].n as f64)).log2())
        .collect();

    Ok(LpDemoReport {
        sign_sweep_ok: sign_ok,
        sign_sweep_max_n: max_n,
        truncation_witness,
        truncation_rows,
        hypothetical_rows,
        growth_exponents,
    })
}
