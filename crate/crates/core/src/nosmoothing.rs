//! The sequence-space impossibility toolkit: sign-vector orthogonality, the
//! diagonal lower-bound argument, and the growth table showing that no
//! operator family on the l^p scale can satisfy both smoothing inequalities.

use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use num_complex::Complex64;
use serde::Serialize;

/// Hard cap on exhaustive sign-vector sweeps (2^N vectors).
pub const SIGN_SWEEP_CAP: usize = 20;

/// Dense complex N x N matrix, row-major. Row k of column n holds the k-th
/// component of the image of the n-th basis vector.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zero(n: usize) -> Result<CMatrix> {
        if n == 0 {
            return Err(Error::EmptyMatrix);
        }
        Ok(CMatrix {
            n,
            data: vec![Complex64::ZERO; n * n],
        })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<CMatrix> {
        let n = rows.len();
        let mut m = CMatrix::zero(n)?;
        for (k, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "matrix rows must have length {n}");
            for (j, v) in row.iter().enumerate() {
                m.set(k, j, *v);
            }
        }
        Ok(m)
    }

    pub fn diagonal(entries: &[Complex64]) -> Result<CMatrix> {
        let mut m = CMatrix::zero(entries.len())?;
        for (k, v) in entries.iter().enumerate() {
            m.set(k, k, *v);
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.n + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[row * self.n + col] = value;
    }

    /// Image of the sign vector x (entries +-1) under the matrix.
    fn apply_signs(&self, mask: u32) -> Vec<Complex64> {
        (0..self.n)
            .map(|k| {
                let mut acc = Complex64::ZERO;
                for n in 0..self.n {
                    let sign = if mask >> n & 1 == 1 { -1.0 } else { 1.0 };
                    acc += sign * self.get(k, n);
                }
                acc
            })
            .collect()
    }
}

fn ell_q(values: impl Iterator<Item = f64>, q: f64) -> f64 {
    if q.is_infinite() {
        values.fold(0.0, f64::max)
    } else {
        values.map(|v| v.powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

/// Sum of x_k * x_m over all 2^N sign vectors x in {1,-1}^N; equals
/// 2^N when k = m and vanishes otherwise. Indices are 1-based.
pub fn sign_correlation_sum(n: usize, k: usize, m: usize, mode: ExecMode) -> Result<i64> {
    if n > SIGN_SWEEP_CAP {
        return Err(Error::SignSweepTooLarge(n));
    }
    if k == 0 || m == 0 || k > n || m > n {
        return Err(Error::InvalidParams(format!(
            "indices must lie in 1..={n}, got k = {k}, m = {m}"
        )));
    }
    let (kb, mb) = (k - 1, m - 1);
    let count: u64 = 1 << n;
    // partition the sweep by prefix; each chunk sums exactly
    let chunks = 64usize.min(count as usize);
    let chunk_len = count / chunks as u64;
    let partial = exec::map_range(mode, 0..chunks, |c| {
        let lo = c as u64 * chunk_len;
        let hi = if c + 1 == chunks {
            count
        } else {
            lo + chunk_len
        };
        let mut acc: i64 = 0;
        for mask in lo..hi {
            let xk = if mask >> kb & 1 == 1 { -1i64 } else { 1 };
            let xm = if mask >> mb & 1 == 1 { -1i64 } else { 1 };
            acc += xk * xm;
        }
        acc
    });
    Ok(partial.into_iter().sum())
}

/// Outcome of the diagonal lower-bound check.
#[derive(Clone, Debug, Serialize)]
pub struct DiagonalCheck {
    /// l^q norm of the diagonal (sup for q = infinity).
    pub diag_norm: f64,
    /// Whether every sign vector satisfied the row-norm hypothesis.
    pub hypothesis_holds: bool,
    /// Sign vector violating the hypothesis, if any (entries +-1).
    pub witness: Option<Vec<i8>>,
    /// Largest row-image l^q norm observed across the sweep.
    pub worst_row_norm: f64,
    /// Whether diag_norm <= bound (only meaningful when the hypothesis holds).
    pub bound_holds: bool,
}

/// Checks the hypothesis "for every sign vector x, the image has l^q norm
/// <= bound" by exhaustive enumeration, then reports the l^q norm of the
/// diagonal, which the hypothesis forces below the same bound.
pub fn diagonal_lower_bound_check(
    c: &CMatrix,
    q: f64,
    bound: f64,
    mode: ExecMode,
) -> Result<DiagonalCheck> {
    if c.n() > SIGN_SWEEP_CAP {
        return Err(Error::SignSweepTooLarge(c.n()));
    }
    if !(q >= 1.0) {
        return Err(Error::InvalidParams(format!("q must be >= 1, got {q}")));
    }
    let count: u32 = 1 << c.n();
    let norms = exec::map_range(mode, 0..count as usize, |mask| {
        let image = c.apply_signs(mask as u32);
        ell_q(image.iter().map(|v| v.norm()), q)
    });
    let tol = 1e-12 * (1.0 + bound);
    let mut worst = 0.0f64;
    let mut witness = None;
    for (mask, &norm) in norms.iter().enumerate() {
        if norm > worst {
            worst = norm;
        }
        if norm > bound + tol && witness.is_none() {
            witness = Some(
                (0..c.n())
                    .map(|i| if mask >> i & 1 == 1 { -1i8 } else { 1 })
                    .collect(),
            );
        }
    }
    let diag_norm = ell_q((0..c.n()).map(|k| c.get(k, k).norm()), q);
    Ok(DiagonalCheck {
        diag_norm,
        hypothesis_holds: witness.is_none(),
        witness,
        worst_row_norm: worst,
        bound_holds: diag_norm <= bound + tol,
    })
}

/// Candidate smoothing family for the growth demonstration.
#[derive(Clone, Copy, Debug)]
pub enum SmoothingFamily {
    /// Sharp truncation of the first floor(theta) entries; satisfies the
    /// direct inequality with constant 1 but violates the complementary one.
    Truncation,
    /// Hypothetical family whose diagonal entries all have modulus >= 1/2,
    /// as forced on any family satisfying the complementary inequality at
    /// large theta; `a_const` is its direct-inequality constant.
    HalfDiagonal { a_const: f64 },
}

/// One row of the growth table.
#[derive(Clone, Debug, Serialize)]
pub struct GrowthRow {
    pub n: usize,
    /// Diagonal l^q lower bound at theta*.
    pub lower: f64,
    /// Direct-inequality ceiling A * theta*^(b-a) * N^(1/p).
    pub ceiling: f64,
    /// lower / ceiling; grows like N^(b-a) when both bounds are in force.
    pub ratio: f64,
    /// For the truncation family: an index k <= N with
    /// ||e_k - S e_k||_p = 1, witnessing the failed premise.
    pub s2_witness: Option<usize>,
}

/// Tabulates, for each N, the two incompatible bounds on the diagonal of a
/// candidate smoothing matrix at a fixed theta*. For a family obeying both
/// smoothing inequalities the ratio grows like N^(b-a), which is the
/// contradiction; the truncation family instead exhibits the failed premise.
pub fn no_smoothing_growth_report(
    a: f64,
    b: f64,
    family: SmoothingFamily,
    n_list: &[usize],
    theta_star: f64,
) -> Result<Vec<GrowthRow>> {
    if !(0.0 <= a && a < b && b <= 1.0) {
        return Err(Error::InvalidExponentPair { a, b });
    }
    let p = if a == 0.0 { f64::INFINITY } else { 1.0 / a };
    let q = 1.0 / b;
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        if n == 0 {
            return Err(Error::EmptyMatrix);
        }
        let n_inv_p = if p.is_infinite() {
            1.0
        } else {
            (n as f64).powf(1.0 / p)
        };
        let (lower, a_const, s2_witness) = match family {
            SmoothingFamily::Truncation => {
                let kept = (theta_star.floor() as usize).min(n);
                let lower = ell_q((0..kept).map(|_| 1.0), q);
                // first dropped basis vector: e_k - S e_k = e_k, norm 1 in
                // every l^p, which no decaying bound can accommodate
                let witness = if kept < n { Some(kept + 1) } else { None };
                (lower, 1.0, witness)
            }
            SmoothingFamily::HalfDiagonal { a_const } => {
                let lower = 0.5 * (n as f64).powf(1.0 / q);
                (lower, a_const, None)
            }
        };
        let ceiling = a_const * theta_star.powf(b - a) * n_inv_p;
        rows.push(GrowthRow {
            n,
            lower,
            ceiling,
            ratio: lower / ceiling,
            s2_witness,
        });
    }
    Ok(rows)
}
