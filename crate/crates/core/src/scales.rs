//! Kind-specific helpers for the concrete scales: the smooth cutoff, the
//! bump profile of the partition of unity, Sobolev weights and the sequence
//! truncation matrix.
//!
//! The glue is h(s) = e(s) / (e(s) + e(1-s)) with e(s) = exp(-1/s) for s > 0
//! and 0 otherwise: monotone, C-infinity, flat at both ends of [0, 1]. Every
//! piecewise function here selects its branch by the evaluation point; points
//! exactly on a gluing boundary take the flat branch, where the two branches
//! agree to all orders.

use crate::error::Result;
use crate::jet::{exp_series, Jet};
use crate::nosmoothing::CMatrix;
use num_complex::Complex64;

/// e(s) = exp(-1/s) for s > 0, extended by 0.
pub fn flat_eval(s: f64) -> f64 {
    if s > 0.0 {
        (-1.0 / s).exp()
    } else {
        0.0
    }
}

/// Monotone C-infinity glue with h(0) = 0, h(1) = 1, h(1/2) = 1/2.
pub fn glue_eval(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        let a = flat_eval(s);
        a / (a + flat_eval(1.0 - s))
    }
}

/// Smooth even cutoff: 1 on |t| <= 1/2, 0 on |t| >= 1.
pub fn cutoff_eval(t: f64) -> f64 {
    let t = t.abs();
    if t <= 0.5 {
        1.0
    } else if t >= 1.0 {
        0.0
    } else {
        glue_eval(2.0 * (1.0 - t))
    }
}

/// Bump profile of the partition of unity: 1 on |t| <= 1, 0 on
/// |t| >= 1 + eps, glued on the shoulder.
pub fn bump_eval(t: f64, eps: f64) -> f64 {
    let t = t.abs();
    if t <= 1.0 {
        1.0
    } else if t >= 1.0 + eps {
        0.0
    } else {
        glue_eval((1.0 + eps - t) / eps)
    }
}

/// Jet of e(s) at s.value(); the branch is picked by the value, and the
/// boundary s = 0 takes the flat branch (all derivatives vanish there).
pub fn flat_jet(s: &Jet) -> Result<Jet> {
    if s.value() <= 0.0 {
        return Ok(Jet::zero(s.n(), s.order()));
    }
    let one = Jet::constant(s.n(), s.order(), 1.0);
    let inner = one.div(s)?.neg();
    inner.compose_univariate(&exp_series(inner.value(), s.order()))
}

pub fn glue_jet(s: &Jet) -> Result<Jet> {
    if s.value() <= 0.0 {
        return Ok(Jet::zero(s.n(), s.order()));
    }
    if s.value() >= 1.0 {
        return Ok(Jet::constant(s.n(), s.order(), 1.0));
    }
    let a = flat_jet(s)?;
    let mirrored = s.neg().add_constant(1.0);
    let b = flat_jet(&mirrored)?;
    a.div(&a.add(&b)?)
}

pub fn cutoff_jet(t: &Jet) -> Result<Jet> {
    let v = t.value().abs();
    if v <= 0.5 {
        return Ok(Jet::constant(t.n(), t.order(), 1.0));
    }
    if v >= 1.0 {
        return Ok(Jet::zero(t.n(), t.order()));
    }
    let abs_t = if t.value() >= 0.0 { t.clone() } else { t.neg() };
    glue_jet(&abs_t.neg().add_constant(1.0).scale(2.0))
}

pub fn bump_jet(t: &Jet, eps: f64) -> Result<Jet> {
    let v = t.value().abs();
    if v <= 1.0 {
        return Ok(Jet::constant(t.n(), t.order(), 1.0));
    }
    if v >= 1.0 + eps {
        return Ok(Jet::zero(t.n(), t.order()));
    }
    let abs_t = if t.value() >= 0.0 { t.clone() } else { t.neg() };
    glue_jet(&abs_t.neg().add_constant(1.0 + eps).scale(1.0 / eps))
}

/// Japanese-bracket weight `<k>^s` = (1 + |k|^2)^(s/2).
pub fn sobolev_weight(k: &[i64], s: f64) -> f64 {
    let sq: f64 = k.iter().map(|&ki| (ki as f64) * (ki as f64)).sum();
    (1.0 + sq).powf(s / 2.0)
}

/// Diagonal truncation matrix acting on the first N sequence entries:
/// c_kk = 1 for k <= theta (1-based), 0 otherwise.
pub fn lp_truncation_matrix(theta: f64, n: usize) -> Result<CMatrix> {
    let mut m = CMatrix::zero(n)?;
    for k in 1..=n {
        if k as f64 <= theta {
            m.set(k - 1, k - 1, Complex64::new(1.0, 0.0));
        }
    }
    Ok(m)
}
