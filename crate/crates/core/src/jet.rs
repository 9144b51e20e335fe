//! Truncated multivariate Taylor arithmetic.
//!
//! A [`Jet`] stores the Taylor coefficients (derivative divided by the
//! factorial of the multi-index) of a smooth function at a point, up to a
//! fixed total order. Arithmetic on jets propagates derivatives exactly to
//! roundoff, which is how all partial derivatives of the partition of unity
//! and of the extension are obtained.

use crate::error::{Error, Result};
use crate::multi_index::{self, IndexTable};
use std::sync::Arc;

/// Truncated Taylor expansion of order `order` in `n` variables.
///
/// `coeffs[i]` is the coefficient of the `i`-th multi-index in graded
/// lexicographic order; the stored value is `d^j h(x0) / j!`. The table
/// covers exactly the multi-indices of total order `<= order`; arithmetic
/// never reads or writes beyond it.
#[derive(Clone, Debug)]
pub struct Jet {
    table: Arc<IndexTable>,
    coeffs: Vec<f64>,
}

impl PartialEq for Jet {
    fn eq(&self, other: &Jet) -> bool {
        self.n() == other.n() && self.order() == other.order() && self.coeffs == other.coeffs
    }
}

impl Jet {
    pub fn zero(n: usize, order: usize) -> Jet {
        let table = IndexTable::get(n, order);
        let coeffs = vec![0.0; table.len()];
        Jet { table, coeffs }
    }

    pub fn constant(n: usize, order: usize, value: f64) -> Jet {
        let mut jet = Jet::zero(n, order);
        jet.coeffs[0] = value;
        jet
    }

    /// The coordinate function `x -> x[axis]` expanded at `x0`.
    pub fn variable(x0: &[f64], axis: usize, order: usize) -> Result<Jet> {
        let n = x0.len();
        if axis >= n {
            return Err(Error::AxisOutOfRange { axis, dim: n });
        }
        let mut jet = Jet::zero(n, order);
        jet.coeffs[0] = x0[axis];
        if order >= 1 {
            let mut unit = vec![0usize; n];
            unit[axis] = 1;
            let pos = jet.table.position(&unit).expect("unit index in table");
            jet.coeffs[pos] = 1.0;
        }
        Ok(jet)
    }

    pub fn n(&self) -> usize {
        self.table.n()
    }

    pub fn order(&self) -> usize {
        self.table.order()
    }

    /// Value of the underlying function at the expansion point.
    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn coeff(&self, j: &[usize]) -> f64 {
        match self.table.position(j) {
            Some(pos) => self.coeffs[pos],
            None => 0.0,
        }
    }

    /// Partial derivative `d^j h(x0)`, i.e. `j! * coeff(j)`.
    pub fn derivative(&self, j: &[usize]) -> f64 {
        self.coeff(j) * multi_index::multi_factorial(j)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn table(&self) -> &IndexTable {
        &self.table
    }

    fn same_shape(&self, other: &Jet) -> Result<()> {
        if self.n() != other.n() || self.order() != other.order() {
            return Err(Error::JetShapeMismatch {
                n_a: self.n(),
                order_a: self.order(),
                n_b: other.n(),
                order_b: other.order(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Jet) -> Result<Jet> {
        self.same_shape(other)?;
        let mut out = self.clone();
        for (c, d) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *c += d;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Jet) -> Result<Jet> {
        self.same_shape(other)?;
        let mut out = self.clone();
        for (c, d) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *c -= d;
        }
        Ok(out)
    }

    pub fn neg(&self) -> Jet {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            *c = -*c;
        }
        out
    }

    pub fn scale(&self, factor: f64) -> Jet {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            *c *= factor;
        }
        out
    }

    pub fn add_constant(&self, value: f64) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += value;
        out
    }

    /// Cauchy product truncated to the common order.
    pub fn mul(&self, other: &Jet) -> Result<Jet> {
        self.same_shape(other)?;
        let order = self.order();
        let mut out = Jet::zero(self.n(), order);
        let table = Arc::clone(&self.table);
        for (ia, ja) in table.indices().iter().enumerate() {
            let ca = self.coeffs[ia];
            if ca == 0.0 {
                continue;
            }
            let deg_a = multi_index::total(ja);
            for (ib, jb) in table.indices().iter().enumerate() {
                if deg_a + multi_index::total(jb) > order {
                    continue;
                }
                let cb = other.coeffs[ib];
                if cb == 0.0 {
                    continue;
                }
                let sum = multi_index::add(ja, jb);
                let pos = table.position(&sum).expect("sum within order");
                out.coeffs[pos] += ca * cb;
            }
        }
        Ok(out)
    }

    /// Quotient `q` with `q * other = self` up to the truncation order.
    ///
    /// Coefficients are solved recursively in graded order; requires a
    /// nonzero constant term in the divisor.
    pub fn div(&self, other: &Jet) -> Result<Jet> {
        self.same_shape(other)?;
        let b0 = other.coeffs[0];
        if b0 == 0.0 {
            return Err(Error::JetDivisionSingular);
        }
        let table = Arc::clone(&self.table);
        let mut out = Jet::zero(self.n(), self.order());
        for (ig, jg) in table.indices().iter().enumerate() {
            let mut acc = self.coeffs[ig];
            // subtract sum over nonzero beta <= jg of b[beta] * q[jg - beta]
            for (ib, jb) in table.indices().iter().enumerate() {
                if ib == 0 || !multi_index::leq(jb, jg) {
                    continue;
                }
                let cb = other.coeffs[ib];
                if cb == 0.0 {
                    continue;
                }
                let rest = multi_index::sub(jg, jb);
                let pos = table.position(&rest).expect("difference within order");
                acc -= cb * out.coeffs[pos];
            }
            out.coeffs[ig] = acc / b0;
        }
        Ok(out)
    }

    /// Composition `outer(self)` where `outer` is given by its univariate
    /// Taylor coefficients at the point `self.value()`, lowest order first,
    /// of length `order + 1`. Evaluated by Horner's scheme on the
    /// zero-constant part of `self`.
    pub fn compose_univariate(&self, outer: &[f64]) -> Result<Jet> {
        if outer.len() != self.order() + 1 {
            return Err(Error::InvalidParams(format!(
                "outer series must have length {}, got {}",
                self.order() + 1,
                outer.len()
            )));
        }
        let mut dz = self.clone();
        dz.coeffs[0] = 0.0;
        let mut out = Jet::constant(self.n(), self.order(), outer[self.order()]);
        for i in (0..self.order()).rev() {
            out = out.mul(&dz)?;
            out.coeffs[0] += outer[i];
        }
        Ok(out)
    }
}

/// Taylor coefficients of `exp` at `value`, length `order + 1`.
pub fn exp_series(value: f64, order: usize) -> Vec<f64> {
    let e = value.exp();
    (0..=order)
        .map(|i| e / multi_index::factorial(i) as f64)
        .collect()
}
