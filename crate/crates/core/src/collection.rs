//! The Whitney collection data model: a family of scale elements indexed by
//! points of a finite closed set and multi-indices up to order k, playing
//! the role of a function and its candidate derivatives, together with its
//! Taylor polynomials and remainders.

use crate::element::Element;
use crate::error::{Error, Result};
use crate::multi_index::{self, IndexTable, MultiIndex};
use crate::scale::Scale;
use crate::whitney::ClosedSet;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Largest supported differentiation order; factorials and binomials stay
/// exact in integer arithmetic below this.
pub const MAX_K: usize = 8;

/// Parameters of a decreasing-regularity Lipschitz space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LipParams {
    /// Differentiation order of the collection.
    pub k: usize,
    /// Remainder exponent, k < rho <= k + 1.
    pub rho: f64,
    /// Spatial weight.
    pub gamma: f64,
    /// Regularity cost of one derivative.
    pub delta: f64,
    /// Top scale index.
    pub sigma: f64,
}

impl LipParams {
    pub fn validate(&self) -> Result<()> {
        if self.k > MAX_K {
            return Err(Error::InvalidParams(format!(
                "k must be <= {MAX_K}, got {}",
                self.k
            )));
        }
        let k = self.k as f64;
        if !(self.rho > k && self.rho <= k + 1.0) {
            return Err(Error::InvalidParams(format!(
                "rho must satisfy k < rho <= k+1, got rho = {}, k = {}",
                self.rho, self.k
            )));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "gamma must be positive, got {}",
                self.gamma
            )));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "delta must be positive, got {}",
                self.delta
            )));
        }
        if !self.sigma.is_finite() {
            return Err(Error::InvalidParams("sigma must be finite".into()));
        }
        Ok(())
    }

    /// sigma_m = sigma - m * delta.
    pub fn sigma_m(&self, m: usize) -> f64 {
        self.sigma - m as f64 * self.delta
    }

    /// sigma_rho = sigma - rho * delta.
    pub fn sigma_rho(&self) -> f64 {
        self.sigma - self.rho * self.delta
    }

    /// Index at which the j-th derivative is measured; the top order k+1
    /// reads off sigma_rho (meaningful when rho = k+1).
    pub fn sigma_for_order(&self, order: usize) -> f64 {
        if order <= self.k {
            self.sigma_m(order)
        } else {
            self.sigma_rho()
        }
    }

    pub fn tau(&self) -> f64 {
        1.0 / self.delta
    }
}

/// A Whitney-differentiable collection on a finite closed set: for every
/// point p and every multi-index j with |j| <= k, an element f^(j)(p) of
/// the scale space at index sigma_j.
#[derive(Clone, Debug, PartialEq)]
pub struct WhitneyCollection {
    params: LipParams,
    scale: Scale,
    set: ClosedSet,
    data: BTreeMap<(usize, MultiIndex), Element>,
}

impl WhitneyCollection {
    /// Validates parameters, admissibility of every sigma index, data
    /// completeness and element kinds.
    pub fn new(
        params: LipParams,
        scale: Scale,
        set: ClosedSet,
        data: BTreeMap<(usize, MultiIndex), Element>,
    ) -> Result<WhitneyCollection> {
        params.validate()?;
        let iset = scale.index_set();
        for m in 0..=params.k {
            iset.check(params.sigma_m(m))?;
        }
        iset.check(params.sigma_rho())?;
        let table = IndexTable::get(set.dim(), params.k);
        for p in 0..set.len() {
            for j in table.indices() {
                match data.get(&(p, j.clone())) {
                    Some(element) => scale.check_element(element)?,
                    None => {
                        return Err(Error::IncompleteCollection {
                            point: p,
                            j: j.clone(),
                        })
                    }
                }
            }
        }
        for (p, j) in data.keys() {
            if *p >= set.len() {
                return Err(Error::PointIndexOutOfRange(*p));
            }
            if j.len() != set.dim() || multi_index::total(j) > params.k {
                return Err(Error::OrderOutOfRange {
                    order: multi_index::total(j),
                    max: params.k,
                });
            }
        }
        Ok(WhitneyCollection {
            params,
            scale,
            set,
            data,
        })
    }

    /// Collection with every element zero, useful as an accumulator shape.
    pub fn zero(params: LipParams, scale: Scale, set: ClosedSet) -> Result<WhitneyCollection> {
        let table = IndexTable::get(set.dim(), params.k);
        let mut data = BTreeMap::new();
        for p in 0..set.len() {
            for j in table.indices() {
                data.insert((p, j.clone()), scale.zero_element());
            }
        }
        WhitneyCollection::new(params, scale, set, data)
    }

    pub fn params(&self) -> &LipParams {
        &self.params
    }

    pub fn scale(&self) -> &Scale {
        &self.scale
    }

    pub fn set(&self) -> &ClosedSet {
        &self.set
    }

    pub fn dim(&self) -> usize {
        self.set.dim()
    }

    pub fn order_table(&self) -> std::sync::Arc<IndexTable> {
        IndexTable::get(self.set.dim(), self.params.k)
    }

    /// Stored element f^(j)(p).
    pub fn value(&self, point: usize, j: &[usize]) -> &Element {
        self.data
            .get(&(point, j.to_vec()))
            .expect("collection data is complete by construction")
    }

    pub fn data(&self) -> &BTreeMap<(usize, MultiIndex), Element> {
        &self.data
    }

    /// Replaces the sigma parameter (used by the independence checks);
    /// admissibility is re-validated.
    pub fn with_sigma(&self, sigma: f64) -> Result<WhitneyCollection> {
        let params = LipParams {
            sigma,
            ..self.params
        };
        WhitneyCollection::new(
            params,
            self.scale.clone(),
            self.set.clone(),
            self.data.clone(),
        )
    }

    /// alpha * self + beta * other, elementwise; shapes must agree.
    pub fn linear_combination(
        &self,
        alpha: f64,
        other: &WhitneyCollection,
        beta: f64,
    ) -> Result<WhitneyCollection> {
        if self.set != other.set || self.params != other.params {
            return Err(Error::InvalidParams(
                "collections must share set and parameters".into(),
            ));
        }
        let data = self
            .data
            .iter()
            .map(|(key, element)| {
                let mut combined = element.scale(alpha);
                combined.axpy(beta, &other.data[key]);
                (key.clone(), combined)
            })
            .collect();
        WhitneyCollection::new(self.params, self.scale.clone(), self.set.clone(), data)
    }

    /// Taylor polynomial of the collection:
    /// P_j(x, y) = sum over |j + l| <= k of f^(j+l)(y) (x - y)^l / l!.
    /// x is an arbitrary point, y a point of the set given by index.
    pub fn taylor_poly(&self, j: &[usize], x: &[f64], y_idx: usize) -> Result<Element> {
        self.check_order(j, self.params.k)?;
        if y_idx >= self.set.len() {
            return Err(Error::PointIndexOutOfRange(y_idx));
        }
        let y = self.set.point(y_idx);
        let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        let table = self.order_table();
        let mut acc = self.scale.zero_element();
        for l in table.indices() {
            let jl = multi_index::add(j, l);
            if multi_index::total(&jl) > self.params.k {
                continue;
            }
            let weight = multi_index::monomial(&diff, l) / multi_index::multi_factorial(l);
            acc.axpy(weight, self.value(y_idx, &jl));
        }
        Ok(acc)
    }

    /// Taylor remainder R_j(x, y) = f^(j)(x) - P_j(x, y), both points in
    /// the set.
    pub fn taylor_remainder(&self, j: &[usize], x_idx: usize, y_idx: usize) -> Result<Element> {
        if x_idx >= self.set.len() {
            return Err(Error::PointIndexOutOfRange(x_idx));
        }
        let poly = self.taylor_poly(j, self.set.point(x_idx), y_idx)?;
        Ok(self.value(x_idx, j).sub(&poly))
    }

    /// Applies the scale smoothing to every stored element; parameters are
    /// unchanged.
    pub fn smooth_collection(&self, theta: f64) -> Result<WhitneyCollection> {
        let data = self
            .data
            .iter()
            .map(|(key, element)| Ok((key.clone(), self.scale.smooth(theta, element)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        WhitneyCollection::new(self.params, self.scale.clone(), self.set.clone(), data)
    }

    /// The rescaled collection with gamma = 1: the set shrinks by gamma and
    /// each element is weighted by gamma^|j|. The extension of the original
    /// collection is recovered as g^(j)(x) = gamma^-|j| g~^(j)(x / gamma).
    pub fn normalized(&self) -> Result<WhitneyCollection> {
        let gamma = self.params.gamma;
        if gamma == 1.0 {
            return Ok(self.clone());
        }
        let points = self
            .set
            .points()
            .iter()
            .map(|p| p.iter().map(|&c| c / gamma).collect())
            .collect();
        let set = ClosedSet::new(points)?;
        let data = self
            .data
            .iter()
            .map(|((p, j), element)| {
                let weight = gamma.powi(multi_index::total(j) as i32);
                ((*p, j.clone()), element.scale(weight))
            })
            .collect();
        let params = LipParams {
            gamma: 1.0,
            ..self.params
        };
        WhitneyCollection::new(params, self.scale.clone(), set, data)
    }

    fn check_order(&self, j: &[usize], max: usize) -> Result<()> {
        if j.len() != self.set.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.set.dim(),
                got: j.len(),
            });
        }
        let order = multi_index::total(j);
        if order > max {
            return Err(Error::OrderOutOfRange { order, max });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn trivial_two_point() -> WhitneyCollection {
        // k = 0, rho = 1, F = {0, 1} on the trivial scale, f(0) = 0, f(1) = 1
        let params = LipParams {
            k: 0,
            rho: 1.0,
            gamma: 1.0,
            delta: 1.0,
            sigma: 2.0,
        };
        let scale = Scale::Trivial { dim: 1 };
        let set = ClosedSet::new(vec![vec![0.0], vec![1.0]]).unwrap();
        let mut data = BTreeMap::new();
        data.insert((0, vec![0]), Element::Vector(vec![0.0]));
        data.insert((1, vec![0]), Element::Vector(vec![1.0]));
        WhitneyCollection::new(params, scale, set, data).unwrap()
    }

    #[test]
    fn invalid_params_rejected() {
        let bad = LipParams {
            k: 1,
            rho: 1.0,
            gamma: 1.0,
            delta: 1.0,
            sigma: 3.0,
        };
        assert!(bad.validate().is_err());
        let bad = LipParams {
            k: 0,
            rho: 0.5,
            gamma: 0.0,
            delta: 1.0,
            sigma: 3.0,
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn admissibility_enforced() {
        // sigma_k = -1 escapes the index set [0, inf)
        let params = LipParams {
            k: 2,
            rho: 2.5,
            gamma: 1.0,
            delta: 1.0,
            sigma: 1.0,
        };
        let scale = Scale::Trivial { dim: 1 };
        let set = ClosedSet::new(vec![vec![0.0]]).unwrap();
        let err = WhitneyCollection::zero(params, scale, set);
        assert!(matches!(err, Err(Error::IndexNotAdmissible { .. })));
    }

    #[test]
    fn completeness_enforced() {
        let params = LipParams {
            k: 1,
            rho: 1.5,
            gamma: 1.0,
            delta: 0.5,
            sigma: 2.0,
        };
        let scale = Scale::Trivial { dim: 1 };
        let set = ClosedSet::new(vec![vec![0.0]]).unwrap();
        let mut data = BTreeMap::new();
        data.insert((0, vec![0]), Element::Vector(vec![1.0]));
        // missing (0, [1])
        let err = WhitneyCollection::new(params, scale, set, data);
        assert!(matches!(err, Err(Error::IncompleteCollection { .. })));
    }

    #[test]
    fn taylor_poly_basics() {
        let f = trivial_two_point();
        // x = y: only l = 0 survives
        let p = f.taylor_poly(&[0], &[1.0], 1).unwrap();
        assert_eq!(&p, f.value(1, &[0]));
        // k = 0: constant polynomial
        let p = f.taylor_poly(&[0], &[17.0], 0).unwrap();
        assert_eq!(&p, f.value(0, &[0]));
    }

    #[test]
    fn taylor_poly_linear() {
        // n = 1, k = 1, F = {0}: P_0(x, 0) = u + x v
        let params = LipParams {
            k: 1,
            rho: 2.0,
            gamma: 1.0,
            delta: 1.0,
            sigma: 2.0,
        };
        let scale = Scale::SobolevTorus {
            dim: 1,
            smoothing: crate::scale::SobolevSmoothing::BracketSharp,
            a0: 0.0,
        };
        let set = ClosedSet::new(vec![vec![0.0]]).unwrap();
        let u = Element::unit(vec![0], Complex64::new(2.0, 0.0));
        let v = Element::unit(vec![1], Complex64::new(1.0, 0.0));
        let mut data = BTreeMap::new();
        data.insert((0, vec![0]), u.clone());
        data.insert((0, vec![1]), v.clone());
        let f = WhitneyCollection::new(params, scale, set, data).unwrap();
        let p = f.taylor_poly(&[0], &[3.0], 0).unwrap();
        let mut expect = u.clone();
        expect.axpy(3.0, &v);
        assert_eq!(p, expect);
        // P_1 is the constant polynomial v
        let p1 = f.taylor_poly(&[1], &[3.0], 0).unwrap();
        assert_eq!(p1, v);
    }

    #[test]
    fn remainders() {
        let f = trivial_two_point();
        assert!(f.taylor_remainder(&[0], 0, 0).unwrap().is_zero());
        let r = f.taylor_remainder(&[0], 1, 0).unwrap();
        assert_eq!(r, Element::Vector(vec![1.0]));
    }

    #[test]
    fn smoothing_commutes_with_remainders() {
        // R_j(x, y; S f) = S [R_j(x, y; f)] exactly on stored data
        let params = LipParams {
            k: 1,
            rho: 1.5,
            gamma: 1.0,
            delta: 0.5,
            sigma: 2.0,
        };
        let scale = Scale::SobolevTorus {
            dim: 1,
            smoothing: crate::scale::SobolevSmoothing::BracketSharp,
            a0: 0.0,
        };
        let set = ClosedSet::new(vec![vec![0.0], vec![0.5]]).unwrap();
        let mut data = BTreeMap::new();
        for p in 0..2 {
            for j in 0..=1 {
                data.insert(
                    (p, vec![j]),
                    Element::from_modes([
                        (vec![0], Complex64::new(0.3 + p as f64, 0.1 * j as f64)),
                        (vec![2 + p as i64], Complex64::new(-0.4, 0.9)),
                        (vec![7], Complex64::new(0.2, 0.2 + j as f64)),
                    ]),
                );
            }
        }
        let f = WhitneyCollection::new(params, scale.clone(), set, data).unwrap();
        let sf = f.smooth_collection(2.0).unwrap();
        for j in [vec![0], vec![1]] {
            let lhs = sf.taylor_remainder(&j, 1, 0).unwrap();
            let rhs = scale
                .smooth(2.0, &f.taylor_remainder(&j, 1, 0).unwrap())
                .unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn trivial_scale_smoothing_is_identity() {
        let f = trivial_two_point();
        let sf = f.smooth_collection(8.0).unwrap();
        assert_eq!(f, sf);
    }
}
