//! The extension operator: evaluation of the extended collection g on all
//! of R^n, its jet-lifted form, and the exact algebraic decompositions used
//! to cross-check the construction near the set.
//!
//! On the set, g restricts to the stored data bit-identically. Off the set,
//! g^(0) is a locally finite sum of smoothed Taylor polynomials weighted by
//! the partition of unity, with the smoothing parameter of each cube tied to
//! its diameter by theta = q^(-1/delta); derivatives fall out of the product
//! rule, with the top order |j| = k+1 dropping the m = j term.
//!
//! A weight gamma != 1 is handled by the rescaling reduction: the extension
//! of the original data equals gamma^-|j| times the extension of the
//! normalized collection evaluated at x / gamma.

use crate::collection::WhitneyCollection;
use crate::element::Element;
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::multi_index::{self, IndexTable, MultiIndex};
use crate::whitney::{
    covering_cubes, dist_to_set, nearest_anchor_index, partition_jets_for, DyadicCube,
};
use std::sync::Arc;

/// Support radius of the extension: g vanishes where dist(x, F) > 6 (for
/// gamma = 1).
pub const SUPPORT_RADIUS: f64 = 6.0;

/// Smoothing parameter of a cube of diameter q: theta = q^(-1/delta).
/// Only cubes of diameter <= 1 enter the extension, so theta >= 1.
pub fn theta_for_cube(q: f64, delta: f64) -> Result<f64> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::CubeDiameterOutOfRange(q));
    }
    if !(delta > 0.0) {
        return Err(Error::InvalidParams(format!(
            "delta must be positive, got {delta}"
        )));
    }
    Ok(q.powf(-1.0 / delta))
}

/// Evaluator for the extension of one collection. Precomputes the
/// gamma-normalized copy so that batch evaluation does not rescale the data
/// on every call.
pub struct Extender<'f> {
    source: &'f WhitneyCollection,
    /// None when gamma = 1 (the source is already normalized).
    normalized: Option<WhitneyCollection>,
}

impl<'f> Extender<'f> {
    pub fn new(source: &'f WhitneyCollection) -> Result<Extender<'f>> {
        let normalized = if source.params().gamma == 1.0 {
            None
        } else {
            Some(source.normalized()?)
        };
        Ok(Extender { source, normalized })
    }

    pub fn collection(&self) -> &WhitneyCollection {
        self.source
    }

    /// g^(j)(x) for |j| <= k + 1; the top order is defined only off the set.
    pub fn eval(&self, x: &[f64], j: &[usize]) -> Result<Element> {
        let k = self.source.params().k;
        check_order(self.source, j, k + 1)?;
        if let Some(idx) = self.source.set().position(x) {
            return if multi_index::total(j) <= k {
                Ok(self.source.value(idx, j).clone())
            } else {
                Err(Error::TopOrderOnSet)
            };
        }
        match &self.normalized {
            None => eval_normalized(self.source, x, j),
            Some(nc) => {
                let gamma = self.source.params().gamma;
                let xq: Vec<f64> = x.iter().map(|&c| c / gamma).collect();
                let raw = eval_normalized(nc, &xq, j)?;
                Ok(raw.scale(gamma.powi(-(multi_index::total(j) as i32))))
            }
        }
    }

    /// Jet of g^(0) at x of the given order: Taylor coefficients as scale
    /// elements, aligned with the graded-lex index table. Defined off the
    /// set only.
    pub fn eval_jet(&self, x: &[f64], order: usize) -> Result<ElementJet> {
        match &self.normalized {
            None => eval_jet_normalized(self.source, x, order),
            Some(nc) => {
                let gamma = self.source.params().gamma;
                let xq: Vec<f64> = x.iter().map(|&c| c / gamma).collect();
                let mut jet = eval_jet_normalized(nc, &xq, order)?;
                for (pos, l) in jet.table.indices().iter().enumerate() {
                    let w = gamma.powi(-(multi_index::total(l) as i32));
                    jet.coeffs[pos] = jet.coeffs[pos].scale(w);
                }
                Ok(jet)
            }
        }
    }
}

/// g^(j)(x) for a collection, |j| <= k + 1.
pub fn extend_eval(f: &WhitneyCollection, x: &[f64], j: &[usize]) -> Result<Element> {
    Extender::new(f)?.eval(x, j)
}

/// Truncated Taylor expansion with scale-element coefficients.
pub struct ElementJet {
    table: Arc<IndexTable>,
    coeffs: Vec<Element>,
}

impl ElementJet {
    fn zero(f: &WhitneyCollection, order: usize) -> ElementJet {
        let table = IndexTable::get(f.dim(), order);
        let coeffs = (0..table.len()).map(|_| f.scale().zero_element()).collect();
        ElementJet { table, coeffs }
    }

    pub fn table(&self) -> &IndexTable {
        &self.table
    }

    /// Taylor coefficient at multi-index l (derivative / l!).
    pub fn coeff(&self, l: &[usize]) -> &Element {
        &self.coeffs[self.table.position(l).expect("index within order")]
    }

    /// Derivative d^l g^(0)(x) = l! * coeff(l).
    pub fn derivative(&self, l: &[usize]) -> Element {
        self.coeff(l).scale(multi_index::multi_factorial(l))
    }
}

fn check_order(f: &WhitneyCollection, j: &[usize], max: usize) -> Result<()> {
    if j.len() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: j.len(),
        });
    }
    let order = multi_index::total(j);
    if order > max {
        return Err(Error::OrderOutOfRange { order, max });
    }
    Ok(())
}

/// Covering cubes of x together with their partition jets at the given
/// order, plus the sub-list restricted to the extension support (diameter
/// <= 1).
fn local_frame(f: &WhitneyCollection, x: &[f64], order: usize) -> Result<Vec<(DyadicCube, Jet)>> {
    let covering = covering_cubes(x, f.set())?;
    partition_jets_for(&covering, x, order)
}

/// All multi-indices m <= j componentwise, in graded-lex order of the
/// enclosing table.
fn below(j: &[usize], table: &IndexTable) -> Vec<MultiIndex> {
    table
        .indices()
        .iter()
        .filter(|m| multi_index::leq(m, j))
        .cloned()
        .collect()
}

fn eval_normalized(f: &WhitneyCollection, x: &[f64], j: &[usize]) -> Result<Element> {
    debug_assert_eq!(f.params().gamma, 1.0);
    let k = f.params().k;
    let order = multi_index::total(j);
    if let Some(idx) = f.set().position(x) {
        return if order <= k {
            Ok(f.value(idx, j).clone())
        } else {
            Err(Error::TopOrderOnSet)
        };
    }
    if dist_to_set(x, f.set()) > SUPPORT_RADIUS {
        return Ok(f.scale().zero_element());
    }
    let top = order == k + 1;
    let frame = local_frame(f, x, order)?;
    let table = IndexTable::get(f.dim(), order);
    let mut acc = f.scale().zero_element();
    for (cube, phi) in &frame {
        let q = cube.diam();
        if q > 1.0 {
            continue;
        }
        let theta = theta_for_cube(q, f.params().delta)?;
        let anchor = nearest_anchor_index(cube, f.set());
        for m in below(j, &table) {
            if top && m == j {
                continue;
            }
            let weight =
                multi_index::multi_binomial(j, &m) * phi.derivative(&multi_index::sub(j, &m));
            if weight == 0.0 {
                continue;
            }
            let poly = f.taylor_poly(&m, x, anchor)?;
            let smoothed = f.scale().smooth(theta, &poly)?;
            acc.axpy(weight, &smoothed);
        }
    }
    Ok(acc)
}

fn eval_jet_normalized(f: &WhitneyCollection, x: &[f64], order: usize) -> Result<ElementJet> {
    debug_assert_eq!(f.params().gamma, 1.0);
    if f.set().position(x).is_some() {
        return Err(Error::PointOnSet);
    }
    let mut out = ElementJet::zero(f, order);
    if dist_to_set(x, f.set()) > SUPPORT_RADIUS {
        return Ok(out);
    }
    let frame = local_frame(f, x, order)?;
    let k_table = f.order_table();
    for (cube, phi) in &frame {
        let q = cube.diam();
        if q > 1.0 {
            continue;
        }
        let theta = theta_for_cube(q, f.params().delta)?;
        let anchor = nearest_anchor_index(cube, f.set());
        let p = f.set().point(anchor);
        for l in k_table.indices() {
            // jet of (x - p)^l / l! * phi*(x)
            let mut weight = phi.clone();
            for (axis, &power) in l.iter().enumerate() {
                let lin = Jet::variable(x, axis, order)?.add_constant(-p[axis]);
                for _ in 0..power {
                    weight = weight.mul(&lin)?;
                }
            }
            let weight = weight.scale(1.0 / multi_index::multi_factorial(l));
            let smoothed = f.scale().smooth(theta, f.value(anchor, l))?;
            for (pos, w) in weight.coeffs().iter().enumerate() {
                if *w != 0.0 {
                    out.coeffs[pos].axpy(*w, &smoothed);
                }
            }
        }
    }
    Ok(out)
}

/// Worst relative residual, over all |j| <= k+1, between the jet-lifted
/// evaluation of g^(0) and the derivative formulas behind `eval`. The
/// denominator is the accumulated magnitude of the terms entering the sums,
/// so exact cancellations (huge partition derivatives summing to zero) are
/// measured against the size of what cancelled.
pub fn derivative_consistency(f: &WhitneyCollection, x: &[f64]) -> Result<f64> {
    let ext = Extender::new(f)?;
    let (coll, xq): (&WhitneyCollection, Vec<f64>) = match &ext.normalized {
        None => (f, x.to_vec()),
        Some(nc) => {
            let gamma = f.params().gamma;
            (nc, x.iter().map(|&c| c / gamma).collect())
        }
    };
    let params = *coll.params();
    let k = params.k;
    let order = k + 1;
    let sigma_rho = params.sigma_rho();
    let scale = coll.scale();
    if coll.set().position(&xq).is_some() {
        return Err(Error::PointOnSet);
    }
    let jet = eval_jet_normalized(coll, &xq, order)?;
    let table = IndexTable::get(coll.dim(), order);

    // per-cube smoothed polynomials and their norms
    let mut frame_data: Vec<(Jet, Vec<(MultiIndex, Element, f64)>)> = Vec::new();
    if dist_to_set(&xq, coll.set()) <= SUPPORT_RADIUS {
        let frame = local_frame(coll, &xq, order)?;
        let k_table = coll.order_table();
        for (cube, phi) in frame {
            if cube.diam() > 1.0 {
                continue;
            }
            let theta = theta_for_cube(cube.diam(), params.delta)?;
            let anchor = nearest_anchor_index(&cube, coll.set());
            let mut per_m = Vec::new();
            for m in k_table.indices() {
                let poly = coll.taylor_poly(m, &xq, anchor)?;
                let smoothed = scale.smooth(theta, &poly)?;
                let norm = scale.norm(sigma_rho, &smoothed)?;
                per_m.push((m.clone(), smoothed, norm));
            }
            frame_data.push((phi, per_m));
        }
    }

    let mut worst = 0.0f64;
    for j in table.indices() {
        let top = multi_index::total(j) == order;
        let mut direct = scale.zero_element();
        let mut opscale = 0.0f64;
        for (phi, per_m) in &frame_data {
            for (m, smoothed, norm) in per_m {
                if !multi_index::leq(m, j) || (top && m == j) {
                    continue;
                }
                let weight =
                    multi_index::multi_binomial(j, m) * phi.derivative(&multi_index::sub(j, m));
                if weight == 0.0 {
                    continue;
                }
                direct.axpy(weight, smoothed);
                opscale += weight.abs() * norm;
            }
        }
        let lifted = jet.derivative(j);
        let residual = scale.norm(sigma_rho, &lifted.sub(&direct))?;
        let denom = opscale
            .max(scale.norm(sigma_rho, &direct)?)
            .max(scale.norm(sigma_rho, &lifted)?);
        worst = worst.max(if denom > 0.0 {
            residual / denom
        } else {
            residual / f64::MIN_POSITIVE
        });
    }
    Ok(worst)
}

/// Residuals (relative, in the sigma_rho norm) of the decomposition
/// identities at a point close to the set.
#[derive(Clone, Debug)]
pub struct IdentityCheck {
    /// Difference decomposition of g^(j) - P_j(x, y), |j| <= k.
    pub residual_difference: Option<f64>,
    /// theta_x decomposition of g^(j), |j| <= k.
    pub residual_direct: Option<f64>,
    /// Difference decomposition at the top order |j| = k + 1.
    pub residual_top: Option<f64>,
    pub max: f64,
}

/// Verifies the smoothing-operator decompositions of the extension against
/// direct evaluation at x (dist(x, F) < 1/2 required), with Taylor center
/// y given by index into the set. Requires gamma = 1; the identities are
/// exact, so residuals are pure roundoff.
pub fn proof_identity_check(
    f: &WhitneyCollection,
    x: &[f64],
    y_idx: usize,
    j: &[usize],
) -> Result<IdentityCheck> {
    let params = *f.params();
    if params.gamma != 1.0 {
        return Err(Error::InvalidParams(
            "identity checks require gamma = 1".into(),
        ));
    }
    let k = params.k;
    check_order(f, j, k + 1)?;
    if y_idx >= f.set().len() {
        return Err(Error::PointIndexOutOfRange(y_idx));
    }
    let d = dist_to_set(x, f.set());
    if d == 0.0 {
        return Err(Error::PointOnSet);
    }
    if d >= 0.5 {
        return Err(Error::InvalidParams(format!(
            "identity checks require dist(x, F) < 1/2, got {d}"
        )));
    }
    let order = multi_index::total(j);
    let top = order == k + 1;
    let sigma_rho = params.sigma_rho();
    let scale = f.scale();

    let covering = covering_cubes(x, f.set())?;
    let jets = partition_jets_for(&covering, x, order)?;
    let frame: Vec<(DyadicCube, Jet)> = jets
        .into_iter()
        .filter(|(cube, _)| cube.diam() <= 1.0)
        .collect();
    let table = IndexTable::get(f.dim(), order);
    let theta_x = (SUPPORT_RADIUS / d).powf(params.tau());

    // per-cube smoothing parameters, anchors and polynomial values
    let mut cube_data = Vec::with_capacity(frame.len());
    for (cube, phi) in &frame {
        let theta = theta_for_cube(cube.diam(), params.delta)?;
        let anchor = nearest_anchor_index(cube, f.set());
        cube_data.push((theta, anchor, phi));
    }

    // polynomials P_m exist only for |m| <= k; at the top order the m = j
    // term is absent from both identities
    let ms: Vec<MultiIndex> = below(j, &table)
        .into_iter()
        .filter(|m| multi_index::total(m) <= k)
        .collect();
    let norm = |e: &Element| scale.norm(sigma_rho, e);
    let mut z_low: Vec<Element> = Vec::with_capacity(ms.len());
    let mut z_high: Vec<Element> = Vec::with_capacity(ms.len());
    let mut w_high: Vec<Element> = Vec::with_capacity(ms.len());
    // accumulated magnitude of the terms entering the direct evaluation;
    // the identities are exact cancellations, so residuals are measured
    // against the size of what cancelled
    let mut term_scale = 0.0f64;
    for m in &ms {
        let p_my = f.taylor_poly(m, x, y_idx)?;
        let s_theta_x = scale.smooth(theta_x, &p_my)?;
        let mut zl = scale.zero_element();
        let mut zh = scale.zero_element();
        let mut wh = scale.zero_element();
        let dj = multi_index::sub(j, m);
        let b = multi_index::multi_binomial(j, m);
        for (theta, anchor, phi) in &cube_data {
            let deriv = phi.derivative(&dj);
            if deriv == 0.0 {
                continue;
            }
            let p_mi = f.taylor_poly(m, x, *anchor)?;
            let s_pi = scale.smooth(*theta, &p_mi)?;
            term_scale = term_scale.max(b * deriv.abs() * norm(&s_pi)?);
            let s_diff = scale.smooth(*theta, &p_mi.sub(&p_my))?;
            zl.axpy(deriv, &s_diff);
            let s_my = scale.smooth(*theta, &p_my)?;
            zh.axpy(deriv, &p_my.sub(&s_my));
            wh.axpy(deriv, &s_my.sub(&s_theta_x));
        }
        z_low.push(zl);
        z_high.push(zh);
        w_high.push(wh);
    }

    let g_j = eval_normalized(f, x, j)?;
    let mut opscale = norm(&g_j)?.max(term_scale);

    let mut residual_difference = None;
    let mut residual_direct = None;
    let mut residual_top = None;

    if !top {
        // g^(j)(x) - P_j(x, y) = sum over m <= j of binom (Z_low - Z_high)
        let p_jy = f.taylor_poly(j, x, y_idx)?;
        opscale = opscale.max(norm(&p_jy)?);
        let lhs = g_j.sub(&p_jy);
        let mut rhs = scale.zero_element();
        for (idx, m) in ms.iter().enumerate() {
            let b = multi_index::multi_binomial(j, m);
            opscale = opscale.max(b * norm(&z_low[idx])?);
            opscale = opscale.max(b * norm(&z_high[idx])?);
            rhs.axpy(b, &z_low[idx].sub(&z_high[idx]));
        }
        residual_difference = Some(norm(&lhs.sub(&rhs))?);

        // g^(j)(x) = G_j + sum over m < j of binom (Z_low + W_high)
        let mut g_cap = scale.zero_element();
        for (theta, anchor, phi) in &cube_data {
            let value = phi.value();
            if value == 0.0 {
                continue;
            }
            let p_ji = f.taylor_poly(j, x, *anchor)?;
            g_cap.axpy(value, &scale.smooth(*theta, &p_ji)?);
        }
        opscale = opscale.max(norm(&g_cap)?);
        let mut rhs = g_cap;
        for (idx, m) in ms.iter().enumerate() {
            if m == j {
                continue;
            }
            let b = multi_index::multi_binomial(j, m);
            opscale = opscale.max(b * norm(&w_high[idx])?);
            rhs.axpy(b, &z_low[idx].add(&w_high[idx]));
        }
        residual_direct = Some(norm(&g_j.sub(&rhs))?);
    } else {
        // top order: the m = j term is absent on both sides
        let mut rhs = scale.zero_element();
        for (idx, m) in ms.iter().enumerate() {
            if m == j {
                continue;
            }
            let b = multi_index::multi_binomial(j, m);
            opscale = opscale.max(b * norm(&z_low[idx])?);
            opscale = opscale.max(b * norm(&z_high[idx])?);
            rhs.axpy(b, &z_low[idx].sub(&z_high[idx]));
        }
        residual_top = Some(norm(&g_j.sub(&rhs))?);
    }

    let floor = f64::MIN_POSITIVE;
    let rel = |r: Option<f64>| {
        r.map(|v| {
            if opscale > 0.0 {
                v / opscale
            } else {
                v / floor
            }
        })
    };
    let residual_difference = rel(residual_difference);
    let residual_direct = rel(residual_direct);
    let residual_top = rel(residual_top);
    let max = [residual_difference, residual_direct, residual_top]
        .into_iter()
        .flatten()
        .fold(0.0, f64::max);
    Ok(IdentityCheck {
        residual_difference,
        residual_direct,
        residual_top,
        max,
    })
}

/// Relative residual of the two-center Taylor difference formula
/// P_j(x, y) - P_j(x, z) = sum over |j + l| <= k of R_(j+l)(y, z) (x-y)^l / l!
/// for y, z in the set and arbitrary x.
pub fn taylor_difference_residual(
    f: &WhitneyCollection,
    j: &[usize],
    x: &[f64],
    y_idx: usize,
    z_idx: usize,
) -> Result<f64> {
    let k = f.params().k;
    check_order(f, j, k)?;
    let sigma_rho = f.params().sigma_rho();
    let scale = f.scale();
    let p_y = f.taylor_poly(j, x, y_idx)?;
    let p_z = f.taylor_poly(j, x, z_idx)?;
    let lhs = p_y.sub(&p_z);
    let y = f.set().point(y_idx);
    let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    let table = f.order_table();
    let mut rhs = scale.zero_element();
    let mut opscale = scale
        .norm(sigma_rho, &p_y)?
        .max(scale.norm(sigma_rho, &p_z)?);
    for l in table.indices() {
        let jl = multi_index::add(j, l);
        if multi_index::total(&jl) > k {
            continue;
        }
        let weight = multi_index::monomial(&diff, l) / multi_index::multi_factorial(l);
        let rem = f.taylor_remainder(&jl, y_idx, z_idx)?;
        opscale = opscale.max(weight.abs() * scale.norm(sigma_rho, &rem)?);
        rhs.axpy(weight, &rem);
    }
    let residual = scale.norm(sigma_rho, &lhs.sub(&rhs))?;
    Ok(if opscale > 0.0 {
        residual / opscale
    } else {
        residual / f64::MIN_POSITIVE
    })
}
