//! Decreasing-regularity Lipschitz norms: the exact norm on a finite set,
//! the fixed-space variant, and sampled lower bounds on the whole space for
//! extensions.

use crate::collection::{LipParams, WhitneyCollection};
use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::extension::Extender;
use crate::multi_index::{self, MultiIndex};
use crate::scale::IndexSet;
use crate::whitney::{covering_cubes, dist_to_set};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// The indices sigma_0, ..., sigma_k, sigma_rho, checked against the index
/// set of the scale.
pub fn sigma_indices(params: &LipParams, index_set: &IndexSet) -> Result<Vec<f64>> {
    params.validate()?;
    let mut out = Vec::with_capacity(params.k + 2);
    for m in 0..=params.k {
        let s = params.sigma_m(m);
        index_set.check(s)?;
        out.push(s);
    }
    let s_rho = params.sigma_rho();
    index_set.check(s_rho)?;
    out.push(s_rho);
    Ok(out)
}

/// Witness of the sup part of the norm.
#[derive(Clone, Debug, Serialize)]
pub struct SupWitness {
    pub point: Vec<f64>,
    pub j: MultiIndex,
    pub value: f64,
}

/// Witness of the remainder part of the norm.
#[derive(Clone, Debug, Serialize)]
pub struct RemainderWitness {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub j: MultiIndex,
    pub value: f64,
}

/// Structured norm value: the sup part max gamma^|j| ||f^(j)(p)||, the
/// remainder part max gamma^rho ||R_j(x,y)|| / |x-y|^(rho-|j|), and their
/// maximum, with witnesses.
#[derive(Clone, Debug, Serialize)]
pub struct NormReport {
    pub sup_part: f64,
    pub sup_witness: Option<SupWitness>,
    pub remainder_part: f64,
    pub remainder_witness: Option<RemainderWitness>,
    pub norm: f64,
    /// Pairs skipped because evaluation hit the depth cap.
    pub skipped: usize,
}

impl NormReport {
    fn assemble(
        sup: Option<SupWitness>,
        rem: Option<RemainderWitness>,
        skipped: usize,
    ) -> NormReport {
        let sup_part = sup.as_ref().map_or(0.0, |w| w.value);
        let remainder_part = rem.as_ref().map_or(0.0, |w| w.value);
        NormReport {
            sup_part,
            remainder_part,
            norm: sup_part.max(remainder_part),
            sup_witness: sup,
            remainder_witness: rem,
            skipped,
        }
    }
}

fn max_witness<W>(acc: &mut Option<W>, candidate: W, value: impl Fn(&W) -> f64) {
    let replace = match acc {
        None => true,
        Some(w) => value(&candidate) > value(w),
    };
    if replace {
        *acc = Some(candidate);
    }
}

/// Exact norm over a finite set: every point, pair and multi-index is
/// enumerated. Norms are taken at the decreasing indices sigma_j for the
/// sup part and at sigma_rho for remainders.
pub fn lip_norm_finite(f: &WhitneyCollection) -> Result<NormReport> {
    lip_norm_exact(f, None)
}

/// Same structure with every norm taken at the single index `y_index`.
pub fn lip_norm_fixedspace(f: &WhitneyCollection, y_index: f64) -> Result<NormReport> {
    f.scale().index_set().check(y_index)?;
    lip_norm_exact(f, Some(y_index))
}

fn lip_norm_exact(f: &WhitneyCollection, fixed_index: Option<f64>) -> Result<NormReport> {
    let params = *f.params();
    sigma_indices(&params, &f.scale().index_set())?;
    let table = f.order_table();
    let scale = f.scale();
    let gamma = params.gamma;
    let mut sup: Option<SupWitness> = None;
    let mut rem: Option<RemainderWitness> = None;
    for p in 0..f.set().len() {
        for j in table.indices() {
            let index = fixed_index.unwrap_or_else(|| params.sigma_m(multi_index::total(j)));
            let value =
                gamma.powi(multi_index::total(j) as i32) * scale.norm(index, f.value(p, j))?;
            max_witness(
                &mut sup,
                SupWitness {
                    point: f.set().point(p).to_vec(),
                    j: j.clone(),
                    value,
                },
                |w| w.value,
            );
        }
    }
    let rho_index = fixed_index.unwrap_or_else(|| params.sigma_rho());
    for x_idx in 0..f.set().len() {
        for y_idx in 0..f.set().len() {
            if x_idx == y_idx {
                continue;
            }
            let gap = point_dist(f.set().point(x_idx), f.set().point(y_idx));
            for j in table.indices() {
                let r = f.taylor_remainder(j, x_idx, y_idx)?;
                let value = gamma.powf(params.rho) * scale.norm(rho_index, &r)?
                    / gap.powf(params.rho - multi_index::total(j) as f64);
                max_witness(
                    &mut rem,
                    RemainderWitness {
                        x: f.set().point(x_idx).to_vec(),
                        y: f.set().point(y_idx).to_vec(),
                        j: j.clone(),
                        value,
                    },
                    |w| w.value,
                );
            }
        }
    }
    Ok(NormReport::assemble(sup, rem, 0))
}

fn point_dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// Distance floor for sampled evaluation points off the set. Derivatives
/// of the partition scale like 1/dist^|j|, so closer than this the computed
/// remainders of high-order collections are dominated by cancellation
/// noise rather than by the quantity being estimated; points of the set
/// itself are always sampled (the restriction is exact there).
pub const QUOTIENT_GUARD: f64 = 0.05;

/// Budgets of the sampled norms.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SampleBudget {
    /// Grid points per axis of the sampling box.
    pub grid_per_axis: usize,
    /// Seeded random pairs.
    pub random_pairs: usize,
    pub seed: u64,
}

impl Default for SampleBudget {
    fn default() -> Self {
        SampleBudget {
            grid_per_axis: 200,
            random_pairs: 2000,
            seed: 42,
        }
    }
}

/// Sampling points for the extension: a regular grid over the box, the set
/// itself, and near-set offsets.
fn sample_points(
    f: &WhitneyCollection,
    lo: &[f64],
    hi: &[f64],
    budget: &SampleBudget,
) -> Vec<Vec<f64>> {
    let n = f.dim();
    let mut points: Vec<Vec<f64>> = Vec::new();
    // set points first, for exact restriction
    for p in f.set().points() {
        points.push(p.clone());
    }
    if budget.grid_per_axis == 0 {
        return points;
    }
    // grid of (per + 1) points per axis at multiples of 1/per, so doubling
    // the budget refines to a superset; higher dimensions take a coarser
    // lattice with a comparable total
    let per_axis = if n == 1 {
        budget.grid_per_axis
    } else {
        ((budget.grid_per_axis as f64).powf(1.0 / n as f64).ceil() as usize).max(2)
    };
    let mut idx = vec![0usize; n];
    loop {
        let point: Vec<f64> = (0..n)
            .map(|m| lo[m] + (hi[m] - lo[m]) * idx[m] as f64 / per_axis as f64)
            .collect();
        let d = dist_to_set(&point, f.set());
        if d == 0.0 || d >= QUOTIENT_GUARD {
            points.push(point);
        }
        let mut axis = 0;
        while axis < n {
            idx[axis] += 1;
            if idx[axis] <= per_axis {
                break;
            }
            idx[axis] = 0;
            axis += 1;
        }
        if axis == n {
            break;
        }
    }
    points
}

/// Pair regimes: both endpoints in the set; one in the set, one nearby;
/// both outside, straddling a dyadic cube face at distances spanning
/// several magnitudes. A tight pair per grid point is appended so the
/// remainder quotients approach the sampled derivative sups.
fn sample_pairs(
    f: &WhitneyCollection,
    lo: &[f64],
    hi: &[f64],
    budget: &SampleBudget,
    grid: &[Vec<f64>],
) -> Vec<(Vec<f64>, Vec<f64>)> {
    let n = f.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let mut pairs = Vec::with_capacity(budget.random_pairs + grid.len());
    let npts = f.set().len();
    let random_point = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        (0..n)
            .map(|m| rng.random_range(lo[m]..=hi[m]))
            .collect::<Vec<f64>>()
    };
    while pairs.len() < budget.random_pairs {
        match pairs.len() % 3 {
            0 => {
                if npts >= 2 {
                    let a = rng.random_range(0..npts);
                    let mut b = rng.random_range(0..npts);
                    if a == b {
                        b = (b + 1) % npts;
                    }
                    pairs.push((f.set().point(a).to_vec(), f.set().point(b).to_vec()));
                } else {
                    pairs.push((f.set().point(0).to_vec(), random_point(&mut rng)));
                }
            }
            1 => {
                let a = rng.random_range(0..npts);
                let base = f.set().point(a).to_vec();
                let radius = 10f64.powf(rng.random_range(QUOTIENT_GUARD.log10()..0.0));
                let near: Vec<f64> = base
                    .iter()
                    .map(|&c| c + radius * rng.random_range(-1.0..1.0))
                    .collect();
                if dist_to_set(&near, f.set()) >= QUOTIENT_GUARD {
                    pairs.push((base, near));
                } else {
                    continue;
                }
            }
            _ => {
                let x = random_point(&mut rng);
                if dist_to_set(&x, f.set()) < QUOTIENT_GUARD {
                    continue;
                }
                // mirror across the nearest face of a covering cube, at a
                // log-uniform fraction of the distance to the face
                let y = match covering_cubes(&x, f.set()) {
                    Ok(cubes) if !cubes.is_empty() => {
                        let cube = &cubes[0];
                        let mut best_axis = 0;
                        let mut best_gap = f64::INFINITY;
                        let mut face = 0.0;
                        for m in 0..n {
                            for plane in [cube.lo(m), cube.hi(m)] {
                                let gap = (x[m] - plane).abs();
                                if gap < best_gap {
                                    best_gap = gap;
                                    best_axis = m;
                                    face = plane;
                                }
                            }
                        }
                        let shrink = 10f64.powf(rng.random_range(-4.0..0.0));
                        let mut y = x.clone();
                        y[best_axis] = face - shrink * (x[best_axis] - face);
                        y
                    }
                    _ => random_point(&mut rng),
                };
                if x != y && dist_to_set(&y, f.set()) >= QUOTIENT_GUARD {
                    pairs.push((x, y));
                }
            }
        }
    }
    // axis-aligned tight pairs at every grid point, so the remainder
    // quotients surface each top-order partial derivative
    let diag = point_dist(lo, hi).max(1e-12);
    let step = 1e-6 * diag / (n as f64).sqrt();
    for x in grid {
        if dist_to_set(x, f.set()) < QUOTIENT_GUARD {
            continue;
        }
        for axis in 0..n {
            let mut y = x.clone();
            y[axis] += step;
            pairs.push((x.clone(), y));
        }
    }
    pairs
}

/// Sampled lower bound for the norm of the extension over a box: the sup
/// part over grid and set points, the remainder part over the set-pair,
/// near-set and straddling regimes. Deterministic for a fixed seed; points
/// that hit the depth cap are skipped and counted.
pub fn lip_norm_sampled(
    f: &WhitneyCollection,
    lo: &[f64],
    hi: &[f64],
    budget: &SampleBudget,
    mode: ExecMode,
) -> Result<NormReport> {
    if budget.random_pairs == 0 && budget.grid_per_axis == 0 {
        return Err(Error::EmptySample);
    }
    let params = *f.params();
    sigma_indices(&params, &f.scale().index_set())?;
    let ext = Extender::new(f)?;
    let table = f.order_table();
    let scale = f.scale();
    let gamma = params.gamma;

    let points = sample_points(f, lo, hi, budget);
    let sup_results = exec::map_collect(mode, &points, |x| {
        let mut best: Option<SupWitness> = None;
        let mut skipped = 0usize;
        for j in table.indices() {
            match ext.eval(x, j) {
                Ok(element) => {
                    let index = params.sigma_m(multi_index::total(j));
                    let value = gamma.powi(multi_index::total(j) as i32)
                        * scale.norm(index, &element).expect("admissible index");
                    max_witness(
                        &mut best,
                        SupWitness {
                            point: x.clone(),
                            j: j.clone(),
                            value,
                        },
                        |w| w.value,
                    );
                }
                Err(Error::TooCloseToSet { .. }) => skipped += 1,
                Err(_) => skipped += 1,
            }
        }
        (best, skipped)
    });

    let pairs = sample_pairs(f, lo, hi, budget, &points);
    let rho_index = params.sigma_rho();
    let pair_results = exec::map_collect(mode, &pairs, |(x, y)| {
        let mut best: Option<RemainderWitness> = None;
        let mut skipped = 0usize;
        let gap = point_dist(x, y);
        if gap == 0.0 {
            return (best, 1);
        }
        for j in table.indices() {
            // remainder of the extension: g^(j)(x) - sum g^(j+l)(y)(x-y)^l / l!
            let remainder = (|| -> Result<crate::element::Element> {
                let mut acc = ext.eval(x, j)?;
                let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
                for l in table.indices() {
                    let jl = multi_index::add(j, l);
                    if multi_index::total(&jl) > params.k {
                        continue;
                    }
                    let weight = multi_index::monomial(&diff, l) / multi_index::multi_factorial(l);
                    acc.axpy(-weight, &ext.eval(y, &jl)?);
                }
                Ok(acc)
            })();
            match remainder {
                Ok(r) => {
                    let value = gamma.powf(params.rho)
                        * scale.norm(rho_index, &r).expect("admissible index")
                        / gap.powf(params.rho - multi_index::total(j) as f64);
                    max_witness(
                        &mut best,
                        RemainderWitness {
                            x: x.clone(),
                            y: y.clone(),
                            j: j.clone(),
                            value,
                        },
                        |w| w.value,
                    );
                }
                Err(_) => skipped += 1,
            }
        }
        (best, skipped)
    });

    let mut sup: Option<SupWitness> = None;
    let mut rem: Option<RemainderWitness> = None;
    let mut skipped = 0usize;
    for (candidate, s) in sup_results {
        skipped += s;
        if let Some(w) = candidate {
            max_witness(&mut sup, w, |w| w.value);
        }
    }
    for (candidate, s) in pair_results {
        skipped += s;
        if let Some(w) = candidate {
            max_witness(&mut rem, w, |w| w.value);
        }
    }
    Ok(NormReport::assemble(sup, rem, skipped))
}

/// Sampled derivative norm max over x and |j| <= k+1 of
/// gamma^|j| ||d^j g^(0)(x)||_(sigma_j), with the top order measured at
/// sigma_rho and evaluated off the set only. Requires rho = k + 1.
pub fn z_norm_sampled(
    f: &WhitneyCollection,
    lo: &[f64],
    hi: &[f64],
    budget: &SampleBudget,
    mode: ExecMode,
) -> Result<f64> {
    let params = *f.params();
    if params.rho != params.k as f64 + 1.0 {
        return Err(Error::RhoNotTop {
            rho: params.rho,
            k: params.k,
        });
    }
    sigma_indices(&params, &f.scale().index_set())?;
    let ext = Extender::new(f)?;
    let scale = f.scale();
    let gamma = params.gamma;
    let top_table = crate::multi_index::IndexTable::get(f.dim(), params.k + 1);
    let points = sample_points(f, lo, hi, budget);
    let values = exec::map_collect(mode, &points, |x| {
        let mut worst = 0.0f64;
        let on_set = f.set().position(x).is_some();
        for j in top_table.indices() {
            let order = multi_index::total(j);
            if order > params.k && on_set {
                continue;
            }
            if let Ok(element) = ext.eval(x, j) {
                let index = params.sigma_for_order(order);
                let value = gamma.powi(order as i32)
                    * scale.norm(index, &element).expect("admissible index");
                worst = worst.max(value);
            }
        }
        worst
    });
    Ok(values.into_iter().fold(0.0, f64::max))
}
