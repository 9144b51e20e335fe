//! Whitney decomposition of the complement of a finite point set into dyadic
//! cubes, expanded cubes, nearest anchor points and the smooth partition of
//! unity with jet-valued derivatives.
//!
//! The decomposition is queried lazily: for a point x of the complement,
//! only the handful of dyadic levels whose diameters are comparable to
//! dist(x, F) can carry a cube whose expanded copy contains x, and within a
//! level only the 3^n corners adjacent to x are candidates.

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::scales;
use serde::{Deserialize, Serialize};

/// Queries closer to the set than this fail loudly instead of silently
/// losing precision.
pub const MIN_DIST: f64 = 1.0 / (1u64 << 40) as f64;

/// Deepest dyadic level ever enumerated; covers every query with
/// dist(x, F) >= 2^-40 in dimension <= 3.
const LEVEL_CAP: i32 = 44;

/// A finite closed set: non-empty list of pairwise distinct points.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedSet {
    points: Vec<Vec<f64>>,
}

impl ClosedSet {
    pub fn new(points: Vec<Vec<f64>>) -> Result<ClosedSet> {
        if points.is_empty() {
            return Err(Error::InvalidClosedSet);
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(Error::InvalidClosedSet);
        }
        for p in &points {
            if p.len() != dim || p.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidClosedSet);
            }
        }
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                if points[i] == points[j] {
                    return Err(Error::InvalidClosedSet);
                }
            }
        }
        Ok(ClosedSet { points })
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, idx: usize) -> &[f64] {
        &self.points[idx]
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.points.iter().any(|p| p.as_slice() == x)
    }

    pub fn position(&self, x: &[f64]) -> Option<usize> {
        self.points.iter().position(|p| p.as_slice() == x)
    }
}

/// Euclidean distance from x to the nearest point of F.
pub fn dist_to_set(x: &[f64], f: &ClosedSet) -> f64 {
    f.points
        .iter()
        .map(|p| dist(x, p))
        .fold(f64::INFINITY, f64::min)
}

fn dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// Closed dyadic cube of side 2^-level with integer corner: the product of
/// the intervals [2^-level * corner_m, 2^-level * (corner_m + 1)].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicCube {
    pub level: i32,
    pub corner: Vec<i64>,
}

impl DyadicCube {
    pub fn new(level: i32, corner: Vec<i64>) -> DyadicCube {
        DyadicCube { level, corner }
    }

    pub fn dim(&self) -> usize {
        self.corner.len()
    }

    pub fn side(&self) -> f64 {
        2f64.powi(-self.level)
    }

    pub fn half_side(&self) -> f64 {
        2f64.powi(-self.level - 1)
    }

    /// Diameter 2^-level * sqrt(n); exact power-of-two scaling of sqrt(n).
    pub fn diam(&self) -> f64 {
        self.side() * (self.dim() as f64).sqrt()
    }

    /// Expansion margin of the expanded cube: 1 + 1/(8 sqrt(n)).
    pub fn expansion_factor(&self) -> f64 {
        1.0 + 1.0 / (8.0 * (self.dim() as f64).sqrt())
    }

    pub fn center(&self) -> Vec<f64> {
        let side = self.side();
        self.corner
            .iter()
            .map(|&a| (a as f64 + 0.5) * side)
            .collect()
    }

    pub fn lo(&self, axis: usize) -> f64 {
        self.corner[axis] as f64 * self.side()
    }

    pub fn hi(&self, axis: usize) -> f64 {
        (self.corner[axis] as f64 + 1.0) * self.side()
    }

    /// The dyadic cube one level coarser containing this cube.
    pub fn parent(&self) -> DyadicCube {
        DyadicCube {
            level: self.level - 1,
            corner: self.corner.iter().map(|&a| a.div_euclid(2)).collect(),
        }
    }

    /// Whether the expanded cube (same center, dilated by the expansion
    /// factor) contains x.
    pub fn expanded_contains(&self, x: &[f64]) -> bool {
        let reach = self.expansion_factor() * self.half_side();
        let center = self.center();
        x.iter()
            .zip(&center)
            .all(|(xi, ci)| (xi - ci).abs() <= reach)
    }

    /// Exact point-to-cube distance (zero inside).
    pub fn dist_to_point(&self, y: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (axis, &yi) in y.iter().enumerate() {
            let lo = self.lo(axis);
            let hi = self.hi(axis);
            let gap = (lo - yi).max(yi - hi).max(0.0);
            acc += gap * gap;
        }
        acc.sqrt()
    }

    pub fn dist_to_set(&self, f: &ClosedSet) -> f64 {
        f.points
            .iter()
            .map(|p| self.dist_to_point(p))
            .fold(f64::INFINITY, f64::min)
    }

    /// Whether the open interiors intersect; for dyadic cubes this happens
    /// exactly when one contains the other, checked in integer arithmetic.
    pub fn interior_intersects(&self, other: &DyadicCube) -> bool {
        let (coarse, fine) = if self.level <= other.level {
            (self, other)
        } else {
            (other, self)
        };
        let shift = (fine.level - coarse.level) as u32;
        if shift >= 63 {
            return false;
        }
        fine.corner
            .iter()
            .zip(&coarse.corner)
            .all(|(&b, &a)| b.div_euclid(1 << shift) == a)
    }

    /// Closed-box intersection test against an axis-aligned box.
    pub fn intersects_box(&self, lo: &[f64], hi: &[f64]) -> bool {
        (0..self.dim()).all(|m| self.lo(m) <= hi[m] && self.hi(m) >= lo[m])
    }
}

/// Maximal dyadic cube predicate: the cube's diameter is dominated by its
/// distance to F while its parent's is not. Accepted cubes tile the
/// complement with diam <= dist <= 4 diam.
pub fn accept_cube(cube: &DyadicCube, f: &ClosedSet) -> bool {
    if cube.diam() > cube.dist_to_set(f) {
        return false;
    }
    let parent = cube.parent();
    parent.diam() > parent.dist_to_set(f)
}

/// Point of F nearest to the cube; ties broken by lexicographically
/// smallest coordinates.
pub fn nearest_anchor(cube: &DyadicCube, f: &ClosedSet) -> Vec<f64> {
    f.point(nearest_anchor_index(cube, f)).to_vec()
}

/// Index into the point list of the nearest anchor.
pub fn nearest_anchor_index(cube: &DyadicCube, f: &ClosedSet) -> usize {
    let mut best: Option<(f64, usize)> = None;
    for (idx, p) in f.points().iter().enumerate() {
        let d = cube.dist_to_point(p);
        best = match best {
            None => Some((d, idx)),
            Some((bd, bi)) => {
                if d < bd || (d == bd && lex_less(p, f.point(bi))) {
                    Some((d, idx))
                } else {
                    Some((bd, bi))
                }
            }
        };
    }
    best.expect("closed set is non-empty").1
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}

/// All accepted cubes whose expanded cube contains x, sorted by (level,
/// corner). Non-empty for every admissible query, of size at most 12^n.
pub fn covering_cubes(x: &[f64], f: &ClosedSet) -> Result<Vec<DyadicCube>> {
    if x.len() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: x.len(),
        });
    }
    let d = dist_to_set(x, f);
    if d == 0.0 {
        return Err(Error::PointOnSet);
    }
    if d < MIN_DIST {
        return Err(Error::TooCloseToSet { dist: d });
    }
    let n = f.dim();
    let sqrt_n = (n as f64).sqrt();
    // levels whose diameter q = 2^-k sqrt(n) can satisfy d/6 <= q <= 2d
    let k_lo = (sqrt_n / (2.0 * d)).log2().floor() as i32 - 1;
    let k_hi = (6.0 * sqrt_n / d).log2().ceil() as i32 + 1;
    if k_hi > LEVEL_CAP {
        return Err(Error::TooCloseToSet { dist: d });
    }
    let mut out = Vec::new();
    for level in k_lo..=k_hi {
        let q = 2f64.powi(-level) * sqrt_n;
        if !(q >= d / 6.0 && q <= 2.0 * d) {
            continue;
        }
        let scale = 2f64.powi(level);
        let mut base = Vec::with_capacity(n);
        for &xi in x {
            let scaled = xi * scale;
            if scaled.abs() >= (1u64 << 62) as f64 {
                return Err(Error::CoordinateOverflow);
            }
            base.push(scaled.floor() as i64);
        }
        // 3^n corner candidates around x
        let mut offsets = vec![0i64; n];
        loop {
            let corner: Vec<i64> = base
                .iter()
                .zip(&offsets)
                .map(|(&b, &o)| b + o - 1)
                .collect();
            let cube = DyadicCube::new(level, corner);
            if cube.expanded_contains(x) && accept_cube(&cube, f) {
                out.push(cube);
            }
            // odometer over {0, 1, 2}^n
            let mut carry = 0;
            while carry < n {
                offsets[carry] += 1;
                if offsets[carry] < 3 {
                    break;
                }
                offsets[carry] = 0;
                carry += 1;
            }
            if carry == n {
                break;
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Partition-of-unity jets at x: for each covering cube, the order-`order`
/// jet of its normalized bump. The jets sum to the constant-one jet.
pub fn partition_jets(x: &[f64], f: &ClosedSet, order: usize) -> Result<Vec<(DyadicCube, Jet)>> {
    let cubes = covering_cubes(x, f)?;
    partition_jets_for(&cubes, x, order)
}

/// Partition jets for an already-computed covering set. Bumps of cubes
/// whose expanded cube does not reach x are identically zero near x, so the
/// covering set carries the full local sum.
pub fn partition_jets_for(
    cubes: &[DyadicCube],
    x: &[f64],
    order: usize,
) -> Result<Vec<(DyadicCube, Jet)>> {
    let n = x.len();
    let mut bumps = Vec::with_capacity(cubes.len());
    for cube in cubes {
        bumps.push((cube.clone(), cube_bump_jet(cube, x, order)?));
    }
    let mut total = Jet::zero(n, order);
    for (_, b) in &bumps {
        total = total.add(b)?;
    }
    debug_assert!(total.value() >= 1.0 - 1e-12, "bump sum below 1 at {x:?}");
    bumps
        .into_iter()
        .map(|(cube, b)| Ok((cube, b.div(&total)?)))
        .collect()
}

/// Jet of the unnormalized bump of one cube at x: the product over
/// coordinates of the shoulder profile in (x_m - center_m) / half_side.
fn cube_bump_jet(cube: &DyadicCube, x: &[f64], order: usize) -> Result<Jet> {
    let n = x.len();
    let center = cube.center();
    let r = cube.half_side();
    let eps = cube.expansion_factor() - 1.0;
    let mut acc = Jet::constant(n, order, 1.0);
    for m in 0..n {
        let t = Jet::variable(x, m, order)?
            .add_constant(-center[m])
            .scale(1.0 / r);
        acc = acc.mul(&scales::bump_jet(&t, eps)?)?;
    }
    Ok(acc)
}

/// Scalar value of the normalized bump of `cube` at x, given the covering
/// set of x.
pub fn partition_value(cubes: &[DyadicCube], cube: &DyadicCube, x: &[f64]) -> f64 {
    let bump = |c: &DyadicCube| -> f64 {
        let center = c.center();
        let r = c.half_side();
        let eps = c.expansion_factor() - 1.0;
        x.iter()
            .zip(&center)
            .map(|(xi, ci)| scales::bump_eval((xi - ci) / r, eps))
            .product()
    };
    let total: f64 = cubes.iter().map(&bump).sum();
    bump(cube) / total
}

/// All accepted cubes intersecting the closed box `[lo, hi]`, up to the
/// depth cap. Returns the cubes sorted by (level, corner) and a flag that
/// is true when the enumeration was truncated at the cap (which happens
/// exactly when the box touches F).
pub fn decompose_box(f: &ClosedSet, lo: &[f64], hi: &[f64]) -> Result<(Vec<DyadicCube>, bool)> {
    let n = f.dim();
    if lo.len() != n || hi.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: lo.len().max(hi.len()),
        });
    }
    if lo.iter().zip(hi).any(|(a, b)| !(a <= b)) {
        return Err(Error::InvalidParams("box must satisfy lo <= hi".into()));
    }
    let sqrt_n = (n as f64).sqrt();
    // Upper bound on dist(., F) over the box via the center point.
    let center: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect();
    let half_diag = dist(lo, hi) / 2.0;
    let d_max = dist_to_set(&center, f) + half_diag;
    if d_max == 0.0 {
        // degenerate box on a point of the set
        return Ok((Vec::new(), true));
    }
    // Accepted cubes meeting the box have diameter <= dist(Q, F) <= d_max.
    let coarsest = ((sqrt_n / d_max).log2().floor() as i32 - 1).min(40);
    // Below the box's distance to F, no accepted cube can reach the box.
    let d_box = box_dist_to_set(lo, hi, f);
    let deepest = if d_box > 0.0 {
        (((5.0 * sqrt_n / d_box).log2().ceil() as i32) + 1).min(40)
    } else {
        40
    };

    let mut out = Vec::new();
    let mut truncated = false;
    for level in coarsest..=deepest {
        let scale = 2f64.powi(level);
        let q = 2f64.powi(-level) * sqrt_n;
        let mut candidates = std::collections::BTreeSet::new();
        // cubes over the box, when few enough
        let mut count: f64 = 1.0;
        for m in 0..n {
            count *= (hi[m] - lo[m]) * scale + 2.0;
        }
        if count <= 200_000.0 {
            let ranges: Vec<(i64, i64)> = (0..n)
                .map(|m| {
                    let a = (lo[m] * scale).floor() as i64 - 1;
                    let b = (hi[m] * scale).floor() as i64 + 1;
                    (a, b)
                })
                .collect();
            enumerate_corners(&ranges, &mut candidates);
        }
        // cubes near the set: accepted cubes at this level stay within
        // 5 q of F
        for p in f.points() {
            let reach = 5.0 * q;
            let ranges: Vec<(i64, i64)> = (0..n)
                .map(|m| {
                    let a = ((p[m] - reach) * scale).floor() as i64 - 1;
                    let b = ((p[m] + reach) * scale).floor() as i64 + 1;
                    (a, b)
                })
                .collect();
            enumerate_corners(&ranges, &mut candidates);
        }
        for corner in candidates {
            let cube = DyadicCube::new(level, corner);
            if cube.intersects_box(lo, hi) && accept_cube(&cube, f) {
                out.push(cube);
            }
        }
        if level == deepest && d_box == 0.0 {
            truncated = true;
        }
    }
    out.sort();
    out.dedup();
    Ok((out, truncated))
}

fn box_dist_to_set(lo: &[f64], hi: &[f64], f: &ClosedSet) -> f64 {
    f.points()
        .iter()
        .map(|p| {
            let mut acc = 0.0;
            for m in 0..p.len() {
                let gap = (lo[m] - p[m]).max(p[m] - hi[m]).max(0.0);
                acc += gap * gap;
            }
            acc.sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}

fn enumerate_corners(ranges: &[(i64, i64)], out: &mut std::collections::BTreeSet<Vec<i64>>) {
    let n = ranges.len();
    let mut current = ranges.iter().map(|&(a, _)| a).collect::<Vec<_>>();
    loop {
        out.insert(current.clone());
        let mut axis = 0;
        while axis < n {
            current[axis] += 1;
            if current[axis] <= ranges[axis].1 {
                break;
            }
            current[axis] = ranges[axis].0;
            axis += 1;
        }
        if axis == n {
            break;
        }
    }
}

/// Covering-multiplicity bound 12^n.
pub fn covering_bound(n: usize) -> usize {
    12usize.pow(n as u32)
}
