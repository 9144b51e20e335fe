//! Scales of Banach spaces with smoothing operators.
//!
//! A [`Scale`] describes a decreasing family of norms indexed by a real
//! parameter together with a family of smoothing operators S_theta,
//! theta >= 1, that trade regularity for powers of theta:
//!
//!   ||S_theta u||_b  <= A_ab theta^(b-a) ||u||_a        (direct)
//!   ||u - S_theta u||_a <= B_ab theta^-(b-a) ||u||_b    (complementary)
//!
//! for a <= b in the index set. The five concrete kinds implemented here are
//! the descriptors accepted verbatim in problem files.

use crate::element::Element;
use crate::error::{Error, Result};
use crate::scales;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Index set of a scale: an interval, optionally restricted to the
/// non-negative integers it contains.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexSet {
    pub lo: f64,
    /// Upper endpoint; `f64::INFINITY` for unbounded scales.
    pub hi: f64,
    pub integers_only: bool,
}

impl IndexSet {
    pub fn contains(&self, a: f64) -> bool {
        if !(self.lo <= a && a <= self.hi) {
            return false;
        }
        !self.integers_only || (a >= 0.0 && a.fract() == 0.0)
    }

    pub fn check(&self, a: f64) -> Result<()> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(Error::IndexNotAdmissible {
                index: a,
                lo: self.lo,
                hi: self.hi,
            })
        }
    }
}

/// Smoothing variant for the Sobolev torus scale.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SobolevSmoothing {
    /// Keep frequencies with `<k> <= theta`.
    BracketSharp,
    /// Keep frequencies with |k| <= theta.
    EuclidSharp,
    /// Multiply by the smooth cutoff sigma(|k| / theta).
    SmoothCutoff,
}

fn default_site_scale() -> f64 {
    1.0
}

/// Descriptor of a concrete scale.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scale {
    /// Periodic Sobolev scale: elements are finite Fourier sums on the
    /// d-torus, the norm weights mode k by `<k>^a`.
    SobolevTorus {
        dim: usize,
        smoothing: SobolevSmoothing,
        #[serde(default)]
        a0: f64,
    },
    /// Fixed Banach space: every index carries the same Euclidean norm and
    /// smoothing is the identity.
    Trivial { dim: usize },
    /// Functions with polynomial decay: the norm weights the value at site
    /// x by (1 + |x|)^a, with physical position x = site_scale * site.
    PolyDecay {
        dim: usize,
        #[serde(default = "default_site_scale")]
        site_scale: f64,
    },
    /// Sequence scale indexed by a in [0, 1] with the l^(1/a) norm;
    /// truncation provides the direct inequality but not the complementary
    /// one.
    Lp,
    /// Finite Fourier sums on the circle with C^a norms (a integer), sup
    /// norms sampled on a uniform grid, smoothed by the smooth cutoff.
    #[serde(rename = "ck_torus_1d")]
    CkTorus1d,
}

/// Grid size for the sampled sup norms of the C^k scale.
const CK_GRID: usize = 512;

impl Scale {
    pub fn index_set(&self) -> IndexSet {
        match self {
            Scale::SobolevTorus { a0, .. } => IndexSet {
                lo: *a0,
                hi: f64::INFINITY,
                integers_only: false,
            },
            Scale::Trivial { .. } | Scale::PolyDecay { .. } => IndexSet {
                lo: 0.0,
                hi: f64::INFINITY,
                integers_only: false,
            },
            Scale::Lp => IndexSet {
                lo: 0.0,
                hi: 1.0,
                integers_only: false,
            },
            Scale::CkTorus1d => IndexSet {
                lo: 0.0,
                hi: f64::INFINITY,
                integers_only: true,
            },
        }
    }

    /// Dimension of the integer sites of sparse elements (1 for the scales
    /// over sequences), or of the fixed vector for the trivial scale.
    pub fn site_dim(&self) -> usize {
        match self {
            Scale::SobolevTorus { dim, .. } | Scale::PolyDecay { dim, .. } => *dim,
            Scale::Trivial { dim } => *dim,
            Scale::Lp | Scale::CkTorus1d => 1,
        }
    }

    pub fn zero_element(&self) -> Element {
        match self {
            Scale::Trivial { dim } => Element::zero_vector(*dim),
            _ => Element::zero_modes(),
        }
    }

    /// Validates that an element matches this scale's representation.
    pub fn check_element(&self, u: &Element) -> Result<()> {
        match (self, u) {
            (Scale::Trivial { dim }, Element::Vector(v)) => {
                if v.len() != *dim {
                    Err(Error::ElementDimension {
                        expected: *dim,
                        got: v.len(),
                    })
                } else {
                    Ok(())
                }
            }
            (Scale::Trivial { .. }, _) => Err(Error::ElementKindMismatch),
            (_, Element::Vector(_)) => Err(Error::ElementKindMismatch),
            (scale, Element::Modes(m)) => {
                let d = scale.site_dim();
                for site in m.keys() {
                    if site.len() != d {
                        return Err(Error::ElementDimension {
                            expected: d,
                            got: site.len(),
                        });
                    }
                    if matches!(scale, Scale::Lp) && site[0] < 1 {
                        return Err(Error::InvalidParams(
                            "sequence sites are 1-based positive integers".into(),
                        ));
                    }
                }
                Ok(())
            }
        }
    }

    /// Norm of `u` at index `a`.
    pub fn norm(&self, a: f64, u: &Element) -> Result<f64> {
        self.index_set().check(a)?;
        self.check_element(u)?;
        Ok(match (self, u) {
            (Scale::SobolevTorus { .. }, Element::Modes(m)) => m
                .iter()
                .map(|(k, v)| v.norm_sqr() * scales::sobolev_weight(k, 2.0 * a))
                .sum::<f64>()
                .sqrt(),
            (Scale::Trivial { .. }, Element::Vector(v)) => {
                v.iter().map(|x| x * x).sum::<f64>().sqrt()
            }
            (Scale::PolyDecay { site_scale, .. }, Element::Modes(m)) => m
                .iter()
                .map(|(site, v)| {
                    let r = site_norm(site, *site_scale);
                    (1.0 + r).powf(a) * v.norm()
                })
                .fold(0.0, f64::max),
            (Scale::Lp, Element::Modes(m)) => {
                if a == 0.0 {
                    m.values().map(|v| v.norm()).fold(0.0, f64::max)
                } else {
                    let p = 1.0 / a;
                    m.values().map(|v| v.norm().powf(p)).sum::<f64>().powf(a)
                }
            }
            (Scale::CkTorus1d, Element::Modes(m)) => {
                ck_grid_sups(m, a as usize).into_iter().fold(0.0, f64::max)
            }
            _ => unreachable!("kind checked above"),
        })
    }

    /// Applies the smoothing operator S_theta.
    pub fn smooth(&self, theta: f64, u: &Element) -> Result<Element> {
        if !(theta >= 1.0) {
            return Err(Error::ThetaOutOfRange(theta));
        }
        self.check_element(u)?;
        Ok(match (self, u) {
            (Scale::Trivial { .. }, Element::Vector(v)) => Element::Vector(v.clone()),
            (Scale::SobolevTorus { smoothing, .. }, Element::Modes(m)) => {
                let kept = m.iter().filter_map(|(k, v)| {
                    let factor = match smoothing {
                        SobolevSmoothing::BracketSharp => {
                            if scales::sobolev_weight(k, 1.0) <= theta {
                                1.0
                            } else {
                                0.0
                            }
                        }
                        SobolevSmoothing::EuclidSharp => {
                            if site_norm(k, 1.0) <= theta {
                                1.0
                            } else {
                                0.0
                            }
                        }
                        SobolevSmoothing::SmoothCutoff => {
                            scales::cutoff_eval(site_norm(k, 1.0) / theta)
                        }
                    };
                    if factor == 0.0 {
                        None
                    } else {
                        Some((k.clone(), v * factor))
                    }
                });
                Element::from_modes(kept)
            }
            (Scale::PolyDecay { site_scale, .. }, Element::Modes(m)) => Element::from_modes(
                m.iter()
                    .filter(|(site, _)| 1.0 + site_norm(site, *site_scale) <= theta)
                    .map(|(site, v)| (site.clone(), *v)),
            ),
            (Scale::Lp, Element::Modes(m)) => Element::from_modes(
                m.iter()
                    .filter(|(site, _)| site[0] as f64 <= theta)
                    .map(|(site, v)| (site.clone(), *v)),
            ),
            (Scale::CkTorus1d, Element::Modes(m)) => {
                Element::from_modes(m.iter().filter_map(|(k, v)| {
                    let factor = scales::cutoff_eval(k[0] as f64 / theta);
                    if factor == 0.0 {
                        None
                    } else {
                        Some((k.clone(), v * factor))
                    }
                }))
            }
            _ => unreachable!("kind checked above"),
        })
    }

    /// Known constants (A_ab, B_ab) of the two smoothing inequalities, for
    /// a <= b. `None` where no closed form is declared (C^k scale); the
    /// sequence scale declares A only.
    pub fn declared_constants(&self, a: f64, b: f64) -> (Option<f64>, Option<f64>) {
        debug_assert!(a <= b);
        match self {
            Scale::SobolevTorus { smoothing, .. } => match smoothing {
                SobolevSmoothing::BracketSharp => (Some(1.0), Some(1.0)),
                SobolevSmoothing::EuclidSharp => (Some(2f64.powf((b - a) / 2.0)), Some(1.0)),
                // support within |k| <= theta gives the same direct constant
                // as the sharp Euclidean cut; modes below theta/2 pass
                // unchanged, hence the complementary constant 2^(b-a)
                SobolevSmoothing::SmoothCutoff => {
                    (Some(2f64.powf((b - a) / 2.0)), Some(2f64.powf(b - a)))
                }
            },
            Scale::Trivial { .. } => (Some(1.0), Some(1.0)),
            Scale::PolyDecay { .. } => (Some(1.0), Some(1.0)),
            Scale::Lp => (Some(1.0), None),
            Scale::CkTorus1d => (None, None),
        }
    }

    /// Constant of the interpolation inequality
    /// ||u||_b <= C ||u||_a^((c-b)/(c-a)) ||u||_c^((b-a)/(c-a)) built from
    /// the declared smoothing constants; the sequence scale interpolates
    /// with constant 1 directly.
    pub fn interpolation_constant(&self, a: f64, b: f64, c: f64) -> Option<f64> {
        debug_assert!(a <= b && b <= c);
        if matches!(self, Scale::Lp) {
            return Some(1.0);
        }
        if c == a {
            // all three norms coincide
            return Some(2.0);
        }
        let (a_ab, _) = self.declared_constants(a, b);
        let (_, b_bc) = self.declared_constants(b, c);
        match (a_ab, b_bc) {
            (Some(aa), Some(bb)) => {
                let t = (c - b) / (c - a);
                Some(2.0 * aa.powf(t) * bb.powf(1.0 - t))
            }
            _ => None,
        }
    }

    /// Constant of the smoothing-difference bound
    /// ||(S_t1 - S_t2) u||_b <= C max(t1, t2)^(b-a) ||u||_a, any a, b.
    pub fn difference_constant(&self, a: f64, b: f64) -> Option<f64> {
        if matches!(self, Scale::Lp) {
            // support of the difference multiplier has at most max(theta)
            // entries of modulus <= 1, so the direct argument applies as is
            return Some(1.0);
        }
        let p = a.min(b);
        let q = a.max(b);
        let (a_pq, b_pq) = self.declared_constants(p, q);
        let (a_pp, b_pp) = self.declared_constants(p, p);
        let (a_qq, b_qq) = self.declared_constants(q, q);
        match (a_pq, b_pq, a_pp, b_pp, a_qq, b_qq) {
            (Some(a_pq), Some(b_pq), Some(a_pp), Some(b_pp), Some(a_qq), Some(b_qq)) => {
                Some((b_pq * a_pp.max(a_qq)).max(a_pq * b_pp.max(b_qq)))
            }
            _ => None,
        }
    }

    /// Seeded random finitely-supported element; at most 32 sites with
    /// frequencies bounded by 64.
    pub fn random_element<R: Rng>(&self, rng: &mut R) -> Element {
        const MAX_SITES: usize = 32;
        const MAX_FREQ: i64 = 64;
        match self {
            Scale::Trivial { dim } => {
                Element::Vector((0..*dim).map(|_| rng.random_range(-1.0..1.0)).collect())
            }
            _ => {
                let d = self.site_dim();
                let count = rng.random_range(1..=MAX_SITES);
                let mut map = BTreeMap::new();
                for _ in 0..count {
                    let site: Vec<i64> = match self {
                        Scale::Lp => vec![rng.random_range(1..=MAX_FREQ)],
                        _ => (0..d)
                            .map(|_| rng.random_range(-MAX_FREQ..=MAX_FREQ))
                            .collect(),
                    };
                    let value =
                        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                    map.insert(site, value);
                }
                Element::Modes(map)
            }
        }
    }
}

fn site_norm(site: &[i64], scale: f64) -> f64 {
    (site.iter().map(|&s| (s as f64) * (s as f64)).sum::<f64>()).sqrt() * scale
}

/// Sampled sups of the derivatives of orders 0..=top of a finite Fourier
/// sum on the circle; derivatives are exact via the (ik)^m multipliers,
/// only the sup is sampled. The grid phases e^(ik 2 pi t / N) are exact
/// roots of unity, looked up by k t mod N.
fn ck_grid_sups(modes: &BTreeMap<Vec<i64>, Complex64>, top: usize) -> Vec<f64> {
    static ROOTS: std::sync::OnceLock<Vec<Complex64>> = std::sync::OnceLock::new();
    let roots = ROOTS.get_or_init(|| {
        (0..CK_GRID)
            .map(|t| Complex64::new(0.0, 2.0 * PI * t as f64 / CK_GRID as f64).exp())
            .collect()
    });
    // multipliers (ik)^m per mode and order
    let weighted: Vec<(i64, Vec<Complex64>)> = modes
        .iter()
        .map(|(site, v)| {
            let k = site[0];
            let mut per_order = Vec::with_capacity(top + 1);
            let mut w = *v;
            for _ in 0..=top {
                per_order.push(w);
                w *= Complex64::new(0.0, k as f64);
            }
            (k, per_order)
        })
        .collect();
    let mut sups = vec![0.0f64; top + 1];
    let n = CK_GRID as i64;
    for t in 0..CK_GRID as i64 {
        let mut acc = vec![Complex64::ZERO; top + 1];
        for (k, per_order) in &weighted {
            let phase = roots[((k * t).rem_euclid(n)) as usize];
            for (m, w) in per_order.iter().enumerate() {
                acc[m] += w * phase;
            }
        }
        for (m, a) in acc.iter().enumerate() {
            sups[m] = sups[m].max(a.norm());
        }
    }
    sups
}
