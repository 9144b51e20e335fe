//! Vectors of the scale spaces.
//!
//! Elements are either finitely supported maps from integer sites (Fourier
//! frequencies, sequence indices, decay sites) to complex values, or plain
//! real vectors for the trivial scale. All arithmetic is exact coefficient
//! arithmetic; norms and smoothing live on [`crate::scale::Scale`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// One entry of a sparse element, used for (de)serialization.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Mode {
    pub site: Vec<i64>,
    pub re: f64,
    pub im: f64,
}

/// An element of a scale space.
#[derive(Clone, Debug, PartialEq)]
pub enum Element {
    /// Finitely supported map site -> complex value. Sites are integer
    /// vectors of the dimension declared by the scale.
    Modes(BTreeMap<Vec<i64>, Complex64>),
    /// Fixed real vector (trivial scale).
    Vector(Vec<f64>),
}

impl Element {
    pub fn zero_modes() -> Element {
        Element::Modes(BTreeMap::new())
    }

    pub fn zero_vector(dim: usize) -> Element {
        Element::Vector(vec![0.0; dim])
    }

    pub fn from_modes(entries: impl IntoIterator<Item = (Vec<i64>, Complex64)>) -> Element {
        let mut map = BTreeMap::new();
        for (site, value) in entries {
            if value != Complex64::ZERO {
                *map.entry(site).or_insert(Complex64::ZERO) += value;
            }
        }
        Element::Modes(map)
    }

    /// Single-site element c * e_site.
    pub fn unit(site: Vec<i64>, value: Complex64) -> Element {
        Element::from_modes([(site, value)])
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Element::Modes(m) => m.values().all(|v| *v == Complex64::ZERO),
            Element::Vector(v) => v.iter().all(|x| *x == 0.0),
        }
    }

    pub fn scale(&self, factor: f64) -> Element {
        match self {
            Element::Modes(m) => {
                Element::Modes(m.iter().map(|(k, v)| (k.clone(), v * factor)).collect())
            }
            Element::Vector(v) => Element::Vector(v.iter().map(|x| x * factor).collect()),
        }
    }

    /// self += factor * other. Panics on mixed representations; the scale
    /// validates element kinds before arithmetic ever mixes them.
    pub fn axpy(&mut self, factor: f64, other: &Element) {
        match (self, other) {
            (Element::Modes(a), Element::Modes(b)) => {
                for (site, value) in b {
                    *a.entry(site.clone()).or_insert(Complex64::ZERO) += factor * value;
                }
            }
            (Element::Vector(a), Element::Vector(b)) => {
                assert_eq!(a.len(), b.len(), "vector elements of different length");
                for (x, y) in a.iter_mut().zip(b) {
                    *x += factor * y;
                }
            }
            _ => panic!("mixed element representations"),
        }
    }

    pub fn add(&self, other: &Element) -> Element {
        let mut out = self.clone();
        out.axpy(1.0, other);
        out
    }

    pub fn sub(&self, other: &Element) -> Element {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    /// Number of stored sites (vector length for the trivial scale).
    pub fn support_len(&self) -> usize {
        match self {
            Element::Modes(m) => m.len(),
            Element::Vector(v) => v.len(),
        }
    }

    /// Drop exactly-zero stored entries of a sparse element.
    pub fn prune(&mut self) {
        if let Element::Modes(m) = self {
            m.retain(|_, v| *v != Complex64::ZERO);
        }
    }
}

// Serialized form: {"modes": [...]} or {"vector": [...]}.
#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum ElementRepr {
    Modes(Vec<Mode>),
    Vector(Vec<f64>),
}

impl Serialize for Element {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let repr = match self {
            Element::Modes(m) => ElementRepr::Modes(
                m.iter()
                    .map(|(site, v)| Mode {
                        site: site.clone(),
                        re: v.re,
                        im: v.im,
                    })
                    .collect(),
            ),
            Element::Vector(v) => ElementRepr::Vector(v.clone()),
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = ElementRepr::deserialize(deserializer)?;
        Ok(match repr {
            ElementRepr::Modes(modes) => Element::from_modes(
                modes
                    .into_iter()
                    .map(|m| (m.site, Complex64::new(m.re, m.im))),
            ),
            ElementRepr::Vector(v) => Element::Vector(v),
        })
    }
}
