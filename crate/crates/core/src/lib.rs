//! Whitney extension operators for scales of Banach spaces with smoothing
//! operators.
//!
//! Given a finite closed set F in R^n and a Whitney-differentiable
//! collection f = {f^(j)} of scale elements on F, the library constructs
//! the extension g on all of R^n, computes the decreasing-regularity
//! Lipschitz norms, and verifies the inequalities the construction rests
//! on: the smoothing axioms of the scale, the dyadic-cube geometry, the
//! partition-of-unity bounds, the algebraic decompositions of g near F,
//! and the impossibility of smoothing on the l^p sequence scale.
//!
//! The sampling campaigns are data-parallel over rayon by default; build
//! with `--no-default-features` for a fully sequential library.

pub mod axioms;
pub mod collection;
pub mod element;
pub mod error;
pub mod exec;
pub mod extension;
pub mod jet;
pub mod lipnorm;
pub mod multi_index;
pub mod nosmoothing;
pub mod scale;
pub mod scales;
pub mod whitney;

pub use collection::{LipParams, WhitneyCollection};
pub use element::Element;
pub use error::{Error, Result};
pub use exec::ExecMode;
pub use extension::{extend_eval, theta_for_cube, Extender};
pub use jet::Jet;
pub use scale::{IndexSet, Scale, SobolevSmoothing};
pub use whitney::{ClosedSet, DyadicCube};
