//! Numerical laboratory for space-time (Strichartz-type) estimates of the
//! periodic Schrödinger evolution with the non-elliptic operator
//! `P = -∂x² + ∂y²` on the 2-torus.
//!
//! The crate is organised in layers:
//!
//! * [`spectral`] — truncated Fourier representation of functions on T¹/T²,
//!   transforms, and the L^q / H^s / mixed L^p_t L^q norms.
//! * [`propagator`] — exact multiplier evolution for the non-elliptic and
//!   elliptic operators, smooth frequency projectors and the dyadic
//!   (Littlewood-Paley) family.
//! * [`kernel`] — explicit evaluation of the frequency-localised 1D
//!   propagator kernel and its dispersive-decay profile.
//! * [`families`] — the concentrated bump family `η(λx)` and its stationary
//!   two-dimensional lift `f(x+y)`, with closed-form norm ratios.
//! * [`extremizer`] — operator-norm (best-constant) estimation by random
//!   probing and gradient ascent on the H^s unit sphere.
//! * [`experiments`] — the E1..E6 sweep runners behind the CLI.
//! * [`output`] — deterministic CSV/JSON/plot-data persistence.

pub mod bump;
pub mod error;
pub mod experiments;
pub mod extremizer;
pub mod families;
pub mod kernel;
pub mod output;
pub mod propagator;
pub mod spectral;
pub mod util;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
