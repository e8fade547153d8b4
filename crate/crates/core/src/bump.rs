//! Smooth compactly supported cutoff generators.
//!
//! One profile object feeds every cutoff in the crate: the radial step
//! `chi` behind the frequency projectors and dyadic shells, and the bump
//! `eta` behind the concentrated test family. Keeping a single definition
//! makes measured constants comparable across experiments.

/// `exp(-1/x)` extended by zero to x ≤ 0; the germ of every C^∞ step.
fn smooth_germ(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

/// C^∞ step rising from 0 at x ≤ 0 to 1 at x ≥ 1.
fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let g = smooth_germ(x);
    g / (g + smooth_germ(1.0 - x))
}

/// Generators for the smooth cutoffs `chi` and `eta`.
#[derive(Debug, Clone)]
pub struct BumpProfile {
    /// `chi(r) = 1` for |r| ≤ `chi_inner`.
    pub chi_inner: f64,
    /// `chi(r) = 0` for |r| ≥ `chi_outer`.
    pub chi_outer: f64,
    /// `eta` is supported in (-`eta_half_width`, `eta_half_width`).
    pub eta_half_width: f64,
}

impl Default for BumpProfile {
    fn default() -> Self {
        BumpProfile {
            chi_inner: 1.0,
            chi_outer: 2.0,
            eta_half_width: 0.5,
        }
    }
}

impl BumpProfile {
    /// Radial cutoff: 1 on [0, inner], 0 beyond outer, smooth monotone
    /// bridge in between.
    pub fn chi(&self, r: f64) -> f64 {
        let a = r.abs();
        if a <= self.chi_inner {
            1.0
        } else if a >= self.chi_outer {
            0.0
        } else {
            smooth_step((self.chi_outer - a) / (self.chi_outer - self.chi_inner))
        }
    }

    /// C^∞ bump with `eta(0) = 1`, supported in the open interval
    /// (-half_width, half_width).
    pub fn eta(&self, x: f64) -> f64 {
        let u = x / self.eta_half_width;
        if u.abs() >= 1.0 {
            0.0
        } else {
            (1.0 - 1.0 / (1.0 - u * u)).exp()
        }
    }
}
