//! Explicit kernels of the frequency-localised half-line propagators and
//! their dispersive-decay profile.
//!
//! With `ψ(r) = chi(|r|/4)`, the kernel of `ψ(h²∂x²) e^{+it∂x²}` is
//! translation invariant:
//!
//! `K₁(t, z) = (2π)⁻¹ Σ_n ψ(-h²n²) e^{-itn²} e^{inz}`
//!
//! and the companion `K₂` (kernel of `ψ(h²∂y²) e^{-it∂y²}`) is `K₁(-t, ·)`.
//! The 2D kernel of the localised non-elliptic propagator factorises as
//! `K = K₁·K₂`, so its sup is the product of the 1D sups.

use crate::bump::BumpProfile;
use crate::error::{Error, Result};
use crate::propagator::psi_support_radius;
use crate::spectral::{next_fast_len, synthesize, Dim, GridSpec, SpectralField};
use crate::C64;

/// Tabulated values of K₁(t, ·) on the uniform z-grid `z_j = 2πj/Z`.
#[derive(Clone, Debug)]
pub struct KernelTable {
    pub h: f64,
    pub t: f64,
    /// Frequency truncation used for the sum; at least the support radius
    /// of `ψ(-h²n²)`, so no mass is clipped.
    pub n_max: usize,
    values: Vec<C64>,
}

impl KernelTable {
    pub fn zgrid_size(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn value_at(&self, j: usize) -> C64 {
        self.values[j]
    }

    /// sup_z |K(t, z)| over the tabulated grid.
    pub fn sup_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Default z-grid: four points per kernel mode, rounded to a fast size.
pub fn default_zgrid(h: f64) -> usize {
    next_fast_len(4 * (2 * psi_support_radius(h) + 1))
}

/// Tabulate K₁(t, ·).
pub fn kernel_1d(t: f64, h: f64, profile: &BumpProfile, zgrid_size: usize) -> Result<KernelTable> {
    if !(h > 0.0 && h <= 1.0) {
        return Err(Error::domain(format!("scale h must lie in (0, 1], got {h}")));
    }
    let n_max = psi_support_radius(h);
    if zgrid_size < 4 * (2 * n_max + 1) {
        return Err(Error::config(format!(
            "z-grid of {zgrid_size} points is too coarse for kernel truncation {n_max} \
             (need at least {})",
            4 * (2 * n_max + 1)
        )));
    }
    let mut coeffs = SpectralField::zeros(n_max, Dim::One);
    let inv_tau = 1.0 / crate::spectral::TAU;
    for m in -(n_max as i64)..=(n_max as i64) {
        let weight = profile.chi(h * h * (m * m) as f64 / 4.0);
        if weight != 0.0 {
            let phase = C64::from_polar(1.0, -t * (m * m) as f64);
            coeffs.set_coeff(m, 0, phase * weight * inv_tau);
        }
    }
    let grid = GridSpec {
        n: n_max,
        m_x: zgrid_size,
        m_t: 1,
        oversample: zgrid_size as f64 / (2 * n_max + 1) as f64,
    };
    let table = synthesize(&coeffs, &grid)?;
    Ok(KernelTable {
        h,
        t,
        n_max,
        values: table.samples().to_vec(),
    })
}

/// `sup |K(t)| = sup|K₁(t)| · sup|K₂(t)|` by tensorisation, with
/// `K₂(t) = K₁(-t)`.
pub fn kernel_2d_sup(t: f64, h: f64, profile: &BumpProfile) -> Result<f64> {
    let z = default_zgrid(h);
    let k1 = kernel_1d(t, h, profile, z)?;
    let k2 = kernel_1d(-t, h, profile, z)?;
    Ok(k1.sup_abs() * k2.sup_abs())
}

/// One point of a dispersive-decay scan.
#[derive(Clone, Copy, Debug)]
pub struct DispersiveRecord {
    pub t: f64,
    pub sup_k1: f64,
    /// `|t|^{1/2} · sup|K₁(t)|`; flat in t exactly where the semiclassical
    /// dispersive bound is active.
    pub scaled: f64,
}

/// Scan `sup|K₁(t, ·)|` over the given times.
pub fn dispersive_profile(
    h: f64,
    t_points: &[f64],
    profile: &BumpProfile,
) -> Result<Vec<DispersiveRecord>> {
    if t_points.is_empty() {
        return Err(Error::domain("dispersive profile needs at least one time"));
    }
    if t_points.iter().any(|&t| !(t > 0.0 && t <= 1.0)) {
        return Err(Error::domain("dispersive profile times must lie in (0, 1]"));
    }
    let z = default_zgrid(h);
    t_points
        .iter()
        .map(|&t| {
            let sup = kernel_1d(t, h, profile, z)?.sup_abs();
            Ok(DispersiveRecord {
                t,
                sup_k1: sup,
                scaled: t.abs().sqrt() * sup,
            })
        })
        .collect()
}

/// Log-spaced times in [h²/10, h], the window probed by the decay scans.
pub fn decay_scan_times(h: f64, count: usize) -> Vec<f64> {
    let lo = (h * h / 10.0).ln();
    let hi = h.ln();
    (0..count)
        .map(|i| {
            let s = if count == 1 {
                0.5
            } else {
                i as f64 / (count - 1) as f64
            };
            (lo + s * (hi - lo)).exp()
        })
        .collect()
}

/// Empirical semiclassical window fraction α̂: the largest β such that, for
/// every h in the sweep, `|t|^{1/2} sup|K₁|` stays below twice its median
/// over `t ≤ βh`.
///
/// Candidates are the t/h ratios present in the profiles; a candidate needs
/// at least four points per h so the median is meaningful.
pub fn estimate_alpha_hat(profiles: &[(f64, Vec<DispersiveRecord>)]) -> f64 {
    let mut ratios: Vec<f64> = profiles
        .iter()
        .flat_map(|(h, recs)| recs.iter().map(move |r| r.t / h))
        .collect();
    ratios.sort_by(|a, b| b.total_cmp(a));
    ratios.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    let admissible = |beta: f64| -> bool {
        for (h, recs) in profiles {
            let mut window: Vec<f64> = recs
                .iter()
                .filter(|r| r.t <= beta * h * (1.0 + 1e-12))
                .map(|r| r.scaled)
                .collect();
            if window.len() < 4 {
                return false;
            }
            window.sort_by(f64::total_cmp);
            let median = window[window.len() / 2];
            let max = window.last().copied().unwrap_or(0.0);
            if max > 2.0 * median {
                return false;
            }
        }
        true
    };

    for &beta in &ratios {
        if admissible(beta) {
            return beta;
        }
    }
    // Fall back to the smallest ratio that still leaves a median.
    ratios.last().copied().unwrap_or(0.25)
}
