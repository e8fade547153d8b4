//! Exact Fourier-multiplier evolution and smooth frequency projectors.
//!
//! The evolution `u(t) = e^{-itP} u₀` acts diagonally: the coefficient at
//! lattice point k is multiplied by `e^{-it·sym(k)}` where `sym` is the
//! symbol of the generator written in the `e^{-itP}` slot:
//!
//! * non-elliptic `P = -∂x² + ∂y²`  →  `sym = m² - n²` (vanishes on the
//!   diagonal, so profiles `f(x+y)` are stationary);
//! * elliptic `e^{itΔ}` (i.e. `P = -Δ`)  →  `sym = m² + n²`;
//! * half-line evolutions `e^{±it∂²}` on T¹  →  `sym = ±k²`.

use crate::bump::BumpProfile;
use crate::error::{Error, Result};
use crate::spectral::{synthesize, Dim, FrequencyIndex, GridSpec, PhysicalField, SpectralField};
use crate::C64;

/// Memory budget for materialized trajectories, in complex scalars.
const TRAJECTORY_BUDGET: usize = 1 << 27;

/// Which diagonal evolution to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvolutionKind {
    /// `(i∂t + ∂x² - ∂y²) u = 0` on T².
    NonElliptic2d,
    /// `(i∂t + ∂x² + ∂y²) u = 0` on T².
    Elliptic2d,
    /// `e^{+it∂²}` on T¹.
    Line1dPlus,
    /// `e^{-it∂²}` on T¹.
    Line1dMinus,
}

impl EvolutionKind {
    pub fn dim(self) -> Dim {
        match self {
            EvolutionKind::NonElliptic2d | EvolutionKind::Elliptic2d => Dim::Two,
            EvolutionKind::Line1dPlus | EvolutionKind::Line1dMinus => Dim::One,
        }
    }

    /// Value in the `e^{-it·sym}` slot at a lattice point.
    pub fn symbol(self, k: FrequencyIndex) -> f64 {
        match (self, k) {
            (EvolutionKind::NonElliptic2d, FrequencyIndex::Two { m, n }) => (m * m - n * n) as f64,
            (EvolutionKind::Elliptic2d, FrequencyIndex::Two { m, n }) => (m * m + n * n) as f64,
            (EvolutionKind::Line1dPlus, FrequencyIndex::One(m)) => (m * m) as f64,
            (EvolutionKind::Line1dMinus, FrequencyIndex::One(m)) => -((m * m) as f64),
            _ => panic!("evolution kind applied to a lattice of the wrong dimension"),
        }
    }
}

/// A real multiplier tabulated over the truncated lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiplierSymbol {
    n: usize,
    dim: Dim,
    values: Vec<f64>,
}

impl MultiplierSymbol {
    pub fn from_fn(n: usize, dim: Dim, f: impl Fn(FrequencyIndex) -> f64) -> Self {
        let probe = SpectralField::zeros(n, dim);
        let mut values = vec![0.0; probe.coeffs().len()];
        for (idx, k) in probe.modes() {
            let v = f(k);
            assert!(v.is_finite(), "multiplier value not finite at {k:?}");
            values[idx] = v;
        }
        MultiplierSymbol { n, dim, values }
    }

    pub fn identity(n: usize, dim: Dim) -> Self {
        MultiplierSymbol::from_fn(n, dim, |_| 1.0)
    }

    pub fn truncation(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Pointwise product (projector composition is diagonal).
    pub fn product(&self, other: &MultiplierSymbol) -> Result<MultiplierSymbol> {
        if self.n != other.n || self.dim != other.dim {
            return Err(Error::config("multiplier lattices do not match"));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .collect();
        Ok(MultiplierSymbol {
            n: self.n,
            dim: self.dim,
            values,
        })
    }

    /// Boolean support mask over the lattice.
    pub fn support_mask(&self) -> Vec<bool> {
        self.values.iter().map(|&v| v != 0.0).collect()
    }

    /// Largest |k|∞ carrying a nonzero value, if any.
    pub fn support_radius(&self) -> Option<i64> {
        let probe = SpectralField::zeros(self.n, self.dim);
        probe
            .modes()
            .filter(|(idx, _)| self.values[*idx] != 0.0)
            .map(|(_, k)| k.sup_abs())
            .max()
    }
}

/// Coefficient-wise product with a tabulated multiplier.
pub fn apply_multiplier(f: &SpectralField, sym: &MultiplierSymbol) -> Result<SpectralField> {
    if sym.n != f.truncation() || sym.dim != f.dim() {
        return Err(Error::config(format!(
            "multiplier tabulated on N={} ({:?}) applied to field N={} ({:?})",
            sym.n,
            sym.dim,
            f.truncation(),
            f.dim()
        )));
    }
    let coeffs = f
        .coeffs()
        .iter()
        .zip(&sym.values)
        .map(|(c, &v)| c * v)
        .collect();
    SpectralField::from_coeffs(f.truncation(), f.dim(), coeffs)
}

/// Apply `e^{-it·sym}` coefficient-wise; unitary on ℓ², exact to roundoff.
pub fn evolve(f: &SpectralField, t: f64, kind: EvolutionKind) -> Result<SpectralField> {
    if kind.dim() != f.dim() {
        return Err(Error::config(format!(
            "evolution kind {kind:?} applied to a {:?}-dimensional field",
            f.dim()
        )));
    }
    let mut out = f.clone();
    for (idx, k) in f.modes() {
        let phase = C64::from_polar(1.0, -t * kind.symbol(k));
        out.coeffs_mut()[idx] = f.coeffs()[idx] * phase;
    }
    Ok(out)
}

/// Midpoint times covering [0, window] with `slices` samples.
pub fn midpoint_times(window: f64, slices: usize) -> impl Iterator<Item = f64> {
    let dt = window / slices as f64;
    (0..slices).map(move |k| (k as f64 + 0.5) * dt)
}

/// Stream the sampled evolution one slice at a time (the memory-safe path).
pub fn trajectory_for_each(
    f: &SpectralField,
    g: &GridSpec,
    kind: EvolutionKind,
    window: f64,
    slices: usize,
    mut visit: impl FnMut(usize, &PhysicalField) -> Result<()>,
) -> Result<()> {
    for (k, t) in midpoint_times(window, slices).enumerate() {
        let slice = synthesize(&evolve(f, t, kind)?, g)?;
        visit(k, &slice)?;
    }
    Ok(())
}

/// Materialize the evolution on the midpoint grid of `g` over [0, 1].
///
/// Fails with a resource error when `M_t · M_x^d` exceeds the memory
/// budget; callers should then fall back to [`trajectory_for_each`].
pub fn trajectory(
    f: &SpectralField,
    g: &GridSpec,
    kind: EvolutionKind,
) -> Result<Vec<PhysicalField>> {
    let per_slice = g.m_x.pow(f.dim().exponent());
    if g.m_t.saturating_mul(per_slice) > TRAJECTORY_BUDGET {
        return Err(Error::resource(format!(
            "trajectory of {} slices × {} samples exceeds the memory budget; \
             use the streaming interface",
            g.m_t, per_slice
        )));
    }
    let mut out = Vec::with_capacity(g.m_t);
    trajectory_for_each(f, g, kind, 1.0, g.m_t, |_, slice| {
        out.push(slice.clone());
        Ok(())
    })?;
    Ok(out)
}

/// Semiclassical projector symbols at scale h:
/// `φ(h²Δ)` tabulated as `chi(h²(m²+n²))`, and the pair
/// `ψ(h²∂x²), ψ(h²∂y²)` with `ψ(r) = chi(|r|/4)`, so that `ψ = 1` on the
/// square containing supp φ and `ψ_x·ψ_y·φ = φ` holds exactly.
pub fn build_phi_psi(
    h: f64,
    n: usize,
    profile: &BumpProfile,
) -> Result<(MultiplierSymbol, MultiplierSymbol, MultiplierSymbol)> {
    if !(h > 0.0 && h <= 1.0) {
        return Err(Error::domain(format!("scale h must lie in (0, 1], got {h}")));
    }
    let h2 = h * h;
    let phi2d = MultiplierSymbol::from_fn(n, Dim::Two, |k| profile.chi(h2 * k.norm_sq() as f64));
    let psi_x = MultiplierSymbol::from_fn(n, Dim::Two, |k| match k {
        FrequencyIndex::Two { m, .. } => profile.chi(h2 * (m * m) as f64 / 4.0),
        _ => unreachable!(),
    });
    let psi_y = MultiplierSymbol::from_fn(n, Dim::Two, |k| match k {
        FrequencyIndex::Two { n, .. } => profile.chi(h2 * (n * n) as f64 / 4.0),
        _ => unreachable!(),
    });
    Ok((phi2d, psi_x, psi_y))
}

/// Largest |k| the symbol `ψ(-h²k²)` can reach (`ψ(r) = chi(|r|/4)`
/// vanishes for |r| ≥ 8, i.e. beyond |k| = 2√2/h).
pub fn psi_support_radius(h: f64) -> usize {
    (2.0 * 2.0_f64.sqrt() / h).ceil() as usize
}

/// Dyadic shell multipliers θ_0, θ_1, ..., θ_J with
/// `θ_0 = chi(|k|)`, `θ_j = chi(2^{-j}|k|) - chi(2^{-j+1}|k|)` and
/// `J = ⌈log₂N⌉ + 1`, summing to 1 exactly on the whole lattice.
pub fn lp_family(n: usize, dim: Dim, profile: &BumpProfile) -> Vec<MultiplierSymbol> {
    let j_max = (n.max(1) as f64).log2().ceil() as i32 + 1;
    let mut shells = Vec::with_capacity(j_max as usize + 1);
    shells.push(MultiplierSymbol::from_fn(n, dim, |k| {
        profile.chi((k.norm_sq() as f64).sqrt())
    }));
    for j in 1..=j_max {
        let scale = (2.0_f64).powi(-j);
        shells.push(MultiplierSymbol::from_fn(n, dim, |k| {
            let r = (k.norm_sq() as f64).sqrt();
            profile.chi(scale * r) - profile.chi(2.0 * scale * r)
        }));
    }
    shells
}
