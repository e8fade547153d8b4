//! Truncated Fourier representation on T¹ and T², transforms between
//! coefficient and sample space, and the norms everything else is built on.
//!
//! Conventions, fixed once for the whole crate:
//!
//! * synthesis: `u(x) = Σ_{|k|∞ ≤ N} ĉ(k) e^{i k·x}`, symmetric truncation
//!   (odd side length 2N+1, no unpaired Nyquist mode);
//! * `analyze ∘ synthesize = id` on band-limited fields whenever
//!   `M_x ≥ 2N+1`;
//! * `‖f‖_{H^s}² = (2π)^d Σ_k (1+|k|²)^s |ĉ(k)|²`, so `H⁰ = L²` exactly;
//! * spatial quadrature is the rectangle rule with weight `(2π/M_x)^d`
//!   (spectrally accurate for smooth periodic integrands, exact to
//!   roundoff for even q with `M_x ≥ qN+1`);
//! * time quadrature is the midpoint rule on a uniform grid.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::error::{Error, Result};
use crate::C64;

pub const TAU: f64 = std::f64::consts::TAU;

/// Spatial dimension tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dim {
    One,
    Two,
}

impl Dim {
    pub fn exponent(self) -> u32 {
        match self {
            Dim::One => 1,
            Dim::Two => 2,
        }
    }
}

/// A point of the truncated frequency lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrequencyIndex {
    One(i64),
    Two { m: i64, n: i64 },
}

impl FrequencyIndex {
    /// |k|² (Euclidean).
    pub fn norm_sq(self) -> i64 {
        match self {
            FrequencyIndex::One(m) => m * m,
            FrequencyIndex::Two { m, n } => m * m + n * n,
        }
    }

    /// |k|∞.
    pub fn sup_abs(self) -> i64 {
        match self {
            FrequencyIndex::One(m) => m.abs(),
            FrequencyIndex::Two { m, n } => m.abs().max(n.abs()),
        }
    }
}

/// Complex Fourier coefficients on the symmetric lattice {-N..N}^d.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    n: usize,
    dim: Dim,
    coeffs: Vec<C64>,
}

/// Number of lattice points per axis.
fn side(n: usize) -> usize {
    2 * n + 1
}

impl SpectralField {
    pub fn zeros(n: usize, dim: Dim) -> Self {
        let len = side(n).pow(dim.exponent());
        SpectralField {
            n,
            dim,
            coeffs: vec![C64::new(0.0, 0.0); len],
        }
    }

    /// Wrap an existing coefficient array; length must be (2N+1)^d and all
    /// entries finite.
    pub fn from_coeffs(n: usize, dim: Dim, coeffs: Vec<C64>) -> Result<Self> {
        let expect = side(n).pow(dim.exponent());
        if coeffs.len() != expect {
            return Err(Error::config(format!(
                "coefficient array has length {}, lattice needs {}",
                coeffs.len(),
                expect
            )));
        }
        if !coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::domain("non-finite coefficient"));
        }
        Ok(SpectralField { n, dim, coeffs })
    }

    pub fn truncation(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [C64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C64> {
        self.coeffs
    }

    fn index_1d(&self, m: i64) -> usize {
        debug_assert!(m.unsigned_abs() as usize <= self.n);
        (m + self.n as i64) as usize
    }

    fn index_2d(&self, m: i64, n: i64) -> usize {
        debug_assert!(m.unsigned_abs() as usize <= self.n);
        debug_assert!(n.unsigned_abs() as usize <= self.n);
        let s = side(self.n) as i64;
        ((m + self.n as i64) * s + (n + self.n as i64)) as usize
    }

    /// Coefficient at a lattice point (1D fields ignore `n`).
    pub fn coeff(&self, m: i64, n: i64) -> C64 {
        match self.dim {
            Dim::One => self.coeffs[self.index_1d(m)],
            Dim::Two => self.coeffs[self.index_2d(m, n)],
        }
    }

    pub fn set_coeff(&mut self, m: i64, n: i64, value: C64) {
        let idx = match self.dim {
            Dim::One => self.index_1d(m),
            Dim::Two => self.index_2d(m, n),
        };
        self.coeffs[idx] = value;
    }

    /// Iterate (flat index, lattice point).
    pub fn modes(&self) -> impl Iterator<Item = (usize, FrequencyIndex)> + '_ {
        let n = self.n as i64;
        let s = side(self.n);
        let dim = self.dim;
        (0..self.coeffs.len()).map(move |idx| {
            let k = match dim {
                Dim::One => FrequencyIndex::One(idx as i64 - n),
                Dim::Two => FrequencyIndex::Two {
                    m: (idx / s) as i64 - n,
                    n: (idx % s) as i64 - n,
                },
            };
            (idx, k)
        })
    }

    /// Zero-pad onto a larger lattice (used for warm-started sweeps).
    pub fn embedded(&self, bigger_n: usize) -> Result<SpectralField> {
        if bigger_n < self.n {
            return Err(Error::config(format!(
                "cannot embed truncation {} into smaller truncation {}",
                self.n, bigger_n
            )));
        }
        let mut out = SpectralField::zeros(bigger_n, self.dim);
        for (idx, k) in self.modes() {
            match k {
                FrequencyIndex::One(m) => out.set_coeff(m, 0, self.coeffs[idx]),
                FrequencyIndex::Two { m, n } => out.set_coeff(m, n, self.coeffs[idx]),
            }
        }
        Ok(out)
    }

    /// Σ|ĉ|² without the (2π)^d factor.
    pub fn coeff_energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Discretization parameters: spatial samples per axis and midpoint time
/// samples on [0, 1].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub n: usize,
    pub m_x: usize,
    pub m_t: usize,
    pub oversample: f64,
}

/// Smallest 5-smooth integer ≥ n (sizes rustfft handles without Bluestein).
pub fn next_fast_len(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for p in [2usize, 3, 5] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

/// Build a grid: `M_x` is the smallest fast transform size at or above
/// `oversample·(2N+1)`, and `M_t = max(16, ⌈c·N²⌉)` resolves the maximal
/// phase rate N² of the evolution multipliers.
pub fn make_grid(n: usize, oversample: f64, time_factor: f64) -> Result<GridSpec> {
    if n < 1 {
        return Err(Error::domain("truncation N must be at least 1"));
    }
    if !(oversample >= 1.0) {
        return Err(Error::domain("oversample must be ≥ 1"));
    }
    if !(time_factor >= 1.0) {
        return Err(Error::domain("time resolution factor must be ≥ 1"));
    }
    let target = (oversample * side(n) as f64).ceil();
    let m_t_f = (time_factor * (n * n) as f64).ceil().max(16.0);
    if target > 1e8 || m_t_f > 1e9 {
        return Err(Error::resource(format!(
            "requested grid sizes overflow the budget (M_x target {target}, M_t {m_t_f})"
        )));
    }
    Ok(GridSpec {
        n,
        m_x: next_fast_len(target as usize),
        m_t: m_t_f as usize,
        oversample,
    })
}

/// Complex samples on the uniform grid x_j = 2πj/M_x (tensor grid in 2D).
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalField {
    m_x: usize,
    dim: Dim,
    samples: Vec<C64>,
}

impl PhysicalField {
    pub fn from_samples(m_x: usize, dim: Dim, samples: Vec<C64>) -> Result<Self> {
        let expect = m_x.pow(dim.exponent());
        if samples.len() != expect {
            return Err(Error::config(format!(
                "sample array has length {}, grid needs {}",
                samples.len(),
                expect
            )));
        }
        Ok(PhysicalField { m_x, dim, samples })
    }

    pub fn m_x(&self) -> usize {
        self.m_x
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }
}

// ---------------------------------------------------------------------------
// FFT engine
// ---------------------------------------------------------------------------

type PlanKey = (usize, bool); // (len, is_inverse)

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    static PLANS: OnceLock<Mutex<HashMap<PlanKey, Arc<dyn Fft<f64>>>>> = OnceLock::new();
    let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("fft plan cache poisoned");
    map.entry((len, inverse))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            let dir = if inverse {
                FftDirection::Inverse
            } else {
                FftDirection::Forward
            };
            planner.plan_fft(len, dir)
        })
        .clone()
}

/// In-place unnormalized DFT along the last axis of a row-major buffer.
fn fft_rows(buf: &mut [Complex64], row_len: usize, inverse: bool) {
    let fft = plan(row_len, inverse);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for row in buf.chunks_exact_mut(row_len) {
        fft.process_with_scratch(row, &mut scratch);
    }
}

fn transpose_square(buf: &mut [Complex64], m: usize) {
    for i in 0..m {
        for j in (i + 1)..m {
            buf.swap(i * m + j, j * m + i);
        }
    }
}

/// Unnormalized inverse DFT on a flat buffer, 1D or 2D (square).
pub(crate) fn idft_in_place(buf: &mut [Complex64], m: usize, dim: Dim) {
    match dim {
        Dim::One => fft_rows(buf, m, true),
        Dim::Two => {
            fft_rows(buf, m, true);
            transpose_square(buf, m);
            fft_rows(buf, m, true);
            transpose_square(buf, m);
        }
    }
}

pub(crate) fn dft_in_place(buf: &mut [Complex64], m: usize, dim: Dim) {
    match dim {
        Dim::One => fft_rows(buf, m, false),
        Dim::Two => {
            fft_rows(buf, m, false);
            transpose_square(buf, m);
            fft_rows(buf, m, false);
            transpose_square(buf, m);
        }
    }
}

fn wrap(k: i64, m: usize) -> usize {
    k.rem_euclid(m as i64) as usize
}

/// Scatter lattice coefficients into an M^d FFT buffer (wavenumber buckets).
pub(crate) fn scatter_coeffs(f: &SpectralField, m: usize, buf: &mut [Complex64]) {
    buf.fill(Complex64::new(0.0, 0.0));
    let n = f.n as i64;
    match f.dim {
        Dim::One => {
            for (idx, k) in f.coeffs.iter().enumerate() {
                let mode = idx as i64 - n;
                buf[wrap(mode, m)] = *k;
            }
        }
        Dim::Two => {
            let s = side(f.n);
            for (idx, k) in f.coeffs.iter().enumerate() {
                let mm = (idx / s) as i64 - n;
                let nn = (idx % s) as i64 - n;
                buf[wrap(mm, m) * m + wrap(nn, m)] = *k;
            }
        }
    }
}

/// Evaluate the trigonometric polynomial on the uniform grid.
///
/// Exact up to roundoff: the samples are `u(x_j) = Σ ĉ(k) e^{i k x_j}`.
pub fn synthesize(f: &SpectralField, g: &GridSpec) -> Result<PhysicalField> {
    if g.n != f.n {
        return Err(Error::config(format!(
            "grid truncation {} does not match field truncation {}",
            g.n, f.n
        )));
    }
    if g.m_x < side(f.n) {
        return Err(Error::config(format!(
            "grid M_x = {} is below alias-free size 2N+1 = {}",
            g.m_x,
            side(f.n)
        )));
    }
    let m = g.m_x;
    let mut buf = vec![Complex64::new(0.0, 0.0); m.pow(f.dim.exponent())];
    scatter_coeffs(f, m, &mut buf);
    idft_in_place(&mut buf, m, f.dim);
    PhysicalField::from_samples(m, f.dim, buf)
}

/// Recover coefficients from samples; left inverse of [`synthesize`] on
/// band-limited input (requires `M_x ≥ 2N+1`).
pub fn analyze(u: &PhysicalField, g: &GridSpec) -> Result<SpectralField> {
    if u.m_x != g.m_x {
        return Err(Error::config(format!(
            "sample grid {} does not match grid spec M_x {}",
            u.m_x, g.m_x
        )));
    }
    if g.m_x < side(g.n) {
        return Err(Error::config(format!(
            "analyze needs M_x ≥ 2N+1 (got M_x = {}, N = {})",
            g.m_x, g.n
        )));
    }
    let m = g.m_x;
    let mut buf = u.samples.clone();
    dft_in_place(&mut buf, m, u.dim);
    let scale = 1.0 / (m as f64).powi(u.dim.exponent() as i32);
    let mut out = SpectralField::zeros(g.n, u.dim);
    let n = g.n as i64;
    match u.dim {
        Dim::One => {
            for mode in -n..=n {
                out.set_coeff(mode, 0, buf[wrap(mode, m)] * scale);
            }
        }
        Dim::Two => {
            for mm in -n..=n {
                for nn in -n..=n {
                    out.set_coeff(mm, nn, buf[wrap(mm, m) * m + wrap(nn, m)] * scale);
                }
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------------

/// Σ |u_j|^q over samples, dispatched on the shape of q.
pub(crate) fn power_sum(samples: &[C64], q: f64) -> f64 {
    if (q - 2.0).abs() < 1e-14 {
        return samples.iter().map(|u| u.norm_sqr()).sum();
    }
    let q_half = q / 2.0;
    if q_half.fract() == 0.0 && q_half <= 16.0 {
        let e = q_half as i32;
        samples.iter().map(|u| u.norm_sqr().powi(e)).sum()
    } else {
        samples.iter().map(|u| u.norm_sqr().powf(q_half)).sum()
    }
}

/// Rectangle-rule L^q norm with weight (2π/M_x)^d.
pub fn lq_norm(u: &PhysicalField, q: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::domain(format!("L^q norm needs q ≥ 1, got {q}")));
    }
    let d = u.dim.exponent() as i32;
    let weight = (TAU / u.m_x as f64).powi(d);
    Ok((weight * power_sum(&u.samples, q)).powf(1.0 / q))
}

/// Sobolev norm ((2π)^d Σ (1+|k|²)^s |ĉ|²)^{1/2}; coincides with the L²
/// norm of the synthesis at s = 0.
pub fn hs_norm(f: &SpectralField, s: f64) -> f64 {
    let d = f.dim.exponent() as i32;
    let factor = TAU.powi(d);
    let sum: f64 = if s == 0.0 {
        f.coeff_energy()
    } else {
        f.modes()
            .map(|(idx, k)| (1.0 + k.norm_sq() as f64).powf(s) * f.coeffs[idx].norm_sqr())
            .sum()
    };
    (factor * sum).sqrt()
}

/// Midpoint-rule mixed norm `(Σ_k dt · ‖u(t_k)‖_q^p)^{1/p}`.
///
/// Callers sampling the full window [0, 1] pass `dt = 1/M_t`; a window of
/// length T_w sampled with S slices passes `dt = T_w/S`.
pub fn mixed_norm(traj: &[PhysicalField], p: f64, q: f64, dt: f64) -> Result<f64> {
    if traj.is_empty() {
        return Err(Error::domain("mixed norm of an empty trajectory"));
    }
    if !(p >= 1.0) {
        return Err(Error::domain(format!("mixed norm needs p ≥ 1, got {p}")));
    }
    if !(dt > 0.0) {
        return Err(Error::domain("time weight must be positive"));
    }
    let mut acc = 0.0;
    for u in traj {
        acc += dt * lq_norm(u, q)?.powf(p);
    }
    Ok(acc.powf(1.0 / p))
}
