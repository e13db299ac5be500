//! Fourier bridge between mode functions and spectral amplitudes,
//! `ζ(t) = (2π)^{-1/2} ∫dω Φ(ω) e^{-iωt}`.
//!
//! When the frequency grid is the FFT conjugate of the time grid
//! (`N` points on both sides, `Δω·Δt·N = 2π`) the transforms are an exact
//! discrete pair and round trips reproduce the samples to rounding error.
//! Other grid combinations fall back to direct trapezoid summation.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};

use super::{par_map_indices, ModeFunction, TimeGrid, GAUSSIAN_MARGIN};
use crate::error::{Error, Result};

/// Uniform angular-frequency grid `omega_min + k·spacing`, `k < n_points`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmegaGrid {
    omega_min: f64,
    spacing: f64,
    n_points: usize,
}

impl OmegaGrid {
    pub fn new(omega_min: f64, spacing: f64, n_points: usize) -> Result<Self> {
        if !omega_min.is_finite() || !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "frequency grid needs finite origin and positive spacing (got {omega_min}, {spacing})"
            )));
        }
        if n_points < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 frequencies, got {n_points}")));
        }
        Ok(OmegaGrid {
            omega_min,
            spacing,
            n_points,
        })
    }

    /// FFT-conjugate of `grid`, with `center` on the node of index `N/2`.
    pub fn conjugate_to(grid: &TimeGrid, center: f64) -> Self {
        let n = grid.len();
        let spacing = 2.0 * PI / (n as f64 * grid.spacing());
        OmegaGrid {
            omega_min: center - (n / 2) as f64 * spacing,
            spacing,
            n_points: n,
        }
    }

    pub fn omega_min(&self) -> f64 {
        self.omega_min
    }

    pub fn omega_max(&self) -> f64 {
        self.point(self.n_points - 1)
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn point(&self, k: usize) -> f64 {
        self.omega_min + k as f64 * self.spacing
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n_points).map(move |k| self.point(k))
    }

    fn trapezoid_weight(&self, k: usize) -> f64 {
        if k == 0 || k + 1 == self.n_points {
            0.5 * self.spacing
        } else {
            self.spacing
        }
    }

    /// Whether `grid` and `self` form an exact discrete Fourier pair.
    pub fn is_conjugate_to(&self, grid: &TimeGrid) -> bool {
        self.n_points == grid.len()
            && ((self.spacing * grid.spacing() * self.n_points as f64) / (2.0 * PI) - 1.0).abs()
                < 1e-10
    }
}

/// Time grid conjugate to `omega`, centred on `center`.
pub fn conjugate_time_grid(omega: &OmegaGrid, center: f64) -> TimeGrid {
    let dt = 2.0 * PI / (omega.len() as f64 * omega.spacing());
    TimeGrid::centered(center, dt, omega.len()).expect("conjugate grid is well formed")
}

/// Sampled spectral amplitude `Φ(ω)`, normalized so that `∫|Φ|²dω = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralAmplitude {
    grid: OmegaGrid,
    amplitudes: Arc<[Complex64]>,
    renormalization: f64,
}

impl SpectralAmplitude {
    /// Renormalizes `amplitudes` to unit norm; rejects all-zero input.
    pub fn new(grid: OmegaGrid, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                actual: amplitudes.len(),
            });
        }
        let norm_sq: f64 = amplitudes
            .iter()
            .enumerate()
            .map(|(k, a)| grid.trapezoid_weight(k) * a.norm_sqr())
            .sum();
        if !(norm_sq > 0.0) || !norm_sq.is_finite() {
            return Err(Error::NotNormalizable);
        }
        let factor = norm_sq.sqrt().recip();
        Ok(SpectralAmplitude {
            grid,
            amplitudes: amplitudes.into_iter().map(|a| a * factor).collect(),
            renormalization: factor,
        })
    }

    pub fn grid(&self) -> &OmegaGrid {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn renormalization(&self) -> f64 {
        self.renormalization
    }

    pub fn norm_sq(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(k, a)| self.grid.trapezoid_weight(k) * a.norm_sqr())
            .sum()
    }

    /// Width of the frequency interval where `|Φ|²` exceeds 1e-12 of its peak.
    fn occupied_bandwidth(&self) -> f64 {
        let peak = self.amplitudes.iter().map(|a| a.norm_sqr()).fold(0.0, f64::max);
        let threshold = 1e-12 * peak;
        let first = self.amplitudes.iter().position(|a| a.norm_sqr() > threshold);
        let last = self.amplitudes.iter().rposition(|a| a.norm_sqr() > threshold);
        match (first, last) {
            (Some(f), Some(l)) => (l - f) as f64 * self.grid.spacing,
            _ => 0.0,
        }
    }
}

/// Spectral amplitude `Φ(ω) = (2π)^{-1/2} ∫dt ζ(t) e^{iωt}` of `mode` on `omega`.
///
/// Sampled modes on a grid conjugate to `omega` and all analytic modes use
/// the FFT; other sampled modes are summed directly, which requires
/// `Δω · (time window) ≤ 2π` so the inverse does not wrap around.
pub fn to_spectrum(mode: &ModeFunction, omega: &OmegaGrid) -> Result<SpectralAmplitude> {
    match mode {
        ModeFunction::Gaussian(g) => {
            let grid = conjugate_time_grid(omega, g.center);
            if grid.span() < 2.0 * GAUSSIAN_MARGIN {
                return Err(Error::AliasingRisk(format!(
                    "frequency spacing {} leaves a time window of only {:.3}",
                    omega.spacing(),
                    grid.span()
                )));
            }
            let samples = mode.sample(&grid);
            SpectralAmplitude::new(*omega, dft_time_to_frequency(&samples, &grid, omega))
        }
        ModeFunction::Sampled(s) => {
            let grid = s.grid();
            if omega.is_conjugate_to(grid) {
                return SpectralAmplitude::new(
                    *omega,
                    dft_time_to_frequency(s.amplitudes(), grid, omega),
                );
            }
            if omega.spacing() * grid.span() > 2.0 * PI * (1.0 + 1e-9) {
                return Err(Error::AliasingRisk(format!(
                    "frequency spacing {} cannot resolve a time window of {}",
                    omega.spacing(),
                    grid.span()
                )));
            }
            let amps = s.amplitudes();
            let scale = (2.0 * PI).sqrt().recip();
            let values = par_map_indices(omega.len(), |k| {
                let w = omega.point(k);
                let sum: Complex64 = amps
                    .iter()
                    .enumerate()
                    .map(|(j, a)| {
                        a * Complex64::from_polar(grid.trapezoid_weight(j), w * grid.point(j))
                    })
                    .sum();
                sum * scale
            });
            SpectralAmplitude::new(*omega, values)
        }
    }
}

/// Inverse transform of `spectrum` onto `grid`, giving a sampled mode.
///
/// Errors with [`Error::AliasingRisk`] when the occupied bandwidth exceeds
/// the Nyquist band `2π/Δt` of `grid`, or when `grid` is longer than the
/// period `2π/Δω` of the band-limited reconstruction.
pub fn from_spectrum(spectrum: &SpectralAmplitude, grid: &TimeGrid) -> Result<ModeFunction> {
    let omega = spectrum.grid();
    if omega.is_conjugate_to(grid) {
        let samples = dft_frequency_to_time(spectrum.amplitudes(), omega, grid);
        return ModeFunction::from_samples(*grid, samples);
    }
    let bandwidth = spectrum.occupied_bandwidth();
    if bandwidth * grid.spacing() > 2.0 * PI {
        return Err(Error::AliasingRisk(format!(
            "occupied bandwidth {bandwidth:.4} exceeds the Nyquist band {:.4} of the time grid",
            2.0 * PI / grid.spacing()
        )));
    }
    if grid.span() * omega.spacing() > 2.0 * PI * (1.0 + 1e-9) {
        return Err(Error::AliasingRisk(format!(
            "time window {} exceeds the reconstruction period {:.4}",
            grid.span(),
            2.0 * PI / omega.spacing()
        )));
    }
    let amps = spectrum.amplitudes();
    let scale = (2.0 * PI).sqrt().recip();
    let samples = par_map_indices(grid.len(), |j| {
        let t = grid.point(j);
        let sum: Complex64 = amps
            .iter()
            .enumerate()
            .map(|(k, a)| a * Complex64::from_polar(omega.trapezoid_weight(k), -omega.point(k) * t))
            .sum();
        sum * scale
    });
    ModeFunction::from_samples(*grid, samples)
}

// Φ_k = Δt/√(2π) · e^{iω₀t₀} e^{ik·Δω·t₀} · Σ_j [ζ_j e^{iω₀·j·Δt}] e^{+2πi·jk/N}
fn dft_time_to_frequency(samples: &[Complex64], grid: &TimeGrid, omega: &OmegaGrid) -> Vec<Complex64> {
    let n = samples.len();
    let (t0, dt) = (grid.t_min(), grid.spacing());
    let (w0, dw) = (omega.omega_min(), omega.spacing());
    let mut buf: Vec<Complex64> = samples
        .iter()
        .enumerate()
        .map(|(j, z)| z * Complex64::from_polar(1.0, w0 * j as f64 * dt))
        .collect();
    FftPlanner::new()
        .plan_fft(n, FftDirection::Inverse)
        .process(&mut buf);
    let scale = dt / (2.0 * PI).sqrt();
    buf.iter()
        .enumerate()
        .map(|(k, v)| v * Complex64::from_polar(scale, w0 * t0 + k as f64 * dw * t0))
        .collect()
}

// ζ_j = Δω/√(2π) · e^{-iω₀t₀} e^{-iω₀·j·Δt} · Σ_k [Φ_k e^{-ik·Δω·t₀}] e^{-2πi·jk/N}
fn dft_frequency_to_time(amplitudes: &[Complex64], omega: &OmegaGrid, grid: &TimeGrid) -> Vec<Complex64> {
    let n = amplitudes.len();
    let (t0, dt) = (grid.t_min(), grid.spacing());
    let (w0, dw) = (omega.omega_min(), omega.spacing());
    let mut buf: Vec<Complex64> = amplitudes
        .iter()
        .enumerate()
        .map(|(k, a)| a * Complex64::from_polar(1.0, -(k as f64) * dw * t0))
        .collect();
    FftPlanner::new()
        .plan_fft(n, FftDirection::Forward)
        .process(&mut buf);
    let scale = dw / (2.0 * PI).sqrt();
    buf.iter()
        .enumerate()
        .map(|(j, v)| v * Complex64::from_polar(scale, -w0 * t0 - w0 * j as f64 * dt))
        .collect()
}
