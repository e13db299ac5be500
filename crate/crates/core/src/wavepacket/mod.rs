//! Normalized single-photon mode functions `ζ(t) = ε(t)·exp(-iφ(t))`.
//!
//! The beam splitter sits at `z = 0`, so every mode is a function of time
//! only. A mode is either an analytic Fourier-limited Gaussian (carrier kept
//! explicit so fast carriers are never undersampled) or a set of complex
//! samples on a uniform [`TimeGrid`], evaluated off-grid by linear
//! interpolation and taken as zero outside the grid.

mod csv;
mod grid;
mod spectral;

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

pub use self::csv::{read_mode_csv, write_mode_csv};
pub use self::grid::TimeGrid;
pub use self::spectral::{
    conjugate_time_grid, from_spectrum, to_spectrum, OmegaGrid, SpectralAmplitude,
};

/// Peak amplitude `(2/π)^{1/4}` of the unit-norm Gaussian `exp(-(t-c)²)`.
pub fn gaussian_prefactor() -> f64 {
    (2.0 / PI).powf(0.25)
}

/// Sampled envelopes must fall below this fraction of their peak density at
/// both grid boundaries.
pub const TRUNCATION_GUARD: f64 = 1e-8;

/// Minimum half-span, in pulse widths, a grid must cover around a Gaussian centre.
pub const GAUSSIAN_MARGIN: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianMode {
    pub center: f64,
    pub carrier: f64,
}

impl GaussianMode {
    #[inline]
    pub fn amplitude(&self, t: f64) -> Complex64 {
        let x = t - self.center;
        Complex64::from_polar(gaussian_prefactor() * (-x * x).exp(), -self.carrier * t)
    }

    /// Exact samples at `start + i·step`, `i < n`, by a two-sided multiplicative
    /// recurrence seeded at the sample nearest the centre.
    fn sample_uniform(&self, start: f64, step: f64, n: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        if n == 0 {
            return out;
        }
        let k = ((self.center - start) / step).round().clamp(0.0, (n - 1) as f64) as usize;
        let tk = start + k as f64 * step;
        let seed = self.amplitude(tk);
        out[k] = seed;
        let decay = (-2.0 * step * step).exp();
        let dx = tk - self.center;

        let mut ratio =
            Complex64::from_polar((-(2.0 * dx * step + step * step)).exp(), -self.carrier * step);
        let mut value = seed;
        for slot in out.iter_mut().skip(k + 1) {
            value *= ratio;
            *slot = value;
            ratio *= decay;
        }

        let mut ratio =
            Complex64::from_polar((2.0 * dx * step - step * step).exp(), self.carrier * step);
        let mut value = seed;
        for slot in out[..k].iter_mut().rev() {
            value *= ratio;
            *slot = value;
            ratio *= decay;
        }
        out
    }
}

/// Complex samples of a mode on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledMode {
    grid: TimeGrid,
    amplitudes: Arc<[Complex64]>,
    renormalization: f64,
}

impl SampledMode {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Factor the caller's samples were multiplied by to reach unit norm.
    pub fn renormalization(&self) -> f64 {
        self.renormalization
    }

    #[inline]
    pub fn amplitude(&self, t: f64) -> Complex64 {
        let g = &self.grid;
        if !(t >= g.t_min() && t <= g.t_max()) {
            return Complex64::new(0.0, 0.0);
        }
        let s = (t - g.t_min()) / g.spacing();
        let i = (s.floor() as usize).min(g.len() - 2);
        let f = s - i as f64;
        let a = &self.amplitudes;
        a[i] * (1.0 - f) + a[i + 1] * f
    }
}

/// A normalized spatio-temporal mode function.
#[derive(Debug, Clone, PartialEq)]
pub enum ModeFunction {
    Gaussian(GaussianMode),
    Sampled(SampledMode),
}

impl ModeFunction {
    /// Analytic `(2/π)^{1/4} exp(-(t-center)² - i·carrier·t)`.
    pub fn gaussian(center: f64, carrier: f64) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::invalid("center", "must be finite"));
        }
        if !carrier.is_finite() {
            return Err(Error::invalid("carrier", "must be finite"));
        }
        Ok(ModeFunction::Gaussian(GaussianMode { center, carrier }))
    }

    /// Builds a sampled mode from complex samples, renormalizing them to unit
    /// trapezoid norm. Rejects all-zero input and envelopes that are still
    /// significant at the grid boundaries.
    pub fn from_samples(grid: TimeGrid, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                actual: amplitudes.len(),
            });
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::invalid("amplitudes", "samples must be finite"));
        }
        let norm_sq = trapezoid_norm_sq(&grid, &amplitudes);
        if !(norm_sq > 0.0) {
            return Err(Error::NotNormalizable);
        }
        let peak = amplitudes.iter().map(|a| a.norm_sqr()).fold(0.0, f64::max);
        let edge = amplitudes[0].norm_sqr().max(amplitudes[grid.len() - 1].norm_sqr());
        if edge >= TRUNCATION_GUARD * peak {
            return Err(Error::GridTooNarrow(format!(
                "boundary density is {:.3e} of the peak (limit {TRUNCATION_GUARD:e})",
                edge / peak
            )));
        }
        let factor = norm_sq.sqrt().recip();
        let amplitudes: Arc<[Complex64]> = amplitudes.into_iter().map(|a| a * factor).collect();
        Ok(ModeFunction::Sampled(SampledMode {
            grid,
            amplitudes,
            renormalization: factor,
        }))
    }

    #[inline]
    pub fn amplitude(&self, t: f64) -> Complex64 {
        match self {
            ModeFunction::Gaussian(g) => g.amplitude(t),
            ModeFunction::Sampled(s) => s.amplitude(t),
        }
    }

    /// `|ζ(t)|²`.
    #[inline]
    pub fn density(&self, t: f64) -> f64 {
        self.amplitude(t).norm_sqr()
    }

    pub fn grid(&self) -> Option<&TimeGrid> {
        match self {
            ModeFunction::Gaussian(_) => None,
            ModeFunction::Sampled(s) => Some(&s.grid),
        }
    }

    pub fn as_gaussian(&self) -> Option<&GaussianMode> {
        match self {
            ModeFunction::Gaussian(g) => Some(g),
            ModeFunction::Sampled(_) => None,
        }
    }

    /// `∫|ζ|²dt`: exactly 1 for analytic modes, trapezoid rule for sampled ones.
    pub fn norm_sq(&self) -> f64 {
        match self {
            ModeFunction::Gaussian(_) => 1.0,
            ModeFunction::Sampled(s) => trapezoid_norm_sq(&s.grid, &s.amplitudes),
        }
    }

    /// Values at every point of `grid`.
    pub fn sample(&self, grid: &TimeGrid) -> Vec<Complex64> {
        self.sample_shifted(grid, 0.0)
    }

    /// Values at `grid.point(i) + shift`.
    pub fn sample_shifted(&self, grid: &TimeGrid, shift: f64) -> Vec<Complex64> {
        match self {
            ModeFunction::Gaussian(g) => {
                g.sample_uniform(grid.t_min() + shift, grid.spacing(), grid.len())
            }
            ModeFunction::Sampled(s) => {
                if shift == 0.0 && s.grid.compatible_with(grid) {
                    return s.amplitudes.to_vec();
                }
                grid.points().map(|t| s.amplitude(t + shift)).collect()
            }
        }
    }

    /// Re-expresses the mode on another grid.
    pub fn resample(&self, grid: &TimeGrid) -> Result<Self> {
        Self::from_samples(*grid, self.sample(grid))
    }

    /// Rough centre of the envelope: the Gaussian centre, or the density centroid.
    pub fn centroid(&self) -> f64 {
        match self {
            ModeFunction::Gaussian(g) => g.center,
            ModeFunction::Sampled(s) => {
                let g = &s.grid;
                let (m0, m1) = s
                    .amplitudes
                    .iter()
                    .enumerate()
                    .fold((0.0, 0.0), |(m0, m1), (i, a)| {
                        let w = g.trapezoid_weight(i) * a.norm_sqr();
                        (m0 + w, m1 + w * g.point(i))
                    });
                m1 / m0
            }
        }
    }
}

fn trapezoid_norm_sq(grid: &TimeGrid, amplitudes: &[Complex64]) -> f64 {
    amplitudes
        .iter()
        .enumerate()
        .map(|(i, a)| grid.trapezoid_weight(i) * a.norm_sqr())
        .sum()
}

/// Gaussian mode, analytic when `grid` is `None`, otherwise sampled on `grid`.
///
/// A sampling grid must extend at least five pulse widths beyond the centre
/// on both sides.
pub fn make_gaussian_mode(center: f64, carrier: f64, grid: Option<&TimeGrid>) -> Result<ModeFunction> {
    let analytic = ModeFunction::gaussian(center, carrier)?;
    let Some(grid) = grid else {
        return Ok(analytic);
    };
    if center - GAUSSIAN_MARGIN < grid.t_min() || center + GAUSSIAN_MARGIN > grid.t_max() {
        return Err(Error::GridTooNarrow(format!(
            "grid [{}, {}] does not span ±{GAUSSIAN_MARGIN} around center {center}",
            grid.t_min(),
            grid.t_max()
        )));
    }
    let samples = grid.points().map(|t| analytic.amplitude(t)).collect();
    ModeFunction::from_samples(*grid, samples)
}

/// Sampled mode `ε(t)·exp(-iφ(t))`. The envelope is rescaled to unit norm;
/// the factor applied is available from [`SampledMode::renormalization`].
pub fn make_sampled_mode(envelope: &[f64], phase: &[f64], grid: &TimeGrid) -> Result<ModeFunction> {
    for len in [envelope.len(), phase.len()] {
        if len != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                actual: len,
            });
        }
    }
    if let Some((index, &value)) = envelope.iter().enumerate().find(|(_, &e)| e < 0.0) {
        return Err(Error::NegativeEnvelope { index, value });
    }
    if envelope.iter().all(|&e| e == 0.0) {
        return Err(Error::NotNormalizable);
    }
    let samples = envelope
        .iter()
        .zip(phase)
        .map(|(&e, &p)| Complex64::from_polar(e, -p))
        .collect();
    ModeFunction::from_samples(*grid, samples)
}

/// Single-photon detection density `|ζ(t)|²`.
pub fn detection_density(mode: &ModeFunction, t: f64) -> f64 {
    mode.density(t)
}

/// The grid on which a computation involving `m1` and `m2` is carried out.
///
/// A sampled mode imposes its grid (two sampled modes must share one).
/// Two analytic modes use the canonical `[-8, 8]` grid when both centres lie
/// within ±3, otherwise a widened grid of the same spacing.
pub fn common_grid(m1: &ModeFunction, m2: &ModeFunction) -> Result<TimeGrid> {
    match (m1.grid(), m2.grid()) {
        (Some(a), Some(b)) => {
            if a.compatible_with(b) {
                Ok(*a)
            } else {
                Err(Error::GridMismatch)
            }
        }
        (Some(g), None) | (None, Some(g)) => Ok(*g),
        (None, None) => {
            let (c1, c2) = (m1.centroid(), m2.centroid());
            let reach = TimeGrid::DEFAULT_HALF_SPAN - GAUSSIAN_MARGIN;
            if c1.abs() <= reach && c2.abs() <= reach {
                return Ok(TimeGrid::canonical());
            }
            let canonical = TimeGrid::canonical();
            let h = canonical.spacing();
            let half = TimeGrid::DEFAULT_HALF_SPAN + (c1 - c2).abs() / 2.0;
            let n = (2.0 * half / h).ceil() as usize + 1;
            TimeGrid::centered((c1 + c2) / 2.0, h, n)
        }
    }
}

/// `∫ζ₁*(t)ζ₂(t)dt`.
///
/// Closed form for two analytic Gaussians, trapezoid rule on the
/// [`common_grid`] otherwise.
pub fn overlap(m1: &ModeFunction, m2: &ModeFunction) -> Result<Complex64> {
    if let (ModeFunction::Gaussian(a), ModeFunction::Gaussian(b)) = (m1, m2) {
        return Ok(gaussian_overlap(a, b));
    }
    let grid = common_grid(m1, m2)?;
    Ok(overlap_on_grid(m1, m2, &grid))
}

/// Trapezoid-rule overlap with both modes evaluated on `grid`.
pub fn overlap_on_grid(m1: &ModeFunction, m2: &ModeFunction, grid: &TimeGrid) -> Complex64 {
    let a = m1.sample(grid);
    let b = m2.sample(grid);
    a.iter()
        .zip(&b)
        .enumerate()
        .map(|(i, (x, y))| x.conj() * y * grid.trapezoid_weight(i))
        .sum()
}

fn gaussian_overlap(a: &GaussianMode, b: &GaussianMode) -> Complex64 {
    // ∫ exp(-2t² + 2(ca+cb)t - ca² - cb² + i(κa-κb)t) dt, times √(2/π).
    let s = a.center + b.center;
    let kappa = a.carrier - b.carrier;
    let z = Complex64::new(2.0 * s, kappa);
    (z * z / 8.0 - Complex64::new(a.center * a.center + b.center * b.center, 0.0)).exp()
}

/// Parallel map over grid indices with an order-preserving collect.
pub(crate) fn par_map_indices<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let n = n + n % 2;
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(a + i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn analytic_gaussian_has_unit_norm() {
        let m = make_gaussian_mode(0.0, 0.0, None).unwrap();
        let norm = simpson(|t| m.density(t), -10.0, 10.0, 4000);
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-9);
        assert_eq!(m.norm_sq(), 1.0);
    }

    #[test]
    fn gaussian_peak_amplitude() {
        let m = make_gaussian_mode(1.3, 2.0, None).unwrap();
        assert_abs_diff_eq!(m.amplitude(1.3).norm(), (2.0 / PI).powf(0.25), epsilon = 1e-15);
        assert_abs_diff_eq!(detection_density(&make_gaussian_mode(0.0, 0.0, None).unwrap(), 0.0), 0.797_884_560_802_865_4, epsilon = 1e-15);
    }

    #[test]
    fn pulse_pair_member_matches_closed_form() {
        let (dtau, delta, omega) = (0.7, 1.1, 3.0);
        let m = make_gaussian_mode(dtau / 2.0, omega - delta / 2.0, None).unwrap();
        for &t in &[-1.0, 0.0, 0.35, 2.0] {
            let expected = (2.0 / PI).powf(0.25)
                * Complex64::new(-(t - dtau / 2.0) * (t - dtau / 2.0), -(omega - delta / 2.0) * t).exp();
            assert_abs_diff_eq!((m.amplitude(t) - expected).norm(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn recurrence_sampling_matches_direct_evaluation() {
        let g = GaussianMode { center: 0.4, carrier: 7.5 };
        let grid = TimeGrid::canonical();
        for shift in [0.0, 0.3371, -2.5] {
            let fast = ModeFunction::Gaussian(g).sample_shifted(&grid, shift);
            let err = grid
                .points()
                .zip(&fast)
                .map(|(t, v)| (g.amplitude(t + shift) - v).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-12, "shift {shift}: {err}");
        }
    }

    #[test]
    fn sampled_gaussian_matches_analytic_pointwise() {
        let grid = TimeGrid::canonical();
        let analytic = make_gaussian_mode(0.5, -1.0, None).unwrap();
        let envelope: Vec<f64> = grid.points().map(|t| analytic.amplitude(t).norm()).collect();
        let phase: Vec<f64> = grid.points().map(|t| -1.0 * t).collect();
        let sampled = make_sampled_mode(&envelope, &phase, &grid).unwrap();
        for t in grid.points().step_by(7) {
            assert!((sampled.amplitude(t) - analytic.amplitude(t)).norm() < 1e-6);
        }
        let on_grid = make_gaussian_mode(0.5, -1.0, Some(&grid)).unwrap();
        assert_abs_diff_eq!(on_grid.norm_sq(), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn gaussian_grid_too_narrow() {
        let grid = TimeGrid::new(-4.0, 4.0, 1000).unwrap();
        assert!(matches!(
            make_gaussian_mode(0.0, 0.0, Some(&grid)),
            Err(Error::GridTooNarrow(_))
        ));
        assert!(make_gaussian_mode(0.0, 0.0, Some(&TimeGrid::new(-5.0, 5.0, 1000).unwrap())).is_ok());
    }

    #[test]
    fn zero_envelope_is_not_normalizable() {
        let grid = TimeGrid::new(-1.0, 1.0, 11).unwrap();
        let r = make_sampled_mode(&[0.0; 11], &[0.0; 11], &grid);
        assert!(matches!(r, Err(Error::NotNormalizable)));
    }

    #[test]
    fn length_mismatch_and_negative_envelope() {
        let grid = TimeGrid::new(-1.0, 1.0, 11).unwrap();
        assert!(matches!(
            make_sampled_mode(&[1.0; 10], &[0.0; 11], &grid),
            Err(Error::LengthMismatch { expected: 11, actual: 10 })
        ));
        let mut env = vec![0.0; 11];
        env[5] = 1.0;
        env[3] = -0.1;
        assert!(matches!(
            make_sampled_mode(&env, &[0.0; 11], &grid),
            Err(Error::NegativeEnvelope { index: 3, .. })
        ));
    }

    #[test]
    fn rectangular_envelope_has_uniform_density() {
        let grid = TimeGrid::new(-4.0, 4.0, 8001).unwrap();
        let width = 2.0;
        let envelope: Vec<f64> = grid
            .points()
            .map(|t| if t.abs() <= width / 2.0 + 1e-12 { 3.7 } else { 0.0 })
            .collect();
        let mode = make_sampled_mode(&envelope, &vec![0.0; grid.len()], &grid).unwrap();
        // Trapezoid mass of the plateau is `width`, up to the half-weight ramps at its edges.
        assert_abs_diff_eq!(mode.density(0.0), 1.0 / width, epsilon = 1e-3);
        if let ModeFunction::Sampled(s) = &mode {
            assert!(s.renormalization() > 0.0);
        }
    }

    #[test]
    fn boundary_guard_rejects_truncated_envelopes() {
        let grid = TimeGrid::new(-1.0, 1.0, 101).unwrap();
        let env: Vec<f64> = grid.points().map(|t| (-t * t).exp()).collect();
        assert!(matches!(
            make_sampled_mode(&env, &vec![0.0; 101], &grid),
            Err(Error::GridTooNarrow(_))
        ));
    }

    #[test]
    fn overlap_of_mode_with_itself_is_one() {
        let m = make_gaussian_mode(0.2, 1.0, None).unwrap();
        assert_abs_diff_eq!((overlap(&m, &m).unwrap() - 1.0).norm(), 0.0, epsilon = 1e-14);
        let s = make_gaussian_mode(0.2, 1.0, Some(&TimeGrid::canonical())).unwrap();
        assert_abs_diff_eq!((overlap(&s, &s).unwrap() - 1.0).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn gaussian_pair_overlap_matches_quadrature() {
        for &(dtau, delta) in &[(0.0, 0.0), (1.0, 0.0), (0.5, 2.0), (-1.2, 3.0 * PI)] {
            let m1 = make_gaussian_mode(dtau / 2.0, 0.4 - delta / 2.0, None).unwrap();
            let m2 = make_gaussian_mode(-dtau / 2.0, 0.4 + delta / 2.0, None).unwrap();
            let closed = overlap(&m1, &m2).unwrap();
            let re = simpson(|t| (m1.amplitude(t).conj() * m2.amplitude(t)).re, -12.0, 12.0, 20000);
            let im = simpson(|t| (m1.amplitude(t).conj() * m2.amplitude(t)).im, -12.0, 12.0, 20000);
            assert_abs_diff_eq!(closed.re, re, epsilon = 1e-10);
            assert_abs_diff_eq!(closed.im, im, epsilon = 1e-10);
            let expected = (-dtau * dtau / 2.0 - delta * delta / 8.0).exp();
            assert_abs_diff_eq!(closed.norm(), expected, epsilon = 1e-14);
        }
    }

    #[test]
    fn distant_gaussians_do_not_overlap() {
        let m1 = make_gaussian_mode(10.0, 0.0, None).unwrap();
        let m2 = make_gaussian_mode(-10.0, 0.0, None).unwrap();
        assert!(overlap(&m1, &m2).unwrap().norm() < 1e-40);
    }

    #[test]
    fn overlap_rejects_mismatched_grids() {
        let a = make_gaussian_mode(0.0, 0.0, Some(&TimeGrid::canonical())).unwrap();
        let b = make_gaussian_mode(0.0, 0.0, Some(&TimeGrid::new(-8.0, 8.0, 2048).unwrap())).unwrap();
        assert!(matches!(overlap(&a, &b), Err(Error::GridMismatch)));
    }

    #[test]
    fn common_grid_widens_for_distant_centres() {
        let m1 = make_gaussian_mode(6.0, 0.0, None).unwrap();
        let m2 = make_gaussian_mode(-6.0, 0.0, None).unwrap();
        let g = common_grid(&m1, &m2).unwrap();
        assert!(g.t_min() <= -11.0 && g.t_max() >= 11.0);
        assert_abs_diff_eq!(g.spacing(), TimeGrid::canonical().spacing(), epsilon = 1e-12);
    }

    #[test]
    fn resampling_preserves_norm() {
        let m = make_gaussian_mode(0.3, 2.0, None).unwrap();
        let coarse = m.resample(&TimeGrid::new(-7.0, 9.0, 1500).unwrap()).unwrap();
        let fine = coarse.resample(&TimeGrid::new(-7.5, 7.5, 5000).unwrap()).unwrap();
        assert_abs_diff_eq!(fine.norm_sq(), 1.0, epsilon = 1e-6);
        if let ModeFunction::Sampled(s) = &fine {
            assert_abs_diff_eq!(s.renormalization(), 1.0, epsilon = 1e-4);
        }
    }

    fn random_phase_mode(coeffs: &[f64]) -> (ModeFunction, ModeFunction, TimeGrid) {
        let grid = TimeGrid::new(-8.0, 8.0, 1024).unwrap();
        let env: Vec<f64> = grid.points().map(|t| (-(t - 0.3).powi(2)).exp() * (1.0 + 0.5 * t.sin().powi(2))).collect();
        let flat = make_sampled_mode(&env, &vec![0.0; grid.len()], &grid).unwrap();
        let phase: Vec<f64> = grid
            .points()
            .map(|t| coeffs.iter().enumerate().map(|(k, c)| c * t.powi(k as i32)).sum())
            .collect();
        let modulated = make_sampled_mode(&env, &phase, &grid).unwrap();
        (flat, modulated, grid)
    }

    proptest! {
        #[test]
        fn phase_modulation_leaves_density_unchanged(
            coeffs in proptest::collection::vec(-3.0f64..3.0, 1..5),
            t in -7.9f64..7.9,
        ) {
            let (flat, modulated, _) = random_phase_mode(&coeffs);
            // Linear interpolation mixes phases between nodes, so compare on-grid values.
            let grid = flat.grid().copied().unwrap();
            let i = ((t - grid.t_min()) / grid.spacing()).round() as usize;
            let tn = grid.point(i);
            prop_assert!((flat.density(tn) - modulated.density(tn)).abs() < 1e-12);
        }

        #[test]
        fn overlap_is_bounded_by_one(
            c1 in -2.0f64..2.0, c2 in -2.0f64..2.0,
            k1 in -6.0f64..6.0, k2 in -6.0f64..6.0,
            chirp in -1.0f64..1.0,
        ) {
            let grid = TimeGrid::canonical();
            let a = make_gaussian_mode(c1, k1, None).unwrap();
            let env: Vec<f64> = grid.points().map(|t| (-(t - c2).powi(2) / 1.7).exp()).collect();
            let phase: Vec<f64> = grid.points().map(|t| k2 * t + chirp * t * t).collect();
            let b = make_sampled_mode(&env, &phase, &grid).unwrap();
            prop_assert!(overlap(&a, &b).unwrap().norm() <= 1.0 + 1e-9);
            prop_assert!(overlap(&a, &a).unwrap().norm() <= 1.0 + 1e-9);
        }
    }
}
