//! Detuning-ensemble averages for arbitrary pulse shapes: averaged coincidence
//! density versus `τ`, total coincidence probability versus arrival delay, and
//! the coincidence fraction that survives a temporal filter `|τ| < T`.
//!
//! The detuning `Δ` is drawn from a Gaussian of half width `δω` (at 1/e)
//! around `delta_mean`. Averages use Gauss–Hermite quadrature with `nodes`
//! points and are repeated with `2·nodes` points; if the two disagree by more
//! than [`CONVERGENCE_TOLERANCE`] the result is rejected.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{p_2hnu_dephased, p_inh_delayed};
use crate::interference::{tau_marginals, TauMarginal};
use crate::numeric::{fmt_f64, gaussian_weighted_rule, integrate};
use crate::wavepacket::{overlap, par_map_indices, ModeFunction};

pub const DEFAULT_DETUNING_NODES: usize = 64;
pub const CONVERGENCE_TOLERANCE: f64 = 1e-5;

/// Gauss–Legendre nodes used to integrate over a filter window.
const WINDOW_NODES: usize = 96;

/// Axis name and unit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub unit: String,
}

impl Axis {
    pub fn new(name: impl Into<String>, unit: impl Into<String>) -> Self {
        Axis {
            name: name.into(),
            unit: unit.into(),
        }
    }

    /// `name [unit]`, or just `name` for dimensionless quantities.
    pub fn header(&self) -> String {
        if self.unit.is_empty() {
            self.name.clone()
        } else {
            format!("{} [{}]", self.name, self.unit)
        }
    }
}

/// A sampled series `y(x)` with `x` strictly increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    x: Vec<f64>,
    y: Vec<f64>,
    x_axis: Axis,
    y_axis: Axis,
}

impl Curve {
    pub fn new(x: Vec<f64>, y: Vec<f64>, x_axis: Axis, y_axis: Axis) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch {
                expected: x.len(),
                actual: y.len(),
            });
        }
        if let Some(w) = x.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(Error::invalid(
                "x",
                format!("must be strictly increasing ({} followed by {})", w[0], w[1]),
            ));
        }
        Ok(Curve { x, y, x_axis, y_axis })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn x_axis(&self) -> &Axis {
        &self.x_axis
    }

    pub fn y_axis(&self) -> &Axis {
        &self.y_axis
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{},{}", self.x_axis.header(), self.y_axis.header())?;
        for (x, y) in self.x.iter().zip(&self.y) {
            writeln!(out, "{},{}", fmt_f64(*x), fmt_f64(*y))?;
        }
        Ok(())
    }
}

/// First `x ≥ 0` at which `depth` falls below `1/e`, linearly interpolated.
/// `None` if the depth never crosses on the grid.
pub fn dip_half_width(x: &[f64], depth: &[f64]) -> Option<f64> {
    let level = (-1.0f64).exp();
    let start = x.iter().position(|&v| v >= 0.0)?;
    (start..x.len().saturating_sub(1)).find_map(|i| {
        let (d0, d1) = (depth[i], depth[i + 1]);
        (d0 >= level && d1 < level).then(|| x[i] + (x[i + 1] - x[i]) * (d0 - level) / (d0 - d1))
    })
}

impl Curve {
    /// Local minima whose value, refined by a parabola through the minimum
    /// sample and its two neighbours, is at most `relative·max|y|`. Returns
    /// the refined positions.
    pub fn near_zeros(&self, relative: f64) -> Vec<f64> {
        let peak = self.y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let threshold = relative * peak;
        let (x, y) = (&self.x, &self.y);
        (1..y.len().saturating_sub(1))
            .filter(|&i| y[i] <= y[i - 1] && y[i] < y[i + 1])
            .filter_map(|i| {
                let (a, b, c) = (y[i - 1], y[i], y[i + 1]);
                let curvature = a - 2.0 * b + c;
                let h = 0.5 * (x[i + 1] - x[i - 1]);
                let (pos, value) = if curvature > 0.0 {
                    (x[i] + 0.5 * h * (a - c) / curvature, b - (a - c) * (a - c) / (8.0 * curvature))
                } else {
                    (x[i], b)
                };
                (value.abs() <= threshold).then_some(pos)
            })
            .collect()
    }
}

/// A family of mode pairs parameterized by arrival delay `δτ` and detuning `Δ`.
pub trait PulseFamily: Sync {
    fn pair(&self, delta_tau: f64, delta: f64) -> Result<(ModeFunction, ModeFunction)>;

    /// Short name recorded in output metadata.
    fn label(&self) -> String {
        "custom".to_string()
    }
}

impl<F> PulseFamily for F
where
    F: Fn(f64, f64) -> Result<(ModeFunction, ModeFunction)> + Sync,
{
    fn pair(&self, delta_tau: f64, delta: f64) -> Result<(ModeFunction, ModeFunction)> {
        self(delta_tau, delta)
    }
}

/// Fourier-limited Gaussian pairs; analytic, or sampled on `grid` when set.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GaussianFamily {
    pub omega_mean: f64,
    pub grid: Option<crate::wavepacket::TimeGrid>,
}

impl PulseFamily for GaussianFamily {
    fn label(&self) -> String {
        match self.grid {
            None => "gaussian".to_string(),
            Some(_) => "gaussian-sampled".to_string(),
        }
    }

    fn pair(&self, delta_tau: f64, delta: f64) -> Result<(ModeFunction, ModeFunction)> {
        let g = self.grid.as_ref();
        Ok((
            crate::wavepacket::make_gaussian_mode(delta_tau / 2.0, self.omega_mean - delta / 2.0, g)?,
            crate::wavepacket::make_gaussian_mode(-delta_tau / 2.0, self.omega_mean + delta / 2.0, g)?,
        ))
    }
}

/// Two arbitrary base modes, displaced by `±δτ/2` and given carrier offsets
/// `∓Δ/2`. Sampled bases are shifted by interpolation on their own grid.
#[derive(Debug, Clone)]
pub struct ShapedFamily {
    pub mode1: ModeFunction,
    pub mode2: ModeFunction,
}

impl ShapedFamily {
    pub fn new(mode1: ModeFunction, mode2: ModeFunction) -> Self {
        ShapedFamily { mode1, mode2 }
    }
}

fn displace(mode: &ModeFunction, shift: f64, carrier_offset: f64) -> Result<ModeFunction> {
    match mode {
        ModeFunction::Gaussian(g) => ModeFunction::gaussian(g.center + shift, g.carrier + carrier_offset),
        ModeFunction::Sampled(s) => {
            let grid = *s.grid();
            let samples = grid
                .points()
                .map(|t| s.amplitude(t - shift) * num_complex::Complex64::from_polar(1.0, -carrier_offset * t))
                .collect();
            ModeFunction::from_samples(grid, samples)
        }
    }
}

impl PulseFamily for ShapedFamily {
    fn label(&self) -> String {
        "shaped".to_string()
    }

    fn pair(&self, delta_tau: f64, delta: f64) -> Result<(ModeFunction, ModeFunction)> {
        Ok((
            displace(&self.mode1, delta_tau / 2.0, -delta / 2.0)?,
            displace(&self.mode2, -delta_tau / 2.0, delta / 2.0)?,
        ))
    }
}

/// Arrival delay and detuning distribution of an ensemble of photon pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    pub delta_tau: f64,
    pub delta_mean: f64,
    pub delta_omega: f64,
    pub nodes: usize,
}

impl Ensemble {
    pub fn new(delta_tau: f64, delta_omega: f64) -> Result<Self> {
        let e = Ensemble {
            delta_tau,
            delta_mean: 0.0,
            delta_omega,
            nodes: DEFAULT_DETUNING_NODES,
        };
        e.validate()?;
        Ok(e)
    }

    pub fn with_mean(mut self, delta_mean: f64) -> Result<Self> {
        self.delta_mean = delta_mean;
        self.validate()?;
        Ok(self)
    }

    pub fn with_nodes(mut self, nodes: usize) -> Result<Self> {
        self.nodes = nodes;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("delta_tau", self.delta_tau),
            ("delta_mean", self.delta_mean),
            ("delta_omega", self.delta_omega),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(field, format!("must be finite, got {v}")));
            }
        }
        if self.delta_omega < 0.0 {
            return Err(Error::invalid("delta_omega", format!("must be >= 0, got {}", self.delta_omega)));
        }
        if self.nodes == 0 {
            return Err(Error::invalid("nodes", "must be >= 1"));
        }
        Ok(())
    }

    /// `Σ_k w_k g(Δ_k)` for vector-valued `g`, checked against the doubled rule.
    /// With `δω = 0` the detuning is deterministic and `g` is evaluated once.
    fn average<G>(&self, g: G) -> Result<Vec<f64>>
    where
        G: Fn(f64) -> Result<Vec<f64>>,
    {
        if self.delta_omega == 0.0 {
            return g(self.delta_mean);
        }
        let coarse = self.weighted_sum(self.nodes, &g)?;
        let refined_nodes = 2 * self.nodes;
        let fine = self.weighted_sum(refined_nodes, &g)?;
        let difference = coarse
            .iter()
            .zip(&fine)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if !(difference <= CONVERGENCE_TOLERANCE) {
            return Err(Error::QuadratureNotConverged {
                nodes: self.nodes,
                refined: refined_nodes,
                difference,
                tolerance: CONVERGENCE_TOLERANCE,
            });
        }
        Ok(fine)
    }

    fn weighted_sum<G>(&self, nodes: usize, g: &G) -> Result<Vec<f64>>
    where
        G: Fn(f64) -> Result<Vec<f64>>,
    {
        let mut acc: Option<Vec<f64>> = None;
        for (delta, w) in gaussian_weighted_rule(self.delta_mean, self.delta_omega, nodes) {
            let values = g(delta)?;
            match acc.as_mut() {
                None => acc = Some(values.into_iter().map(|v| w * v).collect()),
                Some(a) => a.iter_mut().zip(values).for_each(|(a, v)| *a += w * v),
            }
        }
        Ok(acc.unwrap_or_default())
    }
}

/// Detuning-averaged coherent and dephased `τ` marginals at each `τ`.
pub fn averaged_tau_marginals(
    family: &dyn PulseFamily,
    ensemble: &Ensemble,
    taus: &[f64],
) -> Result<Vec<TauMarginal>> {
    ensemble.validate()?;
    let flat = ensemble.average(|delta| {
        let (m1, m2) = family.pair(ensemble.delta_tau, delta)?;
        Ok(tau_marginals(&m1, &m2, taus)?
            .into_iter()
            .flat_map(|m| [m.coherent, m.dephased])
            .collect())
    })?;
    Ok(flat
        .chunks_exact(2)
        .map(|c| TauMarginal {
            coherent: c[0],
            dephased: c[1],
        })
        .collect())
}

fn require_increasing(field: &'static str, xs: &[f64]) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::invalid(field, "grid is empty"));
    }
    if xs.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid(field, "grid must be strictly increasing"));
    }
    Ok(())
}

/// Coincidence density versus `τ` averaged over the detuning ensemble, with
/// the full arrival delay and detuning distribution given by `ensemble`.
pub fn averaged_coincidence_curve_with(
    family: &dyn PulseFamily,
    ensemble: &Ensemble,
    taus: &[f64],
) -> Result<Curve> {
    require_increasing("tau", taus)?;
    let y = averaged_tau_marginals(family, ensemble, taus)?
        .into_iter()
        .map(|m| m.coherent)
        .collect();
    Curve::new(
        taus.to_vec(),
        y,
        Axis::new("tau", "delta_t"),
        Axis::new("coincidence_density", "1/delta_t"),
    )
}

/// Coincidence density versus `τ` for simultaneously arriving photons whose
/// detuning is centred on zero with width `δω`.
pub fn averaged_coincidence_curve(family: &dyn PulseFamily, delta_omega: f64, taus: &[f64]) -> Result<Curve> {
    averaged_coincidence_curve_with(family, &Ensemble::new(0.0, delta_omega)?, taus)
}

/// Total opposite-port probability `⟨(1 − |∫ζ₁*ζ₂|²)/2⟩_Δ` at each arrival delay.
pub fn total_coincidence_vs_delay(
    family: &dyn PulseFamily,
    delta_omega: f64,
    delta_taus: &[f64],
) -> Result<Curve> {
    total_coincidence_vs_delay_with(family, &Ensemble::new(0.0, delta_omega)?, delta_taus)
}

/// As [`total_coincidence_vs_delay`], with detuning mean and node count taken
/// from `ensemble` (its `delta_tau` is ignored).
pub fn total_coincidence_vs_delay_with(
    family: &dyn PulseFamily,
    ensemble: &Ensemble,
    delta_taus: &[f64],
) -> Result<Curve> {
    ensemble.validate()?;
    require_increasing("delta_tau", delta_taus)?;
    let y = ensemble.average(|delta| {
        par_map_indices(delta_taus.len(), |i| {
            let (m1, m2) = family.pair(delta_taus[i], delta)?;
            Ok(0.5 * (1.0 - overlap(&m1, &m2)?.norm_sqr().min(1.0)))
        })
        .into_iter()
        .collect()
    })?;
    Curve::new(
        delta_taus.to_vec(),
        y,
        Axis::new("delta_tau", "delta_t"),
        Axis::new("p_total", ""),
    )
}

/// Coincidences with `|τ| < T` and the dephased reference over the same window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilteredCoincidence {
    pub window: f64,
    pub coincidences: f64,
    pub reference: f64,
    /// `1 − coincidences/reference`, in `[0, 1]`.
    pub dip_depth: f64,
}

impl FilteredCoincidence {
    fn new(window: f64, coincidences: f64, reference: f64) -> Self {
        let dip_depth = if reference > 0.0 {
            (1.0 - coincidences / reference).clamp(0.0, 1.0)
        } else {
            0.0
        };
        FilteredCoincidence {
            window,
            coincidences,
            reference,
            dip_depth,
        }
    }
}

fn check_window(window: f64) -> Result<()> {
    if !(window > 0.0) {
        return Err(Error::invalid("window", format!("must be > 0, got {window}")));
    }
    Ok(())
}

/// Filtered coincidences for Gaussian pairs from the closed forms. An infinite
/// window gives the total coincidence probability.
pub fn filtered_coincidence(delta_omega: f64, window: f64, delta_tau: f64) -> Result<FilteredCoincidence> {
    check_window(window)?;
    Ensemble::new(delta_tau, delta_omega)?;
    if delta_omega == 0.0 && delta_tau == 0.0 {
        let reference = 2.0 * integrate(|t| p_2hnu_dephased(t, 0.0), 0.0, window.min(40.0), 64);
        return Ok(FilteredCoincidence::new(window, 0.0, reference));
    }
    // Both integrands are even in τ and negligible beyond |τ| = |δτ| + 40.
    let upper = window.min(delta_tau.abs() + 40.0);
    let panels = ((upper / 0.5).ceil() as usize).clamp(8, 256);
    let coincidences = 2.0 * integrate(|t| p_inh_delayed(t, delta_tau, delta_omega), 0.0, upper, panels);
    let reference = 2.0 * integrate(|t| p_2hnu_dephased(t, delta_tau), 0.0, upper, panels);
    Ok(FilteredCoincidence::new(window, coincidences.max(0.0), reference))
}

/// Filtered coincidences for an arbitrary family, integrating the averaged
/// `τ` marginals over `[−T, T]` with Gauss–Legendre nodes.
pub fn filtered_coincidence_numeric(
    family: &dyn PulseFamily,
    ensemble: &Ensemble,
    window: f64,
) -> Result<FilteredCoincidence> {
    check_window(window)?;
    let rule = gauss_quad::legendre::GaussLegendre::new(
        std::num::NonZeroUsize::new(WINDOW_NODES).expect("nonzero"),
    );
    let (taus, weights): (Vec<f64>, Vec<f64>) = rule.iter().map(|&(x, w)| (window * x, window * w)).unzip();
    let mut order: Vec<usize> = (0..taus.len()).collect();
    order.sort_by(|&a, &b| taus[a].total_cmp(&taus[b]));
    let sorted: Vec<f64> = order.iter().map(|&i| taus[i]).collect();
    let marginals = averaged_tau_marginals(family, ensemble, &sorted)?;
    let (mut coincidences, mut reference) = (0.0, 0.0);
    for (m, &i) in marginals.iter().zip(&order) {
        coincidences += weights[i] * m.coherent;
        reference += weights[i] * m.dephased;
    }
    Ok(FilteredCoincidence::new(window, coincidences.max(0.0), reference))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{p_inh, p_total};
    use crate::wavepacket::{make_sampled_mode, TimeGrid};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn taus(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }

    fn exponential_family() -> ShapedFamily {
        let grid = TimeGrid::new(-20.0, 20.0, 4001).unwrap();
        let env: Vec<f64> = grid.points().map(|t| (-(t.abs())).exp()).collect();
        let m = make_sampled_mode(&env, &vec![0.0; grid.len()], &grid).unwrap();
        ShapedFamily::new(m.clone(), m)
    }

    #[test]
    fn gaussian_family_matches_closed_form_dip() {
        let grid = taus(-4.0, 4.0, 81);
        let curve = averaged_coincidence_curve(&GaussianFamily::default(), 2.0, &grid).unwrap();
        for (t, y) in curve.x().iter().zip(curve.y()) {
            assert_abs_diff_eq!(*y, p_inh(*t, 2.0), epsilon = 1e-5);
        }
        assert_eq!(curve.y()[40], 0.0);
    }

    #[test]
    fn no_spread_means_no_coincidences() {
        let grid = taus(-3.0, 3.0, 31);
        for family in [&GaussianFamily::default() as &dyn PulseFamily, &exponential_family()] {
            let curve = averaged_coincidence_curve(family, 0.0, &grid).unwrap();
            assert!(curve.y().iter().all(|&y| y.abs() < 1e-15));
        }
    }

    #[test]
    fn simultaneous_detections_never_coincide() {
        let fam = exponential_family();
        let e = Ensemble::new(0.4, 1.5).unwrap();
        let curve = averaged_coincidence_curve_with(&fam, &e, &[-1.0, 0.0, 1.0]).unwrap();
        assert_eq!(curve.y()[1], 0.0);
        assert!(curve.y()[0] > 1e-3);
    }

    #[test]
    fn detuned_mean_shifts_the_beat() {
        let grid = taus(-2.0, 2.0, 21);
        let e = Ensemble::new(0.0, 0.0).unwrap().with_mean(3.0).unwrap();
        let curve = averaged_coincidence_curve_with(&GaussianFamily::default(), &e, &grid).unwrap();
        let cfg = crate::PhotonPairConfig::new(0.0, 3.0, 0.0, 0.0).unwrap();
        for (t, y) in curve.x().iter().zip(curve.y()) {
            assert_abs_diff_eq!(*y, crate::gaussian::p_2hnu(*t, &cfg), epsilon = 1e-12);
        }
    }

    #[test]
    fn unresolved_detuning_average_is_reported() {
        // τ·δω = 24 oscillates too fast for a 64-node rule.
        let err = averaged_coincidence_curve(&GaussianFamily::default(), 12.0, &[2.0]).unwrap_err();
        assert!(matches!(err, Error::QuadratureNotConverged { nodes: 64, refined: 128, .. }));
    }

    #[test]
    fn total_coincidence_gaussian_cases() {
        let dts = taus(-3.0, 3.0, 25);
        let fam = GaussianFamily::default();
        let c0 = total_coincidence_vs_delay(&fam, 0.0, &dts).unwrap();
        for (dt, y) in c0.x().iter().zip(c0.y()) {
            assert_abs_diff_eq!(*y, 0.5 - 0.5 * (-dt * dt).exp(), epsilon = 1e-14);
        }
        let c4 = total_coincidence_vs_delay(&fam, 4.0, &dts).unwrap();
        assert_abs_diff_eq!(0.5 - c4.y()[12], 1.0 / 20f64.sqrt(), epsilon = 1e-6);
        for (dt, y) in c4.x().iter().zip(c4.y()) {
            assert_abs_diff_eq!(*y, p_total(*dt, 4.0), epsilon = 1e-6);
        }
    }

    #[test]
    fn sampled_gaussians_match_total_coincidence() {
        let fam = GaussianFamily {
            omega_mean: 1.0,
            grid: Some(TimeGrid::canonical()),
        };
        let dts = taus(-2.0, 2.0, 9);
        for w in [0.0, 2.0] {
            let c = total_coincidence_vs_delay(&fam, w, &dts).unwrap();
            for (dt, y) in c.x().iter().zip(c.y()) {
                assert_abs_diff_eq!(*y, p_total(*dt, w), epsilon = 1e-4);
            }
        }
    }

    #[test]
    fn distant_pulses_never_interfere() {
        let grid = TimeGrid::new(-30.0, 30.0, 6001).unwrap();
        let env: Vec<f64> = grid.points().map(|t| if t.abs() <= 1.0 { 1.0 } else { 0.0 }).collect();
        let m = make_sampled_mode(&env, &vec![0.0; grid.len()], &grid).unwrap();
        let fam = ShapedFamily::new(m.clone(), m);
        let c = total_coincidence_vs_delay(&fam, 0.0, &[0.0, 10.0]).unwrap();
        assert_abs_diff_eq!(c.y()[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.y()[1], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn filtered_limits() {
        for w in [0.5, 2.0, 4.0] {
            let f = filtered_coincidence(w, f64::INFINITY, 0.0).unwrap();
            assert_abs_diff_eq!(f.coincidences, p_total(0.0, w), epsilon = 1e-12);
            assert_abs_diff_eq!(f.reference, 0.5, epsilon = 1e-12);
        }
        for t in [0.01, 0.5, 3.0] {
            assert_eq!(filtered_coincidence(0.0, t, 0.0).unwrap().coincidences, 0.0);
        }
        let narrow = filtered_coincidence(4.0, 0.05, 0.0).unwrap();
        assert!(narrow.dip_depth >= 0.99, "{narrow:?}");
        assert!(filtered_coincidence(1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn delayed_filter_total_matches_closed_form() {
        let f = filtered_coincidence(3.0, f64::INFINITY, 0.8).unwrap();
        assert_abs_diff_eq!(f.coincidences, p_total(0.8, 3.0), epsilon = 1e-12);
    }

    #[test]
    fn numeric_filter_matches_closed_form() {
        let e = Ensemble::new(0.0, 4.0).unwrap();
        for t in [0.05, 0.5, 2.0] {
            let g = filtered_coincidence(4.0, t, 0.0).unwrap();
            let n = filtered_coincidence_numeric(&GaussianFamily::default(), &e, t).unwrap();
            assert_abs_diff_eq!(n.coincidences, g.coincidences, epsilon = 1e-6);
            assert_abs_diff_eq!(n.reference, g.reference, epsilon = 1e-6);
            assert_abs_diff_eq!(n.dip_depth, g.dip_depth, epsilon = 1e-4);
        }
    }

    #[test]
    fn curve_validation_and_csv() {
        let ax = || (Axis::new("tau", "delta_t"), Axis::new("p", ""));
        let (a, b) = ax();
        assert!(Curve::new(vec![0.0, 1.0], vec![1.0], a, b).is_err());
        let (a, b) = ax();
        assert!(Curve::new(vec![0.0, 0.0], vec![1.0, 2.0], a, b).is_err());
        let (a, b) = ax();
        let c = Curve::new(vec![0.0, 0.5], vec![1.0, 0.1], a, b).unwrap();
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("tau [delta_t],p"));
        assert_eq!(lines.next(), Some("0.0000000000000000e0,1.0000000000000000e0"));
        assert!(averaged_coincidence_curve(&GaussianFamily::default(), 1.0, &[]).is_err());
    }

    #[test]
    fn half_width_and_zero_finding() {
        let x = taus(-3.0, 3.0, 601);
        let depth: Vec<f64> = x.iter().map(|t| (-(t * t)).exp()).collect();
        assert_abs_diff_eq!(dip_half_width(&x, &depth).unwrap(), 1.0, epsilon = 1e-4);
        assert_eq!(dip_half_width(&x, &vec![1.0; x.len()]), None);
        let y: Vec<f64> = x.iter().map(|t| (3.0 * t).sin().powi(2)).collect();
        let c = Curve::new(x, y, Axis::new("t", ""), Axis::new("y", "")).unwrap();
        let zeros = c.near_zeros(1e-3);
        assert_eq!(zeros.len(), 5);
        for (z, n) in zeros.iter().zip(-2..=2) {
            assert_abs_diff_eq!(*z, n as f64 * std::f64::consts::PI / 3.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let fam = exponential_family();
        let e = Ensemble::new(0.3, 1.0).unwrap();
        let grid = taus(-3.0, 3.0, 41);
        let many = averaged_coincidence_curve_with(&fam, &e, &grid).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let one = pool.install(|| averaged_coincidence_curve_with(&fam, &e, &grid).unwrap());
        for (a, b) in many.y().iter().zip(one.y()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn filtered_depth_is_monotone(w in 0.1f64..8.0, t in 0.01f64..3.0, grow in 1.01f64..3.0) {
            let a = filtered_coincidence(w, t, 0.0).unwrap();
            let b = filtered_coincidence(w, t * grow, 0.0).unwrap();
            prop_assert!(b.dip_depth <= a.dip_depth + 1e-12);
            prop_assert!((0.0..=1.0).contains(&a.dip_depth));
        }

        #[test]
        fn totals_are_probabilities(w in 0.0f64..6.0, dt in -4.0f64..4.0) {
            let c = total_coincidence_vs_delay(&GaussianFamily::default(), w, &[dt]).unwrap();
            prop_assert!(c.y()[0] >= 0.0 && c.y()[0] <= 0.5 + 1e-6);
            prop_assert!((c.y()[0] - p_total(dt, w)).abs() < 1e-4);
        }
    }
}
