//! Detection densities behind a 50:50 beam splitter fed with one photon in
//! mode `ζ₁` (port 1) and one in mode `ζ₂` (port 2).
//!
//! Output fields are `E₃ = (E₁ + E₂)/√2` and `E₄ = (E₁ - E₂)/√2`. A
//! detection "at port 3 at `t0` and port 4 at `t0 + τ`" has density
//! `¼|ζ₁(t₀+τ)ζ₂(t₀) − ζ₂(t₀+τ)ζ₁(t₀)|²` for either sign of `τ`; the
//! same-port densities carry the `+` combination.
//!
//! Event bookkeeping: opposite-port densities integrate over the full
//! `(t₀, τ)` plane, same-port densities over `τ ≥ 0` only, since swapping two
//! clicks on one detector is the same event. With that convention the four
//! port-pair probabilities sum to one.

use std::fmt;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{fmt_f64, gaussian_weighted_rule};
use crate::wavepacket::{
    common_grid, conjugate_time_grid, from_spectrum, overlap, par_map_indices, ModeFunction,
    SpectralAmplitude,
};

/// Beam-splitter output port.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Port {
    Three,
    Four,
}

impl Port {
    pub fn label(self) -> u8 {
        match self {
            Port::Three => 3,
            Port::Four => 4,
        }
    }
}

impl TryFrom<u8> for Port {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            3 => Ok(Port::Three),
            4 => Ok(Port::Four),
            other => Err(format!("output ports are 3 and 4, got {other}")),
        }
    }
}

impl From<Port> for u8 {
    fn from(p: Port) -> u8 {
        p.label()
    }
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// Ports of the first and second detection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PortPair {
    pub first: Port,
    pub second: Port,
}

impl PortPair {
    pub fn is_opposite(&self) -> bool {
        self.first != self.second
    }
}

/// Probabilities of the three distinguishable outcome categories.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PortPairProbabilities {
    /// Both photons at port 3.
    pub same_3: f64,
    /// Both photons at port 4.
    pub same_4: f64,
    /// One photon at each port, either order.
    pub opposite: f64,
}

impl PortPairProbabilities {
    pub fn total(&self) -> f64 {
        self.same_3 + self.same_4 + self.opposite
    }
}

/// Single photon left after the first click: amplitude `weight_mode1` for the
/// photon still being in input mode 1, `weight_mode2` for mode 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalState {
    pub weight_mode1: Complex64,
    pub weight_mode2: Complex64,
}

impl ConditionalState {
    pub fn norm_sq(&self) -> f64 {
        self.weight_mode1.norm_sqr() + self.weight_mode2.norm_sqr()
    }
}

#[inline]
fn exchange_terms(m1: &ModeFunction, m2: &ModeFunction, t0: f64, tau: f64) -> (Complex64, Complex64) {
    let t1 = t0 + tau;
    (m1.amplitude(t1) * m2.amplitude(t0), m2.amplitude(t1) * m1.amplitude(t0))
}

/// Density of a port-3 click at `t0` and a port-4 click at `t0 + tau`.
pub fn joint_density(m1: &ModeFunction, m2: &ModeFunction, t0: f64, tau: f64) -> f64 {
    let (a, b) = exchange_terms(m1, m2, t0, tau);
    0.25 * (a - b).norm_sqr()
}

/// Density of two clicks on the same detector (3 or 4, identical by symmetry)
/// at `t0` and `t0 + tau`.
pub fn same_port_density(m1: &ModeFunction, m2: &ModeFunction, t0: f64, tau: f64) -> f64 {
    let (a, b) = exchange_terms(m1, m2, t0, tau);
    0.25 * (a + b).norm_sqr()
}

/// Density of a click at `port` at `t0` with no condition on the other photon.
/// Carries no interference term, so both ports give the same value.
pub fn first_detection_density(m1: &ModeFunction, m2: &ModeFunction, _port: Port, t0: f64) -> f64 {
    0.5 * (m1.density(t0) + m2.density(t0))
}

/// State of the remaining photon after a click at port 3 at `t0`.
pub fn conditional_state(m1: &ModeFunction, m2: &ModeFunction, t0: f64) -> Result<ConditionalState> {
    let z1 = m1.amplitude(t0);
    let z2 = m2.amplitude(t0);
    let norm_sq = z1.norm_sqr() + z2.norm_sqr();
    if !(norm_sq > 0.0) {
        return Err(Error::ZeroDensityInstant { t0 });
    }
    let norm = norm_sq.sqrt();
    Ok(ConditionalState {
        weight_mode1: z2 / norm,
        weight_mode2: z1 / norm,
    })
}

/// Density for the remaining photon to click at `port` at time `t`:
/// `|w₁ζ₁(t) ± w₂ζ₂(t)|²/2`, `+` for port 3 and `−` for port 4.
pub fn conditional_density(
    state: &ConditionalState,
    m1: &ModeFunction,
    m2: &ModeFunction,
    port: Port,
    t: f64,
) -> f64 {
    let a = state.weight_mode1 * m1.amplitude(t);
    let b = state.weight_mode2 * m2.amplitude(t);
    match port {
        Port::Three => 0.5 * (a + b).norm_sqr(),
        Port::Four => 0.5 * (a - b).norm_sqr(),
    }
}

/// Opposite-port density once the mutual phase of the photons is averaged
/// out: `¼(P₁(t₀)P₂(t₀+τ) + P₂(t₀)P₁(t₀+τ))`.
pub fn dephased_joint_density(m1: &ModeFunction, m2: &ModeFunction, t0: f64, tau: f64) -> f64 {
    let t1 = t0 + tau;
    0.25 * (m1.density(t0) * m2.density(t1) + m2.density(t0) * m1.density(t1))
}

/// Joint density computed from spectral amplitudes: each spectrum is
/// transformed back to a mode on its conjugate time grid, then evaluated as
/// in [`joint_density`].
pub fn joint_density_spectral(
    s1: &SpectralAmplitude,
    s2: &SpectralAmplitude,
    t0: f64,
    tau: f64,
) -> Result<f64> {
    let (m1, m2) = modes_from_spectra(s1, s2)?;
    Ok(joint_density(&m1, &m2, t0, tau))
}

/// [`joint_density_spectral`] on the product grid `t0s × taus`, row-major in `t0`.
pub fn joint_density_spectral_surface(
    s1: &SpectralAmplitude,
    s2: &SpectralAmplitude,
    t0s: &[f64],
    taus: &[f64],
) -> Result<Vec<f64>> {
    let (m1, m2) = modes_from_spectra(s1, s2)?;
    Ok(joint_density_surface(&m1, &m2, t0s, taus))
}

fn modes_from_spectra(s1: &SpectralAmplitude, s2: &SpectralAmplitude) -> Result<(ModeFunction, ModeFunction)> {
    let m1 = from_spectrum(s1, &conjugate_time_grid(s1.grid(), 0.0))?;
    let m2 = from_spectrum(s2, &conjugate_time_grid(s2.grid(), 0.0))?;
    Ok((m1, m2))
}

/// [`joint_density`] on the product grid `t0s × taus`, row-major in `t0`.
pub fn joint_density_surface(m1: &ModeFunction, m2: &ModeFunction, t0s: &[f64], taus: &[f64]) -> Vec<f64> {
    let rows = par_map_indices(t0s.len(), |i| {
        taus.iter()
            .map(|&tau| joint_density(m1, m2, t0s[i], tau))
            .collect::<Vec<_>>()
    });
    rows.into_iter().flatten().collect()
}

/// Header of [`write_surface_csv`].
pub const SURFACE_CSV_HEADER: &str = "t0,tau,density";

/// Writes a row-major `t0s × taus` surface as `t0,tau,density` triples.
pub fn write_surface_csv<W: Write>(t0s: &[f64], taus: &[f64], values: &[f64], mut out: W) -> Result<()> {
    if values.len() != t0s.len() * taus.len() {
        return Err(Error::invalid(
            "values",
            format!("expected {} values, got {}", t0s.len() * taus.len(), values.len()),
        ));
    }
    writeln!(out, "{SURFACE_CSV_HEADER}")?;
    for (i, &t0) in t0s.iter().enumerate() {
        for (j, &tau) in taus.iter().enumerate() {
            writeln!(out, "{},{},{}", fmt_f64(t0), fmt_f64(tau), fmt_f64(values[i * taus.len() + j]))?;
        }
    }
    Ok(())
}

/// Port-pair probabilities from the overlap `c = ∫ζ₁*ζ₂`:
/// opposite `(1−|c|²)/2`, each same-port outcome `(1+|c|²)/4`.
pub fn port_pair_probabilities(m1: &ModeFunction, m2: &ModeFunction) -> Result<PortPairProbabilities> {
    let c2 = overlap(m1, m2)?.norm_sqr().min(1.0);
    Ok(PortPairProbabilities {
        same_3: 0.25 * (1.0 + c2),
        same_4: 0.25 * (1.0 + c2),
        opposite: 0.5 * (1.0 - c2),
    })
}

/// Port-pair probabilities by 2D trapezoid quadrature of the densities over
/// the [`common_grid`] of the pair.
pub fn port_pair_probabilities_quadrature(m1: &ModeFunction, m2: &ModeFunction) -> Result<PortPairProbabilities> {
    let grid = common_grid(m1, m2)?;
    let a = m1.sample(&grid);
    let b = m2.sample(&grid);
    let n = grid.len();
    // Integrate over (t_port3, t_port4) on the grid lattice; same-port over the
    // full plane then halved.
    let rows = par_map_indices(n, |i| {
        let (mut opp, mut same) = (0.0, 0.0);
        for j in 0..n {
            let x = a[j] * b[i];
            let y = b[j] * a[i];
            let w = grid.trapezoid_weight(j);
            opp += w * (x - y).norm_sqr();
            same += w * (x + y).norm_sqr();
        }
        let wi = grid.trapezoid_weight(i);
        (0.25 * wi * opp, 0.25 * wi * same)
    });
    let (opposite, same) = rows
        .into_iter()
        .fold((0.0, 0.0), |(o, s), (ro, rs)| (o + ro, s + rs));
    Ok(PortPairProbabilities {
        same_3: 0.5 * same,
        same_4: 0.5 * same,
        opposite,
    })
}

/// `∫dt₀` of the coherent and the dephased opposite-port densities at each `τ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauMarginal {
    pub coherent: f64,
    pub dephased: f64,
}

/// Gauss–Hermite nodes for the `t0` integral of two analytic Gaussians.
const GAUSSIAN_PAIR_NODES: usize = 32;

/// Coincidence density versus detection-time difference, integrating
/// [`joint_density`] and [`dephased_joint_density`] over `t0`.
///
/// Sampled modes use the trapezoid rule on the [`common_grid`] of the pair.
/// For two analytic Gaussians the carrier phases cancel in both integrands,
/// which are then Gaussians of `t0` with exponent `−4(t0 − m)²`,
/// `m = (c₁ + c₂ − τ)/2`; a Gauss–Hermite rule fitted to that envelope is used.
pub fn tau_marginals(m1: &ModeFunction, m2: &ModeFunction, taus: &[f64]) -> Result<Vec<TauMarginal>> {
    if let (ModeFunction::Gaussian(g1), ModeFunction::Gaussian(g2)) = (m1, m2) {
        let rule = gaussian_weighted_rule(0.0, 0.5, GAUSSIAN_PAIR_NODES);
        let norm = 0.5 * std::f64::consts::PI.sqrt();
        return Ok(par_map_indices(taus.len(), |k| {
            let tau = taus[k];
            let m = 0.5 * (g1.center + g2.center - tau);
            let (mut coherent, mut dephased) = (0.0, 0.0);
            for &(u, w) in &rule {
                // Weight relative to Lebesgue measure: w / f(u).
                let w = w * norm * (2.0 * u).powi(2).exp();
                let t0 = m + u;
                coherent += w * joint_density(m1, m2, t0, tau);
                dephased += w * dephased_joint_density(m1, m2, t0, tau);
            }
            TauMarginal { coherent, dephased }
        }));
    }
    let grid = common_grid(m1, m2)?;
    let a = m1.sample(&grid);
    let b = m2.sample(&grid);
    let weights: Vec<f64> = (0..grid.len()).map(|i| grid.trapezoid_weight(i)).collect();
    Ok(par_map_indices(taus.len(), |k| {
        let a_shift = m1.sample_shifted(&grid, taus[k]);
        let b_shift = m2.sample_shifted(&grid, taus[k]);
        let (mut coherent, mut dephased) = (0.0, 0.0);
        for i in 0..weights.len() {
            let x = a_shift[i] * b[i];
            let y = b_shift[i] * a[i];
            coherent += weights[i] * (x - y).norm_sqr();
            dephased += weights[i] * (x.norm_sqr() + y.norm_sqr());
        }
        TauMarginal {
            coherent: 0.25 * coherent,
            dephased: 0.25 * dephased,
        }
    }))
}

/// Numeric `∫ joint_density(t0, τ) dt0` at each `τ`.
pub fn coincidence_density(m1: &ModeFunction, m2: &ModeFunction, taus: &[f64]) -> Result<Vec<f64>> {
    Ok(tau_marginals(m1, m2, taus)?.into_iter().map(|m| m.coherent).collect())
}
