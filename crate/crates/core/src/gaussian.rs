//! Closed forms for two equally long Fourier-limited Gaussian photons.
//!
//! Photon 1 is centred at `+δτ/2` with carrier `ω − Δ/2`, photon 2 at `−δτ/2`
//! with carrier `ω + Δ/2`. Times are in pulse widths, frequencies in inverse
//! pulse widths. The mean carrier `ω` drops out of every observable.
//!
//! `p_2hnu` is defined for signed `τ` (port-4 time minus port-3 time) and is
//! even in `τ`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wavepacket::ModeFunction;

/// Arrival delay, detuning, mean carrier and inhomogeneous width of a photon pair.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhotonPairConfig {
    /// Arrival delay `δτ`.
    pub delta_tau: f64,
    /// Carrier difference `Δ = ω₂ − ω₁`.
    pub delta: f64,
    /// Mean carrier `ω`.
    pub omega_mean: f64,
    /// Inhomogeneous width `δω` (half width at 1/e) of the detuning distribution.
    pub delta_omega: f64,
}

impl PhotonPairConfig {
    pub fn new(delta_tau: f64, delta: f64, omega_mean: f64, delta_omega: f64) -> Result<Self> {
        let cfg = PhotonPairConfig {
            delta_tau,
            delta,
            omega_mean,
            delta_omega,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("delta_tau", self.delta_tau),
            ("delta", self.delta),
            ("omega_mean", self.omega_mean),
            ("delta_omega", self.delta_omega),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(field, format!("must be finite, got {v}")));
            }
        }
        if self.delta_omega < 0.0 {
            return Err(Error::invalid(
                "delta_omega",
                format!("must be >= 0, got {}", self.delta_omega),
            ));
        }
        Ok(())
    }

    /// The analytic mode pair for detuning `delta` (ignoring `self.delta`).
    pub fn modes_with_detuning(&self, delta: f64) -> Result<(ModeFunction, ModeFunction)> {
        Ok((
            ModeFunction::gaussian(self.delta_tau / 2.0, self.omega_mean - delta / 2.0)?,
            ModeFunction::gaussian(-self.delta_tau / 2.0, self.omega_mean + delta / 2.0)?,
        ))
    }

    /// The analytic mode pair `(ζ₁, ζ₂)`.
    pub fn modes(&self) -> Result<(ModeFunction, ModeFunction)> {
        self.modes_with_detuning(self.delta)
    }
}

/// `cosh(x)·exp(y) − cos(z)·exp(y)`, evaluated without overflow for large `|x|`.
fn beat_term(x: f64, z: f64, y: f64) -> f64 {
    let ax = x.abs();
    if ax > 700.0 {
        0.5 * ((ax + y).exp() + (y - ax).exp()) - z.cos() * y.exp()
    } else {
        (ax.cosh() - z.cos()) * y.exp()
    }
}

/// Joint density for a port-3 click at `t0` and a port-4 click at `t0 + tau`:
/// `[cosh(2τδτ) − cos(τΔ)]/π · exp(−4t₀(t₀+τ) − δτ² − 2τ²)`.
pub fn p_joint_gaussian(t0: f64, tau: f64, cfg: &PhotonPairConfig) -> f64 {
    let dt = cfg.delta_tau;
    let exponent = -4.0 * t0 * (t0 + tau) - dt * dt - 2.0 * tau * tau;
    beat_term(2.0 * tau * dt, tau * cfg.delta, exponent) / PI
}

/// Coincidence density versus detection-time difference,
/// `[cosh(2τδτ) − cos(τΔ)]/(2√π) · exp(−δτ² − τ²)`.
pub fn p_2hnu(tau: f64, cfg: &PhotonPairConfig) -> f64 {
    let dt = cfg.delta_tau;
    beat_term(2.0 * tau * dt, tau * cfg.delta, -dt * dt - tau * tau) / (2.0 * PI.sqrt())
}

/// Dephased (distinguishable-photon) reference for [`p_2hnu`]:
/// `cosh(2τδτ)·exp(−δτ² − τ²)/(2√π)`.
pub fn p_2hnu_dephased(tau: f64, delta_tau: f64) -> f64 {
    let x = (2.0 * tau * delta_tau).abs();
    let y = -delta_tau * delta_tau - tau * tau;
    0.25 * ((x + y).exp() + (y - x).exp()) / PI.sqrt()
}

/// Gaussian detuning distribution `exp(−(Δ/δω)²)/(δω√π)`.
pub fn freq_distribution(delta: f64, delta_omega: f64) -> Result<f64> {
    if delta_omega == 0.0 {
        return Err(Error::DegenerateWidth);
    }
    if !(delta_omega > 0.0) || !delta_omega.is_finite() {
        return Err(Error::invalid("delta_omega", format!("must be > 0, got {delta_omega}")));
    }
    let x = delta / delta_omega;
    Ok((-x * x).exp() / (delta_omega * PI.sqrt()))
}

/// Detuning-averaged coincidence density for simultaneously arriving photons,
/// `exp(−τ²)/(2√π) · (1 − exp(−(τδω/2)²))`. Zero for `δω = 0`.
pub fn p_inh(tau: f64, delta_omega: f64) -> f64 {
    if delta_omega == 0.0 {
        return 0.0;
    }
    let x = tau * delta_omega / 2.0;
    (-tau * tau).exp() / (2.0 * PI.sqrt()) * -(-x * x).exp_m1()
}

/// Detuning-averaged coincidence density at arbitrary arrival delay,
/// `[cosh(2τδτ) − exp(−(τδω/2)²)] · exp(−δτ² − τ²)/(2√π)`; reduces to
/// [`p_inh`] at `δτ = 0`.
pub fn p_inh_delayed(tau: f64, delta_tau: f64, delta_omega: f64) -> f64 {
    let x = tau * delta_omega / 2.0;
    p_2hnu_dephased(tau, delta_tau) - (-x * x - delta_tau * delta_tau - tau * tau).exp() / (2.0 * PI.sqrt())
}

/// Total coincidence probability `1/2 − exp(−δτ²)/√(4+δω²)`.
pub fn p_total(delta_tau: f64, delta_omega: f64) -> f64 {
    0.5 - (-delta_tau * delta_tau).exp() / (4.0 + delta_omega * delta_omega).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interference::joint_density;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn cfg(delta_tau: f64, delta: f64, delta_omega: f64) -> PhotonPairConfig {
        PhotonPairConfig::new(delta_tau, delta, 0.0, delta_omega).unwrap()
    }

    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let n = n + n % 2;
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn joint_reference_values() {
        let c = cfg(0.0, PI, 0.0);
        // Oracle: the general joint density evaluated with the mode pair.
        let (m1, m2) = c.modes().unwrap();
        let oracle = joint_density(&m1, &m2, 0.0, 1.0);
        let frozen = 0.086_157_117_207_394_52;
        assert_abs_diff_eq!(oracle, frozen, epsilon = 1e-15);
        assert_abs_diff_eq!(p_joint_gaussian(0.0, 1.0, &c), frozen, epsilon = 1e-15);
        assert_abs_diff_eq!(frozen, 2.0 * (-2.0f64).exp() / PI, epsilon = 1e-16);
        for t0 in [-3.0, 0.0, 1.7] {
            assert_eq!(p_joint_gaussian(t0, 0.0, &cfg(1.3, 2.0, 0.0)), 0.0);
        }
    }

    #[test]
    fn joint_symmetric_under_time_reflection() {
        let c = cfg(0.9, 2.0, 0.0);
        for (t0, tau) in [(0.3, 0.8), (-1.0, 2.0), (0.0, -0.5)] {
            assert_abs_diff_eq!(p_joint_gaussian(t0, tau, &c), p_joint_gaussian(-t0 - tau, tau, &c), epsilon = 1e-15);
        }
    }

    #[test]
    fn two_photon_reference_values() {
        let c = cfg(0.0, PI, 0.0);
        let oracle = simpson(|t0| p_joint_gaussian(t0, 1.0, &c), -8.0, 8.0, 4000);
        let frozen = 0.207_553_748_710_297_35;
        assert_abs_diff_eq!(oracle, frozen, epsilon = 1e-12);
        assert_abs_diff_eq!(p_2hnu(1.0, &c), frozen, epsilon = 1e-15);
        for dt in [0.0, 0.5, 2.0] {
            assert_eq!(p_2hnu(0.0, &cfg(dt, 3.0, 0.0)), 0.0);
        }
        for tau in [-2.0, -0.1, 0.5, 3.0] {
            assert_eq!(p_2hnu(tau, &cfg(0.0, 0.0, 0.0)), 0.0);
        }
    }

    #[test]
    fn beat_zeros() {
        let delta = 3.0 * PI;
        let c = cfg(0.0, delta, 0.0);
        for n in -3i32..=3 {
            let tau = 2.0 * PI * n as f64 / delta;
            assert!(p_2hnu(tau, &c).abs() < 1e-15);
        }
    }

    #[test]
    fn frequency_distribution() {
        for w in [0.5, 1.0, 4.0] {
            let mass = simpson(|d| freq_distribution(d, w).unwrap(), -12.0 * w, 12.0 * w, 4000);
            assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(freq_distribution(0.0, w).unwrap(), 1.0 / (w * PI.sqrt()), epsilon = 1e-15);
            let ratio = freq_distribution(w, w).unwrap() / freq_distribution(0.0, w).unwrap();
            assert_abs_diff_eq!(ratio, (-1.0f64).exp(), epsilon = 1e-15);
        }
        assert!(matches!(freq_distribution(1.0, 0.0), Err(Error::DegenerateWidth)));
        assert!(matches!(freq_distribution(1.0, -1.0), Err(Error::InvalidParameter { .. })));
    }

    #[test]
    fn inhomogeneous_dip_reference_values() {
        let oracle = simpson(
            |d| freq_distribution(d, 2.0).unwrap() * p_2hnu(1.0, &cfg(0.0, d, 0.0)),
            -30.0,
            30.0,
            20000,
        );
        let frozen = 0.065_599_495_810_857_60;
        assert_abs_diff_eq!(oracle, frozen, epsilon = 1e-12);
        assert_abs_diff_eq!(p_inh(1.0, 2.0), frozen, epsilon = 1e-15);
        for w in [0.0, 0.5, 2.0] {
            assert_eq!(p_inh(0.0, w), 0.0);
        }
        assert_eq!(p_inh(1.3, 0.0), 0.0);
        // 1/e point of the dip relative to the non-interfering envelope.
        for w in [1.0, 2.0, 4.0] {
            let tau = 2.0 / w;
            let depth = 1.0 - p_inh(tau, w) / p_2hnu_dephased(tau, 0.0);
            assert_abs_diff_eq!(depth, (-1.0f64).exp(), epsilon = 1e-14);
        }
    }

    #[test]
    fn delayed_inhomogeneous_density_reduces_and_integrates() {
        for tau in [-1.0, 0.2, 2.0] {
            assert_abs_diff_eq!(p_inh_delayed(tau, 0.0, 2.0), p_inh(tau, 2.0), epsilon = 1e-15);
        }
        let total = simpson(|t| p_inh_delayed(t, 0.7, 3.0), -12.0, 12.0, 8000);
        assert_abs_diff_eq!(total, p_total(0.7, 3.0), epsilon = 1e-12);
    }

    #[test]
    fn total_coincidence_reference_values() {
        assert_eq!(p_total(0.0, 0.0), 0.0);
        assert_abs_diff_eq!(p_total(40.0, 3.0), 0.5, epsilon = 1e-15);
        let oracle = simpson(
            |d| {
                freq_distribution(d, 2.0).unwrap()
                    * simpson(|tau| p_2hnu(tau, &cfg(0.0, d, 0.0)), -10.0, 10.0, 2000)
            },
            -24.0,
            24.0,
            2400,
        );
        let frozen = 0.146_446_609_406_726_2;
        assert_abs_diff_eq!(oracle, frozen, epsilon = 1e-9);
        assert_abs_diff_eq!(p_total(0.0, 2.0), frozen, epsilon = 1e-15);
    }

    #[test]
    fn large_arguments_stay_finite() {
        let c = cfg(30.0, 1.0, 0.0);
        for tau in [29.0, 30.0, 31.0] {
            let v = p_2hnu(tau, &c);
            assert!(v.is_finite() && v >= 0.0);
        }
        let expected = (1.0 / (4.0 * PI.sqrt())) * (-(0.0f64)).exp();
        assert_abs_diff_eq!(p_2hnu(30.0, &c), expected, epsilon = 1e-12);
        assert!(p_joint_gaussian(-15.0, 30.0, &c).is_finite());
    }

    #[test]
    fn config_validation() {
        assert!(matches!(
            PhotonPairConfig::new(0.0, 0.0, 0.0, -1.0),
            Err(Error::InvalidParameter { field: "delta_omega", .. })
        ));
        assert!(matches!(
            PhotonPairConfig::new(f64::NAN, 0.0, 0.0, 1.0),
            Err(Error::InvalidParameter { field: "delta_tau", .. })
        ));
    }

    proptest! {
        #[test]
        fn mean_carrier_is_irrelevant(
            omega in -50.0f64..50.0, dt in -2.0f64..2.0, d in -10.0f64..10.0,
            t0 in -2.0f64..2.0, tau in -3.0f64..3.0,
        ) {
            let a = PhotonPairConfig::new(dt, d, 0.0, 0.0).unwrap();
            let b = PhotonPairConfig::new(dt, d, omega, 0.0).unwrap();
            prop_assert_eq!(p_joint_gaussian(t0, tau, &a), p_joint_gaussian(t0, tau, &b));
            prop_assert_eq!(p_2hnu(tau, &a), p_2hnu(tau, &b));
            let (a1, a2) = a.modes().unwrap();
            let (b1, b2) = b.modes().unwrap();
            let ja = joint_density(&a1, &a2, t0, tau);
            let jb = joint_density(&b1, &b2, t0, tau);
            prop_assert!((ja - jb).abs() <= 1e-12 * ja.max(1e-12));
        }

        #[test]
        fn total_coincidence_is_monotone(dt in 0.0f64..3.0, w in 0.0f64..6.0, step in 0.001f64..0.5) {
            prop_assert!(p_total(dt + step, w) >= p_total(dt, w));
            prop_assert!(p_total(-dt - step, w) >= p_total(-dt, w));
            prop_assert!(p_total(dt, w + step) >= p_total(dt, w));
        }

        #[test]
        fn dip_width_is_independent_of_bandwidth(w in 0.0f64..8.0, dt in -3.0f64..3.0) {
            let depth0 = 0.5 - p_total(0.0, w);
            let shape = (0.5 - p_total(dt, w)) / depth0;
            prop_assert!((shape - (-dt * dt).exp()).abs() < 1e-12);
            prop_assert!((depth0 - 1.0 / (4.0 + w * w).sqrt()).abs() < 1e-15);
        }
    }
}
