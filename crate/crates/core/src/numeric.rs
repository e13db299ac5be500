//! Quadrature helpers and number formatting.

use std::num::NonZeroUsize;

use gauss_quad::hermite::GaussHermite;
use gauss_quad::legendre::GaussLegendre;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Nodes `Δ_i` and weights `w_i` with `Σ w_i g(Δ_i) ≈ ∫ g(Δ) f(Δ) dΔ` for the
/// normalized Gaussian `f(Δ) = exp(-((Δ-mean)/width)²)/(width·√π)`.
pub fn gaussian_weighted_rule(mean: f64, width: f64, nodes: usize) -> Vec<(f64, f64)> {
    let rule = GaussHermite::new(NonZeroUsize::new(nodes).expect("at least one node"));
    let norm = std::f64::consts::PI.sqrt().recip();
    rule.iter()
        .map(|&(x, w)| (mean + width * x, w * norm))
        .collect()
}

/// Composite Gauss–Legendre quadrature of `f` over `[a, b]`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    if a == b {
        return 0.0;
    }
    let rule = GaussLegendre::new(NonZeroUsize::new(16).unwrap());
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|p| {
            let lo = a + p as f64 * h;
            rule.integrate(lo, lo + h, &f)
        })
        .sum()
}
