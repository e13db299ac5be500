//! Exact draws of one detection pair from the two-photon distribution.
//!
//! [`PairSampler`] uses composition. A candidate `(x, y)` is drawn from the
//! mixture `M = ½(P₁(x)P₂(y) + P₂(x)P₁(y))` of single-photon densities, which
//! equals the sum `J + S` of the opposite-port density `J` (port 3 at `x`,
//! port 4 at `y`) and the same-port density `S`. The outcome is then "opposite"
//! with probability `J/M`, and "both in port 3" or "both in port 4" with
//! probability `S/(2M)` each. No proposal is ever wasted unless `M = 0`.
//!
//! [`RejectionSampler`] draws the port category first and then the times by
//! rejection from a separable Gaussian proposal. It is slower and serves as an
//! independent cross-check.

use rand::{Rng, RngExt};
use rand_distr::{Distribution, Normal};

use super::DetectionPair;
use crate::error::{Error, Result};
use crate::interference::{port_pair_probabilities, Port, PortPairProbabilities};
use crate::wavepacket::{common_grid, ModeFunction, TimeGrid};

pub const DEFAULT_REJECTION_BUDGET: usize = 10_000;

/// Draws from a single-photon density `|ζ(t)|²`.
#[derive(Debug, Clone)]
enum Marginal {
    /// `|ζ|²` of a Gaussian mode is a normal density with σ = 1/2.
    Normal(Normal<f64>),
    /// Piecewise-linear density on a uniform grid.
    Table {
        grid: TimeGrid,
        density: Vec<f64>,
        cdf: Vec<f64>,
    },
}

impl Marginal {
    fn new(mode: &ModeFunction) -> Result<Self> {
        match mode {
            ModeFunction::Gaussian(g) => Ok(Marginal::Normal(
                Normal::new(g.center, 0.5).map_err(|e| Error::invalid("mode", e.to_string()))?,
            )),
            ModeFunction::Sampled(s) => {
                let grid = *s.grid();
                let density: Vec<f64> = s.amplitudes().iter().map(|a| a.norm_sqr()).collect();
                let h = grid.spacing();
                let mut cdf = Vec::with_capacity(density.len());
                let mut acc = 0.0;
                cdf.push(0.0);
                for w in density.windows(2) {
                    acc += 0.5 * h * (w[0] + w[1]);
                    cdf.push(acc);
                }
                if !(acc > 0.0) {
                    return Err(Error::NotNormalizable);
                }
                Ok(Marginal::Table { grid, density, cdf })
            }
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Marginal::Normal(n) => n.sample(rng),
            Marginal::Table { grid, density, cdf } => {
                let total = cdf[cdf.len() - 1];
                let u = rng.random::<f64>() * total;
                // Last cell whose cumulative mass does not exceed u.
                let i = cdf.partition_point(|&c| c <= u).saturating_sub(1).min(cdf.len() - 2);
                let (p0, p1) = (density[i], density[i + 1]);
                let h = grid.spacing();
                let r = u - cdf[i];
                // Root of p0·s + (p1 − p0)·s²/(2h) = r in the stable form.
                let disc = (p0 * p0 + 2.0 * (p1 - p0) * r / h).max(0.0);
                let denom = p0 + disc.sqrt();
                let s = if denom > 0.0 { 2.0 * r / denom } else { 0.0 };
                grid.point(i) + s.clamp(0.0, h)
            }
        }
    }
}

/// Composition sampler for one fixed mode pair.
#[derive(Debug, Clone)]
pub struct PairSampler {
    m1: ModeFunction,
    m2: ModeFunction,
    marginal1: Marginal,
    marginal2: Marginal,
    budget: usize,
}

impl PairSampler {
    pub fn new(m1: &ModeFunction, m2: &ModeFunction) -> Result<Self> {
        Ok(PairSampler {
            marginal1: Marginal::new(m1)?,
            marginal2: Marginal::new(m2)?,
            m1: m1.clone(),
            m2: m2.clone(),
            budget: DEFAULT_REJECTION_BUDGET,
        })
    }

    /// Maximum number of candidates with vanishing mixture density tolerated per event.
    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget.max(1);
        self
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<DetectionPair> {
        for _ in 0..self.budget {
            let (x, y) = if rng.random::<bool>() {
                (self.marginal1.sample(rng), self.marginal2.sample(rng))
            } else {
                (self.marginal2.sample(rng), self.marginal1.sample(rng))
            };
            let a = self.m1.amplitude(y) * self.m2.amplitude(x);
            let b = self.m2.amplitude(y) * self.m1.amplitude(x);
            let joint = 0.25 * (a - b).norm_sqr();
            let same = 0.25 * (a + b).norm_sqr();
            let mixture = joint + same;
            if !(mixture > 0.0) {
                continue;
            }
            let u = rng.random::<f64>() * mixture;
            let (p, q) = if u < joint {
                (Port::Three, Port::Four)
            } else if u < joint + 0.5 * same {
                (Port::Three, Port::Three)
            } else {
                (Port::Four, Port::Four)
            };
            return Ok(DetectionPair::ordered(p, x, q, y));
        }
        Err(Error::RejectionBudgetExceeded { budget: self.budget })
    }
}

/// One event from the pair `(m1, m2)`.
pub fn sample_pair<R: Rng + ?Sized>(m1: &ModeFunction, m2: &ModeFunction, rng: &mut R) -> Result<DetectionPair> {
    PairSampler::new(m1, m2)?.sample(rng)
}

/// Category-first rejection sampler with a separable Gaussian proposal.
#[derive(Debug, Clone)]
pub struct RejectionSampler {
    m1: ModeFunction,
    m2: ModeFunction,
    probabilities: PortPairProbabilities,
    proposal: Normal<f64>,
    envelope_opposite: f64,
    envelope_same: f64,
    budget: usize,
}

/// Points per axis used when scanning for the envelope constant.
const ENVELOPE_SCAN_POINTS: usize = 512;

impl RejectionSampler {
    pub fn new(m1: &ModeFunction, m2: &ModeFunction) -> Result<Self> {
        let probabilities = port_pair_probabilities(m1, m2)?;
        let grid = common_grid(m1, m2)?;
        // Proposal: a normal covering the average single-photon density,
        // widened so its tails dominate the target's.
        let (mut m0, mut mean, mut second) = (0.0, 0.0, 0.0);
        for (i, t) in grid.points().enumerate() {
            let w = grid.trapezoid_weight(i) * 0.5 * (m1.density(t) + m2.density(t));
            m0 += w;
            mean += w * t;
            second += w * t * t;
        }
        mean /= m0;
        let sd = (second / m0 - mean * mean).max(0.0).sqrt();
        let proposal =
            Normal::new(mean, (1.5 * sd).max(0.5)).map_err(|e| Error::invalid("mode", e.to_string()))?;

        let stride = grid.len().div_ceil(ENVELOPE_SCAN_POINTS).max(1);
        let pts: Vec<f64> = grid.points().step_by(stride).collect();
        let q: Vec<f64> = pts.iter().map(|&t| normal_pdf(&proposal, t)).collect();
        let (mut env_opp, mut env_same) = (0.0f64, 0.0f64);
        for (i, &x) in pts.iter().enumerate() {
            for (j, &y) in pts.iter().enumerate() {
                let (joint, same) = densities(m1, m2, x, y);
                let qq = q[i] * q[j];
                if qq > 0.0 {
                    env_opp = env_opp.max(joint / qq);
                    env_same = env_same.max(same / qq);
                }
            }
        }
        Ok(RejectionSampler {
            m1: m1.clone(),
            m2: m2.clone(),
            probabilities,
            proposal,
            envelope_opposite: 1.1 * env_opp,
            envelope_same: 1.1 * env_same,
            budget: DEFAULT_REJECTION_BUDGET,
        })
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget.max(1);
        self
    }

    pub fn probabilities(&self) -> &PortPairProbabilities {
        &self.probabilities
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<DetectionPair> {
        let p = &self.probabilities;
        let u = rng.random::<f64>() * p.total();
        let (first, second, opposite) = if u < p.opposite {
            (Port::Three, Port::Four, true)
        } else if u < p.opposite + p.same_3 {
            (Port::Three, Port::Three, false)
        } else {
            (Port::Four, Port::Four, false)
        };
        let envelope = if opposite { self.envelope_opposite } else { self.envelope_same };
        for _ in 0..self.budget {
            let x = self.proposal.sample(rng);
            let y = self.proposal.sample(rng);
            let (joint, same) = densities(&self.m1, &self.m2, x, y);
            let target = if opposite { joint } else { same };
            let bound = envelope * normal_pdf(&self.proposal, x) * normal_pdf(&self.proposal, y);
            if rng.random::<f64>() * bound < target {
                return Ok(DetectionPair::ordered(first, x, second, y));
            }
        }
        Err(Error::RejectionBudgetExceeded { budget: self.budget })
    }
}

/// Opposite-port (port 3 at `x`, port 4 at `y`) and same-port densities.
fn densities(m1: &ModeFunction, m2: &ModeFunction, x: f64, y: f64) -> (f64, f64) {
    let a = m1.amplitude(y) * m2.amplitude(x);
    let b = m2.amplitude(y) * m1.amplitude(x);
    (0.25 * (a - b).norm_sqr(), 0.25 * (a + b).norm_sqr())
}

fn normal_pdf(n: &Normal<f64>, x: f64) -> f64 {
    let z = (x - n.mean()) / n.std_dev();
    (-0.5 * z * z).exp() / (n.std_dev() * (2.0 * std::f64::consts::PI).sqrt())
}
