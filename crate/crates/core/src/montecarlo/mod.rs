//! Seeded click streams of detection pairs, coincidence histograms and
//! binomial estimates of the coincidence probability.
//!
//! Events are generated in chunks of [`CHUNK_SIZE`] pairs. Chunk `k` draws from
//! a ChaCha20 generator seeded with `seed_from_u64(seed)` on stream `k`, so a
//! log depends only on `(config, family, n_pairs, seed)` and not on the number
//! of worker threads.

mod sampler;

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

pub use self::sampler::{sample_pair, PairSampler, RejectionSampler, DEFAULT_REJECTION_BUDGET};
use crate::ensemble::PulseFamily;
use crate::error::{Error, Result};
use crate::gaussian::PhotonPairConfig;
use crate::interference::Port;
use crate::numeric::fmt_f64;
use crate::wavepacket::par_map_indices;

pub const CHUNK_SIZE: usize = 65_536;
pub const RNG_NAME: &str = "ChaCha20 (rand_chacha ChaCha20Rng, seed_from_u64(seed), stream = chunk index)";
pub const EVENT_CSV_HEADER: &str = "first_port,first_time,second_port,second_time";

/// Two-sided 95% standard normal quantile.
const Z_95: f64 = 1.959_963_984_540_053_6;

/// Minimum log size accepted by [`estimate_total_coincidence`].
pub const MIN_EVENTS_FOR_ESTIMATE: usize = 100;

/// Two clicks, stored in time order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionPair {
    pub first_port: Port,
    pub first_time: f64,
    pub second_port: Port,
    pub second_time: f64,
}

impl DetectionPair {
    /// Orders two clicks by time. Same-port pairs become `(min, max)`.
    pub fn ordered(port_a: Port, time_a: f64, port_b: Port, time_b: f64) -> Self {
        if time_a <= time_b {
            DetectionPair {
                first_port: port_a,
                first_time: time_a,
                second_port: port_b,
                second_time: time_b,
            }
        } else {
            DetectionPair {
                first_port: port_b,
                first_time: time_b,
                second_port: port_a,
                second_time: time_a,
            }
        }
    }

    pub fn is_opposite(&self) -> bool {
        self.first_port != self.second_port
    }

    /// `t(port 4) − t(port 3)` for opposite-port pairs.
    pub fn signed_tau(&self) -> Option<f64> {
        match (self.first_port, self.second_port) {
            (Port::Three, Port::Four) => Some(self.second_time - self.first_time),
            (Port::Four, Port::Three) => Some(self.first_time - self.second_time),
            _ => None,
        }
    }

    /// `|τ|` regardless of ports.
    pub fn abs_tau(&self) -> f64 {
        self.second_time - self.first_time
    }
}

/// Everything needed to regenerate a run, without the events themselves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventLogMeta {
    pub version: String,
    pub config: PhotonPairConfig,
    pub family: String,
    pub seed: u64,
    pub rng: String,
    pub chunk_size: usize,
    pub n_pairs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventLog {
    pub config: PhotonPairConfig,
    pub family: String,
    pub seed: u64,
    pub events: Vec<DetectionPair>,
}

impl EventLog {
    pub fn n_pairs(&self) -> usize {
        self.events.len()
    }

    pub fn meta(&self) -> EventLogMeta {
        EventLogMeta {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: self.config,
            family: self.family.clone(),
            seed: self.seed,
            rng: RNG_NAME.to_string(),
            chunk_size: CHUNK_SIZE,
            n_pairs: self.events.len(),
        }
    }

    /// One row per event under [`EVENT_CSV_HEADER`].
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut out = std::io::BufWriter::new(out);
        writeln!(out, "{EVENT_CSV_HEADER}")?;
        for e in &self.events {
            writeln!(
                out,
                "{},{},{},{}",
                e.first_port.label(),
                fmt_f64(e.first_time),
                e.second_port.label(),
                fmt_f64(e.second_time)
            )?;
        }
        out.flush()?;
        Ok(())
    }

    /// JSON sidecar holding [`EventLogMeta`].
    pub fn write_sidecar<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, &self.meta())?;
        writeln!(out)?;
        Ok(())
    }
}

/// Draws `n_pairs` independent events. With `δω > 0` every pair first draws its
/// own detuning from a Gaussian of half width `δω` around `cfg.delta`.
pub fn run_experiment(
    cfg: &PhotonPairConfig,
    family: &dyn PulseFamily,
    n_pairs: usize,
    seed: u64,
) -> Result<EventLog> {
    cfg.validate()?;
    if n_pairs == 0 {
        return Err(Error::invalid("n_pairs", "must be >= 1"));
    }
    let fixed = if cfg.delta_omega == 0.0 {
        let (m1, m2) = family.pair(cfg.delta_tau, cfg.delta)?;
        Some(PairSampler::new(&m1, &m2)?)
    } else {
        None
    };
    let spread = Normal::new(cfg.delta, cfg.delta_omega / std::f64::consts::SQRT_2)
        .map_err(|e| Error::invalid("delta_omega", e.to_string()))?;
    let n_chunks = n_pairs.div_ceil(CHUNK_SIZE);
    let chunks = par_map_indices(n_chunks, |k| -> Result<Vec<DetectionPair>> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        let len = CHUNK_SIZE.min(n_pairs - k * CHUNK_SIZE);
        let mut events = Vec::with_capacity(len);
        for _ in 0..len {
            let event = match &fixed {
                Some(s) => s.sample(&mut rng)?,
                None => {
                    let delta = spread.sample(&mut rng);
                    let (m1, m2) = family.pair(cfg.delta_tau, delta)?;
                    PairSampler::new(&m1, &m2)?.sample(&mut rng)?
                }
            };
            events.push(event);
        }
        Ok(events)
    });
    let mut events = Vec::with_capacity(n_pairs);
    for chunk in chunks {
        events.extend(chunk?);
    }
    Ok(EventLog {
        config: *cfg,
        family: family.label(),
        seed,
        events,
    })
}

/// Coincidence counts versus detection-time difference.
///
/// Opposite-port pairs are binned by signed `τ = t(port 4) − t(port 3)` in bins
/// of width `w` centred on `k·w`, `|k| ≤ ⌊range/w⌋`. Same-port pairs are binned
/// by `|τ|` with edges `0, w, 2w, …` up to `range`. Pairs outside the binned
/// span are tallied in `out_of_range`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceHistogram {
    pub bin_width: f64,
    pub range: f64,
    pub n_pairs: usize,
    pub opposite: Vec<u64>,
    pub same_3: Vec<u64>,
    pub same_4: Vec<u64>,
    pub out_of_range: u64,
}

impl CoincidenceHistogram {
    fn half_bins(&self) -> usize {
        (self.opposite.len() - 1) / 2
    }

    /// Centres of the opposite-port bins.
    pub fn opposite_centers(&self) -> Vec<f64> {
        let k = self.half_bins() as f64;
        (0..self.opposite.len())
            .map(|i| (i as f64 - k) * self.bin_width)
            .collect()
    }

    /// Edges of the opposite-port bins (one more than the number of bins).
    pub fn opposite_edges(&self) -> Vec<f64> {
        let k = self.half_bins() as f64;
        (0..=self.opposite.len())
            .map(|i| (i as f64 - k - 0.5) * self.bin_width)
            .collect()
    }

    /// Edges of the same-port `|τ|` bins.
    pub fn same_edges(&self) -> Vec<f64> {
        (0..=self.same_3.len()).map(|i| i as f64 * self.bin_width).collect()
    }

    /// `counts/(n_pairs·w)`, an estimate of the opposite-port `τ` density.
    pub fn opposite_density(&self) -> Vec<f64> {
        self.normalize(&self.opposite)
    }

    pub fn same_density(&self, port: Port) -> Vec<f64> {
        match port {
            Port::Three => self.normalize(&self.same_3),
            Port::Four => self.normalize(&self.same_4),
        }
    }

    fn normalize(&self, counts: &[u64]) -> Vec<f64> {
        let scale = 1.0 / (self.n_pairs as f64 * self.bin_width);
        counts.iter().map(|&c| c as f64 * scale).collect()
    }

    /// Sum over every bin plus `out_of_range`; equals `n_pairs`.
    pub fn total_counts(&self) -> u64 {
        self.opposite.iter().chain(&self.same_3).chain(&self.same_4).sum::<u64>() + self.out_of_range
    }

    /// Long-format table: `category,bin_lo,bin_hi,count,density`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "category,bin_lo [delta_t],bin_hi [delta_t],count,density [1/delta_t]")?;
        let rows = [
            ("opposite", self.opposite_edges(), &self.opposite, self.opposite_density()),
            ("same_3", self.same_edges(), &self.same_3, self.same_density(Port::Three)),
            ("same_4", self.same_edges(), &self.same_4, self.same_density(Port::Four)),
        ];
        for (name, edges, counts, density) in rows {
            for (i, (&c, d)) in counts.iter().zip(density).enumerate() {
                writeln!(out, "{name},{},{},{c},{}", fmt_f64(edges[i]), fmt_f64(edges[i + 1]), fmt_f64(d))?;
            }
        }
        Ok(())
    }
}

pub fn coincidence_histogram(log: &EventLog, bin_width: f64, range: f64) -> Result<CoincidenceHistogram> {
    if !(bin_width > 0.0) || !bin_width.is_finite() {
        return Err(Error::invalid("bin_width", format!("must be > 0, got {bin_width}")));
    }
    if !(range > 0.0) || !range.is_finite() {
        return Err(Error::EmptyRange(format!("range must be a positive finite time, got {range}")));
    }
    let k = (range / bin_width + 1e-9).floor() as usize;
    let m = ((range / bin_width - 1e-9).ceil() as usize).max(1);
    let mut h = CoincidenceHistogram {
        bin_width,
        range,
        n_pairs: log.n_pairs(),
        opposite: vec![0; 2 * k + 1],
        same_3: vec![0; m],
        same_4: vec![0; m],
        out_of_range: 0,
    };
    for e in &log.events {
        let slot = match e.signed_tau() {
            Some(tau) => {
                let j = (tau / bin_width).round();
                (j.abs() <= k as f64).then(|| &mut h.opposite[(j as i64 + k as i64) as usize])
            }
            None => {
                let j = (e.abs_tau() / bin_width).floor() as usize;
                let bins = if e.first_port == Port::Three { &mut h.same_3 } else { &mut h.same_4 };
                bins.get_mut(j)
            }
        };
        match slot {
            Some(c) => *c += 1,
            None => h.out_of_range += 1,
        }
    }
    Ok(h)
}

/// Binomial proportion with a 95% Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProportionEstimate {
    pub successes: usize,
    pub trials: usize,
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
}

impl ProportionEstimate {
    pub fn wilson(successes: usize, trials: usize) -> Self {
        let n = trials as f64;
        let p = successes as f64 / n;
        let z2 = Z_95 * Z_95;
        let denom = 1.0 + z2 / n;
        let center = (p + z2 / (2.0 * n)) / denom;
        let half = Z_95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
        ProportionEstimate {
            successes,
            trials,
            estimate: p,
            lower: if successes == 0 { 0.0 } else { (center - half).max(0.0) },
            upper: if successes == trials { 1.0 } else { (center + half).min(1.0) },
        }
    }

    pub fn contains(&self, p: f64) -> bool {
        self.lower <= p && p <= self.upper
    }
}

/// Fraction of opposite-port pairs in the log.
pub fn estimate_total_coincidence(log: &EventLog) -> Result<ProportionEstimate> {
    let n = log.n_pairs();
    if n < MIN_EVENTS_FOR_ESTIMATE {
        return Err(Error::TooFewEvents {
            actual: n,
            required: MIN_EVENTS_FOR_ESTIMATE,
        });
    }
    let k = log.events.iter().filter(|e| e.is_opposite()).count();
    Ok(ProportionEstimate::wilson(k, n))
}
