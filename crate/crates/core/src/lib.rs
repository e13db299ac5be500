//! Time-resolved two-photon interference of independent single-photon
//! wavepackets at a lossless 50:50 beam splitter.
//!
//! Times are measured in units of the pulse duration `δt` (half width at 1/e
//! of the amplitude envelope) and angular frequencies in units of `1/δt`.
//! Output ports are labelled 3 and 4, input ports 1 and 2.
//!
//! - [`wavepacket`]: normalized mode functions `ζ(t)`, their spectra and overlaps.
//! - [`interference`]: joint, conditional, same-port and dephased detection densities.
//! - [`gaussian`]: closed forms for Fourier-limited Gaussian photon pairs.
//! - [`ensemble`]: detuning averages, total coincidence and temporal filtering for arbitrary pulses.
//! - [`montecarlo`]: seeded click-stream generation and coincidence histograms.
//! - [`scenario`]: the configuration-driven runner behind the `twophoton` binary.

pub mod ensemble;
pub mod error;
pub mod gaussian;
pub mod interference;
pub mod montecarlo;
pub(crate) mod numeric;
pub mod scenario;
pub mod wavepacket;

pub use error::{Error, Result};
pub use gaussian::PhotonPairConfig;
pub use interference::{ConditionalState, Port, PortPair, PortPairProbabilities};
pub use wavepacket::{ModeFunction, OmegaGrid, SpectralAmplitude, TimeGrid};

pub use num_complex::Complex64;
