//! Physical-layer security for frequency-domain time-reversal SISO OFDM
//! with artificial noise.
//!
//! * [`model`]: parameters, spreading codes, channels, 4-QAM and seeded
//!   random streams.
//! * [`waveform`]: the transmit/receive chain, including AN synthesis in the
//!   null space of the legitimate receiver's effective channel.
//! * [`analytic`]: closed-form SINR and secrecy-rate bounds and the optimal
//!   power split.
//! * [`simkit`]: Monte Carlo BER and secrecy-rate sweeps.

pub mod analytic;
pub mod exec;
pub mod model;
pub mod selfcheck;
pub mod simkit;
pub mod waveform;

pub use exec::Execution;
pub use model::{ChannelRealization, RngStream, SpreadingCode, SymbolBlock, SystemParams};
pub use simkit::{SimConfig, SimError, SweepPoint};
