//! Limited-feedback transmission over SISO and MISO links whose receiver has a
//! one-bit ADC on each of the in-phase and quadrature branches.
//!
//! The math is generic over [`Real`] (`f32` or `f64`); the `*64` aliases below
//! fix it to `f64`, which the [`harness`] uses throughout.
//!
//! * [`numerics`]: `Q`, binary entropy and their composition `Hb(Q(sqrt x))`.
//! * [`channel`]: seeded `CN(0, I)` channel draws and SNR conversion.
//! * [`siso`]: phase codebook, phase quantization and SISO capacities.
//! * [`miso`]: RVQ direction codebook, residual-phase feedback, MISO capacities
//!   and the power/capacity-loss bounds.
//! * [`dmc`]: the exact quantized QPSK channel and Blahut-Arimoto, used as an
//!   independent check on the closed forms.
//! * [`harness`]: Monte Carlo experiments and CSV output.

pub mod channel;
pub mod dmc;
pub mod error;
pub mod harness;
pub mod miso;
pub mod numerics;
mod scalar;
pub mod siso;

pub use error::{Error, Result};
pub use scalar::{modulo, Real};

pub type Probability64 = numerics::Probability<f64>;
pub type EffectiveSnr64 = numerics::EffectiveSnr<f64>;
pub type TransmitPower64 = channel::TransmitPower<f64>;
pub type ChannelRealization64 = channel::ChannelRealization<f64>;
pub type PhaseCodebook64 = siso::PhaseCodebook<f64>;
pub type PhaseFeedback64 = siso::PhaseFeedback<f64>;
pub type DirectionCodebook64 = miso::DirectionCodebook<f64>;
pub type MisoFeedback64 = miso::MisoFeedback<f64>;
pub type DmcModel64 = dmc::DmcModel<f64>;
pub type InputDistribution64 = dmc::InputDistribution<f64>;

pub type TransmitPower32 = channel::TransmitPower<f32>;
pub type PhaseCodebook32 = siso::PhaseCodebook<f32>;
pub type DirectionCodebook32 = miso::DirectionCodebook<f32>;
pub type DmcModel32 = dmc::DmcModel<f32>;
