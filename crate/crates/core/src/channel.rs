//! Rayleigh-fading channel draws and transmit-power bookkeeping.
//!
//! Noise is never sampled anywhere in the crate: capacities are closed-form in
//! the transmit power and the channel geometry, so the channel (and the random
//! codebooks built in [`crate::miso`]) are the only random quantities.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Addresses an independent random substream.
///
/// Realization `t` of an experiment uses `stream_id = t`, so a trial's draws do
/// not depend on how many trials ran before it or on which thread runs it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// A stream with the same id drawn from an unrelated seed; used to keep
    /// channel and codebook draws for the same trial disjoint.
    pub fn domain(self, tag: u64) -> Self {
        Self {
            seed: splitmix64(self.seed ^ splitmix64(tag)),
            stream_id: self.stream_id,
        }
    }

    /// The generator for this stream, positioned at its first word.
    pub fn rng(self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// One `CN(0, 1)` sample: real and imaginary parts each `N(0, 1/2)`.
#[inline]
pub fn sample_cn<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Complex::new(T::lit(re * s), T::lit(im * s))
}

/// A channel vector `h`; length 1 is the SISO case.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization<T> {
    coefficients: Vec<Complex<T>>,
}

impl<T: Real> ChannelRealization<T> {
    pub fn new(coefficients: Vec<Complex<T>>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::AntennaCount {
                nt: 0,
                reason: "channel needs at least one coefficient",
            });
        }
        if coefficients
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::NonFinite("channel coefficient"));
        }
        Ok(Self { coefficients })
    }

    pub fn siso(h: Complex<T>) -> Result<Self> {
        Self::new(vec![h])
    }

    #[inline]
    pub fn coefficients(&self) -> &[Complex<T>] {
        &self.coefficients
    }

    #[inline]
    pub fn nt(&self) -> usize {
        self.coefficients.len()
    }

    /// `||h||^2`.
    pub fn norm_sq(&self) -> T {
        self.coefficients
            .iter()
            .fold(T::zero(), |acc, c| acc + c.norm_sqr())
    }

    /// Every coefficient multiplied by `factor`.
    pub fn scaled(&self, factor: Complex<T>) -> Self {
        Self {
            coefficients: self.coefficients.iter().map(|c| *c * factor).collect(),
        }
    }
}

/// Draws `h ~ CN(0, I_nt)` from `stream`.
pub fn sample_channel<T: Real>(stream: RngStream, nt: usize) -> Result<ChannelRealization<T>> {
    if nt == 0 {
        return Err(Error::AntennaCount {
            nt,
            reason: "need at least one transmit antenna",
        });
    }
    let mut rng = stream.rng();
    let coefficients = (0..nt).map(|_| sample_cn(&mut rng)).collect();
    Ok(ChannelRealization { coefficients })
}

/// Transmit power `Pt`, the only SNR knob (noise variance is fixed at 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmitPower<T> {
    linear: T,
    db: T,
}

impl<T: Real> TransmitPower<T> {
    pub fn from_db(db: T) -> Result<Self> {
        if !db.is_finite() {
            return Err(Error::NonFinite("SNR in dB"));
        }
        Ok(Self {
            linear: T::lit(10.0).powf(db / T::lit(10.0)),
            db,
        })
    }

    pub fn from_linear(linear: T) -> Result<Self> {
        if !(linear.is_finite() && linear > T::zero()) {
            return Err(Error::OutOfRange {
                name: "transmit power",
                value: linear.as_f64(),
                range: "(0, inf)",
            });
        }
        Ok(Self {
            linear,
            db: T::lit(10.0) * linear.log10(),
        })
    }

    #[inline]
    pub fn linear(self) -> T {
        self.linear
    }

    #[inline]
    pub fn db(self) -> T {
        self.db
    }
}

/// `Pt = 10^(db / 10)`.
pub fn snr_db_to_power<T: Real>(db: T) -> Result<TransmitPower<T>> {
    TransmitPower::from_db(db)
}
