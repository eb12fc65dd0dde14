//! Single-antenna limited feedback: only the channel phase modulo `pi/2` is
//! quantized and fed back, and the transmitter pre-rotates QPSK by the chosen
//! codebook angle.

use crate::channel::{ChannelRealization, TransmitPower};
use crate::error::{Error, Result};
use crate::numerics::hbq_raw;
use crate::scalar::{modulo, Real};

pub const MAX_PHASE_BITS: u32 = 30;

/// Uniform quantizer of a phase residue on `[0, pi/2)` with `2^bits` cell centers
/// `i*pi/2^(bits+1) + pi/2^(bits+2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseCodebook<T> {
    bits: u32,
    centers: Vec<T>,
}

impl<T: Real> PhaseCodebook<T> {
    #[inline]
    pub fn bits(&self) -> u32 {
        self.bits
    }

    #[inline]
    pub fn centers(&self) -> &[T] {
        &self.centers
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Cell width `pi / 2^(bits+1)`.
    pub fn cell_width(&self) -> T {
        T::FRAC_PI_2() / T::lit((1u64 << self.bits) as f64)
    }

    /// Largest possible `|theta|`, `pi / 2^(bits+2)`.
    pub fn half_width(&self) -> T {
        self.cell_width() * T::lit(0.5)
    }
}

pub fn build_phase_codebook<T: Real>(bits: u32) -> Result<PhaseCodebook<T>> {
    if bits == 0 || bits > MAX_PHASE_BITS {
        return Err(Error::OutOfRange {
            name: "phase codebook bits",
            value: bits as f64,
            range: "1..=30",
        });
    }
    let size = 1u64 << bits;
    let cell = T::FRAC_PI_2() / T::lit(size as f64);
    let half = cell * T::lit(0.5);
    let centers = (0..size).map(|i| T::lit(i as f64) * cell + half).collect();
    Ok(PhaseCodebook { bits, centers })
}

/// A quantized phase: the fed-back index and the signed error
/// `theta = center - residue`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseFeedback<T> {
    pub index: usize,
    pub theta: T,
}

/// Nearest-center quantization of `angle mod pi/2`.
///
/// Distance is plain `|residue - center|` on `[0, pi/2)` without wrap-around;
/// ties go to the lower index.
pub fn quantize_phase<T: Real>(angle: T, cb: &PhaseCodebook<T>) -> Result<PhaseFeedback<T>> {
    if !angle.is_finite() {
        return Err(Error::NonFinite("phase angle"));
    }
    let residue = modulo(angle, T::FRAC_PI_2());
    let n = cb.len();
    let guess = (residue / cb.cell_width())
        .floor()
        .to_usize()
        .unwrap_or(0)
        .min(n - 1);
    let lo = guess.saturating_sub(1);
    let hi = (guess + 1).min(n - 1);
    let mut best = lo;
    let mut best_dist = (residue - cb.centers[lo]).abs();
    for i in lo + 1..=hi {
        let d = (residue - cb.centers[i]).abs();
        if d < best_dist {
            best = i;
            best_dist = d;
        }
    }
    Ok(PhaseFeedback {
        index: best,
        theta: cb.centers[best] - residue,
    })
}

/// Quantizes the phase of a SISO channel coefficient.
pub fn siso_feedback<T: Real>(
    h: &ChannelRealization<T>,
    cb: &PhaseCodebook<T>,
) -> Result<PhaseFeedback<T>> {
    let h0 = single_coefficient(h)?;
    quantize_phase(h0.arg(), cb)
}

fn single_coefficient<T: Real>(h: &ChannelRealization<T>) -> Result<num_complex::Complex<T>> {
    if h.nt() != 1 {
        return Err(Error::AntennaCount {
            nt: h.nt(),
            reason: "SISO operation needs exactly one coefficient",
        });
    }
    Ok(h.coefficients()[0])
}

pub(crate) fn check_gain<T: Real>(name: &'static str, value: T) -> Result<()> {
    if !value.is_finite() || value < T::zero() {
        return Err(Error::OutOfRange {
            name,
            value: value.as_f64(),
            range: "[0, inf)",
        });
    }
    Ok(())
}

pub(crate) fn check_theta<T: Real>(theta: T) -> Result<()> {
    if theta.is_nan() || theta.abs() > T::FRAC_PI_4() {
        return Err(Error::OutOfRange {
            name: "theta",
            value: theta.as_f64(),
            range: "[-pi/4, pi/4]",
        });
    }
    Ok(())
}

/// `2 - hbq(a(1 - sin 2theta)) - hbq(a(1 + sin 2theta))` for received power `a`.
pub(crate) fn rotated_qpsk_capacity<T: Real>(a: T, theta: T) -> T {
    let s = (theta + theta).sin();
    let c = T::lit(2.0) - hbq_raw(a * (T::one() - s)) - hbq_raw(a * (T::one() + s));
    clamp_capacity(c)
}

/// `2 (1 - hbq(a (1 - sin 2|theta|)))`.
pub(crate) fn rotated_qpsk_lower<T: Real>(a: T, theta: T) -> T {
    let s = (theta.abs() * T::lit(2.0)).sin();
    clamp_capacity(T::lit(2.0) * (T::one() - hbq_raw(a * (T::one() - s))))
}

pub(crate) fn aligned_capacity<T: Real>(a: T) -> T {
    clamp_capacity(T::lit(2.0) * (T::one() - hbq_raw(a)))
}

#[inline]
fn clamp_capacity<T: Real>(c: T) -> T {
    c.max(T::zero()).min(T::lit(2.0))
}

/// Capacity with `B`-bit phase feedback and quantization error `theta`.
pub fn capacity_siso_fb<T: Real>(pt: TransmitPower<T>, h_mag_sq: T, theta: T) -> Result<T> {
    check_gain("|h|^2", h_mag_sq)?;
    check_theta(theta)?;
    Ok(rotated_qpsk_capacity(pt.linear() * h_mag_sq, theta))
}

/// Lower bound on [`capacity_siso_fb`] from the weaker quadrature alone.
pub fn capacity_siso_fb_lower<T: Real>(pt: TransmitPower<T>, h_mag_sq: T, theta: T) -> Result<T> {
    check_gain("|h|^2", h_mag_sq)?;
    check_theta(theta)?;
    Ok(rotated_qpsk_lower(pt.linear() * h_mag_sq, theta))
}

/// Capacity with perfect CSIT, `2 (1 - hbq(Pt |h|^2))`.
pub fn capacity_siso_perfect<T: Real>(pt: TransmitPower<T>, h_mag_sq: T) -> Result<T> {
    check_gain("|h|^2", h_mag_sq)?;
    Ok(aligned_capacity(pt.linear() * h_mag_sq))
}

/// Phase error of a fixed, never-rotated QPSK constellation at angles `k*pi/2`.
///
/// This is the feedback scheme frozen at the single center `pi/4`, so
/// `theta = pi/4 - (angle mod pi/2)`, which lies in `(-pi/4, pi/4]`.
pub fn no_csit_theta<T: Real>(angle: T) -> T {
    T::FRAC_PI_4() - modulo(angle, T::FRAC_PI_2())
}

/// Capacity of uniform QPSK sent without any channel knowledge.
pub fn capacity_siso_no_csit<T: Real>(
    pt: TransmitPower<T>,
    h: &ChannelRealization<T>,
) -> Result<T> {
    let h0 = single_coefficient(h)?;
    let theta = no_csit_theta(h0.arg());
    Ok(rotated_qpsk_capacity(pt.linear() * h0.norm_sqr(), theta))
}

/// Linear power-loss factors (all in `(0, 1]`) for `B`-bit uniform phase feedback.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseLossFactors<T> {
    /// Exact average `E[1 - sin 2|theta|] = 1 - sin^2(c)/c`, `c = pi/2^(B+2)`.
    pub average: T,
    /// `1 - pi/2^(B+2)`, from `sin x < x`.
    pub average_relaxed: T,
    /// `1 - 2^-B`.
    pub average_loose: T,
    /// Worst case over the cell, `1 - sin(pi/2^(B+1))`.
    pub worst_case: T,
}

impl<T: Real> PhaseLossFactors<T> {
    pub fn average_db(&self) -> T {
        power_loss_db(self.average)
    }

    pub fn worst_case_db(&self) -> T {
        power_loss_db(self.worst_case)
    }
}

/// Power loss in dB of a linear factor, `-10 log10(factor)`.
pub fn power_loss_db<T: Real>(factor: T) -> T {
    -T::lit(10.0) * factor.log10()
}

pub fn avg_power_loss_phase<T: Real>(bits: u32) -> Result<PhaseLossFactors<T>> {
    if bits == 0 || bits > MAX_PHASE_BITS {
        return Err(Error::OutOfRange {
            name: "phase bits",
            value: bits as f64,
            range: "1..=30",
        });
    }
    let scale = T::lit((1u64 << bits) as f64);
    let c = T::FRAC_PI_4() / scale;
    let sc = c.sin();
    Ok(PhaseLossFactors {
        average: T::one() - sc * sc / c,
        average_relaxed: T::one() - c,
        average_loose: T::one() - scale.recip(),
        worst_case: T::one() - (c + c).sin(),
    })
}
