//! Multi-antenna limited feedback with a direction codebook drawn by random
//! vector quantization (RVQ) and a second, phase-only codebook for the residual
//! phase of the effective channel `h^H v`.
//!
//! `B1` bits index the direction, `B2` bits index the residual phase. The
//! transmitter beamforms along the selected `v` and pre-rotates QPSK by the
//! selected phase center.

use num_complex::Complex;

use crate::channel::{sample_cn, ChannelRealization, RngStream, TransmitPower};
use crate::error::{Error, Result};
use crate::numerics::solve_hbq_threshold;
use crate::scalar::Real;
use crate::siso::{
    aligned_capacity, build_phase_codebook, check_gain, check_theta, quantize_phase,
    rotated_qpsk_capacity, rotated_qpsk_lower, PhaseCodebook, PhaseFeedback,
};

pub const MAX_DIRECTION_BITS: u32 = 20;
/// Upper bound on `2^B1 * Nt` complex entries held by one codebook.
pub const MAX_CODEBOOK_ENTRIES: usize = 1 << 26;

/// `2^bits` unit-norm vectors in `C^nt`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionCodebook<T> {
    bits: u32,
    nt: usize,
    entries: Vec<Complex<T>>,
}

impl<T: Real> DirectionCodebook<T> {
    /// Builds a codebook from explicit vectors, normalizing each to unit norm.
    pub fn from_vectors(vectors: &[Vec<Complex<T>>]) -> Result<Self> {
        let nt = vectors.first().map(Vec::len).unwrap_or(0);
        if nt == 0 {
            return Err(Error::Config("direction codebook needs vectors".into()));
        }
        let mut entries = Vec::with_capacity(nt * vectors.len());
        for v in vectors {
            if v.len() != nt {
                return Err(Error::DimensionMismatch {
                    channel: v.len(),
                    codebook: nt,
                });
            }
            let norm = v.iter().fold(T::zero(), |a, c| a + c.norm_sqr()).sqrt();
            if norm.is_nan() || norm <= T::zero() {
                return Err(Error::ZeroChannel);
            }
            entries.extend(v.iter().map(|c| *c / norm));
        }
        let bits = (vectors.len() as f64).log2().ceil() as u32;
        Ok(Self { bits, nt, entries })
    }

    #[inline]
    pub fn bits(&self) -> u32 {
        self.bits
    }

    #[inline]
    pub fn nt(&self) -> usize {
        self.nt
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.entries.len() / self.nt
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    #[inline]
    pub fn vector(&self, index: usize) -> &[Complex<T>] {
        &self.entries[index * self.nt..(index + 1) * self.nt]
    }

    pub fn vectors(&self) -> impl Iterator<Item = &[Complex<T>]> {
        self.entries.chunks_exact(self.nt)
    }
}

/// Draws `2^bits` vectors isotropically on the unit sphere of `C^nt`
/// (normalized `CN(0, I)` draws).
pub fn build_rvq_codebook<T: Real>(
    stream: RngStream,
    nt: usize,
    bits: u32,
) -> Result<DirectionCodebook<T>> {
    if nt < 2 {
        return Err(Error::AntennaCount {
            nt,
            reason: "direction feedback needs at least two antennas",
        });
    }
    if bits == 0 || bits > MAX_DIRECTION_BITS {
        return Err(Error::OutOfRange {
            name: "direction bits",
            value: bits as f64,
            range: "1..=20",
        });
    }
    let size = 1usize << bits;
    if size.saturating_mul(nt) > MAX_CODEBOOK_ENTRIES {
        return Err(Error::OutOfRange {
            name: "codebook entries",
            value: (size as f64) * nt as f64,
            range: "at most 2^26",
        });
    }
    let mut rng = stream.rng();
    let mut entries = Vec::with_capacity(size * nt);
    let mut scratch = vec![Complex::new(T::zero(), T::zero()); nt];
    for _ in 0..size {
        let norm = loop {
            for c in scratch.iter_mut() {
                *c = sample_cn(&mut rng);
            }
            let n = scratch
                .iter()
                .fold(T::zero(), |a, c| a + c.norm_sqr())
                .sqrt();
            if n > T::zero() {
                break n;
            }
        };
        let inv = norm.recip();
        entries.extend(scratch.iter().map(|c| c.scale(inv)));
    }
    Ok(DirectionCodebook { bits, nt, entries })
}

/// Outcome of the direction search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionChoice<T> {
    pub index: usize,
    /// `|h^H v|^2 / ||h||^2`.
    pub cos2_beta: T,
    /// `arg(h^H v)`.
    pub residual_phase: T,
}

#[inline]
fn inner<T: Real>(h: &[Complex<T>], v: &[Complex<T>]) -> Complex<T> {
    h.iter()
        .zip(v)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| {
            acc + a.conj() * b
        })
}

/// Picks the codebook vector maximizing `|h^H v|` (lowest index on ties).
pub fn select_direction<T: Real>(
    h: &ChannelRealization<T>,
    cb: &DirectionCodebook<T>,
) -> Result<DirectionChoice<T>> {
    if h.nt() != cb.nt() {
        return Err(Error::DimensionMismatch {
            channel: h.nt(),
            codebook: cb.nt(),
        });
    }
    let norm_sq = h.norm_sq();
    if norm_sq.is_nan() || norm_sq <= T::zero() {
        return Err(Error::ZeroChannel);
    }
    let hc = h.coefficients();
    let mut best = 0;
    let mut best_ip = inner(hc, cb.vector(0));
    let mut best_gain = best_ip.norm_sqr();
    for (i, v) in cb.vectors().enumerate().skip(1) {
        let ip = inner(hc, v);
        let g = ip.norm_sqr();
        if g > best_gain {
            best = i;
            best_gain = g;
            best_ip = ip;
        }
    }
    Ok(DirectionChoice {
        index: best,
        cos2_beta: (best_gain / norm_sq).min(T::one()),
        residual_phase: best_ip.arg(),
    })
}

/// Quantizes the residual phase with a fresh `b2`-bit phase codebook.
pub fn quantize_residual_phase<T: Real>(residual_phase: T, b2: u32) -> Result<PhaseFeedback<T>> {
    let cb = build_phase_codebook(b2)?;
    quantize_phase(residual_phase, &cb)
}

/// Everything the receiver feeds back, plus the analysis quantities derived
/// from it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MisoFeedback<T> {
    pub direction_index: usize,
    pub phase_index: usize,
    pub cos2_beta: T,
    pub theta: T,
}

/// Runs direction selection followed by residual-phase quantization.
pub fn miso_feedback<T: Real>(
    h: &ChannelRealization<T>,
    directions: &DirectionCodebook<T>,
    phases: &PhaseCodebook<T>,
) -> Result<MisoFeedback<T>> {
    let choice = select_direction(h, directions)?;
    let phase = quantize_phase(choice.residual_phase, phases)?;
    Ok(MisoFeedback {
        direction_index: choice.index,
        phase_index: phase.index,
        cos2_beta: choice.cos2_beta,
        theta: phase.theta,
    })
}

fn check_alignment<T: Real>(cos2_beta: T) -> Result<()> {
    if !(cos2_beta >= T::zero() && cos2_beta <= T::one()) {
        return Err(Error::OutOfRange {
            name: "cos^2 beta",
            value: cos2_beta.as_f64(),
            range: "[0, 1]",
        });
    }
    Ok(())
}

/// Capacity with quantized direction (`cos^2 beta`) and residual-phase error `theta`.
pub fn capacity_miso_fb<T: Real>(
    pt: TransmitPower<T>,
    h_norm_sq: T,
    cos2_beta: T,
    theta: T,
) -> Result<T> {
    check_gain("||h||^2", h_norm_sq)?;
    check_alignment(cos2_beta)?;
    check_theta(theta)?;
    Ok(rotated_qpsk_capacity(
        pt.linear() * h_norm_sq * cos2_beta,
        theta,
    ))
}

pub fn capacity_miso_fb_lower<T: Real>(
    pt: TransmitPower<T>,
    h_norm_sq: T,
    cos2_beta: T,
    theta: T,
) -> Result<T> {
    check_gain("||h||^2", h_norm_sq)?;
    check_alignment(cos2_beta)?;
    check_theta(theta)?;
    Ok(rotated_qpsk_lower(
        pt.linear() * h_norm_sq * cos2_beta,
        theta,
    ))
}

/// Capacity with perfect CSIT (matched-filter beamforming), `2 (1 - hbq(Pt ||h||^2))`.
pub fn capacity_miso_perfect<T: Real>(pt: TransmitPower<T>, h_norm_sq: T) -> Result<T> {
    check_gain("||h||^2", h_norm_sq)?;
    Ok(aligned_capacity(pt.linear() * h_norm_sq))
}

fn check_bits(nt: usize, b1: u32, b2: u32) -> Result<()> {
    if nt < 2 {
        return Err(Error::AntennaCount {
            nt,
            reason: "the direction-loss exponent needs nt >= 2",
        });
    }
    if b1 == 0 || b2 == 0 {
        return Err(Error::Config("b1 and b2 must both be at least 1".into()));
    }
    Ok(())
}

/// Lower bound on the average power-loss factor
/// `E[cos^2 beta (1 - sin 2|theta|)] >= (1 - 2^(-b1/(nt-1))) (1 - 2^-b2)`.
pub fn power_loss_bound<T: Real>(nt: usize, b1: u32, b2: u32) -> Result<T> {
    check_bits(nt, b1, b2)?;
    let two = T::lit(2.0);
    let direction = T::one() - two.powf(-T::lit(b1 as f64) / T::lit((nt - 1) as f64));
    let phase = T::one() - two.powf(-T::lit(b2 as f64));
    Ok(direction * phase)
}

/// Result of checking a feedback allocation against a capacity-loss target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetCheck<T> {
    pub satisfied: bool,
    /// `(1 - 2^(-b1/(nt-1))) (1 - 2^-b2)`.
    pub lhs: T,
    /// `delta / (Pt nt)`.
    pub rhs: T,
    /// Solution of `hbq(delta) = epsilon`.
    pub delta: T,
}

impl<T: Real> BudgetCheck<T> {
    pub fn slack(&self) -> T {
        self.lhs - self.rhs
    }
}

/// Whether `b1 + b2` feedback bits keep the capacity loss below `2 epsilon` on
/// average, taking `E[||h||^2] = nt`.
pub fn feedback_budget_satisfied<T: Real>(
    nt: usize,
    b1: u32,
    b2: u32,
    pt: TransmitPower<T>,
    epsilon: T,
) -> Result<BudgetCheck<T>> {
    let lhs = power_loss_bound(nt, b1, b2)?;
    let delta = solve_hbq_threshold(epsilon)?.value();
    let rhs = delta / (pt.linear() * T::lit(nt as f64));
    Ok(BudgetCheck {
        satisfied: lhs >= rhs,
        lhs,
        rhs,
        delta,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    use super::*;
    use crate::channel::sample_channel;
    use crate::numerics::{hbq, EffectiveSnr};
    use crate::siso::{capacity_siso_fb, power_loss_db};

    fn pw(linear: f64) -> TransmitPower<f64> {
        TransmitPower::from_linear(linear).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn rvq_vectors_are_unit_norm_and_reproducible() {
        let stream = RngStream::new(5, 9);
        let cb = build_rvq_codebook::<f64>(stream, 4, 6).unwrap();
        assert_eq!(cb.len(), 64);
        for v in cb.vectors() {
            let n: f64 = v.iter().map(|x| x.norm_sqr()).sum();
            assert!((n - 1.0).abs() < 1e-12);
        }
        assert_eq!(cb, build_rvq_codebook::<f64>(stream, 4, 6).unwrap());
        assert_ne!(
            cb,
            build_rvq_codebook::<f64>(RngStream::new(5, 10), 4, 6).unwrap()
        );
    }

    #[test]
    fn rvq_rejects_bad_shapes() {
        let s = RngStream::new(0, 0);
        assert!(build_rvq_codebook::<f64>(s, 1, 3).is_err());
        assert!(build_rvq_codebook::<f64>(s, 4, 0).is_err());
        assert!(build_rvq_codebook::<f64>(s, 4, 21).is_err());
        assert!(build_rvq_codebook::<f64>(s, 128, 20).is_err());
    }

    #[test]
    fn rvq_alignment_two_antennas() {
        // unit h, nt=2, 2^10 vectors: E[cos^2 beta] > 1 - 2^-10
        let n = 10_000;
        let mut acc = Vec::with_capacity(n);
        let cb = build_rvq_codebook::<f64>(RngStream::new(77, 0), 2, 10).unwrap();
        for t in 0..n as u64 {
            let h = sample_channel::<f64>(RngStream::new(78, t), 2).unwrap();
            let h = h.scaled(c(1.0 / h.norm_sq().sqrt(), 0.0));
            acc.push(select_direction(&h, &cb).unwrap().cos2_beta);
        }
        let mean = acc.iter().sum::<f64>() / n as f64;
        let var = acc.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        let se = (var / n as f64).sqrt();
        assert!(
            mean > 1.0 - 2f64.powi(-10) - 3.0 * se,
            "mean={mean} se={se}"
        );
    }

    #[test]
    fn select_direction_examples() {
        let h = ChannelRealization::new(vec![c(1.0, 2.0), c(-0.5, 0.3), c(0.0, -1.0)]).unwrap();
        let nh = h.norm_sq().sqrt();
        let aligned: Vec<_> = h.coefficients().iter().map(|x| x / nh).collect();
        let cb = DirectionCodebook::from_vectors(&[
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            aligned.clone(),
            vec![c(0.0, 0.0), c(1.0, 1.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let ch = select_direction(&h, &cb).unwrap();
        assert_eq!(ch.index, 1);
        assert!((ch.cos2_beta - 1.0).abs() < 1e-12);
        assert!(ch.residual_phase.abs() < 1e-12);

        // single vector orthogonal to h
        let h2 = ChannelRealization::new(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let ortho = DirectionCodebook::from_vectors(&[vec![c(0.0, 0.0), c(0.0, 1.0)]]).unwrap();
        assert_eq!(select_direction(&h2, &ortho).unwrap().cos2_beta, 0.0);

        let zero = ChannelRealization::new(vec![c(0.0, 0.0); 3]).unwrap();
        assert_eq!(select_direction(&zero, &cb), Err(Error::ZeroChannel));
        assert!(select_direction(&h2, &cb).is_err());
    }

    #[test]
    fn select_direction_matches_brute_force() {
        for t in 0..200 {
            let h = sample_channel::<f64>(RngStream::new(3, t), 4).unwrap();
            let cb = build_rvq_codebook::<f64>(RngStream::new(4, t), 4, 3).unwrap();
            let got = select_direction(&h, &cb).unwrap();
            // brute force: |h^H v| via explicit sums and sqrt
            let mut best = (0usize, -1.0f64);
            for m in 0..cb.len() {
                let v = cb.vector(m);
                let mut re = 0.0;
                let mut im = 0.0;
                for (a, b) in h.coefficients().iter().zip(v) {
                    re += a.re * b.re + a.im * b.im;
                    im += a.re * b.im - a.im * b.re;
                }
                let mag = (re * re + im * im).sqrt();
                if mag > best.1 {
                    best = (m, mag);
                }
            }
            assert_eq!(got.index, best.0);
            assert!((got.cos2_beta - best.1 * best.1 / h.norm_sq()).abs() < 1e-12);
        }
    }

    #[test]
    fn unit_modulus_scaling() {
        for t in 0..50 {
            let h = sample_channel::<f64>(RngStream::new(21, t), 4).unwrap();
            let cb = build_rvq_codebook::<f64>(RngStream::new(22, t), 4, 4).unwrap();
            let phases = build_phase_codebook::<f64>(1).unwrap();
            let a = select_direction(&h, &cb).unwrap();
            let rot = Complex::from_polar(1.0, 0.7);
            let b = select_direction(&h.scaled(rot), &cb).unwrap();
            assert_eq!(a.index, b.index);
            assert!((a.cos2_beta - b.cos2_beta).abs() < 1e-12);
            assert!((a.residual_phase - b.residual_phase).abs() > 1e-3);

            let quarter = h.scaled(Complex::new(0.0, 1.0));
            let fa = miso_feedback(&h, &cb, &phases).unwrap();
            let fb = miso_feedback(&quarter, &cb, &phases).unwrap();
            let p = pw(4.0);
            let ca = capacity_miso_fb(p, h.norm_sq(), fa.cos2_beta, fa.theta).unwrap();
            let cq = capacity_miso_fb(p, quarter.norm_sq(), fb.cos2_beta, fb.theta).unwrap();
            assert!((ca - cq).abs() < 1e-10);
        }
    }

    #[test]
    fn residual_phase_examples() {
        let fb = quantize_residual_phase(3.0 * PI / 8.0, 1).unwrap();
        assert_eq!(fb.index, 1);
        assert!(fb.theta.abs() < 1e-15);
        let a = quantize_residual_phase(0.3_f64, 1).unwrap();
        assert_eq!(a.index, 0);
        assert!((a.theta - 0.092_699_081_698_724_15).abs() < 1e-12);
        let b = quantize_residual_phase(0.3 + PI, 1).unwrap();
        assert_eq!(a.index, b.index);
        assert!((a.theta - b.theta).abs() < 1e-12);
        assert!(quantize_residual_phase(0.3, 0).is_err());
    }

    #[test]
    fn capacity_examples() {
        let p = pw(3.0);
        let perfect = capacity_miso_perfect(p, 2.5).unwrap();
        assert!((capacity_miso_fb(p, 2.5, 1.0, 0.0).unwrap() - perfect).abs() < 1e-15);
        assert_eq!(capacity_miso_fb(p, 2.5, 0.0, 0.2).unwrap(), 0.0);
        // reduces to the SISO expression at full alignment
        let s = capacity_siso_fb(p, 2.5, 0.2).unwrap();
        assert_eq!(capacity_miso_fb(p, 2.5, 1.0, 0.2).unwrap(), s);

        let lower = capacity_miso_fb_lower(pw(1.0), 2.0, 0.5, PI / 8.0).unwrap();
        let want = 2.0 * (1.0 - hbq(EffectiveSnr::new(1.0 - FRAC_1_SQRT_2).unwrap()));
        assert!((lower - want).abs() < 1e-15);
        assert_eq!(
            capacity_miso_fb_lower(p, 2.5, 0.7, 0.0).unwrap(),
            capacity_miso_fb(p, 2.5, 0.7, 0.0).unwrap()
        );

        assert_eq!(capacity_miso_perfect(p, 0.0).unwrap(), 0.0);
        assert!((capacity_miso_perfect(pw(5.0), 1.0).unwrap() - 1.8).abs() < 0.02);
        assert!((capacity_miso_perfect(pw(1e5), 1.0).unwrap() - 2.0).abs() < 1e-9);

        assert!(capacity_miso_fb(p, 1.0, 1.1, 0.0).is_err());
        assert!(capacity_miso_fb(p, 1.0, -0.1, 0.0).is_err());
        assert!(capacity_miso_fb(p, -1.0, 0.5, 0.0).is_err());
        assert!(capacity_miso_fb(p, 1.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn exact_below_perfect_on_grid() {
        let mut s = 0.31_f64;
        let mut next = || {
            s = (s * 16807.0) % 2_147_483_647.0 + 0.5;
            (s % 1e6) / 1e6
        };
        for _ in 0..10_000 {
            let p = pw(10f64.powf(-2.0 + 5.0 * next()));
            let g = 8.0 * next();
            let a = next();
            let th = (2.0 * next() - 1.0) * PI / 4.0;
            let lo = capacity_miso_fb_lower(p, g, a, th).unwrap();
            let ex = capacity_miso_fb(p, g, a, th).unwrap();
            let up = capacity_miso_perfect(p, g).unwrap();
            assert!(lo <= ex + 1e-14 && ex <= up + 1e-14);
        }
    }

    #[test]
    fn power_loss_bound_values() {
        let f = power_loss_bound::<f64>(4, 3, 1).unwrap();
        assert!((f - 0.25).abs() < 1e-15);
        assert!((power_loss_db(f) - 6.020_599_913_279_624).abs() < 1e-12);
        assert!((power_loss_bound::<f64>(16, 15, 1).unwrap() - 0.25).abs() < 1e-15);
        assert!((power_loss_bound::<f64>(4, 300, 100).unwrap() - 1.0).abs() < 1e-15);
        assert!(power_loss_bound::<f64>(1, 3, 1).is_err());
        assert!(power_loss_bound::<f64>(4, 0, 1).is_err());
    }

    #[test]
    fn budget_condition() {
        let p11 = TransmitPower::from_db(11.0).unwrap();
        let chk = feedback_budget_satisfied(4, 1, 1, p11, 0.1_f64).unwrap();
        assert!(chk.satisfied);
        assert!((chk.lhs - 0.103_149_737_007_950_13).abs() < 1e-12);
        assert!((chk.delta / 5.0 - 1.0).abs() < 0.02);
        assert!((chk.rhs - chk.delta / (4.0 * 12.589_254_117_941_672)).abs() < 1e-12);
        assert!(chk.slack() > 0.0 && chk.slack() < 0.01);

        // once satisfied, more power keeps it satisfied
        let mut seen = false;
        for db in -10..=40 {
            let p = TransmitPower::from_db(db as f64).unwrap();
            let ok = feedback_budget_satisfied(4, 1, 1, p, 0.1)
                .unwrap()
                .satisfied;
            assert!(!(seen && !ok));
            seen |= ok;
        }
        assert!(seen);

        // vanishing epsilon pushes delta beyond what a fixed power can meet
        let p = TransmitPower::from_db(30.0).unwrap();
        assert!(
            !feedback_budget_satisfied(4, 3, 1, p, 1e-250)
                .unwrap()
                .satisfied
        );
        assert!(feedback_budget_satisfied(4, 1, 1, p, 0.0).is_err());
    }
}
