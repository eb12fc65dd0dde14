//! Exact 4-input / 4-output discrete memoryless channel seen by rotated QPSK
//! through two one-bit quantizers, with mutual information and a Blahut-Arimoto
//! capacity solver.
//!
//! Nothing here reuses the closed-form capacity code: transition probabilities
//! come straight from the per-dimension Gaussian sign-flip probabilities, so
//! agreement with [`crate::siso::capacity_siso_fb`] is an independent check.

use crate::error::{Error, Result};
use crate::numerics::{q_raw, Probability};
use crate::scalar::Real;

pub const ALPHABET: usize = 4;
pub const BA_MAX_ITERATIONS: usize = 100_000;

/// Output labels in column order.
pub const OUTPUT_LABELS: [(i8, i8); ALPHABET] = [(1, 1), (1, -1), (-1, 1), (-1, -1)];

/// Row-stochastic transition matrix; rows are QPSK inputs `k = 0..4`, columns
/// follow [`OUTPUT_LABELS`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DmcModel<T> {
    transition: [[T; ALPHABET]; ALPHABET],
}

impl<T: Real> DmcModel<T> {
    /// Wraps an explicit matrix after checking every row is a distribution.
    pub fn from_matrix(transition: [[T; ALPHABET]; ALPHABET]) -> Result<Self> {
        for row in &transition {
            for &p in row {
                Probability::new(p)?;
            }
            let sum = row.iter().fold(T::zero(), |a, &b| a + b);
            if (sum - T::one()).abs() > T::lit(1e-12).max(T::epsilon() * T::lit(8.0)) {
                return Err(Error::ProbabilityOutOfRange(sum.as_f64()));
            }
        }
        Ok(Self { transition })
    }

    #[inline]
    pub fn transition(&self) -> &[[T; ALPHABET]; ALPHABET] {
        &self.transition
    }

    #[inline]
    pub fn entry(&self, input: usize, output: usize) -> T {
        self.transition[input][output]
    }
}

/// Probabilities over the four QPSK inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputDistribution<T> {
    probabilities: [T; ALPHABET],
}

impl<T: Real> InputDistribution<T> {
    pub fn new(probabilities: [T; ALPHABET]) -> Result<Self> {
        let mut sum = T::zero();
        for &p in &probabilities {
            Probability::new(p)?;
            sum = sum + p;
        }
        if (sum - T::one()).abs() > T::lit(1e-12).max(T::epsilon() * T::lit(8.0)) {
            return Err(Error::ProbabilityOutOfRange(sum.as_f64()));
        }
        Ok(Self { probabilities })
    }

    pub fn uniform() -> Self {
        Self {
            probabilities: [T::lit(0.25); ALPHABET],
        }
    }

    #[inline]
    pub fn probabilities(&self) -> &[T; ALPHABET] {
        &self.probabilities
    }

    /// Total variation distance `1/2 sum |p - q|`.
    pub fn total_variation(&self, other: &Self) -> T {
        self.probabilities
            .iter()
            .zip(&other.probabilities)
            .fold(T::zero(), |a, (p, q)| a + (*p - *q).abs())
            * T::lit(0.5)
    }
}

/// Transition matrix for received amplitude `sqrt(a_sq)` and constellation
/// offset `theta`: symbol `k` arrives at angle `k*pi/2 + pi/4 + theta`, and each
/// real dimension carries `N(0, 1/2)` noise.
pub fn build_dmc<T: Real>(a_sq: T, theta: T) -> Result<DmcModel<T>> {
    if !a_sq.is_finite() || a_sq < T::zero() {
        return Err(Error::OutOfRange {
            name: "a_sq",
            value: a_sq.as_f64(),
            range: "[0, inf)",
        });
    }
    if theta.is_nan() || theta.abs() > T::FRAC_PI_4() {
        return Err(Error::OutOfRange {
            name: "theta",
            value: theta.as_f64(),
            range: "[-pi/4, pi/4]",
        });
    }
    // sqrt(2) * A scales a unit-amplitude component to units of the noise std
    let scale = (T::lit(2.0) * a_sq).sqrt();
    let mut transition = [[T::zero(); ALPHABET]; ALPHABET];
    for (k, row) in transition.iter_mut().enumerate() {
        let angle = T::FRAC_PI_2() * T::lit(k as f64) + T::FRAC_PI_4() + theta;
        let (sin, cos) = angle.sin_cos();
        let (re_margin, im_margin) = (scale * cos, scale * sin);
        // P[sign = s] for a component with mean m is Q(-s m)
        let p_re_pos = q_raw(-re_margin);
        let p_re_neg = q_raw(re_margin);
        let p_im_pos = q_raw(-im_margin);
        let p_im_neg = q_raw(im_margin);
        for (col, &(sr, si)) in OUTPUT_LABELS.iter().enumerate() {
            let pr = if sr > 0 { p_re_pos } else { p_re_neg };
            let pi = if si > 0 { p_im_pos } else { p_im_neg };
            row[col] = pr * pi;
        }
    }
    Ok(DmcModel { transition })
}

fn output_marginal<T: Real>(dmc: &DmcModel<T>, input: &InputDistribution<T>) -> [T; ALPHABET] {
    let mut q = [T::zero(); ALPHABET];
    for (k, row) in dmc.transition.iter().enumerate() {
        for (r, qr) in q.iter_mut().enumerate() {
            *qr = *qr + input.probabilities[k] * row[r];
        }
    }
    q
}

/// `D(T_k || q)` in nats for every input row; zero entries contribute nothing.
fn row_divergences<T: Real>(dmc: &DmcModel<T>, q: &[T; ALPHABET]) -> [T; ALPHABET] {
    let mut d = [T::zero(); ALPHABET];
    for (k, row) in dmc.transition.iter().enumerate() {
        d[k] = row.iter().zip(q).fold(T::zero(), |acc, (&t, &qr)| {
            if t > T::zero() {
                acc + t * (t / qr).ln()
            } else {
                acc
            }
        });
    }
    d
}

/// `I(X; R)` in bits.
pub fn mutual_information<T: Real>(dmc: &DmcModel<T>, input: &InputDistribution<T>) -> T {
    let q = output_marginal(dmc, input);
    let d = row_divergences(dmc, &q);
    let nats = input
        .probabilities
        .iter()
        .zip(&d)
        .fold(
            T::zero(),
            |a, (&p, &dk)| if p > T::zero() { a + p * dk } else { a },
        );
    (nats * T::LOG2_E()).max(T::zero())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlahutArimoto<T> {
    /// Capacity in bits (lower end of the final bracket).
    pub capacity: T,
    pub optimum: InputDistribution<T>,
    /// Width of the final upper/lower capacity bracket, bits.
    pub gap: T,
    pub iterations: usize,
}

/// Maximizes `I(X; R)` over the input distribution, starting from uniform and
/// stopping once the Arimoto upper and lower capacity bounds are within `tol`
/// bits.
pub fn blahut_arimoto<T: Real>(dmc: &DmcModel<T>, tol: T) -> Result<BlahutArimoto<T>> {
    if tol.is_nan() || tol <= T::zero() {
        return Err(Error::OutOfRange {
            name: "tol",
            value: tol.as_f64(),
            range: "(0, inf)",
        });
    }
    let mut p = InputDistribution::<T>::uniform().probabilities;
    let mut gap = T::infinity();
    for it in 0..BA_MAX_ITERATIONS {
        let dist = InputDistribution { probabilities: p };
        let q = output_marginal(dmc, &dist);
        let d = row_divergences(dmc, &q);
        let mut dmax = T::neg_infinity();
        for &dk in &d {
            dmax = dmax.max(dk);
        }
        // work relative to the largest divergence so exp() stays bounded
        let mut weights = [T::zero(); ALPHABET];
        let mut z = T::zero();
        for k in 0..ALPHABET {
            weights[k] = p[k] * (d[k] - dmax).exp();
            z = z + weights[k];
        }
        let lower = (dmax + z.ln()) * T::LOG2_E();
        let upper = dmax * T::LOG2_E();
        gap = (upper - lower).max(T::zero());
        if gap < tol {
            return Ok(BlahutArimoto {
                capacity: mutual_information(dmc, &dist).max(lower),
                optimum: dist,
                gap,
                iterations: it,
            });
        }
        for k in 0..ALPHABET {
            p[k] = weights[k] / z;
        }
    }
    Err(Error::NoConvergence {
        iterations: BA_MAX_ITERATIONS,
        gap: gap.as_f64(),
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::channel::TransmitPower;
    use crate::numerics::{hbq, EffectiveSnr};
    use crate::siso::{capacity_siso_fb, capacity_siso_perfect};

    #[test]
    fn pure_noise_channel() {
        let dmc = build_dmc(0.0_f64, 0.3).unwrap();
        for row in dmc.transition() {
            for &t in row {
                assert_eq!(t, 0.25);
            }
        }
        assert_eq!(mutual_information(&dmc, &InputDistribution::uniform()), 0.0);
        let ba = blahut_arimoto(&dmc, 1e-12).unwrap();
        assert_eq!(ba.capacity, 0.0);
    }

    #[test]
    fn noiseless_limit_is_identity() {
        let dmc = build_dmc(100.0_f64, 0.0).unwrap();
        // k=0 -> 1+j, k=1 -> -1+j, k=2 -> -1-j, k=3 -> 1-j
        let expect = [0, 2, 3, 1];
        for (k, &col) in expect.iter().enumerate() {
            assert!(dmc.entry(k, col) >= 1.0 - 1e-15);
        }
    }

    #[test]
    fn flip_probability_at_a_sq_two() {
        let dmc = build_dmc(2.0_f64, 0.0).unwrap();
        let flip: f64 = 0.078_649_603_525_142_57;
        assert!((dmc.entry(0, 0) - (1.0 - flip).powi(2)).abs() < 1e-15);
        assert!((dmc.entry(0, 1) - flip * (1.0 - flip)).abs() < 1e-15);
        assert!((dmc.entry(0, 3) - flip * flip).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(build_dmc(-1.0_f64, 0.0).is_err());
        assert!(build_dmc(1.0_f64, 1.0).is_err());
        assert!(build_dmc(f64::NAN, 0.0).is_err());
        assert!(InputDistribution::new([0.5_f64, 0.5, 0.5, -0.5]).is_err());
        assert!(InputDistribution::new([0.3_f64, 0.3, 0.3, 0.3]).is_err());
        let bad = [[0.5_f64, 0.5, 0.0, 0.1], [0.25; 4], [0.25; 4], [0.25; 4]];
        assert!(DmcModel::from_matrix(bad).is_err());
        assert!(blahut_arimoto(&build_dmc(1.0_f64, 0.0).unwrap(), 0.0).is_err());
    }

    #[test]
    fn permutation_channel_carries_two_bits() {
        let mut m = [[0.0_f64; 4]; 4];
        for (k, row) in m.iter_mut().enumerate() {
            row[(k + 1) % 4] = 1.0;
        }
        let dmc = DmcModel::from_matrix(m).unwrap();
        let mi = mutual_information(&dmc, &InputDistribution::uniform());
        assert!((mi - 2.0).abs() < 1e-15);
    }

    #[test]
    fn uniform_mi_matches_closed_form() {
        let mut s = 12345u64;
        let mut next = || {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..1000 {
            let a = 50.0 * next();
            let th = (2.0 * next() - 1.0) * PI / 4.0;
            let dmc = build_dmc(a, th).unwrap();
            let mi = mutual_information(&dmc, &InputDistribution::uniform());
            let p = TransmitPower::from_linear(a.max(1e-300)).unwrap();
            let closed = capacity_siso_fb(p, if a > 0.0 { 1.0 } else { 0.0 }, th).unwrap();
            assert!((mi - closed).abs() < 1e-9, "a={a} th={th}");
            let fac = 2.0
                - hbq(EffectiveSnr::new(a * (1.0 - (2.0 * th).sin())).unwrap())
                - hbq(EffectiveSnr::new(a * (1.0 + (2.0 * th).sin())).unwrap());
            assert!((mi - fac).abs() < 1e-9);
        }
    }

    #[test]
    fn rows_are_distributions() {
        for i in 0..1000 {
            let a = (i as f64) * 0.05;
            let th = ((i * 37 % 1000) as f64 / 1000.0 * 2.0 - 1.0) * PI / 4.0;
            let dmc = build_dmc(a, th).unwrap();
            for row in dmc.transition() {
                let s: f64 = row.iter().sum();
                assert!((s - 1.0).abs() < 1e-12);
                assert!(row.iter().all(|&t| t >= 0.0));
            }
        }
    }

    #[test]
    fn quarter_turn_relabels_outputs() {
        let dmc = build_dmc(3.0_f64, 0.2).unwrap();
        // rotating by pi/2 maps (re, im) -> (-im, re)
        let rot = |col: usize| {
            let (r, i) = OUTPUT_LABELS[col];
            OUTPUT_LABELS.iter().position(|&l| l == (-i, r)).unwrap()
        };
        for k in 0..4 {
            for col in 0..4 {
                let a = dmc.entry(k, col);
                let b = dmc.entry((k + 1) % 4, rot(col));
                assert!((a - b).abs() < 1e-15);
            }
        }
        let shifted: [[f64; 4]; 4] = std::array::from_fn(|k| dmc.transition()[(k + 1) % 4]);
        let shifted = DmcModel::from_matrix(shifted).unwrap();
        let u = InputDistribution::uniform();
        assert!((mutual_information(&dmc, &u) - mutual_information(&shifted, &u)).abs() < 1e-15);
    }

    #[test]
    fn ba_aligned_uniform_optimal() {
        let dmc = build_dmc(4.0_f64, 0.0).unwrap();
        let ba = blahut_arimoto(&dmc, 1e-12).unwrap();
        let u = InputDistribution::uniform();
        assert!(ba.optimum.total_variation(&u) < 1e-12);
        let perfect = capacity_siso_perfect(TransmitPower::from_linear(4.0).unwrap(), 1.0).unwrap();
        assert!((ba.capacity - perfect).abs() < 1e-12);
    }

    #[test]
    fn ba_rotated_uniform_optimal() {
        let dmc = build_dmc(10.0_f64, PI / 16.0).unwrap();
        let ba = blahut_arimoto(&dmc, 1e-12).unwrap();
        let mi = mutual_information(&dmc, &InputDistribution::uniform());
        assert!(ba.capacity - mi < 1e-8);
        assert!(ba.capacity >= mi - 1e-12);
    }

    #[test]
    fn ba_converges_on_asymmetric_channel() {
        // Z-channel-like matrix where uniform input is not optimal
        let m = [
            [1.0, 0.0, 0.0, 0.0],
            [0.5, 0.5, 0.0, 0.0],
            [0.0, 0.0, 0.9, 0.1],
            [0.0, 0.0, 0.0, 1.0],
        ];
        let dmc = DmcModel::from_matrix(m).unwrap();
        let ba = blahut_arimoto(&dmc, 1e-10).unwrap();
        let u = mutual_information(&dmc, &InputDistribution::uniform());
        assert!(ba.capacity > u + 1e-3);
        assert!(ba.gap < 1e-10);
        // coarse grid search never beats the solver
        let mut best = 0.0_f64;
        let n = 40;
        for a in 0..=n {
            for b in 0..=n - a {
                for c in 0..=n - a - b {
                    let d = n - a - b - c;
                    let p = [a, b, c, d].map(|x| x as f64 / n as f64);
                    let mi = mutual_information(&dmc, &InputDistribution::new(p).unwrap());
                    best = best.max(mi);
                }
            }
        }
        assert!(best <= ba.capacity + 1e-10);
        assert!(best > ba.capacity - 5e-3);
    }

    #[test]
    fn ba_monotone_in_power() {
        for &th in &[0.0, 0.1, PI / 5.0] {
            let mut prev = -1.0;
            for i in 0..40 {
                let a = i as f64 * 0.5;
                let c = blahut_arimoto(&build_dmc(a, th).unwrap(), 1e-12)
                    .unwrap()
                    .capacity;
                assert!(c >= prev - 1e-12);
                prev = c;
            }
        }
    }
}
