use std::fmt;

use rand::Rng;

use crate::channel::RngStream;
use crate::dmc::{blahut_arimoto, build_dmc, mutual_information, InputDistribution};
use crate::error::Result;
use crate::siso::rotated_qpsk_capacity;

pub const MI_TOLERANCE: f64 = 1e-9;
pub const BA_TOLERANCE: f64 = 1e-6;
pub const TV_TOLERANCE: f64 = 1e-6;
/// Stopping gap handed to Blahut-Arimoto, bits.
pub const BA_STOP_GAP: f64 = 1e-12;
pub const MAX_A_SQ: f64 = 50.0;

/// Deterministic `(a_sq, theta)` points checked by [`run_oracle_check`]: a
/// regular grid plus `random_points` uniform draws.
pub fn oracle_points(seed: u64, random_points: usize) -> Vec<(f64, f64)> {
    let quarter = std::f64::consts::FRAC_PI_4;
    let mut pts = Vec::new();
    for i in 0..=100 {
        let a_sq = MAX_A_SQ * i as f64 / 100.0;
        for j in 0..=32 {
            pts.push((a_sq, -quarter + 2.0 * quarter * j as f64 / 32.0));
        }
    }
    let mut rng = RngStream::new(seed, 0).domain(0x4f52_4143).rng();
    for _ in 0..random_points {
        let a_sq = rng.gen::<f64>() * MAX_A_SQ;
        let theta = (2.0 * rng.gen::<f64>() - 1.0) * quarter;
        pts.push((a_sq, theta));
    }
    pts
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deviation {
    pub value: f64,
    pub a_sq: f64,
    pub theta: f64,
}

impl Deviation {
    fn zero() -> Self {
        Self {
            value: 0.0,
            a_sq: f64::NAN,
            theta: f64::NAN,
        }
    }

    fn update(&mut self, value: f64, a_sq: f64, theta: f64) {
        if value > self.value || value.is_nan() {
            *self = Self { value, a_sq, theta };
        }
    }
}

/// Worst deviations found while comparing the closed-form capacity with the
/// quantized-QPSK channel it claims to describe.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub points: usize,
    /// `max |closed form - I(uniform)|`.
    pub mi_deviation: Deviation,
    /// `max (C_BA - closed form)`.
    pub ba_excess: Deviation,
    /// `max (closed form - C_BA)`; BA can never fall below uniform input.
    pub ba_deficit: Deviation,
    /// Largest total-variation distance of the BA optimum from uniform at `theta = 0`.
    pub aligned_tv: Deviation,
    pub zero_power_consistent: bool,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.mi_deviation.value <= MI_TOLERANCE
            && self.ba_excess.value < BA_TOLERANCE
            && self.ba_deficit.value < BA_TOLERANCE
            && self.aligned_tv.value <= TV_TOLERANCE
            && self.zero_power_consistent
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let line = |f: &mut fmt::Formatter<'_>, name: &str, d: &Deviation, tol: f64| {
            let status = if d.value <= tol { "PASS" } else { "FAIL" };
            writeln!(
                f,
                "{status} {name}: max {:.3e} (tol {tol:.0e}) at a_sq={:.6}, theta={:.6}",
                d.value, d.a_sq, d.theta
            )
        };
        writeln!(f, "oracle-check over {} (a_sq, theta) points", self.points)?;
        line(
            f,
            "closed form vs uniform-input MI",
            &self.mi_deviation,
            MI_TOLERANCE,
        )?;
        line(
            f,
            "Blahut-Arimoto excess over closed form",
            &self.ba_excess,
            BA_TOLERANCE,
        )?;
        line(
            f,
            "closed form excess over Blahut-Arimoto",
            &self.ba_deficit,
            BA_TOLERANCE,
        )?;
        line(
            f,
            "BA optimum distance from uniform at theta=0",
            &self.aligned_tv,
            TV_TOLERANCE,
        )?;
        writeln!(
            f,
            "{} zero-power point: all quantities zero",
            if self.zero_power_consistent {
                "PASS"
            } else {
                "FAIL"
            }
        )?;
        write!(
            f,
            "{}",
            if self.passed() {
                "oracle-check PASSED"
            } else {
                "oracle-check FAILED"
            }
        )
    }
}

/// Sweeps `oracle_points(seed, random_points)` and records the worst deviations.
pub fn run_oracle_check(seed: u64, random_points: usize) -> Result<OracleReport> {
    let uniform = InputDistribution::uniform();
    let points = oracle_points(seed, random_points);
    let mut report = OracleReport {
        points: points.len(),
        mi_deviation: Deviation::zero(),
        ba_excess: Deviation::zero(),
        ba_deficit: Deviation::zero(),
        aligned_tv: Deviation::zero(),
        zero_power_consistent: true,
    };
    for &(a_sq, theta) in &points {
        let dmc = build_dmc(a_sq, theta)?;
        let closed = rotated_qpsk_capacity(a_sq, theta);
        let mi = mutual_information(&dmc, &uniform);
        let ba = blahut_arimoto(&dmc, BA_STOP_GAP)?;
        report.mi_deviation.update((closed - mi).abs(), a_sq, theta);
        report.ba_excess.update(ba.capacity - closed, a_sq, theta);
        report.ba_deficit.update(closed - ba.capacity, a_sq, theta);
        if theta == 0.0 {
            report
                .aligned_tv
                .update(ba.optimum.total_variation(&uniform), a_sq, theta);
        }
        if a_sq == 0.0 && !(closed == 0.0 && mi == 0.0 && ba.capacity == 0.0) {
            report.zero_power_consistent = false;
        }
    }
    Ok(report)
}
