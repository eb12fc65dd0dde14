use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub const DEFAULT_TRIALS: usize = 1000;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Siso,
    Miso,
    Loss,
    OracleCheck,
}

/// Allocation of feedback bits between direction (`b1`) and residual phase (`b2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Split {
    pub b1: u32,
    pub b2: u32,
}

impl Split {
    pub fn new(b1: u32, b2: u32) -> Self {
        Self { b1, b2 }
    }

    pub fn total(self) -> u32 {
        self.b1 + self.b2
    }

    /// Every split of `total` bits with both parts at least 1, most direction
    /// bits first.
    pub fn sweep(total: u32) -> Vec<Split> {
        (1..total)
            .rev()
            .map(|b1| Split::new(b1, total - b1))
            .collect()
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "b1={}_b2={}", self.b1, self.b2)
    }
}

impl FromStr for Split {
    type Err = Error;

    /// Parses `"b1,b2"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("split must look like `b1,b2`, got `{s}`"));
        let (a, b) = s.split_once(',').ok_or_else(bad)?;
        let b1 = a.trim().parse().map_err(|_| bad())?;
        let b2 = b.trim().parse().map_err(|_| bad())?;
        Ok(Split::new(b1, b2))
    }
}

/// Inclusive SNR grid in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrGrid {
    pub start: f64,
    pub step: f64,
    pub stop: f64,
}

impl SnrGrid {
    pub fn new(start: f64, step: f64, stop: f64) -> Result<Self> {
        let grid = Self { start, step, stop };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.stop.is_finite() && self.step.is_finite()) {
            return Err(Error::Config("SNR grid must be finite".into()));
        }
        if self.step <= 0.0 {
            return Err(Error::Config("SNR step must be positive".into()));
        }
        if self.stop < self.start {
            return Err(Error::Config("SNR stop must not precede start".into()));
        }
        if (self.stop - self.start) / self.step > 1e6 {
            return Err(Error::Config("SNR grid has too many points".into()));
        }
        Ok(())
    }

    /// Grid points `start + i*step` up to `stop` (with a small tolerance so
    /// `stop` is included when it lies on the grid).
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.start + i as f64 * self.step).collect()
    }
}

impl Default for SnrGrid {
    fn default() -> Self {
        Self {
            start: -10.0,
            step: 1.0,
            stop: 30.0,
        }
    }
}

impl FromStr for SnrGrid {
    type Err = Error;

    /// Parses `"start:step:stop"` in dB.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || {
            Error::Config(format!(
                "SNR grid must look like `start:step:stop`, got `{s}`"
            ))
        };
        if parts.len() != 3 {
            return Err(bad());
        }
        let v: Vec<f64> = parts
            .iter()
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        SnrGrid::new(v[0], v[1], v[2])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub nt: usize,
    /// Phase-feedback bit counts compared in `siso` mode.
    pub phase_bits: Vec<u32>,
    /// Direction/phase splits compared in `miso` and `loss` modes.
    pub splits: Vec<Split>,
    pub snr: SnrGrid,
    pub trials: usize,
    pub seed: u64,
    /// Reuse one RVQ codebook per split for every realization instead of
    /// drawing a fresh one per realization.
    pub fixed_codebook: bool,
}

impl ExperimentConfig {
    pub fn new(mode: Mode) -> Self {
        let nt = if mode == Mode::Siso { 1 } else { 4 };
        Self {
            mode,
            nt,
            phase_bits: vec![1, 2],
            splits: Split::sweep(4),
            snr: SnrGrid::default(),
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
            fixed_codebook: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        self.snr.validate()?;
        match self.mode {
            Mode::Siso => {
                if self.nt != 1 {
                    return Err(Error::Config("siso mode needs nt = 1".into()));
                }
                if self.phase_bits.is_empty() {
                    return Err(Error::Config(
                        "siso mode needs at least one bit count".into(),
                    ));
                }
                if let Some(b) = self.phase_bits.iter().find(|&&b| b == 0 || b > 30) {
                    return Err(Error::Config(format!("phase bits {b} outside 1..=30")));
                }
            }
            Mode::Miso | Mode::Loss => {
                if self.nt < 2 {
                    return Err(Error::Config("miso/loss modes need nt >= 2".into()));
                }
                if self.splits.is_empty() {
                    return Err(Error::Config("no bit splits requested".into()));
                }
                for s in &self.splits {
                    if s.b1 == 0 || s.b2 == 0 {
                        return Err(Error::Config(format!("split {s}: b1 and b2 must be >= 1")));
                    }
                    if s.b1 > crate::miso::MAX_DIRECTION_BITS || s.b2 > 30 {
                        return Err(Error::Config(format!("split {s}: too many bits")));
                    }
                }
            }
            Mode::OracleCheck => {}
        }
        Ok(())
    }
}
