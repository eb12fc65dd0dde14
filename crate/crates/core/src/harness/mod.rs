//! Monte Carlo experiments over Rayleigh-fading realizations and the
//! closed-form-versus-channel oracle check.
//!
//! Trial `t` always uses random stream `t` (channel) and a derived stream
//! (codebook), and results are reduced in trial order, so output is identical
//! for any number of worker threads.

mod config;
pub mod csv;
mod oracle;
mod run;
mod stats;

pub use config::{ExperimentConfig, Mode, SnrGrid, Split, DEFAULT_SEED, DEFAULT_TRIALS};
pub use oracle::{
    oracle_points, run_oracle_check, Deviation, OracleReport, BA_STOP_GAP, BA_TOLERANCE,
    MI_TOLERANCE, TV_TOLERANCE,
};
pub use run::{run_loss, run_miso, run_siso};
pub use stats::Summary;

/// One `(SNR, scheme)` cell of an experiment table.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub snr_db: f64,
    pub scheme: String,
    /// Mean capacity in bits per channel use (mean capacity loss for `loss` rows).
    pub mean_capacity: f64,
    pub std_error: f64,
    pub mean_cos2beta: Option<f64>,
    pub mean_abs_theta: Option<f64>,
    pub n_trials: usize,
}

/// Rows of one scheme, in SNR order.
pub fn curve<'a>(rows: &'a [ResultRow], scheme: &str) -> Vec<&'a ResultRow> {
    rows.iter().filter(|r| r.scheme == scheme).collect()
}

/// SNR (dB) at which a scheme's mean capacity first reaches `level`, linearly
/// interpolated between neighbouring grid points.
pub fn snr_at_capacity(rows: &[ResultRow], scheme: &str, level: f64) -> Option<f64> {
    let c = curve(rows, scheme);
    if c.first()?.mean_capacity >= level {
        return (c[0].mean_capacity == level).then_some(c[0].snr_db);
    }
    c.windows(2).find_map(|w| {
        let (a, b) = (w[0], w[1]);
        if a.mean_capacity < level && b.mean_capacity >= level {
            let frac = (level - a.mean_capacity) / (b.mean_capacity - a.mean_capacity);
            Some(a.snr_db + frac * (b.snr_db - a.snr_db))
        } else {
            None
        }
    })
}

/// Horizontal distance in dB between two curves at capacity `level`
/// (`scheme` minus `reference`; positive means `scheme` needs more power).
pub fn horizontal_gap_db(
    rows: &[ResultRow],
    reference: &str,
    scheme: &str,
    level: f64,
) -> Option<f64> {
    Some(snr_at_capacity(rows, scheme, level)? - snr_at_capacity(rows, reference, level)?)
}

/// Runs whichever table-producing experiment `cfg.mode` names.
pub fn run_experiment(cfg: &ExperimentConfig) -> crate::Result<Vec<ResultRow>> {
    match cfg.mode {
        Mode::Siso => run_siso(cfg),
        Mode::Miso => run_miso(cfg),
        Mode::Loss => run_loss(cfg),
        Mode::OracleCheck => Err(crate::Error::Config(
            "oracle-check produces a report, not a table; use run_oracle_check".into(),
        )),
    }
}
