use rayon::prelude::*;

use super::config::{ExperimentConfig, Mode, Split};
use super::stats::Summary;
use super::ResultRow;
use crate::channel::{sample_channel, RngStream, TransmitPower};
use crate::error::{Error, Result};
use crate::miso::{build_rvq_codebook, miso_feedback, DirectionCodebook};
use crate::siso::aligned_capacity;
use crate::siso::{
    build_phase_codebook, no_csit_theta, rotated_qpsk_capacity, siso_feedback, PhaseCodebook,
};

/// Domain tag for per-realization RVQ codebooks (offset by `b1`).
const CODEBOOK_TAG: u64 = 0x5256_5100;
/// Domain tag for the shared codebook used with `fixed_codebook`.
const FIXED_CODEBOOK_TAG: u64 = 0x4649_5800;

struct Scheme {
    label: String,
    has_cos2: bool,
    has_theta: bool,
}

impl Scheme {
    fn new(label: impl Into<String>, has_cos2: bool, has_theta: bool) -> Self {
        Self {
            label: label.into(),
            has_cos2,
            has_theta,
        }
    }
}

/// What one channel realization contributes to every (SNR, scheme) cell.
struct TrialRecord {
    /// `values[snr_index * n_schemes + scheme_index]`.
    values: Vec<f64>,
    cos2: Vec<f64>,
    abs_theta: Vec<f64>,
}

fn powers(cfg: &ExperimentConfig) -> Result<(Vec<f64>, Vec<TransmitPower<f64>>)> {
    let snrs = cfg.snr.points();
    let powers = snrs
        .iter()
        .map(|&db| TransmitPower::from_db(db))
        .collect::<Result<Vec<_>>>()?;
    Ok((snrs, powers))
}

fn expect_mode(cfg: &ExperimentConfig, mode: Mode) -> Result<()> {
    if cfg.mode != mode {
        return Err(Error::Config(format!(
            "config mode {:?} passed to the {:?} runner",
            cfg.mode, mode
        )));
    }
    cfg.validate()
}

/// Reduces per-trial records in trial order; identical for any thread count.
fn aggregate(snrs: &[f64], schemes: &[Scheme], records: &[TrialRecord]) -> Vec<ResultRow> {
    let n_schemes = schemes.len();
    let column = |f: &dyn Fn(&TrialRecord) -> f64| -> Vec<f64> { records.iter().map(f).collect() };
    let extras: Vec<(Option<f64>, Option<f64>)> = schemes
        .iter()
        .enumerate()
        .map(|(j, s)| {
            let cos2 = s
                .has_cos2
                .then(|| Summary::of(&column(&|r| r.cos2[j])).mean);
            let theta = s
                .has_theta
                .then(|| Summary::of(&column(&|r| r.abs_theta[j])).mean);
            (cos2, theta)
        })
        .collect();
    let mut rows = Vec::with_capacity(snrs.len() * n_schemes);
    for (i, &snr_db) in snrs.iter().enumerate() {
        for (j, s) in schemes.iter().enumerate() {
            let summary = Summary::of(&column(&|r| r.values[i * n_schemes + j]));
            rows.push(ResultRow {
                snr_db,
                scheme: s.label.clone(),
                mean_capacity: summary.mean,
                std_error: summary.std_err,
                mean_cos2beta: extras[j].0,
                mean_abs_theta: extras[j].1,
                n_trials: records.len(),
            });
        }
    }
    rows
}

/// SISO curves: perfect CSIT, `B`-bit phase feedback for each configured `B`,
/// and fixed QPSK without CSIT. All schemes share the channel draw of each trial.
pub fn run_siso(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    expect_mode(cfg, Mode::Siso)?;
    let (snrs, powers) = powers(cfg)?;
    let codebooks: Vec<PhaseCodebook<f64>> = cfg
        .phase_bits
        .iter()
        .map(|&b| build_phase_codebook(b))
        .collect::<Result<_>>()?;

    let mut schemes = vec![Scheme::new("perfect_csit", false, false)];
    schemes.extend(
        cfg.phase_bits
            .iter()
            .map(|b| Scheme::new(format!("fb_b={b}"), false, true)),
    );
    schemes.push(Scheme::new("no_csit", false, true));
    let n_schemes = schemes.len();

    let records = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| -> Result<TrialRecord> {
            let h = sample_channel::<f64>(RngStream::new(cfg.seed, t), 1)?;
            let h0 = h.coefficients()[0];
            let gain = h0.norm_sqr();
            let mut thetas = vec![f64::NAN];
            for cb in &codebooks {
                thetas.push(siso_feedback(&h, cb)?.theta);
            }
            thetas.push(no_csit_theta(h0.arg()));

            let mut values = Vec::with_capacity(powers.len() * n_schemes);
            for p in &powers {
                let a = p.linear() * gain;
                values.push(aligned_capacity(a));
                for &th in &thetas[1..] {
                    values.push(rotated_qpsk_capacity(a, th));
                }
            }
            Ok(TrialRecord {
                values,
                cos2: vec![1.0; n_schemes],
                abs_theta: thetas.iter().map(|t| t.abs()).collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(aggregate(&snrs, &schemes, &records))
}

struct MisoTrial {
    norm_sq: f64,
    /// `(cos^2 beta, theta)` per split.
    feedback: Vec<(f64, f64)>,
}

fn distinct_b1(splits: &[Split]) -> Vec<u32> {
    let mut v: Vec<u32> = splits.iter().map(|s| s.b1).collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// Channel draw plus feedback for every split; codebooks for the same `b1` are
/// shared between splits of one trial.
fn miso_trials(cfg: &ExperimentConfig) -> Result<Vec<MisoTrial>> {
    let phase_books: Vec<PhaseCodebook<f64>> = cfg
        .splits
        .iter()
        .map(|s| build_phase_codebook(s.b2))
        .collect::<Result<_>>()?;
    let b1s = distinct_b1(&cfg.splits);
    let fixed: Vec<(u32, DirectionCodebook<f64>)> = if cfg.fixed_codebook {
        b1s.iter()
            .map(|&b1| {
                let stream = RngStream::new(cfg.seed, 0).domain(FIXED_CODEBOOK_TAG + b1 as u64);
                build_rvq_codebook(stream, cfg.nt, b1).map(|cb| (b1, cb))
            })
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };

    (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| -> Result<MisoTrial> {
            let h = sample_channel::<f64>(RngStream::new(cfg.seed, t), cfg.nt)?;
            let mut feedback = vec![(0.0, 0.0); cfg.splits.len()];
            for &b1 in &b1s {
                let fresh;
                let cb = if cfg.fixed_codebook {
                    &fixed.iter().find(|(b, _)| *b == b1).expect("built above").1
                } else {
                    let stream = RngStream::new(cfg.seed, t).domain(CODEBOOK_TAG + b1 as u64);
                    fresh = build_rvq_codebook(stream, cfg.nt, b1)?;
                    &fresh
                };
                for (j, s) in cfg.splits.iter().enumerate() {
                    if s.b1 == b1 {
                        let fb = miso_feedback(&h, cb, &phase_books[j])?;
                        feedback[j] = (fb.cos2_beta, fb.theta);
                    }
                }
            }
            Ok(MisoTrial {
                norm_sq: h.norm_sq(),
                feedback,
            })
        })
        .collect()
}

fn evaluate_miso(
    cfg: &ExperimentConfig,
    powers: &[TransmitPower<f64>],
    trials: &[MisoTrial],
    loss: bool,
) -> Vec<TrialRecord> {
    let n_splits = cfg.splits.len();
    trials
        .par_iter()
        .map(|tr| {
            let mut values = Vec::with_capacity(powers.len() * (n_splits + 1));
            for p in powers {
                let a = p.linear() * tr.norm_sq;
                let perfect = aligned_capacity(a);
                if !loss {
                    values.push(perfect);
                }
                for &(cos2, th) in &tr.feedback {
                    let fb = rotated_qpsk_capacity(a * cos2, th);
                    values.push(if loss { perfect - fb } else { fb });
                }
            }
            let offset = usize::from(!loss);
            let mut cos2 = vec![1.0; offset];
            let mut abs_theta = vec![0.0; offset];
            cos2.extend(tr.feedback.iter().map(|f| f.0));
            abs_theta.extend(tr.feedback.iter().map(|f| f.1.abs()));
            TrialRecord {
                values,
                cos2,
                abs_theta,
            }
        })
        .collect()
}

/// MISO curves: perfect CSIT plus every requested `(b1, b2)` split.
pub fn run_miso(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    expect_mode(cfg, Mode::Miso)?;
    let (snrs, powers) = powers(cfg)?;
    let trials = miso_trials(cfg)?;
    let mut schemes = vec![Scheme::new("perfect_csit", false, false)];
    schemes.extend(
        cfg.splits
            .iter()
            .map(|s| Scheme::new(format!("fb_{s}"), true, true)),
    );
    let records = evaluate_miso(cfg, &powers, &trials, false);
    Ok(aggregate(&snrs, &schemes, &records))
}

/// Mean per-realization capacity loss `C_perfect - C_fb` for every split.
pub fn run_loss(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    expect_mode(cfg, Mode::Loss)?;
    let (snrs, powers) = powers(cfg)?;
    let trials = miso_trials(cfg)?;
    let schemes: Vec<Scheme> = cfg
        .splits
        .iter()
        .map(|s| Scheme::new(format!("loss_{s}"), true, true))
        .collect();
    let records = evaluate_miso(cfg, &powers, &trials, true);
    Ok(aggregate(&snrs, &schemes, &records))
}
