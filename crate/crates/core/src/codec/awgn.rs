//! Monte Carlo symbol error rates over an additive white Gaussian noise channel.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

use super::{DecodeMode, TorusCode};

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959964;

#[derive(Debug, Clone)]
pub struct AwgnConfig {
    /// Signal-to-noise ratio `E_s / (n σ²)` in dB; `+inf` means no noise.
    pub snr_db: f64,
    pub trials: u64,
    pub seed: u64,
    pub modes: Vec<DecodeMode>,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeStats {
    pub mode: DecodeMode,
    pub errors: u64,
    pub trials: u64,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Trials whose result carried an ML certificate.
    pub certified: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AwgnReport {
    pub snr_db: f64,
    pub sigma: f64,
    pub seed: u64,
    pub stats: Vec<ModeStats>,
}

/// Wilson score interval for `errors` out of `trials`.
pub fn wilson_interval(errors: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Per-trial outcome: (error, certified) for each mode.
fn run_one(code: &TorusCode, cfg: &AwgnConfig, sigma: f64, trial: u64) -> Result<Vec<(bool, bool)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(trial);
    let label = code.random_label(&mut rng)?;
    let mut y = code.encode(&label)?;
    if sigma > 0.0 {
        for v in y.iter_mut() {
            let e: f64 = StandardNormal.sample(&mut rng);
            *v += sigma * e;
        }
    }
    cfg.modes
        .iter()
        .map(|&m| {
            let r = code.decode(&y, m)?;
            Ok((r.label != label, r.ml_certified))
        })
        .collect()
}

/// Sends uniformly random codewords through the channel and decodes them in
/// every requested mode on the same noise. Results depend only on the seed.
pub fn awgn_trial(code: &TorusCode, cfg: &AwgnConfig) -> Result<AwgnReport> {
    if cfg.trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    if cfg.modes.is_empty() {
        return Err(Error::InvalidParameter("no decode mode requested".into()));
    }
    if cfg.snr_db.is_nan() {
        return Err(Error::InvalidParameter("snr is NaN".into()));
    }
    let snr = 10f64.powf(cfg.snr_db / 10.0);
    let sigma = if snr.is_infinite() { 0.0 } else { (1.0 / (code.ambient_dim() as f64 * snr)).sqrt() };
    let work = || -> Result<Vec<Vec<(bool, bool)>>> {
        (0..cfg.trials).into_par_iter().map(|t| run_one(code, cfg, sigma, t)).collect()
    };
    let outcomes = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?
            .install(work)?,
        None => work()?,
    };
    let stats = cfg
        .modes
        .iter()
        .enumerate()
        .map(|(k, &mode)| {
            let errors = outcomes.iter().filter(|o| o[k].0).count() as u64;
            let certified = outcomes.iter().filter(|o| o[k].1).count() as u64;
            let (ci_low, ci_high) = wilson_interval(errors, cfg.trials);
            ModeStats {
                mode,
                errors,
                trials: cfg.trials,
                rate: errors as f64 / cfg.trials as f64,
                ci_low,
                ci_high,
                certified,
            }
        })
        .collect();
    Ok(AwgnReport { snr_db: cfg.snr_db, sigma, seed: cfg.seed, stats })
}
