//! Statistical verification toolkit: Kolmogorov-Smirnov tests with
//! simulation-calibrated thresholds, variance/CLT diagnostics, tail-curve
//! estimation with Wilson intervals, and exit-point localization curves.
//!
//! Every statistical acceptance in the crate routes through these
//! operations; thresholds are never ad hoc. One-sample thresholds are
//! calibrated by resampling the (distribution-free) null, two-sample
//! thresholds by permutation.

use crate::environment::Environment;
use crate::error::{Error, Result};
use crate::numeric::wilson_interval;
use crate::scaling::IncrementPath;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Default significance level for calibrated tests.
pub const DEFAULT_LEVEL: f64 = 0.01;
/// Default number of null-simulation replicates for calibration.
pub const DEFAULT_CALIB_REPS: usize = 1000;
/// Fixed calibration seed, recorded in every report.
pub const CALIB_SEED: u64 = 0x5eed_ca1b;

/// Outcome of a calibrated test.
#[derive(Debug, Clone, Serialize)]
pub struct TestReport {
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
    pub sample_size: usize,
    pub level: f64,
    pub calibration: String,
}

/// One-sample Kolmogorov-Smirnov statistic against a continuous CDF.
pub fn ks_statistic(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    d
}

/// One-sample KS test with a threshold calibrated by simulating the null:
/// the statistic is distribution-free for continuous laws, so uniform
/// samples of the same size give its exact null distribution.
pub fn ks_one_sample(
    samples: &[f64],
    cdf: impl Fn(f64) -> f64,
    level: f64,
    calib_reps: usize,
) -> Result<TestReport> {
    if samples.len() < 100 {
        return Err(Error::TooFewSamples {
            need: 100,
            got: samples.len(),
        });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let statistic = ks_statistic(&sorted, cdf);
    let threshold = ks_null_quantile(samples.len(), level, calib_reps, CALIB_SEED);
    Ok(TestReport {
        statistic,
        threshold,
        pass: statistic <= threshold,
        sample_size: samples.len(),
        level,
        calibration: format!("null-resampled, reps={calib_reps}, seed={CALIB_SEED:#x}"),
    })
}

/// The (1 - level)-quantile of the null KS distribution for sample size n,
/// estimated from `reps` simulated uniform samples.
pub fn ks_null_quantile(n: usize, level: f64, reps: usize, seed: u64) -> f64 {
    let env = Environment::new(seed);
    let mut stats: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let s = env.stream(1_000_000 + rep as u64);
            let mut u: Vec<f64> = (0..n).map(|i| s.uniform(i as i64, 0)).collect();
            u.sort_by(|a, b| a.partial_cmp(b).unwrap());
            ks_statistic(&u, |x| x.clamp(0.0, 1.0))
        })
        .collect();
    stats.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let rank = (((1.0 - level) * reps as f64).ceil() as usize).clamp(1, reps);
    stats[rank - 1]
}

/// Two-sample KS statistic.
pub fn ks2_statistic(a_sorted: &[f64], b_sorted: &[f64]) -> f64 {
    let (na, nb) = (a_sorted.len() as f64, b_sorted.len() as f64);
    let (mut ia, mut ib) = (0usize, 0usize);
    let mut d = 0.0f64;
    while ia < a_sorted.len() && ib < b_sorted.len() {
        if a_sorted[ia] <= b_sorted[ib] {
            ia += 1;
        } else {
            ib += 1;
        }
        d = d.max((ia as f64 / na - ib as f64 / nb).abs());
    }
    d
}

/// Two-sample KS test with a permutation-calibrated threshold (valid for
/// discrete data too, by exchangeability).
pub fn ks_two_sample(a: &[f64], b: &[f64], level: f64, calib_reps: usize) -> Result<TestReport> {
    if a.len() < 100 || b.len() < 100 {
        return Err(Error::TooFewSamples {
            need: 100,
            got: a.len().min(b.len()),
        });
    }
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_by(|x, y| x.partial_cmp(y).unwrap());
    sb.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let statistic = ks2_statistic(&sa, &sb);

    let mut pooled = a.to_vec();
    pooled.extend_from_slice(b);
    let na = a.len();
    let mut stats: Vec<f64> = (0..calib_reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = ChaCha8Rng::seed_from_u64(CALIB_SEED ^ (rep as u64).wrapping_mul(0x9e37));
            let mut pool = pooled.clone();
            pool.shuffle(&mut rng);
            let (pa, pb) = pool.split_at_mut(na);
            pa.sort_by(|x, y| x.partial_cmp(y).unwrap());
            pb.sort_by(|x, y| x.partial_cmp(y).unwrap());
            ks2_statistic(pa, pb)
        })
        .collect();
    stats.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let rank = (((1.0 - level) * calib_reps as f64).ceil() as usize).clamp(1, calib_reps);
    let threshold = stats[rank - 1];
    Ok(TestReport {
        statistic,
        threshold,
        pass: statistic <= threshold,
        sample_size: a.len() + b.len(),
        level,
        calibration: format!("permutation, reps={calib_reps}, seed={CALIB_SEED:#x}"),
    })
}

/// CDF of `X - Y` for independent `X ~ Exp(rate_x)`, `Y ~ Exp(rate_y)`.
/// The anti-diagonal increment law of the stationary model at density rho
/// is `rate_x = 1 - rho`, `rate_y = rho`.
pub fn exp_diff_cdf(rate_x: f64, rate_y: f64) -> impl Fn(f64) -> f64 {
    move |x: f64| {
        if x >= 0.0 {
            1.0 - (rate_y / (rate_x + rate_y)) * (-rate_x * x).exp()
        } else {
            (rate_x / (rate_x + rate_y)) * (rate_y * x).exp()
        }
    }
}

/// Mean of the stationary increment law at density rho.
pub fn exp_diff_mean(rho: f64) -> f64 {
    1.0 / (1.0 - rho) - 1.0 / rho
}

/// Empirical mean and standard error.
pub fn mean_and_se(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Empirical variance.
pub fn variance(samples: &[f64]) -> f64 {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
}

/// Empirical variance of an increment-path ensemble on a position grid,
/// with the least-squares slope of Var against |x|.
#[derive(Debug, Clone, Serialize)]
pub struct VarianceProfile {
    pub xs: Vec<f64>,
    pub variances: Vec<f64>,
    pub means: Vec<f64>,
    pub slope_vs_abs_x: f64,
    pub ensemble: usize,
}

pub fn variance_profile(paths: &[IncrementPath], xs: &[f64]) -> Result<VarianceProfile> {
    if paths.len() < 1000 {
        return Err(Error::TooFewSamples {
            need: 1000,
            got: paths.len(),
        });
    }
    let mut variances = Vec::with_capacity(xs.len());
    let mut means = Vec::with_capacity(xs.len());
    for &x in xs {
        let vals: Vec<f64> = paths.iter().map(|p| p.value_at(x)).collect();
        variances.push(variance(&vals));
        means.push(vals.iter().sum::<f64>() / vals.len() as f64);
    }
    // Least squares through the origin: Var(x) ~ slope * |x|.
    let sxy: f64 = xs
        .iter()
        .zip(&variances)
        .map(|(&x, &v)| x.abs() * v)
        .sum();
    let sxx: f64 = xs.iter().map(|&x| x.abs() * x.abs()).sum();
    Ok(VarianceProfile {
        xs: xs.to_vec(),
        variances,
        means,
        slope_vs_abs_x: sxy / sxx,
        ensemble: paths.len(),
    })
}

/// One point on an empirical tail curve.
#[derive(Debug, Clone, Serialize)]
pub struct TailPoint {
    pub abscissa: f64,
    pub probability: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub exceedances: u64,
    pub samples: u64,
}

/// Empirical exceedance probabilities with Wilson intervals.
#[derive(Debug, Clone, Serialize)]
pub struct TailCurve {
    pub points: Vec<TailPoint>,
}

impl TailCurve {
    pub fn from_exceedances(abscissae: &[f64], counts: &[(u64, u64)]) -> Self {
        let points = abscissae
            .iter()
            .zip(counts)
            .map(|(&x, &(succ, n))| {
                let (lo, hi) = wilson_interval(succ, n);
                TailPoint {
                    abscissa: x,
                    probability: if n > 0 { succ as f64 / n as f64 } else { 0.0 },
                    wilson_low: lo,
                    wilson_high: hi,
                    exceedances: succ,
                    samples: n,
                }
            })
            .collect();
        Self { points }
    }

    /// Pool-adjacent-violators fit of a nonincreasing curve; returns true
    /// when every deviation from the fit is within the Wilson half-width
    /// (i.e. the curve is nonincreasing up to Monte Carlo noise).
    pub fn nonincreasing_within_noise(&self) -> bool {
        let p: Vec<f64> = self.points.iter().map(|q| q.probability).collect();
        let fit = pava_nonincreasing(&p);
        self.points.iter().zip(&fit).all(|(q, &f)| {
            let half = 0.5 * (q.wilson_high - q.wilson_low);
            (q.probability - f).abs() <= half.max(1e-12)
        })
    }
}

/// Pool-adjacent-violators for a nonincreasing target (unit weights).
pub fn pava_nonincreasing(y: &[f64]) -> Vec<f64> {
    // Fit nondecreasing to the negated sequence.
    let mut blocks: Vec<(f64, usize)> = Vec::new(); // (mean, count) of -y
    for &v in y {
        blocks.push((-v, 1));
        while blocks.len() >= 2 {
            let (m2, c2) = blocks[blocks.len() - 1];
            let (m1, c1) = blocks[blocks.len() - 2];
            if m1 > m2 {
                blocks.pop();
                blocks.pop();
                let c = c1 + c2;
                blocks.push(((m1 * c1 as f64 + m2 * c2 as f64) / c as f64, c));
            } else {
                break;
            }
        }
    }
    let mut out = Vec::with_capacity(y.len());
    for (m, c) in blocks {
        for _ in 0..c {
            out.push(-m);
        }
    }
    out
}

/// The constant-free envelope of the convergence bound:
/// `2 c2 delta^{3 alpha} + 22 sqrt(a) delta^{1/2 - alpha} / eta`.
pub fn convergence_envelope(a: f64, delta_t: f64, alpha: f64, eta: f64, c2: f64) -> f64 {
    2.0 * c2 * delta_t.powf(3.0 * alpha) + 22.0 * a.sqrt() * delta_t.powf(0.5 - alpha) / eta
}

/// Exceedance tail of |Z| (or |K|) against `r n^{2/3}` over an r-grid.
pub fn exit_tail_curve(abs_exits: &[f64], n: u64, r_grid: &[f64]) -> TailCurve {
    let n23 = crate::numeric::consts::n_2_3(n);
    let total = abs_exits.len() as u64;
    let counts: Vec<(u64, u64)> = r_grid
        .iter()
        .map(|&r| {
            let thr = r * n23;
            let c = abs_exits.iter().filter(|&&z| z > thr).count() as u64;
            (c, total)
        })
        .collect();
    TailCurve::from_exceedances(r_grid, &counts)
}

/// Least-squares slope of log p against log r over points with p > 0.
pub fn log_log_slope(curve: &TailCurve) -> Option<f64> {
    let pts: Vec<(f64, f64)> = curve
        .points
        .iter()
        .filter(|q| q.probability > 0.0 && q.abscissa > 0.0)
        .map(|q| (q.abscissa.ln(), q.probability.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Some(sxy / sxx)
}
