//! Monte Carlo engine and experiment runner.
//!
//! Sweeps are grids over (scheme point, nu, message). Every grid cell owns a
//! sub-seed derived from the master seed and the cell's lexicographic index,
//! never from execution order, so running with or without concurrency
//! produces identical reports and reruns are byte-for-byte reproducible.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::attack::{coin_toss_attack, coin_toss_escape, escape_probability, identify_probability};
use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::infometrics::{
    mutual_information, noise_floor_decomposition, per_bit_error_rate, product_mutual_information,
    product_noise_floor_weight, ChannelMatrix,
};
use crate::seal::{AmplitudeMatrix, SealParameters};

/// Entries enter z-score comparisons only when both expected counts are at
/// least this large; below that the normal approximation is meaningless.
pub const Z_SCORE_MIN_EXPECTED: f64 = 10.0;

/// Which sealed messages a sweep covers.
#[derive(Debug, Clone, PartialEq)]
pub enum MessageSelection {
    /// Every message; only available up to the channel dimension limit.
    All,
    /// A seeded uniform sample of k distinct messages (clamped to N).
    Sample(u64),
    /// An explicit list.
    Explicit(Vec<u64>),
}

impl Default for MessageSelection {
    fn default() -> Self {
        MessageSelection::Sample(64)
    }
}

/// The scheme axis of a sweep.
#[derive(Debug, Clone)]
pub enum SchemeSpec {
    /// Product-form schemes, one per string length.
    Canonical {
        n_values: Vec<u32>,
        theta: f64,
        alpha: f64,
    },
    /// A dense amplitude matrix loaded from a scheme file.
    DenseFile(PathBuf),
    /// A dense amplitude matrix supplied in memory.
    DenseMatrix(AmplitudeMatrix),
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub scheme: SchemeSpec,
    pub nu_grid: Vec<f64>,
    /// Monte Carlo trials per grid cell; 0 emits analytic-only rows.
    pub trials: u64,
    pub seed: u64,
    pub messages: MessageSelection,
    pub parallel: bool,
    /// Cap on explicit N x N channel matrices for the information columns.
    pub channel_dim_limit: u64,
}

impl ExperimentConfig {
    pub fn new(scheme: SchemeSpec) -> Self {
        Self {
            scheme,
            nu_grid: vec![0.5],
            trials: 0,
            seed: 0,
            messages: MessageSelection::default(),
            parallel: true,
            channel_dim_limit: crate::infometrics::DEFAULT_CHANNEL_DIM_LIMIT,
        }
    }
}

/// One report line: a (scheme, nu, message) cell, or the per-cell aggregate
/// when `message` is `None`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ReportRow {
    pub n: u32,
    pub theta: f64,
    pub alpha: f64,
    pub nu: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<u64>,
    pub identify_p: f64,
    pub bit_error: f64,
    pub mi_bits: f64,
    pub uniform_w: f64,
    pub escape_p: f64,
    pub coin_escape_p: f64,
    pub trials: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_identify: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_stderr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_z: Option<f64>,
}

/// One line of the faultless-decode scaling table.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ScalingRow {
    pub n: u32,
    pub epsilon: f64,
    pub p_max_exact: f64,
    pub p_max_asymptotic: f64,
    pub log_ratio: f64,
}

/// SplitMix64 finalizer: derives an independent sub-seed from a master seed
/// and a stream index, independent of evaluation order.
pub fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Draws an index from `dist` by inverse-CDF: the first index whose running
/// mass exceeds a uniform draw. Deterministic for a fixed rng stream.
pub fn sample_outcome<R: Rng + ?Sized>(dist: &Distribution, rng: &mut R) -> u64 {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let last = dist.len() - 1;
    for (index, &p) in dist.probabilities().iter().enumerate() {
        acc += p;
        if u < acc {
            return index as u64;
        }
    }
    last as u64
}

/// Empirical estimate of one decode-law row.
#[derive(Debug, Clone)]
pub struct RowEstimate {
    /// Outcome frequencies over `trials` samples.
    pub empirical: Distribution,
    /// Per-entry binomial standard errors sqrt(f (1-f) / trials).
    pub stderr: Vec<f64>,
    pub trials: u64,
}

/// Samples the decode law of (amps, i_prime, nu) `trials` times and returns
/// per-outcome frequencies with binomial standard errors.
///
/// Sampling is inverse-CDF over the materialized row; the cumulative table
/// is precomputed once and binary-searched per trial, which maps each
/// uniform draw to exactly the same index as [`sample_outcome`].
pub fn estimate_channel_row(
    amps: &AmplitudeMatrix,
    i_prime: u64,
    nu: f64,
    trials: u64,
    seed: u64,
) -> Result<RowEstimate> {
    if trials == 0 {
        return Err(Error::ParameterOutOfRange {
            name: "trials",
            constraint: "[1, ..)",
            value: 0.0,
        });
    }
    let dist = crate::attack::outcome_distribution(amps, i_prime, nu)?;
    let mut cdf = Vec::with_capacity(dist.len());
    let mut acc = 0.0;
    for &p in dist.probabilities() {
        acc += p;
        cdf.push(acc);
    }
    let last = cdf.len() - 1;
    let mut counts = vec![0u64; dist.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let u: f64 = rng.gen();
        let index = cdf.partition_point(|&c| c <= u).min(last);
        counts[index] += 1;
    }
    let t = trials as f64;
    let freqs: Vec<f64> = counts.iter().map(|&c| c as f64 / t).collect();
    let stderr = freqs.iter().map(|f| (f * (1.0 - f) / t).sqrt()).collect();
    Ok(RowEstimate {
        empirical: Distribution::new(freqs)?,
        stderr,
        trials,
    })
}

/// Largest |freq - expected| / sqrt(expected (1-expected) / trials) over the
/// entries whose expected counts support a normal approximation
/// (see [`Z_SCORE_MIN_EXPECTED`]). Returns 0 when no entry qualifies.
pub fn max_z_score(estimate: &RowEstimate, analytic: &Distribution) -> f64 {
    let t = estimate.trials as f64;
    let mut max_z = 0.0f64;
    for (f, &p) in estimate
        .empirical
        .probabilities()
        .iter()
        .zip(analytic.probabilities())
    {
        if t * p < Z_SCORE_MIN_EXPECTED || t * (1.0 - p) < Z_SCORE_MIN_EXPECTED {
            continue;
        }
        let z = (f - p).abs() / (p * (1.0 - p) / t).sqrt();
        max_z = max_z.max(z);
    }
    max_z
}

/// Acted/pass frequencies of a simulated coin-toss attack run against the
/// projective verifier.
#[derive(Debug, Clone, Copy)]
pub struct CoinTossStats {
    pub trials: u64,
    pub acted_freq: f64,
    pub pass_freq: f64,
}

/// Runs `trials` coin-toss attacks on the sealed message and verifies each
/// post-state projectively against the original sealed state.
pub fn simulate_coin_toss(
    amps: &AmplitudeMatrix,
    i_prime: u64,
    trials: u64,
    seed: u64,
) -> Result<CoinTossStats> {
    let sealed = amps.sealed_state(i_prime)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acted = 0u64;
    let mut passed = 0u64;
    for _ in 0..trials {
        let outcome = coin_toss_attack(amps, i_prime, &mut rng)?;
        if outcome.acted {
            acted += 1;
        }
        let pass_probability = outcome.post_state.overlap_sq(&sealed)?;
        let u: f64 = rng.gen();
        if u < pass_probability {
            passed += 1;
        }
    }
    Ok(CoinTossStats {
        trials,
        acted_freq: acted as f64 / trials as f64,
        pass_freq: passed as f64 / trials as f64,
    })
}

/// Per-n readability and faultless-decode scaling, computed in the log
/// domain. `log_ratio` is ln(exact) / ln(asymptotic).
pub fn scaling_table(theta: f64, alpha: f64, n_values: &[u32]) -> Result<Vec<ScalingRow>> {
    n_values
        .iter()
        .map(|&n| {
            let params = SealParameters::new(n, theta, alpha)?;
            let est = crate::seal::p_max(&params);
            Ok(ScalingRow {
                n,
                epsilon: params.error_rate(),
                p_max_exact: est.exact,
                p_max_asymptotic: est.asymptotic,
                log_ratio: est.exact.ln() / est.asymptotic.ln(),
            })
        })
        .collect()
}

/// Reads a dense scheme file: first line the dimension N, then N lines of N
/// whitespace-separated amplitudes; rows must have unit square norm.
pub fn load_dense_scheme(path: &Path) -> Result<AmplitudeMatrix> {
    let text = fs::read_to_string(path)?;
    let display = path.display().to_string();
    let fail = |message: String| Error::SchemeFormat {
        path: display.clone(),
        message,
    };
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let dim: usize = lines
        .next()
        .ok_or_else(|| fail("empty file".into()))?
        .trim()
        .parse()
        .map_err(|e| fail(format!("bad dimension line: {e}")))?;
    let mut rows = Vec::with_capacity(dim);
    for index in 0..dim {
        let line = lines
            .next()
            .ok_or_else(|| fail(format!("expected {dim} rows, found {index}")))?;
        let row: std::result::Result<Vec<f64>, _> =
            line.split_whitespace().map(str::parse::<f64>).collect();
        let row = row.map_err(|e| fail(format!("row {index}: {e}")))?;
        if row.len() != dim {
            return Err(fail(format!(
                "row {index} has {} entries, expected {dim}",
                row.len()
            )));
        }
        rows.push(row);
    }
    AmplitudeMatrix::from_rows(rows)
}

// A resolved scheme point of the sweep.
struct SchemePoint {
    n: u32,
    theta: f64,
    alpha: f64,
    params: Option<SealParameters>,
    amps: AmplitudeMatrix,
}

/// Runs the sweep described by `config` and returns one row per
/// (scheme point, nu, message), in lexicographic order over those axes,
/// followed by an aggregate row (message = None) for every cell group with
/// more than one message.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    for &nu in &config.nu_grid {
        if !(0.0..=1.0).contains(&nu) {
            return Err(Error::ParameterOutOfRange {
                name: "nu",
                constraint: "[0, 1]",
                value: nu,
            });
        }
    }
    if config.nu_grid.is_empty() {
        return Err(Error::ParameterOutOfRange {
            name: "nu grid",
            constraint: "[1, ..) values",
            value: 0.0,
        });
    }

    let points = resolve_scheme_points(config)?;
    let messages_per_point: Vec<Vec<u64>> = points
        .iter()
        .enumerate()
        .map(|(pi, point)| resolve_messages(config, point, pi as u64))
        .collect::<Result<_>>()?;

    // Monte Carlo needs materializable rows; fail before spawning work.
    if config.trials > 0 {
        for point in &points {
            point.amps.materializable_dim()?;
        }
    }

    // Flatten (point, nu) cells; message loops run inside a cell so the
    // channel-level metrics are computed once per cell.
    let cells: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|pi| (0..config.nu_grid.len()).map(move |ni| (pi, ni)))
        .collect();
    let message_offsets: Vec<u64> = {
        // Lexicographic flat index of each cell's first (point, nu, message).
        let mut offsets = Vec::with_capacity(cells.len());
        let mut acc = 0u64;
        for &(pi, _) in &cells {
            offsets.push(acc);
            acc += messages_per_point[pi].len() as u64;
        }
        offsets
    };

    let run_cell = |(cell_index, &(pi, ni)): (usize, &(usize, usize))| -> Result<Vec<ReportRow>> {
        let point = &points[pi];
        let nu = config.nu_grid[ni];
        let messages = &messages_per_point[pi];
        let metrics = channel_metrics(point, nu, config.channel_dim_limit)?;
        let mut rows = Vec::with_capacity(messages.len() + 1);
        for (mi, &message) in messages.iter().enumerate() {
            let sub_seed = mix_seed(config.seed, message_offsets[cell_index] + mi as u64);
            rows.push(message_row(point, nu, message, metrics, config.trials, sub_seed)?);
        }
        if messages.len() > 1 {
            rows.push(aggregate_row(&rows));
        }
        Ok(rows)
    };

    let nested: Result<Vec<Vec<ReportRow>>> = if config.parallel {
        cells.par_iter().enumerate().map(run_cell).collect()
    } else {
        cells.iter().enumerate().map(run_cell).collect()
    };
    Ok(nested?.into_iter().flatten().collect())
}

fn resolve_scheme_points(config: &ExperimentConfig) -> Result<Vec<SchemePoint>> {
    match &config.scheme {
        SchemeSpec::Canonical {
            n_values,
            theta,
            alpha,
        } => {
            if n_values.is_empty() {
                return Err(Error::ParameterOutOfRange {
                    name: "n list",
                    constraint: "[1, ..) values",
                    value: 0.0,
                });
            }
            n_values
                .iter()
                .map(|&n| {
                    let params = SealParameters::new(n, *theta, *alpha)?;
                    let amps = AmplitudeMatrix::product_form(&params)?;
                    Ok(SchemePoint {
                        n,
                        theta: *theta,
                        alpha: *alpha,
                        params: Some(params),
                        amps,
                    })
                })
                .collect()
        }
        SchemeSpec::DenseFile(path) => {
            let amps = load_dense_scheme(path)?;
            Ok(vec![dense_point(amps)])
        }
        SchemeSpec::DenseMatrix(amps) => Ok(vec![dense_point(amps.clone())]),
    }
}

fn dense_point(amps: AmplitudeMatrix) -> SchemePoint {
    SchemePoint {
        n: amps.bits(),
        theta: f64::NAN,
        alpha: f64::NAN,
        params: None,
        amps,
    }
}

fn resolve_messages(
    config: &ExperimentConfig,
    point: &SchemePoint,
    point_index: u64,
) -> Result<Vec<u64>> {
    let dim = point.amps.dim();
    match &config.messages {
        MessageSelection::All => {
            if dim > config.channel_dim_limit {
                return Err(Error::DimensionLimit {
                    dim,
                    limit: config.channel_dim_limit,
                });
            }
            Ok((0..dim).collect())
        }
        MessageSelection::Sample(k) => {
            let k = (*k).min(dim);
            if k == 0 {
                return Err(Error::ParameterOutOfRange {
                    name: "messages",
                    constraint: "[1, ..)",
                    value: 0.0,
                });
            }
            if k == dim {
                return Ok((0..dim).collect());
            }
            // Seeded by (master seed, point index) only, so the same
            // messages are swept at every nu.
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(config.seed, !point_index));
            let mut chosen = BTreeSet::new();
            while (chosen.len() as u64) < k {
                chosen.insert(rng.gen_range(0..dim));
            }
            Ok(chosen.into_iter().collect())
        }
        MessageSelection::Explicit(list) => {
            for &m in list {
                if m >= dim {
                    return Err(Error::IndexOutOfRange { index: m, dim });
                }
            }
            if list.is_empty() {
                return Err(Error::ParameterOutOfRange {
                    name: "messages",
                    constraint: "[1, ..)",
                    value: 0.0,
                });
            }
            Ok(list.clone())
        }
    }
}

fn channel_metrics(point: &SchemePoint, nu: f64, limit: u64) -> Result<(f64, f64)> {
    if point.amps.dim() <= limit {
        let channel = ChannelMatrix::from_amplitudes_with_limit(&point.amps, nu, limit)?;
        let prior = Distribution::uniform(channel.dim());
        let mi = mutual_information(&channel, &prior)?;
        let (w, _) = noise_floor_decomposition(&channel);
        Ok((mi, w))
    } else if let Some(params) = &point.params {
        // Past the explicit-channel limit the product form still has exact
        // closed forms.
        Ok((
            product_mutual_information(params, nu)?,
            product_noise_floor_weight(params, nu)?,
        ))
    } else {
        Err(Error::DimensionLimit {
            dim: point.amps.dim(),
            limit,
        })
    }
}

fn message_row(
    point: &SchemePoint,
    nu: f64,
    message: u64,
    (mi_bits, uniform_w): (f64, f64),
    trials: u64,
    sub_seed: u64,
) -> Result<ReportRow> {
    let amps = &point.amps;
    let mut row = ReportRow {
        n: point.n,
        theta: point.theta,
        alpha: point.alpha,
        nu,
        message: Some(message),
        identify_p: identify_probability(amps, message, nu)?,
        bit_error: per_bit_error_rate(amps, message, nu)?,
        mi_bits,
        uniform_w,
        escape_p: escape_probability(amps, message, nu)?,
        coin_escape_p: coin_toss_escape(amps, message)?,
        trials,
        mc_identify: None,
        mc_stderr: None,
        max_z: None,
    };
    if trials > 0 {
        let estimate = estimate_channel_row(amps, message, nu, trials, sub_seed)?;
        let analytic = crate::attack::outcome_distribution(amps, message, nu)?;
        row.mc_identify = Some(estimate.empirical.get(message as usize));
        row.mc_stderr = Some(estimate.stderr[message as usize]);
        row.max_z = Some(max_z_score(&estimate, &analytic));
    }
    Ok(row)
}

fn aggregate_row(rows: &[ReportRow]) -> ReportRow {
    let m = rows.len() as f64;
    let mean = |f: fn(&ReportRow) -> f64| rows.iter().map(f).sum::<f64>() / m;
    let mut row = ReportRow {
        n: rows[0].n,
        theta: rows[0].theta,
        alpha: rows[0].alpha,
        nu: rows[0].nu,
        message: None,
        identify_p: mean(|r| r.identify_p),
        bit_error: mean(|r| r.bit_error),
        mi_bits: rows[0].mi_bits,
        uniform_w: rows[0].uniform_w,
        escape_p: mean(|r| r.escape_p),
        coin_escape_p: mean(|r| r.coin_escape_p),
        trials: rows[0].trials,
        mc_identify: None,
        mc_stderr: None,
        max_z: None,
    };
    if rows[0].trials > 0 {
        row.mc_identify = Some(rows.iter().filter_map(|r| r.mc_identify).sum::<f64>() / m);
        let var: f64 = rows
            .iter()
            .filter_map(|r| r.mc_stderr)
            .map(|s| s * s)
            .sum();
        row.mc_stderr = Some(var.sqrt() / m);
        row.max_z = rows
            .iter()
            .filter_map(|r| r.max_z)
            .fold(None, |acc, z| Some(acc.map_or(z, |a: f64| a.max(z))));
    }
    row
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_8;

    fn canonical(n: u32) -> AmplitudeMatrix {
        let params = SealParameters::new(n, FRAC_PI_8, 0.25).unwrap();
        AmplitudeMatrix::product_form(&params).unwrap()
    }

    fn sweep_config(n_values: Vec<u32>) -> ExperimentConfig {
        ExperimentConfig {
            scheme: SchemeSpec::Canonical {
                n_values,
                theta: FRAC_PI_8,
                alpha: 0.25,
            },
            nu_grid: vec![0.0, 0.5, 1.0],
            trials: 0,
            seed: 42,
            messages: MessageSelection::Sample(4),
            parallel: true,
            channel_dim_limit: crate::infometrics::DEFAULT_CHANNEL_DIM_LIMIT,
        }
    }

    #[test]
    fn sample_outcome_point_mass() {
        let dist = Distribution::point_mass(8, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..32 {
            assert_eq!(sample_outcome(&dist, &mut rng), 5);
        }
    }

    #[test]
    fn sample_outcome_uniform_frequencies() {
        let dist = Distribution::uniform(4);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let trials = 100_000;
        let mut counts = [0u64; 4];
        for _ in 0..trials {
            counts[sample_outcome(&dist, &mut rng) as usize] += 1;
        }
        let stderr = (0.25 * 0.75 / trials as f64).sqrt();
        for c in counts {
            let freq = c as f64 / trials as f64;
            assert!((freq - 0.25).abs() < 3.0 * stderr, "freq {freq}");
        }
    }

    #[test]
    fn sample_outcome_matches_half_strength_law() {
        let amps = canonical(4);
        let dist = crate::attack::outcome_distribution(&amps, 3, 0.5).unwrap();
        let analytic = dist.get(3);
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let trials = 100_000;
        let mut hits = 0u64;
        for _ in 0..trials {
            if sample_outcome(&dist, &mut rng) == 3 {
                hits += 1;
            }
        }
        let freq = hits as f64 / trials as f64;
        let stderr = (analytic * (1.0 - analytic) / trials as f64).sqrt();
        assert!((freq - analytic).abs() < 3.0 * stderr, "freq {freq} vs {analytic}");
    }

    #[test]
    fn estimate_matches_walk_sampling() {
        // The binary-searched CDF must map draws exactly like the linear walk.
        let amps = canonical(3);
        let dist = crate::attack::outcome_distribution(&amps, 2, 0.4).unwrap();
        let estimate = estimate_channel_row(&amps, 2, 0.4, 2000, 77).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut counts = vec![0u64; dist.len()];
        for _ in 0..2000 {
            counts[sample_outcome(&dist, &mut rng) as usize] += 1;
        }
        let walked: Vec<f64> = counts.iter().map(|&c| c as f64 / 2000.0).collect();
        assert_eq!(estimate.empirical.probabilities(), walked.as_slice());
    }

    #[test]
    fn estimate_channel_row_blind_and_eigenstate() {
        let amps = canonical(4);
        let estimate = estimate_channel_row(&amps, 0, 0.0, 100_000, 5).unwrap();
        let analytic = crate::attack::outcome_distribution(&amps, 0, 0.0).unwrap();
        assert!(max_z_score(&estimate, &analytic) < 4.0);

        let eigen = AmplitudeMatrix::identity(8).unwrap();
        let pointy = estimate_channel_row(&eigen, 6, 1.0, 1000, 5).unwrap();
        assert_eq!(pointy.empirical.get(6), 1.0);
        assert_eq!(pointy.stderr[6], 0.0);
    }

    #[test]
    fn estimate_is_reproducible_for_fixed_seed() {
        let amps = canonical(5);
        let a = estimate_channel_row(&amps, 9, 0.5, 5000, 123).unwrap();
        let b = estimate_channel_row(&amps, 9, 0.5, 5000, 123).unwrap();
        assert_eq!(a.empirical.probabilities(), b.empirical.probabilities());
        let c = estimate_channel_row(&amps, 9, 0.5, 5000, 124).unwrap();
        assert_ne!(a.empirical.probabilities(), c.empirical.probabilities());
    }

    #[test]
    fn coin_toss_simulation_on_eigenstate_always_passes() {
        let eigen = AmplitudeMatrix::identity(16).unwrap();
        let stats = simulate_coin_toss(&eigen, 3, 10_000, 8).unwrap();
        assert_eq!(stats.pass_freq, 1.0);
        let stderr = (0.25f64 / 10_000.0).sqrt();
        assert!((stats.acted_freq - 0.5).abs() < 3.0 * stderr);
    }

    #[test]
    fn scaling_table_reproduces_formulas() {
        let rows = scaling_table(FRAC_PI_8, 0.25, &[4, 8, 16, 32, 64]).unwrap();
        assert_eq!(rows.len(), 5);
        for pair in rows.windows(2) {
            assert!(pair[1].epsilon < pair[0].epsilon);
            assert!(pair[1].p_max_exact < pair[0].p_max_exact);
        }
        let last = &rows[4];
        assert!((0.9..=1.1).contains(&last.log_ratio));
        let params = SealParameters::new(64, FRAC_PI_8, 0.25).unwrap();
        assert_eq!(last.epsilon, params.error_rate());
        assert_eq!(last.p_max_exact, crate::seal::p_max(&params).exact);
    }

    #[test]
    fn scaling_table_rejects_bad_angles() {
        assert!(scaling_table(0.0, 0.25, &[4]).is_err());
        assert!(scaling_table(FRAC_PI_8, 0.7, &[4]).is_err());
    }

    #[test]
    fn analytic_sweep_has_no_mc_fields() {
        let rows = run_experiment(&sweep_config(vec![3])).unwrap();
        assert!(!rows.is_empty());
        for row in &rows {
            assert_eq!(row.trials, 0);
            assert!(row.mc_identify.is_none());
            assert!(row.mc_stderr.is_none());
            assert!(row.max_z.is_none());
            assert!(row.identify_p.is_finite());
            assert!(row.mi_bits.is_finite());
        }
    }

    #[test]
    fn sweep_identify_column_tracks_faultless_probability() {
        let mut config = sweep_config(vec![4, 8, 16, 32]);
        config.nu_grid = vec![1.0];
        config.messages = MessageSelection::Explicit(vec![1]);
        let rows = run_experiment(&config).unwrap();
        assert_eq!(rows.len(), 4);
        let mut previous = f64::INFINITY;
        for row in &rows {
            let params = SealParameters::new(row.n, FRAC_PI_8, 0.25).unwrap();
            let expect = crate::seal::p_max(&params).exact;
            assert!((row.identify_p - expect).abs() < 1e-12);
            assert!(row.identify_p < previous);
            previous = row.identify_p;
        }
    }

    #[test]
    fn sweep_is_deterministic_and_order_independent() {
        let mut config = sweep_config(vec![2, 4]);
        config.trials = 2000;
        let serial = {
            let mut c = config.clone();
            c.parallel = false;
            run_experiment(&c).unwrap()
        };
        let parallel = run_experiment(&config).unwrap();
        assert_eq!(serial, parallel);
        let again = run_experiment(&config).unwrap();
        assert_eq!(parallel, again);
    }

    #[test]
    fn analytic_columns_do_not_depend_on_seed() {
        let mut a = sweep_config(vec![3]);
        a.trials = 500;
        let mut b = a.clone();
        b.seed = 1234;
        let rows_a = run_experiment(&a).unwrap();
        let rows_b = run_experiment(&b).unwrap();
        assert_eq!(rows_a.len(), rows_b.len());
        let mut same_mc = true;
        for (ra, rb) in rows_a.iter().zip(&rows_b) {
            // different seeds sweep different sampled messages, so compare
            // only the channel-level analytic columns
            assert_eq!(ra.mi_bits, rb.mi_bits);
            assert_eq!(ra.uniform_w, rb.uniform_w);
            same_mc &= ra.mc_identify == rb.mc_identify;
        }
        assert!(!same_mc);
    }

    #[test]
    fn aggregate_rows_cover_multi_message_cells() {
        let mut config = sweep_config(vec![3]);
        config.messages = MessageSelection::Explicit(vec![0, 5]);
        config.nu_grid = vec![0.5];
        let rows = run_experiment(&config).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].message, Some(0));
        assert_eq!(rows[1].message, Some(5));
        assert_eq!(rows[2].message, None);
        let mean = (rows[0].identify_p + rows[1].identify_p) / 2.0;
        assert!((rows[2].identify_p - mean).abs() < 1e-15);
    }

    #[test]
    fn sweep_rejects_invalid_nu_and_messages() {
        let mut config = sweep_config(vec![3]);
        config.nu_grid = vec![1.5];
        assert!(run_experiment(&config).is_err());

        let mut config = sweep_config(vec![3]);
        config.messages = MessageSelection::Explicit(vec![8]);
        assert!(run_experiment(&config).is_err());
    }

    #[test]
    fn mc_sweep_rejects_unmaterializable_schemes() {
        let mut config = sweep_config(vec![32]);
        config.trials = 10;
        assert!(run_experiment(&config).is_err());
        config.trials = 0;
        assert!(run_experiment(&config).is_ok());
    }

    #[test]
    fn dense_scheme_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scheme.txt");
        std::fs::write(&path, "2\n1.0 0.0\n0.6 0.8\n").unwrap();
        let amps = load_dense_scheme(&path).unwrap();
        assert_eq!(amps.dim(), 2);
        assert!((amps.entry(1, 1) - 0.8).abs() < 1e-15);

        std::fs::write(&path, "2\n1.0 0.5\n0.6 0.8\n").unwrap();
        assert!(load_dense_scheme(&path).is_err());
        std::fs::write(&path, "2\n1.0 0.0\n").unwrap();
        assert!(load_dense_scheme(&path).is_err());
        std::fs::write(&path, "not a number\n").unwrap();
        assert!(load_dense_scheme(&path).is_err());
        assert!(load_dense_scheme(&dir.path().join("missing.txt")).is_err());
    }

    #[test]
    fn mix_seed_is_stable_and_spread() {
        // Frozen values pin the sub-seed derivation across releases.
        assert_eq!(mix_seed(0, 0), 16294208416658607535);
        assert_ne!(mix_seed(42, 0), mix_seed(42, 1));
        assert_ne!(mix_seed(42, 0), mix_seed(43, 0));
    }
}
