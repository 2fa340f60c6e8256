//! Executable verification suite: every acceptance-grade claim about the
//! seal model, the attack family and the harness as a named check with a
//! pinned tolerance.
//!
//! The `verify` CLI subcommand prints one line per check; the acceptance
//! integration tests assert them individually. All randomness is seeded
//! with frozen constants so the suite is deterministic.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::attack::{
    apply_kraus, escape_probability, outcome_distribution, DiagonalKraus, MeasurementCoefficients,
};
use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::harness::{
    estimate_channel_row, max_z_score, mix_seed, run_experiment, scaling_table,
    simulate_coin_toss, ExperimentConfig, MessageSelection, SchemeSpec,
};
use crate::infometrics::{
    binary_entropy, mutual_information, noise_floor_decomposition, ChannelMatrix,
};
use crate::report::{render_rows, ReportFormat};
use crate::seal::{p_max, AmplitudeMatrix, SealParameters};

/// Result of one named verification check.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn run_check(
    name: &'static str,
    body: impl FnOnce() -> Result<(bool, String)>,
) -> Check {
    match body() {
        Ok((passed, detail)) => Check {
            name,
            passed,
            detail,
        },
        Err(e) => Check {
            name,
            passed: false,
            detail: format!("errored: {e}"),
        },
    }
}

fn canonical_params(n: u32) -> Result<SealParameters> {
    SealParameters::new(n, std::f64::consts::FRAC_PI_8, 0.25)
}

fn canonical(n: u32) -> Result<AmplitudeMatrix> {
    AmplitudeMatrix::product_form(&canonical_params(n)?)
}

fn random_unit_rows(dim: usize, rng: &mut ChaCha8Rng, zero_first: bool) -> Vec<Vec<f64>> {
    (0..dim)
        .map(|row| {
            let mut raw: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            if zero_first {
                raw[(row + 1) % dim] = 0.0;
            }
            let norm = raw.iter().map(|a| a * a).sum::<f64>().sqrt();
            raw.into_iter().map(|a| a / norm).collect()
        })
        .collect()
}

fn random_dense_scheme(dim: usize, rng: &mut ChaCha8Rng) -> Result<AmplitudeMatrix> {
    AmplitudeMatrix::from_rows(random_unit_rows(dim, rng, false))
}

fn nu_grid() -> Vec<f64> {
    (0..=10).map(|k| f64::from(k) / 10.0).collect()
}

/// Branch norms of the materialized measurement match the mixture decode
/// law within 1e-12 on 100 random dense schemes.
pub fn check_kraus_output_law() -> Check {
    run_check("kraus-output-law", || {
        let mut dims: Vec<u64> = (0..95u64).map(|k| 2 + (k % 31)).collect();
        dims.extend([64, 96, 128, 192, 256]);
        let grid = nu_grid();
        let worst = dims
            .par_iter()
            .enumerate()
            .map(|(index, &dim)| -> Result<f64> {
                let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(0xC0FF_EE01, index as u64));
                let amps = random_dense_scheme(dim as usize, &mut rng)?;
                let mut worst = 0.0f64;
                for i_prime in 0..dim {
                    let state = amps.sealed_state(i_prime)?;
                    let row = amps.row(i_prime)?;
                    for &nu in &grid {
                        let coeffs = MeasurementCoefficients::new(nu, dim)?;
                        let floor = (1.0 - nu) / dim as f64;
                        for i in 0..dim {
                            let kraus = DiagonalKraus::new(i, coeffs)?;
                            let p = match apply_kraus(&state, &kraus) {
                                Ok((_, p)) => p,
                                Err(Error::DegenerateBranch { probability }) => probability,
                                Err(e) => return Err(e),
                            };
                            let lambda = row[i as usize];
                            worst = worst.max((p - (floor + nu * lambda * lambda)).abs());
                        }
                    }
                }
                Ok(worst)
            })
            .try_reduce(|| 0.0f64, |a, b| Ok(a.max(b)))?;
        Ok((
            worst <= 1e-12,
            format!("100 schemes, worst |deviation| = {worst:.2e} (tol 1e-12)"),
        ))
    })
}

/// Completeness defect of the measurement family stays within 1e-12 over
/// the full (nu, N) grid up to N = 4096.
pub fn check_measurement_completeness() -> Check {
    run_check("measurement-completeness", || {
        let mut worst = 0.0f64;
        for &nu in &nu_grid() {
            let mut dim = 2u64;
            while dim <= 4096 {
                worst = worst.max(MeasurementCoefficients::new(nu, dim)?.completeness_defect());
                dim *= 2;
            }
        }
        Ok((
            worst <= 1e-12,
            format!("worst defect = {worst:.2e} (tol 1e-12)"),
        ))
    })
}

/// At half strength every decode probability sits on or above the 1/(2N)
/// floor, and the uniform component of the channel carries weight 1/2.
pub fn check_noise_floor_half_strength() -> Check {
    run_check("noise-floor-half-strength", || {
        let mut floor_margin = f64::INFINITY;
        let mut weight_error = 0.0f64;
        let mut residual_error = 0.0f64;

        let mut floor_schemes: Vec<AmplitudeMatrix> = Vec::new();
        let mut weight_schemes: Vec<AmplitudeMatrix> = Vec::new();
        for dim in [2u64, 8, 64, 256] {
            let eigen = AmplitudeMatrix::identity(dim)?;
            floor_schemes.push(eigen.clone());
            weight_schemes.push(eigen);
        }
        for (index, dim) in [8usize, 32, 128].into_iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(0xF1007, index as u64));
            let zeroed = AmplitudeMatrix::from_rows(random_unit_rows(dim, &mut rng, true))?;
            floor_schemes.push(zeroed.clone());
            weight_schemes.push(zeroed);
        }
        for n in 2..=10u32 {
            floor_schemes.push(canonical(n)?);
        }
        // Product schemes keep a strictly positive minimum amplitude, so the
        // uniform weight exceeds (1 - nu) by nu * (2 epsilon)^n; that excess
        // drops below 1e-10 from n = 10 on for these angles.
        for n in [10u32, 11] {
            weight_schemes.push(canonical(n)?);
        }

        for amps in &floor_schemes {
            let channel = ChannelMatrix::from_amplitudes(amps, 0.5)?;
            let floor = 0.5 / amps.dim() as f64;
            floor_margin = floor_margin.min(channel.min_entry() - floor);
        }
        for amps in &weight_schemes {
            let channel = ChannelMatrix::from_amplitudes(amps, 0.5)?;
            let (w, residual) = noise_floor_decomposition(&channel);
            weight_error = weight_error.max((w - 0.5).abs());
            let honest = ChannelMatrix::from_amplitudes(amps, 1.0)?;
            for i in 0..channel.dim() {
                for j in 0..channel.dim() {
                    residual_error =
                        residual_error.max((residual.entry(i, j) - honest.entry(i, j)).abs());
                }
            }
        }

        let passed =
            floor_margin >= -1e-12 && weight_error <= 1e-10 && residual_error <= 1e-10;
        Ok((
            passed,
            format!(
                "floor margin {floor_margin:.2e} (tol -1e-12), |weight - 1/2| = {weight_error:.2e} (tol 1e-10), residual vs honest {residual_error:.2e}"
            ),
        ))
    })
}

/// Mutual information of the attack never exceeds the honest fraction nu of
/// the honest information: I(nu) <= nu * I(1) + 1e-9.
pub fn check_information_convexity() -> Check {
    run_check("information-convexity", || {
        let mut schemes: Vec<AmplitudeMatrix> = Vec::new();
        for n in 2..=10u32 {
            schemes.push(canonical(n)?);
        }
        let mut dense_dims: Vec<usize> = Vec::new();
        for _ in 0..5 {
            dense_dims.extend([2usize, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64]);
        }
        dense_dims.truncate(46);
        dense_dims.extend([96, 128, 192, 256]);
        for (index, dim) in dense_dims.into_iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(0xC04EA, index as u64));
            schemes.push(random_dense_scheme(dim, &mut rng)?);
        }
        let grid = nu_grid();
        let worst = schemes
            .par_iter()
            .map(|amps| -> Result<f64> {
                let prior = Distribution::uniform(amps.dim() as usize);
                let honest = ChannelMatrix::from_amplitudes(amps, 1.0)?;
                let honest_info = mutual_information(&honest, &prior)?;
                let mut worst = f64::NEG_INFINITY;
                for &nu in &grid {
                    let channel = ChannelMatrix::from_amplitudes(amps, nu)?;
                    let info = mutual_information(&channel, &prior)?;
                    worst = worst.max(info - nu * honest_info);
                }
                Ok(worst)
            })
            .try_reduce(|| f64::NEG_INFINITY, |a, b| Ok(a.max(b)))?;
        Ok((
            worst <= 1e-9,
            format!("59 schemes, worst I(nu) - nu*I(1) = {worst:.2e} (tol 1e-9)"),
        ))
    })
}

/// Honest readout of the product scheme carries exactly n (1 - H2(epsilon))
/// bits: the exact N x N computation factorizes into n binary channels.
pub fn check_honest_information_factorization() -> Check {
    run_check("honest-information-factorization", || {
        let worst = (2..=10u32)
            .into_par_iter()
            .map(|n| -> Result<f64> {
                let params = canonical_params(n)?;
                let amps = AmplitudeMatrix::product_form(&params)?;
                let channel = ChannelMatrix::from_amplitudes(&amps, 1.0)?;
                let prior = Distribution::uniform(channel.dim());
                let exact = mutual_information(&channel, &prior)?;
                let factored = f64::from(n) * (1.0 - binary_entropy(params.error_rate()));
                Ok((exact - factored).abs())
            })
            .try_reduce(|| 0.0f64, |a, b| Ok(a.max(b)))?;
        Ok((
            worst <= 1e-9,
            format!("n = 2..=10, worst |deviation| = {worst:.2e} (tol 1e-9)"),
        ))
    })
}

/// Readability tends to 1 while the faultless-decode probability shrinks:
/// the scaling table is monotone and the two log forms agree at n = 64.
pub fn check_pmax_scaling() -> Check {
    run_check("pmax-scaling", || {
        let rows = scaling_table(std::f64::consts::FRAC_PI_8, 0.25, &[4, 8, 16, 32, 64])?;
        let mut monotone = true;
        for pair in rows.windows(2) {
            monotone &= pair[1].p_max_exact < pair[0].p_max_exact;
            monotone &= pair[1].epsilon < pair[0].epsilon;
        }
        let halved = rows[4].p_max_exact < rows[0].p_max_exact / 2.0;
        let ratio = rows[4].log_ratio;
        let ratio_ok = (0.9..=1.1).contains(&ratio);
        Ok((
            monotone && halved && ratio_ok,
            format!(
                "p_max(4) = {:.4}, p_max(64) = {:.4}, log ratio at 64 = {ratio:.4}",
                rows[0].p_max_exact, rows[4].p_max_exact
            ),
        ))
    })
}

/// Coin-toss Monte Carlo: the acting branch fires half the time, the
/// verifier passes at the predicted rate, and eigenstate seals always pass.
pub fn check_coin_toss_statistics() -> Check {
    run_check("coin-toss-statistics", || {
        let amps = canonical(6)?;
        let trials = 100_000u64;
        let stats = simulate_coin_toss(&amps, 37, trials, 0x5EA1_0001)?;

        let sigma_act = (0.25 / trials as f64).sqrt();
        let act_ok = (stats.acted_freq - 0.5).abs() < 3.0 * sigma_act;

        let expected_pass = 0.5 + escape_probability(&amps, 37, 1.0)? / 2.0;
        let sigma_pass = (expected_pass * (1.0 - expected_pass) / trials as f64).sqrt();
        let pass_ok = (stats.pass_freq - expected_pass).abs() < 3.0 * sigma_pass;

        let eigen = AmplitudeMatrix::identity(16)?;
        let eigen_stats = simulate_coin_toss(&eigen, 3, 20_000, 0x5EA1_0002)?;
        let eigen_ok = eigen_stats.pass_freq == 1.0;

        Ok((
            act_ok && pass_ok && eigen_ok,
            format!(
                "acted {:.4} (want 0.5 +- {:.4}), pass {:.4} (want {expected_pass:.4} +- {:.4}), eigenstate pass {}",
                stats.acted_freq,
                3.0 * sigma_act,
                stats.pass_freq,
                3.0 * sigma_pass,
                eigen_stats.pass_freq
            ),
        ))
    })
}

/// The half-strength attack on product schemes escapes the projective
/// verifier at least half of the time.
pub fn check_escape_at_least_half() -> Check {
    run_check("escape-at-least-half", || {
        let mut worst = f64::INFINITY;
        for n in 2..=10u32 {
            let amps = canonical(n)?;
            for message in [0u64, 1, amps.dim() - 1] {
                worst = worst.min(escape_probability(&amps, message, 0.5)?);
            }
        }
        Ok((
            worst >= 0.5 - 1e-10,
            format!("n = 2..=10, smallest escape probability = {worst:.6} (floor 0.5)"),
        ))
    })
}

/// Empirical decode-law rows agree with the analytic law: at 10^5 trials the
/// gated per-entry z-scores stay below 4 on at least 99% of sweep points.
pub fn check_channel_mc_agreement() -> Check {
    run_check("channel-mc-agreement", || {
        let mut points = Vec::new();
        for n in 2..=8u32 {
            let dim = 1u64 << n;
            let mask = dim - 1;
            for &nu in &nu_grid() {
                for message in [0u64, 0x5555_5555_5555_5555 & mask, mask] {
                    points.push((n, nu, message));
                }
            }
        }
        let trials = 100_000u64;
        let passes = points
            .par_iter()
            .enumerate()
            .map(|(index, &(n, nu, message))| -> Result<bool> {
                let amps = canonical(n)?;
                let seed = mix_seed(0x9A17_2026, index as u64);
                let estimate = estimate_channel_row(&amps, message, nu, trials, seed)?;
                let analytic = outcome_distribution(&amps, message, nu)?;
                Ok(max_z_score(&estimate, &analytic) < 4.0)
            })
            .collect::<Result<Vec<bool>>>()?;
        let passed = passes.iter().filter(|&&ok| ok).count();
        let rate = passed as f64 / passes.len() as f64;
        Ok((
            rate >= 0.99,
            format!(
                "{passed}/{} points with max |z| < 4 ({:.1}%, need 99%)",
                passes.len(),
                rate * 100.0
            ),
        ))
    })
}

/// Identical configurations produce byte-identical reports, with or without
/// concurrency.
pub fn check_report_determinism() -> Check {
    run_check("report-determinism", || {
        let config = ExperimentConfig {
            scheme: SchemeSpec::Canonical {
                n_values: vec![2, 3],
                theta: std::f64::consts::FRAC_PI_8,
                alpha: 0.25,
            },
            nu_grid: vec![0.0, 0.5, 1.0],
            trials: 3000,
            seed: 7,
            messages: MessageSelection::Sample(4),
            parallel: true,
            channel_dim_limit: crate::infometrics::DEFAULT_CHANNEL_DIM_LIMIT,
        };
        let first = render_rows(&run_experiment(&config)?, ReportFormat::Csv)?;
        let second = render_rows(&run_experiment(&config)?, ReportFormat::Csv)?;
        let serial = {
            let mut c = config.clone();
            c.parallel = false;
            render_rows(&run_experiment(&c)?, ReportFormat::Csv)?
        };
        let jsonl_a = render_rows(&run_experiment(&config)?, ReportFormat::Jsonl)?;
        let jsonl_b = render_rows(&run_experiment(&config)?, ReportFormat::Jsonl)?;
        let passed = first == second && first == serial && jsonl_a == jsonl_b;
        Ok((
            passed,
            format!(
                "rerun identical: {}, parallel == serial: {}, jsonl identical: {}",
                first == second,
                first == serial,
                jsonl_a == jsonl_b
            ),
        ))
    })
}

/// Product-form entries match an explicit power-product evaluation.
pub fn check_product_dense_agreement() -> Check {
    run_check("product-dense-agreement", || {
        let mut worst = 0.0f64;
        for n in [1u32, 2, 4, 6, 8] {
            let amps = canonical(n)?;
            let dense = amps.to_dense()?;
            for i in 0..amps.dim() {
                for j in 0..amps.dim() {
                    worst = worst.max((dense.entry(i, j) - amps.entry(i, j)).abs());
                }
            }
        }
        // Larger n: spot rows against an independent powi evaluation.
        let n = 12u32;
        let params = canonical_params(n)?;
        let amps = AmplitudeMatrix::product_form(&params)?;
        let (c, s) = (params.bit_angle().cos(), params.bit_angle().sin());
        for i in [0u64, 1365, 4095] {
            for j in 0..amps.dim() {
                let d = (i ^ j).count_ones();
                let direct = c.powi((n - d) as i32) * s.powi(d as i32);
                worst = worst.max((amps.entry(i, j) - direct).abs());
            }
        }
        Ok((
            worst <= 1e-12,
            format!("worst |deviation| = {worst:.2e} (tol 1e-12)"),
        ))
    })
}

/// The squared diagonal amplitude reproduces the faultless-decode
/// probability for every message.
pub fn check_pmax_diagonal_consistency() -> Check {
    run_check("pmax-diagonal-consistency", || {
        let mut worst = 0.0f64;
        for n in 1..=16u32 {
            let params = canonical_params(n)?;
            let amps = AmplitudeMatrix::product_form(&params)?;
            let expected = p_max(&params).exact;
            for i in [0u64, amps.dim() / 3, amps.dim() - 1] {
                let diag = amps.entry(i, i);
                worst = worst.max((diag * diag - expected).abs());
            }
        }
        Ok((
            worst <= 1e-10,
            format!("n = 1..=16, worst |deviation| = {worst:.2e} (tol 1e-10)"),
        ))
    })
}

/// The decode law is entrywise the (1 - nu) uniform / nu honest mixture.
pub fn check_mixture_identity() -> Check {
    run_check("mixture-identity", || {
        let mut schemes: Vec<AmplitudeMatrix> = vec![canonical(4)?, canonical(7)?];
        for (index, dim) in [3usize, 9, 17, 33, 64].into_iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(0x317, index as u64));
            schemes.push(random_dense_scheme(dim, &mut rng)?);
        }
        let mut worst = 0.0f64;
        for amps in &schemes {
            let dim = amps.dim();
            let message = dim / 2;
            let honest = outcome_distribution(amps, message, 1.0)?;
            for &nu in &nu_grid() {
                let mixed = outcome_distribution(amps, message, nu)?;
                for i in 0..dim as usize {
                    let expected = (1.0 - nu) / dim as f64 + nu * honest.get(i);
                    worst = worst.max((mixed.get(i) - expected).abs());
                }
            }
        }
        Ok((
            worst <= 1e-12,
            format!("worst |deviation| = {worst:.2e} (tol 1e-12)"),
        ))
    })
}

/// nu = 0 reproduces the uniform distribution exactly and nu = 1 the honest
/// readout.
pub fn check_degenerate_limits() -> Check {
    run_check("degenerate-limits", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0xDE6E);
        let schemes = vec![
            canonical(5)?,
            AmplitudeMatrix::identity(16)?,
            random_dense_scheme(21, &mut rng)?,
        ];
        let mut worst = 0.0f64;
        let mut uniform_exact = true;
        for amps in &schemes {
            let dim = amps.dim();
            let message = dim - 1;
            let blind = outcome_distribution(amps, message, 0.0)?;
            for &p in blind.probabilities() {
                uniform_exact &= p == 1.0 / dim as f64;
            }
            let honest = outcome_distribution(amps, message, 1.0)?;
            let readout = amps.honest_readout(message)?;
            for (a, b) in honest
                .probabilities()
                .iter()
                .zip(readout.probabilities())
            {
                worst = worst.max((a - b).abs());
            }
        }
        Ok((
            uniform_exact && worst <= 1e-12,
            format!("uniform limit exact: {uniform_exact}, honest limit |deviation| = {worst:.2e}"),
        ))
    })
}

/// Noise-floor decompositions recompose to the original channel entrywise.
pub fn check_decomposition_exactness() -> Check {
    run_check("decomposition-exactness", || {
        let mut worst = 0.0f64;
        for (index, dim) in [2usize, 5, 16, 40].into_iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(0xDEC0, index as u64));
            let amps = random_dense_scheme(dim, &mut rng)?;
            for &nu in &nu_grid() {
                let channel = ChannelMatrix::from_amplitudes(&amps, nu)?;
                let (w, residual) = noise_floor_decomposition(&channel);
                let uniform = 1.0 / dim as f64;
                for i in 0..dim {
                    for j in 0..dim {
                        let recomposed = w * uniform + (1.0 - w) * residual.entry(i, j);
                        worst = worst.max((recomposed - channel.entry(i, j)).abs());
                    }
                }
            }
        }
        Ok((
            worst <= 1e-10,
            format!("worst |deviation| = {worst:.2e} (tol 1e-10)"),
        ))
    })
}

/// Monte Carlo honest readout at n = 16 lands within three standard errors
/// of the epsilon * n mean Hamming distance.
pub fn check_readability_at_scale() -> Check {
    run_check("readability-at-scale", || {
        let params = canonical_params(16)?;
        let amps = AmplitudeMatrix::product_form(&params)?;
        let i_prime = 0x2D4Bu64;
        let readout = amps.honest_readout(i_prime)?;
        let mut cdf = Vec::with_capacity(readout.len());
        let mut acc = 0.0;
        for &p in readout.probabilities() {
            acc += p;
            cdf.push(acc);
        }
        let trials = 100_000u64;
        let mut rng = ChaCha8Rng::seed_from_u64(0x4EAD_0001);
        let mut total = 0u64;
        for _ in 0..trials {
            let u: f64 = rng.gen();
            let j = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1) as u64;
            total += u64::from((j ^ i_prime).count_ones());
        }
        let mean = total as f64 / trials as f64;
        let eps = params.error_rate();
        let expected = 16.0 * eps;
        let stderr = (16.0 * eps * (1.0 - eps) / trials as f64).sqrt();
        Ok((
            (mean - expected).abs() < 3.0 * stderr,
            format!("mean Hamming {mean:.4}, expected {expected:.4} +- {:.4}", 3.0 * stderr),
        ))
    })
}

/// The ten acceptance-grade checks, in reporting order.
pub fn acceptance_checks() -> Vec<Check> {
    vec![
        check_kraus_output_law(),
        check_measurement_completeness(),
        check_noise_floor_half_strength(),
        check_information_convexity(),
        check_honest_information_factorization(),
        check_pmax_scaling(),
        check_coin_toss_statistics(),
        check_escape_at_least_half(),
        check_channel_mc_agreement(),
        check_report_determinism(),
    ]
}

/// Supplementary structural invariants.
pub fn invariant_checks() -> Vec<Check> {
    vec![
        check_product_dense_agreement(),
        check_pmax_diagonal_consistency(),
        check_mixture_identity(),
        check_degenerate_limits(),
        check_decomposition_exactness(),
        check_readability_at_scale(),
    ]
}

/// Everything the `verify` subcommand runs.
pub fn run_all() -> Vec<Check> {
    let mut checks = acceptance_checks();
    checks.extend(invariant_checks());
    checks
}
