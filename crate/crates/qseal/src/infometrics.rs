//! Information content of attack outputs: exact channel mutual information,
//! guessing probability, noise-floor decomposition and per-bit error rates.
//!
//! Everything here is exact computation on explicit channel matrices; Monte
//! Carlo information estimates are deliberately excluded because they are
//! biased at desk sample sizes. Entropies are in bits throughout, so the
//! log2(N) ceiling of an N-message channel is immediate.

use crate::attack::outcome_distribution;
use crate::dist::{entropy_bits, Distribution, NORMALIZATION_TOL};
use crate::error::{Error, Result};
use crate::seal::{AmplitudeMatrix, SealParameters};

/// Default cap on the dimension of explicit N x N channel matrices.
pub const DEFAULT_CHANNEL_DIM_LIMIT: u64 = 4096;

/// The decode channel p(i | i'): one row per sealed message, built from an
/// amplitude matrix at a fixed attack strength nu.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    dim: usize,
    nu: f64,
    rows: Vec<f64>,
}

impl ChannelMatrix {
    /// Builds the full decode channel, one [`outcome_distribution`] row per
    /// sealed message, under the default dimension limit.
    pub fn from_amplitudes(amps: &AmplitudeMatrix, nu: f64) -> Result<Self> {
        Self::from_amplitudes_with_limit(amps, nu, DEFAULT_CHANNEL_DIM_LIMIT)
    }

    pub fn from_amplitudes_with_limit(
        amps: &AmplitudeMatrix,
        nu: f64,
        limit: u64,
    ) -> Result<Self> {
        if amps.dim() > limit {
            return Err(Error::DimensionLimit {
                dim: amps.dim(),
                limit,
            });
        }
        let dim = amps.dim() as usize;
        let mut rows = Vec::with_capacity(dim * dim);
        for i_prime in 0..amps.dim() {
            let dist = outcome_distribution(amps, i_prime, nu)?;
            rows.extend_from_slice(dist.probabilities());
        }
        Ok(Self { dim, nu, rows })
    }

    /// Assembles a channel from explicit rows, validating normalization and
    /// the (1 - nu)/N entry floor.
    pub fn from_rows(rows: Vec<Vec<f64>>, nu: f64) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::ParameterOutOfRange {
                name: "dimension",
                constraint: "[1, ..)",
                value: 0.0,
            });
        }
        let floor = (1.0 - nu) / dim as f64;
        let mut flat = Vec::with_capacity(dim * dim);
        for (index, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: row.len(),
                    right: dim,
                });
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > NORMALIZATION_TOL {
                return Err(Error::RowNotNormalized {
                    row: index,
                    norm_sq: sum,
                });
            }
            for (j, &p) in row.iter().enumerate() {
                if p < floor - 1e-12 {
                    return Err(Error::NegativeProbability {
                        index: index * dim + j,
                        value: p,
                    });
                }
            }
            flat.extend_from_slice(row);
        }
        Ok(Self {
            dim,
            nu,
            rows: flat,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The attack strength this channel was built with.
    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn row(&self, i_prime: usize) -> &[f64] {
        &self.rows[i_prime * self.dim..(i_prime + 1) * self.dim]
    }

    pub fn entry(&self, i_prime: usize, i: usize) -> f64 {
        self.rows[i_prime * self.dim + i]
    }

    pub fn min_entry(&self) -> f64 {
        self.rows.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Exact mutual information I(input; output) in bits between the sealed
/// message under `prior` and the decoded output:
/// H(output) - Sum_i' prior(i') H(row i'), with the 0 log 0 = 0 convention.
pub fn mutual_information(channel: &ChannelMatrix, prior: &Distribution) -> Result<f64> {
    if prior.len() != channel.dim {
        return Err(Error::DimensionMismatch {
            left: prior.len(),
            right: channel.dim,
        });
    }
    let dim = channel.dim;
    let mut output = vec![0.0; dim];
    let mut conditional = 0.0;
    for i_prime in 0..dim {
        let w = prior.get(i_prime);
        let row = channel.row(i_prime);
        if w > 0.0 {
            for (o, &p) in output.iter_mut().zip(row) {
                *o += w * p;
            }
            conditional += w * entropy_bits(row);
        }
    }
    // Rounding can push the difference a hair below zero for an
    // information-free channel; clamp to the true lower bound.
    Ok((entropy_bits(&output) - conditional).max(0.0))
}

/// Splits a channel into its maximal uniform component:
/// the largest w with channel = w * uniform + (1 - w) * residual and the
/// residual still a valid channel, which is w = N * min_entry. For a decode
/// channel whose scheme has a vanishing minimum amplitude this gives
/// w = 1 - nu, and the residual is the honest (nu = 1) channel.
pub fn noise_floor_decomposition(channel: &ChannelMatrix) -> (f64, ChannelMatrix) {
    let dim = channel.dim;
    let uniform = 1.0 / dim as f64;
    let weight = (dim as f64 * channel.min_entry()).clamp(0.0, 1.0);
    if weight >= 1.0 {
        // The channel is entirely uniform; any residual recomposes exactly.
        let residual = ChannelMatrix {
            dim,
            nu: 1.0,
            rows: vec![uniform; dim * dim],
        };
        return (1.0, residual);
    }
    let scale = (1.0 - weight).recip();
    let mut rows = Vec::with_capacity(dim * dim);
    for i_prime in 0..dim {
        let start = rows.len();
        for &p in channel.row(i_prime) {
            rows.push(((p - weight * uniform) * scale).max(0.0));
        }
        let sum: f64 = rows[start..].iter().sum();
        if sum > 0.0 {
            for p in &mut rows[start..] {
                *p /= sum;
            }
        }
    }
    (weight, ChannelMatrix { dim, nu: 1.0, rows })
}

/// Optimal-guess success probability Sum_i max_i' prior(i') p(i | i').
pub fn guessing_probability(channel: &ChannelMatrix, prior: &Distribution) -> Result<f64> {
    if prior.len() != channel.dim {
        return Err(Error::DimensionMismatch {
            left: prior.len(),
            right: channel.dim,
        });
    }
    let dim = channel.dim;
    let mut total = 0.0;
    for i in 0..dim {
        let mut best = 0.0f64;
        for i_prime in 0..dim {
            best = best.max(prior.get(i_prime) * channel.entry(i_prime, i));
        }
        total += best;
    }
    Ok(total)
}

/// Expected fraction of differing bits between the decoded output and the
/// sealed message i' under attack strength nu.
///
/// The uniform component flips each bit with probability 1/2 and the honest
/// component with probability epsilon, so the product-form value is
/// (1 - nu)/2 + nu * epsilon; dense schemes take the exact expectation over
/// the decode law.
pub fn per_bit_error_rate(amps: &AmplitudeMatrix, i_prime: u64, nu: f64) -> Result<f64> {
    if amps.is_product() {
        crate::attack::identify_probability(amps, i_prime, nu)?; // validates inputs
        let epsilon = product_error_rate(amps);
        return Ok((1.0 - nu) / 2.0 + nu * epsilon);
    }
    let dist = outcome_distribution(amps, i_prime, nu)?;
    let bits = amps.bits();
    let mut expected = 0.0;
    for (i, &p) in dist.probabilities().iter().enumerate() {
        expected += p * f64::from((i as u64 ^ i_prime).count_ones());
    }
    Ok(expected / f64::from(bits))
}

// The per-bit flip probability of a product-form matrix is sin^2(theta),
// recovered from any single-bit readout marginal.
fn product_error_rate(amps: &AmplitudeMatrix) -> f64 {
    let ratio = amps.entry(0, 1) / amps.entry(0, 0); // tan(theta)^(1)
    let tan_sq = ratio * ratio;
    tan_sq / (1.0 + tan_sq)
}

/// Exact mutual information of the product-form decode channel with uniform
/// prior, computed from the Hamming-weight profile in O(n) instead of the
/// N x N matrix, so it stays available past the channel dimension limit.
///
/// The output marginal is uniform by symmetry, and every row has the same
/// entropy: rows are permutations of q(d) = (1 - nu)/N + nu (1-e)^(n-d) e^d
/// with multiplicity C(n, d).
pub fn product_mutual_information(params: &SealParameters, nu: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&nu) {
        return Err(Error::ParameterOutOfRange {
            name: "nu",
            constraint: "[0, 1]",
            value: nu,
        });
    }
    let n = params.n();
    let eps = params.error_rate();
    let (ln_eps, ln_keep) = (eps.ln(), (-eps).ln_1p());
    let mut row_entropy = 0.0;
    let mut ln_choose = 0.0; // ln C(n, d), updated incrementally
    for d in 0..=n {
        if d > 0 {
            ln_choose += ((n - d + 1) as f64).ln() - (d as f64).ln();
        }
        let ln_lambda_sq = (n - d) as f64 * ln_keep + d as f64 * ln_eps;
        let q = (1.0 - nu) * (-(n as f64) * std::f64::consts::LN_2).exp()
            + nu * ln_lambda_sq.exp();
        if q > 0.0 {
            // C(n,d) * q, with the count kept in the log domain
            let mass = (ln_choose + q.ln()).exp();
            row_entropy -= mass * q.log2();
        }
    }
    Ok((n as f64 - row_entropy).max(0.0))
}

/// Noise-floor weight of the product-form decode channel in closed form:
/// N * min_entry = (1 - nu) + nu (2 epsilon)^n.
pub fn product_noise_floor_weight(params: &SealParameters, nu: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&nu) {
        return Err(Error::ParameterOutOfRange {
            name: "nu",
            constraint: "[0, 1]",
            value: nu,
        });
    }
    let n = params.n() as f64;
    let min_tail = (n * (2.0 * params.error_rate()).ln()).exp();
    Ok(((1.0 - nu) + nu * min_tail).clamp(0.0, 1.0))
}

/// Binary entropy H2(p) in bits.
pub fn binary_entropy(p: f64) -> f64 {
    let mut h = 0.0;
    if p > 0.0 {
        h -= p * p.log2();
    }
    if p < 1.0 {
        h -= (1.0 - p) * (1.0 - p).log2();
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_8;

    fn canonical_params(n: u32) -> SealParameters {
        SealParameters::new(n, FRAC_PI_8, 0.25).unwrap()
    }

    fn canonical(n: u32) -> AmplitudeMatrix {
        AmplitudeMatrix::product_form(&canonical_params(n)).unwrap()
    }

    fn random_dense(dim: usize, rng: &mut ChaCha8Rng) -> AmplitudeMatrix {
        let rows = (0..dim)
            .map(|_| {
                let raw: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let norm = raw.iter().map(|a| a * a).sum::<f64>().sqrt();
                raw.into_iter().map(|a| a / norm).collect()
            })
            .collect();
        AmplitudeMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn channel_limits() {
        let amps = canonical(2);
        let blind = ChannelMatrix::from_amplitudes(&amps, 0.0).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(blind.entry(i, j), 0.25);
            }
        }

        let eigen = AmplitudeMatrix::identity(4).unwrap();
        let honest = ChannelMatrix::from_amplitudes(&eigen, 1.0).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(honest.entry(i, j), if i == j { 1.0 } else { 0.0 });
            }
        }

        let half = ChannelMatrix::from_amplitudes(&eigen, 0.5).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { 1.0 / 8.0 + 0.5 } else { 1.0 / 8.0 };
                assert!((half.entry(i, j) - expect).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn channel_respects_dimension_limit() {
        let amps = canonical(4);
        assert!(ChannelMatrix::from_amplitudes_with_limit(&amps, 0.5, 8).is_err());
        assert!(ChannelMatrix::from_amplitudes_with_limit(&amps, 0.5, 16).is_ok());
    }

    #[test]
    fn mutual_information_degenerate_channels() {
        let amps = canonical(3);
        let prior = Distribution::uniform(8);
        let blind = ChannelMatrix::from_amplitudes(&amps, 0.0).unwrap();
        assert_eq!(mutual_information(&blind, &prior).unwrap(), 0.0);

        let eigen = AmplitudeMatrix::identity(8).unwrap();
        let noiseless = ChannelMatrix::from_amplitudes(&eigen, 1.0).unwrap();
        let full = mutual_information(&noiseless, &prior).unwrap();
        assert!((full - 3.0).abs() < 1e-12);
    }

    #[test]
    fn mutual_information_rejects_mismatched_prior() {
        let amps = canonical(3);
        let channel = ChannelMatrix::from_amplitudes(&amps, 0.5).unwrap();
        assert!(mutual_information(&channel, &Distribution::uniform(4)).is_err());
    }

    #[test]
    fn honest_information_factorizes_into_binary_channels() {
        for n in [2u32, 4, 6, 10] {
            let params = canonical_params(n);
            let amps = AmplitudeMatrix::product_form(&params).unwrap();
            let channel = ChannelMatrix::from_amplitudes(&amps, 1.0).unwrap();
            let prior = Distribution::uniform(channel.dim());
            let exact = mutual_information(&channel, &prior).unwrap();
            let expect = n as f64 * (1.0 - binary_entropy(params.error_rate()));
            assert!((exact - expect).abs() < 1e-9, "n {n}: {exact} vs {expect}");
        }
    }

    #[test]
    fn product_information_matches_exact_channel() {
        for n in [2u32, 4, 7] {
            let params = canonical_params(n);
            let amps = AmplitudeMatrix::product_form(&params).unwrap();
            for nu in [0.0, 0.3, 0.5, 0.9, 1.0] {
                let channel = ChannelMatrix::from_amplitudes(&amps, nu).unwrap();
                let prior = Distribution::uniform(channel.dim());
                let exact = mutual_information(&channel, &prior).unwrap();
                let closed = product_mutual_information(&params, nu).unwrap();
                assert!((exact - closed).abs() < 1e-9, "n {n} nu {nu}");
            }
        }
    }

    #[test]
    fn product_information_frozen_references() {
        // High-precision reference values for the pi/8, 1/4 scheme.
        let two = product_mutual_information(&canonical_params(2), 0.5).unwrap();
        assert!((two - 0.255_033_358_614_448_21).abs() < 1e-12);
        let three = product_mutual_information(&canonical_params(3), 0.3).unwrap();
        assert!((three - 0.185_282_300_690_712_59).abs() < 1e-12);
        let four = product_mutual_information(&canonical_params(4), 1.0).unwrap();
        assert!((four - 2.460_656_056_046_550_5).abs() < 1e-12);
    }

    #[test]
    fn information_is_convex_in_attack_strength() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let dim = rng.gen_range(2usize..32);
            let amps = random_dense(dim, &mut rng);
            let prior = Distribution::uniform(dim);
            let honest = ChannelMatrix::from_amplitudes(&amps, 1.0).unwrap();
            let honest_info = mutual_information(&honest, &prior).unwrap();
            for step in 0..=10 {
                let nu = step as f64 / 10.0;
                let channel = ChannelMatrix::from_amplitudes(&amps, nu).unwrap();
                let info = mutual_information(&channel, &prior).unwrap();
                assert!(info <= nu * honest_info + 1e-9, "nu {nu}");
            }
        }
    }

    #[test]
    fn information_nondecreasing_in_nu_for_sampled_schemes() {
        // Empirical observation on these instances, not a proved theorem.
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut schemes = vec![canonical(4), canonical(6)];
        schemes.push(random_dense(12, &mut rng));
        for amps in &schemes {
            let prior = Distribution::uniform(amps.dim() as usize);
            let mut last = -1.0;
            for step in 0..=10 {
                let nu = step as f64 / 10.0;
                let channel = ChannelMatrix::from_amplitudes(amps, nu).unwrap();
                let info = mutual_information(&channel, &prior).unwrap();
                assert!(info >= last - 1e-12, "nu {nu}: {info} < {last}");
                last = info;
            }
        }
    }

    #[test]
    fn noise_floor_weight_for_eigenstate_channels() {
        let eigen = AmplitudeMatrix::identity(8).unwrap();
        let half = ChannelMatrix::from_amplitudes(&eigen, 0.5).unwrap();
        let (w, residual) = noise_floor_decomposition(&half);
        assert!((w - 0.5).abs() < 1e-12);
        let honest = ChannelMatrix::from_amplitudes(&eigen, 1.0).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                assert!((residual.entry(i, j) - honest.entry(i, j)).abs() < 1e-10);
            }
        }

        let honest_channel = ChannelMatrix::from_amplitudes(&eigen, 1.0).unwrap();
        let (w1, _) = noise_floor_decomposition(&honest_channel);
        assert_eq!(w1, 0.0);

        let blind = ChannelMatrix::from_amplitudes(&eigen, 0.0).unwrap();
        let (w0, residual) = noise_floor_decomposition(&blind);
        assert_eq!(w0, 1.0);
        assert!((residual.entry(0, 0) - 1.0 / 8.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn decomposition_recomposes_exactly(seed in 0u64..200) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let dim = rng.gen_range(2usize..24);
            let amps = random_dense(dim, &mut rng);
            let nu = rng.gen_range(0.0..=1.0);
            let channel = ChannelMatrix::from_amplitudes(&amps, nu).unwrap();
            let (w, residual) = noise_floor_decomposition(&channel);
            let uniform = 1.0 / dim as f64;
            for i in 0..dim {
                for j in 0..dim {
                    let recomposed = w * uniform + (1.0 - w) * residual.entry(i, j);
                    prop_assert!((recomposed - channel.entry(i, j)).abs() < 1e-10);
                }
            }
        }

        #[test]
        fn guessing_probability_mixture_bound(seed in 0u64..200) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let dim = rng.gen_range(2usize..24);
            let amps = random_dense(dim, &mut rng);
            let nu = rng.gen_range(0.0..=1.0);
            let prior = Distribution::uniform(dim);
            let mixed = ChannelMatrix::from_amplitudes(&amps, nu).unwrap();
            let honest = ChannelMatrix::from_amplitudes(&amps, 1.0).unwrap();
            let g_mixed = guessing_probability(&mixed, &prior).unwrap();
            let g_honest = guessing_probability(&honest, &prior).unwrap();
            prop_assert!(g_mixed <= (1.0 - nu) / dim as f64 + nu * g_honest + 1e-10);
            prop_assert!(g_mixed >= 1.0 / dim as f64 - 1e-12);
        }
    }

    #[test]
    fn guessing_probability_reference_channels() {
        let eigen = AmplitudeMatrix::identity(8).unwrap();
        let prior = Distribution::uniform(8);

        let blind = ChannelMatrix::from_amplitudes(&eigen, 0.0).unwrap();
        assert!((guessing_probability(&blind, &prior).unwrap() - 1.0 / 8.0).abs() < 1e-14);

        let honest = ChannelMatrix::from_amplitudes(&eigen, 1.0).unwrap();
        assert!((guessing_probability(&honest, &prior).unwrap() - 1.0).abs() < 1e-14);

        // mixture of identity and uniform: best guess is the diagonal
        for dim in [2usize, 4, 8, 16] {
            let eigen = AmplitudeMatrix::identity(dim as u64).unwrap();
            let prior = Distribution::uniform(dim);
            for nu in [0.2, 0.5, 0.8] {
                let channel = ChannelMatrix::from_amplitudes(&eigen, nu).unwrap();
                let expect = (1.0 - nu) / dim as f64 + nu;
                let brute: f64 = (0..dim)
                    .map(|i| {
                        (0..dim)
                            .map(|ip| channel.entry(ip, i) / dim as f64)
                            .fold(0.0f64, f64::max)
                    })
                    .sum();
                let g = guessing_probability(&channel, &prior).unwrap();
                assert!((g - expect).abs() < 1e-12);
                assert!((g - brute).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn per_bit_error_rate_limits() {
        let amps = canonical(6);
        let params = canonical_params(6);
        let honest = per_bit_error_rate(&amps, 9, 1.0).unwrap();
        assert!((honest - params.error_rate()).abs() < 1e-12);
        let blind = per_bit_error_rate(&amps, 9, 0.0).unwrap();
        assert!((blind - 0.5).abs() < 1e-12);
    }

    #[test]
    fn per_bit_error_rate_half_strength_dual_route() {
        for n in [3u32, 6, 8] {
            let params = canonical_params(n);
            let amps = AmplitudeMatrix::product_form(&params).unwrap();
            let closed = per_bit_error_rate(&amps, 5, 0.5).unwrap();
            assert!((closed - (0.25 + params.error_rate() / 2.0)).abs() < 1e-12);
            // exact expectation over the materialized decode law
            let dense = amps.to_dense().unwrap();
            let exact = per_bit_error_rate(&dense, 5, 0.5).unwrap();
            assert!((closed - exact).abs() < 1e-12, "n {n}");
        }
    }

    #[test]
    fn product_noise_floor_weight_matches_exact_channel() {
        for n in [2u32, 4, 6] {
            let params = canonical_params(n);
            let amps = AmplitudeMatrix::product_form(&params).unwrap();
            for nu in [0.0, 0.5, 1.0] {
                let channel = ChannelMatrix::from_amplitudes(&amps, nu).unwrap();
                let (w, _) = noise_floor_decomposition(&channel);
                let closed = product_noise_floor_weight(&params, nu).unwrap();
                assert!((w - closed).abs() < 1e-10, "n {n} nu {nu}: {w} vs {closed}");
            }
        }
    }

    #[test]
    fn binary_entropy_reference_points() {
        assert_eq!(binary_entropy(0.0), 0.0);
        assert_eq!(binary_entropy(1.0), 0.0);
        assert!((binary_entropy(0.5) - 1.0).abs() < 1e-15);
        assert!((binary_entropy(0.11) - 0.499_915_958_164_528).abs() < 1e-12);
    }
}
