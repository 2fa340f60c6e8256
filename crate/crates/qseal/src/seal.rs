//! String-seal scheme model: parameters, sealed-state amplitudes, honest
//! readout, and the readability/faultless-decode scaling formulas.
//!
//! A seal over n-bit messages assigns each message i' a unit vector of real
//! amplitudes over the 2^n readout outcomes. The product-form scheme seals
//! every bit independently as a theta-rotated basis state, so the amplitude
//! on outcome j depends only on the Hamming distance between i' and j:
//!
//! ```text
//! lambda(i', j) = cos(theta)^(n - d) * sin(theta)^d,   d = hamming(i', j)
//! ```
//!
//! Messages are unsigned integers in [0, 2^n); bit k of the integer is bit k
//! of the string. All amplitudes are real and non-negative: every observable
//! implemented here depends only on |lambda|^2, so complex phases would be
//! unobservable anyway.

use crate::dist::Distribution;
use crate::error::{Error, Result};

/// Largest bit length materialized as dense state vectors (2^20 amplitudes).
pub const STATE_BITS_LIMIT: u32 = 20;

/// Largest bit length for message-space operations; message indices are u64.
pub const MESSAGE_BITS_LIMIT: u32 = 63;

/// Largest dimension accepted for dense amplitude matrices.
pub const DENSE_DIM_LIMIT: u64 = 4096;

/// Scheme constants of a string seal: string length `n`, base angle `Theta`
/// and exponent `alpha`, with the derived per-bit angle
/// `theta = Theta / n^alpha` and per-bit error rate `epsilon = sin^2(theta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SealParameters {
    n: u32,
    theta: f64,
    alpha: f64,
    bit_angle: f64,
    error_rate: f64,
}

impl SealParameters {
    /// Validates `n >= 1`, `Theta` in (0, pi/4) and `alpha` in (0, 1/2),
    /// then derives the per-bit angle and error rate.
    pub fn new(n: u32, theta: f64, alpha: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::ParameterOutOfRange {
                name: "n",
                constraint: "[1, ..)",
                value: 0.0,
            });
        }
        if !theta.is_finite() || theta <= 0.0 || theta >= std::f64::consts::FRAC_PI_4 {
            return Err(Error::ParameterOutOfRange {
                name: "theta",
                constraint: "(0, pi/4) radians",
                value: theta,
            });
        }
        if !alpha.is_finite() || alpha <= 0.0 || alpha >= 0.5 {
            return Err(Error::ParameterOutOfRange {
                name: "alpha",
                constraint: "(0, 1/2)",
                value: alpha,
            });
        }
        let bit_angle = theta / (n as f64).powf(alpha);
        let error_rate = bit_angle.sin().powi(2);
        Ok(Self {
            n,
            theta,
            alpha,
            bit_angle,
            error_rate,
        })
    }

    /// String length in bits.
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Base angle Theta, radians.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Per-bit rotation angle theta = Theta / n^alpha.
    pub fn bit_angle(&self) -> f64 {
        self.bit_angle
    }

    /// Per-bit readout error rate epsilon = sin^2(theta).
    pub fn error_rate(&self) -> f64 {
        self.error_rate
    }

    /// Message-space size 2^n as a float (exact for any n).
    pub fn dimension_f64(&self) -> f64 {
        (self.n as f64).exp2()
    }
}

/// Number of differing bit positions between two `bits`-bit strings.
///
/// Errors if either value does not fit in `bits` bits.
pub fn hamming(x: u64, y: u64, bits: u32) -> Result<u32> {
    check_bits(x, bits)?;
    check_bits(y, bits)?;
    Ok((x ^ y).count_ones())
}

fn check_bits(value: u64, bits: u32) -> Result<()> {
    if bits < 64 && value >> bits != 0 {
        return Err(Error::BitLengthMismatch { value, bits });
    }
    Ok(())
}

/// True when the decoded string `b_prime` is an acceptable readout of `b`:
/// their Hamming distance is not greater than `epsilon * n` (inclusive).
pub fn readability_check(b: u64, b_prime: u64, params: &SealParameters) -> Result<bool> {
    let d = hamming(b, b_prime, params.n)?;
    Ok(d as f64 <= params.error_rate * params.n as f64)
}

/// Probability of decoding the whole string faultlessly under honest readout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmaxEstimate {
    /// (1 - epsilon)^n, evaluated in the log domain.
    pub exact: f64,
    /// (1 - Theta^2 / n^(2 alpha))^n, the large-n order-of-magnitude form.
    pub asymptotic: f64,
}

/// Faultless-decode probability of the product-form scheme, exact and in its
/// large-n asymptotic form. Both lie in (0, 1).
pub fn p_max(params: &SealParameters) -> PmaxEstimate {
    let n = params.n as f64;
    let exact = (n * (-params.error_rate).ln_1p()).exp();
    let shrink = params.theta * params.theta / n.powf(2.0 * params.alpha);
    let asymptotic = (n * (-shrink).ln_1p()).exp();
    PmaxEstimate { exact, asymptotic }
}

/// A real state vector with its cached square norm.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<f64>,
    norm_sq: f64,
}

impl StateVector {
    pub fn new(amplitudes: Vec<f64>) -> Self {
        let norm_sq = amplitudes.iter().map(|a| a * a).sum();
        Self {
            amplitudes,
            norm_sq,
        }
    }

    /// The computational basis vector e_index.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index out of range");
        let mut amplitudes = vec![0.0; dim];
        amplitudes[index] = 1.0;
        Self {
            amplitudes,
            norm_sq: 1.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm_sq(&self) -> f64 {
        self.norm_sq
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    /// Squared overlap |<self|other>|^2.
    pub fn overlap_sq(&self, other: &StateVector) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        let dot: f64 = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a * b)
            .sum();
        Ok(dot * dot)
    }
}

/// Row-indexed sealed-state amplitudes lambda(i', j): row i' holds the
/// amplitudes of the state sealing message i' in the readout basis.
///
/// Product-form matrices store only (n, theta) and compute entries on
/// demand; dense matrices hold an explicit unit-row table, e.g. one loaded
/// from a scheme file.
#[derive(Debug, Clone)]
pub struct AmplitudeMatrix {
    repr: Repr,
}

#[derive(Debug, Clone)]
enum Repr {
    Product {
        n: u32,
        cos_theta: f64,
        sin_theta: f64,
        ln_cos: f64,
        ln_sin: f64,
    },
    Dense {
        dim: u64,
        // row-major dim x dim
        entries: Vec<f64>,
    },
}

impl AmplitudeMatrix {
    /// The product-form scheme for the given parameters: each bit sealed as
    /// a theta-rotated basis state, so that the diagonal entry squared is
    /// (1 - epsilon)^n.
    pub fn product_form(params: &SealParameters) -> Result<Self> {
        if params.n > MESSAGE_BITS_LIMIT {
            return Err(Error::DimensionLimit {
                dim: params.n as u64,
                limit: MESSAGE_BITS_LIMIT as u64,
            });
        }
        let theta = params.bit_angle;
        Ok(Self {
            repr: Repr::Product {
                n: params.n,
                cos_theta: theta.cos(),
                sin_theta: theta.sin(),
                ln_cos: theta.cos().ln(),
                ln_sin: theta.sin().ln(),
            },
        })
    }

    /// The eigenstate seal: lambda is the Kronecker delta, so honest readout
    /// recovers every message exactly.
    pub fn identity(dim: u64) -> Result<Self> {
        check_dense_dim(dim)?;
        let d = dim as usize;
        let mut entries = vec![0.0; d * d];
        for i in 0..d {
            entries[i * d + i] = 1.0;
        }
        Ok(Self {
            repr: Repr::Dense { dim, entries },
        })
    }

    /// Builds a dense matrix from explicit rows, validating that the matrix
    /// is square and every row has unit square norm within 1e-10.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.len() as u64;
        check_dense_dim(dim)?;
        let d = dim as usize;
        let mut entries = Vec::with_capacity(d * d);
        for (row_index, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    left: row.len(),
                    right: d,
                });
            }
            let norm_sq: f64 = row.iter().map(|a| a * a).sum();
            if (norm_sq - 1.0).abs() > crate::dist::NORMALIZATION_TOL {
                return Err(Error::RowNotNormalized {
                    row: row_index,
                    norm_sq,
                });
            }
            entries.extend_from_slice(row);
        }
        Ok(Self {
            repr: Repr::Dense { dim, entries },
        })
    }

    /// Message-space dimension N.
    pub fn dim(&self) -> u64 {
        match &self.repr {
            Repr::Product { n, .. } => 1u64 << n,
            Repr::Dense { dim, .. } => *dim,
        }
    }

    /// Message bit length: n for product form, the smallest width covering
    /// the dimension otherwise.
    pub fn bits(&self) -> u32 {
        match &self.repr {
            Repr::Product { n, .. } => *n,
            Repr::Dense { dim, .. } => {
                let mut bits = 0;
                while 1u64 << bits < *dim {
                    bits += 1;
                }
                bits.max(1)
            }
        }
    }

    pub fn is_product(&self) -> bool {
        matches!(self.repr, Repr::Product { .. })
    }

    /// The amplitude lambda(i', j). Panics if an index is out of range.
    pub fn entry(&self, i_prime: u64, j: u64) -> f64 {
        assert!(
            i_prime < self.dim() && j < self.dim(),
            "amplitude index out of range"
        );
        match &self.repr {
            Repr::Product {
                n, ln_cos, ln_sin, ..
            } => {
                let d = (i_prime ^ j).count_ones();
                ((*n - d) as f64 * ln_cos + d as f64 * ln_sin).exp()
            }
            Repr::Dense { dim, entries } => entries[(i_prime * dim + j) as usize],
        }
    }

    /// Materializes row i' as a dense amplitude vector. Product-form rows
    /// are only materialized up to [`STATE_BITS_LIMIT`] bits.
    pub fn row(&self, i_prime: u64) -> Result<Vec<f64>> {
        self.check_index(i_prime)?;
        let dim = self.materializable_dim()?;
        match &self.repr {
            Repr::Product { .. } => Ok((0..dim as u64)
                .map(|j| self.entry(i_prime, j))
                .collect()),
            Repr::Dense { dim: d, entries } => {
                let start = (i_prime * d) as usize;
                Ok(entries[start..start + *d as usize].to_vec())
            }
        }
    }

    /// The sealed state for message i': a normalized vector whose j-th
    /// amplitude is lambda(i', j).
    pub fn sealed_state(&self, i_prime: u64) -> Result<StateVector> {
        Ok(StateVector::new(self.row(i_prime)?))
    }

    /// Honest readout distribution p(j) = lambda(i', j)^2.
    pub fn honest_readout(&self, i_prime: u64) -> Result<Distribution> {
        let probs = self.row(i_prime)?.iter().map(|a| a * a).collect();
        Distribution::new(probs)
    }

    /// Sum of fourth powers over row i', Sum_j lambda(i', j)^4. For the
    /// product form this is (cos^4 + sin^4)^n, available at any n.
    pub fn row_fourth_moment(&self, i_prime: u64) -> Result<f64> {
        self.check_index(i_prime)?;
        match &self.repr {
            Repr::Product {
                n,
                cos_theta,
                sin_theta,
                ..
            } => {
                let per_bit = cos_theta.powi(4) + sin_theta.powi(4);
                Ok((*n as f64 * per_bit.ln()).exp())
            }
            Repr::Dense { dim, entries } => {
                let start = (i_prime * dim) as usize;
                Ok(entries[start..start + *dim as usize]
                    .iter()
                    .map(|a| a.powi(4))
                    .sum())
            }
        }
    }

    /// Dense copy of the matrix, materializing product-form entries.
    pub fn to_dense(&self) -> Result<AmplitudeMatrix> {
        match &self.repr {
            Repr::Dense { .. } => Ok(self.clone()),
            Repr::Product { .. } => {
                let dim = self.dim();
                check_dense_dim(dim)?;
                let d = dim as usize;
                let mut entries = Vec::with_capacity(d * d);
                for i in 0..dim {
                    entries.extend(self.row(i)?);
                }
                Ok(AmplitudeMatrix {
                    repr: Repr::Dense { dim, entries },
                })
            }
        }
    }

    pub(crate) fn check_index(&self, index: u64) -> Result<()> {
        if index >= self.dim() {
            return Err(Error::IndexOutOfRange {
                index,
                dim: self.dim(),
            });
        }
        Ok(())
    }

    /// Dimension as usize when rows may be materialized, error otherwise.
    pub(crate) fn materializable_dim(&self) -> Result<usize> {
        match &self.repr {
            Repr::Product { n, .. } => {
                if *n > STATE_BITS_LIMIT {
                    Err(Error::DimensionLimit {
                        dim: *n as u64,
                        limit: STATE_BITS_LIMIT as u64,
                    })
                } else {
                    Ok(1usize << n)
                }
            }
            Repr::Dense { dim, .. } => Ok(*dim as usize),
        }
    }
}

fn check_dense_dim(dim: u64) -> Result<()> {
    if dim < 1 {
        return Err(Error::ParameterOutOfRange {
            name: "dimension",
            constraint: "[1, ..)",
            value: dim as f64,
        });
    }
    if dim > DENSE_DIM_LIMIT {
        return Err(Error::DimensionLimit {
            dim,
            limit: DENSE_DIM_LIMIT,
        });
    }
    Ok(())
}
