//! The strength-nu readout attack and the coin-toss attack, plus a verifier
//! model measuring how often either escapes detection.
//!
//! The attack family is a complete measurement {M_i} of diagonal operators:
//! M_i puts `base + boost` on the target index i and `base` everywhere else.
//! With `base^2 = (1 - nu)/N` and `(base + boost)^2 = nu + (1 - nu)/N` the
//! decode law becomes an explicit mixture of uniform noise and the honest
//! Born rule:
//!
//! ```text
//! p(i | i') = (1 - nu)/N + nu * lambda(i', i)^2
//! ```
//!
//! nu = 1 is the honest projective readout, nu = 0 reveals nothing.
//!
//! Detection is modeled as the most stringent pure-state check available to
//! the sealer: a projective test onto the original sealed state. That is a
//! model choice for quantifying disturbance, not part of the seal itself.

use rand::Rng;

use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::seal::{AmplitudeMatrix, StateVector};

/// Branch probabilities below this cannot be renormalized meaningfully.
const DEGENERATE_BRANCH_FLOOR: f64 = 1e-300;

/// Diagonal coefficients of the strength-nu measurement family on an
/// N-dimensional message space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementCoefficients {
    nu: f64,
    dim: u64,
    base: f64,
    boost: f64,
}

impl MeasurementCoefficients {
    /// Solves `base^2 = (1 - nu)/N` and `(base + boost)^2 = nu + (1 - nu)/N`
    /// for the non-negative roots; this is the unique non-negative choice
    /// that makes {M_i} a complete measurement with the mixture decode law.
    pub fn new(nu: f64, dim: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&nu) {
            return Err(Error::ParameterOutOfRange {
                name: "nu",
                constraint: "[0, 1]",
                value: nu,
            });
        }
        if dim < 2 {
            return Err(Error::ParameterOutOfRange {
                name: "dimension",
                constraint: "[2, ..)",
                value: dim as f64,
            });
        }
        let n = dim as f64;
        let base = ((1.0 - nu) / n).sqrt();
        let boost = (nu + (1.0 - nu) / n).sqrt() - base;
        Ok(Self {
            nu,
            dim,
            base,
            boost,
        })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn dim(&self) -> u64 {
        self.dim
    }

    /// The off-target diagonal entry.
    pub fn base(&self) -> f64 {
        self.base
    }

    /// The extra weight on the target index.
    pub fn boost(&self) -> f64 {
        self.boost
    }

    /// |(base + boost)^2 + (N - 1) base^2 - 1|: how far {M_i} is from a
    /// complete measurement. Must be <= 1e-12 for valid coefficients.
    pub fn completeness_defect(&self) -> f64 {
        let peak = self.base + self.boost;
        (peak * peak + (self.dim as f64 - 1.0) * self.base * self.base - 1.0).abs()
    }
}

/// One branch M_i of the measurement: diagonal, `base + boost` at `target`,
/// `base` elsewhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagonalKraus {
    target: u64,
    coeffs: MeasurementCoefficients,
}

impl DiagonalKraus {
    pub fn new(target: u64, coeffs: MeasurementCoefficients) -> Result<Self> {
        if target >= coeffs.dim {
            return Err(Error::IndexOutOfRange {
                index: target,
                dim: coeffs.dim,
            });
        }
        Ok(Self { target, coeffs })
    }

    pub fn target(&self) -> u64 {
        self.target
    }

    pub fn coefficients(&self) -> &MeasurementCoefficients {
        &self.coeffs
    }

    pub fn diagonal_entry(&self, j: u64) -> f64 {
        if j == self.target {
            self.coeffs.base + self.coeffs.boost
        } else {
            self.coeffs.base
        }
    }
}

/// Applies M_i to a state: returns the normalized post-measurement state and
/// the branch probability ||M_i psi||^2, computed by materializing M_i psi.
pub fn apply_kraus(state: &StateVector, kraus: &DiagonalKraus) -> Result<(StateVector, f64)> {
    if state.dim() as u64 != kraus.coeffs.dim {
        return Err(Error::DimensionMismatch {
            left: state.dim(),
            right: kraus.coeffs.dim as usize,
        });
    }
    let mut scaled: Vec<f64> = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(j, &a)| kraus.diagonal_entry(j as u64) * a)
        .collect();
    let probability: f64 = scaled.iter().map(|a| a * a).sum();
    if probability < DEGENERATE_BRANCH_FLOOR {
        return Err(Error::DegenerateBranch { probability });
    }
    let inv_norm = probability.sqrt().recip();
    for a in &mut scaled {
        *a *= inv_norm;
    }
    Ok((StateVector::new(scaled), probability))
}

/// The decode law for sealed message i' under attack strength nu:
/// p(i) = (1 - nu)/N + nu * lambda(i', i)^2, entrywise at least (1 - nu)/N.
pub fn outcome_distribution(
    amps: &AmplitudeMatrix,
    i_prime: u64,
    nu: f64,
) -> Result<Distribution> {
    MeasurementCoefficients::new(nu, amps.dim())?;
    let row = amps.row(i_prime)?;
    let floor = (1.0 - nu) / amps.dim() as f64;
    let probs = row.iter().map(|l| floor + nu * l * l).collect();
    Distribution::new(probs)
}

/// Probability that the attack decodes the sealed message i' itself:
/// the i' entry of the decode law, (1 - nu)/N + nu * lambda(i', i')^2.
/// Needs no row materialization, so it is available at any supported n.
pub fn identify_probability(amps: &AmplitudeMatrix, i_prime: u64, nu: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&nu) {
        return Err(Error::ParameterOutOfRange {
            name: "nu",
            constraint: "[0, 1]",
            value: nu,
        });
    }
    amps.check_index(i_prime)?;
    let diag = amps.entry(i_prime, i_prime);
    Ok((1.0 - nu) / amps.dim() as f64 + nu * diag * diag)
}

/// Probability that a projective verification onto the original sealed state
/// passes after the strength-nu attack, averaged over attack outcomes:
/// Sum_i (base + boost * lambda(i', i)^2)^2.
///
/// Product-form schemes use the row moments Sum lambda^2 = 1 and
/// Sum lambda^4 = (cos^4 + sin^4)^n, which keeps the value available at any
/// supported n; dense schemes evaluate the sum directly.
pub fn escape_probability(amps: &AmplitudeMatrix, i_prime: u64, nu: f64) -> Result<f64> {
    let coeffs = MeasurementCoefficients::new(nu, amps.dim())?;
    amps.check_index(i_prime)?;
    let (a, b) = (coeffs.base, coeffs.boost);
    if amps.is_product() {
        let fourth = amps.row_fourth_moment(i_prime)?;
        Ok(amps.dim() as f64 * a * a + 2.0 * a * b + b * b * fourth)
    } else {
        Ok(amps
            .row(i_prime)?
            .iter()
            .map(|l| {
                let v = a + b * l * l;
                v * v
            })
            .sum())
    }
}

/// Outcome of one coin-toss attack trial.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackOutcome {
    /// Decoded message for the acting branch, `None` when nothing was done.
    pub decoded: Option<u64>,
    /// State handed back to the sealer, normalized.
    pub post_state: StateVector,
    /// Probability of this exact outcome under the strategy.
    pub branch_probability: f64,
    /// Whether the coin chose the honest-readout branch.
    pub acted: bool,
}

/// The coin-toss attack: with probability 1/2 perform the honest readout and
/// keep the collapsed state, otherwise do nothing and hand back the sealed
/// state untouched.
pub fn coin_toss_attack<R: Rng + ?Sized>(
    amps: &AmplitudeMatrix,
    i_prime: u64,
    rng: &mut R,
) -> Result<AttackOutcome> {
    let sealed = amps.sealed_state(i_prime)?;
    if !rng.gen_bool(0.5) {
        return Ok(AttackOutcome {
            decoded: None,
            post_state: sealed,
            branch_probability: 0.5,
            acted: false,
        });
    }
    // Honest readout: sample j with probability lambda(i', j)^2 and collapse.
    let u: f64 = rng.gen();
    let amplitudes = sealed.amplitudes();
    let mut acc = 0.0;
    let mut decoded = amplitudes.len() - 1;
    for (j, &a) in amplitudes.iter().enumerate() {
        acc += a * a;
        if u < acc {
            decoded = j;
            break;
        }
    }
    let p = amplitudes[decoded] * amplitudes[decoded];
    Ok(AttackOutcome {
        decoded: Some(decoded as u64),
        post_state: StateVector::basis(amplitudes.len(), decoded),
        branch_probability: 0.5 * p,
        acted: true,
    })
}

/// Probability that the coin-toss attack passes the projective verification:
/// 1/2 from the untouched branch plus half the honest-readout escape
/// probability. Always at least 1/2.
pub fn coin_toss_escape(amps: &AmplitudeMatrix, i_prime: u64) -> Result<f64> {
    Ok(0.5 + 0.5 * escape_probability(amps, i_prime, 1.0)?)
}
