//! Shannon and von Neumann entropies, all in bits.

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, ComplexOperator};

/// Entries down to this value are treated as rounding noise and clamped to zero.
pub const NEGATIVE_PROBABILITY_TOL: f64 = 1e-12;
/// Allowed excess of total probability mass over its nominal value.
pub const MASS_TOL: f64 = 1e-9;
/// Eigenvalues in `[-EIGENVALUE_CLAMP_TOL, 0)` are clamped to zero.
pub const EIGENVALUE_CLAMP_TOL: f64 = 1e-10;
/// Allowed deviation of a density operator's trace from one.
pub const TRACE_TOL: f64 = 1e-9;

fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

/// Shannon entropy without validation; negatives are treated as zero.
pub(crate) fn entropy_unchecked(p: &[f64]) -> f64 {
    p.iter().map(|&x| plogp(x.max(0.0))).sum::<f64>().max(0.0)
}

pub(crate) fn binary_entropy_unchecked(p: f64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    plogp(p) + plogp(1.0 - p)
}

/// `H(p_1, ..., p_n) = -Σ p_i log2 p_i`, with `0 log 0 = 0`.
/// Sub-normalized inputs are accepted.
pub fn shannon_entropy(p: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    let mut h = 0.0;
    for (index, &value) in p.iter().enumerate() {
        if value < -NEGATIVE_PROBABILITY_TOL || value.is_nan() {
            return Err(Error::NegativeProbability { index, value });
        }
        let value = value.max(0.0);
        total += value;
        h += plogp(value);
    }
    if total > 1.0 + MASS_TOL {
        return Err(Error::ProbabilityMassExceeded {
            total,
            limit: 1.0 + MASS_TOL,
        });
    }
    Ok(h.max(0.0))
}

/// `h(p) = H(p, 1 - p)`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(-NEGATIVE_PROBABILITY_TOL..=1.0 + NEGATIVE_PROBABILITY_TOL).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "binary entropy argument {p} outside [0, 1]"
        )));
    }
    let p = p.clamp(0.0, 1.0);
    Ok(plogp(p) + plogp(1.0 - p))
}

/// Eigenvalues of a positive semi-definite operator with tiny negatives clamped.
pub(crate) fn clamped_spectrum(rho: &ComplexOperator) -> Result<Vec<f64>> {
    let mut values = hermitian_eigenvalues(rho)?;
    for v in &mut values {
        if *v < -EIGENVALUE_CLAMP_TOL {
            return Err(Error::NegativeEigenvalue { value: *v });
        }
        *v = v.max(0.0);
    }
    Ok(values)
}

/// `S(ρ) = -Σ λ_i log2 λ_i` over the (clamped) spectrum of a density operator.
pub fn von_neumann_entropy(rho: &ComplexOperator) -> Result<f64> {
    let trace = rho.trace().re;
    if (trace - 1.0).abs() > TRACE_TOL {
        return Err(Error::TraceMismatch {
            trace,
            expected: 1.0,
        });
    }
    let spectrum = clamped_spectrum(rho)?;
    Ok(spectrum.into_iter().map(plogp).sum::<f64>().max(0.0))
}

/// Entropy of `Σ_j p_j |j⟩⟨j| ⊗ σ_j` computed blockwise as
/// `H(p_1, ..., p_n) + Σ_j p_j S(σ_j)`.
///
/// Blocks with zero weight are skipped entirely and may be arbitrary.
pub fn block_diag_entropy(weights: &[f64], blocks: &[ComplexOperator]) -> Result<f64> {
    if weights.len() != blocks.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} weights for {} blocks",
            weights.len(),
            blocks.len()
        )));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > MASS_TOL {
        return Err(Error::InvalidParameter(format!(
            "block weights sum to {total}, not 1"
        )));
    }
    let mut entropy = shannon_entropy(weights)?;
    for (&w, block) in weights.iter().zip(blocks) {
        if w <= 0.0 {
            continue;
        }
        entropy += w * von_neumann_entropy(block)?;
    }
    Ok(entropy)
}
