//! The key-rate lower bound as a function of observed channel statistics.
//!
//! The chain is: the X-basis error rates give a lower bound `B` on
//! `Re⟨e_{0,0}^0|e_{1,3}^1⟩`; its capped square bounds the largest eigenvalue
//! of Eve's state conditioned on a correct, unflipped key bit; that bounds
//! `S(EC)` from above, and with the closed form for `S(BEC)` and the classical
//! `H(B|A)` it yields `rate = S(BEC) - S(EC) - H(B|A)` under reverse
//! reconciliation.

use crate::entropy::{binary_entropy_unchecked as h, entropy_unchecked as entropy};
use crate::error::{Error, Result};
use crate::stats::ChannelStatistics;

/// Everything computed on the way to the rate, for inspection and reporting.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KeyRateReport {
    /// Lower bound on `Re⟨e_{0,0}^0|e_{1,3}^1⟩`; may be negative.
    pub b: f64,
    /// `b²` if `b ≥ 0`, else zero.
    pub cal_b: f64,
    pub lambda_tilde: f64,
    /// Set when the raw `λ̃` exceeded one and was clamped (statistics no attack
    /// can produce).
    pub lambda_clamped: bool,
    pub s_bec: f64,
    pub s_ec_upper: f64,
    pub p_a0: f64,
    /// `p(b, a)` in the order `p(0,0), p(0,1), p(1,0), p(1,1)`.
    pub joint: [f64; 4],
    pub h_b_given_a: f64,
    pub rate: f64,
}

/// `λ̃` and whether it had to be clamped to one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LambdaTilde {
    pub value: f64,
    pub clamped: bool,
}

pub fn cross_overlap_lower_bound(stats: &ChannelStatistics) -> f64 {
    let p = |i, j, k| stats.p(i, j, k);
    let cross = |a: f64, b: f64| (a * b).sqrt();
    1.0 - stats.p_plus_minus()
        - stats.p_minus_plus()
        - cross(p(0, 0, 0), p(1, 0, 1))
        - cross(p(0, 1, 0), p(1, 0, 1))
        - cross(p(0, 1, 0), p(1, 1, 1))
        - cross(p(0, 0, 1), p(1, 0, 0))
        - cross(p(0, 0, 1), p(1, 1, 0))
        - cross(p(0, 1, 1), p(1, 0, 0))
        - cross(p(0, 1, 1), p(1, 1, 0))
}

/// A non-positive `b` carries no information about the overlap.
pub fn cap_cal_b(b: f64) -> f64 {
    if b >= 0.0 {
        b * b
    } else {
        0.0
    }
}

/// Upper bound on the larger normalized eigenvalue of Eve's state given a
/// correct, unflipped key bit.
pub fn lambda_tilde(p000: f64, p111: f64, cal_b: f64) -> Result<LambdaTilde> {
    if p000.is_nan() || p000 <= 0.0 {
        return Err(Error::TooMuchNoise { p000 });
    }
    let delta = p000 - p111;
    let raw = 0.5 + (delta * delta + 4.0 * cal_b).sqrt() / (2.0 * (p000 + p111));
    Ok(if raw > 1.0 {
        LambdaTilde {
            value: 1.0,
            clamped: true,
        }
    } else {
        LambdaTilde {
            value: raw,
            clamped: false,
        }
    })
}

/// `S(BEC)`: Shannon entropy of the eight halved `p_ijk`.
pub fn s_bec(stats: &ChannelStatistics) -> f64 {
    let halves: Vec<f64> = stats
        .z_table()
        .iter()
        .flatten()
        .flatten()
        .map(|p| 0.5 * p)
        .collect();
    entropy(&halves)
}

/// Weights `t_j / 2` of the four conditioning classes `(C,0), (C,1), (W,1), (W,2)`.
pub fn conditioning_weights(stats: &ChannelStatistics) -> [f64; 4] {
    let p = |i, j, k| stats.p(i, j, k);
    [
        0.5 * (p(0, 0, 0) + p(1, 1, 1)),
        0.5 * (p(1, 0, 0) + p(0, 1, 1)),
        0.5 * (p(0, 0, 1) + p(1, 1, 0)),
        0.5 * (p(1, 0, 1) + p(0, 1, 0)),
    ]
}

/// Upper bound on `S(EC)` given `λ̃`; classes other than `(C,0)` use the
/// qubit bound `S ≤ 1`. Empty classes drop out through `0 log 0 = 0`.
pub fn s_ec_upper(stats: &ChannelStatistics, lambda: f64) -> f64 {
    let w = conditioning_weights(stats);
    entropy(&w) + w[1] + w[2] + w[3] + w[0] * h(lambda)
}

/// `p_A(0)`: probability that Alice's raw key bit is zero.
pub fn p_alice_zero(stats: &ChannelStatistics) -> f64 {
    let p = |i, j, k| stats.p(i, j, k);
    0.5 * (p(0, 0, 0) + p(0, 1, 0) + p(1, 1, 0) + p(1, 0, 0))
}

/// `p(b, a)` for Bob's bit `b` and Alice's bit `a`, ordered `00, 01, 10, 11`.
pub fn joint_distribution(stats: &ChannelStatistics) -> [f64; 4] {
    let p = |i, j, k| stats.p(i, j, k);
    [
        0.5 * (p(0, 0, 0) + p(1, 0, 0)),
        0.5 * (p(0, 0, 1) + p(1, 0, 1)),
        0.5 * (p(0, 1, 0) + p(1, 1, 0)),
        0.5 * (p(0, 1, 1) + p(1, 1, 1)),
    ]
}

/// `H(B|A) = H(B, A) - H(A)`.
pub fn h_b_given_a(stats: &ChannelStatistics) -> f64 {
    entropy(&joint_distribution(stats)) - h(p_alice_zero(stats))
}

pub fn key_rate_bound(stats: &ChannelStatistics) -> Result<KeyRateReport> {
    let b = cross_overlap_lower_bound(stats);
    let cal_b = cap_cal_b(b);
    let lam = lambda_tilde(stats.p(0, 0, 0), stats.p(1, 1, 1), cal_b)?;
    let s_bec = s_bec(stats);
    let s_ec_upper = s_ec_upper(stats, lam.value);
    let p_a0 = p_alice_zero(stats);
    let joint = joint_distribution(stats);
    let h_joint = entropy(&joint);
    let h_a = h(p_a0);
    Ok(KeyRateReport {
        b,
        cal_b,
        lambda_tilde: lam.value,
        lambda_clamped: lam.clamped,
        s_bec,
        s_ec_upper,
        p_a0,
        joint,
        h_b_given_a: h_joint - h_a,
        rate: s_bec - s_ec_upper + h_a - h_joint,
    })
}
