//! Symmetric-attack scenarios: statistics from flip probabilities, noise
//! thresholds and key-rate curves.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::keyrate::key_rate_bound;
use crate::stats::ChannelStatistics;

/// Grid spacing of the bracketing scan in [`noise_threshold`].
pub const THRESHOLD_SCAN_STEP: f64 = 1e-3;
/// Bisection stops once the bracket is narrower than this.
pub const THRESHOLD_TOLERANCE: f64 = 1e-6;
/// Upper end of the threshold search.
pub const THRESHOLD_Q_MAX: f64 = 0.25;

/// Flip probabilities of a symmetric attack.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScenarioParams {
    /// Probability that `|i⟩` sent by Alice arrives at Bob as `|1-i⟩`.
    pub q_forward: f64,
    /// Probability that `|i⟩` resent by Bob arrives at Alice as `|1-i⟩`.
    pub q_reverse: f64,
    /// `p_{+-} = p_{-+}`.
    pub q_x: f64,
}

impl ScenarioParams {
    pub fn new(q_forward: f64, q_reverse: f64, q_x: f64) -> Result<Self> {
        for (name, q) in [("Qf", q_forward), ("Qr", q_reverse), ("Qx", q_x)] {
            if !(0.0..=0.5).contains(&q) {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {q} outside [0, 1/2]"
                )));
            }
        }
        Ok(Self {
            q_forward,
            q_reverse,
            q_x,
        })
    }
}

/// Statistics of independent forward and reverse flips.
pub fn symmetric_stats(params: ScenarioParams) -> ChannelStatistics {
    let (f, r) = (params.q_forward, params.q_reverse);
    let same = (1.0 - f) * (1.0 - r);
    let reverse_only = (1.0 - f) * r;
    let both = f * r;
    let forward_only = f * (1.0 - r);
    let z = [
        [[same, reverse_only], [both, forward_only]],
        [[forward_only, both], [reverse_only, same]],
    ];
    ChannelStatistics::from_raw(z, params.q_x, params.q_x)
}

/// How the forward and reverse flip rates scale with the noise level `Q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scenario {
    /// `Qf = Qr = Q`.
    Equal,
    /// `Qf = Q/2`, `Qr = Q`.
    ForwardHalf,
    /// `Qf = Q`, `Qr = Q/2`.
    ReverseHalf,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [
        Scenario::Equal,
        Scenario::ForwardHalf,
        Scenario::ReverseHalf,
    ];

    /// Parameters at noise level `q` with `Qx = qx_ratio * q`.
    pub fn params(self, q: f64, qx_ratio: f64) -> Result<ScenarioParams> {
        let (f, r) = match self {
            Scenario::Equal => (q, q),
            Scenario::ForwardHalf => (q / 2.0, q),
            Scenario::ReverseHalf => (q, q / 2.0),
        };
        ScenarioParams::new(f, r, qx_ratio * q)
    }

    pub fn rate_at(self, q: f64, qx_ratio: f64) -> Result<f64> {
        Ok(key_rate_bound(&symmetric_stats(self.params(q, qx_ratio)?))?.rate)
    }

    pub fn tag(self) -> &'static str {
        match self {
            Scenario::Equal => "equal",
            Scenario::ForwardHalf => "fwd-half",
            Scenario::ReverseHalf => "rev-half",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.tag() == s)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown scenario '{s}' (expected equal, fwd-half or rev-half)"
                ))
            })
    }
}

/// Largest `Q` in `[0, 0.25]` with a positive key-rate bound.
///
/// Scans the whole interval on a `1e-3` grid, takes the last grid point with a
/// positive rate, and bisects between it and its right neighbour. The search
/// range shrinks when `qx_ratio > 2` so that `Qx` stays a probability.
pub fn noise_threshold(scenario: Scenario, qx_ratio: f64) -> Result<f64> {
    if !(qx_ratio.is_finite() && qx_ratio > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Qx ratio must be positive, got {qx_ratio}"
        )));
    }
    let q_max = THRESHOLD_Q_MAX.min(0.5 / qx_ratio);
    let positive = |q: f64| -> Result<bool> {
        match scenario.rate_at(q, qx_ratio) {
            Ok(r) => Ok(r > 0.0),
            Err(Error::TooMuchNoise { .. }) => Ok(false),
            Err(e) => Err(e),
        }
    };
    if !positive(0.0)? {
        return Err(Error::InvalidParameter(
            "key rate is not positive even without noise".into(),
        ));
    }

    let steps = (q_max / THRESHOLD_SCAN_STEP).ceil() as usize;
    let grid = |n: usize| (n as f64 * THRESHOLD_SCAN_STEP).min(q_max);
    let mut last_positive = 0;
    for n in 1..=steps {
        if positive(grid(n))? {
            last_positive = n;
        }
    }
    if last_positive == steps {
        return Ok(q_max);
    }

    let (mut lo, mut hi) = (grid(last_positive), grid(last_positive + 1));
    while hi - lo > THRESHOLD_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if positive(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepPoint {
    pub q: f64,
    pub rate: f64,
}

/// Key-rate bound on `steps` evenly spaced noise levels in `[0, q_max]`.
pub fn sweep(
    scenario: Scenario,
    qx_ratio: f64,
    q_max: f64,
    steps: usize,
) -> Result<Vec<SweepPoint>> {
    if steps < 2 {
        return Err(Error::InvalidParameter(format!(
            "a sweep needs at least 2 points, got {steps}"
        )));
    }
    if !(q_max.is_finite() && q_max > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "q_max must be positive, got {q_max}"
        )));
    }
    (0..steps)
        .map(|n| {
            let q = q_max * n as f64 / (steps - 1) as f64;
            Ok(SweepPoint {
                q,
                rate: scenario.rate_at(q, qx_ratio)?,
            })
        })
        .collect()
}
