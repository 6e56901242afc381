//! Checks a single attack against every property the key-rate bound relies on.

use crate::attack::CollectiveAttack;
use crate::entropy::von_neumann_entropy;
use crate::error::{Error, Result};
use crate::keyrate::{cross_overlap_lower_bound, key_rate_bound, s_bec};

pub const IDENTITY_TOL: f64 = 1e-9;
pub const PSD_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const ENTROPY_TOL: f64 = 1e-9;
pub const SOUNDNESS_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct AttackAudit {
    pub identity_residual: f64,
    pub min_eigenvalue: f64,
    pub trace_deviation: f64,
    /// `|s_bec(stats) - S(ρ_BEC)|`, or `None` when `ρ_BEC` is not a density operator.
    pub s_bec_gap: Option<f64>,
    /// `Re⟨e000|e131⟩ - B`; never below `-SOUNDNESS_TOL` for a genuine attack.
    pub overlap_margin: f64,
    pub exact_rate: Option<f64>,
    /// `None` when the statistics abort (`p000 = 0`).
    pub bound: Option<f64>,
}

impl AttackAudit {
    /// `exact - bound` when both exist.
    pub fn slack(&self) -> Option<f64> {
        Some(self.exact_rate? - self.bound?)
    }

    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.identity_residual > IDENTITY_TOL {
            v.push(format!(
                "ancilla-vector identities violated (residual {:e})",
                self.identity_residual
            ));
        }
        if self.min_eigenvalue < -PSD_TOL {
            v.push(format!(
                "post-protocol state not PSD (eigenvalue {:e})",
                self.min_eigenvalue
            ));
        }
        if self.trace_deviation > TRACE_TOL {
            v.push(format!(
                "post-protocol state trace off by {:e}",
                self.trace_deviation
            ));
        }
        match self.s_bec_gap {
            Some(gap) if gap > ENTROPY_TOL => v.push(format!("S(BEC) closed form off by {gap:e}")),
            None => v.push("S(BEC) could not be evaluated".into()),
            _ => {}
        }
        if self.overlap_margin < -SOUNDNESS_TOL {
            v.push(format!(
                "overlap below its X-basis bound by {:e}",
                -self.overlap_margin
            ));
        }
        if self.exact_rate.is_none() {
            v.push("exact collective rate could not be evaluated".into());
        }
        if let Some(slack) = self.slack() {
            if slack < -SOUNDNESS_TOL {
                v.push(format!("bound exceeds exact rate by {:e}", -slack));
            }
        }
        v
    }
}

pub fn audit(attack: &CollectiveAttack) -> Result<AttackAudit> {
    let stats = attack.statistics();
    let hygiene = attack.state_hygiene()?;
    let s_bec_gap = von_neumann_entropy(&attack.rho_bec())
        .ok()
        .map(|s| (s - s_bec(&stats)).abs());
    let bound = match key_rate_bound(&stats) {
        Ok(r) => Some(r.rate),
        Err(Error::TooMuchNoise { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(AttackAudit {
        identity_residual: attack.identity_residuals().max(),
        min_eigenvalue: hygiene.min_eigenvalue,
        trace_deviation: hygiene.trace_deviation,
        s_bec_gap,
        overlap_margin: attack.overlap_e000_e131().re - cross_overlap_lower_bound(&stats),
        exact_rate: attack.exact_collective_rate().ok(),
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ComplexOperator;

    #[test]
    fn identity_is_tight() {
        let a = audit(&CollectiveAttack::identity(2)).unwrap();
        assert!(a.violations().is_empty(), "{:?}", a.violations());
        assert!(a.slack().unwrap().abs() < 1e-12);
    }

    #[test]
    fn corrupted_attack_is_flagged() {
        let bad = CollectiveAttack::new_unchecked(
            ComplexOperator::identity(4).scale(1.01),
            ComplexOperator::identity(4),
            2,
        );
        assert!(!audit(&bad).unwrap().violations().is_empty());
    }
}
