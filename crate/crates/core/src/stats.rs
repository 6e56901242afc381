//! The ten observables Alice and Bob estimate during parameter estimation.

use crate::error::{Error, Result};

/// Per-preparation blocks must sum to one within this tolerance.
pub const BLOCK_SUM_TOL: f64 = 1e-6;
const ENTRY_TOL: f64 = 1e-9;

/// `p[i][j][k]`: probability that, given Alice sent `|i⟩`, Bob measured `|j⟩`
/// and Alice then measured `|k⟩` (Bob measured and resent).
///
/// `p_plus_minus`: probability Alice measures `|−⟩` after sending `|+⟩` while
/// Bob reflected; `p_minus_plus` the reverse.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelStatistics {
    z: [[[f64; 2]; 2]; 2],
    p_plus_minus: f64,
    p_minus_plus: f64,
}

impl ChannelStatistics {
    /// Validates entries in `[0, 1]` and that each `i` block sums to one.
    pub fn new(z: [[[f64; 2]; 2]; 2], p_plus_minus: f64, p_minus_plus: f64) -> Result<Self> {
        let stats = Self::checked_entries(z, p_plus_minus, p_minus_plus)?;
        for i in 0..2 {
            let sum = stats.block_sum(i);
            if (sum - 1.0).abs() > BLOCK_SUM_TOL {
                return Err(Error::InvalidStatistics(format!(
                    "entries p{i}jk sum to {sum}, expected 1"
                )));
            }
        }
        Ok(stats)
    }

    /// Like [`ChannelStatistics::new`] but rescales each `i` block to sum to one.
    pub fn normalized(
        mut z: [[[f64; 2]; 2]; 2],
        p_plus_minus: f64,
        p_minus_plus: f64,
    ) -> Result<Self> {
        Self::checked_entries(z, p_plus_minus, p_minus_plus)?;
        for (i, block) in z.iter_mut().enumerate() {
            let sum: f64 = block.iter().flatten().map(|p| p.max(0.0)).sum();
            if sum <= 0.0 {
                return Err(Error::InvalidStatistics(format!(
                    "entries p{i}jk are all zero and cannot be normalized"
                )));
            }
            for p in block.iter_mut().flatten() {
                *p = p.max(0.0) / sum;
            }
        }
        Self::new(z, p_plus_minus, p_minus_plus)
    }

    /// No validation; for values that are correct by construction.
    pub(crate) fn from_raw(z: [[[f64; 2]; 2]; 2], p_plus_minus: f64, p_minus_plus: f64) -> Self {
        Self {
            z,
            p_plus_minus,
            p_minus_plus,
        }
    }

    fn checked_entries(
        z: [[[f64; 2]; 2]; 2],
        p_plus_minus: f64,
        p_minus_plus: f64,
    ) -> Result<Self> {
        let in_range = |p: f64| p.is_finite() && (-ENTRY_TOL..=1.0 + ENTRY_TOL).contains(&p);
        for (i, block) in z.iter().enumerate() {
            for (j, row) in block.iter().enumerate() {
                for (k, &p) in row.iter().enumerate() {
                    if !in_range(p) {
                        return Err(Error::InvalidStatistics(format!(
                            "p{i}{j}{k} = {p} is not a probability"
                        )));
                    }
                }
            }
        }
        for (name, p) in [
            ("p_plus_minus", p_plus_minus),
            ("p_minus_plus", p_minus_plus),
        ] {
            if !in_range(p) {
                return Err(Error::InvalidStatistics(format!(
                    "{name} = {p} is not a probability"
                )));
            }
        }
        let clamp = |p: f64| p.clamp(0.0, 1.0);
        Ok(Self {
            z: z.map(|b| b.map(|r| r.map(clamp))),
            p_plus_minus: clamp(p_plus_minus),
            p_minus_plus: clamp(p_minus_plus),
        })
    }

    /// The zero-noise channel: `p000 = p111 = 1`, everything else zero.
    pub fn noiseless() -> Self {
        let mut z = [[[0.0; 2]; 2]; 2];
        z[0][0][0] = 1.0;
        z[1][1][1] = 1.0;
        Self::from_raw(z, 0.0, 0.0)
    }

    pub fn p(&self, i: usize, j: usize, k: usize) -> f64 {
        self.z[i][j][k]
    }

    pub fn z_table(&self) -> &[[[f64; 2]; 2]; 2] {
        &self.z
    }

    pub fn p_plus_minus(&self) -> f64 {
        self.p_plus_minus
    }

    pub fn p_minus_plus(&self) -> f64 {
        self.p_minus_plus
    }

    pub fn block_sum(&self, i: usize) -> f64 {
        self.z[i].iter().flatten().sum()
    }

    /// All ten values in file order: `p000..p111, p_plus_minus, p_minus_plus`.
    pub fn to_array(&self) -> [f64; 10] {
        let mut out = [0.0; 10];
        for (n, p) in self.z.iter().flatten().flatten().enumerate() {
            out[n] = *p;
        }
        out[8] = self.p_plus_minus;
        out[9] = self.p_minus_plus;
        out
    }

    pub(crate) fn from_array_raw(values: [f64; 10]) -> Self {
        let mut z = [[[0.0; 2]; 2]; 2];
        for (n, p) in z.iter_mut().flatten().flatten().enumerate() {
            *p = values[n];
        }
        Self::from_raw(z, values[8], values[9])
    }
}
