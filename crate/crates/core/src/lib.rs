//! Key-rate analysis for the semi-quantum measure-resend protocol.
//!
//! Alice holds a full quantum device; Bob can only measure and resend in the
//! computational basis or reflect the qubit back untouched. Given the observed
//! channel statistics, [`keyrate::key_rate_bound`] returns a lower bound on the
//! asymptotic secret-key rate against collective attacks, under one-way reverse
//! reconciliation.
//!
//! The crate also models explicit collective attacks ([`attack`]), simulates
//! the quantum stage of the protocol ([`simulator`]), and finds the noise
//! tolerance of symmetric attack scenarios ([`scenario`]).
//!
//! ```
//! use sqkd::scenario::{symmetric_stats, ScenarioParams};
//! use sqkd::keyrate::key_rate_bound;
//!
//! let stats = symmetric_stats(ScenarioParams::new(0.03, 0.03, 0.03).unwrap());
//! let report = key_rate_bound(&stats).unwrap();
//! assert!(report.rate > 0.3 && report.rate < 0.35);
//! ```

pub mod attack;
pub mod cli;
pub mod entropy;
pub mod error;
pub mod keyrate;
pub mod linalg;
pub mod random;
pub mod scenario;
pub mod simulator;
pub mod stats;
pub mod statsfile;
pub mod validation;

pub use attack::CollectiveAttack;
pub use error::{Error, Result};
pub use keyrate::{key_rate_bound, KeyRateReport};
pub use stats::ChannelStatistics;
