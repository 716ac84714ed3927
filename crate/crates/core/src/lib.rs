//! Equilibrium analysis of coalitional General Lotto games with lossy budget
//! transfers.
//!
//! Two players each fight a separate General Lotto game against a common
//! adversary, who splits a single budget between the two fronts after
//! observing any transfer between the players. A transfer of `tau` units
//! from one player delivers only `beta * tau` to the other. This crate
//! computes:
//!
//! * equilibrium payoffs of a single Lotto game ([`lotto`]),
//! * the adversary's optimal split of its budget ([`adversary`]),
//! * payoffs as a function of the transfer, the set of mutually beneficial
//!   transfers and the alliance-optimal transfer ([`transfer`]),
//! * a brute-force grid oracle that checks every closed form ([`oracle`]),
//! * parameter rasters, payoff curves and efficiency sweeps ([`sweep`]).
//!
//! The `lotto-alliance` binary exposes all of it on the command line
//! ([`cli`]).
//!
//! ```
//! use lotto_alliance::{analyze, GameParams};
//!
//! let game = GameParams::new(1.0, 1.2, 0.5, 1.5).unwrap();
//! let report = analyze(&game, 1.0).unwrap();
//! assert!(report.mb_exists);
//! assert!(report.alliance_tau < 0.0);
//! ```

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adversary;
pub mod cli;
mod error;
pub mod lotto;
pub mod oracle;
pub mod sweep;
pub mod transfer;

pub use adversary::{AdversaryResponse, CaseLabel, GameParams, Orientation};
pub use error::{Error, Result};
pub use lotto::LottoInstance;
pub use transfer::{analyze, PayoffProfile, Transfer, TransferAnalysis};

/// Library version, echoed in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
