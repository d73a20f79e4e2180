//! PAC range searching over stochastic arms placed on the real line.
//!
//! Each arm sits at a point and yields `[0, 1]^d`-valued rewards. Given a batch
//! of query intervals, the algorithms in [`range_search`] return, for every
//! interval at once and with probability `1 - delta`, an `eps`-optimal arm
//! (`d = 1`) or an `eps`-Pareto optimal set (any `d`). Sampling goes through
//! [`Bandit`], which never exposes true means; [`oracles`] reads them to verify
//! answers.

pub mod bandit;
pub mod error;
pub mod geometry;
pub mod hard_instances;
pub mod harness;
pub mod ledger;
pub mod model;
pub mod oracles;
pub mod range_search;
pub mod rng;
pub mod skyline;

pub use bandit::{Bandit, Estimate};
pub use error::{Error, Result};
pub use geometry::{build_slabs, min_hitting_set, HittingSet, Slab, SlabDecomposition};
pub use model::{Arm, ArmId, Instance, Interval, RewardDistribution, WeightVector};
pub use range_search::{solve, Algorithm, AnswerMode, AnswerSet, BestMethod};
pub use rng::ArmStreams;
pub use skyline::{d_lsky, d_rsky, Side, SkylineOutput};
