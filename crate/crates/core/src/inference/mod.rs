//! Minimizers for [`EnergyModel`](crate::mrf::EnergyModel): exact graph cuts,
//! min-sum loopy belief propagation and an exhaustive oracle for tiny grids.

mod brute;
pub mod flow;
mod graphcut;
mod lbp;

pub use brute::{brute_force, MAX_BRUTE_FORCE_PIXELS};
pub use flow::{FlowNetwork, FlowStats};
pub use graphcut::{build_network, graphcut_with_stats, solve_graphcut};
pub use lbp::{lbp_with_stats, solve_lbp, LbpConfig, LbpStats};
