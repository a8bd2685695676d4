//! Switch-capacity-constrained placement of isolation rules for MapReduce
//! application groups on leaf-switch networks.
//!
//! Every application gets one destination-based forwarding rule per node on
//! that node's leaf switch. Switches hold a bounded number of rule slots, so
//! only some applications can be isolated in hardware; the solvers here pick
//! which ones.

pub mod error;
pub mod experiment;
pub mod manager;
pub mod net;
pub mod oracle;
pub mod placement;
pub mod rng;
pub mod rules;
mod text;
pub mod workload;

pub use error::{Error, Result};
pub use net::{build_topology, MacAddr, NetworkProfile, Node, NodeId, Switch, SwitchId, Topology};
pub use placement::{
    capacity_shortfall, greedy_place, group_cost_on_switch, is_feasible, random_place, GreedyMode,
    PlacementResult, Rejection, Solver,
};
pub use workload::{generate_groups, ApplicationGroup, GroupId, Instance, WorkloadProfile};
