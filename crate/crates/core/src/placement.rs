//! Capacity-constrained selection of application groups whose isolation
//! rules fit in the leaf switches.

use std::fmt;

use crate::error::Result;
use crate::net::SwitchId;
use crate::oracle;
use crate::rng::Rng;
use crate::workload::{ApplicationGroup, GroupId, Instance};

/// Whether a group that fails midway gives back the slots it already took.
///
/// The printed greedy procedure never restores them (`rollback = false`),
/// which strands capacity; `rollback = true` keeps residual accounting equal
/// to the demand of the accepted groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GreedyMode {
    pub rollback: bool,
}

impl GreedyMode {
    pub const ROLLBACK: GreedyMode = GreedyMode { rollback: true };
    pub const FAITHFUL: GreedyMode = GreedyMode { rollback: false };
}

impl Default for GreedyMode {
    fn default() -> Self {
        GreedyMode::ROLLBACK
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Solver {
    Greedy(GreedyMode),
    Random { seed: u64 },
    Oracle { bound: usize },
}

impl Solver {
    pub fn solve(&self, instance: &Instance) -> Result<PlacementResult> {
        match *self {
            Solver::Greedy(mode) => Ok(greedy_place(instance, mode)),
            Solver::Random { seed } => Ok(random_place(instance, seed)),
            Solver::Oracle { bound } => oracle::oracle_place(instance, bound),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Solver::Greedy(GreedyMode { rollback: true }) => "greedy-rollback",
            Solver::Greedy(GreedyMode { rollback: false }) => "greedy-faithful",
            Solver::Random { .. } => "random",
            Solver::Oracle { .. } => "oracle",
        }
    }

    /// Whether residual capacity always equals capacity minus the demand
    /// of the placed groups.
    pub fn conserves_capacity(&self) -> bool {
        !matches!(self, Solver::Greedy(GreedyMode { rollback: false }))
    }
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A group left out of the placement. `switch` is the first switch that
/// ran out of slots, when the solver admits groups one node at a time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rejection {
    pub group: GroupId,
    pub switch: Option<SwitchId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacementResult {
    pub solver: Solver,
    /// Accepted groups, ascending.
    pub placed: Vec<GroupId>,
    /// Rejected groups in processing order.
    pub rejected: Vec<Rejection>,
    /// Order in which groups were considered.
    pub order: Vec<GroupId>,
    pub capacity: Vec<u64>,
    pub residual: Vec<u64>,
}

impl PlacementResult {
    pub fn supported(&self) -> usize {
        self.placed.len()
    }

    pub fn offered(&self) -> usize {
        self.placed.len() + self.rejected.len()
    }

    pub fn used(&self, switch: SwitchId) -> u64 {
        self.capacity[switch.index()] - self.residual[switch.index()]
    }

    /// Text report: `placed=<k>/<n>` header, the solver, one line per
    /// switch and the placed / rejected id lists (`<group>@<switch>`).
    pub fn to_report(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let _ = writeln!(out, "placed={}/{}", self.supported(), self.offered());
        let _ = writeln!(out, "solver={}", self.solver);
        for (i, (&c, &r)) in self.capacity.iter().zip(&self.residual).enumerate() {
            let _ = writeln!(out, "switch={i} used={} capacity={c}", c - r);
        }
        let placed: Vec<String> = self.placed.iter().map(|g| g.to_string()).collect();
        let _ = writeln!(out, "placed_groups={}", placed.join(","));
        let rejected: Vec<String> = self
            .rejected
            .iter()
            .map(|r| match r.switch {
                Some(s) => format!("{}@{}", r.group, s),
                None => r.group.to_string(),
            })
            .collect();
        let _ = writeln!(out, "rejected_groups={}", rejected.join(","));
        out
    }
}

/// Slots `group` needs on `switch`: rule cost times the number of its
/// nodes attached there.
pub fn group_cost_on_switch(
    instance: &Instance,
    group: &ApplicationGroup,
    switch: SwitchId,
) -> u64 {
    let attached = group
        .nodes
        .iter()
        .filter(|&&n| instance.topology.attachment(n) == switch)
        .count() as u64;
    instance.rule_cost * attached
}

fn demand(instance: &Instance, groups: impl IntoIterator<Item = GroupId>) -> Vec<u64> {
    let mut load = vec![0u64; instance.topology.switch_count()];
    for g in groups {
        for &n in &instance.groups[g.index()].nodes {
            load[instance.topology.attachment(n).index()] += instance.rule_cost;
        }
    }
    load
}

/// True iff placing every candidate group keeps all switches within capacity.
pub fn is_feasible(instance: &Instance, candidates: &[GroupId]) -> bool {
    demand(instance, candidates.iter().copied())
        .iter()
        .zip(instance.topology.switches())
        .all(|(&load, s)| load <= s.capacity)
}

/// Total demand of all offered groups minus capacity, per switch. Positive
/// entries mean that switch cannot hold every group.
pub fn capacity_shortfall(instance: &Instance) -> Vec<i128> {
    demand(instance, instance.groups.iter().map(|g| g.id))
        .iter()
        .zip(instance.topology.switches())
        .map(|(&load, s)| i128::from(load) - i128::from(s.capacity))
        .collect()
}

/// Greedy placement: groups in ascending switch-set size (ties by id), each
/// node charging `rule_cost` to its switch until a switch runs short.
pub fn greedy_place(instance: &Instance, mode: GreedyMode) -> PlacementResult {
    let mut keyed: Vec<(usize, GroupId)> = instance
        .groups
        .iter()
        .map(|g| {
            let s = instance
                .topology
                .switch_set_of(&g.nodes)
                .expect("instance groups are validated");
            (s.len(), g.id)
        })
        .collect();
    keyed.sort_unstable();
    let order = keyed.into_iter().map(|(_, g)| g).collect();
    admit_in_order(instance, order, mode.rollback, Solver::Greedy(mode))
}

/// Baseline: the rollback admission procedure over a seeded uniform
/// permutation of the groups.
pub fn random_place(instance: &Instance, seed: u64) -> PlacementResult {
    let mut order: Vec<GroupId> = instance.groups.iter().map(|g| g.id).collect();
    Rng::new(seed).shuffle(&mut order);
    admit_in_order(instance, order, true, Solver::Random { seed })
}

fn admit_in_order(
    instance: &Instance,
    order: Vec<GroupId>,
    rollback: bool,
    solver: Solver,
) -> PlacementResult {
    let topo = &instance.topology;
    let r = instance.rule_cost;
    let capacity = topo.capacities();
    let mut residual = capacity.clone();
    let mut placed = Vec::new();
    let mut rejected = Vec::new();
    let mut taken: Vec<usize> = Vec::new();

    for &gid in &order {
        taken.clear();
        let mut failed_at = None;
        // Each node is attached to exactly one leaf switch, so the scan over
        // the group's switch set reduces to that switch.
        for &n in &instance.groups[gid.index()].nodes {
            let s = topo.attachment(n).index();
            if residual[s] >= r {
                residual[s] -= r;
                taken.push(s);
            } else {
                failed_at = Some(SwitchId(s as u32));
                break;
            }
        }
        match failed_at {
            None => placed.push(gid),
            Some(switch) => {
                if rollback {
                    for &s in &taken {
                        residual[s] += r;
                    }
                }
                rejected.push(Rejection {
                    group: gid,
                    switch: Some(switch),
                });
            }
        }
    }
    placed.sort_unstable();
    PlacementResult {
        solver,
        placed,
        rejected,
        order,
        capacity,
        residual,
    }
}
