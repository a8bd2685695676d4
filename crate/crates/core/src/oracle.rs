//! Exact maximum placement by exhaustive subset search.
//!
//! Kept independent of the admission loop in `placement`: demands are
//! tallied per group up front and subsets are explored depth-first with
//! include/exclude branching, pruning branches that overflow a switch or
//! cannot beat the incumbent.

use crate::error::{Error, Result};
use crate::placement::{PlacementResult, Rejection, Solver};
use crate::workload::{GroupId, Instance};

pub const DEFAULT_BOUND: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Optimum {
    pub size: usize,
    /// One maximum feasible set, ascending.
    pub witness: Vec<GroupId>,
}

struct Search<'a> {
    demands: &'a [Vec<(usize, u64)>],
    residual: Vec<u64>,
    current: Vec<usize>,
    best: Vec<usize>,
}

impl Search<'_> {
    fn run(&mut self, next: usize) {
        let remaining = self.demands.len() - next;
        if self.current.len() + remaining <= self.best.len() {
            return;
        }
        if next == self.demands.len() {
            self.best = self.current.clone();
            return;
        }
        let d = &self.demands[next];
        if d.iter().all(|&(s, c)| self.residual[s] >= c) {
            for &(s, c) in d {
                self.residual[s] -= c;
            }
            self.current.push(next);
            self.run(next + 1);
            self.current.pop();
            for &(s, c) in d {
                self.residual[s] += c;
            }
        }
        self.run(next + 1);
    }
}

/// Largest feasible set of groups. Refuses instances with more than
/// `bound` groups.
pub fn brute_force_optimum(instance: &Instance, bound: usize) -> Result<Optimum> {
    let n = instance.group_count();
    if n > bound {
        return Err(Error::OracleTooLarge { groups: n, bound });
    }
    let topo = &instance.topology;
    let demands: Vec<Vec<(usize, u64)>> = instance
        .groups
        .iter()
        .map(|g| {
            let mut per_switch = vec![0u64; topo.switch_count()];
            for &node in &g.nodes {
                per_switch[topo.attachment(node).index()] += instance.rule_cost;
            }
            per_switch
                .into_iter()
                .enumerate()
                .filter(|&(_, c)| c > 0)
                .collect()
        })
        .collect();
    let mut search = Search {
        demands: &demands,
        residual: topo.capacities(),
        current: Vec::new(),
        best: Vec::new(),
    };
    search.run(0);
    let witness: Vec<GroupId> = search.best.iter().map(|&i| GroupId(i as u32)).collect();
    Ok(Optimum {
        size: witness.len(),
        witness,
    })
}

/// The oracle's witness packaged as a placement result.
pub fn oracle_place(instance: &Instance, bound: usize) -> Result<PlacementResult> {
    let opt = brute_force_optimum(instance, bound)?;
    let topo = &instance.topology;
    let capacity = topo.capacities();
    let mut residual = capacity.clone();
    for g in &opt.witness {
        for &n in &instance.groups[g.index()].nodes {
            residual[topo.attachment(n).index()] -= instance.rule_cost;
        }
    }
    let rejected = instance
        .groups
        .iter()
        .filter(|g| opt.witness.binary_search(&g.id).is_err())
        .map(|g| Rejection {
            group: g.id,
            switch: None,
        })
        .collect();
    Ok(PlacementResult {
        solver: Solver::Oracle { bound },
        placed: opt.witness,
        rejected,
        order: instance.groups.iter().map(|g| g.id).collect(),
        capacity,
        residual,
    })
}
