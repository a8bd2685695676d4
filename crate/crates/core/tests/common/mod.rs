#![allow(dead_code)]

use isoplace::*;
use proptest::prelude::*;

/// s0,s1 with two slots each; nodes 0..3 on s0, 3..5 on s1.
/// G0={0,1,2}, G1={0}, G2={3,4}, G3={1,2}.
pub fn contended() -> Instance {
    let topo = build_topology(&NetworkProfile::new("t", 2, 3, 2).unwrap());
    let g = |id, ns: &[u32]| {
        ApplicationGroup::new(GroupId(id), ns.iter().map(|&n| NodeId(n)).collect())
    };
    Instance::new(
        topo,
        vec![g(0, &[0, 1, 2]), g(1, &[0]), g(2, &[3, 4]), g(3, &[1, 2])],
        1,
    )
    .unwrap()
}

/// Per-switch load of `groups`, summed straight from the connection
/// indicator over every (node, switch) pair.
pub fn recount_loads(inst: &Instance, groups: &[GroupId]) -> Vec<u64> {
    let topo = &inst.topology;
    topo.switches()
        .iter()
        .map(|s| {
            groups
                .iter()
                .map(|g| {
                    inst.groups[g.index()]
                        .nodes
                        .iter()
                        .map(|&n| u64::from(topo.connected(n, s.id).unwrap()))
                        .sum::<u64>()
                        * inst.rule_cost
                })
                .sum()
        })
        .collect()
}

pub fn recount_feasible(inst: &Instance, groups: &[GroupId]) -> bool {
    recount_loads(inst, groups)
        .iter()
        .zip(inst.topology.switches())
        .all(|(&l, s)| l <= s.capacity)
}

/// Plain include/exclude enumeration over all 2^n subsets.
pub fn enumerate_optimum(inst: &Instance) -> usize {
    let n = inst.group_count();
    (0u32..1 << n)
        .filter_map(|mask| {
            let set: Vec<GroupId> = (0..n as u32)
                .filter(|i| mask >> i & 1 == 1)
                .map(GroupId)
                .collect();
            recount_feasible(inst, &set).then_some(set.len())
        })
        .max()
        .unwrap_or(0)
}

/// Admission with rollback over a given order, written out directly.
pub fn admit_reference(inst: &Instance, order: &[usize]) -> usize {
    let mut residual = inst.topology.capacities();
    let mut placed = 0;
    for &g in order {
        let load = recount_loads(inst, &[GroupId(g as u32)]);
        if load.iter().zip(&residual).all(|(l, r)| l <= r) {
            residual.iter_mut().zip(&load).for_each(|(r, l)| *r -= l);
            placed += 1;
        }
    }
    placed
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Random instance with up to `max_groups` groups, up to 6 switches and
/// capacity at most 10.
pub fn small_instance(max_groups: usize) -> impl Strategy<Value = Instance> {
    (
        1u32..=6,
        1u32..=4,
        0u64..=10,
        1u64..=2,
        0..=max_groups,
        any::<u64>(),
    )
        .prop_map(|(switches, nps, cap, rule_cost, groups, seed)| {
            let topo = build_topology(&NetworkProfile::new("small", switches, nps, cap).unwrap());
            let max = (switches * nps).min(6);
            let wl = WorkloadProfile::new("small", 1, max).unwrap();
            let gs = generate_groups(&topo, &wl, groups, seed).unwrap();
            Instance::new(topo, gs, rule_cost).unwrap()
        })
}

/// Residual equals capacity minus the recounted demand of the placed set.
pub fn conserves(inst: &Instance, res: &PlacementResult) -> bool {
    let loads = recount_loads(inst, &res.placed);
    res.capacity
        .iter()
        .zip(&res.residual)
        .zip(&loads)
        .all(|((c, r), l)| c - r == *l)
}

/// Greedy processing order is non-decreasing in switch-set size, ties by id.
pub fn sorted_by_switch_set(inst: &Instance, res: &PlacementResult) -> bool {
    let key = |g: &GroupId| {
        let set = inst.topology.switch_set(&inst.groups[g.index()]).unwrap();
        (set.len(), *g)
    };
    res.order.windows(2).all(|w| key(&w[0]) < key(&w[1]))
}
