//! Destination-based isolation rules and per-switch rule tables.

use std::fmt;
use std::net::Ipv4Addr;

use crate::error::{Error, Result};
use crate::net::{MacAddr, SwitchId, Topology};
use crate::placement::PlacementResult;
use crate::workload::{ApplicationGroup, GroupId, Instance};

/// Match on destination IP, rewrite the MAC and send out one port.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ForwardingRule {
    pub switch: SwitchId,
    pub group: GroupId,
    pub match_dst_ip: Ipv4Addr,
    pub action_set_mac: MacAddr,
    pub action_out_port: u16,
    /// Table slots this rule occupies.
    pub slots: u64,
}

/// How rule lines are written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RuleStyle {
    /// `IF IP = 10.0.0.1 THEN MAC <- 00:00:00:00:00:01, PORT <- 1`
    #[default]
    Ascii,
    /// Typeset listing form: `←` arrows and short MACs,
    /// `IF IP = 10.0.0.1 THEN MAC ← 00:00:00:01, PORT ← 1`.
    Listing,
}

impl ForwardingRule {
    pub fn render(&self, style: RuleStyle) -> String {
        let (arrow, mac) = match style {
            RuleStyle::Ascii => ("<-", self.action_set_mac.to_string()),
            RuleStyle::Listing => ("\u{2190}", self.action_set_mac.short()),
        };
        format!(
            "IF IP = {} THEN MAC {arrow} {mac}, PORT {arrow} {}",
            self.match_dst_ip, self.action_out_port
        )
    }
}

impl fmt::Display for ForwardingRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(RuleStyle::Ascii))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwitchRuleTable {
    pub switch: SwitchId,
    pub capacity: u64,
    pub rules: Vec<ForwardingRule>,
}

impl SwitchRuleTable {
    pub fn used(&self) -> u64 {
        self.rules.iter().map(|r| r.slots).sum()
    }

    pub fn render(&self, style: RuleStyle) -> String {
        let mut out = format!("# switch {}\n", self.switch);
        for r in &self.rules {
            out.push_str(&r.render(style));
            out.push('\n');
        }
        out
    }
}

/// One rule per group node, installed on the node's leaf switch.
pub fn synthesize_group_rules(
    topology: &Topology,
    group: &ApplicationGroup,
    rule_cost: u64,
) -> Result<Vec<ForwardingRule>> {
    group
        .nodes
        .iter()
        .map(|&id| {
            let n = topology.node(id)?;
            Ok(ForwardingRule {
                switch: n.attached_switch,
                group: group.id,
                match_dst_ip: n.ip,
                action_set_mac: n.mac,
                action_out_port: n.port,
                slots: rule_cost,
            })
        })
        .collect()
}

/// Rule tables holding exactly the rules of the placed groups.
///
/// Fails if a table overflows its switch, or if the placement conserves
/// capacity and its residuals disagree with the emitted tables.
pub fn materialize_tables(
    instance: &Instance,
    placement: &PlacementResult,
) -> Result<Vec<SwitchRuleTable>> {
    let topo = &instance.topology;
    let mut tables: Vec<SwitchRuleTable> = topo
        .switches()
        .iter()
        .map(|s| SwitchRuleTable {
            switch: s.id,
            capacity: s.capacity,
            rules: Vec::new(),
        })
        .collect();
    for &gid in &placement.placed {
        let group = instance
            .groups
            .get(gid.index())
            .ok_or(Error::UnknownGroup(gid))?;
        for rule in synthesize_group_rules(topo, group, instance.rule_cost)? {
            tables[rule.switch.index()].rules.push(rule);
        }
    }
    for t in &tables {
        let used = t.used();
        if used > t.capacity {
            return Err(Error::CapacityViolation {
                switch: t.switch,
                used,
                capacity: t.capacity,
            });
        }
        if placement.solver.conserves_capacity() {
            let accounted = placement
                .capacity
                .get(t.switch.index())
                .zip(placement.residual.get(t.switch.index()))
                .map(|(c, r)| c - r)
                .ok_or(Error::UnknownSwitch(t.switch))?;
            if accounted != used {
                return Err(Error::AccountingMismatch {
                    switch: t.switch,
                    used,
                    accounted,
                });
            }
        }
    }
    Ok(tables)
}

pub fn render_tables(tables: &[SwitchRuleTable], style: RuleStyle) -> String {
    tables.iter().map(|t| t.render(style)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{build_topology, NetworkProfile, NodeId};
    use crate::placement::{greedy_place, GreedyMode};

    #[test]
    fn four_node_switch_listing() {
        let topo = build_topology(&NetworkProfile::new("fig", 1, 4, 4).unwrap());
        let group = ApplicationGroup::new(GroupId(0), (0..4).map(NodeId).collect());
        let rules = synthesize_group_rules(&topo, &group, 1).unwrap();
        let lines: Vec<String> = rules.iter().map(|r| r.render(RuleStyle::Listing)).collect();
        assert_eq!(
            lines,
            [
                "IF IP = 10.0.0.1 THEN MAC ← 00:00:00:01, PORT ← 1",
                "IF IP = 10.0.0.2 THEN MAC ← 00:00:00:02, PORT ← 2",
                "IF IP = 10.0.0.3 THEN MAC ← 00:00:00:03, PORT ← 3",
                "IF IP = 10.0.0.4 THEN MAC ← 00:00:00:04, PORT ← 4",
            ]
        );
        assert_eq!(
            rules[1].to_string(),
            "IF IP = 10.0.0.2 THEN MAC <- 00:00:00:00:00:02, PORT <- 2"
        );
    }

    #[test]
    fn empty_group_has_no_rules() {
        let topo = build_topology(&NetworkProfile::new("t", 1, 2, 4).unwrap());
        let g = ApplicationGroup::new(GroupId(0), vec![]);
        assert!(synthesize_group_rules(&topo, &g, 1).unwrap().is_empty());
    }

    fn contended() -> Instance {
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

    #[test]
    fn tables_for_rollback_greedy() {
        let inst = contended();
        let placement = greedy_place(&inst, GreedyMode::ROLLBACK);
        let tables = materialize_tables(&inst, &placement).unwrap();
        assert_eq!(tables[0].rules.len(), 1);
        assert_eq!(tables[0].rules[0].match_dst_ip, Ipv4Addr::new(10, 0, 0, 1));
        let s1: Vec<_> = tables[1].rules.iter().map(|r| r.match_dst_ip).collect();
        assert_eq!(s1, [Ipv4Addr::new(10, 0, 0, 4), Ipv4Addr::new(10, 0, 0, 5)]);
        assert_eq!(
            render_tables(&tables, RuleStyle::Ascii),
            "# switch 0\nIF IP = 10.0.0.1 THEN MAC <- 00:00:00:00:00:01, PORT <- 1\n\
             # switch 1\nIF IP = 10.0.0.4 THEN MAC <- 00:00:00:00:00:04, PORT <- 1\n\
             IF IP = 10.0.0.5 THEN MAC <- 00:00:00:00:00:05, PORT <- 2\n"
        );
    }

    #[test]
    fn nothing_placed_means_empty_tables() {
        let inst = contended().with_uniform_capacity(0);
        let placement = greedy_place(&inst, GreedyMode::ROLLBACK);
        let tables = materialize_tables(&inst, &placement).unwrap();
        assert!(tables.iter().all(|t| t.rules.is_empty()));
    }

    #[test]
    fn overfull_placement_is_a_hard_error() {
        let inst = contended();
        let mut bogus = greedy_place(&inst, GreedyMode::ROLLBACK);
        bogus.placed = vec![GroupId(0), GroupId(1)];
        assert!(matches!(
            materialize_tables(&inst, &bogus),
            Err(Error::CapacityViolation { .. })
        ));
        let mut drifted = greedy_place(&inst, GreedyMode::ROLLBACK);
        drifted.residual[1] = 2;
        assert!(matches!(
            materialize_tables(&inst, &drifted),
            Err(Error::AccountingMismatch { .. })
        ));
    }

    #[test]
    fn faithful_results_skip_residual_check() {
        let inst = contended();
        let placement = greedy_place(&inst, GreedyMode::FAITHFUL);
        let tables = materialize_tables(&inst, &placement).unwrap();
        assert_eq!(tables[0].used(), 0);
        assert_eq!(tables[1].used(), 2);
    }
}
