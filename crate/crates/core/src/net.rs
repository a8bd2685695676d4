//! Leaf-switch network model: switches with rule capacity, nodes attached to
//! exactly one switch, and the node/switch connection indicator.

use std::collections::HashSet;
use std::fmt;
use std::net::Ipv4Addr;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::text;
use crate::workload::ApplicationGroup;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SwitchId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl SwitchId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for SwitchId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for NodeId {
    type Err = std::num::ParseIntError;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        s.parse().map(NodeId)
    }
}

impl FromStr for SwitchId {
    type Err = std::num::ParseIntError;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        s.parse().map(SwitchId)
    }
}

/// 48-bit Ethernet address, stored in the low bits of a `u64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MacAddr(u64);

impl MacAddr {
    pub const MAX: u64 = (1 << 48) - 1;

    pub fn new(bits: u64) -> Option<Self> {
        (bits <= Self::MAX).then_some(MacAddr(bits))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    fn octets(self) -> [u8; 6] {
        let b = self.0.to_be_bytes();
        [b[2], b[3], b[4], b[5], b[6], b[7]]
    }

    /// Compact rendering used by the published rule listings: when the top
    /// two octets are zero only the low four are written (`00:00:00:01`).
    pub fn short(self) -> String {
        let o = self.octets();
        if o[0] == 0 && o[1] == 0 {
            format!("{:02x}:{:02x}:{:02x}:{:02x}", o[2], o[3], o[4], o[5])
        } else {
            self.to_string()
        }
    }
}

impl fmt::Display for MacAddr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let o = self.octets();
        write!(
            f,
            "{:02x}:{:02x}:{:02x}:{:02x}:{:02x}:{:02x}",
            o[0], o[1], o[2], o[3], o[4], o[5]
        )
    }
}

impl FromStr for MacAddr {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 6 {
            return Err(format!("mac `{s}` must have 6 octets"));
        }
        let mut bits = 0u64;
        for p in parts {
            if p.len() != 2 {
                return Err(format!("mac `{s}` has a malformed octet"));
            }
            let o = u8::from_str_radix(p, 16).map_err(|_| format!("mac `{s}` is not hex"))?;
            bits = (bits << 8) | u64::from(o);
        }
        Ok(MacAddr(bits))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Switch {
    pub id: SwitchId,
    /// Rule slots available on this switch.
    pub capacity: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Node {
    pub id: NodeId,
    pub attached_switch: SwitchId,
    pub ip: Ipv4Addr,
    pub mac: MacAddr,
    /// 1-based physical port on the attached switch.
    pub port: u16,
}

/// Shape of a generated leaf-switch network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkProfile {
    pub name: String,
    pub switch_count: u32,
    pub nodes_per_switch: u32,
    pub capacity: u64,
}

/// Largest node count the `10.0.0.0/8` address plan can number.
pub const MAX_NODES: u64 = (1 << 24) - 2;

pub const MAX_SWITCHES: u32 = 1 << 16;

impl NetworkProfile {
    pub fn new(
        name: impl Into<String>,
        switch_count: u32,
        nodes_per_switch: u32,
        capacity: u64,
    ) -> Result<Self> {
        if switch_count == 0 || nodes_per_switch == 0 {
            return Err(Error::InvalidProfile(
                "switch count and nodes per switch must be at least 1".into(),
            ));
        }
        if switch_count > MAX_SWITCHES {
            return Err(Error::InvalidProfile(format!(
                "{switch_count} switches exceeds the limit of {MAX_SWITCHES}"
            )));
        }
        if nodes_per_switch > u32::from(u16::MAX) {
            return Err(Error::InvalidProfile(format!(
                "{nodes_per_switch} nodes per switch exceeds the port range"
            )));
        }
        if u64::from(switch_count) * u64::from(nodes_per_switch) > MAX_NODES {
            return Err(Error::InvalidProfile(format!(
                "more than {MAX_NODES} nodes cannot be addressed"
            )));
        }
        Ok(NetworkProfile {
            name: name.into(),
            switch_count,
            nodes_per_switch,
            capacity,
        })
    }

    /// 50 leaf switches with 20 nodes each.
    pub fn normal(capacity: u64) -> Self {
        NetworkProfile::new("normal", 50, 20, capacity).unwrap()
    }

    /// 50 leaf switches with 400 nodes each.
    pub fn cloud(capacity: u64) -> Self {
        NetworkProfile::new("cloud", 50, 400, capacity).unwrap()
    }

    pub fn node_count(&self) -> u32 {
        self.switch_count * self.nodes_per_switch
    }
}

/// Immutable leaf-switch network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    switches: Vec<Switch>,
    nodes: Vec<Node>,
}

impl Topology {
    /// Validates ids (dense, in order), attachments and address uniqueness.
    pub fn new(switches: Vec<Switch>, nodes: Vec<Node>) -> Result<Self> {
        for (i, s) in switches.iter().enumerate() {
            if s.id.index() != i {
                return Err(Error::InvalidProfile(format!(
                    "switch ids must be dense, found {} at position {i}",
                    s.id
                )));
            }
        }
        let mut ports = HashSet::new();
        let mut ips = HashSet::new();
        let mut macs = HashSet::new();
        for (i, n) in nodes.iter().enumerate() {
            if n.id.index() != i {
                return Err(Error::InvalidProfile(format!(
                    "node ids must be dense, found {} at position {i}",
                    n.id
                )));
            }
            if n.attached_switch.index() >= switches.len() {
                return Err(Error::UnknownSwitch(n.attached_switch));
            }
            if !ports.insert((n.attached_switch, n.port)) {
                return Err(Error::InvalidProfile(format!(
                    "port {} on switch {} used twice",
                    n.port, n.attached_switch
                )));
            }
            if !ips.insert(n.ip) {
                return Err(Error::InvalidProfile(format!("duplicate ip {}", n.ip)));
            }
            if !macs.insert(n.mac) {
                return Err(Error::InvalidProfile(format!("duplicate mac {}", n.mac)));
            }
        }
        Ok(Topology { switches, nodes })
    }

    pub fn switches(&self) -> &[Switch] {
        &self.switches
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn switch_count(&self) -> usize {
        self.switches.len()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, id: NodeId) -> Result<&Node> {
        self.nodes.get(id.index()).ok_or(Error::UnknownNode(id))
    }

    pub fn switch(&self, id: SwitchId) -> Result<&Switch> {
        self.switches
            .get(id.index())
            .ok_or(Error::UnknownSwitch(id))
    }

    /// Switch a node hangs off. Panics on an unknown id; callers hold
    /// validated instances.
    pub(crate) fn attachment(&self, id: NodeId) -> SwitchId {
        self.nodes[id.index()].attached_switch
    }

    pub fn capacities(&self) -> Vec<u64> {
        self.switches.iter().map(|s| s.capacity).collect()
    }

    /// Copy of this topology with every switch set to `capacity`.
    pub fn with_uniform_capacity(&self, capacity: u64) -> Topology {
        let mut t = self.clone();
        for s in &mut t.switches {
            s.capacity = capacity;
        }
        t
    }

    /// Connection indicator: 1 iff `node` is attached to `switch`.
    pub fn connected(&self, node: NodeId, switch: SwitchId) -> Result<u8> {
        self.switch(switch)?;
        Ok(u8::from(self.node(node)?.attached_switch == switch))
    }

    /// Leaf switches touched by a group's nodes, ascending and deduplicated.
    pub fn switch_set(&self, group: &ApplicationGroup) -> Result<Vec<SwitchId>> {
        self.switch_set_of(&group.nodes)
    }

    pub fn switch_set_of(&self, nodes: &[NodeId]) -> Result<Vec<SwitchId>> {
        let mut set = nodes
            .iter()
            .map(|&n| self.node(n).map(|n| n.attached_switch))
            .collect::<Result<Vec<_>>>()?;
        set.sort_unstable();
        set.dedup();
        Ok(set)
    }

    /// Writes the topology block of the text format.
    pub fn write_text(&self, out: &mut String) {
        use std::fmt::Write;
        let base = self.switches.first().map_or(0, |s| s.capacity);
        let _ = writeln!(out, "switches={} capacity={}", self.switches.len(), base);
        for s in self.switches.iter().filter(|s| s.capacity != base) {
            let _ = writeln!(out, "switch={} capacity={}", s.id, s.capacity);
        }
        for n in &self.nodes {
            let _ = writeln!(
                out,
                "node={} switch={} port={} ip={} mac={}",
                n.id, n.attached_switch, n.port, n.ip, n.mac
            );
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        self.write_text(&mut s);
        s
    }

    pub fn from_text(input: &str) -> Result<Topology> {
        let mut lines = text::content_lines(input).peekable();
        let topo = Topology::parse_block(&mut lines)?;
        if let Some((no, _)) = lines.next() {
            return Err(Error::parse(no, "unexpected trailing content"));
        }
        Ok(topo)
    }

    /// Consumes the header and the `switch=`/`node=` lines that follow it.
    pub(crate) fn parse_block<'a, I>(lines: &mut std::iter::Peekable<I>) -> Result<Topology>
    where
        I: Iterator<Item = (usize, &'a str)>,
    {
        let (no, header) = lines
            .next()
            .ok_or_else(|| Error::parse(0, "missing `switches=` header"))?;
        let [count, cap] = text::expect_keys(no, header, ["switches", "capacity"])?;
        let count: u32 = text::parse_num(no, "switch count", count)?;
        let cap: u64 = text::parse_num(no, "capacity", cap)?;
        if count > MAX_SWITCHES {
            return Err(Error::parse(
                no,
                format!("more than {MAX_SWITCHES} switches"),
            ));
        }
        let mut switches: Vec<Switch> = (0..count)
            .map(|i| Switch {
                id: SwitchId(i),
                capacity: cap,
            })
            .collect();

        while let Some(&(no, line)) = lines.peek() {
            if !line.starts_with("switch=") {
                break;
            }
            lines.next();
            let [id, c] = text::expect_keys(no, line, ["switch", "capacity"])?;
            let id: SwitchId = text::parse_num(no, "switch id", id)?;
            let c: u64 = text::parse_num(no, "capacity", c)?;
            let s = switches
                .get_mut(id.index())
                .ok_or_else(|| Error::parse(no, format!("unknown switch {id}")))?;
            s.capacity = c;
        }

        let mut nodes = Vec::new();
        while let Some(&(no, line)) = lines.peek() {
            if !line.starts_with("node=") {
                break;
            }
            lines.next();
            let [id, sw, port, ip, mac] =
                text::expect_keys(no, line, ["node", "switch", "port", "ip", "mac"])?;
            let id: NodeId = text::parse_num(no, "node id", id)?;
            if id.index() != nodes.len() {
                return Err(Error::parse(
                    no,
                    format!("node ids must be dense; expected {}", nodes.len()),
                ));
            }
            let attached_switch: SwitchId = text::parse_num(no, "switch id", sw)?;
            if attached_switch.index() >= switches.len() {
                return Err(Error::parse(
                    no,
                    format!("unknown switch {attached_switch}"),
                ));
            }
            nodes.push(Node {
                id,
                attached_switch,
                port: text::parse_num(no, "port", port)?,
                ip: text::parse_num(no, "ip", ip)?,
                mac: mac.parse().map_err(|e: String| Error::parse(no, e))?,
            });
        }
        Topology::new(switches, nodes).map_err(|e| Error::parse(no, e.to_string()))
    }
}

/// Deterministic leaf-switch network: node `k` attaches to switch
/// `k / nodes_per_switch`, takes port `k % nodes_per_switch + 1`, ip
/// `10.0.0.0 + (k + 1)` and mac `k + 1`.
pub fn build_topology(profile: &NetworkProfile) -> Topology {
    let switches = (0..profile.switch_count)
        .map(|i| Switch {
            id: SwitchId(i),
            capacity: profile.capacity,
        })
        .collect();
    let nodes = (0..profile.node_count())
        .map(|k| {
            let host = k + 1;
            Node {
                id: NodeId(k),
                attached_switch: SwitchId(k / profile.nodes_per_switch),
                ip: Ipv4Addr::from((10u32 << 24) | host),
                mac: MacAddr(u64::from(host)),
                port: (k % profile.nodes_per_switch + 1) as u16,
            }
        })
        .collect();
    Topology { switches, nodes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workload::GroupId;

    fn group(nodes: &[u32]) -> ApplicationGroup {
        ApplicationGroup::new(GroupId(0), nodes.iter().map(|&n| NodeId(n)).collect())
    }

    /// Five-node layout with n1,n2 on s1 and n3,n4 on s2 (n0 pads the ids).
    fn fig5() -> Topology {
        let sw = |i| Switch {
            id: SwitchId(i),
            capacity: 10,
        };
        let attach = [0, 1, 1, 2, 2];
        let nodes = attach
            .iter()
            .enumerate()
            .map(|(k, &s)| Node {
                id: NodeId(k as u32),
                attached_switch: SwitchId(s),
                ip: Ipv4Addr::new(10, 0, 0, k as u8 + 1),
                mac: MacAddr::new(k as u64 + 1).unwrap(),
                port: k as u16 + 1,
            })
            .collect();
        Topology::new(vec![sw(0), sw(1), sw(2)], nodes).unwrap()
    }

    #[test]
    fn paper_profiles_have_expected_sizes() {
        let normal = build_topology(&NetworkProfile::normal(1000));
        assert_eq!(normal.node_count(), 1000);
        assert_eq!(normal.switch_count(), 50);
        let cloud = build_topology(&NetworkProfile::cloud(1000));
        assert_eq!(cloud.node_count(), 20000);
        assert_eq!(cloud.switch_count(), 50);
        assert!(cloud.switches().iter().all(|s| s.capacity == 1000));
    }

    #[test]
    fn degenerate_profile() {
        let t = build_topology(&NetworkProfile::new("one", 1, 1, 0).unwrap());
        assert_eq!(t.node_count(), 1);
        let n = t.nodes()[0];
        assert_eq!(n.attached_switch, SwitchId(0));
        assert_eq!(n.port, 1);
        assert_eq!(n.ip, Ipv4Addr::new(10, 0, 0, 1));
    }

    #[test]
    fn rejects_bad_profiles() {
        assert!(NetworkProfile::new("x", 0, 5, 1).is_err());
        assert!(NetworkProfile::new("x", 5, 0, 1).is_err());
        assert!(NetworkProfile::new("x", 1 << 20, 1 << 10, 1).is_err());
    }

    #[test]
    fn connection_indicator() {
        let t = build_topology(&NetworkProfile::new("t", 2, 2, 1).unwrap());
        assert_eq!(t.connected(NodeId(0), SwitchId(0)).unwrap(), 1);
        assert_eq!(t.connected(NodeId(0), SwitchId(1)).unwrap(), 0);
        assert!(matches!(
            t.connected(NodeId(9), SwitchId(0)),
            Err(Error::UnknownNode(_))
        ));
        assert!(matches!(
            t.connected(NodeId(0), SwitchId(7)),
            Err(Error::UnknownSwitch(_))
        ));
        let f = fig5();
        assert_eq!(f.connected(NodeId(3), SwitchId(2)).unwrap(), 1);
        assert_eq!(f.connected(NodeId(1), SwitchId(2)).unwrap(), 0);
    }

    #[test]
    fn switch_sets() {
        let f = fig5();
        assert_eq!(
            f.switch_set(&group(&[1, 2, 3])).unwrap(),
            vec![SwitchId(1), SwitchId(2)]
        );
        assert_eq!(f.switch_set(&group(&[3, 4])).unwrap(), vec![SwitchId(2)]);
        assert!(f.switch_set_of(&[]).unwrap().is_empty());
        assert!(f.switch_set(&group(&[42])).is_err());
    }

    #[test]
    fn text_round_trip_with_capacity_overrides() {
        let mut t = build_topology(&NetworkProfile::new("t", 3, 2, 5).unwrap());
        t.switches[1].capacity = 9;
        let text = t.to_text();
        assert!(text.starts_with("switches=3 capacity=5\nswitch=1 capacity=9\n"));
        assert!(text.contains("node=0 switch=0 port=1 ip=10.0.0.1 mac=00:00:00:00:00:01\n"));
        assert_eq!(Topology::from_text(&text).unwrap(), t);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad =
            "switches=1 capacity=4\nnode=0 switch=3 port=1 ip=10.0.0.1 mac=00:00:00:00:00:01\n";
        match Topology::from_text(bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        let dup = "switches=1 capacity=4\n\
                   node=0 switch=0 port=1 ip=10.0.0.1 mac=00:00:00:00:00:01\n\
                   node=1 switch=0 port=1 ip=10.0.0.2 mac=00:00:00:00:00:02\n";
        assert!(Topology::from_text(dup).is_err());
        assert!(Topology::from_text("").is_err());
        assert!(Topology::from_text("switches=x capacity=1").is_err());
    }

    #[test]
    fn short_mac() {
        assert_eq!(MacAddr::new(1).unwrap().short(), "00:00:00:01");
        assert_eq!(
            MacAddr::new(0x0102_0000_0001).unwrap().short(),
            "01:02:00:00:00:01"
        );
        assert!(MacAddr::new(1 << 48).is_none());
        assert!("00:00:00:01".parse::<MacAddr>().is_err());
    }
}
