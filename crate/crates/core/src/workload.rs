//! Application groups and seeded workload generation.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::net::{NodeId, Topology};
use crate::rng::Rng;
use crate::text;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupId(pub u32);

impl GroupId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for GroupId {
    type Err = std::num::ParseIntError;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        s.parse().map(GroupId)
    }
}

/// The node set of one MapReduce application. Nodes are kept sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApplicationGroup {
    pub id: GroupId,
    pub nodes: Vec<NodeId>,
}

impl ApplicationGroup {
    pub fn new(id: GroupId, mut nodes: Vec<NodeId>) -> Self {
        nodes.sort_unstable();
        ApplicationGroup { id, nodes }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Non-empty, duplicate-free, and every node exists in `topology`.
    pub fn validate(&self, topology: &Topology) -> Result<()> {
        if self.nodes.is_empty() {
            return Err(Error::InvalidGroup {
                group: self.id,
                msg: "empty node set".into(),
            });
        }
        for w in self.nodes.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidGroup {
                    group: self.id,
                    msg: format!("node {} listed twice or out of order", w[1]),
                });
            }
        }
        for &n in &self.nodes {
            topology.node(n)?;
        }
        Ok(())
    }
}

/// Group-size bounds for generated applications (inclusive).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkloadProfile {
    pub name: String,
    pub min_nodes: u32,
    pub max_nodes: u32,
}

impl WorkloadProfile {
    pub fn new(name: impl Into<String>, min_nodes: u32, max_nodes: u32) -> Result<Self> {
        if min_nodes == 0 || min_nodes > max_nodes {
            return Err(Error::InvalidProfile(format!(
                "group size bounds {min_nodes}..={max_nodes} are invalid"
            )));
        }
        Ok(WorkloadProfile {
            name: name.into(),
            min_nodes,
            max_nodes,
        })
    }

    /// 10 to 100 nodes per application.
    pub fn light() -> Self {
        WorkloadProfile::new("light", 10, 100).unwrap()
    }

    /// 100 to 200 nodes per application.
    pub fn heavy() -> Self {
        WorkloadProfile::new("heavy", 100, 200).unwrap()
    }
}

/// `count` groups with sizes uniform in the profile bounds and members
/// drawn uniformly without replacement from all nodes.
pub fn generate_groups(
    topology: &Topology,
    profile: &WorkloadProfile,
    count: usize,
    seed: u64,
) -> Result<Vec<ApplicationGroup>> {
    if profile.max_nodes as usize > topology.node_count() {
        return Err(Error::InvalidProfile(format!(
            "workload `{}` wants up to {} nodes but the topology has {}",
            profile.name,
            profile.max_nodes,
            topology.node_count()
        )));
    }
    let mut rng = Rng::new(seed);
    // The pool stays a permutation of all node ids between draws, so each
    // partial shuffle yields a fresh uniform subset.
    let mut pool: Vec<NodeId> = topology.nodes().iter().map(|n| n.id).collect();
    let groups = (0..count)
        .map(|k| {
            let size = rng.between(profile.min_nodes.into(), profile.max_nodes.into()) as usize;
            rng.partial_shuffle(&mut pool, size);
            ApplicationGroup::new(GroupId(k as u32), pool[..size].to_vec())
        })
        .collect();
    Ok(groups)
}

/// A placement problem: topology, offered groups and per-rule slot cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub topology: Topology,
    pub groups: Vec<ApplicationGroup>,
    pub rule_cost: u64,
}

impl Instance {
    pub fn new(topology: Topology, groups: Vec<ApplicationGroup>, rule_cost: u64) -> Result<Self> {
        if rule_cost == 0 {
            return Err(Error::InvalidProfile("rule cost must be at least 1".into()));
        }
        for (i, g) in groups.iter().enumerate() {
            if g.id.index() != i {
                return Err(Error::InvalidGroup {
                    group: g.id,
                    msg: format!("group ids must be dense; expected {i}"),
                });
            }
            g.validate(&topology)?;
        }
        Ok(Instance {
            topology,
            groups,
            rule_cost,
        })
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    /// Same groups on a topology whose switches all have `capacity` slots.
    pub fn with_uniform_capacity(&self, capacity: u64) -> Instance {
        Instance {
            topology: self.topology.with_uniform_capacity(capacity),
            groups: self.groups.clone(),
            rule_cost: self.rule_cost,
        }
    }

    pub fn to_text(&self) -> String {
        use std::fmt::Write;
        let mut out = self.topology.to_text();
        let _ = writeln!(out, "rule_cost={}", self.rule_cost);
        for g in &self.groups {
            let nodes: Vec<String> = g.nodes.iter().map(|n| n.to_string()).collect();
            let _ = writeln!(out, "group={} nodes={}", g.id, nodes.join(","));
        }
        out
    }

    pub fn from_text(input: &str) -> Result<Instance> {
        let mut lines = text::content_lines(input).peekable();
        let topology = Topology::parse_block(&mut lines)?;
        let (no, line) = lines
            .next()
            .ok_or_else(|| Error::parse(0, "missing `rule_cost=` line"))?;
        let [r] = text::expect_keys(no, line, ["rule_cost"])?;
        let rule_cost: u64 = text::parse_num(no, "rule cost", r)?;
        if rule_cost == 0 {
            return Err(Error::parse(no, "rule cost must be at least 1"));
        }
        let mut groups = Vec::new();
        for (no, line) in lines {
            let [id, nodes] = text::expect_keys(no, line, ["group", "nodes"])?;
            let id: GroupId = text::parse_num(no, "group id", id)?;
            if id.index() != groups.len() {
                return Err(Error::parse(
                    no,
                    format!("group ids must be dense; expected {}", groups.len()),
                ));
            }
            let mut nodes: Vec<NodeId> = text::parse_list(no, "node id", nodes)?;
            if let Some(&bad) = nodes.iter().find(|n| topology.node(**n).is_err()) {
                return Err(Error::parse(no, format!("unknown node {bad}")));
            }
            let listed = nodes.len();
            nodes.sort_unstable();
            nodes.dedup();
            if nodes.len() != listed {
                return Err(Error::parse(no, "duplicate node in group"));
            }
            if nodes.is_empty() {
                return Err(Error::parse(no, "group has no nodes"));
            }
            groups.push(ApplicationGroup { id, nodes });
        }
        Instance::new(topology, groups, rule_cost)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Instance> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Instance::from_text(&text)
    }
}
