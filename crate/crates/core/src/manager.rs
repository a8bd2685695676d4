//! Group management: the application→nodes table, its event log, and
//! full re-placement after every change.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::net::{NodeId, Topology};
use crate::placement::{PlacementResult, Rejection, Solver};
use crate::text;
use crate::workload::{ApplicationGroup, GroupId, Instance};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventKind {
    Submit(ApplicationGroup),
    UpdateNodes(GroupId, Vec<NodeId>),
    Complete(GroupId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub seq: u64,
    pub kind: EventKind,
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |ns: &[NodeId]| {
            ns.iter()
                .map(|n| n.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        match &self.kind {
            EventKind::Submit(g) => {
                write!(f, "{} submit {} nodes={}", self.seq, g.id, list(&g.nodes))
            }
            EventKind::UpdateNodes(id, ns) => {
                write!(f, "{} update {} nodes={}", self.seq, id, list(ns))
            }
            EventKind::Complete(id) => write!(f, "{} complete {}", self.seq, id),
        }
    }
}

/// Parses an event log. Sequence numbers must be strictly increasing.
pub fn parse_events(input: &str) -> Result<Vec<Event>> {
    let mut events: Vec<Event> = Vec::new();
    for (no, line) in text::content_lines(input) {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let (seq, verb, id) = match fields.as_slice() {
            [seq, verb, id, ..] => (*seq, *verb, *id),
            _ => return Err(Error::parse(no, "expected `<seq> <verb> <id>`")),
        };
        let seq: u64 = text::parse_num(no, "sequence number", seq)?;
        if let Some(prev) = events.last() {
            if seq <= prev.seq {
                return Err(Error::parse(no, "sequence numbers must increase"));
            }
        }
        let id: GroupId = text::parse_num(no, "group id", id)?;
        let nodes = |rest: &[&str]| -> Result<Vec<NodeId>> {
            match rest {
                [tok] => match tok.strip_prefix("nodes=") {
                    Some(list) => text::parse_list(no, "node id", list),
                    None => Err(Error::parse(no, "expected `nodes=`")),
                },
                _ => Err(Error::parse(no, "expected a single `nodes=` field")),
            }
        };
        let kind = match verb {
            "submit" => EventKind::Submit(ApplicationGroup::new(id, nodes(&fields[3..])?)),
            "update" => EventKind::UpdateNodes(id, nodes(&fields[3..])?),
            "complete" if fields.len() == 3 => EventKind::Complete(id),
            "complete" => return Err(Error::parse(no, "`complete` takes no fields")),
            other => return Err(Error::parse(no, format!("unknown event `{other}`"))),
        };
        events.push(Event { seq, kind });
    }
    Ok(events)
}

pub fn load_events(path: impl AsRef<Path>) -> Result<Vec<Event>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_events(&text)
}

/// Applications currently known, keyed by id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroupTable {
    groups: BTreeMap<GroupId, ApplicationGroup>,
    generation: u64,
}

impl GroupTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn get(&self, id: GroupId) -> Option<&ApplicationGroup> {
        self.groups.get(&id)
    }

    pub fn groups(&self) -> impl Iterator<Item = &ApplicationGroup> {
        self.groups.values()
    }

    /// New table with `event` applied. Node sets are checked against
    /// `topology`; on error `self` is left as it was.
    pub fn apply_event(&self, event: &Event, topology: &Topology) -> Result<GroupTable> {
        let mut next = self.clone();
        match &event.kind {
            EventKind::Submit(g) => {
                if next.groups.contains_key(&g.id) {
                    return Err(Error::DuplicateGroup(g.id));
                }
                g.validate(topology)?;
                next.groups.insert(g.id, g.clone());
            }
            EventKind::UpdateNodes(id, nodes) => {
                let slot = next.groups.get_mut(id).ok_or(Error::UnknownGroup(*id))?;
                let g = ApplicationGroup::new(*id, nodes.clone());
                g.validate(topology)?;
                *slot = g;
            }
            EventKind::Complete(id) => {
                next.groups.remove(id).ok_or(Error::UnknownGroup(*id))?;
            }
        }
        next.generation += 1;
        Ok(next)
    }

    /// Placement over the current snapshot. Groups are renumbered densely in
    /// id order for the solver and mapped back afterwards.
    pub fn place(
        &self,
        topology: &Topology,
        rule_cost: u64,
        solver: &Solver,
    ) -> Result<PlacementResult> {
        let ids: Vec<GroupId> = self.groups.keys().copied().collect();
        let dense = self
            .groups
            .values()
            .enumerate()
            .map(|(i, g)| ApplicationGroup {
                id: GroupId(i as u32),
                nodes: g.nodes.clone(),
            })
            .collect();
        let instance = Instance::new(topology.clone(), dense, rule_cost)?;
        let mut res = solver.solve(&instance)?;
        let orig = |g: GroupId| ids[g.index()];
        res.placed.iter_mut().for_each(|g| *g = orig(*g));
        res.order.iter_mut().for_each(|g| *g = orig(*g));
        res.rejected
            .iter_mut()
            .for_each(|r: &mut Rejection| r.group = orig(r.group));
        Ok(res)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OnError {
    #[default]
    Abort,
    Skip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReplayConfig {
    pub solver: Solver,
    pub rule_cost: u64,
    pub on_error: OnError,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Replay {
    pub table: GroupTable,
    /// One placement per generation, in order.
    pub placements: Vec<(u64, PlacementResult)>,
    /// Events that were rejected when skipping errors.
    pub skipped: Vec<(u64, String)>,
}

/// Folds the log into a table, re-solving from scratch after every
/// accepted event.
pub fn replay(events: &[Event], topology: &Topology, config: &ReplayConfig) -> Result<Replay> {
    let mut table = GroupTable::new();
    let mut placements = Vec::new();
    let mut skipped = Vec::new();
    for ev in events {
        match table.apply_event(ev, topology) {
            Ok(next) => table = next,
            Err(e) => match config.on_error {
                OnError::Abort => return Err(e),
                OnError::Skip => {
                    skipped.push((ev.seq, e.to_string()));
                    continue;
                }
            },
        }
        let res = table.place(topology, config.rule_cost, &config.solver)?;
        placements.push((table.generation(), res));
    }
    Ok(Replay {
        table,
        placements,
        skipped,
    })
}
