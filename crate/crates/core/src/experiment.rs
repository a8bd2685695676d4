//! Capacity sweeps comparing solvers on generated workloads, with CSV and
//! plot-data output.
//!
//! A config file is a sectioned `key = value` text:
//!
//! ```text
//! [network]
//! profile = normal          # normal | cloud | custom
//! switches = 50             # custom only
//! nodes_per_switch = 20     # custom only
//!
//! [workload]
//! profile = light           # light | heavy | custom
//! min_nodes = 10            # custom only
//! max_nodes = 100           # custom only
//!
//! [run]
//! rule_cost = 1
//! capacities = 200, 400, 600, 800, 1000
//! groups = 5000
//! seeds = 0..20             # list and/or half-open ranges
//! solvers = greedy-rollback, random
//! oracle_bound = 20
//! timing = true             # false writes wall_ms=0 for byte-stable output
//! ```

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::net::{build_topology, NetworkProfile};
use crate::oracle;
use crate::placement::{GreedyMode, Solver};
use crate::workload::{generate_groups, Instance, WorkloadProfile};

/// Mixed into the experiment seed to derive the random baseline's order
/// stream, so it does not replay the workload generator's draws.
const ORDER_SALT: u64 = 0x6a09_e667_f3bc_c908;

pub const DEFAULT_GROUPS: usize = 5000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SolverChoice {
    GreedyFaithful,
    GreedyRollback,
    Oracle,
    Random,
}

impl SolverChoice {
    pub const ALL: [SolverChoice; 4] = [
        SolverChoice::GreedyFaithful,
        SolverChoice::GreedyRollback,
        SolverChoice::Oracle,
        SolverChoice::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SolverChoice::GreedyFaithful => "greedy-faithful",
            SolverChoice::GreedyRollback => "greedy-rollback",
            SolverChoice::Oracle => "oracle",
            SolverChoice::Random => "random",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == s)
    }

    fn solver(self, seed: u64, oracle_bound: usize) -> Solver {
        match self {
            SolverChoice::GreedyFaithful => Solver::Greedy(GreedyMode::FAITHFUL),
            SolverChoice::GreedyRollback => Solver::Greedy(GreedyMode::ROLLBACK),
            SolverChoice::Oracle => Solver::Oracle {
                bound: oracle_bound,
            },
            SolverChoice::Random => Solver::Random {
                seed: seed ^ ORDER_SALT,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub network: NetworkProfile,
    pub workload: WorkloadProfile,
    pub rule_cost: u64,
    pub capacities: Vec<u64>,
    pub groups: usize,
    pub seeds: Vec<u64>,
    /// Kept sorted by name and deduplicated.
    pub solvers: Vec<SolverChoice>,
    pub oracle_bound: usize,
    pub timing: bool,
}

impl ExperimentConfig {
    /// The simulation study's settings: R = 1, C swept up to 1000, 20 seeds,
    /// greedy against the random baseline.
    pub fn paper(network: NetworkProfile, workload: WorkloadProfile) -> Self {
        ExperimentConfig {
            network,
            workload,
            rule_cost: 1,
            capacities: vec![200, 400, 600, 800, 1000],
            groups: DEFAULT_GROUPS,
            seeds: (0..20).collect(),
            solvers: vec![SolverChoice::GreedyRollback, SolverChoice::Random],
            oracle_bound: oracle::DEFAULT_BOUND,
            timing: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.into()));
        if self.capacities.is_empty() {
            return bad("capacity sweep is empty");
        }
        if self.seeds.is_empty() {
            return bad("seed list is empty");
        }
        if self.solvers.is_empty() {
            return bad("no solvers selected");
        }
        if self.rule_cost == 0 {
            return bad("rule cost must be at least 1");
        }
        if u64::from(self.workload.max_nodes) > u64::from(self.network.node_count()) {
            return bad("workload groups are larger than the network");
        }
        if self.solvers.contains(&SolverChoice::Oracle) && self.groups > self.oracle_bound {
            return Err(Error::OracleTooLarge {
                groups: self.groups,
                bound: self.oracle_bound,
            });
        }
        Ok(())
    }

    pub fn from_text(input: &str) -> Result<Self> {
        let mut sections: BTreeMap<&str, BTreeMap<&str, (usize, &str)>> = BTreeMap::new();
        let mut current: Option<&str> = None;
        for (i, raw) in input.lines().enumerate() {
            let no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let name = name.trim();
                if !matches!(name, "network" | "workload" | "run") {
                    return Err(Error::parse(no, format!("unknown section [{name}]")));
                }
                if sections.insert(name, BTreeMap::new()).is_some() {
                    return Err(Error::parse(no, format!("section [{name}] repeated")));
                }
                current = Some(name);
                continue;
            }
            let section = current.ok_or_else(|| Error::parse(no, "key outside of a section"))?;
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(no, "expected `key = value`"))?;
            let k = k.trim();
            let entries = sections.get_mut(section).expect("section inserted above");
            if entries.insert(k, (no, v.trim())).is_some() {
                return Err(Error::parse(no, format!("key `{k}` repeated")));
            }
        }

        let empty = BTreeMap::new();
        let mut net = Section::new("network", sections.get("network").unwrap_or(&empty));
        let mut work = Section::new("workload", sections.get("workload").unwrap_or(&empty));
        let mut run = Section::new("run", sections.get("run").unwrap_or(&empty));

        let network = match net.take("profile").map(|(_, v)| v).unwrap_or("normal") {
            "normal" => NetworkProfile::normal(0),
            "cloud" => NetworkProfile::cloud(0),
            "custom" => NetworkProfile::new(
                "custom",
                net.require_num("switches")?,
                net.require_num("nodes_per_switch")?,
                0,
            )?,
            other => {
                return Err(Error::InvalidConfig(format!(
                    "unknown network profile `{other}`"
                )))
            }
        };
        let workload = match work.take("profile").map(|(_, v)| v).unwrap_or("light") {
            "light" => WorkloadProfile::light(),
            "heavy" => WorkloadProfile::heavy(),
            "custom" => WorkloadProfile::new(
                "custom",
                work.require_num("min_nodes")?,
                work.require_num("max_nodes")?,
            )?,
            other => {
                return Err(Error::InvalidConfig(format!(
                    "unknown workload profile `{other}`"
                )))
            }
        };

        let mut cfg = ExperimentConfig::paper(network, workload);
        if let Some(v) = run.num("rule_cost")? {
            cfg.rule_cost = v;
        }
        if let Some((no, v)) = run.take("capacities") {
            cfg.capacities = parse_u64_list(no, v)?;
        }
        if let Some(v) = run.num("groups")? {
            cfg.groups = v;
        }
        if let Some((no, v)) = run.take("seeds") {
            cfg.seeds = parse_u64_list(no, v)?;
        }
        if let Some((no, v)) = run.take("solvers") {
            cfg.solvers = v
                .split(',')
                .map(|s| {
                    SolverChoice::parse(s.trim())
                        .ok_or_else(|| Error::parse(no, format!("unknown solver `{}`", s.trim())))
                })
                .collect::<Result<_>>()?;
        }
        if let Some(v) = run.num("oracle_bound")? {
            cfg.oracle_bound = v;
        }
        if let Some((no, v)) = run.take("timing") {
            cfg.timing = match v {
                "true" | "on" => true,
                "false" | "off" => false,
                _ => return Err(Error::parse(no, format!("invalid boolean `{v}`"))),
            };
        }
        for s in [&net, &work, &run] {
            s.finish()?;
        }
        cfg.solvers.sort_unstable();
        cfg.solvers.dedup();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }
}

struct Section<'a> {
    name: &'static str,
    entries: BTreeMap<&'a str, (usize, &'a str)>,
}

impl<'a> Section<'a> {
    fn new(name: &'static str, entries: &BTreeMap<&'a str, (usize, &'a str)>) -> Self {
        Section {
            name,
            entries: entries.clone(),
        }
    }

    fn take(&mut self, key: &str) -> Option<(usize, &'a str)> {
        self.entries.remove(key)
    }

    fn num<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        self.take(key)
            .map(|(no, v)| crate::text::parse_num(no, key, v))
            .transpose()
    }

    fn require_num<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        self.num(key)?.ok_or_else(|| {
            Error::InvalidConfig(format!(
                "[{}] needs `{key}` for a custom profile",
                self.name
            ))
        })
    }

    fn finish(&self) -> Result<()> {
        match self.entries.iter().next() {
            Some((k, (no, _))) => Err(Error::parse(
                *no,
                format!("unknown key `{k}` in [{}]", self.name),
            )),
            None => Ok(()),
        }
    }
}

/// `1, 2, 10..13` → `[1, 2, 10, 11, 12]`.
fn parse_u64_list(no: usize, s: &str) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim) {
        if let Some((a, b)) = part.split_once("..") {
            let a: u64 = crate::text::parse_num(no, "range start", a.trim())?;
            let b: u64 = crate::text::parse_num(no, "range end", b.trim())?;
            if b < a || b - a > 1_000_000 {
                return Err(Error::parse(no, format!("bad range `{part}`")));
            }
            out.extend(a..b);
        } else {
            out.push(crate::text::parse_num(no, "integer", part)?);
        }
    }
    Ok(out)
}

/// One solver run at one capacity on one seeded instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub profile: String,
    pub workload: String,
    pub capacity: u64,
    pub rule_cost: u64,
    pub seed: u64,
    pub solver: String,
    pub offered: usize,
    pub supported: usize,
    pub wall_ms: f64,
}

/// Runs the sweep and returns rows in canonical order (capacity, seed,
/// solver name).
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    run_experiment_with(config, |r| {
        rows.push(r.clone());
        Ok(())
    })?;
    Ok(rows)
}

/// Streams rows to `sink` in canonical order. Each capacity step is solved
/// in parallel across seeds and emitted once complete.
pub fn run_experiment_with<F>(config: &ExperimentConfig, mut sink: F) -> Result<()>
where
    F: FnMut(&SweepRow) -> Result<()>,
{
    config.validate()?;
    let topology = build_topology(&config.network);
    let instances: Vec<(u64, Instance)> = config
        .seeds
        .par_iter()
        .map(|&seed| {
            let groups = generate_groups(&topology, &config.workload, config.groups, seed)?;
            Ok((
                seed,
                Instance::new(topology.clone(), groups, config.rule_cost)?,
            ))
        })
        .collect::<Result<_>>()?;
    let mut seeds_sorted: Vec<usize> = (0..instances.len()).collect();
    seeds_sorted.sort_by_key(|&i| instances[i].0);

    for &capacity in &config.capacities {
        let block: Vec<Vec<SweepRow>> = seeds_sorted
            .par_iter()
            .map(|&i| {
                let (seed, base) = &instances[i];
                let inst = base.with_uniform_capacity(capacity);
                config
                    .solvers
                    .iter()
                    .map(|choice| {
                        let solver = choice.solver(*seed, config.oracle_bound);
                        let start = Instant::now();
                        let res = solver.solve(&inst)?;
                        let wall_ms = if config.timing {
                            (start.elapsed().as_secs_f64() * 1e6).round() / 1e3
                        } else {
                            0.0
                        };
                        Ok(SweepRow {
                            profile: config.network.name.clone(),
                            workload: config.workload.name.clone(),
                            capacity,
                            rule_cost: config.rule_cost,
                            seed: *seed,
                            solver: choice.name().to_string(),
                            offered: inst.group_count(),
                            supported: res.supported(),
                            wall_ms,
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        for row in block.iter().flatten() {
            sink(row)?;
        }
    }
    Ok(())
}

/// Runs the sweep, writing CSV rows to `out` as each capacity step finishes.
pub fn write_sweep_csv<W: Write>(config: &ExperimentConfig, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    run_experiment_with(config, |row| {
        w.serialize(row)?;
        Ok(())
    })?;
    w.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<SweepRow>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    csv::Reader::from_reader(file)
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

/// Per (profile, workload): capacity → solver → supported counts.
type Series<'a> = BTreeMap<(&'a str, &'a str), BTreeMap<u64, BTreeMap<&'a str, Vec<usize>>>>;

/// Renders one whitespace-separated table per (profile, workload): a
/// `#` header, then capacity followed by the mean supported count of each
/// solver over seeds.
pub fn plot_tables(rows: &[SweepRow]) -> BTreeMap<(String, String), String> {
    let mut series: Series = BTreeMap::new();
    for r in rows {
        series
            .entry((&r.profile, &r.workload))
            .or_default()
            .entry(r.capacity)
            .or_default()
            .entry(&r.solver)
            .or_default()
            .push(r.supported);
    }
    series
        .into_iter()
        .map(|((p, w), by_cap)| {
            let mut solvers: Vec<&str> = by_cap.values().flat_map(|m| m.keys().copied()).collect();
            solvers.sort_unstable();
            solvers.dedup();
            let mut out = format!("# capacity {}\n", solvers.join(" "));
            for (cap, per) in &by_cap {
                out.push_str(&cap.to_string());
                for s in &solvers {
                    match per.get(s) {
                        Some(v) => {
                            let mean = v.iter().sum::<usize>() as f64 / v.len() as f64;
                            out.push_str(&format!(" {mean:.4}"));
                        }
                        None => out.push_str(" nan"),
                    }
                }
                out.push('\n');
            }
            ((p.to_string(), w.to_string()), out)
        })
        .collect()
}

/// Writes `<profile>_<workload>.dat` files into `dir`.
pub fn emit_plot_data(rows: &[SweepRow], dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    if rows.is_empty() {
        return Err(Error::InvalidConfig("no rows to plot".into()));
    }
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    plot_tables(rows)
        .into_iter()
        .map(|((p, w), body)| {
            let path = dir.join(format!("{p}_{w}.dat"));
            std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
            Ok(path)
        })
        .collect()
}
