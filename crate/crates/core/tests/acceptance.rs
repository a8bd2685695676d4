//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so every line is printed; exits non-zero if any criterion fails.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use isoplace::experiment::{self, ExperimentConfig, SolverChoice, SweepRow};
use isoplace::manager::{self, Event, EventKind, GroupTable, OnError, ReplayConfig};
use isoplace::oracle::{brute_force_optimum, DEFAULT_BOUND};
use isoplace::rng::Rng;
use isoplace::rules::{synthesize_group_rules, RuleStyle};
use isoplace::*;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

type Outcome = Result<String, String>;

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(limit: Duration, started: Instant, detail: String) -> Outcome {
    let took = started.elapsed();
    check(
        took < limit,
        format!(
            "{detail}; {:.1}s (limit {}s)",
            took.as_secs_f64(),
            limit.as_secs()
        ),
    )
}

fn mean_supported(rows: &[SweepRow], solver: &str, capacity: u64) -> f64 {
    let v: Vec<usize> = rows
        .iter()
        .filter(|r| r.solver == solver && r.capacity == capacity)
        .map(|r| r.supported)
        .collect();
    v.iter().sum::<usize>() as f64 / v.len() as f64
}

fn at_capacity(network: NetworkProfile, workload: WorkloadProfile) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::paper(network, workload);
    cfg.capacities = vec![1000];
    cfg
}

fn table_listing() -> Outcome {
    let started = Instant::now();
    let topo = build_topology(&NetworkProfile::new("fig", 1, 4, 4).unwrap());
    let group = ApplicationGroup::new(GroupId(0), (0..4).map(NodeId).collect());
    let got: Vec<String> = synthesize_group_rules(&topo, &group, 1)
        .unwrap()
        .iter()
        .map(|r| r.render(RuleStyle::Listing))
        .collect();
    let want = [
        "IF IP = 10.0.0.1 THEN MAC \u{2190} 00:00:00:01, PORT \u{2190} 1",
        "IF IP = 10.0.0.2 THEN MAC \u{2190} 00:00:00:02, PORT \u{2190} 2",
        "IF IP = 10.0.0.3 THEN MAC \u{2190} 00:00:00:03, PORT \u{2190} 3",
        "IF IP = 10.0.0.4 THEN MAC \u{2190} 00:00:00:04, PORT \u{2190} 4",
    ];
    if got != want {
        return Err(format!("rendered {got:?}"));
    }
    within(Duration::from_secs(1), started, "4 rules byte-exact".into())
}

fn oracle_dominance() -> Outcome {
    let started = Instant::now();
    let mut rng = Rng::new(0x0AC1E);
    let (mut optimal, total) = (0usize, 1000usize);
    for case in 0..total {
        let switches = rng.between(1, 6) as u32;
        let nps = rng.between(1, 4) as u32;
        let cap = rng.between(0, 10);
        let groups = rng.between(1, 12) as usize;
        let topo = build_topology(&NetworkProfile::new("small", switches, nps, cap).unwrap());
        let wl = WorkloadProfile::new("small", 1, (switches * nps).min(6)).unwrap();
        let gs = generate_groups(&topo, &wl, groups, rng.next_u64()).unwrap();
        let inst = Instance::new(topo, gs, 1).unwrap();

        let greedy = greedy_place(&inst, GreedyMode::ROLLBACK);
        let random = random_place(&inst, rng.next_u64());
        let opt = brute_force_optimum(&inst, DEFAULT_BOUND).unwrap().size;
        if !is_feasible(&inst, &greedy.placed) || !recount_feasible(&inst, &greedy.placed) {
            return Err(format!("case {case}: greedy placement infeasible"));
        }
        if greedy.supported() > opt || random.supported() > opt {
            return Err(format!(
                "case {case}: greedy {} random {} exceed optimum {opt}",
                greedy.supported(),
                random.supported()
            ));
        }
        optimal += usize::from(greedy.supported() == opt);
    }
    let share = optimal as f64 / total as f64;
    if share < 0.5 {
        return Err(format!(
            "greedy optimal on only {:.1}% of instances",
            share * 100.0
        ));
    }
    within(
        Duration::from_secs(30),
        started,
        format!("{total} instances, greedy optimal on {:.1}%", share * 100.0),
    )
}

fn directional(
    network: NetworkProfile,
    min_ratio: f64,
    limit: Duration,
    light_greedy: &mut Option<f64>,
) -> Outcome {
    let started = Instant::now();
    let rows = experiment::run_experiment(&at_capacity(network, WorkloadProfile::light())).unwrap();
    let greedy = mean_supported(&rows, "greedy-rollback", 1000);
    let random = mean_supported(&rows, "random", 1000);
    *light_greedy = Some(greedy);
    let ratio = greedy / random;
    let timed = within(
        limit,
        started,
        format!("greedy {greedy:.1} / random {random:.1} = {ratio:.2}x (need >= {min_ratio}x)"),
    );
    match timed {
        Ok(d) if ratio >= min_ratio => Ok(d),
        Ok(d) | Err(d) => Err(d),
    }
}

fn heavy_collapse(light_greedy: Option<f64>) -> Outcome {
    let started = Instant::now();
    let light = light_greedy.ok_or("light-workload run did not complete")?;
    let rows = experiment::run_experiment(&at_capacity(
        NetworkProfile::normal(0),
        WorkloadProfile::heavy(),
    ))
    .unwrap();
    let heavy = mean_supported(&rows, "greedy-rollback", 1000);
    let share = heavy / light;
    let timed = within(
        Duration::from_secs(60),
        started,
        format!(
            "heavy {heavy:.1} / light {light:.1} = {:.1}% (need < 20%)",
            share * 100.0
        ),
    );
    match timed {
        Ok(d) if share < 0.2 => Ok(d),
        Ok(d) | Err(d) => Err(d),
    }
}

fn monotone_in_capacity() -> Outcome {
    let mut details = Vec::new();
    for workload in [WorkloadProfile::light(), WorkloadProfile::heavy()] {
        let cfg = ExperimentConfig::paper(NetworkProfile::normal(0), workload.clone());
        let rows = experiment::run_experiment(&cfg).unwrap();
        for solver in ["greedy-rollback", "random"] {
            let means: Vec<f64> = cfg
                .capacities
                .iter()
                .map(|&c| mean_supported(&rows, solver, c))
                .collect();
            let shown = means
                .iter()
                .map(|m| format!("{m:.0}"))
                .collect::<Vec<_>>()
                .join(",");
            if means.windows(2).any(|w| w[1] < w[0]) {
                return Err(format!("{} {solver} not monotone: {shown}", workload.name));
            }
            details.push(format!("{} {solver} [{shown}]", workload.name));
        }
    }
    Ok(details.join("; "))
}

fn fidelity_pair() -> Outcome {
    let inst = contended();
    let faithful = greedy_place(&inst, GreedyMode::FAITHFUL);
    let rollback = greedy_place(&inst, GreedyMode::ROLLBACK);
    check(
        faithful.placed == [GroupId(2)] && rollback.placed == [GroupId(1), GroupId(2)],
        format!(
            "faithful {:?} (|N|={}), rollback {:?} (|N|={})",
            faithful.placed,
            faithful.supported(),
            rollback.placed,
            rollback.supported()
        ),
    )
}

const PROPERTY_CASES: u32 = 256;

fn property<S: Strategy>(
    name: &str,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<String, String> {
    let mut runner = TestRunner::new(Config {
        cases: PROPERTY_CASES,
        failure_persistence: None,
        ..Config::default()
    });
    runner
        .run(&strategy, test)
        .map(|_| format!("{name} x{PROPERTY_CASES}"))
        .map_err(|e| format!("{name}: {e}"))
}

fn small_sweep() -> impl Strategy<Value = ExperimentConfig> {
    (1u32..=5, 2u32..=6, 1u64..=8, 1usize..=25, any::<u64>()).prop_map(
        |(sw, nps, cap, groups, seed)| {
            let net = NetworkProfile::new("custom", sw, nps, 0).unwrap();
            let max = (sw * nps).min(5);
            ExperimentConfig {
                network: net,
                workload: WorkloadProfile::new("custom", 1, max).unwrap(),
                rule_cost: 1,
                capacities: vec![cap, cap * 2],
                groups,
                seeds: vec![seed, seed.wrapping_add(1)],
                solvers: vec![
                    SolverChoice::GreedyFaithful,
                    SolverChoice::GreedyRollback,
                    SolverChoice::Random,
                ],
                oracle_bound: DEFAULT_BOUND,
                timing: false,
            }
        },
    )
}

fn event_log() -> impl Strategy<Value = Vec<Event>> {
    let nodes = prop::collection::btree_set(0u32..12, 1..5)
        .prop_map(|s| s.into_iter().map(NodeId).collect::<Vec<_>>());
    let kind = prop_oneof![
        (0u32..6, nodes.clone())
            .prop_map(|(id, ns)| EventKind::Submit(ApplicationGroup::new(GroupId(id), ns))),
        (0u32..6, nodes).prop_map(|(id, ns)| EventKind::UpdateNodes(GroupId(id), ns)),
        (0u32..6).prop_map(|id| EventKind::Complete(GroupId(id))),
    ];
    prop::collection::vec(kind, 0..20).prop_map(|kinds| {
        kinds
            .into_iter()
            .enumerate()
            .map(|(i, kind)| Event {
                seq: i as u64 + 1,
                kind,
            })
            .collect()
    })
}

fn invariant_suite() -> Outcome {
    let results = [
        property(
            "conservation",
            (small_instance(12), any::<u64>()),
            |(inst, seed)| {
                let rollback = greedy_place(&inst, GreedyMode::ROLLBACK);
                let random = random_place(&inst, seed);
                prop_assert!(conserves(&inst, &rollback));
                prop_assert!(conserves(&inst, &random));
                Ok(())
            },
        ),
        property(
            "feasibility",
            (small_instance(12), any::<u64>()),
            |(inst, seed)| {
                for res in [
                    greedy_place(&inst, GreedyMode::ROLLBACK),
                    random_place(&inst, seed),
                    oracle::oracle_place(&inst, DEFAULT_BOUND).unwrap(),
                ] {
                    prop_assert!(is_feasible(&inst, &res.placed));
                    prop_assert!(recount_feasible(&inst, &res.placed));
                }
                Ok(())
            },
        ),
        property("sort-order", small_instance(12), |inst| {
            prop_assert!(sorted_by_switch_set(
                &inst,
                &greedy_place(&inst, GreedyMode::ROLLBACK)
            ));
            prop_assert!(sorted_by_switch_set(
                &inst,
                &greedy_place(&inst, GreedyMode::FAITHFUL)
            ));
            Ok(())
        }),
        property("replay/fold", event_log(), |log| {
            let topo = build_topology(&NetworkProfile::new("t", 3, 4, 3).unwrap());
            let cfg = ReplayConfig {
                solver: Solver::Greedy(GreedyMode::ROLLBACK),
                rule_cost: 1,
                on_error: OnError::Skip,
            };
            let replayed = manager::replay(&log, &topo, &cfg).unwrap();
            let folded = log.iter().fold(GroupTable::new(), |t, ev| {
                t.apply_event(ev, &topo).unwrap_or(t)
            });
            prop_assert_eq!(replayed.table, folded);
            Ok(())
        }),
        property("instance round-trip", small_instance(12), |inst| {
            prop_assert_eq!(Instance::from_text(&inst.to_text()).unwrap(), inst);
            Ok(())
        }),
        property("csv determinism", small_sweep(), |cfg| {
            let mut a = Vec::new();
            let mut b = Vec::new();
            experiment::write_sweep_csv(&cfg, &mut a).unwrap();
            experiment::write_sweep_csv(&cfg, &mut b).unwrap();
            prop_assert_eq!(a, b);
            Ok(())
        }),
    ];
    let mut passed = Vec::new();
    for r in results {
        passed.push(r?);
    }
    Ok(passed.join(", "))
}

fn main() {
    let mut light_greedy = None;
    let mut failures = 0;
    let mut report = |n: u32, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(d) => println!("PASS criterion {n} ({name}): {d}"),
            Err(d) => {
                failures += 1;
                println!("FAIL criterion {n} ({name}): {d}");
            }
        }
    };

    report(1, "rule listing golden", &mut table_listing);
    report(2, "oracle dominance", &mut oracle_dominance);
    report(3, "normal/light greedy vs random", &mut || {
        directional(
            NetworkProfile::normal(0),
            1.5,
            Duration::from_secs(60),
            &mut light_greedy,
        )
    });
    report(4, "cloud/light greedy vs random", &mut || {
        directional(
            NetworkProfile::cloud(0),
            3.0,
            Duration::from_secs(300),
            &mut None,
        )
    });
    report(5, "heavy/light collapse", &mut || {
        heavy_collapse(light_greedy)
    });
    report(6, "monotone in capacity", &mut monotone_in_capacity);
    report(7, "faithful vs rollback", &mut || fidelity_pair());
    report(8, "invariant suite", &mut invariant_suite);

    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
