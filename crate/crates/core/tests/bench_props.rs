mod common;

use cffa_core::bench::{run_differential, run_scaling, AlgoSolver, FailureKind, Outcome, Solver, SuiteSpec};
use cffa_core::generators::{gen_random, Structure};
use cffa_core::oracle::solve_oracle;
use cffa_core::portfolio::Algo;
use cffa_core::{parse_instance, Answer, Assignment, Budget, CffaError, Completeness, Instance, Result, SolveResult};

/// Answers the opposite of the oracle, with no witness.
struct Liar;

impl Solver for Liar {
    fn name(&self) -> String {
        "liar".into()
    }

    fn solve(&self, inst: &Instance, budget: &Budget) -> Result<SolveResult> {
        Ok(match solve_oracle(inst, budget)?.answer {
            Answer::Yes => SolveResult::no(),
            Answer::No => SolveResult {
                answer: Answer::Yes,
                witness: None,
            },
        })
    }
}

/// Claims yes and hands every job to agent 0.
struct Hoarder;

impl Solver for Hoarder {
    fn name(&self) -> String {
        "hoarder".into()
    }

    fn solve(&self, inst: &Instance, _: &Budget) -> Result<SolveResult> {
        let mut a = Assignment::new();
        for x in 0..inst.m() {
            a.assign(x, 0);
        }
        Ok(SolveResult::yes(a))
    }
}

struct Refuser;

impl Solver for Refuser {
    fn name(&self) -> String {
        "refuser".into()
    }

    fn solve(&self, _: &Instance, _: &Budget) -> Result<SolveResult> {
        Err(CffaError::Precondition("not my kind of instance".into()))
    }
}

struct Sleeper;

impl Solver for Sleeper {
    fn name(&self) -> String {
        "sleeper".into()
    }

    fn solve(&self, _: &Instance, _: &Budget) -> Result<SolveResult> {
        Err(CffaError::BudgetExceeded("always".into()))
    }
}

fn instances(count: u64) -> Vec<Instance> {
    let p = common::profile(7, 2, Completeness::Partial, None, Structure::Free);
    (0..count).map(|s| gen_random(&p, 40 + s).unwrap()).collect()
}

#[test]
fn corrupt_stubs_are_caught_with_replays() {
    let insts = instances(30);
    let honest = AlgoSolver { algo: Algo::Hwpoly, seed: 0 };
    let solvers: [&dyn Solver; 3] = [&honest, &Liar, &Hoarder];
    let report = run_differential(&insts, &solvers, &Budget::default(), 9);
    assert!(!report.passed());
    assert!(report.excluded.is_empty());
    assert!(report.harness_bugs.is_empty());
    assert_eq!(report.records.len(), 90);

    let liar: Vec<_> = report.failures.iter().filter(|f| f.solver == "liar").collect();
    assert!(liar.iter().all(|f| matches!(f.failure, FailureKind::Disagreement { .. } | FailureKind::MissingWitness)));
    let disagreements = liar.iter().filter(|f| matches!(f.failure, FailureKind::Disagreement { .. })).count();
    assert_eq!(disagreements, 30, "the liar is wrong on every instance");

    let hoarder_invalid = report
        .failures
        .iter()
        .filter(|f| f.solver == "hoarder" && matches!(f.failure, FailureKind::InvalidWitness { .. }))
        .count();
    assert!(hoarder_invalid > 0);
    assert!(report.failures.iter().all(|f| f.solver != "hwpoly"));

    for f in &report.failures {
        let replayed = parse_instance(&f.replay).unwrap();
        assert_eq!(replayed, insts[f.instance_id], "replay bundle must reproduce the instance");
    }
}

#[test]
fn refusals_are_harness_bugs_and_timeouts_are_not_failures() {
    let insts = instances(5);
    let solvers: [&dyn Solver; 2] = [&Refuser, &Sleeper];
    let report = run_differential(&insts, &solvers, &Budget::default(), 1);
    assert!(report.failures.is_empty());
    assert_eq!(report.harness_bugs.len(), 5);
    assert!(!report.passed());
    for r in &report.records {
        let want = if r.solver == "refuser" { Outcome::Refused } else { Outcome::Timeout };
        assert_eq!(r.answer, want);
    }
}

#[test]
fn suites_are_reproducible_and_clean() {
    let spec: SuiteSpec = serde_json::from_str(
        r#"{
            "seed": 17,
            "solvers": ["auto", "hwpoly", "nonedges-partition", "oracle"],
            "profiles": [
                {"count": 8, "m": 7, "n": 2, "completeness": "partial", "size_bound": 3,
                 "edge_probability": 0.4, "utility_range": [0, 4],
                 "eta_rule": {"kind": "fraction_of_share", "value": 0.8},
                 "structure": {"kind": "free"}},
                {"count": 8, "m": 6, "n": 2, "completeness": "complete", "size_bound": 3,
                 "edge_probability": 0.4, "utility_range": [0, 4],
                 "eta_rule": {"kind": "fixed", "value": 2},
                 "structure": {"kind": "missing_edges", "value": 3}}
            ]
        }"#,
    )
    .unwrap();
    let a = spec.run(&Budget::default()).unwrap();
    assert!(a.passed(), "{:?} {:?}", a.failures, a.harness_bugs);
    assert_eq!(a.records.len(), 64);
    let b = spec.run(&Budget::default()).unwrap();
    let strip = |r: &cffa_core::bench::DifferentialReport| {
        r.records.iter().map(|x| (x.instance_id, x.solver.clone(), x.answer)).collect::<Vec<_>>()
    };
    assert_eq!(strip(&a), strip(&b));
    assert_eq!(spec.instances().unwrap(), spec.instances().unwrap());
}

#[test]
fn unknown_solver_names_are_rejected() {
    let spec = SuiteSpec {
        seed: 0,
        solvers: vec!["quantum".into()],
        profiles: vec![],
        budget_nodes: None,
    };
    assert!(spec.run(&Budget::default()).is_err());
}

#[test]
fn scaling_reports_one_row_per_point() {
    let sweep: Vec<(f64, Vec<Instance>)> = (6..=9)
        .map(|m| {
            let p = common::profile(m, 2, Completeness::Partial, None, Structure::Free);
            (m as f64, (0..3).map(|s| gen_random(&p, s).unwrap()).collect())
        })
        .collect();
    let solver = AlgoSolver { algo: Algo::Hwpoly, seed: 0 };
    let rep = run_scaling(&solver, &sweep, 2, &Budget::default());
    assert_eq!(rep.rows.len(), 4);
    assert!(rep.rows.iter().all(|r| r.runs == 6 && r.timeouts == 0 && r.median_micros.is_some()));
    assert!(rep.log2_slope.is_some());

    let rep = run_scaling(&Sleeper, &sweep, 1, &Budget::default());
    assert!(rep.rows.iter().all(|r| r.timeouts == 3 && r.median_micros.is_none()));
    assert_eq!(rep.log2_slope, None);
}
