//! Differential testing against the oracle, and timing sweeps.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::budget::Budget;
use crate::error::{CffaError, Result};
use crate::generators::{gen_random, RandomProfile};
use crate::instance::{verify_assignment, write_instance, Answer, Instance, SolveResult};
use crate::oracle::solve_oracle;
use crate::portfolio::{solve, Algo, SolveOptions};

pub trait Solver: Sync {
    fn name(&self) -> String;
    fn solve(&self, inst: &Instance, budget: &Budget) -> Result<SolveResult>;
}

/// A portfolio algorithm as a [`Solver`].
#[derive(Debug, Clone, Copy)]
pub struct AlgoSolver {
    pub algo: Algo,
    pub seed: u64,
}

impl Solver for AlgoSolver {
    fn name(&self) -> String {
        self.algo.to_string()
    }

    fn solve(&self, inst: &Instance, budget: &Budget) -> Result<SolveResult> {
        let opts = SolveOptions {
            budget: *budget,
            seed: self.seed,
            repetitions: None,
        };
        Ok(solve(inst, self.algo, &opts)?.result)
    }
}

/// What a solver run ended with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Yes,
    No,
    /// Budget or time limit hit; not a failure.
    Timeout,
    /// The solver refused the instance: a bug in the suite, not the solver.
    Refused,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Record {
    pub instance_id: usize,
    pub solver: String,
    pub answer: Outcome,
    /// Whether the witness verified; `None` without a witness.
    pub verified: Option<bool>,
    pub micros: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum FailureKind {
    Disagreement { expected: Answer, got: Answer },
    InvalidWitness { reason: String },
    /// Yes without a witness.
    MissingWitness,
    SolverError { message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub instance_id: usize,
    pub solver: String,
    pub failure: FailureKind,
    /// The instance document, for replay.
    pub replay: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HarnessBug {
    pub instance_id: usize,
    pub solver: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DifferentialReport {
    pub seed: u64,
    pub instances: usize,
    pub records: Vec<Record>,
    pub failures: Vec<Failure>,
    pub harness_bugs: Vec<HarnessBug>,
    /// Instances the oracle could not decide; not scored.
    pub excluded: Vec<usize>,
}

impl DifferentialReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.harness_bugs.is_empty()
    }

    /// Line-delimited JSON: a header with the seed, then one record per run.
    pub fn to_lines(&self) -> Vec<String> {
        let header = json!({
            "seed": self.seed,
            "instances": self.instances,
            "failures": self.failures,
            "harnessBugs": self.harness_bugs,
            "excluded": self.excluded,
        });
        std::iter::once(header.to_string())
            .chain(self.records.iter().map(|r| serde_json::to_string(r).expect("records serialize")))
            .collect()
    }
}

struct InstanceRun {
    records: Vec<Record>,
    failures: Vec<Failure>,
    bugs: Vec<HarnessBug>,
    excluded: bool,
}

/// Runs every solver on every instance (instances in parallel, results in
/// input order) and scores each run against the oracle.
pub fn run_differential(instances: &[Instance], solvers: &[&dyn Solver], budget: &Budget, seed: u64) -> DifferentialReport {
    let runs: Vec<InstanceRun> = instances
        .par_iter()
        .enumerate()
        .map(|(id, inst)| run_instance(id, inst, solvers, budget))
        .collect();
    let mut report = DifferentialReport {
        seed,
        instances: instances.len(),
        ..Default::default()
    };
    for (id, run) in runs.into_iter().enumerate() {
        report.records.extend(run.records);
        report.failures.extend(run.failures);
        report.harness_bugs.extend(run.bugs);
        if run.excluded {
            report.excluded.push(id);
        }
    }
    report
}

fn run_instance(id: usize, inst: &Instance, solvers: &[&dyn Solver], budget: &Budget) -> InstanceRun {
    let truth = solve_oracle(inst, budget).ok().map(|r| r.answer);
    let mut run = InstanceRun {
        records: Vec::with_capacity(solvers.len()),
        failures: Vec::new(),
        bugs: Vec::new(),
        excluded: truth.is_none(),
    };
    let fail = |solver: &str, failure| Failure {
        instance_id: id,
        solver: solver.to_string(),
        failure,
        replay: write_instance(inst),
    };
    for solver in solvers {
        let name = solver.name();
        let start = Instant::now();
        let outcome = solver.solve(inst, budget);
        let micros = start.elapsed().as_micros() as u64;
        let (answer, verified) = match outcome {
            Ok(result) => {
                let verified = result.witness.as_ref().map(|w| match verify_assignment(inst, w) {
                    Ok(Ok(())) => Ok(()),
                    Ok(Err(v)) => Err(v.to_string()),
                    Err(e) => Err(e.to_string()),
                });
                match (&result.answer, &verified) {
                    (_, Some(Err(reason))) => {
                        run.failures.push(fail(&name, FailureKind::InvalidWitness { reason: reason.clone() }))
                    }
                    (Answer::Yes, None) => run.failures.push(fail(&name, FailureKind::MissingWitness)),
                    _ => {}
                }
                if let Some(expected) = truth {
                    if expected != result.answer {
                        run.failures.push(fail(
                            &name,
                            FailureKind::Disagreement {
                                expected,
                                got: result.answer,
                            },
                        ));
                    }
                }
                let answer = match result.answer {
                    Answer::Yes => Outcome::Yes,
                    Answer::No => Outcome::No,
                };
                (answer, verified.map(|v| v.is_ok()))
            }
            Err(CffaError::BudgetExceeded(_)) => (Outcome::Timeout, None),
            Err(
                e @ (CffaError::Precondition(_) | CffaError::MaskWidth { .. } | CffaError::Inapplicable(_)),
            ) => {
                run.bugs.push(HarnessBug {
                    instance_id: id,
                    solver: name.clone(),
                    message: e.to_string(),
                });
                (Outcome::Refused, None)
            }
            Err(e) => {
                run.failures.push(fail(&name, FailureKind::SolverError { message: e.to_string() }));
                (Outcome::Error, None)
            }
        };
        run.records.push(Record {
            instance_id: id,
            solver: name,
            answer,
            verified,
            micros,
        });
    }
    run
}

/// A differential suite: random profiles, solvers by name, and a seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSpec {
    #[serde(default)]
    pub seed: u64,
    pub solvers: Vec<String>,
    pub profiles: Vec<SuiteProfile>,
    #[serde(default)]
    pub budget_nodes: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteProfile {
    pub count: usize,
    #[serde(flatten)]
    pub profile: RandomProfile,
}

impl SuiteSpec {
    /// Instance `k` of profile `p` uses seed `seed + 1_000_003·p + k`.
    pub fn instances(&self) -> Result<Vec<Instance>> {
        let mut out = Vec::new();
        for (p, sp) in self.profiles.iter().enumerate() {
            for k in 0..sp.count {
                let seed = self
                    .seed
                    .wrapping_add(1_000_003u64.wrapping_mul(p as u64))
                    .wrapping_add(k as u64);
                out.push(gen_random(&sp.profile, seed)?);
            }
        }
        Ok(out)
    }

    pub fn run(&self, base: &Budget) -> Result<DifferentialReport> {
        let algos = self
            .solvers
            .iter()
            .map(|s| s.parse::<Algo>())
            .collect::<Result<Vec<_>>>()?;
        let solvers: Vec<AlgoSolver> = algos.into_iter().map(|algo| AlgoSolver { algo, seed: self.seed }).collect();
        let refs: Vec<&dyn Solver> = solvers.iter().map(|s| s as &dyn Solver).collect();
        let budget = match self.budget_nodes {
            Some(n) => base.with_nodes(n),
            None => *base,
        };
        Ok(run_differential(&self.instances()?, &refs, &budget, self.seed))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    /// The swept parameter (m, t, n·s, …).
    pub x: f64,
    /// Median over the runs that finished; `None` if none did.
    pub median_micros: Option<f64>,
    pub runs: usize,
    pub timeouts: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub solver: String,
    pub rows: Vec<ScalingRow>,
    /// Least-squares slope of log₂(time) against x: bits per unit of x.
    pub log2_slope: Option<f64>,
    /// Least-squares slope of log₂(time) against log₂(x): the polynomial
    /// degree, for polynomial-time solvers.
    pub loglog_slope: Option<f64>,
}

/// Times `solver` on each group of instances (sequentially, `repeats`
/// times each) and fits the growth rate. Budget errors count as timeouts.
pub fn run_scaling(solver: &dyn Solver, sweep: &[(f64, Vec<Instance>)], repeats: usize, budget: &Budget) -> ScalingReport {
    let rows: Vec<ScalingRow> = sweep
        .iter()
        .map(|(x, instances)| {
            let mut times = Vec::new();
            let mut timeouts = 0;
            for inst in instances {
                for _ in 0..repeats.max(1) {
                    let start = Instant::now();
                    match solver.solve(inst, budget) {
                        Ok(_) => times.push(start.elapsed().as_secs_f64() * 1e6),
                        Err(_) => timeouts += 1,
                    }
                }
            }
            ScalingRow {
                x: *x,
                median_micros: median(&mut times),
                runs: instances.len() * repeats.max(1),
                timeouts,
            }
        })
        .collect();
    let points = |f: fn(f64) -> f64| -> Vec<(f64, f64)> {
        rows.iter()
            .filter_map(|r| r.median_micros.filter(|&t| t > 0.0).map(|t| (f(r.x), t.log2())))
            .collect()
    };
    ScalingReport {
        solver: solver.name(),
        log2_slope: fit_slope(&points(|x| x)),
        loglog_slope: fit_slope(&points(f64::log2)),
        rows,
    }
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let k = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[k]
    } else {
        (values[k - 1] + values[k]) / 2.0
    })
}

/// Ordinary least-squares slope; needs two distinct x values.
pub fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (points.len() >= 2 && sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_line() {
        let pts: Vec<(f64, f64)> = (0..5).map(|x| (x as f64, 3.0 + 2.0 * x as f64)).collect();
        assert!((fit_slope(&pts).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(fit_slope(&pts[..1]), None);
    }

    #[test]
    fn medians() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&mut [4.0, 1.0]), Some(2.5));
        assert_eq!(median(&mut []), None);
    }

    #[test]
    fn suite_runs_clean() {
        let spec: SuiteSpec = serde_json::from_value(json!({
            "seed": 3,
            "solvers": ["oracle", "hwpoly"],
            "profiles": [{
                "count": 6, "m": 6, "n": 2, "completeness": "partial",
                "edge_probability": 0.3, "utility_range": [0, 4],
                "eta_rule": {"kind": "fixed", "value": 3},
                "structure": {"kind": "free"}
            }]
        }))
        .unwrap();
        let report = spec.run(&Budget::default()).unwrap();
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.records.len(), 12);
        let lines = report.to_lines();
        assert!(lines[0].contains("\"seed\":3"));
        assert!(lines[1].contains("instanceId"));
    }
}
