//! One entry point over every solver, with structure-based dispatch.

use std::fmt;
use std::str::FromStr;

use crate::budget::Budget;
use crate::colorcoding::{
    solve_colorcoding_deterministic, solve_colorcoding_randomized, BundleOracle, RandomizedOptions,
};
use crate::error::{CffaError, Result};
use crate::hwpoly::solve_hwpoly;
use crate::instance::{verify_assignment, Instance, SolveResult};
use crate::oracle::solve_oracle;
use crate::structured::{
    detect_structure, solve_nonedges_guess, solve_nonedges_partition, solve_s1_matching,
    solve_twoclique_uniform, StructureReport,
};

/// Largest job count `auto` hands to the mask-polynomial solver.
pub const AUTO_HWPOLY_MAX_JOBS: usize = 20;
/// Largest number of missing edges `auto` hands to the non-edge solver.
pub const AUTO_MAX_MISSING_EDGES: usize = 4;
/// Largest `n·s` (and job count) `auto` hands to deterministic color coding.
pub const AUTO_COLORCODE_MAX_COLORS: usize = 6;
pub const AUTO_COLORCODE_MAX_JOBS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algo {
    Auto,
    Oracle,
    Hwpoly,
    ColorcodeRand,
    ColorcodeDet,
    S1,
    NonedgesGuess,
    NonedgesPartition,
    Twoclique,
    /// Deterministic color coding whose per-agent bundles come from the
    /// high-weight independent-set branching.
    SbmwisRoute,
}

impl Algo {
    pub const ALL: [Algo; 10] = [
        Algo::Auto,
        Algo::Oracle,
        Algo::Hwpoly,
        Algo::ColorcodeRand,
        Algo::ColorcodeDet,
        Algo::S1,
        Algo::NonedgesGuess,
        Algo::NonedgesPartition,
        Algo::Twoclique,
        Algo::SbmwisRoute,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algo::Auto => "auto",
            Algo::Oracle => "oracle",
            Algo::Hwpoly => "hwpoly",
            Algo::ColorcodeRand => "colorcode-rand",
            Algo::ColorcodeDet => "colorcode-det",
            Algo::S1 => "s1",
            Algo::NonedgesGuess => "nonedges-guess",
            Algo::NonedgesPartition => "nonedges-partition",
            Algo::Twoclique => "twoclique",
            Algo::SbmwisRoute => "sbmwis-route",
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algo {
    type Err = CffaError;

    fn from_str(s: &str) -> Result<Self> {
        Algo::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| CffaError::parse("algo", format!("unknown algorithm {s:?}")))
    }
}

#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    pub budget: Budget,
    pub seed: u64,
    /// Colorings per bundle cap for `colorcode-rand`.
    pub repetitions: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solved {
    pub result: SolveResult,
    /// The solver that produced the result (never `Auto`).
    pub algo: Algo,
}

/// The solver `auto` picks, or the reasons none applies.
pub fn choose_algo(inst: &Instance, report: &StructureReport, budget: &Budget) -> Result<Algo> {
    let ns = inst.size_bound().map(|s| inst.n().saturating_mul(s));
    Ok(if report.complete_graph || inst.size_bound() == Some(1) {
        Algo::S1
    } else if report.two_clique && report.uniform_utilities {
        Algo::Twoclique
    } else if report.missing_edges <= AUTO_MAX_MISSING_EDGES {
        Algo::NonedgesPartition
    } else if !inst.is_complete()
        && ns.is_some_and(|ns| ns <= AUTO_COLORCODE_MAX_COLORS)
        && inst.m() <= AUTO_COLORCODE_MAX_JOBS
    {
        Algo::ColorcodeDet
    } else if inst.m() <= AUTO_HWPOLY_MAX_JOBS {
        Algo::Hwpoly
    } else if inst.m() <= budget.max_jobs {
        Algo::Oracle
    } else {
        return Err(CffaError::Precondition(format!(
            "no solver applies: {} jobs exceeds the mask-polynomial limit {AUTO_HWPOLY_MAX_JOBS} \
             and the oracle limit {}; the conflict graph is not complete or two-clique, has {} \
             missing edges (limit {AUTO_MAX_MISSING_EDGES}), and the instance is not a small \
             size-bounded partial one",
            inst.m(),
            budget.max_jobs,
            report.missing_edges
        )));
    })
}

/// Runs `algo` and re-verifies any witness before returning it.
pub fn solve(inst: &Instance, algo: Algo, opts: &SolveOptions) -> Result<Solved> {
    let budget = &opts.budget;
    let algo = match algo {
        Algo::Auto => choose_algo(inst, &detect_structure(inst), budget)?,
        other => other,
    };
    let result = match algo {
        Algo::Auto => unreachable!("resolved above"),
        Algo::Oracle => solve_oracle(inst, budget)?,
        Algo::Hwpoly => solve_hwpoly(inst, budget)?,
        Algo::ColorcodeRand => {
            let ro = RandomizedOptions {
                seed: opts.seed,
                repetitions: opts.repetitions,
                oracle: BundleOracle::BruteForce,
            };
            solve_colorcoding_randomized(inst, &ro, budget)?.result
        }
        Algo::ColorcodeDet => solve_colorcoding_deterministic(inst, BundleOracle::BruteForce, budget)?,
        Algo::SbmwisRoute => solve_colorcoding_deterministic(inst, BundleOracle::Branching, budget)?,
        Algo::S1 => solve_s1_matching(inst)?,
        Algo::NonedgesGuess => solve_nonedges_guess(inst, budget)?,
        Algo::NonedgesPartition => solve_nonedges_partition(inst, budget)?,
        Algo::Twoclique => solve_twoclique_uniform(inst)?,
    };
    if let Some(w) = &result.witness {
        if let Err(v) = verify_assignment(inst, w)? {
            return Err(CffaError::Precondition(format!("{algo} returned an invalid witness: {v}")));
        }
    }
    Ok(Solved { result, algo })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::instance::Completeness;

    #[test]
    fn names_round_trip() {
        for a in Algo::ALL {
            assert_eq!(a.to_string().parse::<Algo>().unwrap(), a);
        }
        assert!("fast".parse::<Algo>().is_err());
    }

    #[test]
    fn auto_routes_complete_graphs_to_matching() {
        let i = Instance::new(Completeness::Partial, None, 4, vec![vec![1; 4]; 2], Graph::complete(4).edges(), 1)
            .unwrap();
        let s = solve(&i, Algo::Auto, &SolveOptions::default()).unwrap();
        assert_eq!(s.algo, Algo::S1);
        assert!(s.result.is_yes());
    }

    #[test]
    fn auto_refuses_with_reasons() {
        let m = 40;
        let i = Instance::new(Completeness::Partial, None, m, vec![vec![1; m]; 2], Graph::path(m).edges(), 1).unwrap();
        let err = choose_algo(&i, &detect_structure(&i), &Budget::default()).unwrap_err();
        assert!(err.to_string().contains("no solver applies"));
    }
}
