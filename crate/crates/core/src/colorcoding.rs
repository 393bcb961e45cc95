//! Color coding for the partial variants.
//!
//! Given a coloring of the jobs with `q` colors, the table entry `T[i][S]`
//! records whether agents `0..=i` can receive bundles whose colors are
//! pairwise-disjoint subsets of `S`. A yes from the table is always a real
//! solution; it is guaranteed to be found when some solution's jobs receive
//! distinct colors. Repeating over random colorings, or over every member of
//! a perfect hash family, turns this into a one-sided randomized algorithm or
//! an exact deterministic one.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::budget::Budget;
use crate::error::{CffaError, Result};
use crate::graph::{BitIter, Graph};
use crate::instance::{is_valid, Assignment, Instance, SolveResult};
use crate::perfect_hash::perfect_hash_family;
use crate::sbmwis::{mwis_unbounded_bruteforce, sbmwis_bruteforce, sbmwis_ifc, GraphClassDecl, WeightedGraph};

/// Largest number of colors the table accepts.
pub const MAX_COLORS: usize = 20;

/// How single-agent bundles inside a color class are found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BundleOracle {
    /// Exhaustive independent-set search.
    #[default]
    BruteForce,
    /// High-weight branching, declaring each induced subgraph's degeneracy.
    Branching,
}

#[derive(Debug, Clone)]
pub struct ColorDpTable {
    q: usize,
    /// `bundle[i][S]`: a feasible bundle for agent `i` using colors in `S`.
    bundle: Vec<Vec<Option<u64>>>,
    /// `split[i][S]`: for `i ≥ 1`, the colors `S'` left to agents before `i`.
    split: Vec<Vec<Option<u32>>>,
}

impl ColorDpTable {
    pub fn colors(&self) -> usize {
        self.q
    }

    pub fn entry(&self, agent: usize, colors: u32) -> bool {
        if agent == 0 {
            self.bundle[0][colors as usize].is_some()
        } else {
            self.split[agent][colors as usize].is_some()
        }
    }

    /// Bundles for agents `0..=agent` realizing `T[agent][colors]`.
    pub fn witness(&self, agent: usize, mut colors: u32) -> Option<Vec<u64>> {
        if !self.entry(agent, colors) {
            return None;
        }
        let mut out = vec![0; agent + 1];
        for i in (1..=agent).rev() {
            let s = self.split[i][colors as usize].expect("entry is set");
            out[i] = self.bundle[i][(colors & !s) as usize].expect("split is feasible");
            colors = s;
        }
        out[0] = self.bundle[0][colors as usize].expect("base entry is set");
        Some(out)
    }
}

fn require_partial(inst: &Instance) -> Result<()> {
    if inst.is_complete() {
        return Err(CffaError::Precondition(
            "color coding handles the partial variants only".into(),
        ));
    }
    if inst.m() > 64 {
        return Err(CffaError::MaskWidth {
            jobs: inst.m(),
            limit: 64,
        });
    }
    Ok(())
}

/// Fills the table for `coloring` (colors in `0..q`).
pub fn colorful_table(
    inst: &Instance,
    coloring: &[u8],
    q: usize,
    oracle: BundleOracle,
    budget: &Budget,
) -> Result<ColorDpTable> {
    require_partial(inst)?;
    if q == 0 || q > MAX_COLORS {
        return Err(CffaError::BudgetExceeded(format!(
            "color-coding table with {q} colors (limit {MAX_COLORS})"
        )));
    }
    if coloring.len() != inst.m() || coloring.iter().any(|&c| c as usize >= q) {
        return Err(CffaError::Precondition(format!(
            "coloring must map all {} jobs into 0..{q}",
            inst.m()
        )));
    }
    let n = inst.n();
    let cells = 1usize << q;
    let mut meter = budget.meter("color-coding table");
    meter.charge((n * cells) as u64)?;

    let mut class_jobs = vec![0u64; q];
    for (x, &c) in coloring.iter().enumerate() {
        class_jobs[c as usize] |= 1 << x;
    }
    let jobs_of = |s: usize| -> u64 {
        BitIter(s as u64).fold(0, |acc, c| acc | class_jobs[c])
    };

    let mut bundle = vec![vec![None; cells]; n];
    for (i, row) in bundle.iter_mut().enumerate() {
        for s in 1..cells {
            // Feasibility is monotone in S: reuse a bundle found for S − {c}.
            let inherited = BitIter(s as u64).find_map(|c| row[s & !(1 << c)]);
            row[s] = match inherited {
                Some(b) => Some(b),
                None => single_bundle(inst, i, jobs_of(s), oracle, budget)?,
            };
        }
    }

    let mut split = vec![vec![None; cells]; n];
    for i in 1..n {
        for s in 1..cells as u32 {
            meter.charge(1u64 << (s.count_ones()))?;
            // Proper non-empty submasks S' of S in ascending order.
            let mut sub = 0u32;
            loop {
                sub = sub.wrapping_sub(s) & s;
                if sub == s || sub == 0 {
                    break;
                }
                let prev = if i == 1 {
                    bundle[0][sub as usize].is_some()
                } else {
                    split[i - 1][sub as usize].is_some()
                };
                if prev && bundle[i][(s & !sub) as usize].is_some() {
                    split[i][s as usize] = Some(sub);
                    break;
                }
            }
        }
    }
    Ok(ColorDpTable { q, bundle, split })
}

/// A feasible bundle for `agent` inside `jobs`, or `None`.
fn single_bundle(inst: &Instance, agent: usize, jobs: u64, oracle: BundleOracle, budget: &Budget) -> Result<Option<u64>> {
    let members: Vec<usize> = BitIter(jobs).collect();
    let g: Graph = inst.graph().induced(&members);
    let weights = members.iter().map(|&x| inst.utility(agent, x)).collect();
    let wg = WeightedGraph::new(g, weights)?;
    let found = match (oracle, inst.size_bound()) {
        (BundleOracle::BruteForce, Some(s)) => sbmwis_bruteforce(&wg, s, inst.eta(), budget)?,
        (BundleOracle::BruteForce, None) => mwis_unbounded_bruteforce(&wg, inst.eta(), budget)?,
        (BundleOracle::Branching, s) => {
            let k = s.unwrap_or(members.len());
            let d = wg.graph().degeneracy_ordering().1;
            sbmwis_ifc(&wg, GraphClassDecl::Degenerate(d), k, inst.eta(), budget)?
        }
    };
    Ok(found.map(|set| set.iter().fold(0, |acc, &v| acc | 1 << members[v])))
}

/// Solves with one fixed coloring. A yes is always correct; a no only means
/// no colorful solution exists for this coloring.
pub fn dp_colorful_solve(
    inst: &Instance,
    coloring: &[u8],
    q: usize,
    oracle: BundleOracle,
    budget: &Budget,
) -> Result<SolveResult> {
    if inst.n() > inst.m() {
        return Ok(SolveResult::no());
    }
    let table = colorful_table(inst, coloring, q, oracle, budget)?;
    let last = inst.n() - 1;
    let found = (1..1u32 << q).find_map(|s| table.witness(last, s));
    match found {
        Some(bundles) => {
            let a = Assignment::from_masks(&bundles);
            if !is_valid(inst, &a) {
                return Err(CffaError::Precondition(
                    "color-coding table produced an invalid witness".into(),
                ));
            }
            Ok(SolveResult::yes(a))
        }
        None => Ok(SolveResult::no()),
    }
}

/// Number of colors for bundle cap `s`: `n·s`, capped at `m` (a coloring
/// with `m` colors can already separate every job).
pub fn color_count(inst: &Instance, s: usize) -> usize {
    (inst.n().saturating_mul(s)).min(inst.m())
}

/// `⌈e^q⌉` colorings: each is colorful on a fixed solution with probability
/// at least `e^{-q}`.
pub fn default_repetitions(q: usize) -> u64 {
    (q as f64).exp().ceil() as u64
}

#[derive(Debug, Clone, Default)]
pub struct RandomizedOptions {
    pub seed: u64,
    /// Overrides `⌈e^q⌉`.
    pub repetitions: Option<u64>,
    pub oracle: BundleOracle,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomizedOutcome {
    pub result: SolveResult,
    /// Colorings tried across all bundle caps.
    pub colorings: u64,
}

/// Uniformly random colorings; repetition `r` draws from stream `r` of a
/// ChaCha generator keyed by the seed. Unbounded instances are tried with
/// caps `s = 1..=m`.
pub fn solve_colorcoding_randomized(inst: &Instance, opts: &RandomizedOptions, budget: &Budget) -> Result<RandomizedOutcome> {
    require_partial(inst)?;
    let mut colorings = 0;
    if inst.n() > inst.m() {
        return Ok(RandomizedOutcome {
            result: SolveResult::no(),
            colorings,
        });
    }
    for (s, bounded) in caps(inst)? {
        let q = color_count(inst, s);
        let reps = opts.repetitions.unwrap_or_else(|| default_repetitions(q));
        for _ in 0..reps {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(colorings);
            colorings += 1;
            let coloring: Vec<u8> = (0..inst.m()).map(|_| rng.gen_range(0..q as u8)).collect();
            let r = dp_colorful_solve(&bounded, &coloring, q, opts.oracle, budget)?;
            if r.is_yes() {
                return Ok(RandomizedOutcome { result: r, colorings });
            }
        }
    }
    Ok(RandomizedOutcome {
        result: SolveResult::no(),
        colorings,
    })
}

/// Every member of an `(m, q)`-perfect hash family; exact. Unbounded
/// instances are tried with caps `s = 1..=m`.
pub fn solve_colorcoding_deterministic(inst: &Instance, oracle: BundleOracle, budget: &Budget) -> Result<SolveResult> {
    require_partial(inst)?;
    if inst.n() > inst.m() {
        return Ok(SolveResult::no());
    }
    for (s, bounded) in caps(inst)? {
        let q = color_count(inst, s);
        if q > MAX_COLORS {
            return Err(CffaError::BudgetExceeded(format!(
                "color coding needs {q} colors (limit {MAX_COLORS})"
            )));
        }
        let family = perfect_hash_family(inst.m(), q)?;
        for coloring in &family.functions {
            let r = dp_colorful_solve(&bounded, coloring, q, oracle, budget)?;
            if r.is_yes() {
                return Ok(r);
            }
        }
    }
    Ok(SolveResult::no())
}

/// The bundle caps to try, each with the instance it is tried on.
fn caps(inst: &Instance) -> Result<Vec<(usize, Instance)>> {
    match inst.size_bound() {
        Some(s) => Ok(vec![(s, inst.clone())]),
        None => (1..=inst.m())
            .map(|s| Ok((s, inst.with_size_bound(Some(s))?)))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Completeness;

    fn sbp(u: Vec<Vec<u64>>, e: Vec<(usize, usize)>, eta: u64, s: usize) -> Instance {
        let m = u[0].len();
        Instance::new(Completeness::Partial, Some(s), m, u, e, eta).unwrap()
    }

    #[test]
    fn single_agent_uses_all_colors() {
        let i = sbp(vec![vec![1, 2, 3, 4]], vec![(2, 3)], 6, 2);
        let r = dp_colorful_solve(&i, &[0, 1, 0, 1], 2, BundleOracle::BruteForce, &Budget::default()).unwrap();
        assert!(r.is_yes());
        assert_eq!(r.witness.unwrap().bundles(1), vec![vec![1, 3]]);
    }

    #[test]
    fn collapsed_coloring_misses_the_only_solution() {
        // Two agents each need their own job; a single color cannot split.
        let i = sbp(vec![vec![1, 0], vec![0, 1]], vec![], 1, 1);
        let b = Budget::default();
        assert!(!dp_colorful_solve(&i, &[0, 0], 2, BundleOracle::BruteForce, &b).unwrap().is_yes());
        assert!(dp_colorful_solve(&i, &[0, 1], 2, BundleOracle::BruteForce, &b).unwrap().is_yes());
        assert!(solve_colorcoding_deterministic(&i, BundleOracle::BruteForce, &b).unwrap().is_yes());
    }

    #[test]
    fn rejects_complete() {
        let i = Instance::new(Completeness::Complete, Some(1), 1, vec![vec![1]], vec![], 1).unwrap();
        assert!(solve_colorcoding_deterministic(&i, BundleOracle::BruteForce, &Budget::default()).is_err());
    }

    #[test]
    fn randomized_is_reproducible() {
        let i = sbp(vec![vec![1, 1, 0, 2], vec![0, 1, 1, 2]], vec![(0, 1), (2, 3)], 2, 2);
        let opts = RandomizedOptions {
            seed: 7,
            ..Default::default()
        };
        let b = Budget::default();
        let a = solve_colorcoding_randomized(&i, &opts, &b).unwrap();
        assert_eq!(a, solve_colorcoding_randomized(&i, &opts, &b).unwrap());
        assert!(a.result.is_yes());
    }

    #[test]
    fn repetition_counts() {
        assert_eq!(default_repetitions(0), 1);
        assert_eq!(default_repetitions(1), 3);
        assert_eq!(default_repetitions(6), 404);
    }
}
