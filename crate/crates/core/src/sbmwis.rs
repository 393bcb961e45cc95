//! Size-bounded maximum-weight independent set: find an independent set of
//! at most `k` vertices with total weight at least `rho`.

use crate::budget::{Budget, Meter};
use crate::error::{CffaError, Result};
use crate::graph::{binomial, ramsey_upper_bound, BitIter, Graph};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedGraph {
    graph: Graph,
    weights: Vec<u64>,
}

impl WeightedGraph {
    pub fn new(graph: Graph, weights: Vec<u64>) -> Result<Self> {
        if weights.len() != graph.vertex_count() {
            return Err(CffaError::Precondition(format!(
                "{} weights for {} vertices",
                weights.len(),
                graph.vertex_count()
            )));
        }
        if !graph.fits_in_word() {
            return Err(CffaError::MaskWidth {
                jobs: graph.vertex_count(),
                limit: 64,
            });
        }
        Ok(WeightedGraph { graph, weights })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn weight_of(&self, set: &[usize]) -> u128 {
        set.iter().map(|&v| self.weights[v] as u128).sum()
    }

    fn all(&self) -> u64 {
        match self.graph.vertex_count() {
            64 => !0,
            n => (1u64 << n) - 1,
        }
    }

    /// Independent, at most `k` vertices, weight at least `rho`.
    pub fn is_solution(&self, set: &[usize], k: usize, rho: u64) -> bool {
        set.len() <= k && self.graph.is_independent(set) && self.weight_of(set) >= rho as u128
    }
}

/// A graph class with a known independence guarantee.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphClassDecl {
    Bipartite,
    TriangleFree,
    Planar,
    Degenerate(usize),
    /// No clique on ℓ vertices (ℓ ≥ 2).
    CliqueFree(usize),
    Unrestricted,
}

/// Smallest vertex count that guarantees an independent set of size `k` in
/// every graph of the class.
pub fn f_inverse(decl: GraphClassDecl, k: usize) -> Result<usize> {
    if matches!(decl, GraphClassDecl::Unrestricted) {
        return Err(CffaError::Precondition(
            "the unrestricted class has no independence guarantee".into(),
        ));
    }
    if k == 0 {
        return Ok(0);
    }
    let overflow = || CffaError::Overflow(format!("independence bound for {decl:?}, k={k}"));
    let k64 = k as u64;
    let value = match decl {
        GraphClassDecl::Bipartite => k64.checked_mul(2),
        GraphClassDecl::TriangleFree => binomial(k64 + 1, 2),
        GraphClassDecl::Planar => k64.checked_mul(4),
        GraphClassDecl::Degenerate(d) => k64.checked_mul(d as u64 + 1),
        GraphClassDecl::CliqueFree(l) => {
            if l < 2 {
                return Err(CffaError::Precondition(format!(
                    "clique-free class needs ℓ ≥ 2, got {l}"
                )));
            }
            Some(ramsey_upper_bound(l as u64, k64)?)
        }
        GraphClassDecl::Unrestricted => unreachable!(),
    };
    value
        .and_then(|v| usize::try_from(v).ok())
        .ok_or_else(overflow)
}

/// Exhaustive search over independent sets of at most `k` vertices.
pub fn sbmwis_bruteforce(wg: &WeightedGraph, k: usize, rho: u64, budget: &Budget) -> Result<Option<Vec<usize>>> {
    let mut meter = budget.meter("sbmwis brute force");
    let mut set = Vec::new();
    let found = scan(wg, k, rho as u128, wg.all(), 0, &mut set, &mut meter)?;
    Ok(found.then_some(set).filter(|s| wg.is_solution(s, k, rho)))
}

/// Exhaustive search without a size bound.
pub fn mwis_unbounded_bruteforce(wg: &WeightedGraph, rho: u64, budget: &Budget) -> Result<Option<Vec<usize>>> {
    sbmwis_bruteforce(wg, wg.graph.vertex_count(), rho, budget)
}

fn scan(
    wg: &WeightedGraph,
    k: usize,
    rho: u128,
    candidates: u64,
    weight: u128,
    set: &mut Vec<usize>,
    meter: &mut Meter,
) -> Result<bool> {
    meter.tick()?;
    if weight >= rho {
        return Ok(true);
    }
    if set.len() == k {
        return Ok(false);
    }
    let reachable: u128 = BitIter(candidates).map(|v| wg.weights[v] as u128).sum();
    if weight + reachable < rho {
        return Ok(false);
    }
    for v in BitIter(candidates) {
        set.push(v);
        let rest = candidates & !wg.graph.mask(v) & !(u64::MAX >> (63 - v));
        if scan(wg, k, rho, rest, weight + wg.weights[v] as u128, set, meter)? {
            return Ok(true);
        }
        set.pop();
    }
    Ok(false)
}

/// Branching on high-weight vertices, with the class guarantee used to stop
/// early once enough high-weight vertices exist.
///
/// Every solution contains a vertex `v` with `k·w(v) ≥ rho`, so branching on
/// those vertices is exhaustive. When at least `f_inverse(decl, k)` of them
/// exist, an independent `k`-subset among the first `f_inverse` of them is
/// guaranteed for graphs in the class. If the graph is not in the class and
/// no such subset exists, the search falls back to branching, so the answer
/// stays exact.
pub fn sbmwis_ifc(
    wg: &WeightedGraph,
    decl: GraphClassDecl,
    k: usize,
    rho: u64,
    budget: &Budget,
) -> Result<Option<Vec<usize>>> {
    // Fails early for Unrestricted.
    f_inverse(decl, k)?;
    let mut meter = budget.meter("sbmwis branching");
    let found = branch(wg, decl, k, rho, wg.all(), &mut meter)?;
    Ok(found
        .map(|mut s| {
            s.sort_unstable();
            s
        })
        .filter(|s| wg.is_solution(s, k, rho)))
}

fn branch(
    wg: &WeightedGraph,
    decl: GraphClassDecl,
    k: usize,
    rho: u64,
    alive: u64,
    meter: &mut Meter,
) -> Result<Option<Vec<usize>>> {
    meter.tick()?;
    if rho == 0 {
        return Ok(Some(Vec::new()));
    }
    if k == 0 {
        return Ok(None);
    }
    let high: Vec<usize> = BitIter(alive)
        .filter(|&v| k as u128 * wg.weights[v] as u128 >= rho as u128)
        .collect();
    let f = f_inverse(decl, k)?;
    if high.len() >= f {
        if let Some(s) = independent_k_subset(wg, &high[..f], k, meter)? {
            return Ok(Some(s));
        }
    }
    for &v in &high {
        let rest = alive & !wg.graph.mask(v) & !(1 << v);
        if let Some(mut s) = branch(wg, decl, k - 1, rho.saturating_sub(wg.weights[v]), rest, meter)? {
            s.push(v);
            return Ok(Some(s));
        }
    }
    Ok(None)
}

/// First independent `k`-subset of `pool` in lexicographic order.
fn independent_k_subset(wg: &WeightedGraph, pool: &[usize], k: usize, meter: &mut Meter) -> Result<Option<Vec<usize>>> {
    fn go(
        wg: &WeightedGraph,
        pool: &[usize],
        k: usize,
        start: usize,
        used: u64,
        set: &mut Vec<usize>,
        meter: &mut Meter,
    ) -> Result<bool> {
        meter.tick()?;
        if set.len() == k {
            return Ok(true);
        }
        for i in start..pool.len() {
            if pool.len() - i < k - set.len() {
                break;
            }
            let v = pool[i];
            if wg.graph.mask(v) & used != 0 {
                continue;
            }
            set.push(v);
            if go(wg, pool, k, i + 1, used | 1 << v, set, meter)? {
                return Ok(true);
            }
            set.pop();
        }
        Ok(false)
    }
    let mut set = Vec::with_capacity(k);
    Ok(go(wg, pool, k, 0, 0, &mut set, meter)?.then_some(set))
}
