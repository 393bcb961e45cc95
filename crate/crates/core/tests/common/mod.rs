//! Independent reference solvers and instance strategies shared by the
//! integration tests. Nothing here calls the solvers under test.

#![allow(dead_code)]

use cffa_core::generators::{EtaRule, RandomProfile, Structure, ThreeDMInstance};
use cffa_core::graph::Graph;
use cffa_core::{Completeness, Instance};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Can the multiset be split into two halves of equal sum?
pub fn partition_exists(values: &[u64]) -> bool {
    let total: u64 = values.iter().sum();
    if total % 2 == 1 {
        return false;
    }
    (0u64..1 << values.len()).any(|mask| {
        values
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, v)| v)
            .sum::<u64>()
            * 2
            == total
    })
}

/// Proper k-colouring by backtracking over vertices in order.
pub fn k_colorable(g: &Graph, k: usize) -> bool {
    fn go(g: &Graph, k: usize, v: usize, color: &mut Vec<usize>) -> bool {
        if v == g.vertex_count() {
            return true;
        }
        for c in 0..k {
            if (0..v).all(|u| !g.has_edge(u, v) || color[u] != c) {
                color.push(c);
                if go(g, k, v + 1, color) {
                    return true;
                }
                color.pop();
            }
        }
        false
    }
    go(g, k, 0, &mut Vec::new())
}

pub fn edges_within(g: &Graph, mask: u64) -> bool {
    (0..g.vertex_count()).any(|u| mask >> u & 1 == 1 && (u + 1..g.vertex_count()).any(|v| mask >> v & 1 == 1 && g.has_edge(u, v)))
}

/// Independent set of exactly `k` vertices, by scanning every subset.
pub fn has_independent_set(g: &Graph, k: usize) -> bool {
    (0u64..1 << g.vertex_count()).any(|mask| mask.count_ones() as usize == k && !edges_within(g, mask))
}

/// Perfect 3-dimensional matching: one tuple per z, x's and y's distinct.
pub fn three_dm_exists(src: &ThreeDMInstance) -> bool {
    fn go(src: &ThreeDMInstance, z: usize, xs: &mut Vec<bool>, ys: &mut Vec<bool>) -> bool {
        if z == src.z_count {
            return true;
        }
        for &(x, y, tz) in &src.tuples {
            if tz == z && !xs[x] && !ys[y] {
                xs[x] = true;
                ys[y] = true;
                if go(src, z + 1, xs, ys) {
                    return true;
                }
                xs[x] = false;
                ys[y] = false;
            }
        }
        false
    }
    go(src, 0, &mut vec![false; src.z_count], &mut vec![false; src.z_count])
}

/// Independent set of at most `k` vertices with weight ≥ ρ, by scanning
/// every subset.
pub fn sbmwis_exists(g: &Graph, w: &[u64], k: usize, rho: u64) -> bool {
    (0u64..1 << g.vertex_count()).any(|mask| {
        mask.count_ones() as usize <= k
            && !edges_within(g, mask)
            && (0..g.vertex_count()).filter(|&v| mask >> v & 1 == 1).map(|v| w[v]).sum::<u64>() >= rho
    })
}

/// Whether `agent` has a feasible bundle inside `jobs`, by subset scan.
pub fn agent_feasible_within(inst: &Instance, agent: usize, jobs: u64) -> bool {
    let cap = inst.size_bound().unwrap_or(inst.m());
    let mut sub = jobs;
    loop {
        if sub != 0
            && sub.count_ones() as usize <= cap
            && !edges_within(inst.graph(), sub)
            && (0..inst.m()).filter(|&x| sub >> x & 1 == 1).map(|x| inst.utility(agent, x)).sum::<u64>() >= inst.eta()
        {
            return true;
        }
        if sub == 0 {
            return false;
        }
        sub = (sub - 1) & jobs;
    }
}

/// A random 3-DM source over `z_count` elements where each z occurs 1 to 3
/// times (before preprocessing).
pub fn random_3dm(rng: &mut ChaCha8Rng, z_count: usize) -> ThreeDMInstance {
    let mut tuples = Vec::new();
    for z in 0..z_count {
        for _ in 0..rng.gen_range(1..=3) {
            tuples.push((rng.gen_range(0..z_count), rng.gen_range(0..z_count), z));
        }
    }
    ThreeDMInstance { z_count, tuples }
}

pub fn random_graph(rng: &mut ChaCha8Rng, v: usize, p: f64) -> Graph {
    let mut g = Graph::new(v);
    for a in 0..v {
        for b in a + 1..v {
            if rng.gen_bool(p) {
                g.add_edge(a, b);
            }
        }
    }
    g
}

pub fn profile(m: usize, n: usize, completeness: Completeness, s: Option<usize>, structure: Structure) -> RandomProfile {
    RandomProfile {
        m,
        n,
        completeness,
        size_bound: s,
        edge_probability: 0.35,
        utility_range: (0, 5),
        eta_rule: EtaRule::FractionOfShare(0.9),
        structure,
        uniform_utilities: false,
    }
}

/// Arbitrary small instances of any variant.
pub fn arb_instance(max_m: usize, max_n: usize, max_u: u64) -> impl Strategy<Value = Instance> {
    (1..=max_m, 1..=max_n, any::<bool>()).prop_flat_map(move |(m, n, complete)| {
        let pairs: Vec<(usize, usize)> = (0..m).flat_map(|u| (u + 1..m).map(move |v| (u, v))).collect();
        (
            proptest::collection::vec(proptest::collection::vec(0..=max_u, m), n),
            proptest::sample::subsequence(pairs.clone(), 0..=pairs.len()),
            1..=(max_u * 2).max(1),
            proptest::option::of(1..=m),
        )
            .prop_map(move |(u, edges, eta, s)| {
                let c = if complete { Completeness::Complete } else { Completeness::Partial };
                Instance::new(c, s, m, u, edges, eta).expect("strategy builds valid instances")
            })
    })
}
