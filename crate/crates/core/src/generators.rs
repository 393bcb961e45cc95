//! Instance factories: hardness reductions from classic problems, and
//! seeded random instances with a prescribed conflict-graph structure.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CffaError, Result};
use crate::graph::{binomial, Graph};
use crate::instance::{Completeness, Instance};

/// Balanced split of `values` into two agents; extra agents take one dummy
/// job each, worth exactly the threshold.
pub fn gen_from_partition(values: &[u64], n: usize) -> Result<Instance> {
    if n < 2 {
        return Err(CffaError::Precondition(format!("partition gadget needs n ≥ 2, got {n}")));
    }
    if values.is_empty() || values.contains(&0) {
        return Err(CffaError::Precondition("partition values must be positive and non-empty".into()));
    }
    let sum = values
        .iter()
        .try_fold(0u64, |a, &v| a.checked_add(v))
        .ok_or_else(|| CffaError::Overflow("partition sum".into()))?;
    let eta = sum.div_ceil(2);
    let mut row = values.to_vec();
    row.extend(std::iter::repeat_n(eta, n - 2));
    Instance::new(Completeness::Complete, None, row.len(), vec![row; n], Vec::new(), eta)
}

/// One agent per colour; every vertex must be assigned. Agents need a
/// non-empty bundle, so for `k > |V|` the instance is a no-instance even
/// though the graph is k-colourable.
pub fn gen_from_coloring(g: &Graph, k: usize) -> Result<Instance> {
    if k == 0 {
        return Err(CffaError::Precondition("colouring gadget needs k ≥ 1".into()));
    }
    let m = g.vertex_count();
    Instance::with_graph(Completeness::Complete, None, vec![vec![1; m]; k], g, 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IsFlavor {
    /// One agent who must collect k independent unit-value jobs.
    Partial,
    /// Size-bounded complete allocation with `m − k + 1` agents: agent 0
    /// needs k independent jobs, every other agent is happy with any one.
    SbComplete,
}

pub fn gen_from_independent_set(g: &Graph, k: usize, flavor: IsFlavor) -> Result<Instance> {
    let m = g.vertex_count();
    if k == 0 || k > m {
        return Err(CffaError::Precondition(format!("independent set gadget needs 1 ≤ k ≤ {m}, got {k}")));
    }
    match flavor {
        IsFlavor::Partial => Instance::with_graph(Completeness::Partial, None, vec![vec![1; m]], g, k as u64),
        IsFlavor::SbComplete => {
            let mut utilities = vec![vec![1; m]];
            utilities.extend(std::iter::repeat_n(vec![k as u64; m], m - k));
            Instance::with_graph(Completeness::Complete, Some(k), utilities, g, k as u64)
        }
    }
}

/// A 3-dimensional matching instance over `X = Y = Z = {0, …, z_count − 1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThreeDMInstance {
    pub z_count: usize,
    pub tuples: Vec<(usize, usize, usize)>,
}

impl ThreeDMInstance {
    pub fn validate(&self) -> Result<()> {
        for (k, &(x, y, z)) in self.tuples.iter().enumerate() {
            if x.max(y).max(z) >= self.z_count {
                return Err(CffaError::InvalidInstance(format!(
                    "tuple {k} = ({x},{y},{z}) has an element ≥ {}",
                    self.z_count
                )));
            }
        }
        Ok(())
    }

    pub fn occurrences(&self) -> Vec<usize> {
        let mut occ = vec![0; self.z_count];
        self.tuples.iter().for_each(|t| occ[t.2] += 1);
        occ
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ThreeDMPreprocess {
    /// Every remaining z occurs two or three times. `forced` lists the
    /// original tuples that any perfect matching must contain.
    Reduced {
        instance: ThreeDMInstance,
        forced: Vec<(usize, usize, usize)>,
    },
    /// Some z can no longer be covered.
    No,
}

/// Repeatedly takes the unique tuple of any z that occurs once, dropping
/// tuples that clash with it, then renumbers the surviving elements.
pub fn preprocess_3dm(src: &ThreeDMInstance) -> Result<ThreeDMPreprocess> {
    src.validate()?;
    let mut tuples = src.tuples.clone();
    tuples.sort_unstable();
    tuples.dedup();
    let mut forced = Vec::new();
    let (mut x_gone, mut y_gone, mut z_gone) =
        (vec![false; src.z_count], vec![false; src.z_count], vec![false; src.z_count]);
    loop {
        let mut occ = vec![0usize; src.z_count];
        tuples.iter().for_each(|t| occ[t.2] += 1);
        if (0..src.z_count).any(|z| !z_gone[z] && occ[z] == 0) {
            return Ok(ThreeDMPreprocess::No);
        }
        let Some(z) = (0..src.z_count).find(|&z| !z_gone[z] && occ[z] == 1) else {
            if let Some(z) = (0..src.z_count).find(|&z| occ[z] > 3) {
                return Err(CffaError::Precondition(format!(
                    "element z{z} occurs in {} tuples; at most 3 are supported",
                    occ[z]
                )));
            }
            break;
        };
        let t = *tuples.iter().find(|t| t.2 == z).expect("occurs once");
        forced.push(t);
        x_gone[t.0] = true;
        y_gone[t.1] = true;
        z_gone[t.2] = true;
        tuples.retain(|&(x, y, z)| !x_gone[x] && !y_gone[y] && !z_gone[z]);
    }
    let renumber = |gone: &[bool]| -> Vec<usize> {
        let mut next = 0;
        gone.iter()
            .map(|&g| {
                let id = next;
                next += usize::from(!g);
                id
            })
            .collect()
    };
    let (rx, ry, rz) = (renumber(&x_gone), renumber(&y_gone), renumber(&z_gone));
    let instance = ThreeDMInstance {
        z_count: z_gone.iter().filter(|&&g| !g).count(),
        tuples: tuples.iter().map(|&(x, y, z)| (rx[x], ry[y], rz[z])).collect(),
    };
    Ok(ThreeDMPreprocess::Reduced { instance, forced })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThreeDMFlavor {
    Edgeless,
    /// Cliques on `X ∪ D` and on `Y`.
    TwoClique,
}

/// Size-bounded complete allocation with η = 2 and s = 2. One agent per
/// tuple, valuing the tuple's x and y jobs at 1 and its z's dummy jobs at
/// 2; each z with c occurrences gets c − 1 dummies, so exactly one agent
/// per z must be served by its tuple.
///
/// With `eta_target = Some(η)`, partner jobs are worth ⌈η/2⌉ and dummies
/// η, which keeps exactly the same feasible bundles as η = 2.
pub fn gen_from_3dm(src: &ThreeDMInstance, flavor: ThreeDMFlavor, eta_target: Option<u64>) -> Result<Instance> {
    src.validate()?;
    if src.z_count == 0 {
        return Err(CffaError::Precondition("3-DM source has no elements".into()));
    }
    let occ = src.occurrences();
    if let Some(z) = (0..src.z_count).find(|&z| !(2..=3).contains(&occ[z])) {
        return Err(CffaError::Precondition(format!(
            "element z{z} occurs in {} tuples; preprocess so every z occurs 2 or 3 times",
            occ[z]
        )));
    }
    let eta = eta_target.unwrap_or(2);
    if eta < 2 {
        return Err(CffaError::Precondition(format!("3-DM gadget needs η ≥ 2, got {eta}")));
    }
    let zc = src.z_count;
    let mut dummy_start = Vec::with_capacity(zc);
    let mut next = 2 * zc;
    for &c in &occ {
        dummy_start.push(next);
        next += c - 1;
    }
    let n = src.tuples.len();
    let m = next;
    let half = eta.div_ceil(2);
    let mut agents: Vec<usize> = (0..n).collect();
    agents.sort_by_key(|&k| src.tuples[k].2);
    let utilities: Vec<Vec<u64>> = agents
        .iter()
        .map(|&k| {
            let (x, y, z) = src.tuples[k];
            let mut row = vec![0; m];
            row[x] = half;
            row[zc + y] = half;
            for d in dummy_start[z]..dummy_start[z] + occ[z] - 1 {
                row[d] = eta;
            }
            row
        })
        .collect();
    let mut g = Graph::new(m);
    if flavor == ThreeDMFlavor::TwoClique {
        let xd: Vec<usize> = (0..zc).chain(2 * zc..m).collect();
        for (a, &u) in xd.iter().enumerate() {
            xd[a + 1..].iter().for_each(|&v| g.add_edge(u, v));
        }
        for u in zc..2 * zc {
            (u + 1..2 * zc).for_each(|v| g.add_edge(u, v));
        }
    }
    Instance::with_graph(Completeness::Complete, Some(2), utilities, &g, eta)
}

/// A fixed tiny instance with the given answer.
pub fn trivial_instance(yes: bool) -> Instance {
    Instance::new(Completeness::Complete, None, 1, vec![vec![u64::from(yes)]], Vec::new(), 1)
        .expect("valid by construction")
}

/// Preprocesses a 3-DM source and builds its gadget, falling back to a
/// trivial instance when preprocessing already decides it.
pub fn gen_from_3dm_source(src: &ThreeDMInstance, flavor: ThreeDMFlavor, eta_target: Option<u64>) -> Result<Instance> {
    match preprocess_3dm(src)? {
        ThreeDMPreprocess::No => Ok(trivial_instance(false)),
        ThreeDMPreprocess::Reduced { instance, .. } if instance.z_count == 0 => Ok(trivial_instance(true)),
        ThreeDMPreprocess::Reduced { instance, .. } => gen_from_3dm(&instance, flavor, eta_target),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Structure {
    Free,
    TwoClique,
    MaxDegree(usize),
    Bipartite,
    TriangleFree,
    DiversityCap(usize),
    MissingEdges(usize),
    Degenerate(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum EtaRule {
    Fixed(u64),
    /// `max(1, ⌊f · (smallest row total) / n⌋)`.
    FractionOfShare(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomProfile {
    pub m: usize,
    pub n: usize,
    pub completeness: Completeness,
    #[serde(default)]
    pub size_bound: Option<usize>,
    pub edge_probability: f64,
    /// Inclusive utility range.
    pub utility_range: (u64, u64),
    pub eta_rule: EtaRule,
    pub structure: Structure,
    /// All agents share one utility row.
    #[serde(default)]
    pub uniform_utilities: bool,
}

impl Default for RandomProfile {
    fn default() -> Self {
        RandomProfile {
            m: 8,
            n: 2,
            completeness: Completeness::Partial,
            size_bound: None,
            edge_probability: 0.3,
            utility_range: (0, 5),
            eta_rule: EtaRule::FractionOfShare(0.8),
            structure: Structure::Free,
            uniform_utilities: false,
        }
    }
}

pub fn gen_random(profile: &RandomProfile, seed: u64) -> Result<Instance> {
    let p = profile;
    let bad = |msg: String| Err(CffaError::Precondition(msg));
    if p.m == 0 || p.n == 0 {
        return bad("random profile needs m ≥ 1 and n ≥ 1".into());
    }
    if !(0.0..=1.0).contains(&p.edge_probability) {
        return bad(format!("edge probability {} outside [0, 1]", p.edge_probability));
    }
    if p.utility_range.0 > p.utility_range.1 {
        return bad(format!("empty utility range {:?}", p.utility_range));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = random_graph(p.m, p.edge_probability, p.structure, &mut rng)?;
    let (lo, hi) = p.utility_range;
    let mut row = || -> Vec<u64> { (0..p.m).map(|_| rng.gen_range(lo..=hi)).collect() };
    let utilities: Vec<Vec<u64>> = if p.uniform_utilities {
        vec![row(); p.n]
    } else {
        (0..p.n).map(|_| row()).collect()
    };
    let eta = match p.eta_rule {
        EtaRule::Fixed(e) => e,
        EtaRule::FractionOfShare(f) => {
            let least = utilities.iter().map(|r| r.iter().sum::<u64>()).min().unwrap_or(0);
            ((f * least as f64 / p.n as f64).floor() as u64).max(1)
        }
    };
    Instance::with_graph(p.completeness, p.size_bound, utilities, &g, eta)
}

fn random_graph(m: usize, prob: f64, structure: Structure, rng: &mut ChaCha8Rng) -> Result<Graph> {
    let mut g = Graph::new(m);
    let mut pairs: Vec<(usize, usize)> = (0..m).flat_map(|u| (u + 1..m).map(move |v| (u, v))).collect();
    match structure {
        Structure::Free => {
            for (u, v) in pairs {
                if rng.gen_bool(prob) {
                    g.add_edge(u, v);
                }
            }
        }
        Structure::TwoClique => {
            if m < 2 {
                return Err(CffaError::Precondition("two cliques need m ≥ 2".into()));
            }
            let mut order: Vec<usize> = (0..m).collect();
            order.shuffle(rng);
            let cut = rng.gen_range(1..m);
            for side in [&order[..cut], &order[cut..]] {
                for (a, &u) in side.iter().enumerate() {
                    side[a + 1..].iter().for_each(|&v| g.add_edge(u, v));
                }
            }
        }
        Structure::MaxDegree(d) => {
            pairs.shuffle(rng);
            for (u, v) in pairs {
                if g.degree(u) < d && g.degree(v) < d && rng.gen_bool(prob) {
                    g.add_edge(u, v);
                }
            }
        }
        Structure::Bipartite => {
            let side: Vec<bool> = (0..m).map(|_| rng.gen_bool(0.5)).collect();
            for (u, v) in pairs {
                if side[u] != side[v] && rng.gen_bool(prob) {
                    g.add_edge(u, v);
                }
            }
        }
        Structure::TriangleFree => {
            pairs.shuffle(rng);
            for (u, v) in pairs {
                if rng.gen_bool(prob) && !g.neighbors(u).any(|w| g.has_edge(w, v)) {
                    g.add_edge(u, v);
                }
            }
        }
        Structure::DiversityCap(tau) => {
            if tau == 0 {
                return Err(CffaError::Precondition("diversity cap must be ≥ 1".into()));
            }
            // Blow up a random quotient graph on `tau` types.
            let mut type_of: Vec<usize> = (0..m).map(|v| v % tau).collect();
            type_of.shuffle(rng);
            let clique_type: Vec<bool> = (0..tau).map(|_| rng.gen_bool(0.5)).collect();
            let mut quotient = vec![vec![false; tau]; tau];
            for a in 0..tau {
                for b in a + 1..tau {
                    let joined = rng.gen_bool(prob);
                    quotient[a][b] = joined;
                    quotient[b][a] = joined;
                }
            }
            for (u, v) in pairs {
                let (a, b) = (type_of[u], type_of[v]);
                if (a == b && clique_type[a]) || (a != b && quotient[a][b]) {
                    g.add_edge(u, v);
                }
            }
        }
        Structure::MissingEdges(t) => {
            let total = binomial(m as u64, 2).unwrap_or(u64::MAX);
            if t as u64 > total {
                return Err(CffaError::Precondition(format!(
                    "cannot remove {t} edges from a complete graph with {total} edges"
                )));
            }
            pairs.shuffle(rng);
            for &(u, v) in &pairs[t..] {
                g.add_edge(u, v);
            }
        }
        Structure::Degenerate(d) => {
            let mut order: Vec<usize> = (0..m).collect();
            order.shuffle(rng);
            for k in 1..m {
                let mut earlier = order[..k].to_vec();
                earlier.shuffle(rng);
                for &u in earlier.iter().take(d) {
                    if rng.gen_bool(prob) {
                        g.add_edge(u, order[k]);
                    }
                }
            }
        }
    }
    Ok(g)
}
