//! Solvers for structured conflict graphs: singleton bundles via matching,
//! few missing edges, and two-clique graphs with uniform utilities.

use serde::Serialize;

use crate::budget::{Budget, Meter};
use crate::error::{CffaError, Result};
use crate::graph::Graph;
use crate::instance::{Assignment, Instance, SolveResult};
use crate::matching::{maximum_bipartite_matching, BipartiteGraph};

/// Bundles are single jobs: either `s = 1` or the conflict graph is complete.
pub fn solve_s1_matching(inst: &Instance) -> Result<SolveResult> {
    if inst.size_bound() != Some(1) && !inst.graph().is_complete() {
        return Err(CffaError::Precondition(
            "matching solver needs s = 1 or a complete conflict graph".into(),
        ));
    }
    let candidates: Vec<Vec<usize>> = (0..inst.m()).map(|x| vec![x]).collect();
    Ok(match_singletons(inst, &candidates, inst.is_complete())
        .map_or_else(SolveResult::no, SolveResult::yes))
}

/// Matches agents to candidate bundles worth at least η to them. Under
/// `exact_cover` every candidate must be used, so it needs exactly n of them.
fn match_singletons(inst: &Instance, candidates: &[Vec<usize>], exact_cover: bool) -> Option<Assignment> {
    match_agents(inst, &(0..inst.n()).collect::<Vec<_>>(), candidates, exact_cover)
}

fn match_agents(
    inst: &Instance,
    agents: &[usize],
    candidates: &[Vec<usize>],
    exact_cover: bool,
) -> Option<Assignment> {
    if exact_cover && candidates.len() != agents.len() {
        return None;
    }
    if agents.len() > candidates.len() {
        return None;
    }
    let mut b = BipartiteGraph::new(agents.len(), candidates.len());
    for (l, &agent) in agents.iter().enumerate() {
        for (r, c) in candidates.iter().enumerate() {
            if inst.bundle_utility(agent, c) >= inst.eta() {
                b.add_edge(l, r).expect("indices in range");
            }
        }
    }
    let matching = maximum_bipartite_matching(&b);
    if !matching.saturates_left() {
        return None;
    }
    let mut a = Assignment::new();
    for (l, r) in matching.pairs() {
        for &x in &candidates[r] {
            a.assign(x, agents[l]);
        }
    }
    Some(a)
}

/// Guesses, for each agent, either one independent set of size ≥ 2 or a
/// single job; single jobs are then distributed by matching.
pub fn solve_nonedges_guess(inst: &Instance, budget: &Budget) -> Result<SolveResult> {
    let g = inst.graph();
    let cap = inst.bundle_cap();
    let mut large: Vec<Vec<usize>> = Vec::new();
    let mut meter = budget.meter("non-edge guessing");
    let mut overflow = None;
    g.complement().for_each_clique(2, |c| {
        if overflow.is_none() && c.len() <= cap {
            overflow = meter.tick().err();
            large.push(c.to_vec());
        }
    });
    if let Some(e) = overflow {
        return Err(e);
    }
    large.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    if inst.n() > inst.m() {
        return Ok(SolveResult::no());
    }
    let mut search = Guess {
        inst,
        large: &large,
        choice: Vec::with_capacity(inst.n()),
        used: vec![false; inst.m()],
        meter,
    };
    Ok(search.run()?.map_or_else(SolveResult::no, SolveResult::yes))
}

struct Guess<'a> {
    inst: &'a Instance,
    large: &'a [Vec<usize>],
    /// Per agent: index into `large`, or `None` for a single job.
    choice: Vec<Option<usize>>,
    used: Vec<bool>,
    meter: Meter,
}

impl Guess<'_> {
    fn run(&mut self) -> Result<Option<Assignment>> {
        self.meter.tick()?;
        let agent = self.choice.len();
        if agent == self.inst.n() {
            return Ok(self.finish());
        }
        self.choice.push(None);
        if let Some(a) = self.run()? {
            return Ok(Some(a));
        }
        self.choice.pop();
        for (k, set) in self.large.iter().enumerate() {
            if set.iter().any(|&x| self.used[x]) || self.inst.bundle_utility(agent, set) < self.inst.eta() {
                continue;
            }
            set.iter().for_each(|&x| self.used[x] = true);
            self.choice.push(Some(k));
            if let Some(a) = self.run()? {
                return Ok(Some(a));
            }
            self.choice.pop();
            set.iter().for_each(|&x| self.used[x] = false);
        }
        Ok(None)
    }

    fn finish(&self) -> Option<Assignment> {
        let single_agents: Vec<usize> = (0..self.inst.n()).filter(|&i| self.choice[i].is_none()).collect();
        let leftovers: Vec<Vec<usize>> = (0..self.inst.m()).filter(|&x| !self.used[x]).map(|x| vec![x]).collect();
        let mut a = match_agents(self.inst, &single_agents, &leftovers, self.inst.is_complete())?;
        for (agent, c) in self.choice.iter().enumerate() {
            if let Some(k) = c {
                for &x in &self.large[*k] {
                    a.assign(x, agent);
                }
            }
        }
        Some(a)
    }
}

/// Enumerates partitions of the jobs incident to missing edges into
/// "single" and up to n groups that become whole bundles, contracts each
/// group into one job, and matches agents to the contracted jobs.
pub fn solve_nonedges_partition(inst: &Instance, budget: &Budget) -> Result<SolveResult> {
    let g = inst.graph();
    let incident: Vec<usize> = (0..inst.m())
        .filter(|&x| g.degree(x) + 1 < inst.m())
        .collect();
    if inst.n() > inst.m() {
        return Ok(SolveResult::no());
    }
    let mut search = Partition {
        inst,
        g,
        incident: &incident,
        label: vec![0; incident.len()],
        groups: Vec::new(),
        meter: budget.meter("non-edge partitions"),
    };
    Ok(search.run(0)?.map_or_else(SolveResult::no, SolveResult::yes))
}

struct Partition<'a> {
    inst: &'a Instance,
    g: &'a Graph,
    incident: &'a [usize],
    /// 0 = single, j ≥ 1 = member of group j − 1.
    label: Vec<usize>,
    groups: Vec<Vec<usize>>,
    meter: Meter,
}

impl Partition<'_> {
    fn run(&mut self, pos: usize) -> Result<Option<Assignment>> {
        self.meter.tick()?;
        if pos == self.incident.len() {
            return Ok(self.contract_and_match());
        }
        let v = self.incident[pos];
        self.label[pos] = 0;
        if let Some(a) = self.run(pos + 1)? {
            return Ok(Some(a));
        }
        // Existing groups, then a new one: restricted growth keeps each
        // partition once up to renaming of groups.
        let cap = self.inst.bundle_cap();
        for j in 0..=self.groups.len() {
            if j == self.groups.len() {
                if self.groups.len() == self.inst.n() {
                    break;
                }
                self.groups.push(Vec::new());
            }
            let fits = self.groups[j].len() < cap && self.groups[j].iter().all(|&u| !self.g.has_edge(u, v));
            if fits {
                self.groups[j].push(v);
                self.label[pos] = j + 1;
                if let Some(a) = self.run(pos + 1)? {
                    return Ok(Some(a));
                }
                self.groups[j].pop();
            }
            if self.groups[j].is_empty() {
                self.groups.pop();
            }
        }
        self.label[pos] = 0;
        Ok(None)
    }

    fn contract_and_match(&self) -> Option<Assignment> {
        if self.groups.iter().any(|grp| grp.len() < 2) {
            return None;
        }
        let mut grouped = vec![false; self.inst.m()];
        for grp in &self.groups {
            grp.iter().for_each(|&x| grouped[x] = true);
        }
        let mut candidates = self.groups.clone();
        candidates.extend((0..self.inst.m()).filter(|&x| !grouped[x]).map(|x| vec![x]));
        match_singletons(self.inst, &candidates, self.inst.is_complete())
    }
}

/// Whether the conflict graph is exactly two disjoint cliques; returns them.
pub fn two_cliques(g: &Graph) -> Option<(Vec<usize>, Vec<usize>)> {
    let comps = g.components();
    if comps.len() != 2 {
        return None;
    }
    let is_clique = |c: &[usize]| g.induced(c).is_complete();
    if comps.iter().all(|c| is_clique(c)) {
        let mut it = comps.into_iter();
        Some((it.next()?, it.next()?))
    } else {
        None
    }
}

pub fn has_uniform_utilities(inst: &Instance) -> bool {
    inst.utilities().windows(2).all(|w| w[0] == w[1])
}

/// Two-clique conflict graph with identical utility rows. Bundles have at
/// most one job per clique, so each is a high-utility single job or a
/// cross-clique pair.
pub fn solve_twoclique_uniform(inst: &Instance) -> Result<SolveResult> {
    let (left, right) = two_cliques(inst.graph()).ok_or_else(|| {
        CffaError::Precondition("conflict graph is not a disjoint union of two cliques".into())
    })?;
    if !has_uniform_utilities(inst) {
        return Err(CffaError::Precondition("utilities are not uniform across agents".into()));
    }
    if inst.size_bound() == Some(1) {
        return solve_s1_matching(inst);
    }
    let n = inst.n();
    let eta = inst.eta();
    let u = inst.row(0);
    let high = |x: &usize| u[*x] >= eta;
    let result = if inst.is_complete() {
        twoclique_complete(inst, &left, &right)
    } else {
        let singles: Vec<usize> = (0..inst.m()).filter(high).take(n).collect();
        let mut bundles: Vec<Vec<usize>> = singles.iter().map(|&x| vec![x]).collect();
        if bundles.len() < n {
            let lows_l: Vec<usize> = left.iter().copied().filter(|x| !high(x)).collect();
            let lows_r: Vec<usize> = right.iter().copied().filter(|x| !high(x)).collect();
            bundles.extend(cross_pairs(u, eta, &lows_l, &lows_r, false));
        }
        (bundles.len() >= n).then(|| Assignment::from_bundles(&bundles[..n]))
    };
    Ok(result.map_or_else(SolveResult::no, SolveResult::yes))
}

/// Maximum matching of cross pairs worth at least η together. With
/// `perfect`, returns nothing unless every job on both sides is matched.
fn cross_pairs(u: &[u64], eta: u64, left: &[usize], right: &[usize], perfect: bool) -> Vec<Vec<usize>> {
    let mut b = BipartiteGraph::new(left.len(), right.len());
    for (i, &a) in left.iter().enumerate() {
        for (j, &c) in right.iter().enumerate() {
            if u[a] + u[c] >= eta {
                b.add_edge(i, j).expect("indices in range");
            }
        }
    }
    let m = maximum_bipartite_matching(&b);
    if perfect && (m.size() != left.len() || m.size() != right.len()) {
        return Vec::new();
    }
    m.pairs().into_iter().map(|(i, j)| vec![left[i], right[j]]).collect()
}

/// Complete variant: `ℓ1` and `ℓ2` high jobs are single bundles in each
/// clique and the rest pair up perfectly. Which high jobs are singled out
/// does not matter: a high job can pair with anything, so swapping a single
/// high job with a paired one preserves feasibility.
fn twoclique_complete(inst: &Instance, left: &[usize], right: &[usize]) -> Option<Assignment> {
    let n = inst.n();
    let eta = inst.eta();
    let u = inst.row(0);
    let high_l: Vec<usize> = left.iter().copied().filter(|&x| u[x] >= eta).collect();
    let high_r: Vec<usize> = right.iter().copied().filter(|&x| u[x] >= eta).collect();
    for l1 in 0..=high_l.len().min(n) {
        for l2 in 0..=high_r.len().min(n - l1) {
            let rest_l = left.len() - l1;
            if rest_l != right.len() - l2 || l1 + l2 + rest_l != n {
                continue;
            }
            let rest = |side: &[usize], singled: &[usize]| -> Vec<usize> {
                side.iter().copied().filter(|x| !singled.contains(x)).collect()
            };
            let rl = rest(left, &high_l[..l1]);
            let rr = rest(right, &high_r[..l2]);
            let pairs = cross_pairs(u, eta, &rl, &rr, true);
            if pairs.len() != rest_l {
                continue;
            }
            let mut bundles: Vec<Vec<usize>> = high_l[..l1].iter().chain(&high_r[..l2]).map(|&x| vec![x]).collect();
            bundles.extend(pairs);
            return Some(Assignment::from_bundles(&bundles));
        }
    }
    None
}

/// Structural parameters of an instance's conflict graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub complete_graph: bool,
    pub two_clique: bool,
    pub uniform_utilities: bool,
    pub missing_edges: usize,
    pub neighborhood_diversity: usize,
    pub degeneracy: usize,
    pub greedy_colors: usize,
    pub max_degree: usize,
}

pub fn detect_structure(inst: &Instance) -> StructureReport {
    let g = inst.graph();
    StructureReport {
        complete_graph: g.is_complete(),
        two_clique: two_cliques(g).is_some(),
        uniform_utilities: has_uniform_utilities(inst),
        missing_edges: g.missing_edge_count(),
        neighborhood_diversity: g.neighborhood_types().len(),
        degeneracy: g.degeneracy_ordering().1,
        greedy_colors: g.greedy_coloring().0,
        max_degree: g.max_degree(),
    }
}
