//! Instances, assignments, results, the solution verifier, and JSON I/O.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CffaError, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Completeness {
    /// Every job must be assigned.
    Complete,
    /// Jobs may stay unassigned.
    Partial,
}

/// One of the four problem variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Variant {
    pub completeness: Completeness,
    pub size_bounded: bool,
}

impl Variant {
    pub const C_CFFA: Variant = Variant::new(Completeness::Complete, false);
    pub const P_CFFA: Variant = Variant::new(Completeness::Partial, false);
    pub const SB_C_CFFA: Variant = Variant::new(Completeness::Complete, true);
    pub const SB_P_CFFA: Variant = Variant::new(Completeness::Partial, true);
    pub const ALL: [Variant; 4] = [
        Variant::C_CFFA,
        Variant::P_CFFA,
        Variant::SB_C_CFFA,
        Variant::SB_P_CFFA,
    ];

    pub const fn new(completeness: Completeness, size_bounded: bool) -> Self {
        Variant {
            completeness,
            size_bounded,
        }
    }

    pub fn is_complete(self) -> bool {
        self.completeness == Completeness::Complete
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sb = if self.size_bounded { "Sb-" } else { "" };
        let c = match self.completeness {
            Completeness::Complete => "C",
            Completeness::Partial => "P",
        };
        write!(f, "{sb}{c}-CFFA")
    }
}

/// A validated CFFA instance. Immutable; the conflict graph is built once.
#[derive(Debug, Clone)]
pub struct Instance {
    completeness: Completeness,
    size_bound: Option<usize>,
    n_jobs: usize,
    utilities: Vec<Vec<u64>>,
    edges: Vec<(usize, usize)>,
    eta: u64,
    graph: Graph,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        // The graph is derived from `edges`.
        self.completeness == other.completeness
            && self.size_bound == other.size_bound
            && self.n_jobs == other.n_jobs
            && self.utilities == other.utilities
            && self.edges == other.edges
            && self.eta == other.eta
    }
}

impl Eq for Instance {}

impl Instance {
    /// Validates and builds an instance. Edges may be given in either
    /// orientation and any order; duplicates and self-loops are rejected.
    pub fn new(
        completeness: Completeness,
        size_bound: Option<usize>,
        n_jobs: usize,
        utilities: Vec<Vec<u64>>,
        edges: Vec<(usize, usize)>,
        eta: u64,
    ) -> Result<Self> {
        let invalid = |msg: String| Err(CffaError::InvalidInstance(msg));
        if utilities.is_empty() {
            return invalid("at least one agent is required".into());
        }
        if n_jobs == 0 {
            return invalid("at least one job is required".into());
        }
        if eta == 0 {
            return invalid("eta must be ≥ 1".into());
        }
        for (i, row) in utilities.iter().enumerate() {
            if row.len() != n_jobs {
                return invalid(format!(
                    "utility row {i} has {} entries, expected {n_jobs}",
                    row.len()
                ));
            }
            if row.iter().try_fold(0u64, |a, &u| a.checked_add(u)).is_none() {
                return Err(CffaError::Overflow(format!("utility row {i} sum")));
            }
        }
        if let Some(s) = size_bound {
            if s == 0 || s > n_jobs {
                return invalid(format!("size bound {s} outside [1, {n_jobs}]"));
            }
        }
        let mut normalized = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u >= n_jobs || v >= n_jobs {
                return invalid(format!("edge ({u},{v}) has an endpoint ≥ {n_jobs}"));
            }
            if u == v {
                return invalid(format!("self-loop on job {u}"));
            }
            normalized.push((u.min(v), u.max(v)));
        }
        normalized.sort_unstable();
        if let Some(w) = normalized.windows(2).find(|w| w[0] == w[1]) {
            return invalid(format!("duplicate edge ({},{})", w[0].0, w[0].1));
        }
        let graph = Graph::from_edges(n_jobs, &normalized);
        Ok(Instance {
            completeness,
            size_bound,
            n_jobs,
            utilities,
            edges: normalized,
            eta,
            graph,
        })
    }

    /// Builds an instance whose conflict graph is `graph`.
    pub fn with_graph(
        completeness: Completeness,
        size_bound: Option<usize>,
        utilities: Vec<Vec<u64>>,
        graph: &Graph,
        eta: u64,
    ) -> Result<Self> {
        Instance::new(
            completeness,
            size_bound,
            graph.vertex_count(),
            utilities,
            graph.edges(),
            eta,
        )
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.utilities.len()
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.n_jobs
    }

    #[inline]
    pub fn eta(&self) -> u64 {
        self.eta
    }

    #[inline]
    pub fn utility(&self, agent: usize, job: usize) -> u64 {
        self.utilities[agent][job]
    }

    pub fn utilities(&self) -> &[Vec<u64>] {
        &self.utilities
    }

    pub fn row(&self, agent: usize) -> &[u64] {
        &self.utilities[agent]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn completeness(&self) -> Completeness {
        self.completeness
    }

    pub fn is_complete(&self) -> bool {
        self.completeness == Completeness::Complete
    }

    pub fn size_bound(&self) -> Option<usize> {
        self.size_bound
    }

    /// Largest legal bundle size: `s` when size-bounded, else `m`.
    pub fn bundle_cap(&self) -> usize {
        self.size_bound.unwrap_or(self.n_jobs)
    }

    pub fn variant(&self) -> Variant {
        Variant::new(self.completeness, self.size_bound.is_some())
    }

    /// Sum of an agent's utilities over `jobs`. Cannot overflow: row sums are
    /// checked at construction.
    pub fn bundle_utility(&self, agent: usize, jobs: &[usize]) -> u64 {
        jobs.iter().map(|&x| self.utilities[agent][x]).sum()
    }

    /// Utility of a job mask. Requires `m <= 64`.
    pub fn mask_utility(&self, agent: usize, mask: u64) -> u64 {
        crate::graph::BitIter(mask)
            .map(|x| self.utilities[agent][x])
            .sum()
    }

    pub fn row_total(&self, agent: usize) -> u64 {
        self.utilities[agent].iter().sum()
    }

    pub fn with_eta(&self, eta: u64) -> Result<Self> {
        self.rebuild(self.completeness, self.size_bound, self.utilities.clone(), self.edges.clone(), eta)
    }

    pub fn with_size_bound(&self, size_bound: Option<usize>) -> Result<Self> {
        self.rebuild(self.completeness, size_bound, self.utilities.clone(), self.edges.clone(), self.eta)
    }

    pub fn with_completeness(&self, completeness: Completeness) -> Result<Self> {
        self.rebuild(completeness, self.size_bound, self.utilities.clone(), self.edges.clone(), self.eta)
    }

    /// Same instance plus one conflict edge (a no-op if already present).
    pub fn with_edge(&self, u: usize, v: usize) -> Result<Self> {
        let e = (u.min(v), u.max(v));
        let mut edges = self.edges.clone();
        if !edges.contains(&e) {
            edges.push(e);
        }
        self.rebuild(self.completeness, self.size_bound, self.utilities.clone(), edges, self.eta)
    }

    /// Relabels jobs and agents: old job `x` becomes `job_perm[x]`, old agent
    /// `i` becomes `agent_perm[i]`.
    pub fn permuted(&self, job_perm: &[usize], agent_perm: &[usize]) -> Result<Self> {
        check_permutation(job_perm, self.n_jobs, "job")?;
        check_permutation(agent_perm, self.n(), "agent")?;
        let mut utilities = vec![vec![0; self.n_jobs]; self.n()];
        for (i, row) in self.utilities.iter().enumerate() {
            for (x, &u) in row.iter().enumerate() {
                utilities[agent_perm[i]][job_perm[x]] = u;
            }
        }
        let edges = self
            .edges
            .iter()
            .map(|&(u, v)| (job_perm[u], job_perm[v]))
            .collect();
        self.rebuild(self.completeness, self.size_bound, utilities, edges, self.eta)
    }

    /// Instance restricted to `jobs` (in the given order): induced conflict
    /// graph, restricted utilities, same n, η and variant. The size bound is
    /// capped at the new job count.
    pub fn restricted(&self, jobs: &[usize]) -> Result<Self> {
        let utilities = self
            .utilities
            .iter()
            .map(|row| jobs.iter().map(|&x| row[x]).collect())
            .collect();
        let g = self.graph.induced(jobs);
        let size_bound = self.size_bound.map(|s| s.min(jobs.len().max(1)));
        Instance::with_graph(self.completeness, size_bound, utilities, &g, self.eta)
    }

    fn rebuild(
        &self,
        completeness: Completeness,
        size_bound: Option<usize>,
        utilities: Vec<Vec<u64>>,
        edges: Vec<(usize, usize)>,
        eta: u64,
    ) -> Result<Self> {
        Instance::new(completeness, size_bound, self.n_jobs, utilities, edges, eta)
    }
}

fn check_permutation(perm: &[usize], len: usize, what: &str) -> Result<()> {
    let mut seen = vec![false; len];
    if perm.len() != len {
        return Err(CffaError::Precondition(format!(
            "{what} permutation has length {}, expected {len}",
            perm.len()
        )));
    }
    for &p in perm {
        if p >= len || std::mem::replace(&mut seen[p], true) {
            return Err(CffaError::Precondition(format!("not a {what} permutation")));
        }
    }
    Ok(())
}

/// Partial map from jobs to agents. Each job has at most one agent, so
/// bundles are disjoint by construction.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Assignment {
    map: BTreeMap<usize, usize>,
}

impl Assignment {
    pub fn new() -> Self {
        Assignment::default()
    }

    /// Assigns every job of each bundle to the bundle's agent (bundle `i` is
    /// agent `i`'s). Later bundles overwrite earlier ones on overlap.
    pub fn from_bundles(bundles: &[Vec<usize>]) -> Self {
        let mut a = Assignment::new();
        for (agent, bundle) in bundles.iter().enumerate() {
            for &job in bundle {
                a.assign(job, agent);
            }
        }
        a
    }

    /// Same as [`Assignment::from_bundles`] for job masks.
    pub fn from_masks(masks: &[u64]) -> Self {
        let mut a = Assignment::new();
        for (agent, &mask) in masks.iter().enumerate() {
            for job in crate::graph::BitIter(mask) {
                a.assign(job, agent);
            }
        }
        a
    }

    pub fn assign(&mut self, job: usize, agent: usize) {
        self.map.insert(job, agent);
    }

    pub fn unassign(&mut self, job: usize) {
        self.map.remove(&job);
    }

    pub fn agent_of(&self, job: usize) -> Option<usize> {
        self.map.get(&job).copied()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// `(job, agent)` pairs in ascending job order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.map.iter().map(|(&j, &a)| (j, a))
    }

    /// Bundles of agents `0..n`, each sorted. Agents beyond `n` are ignored.
    pub fn bundles(&self, n: usize) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); n];
        for (job, agent) in self.iter() {
            if agent < n {
                out[agent].push(job);
            }
        }
        out
    }

    /// Maps job indices through `job_map` (`new job -> old job`).
    pub fn mapped(&self, job_map: &[usize]) -> Assignment {
        Assignment {
            map: self.iter().map(|(j, a)| (job_map[j], a)).collect(),
        }
    }
}

impl FromIterator<(usize, usize)> for Assignment {
    fn from_iter<T: IntoIterator<Item = (usize, usize)>>(iter: T) -> Self {
        Assignment {
            map: iter.into_iter().collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Answer {
    Yes,
    No,
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Answer::Yes => "yes",
            Answer::No => "no",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveResult {
    pub answer: Answer,
    #[serde(rename = "assignment", default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Assignment>,
}

impl SolveResult {
    pub fn yes(witness: Assignment) -> Self {
        SolveResult {
            answer: Answer::Yes,
            witness: Some(witness),
        }
    }

    pub fn no() -> Self {
        SolveResult {
            answer: Answer::No,
            witness: None,
        }
    }

    pub fn is_yes(&self) -> bool {
        self.answer == Answer::Yes
    }
}

/// The first clause an assignment violates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NotIndependent { agent: usize, jobs: (usize, usize) },
    BelowThreshold { agent: usize, utility: u64 },
    Unassigned { job: usize },
    Oversized { agent: usize, size: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotIndependent { agent, jobs } => write!(
                f,
                "bundle not independent: agent {agent} holds conflicting jobs {} and {}",
                jobs.0, jobs.1
            ),
            Violation::BelowThreshold { agent, utility } => {
                write!(f, "below threshold: agent {agent} has utility {utility}")
            }
            Violation::Unassigned { job } => write!(f, "unassigned job under Complete: job {job}"),
            Violation::Oversized { agent, size } => {
                write!(f, "bundle too large: agent {agent} holds {size} jobs")
            }
        }
    }
}

/// Checks an assignment against all four clauses, in order: independence,
/// threshold, completeness (Complete only), size (size-bounded only).
pub fn verify_assignment(inst: &Instance, a: &Assignment) -> Result<Result<(), Violation>> {
    for (job, agent) in a.iter() {
        if job >= inst.m() {
            return Err(CffaError::IndexOutOfRange(format!(
                "job {job} (instance has {} jobs)",
                inst.m()
            )));
        }
        if agent >= inst.n() {
            return Err(CffaError::IndexOutOfRange(format!(
                "agent {agent} (instance has {} agents)",
                inst.n()
            )));
        }
    }
    let bundles = a.bundles(inst.n());
    let g = inst.graph();
    for (agent, bundle) in bundles.iter().enumerate() {
        for (i, &u) in bundle.iter().enumerate() {
            if let Some(&v) = bundle[i + 1..].iter().find(|&&v| g.has_edge(u, v)) {
                return Ok(Err(Violation::NotIndependent {
                    agent,
                    jobs: (u, v),
                }));
            }
        }
    }
    for (agent, bundle) in bundles.iter().enumerate() {
        let utility = inst.bundle_utility(agent, bundle);
        if utility < inst.eta() {
            return Ok(Err(Violation::BelowThreshold { agent, utility }));
        }
    }
    if inst.is_complete() {
        if let Some(job) = (0..inst.m()).find(|&j| a.agent_of(j).is_none()) {
            return Ok(Err(Violation::Unassigned { job }));
        }
    }
    if let Some(s) = inst.size_bound() {
        if let Some((agent, b)) = bundles.iter().enumerate().find(|(_, b)| b.len() > s) {
            return Ok(Err(Violation::Oversized {
                agent,
                size: b.len(),
            }));
        }
    }
    Ok(Ok(()))
}

/// Convenience: `true` iff the assignment is a valid solution.
pub fn is_valid(inst: &Instance, a: &Assignment) -> bool {
    matches!(verify_assignment(inst, a), Ok(Ok(())))
}

#[derive(Serialize)]
struct InstanceDoc<'a> {
    variant: Completeness,
    size_bound: Option<usize>,
    n_agents: usize,
    n_jobs: usize,
    utilities: &'a [Vec<u64>],
    conflict_edges: Vec<[usize; 2]>,
    eta: u64,
}

/// Canonical single-line JSON document for an instance.
pub fn write_instance(inst: &Instance) -> String {
    let doc = InstanceDoc {
        variant: inst.completeness,
        size_bound: inst.size_bound,
        n_agents: inst.n(),
        n_jobs: inst.m(),
        utilities: &inst.utilities,
        conflict_edges: inst.edges.iter().map(|&(u, v)| [u, v]).collect(),
        eta: inst.eta,
    };
    serde_json::to_string(&doc).expect("instance documents always serialize")
}

/// Canonical single-line JSON document for a result; job keys ascend.
pub fn write_result(r: &SolveResult) -> String {
    serde_json::to_string(r).expect("result documents always serialize")
}

/// Parses a result document (`{"answer": ..., "assignment": {...}}`).
pub fn parse_result(text: &str) -> Result<SolveResult> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| CffaError::parse("$", e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| CffaError::parse("$", "expected an object"))?;
    let answer = match obj.get("answer").and_then(Value::as_str) {
        Some("yes") => Answer::Yes,
        Some("no") => Answer::No,
        _ => return Err(CffaError::parse("answer", "expected \"yes\" or \"no\"")),
    };
    let witness = match obj.get("assignment") {
        None | Some(Value::Null) => None,
        Some(Value::Object(map)) => {
            let mut a = Assignment::new();
            for (key, v) in map {
                let path = format!("assignment.{key}");
                let job: usize = key
                    .parse()
                    .map_err(|_| CffaError::parse(&path, "job key is not a non-negative integer"))?;
                let agent = v
                    .as_u64()
                    .ok_or_else(|| CffaError::parse(&path, "agent is not a non-negative integer"))?;
                a.assign(job, to_usize(agent, &path)?);
            }
            Some(a)
        }
        Some(_) => return Err(CffaError::parse("assignment", "expected an object")),
    };
    Ok(SolveResult { answer, witness })
}

/// Parses an instance document, reporting errors with their field path.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| CffaError::parse("$", e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| CffaError::parse("$", "expected an object"))?;
    let field = |name: &str| {
        obj.get(name)
            .ok_or_else(|| CffaError::parse(name, "missing field"))
    };

    let completeness = match field("variant")?.as_str() {
        Some("complete") => Completeness::Complete,
        Some("partial") => Completeness::Partial,
        _ => {
            return Err(CffaError::parse(
                "variant",
                "expected \"complete\" or \"partial\"",
            ))
        }
    };
    let n = positive(field("n_agents")?, "n_agents")?;
    let m = positive(field("n_jobs")?, "n_jobs")?;
    let size_bound = match field("size_bound")? {
        Value::Null => None,
        v => {
            let s = uint(v, "size_bound")?;
            if s == 0 || s > m as u64 {
                return Err(CffaError::parse(
                    "size_bound",
                    format!("size bound out of range: must lie in [1, {m}]"),
                ));
            }
            Some(s as usize)
        }
    };
    let eta = uint(field("eta")?, "eta")?;
    if eta == 0 {
        return Err(CffaError::parse("eta", "eta must be ≥ 1"));
    }

    let rows = field("utilities")?
        .as_array()
        .ok_or_else(|| CffaError::parse("utilities", "expected an array"))?;
    if rows.len() != n {
        return Err(CffaError::parse(
            "utilities",
            format!("dimension mismatch: {} rows, n_agents is {n}", rows.len()),
        ));
    }
    let mut utilities = Vec::with_capacity(n);
    for (i, row) in rows.iter().enumerate() {
        let path = format!("utilities[{i}]");
        let row = row
            .as_array()
            .ok_or_else(|| CffaError::parse(&path, "expected an array"))?;
        if row.len() != m {
            return Err(CffaError::parse(
                &path,
                format!("dimension mismatch: {} entries, n_jobs is {m}", row.len()),
            ));
        }
        let mut parsed = Vec::with_capacity(m);
        let mut total: u64 = 0;
        for (x, u) in row.iter().enumerate() {
            let p = format!("utilities[{i}][{x}]");
            if u.as_i64().is_some_and(|v| v < 0) {
                return Err(CffaError::parse(&p, "negative utility"));
            }
            let u = uint(u, &p)?;
            total = total
                .checked_add(u)
                .ok_or_else(|| CffaError::parse(&path, "utility sum overflows 64 bits"))?;
            parsed.push(u);
        }
        utilities.push(parsed);
    }

    let raw_edges = field("conflict_edges")?
        .as_array()
        .ok_or_else(|| CffaError::parse("conflict_edges", "expected an array"))?;
    let mut edges = Vec::with_capacity(raw_edges.len());
    let mut seen = std::collections::HashSet::new();
    for (k, e) in raw_edges.iter().enumerate() {
        let path = format!("conflict_edges[{k}]");
        let pair = e
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| CffaError::parse(&path, "expected a pair [u, v]"))?;
        let u = uint(&pair[0], &format!("{path}[0]"))?;
        let v = uint(&pair[1], &format!("{path}[1]"))?;
        if u >= m as u64 || v >= m as u64 {
            return Err(CffaError::parse(
                &path,
                format!("endpoint out of range: jobs are 0..{m}"),
            ));
        }
        if u == v {
            return Err(CffaError::parse(&path, "self-loop"));
        }
        let (u, v) = (u.min(v) as usize, u.max(v) as usize);
        if !seen.insert((u, v)) {
            return Err(CffaError::parse(&path, "duplicate edge"));
        }
        edges.push((u, v));
    }

    Instance::new(completeness, size_bound, m, utilities, edges, eta)
}

fn uint(v: &Value, path: &str) -> Result<u64> {
    v.as_u64()
        .ok_or_else(|| CffaError::parse(path, "expected a non-negative integer"))
}

fn positive(v: &Value, path: &str) -> Result<usize> {
    match uint(v, path)? {
        0 => Err(CffaError::parse(path, "must be positive")),
        x => to_usize(x, path),
    }
}

fn to_usize(x: u64, path: &str) -> Result<usize> {
    usize::try_from(x).map_err(|_| CffaError::parse(path, "value too large"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_doc() -> &'static str {
        r#"{"variant":"partial","size_bound":null,"n_agents":1,"n_jobs":1,"utilities":[[5]],"conflict_edges":[],"eta":5}"#
    }

    #[test]
    fn minimal_round_trip_is_byte_identical() {
        let inst = parse_instance(minimal_doc()).unwrap();
        assert_eq!((inst.n(), inst.m(), inst.eta()), (1, 1, 5));
        assert_eq!(write_instance(&inst), minimal_doc());
    }

    #[test]
    fn edges_are_normalized_on_parse() {
        let doc = r#"{"variant":"complete","size_bound":2,"n_agents":1,"n_jobs":3,
            "utilities":[[1,2,3]],"conflict_edges":[[2,0],[1,0]],"eta":1}"#;
        let inst = parse_instance(doc).unwrap();
        assert_eq!(inst.edges(), &[(0, 1), (0, 2)]);
        assert!(write_instance(&inst).contains(r#""conflict_edges":[[0,1],[0,2]]"#));
    }

    fn parse_err(doc: &str) -> (String, String) {
        match parse_instance(doc) {
            Err(CffaError::Parse { path, message }) => (path, message),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_field_paths() {
        let base = r#"{"variant":"partial","size_bound":null,"n_agents":1,"n_jobs":3,"utilities":[[1,1,1]],"conflict_edges":EDGES,"eta":ETA}"#;
        let doc = |edges: &str, eta: &str| base.replace("EDGES", edges).replace("ETA", eta);

        let (path, msg) = parse_err(&doc("[[2,2]]", "1"));
        assert_eq!(path, "conflict_edges[0]");
        assert!(msg.contains("self-loop"));

        let (path, msg) = parse_err(&doc("[]", "0"));
        assert_eq!(path, "eta");
        assert!(msg.contains("eta must be ≥ 1"));

        let (path, msg) = parse_err(&doc("[[0,1],[1,0]]", "1"));
        assert_eq!(path, "conflict_edges[1]");
        assert!(msg.contains("duplicate"));

        let (path, _) = parse_err(&doc("[[0,3]]", "1"));
        assert_eq!(path, "conflict_edges[0]");

        let (path, msg) =
            parse_err(&base.replace("[[1,1,1]]", "[[1,-1,1]]").replace("EDGES", "[]").replace("ETA", "1"));
        assert_eq!(path, "utilities[0][1]");
        assert!(msg.contains("negative"));

        let (path, msg) =
            parse_err(&base.replace("[[1,1,1]]", "[[1,1]]").replace("EDGES", "[]").replace("ETA", "1"));
        assert_eq!(path, "utilities[0]");
        assert!(msg.contains("dimension mismatch"));

        let (path, _) = parse_err(&doc("[]", "1").replace(r#""size_bound":null"#, r#""size_bound":4"#));
        assert_eq!(path, "size_bound");

        let (path, _) = parse_err(&doc("[]", "1").replace(r#""variant":"partial","#, ""));
        assert_eq!(path, "variant");

        let (path, _) = parse_err("[1,2]");
        assert_eq!(path, "$");
    }

    #[test]
    fn verify_examples() {
        let inst = Instance::new(Completeness::Complete, None, 2, vec![vec![1, 1]], vec![], 2).unwrap();
        let both: Assignment = [(0, 0), (1, 0)].into_iter().collect();
        assert_eq!(verify_assignment(&inst, &both).unwrap(), Ok(()));
        // Under Complete, dropping job 1 also drops the utility below η; the
        // threshold clause comes first.
        let one: Assignment = [(0, 0)].into_iter().collect();
        assert!(verify_assignment(&inst, &one).unwrap().is_err());
        let low = inst.with_eta(1).unwrap();
        assert_eq!(
            verify_assignment(&low, &one).unwrap(),
            Err(Violation::Unassigned { job: 1 })
        );
        assert!(Violation::Unassigned { job: 1 }
            .to_string()
            .contains("unassigned job under Complete"));

        let inst = Instance::new(
            Completeness::Partial,
            None,
            2,
            vec![vec![1, 1], vec![1, 1]],
            vec![(0, 1)],
            1,
        )
        .unwrap();
        let v = verify_assignment(&inst, &both).unwrap().unwrap_err();
        assert!(v.to_string().contains("bundle not independent"));
    }

    #[test]
    fn verify_clause_order_and_ranges() {
        let inst = Instance::new(
            Completeness::Partial,
            Some(1),
            3,
            vec![vec![1, 1, 1]],
            vec![],
            1,
        )
        .unwrap();
        let two: Assignment = [(0, 0), (1, 0)].into_iter().collect();
        assert_eq!(
            verify_assignment(&inst, &two).unwrap(),
            Err(Violation::Oversized { agent: 0, size: 2 })
        );
        let bad_job: Assignment = [(3, 0)].into_iter().collect();
        assert!(matches!(
            verify_assignment(&inst, &bad_job),
            Err(CffaError::IndexOutOfRange(_))
        ));
        let bad_agent: Assignment = [(0, 1)].into_iter().collect();
        assert!(verify_assignment(&inst, &bad_agent).is_err());
        assert_eq!(
            verify_assignment(&inst, &Assignment::new()).unwrap(),
            Err(Violation::BelowThreshold { agent: 0, utility: 0 })
        );
    }

    #[test]
    fn result_documents() {
        assert_eq!(write_result(&SolveResult::no()), r#"{"answer":"no"}"#);
        let a: Assignment = [(10, 1), (2, 0), (0, 0)].into_iter().collect();
        let doc = write_result(&SolveResult::yes(a.clone()));
        assert_eq!(doc, r#"{"answer":"yes","assignment":{"0":0,"2":0,"10":1}}"#);
        assert_eq!(parse_result(&doc).unwrap(), SolveResult::yes(a));
        assert_eq!(parse_result(r#"{"answer":"no"}"#).unwrap(), SolveResult::no());
        assert!(parse_result(r#"{"answer":"maybe"}"#).is_err());
    }

    #[test]
    fn construction_rejects_bad_input() {
        let ok = |u: Vec<Vec<u64>>, e: Vec<(usize, usize)>| {
            Instance::new(Completeness::Partial, None, 2, u, e, 1)
        };
        assert!(ok(vec![vec![1, 1]], vec![(0, 0)]).is_err());
        assert!(ok(vec![vec![1, 1]], vec![(0, 1), (1, 0)]).is_err());
        assert!(ok(vec![vec![1]], vec![]).is_err());
        assert!(ok(vec![], vec![]).is_err());
        assert!(matches!(
            ok(vec![vec![u64::MAX, 1]], vec![]),
            Err(CffaError::Overflow(_))
        ));
    }

    #[test]
    fn variant_names() {
        let names: Vec<String> = Variant::ALL.iter().map(|v| v.to_string()).collect();
        assert_eq!(names, ["C-CFFA", "P-CFFA", "Sb-C-CFFA", "Sb-P-CFFA"]);
    }
}
