//! Conflict-graph algorithms shared by the solvers and kernels.
//!
//! Adjacency is stored as one bit row per vertex, `words` machine words wide,
//! so graphs of any order work; the mask-based solvers additionally require
//! `vertex_count() <= 64` and read single-word rows through [`Graph::mask`].

use serde::{Deserialize, Serialize};

use crate::error::{CffaError, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    words: usize,
    adj: Vec<u64>,
    edges: usize,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Graph {
            n,
            words,
            adj: vec![0; n * words],
            edges: 0,
        }
    }

    /// Builds a graph from an edge list; duplicate edges are merged.
    ///
    /// Panics on self-loops or out-of-range endpoints; instance parsing rejects
    /// those before a graph is ever built.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Graph::new(n);
        for u in 0..n {
            g.add_edge(u, (u + 1) % n);
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let mut g = Graph::new(n);
        for u in 1..n {
            g.add_edge(u - 1, u);
        }
        g
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u < self.n && v < self.n, "edge ({u},{v}) out of range");
        assert_ne!(u, v, "self-loop on {u}");
        if self.has_edge(u, v) {
            return;
        }
        self.adj[u * self.words + v / 64] |= 1 << (v % 64);
        self.adj[v * self.words + u / 64] |= 1 << (u % 64);
        self.edges += 1;
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    #[inline]
    fn row(&self, v: usize) -> &[u64] {
        &self.adj[v * self.words..(v + 1) * self.words]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(v).iter().enumerate().flat_map(|(wi, &w)| {
            BitIter(w).map(move |b| wi * 64 + b)
        })
    }

    /// Whether single-word masks can describe every vertex set.
    #[inline]
    pub fn fits_in_word(&self) -> bool {
        self.n <= 64
    }

    /// Neighborhood of `v` as a bitmask. Requires at most 64 vertices.
    #[inline]
    pub fn mask(&self, v: usize) -> u64 {
        debug_assert!(self.fits_in_word());
        self.adj[v * self.words]
    }

    /// All neighborhoods as masks, or an error if the graph is wider than a word.
    pub fn masks(&self) -> Result<Vec<u64>> {
        if !self.fits_in_word() {
            return Err(CffaError::MaskWidth {
                jobs: self.n,
                limit: 64,
            });
        }
        Ok((0..self.n).map(|v| self.mask(v)).collect())
    }

    /// Sorted edge list, smaller endpoint first.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edges);
        for u in 0..self.n {
            out.extend(self.neighbors(u).filter(|&v| v > u).map(|v| (u, v)));
        }
        out
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(i, &u)| set[i + 1..].iter().all(|&v| !self.has_edge(u, v)))
    }

    /// Independence test for a vertex mask. Requires at most 64 vertices.
    pub fn is_independent_mask(&self, set: u64) -> bool {
        BitIter(set).all(|v| self.mask(v) & set == 0)
    }

    pub fn is_complete(&self) -> bool {
        self.missing_edge_count() == 0
    }

    pub fn complement(&self) -> Graph {
        let mut g = Graph::new(self.n);
        for u in 0..self.n {
            for v in u + 1..self.n {
                if !self.has_edge(u, v) {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }

    /// Number of vertex pairs that are not edges.
    pub fn missing_edge_count(&self) -> usize {
        self.n * self.n.saturating_sub(1) / 2 - self.edges
    }

    /// Subgraph induced by `vertices`; vertex `i` of the result is `vertices[i]`.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut g = Graph::new(vertices.len());
        for (i, &u) in vertices.iter().enumerate() {
            for (j, &v) in vertices.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for v in self.neighbors(u) {
                    if !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                        stack.push(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Minimum-degree elimination order and the degeneracy it certifies.
    ///
    /// Ties go to the smallest vertex index. Every vertex has at most
    /// `degeneracy` neighbors later in the order.
    pub fn degeneracy_ordering(&self) -> (Vec<usize>, usize) {
        let mut deg: Vec<usize> = (0..self.n).map(|v| self.degree(v)).collect();
        let mut removed = vec![false; self.n];
        let mut order = Vec::with_capacity(self.n);
        let mut degeneracy = 0;
        for _ in 0..self.n {
            let v = (0..self.n)
                .filter(|&v| !removed[v])
                .min_by_key(|&v| (deg[v], v))
                .expect("vertex remains");
            degeneracy = degeneracy.max(deg[v]);
            removed[v] = true;
            order.push(v);
            for u in self.neighbors(v) {
                if !removed[u] {
                    deg[u] -= 1;
                }
            }
        }
        (order, degeneracy)
    }

    /// Calls `visit` once for every clique with at least `min_size` vertices.
    ///
    /// Each clique is generated from its earliest vertex in the degeneracy
    /// order by extending through that vertex's forward neighborhood, so the
    /// work is bounded by the sum over vertices of 2^(forward degree).
    /// Members are passed in ascending index order.
    pub fn for_each_clique(&self, min_size: usize, mut visit: impl FnMut(&[usize])) {
        let (order, _) = self.degeneracy_ordering();
        let mut position = vec![0; self.n];
        for (i, &v) in order.iter().enumerate() {
            position[v] = i;
        }
        let mut clique = Vec::new();
        let mut sorted = Vec::new();
        for &v in &order {
            let forward: Vec<usize> = self
                .neighbors(v)
                .filter(|&u| position[u] > position[v])
                .collect();
            clique.push(v);
            self.extend_cliques(&mut clique, &forward, min_size, &mut sorted, &mut visit);
            clique.pop();
        }
    }

    fn extend_cliques(
        &self,
        clique: &mut Vec<usize>,
        candidates: &[usize],
        min_size: usize,
        sorted: &mut Vec<usize>,
        visit: &mut impl FnMut(&[usize]),
    ) {
        if clique.len() >= min_size {
            sorted.clear();
            sorted.extend_from_slice(clique);
            sorted.sort_unstable();
            visit(sorted);
        }
        for (i, &u) in candidates.iter().enumerate() {
            let next: Vec<usize> = candidates[i + 1..]
                .iter()
                .copied()
                .filter(|&w| self.has_edge(u, w))
                .collect();
            clique.push(u);
            self.extend_cliques(clique, &next, min_size, sorted, visit);
            clique.pop();
        }
    }

    /// All cliques of size at least `min_size`, sorted.
    pub fn enumerate_cliques(&self, min_size: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        self.for_each_clique(min_size, |c| out.push(c.to_vec()));
        out.sort();
        out
    }

    /// Whether `u` and `v` have the same neighborhood apart from each other.
    pub fn same_type(&self, u: usize, v: usize) -> bool {
        let (ru, rv) = (self.row(u), self.row(v));
        (0..self.words).all(|w| {
            let mut a = ru[w];
            let mut b = rv[w];
            if v / 64 == w {
                a &= !(1 << (v % 64));
            }
            if u / 64 == w {
                b &= !(1 << (u % 64));
            }
            a == b
        })
    }

    /// Coarsest partition into same-type classes (neighborhood diversity).
    pub fn neighborhood_types(&self) -> TypePartition {
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut class_of = vec![0; self.n];
        for v in 0..self.n {
            match classes.iter().position(|c| self.same_type(c[0], v)) {
                Some(i) => {
                    classes[i].push(v);
                    class_of[v] = i;
                }
                None => {
                    class_of[v] = classes.len();
                    classes.push(vec![v]);
                }
            }
        }
        let kinds = classes
            .iter()
            .map(|c| {
                if c.len() >= 2 && self.has_edge(c[0], c[1]) {
                    ClassKind::Clique
                } else {
                    ClassKind::IndependentSet
                }
            })
            .collect();
        TypePartition {
            classes,
            kinds,
            class_of,
        }
    }

    /// Greedy coloring in smallest-last order. Returns the number of colors
    /// and each vertex's color; the count upper-bounds the chromatic number.
    pub fn greedy_coloring(&self) -> (usize, Vec<usize>) {
        let (order, _) = self.degeneracy_ordering();
        let mut color = vec![usize::MAX; self.n];
        let mut used = Vec::new();
        let mut count = 0;
        for &v in order.iter().rev() {
            used.clear();
            used.resize(count + 1, false);
            for u in self.neighbors(v) {
                if color[u] != usize::MAX {
                    used[color[u]] = true;
                }
            }
            let c = used.iter().position(|&b| !b).expect("a free color");
            color[v] = c;
            count = count.max(c + 1);
        }
        (count, color)
    }

    pub fn is_proper_coloring(&self, color: &[usize]) -> bool {
        self.edges().iter().all(|&(u, v)| color[u] != color[v])
    }

    /// Exact test of `clique number <= bound` by branch and bound.
    pub fn max_clique_at_most(&self, bound: usize) -> CliqueCheck {
        let target = bound + 1;
        if target > self.n {
            return CliqueCheck::Within;
        }
        // Vertices of degree < bound cannot sit in a (bound+1)-clique.
        let alive: Vec<usize> = (0..self.n).filter(|&v| self.degree(v) >= bound).collect();
        let mut clique = Vec::new();
        for (i, &v) in alive.iter().enumerate() {
            let cand: Vec<usize> = alive[i + 1..]
                .iter()
                .copied()
                .filter(|&u| self.has_edge(u, v))
                .collect();
            clique.push(v);
            if self.grow_clique(&mut clique, &cand, target) {
                return CliqueCheck::Exceeds(clique);
            }
            clique.pop();
        }
        CliqueCheck::Within
    }

    fn grow_clique(&self, clique: &mut Vec<usize>, cand: &[usize], target: usize) -> bool {
        if clique.len() >= target {
            return true;
        }
        if clique.len() + cand.len() < target {
            return false;
        }
        for (i, &u) in cand.iter().enumerate() {
            if clique.len() + cand.len() - i < target {
                return false;
            }
            let next: Vec<usize> = cand[i + 1..]
                .iter()
                .copied()
                .filter(|&w| self.has_edge(u, w))
                .collect();
            clique.push(u);
            if self.grow_clique(clique, &next, target) {
                return true;
            }
            clique.pop();
        }
        false
    }
}

/// Outcome of [`Graph::max_clique_at_most`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliqueCheck {
    Within,
    /// A clique with `bound + 1` vertices.
    Exceeds(Vec<usize>),
}

impl CliqueCheck {
    pub fn is_within(&self) -> bool {
        matches!(self, CliqueCheck::Within)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassKind {
    Clique,
    IndependentSet,
}

/// Vertices grouped by neighborhood type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypePartition {
    /// Sorted classes, ordered by smallest member.
    pub classes: Vec<Vec<usize>>,
    pub kinds: Vec<ClassKind>,
    pub class_of: Vec<usize>,
}

impl TypePartition {
    /// The neighborhood diversity.
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

/// `binomial(r + k - 2, r - 1)`, an upper bound on the Ramsey number R(r, k).
pub fn ramsey_upper_bound(r: u64, k: u64) -> Result<u64> {
    if r == 0 || k == 0 {
        return Err(CffaError::Precondition(format!(
            "ramsey bound needs r, k >= 1 (got r={r}, k={k})"
        )));
    }
    binomial(r + k - 2, r - 1)
        .ok_or_else(|| CffaError::Overflow(format!("binomial({}, {})", r + k - 2, r - 1)))
}

/// Exact binomial coefficient, `None` when it does not fit in a u64.
pub fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step.
        acc = acc.checked_mul((n - i) as u128)? / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Iterator over the set bit positions of a word, lowest first.
#[derive(Debug, Clone, Copy)]
pub struct BitIter(pub u64);

impl Iterator for BitIter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            let b = self.0.trailing_zeros() as usize;
            self.0 &= self.0 - 1;
            Some(b)
        }
    }
}

pub fn mask_of(vertices: &[usize]) -> u64 {
    vertices.iter().fold(0, |m, &v| m | 1 << v)
}

pub fn members(mask: u64) -> Vec<usize> {
    BitIter(mask).collect()
}
