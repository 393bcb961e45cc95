//! Hopcroft–Karp maximum matching on bipartite graphs.

use std::collections::VecDeque;

use crate::error::{CffaError, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    left: usize,
    right: usize,
    adj: Vec<Vec<usize>>,
}

impl BipartiteGraph {
    pub fn new(left: usize, right: usize) -> Self {
        BipartiteGraph {
            left,
            right,
            adj: vec![Vec::new(); left],
        }
    }

    pub fn from_edges(left: usize, right: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut b = BipartiteGraph::new(left, right);
        for &(l, r) in edges {
            b.add_edge(l, r)?;
        }
        Ok(b)
    }

    pub fn add_edge(&mut self, l: usize, r: usize) -> Result<()> {
        if l >= self.left || r >= self.right {
            return Err(CffaError::IndexOutOfRange(format!(
                "bipartite edge ({l},{r}) in a {}x{} graph",
                self.left, self.right
            )));
        }
        if !self.adj[l].contains(&r) {
            self.adj[l].push(r);
        }
        Ok(())
    }

    pub fn left_count(&self) -> usize {
        self.left
    }

    pub fn right_count(&self) -> usize {
        self.right
    }

    pub fn neighbors(&self, l: usize) -> &[usize] {
        &self.adj[l]
    }

    pub fn has_edge(&self, l: usize, r: usize) -> bool {
        self.adj[l].contains(&r)
    }
}

/// A matching: `left[l]` is the right vertex matched to `l`, and vice versa.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    pub left: Vec<Option<usize>>,
    pub right: Vec<Option<usize>>,
}

impl Matching {
    pub fn size(&self) -> usize {
        self.left.iter().filter(|m| m.is_some()).count()
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.left
            .iter()
            .enumerate()
            .filter_map(|(l, r)| r.map(|r| (l, r)))
            .collect()
    }

    pub fn saturates_left(&self) -> bool {
        self.left.iter().all(Option::is_some)
    }
}

const INF: usize = usize::MAX;

/// Maximum-cardinality matching in O(E·√V).
pub fn maximum_bipartite_matching(b: &BipartiteGraph) -> Matching {
    let mut mate_l = vec![None; b.left];
    let mut mate_r: Vec<Option<usize>> = vec![None; b.right];
    let mut dist = vec![INF; b.left];
    loop {
        // Layer free left vertices by BFS over alternating paths.
        let mut queue = VecDeque::new();
        for l in 0..b.left {
            if mate_l[l].is_none() {
                dist[l] = 0;
                queue.push_back(l);
            } else {
                dist[l] = INF;
            }
        }
        let mut found = false;
        while let Some(l) = queue.pop_front() {
            for &r in &b.adj[l] {
                match mate_r[r] {
                    None => found = true,
                    Some(l2) if dist[l2] == INF => {
                        dist[l2] = dist[l] + 1;
                        queue.push_back(l2);
                    }
                    Some(_) => {}
                }
            }
        }
        if !found {
            break;
        }
        let mut next = vec![0; b.left];
        for l in 0..b.left {
            if mate_l[l].is_none() {
                augment(b, l, &mut mate_l, &mut mate_r, &mut dist, &mut next);
            }
        }
    }
    Matching {
        left: mate_l,
        right: mate_r,
    }
}

fn augment(
    b: &BipartiteGraph,
    l: usize,
    mate_l: &mut [Option<usize>],
    mate_r: &mut [Option<usize>],
    dist: &mut [usize],
    next: &mut [usize],
) -> bool {
    while next[l] < b.adj[l].len() {
        let r = b.adj[l][next[l]];
        next[l] += 1;
        let ok = match mate_r[r] {
            None => true,
            Some(l2) => {
                dist[l2] == dist[l].wrapping_add(1) && augment(b, l2, mate_l, mate_r, dist, next)
            }
        };
        if ok {
            mate_l[l] = Some(r);
            mate_r[r] = Some(l);
            return true;
        }
    }
    dist[l] = INF;
    false
}
