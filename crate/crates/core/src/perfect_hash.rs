//! Explicit (p, q)-perfect hash families: colorings of `[p]` with `q` colors
//! such that every subset of at most `q` elements is injectively colored by
//! some member.
//!
//! Small universes use a greedy cover built against the exhaustive list of
//! q-subsets, so every family is certified by construction. Large universes
//! compose the modular hashes `x ↦ ((a·x + b) mod P) mod r`, `r = C(q,2) + 1`,
//! with a greedy family on `[r]`; for every q-set the expected number of
//! colliding pairs over all `(a, b)` is below one, so some outer function is
//! injective on it.

use std::collections::{HashMap, HashSet};
use std::sync::{Arc, Mutex, OnceLock};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CffaError, Result};
use crate::graph::binomial;

/// Above this many q-subsets, the two-level construction is used.
pub const DIRECT_LIMIT: u64 = 20_000;

const CANDIDATES_PER_STEP: usize = 16;
const FAMILY_SEED: u64 = 0x5eed_cffa;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerfectHashFamily {
    pub p: usize,
    pub q: usize,
    /// `functions[f][x]` is the color of element `x` under member `f`.
    pub functions: Vec<Vec<u8>>,
}

impl PerfectHashFamily {
    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn is_injective_on(&self, f: usize, subset: u64) -> bool {
        injective(&self.functions[f], subset)
    }

    /// First q-subset (as a mask) that no member colors injectively, found by
    /// exhaustive search. `None` certifies the family.
    pub fn find_uncovered(&self) -> Option<u64> {
        let k = self.q.min(self.p);
        KSubsets::new(self.p, k).find(|&s| !(0..self.len()).any(|f| self.is_injective_on(f, s)))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PhfOptions {
    pub direct_limit: u64,
    pub seed: u64,
}

impl Default for PhfOptions {
    fn default() -> Self {
        PhfOptions {
            direct_limit: DIRECT_LIMIT,
            seed: FAMILY_SEED,
        }
    }
}

pub fn build_perfect_hash_family(p: usize, q: usize) -> Result<PerfectHashFamily> {
    build_perfect_hash_family_with(p, q, &PhfOptions::default())
}

pub fn build_perfect_hash_family_with(p: usize, q: usize, opts: &PhfOptions) -> Result<PerfectHashFamily> {
    if q > p {
        return Err(CffaError::Precondition(format!(
            "perfect hash family needs q ≤ p (got p={p}, q={q})"
        )));
    }
    if q == 0 || p > 64 || q > 255 {
        return Err(CffaError::Precondition(format!(
            "perfect hash family needs 1 ≤ q ≤ p ≤ 64 (got p={p}, q={q})"
        )));
    }
    if q == 1 {
        return Ok(PerfectHashFamily {
            p,
            q,
            functions: vec![vec![0; p]],
        });
    }
    if q == p {
        return Ok(PerfectHashFamily {
            p,
            q,
            functions: vec![(0..p as u8).collect()],
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ ((p as u64) << 32) ^ q as u64);
    let subsets = binomial(p as u64, q as u64).unwrap_or(u64::MAX);
    let functions = if subsets <= opts.direct_limit {
        greedy_cover(p, q, &mut rng)
    } else {
        two_level(p, q, &mut rng)
    };
    Ok(PerfectHashFamily { p, q, functions })
}

type FamilyCache = Mutex<HashMap<(usize, usize), Arc<PerfectHashFamily>>>;

/// Shared families for the default options, built once per `(p, q)`.
pub fn perfect_hash_family(p: usize, q: usize) -> Result<Arc<PerfectHashFamily>> {
    static CACHE: OnceLock<FamilyCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(f) = cache.lock().expect("cache lock").get(&(p, q)) {
        return Ok(f.clone());
    }
    let family = Arc::new(build_perfect_hash_family(p, q)?);
    cache
        .lock()
        .expect("cache lock")
        .entry((p, q))
        .or_insert_with(|| family.clone());
    Ok(family)
}

fn injective(coloring: &[u8], subset: u64) -> bool {
    let mut seen = [0u64; 4];
    for x in crate::graph::BitIter(subset) {
        let c = coloring[x] as usize;
        if seen[c >> 6] >> (c & 63) & 1 == 1 {
            return false;
        }
        seen[c >> 6] |= 1 << (c & 63);
    }
    true
}

/// Repeatedly takes the first uncovered q-subset, samples colorings that are
/// injective on it, and keeps the one covering the most uncovered subsets.
fn greedy_cover(p: usize, q: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<u8>> {
    let mut uncovered: Vec<u64> = KSubsets::new(p, q).collect();
    let mut family = Vec::new();
    let mut colors: Vec<u8> = (0..q as u8).collect();
    while let Some(&first) = uncovered.first() {
        let mut best: Option<(usize, Vec<u8>)> = None;
        for _ in 0..CANDIDATES_PER_STEP {
            let mut f: Vec<u8> = (0..p).map(|_| rng.gen_range(0..q as u8)).collect();
            colors.shuffle(rng);
            for (x, &c) in crate::graph::BitIter(first).zip(&colors) {
                f[x] = c;
            }
            let covered = uncovered.iter().filter(|&&s| injective(&f, s)).count();
            if best.as_ref().is_none_or(|(b, _)| covered > *b) {
                best = Some((covered, f));
            }
        }
        let (_, f) = best.expect("at least one candidate");
        uncovered.retain(|&s| !injective(&f, s));
        family.push(f);
    }
    family
}

fn two_level(p: usize, q: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<u8>> {
    let r = q * (q - 1) / 2 + 1;
    if r >= p {
        return greedy_cover(p, q, rng);
    }
    let inner = if r == q {
        vec![(0..q as u8).collect()]
    } else {
        greedy_cover(r, q, rng)
    };
    let prime = next_prime(p.max(r));
    let mut seen = HashSet::new();
    let mut family = Vec::new();
    for a in 1..prime {
        for b in 0..prime {
            let outer: Vec<usize> = (0..p).map(|x| ((a * x + b) % prime) % r).collect();
            for g in &inner {
                let f: Vec<u8> = outer.iter().map(|&y| g[y]).collect();
                if seen.insert(f.clone()) {
                    family.push(f);
                }
            }
        }
    }
    family
}

fn next_prime(n: usize) -> usize {
    (n.max(2)..)
        .find(|&c| (2..).take_while(|d| d * d <= c).all(|d| c % d != 0))
        .expect("primes are unbounded")
}

/// All `k`-element subsets of `[p]` as masks, in increasing numeric order.
#[derive(Debug, Clone)]
pub struct KSubsets {
    next: Option<u64>,
    limit: u64,
}

impl KSubsets {
    pub fn new(p: usize, k: usize) -> Self {
        assert!(p <= 64 && k <= p);
        let first = if k == 64 { !0 } else { (1u64 << k) - 1 };
        KSubsets {
            next: Some(first),
            limit: if p == 64 { !0 } else { (1u64 << p) - 1 },
        }
    }
}

impl Iterator for KSubsets {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let cur = self.next?;
        // Gosper's hack.
        self.next = if cur == 0 {
            None
        } else {
            let c = cur & cur.wrapping_neg();
            match cur.checked_add(c) {
                Some(r) => {
                    let nxt = (((r ^ cur) >> 2) / c) | r;
                    (nxt <= self.limit).then_some(nxt)
                }
                None => None,
            }
        };
        Some(cur)
    }
}
