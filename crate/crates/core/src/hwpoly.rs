//! The 2^m mask-polynomial solver.
//!
//! Round `i` holds the set of job masks that are disjoint unions of one
//! feasible bundle for each of the agents `0..i`. Masks are monomial
//! exponents; a product of monomials adds exponents, and the sum keeps its
//! Hamming weight exactly when the two masks are disjoint, so projecting a
//! product onto the expected weight is the disjointness filter.
//!
//! Two engines compute the rounds:
//!
//! * dense (m ≤ [`DENSE_MAX_JOBS`]): one ranked subset convolution per round —
//!   a Hamming-stratified zeta transform of both factors, a pointwise product
//!   along the weight axis, and a Möbius transform. Coefficients are reduced
//!   to presence after every round, so every true coefficient is at most
//!   2^m and wrapping `u32` arithmetic is exact.
//! * sparse: per-bundle shift products over sorted mask layers; cost is
//!   proportional to (layer size × family size) rather than 2^m.

use crate::budget::{Budget, Meter};
use crate::error::{CffaError, Result};
use crate::graph::BitIter;
use crate::instance::{Assignment, Instance, SolveResult};

/// Largest job count handled by the dense engine under [`Engine::Auto`].
pub const DENSE_MAX_JOBS: usize = 20;

/// Hard ceiling for the dense engine's tables.
const DENSE_HARD_LIMIT: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Engine {
    #[default]
    Auto,
    Dense,
    Sparse,
}

/// Presence-only polynomial over m-bit masks, stratified by Hamming weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskPolynomial {
    layers: Vec<Vec<u64>>,
}

impl MaskPolynomial {
    pub fn zero(m: usize) -> Self {
        MaskPolynomial {
            layers: vec![Vec::new(); m + 1],
        }
    }

    /// The constant polynomial 1 = y^0.
    pub fn one(m: usize) -> Self {
        let mut p = MaskPolynomial::zero(m);
        p.layers[0].push(0);
        p
    }

    pub fn from_masks(m: usize, masks: impl IntoIterator<Item = u64>) -> Self {
        let mut p = MaskPolynomial::zero(m);
        for mask in masks {
            p.layers[mask.count_ones() as usize].push(mask);
        }
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        for layer in &mut self.layers {
            layer.sort_unstable();
            layer.dedup();
        }
    }

    pub fn max_weight(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn layer(&self, h: usize) -> &[u64] {
        self.layers.get(h).map_or(&[], Vec::as_slice)
    }

    pub fn contains(&self, mask: u64) -> bool {
        self.layer(mask.count_ones() as usize)
            .binary_search(&mask)
            .is_ok()
    }

    pub fn is_zero(&self) -> bool {
        self.layers.iter().all(Vec::is_empty)
    }

    pub fn len(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    /// All masks, by weight then value.
    pub fn masks(&self) -> impl Iterator<Item = u64> + '_ {
        self.layers.iter().flatten().copied()
    }

    /// Every mask in layer `h` has weight `h`.
    pub fn layers_sound(&self) -> bool {
        self.layers
            .iter()
            .enumerate()
            .all(|(h, l)| l.iter().all(|m| m.count_ones() as usize == h))
    }
}

/// Whether two masks are disjoint, decided by weight alone: the weight of
/// their union equals the sum of their weights.
#[inline]
pub fn disjoint_by_union_weight(a: u64, b: u64) -> bool {
    (a | b).count_ones() == a.count_ones() + b.count_ones()
}

/// The same test on the exponent sum: adding two characteristic vectors as
/// integers keeps the total weight exactly when no carry occurs.
#[inline]
pub fn disjoint_by_sum_weight(a: u64, b: u64) -> bool {
    (a as u128 + b as u128).count_ones() == a.count_ones() + b.count_ones()
}

/// `H_target(R(poly × y^bundle))`: unions of `bundle` with masks of weight
/// `target − |bundle|` that keep weight `target`.
pub fn hw_shift_product(poly: &MaskPolynomial, bundle: u64, target: usize) -> Vec<u64> {
    let w = bundle.count_ones() as usize;
    let Some(source) = target.checked_sub(w) else {
        return Vec::new();
    };
    poly.layer(source)
        .iter()
        .map(|&prev| prev | bundle)
        .filter(|u| u.count_ones() as usize == target)
        .collect()
}

/// Feasible bundles per agent, each list sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibleBundleFamily {
    pub per_agent: Vec<Vec<u64>>,
}

impl FeasibleBundleFamily {
    pub fn agent(&self, i: usize) -> &[u64] {
        &self.per_agent[i]
    }

    pub fn total(&self) -> usize {
        self.per_agent.iter().map(Vec::len).sum()
    }
}

/// Independent, threshold-meeting (and size-bounded) bundles for every agent.
pub fn build_families(inst: &Instance, budget: &Budget) -> Result<FeasibleBundleFamily> {
    check_width(inst)?;
    let mut meter = budget.meter("bundle families");
    build_families_metered(inst, &mut meter)
}

fn check_width(inst: &Instance) -> Result<()> {
    if inst.m() > 64 {
        return Err(CffaError::MaskWidth {
            jobs: inst.m(),
            limit: 64,
        });
    }
    Ok(())
}

fn build_families_metered(inst: &Instance, meter: &mut Meter) -> Result<FeasibleBundleFamily> {
    let m = inst.m();
    let g = inst.graph();
    // forward[x]: jobs after x that do not conflict with x.
    let forward: Vec<u64> = (0..m)
        .map(|x| {
            let later = if x + 1 >= 64 { 0 } else { !0u64 << (x + 1) };
            let all = if m == 64 { !0 } else { (1u64 << m) - 1 };
            later & all & !g.mask(x)
        })
        .collect();
    let all = if m == 64 { !0 } else { (1u64 << m) - 1 };
    let cap = inst.bundle_cap();
    let mut per_agent = Vec::with_capacity(inst.n());
    for agent in 0..inst.n() {
        let row = inst.row(agent);
        let mut out = Vec::new();
        extend_bundles(row, inst.eta(), &forward, cap, 0, 0, 0, all, &mut out, meter)?;
        out.sort_unstable();
        per_agent.push(out);
    }
    Ok(FeasibleBundleFamily { per_agent })
}

#[allow(clippy::too_many_arguments)]
fn extend_bundles(
    row: &[u64],
    eta: u64,
    forward: &[u64],
    cap: usize,
    mask: u64,
    size: usize,
    util: u64,
    candidates: u64,
    out: &mut Vec<u64>,
    meter: &mut Meter,
) -> Result<()> {
    meter.tick()?;
    if util >= eta {
        out.push(mask);
    }
    if size == cap {
        return Ok(());
    }
    for x in BitIter(candidates) {
        extend_bundles(
            row,
            eta,
            forward,
            cap,
            mask | 1 << x,
            size + 1,
            util + row[x],
            candidates & forward[x],
            out,
            meter,
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, Default)]
pub struct HwpolyOptions {
    pub engine: Engine,
}

/// Every round of the recurrence, kept for witness reconstruction and for
/// inspecting intermediate polynomials.
#[derive(Debug, Clone)]
pub struct HwRounds {
    m: usize,
    pub families: FeasibleBundleFamily,
    /// `rounds[j]` is the polynomial after `j` agents; `rounds[0] = 1`.
    rounds: Vec<RoundSet>,
}

#[derive(Debug, Clone)]
enum RoundSet {
    Dense(Vec<u64>),
    Sparse(MaskPolynomial),
}

impl RoundSet {
    fn contains(&self, mask: u64) -> bool {
        match self {
            RoundSet::Dense(bits) => bits[(mask >> 6) as usize] >> (mask & 63) & 1 == 1,
            RoundSet::Sparse(p) => p.contains(mask),
        }
    }

    fn to_poly(&self, m: usize) -> MaskPolynomial {
        match self {
            RoundSet::Dense(bits) => MaskPolynomial::from_masks(
                m,
                bits.iter().enumerate().flat_map(|(w, &word)| {
                    BitIter(word).map(move |b| ((w as u64) << 6) | b as u64)
                }),
            ),
            RoundSet::Sparse(p) => p.clone(),
        }
    }
}

impl HwRounds {
    /// Number of completed rounds (may stop early when a round is zero).
    pub fn completed(&self) -> usize {
        self.rounds.len() - 1
    }

    pub fn contains(&self, round: usize, mask: u64) -> bool {
        self.rounds.get(round).is_some_and(|r| r.contains(mask))
    }

    pub fn polynomial(&self, round: usize) -> MaskPolynomial {
        self.rounds[round].to_poly(self.m)
    }

    /// The final mask a witness is rebuilt from: the full mask for Complete,
    /// else the smallest mask of the lowest non-empty weight.
    fn target(&self, inst: &Instance) -> Option<u64> {
        if self.completed() < inst.n() {
            return None;
        }
        let last = &self.rounds[inst.n()];
        if inst.is_complete() {
            let full = full_mask(self.m);
            return last.contains(full).then_some(full);
        }
        match last {
            RoundSet::Sparse(p) => p.masks().next(),
            RoundSet::Dense(_) => last.to_poly(self.m).masks().next(),
        }
    }

    /// Splits `mask` (present after round `j`) into one bundle per agent
    /// `0..j`, taking the smallest usable bundle at each step.
    pub fn decompose(&self, round: usize, mut mask: u64) -> Option<Vec<u64>> {
        if !self.contains(round, mask) {
            return None;
        }
        let mut bundles = vec![0; round];
        for i in (1..=round).rev() {
            let b = *self.families.per_agent[i - 1]
                .iter()
                .find(|&&b| b & !mask == 0 && self.rounds[i - 1].contains(mask & !b))?;
            bundles[i - 1] = b;
            mask &= !b;
        }
        Some(bundles)
    }
}

fn full_mask(m: usize) -> u64 {
    if m == 64 {
        !0
    } else {
        (1u64 << m) - 1
    }
}

/// Runs all rounds of the recurrence.
pub fn hwpoly_rounds(inst: &Instance, budget: &Budget, opts: &HwpolyOptions) -> Result<HwRounds> {
    check_width(inst)?;
    let m = inst.m();
    let dense = match opts.engine {
        Engine::Auto => m <= DENSE_MAX_JOBS,
        Engine::Dense => true,
        Engine::Sparse => false,
    };
    if dense && m > DENSE_HARD_LIMIT {
        return Err(CffaError::MaskWidth {
            jobs: m,
            limit: DENSE_HARD_LIMIT,
        });
    }
    let mut meter = budget.meter("hwpoly");
    let families = build_families_metered(inst, &mut meter)?;
    let mut rounds = Vec::with_capacity(inst.n() + 1);
    if dense {
        let mut conv = DenseConvolver::new(m);
        let mut cur = vec![0u64; ((1usize << m) / 64).max(1)];
        cur[0] = 1;
        rounds.push(RoundSet::Dense(cur.clone()));
        for fam in &families.per_agent {
            meter.charge(((m + 1) << m) as u64)?;
            cur = conv.round(&cur, fam);
            let zero = cur.iter().all(|&w| w == 0);
            rounds.push(RoundSet::Dense(cur.clone()));
            if zero {
                break;
            }
        }
    } else {
        let mut cur = MaskPolynomial::one(m);
        rounds.push(RoundSet::Sparse(cur.clone()));
        for fam in &families.per_agent {
            cur = sparse_round(&cur, fam, &mut meter)?;
            let zero = cur.is_zero();
            rounds.push(RoundSet::Sparse(cur.clone()));
            if zero {
                break;
            }
        }
    }
    Ok(HwRounds {
        m,
        families,
        rounds,
    })
}

fn sparse_round(prev: &MaskPolynomial, family: &[u64], meter: &mut Meter) -> Result<MaskPolynomial> {
    let mut next = MaskPolynomial::zero(prev.max_weight());
    for &bundle in family {
        let w = bundle.count_ones() as usize;
        for h in 0..=prev.max_weight() - w {
            let layer = prev.layer(h);
            if layer.is_empty() {
                continue;
            }
            meter.charge(layer.len() as u64)?;
            next.layers[h + w].extend(hw_shift_product(prev, bundle, h + w));
        }
    }
    next.normalize();
    Ok(next)
}

/// Scratch tables for the dense engine. Both tables are laid out row-major
/// by mask: row `T` holds the weight-stratified transform values of `T`.
struct DenseConvolver {
    m: usize,
    a: Vec<u32>,
    b: Vec<u32>,
}

impl DenseConvolver {
    fn new(m: usize) -> Self {
        let cells = (m + 1) << m;
        DenseConvolver {
            m,
            a: vec![0; cells],
            b: vec![0; cells],
        }
    }

    /// Presence bitset of `{ S ∪ B : S ∈ prev, B ∈ family, S ∩ B = ∅ }`.
    fn round(&mut self, prev: &[u64], family: &[u64]) -> Vec<u64> {
        let m = self.m;
        let w = m + 1;
        let size = 1usize << m;
        self.a.fill(0);
        self.b.fill(0);
        let (mut a_lo, mut a_hi) = (w, 0);
        for (wi, &word) in prev.iter().enumerate() {
            for bit in BitIter(word) {
                let s = (wi << 6) | bit;
                let h = s.count_ones() as usize;
                self.a[s * w + h] = 1;
                a_lo = a_lo.min(h);
                a_hi = a_hi.max(h);
            }
        }
        let (mut b_lo, mut b_hi) = (w, 0);
        for &f in family {
            let s = f as usize;
            let h = s.count_ones() as usize;
            self.b[s * w + h] = 1;
            b_lo = b_lo.min(h);
            b_hi = b_hi.max(h);
        }
        let mut out = vec![0u64; (size / 64).max(1)];
        if a_lo > a_hi || b_lo > b_hi || a_lo + b_lo > m {
            return out;
        }
        transform(&mut self.a, w, u32::wrapping_add);
        transform(&mut self.b, w, u32::wrapping_add);
        // Pointwise product along the weight axis, written back into `a`.
        let c_lo = a_lo + b_lo;
        let c_hi = m.min(a_hi + b_hi);
        let mut row = vec![0u32; w];
        for (ra, rb) in self.a.chunks_exact_mut(w).zip(self.b.chunks_exact(w)) {
            row[c_lo..=c_hi].fill(0);
            for i in a_lo..=a_hi.min(c_hi - b_lo) {
                let x = ra[i];
                if x == 0 {
                    continue;
                }
                for j in b_lo..=b_hi.min(c_hi - i) {
                    row[i + j] = row[i + j].wrapping_add(x.wrapping_mul(rb[j]));
                }
            }
            ra.fill(0);
            ra[c_lo..=c_hi].copy_from_slice(&row[c_lo..=c_hi]);
        }
        transform(&mut self.a, w, u32::wrapping_sub);
        for (t, ra) in self.a.chunks_exact(w).enumerate() {
            if ra[t.count_ones() as usize] != 0 {
                out[t >> 6] |= 1 << (t & 63);
            }
        }
        out
    }
}

/// Rows per cache block in [`transform`]; sized so a block of the widest
/// dense table stays within a typical L2 cache.
const BLOCK_BITS: usize = 12;
/// Rows gathered per block when transforming across blocks.
const STRIPE_ROWS: usize = 16;

/// Zeta (`add`) or Möbius (`sub`) transform over the subset lattice, applied
/// to every lane of rows of width `w`.
///
/// Low bits are transformed block by block; the remaining high bits are
/// transformed stripe by stripe, each stripe taking the same few rows from
/// every block, so both phases work on cache-sized pieces.
fn transform(f: &mut [u32], w: usize, op: impl Fn(u32, u32) -> u32 + Copy) {
    let rows = f.len() / w;
    let block_rows = rows.min(1 << BLOCK_BITS);
    for block in f.chunks_exact_mut(block_rows * w) {
        let mut step = w;
        while step < block.len() {
            for chunk in block.chunks_exact_mut(2 * step) {
                let (lo, hi) = chunk.split_at_mut(step);
                for (h, &l) in hi.iter_mut().zip(lo.iter()) {
                    *h = op(*h, l);
                }
            }
            step *= 2;
        }
    }
    let blocks = rows / block_rows;
    if blocks == 1 {
        return;
    }
    let stripe = STRIPE_ROWS.min(block_rows) * w;
    let block_len = block_rows * w;
    for offset in (0..block_len).step_by(stripe) {
        let mut step = 1;
        while step < blocks {
            for lo_block in (0..blocks).filter(|b| b & step == 0) {
                let lo = lo_block * block_len + offset;
                let hi = lo + step * block_len;
                let (head, tail) = f.split_at_mut(hi);
                for (h, &l) in tail[..stripe].iter_mut().zip(&head[lo..lo + stripe]) {
                    *h = op(*h, l);
                }
            }
            step *= 2;
        }
    }
}

pub fn solve_hwpoly(inst: &Instance, budget: &Budget) -> Result<SolveResult> {
    solve_hwpoly_with(inst, budget, &HwpolyOptions::default())
}

pub fn solve_hwpoly_with(inst: &Instance, budget: &Budget, opts: &HwpolyOptions) -> Result<SolveResult> {
    check_width(inst)?;
    if inst.n() > inst.m() {
        return Ok(SolveResult::no());
    }
    let rounds = hwpoly_rounds(inst, budget, opts)?;
    let Some(target) = rounds.target(inst) else {
        return Ok(SolveResult::no());
    };
    let bundles = rounds
        .decompose(inst.n(), target)
        .expect("every present mask decomposes into feasible bundles");
    Ok(SolveResult::yes(Assignment::from_masks(&bundles)))
}

/// Number of distinct masks per round (diagnostics for scaling runs).
pub fn round_sizes(rounds: &HwRounds) -> Vec<usize> {
    (0..rounds.rounds.len())
        .map(|j| match &rounds.rounds[j] {
            RoundSet::Dense(bits) => bits.iter().map(|w| w.count_ones() as usize).sum(),
            RoundSet::Sparse(p) => p.len(),
        })
        .collect()
}
