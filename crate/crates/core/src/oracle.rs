//! Brute-force ground truth for all four variants.
//!
//! [`solve_oracle`] labels every job with "unassigned" or an agent and
//! searches depth-first in label order, so the first accepting assignment it
//! finds is the lexicographically first one. [`solve_oracle_bundles`]
//! enumerates feasible bundles per agent and then searches for a disjoint
//! choice; the two share no code beyond the instance type.

use crate::budget::{Budget, Meter};
use crate::error::{CffaError, Result};
use crate::instance::{Assignment, Instance, SolveResult};

pub fn solve_oracle(inst: &Instance, budget: &Budget) -> Result<SolveResult> {
    let m = inst.m();
    if m > budget.max_jobs {
        return Err(CffaError::BudgetExceeded(format!(
            "oracle: {m} jobs exceeds the limit of {}",
            budget.max_jobs
        )));
    }
    let nbr = inst.graph().masks()?;
    let n = inst.n();
    if n > m {
        // Every agent needs a non-empty bundle.
        return Ok(SolveResult::no());
    }
    let mut suffix = vec![vec![0u64; m + 1]; n];
    for (i, s) in suffix.iter_mut().enumerate() {
        for x in (0..m).rev() {
            s[x] = s[x + 1] + inst.utility(i, x);
        }
    }
    // twin[i]: the nearest earlier agent with an identical row. Agent i may
    // only open its bundle once that agent has; the lexicographically first
    // solution always respects this.
    let twin = (0..n)
        .map(|i| (0..i).rev().find(|&j| inst.row(j) == inst.row(i)))
        .collect();
    let mut search = LabelSearch {
        inst,
        nbr,
        suffix,
        twin,
        cap: inst.bundle_cap(),
        bundle: vec![0; n],
        util: vec![0; n],
        size: vec![0; n],
        label: vec![None; m],
        meter: budget.meter("oracle"),
    };
    if search.dfs(0)? {
        let witness = search
            .label
            .iter()
            .enumerate()
            .filter_map(|(x, a)| a.map(|a| (x, a)))
            .collect();
        Ok(SolveResult::yes(witness))
    } else {
        Ok(SolveResult::no())
    }
}

struct LabelSearch<'a> {
    inst: &'a Instance,
    nbr: Vec<u64>,
    suffix: Vec<Vec<u64>>,
    twin: Vec<Option<usize>>,
    cap: usize,
    bundle: Vec<u64>,
    util: Vec<u64>,
    size: Vec<usize>,
    label: Vec<Option<usize>>,
    meter: Meter,
}

impl LabelSearch<'_> {
    fn satisfied(&self) -> bool {
        self.util.iter().all(|&u| u >= self.inst.eta())
    }

    fn dfs(&mut self, x: usize) -> Result<bool> {
        self.meter.tick()?;
        let eta = self.inst.eta();
        let n = self.inst.n();
        if (0..n).any(|i| self.util[i] + self.suffix[i][x] < eta) {
            return Ok(false);
        }
        if x == self.inst.m() {
            return Ok(self.satisfied());
        }
        if !self.inst.is_complete() {
            // Leaving the rest unassigned is the smallest continuation.
            if self.satisfied() {
                return Ok(true);
            }
            if self.dfs(x + 1)? {
                return Ok(true);
            }
        }
        for a in 0..n {
            if self.nbr[x] & self.bundle[a] != 0 || self.size[a] >= self.cap {
                continue;
            }
            if self.size[a] == 0 {
                if let Some(t) = self.twin[a] {
                    if self.size[t] == 0 {
                        continue;
                    }
                }
            }
            let u = self.inst.utility(a, x);
            self.bundle[a] |= 1 << x;
            self.util[a] += u;
            self.size[a] += 1;
            self.label[x] = Some(a);
            if self.dfs(x + 1)? {
                return Ok(true);
            }
            self.label[x] = None;
            self.size[a] -= 1;
            self.util[a] -= u;
            self.bundle[a] &= !(1 << x);
        }
        Ok(false)
    }
}

/// Per-agent feasible bundles, then a search for pairwise-disjoint choices.
/// Size-bounded variants only.
pub fn solve_oracle_bundles(inst: &Instance, budget: &Budget) -> Result<SolveResult> {
    let s = inst.size_bound().ok_or_else(|| {
        CffaError::Precondition("bundle oracle needs a size-bounded variant".into())
    })?;
    let nbr = inst.graph().masks()?;
    let n = inst.n();
    if n > inst.m() {
        return Ok(SolveResult::no());
    }
    let mut meter = budget.meter("bundle oracle");
    let mut families = Vec::with_capacity(n);
    for agent in 0..n {
        let mut fam = Vec::new();
        enumerate_bundles(inst, agent, &nbr, s, 0, 0, 0, 0, &mut fam, &mut meter)?;
        if fam.is_empty() {
            return Ok(SolveResult::no());
        }
        fam.sort_unstable();
        families.push(fam);
    }
    let full = if inst.m() == 64 { u64::MAX } else { (1u64 << inst.m()) - 1 };
    let mut chosen = Vec::with_capacity(n);
    let found = pick_disjoint(
        &families,
        inst.is_complete().then_some(full),
        s,
        0,
        &mut chosen,
        &mut meter,
    )?;
    Ok(if found {
        SolveResult::yes(Assignment::from_masks(&chosen))
    } else {
        SolveResult::no()
    })
}

#[allow(clippy::too_many_arguments)]
fn enumerate_bundles(
    inst: &Instance,
    agent: usize,
    nbr: &[u64],
    s: usize,
    next: usize,
    mask: u64,
    size: usize,
    util: u64,
    out: &mut Vec<u64>,
    meter: &mut Meter,
) -> Result<()> {
    meter.tick()?;
    if util >= inst.eta() {
        out.push(mask);
    }
    if size == s {
        return Ok(());
    }
    for x in next..inst.m() {
        if nbr[x] & mask == 0 {
            enumerate_bundles(
                inst,
                agent,
                nbr,
                s,
                x + 1,
                mask | 1 << x,
                size + 1,
                util + inst.utility(agent, x),
                out,
                meter,
            )?;
        }
    }
    Ok(())
}

fn pick_disjoint(
    families: &[Vec<u64>],
    must_cover: Option<u64>,
    s: usize,
    used: u64,
    chosen: &mut Vec<u64>,
    meter: &mut Meter,
) -> Result<bool> {
    meter.tick()?;
    let i = chosen.len();
    if i == families.len() {
        return Ok(must_cover.is_none_or(|full| used == full));
    }
    if let Some(full) = must_cover {
        let uncovered = (full & !used).count_ones() as usize;
        if uncovered > s * (families.len() - i) {
            return Ok(false);
        }
    }
    for &b in &families[i] {
        if b & used != 0 {
            continue;
        }
        chosen.push(b);
        if pick_disjoint(families, must_cover, s, used | b, chosen, meter)? {
            return Ok(true);
        }
        chosen.pop();
    }
    Ok(false)
}
