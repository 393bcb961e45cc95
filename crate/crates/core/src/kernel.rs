//! Marking kernels. Each agent marks a bounded number of useful jobs, all
//! unmarked jobs are deleted, and the rule is repeated until nothing more
//! is deleted, so a second application is a no-op.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{CffaError, Result};
use crate::graph::{ramsey_upper_bound, ClassKind, CliqueCheck};
use crate::instance::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelRule {
    NbrDiversity,
    Degree,
    Chromatic,
    /// The conflict graph has no clique on `r` vertices.
    Ramsey(usize),
}

impl KernelRule {
    pub fn name(self) -> &'static str {
        match self {
            KernelRule::NbrDiversity => "nbrdiv",
            KernelRule::Degree => "degree",
            KernelRule::Chromatic => "chromatic",
            KernelRule::Ramsey(_) => "ramsey",
        }
    }
}

impl fmt::Display for KernelRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelRule::Ramsey(r) => write!(f, "ramsey(r={r})"),
            other => f.write_str(other.name()),
        }
    }
}

/// Parses `nbrdiv`, `degree`, `chromatic`, `ramsey` (r = 3) or `ramsey:<r>`.
impl FromStr for KernelRule {
    type Err = CffaError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "nbrdiv" => KernelRule::NbrDiversity,
            "degree" => KernelRule::Degree,
            "chromatic" => KernelRule::Chromatic,
            "ramsey" => KernelRule::Ramsey(3),
            _ => match s.strip_prefix("ramsey:").map(str::parse) {
                Some(Ok(r)) => KernelRule::Ramsey(r),
                _ => return Err(CffaError::parse("rule", format!("unknown kernel rule {s:?}"))),
            },
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelReport {
    #[serde(skip)]
    pub reduced: Instance,
    /// `job_map[k]` is the original index of reduced job `k`. Empty when the
    /// reduced instance is the trivial no-instance.
    pub job_map: Vec<usize>,
    pub rule: &'static str,
    /// τ, d, colour count or r, measured on the final reduced graph.
    pub parameter: usize,
    pub per_agent_budget: u64,
    pub stated_bound: u64,
    /// The single-formula bound (τηn², (d+1)ηn², cηn², n·R(r, ηn)); only
    /// the neighborhood-diversity rule may exceed it, through clique classes.
    pub headline_bound: u64,
    pub exceeds_headline: bool,
    pub original_jobs: usize,
    pub surviving_jobs: usize,
    pub trivial_no: bool,
    pub rounds: usize,
}

pub fn kernel_nbr_diversity(inst: &Instance) -> Result<KernelReport> {
    kernelize(inst, KernelRule::NbrDiversity)
}

pub fn kernel_degree(inst: &Instance) -> Result<KernelReport> {
    kernelize(inst, KernelRule::Degree)
}

pub fn kernel_chromatic(inst: &Instance) -> Result<KernelReport> {
    kernelize(inst, KernelRule::Chromatic)
}

pub fn kernel_ramsey(inst: &Instance, r: usize) -> Result<KernelReport> {
    kernelize(inst, KernelRule::Ramsey(r))
}

/// Outcome of one marking pass.
struct Pass {
    keep: Vec<bool>,
    parameter: usize,
    per_agent_budget: u64,
    stated_bound: u64,
    headline_bound: u64,
    trivial_no: bool,
}

pub fn kernelize(inst: &Instance, rule: KernelRule) -> Result<KernelReport> {
    check_applicable(inst, rule)?;
    let mut current = inst.clone();
    let mut job_map: Vec<usize> = (0..inst.m()).collect();
    let mut rounds = 0;
    loop {
        rounds += 1;
        let pass = mark(&current, rule)?;
        let kept: Vec<usize> = (0..current.m()).filter(|&x| pass.keep[x]).collect();
        if pass.trivial_no || kept.is_empty() {
            return Ok(report(trivial_no_instance(inst)?, Vec::new(), rule, &pass, inst.m(), rounds, true));
        }
        if kept.len() == current.m() {
            return Ok(report(current, job_map, rule, &pass, inst.m(), rounds, false));
        }
        current = current.restricted(&kept)?;
        job_map = kept.iter().map(|&x| job_map[x]).collect();
    }
}

fn report(
    reduced: Instance,
    job_map: Vec<usize>,
    rule: KernelRule,
    pass: &Pass,
    original_jobs: usize,
    rounds: usize,
    trivial_no: bool,
) -> KernelReport {
    let surviving_jobs = job_map.len();
    KernelReport {
        reduced,
        job_map,
        rule: rule.name(),
        parameter: pass.parameter,
        per_agent_budget: pass.per_agent_budget,
        stated_bound: pass.stated_bound,
        headline_bound: pass.headline_bound,
        exceeds_headline: surviving_jobs as u64 > pass.headline_bound,
        original_jobs,
        surviving_jobs,
        trivial_no,
        rounds,
    }
}

/// One job nobody values: a no-instance of the same variant, n and η.
fn trivial_no_instance(inst: &Instance) -> Result<Instance> {
    Instance::new(inst.completeness(), None, 1, vec![vec![0]; inst.n()], Vec::new(), inst.eta())
}

fn check_applicable(inst: &Instance, rule: KernelRule) -> Result<()> {
    if inst.size_bound().is_some() {
        return Err(CffaError::Inapplicable(format!(
            "{} kernel is defined for variants without a size bound",
            rule.name()
        )));
    }
    match rule {
        KernelRule::NbrDiversity => {}
        KernelRule::Degree => {
            let d = inst.graph().max_degree();
            if inst.is_complete() && d >= inst.n() {
                return Err(CffaError::Inapplicable(format!(
                    "degree kernel on a complete-allocation instance needs max degree < n (d = {d}, n = {})",
                    inst.n()
                )));
            }
        }
        KernelRule::Chromatic | KernelRule::Ramsey(_) if inst.is_complete() => {
            return Err(CffaError::Inapplicable(format!(
                "{} kernel is defined for partial allocation only",
                rule.name()
            )));
        }
        KernelRule::Chromatic => {}
        KernelRule::Ramsey(r) => {
            if r < 2 {
                return Err(CffaError::Inapplicable(format!("ramsey kernel needs r ≥ 2, got {r}")));
            }
            if let CliqueCheck::Exceeds(clique) = inst.graph().max_clique_at_most(r - 1) {
                return Err(CffaError::Inapplicable(format!(
                    "conflict graph contains a clique on {} vertices: {clique:?}",
                    clique.len()
                )));
            }
        }
    }
    Ok(())
}

fn overflow(rule: KernelRule) -> CffaError {
    CffaError::Overflow(format!("{} kernel bound", rule.name()))
}

fn mark(inst: &Instance, rule: KernelRule) -> Result<Pass> {
    let n = inst.n() as u64;
    let eta_n = inst.eta().checked_mul(n).ok_or_else(|| overflow(rule))?;
    let total = |per_agent: u64| per_agent.checked_mul(n).ok_or_else(|| overflow(rule));
    match rule {
        KernelRule::NbrDiversity => mark_nbr_diversity(inst, eta_n),
        KernelRule::Degree => {
            let d = inst.graph().max_degree();
            let budget = (d as u64 + 1).checked_mul(eta_n).ok_or_else(|| overflow(rule))?;
            let bound = total(budget)?;
            Ok(Pass {
                keep: mark_first_positive(inst, (0..inst.m()).collect(), budget),
                parameter: d,
                per_agent_budget: budget,
                stated_bound: bound,
                headline_bound: bound,
                trivial_no: false,
            })
        }
        KernelRule::Chromatic => {
            let colors = inst.graph().greedy_coloring().0.max(1);
            let budget = (colors as u64).checked_mul(eta_n).ok_or_else(|| overflow(rule))?;
            let bound = total(budget)?;
            Ok(Pass {
                keep: mark_first_positive(inst, (0..inst.m()).collect(), budget),
                parameter: colors,
                per_agent_budget: budget,
                stated_bound: bound,
                headline_bound: bound,
                trivial_no: false,
            })
        }
        KernelRule::Ramsey(r) => {
            let budget = ramsey_upper_bound(r as u64, eta_n)?;
            let bound = total(budget)?;
            Ok(Pass {
                keep: mark_first_positive(inst, (0..inst.m()).collect(), budget),
                parameter: r,
                per_agent_budget: budget,
                stated_bound: bound,
                headline_bound: bound,
                trivial_no: false,
            })
        }
    }
}

/// Every agent marks its first `budget` positive-utility jobs among `scope`
/// (ascending index).
fn mark_first_positive(inst: &Instance, scope: Vec<usize>, budget: u64) -> Vec<bool> {
    let mut keep = vec![false; inst.m()];
    mark_into(inst, &scope, budget, &mut keep);
    keep
}

fn mark_into(inst: &Instance, scope: &[usize], budget: u64, keep: &mut [bool]) {
    let take = usize::try_from(budget).unwrap_or(usize::MAX);
    for i in 0..inst.n() {
        let row = inst.row(i);
        for &x in scope.iter().filter(|&&x| row[x] > 0).take(take) {
            keep[x] = true;
        }
    }
}

/// Independent classes: each agent marks up to ηn positive jobs per class.
/// Clique classes: kept whole under complete allocation (a class larger
/// than n is a no-certificate), otherwise each agent keeps its n² best.
/// Under complete allocation every independent class keeps at least one
/// job, which absorbs the deleted members of its class.
fn mark_nbr_diversity(inst: &Instance, eta_n: u64) -> Result<Pass> {
    let rule = KernelRule::NbrDiversity;
    let n = inst.n();
    let types = inst.graph().neighborhood_types();
    let mut keep = vec![false; inst.m()];
    let mut trivial_no = false;
    let (mut independent, mut cliques) = (0u64, 0u64);
    let n_sq = (n as u64).checked_mul(n as u64).ok_or_else(|| overflow(rule))?;
    for (class, kind) in types.classes.iter().zip(&types.kinds) {
        match kind {
            ClassKind::IndependentSet => {
                independent += 1;
                mark_into(inst, class, eta_n, &mut keep);
                if inst.is_complete() && !class.iter().any(|&x| keep[x]) {
                    keep[class[0]] = true;
                }
            }
            ClassKind::Clique => {
                cliques += 1;
                if inst.is_complete() {
                    trivial_no |= class.len() > n;
                    class.iter().for_each(|&x| keep[x] = true);
                } else {
                    let take = usize::try_from(n_sq).unwrap_or(usize::MAX);
                    for i in 0..n {
                        let row = inst.row(i);
                        let mut best: Vec<usize> = class.iter().copied().filter(|&x| row[x] > 0).collect();
                        best.sort_by(|&a, &b| row[b].cmp(&row[a]).then(a.cmp(&b)));
                        best.into_iter().take(take).for_each(|x| keep[x] = true);
                    }
                }
            }
        }
    }
    let per_independent = eta_n.checked_mul(n as u64).ok_or_else(|| overflow(rule))?;
    let per_clique = if inst.is_complete() {
        n as u64
    } else {
        n_sq.checked_mul(n as u64).ok_or_else(|| overflow(rule))?
    };
    let stated = independent
        .checked_mul(per_independent)
        .zip(cliques.checked_mul(per_clique))
        .and_then(|(a, b)| a.checked_add(b))
        .ok_or_else(|| overflow(rule))?;
    let headline = (types.len() as u64)
        .checked_mul(per_independent)
        .ok_or_else(|| overflow(rule))?;
    Ok(Pass {
        keep,
        parameter: types.len(),
        per_agent_budget: eta_n,
        stated_bound: stated,
        headline_bound: headline,
        trivial_no,
    })
}
