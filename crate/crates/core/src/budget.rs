use std::time::{Duration, Instant};

use crate::error::{CffaError, Result};

pub const DEFAULT_MAX_JOBS: usize = 16;
pub const DEFAULT_MAX_NODES: u64 = 100_000_000;

pub const ENV_BUDGET_NODES: &str = "CFFA_BUDGET_NODES";
pub const ENV_BUDGET_SECONDS: &str = "CFFA_BUDGET_SECONDS";

/// Resource limits shared by the exponential solvers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Largest job count the brute-force oracle accepts.
    pub max_jobs: usize,
    /// Search nodes (or table cells, or enumerated sets) before giving up.
    pub max_nodes: u64,
    /// Optional wall-clock limit.
    pub time_limit: Option<Duration>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_jobs: DEFAULT_MAX_JOBS,
            max_nodes: DEFAULT_MAX_NODES,
            time_limit: None,
        }
    }
}

impl Budget {
    pub fn with_nodes(mut self, nodes: u64) -> Self {
        self.max_nodes = nodes;
        self
    }

    pub fn with_max_jobs(mut self, jobs: usize) -> Self {
        self.max_jobs = jobs;
        self
    }

    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }

    /// Default budget overridden by `CFFA_BUDGET_NODES` / `CFFA_BUDGET_SECONDS`.
    pub fn from_env() -> Result<Self> {
        let mut budget = Budget::default();
        if let Ok(raw) = std::env::var(ENV_BUDGET_NODES) {
            budget.max_nodes = raw.trim().parse().map_err(|_| {
                CffaError::parse(ENV_BUDGET_NODES, format!("not a node count: {raw:?}"))
            })?;
        }
        if let Ok(raw) = std::env::var(ENV_BUDGET_SECONDS) {
            let secs: f64 = raw.trim().parse().map_err(|_| {
                CffaError::parse(ENV_BUDGET_SECONDS, format!("not a duration: {raw:?}"))
            })?;
            if !(secs.is_finite() && secs > 0.0) {
                return Err(CffaError::parse(ENV_BUDGET_SECONDS, "must be positive"));
            }
            budget.time_limit = Some(Duration::from_secs_f64(secs));
        }
        Ok(budget)
    }

    pub(crate) fn meter(&self, what: &'static str) -> Meter {
        Meter {
            what,
            used: 0,
            max: self.max_nodes,
            deadline: self.time_limit.map(|d| Instant::now() + d),
        }
    }
}

/// Counts work against a [`Budget`].
#[derive(Debug)]
pub(crate) struct Meter {
    what: &'static str,
    used: u64,
    max: u64,
    deadline: Option<Instant>,
}

impl Meter {
    #[inline]
    pub fn tick(&mut self) -> Result<()> {
        self.charge(1)
    }

    #[inline]
    pub fn charge(&mut self, amount: u64) -> Result<()> {
        let before = self.used;
        self.used = self.used.saturating_add(amount);
        if self.used > self.max {
            return Err(CffaError::BudgetExceeded(format!(
                "{}: more than {} nodes",
                self.what, self.max
            )));
        }
        // Clock reads are comparatively expensive; sample every 4096 units.
        if before >> 12 != self.used >> 12 {
            if let Some(deadline) = self.deadline {
                if Instant::now() > deadline {
                    return Err(CffaError::BudgetExceeded(format!(
                        "{}: time limit reached",
                        self.what
                    )));
                }
            }
        }
        Ok(())
    }
}
