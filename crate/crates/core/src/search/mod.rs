//! Exact and randomized search engines, plus the factor-pair metrics used
//! as search targets.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

pub mod directed;
pub mod enumerate;
pub mod factorization;
pub mod metrics;

pub use directed::search_directed_hamilton_decomposition;
pub use enumerate::{
    enumerate_factorizations, enumerate_perfect_matchings, for_each_factorization, EnumerateError,
};
pub use factorization::{
    search_factorization, Checkpoint, Frontier, SearchError, SearchOptions, Target,
};
pub use metrics::{
    max_pair_cycle_count, min_longest_cycle, union_connectivity_threshold, ConnectivityThreshold,
    DisjointSets,
};

/// Limits on a search run. Node limits are exact and reproducible; time
/// limits depend on the machine.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_nodes: Option<u64>,
    pub max_time: Option<Duration>,
    pub deterministic: bool,
}

impl SearchBudget {
    pub fn unlimited() -> Self {
        SearchBudget::default()
    }

    pub fn nodes(max_nodes: u64) -> Self {
        SearchBudget {
            max_nodes: Some(max_nodes),
            ..SearchBudget::default()
        }
    }

    pub fn time(max_time: Duration) -> Self {
        SearchBudget {
            max_time: Some(max_time),
            ..SearchBudget::default()
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.max_nodes.is_some() || self.max_time.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchStatus {
    Found,
    ExhaustedNoWitness,
    BudgetExceeded,
}

/// Result of a search; `witness` is present iff `status` is `Found`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome<W> {
    pub status: SearchStatus,
    pub witness: Option<W>,
    pub nodes_explored: u64,
}

impl<W> SearchOutcome<W> {
    pub fn found(witness: W, nodes_explored: u64) -> Self {
        SearchOutcome {
            status: SearchStatus::Found,
            witness: Some(witness),
            nodes_explored,
        }
    }

    pub fn exhausted(nodes_explored: u64) -> Self {
        SearchOutcome {
            status: SearchStatus::ExhaustedNoWitness,
            witness: None,
            nodes_explored,
        }
    }

    pub fn over_budget(nodes_explored: u64) -> Self {
        SearchOutcome {
            status: SearchStatus::BudgetExceeded,
            witness: None,
            nodes_explored,
        }
    }
}

/// Node and clock accounting against a [`SearchBudget`].
#[derive(Debug, Clone)]
pub(crate) struct Meter {
    budget: SearchBudget,
    started: Instant,
    pub nodes: u64,
}

impl Meter {
    pub fn new(budget: SearchBudget) -> Self {
        Meter::resume(budget, 0)
    }

    pub fn resume(budget: SearchBudget, nodes: u64) -> Self {
        Meter {
            budget,
            started: Instant::now(),
            nodes,
        }
    }

    /// Counts one node; false (without counting) once the budget is spent.
    #[inline]
    pub fn tick(&mut self) -> bool {
        if let Some(max) = self.budget.max_nodes {
            if self.nodes >= max {
                return false;
            }
        }
        if let Some(max) = self.budget.max_time {
            if self.nodes.is_multiple_of(1024) && self.started.elapsed() > max {
                return false;
            }
        }
        self.nodes += 1;
        true
    }
}
