//! Solvers for the maximum-capture problem.
//!
//! All solvers work on a [`UtilityTable`] and return feasible solutions of the
//! requested cardinality. Randomness is confined to start generation and is
//! fully determined by the caller's seed. Ties are broken towards the smallest
//! location id everywhere.

mod exact;
mod greedy;
mod local_search;
mod trust_region;

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::choice::UtilityTable;
use crate::error::{Error, Result};
use crate::instance::LocationId;

pub use exact::{exact_enumerate, DEFAULT_EXACT_CAP};
pub use greedy::greedy;
pub use local_search::{is_swap_local_optimum, local_search};
pub use trust_region::{bitr, bitr_multistart, tr_subproblem, TrustRegionConfig};

/// Minimum absolute objective gain for a move to count as an improvement.
pub const IMPROVEMENT_EPS: f64 = 1e-9;

/// A set of opened candidate locations, kept in ascending id order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Solution {
    selected: Vec<LocationId>,
}

impl Solution {
    pub fn new(mut selected: Vec<LocationId>) -> Self {
        selected.sort_unstable();
        Solution { selected }
    }

    pub fn r(&self) -> usize {
        self.selected.len()
    }

    pub fn as_slice(&self) -> &[LocationId] {
        &self.selected
    }

    pub fn contains(&self, id: LocationId) -> bool {
        self.selected.binary_search(&id).is_ok()
    }

    pub(crate) fn from_slots(table: &UtilityTable, slots: &[usize]) -> Self {
        Solution::new(slots.iter().map(|&s| table.location(s)).collect())
    }
}

impl std::ops::Deref for Solution {
    type Target = [LocationId];

    fn deref(&self) -> &[LocationId] {
        &self.selected
    }
}

/// Cooperative wall-clock budget checked between iterations and scans.
#[derive(Debug, Clone, Copy, Default)]
pub struct Budget {
    deadline: Option<Instant>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget { deadline: None }
    }

    pub fn from_now(limit: Duration) -> Self {
        Budget {
            deadline: Instant::now().checked_add(limit),
        }
    }

    pub fn seconds(secs: f64) -> Self {
        Duration::try_from_secs_f64(secs)
            .map(Budget::from_now)
            .unwrap_or_default()
    }

    pub fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolverReport {
    pub objective: f64,
    pub iterations: u64,
    /// Objective evaluations (full, incremental and gradient).
    pub evaluations: u64,
    pub seconds: f64,
    /// Objective after every accepted step, starting with the initial value.
    pub trajectory: Vec<f64>,
    /// Objective at the end of each stage of a composite method.
    pub stages: Vec<(&'static str, f64)>,
    /// False when the budget cut the run short.
    pub completed: bool,
}

impl SolverReport {
    pub(crate) fn started(objective: f64) -> Self {
        SolverReport {
            objective,
            trajectory: vec![objective],
            completed: true,
            ..SolverReport::default()
        }
    }
}

pub(crate) fn check_cardinality(table: &UtilityTable, r: usize) -> Result<()> {
    let n = table.n_candidates();
    if r == 0 || r > n {
        return Err(Error::InvalidArgument(format!(
            "cardinality r = {r} must lie in 1..={n}"
        )));
    }
    Ok(())
}

pub(crate) fn start_slots(table: &UtilityTable, start: &Solution) -> Result<Vec<usize>> {
    let slots = table.slots(start.as_slice())?;
    check_cardinality(table, slots.len())?;
    Ok(slots)
}

/// SplitMix64 finalizer; spreads one master seed over independent streams.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniformly random `r`-subset of the candidates.
pub fn random_solution(table: &UtilityTable, r: usize, seed: u64) -> Result<Solution> {
    check_cardinality(table, r)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut slots = rand::seq::index::sample(&mut rng, table.n_candidates(), r).into_vec();
    slots.sort_unstable();
    Ok(Solution::from_slots(table, &slots))
}

/// Random start used by the `k`-th run of a seeded multistart.
pub(crate) fn start_for(table: &UtilityTable, r: usize, seed: u64, k: u64) -> Result<Solution> {
    random_solution(table, r, derive_seed(seed, k))
}

/// One random start improved by [`bitr`] and then by [`local_search`].
pub fn bitr_ls(
    table: &UtilityTable,
    r: usize,
    seed: u64,
    config: &TrustRegionConfig,
    budget: &Budget,
) -> Result<(Solution, SolverReport)> {
    let clock = Instant::now();
    let start = start_for(table, r, seed, 0)?;
    let (mid, tr) = bitr(table, &start, config, budget)?;
    let (best, ls) = local_search(table, &mid, budget)?;

    let mut trajectory = tr.trajectory.clone();
    trajectory.extend(ls.trajectory.iter().skip(1));
    let report = SolverReport {
        objective: ls.objective,
        iterations: tr.iterations + ls.iterations,
        evaluations: tr.evaluations + ls.evaluations,
        seconds: clock.elapsed().as_secs_f64(),
        stages: vec![
            ("start", tr.trajectory[0]),
            ("bitr", tr.objective),
            ("local_search", ls.objective),
        ],
        trajectory,
        completed: tr.completed && ls.completed,
    };
    Ok((best, report))
}
