use std::time::Instant;

use crate::choice::{EvalCache, UtilityTable};
use crate::error::{Error, Result};
use crate::solver::{check_cardinality, Budget, Solution, SolverReport};

/// Opens `r` facilities one at a time, each round adding the candidate with
/// the largest marginal gain.
pub fn greedy(table: &UtilityTable, r: usize, budget: &Budget) -> Result<(Solution, SolverReport)> {
    check_cardinality(table, r)?;
    let clock = Instant::now();
    let mut cache = EvalCache::from_slots(table, Vec::new());
    let mut report = SolverReport::started(0.0);

    for _ in 0..r {
        if budget.expired() {
            return Err(Error::BudgetExhausted);
        }
        let mut best: Option<(usize, f64)> = None;
        for slot in 0..table.n_candidates() {
            if cache.is_selected(slot) {
                continue;
            }
            let value = cache.move_objective(&[], &[slot]);
            report.evaluations += 1;
            if best.is_none_or(|(_, b)| value > b) {
                best = Some((slot, value));
            }
        }
        let (slot, _) = best.expect("r <= candidate count");
        cache.commit_move(&[], &[slot]);
        report.iterations += 1;
        report.trajectory.push(cache.objective());
    }

    report.objective = cache.objective();
    report.seconds = clock.elapsed().as_secs_f64();
    Ok((Solution::from_slots(table, cache.selected_slots()), report))
}
