use std::time::Instant;

use crate::choice::eval::capture_slots;
use crate::choice::UtilityTable;
use crate::error::{Error, Result};
use crate::solver::{check_cardinality, Budget, Solution, SolverReport};

/// Largest number of subsets [`exact_enumerate`] accepts by default.
pub const DEFAULT_EXACT_CAP: u64 = 1_000_000;

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Evaluates every `r`-subset of the candidates and keeps the best; among
/// equal objectives the lexicographically smallest set wins.
///
/// If the budget runs out first, the incumbent is returned with
/// `completed = false`.
pub fn exact_enumerate(
    table: &UtilityTable,
    r: usize,
    cap: u64,
    budget: &Budget,
) -> Result<(Solution, SolverReport)> {
    check_cardinality(table, r)?;
    let n = table.n_candidates();
    let count = binomial(n, r);
    if count > cap as u128 {
        return Err(Error::CapExceeded { count, cap });
    }

    let clock = Instant::now();
    let mut subset: Vec<usize> = (0..r).collect();
    let mut best = subset.clone();
    let mut best_value = capture_slots(table, &subset);
    let mut report = SolverReport::started(best_value);
    report.evaluations = 1;

    'outer: loop {
        // Advance to the next combination in lexicographic order.
        let mut k = r;
        loop {
            if k == 0 {
                break 'outer;
            }
            k -= 1;
            if subset[k] < n - r + k {
                break;
            }
        }
        subset[k] += 1;
        for t in k + 1..r {
            subset[t] = subset[t - 1] + 1;
        }

        let value = capture_slots(table, &subset);
        report.evaluations += 1;
        if value > best_value {
            best_value = value;
            best.copy_from_slice(&subset);
            report.trajectory.push(value);
        }
        if report.evaluations.is_multiple_of(1024) && budget.expired() {
            report.completed = false;
            break;
        }
    }

    report.objective = best_value;
    report.iterations = report.evaluations;
    report.seconds = clock.elapsed().as_secs_f64();
    Ok((Solution::from_slots(table, &best), report))
}
