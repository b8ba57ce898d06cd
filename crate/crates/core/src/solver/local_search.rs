use std::time::Instant;

use crate::choice::eval::capture_slots;
use crate::choice::{EvalCache, UtilityTable};
use crate::error::Result;
use crate::solver::{start_slots, Budget, Solution, SolverReport, IMPROVEMENT_EPS};

/// Best move found by a neighbourhood scan: (removes, adds, objective).
type Move = (Vec<usize>, Vec<usize>, f64);

fn best_swap11(cache: &EvalCache, report: &mut SolverReport) -> Option<Move> {
    let n = cache.table().n_candidates();
    let mut best: Option<Move> = None;
    let mut best_value = cache.objective() + IMPROVEMENT_EPS;
    for &out in cache.selected_slots() {
        for inn in (0..n).filter(|&s| !cache.is_selected(s)) {
            let value = cache.move_objective(&[out], &[inn]);
            report.evaluations += 1;
            if value > best_value {
                best_value = value;
                best = Some((vec![out], vec![inn], value));
            }
        }
    }
    best
}

fn best_swap22(cache: &EvalCache, report: &mut SolverReport, budget: &Budget) -> (Option<Move>, bool) {
    let sel = cache.selected_slots();
    let unsel: Vec<usize> = (0..cache.table().n_candidates())
        .filter(|&s| !cache.is_selected(s))
        .collect();
    let mut best: Option<Move> = None;
    let mut best_value = cache.objective() + IMPROVEMENT_EPS;
    for (i, &o1) in sel.iter().enumerate() {
        for &o2 in &sel[i + 1..] {
            if budget.expired() {
                return (best, false);
            }
            for (k, &n1) in unsel.iter().enumerate() {
                for &n2 in &unsel[k + 1..] {
                    let value = cache.move_objective(&[o1, o2], &[n1, n2]);
                    report.evaluations += 1;
                    if value > best_value {
                        best_value = value;
                        best = Some((vec![o1, o2], vec![n1, n2], value));
                    }
                }
            }
        }
    }
    (best, true)
}

/// Best-improvement local search over swap(1,1) and swap(2,2).
///
/// Each round scans every swap(1,1) move and applies the best one that gains
/// more than [`IMPROVEMENT_EPS`]; only when none does is the swap(2,2)
/// neighbourhood scanned. The search stops at a local optimum of both
/// neighbourhoods or when the budget runs out.
pub fn local_search(
    table: &UtilityTable,
    start: &Solution,
    budget: &Budget,
) -> Result<(Solution, SolverReport)> {
    let clock = Instant::now();
    let mut cache = EvalCache::from_slots(table, start_slots(table, start)?);
    let mut report = SolverReport::started(cache.objective());

    loop {
        if budget.expired() {
            report.completed = false;
            break;
        }
        report.iterations += 1;
        let step = match best_swap11(&cache, &mut report) {
            Some(m) => Some(m),
            None => {
                let (m, finished) = best_swap22(&cache, &mut report, budget);
                if !finished {
                    report.completed = false;
                }
                m
            }
        };
        match step {
            Some((removes, adds, _)) => {
                cache.commit_move(&removes, &adds);
                report.trajectory.push(cache.objective());
            }
            None => break,
        }
        if !report.completed {
            break;
        }
    }

    report.objective = cache.objective();
    report.seconds = clock.elapsed().as_secs_f64();
    Ok((Solution::from_slots(table, cache.selected_slots()), report))
}

/// Exhaustive from-scratch check that no swap(1,1) or swap(2,2) move improves
/// `solution` by more than [`IMPROVEMENT_EPS`].
pub fn is_swap_local_optimum(table: &UtilityTable, solution: &Solution) -> Result<bool> {
    let sel = start_slots(table, solution)?;
    let unsel: Vec<usize> = (0..table.n_candidates()).filter(|s| !sel.contains(s)).collect();
    let base = capture_slots(table, &sel);
    let improves = |removes: &[usize], adds: &[usize]| {
        let mut next: Vec<usize> = sel.iter().copied().filter(|s| !removes.contains(s)).collect();
        next.extend_from_slice(adds);
        next.sort_unstable();
        capture_slots(table, &next) > base + IMPROVEMENT_EPS
    };
    for &o in &sel {
        for &i in &unsel {
            if improves(&[o], &[i]) {
                return Ok(false);
            }
        }
    }
    for (a, &o1) in sel.iter().enumerate() {
        for &o2 in &sel[a + 1..] {
            for (b, &i1) in unsel.iter().enumerate() {
                for &i2 in &unsel[b + 1..] {
                    if improves(&[o1, o2], &[i1, i2]) {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}
