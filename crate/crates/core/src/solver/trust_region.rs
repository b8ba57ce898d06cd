//! Binary trust region search.
//!
//! At the incumbent binary point the relaxed objective is replaced by its
//! first-order Taylor model `f(x) + g·(y - x)`. The model is maximized over
//! the cardinality-`r` binary points within Hamming distance `2Δ` of `x`,
//! which amounts to at most `Δ` swaps. The true objective then decides
//! acceptance, and the ratio of actual to predicted gain drives the radius.

use std::cmp::Ordering;
use std::time::Instant;

use crate::choice::eval::{gradient_unchecked, indicator};
use crate::choice::{EvalCache, UtilityTable};
use crate::error::Result;
use crate::solver::{
    start_for, start_slots, Budget, Solution, SolverReport, IMPROVEMENT_EPS,
};

#[derive(Debug, Clone, PartialEq)]
pub struct TrustRegionConfig {
    /// Initial radius in swaps; `None` means `max(1, r / 2)`.
    pub initial_radius: Option<usize>,
    pub expand_threshold: f64,
    pub shrink_threshold: f64,
    pub expand_factor: f64,
    pub shrink_factor: f64,
    pub max_iterations: u64,
}

impl Default for TrustRegionConfig {
    fn default() -> Self {
        TrustRegionConfig {
            initial_radius: None,
            expand_threshold: 0.75,
            shrink_threshold: 0.25,
            expand_factor: 2.0,
            shrink_factor: 0.5,
            max_iterations: 500,
        }
    }
}

/// Maximizes `g·y` over binary `y` with `|y| = |current|` and at most `radius`
/// swaps away from `current`.
///
/// Positions index the candidate list. The `radius` lowest-gradient selected
/// positions are paired with the `radius` highest-gradient unselected ones and
/// every pair with `g_in > g_out` is swapped. On equal gradients the smaller
/// position stays (or enters).
pub fn tr_subproblem(current: &[usize], gradient: &[f64], radius: usize) -> Vec<usize> {
    let mut member = vec![false; gradient.len()];
    for &s in current {
        member[s] = true;
    }
    let (removes, adds, _) = best_swaps(&member, gradient, radius);
    let mut out: Vec<usize> = current.iter().copied().filter(|s| !removes.contains(s)).collect();
    out.extend(adds);
    out.sort_unstable();
    out
}

/// Returns (leaving positions, entering positions, predicted model gain).
fn best_swaps(member: &[bool], gradient: &[f64], radius: usize) -> (Vec<usize>, Vec<usize>, f64) {
    let by_grad = |a: &usize, b: &usize| gradient[*a].partial_cmp(&gradient[*b]).unwrap_or(Ordering::Equal);
    let mut leaving: Vec<usize> = (0..gradient.len()).filter(|&s| member[s]).collect();
    leaving.sort_by(|a, b| by_grad(a, b).then(b.cmp(a)));
    let mut entering: Vec<usize> = (0..gradient.len()).filter(|&s| !member[s]).collect();
    entering.sort_by(|a, b| by_grad(b, a).then(a.cmp(b)));

    let mut removes = Vec::new();
    let mut adds = Vec::new();
    let mut gain = 0.0;
    for (&out, &inn) in leaving.iter().zip(&entering).take(radius) {
        let delta = gradient[inn] - gradient[out];
        if delta <= 0.0 {
            break;
        }
        removes.push(out);
        adds.push(inn);
        gain += delta;
    }
    (removes, adds, gain)
}

/// Runs the binary trust region method from `start`.
///
/// A step is accepted iff it improves the true objective by more than
/// [`IMPROVEMENT_EPS`]. The radius grows after an accepted step whose
/// actual/predicted ratio reaches the expand threshold and shrinks after a
/// rejected step or a ratio below the shrink threshold. The run ends when the
/// radius drops below one, the model predicts no gain, or the iteration or
/// time budget is spent.
pub fn bitr(
    table: &UtilityTable,
    start: &Solution,
    config: &TrustRegionConfig,
    budget: &Budget,
) -> Result<(Solution, SolverReport)> {
    let clock = Instant::now();
    let slots = start_slots(table, start)?;
    let r = slots.len();
    let n = table.n_candidates();
    let max_radius = r.min(n - r);
    let mut radius = config.initial_radius.unwrap_or((r / 2).max(1)).min(max_radius);

    let mut cache = EvalCache::from_slots(table, slots);
    let mut report = SolverReport::started(cache.objective());
    report.evaluations = 1;

    while radius >= 1 && report.iterations < config.max_iterations {
        if budget.expired() {
            report.completed = false;
            break;
        }
        report.iterations += 1;
        let x = indicator(n, cache.selected_slots());
        let member: Vec<bool> = x.iter().map(|&v| v == 1.0).collect();
        let gradient = gradient_unchecked(table, &x);
        report.evaluations += 1;

        let (removes, adds, predicted) = best_swaps(&member, &gradient, radius);
        if removes.is_empty() || predicted <= 0.0 {
            break;
        }
        let candidate = cache.move_objective(&removes, &adds);
        report.evaluations += 1;
        let actual = candidate - cache.objective();
        let ratio = actual / predicted;

        if actual > IMPROVEMENT_EPS {
            cache.commit_move(&removes, &adds);
            report.trajectory.push(cache.objective());
            if ratio >= config.expand_threshold {
                radius = ((radius as f64 * config.expand_factor) as usize).clamp(1, max_radius);
            } else if ratio < config.shrink_threshold {
                radius = (radius as f64 * config.shrink_factor) as usize;
            }
        } else {
            radius = (radius as f64 * config.shrink_factor) as usize;
        }
    }

    report.objective = cache.objective();
    report.seconds = clock.elapsed().as_secs_f64();
    Ok((Solution::from_slots(table, cache.selected_slots()), report))
}

/// Runs [`bitr`] from `n_starts` seeded random starts and keeps the best
/// result (earliest start on ties).
pub fn bitr_multistart(
    table: &UtilityTable,
    r: usize,
    n_starts: usize,
    seed: u64,
    config: &TrustRegionConfig,
    budget: &Budget,
) -> Result<(Solution, SolverReport)> {
    let clock = Instant::now();
    let mut best: Option<(Solution, SolverReport)> = None;
    let mut iterations = 0;
    let mut evaluations = 0;
    let mut completed = true;
    let mut stages = Vec::new();

    for k in 0..n_starts.max(1) {
        if k > 0 && budget.expired() {
            completed = false;
            break;
        }
        let start = start_for(table, r, seed, k as u64)?;
        let (sol, rep) = bitr(table, &start, config, budget)?;
        iterations += rep.iterations;
        evaluations += rep.evaluations;
        completed &= rep.completed;
        stages.push(("start", rep.trajectory[0]));
        stages.push(("bitr", rep.objective));
        if best.as_ref().is_none_or(|(_, b)| rep.objective > b.objective) {
            best = Some((sol, rep));
        }
    }

    let (sol, mut report) = best.expect("at least one start");
    report.iterations = iterations;
    report.evaluations = evaluations;
    report.completed = completed;
    report.stages = stages;
    report.seconds = clock.elapsed().as_secs_f64();
    Ok((sol, report))
}
