use rayon::prelude::*;

use crate::bench::config::{BenchConfig, Method};
use crate::choice::{build_utilities, UtilityTable};
use crate::error::{Error, Result};
use crate::solver::{
    bitr, bitr_ls, bitr_multistart, derive_seed, exact_enumerate, greedy, random_solution, Budget,
    SolverReport, TrustRegionConfig,
};

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub instance: String,
    pub r: usize,
    pub alpha: f64,
    pub beta: f64,
    pub method: Method,
    pub objective: f64,
    pub seconds: f64,
    pub iterations: u64,
    pub evaluations: u64,
    pub seed: u64,
    /// False when the run hit its time budget and reports its incumbent.
    pub completed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure {
    pub instance: String,
    /// `None` when the instance itself failed to load.
    pub cell: Option<(usize, f64, f64, Method)>,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct GridOutput {
    pub records: Vec<RunRecord>,
    pub failures: Vec<RunFailure>,
}

fn run_method(
    table: &UtilityTable,
    method: Method,
    r: usize,
    seed: u64,
    config: &BenchConfig,
) -> Result<SolverReport> {
    let budget = Budget::seconds(config.budget_seconds);
    let tr = TrustRegionConfig::default();
    let report = match method {
        Method::Exact => exact_enumerate(table, r, config.exact_cap.unwrap_or(u64::MAX), &budget)?.1,
        Method::Greedy => greedy(table, r, &budget)?.1,
        Method::Bitr => {
            let start = random_solution(table, r, derive_seed(seed, 0))?;
            bitr(table, &start, &tr, &budget)?.1
        }
        Method::BitrMultistart => bitr_multistart(table, r, config.starts, seed, &tr, &budget)?.1,
        Method::BitrLs => bitr_ls(table, r, seed, &tr, &budget)?.1,
    };
    Ok(report)
}

/// Grid position of a record: instance, r, alpha and beta indices, then method.
type RecordKey = (usize, usize, usize, usize, Method);

/// Runs the whole grid on a pool of `parallel` threads.
///
/// Each (instance, α, β) cell shares one utility table; every (r, method) run
/// inside it is an independent job. Seeds derive from the master seed and the
/// cell's grid position only, so the output does not depend on `parallel`.
/// Records come back ordered by instance, r, α, β and method.
pub fn run_grid(config: &BenchConfig, parallel: usize) -> Result<GridOutput> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallel.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;

    let mut methods = config.methods.clone();
    methods.sort();
    methods.dedup();

    let mut out = GridOutput::default();
    let mut keyed: Vec<(RecordKey, RunRecord)> = Vec::new();

    for (ii, source) in config.instances.iter().enumerate() {
        let name = source.name();
        let instance = match source.load() {
            Ok(inst) => inst,
            Err(e) => {
                out.failures.push(RunFailure {
                    instance: name,
                    cell: None,
                    message: e.to_string(),
                });
                continue;
            }
        };

        for (ai, &alpha) in config.alpha.iter().enumerate() {
            for (bi, &beta) in config.beta.iter().enumerate() {
                let cell_seed = derive_seed(config.seed, ((ii as u64) << 32) | ((ai as u64) << 16) | bi as u64);
                let table = match config
                    .model_spec(&instance, alpha, beta, cell_seed)
                    .and_then(|spec| build_utilities(&instance, &spec))
                {
                    Ok(t) => t,
                    Err(e) => {
                        for &r in &config.r {
                            for &m in &methods {
                                out.failures.push(RunFailure {
                                    instance: name.clone(),
                                    cell: Some((r, alpha, beta, m)),
                                    message: e.to_string(),
                                });
                            }
                        }
                        continue;
                    }
                };

                let jobs: Vec<(usize, usize, Method)> = config
                    .r
                    .iter()
                    .enumerate()
                    .flat_map(|(ri, &r)| methods.iter().map(move |&m| (ri, r, m)))
                    .collect();
                let results: Vec<_> = pool.install(|| {
                    jobs.par_iter()
                        .map(|&(ri, r, method)| {
                            let seed = derive_seed(cell_seed, ri as u64);
                            (ri, r, method, seed, run_method(&table, method, r, seed, config))
                        })
                        .collect()
                });

                for (ri, r, method, seed, result) in results {
                    match result {
                        Ok(rep) => keyed.push((
                            (ii, ri, ai, bi, method),
                            RunRecord {
                                instance: name.clone(),
                                r,
                                alpha,
                                beta,
                                method,
                                objective: rep.objective,
                                seconds: rep.seconds,
                                iterations: rep.iterations,
                                evaluations: rep.evaluations,
                                seed,
                                completed: rep.completed,
                            },
                        )),
                        Err(e) => out.failures.push(RunFailure {
                            instance: name.clone(),
                            cell: Some((r, alpha, beta, method)),
                            message: e.to_string(),
                        }),
                    }
                }
            }
        }
    }

    keyed.sort_by_key(|(k, _)| *k);
    out.records = keyed.into_iter().map(|(_, rec)| rec).collect();
    Ok(out)
}
