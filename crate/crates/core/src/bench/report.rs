use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Read;
use std::str::FromStr;

use crate::bench::config::Method;
use crate::bench::run::RunRecord;
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 8] = [
    "instance", "r", "alpha", "beta", "method", "objective", "seconds", "completed",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(Error::InvalidArgument(format!("unknown report format `{other}`"))),
        }
    }
}

/// Best counts and mean times of every method on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyRow {
    pub instance: String,
    pub configurations: usize,
    /// Parallel to [`ComparisonReport::methods`].
    pub best: Vec<usize>,
    pub mean_seconds: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub tolerance: f64,
    pub methods: Vec<Method>,
    pub rows: Vec<FamilyRow>,
}

type CellKey = (usize, u64, u64);
/// (objective, seconds) of every method in one configuration.
type CellRuns = BTreeMap<Method, (f64, f64)>;

/// Counts, per instance and method, the configurations on which the method is
/// within `tolerance` (relative) of the best objective any method reached.
///
/// A value `v` ties the configuration's best `b` iff `v == b` or
/// `(b - v) / b < tolerance`. Rows and columns come out sorted, so the report
/// does not depend on record order.
pub fn best_counts(records: &[RunRecord], tolerance: f64) -> Result<ComparisonReport> {
    if records.is_empty() {
        return Err(Error::InvalidArgument("no run records to compare".into()));
    }
    if !(tolerance > 0.0 && tolerance < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must lie in (0, 1), got {tolerance}"
        )));
    }

    let mut methods: Vec<Method> = records.iter().map(|r| r.method).collect();
    methods.sort();
    methods.dedup();
    let col = |m: Method| methods.binary_search(&m).expect("collected above");

    // instance -> cell -> method -> (objective, seconds)
    let mut cells: BTreeMap<&str, BTreeMap<CellKey, CellRuns>> = BTreeMap::new();
    for rec in records {
        let key = (rec.r, rec.alpha.to_bits(), rec.beta.to_bits());
        let slot = cells
            .entry(rec.instance.as_str())
            .or_default()
            .entry(key)
            .or_default();
        if slot.insert(rec.method, (rec.objective, rec.seconds)).is_some() {
            return Err(Error::InvalidArgument(format!(
                "duplicate record for {} r={} alpha={} beta={} method={}",
                rec.instance, rec.r, rec.alpha, rec.beta, rec.method
            )));
        }
    }

    let mut rows = Vec::with_capacity(cells.len());
    for (instance, grid) in cells {
        let mut best = vec![0; methods.len()];
        let mut time_sum = vec![0.0; methods.len()];
        let mut time_n = vec![0usize; methods.len()];
        for runs in grid.values() {
            let top = runs.values().map(|v| v.0).fold(f64::NEG_INFINITY, f64::max);
            for (&m, &(value, seconds)) in runs {
                let c = col(m);
                if is_tied(top, value, tolerance) {
                    best[c] += 1;
                }
                time_sum[c] += seconds;
                time_n[c] += 1;
            }
        }
        rows.push(FamilyRow {
            instance: instance.to_string(),
            configurations: grid.len(),
            best,
            mean_seconds: time_sum
                .iter()
                .zip(&time_n)
                .map(|(s, &n)| (n > 0).then(|| s / n as f64))
                .collect(),
        });
    }

    Ok(ComparisonReport {
        tolerance,
        methods,
        rows,
    })
}

fn is_tied(best: f64, value: f64, tolerance: f64) -> bool {
    value == best || (best > 0.0 && (best - value) / best < tolerance)
}

/// One CSV row per record: instance, r, alpha, beta, method, objective,
/// seconds, completed.
pub fn records_csv(records: &[RunRecord]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::InvalidArgument(format!("csv: {e}"));
    writer.write_record(CSV_HEADER).map_err(csv_err)?;
    for rec in records {
        writer
            .write_record([
                rec.instance.clone(),
                rec.r.to_string(),
                rec.alpha.to_string(),
                rec.beta.to_string(),
                rec.method.to_string(),
                rec.objective.to_string(),
                format!("{:.6}", rec.seconds),
                rec.completed.to_string(),
            ])
            .map_err(csv_err)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Reads records written by [`records_csv`]. Iteration counts and seeds are
/// not part of the CSV and come back as zero.
pub fn read_records_csv(input: impl Read) -> Result<Vec<RunRecord>> {
    let mut reader = csv::Reader::from_reader(input);
    let header = reader
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Schema {
            path: "records.header".into(),
            message: format!("expected columns {}", CSV_HEADER.join(",")),
        });
    }
    let mut out = Vec::new();
    for (k, row) in reader.records().enumerate() {
        let line = k + 2;
        let row = row.map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        let field = |i: usize| row.get(i).unwrap_or_default();
        fn num<T: FromStr>(v: &str, line: usize, name: &str) -> Result<T> {
            v.parse().map_err(|_| Error::Parse {
                line,
                message: format!("{name}: cannot parse `{v}`"),
            })
        }
        out.push(RunRecord {
            instance: field(0).to_string(),
            r: num(field(1), line, "r")?,
            alpha: num(field(2), line, "alpha")?,
            beta: num(field(3), line, "beta")?,
            method: field(4).parse().map_err(|_| Error::Parse {
                line,
                message: format!("method: unknown `{}`", field(4)),
            })?,
            objective: num(field(5), line, "objective")?,
            seconds: num(field(6), line, "seconds")?,
            completed: num(field(7), line, "completed")?,
            iterations: 0,
            evaluations: 0,
            seed: 0,
        });
    }
    Ok(out)
}

/// GitHub-flavoured table: one row per instance, best counts then average
/// times per method. The highest best count of each row is bold.
pub fn report_markdown(report: &ComparisonReport) -> String {
    let mut out = String::new();
    let _ = write!(out, "| Instance | Configs |");
    for m in &report.methods {
        let _ = write!(out, " Best {m} |");
    }
    for m in &report.methods {
        let _ = write!(out, " Time {m} (s) |");
    }
    out.push('\n');
    out.push_str("|---|---:|");
    for _ in 0..2 * report.methods.len() {
        out.push_str("---:|");
    }
    out.push('\n');

    for row in &report.rows {
        let top = row.best.iter().copied().max().unwrap_or(0);
        let _ = write!(out, "| {} | {} |", row.instance, row.configurations);
        for &b in &row.best {
            if b == top {
                let _ = write!(out, " **{b}** |");
            } else {
                let _ = write!(out, " {b} |");
            }
        }
        for t in &row.mean_seconds {
            match t {
                Some(t) => {
                    let _ = write!(out, " {t:.2} |");
                }
                None => out.push_str(" - |"),
            }
        }
        out.push('\n');
    }
    let _ = writeln!(
        out,
        "\nValues within {}% of the best objective count as best.",
        report.tolerance * 100.0
    );
    out
}

/// Renders records as CSV, or as the markdown comparison table.
pub fn emit_report(records: &[RunRecord], format: ReportFormat, tolerance: f64) -> Result<String> {
    if records.is_empty() {
        return Err(Error::InvalidArgument("no run records to report".into()));
    }
    match format {
        ReportFormat::Csv => records_csv(records),
        ReportFormat::Markdown => Ok(report_markdown(&best_counts(records, tolerance)?)),
    }
}
