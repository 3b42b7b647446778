//! Seeded Monte Carlo experiments over parameter grids, growth-exponent
//! fits and CSV/JSON output.
//!
//! Trial `t` of every cell is realized with `SampleSeed::new(master_seed, t)`.
//! Trials run in parallel; results are collected in `(cell, trial)` order,
//! so output is byte-identical across runs except for `wall_millis`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::construction::{build, plan, ConstructionPlan, Family};
use crate::engine::merge_pareto;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::sampler::{sample_instance, SampleSeed};

/// Exact CSV header, in column order.
pub const CSV_HEADER: &str = "family,n,d,phi,n_p,n_q,seed,trial,pareto_count,wall_millis";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub family: Family,
    pub n: u64,
    pub d: u64,
    pub phi: Rational,
    pub n_p: u64,
    pub n_q: u64,
    pub seed: u64,
    pub trial: u64,
    pub pareto_count: u64,
    pub wall_millis: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridCell {
    pub n: u64,
    pub d: u64,
    pub phi: Rational,
}

/// Cartesian product of per-axis values, parsed from text such as
/// `n=6..16;d=1;phi=3,5/2`. Ranges are inclusive. Missing axes default to
/// `d=1` and `phi=1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub cells: Vec<GridCell>,
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut ns = None;
        let mut ds = None;
        let mut phis = None;
        for axis in s.split(';').map(str::trim).filter(|a| !a.is_empty()) {
            let (name, values) = axis
                .split_once('=')
                .ok_or_else(|| Error::InvalidInput(format!("grid axis {axis:?} needs name=values")))?;
            match name.trim() {
                "n" => ns = Some(parse_int_axis(values)?),
                "d" => ds = Some(parse_int_axis(values)?),
                "phi" => {
                    phis = Some(
                        values
                            .split(',')
                            .map(|v| v.trim().parse::<Rational>())
                            .collect::<Result<Vec<_>>>()?,
                    )
                }
                other => return Err(Error::InvalidInput(format!("unknown grid axis {other:?}"))),
            }
        }
        let ns = ns.ok_or_else(|| Error::InvalidInput("grid needs an n axis".into()))?;
        let ds = ds.unwrap_or_else(|| vec![1]);
        let phis = phis.unwrap_or_else(|| vec![Rational::one()]);
        let mut cells = Vec::with_capacity(ns.len() * ds.len() * phis.len());
        for &n in &ns {
            for &d in &ds {
                for phi in &phis {
                    cells.push(GridCell { n, d, phi: phi.clone() });
                }
            }
        }
        Ok(Grid { cells })
    }
}

fn parse_int_axis(values: &str) -> Result<Vec<u64>> {
    let bad = || Error::InvalidInput(format!("bad integer axis {values:?}"));
    let mut out = Vec::new();
    for part in values.split(',').map(str::trim) {
        if let Some((a, b)) = part.split_once("..") {
            let a: u64 = a.trim().parse().map_err(|_| bad())?;
            let b: u64 = b.trim().parse().map_err(|_| bad())?;
            if a > b {
                return Err(bad());
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub n: u64,
    pub d: u64,
    pub phi: Rational,
    pub n_p: u64,
    pub n_q: u64,
    pub trials: u64,
    pub count_sum: u64,
    pub count_sq_sum: u128,
    pub mean: f64,
    pub stddev: f64,
    /// Set when the cell could not be planned or counted.
    pub error: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub slope_stderr: f64,
    /// 95% Student-t interval for the slope.
    pub slope_ci: (f64, f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub family: Family,
    pub trials: u64,
    pub master_seed: u64,
    pub cells: Vec<CellSummary>,
    /// Log-log fit of mean count against `n` over the successful cells,
    /// when there are at least three distinct `n`.
    pub fit: Option<GrowthFit>,
    pub records: Vec<TrialRecord>,
}

impl ExperimentSummary {
    /// Rebuilds the aggregate view from raw records, e.g. after reading a CSV.
    pub fn from_records(family: Family, trials: u64, master_seed: u64, records: Vec<TrialRecord>) -> Self {
        let cells = aggregate(&records);
        let fit = fit_cells(&cells);
        ExperimentSummary {
            family,
            trials,
            master_seed,
            cells,
            fit,
            records,
        }
    }

    pub fn successful_cells(&self) -> impl Iterator<Item = &CellSummary> {
        self.cells.iter().filter(|c| c.error.is_none())
    }
}

/// Per-cell statistics from exact integer sums, cells in `(n, d, phi)` order.
pub fn aggregate(records: &[TrialRecord]) -> Vec<CellSummary> {
    let mut by_cell: BTreeMap<GridCell, Vec<&TrialRecord>> = BTreeMap::new();
    for r in records {
        by_cell
            .entry(GridCell {
                n: r.n,
                d: r.d,
                phi: r.phi.clone(),
            })
            .or_default()
            .push(r);
    }
    by_cell
        .into_iter()
        .map(|(cell, rs)| {
            let t = rs.len() as u64;
            let sum: u64 = rs.iter().map(|r| r.pareto_count).sum();
            let sq: u128 = rs.iter().map(|r| (r.pareto_count as u128).pow(2)).sum();
            let (mean, stddev) = moments(t, sum, sq);
            CellSummary {
                n: cell.n,
                d: cell.d,
                phi: cell.phi,
                n_p: rs[0].n_p,
                n_q: rs[0].n_q,
                trials: t,
                count_sum: sum,
                count_sq_sum: sq,
                mean,
                stddev,
                error: None,
            }
        })
        .collect()
}

fn moments(t: u64, sum: u64, sq: u128) -> (f64, f64) {
    if t == 0 {
        return (0.0, 0.0);
    }
    let mean = sum as f64 / t as f64;
    if t < 2 {
        return (mean, 0.0);
    }
    let t = t as u128;
    let num = t * sq - (sum as u128).pow(2);
    let var = num as f64 / (t * (t - 1)) as f64;
    (mean, var.sqrt())
}

fn fit_cells(cells: &[CellSummary]) -> Option<GrowthFit> {
    let mut by_n: BTreeMap<u64, (u64, u64)> = BTreeMap::new();
    for c in cells.iter().filter(|c| c.error.is_none() && c.trials > 0) {
        let e = by_n.entry(c.n).or_default();
        e.0 += c.count_sum;
        e.1 += c.trials;
    }
    let points: Vec<(f64, f64)> = by_n
        .into_iter()
        .map(|(n, (sum, t))| (n as f64, sum as f64 / t as f64))
        .collect();
    fit_growth(&points).ok()
}

/// Least-squares fit of `ln y = slope * ln x + intercept`.
pub fn fit_growth(points: &[(f64, f64)]) -> Result<GrowthFit> {
    if points.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "growth fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if let Some(&(x, y)) = points.iter().find(|&&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(Error::InvalidInput(format!("growth fit needs positive points, got ({x}, {y})")));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = logs.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("growth fit needs at least two distinct x".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = logs
        .iter()
        .map(|p| (p.1 - (slope * p.0 + intercept)).powi(2))
        .sum();
    let r2 = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    let dof = n - 2.0;
    let slope_stderr = (ss_res / dof / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, dof)
        .map(|dist| dist.inverse_cdf(0.975))
        .unwrap_or(f64::NAN);
    Ok(GrowthFit {
        slope,
        intercept,
        r2,
        slope_stderr,
        slope_ci: (slope - t * slope_stderr, slope + t * slope_stderr),
    })
}

fn run_cell(
    family: Family,
    cell: &GridCell,
    trials: u64,
    master_seed: u64,
) -> Result<(ConstructionPlan, Vec<TrialRecord>)> {
    let plan = plan(family, cell.n, cell.d, &cell.phi)?;
    let instance = build(&plan)?;
    let records = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let start = Instant::now();
            let realized = sample_instance(&instance, SampleSeed::new(master_seed, trial))?;
            let count = merge_pareto(&realized)?.count() as u64;
            Ok(TrialRecord {
                family,
                n: cell.n,
                d: plan.d,
                phi: cell.phi.clone(),
                n_p: plan.n_p.unwrap_or(0),
                n_q: plan.n_q,
                seed: master_seed,
                trial,
                pareto_count: count,
                wall_millis: start.elapsed().as_millis() as u64,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((plan, records))
}

/// Runs `trials` realizations of every cell. Cells that fail (for example a
/// precondition of the planner) are recorded with their error and skipped.
pub fn run_experiment(family: Family, grid: &Grid, trials: u64, master_seed: u64) -> ExperimentSummary {
    let results: Vec<(GridCell, Result<(ConstructionPlan, Vec<TrialRecord>)>)> = grid
        .cells
        .par_iter()
        .map(|cell| (cell.clone(), run_cell(family, cell, trials, master_seed)))
        .collect();

    let mut records = Vec::new();
    let mut cells = Vec::with_capacity(results.len());
    for (cell, result) in results {
        match result {
            Ok((plan, rs)) => {
                let t = rs.len() as u64;
                let sum: u64 = rs.iter().map(|r| r.pareto_count).sum();
                let sq: u128 = rs.iter().map(|r| (r.pareto_count as u128).pow(2)).sum();
                let (mean, stddev) = moments(t, sum, sq);
                cells.push(CellSummary {
                    n: cell.n,
                    d: plan.d,
                    phi: cell.phi,
                    n_p: plan.n_p.unwrap_or(0),
                    n_q: plan.n_q,
                    trials: t,
                    count_sum: sum,
                    count_sq_sum: sq,
                    mean,
                    stddev,
                    error: None,
                });
                records.extend(rs);
            }
            Err(e) => cells.push(CellSummary {
                n: cell.n,
                d: cell.d,
                phi: cell.phi,
                n_p: 0,
                n_q: 0,
                trials: 0,
                count_sum: 0,
                count_sq_sum: 0,
                mean: 0.0,
                stddev: 0.0,
                error: Some(e.to_string()),
            }),
        }
    }
    let fit = fit_cells(&cells);
    ExperimentSummary {
        family,
        trials,
        master_seed,
        cells,
        fit,
        records,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::InvalidInput(format!("unknown format {other:?}"))),
        }
    }
}

/// CSV holds one row per trial; JSON holds the whole summary.
pub fn emit_results(summary: &ExperimentSummary, path: &Path, format: OutputFormat) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    match format {
        OutputFormat::Csv => write_csv(&summary.records, &mut out).map_err(|e| match e {
            Error::Io { source, .. } => Error::io(path, source),
            other => other,
        })?,
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut out, summary)?;
            out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
        }
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Writes records as CSV. The header is written even with no records.
pub fn write_csv<W: Write>(records: &[TrialRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER.split(',')).map_err(csv_err)?;
    for r in records {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Csv {
        path: "<csv>".into(),
        source: e,
    }
}

pub fn read_csv(path: &Path) -> Result<Vec<TrialRecord>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::Reader::from_reader(BufReader::new(file));
    rdr.deserialize()
        .collect::<std::result::Result<Vec<TrialRecord>, _>>()
        .map_err(|e| Error::Csv {
            path: path.into(),
            source: e,
        })
}

pub fn read_json(path: &Path) -> Result<ExperimentSummary> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_reader(BufReader::new(file))?)
}

/// Points for [`fit_growth`] from a CSV: either the trial schema (mean
/// `pareto_count` per `n`) or two columns named `x` and `y`.
pub fn read_fit_points(path: &Path) -> Result<Vec<(f64, f64)>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::Reader::from_reader(BufReader::new(file));
    let csv_err = |e| Error::Csv {
        path: path.into(),
        source: e,
    };
    let headers = rdr.headers().map_err(csv_err)?.clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let (xi, yi, average) = match (col("n"), col("pareto_count"), col("x"), col("y")) {
        (Some(n), Some(c), _, _) => (n, c, true),
        (_, _, Some(x), Some(y)) => (x, y, false),
        _ => {
            return Err(Error::InvalidInput(format!(
                "{}: need columns n,pareto_count or x,y",
                path.display()
            )))
        }
    };
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let get = |i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|v| v.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::InvalidInput(format!("{}: bad number in row {rec:?}", path.display())))
        };
        rows.push((get(xi)?, get(yi)?));
    }
    if !average {
        return Ok(rows);
    }
    let mut by_x: BTreeMap<u64, (f64, u64)> = BTreeMap::new();
    for (x, y) in rows {
        let e = by_x.entry(x.to_bits()).or_default();
        e.0 += y;
        e.1 += 1;
    }
    let mut points: Vec<(f64, f64)> = by_x
        .into_iter()
        .map(|(bits, (sum, cnt))| (f64::from_bits(bits), sum / cnt as f64))
        .collect();
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g: Grid = "n=6..8;phi=3,5/2".parse().unwrap();
        assert_eq!(g.cells.len(), 6);
        assert_eq!(g.cells[0], GridCell { n: 6, d: 1, phi: Rational::from(3) });
        assert_eq!(g.cells[1].phi, "5/2".parse().unwrap());
        let g: Grid = "n=32, 48; d=2".parse().unwrap();
        assert_eq!(g.cells.len(), 2);
        assert!("d=2".parse::<Grid>().is_err());
        assert!("n=5..3".parse::<Grid>().is_err());
        assert!("n=3;q=1".parse::<Grid>().is_err());
    }

    #[test]
    fn fit_exact_square() {
        let pts: Vec<(f64, f64)> = (1..=6).map(|x| (x as f64, (x * x) as f64)).collect();
        let fit = fit_growth(&pts).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.r2 - 1.0).abs() < 1e-12);
        assert!(fit.slope_stderr < 1e-6);
    }

    #[test]
    fn fit_constant() {
        let pts = [(1.0, 5.0), (2.0, 5.0), (4.0, 5.0)];
        let fit = fit_growth(&pts).unwrap();
        assert!(fit.slope.abs() < 1e-12);
        assert_eq!(fit.r2, 1.0);
    }

    #[test]
    fn fit_errors() {
        assert!(fit_growth(&[(1.0, 1.0), (2.0, 4.0)]).is_err());
        assert!(fit_growth(&[(1.0, 1.0), (2.0, 0.0), (3.0, 9.0)]).is_err());
        assert!(fit_growth(&[(-1.0, 1.0), (2.0, 4.0), (3.0, 9.0)]).is_err());
        assert!(fit_growth(&[(2.0, 1.0), (2.0, 4.0), (2.0, 9.0)]).is_err());
    }

    #[test]
    fn moments_are_exact_for_integers() {
        // counts 2, 4, 4, 4, 5, 5, 7, 9: mean 5, sample variance 32/7
        let c = [2u64, 4, 4, 4, 5, 5, 7, 9];
        let sum = c.iter().sum();
        let sq = c.iter().map(|&x| (x as u128).pow(2)).sum();
        let (mean, sd) = moments(8, sum, sq);
        assert_eq!(mean, 5.0);
        assert!((sd - (32.0f64 / 7.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn empty_csv_is_header_only() {
        let mut buf = Vec::new();
        write_csv(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn failed_cells_are_recorded() {
        let grid: Grid = "n=3,10;phi=3".parse().unwrap();
        let s = run_experiment(Family::Bicriteria, &grid, 4, 1);
        assert_eq!(s.cells.len(), 2);
        assert!(s.cells[0].error.as_deref().unwrap().contains("n >= 4"));
        assert_eq!(s.cells[1].trials, 4);
        assert_eq!(s.records.len(), 4);
    }
}
