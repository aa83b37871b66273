//! CSV and JSON output.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle::RatioReport;
use crate::pipeline::{ClientDiag, Diagnostics};
use crate::rounding::EstimateReport;

/// Column order of [`emit_csv`].
pub const CSV_HEADER: [&str; 12] = [
    "instance",
    "m",
    "n",
    "rmax",
    "lp_cost",
    "opt_cost",
    "trials",
    "alg_mean",
    "alg_stderr",
    "ratio_lp",
    "ratio_opt",
    "feas_failures",
];

fn opt_field(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Write one row per report under [`CSV_HEADER`]. Missing optimum fields are
/// left empty. Floats use the shortest representation that parses back to
/// the same value.
pub fn emit_csv<W: Write>(reports: &[RatioReport], out: W) -> Result<()> {
    if reports.is_empty() {
        return Err(Error::InvalidInput("no reports to write".into()));
    }
    let csv_err = |e: csv::Error| Error::Io(e.to_string());
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in reports {
        w.write_record([
            r.instance.clone(),
            r.m.to_string(),
            r.n.to_string(),
            r.rmax.to_string(),
            r.lp_cost.to_string(),
            opt_field(r.opt_cost),
            r.trials.to_string(),
            r.alg_mean.to_string(),
            r.alg_stderr.to_string(),
            r.ratio_to_lp.to_string(),
            opt_field(r.ratio_to_opt),
            r.feasibility_failures.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// The machine-readable record of one `solve` run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveRecord {
    pub seed: u64,
    pub trials: usize,
    pub gamma: f64,
    pub lp_cost: f64,
    pub opt_cost: Option<f64>,
    pub preopened: usize,
    pub cluster_count: usize,
    pub cluster_sizes: Vec<usize>,
    pub clients: Vec<ClientDiag>,
    pub costs: Vec<f64>,
    pub mean: f64,
    pub stderr: f64,
    pub min: f64,
    pub max: f64,
    pub ratio_to_lp: f64,
    pub feasibility_failures: usize,
}

impl SolveRecord {
    pub fn new(seed: u64, diag: Diagnostics, report: &RatioReport) -> Self {
        let est = EstimateReport::from_samples(&report.costs);
        let fold = |init: f64, f: fn(f64, f64) -> f64| report.costs.iter().copied().fold(init, f);
        SolveRecord {
            seed,
            trials: report.trials,
            gamma: diag.gamma,
            lp_cost: diag.lp_cost,
            opt_cost: report.opt_cost,
            preopened: diag.preopened,
            cluster_count: diag.cluster_count,
            cluster_sizes: diag.cluster_sizes,
            clients: diag.clients,
            costs: report.costs.clone(),
            mean: est.mean,
            stderr: est.stderr,
            min: fold(f64::INFINITY, f64::min),
            max: fold(f64::NEG_INFINITY, f64::max),
            ratio_to_lp: report.ratio_to_lp,
            feasibility_failures: report.feasibility_failures,
        }
    }
}

/// Pretty-printed JSON followed by a newline.
pub fn emit_json<W: Write, T: Serialize>(record: &T, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, record).map_err(|e| Error::Io(e.to_string()))?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(opt: Option<f64>) -> RatioReport {
        RatioReport {
            instance: "a.ftfl".into(),
            m: 3,
            n: 2,
            rmax: 2,
            lp_cost: 1.5,
            opt_cost: opt,
            alg_mean: 2.0 / 3.0,
            alg_stderr: 0.1,
            ratio_to_lp: 0.4,
            ratio_to_opt: opt.map(|o| 2.0 / 3.0 / o),
            trials: 4,
            feasibility_failures: 0,
            costs: vec![1.0; 4],
        }
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        emit_csv(&[report(None)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], CSV_HEADER.join(","));
        assert_eq!(lines[1], "a.ftfl,3,2,2,1.5,,4,0.6666666666666666,0.1,0.4,,0");
    }

    #[test]
    fn empty_report_list_is_rejected() {
        assert!(emit_csv(&[], Vec::new()).is_err());
    }
}
