//! Report rendering. JSON reports embed the effective configuration and
//! contain no timestamps, so identical runs produce identical bytes.

use std::fmt::Write;

use meanscope::classify::{ClassificationReport, RegionScan, Verdict};
use meanscope::config::{OutputFormat, RunConfig};
use meanscope::hansen::{IntegrandReport, Method};
use meanscope::matmean::SearchReport;
use meanscope::reproduce::Reproduction;
use serde::Serialize;

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    command: &'static str,
    config: &'a RunConfig,
    #[serde(flatten)]
    result: T,
}

fn json<T: Serialize>(command: &'static str, config: &RunConfig, result: T) -> anyhow::Result<String> {
    let mut text = serde_json::to_string_pretty(&Report { command, config, result })?;
    text.push('\n');
    Ok(text)
}

fn opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |v| format!("{v}"))
}

fn verdict(v: Verdict) -> &'static str {
    match v {
        Verdict::HoldsOnGrid => "holds_on_grid",
        Verdict::Violated => "violated",
    }
}

pub fn classify(config: &RunConfig, reports: &[ClassificationReport]) -> anyhow::Result<String> {
    #[derive(Serialize)]
    struct Body<'a> {
        all_hold: bool,
        reports: &'a [ClassificationReport],
    }
    let all_hold = reports.iter().all(|r| r.holds());
    Ok(match config.format {
        OutputFormat::Json => json("classify", config, Body { all_hold, reports })?,
        OutputFormat::Csv => {
            let mut out = String::from("property,verdict,t,r,value\n");
            for r in reports {
                writeln!(out, "{},{},{},{},{}", r.property, verdict(r.verdict), r.extreme.t, opt(r.extreme.r), r.extreme.value)?;
            }
            out
        }
        OutputFormat::Table => {
            let mut out = format!("{:<12} {:<14} {:>12} {:>8} {:>12}\n", "property", "verdict", "t", "r", "statistic");
            for r in reports {
                let rv = r.extreme.r.map_or("-".to_string(), |v| format!("{v}"));
                writeln!(
                    out,
                    "{:<12} {:<14} {:>12.4e} {:>8} {:>12.4e}",
                    r.property.to_string(),
                    verdict(r.verdict),
                    r.extreme.t,
                    rv,
                    r.extreme.value
                )?;
            }
            out
        }
    })
}

pub fn reproduction(config: &RunConfig, result: &Reproduction) -> anyhow::Result<String> {
    Ok(match config.format {
        OutputFormat::Json => json("reproduce", config, result)?,
        OutputFormat::Csv => {
            let mut out = String::from("check,passed,detail\n");
            for c in &result.checks {
                writeln!(out, "\"{}\",{},\"{}\"", c.name, c.passed, c.detail)?;
            }
            out
        }
        OutputFormat::Table => {
            let mut out = String::new();
            for c in &result.checks {
                writeln!(out, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
            }
            writeln!(out, "{} {}", result.experiment, if result.passed { "PASS" } else { "FAIL" })?;
            out
        }
    })
}

fn method(m: Method) -> &'static str {
    match m {
        Method::ClosedForm => "closed_form",
        Method::Quadrature => "quadrature",
    }
}

/// CSV columns are always `t,r,value,method`.
pub fn hansen(config: &RunConfig, rows: &[IntegrandReport]) -> anyhow::Result<String> {
    #[derive(Serialize)]
    struct Body<'a> {
        rows: &'a [IntegrandReport],
    }
    Ok(match config.format {
        OutputFormat::Json => json("hansen", config, Body { rows })?,
        OutputFormat::Csv | OutputFormat::Table => {
            let mut out = String::from("t,r,value,method\n");
            for row in rows {
                writeln!(out, "{},{},{},{}", row.t, opt(row.r), row.value, method(row.method))?;
            }
            out
        }
    })
}

pub fn fuzz(config: &RunConfig, report: &SearchReport) -> anyhow::Result<String> {
    Ok(match config.format {
        OutputFormat::Json => json("fuzz", config, report)?,
        OutputFormat::Csv | OutputFormat::Table => match &report.witness {
            None => format!(
                "no witness (p = {}, {} trials, dim {}, seed {}, {} skipped)\n",
                report.config.p, report.trials_run, report.config.dim, report.config.seed, report.skipped
            ),
            Some(w) => format!(
                "witness ({:?}, trial {}) p = {}: min eig before {:.3e}, after {:.3e}\n",
                w.phase,
                w.trial_index.map_or("-".to_string(), |i| i.to_string()),
                w.p,
                w.min_eig_before,
                w.min_eig_after
            ),
        },
    })
}

pub fn scan(config: &RunConfig, scan: &RegionScan) -> anyhow::Result<String> {
    #[derive(Serialize)]
    struct Body<'a> {
        interior_mismatches: usize,
        boundary_mismatches: usize,
        scan: &'a RegionScan,
    }
    Ok(match config.format {
        OutputFormat::Json => json(
            "scan",
            config,
            Body { interior_mismatches: scan.interior_mismatches().len(), boundary_mismatches: scan.boundary_mismatches().len(), scan },
        )?,
        OutputFormat::Csv | OutputFormat::Table => scan.to_csv(),
    })
}
