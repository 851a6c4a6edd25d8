//! Report emitters: human-readable table, CSV, and machine-stable JSON.

use crate::experiments::{ComparisonTable, FidelityReport};
use crate::poly::{round_sig, TruncatedPoly};
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Table,
    Csv,
    Json,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "table" => Some(OutputFormat::Table),
            "csv" => Some(OutputFormat::Csv),
            "json" => Some(OutputFormat::Json),
            _ => None,
        }
    }
}

pub fn emit(report: &FidelityReport, format: OutputFormat, cmp: Option<&ComparisonTable>) -> String {
    match format {
        OutputFormat::Table => emit_table(report, cmp),
        OutputFormat::Csv => emit_csv(report),
        OutputFormat::Json => emit_json(report),
    }
}

fn measure_poly(report: &FidelityReport, name: &str) -> TruncatedPoly {
    report.measure(name).expect("measure present")
}

pub fn emit_table(report: &FidelityReport, cmp: Option<&ComparisonTable>) -> String {
    let mut out = String::new();
    writeln!(out, "experiment: {}", report.experiment_id).unwrap();
    let params: Vec<String> = report
        .params
        .iter()
        .map(|(k, v)| format!("{k}={}", v.to_string().trim_matches('"')))
        .collect();
    writeln!(out, "params: {}", params.join(" ")).unwrap();
    for r in &report.results {
        let poly = measure_poly(report, &r.measure);
        writeln!(out, "{}: {}", r.measure, poly).unwrap();
    }
    writeln!(
        out,
        "meta: patterns={} accepted={} path={} max_path_dev={:.2e} acceptance={:.6e} runtime_ms={}",
        report.meta.pattern_count,
        report.meta.accepted_count,
        report.meta.engine_path,
        report.meta.max_path_deviation,
        report.meta.acceptance_constant,
        report.meta.runtime_ms
    )
    .unwrap();
    if let Some(cmp) = cmp {
        writeln!(out, "comparison:").unwrap();
        for row in &cmp.rows {
            let status = if row.pass {
                "PASS"
            } else if row.advisory {
                "FAIL (advisory)"
            } else {
                "FAIL"
            };
            writeln!(
                out,
                "  {:<18} {:<10} expected {:>14.9} computed {:>14.9} delta {:>+.3e}  {}",
                row.measure,
                format!("{}", row.monomial),
                row.expected,
                row.computed,
                row.delta,
                status
            )
            .unwrap();
        }
        writeln!(out, "overall: {}", if cmp.hard_pass() { "PASS" } else { "FAIL" }).unwrap();
    }
    out
}

pub fn emit_csv(report: &FidelityReport) -> String {
    let mut out = String::from("measure,ex,ey,ez,coefficient\n");
    for r in &report.results {
        for t in &r.poly {
            writeln!(
                out,
                "{},{},{},{},{}",
                r.measure,
                t.m[0],
                t.m[1],
                t.m[2],
                format_sig(t.c)
            )
            .unwrap();
        }
    }
    out
}

pub fn emit_json(report: &FidelityReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

fn format_sig(c: f64) -> String {
    format!("{:.12e}", round_sig(c, 12))
}
