//! Evaluation report rendering: a JSON file at full precision and a
//! plain-text table with percentages to one decimal.

use med_core::harness::EvalReport;
use serde::Serialize;

pub const REPORT_VERSION: u64 = 1;

#[derive(Serialize)]
struct PairJson<'a> {
    source_tag: &'a str,
    target_tag: &'a str,
    total: usize,
    correct: usize,
    accuracy: f64,
    corrected: Option<usize>,
    corrected_accuracy: Option<f64>,
    delta: Option<f64>,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    format_version: u64,
    members: usize,
    ensemble: bool,
    total: usize,
    correct: usize,
    accuracy: f64,
    member_accuracies: &'a [f64],
    member_mean: f64,
    member_std: f64,
    corrected: Option<usize>,
    corrected_accuracy: Option<f64>,
    delta: Option<f64>,
    per_pair: Vec<PairJson<'a>>,
    predictions: &'a [String],
    corrected_predictions: Option<&'a [String]>,
}

pub fn to_json(report: &EvalReport) -> String {
    let json = ReportJson {
        format_version: REPORT_VERSION,
        members: report.member_accuracies.len(),
        ensemble: report.ensemble,
        total: report.total,
        correct: report.correct,
        accuracy: report.accuracy,
        member_accuracies: &report.member_accuracies,
        member_mean: report.member_mean,
        member_std: report.member_std,
        corrected: report.corrected,
        corrected_accuracy: report.corrected_accuracy,
        delta: report.delta,
        per_pair: report
            .per_pair
            .iter()
            .map(|p| PairJson {
                source_tag: &p.source_tag,
                target_tag: &p.target_tag,
                total: p.total,
                correct: p.correct,
                accuracy: p.accuracy,
                corrected: p.corrected,
                corrected_accuracy: p.corrected_accuracy,
                delta: p.delta,
            })
            .collect(),
        predictions: &report.predictions,
        corrected_predictions: report.corrected_predictions.as_deref(),
    };
    let mut text = serde_json::to_string_pretty(&json).expect("report serializes");
    text.push('\n');
    text
}

fn pct(x: f64) -> String {
    format!("{:.1}", 100.0 * x)
}

pub fn to_table(report: &EvalReport) -> String {
    let mut out = String::new();
    let poet = report.corrected_accuracy.is_some();
    out.push_str(if poet {
        "source_tag\ttarget_tag\tn\tacc\tpoet\tdelta\n"
    } else {
        "source_tag\ttarget_tag\tn\tacc\n"
    });
    for p in &report.per_pair {
        out.push_str(&format!("{}\t{}\t{}\t{}", p.source_tag, p.target_tag, p.total, pct(p.accuracy)));
        if let (Some(c), Some(d)) = (p.corrected_accuracy, p.delta) {
            out.push_str(&format!("\t{}\t{:+.1}", pct(c), 100.0 * d));
        }
        out.push('\n');
    }
    let k = report.member_accuracies.len();
    out.push_str(&format!("all\t\t{}\t{}", report.total, pct(report.accuracy)));
    if let (Some(c), Some(d)) = (report.corrected_accuracy, report.delta) {
        out.push_str(&format!("\t{}\t{:+.1}", pct(c), 100.0 * d));
    }
    out.push('\n');
    if k > 1 {
        out.push_str(&format!(
            "members: {k}, single-model mean {} (std {}), majority vote {}\n",
            pct(report.member_mean),
            pct(report.member_std),
            pct(report.accuracy)
        ));
    } else {
        out.push_str("members: 1 (single model, no voting)\n");
    }
    out
}
