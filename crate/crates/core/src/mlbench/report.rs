use super::EvalReport;

/// Result table with one row per model, in ascending accuracy (stable for
/// equal accuracy).
pub fn markdown_table(title: &str, reports: &[EvalReport]) -> String {
    let mut rows: Vec<&EvalReport> = reports.iter().collect();
    rows.sort_by(|a, b| a.metrics.accuracy.total_cmp(&b.metrics.accuracy));
    let mut out = format!("### {title}\n\n");
    out.push_str("| Method | Accuracy | Precision | Recall | F1 Score |\n");
    out.push_str("|---|---|---|---|---|\n");
    for r in rows {
        let m = &r.metrics;
        out.push_str(&format!(
            "| {} | {:.2} | {:.2} | {:.2} | {:.2} |\n",
            r.display_name, m.accuracy, m.precision, m.recall, m.f1
        ));
    }
    out
}
