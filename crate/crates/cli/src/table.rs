//! Bench-report rendering: an aligned text table for the terminal, comma
//! separated tables for spreadsheets, and a plot-data document carrying the
//! per-case gap of every method.

use serde_json::json;
use shopevo_core::report::BenchReport;

fn cell(value: Option<f64>, precision: usize) -> String {
    match value {
        Some(v) => format!("{v:.precision$}"),
        None => "NA".to_string(),
    }
}

/// Aligned table of makespans, one row per case, best cell starred, with a
/// mean row at the bottom.
pub fn render_text(report: &BenchReport) -> String {
    let mut columns: Vec<Vec<String>> = Vec::new();
    let mut header = vec!["case".to_string()];
    header.extend(report.method_names.iter().cloned());
    columns.push(header);

    for (case, name) in report.case_names.iter().enumerate() {
        let mut row = vec![name.clone()];
        for (method, cell) in report.makespans[case].iter().enumerate() {
            let text = match cell {
                Some(v) if Some(*v) == report.best_per_case[case] => format!("{v}*"),
                Some(v) => v.to_string(),
                None => "NA".to_string(),
            };
            row.push(text);
            let _ = method;
        }
        columns.push(row);
    }

    let mut mean_row = vec!["mean".to_string()];
    for mean in &report.mean_makespan_per_method {
        mean_row.push(cell(*mean, 2));
    }
    columns.push(mean_row);

    let width_count = columns[0].len();
    let widths: Vec<usize> = (0..width_count)
        .map(|i| columns.iter().map(|row| row[i].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for (index, row) in columns.iter().enumerate() {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(text, width)| format!("{text:>width$}"))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
        if index == 0 || index == columns.len() - 2 {
            out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (width_count - 1)));
            out.push('\n');
        }
    }
    out
}

/// Comma-separated makespan table with a trailing mean row.
pub fn render_makespans_csv(report: &BenchReport) -> String {
    let mut out = format!("case,{}\n", report.method_names.join(","));
    for (case, name) in report.case_names.iter().enumerate() {
        let cells: Vec<String> = report.makespans[case]
            .iter()
            .map(|c| c.map(|v| v.to_string()).unwrap_or_else(|| "NA".into()))
            .collect();
        out.push_str(&format!("{name},{}\n", cells.join(",")));
    }
    let means: Vec<String> = report
        .mean_makespan_per_method
        .iter()
        .map(|m| cell(*m, 2))
        .collect();
    out.push_str(&format!("mean,{}\n", means.join(",")));
    out
}

/// Comma-separated gap table (fraction above the per-case best) with a
/// trailing mean row.
pub fn render_gaps_csv(report: &BenchReport) -> String {
    let mut out = format!("case,{}\n", report.method_names.join(","));
    for (case, name) in report.case_names.iter().enumerate() {
        let cells: Vec<String> = report.gaps[case].iter().map(|c| cell(*c, 4)).collect();
        out.push_str(&format!("{name},{}\n", cells.join(",")));
    }
    let means: Vec<String> = report.mean_gap_per_method.iter().map(|m| cell(*m, 4)).collect();
    out.push_str(&format!("mean,{}\n", means.join(",")));
    out
}

/// Plot-data document: for each method, its gap on every case, ready to feed
/// a line or box plot.
pub fn plot_data(report: &BenchReport) -> serde_json::Value {
    let series: Vec<serde_json::Value> = report
        .method_names
        .iter()
        .enumerate()
        .map(|(method, name)| {
            let gaps: Vec<serde_json::Value> = report
                .gaps
                .iter()
                .map(|row| match row[method] {
                    Some(g) => json!(g),
                    None => serde_json::Value::Null,
                })
                .collect();
            json!({"method": name, "gaps": gaps, "mean_gap": report.mean_gap_per_method[method]})
        })
        .collect();
    json!({"cases": report.case_names, "series": series})
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report() -> BenchReport {
        BenchReport::from_makespans(
            vec!["c0".into(), "c1".into()],
            vec!["SPT".into(), "LPT".into()],
            vec![vec![Some(10), Some(12)], vec![Some(8), None]],
        )
    }

    #[test]
    fn text_table_stars_the_best_cell_and_appends_means() {
        let text = render_text(&report());
        assert!(text.contains("10*"));
        assert!(text.contains("12"));
        assert!(text.contains("NA"));
        assert!(text.lines().last().unwrap().starts_with("mean"));
    }

    #[test]
    fn csv_tables_have_one_row_per_case_plus_header_and_mean() {
        let makespans = render_makespans_csv(&report());
        assert_eq!(makespans.lines().count(), 4);
        assert!(makespans.starts_with("case,SPT,LPT\n"));
        assert!(makespans.contains("c1,8,NA"));

        let gaps = render_gaps_csv(&report());
        assert!(gaps.contains("c0,0.0000,0.2000"));
        assert!(gaps.lines().last().unwrap().starts_with("mean,"));
    }

    #[test]
    fn plot_data_carries_gaps_per_method() {
        let doc = plot_data(&report());
        assert_eq!(doc["cases"][1], "c1");
        assert_eq!(doc["series"][0]["method"], "SPT");
        assert_eq!(doc["series"][0]["gaps"][0], 0.0);
        assert!(doc["series"][1]["gaps"][1].is_null());
    }
}
