//! Text renderings of metric and benchmark reports.

use std::fmt::Write;

use epd_core::metrics::{MetricValues, MetricsReport};
use epd_core::synth::BenchRow;

/// Column order of the metrics CSV.
pub const METRICS_COLUMNS: [&str; 12] = [
    "class", "ACC", "SPE", "SEN", "PRE", "DSC_h", "IoU", "DSC_s", "RAD", "RD", "RMSE", "excluded",
];

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_owned(), |v| format!("{v:.6}"))
}

fn values_row(out: &mut String, label: &str, values: &MetricValues, excluded: &str) {
    out.push_str(label);
    for v in values.as_array() {
        out.push(',');
        out.push_str(&cell(v));
    }
    out.push(',');
    out.push_str(excluded);
    out.push('\n');
}

/// One row per class, then a `mean` row whose `excluded` cell lists the
/// excluded classes separated by `;`. Undefined values print as `NA`. The
/// first line is a `#` comment with the averaging mode and threshold.
pub fn metrics_csv(report: &MetricsReport) -> String {
    let excluded: Vec<String> = report.excluded_classes.iter().map(ToString::to_string).collect();
    let mut out = String::new();
    writeln!(
        out,
        "# averaging={} threshold={:.6} excluded={} degenerate_prediction={}",
        report.averaging,
        report.chosen_threshold,
        excluded.join(";"),
        report.degenerate_prediction
    )
    .unwrap();
    out.push_str(&METRICS_COLUMNS.join(","));
    out.push('\n');
    for row in &report.classes {
        values_row(&mut out, &row.class.to_string(), &row.values, if row.excluded { "true" } else { "false" });
    }
    values_row(&mut out, "mean", &report.average, &excluded.join(";"));
    out
}

/// Full-precision JSON; undefined values are `null`.
pub fn metrics_json(report: &MetricsReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub const BENCH_COLUMNS: [&str; 6] = ["method", "shape", "factor", "phase", "mass_error", "edge_fraction"];

pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut out = BENCH_COLUMNS.join(",");
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{:.6},{:.6}",
            r.method, r.shape, r.factor, r.phase, r.mass_error, r.edge_fraction
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use epd_core::label::one_hot;
    use epd_core::metrics::optimal_threshold_search;
    use epd_core::HardLabelMap;

    #[test]
    fn csv_layout() {
        let target = HardLabelMap::new(1, 4, 3, vec![0, 1, 1, 0]).unwrap();
        let report = optimal_threshold_search(&one_hot(&target), &target, 0.01).unwrap().report;
        let csv = metrics_csv(&report);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# averaging=macro threshold=0.000000 excluded=2 degenerate_prediction=false");
        assert_eq!(lines[1], "class,ACC,SPE,SEN,PRE,DSC_h,IoU,DSC_s,RAD,RD,RMSE,excluded");
        assert_eq!(
            lines[2],
            "0,1.000000,1.000000,1.000000,1.000000,1.000000,1.000000,1.000000,0.000000,0.000000,0.000000,false"
        );
        assert!(lines[4].starts_with("2,1.000000,1.000000,NA,NA,NA,NA,NA,NA,NA,0.000000,true"));
        assert!(lines[5].starts_with("mean,1.000000"));
        assert!(lines[5].ends_with(",2"));
    }

    #[test]
    fn json_uses_null_for_undefined() {
        let target = HardLabelMap::new(1, 2, 3, vec![0, 1]).unwrap();
        let report = optimal_threshold_search(&one_hot(&target), &target, 0.01).unwrap().report;
        let v: serde_json::Value = serde_json::from_str(&metrics_json(&report)).unwrap();
        assert!(v["classes"][2]["values"]["dsc_h"].is_null());
        assert_eq!(v["average"]["dsc_h"], 1.0);
        assert_eq!(v["averaging"], "macro");
    }
}
