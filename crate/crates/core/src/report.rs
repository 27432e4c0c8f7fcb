//! Human-readable tables (4 decimals) and JSON serialization of reports.

use serde::Serialize;

use crate::experiments::{
    ArrivalsCheck, CalibrationResult, Measure, ReplicationSet, SampleComparison,
    ScenarioComparisonReport, ValidationReport, Verdict,
};
use crate::stats::DescriptiveStats;

/// Pretty JSON with a trailing newline. Field order follows the struct
/// definitions, so equal inputs give byte-identical output.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

pub fn fmt4(x: f64) -> String {
    format!("{x:.4}")
}

/// Column-aligned text table. The first column is left aligned, the rest
/// right aligned.
#[derive(Debug, Clone, Default)]
pub struct TextTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl TextTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        TextTable {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row<S: Into<String>>(&mut self, cells: impl IntoIterator<Item = S>) -> &mut Self {
        self.rows.push(cells.into_iter().map(Into::into).collect());
        self
    }

    pub fn render(&self) -> String {
        let cols = self
            .rows
            .iter()
            .map(Vec::len)
            .chain([self.header.len()])
            .max()
            .unwrap_or(0);
        let mut widths = vec![0; cols];
        for r in std::iter::once(&self.header).chain(&self.rows) {
            for (i, c) in r.iter().enumerate() {
                widths[i] = widths[i].max(c.chars().count());
            }
        }
        let line = |r: &Vec<String>| {
            let cells: Vec<String> = (0..cols)
                .map(|i| {
                    let c = r.get(i).map(String::as_str).unwrap_or("");
                    if i == 0 {
                        format!("{c:<w$}", w = widths[i])
                    } else {
                        format!("{c:>w$}", w = widths[i])
                    }
                })
                .collect();
            cells.join("  ").trim_end().to_string()
        };
        let mut out = line(&self.header);
        out.push('\n');
        let total: usize = widths.iter().sum::<usize>() + 2 * cols.saturating_sub(1);
        out.push_str(&"-".repeat(total));
        out.push('\n');
        for r in &self.rows {
            out.push_str(&line(r));
            out.push('\n');
        }
        out
    }
}

/// Mean, SD and interval bounds as they appear in a scenario row.
pub fn mean_sd_ci_cells(mean: f64, sd: f64, lower: f64, upper: f64) -> [String; 4] {
    [fmt4(mean), fmt4(sd), fmt4(lower), fmt4(upper)]
}

fn opt4(x: Option<f64>) -> String {
    x.map_or_else(|| "-".into(), fmt4)
}

fn descriptive_row(t: &mut TextTable, label: &str, d: &DescriptiveStats) {
    t.row([
        label.to_string(),
        d.n.to_string(),
        fmt4(d.mean),
        fmt4(d.median),
        opt4(d.std_dev),
        opt4(d.variance),
    ]);
}

fn comparison_row(t: &mut TextTable, label: &str, c: &SampleComparison) {
    t.row([
        label.to_string(),
        fmt4(c.mann_whitney.u_statistic),
        fmt4(c.mann_whitney.p_value),
        format!("{:?}", c.mann_whitney.method).to_lowercase(),
        fmt4(c.variance.ratio),
        fmt4(c.variance.relative_difference),
        if c.variance.similar {
            "similar"
        } else {
            "different"
        }
        .to_string(),
    ]);
}

pub fn validation_text(r: &ValidationReport) -> String {
    let mut out = format!(
        "Validation experiment ({} replications, alpha {}, unit: {})\n\n",
        r.replications, r.alpha, r.observed_comparison_unit
    );
    let mut t = TextTable::new(["Sample", "n", "Mean", "Median", "SD", "Variance"]);
    if let Some(o) = &r.observed {
        descriptive_row(&mut t, "Real", o);
    }
    descriptive_row(&mut t, "DES", &r.des);
    descriptive_row(&mut t, "ABS", &r.abs);
    descriptive_row(&mut t, "DES customers", &r.des_customers);
    descriptive_row(&mut t, "ABS customers", &r.abs_customers);
    out.push_str(&t.render());
    out.push_str(&format!(
        "Customer-level variance ratio DES/ABS: {}\n\n",
        fmt4(r.customer_variance_ratio_des_abs)
    ));

    let mut t = TextTable::new([
        "Comparison",
        "U",
        "p",
        "method",
        "var ratio",
        "rel diff",
        "variability",
    ]);
    if let Some(c) = &r.des_vs_observed {
        comparison_row(&mut t, "DES vs real", c);
    }
    if let Some(c) = &r.abs_vs_observed {
        comparison_row(&mut t, "ABS vs real", c);
    }
    comparison_row(&mut t, "DES vs ABS", &r.des_vs_abs);
    out.push_str(&t.render());
    out.push('\n');

    let h = &r.hypotheses;
    let mut t = TextTable::new(["Hypothesis", "Verdict"]);
    for (name, v) in [
        ("Ho_A DES represents the real system", h.ho_a),
        ("Ho_B ABS represents the real system", h.ho_b),
        ("Ho_C DES waits match real waits", h.ho_c),
        ("Ho_D ABS waits match real waits", h.ho_d),
        ("Ho_E DES variability matches real", h.ho_e),
        ("Ho_F ABS variability matches real", h.ho_f),
    ] {
        t.row([name, v.label()]);
    }
    out.push_str(&t.render());
    out
}

pub fn scenario_outputs_text(reports: &[&ScenarioComparisonReport]) -> String {
    let mut t = TextTable::new([
        "Scenario",
        "Measure",
        "Engine",
        "Mean",
        "SD",
        "95% CI lower",
        "95% CI upper",
    ]);
    let Some(first) = reports.first() else {
        return t.render();
    };
    for id in &first.scenario_ids {
        for m in Measure::ALL {
            for r in reports {
                if let Some(row) = r.row(id, m) {
                    let [a, b, c, d] =
                        mean_sd_ci_cells(row.mean, row.std_dev, row.ci_lower, row.ci_upper);
                    t.row([
                        id.clone(),
                        m.label().into(),
                        r.engine.label().into(),
                        a,
                        b,
                        c,
                        d,
                    ]);
                }
            }
        }
    }
    t.render()
}

pub fn paired_comparisons_text(reports: &[&ScenarioComparisonReport]) -> String {
    let mut out = String::new();
    if let Some(r) = reports.first() {
        out.push_str(&format!(
            "Bonferroni: {} / {} = {} per comparison ({}% intervals)\n\n",
            r.alpha,
            r.comparisons,
            r.per_comparison_alpha,
            fmt_percent(r.confidence_level)
        ));
    }
    let mut t = TextTable::new([
        "Engine",
        "Measure",
        "Comparison",
        "Mean diff",
        "CI lower",
        "CI upper",
        "Conclusion",
    ]);
    for r in reports {
        for c in &r.pairwise {
            t.row([
                r.engine.label().to_string(),
                c.measure.label().to_string(),
                format!("Scenario {} to {}", c.reference_id, c.other_id),
                fmt4(c.mean_difference),
                fmt4(c.ci_lower),
                fmt4(c.ci_upper),
                c.conclusion(),
            ]);
        }
    }
    out.push_str(&t.render());
    out
}

fn fmt_percent(level: f64) -> String {
    let p = format!("{:.4}", level * 100.0);
    p.trim_end_matches('0').trim_end_matches('.').to_string()
}

pub fn scenario_text(reports: &[&ScenarioComparisonReport], ho_g: Option<Verdict>) -> String {
    let mut out = String::from("Scenario outputs\n\n");
    out.push_str(&scenario_outputs_text(reports));
    out.push_str("\nPaired-t comparisons with the reference scenario\n\n");
    out.push_str(&paired_comparisons_text(reports));
    out.push('\n');
    let mut t = TextTable::new(["Hypothesis", "Verdict"]);
    for r in reports {
        t.row([
            format!("Ho_H {} more staff, shorter waits", r.engine.label()),
            r.ho_h.label().into(),
        ]);
    }
    if let Some(v) = ho_g {
        t.row(["Ho_G DES and ABS agree".to_string(), v.label().into()]);
    }
    out.push_str(&t.render());
    out
}

pub fn run_summary_text(set: &ReplicationSet) -> String {
    let n = set.n().max(1) as f64;
    let mut out = format!(
        "{} scenario {}: {} replications, seed {}\n",
        set.engine.label(),
        set.scenario_id,
        set.n(),
        set.master_seed
    );
    let mean = |v: Vec<f64>| v.iter().sum::<f64>() / n;
    let customers: usize = set.summaries.iter().map(|s| s.customers).sum();
    let mut t = TextTable::new(["Statistic", "Value"]);
    t.row(["customers per day".to_string(), fmt4(customers as f64 / n)]);
    t.row(["mean wait".to_string(), fmt4(mean(set.mean_waits()))]);
    t.row([
        "mean time in system".to_string(),
        fmt4(mean(set.mean_times_in_system())),
    ]);
    for (i, id) in set.staff_ids.iter().enumerate() {
        let u = mean(set.summaries.iter().map(|s| s.utilisation[i]).collect());
        t.row([format!("utilisation {id}"), fmt4(u)]);
    }
    out.push_str(&t.render());
    out
}

pub fn arrivals_text(c: &ArrivalsCheck) -> String {
    let mut out = format!(
        "Arrival check: {} replications, seed {}, total {} (expected {}, SE {})\n\n",
        c.replications,
        c.master_seed,
        fmt4(c.mean_total),
        fmt4(c.expected_total),
        fmt4(c.total_std_error)
    );
    let mut t = TextTable::new([
        "Minutes",
        "Rate",
        "Empirical rate",
        "Expected",
        "Mean count",
        "SE",
        "Within 3 SE",
    ]);
    for b in &c.buckets {
        t.row([
            format!("{}-{}", b.start, b.end),
            fmt4(b.configured_rate),
            fmt4(b.empirical_rate),
            fmt4(b.expected_count),
            fmt4(b.mean_count),
            fmt4(b.std_error),
            if b.within_3se { "yes" } else { "no" }.to_string(),
        ]);
    }
    out.push_str(&t.render());
    out
}

pub fn calibration_text(r: &CalibrationResult) -> String {
    let mut t = TextTable::new(["Quantity", "Target", "Achieved", "Error"]);
    t.row([
        "mean wait".to_string(),
        fmt4(r.targets.mean_wait),
        fmt4(r.achieved_wait),
        fmt4(r.wait_error),
    ]);
    t.row([
        "mean time in system".to_string(),
        fmt4(r.targets.mean_time_in_system),
        fmt4(r.achieved_time_in_system),
        fmt4(r.time_in_system_error),
    ]);
    let m = &r.service_model;
    format!(
        "Calibration: {} evaluations, residual {:.6}, {}\n\n{}\nservice scale {}: job1 {}, job2 {}, job3 {}, dwell {}\n",
        r.evaluations,
        r.residual,
        if r.within_tolerance { "within tolerance" } else { "NOT within tolerance" },
        t.render(),
        fmt4(r.service_scale),
        fmt4(m.job1_mean),
        fmt4(m.job2_mean),
        fmt4(m.job3_mean),
        fmt4(m.dwell_mean),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenario_row_format() {
        assert_eq!(
            mean_sd_ci_cells(1.69, 1.59, 1.37, 2.0),
            ["1.6900", "1.5900", "1.3700", "2.0000"]
        );
    }

    #[test]
    fn table_alignment() {
        let mut t = TextTable::new(["a", "value"]);
        t.row(["long label", "1.0000"]);
        let s = t.render();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "a            value");
        assert_eq!(lines[1], "-".repeat(18));
        assert_eq!(lines[2], "long label  1.0000");
    }

    #[test]
    fn percent_format() {
        assert_eq!(fmt_percent(0.975), "97.5");
        assert_eq!(fmt_percent(0.95), "95");
    }
}
