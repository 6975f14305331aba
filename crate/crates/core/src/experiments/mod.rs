//! Quantitative experiments: equidistribution of preimage divisors,
//! pair-energy configurations, proximity scans, the pointwise Riesz-type
//! decomposition, and the smeared-inequality suite, with seeded reproducible
//! sampling and machine-readable reports.
//!
//! Every run function returns typed rows that serialize to JSON; the small
//! [`csv_lines`] helper renders any such row set as CSV for spreadsheets.

pub mod equidist;
pub mod scans;
pub mod suite;
pub mod testfns;

pub use equidist::{
    equidist_run, fekete_config_check, fitted_constants, DiscrepancyRow, FeketeConfigRow,
};
pub use scans::{
    periodic_diag_scan, proximity_scan, riesz_residual, DiagRow, ProximityRow, RieszReport,
};
pub use suite::{
    cs_random_suite, default_corpus, regularized_inequality_suite, CsSuiteReport, GlobalRegRow,
    LocalRegRow, NegativityRow, PadicRegRow, SchwarzRow, SuiteCase, SuiteReport,
};
pub use testfns::TestFn;

/// Renders serializable rows as CSV: a header from the first row's keys
/// (alphabetical, the JSON map order), then one line per row. Values are
/// JSON-atom formatted; strings containing a comma or quote are
/// double-quoted. Returns an empty string for no rows.
pub fn csv_lines<T: serde::Serialize>(rows: &[T]) -> String {
    let mut out = String::new();
    let mut header_done = false;
    for row in rows {
        let Ok(serde_json::Value::Object(map)) = serde_json::to_value(row) else {
            continue;
        };
        if !header_done {
            let keys: Vec<&str> = map.keys().map(String::as_str).collect();
            out.push_str(&keys.join(","));
            out.push('\n');
            header_done = true;
        }
        let cells: Vec<String> = map.values().map(csv_cell).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn csv_cell(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => {
            if s.contains(',') || s.contains('"') || s.contains('\n') {
                format!("\"{}\"", s.replace('"', "\"\""))
            } else {
                s.clone()
            }
        }
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Serialize;

    #[derive(Serialize)]
    #[serde(rename_all = "camelCase")]
    struct Demo {
        n: u32,
        label: String,
        value: f64,
    }

    #[test]
    fn csv_rendering_quotes_only_when_needed() {
        let rows = vec![
            Demo {
                n: 1,
                label: "plain".into(),
                value: 0.5,
            },
            Demo {
                n: 2,
                label: "with, comma".into(),
                value: -1.0,
            },
        ];
        let csv = csv_lines(&rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("label,n,value"));
        assert_eq!(lines.next(), Some("plain,1,0.5"));
        assert_eq!(lines.next(), Some("\"with, comma\",2,-1.0"));
        assert_eq!(lines.next(), None);
        assert_eq!(csv_lines::<Demo>(&[]), "");
    }
}
