//! Comparison tables in aligned text and CSV.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::harness::eval::{EvalSummary, Stat};

pub const HEADERS: [&str; 5] = ["Env", "Test", "t_air (s)", "t_water (s)", "Success"];

/// One CSV row; absent statistics are empty fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub env: String,
    pub test: String,
    pub t_air_mean: Option<String>,
    pub t_air_std: Option<String>,
    pub t_water_mean: Option<String>,
    pub t_water_std: Option<String>,
    pub success: u32,
    pub trials: u32,
}

fn fixed(x: f64) -> String {
    format!("{x:.2}")
}

/// `mean ± std` to two decimals, or `-` when there were no successes.
pub fn format_stat(s: Option<Stat>) -> String {
    match s {
        Some(s) => format!("{} ± {}", fixed(s.mean), fixed(s.std)),
        None => "-".into(),
    }
}

pub fn test_label(s: &EvalSummary) -> String {
    format!("{} {}", s.task, s.agent)
}

pub fn csv_row(s: &EvalSummary) -> CsvRow {
    CsvRow {
        env: s.env.clone(),
        test: test_label(s),
        t_air_mean: s.t_air.map(|x| fixed(x.mean)),
        t_air_std: s.t_air.map(|x| fixed(x.std)),
        t_water_mean: s.t_water.map(|x| fixed(x.mean)),
        t_water_std: s.t_water.map(|x| fixed(x.std)),
        success: s.successes,
        trials: s.trials,
    }
}

pub fn table_cells(s: &EvalSummary) -> [String; 5] {
    [
        s.env.clone(),
        test_label(s),
        format_stat(s.t_air),
        format_stat(s.t_water),
        s.successes.to_string(),
    ]
}

/// Column-aligned text table, one row per summary.
pub fn render_text(summaries: &[EvalSummary]) -> String {
    let rows: Vec<[String; 5]> = summaries.iter().map(table_cells).collect();
    let mut widths = HEADERS.map(|h| h.chars().count());
    for r in &rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: Vec<&str>| -> String {
        let padded: Vec<String> = cells
            .iter()
            .zip(widths)
            .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        padded.join("  ").trim_end().to_string()
    };
    let mut out = line(HEADERS.to_vec());
    out.push('\n');
    let total: usize = widths.iter().sum::<usize>() + 2 * (widths.len() - 1);
    out.push_str(&"-".repeat(total));
    out.push('\n');
    for r in &rows {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
        out.push('\n');
    }
    out
}

pub fn render_csv(summaries: &[EvalSummary]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for s in summaries {
        w.serialize(csv_row(s))?;
    }
    let bytes = w.into_inner().map_err(|e| crate::error::Error::io("<csv>", e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.deserialize().map(|row| row.map_err(Into::into)).collect()
}

/// Text table and CSV with identical values.
pub fn emit_table(summaries: &[EvalSummary]) -> Result<(String, String)> {
    Ok((render_text(summaries), render_csv(summaries)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn det() -> EvalSummary {
        EvalSummary {
            env: "1".into(),
            task: "A-W".into(),
            agent: "Det.".into(),
            trials: 100,
            successes: 94,
            t_air: Some(Stat { mean: 76.28, std: 63.20 }),
            t_water: Some(Stat { mean: 12.51, std: 20.71 }),
        }
    }

    #[test]
    fn stat_cells() {
        assert_eq!(format_stat(Some(Stat { mean: 76.28, std: 63.2 })), "76.28 ± 63.20");
        assert_eq!(format_stat(None), "-");
    }

    #[test]
    fn csv_round_trip() {
        let mut empty = det();
        empty.successes = 0;
        empty.t_air = None;
        empty.t_water = None;
        let rows = [det(), empty];
        let parsed = parse_csv(&render_csv(&rows).unwrap()).unwrap();
        assert_eq!(parsed, rows.iter().map(csv_row).collect::<Vec<_>>());
        assert_eq!(parsed[1].t_air_mean, None);
    }
}
