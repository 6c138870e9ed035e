//! Tabular results and their CSV form.

use std::io::Write;

use crate::config::ExperimentConfig;
use crate::error::HarnessError;

/// Two-sided normal quantile for the 95% intervals.
pub const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v}"),
            Cell::Int(v) => format!("{v}"),
            Cell::Text(v) => v.clone(),
            Cell::Empty => String::new(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

/// One table: a header row and data rows sorted by the sweep axes.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub name: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Extra `# key: value` header lines.
    pub notes: Vec<(String, String)>,
    pub wall_time: f64,
}

impl SweepReport {
    pub fn new(name: &'static str, columns: Vec<&'static str>) -> Self {
        SweepReport {
            name,
            columns,
            rows: Vec::new(),
            notes: Vec::new(),
            wall_time: 0.0,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, key: impl Into<String>, value: impl ToString) {
        self.notes.push((key.into(), value.to_string()));
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    /// Values of column `name`, `None` where the cell is empty.
    pub fn values(&self, name: &str) -> Vec<Option<f64>> {
        let i = self.column(name).unwrap_or_else(|| panic!("no column {name}"));
        self.rows.iter().map(|r| r[i].as_f64()).collect()
    }

    /// Writes header comments followed by RFC 4180 CSV.
    pub fn write_csv<W: Write>(&self, config: &ExperimentConfig, mut out: W) -> Result<(), HarnessError> {
        let mut head = vec![
            ("report".to_string(), self.name.to_string()),
            ("tool".into(), format!("hetnet {}", env!("CARGO_PKG_VERSION"))),
            ("seed".into(), config.seed.to_string()),
            ("config_sha256".into(), config.hash()),
            ("mode".into(), config.mode.to_string()),
            ("confidence".into(), "0.95 (normal approximation over trial means)".into()),
        ];
        head.extend(self.notes.iter().cloned());
        head.push(("wall_time_s".into(), format!("{:.3}", self.wall_time)));
        for (k, v) in &head {
            write!(out, "# {k}: {v}\r\n")?;
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self, config: &ExperimentConfig) -> Result<String, HarnessError> {
        let mut buf = Vec::new();
        self.write_csv(config, &mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
    }
}

/// Lines of a CSV document that are not `#` comments.
pub fn data_lines(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).collect()
}

/// Sample mean and 95% half-width.
pub fn mean_ci(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, Z_95 * (var / n).sqrt())
}

/// Relative reduction `1 − mean(on)/mean(off)` over paired trials with a
/// delta-method 95% half-width.
pub fn paired_reduction(off: &[f64], on: &[f64]) -> (f64, f64) {
    assert_eq!(off.len(), on.len());
    let n = off.len() as f64;
    let m_off = off.iter().sum::<f64>() / n;
    let m_on = on.iter().sum::<f64>() / n;
    if m_off == 0.0 {
        return (f64::NAN, f64::NAN);
    }
    let ratio = m_on / m_off;
    if off.len() < 2 {
        return (1.0 - ratio, f64::NAN);
    }
    let var = off
        .iter()
        .zip(on)
        .map(|(a, b)| (b - ratio * a).powi(2))
        .sum::<f64>()
        / (n - 1.0);
    (1.0 - ratio, Z_95 * (var / n).sqrt() / m_off)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ci_of_constant_is_zero() {
        assert_eq!(mean_ci(&[2.0, 2.0, 2.0]), (2.0, 0.0));
        assert!(mean_ci(&[1.0]).1.is_nan());
    }

    #[test]
    fn ci_matches_hand_value() {
        let (m, h) = mean_ci(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        // s² = 5/3, n = 4
        assert!((h - Z_95 * (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn paired_reduction_of_halving() {
        let off = [2.0, 4.0, 6.0];
        let on = [1.0, 2.0, 3.0];
        let (r, h) = paired_reduction(&off, &on);
        assert!((r - 0.5).abs() < 1e-15);
        assert!(h.abs() < 1e-15);
    }

    #[test]
    fn csv_quotes_and_comments() {
        let mut rep = SweepReport::new("t", vec!["a", "b"]);
        rep.push(vec![Cell::Text("x,y".into()), Cell::Empty]);
        rep.push(vec![Cell::Num(0.1), Cell::Int(3)]);
        let cfg = ExperimentConfig::defaults();
        let s = rep.to_csv_string(&cfg).unwrap();
        assert!(s.starts_with("# report: t\r\n"));
        assert_eq!(data_lines(&s), vec!["a,b", "\"x,y\",", "0.1,3"]);
        assert!(s.contains(&format!("# config_sha256: {}", cfg.hash())));
    }
}
