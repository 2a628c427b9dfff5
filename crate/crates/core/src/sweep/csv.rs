use std::fmt::Write as _;

/// Numeric table with a fixed header; serializes to comma-separated text with
/// LF line endings and 17 significant digits per value.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn new(header: Vec<String>) -> Self {
        CsvTable { header, rows: Vec::new() }
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Appends a record; panics if its width differs from the header.
    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.header.len(), "row width must match header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&format_number(*v));
            }
            out.push('\n');
        }
        out
    }
}

/// Scientific notation with 17 significant digits; negative zero prints as zero.
pub fn format_number(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    let mut s = String::new();
    write!(s, "{x:.16e}").expect("formatting into a String");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting() {
        assert_eq!(format_number(-0.0), "0.0000000000000000e0");
        assert_eq!(format_number(0.1), "1.0000000000000001e-1");
        assert_eq!(format_number(-2.5), "-2.5000000000000000e0");
        let parsed: f64 = format_number(std::f64::consts::PI).parse().unwrap();
        assert_eq!(parsed, std::f64::consts::PI);
    }

    #[test]
    fn table_text() {
        let mut t = CsvTable::new(vec!["a".into(), "b".into()]);
        t.push(vec![1.0, -0.0]);
        assert_eq!(t.to_csv(), "a,b\n1.0000000000000000e0,0.0000000000000000e0\n");
        assert_eq!(t.column("b"), Some(vec![-0.0]));
    }

    #[test]
    #[should_panic]
    fn ragged_rows_are_rejected() {
        CsvTable::new(vec!["a".into()]).push(vec![1.0, 2.0]);
    }
}
