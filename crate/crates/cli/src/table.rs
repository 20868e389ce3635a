//! CSV output with 17 significant digits, which round-trips every `f64`.

use std::fmt::Write;

pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.header.len(), "row width");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            for (j, v) in row.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                if v.is_nan() {
                    out.push_str("NaN");
                } else {
                    write!(out, "{v:.16e}").expect("writing to a string");
                }
            }
            out.push('\n');
        }
        out
    }
}
