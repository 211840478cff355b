use std::io::{self, Write};

/// Plot-ready table: `#`-prefixed metadata lines, a header row with `t`
/// first, then one row per sample time.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioReport {
    pub metadata: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_cell(v: f64) -> String {
    format!("{v:.16e}")
}

impl ScenarioReport {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        for line in &self.metadata {
            writeln!(w, "# {line}")?;
        }
        writeln!(w, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| format_cell(v)).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("report is ASCII")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cells_round_trip() {
        for v in [0.0, -1.0, 0.1 + 0.2, 1e-300, f64::MAX, -2.5e-17] {
            let s = format_cell(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
        assert_eq!(format_cell(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn layout() {
        let r = ScenarioReport {
            metadata: vec!["hello".into()],
            columns: vec!["t".into(), "a".into()],
            rows: vec![vec![0.0, 1.0], vec![0.5, -2.0]],
        };
        assert_eq!(
            r.to_csv(),
            "# hello\nt,a\n0.0000000000000000e0,1.0000000000000000e0\n\
             5.0000000000000000e-1,-2.0000000000000000e0\n"
        );
        assert_eq!(r.column("a"), Some(vec![1.0, -2.0]));
        assert_eq!(r.column("b"), None);
    }
}
