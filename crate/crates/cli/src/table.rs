//! CSV tables with a commented TOML metadata header.
//!
//! Layout: a marker line, `#`-prefixed TOML lines holding the resolved spec
//! and a `[meta]` table, one header row, then rows of `{:.16e}` floats.

use std::fmt::Write as _;

pub const METADATA_MARKER: &str = "# qnd-cli table v1";

#[derive(Debug, Clone, PartialEq)]
pub struct OutputTable {
    /// TOML text, one entry per metadata line, without the `#` prefix.
    pub metadata: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, thiserror::Error)]
pub enum TableError {
    #[error("missing metadata marker line")]
    MissingMarker,
    #[error("missing header row")]
    MissingHeader,
    #[error("empty column name in header")]
    EmptyColumn,
    #[error("line {line}: invalid number `{text}`")]
    BadNumber { line: u64, text: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl OutputTable {
    pub fn new(metadata: String, columns: Vec<String>) -> Self {
        OutputTable {
            metadata,
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(METADATA_MARKER);
        out.push('\n');
        for line in self.metadata.lines() {
            if line.is_empty() {
                out.push_str("#\n");
            } else {
                let _ = writeln!(out, "# {line}");
            }
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out.into_bytes());
        let written = w.write_record(&self.columns).and_then(|_| {
            self.rows
                .iter()
                .try_for_each(|row| w.write_record(row.iter().map(|v| format!("{v:.16e}"))))
        });
        written.expect("writing to memory cannot fail");
        let bytes = w.into_inner().expect("flushing to memory cannot fail");
        String::from_utf8(bytes).expect("csv output is UTF-8")
    }

    pub fn parse(text: &str) -> Result<Self, TableError> {
        let (metadata, offset, meta_lines) = split_metadata(text)?;
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(&text.as_bytes()[offset..]);
        let columns: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
        if columns.is_empty() {
            return Err(TableError::MissingHeader);
        }
        if columns.iter().any(String::is_empty) {
            return Err(TableError::EmptyColumn);
        }
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record?;
            let line = meta_lines as u64 + record.position().map_or(0, |p| p.line());
            let row = record
                .iter()
                .map(|f| {
                    f.parse::<f64>().map_err(|_| TableError::BadNumber {
                        line,
                        text: f.to_owned(),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        Ok(OutputTable {
            metadata,
            columns,
            rows,
        })
    }
}

/// Metadata TOML, byte offset of the header row and number of lines
/// before it.
pub(crate) fn split_metadata(text: &str) -> Result<(String, usize, usize), TableError> {
    let mut lines = text.split_inclusive('\n');
    let mut offset = match lines.next() {
        Some(l) if l.trim_end() == METADATA_MARKER => l.len(),
        _ => return Err(TableError::MissingMarker),
    };
    let mut metadata = String::new();
    let mut count = 1;
    for l in lines {
        let Some(body) = l.strip_prefix('#') else {
            break;
        };
        let body = body.trim_end_matches(['\n', '\r']);
        metadata.push_str(body.strip_prefix(' ').unwrap_or(body));
        metadata.push('\n');
        offset += l.len();
        count += 1;
    }
    Ok((metadata, offset, count))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> OutputTable {
        let mut t = OutputTable::new(
            "mode = \"bell\"\nphi = 0.5\n\n[meta]\nn_max = 3\n".into(),
            vec!["a".into(), "b".into()],
        );
        t.push_row(vec![0.1, -2.5e-300]);
        t.push_row(vec![f64::NAN, 1.0 / 3.0]);
        t
    }

    #[test]
    fn floats_carry_seventeen_digits() {
        let csv = sample().to_csv();
        assert!(csv.contains("1.0000000000000001e-1,-2.5000000000000000e-300\n"));
        assert!(csv.contains("NaN,3.3333333333333331e-1\n"));
    }

    #[test]
    fn round_trip_is_exact() {
        let t = sample();
        let back = OutputTable::parse(&t.to_csv()).unwrap();
        assert_eq!(back.metadata, t.metadata);
        assert_eq!(back.columns, t.columns);
        assert_eq!(back.rows[0], t.rows[0]);
        assert!(back.rows[1][0].is_nan());
        assert_eq!(back.rows[1][1], t.rows[1][1]);
        assert_eq!(back.to_csv(), t.to_csv());
    }

    #[test]
    fn rejects_malformed_tables() {
        assert!(matches!(
            OutputTable::parse("a,b\n1,2\n"),
            Err(TableError::MissingMarker)
        ));
        let head = format!("{METADATA_MARKER}\n# x = 1\n");
        assert!(matches!(
            OutputTable::parse(&head),
            Err(TableError::MissingHeader)
        ));
        assert!(matches!(
            OutputTable::parse(&format!("{head}a,b\n1\n")),
            Err(TableError::Csv(_))
        ));
        assert!(matches!(
            OutputTable::parse(&format!("{head}a,b\n1,z\n")),
            Err(TableError::BadNumber { line: 4, .. })
        ));
        assert!(matches!(
            OutputTable::parse(&format!("{head}a,,b\n")),
            Err(TableError::EmptyColumn)
        ));
    }
}
