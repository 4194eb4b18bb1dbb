use std::io::Write;

use serde::Serialize;

#[derive(Debug, Clone, PartialEq)]
pub enum Row {
    Values(Vec<f64>),
    /// A grid point that could not be evaluated; `key` is the first column.
    Error { key: f64, reason: String },
}

/// Tabular command output: CSV with a `#` provenance line, or JSON.
#[derive(Debug, Clone)]
pub struct Table {
    pub command: &'static str,
    pub flags: Vec<(&'static str, String)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Row>,
    /// Trailing notes, as `#` lines in CSV and a `notes` array in JSON.
    pub notes: Vec<String>,
}

#[derive(Serialize)]
struct JsonError<'a> {
    row: usize,
    key: f64,
    error: &'a str,
}

#[derive(Serialize)]
struct JsonTable<'a> {
    command: &'a str,
    flags: Vec<(&'a str, &'a str)>,
    columns: &'a [&'a str],
    rows: Vec<Vec<Option<f64>>>,
    errors: Vec<JsonError<'a>>,
    notes: &'a [String],
}

/// Twelve significant digits.
pub fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else {
        "NaN".into()
    }
}

impl Table {
    pub fn new(command: &'static str, flags: Vec<(&'static str, String)>, columns: Vec<&'static str>) -> Self {
        Self {
            command,
            flags,
            columns,
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn provenance(&self) -> String {
        let mut line = format!("# bimode {}", self.command);
        for (k, v) in &self.flags {
            line.push_str(&format!(" --{k} {v}"));
        }
        line
    }

    pub fn write_csv(&self, out: &mut dyn Write) -> std::io::Result<()> {
        writeln!(out, "{}", self.provenance())?;
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.rows {
            match row {
                Row::Values(v) => {
                    let cells: Vec<String> = v.iter().map(|&x| fmt_num(x)).collect();
                    writeln!(out, "{}", cells.join(","))?;
                }
                Row::Error { key, reason } => {
                    let mut cells = vec![fmt_num(*key)];
                    cells.resize(self.columns.len(), "NaN".into());
                    writeln!(out, "{}", cells.join(","))?;
                    writeln!(out, "# error: {reason}")?;
                }
            }
        }
        for note in &self.notes {
            writeln!(out, "# {note}")?;
        }
        Ok(())
    }

    pub fn write_json(&self, out: &mut dyn Write) -> std::io::Result<()> {
        let width = self.columns.len();
        let mut errors = Vec::new();
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, row)| match row {
                Row::Values(v) => v.iter().map(|&x| x.is_finite().then_some(x)).collect(),
                Row::Error { key, reason } => {
                    errors.push(JsonError {
                        row: i,
                        key: *key,
                        error: reason,
                    });
                    let mut v = vec![Some(*key)];
                    v.resize(width, None);
                    v
                }
            })
            .collect();
        let doc = JsonTable {
            command: self.command,
            flags: self.flags.iter().map(|(k, v)| (*k, v.as_str())).collect(),
            columns: &self.columns,
            rows,
            errors,
            notes: &self.notes,
        };
        serde_json::to_writer_pretty(&mut *out, &doc)?;
        writeln!(out)
    }
}
