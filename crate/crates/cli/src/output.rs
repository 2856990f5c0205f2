use serde_json::Value;
use std::io::Write;

use crate::args::Format;

/// 17 significant digits, enough to round-trip any f64.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// A command's output in all three encodings.
pub struct Report {
    json: Value,
    header: Vec<&'static str>,
    records: Vec<Vec<String>>,
}

impl Report {
    pub fn rows(json: Value, header: Vec<&'static str>, records: Vec<Vec<String>>) -> Self {
        Report { json, header, records }
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, &self.json)?;
                writeln!(out)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.header)?;
                for r in &self.records {
                    w.write_record(r)?;
                }
                w.flush()
            }
            Format::Table => {
                let mut width: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
                for r in &self.records {
                    for (w, c) in width.iter_mut().zip(r) {
                        *w = (*w).max(c.chars().count());
                    }
                }
                let line = |cells: Vec<&str>| -> String {
                    cells
                        .iter()
                        .zip(&width)
                        .map(|(c, w)| format!("{c:<w$}"))
                        .collect::<Vec<_>>()
                        .join("  ")
                        .trim_end()
                        .to_string()
                };
                writeln!(out, "{}", line(self.header.clone()))?;
                for r in &self.records {
                    writeln!(out, "{}", line(r.iter().map(String::as_str).collect()))?;
                }
                Ok(())
            }
        }
    }
}
