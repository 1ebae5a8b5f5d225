//! Per-method quality report with CSV and JSON serialization.

use std::io::Write;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QualityRow {
    pub method: String,
    pub width: usize,
    pub height: usize,
    pub time_ms: f64,
    pub gradient_energy: f64,
    /// PSNR against `psnr_reference`; infinite PSNR serializes as `"inf"`.
    #[serde(serialize_with = "serialize_psnr")]
    pub psnr_db: Option<f64>,
    pub psnr_reference: Option<String>,
}

fn serialize_psnr<S: Serializer>(value: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match value {
        Some(v) if v.is_infinite() => s.serialize_str("inf"),
        Some(v) => s.serialize_f64(*v),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct QualityReport {
    pub rows: Vec<QualityRow>,
}

impl QualityReport {
    pub fn push(&mut self, row: QualityRow) {
        self.rows.push(row);
    }

    pub fn row(&self, method: &str) -> Option<&QualityRow> {
        self.rows.iter().find(|r| r.method == method)
    }

    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        if self.rows.is_empty() {
            writer
                .write_record([
                    "method",
                    "width",
                    "height",
                    "time_ms",
                    "gradient_energy",
                    "psnr_db",
                    "psnr_reference",
                ])
                .map_err(|e| Error::Report(e.to_string()))?;
        }
        for row in &self.rows {
            writer.serialize(row).map_err(|e| Error::Report(e.to_string()))?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn write_json(&self, mut out: impl Write) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, &self.rows).map_err(|e| Error::Report(e.to_string()))?;
        writeln!(out)?;
        Ok(())
    }
}
