use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::csvfmt::sig9;
use crate::{Error, Result};

/// Uniformly sampled output table; the first column is time.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesOutput {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl TimeSeriesOutput {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    /// CSV text: header row, 9 significant digits, LF line endings.
    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            for (k, v) in row.iter().enumerate() {
                if k > 0 {
                    s.push(',');
                }
                s.push_str(&sig9(*v));
            }
            s.push('\n');
        }
        s
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        f.write_all(self.to_csv().as_bytes())?;
        f.flush()?;
        Ok(())
    }

    pub fn parse_csv(text: &str) -> Result<TimeSeriesOutput> {
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let columns: Vec<String> = rdr
            .headers()
            .map_err(|e| Error::Parse(format!("output CSV header: {e}")))?
            .iter()
            .map(String::from)
            .collect();
        let mut rows = Vec::new();
        for (k, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse(format!("output CSV row {}: {e}", k + 2)))?;
            let row = rec
                .iter()
                .map(|v| v.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse(format!("output CSV row {}: {e}", k + 2)))?;
            rows.push(row);
        }
        Ok(TimeSeriesOutput { columns, rows })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColumnStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
}

pub fn column_stats(values: &[f64]) -> ColumnStats {
    let n = values.len().max(1) as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    ColumnStats {
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        mean,
        std: var.sqrt(),
    }
}

/// Energy bookkeeping over a run, in joules.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyAudit {
    pub aero_in: f64,
    pub external_in: f64,
    /// Energy delivered by the grid source into the line.
    pub source_in: f64,
    pub dissipated: f64,
    pub stored_start: f64,
    pub stored_end: f64,
}

impl EnergyAudit {
    pub fn residual(&self) -> f64 {
        (self.stored_end - self.stored_start)
            - (self.aero_in + self.external_in + self.source_in - self.dissipated)
    }

    /// Residual relative to the largest energy term.
    pub fn relative_residual(&self) -> f64 {
        let scale = [
            self.aero_in,
            self.external_in,
            self.source_in,
            self.dissipated,
            self.stored_end - self.stored_start,
        ]
        .iter()
        .fold(0.0f64, |a, v| a.max(v.abs()));
        if scale > 0.0 {
            self.residual().abs() / scale
        } else {
            0.0
        }
    }
}

/// Machine terminal balance: electrical input = copper loss + stored
/// magnetic change + mechanical output.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MachineAudit {
    pub electrical_in: f64,
    pub copper_loss: f64,
    pub mechanical_out: f64,
    pub magnetic_start: f64,
    pub magnetic_end: f64,
}

impl MachineAudit {
    pub fn residual(&self) -> f64 {
        self.electrical_in
            - self.copper_loss
            - self.mechanical_out
            - (self.magnetic_end - self.magnetic_start)
    }

    pub fn relative_residual(&self) -> f64 {
        let scale = self
            .electrical_in
            .abs()
            .max(self.mechanical_out.abs())
            .max(self.copper_loss.abs());
        if scale > 0.0 {
            self.residual().abs() / scale
        } else {
            0.0
        }
    }
}

/// Plain-text run summary: per-column statistics and the energy audits.
pub fn summarize(
    name: &str,
    output: &TimeSeriesOutput,
    audit: &EnergyAudit,
    machine: Option<&MachineAudit>,
) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "run: {name}");
    let _ = writeln!(s, "rows: {}", output.rows.len());
    let _ = writeln!(s);
    let _ = writeln!(
        s,
        "{:<24} {:>16} {:>16} {:>16} {:>16}",
        "column", "min", "max", "mean", "std"
    );
    for (k, c) in output.columns.iter().enumerate() {
        let col: Vec<f64> = output.rows.iter().map(|r| r[k]).collect();
        let st = column_stats(&col);
        let _ = writeln!(
            s,
            "{:<24} {:>16} {:>16} {:>16} {:>16}",
            c,
            sig9(st.min),
            sig9(st.max),
            sig9(st.mean),
            sig9(st.std)
        );
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "energy audit [J]");
    for (label, v) in [
        ("aerodynamic input", audit.aero_in),
        ("external torque input", audit.external_in),
        ("grid source input", audit.source_in),
        ("dissipated", audit.dissipated),
        ("stored at start", audit.stored_start),
        ("stored at end", audit.stored_end),
        ("residual", audit.residual()),
        ("relative residual", audit.relative_residual()),
    ] {
        let _ = writeln!(s, "  {label:<24} {}", sig9(v));
    }
    if let Some(m) = machine {
        let _ = writeln!(s);
        let _ = writeln!(s, "machine energy audit [J]");
        for (label, v) in [
            ("electrical input", m.electrical_in),
            ("copper loss", m.copper_loss),
            ("mechanical output", m.mechanical_out),
            ("magnetic change", m.magnetic_end - m.magnetic_start),
            ("residual", m.residual()),
            ("relative residual", m.relative_residual()),
        ] {
            let _ = writeln!(s, "  {label:<24} {}", sig9(v));
        }
    }
    s
}
