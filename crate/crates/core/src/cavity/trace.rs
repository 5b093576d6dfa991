use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::Path;

use crate::potential::grid::strictly_increasing;
use crate::{Error, Result};

/// Complex transmission sampled on a probe-frequency axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTrace {
    /// Probe frequencies (rad/s), strictly increasing.
    pub probe_freqs: Vec<f64>,
    pub s21: Vec<C64>,
    #[serde(default)]
    pub metadata: serde_json::Value,
}

const HEADER: &str = "freq_GHz,re_s21,im_s21";

impl SpectrumTrace {
    pub fn new(probe_freqs: Vec<f64>, s21: Vec<C64>) -> Result<Self> {
        let t = SpectrumTrace {
            probe_freqs,
            s21,
            metadata: serde_json::Value::Null,
        };
        t.validate()?;
        Ok(t)
    }

    /// `n` evenly spaced probe points on [lo, hi] (rad/s) with `f` sampled on them.
    pub fn sample(lo: f64, hi: f64, n: usize, mut f: impl FnMut(f64) -> Result<C64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::usage("a trace needs at least two points"));
        }
        let freqs: Vec<f64> = (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect();
        let s21 = freqs.iter().map(|&w| f(w)).collect::<Result<Vec<_>>>()?;
        Self::new(freqs, s21)
    }

    pub fn with_metadata(mut self, metadata: serde_json::Value) -> Self {
        self.metadata = metadata;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.probe_freqs.len() != self.s21.len() {
            return Err(Error::usage("frequency axis and S21 lengths differ"));
        }
        if !strictly_increasing(&self.probe_freqs) {
            return Err(Error::usage("probe frequencies must be finite and strictly increasing"));
        }
        if self.s21.iter().any(|s| !(s.re.is_finite() && s.im.is_finite())) {
            return Err(Error::usage("non-finite S21 sample"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.s21.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s21.is_empty()
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.s21.iter().map(|s| s.norm()).collect()
    }

    pub fn same_axis(&self, other: &SpectrumTrace) -> bool {
        self.probe_freqs.len() == other.probe_freqs.len()
            && self
                .probe_freqs
                .iter()
                .zip(&other.probe_freqs)
                .all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()))
    }

    /// CSV with a `freq_GHz,re_s21,im_s21` header; frequencies are cyclic GHz.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::with_capacity(self.len() * 64);
        out.push_str(HEADER);
        out.push('\n');
        for (w, s) in self.probe_freqs.iter().zip(&self.s21) {
            let _ = writeln!(out, "{},{},{}", w / TAU * 1e-9, s.re, s.im);
        }
        out
    }

    /// Blank lines and `#` comment lines are skipped.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::format(None, "empty trace file"))?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        if cols != ["freq_GHz", "re_s21", "im_s21"] {
            return Err(Error::format(None, format!("unexpected trace header '{header}'")));
        }
        let mut freqs = Vec::new();
        let mut s21 = Vec::new();
        for (k, line) in lines.enumerate() {
            let vals: Vec<f64> = line
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::format(None, format!("data row {}: {e}", k + 1)))?;
            if vals.len() != 3 {
                return Err(Error::format(None, format!("data row {}: expected 3 columns", k + 1)));
            }
            freqs.push(vals[0] * 1e9 * TAU);
            s21.push(C64::new(vals[1], vals[2]));
        }
        Self::new(freqs, s21).map_err(|e| Error::format(None, e.to_string()))
    }

    /// Writes `<stem>.csv` and the metadata sidecar `<stem>.json`.
    pub fn write(&self, csv_path: impl AsRef<Path>) -> Result<()> {
        let csv_path = csv_path.as_ref();
        std::fs::write(csv_path, self.to_csv_string())?;
        let meta = serde_json::to_string_pretty(&self.metadata)?;
        std::fs::write(csv_path.with_extension("json"), meta + "\n")?;
        Ok(())
    }

    /// Reads a trace CSV and, if present, its JSON sidecar.
    pub fn read(csv_path: impl AsRef<Path>) -> Result<Self> {
        let csv_path = csv_path.as_ref();
        let mut t = Self::from_csv_str(&std::fs::read_to_string(csv_path)?)?;
        let side = csv_path.with_extension("json");
        if side.exists() {
            t.metadata = serde_json::from_str(&std::fs::read_to_string(side)?)?;
        }
        Ok(t)
    }
}
