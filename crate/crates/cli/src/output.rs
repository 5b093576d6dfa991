//! Output directory handling. Every file carries the resolved run config.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use helidot_core::cavity::SpectrumTrace;
use helidot_core::{Config, Error, Result};
use serde::Serialize;
use serde_json::{json, Value};

use crate::svg::{self, Plot};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

/// Everything that determines a run's outputs.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub args: Value,
    pub inputs: Vec<String>,
    pub out: Option<String>,
    pub seed: u64,
    pub formats: Vec<Format>,
    pub config_path: Option<String>,
    pub config: Config,
    pub version: &'static str,
}

pub struct Output {
    dir: Option<PathBuf>,
    formats: Vec<Format>,
    run: Value,
    written: Vec<String>,
}

impl Output {
    pub fn new(dir: Option<&Path>, run: &RunConfig) -> Result<Self> {
        if let Some(d) = dir {
            std::fs::create_dir_all(d)?;
        }
        Ok(Output {
            dir: dir.map(Path::to_path_buf),
            formats: run.formats.clone(),
            run: serde_json::to_value(run)?,
            written: Vec::new(),
        })
    }

    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    pub fn has_dir(&self) -> bool {
        self.dir.is_some()
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }

    fn put(&mut self, name: &str, body: &str) -> Result<()> {
        let dir = self
            .dir
            .as_ref()
            .ok_or_else(|| Error::Usage(format!("--out is required to write {name}")))?;
        let p = dir.join(name);
        std::fs::write(&p, body)?;
        self.written.push(p.display().to_string());
        Ok(())
    }

    /// Object `body` with a `run_config` key added.
    pub fn with_run(&self, body: Value) -> Value {
        let mut obj = match body {
            Value::Object(m) => m,
            other => {
                let mut m = serde_json::Map::new();
                m.insert("result".into(), other);
                m
            }
        };
        obj.insert("run_config".into(), self.run.clone());
        Value::Object(obj)
    }

    pub fn json(&mut self, name: &str, body: Value) -> Result<()> {
        let text = serde_json::to_string_pretty(&self.with_run(body))? + "\n";
        self.put(name, &text)
    }

    /// CSV preceded by a `# run_config: {...}` comment line.
    pub fn csv(&mut self, name: &str, body: &str) -> Result<()> {
        let text = format!("# run_config: {}\n{body}", serde_json::to_string(&self.run)?);
        self.put(name, &text)
    }

    pub fn svg(&mut self, name: &str, plot: &Plot) -> Result<()> {
        let meta = serde_json::to_string(&json!({ "run_config": self.run }))?;
        self.put(name, &svg::render(plot, &meta))
    }

    /// `<stem>.csv` plus the `<stem>.json` metadata sidecar.
    pub fn trace(&mut self, stem: &str, trace: &SpectrumTrace) -> Result<()> {
        self.csv(&format!("{stem}.csv"), &trace.to_csv_string())?;
        let meta = match &trace.metadata {
            Value::Null => json!({}),
            m => m.clone(),
        };
        self.json(&format!("{stem}.json"), meta)
    }
}
