//! CSV/JSON writers. Every data file gets a `<name>.meta.json` sidecar.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, Result};

pub const VERSION: &str = concat!("kpo ", env!("CARGO_PKG_VERSION"));

/// Full-precision float cell (17 significant digits).
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Column suffix for an averaging time, e.g. `0.1` or `0.0001`.
pub fn ta_label(t_a: f64) -> String {
    format!("{t_a}")
}

fn write_error(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Write {
        path: path.to_owned(),
        source,
    }
}

#[derive(Serialize)]
struct Meta<'a> {
    tool: &'static str,
    command: &'a str,
    data_file: &'a str,
    seed: u64,
    config: &'a RunConfig,
}

/// Where outputs go and the provenance recorded next to them.
pub struct Sink<'a> {
    pub dir: PathBuf,
    pub command: &'a str,
    pub config: &'a RunConfig,
}

impl Sink<'_> {
    fn prepare(&self, name: &str) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir).map_err(write_error(&self.dir))?;
        Ok(self.dir.join(name))
    }

    fn sidecar(&self, name: &str) -> Result<()> {
        let meta = Meta {
            tool: VERSION,
            command: self.command,
            data_file: name,
            seed: self.config.seed,
            config: self.config,
        };
        let path = self.dir.join(format!("{name}.meta.json"));
        let text = serde_json::to_string_pretty(&meta).expect("metadata serializes");
        fs::write(&path, text + "\n").map_err(write_error(&path))
    }

    pub fn json(&self, name: &str, value: &impl Serialize) -> Result<PathBuf> {
        let path = self.prepare(name)?;
        let text = serde_json::to_string_pretty(value).expect("output serializes");
        fs::write(&path, text + "\n").map_err(write_error(&path))?;
        self.sidecar(name)?;
        Ok(path)
    }

    /// Writes `header` then every row produced by `rows`.
    pub fn csv<I>(&self, name: &str, header: &[String], rows: I) -> Result<PathBuf>
    where
        I: IntoIterator<Item = Vec<String>>,
    {
        let path = self.prepare(name)?;
        let file = File::create(&path).map_err(write_error(&path))?;
        let mut out = csv::Writer::from_writer(BufWriter::new(file));
        let csv_error = |e: csv::Error| CliError::Write {
            path: path.clone(),
            source: e.into(),
        };
        out.write_record(header).map_err(csv_error)?;
        for row in rows {
            out.write_record(&row).map_err(csv_error)?;
        }
        let mut inner = out.into_inner().map_err(|e| CliError::Write {
            path: path.clone(),
            source: e.into_error(),
        })?;
        inner.flush().map_err(write_error(&path))?;
        self.sidecar(name)?;
        Ok(path)
    }
}
