//! JSON-lines telemetry on stdout (and in `telemetry.jsonl`), CSV summaries in
//! `summary.csv` or on stderr.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

pub struct Reporter {
    out: Option<PathBuf>,
    telemetry: Option<BufWriter<File>>,
    stdout: io::StdoutLock<'static>,
}

impl Reporter {
    pub fn new(out: Option<&Path>) -> Result<Self, CliError> {
        let telemetry = match out {
            Some(dir) => {
                fs::create_dir_all(dir)?;
                Some(BufWriter::new(File::create(dir.join("telemetry.jsonl"))?))
            }
            None => None,
        };
        Ok(Reporter { out: out.map(Path::to_path_buf), telemetry, stdout: io::stdout().lock() })
    }

    /// One telemetry record.
    pub fn record<T: Serialize>(&mut self, rec: &T) -> Result<(), CliError> {
        let line = serde_json::to_string(rec)?;
        writeln!(self.stdout, "{line}")?;
        if let Some(f) = &mut self.telemetry {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }

    pub fn summary<T: Serialize>(&mut self, rows: &[T]) -> Result<(), CliError> {
        let sink: Box<dyn Write> = match &self.out {
            Some(dir) => Box::new(File::create(dir.join("summary.csv"))?),
            None => Box::new(io::stderr()),
        };
        let mut w = csv::Writer::from_writer(sink);
        for row in rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes `name` under the output directory; returns whether it was written.
    pub fn artifact(&self, name: &str, contents: &str) -> Result<bool, CliError> {
        match &self.out {
            Some(dir) => {
                fs::write(dir.join(name), contents)?;
                Ok(true)
            }
            None => Ok(false),
        }
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.stdout.flush()?;
        if let Some(f) = &mut self.telemetry {
            f.flush()?;
        }
        Ok(())
    }
}
