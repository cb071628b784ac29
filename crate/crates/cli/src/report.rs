use std::error::Error;
use std::fs;
use std::path::{Path, PathBuf};

use delsarte_core::io::{self, Conventions};
use delsarte_core::FiniteGroup;
use serde::Serialize;

use crate::ModeArg;

pub type CmdResult = Result<bool, Box<dyn Error>>;

pub struct Ctx {
    pub seed: u64,
    pub mode: ModeArg,
    pub tol: Option<f64>,
    pub out: PathBuf,
}

/// Run parameters stamped into every report.
#[derive(Serialize)]
pub struct RunInfo {
    pub command: &'static str,
    pub inputs: Vec<String>,
    pub seed: u64,
    pub mode: &'static str,
    pub cross_check_tolerance: f64,
}

impl Ctx {
    pub fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    pub fn run_info(&self, command: &'static str, inputs: Vec<String>, tolerance: f64) -> RunInfo {
        RunInfo {
            command,
            inputs,
            seed: self.seed,
            mode: self.mode.name(),
            cross_check_tolerance: tolerance,
        }
    }

    pub fn conventions(&self) -> Conventions {
        Conventions::new(self.seed)
    }

    fn path(&self, name: &str) -> Result<PathBuf, Box<dyn Error>> {
        fs::create_dir_all(&self.out)?;
        Ok(self.out.join(name))
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf, Box<dyn Error>> {
        let path = self.path(name)?;
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(&path, text)?;
        Ok(path)
    }

    pub fn write_csv<T: Serialize>(&self, name: &str, rows: &[T]) -> Result<PathBuf, Box<dyn Error>> {
        let path = self.path(name)?;
        let mut w = csv::Writer::from_path(&path)?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(path)
    }

    pub fn write_text(&self, name: &str, text: &str) -> Result<PathBuf, Box<dyn Error>> {
        let path = self.path(name)?;
        fs::write(&path, text)?;
        Ok(path)
    }
}

/// A path to a group file, or inline JSON when no such file exists.
pub fn load_group_arg(arg: &str) -> Result<FiniteGroup, Box<dyn Error>> {
    let path = Path::new(arg);
    if path.exists() {
        Ok(io::load_group(path)?)
    } else if arg.trim_start().starts_with('{') {
        Ok(io::parse_group(arg)?)
    } else {
        Err(format!("group file {arg:?} not found").into())
    }
}

pub fn verdict(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAILED"
    }
}
