use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use trilab::borel::Rational;

use crate::args::{Format, GlobalOpts};

pub const DEFAULT_M: usize = 16;
pub const DEFAULT_K: usize = 6;
pub const DEFAULT_C: usize = 4;

/// Everything that determines a run's output.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub inputs: Vec<String>,
    pub m: usize,
    pub k: usize,
    pub c: usize,
    pub tol: f64,
    pub eta: String,
    pub w_floor: usize,
    pub format: Format,
    pub seed: u64,
}

impl RunConfig {
    pub fn new(command: &str, opts: &GlobalOpts) -> Result<Self> {
        if !(opts.tol.is_finite() && opts.tol >= 0.0) {
            anyhow::bail!("--tol must be a nonnegative number (got {})", opts.tol);
        }
        if opts.wfloor == 0 {
            anyhow::bail!("--wfloor must be at least 1");
        }
        let eta = parse_eta(&opts.eta)?;
        Ok(Self {
            command: command.to_string(),
            inputs: Vec::new(),
            m: opts.m.unwrap_or(DEFAULT_M),
            k: opts.k.unwrap_or(DEFAULT_K),
            c: opts.c.unwrap_or(DEFAULT_C),
            tol: opts.tol,
            eta: eta.to_string(),
            w_floor: opts.wfloor,
            format: opts.format,
            seed: opts.seed,
        })
    }

    pub fn eta(&self) -> Rational {
        self.eta.parse().expect("validated on construction")
    }

    pub fn input(&mut self, path: &Path) {
        self.inputs.push(path.display().to_string());
    }
}

fn parse_eta(text: &str) -> Result<Rational> {
    let eta: Rational = text.trim().parse().map_err(|_| anyhow::anyhow!("--eta must be a rational such as 1/8 (got {text:?})"))?;
    if eta < Rational::from_integer(0) || eta > Rational::from_integer(1) {
        anyhow::bail!("--eta must lie in [0, 1] (got {eta})");
    }
    Ok(eta)
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    config: &'a RunConfig,
    passed: bool,
    result: &'a T,
}

/// Writes the main report and side files, either into `--out` or stdout.
pub struct Sink {
    dir: Option<PathBuf>,
}

impl Sink {
    pub fn new(dir: Option<PathBuf>) -> Result<Self> {
        if let Some(d) = &dir {
            fs::create_dir_all(d).with_context(|| format!("create {}", d.display()))?;
        }
        Ok(Self { dir })
    }

    /// A side file; skipped when reports go to stdout.
    pub fn file(&self, name: &str, contents: &str) -> Result<()> {
        if let Some(d) = &self.dir {
            let path = d.join(name);
            fs::write(&path, contents).with_context(|| format!("write {}", path.display()))?;
        }
        Ok(())
    }

    fn main(&self, name: &str, contents: &str) -> Result<()> {
        match &self.dir {
            Some(_) => self.file(name, contents),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(contents.as_bytes())?;
                out.flush()?;
                Ok(())
            }
        }
    }

    pub fn json<T: Serialize>(&self, config: &RunConfig, passed: bool, result: &T) -> Result<()> {
        let env = Envelope { tool: "trilab", version: trilab::VERSION, config, passed, result };
        let mut text = serde_json::to_string_pretty(&env)?;
        text.push('\n');
        self.main("report.json", &text)
    }

    /// CSV with the run configuration in leading `#` lines.
    pub fn csv(&self, config: &RunConfig, body: &str) -> Result<()> {
        let text = format!("# trilab {}\n# config {}\n{body}", trilab::VERSION, serde_json::to_string(config)?);
        self.main("report.csv", &text)
    }
}
