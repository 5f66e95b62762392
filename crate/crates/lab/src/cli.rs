//! `ffwd` command line: flags or a JSON config file, one subcommand per
//! experiment.
//!
//! Exit status is 0 when every verdict passes, 1 when any fails or the run
//! itself breaks, 2 on usage errors and invalid parameters.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::Parser;

use crate::config::{default_seed, ConfigFile, Experiment, Format, ToleranceProfile};
use crate::experiments::run_experiment;
use crate::LabError;

#[derive(Debug, Parser)]
#[command(name = "ffwd", version, about = "Seeded fast-forwarding and energy-measurement experiments")]
pub struct Cli {
    /// Master seed; every trial draws from its own derived stream.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Trial count; each experiment has its own default.
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true, value_enum)]
    pub tolerance_profile: Option<ToleranceProfile>,
    /// JSON config file with the same fields as the flags; flags given on
    /// the command line take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub experiment: Option<Experiment>,
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

impl Cli {
    /// Merges flags over the config file, if any.
    pub fn resolve(self) -> Result<ConfigFile, LabError> {
        let mut file = match &self.config {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| LabError::Format(format!("cannot read {}: {e}", p.display())))?;
                let mut f: ConfigFile = serde_json::from_str(&text)?;
                if let Some(e) = self.experiment.clone() {
                    f.experiment = e;
                }
                f
            }
            None => {
                let experiment = self.experiment.clone().ok_or_else(|| LabError::invalid("a subcommand or --config is required"))?;
                ConfigFile { experiment, seed: default_seed(), trials: None, tolerance_profile: ToleranceProfile::Default, format: Format::Json, out: None }
            }
        };
        if let Some(s) = self.seed {
            file.seed = s;
        }
        if self.trials.is_some() {
            file.trials = self.trials;
        }
        if let Some(f) = self.format {
            file.format = f;
        }
        if let Some(t) = self.tolerance_profile {
            file.tolerance_profile = t;
        }
        if self.out.is_some() {
            file.out = self.out;
        }
        Ok(file)
    }
}

/// Parses `args` (program name first), runs the experiment, writes the
/// report, and returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_usage() {
                EXIT_USAGE
            } else {
                EXIT_FAIL
            }
        }
    }
}

fn execute(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, LabError> {
    let file = cli.resolve()?;
    let cfg = file.resolve();
    let report = run_experiment(&cfg)?;
    match &file.out {
        Some(p) => report.emit(file.format, p)?,
        None => stdout.write_all(report.encode(file.format)?.as_bytes())?,
    }
    for v in report.all_verdicts() {
        writeln!(stderr, "{} {}: {}", if v.passed { "PASS" } else { "FAIL" }, v.criterion, v.detail)?;
    }
    Ok(if report.passed() { EXIT_PASS } else { EXIT_FAIL })
}
