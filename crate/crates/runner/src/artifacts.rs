use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use burgers3d::analysis::{BoundReport, CheckMode, Verdict};
use burgers3d::dynamics::{RunConfig, TrajectoryHandle};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentSpec;
use crate::experiment::ExperimentRegistry;
use crate::RunnerError;

/// A report together with the sweep member it belongs to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberReport {
    pub member: String,
    pub report: BoundReport,
}

/// Output directory of one experiment. File writers take `&self` so that
/// sweep members can write their own subdirectories concurrently; reports
/// and summary lines are collected afterwards.
#[derive(Debug)]
pub struct Artifacts {
    root: PathBuf,
    reports: Vec<MemberReport>,
    lines: Vec<String>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunnerError + '_ {
    move |source| RunnerError::Io { path: path.to_owned(), source }
}

impl Artifacts {
    pub fn new(root: &Path) -> Result<Self, RunnerError> {
        fs::create_dir_all(root).map_err(io_err(root))?;
        Ok(Self { root: root.to_owned(), reports: Vec::new(), lines: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// `root/member`, created if needed.
    pub fn member_dir(&self, member: &str) -> Result<PathBuf, RunnerError> {
        let dir = self.root.join(member);
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        Ok(dir)
    }

    pub fn write_csv<T: Serialize>(&self, rel: &str, rows: &[T]) -> Result<(), RunnerError> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(io_err(parent))?;
        }
        let file = fs::File::create(&path).map_err(io_err(&path))?;
        burgers3d::io::write_csv(std::io::BufWriter::new(file), rows)?;
        Ok(())
    }

    /// Diagnostics, snapshots and the member's resolved `run.toml`.
    pub fn write_trajectory(&self, member: &str, traj: &TrajectoryHandle) -> Result<(), RunnerError> {
        let dir = self.member_dir(member)?;
        burgers3d::io::write_trajectory(&dir, member, traj)?;
        let path = dir.join("run.toml");
        let text = toml::to_string(&traj.config).expect("run configs serialize");
        fs::write(&path, text).map_err(io_err(&path))
    }

    pub fn report(&mut self, member: &str, report: BoundReport) {
        self.reports.push(MemberReport { member: member.to_owned(), report });
    }

    /// A line for the plain-text summary.
    pub fn note(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }

    pub fn reports(&self) -> &[MemberReport] {
        &self.reports
    }

    pub fn lines(&self) -> &[String] {
        &self.lines
    }
}

/// Reads the `run.toml` of a member directory.
pub fn read_member_config(dir: &Path) -> Result<RunConfig, RunnerError> {
    let path = dir.join("run.toml");
    let text = fs::read_to_string(&path).map_err(io_err(&path))?;
    toml::from_str(&text).map_err(|e| RunnerError::Config(vec![format!("{}: {e}", path.display())]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunOptions {
    /// Escalate ratio-mode reports above the spec's `strict_threshold`.
    pub strict: bool,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub root: PathBuf,
    pub reports: Vec<MemberReport>,
    pub lines: Vec<String>,
    /// `member/report` for every failing check.
    pub failures: Vec<String>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        i32::from(!self.failures.is_empty())
    }
}

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Runs the experiment named by `spec` and writes `manifest.toml`, the CSVs,
/// `reports.json`, `reports.txt` and `summary.txt` under `root`.
pub fn run_experiment(
    spec: &ExperimentSpec,
    root: &Path,
    registry: &ExperimentRegistry,
    opts: RunOptions,
) -> Result<RunOutcome, RunnerError> {
    let exp = registry.get(&spec.experiment)?;
    let mut out = Artifacts::new(root)?;
    let manifest = format!(
        "# burgers3d {VERSION}\n# Member seeds: sub_seed(seed, member index + 1).\n{}",
        spec.to_toml()
    );
    let path = root.join("manifest.toml");
    fs::write(&path, manifest).map_err(io_err(&path))?;

    exp.execute(&spec.run, &spec.params, spec.seed, &mut out)?;
    if opts.strict {
        for r in &mut out.reports {
            r.report.escalate(spec.strict_threshold);
        }
    }
    write_reports(&out)?;
    let failures: Vec<String> = out
        .reports
        .iter()
        .filter(|r| r.report.is_failure())
        .map(|r| format!("{}/{}", r.member, r.report.name))
        .collect();
    let summary = summary(spec, &out, &failures);
    let path = root.join("summary.txt");
    fs::write(&path, summary).map_err(io_err(&path))?;
    Ok(RunOutcome { root: root.to_owned(), reports: out.reports, lines: out.lines, failures })
}

pub(crate) fn write_reports(out: &Artifacts) -> Result<(), RunnerError> {
    let path = out.root.join("reports.json");
    let json = serde_json::to_string_pretty(&out.reports)?;
    fs::write(&path, json).map_err(io_err(&path))?;
    let mut text = String::new();
    for r in &out.reports {
        let _ = write!(text, "[{}] {}", r.member, r.report);
    }
    let path = out.root.join("reports.txt");
    fs::write(&path, text).map_err(io_err(&path))
}

fn summary(spec: &ExperimentSpec, out: &Artifacts, failures: &[String]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "experiment  {}", spec.experiment);
    let _ = writeln!(s, "seed        {}", spec.seed);
    let _ = writeln!(s, "version     {VERSION}");
    let _ = writeln!(s);
    for r in &out.reports {
        let mode = match r.report.mode {
            CheckMode::Strict => "strict",
            CheckMode::Ratio => "ratio",
            CheckMode::Informational => "info",
        };
        let verdict = match r.report.verdict {
            Verdict::Holds => "holds",
            _ if r.report.mode == CheckMode::Informational => "exceeded (informational)",
            Verdict::HoldsUpToConstant => "holds up to constant",
            Verdict::Violated => "VIOLATED",
        };
        let _ = writeln!(
            s,
            "{:<24} {:<28} {:<6} max ratio {:<12.4e} {verdict}",
            r.member, r.report.name, mode, r.report.max_ratio
        );
    }
    if !out.lines.is_empty() {
        let _ = writeln!(s);
        for l in &out.lines {
            let _ = writeln!(s, "{l}");
        }
    }
    let _ = writeln!(s);
    if failures.is_empty() {
        let _ = writeln!(s, "result      pass");
    } else {
        let _ = writeln!(s, "result      FAIL ({})", failures.join(", "));
    }
    s
}
