//! `report`: reruns the trajectory checks on stored member directories.

use std::fs;
use std::path::Path;

use burgers3d::analysis::{
    energy_inequality_check, interpolation_check, interpolation_check_records, max_principle_check,
    momentum_bound_check, MaxPrincipleOptions,
};
use burgers3d::io::read_trajectory;

use crate::artifacts::{read_member_config, write_reports};
use crate::{Artifacts, MemberReport, RunnerError};

/// Every subdirectory of `root` holding `run.toml`, `diagnostics.csv` and
/// snapshots is read back and checked again; results go to
/// `root/reanalysis`.
pub fn reanalyze(root: &Path) -> Result<Vec<MemberReport>, RunnerError> {
    let mut members: Vec<_> = fs::read_dir(root)
        .map_err(|source| RunnerError::Io { path: root.to_owned(), source })?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.join("run.toml").exists() && p.join("snapshots").is_dir())
        .collect();
    members.sort();
    if members.is_empty() {
        return Err(RunnerError::Config(vec![format!("no stored trajectories under {}", root.display())]));
    }
    let mut out = Artifacts::new(&root.join("reanalysis"))?;
    for dir in members {
        let name = dir.file_name().expect("directory entries have names").to_string_lossy().into_owned();
        let traj = read_trajectory(&dir, read_member_config(&dir)?)?;
        out.report(&name, max_principle_check(&traj, MaxPrincipleOptions::default()));
        out.report(&name, momentum_bound_check(&traj, 1e-8));
        if traj.diagnostics.len() >= 3 {
            out.report(&name, energy_inequality_check(&traj)?);
        }
        out.report(&name, interpolation_check_records(&traj.diagnostics));
        out.report(&name, interpolation_check(traj.snapshots.iter().map(|s| (s.t, &s.field))));
    }
    write_reports(&out)?;
    Ok(out.reports().to_vec())
}
