//! Snapshot and table files written and read back.

mod common;

use burgers3d::analysis::DiagnosticsRecord;
use burgers3d::colehopf::ErrorRow;
use burgers3d::dynamics::{integrate, InitialDataSpec, RunConfig};
use burgers3d::io::*;
use burgers3d::spectral::WavenumberGrid;
use burgers3d::Error;

fn bits(f: &burgers3d::spectral::SpectralVectorField) -> Vec<u64> {
    f.coeffs().iter().flat_map(|z| [z.re.to_bits(), z.im.to_bits()]).collect()
}

#[test]
fn snapshot_round_trip_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let g = WavenumberGrid::with_points(5, 20).unwrap();
    let f = common::random_field(&g, 11);
    let path = dir.path().join("u.snap");
    write_snapshot(&path, "velocity", 0.125, &f).unwrap();
    let back = read_snapshot(&path).unwrap();
    assert_eq!(back.name, "velocity");
    assert_eq!(back.time, 0.125);
    assert_eq!(back.field.grid().physical_points(), 20);
    assert_eq!(bits(&back.field), bits(&f));

    // Appended garbage is an error rather than silently ignored.
    let mut bytes = std::fs::read(&path).unwrap();
    bytes.push(0);
    assert!(matches!(decode_snapshot(&mut bytes.as_slice()), Err(Error::Format(_))));
    bytes[0] = b'X';
    assert!(matches!(decode_snapshot(&mut bytes.as_slice()), Err(Error::Format(_))));
}

#[test]
fn tables_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let rows = vec![
        ErrorRow { n: 8, dt: 1e-3, t: 0.5, err_l2: 1.25e-9, err_linf: 3.0e-10, err_h05: 0.1 + 0.2 },
        ErrorRow { n: 16, dt: 1e-3, t: 0.5, err_l2: 0.0, err_linf: f64::MIN_POSITIVE, err_h05: 1.0 / 3.0 },
    ];
    let path = dir.path().join("conv.csv");
    write_convergence(&path, &rows).unwrap();
    assert_eq!(read_convergence(&path).unwrap(), rows);

    let recs: Vec<DiagnosticsRecord> =
        (0..4).map(|i| DiagnosticsRecord::from_values(std::array::from_fn(|j| (i * 14 + j) as f64 / 7.0))).collect();
    let path = dir.path().join("diag.csv");
    write_diagnostics(&path, &recs).unwrap();
    assert_eq!(read_diagnostics(&path).unwrap(), recs);
}

#[test]
fn trajectory_directory_round_trip_and_restart() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        n: 4,
        dt: 0.01,
        t_end: 0.05,
        initial_data: common::band(2.0, 1.0),
        output: burgers3d::dynamics::OutputPolicy { snapshot_interval: Some(0.02), ..Default::default() },
        ..Default::default()
    };
    let traj = integrate(&cfg).unwrap();
    write_trajectory(dir.path(), "u", &traj).unwrap();
    let back = read_trajectory(dir.path(), cfg.clone()).unwrap();
    assert_eq!(back.diagnostics, traj.diagnostics);
    assert_eq!(back.snapshot_times(), traj.snapshot_times());
    for (a, b) in back.snapshots.iter().zip(&traj.snapshots) {
        assert_eq!(bits(&a.field), bits(&b.field));
    }

    // A snapshot file is valid initial data.
    let restart = RunConfig {
        initial_data: InitialDataSpec::FromFile { path: dir.path().join("snapshots/000000.snap") },
        ..cfg.clone()
    };
    let again = integrate(&restart).unwrap();
    assert_eq!(bits(&again.final_state().field), bits(&traj.final_state().field));

    assert!(matches!(read_trajectory(&dir.path().join("missing"), cfg), Err(Error::Io(_))));
}
