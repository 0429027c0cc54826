use traversal_core::nelson::persist::*;
use traversal_core::nelson::*;
use traversal_core::*;

fn small_field() -> Field {
    let u = Units::default();
    let barrier = Barrier::rectangular(1.0, 2.0).unwrap();
    let packet = Packet::new(-20.0, 3.0, 1.0).unwrap();
    let grid = Grid::new(-50.0, 50.0, 1024, 0.05, 40).unwrap().with_stride(10).unwrap();
    propagate(&packet, &barrier, &grid, &u).unwrap()
}

#[test]
fn field_round_trips_through_raw_file_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("field.bin");
    let field = small_field();
    save_field(&field, &path).unwrap();
    let bytes = std::fs::metadata(&path).unwrap().len() as usize;
    assert_eq!(bytes, field.n_snapshots() * field.grid.n_x * 16);
    let back: Field = load_field(&path).unwrap();
    assert_eq!(back.psi, field.psi);
    assert_eq!(back.norms, field.norms);
    assert_eq!(back.grid, field.grid);
    assert_eq!(back.region_ii, field.region_ii);
    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("field.json")).unwrap()).unwrap();
    assert_eq!(sidecar["stride"], 10);
    assert_eq!(sidecar["n_x"], 1024);
}

#[test]
fn first_sample_is_little_endian_real_then_imaginary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.bin");
    let field = small_field();
    save_field(&field, &path).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    let j = 300;
    let re = f64::from_le_bytes(bytes[16 * j..16 * j + 8].try_into().unwrap());
    let im = f64::from_le_bytes(bytes[16 * j + 8..16 * j + 16].try_into().unwrap());
    assert_eq!(re, field.psi[j].re);
    assert_eq!(im, field.psi[j].im);
}

#[test]
fn truncated_snapshot_file_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.bin");
    save_field(&small_field(), &path).unwrap();
    let mut bytes = std::fs::read(&path).unwrap();
    bytes.truncate(bytes.len() - 16);
    std::fs::write(&path, bytes).unwrap();
    assert!(matches!(load_field::<f64>(&path), Err(Error::Parse(_))));
}

#[test]
fn ensemble_csv_has_one_row_per_path() {
    let field = small_field();
    let ens = forward_paths(&field, 25, 4, &PathOptions::new(0.05).recording(10)).unwrap();
    let mut buf = Vec::new();
    write_ensemble_csv(&ens, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "path_id,seed,transmitted,dwell_time,excluded");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 25);
    assert!(rows.iter().all(|r| r.split(',').count() == 5));

    let mut buf = Vec::new();
    write_trajectories_csv(&ens, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    let per_path = ens.paths[0].trajectory.as_ref().unwrap().len();
    assert_eq!(rows.len(), 25 * per_path);
    assert!(rows[1].starts_with("0,0.5,"));
}
