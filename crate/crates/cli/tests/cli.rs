use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;
use topocube::volume::{save_volume, VolumeFormat};
use topocube::{synthetic, Volume};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_topocube"));
    c.env_remove("TOPOCUBE_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(
        o.status.success(),
        "exit {:?}: {}",
        o.status.code(),
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).unwrap()
}

fn save(dir: &TempDir, name: &str, v: &Volume) -> String {
    let path = dir.path().join(name);
    save_volume(&path, v, VolumeFormat::Npy).unwrap();
    path.to_string_lossy().into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn fixture_3x1x1() -> Volume {
    Volume::new([3, 1, 1], vec![1.0, 0.2, 0.8]).unwrap()
}

fn cube_mask(side: usize, f: impl Fn(usize, usize, usize) -> bool) -> Volume {
    Volume::from_fn([side; 3], |i, j, k| if f(i, j, k) { 1.0 } else { 0.0 }).unwrap()
}

#[test]
fn diagram_of_constant_volume() {
    let dir = TempDir::new().unwrap();
    let v = save(&dir, "flat.npy", &Volume::filled([4, 4, 4], 0.6).unwrap());
    let out = json(&run(&["diagram", &v]));
    let diagrams = out.as_array().unwrap();
    assert_eq!(diagrams.len(), 3);
    let d0 = diagrams[0]["pairs"].as_array().unwrap();
    assert_eq!(d0.len(), 1);
    assert_eq!(d0[0]["essential"], true);
    assert_eq!(d0[0]["birth"], 0.6);
    assert!(diagrams[1]["pairs"].as_array().unwrap().is_empty());
    assert!(diagrams[2]["pairs"].as_array().unwrap().is_empty());
}

#[test]
fn diagram_of_three_voxel_fixture() {
    let dir = TempDir::new().unwrap();
    let v = save(&dir, "line.npy", &fixture_3x1x1());
    let out = dir.path().join("d.json");
    stdout(&run(&["diagram", &v, "-o", p(&out)]));
    let parsed: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let d0 = &parsed[0];
    assert_eq!(d0["dim"], 0);
    assert_eq!(d0["construction"], "V");
    assert_eq!(d0["filtration"], "superlevel");
    let pairs = d0["pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), 2);
    assert_eq!(
        (pairs[0]["birth"].as_f64(), pairs[0]["death"].as_f64()),
        (Some(1.0), Some(0.0))
    );
    assert_eq!(pairs[0]["essential"], true);
    assert_eq!(
        (pairs[1]["birth"].as_f64(), pairs[1]["death"].as_f64()),
        (Some(0.8), Some(0.2))
    );
    assert_eq!(pairs[1]["birth_vertex"], serde_json::json!([2, 0, 0]));
    assert_eq!(pairs[1]["death_vertex"], serde_json::json!([1, 0, 0]));
}

#[test]
fn corrupted_header_exits_2_without_output() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.npy");
    std::fs::write(&bad, b"\x93NUMPY\x01\x00\x10\x00{'descr': garbage").unwrap();
    let out = dir.path().join("never.json");
    let o = run(&["diagram", p(&bad), "-o", p(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
    assert!(!o.stderr.is_empty());
}

#[test]
fn raw_input_needs_dims() {
    let dir = TempDir::new().unwrap();
    let raw = dir.path().join("v.raw");
    let bytes: Vec<u8> = [1.0f32, 0.2, 0.8].iter().flat_map(|x| x.to_le_bytes()).collect();
    std::fs::write(&raw, bytes).unwrap();
    assert_eq!(run(&["diagram", p(&raw)]).status.code(), Some(2));
    let out = json(&run(&["diagram", p(&raw), "--raw-dims", "3,1,1"]));
    assert_eq!(out[0]["pairs"].as_array().unwrap().len(), 2);
}

#[test]
fn loss_on_identical_fixture_is_total_persistence() {
    let dir = TempDir::new().unwrap();
    let v = save(&dir, "line.npy", &fixture_3x1x1());
    let out = json(&run(&[
        "loss",
        &v,
        &v,
        "--dims",
        "0",
        "--no-downsample",
        "--geom",
        "none",
    ]));
    // Essential (1, 0) and (0.8, 0.2): 1 + 0.36.
    assert_eq!(out["topological"].as_f64().unwrap(), 1.36);
    assert_eq!(out["per_dim"]["0"]["wasserstein"].as_f64().unwrap(), 0.0);
    assert!(out.get("gradient").is_none());
}

#[test]
fn loss_respects_dims_and_writes_gradient() {
    let dir = TempDir::new().unwrap();
    let t = save(&dir, "t.npy", &synthetic::smooth_blobs(12, 3, 1));
    let q = save(&dir, "q.npy", &synthetic::smooth_blobs(12, 3, 2));
    let grad = dir.path().join("g.npy");
    let out = json(&run(&[
        "loss",
        &t,
        &q,
        "--dims",
        "2",
        "--M",
        "8",
        "--grad-out",
        p(&grad),
    ]));
    let keys: Vec<&String> = out["per_dim"].as_object().unwrap().keys().collect();
    assert_eq!(keys, ["2"]);
    let g = topocube::volume::load_volume(&grad, VolumeFormat::Npy).unwrap();
    assert_eq!(g.dims(), [12, 12, 12]);
}

#[test]
fn loss_error_codes() {
    let dir = TempDir::new().unwrap();
    let t = save(&dir, "t.npy", &Volume::zeros([4, 4, 4]).unwrap());
    let other = save(&dir, "o.npy", &Volume::zeros([4, 4, 5]).unwrap());
    let missing = dir.path().join("missing.npy");
    assert_eq!(run(&["loss", &t, p(&missing)]).status.code(), Some(2));
    assert_eq!(run(&["loss", &t, &other]).status.code(), Some(3));
    assert_eq!(run(&["loss", &t, &t, "--p", "0.5"]).status.code(), Some(3));
    assert_eq!(run(&["loss", &t, &t, "--dims", "3"]).status.code(), Some(3));
    assert_eq!(run(&["loss", &t, &t, "--geom", "l2"]).status.code(), Some(2));
}

#[test]
fn distance_between_diagram_files() {
    let dir = TempDir::new().unwrap();
    let record = |dim: usize, pts: &[(f64, f64)]| {
        let d = topocube::PersistenceDiagram::from_points(dim, pts);
        serde_json::to_string(&topocube::persistence::DiagramRecord::from(&d)).unwrap()
    };
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let c = dir.path().join("c.json");
    std::fs::write(&a, record(1, &[(1.0, 0.0)])).unwrap();
    std::fs::write(&b, record(1, &[])).unwrap();
    std::fs::write(&c, record(2, &[])).unwrap();

    let out = json(&run(&["distance", p(&a), p(&b)]));
    assert_eq!(out[0]["distance"].as_f64().unwrap(), 0.5);
    assert_eq!(out[0]["matching"]["to_diagonal_left"], serde_json::json!([0]));
    let out = json(&run(&["distance", p(&a), p(&b), "--metric", "bottleneck"]));
    assert_eq!(out[0]["distance"].as_f64().unwrap(), 0.5);
    assert_eq!(run(&["distance", p(&a), p(&c)]).status.code(), Some(3));
}

#[test]
fn distance_between_volumes_matches_library() {
    let dir = TempDir::new().unwrap();
    let (x, y) = (
        synthetic::uniform_noise([5, 5, 5], 1),
        synthetic::uniform_noise([5, 5, 5], 2),
    );
    let (fx, fy) = (save(&dir, "x.npy", &x), save(&dir, "y.npy", &y));
    let out = json(&run(&["distance", &fx, &fy, "--p", "1"]));
    let opts = topocube::PersistenceOptions::default();
    let dx = topocube::compute_persistence(&topocube::build_superlevel_filtration(&x), &opts);
    let dy = topocube::compute_persistence(&topocube::build_superlevel_filtration(&y), &opts);
    for k in 0..3 {
        let want = topocube::wasserstein(&dx[k], &dy[k], 1.0).unwrap().0;
        let got = out[k]["distance"].as_f64().unwrap();
        assert!((got - want).abs() <= 1e-11 * want.max(1.0), "dim {k}: {got} vs {want}");
    }
    let only = json(&run(&["distance", &fx, &fy, "--dim", "1"]));
    assert_eq!(only.as_array().unwrap().len(), 1);
    assert_eq!(only[0]["dim"], 1);
}

fn metrics_dir() -> TempDir {
    let dir = TempDir::new().unwrap();
    let ball = cube_mask(8, |i, j, k| {
        let d = |x: usize| (x as f64 - 3.5).powi(2);
        d(i) + d(j) + d(k) <= 9.0
    });
    save(&dir, "pred_a.npy", &ball);
    save(&dir, "truth_a.npy", &ball);
    let eight = cube_mask(6, |i, j, k| i < 2 && j < 2 && k < 2);
    let ten = cube_mask(6, |i, j, k| i == 5 && j >= 1 && k >= 4);
    save(&dir, "pred_b.npy", &eight);
    save(&dir, "truth_b.npy", &ten);
    dir
}

#[test]
fn metrics_rows_in_sorted_order() {
    let dir = metrics_dir();
    let glob = |s: &str| dir.path().join(s).to_string_lossy().into_owned();
    let text = stdout(&run(&["metrics", &glob("pred_*.npy"), &glob("truth_*.npy")]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "id,iou_error,volume_error,surface_area_error,roughness_error");
    assert_eq!(lines[1], "pred_a,0,0,0,0");
    let row: Vec<&str> = lines[2].split(',').collect();
    assert_eq!(row[0], "pred_b");
    assert_eq!(row[1], "1");
    assert_eq!(row[2], "0.2");
    assert_eq!(lines.len(), 3);
}

#[test]
fn metrics_glob_mismatch_and_manifest() {
    let dir = metrics_dir();
    let glob = |s: &str| dir.path().join(s).to_string_lossy().into_owned();
    assert_eq!(
        run(&["metrics", &glob("pred_a.npy"), &glob("truth_*.npy")])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        run(&["metrics", &glob("nothing_*.npy"), &glob("truth_*.npy")])
            .status
            .code(),
        Some(2)
    );

    // The manifest pairs b with a's truth, which sorted globs never would.
    let manifest = dir.path().join("pairs.csv");
    std::fs::write(&manifest, "pred_b.npy,truth_b.npy,first\npred_a.npy,truth_a.npy\n").unwrap();
    let text = stdout(&run(&["metrics", "--manifest", p(&manifest)]));
    let ids: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(ids, ["first", "pred_a"]);
}

#[test]
fn metrics_rejects_non_binary_truth() {
    let dir = metrics_dir();
    save(&dir, "truth_a.npy", &Volume::filled([8, 8, 8], 0.5).unwrap());
    let manifest = dir.path().join("m.csv");
    std::fs::write(&manifest, "pred_a.npy,truth_a.npy\n").unwrap();
    assert_eq!(run(&["metrics", "--manifest", p(&manifest)]).status.code(), Some(3));
}

#[test]
fn interp_analysis_rows() {
    let dir = TempDir::new().unwrap();
    save(&dir, "b.npy", &synthetic::smooth_blobs(8, 2, 4));
    save(&dir, "a.npy", &Volume::filled([8, 8, 8], 0.25).unwrap());
    let glob = dir.path().join("*.npy").to_string_lossy().into_owned();
    let text = stdout(&run(&["interp-analysis", &glob, "--sides", "8,4"]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "volume_id,r2,wasserstein_dim0,wasserstein_dim1,wasserstein_dim2"
    );
    assert_eq!(&lines[1..3], ["a,8,0,0,0", "a,4,0,0,0"]);
    assert!(lines[3].starts_with("b,8,0,0,0"));
    assert!(lines[4].starts_with("b,4,"));
    assert_eq!(lines.len(), 5);

    assert_eq!(run(&["interp-analysis", &glob, "--sides", "9"]).status.code(), Some(3));
    assert_eq!(run(&["interp-analysis", &glob]).status.code(), Some(2));
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let dir = TempDir::new().unwrap();
    let t = save(&dir, "t.npy", &synthetic::uniform_noise([6, 6, 6], 5));
    let q = save(&dir, "q.npy", &synthetic::uniform_noise([6, 6, 6], 6));
    let first = run(&["loss", &t, &q, "--no-downsample"]);
    let second = bin()
        .args(["loss", &t, &q, "--no-downsample"])
        .env("TOPOCUBE_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(stdout(&first), stdout(&second));

    let bad = bin()
        .args(["diagram", &t])
        .env("TOPOCUBE_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(3));
}

#[test]
fn floats_use_twelve_significant_digits() {
    let dir = TempDir::new().unwrap();
    let v = save(
        &dir,
        "v.npy",
        &Volume::new([3, 1, 1], vec![1.0 / 3.0, 0.0, 2.0 / 3.0]).unwrap(),
    );
    let text = stdout(&run(&["diagram", &v]));
    assert!(text.contains("0.666666666667"), "{text}");
    assert!(!text.contains("0.6666666666666666"));
}

#[test]
fn help_succeeds_and_unknown_flags_fail() {
    assert!(run(&["--help"]).status.success());
    assert_eq!(run(&["diagram", "--bogus"]).status.code(), Some(2));
}
