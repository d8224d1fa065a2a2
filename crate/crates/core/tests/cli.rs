use std::fs;

use frontal::cli::run_command;

fn run(args: &[&str]) -> frontal::cli::RunOutcome {
    run_command(std::iter::once("frontal").chain(args.iter().copied()))
}

#[test]
fn analyze_circle_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("circ.csv");
    let p = path.to_str().unwrap();
    let r = run(&["analyze", "builtin:CIRC", "--csv", p]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.files, vec![path.clone()]);
    assert!(r.stdout.contains(&format!("wrote {p}")));

    let text = fs::read_to_string(&path).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().unwrap().clone();
    let col = headers.iter().position(|h| h == "kappa_s").unwrap();
    let mut n = 0;
    for rec in reader.records() {
        let ks: f64 = rec.unwrap()[col].parse().unwrap();
        assert!((ks + 1.0).abs() <= 1e-8);
        n += 1;
    }
    assert!(n > 100);

    let again = run(&["analyze", "builtin:CIRC"]);
    assert_eq!(again.stdout, text, "output must be deterministic");
}

#[test]
fn swallowtail_row_at_origin() {
    let r = run(&["analyze", "builtin:SW", "--seed", "0", "0", "--step", "0.02"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let origin = r
        .stdout
        .lines()
        .find(|l| l.starts_with("0,0,"))
        .expect("origin row");
    assert!(origin.starts_with("0,0,second-admissible,swallowtail,,,,,0.5,"), "{origin}");
}

#[test]
fn focal_meshes_for_swallowtail() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sw");
    let r = run(&["focal", "builtin:SW", "--grid", "64x64", "--out", out.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.files.len(), 3);
    for f in &r.files {
        assert!(f.exists());
    }
    let hat = fs::read_to_string(out.join("hat_fc.obj")).unwrap();
    assert!(hat.contains("\no singular_locus\n"));
    assert!(hat.lines().any(|l| l.starts_with("l ")));
    assert!(!hat.contains("NaN"));
    let first = fs::read(out.join("f.obj")).unwrap();
    run(&["focal", "builtin:SW", "--grid", "64x64", "--out", out.to_str().unwrap()]);
    assert_eq!(fs::read(out.join("f.obj")).unwrap(), first);
}

#[test]
fn cuspidal_edge_focal_mesh_is_finite() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(&["focal", "builtin:CE0", "--grid", "20x20", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let hat = fs::read_to_string(dir.path().join("hat_fc.obj")).unwrap();
    let verts = hat.lines().filter(|l| l.starts_with("v ")).count();
    assert!(verts >= 400);
    for line in hat.lines().filter(|l| l.starts_with("v ")) {
        for x in line[2..].split(' ') {
            assert!(x.parse::<f64>().unwrap().is_finite());
        }
    }
}

#[test]
fn verify_reports() {
    let r = run(&["verify", "builtin:CE0"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert!(r.stdout.contains("K_hatFC: 0, |H_hatFC|: 0.5625"), "{}", r.stdout);

    let all = run(&["verify", "all"]);
    assert_eq!(all.code, 0, "{}", all.stdout);
    assert_eq!(all.stdout.lines().filter(|l| l.starts_with("[PASS]")).count(), 12);
}

#[test]
fn tight_tolerance_can_fail_verification() {
    let r = run(&["verify", "builtin:CIRC", "--tol", "0"]);
    assert_eq!(r.code, 1, "{}", r.stdout);
    assert!(r.stdout.contains("[FAIL]"));
}

#[test]
fn parallel_surfaces() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("half.surf");
    let r = run(&["parallel", "builtin:SPHERE", "--t", "0.5", "--out", file.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let reloaded = frontal::cli::load_spec(file.to_str().unwrap()).unwrap();
    let (f, _) = reloaded.evaluate_jet((0.3, 0.2), 0).unwrap();
    let n = f.value().iter().map(|x| x * x).sum::<f64>().sqrt();
    assert!((n - 0.5).abs() < 1e-12);

    let mesh = dir.path().join("ce.obj");
    let r = run(&["parallel", "builtin:CE_T", "--t", "0.2", "--out", mesh.to_str().unwrap(), "--grid", "8x6"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let obj = fs::read_to_string(&mesh).unwrap();
    assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 48);

    let r = run(&["parallel", "builtin:CE_T", "--t", "0.2", "--out", file.to_str().unwrap()]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("CE_T"));
}

#[test]
fn surface_files_are_named_after_their_stem() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fold.surf");
    fs::write(&path, "x = u\ny = v^2\nz = v^3 + u*v^2\ndomain = -1 1 -0.5 0.5\npreadapted = true\n").unwrap();
    let r = run(&["verify", path.to_str().unwrap()]);
    assert!(r.stdout.starts_with("surface fold\n"), "{}", r.stdout);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert!(r.stdout.contains("40 first kind"), "{}", r.stdout);
}

#[test]
fn usage_and_analysis_errors() {
    assert_eq!(run(&[]).code, 2);
    assert_eq!(run(&["verify"]).code, 2);
    assert_eq!(run(&["analyze", "builtin:CE0", "--step", "fast"]).code, 2);
    let r = run(&["analyze", "/no/such/file.surf"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("/no/such/file.surf"));
    let r = run(&["analyze", "builtin:CE0", "--seed", "5", "5"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("surface CE0 at (5, 5)"), "{}", r.stderr);
}
