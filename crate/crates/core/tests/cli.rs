use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BASE: &str = "[equation]\np = 1/6\nq = -1/6\n[scenario]\nseed = 42\n";

fn rnstab(args: &[&str], env_out: Option<&Path>, cwd: &Path) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rnstab"));
    cmd.args(args).current_dir(cwd).env_remove("RNSTAB_OUT_DIR");
    if let Some(dir) = env_out {
        cmd.env("RNSTAB_OUT_DIR", dir);
    }
    cmd.output().expect("binary runs")
}

fn verify(config: &str, extra: &[&str]) -> (i32, tempfile::TempDir) {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.cfg");
    fs::write(&cfg, config).unwrap();
    let out = tmp.path().join("out");
    let mut args = vec![
        "verify",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend(extra);
    let o = rnstab(&args, None, tmp.path());
    (o.status.code().unwrap(), tmp)
}

#[test]
fn noiseless_run_exits_zero() {
    let (code, tmp) = verify(BASE, &[]);
    assert_eq!(code, 0);
    let summary = fs::read_to_string(tmp.path().join("out/summary.csv")).unwrap();
    assert!(summary.starts_with("run_id,check,min_margin,passed,points,failures\n"));
    assert!(!summary.contains(",false,"));
}

#[test]
fn noisy_admissible_run_exits_zero() {
    let (code, _tmp) = verify(&format!("{BASE}noise_scale = 0.4\n"), &[]);
    assert_eq!(code, 0);
}

#[test]
fn corollary_only_run_emits_table() {
    let (code, tmp) = verify(
        &format!("{BASE}noise_scale = 0.4\n[checks]\nrun = corollary\n"),
        &[],
    );
    assert_eq!(code, 0);
    let table = fs::read_to_string(tmp.path().join("out/corollary.csv")).unwrap();
    assert_eq!(
        table.lines().next().unwrap(),
        "run_id,x,t,scaled_time,scaled_shift,difference"
    );
    assert_eq!(table.lines().count(), 1 + 11 * 61);
    let regions = fs::read_to_string(tmp.path().join("out/corollary_regions.csv")).unwrap();
    assert!(
        regions.contains("positive") && regions.contains("negative") && regions.contains("zero")
    );
    let detail = fs::read_to_string(tmp.path().join("out/detail.csv")).unwrap();
    assert_eq!(detail.lines().count(), 1);
}

#[test]
fn failing_check_exits_one() {
    let cfg = format!(
        "{BASE}noise_scale = 0.4\n[phi]\nfamily = gaussian_location\n[checks]\nrun = hypothesis\n"
    );
    let (code, tmp) = verify(&cfg, &[]);
    assert_eq!(code, 1);
    let summary = fs::read_to_string(tmp.path().join("out/summary.csv")).unwrap();
    assert!(summary.contains("hypothesis,") && summary.contains(",false,"));
}

#[test]
fn config_errors_exit_two() {
    assert_eq!(verify("[equation]\np = 1\nq = -1\n", &[]).0, 2);
    assert_eq!(
        verify(
            "[equation]\np = 1/6\nq = -1/6\nalpha = 0.5\nbeta = -1/3\n",
            &[]
        )
        .0,
        2
    );
    assert_eq!(verify("[equation]\np = 1/6\nq = nope\n", &[]).0, 2);
    assert_eq!(verify(BASE, &["--run-id", "bad id"]).0, 2);
    let tmp = tempfile::tempdir().unwrap();
    let o = rnstab(&["verify", "missing.cfg"], None, tmp.path());
    assert_eq!(o.status.code(), Some(2));
    let o = rnstab(&["verify"], None, tmp.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_error_names_line_and_field() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.cfg");
    fs::write(
        &cfg,
        "[equation]\np = 1/6\nq = -1/6\n[scenario]\ndimension = 0\n",
    )
    .unwrap();
    let o = rnstab(&["verify", cfg.to_str().unwrap()], None, tmp.path());
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(
        err.contains("line 5") && err.contains("scenario.dimension"),
        "{err}"
    );
}

#[test]
fn truncation_failure_exits_three() {
    let cfg =
        format!("{BASE}noise_scale = 0.4\n[truncation]\ntarget_tail = 1e-14\nmax_terms = 1\n");
    assert_eq!(verify(&cfg, &[]).0, 3);
}

#[test]
fn environment_overrides_default_out_dir() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.cfg");
    fs::write(&cfg, BASE).unwrap();
    let env_dir = tmp.path().join("from-env");
    let o = rnstab(
        &["verify", cfg.to_str().unwrap()],
        Some(&env_dir),
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(env_dir.join("summary.csv").exists());
    assert!(!tmp.path().join("rnstab-out").exists());

    let o = rnstab(&["verify", cfg.to_str().unwrap()], None, tmp.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(tmp.path().join("rnstab-out/summary.csv").exists());
}

#[test]
fn thread_count_does_not_change_output() {
    let cfg = format!("{BASE}noise_scale = 0.4\n");
    let (c1, a) = verify(&cfg, &["--threads", "1", "--run-id", "same"]);
    let (c2, b) = verify(&cfg, &["--threads", "6", "--run-id", "same"]);
    assert_eq!((c1, c2), (0, 0));
    for name in [
        "summary.csv",
        "detail.csv",
        "plot_error.csv",
        "plot_bound.csv",
        "corollary.csv",
    ] {
        let x = fs::read(a.path().join("out").join(name)).unwrap();
        let y = fs::read(b.path().join("out").join(name)).unwrap();
        assert_eq!(x, y, "{name}");
    }
}

#[test]
fn params_prints_spectrum() {
    let tmp = tempfile::tempdir().unwrap();
    let o = rnstab(&["params", "--p", "1/6", "--q", "-1/6"], None, tmp.path());
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "p,q,alpha,beta,gamma,discriminant");
    let v: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|s| s.parse().unwrap())
        .collect();
    assert!((v[2] - 0.5).abs() < 1e-15 && (v[3] + 1.0 / 3.0).abs() < 1e-15);
    assert!((v[4] - 5.0 / 9.0).abs() < 1e-15);

    let o = rnstab(&["params", "--p", "1", "--q", "-1"], None, tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("violate"));
    let o = rnstab(
        &["params", "--alpha", "0.9", "--beta", "0.1"],
        None,
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let o = rnstab(&["params", "--p", "1/6"], None, tmp.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn axioms_and_sweep_succeed() {
    let tmp = tempfile::tempdir().unwrap();
    let o = rnstab(&["axioms", "--samples", "500"], None, tmp.path());
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stdout)
    );
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("rn_axioms samples=500 violations=0"));
    assert!(text.contains("tnorm_product samples=500 violations=0"));

    let path = tmp.path().join("sweep.csv");
    let o = rnstab(
        &["sweep", "--points", "5", "--out", path.to_str().unwrap()],
        None,
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let table = fs::read_to_string(&path).unwrap();
    assert_eq!(table.lines().next().unwrap(), "alpha,beta,gamma");
    // β = 0 drops one column of the 5 x 5 grid
    assert_eq!(table.lines().count(), 1 + 5 * 4);
}
