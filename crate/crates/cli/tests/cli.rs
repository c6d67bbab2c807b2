use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn plap(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plap"))
        .args(args)
        .current_dir(cwd)
        .env_remove("PLAP_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn value(text: &str, key: &str) -> Option<String> {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")).map(str::to_string))
}

#[test]
fn help_on_every_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let flags: &[(&str, &[&str])] = &[
        ("solve", &["--config", "--p", "--lambda", "--domain", "--n", "--T", "--mT", "--reaction", "--source", "--initial", "--eps-reg", "--newton-tol", "--out"]),
        ("eigen", &["--p", "--domain", "--n", "--method", "--out"]),
        ("closed-form", &["--param", "--t", "--n", "--out"]),
        ("saddle", &["--p", "--lambda", "--eps", "--eps1", "--n", "--out"]),
        ("check", &["--principle", "--run", "--run2", "--tol", "--slice", "--burn-in"]),
        ("scenario", &["--n", "--mT", "--seed", "--tol", "--out"]),
        ("report", &["--in", "--csv"]),
    ];
    for (sub, expected) in flags {
        let o = plap(&[sub, "--help"], dir.path());
        assert_eq!(o.status.code(), Some(0), "{sub}");
        let text = stdout(&o);
        for f in *expected {
            assert!(text.contains(f), "{sub} --help lacks {f}:\n{text}");
        }
    }
    assert_eq!(plap(&["--help"], dir.path()).status.code(), Some(0));
    assert_eq!(plap(&["frobnicate"], dir.path()).status.code(), Some(2));
}

#[test]
fn zero_run_satisfies_wmp() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("t,x,value\n");
    for t in [0.0, 0.5, 1.0] {
        for x in [-1.0, 0.0, 1.0] {
            csv.push_str(&format!("{t},{x},0\n"));
        }
    }
    fs::write(dir.path().join("zero.csv"), csv).unwrap();
    let o = plap(&["check", "--principle", "wmp", "--run", "zero.csv"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(value(&text, "verdict").as_deref(), Some("holds"));
    assert!(value(&text, "margin").is_some());
}

#[test]
fn negative_run_violates_wmp_and_missing_file_is_usage() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("neg.csv"), "t,x,value\n0,0,0\n0,1,0\n0,2,0\n1,0,0\n1,1,-2\n1,2,0\n").unwrap();
    let o = plap(&["check", "--principle", "wmp", "--run", "neg.csv"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let o = plap(&["check", "--principle", "wmp", "--run", "nope.csv"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = plap(&["check", "--principle", "wcp", "--run", "neg.csv"], dir.path());
    assert_eq!(o.status.code(), Some(2), "wcp without --run2");
}

#[test]
fn unknown_scenario_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = plap(&["scenario", "no-such"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown scenario"));
}

#[test]
fn preflight_rejects_tiny_mesh() {
    let dir = tempfile::tempdir().unwrap();
    let o = plap(&["scenario", "extinction", "--n", "9"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn extinction_config_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("ext.cfg"),
        "# separable extinction solution, p = 1.5, t0 = 0.5\n\
         p = 1.5\nlambda = 0\ndomain = -1 1\nn = 257\nT = 1.2\nmT = 600\n\
         initial = extinction\nt0 = 0.5\neps_reg = 1e-10\nnewton_tol = 1e-10\nstride = 6\n",
    )
    .unwrap();
    let o = plap(&["solve", "--config", "ext.cfg", "--out", "out"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let sup_final: f64 = value(&text, "sup_final").unwrap().parse().unwrap();
    assert!(sup_final < 1e-3, "{text}");
    let csv = fs::read_to_string(dir.path().join("out/solve/solution.csv")).unwrap();
    assert!(csv.starts_with("t,x,value\n"));
    assert_eq!(csv.lines().count(), 1 + 101 * 257);
    assert!(dir.path().join("out/solve/summary.txt").is_file());

    // the stored run passes straight into the checker
    let o = plap(&["check", "--principle", "wmp", "--run", "out/solve/solution.csv"], dir.path());
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn solve_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("empty.cfg"), "").unwrap();
    let o = plap(&["solve", "--config", "empty.cfg"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr).into_owned();
    for k in ["p", "n", "T", "mT", "initial"] {
        assert!(err.contains(k), "{err}");
    }
    fs::write(dir.path().join("bad.cfg"), "p = abc\nn = 9\nT = 1\nmT = 2\ninitial = zero\n").unwrap();
    let o = plap(&["solve", "--config", "bad.cfg"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("`p`"));
    fs::write(dir.path().join("dup.cfg"), "p = 3\np = 2\n").unwrap();
    let o = plap(&["solve", "--config", "dup.cfg"], dir.path());
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    fs::write(dir.path().join("unk.cfg"), "p = 3\nn = 9\nT = 1\nmT = 2\ninitial = zero\nq = 1\n").unwrap();
    let o = plap(&["solve", "--config", "unk.cfg"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown keys: q"));
}

#[test]
fn flag_overrides_config_value() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.cfg"), "p = 3\nn = 33\nT = 0.05\nmT = 5\ninitial = sine\n").unwrap();
    let o = plap(&["solve", "--config", "run.cfg", "--p", "1.5", "--out", "o"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(value(&stdout(&o), "p").as_deref(), Some("1.5"));
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_plap"))
        .args(["closed-form", "barenblatt", "--t", "1", "--n", "241"])
        .current_dir(dir.path())
        .env("PLAP_OUT_DIR", "envout")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("envout/closed-form/barenblatt.csv").is_file());
    let r: f64 = value(&stdout(&o), "support_radius").unwrap().parse().unwrap();
    assert!((r - 3.3019 * 2f64.powf(0.25)).abs() < 1e-3);
}

#[test]
fn eigen_methods_agree() {
    let dir = tempfile::tempdir().unwrap();
    let get = |method: &str| -> f64 {
        let o = plap(&["eigen", "--p", "3", "--n", "1025", "--method", method, "--out", "o"], dir.path());
        assert_eq!(o.status.code(), Some(0));
        value(&stdout(&o), "lambda1").unwrap().parse().unwrap()
    };
    let (r, s) = (get("rayleigh"), get("shooting"));
    assert!((r - s).abs() / s < 5e-3);
    assert!(dir.path().join("o/eigen/eigenfunction_shooting.csv").is_file());
    let o = plap(&["eigen", "--p", "3", "--method", "power"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn saddle_writes_fields_and_zeta_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = plap(&["saddle", "--n", "1025", "--out", "o"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["w0.csv", "z.csv", "h.csv", "zeta.csv"] {
        assert!(dir.path().join("o/saddle").join(f).is_file(), "{f}");
    }
    let z: f64 = value(&stdout(&o), "zeta_1e-3").unwrap().parse().unwrap();
    assert!(z < 0.0);
}

#[test]
fn scenario_then_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = plap(&["scenario", "logistic-nonuniqueness", "--n", "257", "--mT", "200", "--out", "runs"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(value(&stdout(&o), "pass").as_deref(), Some("true"));
    let o = plap(&["report", "--in", "runs"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("runs/table1.csv")).unwrap();
    assert!(csv.starts_with("regime,p,principle,empirical,paper\n"));
    let o = plap(&["report", "--in", "missing"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}
