use std::path::PathBuf;
use std::process::{Command, Output};

fn epbeam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_epbeam")).args(args).output().expect("spawn epbeam")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("epbeam-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn no_arguments_prints_usage() {
    let o = epbeam(&[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn help_succeeds() {
    let o = epbeam(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("ep-locate"));
}

#[test]
fn ep_locate_lines() {
    let o = epbeam(&["ep-locate", "--n", "4", "--gamma", "1.5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "gamma_c=2");
    let eta: f64 = lines[1].strip_prefix("eta_c=").unwrap().parse().unwrap();
    assert!((eta - 0.6614378277661477).abs() < 1e-12);
    assert_eq!(lines[2], "order=5");
    let o = epbeam(&["ep-locate", "--gamma", "3"]);
    assert!(stdout(&o).contains("eta_c=none"));
}

#[test]
fn spectrum_csv_layout() {
    let o = epbeam(&["spectrum", "--n", "1", "--min", "0", "--max", "4", "--steps", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "gamma,re_lambda_0,re_lambda_1,im_lambda_0,im_lambda_1,spread,eigvec_min_sv");
    assert_eq!(lines.len(), 6);
    for line in &lines[1..] {
        let fields: Vec<f64> = line.split(',').map(|f| f.parse().unwrap()).collect();
        assert_eq!(fields.len(), 7);
    }
    assert!(lines[3].starts_with("2.0000000000000000e0,"));
}

#[test]
fn config_file_and_flag_override() {
    let cfg = scratch("scenario.cfg");
    let out = scratch("dyn.csv");
    std::fs::write(&cfg, "# two-photon HOM\nn = 2\naxis = z\nmin = 0\nmax = 0.7853981633974483\nsteps = 2\ninitial = fock:1\n").unwrap();
    let o = epbeam(&["dynamics", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    let last: Vec<f64> = text.lines().last().unwrap().split(',').map(|f| f.parse().unwrap()).collect();
    assert!(last[3] < 1e-10, "HOM dip: P(1) = {}", last[3]);

    let o = epbeam(&["dynamics", "--config", cfg.to_str().unwrap(), "--steps", "3"]);
    assert_eq!(stdout(&o).lines().count(), 4);
}

#[test]
fn exit_codes() {
    assert_eq!(epbeam(&["spectrum", "--nu0", "-1"]).status.code(), Some(2));
    assert_eq!(epbeam(&["spectrum", "--steps", "1"]).status.code(), Some(2));
    assert_eq!(epbeam(&["dynamics", "--preset", "fig2"]).status.code(), Some(2));
    assert_eq!(epbeam(&["dynamics", "--initial", "fock:9", "--n", "2"]).status.code(), Some(2));
    assert_eq!(epbeam(&["spectrum", "--frobnicate"]).status.code(), Some(2));
    assert_eq!(epbeam(&["sensitivity", "--gamma", "0.5"]).status.code(), Some(3));
    assert_eq!(
        epbeam(&["spectrum", "--steps", "3", "--out", "/nonexistent-dir/x.csv"]).status.code(),
        Some(4)
    );
}

#[test]
fn sensitivity_reports_slope() {
    let o = epbeam(&["sensitivity", "--n", "2", "--mode", "generic", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let slope: f64 = text.lines().next().unwrap().strip_prefix("slope=").unwrap().parse().unwrap();
    assert!((slope - 1.0 / 3.0).abs() < 0.02);
}

#[test]
fn spin_single_point_and_selftest() {
    let o = epbeam(&["spin", "--n", "2", "--gamma", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 4);
    let o = epbeam(&["selftest"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("failed=0"));
}
