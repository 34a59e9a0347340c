use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn hdamp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hdamp")).args(args).output().unwrap()
}

fn bundled(name: &str) -> String {
    hdamp_cli::bundled_config(name).display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn scenario(cfg: &str, out: &Path) -> Output {
    hdamp(&["scenario", "--config", &bundled(cfg), "--out", out.to_str().unwrap()])
}

fn check_csv(path: PathBuf, header: &str, columns: usize) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.is_ascii() && !text.contains('\r') && text.ends_with('\n'));
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), header);
    lines
        .map(|l| {
            let cells: Vec<String> = l.split(',').map(String::from).collect();
            assert_eq!(cells.len(), columns);
            cells
        })
        .collect()
}

#[test]
fn flat_scenarios_pass_and_write_csv() {
    let dir = tempfile::tempdir().unwrap();
    for (cfg, slopes) in [
        ("n1_flat.cfg", [-1.0, -1.5, -2.0, -2.0]),
        ("n2_flat.cfg", [-1.5, -2.0, -2.5, -2.5]),
    ] {
        let out = dir.path().join(cfg);
        let o = scenario(cfg, &out);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let norms = check_csv(out.join("norms.csv"), "t,norm_u,norm_dtu,norm_gradu,norm_Tu", 5);
        assert_eq!(norms.len(), 32);
        for cell in norms.iter().flatten() {
            // 17 significant digits in scientific form
            let mantissa = cell.split('e').next().unwrap();
            assert_eq!(mantissa.len(), 18, "{cell}");
            cell.parse::<f64>().unwrap();
        }
        let report = check_csv(out.join("report.csv"), "observable,slope,stderr,expected,tol,pass", 6);
        let names: Vec<&str> = report.iter().map(|r| r[0].as_str()).collect();
        assert_eq!(names, ["u", "gradu", "dtu", "Tu"]);
        for (row, want) in report.iter().zip(slopes) {
            let slope: f64 = row[1].parse().unwrap();
            assert!((slope - want).abs() < 0.05, "{cfg}: {row:?}");
            assert_eq!(row[5], "true");
        }
    }
}

#[test]
fn l2_scenario_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = scenario("l2_bandlimited.cfg", dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = check_csv(
        dir.path().join("report.csv"),
        "observable,slope,stderr,expected,tol,pass",
        6,
    );
    assert_eq!(report.len(), 3);
}

#[test]
fn zero_data_refuse_the_fit() {
    let dir = tempfile::tempdir().unwrap();
    let o = scenario("zero.cfg", dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("fit refused"));
    let norms = check_csv(dir.path().join("norms.csv"), "t,norm_u,norm_dtu,norm_gradu,norm_Tu", 5);
    assert!(norms
        .iter()
        .all(|r| r[1..].iter().all(|c| c.parse::<f64>().unwrap() == 0.0)));
}

#[test]
fn config_errors_exit_two_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "n = 1\ngrid.panels = lots\n").unwrap();
    let o = hdamp(&[
        "scenario",
        "--config",
        bad.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let msg = stderr(&o);
    assert!(msg.contains("line 2") && msg.contains("grid.panels"), "{msg}");

    let o = hdamp(&["scenario", "--config", "/definitely/not/here.cfg"]);
    assert_eq!(o.status.code(), Some(2));
    let o = hdamp(&["propcheck", "--samples", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = hdamp(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn propcheck_is_deterministic() {
    let a = hdamp(&["propcheck", "--samples", "64", "--seed", "5"]);
    let b = hdamp(&["propcheck", "--samples", "64", "--seed", "5"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = hdamp(&["propcheck", "--samples", "64", "--seed", "6"]);
    assert_ne!(a.stdout, c.stdout);

    let g = stdout(&hdamp(&["propcheck", "--samples", "1"]));
    assert!(
        g.contains("worst_z=2.5000000000000000e-1 worst_t=2.0000000000000000e0"),
        "{g}"
    );
}

#[test]
fn gftcheck_paths() {
    let o = hdamp(&["gftcheck", "--config", &bundled("zero.cfg")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("grid_l2_norm=0.0000000000000000e0"));
    assert!(s.contains("plancherel_l2_norm=0.0000000000000000e0"));

    let o = hdamp(&["gftcheck", "--config", &bundled("gaussian_coarse.cfg")]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("under-resolved"));

    let o = hdamp(&["gftcheck", "--config", &bundled("n2_flat.cfg")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn tailbound_prints_partial_sums() {
    let o = hdamp(&["tailbound"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let mut lines = s.lines();
    assert_eq!(lines.next(), Some("m,count,term,partial"));
    let summary = s.lines().last().unwrap();
    let full: f64 = summary.split("full=").nth(1).unwrap().parse().unwrap();
    assert!((full - std::f64::consts::PI.powi(2) / 8.0).abs() <= 1e-10);
    assert_eq!(s.lines().count(), 1 + 9 + 1);
}

#[test]
fn quiet_silences_stdout() {
    let o = hdamp(&["--quiet", "propcheck", "--samples", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
}
