use std::path::Path;
use std::process::{Command, Output};

use proptest::prelude::*;
use qnd_cli::config::parse_angles;
use qnd_cli::{run, Grid, OutputTable, RunSpec};

fn qnd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qnd"))
        .args(args)
        .output()
        .expect("spawn qnd")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn flags_alone_drive_a_run_to_stdout() {
    let out = qnd(&["chs-sweep", "--phi-grid", "1,0.5"]);
    assert!(out.status.success());
    let table = OutputTable::parse(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(table.rows.len(), 2);
    let fixed = table.column("chs_fixed_angle").unwrap();
    let best = table.column("chs_max").unwrap();
    assert!(fixed[1] < best[1]);
}

#[test]
fn flags_override_config_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "f.toml",
        "mode = \"fringe\"\nchi_t = 0.3\ntheta_grid = [0.0]\n",
    );
    let out = qnd(&[
        "fringe", "--config", &cfg, "--chi-t", "0.5", "--nu-abs", "1",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let spec = RunSpec::from_metadata(&text).unwrap();
    assert_eq!(spec.chi_t, Some(0.5));
    assert_eq!(spec.nu_re, Some(1.0));
    assert_eq!(spec.nu_im, Some(0.0));
}

#[test]
fn validation_failures_exit_two_and_name_the_key() {
    let out = qnd(&[
        "coherence-sweep",
        "--delta-x",
        "0.1",
        "--l-coh-grid",
        "-1,0.5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("l_coh_grid values must be > 0"));

    let out = qnd(&["fringe", "--chi-t", "0.3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("theta_grid is required for mode fringe"));

    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "b.toml", "mode = \"bell\"\nphi = 0.2\n");
    let out = qnd(&["fringe", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("conflicts with subcommand"));

    let bad = write(dir.path(), "bad.toml", "mode = \"bell\"\nphi = \n");
    assert_eq!(qnd(&["bell", "--config", &bad]).status.code(), Some(2));
}

#[test]
fn truncation_failure_exits_three() {
    let out = qnd(&[
        "fringe",
        "--nu-abs",
        "4",
        "--n-max",
        "10",
        "--theta-grid",
        "0:1:3",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("truncation"));
}

#[test]
fn unreadable_config_exits_one() {
    let out = qnd(&["bell", "--config", "/nonexistent/spec.toml"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn out_file_and_quiet() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let p = path.to_str().unwrap();
    let loud = qnd(&["bell", "--phi", "0.8", "--out", p]);
    assert!(loud.status.success() && loud.stdout.is_empty());
    assert!(String::from_utf8_lossy(&loud.stderr).contains("1 rows written"));
    let quiet = qnd(&["bell", "--phi", "0.8", "--out", p, "--quiet"]);
    assert!(quiet.status.success() && quiet.stderr.is_empty());
    let t = OutputTable::parse(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!((t.column("chs").unwrap()[0] - (1.64f64.sqrt() - 1.0) / 2.0).abs() < 1e-9);
}

#[test]
fn metadata_replays_every_mode() {
    let specs = [
        "mode = \"fringe\"\nnu_re = 0.7\nchi_t = 0.2\ntheta_grid = { start = 0.0, stop = 3.0, points = 5 }",
        "mode = \"duality\"\nchi_t = 0.3\nnu_grid = [0.0, 1.5, 3.0]",
        "mode = \"double-cell\"\nnu_re = 1.0\nchi_t = 0.3\nt_prime_ratio = 0.25\nl_coh = 0.2\ndelta_x = 0.1\ntheta_grid = [0.0, 2.0]",
        "mode = \"coherence-sweep\"\nchi_t = 0.3\nnu_im = 1.0\ndelta_x = 0.1\nl_coh_grid = [0.05, 0.5]\nquadrature_nodes = 16",
        "mode = \"bell\"\nnu_re = 1.0\nchi_t = 0.1\nphi_extra = 0.2",
        "mode = \"chs-sweep\"\nl_coh_grid = [0.05, 1.0]\ndelta_x = 0.1\nphi = 0.9",
    ];
    for text in specs {
        let first = run(&RunSpec::from_toml_str(text).unwrap())
            .unwrap()
            .to_csv();
        let replayed = run(&RunSpec::from_metadata(&first).unwrap())
            .unwrap()
            .to_csv();
        assert_eq!(first, replayed, "{text}");
        assert!(first.contains("[meta]"));
    }
}

#[test]
fn duality_example_sweep_saturates() {
    let t = run(&RunSpec::from_toml_str(
        "mode = \"duality\"\nchi_t = 0.3\nnu_grid = { start = 0.0, stop = 3.0, points = 31 }",
    )
    .unwrap())
    .unwrap();
    for x in t.column("d2_plus_v2").unwrap() {
        assert!((x - 1.0).abs() < 1e-12);
    }
}

#[test]
fn rows_follow_sweep_order() {
    let t = run(
        &RunSpec::from_toml_str("mode = \"chs-sweep\"\nphi_grid = [0.1, 1.0, -0.5, 0.3]").unwrap(),
    )
    .unwrap();
    assert_eq!(t.column("phi").unwrap(), vec![0.1, 1.0, -0.5, 0.3]);
}

proptest! {
    #[test]
    fn grid_parser_never_panics(s in "\\PC*") {
        let _ = s.parse::<Grid>();
        let _ = parse_angles(&s);
    }

    #[test]
    fn table_parser_never_panics(s in "(# [a-z =0-9.\"]*\n){0,4}[a-z0-9,.e-]*\n[0-9,.eNa-]*\n?") {
        let _ = OutputTable::parse(&format!("# qnd-cli table v1\n{s}"));
        let _ = RunSpec::from_metadata(&s);
    }

    #[test]
    fn tables_round_trip(
        rows in prop::collection::vec(prop::collection::vec(any::<f64>(), 3), 0..6),
        meta in "[a-z]{1,6}",
    ) {
        let mut t = OutputTable::new(format!("{meta} = 1\n"), vec!["a".into(), "b".into(), "c".into()]);
        for r in &rows {
            t.push_row(r.clone());
        }
        let back = OutputTable::parse(&t.to_csv()).unwrap();
        prop_assert_eq!(back.rows.len(), rows.len());
        for (x, y) in back.rows.iter().flatten().zip(rows.iter().flatten()) {
            prop_assert!(x.to_bits() == y.to_bits() || (x.is_nan() && y.is_nan()));
        }
        prop_assert_eq!(back.to_csv(), t.to_csv());
    }

    #[test]
    fn range_grid_survives_metadata(start in -10.0f64..10.0, stop in -10.0f64..10.0, points in 1usize..50) {
        let spec = RunSpec {
            mode: Some("fringe".into()),
            theta_grid: Some(Grid::range(start, stop, points)),
            ..RunSpec::default()
        };
        let back = RunSpec::from_toml_str(&spec.to_toml_string()).unwrap();
        prop_assert_eq!(back, spec);
    }
}
