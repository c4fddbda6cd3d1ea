use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use penscat::config::{Command as Cmd, Solver};
use penscat::output::{csv_read, csv_write, format_float, write_artifacts, Artifacts, Cell, Table};
use penscat::{parse_config, CliError};

const BIN: &str = env!("CARGO_BIN_EXE_penscat");

fn penscat(dir: &Path, toml: &str, env: &[(&str, &str)]) -> (Output, PathBuf) {
    let cfg = dir.join("run.toml");
    std::fs::write(&cfg, toml).unwrap();
    let out = dir.join("out");
    let mut cmd = Command::new(BIN);
    cmd.arg(&cfg).arg("-o").arg(&out).env_remove("PENSCAT_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    (cmd.output().unwrap(), out)
}

fn exit_code(toml: &str) -> (i32, String) {
    let tmp = tempfile::tempdir().unwrap();
    let (o, _) = penscat(tmp.path(), toml, &[]);
    (o.status.code().unwrap(), String::from_utf8_lossy(&o.stderr).into())
}

#[test]
fn defaults_fill_every_block() {
    let cfg = parse_config("command = \"farfield\"").unwrap();
    assert_eq!(cfg.command, Cmd::Farfield);
    assert_eq!(cfg.discretization.solver, Solver::Bie);
    assert_eq!(cfg.discretization.nodes, 256);
    assert_eq!(cfg.discretization.modes, 20);
    assert_eq!(cfg.discretization.grid, 64);
    assert_eq!(cfg.discretization.angles, 64);
    assert_eq!(cfg.geometry.params, Some(vec![1.0]));
    assert_eq!((cfg.medium.k, cfg.medium.lambda, cfg.medium.n), (1.0, 1.0, 2.0));
    let echoed = parse_config(&cfg.echo()).unwrap();
    assert_eq!(echoed.echo(), cfg.echo());
}

#[test]
fn kite_defaults_to_no_parameters() {
    let cfg = parse_config("command = \"farfield\"\n[geometry]\nkind = \"kite\"\n").unwrap();
    assert_eq!(cfg.geometry.params, Some(vec![]));
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().is_some_and(|e| e == "toml") {
            let text = std::fs::read_to_string(&p).unwrap();
            parse_config(&text).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
            seen += 1;
        }
    }
    assert!(seen >= 5);
}

#[test]
fn schema_errors_carry_the_key_path() {
    match parse_config("command = \"farfield\"\n[medium]\nk = \"one\"\n") {
        Err(CliError::Schema { path, .. }) => assert_eq!(path, "medium.k"),
        other => panic!("{other:?}"),
    }
    match parse_config("command = \"farfield\"\n[discretization]\nnodes = 15\n") {
        Err(CliError::Schema { path, .. }) => assert_eq!(path, "discretization.nodes"),
        other => panic!("{other:?}"),
    }
    match parse_config("command = \"mitp\"\n[mitp]\nlambdas = [2.0, 1.0]\n") {
        Err(CliError::Schema { path, .. }) => assert_eq!(path, "mitp.lambdas[1]"),
        other => panic!("{other:?}"),
    }
    assert!(matches!(parse_config("command = \"scatter\""), Err(CliError::Schema { .. })));
    assert!(matches!(parse_config("command = \"farfield\"\nspeed = 3\n"), Err(CliError::Schema { .. })));
}

#[test]
fn electromagnetic_keys_are_rejected_with_a_hint() {
    let (code, err) = exit_code("command = \"farfield\"\n[medium]\nlambda_H = 2.0\n");
    assert_eq!(code, 2);
    assert!(err.contains("out of scope"), "{err}");
}

#[test]
fn exit_codes_partition_failures() {
    assert_eq!(exit_code("command = \"farfield\"\n[medium]\nk = -1.0\n").0, 2);
    assert_eq!(exit_code("command = \"farfield\"\n[medium]\nlambda = -1.0\n").0, 3);
    assert_eq!(exit_code("command = \"farfield\"\n[medium]\nn_imag = -0.5\n").0, 3);
    assert_eq!(exit_code("command = \"itp-eig\"\n[medium]\nn = 16.0\n[itp]\nwindow = 0.5\n").0, 4);
    assert_eq!(exit_code("command = \"mitp\"\n[mitp]\nintervals = 16\n").0, 5);

    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let cfg = tmp.path().join("run.toml");
    std::fs::write(&cfg, "command = \"mitp\"\n").unwrap();
    let o = Command::new(BIN).arg(&cfg).arg("-o").arg(blocker.join("sub")).output().unwrap();
    assert_eq!(o.status.code(), Some(6));
    let o = Command::new(BIN).arg(tmp.path().join("missing.toml")).output().unwrap();
    assert_eq!(o.status.code(), Some(6));
}

#[test]
fn farfield_file_has_one_line_per_angle_plus_header() {
    let tmp = tempfile::tempdir().unwrap();
    let (o, out) = penscat(tmp.path(), "command = \"farfield\"\n[discretization]\nangles = 96\n", &[]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(out.join("farfield.csv")).unwrap();
    assert_eq!(text.lines().count(), 97);
    assert!(text.starts_with("angle,Re,Im\n"));
    assert!(!text.contains('\r'));
    assert!(out.join("manifest.txt").exists());
}

#[test]
fn eigenvalues_scale_inversely_with_radius() {
    let tmp = tempfile::tempdir().unwrap();
    let (o, out) = penscat(tmp.path(), "command = \"itp-eig\"\n[medium]\nn = 16.0\n", &[]);
    assert!(o.status.success());
    let (header, rows) = csv_read(&out.join("eigenvalues.csv")).unwrap();
    assert_eq!(header, ["R", "mode", "k1"]);
    assert_eq!(rows.len(), 3);
    let scaled: Vec<f64> = rows.iter().map(|r| r[0].parse::<f64>().unwrap() * r[2].parse::<f64>().unwrap()).collect();
    for s in &scaled {
        assert!((s - scaled[0]).abs() < 1e-10 * scaled[0]);
    }
    assert!((scaled[0] - 0.993997561885688).abs() < 1e-10);
}

#[test]
fn csv_round_trip_is_bit_exact() {
    let tmp = tempfile::tempdir().unwrap();
    let values = [1.0 / 3.0, -0.0, 5e-324, f64::MAX, -1.2345678901234567e-300, std::f64::consts::PI, 0.1 + 0.2];
    let mut t = Table::new("values", &["x", "label"]);
    for v in values {
        t.push(vec![v.into(), "a".into()]);
    }
    let p = tmp.path().join(t.file_name());
    csv_write(&p, &t).unwrap();
    let (header, rows) = csv_read(&p).unwrap();
    assert_eq!(header, ["x", "label"]);
    for (v, row) in values.iter().zip(&rows) {
        assert_eq!(row[0].parse::<f64>().unwrap().to_bits(), v.to_bits(), "{}", row[0]);
    }
    assert_eq!(format_float(1.0), "1.0000000000000000e0");
}

#[test]
fn empty_tables_keep_their_header() {
    let tmp = tempfile::tempdir().unwrap();
    let art = Artifacts { tables: vec![Table::new("empty", &["a", "b"])], ..Default::default() };
    let files = write_artifacts(tmp.path(), "", &art).unwrap();
    assert_eq!(files.len(), 2);
    assert_eq!(std::fs::read_to_string(tmp.path().join("empty.csv")).unwrap(), "a,b\n");
}

#[test]
fn ragged_rows_are_refused() {
    let tmp = tempfile::tempdir().unwrap();
    let mut t = Table::new("bad", &["a", "b"]);
    t.rows.push(vec![Cell::Int(1)]);
    assert!(matches!(csv_write(&tmp.path().join("bad.csv"), &t), Err(CliError::Schema { .. })));
}

#[test]
fn thread_count_does_not_change_output() {
    let toml = "command = \"farfield\"\n[geometry]\nkind = \"kite\"\n";
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (oa, outa) = penscat(a.path(), toml, &[("PENSCAT_THREADS", "1")]);
    let (ob, outb) = penscat(b.path(), toml, &[("PENSCAT_THREADS", "4")]);
    assert!(oa.status.success() && ob.status.success());
    assert_eq!(std::fs::read(outa.join("farfield.csv")).unwrap(), std::fs::read(outb.join("farfield.csv")).unwrap());

    let c = tempfile::tempdir().unwrap();
    let (oc, _) = penscat(c.path(), toml, &[("PENSCAT_THREADS", "many")]);
    assert_eq!(oc.status.code(), Some(2));
}
