use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hydroform"))
        .args(args)
        .env_remove("HYDROFORM_PRECISION_BITS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    let o = run(args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(&o)).unwrap()
}

fn num(v: &serde_json::Value) -> f64 {
    v.as_str().unwrap().parse().unwrap()
}

#[test]
fn elastic_at_rest_is_one() {
    let v = json(&["compute", "--ni", "1", "--nf", "1", "--k", "0"]);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["precision_bits"], 128);
    assert!((num(&v["absF2"]) - 1.0).abs() < 1e-15);
    assert_eq!(v["transition"]["initial"]["n"], 1);
}

#[test]
fn elastic_closed_form() {
    // F(k) = 16/(k²+4)² for 1s → 1s
    let v = json(&["compute", "--ni", "1", "--nf", "1", "--k", "1"]);
    assert!((num(&v["F_real"]) - 0.64).abs() < 1e-15);
    assert_eq!(num(&v["F_imag"]), 0.0);
}

#[test]
fn orthogonal_states_vanish_at_rest() {
    let v = json(&["compute", "--ni", "1", "--nf", "2", "--k", "0"]);
    assert!(num(&v["absF2"]).abs() < 1e-30);
}

#[test]
fn backends_print_the_same_csv() {
    let base = ["compute", "--ni", "2", "--li", "1", "--nf", "3", "--lf", "2", "--k", "0.8", "--format", "csv"];
    let series = run(&[&base[..], &["--backend", "series"]].concat());
    let geg = run(&[&base[..], &["--backend", "gegenbauer"]].concat());
    assert!(series.status.success() && geg.status.success());
    assert_eq!(stdout(&series), stdout(&geg));
    assert!(stdout(&series).starts_with("ni,li,mi,nf,lf,mf,k,F_real,F_imag,absF2\n"));
}

#[test]
fn table_single_entry() {
    let o = run(&["table", "--n", "0", "--l", "0", "--n3", "0", "--l3", "0", "--l2", "0", "--u", "1", "--w", "1"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let row = out.lines().nth(1).unwrap();
    assert_eq!(row.split(',').nth(7).unwrap().parse::<f64>().unwrap(), -2.0);
    let v = json(&["table", "--n", "0", "--l", "0", "--n3", "0", "--l3", "0", "--l2", "0", "--u", "1", "--w", "1", "--format", "json"]);
    assert_eq!(v["schema"], 1);
    assert_eq!(num(&v["value"]), -2.0);
}

#[test]
fn table_grid_size() {
    let o = run(&["table", "--nmax", "2", "--u", "0.7", "--w", "1.2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 121);
}

#[test]
fn scan_is_byte_identical() {
    let args = ["scan", "--ni", "1", "--nf", "3", "--lf", "1", "--points", "9"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let out = stdout(&a);
    let mut lines = out.lines();
    assert_eq!(lines.next().unwrap(), "lnk,k,absF2,l2_0,l2_1");
    assert_eq!(lines.count(), 9);
}

#[test]
fn precision_flag_and_env() {
    let v = json(&["--precision-bits", "256", "compute", "--ni", "1", "--nf", "1", "--k", "2"]);
    assert_eq!(v["precision_bits"], 256);
    let o = Command::new(env!("CARGO_BIN_EXE_hydroform"))
        .args(["compute", "--ni", "1", "--nf", "1"])
        .env("HYDROFORM_PRECISION_BITS", "32")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["compute", "--ni", "1", "--li", "2", "--nf", "1"][..],
        &["compute", "--ni", "0", "--nf", "1"],
        &["compute", "--ni", "2", "--li", "1", "--mi", "3", "--nf", "1"],
        &["table", "--n", "0", "--l", "0", "--n3", "0", "--l3", "0", "--l2", "0", "--u", "0", "--w", "1"],
        &["table", "--n", "0", "--l", "0", "--n3", "0", "--l3", "0", "--l2", "3", "--u", "1", "--w", "1"],
        &["validate", "--suite", "bogus"],
        &["frobnicate"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn validate_passes() {
    let o = run(&["validate", "--suite", "orthogonality", "--nmax", "3"]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().all(|l| l.ends_with("ok")));
    let o = run(&["validate", "--suite", "backends", "--nmax", "3"]);
    assert!(o.status.success());
}
