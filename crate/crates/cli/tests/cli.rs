use std::process::{Command, Output};

fn naecol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_naecol"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(o: &Output) -> Vec<Vec<String>> {
    stdout(o)
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn table_header_and_rows() {
    let o = naecol(&["table"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("k,d_star,ceil_d_star,d_1,ceil_d_1,d_lbd,d_ubd\n"));
    let rows = csv_rows(&o);
    assert_eq!(rows.len(), 13);
    assert_eq!(rows[0][0], "3");
    assert_eq!(rows[0][2], "7");
    assert_eq!(rows[0][4], "8");
}

#[test]
fn fixpoint_k3_in_bracket() {
    let o = naecol(&["fixpoint", "--k", "3", "--d", "6.74"]);
    assert!(o.status.success());
    let x: f64 = csv_rows(&o)[0][2].parse().unwrap();
    assert!((0.4464..=0.45).contains(&x));
}

#[test]
fn gen_then_solve_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let f1 = dir.path().join("a.txt");
    let f2 = dir.path().join("b.txt");
    for f in [&f1, &f2] {
        let o = naecol(&["gen", "--n", "6", "--k", "3", "--d", "2", "--seed", "1", "--model", "coloring", "--out", f.to_str().unwrap()]);
        assert!(o.status.success());
    }
    assert_eq!(std::fs::read(&f1).unwrap(), std::fs::read(&f2).unwrap());
    let a = naecol(&["solve", f1.to_str().unwrap()]);
    let b = naecol(&["solve", f1.to_str().unwrap()]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("n,m,k,d,model,simple,solutions\n"));
}

#[test]
fn json_format() {
    let o = naecol(&["phi", "--k", "3", "--d", "7.4", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v[0]["phi"].as_f64().unwrap() < 0.0);
    assert_eq!(v[0].as_object().unwrap().keys().next().unwrap(), "k");
}

#[test]
fn interp_header() {
    let o = naecol(&["interp", "--k", "3", "--d", "7.4", "--betas", "0,1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("beta,lambda,P,P_over_sqrt_beta\n"));
    let rows = csv_rows(&o);
    assert_eq!(rows[0][3], "");
    let p: f64 = rows[0][2].parse().unwrap();
    assert!((p - std::f64::consts::LN_2).abs() < 1e-12);
}

#[test]
fn firstmo_rows_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("s.json");
    let o = naecol(&["firstmo", "--n", "3", "--k", "3", "--d", "3", "--diagnostics", "--summary", s.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("n,gamma,binom,p_gamma,contribution,ones,in_window,local_clt\n"));
    assert!(text.contains(",1/3,3,9/28,"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&s).unwrap()).unwrap();
    assert_eq!(v["n"], 3);
}

#[test]
fn certify_single_and_all() {
    let o = naecol(&["certify", "--id", "alpha5"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("alpha5,9.8274"));
    let all = naecol(&["certify", "--format", "json"]);
    assert!(all.status.success());
    let v: serde_json::Value = serde_json::from_slice(&all.stdout).unwrap();
    assert!(v.as_array().unwrap().iter().all(|r| r["passed"] == true));
}

#[test]
fn exit_codes() {
    // validation problems exit 1
    assert_eq!(naecol(&["fixpoint", "--k", "3", "--d", "9"]).status.code(), Some(1));
    assert_eq!(naecol(&["gen", "--n", "6", "--k", "3", "--d", "2", "--model", "nae"]).status.code(), Some(1));
    assert_eq!(naecol(&["nosuch"]).status.code(), Some(1));
    assert_eq!(naecol(&["table", "--bogus"]).status.code(), Some(1));
    assert_eq!(naecol(&["gen", "--n", "5", "--k", "3", "--d", "2", "--seed", "1", "--model", "nae"]).status.code(), Some(1));
    assert_eq!(naecol(&["certify", "--id", "nope"]).status.code(), Some(1));
    let bad = naecol(&["solve", "/definitely/not/here"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(!bad.stderr.is_empty());
    // help and version exit 0
    assert_eq!(naecol(&["--help"]).status.code(), Some(0));
    assert_eq!(naecol(&["--version"]).status.code(), Some(0));
    // instances beyond the exhaustive-enumeration cap are rejected as input
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("big.txt");
    let o = naecol(&["gen", "--n", "36", "--k", "3", "--d", "1", "--seed", "1", "--model", "nae", "--out", f.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(naecol(&["z", f.to_str().unwrap(), "--beta", "1"]).status.code(), Some(1));
    // a computation that exceeds its budget exits 2
    let o = naecol(&["interp", "--k", "5", "--d", "50", "--betas", "1"]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn malformed_instance_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.txt");
    std::fs::write(&f, "p rcsp nae 3 3 1 1\nc 1 0 2 x 3 0\n").unwrap();
    let o = naecol(&["solve", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2, column 9"));
}

#[test]
fn seeded_commands_reproduce() {
    let args = ["sweep", "--k", "3", "--n", "12", "--ds", "2,8", "--trials", "10", "--seed", "4"];
    let a = naecol(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, naecol(&args).stdout);
    let c = ["concentrate", "--ns", "9,12", "--k", "3", "--d", "2", "--beta", "1", "--samples", "5", "--seed", "2"];
    let a = naecol(&c);
    assert!(a.status.success());
    assert_eq!(a.stdout, naecol(&c).stdout);
    assert_eq!(naecol(&["sweep", "--k", "3", "--n", "12", "--ds", "2", "--trials", "10"]).status.code(), Some(1));
}
