use kstab_cli::run;
use kstab_core::io::corpus_entry;

fn kstab(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["kstab"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn data_rows(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).skip(1).collect()
}

#[test]
fn invariants_of_the_product() {
    let (code, out, _) = kstab(&["invariants", "product-p1"]);
    assert_eq!(code, 0);
    assert_eq!(data_rows(&out), ["a0,1", "a1,1", "b0,1/2", "b1,1/2", "F0,1/2", "F1,0"]);
    assert!(out.contains("# columns: name:string,value:rational\n"));
}

#[test]
fn normal_cone_futaki_invariant() {
    let (_, out, _) = kstab(&["invariants", "normal-cone-p1"]);
    assert!(data_rows(&out).contains(&"F1,-1/8"));
}

#[test]
fn output_is_deterministic() {
    let a = kstab(&["dh", "tent"]);
    let b = kstab(&["dh", "tent"]);
    assert_eq!(a, b);
}

#[test]
fn config_from_a_file_and_out_flag() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("cone.json");
    std::fs::write(&input, corpus_entry("normal-cone-p1").unwrap()).unwrap();
    let output = dir.path().join("spectral.csv");
    let (code, out, _) = kstab(&["spectral", input.to_str().unwrap(), "--level", "4", "--out", output.to_str().unwrap()]);
    assert_eq!((code, out.as_str()), (0, ""));
    let written = std::fs::read_to_string(&output).unwrap();
    assert!(written.contains("# param: level=4\n"));
    // Masses at level 4 sum to the number of lattice points over k.
    assert_eq!(data_rows(&written).len(), 3);
}

#[test]
fn json_is_a_single_object() {
    let (code, out, _) = kstab(&["--json", "norms", "product-p1", "--p", "2"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["rows"][0][3], "1/12");
    assert_eq!(v["columns"][3]["type"], "rational");
}

#[test]
fn divisibility_errors_exit_three() {
    let (code, _, err) = kstab(&["spectral", "flag-p1-point", "--level", "7"]);
    assert_eq!(code, 3, "{err}");
    assert!(err.contains("period 2"));
}

#[test]
fn schema_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.json");
    let text = corpus_entry("normal-cone-p1").unwrap().replace("\"1/2\"", "\"0\"");
    std::fs::write(&input, text).unwrap();
    let (code, _, err) = kstab(&["invariants", input.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("/c") && err.contains("c must be positive"), "{err}");
    let (code, _, _) = kstab(&["equilibrium", "product-p1", "--lambda", "2/4"]);
    assert_eq!(code, 2);
}

#[test]
fn missing_files_fail() {
    let (code, _, err) = kstab(&["invariants", "/nonexistent/config.json"]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error:"));
}

#[test]
fn converge_table_has_rate_one_over_k() {
    let (code, out, _) = kstab(&["converge", "product-p1", "--levels", "8,16,32"]);
    assert_eq!(code, 0);
    assert_eq!(data_rows(&out), ["8,1/8,1,0.0625", "16,1/16,1,0.03125", "32,1/32,1,0.015625"]);
}

#[test]
fn geodesic_dumps_and_residuals() {
    let (code, out, _) = kstab(&["geodesic", "product-p1", "--nodes", "101", "--steps", "2", "--tmax", "1"]);
    assert_eq!(code, 0);
    let rows = data_rows(&out);
    let dual_nodes = rows.len() / 3;
    assert_eq!(rows.len(), 3 * dual_nodes);
    assert!(rows[0].starts_with("0.0,-10.0,"));
    let (code, out, _) = kstab(&["geodesic", "product-p1", "--residuals", "--steps", "2"]);
    assert_eq!(code, 0);
    assert_eq!(data_rows(&out).len(), 2);
}

#[test]
fn equilibrium_beyond_the_maximum_is_minus_infinity() {
    let (code, out, _) = kstab(&["equilibrium", "product-p1", "--lambda", "3/2"]);
    assert_eq!(code, 0);
    assert!(out.contains("# param: state=neg_infinity\n"));
    assert!(data_rows(&out).is_empty());
    let (_, out, _) = kstab(&["equilibrium", "product-p1", "--lambda", "-1/2"]);
    assert!(out.contains("# param: state=finite\n") && out.contains("# param: exact_mass=1\n"));
}

#[test]
fn ke_bound_on_the_blow_up() {
    let (code, out, _) = kstab(&["ke-bound", "blowup-product", "--model", "blowup", "--p", "1,inf", "--nodes", "80"]);
    assert_eq!(code, 0);
    let rows = data_rows(&out);
    assert_eq!(rows.len(), 12);
    assert!(rows.iter().all(|r| r.ends_with(",true,true")));
    let (code, _, _) = kstab(&["ke-bound", "product-p1", "--model", "p1"]);
    assert_eq!(code, 1);
    let (code, _, _) = kstab(&["ke-bound", "--model", "p2", "--nodes", "40"]);
    assert_eq!(code, 0);
}

#[test]
fn verify_exact_suite_passes() {
    let (code, out, _) = kstab(&["verify", "--suite", "exact", "--kmax", "32"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(data_rows(&out).len(), 4);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(kstab(&["spectral", "product-p1"]).0, 2);
    assert_eq!(kstab(&["verify", "--suite", "nope"]).0, 1);
    assert_eq!(kstab(&["--help"]).0, 0);
}
