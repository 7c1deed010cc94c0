use std::process::{Command, Output, Stdio};

fn dnv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dnv"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn build_emits_a_checkable_document() {
    let out = dnv(&["build", "yp"]);
    assert!(out.status.success());
    let doc = String::from_utf8(out.stdout).unwrap();
    assert!(doc.contains("\"schema\": \"dnv-state/1\""));
    assert!(doc.contains("\"class\": \"P\""));

    let mut check = Command::new(env!("CARGO_BIN_EXE_dnv"))
        .args(["check", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .expect("binary runs");
    use std::io::Write;
    check
        .stdin
        .take()
        .unwrap()
        .write_all(doc.as_bytes())
        .unwrap();
    let out = check.wait_with_output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("criterion: true"));
    assert!(text.contains("lp: true"));
    assert!(text.contains("certificate witness"));
}

#[test]
fn build_output_is_deterministic() {
    for reference in ["yp", "yt"] {
        let a = dnv(&["build", reference]);
        let b = dnv(&["build", reference]);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn enumerate_csv_reports_totals() {
    let out = dnv(&["enumerate", "--class", "t", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let last = text.lines().last().unwrap();
    assert!(last.starts_with("total,"), "missing totals line: {last}");
    assert!(last.contains("symmetric,11"));
}

#[test]
fn check_rejects_malformed_documents_with_exit_two() {
    let mut check = Command::new(env!("CARGO_BIN_EXE_dnv"))
        .args(["check", "-"])
        .stdin(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    use std::io::Write;
    check
        .stdin
        .take()
        .unwrap()
        .write_all(b"{\"schema\": \"nonsense\"}")
        .unwrap();
    let out = check.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    let out = dnv(&["enumerate", "--class", "q"]);
    assert_eq!(out.status.code(), Some(2));
}
