use std::process::Command;

fn hsplab(args: &[&str], seed_env: Option<&str>) -> (i32, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hsplab"));
    cmd.args(args).env_remove("HSPLAB_SEED");
    if let Some(s) = seed_env {
        cmd.env("HSPLAB_SEED", s);
    }
    let out = cmd.output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn exit_codes() {
    assert_eq!(hsplab(&["pell", "5"], None).0, 0);
    assert_eq!(hsplab(&["no-such-command"], None).0, 2);
    assert_eq!(hsplab(&["factor", "16"], None).0, 2);
    // 3 is outside the subgroup generated by 2 modulo 7.
    assert_eq!(hsplab(&["dlog", "2", "3", "7"], None).0, 1);
}

#[test]
fn seed_from_environment() {
    let (_, a) = hsplab(&["hidden-shift", "8", "3", "--json"], Some("42"));
    let (_, b) = hsplab(&["hidden-shift", "8", "3", "--json", "--seed", "42"], None);
    let (_, c) = hsplab(&["hidden-shift", "8", "3", "--json"], None);
    assert_eq!(a, b);
    assert!(c.contains("\"seed\":0"));
    assert_eq!(hsplab(&["pell", "5"], Some("not-a-number")).0, 2);
}
