use std::path::PathBuf;
use std::process::{Command, Output};

const FIB: &str = r#"{"n":2,"alphabet":["a","b"],"rules":{"a":["aab"],"b":["ba"]}}"#;

fn workdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("bs-tiler-cli-{name}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(dir.join("fib.json"), FIB).unwrap();
    dir
}

fn run(dir: &PathBuf, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bs-tiler")).args(args).current_dir(dir).env_remove("BS_TILER_SEED").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn normalize_prints_normal_form() {
    let dir = workdir("normalize");
    let o = run(&dir, &["normalize", "a t"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "t^1 a^2 t^0");
    let o = run(&dir, &["--n", "3", "normalize", "T a t"]);
    assert_eq!(stdout(&o).trim(), "t^0 a^3 t^0");
}

#[test]
fn usage_errors_exit_two() {
    let dir = workdir("usage");
    assert_eq!(run(&dir, &[]).status.code(), Some(2));
    assert_eq!(run(&dir, &["nonsense"]).status.code(), Some(2));
    assert_eq!(run(&dir, &["normalize", "q"]).status.code(), Some(2));
    assert_eq!(run(&dir, &["subst", "--subst", "nope.json"]).status.code(), Some(2));
    assert_eq!(run(&dir, &["--help"]).status.code(), Some(0));
}

#[test]
fn json_output() {
    let dir = workdir("json");
    let o = run(&dir, &["--json", "subst", "--subst", "fib.json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v.is_object());
    let o = run(&dir, &["--json", "rect", "2", "4"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v.to_string().contains("120"));
}

#[test]
fn grow_encode_check_pipeline() {
    let dir = workdir("pipeline");
    let grow = run(&dir, &["--seed", "4", "grow", "--subst", "fib.json", "--letter", "b", "--up", "1", "-o", "w.json"]);
    assert_eq!(grow.status.code(), Some(0), "{}", String::from_utf8_lossy(&grow.stderr));
    assert_eq!(run(&dir, &["encode", "w.json", "--support", "2,3", "-o", "p.json"]).status.code(), Some(0));
    let check = run(&dir, &["check", "--subst", "fib.json", "--samples", "20", "p.json"]);
    assert_eq!(check.status.code(), Some(0), "{}", stdout(&check));
    let svg = run(&dir, &["render", "tiling", "w.json"]);
    assert!(stdout(&svg).starts_with("<svg"));
}

#[test]
fn robinson_check_exit_codes() {
    let dir = workdir("robinson");
    std::fs::write(dir.join("good.txt"), "BCBCB\nDDEDD\n").unwrap();
    std::fs::write(dir.join("bad.txt"), "BCBCB\nBCBCB\n").unwrap();
    assert_eq!(run(&dir, &["robinson", "check", "good.txt"]).status.code(), Some(0));
    assert_eq!(run(&dir, &["robinson", "check", "bad.txt"]).status.code(), Some(1));
}
