use std::path::PathBuf;
use std::process::{Command, Output};

fn examples() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/examples")
}

fn ex(name: &str) -> String {
    examples().join(name).to_str().unwrap().to_string()
}

fn apart(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_apart")).args(args).output().unwrap()
}

fn code(args: &[&str]) -> i32 {
    apart(args).status.code().unwrap()
}

/// Byte comparison with `tests/golden/NAME`; `WRITE_GOLDEN=1` regenerates.
fn golden(name: &str, args: &[&str]) {
    let out = apart(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("WRITE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, &out.stdout).unwrap();
    }
    let want = std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&want), "{name}");
}

#[test]
fn golden_outputs() {
    let s3 = ex("system3.sys");
    golden("system3_covering.txt", &["prove", &s3, "x", "y"]);
    golden("system3_basic.txt", &["prove", &s3, "x", "y", "--style", "basic"]);
    golden("system3_covering.json", &["prove", &s3, "x", "y", "--format", "json"]);
    golden("system3_relation.txt", &["relation", &s3]);
    golden("system3_tower.txt", &["tower", &s3]);
    golden("lts_tower.txt", &["tower", &ex("lts.sys")]);
    golden("lts_relation.txt", &["relation", &ex("lts.sys")]);
    golden("lmp_covering.txt", &["prove", &ex("lmp.sys"), "x", "y"]);
    golden("lmp_covering.json", &["prove", &ex("lmp.sys"), "x", "y", "--format", "json"]);
}

#[test]
fn exit_codes() {
    let s3 = ex("system3.sys");
    assert_eq!(code(&["check", &s3, "x", "y"]), 0);
    let out = apart(&["check", &s3, "x1", "y1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "equivalent (class: {x1, y1})\n");
    assert_eq!(code(&["prove", &s3, "x2", "y2"]), 1);
    assert_eq!(code(&["check", &s3, "x", "nope"]), 64);
    assert_eq!(code(&["check", &ex("missing.sys"), "x", "y"]), 64);
    assert_eq!(code(&["frobnicate"]), 64);
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["relation", &ex("fib.sys")]), 65);
    assert_eq!(code(&["cobisim", &ex("lts.sys")]), 65);
    assert_eq!(code(&["cobisim", &s3]), 0);
    assert_eq!(code(&["verify", &ex("fib.sys"), &ex("fib_x0_x1.json")]), 0);
}

#[test]
fn malformed_input() {
    let dir = std::env::temp_dir().join(format!("apart-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.sys");
    std::fs::write(&bad, "functor Ds Id\nstate x = dist { x: 2/3, y: 2/3 }\nstate y = dist { }\n").unwrap();
    let out = apart(&["relation", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(65));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2, column 7"), "{}", String::from_utf8_lossy(&out.stderr));
    let junk = dir.join("junk.json");
    std::fs::write(&junk, "{ not json").unwrap();
    assert_eq!(code(&["verify", &ex("system3.sys"), junk.to_str().unwrap()]), 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn verify_reports_the_failing_node() {
    let dir = std::env::temp_dir().join(format!("apart-verify-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let s3 = ex("system3.sys");
    let proof = dir.join("p.json");
    assert_eq!(code(&["prove", &s3, "x", "y", "--format", "json", "-o", proof.to_str().unwrap()]), 0);
    let out = apart(&["verify", &s3, proof.to_str().unwrap()]);
    assert_eq!(String::from_utf8_lossy(&out.stdout), "valid: x # y\n");
    // the first child claims x1 # x2 through the wrong mass
    let text = std::fs::read_to_string(&proof).unwrap();
    let broken = text.replacen("\"right\": \"1/1\"", "\"right\": \"1/3\"", 1);
    assert_ne!(text, broken);
    std::fs::write(&proof, broken).unwrap();
    let out = apart(&["verify", &s3, proof.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.starts_with("invalid at root.children[0] (x1 # x2): "), "{stdout}");
    // the same proof against a different system text warns but still checks
    let other = dir.join("other.sys");
    std::fs::write(&other, std::fs::read_to_string(&s3).unwrap() + "state z = dist { }\n").unwrap();
    std::fs::write(&proof, text).unwrap();
    let out = apart(&["verify", other.to_str().unwrap(), proof.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("warning:"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn random_is_seeded() {
    let a = apart(&["random", "--seed", "7"]);
    let b = apart(&["random", "--seed", "7"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = apart(&["random", "--seed", "7", "--subdist", "--states", "4"]);
    assert!(String::from_utf8_lossy(&c.stdout).starts_with("functor Ds Id"));
}
