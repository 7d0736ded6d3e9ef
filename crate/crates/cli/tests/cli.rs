use std::process::Command;

use sideways_core::parse_program;

fn sideways(args: &[&str]) -> (i32, String, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_sideways")).args(args).output().unwrap();
    (
        o.status.code().unwrap(),
        String::from_utf8(o.stdout).unwrap(),
        String::from_utf8(o.stderr).unwrap(),
    )
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(sideways(&["verify", "--width", "13"]).0, 2);
    assert_eq!(sideways(&["sweep", "--width", "4", "--algo", "bogus"]).0, 2);
    assert_eq!(sideways(&["sweep", "--width", "3", "--algo", "twobit"]).0, 2);
    assert_eq!(sideways(&["gen", "--width", "4"]).0, 2);
    assert_eq!(sideways(&["frobnicate"]).0, 2);
}

#[test]
fn gen_output_parses() {
    for algo in ["wegner", "dense", "combined"] {
        let (code, text, _) = sideways(&["gen", "--algo", algo, "--width", "16"]);
        assert_eq!(code, 0);
        let p = parse_program(&text).unwrap();
        assert_eq!(p.to_string(), text);
    }
    let (_, text, _) = sideways(&["gen", "--width", "8", "--constant", "6"]);
    assert_eq!(text.matches("INC").count(), 4);
}

#[test]
fn sweep_writes_file() {
    let dir = std::env::temp_dir().join(format!("sideways-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("w4.csv");
    let (code, stdout, _) = sideways(&[
        "sweep", "--width", "4", "--algo", "wegner", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!((code, stdout.as_str()), (0, ""));
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.starts_with("input_bits,nu,output,incdec_steps,total_steps\n"));
    assert!(csv.contains("\n1011,3,3,6,20\n"));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn mutants_fail_verify_and_fuzz() {
    let (code, out, _) = sideways(&["verify", "--width", "4", "--mutant", "complementing-mov"]);
    assert_eq!(code, 1);
    assert!(out.contains("\nFAIL,"));
    let (code, out, _) = sideways(&[
        "fuzz", "--count", "2000", "--divergence-count", "10", "--budget", "5000", "--mutant", "non-wrapping-inc",
    ]);
    assert_eq!(code, 1, "{out}");
}

#[test]
fn table_markdown() {
    let (code, out, _) = sideways(&["table", "--format", "markdown"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 9);
}
