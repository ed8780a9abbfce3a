use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

use gadtparam_core::report::validate;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gadtparam"))
        .args(args)
        .env_remove("GADTPARAM_MAX_REL_ENUM")
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.push("--json");
    let out = run(&all);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{args:?}: {e}"));
    validate(&v).unwrap_or_else(|e| panic!("{args:?}: {e}"));
    (code(&out), v)
}

fn scratch(name: &str, text: &str) -> String {
    let dir = std::env::temp_dir().join(format!("gadtparam-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn demo_fails_naively_and_passes_after_completion() {
    let out = run(&["demo", "counterexample"]);
    assert_eq!(code(&out), 1);
    let text = stdout(&out);
    let naive = text.find("naive: FAIL").expect("naive section");
    let completion = text.find("completion: PASS").expect("completion section");
    assert!(naive < completion);
    assert!(text.contains("x = pairing"));
}

#[test]
fn complete_prints_the_completed_declaration() {
    let out = run(&["complete", &data("seq.gadt"), "--decl", "Seq"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("data Seq_c : Set → Set where"), "{text}");
    assert!(text.contains("pairing_c : ∀{α₁ α₂ β1} → (α₁ × α₂ → β1) → Seq_c α₁ → Seq_c α₂ → Seq_c β1"), "{text}");
}

#[test]
fn relate_prints_the_nested_derivation() {
    let out = run(&[
        "relate",
        &data("seq.gadt"),
        "--decl",
        "Seq",
        "--mode",
        "completion",
        "--rel",
        &data("r.rel"),
        "--lhs",
        &data("s.term"),
        "--rhs",
        &data("sp.term"),
        "--witness",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("p\u{302}airing_clift R₁ R₂ R"), "{text}");
    assert!(text.contains("(R₁ ×̂ R₂ →̂ R) id id  [equality]"), "{text}");
    assert!(text.contains("i\u{302}nj_clift R₁"), "{text}");
}

#[test]
fn print_rules_uses_the_inference_layout() {
    let out = run(&["lift", &data("seq.gadt"), "--mode", "naive", "--print-rules"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("p\u{302}airinglift"), "{text}");
    assert!(text.contains('─'), "{text}");
}

#[test]
fn reports_are_deterministic_apart_from_timings() {
    let args = ["graphlemma", &data("seq.gadt"), "--all-functions", "Bool*Bool"];
    let (_, mut a) = json(&args);
    let (_, mut b) = json(&args);
    a.as_object_mut().unwrap().remove("timings");
    b.as_object_mut().unwrap().remove("timings");
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn text_and_json_agree_on_the_verdict() {
    for args in [
        vec!["demo", "counterexample"],
        vec!["check", &data("list.gadt")],
        vec!["gmap", &data("seq.gadt"), "--fun", "swapnot", "--value", "t"],
        vec!["freetheorem", &data("seq.gadt"), "--sweep", "--type", "Unit", "--type", "Bool"],
    ] {
        let text = stdout(&run(&args));
        let (_, v) = json(&args);
        let word = match v["verdict"].as_str().unwrap() {
            "pass" => "PASS",
            "fail" => "FAIL",
            "answered" => "ANSWERED",
            "not_applicable" => "NOT APPLICABLE",
            other => panic!("{other}"),
        };
        assert!(text.ends_with(&format!("verdict: {word}\n")), "{args:?}: {text}");
    }
}

#[test]
fn named_items_and_inline_literals_are_operands() {
    let (c, v) = json(&["gmap", &data("seq.gadt"), "--fun", "swapnot", "--value", "s"]);
    assert_eq!(c, 0);
    assert_eq!(
        v["witnesses"][0]["value"],
        "pairing [Bool × Bool, Bool] (inj [Bool × Bool] (false, true)) (inj [Bool] false)"
    );
    let (c, v) = json(&[
        "relate",
        &data("list.gadt"),
        "--rel",
        "rel Bool Bool { (true, false) }",
        "--lhs",
        "xs",
        "--rhs",
        "cons [Bool] false (cons [Bool] true (nil [Bool]))",
    ]);
    assert_eq!(c, 0);
    assert_eq!(v["witnesses"][0]["verdict"], "not_related");
}

#[test]
fn exit_codes_follow_the_error_class() {
    let bad_syntax = scratch("bad.gadt", "data Seq : Set → Set where\n  inj : ∀{α} → α → ?\n");
    let out = run(&["check", &bad_syntax]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.gadt:2:"));

    let bad_kind = scratch("kind.gadt", "data T : Set → Set where\n  k : ∀{α} → Missing α → T α\n");
    assert_eq!(code(&run(&["check", &bad_kind])), 3);

    let ill_typed = run(&["gmap", &data("seq.gadt"), "--fun", "swap", "--value", "s"]);
    assert_eq!(code(&ill_typed), 3);

    assert_eq!(code(&run(&["relate", &data("seq.gadt")])), 2);
    assert_eq!(code(&run(&["check", "/nonexistent/file.gadt"])), 2);
}

#[test]
fn caps_come_from_flags_and_the_environment() {
    let args = ["preservation", &data("seq.gadt"), "--type", "Bool*Bool", "--depth", "2"];
    let out = Command::new(env!("CARGO_BIN_EXE_gadtparam"))
        .args(args)
        .env("GADTPARAM_MAX_REL_ENUM", "100")
        .output()
        .unwrap();
    assert_eq!(code(&out), 4);
    let out = Command::new(env!("CARGO_BIN_EXE_gadtparam"))
        .args(args)
        .env("GADTPARAM_MAX_REL_ENUM", "many")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    assert_eq!(code(&run(&["check", &data("seq.gadt"), "--max-depth", "100"])), 2);
    assert_eq!(code(&run(&["enumerate", &data("seq.gadt"), "--index", "Bool", "--depth", "3", "--max-depth", "2"])), 4);
}

#[test]
fn schema_is_shipped_and_parses() {
    let v: Value = serde_json::from_str(gadtparam_core::report::SCHEMA).unwrap();
    assert_eq!(v["properties"]["schema"]["const"], gadtparam_core::report::SCHEMA_VERSION);
}
