use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use resolvkit_cli::{run, EXIT_CHECK_FAILED, EXIT_EXHAUSTED, EXIT_INPUT, EXIT_OK};

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("resolvkit").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn cusp_resolves_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let (code, out, _) = call(&["resolve", "y^2 - x^3", "--emit", "json,dot", "--verify", "--out", d]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("identical"));
    let json = dir.path().join("tree.json");
    assert!(dir.path().join("tree.dot").exists());
    let (code, out, _) = call(&["verify", json.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.contains("stored checks reproduced"));
}

#[test]
fn tampered_tree_fails_verification() {
    let (_, json, _) = call(&["resolve", "y^2 - x^2", "--emit", "json"]);
    let tampered = json.replacen("true", "false", 1);
    assert_ne!(tampered, json);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    std::fs::write(&path, tampered).unwrap();
    let (code, _, _) = call(&["verify", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_CHECK_FAILED);
    std::fs::write(&path, "{\"mode\": 3}").unwrap();
    assert_eq!(call(&["verify", path.to_str().unwrap()]).0, EXIT_INPUT);
}

#[test]
fn compose_example() {
    let (code, out, _) = call(&["compose", "y^2", "x + x^2", "--gamma", "3"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("coefficient: 2") && out.contains("oracle-match: true"), "{out}");
    let (code, out, _) = call(&["compose", "u*v", "x + y", "x - y", "--gamma", "1,1", "--emit", "json"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["coefficient"], "0");
    assert_eq!(call(&["compose", "y^2", "x", "--gamma", "1,1"]).0, EXIT_INPUT);
}

#[test]
fn dc_reports() {
    let (code, out, _) = call(&["dc", "gevrey:1"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("\nlog-convex") && out.contains("NOT quasianalytic") && out.contains("\nderivation-closed"), "{out}");
    let (_, out, _) = call(&["dc", "constant"]);
    assert!(out.contains("\nquasianalytic"));
    let (_, out, _) = call(&["dc", "custom:1,1,2,6", "--emit", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    // 1/(1·1) + 1/(2·2) + 2/(3·6)
    assert_eq!(v["quasianalytic"]["InconclusiveAtDepth"]["partial_sum"], "49/36");
    assert_eq!(call(&["dc", "gevrey:-1"]).0, EXIT_INPUT);
    assert_eq!(call(&["dc", "wiggly"]).0, EXIT_INPUT);
}

#[test]
fn exit_codes() {
    assert_eq!(call(&["resolve", "y^2 - x^3", "--stop-after", "1"]).0, EXIT_CHECK_FAILED);
    assert_eq!(call(&["resolve", "y^2 - x^3", "--max-blowups", "1"]).0, EXIT_EXHAUSTED);
    assert_eq!(call(&["resolve", "x - x"]).0, EXIT_EXHAUSTED);
    assert_eq!(call(&["resolve", "x^(1/2)"]).0, EXIT_INPUT);
    assert_eq!(call(&["resolve", "y^2 - x^3", "--truncation", "2"]).0, EXIT_INPUT);
    assert_eq!(call(&["resolve", "y^2 - x^3", "--base-point", "1/0,0"]).0, EXIT_INPUT);
    assert_eq!(call(&["bogus"]).0, EXIT_INPUT);
    assert_eq!(call(&["--help"]).0, EXIT_OK);
}

#[test]
fn rectilinearize_and_base_points() {
    assert_eq!(call(&["rectilinearize", "x", "x + y"]).0, EXIT_OK);
    assert_eq!(call(&["monomialize", "x^2*y^3"]).0, EXIT_OK);
    let (code, out, _) = call(&["resolve", "y^2 - x^3", "--base-point", "0,0", "--base-point", "1,1", "--emit", "text"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("(1, 1)"), "{out}");
}

#[test]
fn parallel_output_is_identical() {
    let serial = call(&["resolve", "x^2 + y^2 - z^2", "--emit", "json"]).1;
    let parallel = call(&["resolve", "x^2 + y^2 - z^2", "--emit", "json", "--parallel"]).1;
    assert_eq!(serial, parallel);
}

#[test]
fn random_inputs_never_panic() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let alphabet = b"xyz0123^*+-() /1";
    let mut parsed = 0;
    for k in 0..10_000 {
        let len = rng.gen_range(0..12);
        let bytes: Vec<u8> = (0..len)
            .map(|_| if k % 2 == 0 { rng.gen() } else { alphabet[rng.gen_range(0..alphabet.len())] })
            .collect();
        let text = String::from_utf8_lossy(&bytes).into_owned();
        let (code, _, _) = call(&["resolve", &text, "--truncation", "6", "--max-blowups", "4"]);
        assert!([EXIT_OK, EXIT_CHECK_FAILED, EXIT_EXHAUSTED, EXIT_INPUT].contains(&code), "{text:?} gave {code}");
        if code != EXIT_INPUT {
            parsed += 1;
        }
    }
    assert!(parsed > 0);
}

#[test]
fn binary_honours_the_truncation_variable() {
    let bin = env!("CARGO_BIN_EXE_resolvkit");
    let ok = Command::new(bin).args(["resolve", "y^2 - x^3"]).env("RESOLVKIT_TRUNCATION", "12").output().unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    let bad = Command::new(bin).args(["resolve", "y^2 - x^3"]).env("RESOLVKIT_TRUNCATION", "3").output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_INPUT));
    let json = Command::new(bin).args(["resolve", "y^2 - x^3", "--emit", "json"]).env("RESOLVKIT_TRUNCATION", "12").output().unwrap();
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v["truncation"], 12);
}
