use std::path::Path;
use std::process::{Command, Output};

fn specunet(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_specunet"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn entries(dir: &Path) -> usize {
    std::fs::read_dir(dir).unwrap().count()
}

#[test]
fn bad_arguments_fail_and_write_nothing() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["gen-cube", "--height", "-3", "--out", "c.scub"][..],
        &["gen-cube", "--bogus", "--out", "c.scub"],
        &["--workers", "0", "gen-cube", "--out", "c.scub"],
        &["--precision", "f16", "gen-cube", "--out", "c.scub"],
        &["train", "--arch", "V-Z", "--out", "m.sunw"],
        &["train", "--batch-size", "1", "--epochs", "1", "--steps", "1", "--classes", "3", "--out", "m.sunw"],
        &["preprocess", "--model", "missing.sunw", "--input", "missing.scub", "--output", "o.scub"],
    ] {
        let out = specunet(dir.path(), args);
        assert!(!out.status.success(), "{args:?} succeeded");
        assert!(!out.stderr.is_empty(), "{args:?} printed no error");
        assert_eq!(entries(dir.path()), 0, "{args:?} left files behind");
    }
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("s.toml"), "depth = 2\nlearning_rate = 0.1\n").unwrap();
    let out = specunet(dir.path(), &["--config", "s.toml", "gen-cube", "--out", "c.scub"]);
    assert!(!out.status.success());
    assert!(!dir.path().join("c.scub").exists());
}

#[test]
fn train_then_preprocess_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let ok = |args: &[&str]| {
        let out = specunet(p, args);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        String::from_utf8(out.stdout).unwrap()
    };
    ok(&["--seed", "3", "gen-library", "--classes", "4", "--out", "lib"]);
    ok(&["--seed", "3", "gen-cube", "--library", "lib", "--height", "3", "--width", "4", "--out", "cube.scub"]);
    ok(&[
        "--seed", "3", "train", "--library", "lib", "--arch", "I-A", "--base-channels", "2", "--epochs", "2",
        "--steps", "2", "--batch-size", "4", "--val-count", "8", "--out", "m.sunw",
    ]);
    let history = std::fs::read_to_string(p.join("m.csv")).unwrap();
    assert_eq!(history.lines().count(), 3);
    ok(&["--workers", "2", "preprocess", "--model", "m.sunw", "--input", "cube.scub", "--output", "nn.scub"]);
    ok(&["classical", "--input", "cube.scub", "--output", "cl.scub"]);
    let a = specunet::cube_io::read_cube(&p.join("nn.scub")).unwrap();
    let b = specunet::cube_io::read_cube(&p.join("cl.scub")).unwrap();
    assert_eq!((a.height(), a.width()), (3, 4));
    assert_eq!(a.bands(), b.bands());
}
