use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn e8spread(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_e8spread")).args(args).output().expect("binary runs")
}

fn certify_into(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["certify", "--out", dir.to_str().unwrap()];
    args.extend_from_slice(extra);
    e8spread(&args)
}

fn files_in(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    names.sort();
    names
}

#[test]
fn enumerate_reports_counts() {
    let out = e8spread(&["enumerate"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("expected 270 actual 270"), "{text}");
    assert!(!text.contains("FAIL"));
}

#[test]
fn enumerate_json_is_machine_readable() {
    let out = e8spread(&["enumerate", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["counts"]["roots"], 240);
    assert_eq!(v["counts"]["norm4"], 2160);
    assert_eq!(v["counts"]["isotropic_points"], 135);
    assert_eq!(v["counts"]["isotropic_4spaces"], 270);
    assert_eq!(v["counts"]["class_a"], 135);
    assert_eq!(v["counts"]["class_b"], 135);
}

#[test]
fn corrupted_gram_fails() {
    let out = e8spread(&["--test-corrupt-gram", "enumerate"]);
    assert_ne!(out.status.code(), Some(0));
    let out = e8spread(&["--test-corrupt-gram", "spread"]);
    assert_ne!(out.status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let out = certify_into(dir.path(), &["--test-corrupt-gram"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(files_in(dir.path()), ["FAILED", "certificate.txt"]);
    let cert = fs::read_to_string(dir.path().join("certificate.txt")).unwrap();
    assert!(!cert.contains("PASS Gram determinant"), "{cert}");
}

#[test]
fn certify_writes_five_files_and_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let out = certify_into(dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(files_in(dir.path()), ["certificate.txt", "frames.txt", "generators.txt", "partition.txt", "spread.txt"]);

    let paths: Vec<String> = files_in(dir.path()).iter().map(|f| dir.path().join(f).to_string_lossy().into_owned()).collect();
    let mut args = vec!["verify"];
    args.extend(paths.iter().map(String::as_str));
    let out = e8spread(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    // swap one vector between blocks 0 and 1
    let text = fs::read_to_string(dir.path().join("partition.txt")).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    let i = lines.iter().position(|l| *l == "block 0").unwrap() + 1;
    let j = lines.iter().position(|l| *l == "block 1").unwrap() + 1;
    lines.swap(i, j);
    let swapped = dir.path().join("swapped.txt");
    fs::write(&swapped, lines.join("\n") + "\n").unwrap();
    let out = e8spread(&["verify", swapped.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());

    // truncate
    let truncated = dir.path().join("truncated.txt");
    fs::write(&truncated, text.lines().take(50).collect::<Vec<_>>().join("\n")).unwrap();
    let out = e8spread(&["verify", truncated.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn certify_is_deterministic_across_runs_and_thread_counts() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert_eq!(certify_into(a.path(), &[]).status.code(), Some(0));
    assert_eq!(certify_into(b.path(), &["--threads", "1"]).status.code(), Some(0));
    for f in files_in(a.path()) {
        assert_eq!(fs::read(a.path().join(&f)).unwrap(), fs::read(b.path().join(&f)).unwrap(), "{f} differs");
    }
}

#[test]
fn class_b_and_skip_group() {
    let dir = tempfile::tempdir().unwrap();
    let out = certify_into(dir.path(), &["--class", "B", "--skip-group"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(files_in(dir.path()), ["certificate.txt", "frames.txt", "partition.txt", "spread.txt"]);
    let spread = fs::read_to_string(dir.path().join("spread.txt")).unwrap();
    assert!(spread.lines().nth(1) == Some("class B"), "{spread}");
}

#[test]
fn class_b_group_also_has_order_362880() {
    let out = e8spread(&["group", "--class", "B", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["group"]["order"], 362880);
    assert_eq!(v["group"]["block_action"]["image_order"], 181440);
}

#[test]
fn unknown_header_and_missing_file_are_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let junk = dir.path().join("junk.txt");
    fs::write(&junk, "not an artifact\n").unwrap();
    assert_eq!(e8spread(&["verify", junk.to_str().unwrap()]).status.code(), Some(2));
    let missing = dir.path().join("missing.txt");
    assert_eq!(e8spread(&["verify", missing.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn stage_commands_emit_their_artifact() {
    let out = e8spread(&["spread"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("e8spread-spread v1\nclass A\nspaces 9\n"), "{text}");
    let out = e8spread(&["frames"]);
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("e8spread-frames v1\nrows 9 frames 15\n"));
}

#[test]
fn generator_tampering_is_detected() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(certify_into(dir.path(), &[]).status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("generators.txt")).unwrap();
    // drop the last generator's recorded block image and replace with the identity
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let k = lines.iter().rposition(|l| l.starts_with("blocks ")).unwrap();
    lines[k] = "blocks 0 1 2 3 4 5 6 7 8".into();
    let tampered = dir.path().join("tampered.txt");
    fs::write(&tampered, lines.join("\n") + "\n").unwrap();
    let partition = dir.path().join("partition.txt");
    let out = e8spread(&["verify", partition.to_str().unwrap(), tampered.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}
