//! End-to-end tests running the compiled binary.

use pbmstego::{encode_pbm, BinaryImage, PbmVariant};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pbmstego"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin()
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Deterministic busy cover: no uniform blocks, but not a trivial pattern.
fn test_cover(w: usize, h: usize) -> BinaryImage {
    BinaryImage::from_fn(w, h, |x, y| {
        let v = x
            .wrapping_mul(31)
            .wrapping_add(y.wrapping_mul(17))
            .wrapping_add((x * y) % 7);
        (v % 3 == 0) as u8
    })
}

fn write_cover(dir: &Path, name: &str, img: &BinaryImage, variant: PbmVariant) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, encode_pbm(img, variant)).unwrap();
    path
}

#[test]
fn embed_extract_round_trip_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let cover = test_cover(60, 45);
    write_cover(dir.path(), "cover.pbm", &cover, PbmVariant::RawP4);
    std::fs::write(dir.path().join("msg.bin"), b"round trip payload \x00\xff").unwrap();

    let out = run(
        &[
            "embed",
            "-i",
            "cover.pbm",
            "-o",
            "stego.pbm",
            "-m",
            "msg.bin",
            "--seed",
            "7",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("blocks_used="));

    let out = run(
        &[
            "extract",
            "-i",
            "stego.pbm",
            "-o",
            "recovered.bin",
            "--seed",
            "7",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(
        std::fs::read(dir.path().join("recovered.bin")).unwrap(),
        b"round trip payload \x00\xff"
    );

    // The stego image stays a valid PBM of the input variant.
    let stego = std::fs::read(dir.path().join("stego.pbm")).unwrap();
    assert!(stego.starts_with(b"P4"));
}

#[test]
fn embed_extract_with_key_list_and_text() {
    let dir = tempfile::tempdir().unwrap();
    let cover = test_cover(50, 50);
    write_cover(dir.path(), "cover.pbm", &cover, PbmVariant::AsciiP1);
    let blocks = 10 * 10;
    let keys: String = (0..blocks).map(|i| format!("{}\n", i % 5 + 1)).collect();
    std::fs::write(dir.path().join("keys.txt"), keys).unwrap();

    let out = run(
        &[
            "embed",
            "-i",
            "cover.pbm",
            "-o",
            "stego.pbm",
            "--text",
            "key list mode",
            "--keys",
            "keys.txt",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));

    let out = run(
        &[
            "extract",
            "-i",
            "stego.pbm",
            "-o",
            "out.bin",
            "--keys",
            "keys.txt",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(
        std::fs::read(dir.path().join("out.bin")).unwrap(),
        b"key list mode"
    );

    // Output variant follows the input: P1 in, P1 out.
    let stego = std::fs::read(dir.path().join("stego.pbm")).unwrap();
    assert!(stego.starts_with(b"P1"));
}

#[test]
fn capacity_of_standard_image() {
    let dir = tempfile::tempdir().unwrap();
    let cover = test_cover(512, 512);
    write_cover(dir.path(), "big.pbm", &cover, PbmVariant::RawP4);

    let out = run(&["capacity", "-i", "big.pbm"], dir.path());
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("gross_bytes=5202"), "{text}");
    assert!(text.contains("blocks=10404"), "{text}");

    let out = run(
        &["capacity", "-i", "big.pbm", "--format", "json"],
        dir.path(),
    );
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["gross_bytes"], 5202);
    assert_eq!(json["gross_bits"], 41616);
}

#[test]
fn metrics_reports_identity_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let cover = test_cover(30, 30);
    write_cover(dir.path(), "a.pbm", &cover, PbmVariant::RawP4);
    write_cover(dir.path(), "b.pbm", &cover, PbmVariant::AsciiP1);

    let out = run(&["metrics", "-a", "a.pbm", "-b", "b.pbm"], dir.path());
    assert!(out.status.success());
    assert!(stdout(&out).contains("similarity=1"), "{}", stdout(&out));

    let out = run(
        &["metrics", "-a", "a.pbm", "-b", "b.pbm", "--format", "json"],
        dir.path(),
    );
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["similarity"], 1.0);
    assert_eq!(json["std_dev_delta"], 0.0);
}

#[test]
fn cpt_round_trip_default_and_custom_config() {
    let dir = tempfile::tempdir().unwrap();
    let cover = test_cover(40, 40);
    write_cover(dir.path(), "cover.pbm", &cover, PbmVariant::RawP4);
    std::fs::write(dir.path().join("msg.bin"), b"baseline").unwrap();

    let out = run(
        &[
            "cpt-embed",
            "-i",
            "cover.pbm",
            "-o",
            "stego.pbm",
            "-m",
            "msg.bin",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let out = run(
        &["cpt-extract", "-i", "stego.pbm", "-o", "out.bin"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(
        std::fs::read(dir.path().join("out.bin")).unwrap(),
        b"baseline"
    );

    // Explicit 2x2/r=2 config file.
    std::fs::write(dir.path().join("cfg.txt"), "2 2 2\n01\n10\n1 2\n3 1\n").unwrap();
    let out = run(
        &[
            "cpt-embed",
            "-i",
            "cover.pbm",
            "-o",
            "s2.pbm",
            "--text",
            "custom cfg",
            "--cpt-config",
            "cfg.txt",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let out = run(
        &[
            "cpt-extract",
            "-i",
            "s2.pbm",
            "-o",
            "o2.bin",
            "--cpt-config",
            "cfg.txt",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(
        std::fs::read(dir.path().join("o2.bin")).unwrap(),
        b"custom cfg"
    );
}

#[test]
fn exit_codes_follow_the_contract() {
    let dir = tempfile::tempdir().unwrap();
    let cover = test_cover(25, 25);
    write_cover(dir.path(), "cover.pbm", &cover, PbmVariant::RawP4);

    // 1: usage errors.
    let out = run(&["embed", "--no-such-flag"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let out = run(
        &[
            "embed",
            "-i",
            "cover.pbm",
            "-o",
            "s.pbm",
            "--text",
            "x",
            "--seed",
            "1",
            "--keys",
            "k.txt",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1), "seed and keys must conflict");
    let out = run(&["embed", "-i", "cover.pbm", "-o", "s.pbm"], dir.path());
    assert_eq!(out.status.code(), Some(1), "a message source is required");

    // 2: I/O and format errors.
    let out = run(&["capacity", "-i", "missing.pbm"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    std::fs::write(dir.path().join("not_a_pbm.pbm"), b"P6\n1 1\n255\n...").unwrap();
    let out = run(&["capacity", "-i", "not_a_pbm.pbm"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("magic"), "{}", stderr(&out));

    // 3: capacity and extraction errors, with the shortfall spelled out.
    // 25x25 -> 25 blocks -> net capacity 8 bytes.
    std::fs::write(dir.path().join("big.bin"), vec![0u8; 100]).unwrap();
    let out = run(
        &["embed", "-i", "cover.pbm", "-o", "s.pbm", "-m", "big.bin"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
    let err = stderr(&out);
    assert!(err.contains("92 bytes over"), "{err}");

    let blank = BinaryImage::new(30, 30);
    write_cover(dir.path(), "blank.pbm", &blank, PbmVariant::RawP4);
    let out = run(&["extract", "-i", "blank.pbm", "-o", "o.bin"], dir.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn inputs_are_never_modified_and_outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cover = test_cover(45, 45);
    let cover_path = write_cover(dir.path(), "cover.pbm", &cover, PbmVariant::RawP4);
    let before = std::fs::read(&cover_path).unwrap();

    let args = [
        "embed",
        "-i",
        "cover.pbm",
        "-o",
        "s1.pbm",
        "--text",
        "same in, same out",
        "--seed",
        "3",
    ];
    assert!(run(&args, dir.path()).status.success());
    let first = std::fs::read(dir.path().join("s1.pbm")).unwrap();

    let args = [
        "embed",
        "-i",
        "cover.pbm",
        "-o",
        "s2.pbm",
        "--text",
        "same in, same out",
        "--seed",
        "3",
    ];
    assert!(run(&args, dir.path()).status.success());
    let second = std::fs::read(dir.path().join("s2.pbm")).unwrap();

    assert_eq!(
        first, second,
        "identical invocations must match bit for bit"
    );
    assert_eq!(std::fs::read(&cover_path).unwrap(), before, "input changed");
}

#[test]
fn help_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["--help"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("embed"));
}
