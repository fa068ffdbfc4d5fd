use std::path::Path;
use std::process::{Command, Output};

use qcldpc::bits::pack;
use qcldpc::io::{read_decode_results, LlrFile};
use qcldpc::{Arithmetic, LlrBlock};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn qcldpc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcldpc"))
        .args(args)
        .env_remove("QCLDPC_WORKERS")
        .output()
        .expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn matrix_prints_grid_and_structure() {
    let out = qcldpc(&["matrix", "--std", "wimax", "--n", "576", "--rate", "1/2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let grid: Vec<&str> = text
        .lines()
        .skip(1)
        .take_while(|l| !l.starts_with("structure"))
        .collect();
    assert_eq!(grid.len(), 12);
    assert!(grid.iter().all(|l| l.split_whitespace().count() == 24));
    assert!(text.contains("structure: OK"));
    assert!(text.contains("# alist\n576 288\n"));
}

#[test]
fn matrix_size_report() {
    let out = qcldpc(&["matrix", "--std", "wimax", "--n", "576", "--rate", "1/2", "--sizes", "--no-alist"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("fixed16"));
    assert!(text.contains("total"));
    assert!(!text.contains("# alist"));
}

#[test]
fn encode_all_zero() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("info.bin");
    let output = dir.path().join("cw.bin");
    std::fs::write(&input, vec![0u8; 2 * 324]).unwrap();
    let out = qcldpc(&["encode", "--std", "wifi", "--n", "648", "--rate", "1/2", "-i", p(&input), "-o", p(&output)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read(&output).unwrap(), vec![0u8; 2 * 648]);
}

/// encode -> noiseless LLRs -> decode recovers the information bits.
fn pipe(std: &str, n: usize, rate: &str, k: usize, variant: &str, arithmetic: &str) {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
    let frames = 3;
    let info: Vec<u8> = (0..frames * k).map(|_| rng.random::<bool>() as u8).collect();
    let info_path = dir.path().join("info.bin");
    let llr_path = dir.path().join("llr.bin");
    let dec_path = dir.path().join("dec.bin");
    let packed = k % 8 == 0;
    std::fs::write(&info_path, if packed { pack(&info).unwrap() } else { info.clone() }).unwrap();
    let code = ["--std", std, "--n", &n.to_string(), "--rate", rate];
    let mut args = vec!["encode"];
    args.extend(code);
    args.extend(["--variant", variant, "--llr", "--arithmetic", arithmetic]);
    if packed {
        args.push("--packed");
    }
    args.extend(["-i", p(&info_path), "-o", p(&llr_path)]);
    let out = qcldpc(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let mut args = vec!["decode"];
    args.extend(code);
    args.extend(["-i", p(&llr_path), "-o", p(&dec_path), "--workers", "2"]);
    let out = qcldpc(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let records = read_decode_results(&mut std::fs::read(&dec_path).unwrap().as_slice(), n).unwrap();
    assert_eq!(records.len(), frames);
    for (i, r) in records.iter().enumerate() {
        assert_eq!(&r.hard_bits[..k], &info[i * k..(i + 1) * k], "{std} {n} {rate} {variant}");
        assert!(r.converged);
        assert_eq!(r.iterations, 1);
    }
}

#[test]
fn pipe_law() {
    for arithmetic in ["float32", "fixed16"] {
        pipe("wifi", 648, "1/2", 324, "array", arithmetic);
        pipe("wifi", 1944, "5/6", 1620, "array", arithmetic);
        pipe("wimax", 576, "1/2", 288, "packed", arithmetic);
        pipe("wimax", 576, "1/2", 288, "array", arithmetic);
        pipe("wimax", 2304, "2/3B", 1536, "packed", arithmetic);
        pipe("wimax", 1344, "3/4A", 1008, "array", arithmetic);
    }
}

#[test]
fn llr_file_from_cli_has_documented_header() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("info.bin");
    let output = dir.path().join("llr.bin");
    std::fs::write(&input, vec![1u8; 288]).unwrap();
    let out = qcldpc(&[
        "encode", "--std", "wimax", "--n", "576", "--rate", "1/2", "--llr", "--arithmetic", "fixed16",
        "--ebn0", "3.0", "-i", p(&input), "-o", p(&output),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let bytes = std::fs::read(&output).unwrap();
    assert_eq!(&bytes[..4], b"QLLR");
    assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 576);
    assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 1);
    assert_eq!((bytes[12], bytes[13]), (1, 10));
    assert_eq!(bytes.len(), 16 + 2 * 576);
    let file = LlrFile::read_from(&mut bytes.as_slice()).unwrap();
    assert_eq!(file.arithmetic, Arithmetic::Fixed16);
    let LlrBlock::Fixed16(v) = &file.blocks[0] else { panic!() };
    assert!(v.iter().all(|&x| x.abs() <= 1023));
}

#[test]
fn simulate_is_deterministic_and_worker_independent() {
    let args = |workers: &'static str| {
        vec![
            "simulate", "--std", "wimax", "--n", "576", "--rate", "1/2", "--snr", "1.0:0.5:2.0",
            "--min-errors", "300", "--max-frames", "400", "--seed", "9", "--workers", workers,
        ]
    };
    let a = qcldpc(&args("1"));
    let b = qcldpc(&args("3"));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("ebn0_db,frames,bits,bit_errors,frame_errors,ber,fer,avg_iters"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].starts_with("1,"));
    assert!(rows[1].starts_with("1.5,"));
}

#[test]
fn workers_from_environment() {
    let run = |env: &str| {
        Command::new(env!("CARGO_BIN_EXE_qcldpc"))
            .args(["bench", "--std", "wimax", "--n", "576", "--rate", "1/2", "--rounds", "1"])
            .env("QCLDPC_WORKERS", env)
            .output()
            .unwrap()
    };
    let out = run("3");
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let line = text.lines().nth(1).unwrap();
    let fields: Vec<&str> = line.split(',').collect();
    assert_eq!(fields[2], "3");
    assert_eq!(fields[4], "30");
    assert_eq!(run("0").status.code(), Some(1));
}

#[test]
fn exit_statuses() {
    assert_eq!(qcldpc(&["matrix", "--std", "wifi", "--n", "1000", "--rate", "1/2"]).status.code(), Some(3));
    assert_eq!(qcldpc(&["matrix", "--std", "wifi", "--n", "648"]).status.code(), Some(1));
    assert_eq!(qcldpc(&["simulate", "--std", "wifi", "--n", "648", "--rate", "1/2", "--snr", "a:b"]).status.code(), Some(1));
    assert_eq!(
        qcldpc(&["decode", "--std", "wifi", "--n", "648", "--rate", "1/2", "-i", "/nonexistent"]).status.code(),
        Some(2)
    );
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("short.bin");
    std::fs::write(&bad, [0u8; 5]).unwrap();
    let out = qcldpc(&["encode", "--std", "wifi", "--n", "648", "--rate", "1/2", "-i", p(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("size mismatch"));
}
