#![allow(dead_code)]

use std::path::Path;
use std::process::Command;

pub const SEED_HEX: &str = "000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f";

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the binary in `dir` with no `CSEV_*` variables inherited.
pub fn csev(dir: &Path, args: &[&str]) -> Run {
    csev_env(dir, args, &[])
}

pub fn csev_env(dir: &Path, args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_csev"));
    cmd.current_dir(dir).args(args);
    for (k, _) in std::env::vars() {
        if k.starts_with("CSEV_") {
            cmd.env_remove(k);
        }
    }
    for (k, v) in env {
        cmd.env(k, v);
    }
    let o = cmd.output().expect("spawn csev");
    Run {
        code: o.status.code().unwrap_or(-1),
        stdout: String::from_utf8(o.stdout).unwrap(),
        stderr: String::from_utf8(o.stderr).unwrap(),
    }
}

/// Value of `key` in the first machine line of `kind`.
pub fn field(stdout: &str, kind: &str, key: &str) -> Option<String> {
    stdout
        .lines()
        .filter(|l| l.split(' ').next() == Some(kind))
        .flat_map(|l| l.split(' ').skip(1))
        .find_map(|kv| kv.strip_prefix(key)?.strip_prefix('=').map(str::to_string))
}

/// setup, seeded keygen, and ingest of `n` synthetic events.
pub fn populated(dir: &Path, n: usize) {
    assert_eq!(csev(dir, &["setup"]).code, 0);
    assert_eq!(csev(dir, &["keygen", "--seed", SEED_HEX]).code, 0);
    let ns = n.to_string();
    assert_eq!(
        csev(dir, &["synth", "--n", &ns, "--out", "events.jsonl"]).code,
        0
    );
    let r = csev(dir, &["ingest", "events.jsonl"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
}

pub fn flip_log_byte(dir: &Path, record: u64, offset: u64) {
    let path = dir.join("evidence.csel");
    let mut bytes = std::fs::read(&path).unwrap();
    let log = csev::store::EvidenceLog::open(&path, csev::store::Durability::Sync).unwrap();
    let at = (log.header_len() + record * log.record_size() + offset) as usize;
    bytes[at] ^= 0x01;
    std::fs::write(&path, bytes).unwrap();
}
