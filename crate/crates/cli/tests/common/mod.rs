//! Helpers for driving the `safekeeper` binary.
#![allow(dead_code)]

use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Output, Stdio};

pub const ADMIN: &str = "admin-token";
pub const OWNER: &str = "owner-token";
pub const OWNER_SUBJECT: &str = "dev01@example.com";

pub fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_safekeeper"));
    cmd.env_remove("SAFEKEEPER_URL")
        .env_remove("SAFEKEEPER_TOKEN")
        .env_remove("SAFEKEEPER_DATA_DIR")
        .env_remove("SAFEKEEPER_LISTEN");
    cmd
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

pub fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}):\n{}\nstderr:\n{}",
            stdout(out),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

pub fn p(path: &Path) -> &str {
    path.to_str().expect("utf-8 path")
}

pub fn write_config(dir: &Path, data_dir: &Path) -> PathBuf {
    let path = dir.join("safekeeper.toml");
    let text = format!(
        r#"listen = "127.0.0.1:0"
data_dir = "{}"

[[principals]]
subject = "admin"
role = "admin"
token = "{ADMIN}"

[[principals]]
subject = "{OWNER_SUBJECT}"
role = "owner"
token = "{OWNER}"
"#,
        data_dir.display()
    );
    std::fs::write(&path, text).unwrap();
    path
}

/// A `safekeeper serve` child process.
pub struct Served {
    pub child: Child,
    pub url: String,
}

impl Served {
    pub fn start(config: &Path) -> Served {
        let mut child = bin()
            .args(["serve", "--config", p(config)])
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .expect("serve starts");
        let mut line = String::new();
        BufReader::new(child.stdout.take().unwrap())
            .read_line(&mut line)
            .unwrap();
        let url = line
            .trim()
            .strip_prefix("listening on ")
            .unwrap_or_else(|| panic!("unexpected first line: {line:?}"))
            .to_owned();
        Served { child, url }
    }

    /// SIGKILL, no chance to clean up.
    pub fn kill(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

impl Drop for Served {
    fn drop(&mut self) {
        self.kill();
    }
}
