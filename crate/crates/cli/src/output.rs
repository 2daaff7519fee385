//! Staged output files, committed together by write-then-rename, plus the
//! run manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::Failure;

#[derive(Debug, Serialize)]
struct InputRecord {
    path: String,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool_version: &'a str,
    command: &'a str,
    argv: &'a [String],
    seed: u64,
    threads: usize,
    inputs: &'a [InputRecord],
    outputs: Vec<String>,
    wall_clock_seconds: f64,
}

pub struct Run {
    command: &'static str,
    argv: Vec<String>,
    seed: u64,
    dir: PathBuf,
    started: Instant,
    inputs: Vec<InputRecord>,
    files: Vec<(String, Vec<u8>)>,
}

impl Run {
    pub fn new(command: &'static str, seed: u64, dir: &Path) -> Self {
        Self {
            command,
            argv: std::env::args().collect(),
            seed,
            dir: dir.to_path_buf(),
            started: Instant::now(),
            inputs: Vec::new(),
            files: Vec::new(),
        }
    }

    /// Reads an input file and records its digest.
    pub fn read(&mut self, path: &Path) -> Result<String, Failure> {
        let bytes = fs::read(path)
            .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
        self.inputs.push(InputRecord {
            path: path.display().to_string(),
            sha256: hex(&Sha256::digest(&bytes)),
        });
        String::from_utf8(bytes)
            .map_err(|_| Failure::Input(format!("{} is not valid UTF-8", path.display())))
    }

    pub fn add(&mut self, name: &str, contents: impl Into<Vec<u8>>) {
        self.files.push((name.to_string(), contents.into()));
    }

    /// Writes every staged file and the manifest to temporaries, then renames
    /// them into place. Returns the final paths of the staged files.
    pub fn commit(mut self) -> Result<Vec<PathBuf>, Failure> {
        let io = |what: &str, p: &Path, e: std::io::Error| {
            Failure::Input(format!("cannot {what} {}: {e}", p.display()))
        };
        fs::create_dir_all(&self.dir).map_err(|e| io("create", &self.dir, e))?;
        let outputs: Vec<PathBuf> = self.files.iter().map(|(n, _)| self.dir.join(n)).collect();
        let manifest = Manifest {
            tool_version: polynet::TOOL_VERSION,
            command: self.command,
            argv: &self.argv,
            seed: self.seed,
            threads: rayon::current_num_threads(),
            inputs: &self.inputs,
            outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
        };
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        self.files.push(("manifest.json".into(), text.into_bytes()));

        let mut staged = Vec::with_capacity(self.files.len());
        for (name, bytes) in &self.files {
            let tmp = self.dir.join(format!(".{name}.tmp{}", std::process::id()));
            if let Err(e) = fs::write(&tmp, bytes) {
                for (t, _) in &staged {
                    let _ = fs::remove_file(t);
                }
                return Err(io("write", &tmp, e));
            }
            staged.push((tmp, self.dir.join(name)));
        }
        for (tmp, dest) in &staged {
            fs::rename(tmp, dest).map_err(|e| io("rename into", dest, e))?;
        }
        Ok(outputs)
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
