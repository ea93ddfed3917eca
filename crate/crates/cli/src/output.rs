//! Output directory with atomic, no-clobber file writes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

pub struct OutDir {
    root: PathBuf,
    force: bool,
}

impl OutDir {
    pub fn new(root: PathBuf, force: bool) -> Self {
        Self { root, force }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    /// Fails before any work is done if a planned output already exists.
    pub fn check(&self, names: &[&str]) -> Result<(), CliError> {
        if self.force {
            return Ok(());
        }
        for n in names {
            let p = self.path(n);
            if p.exists() {
                return Err(CliError::Output(format!(
                    "{} exists; pass --force to overwrite",
                    p.display()
                )));
            }
        }
        Ok(())
    }

    /// Writes `name` through a temporary file in the same directory and a rename.
    pub fn write_with(
        &self,
        name: &str,
        fill: impl FnOnce(&mut Vec<u8>) -> Result<(), CliError>,
    ) -> Result<PathBuf, CliError> {
        let target = self.path(name);
        self.check(&[name])?;
        if let Some(dir) = target.parent() {
            fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        }
        let mut buf = Vec::new();
        fill(&mut buf)?;
        let tmp = temp_name(&target);
        let write = || -> std::io::Result<()> {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(&buf)?;
            f.sync_all()?;
            fs::rename(&tmp, &target)
        };
        write().map_err(|e| {
            let _ = fs::remove_file(&tmp);
            io_err(&target, e)
        })?;
        Ok(target)
    }

    pub fn write_json<V: Serialize>(&self, name: &str, value: &V) -> Result<PathBuf, CliError> {
        self.write_with(name, |buf| {
            serde_json::to_writer_pretty(&mut *buf, value)
                .map_err(|e| CliError::Output(format!("serializing {name}: {e}")))?;
            buf.push(b'\n');
            Ok(())
        })
    }
}

fn temp_name(target: &Path) -> PathBuf {
    let name = target.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    target.with_file_name(format!(".{name}.tmp{}", std::process::id()))
}

fn io_err(p: &Path, e: std::io::Error) -> CliError {
    CliError::Output(format!("{}: {e}", p.display()))
}
