//! Run directories: atomic writes, refuse-or-resume, and the manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const CONFIG_FILE: &str = "config.txt";
const TMP_SUFFIX: &str = ".partial";

/// A run directory. All paths handed to it are relative, `/`-separated.
#[derive(Debug, Clone)]
pub struct OutputDir {
    root: PathBuf,
}

fn is_empty_dir(p: &Path) -> Result<bool> {
    Ok(fs::read_dir(p).with_context(|| format!("listing {}", p.display()))?.next().is_none())
}

impl OutputDir {
    /// Opens `root` for a run whose identity is `config_text`.
    ///
    /// A missing or empty directory starts a fresh run. A non-empty one is
    /// refused unless `resume` is set, and then only when its stored
    /// configuration matches `config_text` exactly. Leftover partial files
    /// and the old manifest are removed before resuming.
    pub fn prepare(root: &Path, config_text: &str, resume: bool) -> Result<Self> {
        let dir = OutputDir { root: root.to_path_buf() };
        if !root.exists() || is_empty_dir(root)? {
            fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
            dir.write(CONFIG_FILE, config_text.as_bytes())?;
            return Ok(dir);
        }
        if !root.is_dir() {
            bail!("{} exists and is not a directory", root.display());
        }
        if !resume {
            bail!(
                "output directory {} is not empty; pass --resume to continue that run or choose another directory",
                root.display()
            );
        }
        let stored = fs::read_to_string(root.join(CONFIG_FILE))
            .with_context(|| format!("{} has no {CONFIG_FILE}; it was not written by this tool", root.display()))?;
        if stored != config_text {
            bail!(
                "cannot resume in {}: its configuration differs from the current one",
                root.display()
            );
        }
        for f in dir.list_files()? {
            if f.ends_with(TMP_SUFFIX) || f == MANIFEST_FILE {
                fs::remove_file(dir.path(&f))?;
            }
        }
        Ok(dir)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path(&self, rel: &str) -> PathBuf {
        self.root.join(rel)
    }

    pub fn exists(&self, rel: &str) -> bool {
        self.path(rel).is_file()
    }

    /// Writes through a sibling temporary file and a rename, so a file is
    /// either absent or complete.
    pub fn write(&self, rel: &str, bytes: &[u8]) -> Result<()> {
        let target = self.path(rel);
        if let Some(parent) = target.parent() {
            fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
        }
        let tmp = self.path(&format!("{rel}{TMP_SUFFIX}"));
        fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
        fs::rename(&tmp, &target).with_context(|| format!("renaming to {}", target.display()))?;
        Ok(())
    }

    pub fn read_to_string(&self, rel: &str) -> Result<String> {
        let p = self.path(rel);
        fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))
    }

    /// Every regular file below the root, relative and sorted.
    pub fn list_files(&self) -> Result<Vec<String>> {
        let mut out = Vec::new();
        let mut stack = vec![self.root.clone()];
        while let Some(d) = stack.pop() {
            for entry in fs::read_dir(&d).with_context(|| format!("listing {}", d.display()))? {
                let entry = entry?;
                let p = entry.path();
                if entry.file_type()?.is_dir() {
                    stack.push(p);
                } else {
                    let rel = p.strip_prefix(&self.root).expect("below root");
                    let parts: Vec<_> = rel.components().map(|c| c.as_os_str().to_string_lossy()).collect();
                    out.push(parts.join("/"));
                }
            }
        }
        out.sort();
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedJob {
    pub temperament: String,
    pub kind: String,
    pub beta: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: BTreeMap<String, String>,
    pub files: Vec<FileEntry>,
    pub skipped: Vec<SkippedJob>,
    pub notes: Vec<String>,
    /// Wall-clock seconds per stage; only recorded on request since it
    /// breaks byte-identical reruns.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<BTreeMap<String, f64>>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn entry(dir: &OutputDir, rel: &str) -> Result<FileEntry> {
    let bytes = fs::read(dir.path(rel)).with_context(|| format!("reading {rel}"))?;
    Ok(FileEntry {
        path: rel.to_string(),
        bytes: bytes.len() as u64,
        sha256: sha256_hex(&bytes),
    })
}

impl RunManifest {
    pub fn new(command: &str, config: BTreeMap<String, String>) -> Self {
        RunManifest {
            tool: "syntonet".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config,
            files: Vec::new(),
            skipped: Vec::new(),
            notes: Vec::new(),
            timing: None,
        }
    }

    /// Lists and checksums every file in `dir`, then writes the manifest as
    /// the last file of the run.
    pub fn finalize(mut self, dir: &OutputDir) -> Result<Self> {
        self.files = dir
            .list_files()?
            .iter()
            .filter(|f| f.as_str() != MANIFEST_FILE)
            .map(|f| entry(dir, f))
            .collect::<Result<_>>()?;
        let mut text = serde_json::to_string_pretty(&self)?;
        text.push('\n');
        dir.write(MANIFEST_FILE, text.as_bytes())?;
        Ok(self)
    }
}

/// Checks that the manifest in `root` lists exactly the files present and
/// that every checksum matches.
pub fn verify_manifest(root: &Path) -> Result<RunManifest> {
    let dir = OutputDir { root: root.to_path_buf() };
    let manifest: RunManifest =
        serde_json::from_str(&dir.read_to_string(MANIFEST_FILE)?).context("parsing manifest")?;
    let on_disk: Vec<String> = dir.list_files()?.into_iter().filter(|f| f != MANIFEST_FILE).collect();
    let listed: Vec<String> = manifest.files.iter().map(|f| f.path.clone()).collect();
    if on_disk != listed {
        let extra: Vec<_> = on_disk.iter().filter(|f| !listed.contains(f)).collect();
        let missing: Vec<_> = listed.iter().filter(|f| !on_disk.contains(f)).collect();
        bail!("manifest out of date: unlisted {extra:?}, missing {missing:?}");
    }
    for f in &manifest.files {
        if entry(&dir, &f.path)? != *f {
            bail!("checksum mismatch for {}", f.path);
        }
    }
    Ok(manifest)
}
