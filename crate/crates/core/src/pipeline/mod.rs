//! Staged, restartable pipeline run from a [`RunConfig`].
//!
//! Every stage writes into its own directory under the output root together with a
//! `.stamp` file: a hash over the run fingerprint and the stamps of the stages it reads.
//! A stage whose stamp and file checksums still match is not recomputed.

mod artifacts;
mod fixture;
mod stages;
pub mod svg;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{Overrides, RunConfig};
use crate::error::{Error, Result};

pub use artifacts::*;
pub use fixture::{write_fixture, FixtureSummary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Eligibility,
    Placement,
    Simulation,
    Water,
    Optimization,
    SetAside,
    Socio,
}

impl Stage {
    pub const ALL: [Stage; 7] = [
        Stage::Eligibility,
        Stage::Placement,
        Stage::Simulation,
        Stage::Water,
        Stage::Optimization,
        Stage::SetAside,
        Stage::Socio,
    ];

    pub fn dir_name(self) -> &'static str {
        match self {
            Stage::Eligibility => "01_eligibility",
            Stage::Placement => "02_placement",
            Stage::Simulation => "03_simulation",
            Stage::Water => "04_water",
            Stage::Optimization => "05_optimization",
            Stage::SetAside => "06_setaside",
            Stage::Socio => "07_socio",
        }
    }

    /// Stages whose artifacts this one reads.
    pub fn inputs(self) -> &'static [Stage] {
        match self {
            Stage::Eligibility => &[],
            Stage::Placement => &[Stage::Eligibility],
            Stage::Simulation => &[Stage::Placement],
            Stage::Water => &[Stage::Simulation],
            Stage::Optimization => &[Stage::Simulation, Stage::Water],
            Stage::SetAside => &[Stage::Optimization],
            Stage::Socio => &[Stage::Placement],
        }
    }

    /// This stage and everything upstream of it, in execution order.
    pub fn with_upstream(self) -> Vec<Stage> {
        let mut v = vec![self];
        let mut k = 0;
        while k < v.len() {
            for &u in v[k].inputs() {
                if !v.contains(&u) {
                    v.push(u);
                }
            }
            k += 1;
        }
        v.sort();
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageStamp {
    pub stamp: String,
    pub files: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config_sha256: String,
    pub fingerprint: String,
    pub stages: BTreeMap<String, StageStamp>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StageOutcome {
    Computed { warnings: usize },
    UpToDate,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let d = Sha256::digest(bytes);
    d.iter().map(|b| format!("{b:02x}")).collect()
}

fn file_sha(path: &Path) -> Result<String> {
    Ok(sha256_hex(&fs::read(path).map_err(|e| Error::io(path, e))?))
}

/// Relative paths and checksums of every file below `dir` except the stamp.
fn checksum_tree(dir: &Path) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).map_err(|e| Error::io(&d, e))? {
            let p = e.map_err(|e| Error::io(&d, e))?.path();
            if p.is_dir() {
                stack.push(p);
            } else if p.file_name().is_some_and(|n| n != ".stamp") {
                let rel = p.strip_prefix(dir).unwrap_or(&p).to_string_lossy().replace('\\', "/");
                out.insert(rel, file_sha(&p)?);
            }
        }
    }
    Ok(out)
}

pub struct Pipeline {
    pub config: RunConfig,
    config_sha: String,
    fingerprint: String,
    pub log: Vec<String>,
}

impl Pipeline {
    /// Validates the configuration and fingerprints it together with every input file.
    pub fn new(config_path: &Path, overrides: &Overrides) -> Result<Pipeline> {
        let bytes = fs::read(config_path).map_err(|e| Error::io(config_path, e))?;
        let mut config = RunConfig::load(config_path)?.map_err(Error::Config)?;
        config.apply(overrides);
        let failures = config.validate();
        if !failures.is_empty() {
            return Err(Error::Config(failures));
        }
        let config_sha = sha256_hex(&bytes);
        let mut h = Sha256::new();
        h.update(config_sha.as_bytes());
        h.update(overrides.fingerprint().as_bytes());
        let mut files = config.input_files();
        files.sort();
        for (k, p) in &files {
            h.update(k.as_bytes());
            h.update(file_sha(p)?.as_bytes());
        }
        for (key, d) in [("weather", &config.inputs.weather_dir), ("hydro", &config.inputs.hydro_dir)] {
            let dir = config.resolve(d);
            for (rel, sha) in checksum_tree(&dir)? {
                h.update(key.as_bytes());
                h.update(rel.as_bytes());
                h.update(sha.as_bytes());
            }
        }
        let fingerprint = format!("{:x}", h.finalize());
        Ok(Pipeline {
            config,
            config_sha,
            fingerprint,
            log: Vec::new(),
        })
    }

    pub fn out_dir(&self) -> PathBuf {
        self.config.output_path()
    }

    pub fn stage_dir(&self, s: Stage) -> PathBuf {
        self.out_dir().join(s.dir_name())
    }

    fn read_stamp(&self, s: Stage) -> Option<StageStamp> {
        let text = fs::read_to_string(self.stage_dir(s).join(".stamp")).ok()?;
        serde_json::from_str(&text).ok()
    }

    fn expected_stamp(&self, s: Stage) -> Option<String> {
        let mut h = Sha256::new();
        h.update(self.fingerprint.as_bytes());
        h.update(s.dir_name().as_bytes());
        for &u in s.inputs() {
            h.update(self.read_stamp(u)?.stamp.as_bytes());
        }
        Some(format!("{:x}", h.finalize()))
    }

    /// True when the stage's stamp matches and its files are unchanged.
    pub fn is_current(&self, s: Stage) -> bool {
        let (Some(st), Some(exp)) = (self.read_stamp(s), self.expected_stamp(s)) else {
            return false;
        };
        st.stamp == exp && checksum_tree(&self.stage_dir(s)).map(|f| f == st.files).unwrap_or(false)
    }

    /// Runs one stage unless it is current. On failure the partial output is moved
    /// to `failed/<stage>` and a stage error is returned.
    pub fn run_stage(&mut self, s: Stage) -> Result<StageOutcome> {
        if self.is_current(s) {
            self.log.push(format!("{}: up to date", s.dir_name()));
            return Ok(StageOutcome::UpToDate);
        }
        let dir = self.stage_dir(s);
        if dir.exists() {
            fs::remove_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        }
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let out = self.out_dir();
        match stages::run(s, &self.config, &dir, &out) {
            Ok(warnings) => {
                artifacts::write_warnings(&dir, &warnings)?;
                let stamp = StageStamp {
                    stamp: self.expected_stamp(s).ok_or_else(|| Error::Contract("upstream stamp missing".into()))?,
                    files: checksum_tree(&dir)?,
                };
                let text = serde_json::to_string_pretty(&stamp).map_err(|e| Error::Structural(e.to_string()))?;
                artifacts::write_text(&dir.join(".stamp"), &text)?;
                self.log.push(format!("{}: done ({} warnings)", s.dir_name(), warnings.len()));
                Ok(StageOutcome::Computed { warnings: warnings.len() })
            }
            Err(e) => {
                let failed = out.join("failed").join(s.dir_name());
                if failed.exists() {
                    let _ = fs::remove_dir_all(&failed);
                }
                if let Some(p) = failed.parent() {
                    fs::create_dir_all(p).map_err(|e| Error::io(p, e))?;
                }
                fs::rename(&dir, &failed).map_err(|e| Error::io(&dir, e))?;
                Err(Error::Stage {
                    stage: s.dir_name().to_string(),
                    source: Box::new(e),
                })
            }
        }
    }

    /// Runs `target` and its upstream stages in order.
    pub fn run_through(&mut self, target: Stage) -> Result<()> {
        for s in target.with_upstream() {
            self.run_stage(s)?;
        }
        Ok(())
    }

    pub fn run_all(&mut self) -> Result<Manifest> {
        for s in Stage::ALL {
            self.run_stage(s)?;
        }
        self.write_manifest()
    }

    /// Manifest over all completed stages.
    pub fn manifest(&self) -> Result<Manifest> {
        let mut stages = BTreeMap::new();
        for s in Stage::ALL {
            if let Some(st) = self.read_stamp(s) {
                stages.insert(s.dir_name().to_string(), st);
            }
        }
        Ok(Manifest {
            config_sha256: self.config_sha.clone(),
            fingerprint: self.fingerprint.clone(),
            stages,
        })
    }

    pub fn write_manifest(&self) -> Result<Manifest> {
        let m = self.manifest()?;
        let v = serde_json::to_value(&m).map_err(|e| Error::Structural(e.to_string()))?;
        artifacts::write_json(&self.out_dir().join("manifest.json"), &v)?;
        Ok(m)
    }

    /// Plain-text digest of the finished run.
    pub fn write_report(&self) -> Result<PathBuf> {
        let text = stages::report(&self.config, &self.out_dir())?;
        let p = self.out_dir().join("report.txt");
        artifacts::write_text(&p, &text)?;
        Ok(p)
    }
}
