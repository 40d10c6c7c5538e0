//! What a run computes, reduced to a canonical document whose hash names the
//! output files.
//!
//! The hash covers the validated configuration (after grid overrides), the
//! subcommand and the options that change output content. Paths and thread
//! counts are left out: they do not change a single byte of the results.

use std::path::{Path, PathBuf};

use rotor_core::model::{ConfigDocument, ValidatedConfig};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::args::Format;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Subcommand {
    Profile,
    Sweep,
    Compare,
    Validate,
    BesselTable,
}

impl Subcommand {
    pub fn as_str(&self) -> &'static str {
        match self {
            Subcommand::Profile => "profile",
            Subcommand::Sweep => "sweep",
            Subcommand::Compare => "compare",
            Subcommand::Validate => "validate",
            Subcommand::BesselTable => "bessel-table",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunManifest {
    pub subcommand: Subcommand,
    pub config_path: Option<PathBuf>,
    pub output_dir: PathBuf,
    /// Sorted and deduplicated.
    pub formats: Vec<Format>,
    /// The effective configuration, overrides applied.
    pub config: Option<ValidatedConfig>,
    /// Subcommand-specific options that change the output, as `key=value`.
    pub options: Vec<String>,
}

#[derive(Serialize)]
struct Canonical<'a> {
    subcommand: Subcommand,
    formats: &'a [Format],
    config: Option<ConfigDocument>,
    options: &'a [String],
}

impl RunManifest {
    pub fn new(
        subcommand: Subcommand,
        config_path: Option<PathBuf>,
        output_dir: PathBuf,
        formats: &[Format],
        config: Option<ValidatedConfig>,
        options: Vec<String>,
    ) -> Self {
        let mut formats = formats.to_vec();
        formats.sort();
        formats.dedup();
        Self { subcommand, config_path, output_dir, formats, config, options }
    }

    pub fn canonical_json(&self) -> String {
        let doc = Canonical {
            subcommand: self.subcommand,
            formats: &self.formats,
            config: self.config.as_ref().map(|c| c.to_document()),
            options: &self.options,
        };
        serde_json::to_string(&doc).expect("manifest serializes")
    }

    /// First 12 hex digits of the SHA-256 of [`Self::canonical_json`].
    pub fn hash12(&self) -> String {
        let digest = Sha256::digest(self.canonical_json().as_bytes());
        hex::encode(digest)[..12].to_string()
    }

    /// `{subcommand}-{hash12}-{label}.{ext}` inside the output directory.
    pub fn output_path(&self, label: &str, ext: &str) -> PathBuf {
        self.output_dir.join(file_name(self.subcommand, &self.hash12(), label, ext))
    }
}

pub fn file_name(sub: Subcommand, hash: &str, label: &str, ext: &str) -> String {
    format!("{}-{hash}-{label}.{ext}", sub.as_str())
}

pub fn sha256_file(path: &Path) -> std::io::Result<String> {
    Ok(hex::encode(Sha256::digest(std::fs::read(path)?)))
}
