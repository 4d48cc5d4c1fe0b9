//! Run configuration: an optional TOML file overlaid by command-line flags.
//!
//! ```toml
//! n_max = 256
//! quad = 2048
//! interior_margin = 4
//! format = "json"
//! out = "report.json"
//!
//! [tolerances]
//! resolution_of_identity = 1e-4
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::Deserialize;

use phasekit::fock::TruncationConfig;
use phasekit::special::{DEFAULT_QUADRATURE_NODES, MIN_QUADRATURE_NODES};
use phasekit::verify::check_ids;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    n_max: Option<usize>,
    quad: Option<usize>,
    interior_margin: Option<usize>,
    format: Option<Format>,
    out: Option<PathBuf>,
    #[serde(default)]
    tolerances: BTreeMap<String, f64>,
}

/// Flags that may override the file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub config: Option<PathBuf>,
    pub n_max: Option<usize>,
    pub quad: Option<usize>,
    pub margin: Option<usize>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub truncation: TruncationConfig,
    pub quad: usize,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub tolerances: BTreeMap<String, f64>,
}

impl RunConfig {
    pub fn resolve(flags: &Overrides) -> anyhow::Result<Self> {
        let file = match &flags.config {
            Some(path) => load(path)?,
            None => FileConfig::default(),
        };
        let defaults = TruncationConfig::default();
        let n_max = flags.n_max.or(file.n_max).unwrap_or(defaults.n_max());
        let margin = flags.margin.or(file.interior_margin).unwrap_or(defaults.interior_margin());
        let truncation = TruncationConfig::new(n_max, margin)?;
        let quad = flags.quad.or(file.quad).unwrap_or(DEFAULT_QUADRATURE_NODES);
        if quad < MIN_QUADRATURE_NODES {
            bail!("quadrature nodes must be >= {MIN_QUADRATURE_NODES}, got {quad}");
        }
        for (id, tol) in &file.tolerances {
            if !check_ids().any(|c| c == id) {
                bail!("unknown tolerance key '{id}'");
            }
            if !(tol.is_finite() && *tol >= 0.0) {
                bail!("tolerance '{id}' must be finite and >= 0");
            }
        }
        Ok(Self {
            truncation,
            quad,
            format: flags.format.or(file.format).unwrap_or(Format::Csv),
            out: flags.out.clone().or(file.out),
            tolerances: file.tolerances,
        })
    }
}

fn load(path: &Path) -> anyhow::Result<FileConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    #[test]
    fn defaults() {
        let c = RunConfig::resolve(&Overrides::default()).unwrap();
        assert_eq!(c.truncation.n_max(), 256);
        assert_eq!(c.truncation.interior_margin(), 4);
        assert_eq!(c.quad, 2048);
        assert_eq!(c.format, Format::Csv);
    }

    #[test]
    fn flags_override_file() {
        let f = write("n_max = 64\nquad = 512\nformat = \"json\"\n[tolerances]\ntrig_direct = 1e-12\n");
        let flags = Overrides {
            config: Some(f.path().to_path_buf()),
            n_max: Some(32),
            ..Default::default()
        };
        let c = RunConfig::resolve(&flags).unwrap();
        assert_eq!(c.truncation.n_max(), 32);
        assert_eq!(c.quad, 512);
        assert_eq!(c.format, Format::Json);
        assert_eq!(c.tolerances["trig_direct"], 1e-12);
    }

    #[test]
    fn rejects_bad_files() {
        for text in ["n_max = 64\nbogus = 1\n", "n_max = 63\n", "[tolerances]\nnope = 1.0\n", "quad = 10\n", "n_max = ="] {
            let f = write(text);
            let flags = Overrides {
                config: Some(f.path().to_path_buf()),
                ..Default::default()
            };
            assert!(RunConfig::resolve(&flags).is_err(), "{text}");
        }
    }
}
