//! Run configuration shared by every command.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::CliError;

/// Overrides the default working precision; command-line flags win.
pub const PRECISION_ENV: &str = "PERRONLAB_PRECISION";
pub const DEFAULT_PRECISION_BITS: u32 = 256;
pub const DEFAULT_MAX_SEARCH: u64 = 1_000_000;
pub const MIN_PRECISION_BITS: u32 = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub precision_bits: u32,
    pub max_search: u64,
    pub output_dir: PathBuf,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            precision_bits: DEFAULT_PRECISION_BITS,
            max_search: DEFAULT_MAX_SEARCH,
            output_dir: PathBuf::from("."),
            seed: 0,
        }
    }
}

impl RunConfig {
    /// Flag, then environment value, then default.
    pub fn resolve(
        precision_flag: Option<u32>,
        env_precision: Option<&str>,
        max_search: Option<u64>,
        output_dir: Option<PathBuf>,
        seed: Option<u64>,
    ) -> Result<Self, CliError> {
        let precision_bits = match (precision_flag, env_precision) {
            (Some(p), _) => p,
            (None, Some(s)) => s
                .trim()
                .parse()
                .map_err(|_| CliError::usage(format!("{PRECISION_ENV}={s:?} is not an integer")))?,
            (None, None) => DEFAULT_PRECISION_BITS,
        };
        if precision_bits < MIN_PRECISION_BITS {
            return Err(CliError::usage(format!(
                "precision must be at least {MIN_PRECISION_BITS} bits, got {precision_bits}"
            )));
        }
        let d = RunConfig::default();
        Ok(RunConfig {
            precision_bits,
            max_search: max_search.unwrap_or(d.max_search),
            output_dir: output_dir.unwrap_or(d.output_dir),
            seed: seed.unwrap_or(d.seed),
        })
    }

    pub fn from_env(
        precision_flag: Option<u32>,
        max_search: Option<u64>,
        output_dir: Option<PathBuf>,
        seed: Option<u64>,
    ) -> Result<Self, CliError> {
        let env = std::env::var(PRECISION_ENV).ok();
        Self::resolve(precision_flag, env.as_deref(), max_search, output_dir, seed)
    }

    /// `name` inside the output directory unless it is already a path with
    /// a directory part.
    pub fn output_path(&self, name: &str) -> PathBuf {
        let p = PathBuf::from(name);
        if p.is_absolute() || p.parent().is_some_and(|d| !d.as_os_str().is_empty()) {
            p
        } else {
            self.output_dir.join(p)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let c = RunConfig::resolve(None, None, None, None, None).unwrap();
        assert_eq!(c.precision_bits, 256);
        let c = RunConfig::resolve(None, Some("128"), None, None, None).unwrap();
        assert_eq!(c.precision_bits, 128);
        let c = RunConfig::resolve(Some(512), Some("128"), None, None, None).unwrap();
        assert_eq!(c.precision_bits, 512);
        assert!(RunConfig::resolve(Some(32), None, None, None, None).is_err());
        assert!(RunConfig::resolve(None, Some("lots"), None, None, None).is_err());
    }

    #[test]
    fn output_paths() {
        let c = RunConfig {
            output_dir: PathBuf::from("/tmp/out"),
            ..RunConfig::default()
        };
        assert_eq!(
            c.output_path("cert.json"),
            PathBuf::from("/tmp/out/cert.json")
        );
        assert_eq!(
            c.output_path("sub/cert.json"),
            PathBuf::from("sub/cert.json")
        );
    }
}
