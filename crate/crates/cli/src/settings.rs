//! Job settings: command-line flags override the TOML config file, which
//! overrides built-in defaults.

use std::path::Path;

use anyhow::{bail, Context, Result};
use cylquant::{Config, Kernel, QuadratureConfig};
use serde::Deserialize;

pub const DEFAULT_HBAR: f64 = 1.0;
pub const DEFAULT_PHI0: f64 = -std::f64::consts::PI;
pub const DEFAULT_KERNEL: &str = "symmetric";

/// Contents of `--config file.toml`. Every field is optional.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub hbar: Option<f64>,
    pub phi0: Option<f64>,
    pub kernel: Option<String>,
    #[serde(rename = "N")]
    pub n_max: Option<i64>,
    pub s: Option<usize>,
    pub seed: Option<u64>,
    pub quadrature: Option<QuadratureConfig>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Flags shared by most commands.
#[derive(Debug, Default, Clone, clap::Args)]
pub struct Common {
    /// Reduced Planck constant (default 1).
    #[arg(long, allow_hyphen_values = true)]
    pub hbar: Option<f64>,
    /// Ordering kernel: `weyl` or `symmetric` (default symmetric).
    #[arg(long)]
    pub kernel: Option<String>,
}

/// Fully resolved settings.
#[derive(Debug, Clone)]
pub struct Settings {
    pub hbar: f64,
    pub phi0: f64,
    pub kernel: String,
    pub quadrature: QuadratureConfig,
    file: FileConfigSnapshot,
}

#[derive(Debug, Clone, Default)]
struct FileConfigSnapshot {
    n_max: Option<i64>,
    s: Option<usize>,
    seed: Option<u64>,
}

impl Settings {
    pub fn resolve(file: FileConfig, common: &Common, phi0: Option<f64>) -> Result<Self> {
        let hbar = common.hbar.or(file.hbar).unwrap_or(DEFAULT_HBAR);
        if !(hbar > 0.0 && hbar.is_finite()) {
            bail!("hbar must be positive and finite, got {hbar}");
        }
        let phi0 = phi0.or(file.phi0).unwrap_or(DEFAULT_PHI0);
        if !phi0.is_finite() {
            bail!("phi0 must be finite, got {phi0}");
        }
        let kernel = common
            .kernel
            .clone()
            .or(file.kernel)
            .unwrap_or_else(|| DEFAULT_KERNEL.to_string());
        Kernel::by_name(&kernel)?;
        let quadrature = file.quadrature.unwrap_or_default();
        quadrature.validate()?;
        Ok(Self {
            hbar,
            phi0,
            kernel,
            quadrature,
            file: FileConfigSnapshot {
                n_max: file.n_max,
                s: file.s,
                seed: file.seed,
            },
        })
    }

    pub fn kernel(&self) -> Kernel {
        Kernel::by_name(&self.kernel).expect("validated in resolve")
    }

    pub fn n_max(&self, flag: Option<i64>) -> Result<i64> {
        match flag.or(self.file.n_max) {
            Some(n) if n >= 0 => Ok(n),
            Some(n) => bail!("N must be non-negative, got {n}"),
            None => bail!("N is required (flag --N or `N` in the config file)"),
        }
    }

    pub fn s(&self, flag: Option<usize>) -> Result<usize> {
        flag.or(self.file.s)
            .context("s is required (flag --s or `s` in the config file)")
    }

    pub fn seed(&self, flag: Option<u64>) -> Option<u64> {
        flag.or(self.file.seed)
    }

    pub fn quantizer(&self, n_max: i64) -> Result<Config> {
        Ok(Config::with_quadrature(n_max, self.hbar, self.quadrature)?)
    }

    pub fn quad(&self) -> cylquant::Quadrature<f64> {
        cylquant::Quadrature::new(self.quadrature)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_is_flag_then_file_then_default() {
        let file: FileConfig = toml::from_str("hbar = 0.5\nkernel = \"weyl\"\nN = 4").unwrap();
        let flags = Common {
            hbar: Some(2.0),
            kernel: None,
        };
        let s = Settings::resolve(file, &flags, None).unwrap();
        assert_eq!(s.hbar, 2.0);
        assert_eq!(s.kernel, "weyl");
        assert_eq!(s.phi0, DEFAULT_PHI0);
        assert_eq!(s.n_max(None).unwrap(), 4);
        assert_eq!(s.n_max(Some(7)).unwrap(), 7);
    }

    #[test]
    fn invalid_values_are_rejected() {
        let bad_hbar = Common {
            hbar: Some(-1.0),
            kernel: None,
        };
        assert!(Settings::resolve(FileConfig::default(), &bad_hbar, None).is_err());
        let bad_kernel = Common {
            hbar: None,
            kernel: Some("nope".into()),
        };
        assert!(Settings::resolve(FileConfig::default(), &bad_kernel, None).is_err());
        assert!(toml::from_str::<FileConfig>("unknown = 1").is_err());
        let s = Settings::resolve(FileConfig::default(), &Common::default(), None).unwrap();
        assert!(s.n_max(None).is_err());
        assert!(s.n_max(Some(-2)).is_err());
    }
}
