//! Run configuration: one TOML file, overridable by CLI flags, dumpable in
//! fully resolved form with `--print-config`.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use sensid::calib::{Marginal, PriorSpec};

/// Environment variable naming the default output root.
pub const OUT_ROOT_ENV: &str = "SENSID_OUT_ROOT";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    /// benchmark | linear_additive | ishigami | conjugate_gaussian
    pub kind: String,
    /// Benchmark: default dataset seed.
    pub seed: u64,
    pub discrepancy_amplitude: f64,
    pub noise_std: f64,
    /// linear_additive coefficients.
    pub coefficients: Vec<f64>,
    /// Ishigami constants.
    pub a: f64,
    pub b: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            kind: "benchmark".into(),
            seed: 0,
            discrepancy_amplitude: 0.05,
            noise_std: 0.02,
            coefficients: vec![1.0, 2.0],
            a: 7.0,
            b: 0.1,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PriorConfig {
    /// Explicit marginals; empty means the model's natural defaults
    /// (uniform over its reference box; standard normal for the conjugate
    /// test model).
    pub marginals: Vec<Marginal>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    /// Load records from this JSON file instead of generating them.
    pub path: Option<PathBuf>,
    /// Generation block (benchmark only).
    pub n_points: usize,
    pub design_seed: u64,
    pub noise_seed: u64,
    /// Observation used for the conjugate test model.
    pub conjugate_observation: f64,
    pub conjugate_noise_std: f64,
}

impl Default for DataConfig {
    fn default() -> Self {
        DataConfig {
            path: None,
            n_points: 40,
            design_seed: 5,
            noise_seed: 6,
            conjugate_observation: 2.0,
            conjugate_noise_std: 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub use_emulator: bool,
    pub use_discrepancy: bool,
    pub validation_fraction: f64,
    pub emulator_training_points: usize,
    pub setup_seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            use_emulator: true,
            use_discrepancy: true,
            validation_fraction: 0.5,
            emulator_training_points: 120,
            setup_seed: 11,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SaConfig {
    pub n: usize,
    pub seed: u64,
    pub second_order: bool,
    pub bootstrap_note: Option<String>,
    pub gap_threshold: f64,
    pub sum_tolerance: f64,
}

impl Default for SaConfig {
    fn default() -> Self {
        SaConfig {
            n: 1 << 14,
            seed: 2024,
            second_order: false,
            bootstrap_note: None,
            gap_threshold: 0.05,
            sum_tolerance: 0.05,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McmcSection {
    pub n_steps: usize,
    pub burn_fraction: f64,
    pub seed: u64,
}

impl Default for McmcSection {
    fn default() -> Self {
        McmcSection {
            n_steps: 50_000,
            burn_fraction: 0.5,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub base_seed: u64,
    /// Per-subset chain length (shorter than a single calibration since 15
    /// chains run per sweep).
    pub mcmc_steps: usize,
    pub mean_shift_threshold: f64,
    pub tightness_ratio: f64,
    /// Total effect above this marks a response as significant for a
    /// parameter in the report.
    pub total_effect_threshold: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            base_seed: 100,
            mcmc_steps: 20_000,
            mean_shift_threshold: 1.5,
            tightness_ratio: 1.5,
            total_effect_threshold: 0.1,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IterateSection {
    pub n_iter: usize,
    pub std_change_tol: f64,
    pub marginals_only: bool,
    pub seed: u64,
    pub sa_n: usize,
    pub sa_seed: u64,
}

impl Default for IterateSection {
    fn default() -> Self {
        IterateSection {
            n_iter: 2,
            std_change_tol: 0.05,
            marginals_only: false,
            seed: 7,
            sa_n: 1 << 13,
            sa_seed: 101,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    /// Worker threads; 0 means all available cores.
    pub jobs: usize,
}

#[allow(clippy::derivable_impls)]
impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: None, jobs: 0 }
    }
}

/// The fully resolved run configuration.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub prior: PriorConfig,
    pub data: DataConfig,
    pub pipeline: PipelineConfig,
    pub sa: SaConfig,
    pub mcmc: McmcSection,
    pub sweep: SweepConfig,
    pub iterate: IterateSection,
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("reading config file {}", p.display()))?;
                let config: RunConfig = toml::from_str(&text)
                    .with_context(|| format!("parsing config file {}", p.display()))?;
                config.validate()?;
                Ok(config)
            }
            None => Ok(RunConfig::default()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let known = ["benchmark", "linear_additive", "ishigami", "conjugate_gaussian"];
        if !known.contains(&self.model.kind.as_str()) {
            bail!(
                "unknown model kind '{}' (expected one of {})",
                self.model.kind,
                known.join(", ")
            );
        }
        if let Some(p) = &self.data.path {
            if !p.exists() {
                bail!("dataset path {} does not exist", p.display());
            }
        }
        if self.sa.n < 64 {
            bail!("sa.n must be at least 64, got {}", self.sa.n);
        }
        if self.mcmc.n_steps < 2000 {
            bail!("mcmc.n_steps must be at least 2000, got {}", self.mcmc.n_steps);
        }
        if self.sweep.mcmc_steps < 2000 {
            bail!("sweep.mcmc_steps must be at least 2000, got {}", self.sweep.mcmc_steps);
        }
        if !(self.mcmc.burn_fraction > 0.0 && self.mcmc.burn_fraction < 1.0) {
            bail!("mcmc.burn_fraction must lie in (0, 1)");
        }
        if self.iterate.n_iter == 0 {
            bail!("iterate.n_iter must be at least 1");
        }
        if self.data.n_points < 4 {
            bail!("data.n_points must be at least 4, got {}", self.data.n_points);
        }
        Ok(())
    }

    /// Output directory: explicit flag, then config, then
    /// `$SENSID_OUT_ROOT/out`, then `./out`. Relative paths resolve against
    /// the output root.
    pub fn resolve_out_dir(&self, flag: Option<&Path>) -> PathBuf {
        let root = std::env::var_os(OUT_ROOT_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("."));
        let chosen = flag
            .map(Path::to_path_buf)
            .or_else(|| self.output.dir.clone())
            .unwrap_or_else(|| PathBuf::from("out"));
        if chosen.is_absolute() {
            chosen
        } else {
            root.join(chosen)
        }
    }

    /// The effective prior for the configured model.
    pub fn resolve_prior(&self, calib_bounds: &[(f64, f64)]) -> Result<PriorSpec> {
        let prior = if self.prior.marginals.is_empty() {
            if self.model.kind == "conjugate_gaussian" {
                PriorSpec::Independent {
                    marginals: vec![Marginal::Gaussian { mean: 0.0, std: 1.0 }],
                }
            } else {
                PriorSpec::uniform(calib_bounds)
            }
        } else {
            PriorSpec::Independent {
                marginals: self.prior.marginals.clone(),
            }
        };
        prior.validate()?;
        if prior.dim() != calib_bounds.len() {
            bail!(
                "prior has {} marginals but the model has {} calibration parameters",
                prior.dim(),
                calib_bounds.len()
            );
        }
        Ok(prior)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips_through_toml() {
        let config = RunConfig::default();
        let text = config.to_toml();
        let back: RunConfig = toml::from_str(&text).unwrap();
        assert_eq!(back.sa.n, config.sa.n);
        assert_eq!(back.model.kind, config.model.kind);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = toml::from_str::<RunConfig>("[sa]\nnn = 12").unwrap_err();
        assert!(err.to_string().contains("nn"), "{err}");
    }

    #[test]
    fn bad_model_kind_is_an_error() {
        let config: RunConfig = toml::from_str("[model]\nkind = \"nope\"").unwrap();
        assert!(config.validate().is_err());
    }
}
