//! Experiment configuration: TOML schema, validation, and unit conversion.
//!
//! Config files carry physical quantities with explicit unit suffixes
//! (`power_dbm`, `sir_db`, `density_per_km2`); the loader converts to linear
//! units when building the [`NetworkModel`]. Validation errors name the
//! offending field. The raw values are kept as parsed, so re-serializing a
//! loaded config reproduces its semantics exactly.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baselines::ZipfParams;
use crate::model::{LatencyParams, NetworkModel, PopularityProfile, TierParams};
use crate::sim::SimConfig;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },
    #[error("invalid config: {field}: {message}")]
    Validation { field: String, message: String },
}

fn invalid(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Validation {
        field: field.to_string(),
        message: message.into(),
    }
}

/// Content-placement policies the harness can evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyKind {
    TlcpUniform,
    TlcpSuboptimal,
    TlcpReference,
    Mpcp,
    Hcp,
    ExplicitMatrix,
}

impl PolicyKind {
    pub fn name(&self) -> &'static str {
        match self {
            PolicyKind::TlcpUniform => "tlcp-uniform",
            PolicyKind::TlcpSuboptimal => "tlcp-suboptimal",
            PolicyKind::TlcpReference => "tlcp-reference",
            PolicyKind::Mpcp => "mpcp",
            PolicyKind::Hcp => "hcp",
            PolicyKind::ExplicitMatrix => "explicit-matrix",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TierSection {
    /// Absolute density; required for the first tier.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub density_per_km2: Option<f64>,
    /// Density as a multiple of the first tier's; alternative to the
    /// absolute field for tiers after the first.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub density_ratio: Option<f64>,
    pub power_dbm: f64,
    pub sir_db: f64,
    pub cache_capacity: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    pub path_loss_exponent: f64,
    pub tiers: Vec<TierSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ZipfSection {
    pub num_files: usize,
    pub exponent: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PopularitySection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zipf: Option<ZipfSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub explicit: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PolicySection {
    pub names: Vec<PolicyKind>,
    /// M×K matrix for the `explicit-matrix` policy.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    /// When true, every row also reports its relative objective gap against
    /// the dual-decomposition reference solver.
    #[serde(default)]
    pub compare_reference: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// Dotted path of the swept field, e.g. `popularity.zipf.exponent`,
    /// `network.tiers[2].cache_capacity`, `policy.matrix[1][2]` (1-based
    /// tier/file indices).
    pub parameter: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    /// Window radius in km; defaults to the radius giving the sparsest tier
    /// 500 expected stations.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub region_radius_km: Option<f64>,
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    /// 1-based file index for conditional-hit estimation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_file: Option<usize>,
    /// "stratified" (default) or "direct".
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct LatencySection {
    pub bs_density: f64,
    pub gateway_density: f64,
    pub c1_ms: f64,
    pub c2_ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: String,
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub network: NetworkSection,
    pub popularity: PopularitySection,
    pub policy: PolicySection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub latency: Option<LatencySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSection>,
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Loads and validates an experiment configuration from a TOML file.
pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let cfg: ExperimentConfig = toml::from_str(&text).map_err(|e| ConfigError::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: "<inline>".to_string(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Number of files implied by the popularity source.
    pub fn num_files(&self) -> usize {
        match (&self.popularity.zipf, &self.popularity.explicit) {
            (Some(z), _) => z.num_files,
            (None, Some(q)) => q.len(),
            (None, None) => 0,
        }
    }

    /// Full validation with field-path diagnostics. Must hold before the
    /// model accessors are used; the harness re-validates after sweep
    /// mutations.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.network.tiers.is_empty() {
            return Err(invalid("network.tiers", "at least one tier is required"));
        }
        if self.network.path_loss_exponent <= 2.0 || !self.network.path_loss_exponent.is_finite() {
            return Err(invalid(
                "network.path_loss_exponent",
                format!(
                    "must be > 2 so that delta = 2/alpha lies in (0, 1); got {}",
                    self.network.path_loss_exponent
                ),
            ));
        }
        for (i, tier) in self.network.tiers.iter().enumerate() {
            let field = |name: &str| format!("network.tiers[{}].{name}", i + 1);
            if i == 0 {
                if tier.density_per_km2.is_none() {
                    return Err(invalid(
                        &field("density_per_km2"),
                        "the first tier must carry an absolute density",
                    ));
                }
                if tier.density_ratio.is_some() {
                    return Err(invalid(
                        &field("density_ratio"),
                        "the first tier is the ratio reference; give density_per_km2 only",
                    ));
                }
            } else if tier.density_per_km2.is_some() == tier.density_ratio.is_some() {
                return Err(invalid(
                    &field("density_per_km2"),
                    "give exactly one of density_per_km2 or density_ratio",
                ));
            }
            if let Some(d) = tier.density_per_km2 {
                if !d.is_finite() || d <= 0.0 {
                    return Err(invalid(
                        &field("density_per_km2"),
                        format!("must be positive; got {d}"),
                    ));
                }
            }
            if let Some(r) = tier.density_ratio {
                if !r.is_finite() || r <= 0.0 {
                    return Err(invalid(
                        &field("density_ratio"),
                        format!("must be positive; got {r}"),
                    ));
                }
            }
            if !tier.power_dbm.is_finite() {
                return Err(invalid(&field("power_dbm"), "must be finite"));
            }
            if !tier.sir_db.is_finite() {
                return Err(invalid(&field("sir_db"), "must be finite"));
            }
            if !tier.cache_capacity.is_finite() || tier.cache_capacity <= 0.0 {
                return Err(invalid(
                    &field("cache_capacity"),
                    format!("must be positive; got {}", tier.cache_capacity),
                ));
            }
        }
        match (&self.popularity.zipf, &self.popularity.explicit) {
            (Some(_), Some(_)) => {
                return Err(invalid(
                    "popularity",
                    "give exactly one of zipf or explicit, not both",
                ))
            }
            (None, None) => {
                return Err(invalid(
                    "popularity",
                    "a popularity source is required: zipf = { num_files, exponent } or explicit = [..]",
                ))
            }
            (Some(z), None) => {
                ZipfParams::new(z.num_files, z.exponent).map_err(|e| {
                    invalid("popularity.zipf", e.to_string())
                })?;
            }
            (None, Some(q)) => {
                PopularityProfile::new(q.clone())
                    .map_err(|e| invalid("popularity.explicit", e.to_string()))?;
            }
        }
        let num_files = self.num_files();
        for (i, tier) in self.network.tiers.iter().enumerate() {
            if tier.cache_capacity > num_files as f64 + 1e-9 {
                return Err(invalid(
                    &format!("network.tiers[{}].cache_capacity", i + 1),
                    format!(
                        "capacity {} exceeds the {} files in the catalog",
                        tier.cache_capacity, num_files
                    ),
                ));
            }
        }
        if self.policy.names.is_empty() {
            return Err(invalid("policy.names", "at least one policy is required"));
        }
        if self.policy.names.contains(&PolicyKind::ExplicitMatrix) {
            let matrix = self.policy.matrix.as_ref().ok_or_else(|| {
                invalid("policy.matrix", "explicit-matrix policy requires a matrix")
            })?;
            if matrix.len() != num_files {
                return Err(invalid(
                    "policy.matrix",
                    format!("expected {} rows, got {}", num_files, matrix.len()),
                ));
            }
            let tiers = self.network.tiers.len();
            for (m, row) in matrix.iter().enumerate() {
                if row.len() != tiers {
                    return Err(invalid(
                        &format!("policy.matrix[{}]", m + 1),
                        format!("expected {tiers} entries, got {}", row.len()),
                    ));
                }
            }
        }
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return Err(invalid("sweep.values", "sweep needs at least one value"));
            }
            SweepTarget::parse(&sweep.parameter, self)?;
        }
        if let Some(sim) = &self.simulation {
            if sim.trials == 0 {
                return Err(invalid("simulation.trials", "must be >= 1"));
            }
            if let Some(r) = sim.region_radius_km {
                if !r.is_finite() || r <= 0.0 {
                    return Err(invalid(
                        "simulation.region_radius_km",
                        format!("must be positive; got {r}"),
                    ));
                }
            }
            if let Some(t) = sim.target_file {
                if t == 0 || t > num_files {
                    return Err(invalid(
                        "simulation.target_file",
                        format!("1-based file index must lie in 1..={num_files}; got {t}"),
                    ));
                }
            }
            if let Some(mode) = &sim.mode {
                if mode != "stratified" && mode != "direct" {
                    return Err(invalid(
                        "simulation.mode",
                        format!("expected \"stratified\" or \"direct\"; got {mode:?}"),
                    ));
                }
            }
        }
        if let Some(lat) = &self.latency {
            LatencyParams::new(lat.bs_density, lat.gateway_density, lat.c1_ms, lat.c2_ms)
                .map_err(|e| invalid("latency", e.to_string()))?;
        }
        Ok(())
    }

    /// Builds the validated network model in linear units.
    pub fn network_model(&self) -> Result<NetworkModel, ConfigError> {
        let base_density = self.network.tiers[0]
            .density_per_km2
            .ok_or_else(|| invalid("network.tiers[1].density_per_km2", "missing"))?;
        let tiers: Result<Vec<TierParams>, ConfigError> = self
            .network
            .tiers
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let density = match (t.density_per_km2, t.density_ratio) {
                    (Some(d), _) => d,
                    (None, Some(r)) => r * base_density,
                    (None, None) => {
                        return Err(invalid(
                            &format!("network.tiers[{}]", i + 1),
                            "missing density",
                        ))
                    }
                };
                TierParams::new(
                    density,
                    dbm_to_watts(t.power_dbm),
                    db_to_linear(t.sir_db),
                    t.cache_capacity,
                )
                .map_err(|e| invalid(&format!("network.tiers[{}]", i + 1), e.to_string()))
            })
            .collect();
        NetworkModel::new(self.network.path_loss_exponent, tiers?)
            .map_err(|e| invalid("network", e.to_string()))
    }

    pub fn popularity_profile(&self) -> Result<PopularityProfile, ConfigError> {
        match (&self.popularity.zipf, &self.popularity.explicit) {
            (Some(z), _) => {
                let params = ZipfParams::new(z.num_files, z.exponent)
                    .map_err(|e| invalid("popularity.zipf", e.to_string()))?;
                Ok(crate::baselines::zipf_popularity(&params))
            }
            (None, Some(q)) => PopularityProfile::new(q.clone())
                .map_err(|e| invalid("popularity.explicit", e.to_string())),
            (None, None) => Err(invalid("popularity", "no popularity source")),
        }
    }

    /// Simulation config in library form (0-based target file, radius
    /// defaulted from the model when absent).
    pub fn sim_config(&self, model: &NetworkModel) -> Result<Option<SimConfig>, ConfigError> {
        let Some(section) = &self.simulation else {
            return Ok(None);
        };
        let radius = section
            .region_radius_km
            .unwrap_or_else(|| SimConfig::suggested_region_radius(model, 500.0));
        let mut cfg = SimConfig::new(radius, section.trials, section.seed)
            .map_err(|e| invalid("simulation", e.to_string()))?;
        if let Some(t) = section.target_file {
            cfg = cfg.with_target_file(t - 1);
        }
        Ok(Some(cfg))
    }

    pub fn latency_params(&self) -> Result<Option<LatencyParams>, ConfigError> {
        match &self.latency {
            None => Ok(None),
            Some(l) => LatencyParams::new(l.bs_density, l.gateway_density, l.c1_ms, l.c2_ms)
                .map(Some)
                .map_err(|e| invalid("latency", e.to_string())),
        }
    }
}

/// A parsed sweep-parameter path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepTarget {
    ZipfExponent,
    ZipfNumFiles,
    /// 0-based tier index.
    TierCacheCapacity(usize),
    TierSirDb(usize),
    TierDensityRatio(usize),
    /// 0-based (file, tier).
    MatrixEntry(usize, usize),
}

impl SweepTarget {
    /// Parses a dotted parameter path and checks that the target exists in
    /// the given config. Tier and file indices are 1-based in the path.
    pub fn parse(path: &str, cfg: &ExperimentConfig) -> Result<Self, ConfigError> {
        let err = |msg: String| invalid("sweep.parameter", msg);
        let target = if path == "popularity.zipf.exponent" {
            if cfg.popularity.zipf.is_none() {
                return Err(err("config has no zipf popularity to sweep".into()));
            }
            SweepTarget::ZipfExponent
        } else if path == "popularity.zipf.num_files" {
            if cfg.popularity.zipf.is_none() {
                return Err(err("config has no zipf popularity to sweep".into()));
            }
            SweepTarget::ZipfNumFiles
        } else if let Some(rest) = path.strip_prefix("network.tiers[") {
            let (idx, field) = rest
                .split_once("].")
                .ok_or_else(|| err(format!("malformed tier path {path:?}")))?;
            let tier: usize = idx
                .parse()
                .map_err(|_| err(format!("bad tier index {idx:?}")))?;
            if tier == 0 || tier > cfg.network.tiers.len() {
                return Err(err(format!(
                    "tier index {tier} out of range 1..={}",
                    cfg.network.tiers.len()
                )));
            }
            match field {
                "cache_capacity" => SweepTarget::TierCacheCapacity(tier - 1),
                "sir_db" => SweepTarget::TierSirDb(tier - 1),
                "density_ratio" => {
                    if tier == 1 {
                        return Err(err("tier 1 is the density reference".into()));
                    }
                    SweepTarget::TierDensityRatio(tier - 1)
                }
                other => return Err(err(format!("unsupported tier field {other:?}"))),
            }
        } else if let Some(rest) = path.strip_prefix("policy.matrix[") {
            let (file, rest) = rest
                .split_once("][")
                .ok_or_else(|| err(format!("malformed matrix path {path:?}")))?;
            let tier = rest
                .strip_suffix(']')
                .ok_or_else(|| err(format!("malformed matrix path {path:?}")))?;
            let m: usize = file
                .parse()
                .map_err(|_| err(format!("bad file index {file:?}")))?;
            let k: usize = tier
                .parse()
                .map_err(|_| err(format!("bad tier index {tier:?}")))?;
            let rows = cfg
                .policy
                .matrix
                .as_ref()
                .ok_or_else(|| err("config has no policy.matrix to sweep".into()))?;
            if m == 0 || m > rows.len() || k == 0 || k > cfg.network.tiers.len() {
                return Err(err(format!("matrix index [{m}][{k}] out of range")));
            }
            SweepTarget::MatrixEntry(m - 1, k - 1)
        } else {
            return Err(err(format!(
                "unknown parameter {path:?}; supported: popularity.zipf.exponent, \
                 popularity.zipf.num_files, network.tiers[k].cache_capacity, \
                 network.tiers[k].sir_db, network.tiers[k].density_ratio, \
                 policy.matrix[m][k]"
            )));
        };
        Ok(target)
    }

    /// Applies one sweep value to a config clone.
    pub fn apply(&self, cfg: &mut ExperimentConfig, value: f64) -> Result<(), ConfigError> {
        match *self {
            SweepTarget::ZipfExponent => {
                cfg.popularity.zipf.as_mut().unwrap().exponent = value;
            }
            SweepTarget::ZipfNumFiles => {
                if value <= 0.0 || value.fract().abs() > 1e-9 {
                    return Err(invalid(
                        "sweep.values",
                        format!("num_files sweep needs positive integers; got {value}"),
                    ));
                }
                cfg.popularity.zipf.as_mut().unwrap().num_files = value as usize;
            }
            SweepTarget::TierCacheCapacity(k) => {
                cfg.network.tiers[k].cache_capacity = value;
            }
            SweepTarget::TierSirDb(k) => {
                cfg.network.tiers[k].sir_db = value;
            }
            SweepTarget::TierDensityRatio(k) => {
                cfg.network.tiers[k].density_ratio = Some(value);
            }
            SweepTarget::MatrixEntry(m, k) => {
                cfg.policy.matrix.as_mut().unwrap()[m][k] = value;
            }
        }
        Ok(())
    }
}
