//! Domain types for the cache-enabled multi-tier network model.
//!
//! All quantities are stored in linear units: densities in base stations per
//! square kilometre, powers in watts, SIR thresholds as linear ratios.
//! The config loader converts from dBm / dB at parse time.

use thiserror::Error;

use crate::specfun;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("{field} must be {requirement} (got {value})")]
    InvalidParameter {
        field: &'static str,
        value: f64,
        requirement: &'static str,
    },
    #[error("{what} = {value} is outside its domain ({requirement})")]
    Domain {
        what: &'static str,
        value: f64,
        requirement: &'static str,
    },
    #[error("file {file} is not cached in any tier")]
    FileUncached { file: usize },
    #[error("file {file} has zero placement in tier {tier}; serving distance is undefined")]
    ZeroAssociation { file: usize, tier: usize },
    #[error("{what}: expected {expected}, got {actual}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("popularity must be non-increasing (violated at index {index})")]
    PopularityNotSorted { index: usize },
    #[error("popularity must sum to 1 within 1e-12 (got {sum})")]
    PopularityNotNormalized { sum: f64 },
    #[error("placement entry ({file}, {tier}) = {value} is outside [0, 1]")]
    PlacementOutOfRange { file: usize, tier: usize, value: f64 },
    #[error("tier {tier} placement sums to {sum}, exceeding its cache capacity {capacity}")]
    CapacityExceeded { tier: usize, sum: f64, capacity: f64 },
    #[error("tier {tier} cache capacity {capacity} exceeds the number of files {num_files}")]
    CapacityAboveCatalog {
        tier: usize,
        capacity: f64,
        num_files: usize,
    },
}

/// Physical and caching parameters of one base-station tier.
#[derive(Debug, Clone, PartialEq)]
pub struct TierParams {
    /// Base stations per square kilometre.
    pub density: f64,
    /// Transmission power in watts.
    pub power: f64,
    /// SIR threshold as a linear ratio (not dB).
    pub sir_threshold: f64,
    /// Cache capacity in files of normalized unit size.
    pub cache_capacity: f64,
}

impl TierParams {
    pub fn new(
        density: f64,
        power: f64,
        sir_threshold: f64,
        cache_capacity: f64,
    ) -> Result<Self, ModelError> {
        let check = |field: &'static str, value: f64| -> Result<(), ModelError> {
            if !value.is_finite() || value <= 0.0 {
                return Err(ModelError::InvalidParameter {
                    field,
                    value,
                    requirement: "finite and strictly positive",
                });
            }
            Ok(())
        };
        check("tier density", density)?;
        check("tier power", power)?;
        check("tier sir_threshold", sir_threshold)?;
        check("tier cache_capacity", cache_capacity)?;
        Ok(Self {
            density,
            power,
            sir_threshold,
            cache_capacity,
        })
    }
}

/// A multi-tier network: the common path-loss exponent plus the ordered tiers.
///
/// Immutable after construction; all derived quantities are recomputed on
/// demand from the validated fields.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkModel {
    path_loss_exponent: f64,
    tiers: Vec<TierParams>,
}

impl NetworkModel {
    pub fn new(path_loss_exponent: f64, tiers: Vec<TierParams>) -> Result<Self, ModelError> {
        if !path_loss_exponent.is_finite() || path_loss_exponent <= 2.0 {
            return Err(ModelError::InvalidParameter {
                field: "path_loss_exponent",
                value: path_loss_exponent,
                requirement: "finite and > 2",
            });
        }
        if tiers.is_empty() {
            return Err(ModelError::DimensionMismatch {
                what: "number of tiers",
                expected: 1,
                actual: 0,
            });
        }
        Ok(Self {
            path_loss_exponent,
            tiers,
        })
    }

    pub fn path_loss_exponent(&self) -> f64 {
        self.path_loss_exponent
    }

    /// The path-loss constant `δ = 2/α ∈ (0, 1)`.
    pub fn delta(&self) -> f64 {
        2.0 / self.path_loss_exponent
    }

    pub fn num_tiers(&self) -> usize {
        self.tiers.len()
    }

    pub fn tiers(&self) -> &[TierParams] {
        &self.tiers
    }

    pub fn tier(&self, k: usize) -> &TierParams {
        &self.tiers[k]
    }

    /// Tier weight `z_k = λ_k · P_k^δ`, through which density and power enter
    /// every association and placement formula.
    pub fn tier_weight(&self, k: usize) -> f64 {
        let d = self.delta();
        self.tiers[k].density * self.tiers[k].power.powf(d)
    }

    pub fn tier_weights(&self) -> Vec<f64> {
        (0..self.num_tiers()).map(|k| self.tier_weight(k)).collect()
    }

    pub fn total_weight(&self) -> f64 {
        self.tier_weights().iter().sum()
    }

    /// The shared SIR threshold, if every tier uses the same one
    /// (relative tolerance 1e-12).
    pub fn uniform_sir_threshold(&self) -> Option<f64> {
        let first = self.tiers[0].sir_threshold;
        for t in &self.tiers[1..] {
            if (t.sir_threshold - first).abs() > 1e-12 * first.abs() {
                return None;
            }
        }
        Some(first)
    }

    /// Checks `C_k ≤ M` for every tier against a catalog of `num_files` files.
    pub fn validate_capacities(&self, num_files: usize) -> Result<(), ModelError> {
        for (k, t) in self.tiers.iter().enumerate() {
            if t.cache_capacity > num_files as f64 + 1e-9 {
                return Err(ModelError::CapacityAboveCatalog {
                    tier: k,
                    capacity: t.cache_capacity,
                    num_files,
                });
            }
        }
        Ok(())
    }
}

/// Per-tier interference constants evaluated once per model.
pub(crate) struct TierFunctions {
    pub w: Vec<f64>,
    pub v: Vec<f64>,
    pub z: Vec<f64>,
    pub z_total: f64,
}

impl TierFunctions {
    pub fn new(model: &NetworkModel) -> Self {
        let delta = model.delta();
        let z = model.tier_weights();
        let z_total = z.iter().sum();
        let mut w = Vec::with_capacity(z.len());
        let mut v = Vec::with_capacity(z.len());
        for t in model.tiers() {
            w.push(specfun::w_raw(t.sir_threshold, delta));
            v.push(specfun::v_raw(t.sir_threshold, delta));
        }
        Self { w, v, z, z_total }
    }
}

/// Request distribution over the file catalog, ordered by decreasing
/// popularity. Ties are permitted.
#[derive(Debug, Clone, PartialEq)]
pub struct PopularityProfile {
    q: Vec<f64>,
}

impl PopularityProfile {
    pub fn new(q: Vec<f64>) -> Result<Self, ModelError> {
        if q.is_empty() {
            return Err(ModelError::DimensionMismatch {
                what: "popularity length",
                expected: 1,
                actual: 0,
            });
        }
        let mut sum = 0.0;
        for (i, &qi) in q.iter().enumerate() {
            if !qi.is_finite() || !(0.0..=1.0).contains(&qi) {
                return Err(ModelError::Domain {
                    what: "popularity entry",
                    value: qi,
                    requirement: "in [0, 1]",
                });
            }
            if i > 0 && qi > q[i - 1] {
                return Err(ModelError::PopularityNotSorted { index: i });
            }
            sum += qi;
        }
        if (sum - 1.0).abs() > 1e-12 {
            return Err(ModelError::PopularityNotNormalized { sum });
        }
        Ok(Self { q })
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.q
    }

    pub fn get(&self, m: usize) -> f64 {
        self.q[m]
    }
}

/// Placement probability matrix: entry `(m, k)` is the probability that a
/// tier-`k` base station caches file `m`. Row-major, `M × K`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlacementMatrix {
    entries: Vec<f64>,
    num_files: usize,
    num_tiers: usize,
}

impl PlacementMatrix {
    /// Builds and validates a placement against a model: every entry in
    /// [0, 1], per-tier column sums within the cache budgets (tolerance 1e-9),
    /// and tier capacities not exceeding the catalog size.
    pub fn from_rows(rows: Vec<Vec<f64>>, model: &NetworkModel) -> Result<Self, ModelError> {
        let num_files = rows.len();
        let num_tiers = model.num_tiers();
        if num_files == 0 {
            return Err(ModelError::DimensionMismatch {
                what: "placement rows",
                expected: 1,
                actual: 0,
            });
        }
        model.validate_capacities(num_files)?;
        let mut entries = Vec::with_capacity(num_files * num_tiers);
        for (m, row) in rows.iter().enumerate() {
            if row.len() != num_tiers {
                return Err(ModelError::DimensionMismatch {
                    what: "placement row length",
                    expected: num_tiers,
                    actual: row.len(),
                });
            }
            for (k, &p) in row.iter().enumerate() {
                if !p.is_finite() || p < -1e-12 || p > 1.0 + 1e-12 {
                    return Err(ModelError::PlacementOutOfRange {
                        file: m,
                        tier: k,
                        value: p,
                    });
                }
                entries.push(p.clamp(0.0, 1.0));
            }
        }
        let matrix = Self {
            entries,
            num_files,
            num_tiers,
        };
        for k in 0..num_tiers {
            let sum = matrix.column_sum(k);
            let cap = model.tier(k).cache_capacity;
            if sum > cap + 1e-9 {
                return Err(ModelError::CapacityExceeded {
                    tier: k,
                    sum,
                    capacity: cap,
                });
            }
        }
        Ok(matrix)
    }

    pub fn num_files(&self) -> usize {
        self.num_files
    }

    pub fn num_tiers(&self) -> usize {
        self.num_tiers
    }

    pub fn get(&self, m: usize, k: usize) -> f64 {
        self.entries[m * self.num_tiers + k]
    }

    pub fn row(&self, m: usize) -> &[f64] {
        &self.entries[m * self.num_tiers..(m + 1) * self.num_tiers]
    }

    pub fn column_sum(&self, k: usize) -> f64 {
        (0..self.num_files).map(|m| self.get(m, k)).sum()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.num_files).map(|m| self.row(m).to_vec()).collect()
    }
}

/// Parameters of the wired-backhaul delay model.
#[derive(Debug, Clone, PartialEq)]
pub struct LatencyParams {
    /// Base-station density λ_b (only the ratio to λ_g matters).
    pub bs_density: f64,
    /// Gateway density λ_g.
    pub gateway_density: f64,
    /// Per-hop processing delay constant, milliseconds.
    pub c1_ms: f64,
    /// Fixed delay constant, milliseconds.
    pub c2_ms: f64,
}

impl LatencyParams {
    pub fn new(
        bs_density: f64,
        gateway_density: f64,
        c1_ms: f64,
        c2_ms: f64,
    ) -> Result<Self, ModelError> {
        for (field, value) in [
            ("latency bs_density", bs_density),
            ("latency gateway_density", gateway_density),
            ("latency c1_ms", c1_ms),
            ("latency c2_ms", c2_ms),
        ] {
            if !value.is_finite() || value <= 0.0 {
                return Err(ModelError::InvalidParameter {
                    field,
                    value,
                    requirement: "finite and strictly positive",
                });
            }
        }
        Ok(Self {
            bs_density,
            gateway_density,
            c1_ms,
            c2_ms,
        })
    }
}
