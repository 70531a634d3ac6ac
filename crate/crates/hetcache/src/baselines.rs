//! Popularity models and benchmark placement policies.

use crate::model::{ModelError, NetworkModel, PlacementMatrix, PopularityProfile};
use crate::placement::{solve_single_tier_with, PlacementError};

/// Zipf request-distribution parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZipfParams {
    pub num_files: usize,
    pub exponent: f64,
}

impl ZipfParams {
    pub fn new(num_files: usize, exponent: f64) -> Result<Self, ModelError> {
        if num_files == 0 {
            return Err(ModelError::DimensionMismatch {
                what: "zipf num_files",
                expected: 1,
                actual: 0,
            });
        }
        if !exponent.is_finite() || exponent < 0.0 {
            return Err(ModelError::InvalidParameter {
                field: "zipf exponent",
                value: exponent,
                requirement: "finite and >= 0",
            });
        }
        Ok(Self {
            num_files,
            exponent,
        })
    }
}

/// Zipf popularity `q_m = m^{-γ} / Σ_i i^{-γ}`; uniform at `γ = 0`, strictly
/// decreasing for `γ > 0`.
pub fn zipf_popularity(params: &ZipfParams) -> PopularityProfile {
    let raw: Vec<f64> = (1..=params.num_files)
        .map(|m| (m as f64).powf(-params.exponent))
        .collect();
    let total: f64 = raw.iter().sum();
    PopularityProfile::new(raw.into_iter().map(|x| x / total).collect())
        .expect("zipf weights are normalized and non-increasing by construction")
}

/// One most-popular-content column: 1 for the `⌊C⌋` most popular files, the
/// fractional remainder on the next file, 0 elsewhere.
fn top_column(capacity: f64, num_files: usize) -> Vec<f64> {
    let full = capacity.floor() as usize;
    let mut col = vec![0.0; num_files];
    for slot in col.iter_mut().take(full.min(num_files)) {
        *slot = 1.0;
    }
    let frac = capacity - full as f64;
    if frac > 1e-12 && full < num_files {
        col[full] = frac;
    }
    col
}

/// Most-popular content placement: each tier deterministically caches its
/// top-`C_k` files (non-integer capacities put the remainder on the next
/// file).
pub fn mpcp_placement(
    model: &NetworkModel,
    num_files: usize,
) -> Result<PlacementMatrix, PlacementError> {
    model.validate_capacities(num_files)?;
    let columns: Vec<Vec<f64>> = model
        .tiers()
        .iter()
        .map(|t| top_column(t.cache_capacity, num_files))
        .collect();
    let rows: Vec<Vec<f64>> = (0..num_files)
        .map(|m| columns.iter().map(|c| c[m]).collect())
        .collect();
    Ok(PlacementMatrix::from_rows(rows, model)?)
}

/// Hybrid content placement for two-tier networks: the macro tier (tier 1)
/// caches the top-`C₁` files; the small-cell tier probabilistically caches
/// the remaining files with the optimal single-tier placement under its own
/// SIR threshold.
pub fn hcp_placement(
    model: &NetworkModel,
    q: &PopularityProfile,
) -> Result<PlacementMatrix, PlacementError> {
    if model.num_tiers() != 2 {
        return Err(PlacementError::RequiresTwoTiers(model.num_tiers()));
    }
    let num_files = q.len();
    model.validate_capacities(num_files)?;
    let macro_col = top_column(model.tier(0).cache_capacity, num_files);
    let mut small_col = vec![0.0; num_files];
    let start = model.tier(0).cache_capacity.floor() as usize;
    if start < num_files {
        let tail: Vec<f64> = q.weights()[start..].to_vec();
        let tail_mass: f64 = tail.iter().sum();
        if tail_mass > 0.0 {
            let renormalized =
                PopularityProfile::new(tail.iter().map(|&x| x / tail_mass).collect())?;
            let remaining = (num_files - start) as f64;
            let capacity = model.tier(1).cache_capacity.min(remaining);
            let delta = model.delta();
            let beta = model.tier(1).sir_threshold;
            let w = crate::specfun::w_func(beta, delta)?;
            let v = crate::specfun::v_func(beta, delta)?;
            let sub = solve_single_tier_with(&renormalized, capacity, w, v)?;
            small_col[start..].copy_from_slice(&sub.p);
        }
    }
    let rows: Vec<Vec<f64>> = (0..num_files)
        .map(|m| vec![macro_col[m], small_col[m]])
        .collect();
    Ok(PlacementMatrix::from_rows(rows, model)?)
}
