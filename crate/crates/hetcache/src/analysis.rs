//! Closed-form network quantities: association probabilities, serving-distance
//! densities, conditional and total hit probabilities, and backhaul latency.
//!
//! Everything here is a pure function of validated inputs. The total hit
//! probability dispatches to dedicated single-tier and uniform-threshold
//! specializations; [`hit_probability_general`] always evaluates the general
//! multi-tier expression and is exposed so the specializations can be
//! cross-checked against it.

use crate::model::{
    LatencyParams, ModelError, NetworkModel, PlacementMatrix, PopularityProfile, TierFunctions,
};

fn check_dims(model: &NetworkModel, placement: &PlacementMatrix) -> Result<(), ModelError> {
    if placement.num_tiers() != model.num_tiers() {
        return Err(ModelError::DimensionMismatch {
            what: "placement tier count",
            expected: model.num_tiers(),
            actual: placement.num_tiers(),
        });
    }
    Ok(())
}

/// Weighted placement mass `Σ_j p_mj z_j` of file `m`.
fn cached_weight(placement: &PlacementMatrix, z: &[f64], m: usize) -> f64 {
    placement
        .row(m)
        .iter()
        .zip(z)
        .map(|(&p, &zj)| p * zj)
        .sum()
}

/// Probability that a user requesting file `m` is served by tier `k`:
/// `A_mk = p_mk z_k / Σ_j p_mj z_j`.
///
/// Errors with [`ModelError::FileUncached`] if the file has zero placement in
/// every tier.
pub fn association_probability(
    model: &NetworkModel,
    placement: &PlacementMatrix,
    m: usize,
    k: usize,
) -> Result<f64, ModelError> {
    check_dims(model, placement)?;
    let z = model.tier_weights();
    let total = cached_weight(placement, &z, m);
    if total <= 0.0 {
        return Err(ModelError::FileUncached { file: m });
    }
    Ok(placement.get(m, k) * z[k] / total)
}

/// Association probabilities of file `m` over all tiers; sums to 1.
pub fn association_probabilities(
    model: &NetworkModel,
    placement: &PlacementMatrix,
    m: usize,
) -> Result<Vec<f64>, ModelError> {
    (0..model.num_tiers())
        .map(|k| association_probability(model, placement, m, k))
        .collect()
}

/// Density of the serving distance (in km) given that file `m` is served by
/// tier `k`:
/// `f_R(r) = (2π p_mk λ_k / A_mk) · r · exp(−π Σ_j p_mj λ_j (P_j/P_k)^δ r²)`.
///
/// Distances are in kilometres, consistent with densities per km².
pub fn serving_distance_pdf(
    model: &NetworkModel,
    placement: &PlacementMatrix,
    m: usize,
    k: usize,
    r_km: f64,
) -> Result<f64, ModelError> {
    if !r_km.is_finite() || r_km < 0.0 {
        return Err(ModelError::Domain {
            what: "serving distance r",
            value: r_km,
            requirement: "finite and >= 0",
        });
    }
    let assoc = association_probability(model, placement, m, k)?;
    if assoc <= 0.0 {
        return Err(ModelError::ZeroAssociation { file: m, tier: k });
    }
    let delta = model.delta();
    let p_k = model.tier(k).power;
    let rate: f64 = model
        .tiers()
        .iter()
        .enumerate()
        .map(|(j, t)| placement.get(m, j) * t.density * (t.power / p_k).powf(delta))
        .sum();
    let lead = 2.0 * std::f64::consts::PI * placement.get(m, k) * model.tier(k).density / assoc;
    Ok(lead * r_km * (-std::f64::consts::PI * rate * r_km * r_km).exp())
}

fn conditional_hit_with(
    placement: &PlacementMatrix,
    funcs: &TierFunctions,
    m: usize,
) -> f64 {
    let cached = cached_weight(placement, &funcs.z, m);
    if cached <= 0.0 {
        return 0.0;
    }
    let mut total = 0.0;
    for k in 0..funcs.z.len() {
        let num = placement.get(m, k) * funcs.z[k];
        if num > 0.0 {
            total += num / (funcs.w[k] * cached + funcs.v[k] * funcs.z_total);
        }
    }
    total
}

/// Conditional hit probability for a user requesting file `m`:
/// `Σ_k p_mk z_k / (W(β_k) Σ_i p_mi z_i + V(β_k) Σ_i z_i)`.
///
/// Returns 0 when the file is cached nowhere. Panics if `m` is out of range.
pub fn conditional_hit_probability(
    model: &NetworkModel,
    placement: &PlacementMatrix,
    m: usize,
) -> f64 {
    assert!(m < placement.num_files(), "file index out of range");
    assert_eq!(
        placement.num_tiers(),
        model.num_tiers(),
        "placement tier count mismatch"
    );
    conditional_hit_with(placement, &TierFunctions::new(model), m)
}

/// Total hit probability `Σ_m q_m · P_m`.
///
/// Dispatches to the single-tier form for `K = 1` and to the uniform-threshold
/// form when all tiers share one SIR threshold; both agree with
/// [`hit_probability_general`] to machine precision.
pub fn hit_probability(
    model: &NetworkModel,
    placement: &PlacementMatrix,
    popularity: &PopularityProfile,
) -> Result<f64, ModelError> {
    check_dims(model, placement)?;
    if popularity.len() != placement.num_files() {
        return Err(ModelError::DimensionMismatch {
            what: "popularity length",
            expected: placement.num_files(),
            actual: popularity.len(),
        });
    }
    let funcs = TierFunctions::new(model);
    if model.num_tiers() == 1 {
        return Ok(hit_single_tier(placement, popularity, &funcs));
    }
    if model.uniform_sir_threshold().is_some() {
        return Ok(hit_uniform_threshold(placement, popularity, &funcs));
    }
    Ok(hit_general(placement, popularity, &funcs))
}

/// The general multi-tier hit probability, always evaluated from the full
/// expression regardless of structure. Used to cross-check the fast paths.
pub fn hit_probability_general(
    model: &NetworkModel,
    placement: &PlacementMatrix,
    popularity: &PopularityProfile,
) -> Result<f64, ModelError> {
    check_dims(model, placement)?;
    if popularity.len() != placement.num_files() {
        return Err(ModelError::DimensionMismatch {
            what: "popularity length",
            expected: placement.num_files(),
            actual: popularity.len(),
        });
    }
    let funcs = TierFunctions::new(model);
    Ok(hit_general(placement, popularity, &funcs))
}

fn hit_general(
    placement: &PlacementMatrix,
    popularity: &PopularityProfile,
    funcs: &TierFunctions,
) -> f64 {
    popularity
        .weights()
        .iter()
        .enumerate()
        .map(|(m, &q)| q * conditional_hit_with(placement, funcs, m))
        .sum()
}

/// `K = 1`: `Σ_m q_m p_m / (W p_m + V)`, independent of density and power.
fn hit_single_tier(
    placement: &PlacementMatrix,
    popularity: &PopularityProfile,
    funcs: &TierFunctions,
) -> f64 {
    let (w, v) = (funcs.w[0], funcs.v[0]);
    popularity
        .weights()
        .iter()
        .enumerate()
        .map(|(m, &q)| {
            let p = placement.get(m, 0);
            if p > 0.0 {
                q * p / (w * p + v)
            } else {
                0.0
            }
        })
        .sum()
}

/// Uniform SIR threshold: `Σ_m q_m g_m / (W g_m + V Σ z)`, `g_m = Σ_k p_mk z_k`.
fn hit_uniform_threshold(
    placement: &PlacementMatrix,
    popularity: &PopularityProfile,
    funcs: &TierFunctions,
) -> f64 {
    let (w, v) = (funcs.w[0], funcs.v[0]);
    popularity
        .weights()
        .iter()
        .enumerate()
        .map(|(m, &q)| {
            let g = cached_weight(placement, &funcs.z, m);
            if g > 0.0 {
                q * g / (w * g + v * funcs.z_total)
            } else {
                0.0
            }
        })
        .sum()
}

/// Mean backhaul delay in milliseconds for a given hit probability:
/// `(1−P)(1 + 1.28(1−P)λ_b/λ_g)c₁ + c₂`. Monotone decreasing in `P`.
pub fn backhaul_latency(hit_prob: f64, params: &LatencyParams) -> Result<f64, ModelError> {
    if !hit_prob.is_finite() || !(0.0..=1.0).contains(&hit_prob) {
        return Err(ModelError::Domain {
            what: "hit probability",
            value: hit_prob,
            requirement: "in [0, 1]",
        });
    }
    let miss = 1.0 - hit_prob;
    Ok(miss * (1.0 + 1.28 * miss * params.bs_density / params.gateway_density) * params.c1_ms
        + params.c2_ms)
}
