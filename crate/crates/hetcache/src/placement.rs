//! Content-placement optimization.
//!
//! The hit probability is maximized over the placement matrix in three
//! regimes, each reduced to Lagrangian water-filling with a bisection search
//! for the multiplier:
//!
//! * single tier — exact closed form: the optimal probability is affine in
//!   `√q_m` between two popularity thresholds and saturates at 0 / 1 outside
//!   them;
//! * multiple tiers with a uniform SIR threshold — exact: the tier-weighted
//!   sums `g_m = Σ_k p_mk z_k` solve a single-tier-shaped relaxation, and a
//!   sequential fill recovers a feasible matrix achieving them;
//! * non-uniform SIR thresholds — sub-optimal: the coupling between tiers is
//!   dropped, giving one independent single-tier problem per tier with an
//!   inflated interference constant `Ṽ(β_k) = V(β_k)·Σz/z_k`.
//!
//! A dual-decomposition reference solver for small instances lives in
//! [`crate::reference`].

use thiserror::Error;

use crate::analysis::hit_probability;
use crate::model::{
    ModelError, NetworkModel, PlacementMatrix, PopularityProfile, TierFunctions,
};

#[derive(Debug, Error)]
pub enum PlacementError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("could not bracket the multiplier: budget({lo}) = {budget_lo}, budget({hi}) = {budget_hi}, target {target}")]
    Bracket {
        lo: f64,
        hi: f64,
        budget_lo: f64,
        budget_hi: f64,
        target: f64,
    },
    #[error("tier SIR thresholds differ; the uniform-threshold solver does not apply")]
    UniformBetaRequired,
    #[error("solver requires exactly two tiers (got {0})")]
    RequiresTwoTiers(usize),
    #[error("tier {tier} capacity {capacity} is invalid for a catalog of {num_files} files")]
    InvalidCapacity {
        tier: usize,
        capacity: f64,
        num_files: usize,
    },
    #[error("sequential fill could not achieve the weighted-sum identity ({detail})")]
    FillInfeasible { detail: String },
    #[error("placement closed form requires W(beta) > 0 (got {w}); SIR threshold outside the supported regime")]
    NonpositiveW { w: f64 },
}

/// Exact single-tier solution: placement vector, optimal multiplier, and the
/// popularity thresholds `(T0, T1)` delimiting the dispensability / diversity
/// / densification ranges.
#[derive(Debug, Clone)]
pub struct SingleTierSolution {
    pub p: Vec<f64>,
    pub multiplier: f64,
    pub thresholds: (f64, f64),
}

/// Solution of the relaxed uniform-threshold problem in terms of the
/// tier-weighted placement sums `g_m = Σ_k p_mk z_k`.
#[derive(Debug, Clone)]
pub struct WeightedSumSolution {
    pub g: Vec<f64>,
    pub multiplier: f64,
    pub thresholds: (f64, f64),
}

/// Outcome summary attached to solver results.
#[derive(Debug, Clone)]
pub struct SolverReport {
    /// Hit probability achieved by the returned placement.
    pub objective: f64,
    /// Bisection / outer-loop iterations spent.
    pub iterations: usize,
    pub converged: bool,
    /// Relative objective gap versus a reference solution, when measured.
    pub gap_vs_reference: Option<f64>,
    /// Duality-gap estimate, reported by the dual-decomposition solver.
    pub duality_gap: Option<f64>,
}

/// Bisection stop thresholds. The width criterion runs essentially to the
/// double-precision floor so the downstream budget identities hold to 1e-8
/// even when budgets reach O(10^2); the budget criterion scales with the
/// target for the same reason.
const BISECT_WIDTH_TOL: f64 = 1e-15;
const BISECT_MAX_ITERS: usize = 200;

fn budget_tolerance(target: f64) -> f64 {
    1e-11 * target.abs().max(1.0)
}

/// Finds `u` with `budget(u) = target` for a non-increasing budget function.
///
/// The initial bracket `[lo, hi]` is expanded geometrically (up to 60 steps
/// each way) if it does not straddle the target. Returns the multiplier and
/// the number of bisection iterations. Deterministic.
pub fn bisect_multiplier<F: Fn(f64) -> f64>(
    budget: F,
    target: f64,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<(f64, usize), PlacementError> {
    let mut lo = lo.max(0.0);
    let mut hi = hi.max(lo);
    let mut budget_lo = budget(lo);
    let mut budget_hi = budget(hi);
    let mut tries = 0;
    while budget_lo < target && lo > 0.0 && tries < 60 {
        lo *= 0.5;
        if lo < 1e-300 {
            lo = 0.0;
        }
        budget_lo = budget(lo);
        tries += 1;
    }
    tries = 0;
    while budget_hi > target && tries < 60 {
        hi = if hi > 0.0 { hi * 2.0 } else { 1.0 };
        budget_hi = budget(hi);
        tries += 1;
    }
    let budget_tol = budget_tolerance(target);
    if budget_lo < target - budget_tol || budget_hi > target + budget_tol {
        return Err(PlacementError::Bracket {
            lo,
            hi,
            budget_lo,
            budget_hi,
            target,
        });
    }
    let mut iterations = 0;
    let mut mid = 0.5 * (lo + hi);
    while iterations < BISECT_MAX_ITERS {
        mid = 0.5 * (lo + hi);
        if hi - lo <= tol * (1.0 + mid.abs()) {
            break;
        }
        let b = budget(mid);
        iterations += 1;
        if (b - target).abs() < budget_tol {
            return Ok((mid, iterations));
        }
        if b < target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((mid, iterations))
}

struct WaterFill {
    values: Vec<f64>,
    multiplier: f64,
    thresholds: (f64, f64),
    iterations: usize,
}

/// Water-filling core shared by every closed-form solver.
///
/// Solves `max Σ q_m x_m/(w x_m + v)` s.t. `Σ x_m = budget`, `0 ≤ x_m ≤ cap`:
/// at the optimal multiplier `u`, `x_m` saturates at `cap` for
/// `q_m ≥ T1 = u(w·cap+v)²/v`, drops to 0 for `q_m ≤ T0 = u·v`, and follows
/// `(√(q_m v/u) − v)/w` in between. The single-tier problem uses `cap = 1`;
/// the uniform-threshold relaxation uses `cap = Σz` with `v → V·Σz`.
fn water_fill(
    q: &[f64],
    budget: f64,
    cap: f64,
    w: f64,
    v: f64,
) -> Result<WaterFill, PlacementError> {
    if w <= 0.0 {
        return Err(PlacementError::NonpositiveW { w });
    }
    debug_assert!(v > 0.0 && cap > 0.0);
    let q_first = q[0];
    let q_last = q[q.len() - 1];
    // At u = q_last*v/(w*cap+v)^2 every file saturates; at u = q_first/v every
    // file is dropped, so the bracket straddles any 0 < budget <= M*cap.
    let lo = q_last * v / ((w * cap + v) * (w * cap + v));
    let hi = q_first / v;
    let value_at = |u: f64, qm: f64| -> f64 {
        let t1 = u * (w * cap + v) * (w * cap + v) / v;
        let t0 = u * v;
        if qm >= t1 {
            cap
        } else if qm <= t0 {
            0.0
        } else {
            ((qm * v / u).sqrt() - v) / w
        }
    };
    let budget_at = |u: f64| -> f64 { q.iter().map(|&qm| value_at(u, qm)).sum() };
    let (u, iterations) = bisect_multiplier(budget_at, budget, lo, hi, BISECT_WIDTH_TOL)?;
    let values = q
        .iter()
        .map(|&qm| value_at(u, qm).clamp(0.0, cap))
        .collect();
    Ok(WaterFill {
        values,
        multiplier: u,
        thresholds: (u * v, u * (w * cap + v) * (w * cap + v) / v),
        iterations,
    })
}

/// Optimal single-tier placement for capacity `C`, SIR threshold `beta`
/// (linear) and `delta = 2/α`.
///
/// The capacity constraint is active at the optimum: `Σ p_m = C`.
pub fn solve_single_tier(
    q: &PopularityProfile,
    capacity: f64,
    beta: f64,
    delta: f64,
) -> Result<SingleTierSolution, PlacementError> {
    let w = crate::specfun::w_func(beta, delta)?;
    let v = crate::specfun::v_func(beta, delta)?;
    solve_single_tier_with(q, capacity, w, v)
}

/// Single-tier solver over explicit interference constants `(w, v)`; used
/// directly by the per-tier decomposition and the hybrid baseline.
pub fn solve_single_tier_with(
    q: &PopularityProfile,
    capacity: f64,
    w: f64,
    v: f64,
) -> Result<SingleTierSolution, PlacementError> {
    let m = q.len();
    if !capacity.is_finite() || capacity <= 0.0 || capacity > m as f64 + 1e-9 {
        return Err(PlacementError::InvalidCapacity {
            tier: 0,
            capacity,
            num_files: m,
        });
    }
    let fill = water_fill(q.weights(), capacity.min(m as f64), 1.0, w, v)?;
    Ok(SingleTierSolution {
        p: fill.values,
        multiplier: fill.multiplier,
        thresholds: fill.thresholds,
    })
}

fn uniform_relaxed_with_iters(
    q: &PopularityProfile,
    model: &NetworkModel,
) -> Result<(WeightedSumSolution, usize), PlacementError> {
    let beta = model
        .uniform_sir_threshold()
        .ok_or(PlacementError::UniformBetaRequired)?;
    model.validate_capacities(q.len())?;
    let delta = model.delta();
    let w = crate::specfun::w_func(beta, delta)?;
    let v = crate::specfun::v_func(beta, delta)?;
    let z = model.tier_weights();
    let z_total: f64 = z.iter().sum();
    let budget: f64 = model
        .tiers()
        .iter()
        .zip(&z)
        .map(|(t, zk)| t.cache_capacity * zk)
        .sum();
    let fill = water_fill(q.weights(), budget, z_total, w, v * z_total)?;
    Ok((
        WeightedSumSolution {
            g: fill.values,
            multiplier: fill.multiplier,
            thresholds: fill.thresholds,
        },
        fill.iterations,
    ))
}

/// Relaxed uniform-threshold problem: optimal tier-weighted sums
/// `g_m ∈ [0, Σz]` under the aggregate budget `Σ g_m = Σ_k C_k z_k`.
pub fn solve_uniform_relaxed(
    q: &PopularityProfile,
    model: &NetworkModel,
) -> Result<WeightedSumSolution, PlacementError> {
    uniform_relaxed_with_iters(q, model).map(|(sol, _)| sol)
}

/// Recovers a feasible placement matrix from relaxed weighted sums by the
/// sequential rule: each interior row spreads its target `g_m` over tiers in
/// proportion to remaining capacities, entries capped at 1 and at the
/// remaining column budget, with a redistribution pass over whatever headroom
/// is left when capping produces a shortfall.
///
/// Post-conditions (verified, error on failure): `Σ_k p_mk z_k = g_m ± 1e-8`
/// per row and `Σ_m p_mk = C_k ± 1e-8` per tier.
pub fn sequential_fill(
    gsol: &WeightedSumSolution,
    model: &NetworkModel,
    q: &PopularityProfile,
) -> Result<PlacementMatrix, PlacementError> {
    let num_files = gsol.g.len();
    if q.len() != num_files {
        return Err(PlacementError::Model(ModelError::DimensionMismatch {
            what: "popularity length",
            expected: num_files,
            actual: q.len(),
        }));
    }
    let num_tiers = model.num_tiers();
    let z = model.tier_weights();
    let z_total: f64 = z.iter().sum();
    let (t0, t1) = gsol.thresholds;
    let mut cap: Vec<f64> = model.tiers().iter().map(|t| t.cache_capacity).collect();
    // Suffix sums of g, the denominator of the proportional split.
    let mut tail = vec![0.0; num_files + 1];
    for m in (0..num_files).rev() {
        tail[m] = tail[m + 1] + gsol.g[m];
    }
    let mut rows = vec![vec![0.0; num_tiers]; num_files];
    for m in 0..num_files {
        let qm = q.get(m);
        if qm >= t1 {
            for k in 0..num_tiers {
                if cap[k] < 1.0 - 1e-9 {
                    return Err(PlacementError::FillInfeasible {
                        detail: format!(
                            "file {m} must be cached everywhere but tier {k} has only {} capacity left",
                            cap[k]
                        ),
                    });
                }
                rows[m][k] = 1.0;
                cap[k] -= 1.0;
            }
            continue;
        }
        if qm <= t0 || gsol.g[m] <= 1e-15 * z_total {
            continue;
        }
        let denom = tail[m];
        let mut cum_target = 0.0;
        let mut assigned = 0.0;
        for k in 0..num_tiers {
            cum_target += gsol.g[m] / denom * cap[k] * z[k];
            let raw = (cum_target - assigned) / z[k];
            let p = raw.clamp(0.0, 1.0).min(cap[k].max(0.0));
            rows[m][k] = p;
            assigned += p * z[k];
        }
        if assigned < gsol.g[m] - 1e-12 * z_total {
            for k in 0..num_tiers {
                let room = (1.0f64.min(cap[k].max(0.0)) - rows[m][k]).max(0.0);
                if room <= 0.0 {
                    continue;
                }
                let take = room.min((gsol.g[m] - assigned) / z[k]);
                rows[m][k] += take;
                assigned += take * z[k];
                if assigned >= gsol.g[m] - 1e-12 * z_total {
                    break;
                }
            }
        }
        if (assigned - gsol.g[m]).abs() > 1e-8 * z_total.max(1.0) {
            return Err(PlacementError::FillInfeasible {
                detail: format!(
                    "row {m}: assigned weight {assigned} != target {} after redistribution",
                    gsol.g[m]
                ),
            });
        }
        for k in 0..num_tiers {
            cap[k] -= rows[m][k];
        }
    }
    for (k, t) in model.tiers().iter().enumerate() {
        let used: f64 = rows.iter().map(|r| r[k]).sum();
        if (used - t.cache_capacity).abs() > 1e-8 * t.cache_capacity.max(1.0) {
            return Err(PlacementError::FillInfeasible {
                detail: format!(
                    "tier {k}: column sum {used} != capacity {}",
                    t.cache_capacity
                ),
            });
        }
    }
    Ok(PlacementMatrix::from_rows(rows, model)?)
}

/// End-to-end optimal placement for uniform SIR thresholds: relaxation over
/// the weighted sums followed by the sequential fill. O(D·M·K) with D the
/// bisection iteration count.
pub fn solve_uniform(
    model: &NetworkModel,
    q: &PopularityProfile,
) -> Result<(PlacementMatrix, SolverReport), PlacementError> {
    let (relaxed, iterations) = uniform_relaxed_with_iters(q, model)?;
    let matrix = sequential_fill(&relaxed, model, q)?;
    let objective = hit_probability(model, &matrix, q)?;
    Ok((
        matrix,
        SolverReport {
            objective,
            iterations,
            converged: true,
            gap_vs_reference: None,
            duality_gap: None,
        },
    ))
}

/// Sub-optimal placement for non-uniform SIR thresholds: the cross-tier
/// coupling is dropped and each tier solves its own single-tier problem with
/// the inflated constant `Ṽ(β_k) = V(β_k)·Σz/z_k`.
pub fn solve_nonuniform_suboptimal(
    model: &NetworkModel,
    q: &PopularityProfile,
) -> Result<(PlacementMatrix, SolverReport), PlacementError> {
    model.validate_capacities(q.len())?;
    let funcs = TierFunctions::new(model);
    let num_files = q.len();
    let mut rows = vec![vec![0.0; model.num_tiers()]; num_files];
    let mut iterations = 0;
    for k in 0..model.num_tiers() {
        let capacity = model.tier(k).cache_capacity;
        let v_tilde = funcs.v[k] * funcs.z_total / funcs.z[k];
        let fill = water_fill(
            q.weights(),
            capacity.min(num_files as f64),
            1.0,
            funcs.w[k],
            v_tilde,
        )?;
        iterations += fill.iterations;
        for m in 0..num_files {
            rows[m][k] = fill.values[m];
        }
    }
    let matrix = PlacementMatrix::from_rows(rows, model)?;
    let objective = hit_probability(model, &matrix, q)?;
    Ok((
        matrix,
        SolverReport {
            objective,
            iterations,
            converged: true,
            gap_vs_reference: None,
            duality_gap: None,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::{zipf_popularity, ZipfParams};
    use crate::model::TierParams;

    #[test]
    fn bisect_analytic_inverse() {
        // budget(u) = 1/u, target 2 on [0.1, 10] -> 0.5.
        let (u, _) = bisect_multiplier(|u| 1.0 / u, 2.0, 0.1, 10.0, 1e-12).unwrap();
        assert!((u - 0.5).abs() < 1e-10, "u = {u}");
    }

    #[test]
    fn bisect_linear_exact() {
        let (u, _) = bisect_multiplier(|u| 10.0 - u, 3.0, 0.0, 20.0, 1e-12).unwrap();
        assert!((u - 7.0).abs() < 1e-9);
    }

    #[test]
    fn bisect_expands_bracket() {
        let (u, _) = bisect_multiplier(|u| 100.0 / u, 2.0, 1.0, 2.0, 1e-12).unwrap();
        assert!((u - 50.0).abs() < 1e-8);
    }

    #[test]
    fn bisect_unreachable_target() {
        // budget bounded by 5, target 10: no bracket exists.
        assert!(matches!(
            bisect_multiplier(|u| 5.0 / (1.0 + u), 10.0, 0.0, 1.0, 1e-12),
            Err(PlacementError::Bracket { .. })
        ));
    }

    #[test]
    fn single_tier_full_capacity() {
        let q = zipf_popularity(&ZipfParams::new(5, 1.0).unwrap());
        let sol = solve_single_tier(&q, 5.0, 0.5, 0.5).unwrap();
        for &p in &sol.p {
            assert!((p - 1.0).abs() < 1e-9, "p = {p}");
        }
    }

    #[test]
    fn single_tier_uniform_popularity() {
        let m = 8;
        let q = PopularityProfile::new(vec![1.0 / m as f64; m]).unwrap();
        let sol = solve_single_tier(&q, 3.0, 0.5, 0.5).unwrap();
        for &p in &sol.p {
            assert!((p - 3.0 / m as f64).abs() < 1e-9, "p = {p}");
        }
    }

    #[test]
    fn single_tier_budget_active() {
        let q = zipf_popularity(&ZipfParams::new(12, 0.9).unwrap());
        for capacity in [1.0, 3.5, 7.0, 11.0] {
            let sol = solve_single_tier(&q, capacity, 10f64.powf(-0.4), 2.0 / 3.0).unwrap();
            let sum: f64 = sol.p.iter().sum();
            assert!((sum - capacity).abs() < 1e-8, "C={capacity}: sum={sum}");
            // Piecewise structure: p non-increasing, classified by thresholds.
            let (t0, t1) = sol.thresholds;
            for m in 0..q.len() {
                let qm = q.get(m);
                if qm >= t1 + 1e-12 {
                    assert!((sol.p[m] - 1.0).abs() < 1e-12);
                } else if qm <= t0 - 1e-12 {
                    assert!(sol.p[m] == 0.0);
                }
                if m > 0 {
                    assert!(sol.p[m] <= sol.p[m - 1] + 1e-12);
                }
            }
        }
    }

    #[test]
    fn single_tier_rejects_bad_capacity() {
        let q = zipf_popularity(&ZipfParams::new(4, 1.0).unwrap());
        assert!(solve_single_tier(&q, 0.0, 1.0, 0.5).is_err());
        assert!(solve_single_tier(&q, 5.0, 1.0, 0.5).is_err());
    }

    fn uniform_model(betas_equal: bool) -> NetworkModel {
        let b2 = if betas_equal { 0.5 } else { 0.8 };
        NetworkModel::new(
            3.0,
            vec![
                TierParams::new(1.0, 20.0, 0.5, 3.0).unwrap(),
                TierParams::new(4.0, 1.0, b2, 2.0).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn relaxed_requires_uniform_beta() {
        let q = zipf_popularity(&ZipfParams::new(6, 0.8).unwrap());
        assert!(matches!(
            solve_uniform_relaxed(&q, &uniform_model(false)),
            Err(PlacementError::UniformBetaRequired)
        ));
    }

    #[test]
    fn relaxed_budget_identity() {
        let model = uniform_model(true);
        let q = zipf_popularity(&ZipfParams::new(6, 0.8).unwrap());
        let sol = solve_uniform_relaxed(&q, &model).unwrap();
        let z = model.tier_weights();
        let budget: f64 = model
            .tiers()
            .iter()
            .zip(&z)
            .map(|(t, zk)| t.cache_capacity * zk)
            .sum();
        let total: f64 = sol.g.iter().sum();
        assert!((total - budget).abs() < 1e-8 * budget, "{total} vs {budget}");
        // g non-increasing, bounded by the total weight.
        let z_total: f64 = z.iter().sum();
        for m in 0..sol.g.len() {
            assert!(sol.g[m] >= -1e-12 && sol.g[m] <= z_total + 1e-9);
            if m > 0 {
                assert!(sol.g[m] <= sol.g[m - 1] + 1e-12);
            }
        }
    }

    #[test]
    fn relaxed_uniform_popularity_symmetric() {
        let model = uniform_model(true);
        let m = 10;
        let q = PopularityProfile::new(vec![1.0 / m as f64; m]).unwrap();
        let sol = solve_uniform_relaxed(&q, &model).unwrap();
        let z = model.tier_weights();
        let budget: f64 = model
            .tiers()
            .iter()
            .zip(&z)
            .map(|(t, zk)| t.cache_capacity * zk)
            .sum();
        for &g in &sol.g {
            assert!((g - budget / m as f64).abs() < 1e-8, "g = {g}");
        }
    }

    #[test]
    fn fill_satisfies_both_identities() {
        let model = uniform_model(true);
        let q = zipf_popularity(&ZipfParams::new(6, 0.8).unwrap());
        let relaxed = solve_uniform_relaxed(&q, &model).unwrap();
        let matrix = sequential_fill(&relaxed, &model, &q).unwrap();
        let z = model.tier_weights();
        for m in 0..q.len() {
            let got: f64 = matrix.row(m).iter().zip(&z).map(|(&p, &zk)| p * zk).sum();
            assert!(
                (got - relaxed.g[m]).abs() < 1e-8,
                "row {m}: {got} vs {}",
                relaxed.g[m]
            );
        }
        for (k, t) in model.tiers().iter().enumerate() {
            assert!((matrix.column_sum(k) - t.cache_capacity).abs() < 1e-8);
        }
    }

    #[test]
    fn fill_single_tier_degenerates_to_closed_form() {
        let model =
            NetworkModel::new(3.5, vec![TierParams::new(2.0, 3.0, 0.6, 4.0).unwrap()]).unwrap();
        let q = zipf_popularity(&ZipfParams::new(9, 1.1).unwrap());
        let (matrix, _) = solve_uniform(&model, &q).unwrap();
        let direct = solve_single_tier(&q, 4.0, 0.6, model.delta()).unwrap();
        for m in 0..q.len() {
            assert!(
                (matrix.get(m, 0) - direct.p[m]).abs() < 1e-7,
                "m={m}: {} vs {}",
                matrix.get(m, 0),
                direct.p[m]
            );
        }
    }

    #[test]
    fn solve_uniform_all_capacity_gives_ones() {
        let model = NetworkModel::new(
            3.0,
            vec![
                TierParams::new(1.0, 5.0, 0.5, 4.0).unwrap(),
                TierParams::new(2.0, 1.0, 0.5, 4.0).unwrap(),
            ],
        )
        .unwrap();
        let q = zipf_popularity(&ZipfParams::new(4, 0.7).unwrap());
        let (matrix, _) = solve_uniform(&model, &q).unwrap();
        for m in 0..4 {
            for k in 0..2 {
                assert!((matrix.get(m, k) - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn suboptimal_single_tier_matches_exact() {
        // K=1: v_tilde = v, so the per-tier decomposition is the exact solver.
        let model =
            NetworkModel::new(3.0, vec![TierParams::new(1.5, 2.0, 0.4, 3.0).unwrap()]).unwrap();
        let q = zipf_popularity(&ZipfParams::new(7, 0.9).unwrap());
        let (matrix, _) = solve_nonuniform_suboptimal(&model, &q).unwrap();
        let exact = solve_single_tier(&q, 3.0, 0.4, model.delta()).unwrap();
        for m in 0..q.len() {
            assert!((matrix.get(m, 0) - exact.p[m]).abs() < 1e-9);
        }
    }

    #[test]
    fn suboptimal_columns_meet_budgets() {
        let model = NetworkModel::new(
            3.0,
            vec![
                TierParams::new(1.0, 10f64.powf(1.6), 10f64.powf(-0.4), 6.0).unwrap(),
                TierParams::new(10.0, 1.0, 10f64.powf(-0.2), 4.0).unwrap(),
            ],
        )
        .unwrap();
        let q = zipf_popularity(&ZipfParams::new(10, 0.8).unwrap());
        let (matrix, report) = solve_nonuniform_suboptimal(&model, &q).unwrap();
        assert!((matrix.column_sum(0) - 6.0).abs() < 1e-8);
        assert!((matrix.column_sum(1) - 4.0).abs() < 1e-8);
        assert!(report.objective > 0.0 && report.objective <= 1.0);
    }
}
