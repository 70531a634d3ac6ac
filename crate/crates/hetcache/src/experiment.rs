//! Experiment runner: expands a config's sweep, evaluates every policy at
//! each point, and produces deterministic result rows.

use thiserror::Error;

use crate::analysis::{backhaul_latency, conditional_hit_probability, hit_probability};
use crate::baselines::{hcp_placement, mpcp_placement};
use crate::config::{ConfigError, ExperimentConfig, PolicyKind, SweepTarget};
use crate::model::{ModelError, NetworkModel, PlacementMatrix, PopularityProfile};
use crate::output::ResultRow;
use crate::placement::{solve_nonuniform_suboptimal, solve_uniform, PlacementError};
use crate::reference::{solve_reference, ReferenceOptions};
use crate::sim::{simulate_conditional_hit, simulate_hit, simulate_hit_direct, SimConfig};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Placement(#[from] PlacementError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("policy {policy} failed at sweep point {point:?}: {message}")]
    PolicyFailed {
        policy: &'static str,
        point: Option<f64>,
        message: String,
    },
}

/// Builds the placement matrix a policy prescribes for the given point.
fn policy_placement(
    policy: PolicyKind,
    cfg: &ExperimentConfig,
    model: &NetworkModel,
    q: &PopularityProfile,
    seed: u64,
) -> Result<PlacementMatrix, ExperimentError> {
    let wrap = |e: PlacementError, policy: &'static str| ExperimentError::PolicyFailed {
        policy,
        point: None,
        message: e.to_string(),
    };
    match policy {
        PolicyKind::TlcpUniform => Ok(solve_uniform(model, q)
            .map_err(|e| wrap(e, "tlcp-uniform"))?
            .0),
        PolicyKind::TlcpSuboptimal => Ok(solve_nonuniform_suboptimal(model, q)
            .map_err(|e| wrap(e, "tlcp-suboptimal"))?
            .0),
        PolicyKind::TlcpReference => {
            let options = ReferenceOptions {
                seed,
                ..ReferenceOptions::default()
            };
            Ok(solve_reference(model, q, &options)
                .map_err(|e| wrap(e, "tlcp-reference"))?
                .0)
        }
        PolicyKind::Mpcp => Ok(mpcp_placement(model, q.len()).map_err(|e| wrap(e, "mpcp"))?),
        PolicyKind::Hcp => Ok(hcp_placement(model, q).map_err(|e| wrap(e, "hcp"))?),
        PolicyKind::ExplicitMatrix => {
            let rows = cfg
                .policy
                .matrix
                .clone()
                .expect("validated: explicit-matrix has a matrix");
            Ok(PlacementMatrix::from_rows(rows, model)?)
        }
    }
}

/// Runs the configured experiment: one row per (sweep value × policy), rows
/// ordered by sweep index then policy name. Deterministic given the seeds in
/// the config.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>, ExperimentError> {
    cfg.validate()?;
    let points: Vec<Option<f64>> = match &cfg.sweep {
        Some(sweep) => sweep.values.iter().map(|&v| Some(v)).collect(),
        None => vec![None],
    };
    let mut policies = cfg.policy.names.clone();
    policies.sort_by_key(|p| p.name());
    policies.dedup();

    let mut rows = Vec::new();
    for point in points {
        let mut point_cfg = cfg.clone();
        if let Some(value) = point {
            let target = SweepTarget::parse(&cfg.sweep.as_ref().unwrap().parameter, cfg)?;
            target.apply(&mut point_cfg, value)?;
            point_cfg.validate()?;
        }
        let model = point_cfg.network_model()?;
        let q = point_cfg.popularity_profile()?;
        let sim_cfg = point_cfg.sim_config(&model)?;
        let latency = point_cfg.latency_params()?;
        let seed = point_cfg.simulation.as_ref().map(|s| s.seed).unwrap_or(0);

        // One reference solve per point serves every policy's gap column.
        let reference_objective = if point_cfg.policy.compare_reference {
            let options = ReferenceOptions {
                seed,
                ..ReferenceOptions::default()
            };
            let (_, report) = solve_reference(&model, &q, &options)?;
            Some(report.objective)
        } else {
            None
        };

        for &policy in &policies {
            let placement = policy_placement(policy, &point_cfg, &model, &q, seed)
                .map_err(|e| match e {
                    ExperimentError::PolicyFailed {
                        policy, message, ..
                    } => ExperimentError::PolicyFailed {
                        policy,
                        point,
                        message,
                    },
                    other => other,
                })?;
            let analytic = match sim_cfg.as_ref().and_then(|s| s.target_file) {
                Some(m) => conditional_hit_probability(&model, &placement, m),
                None => hit_probability(&model, &placement, &q)?,
            };
            let (simulated, stderr) = match &sim_cfg {
                None => (None, None),
                Some(sc) => {
                    let est = match sc.target_file {
                        Some(m) => simulate_conditional_hit(&model, &placement, m, sc),
                        None => match point_cfg.simulation.as_ref().and_then(|s| s.mode.as_deref())
                        {
                            Some("direct") => simulate_hit_direct(&model, &placement, &q, sc),
                            _ => simulate_hit(&model, &placement, &q, sc),
                        },
                    };
                    (Some(est.mean), Some(est.stderr))
                }
            };
            let objective_gap = reference_objective.map(|reference| {
                if reference > 0.0 {
                    (reference - analytic) / reference
                } else {
                    0.0
                }
            });
            let backhaul_latency_ms = match &latency {
                Some(params) => Some(backhaul_latency(analytic, params)?),
                None => None,
            };
            rows.push(ResultRow {
                sweep_value: point,
                policy: policy.name().to_string(),
                analytic_hit: analytic,
                simulated_hit: simulated,
                stderr,
                objective_gap,
                backhaul_latency_ms,
            });
        }
    }
    Ok(rows)
}

/// Suggested simulation window when the config leaves the radius implicit.
pub fn default_sim_config(model: &NetworkModel, trials: u64, seed: u64) -> SimConfig {
    let radius = SimConfig::suggested_region_radius(model, 500.0);
    SimConfig::new(radius, trials.max(1), seed).expect("positive radius and trials")
}
