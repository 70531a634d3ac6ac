//! Hit-probability analysis and content placement for cache-enabled
//! multi-tier cellular networks.
//!
//! Base stations form independent Poisson point processes, one per tier, each
//! tier with its own density, transmission power, SIR threshold, and cache
//! capacity. Files are cached probabilistically: a tier-`k` station holds
//! file `m` with placement probability `p_mk`. The crate provides
//!
//! * closed-form association, serving-distance, and hit-probability
//!   expressions for this model ([`analysis`], [`specfun`]);
//! * optimal and sub-optimal placement solvers that maximize the hit
//!   probability under per-tier cache budgets ([`placement`], [`reference`]);
//! * benchmark policies and Zipf popularity ([`baselines`]);
//! * a from-scratch Monte Carlo simulator validating the closed forms
//!   ([`sim`]);
//! * a config-driven experiment harness behind the `hetcache` CLI
//!   ([`config`], [`experiment`], [`output`]).

pub mod analysis;
pub mod baselines;
pub mod config;
pub mod experiment;
pub mod model;
pub mod output;
pub mod placement;
pub mod reference;
pub mod sim;
pub mod specfun;

pub use analysis::{
    association_probabilities, association_probability, backhaul_latency,
    conditional_hit_probability, hit_probability, hit_probability_general, serving_distance_pdf,
};
pub use baselines::{hcp_placement, mpcp_placement, zipf_popularity, ZipfParams};
pub use model::{
    LatencyParams, ModelError, NetworkModel, PlacementMatrix, PopularityProfile, TierParams,
};
pub use placement::{
    bisect_multiplier, sequential_fill, solve_nonuniform_suboptimal, solve_single_tier,
    solve_single_tier_with, solve_uniform, solve_uniform_relaxed, PlacementError,
    SingleTierSolution, SolverReport, WeightedSumSolution,
};
pub use reference::{solve_reference, ReferenceOptions};
pub use sim::{
    sample_realization, simulate_conditional_hit, simulate_conditional_hit_at_radii, simulate_hit,
    simulate_hit_direct, SimConfig, SimEstimate,
};
pub use specfun::{q_func, q_func_series, v_func, w_func};
