//! Monte Carlo validation of the closed-form hit probabilities.
//!
//! Each trial samples every tier as an independent Poisson point process in a
//! disc centred on the typical user, marks stations as holding the requested
//! file by independent thinning with the tier's placement probability,
//! associates the user with the strongest-average-power marked station (no
//! fading in association), draws i.i.d. unit-mean Rayleigh fading powers, and
//! tests the resulting SIR against the serving tier's threshold.
//!
//! Trials draw from counter-based ChaCha streams keyed by `(seed, file,
//! trial)`, so estimates are bit-identical across runs and thread counts; the
//! reduction over trials is an integer hit count and therefore
//! order-insensitive.
//!
//! Interference is truncated at the disc boundary. The tail a disc of radius
//! `R` misses decays like `R^{2−α}`, so the truncation bias shrinks with the
//! window; [`simulate_conditional_hit_at_radii`] evaluates one sample set at
//! several nested radii to measure exactly that residual.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Exp1, Poisson};
use rayon::prelude::*;

use crate::model::{ModelError, NetworkModel, PlacementMatrix, PopularityProfile};

const SALT_CONDITIONAL: u64 = 0x6869_745f_636f_6e64;
const SALT_DIRECT: u64 = 0x6869_745f_6469_7263;

/// Monte Carlo controls.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Radius of the simulation disc, km.
    pub region_radius_km: f64,
    /// Bernoulli trials per estimate.
    pub trials: u64,
    pub seed: u64,
    /// When set, the harness estimates the conditional hit probability of
    /// this file instead of the popularity-weighted total.
    pub target_file: Option<usize>,
}

impl SimConfig {
    pub fn new(region_radius_km: f64, trials: u64, seed: u64) -> Result<Self, ModelError> {
        if !region_radius_km.is_finite() || region_radius_km <= 0.0 {
            return Err(ModelError::InvalidParameter {
                field: "region_radius_km",
                value: region_radius_km,
                requirement: "finite and strictly positive",
            });
        }
        if trials == 0 {
            return Err(ModelError::InvalidParameter {
                field: "trials",
                value: 0.0,
                requirement: ">= 1",
            });
        }
        Ok(Self {
            region_radius_km,
            trials,
            seed,
            target_file: None,
        })
    }

    pub fn with_target_file(mut self, file: usize) -> Self {
        self.target_file = Some(file);
        self
    }

    /// Disc radius giving the sparsest tier an expected `min_expected`
    /// stations (the default sizing rule uses 500).
    pub fn suggested_region_radius(model: &NetworkModel, min_expected: f64) -> f64 {
        let min_density = model
            .tiers()
            .iter()
            .map(|t| t.density)
            .fold(f64::INFINITY, f64::min);
        (min_expected / (std::f64::consts::PI * min_density)).sqrt()
    }

    /// Warns when the sparsest tier has fewer than 100 expected stations in
    /// the window, where truncation effects become visible.
    pub fn region_warning(&self, model: &NetworkModel) -> Option<String> {
        let area = std::f64::consts::PI * self.region_radius_km * self.region_radius_km;
        let min_expected = model
            .tiers()
            .iter()
            .map(|t| t.density * area)
            .fold(f64::INFINITY, f64::min);
        if min_expected < 100.0 {
            Some(format!(
                "simulation window of radius {} km gives the sparsest tier only {:.1} expected stations; estimates may carry visible truncation bias",
                self.region_radius_km, min_expected
            ))
        } else {
            None
        }
    }
}

/// A Monte Carlo estimate with its Bernoulli standard error and 95% interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
    pub ci95: (f64, f64),
}

impl SimEstimate {
    fn from_bernoulli(hits: u64, trials: u64) -> Self {
        let mean = hits as f64 / trials as f64;
        let stderr = (mean * (1.0 - mean) / trials as f64).sqrt();
        Self::from_moments(mean, stderr, trials)
    }

    fn from_moments(mean: f64, stderr: f64, trials: u64) -> Self {
        Self {
            mean,
            stderr,
            trials,
            ci95: (
                (mean - 1.96 * stderr).max(0.0),
                (mean + 1.96 * stderr).min(1.0),
            ),
        }
    }

    pub fn contains(&self, value: f64) -> bool {
        self.ci95.0 <= value && value <= self.ci95.1
    }
}

/// Path-gain kernel `d^{-α}` evaluated on squared distances, specialized for
/// the common exponents (the generic `powf` dominates the trial cost).
#[derive(Debug, Clone, Copy)]
enum PathGain {
    InvR3,
    InvR4,
    General(f64),
}

impl PathGain {
    fn from_alpha(alpha: f64) -> Self {
        if alpha == 3.0 {
            Self::InvR3
        } else if alpha == 4.0 {
            Self::InvR4
        } else {
            Self::General(-0.5 * alpha)
        }
    }

    #[inline]
    fn eval(self, d2: f64) -> f64 {
        match self {
            Self::InvR3 => 1.0 / (d2 * d2.sqrt()),
            Self::InvR4 => 1.0 / (d2 * d2),
            Self::General(e) => d2.powf(e),
        }
    }
}

struct TierSim {
    count: Poisson<f64>,
    power: f64,
    beta: f64,
    placement: f64,
}

/// Shared per-trial context: tier draws and the path-gain kernel for one
/// (model, placement row, window) combination.
struct Realizer {
    tiers: Vec<TierSim>,
    gain: PathGain,
    r2_max: f64,
}

impl Realizer {
    fn new(model: &NetworkModel, placement: &PlacementMatrix, m: usize, radius_km: f64) -> Self {
        assert!(m < placement.num_files(), "file index out of range");
        assert_eq!(
            placement.num_tiers(),
            model.num_tiers(),
            "placement tier count mismatch"
        );
        let area = std::f64::consts::PI * radius_km * radius_km;
        let tiers = model
            .tiers()
            .iter()
            .enumerate()
            .map(|(k, t)| TierSim {
                count: Poisson::new(t.density * area).expect("positive mean"),
                power: t.power,
                beta: t.sir_threshold,
                placement: placement.get(m, k),
            })
            .collect();
        Self {
            tiers,
            gain: PathGain::from_alpha(model.path_loss_exponent()),
            r2_max: radius_km * radius_km,
        }
    }

    /// One Bernoulli sample of the conditional hit event, streaming over the
    /// realization without storing it.
    fn realize<R: Rng>(&self, rng: &mut R) -> bool {
        let mut total_faded = 0.0;
        let mut best_gain = 0.0;
        let mut best_faded = 0.0;
        let mut best_beta = f64::INFINITY;
        let mut found = false;
        for tier in &self.tiers {
            let n = tier.count.sample(rng) as u64;
            for _ in 0..n {
                // Area-uniform position: squared distance uniform in (0, R^2].
                let d2 = self.r2_max * (1.0 - rng.random::<f64>());
                let gain = tier.power * self.gain.eval(d2);
                let fading: f64 = rng.sample(Exp1);
                let faded = gain * fading;
                total_faded += faded;
                if tier.placement > 0.0
                    && rng.random::<f64>() < tier.placement
                    && gain > best_gain
                {
                    best_gain = gain;
                    best_faded = faded;
                    best_beta = tier.beta;
                    found = true;
                }
            }
        }
        // Empty marked set: miss. Otherwise SIR >= beta, written without the
        // division so a realization with no interferers counts as a hit.
        found && best_faded >= best_beta * (total_faded - best_faded)
    }

    /// Samples one realization at the largest radius and evaluates the hit
    /// indicator at every truncation radius in `r2` (squared, ascending not
    /// required). Buffer is reused across trials.
    fn realize_nested<R: Rng>(
        &self,
        rng: &mut R,
        r2: &[f64],
        stations: &mut Vec<(f64, f64, f64, f64)>, // (d2, gain, faded, beta) of marked/all
        marked: &mut Vec<bool>,
        hits: &mut [bool],
    ) {
        stations.clear();
        marked.clear();
        for tier in &self.tiers {
            let n = tier.count.sample(rng) as u64;
            for _ in 0..n {
                let d2 = self.r2_max * (1.0 - rng.random::<f64>());
                let gain = tier.power * self.gain.eval(d2);
                let fading: f64 = rng.sample(Exp1);
                let is_marked = tier.placement > 0.0 && rng.random::<f64>() < tier.placement;
                stations.push((d2, gain, gain * fading, tier.beta));
                marked.push(is_marked);
            }
        }
        for (j, &r2j) in r2.iter().enumerate() {
            let mut total_faded = 0.0;
            let mut best_gain = 0.0;
            let mut best_faded = 0.0;
            let mut best_beta = f64::INFINITY;
            let mut found = false;
            for (s, &is_marked) in stations.iter().zip(marked.iter()) {
                if s.0 > r2j {
                    continue;
                }
                total_faded += s.2;
                if is_marked && s.1 > best_gain {
                    best_gain = s.1;
                    best_faded = s.2;
                    best_beta = s.3;
                    found = true;
                }
            }
            hits[j] = found && best_faded >= best_beta * (total_faded - best_faded);
        }
    }
}

fn trial_rng(seed: u64, salt: u64, file: u64, trial: u64) -> ChaCha12Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&salt.to_le_bytes());
    key[16..24].copy_from_slice(&file.to_le_bytes());
    let mut rng = ChaCha12Rng::from_seed(key);
    rng.set_stream(trial);
    rng
}

/// One Bernoulli sample of the conditional hit event for file `m`, drawn from
/// the given trial stream.
pub fn sample_realization<R: Rng>(
    model: &NetworkModel,
    placement: &PlacementMatrix,
    m: usize,
    cfg: &SimConfig,
    trial_rng: &mut R,
) -> bool {
    Realizer::new(model, placement, m, cfg.region_radius_km).realize(trial_rng)
}

/// Monte Carlo estimate of the conditional hit probability of file `m`.
///
/// Reproducible bit-exactly for a fixed seed, independent of thread count.
pub fn simulate_conditional_hit(
    model: &NetworkModel,
    placement: &PlacementMatrix,
    m: usize,
    cfg: &SimConfig,
) -> SimEstimate {
    let realizer = Realizer::new(model, placement, m, cfg.region_radius_km);
    let hits: u64 = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(cfg.seed, SALT_CONDITIONAL, m as u64, t);
            realizer.realize(&mut rng) as u64
        })
        .sum();
    SimEstimate::from_bernoulli(hits, cfg.trials)
}

/// Conditional-hit estimates at several truncation radii evaluated on one
/// shared sample set (drawn at the largest radius), exposing the truncation
/// residual without fresh sampling noise between radii.
pub fn simulate_conditional_hit_at_radii(
    model: &NetworkModel,
    placement: &PlacementMatrix,
    m: usize,
    cfg: &SimConfig,
    radii_km: &[f64],
) -> Vec<SimEstimate> {
    assert!(!radii_km.is_empty(), "need at least one radius");
    let r_max = radii_km.iter().cloned().fold(0.0, f64::max);
    let realizer = Realizer::new(model, placement, m, r_max);
    let r2: Vec<f64> = radii_km.iter().map(|r| r * r).collect();
    let counts = (0..cfg.trials)
        .into_par_iter()
        .fold(
            || (vec![0u64; r2.len()], Vec::new(), Vec::new(), Vec::new()),
            |(mut acc, mut stations, mut marked, mut hits), t| {
                hits.resize(r2.len(), false);
                let mut rng = trial_rng(cfg.seed, SALT_CONDITIONAL, m as u64, t);
                realizer.realize_nested(&mut rng, &r2, &mut stations, &mut marked, &mut hits);
                for (a, &h) in acc.iter_mut().zip(hits.iter()) {
                    *a += h as u64;
                }
                (acc, stations, marked, hits)
            },
        )
        .map(|(acc, _, _, _)| acc)
        .reduce(
            || vec![0u64; r2.len()],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    counts
        .into_iter()
        .map(|hits| SimEstimate::from_bernoulli(hits, cfg.trials))
        .collect()
}

/// Stratified estimate of the total hit probability: per-file conditional
/// estimates combined with the popularity weights. This is the default mode;
/// it removes the file-sampling variance of [`simulate_hit_direct`].
///
/// `trials` in the result is the per-stratum trial count; the standard error
/// combines the strata as `√(Σ q_m² σ_m²)`.
pub fn simulate_hit(
    model: &NetworkModel,
    placement: &PlacementMatrix,
    popularity: &PopularityProfile,
    cfg: &SimConfig,
) -> SimEstimate {
    assert_eq!(
        popularity.len(),
        placement.num_files(),
        "popularity length mismatch"
    );
    let mut mean = 0.0;
    let mut variance = 0.0;
    for (m, &q) in popularity.weights().iter().enumerate() {
        if q == 0.0 {
            continue;
        }
        let est = simulate_conditional_hit(model, placement, m, cfg);
        mean += q * est.mean;
        variance += q * q * est.stderr * est.stderr;
    }
    SimEstimate::from_moments(mean, variance.sqrt(), cfg.trials)
}

/// Direct estimate of the total hit probability: each trial first draws the
/// requested file from the popularity distribution, then samples one
/// realization for it.
pub fn simulate_hit_direct(
    model: &NetworkModel,
    placement: &PlacementMatrix,
    popularity: &PopularityProfile,
    cfg: &SimConfig,
) -> SimEstimate {
    assert_eq!(
        popularity.len(),
        placement.num_files(),
        "popularity length mismatch"
    );
    let realizers: Vec<Realizer> = (0..placement.num_files())
        .map(|m| Realizer::new(model, placement, m, cfg.region_radius_km))
        .collect();
    let cdf: Vec<f64> = popularity
        .weights()
        .iter()
        .scan(0.0, |acc, &q| {
            *acc += q;
            Some(*acc)
        })
        .collect();
    let hits: u64 = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(cfg.seed, SALT_DIRECT, 0, t);
            let u = rng.random::<f64>();
            let m = cdf.partition_point(|&c| c < u).min(cdf.len() - 1);
            realizers[m].realize(&mut rng) as u64
        })
        .sum();
    SimEstimate::from_bernoulli(hits, cfg.trials)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TierParams;

    fn single_tier(beta: f64, alpha: f64, p: f64) -> (NetworkModel, PlacementMatrix) {
        let model =
            NetworkModel::new(alpha, vec![TierParams::new(1.0, 1.0, beta, 1.0).unwrap()]).unwrap();
        let placement = PlacementMatrix::from_rows(vec![vec![p]], &model).unwrap();
        (model, placement)
    }

    #[test]
    fn zero_placement_never_hits() {
        let (model, placement) = single_tier(1.0, 4.0, 0.0);
        let cfg = SimConfig::new(10.0, 50, 1).unwrap();
        let est = simulate_conditional_hit(&model, &placement, 0, &cfg);
        assert_eq!(est.mean, 0.0);
    }

    #[test]
    fn tiny_threshold_hits_almost_surely() {
        let (model, placement) = single_tier(1e-9, 4.0, 1.0);
        let cfg = SimConfig::new(10.0, 400, 2).unwrap();
        let est = simulate_conditional_hit(&model, &placement, 0, &cfg);
        assert!(est.mean > 0.95, "mean = {}", est.mean);
    }

    #[test]
    fn single_trial_is_binary() {
        let (model, placement) = single_tier(1.0, 4.0, 1.0);
        let cfg = SimConfig::new(10.0, 1, 3).unwrap();
        let est = simulate_conditional_hit(&model, &placement, 0, &cfg);
        assert!(est.mean == 0.0 || est.mean == 1.0);
        assert_eq!(est.stderr, 0.0);
    }

    #[test]
    fn deterministic_across_runs() {
        let (model, placement) = single_tier(1.0, 4.0, 0.7);
        let cfg = SimConfig::new(12.0, 500, 42).unwrap();
        let a = simulate_conditional_hit(&model, &placement, 0, &cfg);
        let b = simulate_conditional_hit(&model, &placement, 0, &cfg);
        assert_eq!(a, b);
    }

    #[test]
    fn nested_single_radius_matches_streaming() {
        let (model, placement) = single_tier(1.0, 4.0, 0.8);
        let cfg = SimConfig::new(11.0, 300, 5).unwrap();
        let plain = simulate_conditional_hit(&model, &placement, 0, &cfg);
        let nested = simulate_conditional_hit_at_radii(&model, &placement, 0, &cfg, &[11.0]);
        assert_eq!(plain, nested[0]);
    }

    #[test]
    fn stderr_scaling_with_trials() {
        let (model, placement) = single_tier(1.0, 4.0, 1.0);
        let base = SimConfig::new(10.0, 2_000, 7).unwrap();
        let double = SimConfig::new(10.0, 4_000, 7).unwrap();
        let a = simulate_conditional_hit(&model, &placement, 0, &base);
        let b = simulate_conditional_hit(&model, &placement, 0, &double);
        let ratio = a.stderr / b.stderr;
        assert!((ratio - std::f64::consts::SQRT_2).abs() < 0.15, "ratio = {ratio}");
    }

    #[test]
    fn single_file_total_equals_conditional() {
        let (model, placement) = single_tier(1.0, 4.0, 1.0);
        let q = PopularityProfile::new(vec![1.0]).unwrap();
        let cfg = SimConfig::new(10.0, 500, 9).unwrap();
        let total = simulate_hit(&model, &placement, &q, &cfg);
        let cond = simulate_conditional_hit(&model, &placement, 0, &cfg);
        assert_eq!(total.mean, cond.mean);
    }

    #[test]
    fn stratified_and_direct_agree() {
        let model = NetworkModel::new(
            4.0,
            vec![TierParams::new(1.0, 1.0, 0.5, 2.0).unwrap()],
        )
        .unwrap();
        let placement =
            PlacementMatrix::from_rows(vec![vec![1.0], vec![0.5], vec![0.2]], &model).unwrap();
        let q = PopularityProfile::new(vec![0.5, 0.3, 0.2]).unwrap();
        let cfg = SimConfig::new(12.0, 4_000, 11).unwrap();
        let strat = simulate_hit(&model, &placement, &q, &cfg);
        let direct = simulate_hit_direct(&model, &placement, &q, &cfg);
        let spread = (strat.stderr.powi(2) + direct.stderr.powi(2)).sqrt();
        assert!(
            (strat.mean - direct.mean).abs() < 3.5 * spread,
            "stratified {} vs direct {} (spread {spread})",
            strat.mean,
            direct.mean
        );
    }

    #[test]
    fn config_validation() {
        assert!(SimConfig::new(0.0, 10, 0).is_err());
        assert!(SimConfig::new(10.0, 0, 0).is_err());
        let model = NetworkModel::new(
            3.0,
            vec![TierParams::new(0.01, 1.0, 1.0, 1.0).unwrap()],
        )
        .unwrap();
        let cfg = SimConfig::new(5.0, 10, 0).unwrap();
        assert!(cfg.region_warning(&model).is_some());
        let radius = SimConfig::suggested_region_radius(&model, 500.0);
        let big = SimConfig::new(radius, 10, 0).unwrap();
        assert!(big.region_warning(&model).is_none());
    }
}
