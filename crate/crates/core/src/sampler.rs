//! Monte Carlo estimation of Φ(p, G) and p_c(G) over coupled random
//! initial sets.
//!
//! Every trial owns uniforms `U_v ∈ [0, 1)` derived from
//! `(base_seed, trial, vertex encoding)` and infects `A_p = {v : U_v < p}`,
//! so the sets are nested in `p` and each trial has a single critical point.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::statistics::{Data, Median, OrderStatistics};

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::families::GraphFamily;
use crate::graph::Graph;
use crate::process::{percolates_with, InfectionState, ProcessSpec};

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-trial source of vertex uniforms.
#[derive(Clone, Debug)]
pub struct TrialRandomness {
    key: u64,
    explicit: Option<Arc<[f64]>>,
}

impl TrialRandomness {
    pub fn new(base_seed: u64, trial: u64) -> Self {
        let key = mix64(mix64(base_seed ^ GOLDEN) ^ trial.wrapping_mul(GOLDEN).wrapping_add(1));
        Self {
            key,
            explicit: None,
        }
    }

    /// Fixed uniforms indexed by dense vertex index.
    pub fn from_uniforms(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|u| !(0.0..=1.0).contains(u)) {
            return Err(Error::InvalidArgument("uniforms must lie in [0, 1]".into()));
        }
        Ok(Self {
            key: 0,
            explicit: Some(values.into()),
        })
    }

    /// `U_v` for the vertex at dense index `i`.
    #[inline]
    pub fn uniform(&self, graph: &GraphFamily, i: usize) -> f64 {
        match &self.explicit {
            Some(values) => values[i],
            None => {
                let h =
                    mix64(mix64(self.key ^ graph.vertex_at(i).0.wrapping_mul(GOLDEN)) ^ self.key);
                (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
            }
        }
    }

    /// All uniforms in dense index order.
    pub fn uniforms(&self, graph: &GraphFamily) -> Result<Vec<f64>> {
        let n = graph.order() as usize;
        if let Some(values) = &self.explicit {
            if values.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "{} uniforms supplied for a graph of order {n}",
                    values.len()
                )));
            }
            return Ok(values.to_vec());
        }
        Ok((0..n).map(|i| self.uniform(graph, i)).collect())
    }
}

/// `A_p = {v : U_v < p}`; `p ≥ 1` gives the whole vertex set.
pub fn sample_infected(graph: &GraphFamily, p: f64, rnd: &TrialRandomness) -> BitSet {
    let n = graph.order() as usize;
    if p >= 1.0 {
        return BitSet::full(n);
    }
    BitSet::from_indices(n, (0..n).filter(|&i| rnd.uniform(graph, i) < p))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhiEstimate {
    pub p: f64,
    pub trials: u64,
    pub successes: u64,
    pub phi_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub confidence: f64,
}

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64, confidence: f64) -> Result<(f64, f64)> {
    if trials == 0 || successes > trials {
        return Err(Error::InvalidArgument(
            "need 0 <= successes <= trials, trials >= 1".into(),
        ));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::InvalidArgument(
            "confidence must lie in (0, 1)".into(),
        ));
    }
    let z = Normal::standard().inverse_cdf(0.5 + confidence / 2.0);
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = z / denom * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    let low = (center - half).clamp(0.0, 1.0).min(phat);
    let high = (center + half).clamp(0.0, 1.0).max(phat);
    Ok((low, high))
}

impl PhiEstimate {
    pub fn from_counts(p: f64, successes: u64, trials: u64, confidence: f64) -> Result<Self> {
        let (ci_low, ci_high) = wilson_interval(successes, trials, confidence)?;
        Ok(Self {
            p,
            trials,
            successes,
            phi_hat: successes as f64 / trials as f64,
            ci_low,
            ci_high,
            confidence,
        })
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "p must lie in [0, 1], got {p}"
        )));
    }
    Ok(())
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    Ok(())
}

/// Does the trial's `A_p` percolate?
pub fn trial_percolates(
    graph: &GraphFamily,
    spec: &ProcessSpec,
    p: f64,
    rnd: &TrialRandomness,
) -> Result<bool> {
    spec.validate()?;
    let mut state = InfectionState::empty(graph, false);
    percolates_with(graph, spec, &mut state, &sample_infected(graph, p, rnd))
}

/// Fraction of `trials` independent `A_p` that percolate, with a 95% Wilson
/// interval.
pub fn estimate_phi(
    graph: &GraphFamily,
    spec: &ProcessSpec,
    p: f64,
    trials: u64,
    base_seed: u64,
) -> Result<PhiEstimate> {
    check_p(p)?;
    check_trials(trials)?;
    spec.validate()?;
    let outcomes = (0..trials)
        .into_par_iter()
        .map_init(
            || InfectionState::empty(graph, false),
            |state, t| {
                let a0 = sample_infected(graph, p, &TrialRandomness::new(base_seed, t));
                percolates_with(graph, spec, state, &a0)
            },
        )
        .collect::<Result<Vec<bool>>>()?;
    let successes = outcomes.iter().filter(|&&b| b).count() as u64;
    PhiEstimate::from_counts(p, successes, trials, 0.95)
}

/// Critical point of one coupled trial.
///
/// `seeds_needed` is the least `k` such that the `k` vertices with the
/// smallest uniforms percolate; `p_star` is the `k`-th smallest uniform
/// (0 when `k = 0`). The trial's `A_p` percolates iff `p ≥ 1`, `k = 0`, or
/// `p > p_star`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub p_star: f64,
    pub seeds_needed: u64,
}

impl CriticalPoint {
    pub fn percolates_at(&self, p: f64) -> bool {
        p >= 1.0 || self.seeds_needed == 0 || p > self.p_star
    }
}

fn critical_point_with(
    graph: &GraphFamily,
    spec: &ProcessSpec,
    state: &mut InfectionState,
    rnd: &TrialRandomness,
) -> Result<CriticalPoint> {
    let n = graph.order() as usize;
    let u = rnd.uniforms(graph)?;
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_unstable_by(|&a, &b| u[a as usize].total_cmp(&u[b as usize]).then(a.cmp(&b)));
    let prefix = |k: usize| BitSet::from_indices(n, order[..k].iter().map(|&i| i as usize));
    if percolates_with(graph, spec, state, &prefix(0))? {
        return Ok(CriticalPoint {
            p_star: 0.0,
            seeds_needed: 0,
        });
    }
    // invariant: prefix(lo) does not percolate, prefix(hi) does. Probes
    // split at a quarter since percolating runs cost several times more.
    let (mut lo, mut hi) = (0usize, n);
    while hi - lo > 1 {
        let mid = lo + ((hi - lo) / 4).max(1);
        if percolates_with(graph, spec, state, &prefix(mid))? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(CriticalPoint {
        p_star: u[order[hi - 1] as usize],
        seeds_needed: hi as u64,
    })
}

/// Infimum of the `p` at which the trial percolates, exact over the trial's
/// uniforms.
pub fn trial_critical_point(
    graph: &GraphFamily,
    spec: &ProcessSpec,
    rnd: &TrialRandomness,
) -> Result<CriticalPoint> {
    spec.validate()?;
    let mut state = InfectionState::empty(graph, false);
    critical_point_with(graph, spec, &mut state, rnd)
}

pub fn trial_critical_p(
    graph: &GraphFamily,
    spec: &ProcessSpec,
    rnd: &TrialRandomness,
) -> Result<f64> {
    trial_critical_point(graph, spec, rnd).map(|c| c.p_star)
}

/// Critical points of trials `0..trials`, in trial order.
pub fn critical_points(
    graph: &GraphFamily,
    spec: &ProcessSpec,
    trials: u64,
    base_seed: u64,
) -> Result<Vec<CriticalPoint>> {
    check_trials(trials)?;
    spec.validate()?;
    (0..trials)
        .into_par_iter()
        .map_init(
            || InfectionState::empty(graph, false),
            |state, t| critical_point_with(graph, spec, state, &TrialRandomness::new(base_seed, t)),
        )
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PcEstimate {
    pub trials: u64,
    pub base_seed: u64,
    pub median: f64,
    pub q05: f64,
    pub q25: f64,
    pub q75: f64,
    pub q95: f64,
    /// Critical points are exact order statistics of the trial uniforms.
    pub tolerance: f64,
    pub p_stars: Vec<f64>,
}

impl PcEstimate {
    pub fn from_points(points: &[CriticalPoint], base_seed: u64) -> Result<Self> {
        check_trials(points.len() as u64)?;
        let p_stars: Vec<f64> = points.iter().map(|c| c.p_star).collect();
        let mut data = Data::new(p_stars.clone());
        Ok(Self {
            trials: points.len() as u64,
            base_seed,
            median: data.median(),
            q05: data.quantile(0.05),
            q25: data.quantile(0.25),
            q75: data.quantile(0.75),
            q95: data.quantile(0.95),
            tolerance: 0.0,
            p_stars,
        })
    }
}

/// Median and quantiles of the per-trial critical points.
pub fn estimate_pc(
    graph: &GraphFamily,
    spec: &ProcessSpec,
    trials: u64,
    base_seed: u64,
) -> Result<PcEstimate> {
    let points = critical_points(graph, spec, trials, base_seed)?;
    PcEstimate::from_points(&points, base_seed)
}

/// Φ estimates on a grid of `p` values from shared critical points, so the
/// `phi_hat` column is non-decreasing in `p`.
pub fn scan_phi(
    points: &[CriticalPoint],
    grid: &[f64],
    confidence: f64,
) -> Result<Vec<PhiEstimate>> {
    check_trials(points.len() as u64)?;
    grid.iter()
        .map(|&p| {
            check_p(p)?;
            let successes = points.iter().filter(|c| c.percolates_at(p)).count() as u64;
            PhiEstimate::from_counts(p, successes, points.len() as u64, confidence)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::FamilySpec;
    use crate::process::Variant;

    fn cube(n: u32) -> GraphFamily {
        GraphFamily::new(FamilySpec::Hypercube { n }).unwrap()
    }

    #[test]
    fn uniforms_are_reproducible_and_in_range() {
        let g = cube(6);
        let a = TrialRandomness::new(5, 3).uniforms(&g).unwrap();
        let b = TrialRandomness::new(5, 3).uniforms(&g).unwrap();
        let c = TrialRandomness::new(5, 4).uniforms(&g).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.iter().all(|u| (0.0..1.0).contains(u)));
    }

    #[test]
    fn extreme_p() {
        let g = cube(5);
        let rnd = TrialRandomness::new(1, 0);
        assert!(sample_infected(&g, 0.0, &rnd).is_empty());
        assert!(sample_infected(&g, 1.0, &rnd).is_full());
    }

    #[test]
    fn sample_size_is_binomial() {
        let g = cube(10);
        let trials = 10_000u64;
        let total: usize = (0..trials)
            .map(|t| sample_infected(&g, 0.5, &TrialRandomness::new(42, t)).count())
            .sum();
        let mean = total as f64 / trials as f64;
        // sd of the mean: √(1024·¼ / 10⁴) = 0.16
        assert!((mean - 512.0).abs() < 3.0 * 0.16, "mean {mean}");
    }

    #[test]
    fn edge_critical_point() {
        let g = cube(1);
        let spec = ProcessSpec::majority(0);
        let rnd = TrialRandomness::from_uniforms(vec![0.3, 0.7]).unwrap();
        assert_eq!(trial_critical_p(&g, &spec, &rnd).unwrap(), 0.3);
        let zeros = TrialRandomness::from_uniforms(vec![0.0, 0.0]).unwrap();
        assert_eq!(trial_critical_p(&g, &spec, &zeros).unwrap(), 0.0);
        let ones = TrialRandomness::from_uniforms(vec![1.0, 1.0]).unwrap();
        assert_eq!(trial_critical_p(&g, &spec, &ones).unwrap(), 1.0);
        assert!(TrialRandomness::from_uniforms(vec![0.5; 3])
            .unwrap()
            .uniforms(&g)
            .is_err());
    }

    #[test]
    fn rneighbour_zero_has_zero_critical_point() {
        let g = cube(4);
        let est = estimate_pc(&g, &ProcessSpec::rneighbour(0), 20, 9).unwrap();
        assert!(est.p_stars.iter().all(|&p| p == 0.0));
        assert_eq!(est.median, 0.0);
    }

    #[test]
    fn full_p_always_percolates() {
        let g = cube(6);
        let est = estimate_phi(&g, &ProcessSpec::majority(3), 1.0, 10, 0).unwrap();
        assert_eq!(est.phi_hat, 1.0);
    }

    #[test]
    fn wilson_bounds() {
        let (lo, hi) = wilson_interval(0, 10, 0.95).unwrap();
        assert_eq!(lo, 0.0);
        assert!(hi > 0.2 && hi < 0.35);
        let (lo, hi) = wilson_interval(50, 100, 0.95).unwrap();
        assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3);
        assert!(wilson_interval(3, 2, 0.95).is_err());
    }

    #[test]
    fn critical_point_matches_direct_runs() {
        let g = cube(5);
        let spec = ProcessSpec::new(Variant::Boot {
            k: 2,
            gamma_scale: 0.3,
        });
        for t in 0..30 {
            let rnd = TrialRandomness::new(11, t);
            let c = trial_critical_point(&g, &spec, &rnd).unwrap();
            for p in [0.05, 0.15, 0.25, 0.35, 0.5, 0.7] {
                assert_eq!(
                    c.percolates_at(p),
                    trial_percolates(&g, &spec, p, &rnd).unwrap()
                );
            }
        }
    }

    #[test]
    fn scan_is_monotone() {
        let g = cube(6);
        let points = critical_points(&g, &ProcessSpec::majority(0), 50, 3).unwrap();
        let grid: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
        let rows = scan_phi(&points, &grid, 0.95).unwrap();
        assert!(rows.windows(2).all(|w| w[0].phi_hat <= w[1].phi_hat));
        assert_eq!(rows.last().unwrap().phi_hat, 1.0);
    }
}
