//! Monte Carlo estimate of `Pr[λ(G) ≥ δ]` over the ensemble.
//!
//! Instance `i` draws from a ChaCha8 stream keyed on `master_seed` with
//! stream id `i`, so the curve does not depend on how instances are spread
//! over worker threads.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::bound::BoundCurve;
use crate::ensemble::{EnsembleParams, EnsembleSampler};
use crate::error::{Error, Result};
use crate::mincut::global_min_cut;

pub const DEFAULT_CONFIDENCE: f64 = 0.95;

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationConfig {
    pub params: EnsembleParams,
    pub instances: u64,
    pub master_seed: u64,
    /// Caps the reported range; `None` stops at the first `δ` with `p̂ = 0`.
    pub delta_max: Option<u64>,
    pub workers: usize,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.instances == 0 {
            return Err(Error::InvalidConfig("instances must be at least 1".into()));
        }
        if self.delta_max == Some(0) {
            return Err(Error::InvalidConfig("delta-max must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::InvalidConfig("workers must be at least 1".into()));
        }
        Ok(())
    }
}

/// RNG for instance `index` of a run.
pub fn instance_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalPoint {
    pub delta: u64,
    /// Instances with `λ ≥ δ`.
    pub successes: u64,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalCurve {
    pub params: EnsembleParams,
    pub instances: u64,
    pub master_seed: u64,
    pub confidence: f64,
    /// `λ ↦ number of instances`.
    pub histogram: BTreeMap<u64, u64>,
    pub points: Vec<EmpiricalPoint>,
}

impl EmpiricalCurve {
    /// Builds the curve for `δ = 0..=end` from a histogram of `λ`. `end`
    /// defaults to the first `δ` with no instance at or above it.
    pub fn from_histogram(
        params: EnsembleParams,
        master_seed: u64,
        histogram: BTreeMap<u64, u64>,
        delta_max: Option<u64>,
        confidence: f64,
    ) -> Self {
        let instances: u64 = histogram.values().sum();
        let support_end = histogram.keys().next_back().map_or(0, |&m| m + 1);
        let end = delta_max.map_or(support_end, |d| d.min(support_end));
        let points = (0..=end)
            .map(|delta| point_at(&histogram, instances, delta, confidence))
            .collect();
        Self {
            params,
            instances,
            master_seed,
            confidence,
            histogram,
            points,
        }
    }

    /// Estimate at any `δ`, including beyond the stored range.
    pub fn at(&self, delta: u64) -> EmpiricalPoint {
        match self.points.get(delta as usize) {
            Some(p) => p.clone(),
            None => point_at(&self.histogram, self.instances, delta, self.confidence),
        }
    }
}

fn point_at(
    histogram: &BTreeMap<u64, u64>,
    instances: u64,
    delta: u64,
    confidence: f64,
) -> EmpiricalPoint {
    let successes: u64 = histogram.range(delta..).map(|(_, c)| c).sum();
    let (ci_low, ci_high) = wilson_interval(successes, instances, confidence);
    EmpiricalPoint {
        delta,
        successes,
        estimate: successes as f64 / instances as f64,
        ci_low,
        ci_high,
    }
}

/// Samples `instances` graphs and tabulates `λ` of each.
pub fn run_simulation(config: &SimulationConfig) -> Result<EmpiricalCurve> {
    config.validate()?;
    let sampler = EnsembleSampler::new(&config.params);
    let solve = |i: u64| {
        let g = sampler.sample(&mut instance_rng(config.master_seed, i));
        global_min_cut(&g).value
    };
    let lambdas: Vec<u64> = if config.workers == 1 {
        (0..config.instances).map(solve).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
        pool.install(|| (0..config.instances).into_par_iter().map(solve).collect())
    };
    let mut histogram = BTreeMap::new();
    for lambda in lambdas {
        *histogram.entry(lambda).or_insert(0) += 1;
    }
    Ok(EmpiricalCurve::from_histogram(
        config.params.clone(),
        config.master_seed,
        histogram,
        config.delta_max,
        DEFAULT_CONFIDENCE,
    ))
}

/// Wilson score interval for a binomial proportion.
///
/// # Panics
///
/// If `trials == 0`, `successes > trials`, or `confidence ∉ (0, 1)`.
pub fn wilson_interval(successes: u64, trials: u64, confidence: f64) -> (f64, f64) {
    assert!(
        trials > 0 && successes <= trials,
        "need 0 <= successes <= trials, trials >= 1"
    );
    assert!(
        confidence > 0.0 && confidence < 1.0,
        "confidence must lie in (0, 1)"
    );
    let z = Normal::standard().inverse_cdf(0.5 + confidence / 2.0);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    let low = if successes == 0 {
        0.0
    } else {
        (centre - half).max(0.0)
    };
    let high = if successes == trials {
        1.0
    } else {
        (centre + half).min(1.0)
    };
    (low, high)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonRow {
    pub delta: u64,
    pub clamped_bound: f64,
    pub empirical: f64,
    pub ci_high: f64,
    pub gap: f64,
    /// Bound above the upper confidence limit.
    pub violation: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
    pub window: (u64, u64),
    /// `(δ, gap)` with the largest gap inside the window.
    pub max_gap: Option<(u64, f64)>,
}

impl ComparisonReport {
    pub fn any_violation(&self) -> bool {
        self.rows.iter().any(|r| r.violation)
    }
}

/// Slack for comparing a 15-digit bound against a float interval end.
const VIOLATION_TOLERANCE: f64 = 1e-12;

/// Gap `p̂(δ) − max(0, raw(δ))` over the bound's `δ` range.
pub fn compare_curves(
    bound: &BoundCurve,
    emp: &EmpiricalCurve,
    window: (u64, u64),
) -> Result<ComparisonReport> {
    if bound.params != emp.params {
        return Err(Error::Mismatch(format!(
            "bound is for k = {}, n = {}, mu = {} but the simulation used k = {}, n = {}, mu = {}",
            bound.params.k,
            bound.params.n,
            bound.params.pmf,
            emp.params.k,
            emp.params.n,
            emp.params.pmf
        )));
    }
    let rows: Vec<ComparisonRow> = bound
        .points
        .iter()
        .map(|b| {
            let e = emp.at(b.delta);
            let clamped = b.clamped();
            ComparisonRow {
                delta: b.delta,
                clamped_bound: clamped,
                empirical: e.estimate,
                ci_high: e.ci_high,
                gap: e.estimate - clamped,
                violation: clamped > e.ci_high + VIOLATION_TOLERANCE,
            }
        })
        .collect();
    Ok(report(rows, window))
}

pub fn report(rows: Vec<ComparisonRow>, window: (u64, u64)) -> ComparisonReport {
    let max_gap = rows
        .iter()
        .filter(|r| (window.0..=window.1).contains(&r.delta))
        .map(|r| (r.delta, r.gap))
        .fold(None, |best: Option<(u64, f64)>, cur| match best {
            Some(b) if b.1 >= cur.1 => Some(b),
            _ => Some(cur),
        });
    ComparisonReport {
        rows,
        window,
        max_gap,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bound::tail_lower_bound;
    use crate::ensemble::WeightPmf;

    fn params(k: usize, n: usize, pmf: &str) -> EnsembleParams {
        EnsembleParams::new(k, n, WeightPmf::parse(pmf).unwrap()).unwrap()
    }

    fn config(p: EnsembleParams, instances: u64, workers: usize) -> SimulationConfig {
        SimulationConfig {
            params: p,
            instances,
            master_seed: 11,
            delta_max: None,
            workers,
        }
    }

    #[test]
    fn triangle_ensemble() {
        let curve = run_simulation(&config(params(3, 3, "1"), 100, 1)).unwrap();
        assert_eq!(curve.at(2).estimate, 1.0);
        assert_eq!(curve.at(3).estimate, 0.0);
        assert_eq!(curve.points.len(), 4);
    }

    #[test]
    fn single_edge_ensemble() {
        let curve = run_simulation(&config(params(2, 1, "1"), 10, 1)).unwrap();
        assert_eq!(curve.histogram, BTreeMap::from([(1, 10)]));
        assert_eq!(
            curve.points.iter().map(|p| p.estimate).collect::<Vec<_>>(),
            vec![1.0, 1.0, 0.0]
        );
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let p = params(12, 20, "0.1,0.2,0.4,0.2,0.1");
        let one = run_simulation(&config(p.clone(), 500, 1)).unwrap();
        let eight = run_simulation(&config(p, 500, 8)).unwrap();
        assert_eq!(one, eight);
    }

    #[test]
    fn delta_max_caps_the_range() {
        let mut c = config(params(6, 12, "1/2,1/2"), 200, 1);
        c.delta_max = Some(2);
        let curve = run_simulation(&c).unwrap();
        assert_eq!(curve.points.len(), 3);
        assert!(curve.at(50).estimate == 0.0);
    }

    #[test]
    fn curve_invariants() {
        let curve = run_simulation(&config(params(10, 18, "0.2,0.3,0.5"), 2000, 2)).unwrap();
        assert_eq!(curve.points[0].estimate, 1.0);
        for pair in curve.points.windows(2) {
            assert!(pair[1].estimate <= pair[0].estimate);
        }
        for p in &curve.points {
            assert!(0.0 <= p.ci_low && p.ci_low <= p.estimate);
            assert!(p.estimate <= p.ci_high && p.ci_high <= 1.0);
        }
        assert_eq!(curve.points.last().unwrap().estimate, 0.0);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(run_simulation(&config(params(3, 2, "1"), 0, 1)).is_err());
        assert!(run_simulation(&config(params(3, 2, "1"), 5, 0)).is_err());
    }

    #[test]
    fn wilson_examples() {
        assert_eq!(wilson_interval(0, 100, 0.95).0, 0.0);
        assert_eq!(wilson_interval(100, 100, 0.95).1, 1.0);
        let (lo, hi) = wilson_interval(50, 100, 0.95);
        assert!(((lo + hi) / 2.0 - 0.5).abs() < 1e-12);
        assert!((hi - lo - 0.1923).abs() < 1e-4);
        // statsmodels proportion_confint(method="wilson")
        assert!((lo - 0.403_831_530_365_995_6).abs() < 1e-12, "{lo}");
        assert!((hi - 0.596_168_469_634_004_4).abs() < 1e-12, "{hi}");
        let (lo, hi) = wilson_interval(3, 10, 0.9);
        assert!((lo - 0.126_876_583_903_197_84).abs() < 1e-12, "{lo}");
        assert!((hi - 0.558_300_204_130_165).abs() < 1e-12, "{hi}");
    }

    #[test]
    fn comparison_on_the_triangle() {
        let p = params(3, 3, "1");
        let bound = tail_lower_bound(&p, 3);
        let emp = run_simulation(&config(p, 100, 1)).unwrap();
        let rep = compare_curves(&bound, &emp, (1, 3)).unwrap();
        assert!(!rep.any_violation());
        assert_eq!(rep.rows[2].gap, 0.0);
        assert_eq!(rep.rows[3].gap, 0.0);
        assert_eq!(rep.max_gap, Some((1, 0.0)));
    }

    #[test]
    fn mismatched_params_are_rejected() {
        let bound = tail_lower_bound(&params(3, 3, "1"), 3);
        let emp = run_simulation(&config(params(3, 2, "1"), 10, 1)).unwrap();
        assert!(matches!(
            compare_curves(&bound, &emp, (0, 3)),
            Err(Error::Mismatch(_))
        ));
    }
}
