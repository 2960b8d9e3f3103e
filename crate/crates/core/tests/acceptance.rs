//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Runs under `cargo test` (harness = false).

use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mcbound::bound::{
    expected_a, tail_lower_bound, tail_lower_bound_auto, tail_lower_bound_logdomain, BoundCurve,
};
use mcbound::cli;
use mcbound::cutspace::lemma1_check;
use mcbound::ensemble::{EnsembleParams, EnsembleSampler, WeightPmf, DEFAULT_ENUMERATION_GUARD};
use mcbound::mincut::{global_min_cut, global_min_cut_via_maxflow, min_cut_by_enumeration};
use mcbound::montecarlo::{
    compare_curves, run_simulation, ComparisonReport, EmpiricalCurve, SimulationConfig,
};
use mcbound::oracle::ensemble_summary;

const FIGURE_PMF: &str = "0.1,0.2,0.4,0.2,0.1";
const FIGURE_INSTANCES: u64 = 10_000;
const FIGURE_SEED: u64 = 1;
/// Largest allowed `p̂(1) − max(0, raw(1))`.
const DELTA1_GAP: f64 = 0.05;
const NUMERIC_REL_TOL: f64 = 1e-9;
const NUMERIC_FLOOR: f64 = 1e-12;

struct Outcome {
    passed: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome {
        passed: true,
        detail: detail.into(),
    }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome {
        passed: false,
        detail: detail.into(),
    }
}

fn oracle_grid() -> Vec<EnsembleParams> {
    let mut grid = Vec::new();
    for k in 3..=5usize {
        for n in 1..=k * (k - 1) / 2 {
            for pmf in ["1", "1/2,1/2"] {
                grid.push(EnsembleParams::new(k, n, WeightPmf::parse(pmf).unwrap()).unwrap());
            }
        }
    }
    grid
}

fn within(limit: Duration, elapsed: Duration, outcome: Outcome) -> Outcome {
    if outcome.passed && elapsed > limit {
        fail(format!(
            "{} but took {:.1?} (limit {:?})",
            outcome.detail, elapsed, limit
        ))
    } else {
        outcome
    }
}

fn criterion_1() -> Outcome {
    let mut cells = 0usize;
    for params in oracle_grid() {
        let summary = ensemble_summary(&params, DEFAULT_ENUMERATION_GUARD).unwrap();
        let max_w = params.q() * params.n;
        for u in 1..params.k {
            for v in 0..=params.n {
                for w in 0..=max_w {
                    let formula = expected_a(&params, u, v, w);
                    let oracle = summary.expected_a((u, v, w as u64));
                    if formula != oracle {
                        return fail(format!(
                            "k={} n={} mu={} (u,v,w)=({u},{v},{w}): formula {formula} vs enumeration {oracle}",
                            params.k, params.n, params.pmf
                        ));
                    }
                    cells += 1;
                }
            }
        }
        // no enumerated mass outside the checked cells
        if summary
            .expected_a
            .keys()
            .any(|&(u, v, w)| u == 0 || u >= params.k || v > params.n || w as usize > max_w)
        {
            return fail(format!(
                "k={} n={}: enumeration produced an unexpected cell",
                params.k, params.n
            ));
        }
    }
    pass(format!("{cells} cells equal exactly"))
}

fn criterion_2() -> Outcome {
    let mut checks = 0usize;
    for params in oracle_grid() {
        let summary = ensemble_summary(&params, DEFAULT_ENUMERATION_GUARD).unwrap();
        let delta_max = (params.q() * params.n + 1) as u64;
        let curve = tail_lower_bound(&params, delta_max);
        for p in &curve.points {
            let raw = p.exact.as_ref().unwrap();
            let truth = summary.tail(p.delta);
            if raw > &truth {
                return fail(format!(
                    "k={} n={} mu={} delta={}: bound {raw} > Pr {truth}",
                    params.k, params.n, params.pmf, p.delta
                ));
            }
            checks += 1;
        }
    }
    pass(format!(
        "{checks} (ensemble, delta) pairs satisfy raw <= Pr[lambda >= delta]"
    ))
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1e44a1);
    for i in 0..500 {
        let k = rng.gen_range(2..=10usize);
        let n = rng.gen_range(1..=k * (k - 1) / 2);
        let q = rng.gen_range(1..=5usize);
        let params = EnsembleParams::new(k, n, WeightPmf::uniform(q)).unwrap();
        let g = EnsembleSampler::new(&params).sample(&mut rng);
        let check = lemma1_check(&g).unwrap();
        if let Some(v) = check.violation {
            return fail(format!(
                "graph {i} (k={k} n={n}): B_{} = {} > half of {}",
                v.w, v.b, v.detailed_sum
            ));
        }
    }
    pass("500 graphs, no violation")
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed4);
    let mut disconnected = 0;
    for i in 0..1000 {
        let k = rng.gen_range(2..=12usize);
        let n = rng.gen_range(1..=k * (k - 1) / 2);
        let q = rng.gen_range(1..=5usize);
        let params = EnsembleParams::new(k, n, WeightPmf::uniform(q)).unwrap();
        let g = EnsembleSampler::new(&params).sample(&mut rng);
        let contraction = global_min_cut(&g).value;
        let flow = global_min_cut_via_maxflow(&g).value;
        let oracle = min_cut_by_enumeration(&g).unwrap();
        if contraction != flow || flow != oracle {
            return fail(format!(
                "graph {i} (k={k} n={n}): contraction {contraction}, max-flow {flow}, enumeration {oracle}"
            ));
        }
        disconnected += usize::from(oracle == 0);
    }
    pass(format!("1000 graphs agree ({disconnected} disconnected)"))
}

struct Figure {
    bound: BoundCurve,
    empirical: EmpiricalCurve,
}

fn figure(n: usize) -> Figure {
    let params = EnsembleParams::new(100, n, WeightPmf::parse(FIGURE_PMF).unwrap()).unwrap();
    let bound = tail_lower_bound_auto(&params);
    let empirical = run_simulation(&SimulationConfig {
        params,
        instances: FIGURE_INSTANCES,
        master_seed: FIGURE_SEED,
        delta_max: None,
        workers: 1,
    })
    .unwrap();
    Figure { bound, empirical }
}

/// Checks (a) and (b) shared by both figures.
fn figure_shape(fig: &Figure, window: (u64, u64)) -> Result<ComparisonReport, String> {
    let report = compare_curves(&fig.bound, &fig.empirical, window).map_err(|e| e.to_string())?;
    if let Some(r) = report.rows.iter().find(|r| r.violation) {
        return Err(format!(
            "violation at delta={}: bound {} > ci_high {}",
            r.delta, r.clamped_bound, r.ci_high
        ));
    }
    let b = &fig.bound.points;
    let e = &fig.empirical.points;
    if b[0].clamped() != 1.0 || e[0].estimate != 1.0 {
        return Err("curves do not start at 1".into());
    }
    if b.windows(2)
        .any(|w| w[1].clamped() > w[0].clamped() || w[1].raw > w[0].raw)
    {
        return Err("bound curve increases".into());
    }
    if e.windows(2).any(|w| w[1].estimate > w[0].estimate) {
        return Err("empirical curve increases".into());
    }
    Ok(report)
}

fn criterion_5(fig: &Figure) -> (Outcome, Option<f64>) {
    let report = match figure_shape(fig, (1, 4)) {
        Ok(r) => r,
        Err(e) => return (fail(e), None),
    };
    let gap1 = report.rows[1].gap;
    let max_gap = report.max_gap.map(|g| g.1);
    let detail = format!(
        "bound(1)={:.6} emp(1)={:.4} gap(1)={:.4}; max gap over 1..4 = {:.4}",
        report.rows[1].clamped_bound,
        report.rows[1].empirical,
        gap1,
        max_gap.unwrap_or(f64::NAN)
    );
    if gap1 > DELTA1_GAP {
        return (fail(format!("{detail} exceeds {DELTA1_GAP}")), max_gap);
    }
    (pass(detail), max_gap)
}

fn criterion_6(fig: &Figure, sparse_max_gap: Option<f64>) -> Outcome {
    let report = match figure_shape(fig, (1, 15)) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let dense = report.max_gap.expect("window inside the bound range").1;
    let Some(sparse) = sparse_max_gap else {
        return fail("sparse figure did not produce a max gap");
    };
    let detail = format!("max gap n=700 over 1..15 = {dense:.4}, n=400 over 1..4 = {sparse:.4}");
    if dense < sparse {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn criterion_7() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in [400, 700] {
        let params = EnsembleParams::new(100, n, WeightPmf::parse(FIGURE_PMF).unwrap()).unwrap();
        let exact = tail_lower_bound_auto(&params);
        let log = tail_lower_bound_logdomain(&params, exact.delta_max());
        for (e, l) in exact.points.iter().zip(&log.points) {
            let reference = mcbound::numeric::to_f64(e.exact.as_ref().unwrap());
            if reference.abs() > NUMERIC_FLOOR {
                let rel = ((l.raw - reference) / reference).abs();
                worst = worst.max(rel);
                if rel > NUMERIC_REL_TOL {
                    return fail(format!(
                        "n={n} delta={}: relative difference {rel:e}",
                        e.delta
                    ));
                }
            }
        }
    }
    pass(format!("max relative difference {worst:.3e}"))
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn criterion_8() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for workers in [1, 4, 8] {
        let dir = tmp.path().join(format!("w{workers}"));
        let code = cli::run([
            "mcbound",
            "simulate",
            "--k",
            "100",
            "--n",
            "400",
            "--mu",
            FIGURE_PMF,
            "--instances",
            "2000",
            "--seed",
            "17",
            "--workers",
            &workers.to_string(),
            "--out-dir",
            dir.to_str().unwrap(),
        ]);
        if code != 0 {
            return fail(format!("simulate exited with {code} for workers={workers}"));
        }
        outputs.push(read_dir_sorted(&dir));
    }
    if outputs.windows(2).all(|w| w[0] == w[1]) {
        pass(format!(
            "{} files byte-identical across workers 1, 4, 8",
            outputs[0].len()
        ))
    } else {
        fail("outputs differ across worker counts")
    }
}

fn main() {
    let mut failures = 0;
    let mut report = |id: &str, start: Instant, limit: Option<Duration>, outcome: Outcome| {
        let elapsed = start.elapsed();
        let outcome = match limit {
            Some(l) => within(l, elapsed, outcome),
            None => outcome,
        };
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {id} ({elapsed:.1?}): {}", outcome.detail);
        if !outcome.passed {
            failures += 1;
        }
    };

    let t = Instant::now();
    report(
        "1 lemma-3 oracle equality",
        t,
        Some(Duration::from_secs(10)),
        criterion_1(),
    );
    let t = Instant::now();
    report(
        "2 tail bound below exact tail",
        t,
        Some(Duration::from_secs(10)),
        criterion_2(),
    );
    let t = Instant::now();
    report(
        "3 lemma-1 per graph",
        t,
        Some(Duration::from_secs(30)),
        criterion_3(),
    );
    let t = Instant::now();
    report(
        "4 min-cut triple agreement",
        t,
        Some(Duration::from_secs(60)),
        criterion_4(),
    );

    let t = Instant::now();
    let sparse = figure(400);
    let (outcome, sparse_gap) = criterion_5(&sparse);
    report(
        "5 figure 1 (k=100, n=400)",
        t,
        Some(Duration::from_secs(300)),
        outcome,
    );
    let t = Instant::now();
    let dense = figure(700);
    report(
        "6 figure 2 (k=100, n=700)",
        t,
        Some(Duration::from_secs(600)),
        criterion_6(&dense, sparse_gap),
    );

    let t = Instant::now();
    report(
        "7 exact vs log-domain",
        t,
        Some(Duration::from_secs(30)),
        criterion_7(),
    );
    let t = Instant::now();
    report("8 determinism across workers", t, None, criterion_8());

    // sanity: the figure bounds are exact curves
    debug_assert!(sparse.bound.points.iter().all(|p| p.exact.is_some()));

    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
