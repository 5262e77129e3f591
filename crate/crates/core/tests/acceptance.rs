//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails or overruns its time budget.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use bicriteria::cost::{cost, normalize, NearestCache};
use bicriteria::harness::{gen_mixture, run_experiment, ExperimentConfig, MixtureSpec, RunOptions};
use bicriteria::metric::DistanceMatrix;
use bicriteria::select::{select_pp, BallGuess};
use bicriteria::{
    audit_run, brute_force_kmeans, brute_force_medoids, check_triangle_power, core_set,
    inaba_search, kappa_core, kappa_lb, kmeanspp_seed, run_greedy, AuditParams, GreedyConfig,
    GreedyTrace, Norm, Point, PointSpace, ReferenceSolution, RngStream, SelectorSpec,
};
use common::*;
use rand::Rng;

/// Relative slack for identities and inequalities.
const SLACK: f64 = 1e-9;
/// Absolute slack on the approximation-ratio bounds.
const RATIO_SLACK: f64 = 1e-6;
const TV_LIMIT: f64 = 0.02;
const DRAWS: usize = 100_000;
/// Fraction of the core hit-rate bound that the empirical rate must reach.
const HIT_RATE_FRACTION: f64 = 0.8;

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict {
            pass,
            detail: detail.into(),
        }
    }
}

/// One greedy run kept for the audit criterion.
struct AuditCase {
    label: String,
    space: PointSpace,
    points: Vec<Point>,
    reference: ReferenceSolution,
    trace: GreedyTrace,
    gamma: f64,
    epsilon: f64,
}

fn psi(s: &PointSpace, a: &[Point], c: &[Point]) -> f64 {
    normalize(s, cost(s, a, c).unwrap(), a.len())
}

fn mixture(k: usize, per: usize, dim: usize, seed: u64, s: &PointSpace) -> bicriteria::harness::Mixture {
    gen_mixture(
        &MixtureSpec {
            k,
            n_per_cluster: per,
            dim,
            center_box: 10.0,
            spread: 1.0,
            seed,
        },
        s,
    )
    .unwrap()
}

fn clamp_rounds(x: f64) -> usize {
    if x.is_finite() && x > 1.0 {
        x.ceil() as usize
    } else {
        1
    }
}

fn bias_variance() -> Verdict {
    let mut r = rng(101);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let (n, d) = (r.random_range(1..=50), r.random_range(1..=10));
        let s = PointSpace::kmeans(d).unwrap();
        let a = random_points(&mut r, n, d, 50.0);
        let z = Point::Coords((0..d).map(|_| r.random_range(-80.0..80.0)).collect());
        let mu = Point::Coords(mean(&coords(&a)));
        let lhs = cost(&s, &a, std::slice::from_ref(&z)).unwrap();
        let rhs = cost(&s, &a, std::slice::from_ref(&mu)).unwrap() + n as f64 * s.delta(&mu, &z).unwrap();
        worst = worst.max((lhs - rhs).abs() / lhs.abs().max(rhs.abs()));
    }
    Verdict::new(worst <= SLACK, format!("1000 instances, worst relative error {worst:.2e}"))
}

fn inequalities() -> Verdict {
    let mut r = rng(202);
    let mut violations = Vec::new();
    for inst in 0..1000 {
        let case = inst % 18;
        let n = r.random_range(2..=30);
        let (s, x) = space_family(&mut r, case, n, 3);
        let rf = if s.is_kmeans() {
            ReferenceSolution::with_means(&s, &x, vec![Point::Coords(mean(&coords(&x)))]).unwrap()
        } else {
            let k = r.random_range(1..=4);
            ReferenceSolution::new(&s, &x, random_centers(&mut r, &x, k)).unwrap()
        };
        let eps = r.random_range(0.05..2.0);
        let lb = kappa_lb(&s, &x, &rf).unwrap();
        let kc = kappa_core(&s, &x, &rf, eps).unwrap();
        if !(leq(lb, kc, SLACK) && leq(kc, (1.0 + eps).powf(1.0 / s.q()), SLACK)) {
            violations.push(format!("κ bounds #{inst}"));
        }
        for (j, c) in rf.centers.iter().enumerate() {
            let a = rf.cluster(j, &x);
            if a.is_empty() {
                continue;
            }
            let base = psi(&s, &a, std::slice::from_ref(c));
            if !x.iter().all(|y| check_triangle_power(&s, &a, c, y).unwrap()) {
                violations.push(format!("first bound #{inst}"));
            }
            let best = a
                .iter()
                .map(|y| psi(&s, &a, std::slice::from_ref(y)))
                .fold(f64::INFINITY, f64::min);
            if !(leq(best, (1.0 + lb) * base, SLACK) && leq((1.0 + lb) * base, 2.0 * base, SLACK)) {
                violations.push(format!("second bound #{inst}"));
            }
        }
        let (ka, kb) = (r.random_range(1..=3), r.random_range(1..=3));
        let small = random_centers(&mut r, &x, ka);
        let mut big = small.clone();
        big.extend(random_centers(&mut r, &x, kb));
        let extra = x[r.random_range(0..n)].clone();
        let phi = |c: &[Point]| cost(&s, &x, c).unwrap();
        let with = |c: &[Point]| {
            let mut v = c.to_vec();
            v.push(extra.clone());
            phi(&v)
        };
        let scale = phi(&small);
        if !leq(phi(&big), phi(&small), SLACK) {
            violations.push(format!("monotone #{inst}"));
        }
        if phi(&small) - with(&small) < phi(&big) - with(&big) - SLACK * scale {
            violations.push(format!("supermodular #{inst}"));
        }
    }
    Verdict::new(
        violations.is_empty(),
        format!("1000 instances, {} violations {:?}", violations.len(), &violations[..violations.len().min(5)]),
    )
}

fn inaba_and_oracles() -> Verdict {
    let mut r = rng(303);
    let mut worst_excess = f64::NEG_INFINITY;
    for i in 0..200 {
        let eps = [1.0, 0.5, 1.0 / 3.0][i % 3];
        let (n, d) = (r.random_range(1..=8), r.random_range(1..=3));
        let s = PointSpace::kmeans(d).unwrap();
        let a = random_points(&mut r, n, d, 20.0);
        let (_, ratio) = inaba_search(&s, &a, eps).unwrap();
        worst_excess = worst_excess.max(ratio - (1.0 + eps));
    }
    let mut oracle_bad = 0;
    for _ in 0..100 {
        let (n, d) = (r.random_range(1..=10), r.random_range(1..=3));
        let s = PointSpace::kmeans(d).unwrap();
        let x = random_points(&mut r, n, d, 20.0);
        let k = r.random_range(1..=n.min(3));
        let km = brute_force_kmeans(&s, &x, k).unwrap();
        let md = brute_force_medoids(&s, &x, k).unwrap();
        if !leq(km.cost, md.cost, SLACK) {
            oracle_bad += 1;
        }
    }
    Verdict::new(
        worst_excess <= SLACK && oracle_bad == 0,
        format!("inaba worst ratio − (1+ε) = {worst_excess:.2e}; kmeans > medoids on {oracle_bad}/100"),
    )
}

fn greedy_select_all(cases: &mut Vec<AuditCase>) -> Verdict {
    const EPS: f64 = 0.1;
    let spaces = [
        PointSpace::kmeans(2).unwrap(),
        PointSpace::euclidean(2, Norm::L2, 1.0).unwrap(),
        PointSpace::euclidean(2, Norm::L2, 2.0).unwrap(),
        PointSpace::euclidean(2, Norm::L1, 3.0).unwrap(),
    ];
    let mut passed = 0;
    let mut worst = f64::NEG_INFINITY;
    for inst in 0..20u64 {
        let k = 2 + (inst % 2) as usize;
        let replica = inst < 10;
        let (s, x, rf) = if replica {
            // Shrunken replica: exhaustive optimum as the reference.
            let s = PointSpace::kmeans(2).unwrap();
            let mix = mixture(k, if k == 2 { 5 } else { 3 }, 2, 400 + inst, &s);
            let x = mix.points;
            let km = brute_force_kmeans(&s, &x, k).unwrap();
            let rf = ReferenceSolution::with_means(&s, &x, km.means).unwrap();
            assert!(close(rf.cost, km.cost, 1e-9));
            (s, x, rf)
        } else {
            let s = spaces[inst as usize % spaces.len()].clone();
            let per = [20, 15, 12, 18, 10][inst as usize % 5].min(60 / k);
            let mix = mixture(k, per, 2, 400 + inst, &s);
            (s, mix.points, mix.reference)
        };
        let gamma = (1.0 + kappa_lb(&s, &x, &rf).unwrap()).powf(s.q());
        let c0 = kmeanspp_seed(&s, &x, k, &mut RngStream::new(inst)).unwrap();
        let alpha = cost(&s, &x, &c0).unwrap() / (gamma * rf.cost);
        let t = clamp_rounds(k as f64 * ((alpha - 1.0).max(std::f64::consts::E) / EPS).ln());
        let cfg = GreedyConfig::new(t, SelectorSpec::SelectAll)
            .with_initial_centers(c0)
            .with_seed(inst)
            .recording_candidates();
        let trace = run_greedy(&s, &x, &cfg).unwrap();
        let ratio = trace.final_cost() / rf.cost;
        let bound = gamma * (1.0 + EPS);
        worst = worst.max(ratio - bound);
        if ratio <= bound + RATIO_SLACK {
            passed += 1;
        }
        cases.push(AuditCase {
            label: format!("select_all #{inst}"),
            space: s,
            points: x,
            reference: rf,
            trace,
            gamma,
            epsilon: EPS,
        });
    }
    Verdict::new(passed == 20, format!("{passed}/20 within bound, worst ratio − bound {worst:.3e}"))
}

fn greedy_subset_means(cases: &mut Vec<AuditCase>) -> Verdict {
    const EPS: f64 = 0.5;
    let s = PointSpace::kmeans(2).unwrap();
    let mut passed = 0;
    let mut worst = f64::NEG_INFINITY;
    for inst in 0..10u64 {
        let x = mixture(2, 5, 2, 500 + inst, &s).points;
        let km = brute_force_kmeans(&s, &x, 2).unwrap();
        let rf = ReferenceSolution::with_means(&s, &x, km.means).unwrap();
        let c0 = kmeanspp_seed(&s, &x, 2, &mut RngStream::new(inst)).unwrap();
        let alpha = cost(&s, &x, &c0).unwrap() / ((1.0 + EPS) * km.cost);
        let t = clamp_rounds(2.0 * ((alpha - 1.0) / EPS).ln());
        let cfg = GreedyConfig::new(t, SelectorSpec::SubsetMeans { epsilon: EPS })
            .with_initial_centers(c0)
            .with_seed(inst)
            .recording_candidates();
        let trace = run_greedy(&s, &x, &cfg).unwrap();
        let bound = (1.0 + EPS).powi(2) * km.cost;
        worst = worst.max((trace.final_cost() - bound) / km.cost);
        if trace.final_cost() <= bound + RATIO_SLACK {
            passed += 1;
        }
        cases.push(AuditCase {
            label: format!("subset_means #{inst}"),
            space: s.clone(),
            points: x,
            reference: rf,
            trace,
            gamma: 1.0 + EPS,
            epsilon: EPS,
        });
    }
    Verdict::new(passed == 10, format!("{passed}/10 within (1+ε)², worst relative excess {worst:.3e}"))
}

fn audits(cases: &[AuditCase]) -> Verdict {
    let mut rounds = 0;
    let mut conditioned = 0;
    let mut bad = Vec::new();
    for c in cases {
        let rep = audit_run(
            &c.space,
            &c.points,
            &c.reference,
            &c.trace,
            AuditParams {
                gamma: c.gamma,
                tau: 0.0,
                epsilon: c.epsilon,
                alpha: None,
            },
        )
        .unwrap();
        rounds += rep.rounds.len();
        conditioned += rep.rounds.iter().filter(|r| r.recurrence_checked).count();
        if !rep.is_clean() {
            bad.push(format!(
                "{}: {} implication, {} recurrence",
                c.label, rep.implication_violations, rep.recurrence_violations
            ));
        }
    }
    Verdict::new(
        bad.is_empty() && !cases.is_empty(),
        format!("{} runs, {rounds} rounds, {conditioned} recurrence checks, violations {bad:?}", cases.len()),
    )
}

fn directional() -> Verdict {
    let mut wins = 0;
    let mut ratios = Vec::new();
    for meta in 0..10u64 {
        let toml = format!(
            r#"
seed = {meta}
repeats = 10
metrics = ["median_cost", "ratios"]

[dataset]
kind = "mixture"
k = 10
n_per_cluster = 100
dim = 5
center_box = 10.0
spread = 1.0
seed = {meta}

[space]
kind = "kmeans"

[algorithms.greedy]
kind = "greedy"
t = 10
selector = {{ kind = "select_pp", epsilon = 1.0, k = 10, override_m = 40 }}

[algorithms.kmeanspp]
kind = "kmeanspp"
t = 10
"#
        );
        let cfg = ExperimentConfig::from_toml_str(&toml).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let res = run_experiment(
            &cfg,
            &RunOptions {
                output: Some(dir.path().to_path_buf()),
                ..RunOptions::default()
            },
        )
        .unwrap();
        let ratio = res.algorithm("greedy").unwrap().median_cost.unwrap()
            / res.algorithm("kmeanspp").unwrap().median_cost.unwrap();
        if ratio < 1.0 {
            wins += 1;
        }
        ratios.push(format!("{ratio:.3}"));
    }
    Verdict::new(wins >= 8, format!("greedy median below kmeans++ in {wins}/10 meta-seeds, ratios {ratios:?}"))
}

fn total_variation(counts: &[usize], weights: &[f64]) -> f64 {
    let draws: usize = counts.iter().sum();
    let total: f64 = weights.iter().sum();
    counts
        .iter()
        .zip(weights)
        .map(|(&c, &w)| (c as f64 / draws as f64 - w / total).abs())
        .sum::<f64>()
        / 2.0
}

fn position(x: &[Point], y: &Point) -> usize {
    x.iter().position(|p| p.same_as(y)).unwrap()
}

/// A tight cluster near the origin, served only by a center in a far cluster.
fn far_served_instance(s: &PointSpace, r: &mut impl Rng, near: usize, far: usize) -> (Vec<Point>, ReferenceSolution, Vec<Point>) {
    let mut raw: Vec<Vec<f64>> = (0..near)
        .map(|_| (0..2).map(|_| r.random_range(-1.0..1.0)).collect())
        .collect();
    raw.extend((0..far).map(|_| (0..2).map(|_| 100.0 + r.random_range(-1.0..1.0)).collect()));
    let means = [mean(&raw[..near]), mean(&raw[near..])];
    let x = to_points(&raw);
    let centers = means.iter().cloned().map(Point::Coords).collect();
    let rf = if s.is_kmeans() {
        ReferenceSolution::with_means(s, &x, centers).unwrap()
    } else {
        ReferenceSolution::new(s, &x, centers).unwrap()
    };
    let prev = vec![x[near].clone()];
    (x, rf, prev)
}

fn metric_from(raw: &[Point]) -> DistanceMatrix {
    let rows: Vec<Vec<f64>> = raw
        .iter()
        .map(|a| {
            raw.iter()
                .map(|b| {
                    let (a, b) = (a.coords().unwrap(), b.coords().unwrap());
                    a.iter().zip(b).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt()
                })
                .collect()
        })
        .collect();
    DistanceMatrix::from_rows(&rows).unwrap()
}

fn selector_laws() -> Verdict {
    let mut r = rng(808);
    let mut worst_tv: f64 = 0.0;
    // select_pp against the exact cost-proportional law.
    for case in 0..6 {
        let (s, x) = space_family(&mut r, case, 12, 2);
        let c = random_centers(&mut r, &x, 2);
        let cache = NearestCache::build(&s, &x, &c).unwrap();
        let sel = select_pp(&cache, 1.0, 2, Some(DRAWS), &mut RngStream::new(case as u64)).unwrap();
        let mut counts = vec![0usize; x.len()];
        for y in sel.candidates.iter() {
            counts[position(&x, y)] += 1;
        }
        let exact: Vec<f64> = x
            .iter()
            .map(|p| c.iter().map(|q| s.delta(p, q).unwrap()).fold(f64::INFINITY, f64::min))
            .collect();
        worst_tv = worst_tv.max(total_variation(&counts, &exact));
    }
    // kmeans++: the joint law of the first two seeds.
    for case in 0..6 {
        let (s, x) = space_family(&mut r, case, 6, 2);
        let n = x.len();
        let mut counts = vec![0usize; n * n];
        for draw in 0..DRAWS as u64 {
            let c = kmeanspp_seed(&s, &x, 2, &mut RngStream::new(draw ^ (case as u64) << 40)).unwrap();
            counts[position(&x, &c[0]) * n + position(&x, &c[1])] += 1;
        }
        let mut exact = vec![0.0; n * n];
        for i in 0..n {
            let row: Vec<f64> = x.iter().map(|p| s.delta(p, &x[i]).unwrap()).collect();
            let total: f64 = row.iter().sum();
            for j in 0..n {
                exact[i * n + j] = row[j] / total / n as f64;
            }
        }
        worst_tv = worst_tv.max(total_variation(&counts, &exact));
    }
    // Conditional core hit rate when a cluster is badly served.
    let mut worst_margin = f64::INFINITY;
    let mut hypotheses = 0;
    let coordinate_spaces = [
        PointSpace::kmeans(2).unwrap(),
        PointSpace::euclidean(2, Norm::L2, 1.0).unwrap(),
        PointSpace::euclidean(2, Norm::L2, 2.0).unwrap(),
        PointSpace::euclidean(2, Norm::L1, 3.0).unwrap(),
    ];
    for eps in [0.5, 1.0] {
        for (i, s0) in coordinate_spaces.iter().enumerate() {
            for metric in [false, true] {
                if metric && i > 0 {
                    continue;
                }
                let (x0, rf0, prev0) = far_served_instance(s0, &mut r, 25, 10);
                let (s, x, rf, prev) = if metric {
                    // Same geometry as a finite metric with p = 1.
                    let s = PointSpace::finite_metric(metric_from(&x0), 1.0).unwrap();
                    let x: Vec<Point> = (0..x0.len()).map(Point::Index).collect();
                    let medoids: Vec<Point> = [0..25, 25..35]
                        .into_iter()
                        .map(|range| {
                            let part = &x[range];
                            part.iter()
                                .min_by(|a, b| {
                                    let ca = cost(&s, part, std::slice::from_ref(*a)).unwrap();
                                    let cb = cost(&s, part, std::slice::from_ref(*b)).unwrap();
                                    ca.total_cmp(&cb)
                                })
                                .unwrap()
                                .clone()
                        })
                        .collect();
                    let rf = ReferenceSolution::new(&s, &x, medoids).unwrap();
                    (s, x.clone(), rf, vec![x[25].clone()])
                } else {
                    (s0.clone(), x0, rf0, prev0)
                };
                let a = rf.cluster(0, &x);
                let c = &rf.centers[0];
                let kc = kappa_core(&s, &x, &rf, eps).unwrap();
                let lhs = psi(&s, &a, &prev);
                if lhs <= (1.0 + eps) * (1.0 + kc) * psi(&s, &a, std::slice::from_ref(c)) {
                    continue;
                }
                hypotheses += 1;
                let core = core_set(&s, &a, c, kc).unwrap();
                let cache = NearestCache::build(&s, &x, &prev).unwrap();
                let sel = select_pp(&cache, eps, 2, Some(DRAWS), &mut RngStream::new(i as u64)).unwrap();
                let (mut in_cluster, mut in_core) = (0usize, 0usize);
                for y in sel.candidates.iter() {
                    if a.iter().any(|p| p.same_as(y)) {
                        in_cluster += 1;
                        if core.iter().any(|p| p.same_as(y)) {
                            in_core += 1;
                        }
                    }
                }
                let rate = in_core as f64 / in_cluster.max(1) as f64;
                let bound = (eps / (1.0 + eps)).powf(s.q() + 3.0) / 4.0;
                worst_margin = worst_margin.min(rate - HIT_RATE_FRACTION * bound);
            }
        }
    }
    Verdict::new(
        worst_tv < TV_LIMIT && hypotheses == 10 && worst_margin >= 0.0,
        format!("worst TV {worst_tv:.4}; hit-rate instances {hypotheses}/10, worst margin {worst_margin:.4}"),
    )
}

fn guess_ball_certificate() -> Verdict {
    let s = PointSpace::kmeans(2).unwrap();
    let mut certified = 0;
    for inst in 0..20u64 {
        let k = 2 + (inst % 2) as usize;
        let mix = mixture(k, 30 / k, 2, 900 + inst, &s);
        let x = &mix.points;
        let n = x.len();
        let mut triples = Vec::with_capacity(n * n);
        for anchor in 0..n {
            for b in 1..=n {
                triples.push(BallGuess::from_triple(&s, x, anchor, b, 1).unwrap());
            }
        }
        let all_clusters = (0..k).all(|j| {
            let a: Vec<Point> = x
                .iter()
                .zip(&mix.labels)
                .filter(|(_, &l)| l == j)
                .map(|(p, _)| p.clone())
                .collect();
            let c = Point::Coords(mean(&coords(&a)));
            let phi = cost(&s, &a, std::slice::from_ref(&c)).unwrap();
            let size = a.len();
            // m ranges over [n]; only m = |A| can qualify.
            (1..=n).any(|m| {
                m == size
                    && triples.iter().any(|g| {
                        leq(s.delta(&g.y, &c).unwrap(), phi / size as f64, SLACK)
                            && leq(phi, g.ball_cost, SLACK)
                            && leq(g.ball_cost, (1.0 + 2f64.powf(s.q())) * phi, SLACK)
                    })
            })
        });
        if all_clusters {
            certified += 1;
        }
    }
    Verdict::new(certified == 20, format!("{certified}/20 instances certified for every planted cluster"))
}

fn determinism() -> Verdict {
    let toml = r#"
seed = 2024
repeats = 6

[dataset]
kind = "mixture"
k = 4
n_per_cluster = 50
dim = 3
center_box = 10.0
spread = 1.0
seed = 17

[space]
kind = "euclidean"
p = 2.0

[algorithms.greedy]
kind = "greedy"
t = 6
selector = { kind = "select_pp", epsilon = 1.0, k = 4, override_m = 16 }

[algorithms.hybrid]
kind = "greedy"
t = 4
init = { policy = "kmeanspp", centers = 2 }
selector = { kind = "select_uniform", m = 10 }

[algorithms.kmeanspp]
kind = "kmeanspp"
t = 6
"#;
    let cfg = ExperimentConfig::from_toml_str(toml).unwrap();
    let threads = std::thread::available_parallelism().map_or(4, |n| n.get()).max(4);
    let run = |t: usize| {
        let dir = tempfile::tempdir().unwrap();
        run_experiment(
            &cfg,
            &RunOptions {
                threads: Some(t),
                output: Some(dir.path().to_path_buf()),
                ..RunOptions::default()
            },
        )
        .unwrap();
        std::fs::read(dir.path().join("result.json")).unwrap()
    };
    let golden = run(1);
    let parallel = run(threads);
    Verdict::new(
        golden == parallel && !golden.is_empty(),
        format!("result.json {} bytes at 1 and {threads} threads, identical: {}", golden.len(), golden == parallel),
    )
}

fn main() -> ExitCode {
    let mut cases = Vec::new();
    let mut failed = 0;
    let mut report = |id: usize, name: &str, budget: u64, f: &mut dyn FnMut() -> Verdict| {
        let start = Instant::now();
        let v = f();
        let took = start.elapsed();
        let in_time = took <= Duration::from_secs(budget);
        let pass = v.pass && in_time;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {id:>2} {name:<22} {}  ({:.1}s of {budget}s) {}",
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            v.detail
        );
    };
    report(1, "bias-variance", 5, &mut bias_variance);
    report(2, "inequalities", 30, &mut inequalities);
    report(3, "inaba and oracles", 60, &mut inaba_and_oracles);
    report(4, "select_all bound", 120, &mut || greedy_select_all(&mut cases));
    report(5, "subset_means bound", 120, &mut || greedy_subset_means(&mut cases));
    report(6, "condition audit", 120, &mut || audits(&cases));
    report(7, "greedy vs kmeans++", 180, &mut directional);
    report(8, "selector laws", 60, &mut selector_laws);
    report(9, "guess-ball triples", 120, &mut guess_ball_certificate);
    report(10, "determinism", 120, &mut determinism);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}
