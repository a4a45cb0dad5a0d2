//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Monte Carlo criteria pool seeds 1..=10 of the default configuration
//! (5 pairings × 100 class draws per seed and xi).

mod common;

use std::collections::BTreeMap;
use std::fs;
use std::process::ExitCode;
use std::sync::OnceLock;

use qrepnet::cli;
use qrepnet::experiment::{
    run_trials, summarize, ExperimentConfig, Mapping, NoiseAwarenessStudy, SweepSummary,
    TrialRecord,
};
use qrepnet::fidelity::{end_to_end_fidelity, iterate_swaps, LinkFidelity, PathComposition};
use qrepnet::routing::{node_weights, path_cost, shortest_path_weighted, WeightMapping};
use qrepnet::topology::{NetworkGraph, NoiseClass, Topology};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEEDS: std::ops::RangeInclusive<u64> = 1..=10;

/// (mapping, xi in hundredths, theta) -> (pooled mean fidelity, samples)
type ThetaMeans = BTreeMap<(&'static str, u64, usize), (f64, usize)>;
type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn pooled_trials(base: &ExperimentConfig) -> Vec<TrialRecord> {
    SEEDS
        .flat_map(|seed| {
            run_trials(&ExperimentConfig {
                seed,
                ..base.clone()
            })
            .expect("trials")
        })
        .collect()
}

fn pooled_sweep(base: &ExperimentConfig) -> SweepSummary {
    summarize(base, &pooled_trials(base))
}

fn topology_sweep(topology: Topology) -> &'static SweepSummary {
    static GRID: OnceLock<SweepSummary> = OnceLock::new();
    static CYLINDER: OnceLock<SweepSummary> = OnceLock::new();
    let cell = match topology {
        Topology::Grid(_) => &GRID,
        Topology::Cylinder(_) => &CYLINDER,
    };
    cell.get_or_init(|| {
        pooled_sweep(&ExperimentConfig {
            topology,
            ..Default::default()
        })
    })
}

const GRID: Topology = Topology::Grid(5);
const CYLINDER: Topology = Topology::Cylinder(5);

// 1
fn closed_form_vs_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let n = rng.gen_range(0..=12);
        let etas: Vec<f64> = (0..n).map(|_| 1.0 - rng.gen_range(0.0..0.5)).collect();
        let f = 1.0 - rng.gen_range(0.0..0.75);
        let link = LinkFidelity::new(f).unwrap();
        let mut comp = PathComposition::new();
        for (i, &eta) in etas.iter().enumerate() {
            comp.add(&NoiseClass::new(format!("g{i}"), eta).unwrap(), 1);
        }
        let diff = (end_to_end_fidelity(&comp, link) - iterate_swaps(&etas, link).unwrap()).abs();
        worst = worst.max(diff);
    }
    verdict(
        worst <= 1e-12,
        format!("max |closed - folded| = {worst:.2e} over 1000 cases (tol 1e-12)"),
    )
}

// 2
fn grid_blocking() -> Verdict {
    let p = topology_sweep(GRID).blocking_probability;
    verdict(
        (p - 0.28).abs() <= 0.06,
        format!("grid blocking = {p:.4} (target 0.28 ± 0.06)"),
    )
}

// 3
fn cylinder_never_blocks() -> Verdict {
    let s = topology_sweep(CYLINDER);
    verdict(
        s.blocked == 0,
        format!(
            "cylinder blocked {} of {} requests (p = {:.4}, target exactly 0)",
            s.blocked, s.requests, s.blocking_probability
        ),
    )
}

// 4
fn path_length_statistics() -> Verdict {
    let g = topology_sweep(GRID);
    let c = topology_sweep(CYLINDER);
    let (g_min, g_max) = (g.min_path_len.unwrap(), g.max_path_len.unwrap());
    let (c_min, c_max) = (c.min_path_len.unwrap(), c.max_path_len.unwrap());
    let (g_mean, c_mean) = (g.mean_path_len.unwrap(), c.mean_path_len.unwrap());
    let pass = g_min >= 7
        && g_max <= 11
        && c_min >= 7
        && c_max <= 13
        && (g_mean - 8.61).abs() <= 0.35
        && (c_mean - 9.0).abs() <= 0.35;
    verdict(
        pass,
        format!(
            "grid nodes {g_min}..{g_max} (want 7..11) mean {g_mean:.3} (8.61 ± 0.35); \
             cylinder nodes {c_min}..{c_max} (want 7..13) mean {c_mean:.3} (9.0 ± 0.35)"
        ),
    )
}

// 5
fn overall_mean_fidelity() -> Verdict {
    let g = topology_sweep(GRID).mean_fidelity.unwrap();
    let c = topology_sweep(CYLINDER).mean_fidelity.unwrap();
    verdict(
        (g - 0.3972).abs() <= 0.03 && (c - 0.3896).abs() <= 0.03,
        format!("grid {g:.4} (0.3972 ± 0.03), cylinder {c:.4} (0.3896 ± 0.03)"),
    )
}

// 6
fn low_xi_dead_zone() -> Verdict {
    let worst = |topology, limit: f64| {
        topology_sweep(topology)
            .points
            .iter()
            .filter(|p| p.xi < limit - 1e-9)
            .map(|p| p.all.as_ref().unwrap().median)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let g = worst(GRID, 0.32);
    let c = worst(CYLINDER, 0.36);
    verdict(
        g < 0.05 && c < 0.05,
        format!("largest median: grid xi<0.32 {g:.4}, cylinder xi<0.36 {c:.4} (want < 0.05)"),
    )
}

// 7
fn bottleneck_jump() -> Verdict {
    let jump = |topology, from: f64, to: f64| {
        let s = topology_sweep(topology);
        let a = s.point(from).unwrap().all.as_ref().unwrap();
        let b = s.point(to).unwrap().all.as_ref().unwrap();
        (b.mean / a.mean - 1.0, b.median / a.median - 1.0)
    };
    let (g_mean, g_med) = jump(GRID, 0.8, 0.84);
    let (c_mean, c_med) = jump(CYLINDER, 0.84, 0.88);
    verdict(
        g_mean >= 0.30 && c_mean >= 0.30,
        format!(
            "mean gain grid 0.80->0.84 {:+.1}%, cylinder 0.84->0.88 {:+.1}% (want >= 30%); \
             median gain {:+.1}% / {:+.1}%",
            100.0 * g_mean,
            100.0 * c_mean,
            100.0 * g_med,
            100.0 * c_med
        ),
    )
}

fn noise_awareness() -> &'static ThetaMeans {
    static CELL: OnceLock<ThetaMeans> = OnceLock::new();
    CELL.get_or_init(|| {
        // Pool seeds by weighting each seed's per-theta mean by its count.
        let mut sums = ThetaMeans::new();
        for seed in SEEDS {
            let cfg = ExperimentConfig {
                topology: CYLINDER,
                xi_values: vec![0.2, 0.4, 0.6, 0.8],
                seed,
                ..Default::default()
            };
            let study: NoiseAwarenessStudy = qrepnet::experiment::study_noise_awareness(
                &cfg,
                &[Mapping::NoiseUnaware, Mapping::aware()],
            )
            .unwrap();
            for m in &study.means {
                let key = (m.mapping, (m.xi * 100.0).round() as u64, m.theta);
                let e = sums.entry(key).or_default();
                e.0 += m.mean_fidelity * m.samples as f64;
                e.1 += m.samples;
            }
        }
        sums.into_iter()
            .map(|(k, (s, n))| (k, (s / n as f64, n)))
            .collect()
    })
}

// 8
fn theta_profile_unaware() -> Verdict {
    let data = noise_awareness();
    let means: Vec<f64> = (1..=5).map(|t| data[&("unaware", 60, t)].0).collect();
    let head_ok = means[..4].iter().all(|m| (m - 0.37).abs() <= 0.04);
    let tail_ok = (means[4] - 0.26).abs() <= 0.04;
    verdict(
        head_ok && tail_ok,
        format!(
            "xi=0.6 per-theta means {:?} (want theta 1-4 in 0.37 ± 0.04, theta 5 in 0.26 ± 0.04)",
            means.iter().map(|m| format!("{m:.4}")).collect::<Vec<_>>()
        ),
    )
}

// 9
fn theta_profile_aware() -> Verdict {
    let data = noise_awareness();
    let mut notes = Vec::new();
    let mut pass = true;
    for xi in [20, 40, 60, 80] {
        let aware: Vec<(f64, usize)> = (1..=5).map(|t| data[&("aware", xi, t)]).collect();
        let decreasing = aware.windows(2).all(|w| w[1].0 < w[0].0);
        let unaware_first = data[&("unaware", xi, 1)].0;
        let gain = aware[0].0 > unaware_first;
        let enough = aware[0].1 >= 500;
        pass &= decreasing && gain && enough;
        notes.push(format!(
            "xi={:.1}: aware {} ({}), theta1 {:.4} vs unaware {:.4}",
            xi as f64 / 100.0,
            aware
                .iter()
                .map(|(m, _)| format!("{m:.3}"))
                .collect::<Vec<_>>()
                .join(">"),
            if decreasing {
                "decreasing"
            } else {
                "NOT decreasing"
            },
            aware[0].0,
            unaware_first
        ));
    }
    verdict(pass, notes.join("; "))
}

// 10
fn blocking_vs_mapping() -> Verdict {
    let blocking = |mapping: Mapping, f_bar: f64| -> Vec<(f64, f64)> {
        let cfg = ExperimentConfig {
            topology: CYLINDER,
            mapping,
            f_bar,
            ..Default::default()
        };
        let summary = pooled_sweep(&cfg);
        summary
            .points
            .iter()
            .map(|p| (p.xi, p.blocking_probability))
            .collect()
    };
    let (u7, a7) = (
        blocking(Mapping::NoiseUnaware, 0.7),
        blocking(Mapping::aware(), 0.7),
    );
    let (u53, a53) = (
        blocking(Mapping::NoiseUnaware, 0.53),
        blocking(Mapping::aware(), 0.53),
    );
    let never_worse = u7.iter().zip(&a7).all(|(u, a)| a.1 <= u.1);
    let strictly_better = u7.iter().zip(&a7).filter(|(u, a)| a.1 < u.1).count();
    let (worst_xi, worst_gap) = u53
        .iter()
        .zip(&a53)
        .map(|(u, a)| (u.0, (u.1 - a.1).abs()))
        .fold((0.0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    verdict(
        never_worse && strictly_better >= 3 && worst_gap <= 0.03,
        format!(
            "F=0.7: aware <= unaware everywhere: {never_worse}, strictly better at {strictly_better} xi; \
             F=0.53: max |gap| {worst_gap:.4} at xi={worst_xi:.2} (want <= 0.03)"
        ),
    )
}

// 11
fn routing_optimality() -> Verdict {
    let hq = NoiseClass::new("HQ", 0.999).unwrap();
    let lq = NoiseClass::new("LQ", 0.8).unwrap();
    let mappings = [
        WeightMapping::NoiseUnaware,
        WeightMapping::noise_aware(0.8, 100.0).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    let mut mismatches = 0;
    for _ in 0..100 {
        let mut g = NetworkGraph::build(Topology::Grid(3)).unwrap();
        let xi = rng.gen_range(0..=9) as f64 / 9.0;
        g.assign_classes(xi, &hq, &lq, &mut rng).unwrap();
        let drop_p = rng.gen_range(0.0..0.4);
        for (u, v) in g.edges().collect::<Vec<_>>() {
            if rng.gen_bool(drop_p) {
                g.remove_edge(u, v);
            }
        }
        for f in &mappings {
            let weights = node_weights(&g, f).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    let (s, d) = (g.source(i), g.destination(j));
                    let fast =
                        shortest_path_weighted(&g, &weights, s, d).map(|p| path_cost(&weights, &p));
                    let slow = common::brute_force_shortest(&g, &weights, s, d).map(|(c, _)| c);
                    checked += 1;
                    let same = match (fast, slow) {
                        (None, None) => true,
                        (Some(a), Some(b)) => (a - b).abs() < 1e-9,
                        _ => false,
                    };
                    mismatches += usize::from(!same);
                }
            }
        }
    }
    verdict(
        mismatches == 0,
        format!("{checked} (subgraph, mapping, pair) cases vs exhaustive search, {mismatches} mismatches"),
    )
}

// 12
fn determinism() -> Verdict {
    let commands = [
        "topology",
        "lq-sensitivity",
        "noise-awareness",
        "blocking",
        "graph",
    ];
    let mut differing = Vec::new();
    for command in commands {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let run = |dir: &std::path::Path| {
            cli::run([
                "qrepnet",
                command,
                "--seed",
                "2024",
                "--out-dir",
                dir.to_str().unwrap(),
            ])
            .unwrap()
        };
        let report = run(a.path());
        run(b.path());
        for out in &report.outputs {
            let name = out.file_name().unwrap();
            if fs::read(out).unwrap() != fs::read(b.path().join(name)).unwrap() {
                differing.push(format!("{command}/{}", name.to_string_lossy()));
            }
        }
    }
    verdict(
        differing.is_empty(),
        if differing.is_empty() {
            "all five commands reproduce their data files byte for byte".to_string()
        } else {
            format!("differing outputs: {}", differing.join(", "))
        },
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("fidelity closed form vs oracle", closed_form_vs_oracle),
        ("grid blocking probability", grid_blocking),
        ("cylindrical never blocks", cylinder_never_blocks),
        ("path-length statistics", path_length_statistics),
        ("overall mean fidelity", overall_mean_fidelity),
        ("low-xi dead zone", low_xi_dead_zone),
        ("bottleneck jump", bottleneck_jump),
        ("theta profile, noise-unaware", theta_profile_unaware),
        ("theta profile, noise-aware", theta_profile_aware),
        ("blocking vs mapping", blocking_vs_mapping),
        ("routing optimality oracle", routing_optimality),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        failed += usize::from(!v.pass);
        println!(
            "{} [{:2}] {name}: {}",
            if v.pass { "PASS" } else { "FAIL" },
            i + 1,
            v.detail
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
