//! Monte Carlo driver for the routing studies.
//!
//! For every point of a sweep, `num_pair_draws` source→destination pairings
//! are combined with `num_class_draws` random HQ/LQ assignments; each
//! combination is one trial running a single allocation batch. Pairings
//! depend only on the root seed, so they are shared by every sweep point,
//! topology and mapping. Each trial draws from its own stream keyed by
//! `(xi, pairing, class draw)`, which makes results independent of
//! execution order and of the other sweep points requested.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fidelity::{check_eta, LinkFidelity};
use crate::rng::{substream, Purpose};
use crate::routing::{allocate_batch, shuffle_requests, BlockReason, Outcome, WeightMapping};
use crate::stats::{stable_mean, BoxSummary};
use crate::topology::{NetworkGraph, NoiseClass, Topology};

/// Path node counts shown by the LQ-sensitivity study.
pub const FIGURE_PATH_LENGTHS: [usize; 2] = [7, 11];

pub const HQ_LABEL: &str = "HQ";
pub const LQ_LABEL: &str = "LQ";

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mapping {
    NoiseUnaware,
    /// LQ nodes weigh `lq_weight`, HQ nodes 1.
    NoiseAware {
        lq_weight: f64,
    },
}

impl Mapping {
    pub const DEFAULT_AWARE_WEIGHT: f64 = 100.0;

    pub fn aware() -> Self {
        Mapping::NoiseAware {
            lq_weight: Self::DEFAULT_AWARE_WEIGHT,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Mapping::NoiseUnaware => "unaware",
            Mapping::NoiseAware { .. } => "aware",
        }
    }

    pub fn weight_mapping(self, eta_l: f64) -> Result<WeightMapping> {
        match self {
            Mapping::NoiseUnaware => Ok(WeightMapping::NoiseUnaware),
            Mapping::NoiseAware { lq_weight } => WeightMapping::noise_aware(eta_l, lq_weight),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub topology: Topology,
    pub xi_values: Vec<f64>,
    pub eta_h: f64,
    pub eta_l: f64,
    pub link_f: f64,
    pub f_bar: f64,
    pub mapping: Mapping,
    pub num_pair_draws: usize,
    pub num_class_draws: usize,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            topology: Topology::Grid(5),
            xi_values: xi_grid(5),
            eta_h: 0.999,
            eta_l: 0.8,
            link_f: 0.975,
            f_bar: 0.0,
            mapping: Mapping::NoiseUnaware,
            num_pair_draws: 5,
            num_class_draws: 100,
            seed: 1,
        }
    }
}

/// `0, 1/n², 2/n², …, 1`.
pub fn xi_grid(n: usize) -> Vec<f64> {
    let total = n * n;
    (0..=total).map(|k| k as f64 / total as f64).collect()
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        NetworkGraph::build(self.topology)?;
        if self.xi_values.is_empty() {
            return Err(Error::InvalidParameter("no xi values".into()));
        }
        if let Some(xi) = self.xi_values.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::InvalidParameter(format!("xi {xi} outside [0, 1]")));
        }
        check_eta(self.eta_h)?;
        check_eta(self.eta_l)?;
        LinkFidelity::new(self.link_f)?;
        if !(0.0..=1.0).contains(&self.f_bar) {
            return Err(Error::InvalidParameter(format!(
                "fidelity threshold {} outside [0, 1]",
                self.f_bar
            )));
        }
        self.mapping.weight_mapping(self.eta_l)?;
        if self.num_pair_draws == 0 || self.num_class_draws == 0 {
            return Err(Error::InvalidParameter(
                "pair and class draw counts must be positive".into(),
            ));
        }
        Ok(())
    }

    /// xi values that are not a whole number of transport nodes.
    pub fn off_grid_xi(&self) -> Vec<f64> {
        let total = (self.topology.side() * self.topology.side()) as f64;
        self.xi_values
            .iter()
            .copied()
            .filter(|xi| ((xi * total) - (xi * total).round()).abs() > 1e-9)
            .collect()
    }

    fn classes(&self) -> Result<(NoiseClass, NoiseClass)> {
        Ok((
            NoiseClass::new(HQ_LABEL, self.eta_h)?,
            NoiseClass::new(LQ_LABEL, self.eta_l)?,
        ))
    }
}

/// Destination index of each source for the given pairing draw: a uniform
/// random bijection between the two tiers.
pub fn draw_pairing(n: usize, seed: u64, pairing_index: usize) -> Vec<usize> {
    let mut rng = substream(seed, Purpose::Pairing, pairing_index as u64, n as u64, 0);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    perm
}

#[derive(Debug, Clone, PartialEq)]
pub struct RequestRow {
    pub theta: usize,
    pub source_index: usize,
    pub destination_index: usize,
    /// Nodes on the allocated path including both endpoints.
    pub path_node_count: Option<usize>,
    pub n_h: usize,
    pub n_l: usize,
    pub fidelity: Option<f64>,
    pub blocked: Option<BlockReason>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub xi: f64,
    pub pairing_index: usize,
    pub class_draw_index: usize,
    /// One row per request, in theta order.
    pub rows: Vec<RequestRow>,
}

impl TrialRecord {
    pub fn blocked(&self) -> usize {
        self.rows.iter().filter(|r| r.blocked.is_some()).count()
    }
}

/// Builds the network, assigns classes, serves the pairing's requests in
/// shuffled order and records every outcome.
pub fn run_trial(
    cfg: &ExperimentConfig,
    xi: f64,
    pairing_index: usize,
    class_draw_index: usize,
) -> Result<TrialRecord> {
    let n = cfg.topology.side();
    let pairing = draw_pairing(n, cfg.seed, pairing_index);
    let (hq, lq) = cfg.classes()?;
    let link = LinkFidelity::new(cfg.link_f)?;
    let mapping = cfg.mapping.weight_mapping(cfg.eta_l)?;

    let mut rng = substream(
        cfg.seed,
        Purpose::Trial,
        xi.to_bits(),
        pairing_index as u64,
        class_draw_index as u64,
    );
    let mut graph = NetworkGraph::build(cfg.topology)?;
    graph.assign_classes(xi, &hq, &lq, &mut rng)?;

    let pairs: Vec<_> = pairing
        .iter()
        .enumerate()
        .map(|(i, &j)| (graph.source(i), graph.destination(j)))
        .collect();
    let requests = shuffle_requests(&pairs, &mut rng)?;
    let batch = allocate_batch(&graph, &requests, &mapping, cfg.f_bar, link)?;

    let first_source = graph.source(0).index();
    let first_destination = graph.destination(0).index();
    let rows = batch
        .allocations
        .iter()
        .map(|a| {
            let mut row = RequestRow {
                theta: a.request.theta,
                source_index: a.request.source.index() - first_source,
                destination_index: a.request.destination.index() - first_destination,
                path_node_count: None,
                n_h: 0,
                n_l: 0,
                fidelity: None,
                blocked: None,
            };
            match &a.outcome {
                Outcome::Allocated {
                    path,
                    composition,
                    fidelity,
                } => {
                    row.path_node_count = Some(path.len());
                    row.n_h = composition.count_of(HQ_LABEL);
                    row.n_l = composition.count_of(LQ_LABEL);
                    row.fidelity = Some(*fidelity);
                }
                Outcome::Blocked(reason) => row.blocked = Some(*reason),
            }
            row
        })
        .collect();
    Ok(TrialRecord {
        xi,
        pairing_index,
        class_draw_index,
        rows,
    })
}

/// Every trial of the configuration, ordered by (xi, pairing, class draw).
/// Trials run in parallel.
pub fn run_trials(cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    let jobs: Vec<(f64, usize, usize)> = cfg
        .xi_values
        .iter()
        .flat_map(|&xi| {
            (0..cfg.num_pair_draws)
                .flat_map(move |p| (0..cfg.num_class_draws).map(move |c| (xi, p, c)))
        })
        .collect();
    jobs.into_par_iter()
        .map(|(xi, p, c)| run_trial(cfg, xi, p, c))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct XiSummary {
    pub xi: f64,
    pub requests: usize,
    pub blocked: usize,
    pub blocking_probability: f64,
    pub mean_path_len: Option<f64>,
    /// Fidelity of every allocated path at this xi.
    pub all: Option<BoxSummary>,
    pub by_path_len: BTreeMap<usize, BoxSummary>,
    pub by_theta: BTreeMap<usize, BoxSummary>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub topology: Topology,
    pub mapping: Mapping,
    pub eta_l: f64,
    pub f_bar: f64,
    pub points: Vec<XiSummary>,
    pub requests: usize,
    pub blocked: usize,
    pub blocking_probability: f64,
    pub mean_fidelity: Option<f64>,
    pub mean_path_len: Option<f64>,
    pub min_path_len: Option<usize>,
    pub max_path_len: Option<usize>,
    /// Notes about the inputs, e.g. xi values that are not a whole number of
    /// transport nodes.
    pub warnings: Vec<String>,
}

impl SweepSummary {
    pub fn point(&self, xi: f64) -> Option<&XiSummary> {
        self.points.iter().find(|p| (p.xi - xi).abs() < 1e-12)
    }
}

/// Aggregates trials of one configuration. The result does not depend on
/// the order of `trials`.
pub fn summarize(cfg: &ExperimentConfig, trials: &[TrialRecord]) -> SweepSummary {
    #[derive(Default)]
    struct Acc {
        requests: usize,
        blocked: usize,
        fidelities: Vec<f64>,
        path_lens: Vec<f64>,
        by_len: BTreeMap<usize, Vec<f64>>,
        by_theta: BTreeMap<usize, Vec<f64>>,
    }

    let mut per_xi: Vec<Acc> = cfg.xi_values.iter().map(|_| Acc::default()).collect();
    for trial in trials {
        let Some(slot) = cfg
            .xi_values
            .iter()
            .position(|x| x.to_bits() == trial.xi.to_bits())
        else {
            continue;
        };
        let acc = &mut per_xi[slot];
        for row in &trial.rows {
            acc.requests += 1;
            match (row.fidelity, row.path_node_count) {
                (Some(f), Some(len)) => {
                    acc.fidelities.push(f);
                    acc.path_lens.push(len as f64);
                    acc.by_len.entry(len).or_default().push(f);
                    acc.by_theta.entry(row.theta).or_default().push(f);
                }
                _ => acc.blocked += 1,
            }
        }
    }

    let summarize_map = |m: &BTreeMap<usize, Vec<f64>>| {
        m.iter()
            .filter_map(|(&k, v)| BoxSummary::from_samples(v).map(|s| (k, s)))
            .collect::<BTreeMap<_, _>>()
    };
    let points: Vec<XiSummary> = cfg
        .xi_values
        .iter()
        .zip(&per_xi)
        .map(|(&xi, acc)| XiSummary {
            xi,
            requests: acc.requests,
            blocked: acc.blocked,
            blocking_probability: ratio(acc.blocked, acc.requests),
            mean_path_len: stable_mean(&acc.path_lens),
            all: BoxSummary::from_samples(&acc.fidelities),
            by_path_len: summarize_map(&acc.by_len),
            by_theta: summarize_map(&acc.by_theta),
        })
        .collect();

    let all_fid: Vec<f64> = per_xi
        .iter()
        .flat_map(|a| a.fidelities.iter().copied())
        .collect();
    let all_len: Vec<f64> = per_xi
        .iter()
        .flat_map(|a| a.path_lens.iter().copied())
        .collect();
    let requests = per_xi.iter().map(|a| a.requests).sum();
    let blocked = per_xi.iter().map(|a| a.blocked).sum();
    let warnings = cfg
        .off_grid_xi()
        .into_iter()
        .map(|xi| {
            format!(
                "xi {xi} is not a multiple of 1/{}; HQ count is rounded",
                cfg.topology.side() * cfg.topology.side()
            )
        })
        .collect();
    SweepSummary {
        topology: cfg.topology,
        mapping: cfg.mapping,
        eta_l: cfg.eta_l,
        f_bar: cfg.f_bar,
        points,
        requests,
        blocked,
        blocking_probability: ratio(blocked, requests),
        mean_fidelity: stable_mean(&all_fid),
        mean_path_len: stable_mean(&all_len),
        min_path_len: all_len.iter().map(|&l| l as usize).min(),
        max_path_len: all_len.iter().map(|&l| l as usize).max(),
        warnings,
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Fidelity, path length and blocking statistics as xi sweeps `xi_values`.
pub fn sweep_xi(cfg: &ExperimentConfig) -> Result<SweepSummary> {
    let trials = run_trials(cfg)?;
    Ok(summarize(cfg, &trials))
}

/// Repeats the xi sweep for each LQ noise rate, keeping only the path
/// lengths in [`FIGURE_PATH_LENGTHS`].
pub fn sweep_eta_l(cfg: &ExperimentConfig, eta_l_values: &[f64]) -> Result<Vec<SweepSummary>> {
    if eta_l_values.is_empty() {
        return Err(Error::InvalidParameter("no eta_l values".into()));
    }
    eta_l_values
        .iter()
        .map(|&eta_l| {
            check_eta(eta_l)?;
            let cfg = ExperimentConfig {
                eta_l,
                ..cfg.clone()
            };
            let mut summary = sweep_xi(&cfg)?;
            for point in &mut summary.points {
                point
                    .by_path_len
                    .retain(|len, _| FIGURE_PATH_LENGTHS.contains(len));
            }
            Ok(summary)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterPoint {
    pub mapping: &'static str,
    pub xi: f64,
    pub theta: usize,
    pub fidelity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThetaMean {
    pub mapping: &'static str,
    pub xi: f64,
    pub theta: usize,
    pub mean_fidelity: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct NoiseAwarenessStudy {
    pub points: Vec<ScatterPoint>,
    pub means: Vec<ThetaMean>,
}

impl NoiseAwarenessStudy {
    pub fn mean(&self, mapping: &str, xi: f64, theta: usize) -> Option<f64> {
        self.means
            .iter()
            .find(|m| m.mapping == mapping && (m.xi - xi).abs() < 1e-12 && m.theta == theta)
            .map(|m| m.mean_fidelity)
    }
}

/// Fidelity against establishment order for each mapping, with no
/// fidelity threshold.
pub fn study_noise_awareness(
    cfg: &ExperimentConfig,
    mappings: &[Mapping],
) -> Result<NoiseAwarenessStudy> {
    if cfg.f_bar != 0.0 {
        return Err(Error::InvalidParameter(
            "noise-awareness study runs without a fidelity threshold (f_bar = 0)".into(),
        ));
    }
    let mut study = NoiseAwarenessStudy::default();
    for &mapping in mappings {
        let cfg = ExperimentConfig {
            mapping,
            ..cfg.clone()
        };
        let trials = run_trials(&cfg)?;
        for trial in &trials {
            for row in &trial.rows {
                if let Some(fidelity) = row.fidelity {
                    study.points.push(ScatterPoint {
                        mapping: mapping.name(),
                        xi: trial.xi,
                        theta: row.theta,
                        fidelity,
                    });
                }
            }
        }
        for point in summarize(&cfg, &trials).points {
            for (theta, stats) in point.by_theta {
                study.means.push(ThetaMean {
                    mapping: mapping.name(),
                    xi: point.xi,
                    theta,
                    mean_fidelity: stats.mean,
                    samples: stats.count,
                });
            }
        }
    }
    Ok(study)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockingPoint {
    pub mapping: &'static str,
    pub f_bar: f64,
    pub xi: f64,
    pub requests: usize,
    pub blocked: usize,
    pub blocking_probability: f64,
}

/// Blocking probability for every (mapping, threshold, xi) combination.
pub fn study_blocking(
    cfg: &ExperimentConfig,
    mappings: &[Mapping],
    f_bar_values: &[f64],
) -> Result<Vec<BlockingPoint>> {
    let mut out = Vec::new();
    for &mapping in mappings {
        for &f_bar in f_bar_values {
            let cfg = ExperimentConfig {
                mapping,
                f_bar,
                ..cfg.clone()
            };
            let summary = sweep_xi(&cfg)?;
            out.extend(summary.points.iter().map(|p| BlockingPoint {
                mapping: mapping.name(),
                f_bar,
                xi: p.xi,
                requests: p.requests,
                blocked: p.blocked,
                blocking_probability: p.blocking_probability,
            }));
        }
    }
    Ok(out)
}
