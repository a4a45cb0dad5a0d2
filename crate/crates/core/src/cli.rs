//! Batch front end: parses flags (optionally layered over a `key=value`
//! config file), runs one study and writes its CSV tables plus a run
//! manifest into the output directory.
//!
//! Every manifest is itself a valid config file, so
//! `qrepnet <command> --config <out>/manifest.txt --out-dir <other>`
//! reproduces the data files byte for byte.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::experiment::{
    study_blocking, study_noise_awareness, sweep_eta_l, sweep_xi, xi_grid, ExperimentConfig,
    Mapping, SweepSummary, HQ_LABEL, LQ_LABEL,
};
use crate::fidelity::{check_eta, LinkFidelity};
use crate::rng::{substream, Purpose};
use crate::topology::{NetworkGraph, NoiseClass, Topology};

pub const SEED_ENV: &str = "QREPNET_SEED";
pub const MANIFEST_FILE: &str = "manifest.txt";
const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "qrepnet",
    version,
    about = "Entanglement routing studies on quantum repeater networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fidelity, path length and blocking vs xi on grid and cylinder cores.
    Topology(Flags),
    /// Fidelity vs xi for several LQ noise rates (cylinder core).
    LqSensitivity(Flags),
    /// Fidelity vs establishment order for noise-unaware and noise-aware routing.
    NoiseAwareness(Flags),
    /// Blocking probability vs xi for each mapping and fidelity threshold.
    Blocking(Flags),
    /// Export one network (classes drawn from the seed) as a node table and edge list.
    Graph(Flags),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Topology(_) => "topology",
            Command::LqSensitivity(_) => "lq-sensitivity",
            Command::NoiseAwareness(_) => "noise-awareness",
            Command::Blocking(_) => "blocking",
            Command::Graph(_) => "graph",
        }
    }

    fn flags(&self) -> &Flags {
        match self {
            Command::Topology(f)
            | Command::LqSensitivity(f)
            | Command::NoiseAwareness(f)
            | Command::Blocking(f)
            | Command::Graph(f) => f,
        }
    }
}

/// Flags shared by all commands. Repeatable flags also accept
/// comma-separated lists.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// `key=value` file with the same keys as the flags; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// grid or cylinder (repeatable).
    #[arg(long, value_delimiter = ',')]
    pub topology: Vec<String>,
    /// Side of the transport core.
    #[arg(long)]
    pub n: Option<usize>,
    /// Fraction of HQ transport nodes (repeatable).
    #[arg(long, value_delimiter = ',')]
    pub xi: Vec<f64>,
    /// Sweep xi from 0 to 1 in this step instead of listing values.
    #[arg(long)]
    pub xi_step: Option<f64>,
    #[arg(long)]
    pub eta_h: Option<f64>,
    /// LQ noise rate (repeatable).
    #[arg(long, value_delimiter = ',')]
    pub eta_l: Vec<f64>,
    /// Initial fidelity of each link.
    #[arg(long = "f")]
    pub link_f: Option<f64>,
    /// Fidelity threshold (repeatable).
    #[arg(long, value_delimiter = ',')]
    pub f_bar: Vec<f64>,
    /// unaware or aware (repeatable).
    #[arg(long, value_delimiter = ',')]
    pub mapping: Vec<String>,
    /// Weight of LQ nodes under the noise-aware mapping.
    #[arg(long)]
    pub aware_weight: Option<f64>,
    #[arg(long)]
    pub pair_draws: Option<usize>,
    #[arg(long)]
    pub class_draws: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

impl Flags {
    /// Fills every field not set here from `base`.
    pub fn or(self, base: Flags) -> Flags {
        fn list<T>(a: Vec<T>, b: Vec<T>) -> Vec<T> {
            if a.is_empty() {
                b
            } else {
                a
            }
        }
        Flags {
            config: self.config.or(base.config),
            topology: list(self.topology, base.topology),
            n: self.n.or(base.n),
            xi: list(self.xi, base.xi),
            xi_step: self.xi_step.or(base.xi_step),
            eta_h: self.eta_h.or(base.eta_h),
            eta_l: list(self.eta_l, base.eta_l),
            link_f: self.link_f.or(base.link_f),
            f_bar: list(self.f_bar, base.f_bar),
            mapping: list(self.mapping, base.mapping),
            aware_weight: self.aware_weight.or(base.aware_weight),
            pair_draws: self.pair_draws.or(base.pair_draws),
            class_draws: self.class_draws.or(base.class_draws),
            seed: self.seed.or(base.seed),
            out_dir: self.out_dir.or(base.out_dir),
        }
    }
}

/// Keys written by the manifest that carry no configuration.
const MANIFEST_ONLY_KEYS: [&str; 5] = [
    "command",
    "version",
    "started_unix",
    "finished_unix",
    "output",
];

/// Parses a `key=value` config file. Blank lines and `#` comments are
/// skipped; list keys may repeat or hold comma-separated values.
pub fn parse_config(text: &str) -> Result<Flags> {
    fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
        v.trim()
            .parse()
            .map_err(|_| Error::Usage(format!("config key '{key}': cannot parse '{v}'")))
    }
    fn nums<T: std::str::FromStr>(key: &str, v: &str, out: &mut Vec<T>) -> Result<()> {
        for item in v.split(',').filter(|s| !s.trim().is_empty()) {
            out.push(num(key, item)?);
        }
        Ok(())
    }
    fn words(v: &str, out: &mut Vec<String>) {
        out.extend(
            v.split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(String::from),
        );
    }

    let mut flags = Flags::default();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Usage(format!("config line {}: expected key=value", lineno + 1))
        })?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "topology" => words(value, &mut flags.topology),
            "n" => flags.n = Some(num(key, value)?),
            "xi" => nums(key, value, &mut flags.xi)?,
            "xi-step" => flags.xi_step = Some(num(key, value)?),
            "eta-h" => flags.eta_h = Some(num(key, value)?),
            "eta-l" => nums(key, value, &mut flags.eta_l)?,
            "f" => flags.link_f = Some(num(key, value)?),
            "f-bar" => nums(key, value, &mut flags.f_bar)?,
            "mapping" => words(value, &mut flags.mapping),
            "aware-weight" => flags.aware_weight = Some(num(key, value)?),
            "pair-draws" => flags.pair_draws = Some(num(key, value)?),
            "class-draws" => flags.class_draws = Some(num(key, value)?),
            "seed" => flags.seed = Some(num(key, value)?),
            "out-dir" => flags.out_dir = Some(PathBuf::from(value)),
            k if MANIFEST_ONLY_KEYS.contains(&k) => {}
            other => return Err(Error::Usage(format!("unknown config key '{other}'"))),
        }
    }
    Ok(flags)
}

/// Fully resolved parameters of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub command: &'static str,
    pub topologies: Vec<Topology>,
    pub n: usize,
    pub xi: Vec<f64>,
    pub eta_h: f64,
    pub eta_l: Vec<f64>,
    pub link_f: f64,
    pub f_bar: Vec<f64>,
    pub mappings: Vec<Mapping>,
    pub aware_weight: f64,
    pub pair_draws: usize,
    pub class_draws: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl Settings {
    /// Applies the command's defaults to `flags`. `env_seed` is the raw
    /// value of the seed environment variable, used only when neither flag
    /// nor config file give a seed.
    pub fn resolve(command: &'static str, flags: &Flags, env_seed: Option<&str>) -> Result<Self> {
        let defaults = ExperimentConfig::default();
        let n = flags.n.unwrap_or(defaults.topology.side());

        let topology_names: Vec<&str> = if flags.topology.is_empty() {
            match command {
                "topology" => vec!["grid", "cylinder"],
                "graph" => vec!["grid"],
                _ => vec!["cylinder"],
            }
        } else {
            flags.topology.iter().map(String::as_str).collect()
        };
        let topologies = topology_names
            .into_iter()
            .map(|name| Topology::from_name(name, n))
            .collect::<Result<Vec<_>>>()?;

        let xi = if !flags.xi.is_empty() {
            flags.xi.clone()
        } else if let Some(step) = flags.xi_step {
            if !(step > 0.0 && step <= 1.0) {
                return Err(Error::Usage(format!("--xi-step {step} outside (0, 1]")));
            }
            let steps = (1.0 / step + 1e-9).floor() as usize;
            (0..=steps).map(|k| (k as f64 * step).min(1.0)).collect()
        } else if command == "noise-awareness" {
            vec![0.0, 0.2, 0.4, 0.6, 0.8, 1.0]
        } else if command == "graph" {
            vec![0.6]
        } else {
            xi_grid(n)
        };
        if let Some(bad) = xi.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::Usage(format!("xi {bad} outside [0, 1]")));
        }

        let eta_h = flags.eta_h.unwrap_or(defaults.eta_h);
        let eta_l = if flags.eta_l.is_empty() {
            if command == "lq-sensitivity" {
                vec![0.99, 0.8]
            } else {
                vec![defaults.eta_l]
            }
        } else {
            flags.eta_l.clone()
        };
        check_eta(eta_h)?;
        for &eta in &eta_l {
            check_eta(eta)?;
        }
        let link_f = flags.link_f.unwrap_or(defaults.link_f);
        LinkFidelity::new(link_f)?;

        let f_bar = if flags.f_bar.is_empty() {
            if command == "blocking" {
                vec![0.53, 0.7, 0.8]
            } else {
                vec![0.0]
            }
        } else {
            flags.f_bar.clone()
        };
        if let Some(bad) = f_bar.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::Usage(format!("f-bar {bad} outside [0, 1]")));
        }
        if command == "noise-awareness" && f_bar.iter().any(|&f| f != 0.0) {
            return Err(Error::Usage(
                "noise-awareness runs without a fidelity threshold; drop --f-bar".into(),
            ));
        }

        let aware_weight = flags.aware_weight.unwrap_or(Mapping::DEFAULT_AWARE_WEIGHT);
        if !(aware_weight.is_finite() && aware_weight > 0.0) {
            return Err(Error::Usage(format!(
                "--aware-weight must be positive, got {aware_weight}"
            )));
        }
        let mapping_names: Vec<&str> = if flags.mapping.is_empty() {
            match command {
                "noise-awareness" | "blocking" => vec!["unaware", "aware"],
                _ => vec!["unaware"],
            }
        } else {
            flags.mapping.iter().map(String::as_str).collect()
        };
        let mappings = mapping_names
            .into_iter()
            .map(|name| match name {
                "unaware" => Ok(Mapping::NoiseUnaware),
                "aware" => Ok(Mapping::NoiseAware {
                    lq_weight: aware_weight,
                }),
                other => Err(Error::Usage(format!(
                    "unknown mapping '{other}' (expected unaware or aware)"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;

        let seed = match (flags.seed, env_seed) {
            (Some(seed), _) => seed,
            (None, Some(raw)) => raw.trim().parse().map_err(|_| {
                Error::Usage(format!("{SEED_ENV}='{raw}' is not an unsigned integer"))
            })?,
            (None, None) => DEFAULT_SEED,
        };

        let settings = Self {
            command,
            topologies,
            n,
            xi,
            eta_h,
            eta_l,
            link_f,
            f_bar,
            mappings,
            aware_weight,
            pair_draws: flags.pair_draws.unwrap_or(defaults.num_pair_draws),
            class_draws: flags.class_draws.unwrap_or(defaults.num_class_draws),
            seed,
            out_dir: flags
                .out_dir
                .clone()
                .unwrap_or_else(|| PathBuf::from("out")),
        };
        for &topology in &settings.topologies {
            settings.experiment(topology).validate()?;
        }
        Ok(settings)
    }

    /// Experiment configuration using the first value of every list.
    pub fn experiment(&self, topology: Topology) -> ExperimentConfig {
        ExperimentConfig {
            topology,
            xi_values: self.xi.clone(),
            eta_h: self.eta_h,
            eta_l: self.eta_l[0],
            link_f: self.link_f,
            f_bar: self.f_bar[0],
            mapping: self.mappings[0],
            num_pair_draws: self.pair_draws,
            num_class_draws: self.class_draws,
            seed: self.seed,
        }
    }

    /// The settings as config-file lines.
    pub fn config_lines(&self) -> Vec<String> {
        fn join<T: ToString>(items: &[T]) -> String {
            items
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(",")
        }
        let topologies: Vec<&str> = self.topologies.iter().map(|t| t.name()).collect();
        let mappings: Vec<&str> = self.mappings.iter().map(|m| m.name()).collect();
        vec![
            format!("topology={}", topologies.join(",")),
            format!("n={}", self.n),
            format!("xi={}", join(&self.xi)),
            format!("eta-h={}", self.eta_h),
            format!("eta-l={}", join(&self.eta_l)),
            format!("f={}", self.link_f),
            format!("f-bar={}", join(&self.f_bar)),
            format!("mapping={}", mappings.join(",")),
            format!("aware-weight={}", self.aware_weight),
            format!("pair-draws={}", self.pair_draws),
            format!("class-draws={}", self.class_draws),
            format!("seed={}", self.seed),
            format!("out-dir={}", self.out_dir.display()),
        ]
    }
}

/// What a run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub outputs: Vec<PathBuf>,
    pub manifest: PathBuf,
    pub warnings: Vec<String>,
}

fn fmt6(x: f64) -> String {
    format!("{x:.6}")
}

struct Table {
    path: PathBuf,
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    fn new(dir: &Path, name: &str, header: &[&str]) -> Result<Self> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(header)?;
        Ok(Self {
            path: dir.join(name),
            writer,
        })
    }

    fn row(&mut self, fields: &[String]) -> Result<()> {
        self.writer.write_record(fields)?;
        Ok(())
    }

    fn finish(self) -> Result<PathBuf> {
        let bytes = self
            .writer
            .into_inner()
            .map_err(|e| Error::io(&self.path, e.into_error()))?;
        fs::write(&self.path, bytes).map_err(|e| Error::io(&self.path, e))?;
        Ok(self.path)
    }
}

const FIDELITY_BY_LENGTH_HEADER: [&str; 9] = [
    "xi",
    "path_node_count",
    "mean_fidelity",
    "min",
    "q1",
    "median",
    "q3",
    "max",
    "n_samples",
];

fn fidelity_by_length_rows(summary: &SweepSummary, lead: &str, table: &mut Table) -> Result<()> {
    for point in &summary.points {
        for (len, s) in &point.by_path_len {
            table.row(&[
                lead.to_string(),
                fmt6(point.xi),
                len.to_string(),
                fmt6(s.mean),
                fmt6(s.min),
                fmt6(s.q1),
                fmt6(s.median),
                fmt6(s.q3),
                fmt6(s.max),
                s.count.to_string(),
            ])?;
        }
    }
    Ok(())
}

fn header_with(lead: &'static str) -> Vec<&'static str> {
    std::iter::once(lead)
        .chain(FIDELITY_BY_LENGTH_HEADER)
        .collect()
}

fn cmd_topology_study(s: &Settings, warnings: &mut Vec<String>) -> Result<Vec<PathBuf>> {
    let mut by_len = Table::new(&s.out_dir, "fidelity_vs_xi.csv", &header_with("topology"))?;
    let mut boxes = Table::new(
        &s.out_dir,
        "fidelity_box.csv",
        &[
            "topology",
            "xi",
            "mean_fidelity",
            "min",
            "q1",
            "median",
            "q3",
            "max",
            "lower_whisker",
            "upper_whisker",
            "n_outliers",
            "n_samples",
            "blocking_prob",
            "mean_path_len",
        ],
    )?;
    let mut summary_table = Table::new(
        &s.out_dir,
        "summary.csv",
        &[
            "topology",
            "mean_fidelity_overall",
            "mean_path_len",
            "blocking_prob",
        ],
    )?;
    for &topology in &s.topologies {
        let summary = sweep_xi(&s.experiment(topology))?;
        warnings.extend(summary.warnings.iter().cloned());
        fidelity_by_length_rows(&summary, topology.name(), &mut by_len)?;
        for point in &summary.points {
            if let Some(b) = &point.all {
                boxes.row(&[
                    topology.name().to_string(),
                    fmt6(point.xi),
                    fmt6(b.mean),
                    fmt6(b.min),
                    fmt6(b.q1),
                    fmt6(b.median),
                    fmt6(b.q3),
                    fmt6(b.max),
                    fmt6(b.lower_whisker),
                    fmt6(b.upper_whisker),
                    b.outliers.len().to_string(),
                    b.count.to_string(),
                    fmt6(point.blocking_probability),
                    fmt6(point.mean_path_len.unwrap_or(f64::NAN)),
                ])?;
            }
        }
        summary_table.row(&[
            topology.name().to_string(),
            fmt6(summary.mean_fidelity.unwrap_or(f64::NAN)),
            fmt6(summary.mean_path_len.unwrap_or(f64::NAN)),
            fmt6(summary.blocking_probability),
        ])?;
    }
    Ok(vec![
        by_len.finish()?,
        boxes.finish()?,
        summary_table.finish()?,
    ])
}

fn cmd_lq_sensitivity(s: &Settings, warnings: &mut Vec<String>) -> Result<Vec<PathBuf>> {
    let mut table = Table::new(&s.out_dir, "lq_sensitivity.csv", &{
        let mut h = vec!["topology"];
        h.extend(header_with("eta_l"));
        h
    })?;
    for &topology in &s.topologies {
        for summary in sweep_eta_l(&s.experiment(topology), &s.eta_l)? {
            warnings.extend(summary.warnings.iter().cloned());
            for point in &summary.points {
                for (len, b) in &point.by_path_len {
                    table.row(&[
                        topology.name().to_string(),
                        fmt6(summary.eta_l),
                        fmt6(point.xi),
                        len.to_string(),
                        fmt6(b.mean),
                        fmt6(b.min),
                        fmt6(b.q1),
                        fmt6(b.median),
                        fmt6(b.q3),
                        fmt6(b.max),
                        b.count.to_string(),
                    ])?;
                }
            }
        }
    }
    Ok(vec![table.finish()?])
}

fn cmd_noise_awareness(s: &Settings) -> Result<Vec<PathBuf>> {
    let mut scatter = Table::new(
        &s.out_dir,
        "noise_awareness_scatter.csv",
        &["topology", "mapping", "xi", "theta", "fidelity"],
    )?;
    let mut means = Table::new(
        &s.out_dir,
        "noise_awareness_means.csv",
        &[
            "topology",
            "mapping",
            "xi",
            "theta",
            "mean_fidelity",
            "n_samples",
        ],
    )?;
    for &topology in &s.topologies {
        let study = study_noise_awareness(&s.experiment(topology), &s.mappings)?;
        for p in &study.points {
            scatter.row(&[
                topology.name().to_string(),
                p.mapping.to_string(),
                fmt6(p.xi),
                p.theta.to_string(),
                fmt6(p.fidelity),
            ])?;
        }
        for m in &study.means {
            means.row(&[
                topology.name().to_string(),
                m.mapping.to_string(),
                fmt6(m.xi),
                m.theta.to_string(),
                fmt6(m.mean_fidelity),
                m.samples.to_string(),
            ])?;
        }
    }
    Ok(vec![scatter.finish()?, means.finish()?])
}

fn cmd_blocking(s: &Settings) -> Result<Vec<PathBuf>> {
    let mut table = Table::new(
        &s.out_dir,
        "blocking.csv",
        &["topology", "mapping", "f_bar", "xi", "blocking_prob"],
    )?;
    for &topology in &s.topologies {
        for p in study_blocking(&s.experiment(topology), &s.mappings, &s.f_bar)? {
            table.row(&[
                topology.name().to_string(),
                p.mapping.to_string(),
                fmt6(p.f_bar),
                fmt6(p.xi),
                fmt6(p.blocking_probability),
            ])?;
        }
    }
    Ok(vec![table.finish()?])
}

fn cmd_graph(s: &Settings) -> Result<Vec<PathBuf>> {
    let hq = NoiseClass::new(HQ_LABEL, s.eta_h)?;
    let lq = NoiseClass::new(LQ_LABEL, s.eta_l[0])?;
    let mut outputs = Vec::new();
    for &topology in &s.topologies {
        let mut graph = NetworkGraph::build(topology)?;
        let mut rng = substream(s.seed, Purpose::Trial, s.xi[0].to_bits(), 0, 0);
        graph.assign_classes(s.xi[0], &hq, &lq, &mut rng)?;
        let path = s.out_dir.join(format!("{}_graph.txt", topology.name()));
        let mut buf = Vec::new();
        graph
            .write_edge_list(&mut buf)
            .map_err(|e| Error::io(&path, e))?;
        fs::write(&path, buf).map_err(|e| Error::io(&path, e))?;
        outputs.push(path);
    }
    Ok(outputs)
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

fn write_manifest(s: &Settings, started: u64, outputs: &[PathBuf]) -> Result<PathBuf> {
    let path = s.out_dir.join(MANIFEST_FILE);
    let mut text = Vec::new();
    let mut push = |line: String| writeln!(text, "{line}").expect("write to Vec");
    push("# qrepnet run manifest; usable as --config".into());
    push(format!("command={}", s.command));
    push(format!("version={}", env!("CARGO_PKG_VERSION")));
    for line in s.config_lines() {
        push(line);
    }
    push(format!("started_unix={started}"));
    push(format!("finished_unix={}", unix_now()));
    for out in outputs {
        let name = out.file_name().map_or_else(
            || out.display().to_string(),
            |n| n.to_string_lossy().into_owned(),
        );
        push(format!("output={name}"));
    }
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Runs an already parsed command.
pub fn execute(command: &Command, env_seed: Option<&str>) -> Result<RunReport> {
    let cli_flags = command.flags().clone();
    let flags = match &cli_flags.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            cli_flags.or(parse_config(&text)?)
        }
        None => cli_flags,
    };
    let settings = Settings::resolve(command.name(), &flags, env_seed)?;
    fs::create_dir_all(&settings.out_dir).map_err(|e| Error::io(&settings.out_dir, e))?;

    let started = unix_now();
    let mut warnings = Vec::new();
    let outputs = match command {
        Command::Topology(_) => cmd_topology_study(&settings, &mut warnings)?,
        Command::LqSensitivity(_) => cmd_lq_sensitivity(&settings, &mut warnings)?,
        Command::NoiseAwareness(_) => cmd_noise_awareness(&settings)?,
        Command::Blocking(_) => cmd_blocking(&settings)?,
        Command::Graph(_) => cmd_graph(&settings)?,
    };
    warnings.dedup();
    let manifest = write_manifest(&settings, started, &outputs)?;
    Ok(RunReport {
        outputs,
        manifest,
        warnings,
    })
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Result<RunReport>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Error::Usage(e.to_string()))?;
    let env_seed = std::env::var(SEED_ENV).ok();
    execute(&cli.command, env_seed.as_deref())
}

/// Process entry point: exit code 0 iff every output was written, 2 for
/// usage errors, 1 for anything else.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let env_seed = std::env::var(SEED_ENV).ok();
    match execute(&cli.command, env_seed.as_deref()) {
        Ok(report) => {
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            for out in report.outputs.iter().chain([&report.manifest]) {
                println!("wrote {}", out.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Usage(_) | Error::InvalidParameter(_) | Error::Domain(_) => 2,
                Error::Io { .. } | Error::Csv(_) => 1,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags(args: &[&str]) -> Flags {
        let mut argv = vec!["qrepnet", "topology"];
        argv.extend_from_slice(args);
        match Cli::try_parse_from(argv).unwrap().command {
            Command::Topology(f) => f,
            _ => unreachable!(),
        }
    }

    #[test]
    fn topology_defaults() {
        let s = Settings::resolve("topology", &Flags::default(), None).unwrap();
        assert_eq!(s.topologies, vec![Topology::Grid(5), Topology::Cylinder(5)]);
        assert_eq!(s.xi.len(), 26);
        assert_eq!(s.f_bar, vec![0.0]);
        assert_eq!(s.mappings, vec![Mapping::NoiseUnaware]);
        assert_eq!((s.pair_draws, s.class_draws, s.seed), (5, 100, 1));
    }

    #[test]
    fn command_specific_defaults() {
        let s = Settings::resolve("lq-sensitivity", &Flags::default(), None).unwrap();
        assert_eq!(s.eta_l, vec![0.99, 0.8]);
        assert_eq!(s.topologies, vec![Topology::Cylinder(5)]);
        let s = Settings::resolve("blocking", &Flags::default(), None).unwrap();
        assert_eq!(s.f_bar, vec![0.53, 0.7, 0.8]);
        assert_eq!(s.mappings.len(), 2);
        assert_eq!(s.mappings[1], Mapping::NoiseAware { lq_weight: 100.0 });
    }

    #[test]
    fn repeatable_and_comma_lists() {
        let f = flags(&[
            "--xi", "0", "--xi", "1", "--eta-l", "0.9,0.8", "--f", "0.99",
        ]);
        assert_eq!(f.xi, vec![0.0, 1.0]);
        assert_eq!(f.eta_l, vec![0.9, 0.8]);
        assert_eq!(f.link_f, Some(0.99));
    }

    #[test]
    fn xi_step() {
        let s = Settings::resolve("topology", &flags(&["--xi-step", "0.25"]), None).unwrap();
        assert_eq!(s.xi, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(Settings::resolve("topology", &flags(&["--xi-step", "0"]), None).is_err());
    }

    #[test]
    fn domain_gates() {
        assert!(Settings::resolve("lq-sensitivity", &flags(&["--eta-l", "0.6"]), None).is_ok());
        assert!(matches!(
            Settings::resolve("lq-sensitivity", &flags(&["--eta-l", "0.4"]), None),
            Err(Error::Domain(_))
        ));
        assert!(Settings::resolve("topology", &flags(&["--f", "0.2"]), None).is_err());
        assert!(Settings::resolve("topology", &flags(&["--n", "1"]), None).is_err());
        assert!(Settings::resolve("topology", &flags(&["--topology", "torus"]), None).is_err());
        assert!(Settings::resolve("topology", &flags(&["--mapping", "smart"]), None).is_err());
        assert!(Settings::resolve("noise-awareness", &flags(&["--f-bar", "0.5"]), None).is_err());
    }

    #[test]
    fn seed_precedence() {
        let s = Settings::resolve("topology", &Flags::default(), Some("77")).unwrap();
        assert_eq!(s.seed, 77);
        let s = Settings::resolve("topology", &flags(&["--seed", "5"]), Some("77")).unwrap();
        assert_eq!(s.seed, 5);
        assert!(Settings::resolve("topology", &Flags::default(), Some("abc")).is_err());
    }

    #[test]
    fn config_file_and_override() {
        let file = parse_config(
            "# comment\nn=4\nxi=0, 0.5\nxi=1\nmapping=aware\nseed=9\ncommand=topology\n",
        )
        .unwrap();
        assert_eq!(file.xi, vec![0.0, 0.5, 1.0]);
        let merged = flags(&["--seed", "3"]).or(file);
        let s = Settings::resolve("topology", &merged, None).unwrap();
        assert_eq!(s.seed, 3);
        assert_eq!(s.n, 4);
        assert_eq!(s.mappings, vec![Mapping::NoiseAware { lq_weight: 100.0 }]);
        assert!(parse_config("bogus=1").is_err());
        assert!(parse_config("n=x").is_err());
        assert!(parse_config("no equals sign").is_err());
    }

    #[test]
    fn config_lines_round_trip() {
        let s = Settings::resolve(
            "blocking",
            &flags(&["--xi", "0.04,0.6", "--aware-weight", "50", "--seed", "11"]),
            None,
        )
        .unwrap();
        let text = s.config_lines().join("\n");
        let back = Settings::resolve("blocking", &parse_config(&text).unwrap(), None).unwrap();
        assert_eq!(s, back);
    }
}
