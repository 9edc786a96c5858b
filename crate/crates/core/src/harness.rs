//! Experiment driver: synthetic data, inversions and the table/figure
//! reproductions, all persisted as CSV/JSON with manifests.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::SolverOptions;
use crate::geometry::{Family, ScattererParams};
use crate::io;
use crate::mcmc::{chain_rng, run_chain, ChainConfig, ChainOutput, PriorSpec};
use crate::observation::{
    add_noise, forward_phaseless, ideal_observations, DataMisfit, DirectionGrid,
    MeasurementConfig, ObservationSet, Weighting,
};
use crate::stats::{column_moments, histogram, relative_error_pct, reported_names, summarize, SummaryReport};

/// Noise draws use streams from here up, chains use streams below it.
pub const NOISE_STREAM: u64 = 1 << 32;

pub const DEFAULT_BINS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum NoiseMode {
    /// Zero noise draw; `sigma_eta` still sets the misfit weights.
    Ideal,
    Sampled,
    Replicated { count: usize },
}

impl NoiseMode {
    fn label(self) -> &'static str {
        match self {
            NoiseMode::Ideal => "ideal",
            NoiseMode::Sampled => "sampled",
            NoiseMode::Replicated { .. } => "replicated",
        }
    }
}

fn default_bins() -> usize {
    DEFAULT_BINS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub family: Family,
    /// Exact scatterer in chain coordinates (`log r` for disks).
    pub exact: Vec<f64>,
    pub measurement: MeasurementConfig,
    pub sigma_eta: f64,
    pub noise: NoiseMode,
    pub prior: PriorSpec,
    pub chain: ChainConfig,
    #[serde(default)]
    pub solver: SolverOptions,
    #[serde(default)]
    pub weighting: Weighting,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_bins")]
    pub bins: usize,
}

impl ExperimentConfig {
    /// Disk centered at (1, 0.25) with radius 0.12, `k = 1`, `L = 32`, `M = 64`.
    pub fn disk() -> Self {
        Self {
            family: Family::Disk,
            exact: vec![1.0, 0.25, 0.12f64.ln()],
            measurement: MeasurementConfig {
                k: 1.0,
                l: 32,
                m: 64,
                grid: DirectionGrid::Disk,
            },
            sigma_eta: 0.03,
            noise: NoiseMode::Ideal,
            prior: PriorSpec::disk(),
            chain: ChainConfig::fixed(0.1, 9000, 5, 201),
            solver: SolverOptions::default(),
            weighting: Weighting::Observed,
            seed: 1,
            bins: DEFAULT_BINS,
        }
    }

    /// Crack from (2, 3) to (4, 5), `L = M = 40`, random proposal variance.
    pub fn crack() -> Self {
        Self {
            family: Family::Crack,
            exact: vec![2.0, 3.0, 4.0, 5.0],
            measurement: MeasurementConfig {
                l: 40,
                m: 40,
                ..Self::disk().measurement
            },
            prior: PriorSpec::crack(),
            chain: ChainConfig::random(0.1, 0.1, 18000, 5, 401),
            ..Self::disk()
        }
    }

    /// The benchmark kite at `k = 2`, `L = M = 50`, with a desk-sized chain.
    pub fn kite() -> Self {
        Self {
            family: Family::Kite,
            exact: vec![-0.65, -3.0, 1.0, 0.65, 1.5, 0.0],
            measurement: MeasurementConfig {
                k: 2.0,
                l: 50,
                m: 50,
                grid: DirectionGrid::Kite,
            },
            prior: PriorSpec::kite(),
            chain: ChainConfig::random(0.1, 0.1, 30000, 20, 500),
            ..Self::disk()
        }
    }

    pub fn preset(family: Family) -> Self {
        match family {
            Family::Disk => Self::disk(),
            Family::Crack => Self::crack(),
            Family::Kite => Self::kite(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let dim = self.family.dim();
        if self.exact.len() != dim {
            return Err(Error::Config(format!(
                "{} exact parameters need {dim} components, got {}",
                self.family,
                self.exact.len()
            )));
        }
        if self.prior.dim() != dim {
            return Err(Error::Config(format!(
                "prior mean has {} components, {} needs {dim}",
                self.prior.dim(),
                self.family
            )));
        }
        if self.bins == 0 {
            return Err(Error::Config("bins must be at least 1".into()));
        }
        if let NoiseMode::Replicated { count: 0 } = self.noise {
            return Err(Error::Config("replication count must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.sigma_eta) {
            return Err(Error::Config(format!("sigma_eta must lie in [0, 1), got {}", self.sigma_eta)));
        }
        self.measurement.validate()?;
        self.prior.validate()?;
        self.chain.validate()?;
        self.exact_params()?;
        Ok(())
    }

    pub fn exact_params(&self) -> Result<ScattererParams> {
        ScattererParams::from_vec(self.family, &self.exact)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let cfg: Self = io::read_json(path)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Canonical bytes hashed into manifests.
    pub fn canonical_json(&self) -> Result<Vec<u8>> {
        Ok(serde_json::to_vec(self)?)
    }

    /// Copy with `J1` and `J3` multiplied by `scale` (at least 1 and 2).
    pub fn scaled(&self, scale: f64) -> Self {
        let mut out = self.clone();
        out.chain.burn_in = scale_count(self.chain.burn_in, scale, 1);
        out.chain.count = scale_count(self.chain.count, scale, 2);
        if let NoiseMode::Replicated { count } = self.noise {
            out.noise = NoiseMode::Replicated {
                count: scale_count(count, scale, 1),
            };
        }
        out
    }
}

pub fn scale_count(n: usize, scale: f64, min: usize) -> usize {
    ((n as f64 * scale).round() as usize).max(min)
}

/// Noise-free data for the configured scatterer.
pub fn truth_matrix(cfg: &ExperimentConfig) -> Result<nalgebra::DMatrix<f64>> {
    forward_phaseless(&cfg.exact_params()?, &cfg.measurement, &cfg.solver)
}

/// Observations for replicate `replicate` (ignored in ideal mode).
pub fn observe(cfg: &ExperimentConfig, truth: &nalgebra::DMatrix<f64>, replicate: u64) -> Result<ObservationSet> {
    match cfg.noise {
        NoiseMode::Ideal => ideal_observations(truth, &cfg.measurement, cfg.sigma_eta),
        NoiseMode::Sampled | NoiseMode::Replicated { .. } => {
            let mut rng = chain_rng(cfg.seed, NOISE_STREAM + replicate);
            add_noise(truth, &cfg.measurement, cfg.sigma_eta, &mut rng)
        }
    }
}

/// Runs the configured chain on `obs` with chain stream `stream`.
pub fn invert(cfg: &ExperimentConfig, obs: &ObservationSet, stream: u64) -> Result<(ChainOutput, SummaryReport)> {
    if obs.config != cfg.measurement {
        return Err(Error::Dimension(format!(
            "observations were taken with {:?}, config expects {:?}",
            obs.config, cfg.measurement
        )));
    }
    let misfit = DataMisfit::new(cfg.family, obs, cfg.solver, cfg.weighting)?;
    let mut chain = cfg.chain.clone();
    chain.seed = cfg.seed;
    chain.stream = stream;
    let out = run_chain(&cfg.prior, &chain, &misfit)?;
    let summary = summarize(&out.selected, &cfg.exact_params()?, cfg.family == Family::Kite)?;
    Ok((out, summary))
}

fn observation_file(out: &Path, cfg: &ExperimentConfig, replicate: u64) -> PathBuf {
    match cfg.noise {
        NoiseMode::Replicated { .. } => out.join(format!("obs_{:04}.csv", replicate + 1)),
        _ => out.join("obs.csv"),
    }
}

/// Writes `truth.csv` and the observation file(s), each with a manifest.
pub fn cmd_simulate(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let hash = cfg.canonical_json()?;
    let truth = truth_matrix(cfg)?;
    let truth_path = out.join("truth.csv");
    io::write_truth(&truth_path, &truth)?;
    io::write_manifest(&truth_path, &hash, cfg.seed)?;
    let count = match cfg.noise {
        NoiseMode::Replicated { count } => count as u64,
        _ => 1,
    };
    let mut written = vec![truth_path];
    for r in 0..count {
        let obs = observe(cfg, &truth, r)?;
        let path = observation_file(out, cfg, r);
        let seed = (cfg.noise != NoiseMode::Ideal).then_some(cfg.seed);
        io::write_observations(&path, &obs, cfg.noise.label(), seed)?;
        io::write_manifest(&path, &hash, cfg.seed)?;
        written.push(path);
    }
    Ok(written)
}

fn write_summary_files(
    cfg: &ExperimentConfig,
    selected: &[Vec<f64>],
    summary: &SummaryReport,
    out: &Path,
    hash: &[u8],
) -> Result<()> {
    let path = out.join("summary.json");
    io::write_json(&path, summary)?;
    io::write_manifest(&path, hash, cfg.seed)?;
    for (i, name) in reported_names(cfg.family).iter().enumerate() {
        let column: Vec<f64> = selected
            .iter()
            .map(|s| if cfg.family == Family::Disk && i == 2 { s[i].exp() } else { s[i] })
            .collect();
        let path = out.join(format!("hist_{name}.csv"));
        io::write_histogram(&path, &histogram(&column, cfg.bins)?)?;
        io::write_manifest(&path, hash, cfg.seed)?;
    }
    Ok(())
}

/// Inverts one observation file: `chain.csv`, `summary.json`, histograms
/// and (when enabled) `trace.csv`.
pub fn cmd_invert(cfg: &ExperimentConfig, observations: &Path, out: &Path) -> Result<SummaryReport> {
    cfg.validate()?;
    let hash = cfg.canonical_json()?;
    let (obs, _) = io::read_observations(observations)?;
    let (chain, summary) = invert(cfg, &obs, cfg.chain.stream)?;
    let path = out.join("chain.csv");
    io::write_chain(&path, cfg.family, &chain.selected)?;
    io::write_manifest(&path, &hash, cfg.seed)?;
    if let Some(trace) = &chain.trace {
        let path = out.join("trace.csv");
        io::write_trace(&path, cfg.family, trace)?;
        io::write_manifest(&path, &hash, cfg.seed)?;
    }
    write_summary_files(cfg, &chain.selected, &summary, out, &hash)?;
    Ok(summary)
}

/// Summarizes an existing chain CSV against the configured exact scatterer.
pub fn cmd_stats(cfg: &ExperimentConfig, chain: &Path, out: &Path) -> Result<SummaryReport> {
    cfg.validate()?;
    let (family, selected) = io::read_chain(chain)?;
    if family != cfg.family {
        return Err(Error::Config(format!("chain holds {family} states, config is for {}", cfg.family)));
    }
    let summary = summarize(&selected, &cfg.exact_params()?, family == Family::Kite)?;
    write_summary_files(cfg, &selected, &summary, out, &cfg.canonical_json()?)?;
    Ok(summary)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Table1,
    Table2,
    Table3,
    Table4,
    Table5,
    Table6,
    Figure7,
    Figure8,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::Table1,
        Experiment::Table2,
        Experiment::Table3,
        Experiment::Table4,
        Experiment::Table5,
        Experiment::Table6,
        Experiment::Figure7,
        Experiment::Figure8,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Table1 => "table1",
            Experiment::Table2 => "table2",
            Experiment::Table3 => "table3",
            Experiment::Table4 => "table4",
            Experiment::Table5 => "table5",
            Experiment::Table6 => "table6",
            Experiment::Figure7 => "figure7",
            Experiment::Figure8 => "figure8",
        }
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::UnknownExperiment(s.to_string()))
    }
}

/// `(L, M)` rows of the accuracy table, in its printed order.
pub const TABLE1_GRID: [(usize, usize); 9] = [
    (32, 128),
    (32, 32),
    (32, 16),
    (64, 128),
    (32, 64),
    (16, 32),
    (64, 64),
    (16, 64),
    (8, 64),
];

pub const TABLE2_GRID: [(usize, usize); 3] = [(4, 2), (4, 8), (8, 4)];

pub const NOISE_LEVELS: [f64; 3] = [0.03, 0.06, 0.09];

pub const PAPER_REPLICATIONS: usize = 1000;

pub const TABLE5_SIZES: [usize; 4] = [5, 25, 50, 100];

/// Wavenumbers for the radius-only inversions.
pub const FIGURE7_K: [f64; 16] = [
    1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 90.0, 97.0, 100.0, 200.0, 2000.0, 1e4,
];

/// Wavenumbers for the data-vs-radius curves.
pub const FIGURE8_K: [f64; 8] = [0.5, 1.0, 2.0, 5.0, 10.0, 97.0, 200.0, 2000.0];

pub const FIGURE8_RADII: usize = 200;
pub const FIGURE8_MAX_RADIUS: f64 = 1.5;

/// Known center and exact radius of the radius-only problem.
pub const RADIUS_CENTER: (f64, f64) = (2.0, 2.0);
pub const RADIUS_EXACT: f64 = 1.0;
pub const RADIUS_PRIOR_MEAN: f64 = 0.5;

/// One experiment cell: a config plus the replicate index feeding both the
/// noise stream and the chain stream.
#[derive(Debug, Clone)]
struct Job {
    dir: PathBuf,
    cfg: ExperimentConfig,
    replicate: u64,
}

fn run_job(job: &Job) -> Result<SummaryReport> {
    let hash = job.cfg.canonical_json()?;
    let truth = truth_matrix(&job.cfg)?;
    let obs = observe(&job.cfg, &truth, job.replicate)?;
    let obs_path = job.dir.join("obs.csv");
    io::write_observations(&obs_path, &obs, job.cfg.noise.label(), Some(job.cfg.seed))?;
    io::write_manifest(&obs_path, &hash, job.cfg.seed)?;
    let (chain, summary) = invert(&job.cfg, &obs, job.replicate)?;
    let path = job.dir.join("chain.csv");
    io::write_chain(&path, job.cfg.family, &chain.selected)?;
    io::write_manifest(&path, &hash, job.cfg.seed)?;
    write_summary_files(&job.cfg, &chain.selected, &summary, &job.dir, &hash)?;
    Ok(summary)
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
}

fn run_jobs(jobs: &[Job], threads: usize) -> Result<Vec<SummaryReport>> {
    pool(threads)?.install(|| jobs.par_iter().map(run_job).collect())
}

fn cells(values: &[f64]) -> Vec<String> {
    values.iter().map(|&v| io::fmt_f64(v)).collect()
}

fn rel_cells(values: &[Option<f64>]) -> Vec<String> {
    values
        .iter()
        .map(|v| v.map_or_else(|| "n/a".to_string(), io::fmt_f64))
        .collect()
}

fn header(lead: &[&str], family: Family, groups: &[&str]) -> Vec<String> {
    let mut h: Vec<String> = lead.iter().map(|s| s.to_string()).collect();
    for g in groups {
        h.extend(reported_names(family).iter().map(|n| format!("{g}_{n}")));
    }
    h
}

/// Mean and spread of per-replicate reconstructions, in reported coordinates.
struct Aggregate {
    mean: Vec<f64>,
    sd: Vec<f64>,
    rel: Vec<Option<f64>>,
}

fn aggregate(reports: &[SummaryReport], exact: &ScattererParams) -> Result<Aggregate> {
    let means: Vec<Vec<f64>> = reports.iter().map(SummaryReport::means).collect();
    let (mean, sd) = if means.len() == 1 {
        (means[0].clone(), vec![0.0; means[0].len()])
    } else {
        column_moments(&means)?
    };
    let exact_shown = reports
        .first()
        .map(|r| r.components.iter().map(|c| c.exact).collect::<Vec<_>>())
        .unwrap_or_else(|| exact.to_vec());
    let rel = mean
        .iter()
        .zip(&exact_shown)
        .map(|(&m, &e)| relative_error_pct(m, e))
        .collect();
    Ok(Aggregate { mean, sd, rel })
}

/// Runs a named experiment under `out/<name>/` and returns the table CSV path.
pub fn cmd_experiment(name: &str, scale: f64, jobs: usize, out: &Path, seed: u64) -> Result<PathBuf> {
    let exp: Experiment = name.parse()?;
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::Config(format!("scale must be positive, got {scale}")));
    }
    let root = out.join(exp.name());
    let descriptor = serde_json::to_vec(&serde_json::json!({
        "experiment": exp.name(),
        "scale": scale,
        "seed": seed,
    }))?;
    let table = root.join(format!("{}.csv", exp.name()));
    let (head, rows) = match exp {
        Experiment::Table1 | Experiment::Table2 => {
            let grid: &[(usize, usize)] = if exp == Experiment::Table1 { &TABLE1_GRID } else { &TABLE2_GRID };
            let list: Vec<Job> = grid
                .iter()
                .map(|&(l, m)| {
                    let mut cfg = ExperimentConfig::disk().scaled(scale);
                    cfg.measurement.l = l;
                    cfg.measurement.m = m;
                    cfg.seed = seed;
                    Job { dir: root.join(format!("L{l}_M{m}")), cfg, replicate: 0 }
                })
                .collect();
            let reports = run_jobs(&list, jobs)?;
            let groups: &[&str] = if exp == Experiment::Table1 { &["mean", "sd", "relerr_pct"] } else { &["mean", "relerr_pct"] };
            let rows = grid
                .iter()
                .zip(&reports)
                .map(|(&(l, m), r)| {
                    let mut row = vec![l.to_string(), m.to_string()];
                    row.extend(cells(&r.means()));
                    if exp == Experiment::Table1 {
                        row.extend(cells(&r.sds()));
                    }
                    row.extend(rel_cells(&r.rel_errors()));
                    row
                })
                .collect();
            (header(&["L", "M"], Family::Disk, groups), rows)
        }
        Experiment::Table3 | Experiment::Table4 | Experiment::Table6 => {
            let base = match exp {
                Experiment::Table3 => ExperimentConfig::disk(),
                Experiment::Table4 => ExperimentConfig::crack(),
                _ => ExperimentConfig::kite(),
            };
            let family = base.family;
            let count = scale_count(PAPER_REPLICATIONS, scale, 1);
            let mut list = Vec::new();
            for (i, &sigma_eta) in NOISE_LEVELS.iter().enumerate() {
                for r in 0..count {
                    let mut cfg = base.scaled(scale);
                    cfg.sigma_eta = sigma_eta;
                    cfg.noise = NoiseMode::Replicated { count };
                    cfg.seed = seed;
                    let replicate = (i * count + r) as u64;
                    let dir = root.join(format!("sigma{:02}", (sigma_eta * 100.0).round() as u32)).join(format!("rep{:04}", r + 1));
                    list.push(Job { dir, cfg, replicate });
                }
            }
            let reports = run_jobs(&list, jobs)?;
            let exact = base.exact_params()?;
            let mut rows = Vec::new();
            for (i, &sigma_eta) in NOISE_LEVELS.iter().enumerate() {
                let chunk = &reports[i * count..(i + 1) * count];
                let agg = aggregate(chunk, &exact)?;
                let mut row = vec![io::fmt_f64(sigma_eta), count.to_string()];
                row.extend(cells(&agg.mean));
                if family == Family::Kite {
                    let hd: Vec<f64> = chunk.iter().filter_map(|r| r.hausdorff).collect();
                    let m = hd.iter().sum::<f64>() / hd.len() as f64;
                    let s = if hd.len() > 1 {
                        (hd.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (hd.len() - 1) as f64).sqrt()
                    } else {
                        0.0
                    };
                    row.extend(cells(&[m, s]));
                } else {
                    row.extend(cells(&agg.sd));
                    row.extend(rel_cells(&agg.rel));
                }
                rows.push(row);
            }
            let mut head = header(&["sigma_eta", "replications"], family, &["mean"]);
            if family == Family::Kite {
                head.extend(["mean_hd".to_string(), "sd_hd".to_string()]);
            } else {
                head.extend(header(&[], family, &["sd", "relerr_pct"]));
            }
            (head, rows)
        }
        Experiment::Table5 => {
            let list: Vec<Job> = TABLE5_SIZES
                .iter()
                .map(|&n| {
                    let mut cfg = ExperimentConfig::kite().scaled(scale);
                    cfg.measurement.l = n;
                    cfg.measurement.m = n;
                    cfg.seed = seed;
                    Job { dir: root.join(format!("L{n}")), cfg, replicate: 0 }
                })
                .collect();
            let reports = run_jobs(&list, jobs)?;
            let rows = TABLE5_SIZES
                .iter()
                .zip(&reports)
                .map(|(&n, r)| {
                    let mut row = vec![n.to_string()];
                    row.extend(cells(&r.means()));
                    row.push(io::fmt_f64(r.hausdorff.unwrap_or(f64::NAN)));
                    row
                })
                .collect();
            let mut head = header(&["L"], Family::Kite, &["mean"]);
            head.push("hd".to_string());
            (head, rows)
        }
        Experiment::Figure7 => {
            let pool = pool(jobs)?;
            let results: Vec<RadiusFit> = pool.install(|| {
                FIGURE7_K
                    .par_iter()
                    .enumerate()
                    .map(|(i, &k)| radius_inversion(k, scale, seed, i as u64, &root.join(format!("k{:02}", i + 1)), &descriptor))
                    .collect::<Result<_>>()
            })?;
            let rows = results
                .iter()
                .map(|f| {
                    let mut row = cells(&[f.k, f.mean, f.sd]);
                    row.push(rel_cells(&[relative_error_pct(f.mean, RADIUS_EXACT)]).remove(0));
                    row
                })
                .collect();
            (["k", "mean_r", "sd_r", "relerr_pct"].map(String::from).to_vec(), rows)
        }
        Experiment::Figure8 => {
            let mut rows = Vec::new();
            for &k in &FIGURE8_K {
                for (r, v) in radius_curve(k, FIGURE8_RADII, FIGURE8_MAX_RADIUS)? {
                    rows.push(cells(&[k, r, v]));
                }
            }
            (["k", "r", "modulus"].map(String::from).to_vec(), rows)
        }
    };
    let head: Vec<&str> = head.iter().map(String::as_str).collect();
    io::write_table(&table, &head, &rows)?;
    io::write_manifest(&table, &descriptor, seed)?;
    Ok(table)
}

/// `L = M = 1` on the disk grid: `d_0 = (0, -1)`, `d_1 = (0, 1)` and the
/// single observation direction `(0, -1)`.
pub fn radius_measurement(k: f64) -> MeasurementConfig {
    MeasurementConfig {
        k,
        l: 1,
        m: 1,
        grid: DirectionGrid::Disk,
    }
}

/// `|u(x_1)|` for the disk of radius `r` at the known center.
pub fn radius_data(k: f64, r: f64) -> Result<f64> {
    let params = ScattererParams::from_vec(Family::Disk, &[RADIUS_CENTER.0, RADIUS_CENTER.1, r.ln()])?;
    Ok(forward_phaseless(&params, &radius_measurement(k), &SolverOptions::default())?[(0, 0)])
}

/// `(r_i, |u(x_1)|)` for `r_i = i r_max / count`, `i = 1..=count`.
pub fn radius_curve(k: f64, count: usize, r_max: f64) -> Result<Vec<(f64, f64)>> {
    (1..=count)
        .map(|i| {
            let r = r_max * i as f64 / count as f64;
            radius_data(k, r).map(|v| (r, v))
        })
        .collect()
}

#[derive(Debug, Clone, Copy)]
pub struct RadiusFit {
    pub k: f64,
    pub mean: f64,
    pub sd: f64,
}

/// Radius-only inversion at the known center from one ideal datum.
pub fn radius_inversion(k: f64, scale: f64, seed: u64, stream: u64, dir: &Path, hash: &[u8]) -> Result<RadiusFit> {
    let config = radius_measurement(k);
    let truth = nalgebra::DMatrix::from_element(1, 1, radius_data(k, RADIUS_EXACT)?);
    let obs = ideal_observations(&truth, &config, 0.03)?;
    let misfit = DataMisfit::new(Family::Disk, &obs, SolverOptions::default(), Weighting::Observed)?;
    let prior = PriorSpec::new(vec![RADIUS_PRIOR_MEAN.ln()], 1.0)?;
    let mut chain = ChainConfig::fixed(0.1, scale_count(9000, scale, 1), 5, scale_count(201, scale, 2));
    chain.seed = seed;
    chain.stream = stream;
    let f = |z: &[f64]| misfit.misfit_vec(&[RADIUS_CENTER.0, RADIUS_CENTER.1, z[0]]);
    let out = run_chain(&prior, &chain, &f)?;
    let radii: Vec<Vec<f64>> = out.selected.iter().map(|s| vec![s[0].exp()]).collect();
    let (mean, sd) = column_moments(&radii)?;
    let path = dir.join("chain.csv");
    let rows: Vec<Vec<String>> = out.selected.iter().map(|s| cells(s)).collect();
    io::write_table(&path, &["log_r"], &rows)?;
    io::write_manifest(&path, hash, seed)?;
    Ok(RadiusFit { k, mean: mean[0], sd: sd[0] })
}
