//! Experiment configuration, orchestration and file output.
//!
//! A convergence run evolves `ensemble` paired circuit samples, one noiseless
//! stream (pure states) plus one damped stream per nonzero γ (density
//! matrices), and reports `D(t)` against a Haar reference at each recorded
//! depth. Samples are split into a fixed number of contiguous groups that are
//! processed one after another; each group is itself evaluated in parallel
//! chunks and merged in index order. The groups double as checkpoints and as
//! the jackknife blocks for error bars.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bloch::{
    expansion_profile, lambda_factor, theta_c_search, DampingParameter, ExpansionProfile,
};
use crate::circuits::{
    ensemble_realization, noisy_probs, record_depths, unitary_probs, NoisePlacement, NoiseSpec,
};
use crate::error::{Error, Result};
use crate::majorization::{
    cumulants, distance_jackknife_se, distance_to_haar, haar_reference, HaarReference,
    SdlAccumulator, CHUNK,
};
use crate::quantum::InitialState;

pub const DEFAULT_M_HAAR: usize = 3000;
pub const DEFAULT_SEED: u64 = 20_260_116;
pub const DEFAULT_GAMMAS: [f64; 5] = [0.0, 0.001, 0.005, 0.01, 0.05];
/// Jackknife blocks (and checkpoint units) per run.
pub const GROUPS: usize = 10;
/// Largest register the dense density-matrix path accepts.
pub const MAX_QUBITS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// n=5, M=500, T=200, M_Haar=2000.
    Desk,
    /// n=6, M=3000, T=200, M_Haar=3000.
    Paper,
}

/// Partially specified configuration, as read from a JSON file or CLI flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigInput {
    pub preset: Option<Preset>,
    pub n: Option<usize>,
    pub depth: Option<usize>,
    pub ensemble: Option<usize>,
    pub gammas: Option<Vec<f64>>,
    pub init: Option<InitialState>,
    pub master_seed: Option<u64>,
    pub haar_seed: Option<u64>,
    pub m_haar: Option<usize>,
    pub record_stride: Option<usize>,
    pub output_path: Option<String>,
    pub noise_placement: Option<NoisePlacement>,
}

impl ConfigInput {
    /// Fields set in `over` win.
    pub fn overlay(self, over: ConfigInput) -> ConfigInput {
        ConfigInput {
            preset: over.preset.or(self.preset),
            n: over.n.or(self.n),
            depth: over.depth.or(self.depth),
            ensemble: over.ensemble.or(self.ensemble),
            gammas: over.gammas.or(self.gammas),
            init: over.init.or(self.init),
            master_seed: over.master_seed.or(self.master_seed),
            haar_seed: over.haar_seed.or(self.haar_seed),
            m_haar: over.m_haar.or(self.m_haar),
            record_stride: over.record_stride.or(self.record_stride),
            output_path: over.output_path.or(self.output_path),
            noise_placement: over.noise_placement.or(self.noise_placement),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub depth: usize,
    pub ensemble: usize,
    pub gammas: Vec<f64>,
    pub init: InitialState,
    pub master_seed: u64,
    pub haar_seed: u64,
    pub m_haar: usize,
    pub record_stride: usize,
    pub noise_placement: NoisePlacement,
    pub output_path: String,
}

impl ExperimentConfig {
    pub fn preset(p: Preset) -> Self {
        let (n, ensemble, m_haar) = match p {
            Preset::Desk => (5, 500, 2000),
            Preset::Paper => (6, 3000, DEFAULT_M_HAAR),
        };
        Self {
            n,
            depth: 200,
            ensemble,
            gammas: DEFAULT_GAMMAS.to_vec(),
            init: InitialState::AllZeros,
            master_seed: DEFAULT_SEED,
            haar_seed: DEFAULT_SEED,
            m_haar,
            record_stride: 1,
            noise_placement: NoisePlacement::IdleOnly,
            output_path: "results".into(),
        }
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn record_at(&self) -> Vec<usize> {
        record_depths(self.depth, self.record_stride)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.n > MAX_QUBITS {
            return Err(Error::config(
                "n",
                format!("{} not in [2, {MAX_QUBITS}]", self.n),
            ));
        }
        if self.ensemble < 2 {
            return Err(Error::config("ensemble", format!("{} < 2", self.ensemble)));
        }
        if self.gammas.is_empty() {
            return Err(Error::config("gammas", "empty list"));
        }
        for (i, g) in self.gammas.iter().enumerate() {
            if !(0.0..=1.0).contains(g) {
                return Err(Error::config("gammas", format!("{g} outside [0, 1]")));
            }
            if self.gammas[..i].contains(g) {
                return Err(Error::config("gammas", format!("{g} listed twice")));
            }
        }
        if self.m_haar < 2 {
            return Err(Error::config("m_haar", format!("{} < 2", self.m_haar)));
        }
        if self.record_stride == 0 {
            return Err(Error::config("record_stride", "must be at least 1"));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON of every field except `output_path`,
    /// truncated to 16 hex digits.
    pub fn content_hash(&self) -> String {
        let mut canon = self.clone();
        canon.output_path.clear();
        let json = serde_json::to_string(&canon).expect("config serializes");
        hex::encode(&Sha256::digest(json.as_bytes())[..8])
    }
}

/// Fills defaults from the chosen preset (`paper` if none) and validates.
pub fn validate_and_echo(input: ConfigInput) -> Result<(ExperimentConfig, String)> {
    let mut cfg = ExperimentConfig::preset(input.preset.unwrap_or(Preset::Paper));
    if let Some(v) = input.n {
        cfg.n = v;
    }
    if let Some(v) = input.depth {
        cfg.depth = v;
    }
    if let Some(v) = input.ensemble {
        cfg.ensemble = v;
    }
    if let Some(v) = input.gammas {
        cfg.gammas = v;
    }
    if let Some(v) = input.init {
        cfg.init = v;
    }
    if let Some(v) = input.master_seed {
        cfg.master_seed = v;
        cfg.haar_seed = v;
    }
    if let Some(v) = input.haar_seed {
        cfg.haar_seed = v;
    }
    if let Some(v) = input.m_haar {
        cfg.m_haar = v;
    }
    if let Some(v) = input.record_stride {
        cfg.record_stride = v;
    }
    if let Some(v) = input.noise_placement {
        cfg.noise_placement = v;
    }
    if let Some(v) = input.output_path {
        cfg.output_path = v;
    }
    cfg.validate()?;
    let hash = cfg.content_hash();
    Ok((cfg, hash))
}

/// `D(t)` of one stream at one recorded depth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResultRecord {
    pub depth: usize,
    pub gamma: f64,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    pub gamma: f64,
    pub depths: Vec<usize>,
    pub distance: Vec<f64>,
    /// Jackknife standard error of `distance` over the sample groups.
    pub stderr: Vec<f64>,
    /// `sdl[r][k]` at `depths[r]`.
    pub sdl: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceResult {
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub haar: HaarReference,
    pub series: Vec<Series>,
    pub wall_time_s: f64,
}

impl ConvergenceResult {
    pub fn records(&self) -> Vec<ResultRecord> {
        self.series
            .iter()
            .flat_map(|s| {
                s.depths
                    .iter()
                    .zip(&s.distance)
                    .map(|(&depth, &distance)| ResultRecord {
                        depth,
                        gamma: s.gamma,
                        distance,
                    })
            })
            .collect()
    }

    pub fn series_for(&self, gamma: f64) -> Option<&Series> {
        self.series.iter().find(|s| s.gamma == gamma)
    }

    /// CSV: one `# config_hash=…` comment line, then `depth,gamma,distance`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "# config_hash={} master_seed={} haar_seed={}",
            self.config_hash, self.config.master_seed, self.haar.seed
        )?;
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["depth", "gamma", "distance"])?;
        for r in self.records() {
            wtr.write_record([
                r.depth.to_string(),
                r.gamma.to_string(),
                r.distance.to_string(),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Accumulators for one group of samples: `[stream][record]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupState {
    pub first_sample: usize,
    pub end_sample: usize,
    pub count: Vec<Vec<usize>>,
    pub mean: Vec<Vec<Vec<f64>>>,
    pub m2: Vec<Vec<Vec<f64>>>,
}

impl GroupState {
    fn from_accumulators(first: usize, end: usize, accs: &[Vec<SdlAccumulator>]) -> Self {
        let (count, (mean, m2)) = accs
            .iter()
            .map(|stream| {
                let parts = stream.iter().map(|a| a.to_parts());
                let (c, mm): (Vec<_>, Vec<_>) = parts.map(|(c, m, s)| (c, (m, s))).unzip();
                let (m, s): (Vec<_>, Vec<_>) = mm.into_iter().unzip();
                (c, (m, s))
            })
            .unzip();
        Self {
            first_sample: first,
            end_sample: end,
            count,
            mean,
            m2,
        }
    }

    fn accumulators(&self) -> Vec<Vec<SdlAccumulator>> {
        self.count
            .iter()
            .zip(&self.mean)
            .zip(&self.m2)
            .map(|((c, m), s)| {
                c.iter()
                    .zip(m)
                    .zip(s)
                    .map(|((&c, m), s)| SdlAccumulator::from_parts(c, m.clone(), s.clone()))
                    .collect()
            })
            .collect()
    }
}

/// Completed groups of a run, sufficient to resume it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub config_hash: String,
    pub groups: Vec<GroupState>,
}

fn group_bounds(m: usize) -> Vec<(usize, usize)> {
    let g = GROUPS.min(m);
    (0..g).map(|i| (i * m / g, (i + 1) * m / g)).collect()
}

/// The per-sample streams of one circuit realization.
fn sample_streams(
    cfg: &ExperimentConfig,
    noises: &[Option<NoiseSpec>],
    k: usize,
    record_at: &[usize],
) -> Result<Vec<Vec<Vec<f64>>>> {
    let c = ensemble_realization(cfg.master_seed, k, cfg.n, cfg.depth)?;
    noises
        .iter()
        .map(|noise| match noise {
            None => unitary_probs(cfg.init, &c, record_at),
            Some(spec) => noisy_probs(cfg.init, &c, spec, record_at),
        })
        .collect()
}

fn run_group(
    cfg: &ExperimentConfig,
    noises: &[Option<NoiseSpec>],
    record_at: &[usize],
    (first, end): (usize, usize),
) -> Result<Vec<Vec<SdlAccumulator>>> {
    let d = cfg.dim();
    let fresh = || vec![vec![SdlAccumulator::new(d); record_at.len()]; noises.len()];
    let chunks = crate::par::map_indices((end - first).div_ceil(CHUNK), |ci| {
        let mut accs = fresh();
        let lo = first + ci * CHUNK;
        for k in lo..(lo + CHUNK).min(end) {
            for (stream, probs) in accs
                .iter_mut()
                .zip(sample_streams(cfg, noises, k, record_at)?)
            {
                for (acc, p) in stream.iter_mut().zip(&probs) {
                    acc.push(&cumulants(p)?)?;
                }
            }
        }
        Ok(accs)
    })?;
    let mut out = fresh();
    for chunk in &chunks {
        for (o, c) in out.iter_mut().flatten().zip(chunk.iter().flatten()) {
            o.merge(c)?;
        }
    }
    Ok(out)
}

/// Noise model per configured γ; `None` marks the noiseless pure-state path.
fn stream_noises(cfg: &ExperimentConfig) -> Vec<Option<NoiseSpec>> {
    cfg.gammas
        .iter()
        .map(|&g| {
            (g > 0.0).then(|| {
                NoiseSpec::new(
                    DampingParameter::new(g).expect("validated"),
                    cfg.noise_placement,
                )
            })
        })
        .collect()
}

pub fn run_convergence(cfg: &ExperimentConfig) -> Result<ConvergenceResult> {
    cfg.validate()?;
    let reference = haar_reference(cfg.dim(), cfg.m_haar, cfg.haar_seed)?;
    run_convergence_with(cfg, reference, None, |_| Ok(()))
}

/// Full control: a precomputed reference, an optional checkpoint to resume
/// from, and a hook called with the checkpoint after every finished group.
pub fn run_convergence_with<F>(
    cfg: &ExperimentConfig,
    reference: HaarReference,
    resume: Option<Checkpoint>,
    mut on_group: F,
) -> Result<ConvergenceResult>
where
    F: FnMut(&Checkpoint) -> Result<()>,
{
    let start = Instant::now();
    cfg.validate()?;
    if reference.d != cfg.dim() || reference.m_haar != cfg.m_haar || reference.seed != cfg.haar_seed
    {
        return Err(Error::config(
            "haar_reference",
            format!(
                "reference (d={}, m_haar={}, seed={}) does not match the config",
                reference.d, reference.m_haar, reference.seed
            ),
        ));
    }
    let hash = cfg.content_hash();
    let record_at = cfg.record_at();
    let noises = stream_noises(cfg);
    let bounds = group_bounds(cfg.ensemble);

    let mut checkpoint = match resume {
        Some(cp) if cp.config_hash != hash => {
            return Err(Error::config(
                "resume",
                "checkpoint belongs to a different config",
            ))
        }
        Some(cp) => cp,
        None => Checkpoint {
            config_hash: hash.clone(),
            groups: Vec::new(),
        },
    };
    for (i, g) in checkpoint.groups.iter().enumerate() {
        if bounds.get(i) != Some(&(g.first_sample, g.end_sample)) {
            return Err(Error::config("resume", "checkpoint group layout mismatch"));
        }
    }
    for &b in &bounds[checkpoint.groups.len()..] {
        let accs = run_group(cfg, &noises, &record_at, b)?;
        checkpoint
            .groups
            .push(GroupState::from_accumulators(b.0, b.1, &accs));
        on_group(&checkpoint)?;
    }

    let groups: Vec<Vec<Vec<SdlAccumulator>>> = checkpoint
        .groups
        .iter()
        .map(GroupState::accumulators)
        .collect();
    let mut series = Vec::with_capacity(cfg.gammas.len());
    for (s, &gamma) in cfg.gammas.iter().enumerate() {
        let mut distance = Vec::with_capacity(record_at.len());
        let mut stderr = Vec::with_capacity(record_at.len());
        let mut sdl = Vec::with_capacity(record_at.len());
        for (r, &t) in record_at.iter().enumerate() {
            let blocks: Vec<SdlAccumulator> = groups.iter().map(|g| g[s][r].clone()).collect();
            let mut total = SdlAccumulator::new(cfg.dim());
            for b in &blocks {
                total.merge(b)?;
            }
            let sig = total.signature(t)?;
            distance.push(distance_to_haar(&sig, &reference)?);
            stderr.push(if blocks.len() >= 2 {
                distance_jackknife_se(&blocks, &reference)?
            } else {
                f64::NAN
            });
            sdl.push(sig.sdl);
        }
        series.push(Series {
            gamma,
            depths: record_at.clone(),
            distance,
            stderr,
            sdl,
        });
    }
    Ok(ConvergenceResult {
        config: cfg.clone(),
        config_hash: hash,
        haar: reference,
        series,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// `D(t)` of an ensemble given as `[sample][record][basis index]` probabilities.
pub fn distance_series(
    per_sample: &[Vec<Vec<f64>>],
    reference: &HaarReference,
) -> Result<Vec<f64>> {
    let records = per_sample.first().map(Vec::len).unwrap_or(0);
    (0..records)
        .map(|r| {
            let mut acc = SdlAccumulator::new(reference.d);
            for sample in per_sample {
                acc.push(&cumulants(&sample[r])?)?;
            }
            distance_to_haar(&acc.signature(r)?, reference)
        })
        .collect()
}

/// Paths written by a convergence run.
#[derive(Debug, Clone)]
pub struct ConvergenceFiles {
    pub csv: PathBuf,
    pub json: PathBuf,
}

pub fn write_convergence(result: &ConvergenceResult, out_dir: &Path) -> Result<ConvergenceFiles> {
    fs::create_dir_all(out_dir)?;
    let csv = out_dir.join("convergence.csv");
    let json = out_dir.join("convergence.json");
    result.write_csv(fs::File::create(&csv)?)?;
    fs::write(&json, result.to_json()?)?;
    Ok(ConvergenceFiles { csv, json })
}

/// One row of the θ_c(γ) sweep table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaCRow {
    pub gamma: f64,
    pub theta_c: Option<f64>,
    pub lambda_north: f64,
    /// `None` at the undefined point γ = 1/2.
    pub lambda_south: Option<f64>,
    pub brackets: usize,
}

pub fn theta_c_sweep(steps: usize) -> Vec<ThetaCRow> {
    (0..=steps)
        .map(|i| {
            let gamma = DampingParameter::new(i as f64 / steps as f64).expect("grid in [0,1]");
            let search = theta_c_search(gamma);
            ThetaCRow {
                gamma: gamma.gamma(),
                theta_c: search.theta_c,
                lambda_north: lambda_factor(0.0, gamma).expect("north pole always defined"),
                lambda_south: lambda_factor(std::f64::consts::PI, gamma).ok(),
                brackets: search.brackets,
            }
        })
        .collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

#[derive(Debug, Clone)]
pub struct GeometryOutput {
    pub profiles: Vec<ExpansionProfile>,
    pub sweep: Vec<ThetaCRow>,
    pub files: Vec<PathBuf>,
}

/// Azimuth samples in the sphere-map export.
pub const SPHERE_PHI_STEPS: usize = 72;
/// γ steps of the θ_c sweep table.
pub const SWEEP_STEPS: usize = 100;

/// Per γ: `lambda_gamma_<γ>.csv`, `sphere_gamma_<γ>.csv` and
/// `profile_gamma_<γ>.json`; plus `theta_c_sweep.csv` over a uniform γ grid.
pub fn run_geometry(
    gammas: &[f64],
    resolution: usize,
    out_dir: Option<&Path>,
) -> Result<GeometryOutput> {
    if gammas.is_empty() {
        return Err(Error::config("gammas", "empty list"));
    }
    let params = gammas
        .iter()
        .map(|&g| {
            DampingParameter::new(g)
                .map_err(|_| Error::config("gammas", format!("{g} outside [0, 1]")))
        })
        .collect::<Result<Vec<_>>>()?;
    let profiles = params
        .iter()
        .map(|&g| expansion_profile(g, resolution))
        .collect::<Result<Vec<_>>>()?;
    let sweep = theta_c_sweep(SWEEP_STEPS);
    let mut files = Vec::new();
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)?;
        for p in &profiles {
            let tag = p.gamma.gamma().to_string();
            let path = dir.join(format!("lambda_gamma_{tag}.csv"));
            p.write_csv(fs::File::create(&path)?)?;
            files.push(path);

            let path = dir.join(format!("sphere_gamma_{tag}.csv"));
            let mut wtr = csv::Writer::from_path(&path)?;
            wtr.write_record(["theta", "phi", "log_lambda"])?;
            for (t, ph, l) in p.sphere_triples(SPHERE_PHI_STEPS) {
                wtr.write_record([t.to_string(), ph.to_string(), l.to_string()])?;
            }
            wtr.flush()?;
            files.push(path);

            let path = dir.join(format!("profile_gamma_{tag}.json"));
            let meta = serde_json::json!({ "resolution": resolution, "theta_c_brackets": p.theta_c_brackets });
            fs::write(&path, p.to_json(Some(&meta))?)?;
            files.push(path);
        }
        let path = dir.join("theta_c_sweep.csv");
        let mut wtr = csv::Writer::from_path(&path)?;
        wtr.write_record([
            "gamma",
            "theta_c",
            "lambda_north",
            "lambda_south",
            "brackets",
        ])?;
        for r in &sweep {
            wtr.write_record([
                r.gamma.to_string(),
                opt(r.theta_c),
                r.lambda_north.to_string(),
                opt(r.lambda_south),
                r.brackets.to_string(),
            ])?;
        }
        wtr.flush()?;
        files.push(path);
    }
    Ok(GeometryOutput {
        profiles,
        sweep,
        files,
    })
}
