//! Seeded Monte-Carlo studies of localization accuracy and spectral efficiency.
//!
//! A study is a list of sweep points (antenna count, sub-array count or
//! transmit power) times a number of trials. Trial `t` uses the seed
//! `derive_seed(base, t)` at every sweep point, so all points see the same
//! users and noise streams and differences between points come from the
//! swept parameter alone.
//!
//! Results stream to CSV in trial order: one `#` line with the resolved
//! configuration, a header row, one row per trial, and an aggregate footer
//! of `#` lines written last.

use crate::channel::{dbm_to_watts, estimate_channel, friis_beta, spectral_efficiency};
use crate::error::{Error, Result};
use crate::geometry::{ApertureConvention, CarrierSpec, MlaSpec};
use crate::localization::{
    angle_grid, distance_grid, localize, music_2d, near_steering, synthesize_snapshots, Scenario,
    SignalModel,
};
use crate::seed::derive_seed;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use std::io::Write;

/// Swept parameter.
#[derive(Debug, Clone, PartialEq)]
pub enum Sweep {
    /// One point at the base configuration.
    None,
    Antennas(Vec<usize>),
    Subarrays(Vec<usize>),
    PowerDbm(Vec<f64>),
}

impl Sweep {
    pub fn name(&self) -> &'static str {
        match self {
            Sweep::None => "none",
            Sweep::Antennas(_) => "antennas",
            Sweep::Subarrays(_) => "subarrays",
            Sweep::PowerDbm(_) => "power_dbm",
        }
    }

    fn len(&self) -> usize {
        match self {
            Sweep::None => 1,
            Sweep::Antennas(v) | Sweep::Subarrays(v) => v.len(),
            Sweep::PowerDbm(v) => v.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialConfig {
    pub carrier: CarrierSpec,
    pub subarrays: usize,
    pub antennas: usize,
    pub delta: f64,
    pub aperture: f64,
    pub convention: ApertureConvention,
    /// Transmit power, watts.
    pub power: f64,
    /// Noise power, watts. Zero gives the noiseless pipeline (SE is then undefined).
    pub noise: f64,
    pub snapshots: usize,
    /// User angle bounds in degrees about broadside.
    pub angle_deg: (f64, f64),
    /// User distance bounds in metres.
    pub distance: (f64, f64),
    pub trials: usize,
    pub seed: u64,
    pub angle_step: f64,
    pub distance_step: f64,
    pub ridge: f64,
    pub sources: usize,
    pub model: SignalModel,
    pub sweep: Sweep,
    /// Trials per point that also run the 2D-MUSIC baseline; `None` runs it on all.
    pub baseline_trials: Option<usize>,
}

impl Default for TrialConfig {
    /// Four 16-element sub-arrays over 2 m at 15 GHz-class wavelength 0.02 m,
    /// 20 dBm transmit power, −78 dBm noise, 100 snapshots, 500 trials.
    fn default() -> Self {
        Self {
            carrier: CarrierSpec::from_wavelength(0.02).expect("positive wavelength"),
            subarrays: 4,
            antennas: 16,
            delta: 0.01,
            aperture: 2.0,
            convention: ApertureConvention::default(),
            power: dbm_to_watts(20.0),
            noise: dbm_to_watts(-78.0),
            snapshots: 100,
            angle_deg: (-60.0, 60.0),
            distance: (4.0, 40.0),
            trials: 500,
            seed: 0,
            angle_step: 0.002,
            distance_step: 0.02,
            ridge: 0.0,
            sources: 1,
            model: SignalModel::default(),
            sweep: Sweep::None,
            baseline_trials: Some(0),
        }
    }
}

/// Geometry and power at one sweep point.
#[derive(Debug, Clone)]
struct Point {
    value: f64,
    mla: MlaSpec,
    power: f64,
}

impl TrialConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("trials", "need at least one trial"));
        }
        let (a0, a1) = self.angle_deg;
        if !(a0 < a1 && a0 > -90.0 && a1 < 90.0) {
            return Err(Error::invalid("angle_deg", "bounds must be ordered inside (-90°, 90°)"));
        }
        let (d0, d1) = self.distance;
        if !(d0 > 0.0 && d0 < d1) {
            return Err(Error::invalid("distance", "bounds must be ordered and positive"));
        }
        if self.antennas < 2 {
            return Err(Error::invalid("antennas", "MUSIC needs at least two antennas per sub-array"));
        }
        if self.sweep.len() == 0 {
            return Err(Error::invalid("sweep", "sweep has no values"));
        }
        if !(self.power > 0.0) {
            return Err(Error::invalid("power", "must be positive"));
        }
        Ok(())
    }

    fn points(&self) -> Result<Vec<Point>> {
        self.validate()?;
        let mla = |l: usize, n: usize| {
            if l < 2 {
                return Err(Error::invalid("subarrays", "triangulation needs at least two sub-arrays"));
            }
            MlaSpec::from_aperture(l, n, self.delta, self.aperture, self.convention)
        };
        match &self.sweep {
            Sweep::None => Ok(vec![Point {
                value: f64::NAN,
                mla: mla(self.subarrays, self.antennas)?,
                power: self.power,
            }]),
            Sweep::Antennas(ns) => ns
                .iter()
                .map(|&n| {
                    if n < 2 {
                        return Err(Error::invalid("antennas", "MUSIC needs at least two antennas per sub-array"));
                    }
                    Ok(Point {
                        value: n as f64,
                        mla: mla(self.subarrays, n)?,
                        power: self.power,
                    })
                })
                .collect(),
            Sweep::Subarrays(ls) => ls
                .iter()
                .map(|&l| {
                    Ok(Point {
                        value: l as f64,
                        mla: mla(l, self.antennas)?,
                        power: self.power,
                    })
                })
                .collect(),
            Sweep::PowerDbm(ps) => {
                let geometry = mla(self.subarrays, self.antennas)?;
                Ok(ps
                    .iter()
                    .map(|&p| Point {
                        value: p,
                        mla: geometry.clone(),
                        power: dbm_to_watts(p),
                    })
                    .collect())
            }
        }
    }

    /// One-line `key=value` rendering of every field.
    pub fn describe(&self) -> String {
        let sweep = match &self.sweep {
            Sweep::None => String::new(),
            Sweep::Antennas(v) | Sweep::Subarrays(v) => join(v.iter().map(|x| x.to_string())),
            Sweep::PowerDbm(v) => join(v.iter().map(|x| x.to_string())),
        };
        format!(
            "wavelength_m={} subarrays={} antennas={} element_spacing_m={} aperture_m={} \
             aperture_convention={} power_w={:e} noise_w={:e} snapshots={} angle_deg={}..{} \
             distance_m={}..{} trials={} seed={} angle_step_rad={} distance_step_m={} ridge={} \
             sources={} signal_model={:?} sweep={} sweep_values={} baseline_trials={}",
            self.carrier.wavelength(),
            self.subarrays,
            self.antennas,
            self.delta,
            self.aperture,
            self.convention.name(),
            self.power,
            self.noise,
            self.snapshots,
            self.angle_deg.0,
            self.angle_deg.1,
            self.distance.0,
            self.distance.1,
            self.trials,
            self.seed,
            self.angle_step,
            self.distance_step,
            self.ridge,
            self.sources,
            self.model,
            self.sweep.name(),
            sweep,
            self.baseline_trials.map_or("all".to_string(), |b| b.to_string()),
        )
    }
}

fn join(items: impl Iterator<Item = String>) -> String {
    items.collect::<Vec<_>>().join(",")
}

/// Outcome of the proposed estimator in one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialStatus {
    Ok,
    IllConditioned,
    Degenerate,
}

impl TrialStatus {
    fn as_str(self) -> &'static str {
        match self {
            TrialStatus::Ok => "ok",
            TrialStatus::IllConditioned => "ill_conditioned",
            TrialStatus::Degenerate => "degenerate",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "ok" => Ok(TrialStatus::Ok),
            "ill_conditioned" => Ok(TrialStatus::IllConditioned),
            "degenerate" => Ok(TrialStatus::Degenerate),
            other => Err(Error::Io(format!("unknown trial status `{other}`"))),
        }
    }
}

/// One trial at one sweep point. Unavailable values are NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub point: usize,
    pub sweep_value: f64,
    pub trial: usize,
    pub seed: u64,
    pub true_x: f64,
    pub true_z: f64,
    pub status: TrialStatus,
    pub est_x: f64,
    pub est_z: f64,
    pub sq_error: f64,
    pub est2d_x: f64,
    pub est2d_z: f64,
    pub sq_error_2d: f64,
    pub se_proposed: f64,
    pub se_2d: f64,
    pub se_perfect: f64,
}

const COLUMNS: [&str; 16] = [
    "point",
    "sweep_value",
    "trial",
    "seed",
    "true_x",
    "true_z",
    "status",
    "est_x",
    "est_z",
    "sq_error",
    "est2d_x",
    "est2d_z",
    "sq_error_2d",
    "se_proposed",
    "se_2d",
    "se_perfect",
];

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

impl ExperimentRecord {
    fn fields(&self) -> Vec<String> {
        vec![
            self.point.to_string(),
            fmt(self.sweep_value),
            self.trial.to_string(),
            self.seed.to_string(),
            fmt(self.true_x),
            fmt(self.true_z),
            self.status.as_str().to_string(),
            fmt(self.est_x),
            fmt(self.est_z),
            fmt(self.sq_error),
            fmt(self.est2d_x),
            fmt(self.est2d_z),
            fmt(self.sq_error_2d),
            fmt(self.se_proposed),
            fmt(self.se_2d),
            fmt(self.se_perfect),
        ]
    }

    fn parse(row: &csv::StringRecord) -> Result<Self> {
        if row.len() != COLUMNS.len() {
            return Err(Error::Io(format!("expected {} columns, got {}", COLUMNS.len(), row.len())));
        }
        let f = |i: usize| -> Result<f64> {
            row[i]
                .parse()
                .map_err(|_| Error::Io(format!("column {}: bad number `{}`", COLUMNS[i], &row[i])))
        };
        let u = |i: usize| -> Result<u64> {
            row[i]
                .parse()
                .map_err(|_| Error::Io(format!("column {}: bad integer `{}`", COLUMNS[i], &row[i])))
        };
        Ok(Self {
            point: u(0)? as usize,
            sweep_value: f(1)?,
            trial: u(2)? as usize,
            seed: u(3)?,
            true_x: f(4)?,
            true_z: f(5)?,
            status: TrialStatus::parse(&row[6])?,
            est_x: f(7)?,
            est_z: f(8)?,
            sq_error: f(9)?,
            est2d_x: f(10)?,
            est2d_z: f(11)?,
            sq_error_2d: f(12)?,
            se_proposed: f(13)?,
            se_2d: f(14)?,
            se_perfect: f(15)?,
        })
    }
}

/// Aggregates at one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSummary {
    pub point: usize,
    pub sweep_value: f64,
    pub trials: usize,
    /// Trials whose proposed estimate failed and were left out of the means.
    pub excluded: usize,
    pub nmse_proposed: f64,
    /// Over the trials that ran the baseline; NaN if none did.
    pub nmse_2d: f64,
    pub baseline_trials: usize,
    pub mean_se_proposed: f64,
    pub mean_se_2d: f64,
    pub mean_se_perfect: f64,
    /// Steering vectors evaluated per trial by the proposed search.
    pub evaluations_1d: u64,
    /// Steering vectors evaluated per trial by the 2D search.
    pub evaluations_2d: u64,
}

impl PointSummary {
    pub fn cost_ratio(&self) -> f64 {
        self.evaluations_2d as f64 / self.evaluations_1d as f64
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.point.to_string(),
            fmt(self.sweep_value),
            self.trials.to_string(),
            self.excluded.to_string(),
            fmt(self.nmse_proposed),
            fmt(self.nmse_2d),
            self.baseline_trials.to_string(),
            fmt(self.mean_se_proposed),
            fmt(self.mean_se_2d),
            fmt(self.mean_se_perfect),
            self.evaluations_1d.to_string(),
            self.evaluations_2d.to_string(),
        ]
    }
}

const SUMMARY_COLUMNS: [&str; 12] = [
    "point",
    "sweep_value",
    "trials",
    "excluded",
    "nmse_proposed",
    "nmse_2d",
    "baseline_trials",
    "mean_se_proposed",
    "mean_se_2d",
    "mean_se_perfect",
    "evaluations_1d",
    "evaluations_2d",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub records: Vec<ExperimentRecord>,
    pub summaries: Vec<PointSummary>,
}

struct Grids {
    angles: Vec<f64>,
    distances: Vec<f64>,
}

fn run_trial(cfg: &TrialConfig, grids: &Grids, index: usize, point: &Point, trial: usize) -> Result<ExperimentRecord> {
    let seed = derive_seed(cfg.seed, trial as u64);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let broadside = rng.random_range(cfg.angle_deg.0..cfg.angle_deg.1).to_radians();
    let distance = rng.random_range(cfg.distance.0..cfg.distance.1);
    let snapshot_seed = rng.next_u64();
    let angle = std::f64::consts::FRAC_PI_2 - broadside;
    let scenario = Scenario {
        mla: point.mla.clone(),
        carrier: cfg.carrier,
        distance,
        angle,
        power: point.power,
        noise: cfg.noise,
        snapshots: cfg.snapshots,
        model: cfg.model,
    };
    let (true_x, true_z) = scenario.position();
    let set = synthesize_snapshots(&scenario, snapshot_seed)?;

    let beta = friis_beta(&cfg.carrier, distance);
    let h = near_steering(&point.mla, angle, distance, &cfg.carrier);
    let se = |phi: f64, d: f64| -> Result<f64> {
        if cfg.noise == 0.0 {
            return Ok(f64::NAN);
        }
        let est = estimate_channel(phi, d, &point.mla, &cfg.carrier)?;
        spectral_efficiency(&h, &est.response, point.power, beta, cfg.noise)
    };

    let mut rec = ExperimentRecord {
        point: index,
        sweep_value: point.value,
        trial,
        seed,
        true_x,
        true_z,
        status: TrialStatus::Ok,
        est_x: f64::NAN,
        est_z: f64::NAN,
        sq_error: f64::NAN,
        est2d_x: f64::NAN,
        est2d_z: f64::NAN,
        sq_error_2d: f64::NAN,
        se_proposed: f64::NAN,
        se_2d: f64::NAN,
        se_perfect: se(angle, distance)?,
    };

    match localize(&set, &grids.angles, cfg.sources, cfg.ridge) {
        Ok(p) => {
            rec.est_x = p.x;
            rec.est_z = p.z;
            rec.sq_error = (p.x - true_x).powi(2) + (p.z - true_z).powi(2);
            rec.se_proposed = if p.distance > 0.0 { se(p.angle, p.distance)? } else { 0.0 };
        }
        Err(Error::IllConditioned { .. }) => rec.status = TrialStatus::IllConditioned,
        Err(Error::DegenerateSubspace { .. }) => rec.status = TrialStatus::Degenerate,
        Err(e) => return Err(e),
    }

    if cfg.baseline_trials.is_none_or(|b| trial < b) {
        let m = music_2d(
            &set.stacked(),
            &point.mla,
            &cfg.carrier,
            &grids.angles,
            &grids.distances,
            cfg.sources,
        )?;
        rec.est2d_x = m.distance * m.angle.cos();
        rec.est2d_z = m.distance * m.angle.sin();
        rec.sq_error_2d = (rec.est2d_x - true_x).powi(2) + (rec.est2d_z - true_z).powi(2);
        rec.se_2d = se(m.angle, m.distance)?;
    }
    Ok(rec)
}

/// Recomputes per-point aggregates from records.
///
/// Costs are not stored per record, so they are taken from `costs`
/// (one `(1D, 2D)` pair per point).
pub fn aggregate(records: &[ExperimentRecord], costs: &[(u64, u64)]) -> Vec<PointSummary> {
    let points = records.iter().map(|r| r.point + 1).max().unwrap_or(0).max(costs.len());
    (0..points)
        .map(|p| {
            let rows: Vec<&ExperimentRecord> = records.iter().filter(|r| r.point == p).collect();
            let ok: Vec<&&ExperimentRecord> = rows.iter().filter(|r| r.status == TrialStatus::Ok).collect();
            let truth: f64 = ok.iter().map(|r| r.true_x * r.true_x + r.true_z * r.true_z).sum();
            let err: f64 = ok.iter().map(|r| r.sq_error).sum();
            let base: Vec<&&ExperimentRecord> = rows.iter().filter(|r| !r.sq_error_2d.is_nan()).collect();
            let base_truth: f64 = base.iter().map(|r| r.true_x * r.true_x + r.true_z * r.true_z).sum();
            let base_err: f64 = base.iter().map(|r| r.sq_error_2d).sum();
            let mean = |vals: Vec<f64>| {
                if vals.is_empty() {
                    f64::NAN
                } else {
                    vals.iter().sum::<f64>() / vals.len() as f64
                }
            };
            let (e1, e2) = costs.get(p).copied().unwrap_or((0, 0));
            PointSummary {
                point: p,
                sweep_value: rows.first().map_or(f64::NAN, |r| r.sweep_value),
                trials: rows.len(),
                excluded: rows.len() - ok.len(),
                nmse_proposed: if ok.is_empty() { f64::NAN } else { err / truth },
                nmse_2d: if base.is_empty() { f64::NAN } else { base_err / base_truth },
                baseline_trials: base.len(),
                mean_se_proposed: mean(ok.iter().map(|r| r.se_proposed).filter(|v| !v.is_nan()).collect()),
                mean_se_2d: mean(base.iter().map(|r| r.se_2d).filter(|v| !v.is_nan()).collect()),
                mean_se_perfect: mean(ok.iter().map(|r| r.se_perfect).filter(|v| !v.is_nan()).collect()),
                evaluations_1d: e1,
                evaluations_2d: e2,
            }
        })
        .collect()
}

const CHUNK: usize = 32;

/// Runs every sweep point and trial, streaming CSV to `sink` if given.
pub fn run_experiment(cfg: &TrialConfig, mut sink: Option<&mut dyn Write>) -> Result<ExperimentOutput> {
    let points = cfg.points()?;
    let grids = Grids {
        angles: angle_grid(cfg.angle_step)?,
        distances: distance_grid(cfg.distance.0, cfg.distance.1, cfg.distance_step)?,
    };
    if let Some(s) = sink.as_mut() {
        writeln!(s, "# {}", cfg.describe())?;
    }
    let mut writer = sink.map(|s| {
        csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(s)
    });
    if let Some(w) = writer.as_mut() {
        w.write_record(COLUMNS).map_err(csv_err)?;
    }
    let mut records = Vec::with_capacity(points.len() * cfg.trials);
    let mut costs = Vec::with_capacity(points.len());
    for (index, point) in points.iter().enumerate() {
        costs.push((
            (point.mla.subarrays() * grids.angles.len()) as u64,
            (grids.angles.len() * grids.distances.len()) as u64,
        ));
        for start in (0..cfg.trials).step_by(CHUNK) {
            let end = (start + CHUNK).min(cfg.trials);
            let chunk: Vec<ExperimentRecord> = (start..end)
                .into_par_iter()
                .map(|t| run_trial(cfg, &grids, index, point, t))
                .collect::<Result<_>>()?;
            if let Some(w) = writer.as_mut() {
                for r in &chunk {
                    w.write_record(r.fields()).map_err(csv_err)?;
                }
                w.flush()?;
            }
            records.extend(chunk);
        }
    }
    let summaries = aggregate(&records, &costs);
    if let Some(w) = writer {
        let s = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        writeln!(s, "# aggregate_columns,{}", SUMMARY_COLUMNS.join(","))?;
        for p in &summaries {
            writeln!(s, "# aggregate,{}", p.fields().join(","))?;
        }
        s.flush()?;
    }
    Ok(ExperimentOutput { records, summaries })
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Localization accuracy study; sweep over antennas or sub-arrays.
pub fn run_localization_experiment(cfg: &TrialConfig, sink: Option<&mut dyn Write>) -> Result<ExperimentOutput> {
    if matches!(cfg.sweep, Sweep::PowerDbm(_)) {
        return Err(Error::invalid("sweep", "localization studies sweep antennas or sub-arrays"));
    }
    run_experiment(cfg, sink)
}

/// Spectral-efficiency study over transmit power.
pub fn run_se_sweep(cfg: &TrialConfig, sink: Option<&mut dyn Write>) -> Result<ExperimentOutput> {
    match &cfg.sweep {
        Sweep::PowerDbm(p) if !p.is_empty() && p.iter().all(|v| v.is_finite()) => {}
        _ => return Err(Error::invalid("sweep", "SE studies need a non-empty power sweep")),
    }
    if cfg.noise <= 0.0 {
        return Err(Error::invalid("noise", "SE needs positive noise power"));
    }
    run_experiment(cfg, sink)
}

/// Parses CSV written by [`run_experiment`] into records and footer aggregates.
pub fn read_output(text: &str) -> Result<ExperimentOutput> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let records = reader
        .records()
        .map(|r| r.map_err(csv_err).and_then(|row| ExperimentRecord::parse(&row)))
        .collect::<Result<Vec<_>>>()?;
    let summaries = text
        .lines()
        .filter_map(|l| l.strip_prefix("# aggregate,"))
        .map(parse_summary)
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentOutput { records, summaries })
}

fn parse_summary(line: &str) -> Result<PointSummary> {
    let v: Vec<&str> = line.split(',').collect();
    if v.len() != SUMMARY_COLUMNS.len() {
        return Err(Error::Io(format!("aggregate row has {} fields", v.len())));
    }
    let f = |i: usize| -> Result<f64> {
        v[i].parse().map_err(|_| Error::Io(format!("aggregate {}: bad number", SUMMARY_COLUMNS[i])))
    };
    let u = |i: usize| -> Result<u64> {
        v[i].parse().map_err(|_| Error::Io(format!("aggregate {}: bad integer", SUMMARY_COLUMNS[i])))
    };
    Ok(PointSummary {
        point: u(0)? as usize,
        sweep_value: f(1)?,
        trials: u(2)? as usize,
        excluded: u(3)? as usize,
        nmse_proposed: f(4)?,
        nmse_2d: f(5)?,
        baseline_trials: u(6)? as usize,
        mean_se_proposed: f(7)?,
        mean_se_2d: f(8)?,
        mean_se_perfect: f(9)?,
        evaluations_1d: u(10)?,
        evaluations_2d: u(11)?,
    })
}
