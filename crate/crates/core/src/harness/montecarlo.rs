use std::fmt;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::affine::{expectation, AffineModule, DualWord, Mode};
use crate::algebra::Basis;
use crate::evolution::{assemble_state_vector, DriverBundle, FlowParams, FlowState, PROCESS_NAMES};

use super::config::RunConfig;
use super::observable::observable_current;
use super::HarnessError;

/// Depth of the assembled state used for the word observables.
pub const WORD_DEPTH: usize = 2;

fn flow_params(cfg: &RunConfig) -> FlowParams<Complex64> {
    FlowParams { tau: Complex64::new(cfg.tau_f64(), 0.0), dx12h: cfg.dx12h, odd: cfg.odd_system }
}

/// Runs path `path` and calls `visit` at each step index listed in `stops`
/// (ascending). Aborts on the first non-finite coefficient.
fn run_path(
    cfg: &RunConfig,
    path: u64,
    stops: &[usize],
    mut visit: impl FnMut(usize, &FlowState<Complex64>) -> Result<(), HarnessError>,
) -> Result<(), HarnessError> {
    let params = flow_params(cfg);
    let mut drivers = DriverBundle::new(cfg.seed, path, cfg.kappa_f64(), cfg.tau_f64(), cfg.dt);
    let dt = Complex64::new(cfg.dt, 0.0);
    let mut s = FlowState::<Complex64>::initial(cfg.order);
    let mut next = stops.iter().copied().peekable();
    let last = stops.last().copied().unwrap_or(0);
    for step in 0..=last {
        if step > 0 {
            s = s.step(&dt, &drivers.next_increments(), &params)?;
            s.t = step as f64 * cfg.dt;
            if s.is_degenerate() {
                return Err(HarnessError::Degenerate { path, t: s.t });
            }
        }
        while next.peek() == Some(&step) {
            visit(step, &s)?;
            next.next();
        }
    }
    Ok(())
}

/// Recorded states of one path.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub path: u64,
    pub records: Vec<FlowState<Complex64>>,
}

/// Path 0 of the configured run, recorded every `record_every` steps and at `t_max`.
pub fn simulate(cfg: &RunConfig) -> Result<Trajectory, HarnessError> {
    simulate_path(cfg, 0)
}

pub fn simulate_path(cfg: &RunConfig, path: u64) -> Result<Trajectory, HarnessError> {
    cfg.check_runnable()?;
    let total = cfg.steps_to(cfg.t_max);
    let mut stops: Vec<usize> = (0..=total).step_by(cfg.record_every).collect();
    if stops.last() != Some(&total) {
        stops.push(total);
    }
    let mut records = Vec::with_capacity(stops.len());
    run_path(cfg, path, &stops, |_, s| {
        records.push(s.clone());
        Ok(())
    })?;
    Ok(Trajectory { path, records })
}

/// One row per coefficient: `t,process,power,re,im`. `process` is `rho` or a
/// name from [`PROCESS_NAMES`]; `power` is `j` for the `ζ^{−j}` coefficient
/// (for `rho`, `j = 0` is the constant term).
pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, w: W) -> Result<(), HarnessError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["t", "process", "power", "re", "im"])?;
    for s in &traj.records {
        let t = s.t.to_string();
        for (j, c) in s.rho.coeffs().iter().enumerate() {
            out.write_record([t.as_str(), "rho", &j.to_string(), &c.re.to_string(), &c.im.to_string()])?;
        }
        for (name, p) in PROCESS_NAMES.iter().zip(s.processes()) {
            for (j, c) in p.coeffs().iter().enumerate() {
                out.write_record([t.as_str(), name, &(j + 1).to_string(), &c.re.to_string(), &c.im.to_string()])?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

pub fn trajectory_json(traj: &Trajectory) -> serde_json::Value {
    let pairs = |cs: &[Complex64]| cs.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>();
    let records: Vec<serde_json::Value> = traj
        .records
        .iter()
        .map(|s| {
            let mut obj = serde_json::Map::new();
            obj.insert("t".into(), s.t.into());
            obj.insert("rho".into(), serde_json::json!(pairs(s.rho.coeffs())));
            for (name, p) in PROCESS_NAMES.iter().zip(s.processes()) {
                obj.insert((*name).into(), serde_json::json!(pairs(p.coeffs())));
            }
            serde_json::Value::Object(obj)
        })
        .collect();
    serde_json::json!({ "path": traj.path, "records": records })
}

/// `⟨0|`, `⟨0|X(1)`, `⟨0|X(2)` for `X = E, H, F`, `⟨0|e(1)f(1)`, `⟨0|f(1)e(1)`.
pub fn default_words() -> Vec<DualWord> {
    use Basis::*;
    let one = |x, i| DualWord::new(vec![Mode::new(x, i)]).expect("positive index");
    let mut out = vec![DualWord::empty()];
    for i in [1, 2] {
        for x in [E, H, F] {
            out.push(one(x, i));
        }
    }
    for (a, b) in [(OddE, OddF), (OddF, OddE)] {
        out.push(DualWord::new(vec![Mode::new(a, 1), Mode::new(b, 1)]).expect("positive index"));
    }
    out
}

/// Names of the real observables, in the order produced by [`observable_values`].
pub fn observable_names(order: usize) -> Vec<String> {
    let mut names = Vec::new();
    for n in 1..order {
        names.push(format!("E(z)[z^-{}]", n + 1));
    }
    names.extend(default_words().iter().map(|w| w.label()));
    names.iter().flat_map(|n| [format!("{n}.re"), format!("{n}.im")]).collect()
}

/// Current coefficients `z^{−n−1}`, `n = 1 … N−1`, then the word pairings,
/// each split into real and imaginary parts.
pub fn observable_values(
    s: &FlowState<Complex64>,
    k: f64,
    module: &AffineModule<Complex64>,
    words: &[DualWord],
) -> Result<Vec<f64>, HarnessError> {
    let kc = Complex64::new(k, 0.0);
    let current = observable_current(s, &kc)?;
    let mut vals: Vec<Complex64> = (1..s.order()).map(|n| current.coeff(n + 1)).collect();
    let v = assemble_state_vector(s, &kc, WORD_DEPTH)?;
    for w in words {
        vals.push(expectation(module, w, &v)?);
    }
    Ok(vals.iter().flat_map(|c| [c.re, c.im]).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct Cell {
    pub observable: String,
    pub t: f64,
    pub mean: f64,
    pub se: f64,
    pub baseline: f64,
    pub z: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AbortedPath {
    pub path: u64,
    pub t: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MartingaleReport {
    pub config: RunConfig,
    pub paths_used: usize,
    pub cells: Vec<Cell>,
    pub aborted: Vec<AbortedPath>,
    pub warnings: Vec<String>,
}

impl MartingaleReport {
    pub fn passed(&self) -> usize {
        self.cells.iter().filter(|c| c.pass).count()
    }

    pub fn pass_fraction(&self) -> f64 {
        if self.cells.is_empty() {
            1.0
        } else {
            self.passed() as f64 / self.cells.len() as f64
        }
    }

    pub fn all_pass(&self) -> bool {
        self.passed() == self.cells.len()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        v["check"] = "martingale-test".into();
        v["pass_fraction"] = self.pass_fraction().into();
        v["pass"] = self.all_pass().into();
        v
    }
}

impl fmt::Display for MartingaleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = self.cells.iter().map(|c| c.observable.chars().count()).max().unwrap_or(10).max(10);
        writeln!(f, "{:<w$}  {:>6}  {:>13}  {:>11}  {:>13}  {:>8}  gate", "observable", "t", "mean", "se", "t=0", "z")?;
        for c in &self.cells {
            let pad = w - c.observable.chars().count();
            writeln!(
                f,
                "{}{}  {:>6.3}  {:>13.6e}  {:>11.4e}  {:>13.6e}  {:>8.3}  {}",
                c.observable,
                " ".repeat(pad),
                c.t,
                c.mean,
                c.se,
                c.baseline,
                c.z,
                if c.pass { "ok" } else { "FAIL" }
            )?;
        }
        for wmsg in &self.warnings {
            writeln!(f, "warning: {wmsg}")?;
        }
        write!(
            f,
            "{}/{} cells within 3 SE over {} paths ({} aborted)",
            self.passed(),
            self.cells.len(),
            self.paths_used,
            self.aborted.len()
        )
    }
}

/// Gate for one cell: `|mean − baseline| ≤ 3·SE`. A zero standard error
/// only passes on equality up to rounding.
fn gate(mean: f64, se: f64, baseline: f64) -> (f64, bool) {
    let diff = mean - baseline;
    if se > 0.0 {
        let z = diff / se;
        (z, z.abs() <= 3.0)
    } else {
        let ok = diff.abs() <= 1e-12 * baseline.abs().max(1.0);
        (if ok { 0.0 } else { f64::INFINITY.copysign(diff) }, ok)
    }
}

/// Estimates every observable at each checkpoint over `P` independent paths.
///
/// Paths run in parallel; their results are reduced in path order, so the
/// report depends only on the configuration.
pub fn martingale_test(cfg: &RunConfig) -> Result<MartingaleReport, HarnessError> {
    cfg.check_runnable()?;
    cfg.check_checkpoints()?;
    let k = cfg.k_f64();
    let module = AffineModule::vacuum(Complex64::new(k, 0.0), WORD_DEPTH);
    let words = default_words();
    let names = observable_names(cfg.order);
    let baseline = observable_values(&FlowState::initial(cfg.order), k, &module, &words)?;

    let mut stops: Vec<usize> = cfg.checkpoints.iter().map(|&t| cfg.steps_to(t)).collect();
    stops.sort_unstable();
    stops.dedup();

    let results: Vec<Result<Vec<Vec<f64>>, HarnessError>> = (0..cfg.paths as u64)
        .into_par_iter()
        .map(|path| {
            let mut rows = Vec::with_capacity(stops.len());
            run_path(cfg, path, &stops, |_, s| {
                rows.push(observable_values(s, k, &module, &words)?);
                Ok(())
            })?;
            Ok(rows)
        })
        .collect();

    let mut aborted = Vec::new();
    let mut good = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(rows) => good.push(rows),
            Err(HarnessError::Degenerate { path, t }) => aborted.push(AbortedPath { path, t }),
            Err(e) => return Err(e),
        }
    }

    let mut warnings = Vec::new();
    if cfg.paths < 100 {
        warnings.push(format!("only {} paths; standard errors are unreliable below 100", cfg.paths));
    }
    if !aborted.is_empty() {
        warnings.push(format!("{} paths hit non-finite coefficients and were excluded", aborted.len()));
    }

    let p = good.len();
    let mut cells = Vec::new();
    for (ci, &stop) in stops.iter().enumerate() {
        for (oi, name) in names.iter().enumerate() {
            let mean = good.iter().map(|rows| rows[ci][oi]).sum::<f64>() / p.max(1) as f64;
            let var = if p > 1 {
                good.iter().map(|rows| (rows[ci][oi] - mean).powi(2)).sum::<f64>() / (p - 1) as f64
            } else {
                0.0
            };
            let se = (var / p.max(1) as f64).sqrt();
            let (z, pass) = gate(mean, se, baseline[oi]);
            cells.push(Cell { observable: name.clone(), t: stop as f64 * cfg.dt, mean, se, baseline: baseline[oi], z, pass });
        }
    }
    Ok(MartingaleReport { config: cfg.clone(), paths_used: p, cells, aborted, warnings })
}
