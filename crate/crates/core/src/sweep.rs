//! Grid sweeps over the experiment parameters and a deterministic constrained
//! maximiser built on top of them.
//!
//! Grid points are evaluated in parallel but collected in row-major order of
//! the axes as given (last axis fastest), so output never depends on thread
//! scheduling.

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, PARAMETER_NAMES};
use crate::constraints::{cp_ratio, feasibility_report_with, Limits};
use crate::decoherence::dephasing_budget;
use crate::error::{Error, Result};
use crate::gravphase::static_phases;
use crate::report::sig12;
use crate::spinstate::{apply_dephasing, entangled_state, negativity, optimize_witness, witness, WitnessSettings};

pub const MAX_AXES: usize = 4;
/// Coordinate-descent passes in [`maximize`].
pub const DESCENT_PASSES: usize = 6;
/// Golden-section iterations per line search.
pub const GOLDEN_ITERATIONS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Axis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl Axis {
    pub fn linear(name: &str, min: f64, max: f64, count: usize) -> Self {
        Axis {
            name: name.into(),
            min,
            max,
            count,
            spacing: Spacing::Linear,
        }
    }

    pub fn log(name: &str, min: f64, max: f64, count: usize) -> Self {
        Axis {
            name: name.into(),
            min,
            max,
            count,
            spacing: Spacing::Log,
        }
    }

    /// Parses `name:min:max:count[:lin|log]`.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = |why: &str| Error::InvalidArgument(format!("axis `{text}`: {why}"));
        let parts: Vec<&str> = text.split(':').collect();
        if !(4..=5).contains(&parts.len()) {
            return Err(bad("expected name:min:max:count[:lin|log]"));
        }
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("bounds must be numbers"));
        let count = parts[3]
            .trim()
            .parse::<usize>()
            .map_err(|_| bad("count must be a positive integer"))?;
        let spacing = match parts.get(4).map(|s| s.trim()) {
            None | Some("lin") | Some("linear") => Spacing::Linear,
            Some("log") => Spacing::Log,
            Some(other) => return Err(bad(&format!("unknown spacing `{other}`"))),
        };
        let axis = Axis {
            name: parts[0].trim().to_string(),
            min: num(parts[1])?,
            max: num(parts[2])?,
            count,
            spacing,
        };
        axis.check()?;
        Ok(axis)
    }

    /// A single-point axis (count 1, min == max) pins a parameter; otherwise
    /// count >= 2 and min < max.
    fn check(&self) -> Result<()> {
        let bad = |why: String| Err(Error::InvalidArgument(format!("axis `{}`: {why}", self.name)));
        if !PARAMETER_NAMES.contains(&self.name.as_str()) {
            return Err(Error::UnknownParameter(self.name.clone()));
        }
        if !(self.min.is_finite() && self.max.is_finite()) {
            return bad("bounds must be finite".into());
        }
        match self.count {
            0 => return bad("count must be >= 1".into()),
            1 if self.min != self.max => return bad("a single-point axis needs min == max".into()),
            1 => {}
            _ if !(self.min < self.max) => return bad("min must be < max".into()),
            _ => {}
        }
        if self.spacing == Spacing::Log && self.min <= 0.0 {
            return bad("log spacing needs min > 0".into());
        }
        Ok(())
    }

    fn pinned(&self) -> bool {
        self.count == 1
    }

    /// Maps u in [0, 1] onto the axis.
    fn at(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return self.min;
        }
        if u >= 1.0 {
            return self.max;
        }
        match self.spacing {
            Spacing::Linear => self.min + u * (self.max - self.min),
            Spacing::Log => (self.min.ln() + u * (self.max.ln() - self.min.ln())).exp(),
        }
    }

    fn to_unit(&self, x: f64) -> f64 {
        match self.spacing {
            Spacing::Linear => (x - self.min) / (self.max - self.min),
            Spacing::Log => (x.ln() - self.min.ln()) / (self.max.ln() - self.min.ln()),
        }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.pinned() {
            return vec![self.min];
        }
        (0..self.count)
            .map(|i| self.at(i as f64 / (self.count - 1) as f64))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "camelCase")]
pub enum Objective {
    /// Negativity of the (dephased) spin state.
    Negativity,
    /// W with unrotated measurement axes.
    Witness,
    /// W maximised over local z rotations.
    WitnessOptimized,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepConstraints {
    pub cp_ratio_max: f64,
    /// tauColl must be at least this multiple of tau + 2 tau_acc.
    pub require_tau_coll_over: f64,
    /// Residual field for the magnetic check, T.
    pub b_residual: f64,
}

impl Default for SweepConstraints {
    fn default() -> Self {
        SweepConstraints {
            cp_ratio_max: 0.1,
            require_tau_coll_over: 1.0,
            b_residual: 0.0,
        }
    }
}

impl SweepConstraints {
    fn limits(&self) -> Limits {
        Limits {
            target_ratio: self.cp_ratio_max,
            b_residual: self.b_residual,
            tau_coll_factor: self.require_tau_coll_over,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepSpec {
    pub axes: Vec<Axis>,
    pub objective: Objective,
    pub constraints: SweepConstraints,
    /// Apply the environmental dephasing budget to the spin state before
    /// evaluating the objective.
    pub dephasing: bool,
}

impl SweepSpec {
    pub fn new(axes: Vec<Axis>) -> Self {
        SweepSpec {
            axes,
            objective: Objective::Negativity,
            constraints: SweepConstraints::default(),
            dephasing: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > MAX_AXES {
            return Err(Error::InvalidArgument(format!(
                "need 1 to {MAX_AXES} axes, got {}",
                self.axes.len()
            )));
        }
        for a in &self.axes {
            a.check()?;
        }
        for (i, a) in self.axes.iter().enumerate() {
            if self.axes[..i].iter().any(|b| b.name == a.name) {
                return Err(Error::InvalidArgument(format!("axis `{}` given twice", a.name)));
            }
        }
        let c = &self.constraints;
        if !(c.cp_ratio_max > 0.0) {
            return Err(Error::InvalidArgument("cpRatioMax must be > 0".into()));
        }
        if !(c.require_tau_coll_over >= 1.0) {
            return Err(Error::InvalidArgument("requireTauCollOver must be >= 1".into()));
        }
        if !(c.b_residual >= 0.0) {
            return Err(Error::InvalidArgument("bResidual must be >= 0".into()));
        }
        Ok(())
    }

    pub fn grid_size(&self) -> usize {
        self.axes.iter().map(|a| a.values().len()).product()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepRow {
    /// One value per axis, in axis order.
    pub params: Vec<f64>,
    #[serde(rename = "dPhiLR")]
    pub d_phi_lr: f64,
    #[serde(rename = "dPhiRL")]
    pub d_phi_rl: f64,
    pub objective: f64,
    pub cp_ratio: f64,
    pub tau_coll: f64,
    pub feasible: bool,
    pub reason: String,
}

impl SweepRow {
    fn rejected(params: Vec<f64>, reason: String) -> Self {
        SweepRow {
            params,
            d_phi_lr: f64::NAN,
            d_phi_rl: f64::NAN,
            objective: f64::NAN,
            cp_ratio: f64::NAN,
            tau_coll: f64::NAN,
            feasible: false,
            reason,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepResult {
    pub axis_names: Vec<String>,
    pub rows: Vec<SweepRow>,
}

pub const CSV_TRAILER: [&str; 7] = [
    "dPhiLR",
    "dPhiRL",
    "objective",
    "cpRatio",
    "tauColl",
    "feasible",
    "reason",
];

impl SweepResult {
    /// Fixed header: axis names, then dPhiLR,dPhiRL,objective,cpRatio,tauColl,feasible,reason.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let header: Vec<&str> = self.axis_names.iter().map(String::as_str).chain(CSV_TRAILER).collect();
        w.write_record(&header).expect("in-memory write");
        for r in &self.rows {
            let mut rec: Vec<String> = r.params.iter().map(|&x| sig12(x)).collect();
            rec.extend([
                sig12(r.d_phi_lr),
                sig12(r.d_phi_rl),
                sig12(r.objective),
                sig12(r.cp_ratio),
                sig12(r.tau_coll),
                r.feasible.to_string(),
                r.reason.clone(),
            ]);
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    /// Rows as objects keyed like the CSV header.
    pub fn to_json(&self) -> serde_json::Value {
        let num = |x: f64| {
            if x.is_finite() {
                serde_json::json!(x)
            } else {
                serde_json::Value::Null
            }
        };
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut m = serde_json::Map::new();
                for (name, &v) in self.axis_names.iter().zip(&r.params) {
                    m.insert(name.clone(), num(v));
                }
                m.insert("dPhiLR".into(), num(r.d_phi_lr));
                m.insert("dPhiRL".into(), num(r.d_phi_rl));
                m.insert("objective".into(), num(r.objective));
                m.insert("cpRatio".into(), num(r.cp_ratio));
                m.insert("tauColl".into(), num(r.tau_coll));
                m.insert("feasible".into(), r.feasible.into());
                m.insert("reason".into(), r.reason.clone().into());
                serde_json::Value::Object(m)
            })
            .collect();
        serde_json::Value::Array(rows)
    }
}

fn configure(spec: &SweepSpec, base: &ExperimentConfig, params: &[f64]) -> Result<ExperimentConfig> {
    let mut c = *base;
    for (axis, &v) in spec.axes.iter().zip(params) {
        c.set(&axis.name, v)?;
    }
    Ok(c)
}

/// Objective and feasibility of a single parameter point.
pub fn evaluate_point(spec: &SweepSpec, base: &ExperimentConfig, params: &[f64]) -> SweepRow {
    let params = params.to_vec();
    let config = match configure(spec, base, &params).and_then(|c| c.validate()) {
        Ok(v) => v.config,
        Err(e) => return SweepRow::rejected(params, e.to_string()),
    };
    let phases = static_phases(&config);
    let mut state = entangled_state(phases.d_phi_lr, phases.d_phi_rl);
    let mut reasons = Vec::new();
    if spec.dephasing {
        match dephasing_budget(&config).and_then(|b| {
            let p = b.channel_probability();
            apply_dephasing(&state, p, p)
        }) {
            Ok(s) => state = s,
            Err(e) => reasons.push(format!("dephasing: {e}")),
        }
    }
    let objective = if reasons.is_empty() {
        match spec.objective {
            Objective::Negativity => negativity(&state),
            Objective::Witness => witness(&state, WitnessSettings::default()).w,
            Objective::WitnessOptimized => optimize_witness(&state).1.w,
        }
    } else {
        f64::NAN
    };
    let (cp, tau_coll, feasible) = match feasibility_report_with(&config, &spec.constraints.limits()) {
        Ok(r) => {
            reasons.extend(r.reasons);
            (r.cp_ratio, r.tau_coll, r.feasible)
        }
        Err(e) => {
            reasons.push(e.to_string());
            (cp_ratio(&config).unwrap_or(f64::NAN), f64::NAN, false)
        }
    };
    SweepRow {
        params,
        d_phi_lr: phases.d_phi_lr,
        d_phi_rl: phases.d_phi_rl,
        objective,
        cp_ratio: cp,
        tau_coll,
        feasible: feasible && reasons.is_empty(),
        reason: reasons.join("; "),
    }
}

fn grid_points(spec: &SweepSpec) -> Vec<Vec<f64>> {
    let values: Vec<Vec<f64>> = spec.axes.iter().map(Axis::values).collect();
    let total: usize = values.iter().map(Vec::len).product();
    (0..total)
        .map(|mut idx| {
            let mut p = vec![0.0; values.len()];
            for (slot, vals) in p.iter_mut().zip(&values).rev() {
                *slot = vals[idx % vals.len()];
                idx /= vals.len();
            }
            p
        })
        .collect()
}

/// Evaluates every grid point on the global rayon pool.
pub fn run_sweep(spec: &SweepSpec, base: &ExperimentConfig) -> Result<SweepResult> {
    spec.validate()?;
    let points = grid_points(spec);
    if points.is_empty() {
        return Err(Error::InvalidArgument("empty grid".into()));
    }
    let rows = points.par_iter().map(|p| evaluate_point(spec, base, p)).collect();
    Ok(SweepResult {
        axis_names: spec.axes.iter().map(|a| a.name.clone()).collect(),
        rows,
    })
}

/// [`run_sweep`] on a dedicated pool of `threads` workers.
pub fn run_sweep_with_threads(spec: &SweepSpec, base: &ExperimentConfig, threads: usize) -> Result<SweepResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    pool.install(|| run_sweep(spec, base))
}

fn score(row: &SweepRow) -> f64 {
    if row.feasible && row.objective.is_finite() {
        row.objective
    } else {
        f64::NEG_INFINITY
    }
}

/// Best feasible grid point refined by coordinate descent.
///
/// Each pass runs a golden-section search along every free axis, bracketed by
/// the grid neighbours of the incumbent, with infeasible points scored -inf.
/// A move is taken only if it is feasible and strictly improves the
/// objective, so the result dominates every feasible grid row.
pub fn maximize(spec: &SweepSpec, base: &ExperimentConfig) -> Result<(ExperimentConfig, SweepRow)> {
    let grid = run_sweep(spec, base)?;
    maximize_from(spec, base, &grid)
}

/// As [`maximize`], reusing an already evaluated grid.
pub fn maximize_from(
    spec: &SweepSpec,
    base: &ExperimentConfig,
    grid: &SweepResult,
) -> Result<(ExperimentConfig, SweepRow)> {
    let mut best: Option<&SweepRow> = None;
    for r in &grid.rows {
        if score(r) > best.map_or(f64::NEG_INFINITY, score) {
            best = Some(r);
        }
    }
    let mut best = best.ok_or(Error::NoFeasiblePoint)?.clone();

    for _ in 0..DESCENT_PASSES {
        let mut moved = false;
        for (i, axis) in spec.axes.iter().enumerate() {
            if axis.pinned() {
                continue;
            }
            let cell = 1.0 / (axis.count - 1) as f64;
            let u0 = axis.to_unit(best.params[i]);
            let (lo, hi) = ((u0 - cell).max(0.0), (u0 + cell).min(1.0));
            let probe = |u: f64| {
                let mut p = best.params.clone();
                p[i] = axis.at(u);
                evaluate_point(spec, base, &p)
            };
            let u = golden_section(|u| score(&probe(u)), lo, hi, GOLDEN_ITERATIONS);
            for cand in [probe(u), probe(lo), probe(hi)] {
                if score(&cand) > score(&best) {
                    best = cand;
                    moved = true;
                }
            }
        }
        if !moved {
            break;
        }
    }
    let config = configure(spec, base, &best.params)?.validate()?.config;
    Ok((config, best))
}

fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut a = hi - r * (hi - lo);
    let mut b = lo + r * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..iters {
        if fa >= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - r * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + r * (hi - lo);
            fb = f(b);
        }
    }
    if fa >= fb {
        a
    } else {
        b
    }
}
