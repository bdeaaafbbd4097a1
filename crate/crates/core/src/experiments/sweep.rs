//! Parameter sweeps and their CSV form.

use super::config::{ConfigError, ScenarioConfig};
use crate::model::{PaKind, Strategy};
use crate::solver::{solve, SolverConfig};
use rayon::prelude::*;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    /// Self-interference cancellation, dB (all nodes).
    CancellationDb,
    /// `r_fl + r_rl` in Mbit/s, keeping the forward share.
    TotalRate,
    /// `r_fl / r_rl`, keeping the total.
    TrafficRatio,
    /// PA efficiency at full output, all nodes.
    PaEfficiency,
}

impl Axis {
    pub fn as_str(self) -> &'static str {
        match self {
            Axis::CancellationDb => "alpha_db",
            Axis::TotalRate => "total_rate_mbps",
            Axis::TrafficRatio => "traffic_ratio",
            Axis::PaEfficiency => "eta_max",
        }
    }

    /// `base` with this axis set to `v`.
    pub fn apply(self, base: &ScenarioConfig, v: f64) -> Result<ScenarioConfig, ConfigError> {
        let bad = |reason: &str| {
            ConfigError::Usage(format!("{} = {v} is out of range: {reason}", self.as_str()))
        };
        let mut c = base.clone();
        match self {
            Axis::CancellationDb => c.alpha_db = v,
            Axis::TotalRate => {
                if !(v > 0.0) {
                    return Err(bad("total rate must be positive"));
                }
                let share = base.r_fl_mbps / base.total_rate_mbps();
                c.r_fl_mbps = v * share;
                c.r_rl_mbps = v - c.r_fl_mbps;
            }
            Axis::TrafficRatio => {
                if !(v >= 0.0) || !v.is_finite() {
                    return Err(bad("ratio must be non-negative"));
                }
                let total = base.total_rate_mbps();
                c.r_fl_mbps = total * v / (1.0 + v);
                c.r_rl_mbps = total - c.r_fl_mbps;
            }
            Axis::PaEfficiency => {
                if !(v > 0.0 && v <= 1.0) {
                    return Err(bad("efficiency must lie in (0, 1]"));
                }
                c.eta_max = [v; 3];
            }
        }
        Ok(c)
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Axis {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "alpha_db" | "alpha" | "cancellation" => Ok(Axis::CancellationDb),
            "total_rate_mbps" | "rate" | "total_rate" => Ok(Axis::TotalRate),
            "traffic_ratio" | "ratio" => Ok(Axis::TrafficRatio),
            "eta_max" | "eta" | "pa_efficiency" => Ok(Axis::PaEfficiency),
            _ => Err(format!(
                "unknown axis `{s}` (expected alpha_db, total_rate_mbps, traffic_ratio or eta_max)"
            )),
        }
    }
}

/// Inclusive arithmetic range of axis values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisRange {
    pub axis: Axis,
    pub from: f64,
    pub to: f64,
    pub step: f64,
}

impl AxisRange {
    pub fn new(axis: Axis, from: f64, to: f64, step: f64) -> Result<Self, ConfigError> {
        if !(step > 0.0) || !(from <= to) || !from.is_finite() || !to.is_finite() {
            return Err(ConfigError::Usage(format!(
                "bad range for {axis}: from {from} to {to} step {step}"
            )));
        }
        Ok(AxisRange {
            axis,
            from,
            to,
            step,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        let n = ((self.to - self.from) / self.step + 1e-9).floor() as usize + 1;
        (0..n).map(|i| self.from + self.step * i as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: ScenarioConfig,
    pub axis1: AxisRange,
    pub axis2: Option<AxisRange>,
    pub strategies: Vec<Strategy>,
    pub pa_kinds: Vec<PaKind>,
    pub solver: SolverConfig,
}

impl SweepSpec {
    /// One-axis sweep of every strategy with the base PA kind.
    pub fn new(base: ScenarioConfig, axis1: AxisRange) -> Self {
        let pa = base.pa;
        SweepSpec {
            base,
            axis1,
            axis2: None,
            strategies: Strategy::ALL.to_vec(),
            pa_kinds: vec![pa],
            solver: SolverConfig::default(),
        }
    }
}

/// One solved (or infeasible) sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis1: (Axis, f64),
    pub axis2: Option<(Axis, f64)>,
    pub strategy: Strategy,
    pub pa: PaKind,
    pub r_fl_mbps: f64,
    pub r_rl_mbps: f64,
    pub outcome: Result<SweepPoint, String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    /// bit/J
    pub ee: f64,
    pub e_total: f64,
    pub t1: f64,
    pub t2: f64,
    pub p_a: f64,
    pub p_b: f64,
    pub p_r_fwd: f64,
    pub p_r_rev: f64,
}

impl SweepRow {
    pub fn feasible(&self) -> bool {
        self.outcome.is_ok()
    }

    pub fn ee(&self) -> Option<f64> {
        self.outcome.as_ref().ok().map(|p| p.ee)
    }
}

/// Solve every grid point. Rows come back ordered by axis-1 value, then
/// axis-2 value, strategy and PA kind, whatever the evaluation order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, ConfigError> {
    let v1 = spec.axis1.values();
    let v2: Vec<Option<f64>> = match &spec.axis2 {
        Some(r) => r.values().into_iter().map(Some).collect(),
        None => vec![None],
    };
    let mut jobs = Vec::new();
    for &x in &v1 {
        for &y in &v2 {
            for &st in &spec.strategies {
                for &pa in &spec.pa_kinds {
                    jobs.push((x, y, st, pa));
                }
            }
        }
    }
    jobs.into_par_iter()
        .map(|(x, y, st, pa)| -> Result<SweepRow, ConfigError> {
            let mut cfg = spec.axis1.axis.apply(&spec.base, x)?;
            let axis2 = match (&spec.axis2, y) {
                (Some(r), Some(y)) => {
                    cfg = r.axis.apply(&cfg, y)?;
                    Some((r.axis, y))
                }
                _ => None,
            };
            cfg.strategy = st;
            cfg.pa = pa;
            let s = cfg.to_scenario()?;
            let outcome = match solve(&s, &spec.solver) {
                Ok(sched) => Ok(SweepPoint {
                    ee: sched.ee,
                    e_total: sched.e_total,
                    t1: sched.t1,
                    t2: sched.t2,
                    p_a: sched.p_a,
                    p_b: sched.p_b,
                    p_r_fwd: sched.p_r_fwd,
                    p_r_rev: sched.p_r_rev,
                }),
                Err(e) if e.is_infeasibility() => Err(e.to_string()),
                Err(e) => return Err(e.into()),
            };
            Ok(SweepRow {
                axis1: (spec.axis1.axis, x),
                axis2,
                strategy: st,
                pa,
                r_fl_mbps: cfg.r_fl_mbps,
                r_rl_mbps: cfg.r_rl_mbps,
                outcome,
            })
        })
        .collect()
}

pub const CSV_HEADER: [&str; 18] = [
    "axis1",
    "axis1_value",
    "axis2",
    "axis2_value",
    "strategy",
    "pa",
    "r_fl_mbps",
    "r_rl_mbps",
    "feasible",
    "ee_bit_per_j",
    "e_total_j",
    "t1_s",
    "t2_s",
    "p_a_w",
    "p_b_w",
    "p_r_fwd_w",
    "p_r_rev_w",
    "note",
];

fn sci(x: f64) -> String {
    format!("{x:.9e}")
}

/// Write rows as CSV: header first, LF line endings, numbers in scientific
/// notation with ten significant digits, empty numeric fields for
/// infeasible points.
pub fn emit_csv<W: Write>(rows: &[SweepRow], sink: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        let mut rec: Vec<String> = vec![
            r.axis1.0.to_string(),
            sci(r.axis1.1),
            r.axis2.map(|a| a.0.to_string()).unwrap_or_default(),
            r.axis2.map(|a| sci(a.1)).unwrap_or_default(),
            r.strategy.to_string(),
            r.pa.to_string(),
            sci(r.r_fl_mbps),
            sci(r.r_rl_mbps),
            r.feasible().to_string(),
        ];
        match &r.outcome {
            Ok(p) => {
                rec.extend(
                    [
                        p.ee, p.e_total, p.t1, p.t2, p.p_a, p.p_b, p.p_r_fwd, p.p_r_rev,
                    ]
                    .map(sci),
                );
                rec.push(String::new());
            }
            Err(why) => {
                rec.extend(std::iter::repeat_n(String::new(), 8));
                rec.push(why.clone());
            }
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
