//! Scenario files, parameter sweeps, CSV output and the command-line front end.

pub mod cli;
pub mod config;
pub mod sweep;

pub use config::{parse_config, parse_scenario_config, ConfigError, ScenarioConfig};
pub use sweep::{emit_csv, run_sweep, Axis, AxisRange, SweepRow, SweepSpec};

use crate::model::{PaKind, Strategy};
use crate::solver::{solve, SolverConfig};

/// Largest total demand (Mbit/s) the strategy can serve for a fixed forward
/// share, by bisection on feasibility. `None` if even `lo_mbps` fails.
pub fn max_total_rate_mbps(
    base: &ScenarioConfig,
    strategy: Strategy,
    pa: PaKind,
    lo_mbps: f64,
    hi_mbps: f64,
    tol_mbps: f64,
) -> Option<f64> {
    let feasible = |total: f64| -> bool {
        let Ok(c) = Axis::TotalRate.apply(base, total) else {
            return false;
        };
        let c = ScenarioConfig { strategy, pa, ..c };
        let Ok(s) = c.to_scenario() else { return false };
        crate::feasibility::tmin(&s, &SolverConfig::default().bisection).is_ok()
    };
    if !feasible(lo_mbps) {
        return None;
    }
    let (mut lo, mut hi) = (lo_mbps, hi_mbps);
    if feasible(hi) {
        return Some(hi);
    }
    while hi - lo > tol_mbps {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}

/// Energy efficiency (bit/J) of one configuration, `None` when infeasible.
pub fn ee_at(cfg: &ScenarioConfig, solver: &SolverConfig) -> Result<Option<f64>, ConfigError> {
    let s = cfg.to_scenario()?;
    match solve(&s, solver) {
        Ok(sched) => Ok(Some(sched.ee)),
        Err(e) if e.is_infeasibility() => Ok(None),
        Err(e) => Err(e.into()),
    }
}
