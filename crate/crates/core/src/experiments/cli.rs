//! `fdtwr solve | sweep | verify`.
//!
//! Exit codes: 0 success, 1 infeasible scenario (or failed verification),
//! 2 bad configuration or usage.

use super::config::{parse_scenario_config, ConfigError, ScenarioConfig};
use super::sweep::{emit_csv, run_sweep, Axis, AxisRange, SweepSpec};
use crate::model::{CircuitAccounting, PaKind, Scenario, Strategy};
use crate::oracle::{feasible_corpus, grid_search, verify_necessary_conditions};
use crate::solver::{solve, SolverConfig};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use std::io::Write;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "fdtwr",
    version,
    about = "Energy-efficient two-way relay scheduling"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Scenario file (`key = value` lines), or `defaults`.
    #[arg(long, value_name = "PATH", default_value = "defaults")]
    config: String,
    /// Circuit-power accounting: printed or first-principles.
    #[arg(long, value_parser = parse_from_str::<CircuitAccounting>)]
    accounting: Option<CircuitAccounting>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Optimise one scenario and print the schedule.
    Solve {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_from_str::<Strategy>)]
        strategy: Option<Strategy>,
        #[arg(long, value_parser = parse_from_str::<PaKind>)]
        pa: Option<PaKind>,
        /// Use the high-load approximation of the single-slot powers.
        #[arg(long)]
        asymptotic: bool,
        /// Cross-check against the brute-force grid.
        #[arg(long)]
        oracle: bool,
    },
    /// Sweep one or two parameters and write CSV.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// alpha_db, total_rate_mbps, traffic_ratio or eta_max.
        #[arg(long, value_parser = parse_from_str::<Axis>)]
        axis: Axis,
        #[arg(long, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, allow_hyphen_values = true)]
        to: f64,
        #[arg(long)]
        step: f64,
        #[arg(long, value_parser = parse_from_str::<Axis>, requires_all = ["from2", "to2", "step2"])]
        axis2: Option<Axis>,
        #[arg(long, allow_hyphen_values = true)]
        from2: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        to2: Option<f64>,
        #[arg(long)]
        step2: Option<f64>,
        /// Strategies to include (repeatable); all by default.
        #[arg(long, value_parser = parse_from_str::<Strategy>)]
        strategy: Vec<Strategy>,
        /// PA kinds to include (repeatable); the config's by default.
        #[arg(long, value_parser = parse_from_str::<PaKind>)]
        pa: Vec<PaKind>,
        /// Write CSV here instead of stdout.
        #[arg(long, value_name = "PATH")]
        out: Option<String>,
    },
    /// Check the solver against the oracle on a seeded random corpus.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Scenarios per strategy and PA kind.
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, value_parser = parse_from_str::<Strategy>)]
        strategy: Vec<Strategy>,
        #[arg(long, value_parser = parse_from_str::<PaKind>)]
        pa: Vec<PaKind>,
        /// Accepted but implied: verify always runs the oracle.
        #[arg(long)]
        oracle: bool,
    },
}

fn parse_from_str<T: std::str::FromStr<Err = String>>(s: &str) -> Result<T, String> {
    s.parse()
}

fn load_config(common: &Common) -> Result<ScenarioConfig, ConfigError> {
    let mut cfg = if common.config == "defaults" {
        ScenarioConfig::default()
    } else {
        let text = std::fs::read_to_string(&common.config).map_err(|e| ConfigError::Io {
            path: common.config.clone(),
            reason: e.to_string(),
        })?;
        parse_scenario_config(&text)?
    };
    if let Some(a) = common.accounting {
        cfg.accounting = a;
    }
    Ok(cfg)
}

/// Run the CLI with explicit output streams; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let result = match cli.cmd {
        Command::Solve {
            common,
            strategy,
            pa,
            asymptotic,
            oracle,
        } => load_config(&common).and_then(|mut cfg| {
            cfg.strategy = strategy.unwrap_or(cfg.strategy);
            cfg.pa = pa.unwrap_or(cfg.pa);
            cfg.asymptotic_1ts |= asymptotic;
            run_solve(&cfg.to_scenario()?, oracle, out, err)
        }),
        Command::Sweep {
            common,
            axis,
            from,
            to,
            step,
            axis2,
            from2,
            to2,
            step2,
            strategy,
            pa,
            out: path,
        } => load_config(&common).and_then(|cfg| {
            let mut spec = SweepSpec::new(cfg, AxisRange::new(axis, from, to, step)?);
            if let (Some(a), Some(f), Some(t), Some(s)) = (axis2, from2, to2, step2) {
                spec.axis2 = Some(AxisRange::new(a, f, t, s)?);
            }
            if !strategy.is_empty() {
                spec.strategies = strategy;
            }
            if !pa.is_empty() {
                spec.pa_kinds = pa;
            }
            run_sweep_cmd(&spec, path.as_deref(), out)
        }),
        Command::Verify {
            common,
            seed,
            count,
            strategy,
            pa,
            oracle: _,
        } => load_config(&common).and_then(|cfg| {
            let strategies = if strategy.is_empty() {
                Strategy::ALL.to_vec()
            } else {
                strategy
            };
            let pas = if pa.is_empty() {
                PaKind::ALL.to_vec()
            } else {
                pa
            };
            run_verify(&cfg, seed, count, &strategies, &pas, out)
        }),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_CONFIG
        }
    }
}

fn run_solve(
    s: &Scenario,
    oracle: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, ConfigError> {
    let cfg = SolverConfig {
        oracle_check: oracle,
        ..SolverConfig::default()
    };
    let sched = match solve(s, &cfg) {
        Ok(x) => x,
        Err(e) if e.is_infeasibility() => {
            let _ = writeln!(err, "{e}");
            let _ = writeln!(
                out,
                "strategy: {}\nfeasible: false\nreason: {e}",
                s.strategy
            );
            return Ok(EXIT_INFEASIBLE);
        }
        Err(e) => return Err(e.into()),
    };
    let mut text = format!(
        "strategy: {}\npa: {}\nfeasible: true\nt1_s: {:.9e}\nt2_s: {:.9e}\np_a_w: {:.9e}\np_b_w: {:.9e}\n\
         p_r_fwd_w: {:.9e}\np_r_rev_w: {:.9e}\ne_total_j: {:.9e}\nee_bit_per_j: {:.9e}\n",
        sched.strategy,
        s.pa.a.kind,
        sched.t1,
        sched.t2,
        sched.p_a,
        sched.p_b,
        sched.p_r_fwd,
        sched.p_r_rev,
        sched.e_total,
        sched.ee
    );
    if let Some(b) = sched.active_broadcast {
        text += &format!("active_broadcast: {b:?}\n");
    }
    if let Some(r) = &sched.oracle {
        text += &format!(
            "oracle_grid_energy_j: {}\noracle_relative_gap: {}\noracle_below_anchor_feasible: {}\n\
             oracle_condition: {}\noracle_convexity_violations: {}/{}\n",
            r.grid_best
                .map_or("none".into(), |g| format!("{:.9e}", g.energy)),
            r.relative_gap.map_or("none".into(), |g| format!("{g:.3e}")),
            r.below_anchor_feasible,
            r.condition_violation.as_deref().unwrap_or("ok"),
            r.convexity.violations,
            r.convexity.samples,
        );
    }
    let _ = out.write_all(text.as_bytes());
    Ok(EXIT_OK)
}

fn run_sweep_cmd(
    spec: &SweepSpec,
    path: Option<&str>,
    out: &mut dyn Write,
) -> Result<i32, ConfigError> {
    let rows = run_sweep(spec)?;
    let io_err = |e: csv::Error| ConfigError::Io {
        path: path.unwrap_or("stdout").to_string(),
        reason: e.to_string(),
    };
    match path {
        Some(p) => {
            let f = std::fs::File::create(p).map_err(|e| ConfigError::Io {
                path: p.to_string(),
                reason: e.to_string(),
            })?;
            emit_csv(&rows, std::io::BufWriter::new(f)).map_err(io_err)?;
        }
        None => emit_csv(&rows, out).map_err(io_err)?,
    }
    Ok(EXIT_OK)
}

/// Solver-vs-oracle summary for one strategy and PA kind.
struct VerifyLine {
    strategy: Strategy,
    pa: PaKind,
    scenarios: usize,
    worst_gap: f64,
    grid_wins: usize,
    refuted: usize,
    condition_failures: usize,
}

fn run_verify(
    base: &ScenarioConfig,
    seed: u64,
    count: usize,
    strategies: &[Strategy],
    pas: &[PaKind],
    out: &mut dyn Write,
) -> Result<i32, ConfigError> {
    let base = base.to_scenario()?;
    let mut all_ok = true;
    for &st in strategies {
        for &pa in pas {
            let corpus = feasible_corpus(seed, count, st, pa);
            let per: Vec<(f64, bool, usize)> = corpus
                .par_iter()
                .map(|s| {
                    let s = Scenario {
                        accounting: base.accounting,
                        ..s.clone()
                    };
                    let sched = solve(&s, &SolverConfig::default());
                    let grid = grid_search(&s, 50, 20);
                    match (sched, grid) {
                        (Ok(sched), Ok(g)) => {
                            let gap = (sched.e_total - g.best.energy) / g.best.energy;
                            let cond = verify_necessary_conditions(&s, &sched, 1e-9).is_ok();
                            (gap, cond, g.below_anchor_feasible)
                        }
                        _ => (f64::INFINITY, false, 0),
                    }
                })
                .collect();
            let line = VerifyLine {
                strategy: st,
                pa,
                scenarios: per.len(),
                worst_gap: per.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max),
                grid_wins: per.iter().filter(|p| p.0 > 0.01).count(),
                refuted: per.iter().map(|p| p.2).sum(),
                condition_failures: per.iter().filter(|p| !p.1).count(),
            };
            let ok = line.grid_wins == 0 && line.refuted == 0 && line.condition_failures == 0;
            all_ok &= ok;
            let _ = writeln!(
                out,
                "{} {}: {} scenarios, worst gap {:+.3e}, grid wins {}, below-minimum feasible {}, condition failures {} -> {}",
                line.strategy,
                line.pa,
                line.scenarios,
                line.worst_gap,
                line.grid_wins,
                line.refuted,
                line.condition_failures,
                if ok { "PASS" } else { "FAIL" }
            );
        }
    }
    Ok(if all_ok { EXIT_OK } else { EXIT_INFEASIBLE })
}
