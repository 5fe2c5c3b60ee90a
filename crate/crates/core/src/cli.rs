//! Command-line front end. [`run`] parses arguments, dispatches to the library
//! and maps failures to exit codes: 0 success, 1 computation or infeasibility,
//! 2 usage or configuration errors.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::constraints::{feasibility_report_with, Limits, DEFAULT_TARGET_RATIO};
use crate::decoherence::{dephasing_budget, gas_de_broglie_wavelength, gas_density};
use crate::error::{Error, Result};
use crate::gravfield::{classicalization_report, convergence_study, DEFAULT_MODES};
use crate::gravphase::{mutual_acceleration, pairwise_separations, small_split_phase, static_phases};
use crate::report::{render, Format};
use crate::spinstate::{apply_dephasing, entangled_state, negativity, optimize_witness, witness, WitnessSettings};
use crate::sweep::{self, Axis, Objective, SweepSpec};

pub const THREADS_ENV: &str = "GRAVWITNESS_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "gravwitness",
    version,
    about = "Spin-witness simulator for gravitationally induced entanglement"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Experiment configuration (JSON).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Use the built-in reference scenario instead of a file.
    #[arg(long, global = true)]
    paper_defaults: bool,
    /// Output format; sweeps default to csv, everything else to json.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Parameter override, applied after loading and before validation.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Write results here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Branch separations and gravitational phases.
    Phases,
    /// Two-spin density matrix after recombination.
    State {
        /// Apply the environmental dephasing budget.
        #[arg(long)]
        dephase: bool,
    },
    /// Witness value, its optimum over local z rotations, and negativity.
    Witness {
        #[arg(long, default_value_t = 0.0)]
        b_residual: f64,
    },
    /// Casimir-Polder and magnetic ratios, minimum separation, feasibility.
    Constraints {
        #[arg(long, default_value_t = DEFAULT_TARGET_RATIO)]
        target_ratio: f64,
        #[arg(long, default_value_t = 0.0)]
        b_residual: f64,
        #[arg(long, default_value_t = 1.0)]
        tau_coll_factor: f64,
    },
    /// Collisional and thermal decoherence rates.
    Decoherence {
        /// Extra spin-bath dephasing probability.
        #[arg(long, default_value_t = 0.0)]
        spin_bath: f64,
    },
    /// Quantised-field model: grid convergence and classicalisation.
    Field {
        /// Grid sizes for the convergence table.
        #[arg(long, value_delimiter = ',', default_values_t = [1_000usize, 10_000, 100_000, DEFAULT_MODES])]
        grid: Vec<usize>,
        /// Modes used for the entanglement comparison.
        #[arg(long, default_value_t = DEFAULT_MODES)]
        modes: usize,
    },
    /// Grid sweep over up to four parameters.
    Sweep {
        /// name:min:max:count[:lin|log]
        #[arg(long = "axis", required = true)]
        axes: Vec<String>,
        #[arg(long, value_enum, default_value_t = Objective::Negativity)]
        objective: Objective,
        #[arg(long, default_value_t = DEFAULT_TARGET_RATIO)]
        cp_ratio_max: f64,
        #[arg(long, default_value_t = 1.0)]
        tau_coll_factor: f64,
        #[arg(long, default_value_t = 0.0)]
        b_residual: f64,
        /// Evaluate the objective on the undephased state.
        #[arg(long)]
        no_dephasing: bool,
        /// Refine the best feasible grid point and report it instead of the grid.
        #[arg(long)]
        maximize: bool,
    },
    /// Print the reference configuration.
    Defaults,
}

/// Failure after arguments parsed; carries the exit code.
enum Failure {
    Usage(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_usage() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Compute(e.to_string())
        }
    }
}

/// Output plus whether it represents an infeasible result (exit 1).
struct Outcome {
    body: String,
    infeasible: Option<String>,
}

pub fn run(args: Vec<String>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                2
            } else {
                let _ = write!(stdout, "{text}");
                0
            };
        }
    };
    let outcome = execute(&cli, stderr);
    let outcome = match outcome {
        Ok(o) => o,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(stderr, "error: {m}");
            return 2;
        }
        Err(Failure::Compute(m)) => {
            let _ = writeln!(stderr, "error: {m}");
            return 1;
        }
    };
    let written = match &cli.global.out {
        Some(path) => std::fs::write(path, &outcome.body),
        None => stdout.write_all(outcome.body.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: cannot write output: {e}");
        return 2;
    }
    match outcome.infeasible {
        Some(why) => {
            let _ = writeln!(stderr, "infeasible: {why}");
            1
        }
        None => 0,
    }
}

fn load_config(g: &Global, stderr: &mut dyn Write) -> std::result::Result<ExperimentConfig, Failure> {
    let mut config = match (&g.config, g.paper_defaults) {
        (Some(_), true) => {
            return Err(Failure::Usage(
                "--config and --paper-defaults are mutually exclusive".into(),
            ))
        }
        (None, false) => {
            return Err(Failure::Usage(
                "one of --config <PATH> or --paper-defaults is required".into(),
            ))
        }
        (None, true) => ExperimentConfig::paper_defaults(),
        (Some(path), false) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            ExperimentConfig::from_json(&text)?
        }
    };
    for o in &g.overrides {
        config.apply_override(o)?;
    }
    let v = config.validate()?;
    for w in &v.warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    Ok(v.config)
}

fn sweep_threads() -> std::result::Result<Option<usize>, Failure> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Failure::Usage(format!(
                "{THREADS_ENV} must be a positive integer, got `{s}`"
            ))),
        },
    }
}

fn execute(cli: &Cli, stderr: &mut dyn Write) -> std::result::Result<Outcome, Failure> {
    let g = &cli.global;
    let format = g.format.unwrap_or(match cli.command {
        Command::Sweep { maximize: false, .. } => Format::Csv,
        _ => Format::Json,
    });
    let done = |v: Value| -> std::result::Result<Outcome, Failure> {
        Ok(Outcome {
            body: render(&v, format)?,
            infeasible: None,
        })
    };

    if let Command::Defaults = cli.command {
        let mut config = ExperimentConfig::paper_defaults();
        for o in &g.overrides {
            config.apply_override(o)?;
        }
        config.validate()?;
        if format == Format::Json {
            return Ok(Outcome {
                body: config.to_json() + "\n",
                infeasible: None,
            });
        }
        return done(serde_json::to_value(config).map_err(Error::from)?);
    }

    // Parse the axes before touching the config so malformed input never
    // produces partial output.
    let spec = match &cli.command {
        Command::Sweep {
            axes,
            objective,
            cp_ratio_max,
            tau_coll_factor,
            b_residual,
            no_dephasing,
            ..
        } => {
            let mut spec = SweepSpec::new(axes.iter().map(|a| Axis::parse(a)).collect::<Result<_>>()?);
            spec.objective = *objective;
            spec.constraints.cp_ratio_max = *cp_ratio_max;
            spec.constraints.require_tau_coll_over = *tau_coll_factor;
            spec.constraints.b_residual = *b_residual;
            spec.dephasing = !*no_dephasing;
            spec.validate()?;
            Some(spec)
        }
        _ => None,
    };
    let threads = if spec.is_some() { sweep_threads()? } else { None };
    let config = load_config(g, stderr)?;

    match &cli.command {
        Command::Phases => {
            let small = small_split_phase(&config).ok();
            done(json!({
                "dx": config.split(),
                "separations": pairwise_separations(&config),
                "phases": static_phases(&config),
                "smallSplitPhase": small,
                "mutualAcceleration": mutual_acceleration(&config),
            }))
        }
        Command::State { dephase } => {
            let ph = static_phases(&config);
            let mut state = entangled_state(ph.d_phi_lr, ph.d_phi_rl);
            let mut p = 0.0;
            if *dephase {
                p = dephasing_budget(&config)?.channel_probability();
                state = apply_dephasing(&state, p, p)?;
            }
            let rho = state.matrix();
            let mut entries = Vec::new();
            for r in 0..4 {
                for c in 0..4 {
                    entries.push(json!({"row": r, "col": c, "re": rho[(r, c)].re, "im": rho[(r, c)].im}));
                }
            }
            done(json!({
                "dPhiLR": ph.d_phi_lr,
                "dPhiRL": ph.d_phi_rl,
                "dephasingProbability": p,
                "purity": state.purity(),
                "negativity": negativity(&state),
                "rho": entries,
            }))
        }
        Command::Witness { b_residual } => {
            let ph = static_phases(&config);
            let state = entangled_state(ph.d_phi_lr, ph.d_phi_rl);
            let plain = witness(&state, WitnessSettings::default());
            let (settings, best) = optimize_witness(&state);
            let limits = Limits {
                b_residual: *b_residual,
                ..Limits::default()
            };
            let report = feasibility_report_with(&config, &limits)?;
            done(json!({
                "dPhiLR": ph.d_phi_lr,
                "dPhiRL": ph.d_phi_rl,
                "w": plain.w,
                "expXZ": plain.exp_xz,
                "expYZ": plain.exp_yz,
                "wOptimized": best.w,
                "optimalSettings": settings,
                "negativity": plain.negativity,
                "entangledByNegativity": plain.entangled_by_negativity,
                "feasibility": {
                    "feasible": report.feasible,
                    "cpRatio": report.cp_ratio,
                    "magRatio": report.mag_ratio,
                    "tauColl": report.tau_coll,
                    "reasons": report.reasons,
                },
            }))
        }
        Command::Constraints {
            target_ratio,
            b_residual,
            tau_coll_factor,
        } => {
            let limits = Limits {
                target_ratio: *target_ratio,
                b_residual: *b_residual,
                tau_coll_factor: *tau_coll_factor,
            };
            let report = feasibility_report_with(&config, &limits)?;
            let infeasible = (!report.feasible).then(|| report.reasons.join("; "));
            let body = render(&serde_json::to_value(&report).map_err(Error::from)?, format)?;
            Ok(Outcome { body, infeasible })
        }
        Command::Decoherence { spin_bath } => {
            let rates = dephasing_budget(&config)?.with_spin_bath(*spin_bath)?;
            let density = if config.pressure > 0.0 {
                Some(gas_density(config.pressure, config.t_env)?)
            } else {
                None
            };
            done(json!({
                "rates": rates,
                "gammaThermal": rates.gamma_thermal(),
                "gammaTotal": rates.gamma_total(),
                "channelProbability": rates.channel_probability(),
                "gasDensity": density,
                "gasDeBroglieWavelength": gas_de_broglie_wavelength(config.m_gas, config.t_env),
                "superpositionSize": config.split(),
            }))
        }
        Command::Field { grid, modes } => {
            let table = convergence_study(&config, grid)?;
            let comparison = classicalization_report(&config, *modes)?;
            done(json!({ "convergence": table, "classicalization": comparison }))
        }
        Command::Sweep { maximize, .. } => {
            let spec = spec.expect("parsed above");
            let evaluate = |s: &SweepSpec| match threads {
                Some(n) => sweep::run_sweep_with_threads(s, &config, n),
                None => sweep::run_sweep(s, &config),
            };
            let grid = evaluate(&spec)?;
            if *maximize {
                let (best_config, row) = sweep::maximize_from(&spec, &config, &grid)?;
                let mut params = serde_json::Map::new();
                for (a, v) in spec.axes.iter().zip(&row.params) {
                    params.insert(a.name.clone(), json!(v));
                }
                return done(json!({
                    "objective": row.objective,
                    "params": params,
                    "dPhiLR": row.d_phi_lr,
                    "dPhiRL": row.d_phi_rl,
                    "cpRatio": row.cp_ratio,
                    "tauColl": row.tau_coll,
                    "bestConfig": best_config,
                }));
            }
            let body = match format {
                Format::Csv => grid.to_csv(),
                _ => render(&grid.to_json(), format)?,
            };
            Ok(Outcome { body, infeasible: None })
        }
        Command::Defaults => unreachable!("handled above"),
    }
}
