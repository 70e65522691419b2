//! Command-line front end: loads configuration, dispatches to the solvers
//! and spectrum routines, and writes the CSV artifacts.
//!
//! Exit codes: 0 success, 1 physics/range failure, 2 usage or configuration
//! error. Identical inputs produce byte-identical output files.

mod runcfg;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use ppwg::report::fmt_sig;
use ppwg::{
    auto_slice, bandwidth_ratio_sweep, idler_from_energy, report, solve_poling_period,
    solve_pump_angles, solve_signal_idler, spectral_map, spectrum_slice, tuning_sweep,
    InteractionConfig, LambdaWindow, PeriodSolution, PhaseMatchSolution, SweepAxis, SweepSolve,
    ThetaRange, TuningCurve, TuningRow,
};
use runcfg::{GridSpec, RunConfig};

#[derive(Parser)]
#[command(
    name = "ppwg",
    version,
    about = "Quasi-phase-matched SPDC design toolkit for periodically poled waveguides",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct CommonOpts {
    /// Key = value config file; flags override file values.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Sellmeier data file (defaults to the shipped LiNbO3 e-index set).
    #[arg(long, value_name = "PATH")]
    sellmeier: Option<PathBuf>,
    /// Pump vacuum wavelength (nm).
    #[arg(long, value_name = "NM")]
    pump_nm: Option<f64>,
    /// Pump incidence angle inside the medium (degrees, 0..=90).
    #[arg(long, value_name = "DEG")]
    theta_deg: Option<f64>,
    /// Poling period (um).
    #[arg(long, value_name = "UM")]
    poling_um: Option<f64>,
    /// Poling duty cycle in [0, 1].
    #[arg(long)]
    duty: Option<f64>,
    /// Grating orders, comma separated (e.g. --orders=-1,1).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_name = "M,..")]
    orders: Option<Vec<i32>>,
    /// Interaction length (mm).
    #[arg(long, value_name = "MM")]
    length_mm: Option<f64>,
    /// Graded-index gradient constant (1/m).
    #[arg(long, value_name = "PER_M")]
    alpha: Option<f64>,
    /// Propagation-constant source: bulk | guided.
    #[arg(long, value_name = "MODE")]
    beta_mode: Option<String>,
    /// Signal/idler directions: co | counter.
    #[arg(long, value_name = "DIRS")]
    dirs: Option<String>,
    /// Spectral bracket handling: literal | squared.
    #[arg(long, value_name = "MODE")]
    clamp: Option<String>,
    /// Output CSV path (subcommand-specific default).
    #[arg(long, short, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the refractive index of the dispersion model.
    Index {
        /// Single wavelength to evaluate (nm).
        #[arg(long, value_name = "NM")]
        lambda_nm: Option<f64>,
        /// Wavelength sweep `lo:hi:step` in nm.
        #[arg(long, value_parser = GridSpec::parse, value_name = "LO:HI:STEP")]
        sweep: Option<GridSpec>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Quasi-phase-matching solvers and sweeps.
    #[command(subcommand)]
    Tuning(TuningCmd),
    /// Spectral slice vs signal wavelength with FWHM extraction.
    Spectrum {
        /// Explicit window `lo:hi:step` in nm (auto-sized around the
        /// quasi-phase-matched peak when omitted).
        #[arg(long, value_parser = GridSpec::parse, value_name = "LO:HI:STEP")]
        window: Option<GridSpec>,
        /// Pick the root nearest this wavelength for auto windows (nm).
        #[arg(long, value_name = "NM")]
        target_nm: Option<f64>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Bandwidth-ratio table across central signal wavelengths.
    BandwidthRatio {
        /// Central signal wavelengths (nm), comma separated.
        #[arg(long, value_delimiter = ',', value_name = "NM,..")]
        signals: Option<Vec<f64>>,
        /// Reference wavelength dividing all bandwidths (nm).
        #[arg(long, value_name = "NM")]
        reference_nm: Option<f64>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Angle-by-wavelength spectral intensity map.
    Specmap {
        /// Pump-angle grid `lo:hi:step` in degrees.
        #[arg(long, value_parser = GridSpec::parse, value_name = "LO:HI:STEP")]
        theta_range: Option<GridSpec>,
        /// Wavelength grid `lo:hi:step` in nm.
        #[arg(long, value_parser = GridSpec::parse, value_name = "LO:HI:STEP")]
        window: Option<GridSpec>,
        #[command(flatten)]
        common: CommonOpts,
    },
}

#[derive(Subcommand)]
enum TuningCmd {
    /// Solve the poling period for a pair at the configured angle.
    Period {
        #[arg(long, value_name = "NM")]
        signal_nm: Option<f64>,
        #[arg(long, value_name = "NM")]
        idler_nm: Option<f64>,
        /// Grating order (nonzero).
        #[arg(long, allow_hyphen_values = true, value_name = "M")]
        order: Option<i32>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Solve all pump angles for a pair at the configured period.
    Angles {
        #[arg(long, value_name = "NM")]
        signal_nm: Option<f64>,
        #[arg(long, value_name = "NM")]
        idler_nm: Option<f64>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Solve all signal/idler pairs at the configured angle and period.
    Pairs {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Sweep an axis and solve at every node.
    Sweep {
        /// Sweep axis: theta | period.
        #[arg(long, value_name = "AXIS")]
        axis: Option<String>,
        /// Solver per node: pairs | period | angles.
        #[arg(long, value_name = "SOLVE")]
        solve: Option<String>,
        /// Axis grid `lo:hi:step` (degrees for theta, um for period).
        #[arg(long, value_parser = GridSpec::parse, value_name = "LO:HI:STEP")]
        range: Option<GridSpec>,
        #[arg(long, value_name = "NM")]
        signal_nm: Option<f64>,
        #[arg(long, value_name = "NM")]
        idler_nm: Option<f64>,
        #[command(flatten)]
        common: CommonOpts,
    },
}

enum CliError {
    Usage(String),
    Run(ppwg::Error),
}

impl From<ppwg::Error> for CliError {
    fn from(e: ppwg::Error) -> Self {
        CliError::Run(e)
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn main() {
    std::process::exit(run(std::env::args_os()));
}

fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return 2;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            2
        }
        Err(CliError::Run(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// Resolve defaults -> config file -> flags, then validate.
fn resolve(common: &CommonOpts) -> CliResult<RunConfig> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path).map_err(|e| usage(e.to_string()))?,
        None => RunConfig::default(),
    };
    if let Some(p) = &common.sellmeier {
        cfg.sellmeier_path = Some(p.clone());
    }
    if let Some(v) = common.pump_nm {
        cfg.pump_wavelength_nm = v;
    }
    if let Some(v) = common.theta_deg {
        cfg.theta_deg = v;
    }
    if let Some(v) = common.poling_um {
        cfg.poling_period_um = v;
    }
    if let Some(v) = common.duty {
        cfg.duty = v;
    }
    if let Some(v) = &common.orders {
        cfg.orders = v.clone();
    }
    if let Some(v) = common.length_mm {
        cfg.length_mm = v;
    }
    if let Some(v) = common.alpha {
        cfg.grin_alpha_per_m = v;
    }
    if let Some(v) = &common.beta_mode {
        cfg.beta_mode = ppwg::BetaMode::parse(v)
            .ok_or_else(|| usage(format!("--beta-mode expects bulk|guided, got `{v}`")))?;
    }
    if let Some(v) = &common.dirs {
        cfg.directions = ppwg::DirectionPair::parse(v)
            .ok_or_else(|| usage(format!("--dirs expects co|counter, got `{v}`")))?;
    }
    if let Some(v) = &common.clamp {
        cfg.clamp = ppwg::ClampMode::parse(v)
            .ok_or_else(|| usage(format!("--clamp expects literal|squared, got `{v}`")))?;
    }
    if let Some(p) = &common.output {
        cfg.output_path = Some(p.clone());
    }
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    Ok(cfg)
}

/// Nominal signal/idler flags mapped onto an exactly energy-conserving pair.
/// A given idler must agree with the conjugate of the signal to 1%.
fn resolve_pair(
    cfg: &RunConfig,
    signal_nm: Option<f64>,
    idler_nm: Option<f64>,
) -> CliResult<(f64, f64)> {
    let signal = match (signal_nm, idler_nm) {
        (Some(s), _) => s,
        // an idler alone determines the signal by energy conservation
        (None, Some(i)) => {
            idler_from_energy(cfg.pump_wavelength_nm, i).map_err(|e| usage(e.to_string()))?
        }
        (None, None) => 2.0 * cfg.pump_wavelength_nm,
    };
    let conjugate =
        idler_from_energy(cfg.pump_wavelength_nm, signal).map_err(|e| usage(e.to_string()))?;
    if let (Some(idler), Some(_)) = (idler_nm, signal_nm) {
        if ((idler - conjugate) / conjugate).abs() > 0.01 {
            return Err(usage(format!(
                "--idler-nm {idler} is inconsistent with --signal-nm {signal} \
                 (energy conservation gives {} nm)",
                fmt_sig(conjugate)
            )));
        }
    }
    Ok((signal, conjugate))
}

fn write_artifact(path: &PathBuf, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|e| CliError::Run(e.into()))
}

fn out_path(cfg: &RunConfig, default_name: &str) -> PathBuf {
    cfg.output_path
        .clone()
        .unwrap_or_else(|| PathBuf::from(default_name))
}

fn base_comments(artifact: &str, cfg: &InteractionConfig<f64>) -> Vec<String> {
    vec![
        format!("artifact = {artifact}"),
        format!("config = {}", cfg.fingerprint()),
    ]
}

fn describe_solutions(solutions: &[PhaseMatchSolution<f64>], what: &str) -> String {
    if solutions.is_empty() {
        return format!("no {what} roots");
    }
    let parts: Vec<String> = solutions
        .iter()
        .map(|s| match what {
            "angle" => format!("{} deg (m={})", fmt_sig(s.theta_deg), s.order),
            _ => format!(
                "{}/{} nm (m={})",
                fmt_sig(s.lambda_s_nm),
                fmt_sig(s.lambda_i_nm),
                s.order
            ),
        })
        .collect();
    format!("{} {} root(s): {}", solutions.len(), what, parts.join(", "))
}

fn single_row_curve(
    axis_value: f64,
    solutions: Vec<PhaseMatchSolution<f64>>,
    orders: Vec<i32>,
    note: Option<String>,
) -> TuningCurve<f64> {
    TuningCurve {
        rows: vec![TuningRow {
            axis_value,
            solutions,
            note,
        }],
        orders,
    }
}

fn dispatch(command: Command) -> CliResult<()> {
    match command {
        Command::Index {
            lambda_nm,
            sweep,
            common,
        } => cmd_index(lambda_nm, sweep, &common),
        Command::Tuning(tuning) => match tuning {
            TuningCmd::Period {
                signal_nm,
                idler_nm,
                order,
                common,
            } => cmd_tuning_period(signal_nm, idler_nm, order, &common),
            TuningCmd::Angles {
                signal_nm,
                idler_nm,
                common,
            } => cmd_tuning_angles(signal_nm, idler_nm, &common),
            TuningCmd::Pairs { common } => cmd_tuning_pairs(&common),
            TuningCmd::Sweep {
                axis,
                solve,
                range,
                signal_nm,
                idler_nm,
                common,
            } => cmd_tuning_sweep(axis, solve, range, signal_nm, idler_nm, &common),
        },
        Command::Spectrum {
            window,
            target_nm,
            common,
        } => cmd_spectrum(window, target_nm, &common),
        Command::BandwidthRatio {
            signals,
            reference_nm,
            common,
        } => cmd_bandwidth_ratio(signals, reference_nm, &common),
        Command::Specmap {
            theta_range,
            window,
            common,
        } => cmd_specmap(theta_range, window, &common),
    }
}

fn cmd_index(
    lambda_nm: Option<f64>,
    sweep: Option<GridSpec>,
    common: &CommonOpts,
) -> CliResult<()> {
    let cfg = resolve(common)?;
    let model = cfg.sellmeier()?;
    match (lambda_nm, sweep) {
        (Some(lambda), None) => {
            let n = model.refractive_index(lambda)?;
            println!("n_e({}) = {} [{}]", fmt_sig(lambda), fmt_sig(n), model.name());
            Ok(())
        }
        (None, sweep) => {
            let grid = sweep.unwrap_or(GridSpec {
                lo: 500.0,
                hi: 2000.0,
                step: 1.0,
            });
            let window = LambdaWindow::new(grid.lo, grid.hi, grid.step)
                .map_err(|e| usage(e.to_string()))?;
            let mut out = String::new();
            out.push_str(&format!("# artifact = index\n# model = {}\n", model.name()));
            out.push_str(&format!("# source = {}\n", model.source()));
            out.push_str("lambda_nm,n_e\n");
            let nodes = window.nodes();
            for &l in &nodes {
                out.push_str(&format!(
                    "{},{}\n",
                    fmt_sig(l),
                    fmt_sig(model.refractive_index(l)?)
                ));
            }
            let path = out_path(&cfg, "index.csv");
            write_artifact(&path, &out)?;
            println!("{} rows; wrote {}", nodes.len(), path.display());
            Ok(())
        }
        (Some(_), Some(_)) => Err(usage("--lambda-nm and --sweep are mutually exclusive")),
    }
}

fn cmd_tuning_period(
    signal_nm: Option<f64>,
    idler_nm: Option<f64>,
    order: Option<i32>,
    common: &CommonOpts,
) -> CliResult<()> {
    let cfg = resolve(common)?;
    let (ls, li) = resolve_pair(&cfg, signal_nm, idler_nm)?;
    let m = order.unwrap_or(1);
    let interaction = cfg.interaction()?;
    let mut comments = base_comments("tuning-period", &interaction);
    comments.push(format!("signal_nm = {}; idler_nm = {}", fmt_sig(ls), fmt_sig(li)));
    let path = out_path(&cfg, "tuning_period.csv");
    match solve_poling_period(&interaction, ls, li, m)? {
        PeriodSolution::Finite(sol) => {
            let curve = single_row_curve(cfg.theta_deg, vec![sol], vec![m], None);
            write_artifact(&path, &report::render_tuning_csv(&curve, &comments))?;
            println!(
                "period = {} um (m={}, feasible={}); wrote {}",
                fmt_sig(sol.period_m * 1e6),
                m,
                sol.feasible_poling,
                path.display()
            );
        }
        PeriodSolution::Divergent { theta_deg, .. } => {
            let curve = single_row_curve(
                cfg.theta_deg,
                Vec::new(),
                vec![m],
                Some(format!("m={m}: divergent period (K_m -> 0)")),
            );
            write_artifact(&path, &report::render_tuning_csv(&curve, &comments))?;
            println!(
                "period diverges (K_m -> 0) at theta = {} deg; wrote {}",
                fmt_sig(theta_deg),
                path.display()
            );
        }
    }
    Ok(())
}

fn cmd_tuning_angles(
    signal_nm: Option<f64>,
    idler_nm: Option<f64>,
    common: &CommonOpts,
) -> CliResult<()> {
    let cfg = resolve(common)?;
    let (ls, li) = resolve_pair(&cfg, signal_nm, idler_nm)?;
    let interaction = cfg.interaction()?;
    let solutions = solve_pump_angles(&interaction, ls, li, &cfg.orders)?;
    let mut comments = base_comments("tuning-angles", &interaction);
    comments.push(format!("signal_nm = {}; idler_nm = {}", fmt_sig(ls), fmt_sig(li)));
    let summary = describe_solutions(&solutions, "angle");
    let curve = single_row_curve(cfg.poling_period_um, solutions, cfg.orders.clone(), None);
    let path = out_path(&cfg, "tuning_angles.csv");
    write_artifact(&path, &report::render_tuning_csv(&curve, &comments))?;
    println!("{summary}; wrote {}", path.display());
    Ok(())
}

fn cmd_tuning_pairs(common: &CommonOpts) -> CliResult<()> {
    let cfg = resolve(common)?;
    let interaction = cfg.interaction()?;
    let solutions = solve_signal_idler(&interaction, &cfg.orders)?;
    let comments = base_comments("tuning-pairs", &interaction);
    let summary = describe_solutions(&solutions, "pair");
    let curve = single_row_curve(cfg.theta_deg, solutions, cfg.orders.clone(), None);
    let path = out_path(&cfg, "tuning_pairs.csv");
    write_artifact(&path, &report::render_tuning_csv(&curve, &comments))?;
    println!("{summary}; wrote {}", path.display());
    Ok(())
}

fn cmd_tuning_sweep(
    axis: Option<String>,
    solve: Option<String>,
    range: Option<GridSpec>,
    signal_nm: Option<f64>,
    idler_nm: Option<f64>,
    common: &CommonOpts,
) -> CliResult<()> {
    let cfg = resolve(common)?;
    let axis_name = axis.as_deref().unwrap_or("theta");
    let solve_name = solve.as_deref().unwrap_or("pairs");
    let solve = match solve_name {
        "pairs" => SweepSolve::Pairs,
        "period" => SweepSolve::Period,
        "angles" => SweepSolve::Angles,
        other => {
            return Err(usage(format!(
                "--solve expects pairs|period|angles, got `{other}`"
            )))
        }
    };
    let axis = match axis_name {
        "theta" => {
            let g = range.unwrap_or(cfg.theta_range);
            SweepAxis::ThetaDeg {
                lo: g.lo,
                hi: g.hi,
                step: g.step,
            }
        }
        "period" => {
            let g = range.unwrap_or(GridSpec {
                lo: 4.0,
                hi: 10.0,
                step: 0.05,
            });
            SweepAxis::PeriodUm {
                lo: g.lo,
                hi: g.hi,
                step: g.step,
            }
        }
        other => return Err(usage(format!("--axis expects theta|period, got `{other}`"))),
    };
    let pair = if solve == SweepSolve::Pairs {
        None
    } else {
        Some(resolve_pair(&cfg, signal_nm, idler_nm)?)
    };
    let interaction = cfg.interaction()?;
    let curve = tuning_sweep(&interaction, axis, solve, &cfg.orders, pair)?;
    let mut comments = base_comments("tuning-sweep", &interaction);
    comments.push(format!("axis = {axis_name}; solve = {solve_name}"));
    if let Some((ls, li)) = pair {
        comments.push(format!("signal_nm = {}; idler_nm = {}", fmt_sig(ls), fmt_sig(li)));
    }
    let n_solutions: usize = curve.rows.iter().map(|r| r.solutions.len()).sum();
    let path = out_path(&cfg, "tuning_sweep.csv");
    write_artifact(&path, &report::render_tuning_csv(&curve, &comments))?;
    println!(
        "{} rows, {} solutions; wrote {}",
        curve.rows.len(),
        n_solutions,
        path.display()
    );
    Ok(())
}

fn cmd_spectrum(
    window: Option<GridSpec>,
    target_nm: Option<f64>,
    common: &CommonOpts,
) -> CliResult<()> {
    let cfg = resolve(common)?;
    let interaction = cfg.interaction()?;
    let grid = window.or(cfg.window);
    let slice = match grid {
        Some(g) => {
            let w = LambdaWindow::new(g.lo, g.hi, g.step).map_err(|e| usage(e.to_string()))?;
            spectrum_slice(&interaction, &w)?
        }
        None => auto_slice(&interaction, target_nm)?,
    };
    if let Some(n) = slice.points_in_fwhm {
        if n < 50 {
            eprintln!("warning: only {n} grid points resolve the FWHM; refine the window step");
        }
    }
    if !slice.in_window_peak {
        eprintln!("warning: no interior peak in the window; FWHM not computed");
    }
    let comments = vec!["artifact = spectrum".to_string()];
    let path = out_path(&cfg, "spectrum.csv");
    write_artifact(&path, &report::render_slice_csv(&slice, &comments))?;
    let peak = slice.peak_lambda_nm.map_or("NA".to_string(), fmt_sig);
    let fwhm = slice.fwhm_nm.map_or("NA".to_string(), fmt_sig);
    println!("peak = {peak} nm, fwhm = {fwhm} nm; wrote {}", path.display());
    Ok(())
}

fn cmd_bandwidth_ratio(
    signals: Option<Vec<f64>>,
    reference_nm: Option<f64>,
    common: &CommonOpts,
) -> CliResult<()> {
    let cfg = resolve(common)?;
    let signals = signals.unwrap_or_else(|| cfg.ratio_signals.clone());
    let reference = reference_nm.unwrap_or(cfg.reference_nm);
    let interaction = cfg.interaction()?;
    let table = bandwidth_ratio_sweep(&interaction, &signals, reference)?;
    let mut comments = base_comments("bandwidth-ratio", &interaction);
    comments.push(
        "methodology = counter: pump angle solved at fixed period (m=+1); \
         co: poling period solved at normal incidence (m=+1)"
            .to_string(),
    );
    let path = out_path(&cfg, "bandwidth_ratio.csv");
    write_artifact(&path, &report::render_ratio_csv(&table, &comments))?;
    println!(
        "{} rows (reference {} nm); wrote {}",
        table.rows.len(),
        fmt_sig(reference),
        path.display()
    );
    Ok(())
}

fn cmd_specmap(
    theta_range: Option<GridSpec>,
    window: Option<GridSpec>,
    common: &CommonOpts,
) -> CliResult<()> {
    let cfg = resolve(common)?;
    let interaction = cfg.interaction()?;
    let tg = theta_range.unwrap_or(cfg.theta_range);
    let wg = window.or(cfg.window).unwrap_or(GridSpec {
        lo: 700.0,
        hi: 1120.0,
        step: 0.5,
    });
    let thetas = ThetaRange::new(tg.lo, tg.hi, tg.step).map_err(|e| usage(e.to_string()))?;
    let lambda_window =
        LambdaWindow::new(wg.lo, wg.hi, wg.step).map_err(|e| usage(e.to_string()))?;
    let map = spectral_map(&interaction, &thetas, &lambda_window, &cfg.orders)?;
    let comments = vec!["artifact = specmap".to_string()];
    let path = out_path(&cfg, "specmap.csv");
    write_artifact(&path, &report::render_map_csv(&map, &comments))?;
    println!(
        "{} x {} map, {} failed cells; wrote {}",
        map.theta_deg.len(),
        map.lambda_s_nm.len(),
        map.failed_cells,
        path.display()
    );
    Ok(())
}
