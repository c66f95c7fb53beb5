//! Command-line front end: solve, price, settle, and sweep electricity
//! market instances.

use clap::{Parser, Subcommand, ValueEnum};
use marketlift::acuc::{self, AcucOptions};
use marketlift::dcuc::{self, BlockMode, DcucOptions};
use marketlift::error::{Error, Result};
use marketlift::instance::Instance;
use marketlift::model::{SolveStatus, SolverConfig};
use marketlift::pricing::{self, PriceScheme};
use marketlift::solver;
use marketlift::sweep::{self, ModelKind, RunConfig, Scheme, TableFormat};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "marketlift", version, about = "Nonconvex electricity market clearing with SDP-relaxation pricing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Dcuc,
    Acuc,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum SchemeArg {
    Sdp,
    FixedBinary,
    LpBaseline,
    RelaxedBinary,
}

impl SchemeArg {
    fn to_scheme(self) -> Scheme {
        match self {
            SchemeArg::Sdp => Scheme::Sdp,
            SchemeArg::FixedBinary => Scheme::FixedBinary,
            SchemeArg::LpBaseline => Scheme::LpBaseline,
            SchemeArg::RelaxedBinary => Scheme::RelaxedBinary,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum BlocksArg {
    Full,
    Overlap,
}

#[derive(Clone, Copy, ValueEnum)]
enum TolProfile {
    Default,
    Tight,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Markdown,
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Instance JSON file.
    #[arg(long)]
    instance: PathBuf,
    /// Market model.
    #[arg(long, value_enum, default_value = "dcuc")]
    model: ModelArg,
    /// Uniform load multiplier applied before solving.
    #[arg(long, default_value_t = 1.0)]
    multiplier: f64,
    /// Truncate the horizon to the first T periods.
    #[arg(long)]
    periods: Option<usize>,
    /// Triangle (RLT clique) cuts on the lifted model.
    #[arg(long, value_enum, default_value = "on")]
    triangle: Toggle,
    /// PSD block decomposition of the lifted matrix.
    #[arg(long, value_enum, default_value = "overlap")]
    blocks: BlocksArg,
    /// Solver tolerance profile.
    #[arg(long, value_enum, default_value = "default")]
    tol_profile: TolProfile,
    /// Output directory for result artifacts.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the exact MILP commitment (DCUC) or the SDP relaxation (ACUC).
    Solve(CommonArgs),
    /// Compute nodal prices under a pricing scheme.
    Price {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum, default_value = "sdp")]
        scheme: SchemeArg,
    },
    /// Price, then settle a feasible dispatch with lost-opportunity-cost
    /// accounting.
    Settle {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum, default_value = "sdp")]
        scheme: SchemeArg,
        /// Externally supplied feasible dispatch JSON; defaults to the
        /// exact MILP solution.
        #[arg(long)]
        dispatch: Option<PathBuf>,
    },
    /// Run a multiplier sweep across schemes and emit result tables.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = vec![SchemeArg::Sdp, SchemeArg::FixedBinary])]
        schemes: Vec<SchemeArg>,
        /// Comma-separated load multipliers.
        #[arg(long, value_delimiter = ',', default_values_t = vec![1.0])]
        multipliers: Vec<f64>,
        #[arg(long, value_enum, default_value = "markdown")]
        format: FormatArg,
        /// Skip pricing/settlement, reporting objectives and gaps only.
        #[arg(long)]
        no_settle: bool,
    },
}

impl CommonArgs {
    fn solver_config(&self) -> SolverConfig {
        match self.tol_profile {
            TolProfile::Default => SolverConfig::default(),
            TolProfile::Tight => SolverConfig::tight(),
        }
    }

    fn dcuc_options(&self) -> DcucOptions {
        DcucOptions {
            triangle_cuts: matches!(self.triangle, Toggle::On),
            blocks: match self.blocks {
                BlocksArg::Full => BlockMode::Full,
                BlocksArg::Overlap => BlockMode::PerPeriodOverlap,
            },
            ..DcucOptions::default()
        }
    }

    fn load_instance(&self) -> Result<Instance> {
        let inst = Instance::from_path(&self.instance)?;
        let inst = match self.periods {
            Some(t) => inst.with_periods(t)?,
            None => inst,
        };
        inst.apply_load_multiplier(self.multiplier)
    }
}

fn write_artifact(out: &Option<PathBuf>, name: &str, content: &str) -> Result<()> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let path = dir.join(name);
            std::fs::write(&path, content)?;
            eprintln!("wrote {}", path.display());
        }
        None => println!("{}", content),
    }
    Ok(())
}

fn cmd_solve(args: &CommonArgs) -> Result<()> {
    let inst = args.load_instance()?;
    let cfg = args.solver_config();
    let (label, result) = match args.model {
        ModelArg::Dcuc => {
            let sf = inst.compute_shift_factors()?;
            let m = dcuc::build_dcuc_milp(&inst, &sf)?;
            ("dcuc-milp", solver::solve(&m, &cfg)?)
        }
        ModelArg::Acuc => {
            let (m, _) = acuc::build_acuc_sdp(&inst, &AcucOptions::default())?;
            ("acuc-sdp", solver::solve_relaxed(&m, &cfg)?)
        }
    };
    let summary = serde_json::json!({
        "model": label,
        "status": format!("{:?}", result.status),
        "objective": result.objective,
        "iterations": result.iterations,
        "solve_seconds": result.solve_seconds,
    });
    write_artifact(&args.out, "solve.json", &serde_json::to_string_pretty(&summary).unwrap())?;
    result.require_optimal()
}

fn dcuc_prices(
    inst: &Instance,
    scheme: SchemeArg,
    args: &CommonArgs,
) -> Result<(pricing::PriceVector, f64, bool)> {
    let cfg = args.solver_config();
    let sf = inst.compute_shift_factors()?;
    match scheme {
        SchemeArg::Sdp => {
            let (m, _) = dcuc::build_dcuc_sdp(inst, &sf, &args.dcuc_options())?;
            let r = solver::solve_relaxed(&m, &cfg)?;
            r.require_optimal()?;
            let caveat = pricing::rhs_nonlinear_in_demand(&m);
            Ok((pricing::sdp_prices_dcuc(inst, &sf, &m, &r)?, r.objective, caveat))
        }
        SchemeArg::LpBaseline => {
            let m = dcuc::build_lp_relaxation(inst, &sf)?;
            let r = solver::solve_relaxed(&m, &cfg)?;
            r.require_optimal()?;
            Ok((
                pricing::linear_lp_prices(inst, &sf, &m, &r, PriceScheme::LpRelaxation)?,
                r.objective,
                false,
            ))
        }
        SchemeArg::FixedBinary => {
            let milp = solver::solve(&dcuc::build_dcuc_milp(inst, &sf)?, &cfg)?;
            milp.require_optimal()?;
            let fb = dcuc::build_fixed_binary_lp(inst, &sf, &milp)?;
            let r = solver::solve_relaxed(&fb, &cfg)?;
            r.require_optimal()?;
            Ok((pricing::fixed_binary_prices(inst, &sf, &fb, &r)?, r.objective, false))
        }
        SchemeArg::RelaxedBinary => {
            Err(Error::Unsupported("relaxed-binary has no DCUC pricing".into()))
        }
    }
}

fn acuc_prices(
    inst: &Instance,
    scheme: SchemeArg,
    args: &CommonArgs,
) -> Result<(pricing::PriceVector, f64, bool)> {
    let cfg = args.solver_config();
    match scheme {
        SchemeArg::Sdp => {
            let (m, _) = acuc::build_acuc_sdp(inst, &AcucOptions::default())?;
            let r = solver::solve_relaxed(&m, &cfg)?;
            r.require_optimal()?;
            let caveat = pricing::rhs_nonlinear_in_demand(&m);
            Ok((pricing::sdp_prices_acuc(inst, &m, &r)?, r.objective, caveat))
        }
        _ => Err(Error::Unsupported(
            "ACUC pricing supports the sdp scheme only".into(),
        )),
    }
}

fn cmd_price(common: &CommonArgs, scheme: SchemeArg) -> Result<()> {
    let inst = common.load_instance()?;
    let (prices, _, _) = match common.model {
        ModelArg::Dcuc => dcuc_prices(&inst, scheme, common)?,
        ModelArg::Acuc => acuc_prices(&inst, scheme, common)?,
    };
    write_artifact(
        &common.out,
        "prices.json",
        &serde_json::to_string_pretty(&prices).unwrap(),
    )
}

fn cmd_settle(common: &CommonArgs, scheme: SchemeArg, dispatch_path: &Option<PathBuf>) -> Result<()> {
    let inst = common.load_instance()?;
    let cfg = common.solver_config();
    let (prices, v_rel, caveat) = match common.model {
        ModelArg::Dcuc => dcuc_prices(&inst, scheme, common)?,
        ModelArg::Acuc => acuc_prices(&inst, scheme, common)?,
    };
    let dispatch = match dispatch_path {
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            acuc::ingest_feasible_dispatch_str(&text, &inst)?
        }
        None => {
            let sf = inst.compute_shift_factors()?;
            let milp = solver::solve(&dcuc::build_dcuc_milp(&inst, &sf)?, &cfg)?;
            milp.require_optimal()?;
            pricing::dispatch_from_milp(&inst, &milp)?
        }
    };
    let report = pricing::settle(&inst, &dispatch, &prices, v_rel, caveat, &cfg)?;
    write_artifact(&common.out, "settlement.json", &report.to_json()?)?;
    write_artifact(&common.out, "settlement.csv", &report.to_csv())
}

fn cmd_sweep(
    common: &CommonArgs,
    schemes: &[SchemeArg],
    multipliers: &[f64],
    format: FormatArg,
    no_settle: bool,
) -> Result<ExitCode> {
    let inst = Instance::from_path(&common.instance)?;
    let cfg = RunConfig {
        instance: inst,
        model: match common.model {
            ModelArg::Dcuc => ModelKind::Dcuc,
            ModelArg::Acuc => ModelKind::Acuc,
        },
        schemes: schemes.iter().map(|s| s.to_scheme()).collect(),
        multipliers: multipliers.to_vec(),
        periods: common.periods,
        solver: common.solver_config(),
        dcuc_options: common.dcuc_options(),
        acuc_options: AcucOptions::default(),
        settle: !no_settle,
    };
    let archive = sweep::run_sweep(&cfg)?;
    let tables = sweep::emit_tables(
        &archive,
        match format {
            FormatArg::Csv => TableFormat::Csv,
            FormatArg::Markdown => TableFormat::Markdown,
        },
    )?;
    write_artifact(&common.out, "archive.json", &serde_json::to_string_pretty(&archive).unwrap())?;
    let name = match format {
        FormatArg::Csv => "tables.csv",
        FormatArg::Markdown => "tables.md",
    };
    write_artifact(&common.out, name, &tables)?;
    let failed = archive
        .cells
        .iter()
        .filter(|c| c.status != format!("{:?}", SolveStatus::Optimal))
        .count();
    if failed > 0 {
        eprintln!("{} of {} cells failed", failed, archive.cells.len());
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Solve(args) => cmd_solve(args).map(|_| ExitCode::SUCCESS),
        Command::Price { common, scheme } => cmd_price(common, *scheme).map(|_| ExitCode::SUCCESS),
        Command::Settle {
            common,
            scheme,
            dispatch,
        } => cmd_settle(common, *scheme, dispatch).map(|_| ExitCode::SUCCESS),
        Command::Sweep {
            common,
            schemes,
            multipliers,
            format,
            no_settle,
        } => cmd_sweep(common, schemes, multipliers, *format, *no_settle),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(1)
        }
    }
}
