use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use thermoprobe::figures::{self, Axis, Cell, Grid, StarSweep, SweepSpec, Table};
use thermoprobe::star::default_omega_max;
use thermoprobe::steady_state::{
    covariance_analytic_ld, covariance_low_temperature_approx, covariance_numeric, thermal_covariance, Route,
};
use thermoprobe::{CovarianceMatrix, ProbeSpec, SpectralModel};

/// Steady state and thermometric precision of a quantum Brownian probe
/// (ħ = k_B = 1).
#[derive(Parser)]
#[command(name = "thermoprobe", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Steady-state covariance matrix at one temperature.
    Covariance {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        temp: f64,
        #[arg(long, value_enum)]
        route: Option<CovRoute>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Quantum Fisher information and δT/T, at one point or along a grid.
    Qfi(PointOrSweep),
    /// QFI together with the energy and x² sensitivities.
    Sensitivity(PointOrSweep),
    /// δT/T against T for γ ∈ {0.1, 1, 5}.
    Fig1a(FigureArgs),
    /// QFI against γ for T ∈ {1, 0.1, 0.01}.
    Fig1b(FigureArgs),
    /// QFI and both sensitivities against T for γ ∈ {5e-3, 5e-2, 0.5}.
    Fig2(FigureArgs),
    /// Ohmic against super-Ohmic exponential cutoff bath at γ = 0.1.
    Fig3(FigureArgs),
    /// Discretized star bath along the coupling scale G.
    Star {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        temp: f64,
        #[arg(long, default_value_t = 2000)]
        n_modes: usize,
        /// Highest bath frequency; defaults to 20 ω_c.
        #[arg(long)]
        omega_max: Option<f64>,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelKind {
    LorentzDrude,
    ExpCutoff,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum CovRoute {
    Numeric,
    Analytic,
    #[value(name = "lowT", alias = "low-t")]
    LowT,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepRoute {
    Numeric,
    Analytic,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    #[value(name = "T", alias = "t", alias = "temperature")]
    Temperature,
    Gamma,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, value_enum, default_value = "lorentz-drude")]
    model: ModelKind,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = figures::DEFAULT_OMEGA_C)]
    omega_c: f64,
    /// Ohmicity of the exponential cutoff bath.
    #[arg(long, default_value_t = 1.0)]
    s: f64,
    #[arg(long, default_value_t = 1.0)]
    probe_freq: f64,
}

impl ModelArgs {
    fn spectral(&self) -> thermoprobe::Result<SpectralModel> {
        match self.model {
            ModelKind::LorentzDrude => SpectralModel::lorentz_drude(self.gamma, self.omega_c),
            ModelKind::ExpCutoff if self.s == 1.0 || self.s == 2.0 => {
                SpectralModel::exp_cutoff(self.gamma, self.omega_c, self.s)
            }
            ModelKind::ExpCutoff => SpectralModel::exp_cutoff_numeric(self.gamma, self.omega_c, self.s),
        }
    }

    fn probe(&self) -> thermoprobe::Result<ProbeSpec> {
        ProbeSpec::new(self.probe_freq)
    }
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    from: Option<f64>,
    #[arg(long)]
    to: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    /// Logarithmic spacing.
    #[arg(long)]
    log: bool,
}

impl GridArgs {
    fn given(&self) -> bool {
        self.from.is_some() || self.to.is_some()
    }

    fn or(&self, default: Grid) -> thermoprobe::Result<Grid> {
        Grid::new(
            self.from.unwrap_or(default.start),
            self.to.unwrap_or(default.stop),
            self.points.unwrap_or(default.points),
            self.log || default.log,
        )
    }
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PointOrSweep {
    #[command(flatten)]
    model: ModelArgs,
    /// Temperature of a single point, or held fixed along a γ sweep.
    #[arg(long)]
    temp: Option<f64>,
    #[arg(long, value_enum)]
    route: Option<SweepRoute>,
    #[arg(long, value_enum, default_value = "T")]
    axis: AxisArg,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct FigureArgs {
    #[arg(long, default_value_t = figures::DEFAULT_OMEGA_C)]
    omega_c: f64,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    output: OutputArgs,
}

fn emit(table: &Table, output: &OutputArgs) -> anyhow::Result<()> {
    let text = match output.format {
        Format::Csv => table.to_csv(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&table.records())?;
            s.push('\n');
            s
        }
    };
    match &output.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn covariance_row(route: &str, c: &CovarianceMatrix, err: Option<(f64, f64)>, thermal: &CovarianceMatrix) -> Vec<Cell> {
    let (exx, epp) = err.unwrap_or((f64::NAN, f64::NAN));
    vec![
        route.into(),
        c.sigma_xx.into(),
        c.sigma_pp.into(),
        c.sigma_xp.into(),
        c.det().into(),
        exx.into(),
        epp.into(),
        thermal.sigma_xx.into(),
        thermal.sigma_pp.into(),
    ]
}

fn covariance(model: &ModelArgs, temp: f64, route: Option<CovRoute>) -> anyhow::Result<Table> {
    let spectral = model.spectral()?;
    let probe = model.probe()?;
    let thermal = thermal_covariance(&probe, temp)?;
    let route = route.unwrap_or(match Route::preferred(&spectral) {
        Route::Analytic => CovRoute::Analytic,
        Route::Numeric => CovRoute::Numeric,
    });
    let ld_only = |name: &str| -> anyhow::Result<()> {
        if !spectral.is_lorentz_drude() {
            bail!("route {name} needs --model lorentz-drude");
        }
        Ok(())
    };
    let mut columns = vec![
        "route",
        "sigma_xx",
        "sigma_pp",
        "sigma_xp",
        "det",
        "error_xx",
        "error_pp",
        "thermal_sigma_xx",
        "thermal_sigma_pp",
    ];
    let mut rows = Vec::new();
    let mut states = Vec::new();
    if matches!(route, CovRoute::Numeric | CovRoute::Both) {
        let n = covariance_numeric(&spectral, &probe, temp)?;
        let c = n.covariance.check_physical()?;
        rows.push(covariance_row("numeric", &c, Some((n.error_xx, n.error_pp)), &thermal));
        states.push(c);
    }
    if matches!(route, CovRoute::Analytic | CovRoute::Both) {
        ld_only("analytic")?;
        let (c, _) = covariance_analytic_ld(spectral.gamma, spectral.omega_c, &probe, temp)?;
        let c = c.check_physical()?;
        rows.push(covariance_row("analytic", &c, None, &thermal));
        states.push(c);
    }
    if route == CovRoute::LowT {
        ld_only("lowT")?;
        let c = covariance_low_temperature_approx(spectral.gamma, spectral.omega_c, &probe, temp)?;
        rows.push(covariance_row("lowT", &c, None, &thermal));
    }
    if let [a, b] = states[..] {
        columns.push("cross_route_diff");
        let d = a.max_rel_diff(&b);
        for r in &mut rows {
            r.push(d.into());
        }
    }
    let mut t = Table::new(&columns)
        .meta("thermoprobe", env!("CARGO_PKG_VERSION"))
        .meta("command", "covariance")
        .meta("model", spectral.id())
        .meta("gamma", spectral.gamma)
        .meta("omega_c", spectral.omega_c)
        .meta("omega0", probe.omega0)
        .meta("temperature", temp);
    for r in rows {
        t.push(r);
    }
    Ok(t)
}

const QFI_COLUMNS: [&str; 6] = ["axis", "temperature", "gamma", "qfi", "qfi_error", "rel_error"];

fn keep_columns(table: Table, keep: &[&str]) -> Table {
    let idx: Vec<usize> = keep.iter().filter_map(|c| table.column(c)).collect();
    Table {
        columns: idx.iter().map(|&i| table.columns[i].clone()).collect(),
        rows: table.rows.iter().map(|r| idx.iter().map(|&i| r[i].clone()).collect()).collect(),
        metadata: table.metadata,
    }
}

fn point_or_sweep(args: &PointOrSweep, command: &str) -> anyhow::Result<Table> {
    let model = args.model.spectral()?;
    let probe = args.model.probe()?;
    let route = args.route.map(|r| match r {
        SweepRoute::Numeric => Route::Numeric,
        SweepRoute::Analytic => Route::Analytic,
    });
    let axis = match args.axis {
        AxisArg::Temperature => Axis::Temperature,
        AxisArg::Gamma => Axis::Gamma,
    };
    let grid = if args.grid.given() {
        let (Some(from), Some(to)) = (args.grid.from, args.grid.to) else {
            bail!("a sweep needs both --from and --to");
        };
        Grid::new(from, to, args.grid.points.unwrap_or(figures::DEFAULT_POINTS), args.grid.log)?
    } else {
        // a single point is a sweep over one value
        let x = match axis {
            Axis::Temperature => args.temp.context("--temp is required for a single point")?,
            Axis::Gamma => model.gamma,
        };
        Grid {
            start: x,
            stop: x,
            points: 1,
            log: false,
        }
    };
    let temperature = match axis {
        Axis::Gamma => args.temp.context("--temp is required along the gamma axis")?,
        Axis::Temperature => f64::NAN,
    };
    let spec = SweepSpec {
        model,
        probe,
        axis,
        temperature,
        grid,
        route,
    };
    let t = figures::sweep_table(&spec, command)?;
    Ok(if command == "qfi" { keep_columns(t, &QFI_COLUMNS) } else { t })
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Covariance {
            model,
            temp,
            route,
            output,
        } => emit(&covariance(&model, temp, route)?, &output),
        Command::Qfi(args) => emit(&point_or_sweep(&args, "qfi")?, &args.output),
        Command::Sensitivity(args) => emit(&point_or_sweep(&args, "sensitivity")?, &args.output),
        Command::Fig1a(f) => {
            let grid = f.grid.or(figures::default_fig1a_grid())?;
            emit(&figures::fig1a(&figures::FIG1A_GAMMAS, f.omega_c, &grid)?, &f.output)
        }
        Command::Fig1b(f) => {
            let grid = f.grid.or(figures::default_fig1b_grid())?;
            emit(&figures::fig1b(&figures::FIG1B_TEMPERATURES, f.omega_c, &grid)?, &f.output)
        }
        Command::Fig2(f) => {
            let grid = f.grid.or(figures::default_fig2_grid())?;
            emit(&figures::fig2(&figures::FIG2_GAMMAS, f.omega_c, &grid)?, &f.output)
        }
        Command::Fig3(f) => {
            let grid = f.grid.or(figures::default_fig3_grid())?;
            emit(
                &figures::fig3(figures::FIG3_GAMMA, f.omega_c, &figures::FIG3_OHMICITIES, &grid)?,
                &f.output,
            )
        }
        Command::Star {
            model,
            temp,
            n_modes,
            omega_max,
            grid,
            output,
        } => {
            let spectral = model.spectral()?;
            let sweep = StarSweep {
                model: spectral,
                probe: model.probe()?,
                temperature: temp,
                n_modes,
                omega_max: omega_max.unwrap_or_else(|| default_omega_max(&spectral)),
                grid: grid.or(Grid {
                    start: 0.0,
                    stop: 1.0,
                    points: 5,
                    log: false,
                })?,
            };
            emit(&figures::star_sweep(&sweep)?, &output)
        }
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
