//! `bimode`: coherence sweeps and trajectories for two coupled bosonic modes.
//!
//! Exit codes: 0 ok, 1 invalid parameters, 2 numerical failure.

mod commands;
mod sweep;
mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use bimode_core::dynamics::{DisplacementFrame, InitialCovariance, DEFAULT_DT, DEFAULT_GAMMA, DEFAULT_TEMPERATURE};
use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::{DynamicsSetup, Failure, Outcome, Units};
use sweep::SweepSpec;
use table::Table;

#[derive(Parser)]
#[command(name = "bimode", version, about = "Quantum coherence of two coupled bosonic modes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check (omega, lambda, mu) and print the normal-mode quantities.
    Validate(Common),
    /// Ground-state coherence along a lambda or mu sweep.
    Ground {
        #[command(flatten)]
        common: Common,
        /// `mu:<start>:<stop>:<count>` or `lambda:...`, in units of omega.
        #[arg(long)]
        sweep: SweepSpec,
    },
    /// Steady-state coherence with both modes in thermal baths at temperature T.
    Steady {
        #[command(flatten)]
        common: Common,
        /// `T:<start>:<stop>:<count>`; overrides --T.
        #[arg(long)]
        sweep: Option<SweepSpec>,
        #[arg(long = "T", default_value_t = DEFAULT_TEMPERATURE)]
        temperature: f64,
        /// Normal-mode frequencies entering the thermal factors.
        #[arg(long, default_value = "exact")]
        convention: String,
    },
    /// Mode a coupled to a thermal bath: coherence and fidelity versus time.
    Dynamics(Box<DynamicsArgs>),
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    #[arg(long, default_value_t = 0.0)]
    mu: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args, Clone)]
struct DynamicsArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = DEFAULT_GAMMA)]
    gamma: f64,
    #[arg(long = "T", default_value_t = DEFAULT_TEMPERATURE)]
    temperature: f64,
    /// Initial displacement `x,y,z,w`.
    #[arg(long, default_value = "1,1,1,1", value_parser = parse_init)]
    init: Init,
    /// Coordinates of --init.
    #[arg(long, value_enum, default_value_t = Frame::NormalMode)]
    frame: Frame,
    /// Initial covariance.
    #[arg(long = "init-cov", value_enum, default_value_t = InitCov::Vacuum)]
    init_cov: InitCov,
    #[arg(long = "t-max", default_value_t = 100.0)]
    t_max: f64,
    #[arg(long, default_value_t = DEFAULT_DT)]
    dt: f64,
    /// Emit every `stride`-th integration step.
    #[arg(long, default_value_t = 100)]
    stride: usize,
    /// `t:0:<stop>:<count>`; sets --t-max and --stride.
    #[arg(long)]
    sweep: Option<SweepSpec>,
    /// How the bath enters: `reduce-then-dissipate` or `full`.
    #[arg(long, default_value = "reduce-then-dissipate")]
    mode: String,
    /// Compare the first 5/omega against a Fock-space run and report the deviation.
    #[arg(long)]
    verify: bool,
    /// Fock-space cutoff for --verify.
    #[arg(long, default_value_t = bimode_fock::FockConfig::DYNAMICS_CUTOFF)]
    cutoff: usize,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Frame {
    NormalMode,
    Quadrature,
}

#[derive(Clone, Copy, ValueEnum)]
enum InitCov {
    Vacuum,
    Ground,
}

#[derive(Clone, Copy)]
struct Init([f64; 4]);

fn parse_init(s: &str) -> Result<Init, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("bad component '{x}': {e}")))
        .collect::<Result<_, _>>()?;
    let arr: [f64; 4] = v.try_into().map_err(|_| "expected four comma-separated numbers".to_string())?;
    Ok(Init(arr))
}

fn enum_name<T: ValueEnum>(v: &T) -> String {
    v.to_possible_value().map(|p| p.get_name().to_string()).unwrap_or_default()
}

impl Common {
    fn units(&self) -> Units {
        Units {
            omega: self.omega,
            lambda: self.lambda,
            mu: self.mu,
        }
    }

    fn flags(&self) -> Vec<(&'static str, String)> {
        vec![
            ("omega", self.omega.to_string()),
            ("lambda", self.lambda.to_string()),
            ("mu", self.mu.to_string()),
            ("format", enum_name(&self.format)),
        ]
    }
}

fn emit(table: &Table, common: &Common) -> io::Result<()> {
    let mut out: Box<dyn Write> = match &common.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match common.format {
        Format::Csv => table.write_csv(&mut out)?,
        Format::Json => table.write_json(&mut out)?,
    }
    out.flush()
}

fn dynamics_setup(a: &DynamicsArgs) -> Result<DynamicsSetup, Failure> {
    let (t_max, stride) = match &a.sweep {
        None => (a.t_max, a.stride),
        Some(s) => {
            s.expect_one_of(&["t"]).map_err(Failure::Invalid)?;
            let per = (s.stop - s.start) / (s.count - 1) as f64 / a.dt;
            if s.start != 0.0 || per < 0.5 || (per - per.round()).abs() > 1e-9 * per.max(1.0) {
                return Err(Failure::Invalid(format!(
                    "time sweep {s} must start at 0 with spacing a multiple of dt = {}",
                    a.dt
                )));
            }
            (s.stop, per.round() as usize)
        }
    };
    let frame = match a.frame {
        Frame::NormalMode => DisplacementFrame::NormalMode,
        Frame::Quadrature => DisplacementFrame::Quadrature,
    };
    let cov = match a.init_cov {
        InitCov::Vacuum => InitialCovariance::Vacuum,
        InitCov::Ground => InitialCovariance::Ground,
    };
    DynamicsSetup::new(
        a.common.units(),
        a.gamma,
        a.temperature,
        a.init.0,
        frame,
        cov,
        (t_max, a.dt, stride),
        a.mode.clone(),
        a.verify.then_some(a.cutoff),
    )
}

fn run(cli: Cli) -> Result<(Outcome, Common), Failure> {
    match cli.command {
        Command::Validate(common) => {
            let (lines, failure) = commands::validate(common.units());
            let mut table = Table::new("validate", common.flags(), vec![]);
            table.notes = lines.iter().map(|(k, v)| format!("{k}: {v}")).collect();
            Ok((Outcome { table, failure }, common))
        }
        Command::Ground { common, sweep } => {
            let mut flags = common.flags();
            flags.push(("sweep", sweep.to_string()));
            let outcome = with_pool(common.jobs, || commands::ground(common.units(), &sweep, flags))?;
            Ok((outcome, common))
        }
        Command::Steady {
            common,
            sweep,
            temperature,
            convention,
        } => {
            let mut flags = common.flags();
            let temps = match &sweep {
                Some(s) => {
                    s.expect_one_of(&["T"]).map_err(Failure::Invalid)?;
                    flags.push(("sweep", s.to_string()));
                    s.values()
                }
                None => {
                    flags.push(("T", temperature.to_string()));
                    vec![temperature]
                }
            };
            flags.push(("convention", convention.clone()));
            let outcome = with_pool(common.jobs, || commands::steady(common.units(), &temps, &convention, flags))?;
            Ok((outcome, common))
        }
        Command::Dynamics(a) => {
            let setup = dynamics_setup(&a)?;
            let mut flags = a.common.flags();
            flags.extend([
                ("gamma", a.gamma.to_string()),
                ("T", a.temperature.to_string()),
                ("init", a.init.0.map(|x| x.to_string()).join(",")),
                ("frame", enum_name(&a.frame)),
                ("init-cov", enum_name(&a.init_cov)),
                ("t-max", setup.grid.t_max.to_string()),
                ("dt", a.dt.to_string()),
                ("stride", setup.grid.stride.to_string()),
                ("mode", a.mode.clone()),
            ]);
            if a.verify {
                flags.push(("verify", format!("cutoff={}", a.cutoff)));
            }
            let outcome = commands::dynamics(&setup, flags)?;
            Ok((outcome, a.common))
        }
    }
}

fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match jobs {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        None => f(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let text_validate = matches!(&cli.command, Command::Validate(c) if c.format == Format::Csv);
    match run(cli) {
        Ok((outcome, common)) => {
            let written = if text_validate {
                let mut out = io::stdout().lock();
                outcome.table.notes.iter().try_for_each(|l| writeln!(out, "{l}"))
            } else {
                emit(&outcome.table, &common)
            };
            if let Err(e) = written {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(2);
            }
            match outcome.failure {
                None => ExitCode::SUCCESS,
                Some(f) => {
                    eprintln!("error: {}", f.message());
                    ExitCode::from(f.code() as u8)
                }
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code() as u8)
        }
    }
}
