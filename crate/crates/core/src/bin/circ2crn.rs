use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgAction, Parser, Subcommand, ValueEnum};

use circ2crn::driver::{self, RunConfig, EXIT_VERIFY_FAILED};
use circ2crn::pipeline::Scheme;
use circ2crn::plot::svg_plot;
use circ2crn::{Error, Warning};

#[derive(Parser)]
#[command(
    name = "circ2crn",
    version,
    about = "Compile linear circuits into chemical reaction networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Auto,
    Be,
    Direct,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Auto => Scheme::Auto,
            SchemeArg::Be => Scheme::BackwardEuler,
            SchemeArg::Direct => Scheme::Direct,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compile a netlist into a `.crn` file.
    #[command(disable_help_flag = true, allow_negative_numbers = true)]
    Compile {
        netlist: PathBuf,
        #[arg(short = 'h', long = "step", default_value_t = 0.01)]
        h: f64,
        /// Annihilation rate, or `auto` for 1/h.
        #[arg(long, default_value = "auto")]
        gamma: String,
        #[arg(long, value_enum, default_value = "auto")]
        scheme: SchemeArg,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
        #[arg(long, action = ArgAction::Help)]
        help: Option<bool>,
    },
    /// Simulate a `.crn` file under mass action.
    #[command(allow_negative_numbers = true)]
    Simulate {
        crn: PathBuf,
        #[arg(short = 'T', long = "time")]
        t_end: f64,
        /// Integration step, or `auto` for 1/(20 * fastest rate).
        #[arg(long, default_value = "auto")]
        dt: String,
        /// Record every N-th step.
        #[arg(long, default_value_t = 1)]
        every: usize,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Compare the compiled network with the reference DAE solver.
    #[command(disable_help_flag = true, allow_negative_numbers = true)]
    Verify {
        netlist: PathBuf,
        #[arg(short = 'h', long = "step", default_value_t = 0.01)]
        h: f64,
        #[arg(short = 'T', long = "time")]
        t_end: f64,
        #[arg(long)]
        tol: f64,
        /// Comma-separated step sizes for a convergence table.
        #[arg(long)]
        study: Option<String>,
        #[arg(long, default_value = "auto")]
        gamma: String,
        #[arg(long, default_value = "auto")]
        dt: String,
        #[arg(long, value_enum, default_value = "auto")]
        scheme: SchemeArg,
        #[arg(long, action = ArgAction::Help)]
        help: Option<bool>,
    },
    /// Measure gain and phase at the given frequencies.
    #[command(disable_help_flag = true, allow_negative_numbers = true)]
    Freq {
        netlist: PathBuf,
        /// Comma-separated angular frequencies.
        #[arg(long)]
        omega: String,
        #[arg(short = 'h', long = "step", default_value_t = 0.01)]
        h: f64,
        #[arg(long, default_value = "auto")]
        gamma: String,
        #[arg(long, default_value = "auto")]
        dt: String,
        /// Start of the fit window.
        #[arg(long, default_value_t = 20.0)]
        transient: f64,
        #[arg(long, value_enum, default_value = "auto")]
        scheme: SchemeArg,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
        #[arg(long, action = ArgAction::Help)]
        help: Option<bool>,
    },
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn warn(warnings: &[Warning]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn base_config(h: f64, gamma: &str, dt: &str, scheme: SchemeArg) -> Result<RunConfig, Error> {
    let mut cfg = RunConfig {
        h,
        gamma: driver::parse_auto(gamma)?,
        dt: driver::parse_auto(dt)?,
        scheme: scheme.into(),
        ..RunConfig::default()
    };
    if let Some(seed) = RunConfig::seed_from_env()? {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Command::Compile {
            netlist,
            h,
            gamma,
            scheme,
            output,
            ..
        } => {
            let cfg = base_config(h, &gamma, "auto", scheme)?;
            let out = driver::compile(&read(&netlist)?, &cfg)?;
            warn(&out.warnings);
            write_or_print(output.as_deref(), &out.text)?;
            Ok(0)
        }
        Command::Simulate {
            crn,
            t_end,
            dt,
            every,
            output,
            plot,
        } => {
            let out = driver::simulate(&read(&crn)?, t_end, driver::parse_auto(&dt)?, every)?;
            warn(&out.warnings);
            write_or_print(output.as_deref(), &out.trajectory.to_csv())?;
            if let Some(path) = plot {
                let svg = svg_plot(&out.trajectory, &[], &crn.display().to_string())?;
                write_or_print(Some(&path), &svg)?;
            }
            Ok(0)
        }
        Command::Verify {
            netlist,
            h,
            t_end,
            tol,
            study,
            gamma,
            dt,
            scheme,
            ..
        } => {
            let mut cfg = base_config(h, &gamma, &dt, scheme)?;
            cfg.t_end = t_end;
            let hs = study.as_deref().map(driver::parse_list).transpose()?;
            let report = driver::verify(&read(&netlist)?, &cfg, tol, hs.as_deref())?;
            warn(&report.warnings);
            print!("{report}");
            Ok(if report.passed() {
                0
            } else {
                EXIT_VERIFY_FAILED
            })
        }
        Command::Freq {
            netlist,
            omega,
            h,
            gamma,
            dt,
            transient,
            scheme,
            output,
            ..
        } => {
            let mut cfg = base_config(h, &gamma, &dt, scheme)?;
            cfg.transient = transient;
            let omegas = driver::parse_list(&omega)?;
            let points = driver::freq(&read(&netlist)?, &omegas, &cfg)?;
            write_or_print(output.as_deref(), &driver::freq_csv(&points))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage errors count as invalid input, like a bad netlist.
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
