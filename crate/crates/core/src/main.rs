use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use involucalc::cli::report::{parse_covector, read_file};
use involucalc::cli::{parse_structure, run_report, Mode, Options};
use involucalc::hull::DEFAULT_K_MAX;

#[derive(Parser)]
#[command(name = "involucalc", version, about = "Analysis of locally integrable involutive structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Args)]
struct Common {
    /// Structure definition file.
    file: PathBuf,
    /// Report format.
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Directory for CSV output.
    #[arg(long, value_name = "DIR")]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Characteristic set, Levi forms, hull chain, loci, bundle checks and any [approx]/[fbi] runs.
    Analyze {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = DEFAULT_K_MAX)]
        kmax: usize,
        /// Covector at 0 as comma-separated exact constants; repeatable.
        #[arg(long, value_name = "XI")]
        covector: Vec<String>,
    },
    /// Automorphism PDE system and candidate verdicts.
    Autosys {
        #[command(flatten)]
        common: Common,
    },
    /// s-approximate solution from the [approx] section.
    Approx {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        order: Option<usize>,
        /// Half-width of the sampling box.
        #[arg(long = "box")]
        half_width: Option<f64>,
        /// Grid points per axis.
        #[arg(long)]
        grid: Option<usize>,
    },
    /// FBI direction scan of the [fbi] data.
    Wavefront {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        kappa: Option<f64>,
        #[arg(long)]
        dirs: Option<usize>,
        /// Geometric radii `a:b:M`.
        #[arg(long, value_name = "a:b:M")]
        radii: Option<String>,
        /// Covector used to derive the normal form when [fbi] gives no b.
        #[arg(long, value_name = "XI")]
        covector: Option<String>,
    },
}

fn parse_radii(s: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || format!("radii '{s}' must look like a:b:M with 0 < a < b and M >= 2");
    let [a, b, m] = parts.as_slice() else { return Err(bad()) };
    let (a, b, m): (f64, f64, usize) =
        (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?, m.trim().parse().map_err(|_| bad())?);
    if !(a > 0.0 && b > a && m >= 2) {
        return Err(bad());
    }
    Ok((a, b, m))
}

fn run(cli: Cli) -> Result<bool, String> {
    let (common, opts) = match cli.command {
        Command::Analyze { common, kmax, covector } => {
            let mut o = Options::new(Mode::Analyze);
            o.k_max = kmax;
            o.covectors = covector.iter().map(|c| parse_covector(c)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
            (common, o)
        }
        Command::Autosys { common } => (common, Options::new(Mode::Autosys)),
        Command::Approx { common, order, half_width, grid } => {
            let mut o = Options::new(Mode::Approx);
            o.order = order;
            o.half_width = half_width;
            o.grid = grid;
            (common, o)
        }
        Command::Wavefront { common, kappa, dirs, radii, covector } => {
            let mut o = Options::new(Mode::Wavefront);
            o.kappa = kappa;
            o.dirs = dirs;
            o.radii = radii.as_deref().map(parse_radii).transpose()?;
            if let Some(c) = covector {
                o.covectors = vec![parse_covector(&c).map_err(|e| e.to_string())?];
            }
            (common, o)
        }
    };
    let text = read_file(&common.file).map_err(|e| e.to_string())?;
    let file = parse_structure(&text).map_err(|e| format!("{}: {e}", common.file.display()))?;
    let opts = Options { csv_dir: common.csv, ..opts };
    let report = run_report(&file, &opts);
    match common.format {
        Format::Text => print!("{}", report.render_text()),
        Format::Machine => print!("{}", report.render_machine()),
    }
    for (module, msg) in &report.errors {
        eprintln!("error [{module}]: {msg}");
    }
    Ok(report.ok())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
