use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use nrule::geometry::Point;
use nrule::io::{
    cmd_analyze, cmd_build_curve, cmd_simulate, load_config, BuildCurveArgs, CliError,
    ReportFormat, SimulateArgs,
};

#[derive(Parser)]
#[command(name = "nrule", version, about = "Simulate and analyze n-rule maps over line arrangements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Iterate a map and write the orbit as CSV (and optionally SVG).
    Simulate {
        /// System config (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Number of rule applications.
        #[arg(long)]
        steps: usize,
        /// Starting point `x,y`; defaults to the config start or a seeded point.
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        start: Option<Point>,
        /// Orbit CSV output.
        #[arg(long)]
        out: PathBuf,
        /// Optional SVG figure of the orbit tail and limit cycle.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Exit with status 3 when no limit cycle is detected.
        #[arg(long)]
        require_convergence: bool,
    },
    /// Build a closed curve with prescribed incidence angles (degrees).
    BuildCurve {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated incidence angles in degrees, one per vertex.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        angles: Vec<f64>,
        /// Comma-separated carrier labels, one per vertex.
        #[arg(long, value_delimiter = ',')]
        labels: Vec<String>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Print coefficients, contraction and invariant-point data.
    Analyze {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
}

fn parse_point(s: &str) -> Result<Point, String> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| format!("expected x,y, got {s:?}"))?;
    let parse = |v: &str| {
        v.trim()
            .parse::<f64>()
            .map_err(|e| format!("{v:?}: {e}"))
    };
    Ok(Point::new(parse(x)?, parse(y)?))
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Simulate {
            config,
            steps,
            start,
            out,
            svg,
            require_convergence,
        } => {
            let cfg = load_config(&config)?;
            let args = SimulateArgs {
                steps,
                start,
                out_csv: out,
                out_svg: svg,
                require_convergence,
            };
            let outcome = cmd_simulate(&cfg, &args)?;
            Ok(outcome.exit_code())
        }
        Command::BuildCurve {
            config,
            angles,
            labels,
            out,
            svg,
        } => {
            let cfg = load_config(&config)?;
            let args = BuildCurveArgs {
                angles_deg: angles,
                labels,
                out_csv: out,
                out_svg: svg,
            };
            cmd_build_curve(&cfg, &args)?;
            Ok(0)
        }
        Command::Analyze { config, format } => {
            let cfg = load_config(&config)?;
            let format = match format {
                Format::Text => ReportFormat::Text,
                Format::Csv => ReportFormat::Csv,
            };
            print!("{}", cmd_analyze(&cfg, format)?);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    // usage errors are validation failures (1); clap would use 2
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
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
