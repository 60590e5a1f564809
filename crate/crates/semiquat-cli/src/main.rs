use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use semiquat::config::{parse_grid, CurveChoice, MetricSetting, OutputFormat, RunConfig};

mod commands;
mod table;

#[derive(Parser)]
#[command(name = "semiquat", version, about = "Frenet frames, involutes and associated curves of semi-real quaternionic curves")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Frenet apparatus along the grid.
    Frenet(Common),
    /// Involute samples: position, distance and tangency residuals, frame.
    Involute(Common),
    /// Run the verification suites; exit status 1 if any check fails.
    Verify(Common),
    /// Projection data for the curve, its involute and their associated curves.
    Project {
        #[command(flatten)]
        common: Common,
        /// Component of the 4D curves to drop (1-4).
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u8).range(1..=4))]
        drop_axis: u8,
    },
    /// The hyperbolic example: curvatures, involute and associated curves.
    Example(Common),
}

#[derive(Args, Clone, Default)]
struct Common {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Builtin curve (example31, cubic, fuzz:<seed>) or a .csv file.
    #[arg(long)]
    curve: Option<String>,
    /// Involute constant.
    #[arg(long, allow_hyphen_values = true)]
    c: Option<f64>,
    /// Sample grid a:b:n.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Metric preset: default or paper24.
    #[arg(long)]
    metric: Option<String>,
    /// Output file (directory for `project`); standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(c) = &self.curve {
            cfg.curve = CurveChoice::from_arg(c);
        }
        if let Some(c) = self.c {
            cfg.c = c;
        }
        if let Some(g) = &self.grid {
            cfg.grid = parse_grid(g)?;
        }
        if let Some(m) = &self.metric {
            cfg.metric = MetricSetting::named(m)?;
        }
        if let Some(o) = &self.out {
            cfg.output.path = Some(o.clone());
        }
        if let Some(f) = &self.format {
            cfg.output.format = Some(f.parse::<OutputFormat>()?);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Command::Frenet(c) => commands::frenet(&c.resolve()?).map(|()| true),
        Command::Involute(c) => commands::involute(&c.resolve()?).map(|()| true),
        Command::Verify(c) => commands::verify(&c.resolve()?),
        Command::Project { common, drop_axis } => {
            commands::project(&common.resolve()?, drop_axis as usize).map(|()| true)
        }
        Command::Example(c) => {
            let mut cfg = c.resolve()?;
            cfg.curve = CurveChoice::Builtin("example31".into());
            commands::example(&cfg).map(|()| true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli).context("semiquat failed") {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
