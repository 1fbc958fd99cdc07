use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nkgeom_cli::config::ConfigError;
use nkgeom_cli::report::SCHEMA;
use nkgeom_cli::{build_model, run_scenario, ModelKind, ScenarioConfig};
use nkgeom_core::invariants::{antiholo_range, classify, contractions, nu_from_scalars, Budget};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "nkgeom",
    version,
    about = "Curvature checks for nearly Kähler model geometries"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its report.
    Verify(Scenario),
    /// Classify the pointwise curvature data of a model.
    Classify(Scenario),
    /// Extremes of the antiholomorphic sectional curvature of a model.
    Range(Scenario),
    /// Print the config and report formats.
    ReportSchema,
}

#[derive(Args)]
struct Scenario {
    /// Scenario file; flags below override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    c: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Sets both tolerances.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    /// Report path.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Scenario {
    fn resolve(&self) -> Result<ScenarioConfig, ConfigError> {
        let mut config = match (&self.config, &self.model) {
            (Some(path), _) => ScenarioConfig::read(path)?,
            (None, Some(model)) => ScenarioConfig::for_model(model.parse()?),
            (None, None) => return Err(ConfigError::MissingModel),
        };
        if let Some(model) = &self.model {
            let model: ModelKind = model.parse()?;
            if model != config.model {
                // Switching models resets the model-dependent defaults.
                let mut fresh = ScenarioConfig::for_model(model);
                fresh.seed = config.seed;
                fresh.tol_structural = config.tol_structural;
                fresh.tol_chart = config.tol_chart;
                fresh.samples = config.samples;
                fresh.refine_steps = config.refine_steps;
                fresh.report_path = config.report_path;
                config = fresh;
            }
        }
        if let Some(n) = self.n {
            config.n = n;
        }
        if let Some(c) = self.c {
            config.c = c;
        }
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(tol) = self.tol {
            config.tol_structural = tol;
            config.tol_chart = tol;
        }
        if let Some(samples) = self.samples {
            config.samples = samples;
        }
        if let Some(out) = &self.out {
            config.report_path = Some(out.clone());
        }
        config.validate()?;
        Ok(config)
    }
}

fn usage_error(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(EXIT_USAGE)
}

fn verify(args: &Scenario) -> ExitCode {
    let config = match args.resolve() {
        Ok(c) => c,
        Err(e) => return usage_error(e),
    };
    let outcome = match run_scenario(&config) {
        Ok(o) => o,
        Err(e) => return usage_error(e),
    };
    for d in &outcome.diagnostics {
        eprintln!("warning: {d}");
    }
    let report = &outcome.report;
    if let Some(path) = &config.report_path {
        if let Err(e) = report.write(path) {
            return usage_error(e);
        }
    }
    print!("{}", report.to_text());
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}

fn classify_cmd(args: &Scenario) -> ExitCode {
    let result = args
        .resolve()
        .map_err(|e| e.to_string())
        .and_then(|config| {
            let model = build_model(&config).map_err(|e| e.to_string())?;
            let budget = Budget {
                samples: config.samples,
                refine_steps: config.refine_steps,
            };
            classify(
                &model.curvature,
                &model.point,
                budget,
                config.seed,
                config.tol_structural,
            )
            .map_err(|e| e.to_string())
        });
    match result {
        Ok(label) => {
            println!("label={}", label.label);
            println!("nu={:.16e}", label.nu);
            println!("nu_min={:.16e}", label.nu_min);
            println!("nu_max={:.16e}", label.nu_max);
            println!("holomorphic={:.16e}", label.holomorphic_curvature_estimate);
            println!("tau_gap={:.16e}", label.tau_gap);
            ExitCode::SUCCESS
        }
        Err(e) => usage_error(e),
    }
}

fn range_cmd(args: &Scenario) -> ExitCode {
    let result = args
        .resolve()
        .map_err(|e| e.to_string())
        .and_then(|config| {
            let model = build_model(&config).map_err(|e| e.to_string())?;
            let range = antiholo_range(
                &model.curvature,
                &model.point,
                config.samples,
                config.refine_steps,
                config.seed,
            )
            .map_err(|e| e.to_string())?;
            let data = contractions(&model.curvature, &model.point).map_err(|e| e.to_string())?;
            Ok((range, nu_from_scalars(config.n, data.tau, data.tau_star)))
        });
    match result {
        Ok((range, nu)) => {
            println!("nu_min={:.16e}", range.nu_min);
            println!("nu_max={:.16e}", range.nu_max);
            println!("nu_scalar={nu:.16e}");
            ExitCode::SUCCESS
        }
        Err(e) => usage_error(e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Verify(args) => verify(args),
        Command::Classify(args) => classify_cmd(args),
        Command::Range(args) => range_cmd(args),
        Command::ReportSchema => {
            print!("{SCHEMA}");
            ExitCode::SUCCESS
        }
    }
}
