//! `dualsim` command-line front end.
//!
//! Text tables go to stdout; JSON and CSV files go to the output directory
//! and every written path is printed. With `--format json` stdout carries a
//! JSON listing of the written files and errors are JSON on stderr.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use dualsim::experiments::{
    arrivals_check, calibrate, ho_g, multi_scenario_experiment, read_observed_csv,
    run_engine_traced, run_replications, validation_experiment, CalibrationOptions,
    CalibrationTargets, ScenarioComparisonReport, SearchSpace, ValidationOptions,
};
use dualsim::report;
use dualsim::trace::{write_customers_csv, write_trace_csv};
use dualsim::{load_config, Config, Engine, Scenario, StreamSet};

#[derive(Parser, Debug)]
#[command(
    name = "dualsim",
    version,
    about = "Discrete-event and agent-based fitting-room simulation"
)]
struct Cli {
    /// Configuration file (JSON); the built-in default when omitted
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed; falls back to DUALSIM_SEED, then the config
    #[arg(long, global = true, env = "DUALSIM_SEED")]
    seed: Option<u64>,

    /// Replications per engine and scenario (default from config)
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    replications: Option<u64>,

    /// Directory for JSON and CSV output
    #[arg(long, global = true, default_value = "dualsim-out")]
    out: PathBuf,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run replications of one scenario and write per-replication summaries
    Run {
        #[arg(long, value_enum, default_value_t = EngineArg::Both)]
        engine: EngineArg,
        /// Scenario id (default: the first configured scenario)
        #[arg(long)]
        scenario: Option<String>,
        /// Also write the event trace and customer records of replication 0
        #[arg(long)]
        trace: bool,
    },
    /// Compare DES and ABS with each other and with an observed day
    Validate {
        #[arg(long)]
        scenario: Option<String>,
        /// CSV of observed waits with header `wait_minutes`
        #[arg(long)]
        observed: Option<PathBuf>,
    },
    /// Compare every configured scenario with the first one
    Compare {
        #[arg(long, value_enum, default_value_t = EngineArg::Both)]
        engine: EngineArg,
    },
    /// Fit service and dwell means to target scenario outputs
    Calibrate {
        #[arg(long, default_value_t = 1.69)]
        target_wait: f64,
        #[arg(long, default_value_t = 8.79)]
        target_time_in_system: f64,
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long, value_enum, default_value_t = SingleEngine::Des)]
        engine: SingleEngine,
        /// Maximum number of model evaluations
        #[arg(long, default_value_t = 80)]
        budget: usize,
        #[arg(long, default_value_t = 0.02)]
        tolerance: f64,
    },
    /// Compare sampled hourly arrival counts with the configured rates
    ArrivalsCheck {
        /// Bucket width in minutes
        #[arg(long, default_value_t = 60.0)]
        bucket: f64,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum EngineArg {
    Des,
    Abs,
    Both,
}

impl EngineArg {
    fn engines(self) -> Vec<Engine> {
        match self {
            EngineArg::Des => vec![Engine::Des],
            EngineArg::Abs => vec![Engine::Abs],
            EngineArg::Both => vec![Engine::Des, Engine::Abs],
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SingleEngine {
    Des,
    Abs,
}

impl From<SingleEngine> for Engine {
    fn from(e: SingleEngine) -> Self {
        match e {
            SingleEngine::Des => Engine::Des,
            SingleEngine::Abs => Engine::Abs,
        }
    }
}

#[derive(Serialize)]
struct Emitted<'a> {
    command: &'a str,
    files: Vec<String>,
}

#[derive(Serialize)]
struct JsonError {
    error: String,
    causes: Vec<String>,
}

#[derive(Serialize)]
struct ServiceModelFragment<'a> {
    service_model: &'a dualsim::ServiceModel,
}

#[derive(Serialize)]
struct CompareSummary<'a> {
    reports: Vec<&'a ScenarioComparisonReport>,
    ho_g: Option<dualsim::experiments::Verdict>,
}

struct Ctx {
    config: Config,
    seed: u64,
    replications: usize,
    out: PathBuf,
    format: Format,
    files: Vec<String>,
}

impl Ctx {
    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        fs::create_dir_all(&self.out)
            .with_context(|| format!("cannot create output directory {}", self.out.display()))?;
        let path = self.out.join(name);
        fs::write(&path, contents).with_context(|| format!("cannot write {}", path.display()))?;
        self.files.push(path.display().to_string());
        Ok(())
    }

    fn text(&self, s: &str) {
        if self.format == Format::Text {
            print!("{s}");
        }
    }

    fn scenario(&self, id: Option<&str>) -> Result<Scenario> {
        match id {
            Some(id) => self
                .config
                .scenario(id)
                .cloned()
                .with_context(|| format!("no scenario with id {id:?} in the configuration")),
            None => Ok(self.config.scenarios[0].clone()),
        }
    }
}

fn file_id(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn engine_tag(e: Engine) -> &'static str {
    match e {
        Engine::Des => "des",
        Engine::Abs => "abs",
    }
}

fn cmd_run(ctx: &mut Ctx, engine: EngineArg, scenario: Option<&str>, trace: bool) -> Result<()> {
    let scenario = ctx.scenario(scenario)?;
    let profile = ctx.config.profile();
    let sid = file_id(&scenario.id);
    for e in engine.engines() {
        let set = run_replications(
            e,
            &scenario,
            &ctx.config.service_model,
            &profile,
            ctx.replications,
            ctx.seed,
        )?;
        ctx.text(&report::run_summary_text(&set));
        ctx.text("\n");
        let tag = engine_tag(e);
        ctx.write(&format!("run_{tag}_s{sid}.csv"), &set.summary_csv())?;
        ctx.write(&format!("run_{tag}_s{sid}.json"), &report::to_json(&set))?;
        if trace {
            let (run, records) = run_engine_traced(
                e,
                &scenario,
                &ctx.config.service_model,
                &profile,
                &StreamSet::new(ctx.seed, 0),
            )?;
            let mut buf = Vec::new();
            write_trace_csv(&records, &mut buf, e == Engine::Abs)?;
            ctx.write(
                &format!("trace_{tag}_s{sid}_r0.csv"),
                &String::from_utf8(buf)?,
            )?;
            let mut buf = Vec::new();
            write_customers_csv(&run.customers, &mut buf)?;
            ctx.write(
                &format!("customers_{tag}_s{sid}_r0.csv"),
                &String::from_utf8(buf)?,
            )?;
        }
    }
    Ok(())
}

fn cmd_validate(ctx: &mut Ctx, scenario: Option<&str>, observed: Option<&Path>) -> Result<()> {
    let scenario = ctx.scenario(scenario)?;
    let profile = ctx.config.profile();
    let observed = observed.map(read_observed_csv).transpose()?;
    let model = &ctx.config.service_model;
    let des = run_replications(
        Engine::Des,
        &scenario,
        model,
        &profile,
        ctx.replications,
        ctx.seed,
    )?;
    let abs = run_replications(
        Engine::Abs,
        &scenario,
        model,
        &profile,
        ctx.replications,
        ctx.seed,
    )?;
    let opts = ValidationOptions::from(&ctx.config.experiment);
    let r = validation_experiment(&des, &abs, observed.as_deref(), &opts)?;
    ctx.text(&report::validation_text(&r));
    let sid = file_id(&scenario.id);
    ctx.write(&format!("validation_s{sid}.json"), &report::to_json(&r))?;
    ctx.write(
        &format!("histogram_des_s{sid}.csv"),
        &r.histograms.des.to_csv(),
    )?;
    ctx.write(
        &format!("histogram_abs_s{sid}.csv"),
        &r.histograms.abs.to_csv(),
    )?;
    if let Some(h) = &r.histograms.observed {
        ctx.write("histogram_observed.csv", &h.to_csv())?;
    }
    Ok(())
}

fn cmd_compare(ctx: &mut Ctx, engine: EngineArg) -> Result<()> {
    if ctx.config.scenarios.len() < 2 {
        bail!("compare needs at least two scenarios in the configuration");
    }
    let profile = ctx.config.profile();
    let alpha = ctx.config.experiment.alpha;
    let mut reports = Vec::new();
    for e in engine.engines() {
        let r = multi_scenario_experiment(
            e,
            &ctx.config.scenarios,
            &ctx.config.service_model,
            &profile,
            ctx.replications,
            ctx.seed,
            alpha,
        )?;
        ctx.write(
            &format!("compare_{}.json", engine_tag(e)),
            &report::to_json(&r),
        )?;
        reports.push(r);
    }
    let agreement = match reports.as_slice() {
        [d, a] => Some(ho_g(d, a)),
        _ => None,
    };
    let refs: Vec<&ScenarioComparisonReport> = reports.iter().collect();
    ctx.text(&report::scenario_text(&refs, agreement));
    if agreement.is_some() {
        let summary = CompareSummary {
            reports: refs,
            ho_g: agreement,
        };
        ctx.write("compare_summary.json", &report::to_json(&summary))?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_calibrate(
    ctx: &mut Ctx,
    targets: CalibrationTargets,
    scenario: Option<&str>,
    engine: Engine,
    budget: usize,
    tolerance: f64,
    replications_given: bool,
) -> Result<()> {
    let scenario = ctx.scenario(scenario)?;
    let opts = CalibrationOptions {
        engine,
        replications: if replications_given {
            ctx.replications
        } else {
            ctx.config.experiment.replications
        },
        master_seed: ctx.seed,
        budget,
        tolerance,
    };
    let r = calibrate(
        targets,
        &scenario,
        &ctx.config.service_model,
        &ctx.config.profile(),
        SearchSpace::default(),
        opts,
    )?;
    ctx.text(&report::calibration_text(&r));
    ctx.write("calibration.json", &report::to_json(&r))?;
    ctx.write(
        "calibrated_service_model.json",
        &report::to_json(&ServiceModelFragment {
            service_model: &r.service_model,
        }),
    )?;
    let mut config = ctx.config.clone();
    config.service_model = r.service_model.clone();
    ctx.write(
        "calibrated_config.json",
        &format!("{}\n", config.to_json_pretty()),
    )?;
    Ok(())
}

fn cmd_arrivals(ctx: &mut Ctx, bucket: f64) -> Result<()> {
    let c = arrivals_check(&ctx.config.profile(), ctx.replications, ctx.seed, bucket)?;
    ctx.text(&report::arrivals_text(&c));
    ctx.write("arrivals_check.json", &report::to_json(&c))?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let config = match &cli.config {
        Some(p) => load_config(p)?,
        None => Config::default_config(),
    };
    let replications_given = cli.replications.is_some();
    let mut ctx = Ctx {
        seed: cli.seed.unwrap_or(config.experiment.master_seed),
        replications: cli
            .replications
            .map_or(config.experiment.replications, |n| n as usize),
        config,
        out: cli.out,
        format: cli.format,
        files: Vec::new(),
    };
    let name = match &cli.command {
        Command::Run {
            engine,
            scenario,
            trace,
        } => {
            cmd_run(&mut ctx, *engine, scenario.as_deref(), *trace)?;
            "run"
        }
        Command::Validate { scenario, observed } => {
            cmd_validate(&mut ctx, scenario.as_deref(), observed.as_deref())?;
            "validate"
        }
        Command::Compare { engine } => {
            cmd_compare(&mut ctx, *engine)?;
            "compare"
        }
        Command::Calibrate {
            target_wait,
            target_time_in_system,
            scenario,
            engine,
            budget,
            tolerance,
        } => {
            let targets = CalibrationTargets {
                mean_wait: *target_wait,
                mean_time_in_system: *target_time_in_system,
            };
            cmd_calibrate(
                &mut ctx,
                targets,
                scenario.as_deref(),
                (*engine).into(),
                *budget,
                *tolerance,
                replications_given,
            )?;
            "calibrate"
        }
        Command::ArrivalsCheck { bucket } => {
            cmd_arrivals(&mut ctx, *bucket)?;
            "arrivals-check"
        }
    };
    match ctx.format {
        Format::Text => {
            for f in &ctx.files {
                println!("wrote {f}");
            }
        }
        Format::Json => {
            let emitted = Emitted {
                command: name,
                files: ctx.files,
            };
            println!("{}", serde_json::to_string(&emitted)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match format {
                Format::Text => eprintln!("error: {e:#}"),
                Format::Json => {
                    let err = JsonError {
                        error: e.to_string(),
                        causes: e.chain().skip(1).map(|c| c.to_string()).collect(),
                    };
                    eprintln!(
                        "{}",
                        serde_json::to_string(&err).unwrap_or_else(|_| e.to_string())
                    );
                }
            }
            ExitCode::FAILURE
        }
    }
}
