use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use weakdecay::harness::{self, check, exit, HarnessError, RawConfig, ScenarioConfig};

#[derive(Parser, Debug)]
#[command(
    name = "weakdecay",
    version,
    about = "Weak values of decaying and precessing two-level systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug, Clone)]
struct RunArgs {
    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one config key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// CSV output path (defaults to the config's `out`, else stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Upper bound on worker threads.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Spin precession weak values.
    Spin(RunArgs),
    /// Finite-bath decay.
    Decay(RunArgs),
    /// Lorentzian lattice sums.
    Sums(RunArgs),
    /// Convergence in N for a decay scenario (`levels = 250,500,...`).
    Sweep(RunArgs),
    /// Run the built-in property suite.
    Check(RunArgs),
}

fn load(args: &RunArgs, model: Option<&str>) -> Result<ScenarioConfig, HarnessError> {
    let mut raw = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| HarnessError::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
            RawConfig::parse(&text).map_err(HarnessError::ConfigInvalid)?
        }
        None => RawConfig::default(),
    };
    if let Some(m) = model {
        match raw.get("model") {
            Some(given) if given != m => {
                return Err(HarnessError::ConfigInvalid(vec![harness::FieldError {
                    field: "model".into(),
                    message: format!("config says `{given}` but the subcommand is `{m}`"),
                }]))
            }
            _ => raw.set("model", m),
        }
    }
    let mut errors = Vec::new();
    for pair in &args.set {
        if let Err(e) = raw.set_pair(pair) {
            errors.push(e);
        }
    }
    if !errors.is_empty() {
        return Err(HarnessError::ConfigInvalid(errors));
    }
    let mut config = raw.build().map_err(HarnessError::ConfigInvalid)?;
    if args.out.is_some() {
        config.out = args.out.clone();
    }
    Ok(config)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), HarnessError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| HarnessError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_model(args: &RunArgs, model: &str) -> Result<i32, HarnessError> {
    let config = load(args, Some(model))?;
    let output = harness::run_scenario(&config)?;
    emit(config.out.as_deref(), &output.to_csv())?;
    if config.out.is_some() {
        println!(
            "{}",
            serde_json::to_string(&output.summary).expect("summary serializes")
        );
    } else {
        eprintln!(
            "{}",
            serde_json::to_string(&output.summary).expect("summary serializes")
        );
    }
    Ok(harness::scenario_exit_code(&output.summary))
}

fn run_sweep(args: &RunArgs) -> Result<i32, HarnessError> {
    let config = load(args, None)?;
    if config.levels.is_empty() {
        return Err(HarnessError::ConfigInvalid(vec![harness::FieldError {
            field: "levels".into(),
            message: "required for sweep".into(),
        }]));
    }
    let table = harness::convergence_sweep(&config, &config.levels)?;
    let summary = json!({
        "levels": table.levels,
        "trend": table.trend,
        "tolerance": table.tolerance,
        "pass": table.pass,
    });
    emit(config.out.as_deref(), &table.to_csv())?;
    if config.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(if table.pass {
        exit::OK
    } else {
        exit::TOLERANCE_BREACH
    })
}

fn run_check() -> i32 {
    let reports = check::run_all();
    for r in &reports {
        println!(
            "{} [{}] {}: {} ({:.2} s)",
            if r.pass { "PASS" } else { "FAIL" },
            r.criterion,
            r.id,
            r.detail,
            r.seconds
        );
    }
    let failed = reports.iter().filter(|r| !r.pass).count();
    println!(
        "{}",
        json!({ "properties": reports.len(), "failed": failed, "pass": failed == 0 })
    );
    if failed == 0 {
        exit::OK
    } else {
        exit::TOLERANCE_BREACH
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let args = match &cli.command {
        Command::Spin(a)
        | Command::Decay(a)
        | Command::Sums(a)
        | Command::Sweep(a)
        | Command::Check(a) => a,
    };
    if let Some(k) = args.threads {
        if k == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(exit::INVALID_INPUT as u8);
        }
        // Only fails if a pool was already installed, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global();
    }
    let result = match &cli.command {
        Command::Spin(a) => run_model(a, "spin"),
        Command::Decay(a) => run_model(a, "decay"),
        Command::Sums(a) => run_model(a, "sums"),
        Command::Sweep(a) => run_sweep(a),
        Command::Check(_) => Ok(run_check()),
    };
    let code = result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit_code()
    });
    ExitCode::from(code as u8)
}
