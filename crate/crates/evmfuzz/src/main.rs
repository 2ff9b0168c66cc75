use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use evmfuzz::agent::AgentMode;
use evmfuzz::campaign::{run_analysis, run_campaign, CampaignConfig};
use evmfuzz::oracle::{OracleKind, ALL_ORACLES};
use evmfuzz::report::{render_summary, write_report};
use evmfuzz::{asm, fixtures};

#[derive(Parser)]
#[command(name = "evmfuzz", version, about = "Security fuzzer for EVM-style smart contracts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fuzz a corpus of contracts and report vulnerability verdicts.
    Fuzz(FuzzArgs),
    /// Run the static analysis pipeline only.
    Analyze(AnalyzeArgs),
    /// Assemble a fixture source file into bytecode.
    Asm(AsmArgs),
    /// Write the bundled fixture contracts as a corpus directory.
    Fixtures(FixturesArgs),
}

#[derive(Args)]
struct FuzzArgs {
    /// Corpus directory (one subdirectory per contract).
    #[arg(long)]
    corpus: PathBuf,
    /// Campaign seed; fully determines the run.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Candidate argument tuples per function.
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Randomized calls executed per contract.
    #[arg(long = "max-calls", default_value_t = 200)]
    max_calls: usize,
    /// Comma-separated oracle list (default: all).
    #[arg(long, value_delimiter = ',')]
    oracles: Vec<String>,
    /// Report output path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optional JSON config: gas schedule overrides, reentry limit, gas budget.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AsmArgs {
    /// Assembly source file.
    file: PathBuf,
    /// Output path for the hex bytecode.
    #[arg(short)]
    out: PathBuf,
    /// Wrap the assembled runtime in a standard creation stub.
    #[arg(long)]
    wrap: bool,
}

#[derive(Args)]
struct FixturesArgs {
    /// Directory to materialize the fixture corpus into.
    #[arg(long)]
    out: PathBuf,
    /// Also write the extra fixtures that are not part of the standard matrix.
    #[arg(long)]
    extra: bool,
}

#[derive(Deserialize, Default)]
struct FileConfig {
    #[serde(default)]
    gas: BTreeMap<String, u64>,
    reentry_limit: Option<u32>,
    gas_budget: Option<u64>,
    value_divisor: Option<u64>,
    /// Agent modes for the attack passes: reentrant, expensive-fallback, passive.
    attack_modes: Option<Vec<String>>,
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run() -> Result<ExitCode, String> {
    let cli = Cli::parse();
    match cli.command {
        Command::Fuzz(args) => {
            let mut config = CampaignConfig {
                corpus_dir: args.corpus,
                seed: args.seed,
                k: args.k,
                max_calls_per_contract: args.max_calls,
                output_path: args.out,
                ..CampaignConfig::default()
            };
            if !args.oracles.is_empty() {
                config.enabled_oracles = parse_oracles(&args.oracles)?;
            }
            if let Some(path) = &args.config {
                apply_file_config(&mut config, path)?;
            }
            let report = run_campaign(&config).map_err(|e| e.to_string())?;
            if let Some(path) = &config.output_path {
                write_report(&report, path).map_err(|e| e.to_string())?;
            }
            print!("{}", render_summary(&report));
            if report.total_verdicts() > 0 {
                Ok(ExitCode::from(1))
            } else {
                Ok(ExitCode::SUCCESS)
            }
        }
        Command::Analyze(args) => {
            let config =
                CampaignConfig { corpus_dir: args.corpus, ..CampaignConfig::default() };
            let analysis = run_analysis(&config).map_err(|e| e.to_string())?;
            let mut json =
                serde_json::to_string_pretty(&analysis).map_err(|e| e.to_string())?;
            json.push('\n');
            match &args.out {
                Some(path) => fs::write(path, &json).map_err(|e| e.to_string())?,
                None => print!("{json}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Asm(args) => {
            let source = fs::read_to_string(&args.file)
                .map_err(|e| format!("{}: {e}", args.file.display()))?;
            let mut code = asm::assemble(&source).map_err(|e| e.to_string())?;
            if args.wrap {
                code = fixtures::wrap_runtime(&code);
            }
            fs::write(&args.out, hex::encode(&code)).map_err(|e| e.to_string())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Fixtures(args) => {
            fixtures::write_corpus(&args.out).map_err(|e| e.to_string())?;
            if args.extra {
                fixtures::write_extra_corpus(&args.out).map_err(|e| e.to_string())?;
            }
            println!("fixture corpus written to {}", args.out.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn parse_oracles(names: &[String]) -> Result<Vec<OracleKind>, String> {
    let mut out = Vec::new();
    for name in names {
        let name = name.trim();
        if name == "all" {
            return Ok(ALL_ORACLES.to_vec());
        }
        let kind = OracleKind::parse(name).ok_or_else(|| {
            format!(
                "unknown oracle `{name}` (expected one of: {})",
                ALL_ORACLES.map(|k| k.name()).join(", ")
            )
        })?;
        if !out.contains(&kind) {
            out.push(kind);
        }
    }
    Ok(out)
}

fn apply_file_config(config: &mut CampaignConfig, path: &PathBuf) -> Result<(), String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let file: FileConfig = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    config.gas_overrides = file.gas;
    if let Some(limit) = file.reentry_limit {
        config.reentry_limit = limit;
    }
    if let Some(budget) = file.gas_budget {
        config.gas_budget = budget;
    }
    if let Some(divisor) = file.value_divisor {
        config.value_divisor = divisor;
    }
    if let Some(modes) = file.attack_modes {
        config.attack_modes = modes
            .iter()
            .map(|name| match name.as_str() {
                "reentrant" => Ok(AgentMode::Reentrant),
                "expensive-fallback" => Ok(AgentMode::ExpensiveFallback),
                "passive" => Ok(AgentMode::Passive),
                other => Err(format!("unknown agent mode `{other}`")),
            })
            .collect::<Result<Vec<_>, _>>()?;
    }
    Ok(())
}
