//! Command-line front end: select an experiment and parameters, emit the
//! report, optionally compare against an expectation file.

use clap::{Args, Parser, Subcommand};
use steane_ft::circuit::{AncillaKind, SyndromeKind};
use steane_ft::engine::EnginePath;
use steane_ft::experiments::{
    self, compare_to_expected, ConditioningMode, ExpectationFile, FidelityReport,
    MixedNoiseVariant, RunParams,
};
use steane_ft::report::{emit, OutputFormat};

#[derive(Parser)]
#[command(
    name = "steane-ft",
    about = "Perturbative fault-tolerance simulator for the [[7,1,3]] Steane code",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and print its fidelity report.
    Run(RunArgs),
    /// Print the step-by-step circuit dump for an experiment's circuit.
    Dump(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment: table1-shor, table1-encoding (alias: table1), table2,
    /// table3, table4, section4b
    experiment: String,

    /// Syndrome ancilla kind: shor or single
    #[arg(long, default_value = "shor")]
    ancilla: String,

    /// Number of Shor-state verification parity checks (0-2)
    #[arg(long, default_value_t = 1)]
    verifications: u8,

    /// Second verification pair, 1-based Shor qubits, e.g. "1,4"
    #[arg(long, default_value = "1,4")]
    second_pair: String,

    /// Which syndrome rounds come first: bit or phase (default: bit, except
    /// section4b which defaults to phase)
    #[arg(long)]
    order_first: Option<String>,

    /// Table-4 variant: perfect-shor-noisy-qec or noisy-shor-perfect-qec
    #[arg(long)]
    variant: Option<String>,

    /// Input-state angle alpha (radians)
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,

    /// Input-state angle beta (radians)
    #[arg(long, default_value_t = 0.0)]
    beta: f64,

    /// Expansion order K (1-3)
    #[arg(long = "order", default_value_t = 2)]
    max_order: u8,

    /// Conditioning mode: exact-zero or even-parity
    #[arg(long, default_value = "exact-zero")]
    conditioning: String,

    /// Engine path: statevector, pauliframe, or both
    #[arg(long, default_value = "both")]
    engine: String,

    /// Worker threads (default: STEANE_FT_WORKERS or all cores)
    #[arg(long)]
    workers: Option<usize>,

    /// Output format: table, csv, json
    #[arg(long, default_value = "table")]
    format: String,

    /// Expectation file to compare against
    #[arg(long)]
    expect: Option<std::path::PathBuf>,

    /// Coefficient tolerance for comparisons
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,

    /// Bit syndrome for section4b, e.g. "0,0,1"
    #[arg(long, default_value = "0,0,1")]
    bit_syndrome: String,

    /// Write the report to a file instead of stdout
    #[arg(long)]
    output: Option<std::path::PathBuf>,
}

fn usage_error(msg: &str) -> ! {
    eprintln!("error: {msg}");
    std::process::exit(2);
}

fn parse_pair(s: &str) -> (u8, u8) {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        usage_error("second pair must be of the form a,b with 1-based Shor qubits");
    }
    let a: u8 = parts[0].trim().parse().unwrap_or_else(|_| usage_error("bad pair index"));
    let b: u8 = parts[1].trim().parse().unwrap_or_else(|_| usage_error("bad pair index"));
    if !(1..=4).contains(&a) || !(1..=4).contains(&b) || a == b {
        usage_error("pair indices must be distinct Shor qubits 1-4");
    }
    (a - 1, b - 1)
}

fn parse_syndrome(s: &str) -> [u8; 3] {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        usage_error("bit syndrome must be s1,s2,s3 with bits 0 or 1");
    }
    let mut out = [0u8; 3];
    for (i, p) in parts.iter().enumerate() {
        out[i] = match p.trim() {
            "0" => 0,
            "1" => 1,
            _ => usage_error("syndrome bits must be 0 or 1"),
        };
    }
    out
}

struct Config {
    ancilla: AncillaKind,
    order_first: SyndromeKind,
    variant: Option<MixedNoiseVariant>,
    alpha: f64,
    beta: f64,
    bit_syndrome: [u8; 3],
    run: RunParams,
    scenario: String,
}

fn parse_config(args: &RunArgs) -> Config {
    let default_order = if args.experiment == "section4b" { "phase" } else { "bit" };
    if !(1..=3).contains(&args.max_order) {
        usage_error("expansion order must be 1, 2 or 3");
    }
    if args.tolerance <= 0.0 {
        usage_error("tolerance must be positive");
    }
    let second_pair = parse_pair(&args.second_pair);
    let ancilla = match args.ancilla.as_str() {
        "shor" => {
            if args.verifications > 2 {
                usage_error("verifications must be 0, 1 or 2");
            }
            AncillaKind::Shor { n_verifications: args.verifications, second_pair }
        }
        "single" => AncillaKind::Single,
        other => usage_error(&format!("unknown ancilla kind '{other}'")),
    };
    let order_first = match args.order_first.as_deref().unwrap_or(default_order) {
        "bit" => SyndromeKind::BitFlip,
        "phase" => SyndromeKind::PhaseFlip,
        other => usage_error(&format!("unknown order '{other}': use bit or phase")),
    };
    let variant = args.variant.as_deref().map(|v| match v {
        "perfect-shor-noisy-qec" => MixedNoiseVariant::PerfectShorNoisyQec,
        "noisy-shor-perfect-qec" => MixedNoiseVariant::NoisyShorPerfectQec,
        other => usage_error(&format!("unknown table4 variant '{other}'")),
    });
    let conditioning = match args.conditioning.as_str() {
        "exact-zero" => ConditioningMode::ExactZero,
        "even-parity" => ConditioningMode::EvenParity,
        other => usage_error(&format!("unknown conditioning '{other}'")),
    };
    let path = match args.engine.as_str() {
        "statevector" => EnginePath::StateVector,
        "pauliframe" => EnginePath::PauliFrame,
        "both" => EnginePath::Both,
        other => usage_error(&format!("unknown engine '{other}'")),
    };
    let workers = args
        .workers
        .or_else(|| {
            std::env::var("STEANE_FT_WORKERS").ok().and_then(|v| v.parse().ok())
        })
        .unwrap_or_else(num_cpus);
    if workers == 0 {
        usage_error("workers must be >= 1");
    }
    let scenario = match ancilla {
        AncillaKind::Single => "single_ancilla".to_string(),
        AncillaKind::Shor { n_verifications: 0, .. } => "no_verifications".to_string(),
        AncillaKind::Shor { n_verifications: 1, .. } => "one_verification".to_string(),
        AncillaKind::Shor { .. } => "two_verifications".to_string(),
    };
    Config {
        ancilla,
        order_first,
        variant,
        alpha: args.alpha,
        beta: args.beta,
        bit_syndrome: parse_syndrome(&args.bit_syndrome),
        run: RunParams { max_order: args.max_order, conditioning, path, workers, progress: None },
        scenario,
    }
}

fn num_cpus() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn build_report(experiment: &str, cfg: &Config) -> (FidelityReport, String) {
    match experiment {
        "table1-shor" => {
            let (n, pair) = match cfg.ancilla {
                AncillaKind::Shor { n_verifications, second_pair } => (n_verifications, second_pair),
                AncillaKind::Single => usage_error("table1-shor requires a Shor ancilla"),
            };
            (experiments::shor_fidelity_experiment(n, pair, &cfg.run), cfg.scenario.clone())
        }
        "table1" | "table1-encoding" => {
            (experiments::encoding_experiment(cfg.ancilla, &cfg.run), cfg.scenario.clone())
        }
        "table2" => (
            experiments::qec_experiment(SyndromeKind::BitFlip, cfg.ancilla, cfg.alpha, cfg.beta, &cfg.run),
            cfg.scenario.clone(),
        ),
        "table3" => (
            experiments::qec_experiment(SyndromeKind::PhaseFlip, cfg.ancilla, cfg.alpha, cfg.beta, &cfg.run),
            cfg.scenario.clone(),
        ),
        "table4" => {
            let variant = cfg
                .variant
                .unwrap_or_else(|| usage_error("table4 requires --variant"));
            let order_name = match cfg.order_first {
                SyndromeKind::BitFlip => "bit_first",
                SyndromeKind::PhaseFlip => "phase_first",
            };
            let scenario = format!("{}_{}", variant.name().replace('-', "_"), order_name);
            (
                experiments::mixed_noise_experiment(variant, cfg.order_first, cfg.alpha, cfg.beta, &cfg.run),
                scenario,
            )
        }
        "section4b" => {
            let out = experiments::nonzero_syndrome_experiment(
                cfg.bit_syndrome,
                cfg.alpha,
                cfg.beta,
                cfg.order_first,
                &cfg.run,
            );
            (out.report, cfg.scenario.clone())
        }
        other => usage_error(&format!(
            "unknown experiment '{other}'; expected table1-shor, table1-encoding, table2, table3, table4 or section4b"
        )),
    }
}

fn circuit_for_dump(experiment: &str, cfg: &Config) -> steane_ft::circuit::Circuit {
    use steane_ft::circuit::*;
    match experiment {
        "table1-shor" => match cfg.ancilla {
            AncillaKind::Shor { n_verifications, second_pair } => {
                build_ghz_fragment_circuit(n_verifications, second_pair)
            }
            AncillaKind::Single => usage_error("table1-shor requires a Shor ancilla"),
        },
        "table1" | "table1-encoding" => build_encoding_circuit(cfg.ancilla),
        "table2" | "table3" | "table4" | "section4b" => {
            let case = if experiment == "section4b" {
                SyndromeCase::Fixed { bit: cfg.bit_syndrome, phase: [0, 0, 0] }
            } else {
                SyndromeCase::AllZero
            };
            let order_first = if experiment == "table3" {
                SyndromeKind::PhaseFlip
            } else {
                cfg.order_first
            };
            let profile = cfg
                .variant
                .map(|v| v.profile())
                .unwrap_or_else(NoiseProfile::all_noisy);
            build_qec_circuit(&QecParams {
                order_first,
                ancilla: cfg.ancilla,
                case,
                alpha: cfg.alpha,
                beta: cfg.beta,
                profile,
            })
        }
        other => usage_error(&format!("unknown experiment '{other}'")),
    }
}

fn main() {
    let cli = Cli::parse();
    match cli.command {
        Command::Dump(args) => {
            let cfg = parse_config(&args);
            print!("{}", circuit_for_dump(&args.experiment, &cfg).dump());
        }
        Command::Run(args) => {
            let mut cfg = parse_config(&args);
            let format = OutputFormat::parse(&args.format)
                .unwrap_or_else(|| usage_error("format must be table, csv or json"));

            // Patterns-processed ticker on stderr for long enumerations.
            let counter = std::sync::Arc::new(std::sync::atomic::AtomicU64::new(0));
            let done = std::sync::Arc::new(std::sync::atomic::AtomicBool::new(false));
            cfg.run.progress = Some(counter.clone());
            let ticker = {
                let counter = counter.clone();
                let done = done.clone();
                std::thread::spawn(move || {
                    use std::sync::atomic::Ordering;
                    let mut ticks = 0u32;
                    while !done.load(Ordering::Relaxed) {
                        std::thread::sleep(std::time::Duration::from_millis(250));
                        ticks += 1;
                        if ticks >= 8 && ticks % 4 == 0 {
                            eprintln!(
                                "... {} patterns processed",
                                counter.load(Ordering::Relaxed)
                            );
                        }
                    }
                })
            };
            let (report, scenario) = build_report(&args.experiment, &cfg);
            done.store(true, std::sync::atomic::Ordering::Relaxed);
            let _ = ticker.join();

            let comparison = args.expect.as_ref().map(|path| {
                let file = ExpectationFile::load(path).unwrap_or_else(|e| usage_error(&e));
                compare_to_expected(&report, &file.rows, &scenario, cfg.alpha, cfg.beta, args.tolerance)
            });

            let text = emit(&report, format, comparison.as_ref());
            match &args.output {
                Some(path) => std::fs::write(path, &text).unwrap_or_else(|e| {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    std::process::exit(2);
                }),
                None => print!("{text}"),
            }
            if let Some(cmp) = comparison {
                if !cmp.hard_pass() {
                    std::process::exit(1);
                }
            }
        }
    }
}
