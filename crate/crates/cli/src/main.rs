use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qsegsim_cli::analyze::{analyze, AnalyzeConfig, Channel};
use qsegsim_cli::decode_check::decode_check;
use qsegsim_cli::gauge_sweep::{self, GaugeConfig};
use qsegsim_cli::grid::{parse_counts, parse_reals};
use qsegsim_cli::output::{json_bytes, with_pool, workers, write_json, CliError, Result, SCHEMA, VERSION};
use qsegsim_cli::protocols::{verify_protocols, Which};
use qsegsim_cli::resources::{resource_curves, ResourceConfig};
use qsegsim_cli::surface::{self, SurfaceConfig};
use qsegsim_core::{build_layout, schedule_round};

#[derive(Parser)]
#[command(
    name = "qsegsim",
    version,
    about = "Surface codes on segmented ion chains: sweeps, checks and fits"
)]
struct Cli {
    /// Worker threads; overrides QSEGSIM_WORKERS.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Suppress per-point progress on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum ChannelArg {
    Z,
    X,
}

#[derive(Subcommand)]
enum Cmd {
    /// Memory experiments over a (d, eps2) grid.
    SurfaceSweep {
        /// Distances, e.g. 3,5,7.
        #[arg(long, default_value = "3,5,7")]
        d: String,
        /// eps2 grid, e.g. 0.004:0.012:0.001.
        #[arg(long)]
        eps2: String,
        /// Noisy rounds per trial; overrides --rounds-per-d.
        #[arg(long)]
        rounds: Option<usize>,
        #[arg(long, default_value_t = 8)]
        rounds_per_d: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "surface.csv")]
        out: PathBuf,
    },
    /// Level curves of the concatenated gauge code.
    GaugeSweep {
        #[arg(long, default_value_t = 4)]
        levels: usize,
        /// p_CNOT grid, e.g. 1e-6:1e-3:x2.
        #[arg(long)]
        p_cnot: String,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        /// Surface-code distance behind the logical rates.
        #[arg(long, default_value_t = 5)]
        distance: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "gauge.csv")]
        out: PathBuf,
    },
    /// Matching against exhaustive pairing on random graphs.
    DecodeCheck {
        #[arg(long, default_value_t = 200)]
        graphs: u64,
        #[arg(long, default_value_t = 12)]
        max_defects: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Symbolic check of the deformation protocols.
    VerifyProtocol {
        /// cnot, hadamard, transfer or all.
        #[arg(long, default_value = "all")]
        protocol: String,
        #[arg(long, default_value = "2,3,4,5")]
        d: String,
        /// Skip the corrupted variants.
        #[arg(long)]
        no_mutations: bool,
        /// Include per-step reports.
        #[arg(long)]
        details: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Threshold, scaling and gauge fits over sweep CSVs.
    Analyze {
        #[arg(long)]
        surface: Vec<PathBuf>,
        #[arg(long)]
        gauge: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "z")]
        channel: ChannelArg,
        #[arg(long, default_value_t = 0.1)]
        gauge_max_p: f64,
        #[arg(long, default_value_t = 50)]
        min_failures: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Segment sizes and gate budgets from the published fits.
    ResourceCurves {
        #[arg(long, default_value_t = 4e-6)]
        target: f64,
        #[arg(long, default_value_t = 5)]
        s_min: usize,
        #[arg(long, default_value_t = 41)]
        s_max: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Geometry and round schedule of a chain.
    Layout {
        #[arg(long, default_value_t = 5)]
        s: usize,
        #[arg(long, default_value_t = 1)]
        logical: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit<T: serde::Serialize>(out: &Option<PathBuf>, value: &T) -> Result<()> {
    match out {
        Some(p) => write_json(p, value),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(&json_bytes(value))
                .map_err(|e| CliError::Io {
                    path: "<stdout>".into(),
                    source: e,
                })
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let w = workers(cli.workers)?;
    let quiet = cli.quiet;
    match cli.cmd {
        Cmd::SurfaceSweep {
            d,
            eps2,
            rounds,
            rounds_per_d,
            trials,
            seed,
            out,
        } => {
            let cfg = SurfaceConfig {
                ds: parse_counts(&d)?,
                eps2: parse_reals(&eps2)?,
                rounds,
                rounds_per_d,
                trials,
                seed,
            };
            cfg.validate()?;
            with_pool(w, || {
                surface::run(&cfg, &out, |r| {
                    if !quiet {
                        eprintln!(
                            "d={} eps2={} failures Z={} X={}",
                            r.d, r.eps2, r.failures_z, r.failures_x
                        );
                    }
                })
            })??;
        }
        Cmd::GaugeSweep {
            levels,
            p_cnot,
            trials,
            distance,
            seed,
            out,
        } => {
            let cfg = GaugeConfig {
                levels,
                p_cnot: parse_reals(&p_cnot)?,
                trials,
                seed,
                d: distance,
            };
            cfg.validate()?;
            with_pool(w, || {
                gauge_sweep::run(&cfg, &out, |rows| {
                    if !quiet {
                        let f: Vec<String> = rows.iter().map(|r| format!("L{}={}", r.n, r.failures)).collect();
                        eprintln!("p_CNOT={} failures {}", rows[0].p_cnot, f.join(" "));
                    }
                })
            })??;
        }
        Cmd::DecodeCheck {
            graphs,
            max_defects,
            seed,
            out,
        } => {
            let r = decode_check(graphs, max_defects, seed)?;
            emit(&out, &r)?;
            if !r.passed {
                return Err(CliError::Check(format!(
                    "{} graphs disagree with exhaustive pairing",
                    r.mismatches.len()
                )));
            }
        }
        Cmd::VerifyProtocol {
            protocol,
            d,
            no_mutations,
            details,
            out,
        } => {
            let r = verify_protocols(&Which::parse(&protocol)?, &parse_counts(&d)?, !no_mutations, details)?;
            emit(&out, &r)?;
            if !r.passed {
                return Err(CliError::Check("protocol verification failed".into()));
            }
        }
        Cmd::Analyze {
            surface,
            gauge,
            channel,
            gauge_max_p,
            min_failures,
            seed,
            out,
        } => {
            if surface.is_empty() && gauge.is_empty() {
                return Err(CliError::Config("give --surface and/or --gauge".into()));
            }
            let cfg = AnalyzeConfig {
                surface,
                gauge,
                channel: match channel {
                    ChannelArg::Z => Channel::Z,
                    ChannelArg::X => Channel::X,
                },
                gauge_max_p,
                min_failures,
                gauge_min_failures: min_failures,
                seed,
                ..AnalyzeConfig::default()
            };
            emit(&out, &analyze(&cfg)?)?;
        }
        Cmd::ResourceCurves {
            target,
            s_min,
            s_max,
            out,
        } => {
            let cfg = ResourceConfig {
                target,
                s_range: (s_min, s_max),
                ..ResourceConfig::default()
            };
            emit(&out, &resource_curves(&cfg)?)?;
        }
        Cmd::Layout { s, logical, out } => {
            let l = build_layout(s, logical).map_err(|e| CliError::Config(e.to_string()))?;
            let v = serde_json::json!({
                "version": VERSION,
                "schema": SCHEMA,
                "layout": l.to_json(),
                "schedule": schedule_round(&l).to_json(),
            });
            emit(&out, &v)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
