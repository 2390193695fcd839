use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use slicegauss::params::ErrorModel;
use slicegauss::synth::SynthKind;
use slicegauss_cli::{
    cmd_bench, cmd_filter, cmd_optimize, cmd_psnr, cmd_synth, BenchConfig, CliError, CliResult,
    Method, OptimizeOptions,
};

/// Constant-time Gaussian filtering with running sums.
#[derive(Parser)]
#[command(name = "slicegauss", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Blur a PGM image.
    Filter {
        input: PathBuf,
        output: PathBuf,
        #[arg(long)]
        sigma: f64,
        /// Number of slices (3, 4 or 5 with built-in parameters).
        #[arg(long)]
        k: Option<usize>,
        /// Parameter file written by `optimize`.
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        parallel: bool,
    },
    /// Search slice parameters and write them as TOML.
    Optimize {
        output: PathBuf,
        #[arg(long)]
        k: usize,
        /// qf (natural-image model) or l2 (plain squared error).
        #[arg(long, default_value = "qf")]
        model: ErrorModel,
        /// Half-kernel samples to fit.
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Value assigned to the zero frequency of the image spectrum.
        #[arg(long, default_value_t = slicegauss::DEFAULT_DC_VALUE)]
        dc_value: f64,
    },
    /// Time and score filters over a directory of PGM images.
    Bench {
        corpus: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = [2.0, 5.0, 10.0, 20.0, 40.0])]
        sigmas: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [3, 4, 5])]
        ks: Vec<usize>,
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "slices-qf,slices-l2,exact"
        )]
        methods: Vec<String>,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        /// Output file; CSV goes to stdout otherwise.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Also time the multi-threaded filter (rows tagged `+par`).
        #[arg(long)]
        parallel: bool,
    },
    /// Write a synthetic test image.
    Synth {
        /// one-over-f, uniform-noise, impulse or constant.
        kind: SynthKind,
        output: PathBuf,
        #[arg(long, default_value_t = 512)]
        width: usize,
        #[arg(long, default_value_t = 512)]
        height: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Bits per sample, 8 or 16.
        #[arg(long, default_value_t = 8)]
        depth: u8,
    },
    /// Print the PSNR in dB of one image against another.
    Psnr { reference: PathBuf, test: PathBuf },
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Filter {
            input,
            output,
            sigma,
            k,
            params,
            parallel,
        } => cmd_filter(&input, &output, sigma, k, params.as_deref(), parallel),
        Command::Optimize {
            output,
            k,
            model,
            samples,
            dc_value,
        } => {
            let opts = OptimizeOptions {
                samples,
                dc_value,
                ..OptimizeOptions::default()
            };
            let p = cmd_optimize(k, model, &output, &opts)?;
            eprintln!(
                "k = {} breakpoints {:?} E2 = {:e}",
                p.k, p.breakpoints, p.e2
            );
            Ok(())
        }
        Command::Bench {
            corpus,
            sigmas,
            ks,
            methods,
            reps,
            csv,
            parallel,
        } => {
            let cfg = BenchConfig {
                sigmas,
                ks,
                reps,
                methods: methods
                    .iter()
                    .map(|m| m.parse())
                    .collect::<CliResult<Vec<Method>>>()?,
                parallel,
            };
            cmd_bench(&corpus, &cfg, csv.as_deref()).map(|_| ())
        }
        Command::Synth {
            kind,
            output,
            width,
            height,
            seed,
            depth,
        } => {
            let maxval = match depth {
                8 => 255,
                16 => 65535,
                d => return Err(CliError::Usage(format!("--depth must be 8 or 16, got {d}"))),
            };
            cmd_synth(kind, width, height, seed, &output, maxval)
        }
        Command::Psnr { reference, test } => {
            println!("{}", cmd_psnr(&reference, &test)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("slicegauss: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
