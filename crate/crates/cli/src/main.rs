//! `tdface` command line: feature extraction, evaluation, sweeps and the
//! full system comparison.
//!
//! Exit codes: 0 success, 2 configuration error, 3 data error, 4 numeric
//! failure.

mod commands;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "tdface", version, about = "Face identification with transformed-domain features")]
struct Cli {
    /// Run on the calling thread only.
    #[arg(long, global = true)]
    sequential: bool,
    /// `key = value` config file; flags given on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

/// Where images come from. Without any of these, `ORL_ROOT` is used.
#[derive(Args, Debug, Clone, Default)]
pub struct DataArgs {
    /// ORL tree with `sX/Y.pgm` files.
    #[arg(long, value_name = "DIR")]
    pub orl: Option<PathBuf>,
    /// Text file of `path subject sample` lines.
    #[arg(long, value_name = "FILE")]
    pub manifest: Option<PathBuf>,
    /// Generate a synthetic corpus from this seed.
    #[arg(long, value_name = "SEED")]
    pub synth: Option<u64>,
    /// Synthetic subjects [default: 40].
    #[arg(long, value_name = "N")]
    pub synth_subjects: Option<usize>,
    /// Synthetic images per subject [default: 10].
    #[arg(long, value_name = "N")]
    pub synth_samples: Option<usize>,
    /// Synthetic image height [default: 112].
    #[arg(long, value_name = "N")]
    pub synth_rows: Option<usize>,
    /// Synthetic image width [default: 92].
    #[arg(long, value_name = "N")]
    pub synth_cols: Option<usize>,
    /// Gallery images per subject (the first ones); the rest are probes.
    #[arg(long, value_name = "K")]
    pub train_per_subject: Option<usize>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct FeatureArgs {
    /// dct, dft, logdft or klt.
    #[arg(long)]
    pub transform: Option<String>,
    /// rect:N or sector:R.
    #[arg(long)]
    pub mask: Option<String>,
    /// Drop coefficients closer than this to the origin.
    #[arg(long, value_name = "R")]
    pub low_cut: Option<f64>,
    /// DFT coefficient handling: modulus or reim.
    #[arg(long)]
    pub complex: Option<String>,
    /// Offset added before the logarithm of the log-DFT.
    #[arg(long)]
    pub offset: Option<f64>,
    /// Eigenface count for klt.
    #[arg(long)]
    pub dim: Option<usize>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct TrainArgs {
    /// Seed for everything random.
    #[arg(long)]
    pub seed: Option<u64>,
    /// MSEREG performance ratio.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// MLP training epochs [default: 15000].
    #[arg(long)]
    pub epochs: Option<usize>,
    /// MLP hidden neurons.
    #[arg(long)]
    pub hidden: Option<usize>,
    /// RBF center limit.
    #[arg(long)]
    pub max_centers: Option<usize>,
    /// Fusion score normalization: minmax or zscore.
    #[arg(long)]
    pub normalization: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write gallery and probe feature CSVs.
    Extract {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        feature: FeatureArgs,
        /// Also write DCT low-pass reconstructions of the first N probes.
        #[arg(long, value_name = "N")]
        reconstruct: Option<usize>,
        /// Output directory [default: tdface-out].
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Train a classifier on the gallery and identify every probe.
    Evaluate {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        feature: FeatureArgs,
        /// nn:mad, nn:mse, mlp, pnn[:spread], rbf[:spread] or fusion:A+B.
        #[arg(long)]
        classifier: Option<String>,
        #[command(flatten)]
        train: TrainArgs,
        /// Also write genuine/impostor score histograms with this many bins.
        #[arg(long, value_name = "BINS")]
        histogram: Option<usize>,
        /// Save the trained network as JSON.
        #[arg(long)]
        save_model: bool,
        /// Output directory [default: tdface-out].
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Identification rate against feature dimension or spread.
    Sweep {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        feature: FeatureArgs,
        /// Classifier to sweep [default: nn:mad for dim, rbf for spread].
        #[arg(long)]
        classifier: Option<String>,
        #[command(flatten)]
        train: TrainArgs,
        /// dim or spread.
        #[arg(long)]
        axis: Option<String>,
        /// Largest mask side for the dim axis; klt uses dims side^2.
        #[arg(long, value_name = "N")]
        max_side: Option<usize>,
        /// Mask family for the dim axis: rect or sector.
        #[arg(long)]
        shape: Option<String>,
        /// Spread grid as lo:step:hi or a comma list.
        #[arg(long)]
        spreads: Option<String>,
        /// Output directory [default: tdface-out].
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Write a synthetic corpus as an `sX/Y.pgm` tree.
    Synth {
        #[arg(long, value_name = "SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 40)]
        subjects: usize,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, default_value_t = 112)]
        rows: usize,
        #[arg(long, default_value_t = 92)]
        cols: usize,
        /// Directory to create the tree in.
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
    /// Run the ten-system comparison and print it next to the reference rates.
    Table1 {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        train: TrainArgs,
        /// Spread grid for the PNN and RBF rows [default: 0.1:0.1:2.0].
        #[arg(long)]
        spreads: Option<String>,
        /// all, or nn for the six nearest-neighbour rows.
        #[arg(long)]
        rows: Option<String>,
        /// Output directory [default: tdface-out].
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, tdface::Error::Argument(_)) {
                eprintln!("\n{}", Cli::command().render_usage());
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
