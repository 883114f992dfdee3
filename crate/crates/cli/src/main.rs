//! Command-line front end: train, classify, evaluate, detect,
//! extract-features, and synth subcommands over the exprlbp library.

mod commands;
mod config;
mod review;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

/// Errors carrying their process exit code: 1 usage, 2 I/O, 3 bad data,
/// 4 no face found.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Data(String),
    NoFace,
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
            CliError::Data(_) => 3,
            CliError::NoFace => 4,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Data(m) => m.clone(),
            CliError::NoFace => "no face found".into(),
        }
    }
}

impl From<exprlbp::Error> for CliError {
    fn from(e: exprlbp::Error) -> Self {
        match e {
            exprlbp::Error::Io(io) => CliError::Io(io.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "exprlbp",
    version,
    about = "Facial expression classification: block LBP histograms + per-class PCA subspaces"
)]
struct Cli {
    /// TOML file supplying defaults for any flag (flags still win)
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct FeatureFlags {
    /// Working face size as WIDTHxHEIGHT [default: 40x40]
    #[arg(long, value_name = "WxH")]
    face_size: Option<String>,
    /// Block sizes per level, HxW comma-separated [default: 6x6,8x10]
    #[arg(long, value_name = "HxW,..")]
    blocks: Option<String>,
    /// Histogram bins per level, comma-separated [default: 8,16]
    #[arg(long, value_name = "N,..")]
    bins: Option<String>,
}

#[derive(Args, Debug, Default)]
struct BilateralFlags {
    /// Bilateral filter window radius in pixels [default: 2]
    #[arg(long, value_name = "PX")]
    bilateral_radius: Option<u32>,
    /// Bilateral spatial sigma in pixels [default: 2.0]
    #[arg(long, value_name = "SIGMA")]
    bilateral_sigma_spatial: Option<f64>,
    /// Bilateral range sigma in intensity units [default: 25.0]
    #[arg(long, value_name = "SIGMA")]
    bilateral_sigma_range: Option<f64>,
}

#[derive(Args, Debug, Default)]
struct DetectFlags {
    /// Ratio between successive scan scales [default: 1.2]
    #[arg(long, value_name = "F")]
    scale_factor: Option<f64>,
    /// Slide step in pixels at base scale [default: 2]
    #[arg(long, value_name = "PX")]
    step: Option<u32>,
    /// Minimum merged raw hits per detection [default: 3]
    #[arg(long, value_name = "N")]
    min_neighbors: Option<u32>,
    /// Minimum face size in pixels; 0 means the cascade base window [default: 0]
    #[arg(long, value_name = "PX")]
    min_size: Option<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// Train a six-class model from a dataset directory
    Train(TrainArgs),
    /// Score one image against a trained model
    Classify(ClassifyArgs),
    /// Evaluate a model over a dataset, producing a confusion-matrix report
    Evaluate(EvaluateArgs),
    /// Run face detection on one image
    Detect(DetectArgs),
    /// Dump feature vectors for images, one CSV row each
    ExtractFeatures(ExtractFeaturesArgs),
    /// Generate a synthetic labeled dataset on disk
    Synth(SynthArgs),
}

#[derive(Args)]
struct TrainArgs {
    /// Dataset root containing anger/ disgust/ fear/ happiness/ sadness/ surprise/
    dataset_dir: PathBuf,
    /// Where to write the model CSV
    #[arg(short = 'o', long, value_name = "PATH")]
    model_out: PathBuf,
    /// Eigenvectors kept per class [default: 40]
    #[arg(long, value_name = "K")]
    k: Option<usize>,
    /// Treat dataset images as already-cropped faces (the default)
    #[arg(long, conflicts_with = "cascade")]
    pre_cropped: bool,
    /// Detect faces with this cascade before cropping
    #[arg(long, value_name = "PATH")]
    cascade: Option<PathBuf>,
    /// Use face rects from an edited review manifest instead of re-detecting
    #[arg(long, value_name = "PATH")]
    review_manifest: Option<PathBuf>,
    #[command(flatten)]
    features: FeatureFlags,
    #[command(flatten)]
    bilateral: BilateralFlags,
    #[command(flatten)]
    detect: DetectFlags,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Trained model CSV
    model: PathBuf,
    /// Image to classify (binary PGM)
    image: PathBuf,
    /// Treat the image as an already-cropped face (the default)
    #[arg(long, conflicts_with = "cascade")]
    pre_cropped: bool,
    /// Detect the face with this cascade first
    #[arg(long, value_name = "PATH")]
    cascade: Option<PathBuf>,
    /// Emit one machine-readable CSV line: six errors then the label
    #[arg(long)]
    porcelain: bool,
    #[command(flatten)]
    bilateral: BilateralFlags,
    #[command(flatten)]
    detect: DetectFlags,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Trained model CSV
    model: PathBuf,
    /// Dataset root in the training layout
    dataset_dir: PathBuf,
    /// Treat dataset images as already-cropped faces (the default)
    #[arg(long, conflicts_with = "cascade")]
    pre_cropped: bool,
    /// Detect faces with this cascade before cropping
    #[arg(long, value_name = "PATH")]
    cascade: Option<PathBuf>,
    /// Write the full report CSV here
    #[arg(long, value_name = "PATH")]
    report_out: Option<PathBuf>,
    #[command(flatten)]
    bilateral: BilateralFlags,
    #[command(flatten)]
    detect: DetectFlags,
}

#[derive(Args)]
struct DetectArgs {
    /// Image to scan (binary PGM)
    image: PathBuf,
    /// Cascade JSON file
    cascade: PathBuf,
    /// Write an editable review manifest of the detections
    #[arg(long, value_name = "PATH")]
    review_out: Option<PathBuf>,
    #[command(flatten)]
    detect: DetectFlags,
}

#[derive(Args)]
struct ExtractFeaturesArgs {
    /// Images to process (binary PGM), treated as pre-cropped faces
    #[arg(required = true)]
    images: Vec<PathBuf>,
    #[command(flatten)]
    features: FeatureFlags,
    #[command(flatten)]
    bilateral: BilateralFlags,
}

#[derive(Args)]
struct SynthArgs {
    /// Output directory for the generated dataset
    #[arg(short = 'o', long, value_name = "DIR")]
    out: PathBuf,
    /// RNG seed [default: 7]
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Images per class [default: 90]
    #[arg(long, value_name = "N")]
    per_class: Option<u32>,
    /// Uniform noise amplitude in intensity units [default: 10]
    #[arg(long, value_name = "N")]
    noise: Option<u32>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            // clap renders help/usage itself.
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let file_config = match config::FileConfig::load(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}", e.message());
            return ExitCode::from(e.exit_code());
        }
    };

    let result = match cli.command {
        Command::Train(args) => commands::train(args, &file_config),
        Command::Classify(args) => commands::classify(args, &file_config),
        Command::Evaluate(args) => commands::evaluate(args, &file_config),
        Command::Detect(args) => commands::detect(args, &file_config),
        Command::ExtractFeatures(args) => commands::extract_features(args, &file_config),
        Command::Synth(args) => commands::synth(args, &file_config),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
