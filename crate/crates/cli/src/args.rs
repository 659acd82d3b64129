use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "latentcloud",
    version,
    about = "Point-cloud autoencoder toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic dataset of normalized clouds plus manifest.json
    GenData(GenDataArgs),
    /// Train an autoencoder on a dataset
    Train(TrainArgs),
    /// Score reconstructions and nearest-family classification; prints JSON
    Eval(EvalArgs),
    /// Encode a cloud file into a latent file (one value per line)
    Encode(EncodeArgs),
    /// Decode a latent file into a cloud file
    Decode(DecodeArgs),
    /// Decode a weighted interpolation of several latent files
    Interp(InterpArgs),
    /// Serve the /api/v1 JSON API until interrupted
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct GenDataArgs {
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    pub count: u64,
    /// Family mix, e.g. `box-chair,table,lamp` or `box-chair:2,table:1`
    #[arg(long, default_value = "box-chair,table,lamp")]
    pub families: String,
    /// Points per cloud
    #[arg(long, default_value_t = 256, value_parser = clap::value_parser!(u64).range(1..))]
    pub points: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Path to manifest.json
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long)]
    pub out_model: PathBuf,
    /// Latent size k
    #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u64).range(1..))]
    pub latent: u64,
    #[arg(long, default_value_t = 200)]
    pub epochs: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub lr: f64,
    /// Seeds initialization, the validation split and the epoch shuffle
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fraction of the dataset held out for validation
    #[arg(long, default_value_t = 0.2)]
    pub val_split: f64,
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
    pub batch_size: u64,
    #[arg(long, value_delimiter = ',', default_values_t = [64, 128, 256])]
    pub encoder_widths: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [256, 512])]
    pub decoder_widths: Vec<usize>,
    /// CSV loss log; defaults to the model path with extension `.loss.csv`
    #[arg(long)]
    pub loss_log: Option<PathBuf>,
    /// Validation clouds scored with approximate EMD each epoch
    #[arg(long, default_value_t = 8)]
    pub emd_subset: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Subset {
    /// Items held out by the split recorded in the model
    HeldOut,
    /// Items used for training
    Train,
    /// Every item in the dataset
    All,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Path to manifest.json
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, value_enum, default_value_t = Subset::HeldOut)]
    pub subset: Subset,
    /// Final auction increment for approximate EMD
    #[arg(long, default_value_t = 1e-3)]
    pub emd_epsilon: f64,
    /// Also write the report here
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Cloud file (text `x y z` lines or binary PCB1)
    #[arg(long)]
    pub input: PathBuf,
    /// Latent text file
    #[arg(long)]
    pub output: PathBuf,
    /// Center and scale the cloud to the unit ball first
    #[arg(long)]
    pub normalize: bool,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Latent text file
    #[arg(long)]
    pub input: PathBuf,
    /// Cloud file; `.pcb` writes binary, anything else text
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct InterpArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Latent text files, comma separated
    #[arg(long, value_delimiter = ',', required = true)]
    pub latents: Vec<PathBuf>,
    /// One non-negative weight per latent, comma separated
    #[arg(
        long,
        value_delimiter = ',',
        required = true,
        allow_negative_numbers = true
    )]
    pub weights: Vec<f64>,
    /// Cloud file; `.pcb` writes binary, anything else text
    #[arg(long)]
    pub output: PathBuf,
    /// Also write the interpolated latent
    #[arg(long)]
    pub latent_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, env = "LATENTCLOUD_MODEL")]
    pub model: PathBuf,
    /// Path to manifest.json
    #[arg(long, env = "LATENTCLOUD_DATASET")]
    pub dataset: PathBuf,
    #[arg(long, env = "LATENTCLOUD_BIND", default_value = "127.0.0.1:8080")]
    pub bind: String,
    /// Origin allowed by CORS; any origin when omitted
    #[arg(long)]
    pub cors_origin: Option<String>,
    /// Directory of static assets served outside /api/v1
    #[arg(long)]
    pub static_dir: Option<PathBuf>,
}
