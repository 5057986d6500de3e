use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "daia", version, about = "Engagement detection over upper-body skeleton streams")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Label a frame stream.
    Run(RunArgs),
    /// Train the intent model on a game session with phase labels.
    Train(TrainArgs),
    /// Compare predicted labels with ground truth.
    Eval(EvalArgs),
    /// Generate a synthetic stream from a scenario script or a game session.
    Synth(SynthArgs),
    /// Parse and compile a transducer spec, then print it formatted.
    FstCheck(FstCheckArgs),
    /// Serve interactive sessions over newline-delimited JSON.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct EngineArgs {
    /// Intent model file.
    #[arg(long)]
    pub model: PathBuf,
    /// Transducer spec; the built-in default when omitted.
    #[arg(long)]
    pub fst: Option<PathBuf>,
    /// Classifier thresholds; built-in defaults when omitted.
    #[arg(long)]
    pub thresholds: Option<PathBuf>,
    /// Frames kept open for relabeling.
    #[arg(long, default_value_t = daia_core::fst::DEFAULT_BUFFER_DEPTH)]
    pub depth: usize,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Frame stream, one record per line.
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub engine: EngineArgs,
    /// Label file to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Per-frame transition trace to write.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Phase labels, one `{"i":..,"phase":..}` record per frame.
    #[arg(long)]
    pub phases: PathBuf,
    /// Model file to write.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub thresholds: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Fraction of frames, from the start, used for training.
    #[arg(long, default_value_t = 0.8)]
    pub split: f64,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Predicted labels.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub truth: PathBuf,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["input", "game"])))]
pub struct SynthArgs {
    /// Scenario script.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Generate a training game session of this many frames instead.
    #[arg(long)]
    pub game: Option<usize>,
    /// Overrides the script's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Jitter for game sessions, mm.
    #[arg(long, default_value_t = 15.0)]
    pub jitter: f64,
    /// Frame stream to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Ground-truth label file to write (scripts).
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Phase label file to write (game sessions).
    #[arg(long, requires = "game")]
    pub phases: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FstCheckArgs {
    /// Spec file; checks the built-in default when omitted.
    #[arg(long)]
    pub fst: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[command(flatten)]
    pub engine: EngineArgs,
    /// 0 picks a free port; the bound address is printed on stdout.
    #[arg(long, default_value_t = 7878)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    #[arg(long, default_value_t = 30)]
    pub fps: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sensor jitter of the synthesized body, mm.
    #[arg(long, default_value_t = 5.0)]
    pub jitter: f64,
}
