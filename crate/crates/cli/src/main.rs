//! `lexalign`: stimulus design, the experiment server and the alignment
//! analysis from one binary.
//!
//! Exit status is 0 on success, 1 when the input or configuration is
//! invalid and 2 when a computation or write fails.

mod commands;
mod error;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use settings::{Document, PipelineOverrides, ServiceOverrides};

#[derive(Parser)]
#[command(
    name = "lexalign",
    version,
    about = "Word-embedding alignment with human similarity judgments"
)]
struct Cli {
    /// Configuration document (TOML).
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    /// More log output; repeat for debug.
    #[arg(long, short, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check input files and write a feature table with derived columns.
    Ingest(IngestArgs),
    /// OLD20 of words against a lexicon.
    Old20(Old20Args),
    /// Cluster a candidate pool and pick the five stimulus groups.
    SelectStimuli(SelectArgs),
    /// Every unordered triple of the stimulus words.
    Triplets(TripletsArgs),
    /// Split the triplets into per-participant blocks.
    Schedule(ScheduleArgs),
    /// Run the experiment server.
    Serve(ServeArgs),
    /// Build one RDM.
    Rdm(RdmArgs),
    /// Spearman alignment of two RDM files.
    Rsa(RsaArgs),
    /// Partial Spearman correlation of two RDM files given control RDMs.
    Partial(PartialArgs),
    /// Remove features from embeddings and test the alignment change.
    Ablate(AblateArgs),
    /// Write the full report bundle.
    Report(ReportArgs),
    /// Check the configuration without running anything.
    Validate(ReportArgs),
    /// Write a synthetic study with known structure, plus a config for it.
    Synth(SynthArgs),
}

#[derive(clap::Args)]
pub struct IngestArgs {
    #[command(flatten)]
    paths: PipelineOverrides,
    /// Where to write the merged feature table.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Additive constant in log10(per-million count + c).
    #[arg(long, default_value_t = 1.0)]
    frequency_constant: f64,
}

#[derive(clap::Args)]
pub struct Old20Args {
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// File with one word per line.
    #[arg(long = "words")]
    word_list: Option<PathBuf>,
    words: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
pub struct SelectArgs {
    #[arg(long)]
    embeddings: Option<PathBuf>,
    #[arg(long)]
    merge_duplicates: bool,
    #[arg(long)]
    features: Option<PathBuf>,
    /// Derives missing frequency and OLD20 columns.
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Candidate pool; defaults to feature-table words with vectors.
    #[arg(long)]
    candidates: Option<PathBuf>,
    /// Cluster count [default: 19].
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    n_components: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    /// Use this cluster instead of the most concreteness-diverse one.
    #[arg(long)]
    cluster: Option<usize>,
    #[arg(long)]
    group_size: Option<usize>,
    #[arg(long)]
    sd_threshold: Option<f64>,
    #[arg(long)]
    length_min: Option<usize>,
    #[arg(long)]
    length_max: Option<usize>,
    /// Matching tolerance in standard deviations.
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
pub struct TripletsArgs {
    #[arg(long)]
    stimuli: Option<PathBuf>,
    /// Plain word list instead of a stimulus file.
    #[arg(long, conflicts_with = "stimuli")]
    words: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
pub struct ScheduleArgs {
    #[arg(long)]
    stimuli: Option<PathBuf>,
    #[arg(long, conflicts_with = "stimuli")]
    words: Option<PathBuf>,
    /// [default: 40]
    #[arg(long)]
    participants: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
pub struct ServeArgs {
    #[command(flatten)]
    service: ServiceOverrides,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum RdmKindArg {
    Behavioral,
    Embedding,
    Feature,
}

#[derive(clap::Args)]
pub struct RdmArgs {
    #[arg(long, value_enum)]
    kind: RdmKindArg,
    /// Conditions, one word per line; defaults to the judgment log's words.
    #[arg(long)]
    words: Option<PathBuf>,
    #[arg(long)]
    judgments: Option<PathBuf>,
    #[arg(long)]
    embeddings: Option<PathBuf>,
    #[arg(long)]
    merge_duplicates: bool,
    #[arg(long)]
    features: Option<PathBuf>,
    #[arg(long)]
    column: Option<String>,
    /// Write `pair_a,pair_b,value` rows instead of the matrix.
    #[arg(long)]
    condensed: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
pub struct RsaArgs {
    #[arg(long)]
    target: PathBuf,
    #[arg(long)]
    model: PathBuf,
    /// Permutation p-value with this many relabellings instead of the t test.
    #[arg(long)]
    permutations: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
pub struct PartialArgs {
    #[arg(long)]
    target: PathBuf,
    #[arg(long)]
    model: PathBuf,
    #[arg(long = "control")]
    controls: Vec<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
pub struct AblateArgs {
    #[command(flatten)]
    paths: PipelineOverrides,
    /// Feature column to remove; repeat for several. Defaults to the config.
    #[arg(long = "feature")]
    features: Vec<String>,
    #[arg(long)]
    folds: Option<i64>,
    /// Write the table here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for the ridge fits.
    #[arg(long)]
    fits_dir: Option<PathBuf>,
}

#[derive(clap::Args)]
pub struct ReportArgs {
    #[command(flatten)]
    paths: PipelineOverrides,
}

#[derive(clap::Args)]
pub struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    n_test: Option<usize>,
    #[arg(long)]
    n_train: Option<usize>,
    #[arg(long)]
    n_filler: Option<usize>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    participants: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let run = || -> Result<(), error::CliError> {
        let doc = Document::load(cli.config.as_deref())?;
        match &cli.command {
            Command::Ingest(a) => commands::ingest(&doc, a),
            Command::Old20(a) => commands::old20(&doc, a),
            Command::SelectStimuli(a) => commands::select(&doc, a),
            Command::Triplets(a) => commands::triplets(&doc, a),
            Command::Schedule(a) => commands::schedule(&doc, a),
            Command::Serve(a) => commands::serve(&doc, a),
            Command::Rdm(a) => commands::rdm(a),
            Command::Rsa(a) => commands::rsa_cmd(a),
            Command::Partial(a) => commands::partial(a),
            Command::Ablate(a) => commands::ablate(&doc, a),
            Command::Report(a) => commands::report(&doc, a),
            Command::Validate(a) => commands::validate_cmd(&doc, a),
            Command::Synth(a) => commands::synth(a),
        }
    };
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
