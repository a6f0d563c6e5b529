//! Command-line surface: argument parsing, configuration and dispatch.
//!
//! Settings resolve in three layers: command-line flags override the
//! `--config` TOML file, which overrides the built-in defaults.

mod commands;
mod svg;

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::corpus::{load_stopwords, TokenizerSettings};
use crate::pipeline::PipelineSettings;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_FOLDS: usize = 10;

#[derive(Debug, Parser)]
#[command(
    name = "chronoturn",
    version,
    about = "Find turnaround years in a timestamped corpus"
)]
pub struct Cli {
    #[command(flatten)]
    pub settings: SettingArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Tunables shared by every command. Unset flags fall back to the config
/// file, then to the defaults shown.
#[derive(Debug, Default, Args)]
pub struct SettingArgs {
    /// TOML file with any of the settings below (snake_case keys)
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Number of topics [default: 20]
    #[arg(long, global = true)]
    pub k_topics: Option<usize>,
    /// Dirichlet prior on document topics [default: 50/K, i.e. 2.5 at K=20]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Dirichlet prior on topic words [default: 0.01]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// Gibbs sweeps during training [default: 1000]
    #[arg(long, global = true)]
    pub lda_iters: Option<usize>,
    /// Gibbs sweeps when inferring topics of unseen text [default: 200]
    #[arg(long, global = true)]
    pub infer_iters: Option<usize>,
    /// SVM regularization constant [default: 1.0]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub svm_c: Option<f64>,
    /// SVM passes over the training set [default: 100]
    #[arg(long, global = true)]
    pub svm_epochs: Option<usize>,
    /// Cross-validation folds [default: 10]
    #[arg(long, global = true)]
    pub folds: Option<usize>,
    /// Minimum document frequency of a vocabulary term [default: 5]
    #[arg(long, global = true)]
    pub min_df: Option<usize>,
    /// Minimum token length in characters [default: 3]
    #[arg(long, global = true)]
    pub min_token_len: Option<usize>,
    /// Master seed for every random choice [default: 42]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Stopword file, one word per line [default: bundled English list]
    #[arg(long, global = true, value_name = "PATH")]
    pub stopwords: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a corpus and print its statistics
    Ingest {
        /// JSON-Lines corpus
        corpus: PathBuf,
    },
    /// Train the topic model and year classifier; writes model.txt
    Train(TrainArgs),
    /// Cross-validate; writes confusion.csv, predictions_cv.csv, report.toml
    Evaluate(EvaluateArgs),
    /// Score every year; writes year_scores_<mode>.csv
    ScoreYears(ScoreArgs),
    /// Mean topic proportions per year; writes trends.csv and top_words.csv
    Trends(TrendArgs),
    /// Generate a synthetic corpus; writes corpus.jsonl and truth.toml
    Synth(SynthArgs),
    /// Predict the year of text read from standard input
    Predict(PredictArgs),
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Model file path [default: <out>/model.txt]
    #[arg(long)]
    pub model: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Test mode: predict every document's true year
    #[arg(long)]
    pub identity_oracle: bool,
    /// Synthetic truth file; adds the within-epoch confusion mass to the report
    #[arg(long)]
    pub truth: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScoreMode {
    /// Held-out predictions from cross-validation
    Cv,
    /// Predictions for the training documents of one model
    Resub,
}

impl ScoreMode {
    pub fn label(self) -> &'static str {
        match self {
            ScoreMode::Cv => "cv",
            ScoreMode::Resub => "resub",
        }
    }
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "cv")]
    pub mode: ScoreMode,
    /// Score a predictions CSV (doc_id,true_year,predicted_year) instead of
    /// computing predictions; `--mode` then only labels the output
    #[arg(long)]
    pub predictions: Option<PathBuf>,
    /// Test mode: predict every document's true year
    #[arg(long)]
    pub identity_oracle: bool,
    /// Also write a bar chart
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Args)]
pub struct TrendArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Infer topics with this model instead of training one
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Terms per topic in top_words.csv
    #[arg(long, default_value_t = 10)]
    pub top_words: usize,
    /// Also write a line chart
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// TOML epoch specification
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
}

/// Config file schema; every key optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    k_topics: Option<usize>,
    alpha: Option<f64>,
    beta: Option<f64>,
    lda_iters: Option<usize>,
    infer_iters: Option<usize>,
    svm_c: Option<f64>,
    svm_epochs: Option<usize>,
    folds: Option<usize>,
    min_df: Option<usize>,
    min_token_len: Option<usize>,
    seed: Option<u64>,
    stopwords: Option<PathBuf>,
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub pipeline: PipelineSettings,
    pub folds: usize,
    pub seed: u64,
    /// Whether `--seed` was given on the command line or in the config.
    pub seed_explicit: bool,
}

impl RunConfig {
    pub fn resolve(args: &SettingArgs) -> anyhow::Result<Self> {
        let file = match &args.config {
            Some(path) => {
                let text =
                    fs::read_to_string(path).with_context(|| format!("{}", path.display()))?;
                toml::from_str::<ConfigFile>(&text)
                    .map_err(|e| anyhow::anyhow!("{}: {}", path.display(), e.message()))?
            }
            None => ConfigFile::default(),
        };
        // relative stopword paths in a config file are relative to that file
        let file_stopwords = file.stopwords.as_ref().map(|p| match &args.config {
            Some(cfg) if p.is_relative() => cfg.parent().unwrap_or(Path::new("")).join(p),
            _ => p.clone(),
        });

        let defaults = PipelineSettings::default();
        let mut tokenizer = TokenizerSettings::default();
        if let Some(path) = args.stopwords.as_ref().or(file_stopwords.as_ref()) {
            tokenizer.stopwords = load_stopwords(path)?;
        }
        tokenizer.min_len = args
            .min_token_len
            .or(file.min_token_len)
            .unwrap_or(tokenizer.min_len);

        let seed = args.seed.or(file.seed);
        let config = Self {
            pipeline: PipelineSettings {
                tokenizer,
                min_df: args.min_df.or(file.min_df).unwrap_or(defaults.min_df),
                k_topics: args.k_topics.or(file.k_topics).unwrap_or(defaults.k_topics),
                alpha: args.alpha.or(file.alpha).or(defaults.alpha),
                beta: args.beta.or(file.beta).unwrap_or(defaults.beta),
                lda_iterations: args
                    .lda_iters
                    .or(file.lda_iters)
                    .unwrap_or(defaults.lda_iterations),
                infer_iterations: args
                    .infer_iters
                    .or(file.infer_iters)
                    .unwrap_or(defaults.infer_iterations),
                svm_c: args.svm_c.or(file.svm_c).unwrap_or(defaults.svm_c),
                svm_epochs: args
                    .svm_epochs
                    .or(file.svm_epochs)
                    .unwrap_or(defaults.svm_epochs),
            },
            folds: args.folds.or(file.folds).unwrap_or(DEFAULT_FOLDS),
            seed: seed.unwrap_or(DEFAULT_SEED),
            seed_explicit: seed.is_some(),
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> anyhow::Result<()> {
        let p = &self.pipeline;
        self.pipeline.lda_params(self.seed).validate()?;
        let positive = |name: &str, v: f64| -> anyhow::Result<()> {
            if !(v > 0.0 && v.is_finite()) {
                bail!("{name} must be positive and finite, got {v}");
            }
            Ok(())
        };
        positive("svm-c", p.svm_c)?;
        for (name, v) in [
            ("infer-iters", p.infer_iterations),
            ("svm-epochs", p.svm_epochs),
            ("min-df", p.min_df),
            ("min-token-len", p.tokenizer.min_len),
        ] {
            if v == 0 {
                bail!("{name} must be at least 1");
            }
        }
        if self.folds < 2 {
            bail!("folds must be at least 2, got {}", self.folds);
        }
        Ok(())
    }
}

/// Runs one parsed command line against the given standard streams.
pub fn run(
    cli: Cli,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> anyhow::Result<()> {
    let config = RunConfig::resolve(&cli.settings)?;
    match cli.command {
        Command::Ingest { corpus } => commands::ingest(&corpus, &config, stdout),
        Command::Train(a) => commands::train(&a, &config, stdout),
        Command::Evaluate(a) => commands::evaluate(&a, &config, stdout),
        Command::ScoreYears(a) => commands::score_years(&a, &config, stdout),
        Command::Trends(a) => commands::trends(&a, &config, stdout),
        Command::Synth(a) => commands::synth(&a, &config, stdout),
        Command::Predict(a) => commands::predict(&a, &config, stdin, stdout, stderr),
    }
}

/// Entry point for the binary: parses `args`, runs, and returns the exit
/// code. Failures print one `error: ...` line on standard error.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help / --version
            print!("{e}");
            return 0;
        }
        Err(e) => {
            let rendered = e.render().to_string();
            let first = rendered
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("invalid arguments");
            let msg = first.strip_prefix("error: ").unwrap_or(first);
            eprintln!("error: {msg}");
            return 2;
        }
    };
    let (stdin, stdout, stderr) = (io::stdin(), io::stdout(), io::stderr());
    let result = run(
        cli,
        &mut stdin.lock(),
        &mut stdout.lock(),
        &mut stderr.lock(),
    );
    match result {
        Ok(()) => 0,
        Err(e) if is_broken_pipe(&e) => 0,
        Err(e) => {
            eprintln!("error: {}", one_line(&e));
            1
        }
    }
}

/// The reader of our output went away (e.g. `| head`); not a failure.
fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain()
        .filter_map(|c| c.downcast_ref::<io::Error>())
        .any(|io| io.kind() == io::ErrorKind::BrokenPipe)
}

/// The error chain joined by `: `, skipping causes whose text the previous
/// message already includes.
fn one_line(e: &anyhow::Error) -> String {
    let mut msg = String::new();
    let mut prev = String::new();
    for cause in e.chain() {
        let text = cause.to_string();
        if !prev.contains(&text) {
            if !msg.is_empty() {
                msg.push_str(": ");
            }
            msg.push_str(&text);
        }
        prev = text;
    }
    msg.replace('\n', " ")
}
