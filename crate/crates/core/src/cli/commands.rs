use std::fs::{self, File};
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

use super::{
    svg, EvaluateArgs, PredictArgs, RunConfig, ScoreArgs, ScoreMode, SynthArgs, TrainArgs,
    TrendArgs,
};
use crate::chronometrics::{
    cross_validate, rank_years, read_predictions_csv, write_confusion_csv, write_predictions_csv,
    write_year_scores_csv, FoldPredictor, IdentityPredictor, PredictionRecord,
};
use crate::corpus::{ingest_jsonl, tokenize, write_jsonl, Corpus};
use crate::pipeline::{document_seed, fit, TrainedModel};
use crate::synthgen::{SynthSpec, SyntheticTruth};
use crate::topics::{infer_theta, top_words, topic_trends, write_trends_csv, TopicDistribution};

pub const MODEL_FILE: &str = "model.txt";
pub const CONFUSION_FILE: &str = "confusion.csv";
pub const REPORT_FILE: &str = "report.toml";
pub const TRENDS_FILE: &str = "trends.csv";
pub const TOP_WORDS_FILE: &str = "top_words.csv";
pub const CORPUS_FILE: &str = "corpus.jsonl";
pub const TRUTH_FILE: &str = "truth.toml";

fn predictions_file(label: &str) -> String {
    format!("predictions_{label}.csv")
}

fn year_scores_file(label: &str) -> String {
    format!("year_scores_{label}.csv")
}

/// Creates `dir/name` (and `dir`), returning a buffered writer.
fn create(dir: &Path, name: &str) -> anyhow::Result<(PathBuf, BufWriter<File>)> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    let file = File::create(&path).with_context(|| format!("{}", path.display()))?;
    Ok((path, BufWriter::new(file)))
}

fn write_file(dir: &Path, name: &str, contents: &str) -> anyhow::Result<PathBuf> {
    let (path, mut w) = create(dir, name)?;
    w.write_all(contents.as_bytes())
        .and_then(|()| w.flush())
        .with_context(|| format!("{}", path.display()))?;
    Ok(path)
}

fn write_csv(
    dir: &Path,
    name: &str,
    body: impl FnOnce(&mut BufWriter<File>) -> csv::Result<()>,
) -> anyhow::Result<PathBuf> {
    let (path, mut w) = create(dir, name)?;
    body(&mut w).with_context(|| format!("{}", path.display()))?;
    w.flush().with_context(|| format!("{}", path.display()))?;
    Ok(path)
}

pub fn ingest(path: &Path, config: &RunConfig, out: &mut dyn Write) -> anyhow::Result<()> {
    let corpus = ingest_jsonl(path)?;
    let empty = corpus
        .documents()
        .iter()
        .filter(|d| tokenize(&d.text, &config.pipeline.tokenizer).is_empty())
        .count();
    writeln!(out, "documents: {}", corpus.len())?;
    writeln!(out, "years: {}-{}", corpus.year_begin(), corpus.year_end())?;
    writeln!(out, "present years: {}", corpus.present_years().len())?;
    writeln!(out, "empty after tokenization: {empty}")?;
    writeln!(out, "year,documents")?;
    for (year, n) in corpus.year_counts() {
        writeln!(out, "{year},{n}")?;
    }
    Ok(())
}

pub fn train(args: &TrainArgs, config: &RunConfig, out: &mut dyn Write) -> anyhow::Result<()> {
    let corpus = ingest_jsonl(&args.corpus)?;
    let fitted = fit(&corpus, &config.pipeline, config.seed)?;
    let path = args
        .model
        .clone()
        .unwrap_or_else(|| args.out.join(MODEL_FILE));
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    fitted.model.save(&path)?;

    writeln!(out, "model: {}", path.display())?;
    writeln!(out, "vocabulary: {} terms", fitted.model.vocab.len())?;
    writeln!(
        out,
        "documents: {} ({} without vocabulary terms)",
        corpus.len(),
        fitted.empty_docs.len()
    )?;
    writeln!(out, "classes: {}", fitted.model.classifier.classes().len())?;
    if let Some((it, ll)) = fitted.log_likelihood.last() {
        writeln!(out, "log-likelihood at iteration {it}: {ll}")?;
    }
    Ok(())
}

#[derive(Serialize)]
struct EvaluationFile {
    predictor: &'static str,
    documents: usize,
    folds: usize,
    seed: u64,
    mean_mae: f64,
    fold_mae: Vec<f64>,
    /// Share of confusion mass inside the planted epochs, with `--truth`.
    #[serde(skip_serializing_if = "Option::is_none")]
    within_epoch_mass: Option<f64>,
    files: ReportFiles,
}

/// CSV paths relative to the report's directory.
#[derive(Serialize)]
struct ReportFiles {
    confusion: String,
    predictions: String,
}

fn predictor(identity: bool, config: &RunConfig) -> (&'static str, &dyn FoldPredictor) {
    if identity {
        ("identity-oracle", &IdentityPredictor)
    } else {
        ("pipeline", &config.pipeline)
    }
}

pub fn evaluate(
    args: &EvaluateArgs,
    config: &RunConfig,
    out: &mut dyn Write,
) -> anyhow::Result<()> {
    let corpus = ingest_jsonl(&args.corpus)?;
    let truth = args
        .truth
        .as_ref()
        .map(|p| -> anyhow::Result<SyntheticTruth> {
            let text = fs::read_to_string(p).with_context(|| format!("{}", p.display()))?;
            SyntheticTruth::from_toml(&text).with_context(|| format!("{}", p.display()))
        })
        .transpose()?;

    let (name, predictor) = predictor(args.identity_oracle, config);
    let report = cross_validate(&corpus, predictor, config.folds, config.seed)?;
    let predictions = predictions_file(ScoreMode::Cv.label());
    write_csv(&args.out, CONFUSION_FILE, |w| {
        write_confusion_csv(&report.confusion, w)
    })?;
    write_csv(&args.out, &predictions, |w| {
        write_predictions_csv(&report.records, w)
    })?;

    let within = truth.map(|t| {
        let blocks: Vec<(i32, i32)> = t.epochs.iter().map(|e| (e.start, e.end)).collect();
        report.confusion.block_mass(&blocks)
    });
    let file = EvaluationFile {
        predictor: name,
        documents: corpus.len(),
        folds: config.folds,
        seed: config.seed,
        mean_mae: report.mean_mae,
        fold_mae: report.fold_mae.clone(),
        within_epoch_mass: within,
        files: ReportFiles {
            confusion: CONFUSION_FILE.into(),
            predictions,
        },
    };
    let path = write_file(&args.out, REPORT_FILE, &toml::to_string(&file)?)?;

    writeln!(out, "mean MAE: {}", report.mean_mae)?;
    for (f, mae) in report.fold_mae.iter().enumerate() {
        writeln!(out, "fold {f}: {mae}")?;
    }
    if let Some(m) = within {
        writeln!(out, "within-epoch confusion mass: {m}")?;
    }
    writeln!(out, "report: {}", path.display())?;
    Ok(())
}

fn identity_records(corpus: &Corpus) -> Vec<PredictionRecord> {
    corpus
        .documents()
        .iter()
        .map(|d| PredictionRecord::new(d.id.clone(), d.year, d.year))
        .collect()
}

pub fn score_years(
    args: &ScoreArgs,
    config: &RunConfig,
    out: &mut dyn Write,
) -> anyhow::Result<()> {
    let corpus = ingest_jsonl(&args.corpus)?;
    let label = args.mode.label();
    let records = if let Some(path) = &args.predictions {
        let file = File::open(path).with_context(|| format!("{}", path.display()))?;
        read_predictions_csv(file).with_context(|| format!("{}", path.display()))?
    } else {
        let records = match (args.identity_oracle, args.mode) {
            (true, _) => identity_records(&corpus),
            (false, ScoreMode::Cv) => {
                cross_validate(&corpus, &config.pipeline, config.folds, config.seed)?.records
            }
            (false, ScoreMode::Resub) => {
                fit(&corpus, &config.pipeline, config.seed)?.resubstitution_records(&corpus)?
            }
        };
        write_csv(&args.out, &predictions_file(label), |w| {
            write_predictions_csv(&records, w)
        })?;
        records
    };

    let ranked = rank_years(&records, &corpus)?;
    let path = write_csv(&args.out, &year_scores_file(label), |w| {
        write_year_scores_csv(&ranked, w)
    })?;
    if args.svg {
        let mut bars: Vec<(i32, f64)> = ranked.iter().map(|s| (s.year, s.score)).collect();
        bars.sort_by_key(|&(y, _)| y);
        let chart = svg::bar_chart(&format!("Year scores ({label})"), &bars);
        write_file(&args.out, &format!("year_scores_{label}.svg"), &chart)?;
    }

    writeln!(out, "scores: {}", path.display())?;
    writeln!(out, "rank,year,score")?;
    for (i, s) in ranked.iter().take(10).enumerate() {
        writeln!(out, "{},{},{}", i + 1, s.year, s.score)?;
    }
    Ok(())
}

pub fn trends(args: &TrendArgs, config: &RunConfig, out: &mut dyn Write) -> anyhow::Result<()> {
    let corpus = ingest_jsonl(&args.corpus)?;
    let (model, thetas) = match &args.model {
        Some(path) => {
            let model = TrainedModel::load(path)?;
            let thetas = corpus
                .documents()
                .iter()
                .enumerate()
                .map(|(i, d)| {
                    let bow = model.vectorize_text(&d.text);
                    let seed = document_seed(config.seed, i);
                    Ok(
                        infer_theta(&model.topics, &bow, config.pipeline.infer_iterations, seed)?
                            .theta,
                    )
                })
                .collect::<anyhow::Result<Vec<TopicDistribution>>>()?;
            (model, thetas)
        }
        None => {
            let fitted = fit(&corpus, &config.pipeline, config.seed)?;
            (fitted.model, fitted.thetas)
        }
    };

    let series = topic_trends(&thetas, &corpus)?;
    let path = write_csv(&args.out, TRENDS_FILE, |w| write_trends_csv(&series, w))?;
    write_csv(&args.out, TOP_WORDS_FILE, |w| {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(["topic", "rank", "term", "probability"])?;
        for t in 0..model.topics.k() {
            let words =
                top_words(&model.topics, &model.vocab, t, args.top_words).expect("topic in range");
            for (rank, (term, p)) in words.iter().enumerate() {
                csv.write_record([
                    t.to_string(),
                    (rank + 1).to_string(),
                    term.clone(),
                    p.to_string(),
                ])?;
            }
        }
        csv.flush()?;
        Ok(())
    })?;
    if args.svg {
        let lines: Vec<(String, Vec<(i32, f64)>)> = series
            .iter()
            .map(|s| {
                (
                    format!("topic {}", s.topic),
                    s.by_year.iter().map(|(&y, &m)| (y, m)).collect(),
                )
            })
            .collect();
        write_file(
            &args.out,
            "trends.svg",
            &svg::line_chart("Topic share by year", &lines),
        )?;
    }
    writeln!(out, "trends: {}", path.display())?;
    for t in 0..model.topics.k() {
        let words = top_words(&model.topics, &model.vocab, t, 5)?;
        let words: Vec<&str> = words.iter().map(|(w, _)| w.as_str()).collect();
        writeln!(out, "topic {t}: {}", words.join(" "))?;
    }
    Ok(())
}

pub fn synth(args: &SynthArgs, config: &RunConfig, out: &mut dyn Write) -> anyhow::Result<()> {
    let text =
        fs::read_to_string(&args.spec).with_context(|| format!("{}", args.spec.display()))?;
    let spec = SynthSpec::from_toml(&text).with_context(|| format!("{}", args.spec.display()))?;
    let (corpus, truth) = spec.generate(config.seed_explicit.then_some(config.seed))?;

    let (path, mut w) = create(&args.out, CORPUS_FILE)?;
    write_jsonl(&corpus, &mut w)
        .and_then(|()| w.flush())
        .with_context(|| format!("{}", path.display()))?;
    write_file(&args.out, TRUTH_FILE, &truth.to_toml())?;

    writeln!(
        out,
        "corpus: {} ({} documents)",
        path.display(),
        corpus.len()
    )?;
    let boundaries: Vec<String> = truth.boundaries.iter().map(i32::to_string).collect();
    writeln!(out, "boundaries: {}", boundaries.join(" "))?;
    Ok(())
}

pub fn predict(
    args: &PredictArgs,
    config: &RunConfig,
    stdin: &mut dyn Read,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> anyhow::Result<()> {
    let model = TrainedModel::load(&args.model)?;
    let mut text = String::new();
    stdin
        .read_to_string(&mut text)
        .context("reading standard input")?;
    let p = model.predict_text(
        &text,
        config.pipeline.infer_iterations,
        document_seed(config.seed, 0),
    )?;
    if p.empty {
        writeln!(
            err,
            "warning: no input word is in the model vocabulary; using uniform topic proportions"
        )?;
    }
    writeln!(out, "year {}", p.year)?;
    let theta: Vec<String> = p.theta.as_slice().iter().map(f64::to_string).collect();
    writeln!(out, "theta {}", theta.join(" "))?;
    for (year, score) in &p.scores {
        writeln!(out, "score {year} {score}")?;
    }
    Ok(())
}
