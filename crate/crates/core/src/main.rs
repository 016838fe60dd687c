use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use chrono::Local;
use clap::{Args, Parser, Subcommand};

use quakesense::classify::{self, ClassifierModel};
use quakesense::corpus::{parse_minute, EventWindow, GOLDEN_RESCUE_HOURS};
use quakesense::pipeline::{
    self, AssessmentConfig, ClassifierBackend, TrainOptions,
};
use quakesense::textprep::{apply_cleaning, CleaningConfig, GeoLexicon, StopWordList};
use quakesense::{Error, Result};

#[derive(Parser)]
#[command(
    name = "quakesense",
    version,
    about = "Rapid earthquake impact assessment from microblog streams"
)]
struct Cli {
    /// Seed for every randomized step (train/validation splits).
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load a JSONL corpus, deduplicate it, and optionally keep only the
    /// event window.
    Ingest {
        #[arg(long)]
        corpus: PathBuf,
        /// Event time "YYYY-MM-DD HH:MM"; enables window filtering.
        #[arg(long)]
        event_time: Option<String>,
        #[arg(long, default_value_t = GOLDEN_RESCUE_HOURS)]
        hours: u32,
        /// Write the surviving posts as JSONL.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Apply a cleaning variant (o, s, sg, sgt) to every post text.
    Clean {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value = "sgt")]
        mode: String,
        #[arg(long)]
        stopwords: Option<PathBuf>,
        #[arg(long)]
        geo: Option<PathBuf>,
        #[arg(long)]
        output: PathBuf,
    },
    /// Train the category classifier (or the sentiment scorer) from a
    /// labeled TSV and persist it as JSON.
    Train {
        /// classifier: "text<TAB>category"; sentiment: "text<TAB>positive|negative".
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "classifier", value_parser = ["classifier", "sentiment"])]
        task: String,
        #[arg(long, default_value_t = 0.8)]
        ratio: f64,
        #[arg(long, default_value_t = classify::DEFAULT_NGRAM)]
        ngram: usize,
        #[arg(long, default_value_t = classify::DEFAULT_ALPHA)]
        alpha: f64,
        #[arg(long)]
        model_out: PathBuf,
        /// Write the validation report as JSON.
        #[arg(long)]
        report_out: Option<PathBuf>,
    },
    /// Predict categories for a corpus with a trained model, writing an
    /// id/category TSV.
    Classify {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        model: PathBuf,
        /// Cleaning applied to classifier input (o, s, sg, sgt).
        #[arg(long, default_value = "o")]
        mode: String,
        #[arg(long)]
        stopwords: Option<PathBuf>,
        #[arg(long)]
        geo: Option<PathBuf>,
        #[arg(long)]
        output: PathBuf,
    },
    /// Score predictions against gold labels (both id<TAB>category TSV).
    Eval {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        /// Restrict the macro average to categories present in the gold set.
        #[arg(long)]
        gold_categories_only: bool,
        /// Write the report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Run the full assessment pipeline and write report.json plus the
    /// trend, sentiment, and intensity CSV series.
    Assess(AssessArgs),
}

#[derive(Args)]
struct AssessArgs {
    /// TOML file with any of the assess settings; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Event time "YYYY-MM-DD HH:MM".
    #[arg(long)]
    event_time: Option<String>,
    #[arg(long)]
    hours: Option<u32>,
    /// Cleaning for classifier input (o, s, sg, sgt).
    #[arg(long)]
    cleaning: Option<String>,
    #[arg(long)]
    stopwords: Option<PathBuf>,
    #[arg(long)]
    geo: Option<PathBuf>,
    /// Intensity lexicon JSON; the builtin table when omitted.
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[arg(long)]
    sentiment_model: Option<PathBuf>,
    /// Builtin backend: path to a trained classifier model.
    #[arg(long, conflicts_with = "predictions")]
    model: Option<PathBuf>,
    /// External backend: path to an id/category predictions TSV.
    #[arg(long)]
    predictions: Option<PathBuf>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Omit the emission timestamp so reports compare byte-for-byte.
    #[arg(long)]
    no_timestamp: bool,
}

/// Usage problems exit 2; data problems exit 1.
enum CliError {
    Usage(String),
    Data(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Data(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Data(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load_cleaning_inputs(
    mode: &str,
    stopwords: Option<&PathBuf>,
    geo: Option<&PathBuf>,
) -> Result<(CleaningConfig, StopWordList, GeoLexicon)> {
    let config: CleaningConfig = mode.parse()?;
    let stops = match stopwords {
        Some(path) => StopWordList::from_file(path)?,
        None => StopWordList::builtin_zh(),
    };
    let geo = match geo {
        Some(path) => GeoLexicon::from_file(path)?,
        None if config.remove_geo => {
            return Err(Error::InvalidArgument(
                "geo cleaning is enabled but no --geo lexicon was given".into(),
            ))
        }
        None => GeoLexicon::default(),
    };
    Ok((config, stops, geo))
}

fn write_posts_jsonl(path: &PathBuf, posts: &[quakesense::corpus::Microblog]) -> Result<()> {
    let mut out = String::new();
    for post in posts {
        out.push_str(&serde_json::to_string(post).expect("post serializes"));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path.clone(), e))
}

fn run(cli: Cli) -> std::result::Result<(), CliError> {
    match cli.command {
        Command::Ingest {
            corpus,
            event_time,
            hours,
            output,
        } => {
            let window = match event_time {
                Some(raw) => Some(EventWindow::new(parse_minute(&raw)?, hours)?),
                None => None,
            };
            let (posts, summary, skipped) = pipeline::ingest(&corpus, window.as_ref())?;
            for s in &skipped {
                eprintln!("{}:{}: skipped: {}", corpus.display(), s.line, s.message);
            }
            println!("parsed:      {}", summary.total_lines_parsed);
            println!("skipped:     {}", summary.skipped_lines);
            println!("after dedup: {}", summary.after_dedup);
            if let Some(n) = summary.in_window {
                println!("in window:   {n}");
            }
            if let Some(path) = output {
                write_posts_jsonl(&path, &posts)?;
                println!("wrote {}", path.display());
            }
            Ok(())
        }

        Command::Clean {
            corpus,
            mode,
            stopwords,
            geo,
            output,
        } => {
            let (config, stops, geo) =
                load_cleaning_inputs(&mode, stopwords.as_ref(), geo.as_ref())?;
            let load = quakesense::corpus::load_corpus(&corpus)?;
            for s in &load.skipped {
                eprintln!("{}:{}: skipped: {}", corpus.display(), s.line, s.message);
            }
            let cleaned: Vec<_> = load
                .posts
                .into_iter()
                .map(|mut p| {
                    p.text = apply_cleaning(&p.text, config, &stops, &geo);
                    p
                })
                .collect();
            write_posts_jsonl(&output, &cleaned)?;
            println!("cleaned {} posts ({config}) → {}", cleaned.len(), output.display());
            Ok(())
        }

        Command::Train {
            data,
            task,
            ratio,
            ngram,
            alpha,
            model_out,
            report_out,
        } => {
            let opts = TrainOptions {
                ratio,
                seed: cli.seed,
                ngram,
                alpha,
            };
            match task.as_str() {
                "classifier" => {
                    let report = pipeline::train_classifier_command(&data, &model_out, opts)?;
                    print!("{}", report.render_table());
                    println!("model written to {}", model_out.display());
                    if let Some(path) = report_out {
                        fs::write(&path, report.to_json()).map_err(|e| Error::io(path, e))?;
                    }
                }
                "sentiment" => {
                    let summary = pipeline::train_sentiment_command(&data, &model_out, opts)?;
                    println!(
                        "trained on {} docs, validation accuracy {:.4} over {} docs",
                        summary.n_train, summary.accuracy, summary.n_val
                    );
                    println!("model written to {}", model_out.display());
                    if let Some(path) = report_out {
                        let json =
                            serde_json::to_string_pretty(&summary).expect("summary serializes");
                        fs::write(&path, json).map_err(|e| Error::io(path, e))?;
                    }
                }
                other => {
                    return Err(CliError::Usage(format!("unknown train task {other:?}")));
                }
            }
            Ok(())
        }

        Command::Classify {
            corpus,
            model,
            mode,
            stopwords,
            geo,
            output,
        } => {
            let (config, stops, geo) =
                load_cleaning_inputs(&mode, stopwords.as_ref(), geo.as_ref())?;
            let model = ClassifierModel::load(&model)?;
            let load = quakesense::corpus::load_corpus(&corpus)?;
            for s in &load.skipped {
                eprintln!("{}:{}: skipped: {}", corpus.display(), s.line, s.message);
            }
            // One prediction per id: crawl duplicates are collapsed first.
            let posts = quakesense::corpus::deduplicate(load.posts);
            let cleaned: Vec<(String, String)> = posts
                .iter()
                .map(|p| {
                    (
                        p.id.clone(),
                        apply_cleaning(&p.text, config, &stops, &geo),
                    )
                })
                .collect();
            let records = classify::classify_posts(
                &model,
                cleaned.iter().map(|(id, text)| (id.as_str(), text.as_str())),
            );
            classify::write_predictions(&output, &records)?;
            println!("classified {} posts → {}", records.len(), output.display());
            Ok(())
        }

        Command::Eval {
            gold,
            pred,
            gold_categories_only,
            json,
        } => {
            let report = pipeline::evaluate_files(&gold, &pred, gold_categories_only)?;
            print!("{}", report.render_table());
            if let Some(path) = json {
                fs::write(&path, report.to_json()).map_err(|e| Error::io(path, e))?;
            }
            Ok(())
        }

        Command::Assess(args) => {
            let (corpus, config, no_timestamp) = resolve_assess(args)?;
            let mut report = pipeline::assess(&corpus, &config)?;
            if !no_timestamp {
                report.generated_at = Some(Local::now().format("%Y-%m-%d %H:%M").to_string());
            }
            report.write_files(&config.output_dir)?;
            println!(
                "assessed {} in-window posts ({} ingested) → {}",
                report.total_in_window,
                report.total_ingested,
                config.output_dir.display()
            );
            for (category, count) in &report.category_counts {
                println!("  {category:<20} {count}");
            }
            Ok(())
        }
    }
}

/// Merges the optional TOML config with command-line flags (flags win) and
/// validates that exactly one classifier backend is configured.
fn resolve_assess(
    args: AssessArgs,
) -> std::result::Result<(PathBuf, AssessmentConfig, bool), CliError> {
    let file = match &args.config {
        Some(path) => pipeline::load_assess_config(path)?,
        None => Default::default(),
    };

    let corpus = args
        .corpus
        .or(file.corpus)
        .ok_or_else(|| CliError::Usage("--corpus is required".into()))?;
    let event_time_raw = args
        .event_time
        .or(file.event_time)
        .ok_or_else(|| CliError::Usage("--event-time is required".into()))?;
    let event_time = parse_minute(&event_time_raw)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let duration_hours = args
        .hours
        .or(file.duration_hours)
        .unwrap_or(GOLDEN_RESCUE_HOURS);
    let cleaning = match args.cleaning.or(file.cleaning) {
        Some(raw) => raw
            .parse::<CleaningConfig>()
            .map_err(|e| CliError::Usage(e.to_string()))?,
        None => CleaningConfig::O,
    };
    let sentiment_model = args
        .sentiment_model
        .or(file.sentiment_model)
        .ok_or_else(|| CliError::Usage("--sentiment-model is required".into()))?;
    let output_dir = args
        .output_dir
        .or(file.output_dir)
        .ok_or_else(|| CliError::Usage("--output-dir is required".into()))?;

    let model = args.model.or(file.model);
    let predictions = args.predictions.or(file.predictions);
    let backend = match (model, predictions) {
        (Some(model), None) => ClassifierBackend::Builtin { model },
        (None, Some(predictions)) => ClassifierBackend::External { predictions },
        (None, None) => {
            return Err(CliError::Usage(
                "choose a classifier backend: --model or --predictions".into(),
            ))
        }
        (Some(_), Some(_)) => {
            return Err(CliError::Usage(
                "--model and --predictions are mutually exclusive".into(),
            ))
        }
    };

    let config = AssessmentConfig {
        event_time,
        duration_hours,
        cleaning,
        stopwords: args.stopwords.or(file.stopwords),
        geo: args.geo.or(file.geo),
        backend,
        lexicon: args.lexicon.or(file.lexicon),
        sentiment_model,
        output_dir,
    };
    Ok((corpus, config, args.no_timestamp))
}
