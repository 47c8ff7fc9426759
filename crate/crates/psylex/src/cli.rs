//! The `psylex` command line.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use psylex_core::corpus::{agreement_report, attach_external_scores, Corpus, Level};
use psylex_core::metrics::{
    cross_validate_ridge, score_dialog, train_ridge, EmotionLexicon, MetricTable, Resources,
    ScoreConfig, ScoredCorpus,
};
use psylex_core::report::{
    build_heatmap, build_regression_table, build_system_profiles, system_raw_means, RegressionTableSpec,
};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::emit::{self, AgreementFile, CvReport, LevelAgreement};
use crate::error::{Error, Result};
use crate::format::format_float;
use crate::io;

#[derive(Debug, Parser)]
#[command(name = "psylex", version, about = "Psychologically grounded dialog metrics and evaluation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score a corpus; writes turn- and dialog-level metric tables.
    Score(CommonArgs),
    /// Krippendorff's alpha per judgement dimension and level.
    Agreement(CommonArgs),
    /// Correlation heatmaps and T / P / P+T regression tables.
    Evaluate(EvaluateArgs),
    /// Per-system metric profiles, min–max normalized across systems.
    Compare(EvaluateArgs),
    /// Fit a ridge trait model with k-fold cross-validation.
    TrainTrait(TrainArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSONL corpus, one dialog per line.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory (created if needed).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Configuration override, `dotted.key=value`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// External metric scores CSV (overrides `evaluate.scores`).
    #[arg(long)]
    pub scores: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Long-format feature CSV `row_id,feature,value`.
    #[arg(long)]
    pub features: Option<PathBuf>,
    /// Label CSV `row_id,value`.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub folds: Option<usize>,
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: Command) -> Result<()> {
    match command {
        Command::Score(a) => cmd_score(&a),
        Command::Agreement(a) => cmd_agreement(&a),
        Command::Evaluate(a) => cmd_evaluate(&a),
        Command::Compare(a) => cmd_compare(&a),
        Command::TrainTrait(a) => cmd_train_trait(&a),
    }
}

struct Session {
    config: RunConfig,
    out: PathBuf,
}

impl Session {
    fn open(args: &CommonArgs) -> Result<Session> {
        let config = RunConfig::load(args.config.as_deref(), &args.set)?;
        let out = args
            .out
            .clone()
            .or_else(|| config.output_dir.clone())
            .unwrap_or_else(|| PathBuf::from("."));
        std::fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
        Ok(Session { config, out })
    }

    fn write(&self, name: &str, contents: &str) -> Result<PathBuf> {
        let path = self.out.join(name);
        emit::write_artifact(&path, contents)?;
        println!("wrote {}", path.display());
        Ok(path)
    }
}

fn corpus_path(args: &CommonArgs) -> Result<&Path> {
    args.corpus
        .as_deref()
        .ok_or_else(|| Error::Config("--corpus is required".into()))
}

fn load_corpus(args: &CommonArgs) -> Result<Corpus> {
    io::load_corpus(corpus_path(args)?)
}

fn resource<T>(what: &'static str, path: &Option<PathBuf>, load: impl Fn(&Path) -> Result<T>) -> Result<Option<T>> {
    path.as_deref()
        .map(|p| {
            load(p).map_err(|e| Error::Resource {
                what,
                source: Box::new(e),
            })
        })
        .transpose()
}

fn load_resources(config: &RunConfig) -> Result<Resources> {
    let r = &config.resources;
    let emotion = resource("emotion lexicon", &r.emotion_lexicon, io::load_weighted_lexicon)?
        .map(EmotionLexicon::new)
        .transpose()?;
    Ok(Resources {
        emotion,
        function_words: resource("function-word dictionary", &r.function_words, io::load_category_dictionary)?,
        topics: resource("topic model", &r.topics, io::load_weighted_lexicon)?,
        agreeableness: resource("agreeableness model", &r.agreeableness_model, io::load_trait_model)?,
        empathy: resource("empathy model", &r.empathy_model, io::load_trait_model)?,
    })
}

/// Worker count from `PSYLEX_THREADS`; unset or 0 lets rayon decide.
fn thread_pool() -> Result<rayon::ThreadPool> {
    let threads = match std::env::var("PSYLEX_THREADS") {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::Config(format!("PSYLEX_THREADS must be a non-negative integer, got `{v}`")))?,
        _ => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
}

/// Scores dialogs in parallel; rows come back in corpus order.
pub fn score_parallel(corpus: &Corpus, resources: &Resources, config: &ScoreConfig) -> Result<ScoredCorpus> {
    config.validate(resources)?;
    let parts = thread_pool()?.install(|| {
        corpus
            .dialogs()
            .par_iter()
            .map(|d| score_dialog(d, resources, config))
            .collect::<psylex_core::Result<Vec<_>>>()
    })?;
    Ok(ScoredCorpus::from_parts(parts))
}

fn score_from(session: &Session, corpus: &Corpus) -> Result<(ScoreConfig, ScoredCorpus)> {
    let config = session.config.score_config()?;
    let resources = load_resources(&session.config)?;
    let scored = score_parallel(corpus, &resources, &config)?;
    Ok((config, scored))
}

fn print_table_summary(table: &MetricTable) {
    println!("{} rows: {}", table.level.as_str(), table.len());
    for (reason, count) in table.degenerate_counts() {
        println!("  missing ({}): {count}", reason.as_str());
    }
}

pub fn cmd_score(args: &CommonArgs) -> Result<()> {
    let session = Session::open(args)?;
    let corpus = load_corpus(args)?;
    let (config, scored) = score_from(&session, &corpus)?;
    session.write("turn_metrics.csv", &emit::metric_table_csv(&scored.turn))?;
    session.write("dialog_metrics.csv", &emit::metric_table_csv(&scored.dialog))?;
    println!(
        "corpus {}: {} dialogs, {} turns ({} with empty text)",
        corpus.corpus_id,
        corpus.dialogs().len(),
        corpus.turn_count(),
        corpus.empty_text_turns().len()
    );
    print_table_summary(&scored.turn);
    print_table_summary(&scored.dialog);
    println!(
        "emotional_entropy ceiling: {} {}",
        format_float(config.entropy_base.ceiling()),
        config.entropy_base.as_str()
    );
    Ok(())
}

pub fn cmd_agreement(args: &CommonArgs) -> Result<()> {
    let session = Session::open(args)?;
    let difference = session.config.difference()?;
    let corpus = load_corpus(args)?;
    let mut levels = Vec::new();
    for level in [Level::Turn, Level::Dialog] {
        match agreement_report(&corpus, level, difference) {
            Ok(report) => levels.push(LevelAgreement::from(&report)),
            Err(psylex_core::Error::NoAnnotations) => {}
            Err(e) => return Err(e.into()),
        }
    }
    if levels.is_empty() {
        return Err(psylex_core::Error::NoAnnotations.into());
    }
    for l in &levels {
        println!(
            "{} alpha ({}): mean {}",
            l.level,
            difference.as_str(),
            l.mean.map(format_float).unwrap_or_else(|| "missing".into())
        );
        for (dim, a) in &l.alphas {
            println!("  {dim}: {}", a.map(format_float).unwrap_or_else(|| "missing".into()));
        }
    }
    let file = AgreementFile {
        difference: difference.as_str().into(),
        levels,
    };
    session.write("agreement.json", &emit::agreement_json(&file))?;
    Ok(())
}

fn scores_path<'a>(args: &'a EvaluateArgs, session: &'a Session) -> Option<&'a Path> {
    args.scores.as_deref().or(session.config.evaluate.scores.as_deref())
}

/// External metric tables for both levels.
fn external_tables(path: &Path, corpus: &Corpus) -> Result<(MetricTable, MetricTable)> {
    let rows = io::load_external_scores(path)?;
    Ok(attach_external_scores(corpus, &rows)?)
}

fn merged(psych: &MetricTable, external: &MetricTable) -> Result<MetricTable> {
    let mut all = psych.clone();
    all.extend(external.clone());
    if let Some((unit, metric)) = all.find_duplicate() {
        return Err(Error::Data(format!(
            "metric `{metric}` appears twice for {unit}; external metric names must differ from psychological ones"
        )));
    }
    Ok(all)
}

/// Names selected explicitly must exist at some level; each level uses the
/// ones it has.
fn select(
    explicit: &Option<Vec<String>>,
    tables: [&MetricTable; 2],
    level_table: &MetricTable,
) -> Result<Vec<String>> {
    match explicit {
        None => Ok(level_table.metric_names()),
        Some(names) => {
            for n in names {
                if !tables.iter().any(|t| t.has_metric(n)) {
                    return Err(psylex_core::Error::UnknownMetric(n.clone()).into());
                }
            }
            Ok(names.iter().filter(|n| level_table.has_metric(n)).cloned().collect())
        }
    }
}

fn file_safe(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> Result<()> {
    let session = Session::open(&args.common)?;
    let correction = session.config.correction()?;
    let scores = scores_path(args, &session)
        .ok_or_else(|| Error::Config("no external scores file; pass --scores or set evaluate.scores".into()))?
        .to_path_buf();
    if !scores.is_file() {
        return Err(Error::Config(format!("scores file {} does not exist", scores.display())));
    }
    let corpus = load_corpus(&args.common)?;
    let (_, scored) = score_from(&session, &corpus)?;
    let (ext_turn, ext_dialog) = external_tables(&scores, &corpus)?;
    let eval = &session.config.evaluate;

    let mut written = 0usize;
    for (level, psych, ext) in [
        (Level::Turn, &scored.turn, &ext_turn),
        (Level::Dialog, &scored.dialog, &ext_dialog),
    ] {
        let all = merged(psych, ext)?;
        match build_heatmap(&all) {
            Ok(h) => {
                for x in &h.excluded {
                    eprintln!("warning: {} heatmap excludes `{}`: {}", level.as_str(), x.metric, x.reason);
                }
                session.write(&format!("heatmap_{}.json", level.as_str()), &emit::heatmap_json(&h))?;
                written += 1;
            }
            Err(e) => eprintln!("warning: no {} heatmap: {e}", level.as_str()),
        }

        let traditional = select(&eval.traditional, [&ext_turn, &ext_dialog], ext)?;
        let psychological = select(&eval.psychological, [&scored.turn, &scored.dialog], psych)?;
        if traditional.is_empty() || psychological.is_empty() {
            eprintln!(
                "warning: no {} regression tables: {} traditional and {} psychological metrics",
                level.as_str(),
                traditional.len(),
                psychological.len()
            );
            continue;
        }
        let judgements = match level {
            Level::Turn => eval.judgements.turn.clone(),
            Level::Dialog => eval.judgements.dialog.clone(),
        }
        .unwrap_or_else(|| corpus.dimensions(level));
        for judgement in judgements {
            let consensus = corpus.consensus(level, &judgement);
            if consensus.is_empty() {
                eprintln!("warning: no {} ratings for `{judgement}`", level.as_str());
                continue;
            }
            let spec = RegressionTableSpec {
                level,
                judgement: judgement.clone(),
                traditional: traditional.clone(),
                psychological: psychological.clone(),
                all_psych: eval.all_psych,
            };
            let rows = build_regression_table(&all, &consensus, &spec, correction, eval.comparisons)?;
            for r in rows.iter().filter(|r| r.note.is_some()) {
                eprintln!(
                    "warning: {}/{} {} vs {}: {}",
                    level.as_str(),
                    judgement,
                    r.traditional,
                    r.psych_model,
                    r.note.as_deref().unwrap_or_default()
                );
            }
            let name = format!("regression_{}_{}.csv", level.as_str(), file_safe(&judgement));
            session.write(&name, &emit::regression_csv(&rows))?;
            written += 1;
        }
    }
    if written == 0 {
        return Err(Error::Data("nothing to evaluate: no heatmap or regression table could be built".into()));
    }
    Ok(())
}

pub fn cmd_compare(args: &EvaluateArgs) -> Result<()> {
    let session = Session::open(&args.common)?;
    let corpus = load_corpus(&args.common)?;
    let (_, scored) = score_from(&session, &corpus)?;
    let external = match scores_path(args, &session) {
        Some(p) => Some(external_tables(p, &corpus)?),
        None => None,
    };
    let mut tables = vec![&scored.turn, &scored.dialog];
    if let Some((t, d)) = &external {
        tables.push(t);
        tables.push(d);
    }
    match build_system_profiles(&tables, &corpus) {
        Ok(profiles) => {
            session.write("profiles.csv", &emit::profiles_csv(&profiles))?;
            println!("{} systems, {} metrics", profiles.len(), profiles[0].metrics.len());
            Ok(())
        }
        Err(e @ psylex_core::Error::TooFewSystems(_)) => {
            session.write("profiles.csv", &emit::profiles_csv(&system_raw_means(&tables, &corpus)))?;
            Err(e.into())
        }
        Err(e) => Err(e.into()),
    }
}

pub fn cmd_train_trait(args: &TrainArgs) -> Result<()> {
    let session = Session::open(&args.common)?;
    let train = &session.config.train;
    let space = session.config.feature_space()?;
    let lambda = args.lambda.unwrap_or(train.lambda);
    let folds = args.folds.unwrap_or(train.folds);
    let (Some(features), Some(labels)) = (&args.features, &args.labels) else {
        return Err(Error::Config("train-trait needs --features and --labels".into()));
    };
    if lambda < 0.0 || !lambda.is_finite() {
        return Err(Error::Config(format!("lambda must be a finite value >= 0, got {lambda}")));
    }
    let data = io::load_training_data(features, labels, space)?;
    let mut model = train_ridge(&data.features, &data.labels, lambda)?;
    model.trait_name = train.trait_name.clone();
    let cv = cross_validate_ridge(&data.features, &data.labels, lambda, folds)?;
    session.write("trait_model.json", &io::trait_model_json(&model))?;
    let report = CvReport {
        trait_name: model.trait_name.clone(),
        feature_space: space.as_str().into(),
        lambda,
        folds,
        n: data.labels.len(),
        r: cv.r,
    };
    session.write("cv_report.json", &emit::cv_report_json(&report))?;
    println!(
        "{}: {} rows, {} features, {folds}-fold r = {}",
        model.trait_name,
        data.labels.len(),
        model.weights.len(),
        cv.r.map(format_float).unwrap_or_else(|| "missing".into())
    );
    Ok(())
}
