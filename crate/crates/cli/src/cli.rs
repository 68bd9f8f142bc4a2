//! Argument parsing and subcommand drivers.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use metric_margin_core::ann::NnMode;
use metric_margin_core::bayes::{self, DistributionSpec, Domain, RiskReport};
use metric_margin_core::bounds::{
    crossovers, delta_combined_with, BoundParams, BoundValue, FatConstant, Penalty, Winner,
};
use metric_margin_core::classifier::LipschitzClassifier;
use metric_margin_core::metric::{
    diameter, estimate_ddim, normalize_sample, DoublingEstimate, MetricKind, MetricOracle, Sample,
};
use metric_margin_core::srm::{srm_train, CandidateRow, QUnits, SearchMode, SrmOptions};
use rayon::prelude::*;
use serde::Serialize;

use crate::data::{read_dataset, Dataset, Expect, Format, LabelTable, Payload};
use crate::error::{CliError, Result};
use crate::model::Model;
use crate::REPORT_SCHEMA;

#[derive(Debug, Parser)]
#[command(
    name = "metric-margin",
    version,
    about = "Margin-regularized nearest-neighbor classification in metric spaces"
)]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "METRIC_MARGIN_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a classifier by structural risk minimization over L.
    Train(TrainArgs),
    /// Label query points with a trained model.
    Predict(PredictArgs),
    /// Sweep the generalization bounds over parameter grids (CSV).
    Bounds(BoundsArgs),
    /// Monte-Carlo nearest-neighbor risk against twice the Bayes risk (CSV).
    SimulateBayes(SimulateArgs),
    /// Estimate the doubling dimension of a dataset (JSON).
    EstimateDim(EstimateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    L1,
    L2,
    Linf,
    Levenshtein,
}

impl MetricArg {
    fn kind(self) -> MetricKind {
        match self {
            MetricArg::L1 => MetricKind::L1,
            MetricArg::L2 => MetricKind::L2,
            MetricArg::Linf => MetricKind::LInf,
            MetricArg::Levenshtein => MetricKind::Levenshtein,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FatConstantArg {
    #[value(name = "16")]
    Printed,
    #[value(name = "64")]
    EntropyConsistent,
}

impl From<FatConstantArg> for FatConstant {
    fn from(a: FatConstantArg) -> Self {
        match a {
            FatConstantArg::Printed => FatConstant::Printed,
            FatConstantArg::EntropyConsistent => FatConstant::EntropyConsistent,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SearchArg {
    Sweep,
    Binary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PenaltyArg {
    Combined,
    Rad,
    Fat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UnitsArg {
    Risk,
    Count,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Dataset file (CSV or JSONL).
    pub input: PathBuf,
    /// File format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct NnArgs {
    /// Use the (1+eta)-approximate nearest-neighbor index.
    #[arg(long, conflicts_with = "exact_nn")]
    pub eta: Option<f64>,
    /// Use exact nearest-neighbor search.
    #[arg(long)]
    pub exact_nn: bool,
}

impl NnArgs {
    fn mode(&self) -> Result<Option<NnMode>> {
        match (self.eta, self.exact_nn) {
            (Some(eta), _) if !(eta >= 0.0 && eta.is_finite()) => {
                Err(CliError::validation(format!("--eta {eta} is not a nonnegative real")))
            }
            (Some(eta), _) => Ok(Some(NnMode::Approximate { eta })),
            (None, true) => Ok(Some(NnMode::Exact)),
            (None, false) => Ok(None),
        }
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Distance; defaults to levenshtein for string data and l2 otherwise.
    #[arg(long, value_enum)]
    pub metric: Option<MetricArg>,
    /// Confidence parameter of the bounds.
    #[arg(long, default_value_t = 0.01)]
    pub delta: f64,
    /// Doubling dimension; estimated from the data when omitted.
    #[arg(long)]
    pub ddim: Option<f64>,
    #[command(flatten)]
    pub nn: NnArgs,
    #[arg(long, value_enum, default_value = "sweep")]
    pub search: SearchArg,
    /// Complexity term added to the empirical error.
    #[arg(long, value_enum, default_value = "combined")]
    pub penalty: PenaltyArg,
    /// Constant in front of L^D in the fat-shattering bound.
    #[arg(long, value_enum, default_value = "16")]
    pub fat_constant: FatConstantArg,
    /// Empirical error as a fraction of n (risk) or as a point count.
    #[arg(long, value_enum, default_value = "risk")]
    pub units: UnitsArg,
    /// Model output path.
    #[arg(long)]
    pub out: PathBuf,
    /// Training report path (JSON); stdout when omitted.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Model written by `train`.
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub nn: NnArgs,
    /// Add the truncated margin of the prediction as a second column.
    #[arg(long)]
    pub with_margin: bool,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Lipschitz grid: comma-separated values or `log:LO:HI:COUNT`.
    #[arg(long = "lipschitz", short = 'L', default_value = "log:0.001:1:31")]
    pub lipschitz: String,
    /// Sample sizes.
    #[arg(long, short = 'n', default_value = "1000000")]
    pub n: String,
    /// Doubling dimensions.
    #[arg(long, short = 'D', default_value = "2")]
    pub ddim: String,
    /// Label counts.
    #[arg(long, short = 'k', default_value = "10")]
    pub k: String,
    /// Confidence parameters.
    #[arg(long, default_value = "0.01")]
    pub delta: String,
    #[arg(long, value_enum, default_value = "16")]
    pub fat_constant: FatConstantArg,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DomainArg {
    Interval,
    SquareLinf,
    SquareL2,
}

impl From<DomainArg> for Domain {
    fn from(d: DomainArg) -> Self {
        match d {
            DomainArg::Interval => Domain::UnitInterval,
            DomainArg::SquareLinf => Domain::UnitSquareLInf,
            DomainArg::SquareL2 => Domain::UnitSquareL2,
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value = "interval")]
    pub domain: DomainArg,
    /// Number of labels.
    #[arg(long, short = 'k', default_value_t = 2)]
    pub k: usize,
    /// Lipschitz constant of the posterior (sup norm on the simplex).
    #[arg(long, default_value_t = 1.0)]
    pub l_post: f64,
    /// Training sizes, comma-separated.
    #[arg(long, short = 'n', default_value = "50,200,800,3200")]
    pub n: String,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    /// Fresh test draws per trial.
    #[arg(long, default_value_t = 1000)]
    pub test_points: usize,
    /// Linear pieces of each posterior coordinate function.
    #[arg(long, default_value_t = bayes::DEFAULT_SEGMENTS)]
    pub segments: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum)]
    pub metric: Option<MetricArg>,
    /// Output JSON path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<()> {
    let threads = match cli.threads {
        Some(0) => return Err(CliError::validation("--threads must be positive")),
        Some(t) => t,
        None => 0,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::runtime(format!("cannot start worker pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Train(a) => run_train(&a),
        Command::Predict(a) => run_predict(&a),
        Command::Bounds(a) => run_bounds(&a),
        Command::SimulateBayes(a) => run_simulate(&a),
        Command::EstimateDim(a) => run_estimate_dim(&a),
    })
}

/// Shortest decimal that parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::runtime(format!("cannot write {}: {e}", p.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::runtime(format!("cannot write to stdout: {e}"))),
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn resolve_metric(arg: Option<MetricArg>, data: &DataArgs) -> Result<(MetricKind, Dataset)> {
    let format = data.format.unwrap_or_else(|| Format::from_path(&data.input));
    let payload = match (arg, format) {
        (Some(MetricArg::Levenshtein), _) => Some(Payload::Text),
        (Some(_), _) => Some(Payload::Vector),
        (None, Format::Csv) => Some(Payload::Vector),
        (None, Format::Jsonl) => None,
    };
    let expect = Expect {
        payload,
        dim: None,
        labels_required: true,
    };
    let ds = read_dataset(&data.input, Some(format), expect)?;
    let kind = match (arg, ds.payload()) {
        (Some(m), _) => m.kind(),
        (None, Some(Payload::Text)) => MetricKind::Levenshtein,
        (None, _) => MetricKind::L2,
    };
    Ok((kind, ds))
}

#[derive(Debug, Serialize)]
pub struct ConflictPair {
    pub rows: (u64, u64),
    pub labels: (String, String),
}

#[derive(Debug, Serialize)]
pub struct TrainReport {
    pub schema: u64,
    pub n: usize,
    pub k: usize,
    pub labels: Vec<String>,
    pub metric: MetricOracle,
    pub raw_diameter: f64,
    pub ddim: DoublingEstimate,
    pub delta: f64,
    pub search: SearchMode,
    pub penalty: Penalty,
    pub units: QUnits,
    pub fat_constant: FatConstant,
    pub nn_mode: NnMode,
    pub log_base: &'static str,
    pub candidates_examined: Vec<CandidateRow>,
    pub chosen_lipschitz: f64,
    pub q_value: f64,
    pub cover_size: usize,
    /// Source rows of the removed points.
    pub removed_rows: Vec<u64>,
    pub s1_size: usize,
    /// Cross-label pairs at distance zero; one of each is always removed.
    pub always_conflicting: Vec<ConflictPair>,
    pub bound: BoundValue,
    pub notes: Vec<String>,
}

/// Output of a training run, before anything is written.
pub struct Trained {
    pub model: Model,
    pub report: TrainReport,
    pub classifier: LipschitzClassifier<MetricOracle>,
}

impl Trained {
    pub fn report_json(&self) -> String {
        to_json(&self.report)
    }
}

pub fn train(a: &TrainArgs) -> Result<Trained> {
    if !(a.delta > 0.0 && a.delta < 1.0) {
        return Err(CliError::validation(format!("--delta {} is not in (0, 1)", a.delta)));
    }
    if let Some(d) = a.ddim {
        if !(d >= 0.0 && d.is_finite()) {
            return Err(CliError::validation(format!("--ddim {d} is not a nonnegative real")));
        }
    }
    let nn_mode = a.nn.mode()?.unwrap_or(NnMode::Exact);
    let (kind, ds) = resolve_metric(a.metric, &a.data)?;
    let table = LabelTable::from_names(ds.labels.iter().flatten().map(String::as_str));
    if table.len() < 2 {
        return Err(CliError::validation("training data needs at least two distinct labels"));
    }
    let ys = table.encode(&ds)?;
    let sample = Sample::new(ds.points.clone(), ys)?;
    let raw = MetricOracle::new(kind);
    sample.validate_with(&raw)?;
    let raw_diameter = diameter(sample.points(), &raw);
    let metric = normalize_sample(&sample, &raw)?;
    let ddim = match a.ddim {
        Some(d) => DoublingEstimate::user_supplied(d)?,
        None => estimate_ddim(&sample, &metric)?,
    };
    let opts = SrmOptions {
        delta: a.delta,
        ddim: ddim.ddim,
        search: match a.search {
            SearchArg::Sweep => SearchMode::Sweep,
            SearchArg::Binary => SearchMode::Binary,
        },
        penalty: match a.penalty {
            PenaltyArg::Combined => Penalty::Combined,
            PenaltyArg::Rad => Penalty::Rad,
            PenaltyArg::Fat => Penalty::Fat,
        },
        units: match a.units {
            UnitsArg::Risk => QUnits::Risk,
            UnitsArg::Count => QUnits::Count,
        },
        fat_constant: a.fat_constant.into(),
        nn_mode,
    };
    let result = srm_train(&sample, &metric, &opts)?;

    let mut notes = vec![format!("doubling dimension {}", ddim.describe())];
    if opts.fat_constant == FatConstant::Printed {
        notes.push(
            "fat-shattering term uses (16L)^D; the metric-entropy bound at eps = 1/4 gives (64L)^D (--fat-constant 64)"
                .into(),
        );
    }
    if result.bound.rad_terms.stratification_clamped {
        notes.push("stratification term of Delta_Rad clamped to 0 (log2(2L) <= 1)".into());
    }
    if result.bound.fat_terms.confidence_clamped {
        notes.push("ln(2L/delta) in Delta_fat clamped to 0".into());
    }
    let name = |i: usize| table.name(sample.label(i)).to_string();
    let report = TrainReport {
        schema: REPORT_SCHEMA,
        n: sample.len(),
        k: table.len(),
        labels: table.names().to_vec(),
        metric,
        raw_diameter,
        ddim: ddim.clone(),
        delta: a.delta,
        search: opts.search,
        penalty: opts.penalty,
        units: opts.units,
        fat_constant: opts.fat_constant,
        nn_mode,
        log_base: "natural",
        candidates_examined: result.candidates_examined.clone(),
        chosen_lipschitz: result.lipschitz,
        q_value: result.q_value,
        cover_size: result.cover.size,
        removed_rows: result.cover.cover.iter().map(|&i| ds.lines[i]).collect(),
        s1_size: result.s1.len(),
        always_conflicting: result
            .always_conflicting
            .iter()
            .map(|&(i, j)| ConflictPair {
                rows: (ds.lines[i], ds.lines[j]),
                labels: (name(i), name(j)),
            })
            .collect(),
        bound: result.bound,
        notes,
    };
    let model = Model::from_classifier(&result.classifier, &table, ddim, result.bound);
    Ok(Trained {
        model,
        report,
        classifier: result.classifier,
    })
}

pub fn run_train(a: &TrainArgs) -> Result<()> {
    let t = train(a)?;
    emit(Some(&a.out), &t.model.to_json())?;
    emit(a.report.as_deref(), &t.report_json())
}

pub fn run_predict(a: &PredictArgs) -> Result<()> {
    let model = Model::load(&a.model)?;
    let classifier = model.classifier(a.nn.mode()?)?;
    let first = classifier.points()[0].clone();
    let payload = Payload::of(&first);
    let dim = match &first {
        metric_margin_core::metric::Point::Vector(v) => Some(v.len()),
        _ => None,
    };
    let expect = Expect {
        payload: Some(payload),
        dim,
        labels_required: false,
    };
    let ds = read_dataset(&a.data.input, a.data.format, expect).map_err(|e| match e {
        CliError::Validation(m) => CliError::Validation(format!(
            "{m} (model metric {} expects {} data{})",
            model.metric.kind.name(),
            if payload == Payload::Text { "string" } else { "vector" },
            dim.map_or(String::new(), |d| format!(" of dimension {d}"))
        )),
        other => other,
    })?;
    for (p, &line) in ds.points.iter().zip(&ds.lines) {
        classifier
            .check_query(p)
            .map_err(|e| CliError::validation(format!("row {line}: {e}")))?;
    }
    emit(
        a.out.as_deref(),
        &predictions_csv(&classifier, &model.label_table(), &ds, a.with_margin),
    )
}

/// Prediction CSV: a `label` column, plus `margin` when asked.
pub fn predictions_csv(
    classifier: &LipschitzClassifier<MetricOracle>,
    table: &LabelTable,
    ds: &Dataset,
    with_margin: bool,
) -> String {
    let rows: Vec<String> = ds
        .points
        .par_iter()
        .map(|x| {
            let (y, m) = classifier.predict_with_margin(x);
            let name = csv_cell(table.name(y));
            if with_margin {
                format!("{name},{}\n", fmt_f64(m.value))
            } else {
                format!("{name}\n")
            }
        })
        .collect();
    let mut text = String::from(if with_margin { "label,margin\n" } else { "label\n" });
    for r in rows {
        text.push_str(&r);
    }
    text
}

fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) || s.trim() != s {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Parses `a,b,c` or `log:LO:HI:COUNT` (log-spaced, endpoints included).
pub fn parse_grid(flag: &str, text: &str) -> Result<Vec<f64>> {
    let bad = |m: String| CliError::validation(format!("--{flag}: {m}"));
    if let Some(spec) = text.strip_prefix("log:") {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(bad(format!("`{text}` is not log:LO:HI:COUNT")));
        }
        let lo: f64 = parts[0]
            .trim()
            .parse()
            .map_err(|_| bad(format!("bad low end `{}`", parts[0])))?;
        let hi: f64 = parts[1]
            .trim()
            .parse()
            .map_err(|_| bad(format!("bad high end `{}`", parts[1])))?;
        let count: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| bad(format!("bad count `{}`", parts[2])))?;
        if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
            return Err(bad(format!("need 0 < LO <= HI, got {lo} and {hi}")));
        }
        return match count {
            0 => Err(bad("empty grid".into())),
            1 => Ok(vec![lo]),
            _ => {
                let (a, b) = (lo.ln(), hi.ln());
                Ok((0..count)
                    .map(|i| match i {
                        0 => lo,
                        i if i == count - 1 => hi,
                        i => (a + (b - a) * i as f64 / (count - 1) as f64).exp(),
                    })
                    .collect())
            }
        };
    }
    let values: Vec<f64> = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| bad(format!("`{s}` is not a number"))))
        .collect::<Result<_>>()?;
    if values.is_empty() {
        return Err(bad("empty grid".into()));
    }
    Ok(values)
}

fn parse_counts(flag: &str, text: &str) -> Result<Vec<u64>> {
    let values: Vec<u64> = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| CliError::validation(format!("--{flag}: `{s}` is not a nonnegative integer")))
        })
        .collect::<Result<_>>()?;
    if values.is_empty() {
        return Err(CliError::validation(format!("--{flag}: empty grid")));
    }
    Ok(values)
}

/// Rows of the bounds sweep. Within each `(n, D, k, delta)` series the
/// `crossover` flag marks rows whose winner differs from the previous row.
pub fn bounds_csv(a: &BoundsArgs) -> Result<String> {
    let ls = parse_grid("lipschitz", &a.lipschitz)?;
    let ns = parse_counts("n", &a.n)?;
    let ds = parse_grid("ddim", &a.ddim)?;
    let ks = parse_counts("k", &a.k)?;
    let deltas = parse_grid("delta", &a.delta)?;
    let constant = FatConstant::from(a.fat_constant);
    let mut out = String::from("L,n,D,k,delta,delta_rad,delta_fat,combined,winner,crossover\n");
    for &n in &ns {
        for &d in &ds {
            for &k in &ks {
                for &delta in &deltas {
                    let series = ls
                        .iter()
                        .map(|&l| Ok(delta_combined_with(&BoundParams::new(n, l, d, k, delta)?, constant)))
                        .collect::<Result<Vec<_>>>()?;
                    let marks = crossovers(&series);
                    for (i, v) in series.iter().enumerate() {
                        writeln!(
                            out,
                            "{},{n},{},{k},{},{},{},{},{},{}",
                            fmt_f64(v.params.lipschitz),
                            fmt_f64(d),
                            fmt_f64(delta),
                            fmt_f64(v.delta_rad),
                            fmt_f64(v.delta_fat),
                            fmt_f64(v.combined),
                            match v.winner {
                                Winner::Rad => "rad",
                                Winner::Fat => "fat",
                            },
                            marks.contains(&i)
                        )
                        .expect("writing to a string");
                    }
                }
            }
        }
    }
    Ok(out)
}

pub fn run_bounds(a: &BoundsArgs) -> Result<()> {
    let text = bounds_csv(a)?;
    emit(a.out.as_deref(), &text)
}

pub fn simulate_reports(a: &SimulateArgs) -> Result<(Vec<RiskReport>, Option<String>)> {
    let ns: Vec<usize> = parse_counts("n", &a.n)?.into_iter().map(|n| n as usize).collect();
    if ns.contains(&0) {
        return Err(CliError::validation("--n: sizes must be positive"));
    }
    if a.trials == 0 || a.test_points == 0 || a.segments == 0 {
        return Err(CliError::validation(
            "--trials, --test-points and --segments must be positive",
        ));
    }
    let spec = DistributionSpec {
        domain: a.domain.into(),
        k: a.k,
        l_post: a.l_post,
        seed: a.seed,
    };
    let dist = bayes::make_distribution_with(&spec, a.segments)?;
    let reports = ns
        .iter()
        .map(|&n| {
            let risks = (0..a.trials as u64)
                .into_par_iter()
                .map(|t| bayes::run_trial(&dist, n, a.test_points, a.seed, t))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            Ok(bayes::summarize(&dist, n, a.seed, &risks))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((reports, dist.warning().map(str::to_string)))
}

pub fn run_simulate(a: &SimulateArgs) -> Result<()> {
    let (reports, warning) = simulate_reports(a)?;
    if let Some(w) = warning {
        eprintln!("warning: {w}");
    }
    let mut out = String::from("n,trials,bayes_risk,mean_nn_risk,stderr,bound_rhs,pass\n");
    for r in &reports {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.n,
            r.trials,
            fmt_f64(r.bayes_risk),
            fmt_f64(r.mean_nn_risk),
            fmt_f64(r.mc_stderr),
            fmt_f64(r.bound_rhs),
            r.pass()
        )
        .expect("writing to a string");
    }
    emit(a.out.as_deref(), &out)
}

#[derive(Debug, Serialize)]
struct DimReport {
    n: usize,
    metric: MetricKind,
    diameter: f64,
    estimate: DoublingEstimate,
}

pub fn run_estimate_dim(a: &EstimateArgs) -> Result<()> {
    let (kind, ds) = resolve_metric(a.metric, &a.data)?;
    // labels play no role here
    let sample = Sample::new(ds.points, vec![0; ds.lines.len()])?;
    let m = MetricOracle::new(kind);
    sample.validate_with(&m)?;
    let estimate = estimate_ddim(&sample, &m)?;
    let report = DimReport {
        n: sample.len(),
        metric: kind,
        diameter: diameter(sample.points(), &m),
        estimate,
    };
    emit(a.out.as_deref(), &to_json(&report))
}
