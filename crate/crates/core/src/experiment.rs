//! Experiment configuration, the batch sampling protocol, and result
//! persistence.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::active::{self, Budget, LogBase, Strategy};
use crate::classify::{
    fit_kstar, fit_perceptron, perceptron_points, predict_one_feature, predict_two_feature, reciprocal_override,
    PerceptronConfig, Prediction,
};
use crate::error::{Error, Result};
use crate::eval::{aggregate, percent, Confusion, MetricSummary, RunMetrics};
use crate::features::{complexity, estimate_features, pfc_surrogate, Feature, TrainMask};
use crate::graph::{Sign, SignedDigraph};
use crate::synth::{self, BoundReport, LabelingModel};
use crate::wcc::largest_wcc;
use crate::{par, seed};

pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BatchAlgorithm {
    BlcT,
    BlcU,
    BlcTu,
    Perceptron,
}

/// Batch classifier or active strategy, written `blc-tu`, `alclog-t`, ...
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Algorithm {
    Batch(BatchAlgorithm),
    Active(Strategy),
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algorithm::Batch(BatchAlgorithm::BlcT) => f.write_str("blc-t"),
            Algorithm::Batch(BatchAlgorithm::BlcU) => f.write_str("blc-u"),
            Algorithm::Batch(BatchAlgorithm::BlcTu) => f.write_str("blc-tu"),
            Algorithm::Batch(BatchAlgorithm::Perceptron) => f.write_str("perceptron"),
            Algorithm::Active(s) => s.fmt(f),
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "blc-t" => Algorithm::Batch(BatchAlgorithm::BlcT),
            "blc-u" => Algorithm::Batch(BatchAlgorithm::BlcU),
            "blc-tu" => Algorithm::Batch(BatchAlgorithm::BlcTu),
            "perceptron" => Algorithm::Batch(BatchAlgorithm::Perceptron),
            _ if s.starts_with("alc") => Algorithm::Active(s.parse()?),
            _ => return Err(Error::param("algorithm", format!("unknown algorithm {s:?}"))),
        })
    }
}

impl TryFrom<String> for Algorithm {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Algorithm> for String {
    fn from(a: Algorithm) -> String {
        a.to_string()
    }
}

fn default_reps() -> usize {
    12
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Label written into result records; defaults to the graph file stem.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dataset: Option<String>,
    pub graph: PathBuf,
    pub algorithm: Algorithm,
    /// Training fractions (batch only).
    #[serde(default)]
    pub train_fractions: Vec<f64>,
    #[serde(default = "default_reps")]
    pub reps: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_tie")]
    pub tie_label: Sign,
    #[serde(default)]
    pub reciprocal: bool,
    /// Restrict to the largest weakly connected component. Defaults to on
    /// for active strategies and off for batch classifiers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wcc: Option<bool>,
    #[serde(default)]
    pub log_base: LogBase,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(graph: impl Into<PathBuf>, algorithm: Algorithm) -> Self {
        ExperimentConfig {
            dataset: None,
            graph: graph.into(),
            algorithm,
            train_fractions: Vec::new(),
            reps: default_reps(),
            seed: 0,
            tie_label: Sign::Pos,
            reciprocal: false,
            wcc: None,
            log_base: LogBase::Natural,
            out: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::param("config", e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&fs::read_to_string(path)?)
    }

    /// Fills defaults that depend on other fields and checks every field.
    pub fn resolve(mut self) -> Result<Self> {
        let is_active = matches!(self.algorithm, Algorithm::Active(_));
        self.wcc.get_or_insert(is_active);
        if self.dataset.is_none() {
            self.dataset = Some(
                self.graph
                    .file_stem()
                    .map(|s| s.to_string_lossy().split('.').next().unwrap_or("").to_string())
                    .unwrap_or_default(),
            );
        }
        if self.reps == 0 {
            return Err(Error::param("reps", "must be at least 1"));
        }
        if is_active {
            if !self.train_fractions.is_empty() {
                return Err(Error::param("train_fractions", "not used by active strategies"));
            }
        } else {
            if self.train_fractions.is_empty() {
                return Err(Error::param("train_fractions", "at least one fraction is required"));
            }
            if let Some(f) = self.train_fractions.iter().find(|f| !(**f > 0.0 && **f < 1.0)) {
                return Err(Error::param("train_fractions", format!("{f} is outside (0, 1)")));
            }
        }
        Ok(self)
    }

    fn use_wcc(&self) -> bool {
        self.wcc.unwrap_or(matches!(self.algorithm, Algorithm::Active(_)))
    }
}

fn default_tie() -> Sign {
    Sign::Pos
}

/// Marks exactly `round(fraction * |E|)` edges, chosen by a seeded shuffle,
/// as training edges.
pub fn sample_train_mask<R: Rng + ?Sized>(g: &SignedDigraph, fraction: f64, rng: &mut R) -> Result<TrainMask> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::param("train_fractions", format!("{fraction} is outside (0, 1)")));
    }
    let m = g.edge_count();
    let k = (fraction * m as f64).round() as usize;
    if k == 0 || k == m {
        return Err(Error::param(
            "train_fractions",
            format!("{fraction} of {m} edges leaves an empty training or test set"),
        ));
    }
    let mut ids: Vec<usize> = (0..m).collect();
    ids.shuffle(rng);
    Ok(TrainMask::from_train_edges(m, &ids[..k]))
}

/// One batch repetition: features from the training edges, fit, predict the
/// test edges, then the optional reciprocal override. Returns the prediction
/// and the time spent fitting and predicting.
pub fn run_batch(
    g: &SignedDigraph,
    algo: BatchAlgorithm,
    mask: &TrainMask,
    tie: Sign,
    reciprocal: bool,
    rep_seed: u64,
) -> Result<(Prediction, f64)> {
    let start = Instant::now();
    let feat = estimate_features(g, mask)?;
    let train = mask.train_edges();
    let test = mask.test_edges();
    let pred = match algo {
        BatchAlgorithm::BlcT => predict_one_feature(g, &feat, &test, Feature::Trollness, tie),
        BatchAlgorithm::BlcU => predict_one_feature(g, &feat, &test, Feature::Unpleasantness, tie),
        BatchAlgorithm::BlcTu => {
            let sep = fit_kstar(g, &feat, &train, tie)?;
            predict_two_feature(g, &feat, &sep, &test)
        }
        BatchAlgorithm::Perceptron => {
            let cfg = PerceptronConfig {
                seed: seed::derive(rep_seed, &[1]),
                ..Default::default()
            };
            let model = fit_perceptron(&perceptron_points(g, &feat, &train), &cfg)?;
            model.predict(g, &feat, &test, tie)
        }
    };
    let pred = if reciprocal { reciprocal_override(g, mask, pred) } else { pred };
    Ok((pred, start.elapsed().as_secs_f64() * 1e3))
}

/// Per-repetition metrics as written to result files (percentages).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepRecord {
    pub seed: u64,
    pub fraction: f64,
    pub accuracy: f64,
    pub mcc: f64,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub nodes: usize,
    pub edges: usize,
    /// Share of the input graph's edges kept by the WCC restriction.
    pub wcc_coverage: Option<f64>,
}

/// Result of one (algorithm, fraction) cell. `accuracy`, `mcc` and
/// `fraction` are percentages with two decimals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub dataset: String,
    pub algorithm: String,
    pub tool_version: String,
    pub params: ExperimentConfig,
    pub graph: GraphSummary,
    /// Requested training fraction; absent for active strategies.
    pub train_fraction: Option<f64>,
    pub reps: Vec<RepRecord>,
    pub mean: MetricSummary,
    pub std: MetricSummary,
    pub n: usize,
    pub single_run: bool,
}

fn to_percent(m: &MetricSummary) -> MetricSummary {
    MetricSummary {
        accuracy: percent(m.accuracy),
        mcc: percent(m.mcc),
        fraction: percent(m.fraction),
        wall_ms: m.wall_ms,
    }
}

fn record(cfg: &ExperimentConfig, graph: GraphSummary, train_fraction: Option<f64>, runs: &[RunMetrics]) -> Result<ResultRecord> {
    let agg = aggregate(runs)?;
    Ok(ResultRecord {
        dataset: cfg.dataset.clone().unwrap_or_default(),
        algorithm: format!("{}{}", cfg.algorithm, if cfg.reciprocal { "*" } else { "" }),
        tool_version: TOOL_VERSION.to_string(),
        params: cfg.clone(),
        graph,
        train_fraction,
        reps: runs
            .iter()
            .map(|r| RepRecord {
                seed: r.seed,
                fraction: percent(r.fraction),
                accuracy: percent(r.accuracy),
                mcc: percent(r.mcc),
                wall_ms: r.wall_ms,
            })
            .collect(),
        mean: to_percent(&agg.mean),
        std: to_percent(&agg.std),
        n: agg.n,
        single_run: agg.single_run,
    })
}

fn metrics(seed: u64, fraction: f64, c: &Confusion, wall_ms: f64) -> RunMetrics {
    RunMetrics {
        seed,
        fraction,
        accuracy: c.accuracy(),
        mcc: c.mcc(),
        wall_ms,
    }
}

/// Runs every (fraction, rep) cell of `cfg` on an already loaded graph.
/// Returns one record per fraction (one record for active strategies).
pub fn run_on_graph(cfg: &ExperimentConfig, input: &SignedDigraph) -> Result<Vec<ResultRecord>> {
    let view;
    let (g, coverage) = if cfg.use_wcc() {
        view = largest_wcc(input)?;
        (&view.graph, Some(view.coverage))
    } else {
        (input, None)
    };
    let summary = GraphSummary {
        nodes: g.node_count(),
        edges: g.edge_count(),
        wcc_coverage: coverage,
    };
    let reps = cfg.reps;
    match cfg.algorithm {
        Algorithm::Batch(algo) => {
            let fractions = &cfg.train_fractions;
            let cells = par::map_range(fractions.len() * reps, |cell| -> Result<RunMetrics> {
                let (fi, rep) = (cell / reps, cell % reps);
                let rep_seed = seed::derive(cfg.seed, &[fi as u64, rep as u64]);
                let mask = sample_train_mask(g, fractions[fi], &mut seed::rng(rep_seed, &[0]))?;
                let (pred, ms) = run_batch(g, algo, &mask, cfg.tie_label, cfg.reciprocal, rep_seed)?;
                let c = Confusion::of_prediction(g, &pred)?;
                let frac = mask.train_count() as f64 / g.edge_count() as f64;
                Ok(metrics(rep_seed, frac, &c, ms))
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
            cells
                .chunks(reps)
                .zip(fractions)
                .map(|(runs, &f)| record(cfg, summary.clone(), Some(f), runs))
                .collect()
        }
        Algorithm::Active(strategy) => {
            let runs = par::map_range(reps, |rep| -> Result<RunMetrics> {
                let rep_seed = seed::derive(cfg.seed, &[0, rep as u64]);
                let plan = active::select(g, strategy, cfg.log_base, rep_seed);
                let start = Instant::now();
                let out = active::run_active(g, &plan, strategy.features.default_rule(), cfg.tie_label)?;
                let c = if cfg.reciprocal {
                    let pred = reciprocal_override(g, &plan.mask(), out.prediction);
                    Confusion::of_prediction(g, &pred)?
                } else {
                    out.confusion
                };
                let ms = start.elapsed().as_secs_f64() * 1e3;
                Ok(metrics(rep_seed, out.queried_fraction, &c, ms))
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
            Ok(vec![record(cfg, summary, None, &runs)?])
        }
    }
}

/// Loads the configured graph and runs the experiment. Writes the result
/// file when `cfg.out` is set.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRecord>> {
    let cfg = cfg.clone().resolve()?;
    let g = SignedDigraph::load(&cfg.graph)?;
    let records = run_on_graph(&cfg, &g)?;
    if let Some(out) = &cfg.out {
        write_results(out, &records)?;
    }
    Ok(records)
}

#[derive(Serialize)]
struct CsvRow<'a> {
    dataset: &'a str,
    algorithm: &'a str,
    train_fraction: Option<f64>,
    rep: usize,
    seed: u64,
    fraction: f64,
    accuracy: f64,
    mcc: f64,
    wall_ms: f64,
}

/// JSON text of the records: a single object for one record, an array
/// otherwise.
pub fn results_json(records: &[ResultRecord]) -> Result<String> {
    let text = match records {
        [one] => serde_json::to_string_pretty(one)?,
        many => serde_json::to_string_pretty(many)?,
    };
    Ok(text + "\n")
}

pub fn results_csv(records: &[ResultRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        for (i, rep) in r.reps.iter().enumerate() {
            w.serialize(CsvRow {
                dataset: &r.dataset,
                algorithm: &r.algorithm,
                train_fraction: r.train_fraction,
                rep: i,
                seed: rep.seed,
                fraction: rep.fraction,
                accuracy: rep.accuracy,
                mcc: rep.mcc,
                wall_ms: rep.wall_ms,
            })
            .map_err(|e| Error::Io(std::io::Error::other(e)))?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Writes `text` to `path` through a temporary file and a rename.
pub fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp"));
    fs::write(&tmp, text)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Writes CSV when `path` ends in `.csv`, JSON otherwise.
pub fn write_results(path: &Path, records: &[ResultRecord]) -> Result<()> {
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let text = if is_csv { results_csv(records)? } else { results_json(records)? };
    write_atomic(path, &text)
}

/// Dataset statistics printed by `stats`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    #[serde(rename = "V")]
    pub nodes: usize,
    #[serde(rename = "E")]
    pub edges: usize,
    #[serde(rename = "pos_frac")]
    pub positive_fraction: f64,
    #[serde(rename = "psi_in_frac")]
    pub psi_in_fraction: f64,
    #[serde(rename = "psi_out_frac")]
    pub psi_out_fraction: f64,
    pub d_bar: f64,
    pub psi_bar_0: Option<f64>,
    pub pfc_quartiles: [f64; 3],
    pub wcc_nodes: usize,
    pub wcc_edges: usize,
    pub wcc_coverage: f64,
}

pub fn graph_stats(g: &SignedDigraph) -> Result<GraphStats> {
    let c = complexity(g);
    let w = largest_wcc(g)?;
    Ok(GraphStats {
        nodes: g.node_count(),
        edges: g.edge_count(),
        positive_fraction: g.positive_fraction(),
        psi_in_fraction: c.psi_in_fraction(),
        psi_out_fraction: c.psi_out_fraction(),
        d_bar: c.d_bar,
        psi_bar_0: c.psi_bar_0,
        pfc_quartiles: pfc_surrogate(g).quartiles,
        wcc_nodes: w.graph.node_count(),
        wcc_edges: w.graph.edge_count(),
        wcc_coverage: w.coverage,
    })
}

/// Labeling used by `verify`: the graph's own labels, a consistent labeling
/// with a random troll fraction, that labeling with random flips, or a
/// uniform `K`-negative labeling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ModelSpec {
    Given,
    Consistent { troll_fraction: f64 },
    PFlip { troll_fraction: f64, p: f64 },
    Yk { k: usize },
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelSpec::Given => f.write_str("given"),
            ModelSpec::Consistent { troll_fraction } => write!(f, "consistent:{troll_fraction}"),
            ModelSpec::PFlip { troll_fraction, p } => write!(f, "pflip:{troll_fraction},{p}"),
            ModelSpec::Yk { k } => write!(f, "yk:{k}"),
        }
    }
}

impl FromStr for ModelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::param("model", format!("expected given|consistent:F|pflip:F,P|yk:K, got {s:?}"));
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
        let (kind, args) = s.split_once(':').unwrap_or((s, ""));
        Ok(match kind {
            "given" if args.is_empty() => ModelSpec::Given,
            "consistent" => ModelSpec::Consistent { troll_fraction: num(args)? },
            "pflip" => {
                let (f, p) = args.split_once(',').ok_or_else(bad)?;
                ModelSpec::PFlip {
                    troll_fraction: num(f)?,
                    p: num(p)?,
                }
            }
            "yk" => ModelSpec::Yk {
                k: args.trim().parse().map_err(|_| bad())?,
            },
            _ => return Err(bad()),
        })
    }
}

impl TryFrom<String> for ModelSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ModelSpec> for String {
    fn from(m: ModelSpec) -> String {
        m.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub theorem: u8,
    /// Edge-list file; ignored when `er` is set.
    pub graph: Option<PathBuf>,
    /// Erdős–Rényi `(n, p)` test graph.
    pub er: Option<(usize, f64)>,
    pub model: ModelSpec,
    pub trials: usize,
    pub seed: u64,
    /// Algorithm checked against the lower bound.
    pub algorithm: Budget,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyRecord {
    pub tool_version: String,
    pub params: VerifyConfig,
    pub graph: GraphSummary,
    pub report: BoundReport,
}

/// Applies a labeling model to `g`, drawing randomness from `seed`.
pub fn apply_model(g: &SignedDigraph, model: ModelSpec, seed: u64) -> Result<SignedDigraph> {
    let consistent = |frac: f64| -> Result<Vec<Sign>> {
        if !(0.0..=1.0).contains(&frac) {
            return Err(Error::param("model", format!("troll fraction {frac} outside [0, 1]")));
        }
        let trolls = synth::random_trolls(g.node_count(), frac, seed::derive(seed, &[0]));
        synth::generate_labels(g, &LabelingModel::Consistent { trolls }, 0)
    };
    let labels = match model {
        ModelSpec::Given => return Ok(g.clone()),
        ModelSpec::Consistent { troll_fraction } => consistent(troll_fraction)?,
        ModelSpec::PFlip { troll_fraction, p } => {
            let base = consistent(troll_fraction)?;
            synth::generate_labels(g, &LabelingModel::PFlip { base, p }, seed::derive(seed, &[1]))?
        }
        ModelSpec::Yk { k } => synth::generate_labels(g, &LabelingModel::UniformYk { k }, seed::derive(seed, &[2]))?,
    };
    g.relabeled(labels)
}

pub fn run_verify(cfg: &VerifyConfig) -> Result<VerifyRecord> {
    let g = match (cfg.er, &cfg.graph) {
        (Some((n, p)), _) => synth::erdos_renyi(n, p, seed::derive(cfg.seed, &[10]))?,
        (None, Some(path)) => SignedDigraph::load(path)?,
        (None, None) => return Err(Error::param("graph", "either a graph file or an ER spec is required")),
    };
    let trial_seed = seed::derive(cfg.seed, &[13]);
    let report = match cfg.theorem {
        1 => {
            let ModelSpec::Yk { k } = cfg.model else {
                return Err(Error::param("model", "the lower bound needs a yk:K model"));
            };
            synth::estimate_lower_bound(&g, k, cfg.trials, trial_seed, cfg.algorithm)?
        }
        2 | 3 => {
            let lg = apply_model(&g, cfg.model, seed::derive(cfg.seed, &[11]))?;
            if cfg.theorem == 2 {
                synth::verify_alcone(&lg, cfg.trials, trial_seed)?
            } else {
                synth::verify_alclog(&lg, cfg.trials, trial_seed)?
            }
        }
        t => return Err(Error::param("theorem", format!("expected 1, 2 or 3, got {t}"))),
    };
    Ok(VerifyRecord {
        tool_version: TOOL_VERSION.to_string(),
        params: cfg.clone(),
        graph: GraphSummary {
            nodes: g.node_count(),
            edges: g.edge_count(),
            wcc_coverage: None,
        },
        report,
    })
}
