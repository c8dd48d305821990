//! Acceptance checks, one line per criterion.
//!
//! Criteria 1-3 need the canonical benchmark files (`<name>.canonical.txt`,
//! produced by `signlink ingest`) in `$SIGNLINK_DATA_DIR`, or in `data/` at
//! the workspace root. Without them those criteria report SKIP, or FAIL
//! when `SIGNLINK_REQUIRE_DATA=1`.

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use signlink::active::Budget;
use signlink::classify::oracle::{kstar_bruteforce, optimal_threshold_bruteforce};
use signlink::classify::{fit_kstar, predict_one_feature};
use signlink::eval::Confusion;
use signlink::experiment::{graph_stats, run_on_graph, Algorithm, ExperimentConfig, ResultRecord};
use signlink::features::{estimate_features, Feature, TrainMask};
use signlink::ingest::descriptor;
use signlink::synth::{
    erdos_renyi, estimate_lower_bound, generate_labels, random_trolls, verify_alcone, verify_alclog, LabelingModel,
};
use signlink::{Sign, SignedDigraph};

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_instance(r: &mut ChaCha8Rng) -> (SignedDigraph, TrainMask) {
    let n = r.random_range(2..=30u64);
    let m = r.random_range(1..=200usize);
    let p_neg: f64 = r.random();
    let edges: Vec<_> = (0..m)
        .map(|_| (r.random_range(0..n), r.random_range(0..n), if r.random_bool(p_neg) { -1 } else { 1 }))
        .collect();
    let g = SignedDigraph::build(edges).unwrap();
    let p: f64 = r.random_range(0.05..1.0);
    let mut bits: Vec<bool> = (0..g.edge_count()).map(|_| r.random_bool(p)).collect();
    if !bits.iter().any(|&b| b) {
        bits[0] = true;
    }
    (g, TrainMask::new(bits))
}

fn pflip_graph(n: usize, p_edge: f64, trolls: f64, p: f64, seed: u64) -> SignedDigraph {
    let g = erdos_renyi(n, p_edge, seed).unwrap();
    let trolls = random_trolls(n, trolls, seed + 1);
    let base = generate_labels(&g, &LabelingModel::Consistent { trolls }, 0).unwrap();
    let labels = generate_labels(&g, &LabelingModel::PFlip { base, p }, seed + 2).unwrap();
    g.relabeled(labels).unwrap()
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

// ---- datasets ---------------------------------------------------------

fn data_dir() -> PathBuf {
    std::env::var_os("SIGNLINK_DATA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).ancestors().nth(2).unwrap().join("data"))
}

fn dataset(name: &str) -> Option<PathBuf> {
    let p = data_dir().join(format!("{name}.canonical.txt"));
    p.exists().then_some(p)
}

fn missing(names: &[&str]) -> Outcome {
    let msg = format!(
        "dataset(s) {} not found in {} (run `signlink ingest`)",
        names.join(", "),
        data_dir().display()
    );
    if std::env::var("SIGNLINK_REQUIRE_DATA").is_ok_and(|v| v == "1") {
        Outcome::Fail(msg)
    } else {
        Outcome::Skip(msg)
    }
}

fn c1_dataset_stats() -> Outcome {
    let names = ["wikipedia", "slashdot", "epinions"];
    let absent: Vec<&str> = names.iter().copied().filter(|n| dataset(n).is_none()).collect();
    if absent.len() == names.len() {
        return missing(&names);
    }
    let mut ok = true;
    let mut parts = Vec::new();
    for name in names {
        let Some(path) = dataset(name) else {
            parts.push(format!("{name}: missing"));
            ok = false;
            continue;
        };
        let d = descriptor(name).unwrap();
        let start = Instant::now();
        let g = SignedDigraph::load(&path).unwrap();
        let s = graph_stats(&g).unwrap();
        let took = start.elapsed();
        let dv = (s.nodes as f64 - d.expected_nodes as f64).abs() / d.expected_nodes as f64;
        let de = (s.edges as f64 - d.expected_edges as f64).abs() / d.expected_edges as f64;
        let good = dv <= 0.005
            && de <= 0.005
            && (s.positive_fraction - d.expected_positive_fraction).abs() <= 0.001
            && (s.psi_in_fraction - d.expected_psi_in_fraction).abs() <= 0.01
            && (s.psi_out_fraction - d.expected_psi_out_fraction).abs() <= 0.01
            && took < Duration::from_secs(10);
        ok &= good;
        parts.push(format!(
            "{name}: V={} E={} pos={:.4} psi_in={:.3} psi_out={:.3} in {}",
            s.nodes,
            s.edges,
            s.positive_fraction,
            s.psi_in_fraction,
            s.psi_out_fraction,
            secs(took)
        ));
    }
    check(ok, parts.join("; "))
}

fn batch(g: &SignedDigraph, algo: &str, fractions: &[f64], reciprocal: bool) -> Vec<ResultRecord> {
    let mut cfg = ExperimentConfig::new("dataset", algo.parse::<Algorithm>().unwrap());
    cfg.train_fractions = fractions.to_vec();
    cfg.reciprocal = reciprocal;
    run_on_graph(&cfg.resolve().unwrap(), g).unwrap()
}

fn active(g: &SignedDigraph, strategy: &str) -> ResultRecord {
    let cfg = ExperimentConfig::new("dataset", strategy.parse::<Algorithm>().unwrap());
    run_on_graph(&cfg.resolve().unwrap(), g).unwrap().remove(0)
}

fn c2_batch() -> Outcome {
    let (Some(wiki), Some(epi)) = (dataset("wikipedia"), dataset("epinions")) else {
        return missing(&["wikipedia", "epinions"]);
    };
    let mut ok = true;
    let mut parts = Vec::new();

    let start = Instant::now();
    let g = SignedDigraph::load(&wiki).unwrap();
    // (algorithm, accuracy at 15%, 90%; mcc at 15%, 90%)
    for (algo, acc, mcc) in [("blc-t", [82.93, 85.51], [43.45, 51.39]), ("blc-tu", [83.99, 87.16], [49.58, 59.76])] {
        let recs = batch(&g, algo, &[0.15, 0.9], false);
        for (i, r) in recs.iter().enumerate() {
            let good = (r.mean.accuracy - acc[i]).abs() <= 1.0 && (r.mean.mcc - mcc[i]).abs() <= 2.0;
            ok &= good;
            parts.push(format!(
                "wiki {algo}@{}: acc {:.2} (ref {}), mcc {:.2} (ref {})",
                r.train_fraction.unwrap(),
                r.mean.accuracy,
                acc[i],
                r.mean.mcc,
                mcc[i]
            ));
        }
    }
    let took = start.elapsed();
    ok &= took < Duration::from_secs(60);
    parts.push(format!("wikipedia {}", secs(took)));

    let start = Instant::now();
    let g = SignedDigraph::load(&epi).unwrap();
    let r = batch(&g, "blc-tu", &[0.9], true).remove(0);
    let took = start.elapsed();
    ok &= r.mean.accuracy >= 93.0 && took < Duration::from_secs(60);
    parts.push(format!("epinions blc-tu*@0.9: acc {:.2} (need >= 93.0) in {}", r.mean.accuracy, secs(took)));
    check(ok, parts.join("; "))
}

fn c3_active() -> Outcome {
    let (Some(wiki), Some(epi)) = (dataset("wikipedia"), dataset("epinions")) else {
        return missing(&["wikipedia", "epinions"]);
    };
    let g = SignedDigraph::load(&wiki).unwrap();
    let a = active(&g, "alcone-t");
    let g = SignedDigraph::load(&epi).unwrap();
    let b = active(&g, "alclog-tu");
    let ok = (a.mean.accuracy - 79.8).abs() <= 1.5
        && (a.mean.fraction - 2.3).abs() <= 0.5
        && (b.mean.accuracy - 93.8).abs() <= 1.0
        && (b.mean.fraction - 52.5).abs() <= 3.0;
    check(
        ok,
        format!(
            "wiki alcone-t acc {:.2} queried {:.2}%; epinions alclog-tu acc {:.2} queried {:.2}%",
            a.mean.accuracy, a.mean.fraction, b.mean.accuracy, b.mean.fraction
        ),
    )
}

// ---- oracles ----------------------------------------------------------

fn c4_fact_one() -> Outcome {
    let start = Instant::now();
    let mut r = rng(0xFAC7_0001);
    let mut agree = 0;
    for _ in 0..200 {
        let (g, mask) = random_instance(&mut r);
        let feat = estimate_features(&g, &mask).unwrap();
        let train = mask.train_edges();
        let ok = [Feature::Trollness, Feature::Unpleasantness].iter().all(|&which| {
            let (_, best) = optimal_threshold_bruteforce(&g, &feat, &train, which);
            predict_one_feature(&g, &feat, &train, which, Sign::Pos).mistakes(&g) == best
        });
        agree += ok as usize;
    }
    let took = start.elapsed();
    check(agree == 200 && took < Duration::from_secs(5), format!("{agree}/200 match in {}", secs(took)))
}

/// Seconds per fit, the minimum over several timed batches.
fn kstar_fit_time(m: usize) -> f64 {
    let mut r = rng(m as u64);
    let n = (m / 4).max(2) as u64;
    let edges: Vec<_> = (0..m)
        .map(|_| (r.random_range(0..n), r.random_range(0..n), if r.random_bool(0.3) { -1 } else { 1 }))
        .collect();
    let g = SignedDigraph::build(edges).unwrap();
    let bits: Vec<bool> = (0..g.edge_count()).map(|_| r.random_bool(0.9)).collect();
    let mask = TrainMask::new(bits);
    let feat = estimate_features(&g, &mask).unwrap();
    let train = mask.train_edges();
    let iters = (2_000_000 / m).max(3);
    (0..5)
        .map(|_| {
            let start = Instant::now();
            for _ in 0..iters {
                std::hint::black_box(fit_kstar(&g, &feat, &train, Sign::Pos).unwrap());
            }
            start.elapsed().as_secs_f64() / iters as f64 / train.len() as f64
        })
        .fold(f64::INFINITY, f64::min)
}

fn c5_kstar() -> Outcome {
    let mut r = rng(0x4B57_0001);
    let mut agree = 0;
    for _ in 0..200 {
        let (g, mask) = random_instance(&mut r);
        let feat = estimate_features(&g, &mask).unwrap();
        let train = mask.train_edges();
        let (_, best) = kstar_bruteforce(&g, &feat, &train);
        agree += (fit_kstar(&g, &feat, &train, Sign::Pos).unwrap().training_mistakes == best) as usize;
    }
    // per-edge time normalized by log m must stay within 2x across sizes
    let sizes = [1_000usize, 10_000, 100_000];
    let norm: Vec<f64> = sizes.iter().map(|&m| kstar_fit_time(m) / (m as f64).ln()).collect();
    check(
        agree == 200 && norm[2] <= 2.0 * norm[0] && norm[1] <= 2.0 * norm[0] && norm[2] <= 2.0 * norm[1],
        format!(
            "{agree}/200 match; ns per edge per ln m at m=1e3,1e4,1e5: {:.2?}",
            norm.iter().map(|x| x * 1e9).collect::<Vec<_>>()
        ),
    )
}

// ---- Monte Carlo bounds -----------------------------------------------

fn c6_alcone() -> Outcome {
    let start = Instant::now();
    let mut graphs = vec![SignedDigraph::build([(0, 1, -1), (0, 2, 1), (0, 3, 1)]).unwrap()];
    for k in 0..19u64 {
        let n = 50 + 25 * (k as usize % 8);
        graphs.push(pflip_graph(n, 6.0 / n as f64, 0.1 + 0.02 * k as f64, 0.05 + 0.02 * k as f64, 1000 + 10 * k));
    }
    let mut failures = Vec::new();
    let mut exact_single = f64::NAN;
    for (i, g) in graphs.iter().enumerate() {
        let rep = verify_alcone(g, 1000, 77 + i as u64).unwrap();
        if i == 0 {
            exact_single = rep.exact_expectation.unwrap();
        }
        if !(rep.pass && rep.queries_within_cap && rep.max_queries <= g.node_count()) {
            failures.push(i);
        }
    }
    let took = start.elapsed();
    check(
        failures.is_empty() && (exact_single - 4.0 / 3.0).abs() < 1e-12 && took < Duration::from_secs(30),
        format!("20 graphs, failures {failures:?}, single-node exact E[m] = {exact_single:.4}, {}", secs(took)),
    )
}

fn c7_alclog() -> Outcome {
    let mut cases: Vec<(String, SignedDigraph)> = Vec::new();
    for (d, neg) in [(4u64, 1usize), (6, 2), (9, 3), (12, 6)] {
        let edges = (1..=d).map(|j| (0, j, if (j as usize) <= neg { -1 } else { 1 }));
        cases.push((format!("star d={d} neg={neg}"), SignedDigraph::build(edges).unwrap()));
    }
    for k in 0..4u64 {
        cases.push((format!("er #{k}"), pflip_graph(150, 0.06, 0.25, 0.1 + 0.05 * k as f64, 500 + k)));
    }
    let mut bad = Vec::new();
    for (name, g) in &cases {
        let trials = if g.node_count() < 20 { 20_000 } else { 500 };
        let r = verify_alclog(g, trials, 31).unwrap();
        if r.skipped.is_some() || !r.pass || !r.queries_within_cap {
            bad.push(name.clone());
        }
    }
    check(bad.is_empty(), format!("{} fixtures, failing {bad:?}", cases.len()))
}

fn c8_lower_bound() -> Outcome {
    let mut r = rng(0x7B1);
    let mut graphs = Vec::new();
    // random graph with 200 edges
    let edges: Vec<(u64, u64, i64)> = std::iter::from_fn(|| Some((r.random_range(0..40), r.random_range(0..40), 1)))
        .take(230)
        .collect();
    let g = SignedDigraph::build(edges).unwrap();
    let keep: Vec<(u64, u64, i64)> = (0..200).map(|e| (g.raw_id(g.src(e)), g.raw_id(g.dst(e)), 1)).collect();
    graphs.push(SignedDigraph::build(keep).unwrap());
    graphs.push(erdos_renyi(60, 0.05, 3).unwrap());
    graphs.push(SignedDigraph::build((1..=20).map(|j| (0, j, 1))).unwrap());
    let mut bad = Vec::new();
    for (i, g) in graphs.iter().enumerate() {
        let m = g.edge_count();
        for k in [0, m / 4, m / 2] {
            for budget in [Budget::One, Budget::Log] {
                let rep = estimate_lower_bound(g, k, 1000, 5, budget).unwrap();
                if !rep.pass {
                    bad.push(format!("g{i} k={k} {budget:?}"));
                }
            }
        }
    }
    check(bad.is_empty(), format!("{} fixtures x 3 K x 2 algorithms, failing {bad:?}", graphs.len()))
}

fn c9_metrics() -> Outcome {
    let all_right = Confusion::new(3, 2, 0, 0).mcc();
    let symmetric = Confusion::new(7, 7, 7, 7).mcc();
    let c = Confusion::new(50, 30, 10, 10);
    let swapped = Confusion::new(10, 10, 50, 30);
    let derived = c.mcc();
    let ok = all_right == 1.0
        && symmetric == 0.0
        && (swapped.mcc() + derived).abs() < 1e-12
        && (derived - 1400.0 / 2400.0).abs() < 1e-9
        && (derived - 0.58333).abs() < 1e-5
        && Confusion::new(5, 0, 0, 0).mcc() == 0.0;
    check(ok, format!("mcc(50,30,10,10) = {derived:.9}"))
}

// ---- determinism ------------------------------------------------------

fn strip_wall(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.remove("wall_ms");
            map.values_mut().for_each(strip_wall);
        }
        Value::Array(xs) => xs.iter_mut().for_each(strip_wall),
        _ => {}
    }
}

fn run_cli(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_signlink"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(String::from_utf8_lossy(&out.stderr).into_owned());
    }
    let mut v: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    strip_wall(&mut v);
    Ok(serde_json::to_string(&v).unwrap())
}

fn c10_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let g = pflip_graph(120, 0.05, 0.2, 0.1, 42);
    let path = dir.path().join("g.txt");
    g.write_edge_list(std::fs::File::create(&path).unwrap()).unwrap();
    let p = path.to_str().unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec!["stats", "--graph", p],
        vec!["batch", "--graph", p, "--algo", "blc-tu", "--train-frac", "0.15,0.9", "--reps", "4", "--seed", "3"],
        vec!["batch", "--graph", p, "--algo", "perceptron", "--train-frac", "0.5", "--reps", "3", "--reciprocal", "on"],
        vec!["active", "--graph", p, "--strategy", "alclog-tu", "--reps", "4", "--seed", "8"],
        vec!["verify", "--theorem", "2", "--er", "80,0.05", "--model", "pflip:0.2,0.1", "--trials", "200"],
        vec!["verify", "--theorem", "1", "--graph", p, "--model", "yk:40", "--trials", "200", "--algorithm", "alclog-t"],
    ];
    let mut bad = Vec::new();
    for cmd in &commands {
        let runs: Vec<_> = [&["--threads", "1"][..], &["--threads", "4"][..], &[][..]]
            .iter()
            .map(|t| run_cli(&[*t, &cmd[..]].concat()))
            .collect();
        let first = &runs[0];
        if first.is_err() || runs.iter().any(|r| r != first) {
            bad.push(format!("{} ({:?})", cmd[0], first.as_ref().err()));
        }
    }
    check(
        bad.is_empty(),
        format!("{} commands x 3 runs (1, 4, default threads), mismatches {bad:?}", commands.len()),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("C1 dataset statistics", c1_dataset_stats),
        ("C2 batch reproduction", c2_batch),
        ("C3 active reproduction", c3_active),
        ("C4 threshold 1/2 vs brute force", c4_fact_one),
        ("C5 k* vs brute force and scaling", c5_kstar),
        ("C6 ALCone mistake bound", c6_alcone),
        ("C7 ALClog mistake bound", c7_alclog),
        ("C8 lower bound under uniform K-negative labelings", c8_lower_bound),
        ("C9 metric identities", c9_metrics),
        ("C10 determinism", c10_determinism),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let (tag, detail) = match f() {
            Outcome::Pass(d) => ("PASS", d),
            Outcome::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Outcome::Skip(d) => ("SKIP", d),
        };
        println!("[{tag}] {name}: {detail} [{}]", secs(start.elapsed()));
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
