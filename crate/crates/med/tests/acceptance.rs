//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.
//!
//! Extra datasets for the round-trip check can be listed in
//! `MED_ACCEPTANCE_DATA`, separated like `PATH`.

mod support;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use med::files::{self, PredictionRow};
use med::med_core::corpus::{Corpus, Sample};
use med::med_core::edittree::{lcs, levenshtein, EditTree};
use med::med_core::harness::{evaluate_predictions, reduce_tagpair};
use med::med_core::med::{majority_vote, train, MedConfig, MedModel};
use med::med_core::neural::{backward, forward, Dims, ModelParams};
use med::med_core::poet::PoetStore;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::*;

const ABC: [char; 6] = ['a', 'b', 'c', 'd', 'e', 'f'];

const EDIT_TREE_BUDGET: Duration = Duration::from_millis(1);
const ORACLE_BUDGET: Duration = Duration::from_secs(30);
const GRADIENT_BUDGET: Duration = Duration::from_secs(60);
const OVERFIT_BUDGET: Duration = Duration::from_secs(600);
const TRANSFER_BUDGET: Duration = Duration::from_secs(1800);

const GRADIENT_TOLERANCE: f64 = 1e-4;
const GRADIENT_STEP: f64 = 1e-5;
// Below this magnitude gradients are compared on an absolute scale.
const GRADIENT_FLOOR: f64 = 1e-5;

const OVERFIT_ITERATIONS: usize = 3000;
const OVERFIT_STEMS: usize = 4;
const OVERFIT_SEED: u64 = 11;

const TRANSFER_TRAIN: usize = 128;
const TRANSFER_TEST: usize = 50;
const TRANSFER_FRACTION: f64 = 0.0625;
const TRANSFER_ITERATIONS: usize = 1000;
const TRANSFER_SEED: u64 = 1;
const TRANSFER_MAX_MED_DROP: f64 = 10.0;
const TRANSFER_MIN_CONTROL_DROP: f64 = 30.0;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn fixture() -> Corpus {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/german.tsv");
    files::read_corpus(&path).expect("fixture")
}

fn config(hidden: usize, iterations: usize, seed: u64) -> MedConfig {
    MedConfig {
        hidden_size: hidden,
        embedding_size: hidden,
        iterations,
        seed,
        ..MedConfig::default()
    }
}

fn accuracy(model: &MedModel, corpus: &Corpus) -> f64 {
    let ok = corpus
        .samples()
        .iter()
        .filter(|s| s.target_form() == Some(model.predict(s).as_str()))
        .count();
    100.0 * ok as f64 / corpus.len() as f64
}

fn prediction_bytes(model: &MedModel, corpus: &Corpus, dir: &Path, name: &str) -> Vec<u8> {
    let rows: Vec<PredictionRow> = corpus
        .samples()
        .iter()
        .map(|s| PredictionRow::new(s, &model.predict(s)))
        .collect();
    let path = dir.join(name);
    files::write_predictions(&path, &rows).expect("write predictions");
    std::fs::read(&path).expect("read predictions")
}

fn edit_tree_structure() -> Check {
    let expected = EditTree::interior(
        4,
        1,
        Some(EditTree::interior(0, 2, None, Some(EditTree::substitution("ge", "")))),
        Some(EditTree::substitution("t", "en")),
    );
    let start = Instant::now();
    let tree = EditTree::build("abgesagt", "absagen");
    let took = start.elapsed();
    ensure(tree == expected, format!("got {}", tree.canonical_key()))?;
    ensure(tree.apply("abgesagt").as_deref() == Some("absagen"), "tree does not reproduce absagen")?;
    ensure(took < EDIT_TREE_BUDGET, format!("build took {took:?}"))?;
    Ok(format!("{} in {took:?}", tree.canonical_key()))
}

fn round_trip_corpus(corpus: &Corpus) -> Result<usize, String> {
    for s in corpus.samples() {
        let Some(t) = s.target_form() else { continue };
        let tree = EditTree::build(s.source_form(), t);
        if tree.apply(s.source_form()).as_deref() != Some(t) {
            return Err(format!("{} -> {t}", s.source_form()));
        }
    }
    Ok(corpus.len())
}

fn edit_tree_round_trip() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..10_000 {
        let a = random_unicode(&mut rng, 12);
        let b = random_unicode(&mut rng, 12);
        let tree = EditTree::build(&a, &b);
        ensure(tree.apply(&a).as_deref() == Some(b.as_str()), format!("{a:?} -> {b:?}"))?;
    }
    let mut datasets = vec![
        ("fixture".to_string(), fixture()),
        ("patterns".to_string(), eight_pattern_corpus(&mut rng, 20)),
        ("transfer".to_string(), transfer_corpora(&mut rng, 64, 16).0),
    ];
    if let Some(paths) = std::env::var_os("MED_ACCEPTANCE_DATA") {
        for p in std::env::split_paths(&paths) {
            let c = files::read_corpus(&p).map_err(|e| e.to_string())?;
            datasets.push((p.display().to_string(), c));
        }
    }
    let mut names = Vec::new();
    for (name, c) in &datasets {
        let n = round_trip_corpus(c).map_err(|e| format!("{name}: {e}"))?;
        names.push(format!("{name} {n}"));
    }
    Ok(format!("10000 random pairs; datasets: {}", names.join(", ")))
}

fn string_oracles() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10_000 {
        let k = rng.gen_range(1..=ABC.len());
        let a = random_string(&mut rng, &ABC[..k], 12);
        let b = random_string(&mut rng, &ABC[..k], 12);
        let (ac, bc): (Vec<char>, Vec<char>) = (a.chars().collect(), b.chars().collect());
        let m = lcs(&a, &b);
        ensure(
            (m.start_a, m.start_b, m.len) == lcs_oracle(&ac, &bc),
            format!("lcs({a:?}, {b:?}) = {m:?}"),
        )?;
        ensure(
            levenshtein(&a, &b) == levenshtein_oracle(&ac, &bc),
            format!("levenshtein({a:?}, {b:?})"),
        )?;
    }
    let took = start.elapsed();
    ensure(took < ORACLE_BUDGET, format!("took {took:?}"))?;
    Ok(format!("10000 pairs in {took:.2?}"))
}

fn micro_store<R: Rng>(rng: &mut R) -> (Vec<Sample>, PoetStore) {
    let pairs = [("s", "t"), ("s", "u")];
    let n = rng.gen_range(1..=6);
    let samples: Vec<Sample> = (0..n)
        .map(|_| {
            let (s, t) = pairs[rng.gen_range(0..pairs.len())];
            let src = random_string(rng, &ABC, 5) + "a";
            let trg = random_string(rng, &ABC, 5) + "b";
            Sample::new(&src, s, t, Some(&trg)).unwrap()
        })
        .collect();
    let store = PoetStore::build(&Corpus::new(samples.clone())).unwrap();
    (samples, store)
}

fn one_edit<R: Rng>(rng: &mut R, s: &str) -> String {
    let mut c: Vec<char> = s.chars().collect();
    let i = rng.gen_range(0..=c.len());
    match rng.gen_range(0..3) {
        0 if i < c.len() => {
            c.remove(i);
        }
        1 if i < c.len() => c[i] = ABC[rng.gen_range(0..ABC.len())],
        _ => c.insert(i, ABC[rng.gen_range(0..ABC.len())]),
    }
    c.into_iter().collect()
}

fn poet_consistency(corpus: &Corpus) -> Result<(), String> {
    let store = PoetStore::build(corpus).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for s in corpus.samples() {
        let gold = s.target_form().unwrap();
        let out = store.correct(s.source_form(), s.source_tag(), s.target_tag(), gold, &mut rng);
        ensure(out == gold, format!("{gold} became {out}"))?;
    }
    Ok(())
}

fn poet_oracle_equivalence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut nonempty = 0;
    for _ in 0..1000 {
        let (samples, store) = micro_store(&mut rng);
        let anchor = &samples[rng.gen_range(0..samples.len())];
        let source = if rng.gen_bool(0.5) {
            anchor.source_form().to_string()
        } else {
            random_string(&mut rng, &ABC, 5) + "a"
        };
        let (s, t) = (anchor.source_tag(), anchor.target_tag());
        let rho = match rng.gen_range(0..3) {
            0 => random_string(&mut rng, &ABC, 7),
            _ => {
                let trees: Vec<_> = store.trees(s, t).unwrap().values().collect();
                let tree = &trees[rng.gen_range(0..trees.len())].tree;
                let base = tree.apply(&source).unwrap_or_else(|| anchor.target_form().unwrap().into());
                let mut r = one_edit(&mut rng, &base);
                r.truncate(r.char_indices().nth(7).map_or(r.len(), |(i, _)| i));
                r
            }
        };
        let got = store.candidates(&source, s, t, &rho);
        let want = poet_oracle(&store, &ABC, &source, s, t, &rho);
        ensure(got == want, format!("{source:?} {rho:?}: {got:?} vs {want:?}"))?;
        nonempty += usize::from(!got.is_empty());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let toys = [
        ("fixture", fixture()),
        ("patterns", eight_pattern_corpus(&mut rng, 20)),
        ("transfer", transfer_corpora(&mut rng, TRANSFER_TRAIN, TRANSFER_TEST).0),
    ];
    for (name, c) in &toys {
        poet_consistency(c).map_err(|e| format!("{name}: {e}"))?;
    }
    Ok(format!("1000 micro-stores, {nonempty} with candidates; golds pass through on toy corpora"))
}

fn gradient_check() -> Check {
    let start = Instant::now();
    let dims = Dims {
        input_vocab: 6,
        output_vocab: 6,
        embedding: 4,
        hidden: 4,
        attention: 4,
        readout: 4,
        maxout_pieces: 2,
    };
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for seed in 0..5 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let params = ModelParams::random(dims, 0.6, &mut rng).unwrap();
        let input: Vec<usize> = (0..5).map(|_| rng.gen_range(0..6)).collect();
        let mut target = vec![0];
        target.extend((0..4).map(|_| rng.gen_range(2..6)));
        target.push(1);
        let trace = forward(&params, &input, &target).unwrap();
        let mut grads = params.zeros_like();
        backward(&params, &trace, &mut grads);
        let names = ModelParams::names();
        for ti in 0..params.tensors().len() {
            for k in 0..params.tensors()[ti].len() {
                let mut plus = params.clone();
                plus.tensors_mut()[ti].data_mut()[k] += GRADIENT_STEP;
                let mut minus = params.clone();
                minus.tensors_mut()[ti].data_mut()[k] -= GRADIENT_STEP;
                let numeric = (forward(&plus, &input, &target).unwrap().loss
                    - forward(&minus, &input, &target).unwrap().loss)
                    / (2.0 * GRADIENT_STEP);
                let analytic = grads.tensors()[ti].data()[k];
                let rel = (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(GRADIENT_FLOOR);
                ensure(
                    rel <= GRADIENT_TOLERANCE,
                    format!("seed {seed} {}[{k}]: {analytic} vs {numeric}", names[ti]),
                )?;
                worst = worst.max(rel);
                checked += 1;
            }
        }
    }
    let took = start.elapsed();
    ensure(took < GRADIENT_BUDGET, format!("took {took:?}"))?;
    Ok(format!("{checked} entries over 5 seeds, worst {worst:.2e}, {took:.1?}"))
}

fn overfit_run(dir: &Path, tag: &str) -> Result<(f64, Vec<u8>, Duration), String> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let corpus = eight_pattern_corpus(&mut rng, OVERFIT_STEMS);
    let model = train(&corpus, &config(32, OVERFIT_ITERATIONS, OVERFIT_SEED)).map_err(|e| e.to_string())?;
    let acc = accuracy(&model, &corpus);
    let bytes = prediction_bytes(&model, &corpus, dir, &format!("overfit-{tag}.tsv"));
    Ok((acc, bytes, start.elapsed()))
}

fn overfit(dir: &Path) -> (Check, Option<Vec<u8>>) {
    match overfit_run(dir, "a") {
        Ok((acc, bytes, took)) => (overfit_verdict(acc, took), Some(bytes)),
        Err(e) => (Err(e), None),
    }
}

fn overfit_verdict(acc: f64, took: Duration) -> Check {
    let summary = format!(
        "training accuracy {acc:.1}% on {} samples after {OVERFIT_ITERATIONS} iterations, {took:.0?}",
        8 * OVERFIT_STEMS
    );
    ensure(acc == 100.0, summary.clone())?;
    ensure(took < OVERFIT_BUDGET, summary.clone())?;
    Ok(summary)
}

struct Transfer {
    med_full: f64,
    med_reduced: f64,
    control_full: f64,
    control_reduced: f64,
    kept: usize,
    bytes: Vec<u8>,
    took: Duration,
}

fn transfer_run(dir: &Path, tag: &str) -> Result<Transfer, String> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (full, test) = transfer_corpora(&mut rng, TRANSFER_TRAIN, TRANSFER_TEST);
    let (s, t) = TRANSFER_PAIRS[0];
    let pair = (s.to_string(), t.to_string());
    let reduced = reduce_tagpair(&full, &pair, TRANSFER_FRACTION, 3).map_err(|e| e.to_string())?;
    let test = only_pair(&test, &pair);
    let cfg = config(32, TRANSFER_ITERATIONS, TRANSFER_SEED);
    let corpora = [
        ("med-full", full.clone()),
        ("med-reduced", reduced.clone()),
        ("control-full", only_pair(&full, &pair)),
        ("control-reduced", only_pair(&reduced, &pair)),
    ];
    let mut acc = Vec::new();
    let mut bytes = Vec::new();
    for (name, c) in &corpora {
        let m = train(c, &cfg).map_err(|e| format!("{name}: {e}"))?;
        acc.push(accuracy(&m, &test));
        bytes.extend(prediction_bytes(&m, &test, dir, &format!("{name}-{tag}.tsv")));
    }
    Ok(Transfer {
        med_full: acc[0],
        med_reduced: acc[1],
        control_full: acc[2],
        control_reduced: acc[3],
        kept: only_pair(&reduced, &pair).len(),
        bytes,
        took: start.elapsed(),
    })
}

fn transfer(dir: &Path) -> (Check, Option<Vec<u8>>) {
    match transfer_run(dir, "a") {
        Ok(r) => (transfer_verdict(&r), Some(r.bytes)),
        Err(e) => (Err(e), None),
    }
}

fn transfer_verdict(r: &Transfer) -> Check {
    let med_drop = r.med_full - r.med_reduced;
    let control_drop = r.control_full - r.control_reduced;
    let summary = format!(
        "kept {} of {TRANSFER_TRAIN}; MED {:.1} -> {:.1} (drop {med_drop:.1}), control {:.1} -> {:.1} (drop {control_drop:.1}), {:.0?}",
        r.kept, r.med_full, r.med_reduced, r.control_full, r.control_reduced, r.took
    );
    ensure(med_drop < TRANSFER_MAX_MED_DROP, summary.clone())?;
    ensure(control_drop > TRANSFER_MIN_CONTROL_DROP, summary.clone())?;
    ensure(r.took < TRANSFER_BUDGET, summary.clone())?;
    Ok(summary)
}

fn voting() -> Check {
    let mut cases = 0;
    for n in 1..=5usize {
        for mask in 0..(1u32 << n) {
            let votes: Vec<&str> = (0..n).map(|i| if mask >> i & 1 == 1 { "x" } else { "y" }).collect();
            let xs = votes.iter().filter(|v| **v == "x").count();
            let ys = n - xs;
            let mut seen = BTreeSet::new();
            for seed in 0..64 {
                let pick = majority_vote(&votes, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
                let again = majority_vote(&votes, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
                ensure(pick == again, format!("{votes:?}: seed {seed} not deterministic"))?;
                seen.insert(pick);
            }
            let expected: BTreeSet<String> = match xs.cmp(&ys) {
                std::cmp::Ordering::Greater => ["x".to_string()].into(),
                std::cmp::Ordering::Less => ["y".to_string()].into(),
                std::cmp::Ordering::Equal => ["x".to_string(), "y".to_string()].into(),
            };
            ensure(seen == expected, format!("{votes:?}: outcomes {seen:?}"))?;
            cases += 1;
        }
    }
    ensure(majority_vote::<&str, _>(&[], &mut ChaCha8Rng::seed_from_u64(0)).is_none(), "empty vote")?;
    Ok(format!("{cases} vote sequences of 1 to 5 members, 64 seeds each"))
}

fn med_bin(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_med"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    let stdout = String::from_utf8_lossy(&out.stdout).into_owned();
    if !out.status.success() {
        return Err(format!("med {}: {}", args.join(" "), String::from_utf8_lossy(&out.stderr).trim()));
    }
    Ok(stdout)
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

fn report_accuracies(path: &Path) -> Result<(f64, f64), String> {
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(path).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let get = |k: &str| v[k].as_f64().ok_or(format!("report lacks {k}"));
    Ok((get("accuracy")?, get("corrected_accuracy")?))
}

/// Prediction one edit away from the gold whose unique best correction in
/// `store` is the gold itself.
fn corrupt(store: &PoetStore, alphabet: &[char], s: &Sample) -> Option<String> {
    let gold = s.target_form()?;
    let chars: Vec<char> = gold.chars().collect();
    let mut tries = Vec::new();
    for i in (0..chars.len()).rev() {
        let mut v = chars.clone();
        v.remove(i);
        tries.push(v);
        for &c in alphabet {
            let mut v = chars.clone();
            v.insert(i + 1, c);
            tries.push(v);
        }
    }
    tries.into_iter().map(|v| v.into_iter().collect::<String>()).find(|p| {
        let (src, st, tt) = (s.source_form(), s.source_tag(), s.target_tag());
        if p.is_empty() || store.supports(src, st, tt, p) {
            return false;
        }
        let cands = poet_oracle(store, alphabet, src, st, tt, p);
        cands.first().is_some_and(|c| c.form == gold)
            && cands.get(1).map_or(true, |c| c.frequency < cands[0].frequency)
    })
}

fn poet_end_to_end(dir: &Path) -> Check {
    // A model trained on participles without their final t.
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (train_set, test) = transfer_corpora(&mut rng, 48, 20);
    let broken = Corpus::new(
        train_set
            .samples()
            .iter()
            .map(|s| {
                let g = s.target_form().unwrap();
                s.with_target(Some(&g[..g.len() - 1])).unwrap()
            })
            .collect(),
    );
    let (broken_path, clean_path, test_path) = (dir.join("broken.tsv"), dir.join("clean.tsv"), dir.join("test.tsv"));
    files::write_corpus(&broken_path, &broken).map_err(|e| e.to_string())?;
    files::write_corpus(&clean_path, &train_set).map_err(|e| e.to_string())?;
    files::write_corpus(&test_path, &test).map_err(|e| e.to_string())?;
    let cfg = dir.join("config.txt");
    std::fs::write(&cfg, "hidden_size=32\nembedding_size=32\niterations=800\n").map_err(|e| e.to_string())?;
    let (model, store, report) = (dir.join("model"), dir.join("store.tsv"), dir.join("report.json"));
    med_bin(&["train", "--data", path_str(&broken_path), "--config", path_str(&cfg), "--seed", "1", "--out", path_str(&model)])?;
    med_bin(&["poet", "build", "--data", path_str(&clean_path), "--out", path_str(&store)])?;
    med_bin(&["eval", "--model", path_str(&model), "--test", path_str(&test_path), "--poet", path_str(&store), "--report", path_str(&report)])?;
    let (before, after) = report_accuracies(&report)?;
    ensure(after >= before, format!("corrected {after} < uncorrected {before}"))?;

    // Micro-fixture: store from the test golds, predictions one edit off.
    let gold = fixture();
    let gold_store = PoetStore::build(&gold).map_err(|e| e.to_string())?;
    let alphabet: Vec<char> = gold
        .samples()
        .iter()
        .flat_map(|s| s.target_form().unwrap().chars())
        .collect::<BTreeSet<char>>()
        .into_iter()
        .collect();
    let mut preds = Vec::new();
    for s in gold.samples() {
        let p = corrupt(&gold_store, &alphabet, s).ok_or(format!("no corruption for {}", s.target_form().unwrap()))?;
        preds.push(p);
    }
    let r = evaluate_predictions(&gold, &[preds.clone()], Some(&gold_store), &mut ChaCha8Rng::seed_from_u64(0))
        .map_err(|e| e.to_string())?;
    ensure(r.corrected_accuracy == Some(1.0), format!("micro-fixture corrected {:?}", r.corrected_accuracy))?;
    let rows: Vec<PredictionRow> = gold.samples().iter().zip(&preds).map(|(s, p)| PredictionRow::new(s, p)).collect();
    let (gold_path, pred_path, fixed, gstore) =
        (dir.join("gold.tsv"), dir.join("pred.tsv"), dir.join("fixed.tsv"), dir.join("gold-store.tsv"));
    files::write_corpus(&gold_path, &gold).map_err(|e| e.to_string())?;
    files::write_predictions(&pred_path, &rows).map_err(|e| e.to_string())?;
    med_bin(&["poet", "build", "--data", path_str(&gold_path), "--out", path_str(&gstore)])?;
    let out = med_bin(&[
        "poet", "apply", "--store", path_str(&gstore), "--pred", path_str(&pred_path), "--data", path_str(&gold_path),
        "--out", path_str(&fixed), "--seed", "0",
    ])?;
    ensure(out.contains("-> 100.0"), format!("poet apply: {}", out.trim()))?;
    Ok(format!(
        "eval {:.1}% -> {:.1}% with store; micro-fixture {:.1}% -> 100.0% on {} samples",
        100.0 * before,
        100.0 * after,
        100.0 * r.accuracy,
        gold.len()
    ))
}

fn determinism(dir: &Path, overfit_bytes: &[u8], transfer_bytes: &[u8]) -> Check {
    let (_, again, _) = overfit_run(dir, "b")?;
    ensure(again == overfit_bytes, "overfit predictions differ between runs")?;
    let again = transfer_run(dir, "b")?.bytes;
    ensure(again == transfer_bytes, "transfer predictions differ between runs")?;
    Ok(format!("{} + {} prediction bytes identical", overfit_bytes.len(), transfer_bytes.len()))
}

fn report(n: usize, name: &str, start: Instant, outcome: &Check) -> bool {
    let took = start.elapsed();
    match outcome {
        Ok(detail) => println!("[PASS] {n:>2} {name}: {detail} ({took:.1?})"),
        Err(detail) => println!("[FAIL] {n:>2} {name}: {detail} ({took:.1?})"),
    }
    outcome.is_ok()
}

fn main() {
    let tmp = tempfile::tempdir().expect("tempdir");
    let dir: PathBuf = tmp.path().to_path_buf();
    let mut ok = true;

    let simple: [(&str, fn() -> Check); 5] = [
        ("edit tree structure", edit_tree_structure),
        ("edit tree round trip", edit_tree_round_trip),
        ("lcs and levenshtein oracles", string_oracles),
        ("poet oracle and consistency", poet_oracle_equivalence),
        ("gradient check", gradient_check),
    ];
    for (i, (name, f)) in simple.iter().enumerate() {
        let start = Instant::now();
        ok &= report(i + 1, name, start, &f());
    }

    let start = Instant::now();
    let (six, overfit_bytes) = overfit(&dir);
    ok &= report(6, "overfit capacity", start, &six);

    let start = Instant::now();
    let (seven, transfer_bytes) = transfer(&dir);
    ok &= report(7, "cross-pair transfer", start, &seven);

    let start = Instant::now();
    ok &= report(8, "ensemble voting", start, &voting());

    let start = Instant::now();
    ok &= report(9, "poet end to end", start, &poet_end_to_end(&dir));

    let start = Instant::now();
    let ten = match (&overfit_bytes, &transfer_bytes) {
        (Some(a), Some(b)) => determinism(&dir, a, b),
        _ => Err("criteria 6 and 7 produced no predictions".into()),
    };
    ok &= report(10, "determinism", start, &ten);

    if !ok {
        std::process::exit(1);
    }
}
