//! End-to-end acceptance checks. Runs every criterion, prints one PASS/FAIL
//! line each, and exits non-zero if any failed.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use fsd_core::*;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// 1: incremental weighting misses fewer first stories than static weighting

fn min_cost_point(docs: &[Document], mode: WeightingMode, seed: u64) -> DetPoint<f64> {
    let config = DetectorConfig {
        lsh: LshParams::planned(0.05, 0.9, 13, seed).unwrap(),
        ..DetectorConfig::default()
    }
    .with_mode(mode)
    .with_train_prefix(500);
    let verdicts = run_stream(docs, config, Stoplist::english()).unwrap();
    let scored = join_truth(&verdicts[500..], docs);
    *det_curve(&scored, &CostParams::default())
        .unwrap()
        .min_cost_point()
}

fn trend_reproduction() -> Outcome {
    let start = Instant::now();
    let mut wins = 0;
    let mut rel_sum = 0.0;
    let mut rows = Vec::new();
    for seed in 1..=10u64 {
        let docs = generate_synthetic(&SynthConfig {
            n_docs: 1500,
            n_events: 750,
            lead_events: 500,
            drift_rate: 0.05,
            duplicate_noise: 0.05,
            vocab_size: 2000,
            seed,
        })
        .unwrap();
        let stat = min_cost_point(&docs, WeightingMode::Static, seed).p_miss;
        let incr = min_cost_point(&docs, WeightingMode::Incremental, seed).p_miss;
        if incr <= stat {
            wins += 1;
        }
        // an increase from zero counts as a full regression
        rel_sum += match (stat > 0.0, incr > 0.0) {
            (true, _) => (stat - incr) / stat,
            (false, true) => -1.0,
            (false, false) => 0.0,
        };
        rows.push(format!("{stat:.3}->{incr:.3}"));
    }
    let mean_rel = rel_sum / 10.0;
    let elapsed = start.elapsed();
    check(
        wins >= 8 && mean_rel > 0.0 && elapsed < Duration::from_secs(120),
        format!(
            "incremental miss <= static on {wins}/10 streams, mean relative reduction {mean_rel:.3}, {:.1}s [{}]",
            elapsed.as_secs_f64(),
            rows.join(" ")
        ),
    )
}

// 2: batched absorption of document frequencies

fn random_bags(rng: &mut ChaCha8Rng, n: usize) -> Vec<TokenBag> {
    let vocab = rng.gen_range(1..300);
    (0..n)
        .map(|_| {
            let len = rng.gen_range(0..25);
            (0..len)
                .map(|_| format!("t{}", rng.gen_range(0..vocab)))
                .collect()
        })
        .collect()
}

fn incremental_equals_batch() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for corpus in 0..100 {
        let n = rng.gen_range(1..=200);
        let bags = random_bags(&mut rng, n);
        let mut whole = VectorSpaceState::new();
        whole.absorb_batch(&bags);

        let mut batched = VectorSpaceState::new();
        let mut rest = bags.as_slice();
        while !rest.is_empty() {
            let (batch, tail) = rest.split_at(rng.gen_range(1..=rest.len()));
            batched.absorb_batch(batch);
            rest = tail;
        }

        let mut df: HashMap<&str, u64> = HashMap::new();
        for b in &bags {
            for t in b.terms() {
                *df.entry(t).or_default() += 1;
            }
        }
        let same = batched == whole
            && whole.total_docs() == n as u64
            && whole.vocabulary().len() == df.len()
            && df.iter().all(|(t, &c)| whole.doc_freq_of(t) == c);
        if !same {
            return Err(format!("corpus {corpus} ({n} docs) differs"));
        }
    }
    Ok("100 corpora, random partitions, identical counts".into())
}

// 3: weighed vectors have unit length

fn unit_norm() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    let mut zeros = 0;
    let mut checked = 0;
    while checked < 10_000 {
        let bags = random_bags(&mut rng, 50);
        let mut state = VectorSpaceState::new();
        state.absorb_batch(&bags);
        for (i, b) in bags.iter().enumerate() {
            let v: TermVector<f64> = state.weigh(b, &format!("d{i}")).unwrap();
            if v.is_zero() {
                zeros += 1;
            } else {
                let n = v.entries().iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
                worst = worst.max((n - 1.0).abs());
            }
            checked += 1;
        }
    }
    check(
        worst <= 1e-9,
        format!("{checked} documents, max |norm - 1| = {worst:.2e}, {zeros} zero vectors"),
    )
}

// 4: planted-neighbour recall with planned tables

fn planted_pair(rng: &mut ChaCha8Rng, cos_xy: f64) -> (TermVector<f64>, TermVector<f64>) {
    const SUPPORT: u32 = 100;
    let mut part = |offset: u32| -> Vec<(TermId, f64)> {
        let w: Vec<f64> = (0..SUPPORT).map(|_| rng.gen_range(0.5..1.5)).collect();
        let n = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        w.iter()
            .enumerate()
            .map(|(i, x)| (TermId(offset + i as u32), x / n))
            .collect()
    };
    let (s, u, w) = (part(0), part(SUPPORT), part(2 * SUPPORT));
    let (a, b) = (cos_xy.sqrt(), (1.0 - cos_xy).sqrt());
    let mix = |other: &[(TermId, f64)]| {
        s.iter()
            .map(|&(t, x)| (t, a * x))
            .chain(other.iter().map(|&(t, x)| (t, b * x)))
            .collect::<Vec<_>>()
    };
    (
        TermVector::from_weights("query", mix(&u)).unwrap(),
        TermVector::from_weights("planted", mix(&w)).unwrap(),
    )
}

fn lsh_recall() -> Outcome {
    let start = Instant::now();
    let tables = plan_tables(0.05, 0.9, 13).unwrap();
    if tables != 11 {
        return Err(format!("plan_tables(0.05, 0.9, 13) = {tables}"));
    }
    // angle at which one hyperplane separates the pair with probability 0.1
    let cos_xy = (0.1 * PI).cos();
    let mut missed = 0;
    for trial in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(4000 + trial);
        let mut index = LshIndex::new(LshParams::new(13, tables, trial).unwrap());
        let (query, planted) = planted_pair(&mut rng, cos_xy);
        for d in 0..500 {
            let terms: Vec<(TermId, f64)> = (0..30)
                .map(|_| (TermId(rng.gen_range(0..10_000)), rng.gen_range(0.1..1.0)))
                .collect();
            index
                .insert(TermVector::from_weights(format!("x{d}"), terms).unwrap())
                .unwrap();
        }
        index.insert(planted).unwrap();
        if !index
            .candidates(&query)
            .iter()
            .any(|c| c.doc_id() == "planted")
        {
            missed += 1;
        }
    }
    let rate = missed as f64 / 100.0;
    let elapsed = start.elapsed();
    check(
        rate <= 0.10 && elapsed < Duration::from_secs(60),
        format!(
            "L = {tables}, miss rate {rate:.2} over 100 trials, {:.1}s",
            elapsed.as_secs_f64()
        ),
    )
}

// 5: LSH detector against the exhaustive detector

fn oracle_agreement() -> Outcome {
    let docs = generate_synthetic(&SynthConfig {
        n_docs: 500,
        n_events: 150,
        duplicate_noise: 0.02,
        seed: 5,
        ..SynthConfig::default()
    })
    .unwrap();
    let config = DetectorConfig::<f64>::default();
    let lsh = run_stream(&docs, config.clone(), Stoplist::english()).unwrap();
    let oracle = run_stream_exhaustive(&docs, config, Stoplist::english()).unwrap();
    let agree = lsh
        .iter()
        .zip(&oracle)
        .filter(|(l, o)| l.is_novel == o.is_novel)
        .count();
    let violations = lsh
        .iter()
        .zip(&oracle)
        .filter(|(l, o)| l.novelty_score < o.novelty_score)
        .count();
    let rate = agree as f64 / docs.len() as f64;
    check(
        rate >= 0.90 && violations == 0,
        format!(
            "agreement {rate:.3} on {} documents, {violations} score violations",
            docs.len()
        ),
    )
}

// 6: normalized cost anchors

fn cost_anchors() -> Outcome {
    let p = CostParams::<f64>::default();
    let perfect = cost_norm(0.0, 0.0, &p);
    let trivial = cost_norm(0.0, 1.0, &p).min(cost_norm(1.0, 0.0, &p));
    let hand: f64 = cost_norm(0.5, 0.05, &CostParams::new(1.0, 0.1, 0.02).unwrap());
    check(
        perfect == 0.0 && (trivial - 1.0).abs() <= 1e-9 && (hand - 0.745).abs() <= 1e-9,
        format!("perfect {perfect}, best trivial {trivial}, (0.5, 0.05) -> {hand}"),
    )
}

// 7: DET curve shape

fn det_integrity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let scores: Vec<(f64, Truth)> = (0..10_000)
        .map(|i| {
            (
                rng.gen::<f64>(),
                if i % 2 == 0 { Truth::New } else { Truth::Old },
            )
        })
        .collect();
    let curve = det_curve(&scores, &CostParams::default()).unwrap();
    let pts = &curve.points;
    let monotone = pts
        .windows(2)
        .all(|w| w[0].p_miss <= w[1].p_miss && w[0].p_fa >= w[1].p_fa);
    let first = (pts[0].p_fa, pts[0].p_miss);
    let last = pts.last().map(|p| (p.p_fa, p.p_miss)).unwrap();
    // Euclidean distance to the line p_miss + p_fa = 1
    let worst = pts
        .iter()
        .map(|p| (p.p_miss + p.p_fa - 1.0).abs() / 2f64.sqrt())
        .fold(0.0, f64::max);

    // a stream scored by the detector itself
    let docs = generate_synthetic(&SynthConfig {
        n_docs: 300,
        n_events: 60,
        seed: 7,
        ..SynthConfig::default()
    })
    .unwrap();
    let verdicts =
        run_stream(&docs, DetectorConfig::<f64>::default(), Stoplist::english()).unwrap();
    let real = det_curve(&join_truth(&verdicts, &docs), &CostParams::default()).unwrap();
    let real_ok = real
        .points
        .windows(2)
        .all(|w| w[0].p_miss <= w[1].p_miss && w[0].p_fa >= w[1].p_fa)
        && (real.points[0].p_fa, real.points[0].p_miss) == (1.0, 0.0)
        && real.points.last().map(|p| (p.p_fa, p.p_miss)) == Some((0.0, 1.0));

    check(
        monotone && real_ok && first == (1.0, 0.0) && last == (0.0, 1.0) && worst <= 0.03,
        format!(
            "monotone, corners {first:?} and {last:?}, random scores within {worst:.4} of the diagonal"
        ),
    )
}

// 8: byte-identical CLI output

fn fsd(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_fsd"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!(
            "fsd {} failed: {}",
            args.join(" "),
            String::from_utf8_lossy(&out.stderr)
        ))
    }
}

fn read(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap()
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_owned();
    fsd(&[
        "synth",
        "--out",
        &p("s.jsonl"),
        "--docs",
        "600",
        "--events",
        "150",
        "--seed",
        "8",
    ])?;
    let mut identical = true;
    for (mode, extra) in [
        ("incremental", vec!["--batch-size", "7"]),
        ("static", vec!["--train-prefix", "100"]),
    ] {
        for run in ["a", "b"] {
            let mut args = vec![
                "detect", "--input", "", "--output", "", "--mode", mode, "--seed", "3",
            ];
            let (input, output) = (p("s.jsonl"), p(&format!("v-{mode}-{run}.jsonl")));
            args[2] = &input;
            args[4] = &output;
            args.extend(&extra);
            fsd(&args)?;
            let csv = p(&format!("d-{mode}-{run}.csv"));
            fsd(&[
                "evaluate",
                "--verdicts",
                &output,
                "--truth",
                &input,
                "--det-out",
                &csv,
            ])?;
        }
        let same = |stem: &str, ext: &str| {
            let a = read(Path::new(&p(&format!("{stem}-{mode}-a.{ext}"))));
            !a.is_empty() && a == read(Path::new(&p(&format!("{stem}-{mode}-b.{ext}"))))
        };
        identical &= same("v", "jsonl") && same("d", "csv");
    }
    check(
        identical,
        "two detect and evaluate runs per mode produce identical bytes".into(),
    )
}

// 9: Porter stemmer against the reference vocabulary

fn stemmer_conformance() -> Outcome {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data/porter_vocab.tsv");
    let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut total = 0;
    let mut wrong = Vec::new();
    for line in text.lines().filter(|l| !l.is_empty()) {
        let (word, want) = line.split_once('\t').ok_or("malformed reference line")?;
        total += 1;
        if stem(word) != want {
            wrong.push(word.to_owned());
        }
    }
    check(
        total >= 1000 && wrong.is_empty(),
        format!(
            "{}/{total} pairs agree{}",
            total - wrong.len(),
            if wrong.is_empty() {
                String::new()
            } else {
                format!("; first mismatches {:?}", &wrong[..wrong.len().min(5)])
            }
        ),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("trend reproduction", trend_reproduction),
        ("incremental equals batch", incremental_equals_batch),
        ("unit norm", unit_norm),
        ("LSH recall", lsh_recall),
        ("oracle agreement", oracle_agreement),
        ("cost anchors", cost_anchors),
        ("DET integrity", det_integrity),
        ("determinism", determinism),
        ("stemmer conformance", stemmer_conformance),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {}. {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {}. {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
