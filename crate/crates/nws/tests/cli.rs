//! End-to-end runs of the `nws` binary.

mod common;

use std::fmt::Write as _;
use std::fs;

use common::{assert_ok, nws, score_rows, write, Workspace};

fn kv(stdout: &[u8], key: &str) -> f64 {
    let text = String::from_utf8_lossy(stdout);
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|rest| rest.strip_prefix(": ")))
        .unwrap_or_else(|| panic!("no {key} in\n{text}"))
        .parse()
        .unwrap()
}

fn uniform_scores(ws: &Workspace, dim: usize, value: f64) -> String {
    let mut text = format!("#nws v1 d={dim} V={} seed=0\n#kind=NWS\n#config\n", ws.vocab);
    for i in 0..ws.vocab {
        writeln!(text, "{}\t{value}", common::word(i)).unwrap();
    }
    text
}

#[test]
fn train_writes_one_row_per_word() {
    let ws = Workspace::new(30, 10, 10, 5);
    let out = ws.path("q.tsv");
    let run = ws.train(&out, 2, &[]);
    assert_ok(&run);
    let rows = score_rows(&out);
    assert_eq!(rows.len(), 30);
    assert!(rows.iter().all(|(_, q)| q.is_finite()));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("#nws v1 d=10 V=30 seed=0\n#kind=NWS\n"));
    assert!(text.contains("#input embeddings="));
    assert!(text.contains("#input corpus="));
    let log = fs::read_to_string(ws.path("q.tsv.loss.tsv")).unwrap();
    assert_eq!(log.lines().filter(|l| !l.starts_with('#')).count(), 2);
    assert!(ws.path("q.tsv.ckpt").is_file());
    let stderr = String::from_utf8_lossy(&run.stderr);
    assert!(stderr.contains("epoch 2"), "{stderr}");
}

#[test]
fn train_is_byte_reproducible() {
    let ws = Workspace::new(30, 10, 10, 5);
    let (a, b) = (ws.path("a.tsv"), ws.path("b.tsv"));
    assert_ok(&ws.train(&a, 3, &["--seed", "7"]));
    assert_ok(&ws.train(&b, 3, &["--seed", "7"]));
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let c = ws.path("c.tsv");
    assert_ok(&ws.train(&c, 3, &["--seed", "8"]));
    assert_ne!(score_rows(&a), score_rows(&c));
}

#[test]
fn resumed_training_matches_uninterrupted() {
    let ws = Workspace::new(30, 10, 10, 5);
    let full = ws.path("full.tsv");
    assert_ok(&ws.train(&full, 4, &[]));

    let part = ws.path("part.tsv");
    assert_ok(&ws.train(&part, 2, &[]));
    let resumed = ws.path("resumed.tsv");
    let ckpt = ws.path("part.tsv.ckpt");
    assert_ok(&ws.train(&resumed, 4, &["--resume", ckpt.to_str().unwrap()]));
    assert_eq!(score_rows(&full), score_rows(&resumed));
    let log = fs::read_to_string(ws.path("resumed.tsv.loss.tsv")).unwrap();
    assert_eq!(log.lines().filter(|l| !l.starts_with('#')).count(), 4);
}

#[test]
fn isf_matches_hand_computed_values() {
    let dir = tempfile::tempdir().unwrap();
    let emb = write(dir.path(), "v.txt", "the 1 0\ncat 0 1\ndog 1 1\nrare 0.5 0.5\n");
    // Four sentences: "the" in all, "cat" in two (once repeated), "dog" in one.
    let corpus = write(dir.path(), "c.txt", "the cat cat\nthe dog\n\nthe cat\nthe\n");
    let out = dir.path().join("isf.tsv");
    let args: [&dyn AsRef<std::ffi::OsStr>; 7] =
        [&"isf", &"--embeddings", &emb, &"--corpus", &corpus, &"--out", &out];
    assert_ok(&nws(&args));
    let rows = score_rows(&out);
    let expect = [("the", (1.0f64 + 4.0 / 4.0).ln()), ("cat", 3f64.ln()), ("dog", 5f64.ln()), ("rare", 5f64.ln())];
    for ((w, q), (ew, eq)) in rows.iter().zip(expect) {
        assert_eq!(w, ew);
        assert!((q - eq).abs() < 1e-12, "{w}: {q} vs {eq}");
    }
    let min = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    assert_eq!(rows[0].1, min);

    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains("#kind=ISF"));
    assert!(text.contains("isf_source=corpus"));
    assert_ok(&nws(&args));
    assert_eq!(text, fs::read_to_string(&out).unwrap());
}

#[test]
fn avg_equals_uniform_nws_and_self_compare_is_null() {
    let ws = Workspace::new(40, 8, 5, 4);
    let uniform = write(ws.dir.path(), "uniform.tsv", &uniform_scores(&ws, 8, 1.0));
    let avg = nws(&[&"eval-sts", &"--embeddings", &ws.embeddings, &"--dataset", &ws.sts, &"--scheme", &"avg", &"--format", &"kv"]);
    assert_ok(&avg);
    let flat = nws(&[
        &"eval-sts",
        &"--embeddings",
        &ws.embeddings,
        &"--dataset",
        &ws.sts,
        &"--salience",
        &uniform,
        &"--compare",
        &uniform,
        &"--format",
        &"kv",
    ]);
    assert_ok(&flat);
    let r_avg = kv(&avg.stdout, "sts.r");
    assert!((r_avg - kv(&flat.stdout, "sts.r")).abs() < 1e-12);
    assert_eq!(kv(&flat.stdout, "sts.compare.z"), 0.0);
    assert_eq!(kv(&avg.stdout, "overall.r_mean"), r_avg);
}

#[test]
fn eval_reads_semeval_pairs_and_writes_report() {
    let ws = Workspace::new(40, 8, 5, 4);
    let input = write(ws.dir.path(), "STS.input.toy.txt", "w1 w2 w3\tw1 w2\nw4 w5\tw6 w7\nw8 w9\tw8 w10\nw3 w4\tw3 w5 w6\nw11\tw12\n");
    write(ws.dir.path(), "STS.gs.toy.txt", "4.5\n0.5\n3.0\n\n1.0\n");
    let report = ws.path("report.txt");
    let run = nws(&[&"eval-sts", &"--embeddings", &ws.embeddings, &"--dataset", &input, &"--scheme", &"avg", &"--out", &report]);
    assert_ok(&run);
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(stdout.contains("toy"), "{stdout}");
    assert!(stdout.contains("overall average"));
    let text = fs::read_to_string(&report).unwrap();
    assert!(text.starts_with("#nws v1"));
    assert!(text.contains("toy.n: 4\n"), "{text}");
    assert!(text.contains("toy.unannotated: 1\n"));
}

#[test]
fn isf_per_dataset_source() {
    let ws = Workspace::new(40, 8, 5, 4);
    let run = nws(&[&"eval-sts", &"--embeddings", &ws.embeddings, &"--dataset", &ws.sts, &"--scheme", &"isf", &"--isf-source", &"dataset"]);
    assert_ok(&run);
    let missing = nws(&[&"eval-sts", &"--embeddings", &ws.embeddings, &"--dataset", &ws.sts, &"--scheme", &"isf"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn psych_corr_reports_absent_columns() {
    let ws = Workspace::new(20, 4, 3, 4);
    let mut scores = format!("#nws v1 d=4 V={} seed=0\n#kind=NWS\n#config\n", ws.vocab);
    let mut csv = String::from("Word,Concreteness\n");
    for i in 0..ws.vocab {
        let v = 1.0 + (i * 7 % 13) as f64 / 3.0;
        writeln!(scores, "{}\t{v}", common::word(i)).unwrap();
        writeln!(csv, "W{i},{v}").unwrap();
    }
    let sal = write(ws.dir.path(), "q.tsv", &scores);
    let ratings = write(ws.dir.path(), "conc.csv", &csv);
    let run = nws(&[&"psych-corr", &"--salience", &sal, &"--ratings", &ratings, &"--format", &"kv"]);
    assert_ok(&run);
    let text = String::from_utf8_lossy(&run.stdout);
    assert_eq!(text.matches("status: absent").count(), 4, "{text}");
    assert!((kv(&run.stdout, "concreteness.r") - 1.0).abs() < 1e-12);
    assert_eq!(kv(&run.stdout, "concreteness.n"), 20.0);

    let human = nws(&[&"psych-corr", &"--salience", &sal, &"--dataset", &ratings]);
    assert_ok(&human);
    let lines: Vec<String> = String::from_utf8_lossy(&human.stdout).lines().map(str::to_string).collect();
    let order: Vec<&str> = lines[1..].iter().map(|l| l.split_whitespace().next().unwrap()).collect();
    assert_eq!(order, ["arousal", "concreteness", "dominance", "imageability", "valence"]);
}

#[test]
fn psych_corr_without_overlap_fails() {
    let ws = Workspace::new(20, 4, 3, 4);
    let sal = write(ws.dir.path(), "q.tsv", &uniform_scores(&ws, 4, 0.5));
    let ratings = write(ws.dir.path(), "r.csv", "word,valence\nzebra,1\nyak,2\n");
    let run = nws(&[&"psych-corr", &"--salience", &sal, &"--ratings", &ratings]);
    assert_eq!(run.status.code(), Some(2));
}

#[test]
fn export_strips_checkpoint_state() {
    let ws = Workspace::new(30, 10, 10, 5);
    let out = ws.path("q.tsv");
    assert_ok(&ws.train(&out, 2, &[]));
    let exported = ws.path("exported.tsv");
    let ckpt = ws.path("q.tsv.ckpt");
    assert_ok(&nws(&[&"export", &"--salience", &ckpt, &"--out", &exported]));
    assert_eq!(score_rows(&exported), score_rows(&out));
    let text = fs::read_to_string(&exported).unwrap();
    assert!(!text.contains("#epoch"));
    assert!(text.lines().filter(|l| !l.starts_with('#')).all(|l| l.split('\t').count() == 2));

    let avg = ws.path("avg.tsv");
    assert_ok(&nws(&[&"export", &"--scheme", &"avg", &"--embeddings", &ws.embeddings, &"--out", &avg]));
    assert!(fs::read_to_string(&avg).unwrap().contains("#kind=AVG"));
    let isf = ws.path("isf.tsv");
    assert_ok(&nws(&[&"export", &"--scheme", &"isf", &"--embeddings", &ws.embeddings, &"--corpus", &ws.corpus, &"--out", &isf]));
    assert_eq!(score_rows(&isf).len(), ws.vocab);
}

#[test]
fn missing_input_exits_two_and_names_the_path() {
    let ws = Workspace::new(10, 4, 2, 5);
    let missing = ws.path("nope.txt");
    let run = nws(&[&"train", &"--embeddings", &ws.embeddings, &"--corpus", &missing, &"--out", &ws.path("q.tsv")]);
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stderr).contains("nope.txt"));
}

#[test]
fn too_small_corpus_exits_two() {
    let ws = Workspace::new(10, 4, 1, 3);
    let run = ws.train(&ws.path("q.tsv"), 1, &[]);
    assert_eq!(run.status.code(), Some(2));
}

#[test]
fn divergent_training_exits_three() {
    let ws = Workspace::new(30, 10, 10, 5);
    let run = ws.train(&ws.path("q.tsv"), 5, &["--lr", "1e300"]);
    assert_eq!(run.status.code(), Some(3), "{}", String::from_utf8_lossy(&run.stderr));
}

#[test]
fn embedding_cache_gives_identical_results() {
    let ws = Workspace::new(30, 10, 10, 5);
    let cache = ws.path("emb.cache");
    let (a, b) = (ws.path("a.tsv"), ws.path("b.tsv"));
    assert_ok(&ws.train(&a, 2, &[]));
    assert_ok(&ws.train(&b, 2, &["--embedding-cache", cache.to_str().unwrap()]));
    assert!(cache.is_file());
    let c = ws.path("c.tsv");
    assert_ok(&ws.train(&c, 2, &["--embedding-cache", cache.to_str().unwrap()]));
    assert_eq!(score_rows(&a), score_rows(&b));
    assert_eq!(fs::read(&b).unwrap(), fs::read(&c).unwrap());
}

#[test]
fn isf_on_empty_corpus_exits_two() {
    let ws = Workspace::new(10, 4, 2, 5);
    let empty = write(ws.dir.path(), "empty.txt", "\n\n");
    let run = nws(&[&"isf", &"--embeddings", &ws.embeddings, &"--corpus", &empty, &"--out", &ws.path("isf.tsv")]);
    assert_eq!(run.status.code(), Some(2));
}

#[test]
fn eval_sts_matches_hand_computed_correlation() {
    let dir = tempfile::tempdir().unwrap();
    let emb = write(dir.path(), "v.txt", "red 1 0\nblue 0 1\ngreen 1 1\ncar 2 -1\n");
    let scores = write(
        dir.path(),
        "q.tsv",
        "#nws v1 d=2 V=4 seed=0\n#kind=NWS\n#config\nred\t1\nblue\t2\ngreen\t0.5\ncar\t3\n",
    );
    let sts = write(dir.path(), "toy.tsv", "Red car\tblue car\t3\nred\tgreen\t4\nblue, blue!\tcar\t0.5\ngreen car\tred blue\t2\n");
    // Sentence vectors under the scores above (each word once):
    let red_car = [1.0 + 6.0, -3.0];
    let blue_car = [6.0, 2.0 - 3.0];
    let red = [1.0, 0.0];
    let green = [0.5, 0.5];
    let blue = [0.0, 2.0];
    let car = [6.0, -3.0];
    let green_car = [6.5, -2.5];
    let red_blue = [1.0, 2.0];
    let cos = |u: [f64; 2], v: [f64; 2]| (u[0] * v[0] + u[1] * v[1]) / (u[0].hypot(u[1]) * v[0].hypot(v[1]));
    let sys = [cos(red_car, blue_car), cos(red, green), cos(blue, car), cos(green_car, red_blue)];
    let gold = [3.0, 4.0, 0.5, 2.0];
    let mean = |x: &[f64]| x.iter().sum::<f64>() / x.len() as f64;
    let (ms, mg) = (mean(&sys), mean(&gold));
    let cov: f64 = sys.iter().zip(&gold).map(|(a, b)| (a - ms) * (b - mg)).sum();
    let vs: f64 = sys.iter().map(|a| (a - ms).powi(2)).sum();
    let vg: f64 = gold.iter().map(|b| (b - mg).powi(2)).sum();
    let expect = cov / (vs.sqrt() * vg.sqrt());

    let run = nws(&[&"eval-sts", &"--embeddings", &emb, &"--dataset", &sts, &"--salience", &scores, &"--format", &"kv"]);
    assert_ok(&run);
    assert!((kv(&run.stdout, "toy.r") - expect).abs() < 1e-10);
    assert_eq!(kv(&run.stdout, "toy.n"), 4.0);
}

#[test]
fn training_loss_saturates_on_topic_corpus() {
    // Every sentence of a document repeats its three topic words and adds
    // fillers from a shared pool.
    use rand::{Rng, SeedableRng};
    let dir = tempfile::tempdir().unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let mut corpus = String::new();
    for d in 0..200 {
        if d > 0 {
            corpus.push('\n');
        }
        let mut topics = Vec::new();
        while topics.len() < 3 {
            let t = format!("t{}", rng.random_range(0..300));
            if !topics.contains(&t) {
                topics.push(t);
            }
        }
        for _ in 0..6 {
            let fillers: Vec<String> = (0..4).map(|_| format!("f{}", rng.random_range(0..60))).collect();
            writeln!(corpus, "{} {}", topics.join(" "), fillers.join(" ")).unwrap();
        }
    }
    let mut vectors = common::embeddings_text(360, 20, 4);
    // Rename w0..w359 to t0..t299 then f0..f59.
    vectors = vectors
        .lines()
        .enumerate()
        .map(|(i, l)| {
            let rest = l.split_once(' ').unwrap().1;
            let w = if i < 300 { format!("t{i}") } else { format!("f{}", i - 300) };
            format!("{w} {rest}\n")
        })
        .collect();
    let emb = write(dir.path(), "v.txt", &vectors);
    let corpus = write(dir.path(), "c.txt", &corpus);
    let out = dir.path().join("q.tsv");
    assert_ok(&nws(&[&"train", &"--embeddings", &emb, &"--corpus", &corpus, &"--out", &out]));

    let log = fs::read_to_string(dir.path().join("q.tsv.loss.tsv")).unwrap();
    let losses: Vec<f64> = log
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split('\t').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(losses.len(), 5);
    assert!((losses[4] - losses[3]).abs() / losses[3] < 0.05, "{losses:?}");
}

#[test]
fn psych_corr_recovers_planted_relation() {
    use rand::SeedableRng;
    use rand_distr::{Distribution, Normal};
    let ws = Workspace::new(200, 4, 3, 4);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
    let noise = Normal::new(0.0, 0.1).unwrap();
    let mut scores = format!("#nws v1 d=4 V={} seed=0\n#kind=NWS\n#config\n", ws.vocab);
    let mut csv = String::from("word,valence,arousal\n");
    for i in 0..ws.vocab {
        let q = i as f64 / 100.0;
        writeln!(scores, "{}\t{q}", common::word(i)).unwrap();
        writeln!(csv, "{},{},{}", common::word(i), q + noise.sample(&mut rng), (i * 37 % 11) as f64).unwrap();
    }
    let sal = write(ws.dir.path(), "q.tsv", &scores);
    let ratings = write(ws.dir.path(), "r.csv", &csv);
    let run = nws(&[&"psych-corr", &"--salience", &sal, &"--ratings", &ratings, &"--format", &"kv"]);
    assert_ok(&run);
    assert!(kv(&run.stdout, "valence.r") > 0.9);
    assert!(kv(&run.stdout, "arousal.r").abs() < 0.3);
}
