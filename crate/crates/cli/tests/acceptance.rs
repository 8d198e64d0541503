//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test -p lexalign-cli --test acceptance`; append criterion
//! numbers after `--` to run a subset.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use lexalign::ablation::{fit_ridge, predict, residualize, ResidualSpace, RidgeOptions};
use lexalign::design::{generate_triplets, schedule_triplets};
use lexalign::ingest::{compute_old20, load_judgments, Lexicon};
use lexalign::rdm::{behavioral_rdm, CondensedVector, Rdm, RdmKind};
use lexalign::report::{
    run_alignment_report, AblationConfig, ColumnNames, EmbeddingSource, InputPaths, PipelineConfig,
    StatsConfig,
};
use lexalign::seed;
use lexalign::stats::{partial_spearman, spearman, williams_t};
use lexalign::synth::{SynthOptions, SynthWorld};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn words(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("w{i:02}")).collect()
}

// ---------------------------------------------------------------- criterion 1

fn combinatorics() -> Outcome {
    let w = words(40);
    let triplets = generate_triplets(&w).unwrap();
    let mut pair_counts: BTreeMap<(&String, &String), usize> = BTreeMap::new();
    for t in &triplets {
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            *pair_counts.entry((&t[a], &t[b])).or_default() += 1;
        }
    }
    let all_38 = pair_counts.len() == 780 && pair_counts.values().all(|&c| c == 38);
    let schedule = schedule_triplets(&triplets, 40, 7).unwrap();
    let blocks_ok = schedule.blocks.len() == 40 && schedule.blocks.iter().all(|b| b.len() == 247);
    let mut seen: Vec<&[String; 3]> = schedule.blocks.iter().flatten().collect();
    seen.sort();
    seen.dedup();
    outcome(
        triplets.len() == 9880 && all_38 && blocks_ok && seen.len() == 9880,
        format!(
            "{} triples, {} pairs all in 38: {all_38}, {} blocks of 247: {blocks_ok}",
            triplets.len(),
            pair_counts.len(),
            schedule.blocks.len()
        ),
    )
}

// ---------------------------------------------------------------- criterion 2

/// Picks the word farthest from the mean of the other two, with a
/// participant-specific wobble on the word values.
fn simulated_odd(
    triple: &[String; 3],
    values: &BTreeMap<String, f64>,
    participant: usize,
) -> usize {
    let v: Vec<f64> = triple
        .iter()
        .enumerate()
        .map(|(k, w)| values[w] + 0.6 * ((participant * 7 + k * 3 + w.len()) as f64).sin())
        .collect();
    let score = |i: usize| {
        let others: Vec<f64> = (0..3).filter(|&j| j != i).map(|j| v[j]).collect();
        (v[i] - (others[0] + others[1]) / 2.0).abs()
    };
    (0..3)
        .max_by(|&a, &b| score(a).total_cmp(&score(b)).then(b.cmp(&a)))
        .unwrap()
}

fn brute_force_behavioral(rows: &[([String; 3], String)], a: &str, b: &str) -> f64 {
    let (mut seen, mut similar) = (0usize, 0usize);
    for (t, odd) in rows {
        if t.iter().any(|w| w == a) && t.iter().any(|w| w == b) {
            seen += 1;
            if odd != a && odd != b {
                similar += 1;
            }
        }
    }
    1.0 - similar as f64 / seen as f64
}

fn behavioral_oracle() -> Outcome {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for n in 4..=6 {
        for participants in [1, 3, 5] {
            let w = words(n);
            let mut rng = seed::rng((n * 10 + participants) as u64);
            let values: BTreeMap<String, f64> = w
                .iter()
                .map(|x| (x.clone(), rng.random_range(1.0..9.0)))
                .collect();
            let mut csv =
                String::from("session_id,word_a,word_b,word_c,odd_word,rt_ms,timestamp\n");
            let mut rows = Vec::new();
            for p in 0..participants {
                for t in generate_triplets(&w).unwrap() {
                    let odd = t[simulated_odd(&t, &values, p)].clone();
                    csv += &format!(
                        "p{p},{},{},{},{odd},500,2024-01-01T00:00:00.000Z\n",
                        t[2], t[0], t[1]
                    );
                    rows.push((t, odd));
                }
            }
            let judgments = load_judgments(csv.as_bytes()).unwrap();
            let rdm = behavioral_rdm(&judgments, &w).unwrap();
            for a in &w {
                for b in &w {
                    let got = rdm.get(rdm.index_of(a).unwrap(), rdm.index_of(b).unwrap());
                    let want = if a == b {
                        0.0
                    } else {
                        brute_force_behavioral(&rows, a, b)
                    };
                    worst = worst.max((got - want).abs());
                }
            }
            cases += 1;
        }
    }
    outcome(
        worst <= 1e-12,
        format!("{cases} word sets of 4-6 words, max |diff| {worst:e}"),
    )
}

// ---------------------------------------------------------------- criterion 3

fn naive_ranks(v: &[f64]) -> Vec<f64> {
    v.iter()
        .map(|&x| {
            let below = v.iter().filter(|&&y| y < x).count() as f64;
            let equal = v.iter().filter(|&&y| y == x).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect()
}

fn naive_pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Least-squares residual of `y` on an intercept plus `cols`, through the
/// normal equations and Gauss-Jordan elimination with partial pivoting.
fn ols_residual(y: &[f64], cols: &[Vec<f64>]) -> Vec<f64> {
    let n = y.len();
    let p = cols.len() + 1;
    let design = |i: usize, j: usize| if j == 0 { 1.0 } else { cols[j - 1][i] };
    let mut a = vec![vec![0.0; p + 1]; p];
    for r in 0..p {
        for c in 0..p {
            a[r][c] = (0..n).map(|i| design(i, r) * design(i, c)).sum();
        }
        a[r][p] = (0..n).map(|i| design(i, r) * y[i]).sum();
    }
    for c in 0..p {
        let piv = (c..p)
            .max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))
            .unwrap();
        a.swap(c, piv);
        for r in 0..p {
            if r != c {
                let f = a[r][c] / a[c][c];
                for k in c..=p {
                    a[r][k] -= f * a[c][k];
                }
            }
        }
    }
    let beta: Vec<f64> = (0..p).map(|r| a[r][p] / a[r][r]).collect();
    (0..n)
        .map(|i| y[i] - (0..p).map(|j| design(i, j) * beta[j]).sum::<f64>())
        .collect()
}

fn tied_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let levels = rng.random_range(2..8);
        let v: Vec<f64> = (0..n)
            .map(|_| rng.random_range(0..levels) as f64 * 0.5)
            .collect();
        if v.iter().any(|&x| x != v[0]) {
            return v;
        }
    }
}

fn rdm_from_condensed(values: Vec<f64>, n: usize) -> Rdm {
    let labels = words(n);
    let mut pair_labels = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            pair_labels.push((labels[i].clone(), labels[j].clone()));
        }
    }
    CondensedVector {
        labels,
        pair_labels,
        values,
        kind: RdmKind::Euclidean1d,
    }
    .expand()
    .unwrap()
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn statistics_oracles() -> Outcome {
    let mut rng = seed::rng(31);
    let mut spearman_worst = 0.0f64;
    for _ in 0..1000 {
        let n = rng.random_range(5..80);
        let x = tied_vector(&mut rng, n);
        let y = tied_vector(&mut rng, n);
        let got = spearman(&x, &y).unwrap();
        let want = naive_pearson(&naive_ranks(&x), &naive_ranks(&y));
        spearman_worst = spearman_worst.max((got - want).abs());
    }

    let (mut zero_ctrl_worst, mut ctrl_worst) = (0.0f64, 0.0f64);
    let m = 14;
    let pairs = m * (m - 1) / 2;
    for case in 0..300 {
        let yv = tied_vector(&mut rng, pairs);
        let xv = tied_vector(&mut rng, pairs);
        let y = rdm_from_condensed(yv.clone(), m);
        let x = rdm_from_condensed(xv.clone(), m);
        let k = case % 4;
        let cv: Vec<Vec<f64>> = (0..k).map(|_| tied_vector(&mut rng, pairs)).collect();
        let c: Vec<Rdm> = cv
            .iter()
            .map(|v| rdm_from_condensed(v.clone(), m))
            .collect();
        let refs: Vec<&Rdm> = c.iter().collect();
        let got = partial_spearman(&y, &x, &refs).unwrap().rho;
        if k == 0 {
            zero_ctrl_worst = zero_ctrl_worst.max((got - spearman(&yv, &xv).unwrap()).abs());
        } else {
            let rc: Vec<Vec<f64>> = cv.iter().map(|v| naive_ranks(v)).collect();
            let want = naive_pearson(
                &ols_residual(&naive_ranks(&yv), &rc),
                &ols_residual(&naive_ranks(&xv), &rc),
            );
            ctrl_worst = ctrl_worst.max((got - want).abs());
        }
    }

    let t_zero = [(0.3, 0.5), (0.7, 0.9), (-0.2, 0.1), (0.55, 0.99)]
        .iter()
        .all(|&(r, r23)| williams_t(r, r, r23, 780).unwrap().t == 0.0);

    // Type-I error: rho12 = rho13 = 0.4, rho23 = 0.5, n = 780.
    let (n, sims) = (780, 10_000);
    let (r1, r23) = (0.4f64, 0.5f64);
    // Cholesky factor of [[1,r1,r1],[r1,1,r23],[r1,r23,1]]
    let l21 = r1;
    let l22 = (1.0 - l21 * l21).sqrt();
    let l31 = r1;
    let l32 = (r23 - l31 * l21) / l22;
    let l33 = (1.0 - l31 * l31 - l32 * l32).sqrt();
    let mut rejections = 0;
    let (mut a, mut b, mut c) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for _ in 0..sims {
        for i in 0..n {
            let (z1, z2, z3) = (normal(&mut rng), normal(&mut rng), normal(&mut rng));
            a[i] = z1;
            b[i] = l21 * z1 + l22 * z2;
            c[i] = l31 * z1 + l32 * z2 + l33 * z3;
        }
        let w = williams_t(
            naive_pearson(&a, &b),
            naive_pearson(&a, &c),
            naive_pearson(&b, &c),
            n,
        )
        .unwrap();
        rejections += usize::from(w.p_value < 0.05);
    }
    let rate = rejections as f64 / sims as f64;

    let pass = spearman_worst <= 1e-12
        && zero_ctrl_worst <= 1e-12
        && ctrl_worst <= 1e-10
        && t_zero
        && (rate - 0.05).abs() <= 0.01;
    outcome(
        pass,
        format!(
            "spearman max |diff| {spearman_worst:e}; partial: no controls {zero_ctrl_worst:e}, 1-3 controls {ctrl_worst:e}; \
             t=0 at r12=r13: {t_zero}; type-I rate {rate:.4} over {sims} sims"
        ),
    )
}

// ---------------------------------------------------------------- criterion 4

fn ridge_properties() -> Outcome {
    let mut rng = seed::rng(4);
    let mut matrix = |n: usize, p: usize| -> Vec<Vec<f64>> {
        (0..n)
            .map(|_| (0..p).map(|_| normal(&mut rng)).collect())
            .collect()
    };
    let x = matrix(200, 3);
    let beta = [
        [1.0, -2.0, 0.5, 0.0, 3.0],
        [0.3, 0.3, -1.0, 2.0, 0.0],
        [-0.7, 1.5, 0.2, 1.0, -1.0],
    ];
    let y: Vec<Vec<f64>> = x
        .iter()
        .map(|r| {
            (0..5)
                .map(|j| 0.25 + (0..3).map(|k| r[k] * beta[k][j]).sum::<f64>())
                .collect()
        })
        .collect();
    let opts = RidgeOptions::default();
    let smallest = opts
        .alpha_grid
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let fit = fit_ridge(&x, &y, &opts).unwrap();
    let noiseless = fit.cv_r2 >= 0.999 && fit.alpha == smallest;
    let (noiseless_r2, noiseless_alpha) = (fit.cv_r2, fit.alpha);

    let x = matrix(120, 4);
    let noise = matrix(120, 6);
    let y: Vec<Vec<f64>> = x
        .iter()
        .zip(&noise)
        .map(|(r, e)| (0..6).map(|j| r[j % 4] * (j as f64 - 2.0) + e[j]).collect())
        .collect();
    let zero = RidgeOptions {
        alpha_grid: vec![0.0],
        ..RidgeOptions::default()
    };
    let fit0 = fit_ridge(&x, &y, &zero).unwrap();
    let resid = residualize(&fit0, &x, &y, ResidualSpace::Raw).unwrap();
    let mut ortho = 0.0f64;
    for k in 0..4 {
        for j in 0..6 {
            ortho = ortho.max(
                (0..x.len())
                    .map(|i| x[i][k] * resid[i][j])
                    .sum::<f64>()
                    .abs(),
            );
        }
    }

    let x_test = matrix(30, 4);
    let y_test = matrix(30, 6);
    let fit = fit_ridge(&x, &y, &RidgeOptions::default()).unwrap();
    let r = residualize(&fit, &x_test, &y_test, ResidualSpace::Raw).unwrap();
    let p = predict(&fit, &x_test).unwrap();
    let mut recon = 0.0f64;
    for i in 0..30 {
        for j in 0..6 {
            recon = recon.max((r[i][j] + p[i][j] - y_test[i][j]).abs());
        }
    }
    outcome(
        noiseless && ortho < 1e-8 && recon <= 1e-10,
        format!(
            "noiseless cv_r2 {noiseless_r2:.6} at alpha {noiseless_alpha} (smallest {smallest}); \
             max |X'r| {ortho:e}; reconstruction {recon:e}"
        ),
    )
}

// ---------------------------------------------------------------- criterion 5

fn read_csv(path: &Path) -> Vec<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    lines
        .map(|l| {
            header
                .iter()
                .map(|h| h.to_string())
                .zip(l.split(',').map(String::from))
                .collect()
        })
        .collect()
}

fn num(row: &BTreeMap<String, String>, key: &str) -> f64 {
    row[key]
        .parse()
        .unwrap_or_else(|_| panic!("{key}: {:?}", row[key]))
}

fn lexalign(args: &[&str]) {
    let out = Command::new(env!("CARGO_BIN_EXE_lexalign"))
        .args(args)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "lexalign {args:?} exited with {}: {}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
}

fn end_to_end() -> Outcome {
    let seeds: Vec<u64> = (1..=20).collect();
    let root = tempfile::tempdir().unwrap();
    let mut base_ok = true;
    let mut drop_ok = true;
    let mut clean_seeds = 0;
    let (mut other_total, mut other_ns) = (0, 0);
    let mut min_base = f64::INFINITY;
    let mut min_ratio = f64::INFINITY;
    let mut notes = Vec::new();
    for &s in &seeds {
        let dir = root.path().join(format!("seed{s}"));
        let d = dir.to_str().unwrap();
        lexalign(&["synth", "--out", d, "--seed", &s.to_string()]);
        lexalign(&["--config", &format!("{d}/lexalign.toml"), "report"]);
        let alignment = read_csv(&dir.join("report/alignment_long.csv"));
        let ablation = read_csv(&dir.join("report/ablation.csv"));
        for row in alignment.iter().filter(|r| r["column"] == "behavioral") {
            let rho = num(row, "rho");
            min_base = min_base.min(rho);
            if !(rho > 0.3 && num(row, "p") < 0.001 && row["method"] == "analytic") {
                base_ok = false;
                notes.push(format!("seed {s} {}: base rho {rho:.3}", row["model"]));
            }
        }
        let mut seed_clean = true;
        let models: Vec<String> = {
            let mut m: Vec<String> = ablation.iter().map(|r| r["model"].clone()).collect();
            m.dedup();
            m
        };
        for model in &models {
            let rows: Vec<_> = ablation.iter().filter(|r| &r["model"] == model).collect();
            let conc = rows
                .iter()
                .find(|r| r["feature"] == "concreteness")
                .unwrap();
            let conc_drop = num(conc, "delta");
            let largest_other = rows
                .iter()
                .filter(|r| r["feature"] != "concreteness")
                .map(|r| num(r, "delta").abs())
                .fold(0.0, f64::max);
            min_ratio = min_ratio.min(conc_drop / largest_other);
            if !(conc_drop > 0.0 && conc_drop >= 2.0 * largest_other && num(conc, "p") < 0.001) {
                drop_ok = false;
                notes.push(format!(
                    "seed {s} {model}: concreteness drop {conc_drop:.3}"
                ));
            }
            for r in rows.iter().filter(|r| r["feature"] != "concreteness") {
                other_total += 1;
                if num(r, "p") > 0.05 {
                    other_ns += 1;
                } else {
                    seed_clean = false;
                }
            }
        }
        clean_seeds += usize::from(seed_clean);
    }
    let others_ok = clean_seeds as f64 >= 0.9 * seeds.len() as f64;
    let mut detail = format!(
        "min base rho {min_base:.3}; min concreteness/other drop ratio {min_ratio:.1}; \
         seeds with every other feature p > .05: {clean_seeds}/{} (need 18); \
         other-feature ablations with p > .05: {other_ns}/{other_total}",
        seeds.len()
    );
    if !notes.is_empty() {
        detail += &format!("; {}", notes.join("; "));
    }
    outcome(base_ok && drop_ok && others_ok, detail)
}

// ---------------------------------------------------------------- criterion 6

fn full_matrix_levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for j in 0..=b.len() {
        d[0][j] = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = d[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            d[i][j] = sub.min(d[i - 1][j] + 1).min(d[i][j - 1] + 1);
        }
    }
    d[a.len()][b.len()]
}

fn random_word(rng: &mut ChaCha8Rng) -> String {
    let len = rng.random_range(3..10);
    (0..len)
        .map(|_| (b'a' + rng.random_range(0..8u8)) as char)
        .collect()
}

fn old20_oracle() -> Outcome {
    let mut rng = seed::rng(6);
    let mut entries = BTreeMap::new();
    while entries.len() < 10_000 {
        let w = random_word(&mut rng);
        let count = rng.random_range(1..5000u64);
        entries.insert(w, count);
    }
    let lexicon = Lexicon::from_counts(entries.iter().map(|(w, c)| (w.as_str(), *c))).unwrap();
    let lex_words: Vec<&String> = entries.keys().collect();
    let mut probes: Vec<String> = (0..50).map(|i| lex_words[i * 197].clone()).collect();
    while probes.len() < 100 {
        let w = random_word(&mut rng);
        if !entries.contains_key(&w) {
            probes.push(w);
        }
    }
    let mut mismatches = 0;
    for p in &probes {
        let mut d: Vec<usize> = lex_words
            .iter()
            .filter(|w| w.as_str() != p)
            .map(|w| full_matrix_levenshtein(p, w))
            .collect();
        d.sort_unstable();
        let want = d[..20].iter().sum::<usize>() as f64 / 20.0;
        if compute_old20(p, &lexicon).unwrap() != want {
            mismatches += 1;
        }
    }
    outcome(
        mismatches == 0,
        format!(
            "100 probes over {} entries, {mismatches} mismatches",
            lexicon.len()
        ),
    )
}

// ---------------------------------------------------------------- criterion 7

fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                out.insert(rel, std::fs::read(&p).unwrap());
            }
        }
    }
    out
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let world = SynthWorld::generate(&SynthOptions {
        n_test: 14,
        n_train: 120,
        n_filler: 200,
        participants: 4,
        seed: 12,
        ..SynthOptions::default()
    })
    .unwrap();
    let files = world.write(dir.path()).unwrap();
    let rel = |p: &Path| p.strip_prefix(dir.path()).unwrap().to_path_buf();
    let config = PipelineConfig {
        output_dir: "report".into(),
        seed: 5,
        embeddings: files
            .embeddings
            .iter()
            .map(|(name, p)| EmbeddingSource {
                name: name.clone(),
                path: rel(p),
                merge_duplicates: false,
            })
            .collect(),
        inputs: InputPaths {
            features: rel(&files.features),
            judgments: rel(&files.judgments),
            ratings: Some(rel(&files.ratings)),
            lexicon: None,
            train_words: Some(rel(&files.train_words)),
            test_words: None,
        },
        columns: ColumnNames::default(),
        stats: StatsConfig {
            p_method: lexalign::report::PMethodName::Permutation,
            n_perm: 500,
        },
        ablation: AblationConfig::default(),
    };
    run_alignment_report(&config, dir.path()).unwrap();
    let first = snapshot(&dir.path().join("report"));
    std::fs::remove_dir_all(dir.path().join("report")).unwrap();
    run_alignment_report(&config, dir.path()).unwrap();
    let second = snapshot(&dir.path().join("report"));
    let differing: Vec<&String> = first
        .keys()
        .chain(second.keys())
        .filter(|k| first.get(*k) != second.get(*k))
        .collect();
    let tables = first
        .keys()
        .filter(|k| k.ends_with(".csv") || k.ends_with(".svg"))
        .count();
    outcome(
        differing.is_empty() && tables > 0,
        format!(
            "{} files ({tables} tables and charts), differing: {differing:?}",
            first.len()
        ),
    )
}

// ---------------------------------------------------------------- driver

/// Number, name, check and time budget.
type Criterion = (usize, &'static str, fn() -> Outcome, Option<Duration>);

fn main() {
    let criteria: [Criterion; 7] = [
        (
            1,
            "combinatorics",
            combinatorics,
            Some(Duration::from_secs(1)),
        ),
        (
            2,
            "behavioral RDM oracle",
            behavioral_oracle,
            Some(Duration::from_secs(1)),
        ),
        (
            3,
            "statistics oracles",
            statistics_oracles,
            Some(Duration::from_secs(120)),
        ),
        (
            4,
            "ridge properties",
            ridge_properties,
            Some(Duration::from_secs(10)),
        ),
        (
            5,
            "end-to-end concreteness effect",
            end_to_end,
            Some(Duration::from_secs(300)),
        ),
        (
            6,
            "OLD20 oracle",
            old20_oracle,
            Some(Duration::from_secs(30)),
        ),
        (7, "determinism", determinism, None),
    ];
    let wanted: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    for (id, name, run, budget) in criteria {
        if !wanted.is_empty() && !wanted.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let result = std::panic::catch_unwind(run);
        let elapsed = start.elapsed();
        let (mut pass, detail) = match result {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (
                false,
                e.downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "panicked".into()),
            ),
        };
        let mut timing = format!("{:.2}s", elapsed.as_secs_f64());
        if let Some(b) = budget {
            if elapsed > b {
                pass = false;
                timing += &format!(", over the {}s budget", b.as_secs());
            }
        }
        println!(
            "criterion {id} {name}: {} ({detail}) [{timing}]",
            if pass { "PASS" } else { "FAIL" }
        );
        failed += usize::from(!pass);
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
