//! Synthetic studies with known structure.
//!
//! A world has a latent concreteness value and a small latent semantic
//! vector per word. Embeddings mix a concreteness direction, the semantic
//! vector and isotropic noise; simulated participants pick the odd word of
//! each triplet from distances in a psychological space dominated by
//! concreteness. Frequency, length and OLD20 come from random pseudo-words
//! and a Zipf lexicon, so they are independent of both.

use std::collections::HashSet;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Duration, Utc};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use thiserror::Error;

use crate::design::{generate_triplets, schedule_triplets, DesignError, TripletSchedule};
use crate::ingest::{
    old20_batch, write_judgments, write_ratings, EmbeddingTable, FeatureColumn, FeatureTable,
    IngestError, Lexicon, RatingRecord, TripletJudgment,
};
use crate::seed;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid synthetic world: {0}")]
    Invalid(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One simulated embedding source.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthModel {
    pub name: String,
    /// Scale of the concreteness direction.
    pub concreteness_weight: f64,
    /// Scale of the semantic component.
    pub semantic_weight: f64,
    /// Standard deviation of per-component noise.
    pub noise: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthOptions {
    pub n_test: usize,
    pub n_train: usize,
    /// Lexicon entries that are neither train nor test words.
    pub n_filler: usize,
    pub dim: usize,
    pub semantic_dims: usize,
    pub models: Vec<SynthModel>,
    /// Weight of standardized concreteness in the psychological space.
    pub behavior_concreteness_weight: f64,
    /// Softmax temperature of the odd-one-out choice.
    pub choice_temperature: f64,
    /// Noise of the automatic concreteness estimate, in scale points.
    pub auto_noise: f64,
    /// Noise of individual ratings, in scale points.
    pub rating_noise: f64,
    pub participants: usize,
    pub seed: u64,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            n_test: 40,
            n_train: 771,
            n_filler: 1200,
            dim: 50,
            semantic_dims: 3,
            models: vec![
                SynthModel {
                    name: "static".into(),
                    concreteness_weight: 1.0,
                    semantic_weight: 0.7,
                    noise: 1.0,
                },
                SynthModel {
                    name: "contextual".into(),
                    concreteness_weight: 0.7,
                    semantic_weight: 0.7,
                    noise: 1.2,
                },
            ],
            behavior_concreteness_weight: 1.5,
            choice_temperature: 0.3,
            auto_noise: 0.8,
            rating_noise: 1.0,
            participants: 40,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthWorld {
    pub test_words: Vec<String>,
    pub train_words: Vec<String>,
    /// Latent concreteness on the 1–9 scale, for every train and test word.
    pub true_concreteness: FeatureColumn,
    /// `concreteness` (automatic estimate), `log_frequency`, `length`,
    /// `old20` for every train and test word.
    pub features: FeatureTable,
    pub lexicon: Lexicon,
    pub embeddings: Vec<EmbeddingTable>,
    pub schedule: TripletSchedule,
    pub judgments: Vec<TripletJudgment>,
    pub ratings: Vec<RatingRecord>,
}

/// Paths written by [`SynthWorld::write`].
#[derive(Debug, Clone)]
pub struct SynthFiles {
    pub embeddings: Vec<(String, PathBuf)>,
    pub features: PathBuf,
    pub lexicon: PathBuf,
    pub judgments: PathBuf,
    pub ratings: PathBuf,
    pub train_words: PathBuf,
    pub test_words: PathBuf,
}

const ONSETS: [&str; 18] = [
    "b", "d", "f", "g", "h", "k", "l", "m", "n", "p", "r", "s", "t", "w", "z", "br", "st", "gr",
];
const VOWELS: [&str; 7] = ["a", "e", "i", "o", "u", "au", "ei"];
const CODAS: [&str; 6] = ["", "", "n", "r", "l", "sch"];

fn pseudo_words(n: usize, rng: &mut ChaCha8Rng) -> Vec<String> {
    let mut seen = HashSet::with_capacity(n);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let syllables = rng.random_range(1..=4);
        let mut w = String::new();
        for _ in 0..syllables {
            w.push_str(ONSETS.choose(rng).unwrap());
            w.push_str(VOWELS.choose(rng).unwrap());
        }
        w.push_str(CODAS.choose(rng).unwrap());
        if seen.insert(w.clone()) {
            out.push(w);
        }
    }
    out
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Softmax over `-distance / temperature` of the pair left after removing
/// each candidate: the odd word is likely the one whose partners are close.
fn choose_odd(points: [&[f64]; 3], temperature: f64, rng: &mut ChaCha8Rng) -> usize {
    let pair = [
        squared_distance(points[1], points[2]).sqrt(),
        squared_distance(points[0], points[2]).sqrt(),
        squared_distance(points[0], points[1]).sqrt(),
    ];
    let min = pair.iter().cloned().fold(f64::INFINITY, f64::min);
    let w: Vec<f64> = pair
        .iter()
        .map(|d| (-(d - min) / temperature).exp())
        .collect();
    let total: f64 = w.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (k, wk) in w.iter().enumerate() {
        if u < *wk {
            return k;
        }
        u -= wk;
    }
    2
}

impl SynthWorld {
    pub fn generate(options: &SynthOptions) -> Result<SynthWorld, SynthError> {
        let o = options;
        if o.n_test < 4 || o.models.is_empty() || o.dim == 0 || o.participants == 0 {
            return Err(SynthError::Invalid(
                "need ≥ 4 test words, one model, dim ≥ 1 and one participant".into(),
            ));
        }
        if o.choice_temperature <= 0.0 {
            return Err(SynthError::Invalid(
                "choice temperature must be positive".into(),
            ));
        }
        let n_words = o.n_test + o.n_train;
        let words = pseudo_words(n_words + o.n_filler, &mut seed::stream(o.seed, 0));
        let test_words = words[..o.n_test].to_vec();
        let train_words = words[o.n_test..n_words].to_vec();
        let studied = &words[..n_words];

        let mut rng = seed::stream(o.seed, 1);
        // test words span the scale evenly; training words are uniform
        let conc: Vec<f64> = (0..n_words)
            .map(|i| {
                if i < o.n_test {
                    let u = (i as f64 + rng.random::<f64>()) / o.n_test as f64;
                    1.0 + 8.0 * u
                } else {
                    rng.random_range(1.0..9.0)
                }
            })
            .collect();
        let mean = conc.iter().sum::<f64>() / n_words as f64;
        let sd = (conc.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / n_words as f64).sqrt();
        let cz: Vec<f64> = conc.iter().map(|c| (c - mean) / sd).collect();
        let semantic: Vec<Vec<f64>> = (0..n_words)
            .map(|_| (0..o.semantic_dims).map(|_| normal(&mut rng)).collect())
            .collect();

        let mut embeddings = Vec::with_capacity(o.models.len());
        for (m, model) in o.models.iter().enumerate() {
            let mut rng = seed::stream(o.seed, 100 + m as u64);
            let beta: Vec<f64> = (0..o.dim).map(|_| normal(&mut rng)).collect();
            let scale = 1.0 / (o.semantic_dims.max(1) as f64).sqrt();
            let mix: Vec<Vec<f64>> = (0..o.semantic_dims)
                .map(|_| (0..o.dim).map(|_| normal(&mut rng) * scale).collect())
                .collect();
            let entries = (0..n_words).map(|i| {
                let v: Vec<f64> = (0..o.dim)
                    .map(|d| {
                        let sem: f64 = (0..o.semantic_dims)
                            .map(|k| semantic[i][k] * mix[k][d])
                            .sum();
                        model.concreteness_weight * cz[i] * beta[d]
                            + model.semantic_weight * sem
                            + model.noise * normal(&mut rng)
                    })
                    .collect();
                (studied[i].clone(), v)
            });
            embeddings.push(EmbeddingTable::from_entries(
                model.name.clone(),
                entries.collect::<Vec<_>>(),
            )?);
        }

        let mut rng = seed::stream(o.seed, 2);
        let mut ranks: Vec<usize> = (1..=words.len()).collect();
        ranks.shuffle(&mut rng);
        let lexicon = Lexicon::from_counts(words.iter().zip(&ranks).map(|(w, &r)| {
            let jitter = 0.8 + 0.4 * rng.random::<f64>();
            (w.clone(), ((2e6 / r as f64) * jitter).ceil() as u64)
        }))?;

        let mut rng = seed::stream(o.seed, 3);
        let true_concreteness: FeatureColumn =
            studied.iter().cloned().zip(conc.iter().copied()).collect();
        let auto: FeatureColumn = studied
            .iter()
            .zip(&conc)
            .map(|(w, c)| {
                (
                    w.clone(),
                    (c + o.auto_noise * normal(&mut rng)).clamp(1.0, 9.0),
                )
            })
            .collect();
        let log_freq: FeatureColumn = studied
            .iter()
            .map(|w| {
                (
                    w.clone(),
                    lexicon.log_frequency(w, 1.0).expect("positive count"),
                )
            })
            .collect();
        let length: FeatureColumn = studied
            .iter()
            .map(|w| (w.clone(), crate::text::char_len(w) as f64))
            .collect();
        let old20: FeatureColumn = studied
            .iter()
            .cloned()
            .zip(old20_batch(studied, &lexicon))
            .map(|(w, r)| r.map(|v| (w, v)))
            .collect::<Result<_, _>>()?;
        let mut features = FeatureTable::new(studied.to_vec());
        features.insert_column("concreteness", auto, Some((1.0, 9.0)))?;
        features.insert_column("log_frequency", log_freq, None)?;
        features.insert_column("length", length, None)?;
        features.insert_column("old20", old20, None)?;

        let psych: Vec<Vec<f64>> = (0..o.n_test)
            .map(|i| {
                let mut p = vec![o.behavior_concreteness_weight * cz[i]];
                p.extend_from_slice(&semantic[i]);
                p
            })
            .collect();
        let index = |w: &str| test_words.iter().position(|t| t == w).expect("test word");
        let triples = generate_triplets(&test_words)?;
        let schedule = schedule_triplets(&triples, o.participants, seed::derive(o.seed, 4))?;
        let start: DateTime<Utc> =
            DateTime::from_timestamp(1_700_000_000, 0).expect("valid instant");
        let mut judgments = Vec::with_capacity(triples.len());
        let mut ratings = Vec::with_capacity(o.participants * o.n_test);
        for (slot, block) in schedule.blocks.iter().enumerate() {
            let mut rng = seed::stream(o.seed, 1000 + slot as u64);
            let session = format!("p{slot:03}");
            let mut clock = start + Duration::hours(slot as i64);
            let rt_dist: Exp<f64> = Exp::new(1.0 / 600.0).expect("positive rate");
            for t in block {
                let pts = [
                    &psych[index(&t[0])][..],
                    &psych[index(&t[1])],
                    &psych[index(&t[2])],
                ];
                let odd = choose_odd(pts, o.choice_temperature, &mut rng);
                let rt = (400.0 + rt_dist.sample(&mut rng)).round();
                clock += Duration::milliseconds(rt as i64 + 500);
                judgments.push(TripletJudgment::new(
                    session.clone(),
                    [&t[0], &t[1], &t[2]],
                    &t[odd],
                    rt,
                    clock,
                )?);
            }
            let mut order: Vec<usize> = (0..o.n_test).collect();
            order.shuffle(&mut rng);
            for i in order {
                let raw = conc[i] + o.rating_noise * normal(&mut rng);
                let rt = (500.0 + rt_dist.sample(&mut rng)).round();
                clock += Duration::milliseconds(rt as i64 + 300);
                ratings.push(RatingRecord {
                    session_id: session.clone(),
                    word: test_words[i].clone(),
                    rating: raw.round().clamp(1.0, 9.0) as u8,
                    response_time_ms: rt,
                    timestamp: clock,
                });
            }
        }

        Ok(SynthWorld {
            test_words,
            train_words,
            true_concreteness,
            features,
            lexicon,
            embeddings,
            schedule,
            judgments,
            ratings,
        })
    }

    /// Writes every input of a report run into `dir`.
    pub fn write(&self, dir: &Path) -> Result<SynthFiles, SynthError> {
        fs::create_dir_all(dir)?;
        let create = |name: &str| -> Result<(PathBuf, BufWriter<fs::File>), SynthError> {
            let path = dir.join(name);
            Ok((path.clone(), BufWriter::new(fs::File::create(path)?)))
        };
        let mut files = Vec::new();
        for table in &self.embeddings {
            let (path, out) = create(&format!("{}.vec", table.source_name()))?;
            table.write(out)?;
            files.push((table.source_name().to_string(), path));
        }
        let (features, out) = create("features.csv")?;
        self.features.write(out)?;
        let (lexicon, out) = create("lexicon.csv")?;
        self.lexicon.write(out)?;
        let (judgments, out) = create("judgments.csv")?;
        write_judgments(out, &self.judgments)?;
        let (ratings, out) = create("ratings.csv")?;
        write_ratings(out, &self.ratings)?;
        let train_words = dir.join("train_words.txt");
        fs::write(&train_words, self.train_words.join("\n") + "\n")?;
        let test_words = dir.join("test_words.txt");
        fs::write(&test_words, self.test_words.join("\n") + "\n")?;
        Ok(SynthFiles {
            embeddings: files,
            features,
            lexicon,
            judgments,
            ratings,
            train_words,
            test_words,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdm::{behavioral_rdm, embedding_rdm, feature_rdm};
    use crate::stats::{pearson, rsa, PValueMethod};

    fn small() -> SynthOptions {
        SynthOptions {
            n_test: 12,
            n_train: 60,
            n_filler: 100,
            participants: 5,
            ..Default::default()
        }
    }

    #[test]
    fn shapes() {
        let w = SynthWorld::generate(&small()).unwrap();
        assert_eq!(w.test_words.len(), 12);
        assert_eq!(w.train_words.len(), 60);
        assert_eq!(w.lexicon.len(), 172);
        assert_eq!(w.judgments.len(), 220);
        assert_eq!(w.ratings.len(), 60);
        assert_eq!(w.embeddings.len(), 2);
        assert!(w.embeddings.iter().all(|e| e.len() == 72 && e.dim() == 50));
        assert_eq!(
            w.features.feature_names(),
            ["concreteness", "log_frequency", "length", "old20"]
        );
        assert!(w.ratings.iter().all(|r| (1..=9).contains(&r.rating)));
    }

    #[test]
    fn deterministic_in_seed() {
        let a = SynthWorld::generate(&small()).unwrap();
        let b = SynthWorld::generate(&small()).unwrap();
        assert_eq!(a.judgments, b.judgments);
        assert_eq!(a.embeddings, b.embeddings);
        let c = SynthWorld::generate(&SynthOptions { seed: 1, ..small() }).unwrap();
        assert_ne!(a.test_words, c.test_words);
    }

    #[test]
    fn default_world_carries_the_intended_signal() {
        let w = SynthWorld::generate(&SynthOptions::default()).unwrap();
        assert_eq!(w.judgments.len(), 9880);
        let behavior = behavioral_rdm(&w.judgments, &w.test_words).unwrap();
        let conc = feature_rdm(&w.true_concreteness, &w.test_words).unwrap();
        assert!(rsa(&behavior, &conc, PValueMethod::Analytic).unwrap().rho > 0.5);
        let model = embedding_rdm(&w.embeddings[0], &w.test_words).unwrap();
        let r = rsa(&behavior, &model, PValueMethod::Analytic).unwrap();
        assert!(r.rho > 0.3 && r.p_value < 0.001, "{r:?}");

        let words = w.features.words();
        let col = |name: &str| -> Vec<f64> {
            words
                .iter()
                .map(|x| w.features.value(name, x).unwrap())
                .collect()
        };
        let c = col("concreteness");
        let truth: Vec<f64> = words.iter().map(|x| w.true_concreteness[x]).collect();
        assert!(pearson(&c, &truth).unwrap() > 0.9);
        for other in ["log_frequency", "length", "old20"] {
            assert!(
                pearson(&col(other), &truth).unwrap().abs() < 0.15,
                "{other}"
            );
        }
    }

    #[test]
    fn writes_loadable_files() {
        let w = SynthWorld::generate(&small()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let files = w.write(dir.path()).unwrap();
        let js = crate::ingest::load_judgments(fs::File::open(&files.judgments).unwrap()).unwrap();
        assert_eq!(js, w.judgments);
        let rs = crate::ingest::load_ratings(fs::File::open(&files.ratings).unwrap()).unwrap();
        assert_eq!(rs, w.ratings);
        let lex = crate::ingest::load_lexicon(fs::File::open(&files.lexicon).unwrap()).unwrap();
        assert_eq!(lex, w.lexicon);
        let reader = std::io::BufReader::new(fs::File::open(&files.embeddings[0].1).unwrap());
        let emb = crate::ingest::parse_embedding_file(reader, "static", false).unwrap();
        assert_eq!(emb.len(), 72);
    }
}
