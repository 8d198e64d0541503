use std::collections::HashSet;
use std::fmt;
use std::io::{Read, Write};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::cluster::mean_sd;
use super::{ClusterModel, DesignError};
use crate::ingest::FeatureTable;
use crate::text::char_len;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StimulusGroup {
    Concrete,
    Abstract,
    Frequent,
    Infrequent,
    Central,
}

impl StimulusGroup {
    pub const ALL: [StimulusGroup; 5] = [
        StimulusGroup::Concrete,
        StimulusGroup::Abstract,
        StimulusGroup::Frequent,
        StimulusGroup::Infrequent,
        StimulusGroup::Central,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StimulusGroup::Concrete => "concrete",
            StimulusGroup::Abstract => "abstract",
            StimulusGroup::Frequent => "frequent",
            StimulusGroup::Infrequent => "infrequent",
            StimulusGroup::Central => "central",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|g| g.as_str() == s)
    }
}

impl fmt::Display for StimulusGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Feature column names used during selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionColumns {
    pub concreteness: String,
    pub frequency: String,
    /// Falls back to the character count when the table has no such column.
    pub length: String,
    pub old20: String,
}

impl Default for SelectionColumns {
    fn default() -> Self {
        SelectionColumns {
            concreteness: "concreteness".into(),
            frequency: "log_frequency".into(),
            length: "length".into(),
            old20: "old20".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionConfig {
    pub group_size: usize,
    /// Extremity cut, in cluster standard deviations.
    pub sd_threshold: f64,
    /// Inclusive character-length bounds.
    pub length_range: (usize, usize),
    /// Matching window around the cluster mean, in standard deviations.
    pub matching_tolerance_sd: f64,
    pub columns: SelectionColumns,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig {
            group_size: 8,
            sd_threshold: 1.0,
            length_range: (5, 9),
            matching_tolerance_sd: 1.0,
            columns: SelectionColumns::default(),
        }
    }
}

impl SelectionConfig {
    fn validate(&self) -> Result<(), DesignError> {
        let (lo, hi) = self.length_range;
        if self.group_size == 0 {
            return Err(DesignError::InvalidParameter(
                "group_size must be ≥ 1".into(),
            ));
        }
        if lo == 0 || lo > hi {
            return Err(DesignError::InvalidParameter(format!(
                "length range {lo}..={hi} must be positive and ordered"
            )));
        }
        if !(self.sd_threshold >= 0.0 && self.matching_tolerance_sd >= 0.0) {
            return Err(DesignError::InvalidParameter(
                "thresholds must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

/// The five disjoint stimulus groups.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StimulusSet {
    pub concrete: Vec<String>,
    pub r#abstract: Vec<String>,
    pub frequent: Vec<String>,
    pub infrequent: Vec<String>,
    pub central: Vec<String>,
}

impl StimulusSet {
    /// Builds a set from explicit groups (e.g. a hand-picked list).
    pub fn from_groups(
        concrete: Vec<String>,
        r#abstract: Vec<String>,
        frequent: Vec<String>,
        infrequent: Vec<String>,
        central: Vec<String>,
    ) -> Result<Self, DesignError> {
        let set = StimulusSet {
            concrete,
            r#abstract,
            frequent,
            infrequent,
            central,
        };
        set.validate()?;
        Ok(set)
    }

    pub fn group(&self, group: StimulusGroup) -> &[String] {
        match group {
            StimulusGroup::Concrete => &self.concrete,
            StimulusGroup::Abstract => &self.r#abstract,
            StimulusGroup::Frequent => &self.frequent,
            StimulusGroup::Infrequent => &self.infrequent,
            StimulusGroup::Central => &self.central,
        }
    }

    fn group_mut(&mut self, group: StimulusGroup) -> &mut Vec<String> {
        match group {
            StimulusGroup::Concrete => &mut self.concrete,
            StimulusGroup::Abstract => &mut self.r#abstract,
            StimulusGroup::Frequent => &mut self.frequent,
            StimulusGroup::Infrequent => &mut self.infrequent,
            StimulusGroup::Central => &mut self.central,
        }
    }

    /// All words, group by group.
    pub fn words(&self) -> Vec<String> {
        StimulusGroup::ALL
            .iter()
            .flat_map(|g| self.group(*g).iter().cloned())
            .collect()
    }

    pub fn len(&self) -> usize {
        StimulusGroup::ALL
            .iter()
            .map(|g| self.group(*g).len())
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Groups are nonempty, equally sized and pairwise disjoint.
    pub fn validate(&self) -> Result<(), DesignError> {
        let size = self.concrete.len();
        if size == 0 {
            return Err(DesignError::InvalidStimulusSet("empty group".into()));
        }
        for g in StimulusGroup::ALL {
            if self.group(g).len() != size {
                return Err(DesignError::InvalidStimulusSet(format!(
                    "group {g} has {} words, expected {size}",
                    self.group(g).len()
                )));
            }
        }
        let mut seen = HashSet::new();
        for w in self.words() {
            if !seen.insert(w.clone()) {
                return Err(DesignError::InvalidStimulusSet(format!(
                    "{w:?} appears in more than one group"
                )));
            }
        }
        Ok(())
    }
}

struct Candidate {
    word: String,
    concreteness: f64,
    frequency: f64,
    length: usize,
    old20: f64,
    centroid_distance: f64,
}

struct ClusterStats {
    concreteness: (f64, f64),
    frequency: (f64, f64),
    old20: (f64, f64),
}

fn within(value: f64, (mean, sd): (f64, f64), tolerance: f64) -> bool {
    (value - mean).abs() <= tolerance * sd
}

/// Greedy pick: shuffle with the seed, stable-sort by score (descending),
/// take the first `size` that are still free.
fn take_group(
    group: StimulusGroup,
    mut eligible: Vec<(&Candidate, f64)>,
    size: usize,
    taken: &mut HashSet<String>,
    seed: u64,
) -> Result<Vec<String>, DesignError> {
    eligible.retain(|(c, _)| !taken.contains(&c.word));
    if eligible.len() < size {
        return Err(DesignError::Infeasible {
            group,
            candidates: eligible.len(),
            needed: size,
        });
    }
    eligible.shuffle(&mut crate::seed::stream(seed, group as u64));
    eligible.sort_by(|a, b| b.1.total_cmp(&a.1));
    let chosen: Vec<String> = eligible
        .into_iter()
        .take(size)
        .map(|(c, _)| c.word.clone())
        .collect();
    taken.extend(chosen.iter().cloned());
    Ok(chosen)
}

/// Automated version of the manual stimulus pick from one cluster.
///
/// * concrete / abstract: concreteness beyond `mean ± sd_threshold·sd` of
///   the cluster, length within `length_range`, frequency and OLD20 within
///   `matching_tolerance_sd` of the cluster means;
/// * frequent / infrequent: the same on log frequency, matched on
///   concreteness, length and OLD20;
/// * central: the words nearest the cluster centroid not chosen yet.
///
/// Candidates are ranked by how far they lie beyond the threshold (most
/// extreme first), seed-shuffled beforehand to break ties.
pub fn select_stimuli(
    model: &ClusterModel,
    cluster_id: usize,
    features: &FeatureTable,
    config: &SelectionConfig,
    seed: u64,
) -> Result<StimulusSet, DesignError> {
    config.validate()?;
    let cols = &config.columns;
    let lookup = |feature: &str, word: &str| -> Result<f64, DesignError> {
        features
            .value(feature, word)
            .ok_or_else(|| DesignError::MissingFeature {
                word: word.to_string(),
                feature: feature.to_string(),
            })
    };
    let mut candidates = Vec::new();
    for word in model.members(cluster_id) {
        let length = match features.column(&cols.length) {
            Some(col) => col.get(&word).map(|v| v.round() as usize).ok_or_else(|| {
                DesignError::MissingFeature {
                    word: word.clone(),
                    feature: cols.length.clone(),
                }
            })?,
            None => char_len(&word),
        };
        candidates.push(Candidate {
            concreteness: lookup(&cols.concreteness, &word)?,
            frequency: lookup(&cols.frequency, &word)?,
            old20: lookup(&cols.old20, &word)?,
            centroid_distance: model.centroid_distance(&word).unwrap_or(f64::INFINITY),
            length,
            word,
        });
    }
    let column = |f: fn(&Candidate) -> f64| -> Vec<f64> { candidates.iter().map(f).collect() };
    let stats = ClusterStats {
        concreteness: mean_sd(&column(|c| c.concreteness)),
        frequency: mean_sd(&column(|c| c.frequency)),
        old20: mean_sd(&column(|c| c.old20)),
    };
    let t = config.sd_threshold;
    let tol = config.matching_tolerance_sd;
    let (lo, hi) = config.length_range;
    let length_ok = |c: &Candidate| c.length >= lo && c.length <= hi;

    let mut taken = HashSet::new();
    let mut set = StimulusSet {
        concrete: vec![],
        r#abstract: vec![],
        frequent: vec![],
        infrequent: vec![],
        central: vec![],
    };
    for group in StimulusGroup::ALL {
        let eligible: Vec<(&Candidate, f64)> = candidates
            .iter()
            .filter_map(|c| {
                let (cm, csd) = stats.concreteness;
                let (fm, fsd) = stats.frequency;
                let conc_matched = || within(c.concreteness, stats.concreteness, tol);
                let freq_matched = || within(c.frequency, stats.frequency, tol);
                let old_matched = || within(c.old20, stats.old20, tol);
                let score = match group {
                    StimulusGroup::Concrete => c.concreteness - (cm + t * csd),
                    StimulusGroup::Abstract => (cm - t * csd) - c.concreteness,
                    StimulusGroup::Frequent => c.frequency - (fm + t * fsd),
                    StimulusGroup::Infrequent => (fm - t * fsd) - c.frequency,
                    StimulusGroup::Central => -c.centroid_distance,
                };
                let ok = match group {
                    StimulusGroup::Concrete | StimulusGroup::Abstract => {
                        score > 0.0 && length_ok(c) && freq_matched() && old_matched()
                    }
                    StimulusGroup::Frequent | StimulusGroup::Infrequent => {
                        score > 0.0 && length_ok(c) && conc_matched() && old_matched()
                    }
                    StimulusGroup::Central => true,
                };
                ok.then_some((c, score))
            })
            .collect();
        *set.group_mut(group) = take_group(group, eligible, config.group_size, &mut taken, seed)?;
    }
    Ok(set)
}

pub fn write_stimulus_csv<W: Write>(set: &StimulusSet, out: W) -> Result<(), DesignError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["word", "group"])?;
    for g in StimulusGroup::ALL {
        for word in set.group(g) {
            w.write_record([word.as_str(), g.as_str()])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_stimulus_csv<R: Read>(reader: R) -> Result<StimulusSet, DesignError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut set = StimulusSet {
        concrete: vec![],
        r#abstract: vec![],
        frequent: vec![],
        infrequent: vec![],
        central: vec![],
    };
    for (idx, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = idx + 1;
        let (Some(word), Some(group)) = (rec.get(0), rec.get(1)) else {
            return Err(DesignError::Parse {
                row,
                message: "expected word and group".into(),
            });
        };
        let group = StimulusGroup::parse(group).ok_or_else(|| DesignError::Parse {
            row,
            message: format!("unknown group {group:?}"),
        })?;
        set.group_mut(group).push(crate::text::normalize(word));
    }
    set.validate()?;
    Ok(set)
}
