use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use chrono::{DateTime, Utc};
use lexalign::design::TripletSchedule;
use lexalign::ingest::{
    write_judgments, write_ratings, RatingRecord, TripletJudgment, RATING_SCALE,
};
use lexalign::seed;
use lexalign::text::normalize;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const WAL_FILE: &str = "wal.jsonl";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Triplets,
    Ratings,
    Done,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Session {
    pub session_id: String,
    pub participant_slot: usize,
    pub phase: Phase,
    pub cursor: usize,
    pub created_at: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Trial {
    OddOneOut {
        trial_id: String,
        /// Display order, shuffled per trial.
        words: [String; 3],
        index: usize,
        total: usize,
    },
    Rating {
        trial_id: String,
        word: String,
        scale_min: u8,
        scale_max: u8,
        index: usize,
        total: usize,
    },
    Complete {
        session_id: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChoiceRecord {
    pub session_id: String,
    pub trial_id: String,
    /// Canonical triple.
    pub triplet: [String; 3],
    /// Order the words were shown in.
    pub display: [String; 3],
    pub display_seed: u64,
    pub chosen: String,
    pub response_time_ms: f64,
    pub server_received_at: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingEntry {
    pub session_id: String,
    pub trial_id: String,
    pub word: String,
    pub rating: u8,
    pub response_time_ms: f64,
    pub server_received_at: DateTime<Utc>,
}

/// Reply to an accepted (or replayed) submission.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ack {
    pub session_id: String,
    pub trial_id: String,
    /// True when the trial had already been recorded; nothing was stored.
    pub duplicate: bool,
    pub recorded_at: DateTime<Utc>,
    pub phase: Phase,
    pub cursor: usize,
}

#[derive(Debug, Error)]
pub enum StudyError {
    #[error("study full: every participant slot is claimed")]
    StudyFull,
    #[error("unknown session {0:?}")]
    UnknownSession(String),
    #[error("session {0:?} was released")]
    Released(String),
    #[error("trial {got:?} is not the current trial ({expected:?})")]
    StaleTrial {
        expected: Option<String>,
        got: String,
    },
    #[error("session is in the {0:?} phase")]
    WrongPhase(Phase),
    #[error("session is complete")]
    SessionComplete,
    #[error("{0:?} is not one of the trial's words")]
    InvalidChoice(String),
    #[error("rating must be an integer, got {0}")]
    RatingType(String),
    #[error("rating {0} lies outside 1..9")]
    RatingRange(i64),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("storage failure: {0}")]
    Storage(#[from] std::io::Error),
    #[error("{}: line {line}: {message}", .path.display())]
    Corrupt {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{0}")]
    Mismatch(String),
}

impl StudyError {
    /// Machine-readable code carried in error bodies.
    pub fn code(&self) -> &'static str {
        match self {
            StudyError::StudyFull => "study_full",
            StudyError::UnknownSession(_) => "unknown_session",
            StudyError::Released(_) => "session_released",
            StudyError::StaleTrial { .. } => "stale_trial",
            StudyError::WrongPhase(_) => "wrong_phase",
            StudyError::SessionComplete => "session_complete",
            StudyError::InvalidChoice(_) => "invalid_choice",
            StudyError::RatingType(_) => "rating_not_integer",
            StudyError::RatingRange(_) => "rating_out_of_range",
            StudyError::InvalidRequest(_) => "invalid_request",
            StudyError::Storage(_) => "storage_failure",
            StudyError::Corrupt { .. } => "corrupt_log",
            StudyError::Mismatch(_) => "study_mismatch",
        }
    }

    pub fn http_status(&self) -> u16 {
        match self {
            StudyError::UnknownSession(_) => 404,
            StudyError::Released(_) => 410,
            StudyError::StudyFull
            | StudyError::StaleTrial { .. }
            | StudyError::WrongPhase(_)
            | StudyError::SessionComplete => 409,
            StudyError::InvalidChoice(_)
            | StudyError::RatingType(_)
            | StudyError::RatingRange(_) => 422,
            StudyError::InvalidRequest(_) => 400,
            StudyError::Storage(_) | StudyError::Corrupt { .. } | StudyError::Mismatch(_) => 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
enum Event {
    Study {
        seed: u64,
        slots: usize,
        fingerprint: u64,
    },
    SessionCreated {
        session_id: String,
        slot: usize,
        created_at: DateTime<Utc>,
    },
    Choice(ChoiceRecord),
    Rating(RatingEntry),
    Released {
        session_id: String,
        at: DateTime<Utc>,
    },
}

#[derive(Debug, Clone)]
struct SessionState {
    slot: usize,
    phase: Phase,
    cursor: usize,
    created_at: DateTime<Utc>,
    released: bool,
    choices: Vec<ChoiceRecord>,
    ratings: Vec<RatingEntry>,
}

#[derive(Debug, Default)]
struct State {
    sessions: HashMap<String, SessionState>,
    /// Session ids in creation order.
    order: Vec<String>,
    slots: Vec<Option<String>>,
}

struct Inner {
    state: State,
    wal: File,
}

/// One running study: schedule, rating words and the durable session log.
///
/// All operations take one lock, so slot claims are atomic, each session
/// has a single writer and exports see a consistent snapshot. Every
/// accepted record is appended to the log and flushed to disk before the
/// caller is acknowledged; reopening a data directory replays the log.
pub struct Study {
    schedule: TripletSchedule,
    rating_words: Vec<String>,
    seed: u64,
    wal_path: PathBuf,
    inner: Mutex<Inner>,
}

fn fingerprint(schedule: &TripletSchedule, words: &[String]) -> u64 {
    let mut h = seed::mix(schedule.blocks.len() as u64);
    let mut feed = |s: &str| {
        for b in s.bytes() {
            h = seed::mix(h ^ u64::from(b));
        }
        h = seed::mix(h ^ 0xff);
    };
    for block in &schedule.blocks {
        for t in block {
            t.iter().for_each(|w| feed(w));
        }
        feed("|");
    }
    words.iter().for_each(|w| feed(w));
    h
}

fn trial_id(prefix: char, cursor: usize) -> String {
    format!("{prefix}{cursor}")
}

impl Study {
    /// Opens (or creates) the study stored in `data_dir`. A log written for
    /// a different schedule, word list or seed is refused.
    pub fn open(
        schedule: TripletSchedule,
        rating_words: Vec<String>,
        seed: u64,
        data_dir: &Path,
    ) -> Result<Study, StudyError> {
        fs::create_dir_all(data_dir)?;
        let wal_path = data_dir.join(WAL_FILE);
        let mut wal = OpenOptions::new()
            .read(true)
            .append(true)
            .create(true)
            .open(&wal_path)?;
        let header = Event::Study {
            seed,
            slots: schedule.blocks.len(),
            fingerprint: fingerprint(&schedule, &rating_words),
        };
        let study = Study {
            rating_words,
            seed,
            wal_path: wal_path.clone(),
            inner: Mutex::new(Inner {
                state: State {
                    slots: vec![None; schedule.blocks.len()],
                    ..Default::default()
                },
                wal: wal.try_clone()?,
            }),
            schedule,
        };
        let events = read_log(&wal_path, &mut wal)?;
        let mut inner = study.inner.lock().expect("fresh lock");
        match events.first() {
            None => append(&mut inner.wal, &header)?,
            Some(first) if *first == header => {}
            Some(_) => {
                return Err(StudyError::Mismatch(format!(
                    "{} was written for a different schedule, word list or seed",
                    wal_path.display()
                )))
            }
        }
        for (i, e) in events.into_iter().enumerate().skip(1) {
            study
                .apply(&mut inner.state, e)
                .map_err(|e| StudyError::Corrupt {
                    path: wal_path.clone(),
                    line: i + 1,
                    message: e.to_string(),
                })?;
        }
        drop(inner);
        Ok(study)
    }

    pub fn schedule(&self) -> &TripletSchedule {
        &self.schedule
    }

    pub fn rating_words(&self) -> &[String] {
        &self.rating_words
    }

    pub fn wal_path(&self) -> &Path {
        &self.wal_path
    }

    fn block_len(&self, slot: usize) -> usize {
        self.schedule.blocks[slot].len()
    }

    fn phase_after(&self, slot: usize, phase: Phase, cursor: usize) -> (Phase, usize) {
        match phase {
            Phase::Triplets if cursor >= self.block_len(slot) => {
                self.phase_after(slot, Phase::Ratings, 0)
            }
            Phase::Ratings if cursor >= self.rating_words.len() => (Phase::Done, 0),
            p => (p, cursor),
        }
    }

    fn display_seed(&self, slot: usize, cursor: usize) -> u64 {
        seed::derive(self.seed, ((slot as u64) << 32) | cursor as u64)
    }

    fn display_order(&self, slot: usize, cursor: usize) -> ([String; 3], u64) {
        let s = self.display_seed(slot, cursor);
        let mut words = self.schedule.blocks[slot][cursor].clone();
        words.shuffle(&mut seed::rng(s));
        (words, s)
    }

    /// Position of the `cursor`-th rating word for `slot`.
    fn rating_word(&self, slot: usize, cursor: usize) -> &str {
        let mut order: Vec<usize> = (0..self.rating_words.len()).collect();
        order.shuffle(&mut seed::stream(self.seed, (1u64 << 48) | slot as u64));
        &self.rating_words[order[cursor]]
    }

    /// State transition shared by live operations and log replay.
    fn apply(&self, state: &mut State, event: Event) -> Result<(), StudyError> {
        match event {
            Event::Study { .. } => Err(StudyError::InvalidRequest("repeated study header".into())),
            Event::SessionCreated {
                session_id,
                slot,
                created_at,
            } => {
                if slot >= state.slots.len() || state.slots[slot].is_some() {
                    return Err(StudyError::InvalidRequest(format!(
                        "slot {slot} is not free"
                    )));
                }
                let (phase, cursor) = self.phase_after(slot, Phase::Triplets, 0);
                state.slots[slot] = Some(session_id.clone());
                state.order.push(session_id.clone());
                state.sessions.insert(
                    session_id,
                    SessionState {
                        slot,
                        phase,
                        cursor,
                        created_at,
                        released: false,
                        choices: Vec::new(),
                        ratings: Vec::new(),
                    },
                );
                Ok(())
            }
            Event::Choice(rec) => {
                let s = state
                    .sessions
                    .get_mut(&rec.session_id)
                    .ok_or_else(|| StudyError::UnknownSession(rec.session_id.clone()))?;
                if s.phase != Phase::Triplets || rec.trial_id != trial_id('t', s.cursor) {
                    return Err(StudyError::InvalidRequest(format!(
                        "out-of-order choice {}",
                        rec.trial_id
                    )));
                }
                s.choices.push(rec);
                let (phase, cursor) = self.phase_after(s.slot, Phase::Triplets, s.cursor + 1);
                s.phase = phase;
                s.cursor = cursor;
                Ok(())
            }
            Event::Rating(rec) => {
                let s = state
                    .sessions
                    .get_mut(&rec.session_id)
                    .ok_or_else(|| StudyError::UnknownSession(rec.session_id.clone()))?;
                if s.phase != Phase::Ratings || rec.trial_id != trial_id('r', s.cursor) {
                    return Err(StudyError::InvalidRequest(format!(
                        "out-of-order rating {}",
                        rec.trial_id
                    )));
                }
                s.ratings.push(rec);
                let (phase, cursor) = self.phase_after(s.slot, Phase::Ratings, s.cursor + 1);
                s.phase = phase;
                s.cursor = cursor;
                Ok(())
            }
            Event::Released { session_id, .. } => {
                let s = state
                    .sessions
                    .get_mut(&session_id)
                    .ok_or_else(|| StudyError::UnknownSession(session_id.clone()))?;
                s.released = true;
                state.slots[s.slot] = None;
                Ok(())
            }
        }
    }

    fn commit(&self, inner: &mut Inner, event: Event) -> Result<(), StudyError> {
        append(&mut inner.wal, &event)?;
        self.apply(&mut inner.state, event)
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, Inner> {
        self.inner.lock().unwrap_or_else(|p| p.into_inner())
    }

    /// Claims the lowest free participant slot.
    pub fn create_session(&self) -> Result<Session, StudyError> {
        let mut inner = self.lock();
        let slot = inner
            .state
            .slots
            .iter()
            .position(Option::is_none)
            .ok_or(StudyError::StudyFull)?;
        let session_id = uuid::Uuid::new_v4().simple().to_string();
        let created_at = Utc::now();
        self.commit(
            &mut inner,
            Event::SessionCreated {
                session_id: session_id.clone(),
                slot,
                created_at,
            },
        )?;
        let s = &inner.state.sessions[&session_id];
        Ok(Session {
            session_id,
            participant_slot: slot,
            phase: s.phase,
            cursor: s.cursor,
            created_at,
        })
    }

    fn session<'a>(&self, state: &'a State, id: &str) -> Result<&'a SessionState, StudyError> {
        let s = state
            .sessions
            .get(id)
            .ok_or_else(|| StudyError::UnknownSession(id.to_string()))?;
        if s.released {
            return Err(StudyError::Released(id.to_string()));
        }
        Ok(s)
    }

    pub fn session_info(&self, session_id: &str) -> Result<Session, StudyError> {
        let inner = self.lock();
        let s = self.session(&inner.state, session_id)?;
        Ok(Session {
            session_id: session_id.to_string(),
            participant_slot: s.slot,
            phase: s.phase,
            cursor: s.cursor,
            created_at: s.created_at,
        })
    }

    /// The session's current trial. Repeated calls return the same trial
    /// until it is answered.
    pub fn next_trial(&self, session_id: &str) -> Result<Trial, StudyError> {
        let inner = self.lock();
        let s = self.session(&inner.state, session_id)?;
        Ok(match s.phase {
            Phase::Triplets => Trial::OddOneOut {
                trial_id: trial_id('t', s.cursor),
                words: self.display_order(s.slot, s.cursor).0,
                index: s.cursor + 1,
                total: self.block_len(s.slot),
            },
            Phase::Ratings => Trial::Rating {
                trial_id: trial_id('r', s.cursor),
                word: self.rating_word(s.slot, s.cursor).to_string(),
                scale_min: RATING_SCALE.0,
                scale_max: RATING_SCALE.1,
                index: s.cursor + 1,
                total: self.rating_words.len(),
            },
            Phase::Done => Trial::Complete {
                session_id: session_id.to_string(),
            },
        })
    }

    fn check_rt(rt_ms: f64) -> Result<(), StudyError> {
        if rt_ms.is_finite() && rt_ms >= 0.0 {
            Ok(())
        } else {
            Err(StudyError::InvalidRequest(format!(
                "rt_ms must be a nonnegative number, got {rt_ms}"
            )))
        }
    }

    fn ack(
        &self,
        session_id: &str,
        trial_id: &str,
        s: &SessionState,
        duplicate: bool,
        at: DateTime<Utc>,
    ) -> Ack {
        Ack {
            session_id: session_id.to_string(),
            trial_id: trial_id.to_string(),
            duplicate,
            recorded_at: at,
            phase: s.phase,
            cursor: s.cursor,
        }
    }

    /// Records the odd word of the current triplet trial. Resubmitting an
    /// already recorded trial returns its original acknowledgement.
    pub fn submit_choice(
        &self,
        session_id: &str,
        trial: &str,
        chosen: &str,
        rt_ms: f64,
    ) -> Result<Ack, StudyError> {
        let mut inner = self.lock();
        let s = self.session(&inner.state, session_id)?;
        if let Some(prev) = s.choices.iter().find(|c| c.trial_id == trial) {
            return Ok(self.ack(session_id, trial, s, true, prev.server_received_at));
        }
        match s.phase {
            Phase::Triplets => {}
            Phase::Done => return Err(StudyError::SessionComplete),
            p => return Err(StudyError::WrongPhase(p)),
        }
        let current = trial_id('t', s.cursor);
        if trial != current {
            return Err(StudyError::StaleTrial {
                expected: Some(current),
                got: trial.to_string(),
            });
        }
        Self::check_rt(rt_ms)?;
        let chosen = normalize(chosen);
        let triplet = self.schedule.blocks[s.slot][s.cursor].clone();
        if !triplet.contains(&chosen) {
            return Err(StudyError::InvalidChoice(chosen));
        }
        let (display, display_seed) = self.display_order(s.slot, s.cursor);
        let now = Utc::now();
        self.commit(
            &mut inner,
            Event::Choice(ChoiceRecord {
                session_id: session_id.to_string(),
                trial_id: trial.to_string(),
                triplet,
                display,
                display_seed,
                chosen,
                response_time_ms: rt_ms,
                server_received_at: now,
            }),
        )?;
        let s = &inner.state.sessions[session_id];
        Ok(self.ack(session_id, trial, s, false, now))
    }

    /// Records a rating for the current rating trial. `rating` is the raw
    /// JSON value so that non-integers are told apart from out-of-range
    /// integers.
    pub fn submit_rating(
        &self,
        session_id: &str,
        trial: &str,
        rating: &serde_json::Value,
        rt_ms: f64,
    ) -> Result<Ack, StudyError> {
        let mut inner = self.lock();
        let s = self.session(&inner.state, session_id)?;
        if let Some(prev) = s.ratings.iter().find(|r| r.trial_id == trial) {
            return Ok(self.ack(session_id, trial, s, true, prev.server_received_at));
        }
        match s.phase {
            Phase::Ratings => {}
            Phase::Done => return Err(StudyError::SessionComplete),
            p => return Err(StudyError::WrongPhase(p)),
        }
        let current = trial_id('r', s.cursor);
        if trial != current {
            return Err(StudyError::StaleTrial {
                expected: Some(current),
                got: trial.to_string(),
            });
        }
        let value = rating
            .as_i64()
            .ok_or_else(|| StudyError::RatingType(rating.to_string()))?;
        if !(i64::from(RATING_SCALE.0)..=i64::from(RATING_SCALE.1)).contains(&value) {
            return Err(StudyError::RatingRange(value));
        }
        Self::check_rt(rt_ms)?;
        let word = self.rating_word(s.slot, s.cursor).to_string();
        let now = Utc::now();
        self.commit(
            &mut inner,
            Event::Rating(RatingEntry {
                session_id: session_id.to_string(),
                trial_id: trial.to_string(),
                word,
                rating: value as u8,
                response_time_ms: rt_ms,
                server_received_at: now,
            }),
        )?;
        let s = &inner.state.sessions[session_id];
        Ok(self.ack(session_id, trial, s, false, now))
    }

    /// Frees the slot of an abandoned session so a new participant can take
    /// it. The released session's records stay in the log but leave the
    /// exports. Completed sessions cannot be released.
    pub fn release(&self, session_id: &str) -> Result<Session, StudyError> {
        let mut inner = self.lock();
        let s = inner
            .state
            .sessions
            .get(session_id)
            .ok_or_else(|| StudyError::UnknownSession(session_id.to_string()))?;
        let info = Session {
            session_id: session_id.to_string(),
            participant_slot: s.slot,
            phase: s.phase,
            cursor: s.cursor,
            created_at: s.created_at,
        };
        if s.released {
            return Ok(info);
        }
        if s.phase == Phase::Done {
            return Err(StudyError::SessionComplete);
        }
        self.commit(
            &mut inner,
            Event::Released {
                session_id: session_id.to_string(),
                at: Utc::now(),
            },
        )?;
        Ok(info)
    }

    pub fn status(&self) -> StudyStatus {
        let inner = self.lock();
        let st = &inner.state;
        let active = || st.sessions.values().filter(|s| !s.released);
        StudyStatus {
            slots: st.slots.len(),
            claimed: st.slots.iter().filter(|s| s.is_some()).count(),
            complete: active().filter(|s| s.phase == Phase::Done).count(),
            choices: active().map(|s| s.choices.len()).sum(),
            ratings: active().map(|s| s.ratings.len()).sum(),
        }
    }

    /// Sessions that count towards exports, in slot order.
    fn exported<'a>(&self, st: &'a State) -> Vec<(&'a String, &'a SessionState)> {
        let mut v: Vec<_> = st
            .order
            .iter()
            .map(|id| (id, &st.sessions[id]))
            .filter(|(_, s)| !s.released)
            .collect();
        v.sort_by_key(|(_, s)| s.slot);
        v
    }

    fn partial_note(&self, st: &State) -> Option<String> {
        let done = self
            .exported(st)
            .iter()
            .filter(|(_, s)| s.phase == Phase::Done)
            .count();
        (done < st.slots.len()).then(|| {
            format!(
                "# partial export: {done} of {} sessions complete\n",
                st.slots.len()
            )
        })
    }

    /// Judgment log in the ingest format. A study with records but not every
    /// slot complete is flagged by a leading `#` comment row.
    pub fn export_judgments(&self) -> Result<String, StudyError> {
        let inner = self.lock();
        let st = &inner.state;
        let rows: Vec<TripletJudgment> = self
            .exported(st)
            .into_iter()
            .flat_map(|(_, s)| s.choices.iter())
            .map(|c| {
                TripletJudgment::new(
                    c.session_id.clone(),
                    [&c.triplet[0], &c.triplet[1], &c.triplet[2]],
                    &c.chosen,
                    c.response_time_ms,
                    c.server_received_at,
                )
                .expect("validated on submission")
            })
            .collect();
        let mut buf = Vec::new();
        write_judgments(&mut buf, &rows)
            .map_err(|e| StudyError::Storage(std::io::Error::other(e.to_string())))?;
        let body = String::from_utf8(buf).expect("utf-8 csv");
        Ok(match self.partial_note(st).filter(|_| !rows.is_empty()) {
            Some(note) => note + &body,
            None => body,
        })
    }

    /// Rating log in the ingest format, flagged like [`Self::export_judgments`].
    pub fn export_ratings(&self) -> Result<String, StudyError> {
        let inner = self.lock();
        let st = &inner.state;
        let rows: Vec<RatingRecord> = self
            .exported(st)
            .into_iter()
            .flat_map(|(_, s)| s.ratings.iter())
            .map(|r| RatingRecord {
                session_id: r.session_id.clone(),
                word: r.word.clone(),
                rating: r.rating,
                response_time_ms: r.response_time_ms,
                timestamp: r.server_received_at,
            })
            .collect();
        let mut buf = Vec::new();
        write_ratings(&mut buf, &rows)
            .map_err(|e| StudyError::Storage(std::io::Error::other(e.to_string())))?;
        let body = String::from_utf8(buf).expect("utf-8 csv");
        Ok(match self.partial_note(st).filter(|_| !rows.is_empty()) {
            Some(note) => note + &body,
            None => body,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StudyStatus {
    pub slots: usize,
    pub claimed: usize,
    pub complete: usize,
    pub choices: usize,
    pub ratings: usize,
}

fn append(wal: &mut File, event: &Event) -> Result<(), StudyError> {
    let mut line =
        serde_json::to_vec(event).map_err(|e| StudyError::InvalidRequest(e.to_string()))?;
    line.push(b'\n');
    wal.write_all(&line)?;
    wal.sync_data()?;
    Ok(())
}

/// Parses the log. A torn final line (no newline, unparsable) is the trace
/// of an interrupted, unacknowledged write and is cut off.
fn read_log(path: &Path, wal: &mut File) -> Result<Vec<Event>, StudyError> {
    wal.seek(SeekFrom::Start(0))?;
    let mut reader = BufReader::new(&*wal);
    let mut events = Vec::new();
    let mut offset = 0u64;
    let mut line = String::new();
    let mut n = 0;
    loop {
        line.clear();
        let read = reader.read_line(&mut line)?;
        if read == 0 {
            break;
        }
        n += 1;
        let complete = line.ends_with('\n');
        match serde_json::from_str::<Event>(line.trim_end()) {
            Ok(e) if complete => {
                events.push(e);
                offset += read as u64;
            }
            _ if !complete => {
                log::warn!("{}: dropping torn final record at line {n}", path.display());
                wal.set_len(offset)?;
                break;
            }
            Err(e) => {
                return Err(StudyError::Corrupt {
                    path: path.to_path_buf(),
                    line: n,
                    message: e.to_string(),
                })
            }
            Ok(_) => unreachable!(),
        }
    }
    Ok(events)
}
