use std::io::{Read, Write};

use rand::seq::SliceRandom;

use super::{DesignError, Triple};
use crate::text::canonical_triple;

/// Assignment of triples to participant slots, in presentation order.
#[derive(Debug, Clone, PartialEq)]
pub struct TripletSchedule {
    /// `blocks[slot]` is the ordered block of participant slot `slot`.
    pub blocks: Vec<Vec<Triple>>,
    pub seed: u64,
}

impl TripletSchedule {
    pub fn participants(&self) -> usize {
        self.blocks.len()
    }

    pub fn block(&self, slot: usize) -> Option<&[Triple]> {
        self.blocks.get(slot).map(Vec::as_slice)
    }

    pub fn total_triplets(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }
}

/// Splits triples over `n_participants` blocks whose sizes differ by at most
/// one. Membership and order within each block come from one seeded shuffle.
pub fn schedule_triplets(
    triplets: &[Triple],
    n_participants: usize,
    seed: u64,
) -> Result<TripletSchedule, DesignError> {
    if n_participants == 0 {
        return Err(DesignError::InvalidParameter(
            "at least one participant is required".into(),
        ));
    }
    if triplets.is_empty() {
        return Err(DesignError::InvalidParameter(
            "no triplets to schedule".into(),
        ));
    }
    let mut order = triplets.to_vec();
    order.shuffle(&mut crate::seed::rng(seed));
    let base = order.len() / n_participants;
    let extra = order.len() % n_participants;
    let mut blocks = Vec::with_capacity(n_participants);
    let mut rest = order.into_iter();
    for slot in 0..n_participants {
        let size = base + usize::from(slot < extra);
        blocks.push(rest.by_ref().take(size).collect());
    }
    Ok(TripletSchedule { blocks, seed })
}

pub fn write_schedule_csv<W: Write>(schedule: &TripletSchedule, out: W) -> Result<(), DesignError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["participant_slot", "position", "word_a", "word_b", "word_c"])?;
    for (slot, block) in schedule.blocks.iter().enumerate() {
        for (pos, t) in block.iter().enumerate() {
            w.write_record([
                slot.to_string().as_str(),
                &pos.to_string(),
                &t[0],
                &t[1],
                &t[2],
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a schedule written by [`write_schedule_csv`]. The seed is not part
/// of the file (it lives in the sidecar manifest) and is passed in.
pub fn read_schedule_csv<R: Read>(reader: R, seed: u64) -> Result<TripletSchedule, DesignError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows: Vec<(usize, usize, Triple)> = Vec::new();
    for (idx, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = idx + 1;
        let parse = |i: usize| -> Result<usize, DesignError> {
            rec.get(i)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| DesignError::Parse {
                    row,
                    message: format!("column {i} is not a nonnegative integer"),
                })
        };
        if rec.len() != 5 {
            return Err(DesignError::Parse {
                row,
                message: format!("expected 5 cells, found {}", rec.len()),
            });
        }
        let (slot, pos) = (parse(0)?, parse(1)?);
        let [a, b, c] = [&rec[2], &rec[3], &rec[4]].map(crate::text::normalize);
        rows.push((slot, pos, canonical_triple(&a, &b, &c)));
    }
    let n_slots = rows.iter().map(|r| r.0 + 1).max().unwrap_or(0);
    let mut blocks: Vec<Vec<(usize, Triple)>> = vec![Vec::new(); n_slots];
    for (slot, pos, t) in rows {
        blocks[slot].push((pos, t));
    }
    let mut out = Vec::with_capacity(n_slots);
    for (slot, mut block) in blocks.into_iter().enumerate() {
        block.sort_by_key(|(pos, _)| *pos);
        if block.iter().enumerate().any(|(i, (pos, _))| i != *pos) {
            return Err(DesignError::Parse {
                row: 0,
                message: format!("slot {slot} positions are not 0..{}", block.len()),
            });
        }
        out.push(block.into_iter().map(|(_, t)| t).collect());
    }
    Ok(TripletSchedule { blocks: out, seed })
}
