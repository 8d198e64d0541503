//! Delimited-text RDM files.
//!
//! Square form: the first row holds the kind (top-left cell) followed by the
//! labels; each further row holds a label followed by its dissimilarities.
//! Condensed form: `pair_a,pair_b,value` rows in condensed order.

use std::io::{Read, Write};

use super::{condense, Rdm, RdmError, RdmKind};

pub fn write_rdm_csv<W: Write>(rdm: &Rdm, out: W) -> Result<(), RdmError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![rdm.kind().as_str().to_string()];
    header.extend(rdm.labels().iter().cloned());
    w.write_record(&header)?;
    let n = rdm.len();
    for (i, label) in rdm.labels().iter().enumerate() {
        let mut rec = Vec::with_capacity(n + 1);
        rec.push(label.clone());
        rec.extend((0..n).map(|j| rdm.get(i, j).to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rdm_csv<R: Read>(reader: R) -> Result<Rdm, RdmError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = rdr.records();
    let header = records.next().ok_or(RdmError::Parse {
        line: 1,
        message: "empty file".into(),
    })??;
    let kind = RdmKind::parse(&header[0]).ok_or_else(|| RdmError::Parse {
        line: 1,
        message: format!("unknown RDM kind {:?}", &header[0]),
    })?;
    let labels: Vec<String> = header.iter().skip(1).map(crate::text::normalize).collect();
    let n = labels.len();
    let mut values = Vec::with_capacity(n * n);
    for (i, rec) in records.enumerate() {
        let rec = rec?;
        let line = i + 2;
        if i >= n || rec.len() != n + 1 {
            return Err(RdmError::Parse {
                line,
                message: format!("expected {} cells", n + 1),
            });
        }
        if crate::text::normalize(&rec[0]) != labels[i] {
            return Err(RdmError::Parse {
                line,
                message: format!(
                    "row label {:?} does not match column {:?}",
                    &rec[0], labels[i]
                ),
            });
        }
        for cell in rec.iter().skip(1) {
            let v = cell.parse::<f64>().map_err(|_| RdmError::Parse {
                line,
                message: format!("{cell:?} is not a number"),
            })?;
            values.push(v);
        }
    }
    Rdm::new(labels, values, kind)
}

pub fn write_condensed_csv<W: Write>(rdm: &Rdm, out: W) -> Result<(), RdmError> {
    let c = condense(rdm)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["pair_a", "pair_b", "value"])?;
    for ((a, b), v) in c.pair_labels.iter().zip(&c.values) {
        w.write_record([a.as_str(), b.as_str(), &v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
