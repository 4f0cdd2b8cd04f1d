//! Central-value persistence: `d,form_label,epsilon,L_half,L1_chi,N_cut`.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a
//! value read back is bit-identical to the one written.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

pub const HEADER: &str = "d,form_label,epsilon,L_half,L1_chi,N_cut";

#[derive(Clone, Debug, PartialEq)]
pub struct CentralValueRecord {
    pub d: i64,
    pub form_label: String,
    pub epsilon: i8,
    pub l_half: f64,
    pub l1_chi: f64,
    /// Terms summed; 0 when the root number came from the fitted model
    /// and no sum was evaluated.
    pub n_cut: usize,
}

impl CentralValueRecord {
    pub fn to_csv_row(&self) -> String {
        format!("{},{},{},{:?},{:?},{}", self.d, self.form_label, self.epsilon, self.l_half, self.l1_chi, self.n_cut)
    }

    pub fn parse_row(line: &str) -> Result<Self> {
        let bad = || Error::Integrity(format!("bad central-value row {line:?}"));
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 6 {
            return Err(bad());
        }
        Ok(CentralValueRecord {
            d: f[0].parse().map_err(|_| bad())?,
            form_label: f[1].to_string(),
            epsilon: f[2].parse().map_err(|_| bad())?,
            l_half: f[3].parse().map_err(|_| bad())?,
            l1_chi: f[4].parse().map_err(|_| bad())?,
            n_cut: f[5].parse().map_err(|_| bad())?,
        })
    }
}

/// Append-only CSV store keyed by `(d, form_label)`.
#[derive(Debug)]
pub struct ValueStore {
    path: Option<PathBuf>,
    records: BTreeMap<(i64, String), CentralValueRecord>,
}

impl ValueStore {
    pub fn in_memory() -> Self {
        ValueStore { path: None, records: BTreeMap::new() }
    }

    /// Opens (or creates) the store at `path`, loading every complete row.
    /// A trailing partial line from an interrupted run is ignored.
    pub fn open(path: &Path) -> Result<Self> {
        let mut records = BTreeMap::new();
        if path.exists() {
            let text = fs::read_to_string(path)?;
            let complete = match text.rfind('\n') {
                Some(i) => &text[..=i],
                None => "",
            };
            for (i, line) in BufReader::new(complete.as_bytes()).lines().enumerate() {
                let line = line?;
                if i == 0 {
                    if line != HEADER {
                        return Err(Error::Integrity(format!("{}: unexpected header {line:?}", path.display())));
                    }
                    continue;
                }
                if line.is_empty() {
                    continue;
                }
                let r = CentralValueRecord::parse_row(&line)?;
                records.insert((r.d, r.form_label.clone()), r);
            }
            if complete.len() != text.len() {
                // drop the torn tail so later appends start on a fresh line
                fs::write(path, complete)?;
            }
        }
        if !path.exists() || fs::metadata(path)?.len() == 0 {
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent)?;
            }
            fs::write(path, format!("{HEADER}\n"))?;
        }
        Ok(ValueStore { path: Some(path.to_path_buf()), records })
    }

    pub fn get(&self, d: i64, label: &str) -> Option<&CentralValueRecord> {
        self.records.get(&(d, label.to_string()))
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> impl Iterator<Item = &CentralValueRecord> {
        self.records.values()
    }

    pub fn insert(&mut self, r: CentralValueRecord) -> Result<()> {
        if let Some(path) = &self.path {
            let mut f = fs::OpenOptions::new().append(true).open(path)?;
            writeln!(f, "{}", r.to_csv_row())?;
        }
        self.records.insert((r.d, r.form_label.clone()), r);
        Ok(())
    }
}

/// Writes records sorted by `(|d|, label)`.
pub fn write_csv(path: &Path, records: &[CentralValueRecord]) -> Result<()> {
    let mut rows: Vec<&CentralValueRecord> = records.iter().collect();
    rows.sort_by(|a, b| (a.d.unsigned_abs(), &a.form_label).cmp(&(b.d.unsigned_abs(), &b.form_label)));
    let mut out = String::from(HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv_row());
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<CentralValueRecord>> {
    Ok(ValueStore::open(path)?.records.into_values().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(d: i64, v: f64) -> CentralValueRecord {
        CentralValueRecord { d, form_label: "1.12.a.a".into(), epsilon: 1, l_half: v, l1_chi: 0.1 + 0.2, n_cut: 7 }
    }

    #[test]
    fn floats_round_trip_exactly() {
        for v in [0.0, -0.0, 1.0 / 3.0, 1e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            let r = rec(-7, v);
            let back = CentralValueRecord::parse_row(&r.to_csv_row()).unwrap();
            assert_eq!(back.l_half.to_bits(), v.to_bits());
            assert_eq!(back, r);
        }
    }

    #[test]
    fn store_resumes_after_torn_write() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("values.csv");
        let mut s = ValueStore::open(&p).unwrap();
        s.insert(rec(-7, 1.5)).unwrap();
        s.insert(rec(-11, 2.5)).unwrap();
        let mut text = fs::read_to_string(&p).unwrap();
        text.push_str("-15,1.12.a.a,1,3.");
        fs::write(&p, &text).unwrap();
        let mut s = ValueStore::open(&p).unwrap();
        assert_eq!(s.len(), 2);
        s.insert(rec(-15, 3.5)).unwrap();
        let s = ValueStore::open(&p).unwrap();
        assert_eq!(s.get(-15, "1.12.a.a").unwrap().l_half, 3.5);
        assert_eq!(fs::read_to_string(&p).unwrap().lines().count(), 4);
    }
}
