//! Plain-text coefficient cache.
//!
//! ```text
//! SYMCUBE-COEFF v1 <label> <weight> <level> <N_max>
//! a(1)
//! a(2)
//! ...
//! ```

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use super::{CoefficientTable, EigenformSpec};
use crate::crt::Wide;
use crate::error::{Error, Result};

const MAGIC: &str = "SYMCUBE-COEFF";
const VERSION: &str = "v1";

pub fn cache_path(dir: &Path, label: &str) -> PathBuf {
    dir.join(format!("{label}.coeff"))
}

pub fn write_integers(path: &Path, spec: &EigenformSpec, a: &[Wide]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    // write to a sibling then rename, so a crash never leaves half a file
    let tmp = path.with_extension("coeff.tmp");
    {
        let mut w = BufWriter::new(fs::File::create(&tmp)?);
        writeln!(w, "{MAGIC} {VERSION} {} {} {} {}", spec.label, spec.weight, spec.level, a.len())?;
        for v in a {
            writeln!(w, "{v}")?;
        }
        w.flush()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write_table(path: &Path, table: &CoefficientTable) -> Result<()> {
    let a = table
        .exact_all()
        .ok_or_else(|| Error::InvalidInput("table has no exact coefficients to write".into()))?;
    write_integers(path, table.spec(), &a)
}

/// Header fields and raw integers, without any arithmetic validation.
pub fn read_integers(path: &Path) -> Result<(EigenformSpec, Vec<Wide>)> {
    let file = fs::File::open(path)?;
    let mut lines = BufReader::new(file).lines();
    let corrupt = |msg: String| Error::Integrity(format!("{}: {msg}", path.display()));
    let header = lines.next().ok_or_else(|| corrupt("empty file".into()))??;
    let f: Vec<&str> = header.split_ascii_whitespace().collect();
    if f.len() != 6 || f[0] != MAGIC || f[1] != VERSION {
        return Err(corrupt(format!("bad header {header:?}")));
    }
    let weight: u32 = f[3].parse().map_err(|_| corrupt("bad weight".into()))?;
    let level: u32 = f[4].parse().map_err(|_| corrupt("bad level".into()))?;
    let n_max: usize = f[5].parse().map_err(|_| corrupt("bad N_max".into()))?;
    if level != 1 {
        return Err(corrupt(format!("level {level} is not supported")));
    }
    let spec = EigenformSpec::new(weight, f[2])?;
    let mut a = Vec::with_capacity(n_max);
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let v = Wide::parse(&line).ok_or_else(|| corrupt(format!("line {}: not an integer", i + 2)))?;
        a.push(v);
    }
    if a.len() != n_max {
        return Err(corrupt(format!("header promises {n_max} values, found {}", a.len())));
    }
    Ok((spec, a))
}

/// Reads and fully re-verifies a cache file.
pub fn read_table(path: &Path) -> Result<CoefficientTable> {
    let (spec, a) = read_integers(path)?;
    CoefficientTable::from_integers(spec, &a)
}
