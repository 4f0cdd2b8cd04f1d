//! Run configuration: a plain `key = value` file, the `SYMCUBE_CACHE`
//! environment variable and command-line overrides, in increasing priority.

use std::path::{Path, PathBuf};
use std::time::Duration;

use crate::error::{Error, Result};
use crate::grh::{CHANDEE_SLACK, DEFAULT_EPSILON, DEFAULT_X_CAP};
use crate::hecke::cache;
use crate::hecke::lmfdb::{self, DatabaseConfig};
use crate::hecke::{builtin_coefficients_with, CoefficientTable, EigenformSpec, GenerationOptions};
use crate::lvalue::AfeSettings;

pub const CACHE_ENV: &str = "SYMCUBE_CACHE";

/// Where coefficients come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    /// Built-in weights are generated locally, anything else is fetched.
    Auto,
    Builtin,
    Database,
}

impl std::str::FromStr for Source {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Source::Auto),
            "builtin" => Ok(Source::Builtin),
            "lmfdb" | "database" => Ok(Source::Database),
            _ => Err(Error::Config(format!("unknown coefficient source {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub cache_dir: PathBuf,
    pub database: DatabaseConfig,
    pub offline: bool,
    pub threads: usize,
    pub source: Source,
    pub afe: AfeSettings,
    pub residue: i64,
    pub modulus: u64,
    pub epsilon: f64,
    pub chandee_slack: f64,
    pub x_cap: f64,
    pub forms: Vec<String>,
    pub ells: Vec<f64>,
    pub blocks: Vec<u64>,
    /// Coefficients generated per form.
    pub terms: usize,
    /// Central-value store; defaults to `central_values.csv` in the cache.
    pub values: Option<PathBuf>,
    /// Compute missing central values (otherwise they must be stored).
    pub recompute: bool,
    /// `D` of the diagnostic family.
    pub grh_d: u64,
    pub chandee_max_d: u64,
    pub memory_budget: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            cache_dir: PathBuf::from(".symcube-cache"),
            database: DatabaseConfig::default(),
            offline: false,
            threads: 1,
            source: Source::Auto,
            afe: AfeSettings::default(),
            residue: 1,
            modulus: 4,
            epsilon: DEFAULT_EPSILON,
            chandee_slack: CHANDEE_SLACK,
            x_cap: DEFAULT_X_CAP,
            forms: vec!["1.12.a.a".into()],
            ells: vec![0.5],
            blocks: vec![250, 500, 1000, 2000],
            terms: 1_000_000,
            values: None,
            recompute: true,
            grh_d: 10_000,
            chandee_max_d: 2000,
            memory_budget: crate::hecke::DEFAULT_MEMORY_BUDGET,
        }
    }
}

fn list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',').map(|s| s.trim()).filter(|s| !s.is_empty()).map(|s| parse(key, s)).collect()
}

fn parse<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim().parse().map_err(|_| Error::Config(format!("bad value {v:?} for {key}")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.trim() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(Error::Config(format!("bad boolean {v:?} for {key}"))),
    }
}

impl Config {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key.trim() {
            "cache_dir" => self.cache_dir = PathBuf::from(v),
            "database_url" => self.database.base_url = v.to_string(),
            "database_endpoint" => self.database.endpoint = v.to_string(),
            "database_pointer" => self.database.json_pointer = v.to_string(),
            "database_timeout" => self.database.timeout = Duration::from_secs_f64(parse(key, v)?),
            "offline" => self.offline = parse_bool(key, v)?,
            "threads" => self.threads = parse(key, v)?,
            "source" => self.source = v.parse()?,
            "afe_c" => self.afe.c_primary = parse(key, v)?,
            "afe_c_alt" => self.afe.c_alt = parse(key, v)?,
            "afe_balance" => self.afe.balance = parse(key, v)?,
            "afe_sigma0" => self.afe.sigma0 = parse(key, v)?,
            "afe_step" => self.afe.step = parse(key, v)?,
            "afe_height" => self.afe.height = parse(key, v)?,
            "afe_tail_tol" => self.afe.tail_tol = parse(key, v)?,
            "afe_sign_tol" => self.afe.sign_tol = parse(key, v)?,
            "residue" => self.residue = parse(key, v)?,
            "modulus" => self.modulus = parse(key, v)?,
            "epsilon" => self.epsilon = parse(key, v)?,
            "chandee_c0" => self.chandee_slack = parse(key, v)?,
            "x_cap" => self.x_cap = parse(key, v)?,
            "forms" => self.forms = list(key, v)?,
            "ells" => self.ells = list(key, v)?,
            "blocks" => self.blocks = list(key, v)?,
            "terms" => self.terms = parse::<f64>(key, v)? as usize,
            "values" => self.values = Some(PathBuf::from(v)),
            "recompute" => self.recompute = parse_bool(key, v)?,
            "grh_d" => self.grh_d = parse(key, v)?,
            "chandee_max_d" => self.chandee_max_d = parse(key, v)?,
            "memory_budget_mib" => self.memory_budget = parse::<usize>(key, v)? << 20,
            other => return Err(Error::Config(format!("unknown configuration key {other:?}"))),
        }
        Ok(())
    }

    /// Parses a `key = value` file; `#` starts a comment.
    pub fn parse_str(text: &str) -> Result<Self> {
        let mut cfg = Config::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value, got {raw:?}", i + 1)))?;
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse_str(&text)
    }

    /// Lets `SYMCUBE_CACHE` override the cache directory.
    pub fn apply_env(&mut self) {
        if let Some(dir) = std::env::var_os(CACHE_ENV) {
            if !dir.is_empty() {
                self.cache_dir = PathBuf::from(dir);
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.threads == 0 {
            return Err(Error::Config("worker count must be at least 1".into()));
        }
        if self.terms == 0 {
            return Err(Error::Config("terms must be positive".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(Error::Config(format!("epsilon must lie in (0, 1/2), got {}", self.epsilon)));
        }
        Ok(())
    }

    pub fn values_path(&self) -> PathBuf {
        self.values.clone().unwrap_or_else(|| self.cache_dir.join("central_values.csv"))
    }

    pub fn specs(&self) -> Result<Vec<EigenformSpec>> {
        self.forms.iter().map(|l| EigenformSpec::from_label(l).map_err(|e| Error::Config(e.to_string()))).collect()
    }

    fn use_builtin(&self, spec: &EigenformSpec) -> Result<bool> {
        match self.source {
            Source::Auto => Ok(spec.is_builtin()),
            Source::Builtin if spec.is_builtin() => Ok(true),
            Source::Builtin => Err(Error::UnsupportedWeight(spec.weight)),
            Source::Database => Ok(false),
        }
    }

    /// Coefficients `a(1..=n_max)`: from the cache when it is long enough,
    /// otherwise generated (built-in forms) or ingested from the database.
    pub fn coefficients(&self, spec: &EigenformSpec, n_max: usize) -> Result<CoefficientTable> {
        if !self.use_builtin(spec)? {
            return lmfdb::ingest_newform(&spec.label, n_max, &self.cache_dir, &self.database, self.offline);
        }
        let path = cache::cache_path(&self.cache_dir, &spec.label);
        if path.exists() {
            let (cspec, a) = cache::read_integers(&path)?;
            if cspec == *spec && a.len() >= n_max {
                let mut t = CoefficientTable::from_integers(spec.clone(), &a[..n_max])?;
                t.drop_exact();
                return Ok(t);
            }
        }
        let opts = GenerationOptions { keep_exact: false, memory_budget: self.memory_budget };
        builtin_coefficients_with(spec, n_max, opts)
    }

    /// Makes sure the cache holds at least `n_max` verified coefficients of
    /// `spec`, writing the file only when it is missing or too short.
    /// Returns whether the file was (re)written.
    pub fn ensure_cached(&self, spec: &EigenformSpec, n_max: usize) -> Result<bool> {
        let path = cache::cache_path(&self.cache_dir, &spec.label);
        if path.exists() {
            let (cspec, a) = cache::read_integers(&path)?;
            if cspec == *spec && a.len() >= n_max {
                CoefficientTable::from_integers(spec.clone(), &a)?;
                return Ok(false);
            }
        }
        if !self.use_builtin(spec)? {
            lmfdb::ingest_newform(&spec.label, n_max, &self.cache_dir, &self.database, self.offline)?;
            return Ok(true);
        }
        let opts = GenerationOptions { keep_exact: true, memory_budget: self.memory_budget };
        let table = builtin_coefficients_with(spec, n_max, opts)?;
        std::fs::create_dir_all(&self.cache_dir)?;
        cache::write_table(&path, &table)?;
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_file() {
        let cfg = Config::parse_str(
            "# sweep\nforms = 1.12.a.a, 1.16.a.a\nells = 0.5,0.5\nblocks=250,500,1000\nterms = 2e6\noffline = yes\nafe_tail_tol = 1e-10\n",
        )
        .unwrap();
        assert_eq!(cfg.forms, vec!["1.12.a.a", "1.16.a.a"]);
        assert_eq!(cfg.ells, vec![0.5, 0.5]);
        assert_eq!(cfg.blocks, vec![250, 500, 1000]);
        assert_eq!(cfg.terms, 2_000_000);
        assert!(cfg.offline);
        assert_eq!(cfg.afe.tail_tol, 1e-10);
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        assert!(matches!(Config::parse_str("colour = blue"), Err(Error::Config(_))));
        assert!(matches!(Config::parse_str("threads"), Err(Error::Config(_))));
        assert!(matches!(Config::parse_str("threads = many"), Err(Error::Config(_))));
        let cfg = Config::parse_str("threads = 0").unwrap();
        assert!(cfg.validate().is_err());
    }
}
