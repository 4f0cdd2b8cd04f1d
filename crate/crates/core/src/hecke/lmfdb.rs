//! Client for a public modular-forms database serving q-expansions as JSON.

use std::path::Path;
use std::time::Duration;

use serde_json::Value;

use super::cache;
use super::{CoefficientTable, EigenformSpec};
use crate::crt::Wide;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct DatabaseConfig {
    pub base_url: String,
    /// Path and query appended to `base_url`; `{label}` is substituted.
    pub endpoint: String,
    /// JSON pointer to the coefficient array inside the response.
    pub json_pointer: String,
    pub timeout: Duration,
}

impl Default for DatabaseConfig {
    fn default() -> Self {
        DatabaseConfig {
            base_url: "https://www.lmfdb.org".into(),
            endpoint: "/api/mf_newforms/?label={label}&_format=json&_fields=traces".into(),
            json_pointer: "/data/0/traces".into(),
            timeout: Duration::from_secs(60),
        }
    }
}

impl DatabaseConfig {
    pub fn url_for(&self, label: &str) -> String {
        format!("{}{}", self.base_url.trim_end_matches('/'), self.endpoint.replace("{label}", label))
    }
}

/// Extracts `a(1), a(2), ...` from a response body. A leading `a(0) = 0`
/// is detected and skipped.
pub fn parse_response(body: &str, pointer: &str) -> Result<Vec<Wide>> {
    let json: Value = serde_json::from_str(body).map_err(|e| Error::Network(format!("malformed JSON: {e}")))?;
    let arr = json
        .pointer(pointer)
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Network(format!("no coefficient array at {pointer}")))?;
    let mut out = Vec::with_capacity(arr.len());
    for v in arr {
        let s = match v {
            Value::Number(n) => n.to_string(),
            Value::String(s) => s.clone(),
            other => return Err(Error::Integrity(format!("non-integer coefficient {other}"))),
        };
        out.push(Wide::parse(&s).ok_or_else(|| Error::Integrity(format!("non-integer coefficient {s}")))?);
    }
    if out.len() >= 2 && out[0].is_zero() && out[1] == Wide::from_i64(1) {
        out.remove(0);
    }
    Ok(out)
}

pub fn fetch_coefficients(cfg: &DatabaseConfig, label: &str) -> Result<Vec<Wide>> {
    let url = cfg.url_for(label);
    log::info!("fetching {url}");
    let agent: ureq::Agent = ureq::Agent::config_builder().timeout_global(Some(cfg.timeout)).build().into();
    let mut resp = agent.get(&url).call().map_err(|e| Error::Network(format!("{url}: {e}")))?;
    let body = resp
        .body_mut()
        .with_config()
        .limit(256 << 20)
        .read_to_string()
        .map_err(|e| Error::Network(format!("{url}: {e}")))?;
    parse_response(&body, &cfg.json_pointer)
}

/// Loads `a(1..=n_max)` for `label` from the cache, fetching and caching
/// from the database when needed. Everything accepted is re-verified
/// against the Hecke relations.
pub fn ingest_newform(
    label: &str,
    n_max: usize,
    cache_dir: &Path,
    cfg: &DatabaseConfig,
    offline: bool,
) -> Result<CoefficientTable> {
    let spec = EigenformSpec::from_label(label)?;
    let path = cache::cache_path(cache_dir, label);
    let mut cached = None;
    if path.exists() {
        let (cspec, a) = cache::read_integers(&path)?;
        if cspec != spec {
            return Err(Error::Integrity(format!("{} holds {} not {}", path.display(), cspec.label, label)));
        }
        if a.len() >= n_max {
            return CoefficientTable::from_integers(spec, &a[..n_max]);
        }
        cached = Some(a);
    }
    if offline {
        return Err(Error::CacheMiss { label: label.to_string(), dir: cache_dir.to_path_buf() });
    }
    let fetched = fetch_coefficients(cfg, label)?;
    if fetched.len() < n_max {
        return Err(Error::InsufficientCoefficients { needed: n_max, available: fetched.len() });
    }
    if let Some(old) = cached {
        let n = old.len().min(fetched.len());
        if old[..n] != fetched[..n] {
            return Err(Error::Integrity(format!("fetched coefficients disagree with {}", path.display())));
        }
    }
    let table = CoefficientTable::from_integers(spec, &fetched)?;
    cache::write_integers(&path, table.spec(), &fetched)?;
    Ok(table.truncated(n_max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offset_detection_and_big_numbers() {
        let body = r#"{"data":[{"traces":[0,1,-24,252,-1472]}]}"#;
        let a = parse_response(body, "/data/0/traces").unwrap();
        assert_eq!(a.len(), 4);
        assert_eq!(a[1].to_string(), "-24");
        let big = r#"{"c":[1, 123456789012345678901234567890]}"#;
        let a = parse_response(big, "/c").unwrap();
        assert_eq!(a[1].to_string(), "123456789012345678901234567890");
        assert!(parse_response(big, "/missing").is_err());
    }

    #[test]
    fn url_template() {
        let cfg = DatabaseConfig { base_url: "http://x/".into(), ..Default::default() };
        assert_eq!(
            cfg.url_for("1.12.a.a"),
            "http://x/api/mf_newforms/?label=1.12.a.a&_format=json&_fields=traces"
        );
    }
}
