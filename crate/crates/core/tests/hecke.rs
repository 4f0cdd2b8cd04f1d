mod common;

use std::io::{Read, Write};
use std::net::TcpListener;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread;
use std::time::Duration;

use proptest::prelude::*;
use symcube::hecke::lmfdb::{ingest_newform, DatabaseConfig};
use symcube::hecke::{
    builtin_coefficients, satake_angle, sym_cube_dirichlet, sym_cube_power_sum, sym_cube_prime_power, CoefficientTable,
    EigenformSpec,
};
use symcube::Error;

#[test]
fn tau_matches_product_expansion() {
    let oracle = common::tau_schoolbook(100);
    let t = builtin_coefficients(&EigenformSpec::delta(), 100).unwrap();
    for (n, want) in oracle.iter().enumerate().skip(1) {
        assert_eq!(t.exact(n).unwrap().to_string(), want.to_string(), "tau({n})");
    }
}

#[test]
fn weight16_matches_e4_times_delta() {
    let oracle = common::weight16_schoolbook(100);
    let t = builtin_coefficients(&EigenformSpec::builtin(16).unwrap(), 100).unwrap();
    for (n, want) in oracle.iter().enumerate().skip(1) {
        assert_eq!(t.exact(n).unwrap().to_string(), want.to_string(), "a({n})");
    }
}

fn serve(body: String, hits: Arc<AtomicUsize>) -> String {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut s) = stream else { continue };
            hits.fetch_add(1, Ordering::SeqCst);
            let mut buf = [0u8; 4096];
            let mut req = Vec::new();
            while !req.windows(4).any(|w| w == b"\r\n\r\n") {
                let n = s.read(&mut buf).unwrap_or(0);
                if n == 0 {
                    break;
                }
                req.extend_from_slice(&buf[..n]);
            }
            let resp = format!(
                "HTTP/1.1 200 OK\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{}",
                body.len(),
                body
            );
            let _ = s.write_all(resp.as_bytes());
        }
    });
    format!("http://{addr}")
}

fn traces_body(values: &[i128]) -> String {
    let list: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    format!("{{\"data\":[{{\"traces\":[0,{}]}}]}}", list.join(","))
}

fn db(url: String) -> DatabaseConfig {
    DatabaseConfig { base_url: url, timeout: Duration::from_secs(10), ..Default::default() }
}

#[test]
fn ingestion_fetches_once_then_uses_cache() {
    let tau = common::tau_schoolbook(150);
    let hits = Arc::new(AtomicUsize::new(0));
    let url = serve(traces_body(&tau[1..]), hits.clone());
    let dir = tempfile::tempdir().unwrap();

    let t = ingest_newform("1.12.a.a", 120, dir.path(), &db(url.clone()), false).unwrap();
    assert_eq!(t.n_max(), 120);
    assert_eq!(t.exact(11).unwrap().to_string(), tau[11].to_string());
    assert_eq!(hits.load(Ordering::SeqCst), 1);

    // cached file holds all 150 served values
    let again = ingest_newform("1.12.a.a", 150, dir.path(), &db(url), true).unwrap();
    assert_eq!(again.n_max(), 150);
    assert_eq!(hits.load(Ordering::SeqCst), 1);
    assert_eq!(again.lambdas()[..=120], t.lambdas()[..]);
}

#[test]
fn offline_without_cache_is_a_cache_miss() {
    let dir = tempfile::tempdir().unwrap();
    let err = ingest_newform("1.12.a.a", 50, dir.path(), &db("http://127.0.0.1:9".into()), true).unwrap_err();
    assert!(matches!(err, Error::CacheMiss { .. }), "{err}");
    assert_eq!(err.exit_code(), 3);
}

#[test]
fn short_or_corrupt_responses_are_rejected() {
    let tau = common::tau_schoolbook(60);
    let dir = tempfile::tempdir().unwrap();
    let url = serve(traces_body(&tau[1..]), Arc::new(AtomicUsize::new(0)));
    let err = ingest_newform("1.12.a.a", 100, dir.path(), &db(url), false).unwrap_err();
    assert!(matches!(err, Error::InsufficientCoefficients { needed: 100, available: 60 }), "{err}");

    let mut bad = tau.clone();
    bad[6] += 1;
    let url = serve(traces_body(&bad[1..]), Arc::new(AtomicUsize::new(0)));
    let err = ingest_newform("1.12.a.a", 50, dir.path(), &db(url), false).unwrap_err();
    assert!(matches!(err, Error::Integrity(_)), "{err}");
    assert!(!dir.path().join("1.12.a.a.coeff").exists());
}

#[test]
fn network_failure_maps_to_resource_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    // bind then drop: nothing listens on the port afterwards
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let err = ingest_newform("1.12.a.a", 10, dir.path(), &db(format!("http://127.0.0.1:{port}")), false).unwrap_err();
    assert!(matches!(err, Error::Network(_)), "{err}");
    assert_eq!(err.exit_code(), 3);
}

fn delta_table() -> &'static CoefficientTable {
    use std::sync::OnceLock;
    static T: OnceLock<CoefficientTable> = OnceLock::new();
    T.get_or_init(|| builtin_coefficients(&EigenformSpec::delta(), 20_000).unwrap())
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

proptest! {
    #[test]
    fn lambda_is_multiplicative(m in 1usize..140, n in 1usize..140) {
        prop_assume!(gcd(m, n) == 1);
        let t = delta_table();
        let lhs = t.lambda(m * n);
        let rhs = t.lambda(m) * t.lambda(n);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
    }

    #[test]
    fn sym_cube_recursion_matches_power_sum(idx in 0usize..200, j in 0u32..7) {
        let primes = symcube::primes::primes_up_to(20_000);
        let p = primes[idx * 7 % primes.len()];
        let theta = satake_angle(delta_table(), p).unwrap().theta;
        let a = sym_cube_prime_power(theta, j);
        let b = sym_cube_power_sum(theta, j);
        prop_assert!((a - b).abs() < 1e-9, "p = {}, j = {}: {} vs {}", p, j, a, b);
    }
}

#[test]
fn sym_cube_coefficients_at_primes() {
    let t = delta_table();
    let b = sym_cube_dirichlet(t, 10_000).unwrap();
    for p in symcube::primes::primes_up_to(10_000) {
        let l = t.lambda(p as usize);
        assert!((b.b(p as usize) - (l * l * l - 2.0 * l)).abs() < 1e-12);
    }
    // multiplicative across coprime arguments
    assert!((b.b(6) - b.b(2) * b.b(3)).abs() < 1e-12);
    assert!((b.b(9 * 25) - b.b(9) * b.b(25)).abs() < 1e-12);
}
