//! The diagnostic suite and its CSV report, one row per executed check.

use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde_json::{json, Value};

use super::*;
use crate::lvalue::store::CentralValueRecord;

pub const REPORT_HEADER: &str = "check,param_json,lhs,rhs,ratio,pass";

#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticRow {
    pub check: String,
    pub params: Value,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub pass: bool,
}

impl DiagnosticRow {
    pub fn new(check: &str, params: Value, lhs: f64, rhs: f64, pass: bool) -> Self {
        DiagnosticRow { check: check.to_string(), params, lhs, rhs, ratio: lhs / rhs, pass }
    }

    pub fn to_csv_row(&self) -> String {
        let params = self.params.to_string().replace('"', "\"\"");
        format!("{},\"{}\",{:?},{:?},{:?},{}", self.check, params, self.lhs, self.rhs, self.ratio, self.pass)
    }
}

pub fn write_report(path: &Path, rows: &[DiagnosticRow]) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "{REPORT_HEADER}")?;
    for r in rows {
        writeln!(f, "{}", r.to_csv_row())?;
    }
    Ok(())
}

/// Knobs of the full suite.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub big_d: u64,
    pub residue: i64,
    pub modulus: u64,
    pub epsilon: f64,
    pub x_cap: f64,
    pub chandee_slack: f64,
    pub chandee_max_d: u64,
    pub identity_prime_bound: u64,
    pub identity_sample: usize,
    pub variance_x: f64,
    pub variance_y: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            big_d: 10_000,
            residue: 1,
            modulus: 4,
            epsilon: DEFAULT_EPSILON,
            x_cap: DEFAULT_X_CAP,
            chandee_slack: CHANDEE_SLACK,
            chandee_max_d: 2000,
            identity_prime_bound: 10_000,
            identity_sample: 50,
            variance_x: 1e6,
            variance_y: 1e2,
        }
    }
}

impl SuiteConfig {
    /// Prime bound every form's data must reach.
    pub fn prime_bound(&self) -> u64 {
        let x = self.variance_x.max(self.x_cap).max(self.identity_prime_bound as f64);
        (x.max(2.0 * self.chandee_max_d as f64)).ceil() as u64
    }
}

/// `Σ_{j ∈ {3,1,-1,-3}} e^{i j n θ} · χ^n` summed as complex exponentials.
pub fn satake_power_sum(theta: f64, chi: i8, n: u32) -> f64 {
    let s: Complex64 = [3.0, 1.0, -1.0, -3.0].iter().map(|&j| Complex64::from_polar(1.0, j * n as f64 * theta)).sum();
    s.re * (chi as f64).powi(n as i32)
}

/// Largest deviation between the `n = 2` coefficient and its Hecke-relation
/// form, over `p <= bound` and a sample of family members.
pub fn square_identity_error(form: &PrimeData, sample: &[FundamentalDiscriminant], bound: u64) -> f64 {
    let count = form.count_up_to(bound as f64);
    let mut worst: f64 = 0.0;
    for &d in sample {
        for i in 0..count {
            let (a, p) = (form.angle(i), form.primes()[i]);
            let e = (twisted_lambda(a, d, p, 2) - twisted_lambda_square(a, d, p)).abs();
            worst = worst.max(e);
        }
    }
    worst
}

/// Largest deviation between [`twisted_lambda`] and [`satake_power_sum`] for
/// `n <= 6`.
pub fn power_sum_error(form: &PrimeData, sample: &[FundamentalDiscriminant], bound: u64) -> f64 {
    let count = form.count_up_to(bound as f64);
    let mut worst: f64 = 0.0;
    for &d in sample {
        for i in 0..count {
            let (a, p) = (form.angle(i), form.primes()[i]);
            let chi = d.chi(p);
            for n in 1..=6 {
                let want = satake_power_sum(a.theta, chi, n);
                worst = worst.max((twisted_lambda(a, d, p, n) - want).abs());
            }
        }
    }
    worst
}

/// An evenly spaced sample of at most `size` family members.
pub fn family_sample(family: &[FundamentalDiscriminant], size: usize) -> Vec<FundamentalDiscriminant> {
    if family.len() <= size {
        return family.to_vec();
    }
    (0..size).map(|i| family[i * family.len() / size]).collect()
}

/// Chandee rows for every record with `ε = +1` and `|d| <= max_d`; a record
/// with a non-positive value satisfies the bound trivially.
pub fn chandee_rows(form: &PrimeData, records: &[CentralValueRecord], max_d: u64, slack: f64) -> Result<Vec<DiagnosticRow>> {
    let mut rows = Vec::new();
    for r in records.iter().filter(|r| r.form_label == form.label() && r.epsilon == 1 && r.d.unsigned_abs() <= max_d) {
        let d = FundamentalDiscriminant::new(r.d)?;
        let x = d.abs() as f64;
        let main = chandee_bound(d, form, x)?;
        let rhs = main + slack * ((d.abs() as f64).ln() / x.ln() + 1.0);
        let lhs = if r.l_half > 0.0 { r.l_half.ln() } else { f64::NEG_INFINITY };
        rows.push(DiagnosticRow::new(
            "chandee",
            json!({"form": form.label(), "d": r.d, "x": x, "C0": slack}),
            lhs,
            rhs,
            lhs <= rhs,
        ));
    }
    Ok(rows)
}

/// Runs every diagnostic. `forms` must cover `cfg.prime_bound()`; `records`
/// are the central values available for the Chandee check.
pub fn run_suite(cfg: &SuiteConfig, forms: &[Arc<PrimeData>], records: &[CentralValueRecord]) -> Result<Vec<DiagnosticRow>> {
    if forms.is_empty() {
        return Err(Error::InvalidInput("diagnostic suite needs at least one form".into()));
    }
    let mut rows = Vec::new();
    let filter = DiscriminantFilter::dyadic(cfg.big_d, cfg.residue, cfg.modulus)?;
    let family = enumerate_discriminants(&filter);
    let sample = family_sample(&family, cfg.identity_sample);
    let base = json!({"D": cfg.big_d, "a": cfg.residue, "M0": cfg.modulus});

    for f in forms {
        let e = square_identity_error(f, &sample, cfg.identity_prime_bound);
        rows.push(DiagnosticRow::new(
            "square_relation",
            json!({"form": f.label(), "p_max": cfg.identity_prime_bound, "sample": sample.len()}),
            e,
            1e-10,
            e <= 1e-10,
        ));
        let e = power_sum_error(f, &sample, cfg.identity_prime_bound);
        rows.push(DiagnosticRow::new(
            "power_sum",
            json!({"form": f.label(), "p_max": cfg.identity_prime_bound, "n_max": 6}),
            e,
            1e-10,
            e <= 1e-10,
        ));
        if let Some(&d) = sample.first() {
            let terms = chandee_terms(d, f, 1000.0)?;
            let fwd: f64 = terms.iter().sum();
            let rev: f64 = terms.iter().rev().sum();
            rows.push(DiagnosticRow::new(
                "chandee_order",
                json!({"form": f.label(), "d": d.get(), "x": 1000.0}),
                fwd,
                rev,
                (fwd - rev).abs() <= 1e-9,
            ));
        }
    }

    for r in [1u32, 2] {
        let x = (cfg.big_d as f64).powf(1.0 / (10.0 * r as f64));
        let f = &forms[0];
        let a = |p: u64| match f.primes().binary_search(&p) {
            Ok(i) => f.sym_cube(i),
            Err(_) => 0.0,
        };
        let m = char_moment_check(&filter, x, r, a);
        let pass = m.lhs <= 2.0 * m.rhs;
        let params = json!({"D": cfg.big_d, "r": r, "x": x, "form": f.label()});
        rows.push(DiagnosticRow::new("char_moment", params, m.lhs, m.rhs, pass));
    }

    let (x, y) = (cfg.variance_x, cfg.variance_y);
    for f in forms {
        let v = variance_sum(std::slice::from_ref(f), &[1.0], x, y, FundamentalDiscriminant::new(-7)?)?;
        rows.push(DiagnosticRow::new(
            "variance",
            json!({"forms": [f.label()], "ell": [1.0], "x": x, "y": y, "d": -7}),
            v.value,
            v.main_term,
            v.residual().abs() < 1.5,
        ));
        let diag = orthogonality_sum(f, f, x, y)?;
        let via = diagonal_sum_via_sym_powers(f, x, y)?;
        rows.push(DiagnosticRow::new(
            "orthogonality_diagonal",
            json!({"form": f.label(), "x": x, "y": y}),
            diag,
            via,
            (diag - via).abs() <= 1e-10 * diag.abs().max(1.0),
        ));
    }
    if forms.len() >= 2 {
        let labels: Vec<&str> = forms.iter().map(|f| f.label()).collect();
        let ells = vec![1.0; forms.len()];
        let v = variance_sum(forms, &ells, x, y, FundamentalDiscriminant::new(-7)?)?;
        rows.push(DiagnosticRow::new(
            "variance",
            json!({"forms": labels, "ell": ells, "x": x, "y": y, "d": -7}),
            v.value,
            v.main_term,
            v.residual().abs() < 1.5,
        ));
        for i in 0..forms.len() {
            for j in i + 1..forms.len() {
                let s = orthogonality_sum(&forms[i], &forms[j], x, y)?;
                rows.push(DiagnosticRow::new(
                    "orthogonality_offdiagonal",
                    json!({"forms": [forms[i].label(), forms[j].label()], "x": x, "y": y}),
                    s.abs(),
                    2.0,
                    s.abs() < 2.0,
                ));
            }
        }
    }

    let ells = vec![1.0; forms.len()];
    let s2 = sigma2(&ells, cfg.big_d as f64);
    for t in [1.0, 2.0, 3.0] {
        let v = s2.sqrt() * t;
        let st = exceedance_count(&filter, forms, &ells, v, cfg.epsilon, cfg.x_cap)?;
        rows.push(DiagnosticRow::new(
            "exceedance",
            json!({"base": base, "t": t, "V": v, "eps": cfg.epsilon, "x": st.x, "x_capped": st.x_capped,
                   "count": st.count, "sample": st.sample_size, "sigma2": st.sigma2, "eta": st.eta}),
            st.count as f64,
            st.bound,
            st.count as f64 <= st.bound,
        ));
    }

    let (num, closed) = gaussian_integral(s2.sqrt());
    rows.push(DiagnosticRow::new(
        "gaussian_integral",
        json!({"sigma": s2.sqrt()}),
        num,
        closed,
        ((num - closed) / closed).abs() < 1e-8,
    ));

    for f in forms {
        let checked = chandee_rows(f, records, cfg.chandee_max_d, cfg.chandee_slack)?;
        let violations = checked.iter().filter(|r| !r.pass).count();
        rows.push(DiagnosticRow::new(
            "chandee_violations",
            json!({"form": f.label(), "max_d": cfg.chandee_max_d, "C0": cfg.chandee_slack, "tested": checked.len()}),
            violations as f64,
            checked.len() as f64,
            violations == 0,
        ));
        rows.extend(checked);
    }
    Ok(rows)
}
