//! Computable forms of the prime sums behind the conditional upper bounds:
//! twisted prime-power coefficients, the Chandee-type majorant of
//! `log L(1/2)`, the short Dirichlet polynomial `P(d; x, y)`, character
//! moments, variance sums and exceedance counts.

pub mod report;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hecke::{satake_angle, sym_power_lambda, CoefficientTable, SatakeAngle};
use crate::primes::{prime_powers_up_to, primes_up_to};
use crate::quadchar::{enumerate_discriminants, CharTable, DiscriminantFilter, FundamentalDiscriminant};

/// Default `ε` of the exceedance lemma.
pub const DEFAULT_EPSILON: f64 = 0.1;

/// Stand-in for the unspecified constant in the Chandee-type bound.
pub const CHANDEE_SLACK: f64 = 20.0;

/// Ceiling on `x = D^{1/(εV)}`, which is astronomically large for small `V`.
pub const DEFAULT_X_CAP: f64 = 1e6;

/// `Λ_{sym³ f × χ_d}(p^n)` without the `log p` factor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwistedVonMangoldt {
    pub p: u64,
    pub n: u32,
    pub value: f64,
}

/// `(α^{3n} + α^n + β^n + β^{3n}) χ_d(p)^n = (2cos 3nθ + 2cos nθ) χ_d(p)^n`,
/// zero when `p | d`.
pub fn twisted_lambda(theta: SatakeAngle, d: FundamentalDiscriminant, p: u64, n: u32) -> f64 {
    assert!(n >= 1, "prime power exponent must be positive");
    let chi = d.chi(p);
    if chi == 0 {
        return 0.0;
    }
    let nt = n as f64 * theta.theta;
    let sign = if n % 2 == 1 { chi as f64 } else { 1.0 };
    sign * 2.0 * ((3.0 * nt).cos() + nt.cos())
}

pub fn twisted_von_mangoldt(theta: SatakeAngle, d: FundamentalDiscriminant, p: u64, n: u32) -> TwistedVonMangoldt {
    TwistedVonMangoldt { p, n, value: twisted_lambda(theta, d, p, n) }
}

/// The same quantity at `n = 2` through the Hecke relation
/// `λ_{sym⁶} - λ_{sym⁴} + λ_{sym²} - 1`, restricted to `p ∤ d`.
pub fn twisted_lambda_square(theta: SatakeAngle, d: FundamentalDiscriminant, p: u64) -> f64 {
    if d.divides(p) {
        return 0.0;
    }
    let t = theta.theta;
    sym_power_lambda(t, 6) - sym_power_lambda(t, 4) + sym_power_lambda(t, 2) - 1.0
}

/// `λ_{sym³ f}(p) = 2cos 3θ + 2cos θ`.
pub fn sym_cube_lambda(theta: f64) -> f64 {
    2.0 * ((3.0 * theta).cos() + theta.cos())
}

/// Satake angles of one form at every prime up to a bound.
#[derive(Clone, Debug)]
pub struct PrimeData {
    label: String,
    bound: u64,
    primes: Arc<Vec<u64>>,
    theta: Vec<f64>,
}

impl PrimeData {
    pub fn from_table(table: &CoefficientTable, bound: u64) -> Result<Self> {
        Self::with_primes(table, Arc::new(primes_up_to(bound)), bound)
    }

    /// Reuses an already sieved prime list (`primes` must be all primes up
    /// to `bound`).
    pub fn with_primes(table: &CoefficientTable, primes: Arc<Vec<u64>>, bound: u64) -> Result<Self> {
        if bound as usize > table.n_max() {
            return Err(Error::InsufficientCoefficients { needed: bound as usize, available: table.n_max() });
        }
        let theta = primes.iter().map(|&p| satake_angle(table, p).map(|a| a.theta)).collect::<Result<Vec<_>>>()?;
        Ok(PrimeData { label: table.spec().label.clone(), bound, primes, theta })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Number of primes up to `x`.
    pub fn count_up_to(&self, x: f64) -> usize {
        self.primes.partition_point(|&p| p as f64 <= x)
    }

    pub fn theta(&self, i: usize) -> f64 {
        self.theta[i]
    }

    pub fn angle(&self, i: usize) -> SatakeAngle {
        SatakeAngle { p: self.primes[i], theta: self.theta[i] }
    }

    pub fn sym_cube(&self, i: usize) -> f64 {
        sym_cube_lambda(self.theta[i])
    }

    fn require(&self, x: f64) -> Result<()> {
        if x > self.bound as f64 {
            return Err(Error::InsufficientCoefficients { needed: x as usize, available: self.bound as usize });
        }
        Ok(())
    }
}

/// The individual terms of the Chandee-type majorant, in increasing order of
/// `p^n`:
/// `Λ(p^n) χ_d(p^n) / (n p^{n(1/2 + 1/log x)}) · log(x/p^n)/log x`.
pub fn chandee_terms(d: FundamentalDiscriminant, form: &PrimeData, x: f64) -> Result<Vec<f64>> {
    if !(x > 10.0) {
        return Err(Error::InvalidInput(format!("Chandee bound needs x > 10, got {x}")));
    }
    form.require(x)?;
    let lx = x.ln();
    let sigma = 0.5 + 1.0 / lx;
    let mut terms = Vec::new();
    for (p, n, q) in prime_powers_up_to(x.floor() as u64) {
        let i = form.primes.binary_search(&p).expect("prime list covers x");
        let value = twisted_lambda(form.angle(i), d, p, n);
        let qf = q as f64;
        terms.push(value / (n as f64 * qf.powf(sigma)) * (x / qf).ln() / lx);
    }
    Ok(terms)
}

/// Main term of the Chandee-type bound for `log L(1/2, sym³ f × χ_d)`; the
/// caller adds the slack `C₀ (log|d|/log x + 1)`.
pub fn chandee_bound(d: FundamentalDiscriminant, form: &PrimeData, x: f64) -> Result<f64> {
    Ok(chandee_terms(d, form, x)?.iter().sum())
}

/// Parameters of `P(d; x, y)`.
#[derive(Clone, Debug)]
pub struct PolyConfig {
    pub x: f64,
    pub y: f64,
    pub ells: Vec<f64>,
    pub forms: Vec<Arc<PrimeData>>,
}

impl PolyConfig {
    pub fn new(x: f64, y: f64, ells: Vec<f64>, forms: Vec<Arc<PrimeData>>) -> Result<Self> {
        if !(2.0 <= y && y <= x) {
            return Err(Error::InvalidInput(format!("need 2 <= y <= x, got y = {y}, x = {x}")));
        }
        if ells.len() != forms.len() {
            return Err(Error::InvalidInput(format!("{} weights for {} forms", ells.len(), forms.len())));
        }
        for f in &forms {
            f.require(y)?;
        }
        Ok(PolyConfig { x, y, ells, forms })
    }

    /// `(p, w(p))` for `p <= y` with
    /// `w(p) = (Σ ℓ_i λ_{sym³ f_i}(p)) p^{-(1/2 + 1/log x)} (1 - log p/log x)`.
    pub fn weights(&self) -> Vec<(u64, f64)> {
        let lx = self.x.ln();
        let sigma = 0.5 + 1.0 / lx;
        let Some(first) = self.forms.first() else {
            return Vec::new();
        };
        let count = first.count_up_to(self.y);
        (0..count)
            .map(|i| {
                let p = first.primes[i];
                let a: f64 = self.ells.iter().zip(&self.forms).map(|(l, f)| l * f.sym_cube(i)).sum();
                let pf = p as f64;
                (p, a * pf.powf(-sigma) * (1.0 - pf.ln() / lx))
            })
            .collect()
    }
}

/// `P(d; x, y) = Σ_{p <= y} (Σ ℓ_i λ_{sym³ f_i}(p)) χ_d(p) p^{-(1/2 + 1/log x)} (1 - log p/log x)`.
pub fn dirichlet_poly(d: FundamentalDiscriminant, cfg: &PolyConfig) -> f64 {
    poly_from_weights(&cfg.weights(), &CharTable::new(d))
}

fn poly_from_weights(weights: &[(u64, f64)], chi: &CharTable) -> f64 {
    weights.iter().map(|&(p, w)| w * chi.chi(p) as f64).sum()
}

/// Both sides of the large-sieve type moment bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentCheck {
    pub lhs: f64,
    pub rhs: f64,
}

impl MomentCheck {
    /// `lhs/rhs`, `NaN` when both vanish.
    pub fn ratio(&self) -> f64 {
        self.lhs / self.rhs
    }
}

/// `lhs = Σ_d (Σ_{p<=x} a_p χ_d(p) p^{-1/2})^{2r}` over the family and
/// `rhs = (2r)!/(r! 2^r) · D · (Σ_{p<=x} a_p²/p)^r` with `D` the lower end of
/// the window. The range `x <= D^{1/(10r)}` is where the bound is claimed;
/// it is not enforced.
pub fn char_moment_check(filter: &DiscriminantFilter, x: f64, r: u32, a: impl Fn(u64) -> f64) -> MomentCheck {
    let primes = primes_up_to(x.max(0.0).floor() as u64);
    let coeffs: Vec<(u64, f64)> = primes.iter().map(|&p| (p, a(p) / (p as f64).sqrt())).collect();
    let family = enumerate_discriminants(filter);
    let lhs = family
        .iter()
        .map(|&d| {
            let chi = CharTable::new(d);
            poly_from_weights(&coeffs, &chi).powi(2 * r as i32)
        })
        .sum();
    let diag: f64 = primes.iter().map(|&p| a(p).powi(2) / p as f64).sum();
    let rhs = double_factorial_odd(r) * filter.lo as f64 * diag.powi(r as i32);
    MomentCheck { lhs, rhs }
}

/// `(2r)!/(r! 2^r) = 1·3·5···(2r-1)`.
fn double_factorial_odd(r: u32) -> f64 {
    (1..=r).map(|j| (2 * j - 1) as f64).product()
}

fn check_range(x: f64, y: f64) -> Result<()> {
    if !(2.0 <= y && y <= x) {
        return Err(Error::InvalidInput(format!("need 2 <= y <= x, got y = {y}, x = {x}")));
    }
    Ok(())
}

/// `Σ_{y < p <= x} λ_{sym³ f_i}(p) λ_{sym³ f_j}(p) / p`.
pub fn orthogonality_sum(fi: &PrimeData, fj: &PrimeData, x: f64, y: f64) -> Result<f64> {
    check_range(x, y)?;
    fi.require(x)?;
    fj.require(x)?;
    let (lo, hi) = (fi.count_up_to(y), fi.count_up_to(x));
    Ok((lo..hi).map(|i| fi.sym_cube(i) * fj.sym_cube(i) / fi.primes[i] as f64).sum())
}

/// The diagonal sum through `λ_{sym³}(p)² = 1 + λ_{sym²}(p) + λ_{sym⁴}(p) + λ_{sym⁶}(p)`.
pub fn diagonal_sum_via_sym_powers(f: &PrimeData, x: f64, y: f64) -> Result<f64> {
    check_range(x, y)?;
    f.require(x)?;
    let (lo, hi) = (f.count_up_to(y), f.count_up_to(x));
    Ok((lo..hi)
        .map(|i| {
            let t = f.theta[i];
            (1.0 + sym_power_lambda(t, 2) + sym_power_lambda(t, 4) + sym_power_lambda(t, 6)) / f.primes[i] as f64
        })
        .sum())
}

/// A variance sum with its predicted main term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VarianceSum {
    pub value: f64,
    /// `(Σ ℓ_i²) log(log x / log y)`.
    pub main_term: f64,
}

impl VarianceSum {
    pub fn residual(&self) -> f64 {
        self.value - self.main_term
    }
}

/// `Σ_{y < p <= x} (Σ ℓ_i λ_{sym³ f_i}(p))² δ_{p∤d} / p`.
pub fn variance_sum(
    forms: &[Arc<PrimeData>],
    ells: &[f64],
    x: f64,
    y: f64,
    d: FundamentalDiscriminant,
) -> Result<VarianceSum> {
    check_range(x, y)?;
    if forms.is_empty() || forms.len() != ells.len() {
        return Err(Error::InvalidInput(format!("{} weights for {} forms", ells.len(), forms.len())));
    }
    for f in forms {
        f.require(x)?;
    }
    let f0 = &forms[0];
    let (lo, hi) = (f0.count_up_to(y), f0.count_up_to(x));
    let mut value = 0.0;
    for i in lo..hi {
        let p = f0.primes[i];
        if d.divides(p) {
            continue;
        }
        let a: f64 = ells.iter().zip(forms).map(|(l, f)| l * f.sym_cube(i)).sum();
        value += a * a / p as f64;
    }
    let main_term = ells.iter().map(|l| l * l).sum::<f64>() * (x.ln() / y.ln()).ln();
    Ok(VarianceSum { value, main_term })
}

/// Result of counting family members with a large Dirichlet polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct ExceedanceStats {
    pub v: f64,
    /// The cutoff actually used, `min(D^{1/(εV)}, x_cap)`.
    pub x: f64,
    pub x_capped: bool,
    pub count: usize,
    pub sample_size: usize,
    /// `σ²(D) = (Σ ℓ_i²) log log D`.
    pub sigma2: f64,
    /// `η(D) = (-1/2 + ε)(Σ ℓ_i) log log D`.
    pub eta: f64,
    /// `D (e^{-(1-2ε)V²/2σ²} (log log D)³ + e^{-(ε/11) V log V})`.
    pub bound: f64,
}

/// `σ²(D)` for weights `ells`.
pub fn sigma2(ells: &[f64], big_d: f64) -> f64 {
    ells.iter().map(|l| l * l).sum::<f64>() * big_d.ln().ln()
}

/// `η(D)` for weights `ells`.
pub fn eta(ells: &[f64], big_d: f64, epsilon: f64) -> f64 {
    (-0.5 + epsilon) * ells.iter().sum::<f64>() * big_d.ln().ln()
}

/// The two-regime tail bound for the exceedance count.
pub fn exceedance_bound(v: f64, big_d: f64, sigma2: f64, epsilon: f64) -> f64 {
    let ll = big_d.ln().ln();
    let v_log_v = if v > 0.0 { v * v.ln() } else { 0.0 };
    big_d * ((-(1.0 - 2.0 * epsilon) * v * v / (2.0 * sigma2)).exp() * ll.powi(3) + (-(epsilon / 11.0) * v_log_v).exp())
}

/// Counts `d` in the family with `P(d; x, x) > V` at `x = D^{1/(εV)}`
/// (capped at `x_cap`), where `D` is the lower end of the window.
pub fn exceedance_count(
    filter: &DiscriminantFilter,
    forms: &[Arc<PrimeData>],
    ells: &[f64],
    v: f64,
    epsilon: f64,
    x_cap: f64,
) -> Result<ExceedanceStats> {
    let big_d = filter.lo as f64;
    let raw = if v > 0.0 { big_d.powf(1.0 / (epsilon * v)) } else { f64::INFINITY };
    let x = raw.min(x_cap).max(2.0);
    let cfg = PolyConfig::new(x, x, ells.to_vec(), forms.to_vec())?;
    let weights = cfg.weights();
    let family = enumerate_discriminants(filter);
    let count = family.iter().filter(|&&d| poly_from_weights(&weights, &CharTable::new(d)) > v).count();
    let s2 = sigma2(ells, big_d);
    Ok(ExceedanceStats {
        v,
        x,
        x_capped: raw > x_cap,
        count,
        sample_size: family.len(),
        sigma2: s2,
        eta: eta(ells, big_d, epsilon),
        bound: exceedance_bound(v, big_d, s2, epsilon),
    })
}

/// `log 𝓛(d) = Σ ℓ_i log L(1/2, sym³ f_i × χ_d)`; `-∞` when a value is
/// not positive.
pub fn log_script_l(values: &[f64], ells: &[f64]) -> f64 {
    values.iter().zip(ells).map(|(&l, &e)| if l > 0.0 { e * l.ln() } else { f64::NEG_INFINITY }).sum()
}

/// `𝓑(V) = #{d : log 𝓛(d) > V}`.
pub fn script_b(log_values: &[f64], v: f64) -> usize {
    log_values.iter().filter(|&&l| l > v).count()
}

/// `e^η ∫ e^V 𝓑(V + η) dV`, integrated exactly over the steps of `𝓑`;
/// equals `Σ_d 𝓛(d)`.
pub fn layer_cake(log_values: &[f64], eta: f64) -> f64 {
    let mut steps: Vec<f64> = log_values.iter().copied().filter(|l| l.is_finite()).collect();
    steps.sort_by(f64::total_cmp);
    // On (t_{j-1} - η, t_j - η] exactly n - j values still exceed V + η.
    let n = steps.len();
    let mut total = 0.0;
    let mut prev = f64::NEG_INFINITY;
    for (j, &t) in steps.iter().enumerate() {
        let a = prev - eta;
        let b = t - eta;
        let piece = b.exp() - if a.is_finite() { a.exp() } else { 0.0 };
        total += (n - j) as f64 * piece;
        prev = t;
    }
    eta.exp() * total
}

/// `∫ e^V e^{-V²/2σ²} dV` by the trapezoidal rule against `√(2π) σ e^{σ²/2}`.
pub fn gaussian_integral(sigma: f64) -> (f64, f64) {
    let centre = sigma * sigma;
    let half = 12.0 * sigma + 1.0;
    let steps = 20_000;
    let h = 2.0 * half / steps as f64;
    let f = |v: f64| (v - v * v / (2.0 * sigma * sigma)).exp();
    let mut s = 0.5 * (f(centre - half) + f(centre + half));
    for i in 1..steps {
        s += f(centre - half + i as f64 * h);
    }
    let closed = (2.0 * std::f64::consts::PI).sqrt() * sigma * (sigma * sigma / 2.0).exp();
    (s * h, closed)
}
