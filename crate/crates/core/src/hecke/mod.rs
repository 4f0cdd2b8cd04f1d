//! Level-one Hecke eigenforms: Fourier coefficients, Satake angles and the
//! symmetric-cube Dirichlet series built from them.

pub mod cache;
pub mod lmfdb;
pub mod qexp;
mod satake;
mod symcube;

pub use satake::{
    chebyshev_u, satake_angle, satake_from_lambda, sym_cube_power_sum, sym_cube_prime_power,
    sym_power_lambda, SatakeAngle, DELIGNE_TOL,
};
pub use symcube::{for_each_sym_cube_chunk, sym_cube_dirichlet, sym_cube_dirichlet_with_budget, SymCubeCoefficients};

use std::fmt;

use crate::crt::{Crt, Wide};
use crate::error::{Error, Result};
use crate::primes;

/// Weights whose level-one cusp space is one-dimensional and generated here.
pub const BUILTIN_WEIGHTS: [u32; 6] = [12, 16, 18, 20, 22, 26];

/// Default memory ceiling for coefficient generation.
pub const DEFAULT_MEMORY_BUDGET: usize = 4 << 30;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EigenformSpec {
    pub weight: u32,
    pub level: u32,
    pub label: String,
}

impl EigenformSpec {
    pub fn new(weight: u32, label: impl Into<String>) -> Result<Self> {
        if weight < 12 || weight % 2 == 1 {
            return Err(Error::InvalidInput(format!(
                "weight must be even and at least 12, got {weight}"
            )));
        }
        Ok(EigenformSpec { weight, level: 1, label: label.into() })
    }

    /// The unique normalized level-one form of a supported weight.
    pub fn builtin(weight: u32) -> Result<Self> {
        if !BUILTIN_WEIGHTS.contains(&weight) {
            return Err(Error::UnsupportedWeight(weight));
        }
        Self::new(weight, format!("1.{weight}.a.a"))
    }

    pub fn delta() -> Self {
        Self::builtin(12).unwrap()
    }

    /// Parses a database label `level.weight.character.orbit`.
    pub fn from_label(label: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("cannot parse form label {label:?}"));
        let parts: Vec<&str> = label.split('.').collect();
        if parts.len() != 4 {
            return Err(bad());
        }
        let level: u32 = parts[0].parse().map_err(|_| bad())?;
        let weight: u32 = parts[1].parse().map_err(|_| bad())?;
        if level != 1 {
            return Err(Error::InvalidInput(format!("only level 1 is supported, label {label} has level {level}")));
        }
        if parts[2] != "a" || parts[3].is_empty() || !parts[3].bytes().all(|b| b.is_ascii_lowercase()) {
            return Err(bad());
        }
        Self::new(weight, label)
    }

    pub fn is_builtin(&self) -> bool {
        BUILTIN_WEIGHTS.contains(&self.weight) && self.label == format!("1.{}.a.a", self.weight)
    }

    /// `(k-1)/2`, the exponent of the analytic normalization.
    pub fn half_weight(&self) -> f64 {
        (self.weight as f64 - 1.0) / 2.0
    }
}

impl fmt::Display for EigenformSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// Bits needed to hold `|a(n)| <= d(n) n^{(k-1)/2}` for every `n <= n_max`,
/// with room for the sign and the Hecke-relation right-hand sides.
pub fn coefficient_bits(weight: u32, n_max: usize) -> u32 {
    let log2n = (n_max.max(2) as f64).log2();
    ((weight as f64 - 1.0) / 2.0 * log2n).ceil() as u32 + 22
}

#[derive(Clone, Copy, Debug)]
pub struct GenerationOptions {
    /// Keep the exact residues after construction (needed for cache files).
    pub keep_exact: bool,
    pub memory_budget: usize,
}

impl Default for GenerationOptions {
    fn default() -> Self {
        GenerationOptions { keep_exact: true, memory_budget: DEFAULT_MEMORY_BUDGET }
    }
}

#[derive(Clone, Debug)]
struct Exact {
    crt: Crt,
    // residues[i][n] modulo prime i, Montgomery form
    residues: Vec<Vec<u64>>,
}

impl Exact {
    fn get(&self, n: usize) -> Wide {
        let r: Vec<u64> = self.residues.iter().map(|v| v[n]).collect();
        self.crt.reconstruct(&r)
    }
}

/// Fourier coefficients `a(1..=n_max)` of a normalized eigenform.
///
/// The analytically normalized values `λ(n) = a(n)/n^{(k-1)/2}` are always
/// present; exact integers are available while the residues are retained.
#[derive(Clone, Debug)]
pub struct CoefficientTable {
    spec: EigenformSpec,
    n_max: usize,
    lambda: Vec<f64>,
    exact: Option<Exact>,
}

impl CoefficientTable {
    pub fn spec(&self) -> &EigenformSpec {
        &self.spec
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `λ(n)`, with index 0 holding 0.
    pub fn lambdas(&self) -> &[f64] {
        &self.lambda
    }

    pub fn lambda(&self, n: usize) -> f64 {
        self.lambda[n]
    }

    /// `a(n)` as a float (exact up to rounding).
    pub fn a_f64(&self, n: usize) -> f64 {
        self.lambda[n] * (n as f64).powf(self.spec.half_weight())
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// Exact `a(n)`, if residues were kept.
    pub fn exact(&self, n: usize) -> Option<Wide> {
        assert!(n >= 1 && n <= self.n_max, "index {n} outside 1..={}", self.n_max);
        self.exact.as_ref().map(|e| e.get(n))
    }

    /// All exact coefficients `a(1..=n_max)`.
    pub fn exact_all(&self) -> Option<Vec<Wide>> {
        self.exact.as_ref().map(|e| (1..=self.n_max).map(|n| e.get(n)).collect())
    }

    /// Releases the residues, keeping only the normalized values.
    pub fn drop_exact(&mut self) {
        self.exact = None;
    }

    /// Same form restricted to `n <= n_max`.
    pub fn truncated(&self, n_max: usize) -> Self {
        let n_max = n_max.min(self.n_max);
        CoefficientTable {
            spec: self.spec.clone(),
            n_max,
            lambda: self.lambda[..=n_max].to_vec(),
            exact: self.exact.as_ref().map(|e| Exact {
                crt: e.crt.clone(),
                residues: e.residues.iter().map(|v| v[..=n_max].to_vec()).collect(),
            }),
        }
    }

    /// Builds a table from exact integers `a(1), a(2), ...` and verifies it.
    pub fn from_integers(spec: EigenformSpec, a: &[Wide]) -> Result<Self> {
        let n_max = a.len();
        if n_max == 0 {
            return Err(Error::InvalidInput("empty coefficient list".into()));
        }
        let bits = coefficient_bits(spec.weight, n_max);
        for (i, v) in a.iter().enumerate() {
            if v.bits() + 21 > bits {
                return Err(Error::Integrity(format!(
                    "a({}) = {v} exceeds the Deligne-type size bound for weight {}",
                    i + 1,
                    spec.weight
                )));
            }
        }
        let crt = Crt::new(Crt::primes_for_bits(bits));
        let residues: Vec<Vec<u64>> = crt
            .fields()
            .iter()
            .map(|f| std::iter::once(0).chain(a.iter().map(|v| f.to_mont(v.rem(f.p)))).collect())
            .collect();
        let exact = Exact { crt, residues };
        let table = Self::from_exact(spec, n_max, exact)?;
        table.verify()?;
        Ok(table)
    }

    fn from_exact(spec: EigenformSpec, n_max: usize, exact: Exact) -> Result<Self> {
        let hw = spec.half_weight();
        let mut lambda = vec![0.0; n_max + 1];
        for (n, l) in lambda.iter_mut().enumerate().skip(1) {
            *l = exact.get(n).to_f64() / (n as f64).powf(hw);
        }
        Ok(CoefficientTable { spec, n_max, lambda, exact: Some(exact) })
    }

    /// Exact checks: `a(1) = 1`, the Deligne bound at every prime, the
    /// Hecke recursion at every prime power and multiplicativity at every
    /// `n`. Congruences are tested modulo each CRT prime; the modulus
    /// product exceeds twice every quantity involved, so they are
    /// equalities.
    pub fn verify(&self) -> Result<()> {
        let Some(ex) = &self.exact else {
            return Err(Error::Integrity("exact coefficients were discarded; cannot verify".into()));
        };
        let k = self.spec.weight;
        let n = self.n_max;
        if ex.get(1) != Wide::from_i64(1) {
            return Err(Error::Integrity(format!("a(1) = {}, expected 1", ex.get(1))));
        }
        let ps = primes::primes_up_to(n as u64);
        // Deligne: a(p)^2 <= 4 p^{k-1}
        for &p in &ps {
            // λ(p) is accurate to ~1e-15, so only near-extremal primes need
            // the exact comparison
            if self.lambda[p as usize].abs() < 2.0 - 1e-6 {
                continue;
            }
            let a = ex.get(p as usize);
            let a2 = a.checked_mul(&a).expect("bounded by construction");
            let mut rhs = Wide::from_i64(4);
            let pw = Wide::from_i64(p as i64);
            for _ in 0..k - 1 {
                rhs = rhs.checked_mul(&pw).expect("bounded by construction");
            }
            if a2.cmp_abs(&rhs) == std::cmp::Ordering::Greater {
                return Err(Error::DeligneViolation { p, lambda: self.lambda[p as usize] });
            }
        }
        let spf = primes::smallest_prime_factors(n);
        for (f, res) in ex.crt.fields().iter().zip(&ex.residues) {
            for &p in &ps {
                if p * p > n as u64 {
                    break;
                }
                let pk = f.pow(f.to_mont(p), (k - 1) as u64);
                let ap = res[p as usize];
                let (mut prev, mut cur) = (f.to_mont(1), ap);
                let mut q = p * p;
                while q <= n as u64 {
                    let want = f.sub(f.mul(ap, cur), f.mul(pk, prev));
                    if res[q as usize] != want {
                        return Err(Error::Integrity(format!(
                            "Hecke recursion fails at {q} = {p}^j (mod {})",
                            f.p
                        )));
                    }
                    prev = cur;
                    cur = want;
                    q *= p;
                }
            }
            for m in 2..=n {
                let p = spf[m] as usize;
                let mut pe = p;
                while m % (pe * p) == 0 {
                    pe *= p;
                }
                if pe == m {
                    continue;
                }
                if res[m] != f.mul(res[pe], res[m / pe]) {
                    return Err(Error::Integrity(format!(
                        "multiplicativity fails: a({m}) != a({pe}) a({}) (mod {})",
                        m / pe,
                        f.p
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Rough peak memory of generating `n_max` coefficients of weight `k`.
pub fn generation_memory(weight: u32, n_max: usize) -> usize {
    let primes = Crt::primes_for_bits(coefficient_bits(weight, n_max));
    let len = (2 * n_max + 1).next_power_of_two();
    let buffers = if weight == 12 { 1 } else { 2 };
    n_max * 8 * (primes + 3) + buffers * len * 8
}

/// `τ(n)` for `n <= n_max`.
pub fn delta_coefficients(n_max: usize) -> Result<CoefficientTable> {
    builtin_coefficients(&EigenformSpec::delta(), n_max)
}

/// Coefficients of the unique normalized cusp form of a supported weight.
pub fn builtin_coefficients(spec: &EigenformSpec, n_max: usize) -> Result<CoefficientTable> {
    builtin_coefficients_with(spec, n_max, GenerationOptions::default())
}

pub fn builtin_coefficients_with(
    spec: &EigenformSpec,
    n_max: usize,
    opts: GenerationOptions,
) -> Result<CoefficientTable> {
    if !BUILTIN_WEIGHTS.contains(&spec.weight) || spec.level != 1 {
        return Err(Error::UnsupportedWeight(spec.weight));
    }
    if n_max == 0 {
        return Err(Error::InvalidInput("N_max must be at least 1".into()));
    }
    let need = generation_memory(spec.weight, n_max);
    if need > opts.memory_budget {
        return Err(Error::Resource(format!(
            "generating {n_max} coefficients needs about {} MiB, budget is {} MiB",
            need >> 20,
            opts.memory_budget >> 20
        )));
    }
    let crt = Crt::new(Crt::primes_for_bits(coefficient_bits(spec.weight, n_max)));
    log::debug!("generating {n_max} coefficients of {} with {} primes", spec.label, crt.fields().len());
    let residues = qexp::cusp_form_residues(spec.weight, n_max, &crt);
    let mut table = CoefficientTable::from_exact(spec.clone(), n_max, Exact { crt, residues })?;
    table.verify()?;
    if !opts.keep_exact {
        table.drop_exact();
    }
    Ok(table)
}
