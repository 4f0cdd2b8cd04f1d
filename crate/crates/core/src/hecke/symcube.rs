use super::satake::prime_powers_from_lambda;
use super::{satake_from_lambda, CoefficientTable};
use crate::error::{Error, Result};
use crate::primes::primes_up_to;

const SEGMENT: usize = 1 << 18;

/// Dirichlet coefficients `b(1..=n_max)` of `L(s, sym³ f)`, analytic
/// normalization. Index 0 holds 0.
#[derive(Clone, Debug)]
pub struct SymCubeCoefficients {
    label: String,
    weight: u32,
    b: Vec<f64>,
}

impl SymCubeCoefficients {
    pub fn from_vec(label: impl Into<String>, weight: u32, b: Vec<f64>) -> Self {
        assert!(!b.is_empty());
        SymCubeCoefficients { label: label.into(), weight, b }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn n_max(&self) -> usize {
        self.b.len() - 1
    }

    pub fn b(&self, n: usize) -> f64 {
        self.b[n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.b
    }
}

/// Streams `b(n)` for `1 <= n <= n_max` in ascending chunks, calling
/// `sink(first_n, values)`. Memory stays at a few segments plus the
/// prime-power tables for `p <= √n_max`.
pub fn for_each_sym_cube_chunk(
    table: &CoefficientTable,
    n_max: usize,
    mut sink: impl FnMut(usize, &[f64]),
) -> Result<()> {
    if n_max > table.n_max() {
        return Err(Error::InsufficientCoefficients { needed: n_max, available: table.n_max() });
    }
    let lam = table.lambdas();
    let root = (n_max as f64).sqrt() as usize + 1;
    let small: Vec<u64> = primes_up_to(root as u64);
    // b(p^j) for the small primes, j up to log_p(n_max)
    let mut powers: Vec<Vec<f64>> = Vec::with_capacity(small.len());
    for &p in &small {
        if p as usize > n_max {
            break;
        }
        let angle = satake_from_lambda(p, lam[p as usize])?;
        let mut j = 0;
        let mut q = 1usize;
        while q <= n_max / p as usize {
            q *= p as usize;
            j += 1;
        }
        powers.push(prime_powers_from_lambda(angle.lambda(), j));
    }
    let mut rem = vec![0u64; SEGMENT];
    let mut val = vec![0f64; SEGMENT];
    let mut lo = 1usize;
    while lo <= n_max {
        let hi = (lo + SEGMENT - 1).min(n_max);
        let len = hi - lo + 1;
        for i in 0..len {
            rem[i] = (lo + i) as u64;
            val[i] = 1.0;
        }
        for (pi, &p) in small.iter().enumerate().take(powers.len()) {
            let p = p as usize;
            let mut m = lo.div_ceil(p) * p;
            while m <= hi {
                let i = m - lo;
                let mut r = rem[i];
                let mut e = 0;
                while r.is_multiple_of(p as u64) {
                    r /= p as u64;
                    e += 1;
                }
                rem[i] = r;
                val[i] *= powers[pi][e];
                m += p;
            }
        }
        for i in 0..len {
            let r = rem[i] as usize;
            if r > 1 {
                // a prime above √n_max
                let l = lam[r];
                if l.abs() > 2.0 + super::DELIGNE_TOL {
                    return Err(Error::DeligneViolation { p: r as u64, lambda: l });
                }
                val[i] *= l * (l * l - 2.0);
            }
        }
        sink(lo, &val[..len]);
        lo = hi + 1;
    }
    Ok(())
}

/// Materializes `b(n)` for `n <= n_max` within the default memory budget.
pub fn sym_cube_dirichlet(table: &CoefficientTable, n_max: usize) -> Result<SymCubeCoefficients> {
    sym_cube_dirichlet_with_budget(table, n_max, super::DEFAULT_MEMORY_BUDGET)
}

pub fn sym_cube_dirichlet_with_budget(
    table: &CoefficientTable,
    n_max: usize,
    budget: usize,
) -> Result<SymCubeCoefficients> {
    let need = (n_max + 1) * 8;
    if need > budget {
        return Err(Error::Resource(format!(
            "{n_max} symmetric-cube coefficients need {} MiB, budget is {} MiB",
            need >> 20,
            budget >> 20
        )));
    }
    let mut b = Vec::with_capacity(n_max + 1);
    b.push(0.0);
    for_each_sym_cube_chunk(table, n_max, |_, chunk| b.extend_from_slice(chunk))?;
    Ok(SymCubeCoefficients::from_vec(table.spec().label.clone(), table.spec().weight, b))
}
