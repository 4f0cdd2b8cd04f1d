//! q-expansions of level-one cusp forms modulo the transform primes.
//!
//! The weight-k form is `Δ · E_{k-12}` with `Δ = q·J(q)^8` and
//! `J = ∏(1 - q^n)^3 = Σ (-1)^m (2m+1) q^{m(m+1)/2}` (Jacobi). `J^2` is
//! formed exactly in `i64`; the remaining squarings and the Eisenstein
//! product are done by NTT independently modulo each prime.

use crate::crt::Crt;
use crate::ntt::Field;

/// Normalizing constant `c_w` in `E_w = 1 + c_w Σ σ_{w-1}(n) q^n`.
pub fn eisenstein_constant(w: u32) -> Option<i64> {
    match w {
        0 => Some(0),
        4 => Some(240),
        6 => Some(-504),
        8 => Some(480),
        10 => Some(-264),
        14 => Some(-24),
        _ => None,
    }
}

/// Coefficients of `J(q)^2` for degrees `< len`, exactly.
pub fn jacobi_squared(len: usize) -> Vec<i64> {
    let mut terms = Vec::new();
    let mut m = 0usize;
    while m * (m + 1) / 2 < len {
        let c = (2 * m + 1) as i64;
        terms.push((m * (m + 1) / 2, if m.is_multiple_of(2) { c } else { -c }));
        m += 1;
    }
    let mut out = vec![0i64; len];
    for (i, &(ei, ci)) in terms.iter().enumerate() {
        for &(ej, cj) in &terms[i..] {
            let e = ei + ej;
            if e >= len {
                break;
            }
            let v = ci * cj;
            out[e] += if ej == ei { v } else { 2 * v };
        }
    }
    out
}

/// `σ_r(n) mod p` for `0 <= n < len` (Montgomery form, index 0 unused).
fn divisor_sums(f: &Field, r: u32, len: usize) -> Vec<u64> {
    let mut s = vec![0u64; len];
    for d in 1..len {
        let dp = f.pow(f.to_mont(d as u64), r as u64);
        let mut m = d;
        while m < len {
            s[m] = f.add(s[m], dp);
            m += d;
        }
    }
    s
}

/// Residues of `a(0..=n_max)` (Montgomery form, `a(0) = 0`) for the
/// weight-`weight` level-one cusp form, one vector per prime of `crt`.
pub fn cusp_form_residues(weight: u32, n_max: usize, crt: &Crt) -> Vec<Vec<u64>> {
    let w = weight - 12;
    let c = eisenstein_constant(w).expect("caller validates the weight");
    let j2 = jacobi_squared(n_max);
    crt.fields()
        .iter()
        .map(|f| {
            let base: Vec<u64> = j2.iter().map(|&x| f.from_i64(x)).collect();
            let j4 = f.square_truncated(&base, n_max);
            drop(base);
            let j8 = f.square_truncated(&j4, n_max);
            drop(j4);
            let mut delta = Vec::with_capacity(n_max + 1);
            delta.push(0);
            delta.extend_from_slice(&j8);
            drop(j8);
            if w == 0 {
                return delta;
            }
            let mut e = divisor_sums(f, w - 1, n_max + 1);
            let cm = f.from_i64(c);
            for x in e.iter_mut() {
                *x = f.mul(*x, cm);
            }
            e[0] = f.to_mont(1);
            f.mul_truncated(&e, &delta, n_max + 1)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_square_against_product() {
        // ∏(1-q^n)^6 by direct multiplication
        let len = 60;
        let mut p = vec![0i64; len];
        p[0] = 1;
        for n in 1..len {
            for _ in 0..6 {
                for i in (n..len).rev() {
                    p[i] -= p[i - n];
                }
            }
        }
        assert_eq!(jacobi_squared(len), p);
    }

    #[test]
    fn first_tau_values() {
        let crt = Crt::new(2);
        let res = cusp_form_residues(12, 10, &crt);
        let tau: Vec<String> = (0..=10)
            .map(|n| {
                let r: Vec<u64> = res.iter().map(|v| v[n]).collect();
                crt.reconstruct(&r).to_string()
            })
            .collect();
        assert_eq!(
            tau,
            ["0", "1", "-24", "252", "-1472", "4830", "-6048", "-16744", "84480", "-113643", "-115920"]
        );
    }
}
