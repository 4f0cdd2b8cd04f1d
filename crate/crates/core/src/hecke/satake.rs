use num_complex::Complex64;

use super::CoefficientTable;
use crate::error::{Error, Result};

/// Slack allowed beyond `|λ| = 2` before a coefficient is rejected.
pub const DELIGNE_TOL: f64 = 1e-9;

/// `θ_p ∈ [0, π]` with `2 cos θ_p = λ(p)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SatakeAngle {
    pub p: u64,
    pub theta: f64,
}

impl SatakeAngle {
    pub fn lambda(&self) -> f64 {
        2.0 * self.theta.cos()
    }

    pub fn sym_power(&self, r: u32) -> f64 {
        sym_power_lambda(self.theta, r)
    }
}

pub fn satake_from_lambda(p: u64, lambda: f64) -> Result<SatakeAngle> {
    if !lambda.is_finite() || lambda.abs() > 2.0 + DELIGNE_TOL {
        return Err(Error::DeligneViolation { p, lambda });
    }
    let x = (lambda / 2.0).clamp(-1.0, 1.0);
    Ok(SatakeAngle { p, theta: x.acos() })
}

pub fn satake_angle(table: &CoefficientTable, p: u64) -> Result<SatakeAngle> {
    if p as usize > table.n_max() {
        return Err(Error::InsufficientCoefficients { needed: p as usize, available: table.n_max() });
    }
    satake_from_lambda(p, table.lambda(p as usize))
}

/// `U_r(x)` by the three-term recursion.
pub fn chebyshev_u(x: f64, r: u32) -> f64 {
    let (mut u0, mut u1) = (1.0, 2.0 * x);
    if r == 0 {
        return u0;
    }
    for _ in 1..r {
        let u2 = 2.0 * x * u1 - u0;
        u0 = u1;
        u1 = u2;
    }
    u1
}

/// `λ_{sym^r}(p) = sin((r+1)θ)/sin θ`; near `θ ∈ {0, π}` the recursion is
/// used instead of the ratio.
pub fn sym_power_lambda(theta: f64, r: u32) -> f64 {
    let s = theta.sin();
    if s.abs() < 1e-3 {
        chebyshev_u(theta.cos(), r)
    } else {
        ((r as f64 + 1.0) * theta).sin() / s
    }
}

/// `b(p^j)` for `L(s, sym³ f)`, by the degree-4 recursion with
/// `e₁ = e₃ = U₃`, `e₂ = U₄ + 1`, `e₄ = 1`.
pub fn sym_cube_prime_power(theta: f64, j: u32) -> f64 {
    let lambda = 2.0 * theta.cos();
    prime_powers_from_lambda(lambda, j as usize)[j as usize]
}

/// `b(p^0..=p^j)` from `λ(p)`, using `U₃ = λ³ - 2λ`, `U₄ = λ⁴ - 3λ² + 1`.
pub(crate) fn prime_powers_from_lambda(lambda: f64, j: usize) -> Vec<f64> {
    let l2 = lambda * lambda;
    let e1 = lambda * (l2 - 2.0);
    let e2 = l2 * (l2 - 3.0) + 2.0;
    let mut b = vec![0.0; j + 1];
    b[0] = 1.0;
    let at = |b: &[f64], i: isize| if i < 0 { 0.0 } else { b[i as usize] };
    for i in 1..=j {
        let i = i as isize;
        b[i as usize] = e1 * at(&b, i - 1) - e2 * at(&b, i - 2) + e1 * at(&b, i - 3) - at(&b, i - 4);
    }
    b
}

/// `b(p^j)` as the complete homogeneous symmetric polynomial of degree `j`
/// in `{α³, α, α⁻¹, α⁻³}`, summed over all multisets directly.
pub fn sym_cube_power_sum(theta: f64, j: u32) -> f64 {
    let a = Complex64::from_polar(1.0, theta);
    let s = [a * a * a, a, a.inv(), (a * a * a).inv()];
    let mut total = Complex64::new(0.0, 0.0);
    for i0 in 0..=j {
        for i1 in 0..=j - i0 {
            for i2 in 0..=j - i0 - i1 {
                let i3 = j - i0 - i1 - i2;
                total += s[0].powu(i0) * s[1].powu(i1) * s[2].powu(i2) * s[3].powu(i3);
            }
        }
    }
    debug_assert!(total.im.abs() < 1e-6 * (1.0 + total.re.abs()));
    total.re
}
