//! Smoothing weights for the approximate functional equation.
//!
//! `V(y) = (1/2πi) ∫_{(σ₀)} G(w) γ(1/2+w)/γ(1/2) y^{-w} dw/w` with
//! `G(w) = exp(c w²) X^w` and `γ(s) = ∏ Γ_C(s + μ_j)`. Since `X^w` only
//! rescales `y`, tables are built for `X = 1` and evaluated at `y/X`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::ln_gamma_c;

/// Archimedean data: one `Γ_C(s + μ)` per shift.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaData {
    pub shifts: Vec<f64>,
}

impl GammaData {
    pub fn new(shifts: Vec<f64>) -> Result<Self> {
        if shifts.is_empty() || shifts.iter().any(|&m| !(m >= 0.0) || !m.is_finite()) {
            return Err(Error::InvalidInput(format!("gamma shifts must be nonnegative, got {shifts:?}")));
        }
        Ok(GammaData { shifts })
    }

    /// Shifts `((3k-3)/2, (k-1)/2)` of `sym³` of a weight-`k` form.
    pub fn sym_cube(weight: u32) -> Self {
        let k = weight as f64;
        GammaData { shifts: vec![(3.0 * k - 3.0) / 2.0, (k - 1.0) / 2.0] }
    }

    /// Shift `(k-1)/2` of the standard L-function of a weight-`k` form.
    pub fn standard(weight: u32) -> Self {
        GammaData { shifts: vec![(weight as f64 - 1.0) / 2.0] }
    }

    pub fn degree(&self) -> usize {
        2 * self.shifts.len()
    }

    /// `log(γ(1/2 + w)/γ(1/2))`.
    pub fn ln_ratio(&self, w: Complex64) -> Complex64 {
        self.shifts
            .iter()
            .map(|&m| ln_gamma_c(w + 0.5 + m) - ln_gamma_c(Complex64::new(0.5 + m, 0.0)))
            .sum()
    }
}

/// Quadrature settings and kernel shape.
#[derive(Clone, Debug, PartialEq)]
pub struct SmoothingKernel {
    pub gamma: GammaData,
    /// Regularization exponent `c` in `exp(c w²)`.
    pub c: f64,
    /// Balance `X` in `X^w`.
    pub balance: f64,
    pub sigma0: f64,
    pub step: f64,
    pub height: f64,
}

/// Agreement required between successive step halvings.
pub const QUADRATURE_TOL: f64 = 1e-9;

impl SmoothingKernel {
    pub fn new(gamma: GammaData, c: f64) -> Self {
        SmoothingKernel { gamma, c, balance: 1.0, sigma0: 1.0, step: 0.1, height: 60.0 }
    }

    pub fn with_balance(mut self, x: f64) -> Self {
        self.balance = x;
        self
    }

    pub fn with_contour(mut self, sigma0: f64) -> Self {
        self.sigma0 = sigma0;
        self
    }

    /// The kernel of the dual sum, `G(-w)`.
    pub fn dual(&self) -> Self {
        let mut k = self.clone();
        k.balance = 1.0 / self.balance;
        k
    }

    /// Abscissa used for `y < 1`: left of the pole at 0, whose residue is
    /// one, and right of the first gamma pole, so `y^{-w}` is small instead
    /// of large.
    fn left_sigma(&self) -> f64 {
        let mu = self.gamma.shifts.iter().cloned().fold(f64::INFINITY, f64::min);
        -(0.5 * (0.5 + mu)).min(self.sigma0)
    }

    fn nodes(&self, step: f64) -> Nodes {
        self.nodes_at(step, self.sigma0)
    }

    fn nodes_at(&self, step: f64, sigma: f64) -> Nodes {
        let n = (self.height / step).ceil() as usize;
        let mut w = Vec::with_capacity(n + 1);
        let mut g = Vec::with_capacity(n + 1);
        for j in 0..=n {
            let wj = Complex64::new(sigma, j as f64 * step);
            let mut gj = (self.c * wj * wj + wj * self.balance.ln() + self.gamma.ln_ratio(wj)).exp() / wj;
            if j == 0 {
                gj *= 0.5;
            }
            w.push(wj);
            g.push(gj * step / PI);
        }
        Nodes { w, g }
    }

    /// `V(y)` by trapezoidal quadrature, halving the step until two
    /// successive results agree to [`QUADRATURE_TOL`].
    pub fn value(&self, y: f64) -> Result<f64> {
        if !(y >= 0.0) {
            return Err(Error::InvalidInput(format!("V(y) needs y >= 0, got {y}")));
        }
        if y == 0.0 {
            return Ok(1.0);
        }
        let (sigma, residue) = if y < 1.0 { (self.left_sigma(), 1.0) } else { (self.sigma0, 0.0) };
        let mut step = self.step;
        let mut prev = self.nodes_at(step, sigma).value(y);
        for _ in 0..2 {
            step /= 2.0;
            let cur = self.nodes_at(step, sigma).value(y);
            if (cur - prev).abs() <= QUADRATURE_TOL {
                return Ok(residue + cur);
            }
            prev = cur;
        }
        Err(Error::QuadratureNonconvergence(format!(
            "V({y}) with c = {}, σ₀ = {}: step halvings disagree",
            self.c, self.sigma0
        )))
    }
}

struct Nodes {
    w: Vec<Complex64>,
    // G(w) γ-ratio / w · (step/π), halved at t = 0
    g: Vec<Complex64>,
}

impl Nodes {
    fn value(&self, y: f64) -> f64 {
        let ly = y.ln();
        self.w.iter().zip(&self.g).map(|(w, g)| (g * (-w * ly).exp()).re).sum()
    }

    fn derivative(&self, y: f64) -> f64 {
        let ly = y.ln();
        -self.w.iter().zip(&self.g).map(|(w, g)| (g * w * (-w * ly).exp()).re).sum::<f64>() / y
    }
}

/// Spacing of the tabulation grid in `y`.
pub const TABLE_STEP: f64 = 1.0 / 128.0;
const TABLE_LIMIT: f64 = 5000.0;

/// `V` and `V'` on a uniform grid with cubic Hermite interpolation; zero
/// beyond the point where `|V|` falls below the tail tolerance for good.
#[derive(Clone, Debug)]
pub struct KernelTable {
    kernel: SmoothingKernel,
    vals: Vec<f64>,
    ders: Vec<f64>,
    y_end: f64,
}

impl KernelTable {
    /// Tabulates `kernel` (its balance is ignored; pass `y/X` to
    /// [`KernelTable::eval`]).
    pub fn build(kernel: &SmoothingKernel, tail_tol: f64) -> Result<Self> {
        let mut base = kernel.clone();
        base.balance = 1.0;
        let coarse = base.nodes(base.step);
        let fine = base.nodes(base.step / 2.0);
        let mut vals = vec![1.0];
        let mut ders = vec![0.0];
        let mut last_big = 0usize;
        let run = (1.0 / TABLE_STEP) as usize;
        let mut i = 1usize;
        loop {
            let y = i as f64 * TABLE_STEP;
            if y > TABLE_LIMIT {
                return Err(Error::QuadratureNonconvergence(format!(
                    "kernel with c = {} has not decayed below {tail_tol:e} by y = {TABLE_LIMIT}",
                    kernel.c
                )));
            }
            let v = fine.value(y);
            if (v - coarse.value(y)).abs() > QUADRATURE_TOL {
                return Err(Error::QuadratureNonconvergence(format!("V({y}) with c = {}", kernel.c)));
            }
            vals.push(v);
            ders.push(fine.derivative(y));
            if v.abs() > tail_tol {
                last_big = i;
            } else if i - last_big > run {
                break;
            }
            i += 1;
        }
        let end = last_big + 1;
        vals.truncate(end + 1);
        ders.truncate(end + 1);
        Ok(KernelTable { kernel: base, vals, ders, y_end: end as f64 * TABLE_STEP })
    }

    pub fn kernel(&self) -> &SmoothingKernel {
        &self.kernel
    }

    /// First grid point beyond which `|V| <= tail_tol`.
    pub fn y_end(&self) -> f64 {
        self.y_end
    }

    #[inline]
    pub fn eval(&self, y: f64) -> f64 {
        if y >= self.y_end {
            return 0.0;
        }
        let s = y * (1.0 / TABLE_STEP);
        let i = s as usize;
        let t = s - i as f64;
        let (v0, v1) = (self.vals[i], self.vals[i + 1]);
        let (d0, d1) = (self.ders[i] * TABLE_STEP, self.ders[i + 1] * TABLE_STEP);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * v0 + (t3 - 2.0 * t2 + t) * d0 + (-2.0 * t3 + 3.0 * t2) * v1 + (t3 - t2) * d1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_and_large_arguments() {
        let k = SmoothingKernel::new(GammaData::sym_cube(12), 0.0);
        assert!((k.value(1e-8).unwrap() - 1.0).abs() < 1e-6);
        assert!(k.value(200.0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn contour_independence() {
        for w in [12, 16, 26] {
            let k = SmoothingKernel::new(GammaData::sym_cube(w), 0.02);
            let a = k.value(1.0).unwrap();
            let b = k.clone().with_contour(2.0).value(1.0).unwrap();
            assert!((a - b).abs() < 1e-9, "weight {w}: {a} vs {b}");
        }
    }

    #[test]
    fn balance_rescales_argument() {
        let k = SmoothingKernel::new(GammaData::sym_cube(16), 0.0);
        let kx = k.clone().with_balance(1.25);
        let a = kx.value(3.0).unwrap();
        let b = k.value(3.0 / 1.25).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn table_interpolates_direct_values() {
        let k = SmoothingKernel::new(GammaData::sym_cube(12), 0.0);
        let t = KernelTable::build(&k, 1e-12).unwrap();
        assert!(t.y_end() > 10.0 && t.y_end() < 100.0);
        for y in [0.001, 0.3, 1.0, 2.6, 7.5, 15.0, t.y_end() * 0.9] {
            let direct = k.value(y).unwrap();
            assert!((t.eval(y) - direct).abs() < 1e-10, "y = {y}");
            assert!(direct >= -1e-12);
        }
        assert_eq!(t.eval(t.y_end() + 1.0), 0.0);
    }
}
