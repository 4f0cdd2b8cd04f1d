//! Central values of `L(s, sym³ f × χ_d)` by the approximate functional
//! equation, empirical root numbers and the period proxy.
//!
//! For a self-dual `Λ(s) = Q^{s/2} γ(s) L(s) = ε Λ(1-s)` and any kernel
//! `G` with `G(0) = 1`,
//!
//! ```text
//! L(1/2) = Σ a(n) n^{-1/2} V_G(n/√Q) + ε Σ a(n) n^{-1/2} V_{G(-·)}(n/√Q).
//! ```
//!
//! Taking `G = X^w` for two values of `X` separates the two sign
//! hypotheses: with `S_X` the first sum, `ε = +1` forces
//! `S_X + S_{1/X} = 2 S_1` and `ε = -1` forces `S_X = S_{1/X}`.

mod kernel;
pub mod store;

pub use kernel::{GammaData, KernelTable, SmoothingKernel, QUADRATURE_TOL, TABLE_STEP};

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hecke::SymCubeCoefficients;
use crate::quadchar::{CharTable, FundamentalDiscriminant};

/// Numerical settings of the approximate functional equation.
#[derive(Clone, Debug, PartialEq)]
pub struct AfeSettings {
    /// Regularization exponent of the main kernel.
    pub c_primary: f64,
    /// Second exponent for the kernel-change check.
    pub c_alt: f64,
    /// Balance `X` of the sign test (`X ≠ 1`).
    pub balance: f64,
    pub sigma0: f64,
    pub step: f64,
    pub height: f64,
    /// Kernel values below this are treated as zero; fixes `N_cut`.
    pub tail_tol: f64,
    /// Relative residual (to the absolute sum) accepted by the sign test.
    pub sign_tol: f64,
}

impl Default for AfeSettings {
    fn default() -> Self {
        AfeSettings {
            c_primary: 0.0,
            c_alt: 0.02,
            balance: 1.25,
            sigma0: 1.0,
            step: 0.1,
            height: 60.0,
            tail_tol: 1e-12,
            sign_tol: 1e-6,
        }
    }
}

/// Minimum ratio between the rejected and the accepted sign residual.
pub const SIGN_SEPARATION: f64 = 100.0;

/// Kernel tables for one gamma factor, shared by every evaluation.
#[derive(Clone, Debug)]
pub struct AfeEngine {
    gamma: GammaData,
    settings: AfeSettings,
    primary: KernelTable,
    alt: KernelTable,
}

/// The four smoothed sums of one evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AfeSums {
    /// Main kernel, `X = 1`.
    pub s1: f64,
    /// Alternative regularization, `X = 1`.
    pub s_alt: f64,
    /// Main kernel at `X` and at `1/X`.
    pub s_x: f64,
    pub s_x_inv: f64,
    /// `Σ |a(n)| n^{-1/2} V(n/√Q)`, the size against which residuals are judged.
    pub scale: f64,
    pub n_cut: usize,
}

impl AfeSums {
    /// `|S_X + S_{1/X} - 2 S_1|`, zero when `ε = +1`.
    pub fn residual_plus(&self) -> f64 {
        (self.s_x + self.s_x_inv - 2.0 * self.s1).abs()
    }

    /// `|S_X - S_{1/X}|`, zero when `ε = -1`.
    pub fn residual_minus(&self) -> f64 {
        (self.s_x - self.s_x_inv).abs()
    }
}

impl AfeEngine {
    pub fn new(gamma: GammaData, settings: AfeSettings) -> Result<Self> {
        if !(settings.balance > 0.0) || settings.balance == 1.0 {
            return Err(Error::Config(format!("AFE balance must be positive and != 1, got {}", settings.balance)));
        }
        let mk = |c: f64| {
            let mut k = SmoothingKernel::new(gamma.clone(), c);
            k.sigma0 = settings.sigma0;
            k.step = settings.step;
            k.height = settings.height;
            KernelTable::build(&k, settings.tail_tol)
        };
        let primary = mk(settings.c_primary)?;
        let alt = mk(settings.c_alt)?;
        Ok(AfeEngine { gamma, settings, primary, alt })
    }

    /// Engine for `L(s, sym³ f × χ_d)` with `f` of weight `weight`.
    pub fn sym_cube(weight: u32, settings: AfeSettings) -> Result<Self> {
        Self::new(GammaData::sym_cube(weight), settings)
    }

    pub fn gamma(&self) -> &GammaData {
        &self.gamma
    }

    pub fn settings(&self) -> &AfeSettings {
        &self.settings
    }

    pub fn primary_table(&self) -> &KernelTable {
        &self.primary
    }

    fn x_max(&self) -> f64 {
        self.settings.balance.max(1.0 / self.settings.balance)
    }

    /// Largest `y = n/√Q` at which any kernel in use is nonzero.
    pub fn y_cut(&self) -> f64 {
        (self.primary.y_end() * self.x_max()).max(self.alt.y_end())
    }

    /// Number of terms needed at conductor `Q = sqrt_q²`.
    pub fn n_cut(&self, sqrt_q: f64) -> usize {
        (self.y_cut() * sqrt_q).ceil() as usize
    }

    /// Smoothed sums of `χ(n) a(n) n^{-1/2}` over `n <= n_cut`; `coeffs[n]`
    /// holds `a(n)`.
    pub fn sums(&self, coeffs: &[f64], chi: Option<&CharTable>, sqrt_q: f64, n_cut: usize) -> Result<AfeSums> {
        if n_cut >= coeffs.len() {
            return Err(Error::InsufficientCoefficients { needed: n_cut, available: coeffs.len().saturating_sub(1) });
        }
        let x = self.settings.balance;
        let (inv_q, inv_x) = (1.0 / sqrt_q, 1.0 / x);
        let period: &[i8] = chi.map(|c| c.period()).unwrap_or(&[1]);
        let m = period.len();
        let mut r = 0usize;
        let mut s = AfeSums { s1: 0.0, s_alt: 0.0, s_x: 0.0, s_x_inv: 0.0, scale: 0.0, n_cut };
        // past this point only the alternative kernel is nonzero
        let shared = ((self.primary.y_end() * self.x_max() * sqrt_q).ceil() as usize).min(n_cut);
        for (n, &b) in coeffs.iter().enumerate().take(shared + 1).skip(1) {
            r += 1;
            if r == m {
                r = 0;
            }
            let c = period[r];
            if c == 0 || b == 0.0 {
                continue;
            }
            let nf = n as f64;
            let a = c as f64 * b / nf.sqrt();
            let y = nf * inv_q;
            let v = self.primary.eval(y);
            s.s1 += a * v;
            s.scale += a.abs() * v.abs();
            s.s_alt += a * self.alt.eval(y);
            s.s_x += a * self.primary.eval(y * inv_x);
            s.s_x_inv += a * self.primary.eval(y * x);
        }
        for (n, &b) in coeffs.iter().enumerate().take(n_cut + 1).skip(shared + 1) {
            r += 1;
            if r == m {
                r = 0;
            }
            let c = period[r];
            if c == 0 || b == 0.0 {
                continue;
            }
            let nf = n as f64;
            s.s_alt += c as f64 * b / nf.sqrt() * self.alt.eval(nf * inv_q);
        }
        Ok(s)
    }

    /// Sign from the balanced sums. A hypothesis is accepted when its
    /// residual is below `sign_tol · scale` and at least `SIGN_SEPARATION`
    /// times smaller than the other one; a small derivative at the centre can
    /// push the wrong residual under the threshold too.
    pub fn decide_sign(&self, sums: &AfeSums, d: i64) -> Result<i8> {
        let threshold = self.settings.sign_tol * sums.scale;
        let (plus, minus) = (sums.residual_plus(), sums.residual_minus());
        if plus >= threshold && minus >= threshold {
            return Err(Error::InconsistentRootNumber { d, plus, minus, threshold });
        }
        if minus < threshold && plus > SIGN_SEPARATION * minus {
            Ok(-1)
        } else if plus < threshold && minus > SIGN_SEPARATION * plus {
            Ok(1)
        } else {
            Err(Error::AmbiguousRootNumber { d, plus, minus, threshold })
        }
    }
}

/// `L(s, sym³ f × χ_d)`, or `L(s, sym³ f)` itself when `d` is absent.
#[derive(Clone, Debug)]
pub struct TwistedLSeries {
    pub form: Arc<SymCubeCoefficients>,
    pub d: Option<FundamentalDiscriminant>,
    pub gamma: GammaData,
    pub epsilon: Option<i8>,
}

impl TwistedLSeries {
    pub fn new(form: Arc<SymCubeCoefficients>, d: FundamentalDiscriminant) -> Self {
        let gamma = GammaData::sym_cube(form.weight());
        TwistedLSeries { form, d: Some(d), gamma, epsilon: None }
    }

    pub fn untwisted(form: Arc<SymCubeCoefficients>) -> Self {
        let gamma = GammaData::sym_cube(form.weight());
        TwistedLSeries { form, d: None, gamma, epsilon: None }
    }

    pub fn with_epsilon(mut self, eps: i8) -> Self {
        assert!(eps == 1 || eps == -1);
        self.epsilon = Some(eps);
        self
    }

    /// `Q = |d|⁴` at level one.
    pub fn conductor(&self) -> f64 {
        self.d.map_or(1.0, |d| (d.abs() as f64).powi(4))
    }

    pub fn sqrt_conductor(&self) -> f64 {
        self.d.map_or(1.0, |d| (d.abs() as f64).powi(2))
    }

    /// `χ_d(n) b(n)`; zero when `gcd(n, d) > 1`.
    pub fn twisted_coefficient(&self, n: usize) -> f64 {
        let chi = self.d.map_or(1, |d| d.chi(n as u64));
        chi as f64 * self.form.b(n)
    }

    fn d_value(&self) -> i64 {
        self.d.map_or(1, |d| d.get())
    }
}

/// Outcome of one central-value evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct CentralValue {
    pub d: i64,
    pub form_label: String,
    pub epsilon: i8,
    /// `(1 + ε) S_1`; exactly zero when `ε = -1`.
    pub value: f64,
    /// Same with the alternative regularization.
    pub value_alt: f64,
    pub sums: AfeSums,
}

impl CentralValue {
    /// `|S_X - S_{1/X}|` divided by the scale: how well the odd functional
    /// equation holds numerically.
    pub fn odd_residual(&self) -> f64 {
        self.sums.residual_minus() / self.sums.scale
    }

    /// Relative change under the kernel switch.
    pub fn kernel_change(&self) -> f64 {
        relative_change(self.value, self.value_alt)
    }
}

/// `|a - b| / |a|`, or `|a - b|` when `a` is zero.
pub fn relative_change(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        (a - b).abs()
    } else {
        ((a - b) / a).abs()
    }
}

/// Computes the AFE sums for `series` and turns them into a central value,
/// determining the root number empirically unless it is already set.
pub fn central_value(series: &TwistedLSeries, engine: &AfeEngine) -> Result<CentralValue> {
    central_value_with_cut(series, engine, engine.n_cut(series.sqrt_conductor()))
}

/// As [`central_value`] with an explicit truncation point.
pub fn central_value_with_cut(series: &TwistedLSeries, engine: &AfeEngine, n_cut: usize) -> Result<CentralValue> {
    if engine.gamma() != &series.gamma {
        return Err(Error::InvalidInput("engine gamma factor does not match the series".into()));
    }
    let chi = series.d.map(CharTable::new);
    let sums = engine.sums(series.form.as_slice(), chi.as_ref(), series.sqrt_conductor(), n_cut)?;
    let epsilon = match series.epsilon {
        Some(e) => e,
        None => engine.decide_sign(&sums, series.d_value())?,
    };
    let (value, value_alt) = if epsilon == 1 { (2.0 * sums.s1, 2.0 * sums.s_alt) } else { (0.0, 0.0) };
    if value < -1e-6 * sums.scale {
        log::warn!(
            "negative central value {value:e} for d = {}, {} (scale {:e})",
            series.d_value(),
            series.form.label(),
            sums.scale
        );
    }
    Ok(CentralValue { d: series.d_value(), form_label: series.form.label().to_string(), epsilon, value, value_alt, sums })
}

/// The root number, determined from the balanced sums.
pub fn root_number(series: &TwistedLSeries, engine: &AfeEngine) -> Result<i8> {
    let mut s = series.clone();
    s.epsilon = None;
    Ok(central_value(&s, engine)?.epsilon)
}

/// Truncation and kernel robustness of one value.
#[derive(Clone, Debug, PartialEq)]
pub struct RobustnessReport {
    pub value: CentralValue,
    pub doubled: CentralValue,
    pub truncation_change: f64,
    pub kernel_change: f64,
}

impl RobustnessReport {
    /// For `ε = +1`: both relative changes below `tol`, or absolute changes
    /// below `1e-8` when the value is near zero. For `ε = -1`: the odd
    /// residual below `vanish_tol` at both truncations.
    pub fn passes(&self, tol: f64, vanish_tol: f64) -> bool {
        if self.value.epsilon == 1 {
            let near_zero = self.value.value.abs() < 1e-8;
            let ok = |rel: f64, other: f64| rel < tol || (near_zero && (self.value.value - other).abs() < 1e-8);
            ok(self.truncation_change, self.doubled.value) && ok(self.kernel_change, self.value.value_alt)
        } else {
            self.value.odd_residual() < vanish_tol && self.doubled.odd_residual() < vanish_tol
        }
    }
}

/// Evaluates at `N_cut` and `2 N_cut`.
pub fn robustness(series: &TwistedLSeries, engine: &AfeEngine) -> Result<RobustnessReport> {
    let n = engine.n_cut(series.sqrt_conductor());
    let value = central_value_with_cut(series, engine, n)?;
    let fixed = series.clone().with_epsilon(value.epsilon);
    let doubled = central_value_with_cut(&fixed, engine, 2 * n)?;
    Ok(RobustnessReport {
        truncation_change: relative_change(value.value, doubled.value),
        kernel_change: value.kernel_change(),
        value,
        doubled,
    })
}

/// `χ_d(-1)`: `-1` for every negative discriminant.
pub fn chi_minus_one(d: i64) -> i8 {
    if d < 0 {
        -1
    } else {
        1
    }
}

/// The model `ε(d) = s · χ_d(-M)` with `M = 1` at level one and one global
/// sign `s` per form, fitted to empirical root numbers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootNumberModel {
    pub form_label: String,
    pub global_sign: i8,
    pub samples: usize,
}

impl RootNumberModel {
    /// Fits `s` and checks it reproduces every sample.
    pub fn fit(form_label: &str, samples: &[(i64, i8)]) -> Result<Self> {
        let Some(&(d0, e0)) = samples.first() else {
            return Err(Error::InvalidInput("no root-number samples to fit".into()));
        };
        let s = e0 * chi_minus_one(d0);
        for &(d, e) in samples {
            if s * chi_minus_one(d) != e {
                return Err(Error::Consistency(format!(
                    "root number {e} at d = {d} contradicts global sign {s} fitted at d = {d0}"
                )));
            }
        }
        Ok(RootNumberModel { form_label: form_label.to_string(), global_sign: s, samples: samples.len() })
    }

    pub fn predict(&self, d: i64) -> i8 {
        self.global_sign * chi_minus_one(d)
    }
}

/// `∏ sqrt(max(L_i, 0) / L(1, χ_d))`, the d-dependent part of the squared
/// period relation with all constants set to 1.
pub fn period_proxy(l1_chi: f64, central_values: &[f64]) -> f64 {
    central_values.iter().map(|&l| (l.max(0.0) / l1_chi).sqrt()).product()
}
