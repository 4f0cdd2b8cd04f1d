//! Family averages of products of central values over dyadic windows of
//! discriminants, the period-proxy average, and the sweep that fits their
//! growth in `log D`.

pub mod chart;

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hecke::{sym_cube_dirichlet, CoefficientTable, EigenformSpec, SymCubeCoefficients};
use crate::lvalue::store::{CentralValueRecord, ValueStore};
use crate::lvalue::{central_value, period_proxy, AfeEngine, AfeSettings, RootNumberModel, TwistedLSeries};
use crate::quadchar::{dirichlet_l1, enumerate_discriminants, DiscriminantFilter, FundamentalDiscriminant};

/// Empirical root numbers required before the sign model is trusted.
pub const MIN_MODEL_SAMPLES: usize = 20;

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub forms: Vec<EigenformSpec>,
    pub ells: Vec<f64>,
    pub blocks: Vec<u64>,
    pub residue: i64,
    pub modulus: u64,
    pub afe: AfeSettings,
}

impl ExperimentConfig {
    pub fn new(forms: Vec<EigenformSpec>, ells: Vec<f64>, blocks: Vec<u64>, residue: i64, modulus: u64) -> Result<Self> {
        let cfg = ExperimentConfig { forms, ells, blocks, residue, modulus, afe: AfeSettings::default() };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.forms.is_empty() {
            return Err(Error::Config("at least one form is required".into()));
        }
        if self.forms.len() != self.ells.len() {
            return Err(Error::Config(format!("{} exponents for {} forms", self.ells.len(), self.forms.len())));
        }
        let mut labels: Vec<&str> = self.forms.iter().map(|f| f.label.as_str()).collect();
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Config("forms must be pairwise distinct".into()));
        }
        if let Some(l) = self.ells.iter().find(|l| !(**l > 0.0) || !l.is_finite()) {
            return Err(Error::Config(format!("exponents must be positive, got {l}")));
        }
        for &d in &self.blocks {
            DiscriminantFilter::dyadic(d, self.residue, self.modulus).map_err(|e| Error::Config(e.to_string()))?;
        }
        Ok(())
    }

    /// `(form, ℓ)` pairs in label order, the order every product is taken in.
    pub fn canonical(&self) -> Vec<(EigenformSpec, f64)> {
        let mut v: Vec<_> = self.forms.iter().cloned().zip(self.ells.iter().copied()).collect();
        v.sort_by(|a, b| a.0.label.cmp(&b.0.label));
        v
    }

    /// `Σ ℓ_i(ℓ_i - 1)/2`.
    pub fn predicted_exponent(&self) -> f64 {
        self.ells.iter().map(|l| l * (l - 1.0) / 2.0).sum()
    }

    /// `-m/8`.
    pub fn predicted_period_exponent(&self) -> f64 {
        -(self.forms.len() as f64) / 8.0
    }
}

/// Central values of every form at one discriminant, in canonical order.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyRow {
    pub d: i64,
    pub l1_chi: f64,
    pub values: Vec<f64>,
    pub epsilons: Vec<i8>,
}

impl FamilyRow {
    pub fn vanishes(&self) -> bool {
        self.epsilons.contains(&-1)
    }
}

fn clamp(d: i64, v: f64) -> f64 {
    if v < 0.0 {
        log::warn!("clamping negative central value {v:e} at d = {d} to 0");
        0.0
    } else {
        v
    }
}

/// `Σ_d ∏_i L_i(d)^{ℓ_i}`; divide by `D` or by the family size.
pub fn moment_sum(rows: &[FamilyRow], ells: &[f64]) -> f64 {
    rows.iter().map(|r| r.values.iter().zip(ells).map(|(&v, &l)| clamp(r.d, v).powf(l)).product::<f64>()).sum()
}

/// `(1/D) Σ_d ∏_i L(1/2, sym³ f_i × χ_d)^{ℓ_i}`.
pub fn moment_statistic(rows: &[FamilyRow], ells: &[f64], big_d: u64) -> f64 {
    moment_sum(rows, ells) / big_d as f64
}

/// `Σ_d ∏_i sqrt(L_i(d) / L(1, χ_d))`.
pub fn period_sum(rows: &[FamilyRow]) -> f64 {
    rows.iter()
        .map(|r| {
            let v: Vec<f64> = r.values.iter().map(|&v| clamp(r.d, v)).collect();
            period_proxy(r.l1_chi, &v)
        })
        .sum()
}

/// `(1/D) Σ_d ∏_i |B|`-proxy.
pub fn decorrelation_statistic(rows: &[FamilyRow], big_d: u64) -> f64 {
    period_sum(rows) / big_d as f64
}

/// `S⁽ⁱ⁾(D) = (1/D) Σ_d L_i(d)/L(1, χ_d)` for each form; by Cauchy–Schwarz
/// `T(D)² <= ∏ S⁽ⁱ⁾(D)` when there are two forms.
pub fn normalized_first_moments(rows: &[FamilyRow], big_d: u64) -> Vec<f64> {
    let m = rows.first().map_or(0, |r| r.values.len());
    (0..m)
        .map(|i| rows.iter().map(|r| clamp(r.d, r.values[i]) / r.l1_chi).sum::<f64>() / big_d as f64)
        .collect()
}

/// Coefficients and kernel tables of one form.
#[derive(Clone, Debug)]
pub struct FormData {
    pub spec: EigenformSpec,
    pub coeffs: Arc<SymCubeCoefficients>,
    pub engine: Arc<AfeEngine>,
}

impl FormData {
    pub fn new(table: &CoefficientTable, afe: &AfeSettings) -> Result<Self> {
        let coeffs = Arc::new(sym_cube_dirichlet(table, table.n_max())?);
        let engine = Arc::new(AfeEngine::sym_cube(table.spec().weight, afe.clone())?);
        Ok(FormData { spec: table.spec().clone(), coeffs, engine })
    }

    pub fn from_parts(spec: EigenformSpec, coeffs: Arc<SymCubeCoefficients>, engine: Arc<AfeEngine>) -> Self {
        FormData { spec, coeffs, engine }
    }

    /// Largest `|d|` whose central value the coefficient table supports.
    pub fn max_computable(&self) -> u64 {
        let y = self.engine.y_cut();
        let mut m = (self.coeffs.n_max() as f64 / y).sqrt().floor() as u64;
        while m > 0 && self.engine.n_cut((m * m) as f64) > self.coeffs.n_max() {
            m -= 1;
        }
        m
    }

    pub fn computable(&self, d: FundamentalDiscriminant) -> bool {
        d.abs() <= self.max_computable()
    }

    /// Evaluates the central value with an empirical root number.
    pub fn evaluate(&self, d: FundamentalDiscriminant, l1_chi: f64) -> Result<CentralValueRecord> {
        let cv = central_value(&TwistedLSeries::new(self.coeffs.clone(), d), &self.engine)?;
        Ok(CentralValueRecord {
            d: d.get(),
            form_label: self.spec.label.clone(),
            epsilon: cv.epsilon,
            l_half: cv.value,
            l1_chi,
            n_cut: cv.sums.n_cut,
        })
    }
}

/// Supplies central values from a store, computing and persisting what is
/// missing. Values beyond the coefficient range are filled from the fitted
/// root-number model when it forces vanishing.
pub struct ValueProvider {
    forms: Vec<FormData>,
    store: ValueStore,
    allow_compute: bool,
    models: BTreeMap<String, RootNumberModel>,
}

impl ValueProvider {
    /// `forms` in any order; they are kept in label order.
    pub fn new(mut forms: Vec<FormData>, store: ValueStore, allow_compute: bool) -> Self {
        forms.sort_by(|a, b| a.spec.label.cmp(&b.spec.label));
        ValueProvider { forms, store, allow_compute, models: BTreeMap::new() }
    }

    pub fn store(&self) -> &ValueStore {
        &self.store
    }

    pub fn into_store(self) -> ValueStore {
        self.store
    }

    pub fn model(&self, label: &str) -> Option<&RootNumberModel> {
        self.models.get(label)
    }

    fn form_index(&self, label: &str) -> Result<usize> {
        self.forms
            .iter()
            .position(|f| f.spec.label == label)
            .ok_or_else(|| Error::InvalidInput(format!("no coefficient data for {label}")))
    }

    /// Makes sure every `(d, form)` pair has a record, evaluating in
    /// parallel and inserting in ascending `(|d|, label)` order.
    fn fill(&mut self, ds: &[FundamentalDiscriminant], labels: &[String]) -> Result<()> {
        let mut todo = Vec::new();
        for &d in ds {
            for label in labels {
                if self.store.get(d.get(), label).is_none() {
                    todo.push((d, self.form_index(label)?));
                }
            }
        }
        if todo.is_empty() {
            return Ok(());
        }
        if !self.allow_compute {
            let (d, i) = todo[0];
            return Err(Error::MissingValue { d: d.get(), label: self.forms[i].spec.label.clone() });
        }
        let mut fitted = Vec::new();
        let mut direct = Vec::new();
        for (d, i) in todo {
            if self.forms[i].computable(d) {
                direct.push((d, i));
            } else {
                fitted.push((d, i));
            }
        }
        let forms = &self.forms;
        let computed: Vec<Result<CentralValueRecord>> = direct
            .par_iter()
            .map(|&(d, i)| {
                let l1 = dirichlet_l1(d)?;
                forms[i].evaluate(d, l1)
            })
            .collect();
        let mut new: Vec<CentralValueRecord> = computed.into_iter().collect::<Result<_>>()?;
        for (d, i) in fitted {
            let label = self.forms[i].spec.label.clone();
            let model = self.models.get(&label).ok_or_else(|| Error::InsufficientCoefficients {
                needed: self.forms[i].engine.n_cut((d.abs() * d.abs()) as f64),
                available: self.forms[i].coeffs.n_max(),
            })?;
            let eps = model.predict(d.get());
            if eps != -1 {
                return Err(Error::InsufficientCoefficients {
                    needed: self.forms[i].engine.n_cut((d.abs() * d.abs()) as f64),
                    available: self.forms[i].coeffs.n_max(),
                });
            }
            new.push(CentralValueRecord { d: d.get(), form_label: label, epsilon: -1, l_half: 0.0, l1_chi: dirichlet_l1(d)?, n_cut: 0 });
        }
        new.sort_by(|a, b| (a.d.unsigned_abs(), &a.form_label).cmp(&(b.d.unsigned_abs(), &b.form_label)));
        for r in new {
            self.store.insert(r)?;
        }
        Ok(())
    }

    /// Fits the root-number model of every form from the smallest
    /// discriminants of the residue class that the coefficients reach.
    pub fn fit_models(&mut self, residue: i64, modulus: u64) -> Result<()> {
        for i in 0..self.forms.len() {
            let label = self.forms[i].spec.label.clone();
            let reach = self.forms[i].max_computable();
            let mut samples = Vec::new();
            if reach >= 3 {
                let filter = DiscriminantFilter::new(3, reach, residue, modulus)?;
                let ds = enumerate_discriminants(&filter);
                // at most a few times the minimum, smallest first
                let ds: Vec<_> = ds.into_iter().take(4 * MIN_MODEL_SAMPLES).collect();
                if self.allow_compute {
                    self.fill(&ds, std::slice::from_ref(&label))?;
                }
                for d in ds {
                    match self.store.get(d.get(), &label) {
                        Some(r) if r.n_cut > 0 => samples.push((r.d, r.epsilon)),
                        _ => {}
                    }
                }
            }
            if samples.len() < MIN_MODEL_SAMPLES {
                log::warn!("only {} empirical root numbers for {label}; no sign model", samples.len());
                continue;
            }
            let model = RootNumberModel::fit(&label, &samples)?;
            log::info!("root-number model for {label}: global sign {} from {} samples", model.global_sign, model.samples);
            self.models.insert(label, model);
        }
        Ok(())
    }

    /// Rows for a family in ascending `|d|`, values in label order of
    /// `labels` (which must be sorted).
    pub fn rows(&mut self, family: &[FundamentalDiscriminant], labels: &[String]) -> Result<Vec<FamilyRow>> {
        self.fill(family, labels)?;
        let mut rows = Vec::with_capacity(family.len());
        for &d in family {
            let recs: Vec<&CentralValueRecord> = labels.iter().map(|l| self.store.get(d.get(), l).expect("filled")).collect();
            rows.push(FamilyRow {
                d: d.get(),
                l1_chi: recs[0].l1_chi,
                values: recs.iter().map(|r| r.l_half).collect(),
                epsilons: recs.iter().map(|r| r.epsilon).collect(),
            });
        }
        Ok(rows)
    }
}

/// Statistics of one dyadic block.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockStats {
    pub big_d: u64,
    pub family_size: usize,
    /// `S(D)` with the `1/D` normalization.
    pub s: f64,
    /// `S(D)` with `1/#family`.
    pub s_family: f64,
    pub t: f64,
    pub t_family: f64,
    /// Members where at least one root number is `-1`.
    pub vanishing: usize,
    /// `∏ S⁽ⁱ⁾(D)`, the Cauchy–Schwarz bound for `T(D)²`.
    pub cs_bound: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MomentReport {
    pub labels: Vec<String>,
    pub ells: Vec<f64>,
    pub residue: i64,
    pub modulus: u64,
    pub blocks: Vec<BlockStats>,
    pub predicted_exponent: f64,
    pub predicted_period_exponent: f64,
    /// Least-squares slope of `log S(D)` against `log log D`; `None` when
    /// some block has `S(D) = 0`.
    pub slope_s: Option<f64>,
    pub slope_t: Option<f64>,
}

/// Least-squares slope of `log v` against `log log D`.
pub fn fitted_slope(points: &[(u64, f64)]) -> Option<f64> {
    if points.len() < 2 || points.iter().any(|&(_, v)| !(v > 0.0)) {
        return None;
    }
    let xs: Vec<f64> = points.iter().map(|&(d, _)| (d as f64).ln().ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, v)| v.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Some(sxy / sxx)
}

/// Runs every block of `cfg`, using `provider` for the central values.
pub fn dyadic_sweep(cfg: &ExperimentConfig, provider: &mut ValueProvider) -> Result<MomentReport> {
    cfg.validate()?;
    if cfg.blocks.len() < 3 {
        return Err(Error::InsufficientBlocks(cfg.blocks.len()));
    }
    if cfg.blocks.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("blocks must be strictly ascending".into()));
    }
    provider.fit_models(cfg.residue, cfg.modulus)?;
    let canon = cfg.canonical();
    let labels: Vec<String> = canon.iter().map(|(f, _)| f.label.clone()).collect();
    let ells: Vec<f64> = canon.iter().map(|&(_, l)| l).collect();
    let mut blocks = Vec::new();
    for &big_d in &cfg.blocks {
        let family = enumerate_discriminants(&DiscriminantFilter::dyadic(big_d, cfg.residue, cfg.modulus)?);
        let rows = provider.rows(&family, &labels)?;
        let n = rows.len().max(1) as f64;
        let (s_sum, t_sum) = (moment_sum(&rows, &ells), period_sum(&rows));
        blocks.push(BlockStats {
            big_d,
            family_size: rows.len(),
            s: s_sum / big_d as f64,
            s_family: s_sum / n,
            t: t_sum / big_d as f64,
            t_family: t_sum / n,
            vanishing: rows.iter().filter(|r| r.vanishes()).count(),
            cs_bound: normalized_first_moments(&rows, big_d).iter().product(),
        });
    }
    let slope_s = fitted_slope(&blocks.iter().map(|b| (b.big_d, b.s)).collect::<Vec<_>>());
    let slope_t = fitted_slope(&blocks.iter().map(|b| (b.big_d, b.t)).collect::<Vec<_>>());
    Ok(MomentReport {
        labels,
        ells,
        residue: cfg.residue,
        modulus: cfg.modulus,
        blocks,
        predicted_exponent: cfg.predicted_exponent(),
        predicted_period_exponent: cfg.predicted_period_exponent(),
        slope_s,
        slope_t,
    })
}

pub const REPORT_HEADER: &str = "D,family_size,S,S_family,predicted_exponent,T,T_family,predicted_T_exponent,vanishing,cs_bound";

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or("none".to_string(), |s| format!("{s:?}"))
}

impl MomentReport {
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# forms={} ells={} residue={} modulus={}\n{REPORT_HEADER}\n",
            self.labels.join(";"),
            self.ells.iter().map(|l| format!("{l:?}")).collect::<Vec<_>>().join(";"),
            self.residue,
            self.modulus
        );
        for b in &self.blocks {
            out += &format!(
                "{},{},{:?},{:?},{:?},{:?},{:?},{:?},{},{:?}\n",
                b.big_d,
                b.family_size,
                b.s,
                b.s_family,
                self.predicted_exponent,
                b.t,
                b.t_family,
                self.predicted_period_exponent,
                b.vanishing,
                b.cs_bound
            );
        }
        out += &format!("# slope_S={} slope_T={}\n", fmt_opt(self.slope_s), fmt_opt(self.slope_t));
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(d: i64, l1: f64, values: &[f64]) -> FamilyRow {
        FamilyRow { d, l1_chi: l1, values: values.to_vec(), epsilons: vec![1; values.len()] }
    }

    #[test]
    fn empty_family() {
        assert_eq!(moment_statistic(&[], &[1.0], 100), 0.0);
        assert_eq!(decorrelation_statistic(&[], 100), 0.0);
    }

    #[test]
    fn first_moment_average() {
        let rows = [row(-3, 1.0, &[2.0]), row(-7, 1.0, &[4.0])];
        assert_eq!(moment_statistic(&rows, &[1.0], 10), 0.6);
    }

    #[test]
    fn negatives_clamped() {
        let rows = [row(-3, 1.0, &[-1e-12]), row(-7, 4.0, &[16.0])];
        assert_eq!(moment_statistic(&rows, &[0.5], 1), 4.0);
        assert_eq!(decorrelation_statistic(&rows, 1), 2.0);
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(u64, f64)> = [250u64, 500, 1000, 2000].iter().map(|&d| (d, 3.0 * (d as f64).ln().powf(-0.125))).collect();
        assert!((fitted_slope(&pts).unwrap() + 0.125).abs() < 1e-12);
        let mut zero = pts.clone();
        zero[1].1 = 0.0;
        assert_eq!(fitted_slope(&zero), None);
    }

    #[test]
    fn config_validation() {
        let f = |k| EigenformSpec::builtin(k).unwrap();
        assert!(ExperimentConfig::new(vec![f(12), f(12)], vec![0.5, 0.5], vec![250, 500, 1000], 1, 4).is_err());
        assert!(ExperimentConfig::new(vec![f(12)], vec![0.0], vec![250, 500, 1000], 1, 4).is_err());
        let c = ExperimentConfig::new(vec![f(16), f(12)], vec![0.5, 2.0], vec![250, 500, 1000], 1, 4).unwrap();
        assert_eq!(c.canonical()[0].0.label, "1.12.a.a");
        assert_eq!(c.predicted_exponent(), -0.125 + 1.0);
        assert_eq!(c.predicted_period_exponent(), -0.25);
    }
}
