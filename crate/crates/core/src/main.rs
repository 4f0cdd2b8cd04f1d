use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use symcube::config::{Config, Source};
use symcube::error::{Error, Result};
use symcube::grh::report::{run_suite, write_report, SuiteConfig};
use symcube::grh::PrimeData;
use symcube::hecke::{cache, sym_cube_dirichlet, EigenformSpec};
use symcube::lvalue::store::{CentralValueRecord, ValueStore, HEADER};
use symcube::lvalue::{robustness, AfeEngine, TwistedLSeries};
use symcube::moments::{chart, dyadic_sweep, ExperimentConfig, FormData, ValueProvider};
use symcube::quadchar::{dirichlet_l1, enumerate_discriminants, DiscriminantFilter, FundamentalDiscriminant};

#[derive(Parser, Debug)]
#[command(name = "symcube", version, about = "Central values and moments of twisted symmetric-cube L-functions")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// key = value configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Never touch the network
    #[arg(long, global = true)]
    offline: bool,
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    database_url: Option<String>,
    /// auto, builtin or lmfdb
    #[arg(long, global = true)]
    source: Option<String>,
    /// Log verbosity (repeat for more)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Args, Debug, Clone, Default)]
struct FormArgs {
    /// Newform label(s), comma separated, e.g. 1.12.a.a
    #[arg(long, value_delimiter = ',')]
    form: Vec<String>,
    /// Weight(s) of built-in level-one forms, comma separated
    #[arg(long, value_delimiter = ',')]
    weight: Vec<u32>,
}

impl FormArgs {
    fn labels(&self) -> Result<Vec<String>> {
        let mut out = self.form.clone();
        for &k in &self.weight {
            out.push(EigenformSpec::builtin(k).map_err(|e| Error::Config(e.to_string()))?.label);
        }
        Ok(out)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Svg,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write (or extend) the coefficient cache of a form
    Coeffs {
        #[command(flatten)]
        forms: FormArgs,
        #[arg(long)]
        terms: Option<f64>,
        /// Copy the cache file here as well
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One central value as a CSV row: d,form_label,epsilon,L_half,L1_chi,N_cut
    Lvalue {
        #[command(flatten)]
        forms: FormArgs,
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
        /// Also check truncation doubling and the kernel change
        #[arg(long)]
        check: bool,
        /// Print the CSV header first
        #[arg(long)]
        header: bool,
    },
    /// Dyadic sweep of the moment statistics
    Moments {
        /// Configuration file (same as --config)
        file: Option<PathBuf>,
        #[command(flatten)]
        forms: FormArgs,
        #[arg(long)]
        dmin: Option<u64>,
        #[arg(long)]
        dmax: Option<u64>,
        #[arg(long, allow_hyphen_values = true)]
        residue: Option<i64>,
        #[arg(long)]
        modulus: Option<u64>,
        #[arg(long, value_delimiter = ',')]
        ell: Vec<f64>,
        #[arg(long)]
        terms: Option<f64>,
        /// Central-value store
        #[arg(long)]
        values: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Prime-sum diagnostics, one CSV row per check
    GrhCheck {
        file: Option<PathBuf>,
        #[command(flatten)]
        forms: FormArgs,
        /// D of the diagnostic family
        #[arg(long)]
        dmin: Option<u64>,
        #[arg(long, allow_hyphen_values = true)]
        residue: Option<i64>,
        #[arg(long)]
        modulus: Option<u64>,
        #[arg(long)]
        terms: Option<f64>,
        #[arg(long)]
        values: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn build_config(common: &Common, file: Option<&Path>) -> Result<Config> {
    let mut cfg = match common.config.as_deref().or(file) {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    cfg.apply_env();
    if let Some(d) = &common.cache_dir {
        cfg.cache_dir = d.clone();
    }
    if common.offline {
        cfg.offline = true;
    }
    if let Some(t) = common.threads {
        cfg.threads = t;
    }
    if let Some(u) = &common.database_url {
        cfg.database.base_url = u.clone();
    }
    if let Some(s) = &common.source {
        cfg.source = s.parse::<Source>()?;
    }
    Ok(cfg)
}

fn spec_of(label: &str) -> Result<EigenformSpec> {
    EigenformSpec::from_label(label).map_err(|e| Error::Config(e.to_string()))
}

fn single_form(forms: &FormArgs) -> Result<EigenformSpec> {
    match forms.labels()?.as_slice() {
        [one] => spec_of(one),
        [] => Err(Error::Config("give --form or --weight".into())),
        _ => Err(Error::Config("exactly one form expected".into())),
    }
}

fn cmd_coeffs(cfg: &Config, forms: &FormArgs, terms: Option<f64>, out: Option<&Path>) -> Result<i32> {
    let labels = forms.labels()?;
    if labels.is_empty() {
        return Err(Error::Config("give --form or --weight".into()));
    }
    let n = terms.map_or(cfg.terms, |t| t as usize);
    for label in &labels {
        let spec = spec_of(label)?;
        let wrote = cfg.ensure_cached(&spec, n)?;
        let path = cache::cache_path(&cfg.cache_dir, label);
        log::info!("{}: {} ({} terms)", path.display(), if wrote { "written" } else { "up to date" }, n);
        if let Some(out) = out {
            let dest = if labels.len() > 1 || out.is_dir() { out.join(format!("{label}.coeff")) } else { out.to_path_buf() };
            if dest != path {
                std::fs::copy(&path, &dest)?;
            }
        }
        println!("{}", path.display());
    }
    Ok(0)
}

fn cmd_lvalue(cfg: &Config, forms: &FormArgs, d: i64, check: bool, header: bool) -> Result<i32> {
    let spec = single_form(forms)?;
    let d = FundamentalDiscriminant::new(d).map_err(|e| Error::Config(e.to_string()))?;
    let engine = Arc::new(AfeEngine::sym_cube(spec.weight, cfg.afe.clone())?);
    let sqrt_q = (d.abs() as f64).powi(2);
    let n_cut = engine.n_cut(sqrt_q);
    let need = if check { 2 * n_cut } else { n_cut } + 1;
    let table = cfg.coefficients(&spec, need)?;
    let coeffs = Arc::new(sym_cube_dirichlet(&table, need)?);
    drop(table);
    let form = FormData::from_parts(spec.clone(), coeffs.clone(), engine.clone());
    let l1 = dirichlet_l1(d)?;
    let rec = form.evaluate(d, l1)?;
    if header {
        println!("{HEADER}");
    }
    println!("{}", rec.to_csv_row());
    if check {
        let rep = robustness(&TwistedLSeries::new(coeffs, d), &engine)?;
        let ok = rep.passes(1e-4, 1e-5);
        eprintln!(
            "check: epsilon {} truncation change {:e} kernel change {:e} odd residual {:e} -> {}",
            rep.value.epsilon,
            rep.truncation_change,
            rep.kernel_change,
            rep.value.odd_residual(),
            if ok { "ok" } else { "FAILED" }
        );
        if !ok {
            return Ok(1);
        }
    }
    Ok(0)
}

fn form_data(cfg: &Config, specs: &[EigenformSpec]) -> Result<Vec<FormData>> {
    specs
        .iter()
        .map(|s| {
            let table = cfg.coefficients(s, cfg.terms)?;
            FormData::new(&table, &cfg.afe)
        })
        .collect()
}

fn dyadic_blocks(dmin: u64, dmax: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = dmin.max(1);
    while 2 * d <= dmax {
        out.push(d);
        d *= 2;
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn cmd_moments(
    cfg: &mut Config,
    forms: &FormArgs,
    range: (Option<u64>, Option<u64>),
    residue: Option<i64>,
    modulus: Option<u64>,
    ell: &[f64],
    terms: Option<f64>,
    values: Option<&Path>,
    out: Option<&Path>,
    format: Format,
) -> Result<i32> {
    let labels = forms.labels()?;
    if !labels.is_empty() {
        cfg.forms = labels;
    }
    if !ell.is_empty() {
        cfg.ells = ell.to_vec();
    } else if cfg.ells.len() == 1 && cfg.forms.len() > 1 {
        cfg.ells = vec![cfg.ells[0]; cfg.forms.len()];
    }
    match range {
        (Some(lo), Some(hi)) => cfg.blocks = dyadic_blocks(lo, hi),
        (Some(lo), None) => cfg.blocks = dyadic_blocks(lo, 16 * lo),
        (None, Some(_)) => return Err(Error::Config("--dmax needs --dmin".into())),
        (None, None) => {}
    }
    if let Some(a) = residue {
        cfg.residue = a;
    }
    if let Some(m) = modulus {
        cfg.modulus = m;
    }
    if let Some(t) = terms {
        cfg.terms = t as usize;
    }
    if let Some(v) = values {
        cfg.values = Some(v.to_path_buf());
    }
    cfg.validate()?;
    let specs = cfg.specs()?;
    let mut exp = ExperimentConfig::new(specs.clone(), cfg.ells.clone(), cfg.blocks.clone(), cfg.residue, cfg.modulus)
        .map_err(|e| Error::Config(e.to_string()))?;
    exp.afe = cfg.afe.clone();
    let store = ValueStore::open(&cfg.values_path())?;
    let mut provider = ValueProvider::new(form_data(cfg, &specs)?, store, cfg.recompute);
    let report = dyadic_sweep(&exp, &mut provider)?;
    let csv = report.to_csv();
    match out {
        Some(path) => {
            std::fs::write(path, &csv)?;
            if format == Format::Svg {
                std::fs::write(path.with_extension("svg"), chart::render_svg(&report))?;
            }
        }
        None => {
            if format == Format::Svg {
                print!("{}", chart::render_svg(&report));
            } else {
                print!("{csv}");
            }
        }
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_grh_check(
    cfg: &mut Config,
    forms: &FormArgs,
    dmin: Option<u64>,
    residue: Option<i64>,
    modulus: Option<u64>,
    terms: Option<f64>,
    values: Option<&Path>,
    out: Option<&Path>,
) -> Result<i32> {
    let labels = forms.labels()?;
    if !labels.is_empty() {
        cfg.forms = labels;
    }
    if let Some(d) = dmin {
        cfg.grh_d = d;
    }
    if let Some(a) = residue {
        cfg.residue = a;
    }
    if let Some(m) = modulus {
        cfg.modulus = m;
    }
    if let Some(t) = terms {
        cfg.terms = t as usize;
    }
    if let Some(v) = values {
        cfg.values = Some(v.to_path_buf());
    }
    cfg.validate()?;
    let suite = SuiteConfig {
        big_d: cfg.grh_d,
        residue: cfg.residue,
        modulus: cfg.modulus,
        epsilon: cfg.epsilon,
        x_cap: cfg.x_cap,
        chandee_slack: cfg.chandee_slack,
        chandee_max_d: cfg.chandee_max_d,
        ..SuiteConfig::default()
    };
    let bound = suite.prime_bound();
    cfg.terms = cfg.terms.max(bound as usize);
    let mut specs = cfg.specs()?;
    specs.sort_by(|a, b| a.label.cmp(&b.label));
    let mut data = Vec::new();
    let mut primes = Vec::new();
    for s in &specs {
        let table = cfg.coefficients(s, cfg.terms)?;
        primes.push(Arc::new(PrimeData::from_table(&table, bound)?));
        data.push(FormData::new(&table, &cfg.afe)?);
    }

    let store = ValueStore::open(&cfg.values_path())?;
    let mut provider = ValueProvider::new(data, store, cfg.recompute);
    provider.fit_models(cfg.residue, cfg.modulus)?;
    let filter = DiscriminantFilter::new(3, cfg.chandee_max_d, cfg.residue, cfg.modulus)?;
    let family = enumerate_discriminants(&filter);
    let label_list: Vec<String> = specs.iter().map(|s| s.label.clone()).collect();
    let rows = provider.rows(&family, &label_list)?;
    let mut records = Vec::new();
    for r in &rows {
        for (i, l) in label_list.iter().enumerate() {
            records.push(CentralValueRecord {
                d: r.d,
                form_label: l.clone(),
                epsilon: r.epsilons[i],
                l_half: r.values[i],
                l1_chi: r.l1_chi,
                n_cut: 0,
            });
        }
    }
    let tested = records.iter().filter(|r| r.epsilon == 1).count();
    log::info!("{} family members up to {}, {tested} with root number +1", family.len(), cfg.chandee_max_d);

    let diag = run_suite(&suite, &primes, &records)?;
    match out {
        Some(p) => write_report(p, &diag)?,
        None => {
            println!("{}", symcube::grh::report::REPORT_HEADER);
            for r in &diag {
                println!("{}", r.to_csv_row());
            }
        }
    }
    let failed = diag.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        eprintln!("{failed} of {} checks failed", diag.len());
        return Ok(1);
    }
    Ok(0)
}

fn run(cli: Cli) -> Result<i32> {
    let file = match &cli.command {
        Command::Moments { file, .. } | Command::GrhCheck { file, .. } => file.clone(),
        _ => None,
    };
    let mut cfg = build_config(&cli.common, file.as_deref())?;
    cfg.validate()?;
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build_global() {
        log::debug!("worker pool already initialised: {e}");
    }
    match cli.command {
        Command::Coeffs { forms, terms, out } => cmd_coeffs(&cfg, &forms, terms, out.as_deref()),
        Command::Lvalue { forms, d, check, header } => cmd_lvalue(&cfg, &forms, d, check, header),
        Command::Moments { forms, dmin, dmax, residue, modulus, ell, terms, values, out, format, .. } => cmd_moments(
            &mut cfg,
            &forms,
            (dmin, dmax),
            residue,
            modulus,
            &ell,
            terms,
            values.as_deref(),
            out.as_deref(),
            format,
        ),
        Command::GrhCheck { forms, dmin, residue, modulus, terms, values, out, .. } => {
            cmd_grh_check(&mut cfg, &forms, dmin, residue, modulus, terms, values.as_deref(), out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let level = match cli.common.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
