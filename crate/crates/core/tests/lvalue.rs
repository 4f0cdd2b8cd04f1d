use std::sync::{Arc, OnceLock};

use symcube::hecke::{builtin_coefficients, sym_cube_dirichlet, EigenformSpec, SymCubeCoefficients};
use symcube::lvalue::store::{CentralValueRecord, ValueStore, HEADER};
use symcube::lvalue::{
    central_value, central_value_with_cut, period_proxy, robustness, root_number, AfeEngine, AfeSettings,
    RootNumberModel, TwistedLSeries,
};
use symcube::quadchar::FundamentalDiscriminant;
use symcube::Error;

const TERMS: usize = 300_000;

fn delta() -> &'static (Arc<SymCubeCoefficients>, AfeEngine) {
    static F: OnceLock<(Arc<SymCubeCoefficients>, AfeEngine)> = OnceLock::new();
    F.get_or_init(|| {
        let t = builtin_coefficients(&EigenformSpec::delta(), TERMS).unwrap();
        let b = Arc::new(sym_cube_dirichlet(&t, TERMS).unwrap());
        (b, AfeEngine::sym_cube(12, AfeSettings::default()).unwrap())
    })
}

fn twist(d: i64) -> TwistedLSeries {
    TwistedLSeries::new(delta().0.clone(), FundamentalDiscriminant::new(d).unwrap())
}

#[test]
fn untwisted_value_satisfies_the_functional_equation() {
    let (b, engine) = delta();
    let s = TwistedLSeries::untwisted(b.clone());
    assert_eq!(s.conductor(), 1.0);
    let r = robustness(&s, engine).unwrap();
    assert!(r.passes(1e-6, 1e-6), "{r:?}");
    if r.value.epsilon == 1 {
        assert!(r.value.value > 0.0);
    }
}

#[test]
fn negative_twists_have_odd_functional_equation() {
    let (_, engine) = delta();
    for d in [-3, -4, -7, -8, -11, -15, -19, -23, -31, -35] {
        let v = central_value(&twist(d), engine).unwrap();
        assert_eq!(v.epsilon, -1, "d = {d}");
        assert_eq!(v.value, 0.0);
        assert!(v.odd_residual() < 1e-8, "d = {d}: {}", v.odd_residual());
        assert_eq!(root_number(&twist(d), engine).unwrap(), -1);
    }
}

#[test]
fn robustness_at_small_discriminants() {
    let (_, engine) = delta();
    for d in [-7, -43, -47] {
        let r = robustness(&twist(d), engine).unwrap();
        assert!(r.passes(1e-4, 1e-5), "d = {d}: {r:?}");
        assert_eq!(r.doubled.sums.n_cut, 2 * r.value.sums.n_cut);
    }
}

#[test]
fn truncation_beyond_the_table_is_reported() {
    let (_, engine) = delta();
    let err = central_value_with_cut(&twist(-7), engine, TERMS + 10).unwrap_err();
    assert!(matches!(err, Error::InsufficientCoefficients { .. }), "{err}");
}

#[test]
fn forcing_the_wrong_sign_changes_only_the_value() {
    let (_, engine) = delta();
    let forced = central_value(&twist(-7).with_epsilon(1), engine).unwrap();
    let free = central_value(&twist(-7), engine).unwrap();
    assert_eq!(forced.sums, free.sums);
    assert_eq!(forced.value, 2.0 * free.sums.s1);
}

#[test]
fn root_number_model_fits_and_rejects() {
    let m = RootNumberModel::fit("1.12.a.a", &[(-7, -1), (-11, -1), (-4, -1)]).unwrap();
    assert_eq!(m.predict(-1999), -1);
    assert_eq!(m.samples, 3);
    assert!(matches!(RootNumberModel::fit("x", &[(-7, -1), (-11, 1)]), Err(Error::Consistency(_))));
    assert!(RootNumberModel::fit("x", &[]).is_err());
}

#[test]
fn period_proxy_clamps_and_multiplies() {
    assert_eq!(period_proxy(4.0, &[16.0, 4.0]), 2.0);
    assert_eq!(period_proxy(1.0, &[-1.0, 4.0]), 0.0);
}

fn rec(d: i64, v: f64) -> CentralValueRecord {
    CentralValueRecord { d, form_label: "1.12.a.a".into(), epsilon: 1, l_half: v, l1_chi: 1.0 / 3.0, n_cut: 100 }
}

#[test]
fn store_resumes_after_a_torn_write() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("values.csv");
    let mut s = ValueStore::open(&path).unwrap();
    s.insert(rec(-7, 0.1)).unwrap();
    s.insert(rec(-11, std::f64::consts::PI)).unwrap();
    drop(s);
    // simulate an interrupted append
    let mut text = std::fs::read_to_string(&path).unwrap();
    text.push_str("-15,1.12.a.a,1,0.12");
    std::fs::write(&path, text).unwrap();

    let mut s = ValueStore::open(&path).unwrap();
    assert_eq!(s.len(), 2);
    assert_eq!(s.get(-11, "1.12.a.a").unwrap().l_half.to_bits(), std::f64::consts::PI.to_bits());
    assert!(s.get(-15, "1.12.a.a").is_none());
    s.insert(rec(-15, 0.5)).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with(HEADER));
    assert_eq!(text.lines().count(), 4);
    assert_eq!(ValueStore::open(&path).unwrap().len(), 3);
}

#[test]
fn store_rejects_foreign_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("values.csv");
    std::fs::write(&path, "a,b,c\n1,2,3\n").unwrap();
    assert!(matches!(ValueStore::open(&path), Err(Error::Integrity(_))));
    std::fs::write(&path, format!("{HEADER}\n-7,1.12.a.a,one,0,0,0\n")).unwrap();
    assert!(matches!(ValueStore::open(&path), Err(Error::Integrity(_))));
}
