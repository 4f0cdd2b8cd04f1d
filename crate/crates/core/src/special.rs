//! Complex log-gamma for the archimedean factors.

use num_complex::Complex64;
use std::f64::consts::PI;

// B_{2j} / (2j(2j-1)) for j = 1..=8
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

/// `log Γ(z)` for `Re z > 0`, up to a multiple of `2πi` in the imaginary
/// part. Only exponentiated differences are used, so the branch is
/// irrelevant.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    assert!(z.re > 0.0, "ln_gamma needs Re z > 0, got {z}");
    let mut z = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while z.norm() < 16.0 {
        shift += z.ln();
        z += 1.0;
    }
    let zinv = z.inv();
    let zinv2 = zinv * zinv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = zinv;
    for c in STIRLING {
        series += pow * c;
        pow *= zinv2;
    }
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + series - shift
}

/// `log Γ_C(s) = log(2 (2π)^{-s} Γ(s))`.
pub fn ln_gamma_c(s: Complex64) -> Complex64 {
    std::f64::consts::LN_2 - s * (2.0 * PI).ln() + ln_gamma(s)
}
