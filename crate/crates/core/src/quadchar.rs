//! Imaginary quadratic discriminants, their characters, class numbers and
//! `L(1, χ_d)`.

use std::f64::consts::PI;

use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::primes::is_squarefree;

/// Kronecker symbol `(d/n)` for `n >= 1`.
pub fn kronecker(d: i64, n: u64) -> i8 {
    assert!(n >= 1, "kronecker symbol needs n >= 1");
    let mut n = n;
    let mut sign = 1i8;
    if n.is_multiple_of(2) {
        if d % 2 == 0 {
            return 0;
        }
        let tz = n.trailing_zeros();
        n >>= tz;
        // (d/2) = +1 for d ≡ ±1 mod 8, −1 for d ≡ ±3 mod 8
        let m8 = d.rem_euclid(8);
        if tz % 2 == 1 && (m8 == 3 || m8 == 5) {
            sign = -sign;
        }
    }
    sign * jacobi(d.rem_euclid(n as i64) as u64, n)
}

/// Jacobi symbol `(a/n)` for odd `n`, binary algorithm.
pub fn jacobi(a: u64, n: u64) -> i8 {
    debug_assert!(n % 2 == 1);
    let (mut a, mut n) = (a % n, n);
    let mut t = 1i8;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        let r = n % 8;
        if tz % 2 == 1 && (r == 3 || r == 5) {
            t = -t;
        }
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// A negative fundamental discriminant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FundamentalDiscriminant(i64);

impl FundamentalDiscriminant {
    /// Accepts `d ≡ 1 mod 4` with `|d|` squarefree, and `d = 4m` with
    /// `m ≡ 2, 3 mod 4` squarefree.
    pub fn new(d: i64) -> Result<Self> {
        if d >= 0 {
            return Err(Error::InvalidInput(format!("discriminant must be negative, got {d}")));
        }
        let ok = match d.rem_euclid(4) {
            1 => is_squarefree(d.unsigned_abs()),
            0 => {
                let m = d / 4;
                matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m.unsigned_abs())
            }
            _ => false,
        };
        if ok {
            Ok(FundamentalDiscriminant(d))
        } else {
            Err(Error::InvalidInput(format!("{d} is not a fundamental discriminant")))
        }
    }

    pub fn get(self) -> i64 {
        self.0
    }

    pub fn abs(self) -> u64 {
        self.0.unsigned_abs()
    }

    pub fn chi(self, n: u64) -> i8 {
        kronecker(self.0, n)
    }

    /// Number of roots of unity in the ring of integers.
    pub fn units(self) -> u32 {
        match self.0 {
            -3 => 6,
            -4 => 4,
            _ => 2,
        }
    }

    /// Whether `p` divides `d` (trial division, `|d|` is small).
    pub fn divides(self, p: u64) -> bool {
        self.abs().is_multiple_of(p)
    }
}

impl std::fmt::Display for FundamentalDiscriminant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `χ_d` tabulated over one period `|d|`.
#[derive(Clone, Debug)]
pub struct CharTable {
    d: FundamentalDiscriminant,
    values: Vec<i8>,
}

impl CharTable {
    pub fn new(d: FundamentalDiscriminant) -> Self {
        let q = d.abs();
        let mut values = vec![0i8; q as usize];
        for (r, v) in values.iter_mut().enumerate().skip(1) {
            *v = kronecker(d.get(), r as u64);
        }
        // (d/q) with q = |d| shares a factor, so index 0 stays 0
        CharTable { d, values }
    }

    pub fn discriminant(&self) -> FundamentalDiscriminant {
        self.d
    }

    pub fn modulus(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn chi(&self, n: u64) -> i8 {
        self.values[(n % self.values.len() as u64) as usize]
    }

    /// One period, index `n mod |d|`.
    pub fn period(&self) -> &[i8] {
        &self.values
    }
}

/// `{ d : lo <= -d <= hi, |d| squarefree, d ≡ a mod M₀ }`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DiscriminantFilter {
    pub lo: u64,
    pub hi: u64,
    pub residue: i64,
    pub modulus: u64,
}

impl DiscriminantFilter {
    /// General window. `M₀` must be a multiple of 4 and `a ≡ 1 mod 4`, so
    /// every member is an odd fundamental discriminant.
    pub fn new(lo: u64, hi: u64, residue: i64, modulus: u64) -> Result<Self> {
        if modulus == 0 || !modulus.is_multiple_of(4) {
            return Err(Error::InvalidInput(format!("modulus must be a positive multiple of 4, got {modulus}")));
        }
        if residue.rem_euclid(4) != 1 {
            return Err(Error::InvalidInput(format!("residue must be 1 mod 4, got {residue}")));
        }
        if gcd(residue.rem_euclid(modulus as i64) as u64, modulus) != 1 {
            return Err(Error::InvalidInput(format!("residue {residue} is not a unit mod {modulus}")));
        }
        if lo == 0 || lo > hi {
            return Err(Error::InvalidInput(format!("empty or invalid window [{lo}, {hi}]")));
        }
        Ok(DiscriminantFilter { lo, hi, residue, modulus })
    }

    /// The window `D <= -d <= 2D`.
    pub fn dyadic(big_d: u64, residue: i64, modulus: u64) -> Result<Self> {
        Self::new(big_d, 2 * big_d, residue, modulus)
    }

    pub fn accepts(&self, d: i64) -> bool {
        let m = d.unsigned_abs();
        d < 0
            && (self.lo..=self.hi).contains(&m)
            && d.rem_euclid(self.modulus as i64) == self.residue.rem_euclid(self.modulus as i64)
            && is_squarefree(m)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

const SIEVE_BLOCK: u64 = 1 << 20;

/// Family members in ascending `|d|`, squarefreeness by a blockwise sieve
/// of prime squares.
pub fn enumerate_discriminants(filter: &DiscriminantFilter) -> Vec<FundamentalDiscriminant> {
    let m0 = filter.modulus as i64;
    let target = filter.residue.rem_euclid(m0);
    let root = (filter.hi as f64).sqrt() as u64 + 1;
    let ps = crate::primes::primes_up_to(root);
    let mut out = Vec::new();
    let mut free = vec![true; SIEVE_BLOCK as usize];
    let mut lo = filter.lo;
    while lo <= filter.hi {
        let hi = (lo + SIEVE_BLOCK - 1).min(filter.hi);
        let len = (hi - lo + 1) as usize;
        free[..len].fill(true);
        for &p in &ps {
            let q = p * p;
            if q > hi {
                break;
            }
            let mut m = lo.div_ceil(q) * q;
            while m <= hi {
                free[(m - lo) as usize] = false;
                m += q;
            }
        }
        for (i, &f) in free[..len].iter().enumerate() {
            let d = -((lo + i as u64) as i64);
            if f && d.rem_euclid(m0) == target {
                out.push(FundamentalDiscriminant(d));
            }
        }
        lo = hi + 1;
    }
    out
}

/// Upper limit on `|d|` for the reduced-forms count.
pub const CLASS_NUMBER_BOUND: u64 = 10_000_000;

/// `h(d)` by counting reduced forms `(a, b, c)` with `b² - 4ac = d`,
/// `|b| <= a <= c`, and `b >= 0` whenever `|b| = a` or `a = c`.
pub fn class_number(d: FundamentalDiscriminant) -> Result<u64> {
    let n = d.abs();
    if n > CLASS_NUMBER_BOUND {
        return Err(Error::InvalidInput(format!("|d| = {n} exceeds the class-number bound {CLASS_NUMBER_BOUND}")));
    }
    let dd = d.get();
    let mut h = 0;
    let mut a: i64 = 1;
    while 3 * a * a <= n as i64 {
        // b runs over (-a, a] with b ≡ d mod 2
        let mut b = -a + 1;
        if (b - dd).rem_euclid(2) != 0 {
            b += 1;
        }
        while b <= a {
            let num = b * b - dd;
            if num % (4 * a) == 0 {
                let c = num / (4 * a);
                if c >= a && !(b < 0 && a == c) {
                    h += 1;
                }
            }
            b += 2;
        }
        a += 1;
    }
    Ok(h)
}

/// `2πh/(w√|d|)`.
pub fn l1_class_number_formula(d: FundamentalDiscriminant) -> Result<f64> {
    let h = class_number(d)? as f64;
    Ok(2.0 * PI * h / (d.units() as f64 * (d.abs() as f64).sqrt()))
}

/// Rapidly convergent smoothed character sum for odd primitive `χ_d`:
/// `Σ χ(n) [e^{-πn²/q}/n + (π/√q) erfc(n√(π/q))]`.
pub fn l1_series(d: FundamentalDiscriminant) -> f64 {
    let q = d.abs() as f64;
    let sq = q.sqrt();
    let terms = (4.0 * sq) as u64 + 10;
    let mut s = 0.0;
    for n in 1..=terms {
        let c = d.chi(n);
        if c == 0 {
            continue;
        }
        let x = n as f64;
        s += c as f64 * ((-PI * x * x / q).exp() / x + PI / sq * erfc(x * (PI / q).sqrt()));
    }
    s
}

/// Relative agreement demanded between the two `L(1, χ_d)` evaluations.
pub const L1_TOLERANCE: f64 = 1e-8;

/// `L(1, χ_d)` from the class-number formula, checked against the series.
pub fn dirichlet_l1(d: FundamentalDiscriminant) -> Result<f64> {
    if d.abs() < 3 {
        return Err(Error::InvalidInput(format!("|d| must be at least 3, got {}", d.abs())));
    }
    let formula = l1_class_number_formula(d)?;
    let series = l1_series(d);
    if ((formula - series) / formula).abs() > L1_TOLERANCE {
        return Err(Error::Consistency(format!(
            "L(1, χ_{d}): class-number formula {formula} vs series {series}"
        )));
    }
    Ok(formula)
}
