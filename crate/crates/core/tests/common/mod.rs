//! Independent oracles shared by the integration tests. Nothing here calls
//! into the library's own algorithms.
#![allow(dead_code)]

/// `q ∏ (1 - q^n)^24` to `q^n_max`, by repeated multiplication by `1 - q^n`.
pub fn tau_schoolbook(n_max: usize) -> Vec<i128> {
    let mut c = vec![0i128; n_max];
    c[0] = 1;
    for n in 1..n_max {
        for _ in 0..24 {
            for i in (n..n_max).rev() {
                c[i] -= c[i - n];
            }
        }
    }
    // shift by q
    let mut out = vec![0i128; n_max + 1];
    out[1..].copy_from_slice(&c);
    out
}

fn sigma(n: usize, k: u32) -> i128 {
    (1..=n).filter(|d| n.is_multiple_of(*d)).map(|d| (d as i128).pow(k)).sum()
}

/// `a(n)` of the weight-16 form `E_4 Δ`, `n <= n_max`.
pub fn weight16_schoolbook(n_max: usize) -> Vec<i128> {
    let tau = tau_schoolbook(n_max);
    let mut e4 = vec![0i128; n_max + 1];
    e4[0] = 1;
    for (n, e) in e4.iter_mut().enumerate().skip(1) {
        *e = 240 * sigma(n, 3);
    }
    let mut out = vec![0i128; n_max + 1];
    for i in 0..=n_max {
        for j in 0..=n_max - i {
            out[i + j] += e4[i] * tau[j];
        }
    }
    out
}

/// Legendre symbol by Euler's criterion, `p` an odd prime.
pub fn legendre(a: i64, p: u64) -> i8 {
    let a = a.rem_euclid(p as i64) as u128;
    if a == 0 {
        return 0;
    }
    let (mut base, mut e, mut r) = (a, (p - 1) / 2, 1u128);
    let m = p as u128;
    while e > 0 {
        if e & 1 == 1 {
            r = r * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    if r == 1 {
        1
    } else {
        -1
    }
}

pub fn factor(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        while n.is_multiple_of(p) {
            out.push(p);
            n /= p;
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Kronecker symbol from its definition: Legendre at odd primes, the
/// `d mod 8` rule at 2.
pub fn kronecker_by_definition(d: i64, n: u64) -> i8 {
    if n == 0 {
        return if d.abs() == 1 { 1 } else { 0 };
    }
    factor(n)
        .into_iter()
        .map(|p| {
            if p == 2 {
                match d.rem_euclid(8) {
                    1 | 7 => 1,
                    3 | 5 => -1,
                    _ => 0,
                }
            } else {
                legendre(d, p)
            }
        })
        .product()
}

pub fn is_fundamental_negative(d: i64) -> bool {
    if d >= 0 {
        return false;
    }
    let m = d.unsigned_abs();
    let sqfree = |x: u64| factor(x).windows(2).all(|w| w[0] != w[1]);
    if d.rem_euclid(4) == 1 {
        return sqfree(m);
    }
    if !m.is_multiple_of(4) {
        return false;
    }
    let q = (d / 4).rem_euclid(4);
    (q == 2 || q == 3) && sqfree(m / 4)
}

/// Dirichlet's finite formula `h(d) = -(w / 2|d|) Σ_{n<|d|} χ_d(n) n`.
pub fn class_number_dirichlet(d: i64) -> u64 {
    let m = d.unsigned_abs();
    let w: i64 = match d {
        -3 => 6,
        -4 => 4,
        _ => 2,
    };
    let s: i64 = (1..m).map(|n| kronecker_by_definition(d, n) as i64 * n as i64).sum();
    let h = -w * s;
    assert_eq!(h % (2 * m as i64), 0, "d = {d}");
    (h / (2 * m as i64)) as u64
}

/// `χ_d(n)` for `0 <= n < |d|`, built multiplicatively from prime values.
pub fn character_values(d: i64) -> Vec<i8> {
    let m = d.unsigned_abs() as usize;
    let mut spf = vec![0usize; m.max(2)];
    for i in 2..m {
        if spf[i] == 0 {
            let mut j = i;
            while j < m {
                if spf[j] == 0 {
                    spf[j] = i;
                }
                j += i;
            }
        }
    }
    let mut chi = vec![0i8; m.max(2)];
    chi[1] = 1;
    for n in 2..m {
        let p = spf[n];
        let at_p = if p == 2 {
            match d.rem_euclid(8) {
                1 | 7 => 1,
                3 | 5 => -1,
                _ => 0,
            }
        } else {
            legendre(d, p as u64)
        };
        chi[n] = at_p * chi[n / p];
    }
    chi
}

/// As [`class_number_dirichlet`], fast enough for every `|d| <= 10^4`.
pub fn class_number_sieved(d: i64) -> u64 {
    let m = d.unsigned_abs() as i64;
    let w: i64 = match d {
        -3 => 6,
        -4 => 4,
        _ => 2,
    };
    let chi = character_values(d);
    let s: i64 = (1..m).map(|n| chi[n as usize] as i64 * n).sum();
    let h = -w * s;
    assert_eq!(h % (2 * m), 0, "d = {d}");
    (h / (2 * m)) as u64
}
