//! Prime sieves shared by the coefficient generator and the diagnostics.

/// All primes `<= n`, by a segmented sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let root = (n as f64).sqrt() as u64 + 1;
    let small = simple_sieve(root);
    let mut out = Vec::with_capacity(estimate_pi(n));
    const SEG: u64 = 1 << 18;
    let mut seg = vec![true; SEG as usize];
    let mut lo = 2u64;
    while lo <= n {
        let hi = (lo + SEG - 1).min(n);
        let len = (hi - lo + 1) as usize;
        seg[..len].fill(true);
        for &p in &small {
            if p * p > hi {
                break;
            }
            let mut m = (lo.div_ceil(p) * p).max(p * p);
            while m <= hi {
                seg[(m - lo) as usize] = false;
                m += p;
            }
        }
        for (i, &is_p) in seg[..len].iter().enumerate() {
            if is_p {
                out.push(lo + i as u64);
            }
        }
        lo = hi + 1;
    }
    out
}

fn simple_sieve(n: u64) -> Vec<u64> {
    let n = n as usize;
    let mut is = vec![true; n + 1];
    is[0] = false;
    if n >= 1 {
        is[1] = false;
    }
    let mut i = 2;
    while i * i <= n {
        if is[i] {
            let mut j = i * i;
            while j <= n {
                is[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    is.iter()
        .enumerate()
        .filter_map(|(i, &b)| b.then_some(i as u64))
        .collect()
}

fn estimate_pi(n: u64) -> usize {
    if n < 17 {
        return 8;
    }
    let x = n as f64;
    (1.26 * x / x.ln()) as usize
}

/// Smallest-prime-factor table for `0..=n`; `spf[0] = spf[1] = 0`.
pub fn smallest_prime_factors(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    let mut primes: Vec<u32> = Vec::new();
    for i in 2..=n {
        if spf[i] == 0 {
            spf[i] = i as u32;
            primes.push(i as u32);
        }
        let si = spf[i];
        for &p in &primes {
            if p > si || (p as usize) * i > n {
                break;
            }
            spf[p as usize * i] = p;
        }
    }
    spf
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    // deterministic Miller-Rabin for 64-bit inputs
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Prime powers `p^j <= x` as `(p, j, p^j)`, ordered by value.
pub fn prime_powers_up_to(x: u64) -> Vec<(u64, u32, u64)> {
    let mut out = Vec::new();
    for p in primes_up_to(x) {
        let mut q = p;
        let mut j = 1;
        loop {
            out.push((p, j, q));
            match q.checked_mul(p) {
                Some(nq) if nq <= x => {
                    q = nq;
                    j += 1;
                }
                _ => break,
            }
        }
    }
    out.sort_unstable_by_key(|t| t.2);
    out
}

/// Trial-division test for squarefreeness.
pub fn is_squarefree(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        if m.is_multiple_of(p) {
            m /= p;
            if m.is_multiple_of(p) {
                return false;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    true
}

/// Distinct prime divisors by trial division.
pub fn prime_divisors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        if m.is_multiple_of(p) {
            out.push(p);
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        out.push(m);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sieve_matches_trial_division() {
        let ps = primes_up_to(10_000);
        let naive: Vec<u64> = (2..=10_000u64)
            .filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0))
            .collect();
        assert_eq!(ps, naive);
        assert_eq!(primes_up_to(1_000_000).len(), 78_498);
    }

    #[test]
    fn spf_and_miller_rabin_agree() {
        let spf = smallest_prime_factors(5000);
        for n in 2..5000u64 {
            assert_eq!(spf[n as usize] as u64 == n, is_prime(n), "n = {n}");
        }
        assert!(is_prime(4611685941117976577));
    }

    #[test]
    fn prime_powers_small() {
        let v: Vec<u64> = prime_powers_up_to(11).iter().map(|t| t.2).collect();
        assert_eq!(v, vec![2, 3, 4, 5, 7, 8, 9, 11]);
    }
}
