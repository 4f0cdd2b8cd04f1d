//! Chinese remaindering over the transform primes and the fixed-width
//! signed integers it produces.

use crate::ntt::Field;

const LIMBS: usize = 8;

/// Signed integer with a 512-bit magnitude.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Wide {
    pub negative: bool,
    pub mag: [u64; LIMBS],
}

impl Wide {
    pub fn from_i64(x: i64) -> Self {
        let mut mag = [0; LIMBS];
        mag[0] = x.unsigned_abs();
        Wide { negative: x < 0, mag }
    }

    pub fn is_zero(&self) -> bool {
        self.mag.iter().all(|&l| l == 0)
    }

    pub fn to_f64(&self) -> f64 {
        let mut v = 0.0f64;
        for &l in self.mag.iter().rev() {
            v = v * 18446744073709551616.0 + l as f64;
        }
        if self.negative {
            -v
        } else {
            v
        }
    }

    /// Residue modulo `p` (plain, not Montgomery).
    pub fn rem(&self, p: u64) -> u64 {
        let mut r: u128 = 0;
        for &l in self.mag.iter().rev() {
            r = ((r << 64) | l as u128) % p as u128;
        }
        let r = r as u64;
        if self.negative && r != 0 {
            p - r
        } else {
            r
        }
    }

    /// Exact product, `None` on overflow of the 512-bit magnitude.
    pub fn checked_mul(&self, other: &Wide) -> Option<Wide> {
        let mut out = [0u64; 2 * LIMBS];
        for i in 0..LIMBS {
            if self.mag[i] == 0 {
                continue;
            }
            let mut carry = 0u128;
            for j in 0..LIMBS {
                let t = self.mag[i] as u128 * other.mag[j] as u128 + out[i + j] as u128 + carry;
                out[i + j] = t as u64;
                carry = t >> 64;
            }
            out[i + LIMBS] = carry as u64;
        }
        if out[LIMBS..].iter().any(|&l| l != 0) {
            return None;
        }
        let mut mag = [0u64; LIMBS];
        mag.copy_from_slice(&out[..LIMBS]);
        let w = Wide { negative: self.negative != other.negative, mag };
        Some(if w.is_zero() { Wide::from_i64(0) } else { w })
    }

    /// `|self|` compared with `|other|`.
    pub fn cmp_abs(&self, other: &Wide) -> std::cmp::Ordering {
        cmp(&self.mag, &other.mag)
    }

    /// Bit length of the magnitude.
    pub fn bits(&self) -> u32 {
        match (0..LIMBS).rev().find(|&i| self.mag[i] != 0) {
            Some(top) => 64 * top as u32 + (64 - self.mag[top].leading_zeros()),
            None => 0,
        }
    }

    /// Parses an optionally signed decimal integer.
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        let (negative, digits) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let mut mag = [0u64; LIMBS];
        for b in digits.bytes() {
            if mul_small_add(&mut mag, 10, (b - b'0') as u64) != 0 {
                return None;
            }
        }
        let w = Wide { negative, mag };
        Some(if w.is_zero() { Wide::from_i64(0) } else { w })
    }
}

impl std::fmt::Display for Wide {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut m = self.mag;
        let mut chunks = Vec::new();
        while m.iter().any(|&l| l != 0) {
            chunks.push(div_small(&mut m, 10_000_000_000_000_000_000));
        }
        if self.negative {
            f.write_str("-")?;
        }
        write!(f, "{}", chunks.last().unwrap())?;
        for c in chunks.iter().rev().skip(1) {
            write!(f, "{c:019}")?;
        }
        Ok(())
    }
}

fn mul_small_add(m: &mut [u64; LIMBS], k: u64, add: u64) -> u64 {
    let mut carry = add as u128;
    for l in m.iter_mut() {
        let t = *l as u128 * k as u128 + carry;
        *l = t as u64;
        carry = t >> 64;
    }
    carry as u64
}

fn div_small(m: &mut [u64; LIMBS], k: u64) -> u64 {
    let mut r: u128 = 0;
    for l in m.iter_mut().rev() {
        let cur = (r << 64) | *l as u128;
        *l = (cur / k as u128) as u64;
        r = cur % k as u128;
    }
    r as u64
}

fn cmp(a: &[u64; LIMBS], b: &[u64; LIMBS]) -> std::cmp::Ordering {
    for i in (0..LIMBS).rev() {
        match a[i].cmp(&b[i]) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

fn sub_in_place(a: &mut [u64; LIMBS], b: &[u64; LIMBS]) {
    let mut borrow = 0u64;
    for i in 0..LIMBS {
        let (d1, b1) = a[i].overflowing_sub(b[i]);
        let (d2, b2) = d1.overflowing_sub(borrow);
        a[i] = d2;
        borrow = (b1 || b2) as u64;
    }
}

/// Garner reconstruction for the first `k` transform primes.
#[derive(Clone, Debug)]
pub struct Crt {
    fields: Vec<Field>,
    // inv[i] = (p_0 ⋯ p_{i-1})^{-1} mod p_i, Montgomery form
    inv: Vec<u64>,
    modulus: [u64; LIMBS],
    half: [u64; LIMBS],
}

impl Crt {
    pub fn new(k: usize) -> Self {
        assert!(k >= 1 && k <= crate::ntt::PRIMES.len() && k < LIMBS);
        let fields: Vec<Field> = (0..k).map(Field::nth).collect();
        let mut inv = Vec::with_capacity(k);
        for i in 0..k {
            let f = &fields[i];
            let mut prod = f.to_mont(1);
            for g in &fields[..i] {
                prod = f.mul(prod, f.to_mont(g.p));
            }
            inv.push(f.inv(prod));
        }
        let mut modulus = [0u64; LIMBS];
        modulus[0] = 1;
        for f in &fields {
            mul_small_add(&mut modulus, f.p, 0);
        }
        let mut half = modulus;
        div_small(&mut half, 2);
        Crt { fields, inv, modulus, half }
    }

    /// Number of primes needed so that integers of absolute value
    /// `< 2^bits` are recovered uniquely.
    pub fn primes_for_bits(bits: u32) -> usize {
        (bits as usize + 1).div_ceil(61).max(1)
    }

    pub fn fields(&self) -> &[Field] {
        &self.fields
    }

    pub fn modulus_bits(&self) -> u32 {
        let top = (0..LIMBS).rev().find(|&i| self.modulus[i] != 0).unwrap_or(0);
        64 * top as u32 + (64 - self.modulus[top].leading_zeros())
    }

    /// Reconstructs the symmetric representative from Montgomery-form
    /// residues, one per prime.
    pub fn reconstruct(&self, residues: &[u64]) -> Wide {
        let k = self.fields.len();
        debug_assert_eq!(residues.len(), k);
        let mut digits = [0u64; LIMBS];
        for i in 0..k {
            let f = &self.fields[i];
            // value of the partial mixed-radix sum modulo p_i
            let mut acc = 0u64;
            let mut radix = f.to_mont(1);
            for (&dj, fj) in digits[..i].iter().zip(&self.fields) {
                acc = f.add(acc, f.mul(f.to_mont(dj), radix));
                radix = f.mul(radix, f.to_mont(fj.p));
            }
            let v = f.mul(f.sub(residues[i], acc), self.inv[i]);
            digits[i] = f.from_mont(v);
        }
        let mut mag = [0u64; LIMBS];
        for i in (0..k).rev() {
            mul_small_add(&mut mag, self.fields[i].p, 0);
            let mut carry = digits[i];
            for l in mag.iter_mut() {
                let (s, c) = l.overflowing_add(carry);
                *l = s;
                carry = c as u64;
                if carry == 0 {
                    break;
                }
            }
        }
        if cmp(&mag, &self.half) == std::cmp::Ordering::Greater {
            let mut m = self.modulus;
            sub_in_place(&mut m, &mag);
            Wide { negative: true, mag: m }
        } else {
            Wide { negative: false, mag }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reconstructs_signed_values() {
        let crt = Crt::new(3);
        for x in [0i64, 1, -1, 123456789, -987654321012345, i64::MAX, i64::MIN + 1] {
            let res: Vec<u64> = crt.fields().iter().map(|f| f.from_i64(x)).collect();
            let w = crt.reconstruct(&res);
            assert_eq!(w, Wide::from_i64(x));
            assert_eq!(w.to_string(), x.to_string());
        }
    }

    #[test]
    fn decimal_round_trip_beyond_64_bits() {
        let s = "-340282366920938463463374607431768211457000000000000001";
        let w = Wide::parse(s).unwrap();
        assert_eq!(w.to_string(), s);
        let crt = Crt::new(4);
        let res: Vec<u64> = crt.fields().iter().map(|f| f.to_mont(w.rem(f.p))).collect();
        assert_eq!(crt.reconstruct(&res), w);
        assert!((w.to_f64() + 3.402823669209385e53).abs() < 1e38);
        assert!(Wide::parse("12a").is_none());
        assert_eq!(Wide::parse("-0").unwrap().to_string(), "0");
    }

    #[test]
    fn bits_to_primes() {
        assert_eq!(Crt::primes_for_bits(60), 1);
        assert_eq!(Crt::primes_for_bits(150), 3);
        assert!(Crt::new(3).modulus_bits() >= 186);
    }
}
