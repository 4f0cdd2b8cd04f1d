//! Number-theoretic transforms over 62-bit primes of the form c·2^32 + 1.
//!
//! Values live in Montgomery form (R = 2^64) inside the transforms. The
//! forward transform is decimation-in-frequency and leaves its output in
//! bit-reversed order; the inverse is decimation-in-time and takes that
//! order back to natural, so a convolution never permutes.

/// (prime, primitive root) pairs, all `< 2^62` and `≡ 1 mod 2^32`.
pub const PRIMES: [(u64, u64); 12] = [
    (4611685941117976577, 3),
    (4611685692009873409, 19),
    (4611685606110527489, 3),
    (4611685318347718657, 5),
    (4611685232448372737, 3),
    (4611685219563470849, 3),
    (4611685125074190337, 5),
    (4611685090714451969, 3),
    (4611685039174844417, 3),
    (4611685021994975233, 5),
    (4611684738527133697, 7),
    (4611684691282493441, 3),
];

/// Largest supported transform length.
pub const MAX_LOG_LEN: u32 = 32;

// Twiddles are generated in runs of this length so that long stages
// still walk memory sequentially.
const TWIDDLE_CHUNK: usize = 1 << 12;
// Stages shorter than this run block by block while the block is in cache.
const CACHE_BLOCK: usize = 1 << 13;

#[derive(Clone, Copy, Debug)]
pub struct Field {
    pub p: u64,
    g: u64,
    pinv: u64,
    r2: u64,
}

impl Field {
    pub fn new(p: u64, g: u64) -> Self {
        debug_assert!(p % 2 == 1 && p < (1 << 62));
        // Newton iteration for p^{-1} mod 2^64
        let mut inv = p;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
        }
        let r = ((1u128 << 64) % p as u128) as u64;
        let r2 = ((r as u128 * r as u128) % p as u128) as u64;
        Field { p, g, pinv: inv, r2 }
    }

    pub fn nth(i: usize) -> Self {
        let (p, g) = PRIMES[i];
        Self::new(p, g)
    }

    /// Maps `x ∈ (-p, p)`, stored as a wrapped `u64`, into `[0, p)`. Values
    /// stay below 2^62, so the sign bit decides; the shift keeps this
    /// branch-free, which matters because the sign is unpredictable.
    #[inline(always)]
    fn fix(&self, x: u64) -> u64 {
        x.wrapping_add(self.p & ((x as i64) >> 63) as u64)
    }

    #[inline(always)]
    fn reduce(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.pinv);
        let mp = ((m as u128 * self.p as u128) >> 64) as u64;
        let hi = (t >> 64) as u64;
        self.fix(hi.wrapping_sub(mp))
    }

    /// Montgomery product: `a·b·R^{-1} mod p`.
    #[inline(always)]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce(a as u128 * b as u128)
    }

    #[inline(always)]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        self.fix((a + b).wrapping_sub(self.p))
    }

    #[inline(always)]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.fix(a.wrapping_sub(b))
    }

    #[inline(always)]
    pub fn to_mont(&self, a: u64) -> u64 {
        self.mul(a % self.p, self.r2)
    }

    #[inline(always)]
    pub fn from_mont(&self, a: u64) -> u64 {
        self.reduce(a as u128)
    }

    /// Montgomery form of a signed integer.
    pub fn from_i64(&self, a: i64) -> u64 {
        let r = a.rem_euclid(self.p as i64) as u64;
        self.to_mont(r)
    }

    /// `base^e` with both base and result in Montgomery form.
    pub fn pow(&self, mut base: u64, mut e: u64) -> u64 {
        let mut r = self.to_mont(1);
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        r
    }

    pub fn inv(&self, a: u64) -> u64 {
        self.pow(a, self.p - 2)
    }

    /// Primitive `2^log`-th root of unity, Montgomery form.
    fn root(&self, log: u32) -> u64 {
        self.pow(self.to_mont(self.g), (self.p - 1) >> log)
    }

    /// `w^{from}, …, w^{from+len-1}` into `buf`.
    fn twiddles(&self, w: u64, from: usize, len: usize, buf: &mut Vec<u64>) {
        buf.clear();
        let mut x = self.pow(w, from as u64);
        for _ in 0..len {
            buf.push(x);
            x = self.mul(x, w);
        }
    }

    #[inline(always)]
    fn dif_butterflies(&self, lo: &mut [u64], hi: &mut [u64], tw: &[u64]) {
        for ((u, v), &t) in lo.iter_mut().zip(hi.iter_mut()).zip(tw) {
            let (x, y) = (*u, *v);
            *u = self.add(x, y);
            *v = self.mul(self.sub(x, y), t);
        }
    }

    #[inline(always)]
    fn dit_butterflies(&self, lo: &mut [u64], hi: &mut [u64], tw: &[u64]) {
        for ((u, v), &t) in lo.iter_mut().zip(hi.iter_mut()).zip(tw) {
            let x = *u;
            let y = self.mul(*v, t);
            *u = self.add(x, y);
            *v = self.sub(x, y);
        }
    }

    /// One full pass over `a` for a stage of half-length `len`.
    fn stage(&self, a: &mut [u64], len: usize, w: u64, dif: bool, tw: &mut Vec<u64>) {
        let chunk = len.min(TWIDDLE_CHUNK);
        for j0 in (0..len).step_by(chunk) {
            self.twiddles(w, j0, chunk, tw);
            for s in (0..a.len()).step_by(2 * len) {
                let (lo, hi) = a[s + j0..].split_at_mut(len);
                if dif {
                    self.dif_butterflies(&mut lo[..chunk], &mut hi[..chunk], tw);
                } else {
                    self.dit_butterflies(&mut lo[..chunk], &mut hi[..chunk], tw);
                }
            }
        }
    }

    /// Twiddle tables for every half-length `1, 2, 4, …, < limit`.
    fn small_tables(&self, limit: usize, inverse: bool) -> Vec<Vec<u64>> {
        let mut out = Vec::new();
        let mut len = 1;
        while len < limit {
            let mut w = self.root(len.trailing_zeros() + 1);
            if inverse {
                w = self.inv(w);
            }
            let mut t = Vec::with_capacity(len);
            self.twiddles(w, 0, len, &mut t);
            out.push(t);
            len *= 2;
        }
        out
    }

    /// In-place forward transform, natural order in, bit-reversed out.
    pub fn forward(&self, a: &mut [u64]) {
        let n = a.len();
        assert!(n.is_power_of_two() && n.trailing_zeros() <= MAX_LOG_LEN);
        let block = n.min(CACHE_BLOCK);
        let mut tw = Vec::with_capacity(TWIDDLE_CHUNK);
        let mut len = n / 2;
        while len >= block {
            self.stage(a, len, self.root(len.trailing_zeros() + 1), true, &mut tw);
            len /= 2;
        }
        // remaining stages stay inside one cache-sized block at a time
        let tables = self.small_tables(block, false);
        for b in a.chunks_exact_mut(block) {
            let mut len = block / 2;
            while len >= 1 {
                let t = &tables[len.trailing_zeros() as usize];
                for sub in b.chunks_exact_mut(2 * len) {
                    let (lo, hi) = sub.split_at_mut(len);
                    self.dif_butterflies(lo, hi, t);
                }
                len /= 2;
            }
        }
    }

    /// In-place inverse transform, bit-reversed in, natural order out,
    /// including the `1/n` scaling.
    pub fn inverse(&self, a: &mut [u64]) {
        let n = a.len();
        assert!(n.is_power_of_two() && n.trailing_zeros() <= MAX_LOG_LEN);
        let block = n.min(CACHE_BLOCK);
        let tables = self.small_tables(block, true);
        for b in a.chunks_exact_mut(block) {
            let mut len = 1;
            while len < block {
                let t = &tables[len.trailing_zeros() as usize];
                for sub in b.chunks_exact_mut(2 * len) {
                    let (lo, hi) = sub.split_at_mut(len);
                    self.dit_butterflies(lo, hi, t);
                }
                len *= 2;
            }
        }
        let mut tw = Vec::with_capacity(TWIDDLE_CHUNK);
        let mut len = block;
        while len < n {
            let w = self.inv(self.root(len.trailing_zeros() + 1));
            self.stage(a, len, w, false, &mut tw);
            len *= 2;
        }
        let ninv = self.inv(self.to_mont(n as u64));
        for x in a.iter_mut() {
            *x = self.mul(*x, ninv);
        }
    }

    /// Truncated product `(a·b) mod q^n_out` for Montgomery-form inputs.
    pub fn mul_truncated(&self, a: &[u64], b: &[u64], n_out: usize) -> Vec<u64> {
        let la = a.len().min(n_out);
        let lb = b.len().min(n_out);
        if la == 0 || lb == 0 {
            return vec![0; n_out];
        }
        let len = (la + lb - 1).next_power_of_two();
        let mut fa = vec![0u64; len];
        fa[..la].copy_from_slice(&a[..la]);
        self.forward(&mut fa);
        let mut fb = vec![0u64; len];
        fb[..lb].copy_from_slice(&b[..lb]);
        self.forward(&mut fb);
        for (x, y) in fa.iter_mut().zip(&fb) {
            *x = self.mul(*x, *y);
        }
        drop(fb);
        self.inverse(&mut fa);
        // copy out so the oversized transform buffer is released
        let mut out = fa[..n_out.min(len)].to_vec();
        drop(fa);
        out.resize(n_out, 0);
        out
    }

    /// Truncated square, using a single transform buffer.
    pub fn square_truncated(&self, a: &[u64], n_out: usize) -> Vec<u64> {
        let la = a.len().min(n_out);
        if la == 0 {
            return vec![0; n_out];
        }
        let len = (2 * la - 1).next_power_of_two();
        let mut fa = vec![0u64; len];
        fa[..la].copy_from_slice(&a[..la]);
        self.forward(&mut fa);
        for x in fa.iter_mut() {
            *x = self.mul(*x, *x);
        }
        self.inverse(&mut fa);
        // copy out so the oversized transform buffer is released
        let mut out = fa[..n_out.min(len)].to_vec();
        drop(fa);
        out.resize(n_out, 0);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(f: &Field, a: &[u64], b: &[u64], n: usize) -> Vec<u64> {
        let mut r = vec![0u64; n];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                if i + j < n {
                    r[i + j] = f.add(r[i + j], f.mul(x, y));
                }
            }
        }
        r
    }

    #[test]
    fn primes_have_two_adic_roots() {
        for i in 0..PRIMES.len() {
            let f = Field::nth(i);
            assert!(crate::primes::is_prime(f.p));
            assert_eq!((f.p - 1) % (1u64 << 32), 0);
            let w = f.root(32);
            let half = f.pow(w, 1 << 31);
            assert_eq!(f.from_mont(half), f.p - 1, "g is not a generator of the 2-part");
        }
    }

    #[test]
    fn montgomery_round_trip() {
        let f = Field::nth(0);
        for a in [0u64, 1, 2, 12345, f.p - 1] {
            assert_eq!(f.from_mont(f.to_mont(a)), a);
        }
        let a = f.to_mont(1 << 40);
        let b = f.to_mont(1 << 30);
        assert_eq!(f.from_mont(f.mul(a, b)), ((1u128 << 70) % f.p as u128) as u64);
    }

    #[test]
    fn convolution_matches_schoolbook() {
        for i in [0, 5, 11] {
            let f = Field::nth(i);
            let a: Vec<u64> = (0..300).map(|k| f.from_i64(k * k - 77 * k + 5)).collect();
            let b: Vec<u64> = (0..200).map(|k| f.from_i64(3 - 2 * k)).collect();
            assert_eq!(f.mul_truncated(&a, &b, 400), naive(&f, &a, &b, 400));
            assert_eq!(f.square_truncated(&a, 350), naive(&f, &a, &a, 350));
        }
    }

    #[test]
    fn large_stage_path() {
        // length 2^18 spans several twiddle chunks per stage
        let f = Field::nth(2);
        let n = 1 << 18;
        let a: Vec<u64> = (0..n as i64).map(|k| f.from_i64(k % 7 - 3)).collect();
        let mut t = a.clone();
        f.forward(&mut t);
        f.inverse(&mut t);
        assert_eq!(t, a);
    }
}
