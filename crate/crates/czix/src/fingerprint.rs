//! Karp-Rabin fingerprints over `S + sentinel` with O(1) substring
//! fingerprints, the concatenate/strip algebra, and certified
//! collision-freeness.
//!
//! A fingerprint carries the length of the string it hashes; the algebra
//! needs that much context and bundling it removes a class of misuse bugs.

use crate::error::Error;
use crate::suffix::SuffixIndex;
use rand::Rng;
use std::collections::HashMap;

/// 2^61 - 1. Fits 64-bit reduction with 128-bit intermediates; collision
/// probability per comparison is about N/p.
pub const DEFAULT_MODULUS: u64 = (1 << 61) - 1;

/// What the certification loop proved about the scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertMode {
    /// No two distinct equal-length substrings of the text collide.
    AllSubstrings,
    /// Collision-free only on substrings whose length is a power of two.
    /// Enough when self-referencing phrases are disabled; arbitrary-length
    /// probe comparisons must then be decomposed into power-of-two pieces.
    Pow2LengthsOnly,
}

/// Fingerprint of a string together with the length it covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fp {
    pub value: u64,
    pub len: usize,
}

impl Fp {
    pub const EMPTY: Fp = Fp { value: 0, len: 0 };
}

/// Fingerprint tables over one text (plus sentinel).
pub struct FingerprintScheme {
    p: u64,
    x: u64,
    inv_x: u64,
    /// x^j mod p for 0 <= j <= N.
    pow: Vec<u64>,
    /// x^-j mod p for 0 <= j <= N.
    ipow: Vec<u64>,
    /// prefix[j] = fingerprint value of text[0..j]; prefix[0] = 0.
    prefix: Vec<u64>,
    mode: CertMode,
    certified: bool,
}

impl FingerprintScheme {
    /// Tables for explicit `(p, x)`, uncertified. `p` must be prime.
    pub fn with_params(text: &[u8], p: u64, x: u64, mode: CertMode) -> FingerprintScheme {
        let n = text.len();
        let sym = |i: usize| -> u64 {
            if i == n {
                crate::SENTINEL as u64
            } else {
                text[i] as u64
            }
        };
        Self::build(n + 1, &sym, p, x, mode)
    }

    fn build(
        n_ext: usize,
        sym: &impl Fn(usize) -> u64,
        p: u64,
        x: u64,
        mode: CertMode,
    ) -> FingerprintScheme {
        assert!(x >= 1 && x < p);
        let inv_x = mod_pow(x, p - 2, p);
        let mut pow = Vec::with_capacity(n_ext + 1);
        let mut ipow = Vec::with_capacity(n_ext + 1);
        pow.push(1);
        ipow.push(1);
        for j in 1..=n_ext {
            pow.push(mul_mod(pow[j - 1], x, p));
            ipow.push(mul_mod(ipow[j - 1], inv_x, p));
        }
        let mut prefix = Vec::with_capacity(n_ext + 1);
        prefix.push(0u64);
        for j in 0..n_ext {
            let v = (prefix[j] + mul_mod(sym(j) % p, pow[j], p)) % p;
            prefix.push(v);
        }
        FingerprintScheme {
            p,
            x,
            inv_x,
            pow,
            ipow,
            prefix,
            mode,
            certified: false,
        }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn base(&self) -> u64 {
        self.x
    }

    pub fn mode(&self) -> CertMode {
        self.mode
    }

    pub fn is_certified(&self) -> bool {
        self.certified
    }

    /// x^e mod p; table lookup for e <= N, computed otherwise.
    pub fn pow(&self, e: usize) -> u64 {
        match self.pow.get(e) {
            Some(&v) => v,
            None => mod_pow(self.x, e as u64, self.p),
        }
    }

    pub fn ipow(&self, e: usize) -> u64 {
        match self.ipow.get(e) {
            Some(&v) => v,
            None => mod_pow(self.inv_x, e as u64, self.p),
        }
    }

    /// Fingerprint of `text[i..j]` (sentinel included at position n). O(1).
    #[inline]
    pub fn fp_substring(&self, i: usize, j: usize) -> Fp {
        debug_assert!(i <= j && j < self.prefix.len());
        let diff = (self.prefix[j] + self.p - self.prefix[i]) % self.p;
        Fp {
            value: mul_mod(diff, self.ipow[i], self.p),
            len: j - i,
        }
    }

    /// Fingerprint of the concatenation `a . b`.
    #[inline]
    pub fn concat(&self, a: Fp, b: Fp) -> Fp {
        Fp {
            value: (a.value + mul_mod(self.pow(a.len), b.value, self.p)) % self.p,
            len: a.len + b.len,
        }
    }

    /// Fingerprint of `S''` where `whole = prefix . S''`.
    pub fn strip_prefix(&self, whole: Fp, prefix: Fp) -> Result<Fp, Error> {
        if prefix.len > whole.len {
            return Err(Error::LengthUnderflow);
        }
        let diff = (whole.value + self.p - prefix.value) % self.p;
        Ok(Fp {
            value: mul_mod(diff, self.ipow(prefix.len), self.p),
            len: whole.len - prefix.len,
        })
    }

    /// Fingerprint of `S'` where `whole = S' . suffix`.
    pub fn strip_suffix(&self, whole: Fp, suffix: Fp) -> Result<Fp, Error> {
        if suffix.len > whole.len {
            return Err(Error::LengthUnderflow);
        }
        let head_len = whole.len - suffix.len;
        let shifted = mul_mod(self.pow(head_len), suffix.value, self.p);
        Ok(Fp {
            value: (whole.value + self.p - shifted) % self.p,
            len: head_len,
        })
    }
}

/// Check that no two distinct equal-length substrings share a fingerprint.
///
/// Lengths checked: every `1..=N` for [`CertMode::AllSubstrings`], only
/// powers of two for [`CertMode::Pow2LengthsOnly`]. Per length, a
/// transient fingerprint-to-substring-class map is built and discarded, so
/// auxiliary memory stays O(N). Substring identity comes from suffix-array
/// order: equal-length substrings are equal iff their suffix ranks are not
/// separated by an lcp value below that length.
pub fn verify_collision_free(
    scheme: &FingerprintScheme,
    idx: &SuffixIndex,
    mode: CertMode,
) -> bool {
    let n_ext = idx.len_with_sentinel();
    let lengths: Vec<usize> = match mode {
        CertMode::AllSubstrings => (1..=n_ext).collect(),
        CertMode::Pow2LengthsOnly => {
            let mut v = Vec::new();
            let mut l = 1;
            while l <= n_ext {
                v.push(l);
                l *= 2;
            }
            v
        }
    };
    let sa = idx.sa();
    let mut map: HashMap<u64, u32> = HashMap::new();
    for &len in &lengths {
        map.clear();
        let mut class = 0u32;
        let mut prev_rank: Option<usize> = None;
        for (k, &pos) in sa.iter().enumerate() {
            let pos = pos as usize;
            if pos + len > n_ext {
                continue;
            }
            if let Some(pr) = prev_rank {
                if idx.lcp_range_min(pr, k) < len {
                    class += 1;
                }
            }
            prev_rank = Some(k);
            let fp = scheme.fp_substring(pos, pos + len).value;
            match map.get(&fp) {
                Some(&c) if c != class => return false,
                Some(_) => {}
                None => {
                    map.insert(fp, class);
                }
            }
        }
    }
    true
}

/// Draw bases until the scheme is certified collision-free for `mode`.
/// Expected O(1) redraws.
pub fn make_scheme_for(
    idx: &SuffixIndex,
    mode: CertMode,
    rng: &mut impl Rng,
) -> FingerprintScheme {
    loop {
        let x = rng.gen_range(1..DEFAULT_MODULUS);
        let mut scheme =
            FingerprintScheme::with_params(idx.text(), DEFAULT_MODULUS, x, mode);
        if verify_collision_free(&scheme, idx, mode) {
            scheme.certified = true;
            return scheme;
        }
    }
}

/// Certify explicit parameters (used when reloading a persisted index).
/// Returns `None` if `(p, x)` is not collision-free for `mode`.
pub fn certify_params(
    idx: &SuffixIndex,
    p: u64,
    x: u64,
    mode: CertMode,
) -> Option<FingerprintScheme> {
    let mut scheme = FingerprintScheme::with_params(idx.text(), p, x, mode);
    if verify_collision_free(&scheme, idx, mode) {
        scheme.certified = true;
        Some(scheme)
    } else {
        None
    }
}

/// Build a certified scheme over `text` with the default modulus.
pub fn make_scheme(text: &[u8], mode: CertMode) -> FingerprintScheme {
    let idx = SuffixIndex::new(text.to_vec());
    make_scheme_for(&idx, mode, &mut rand::thread_rng())
}

#[inline]
fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn mod_pow(mut base: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        e >>= 1;
    }
    acc
}
