//! Arithmetic in F_q, q = p^e an odd prime power.
//!
//! An element is its canonical index in [0, q): the polynomial
//! c_0 + c_1 x + ... + c_{e-1} x^{e-1} over F_p has index Σ c_i p^i
//! (little-endian digits), so index arithmetic and digit arithmetic agree
//! and equality is integer equality. For e > 1 the quotient is taken by the
//! lexicographically smallest monic irreducible modulus, comparing the
//! constant coefficient first; for e = 1 the modulus is the formal `x` and
//! plays no role.
//!
//! Construction finds the smallest-index generator ν of the unit group and
//! tabulates ν^i, discrete logs, negation, smaller square roots and traces,
//! after which multiplication and division are O(1). Additions work on
//! digits. The quadratic character is *computed* as a^((q−1)/2) rather than
//! read from a table; tests cross-check it against an exhaustive square
//! table, and division by extended Euclid is cross-checked against the
//! log-table inverse.

use std::fmt;
use std::sync::Arc;
use thiserror::Error;

/// Canonical index of a field element, in [0, q).
pub type Elem = u64;

pub const DEFAULT_MAX_Q: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("p = {0} is not prime")]
    NotPrime(u64),
    #[error("characteristic 2 is unsupported: norms and the quadratic character need odd q")]
    EvenCharacteristic,
    #[error("e = 0: the extension degree must be at least 1")]
    ZeroDegree,
    #[error("q = {p}^{e} exceeds the configured maximum {max}")]
    TooLarge { p: u64, e: u32, max: u64 },
    #[error("division by zero (divisor was the zero element)")]
    DivisionByZero,
}

struct Inner {
    p: u64,
    e: u32,
    q: u64,
    /// Little-endian, length e+1, leading coefficient 1.
    modulus: Vec<u64>,
    nu: Elem,
    /// exp[i] = ν^i for i in [0, q−1).
    exp: Vec<u32>,
    /// log[a] for a ≠ 0; log[0] is a sentinel and never read.
    log: Vec<u32>,
    neg: Vec<u32>,
    /// Smaller-index square root, or SQRT_NONE.
    sqrt: Vec<u32>,
    /// Tr(a) as an element of the prime subfield (index < p).
    trace: Vec<u32>,
}

const SQRT_NONE: u32 = u32::MAX;

/// A concrete F_q with precomputed tables. Cheap to clone (shared tables).
#[derive(Clone)]
pub struct Field {
    inner: Arc<Inner>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field(q = {}^{})", self.p(), self.e())
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut fs = Vec::new();
    let mut k = 2;
    while k * k <= n {
        if n % k == 0 {
            fs.push(k);
            while n % k == 0 {
                n /= k;
            }
        }
        k += 1;
    }
    if n > 1 {
        fs.push(n);
    }
    fs
}

/// Polynomial helpers over F_p, little-endian coefficient slices.
mod poly {
    /// Remainder of `a` by monic `m`, in place; returns the reduced vector
    /// trimmed to deg < deg m.
    pub fn rem(mut a: Vec<u64>, m: &[u64], p: u64) -> Vec<u64> {
        let dm = m.len() - 1;
        while a.len() > dm {
            let lead = *a.last().unwrap();
            let top = a.len() - 1;
            if lead != 0 {
                for i in 0..dm {
                    let sub = lead * m[i] % p;
                    let idx = top - dm + i;
                    a[idx] = (a[idx] + p - sub) % p;
                }
            }
            a.pop();
        }
        a
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        out
    }

    pub fn is_zero(a: &[u64]) -> bool {
        a.iter().all(|&c| c == 0)
    }
}

impl Field {
    /// Builds F_{p^e} with the default size bound.
    pub fn new(p: u64, e: u32) -> Result<Field, FieldError> {
        Field::with_max(p, e, DEFAULT_MAX_Q)
    }

    /// Builds the field of order q, factoring q = p^e itself. Rejects q
    /// that is not an odd prime power.
    pub fn from_order(q: u64) -> Result<Field, FieldError> {
        if q < 2 {
            return Err(FieldError::NotPrime(q));
        }
        let mut p = q;
        for cand in 2.. {
            if cand * cand > q {
                break;
            }
            if q % cand == 0 {
                p = cand;
                break;
            }
        }
        let mut e = 0;
        let mut rest = q;
        while rest % p == 0 {
            rest /= p;
            e += 1;
        }
        if rest != 1 {
            return Err(FieldError::NotPrime(q));
        }
        Field::new(p, e)
    }

    pub fn with_max(p: u64, e: u32, max_q: u64) -> Result<Field, FieldError> {
        if p == 2 {
            return Err(FieldError::EvenCharacteristic);
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if e == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let mut q: u64 = 1;
        for _ in 0..e {
            q = q.checked_mul(p).filter(|&v| v <= max_q).ok_or(FieldError::TooLarge {
                p,
                e,
                max: max_q,
            })?;
        }

        let modulus = smallest_irreducible(p, e);
        let raw = Raw { p, e: e as usize, q, modulus: &modulus };

        let nu = find_generator(&raw);

        // exp/log from ν; the cycle closing after exactly q−1 steps re-proves
        // that ν generates and that the modulus is irreducible.
        let mut exp = vec![0u32; (q - 1) as usize];
        let mut log = vec![u32::MAX; q as usize];
        let mut acc: Elem = 1;
        for i in 0..(q - 1) as usize {
            exp[i] = acc as u32;
            assert!(log[acc as usize] == u32::MAX, "ν has order < q−1");
            log[acc as usize] = i as u32;
            acc = raw.mul(acc, nu);
        }
        assert_eq!(acc, 1, "ν^(q−1) ≠ 1: modulus not irreducible?");

        let neg: Vec<u32> = (0..q).map(|a| raw.neg(a) as u32).collect();

        let mut sqrt = vec![SQRT_NONE; q as usize];
        for r in 0..q {
            let s = raw.mul(r, r) as usize;
            if sqrt[s] == SQRT_NONE || (r as u32) < sqrt[s] {
                sqrt[s] = r as u32;
            }
        }

        let mut trace = vec![0u32; q as usize];
        if e > 1 {
            for a in 1..q {
                let mut t: Elem = 0;
                let mut pw: u64 = 1;
                for _ in 0..e {
                    t = raw.add(t, raw.pow(a, pw));
                    pw *= p;
                }
                debug_assert!(t < p, "trace landed outside the prime subfield");
                trace[a as usize] = t as u32;
            }
        } else {
            for a in 0..q {
                trace[a as usize] = a as u32;
            }
        }

        Ok(Field {
            inner: Arc::new(Inner { p, e, q, modulus, nu, exp, log, neg, sqrt, trace }),
        })
    }

    pub fn p(&self) -> u64 {
        self.inner.p
    }

    pub fn e(&self) -> u32 {
        self.inner.e
    }

    pub fn q(&self) -> u64 {
        self.inner.q
    }

    /// The modulus polynomial, little-endian, length e+1. `[0, 1]` (the
    /// polynomial x) for prime fields, where no quotient is involved.
    pub fn modulus(&self) -> &[u64] {
        &self.inner.modulus
    }

    /// Smallest-index generator of the unit group.
    pub fn nu(&self) -> Elem {
        self.inner.nu
    }

    pub fn zero(&self) -> Elem {
        0
    }

    pub fn one(&self) -> Elem {
        1
    }

    /// The constant n mod p, for small integer constants.
    pub fn from_int(&self, n: i64) -> Elem {
        let p = self.inner.p as i64;
        (n.rem_euclid(p)) as Elem
    }

    pub fn minus_one(&self) -> Elem {
        self.neg(1)
    }

    /// Little-endian base-p digits = polynomial coefficients, length e.
    pub fn coeffs(&self, a: Elem) -> Vec<u64> {
        debug_assert!(a < self.q());
        let (p, e) = (self.inner.p, self.inner.e as usize);
        let mut a = a;
        let mut out = Vec::with_capacity(e);
        for _ in 0..e {
            out.push(a % p);
            a /= p;
        }
        out
    }

    /// Index of the element with the given coefficients (reduced mod p).
    /// Accepts any length; missing high coefficients are zero.
    pub fn from_coeffs(&self, coeffs: &[u64]) -> Elem {
        assert!(coeffs.len() <= self.inner.e as usize, "too many coefficients");
        let p = self.inner.p;
        let mut idx: u64 = 0;
        for &c in coeffs.iter().rev() {
            idx = idx * p + c % p;
        }
        idx
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        let inner = &*self.inner;
        if inner.e == 1 {
            let s = a + b;
            if s >= inner.p {
                s - inner.p
            } else {
                s
            }
        } else {
            let (p, mut a, mut b) = (inner.p, a, b);
            let mut out: u64 = 0;
            let mut place: u64 = 1;
            while a != 0 || b != 0 {
                let mut s = a % p + b % p;
                if s >= p {
                    s -= p;
                }
                out += s * place;
                place *= p;
                a /= p;
                b /= p;
            }
            out
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        self.inner.neg[a as usize] as Elem
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a == 0 || b == 0 {
            return 0;
        }
        let inner = &*self.inner;
        let m = inner.q - 1;
        let i = inner.log[a as usize] as u64 + inner.log[b as usize] as u64;
        let i = if i >= m { i - m } else { i };
        inner.exp[i as usize] as Elem
    }

    #[inline]
    pub fn sq(&self, a: Elem) -> Elem {
        self.mul(a, a)
    }

    /// Inverse by the extended Euclidean algorithm (integers for e = 1,
    /// polynomials otherwise). Debug builds cross-check the log-table route.
    pub fn inv(&self, a: Elem) -> Result<Elem, FieldError> {
        if a == 0 {
            return Err(FieldError::DivisionByZero);
        }
        let inner = &*self.inner;
        let out = if inner.e == 1 {
            let (mut r0, mut r1) = (inner.p as i128, a as i128);
            let (mut t0, mut t1) = (0i128, 1i128);
            while r1 != 0 {
                let qt = r0 / r1;
                (r0, r1) = (r1, r0 - qt * r1);
                (t0, t1) = (t1, t0 - qt * t1);
            }
            debug_assert_eq!(r0, 1);
            t0.rem_euclid(inner.p as i128) as Elem
        } else {
            self.poly_inv(a)
        };
        debug_assert_eq!(
            out,
            inner.exp[((inner.q - 1) as usize - inner.log[a as usize] as usize) % (inner.q - 1) as usize]
                as Elem
        );
        Ok(out)
    }

    fn poly_inv(&self, a: Elem) -> Elem {
        let inner = &*self.inner;
        let p = inner.p;
        // Extended Euclid on (modulus, a) in F_p[x].
        let mut r0 = inner.modulus.clone();
        let mut r1 = self.coeffs(a);
        trim(&mut r1);
        let mut t0: Vec<u64> = vec![];
        let mut t1: Vec<u64> = vec![1];
        while !poly::is_zero(&r1) {
            let (quot, rem) = poly_divmod(&r0, &r1, p);
            let t2 = poly_sub(&t0, &poly::mul(&quot, &t1, p), p);
            r0 = r1;
            r1 = rem;
            t0 = t1;
            t1 = t2;
        }
        // r0 is a unit constant c; the inverse is t0 / c.
        trim(&mut r0);
        assert_eq!(r0.len(), 1, "gcd(modulus, a) not constant: modulus reducible?");
        let c = r0[0];
        let cinv = {
            let mut x = 1u64;
            // c^(p-2) mod p by repeated multiplication; p is tiny here.
            for _ in 0..p - 2 {
                x = x * c % p;
            }
            x
        };
        let scaled: Vec<u64> = t0.iter().map(|&v| v * cinv % p).collect();
        self.from_coeffs(&scaled)
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Elem, mut n: u64) -> Elem {
        if a == 0 {
            return if n == 0 { 1 } else { 0 };
        }
        let mut base = a;
        let mut acc: Elem = 1;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            n >>= 1;
        }
        acc
    }

    /// Quadratic character: 0 at 0, +1 on nonzero squares, −1 otherwise,
    /// decided by computing a^((q−1)/2).
    pub fn chi(&self, a: Elem) -> i32 {
        if a == 0 {
            return 0;
        }
        let v = self.pow(a, (self.q() - 1) / 2);
        if v == 1 {
            1
        } else {
            debug_assert_eq!(v, self.minus_one());
            -1
        }
    }

    /// The smaller-index square root, if one exists. `sqrt(0) = 0`.
    pub fn sqrt(&self, a: Elem) -> Option<Elem> {
        match self.inner.sqrt[a as usize] {
            SQRT_NONE => None,
            r => Some(r as Elem),
        }
    }

    /// Tr(a) = Σ_{i<e} a^{p^i}, an element of the prime subfield, returned
    /// as its integer value in [0, p).
    #[inline]
    pub fn trace(&self, a: Elem) -> u64 {
        self.inner.trace[a as usize] as u64
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.q()
    }

    pub fn units(&self) -> impl Iterator<Item = Elem> {
        1..self.q()
    }

    /// Nonzero squares in index order.
    pub fn nonzero_squares(&self) -> Vec<Elem> {
        self.units().filter(|&a| self.chi(a) == 1).collect()
    }
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn poly_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out = vec![0u64; n];
    for i in 0..n {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        out[i] = (x + p - y) % p;
    }
    trim(&mut out);
    out
}

/// Division with remainder by a nonzero (not necessarily monic) divisor.
fn poly_divmod(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let mut rem = a.to_vec();
    trim(&mut rem);
    let mut bb = b.to_vec();
    trim(&mut bb);
    assert!(!bb.is_empty());
    let db = bb.len() - 1;
    let lead = *bb.last().unwrap();
    let lead_inv = {
        let mut x = 1u64;
        for _ in 0..p - 2 {
            x = x * lead % p;
        }
        x
    };
    if rem.len() <= db {
        return (vec![], rem);
    }
    let mut quot = vec![0u64; rem.len() - db];
    while rem.len() > db {
        let c = *rem.last().unwrap() * lead_inv % p;
        let shift = rem.len() - 1 - db;
        quot[shift] = c;
        if c != 0 {
            for i in 0..=db {
                let sub = c * bb[i] % p;
                rem[shift + i] = (rem[shift + i] + p - sub) % p;
            }
        }
        rem.pop();
        trim(&mut rem);
        if rem.is_empty() {
            break;
        }
    }
    trim(&mut quot);
    (quot, rem)
}

/// Index-level arithmetic before any tables exist.
struct Raw<'a> {
    p: u64,
    e: usize,
    q: u64,
    modulus: &'a [u64],
}

impl Raw<'_> {
    fn decode(&self, mut a: Elem) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.e);
        for _ in 0..self.e {
            out.push(a % self.p);
            a /= self.p;
        }
        out
    }

    fn encode(&self, c: &[u64]) -> Elem {
        let mut idx = 0u64;
        for &v in c.iter().rev() {
            idx = idx * self.p + v;
        }
        idx
    }

    fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.e == 1 {
            return (a + b) % self.p;
        }
        let (ca, cb) = (self.decode(a), self.decode(b));
        let sum: Vec<u64> = ca.iter().zip(&cb).map(|(x, y)| (x + y) % self.p).collect();
        self.encode(&sum)
    }

    fn neg(&self, a: Elem) -> Elem {
        if self.e == 1 {
            return (self.p - a) % self.p;
        }
        let c: Vec<u64> = self.decode(a).iter().map(|&x| (self.p - x) % self.p).collect();
        self.encode(&c)
    }

    fn mul(&self, a: Elem, b: Elem) -> Elem {
        if self.e == 1 {
            return a * b % self.p;
        }
        let prod = poly::mul(&self.decode(a), &self.decode(b), self.p);
        let mut red = poly::rem(prod, self.modulus, self.p);
        red.resize(self.e, 0);
        self.encode(&red)
    }

    fn pow(&self, a: Elem, mut n: u64) -> Elem {
        let mut base = a;
        let mut acc: Elem = 1;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            n >>= 1;
        }
        acc
    }

    fn order_is_full(&self, g: Elem, factors: &[u64]) -> bool {
        factors.iter().all(|&r| self.pow(g, (self.q - 1) / r) != 1)
    }
}

/// Lexicographically smallest monic irreducible of degree e over F_p,
/// comparing the constant coefficient first. Irreducibility by trial
/// division against every monic polynomial of degree ≤ e/2.
fn smallest_irreducible(p: u64, e: u32) -> Vec<u64> {
    let e = e as usize;
    if e == 1 {
        return vec![0, 1];
    }
    let total = p.pow(e as u32);
    for n in 0..total {
        // Digits of n, highest digit = constant coefficient, so ascending n
        // enumerates candidates in the required low-degree-first order.
        let mut digits = Vec::with_capacity(e);
        let mut v = n;
        for _ in 0..e {
            digits.push(v % p);
            v /= p;
        }
        let mut cand: Vec<u64> = digits.into_iter().rev().collect();
        cand.push(1);
        if is_irreducible(&cand, p) {
            return cand;
        }
    }
    unreachable!("irreducible polynomials of every degree exist");
}

fn is_irreducible(f: &[u64], p: u64) -> bool {
    let e = f.len() - 1;
    if f[0] == 0 {
        return e == 1;
    }
    for m in 1..=e / 2 {
        for n in 0..p.pow(m as u32) {
            let mut g = Vec::with_capacity(m + 1);
            let mut v = n;
            for _ in 0..m {
                g.push(v % p);
                v /= p;
            }
            g.push(1);
            let rem = poly::rem(f.to_vec(), &g, p);
            if poly::is_zero(&rem) {
                return false;
            }
        }
    }
    true
}

fn find_generator(raw: &Raw) -> Elem {
    let factors = prime_factors(raw.q - 1);
    for g in 2..raw.q {
        if raw.order_is_full(g, &factors) {
            return g;
        }
    }
    unreachable!("the unit group of a finite field is cyclic");
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_fields() -> Vec<Field> {
        [(3, 1), (5, 1), (7, 1), (11, 1), (3, 2), (5, 2), (3, 3), (3, 4)]
            .iter()
            .map(|&(p, e)| Field::new(p, e).unwrap())
            .collect()
    }

    #[test]
    fn construction_basics() {
        let f9 = Field::new(3, 2).unwrap();
        assert_eq!(f9.q(), 9);
        assert_eq!(f9.modulus(), &[1, 0, 1]); // x² + 1
        let f3 = Field::new(3, 1).unwrap();
        assert_eq!(f3.nu(), 2);
        let f5 = Field::new(5, 1).unwrap();
        assert_eq!(f5.nu(), 2);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(Field::new(4, 1), Err(FieldError::NotPrime(4))));
        assert!(matches!(Field::new(9, 1), Err(FieldError::NotPrime(9))));
        assert!(matches!(Field::new(2, 3), Err(FieldError::EvenCharacteristic)));
        assert!(matches!(Field::new(3, 0), Err(FieldError::ZeroDegree)));
        assert!(matches!(Field::new(3, 20), Err(FieldError::TooLarge { .. })));
    }

    #[test]
    fn frozen_arithmetic_values() {
        let f3 = Field::new(3, 1).unwrap();
        assert_eq!(f3.mul(2, 2), 1);
        let f5 = Field::new(5, 1).unwrap();
        assert_eq!(f5.div(2, 3).unwrap(), 4);
        assert_eq!(f5.div(2, 0), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn field_laws_exhaustive() {
        for f in [Field::new(5, 1).unwrap(), Field::new(3, 2).unwrap()] {
            let q = f.q();
            for a in 0..q {
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
                for b in 0..q {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in 0..q {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    // Independent oracle: multiplication straight from polynomial arithmetic,
    // no exp/log tables involved.
    #[test]
    fn mul_matches_polynomial_oracle() {
        for f in sample_fields() {
            let raw = Raw {
                p: f.p(),
                e: f.e() as usize,
                q: f.q(),
                modulus: f.modulus(),
            };
            for a in 0..f.q().min(64) {
                for b in 0..f.q() {
                    assert_eq!(f.mul(a, b), raw.mul(a, b), "q={} a={a} b={b}", f.q());
                }
            }
        }
    }

    #[test]
    fn generator_is_smallest_and_enumerates_units() {
        for f in sample_fields() {
            let q = f.q();
            let order = |g: Elem| {
                let mut v = g;
                let mut k = 1u64;
                while v != 1 {
                    v = f.mul(v, g);
                    k += 1;
                }
                k
            };
            assert_eq!(order(f.nu()), q - 1, "q={q}");
            for g in 2..f.nu() {
                assert_ne!(order(g), q - 1, "smaller generator exists for q={q}");
            }
            let mut seen = vec![false; q as usize];
            let mut v: Elem = 1;
            for _ in 0..q - 1 {
                assert!(!seen[v as usize]);
                seen[v as usize] = true;
                v = f.mul(v, f.nu());
            }
            assert!(seen[1..].iter().all(|&s| s));
        }
    }

    #[test]
    fn frozen_character_table_f3() {
        let f3 = Field::new(3, 1).unwrap();
        assert_eq!((f3.chi(0), f3.chi(1), f3.chi(2)), (0, 1, -1));
    }

    // Two independent methods: χ by exponentiation vs an exhaustive table of
    // squares.
    #[test]
    fn character_matches_square_table_and_sums_to_zero() {
        for f in sample_fields() {
            let q = f.q();
            let mut is_square = vec![false; q as usize];
            for r in 0..q {
                is_square[f.mul(r, r) as usize] = true;
            }
            let mut sum: i64 = 0;
            let mut squares = 0u64;
            for a in 0..q {
                let c = f.chi(a);
                sum += c as i64;
                let expect = if a == 0 {
                    0
                } else if is_square[a as usize] {
                    1
                } else {
                    -1
                };
                assert_eq!(c, expect, "q={q} a={a}");
                if a != 0 && is_square[a as usize] {
                    squares += 1;
                }
            }
            assert_eq!(sum, 0, "q={q}");
            assert_eq!(squares, (q - 1) / 2, "q={q}");
            for a in 0..q {
                for b in 0..q {
                    assert_eq!(f.chi(f.mul(a, b)), f.chi(a) * f.chi(b));
                }
            }
        }
    }

    #[test]
    fn sqrt_frozen_values_and_roundtrip() {
        let f5 = Field::new(5, 1).unwrap();
        assert_eq!(f5.sqrt(4), Some(2));
        assert_eq!(f5.sqrt(0), Some(0));
        let f3 = Field::new(3, 1).unwrap();
        assert_eq!(f3.sqrt(2), None);
        for f in sample_fields() {
            for a in 0..f.q() {
                match f.sqrt(a) {
                    Some(r) => {
                        assert_eq!(f.mul(r, r), a);
                        assert!(r <= f.neg(r), "not the smaller root: q={} a={a}", f.q());
                        assert!(f.chi(a) >= 0);
                    }
                    None => assert_eq!(f.chi(a), -1),
                }
            }
        }
    }

    #[test]
    fn inverse_table_agrees_with_euclid() {
        for f in sample_fields() {
            for a in f.units() {
                let i = f.inv(a).unwrap();
                assert_eq!(f.mul(a, i), 1, "q={} a={a}", f.q());
            }
        }
    }

    #[test]
    fn trace_is_additive_and_lands_in_prime_subfield() {
        let f9 = Field::new(3, 2).unwrap();
        // With modulus x²+1: x³ = −x, so Tr(x) = x + x³ = 0 and Tr(1) = 2.
        let x = f9.from_coeffs(&[0, 1]);
        assert_eq!(f9.trace(x), 0);
        assert_eq!(f9.trace(1), 2);
        for f in sample_fields() {
            for a in 0..f.q() {
                assert!(f.trace(a) < f.p());
                for b in 0..f.q() {
                    let lhs = f.trace(f.add(a, b));
                    let rhs = (f.trace(a) + f.trace(b)) % f.p();
                    assert_eq!(lhs, rhs);
                }
            }
            if f.e() == 1 {
                for a in 0..f.q() {
                    assert_eq!(f.trace(a), a);
                }
            }
        }
    }

    #[test]
    fn coeff_codec_roundtrips() {
        for f in sample_fields() {
            for a in 0..f.q() {
                assert_eq!(f.from_coeffs(&f.coeffs(a)), a);
            }
        }
        let f9 = Field::new(3, 2).unwrap();
        assert_eq!(f9.from_coeffs(&[2, 1]), 5);
        assert_eq!(f9.coeffs(5), vec![2, 1]);
    }

    #[test]
    fn moduli_have_no_roots_in_the_prime_field() {
        // Degree 2 and 3 moduli are irreducible iff rootless; an independent
        // check on the trial-division construction.
        for (p, e) in [(3u64, 2u32), (5, 2), (3, 3), (7, 2)] {
            let f = Field::new(p, e).unwrap();
            let m = f.modulus();
            for r in 0..p {
                let mut v = 0u64;
                for &c in m.iter().rev() {
                    v = (v * r + c) % p;
                }
                assert_ne!(v, 0, "modulus of F_{p}^{e} has root {r}");
            }
        }
    }
}
