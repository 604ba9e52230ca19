//! Arithmetic in GF(q), q = p^m ≤ 2^16.
//!
//! Elements are integer codes in `[q]`. For prime fields the code is the
//! residue itself. For extension fields the code packs the polynomial-basis
//! coefficients as base-p digits (bits when p = 2), reduced modulo the
//! numerically smallest primitive polynomial of degree m unless another one
//! is supplied. Multiplication goes through exp/log tables in both cases.

mod matrix;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

pub use matrix::{solve, vandermonde_parity, FieldMatrix, LinearSolver};

/// Integer code of a field element under the owning [`Field`]'s enumeration.
pub type FieldElement = u32;

pub const MAX_ORDER: u32 = 1 << 16;

#[derive(Clone)]
pub struct Field(Arc<Tables>);

struct Tables {
    p: u32,
    m: u32,
    q: u32,
    /// Reduction polynomial including the leading term, base-p encoded.
    poly: Option<u32>,
    /// exp[k] = g^k for k in [0, 2(q-1)).
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl Field {
    /// The field of order `q`, using the default reduction polynomial.
    /// Tables are built once per order and shared afterwards.
    pub fn new(q: u32) -> Result<Self> {
        static CACHE: OnceLock<Mutex<HashMap<u32, Field>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(f) = cache.lock().unwrap().get(&q) {
            return Ok(f.clone());
        }
        let f = Self::build(q)?;
        cache.lock().unwrap().insert(q, f.clone());
        Ok(f)
    }

    fn build(q: u32) -> Result<Self> {
        let (p, m) = prime_power(q as u64).ok_or(Error::NotPrimePower(q as u64))?;
        if m == 1 {
            return Ok(Self::prime(p));
        }
        let top = q;
        for low in 1..q {
            if let Some(exp) = primitive_powers(p, m, top + low) {
                return Ok(Self::from_exp(p, m, Some(top + low), exp));
            }
        }
        unreachable!("every extension field has a primitive polynomial")
    }

    /// The field of order `q` reduced modulo `poly` (base-p encoded, leading
    /// term included). `poly` must be primitive.
    pub fn with_poly(q: u32, poly: u32) -> Result<Self> {
        let (p, m) = prime_power(q as u64).ok_or(Error::NotPrimePower(q as u64))?;
        if m == 1 {
            return Self::new(q);
        }
        let bad = Error::NotPrimitive { poly, p, degree: m };
        if poly < q || poly >= 2 * q || poly.is_multiple_of(p) {
            return Err(bad);
        }
        let exp = primitive_powers(p, m, poly).ok_or(bad)?;
        Ok(Self::from_exp(p, m, Some(poly), exp))
    }

    fn prime(p: u32) -> Self {
        if p == 2 {
            return Self::from_exp(2, 1, None, vec![1]);
        }
        let order = p - 1;
        let factors = distinct_prime_factors(order);
        let g =
            (2..p).find(|&g| factors.iter().all(|&f| mod_pow(g, order / f, p) != 1)).expect("primitive root exists");
        let mut exp = Vec::with_capacity(order as usize);
        let mut x = 1u32;
        for _ in 0..order {
            exp.push(x);
            x = ((x as u64 * g as u64) % p as u64) as u32;
        }
        Self::from_exp(p, 1, None, exp)
    }

    fn from_exp(p: u32, m: u32, poly: Option<u32>, mut exp: Vec<u32>) -> Self {
        let q = p.pow(m);
        let order = (q - 1) as usize;
        debug_assert_eq!(exp.len(), order);
        let mut log = vec![0u32; q as usize];
        for (k, &e) in exp.iter().enumerate() {
            log[e as usize] = k as u32;
        }
        exp.extend_from_within(..);
        Field(Arc::new(Tables { p, m, q, poly, exp, log }))
    }

    pub fn order(&self) -> u32 {
        self.0.q
    }

    pub fn characteristic(&self) -> u32 {
        self.0.p
    }

    pub fn degree(&self) -> u32 {
        self.0.m
    }

    pub fn poly(&self) -> Option<u32> {
        self.0.poly
    }

    /// The primitive element used for the exp/log tables.
    pub fn generator(&self) -> FieldElement {
        if self.0.q == 2 {
            1
        } else {
            self.0.exp[1]
        }
    }

    pub fn contains(&self, a: FieldElement) -> bool {
        a < self.0.q
    }

    pub fn check(&self, a: FieldElement) -> Result<FieldElement> {
        if self.contains(a) {
            Ok(a)
        } else {
            Err(Error::NotInField { value: a, q: self.0.q })
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        0..self.0.q
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let t = &*self.0;
        if t.p == 2 {
            a ^ b
        } else if t.m == 1 {
            let s = a + b;
            if s >= t.p {
                s - t.p
            } else {
                s
            }
        } else {
            digitwise(t.p, t.m, a, b, |x, y| (x + y) % t.p)
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        let t = &*self.0;
        if t.p == 2 || a == 0 {
            a
        } else if t.m == 1 {
            t.p - a
        } else {
            digitwise(t.p, t.m, a, 0, |x, _| (t.p - x) % t.p)
        }
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a == 0 || b == 0 {
            return 0;
        }
        let t = &*self.0;
        t.exp[(t.log[a as usize] + t.log[b as usize]) as usize]
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a == 0 {
            return Err(Error::InversionOfZero);
        }
        let t = &*self.0;
        let order = t.q - 1;
        Ok(t.exp[((order - t.log[a as usize]) % order) as usize])
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let t = &*self.0;
        let order = (t.q - 1) as u64;
        t.exp[((t.log[a as usize] as u64 * (e % order)) % order) as usize]
    }

    /// Checked addition for codes of unknown provenance.
    pub fn try_add(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.add(self.check(a)?, self.check(b)?))
    }

    pub fn try_mul(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(self.check(a)?, self.check(b)?))
    }

    /// Sum of a sequence of elements.
    pub fn sum<I: IntoIterator<Item = FieldElement>>(&self, it: I) -> FieldElement {
        it.into_iter().fold(0, |acc, x| self.add(acc, x))
    }

    /// `dst[k] += src[k]`. Over characteristic 2 this is a plain xor sweep.
    pub fn add_assign_slice(&self, dst: &mut [FieldElement], src: &[FieldElement]) {
        assert_eq!(dst.len(), src.len());
        if self.0.p == 2 {
            for (d, s) in dst.iter_mut().zip(src) {
                *d ^= *s;
            }
        } else {
            for (d, s) in dst.iter_mut().zip(src) {
                *d = self.add(*d, *s);
            }
        }
    }

    /// `dst[k] += c * src[k]`.
    pub fn axpy(&self, dst: &mut [FieldElement], c: FieldElement, src: &[FieldElement]) {
        assert_eq!(dst.len(), src.len());
        match c {
            0 => {}
            1 => self.add_assign_slice(dst, src),
            _ => {
                for (d, s) in dst.iter_mut().zip(src) {
                    *d = self.add(*d, self.mul(c, *s));
                }
            }
        }
    }

    /// Multiplicative order of a nonzero element, computed by repeated
    /// multiplication (independent of the log table).
    pub fn multiplicative_order(&self, a: FieldElement) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let mut x = a;
        let mut k = 1;
        while x != 1 {
            x = self.mul(x, a);
            k += 1;
        }
        Some(k)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.q == other.0.q && self.0.poly == other.0.poly)
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field({self})")
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "gf({})", self.0.q)?;
        match self.0.poly {
            Some(poly) if self.0.p == 2 => write!(f, ":{poly:#b}"),
            Some(poly) => write!(f, ":{poly}"),
            None => Ok(()),
        }
    }
}

impl FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::BadFieldString(s.to_string());
        let s = s.trim();
        let rest = s.strip_prefix("gf(").ok_or_else(bad)?;
        let (q, tail) = rest.split_once(')').ok_or_else(bad)?;
        let q: u32 = q.trim().parse().map_err(|_| bad())?;
        if tail.is_empty() {
            return Field::new(q);
        }
        let mask = tail.strip_prefix(':').ok_or_else(bad)?;
        let poly = if let Some(b) = mask.strip_prefix("0b") {
            u32::from_str_radix(b, 2)
        } else if let Some(h) = mask.strip_prefix("0x") {
            u32::from_str_radix(h, 16)
        } else {
            mask.parse()
        }
        .map_err(|_| bad())?;
        Field::with_poly(q, poly)
    }
}

/// Returns `(p, m)` with `q = p^m`, or `None` if `q` is not a prime power in
/// `[2, 2^16]`.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if !(2..=MAX_ORDER as u64).contains(&q) {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut rest = q;
    let mut m = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        m += 1;
    }
    (rest == 1).then_some((p as u32, m))
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

/// Smallest prime power `>= lo`.
pub fn smallest_prime_power_at_least(lo: u32) -> Option<u32> {
    (lo.max(2)..=MAX_ORDER).find(|&q| prime_power(q as u64).is_some())
}

fn distinct_prime_factors(mut x: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= x {
        if x.is_multiple_of(d) {
            out.push(d);
            while x.is_multiple_of(d) {
                x /= d;
            }
        }
        d += 1;
    }
    if x > 1 {
        out.push(x);
    }
    out
}

fn mod_pow(b: u32, mut e: u32, p: u32) -> u32 {
    let (p, mut b, mut r) = (p as u64, b as u64 % p as u64, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r as u32
}

fn digitwise(p: u32, m: u32, mut a: u32, mut b: u32, f: impl Fn(u32, u32) -> u32) -> u32 {
    let mut out = 0;
    let mut place = 1;
    for _ in 0..m {
        out += f(a % p, b % p) * place;
        a /= p;
        b /= p;
        place *= p;
    }
    out
}

/// Powers of x modulo `poly`, or `None` if `poly` is not primitive.
fn primitive_powers(p: u32, m: u32, poly: u32) -> Option<Vec<u32>> {
    let q = p.pow(m);
    let high = q / p;
    let low = poly - q;
    let order = (q - 1) as usize;
    let mut out = Vec::with_capacity(order);
    let mut x = 1u32;
    for k in 0..order {
        if k > 0 && x == 1 {
            return None;
        }
        out.push(x);
        // multiply by x, then fold the overflow digit back with -top * low
        let top = x / high;
        let shifted = (x % high) * p;
        x = if top == 0 {
            shifted
        } else if p == 2 {
            shifted ^ low
        } else {
            digitwise(p, m, shifted, low, |s, l| (s + (p - (top * l) % p)) % p)
        };
    }
    (x == 1).then_some(out)
}
