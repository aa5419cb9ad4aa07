//! Exact arithmetic in GF(p), GF(p^w) and a second extension L = F[y]/(h(y)).
//!
//! Elements are packed into a `u64`: the coefficient vector c_0..c_{w-1}
//! (little-endian in the generator) is read as the base-p number
//! `c_0 + c_1 p + ... + c_{w-1} p^{w-1}`. For p = 2 this is the familiar bit
//! vector, rendered in hex. Extension elements pack their F-coefficients the
//! same way in base |F|, so an element of F embeds into L as the same integer.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly;

/// Largest field order (exclusive bound on packed values is `u64::MAX + 1`).
const MAX_ORDER: u128 = 1 << 64;
/// Fields at most this large get log/antilog tables.
const TABLE_LIMIT: u64 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus is reducible")]
    Reducible,
    #[error("bad modulus: {0}")]
    BadModulus(String),
    #[error("field of order {0}^{1} exceeds 2^64 elements")]
    TooLarge(u128, usize),
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("division by zero")]
    DivideByZero,
    #[error("value {0:#x} is not an element of the field")]
    NotAnElement(u64),
}

/// Operations shared by every field an element may live in.
///
/// Elements are packed `u64` values; see the module docs for the encoding.
/// `0` and `1` are the additive and multiplicative identities in every
/// implementation.
pub trait Field: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn order(&self) -> u128;
    fn add(&self, a: u64, b: u64) -> u64;
    fn sub(&self, a: u64, b: u64) -> u64;
    fn neg(&self, a: u64) -> u64;
    fn mul(&self, a: u64, b: u64) -> u64;
    /// `None` for zero.
    fn inv(&self, a: u64) -> Option<u64>;
    /// The symbol field F this field is built on (itself for F).
    fn symbol_field(&self) -> &FieldSpec;

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1
    }

    fn contains(&self, a: u64) -> bool {
        (a as u128) < self.order()
    }

    fn pow(&self, a: u64, mut e: u128) -> u64 {
        let mut result = 1;
        let mut b = a;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(result, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        result
    }

    /// Bytes per element in the fixed-width little-endian encoding.
    fn byte_width(&self) -> usize {
        let bits = 128 - (self.order() - 1).leading_zeros() as usize;
        bits.div_ceil(8).max(1)
    }

    /// Whole payload bits one element can carry.
    fn payload_bits(&self) -> usize {
        127 - self.order().leading_zeros() as usize
    }

    fn encode_le(&self, a: u64, out: &mut Vec<u8>) {
        out.extend_from_slice(&a.to_le_bytes()[..self.byte_width()]);
    }

    /// Inverse of `encode_le`; `None` for a wrong length or a non-element.
    fn decode_le(&self, bytes: &[u8]) -> Option<u64> {
        if bytes.len() != self.byte_width() {
            return None;
        }
        let mut buf = [0u8; 8];
        buf[..bytes.len()].copy_from_slice(bytes);
        let a = u64::from_le_bytes(buf);
        self.contains(a).then_some(a)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut f = 2u64;
    while f.saturating_mul(f) <= n {
        if n % f == 0 {
            return false;
        }
        f += 1;
    }
    true
}

fn unpack(mut v: u64, base: u128, len: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(len);
    if base.is_power_of_two() {
        let shift = base.trailing_zeros();
        let mask = (base - 1) as u64;
        for _ in 0..len {
            out.push(v & mask);
            v = v.checked_shr(shift).unwrap_or(0);
        }
    } else {
        let mut v = v as u128;
        for _ in 0..len {
            out.push((v % base) as u64);
            v /= base;
        }
    }
    out
}

fn pack(digits: &[u64], base: u128) -> u64 {
    let mut v: u128 = 0;
    for &d in digits.iter().rev() {
        v = v * base + d as u128;
    }
    v as u64
}

struct Tables {
    exp: Vec<u64>,
    log: Vec<u32>,
}

struct FieldInner {
    p: u64,
    w: usize,
    modulus: Vec<u64>,
    order: u64,
    tables: Option<Tables>,
}

/// The symbol field GF(p^w), immutable and cheap to clone.
#[derive(Clone)]
pub struct FieldSpec(Arc<FieldInner>);

impl FieldSpec {
    /// Builds GF(p^w). When `modulus` is `None` the smallest monic
    /// irreducible polynomial of degree `w` is used, so equal `(p, w)` always
    /// give equal specs.
    pub fn new(p: u64, w: usize, modulus: Option<Vec<u64>>) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if w == 0 {
            return Err(FieldError::BadModulus("degree must be at least 1".into()));
        }
        let order = (p as u128)
            .checked_pow(w as u32)
            .filter(|&o| o < MAX_ORDER)
            .ok_or(FieldError::TooLarge(p as u128, w))?;
        let prime = Self::prime(p)?;
        let modulus = match modulus {
            Some(m) => {
                if m.len() != w + 1 {
                    return Err(FieldError::BadModulus(format!(
                        "expected {} coefficients, got {}",
                        w + 1,
                        m.len()
                    )));
                }
                if m[w] != 1 {
                    return Err(FieldError::BadModulus("modulus must be monic".into()));
                }
                if let Some(&c) = m.iter().find(|&&c| c >= p) {
                    return Err(FieldError::BadModulus(format!("coefficient {c} not below p")));
                }
                if !poly::is_irreducible(&prime, &m) {
                    return Err(FieldError::Reducible);
                }
                m
            }
            None if w == 1 => vec![0, 1],
            None => poly::first_irreducible(&prime, w).ok_or(FieldError::Reducible)?,
        };
        Ok(Self::from_parts(p, w, modulus, order as u64))
    }

    /// GF(p) with modulus x.
    pub fn prime(p: u64) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(Self::from_parts(p, 1, vec![0, 1], p))
    }

    fn from_parts(p: u64, w: usize, modulus: Vec<u64>, order: u64) -> Self {
        let mut inner = FieldInner {
            p,
            w,
            modulus,
            order,
            tables: None,
        };
        if order <= TABLE_LIMIT && order > 2 {
            inner.tables = Some(build_tables(&inner));
        }
        FieldSpec(Arc::new(inner))
    }

    pub fn characteristic(&self) -> u64 {
        self.0.p
    }

    pub fn degree(&self) -> usize {
        self.0.w
    }

    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    pub fn size(&self) -> u64 {
        self.0.order
    }

    /// Packs a coefficient vector (ascending degree) into an element.
    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<u64, FieldError> {
        if coeffs.len() > self.0.w || coeffs.iter().any(|&c| c >= self.0.p) {
            return Err(FieldError::BadModulus("coefficients out of range".into()));
        }
        Ok(pack(coeffs, self.0.p as u128))
    }

    pub fn coeffs(&self, a: u64) -> Vec<u64> {
        unpack(a, self.0.p as u128, self.0.w)
    }

    /// Multiplicative generator, smallest packed value first.
    pub fn generator(&self) -> u64 {
        if let Some(t) = &self.0.tables {
            return t.exp[1];
        }
        find_generator(&self.0)
    }

    /// Iterates all elements in packed order.
    pub fn elements(&self) -> impl Iterator<Item = u64> {
        0..self.0.order
    }

    pub fn element(&self, value: u64) -> Result<FieldElement, FieldError> {
        if !self.contains(value) {
            return Err(FieldError::NotAnElement(value));
        }
        Ok(FieldElement {
            spec: self.clone(),
            value,
        })
    }
}

fn slow_mul(f: &FieldInner, a: u64, b: u64) -> u64 {
    if f.p == 2 {
        let mut prod: u128 = 0;
        for i in 0..f.w {
            if (b >> i) & 1 == 1 {
                prod ^= (a as u128) << i;
            }
        }
        let m = pack(&f.modulus, 2) as u128;
        for i in (f.w..2 * f.w).rev() {
            if (prod >> i) & 1 == 1 {
                prod ^= m << (i - f.w);
            }
        }
        return prod as u64;
    }
    if f.w == 1 {
        return ((a as u128 * b as u128) % f.p as u128) as u64;
    }
    let p = f.p as u128;
    let x = unpack(a, p, f.w);
    let y = unpack(b, p, f.w);
    let mut prod = vec![0u128; 2 * f.w - 1];
    for (i, &xi) in x.iter().enumerate() {
        for (j, &yj) in y.iter().enumerate() {
            prod[i + j] = (prod[i + j] + xi as u128 * yj as u128) % p;
        }
    }
    for i in (f.w..prod.len()).rev() {
        let c = prod[i];
        if c == 0 {
            continue;
        }
        for j in 0..f.w {
            let sub = c * f.modulus[j] as u128 % p;
            prod[i - f.w + j] = (prod[i - f.w + j] + p - sub) % p;
        }
        prod[i] = 0;
    }
    let digits: Vec<u64> = prod[..f.w].iter().map(|&c| c as u64).collect();
    pack(&digits, p)
}

fn multiplicative_order_divisors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut m = n;
    let mut f = 2;
    while f * f <= m {
        if m % f == 0 {
            out.push(n / f);
            while m % f == 0 {
                m /= f;
            }
        }
        f += 1;
    }
    if m > 1 {
        out.push(n / m);
    }
    out
}

fn slow_pow(f: &FieldInner, a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    let mut b = a;
    while e > 0 {
        if e & 1 == 1 {
            r = slow_mul(f, r, b);
        }
        b = slow_mul(f, b, b);
        e >>= 1;
    }
    r
}

fn find_generator(f: &FieldInner) -> u64 {
    let n = f.order - 1;
    let checks = multiplicative_order_divisors(n);
    (1..f.order)
        .find(|&g| checks.iter().all(|&c| slow_pow(f, g, c) != 1))
        .expect("every finite field has a generator")
}

fn build_tables(f: &FieldInner) -> Tables {
    let g = find_generator(f);
    let n = (f.order - 1) as usize;
    let mut exp = vec![0u64; n];
    let mut log = vec![0u32; f.order as usize];
    let mut x = 1u64;
    for (i, e) in exp.iter_mut().enumerate() {
        *e = x;
        log[x as usize] = i as u32;
        x = slow_mul(f, x, g);
    }
    Tables { exp, log }
}

impl Field for FieldSpec {
    fn order(&self) -> u128 {
        self.0.order as u128
    }

    fn add(&self, a: u64, b: u64) -> u64 {
        let f = &self.0;
        if f.p == 2 {
            a ^ b
        } else if f.w == 1 {
            ((a as u128 + b as u128) % f.p as u128) as u64
        } else {
            let p = f.p as u128;
            let x = unpack(a, p, f.w);
            let y = unpack(b, p, f.w);
            let s: Vec<u64> = x.iter().zip(&y).map(|(&u, &v)| (u + v) % f.p).collect();
            pack(&s, p)
        }
    }

    fn neg(&self, a: u64) -> u64 {
        let f = &self.0;
        if f.p == 2 {
            a
        } else if f.w == 1 {
            (f.p - a) % f.p
        } else {
            let p = f.p as u128;
            let x: Vec<u64> = unpack(a, p, f.w).iter().map(|&u| (f.p - u) % f.p).collect();
            pack(&x, p)
        }
    }

    fn sub(&self, a: u64, b: u64) -> u64 {
        if self.0.p == 2 {
            a ^ b
        } else {
            self.add(a, self.neg(b))
        }
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        if a == 0 || b == 0 {
            return 0;
        }
        match &self.0.tables {
            Some(t) => {
                let n = t.exp.len();
                let idx = t.log[a as usize] as usize + t.log[b as usize] as usize;
                t.exp[if idx >= n { idx - n } else { idx }]
            }
            None => slow_mul(&self.0, a, b),
        }
    }

    fn inv(&self, a: u64) -> Option<u64> {
        if a == 0 {
            return None;
        }
        match &self.0.tables {
            Some(t) => {
                let n = t.exp.len();
                Some(t.exp[(n - t.log[a as usize] as usize) % n])
            }
            None => Some(slow_pow(&self.0, a, self.0.order - 2)),
        }
    }

    fn symbol_field(&self) -> &FieldSpec {
        self
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.modulus == other.0.modulus)
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}; {:?})", self.0.p, self.0.w, self.0.modulus)
    }
}

#[derive(Serialize, Deserialize)]
struct FieldSpecRepr {
    p: u64,
    w: usize,
    modulus: Vec<u64>,
}

impl Serialize for FieldSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FieldSpecRepr {
            p: self.0.p,
            w: self.0.w,
            modulus: self.0.modulus.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FieldSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = FieldSpecRepr::deserialize(d)?;
        FieldSpec::new(r.p, r.w, Some(r.modulus)).map_err(serde::de::Error::custom)
    }
}

/// An element of a [`FieldSpec`] carrying its owner, for checked arithmetic.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    spec: FieldSpec,
    value: u64,
}

impl FieldElement {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn coeffs(&self) -> Vec<u64> {
        self.spec.coeffs(self.value)
    }

    fn same(&self, other: &Self) -> Result<(), FieldError> {
        if self.spec == other.spec {
            Ok(())
        } else {
            Err(FieldError::FieldMismatch)
        }
    }

    fn with(&self, value: u64) -> Self {
        FieldElement {
            spec: self.spec.clone(),
            value,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, FieldError> {
        self.same(other)?;
        Ok(self.with(self.spec.add(self.value, other.value)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, FieldError> {
        self.same(other)?;
        Ok(self.with(self.spec.sub(self.value, other.value)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self, FieldError> {
        self.same(other)?;
        Ok(self.with(self.spec.mul(self.value, other.value)))
    }

    pub fn neg(&self) -> Self {
        self.with(self.spec.neg(self.value))
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        self.spec
            .inv(self.value)
            .map(|v| self.with(v))
            .ok_or(FieldError::DivideByZero)
    }

    pub fn pow(&self, e: u128) -> Self {
        self.with(self.spec.pow(self.value, e))
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.spec.characteristic() == 2 {
            write!(f, "{:#x}", self.value)
        } else {
            write!(f, "{:?}", self.coeffs())
        }
    }
}

struct ExtInner {
    base: FieldSpec,
    t: usize,
    modulus: Vec<u64>,
    order: u128,
}

/// L = F[y]/(h(y)) of degree t over the symbol field F.
#[derive(Clone)]
pub struct ExtensionSpec(Arc<ExtInner>);

impl ExtensionSpec {
    /// Degree-`t` extension using the smallest monic irreducible `h` over F.
    pub fn new(base: &FieldSpec, t: usize) -> Result<Self, FieldError> {
        Self::with_modulus(base, t, None)
    }

    pub fn with_modulus(
        base: &FieldSpec,
        t: usize,
        modulus: Option<Vec<u64>>,
    ) -> Result<Self, FieldError> {
        if t == 0 {
            return Err(FieldError::BadModulus("extension degree must be at least 1".into()));
        }
        let order = base
            .order()
            .checked_pow(t as u32)
            .filter(|&o| o <= MAX_ORDER)
            .ok_or(FieldError::TooLarge(base.order(), t))?;
        let modulus = match modulus {
            Some(m) => {
                if m.len() != t + 1 || m[t] != 1 {
                    return Err(FieldError::BadModulus(
                        "extension modulus must be monic of degree t".into(),
                    ));
                }
                if let Some(&c) = m.iter().find(|&&c| !base.contains(c)) {
                    return Err(FieldError::NotAnElement(c));
                }
                if !poly::is_irreducible(base, &m) {
                    return Err(FieldError::Reducible);
                }
                m
            }
            None if t == 1 => vec![0, 1],
            None => poly::first_irreducible(base, t).ok_or(FieldError::Reducible)?,
        };
        Ok(ExtensionSpec(Arc::new(ExtInner {
            base: base.clone(),
            t,
            modulus,
            order,
        })))
    }

    pub fn base(&self) -> &FieldSpec {
        &self.0.base
    }

    pub fn degree(&self) -> usize {
        self.0.t
    }

    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    /// F-coefficients of `a` in the basis 1, y, ..., y^(t-1).
    pub fn coeffs(&self, a: u64) -> Vec<u64> {
        unpack(a, self.0.base.order(), self.0.t)
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> u64 {
        debug_assert!(coeffs.len() <= self.0.t);
        pack(coeffs, self.0.base.order())
    }

    /// Maps an F-element to the constant polynomial; numerically the identity.
    pub fn embed(&self, a: u64) -> u64 {
        debug_assert!(self.0.base.contains(a));
        a
    }

    /// y^i, the default F-independent evaluation points.
    pub fn basis(&self, i: usize) -> u64 {
        let mut c = vec![0u64; self.0.t];
        c[i] = 1;
        self.from_coeffs(&c)
    }

    /// `a^(|F|^i)`.
    pub fn frobenius(&self, a: u64, i: usize) -> u64 {
        let q = self.0.base.order();
        let mut x = a;
        for _ in 0..(i % self.0.t) {
            x = self.pow(x, q);
        }
        x
    }
}

impl Field for ExtensionSpec {
    fn order(&self) -> u128 {
        self.0.order
    }

    fn add(&self, a: u64, b: u64) -> u64 {
        let base = &self.0.base;
        if base.characteristic() == 2 {
            return a ^ b;
        }
        let q = base.order();
        let x = unpack(a, q, self.0.t);
        let y = unpack(b, q, self.0.t);
        let s: Vec<u64> = x.iter().zip(&y).map(|(&u, &v)| base.add(u, v)).collect();
        pack(&s, q)
    }

    fn neg(&self, a: u64) -> u64 {
        let base = &self.0.base;
        if base.characteristic() == 2 {
            return a;
        }
        let q = base.order();
        let x: Vec<u64> = unpack(a, q, self.0.t).iter().map(|&u| base.neg(u)).collect();
        pack(&x, q)
    }

    fn sub(&self, a: u64, b: u64) -> u64 {
        if self.0.base.characteristic() == 2 {
            a ^ b
        } else {
            self.add(a, self.neg(b))
        }
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        if a == 0 || b == 0 {
            return 0;
        }
        let base = &self.0.base;
        let t = self.0.t;
        let q = base.order();
        if t == 1 {
            return base.mul(a, b);
        }
        let x = unpack(a, q, t);
        let y = unpack(b, q, t);
        let mut prod = vec![0u64; 2 * t - 1];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                prod[i + j] = base.add(prod[i + j], base.mul(xi, yj));
            }
        }
        let h = &self.0.modulus;
        for i in (t..prod.len()).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            for j in 0..t {
                prod[i - t + j] = base.sub(prod[i - t + j], base.mul(c, h[j]));
            }
        }
        pack(&prod[..t], q)
    }

    fn inv(&self, a: u64) -> Option<u64> {
        if a == 0 {
            None
        } else {
            Some(self.pow(a, self.0.order - 2))
        }
    }

    fn symbol_field(&self) -> &FieldSpec {
        &self.0.base
    }
}

impl PartialEq for ExtensionSpec {
    fn eq(&self, other: &Self) -> bool {
        self.0.base == other.0.base && self.0.modulus == other.0.modulus
    }
}

impl Eq for ExtensionSpec {}

impl fmt::Debug for ExtensionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}[y]/{:?}", self.0.base, self.0.modulus)
    }
}

#[derive(Serialize, Deserialize)]
struct ExtensionRepr {
    base: FieldSpec,
    t: usize,
    modulus: Vec<u64>,
}

impl Serialize for ExtensionSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ExtensionRepr {
            base: self.0.base.clone(),
            t: self.0.t,
            modulus: self.0.modulus.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExtensionSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = ExtensionRepr::deserialize(d)?;
        ExtensionSpec::with_modulus(&r.base, r.t, Some(r.modulus)).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf16() -> FieldSpec {
        FieldSpec::new(2, 4, Some(vec![1, 1, 0, 0, 1])).unwrap()
    }

    /// Exhaustive root/factor check: a quartic over GF(2) is irreducible iff it
    /// has no root and is not a product of two irreducible quadratics.
    fn quartic_irreducible_by_hand(m: [u64; 5]) -> bool {
        let eval = |x: u64| -> u64 { m.iter().rev().fold(0, |acc, &c| (acc * x + c) % 2) };
        if eval(0) == 0 || eval(1) == 0 {
            return false;
        }
        // x^2+x+1 is the only irreducible quadratic; its square is x^4+x^2+1.
        m != [1, 0, 1, 0, 1]
    }

    #[test]
    fn make_gf16_and_reject_reducible() {
        assert!(quartic_irreducible_by_hand([1, 1, 0, 0, 1]));
        assert!(!quartic_irreducible_by_hand([1, 0, 0, 0, 1]));
        let f = gf16();
        assert_eq!(f.size(), 16);
        assert_eq!(
            FieldSpec::new(2, 4, Some(vec![1, 0, 0, 0, 1])).unwrap_err(),
            FieldError::Reducible
        );
        assert_eq!(FieldSpec::new(4, 1, None).unwrap_err(), FieldError::NotPrime(4));
    }

    #[test]
    fn quartic_test_agrees_with_hand_check() {
        let gf2 = FieldSpec::prime(2).unwrap();
        for low in 0..16u64 {
            let m = [low & 1, (low >> 1) & 1, (low >> 2) & 1, (low >> 3) & 1, 1];
            assert_eq!(
                poly::is_irreducible(&gf2, &m),
                quartic_irreducible_by_hand(m),
                "{m:?}"
            );
        }
    }

    #[test]
    fn prime_field_default_modulus() {
        let f = FieldSpec::new(2, 1, None).unwrap();
        assert_eq!(f.modulus(), &[0, 1]);
        assert_eq!(f.size(), 2);
        assert_eq!(f.mul(1, 1), 1);
    }

    #[test]
    fn gf16_examples() {
        let f = gf16();
        assert_eq!(f.mul(0x2, 0x2), 0x4);
        assert_eq!(f.mul(0x3, 0x3), 0x5);
        for a in f.elements() {
            assert_eq!(f.add(a, 0), a);
        }
        assert_eq!(f.inv(0x1), Some(0x1));
        // exhaustive search for x * z = 1
        let z = (1..16).find(|&z| slow_mul(&f.0, 0x2, z) == 1).unwrap();
        assert_eq!(z, 0x9);
        assert_eq!(f.inv(0x2), Some(0x9));
        for a in 1..16 {
            assert_eq!(f.pow(a, 15), 1);
        }
        assert_eq!(f.inv(0), None);
        assert_eq!(f.pow(0x7, 0), 1);
    }

    #[test]
    fn element_wrapper_checks_owner() {
        let f = gf16();
        let g = FieldSpec::new(2, 3, None).unwrap();
        let a = f.element(3).unwrap();
        let b = g.element(3).unwrap();
        assert_eq!(a.mul(&b).unwrap_err(), FieldError::FieldMismatch);
        assert_eq!(f.element(0).unwrap().inv().unwrap_err(), FieldError::DivideByZero);
        assert_eq!(a.mul(&a).unwrap().value(), 5);
        assert_eq!(a.to_string(), "0x3");
        assert!(f.element(16).is_err());
    }

    fn check_axioms<K: Field>(k: &K) {
        let n = k.order() as u64;
        for a in 0..n {
            assert_eq!(k.add(a, k.neg(a)), 0);
            assert_eq!(k.mul(a, 1), a);
            if a != 0 {
                assert_eq!(k.mul(a, k.inv(a).unwrap()), 1);
            }
            for b in 0..n {
                assert_eq!(k.add(a, b), k.add(b, a));
                assert_eq!(k.mul(a, b), k.mul(b, a));
                assert_eq!(k.sub(k.add(a, b), b), a);
                for c in 0..n {
                    assert_eq!(k.mul(k.mul(a, b), c), k.mul(a, k.mul(b, c)));
                    assert_eq!(k.add(k.add(a, b), c), k.add(a, k.add(b, c)));
                    assert_eq!(k.mul(a, k.add(b, c)), k.add(k.mul(a, b), k.mul(a, c)));
                }
            }
        }
    }

    #[test]
    fn axioms_exhaustive_small_fields() {
        check_axioms(&FieldSpec::new(2, 1, None).unwrap());
        check_axioms(&FieldSpec::new(2, 2, None).unwrap());
        check_axioms(&gf16());
        check_axioms(&FieldSpec::new(3, 2, None).unwrap());
        check_axioms(&FieldSpec::new(5, 1, None).unwrap());
        check_axioms(&ExtensionSpec::new(&FieldSpec::new(2, 2, None).unwrap(), 2).unwrap());
    }

    #[test]
    fn table_and_slow_paths_agree() {
        let f = gf16();
        for a in 0..16 {
            for b in 0..16 {
                assert_eq!(f.mul(a, b), slow_mul(&f.0, a, b));
            }
        }
        let g = FieldSpec::new(3, 3, None).unwrap();
        for a in 0..27 {
            for b in 0..27 {
                assert_eq!(g.mul(a, b), slow_mul(&g.0, a, b));
            }
        }
    }

    #[test]
    fn deterministic_modulus_search() {
        let a = FieldSpec::new(2, 4, None).unwrap();
        let b = FieldSpec::new(2, 4, None).unwrap();
        assert_eq!(a.modulus(), &[1, 1, 0, 0, 1]);
        assert_eq!(a, b);
        let c = FieldSpec::new(3, 2, None).unwrap();
        assert_eq!(c, FieldSpec::new(3, 2, None).unwrap());
    }

    #[test]
    fn json_round_trip() {
        let f = gf16();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"p":2,"w":4,"modulus":[1,1,0,0,1]}"#);
        let g: FieldSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(f, g);
        assert!(serde_json::from_str::<FieldSpec>(r#"{"p":2,"w":4,"modulus":[1,0,0,0,1]}"#).is_err());
    }

    #[test]
    fn frobenius_properties() {
        let f = gf16();
        let l = ExtensionSpec::new(&f, 6).unwrap();
        assert_eq!(l.order(), 1 << 24);
        let samples = [0u64, 1, 0x12345, 0xabcdef, 0x800001, 0x3c0ff0];
        for &a in &samples {
            assert_eq!(l.frobenius(a, 0), a);
            assert_eq!(l.frobenius(l.frobenius(a, 1), 5), a);
            for &b in &samples {
                assert_eq!(l.frobenius(l.add(a, b), 1), l.add(l.frobenius(a, 1), l.frobenius(b, 1)));
                assert_eq!(l.frobenius(l.mul(a, b), 1), l.mul(l.frobenius(a, 1), l.frobenius(b, 1)));
            }
        }
        for c in f.elements() {
            for i in 0..6 {
                assert_eq!(l.frobenius(l.embed(c), i), l.embed(c));
            }
        }
        // embedded arithmetic agrees with F
        for a in f.elements() {
            for b in f.elements() {
                assert_eq!(l.mul(a, b), f.mul(a, b));
            }
        }
        let x = 0x123456;
        assert_eq!(l.mul(x, l.inv(x).unwrap()), 1);
    }

    #[test]
    fn extension_json_round_trip() {
        let l = ExtensionSpec::new(&gf16(), 3).unwrap();
        let s = serde_json::to_string(&l).unwrap();
        let back: ExtensionSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(l, back);
    }

    #[test]
    fn byte_widths() {
        assert_eq!(gf16().byte_width(), 1);
        assert_eq!(FieldSpec::new(2, 9, None).unwrap().byte_width(), 2);
        assert_eq!(FieldSpec::new(3, 1, None).unwrap().byte_width(), 1);
        assert_eq!(ExtensionSpec::new(&gf16(), 6).unwrap().byte_width(), 3);
        assert_eq!(gf16().payload_bits(), 4);
        assert_eq!(FieldSpec::new(3, 2, None).unwrap().payload_bits(), 3);
    }

    #[test]
    fn byte_encoding_round_trips() {
        let l = ExtensionSpec::new(&gf16(), 6).unwrap();
        let mut out = Vec::new();
        l.encode_le(0xabcdef, &mut out);
        assert_eq!(out, vec![0xef, 0xcd, 0xab]);
        assert_eq!(l.decode_le(&out), Some(0xabcdef));
        assert_eq!(l.decode_le(&out[..2]), None);
        let f9 = FieldSpec::new(3, 2, None).unwrap();
        assert_eq!(f9.decode_le(&[8]), Some(8));
        assert_eq!(f9.decode_le(&[9]), None);
    }
}
