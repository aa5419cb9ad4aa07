//! Dense univariate polynomials over a [`Field`], coefficients ascending.
//!
//! Only what the field constructors need: remainder, gcd, modular powering
//! and a deterministic irreducibility test.

use crate::field::Field;

pub(crate) fn trim(p: &mut Vec<u64>) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

pub(crate) fn degree(p: &[u64]) -> Option<usize> {
    p.iter().rposition(|&c| c != 0)
}

pub(crate) fn sub<K: Field>(k: &K, a: &[u64], b: &[u64]) -> Vec<u64> {
    let len = a.len().max(b.len());
    let mut out: Vec<u64> = (0..len)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            k.sub(x, y)
        })
        .collect();
    trim(&mut out);
    out
}

pub(crate) fn mul<K: Field>(k: &K, a: &[u64], b: &[u64]) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = k.add(out[i + j], k.mul(x, y));
        }
    }
    trim(&mut out);
    out
}

/// Remainder of `a` modulo a nonzero `m`.
pub(crate) fn rem<K: Field>(k: &K, a: &[u64], m: &[u64]) -> Vec<u64> {
    let dm = degree(m).expect("division by zero polynomial");
    let lead_inv = k.inv(m[dm]).expect("nonzero leading coefficient");
    let mut r = a.to_vec();
    trim(&mut r);
    while let Some(dr) = degree(&r) {
        if dr < dm {
            break;
        }
        let c = k.mul(r[dr], lead_inv);
        let shift = dr - dm;
        for (j, &mj) in m[..=dm].iter().enumerate() {
            r[shift + j] = k.sub(r[shift + j], k.mul(c, mj));
        }
        trim(&mut r);
    }
    r
}

pub(crate) fn gcd<K: Field>(k: &K, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = rem(k, &a, &b);
        a = b;
        b = r;
    }
    if let Some(d) = degree(&a) {
        let inv = k.inv(a[d]).expect("nonzero");
        for c in a.iter_mut() {
            *c = k.mul(*c, inv);
        }
    }
    a
}

/// `base^e mod m` by square-and-multiply.
pub(crate) fn pow_mod<K: Field>(k: &K, base: &[u64], mut e: u128, m: &[u64]) -> Vec<u64> {
    let mut result = rem(k, &[1], m);
    let mut b = rem(k, base, m);
    while e > 0 {
        if e & 1 == 1 {
            result = rem(k, &mul(k, &result, &b), m);
        }
        b = rem(k, &mul(k, &b, &b), m);
        e >>= 1;
    }
    result
}

/// A monic `h` of degree t is irreducible over GF(q) iff it shares no factor
/// with y^(q^i) - y for 1 <= i <= t/2. Reducible candidates usually fail at
/// small i, so the loop exits early.
pub(crate) fn is_irreducible<K: Field>(k: &K, h: &[u64]) -> bool {
    let t = match degree(h) {
        Some(0) | None => return false,
        Some(t) => t,
    };
    let q = k.order();
    let y = vec![0, 1];
    let mut frob = rem(k, &y, h);
    for _ in 1..=t / 2 {
        frob = pow_mod(k, &frob, q, h);
        let g = gcd(k, &sub(k, &frob, &y), h);
        if degree(&g) != Some(0) {
            return false;
        }
    }
    true
}

/// Smallest monic irreducible polynomial of degree `t` over `k`, where the
/// lower coefficients are compared as a base-|K| number with the highest
/// degree coefficient most significant.
pub(crate) fn first_irreducible<K: Field>(k: &K, t: usize) -> Option<Vec<u64>> {
    let q = k.order();
    let total = q.checked_pow(t as u32)?;
    let mut lower = vec![0u64; t];
    for _ in 0..total {
        let mut h = lower.clone();
        h.push(1);
        if is_irreducible(k, &h) {
            return Some(h);
        }
        // increment little-endian base-q counter
        for c in lower.iter_mut() {
            if (*c as u128) + 1 < q {
                *c += 1;
                break;
            }
            *c = 0;
        }
    }
    None
}
