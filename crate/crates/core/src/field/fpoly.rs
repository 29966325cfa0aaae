//! Dense univariate polynomials with coefficients in a local field, ascending
//! order, zero represented by the empty vector. These back the slope-splitting
//! machinery, which needs exact quotient/remainder and Bezout cofactors over
//! the coefficient field.

use super::{FieldElem, LocalFieldSpec};
use crate::error::{Error, Result};

pub fn trim(p: &mut Vec<FieldElem>) {
    while p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
}

pub fn deg(p: &[FieldElem]) -> Option<usize> {
    if p.is_empty() {
        None
    } else {
        Some(p.len() - 1)
    }
}

pub fn add(k: &LocalFieldSpec, a: &[FieldElem], b: &[FieldElem]) -> Vec<FieldElem> {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).cloned().unwrap_or_else(|| k.zero());
        let y = b.get(i).cloned().unwrap_or_else(|| k.zero());
        out.push(k.add(&x, &y));
    }
    trim(&mut out);
    out
}

pub fn sub(k: &LocalFieldSpec, a: &[FieldElem], b: &[FieldElem]) -> Vec<FieldElem> {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).cloned().unwrap_or_else(|| k.zero());
        let y = b.get(i).cloned().unwrap_or_else(|| k.zero());
        out.push(k.sub(&x, &y));
    }
    trim(&mut out);
    out
}

pub fn mul(k: &LocalFieldSpec, a: &[FieldElem], b: &[FieldElem]) -> Vec<FieldElem> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![k.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = k.add(&out[i + j], &k.mul(x, y));
        }
    }
    trim(&mut out);
    out
}

/// Long division; the divisor must be nonzero.
pub fn divrem(
    k: &LocalFieldSpec,
    a: &[FieldElem],
    b: &[FieldElem],
) -> Result<(Vec<FieldElem>, Vec<FieldElem>)> {
    let mut b = b.to_vec();
    trim(&mut b);
    if b.is_empty() {
        return Err(Error::DivisionByZero);
    }
    let lead_inv = k.inv(b.last().unwrap())?;
    let mut rem = a.to_vec();
    trim(&mut rem);
    let mut quot = vec![k.zero(); rem.len().saturating_sub(b.len() - 1)];
    while rem.len() >= b.len() {
        let shift = rem.len() - b.len();
        let c = k.mul(rem.last().unwrap(), &lead_inv);
        for (j, y) in b.iter().enumerate() {
            let t = k.mul(&c, y);
            rem[shift + j] = k.sub(&rem[shift + j], &t);
        }
        quot[shift] = c;
        // the top coefficient cancels exactly
        rem.pop();
        trim(&mut rem);
    }
    trim(&mut quot);
    Ok((quot, rem))
}

/// Divide every coefficient by the leading one.
pub fn monic(k: &LocalFieldSpec, a: &[FieldElem]) -> Result<Vec<FieldElem>> {
    let mut a = a.to_vec();
    trim(&mut a);
    let lead = a.last().ok_or(Error::DivisionByZero)?;
    let li = k.inv(lead)?;
    Ok(a.iter().map(|c| k.mul(c, &li)).collect())
}

/// Monic gcd g with Bezout cofactors: u*a + v*b = g.
pub fn ext_gcd(
    k: &LocalFieldSpec,
    a: &[FieldElem],
    b: &[FieldElem],
) -> Result<(Vec<FieldElem>, Vec<FieldElem>, Vec<FieldElem>)> {
    let mut r0 = a.to_vec();
    trim(&mut r0);
    let mut r1 = b.to_vec();
    trim(&mut r1);
    let mut u0 = vec![k.one()];
    let mut u1: Vec<FieldElem> = vec![];
    let mut v0: Vec<FieldElem> = vec![];
    let mut v1 = vec![k.one()];
    while !r1.is_empty() {
        let (q, r) = divrem(k, &r0, &r1)?;
        let nu = sub(k, &u0, &mul(k, &q, &u1));
        let nv = sub(k, &v0, &mul(k, &q, &v1));
        r0 = std::mem::replace(&mut r1, r);
        u0 = std::mem::replace(&mut u1, nu);
        v0 = std::mem::replace(&mut v1, nv);
    }
    if r0.is_empty() {
        return Ok((vec![], u0, v0));
    }
    let li = k.inv(r0.last().unwrap())?;
    let g = r0.iter().map(|c| k.mul(c, &li)).collect();
    let u = u0.iter().map(|c| k.mul(c, &li)).collect();
    let v = v0.iter().map(|c| k.mul(c, &li)).collect();
    Ok((g, u, v))
}
