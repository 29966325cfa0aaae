//! Exact positive-integer indices of subgroup pairs, kept in factored form.

use crate::error::{Error, Result};
use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

/// An exact index `[U : U ∩ W]`. The factored form and the plain value are
/// kept together; `debug_assert_consistent` guards their agreement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndexValue {
    /// prime -> exponent, only nonzero exponents stored
    pub factors: BTreeMap<u64, u64>,
    /// plain value as a decimal string in serialized form
    #[serde(serialize_with = "serialize_biguint")]
    pub value: BigUint,
}

fn serialize_biguint<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl IndexValue {
    pub fn one() -> Self {
        IndexValue {
            factors: BTreeMap::new(),
            value: BigUint::one(),
        }
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    /// `p^e` for a prime `p`.
    pub fn prime_power(p: u64, e: u64) -> Self {
        let mut factors = BTreeMap::new();
        if e > 0 {
            factors.insert(p, e);
        }
        IndexValue {
            factors,
            value: BigUint::from(p).pow(e as u32),
        }
    }

    /// Factor a small positive integer by trial division. Tree-model indices
    /// contain cofactors like q+1, which need not be prime.
    pub fn from_u64(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InfiniteIndex("zero index".into()));
        }
        let mut factors = BTreeMap::new();
        let mut m = n;
        let mut d = 2u64;
        while d * d <= m {
            while m % d == 0 {
                *factors.entry(d).or_insert(0) += 1;
                m /= d;
            }
            d += 1;
        }
        if m > 1 {
            *factors.entry(m).or_insert(0) += 1;
        }
        Ok(IndexValue {
            factors,
            value: BigUint::from(n),
        })
    }

    pub fn mul(&self, other: &IndexValue) -> IndexValue {
        let mut factors = self.factors.clone();
        for (p, e) in &other.factors {
            *factors.entry(*p).or_insert(0) += e;
        }
        IndexValue {
            factors,
            value: &self.value * &other.value,
        }
    }

    pub fn pow(&self, k: u64) -> IndexValue {
        let factors = self
            .factors
            .iter()
            .map(|(p, e)| (*p, e * k))
            .collect::<BTreeMap<_, _>>();
        IndexValue {
            factors,
            value: self.value.pow(k as u32),
        }
    }

    pub fn divides(&self, other: &IndexValue) -> bool {
        self.factors
            .iter()
            .all(|(p, e)| other.factors.get(p).copied().unwrap_or(0) >= *e)
    }

    /// Exact quotient, defined only when `other` divides `self`.
    pub fn div_exact(&self, other: &IndexValue) -> Result<IndexValue> {
        if !other.divides(self) {
            return Err(Error::ModelMismatch(format!(
                "{} does not divide {}",
                other, self
            )));
        }
        let mut factors = self.factors.clone();
        for (p, e) in &other.factors {
            let slot = factors.get_mut(p).expect("divisor checked");
            *slot -= e;
            if *slot == 0 {
                factors.remove(p);
            }
        }
        let value = &self.value / &other.value;
        Ok(IndexValue { factors, value })
    }

    pub fn consistent(&self) -> bool {
        let mut v = BigUint::one();
        for (p, e) in &self.factors {
            v *= BigUint::from(*p).pow(*e as u32);
        }
        v == self.value
    }

    pub fn gcd(&self, other: &IndexValue) -> IndexValue {
        let mut out = IndexValue::one();
        for (p, e) in &self.factors {
            let shared = (*e).min(other.factors.get(p).copied().unwrap_or(0));
            if shared > 0 {
                out = out.mul(&IndexValue::prime_power(*p, shared));
            }
        }
        out
    }
}

impl PartialOrd for IndexValue {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for IndexValue {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.value.cmp(&other.value)
    }
}

impl fmt::Display for IndexValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// The two one-sided indices of a pair of commensurable subgroups, plus their
/// product. The product is the quantity whose logarithm is the metric; it is
/// stored log-free so comparisons stay exact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Displacement {
    pub left: IndexValue,
    pub right: IndexValue,
    pub product: IndexValue,
}

impl Displacement {
    pub fn new(left: IndexValue, right: IndexValue) -> Self {
        let product = left.mul(&right);
        Displacement {
            left,
            right,
            product,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.product.is_one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factored_and_plain_forms_agree() {
        let a = IndexValue::from_u64(12).unwrap();
        assert_eq!(a.factors.get(&2), Some(&2));
        assert_eq!(a.factors.get(&3), Some(&1));
        assert!(a.consistent());
        let b = IndexValue::prime_power(3, 4);
        assert_eq!(b.value, BigUint::from(81u32));
        assert!(b.consistent());
        let c = a.mul(&b);
        assert_eq!(c.value, BigUint::from(12u32 * 81));
        assert!(c.consistent());
    }

    #[test]
    fn divisibility_and_quotient() {
        let a = IndexValue::from_u64(12).unwrap();
        let b = IndexValue::from_u64(6).unwrap();
        assert!(b.divides(&a));
        assert!(!a.divides(&b));
        let q = a.div_exact(&b).unwrap();
        assert_eq!(q.value, BigUint::from(2u32));
    }

    #[test]
    fn displacement_product() {
        let d = Displacement::new(IndexValue::from_u64(4).unwrap(), IndexValue::from_u64(3).unwrap());
        assert_eq!(d.product.value, BigUint::from(12u32));
        assert!(!d.is_zero());
        let z = Displacement::new(IndexValue::one(), IndexValue::one());
        assert!(z.is_zero());
    }

    #[test]
    fn zero_index_rejected() {
        assert!(IndexValue::from_u64(0).is_err());
    }
}
