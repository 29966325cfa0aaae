//! Exact arithmetic in the two supported local fields: Q_p with p-adic
//! valuation, and F_q((t)) with t-adic valuation. Elements stay exact global
//! rationals (or rational functions); the precision parameter acts as a
//! certified watermark on the valuations a computation may visit, not as a
//! digit truncation.

pub mod fpoly;
pub mod newton;
pub mod poly;
pub mod split;

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use poly::Poly;
use serde::{Deserialize, Serialize};
use std::fmt;

pub const MIN_PRECISION: i64 = 8;
pub const DEFAULT_PRECISION: i64 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldKind {
    /// Q_p for a prime p
    Padic { p: u64 },
    /// F_q((t)) for a prime q
    Laurent { q: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalFieldSpec {
    pub kind: FieldKind,
    pub precision: i64,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl LocalFieldSpec {
    pub fn padic(p: u64, precision: i64) -> Result<Self> {
        let spec = LocalFieldSpec {
            kind: FieldKind::Padic { p },
            precision,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn laurent(q: u64, precision: i64) -> Result<Self> {
        let spec = LocalFieldSpec {
            kind: FieldKind::Laurent { q },
            precision,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let base = match self.kind {
            FieldKind::Padic { p } => p,
            FieldKind::Laurent { q } => q,
        };
        if !is_prime(base) {
            return Err(Error::ConfigInvalid(format!(
                "residue characteristic {base} must be prime"
            )));
        }
        if self.precision < MIN_PRECISION {
            return Err(Error::ConfigInvalid(format!(
                "precision {} below minimum {}",
                self.precision, MIN_PRECISION
            )));
        }
        Ok(())
    }

    /// Residue field size; this is also the branching parameter q of the
    /// associated (q+1)-regular tree.
    pub fn residue_size(&self) -> u64 {
        match self.kind {
            FieldKind::Padic { p } => p,
            FieldKind::Laurent { q } => q,
        }
    }

    pub fn zero(&self) -> FieldElem {
        match self.kind {
            FieldKind::Padic { .. } => FieldElem::Rat(BigRational::zero()),
            FieldKind::Laurent { q } => FieldElem::Fun(RatFun::from_poly(Poly::zero(q))),
        }
    }

    pub fn one(&self) -> FieldElem {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> FieldElem {
        match self.kind {
            FieldKind::Padic { .. } => FieldElem::Rat(BigRational::from(BigInt::from(n))),
            FieldKind::Laurent { q } => FieldElem::Fun(RatFun::from_poly(Poly::constant(q, n))),
        }
    }

    /// The uniformizer: p, respectively t.
    pub fn uniformizer(&self) -> FieldElem {
        match self.kind {
            FieldKind::Padic { p } => FieldElem::Rat(BigRational::from(BigInt::from(p))),
            FieldKind::Laurent { q } => FieldElem::Fun(RatFun::from_poly(Poly::t_pow(q, 1))),
        }
    }

    /// uniformizer^k for any integer k
    pub fn uniformizer_pow(&self, k: i64) -> FieldElem {
        match self.kind {
            FieldKind::Padic { p } => {
                let pk = BigInt::from(p).pow(k.unsigned_abs() as u32);
                if k >= 0 {
                    FieldElem::Rat(BigRational::from(pk))
                } else {
                    FieldElem::Rat(BigRational::new(BigInt::one(), pk))
                }
            }
            FieldKind::Laurent { q } => {
                let tk = Poly::t_pow(q, k.unsigned_abs() as usize);
                if k >= 0 {
                    FieldElem::Fun(RatFun::from_poly(tk))
                } else {
                    FieldElem::Fun(RatFun::new(Poly::constant(q, 1), tk))
                }
            }
        }
    }

    fn check_kind(&self, e: &FieldElem) -> Result<()> {
        match (self.kind, e) {
            (FieldKind::Padic { .. }, FieldElem::Rat(_)) => Ok(()),
            (FieldKind::Laurent { q }, FieldElem::Fun(f)) if f.num.q == q => Ok(()),
            _ => Err(Error::ModelMismatch(
                "field element does not belong to this field".into(),
            )),
        }
    }

    /// Valuation; `None` encodes +infinity (the zero element).
    pub fn valuation(&self, e: &FieldElem) -> Option<i64> {
        match (self.kind, e) {
            (FieldKind::Padic { p }, FieldElem::Rat(r)) => {
                if r.is_zero() {
                    return None;
                }
                let p = BigInt::from(p);
                let mut v = 0i64;
                let mut num = r.numer().abs();
                while (&num % &p).is_zero() {
                    num /= &p;
                    v += 1;
                }
                let mut den = r.denom().abs();
                while (&den % &p).is_zero() {
                    den /= &p;
                    v -= 1;
                }
                Some(v)
            }
            (FieldKind::Laurent { .. }, FieldElem::Fun(f)) => {
                if f.num.is_zero() {
                    return None;
                }
                let vn = f.num.t_valuation().unwrap() as i64;
                let vd = f.den.t_valuation().unwrap() as i64;
                Some(vn - vd)
            }
            _ => None,
        }
    }

    pub fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        match (a, b) {
            (FieldElem::Rat(x), FieldElem::Rat(y)) => FieldElem::Rat(x + y),
            (FieldElem::Fun(x), FieldElem::Fun(y)) => FieldElem::Fun(x.add(y)),
            _ => panic!("mixed field elements"),
        }
    }

    pub fn sub(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        match (a, b) {
            (FieldElem::Rat(x), FieldElem::Rat(y)) => FieldElem::Rat(x - y),
            (FieldElem::Fun(x), FieldElem::Fun(y)) => FieldElem::Fun(x.sub(y)),
            _ => panic!("mixed field elements"),
        }
    }

    pub fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        match (a, b) {
            (FieldElem::Rat(x), FieldElem::Rat(y)) => FieldElem::Rat(x * y),
            (FieldElem::Fun(x), FieldElem::Fun(y)) => FieldElem::Fun(x.mul(y)),
            _ => panic!("mixed field elements"),
        }
    }

    pub fn neg(&self, a: &FieldElem) -> FieldElem {
        match a {
            FieldElem::Rat(x) => FieldElem::Rat(-x),
            FieldElem::Fun(x) => FieldElem::Fun(x.neg()),
        }
    }

    pub fn inv(&self, a: &FieldElem) -> Result<FieldElem> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match a {
            FieldElem::Rat(x) => FieldElem::Rat(x.recip()),
            FieldElem::Fun(x) => FieldElem::Fun(x.inv()),
        })
    }

    pub fn div(&self, a: &FieldElem, b: &FieldElem) -> Result<FieldElem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// Canonical representative of an integral element modulo uniformizer^k:
    /// an integer in [0, p^k) for Q_p, a polynomial of degree < k for F_q((t)).
    /// Errors if the element is not integral.
    pub fn reduce_mod(&self, a: &FieldElem, k: i64) -> Result<FieldElem> {
        self.check_kind(a)?;
        if a.is_zero() {
            return Ok(self.zero());
        }
        let v = self.valuation(a).unwrap();
        if v < 0 {
            return Err(Error::ModelMismatch(
                "reduce_mod on a non-integral element".into(),
            ));
        }
        if k <= 0 {
            return Ok(self.zero());
        }
        match (self.kind, a) {
            (FieldKind::Padic { p }, FieldElem::Rat(r)) => {
                let modulus = BigInt::from(p).pow(k as u32);
                let num = r.numer().mod_floor(&modulus);
                let den = r.denom().mod_floor(&modulus);
                let den_inv = modinv(&den, &modulus)?;
                let c = (num * den_inv).mod_floor(&modulus);
                Ok(FieldElem::Rat(BigRational::from(c)))
            }
            (FieldKind::Laurent { .. }, FieldElem::Fun(f)) => {
                let k = k as usize;
                let den_inv = f
                    .den
                    .series_inverse(k)
                    .mul(&f.num)
                    .truncate(k);
                Ok(FieldElem::Fun(RatFun::from_poly(den_inv)))
            }
            _ => unreachable!(),
        }
    }

    /// Canonical representative of the class `a + uniformizer^k O`, valid at
    /// any valuation of `a`: digits live only in positions v(a)..k, so the
    /// representative is an integer divided by a p-power for Q_p and a
    /// Laurent polynomial for F_q((t)). Zero when v(a) >= k.
    pub fn residue_rep(&self, a: &FieldElem, k: i64) -> Result<FieldElem> {
        self.check_kind(a)?;
        let Some(v) = self.valuation(a) else {
            return Ok(self.zero());
        };
        if v >= k {
            return Ok(self.zero());
        }
        if v >= 0 {
            return self.reduce_mod(a, k);
        }
        let shifted = self.mul(a, &self.uniformizer_pow(-v));
        let red = self.reduce_mod(&shifted, k - v)?;
        Ok(self.mul(&red, &self.uniformizer_pow(v)))
    }

    /// Leading residue digit/coefficient of the unit part, for reporting.
    pub fn unit_leading(&self, a: &FieldElem) -> Result<u64> {
        let v = self
            .valuation(a)
            .ok_or(Error::DivisionByZero)?;
        let shifted = self.mul(a, &self.uniformizer_pow(-v));
        let red = self.reduce_mod(&shifted, 1)?;
        Ok(match red {
            FieldElem::Rat(r) => {
                let n: BigInt = r.numer().clone();
                n.try_into().unwrap_or(0)
            }
            FieldElem::Fun(f) => f.num.coeffs.first().copied().unwrap_or(0),
        })
    }

    pub fn parse(&self, s: &str) -> Result<FieldElem> {
        let s = s.trim();
        match self.kind {
            FieldKind::Padic { .. } => parse_rational(s),
            FieldKind::Laurent { q } => parse_ratfun(s, q),
        }
    }

    pub fn render(&self, a: &FieldElem) -> String {
        match a {
            FieldElem::Rat(r) => {
                if r.denom().is_one() {
                    format!("{}", r.numer())
                } else {
                    format!("{}/{}", r.numer(), r.denom())
                }
            }
            FieldElem::Fun(f) => {
                if f.den == Poly::constant(f.den.q, 1) {
                    format!("{}", f.num)
                } else {
                    format!("({})/({})", f.num, f.den)
                }
            }
        }
    }
}

fn modinv(a: &BigInt, modulus: &BigInt) -> Result<BigInt> {
    let g = a.extended_gcd(modulus);
    if !g.gcd.is_one() {
        return Err(Error::DivisionByZero);
    }
    Ok(g.x.mod_floor(modulus))
}

/// A reduced fraction of polynomials over GF(q); denominator monic, gcd 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatFun {
    pub num: Poly,
    pub den: Poly,
}

impl RatFun {
    pub fn from_poly(num: Poly) -> Self {
        let q = num.q;
        RatFun {
            num,
            den: Poly::constant(q, 1),
        }
    }

    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let mut r = RatFun { num, den };
        r.reduce();
        r
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den = Poly::constant(self.den.q, 1);
            return;
        }
        let g = self.num.gcd(&self.den);
        if g.degree().unwrap_or(0) > 0 || g.leading() != 1 {
            self.num = self.num.divrem(&g).0;
            self.den = self.den.divrem(&g).0;
        }
        // make the denominator monic
        let lead = self.den.leading();
        if lead != 1 {
            let inv_poly = Poly::constant(self.den.q, 1).scale({
                // inverse of lead in GF(q)
                let mut result = 1u64;
                let mut base = lead;
                let mut e = self.den.q - 2;
                while e > 0 {
                    if e & 1 == 1 {
                        result = result * base % self.den.q;
                    }
                    base = base * base % self.den.q;
                    e >>= 1;
                }
                result
            });
            self.num = self.num.mul(&inv_poly);
            self.den = self.den.mul(&inv_poly);
        }
    }

    pub fn add(&self, other: &RatFun) -> RatFun {
        RatFun::new(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn sub(&self, other: &RatFun) -> RatFun {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> RatFun {
        RatFun {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &RatFun) -> RatFun {
        RatFun::new(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn inv(&self) -> RatFun {
        assert!(!self.num.is_zero(), "inverse of zero");
        RatFun::new(self.den.clone(), self.num.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

/// An exact element of the ambient local field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldElem {
    Rat(BigRational),
    Fun(RatFun),
}

impl FieldElem {
    pub fn is_zero(&self) -> bool {
        match self {
            FieldElem::Rat(r) => r.is_zero(),
            FieldElem::Fun(f) => f.is_zero(),
        }
    }

    /// Every element we construct comes from a global rational and stays
    /// exact; recorded for the report schema.
    pub fn is_exact(&self) -> bool {
        true
    }

    pub fn rat(n: i64, d: i64) -> FieldElem {
        FieldElem::Rat(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElem::Rat(r) => write!(f, "{r}"),
            FieldElem::Fun(x) => write!(f, "({})/({})", x.num, x.den),
        }
    }
}

fn parse_rational(s: &str) -> Result<FieldElem> {
    let bad = || Error::ConfigInvalid(format!("cannot parse rational entry '{s}'"));
    let (num_s, den_s) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num_s.parse().map_err(|_| bad())?;
    let den: BigInt = den_s.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(FieldElem::Rat(BigRational::new(num, den)))
}

/// Parses "f(t)" or "f(t)/g(t)" where each side is a sum of terms
/// `c`, `t`, `c*t^k`, `t^k` with optional leading minus signs.
fn parse_ratfun(s: &str, q: u64) -> Result<FieldElem> {
    let (num_s, den_s) = split_top_level_slash(s);
    let num = parse_poly(num_s.trim().trim_matches(|c| c == '(' || c == ')'), q)?;
    let den = match den_s {
        Some(d) => parse_poly(d.trim().trim_matches(|c| c == '(' || c == ')'), q)?,
        None => Poly::constant(q, 1),
    };
    if den.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(FieldElem::Fun(RatFun::new(num, den)))
}

fn split_top_level_slash(s: &str) -> (&str, Option<&str>) {
    let mut depth = 0i32;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            '/' if depth == 0 => return (&s[..i], Some(&s[i + 1..])),
            _ => {}
        }
    }
    (s, None)
}

fn parse_poly(s: &str, q: u64) -> Result<Poly> {
    let bad = |detail: &str| Error::ConfigInvalid(format!("cannot parse polynomial '{s}': {detail}"));
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(bad("empty"));
    }
    let mut acc = Poly::zero(q);
    let mut term = String::new();
    let mut terms: Vec<String> = vec![];
    for (i, c) in s.char_indices() {
        if (c == '+' || c == '-') && i > 0 && !s[..i].ends_with('^') {
            terms.push(term.clone());
            term.clear();
            if c == '-' {
                term.push('-');
            }
        } else if i == 0 && c == '-' {
            term.push('-');
        } else if c != '+' {
            term.push(c);
        }
    }
    terms.push(term);
    for t in terms {
        if t.is_empty() || t == "-" {
            return Err(bad("dangling sign"));
        }
        let (neg, body) = match t.strip_prefix('-') {
            Some(b) => (true, b),
            None => (false, t.as_str()),
        };
        let (coef_s, pow) = if let Some(idx) = body.find('t') {
            let coef_part = body[..idx].trim_end_matches('*');
            let pow_part = &body[idx + 1..];
            let pow: i64 = if pow_part.is_empty() {
                1
            } else {
                pow_part
                    .strip_prefix('^')
                    .ok_or_else(|| bad("expected ^ after t"))?
                    .parse()
                    .map_err(|_| bad("bad exponent"))?
            };
            (coef_part, pow)
        } else {
            (body, 0)
        };
        if pow < 0 {
            return Err(bad("negative exponents belong in the denominator"));
        }
        let coef: i64 = if coef_s.is_empty() {
            1
        } else {
            coef_s.parse().map_err(|_| bad("bad coefficient"))?
        };
        let signed = if neg { -coef } else { coef };
        let mono = Poly::from_coeffs(q, {
            let mut v = vec![0i64; pow as usize + 1];
            v[pow as usize] = signed;
            v
        });
        acc = acc.add(&mono);
    }
    Ok(acc)
}
