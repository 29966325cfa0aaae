//! Dense polynomials over a prime field GF(q), used as the coefficient
//! arithmetic for F_q((t)) elements.

use std::fmt;

/// Coefficients ascending in degree, last entry nonzero (empty = zero).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    pub q: u64,
    pub coeffs: Vec<u64>,
}

impl Poly {
    pub fn zero(q: u64) -> Self {
        Poly { q, coeffs: vec![] }
    }

    pub fn constant(q: u64, c: i64) -> Self {
        let c = c.rem_euclid(q as i64) as u64;
        let mut p = Poly { q, coeffs: vec![c] };
        p.normalize();
        p
    }

    pub fn from_coeffs(q: u64, coeffs: Vec<i64>) -> Self {
        let coeffs = coeffs
            .into_iter()
            .map(|c| c.rem_euclid(q as i64) as u64)
            .collect();
        let mut p = Poly { q, coeffs };
        p.normalize();
        p
    }

    /// t^k
    pub fn t_pow(q: u64, k: usize) -> Self {
        let mut coeffs = vec![0; k + 1];
        coeffs[k] = 1;
        Poly { q, coeffs }
    }

    fn normalize(&mut self) {
        while let Some(&c) = self.coeffs.last() {
            if c == 0 {
                self.coeffs.pop();
            } else {
                break;
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.is_zero() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    /// Order of vanishing at t = 0.
    pub fn t_valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|&c| c != 0)
    }

    pub fn leading(&self) -> u64 {
        *self.coeffs.last().expect("leading of zero polynomial")
    }

    pub fn add(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.q, other.q);
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![0u64; n];
        for (i, slot) in coeffs.iter_mut().enumerate() {
            let a = self.coeffs.get(i).copied().unwrap_or(0);
            let b = other.coeffs.get(i).copied().unwrap_or(0);
            *slot = (a + b) % self.q;
        }
        let mut p = Poly { q: self.q, coeffs };
        p.normalize();
        p
    }

    pub fn neg(&self) -> Poly {
        let coeffs = self
            .coeffs
            .iter()
            .map(|&c| if c == 0 { 0 } else { self.q - c })
            .collect();
        Poly { q: self.q, coeffs }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.q, other.q);
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.q);
        }
        let mut coeffs = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = (coeffs[i + j] + a * b) % self.q;
            }
        }
        let mut p = Poly { q: self.q, coeffs };
        p.normalize();
        p
    }

    pub fn scale(&self, c: u64) -> Poly {
        let c = c % self.q;
        let coeffs = self.coeffs.iter().map(|&a| (a * c) % self.q).collect();
        let mut p = Poly { q: self.q, coeffs };
        p.normalize();
        p
    }

    fn inv_mod_q(&self, a: u64) -> u64 {
        // q is prime, so a^(q-2) inverts a
        let mut result = 1u64;
        let mut base = a % self.q;
        let mut e = self.q - 2;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base % self.q;
            }
            base = base * base % self.q;
            e >>= 1;
        }
        result
    }

    pub fn divrem(&self, divisor: &Poly) -> (Poly, Poly) {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let q = self.q;
        let mut rem = self.clone();
        let dd = divisor.degree().unwrap();
        let lead_inv = self.inv_mod_q(divisor.leading());
        let mut quot_coeffs = vec![0u64; self.coeffs.len().saturating_sub(dd)];
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let factor = rem.leading() * lead_inv % q;
            let shift = rd - dd;
            quot_coeffs[shift] = factor;
            let mut sub = vec![0u64; shift + dd + 1];
            for (j, &c) in divisor.coeffs.iter().enumerate() {
                sub[shift + j] = c * factor % q;
            }
            let mut subp = Poly { q, coeffs: sub };
            subp.normalize();
            rem = rem.sub(&subp);
        }
        let mut quot = Poly {
            q,
            coeffs: quot_coeffs,
        };
        quot.normalize();
        (quot, rem)
    }

    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        // monic normalization makes the gcd canonical
        let inv = self.inv_mod_q(a.leading());
        a.scale(inv)
    }

    /// Power-series inverse mod t^k; requires a unit (nonzero constant term).
    pub fn series_inverse(&self, k: usize) -> Poly {
        assert!(self.coeffs.first().map_or(false, |&c| c != 0));
        let q = self.q;
        let a0_inv = self.inv_mod_q(self.coeffs[0]);
        let mut inv = vec![0u64; k];
        if k == 0 {
            return Poly::zero(q);
        }
        inv[0] = a0_inv;
        for n in 1..k {
            let mut acc = 0u64;
            for i in 1..=n {
                let ai = self.coeffs.get(i).copied().unwrap_or(0);
                acc = (acc + ai * inv[n - i]) % q;
            }
            inv[n] = (q - acc % q) % q * a0_inv % q;
        }
        let mut p = Poly { q, coeffs: inv };
        p.normalize();
        p
    }

    pub fn truncate(&self, k: usize) -> Poly {
        let coeffs = self.coeffs.iter().take(k).copied().collect();
        let mut p = Poly {
            q: self.q,
            coeffs,
        };
        p.normalize();
        p
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match (i, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "t")?,
                (1, c) => write!(f, "{c}*t")?,
                (i, 1) => write!(f, "t^{i}")?,
                (i, c) => write!(f, "{c}*t^{i}")?,
            }
        }
        Ok(())
    }
}
