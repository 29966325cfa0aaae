//! Splitting a polynomial over a local field along its hull vertices, with
//! exact certification. A vertex of the valuation hull separates the roots
//! into a high-valuation cluster and a low-valuation cluster; the matching
//! factorization always exists over the completion, but its coefficients need
//! not lie in the base field. We recover the factors by a lifting iteration,
//! round each iterate back to the base field (rational reconstruction over
//! Q_p, rational-function reconstruction over F_q((t))), and accept a
//! candidate only when it divides the input exactly and reproduces the
//! expected root valuations. If no candidate ever verifies, the cluster is
//! irrational and the caller gets a dedicated error instead of an approximate
//! answer.

use super::fpoly;
use super::newton::newton_polygon;
use super::poly::Poly;
use super::{FieldElem, FieldKind, LocalFieldSpec, RatFun};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, Zero};

/// A monic factor whose roots all share one valuation.
#[derive(Debug, Clone)]
pub struct SlopeFactor {
    pub root_valuation: Rational64,
    pub factor: Vec<FieldElem>,
}

const LIFT_ROUNDS: usize = 24;

fn truncate_poly(k: &LocalFieldSpec, f: &[FieldElem], modexp: i64) -> Result<Vec<FieldElem>> {
    let mut out = Vec::with_capacity(f.len());
    for c in f {
        out.push(k.residue_rep(c, modexp)?);
    }
    Ok(out)
}

/// Multiset of root valuations read off the hull, one entry per root.
fn root_valuation_list(k: &LocalFieldSpec, f: &[FieldElem]) -> Result<Vec<Rational64>> {
    let np = newton_polygon(k, f)?;
    let mut out = vec![];
    for (v, m) in np.root_valuations() {
        for _ in 0..m {
            out.push(v);
        }
    }
    out.sort();
    Ok(out)
}

/// Split monic `f` (nonzero constant term) at hull vertex index `cut`: the
/// left factor carries the `cut` roots of largest valuation, the right factor
/// the remaining ones. Both factors are monic, exact, and multiply back to
/// `f`; when the clusters are not separately definable over the base field
/// this reports `IrrationalWitness`.
pub fn vertex_split(
    k: &LocalFieldSpec,
    f: &[FieldElem],
    cut: usize,
) -> Result<(Vec<FieldElem>, Vec<FieldElem>)> {
    let n = fpoly::deg(f).ok_or(Error::DivisionByZero)?;
    if cut == 0 || cut >= n {
        return Err(Error::ConfigInvalid(format!(
            "vertex index {cut} does not split a degree {n} polynomial"
        )));
    }
    if f[0].is_zero() {
        return Err(Error::ConfigInvalid(
            "vertex split requires a nonzero constant term".into(),
        ));
    }
    // expected root valuations of the left factor: the `cut` largest
    let all_vals = root_valuation_list(k, f)?;
    if all_vals.len() != n {
        return Err(Error::ConfigInvalid(
            "hull does not account for every root".into(),
        ));
    }
    let mut expected: Vec<Rational64> = all_vals[n - cut..].to_vec();
    expected.sort();

    let work = k.precision + 4;
    let pivot = &f[cut];
    if pivot.is_zero() {
        return Err(Error::ConfigInvalid(
            "cut coefficient vanishes; not a hull vertex".into(),
        ));
    }
    let piv_inv = k.inv(pivot)?;
    // initial approximants: the two halves of the coefficient list, scaled so
    // the left one is monic of degree `cut`
    let mut g: Vec<FieldElem> = f[..=cut].iter().map(|c| k.mul(c, &piv_inv)).collect();
    let mut h: Vec<FieldElem> = f[cut..].to_vec();

    for round in 0..LIFT_ROUNDS {
        let res = fpoly::sub(k, f, &fpoly::mul(k, &g, &h));
        if res.is_empty() {
            return Ok((g, h));
        }
        if round > 0 {
            if let Some(cand) = reconstruct_poly(k, &g, k.precision) {
                if fpoly::deg(&cand) == Some(cut) && !cand[0].is_zero() {
                    if let Ok((quot, rem)) = fpoly::divrem(k, f, &cand) {
                        if rem.is_empty() {
                            let mut got = root_valuation_list(k, &cand)?;
                            got.sort();
                            if got == expected {
                                return Ok((cand, quot));
                            }
                        }
                    }
                }
            }
        }
        // lifting step: with u*g + v*h = 1, the corrections
        //   A = (v * res) mod g,   B = (res - h*A) div g
        // satisfy g*B + h*A = res up to the part below the watermark
        let (d, _u, v) = fpoly::ext_gcd(k, &g, &h)?;
        if fpoly::deg(&d) != Some(0) {
            return Err(Error::IrrationalWitness {
                context: format!("root clusters at vertex {cut} cannot be separated"),
            });
        }
        let va = fpoly::mul(k, &v, &res);
        let (_, a_corr) = fpoly::divrem(k, &va, &g)?;
        let num = fpoly::sub(k, &res, &fpoly::mul(k, &h, &a_corr));
        let (b_corr, _) = fpoly::divrem(k, &num, &g)?;
        g = fpoly::add(k, &g, &a_corr);
        h = fpoly::add(k, &h, &b_corr);
        // convergence is valuation-wise, so canonical residues at the
        // watermark keep the iterates small without losing information
        g = truncate_poly(k, &g, work)?;
        h = truncate_poly(k, &h, work)?;
    }
    Err(Error::IrrationalWitness {
        context: format!(
            "hull-vertex factor of degree {cut} has no exact coefficients over the base field \
             within the precision watermark"
        ),
    })
}

/// Factor a monic polynomial with nonzero constant term into
/// (contracting, persistent): the contracting part carries the roots of
/// strictly positive valuation, the persistent part the roots of valuation
/// at most zero. Either side may come back as the constant 1.
pub fn contraction_split(
    k: &LocalFieldSpec,
    f: &[FieldElem],
) -> Result<(Vec<FieldElem>, Vec<FieldElem>)> {
    let f = fpoly::monic(k, f)?;
    if f[0].is_zero() {
        return Err(Error::ConfigInvalid(
            "singular input: zero is a root".into(),
        ));
    }
    let np = newton_polygon(k, &f)?;
    let n = fpoly::deg(&f).unwrap();
    // slope < 0 means root valuation > 0
    let cut: usize = np
        .segments
        .iter()
        .filter(|s| s.slope() < Rational64::zero())
        .map(|s| s.length)
        .sum();
    if cut == 0 {
        return Ok((vec![k.one()], f));
    }
    if cut == n {
        return Ok((f, vec![k.one()]));
    }
    vertex_split(k, &f, cut)
}

/// Full decomposition into slope-pure monic factors, root valuations strictly
/// descending. Requires every pairwise cluster split to be rational.
pub fn slope_factors(k: &LocalFieldSpec, f: &[FieldElem]) -> Result<Vec<SlopeFactor>> {
    let mut rest = fpoly::monic(k, f)?;
    if rest[0].is_zero() {
        return Err(Error::ConfigInvalid(
            "singular input: zero is a root".into(),
        ));
    }
    let mut out = vec![];
    loop {
        if fpoly::deg(&rest) == Some(0) {
            break;
        }
        let np = newton_polygon(k, &rest)?;
        if np.segments.len() <= 1 {
            out.push(SlopeFactor {
                root_valuation: -np.segments[0].slope(),
                factor: rest,
            });
            break;
        }
        let cut = np.segments[0].length;
        let val = -np.segments[0].slope();
        let (left, right) = vertex_split(k, &rest, cut)?;
        out.push(SlopeFactor {
            root_valuation: val,
            factor: left,
        });
        rest = right;
    }
    Ok(out)
}

fn reconstruct_poly(
    k: &LocalFieldSpec,
    f: &[FieldElem],
    modexp: i64,
) -> Option<Vec<FieldElem>> {
    let mut out = Vec::with_capacity(f.len());
    for c in f {
        out.push(reconstruct_elem(k, c, modexp)?);
    }
    Some(out)
}

/// Round a canonical residue back to a small exact element of the base field:
/// a fraction with numerator and denominator below sqrt(modulus/2) for Q_p, a
/// rational function with combined degree below the modulus exponent for
/// F_q((t)). Correctness of any use is established downstream by exact
/// division, so a miss only costs another lifting round.
fn reconstruct_elem(k: &LocalFieldSpec, x: &FieldElem, modexp: i64) -> Option<FieldElem> {
    let Some(v) = k.valuation(x) else {
        return Some(k.zero());
    };
    // after shifting the unit part into view, only modexp - v digits of the
    // residue remain meaningful
    let window = modexp - v;
    if window <= 0 {
        return None;
    }
    let shifted = k.mul(x, &k.uniformizer_pow(-v));
    let rep = k.reduce_mod(&shifted, window).ok()?;
    let unit = match (k.kind, rep) {
        (FieldKind::Padic { p }, FieldElem::Rat(r)) => {
            let m = BigInt::from(p).pow(window as u32);
            let (num, den) = rat_reconstruct(r.numer(), &m)?;
            if (&den % BigInt::from(p)).is_zero() {
                return None;
            }
            FieldElem::Rat(BigRational::new(num, den))
        }
        (FieldKind::Laurent { q }, FieldElem::Fun(s)) => {
            FieldElem::Fun(pade(q, &s.num, window as usize)?)
        }
        _ => return None,
    };
    Some(k.mul(&unit, &k.uniformizer_pow(v)))
}

/// Smallest fraction num/den congruent to r mod m, |num|, den <= sqrt(m/2),
/// by the usual remainder-sequence construction.
fn rat_reconstruct(r: &BigInt, m: &BigInt) -> Option<(BigInt, BigInt)> {
    let mut r0 = m.clone();
    let mut r1 = r.mod_floor(m);
    let mut t0 = BigInt::zero();
    let mut t1 = BigInt::one();
    while !r1.is_zero() && (&r1 * &r1) * 2 > *m {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = r1;
        r1 = r2;
        t0 = t1;
        t1 = t2;
    }
    if r1.is_zero() || t1.is_zero() {
        return None;
    }
    if (&t1 * &t1) * 2 > *m {
        return None;
    }
    let (num, den) = if t1.is_negative() {
        (-r1, -t1)
    } else {
        (r1, t1)
    };
    if num.gcd(&den) != BigInt::one() {
        return None;
    }
    Some((num, den))
}

/// Rational-function reconstruction of a truncated series: remainder sequence
/// on (t^e, s) until the remainder degree drops below e/2.
fn pade(q: u64, s: &Poly, e: usize) -> Option<RatFun> {
    let mut r0 = Poly::t_pow(q, e);
    let mut r1 = s.truncate(e);
    let mut t0 = Poly::zero(q);
    let mut t1 = Poly::constant(q, 1);
    while !r1.is_zero() && 2 * r1.degree().unwrap() >= e {
        let (quo, rem) = r0.divrem(&r1);
        let t2 = t0.sub(&quo.mul(&t1));
        r0 = r1;
        r1 = rem;
        t0 = t1;
        t1 = t2;
    }
    if r1.is_zero() || t1.is_zero() {
        return None;
    }
    if t1.t_valuation() != Some(0) {
        return None;
    }
    if 2 * t1.degree().unwrap_or(0) >= e {
        return None;
    }
    Some(RatFun::new(r1, t1))
}
