//! Newton polygons of polynomials over a local field, and the scale of a
//! linear automorphism read off from its characteristic polynomial.

use super::{FieldElem, LocalFieldSpec};
use crate::error::{Error, Result};
use crate::index::IndexValue;
use num_rational::Rational64;
use num_traits::Zero;
use serde::Serialize;

/// One face of the lower convex hull. Slopes are listed ascending; the roots
/// attached to a face have valuation equal to the negated slope.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Segment {
    pub slope_num: i64,
    pub slope_den: i64,
    pub length: usize,
}

impl Segment {
    pub fn slope(&self) -> Rational64 {
        Rational64::new(self.slope_num, self.slope_den)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NewtonPolygon {
    /// hull vertices (i, v(a_i)), left to right
    pub vertices: Vec<(i64, i64)>,
    pub segments: Vec<Segment>,
    /// roots of infinite valuation (x = 0 factors)
    pub zero_roots: usize,
}

impl NewtonPolygon {
    /// Root valuations as (valuation, multiplicity); finite ones ascending by
    /// valuation, with `zero_roots` carrying the infinite tail separately.
    pub fn root_valuations(&self) -> Vec<(Rational64, usize)> {
        let mut out: Vec<(Rational64, usize)> = self
            .segments
            .iter()
            .map(|s| (-s.slope(), s.length))
            .collect();
        out.sort_by_key(|(v, _)| *v);
        out
    }
}

/// Lower convex hull of the points (i, v(a_i)) for f = sum a_i x^i.
pub fn newton_polygon(field: &LocalFieldSpec, coeffs: &[FieldElem]) -> Result<NewtonPolygon> {
    if coeffs.iter().all(|c| c.is_zero()) {
        return Err(Error::ConfigInvalid("newton polygon of zero polynomial".into()));
    }
    let first_nonzero = coeffs.iter().position(|c| !c.is_zero()).unwrap();
    let points: Vec<(i64, i64)> = coeffs
        .iter()
        .enumerate()
        .skip(first_nonzero)
        .filter_map(|(i, c)| field.valuation(c).map(|v| (i as i64, v)))
        .collect();
    // monotone-chain lower hull
    let mut hull: Vec<(i64, i64)> = vec![];
    for &p in &points {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // keep b only if it is strictly below the segment a-p
            if (b.1 - a.1) * (p.0 - a.0) <= (p.1 - a.1) * (b.0 - a.0) {
                break;
            }
            hull.pop();
        }
        hull.push(p);
    }
    // drop collinear interior vertices so segment lengths are maximal
    let mut vertices: Vec<(i64, i64)> = vec![];
    for &p in &hull {
        while vertices.len() >= 2 {
            let a = vertices[vertices.len() - 2];
            let b = vertices[vertices.len() - 1];
            if (b.1 - a.1) * (p.0 - a.0) == (p.1 - a.1) * (b.0 - a.0) {
                vertices.pop();
            } else {
                break;
            }
        }
        vertices.push(p);
    }
    let segments = vertices
        .windows(2)
        .map(|w| {
            let (x0, y0) = w[0];
            let (x1, y1) = w[1];
            let g = num_integer::gcd(y1 - y0, x1 - x0);
            let (mut sn, mut sd) = if g != 0 {
                ((y1 - y0) / g, (x1 - x0) / g)
            } else {
                (0, 1)
            };
            if sd < 0 {
                sn = -sn;
                sd = -sd;
            }
            Segment {
                slope_num: sn,
                slope_den: sd,
                length: (x1 - x0) as usize,
            }
        })
        .collect();
    Ok(NewtonPolygon {
        vertices,
        segments,
        zero_roots: first_nonzero,
    })
}

/// Scale of the linear automorphism with the given characteristic polynomial:
/// the product of q^{-v(root)} over roots of negative valuation. Computed two
/// ways (sum of positive-slope rises, and the hull-minimum drop for a monic
/// input) and cross-checked; a fractional total is a hard error.
pub fn scale_from_charpoly(field: &LocalFieldSpec, coeffs: &[FieldElem]) -> Result<IndexValue> {
    let lead = coeffs.last().ok_or_else(|| {
        Error::ConfigInvalid("empty coefficient list".into())
    })?;
    if lead.is_zero() {
        return Err(Error::ConfigInvalid(
            "characteristic polynomial must have a nonzero leading coefficient".into(),
        ));
    }
    if coeffs[0].is_zero() {
        return Err(Error::ConfigInvalid(
            "zero constant term: the matrix is singular, not an automorphism".into(),
        ));
    }
    let polygon = newton_polygon(field, coeffs)?;
    let mut rise = Rational64::zero();
    for seg in &polygon.segments {
        if seg.slope_num > 0 {
            rise += seg.slope() * Rational64::from_integer(seg.length as i64);
        }
    }
    if !rise.denom().eq(&1) {
        return Err(Error::NonIntegralExponent);
    }
    let e = rise.to_integer();
    debug_assert!(e >= 0);
    // independent route for a monic polynomial: the hull minimum sits where
    // the slopes change sign, so the exponent is v(a_n) - min_i v(a_i)
    let v_lead = field.valuation(lead).unwrap();
    if v_lead == 0 {
        let min_v = coeffs
            .iter()
            .filter_map(|c| field.valuation(c))
            .min()
            .unwrap();
        if -min_v != e {
            return Err(Error::OracleDisagreement {
                context: "scale_from_charpoly".into(),
                computed: e.to_string(),
                oracle: (-min_v).to_string(),
            });
        }
    }
    Ok(IndexValue::prime_power(field.residue_size(), e as u64))
}
