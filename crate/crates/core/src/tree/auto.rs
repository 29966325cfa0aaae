//! Classification of tree automorphisms coming from invertible 2x2 matrices:
//! elliptic (a fixed vertex or inverted edge) versus hyperbolic (a translated
//! axis), with the translation length read off the characteristic polygon and
//! certified by a ball search.

use super::TreeVertex;
use crate::error::{Error, Result};
use crate::field::LocalFieldSpec;
use crate::lattice::mat::Mat;
use crate::field::newton::newton_polygon;
use num_rational::Rational64;
use num_traits::Signed;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MotionKind {
    /// fixes a vertex; scale 1
    Elliptic,
    /// swaps the ends of an edge, fixing no vertex; scale still 1
    Inversion,
    /// translates an axis; scale q^length
    Hyperbolic,
}

/// An invertible matrix acting on the vertex set by mapping lattice classes.
#[derive(Debug, Clone)]
pub struct TreeAuto {
    pub mat: Mat,
}

impl TreeAuto {
    pub fn new(spec: LocalFieldSpec, mat: Mat) -> Result<TreeAuto> {
        if mat.rows != 2 || mat.cols != 2 {
            return Err(Error::ConfigInvalid(
                "tree automorphisms come from 2x2 matrices".into(),
            ));
        }
        let det = mat.det();
        if spec.valuation(&det).is_none() {
            return Err(Error::ConfigInvalid(
                "tree automorphisms come from invertible matrices".into(),
            ));
        }
        Ok(TreeAuto { mat })
    }
}

/// Minimum displacement over all vertices within `radius` of the standard
/// vertex, by breadth-first enumeration.
pub fn bfs_min_displacement(spec: LocalFieldSpec, g: &Mat, radius: u64) -> Result<u64> {
    let v0 = TreeVertex::standard(spec);
    let mut seen: BTreeMap<String, TreeVertex> = BTreeMap::new();
    seen.insert(v0.key(), v0.clone());
    let mut frontier = vec![v0];
    let mut best = u64::MAX;
    for _ in 0..=radius {
        let mut next = vec![];
        for v in &frontier {
            let d = v.distance(&v.apply(g)?)?;
            best = best.min(d);
        }
        if best == 0 {
            return Ok(0);
        }
        for v in &frontier {
            for w in v.neighbors()? {
                if !seen.contains_key(&w.key()) {
                    seen.insert(w.key(), w.clone());
                    next.push(w);
                }
            }
        }
        frontier = next;
    }
    Ok(best)
}

/// Motion type, scale exponent, and minimal vertex displacement of the
/// automorphism, read from the valuations of the eigenvalues: two distinct
/// valuations give a translation by their gap; a repeated valuation gives a
/// vertex-fixing motion for even determinant valuation and an edge inversion
/// for odd. A ball search that provably reaches the minimal-displacement set
/// certifies the displacement, and the ambiguous displacement-one cases are
/// separated by the displacement of the square.
pub fn classify(spec: LocalFieldSpec, g: &Mat) -> Result<(MotionKind, u64, u64)> {
    if g.rows != 2 || g.cols != 2 {
        return Err(Error::ConfigInvalid(
            "tree automorphisms come from 2x2 matrices".into(),
        ));
    }
    let det = g.det();
    let vdet = spec
        .valuation(&det)
        .ok_or(Error::ConfigInvalid("singular matrix on the tree".into()))?;
    let poly = g.charpoly();
    let np = newton_polygon(&spec, &poly)?;
    let roots = np.root_valuations();
    let (kind, ell, vdisp) = if roots.len() == 2 {
        let r1 = roots[0].0;
        let r2 = roots[1].0;
        let gap = (r2 - r1).abs();
        if !gap.is_integer() || gap.to_integer() <= 0 {
            return Err(Error::OracleDisagreement {
                context: "eigenvalue valuation gap of a 2x2 matrix".into(),
                computed: gap.to_string(),
                oracle: "a positive integer (two distinct polygon slopes)".into(),
            });
        }
        let l = gap.to_integer() as u64;
        (MotionKind::Hyperbolic, l, l)
    } else {
        let r = roots[0].0;
        let two_r = r * Rational64::from_integer(2);
        if !two_r.is_integer() || two_r.to_integer() != vdet {
            return Err(Error::OracleDisagreement {
                context: "repeated eigenvalue valuation versus the determinant".into(),
                computed: two_r.to_string(),
                oracle: vdet.to_string(),
            });
        }
        if vdet.rem_euclid(2) == 0 {
            (MotionKind::Elliptic, 0, 0)
        } else {
            (MotionKind::Inversion, 0, 1)
        }
    };
    // certify: d(v, gv) = vdisp + 2 d(v, minimal set), so a ball of radius
    // (d0 - vdisp)/2 + 1 around the standard vertex meets the minimal set
    let v0 = TreeVertex::standard(spec);
    let d0 = v0.distance(&v0.apply(g)?)?;
    if d0 < vdisp || (d0 - vdisp) % 2 != 0 {
        return Err(Error::OracleDisagreement {
            context: "vertex displacement versus minimal displacement parity".into(),
            computed: d0.to_string(),
            oracle: format!("{vdisp} plus an even offset"),
        });
    }
    let radius = (d0 - vdisp) / 2 + 1;
    let observed = bfs_min_displacement(spec, g, radius)?;
    if observed != vdisp {
        return Err(Error::OracleDisagreement {
            context: "minimal displacement by ball search".into(),
            computed: observed.to_string(),
            oracle: vdisp.to_string(),
        });
    }
    // an inversion and a one-step translation both have displacement one;
    // the square separates them: fixed vertices versus a two-step shift
    if vdisp == 1 {
        let g2 = g.mul(g);
        let target = match kind {
            MotionKind::Inversion => 0,
            _ => 2,
        };
        let d0_2 = v0.distance(&v0.apply(&g2)?)?;
        if d0_2 < target || (d0_2 - target) % 2 != 0 {
            return Err(Error::OracleDisagreement {
                context: "squared displacement parity".into(),
                computed: d0_2.to_string(),
                oracle: format!("{target} plus an even offset"),
            });
        }
        let observed2 = bfs_min_displacement(spec, &g2, (d0_2 - target) / 2 + 1)?;
        if observed2 != target {
            return Err(Error::OracleDisagreement {
                context: "minimal displacement of the square by ball search".into(),
                computed: observed2.to_string(),
                oracle: target.to_string(),
            });
        }
    }
    Ok((kind, ell, vdisp))
}
