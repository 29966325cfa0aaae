//! Setwise-pointwise stabilizers of finite convex vertex sets, the compact
//! open subgroups of the tree model. Indices between them are counted by
//! gate-and-cone orbits, and two brute-force enumerations keep the counting
//! formula honest: Hermite-form sphere counts and matrix-group orbits over
//! residue rings.

use super::{hull, TreeVertex};
use crate::error::{Error, Result};
use crate::field::LocalFieldSpec;
use crate::index::IndexValue;
use crate::lattice::mat::Mat;
use std::collections::{BTreeMap, BTreeSet};

/// Pointwise stabilizer of a finite geodesic segment, represented by the
/// vertex set itself (hull-closed, key-sorted). Containment of stabilizers
/// reverses containment of the sets.
///
/// Only path-shaped sets are accepted: once three directions are pinned at
/// a vertex, a matrix stabilizer fixes the whole unit ball there, strictly
/// more than the convex hull, and cone counting breaks down (see the
/// enumeration in the tests).
#[derive(Debug, Clone)]
pub struct SegmentStabilizer {
    spec: LocalFieldSpec,
    verts: Vec<TreeVertex>,
}

impl PartialEq for SegmentStabilizer {
    fn eq(&self, other: &Self) -> bool {
        self.key_set() == other.key_set()
    }
}

impl SegmentStabilizer {
    pub fn new(spec: LocalFieldSpec, verts: Vec<TreeVertex>) -> Result<Self> {
        if verts.is_empty() {
            return Err(Error::ConfigInvalid(
                "stabilizer of an empty vertex set is the whole group".into(),
            ));
        }
        let verts = hull(&verts)?;
        for v in &verts {
            let mut deg = 0;
            for w in &verts {
                if v.distance(w)? == 1 {
                    deg += 1;
                }
            }
            if deg > 2 {
                return Err(Error::Unsupported(
                    "stabilizer of a branching vertex set; the fixed set of a \
                     matrix group exceeds the hull at a degree-three vertex"
                        .into(),
                ));
            }
        }
        Ok(SegmentStabilizer { spec, verts })
    }

    pub fn standard(spec: LocalFieldSpec) -> Self {
        SegmentStabilizer {
            spec,
            verts: vec![TreeVertex::standard(spec)],
        }
    }

    pub fn vertex(spec: LocalFieldSpec, v: TreeVertex) -> Result<Self> {
        SegmentStabilizer::new(spec, vec![v])
    }

    pub fn verts(&self) -> &[TreeVertex] {
        &self.verts
    }

    pub fn spec(&self) -> LocalFieldSpec {
        self.spec
    }

    fn key_set(&self) -> BTreeSet<String> {
        self.verts.iter().map(|v| v.key()).collect()
    }

    pub fn contains_vertex(&self, v: &TreeVertex) -> bool {
        self.verts.iter().any(|w| w == v)
    }

    /// As subgroups: self <= other iff self fixes everything other fixes.
    pub fn subgroup_of(&self, other: &SegmentStabilizer) -> bool {
        other.key_set().is_subset(&self.key_set())
    }

    pub fn apply(&self, g: &Mat) -> Result<SegmentStabilizer> {
        let verts = self
            .verts
            .iter()
            .map(|v| v.apply(g))
            .collect::<Result<Vec<_>>>()?;
        SegmentStabilizer::new(self.spec, verts)
    }

    /// Stab(A) meet Stab(B) = Stab(A union B).
    pub fn meet(&self, other: &SegmentStabilizer) -> Result<SegmentStabilizer> {
        let mut verts = self.verts.clone();
        verts.extend(other.verts.iter().cloned());
        SegmentStabilizer::new(self.spec, verts)
    }

    /// [Stab(A) : Stab(A union B)], counted by attaching the vertices of B
    /// one at a time: a vertex at distance d behind a gate with `deg` fixed
    /// neighbors contributes (q + 1 - deg) q^{d-1} cone choices. Extensions
    /// through an interior gate (deg 2) would branch the set and are refused.
    pub fn stab_index(&self, other: &SegmentStabilizer) -> Result<IndexValue> {
        let q = self.spec.residue_size();
        let mut fixed: BTreeMap<String, TreeVertex> =
            self.verts.iter().map(|v| (v.key(), v.clone())).collect();
        let mut idx = IndexValue::one();
        for v in &other.verts {
            if fixed.contains_key(&v.key()) {
                continue;
            }
            let mut dmin = u64::MAX;
            let mut gates = vec![];
            for h in fixed.values() {
                let d = h.distance(v)?;
                match d.cmp(&dmin) {
                    std::cmp::Ordering::Less => {
                        dmin = d;
                        gates = vec![h.clone()];
                    }
                    std::cmp::Ordering::Equal => gates.push(h.clone()),
                    std::cmp::Ordering::Greater => {}
                }
            }
            if gates.len() != 1 {
                return Err(Error::OracleDisagreement {
                    context: "a convex set has a unique gate to an outside vertex".into(),
                    computed: format!("{} gates", gates.len()),
                    oracle: "1".into(),
                });
            }
            let gate = &gates[0];
            let mut deg = 0u64;
            for h in fixed.values() {
                if gate.distance(h)? == 1 {
                    deg += 1;
                }
            }
            if deg >= 2 {
                return Err(Error::Unsupported(
                    "index across a branching extension; cone counting only \
                     applies along a geodesic segment"
                        .into(),
                ));
            }
            let orbit = IndexValue::from_u64(q + 1 - deg)?
                .mul(&IndexValue::prime_power(q, dmin - 1));
            idx = idx.mul(&orbit);
            for w in gate.geodesic(v)? {
                fixed.insert(w.key(), w);
            }
        }
        Ok(idx)
    }
}

/// Number of vertices at distance exactly `d` from a fixed vertex, counted
/// independently of the tree code by enumerating Hermite forms
/// [[q^i, b], [0, q^{d-i}]] of index-q^d sublattices with cyclic quotient.
pub fn sphere_size_by_enumeration(q: u64, d: u64) -> u64 {
    if d == 0 {
        return 1;
    }
    let mut count = 0u64;
    for i in 0..=d {
        let modulus = q.pow((d - i) as u32);
        for b in 0..modulus {
            let b_unit = b % q != 0;
            if i == 0 || i == d || b_unit {
                count += 1;
            }
        }
    }
    count
}

/// Integer column Hermite form of the lattice spanned by `cols`, as
/// (a, b, c) with basis {(a, 0), (b, c)}, 0 <= b < a.
fn hnf2(cols: &[(i128, i128)]) -> (i128, i128, i128) {
    let mut work: Vec<(i128, i128)> = cols.to_vec();
    // clear second components down to a single column by gcd steps
    loop {
        let mut nz: Vec<usize> = (0..work.len()).filter(|&i| work[i].1 != 0).collect();
        if nz.len() <= 1 {
            break;
        }
        nz.sort_by_key(|&i| work[i].1.abs());
        let (i0, i1) = (nz[0], nz[1]);
        let f = work[i1].1 / work[i0].1;
        work[i1].0 -= f * work[i0].0;
        work[i1].1 -= f * work[i0].1;
    }
    let (mut b, mut c) = work
        .iter()
        .find(|v| v.1 != 0)
        .copied()
        .expect("full-rank input");
    if c < 0 {
        b = -b;
        c = -c;
    }
    let mut a = 0i128;
    for v in &work {
        if v.1 == 0 && v.0 != 0 {
            a = gcd_i128(a, v.0.abs());
        }
    }
    assert!(a > 0, "full-rank input");
    b = b.rem_euclid(a);
    (a, b, c)
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd_i128(b, a % b)
    }
}

/// Orbit size of the class `moved` under the subgroup of GL2(Z/p^m) fixing
/// every class in `fixed`, by full enumeration. Classes are integer column
/// bases (a, b; c, d) -> [a, b, c, d] of lattices not contained in p Z^2;
/// `m` must be at least the largest divisor exponent involved.
pub fn orbit_size_by_enumeration(p: u64, m: u32, fixed: &[[i64; 4]], moved: [i64; 4]) -> usize {
    let pm = (p as i128).pow(m);
    let to_cols = |mat: &[i64; 4], g: &[i128; 4]| -> [(i128, i128); 4] {
        // columns of g * mat, plus p^m times the standard basis
        let a = mat[0] as i128;
        let b = mat[1] as i128;
        let c = mat[2] as i128;
        let d = mat[3] as i128;
        [
            (g[0] * a + g[1] * c, g[2] * a + g[3] * c),
            (g[0] * b + g[1] * d, g[2] * b + g[3] * d),
            (pm, 0),
            (0, pm),
        ]
    };
    let id = [1i128, 0, 0, 1];
    let fixed_forms: Vec<(i128, i128, i128)> =
        fixed.iter().map(|f| hnf2(&to_cols(f, &id))).collect();
    let mut orbit: BTreeSet<(i128, i128, i128)> = BTreeSet::new();
    let pm64 = pm as i128;
    for g0 in 0..pm64 {
        for g1 in 0..pm64 {
            for g2 in 0..pm64 {
                for g3 in 0..pm64 {
                    let det = (g0 * g3 - g1 * g2).rem_euclid(pm64);
                    if det % p as i128 == 0 {
                        continue;
                    }
                    let g = [g0, g1, g2, g3];
                    let fixes = fixed
                        .iter()
                        .zip(&fixed_forms)
                        .all(|(f, form)| hnf2(&to_cols(f, &g)) == *form);
                    if !fixes {
                        continue;
                    }
                    orbit.insert(hnf2(&to_cols(&moved, &g)));
                }
            }
        }
    }
    orbit.len()
}
