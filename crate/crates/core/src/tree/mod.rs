//! Homothety classes of rank-two lattices as vertices of the (q+1)-regular
//! tree, with exact distances, geodesics, convex hulls, and neighbor
//! enumeration. Stabilizers, motion classification, and the group model sit
//! in the submodules.

pub mod auto;
pub mod model;
pub mod stab;

pub use auto::{bfs_min_displacement, classify, MotionKind, TreeAuto};
pub use model::{elliptic_product_scales, unipotent_displacement_probe, ProbeStep, TreeModel};
pub use stab::{orbit_size_by_enumeration, sphere_size_by_enumeration, SegmentStabilizer};

use crate::error::{Error, Result};
use crate::field::LocalFieldSpec;
use crate::lattice::mat::{smith, Mat};
use crate::lattice::Lattice;
use std::collections::BTreeMap;

/// A vertex: the homothety class of a full-rank rank-two lattice, stored as
/// the canonical representative whose smallest pivot exponent is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeVertex {
    class: Lattice,
}

impl TreeVertex {
    pub fn new(lat: Lattice) -> Result<Self> {
        if lat.dim != 2 || !lat.is_full_rank() {
            return Err(Error::ModelMismatch(
                "tree vertices are full-rank rank-two lattice classes".into(),
            ));
        }
        let e = *lat.pivot_exps().iter().min().expect("two pivots");
        Ok(TreeVertex {
            class: lat.scale_by(-e)?,
        })
    }

    pub fn standard(spec: LocalFieldSpec) -> Self {
        TreeVertex {
            class: Lattice::standard(spec, 2),
        }
    }

    pub fn parse(spec: LocalFieldSpec, cols: &[Vec<String>]) -> Result<Self> {
        TreeVertex::new(Lattice::parse(spec, 2, cols)?)
    }

    pub fn class(&self) -> &Lattice {
        &self.class
    }

    pub fn spec(&self) -> LocalFieldSpec {
        self.class.spec
    }

    /// Canonical sortable form, usable as a set key.
    pub fn key(&self) -> String {
        self.class
            .render_cols()
            .iter()
            .map(|c| c.join(","))
            .collect::<Vec<_>>()
            .join(";")
    }

    pub fn apply(&self, g: &Mat) -> Result<TreeVertex> {
        TreeVertex::new(self.class.apply(g)?)
    }

    pub fn distance(&self, other: &TreeVertex) -> Result<u64> {
        let ds = self.class.rel_divisors(&other.class)?;
        Ok((ds[1] - ds[0]) as u64)
    }

    /// The vertex path from self to other, both endpoints included, built on
    /// an adapted basis from a Smith decomposition of the transition matrix.
    pub fn geodesic(&self, other: &TreeVertex) -> Result<Vec<TreeVertex>> {
        let spec = self.spec();
        let t = self.class.basis().inverse()?.mul(other.class.basis());
        let sm = smith(&t)?;
        let f = self.class.basis().mul(&sm.u_inv);
        let d1 = sm.divisors[0].ok_or(Error::DivisionByZero)?;
        let d2 = sm.divisors[1].ok_or(Error::DivisionByZero)?;
        let steps = (d2 - d1) as u64;
        let mut out = vec![self.clone()];
        for j in 1..=steps {
            // [span(pi^d1 f1, pi^(d1+j) f2)] = [span(f1, pi^j f2)]
            let cols = vec![
                f.col(0),
                f.col(1)
                    .iter()
                    .map(|x| spec.mul(x, &spec.uniformizer_pow(j as i64)))
                    .collect(),
            ];
            out.push(TreeVertex::new(Lattice::from_cols(spec, 2, cols)?)?);
        }
        if out.last() != Some(other) {
            return Err(Error::OracleDisagreement {
                context: "geodesic endpoint".into(),
                computed: out.last().map(|v| v.key()).unwrap_or_default(),
                oracle: other.key(),
            });
        }
        Ok(out)
    }

    /// The q + 1 classes of index-q sublattices.
    pub fn neighbors(&self) -> Result<Vec<TreeVertex>> {
        let spec = self.spec();
        let q = spec.residue_size();
        let b = self.class.basis();
        let pi = spec.uniformizer();
        let mut out = vec![];
        for c in 0..q {
            let cf = spec.from_i64(c as i64);
            let col1: Vec<_> = (0..2)
                .map(|i| spec.add(b.get(i, 0), &spec.mul(&cf, b.get(i, 1))))
                .collect();
            let col2: Vec<_> = (0..2).map(|i| spec.mul(&pi, b.get(i, 1))).collect();
            out.push(TreeVertex::new(Lattice::from_cols(spec, 2, vec![col1, col2])?)?);
        }
        let col1: Vec<_> = (0..2).map(|i| spec.mul(&pi, b.get(i, 0))).collect();
        let col2: Vec<_> = (0..2).map(|i| b.get(i, 1).clone()).collect();
        out.push(TreeVertex::new(Lattice::from_cols(spec, 2, vec![col1, col2])?)?);
        Ok(out)
    }
}

/// Convex hull of a finite vertex set: the union of all pairwise geodesics,
/// deduplicated and sorted by key.
pub fn hull(verts: &[TreeVertex]) -> Result<Vec<TreeVertex>> {
    let mut set: BTreeMap<String, TreeVertex> = BTreeMap::new();
    for v in verts {
        set.insert(v.key(), v.clone());
    }
    for i in 0..verts.len() {
        for j in i + 1..verts.len() {
            for w in verts[i].geodesic(&verts[j])? {
                set.insert(w.key(), w);
            }
        }
    }
    Ok(set.into_values().collect())
}
