//! Finitely generated modules over the valuation ring of a local field,
//! held in a unique echelon basis. Full-rank modules are the compact open
//! subgroups of the additive model; rank-deficient ones appear as one-sided
//! limits of subgroup chains.

pub mod limits;
pub mod mat;
pub mod model;

pub use model::LatticeModel;

use crate::error::{Error, Result};
use crate::field::{FieldElem, LocalFieldSpec};
use crate::index::IndexValue;
use mat::{smith, Mat};

/// Canonical basis invariants: pivot rows strictly increase, each pivot is an
/// exact uniformizer power, a column vanishes above its pivot row and at all
/// earlier pivot rows, and entries of earlier columns at later pivot rows are
/// canonical residues modulo the pivot. Two equal modules have identical
/// bases, so equality is structural.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    pub spec: LocalFieldSpec,
    pub dim: usize,
    basis: Mat,
    pivot_rows: Vec<usize>,
    pivot_exps: Vec<i64>,
}

impl Lattice {
    pub fn from_cols(spec: LocalFieldSpec, dim: usize, cols: Vec<Vec<FieldElem>>) -> Result<Self> {
        for c in &cols {
            if c.len() != dim {
                return Err(Error::ConfigInvalid(
                    "basis column length does not match the ambient dimension".into(),
                ));
            }
        }
        let (basis, pivot_rows, pivot_exps) = canonicalize(spec, dim, cols)?;
        Ok(Lattice {
            spec,
            dim,
            basis,
            pivot_rows,
            pivot_exps,
        })
    }

    pub fn from_matrix(spec: LocalFieldSpec, m: &Mat) -> Result<Self> {
        let cols = (0..m.cols).map(|j| m.col(j)).collect();
        Lattice::from_cols(spec, m.rows, cols)
    }

    /// O^dim with the standard basis.
    pub fn standard(spec: LocalFieldSpec, dim: usize) -> Self {
        Lattice::from_matrix(spec, &Mat::identity(spec, dim)).expect("identity basis")
    }

    pub fn zero(spec: LocalFieldSpec, dim: usize) -> Self {
        Lattice {
            spec,
            dim,
            basis: Mat::zero(spec, dim, 0),
            pivot_rows: vec![],
            pivot_exps: vec![],
        }
    }

    /// Parses column vectors of entry strings.
    pub fn parse(spec: LocalFieldSpec, dim: usize, cols: &[Vec<String>]) -> Result<Self> {
        let mut parsed = vec![];
        for col in cols {
            let mut v = vec![];
            for s in col {
                v.push(spec.parse(s)?);
            }
            parsed.push(v);
        }
        Lattice::from_cols(spec, dim, parsed)
    }

    pub fn rank(&self) -> usize {
        self.pivot_rows.len()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.dim
    }

    pub fn basis(&self) -> &Mat {
        &self.basis
    }

    pub fn basis_cols(&self) -> Vec<Vec<FieldElem>> {
        (0..self.rank()).map(|j| self.basis.col(j)).collect()
    }

    pub fn pivot_rows(&self) -> &[usize] {
        &self.pivot_rows
    }

    pub fn pivot_exps(&self) -> &[i64] {
        &self.pivot_exps
    }

    /// Rendered basis columns, for reports.
    pub fn render_cols(&self) -> Vec<Vec<String>> {
        self.basis_cols()
            .iter()
            .map(|c| c.iter().map(|x| self.spec.render(x)).collect())
            .collect()
    }

    fn check_compatible(&self, other: &Lattice) -> Result<()> {
        if self.spec != other.spec || self.dim != other.dim {
            return Err(Error::ModelMismatch(
                "lattices live in different ambient modules".into(),
            ));
        }
        Ok(())
    }

    /// Image under an invertible ambient matrix.
    pub fn apply(&self, a: &Mat) -> Result<Lattice> {
        if a.rows != self.dim || a.cols != self.dim {
            return Err(Error::ModelMismatch(
                "matrix shape does not match the ambient dimension".into(),
            ));
        }
        Lattice::from_matrix(self.spec, &a.mul(&self.basis))
    }

    /// uniformizer^k * self
    pub fn scale_by(&self, k: i64) -> Result<Lattice> {
        let f = self.spec.uniformizer_pow(k);
        let cols = self
            .basis_cols()
            .into_iter()
            .map(|c| c.iter().map(|x| self.spec.mul(x, &f)).collect())
            .collect();
        Lattice::from_cols(self.spec, self.dim, cols)
    }

    pub fn contains_vector(&self, v: &[FieldElem]) -> Result<bool> {
        if v.len() != self.dim {
            return Err(Error::ModelMismatch("vector length mismatch".into()));
        }
        let spec = self.spec;
        let mut y = v.to_vec();
        for (i, (&ri, &ei)) in self.pivot_rows.iter().zip(&self.pivot_exps).enumerate() {
            if y[ri].is_zero() {
                continue;
            }
            let f = spec.mul(&y[ri], &spec.uniformizer_pow(-ei));
            if spec.valuation(&f).expect("nonzero") < 0 {
                return Ok(false);
            }
            for (r, slot) in y.iter_mut().enumerate() {
                *slot = spec.sub(slot, &spec.mul(&f, self.basis.get(r, i)));
            }
        }
        Ok(y.iter().all(|x| x.is_zero()))
    }

    pub fn contains(&self, other: &Lattice) -> Result<bool> {
        self.check_compatible(other)?;
        for col in other.basis_cols() {
            if !self.contains_vector(&col)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn sum(&self, other: &Lattice) -> Result<Lattice> {
        self.check_compatible(other)?;
        let mut cols = self.basis_cols();
        cols.extend(other.basis_cols());
        Lattice::from_cols(self.spec, self.dim, cols)
    }

    /// Intersection of arbitrary-rank modules: integral solutions of
    /// B1 s = B2 t, read off a Smith decomposition of [B1 | -B2].
    pub fn intersect(&self, other: &Lattice) -> Result<Lattice> {
        self.check_compatible(other)?;
        if self.rank() == 0 || other.rank() == 0 {
            return Ok(Lattice::zero(self.spec, self.dim));
        }
        let spec = self.spec;
        let mut cols = self.basis_cols();
        for c in other.basis_cols() {
            cols.push(c.iter().map(|x| spec.neg(x)).collect());
        }
        let stacked = Mat::from_cols(spec, self.dim, cols);
        let sm = smith(&stacked)?;
        let total = self.rank() + other.rank();
        let mut out = vec![];
        for j in sm.rank..total {
            let w = sm.v.col(j);
            let s = &w[..self.rank()];
            out.push(self.basis.mul_vec(s));
        }
        Lattice::from_cols(spec, self.dim, out)
    }

    /// Dual lattice of a full-rank lattice; kept as the second, independent
    /// route to intersections (meet of duals is the dual of the sum).
    pub fn dual(&self) -> Result<Lattice> {
        if !self.is_full_rank() {
            return Err(Error::Unsupported("dual of a rank-deficient module".into()));
        }
        Lattice::from_matrix(self.spec, &self.basis.inverse()?.transpose())
    }

    /// Valuations of the elementary divisors of `other` relative to `self`,
    /// ascending. Computed from minor gcd valuations of the transition
    /// matrix; modules of equal rank are compared inside their common span,
    /// and distinct spans or ranks mean an infinite index.
    pub fn rel_divisors(&self, other: &Lattice) -> Result<Vec<i64>> {
        self.check_compatible(other)?;
        if self.rank() != other.rank() {
            return Err(Error::InfiniteIndex(
                "relative divisors of modules with different ranks".into(),
            ));
        }
        if self.rank() == 0 {
            return Ok(vec![]);
        }
        let r = if self.is_full_rank() {
            self.basis.inverse()?.mul(&other.basis)
        } else {
            self.basis.solve(&other.basis).map_err(|e| match e {
                Error::ModelMismatch(_) => Error::InfiniteIndex(
                    "equal-rank modules with different spans".into(),
                ),
                other_err => other_err,
            })?
        };
        let spec = self.spec;
        let mut out = vec![];
        let mut prev = 0i64;
        for k in 1..=self.rank() {
            let dk = r
                .minors_k(k)
                .iter()
                .filter_map(|m| spec.valuation(m))
                .min()
                .ok_or(Error::DivisionByZero)?;
            out.push(dk - prev);
            prev = dk;
        }
        debug_assert!(out.windows(2).all(|w| w[0] <= w[1]));
        Ok(out)
    }

    /// [self : self meet other] for equal-rank modules, as a prime power.
    pub fn rel_index(&self, other: &Lattice) -> Result<IndexValue> {
        let e: i64 = self
            .rel_divisors(other)?
            .iter()
            .map(|&d| d.max(0))
            .sum();
        Ok(IndexValue::prime_power(self.spec.residue_size(), e as u64))
    }

    /// [self : sub] when sub is a full-rank sublattice of self.
    pub fn index_of_sublattice(&self, sub: &Lattice) -> Result<IndexValue> {
        let ds = self.rel_divisors(sub)?;
        if ds.iter().any(|&d| d < 0) {
            return Err(Error::ModelMismatch(
                "index requested for a non-sublattice".into(),
            ));
        }
        Ok(IndexValue::prime_power(
            self.spec.residue_size(),
            ds.iter().sum::<i64>() as u64,
        ))
    }

    /// {x in self : x in span(sub)}: the saturation of span(sub) inside a
    /// full-rank ambient lattice. The span is cut out by the integral
    /// annihilator rows from a Smith decomposition, whose integral kernel is
    /// again read off a Smith decomposition.
    pub fn saturation_of(&self, sub: &Lattice) -> Result<Lattice> {
        self.check_compatible(sub)?;
        if !self.is_full_rank() {
            return Err(Error::Unsupported(
                "saturation needs a full-rank ambient lattice".into(),
            ));
        }
        if sub.rank() == 0 {
            return Ok(Lattice::zero(self.spec, self.dim));
        }
        let spec = self.spec;
        let c = self.basis.inverse()?.mul(&sub.basis);
        let sm = smith(&c)?;
        if sm.rank == self.dim {
            return Ok(self.clone());
        }
        let f_rows: Vec<Vec<FieldElem>> = (sm.rank..self.dim)
            .map(|i| (0..self.dim).map(|j| sm.u.get(i, j).clone()).collect())
            .collect();
        let f = Mat::from_rows(spec, f_rows);
        let km = smith(&f)?;
        let mut cols = vec![];
        for j in km.rank..self.dim {
            let y = km.v.col(j);
            cols.push(self.basis.mul_vec(&y));
        }
        Lattice::from_cols(spec, self.dim, cols)
    }
}

fn canonicalize(
    spec: LocalFieldSpec,
    dim: usize,
    cols: Vec<Vec<FieldElem>>,
) -> Result<(Mat, Vec<usize>, Vec<i64>)> {
    let mut work: Vec<Vec<FieldElem>> = cols
        .into_iter()
        .filter(|c| c.iter().any(|x| !x.is_zero()))
        .collect();
    let mut placed: Vec<Vec<FieldElem>> = vec![];
    let mut pivot_rows = vec![];
    let mut pivot_exps = vec![];
    for row in 0..dim {
        let mut best: Option<(usize, i64)> = None;
        for (i, c) in work.iter().enumerate() {
            if let Some(v) = spec.valuation(&c[row]) {
                if best.map_or(true, |(_, bv)| v < bv) {
                    best = Some((i, v));
                }
            }
        }
        let Some((bi, e)) = best else { continue };
        if e.abs() > spec.precision {
            return Err(Error::PrecisionExhausted {
                context: "lattice pivot exponent".into(),
                needed: e.abs(),
                configured: spec.precision,
            });
        }
        let mut col = work.remove(bi);
        let unit_inv = spec.inv(&spec.mul(&col[row], &spec.uniformizer_pow(-e)))?;
        for x in col.iter_mut() {
            *x = spec.mul(x, &unit_inv);
        }
        let pivot = col[row].clone();
        for c in work.iter_mut() {
            if c[row].is_zero() {
                continue;
            }
            let f = spec.div(&c[row], &pivot)?;
            for r in row..dim {
                c[r] = spec.sub(&c[r], &spec.mul(&f, &col[r]));
            }
        }
        work.retain(|c| c.iter().any(|x| !x.is_zero()));
        placed.push(col);
        pivot_rows.push(row);
        pivot_exps.push(e);
    }
    debug_assert!(work.is_empty());
    // canonical residues of earlier columns at later pivot rows
    for i in 0..placed.len() {
        let ri = pivot_rows[i];
        let ei = pivot_exps[i];
        let pivot_col = placed[i].clone();
        for j in 0..i {
            let x = placed[j][ri].clone();
            if x.is_zero() {
                continue;
            }
            let rep = spec.residue_rep(&x, ei)?;
            let f = spec.div(&spec.sub(&x, &rep), &spec.uniformizer_pow(ei))?;
            if f.is_zero() {
                continue;
            }
            debug_assert!(spec.valuation(&f).map_or(true, |v| v >= 0));
            for r in 0..dim {
                placed[j][r] = spec.sub(&placed[j][r], &spec.mul(&f, &pivot_col[r]));
            }
        }
    }
    Ok((Mat::from_cols(spec, dim, placed), pivot_rows, pivot_exps))
}
