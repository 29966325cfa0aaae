//! The additive model: K^n under invertible linear automorphisms, compact
//! open subgroups being full-rank lattices. The scale always has a second,
//! independent route through the characteristic polygon, and the adapter
//! cross-checks the two on every call.

use super::limits::{forward_limit, tidy_pipeline};
use super::mat::Mat;
use super::Lattice;
use crate::error::{Error, Result};
use crate::field::newton::{newton_polygon, scale_from_charpoly};
use crate::field::split::slope_factors;
use crate::field::LocalFieldSpec;
use crate::index::IndexValue;
use crate::model::{ChainLimit, GroupModel, TidyCertificate};

#[derive(Debug, Clone)]
pub struct LatticeModel {
    pub spec: LocalFieldSpec,
    pub dim: usize,
}

impl LatticeModel {
    pub fn new(spec: LocalFieldSpec, dim: usize) -> Result<Self> {
        if dim == 0 || dim > 4 {
            return Err(Error::ConfigInvalid(format!(
                "ambient dimension {dim} outside the supported range 1..=4"
            )));
        }
        Ok(LatticeModel { spec, dim })
    }

    pub fn max_depth(&self) -> usize {
        self.spec.precision.max(1) as usize
    }

    fn check_elem(&self, g: &Mat) -> Result<()> {
        if g.rows != self.dim || g.cols != self.dim {
            return Err(Error::ModelMismatch(
                "element shape does not match the model dimension".into(),
            ));
        }
        Ok(())
    }
}

impl GroupModel for LatticeModel {
    type Elem = Mat;
    type Subgroup = Lattice;

    fn name(&self) -> &'static str {
        "lattice"
    }

    fn base(&self) -> Lattice {
        Lattice::standard(self.spec, self.dim)
    }

    fn apply(&self, g: &Mat, v: &Lattice) -> Result<Lattice> {
        self.check_elem(g)?;
        v.apply(g)
    }

    fn invert(&self, g: &Mat) -> Result<Mat> {
        self.check_elem(g)?;
        g.inverse()
    }

    fn compose(&self, g: &Mat, h: &Mat) -> Result<Mat> {
        self.check_elem(g)?;
        self.check_elem(h)?;
        Ok(g.mul(h))
    }

    fn meet(&self, a: &Lattice, b: &Lattice) -> Result<Lattice> {
        a.intersect(b)
    }

    fn join(&self, a: &Lattice, b: &Lattice) -> Result<Lattice> {
        a.sum(b)
    }

    fn rel_index(&self, a: &Lattice, b: &Lattice) -> Result<IndexValue> {
        a.rel_index(b)
    }

    fn equal(&self, a: &Lattice, b: &Lattice) -> bool {
        a == b
    }

    fn tidy(&self, g: &Mat, start: &Lattice) -> Result<TidyCertificate<Lattice>> {
        self.check_elem(g)?;
        tidy_pipeline(g, start, self.max_depth())
    }

    fn plus_part(&self, g: &Mat, v: &Lattice, max_depth: usize) -> Result<ChainLimit<Lattice>> {
        self.check_elem(g)?;
        forward_limit(g, v, max_depth)
    }

    /// In an abelian ambient group the product of subgroups is the sum, so
    /// the decision is span equality rather than an index count (which is
    /// infinite for the rank-deficient one-sided parts).
    fn product_equals(&self, v: &Lattice, a: &Lattice, b: &Lattice) -> Result<bool> {
        Ok(a.sum(b)? == *v)
    }

    /// Refines the ambient space into the finest subspaces that are
    /// invariant under every generator and on which each generator acts with
    /// a single root valuation, then cuts `v` by each subspace. The family
    /// has to respect the refinement exactly, which commuting generators do.
    fn scale_directions(&self, gens: &[Mat], v: &Lattice) -> Result<Option<Vec<Lattice>>> {
        for g in gens {
            self.check_elem(g)?;
        }
        if !v.is_full_rank() {
            return Err(Error::ModelMismatch(
                "scale directions need a full-rank lattice".into(),
            ));
        }
        let spec = self.spec;
        let restrict = |g: &Mat, b: &Mat| -> Result<Mat> {
            b.solve(&g.mul(b)).map_err(|e| match e {
                Error::ModelMismatch(_) => Error::Unsupported(
                    "a generator does not preserve a refined direction; \
                     factoring needs an exactly commuting family"
                        .into(),
                ),
                other => other,
            })
        };
        let mut blocks = vec![Mat::identity(spec, self.dim)];
        for g in gens {
            let mut next = vec![];
            for b in &blocks {
                let r = restrict(g, b)?;
                let factors = slope_factors(&spec, &r.charpoly())?;
                if factors.len() <= 1 {
                    next.push(b.clone());
                    continue;
                }
                let mut covered = 0usize;
                for f in &factors {
                    let kb = r.eval_poly(&f.factor).kernel()?;
                    covered += kb.cols;
                    next.push(b.mul(&kb));
                }
                if covered != b.cols {
                    return Err(Error::OracleDisagreement {
                        context: "slope kernels must cover the refined block".into(),
                        computed: covered.to_string(),
                        oracle: b.cols.to_string(),
                    });
                }
            }
            blocks = next;
        }
        for g in gens {
            for b in &blocks {
                let r = restrict(g, b)?;
                let np = newton_polygon(&spec, &r.charpoly())?;
                if np.root_valuations().len() != 1 {
                    return Err(Error::OracleDisagreement {
                        context: "refined direction is not slope-pure".into(),
                        computed: format!("{} distinct valuations", np.root_valuations().len()),
                        oracle: "1".into(),
                    });
                }
            }
        }
        let mut parts = vec![];
        for b in &blocks {
            let sub = Lattice::from_matrix(spec, b)?;
            parts.push(v.saturation_of(&sub)?);
        }
        Ok(Some(parts))
    }

    /// Scale via the tidying pipeline, cross-checked against the
    /// characteristic polygon route.
    fn scale(&self, g: &Mat) -> Result<IndexValue> {
        self.check_elem(g)?;
        let cert = self.tidy(g, &self.base())?;
        let computed = cert.minimized_index;
        let oracle = scale_from_charpoly(&self.spec, &g.charpoly())?;
        if computed != oracle {
            return Err(Error::OracleDisagreement {
                context: "lattice scale: tidy route vs polygon route".into(),
                computed: computed.to_string(),
                oracle: oracle.to_string(),
            });
        }
        Ok(computed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> LatticeModel {
        LatticeModel::new(LocalFieldSpec::padic(3, 32).unwrap(), 2).unwrap()
    }

    fn mat(spec: LocalFieldSpec, rows: &[&[&str]]) -> Mat {
        Mat::parse(
            spec,
            &rows
                .iter()
                .map(|r| r.iter().map(|s| s.to_string()).collect())
                .collect::<Vec<_>>(),
        )
        .unwrap()
    }

    #[test]
    fn scale_of_split_diagonal() {
        let m = model();
        let a = mat(m.spec, &[&["3", "0"], &["0", "1/3"]]);
        assert_eq!(m.scale(&a).unwrap(), IndexValue::prime_power(3, 1));
        let a_inv = m.invert(&a).unwrap();
        assert_eq!(m.scale(&a_inv).unwrap(), IndexValue::prime_power(3, 1));
    }

    #[test]
    fn integral_matrices_are_scale_one_forward() {
        let m = model();
        let a = mat(m.spec, &[&["2", "1"], &["3", "5"]]);
        // integral invertible with unit determinant is uniscalar
        assert!(m.is_uniscalar(&a).unwrap());
        // integral with determinant 3: contraction one way only
        let b = mat(m.spec, &[&["1", "1"], &["1", "4"]]);
        assert!(m.scale(&b).unwrap().is_one());
        assert_eq!(
            m.scale(&m.invert(&b).unwrap()).unwrap(),
            IndexValue::prime_power(3, 1)
        );
    }

    #[test]
    fn scale_ratio_matches_determinant_valuation() {
        let m = model();
        let samples = [
            mat(m.spec, &[&["3", "1"], &["0", "1/9"]]),
            mat(m.spec, &[&["0", "1/3"], &["3", "0"]]),
            mat(m.spec, &[&["2", "9"], &["1/3", "5"]]),
        ];
        for a in samples {
            let s = m.scale(&a).unwrap();
            let s_inv = m.scale(&m.invert(&a).unwrap()).unwrap();
            let vdet = m.spec.valuation(&a.det()).unwrap();
            // s(a) / s(a^{-1}) = q^{-v(det a)}
            let (big, small, gap) = if vdet <= 0 {
                (s.clone(), s_inv.clone(), (-vdet) as u64)
            } else {
                (s_inv.clone(), s.clone(), vdet as u64)
            };
            assert_eq!(
                big,
                small.mul(&IndexValue::prime_power(3, gap))
            );
        }
    }

    #[test]
    fn conjugation_preserves_scale() {
        let m = model();
        let a = mat(m.spec, &[&["3", "0"], &["0", "1/3"]]);
        let g = mat(m.spec, &[&["1", "2"], &["1", "3"]]);
        let conj = g.mul(&a).mul(&g.inverse().unwrap());
        assert_eq!(m.scale(&conj).unwrap(), m.scale(&a).unwrap());
    }

    #[test]
    fn laurent_model_scale() {
        let spec = LocalFieldSpec::laurent(2, 32).unwrap();
        let m = LatticeModel::new(spec, 2).unwrap();
        let a = mat(spec, &[&["t", "0"], &["0", "1/t"]]);
        assert_eq!(m.scale(&a).unwrap(), IndexValue::prime_power(2, 1));
    }
}
