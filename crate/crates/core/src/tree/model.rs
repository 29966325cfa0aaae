//! Group model for invertible 2x2 matrices acting on the vertex tree. Tidy
//! subgroups are stabilizers of points or segments of the minimal-displacement
//! set; the scale comes out as q^(translation length), checked against the
//! measured index at the tidy subgroup.

use super::auto::{classify, TreeAuto};
use super::stab::SegmentStabilizer;
use super::TreeVertex;
use crate::error::{Error, Result};
use crate::field::LocalFieldSpec;
use crate::index::{Displacement, IndexValue};
use crate::lattice::mat::Mat;
use crate::model::{ChainLimit, GroupModel, TidyCertificate};
use std::collections::BTreeSet;

/// Depth cap for one-sided chains; segment chains certify after two steps.
const CHAIN_CAP: usize = 64;

#[derive(Debug, Clone)]
pub struct TreeModel {
    pub spec: LocalFieldSpec,
}

impl TreeModel {
    pub fn new(spec: LocalFieldSpec) -> Self {
        TreeModel { spec }
    }

    pub fn auto(&self, rows: &[Vec<String>]) -> Result<TreeAuto> {
        TreeAuto::new(self.spec, Mat::parse(self.spec, rows)?)
    }
}

impl GroupModel for TreeModel {
    type Elem = TreeAuto;
    type Subgroup = SegmentStabilizer;

    fn name(&self) -> &'static str {
        "tree"
    }

    fn base(&self) -> SegmentStabilizer {
        SegmentStabilizer::standard(self.spec)
    }

    fn apply(&self, g: &TreeAuto, v: &SegmentStabilizer) -> Result<SegmentStabilizer> {
        v.apply(&g.mat)
    }

    fn invert(&self, g: &TreeAuto) -> Result<TreeAuto> {
        TreeAuto::new(self.spec, g.mat.inverse()?)
    }

    fn compose(&self, g: &TreeAuto, h: &TreeAuto) -> Result<TreeAuto> {
        TreeAuto::new(self.spec, g.mat.mul(&h.mat))
    }

    fn meet(&self, a: &SegmentStabilizer, b: &SegmentStabilizer) -> Result<SegmentStabilizer> {
        a.meet(b)
    }

    /// Two segment stabilizers generate the stabilizer of the intersection
    /// of their segments; with no common vertex the generated subgroup has
    /// unbounded orbits.
    fn join(&self, a: &SegmentStabilizer, b: &SegmentStabilizer) -> Result<SegmentStabilizer> {
        let keys: BTreeSet<String> = b.verts().iter().map(|v| v.key()).collect();
        let common: Vec<TreeVertex> = a
            .verts()
            .iter()
            .filter(|v| keys.contains(&v.key()))
            .cloned()
            .collect();
        if common.is_empty() {
            return Err(Error::InfiniteIndex(
                "stabilizers of disjoint segments generate an unbounded subgroup".into(),
            ));
        }
        SegmentStabilizer::new(self.spec, common)
    }

    fn rel_index(&self, a: &SegmentStabilizer, b: &SegmentStabilizer) -> Result<IndexValue> {
        a.stab_index(b)
    }

    fn equal(&self, a: &SegmentStabilizer, b: &SegmentStabilizer) -> bool {
        a == b
    }

    /// Projects the start configuration onto the minimal-displacement set
    /// (fixed subtree or translation axis) and fixes the segment between a
    /// projected vertex and its image. The measured index there must equal
    /// q^(translation length) from the motion classification.
    fn tidy(
        &self,
        g: &TreeAuto,
        start: &SegmentStabilizer,
    ) -> Result<TidyCertificate<SegmentStabilizer>> {
        let (_, ell, vdisp) = classify(self.spec, &g.mat)?;
        let q = self.spec.residue_size();
        let mut best: Option<(u64, TreeVertex)> = None;
        for v in start.verts() {
            let d = v.distance(&v.apply(&g.mat)?)?;
            if best.as_ref().map_or(true, |(bd, _)| d < *bd) {
                best = Some((d, v.clone()));
            }
        }
        let (d0, vstar) = best.expect("stabilizers fix a nonempty set");
        if d0 < vdisp || (d0 - vdisp) % 2 != 0 {
            return Err(Error::OracleDisagreement {
                context: "displacement of a vertex versus the minimal displacement".into(),
                computed: d0.to_string(),
                oracle: format!("{vdisp} plus an even offset"),
            });
        }
        let gv = vstar.apply(&g.mat)?;
        let path = vstar.geodesic(&gv)?;
        let a = path[((d0 - vdisp) / 2) as usize].clone();
        let tidy = if vdisp == 0 {
            SegmentStabilizer::vertex(self.spec, a)?
        } else {
            // translated or swapped edge segment between a and its image
            let ga = a.apply(&g.mat)?;
            SegmentStabilizer::new(self.spec, vec![a, ga])?
        };
        let input_index = self.rel_index(&self.apply(g, start)?, start)?;
        let minimized_index = self.rel_index(&self.apply(g, &tidy)?, &tidy)?;
        let expected = IndexValue::prime_power(q, ell);
        if minimized_index != expected {
            return Err(Error::OracleDisagreement {
                context: "index at the axis segment versus the translation length".into(),
                computed: minimized_index.to_string(),
                oracle: expected.to_string(),
            });
        }
        let plus = self.plus_part(g, &tidy, CHAIN_CAP)?;
        let minus = self.minus_part(g, &tidy, CHAIN_CAP)?;
        let ta_held = self.product_equals(&tidy, &plus.subgroup, &minus.subgroup)?;
        let core = self.meet(&plus.subgroup, &minus.subgroup)?;
        let tb_held = core.subgroup_of(&tidy);
        Ok(TidyCertificate {
            input: start.clone(),
            tidy,
            depth: plus.depth.max(minus.depth),
            input_index,
            minimized_index,
            plus_part: Some(plus.subgroup),
            minus_part: Some(minus.subgroup),
            core: Some(core),
            ta_held,
            tb_held,
        })
    }

    /// Chain of stabilizers of the forward-extended segment; the increment
    /// becoming constant certifies that each further step scales the index
    /// by the same cone count, the segment analogue of stabilization.
    fn plus_part(
        &self,
        g: &TreeAuto,
        v: &SegmentStabilizer,
        max_depth: usize,
    ) -> Result<ChainLimit<SegmentStabilizer>> {
        let mut current = v.clone();
        let mut image = v.clone();
        let mut prev: Option<IndexValue> = None;
        for depth in 1..=max_depth {
            image = self.apply(g, &image)?;
            let next = current.meet(&image)?;
            let inc = self.rel_index(&current, &next)?;
            if prev.as_ref() == Some(&inc) {
                return Ok(ChainLimit {
                    subgroup: current,
                    depth: depth - 1,
                    truncated: false,
                });
            }
            prev = Some(inc);
            current = next;
        }
        Err(Error::NoStabilization { max_depth })
    }

    fn scale(&self, g: &TreeAuto) -> Result<IndexValue> {
        // tidy() measures the index at the axis segment and cross-checks it
        // against the polygon classification and the ball-search oracle
        let cert = self.tidy(g, &self.base())?;
        Ok(cert.minimized_index)
    }
}

/// Scales of two vertex-fixing matrices and of their product, which
/// translates: scale is not submultiplicative on these groups.
pub fn elliptic_product_scales(
    spec: LocalFieldSpec,
) -> Result<(IndexValue, IndexValue, IndexValue)> {
    let m = TreeModel::new(spec);
    let one = spec.one();
    let zero = spec.zero();
    let pi = spec.uniformizer();
    let x = Mat::from_rows(
        spec,
        vec![
            vec![zero.clone(), spec.neg(&one)],
            vec![one.clone(), zero.clone()],
        ],
    );
    let y = Mat::from_rows(
        spec,
        vec![
            vec![zero.clone(), spec.inv(&pi)?],
            vec![spec.neg(&pi), zero.clone()],
        ],
    );
    let sx = m.scale(&TreeAuto::new(spec, x.clone())?)?;
    let sy = m.scale(&TreeAuto::new(spec, y.clone())?)?;
    let sxy = m.scale(&TreeAuto::new(spec, x.mul(&y))?)?;
    if !sx.is_one() || !sy.is_one() {
        return Err(Error::OracleDisagreement {
            context: "scales of the two vertex-fixing factors".into(),
            computed: format!("{sx}, {sy}"),
            oracle: "1, 1".into(),
        });
    }
    let expected = IndexValue::prime_power(spec.residue_size(), 2);
    if sxy != expected {
        return Err(Error::OracleDisagreement {
            context: "scale of the product of the two factors".into(),
            computed: sxy.to_string(),
            oracle: expected.to_string(),
        });
    }
    Ok((sx, sy, sxy))
}

#[derive(Debug, Clone)]
pub struct ProbeStep {
    pub k: u64,
    pub displacement: Displacement,
    pub scale: IndexValue,
}

/// Displacements of the base subgroup under the unipotent family
/// [[1, pi^-k], [0, 1]]: every member has scale one, yet the displacement
/// grows without bound, so no single compact open subgroup works for the
/// whole family.
pub fn unipotent_displacement_probe(spec: LocalFieldSpec, k_max: u64) -> Result<Vec<ProbeStep>> {
    let m = TreeModel::new(spec);
    let q = spec.residue_size();
    let v0 = m.base();
    let mut out = vec![];
    let mut prev_product = IndexValue::one();
    for k in 0..=k_max {
        let u = Mat::from_rows(
            spec,
            vec![
                vec![spec.one(), spec.uniformizer_pow(-(k as i64))],
                vec![spec.zero(), spec.one()],
            ],
        );
        let elem = TreeAuto::new(spec, u)?;
        let moved = m.apply(&elem, &v0)?;
        let disp = m.displacement(&moved, &v0)?;
        let expected = if k == 0 {
            IndexValue::one()
        } else {
            IndexValue::from_u64(q + 1)?.mul(&IndexValue::prime_power(q, 2 * k - 1))
        };
        if disp.left != expected || disp.right != expected {
            return Err(Error::OracleDisagreement {
                context: format!("one-sided displacement of the base subgroup at k = {k}"),
                computed: format!("{}, {}", disp.left, disp.right),
                oracle: expected.to_string(),
            });
        }
        if k > 0 && disp.product <= prev_product {
            return Err(Error::OracleDisagreement {
                context: "displacement growth along the unipotent family".into(),
                computed: disp.product.to_string(),
                oracle: format!("> {prev_product}"),
            });
        }
        prev_product = disp.product.clone();
        let scale = m.scale(&elem)?;
        if !scale.is_one() {
            return Err(Error::OracleDisagreement {
                context: format!("scale of the unipotent at k = {k}"),
                computed: scale.to_string(),
                oracle: "1".into(),
            });
        }
        out.push(ProbeStep {
            k,
            displacement: disp,
            scale,
        });
    }
    Ok(out)
}
