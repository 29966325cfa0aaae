//! Marked arithmetic pair: determinant-one two-by-two matrices with p-power
//! denominators over the subgroup of integral ones. A left coset of the
//! integral subgroup is exactly the image of the standard rank-two module
//! over the p-adic integers, held in canonical basis form, so orbit indices
//! and coset growth are computed on exact module keys and cross-checked
//! against congruence counts and tree sphere enumeration.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::field::LocalFieldSpec;
use crate::index::IndexValue;
use crate::lattice::mat::Mat;
use crate::lattice::Lattice;
use crate::tree::sphere_size_by_enumeration;

pub struct ArithmeticPair {
    spec: LocalFieldSpec,
}

impl ArithmeticPair {
    pub fn new(p: u64, precision: i64) -> Result<ArithmeticPair> {
        Ok(ArithmeticPair {
            spec: LocalFieldSpec::padic(p, precision)?,
        })
    }

    pub fn p(&self) -> u64 {
        self.spec.residue_size()
    }

    pub fn spec(&self) -> LocalFieldSpec {
        self.spec
    }

    /// Parses a matrix and checks that its determinant is one.
    pub fn element(&self, rows: &[[&str; 2]; 2]) -> Result<Mat> {
        let rows: Vec<Vec<String>> = rows
            .iter()
            .map(|r| r.iter().map(|s| s.to_string()).collect())
            .collect();
        let g = Mat::parse(self.spec, &rows)?;
        if !self.spec.sub(&g.det(), &self.spec.one()).is_zero() {
            return Err(Error::ConfigInvalid(
                "marked-pair elements must have determinant one".into(),
            ));
        }
        Ok(g)
    }

    pub fn upper_unit(&self) -> Mat {
        self.shear(true, self.spec.from_i64(1))
    }

    pub fn lower_unit(&self) -> Mat {
        self.shear(false, self.spec.from_i64(1))
    }

    /// Unit upper shear divided by the prime.
    pub fn upper_over_p(&self) -> Mat {
        self.shear(true, self.spec.uniformizer_pow(-1))
    }

    /// diag(p^k, p^-k)
    pub fn diagonal_power(&self, k: i64) -> Mat {
        let s = self.spec;
        Mat::from_rows(
            s,
            vec![
                vec![s.uniformizer_pow(k), s.zero()],
                vec![s.zero(), s.uniformizer_pow(-k)],
            ],
        )
    }

    fn shear(&self, upper: bool, amount: crate::field::FieldElem) -> Mat {
        let s = self.spec;
        let rows = if upper {
            vec![vec![s.one(), amount], vec![s.zero(), s.one()]]
        } else {
            vec![vec![s.one(), s.zero()], vec![amount, s.one()]]
        };
        Mat::from_rows(s, rows)
    }

    pub fn base_module(&self) -> Lattice {
        Lattice::standard(self.spec, 2)
    }

    /// Canonical key of the left coset of the integral subgroup: integral
    /// matrices are exactly the determinant-one stabilizers of the standard
    /// module, so the module image is a complete coset invariant.
    pub fn coset_key(&self, g: &Mat) -> Result<String> {
        Ok(module_key(&self.base_module().apply(g)?))
    }

    fn integral_gens(&self) -> Vec<Mat> {
        vec![
            self.shear(true, self.spec.from_i64(1)),
            self.shear(true, self.spec.from_i64(-1)),
            self.shear(false, self.spec.from_i64(1)),
            self.shear(false, self.spec.from_i64(-1)),
        ]
    }

    /// Orbit of the module g*O^2 under the integral unit shears, which
    /// generate the integral subgroup. The orbit size is the index of the
    /// stabilizer, that is [integral : integral meet conjugate by g]. The
    /// budget caps the number of modules visited.
    pub fn marked_orbit(&self, g: &Mat, budget: usize) -> Result<Vec<Lattice>> {
        let start = self.base_module().apply(g)?;
        let gens = self.integral_gens();
        let mut seen = BTreeSet::from([module_key(&start)]);
        let mut orbit = vec![start.clone()];
        let mut frontier = VecDeque::from([start]);
        while let Some(lat) = frontier.pop_front() {
            for gen in &gens {
                let next = lat.apply(gen)?;
                debug_assert_eq!(next.pivot_exps().iter().sum::<i64>(), 0);
                if seen.insert(module_key(&next)) {
                    if seen.len() > budget {
                        return Err(Error::OrbitNotSaturated { radius: budget });
                    }
                    orbit.push(next.clone());
                    frontier.push_back(next);
                }
            }
        }
        Ok(orbit)
    }

    pub fn marked_orbit_index(&self, g: &Mat, budget: usize) -> Result<IndexValue> {
        IndexValue::from_u64(self.marked_orbit(g, budget)?.len() as u64)
    }

    /// The diagonal conjugation index three independent ways: the orbit
    /// count, the congruence count p^(2k-1)(p+1) of upper-triangular-mod-
    /// p^2k cosets, and the tree sphere of radius 2k.
    pub fn diagonal_index_routes(&self, k: u32, budget: usize) -> Result<(IndexValue, u64, u64)> {
        if !(1..=3).contains(&k) {
            return Err(Error::ConfigInvalid(
                "diagonal power must be between 1 and 3".into(),
            ));
        }
        let orbit = self.marked_orbit_index(&self.diagonal_power(k as i64), budget)?;
        let p = self.p();
        let congruence = p.pow(2 * k - 1) * (p + 1);
        let sphere = sphere_size_by_enumeration(p, 2 * k as u64);
        Ok((orbit, congruence, sphere))
    }

    /// Orbit route checked against both closed counts.
    pub fn diagonal_index(&self, k: u32, budget: usize) -> Result<IndexValue> {
        let (orbit, congruence, sphere) = self.diagonal_index_routes(k, budget)?;
        let oracle = IndexValue::from_u64(congruence)?;
        if orbit != oracle || congruence != sphere {
            return Err(Error::OracleDisagreement {
                context: "diagonal conjugation index against congruence and sphere counts".into(),
                computed: orbit.to_string(),
                oracle: format!("{congruence} and {sphere}"),
            });
        }
        Ok(orbit)
    }

    /// Distinct left cosets reached by words of bounded length in the unit
    /// shears and the diagonal, cumulative per word length.
    pub fn coset_ball(&self, radius: usize, budget: usize) -> Result<Vec<usize>> {
        if radius > 4 {
            return Err(Error::ConfigInvalid(
                "coset ball radius must be at most 4".into(),
            ));
        }
        let mut gens = self.integral_gens();
        gens.push(self.diagonal_power(1));
        gens.push(self.diagonal_power(-1));
        let base = self.base_module();
        let mut seen = BTreeSet::from([module_key(&base)]);
        let mut layer = vec![base];
        let mut counts = vec![seen.len()];
        for _ in 0..radius {
            let mut next_layer = vec![];
            for lat in &layer {
                for gen in &gens {
                    let next = lat.apply(gen)?;
                    debug_assert_eq!(next.pivot_exps().iter().sum::<i64>(), 0);
                    if seen.insert(module_key(&next)) {
                        if seen.len() > budget {
                            return Err(Error::OrbitNotSaturated { radius: budget });
                        }
                        next_layer.push(next);
                    }
                }
            }
            layer = next_layer;
            counts.push(seen.len());
        }
        Ok(counts)
    }
}

fn module_key(lat: &Lattice) -> String {
    format!("{:?}|{:?}", lat.pivot_exps(), lat.render_cols())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::TreeVertex;

    #[test]
    fn diagonal_orbit_matches_congruence_and_sphere_counts() {
        let pair = ArithmeticPair::new(3, 32).unwrap();
        let (orbit, congruence, sphere) = pair.diagonal_index_routes(1, 64).unwrap();
        assert_eq!(orbit, IndexValue::from_u64(12).unwrap());
        assert_eq!(congruence, 12);
        assert_eq!(sphere, 12);
        assert_eq!(
            pair.diagonal_index(2, 256).unwrap(),
            IndexValue::from_u64(108).unwrap()
        );
        let pair2 = ArithmeticPair::new(2, 32).unwrap();
        assert_eq!(
            pair2.diagonal_index(1, 32).unwrap(),
            IndexValue::from_u64(6).unwrap()
        );
    }

    #[test]
    fn shear_with_denominator_has_the_same_orbit_index() {
        let pair = ArithmeticPair::new(3, 32).unwrap();
        assert_eq!(
            pair.marked_orbit_index(&pair.upper_over_p(), 64).unwrap(),
            IndexValue::from_u64(12).unwrap()
        );
        // integral elements fix the base coset
        assert_eq!(
            pair.marked_orbit_index(&pair.upper_unit(), 8).unwrap(),
            IndexValue::one()
        );
    }

    #[test]
    fn orbit_budget_trips_before_saturation() {
        let pair = ArithmeticPair::new(3, 32).unwrap();
        let err = pair
            .marked_orbit_index(&pair.diagonal_power(1), 5)
            .unwrap_err();
        assert_eq!(err, Error::OrbitNotSaturated { radius: 5 });
    }

    #[test]
    fn orbit_modules_tile_the_even_tree_sphere() {
        let pair = ArithmeticPair::new(3, 32).unwrap();
        let orbit = pair.marked_orbit(&pair.diagonal_power(1), 64).unwrap();
        assert_eq!(orbit.len(), 12);
        let base = TreeVertex::standard(pair.spec());
        let mut keys = BTreeSet::new();
        for lat in &orbit {
            assert_eq!(lat.pivot_exps().iter().sum::<i64>(), 0);
            let v = TreeVertex::new(lat.clone()).unwrap();
            assert_eq!(v.distance(&base).unwrap(), 2);
            keys.insert(v.key());
        }
        assert_eq!(keys.len(), 12);
    }

    #[test]
    fn elements_must_have_determinant_one() {
        let pair = ArithmeticPair::new(3, 32).unwrap();
        let g = pair.element(&[["1", "1/3"], ["0", "1"]]).unwrap();
        assert_eq!(pair.coset_key(&g).unwrap(), pair.coset_key(&pair.upper_over_p()).unwrap());
        assert!(matches!(
            pair.element(&[["3", "0"], ["0", "1"]]),
            Err(Error::ConfigInvalid(_))
        ));
    }

    #[test]
    fn coset_keys_match_subgroup_membership() {
        let pair = ArithmeticPair::new(3, 32).unwrap();
        // same coset: differ by an integral element on the right
        let g = pair.diagonal_power(1);
        let h = g.mul(&pair.upper_unit());
        assert_eq!(pair.coset_key(&g).unwrap(), pair.coset_key(&h).unwrap());
        // different coset: differ by a non-integral one
        let k = g.mul(&pair.upper_over_p());
        assert_ne!(pair.coset_key(&g).unwrap(), pair.coset_key(&k).unwrap());
    }

    #[test]
    fn generator_ball_growth_is_frozen() {
        let pair = ArithmeticPair::new(3, 32).unwrap();
        let counts = pair.coset_ball(3, 4096).unwrap();
        assert!(counts.windows(2).all(|w| w[0] < w[1]));
        // length two sees only four new cosets: an upper shear of the
        // diagonal coset equals a lower shear of the inverse diagonal coset
        assert_eq!(counts, vec![1, 3, 7, 19]);
    }
}
