//! The lamp group over the integers: pairs of a shift and a finite set of
//! lit positions, marked by the subgroup of shiftless configurations that
//! are dark at the origin. Conjugation translates lamp configurations, so
//! the marked subgroup meets each conjugate with index one or two, and left
//! cosets carry the finite closed-form key (shift, bit at the shift). All
//! completion data below is read off exact finite coset tables.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::index::IndexValue;

/// Element with shift `t` and lit positions `lamps`; composing puts the
/// second factor's lamps down after moving by the first factor's shift.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LampElem {
    pub shift: i64,
    pub lamps: BTreeSet<i64>,
}

impl LampElem {
    pub fn new(shift: i64, lamps: impl IntoIterator<Item = i64>) -> Self {
        LampElem {
            shift,
            lamps: lamps.into_iter().collect(),
        }
    }

    pub fn identity() -> Self {
        LampElem::new(0, [])
    }

    pub fn translation(shift: i64) -> Self {
        LampElem::new(shift, [])
    }

    pub fn is_identity(&self) -> bool {
        self.shift == 0 && self.lamps.is_empty()
    }

    /// Membership in the marked subgroup: no shift and the origin dark.
    pub fn is_pinned(&self) -> bool {
        self.shift == 0 && !self.lamps.contains(&0)
    }

    /// Membership in the doubly marked subgroup: no shift, origin and its
    /// right neighbor both dark.
    pub fn is_double_pinned(&self) -> bool {
        self.shift == 0 && !self.lamps.contains(&0) && !self.lamps.contains(&1)
    }

    pub fn compose(&self, other: &LampElem) -> LampElem {
        let mut lamps = self.lamps.clone();
        for &p in &other.lamps {
            let q = p + self.shift;
            if !lamps.remove(&q) {
                lamps.insert(q);
            }
        }
        LampElem {
            shift: self.shift + other.shift,
            lamps,
        }
    }

    pub fn invert(&self) -> LampElem {
        LampElem {
            shift: -self.shift,
            lamps: self.lamps.iter().map(|&p| p - self.shift).collect(),
        }
    }

    /// Key of the left coset of the pinned subgroup: right multiplication
    /// can toggle every lamp except the one at the shift position.
    pub fn coset_key(&self) -> (i64, bool) {
        (self.shift, self.lamps.contains(&self.shift))
    }

    /// Left action on pinned-coset keys; agrees with keying the product.
    pub fn act(&self, key: (i64, bool)) -> (i64, bool) {
        let s = self.shift + key.0;
        (s, self.lamps.contains(&s) ^ key.1)
    }

    /// Key of the left coset of the doubly pinned subgroup.
    pub fn double_key(&self) -> (i64, bool, bool) {
        (
            self.shift,
            self.lamps.contains(&self.shift),
            self.lamps.contains(&(self.shift + 1)),
        )
    }

    /// Left action on doubly-pinned-coset keys.
    pub fn double_act(&self, key: (i64, bool, bool)) -> (i64, bool, bool) {
        let s = self.shift + key.0;
        (
            s,
            self.lamps.contains(&s) ^ key.1,
            self.lamps.contains(&(s + 1)) ^ key.2,
        )
    }
}

/// [pinned : pinned meet conjugate of pinned] for the conjugate by `g`, as
/// the size of the orbit of the coset g*pinned under the pinned subgroup.
/// Only the lamp generator at the key's shift position can move a key, so
/// the generator window must reach that position or the orbit is not
/// saturated. The result is cross-checked against the direct count: the
/// conjugate pins the lamp at the shift instead of the origin, so the
/// intersection drops one extra bit exactly when the shift is nonzero.
pub fn pinned_orbit_index(g: &LampElem, radius: i64) -> Result<IndexValue> {
    if radius < 0 {
        return Err(Error::ConfigInvalid(
            "orbit generator radius must be nonnegative".into(),
        ));
    }
    let start = g.coset_key();
    if start.0 != 0 && start.0.abs() > radius {
        return Err(Error::OrbitNotSaturated {
            radius: radius as usize,
        });
    }
    let mut seen = BTreeSet::from([start]);
    let mut frontier = VecDeque::from([start]);
    while let Some(key) = frontier.pop_front() {
        for p in -radius..=radius {
            if p == 0 {
                continue;
            }
            let next = LampElem::new(0, [p]).act(key);
            if seen.insert(next) {
                frontier.push_back(next);
            }
        }
    }
    let computed = IndexValue::from_u64(seen.len() as u64)?;
    let oracle = if g.shift == 0 {
        IndexValue::one()
    } else {
        IndexValue::prime_power(2, 1)
    };
    if computed != oracle {
        return Err(Error::OracleDisagreement {
            context: "pinned-subgroup orbit index against the conjugate intersection count".into(),
            computed: computed.to_string(),
            oracle: oracle.to_string(),
        });
    }
    Ok(computed)
}

/// Finite shadow of the completion: the coset table wrapped onto a cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FingerprintReport {
    pub points: usize,
    pub order: u64,
    pub closed_form: u64,
}

/// Order of the permutation group generated by the images of the shift and
/// the origin lamp on coset keys with shifts folded modulo 2m+1. The images
/// generate all lamp toggles over the cycle joined with the rotation, so
/// the closure must have order (2m+1) * 2^(2m+1); the closure is counted by
/// plain breadth-first multiplication and compared against that form.
pub fn completion_fingerprint(m: i64) -> Result<FingerprintReport> {
    if !(1..=4).contains(&m) {
        return Err(Error::ConfigInvalid(
            "fingerprint cycle parameter must be between 1 and 4".into(),
        ));
    }
    let n = (2 * m + 1) as usize;
    let points = 2 * n;
    // point (s, b) lives at slot 2s + b
    let rotate: Vec<u8> = (0..points)
        .map(|i| (2 * ((i / 2 + 1) % n) + i % 2) as u8)
        .collect();
    let rotate_back: Vec<u8> = (0..points)
        .map(|i| (2 * ((i / 2 + n - 1) % n) + i % 2) as u8)
        .collect();
    let toggle: Vec<u8> = (0..points)
        .map(|i| if i / 2 == 0 { (1 - i % 2) as u8 } else { i as u8 })
        .collect();
    let order = permutation_closure(&[rotate, rotate_back, toggle], points);
    let closed_form = n as u64 * (1u64 << n);
    if order != closed_form {
        return Err(Error::OracleDisagreement {
            context: "wrapped coset-table closure against the cycle wreath order".into(),
            computed: order.to_string(),
            oracle: closed_form.to_string(),
        });
    }
    Ok(FingerprintReport {
        points,
        order,
        closed_form,
    })
}

fn permutation_closure(gens: &[Vec<u8>], points: usize) -> u64 {
    let id: Vec<u8> = (0..points as u8).collect();
    let mut seen = BTreeSet::from([id.clone()]);
    let mut frontier = VecDeque::from([id]);
    while let Some(p) = frontier.pop_front() {
        for g in gens {
            let q: Vec<u8> = (0..points).map(|i| g[p[i] as usize]).collect();
            if seen.insert(q.clone()) {
                frontier.push_back(q);
            }
        }
    }
    seen.len() as u64
}

/// Projection data between the doubly pinned and the pinned coset tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NestedCosetReport {
    pub fine_table: usize,
    pub coarse_table: usize,
    pub fiber_size: usize,
    pub equivariant: bool,
    pub kernel_trivial: bool,
    pub coarse_trivial_count: usize,
    pub swapped_spurious_count: usize,
}

/// Dropping the neighbor bit projects doubly-pinned-coset keys onto
/// pinned-coset keys equivariantly. The fine table is cut at radius m and
/// the coarse table at radius m+1: one-step elements then never walk a fine
/// key off the coarse table, and every window element trivial on the coarse
/// table is trivial on the fine one. With the radii swapped, a boundary
/// lamp moves the large fine table while the small coarse table cannot see
/// it; those artifacts are counted in `swapped_spurious_count` and are the
/// reason the coarse table must be the wider one.
pub fn nested_pinned_projection(m: i64) -> Result<NestedCosetReport> {
    if !(1..=6).contains(&m) {
        return Err(Error::ConfigInvalid(
            "nested projection table radius must be between 1 and 6".into(),
        ));
    }
    let fine_table = 4 * (2 * m + 1) as usize;
    let coarse_table = 2 * (2 * m + 3) as usize;

    let mut gens = vec![LampElem::translation(1), LampElem::translation(-1)];
    for p in -(m + 1)..=(m + 1) {
        gens.push(LampElem::new(0, [p]));
    }
    let mut equivariant = true;
    for g in &gens {
        for s in -m..=m {
            for bits in 0..4u8 {
                let key = (s, bits & 1 != 0, bits & 2 != 0);
                let moved = g.double_act(key);
                if moved.0.abs() > m + 1 {
                    equivariant = false;
                }
                if (moved.0, moved.1) != g.act((key.0, key.1)) {
                    equivariant = false;
                }
            }
        }
    }

    // one-step window family: shifts of size at most one, lamps inside the
    // coarse window
    let window: Vec<i64> = (-(m + 1)..=(m + 1)).collect();
    let mut coarse_trivial_count = 0usize;
    let mut kernel_trivial = true;
    let mut swapped_spurious_count = 0usize;
    for t in -1..=1i64 {
        for mask in 0u32..(1 << window.len()) {
            let lamps = window
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &p)| p);
            let g = LampElem::new(t, lamps);
            let coarse_trivial = (-(m + 1)..=(m + 1))
                .all(|s| [false, true].iter().all(|&b| g.act((s, b)) == (s, b)));
            let fine_trivial_small = (-m..=m).all(|s| {
                (0..4u8).all(|bits| {
                    let k = (s, bits & 1 != 0, bits & 2 != 0);
                    g.double_act(k) == k
                })
            });
            if coarse_trivial {
                coarse_trivial_count += 1;
                if !fine_trivial_small {
                    kernel_trivial = false;
                }
            }
            // radii swapped: coarse cut at m, fine cut at m+1
            let coarse_trivial_small =
                (-m..=m).all(|s| [false, true].iter().all(|&b| g.act((s, b)) == (s, b)));
            let fine_trivial_large = (-(m + 1)..=(m + 1)).all(|s| {
                (0..4u8).all(|bits| {
                    let k = (s, bits & 1 != 0, bits & 2 != 0);
                    g.double_act(k) == k
                })
            });
            if coarse_trivial_small && !fine_trivial_large {
                swapped_spurious_count += 1;
            }
        }
    }

    // index of the doubly pinned subgroup inside the pinned one, by keying
    // pinned window elements
    let mut pinned_cosets = BTreeSet::new();
    for mask in 0u32..(1 << window.len()) {
        let lamps = window
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &p)| p);
        let u = LampElem::new(0, lamps);
        if u.is_pinned() {
            pinned_cosets.insert(u.double_key());
        }
    }

    Ok(NestedCosetReport {
        fine_table,
        coarse_table,
        fiber_size: pinned_cosets.len(),
        equivariant,
        kernel_trivial,
        coarse_trivial_count,
        swapped_spurious_count,
    })
}

/// Projection data from the pinned coset table onto the shift quotient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LampKernelReport {
    pub coarse_translation: bool,
    pub kernel_is_lamp_part: bool,
    pub kernel_bit_action: bool,
    pub fiber_size: usize,
}

/// The full lamp subgroup is normal with infinite cyclic quotient. On the
/// quotient every element acts by translation by its shift; the elements
/// acting trivially there are exactly the shiftless ones, and such an
/// element moves the pinned-coset column at position s through the single
/// lamp bit it carries at s. Actions are evaluated through composition, not
/// through the key formula, so the checks exercise the group law.
pub fn lamp_quotient_projection(m: i64) -> Result<LampKernelReport> {
    if !(1..=6).contains(&m) {
        return Err(Error::ConfigInvalid(
            "quotient projection table radius must be between 1 and 6".into(),
        ));
    }
    let window: Vec<i64> = (-(m + 1)..=(m + 1)).collect();
    let mut coarse_translation = true;
    let mut kernel_is_lamp_part = true;
    let mut kernel_bit_action = true;
    for t in -1..=1i64 {
        for mask in 0u32..(1 << window.len()) {
            let lamps = window
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &p)| p);
            let g = LampElem::new(t, lamps);
            let mut trivial_on_quotient = true;
            for s in -(m + 1)..=(m + 1) {
                for b in [false, true] {
                    let rep = if b {
                        LampElem::new(s, [s])
                    } else {
                        LampElem::translation(s)
                    };
                    let product = g.compose(&rep);
                    if product.shift != t + s {
                        coarse_translation = false;
                    }
                    if product.shift != s {
                        trivial_on_quotient = false;
                    }
                }
            }
            if trivial_on_quotient != (t == 0) {
                kernel_is_lamp_part = false;
            }
            if trivial_on_quotient {
                for s in -m..=m {
                    let flip = g.lamps.contains(&s);
                    for b in [false, true] {
                        let rep = if b {
                            LampElem::new(s, [s])
                        } else {
                            LampElem::translation(s)
                        };
                        if g.compose(&rep).coset_key() != (s, flip ^ b) {
                            kernel_bit_action = false;
                        }
                    }
                }
            }
        }
    }

    // index of the pinned subgroup inside the full lamp subgroup
    let mut cosets = BTreeSet::new();
    for mask in 0u32..(1 << window.len()) {
        let lamps = window
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &p)| p);
        cosets.insert(LampElem::new(0, lamps).coset_key());
    }

    Ok(LampKernelReport {
        coarse_translation,
        kernel_is_lamp_part,
        kernel_bit_action,
        fiber_size: cosets.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(shift: i64, lamps: &[i64]) -> LampElem {
        LampElem::new(shift, lamps.iter().copied())
    }

    #[test]
    fn group_laws_hold_and_conjugation_translates_lamps() {
        let a = e(2, &[0, 3]);
        let b = e(-1, &[1]);
        let c = e(4, &[-2, 2]);
        assert_eq!(a.compose(&a.invert()), LampElem::identity());
        assert_eq!(a.invert().compose(&a), LampElem::identity());
        assert_eq!(
            a.compose(&b).compose(&c),
            a.compose(&b.compose(&c))
        );
        let f = e(0, &[1, 4]);
        let conj = a.compose(&f).compose(&a.invert());
        assert_eq!(conj, e(0, &[3, 6]));
    }

    #[test]
    fn coset_keys_agree_with_subgroup_membership() {
        let samples = [
            e(0, &[]),
            e(0, &[0]),
            e(1, &[]),
            e(1, &[1]),
            e(1, &[0]),
            e(-2, &[-2, 5]),
            e(3, &[1]),
            e(3, &[3, 1]),
        ];
        for g in &samples {
            for h in &samples {
                let same_pinned = g.invert().compose(h).is_pinned();
                assert_eq!(same_pinned, g.coset_key() == h.coset_key());
                let same_double = g.invert().compose(h).is_double_pinned();
                assert_eq!(same_double, g.double_key() == h.double_key());
            }
        }
    }

    #[test]
    fn key_actions_match_composition() {
        let gs = [e(1, &[0]), e(-2, &[1, -1]), e(0, &[2]), e(3, &[3, 4])];
        let reps = [e(0, &[]), e(2, &[2]), e(-1, &[0]), e(4, &[4, 5])];
        for g in &gs {
            for r in &reps {
                assert_eq!(g.act(r.coset_key()), g.compose(r).coset_key());
                assert_eq!(g.double_act(r.double_key()), g.compose(r).double_key());
            }
        }
    }

    #[test]
    fn orbit_index_is_two_exactly_for_moving_elements() {
        let two = IndexValue::prime_power(2, 1);
        assert_eq!(pinned_orbit_index(&e(1, &[]), 4).unwrap(), two);
        assert_eq!(pinned_orbit_index(&e(1, &[0, 7]), 4).unwrap(), two);
        assert_eq!(pinned_orbit_index(&e(-3, &[2]), 4).unwrap(), two);
        assert_eq!(pinned_orbit_index(&e(0, &[5]), 4).unwrap(), IndexValue::one());
        assert_eq!(
            pinned_orbit_index(&LampElem::identity(), 4).unwrap(),
            IndexValue::one()
        );
        assert_eq!(
            pinned_orbit_index(&e(6, &[]), 4),
            Err(Error::OrbitNotSaturated { radius: 4 })
        );
    }

    #[test]
    fn fingerprint_orders_are_frozen() {
        assert_eq!(completion_fingerprint(1).unwrap().order, 24);
        assert_eq!(completion_fingerprint(2).unwrap().order, 160);
        assert_eq!(completion_fingerprint(3).unwrap().order, 896);
        let r = completion_fingerprint(2).unwrap();
        assert_eq!(r.points, 10);
        assert_eq!(r.order, r.closed_form);
        assert!(completion_fingerprint(0).is_err());
        assert!(completion_fingerprint(5).is_err());
    }

    #[test]
    fn nested_projection_needs_the_radius_offset() {
        for m in 1..=3 {
            let r = nested_pinned_projection(m).unwrap();
            assert_eq!(r.fine_table, 4 * (2 * m as usize + 1));
            assert_eq!(r.coarse_table, 2 * (2 * m as usize + 3));
            assert!(r.equivariant);
            assert!(r.kernel_trivial);
            assert_eq!(r.fiber_size, 2);
            // identity is the only window element trivial on the wide table
            assert_eq!(r.coarse_trivial_count, 1);
            // swapping the radii fabricates three boundary kernel elements
            assert_eq!(r.swapped_spurious_count, 3);
        }
    }

    #[test]
    fn lamp_quotient_is_translation_with_bitflip_kernel() {
        for m in 1..=3 {
            let r = lamp_quotient_projection(m).unwrap();
            assert!(r.coarse_translation);
            assert!(r.kernel_is_lamp_part);
            assert!(r.kernel_bit_action);
            assert_eq!(r.fiber_size, 2);
        }
    }
}
