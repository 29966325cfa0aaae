//! Transfer of a subgroup homomorphism into a wreath product: a map defined
//! on an index-two subgroup induces, through a transversal, a homomorphism
//! of the whole group into the two-fold wreath product of the target. Both
//! desk instances are checked exhaustively on their product tables, and
//! broken inputs are refused: representatives that miss a coset raise
//! NotTransversal, maps that fail the product law raise NotHomomorphism.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Outcome of a transfer check. All flags report checks that were run to
/// completion; failures of the two input preconditions surface as errors
/// instead. The kernel index is recomputed from scratch and compared with
/// the image order, which the first isomorphism theorem forces to agree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WreathCheck {
    pub transversal_held: bool,
    pub homomorphism_held: bool,
    pub cocycle_held: bool,
    pub projection_held: bool,
    pub image_order: u64,
    pub kernel_index: u64,
}

/// Wreath element over two cosets: a lamp pair with entries modulo `modulus`
/// and a swap bit; the first factor's lamps are read through the second
/// factor's swap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct W2 {
    lamps: [u8; 2],
    swap: bool,
    modulus: u8,
}

impl W2 {
    fn identity(modulus: u8) -> W2 {
        W2 {
            lamps: [0, 0],
            swap: false,
            modulus,
        }
    }

    fn mul(&self, other: &W2) -> W2 {
        let pick = |x: usize| {
            if other.swap {
                self.lamps[1 - x]
            } else {
                self.lamps[x]
            }
        };
        W2 {
            lamps: [
                (pick(0) + other.lamps[0]) % self.modulus,
                (pick(1) + other.lamps[1]) % self.modulus,
            ],
            swap: self.swap ^ other.swap,
            modulus: self.modulus,
        }
    }
}

fn closure(gens: &[W2], modulus: u8) -> u64 {
    let mut seen = BTreeSet::from([W2::identity(modulus)]);
    let mut frontier = vec![W2::identity(modulus)];
    while let Some(w) = frontier.pop() {
        for g in gens {
            let next = w.mul(g);
            if seen.insert(next) {
                frontier.push(next);
            }
        }
    }
    seen.len() as u64
}

/// The integers over the even integers, with the halving map to the order
/// two group: even d goes to d/2 modulo 2. The image is the cyclic group of
/// order four inside the eight-element wreath product, and the kernel is
/// the multiples of four.
pub fn integer_mod_two_transfer() -> Result<WreathCheck> {
    integer_transfer_with([0, 1], |d| (d.rem_euclid(4) / 2) as u8)
}

/// Same construction with an arbitrary transversal and subgroup map, kept
/// separate so breakage is observable.
pub fn integer_transfer_with(
    transversal: [i64; 2],
    phi: impl Fn(i64) -> u8,
) -> Result<WreathCheck> {
    let coset = |g: i64| g.rem_euclid(2) as usize;
    for (x, t) in transversal.iter().enumerate() {
        if coset(*t) != x {
            return Err(Error::NotTransversal(format!(
                "representative {t} does not lie in coset {x}"
            )));
        }
    }
    for a in (-8..=8i64).map(|k| 2 * k) {
        for b in (-8..=8i64).map(|k| 2 * k) {
            if (phi(a) % 2 + phi(b) % 2) % 2 != phi(a + b) % 2 {
                return Err(Error::NotHomomorphism(format!(
                    "subgroup map breaks at {a} + {b}"
                )));
            }
        }
    }

    let transfer = |g: i64| -> Result<W2> {
        let mut lamps = [0u8; 2];
        let mut sigma = [0usize; 2];
        for (x, slot) in sigma.iter_mut().enumerate() {
            let s = coset(g + transversal[x]);
            *slot = s;
            let d = g + transversal[x] - transversal[s];
            if d.rem_euclid(2) != 0 {
                return Err(Error::NotTransversal(format!(
                    "cocycle value {d} escapes the subgroup"
                )));
            }
            lamps[x] = phi(d) % 2;
        }
        if sigma[0] == sigma[1] {
            return Err(Error::NotTransversal(
                "coset action is not a permutation".into(),
            ));
        }
        Ok(W2 {
            lamps,
            swap: sigma[0] == 1,
            modulus: 2,
        })
    };

    let mut cocycle_held = true;
    let mut projection_held = true;
    for g in -8..=8i64 {
        let wg = transfer(g)?;
        if wg.swap != (coset(g) == 1) {
            projection_held = false;
        }
        for h in -8..=8i64 {
            let wh = transfer(h)?;
            let wgh = transfer(g + h)?;
            if wg.mul(&wh) != wgh {
                return Err(Error::NotHomomorphism(format!(
                    "transfer breaks at {g} * {h}"
                )));
            }
            for x in 0..2 {
                let sx = if wh.swap { 1 - x } else { x };
                if (wg.lamps[sx] + wh.lamps[x]) % 2 != wgh.lamps[x] {
                    cocycle_held = false;
                }
            }
        }
    }

    let image_order = closure(&[transfer(1)?, transfer(-1)?], 2);
    let mut kernel_index = 0u64;
    for n in 1..=16i64 {
        if transfer(n)? == W2::identity(2) {
            kernel_index = n as u64;
            break;
        }
    }
    if kernel_index != image_order {
        return Err(Error::OracleDisagreement {
            context: "image order of the transferred map against its kernel period".into(),
            computed: image_order.to_string(),
            oracle: kernel_index.to_string(),
        });
    }
    Ok(WreathCheck {
        transversal_held: true,
        homomorphism_held: true,
        cocycle_held,
        projection_held,
        image_order,
        kernel_index,
    })
}

type Perm3 = [u8; 3];

fn p3_mul(a: Perm3, b: Perm3) -> Perm3 {
    [
        a[b[0] as usize],
        a[b[1] as usize],
        a[b[2] as usize],
    ]
}

fn p3_inv(a: Perm3) -> Perm3 {
    let mut out = [0u8; 3];
    for (i, &v) in a.iter().enumerate() {
        out[v as usize] = i as u8;
    }
    out
}

fn p3_sign(a: Perm3) -> usize {
    let mut inversions = 0;
    for i in 0..3 {
        for j in i + 1..3 {
            if a[i] > a[j] {
                inversions += 1;
            }
        }
    }
    inversions % 2
}

const S3: [Perm3; 6] = [
    [0, 1, 2],
    [1, 2, 0],
    [2, 0, 1],
    [1, 0, 2],
    [0, 2, 1],
    [2, 1, 0],
];

/// The symmetric group on three letters over its rotation subgroup, with
/// the rotation count as the map to the order three group. The transfer is
/// injective: the image has order six inside the eighteen-element wreath
/// product, checked over all thirty-six products.
pub fn symmetric_three_transfer() -> Result<WreathCheck> {
    symmetric_three_transfer_with([[0, 1, 2], [1, 0, 2]], |p| p[0])
}

pub fn symmetric_three_transfer_with(
    transversal: [Perm3; 2],
    phi: impl Fn(Perm3) -> u8,
) -> Result<WreathCheck> {
    for (x, t) in transversal.iter().enumerate() {
        if p3_sign(*t) != x {
            return Err(Error::NotTransversal(format!(
                "representative {t:?} does not lie in coset {x}"
            )));
        }
    }
    let rotations: Vec<Perm3> = S3.iter().copied().filter(|p| p3_sign(*p) == 0).collect();
    for &a in &rotations {
        for &b in &rotations {
            if (phi(a) % 3 + phi(b) % 3) % 3 != phi(p3_mul(a, b)) % 3 {
                return Err(Error::NotHomomorphism(format!(
                    "subgroup map breaks at {a:?} * {b:?}"
                )));
            }
        }
    }

    let transfer = |g: Perm3| -> Result<W2> {
        let mut lamps = [0u8; 2];
        let mut sigma = [0usize; 2];
        for (x, slot) in sigma.iter_mut().enumerate() {
            let s = p3_sign(p3_mul(g, transversal[x]));
            *slot = s;
            let d = p3_mul(p3_inv(transversal[s]), p3_mul(g, transversal[x]));
            if p3_sign(d) != 0 {
                return Err(Error::NotTransversal(format!(
                    "cocycle value {d:?} escapes the subgroup"
                )));
            }
            lamps[x] = phi(d) % 3;
        }
        if sigma[0] == sigma[1] {
            return Err(Error::NotTransversal(
                "coset action is not a permutation".into(),
            ));
        }
        Ok(W2 {
            lamps,
            swap: sigma[0] == 1,
            modulus: 3,
        })
    };

    let mut cocycle_held = true;
    let mut projection_held = true;
    for &g in &S3 {
        let wg = transfer(g)?;
        if wg.swap != (p3_sign(g) == 1) {
            projection_held = false;
        }
        for &h in &S3 {
            let wh = transfer(h)?;
            let wgh = transfer(p3_mul(g, h))?;
            if wg.mul(&wh) != wgh {
                return Err(Error::NotHomomorphism(format!(
                    "transfer breaks at {g:?} * {h:?}"
                )));
            }
            for x in 0..2 {
                let sx = if wh.swap { 1 - x } else { x };
                if (wg.lamps[sx] + wh.lamps[x]) % 3 != wgh.lamps[x] {
                    cocycle_held = false;
                }
            }
        }
    }

    let images: Vec<W2> = S3
        .iter()
        .map(|&g| transfer(g))
        .collect::<Result<_>>()?;
    let image_order = closure(&images, 3);
    let kernel_size = images
        .iter()
        .filter(|w| **w == W2::identity(3))
        .count() as u64;
    let kernel_index = S3.len() as u64 / kernel_size;
    if kernel_index != image_order {
        return Err(Error::OracleDisagreement {
            context: "image order of the transferred map against its kernel count".into(),
            computed: image_order.to_string(),
            oracle: kernel_index.to_string(),
        });
    }
    Ok(WreathCheck {
        transversal_held: true,
        homomorphism_held: true,
        cocycle_held,
        projection_held,
        image_order,
        kernel_index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_transfer_lands_in_the_order_four_cycle() {
        let r = integer_mod_two_transfer().unwrap();
        assert!(r.transversal_held);
        assert!(r.homomorphism_held);
        assert!(r.cocycle_held);
        assert!(r.projection_held);
        assert_eq!(r.image_order, 4);
        assert_eq!(r.kernel_index, 4);
    }

    #[test]
    fn symmetric_transfer_embeds_the_whole_group() {
        let r = symmetric_three_transfer().unwrap();
        assert!(r.cocycle_held);
        assert!(r.projection_held);
        assert_eq!(r.image_order, 6);
        assert_eq!(r.kernel_index, 6);
    }

    #[test]
    fn alternate_transversals_give_the_same_invariants() {
        let r = integer_transfer_with([2, -3], |d| (d.rem_euclid(4) / 2) as u8).unwrap();
        assert_eq!(r.image_order, 4);
        assert_eq!(r.kernel_index, 4);
        let r = symmetric_three_transfer_with([[1, 2, 0], [2, 1, 0]], |p| p[0]).unwrap();
        assert_eq!(r.image_order, 6);
        assert_eq!(r.kernel_index, 6);
    }

    #[test]
    fn broken_inputs_are_refused() {
        // both representatives even: not a transversal
        assert!(matches!(
            integer_transfer_with([0, 2], |d| (d.rem_euclid(4) / 2) as u8),
            Err(Error::NotTransversal(_))
        ));
        // shifted halving map: not a homomorphism on the even integers
        assert!(matches!(
            integer_transfer_with([0, 1], |d| ((d.rem_euclid(4) / 2) as u8 + 1) % 2),
            Err(Error::NotHomomorphism(_))
        ));
        assert!(matches!(
            symmetric_three_transfer_with([[0, 1, 2], [1, 2, 0]], |p| p[0]),
            Err(Error::NotTransversal(_))
        ));
        assert!(matches!(
            symmetric_three_transfer_with([[0, 1, 2], [1, 0, 2]], |_| 1),
            Err(Error::NotHomomorphism(_))
        ));
    }
}
