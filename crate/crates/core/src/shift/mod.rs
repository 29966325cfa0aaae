//! The two-sided GF(2) shift: finitely supported bit configurations on a
//! symmetric window of integer positions, the shift and mirror maps, and the
//! reversal pairing that turns annihilator patterns into linear constraints.
//! Codes (compact open subgroups) and the group model sit in the submodules.

pub mod code;
pub mod model;

pub use code::{
    conjugation_index_table, shift_invariant_code_scan, tail_detect, AnnihilatorCode,
    ScanEntry, TailVerdict,
};
pub use model::{ShiftElem, ShiftModel};

use crate::error::{Error, Result};

/// Symmetric position window [-half, half]; 2 <= half <= 31 so a row fits
/// in one u64 word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub half: i64,
}

impl Window {
    pub fn new(half: i64) -> Result<Window> {
        if !(2..=31).contains(&half) {
            return Err(Error::ConfigInvalid(
                "window half-width must be between 2 and 31".into(),
            ));
        }
        Ok(Window { half })
    }

    pub fn len(&self) -> u32 {
        (2 * self.half + 1) as u32
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn mask(&self) -> u64 {
        (1u64 << self.len()) - 1
    }

    pub fn contains(&self, l: i64) -> bool {
        l.abs() <= self.half
    }

    fn bit(&self, l: i64) -> u64 {
        1u64 << (l + self.half)
    }
}

/// A GF(2) configuration supported inside the window. Positions outside the
/// window are identically zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BitVec {
    pub window: Window,
    bits: u64,
}

impl BitVec {
    pub fn zero(window: Window) -> BitVec {
        BitVec { window, bits: 0 }
    }

    pub fn from_positions(window: Window, positions: &[i64]) -> Result<BitVec> {
        let mut v = BitVec::zero(window);
        for &l in positions {
            v = v.with(l)?;
        }
        Ok(v)
    }

    pub(crate) fn from_mask(window: Window, bits: u64) -> BitVec {
        BitVec {
            window,
            bits: bits & window.mask(),
        }
    }

    pub(crate) fn mask_bits(&self) -> u64 {
        self.bits
    }

    pub fn with(&self, l: i64) -> Result<BitVec> {
        if !self.window.contains(l) {
            return Err(Error::SupportOverflow(format!(
                "position {l} outside the window"
            )));
        }
        Ok(BitVec {
            window: self.window,
            bits: self.bits ^ self.window.bit(l),
        })
    }

    pub fn get(&self, l: i64) -> bool {
        self.window.contains(l) && self.bits & self.window.bit(l) != 0
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn support(&self) -> Vec<i64> {
        (-self.window.half..=self.window.half)
            .filter(|&l| self.get(l))
            .collect()
    }

    /// max - min of the support; 0 for singletons and the zero vector.
    pub fn span(&self) -> i64 {
        let s = self.support();
        match (s.first(), s.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0,
        }
    }

    pub fn add(&self, other: &BitVec) -> Result<BitVec> {
        if self.window != other.window {
            return Err(Error::ModelMismatch("window sizes differ".into()));
        }
        Ok(BitVec {
            window: self.window,
            bits: self.bits ^ other.bits,
        })
    }

    /// Moves the support by k; refuses if a set bit would leave the window.
    pub fn shift(&self, k: i64) -> Result<BitVec> {
        let t = self.shift_truncate(k);
        if t.bits.count_ones() != self.bits.count_ones() {
            return Err(Error::SupportOverflow(format!(
                "shift by {k} pushes support outside the window"
            )));
        }
        Ok(t)
    }

    /// Moves the support by k, silently dropping bits that leave the window;
    /// only correct where the dropped positions pair against zeros.
    pub fn shift_truncate(&self, k: i64) -> BitVec {
        let bits = if k >= 0 {
            if k as u32 >= 64 {
                0
            } else {
                (self.bits << k) & self.window.mask()
            }
        } else {
            let j = (-k) as u32;
            if j >= 64 {
                0
            } else {
                self.bits >> j
            }
        };
        BitVec {
            window: self.window,
            bits,
        }
    }

    /// Mirror l -> -l, exact on the symmetric window.
    pub fn mirror(&self) -> BitVec {
        let n = self.window.len();
        let mut bits = 0u64;
        for i in 0..n {
            if self.bits & (1 << i) != 0 {
                bits |= 1 << (n - 1 - i);
            }
        }
        BitVec {
            window: self.window,
            bits,
        }
    }

    /// Plain dot product sum h(l) k(l) over the window.
    pub fn dot(&self, other: &BitVec) -> Result<bool> {
        if self.window != other.window {
            return Err(Error::ModelMismatch("window sizes differ".into()));
        }
        Ok((self.bits & other.bits).count_ones() % 2 == 1)
    }
}

/// Reversal pairing sum h(-l) k(l): an annihilator pattern h kills k exactly
/// when the pairing vanishes on every shift of h that stays in the window.
pub fn pair(h: &BitVec, k: &BitVec) -> Result<bool> {
    h.mirror().dot(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w() -> Window {
        Window::new(4).unwrap()
    }

    #[test]
    fn window_bounds_are_validated() {
        assert!(Window::new(1).is_err());
        assert!(Window::new(32).is_err());
        assert_eq!(Window::new(31).unwrap().len(), 63);
        assert_eq!(w().len(), 9);
    }

    #[test]
    fn positions_set_and_read_back() {
        let v = BitVec::from_positions(w(), &[-4, 0, 3]).unwrap();
        assert!(v.get(-4) && v.get(0) && v.get(3));
        assert!(!v.get(1));
        assert!(!v.get(7));
        assert_eq!(v.support(), vec![-4, 0, 3]);
        assert_eq!(v.span(), 7);
        assert!(BitVec::from_positions(w(), &[5]).is_err());
    }

    #[test]
    fn shifts_move_support_and_refuse_at_the_edge() {
        let v = BitVec::from_positions(w(), &[2, 3]).unwrap();
        assert_eq!(v.shift(1).unwrap().support(), vec![3, 4]);
        assert!(matches!(v.shift(2), Err(Error::SupportOverflow(_))));
        assert_eq!(v.shift_truncate(2).support(), vec![4]);
        assert_eq!(v.shift(-6).unwrap().support(), vec![-4, -3]);
        assert!(v.shift(-7).is_err());
    }

    #[test]
    fn mirror_is_an_involution_reversing_positions() {
        let v = BitVec::from_positions(w(), &[-1, 2]).unwrap();
        assert_eq!(v.mirror().support(), vec![-2, 1]);
        assert_eq!(v.mirror().mirror(), v);
    }

    #[test]
    fn pairing_commutes_with_the_shift() {
        let h = BitVec::from_positions(w(), &[-1, 1]).unwrap();
        let k = BitVec::from_positions(w(), &[0, 1, 2]).unwrap();
        // sum h(-l) k(l): positions -1,1 mirrored to 1,-1: hits k at 1
        assert!(pair(&h, &k).unwrap());
        // the reversal makes the shift self-adjoint: shifting either side
        // by the same amount preserves the pairing
        let lhs = pair(&h.shift(1).unwrap(), &k).unwrap();
        let rhs = pair(&h, &k.shift(1).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
        let lhs2 = pair(&h.shift(-2).unwrap(), &k).unwrap();
        let rhs2 = pair(&h, &k.shift(-2).unwrap()).unwrap();
        assert_eq!(lhs2, rhs2);
    }
}
