//! Compact open subgroups of the shift's lamp part, seen through a window.
//!
//! Every subgroup handled here sits between "vanishing below N+1" (the window
//! floor, trivially small) and "vanishing below -N" (the window ceiling), so
//! it is exactly a GF(2) code on the 2N+1 window positions, cut out by dual
//! constraint rows. Meets, joins and indices are exact linear algebra.
//! Conjugation by a shift is computed exactly when the conjugate stays inside
//! the sandwich and refused otherwise; a separate window-restricted conjugate
//! serves the one-sided chains, where restriction commutes with meets.

use super::{BitVec, Window};
use crate::error::{Error, Result};
use crate::index::IndexValue;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnihilatorCode {
    pub window: Window,
    /// Reduced row echelon dual rows; a configuration belongs to the code
    /// exactly when every row pairs to zero against it.
    rows: Vec<u64>,
}

fn rref(mut rows: Vec<u64>, width: u32) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::new();
    for col in 0..width {
        let bit = 1u64 << col;
        if let Some(i) = rows.iter().position(|r| r & bit != 0) {
            let piv = rows.swap_remove(i);
            for r in rows.iter_mut() {
                if *r & bit != 0 {
                    *r ^= piv;
                }
            }
            for r in out.iter_mut() {
                if *r & bit != 0 {
                    *r ^= piv;
                }
            }
            out.push(piv);
        }
    }
    out.retain(|r| *r != 0);
    out.sort_unstable();
    out
}

/// After full reduction each row's lowest set bit is its pivot column.
fn reduce_against(rows: &[u64], mut x: u64) -> u64 {
    for &r in rows {
        let piv = r & r.wrapping_neg();
        if x & piv != 0 {
            x ^= r;
        }
    }
    x
}

fn rowspace_contains(rows: &[u64], x: u64) -> bool {
    reduce_against(rows, x) == 0
}

/// Basis of the intersection of two row spaces: reduce [a|a; b|0] on the
/// left block, rows with vanishing left block carry the intersection on the
/// right.
fn rowspace_intersection(a: &[u64], b: &[u64], width: u32) -> Vec<u64> {
    let mut rows: Vec<(u64, u64)> = a
        .iter()
        .map(|&r| (r, r))
        .chain(b.iter().map(|&r| (r, 0)))
        .collect();
    let mut kept: Vec<u64> = Vec::new();
    for col in 0..width {
        let bit = 1u64 << col;
        if let Some(i) = rows.iter().position(|r| r.0 & bit != 0) {
            let piv = rows.swap_remove(i);
            for r in rows.iter_mut() {
                if r.0 & bit != 0 {
                    r.0 ^= piv.0;
                    r.1 ^= piv.1;
                }
            }
        }
    }
    for (left, right) in rows {
        if left == 0 && right != 0 {
            kept.push(right);
        }
    }
    rref(kept, width)
}

impl AnnihilatorCode {
    pub fn from_dual_rows(window: Window, rows: Vec<BitVec>) -> Result<AnnihilatorCode> {
        let mut masks = Vec::with_capacity(rows.len());
        for r in rows {
            if r.window != window {
                return Err(Error::ModelMismatch("row window differs".into()));
            }
            masks.push(r.mask_bits());
        }
        Ok(AnnihilatorCode {
            window,
            rows: rref(masks, window.len()),
        })
    }

    /// Constraints from annihilator patterns h: the reversal pairing against
    /// h becomes a plain dot against the mirrored pattern.
    pub fn from_annihilators(window: Window, patterns: Vec<BitVec>) -> Result<AnnihilatorCode> {
        AnnihilatorCode::from_dual_rows(window, patterns.iter().map(BitVec::mirror).collect())
    }

    /// Configurations vanishing at every position below the cutoff;
    /// cutoff ranges over [-N, N+1], from the full code down to the zero code.
    pub fn vanishing_below(window: Window, cutoff: i64) -> Result<AnnihilatorCode> {
        if cutoff < -window.half || cutoff > window.half + 1 {
            return Err(Error::ConfigInvalid(format!(
                "cutoff {cutoff} outside the window range"
            )));
        }
        let rows = (-window.half..cutoff)
            .map(|l| BitVec::zero(window).with(l).unwrap())
            .collect();
        AnnihilatorCode::from_dual_rows(window, rows)
    }

    /// The standard compact open: configurations supported on the right half.
    pub fn right_half(window: Window) -> AnnihilatorCode {
        AnnihilatorCode::vanishing_below(window, 0).unwrap()
    }

    pub fn full(window: Window) -> AnnihilatorCode {
        AnnihilatorCode::vanishing_below(window, -window.half).unwrap()
    }

    pub fn zero(window: Window) -> AnnihilatorCode {
        AnnihilatorCode::vanishing_below(window, window.half + 1).unwrap()
    }

    pub fn rank(&self) -> u32 {
        self.rows.len() as u32
    }

    pub fn dim(&self) -> u32 {
        self.window.len() - self.rank()
    }

    pub fn dual_rows(&self) -> Vec<BitVec> {
        self.rows
            .iter()
            .map(|&r| BitVec::from_mask(self.window, r))
            .collect()
    }

    pub fn contains(&self, x: &BitVec) -> Result<bool> {
        if x.window != self.window {
            return Err(Error::ModelMismatch("window sizes differ".into()));
        }
        Ok(self
            .rows
            .iter()
            .all(|&r| (r & x.mask_bits()).count_ones() % 2 == 0))
    }

    /// Set containment: self is inside other when every constraint of other
    /// is implied by the constraints of self.
    pub fn subgroup_of(&self, other: &AnnihilatorCode) -> bool {
        self.window == other.window
            && other.rows.iter().all(|&r| rowspace_contains(&self.rows, r))
    }

    pub fn meet(&self, other: &AnnihilatorCode) -> Result<AnnihilatorCode> {
        if self.window != other.window {
            return Err(Error::ModelMismatch("window sizes differ".into()));
        }
        let mut rows = self.rows.clone();
        rows.extend_from_slice(&other.rows);
        Ok(AnnihilatorCode {
            window: self.window,
            rows: rref(rows, self.window.len()),
        })
    }

    /// Smallest code containing both: its constraints are exactly the common
    /// constraints, so the dual rows intersect.
    pub fn join(&self, other: &AnnihilatorCode) -> Result<AnnihilatorCode> {
        if self.window != other.window {
            return Err(Error::ModelMismatch("window sizes differ".into()));
        }
        Ok(AnnihilatorCode {
            window: self.window,
            rows: rowspace_intersection(&self.rows, &other.rows, self.window.len()),
        })
    }

    pub fn index_over(&self, other: &AnnihilatorCode) -> Result<IndexValue> {
        let m = self.meet(other)?;
        Ok(IndexValue::prime_power(2, (self.dim() - m.dim()) as u64))
    }

    /// Exact conjugate by the k-fold shift. Refuses when the conjugate leaves
    /// the sandwich of window-representable subgroups: shifting up needs the
    /// code free on the top k positions, shifting down needs the bottom |k|
    /// positions pinned to zero.
    pub fn conjugate(&self, k: i64) -> Result<AnnihilatorCode> {
        let n = self.window.half;
        if k == 0 {
            return Ok(self.clone());
        }
        if k.unsigned_abs() as u32 > self.window.len() {
            return Err(Error::SupportOverflow(format!(
                "shift by {k} exceeds the window"
            )));
        }
        if k > 0 {
            let top: u64 = (0..k)
                .map(|j| 1u64 << (self.window.len() as i64 - 1 - j))
                .fold(0, |a, b| a | b);
            if self.rows.iter().any(|&r| r & top != 0) {
                return Err(Error::SupportOverflow(format!(
                    "conjugating by the {k}-fold shift moves a constraint past the window top"
                )));
            }
            let mut rows: Vec<u64> = self.rows.iter().map(|&r| r << k).collect();
            for j in 0..k {
                rows.push(self.window.bit(-n + j));
            }
            Ok(AnnihilatorCode {
                window: self.window,
                rows: rref(rows, self.window.len()),
            })
        } else {
            let j = -k;
            // the bottom j positions must be pinned: each unit constraint is
            // literally one of the reduced rows exactly when it lies in the
            // row space
            for c in 0..j {
                let unit = self.window.bit(-n + c);
                if !self.rows.contains(&unit) {
                    return Err(Error::SupportOverflow(format!(
                        "conjugating by the {k}-fold shift frees a position below the window"
                    )));
                }
            }
            let rows: Vec<u64> = self
                .rows
                .iter()
                .map(|&r| r >> j)
                .filter(|&r| r != 0)
                .collect();
            Ok(AnnihilatorCode {
                window: self.window,
                rows: rref(rows, self.window.len()),
            })
        }
    }

    /// Window restriction of the conjugate: the set of representable
    /// configurations lying in the shifted subgroup. Always defined, and for
    /// operands already inside the window it satisfies
    /// meet(x, conjugate(x)) = meet(x, conjugate_restricted(x)) exactly,
    /// which is all the one-sided chains need.
    pub fn conjugate_restricted(&self, k: i64) -> AnnihilatorCode {
        let n = self.window.half;
        let mut rows: Vec<u64> = self
            .rows
            .iter()
            .map(|&r| BitVec::from_mask(self.window, r).shift_truncate(k).mask_bits())
            .filter(|&r| r != 0)
            .collect();
        if k > 0 {
            for j in 0..k.min(2 * n + 1) {
                rows.push(self.window.bit(-n + j));
            }
        }
        AnnihilatorCode {
            window: self.window,
            rows: rref(rows, self.window.len()),
        }
    }

    /// Conjugate by the mirror map l -> -l, always exact on the symmetric
    /// window.
    pub fn mirror_conjugate(&self) -> AnnihilatorCode {
        let rows = self
            .rows
            .iter()
            .map(|&r| BitVec::from_mask(self.window, r).mirror().mask_bits())
            .collect();
        AnnihilatorCode {
            window: self.window,
            rows: rref(rows, self.window.len()),
        }
    }

    /// True when every in-window shift of every dual row stays in the dual
    /// row space, i.e. the code looks invariant under both shift directions.
    pub fn is_shift_invariant(&self) -> bool {
        for &r in &self.rows {
            for k in [-1i64, 1] {
                let v = BitVec::from_mask(self.window, r);
                if let Ok(s) = v.shift(k) {
                    if !rowspace_contains(&self.rows, s.mask_bits()) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn unit_inside(&self, l: i64) -> bool {
        let bit = self.window.bit(l);
        self.rows.iter().all(|&r| r & bit == 0)
    }

    /// Smallest support span over all nonzero vectors of the dual row space:
    /// the width of the narrowest constraint pattern, independent of the
    /// basis the rows happen to be in. Found by intersecting the row space
    /// with each contiguous coordinate subspace, narrowest first.
    pub fn min_constraint_span(&self) -> i64 {
        if self.rows.is_empty() {
            return 0;
        }
        let n = self.window.half;
        for s in 0..=(2 * n) {
            for lo in -n..=(n - s) {
                let coord: Vec<u64> = (lo..=lo + s).map(|l| self.window.bit(l)).collect();
                if !rowspace_intersection(&self.rows, &coord, self.window.len()).is_empty() {
                    return s;
                }
            }
        }
        2 * n
    }
}

/// Structure of a code as seen through the window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TailVerdict {
    /// Contains every unit configuration from the given position up to the
    /// window top: a cofinite tail.
    CofiniteTail { from: i64 },
    /// Shift-invariant with small dimension and no tail: a finite-dimensional
    /// invariant code.
    FiniteDimensional { dim: u32 },
    Undecided,
}

/// Decides whether a code is a cofinite tail or a finite-dimensional
/// shift-invariant code. Needs two positions of slack beyond the widest
/// constraint row so a boundary artifact cannot masquerade as a tail.
pub fn tail_detect(code: &AnnihilatorCode) -> Result<TailVerdict> {
    let n = code.window.half;
    let d = code.min_constraint_span();
    if n < d + 2 {
        return Err(Error::WindowTooSmall { needed: d + 2 });
    }
    let mut from = n + 1;
    for l in (-n..=n).rev() {
        if code.unit_inside(l) {
            from = l;
        } else {
            break;
        }
    }
    if from <= n - 1 {
        return Ok(TailVerdict::CofiniteTail { from });
    }
    if code.is_shift_invariant() && code.dim() as i64 <= d {
        return Ok(TailVerdict::FiniteDimensional { dim: code.dim() });
    }
    Ok(TailVerdict::Undecided)
}

/// One shift-invariant code built from a small annihilator pattern, with its
/// index gap against the standard right-half code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanEntry {
    pub pattern: Vec<i64>,
    pub dim: u32,
    pub verdict: TailVerdict,
    /// ([right_half : meet], [code : meet]) as exponents of 2.
    pub gap: (u32, u32),
}

/// Builds the code cut out by every in-window shift of the pattern.
pub fn shift_closed_code(window: Window, pattern: &[i64]) -> Result<AnnihilatorCode> {
    let base = BitVec::from_positions(window, pattern)?;
    let mut rows = Vec::new();
    for k in -(2 * window.half)..=(2 * window.half) {
        let s = base.shift_truncate(k);
        if s.mask_bits().count_ones() == base.mask_bits().count_ones() {
            rows.push(s.mirror());
        }
    }
    AnnihilatorCode::from_annihilators(window, rows)
}

/// Scans every annihilator pattern of support at most three near the origin:
/// all yield finite-dimensional shift-invariant codes, and the index gap
/// against the right-half code fills the whole window, so no shift-invariant
/// code is commensurated tightly by it.
pub fn shift_invariant_code_scan(window: Window) -> Result<Vec<ScanEntry>> {
    let patterns: [&[i64]; 4] = [&[0], &[0, 1], &[0, 2], &[0, 1, 2]];
    let std = AnnihilatorCode::right_half(window);
    let mut out = Vec::new();
    for pattern in patterns {
        let code = shift_closed_code(window, pattern)?;
        let verdict = tail_detect(&code)?;
        let m = std.meet(&code)?;
        out.push(ScanEntry {
            pattern: pattern.to_vec(),
            dim: code.dim(),
            verdict,
            gap: (std.dim() - m.dim(), code.dim() - m.dim()),
        });
    }
    Ok(out)
}

/// Index pair of the k-fold shift conjugate of the right-half code against
/// the code itself, as exponents of 2: the conjugates are nested, so exactly
/// one side of each pair is trivial.
pub fn conjugation_index_table(window: Window, max_shift: i64) -> Result<Vec<(i64, u32, u32)>> {
    let std = AnnihilatorCode::right_half(window);
    let mut out = Vec::new();
    for k in -max_shift..=max_shift {
        let conj = std.conjugate(k)?;
        let m = std.meet(&conj)?;
        out.push((k, std.dim() - m.dim(), conj.dim() - m.dim()));
    }
    Ok(out)
}
