//! Dense matrices over an exact local-field element type, with the small
//! amount of linear algebra the group models need: products, inverses,
//! determinants, characteristic polynomials, and Smith decompositions over
//! the valuation ring with recorded transforms.

use crate::error::{Error, Result};
use crate::field::{FieldElem, LocalFieldSpec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat {
    pub spec: LocalFieldSpec,
    pub rows: usize,
    pub cols: usize,
    data: Vec<FieldElem>,
}

impl Mat {
    pub fn new(spec: LocalFieldSpec, rows: usize, cols: usize, data: Vec<FieldElem>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Mat {
            spec,
            rows,
            cols,
            data,
        }
    }

    pub fn zero(spec: LocalFieldSpec, rows: usize, cols: usize) -> Self {
        Mat::new(spec, rows, cols, vec![spec.zero(); rows * cols])
    }

    pub fn identity(spec: LocalFieldSpec, n: usize) -> Self {
        let mut m = Mat::zero(spec, n, n);
        for i in 0..n {
            m.set(i, i, spec.one());
        }
        m
    }

    pub fn from_rows(spec: LocalFieldSpec, rows: Vec<Vec<FieldElem>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            data.extend(row);
        }
        Mat::new(spec, r, c, data)
    }

    /// Parses a matrix given as rows of entry strings.
    pub fn parse(spec: LocalFieldSpec, rows: &[Vec<String>]) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::ConfigInvalid("empty matrix".into()));
        }
        let c = rows[0].len();
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::ConfigInvalid("ragged matrix".into()));
            }
            for s in row {
                data.push(spec.parse(s)?);
            }
        }
        Ok(Mat::new(spec, r, c, data))
    }

    pub fn get(&self, i: usize, j: usize) -> &FieldElem {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldElem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn col(&self, j: usize) -> Vec<FieldElem> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn from_cols(spec: LocalFieldSpec, n_rows: usize, cols: Vec<Vec<FieldElem>>) -> Self {
        let c = cols.len();
        let mut m = Mat::zero(spec, n_rows, c);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), n_rows);
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows);
        let spec = self.spec;
        let mut out = Mat::zero(spec, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = spec.zero();
                for k in 0..self.cols {
                    acc = spec.add(&acc, &spec.mul(self.get(i, k), other.get(k, j)));
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[FieldElem]) -> Vec<FieldElem> {
        assert_eq!(self.cols, v.len());
        let spec = self.spec;
        (0..self.rows)
            .map(|i| {
                let mut acc = spec.zero();
                for k in 0..self.cols {
                    acc = spec.add(&acc, &spec.mul(self.get(i, k), &v[k]));
                }
                acc
            })
            .collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zero(self.spec, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn hcat(&self, other: &Mat) -> Mat {
        assert_eq!(self.rows, other.rows);
        let mut cols = Vec::new();
        for j in 0..self.cols {
            cols.push(self.col(j));
        }
        for j in 0..other.cols {
            cols.push(other.col(j));
        }
        Mat::from_cols(self.spec, self.rows, cols)
    }

    pub fn det(&self) -> FieldElem {
        assert_eq!(self.rows, self.cols);
        let spec = self.spec;
        match self.rows {
            0 => spec.one(),
            1 => self.get(0, 0).clone(),
            n => {
                let mut acc = spec.zero();
                for j in 0..n {
                    let minor = self.minor(0, j);
                    let term = spec.mul(self.get(0, j), &minor.det());
                    if j % 2 == 0 {
                        acc = spec.add(&acc, &term);
                    } else {
                        acc = spec.sub(&acc, &term);
                    }
                }
                acc
            }
        }
    }

    fn minor(&self, skip_row: usize, skip_col: usize) -> Mat {
        let spec = self.spec;
        let mut rows = Vec::new();
        for i in 0..self.rows {
            if i == skip_row {
                continue;
            }
            let mut row = Vec::new();
            for j in 0..self.cols {
                if j == skip_col {
                    continue;
                }
                row.push(self.get(i, j).clone());
            }
            rows.push(row);
        }
        Mat::from_rows(spec, rows)
    }

    /// k x k minor determinants, used for valuation elementary divisors.
    pub fn minors_k(&self, k: usize) -> Vec<FieldElem> {
        let rows = combinations(self.rows, k);
        let cols = combinations(self.cols, k);
        let mut out = Vec::new();
        for rs in &rows {
            for cs in &cols {
                let mut sub_rows = Vec::new();
                for &i in rs {
                    let mut row = Vec::new();
                    for &j in cs {
                        row.push(self.get(i, j).clone());
                    }
                    sub_rows.push(row);
                }
                out.push(Mat::from_rows(self.spec, sub_rows).det());
            }
        }
        out
    }

    pub fn inverse(&self) -> Result<Mat> {
        assert_eq!(self.rows, self.cols);
        let spec = self.spec;
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Mat::identity(spec, n);
        for col in 0..n {
            let pivot_row = (col..n)
                .find(|&i| !a.get(i, col).is_zero())
                .ok_or(Error::DivisionByZero)?;
            if pivot_row != col {
                for j in 0..n {
                    let tmp = a.get(col, j).clone();
                    a.set(col, j, a.get(pivot_row, j).clone());
                    a.set(pivot_row, j, tmp);
                    let tmp = inv.get(col, j).clone();
                    inv.set(col, j, inv.get(pivot_row, j).clone());
                    inv.set(pivot_row, j, tmp);
                }
            }
            let p_inv = spec.inv(a.get(col, col))?;
            for j in 0..n {
                a.set(col, j, spec.mul(a.get(col, j), &p_inv));
                inv.set(col, j, spec.mul(inv.get(col, j), &p_inv));
            }
            for i in 0..n {
                if i == col || a.get(i, col).is_zero() {
                    continue;
                }
                let factor = a.get(i, col).clone();
                for j in 0..n {
                    let av = spec.sub(a.get(i, j), &spec.mul(&factor, a.get(col, j)));
                    a.set(i, j, av);
                    let iv = spec.sub(inv.get(i, j), &spec.mul(&factor, inv.get(col, j)));
                    inv.set(i, j, iv);
                }
            }
        }
        Ok(inv)
    }

    /// Coefficients of det(xI - A), ascending in degree, exact.
    pub fn charpoly(&self) -> Vec<FieldElem> {
        assert_eq!(self.rows, self.cols);
        let spec = self.spec;
        let n = self.rows;
        // entries of xI - A as degree<=1 polynomials in x
        let entry = |i: usize, j: usize| -> Vec<FieldElem> {
            let a = spec.neg(self.get(i, j));
            if i == j {
                vec![a, spec.one()]
            } else {
                vec![a]
            }
        };
        fn poly_add(spec: &LocalFieldSpec, a: &[FieldElem], b: &[FieldElem]) -> Vec<FieldElem> {
            let n = a.len().max(b.len());
            (0..n)
                .map(|i| {
                    let x = a.get(i).cloned().unwrap_or_else(|| spec.zero());
                    let y = b.get(i).cloned().unwrap_or_else(|| spec.zero());
                    spec.add(&x, &y)
                })
                .collect()
        }
        fn poly_mul(spec: &LocalFieldSpec, a: &[FieldElem], b: &[FieldElem]) -> Vec<FieldElem> {
            if a.is_empty() || b.is_empty() {
                return vec![];
            }
            let mut out = vec![spec.zero(); a.len() + b.len() - 1];
            for (i, x) in a.iter().enumerate() {
                for (j, y) in b.iter().enumerate() {
                    out[i + j] = spec.add(&out[i + j], &spec.mul(x, y));
                }
            }
            out
        }
        fn poly_neg(spec: &LocalFieldSpec, a: &[FieldElem]) -> Vec<FieldElem> {
            a.iter().map(|x| spec.neg(x)).collect()
        }
        // permanent-style recursive expansion over active rows/cols
        fn det_rec(
            spec: &LocalFieldSpec,
            entry: &dyn Fn(usize, usize) -> Vec<FieldElem>,
            rows: &[usize],
            cols: &[usize],
        ) -> Vec<FieldElem> {
            if rows.is_empty() {
                return vec![spec.one()];
            }
            let r = rows[0];
            let rest_rows = &rows[1..];
            let mut acc = vec![];
            for (pos, &c) in cols.iter().enumerate() {
                let rest_cols: Vec<usize> = cols
                    .iter()
                    .copied()
                    .filter(|&cc| cc != c)
                    .collect();
                let sub = det_rec(spec, entry, rest_rows, &rest_cols);
                let term = poly_mul(spec, &entry(r, c), &sub);
                let term = if pos % 2 == 0 {
                    term
                } else {
                    poly_neg(spec, &term)
                };
                acc = poly_add(spec, &acc, &term);
            }
            acc
        }
        let idx: Vec<usize> = (0..n).collect();
        let mut out = det_rec(&spec, &entry, &idx, &idx);
        out.resize(n + 1, spec.zero());
        out
    }

    /// Horner evaluation of a polynomial at this (square) matrix.
    pub fn eval_poly(&self, f: &[FieldElem]) -> Mat {
        assert_eq!(self.rows, self.cols);
        let spec = self.spec;
        let n = self.rows;
        let mut acc = Mat::zero(spec, n, n);
        for c in f.iter().rev() {
            acc = acc.mul(self);
            for i in 0..n {
                let d = spec.add(acc.get(i, i), c);
                acc.set(i, i, d);
            }
        }
        acc
    }

    /// Basis of the null space over the field, one vector per column of the
    /// returned matrix (no columns when the matrix is injective). Row
    /// reduction only, so the kernel is preserved exactly.
    pub fn kernel(&self) -> Result<Mat> {
        let spec = self.spec;
        let (rows, cols) = (self.rows, self.cols);
        let mut a = self.clone();
        // reduced row echelon form; remember the pivot column of each row
        let mut pivots: Vec<(usize, usize)> = vec![];
        let mut r = 0usize;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(pr) = (r..rows).find(|&i| !a.get(i, c).is_zero()) else {
                continue;
            };
            if pr != r {
                for j in 0..cols {
                    let tmp = a.get(r, j).clone();
                    a.set(r, j, a.get(pr, j).clone());
                    a.set(pr, j, tmp);
                }
            }
            let p_inv = spec.inv(a.get(r, c))?;
            for j in 0..cols {
                a.set(r, j, spec.mul(a.get(r, j), &p_inv));
            }
            for i in 0..rows {
                if i == r || a.get(i, c).is_zero() {
                    continue;
                }
                let factor = a.get(i, c).clone();
                for j in 0..cols {
                    let v = spec.sub(a.get(i, j), &spec.mul(&factor, a.get(r, j)));
                    a.set(i, j, v);
                }
            }
            pivots.push((r, c));
            r += 1;
        }
        let pivot_cols: std::collections::BTreeSet<usize> =
            pivots.iter().map(|&(_, c)| c).collect();
        let mut basis: Vec<Vec<FieldElem>> = vec![];
        for j in 0..cols {
            if pivot_cols.contains(&j) {
                continue;
            }
            let mut v = vec![spec.zero(); cols];
            v[j] = spec.one();
            for &(pr, pc) in &pivots {
                v[pc] = spec.neg(a.get(pr, j));
            }
            basis.push(v);
        }
        Ok(Mat::from_cols(spec, cols, basis))
    }

    /// Solves self . x = rhs by row reduction of the augmented matrix.
    /// Requires independent columns; every rhs column must lie in their span.
    pub fn solve(&self, rhs: &Mat) -> Result<Mat> {
        if self.rows != rhs.rows {
            return Err(Error::ModelMismatch("solve dimension mismatch".into()));
        }
        let spec = self.spec;
        let (n, d, m) = (self.rows, self.cols, rhs.cols);
        let mut a = Mat::zero(spec, n, d + m);
        for i in 0..n {
            for j in 0..d {
                a.set(i, j, self.get(i, j).clone());
            }
            for j in 0..m {
                a.set(i, d + j, rhs.get(i, j).clone());
            }
        }
        let mut r = 0usize;
        for c in 0..d {
            let Some(pr) = (r..n).find(|&i| !a.get(i, c).is_zero()) else {
                return Err(Error::Unsupported(
                    "solve against dependent columns".into(),
                ));
            };
            if pr != r {
                for j in 0..d + m {
                    let tmp = a.get(r, j).clone();
                    a.set(r, j, a.get(pr, j).clone());
                    a.set(pr, j, tmp);
                }
            }
            let p_inv = spec.inv(a.get(r, c))?;
            for j in 0..d + m {
                a.set(r, j, spec.mul(a.get(r, j), &p_inv));
            }
            for i in 0..n {
                if i == r || a.get(i, c).is_zero() {
                    continue;
                }
                let factor = a.get(i, c).clone();
                for j in 0..d + m {
                    let v = spec.sub(a.get(i, j), &spec.mul(&factor, a.get(r, j)));
                    a.set(i, j, v);
                }
            }
            r += 1;
        }
        for i in r..n {
            for j in 0..m {
                if !a.get(i, d + j).is_zero() {
                    return Err(Error::ModelMismatch(
                        "right side outside the column span".into(),
                    ));
                }
            }
        }
        let mut x = Mat::zero(spec, d, m);
        for i in 0..d {
            for j in 0..m {
                x.set(i, j, a.get(i, d + j).clone());
            }
        }
        Ok(x)
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![];
    let mut cur = vec![];
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Smith decomposition over the valuation ring: returns (u_inv, divisors, v)
/// with `self = u_inv * diag(pi^{d_k}) * v_inv` for unimodular transforms.
/// Only `u_inv` (the adapted left basis) and the divisor exponents are
/// returned since callers never need v_inv; `divisors[k] = None` marks a zero
/// diagonal entry (rank deficiency). Divisor exponents ascend.
pub struct SmithResult {
    pub u_inv: Mat,
    /// the left transform itself: u * self * v = diag; rows of u past `rank`
    /// annihilate the input from the left
    pub u: Mat,
    pub divisors: Vec<Option<i64>>,
    pub rank: usize,
    /// right transform V (columns operations applied), so self * v has the
    /// adapted column form u_inv * diag
    pub v: Mat,
}

pub fn smith(input: &Mat) -> Result<SmithResult> {
    let spec = input.spec;
    let n = input.rows;
    let m = input.cols;
    let mut a = input.clone();
    let mut u = Mat::identity(spec, n); // tracks row ops: a = u * input * v
    let mut v = Mat::identity(spec, m);
    let k_max = n.min(m);
    let mut divisors: Vec<Option<i64>> = vec![None; k_max];
    let mut rank = 0usize;
    for k in 0..k_max {
        // global minimal valuation pivot in the trailing block
        let mut best: Option<(usize, usize, i64)> = None;
        for i in k..n {
            for j in k..m {
                if let Some(val) = spec.valuation(a.get(i, j)) {
                    if best.map_or(true, |(_, _, bv)| val < bv) {
                        best = Some((i, j, val));
                    }
                }
            }
        }
        let Some((pi, pj, pv)) = best else {
            break;
        };
        // swap pivot into place
        if pi != k {
            for j in 0..m {
                let tmp = a.get(k, j).clone();
                a.set(k, j, a.get(pi, j).clone());
                a.set(pi, j, tmp);
            }
            for j in 0..n {
                let tmp = u.get(k, j).clone();
                u.set(k, j, u.get(pi, j).clone());
                u.set(pi, j, tmp);
            }
        }
        if pj != k {
            for i in 0..n {
                let tmp = a.get(i, k).clone();
                a.set(i, k, a.get(i, pj).clone());
                a.set(i, pj, tmp);
            }
            for i in 0..m {
                let tmp = v.get(i, k).clone();
                v.set(i, k, v.get(i, pj).clone());
                v.set(i, pj, tmp);
            }
        }
        // normalize the pivot to an exact uniformizer power via a unit row op
        let unit = spec.mul(a.get(k, k), &spec.uniformizer_pow(-pv));
        let unit_inv = spec.inv(&unit)?;
        for j in 0..m {
            a.set(k, j, spec.mul(a.get(k, j), &unit_inv));
        }
        for j in 0..n {
            u.set(k, j, spec.mul(u.get(k, j), &unit_inv));
        }
        let pivot = a.get(k, k).clone();
        // clear the rest of column k with row ops, and row k with col ops;
        // quotients are integral because the pivot has minimal valuation
        for i in k + 1..n {
            if a.get(i, k).is_zero() {
                continue;
            }
            let factor = spec.div(a.get(i, k), &pivot)?;
            for j in 0..m {
                let val = spec.sub(a.get(i, j), &spec.mul(&factor, a.get(k, j)));
                a.set(i, j, val);
            }
            for j in 0..n {
                let val = spec.sub(u.get(i, j), &spec.mul(&factor, u.get(k, j)));
                u.set(i, j, val);
            }
        }
        for j in k + 1..m {
            if a.get(k, j).is_zero() {
                continue;
            }
            let factor = spec.div(a.get(k, j), &pivot)?;
            for i in 0..n {
                let val = spec.sub(a.get(i, j), &spec.mul(&factor, a.get(i, k)));
                a.set(i, j, val);
            }
            for i in 0..m {
                let val = spec.sub(v.get(i, j), &spec.mul(&factor, v.get(i, k)));
                v.set(i, j, val);
            }
        }
        divisors[k] = Some(pv);
        rank += 1;
    }
    let u_inv = u.inverse()?;
    Ok(SmithResult {
        u_inv,
        u,
        divisors,
        rank,
        v,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q3() -> LocalFieldSpec {
        LocalFieldSpec::padic(3, 32).unwrap()
    }

    fn m2(spec: LocalFieldSpec, entries: [[&str; 2]; 2]) -> Mat {
        Mat::parse(
            spec,
            &entries
                .iter()
                .map(|r| r.iter().map(|s| s.to_string()).collect())
                .collect::<Vec<_>>(),
        )
        .unwrap()
    }

    #[test]
    fn inverse_round_trip() {
        let k = q3();
        let a = m2(k, [["2", "1/3"], ["1", "5"]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), Mat::identity(k, 2));
    }

    #[test]
    fn charpoly_of_diagonal() {
        let k = q3();
        let a = m2(k, [["3", "0"], ["0", "1/3"]]);
        let cp = a.charpoly();
        // x^2 - (3 + 1/3) x + 1
        assert_eq!(cp[2], k.one());
        assert_eq!(cp[1], k.parse("-10/3").unwrap());
        assert_eq!(cp[0], k.one());
    }

    #[test]
    fn charpoly_3x3_matches_det_and_trace() {
        let k = q3();
        let a = Mat::parse(
            k,
            &[
                vec!["1".into(), "2".into(), "0".into()],
                vec!["1/3".into(), "1".into(), "1".into()],
                vec!["0".into(), "5".into(), "2".into()],
            ],
        )
        .unwrap();
        let cp = a.charpoly();
        // constant term is (-1)^3 det, x^2 coefficient is -trace
        assert_eq!(cp[0], k.neg(&a.det()));
        assert_eq!(cp[2], k.parse("-4").unwrap());
        assert_eq!(cp[3], k.one());
    }

    #[test]
    fn smith_recovers_input() {
        let k = q3();
        let a = m2(k, [["3", "1"], ["9", "1/3"]]);
        let s = smith(&a).unwrap();
        assert_eq!(s.rank, 2);
        let mut divisor_mat = Mat::zero(k, 2, 2);
        for (i, d) in s.divisors.iter().enumerate() {
            divisor_mat.set(i, i, k.uniformizer_pow(d.unwrap()));
        }
        // a * v = u_inv * diag
        assert_eq!(a.mul(&s.v), s.u_inv.mul(&divisor_mat));
        // divisors ascend
        assert!(s.divisors[0].unwrap() <= s.divisors[1].unwrap());
        // product of divisors matches det valuation
        let dv: i64 = s.divisors.iter().map(|d| d.unwrap()).sum();
        assert_eq!(k.valuation(&a.det()).unwrap(), dv);
    }

    #[test]
    fn smith_detects_rank_deficiency() {
        let k = q3();
        let a = m2(k, [["1", "2"], ["2", "4"]]);
        let s = smith(&a).unwrap();
        assert_eq!(s.rank, 1);
        assert!(s.divisors[1].is_none());
    }

    #[test]
    fn charpoly_annihilates_its_matrix() {
        let k = q3();
        let a = m2(k, [["3", "1"], ["0", "1/9"]]);
        let f = a.charpoly();
        let z = a.eval_poly(&f);
        assert!(z.data.iter().all(|e| e.is_zero()));
    }

    #[test]
    fn kernel_spans_the_null_space() {
        let k = q3();
        // rank 1: kernel is the line through (2, -1)
        let a = m2(k, [["1", "2"], ["2", "4"]]);
        let ker = a.kernel().unwrap();
        assert_eq!(ker.cols, 1);
        let img = a.mul(&ker);
        assert!(img.data.iter().all(|e| e.is_zero()));
        // invertible: no kernel
        let b = m2(k, [["1", "2"], ["2", "5"]]);
        assert_eq!(b.kernel().unwrap().cols, 0);
    }

    #[test]
    fn eigenline_from_factor_kernel() {
        let k = q3();
        // eigenvalue 1/9 of [[3,1],[0,1/9]] has eigendirection (9, -26)
        let a = m2(k, [["3", "1"], ["0", "1/9"]]);
        let lam = vec![k.parse("-1/9").unwrap(), k.one()];
        let e = a.eval_poly(&lam);
        let ker = e.kernel().unwrap();
        assert_eq!(ker.cols, 1);
        let v = ker.col(0);
        let ratio = k.div(&v[1], &v[0]).unwrap();
        assert_eq!(ratio, k.parse("-26/9").unwrap());
    }
}
