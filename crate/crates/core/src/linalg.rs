//! Exact dense linear algebra over ℚ and ℤ.
//!
//! Matrices are small (rank ≤ 16 in practice), so everything is dense and
//! arbitrary precision. Integer algorithms (kernel, Smith form, skew Darboux
//! reduction) operate on `BigInt` and never overflow.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Dense matrix with exact rational entries, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_from_i64(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigRational::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigRational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        QMatrix { rows, cols, data }
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        Self::from_fn(r, c, |i, j| rat_from_i64(rows[i][j]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        QMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_skew(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..self.cols).all(|j| *self.get(i, j) == -self.get(j, i)))
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> Vec<BigRational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    /// Block-diagonal sum.
    pub fn block_diag(a: &QMatrix, b: &QMatrix) -> QMatrix {
        let mut m = QMatrix::zeros(a.rows + b.rows, a.cols + b.cols);
        for i in 0..a.rows {
            for j in 0..a.cols {
                m.set(i, j, a.get(i, j).clone());
            }
        }
        for i in 0..b.rows {
            for j in 0..b.cols {
                m.set(a.rows + i, a.cols + j, b.get(i, j).clone());
            }
        }
        m
    }

    /// Reorder rows and columns simultaneously: result[i][j] = self[p[i]][p[j]].
    pub fn permuted(&self, p: &[usize]) -> QMatrix {
        QMatrix::from_fn(p.len(), p.len(), |i, j| self.get(p[i], p[j]).clone())
    }

    /// Least common multiple of all entry denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.data.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
    }

    /// Entries as integers; fails if any entry is fractional.
    pub fn to_integer(&self) -> Result<Vec<Vec<BigInt>>> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| {
                        let x = self.get(i, j);
                        if x.is_integer() {
                            Ok(x.to_integer())
                        } else {
                            Err(Error::Inexact(format!("entry ({i},{j}) = {x} is not integral")))
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Reduced row echelon form and the list of pivot columns.
    pub fn rref(&self) -> (QMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else { continue };
            m.swap_rows(r, p);
            let inv = m.get(r, c).recip();
            for j in 0..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i != r && !m.get(i, c).is_zero() {
                    let f = m.get(i, c).clone();
                    for j in 0..m.cols {
                        let v = m.get(i, j) - &f * m.get(r, j);
                        m.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn determinant(&self) -> Result<BigRational> {
        if self.rows != self.cols {
            return Err(Error::InvalidParam("determinant of non-square matrix".into()));
        }
        let mut m = self.clone();
        let mut det = BigRational::one();
        for c in 0..m.cols {
            let Some(p) = (c..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                return Ok(BigRational::zero());
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m.get(c, c).clone();
            det *= &piv;
            for i in c + 1..m.rows {
                if !m.get(i, c).is_zero() {
                    let f = m.get(i, c) / &piv;
                    for j in c..m.cols {
                        let v = m.get(i, j) - &f * m.get(c, j);
                        m.set(i, j, v);
                    }
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Result<QMatrix> {
        if self.rows != self.cols {
            return Err(Error::Singular);
        }
        let n = self.rows;
        let mut aug = QMatrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, BigRational::one());
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::Singular);
        }
        Ok(QMatrix::from_fn(n, n, |i, j| r.get(i, n + j).clone()))
    }

    /// Basis of the rational null space {v : M v = 0}, as columns of the result.
    pub fn nullspace(&self) -> Vec<Vec<BigRational>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![BigRational::zero(); self.cols];
                v[f] = BigRational::one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -r.get(row, f).clone();
                }
                v
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Bilinear pairing xᵀ M y.
    pub fn pair(&self, x: &[BigRational], y: &[BigRational]) -> BigRational {
        let mut s = BigRational::zero();
        for i in 0..self.rows {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..self.cols {
                if !y[j].is_zero() {
                    s += &x[i] * self.get(i, j) * &y[j];
                }
            }
        }
        s
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> Vec<BigRational> {
        (0..self.rows)
            .map(|i| (0..self.cols).fold(BigRational::zero(), |acc, j| acc + self.get(i, j) * &v[j]))
            .collect()
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        use num_traits::ToPrimitive;
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).to_f64().unwrap_or(f64::NAN)).collect())
            .collect()
    }
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "QMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl<'a> Mul<&'a QMatrix> for &'a QMatrix {
    type Output = QMatrix;
    fn mul(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in matrix product");
        let mut out = QMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j) + a * b;
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }
}

impl<'a> Add<&'a QMatrix> for &'a QMatrix {
    type Output = QMatrix;
    fn add(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a QMatrix> for &'a QMatrix {
    type Output = QMatrix;
    fn sub(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &QMatrix {
    type Output = QMatrix;
    fn neg(self) -> QMatrix {
        QMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| -a).collect() }
    }
}

// ---------------------------------------------------------------------------
// Integer algorithms
// ---------------------------------------------------------------------------

pub type IntMatrix = Vec<Vec<BigInt>>;

pub fn int_matrix(rows: &[Vec<i64>]) -> IntMatrix {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

/// Saturated basis of the integer kernel {v ∈ ℤ^c : M v = 0}.
///
/// Row-reduces [Mᵀ | I] with unimodular integer operations; rows whose
/// Mᵀ-part vanishes carry kernel vectors in their identity part.
pub fn integer_kernel(m: &IntMatrix, cols: usize) -> Vec<Vec<BigInt>> {
    let rows = m.len();
    // aug row r = (column r of M, e_r)
    let mut aug: Vec<Vec<BigInt>> = (0..cols)
        .map(|r| {
            let mut row: Vec<BigInt> = (0..rows).map(|i| m[i][r].clone()).collect();
            row.extend((0..cols).map(|j| if j == r { BigInt::one() } else { BigInt::zero() }));
            row
        })
        .collect();
    let mut lead = 0;
    for c in 0..rows {
        // gcd-eliminate column c among rows lead..
        loop {
            let nz: Vec<usize> = (lead..cols).filter(|&r| !aug[r][c].is_zero()).collect();
            if nz.is_empty() {
                break;
            }
            let p = *nz.iter().min_by_key(|&&r| aug[r][c].abs()).unwrap();
            aug.swap(lead, p);
            let mut done = true;
            for r in lead + 1..cols {
                if aug[r][c].is_zero() {
                    continue;
                }
                let q = aug[r][c].div_floor(&aug[lead][c]);
                let pivot_row = aug[lead].clone();
                for (x, y) in aug[r].iter_mut().zip(&pivot_row) {
                    *x -= &q * y;
                }
                if !aug[r][c].is_zero() {
                    done = false;
                }
            }
            if done {
                lead += 1;
                break;
            }
        }
        if lead == cols {
            break;
        }
    }
    aug.into_iter()
        .filter(|row| row[..rows].iter().all(|x| x.is_zero()))
        .map(|row| row[rows..].to_vec())
        .collect()
}

/// Invariant factors of an integer matrix (the nonzero diagonal of its Smith
/// normal form, each dividing the next).
pub fn smith_invariants(m: &IntMatrix, cols: usize) -> Vec<BigInt> {
    let mut a: IntMatrix = m.clone();
    let rows = a.len();
    let mut out = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // find smallest nonzero entry in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        let mut clean = true;
        for i in t + 1..rows {
            let q = a[i][t].div_floor(&a[t][t]);
            if !q.is_zero() {
                let pr = a[t].clone();
                for (x, y) in a[i].iter_mut().zip(&pr) {
                    *x -= &q * y;
                }
            }
            if !a[i][t].is_zero() {
                clean = false;
            }
        }
        for j in t + 1..cols {
            let q = a[t][j].div_floor(&a[t][t]);
            if !q.is_zero() {
                for row in a.iter_mut() {
                    let y = row[t].clone();
                    row[j] -= &q * y;
                }
            }
            if !a[t][j].is_zero() {
                clean = false;
            }
        }
        if !clean {
            continue;
        }
        // divisibility condition: pivot must divide the rest
        let piv = a[t][t].clone();
        let bad = (t + 1..rows).flat_map(|i| (t + 1..cols).map(move |j| (i, j))).find(|&(i, j)| !a[i][j].is_multiple_of(&piv));
        if let Some((i, _)) = bad {
            let ri = a[i].clone();
            for (x, y) in a[t].iter_mut().zip(&ri) {
                *x += y;
            }
            continue;
        }
        out.push(piv.abs());
        t += 1;
    }
    out
}

/// Symplectic basis of an integral skew-symmetric matrix.
///
/// Returns a unimodular `p` (rows = new basis vectors in old coordinates) and
/// the block entries `s_j > 0`, such that `p · S · pᵀ` is block diagonal with
/// blocks [[0, s_j], [−s_j, 0]] followed by a zero block.
pub fn skew_darboux(s: &IntMatrix) -> (IntMatrix, Vec<BigInt>) {
    let n = s.len();
    let mut a = s.clone();
    let mut p: IntMatrix =
        (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect();
    let mut blocks = Vec::new();

    // simultaneous operations on basis vectors
    fn swap(a: &mut IntMatrix, p: &mut IntMatrix, i: usize, j: usize) {
        if i == j {
            return;
        }
        a.swap(i, j);
        for row in a.iter_mut() {
            row.swap(i, j);
        }
        p.swap(i, j);
    }
    // v_i += c v_j
    fn addmul(a: &mut IntMatrix, p: &mut IntMatrix, i: usize, j: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        let rj = a[j].clone();
        for (x, y) in a[i].iter_mut().zip(&rj) {
            *x += c * y;
        }
        for row in a.iter_mut() {
            let y = row[j].clone();
            row[i] += c * y;
        }
        let pj = p[j].clone();
        for (x, y) in p[i].iter_mut().zip(&pj) {
            *x += c * y;
        }
    }
    fn negate(a: &mut IntMatrix, p: &mut IntMatrix, i: usize) {
        for x in a[i].iter_mut() {
            *x = -x.clone();
        }
        for row in a.iter_mut() {
            row[i] = -row[i].clone();
        }
        for x in p[i].iter_mut() {
            *x = -x.clone();
        }
    }

    let mut t = 0;
    while t + 1 < n {
        let mut best: Option<(usize, usize)> = None;
        for i in t..n {
            for j in t..n {
                if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        swap(&mut a, &mut p, t, bi);
        let bj = if bj == t { bi } else { bj };
        swap(&mut a, &mut p, t + 1, bj);
        if a[t][t + 1].is_negative() {
            negate(&mut a, &mut p, t + 1);
        }
        let piv = a[t][t + 1].clone();
        let mut clean = true;
        for k in t + 2..n {
            // S(v_t, v_k) -= c S(v_t, v_{t+1}) via v_k -= c v_{t+1}
            let c = a[t][k].div_floor(&piv);
            addmul(&mut a, &mut p, k, t + 1, &-c);
            // S(v_{t+1}, v_k) += c' piv via v_k -= c' v_t
            let c2 = -(a[t + 1][k].div_floor(&piv));
            addmul(&mut a, &mut p, k, t, &-c2);
            if !a[t][k].is_zero() || !a[t + 1][k].is_zero() {
                clean = false;
            }
        }
        if clean {
            blocks.push(piv);
            t += 2;
        }
    }
    (p, blocks)
}

/// Unimodular inverse of an integer matrix known to have determinant ±1.
pub fn unimodular_inverse(p: &IntMatrix) -> Result<IntMatrix> {
    let n = p.len();
    let q = QMatrix::from_fn(n, n, |i, j| BigRational::from_integer(p[i][j].clone()));
    let inv = q.inverse()?;
    inv.to_integer()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(rows: &[Vec<i64>]) -> IntMatrix {
        int_matrix(rows)
    }

    #[test]
    fn inverse_roundtrip() {
        let m = QMatrix::from_i64_rows(&[vec![2, 1, 0], vec![1, 3, 1], vec![0, 1, 4]]);
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, QMatrix::identity(3));
        assert_eq!(m.determinant().unwrap(), rat_from_i64(18));
    }

    #[test]
    fn singular_inverse_fails() {
        let m = QMatrix::from_i64_rows(&[vec![1, 2], vec![2, 4]]);
        assert!(m.inverse().is_err());
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn kernel_is_saturated() {
        // 2x + 4y = 0 → kernel spanned by (2,-1), not (4,-2)
        let k = integer_kernel(&big(&[vec![2, 4]]), 2);
        assert_eq!(k.len(), 1);
        let v = &k[0];
        assert_eq!(BigInt::from(2) * &v[0] + BigInt::from(4) * &v[1], BigInt::zero());
        assert_eq!(v[0].abs(), BigInt::from(2));
        assert_eq!(v[1].abs(), BigInt::from(1));
    }

    #[test]
    fn smith_of_diag() {
        let inv = smith_invariants(&big(&[vec![2, 0], vec![0, 3]]), 2);
        assert_eq!(inv, vec![BigInt::from(1), BigInt::from(6)]);
        let inv = smith_invariants(&big(&[vec![0, 2], vec![-2, 0]]), 2);
        assert_eq!(inv, vec![BigInt::from(2), BigInt::from(2)]);
    }

    #[test]
    fn darboux_of_punctured_torus_form() {
        let s = big(&[vec![0, 2, -2], vec![-2, 0, 2], vec![2, -2, 0]]);
        let (p, blocks) = skew_darboux(&s);
        assert_eq!(blocks, vec![BigInt::from(2)]);
        let pm = QMatrix::from_fn(3, 3, |i, j| BigRational::from_integer(p[i][j].clone()));
        let sm = QMatrix::from_fn(3, 3, |i, j| BigRational::from_integer(s[i][j].clone()));
        let r = &(&pm * &sm) * &pm.transpose();
        assert_eq!(*r.get(0, 1), rat_from_i64(2));
        assert!(r.get(2, 0).is_zero() && r.get(2, 1).is_zero() && r.get(0, 2).is_zero());
        assert_eq!(pm.determinant().unwrap().abs(), rat_from_i64(1));
    }
}
