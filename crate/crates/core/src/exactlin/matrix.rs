use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::rat::Rat;
use crate::error::{Error, Result};

pub type RatVector = Vec<Rat>;

/// Dense rational matrix, row-major.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rat>,
}

impl std::fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "RatMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.at(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl RatMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, entries: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        RatMatrix { rows: r, cols: c, entries: rows.into_iter().flatten().collect() }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rat) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        RatMatrix { rows, cols, entries }
    }

    pub fn from_int_rows(rows: &[Vec<i64>]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Rat::from_int(x)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &Rat {
        &self.entries[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Rat {
        &mut self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> RatVector {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rat>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> RatMatrix {
        RatMatrix::from_fn(self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        RatMatrix::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = Rat::zero();
            for k in 0..self.cols {
                acc += &(self.at(i, k) * other.at(k, j));
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[Rat]) -> RatVector {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = Rat::zero();
                for k in 0..self.cols {
                    acc += &(self.at(i, k) * &v[k]);
                }
                acc
            })
            .collect()
    }

    pub fn scale(&self, s: &Rat) -> RatMatrix {
        RatMatrix::from_fn(self.rows, self.cols, |i, j| self.at(i, j) * s)
    }

    pub fn add(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        RatMatrix::from_fn(self.rows, self.cols, |i, j| self.at(i, j) + other.at(i, j))
    }

    pub fn sub(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        RatMatrix::from_fn(self.rows, self.cols, |i, j| self.at(i, j) - other.at(i, j))
    }

    /// Gram matrix `self^T * self`.
    pub fn gram(&self) -> RatMatrix {
        self.transpose().mul(self)
    }

    pub fn is_symmetric(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if self.at(i, j) != self.at(j, i) {
                    return false;
                }
            }
        }
        true
    }

    /// Rank via exact Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..m.cols {
            let pivot = (rank..m.rows).find(|&i| !m.at(i, col).is_zero());
            let Some(pivot) = pivot else { continue };
            m.swap_rows(rank, pivot);
            for i in (rank + 1)..m.rows {
                if m.at(i, col).is_zero() {
                    continue;
                }
                let factor = &(m.at(i, col) / m.at(rank, col));
                for j in col..m.cols {
                    let delta = m.at(rank, j) * factor;
                    *m.at_mut(i, j) -= &delta;
                }
            }
            rank += 1;
            if rank == m.rows {
                break;
            }
        }
        rank
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Scales each row by the lcm of its denominators, returning the integer
    /// matrix and the per-row scale factors.
    fn integer_rows(&self) -> (Vec<Vec<BigInt>>, Vec<BigInt>) {
        let mut int_rows = Vec::with_capacity(self.rows);
        let mut scales = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut lcm = BigInt::one();
            for j in 0..self.cols {
                lcm = lcm.lcm(self.at(i, j).denom());
            }
            let row = (0..self.cols)
                .map(|j| {
                    let e = self.at(i, j);
                    e.numer() * (&lcm / e.denom())
                })
                .collect();
            int_rows.push(row);
            scales.push(lcm);
        }
        (int_rows, scales)
    }
}

/// Exact determinant by fraction-free (Bareiss) elimination on the
/// denominator-cleared matrix.
pub fn determinant(a: &RatMatrix) -> Result<Rat> {
    if !a.is_square() {
        return Err(Error::NonSquare { rows: a.rows(), cols: a.cols() });
    }
    let n = a.rows();
    if n == 0 {
        return Ok(Rat::one());
    }
    let (mut m, scales) = a.integer_rows();
    let det_scale = scales.iter().fold(BigInt::one(), |acc, s| acc * s);

    let mut sign = 1i64;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return Ok(Rat::zero());
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[k][k] * &m[i][j] - &m[i][k] * &m[k][j];
                m[i][j] = &num / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let det_int = m[n - 1][n - 1].clone() * sign;
    Ok(Rat::from_big(det_int, det_scale))
}

/// Exact solve of `A x = b` for `A` with full column rank. Returns `None`
/// when `b` is outside the column space.
pub fn solve(a: &RatMatrix, b: &[Rat]) -> Result<Option<RatVector>> {
    assert_eq!(a.rows(), b.len(), "dimension mismatch");
    let (m, n) = (a.rows(), a.cols());
    if m < n {
        return Err(Error::RankDeficient);
    }
    // Augmented, denominator-cleared system; fraction-free forward elimination.
    let aug = RatMatrix::from_fn(m, n + 1, |i, j| {
        if j < n { a.at(i, j).clone() } else { b[i].clone() }
    });
    let (mut w, _) = aug.integer_rows();

    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..m).find(|&i| !w[i][k].is_zero()) else {
            return Err(Error::RankDeficient);
        };
        w.swap(k, p);
        for i in k + 1..m {
            for j in k + 1..=n {
                let num = &w[k][k] * &w[i][j] - &w[i][k] * &w[k][j];
                w[i][j] = &num / &prev;
            }
            w[i][k] = BigInt::zero();
        }
        prev = w[k][k].clone();
    }
    // Rows past the pivot block must be fully annihilated for consistency.
    for row in w.iter().skip(n) {
        if !row[n].is_zero() {
            return Ok(None);
        }
    }
    // Back substitution over rationals.
    let mut x = vec![Rat::zero(); n];
    for i in (0..n).rev() {
        let mut acc = Rat::from_big(w[i][n].clone(), BigInt::one());
        for j in i + 1..n {
            acc -= &(&Rat::from_big(w[i][j].clone(), BigInt::one()) * &x[j]);
        }
        x[i] = acc / Rat::from_big(w[i][i].clone(), BigInt::one());
    }
    Ok(Some(x))
}

/// Exact inverse of a nonsingular square matrix.
pub fn inverse(a: &RatMatrix) -> Result<RatMatrix> {
    if !a.is_square() {
        return Err(Error::NonSquare { rows: a.rows(), cols: a.cols() });
    }
    let n = a.rows();
    // Gauss-Jordan on [A | I].
    let mut w = RatMatrix::from_fn(n, 2 * n, |i, j| {
        if j < n {
            a.at(i, j).clone()
        } else if j - n == i {
            Rat::one()
        } else {
            Rat::zero()
        }
    });
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !w.at(i, k).is_zero()) else {
            return Err(Error::Singular);
        };
        w.swap_rows(k, p);
        let pivot = w.at(k, k).clone();
        for j in k..2 * n {
            let v = w.at(k, j) / &pivot;
            *w.at_mut(k, j) = v;
        }
        for i in 0..n {
            if i == k || w.at(i, k).is_zero() {
                continue;
            }
            let factor = w.at(i, k).clone();
            for j in k..2 * n {
                let delta = w.at(k, j) * &factor;
                *w.at_mut(i, j) -= &delta;
            }
        }
    }
    Ok(RatMatrix::from_fn(n, n, |i, j| w.at(i, j + n).clone()))
}

/// Moore-Penrose pseudoinverse `(A^T A)^{-1} A^T` for full column rank `A`.
pub fn pseudoinverse(a: &RatMatrix) -> Result<RatMatrix> {
    let gram = a.gram();
    let gram_inv = inverse(&gram).map_err(|_| Error::RankDeficient)?;
    Ok(gram_inv.mul(&a.transpose()))
}

/// Writes a positive rational as a sum of at most four rational squares,
/// so that any positive scaling of a quadratic form stays rationally
/// realizable. Returns the square roots.
pub fn rational_four_squares(s: &Rat) -> Vec<Rat> {
    assert!(s.is_positive(), "scale must be positive");
    // s = p/q = pq / q^2; decompose N = pq over the integers.
    let n = s.numer() * s.denom();
    let q = s.denom().clone();
    let parts = four_squares_int(&n);
    parts
        .into_iter()
        .filter(|p| !p.is_zero())
        .map(|p| Rat::from_big(p, q.clone()))
        .collect()
}

fn four_squares_int(n: &BigInt) -> Vec<BigInt> {
    assert!(n.is_positive());
    let isqrt = |x: &BigInt| -> BigInt { num_integer::Roots::sqrt(x) };
    let r = isqrt(n);
    if &(&r * &r) == n {
        return vec![r];
    }
    // Two and three squares by bounded search, four guaranteed by Lagrange.
    let mut a = r.clone();
    while a.is_positive() {
        let rem = n - &a * &a;
        let b = isqrt(&rem);
        if &b * &b == rem {
            return vec![a, b];
        }
        a -= 1;
    }
    let mut a = r.clone();
    while a.is_positive() {
        let rem1 = n - &a * &a;
        let r1 = isqrt(&rem1);
        let mut b = r1.clone();
        while b.is_positive() {
            let rem2 = &rem1 - &b * &b;
            if rem2.is_zero() {
                b -= 1;
                continue;
            }
            let c = isqrt(&rem2);
            if &c * &c == rem2 {
                return vec![a, b, c];
            }
            b -= 1;
        }
        a -= 1;
    }
    let mut a = r;
    while a.is_positive() {
        let rem1 = n - &a * &a;
        let mut b = isqrt(&rem1);
        while b.is_positive() {
            let rem2 = &rem1 - &b * &b;
            if rem2.is_zero() {
                b -= 1;
                continue;
            }
            let mut c = isqrt(&rem2);
            while c.is_positive() {
                let rem3 = &rem2 - &c * &c;
                if rem3.is_zero() {
                    c -= 1;
                    continue;
                }
                let d = isqrt(&rem3);
                if &d * &d == rem3 {
                    return vec![a, b, c, d];
                }
                c -= 1;
            }
            b -= 1;
        }
        a -= 1;
    }
    unreachable!("four-square decomposition exists for every positive integer")
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    assert_eq!(a.len(), b.len());
    let mut acc = Rat::zero();
    for (x, y) in a.iter().zip(b) {
        acc += &(x * y);
    }
    acc
}

pub fn vec_sub(a: &[Rat], b: &[Rat]) -> RatVector {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_add(a: &[Rat], b: &[Rat]) -> RatVector {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_scale(a: &[Rat], s: &Rat) -> RatVector {
    a.iter().map(|x| x * s).collect()
}
