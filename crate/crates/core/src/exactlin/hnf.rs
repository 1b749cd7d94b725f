use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Dense integer matrix, row-major, `i64` entries. Arithmetic that can
/// grow intermediates (determinants, normal forms) runs over `BigInt`
/// internally and converts back.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<i64>,
}

impl std::fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, entries: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        IntMatrix { rows: r, cols: c, entries: rows.iter().flatten().copied().collect() }
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

    pub fn row(&self, i: usize) -> &[i64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[i64]) {
        assert_eq!(v.len(), self.rows);
        for i in 0..self.rows {
            self[(i, j)] = v[i];
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// `self * v` with i128 accumulation.
    pub fn mul_vec(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc: i128 = 0;
                for j in 0..self.cols {
                    acc += self[(i, j)] as i128 * v[j] as i128;
                }
                i64::try_from(acc).expect("integer matvec overflow")
            })
            .collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc: i128 = 0;
                for k in 0..self.cols {
                    acc += self[(i, k)] as i128 * other[(k, j)] as i128;
                }
                out[(i, j)] = i64::try_from(acc).expect("integer matmul overflow");
            }
        }
        out
    }

    /// Exact determinant via fraction-free elimination over `BigInt`.
    pub fn det_bigint(&self) -> Result<BigInt> {
        if !self.is_square() {
            return Err(Error::NonSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut m: Vec<Vec<BigInt>> =
            (0..n).map(|i| self.row(i).iter().map(|&x| BigInt::from(x)).collect()).collect();
        let mut sign = 1i64;
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[k][k].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                    return Ok(BigInt::zero());
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
        Ok(m[n - 1][n - 1].clone() * sign)
    }

    pub fn max_abs(&self) -> i64 {
        self.entries.iter().map(|&x| x.abs()).max().unwrap_or(0)
    }

    pub fn is_unimodular(&self) -> bool {
        self.is_square()
            && self.det_bigint().map(|d| d.magnitude() == BigInt::one().magnitude()).unwrap_or(false)
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        &mut self.entries[i * self.cols + j]
    }
}

/// Reduces `e` into the near-symmetric residue system
/// `-floor(l/2) + {0, ..., l-1}` modulo `l > 0`; returns the reduced entry
/// and the quotient taken out.
fn shift_reduce(e: &BigInt, l: &BigInt) -> (BigInt, BigInt) {
    debug_assert!(l.is_positive());
    let half: BigInt = l / 2;
    let mut r: BigInt = (e + &half) % l;
    if r.is_negative() {
        r += l;
    }
    let reduced = r - &half;
    let q = (e - &reduced) / l;
    (reduced, q)
}

struct ColumnWork {
    n: usize,
    w: Vec<Vec<BigInt>>,
    u: Vec<Vec<BigInt>>,
}

impl ColumnWork {
    fn new(c: &IntMatrix) -> Self {
        let n = c.rows();
        let w = (0..n).map(|i| c.row(i).iter().map(|&x| BigInt::from(x)).collect()).collect();
        let u = (0..n)
            .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
            .collect();
        ColumnWork { n, w, u }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.n {
            self.w[i].swap(a, b);
            self.u[i].swap(a, b);
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.n {
            self.w[i][j] = -std::mem::take(&mut self.w[i][j]);
            self.u[i][j] = -std::mem::take(&mut self.u[i][j]);
        }
    }

    /// `col_j -= q * col_a`
    fn sub_col(&mut self, j: usize, q: &BigInt, a: usize) {
        if q.is_zero() {
            return;
        }
        for i in 0..self.n {
            let dw = q * &self.w[i][a];
            self.w[i][j] -= dw;
            let du = q * &self.u[i][a];
            self.u[i][j] -= du;
        }
    }
}

/// Column-style Hermite normal form with the near-symmetric off-pivot range:
/// returns `(H, U)` with `H = C * U`, `U` unimodular, `H` lower triangular
/// with positive diagonal, and each below-diagonal entry `H[i][j]` (`j < i`)
/// in `-floor(H[i][i]/2) + {0, ..., H[i][i]-1}`. Two nonsingular integer
/// matrices with the same column span map to the same `H`.
pub fn hnf_modified(c: &IntMatrix) -> Result<(IntMatrix, IntMatrix)> {
    if !c.is_square() {
        return Err(Error::NonSquare { rows: c.rows(), cols: c.cols() });
    }
    let n = c.rows();
    if c.det_bigint()?.is_zero() {
        return Err(Error::Singular);
    }
    let mut work = ColumnWork::new(c);

    for r in 0..n {
        // Concentrate the gcd of row r (over columns >= r) into column r.
        loop {
            let mut best: Option<usize> = None;
            for j in r..n {
                if work.w[r][j].is_zero() {
                    continue;
                }
                best = match best {
                    None => Some(j),
                    Some(b) if work.w[r][j].magnitude() < work.w[r][b].magnitude() => Some(j),
                    keep => keep,
                };
            }
            let a = best.expect("nonsingular matrix has a pivot in every row");
            let mut done = true;
            for j in r..n {
                if j == a || work.w[r][j].is_zero() {
                    continue;
                }
                // Rounded quotient keeps remainders small.
                let (_, q) = shift_reduce(&work.w[r][j].clone(), &work.w[r][a].abs());
                let q = if work.w[r][a].is_negative() { -q } else { q };
                work.sub_col(j, &q, a);
                if !work.w[r][j].is_zero() {
                    done = false;
                }
            }
            if done {
                work.swap_cols(r, a);
                break;
            }
        }
        if work.w[r][r].is_negative() {
            work.negate_col(r);
        }
    }

    // Reduce below-diagonal entries into the shifted range.
    for j in 0..n {
        for i in j + 1..n {
            let pivot = work.w[i][i].clone();
            let (_, q) = shift_reduce(&work.w[i][j].clone(), &pivot);
            work.sub_col(j, &q, i);
        }
    }

    let to_int = |m: &Vec<Vec<BigInt>>| -> Result<IntMatrix> {
        let mut out = IntMatrix::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = i64::try_from(m[i][j].clone()).map_err(|_| {
                    Error::InvalidInput("normal form entry exceeds i64".to_string())
                })?;
            }
        }
        Ok(out)
    };
    let h = to_int(&work.w)?;
    let u = to_int(&work.u)?;
    debug_assert!(u.is_unimodular());
    Ok((h, u))
}

/// Square basis (lower-triangular Hermite form over `BigInt`) of the
/// integer column span of an arbitrary full-rank generating set.
pub fn hnf_basis_of_generators(dim: usize, gens: &[Vec<BigInt>]) -> Result<Vec<Vec<BigInt>>> {
    assert!(gens.iter().all(|g| g.len() == dim));
    let k = gens.len();
    // w[i][j]: row i of the dim x k generator matrix.
    let mut w: Vec<Vec<BigInt>> = (0..dim).map(|i| gens.iter().map(|g| g[i].clone()).collect()).collect();
    let mut placed = 0usize;
    for r in 0..dim {
        loop {
            let mut best: Option<usize> = None;
            for j in placed..k {
                if w[r][j].is_zero() {
                    continue;
                }
                best = match best {
                    None => Some(j),
                    Some(b) if w[r][j].magnitude() < w[r][b].magnitude() => Some(j),
                    keep => keep,
                };
            }
            let Some(a) = best else {
                return Err(Error::RankDeficient);
            };
            let mut done = true;
            for j in placed..k {
                if j == a || w[r][j].is_zero() {
                    continue;
                }
                let (_, q) = shift_reduce(&w[r][j].clone(), &w[r][a].abs());
                let q = if w[r][a].is_negative() { -q } else { q };
                if !q.is_zero() {
                    for row in w.iter_mut() {
                        let d = &q * &row[a];
                        row[j] -= d;
                    }
                }
                if !w[r][j].is_zero() {
                    done = false;
                }
            }
            if done {
                for row in w.iter_mut() {
                    row.swap(placed, a);
                }
                break;
            }
        }
        if w[r][placed].is_negative() {
            for row in w.iter_mut() {
                row[placed] = -std::mem::take(&mut row[placed]);
            }
        }
        placed += 1;
    }
    // Reduce below-diagonal entries modulo the row pivot.
    for j in 0..dim {
        for i in j + 1..dim {
            let pivot = w[i][i].clone();
            let (_, q) = shift_reduce(&w[i][j].clone(), &pivot);
            if !q.is_zero() {
                for row in w.iter_mut() {
                    let d = &q * &row[i];
                    row[j] -= d;
                }
            }
        }
    }
    Ok((0..dim).map(|i| w[i][..dim].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hnf_identity_is_fixed() {
        let c = IntMatrix::identity(4);
        let (h, u) = hnf_modified(&c).unwrap();
        assert_eq!(h, IntMatrix::identity(4));
        assert_eq!(u, IntMatrix::identity(4));
    }

    #[test]
    fn hnf_shape_and_factorization() {
        let c = IntMatrix::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, 4, 16]]);
        let (h, u) = hnf_modified(&c).unwrap();
        assert!(u.is_unimodular());
        assert_eq!(c.mul(&u), h);
        // Lower triangular, positive diagonal, shifted range below.
        for i in 0..3 {
            assert!(h[(i, i)] > 0);
            for j in (i + 1)..3 {
                assert_eq!(h[(i, j)], 0);
            }
            for j in 0..i {
                let l = h[(i, i)];
                assert!(h[(i, j)] >= -(l / 2) && h[(i, j)] <= l - 1 - l / 2);
            }
        }
        let dc = c.det_bigint().unwrap().magnitude().clone();
        let dh = h.det_bigint().unwrap().magnitude().clone();
        assert_eq!(dc, dh);
    }

    #[test]
    fn hnf_singular_rejected() {
        let c = IntMatrix::from_rows(&[vec![1, 2], vec![2, 4]]);
        assert!(matches!(hnf_modified(&c), Err(Error::Singular)));
    }

    #[test]
    fn generator_basis_of_full_lattice() {
        let gens: Vec<Vec<BigInt>> = vec![
            vec![BigInt::from(2), BigInt::from(0)],
            vec![BigInt::from(0), BigInt::from(2)],
            vec![BigInt::from(1), BigInt::from(1)],
        ];
        let basis = hnf_basis_of_generators(2, &gens).unwrap();
        // Index-2 sublattice of Z^2 generated by (2,0),(0,2),(1,1).
        let det = &basis[0][0] * &basis[1][1] - &basis[0][1] * &basis[1][0];
        assert_eq!(det.magnitude(), BigInt::from(2).magnitude());
    }
}
