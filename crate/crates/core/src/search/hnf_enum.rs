//! Streaming enumeration of all sublattices of a given index: every
//! subgroup of Z^n of index d has exactly one lower-triangular basis with
//! positive diagonal (product d) and below-diagonal entries in the
//! near-symmetric range of their row pivot.

use crate::exactlin::IntMatrix;

/// Ordered factorizations of `d` into `n` positive factors.
fn factorizations(n: usize, d: i64) -> Vec<Vec<i64>> {
    if n == 1 {
        return vec![vec![d]];
    }
    let mut out = Vec::new();
    for first in 1..=d {
        if d % first != 0 {
            continue;
        }
        for rest in factorizations(n - 1, d / first) {
            let mut f = Vec::with_capacity(n);
            f.push(first);
            f.extend(rest);
            out.push(f);
        }
    }
    out
}

/// Number of index-`d` sublattices: sum over diagonals of the product of
/// per-row ranges.
pub fn hnf_count(n: usize, d: i64) -> u128 {
    factorizations(n, d)
        .iter()
        .map(|diag| {
            diag.iter()
                .enumerate()
                .map(|(i, &pivot)| (pivot as u128).pow(i as u32))
                .product::<u128>()
        })
        .sum()
}

/// Calls `visit` for every canonical index-`d` matrix in a fixed
/// deterministic order (diagonals lexicographic, then the below-diagonal
/// odometer); stops early when `visit` returns false.
pub fn for_each_hnf(n: usize, d: i64, visit: &mut impl FnMut(&IntMatrix) -> bool) {
    assert!(d >= 1);
    for diag in factorizations(n, d) {
        // Below-diagonal positions, row-major; entry at (i, j) ranges over
        // -floor(p/2) + {0, ..., p-1} with p the row pivot.
        let mut slots: Vec<(usize, usize, i64, i64)> = Vec::new();
        for i in 0..n {
            let pivot = diag[i];
            let lo = -(pivot / 2);
            for j in 0..i {
                slots.push((i, j, lo, pivot));
            }
        }
        let mut m = IntMatrix::zero(n, n);
        for (i, &p) in diag.iter().enumerate() {
            m[(i, i)] = p;
        }
        for &(i, j, lo, _) in &slots {
            m[(i, j)] = lo;
        }
        loop {
            if !visit(&m) {
                return;
            }
            // Advance the odometer; done with this diagonal when it wraps.
            let mut advanced = false;
            let mut k = slots.len();
            while k > 0 {
                k -= 1;
                let (i, j, lo, range) = slots[k];
                if m[(i, j)] < lo + range - 1 {
                    m[(i, j)] += 1;
                    for &(i2, j2, lo2, _) in &slots[k + 1..] {
                        m[(i2, j2)] = lo2;
                    }
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                break;
            }
        }
    }
}
