//! Builders for lattices with an order-3 fixed-point-free automorphism,
//! assembled from ternary codes over the ring of Eisenstein integers.
//! A rank-k complex lattice becomes a rank-2k real lattice: complex
//! coordinate `a + b*omega` is stored as the integer pair `(a, b)` with
//! the quadratic form `a^2 - a*b + b^2`, and multiplication by omega is
//! the integer block map `(a, b) -> (-b, a - b)`.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::exactlin::{hnf_basis_of_generators, inverse, IntMatrix, Rat, RatMatrix};

/// Tetracode generator over F3: self-dual [4, 2, 3].
pub fn tetracode_basis() -> Vec<Vec<u8>> {
    vec![vec![1, 0, 1, 1], vec![0, 1, 1, 2]]
}

/// Extended ternary Golay generator [I6 | B] over F3: self-dual
/// [12, 6, 6] with every codeword summing to zero.
pub fn ternary_golay_basis() -> Vec<Vec<u8>> {
    let qr5 = [1usize, 4];
    let mut b = vec![vec![0u8; 6]; 6];
    for j in 1..6 {
        b[0][j] = 1;
        b[j][0] = 1;
    }
    for i in 1..6 {
        for j in 1..6 {
            if i == j {
                continue;
            }
            let d = (j + 5 - i) % 5;
            b[i][j] = if qr5.contains(&d) { 1 } else { 2 };
        }
    }
    // Negating the Paley rows makes every basis row sum to zero without
    // breaking self-orthogonality.
    for row in b.iter_mut().skip(1) {
        for x in row.iter_mut() {
            *x = (3 - *x) % 3;
        }
    }
    let mut rows = Vec::with_capacity(6);
    for i in 0..6 {
        let mut row = vec![0u8; 12];
        row[i] = 1;
        row[6..].copy_from_slice(&b[i]);
        rows.push(row);
    }
    rows
}

/// All codewords spanned by `basis` over F3.
pub fn span_f3(basis: &[Vec<u8>]) -> Vec<Vec<u8>> {
    let n = basis.first().map_or(0, |r| r.len());
    let mut words = vec![vec![0u8; n]];
    for row in basis {
        let mut next = Vec::with_capacity(words.len() * 3);
        for w in &words {
            for mult in 0..3u8 {
                let mut v = w.clone();
                for (vi, &ri) in v.iter_mut().zip(row) {
                    *vi = (*vi + mult * ri) % 3;
                }
                next.push(v);
            }
        }
        words = next;
    }
    words.sort();
    words.dedup();
    words
}

#[allow(dead_code)]
pub struct CodeFacts {
    pub size: usize,
    pub min_weight: usize,
    pub self_dual: bool,
    pub all_sum_zero: bool,
    pub contains_all_ones: bool,
}

pub fn code_facts(basis: &[Vec<u8>]) -> CodeFacts {
    let words = span_f3(basis);
    let n = basis[0].len();
    let min_weight = words
        .iter()
        .filter(|w| w.iter().any(|&x| x != 0))
        .map(|w| w.iter().filter(|&&x| x != 0).count())
        .min()
        .unwrap_or(0);
    let dot = |a: &[u8], b: &[u8]| -> u8 {
        a.iter().zip(b).map(|(&x, &y)| x * y).sum::<u8>() % 3
    };
    let self_dual = basis.iter().all(|a| basis.iter().all(|b| dot(a, b) == 0));
    let all_sum_zero = words.iter().all(|w| w.iter().map(|&x| x as u32).sum::<u32>() % 3 == 0);
    let ones = vec![1u8; n];
    let contains_all_ones = words.contains(&ones);
    CodeFacts { size: words.len(), min_weight, self_dual, all_sum_zero, contains_all_ones }
}

/// The minimal-norm argument for these lattices rests on the code being
/// self-dual with the stated minimal weight; refuse to build otherwise.
fn certify_code(basis: &[Vec<u8>], size: usize, min_weight: usize) -> Result<()> {
    let facts = code_facts(basis);
    if facts.size != size || facts.min_weight != min_weight || !facts.self_dual {
        return Err(Error::InvalidStructure("ternary code failed certification".to_string()));
    }
    Ok(())
}

/// Nullspace basis over F3 of the given functionals on F3^dim.
fn nullspace_f3(dim: usize, functionals: &[Vec<u8>]) -> Vec<Vec<u8>> {
    let mut rows: Vec<Vec<u8>> = functionals.iter().map(|f| f.iter().map(|&x| x % 3).collect()).collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut rank = 0usize;
    for col in 0..dim {
        let Some(p) = (rank..rows.len()).find(|&i| rows[i][col] != 0) else { continue };
        rows.swap(rank, p);
        let inv = if rows[rank][col] == 1 { 1 } else { 2 };
        for x in rows[rank].iter_mut() {
            *x = (*x * inv) % 3;
        }
        for i in 0..rows.len() {
            if i != rank && rows[i][col] != 0 {
                let f = rows[i][col];
                for c in 0..dim {
                    rows[i][c] = (rows[i][c] + (3 - f) * rows[rank][c]) % 3;
                }
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    let mut basis = Vec::new();
    for free in 0..dim {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = vec![0u8; dim];
        v[free] = 1;
        for (r, &pc) in pivots.iter().enumerate() {
            let coeff = rows[r][free] % 3;
            v[pc] = (3 - coeff) % 3;
        }
        basis.push(v);
    }
    basis
}

pub struct EisensteinRealization {
    /// Rational generator with `M^T M = gram`.
    pub generator: RatMatrix,
    pub gram: RatMatrix,
    /// Coefficient-space matrix of multiplication by omega.
    pub j: IntMatrix,
}

/// Applies multiplication by omega in interleaved (a, b) coordinates.
fn omega_apply(v: &[BigInt]) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(v.len());
    for pair in v.chunks_exact(2) {
        out.push(-&pair[1]);
        out.push(&pair[0] - &pair[1]);
    }
    out
}

/// Builds the real rank-2k lattice
/// `{v in Z^2k : f(v) = 0 mod 3 for every functional} + span(glue)`,
/// closed under omega, with the Eisenstein quadratic form.
pub fn realize(k: usize, functionals: &[Vec<u8>], glue: &[Vec<i64>]) -> Result<EisensteinRealization> {
    let dim = 2 * k;
    let mut gens: Vec<Vec<BigInt>> = Vec::new();
    for i in 0..dim {
        let mut v = vec![BigInt::from(0); dim];
        v[i] = BigInt::from(3);
        gens.push(v);
    }
    for nv in nullspace_f3(dim, functionals) {
        gens.push(nv.iter().map(|&x| BigInt::from(x)).collect());
    }
    for g in glue {
        gens.push(g.iter().map(|&x| BigInt::from(x)).collect());
    }
    // Close the span under omega.
    for g in gens.clone() {
        gens.push(omega_apply(&g));
    }
    let basis_rows = hnf_basis_of_generators(dim, &gens)?;
    let mut basis = IntMatrix::zero(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            basis[(i, j)] = i64::try_from(basis_rows[i][j].clone())
                .map_err(|_| Error::InvalidStructure("basis entry exceeds i64".to_string()))?;
        }
    }

    // Quadratic form Q = blockdiag([[1, -1/2], [-1/2, 1]]).
    let q = RatMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            Rat::one()
        } else if i / 2 == j / 2 {
            Rat::new(-1, 2)
        } else {
            Rat::zero()
        }
    });
    let b_rat = RatMatrix::from_int_rows(&basis.to_rows());
    let gram = b_rat.transpose().mul(&q).mul(&b_rat);

    // J = B^{-1} Omega B must be integral.
    let omega = RatMatrix::from_fn(dim, dim, |i, j| {
        if i / 2 != j / 2 {
            return Rat::zero();
        }
        match (i % 2, j % 2) {
            (0, 0) => Rat::zero(),
            (0, 1) => Rat::from_int(-1),
            (1, 0) => Rat::one(),
            (1, 1) => Rat::from_int(-1),
            _ => unreachable!(),
        }
    });
    let j_rat = inverse(&b_rat)?.mul(&omega).mul(&b_rat);
    let mut j = IntMatrix::zero(dim, dim);
    for a in 0..dim {
        for b in 0..dim {
            j[(a, b)] = j_rat.at(a, b).to_i64().ok_or_else(|| {
                Error::InvalidStructure("omega does not preserve the lattice".to_string())
            })?;
        }
    }

    // Rational square root of each 2x2 block: per complex coordinate,
    // (a, b) -> a*(1,0,0,0) + b*(-1/2,1/2,1/2,1/2) in E^4.
    let e_block = [
        [Rat::one(), Rat::new(-1, 2)],
        [Rat::zero(), Rat::new(1, 2)],
        [Rat::zero(), Rat::new(1, 2)],
        [Rat::zero(), Rat::new(1, 2)],
    ];
    let embed = RatMatrix::from_fn(4 * k, dim, |i, j| {
        if i / 4 == j / 2 {
            e_block[i % 4][j % 2].clone()
        } else {
            Rat::zero()
        }
    });
    let generator = embed.mul(&b_rat);
    debug_assert_eq!(generator.gram(), gram);

    Ok(EisensteinRealization { generator, gram, j })
}

/// Functional layout helper: coefficient `c_i` on complex coordinate `i`
/// applied to the class `(a_i + b_i) mod 3`.
fn class_functional(k: usize, coeffs: &[u8]) -> Vec<u8> {
    assert_eq!(coeffs.len(), k);
    let mut f = vec![0u8; 2 * k];
    for i in 0..k {
        f[2 * i] = coeffs[i] % 3;
        f[2 * i + 1] = coeffs[i] % 3;
    }
    f
}

/// E6* as the rank-3 Eisenstein lattice with zero coordinate-class sum.
/// Minimal norm 2, covering radius squared 1.
pub fn e6_star() -> Result<EisensteinRealization> {
    realize(3, &[class_functional(3, &[1, 1, 1])], &[])
}

/// E8 as the rank-4 Eisenstein lattice over the tetracode.
/// Minimal norm 3, covering radius squared 3/2.
pub fn e8() -> Result<EisensteinRealization> {
    let basis = tetracode_basis();
    certify_code(&basis, 9, 3)?;
    let conditions: Vec<Vec<u8>> = basis.iter().map(|row| class_functional(4, row)).collect();
    realize(4, &conditions, &[])
}

/// The Leech lattice as the rank-12 Eisenstein lattice over the ternary
/// Golay code with zero coordinate sums, plus one glue class. Minimal
/// norm 6, covering radius squared 3: any vector in a nonzero code class
/// has at least 6 nonzero coordinates; class-zero vectors are theta times
/// a vector with coordinate sum divisible by theta, of norm at least 2;
/// and the glue classes are unit lifts of nonzero codewords.
pub fn leech() -> Result<EisensteinRealization> {
    let golay = ternary_golay_basis();
    certify_code(&golay, 729, 6)?;
    let facts = code_facts(&golay);
    if !facts.all_sum_zero {
        return Err(Error::InvalidStructure("golay variant is not sum-zero".to_string()));
    }
    let mut conditions: Vec<Vec<u8>> =
        golay.iter().map(|row| class_functional(12, row)).collect();
    let mut sum_a = vec![0u8; 24];
    let mut sum_b = vec![0u8; 24];
    for i in 0..12 {
        sum_a[2 * i] = 1;
        sum_b[2 * i + 1] = 1;
    }
    conditions.push(sum_a);
    conditions.push(sum_b);

    // Glue: a lift of the first basis codeword with both coordinate sums
    // nonzero mod 3 (theta * glue already satisfies every condition).
    let c0 = &golay[0];
    let mut glue = vec![0i64; 24];
    let first_support = c0.iter().position(|&x| x != 0).expect("nonzero codeword");
    for (i, &ci) in c0.iter().enumerate() {
        if i == first_support {
            glue[2 * i] = ci as i64 - 1;
            glue[2 * i + 1] = 1;
        } else {
            glue[2 * i] = ci as i64;
        }
    }
    realize(12, &conditions, &[glue])
}
