use std::collections::HashSet;

use super::{eisenstein, Lattice, LatticeNode};
use crate::error::{Error, Result};
use crate::exactlin::{inverse, IntMatrix, Rat, RatMatrix, RatVector};

/// Returns a named lattice. `n` is required for the parametric families
/// (`Zn`, `An`, `An_star_dilated`, `Dn`, `Dn_star`) and ignored otherwise.
pub fn catalog(name: &str, n: Option<usize>) -> Result<Lattice> {
    match name {
        "Zn" => zn(required(n, name)?),
        "An" => an(required(n, name)?),
        "An_star_dilated" => an_star_dilated(required(n, name)?),
        "Dn" => dn(required(n, name)?),
        "Dn_star" => dn_star(required(n, name)?),
        "E6_star" => e6_star(),
        "E7_star_paper" => e7_star_paper(),
        "E8" => e8(),
        "Leech" => leech(),
        _ => Err(Error::UnknownLattice(name.to_string())),
    }
}

fn required(n: Option<usize>, name: &str) -> Result<usize> {
    let n = n.ok_or_else(|| Error::InvalidInput(format!("lattice `{name}` needs a rank")))?;
    if n == 0 {
        return Err(Error::InvalidInput("rank must be positive".to_string()));
    }
    Ok(n)
}

fn unit(m: usize, i: usize) -> RatVector {
    let mut v = vec![Rat::zero(); m];
    v[i] = Rat::one();
    v
}

/// Simple roots of the hyperoctahedral group: coordinate swaps plus the
/// last-axis sign flip. Valid for Z^n, D_n and D_n*.
fn signed_permutation_normals(m: usize) -> Vec<RatVector> {
    let mut w = Vec::new();
    for i in 0..m - 1 {
        let mut v = vec![Rat::zero(); m];
        v[i] = Rat::one();
        v[i + 1] = Rat::from_int(-1);
        w.push(v);
    }
    w.push(unit(m, m - 1));
    w
}

fn zn(n: usize) -> Result<Lattice> {
    Lattice::with_metadata(
        Some(format!("Zn:{n}")),
        RatMatrix::identity(n),
        Some(Rat::new(n as i64, 4)),
        Some(Rat::one()),
        signed_permutation_normals(n),
        None,
        false,
    )
}

/// Root lattice A_n scaled to minimal norm 1 via the norm-halving
/// embedding x -> (x/2, x/2).
fn an(n: usize) -> Result<Lattice> {
    let m_amb = n + 1;
    let root = RatMatrix::from_fn(m_amb, n, |i, j| {
        if i == j {
            Rat::one()
        } else if i == j + 1 {
            Rat::from_int(-1)
        } else {
            Rat::zero()
        }
    });
    let gen = RatMatrix::from_fn(2 * m_amb, n, |i, j| {
        let r = i % m_amb;
        root.at(r, j) * &Rat::new(1, 2)
    });
    // Mirrors through the basis roots; for n = 2 also the vertex mirror,
    // giving the full order-12 point group of the hexagonal lattice.
    let mut reflections: Vec<RatVector> = (0..n)
        .map(|j| (0..2 * m_amb).map(|i| gen.at(i, j).clone()).collect())
        .collect();
    if n == 2 {
        let long: RatVector = (0..2 * m_amb).map(|i| gen.at(i, 0) - gen.at(i, 1)).collect();
        reflections.push(long);
    }
    let a = n.div_ceil(2) as i64;
    let covering = Rat::new(a * (n as i64 + 1 - a), 2 * (n as i64 + 1));
    let eis = if n == 2 {
        Some(IntMatrix::from_rows(&[vec![0, -1], vec![1, -1]]))
    } else {
        None
    };
    Lattice::with_metadata(
        Some(format!("An:{n}")),
        gen,
        Some(covering),
        Some(Rat::one()),
        reflections,
        eis,
        false,
    )
}

/// The (n+1)-fold dilation of A_n*: columns have -n on the diagonal and 1
/// elsewhere, with an all-ones last row.
fn an_star_dilated(n: usize) -> Result<Lattice> {
    let gen = RatMatrix::from_fn(n + 1, n, |i, j| {
        if i == j {
            Rat::from_int(-(n as i64))
        } else {
            Rat::one()
        }
    });
    // Coordinate transpositions of E^{n+1} generate S_{n+1}.
    let mut reflections = Vec::new();
    for i in 0..n {
        let mut v = vec![Rat::zero(); n + 1];
        v[i] = Rat::one();
        v[i + 1] = Rat::from_int(-1);
        reflections.push(v);
    }
    let nn = n as i64;
    Lattice::with_metadata(
        Some(format!("An_star_dilated:{n}")),
        gen,
        Some(Rat::new(nn * (nn + 1) * (nn + 2), 12)),
        Some(Rat::from_int(nn * (nn + 1))),
        reflections,
        None,
        false,
    )
}

fn dn(n: usize) -> Result<Lattice> {
    if n < 3 {
        return Err(Error::InvalidInput("Dn needs n >= 3".to_string()));
    }
    let gen = RatMatrix::from_fn(n, n, |i, j| match j {
        0 => {
            if i <= 1 {
                Rat::from_int(-1)
            } else {
                Rat::zero()
            }
        }
        1 => match i {
            0 => Rat::one(),
            1 => Rat::from_int(-1),
            _ => Rat::zero(),
        },
        _ => {
            if i + 1 == j {
                Rat::one()
            } else if i == j {
                Rat::from_int(-1)
            } else {
                Rat::zero()
            }
        }
    });
    let covering = if n <= 4 { Rat::one() } else { Rat::new(n as i64, 4) };
    let eis = if n == 4 { Some(d4_eisenstein_j(&gen)?) } else { None };
    Lattice::with_metadata(
        Some(format!("Dn:{n}")),
        gen,
        Some(covering),
        Some(Rat::from_int(2)),
        signed_permutation_normals(n),
        eis,
        false,
    )
}

fn dn_star(n: usize) -> Result<Lattice> {
    if n < 3 {
        return Err(Error::InvalidInput("Dn_star needs n >= 3".to_string()));
    }
    let gen = RatMatrix::from_fn(n, n, |i, j| {
        if j == n - 1 {
            Rat::new(1, 2)
        } else if i == j {
            Rat::one()
        } else {
            Rat::zero()
        }
    });
    let min = if n <= 4 { Rat::new(n as i64, 4) } else { Rat::one() };
    Lattice::with_metadata(
        Some(format!("Dn_star:{n}")),
        gen,
        None,
        Some(min),
        signed_permutation_normals(n),
        None,
        false,
    )
}

fn check_gram_det(gram: &RatMatrix, expect: Rat) -> Result<()> {
    let det = crate::exactlin::determinant(gram)?;
    if det != expect {
        return Err(Error::IntegrityMismatch {
            what: "eisenstein gram determinant",
            declared: expect.to_string(),
            computed: det.to_string(),
        });
    }
    Ok(())
}

/// Multiplication by the unit quaternion (-1+i+j+k)/2 fixes D4 setwise;
/// conjugating into the basis gives the order-3 fixed-point-free map.
fn d4_eisenstein_j(gen: &RatMatrix) -> Result<IntMatrix> {
    let q = RatMatrix::from_rows(vec![
        vec![Rat::new(-1, 2), Rat::new(-1, 2), Rat::new(-1, 2), Rat::new(-1, 2)],
        vec![Rat::new(1, 2), Rat::new(-1, 2), Rat::new(-1, 2), Rat::new(1, 2)],
        vec![Rat::new(1, 2), Rat::new(1, 2), Rat::new(-1, 2), Rat::new(-1, 2)],
        vec![Rat::new(1, 2), Rat::new(-1, 2), Rat::new(1, 2), Rat::new(-1, 2)],
    ]);
    let j_rat = inverse(gen)?.mul(&q).mul(gen);
    let mut j = IntMatrix::zero(4, 4);
    for a in 0..4 {
        for b in 0..4 {
            j[(a, b)] = j_rat.at(a, b).to_i64().ok_or_else(|| {
                Error::InvalidStructure("quaternion map does not preserve D4".to_string())
            })?;
        }
    }
    Ok(j)
}

fn e6_star() -> Result<Lattice> {
    let r = eisenstein::e6_star()?;
    check_gram_det(&r.gram, Rat::new(243, 64))?;
    Lattice::with_metadata(
        Some("E6_star".to_string()),
        r.generator,
        Some(Rat::one()),
        Some(Rat::from_int(2)),
        Vec::new(),
        Some(r.j),
        false,
    )
}

fn e8() -> Result<Lattice> {
    let r = eisenstein::e8()?;
    check_gram_det(&r.gram, Rat::new(6561, 256))?;
    Lattice::with_metadata(
        Some("E8".to_string()),
        r.generator,
        Some(Rat::new(3, 2)),
        Some(Rat::from_int(3)),
        Vec::new(),
        Some(r.j),
        false,
    )
}

/// The Leech entry is ingested from the bundled data file; only its
/// metadata feeds the bound rules. The file is regenerated from the
/// ternary-code construction (see the eisenstein module) and checked
/// against it in tests.
fn leech() -> Result<Lattice> {
    let json = serde_json::from_str(include_str!("../../data/leech.json"))
        .map_err(|e| Error::InvalidInput(format!("bundled leech data: {e}")))?;
    let lat = Lattice::from_json(json)?;
    // det((3/2) * standard Leech gram) = (3/2)^24.
    let expect = (0..24).fold(Rat::one(), |acc, _| acc * Rat::new(3, 2));
    check_gram_det(lat.gram(), expect)?;
    Ok(lat)
}

fn e7_star_paper() -> Result<Lattice> {
    let rows: [[i64; 7]; 8] = [
        [-1, 0, 0, 0, 0, 0, 0],
        [1, -1, 0, 0, 0, 0, 0],
        [0, 1, -1, 0, 0, 0, 0],
        [0, 0, 1, -1, 0, 0, 0],
        [0, 0, 0, 1, -1, 0, 0],
        [0, 0, 0, 0, 1, -1, 0],
        [0, 0, 0, 0, 0, 1, 0],
        [0, 0, 0, 0, 0, 0, 0],
    ];
    let last_col: [Rat; 8] = [
        Rat::new(-3, 4),
        Rat::new(-3, 4),
        Rat::new(1, 4),
        Rat::new(1, 4),
        Rat::new(1, 4),
        Rat::new(1, 4),
        Rat::new(1, 4),
        Rat::new(1, 4),
    ];
    let gen = RatMatrix::from_fn(8, 7, |i, j| {
        if j == 6 {
            last_col[i].clone()
        } else {
            Rat::from_int(rows[i][j])
        }
    });
    let plain = Lattice::with_metadata(
        Some("E7_star_paper".to_string()),
        gen.clone(),
        Some(Rat::new(7, 8)),
        Some(Rat::new(3, 2)),
        Vec::new(),
        None,
        false,
    )?;
    let reflections = root_layer_simple_normals(&plain, &Rat::from_int(2), 126)?;
    Lattice::with_metadata(
        Some("E7_star_paper".to_string()),
        gen,
        Some(Rat::new(7, 8)),
        Some(Rat::new(3, 2)),
        reflections,
        None,
        false,
    )
}

/// Extracts a simple system from the norm-squared `root_sq` layer of the
/// lattice; those vectors generate the reflection symmetries used for
/// cone reduction.
fn root_layer_simple_normals(
    lat: &Lattice,
    root_sq: &Rat,
    expect_count: usize,
) -> Result<Vec<RatVector>> {
    let nodes = lat.enumerate_in_ball(root_sq);
    let roots: Vec<&LatticeNode> = nodes.iter().filter(|nd| &nd.norm_sq == root_sq).collect();
    if roots.len() != expect_count {
        return Err(Error::InvalidStructure(format!(
            "expected {expect_count} roots, found {}",
            roots.len()
        )));
    }
    let lex_positive = |c: &[i64]| c.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0);
    let positive: Vec<&&LatticeNode> = roots.iter().filter(|nd| lex_positive(&nd.coeffs)).collect();
    let coeff_set: HashSet<Vec<i64>> = positive.iter().map(|nd| nd.coeffs.clone()).collect();
    let mut simple = Vec::new();
    for alpha in &positive {
        let decomposable = positive.iter().any(|beta| {
            if beta.coeffs == alpha.coeffs {
                return false;
            }
            let diff: Vec<i64> =
                alpha.coeffs.iter().zip(&beta.coeffs).map(|(a, b)| a - b).collect();
            coeff_set.contains(&diff)
        });
        if !decomposable {
            simple.push(lat.point(alpha));
        }
    }
    Ok(simple)
}
