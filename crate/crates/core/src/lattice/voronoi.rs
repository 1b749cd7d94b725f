//! Voronoi cells and exact covering radii, computed in the coefficient
//! chart (constraint `u . Gz <= |z|^2 / 2` for lattice node `z`, inner
//! product from the Gram matrix).

use super::{Lattice, LatticeNode};
use crate::error::{Error, Result};
use crate::exactlin::{Rat, RatVector};
use crate::polytope::{
    halfspace_intersection, rational_sqrt_upper, BuildOptions, HalfSpace, Polytope,
};

pub const DEFAULT_RELEVANT_CAP: usize = 9;

/// Chart half-space of a lattice node: `u . (G z) <= |z|^2 / 2`.
pub fn node_halfspace(lat: &Lattice, node: &LatticeNode) -> HalfSpace {
    let coeffs: RatVector = node.coeffs.iter().map(|&c| Rat::from_int(c)).collect();
    let normal = lat.gram().mul_vec(&coeffs);
    HalfSpace::new(normal, node.norm_sq.clone() * Rat::new(1, 2))
}

/// Seed box strictly containing every chart point of squared norm
/// `<= r_sq`.
pub fn chart_box(lat: &Lattice, r_sq: &Rat) -> Vec<Rat> {
    (0..lat.n())
        .map(|j| rational_sqrt_upper(&(lat.gram_inv().at(j, j) * r_sq)) + Rat::one())
        .collect()
}

/// Loose covering-radius bound from the basis: R <= (1/2) sum |b_i|.
pub fn babai_covering_bound_sq(lat: &Lattice) -> Rat {
    let n = lat.n() as i64;
    let trace = (0..lat.n()).fold(Rat::zero(), |acc, i| acc + lat.gram().at(i, i).clone());
    trace * Rat::new(n, 4)
}

/// The facet-defining vectors of the Voronoi cell, by the coset
/// criterion, growing the search radius until every nonzero coset of
/// `2L` is represented.
pub fn relevant_vectors(lat: &Lattice, cap: Option<usize>) -> Result<Vec<LatticeNode>> {
    let cap = cap.unwrap_or(DEFAULT_RELEVANT_CAP);
    if lat.n() > cap {
        return Err(Error::CapExceeded { what: "relevant-vector rank (use the 2R-truncated half-space set)", cap });
    }
    let mut r_sq = match lat.declared_covering_sq() {
        Some(c) => c * &Rat::from_int(4),
        None => lat.min_norm_sq() * Rat::from_int(4),
    };
    for _ in 0..40 {
        match lat.relevant_vectors_with_bound(&(&r_sq / &Rat::from_int(4))) {
            Ok(rel) => return Ok(rel),
            Err(Error::InvalidStructure(_)) => {
                r_sq = &r_sq * &Rat::from_int(2);
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::CapExceeded { what: "relevant-vector radius growth", cap: 40 })
}

/// The full Voronoi cell as a chart polytope.
pub fn voronoi_cell(lat: &Lattice) -> Result<Polytope> {
    if lat.metadata_only() {
        return Err(Error::CapExceeded { what: "cell geometry on a metadata-only lattice", cap: 0 });
    }
    let relevant = relevant_vectors(lat, None)?;
    let halfspaces: Vec<HalfSpace> = relevant.iter().map(|z| node_halfspace(lat, z)).collect();
    let bound_sq = lat
        .declared_covering_sq()
        .cloned()
        .unwrap_or_else(|| babai_covering_bound_sq(lat));
    halfspace_intersection(
        halfspaces,
        lat.n(),
        BuildOptions {
            metric: Some(lat.gram().clone()),
            initial_box: Some(chart_box(lat, &bound_sq)),
            ..Default::default()
        },
    )
}

/// Exact squared covering radius from the full cell; cross-checks the
/// declared catalog value when present.
pub fn covering_radius_sq(lat: &Lattice) -> Result<Rat> {
    let cell = voronoi_cell(lat)?;
    let computed = cell.circumradius_sq();
    check_declared_covering(lat, &computed)?;
    Ok(computed)
}

pub(crate) fn check_declared_covering(lat: &Lattice, computed: &Rat) -> Result<()> {
    if let Some(declared) = lat.declared_covering_sq() {
        if declared != computed {
            return Err(Error::IntegrityMismatch {
                what: "covering_radius_sq",
                declared: declared.to_string(),
                computed: computed.to_string(),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::catalog;

    #[test]
    fn zn_covering() {
        for n in 1..=4usize {
            let l = catalog("Zn", Some(n)).unwrap();
            assert_eq!(covering_radius_sq(&l).unwrap(), Rat::new(n as i64, 4));
        }
    }

    #[test]
    fn a2_hexagon_covering() {
        let l = catalog("An", Some(2)).unwrap();
        let cell = voronoi_cell(&l).unwrap();
        assert_eq!(cell.vertices().len(), 6);
        assert_eq!(covering_radius_sq(&l).unwrap(), Rat::new(1, 3));
        // 6 vertices + 6 edges + the cell itself.
        assert_eq!(cell.faces().len(), 13);
    }

    #[test]
    fn d4_covering_is_one() {
        let l = catalog("Dn", Some(4)).unwrap();
        assert_eq!(covering_radius_sq(&l).unwrap(), Rat::one());
    }

    #[test]
    fn a3_covering() {
        let l = catalog("An", Some(3)).unwrap();
        assert_eq!(covering_radius_sq(&l).unwrap(), Rat::new(1, 2));
    }

    #[test]
    fn relevant_within_double_radius() {
        let l = catalog("An", Some(3)).unwrap();
        let rel = relevant_vectors(&l, None).unwrap();
        assert_eq!(rel.len(), 12);
        let r4 = covering_radius_sq(&l).unwrap() * Rat::from_int(4);
        for z in &rel {
            assert!(z.norm_sq <= r4);
        }
    }

    #[test]
    fn cap_respected() {
        let l = catalog("Zn", Some(10)).unwrap();
        assert!(matches!(relevant_vectors(&l, None), Err(Error::CapExceeded { .. })));
    }
}
