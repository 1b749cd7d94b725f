//! Forbidden node sets: the nonzero nodes whose translated Voronoi cell
//! comes within twice the covering radius of the origin cell. Computed
//! on the cone-restricted cell when reflections are available, then
//! expanded to the full set by orbits.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::{Rat, RatVector};
use crate::lattice::voronoi::{chart_box, check_declared_covering, node_halfspace};
use crate::lattice::{voronoi, Lattice, LatticeNode};
use crate::polytope::{halfspace_intersection, BuildOptions, HalfSpace, Polytope};
use crate::symmetry::ReflectionGroup;

#[derive(Clone, Debug)]
pub struct ForbiddenSet {
    pub lattice_hash: String,
    /// Squared covering radius of the lattice.
    pub r_sq: Rat,
    /// Cone-restricted forbidden nodes.
    pub f1: Vec<LatticeNode>,
    /// The full forbidden set in coefficient space, sorted.
    pub f_coeff: Vec<Vec<i64>>,
    /// Max squared Euclidean norm of a coefficient vector in `f_coeff`.
    pub gamma_sq: Rat,
}

/// The cone-restricted Voronoi cell and the exact squared covering
/// radius, iterating the radius bound until it certifies itself.
pub fn cone_cell_with_radius(lat: &Lattice, group: &ReflectionGroup) -> Result<(Polytope, Rat)> {
    if lat.metadata_only() {
        return Err(Error::CapExceeded { what: "cell geometry on a metadata-only lattice", cap: 0 });
    }
    let mut bound_sq = lat
        .declared_covering_sq()
        .cloned()
        .unwrap_or_else(|| voronoi::babai_covering_bound_sq(lat));
    for _ in 0..64 {
        let cell = build_cone_cell_with_bound(lat, group, &bound_sq)?;
        let rho_sq = cell.circumradius_sq();
        if rho_sq <= bound_sq {
            check_declared_covering(lat, &rho_sq)?;
            return Ok((cell, rho_sq));
        }
        bound_sq = rho_sq;
    }
    Err(Error::CapExceeded { what: "covering radius iteration", cap: 64 })
}

/// The polytope `V1 = K intersect V`, built from the cone walls and the
/// half-spaces of the cone-restricted nodes with `|z| <= 2 * bound`.
fn build_cone_cell_with_bound(
    lat: &Lattice,
    group: &ReflectionGroup,
    covering_bound_sq: &Rat,
) -> Result<Polytope> {
    let four = Rat::from_int(4);
    let ball = lat.enumerate_in_ball(&(covering_bound_sq * &four));
    let mut halfspaces: Vec<HalfSpace> = Vec::new();
    for f in group.cone_normals() {
        halfspaces.push(HalfSpace::new(f.iter().map(|x| -x).collect(), Rat::zero()));
    }
    for node in &ball {
        if group.cone_contains(&node.coeffs) {
            halfspaces.push(node_halfspace(lat, node));
        }
    }
    halfspace_intersection(
        halfspaces,
        lat.n(),
        BuildOptions {
            metric: Some(lat.gram().clone()),
            initial_box: Some(chart_box(lat, covering_bound_sq)),
            ..Default::default()
        },
    )
}

pub fn build_cone_cell(lat: &Lattice, group: &ReflectionGroup) -> Result<Polytope> {
    Ok(cone_cell_with_radius(lat, group)?.0)
}

/// Exact squared covering radius through the symmetry-reduced cell when
/// reflections exist, the full cell otherwise.
pub fn covering_radius_sq_auto(lat: &Lattice) -> Result<Rat> {
    let group = ReflectionGroup::from_lattice(lat)?;
    if group.is_trivial() {
        voronoi::covering_radius_sq(lat)
    } else {
        Ok(cone_cell_with_radius(lat, &group)?.1)
    }
}

/// Computes the forbidden set from a prebuilt cone cell.
pub fn compute_forbidden(
    lat: &Lattice,
    group: &ReflectionGroup,
    cell: &Polytope,
    r_sq: &Rat,
) -> Result<ForbiddenSet> {
    let four = Rat::from_int(4);
    let near_sq = r_sq * &four; // |x| < 2R: overlapping cells
    let cand_sq = &near_sq * &four; // |x| < 4R: candidate bound
    let candidates = lat.enumerate_in_ball(&cand_sq);
    let cone_candidates: Vec<&LatticeNode> = candidates
        .iter()
        .filter(|node| node.norm_sq < cand_sq && group.cone_contains(&node.coeffs))
        .collect();
    let half = Rat::new(1, 2);
    let f1: Vec<LatticeNode> = cone_candidates
        .par_iter()
        .filter(|node| {
            if node.norm_sq < near_sq {
                return true;
            }
            let half_point: RatVector =
                node.coeffs.iter().map(|&c| Rat::from_int(c) * half.clone()).collect();
            cell.dist_sq_less_than(&half_point, r_sq)
        })
        .map(|node| (*node).clone())
        .collect();

    let f_coeff = group.orbit_expand(&f1.iter().map(|n| n.coeffs.clone()).collect::<Vec<_>>());
    let gamma_sq = f_coeff
        .iter()
        .map(|f| Rat::from_int(f.iter().map(|&x| x * x).sum()))
        .max()
        .unwrap_or_else(Rat::zero);
    Ok(ForbiddenSet {
        lattice_hash: lat.content_hash(),
        r_sq: r_sq.clone(),
        f1,
        f_coeff,
        gamma_sq,
    })
}

/// End-to-end forbidden set: reflections from the catalog entry, cone
/// cell, candidate filter, orbit expansion.
pub fn forbidden_set(lat: &Lattice) -> Result<ForbiddenSet> {
    let group = ReflectionGroup::from_lattice(lat)?;
    let (cell, r_sq) = cone_cell_with_radius(lat, &group)?;
    compute_forbidden(lat, &group, &cell, &r_sq)
}

impl ForbiddenSet {
    pub fn contains(&self, coeffs: &[i64]) -> bool {
        self.f_coeff.binary_search_by(|f| f.as_slice().cmp(coeffs)).is_ok()
    }

    pub fn len(&self) -> usize {
        self.f_coeff.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f_coeff.is_empty()
    }

    pub fn to_json(&self) -> ForbiddenJson {
        ForbiddenJson {
            lattice_hash: self.lattice_hash.clone(),
            r_sq: self.r_sq.clone(),
            f_coeff: self.f_coeff.clone(),
            gamma_sq: self.gamma_sq.clone(),
        }
    }

    /// Restores a cached set, trusting only content that matches the
    /// lattice hash.
    pub fn from_json(lat: &Lattice, json: ForbiddenJson) -> Result<Self> {
        if json.lattice_hash != lat.content_hash() {
            return Err(Error::InvalidInput("forbidden cache is for a different lattice".into()));
        }
        let mut f_coeff = json.f_coeff;
        f_coeff.sort();
        Ok(ForbiddenSet {
            lattice_hash: json.lattice_hash,
            r_sq: json.r_sq,
            f1: Vec::new(),
            f_coeff,
            gamma_sq: json.gamma_sq,
        })
    }
}

#[derive(Serialize, Deserialize)]
pub struct ForbiddenJson {
    pub lattice_hash: String,
    #[serde(rename = "R_sq")]
    pub r_sq: Rat,
    #[serde(rename = "F_coeff")]
    pub f_coeff: Vec<Vec<i64>>,
    pub gamma_sq: Rat,
}

/// Loads the forbidden set from the cache directory when the environment
/// names one, computing and storing it otherwise.
pub fn forbidden_set_cached(lat: &Lattice) -> Result<ForbiddenSet> {
    let Some(dir) = std::env::var_os("CHROMATIC_LATTICE_CACHE_DIR") else {
        return forbidden_set(lat);
    };
    let dir = std::path::PathBuf::from(dir);
    let path = dir.join(format!("forbidden-{}.json", lat.content_hash()));
    if let Ok(text) = std::fs::read_to_string(&path) {
        let json: ForbiddenJson = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidInput(format!("bad forbidden cache: {e}")))?;
        return ForbiddenSet::from_json(lat, json);
    }
    let set = forbidden_set(lat)?;
    std::fs::create_dir_all(&dir)?;
    std::fs::write(&path, serde_json::to_string(&set.to_json()).unwrap())?;
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::catalog;

    #[test]
    fn z1_forbidden_is_plus_minus_one() {
        let lat = catalog("Zn", Some(1)).unwrap();
        let f = forbidden_set(&lat).unwrap();
        assert_eq!(f.r_sq, Rat::new(1, 4));
        assert_eq!(f.f_coeff, vec![vec![-1], vec![1]]);
    }

    #[test]
    fn z2_forbidden_matches_direct_cell_distances() {
        let lat = catalog("Zn", Some(2)).unwrap();
        let f = forbidden_set(&lat).unwrap();
        // Known members and the strict exclusion of (2,2).
        for member in [[1i64, 0], [0, 1], [1, 1], [1, -1], [2, 0], [2, 1]] {
            assert!(f.contains(&member), "{member:?} should be forbidden");
            let neg = [-member[0], -member[1]];
            assert!(f.contains(&neg));
        }
        assert!(!f.contains(&[2, 2]));
        assert_eq!(f.len(), 20);
        // Zero never forbidden.
        assert!(!f.contains(&[0, 0]));
    }

    #[test]
    fn z2_cone_cell_is_eighth_triangle() {
        let lat = catalog("Zn", Some(2)).unwrap();
        // W = {e1 - e2, e2}: the cone x1 >= x2 >= 0.
        let mut gens = Vec::new();
        let mut cone = Vec::new();
        for w in [vec![Rat::one(), Rat::from_int(-1)], vec![Rat::zero(), Rat::one()]] {
            let r = lat.chart_reflection(&w).unwrap();
            gens.push(r.matrix);
            cone.push(r.functional);
        }
        let group = ReflectionGroup::from_parts(2, gens, cone).unwrap();
        let (cell, r_sq) = cone_cell_with_radius(&lat, &group).unwrap();
        assert_eq!(r_sq, Rat::new(1, 2));
        let mut verts = cell.vertices().to_vec();
        verts.sort();
        let expect: Vec<Vec<Rat>> = vec![
            vec![Rat::zero(), Rat::zero()],
            vec![Rat::new(1, 2), Rat::zero()],
            vec![Rat::new(1, 2), Rat::new(1, 2)],
        ];
        let mut expect = expect;
        expect.sort();
        assert_eq!(verts, expect);
    }

    #[test]
    fn a2_cone_cell_with_order_12_group() {
        let lat = catalog("An", Some(2)).unwrap();
        let group = ReflectionGroup::from_lattice(&lat).unwrap();
        assert_eq!(group.order(100).unwrap(), 12);
        let (cell, r_sq) = cone_cell_with_radius(&lat, &group).unwrap();
        assert_eq!(r_sq, Rat::new(1, 3));
        assert_eq!(cell.vertices().len(), 3);
        assert_eq!(cell.circumradius_sq(), Rat::new(1, 3));
    }

    #[test]
    fn symmetry_reduction_agrees_with_trivial_group() {
        for (name, n) in [("Zn", Some(2)), ("An", Some(2)), ("Zn", Some(3))] {
            let lat = catalog(name, n).unwrap();
            let with_symmetry = forbidden_set(&lat).unwrap();
            let trivial = ReflectionGroup::trivial(lat.n());
            let (cell, r_sq) = cone_cell_with_radius(&lat, &trivial).unwrap();
            let plain = compute_forbidden(&lat, &trivial, &cell, &r_sq).unwrap();
            assert_eq!(with_symmetry.f_coeff, plain.f_coeff);
            assert_eq!(with_symmetry.gamma_sq, plain.gamma_sq);
        }
    }

    #[test]
    fn forbidden_set_is_centrally_symmetric_and_bounded() {
        let lat = catalog("An", Some(2)).unwrap();
        let f = forbidden_set(&lat).unwrap();
        let sixteen_r = &f.r_sq * &Rat::from_int(16);
        for v in &f.f_coeff {
            let neg: Vec<i64> = v.iter().map(|x| -x).collect();
            assert!(f.contains(&neg));
            assert!(lat.norm_sq(v) < sixteen_r);
        }
        assert_eq!(f.len(), 18);
        // Overlapping-cell nodes (norm < 2R) are always forbidden.
        let four_r = &f.r_sq * &Rat::from_int(4);
        for node in lat.enumerate_in_ball(&four_r) {
            if node.norm_sq < four_r {
                assert!(f.contains(&node.coeffs));
            }
        }
    }
}
