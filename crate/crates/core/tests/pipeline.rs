//! End-to-end pipeline checks on the catalog lattices that fit a test
//! budget: forbidden sets, verification of the multiplier sublattices,
//! and agreement between the reduced and unreduced computation paths.

use chromatic_lattice::bounds::{self, EisensteinResult};
use chromatic_lattice::exactlin::{IntMatrix, Rat};
use chromatic_lattice::forbidden::{compute_forbidden, cone_cell_with_radius, forbidden_set};
use chromatic_lattice::lattice::{catalog, voronoi};
use chromatic_lattice::search::SplitMix64;
use chromatic_lattice::subverify::{Verifier, VerifyMethod};
use chromatic_lattice::symmetry::ReflectionGroup;

#[test]
fn a2_multiplier_sublattice_verifies_directly() {
    let lat = catalog("An", Some(2)).unwrap();
    let f = forbidden_set(&lat).unwrap();
    let v = Verifier::new(&lat, &f);
    let out = bounds::eisenstein_bound_full(&lat).unwrap();
    let EisensteinResult::Certified(out) = out else { panic!("A2 certifies") };
    let rep = v.verify(&out.c_matrix, None, VerifyMethod::Auto).unwrap();
    assert!(rep.is_verified());
    assert_eq!(rep.index, "7");
}

#[test]
fn d4_multiplier_sublattice_verifies_directly() {
    let lat = catalog("Dn", Some(4)).unwrap();
    let f = forbidden_set(&lat).unwrap();
    let v = Verifier::new(&lat, &f);
    let out = bounds::eisenstein_bound_full(&lat).unwrap();
    let EisensteinResult::Certified(out) = out else { panic!("D4 certifies") };
    let rep = v.verify(&out.c_matrix, None, VerifyMethod::Auto).unwrap();
    assert!(rep.is_verified());
    assert_eq!(rep.index, "49");
}

#[test]
fn d4_triple_dilation_verifies() {
    let lat = catalog("Dn", Some(4)).unwrap();
    let f = forbidden_set(&lat).unwrap();
    let v = Verifier::new(&lat, &f);
    let mut c = IntMatrix::zero(4, 4);
    for i in 0..4 {
        c[(i, i)] = 3;
    }
    let rep = v.verify(&c, None, VerifyMethod::Auto).unwrap();
    assert!(rep.is_verified());
    assert_eq!(rep.index, "81");
}

#[test]
fn reduced_distance_identity_on_small_lattices() {
    // dist(V, x + V) = 2 dist(V1, canon(x)/2), squared: the full-cell and
    // cone-cell routes agree on random nodes.
    for (name, n) in [("Zn", Some(2)), ("An", Some(2)), ("Zn", Some(3)), ("An", Some(3))] {
        let lat = catalog(name, n).unwrap();
        let group = ReflectionGroup::from_lattice(&lat).unwrap();
        let full_cell = voronoi::voronoi_cell(&lat).unwrap();
        let (cone_cell, _) = cone_cell_with_radius(&lat, &group).unwrap();
        let mut rng = SplitMix64::new(0xc0ffee);
        let half = Rat::new(1, 2);
        for _ in 0..50 {
            let x: Vec<i64> = (0..lat.n()).map(|_| rng.below(9) as i64 - 4).collect();
            let (_, canon) = group.canonicalize(&x, 10_000).unwrap();
            let y_full: Vec<Rat> = x.iter().map(|&c| Rat::from_int(c) * half.clone()).collect();
            let y_cone: Vec<Rat> = canon.iter().map(|&c| Rat::from_int(c) * half.clone()).collect();
            let lhs = full_cell.dist_sq(&y_full) * Rat::from_int(4);
            let rhs = cone_cell.dist_sq(&y_cone) * Rat::from_int(4);
            assert_eq!(lhs, rhs, "{name:?} node {x:?}");
        }
    }
}

#[test]
fn forbidden_with_and_without_symmetry_agree_on_a3() {
    let lat = catalog("An", Some(3)).unwrap();
    let sym = forbidden_set(&lat).unwrap();
    let trivial = ReflectionGroup::trivial(3);
    let (cell, r_sq) = cone_cell_with_radius(&lat, &trivial).unwrap();
    let plain = compute_forbidden(&lat, &trivial, &cell, &r_sq).unwrap();
    assert_eq!(sym.f_coeff, plain.f_coeff);
}

#[test]
fn refutation_witness_has_close_cells() {
    // A refutation witness w satisfies dist(V, w + V) < 2R, re-checked
    // through the exact cell distance.
    let lat = catalog("Zn", Some(2)).unwrap();
    let f = forbidden_set(&lat).unwrap();
    let v = Verifier::new(&lat, &f);
    let c = IntMatrix::from_rows(&[vec![2, 1], vec![1, 2]]);
    let rep = v.verify(&c, None, VerifyMethod::Auto).unwrap();
    assert_eq!(rep.verdict, "refuted");
    let w = rep.witness.unwrap();
    let cell = voronoi::voronoi_cell(&lat).unwrap();
    let half = Rat::new(1, 2);
    let y: Vec<Rat> = w.node.iter().map(|&x| Rat::from_int(x) * half.clone()).collect();
    // dist(V, w + V)^2 = 4 dist(V, w/2)^2 < 4 R^2.
    let dist_sq = cell.dist_sq(&y) * Rat::from_int(4);
    assert!(dist_sq < &f.r_sq * &Rat::from_int(4));
}

#[test]
fn search_results_reverify_from_scratch() {
    let lat = catalog("An", Some(2)).unwrap();
    let f = forbidden_set(&lat).unwrap();
    let out = chromatic_lattice::search::random_search(&lat, &f, 12, 2000, 11, None).unwrap();
    let best = out.best.unwrap();
    assert_eq!(best.index, "7");
    let v = Verifier::new(&lat, &f);
    let c = IntMatrix::from_rows(&best.c);
    assert!(matches!(
        v.check_iii(&c).unwrap(),
        chromatic_lattice::subverify::CheckOutcome::Pass
    ));
}

#[test]
fn fundamental_domain_points_are_covered() {
    // Random points of the fundamental parallelepiped are within the
    // covering radius of some node.
    for (name, n) in [("Zn", Some(2)), ("An", Some(2)), ("An", Some(3))] {
        let lat = catalog(name, n).unwrap();
        let covering = voronoi::covering_radius_sq(&lat).unwrap();
        let mut rng = SplitMix64::new(0xfd);
        for _ in 0..20 {
            let t: Vec<Rat> =
                (0..lat.n()).map(|_| Rat::new(rng.below(16) as i64, 16)).collect();
            // Witness search over the rounded coefficient box.
            let mut best: Option<Rat> = None;
            let mut probe = vec![0i64; lat.n()];
            let ranges: Vec<Vec<i64>> = t
                .iter()
                .map(|x| {
                    let f = x.floor_int();
                    let f = i64::try_from(f).unwrap();
                    vec![f - 1, f, f + 1, f + 2]
                })
                .collect();
            let mut stack = vec![0usize; lat.n()];
            loop {
                for (j, &choice) in stack.iter().enumerate() {
                    probe[j] = ranges[j][choice];
                }
                let diff: Vec<Rat> = t
                    .iter()
                    .zip(&probe)
                    .map(|(x, &l)| x - &Rat::from_int(l))
                    .collect();
                let d = lat.chart_norm_sq(&diff);
                best = match best {
                    None => Some(d),
                    Some(b) if d < b => Some(d),
                    keep => keep,
                };
                // Advance the mixed-radix counter.
                let mut k = 0;
                loop {
                    if k == stack.len() {
                        break;
                    }
                    stack[k] += 1;
                    if stack[k] < 4 {
                        break;
                    }
                    stack[k] = 0;
                    k += 1;
                }
                if k == stack.len() {
                    break;
                }
            }
            assert!(best.unwrap() <= covering, "{name:?} point {t:?}");
        }
    }
}
