//! Acceptance suite: every release-gating claim, one test per criterion,
//! printing a pass line with the checked values. The two multi-hour jobs
//! (the rank-5 exhaustive minimum and the rank-9 certificate) carry
//! `#[ignore]`; run them with `cargo test -- --ignored` before a release.

use chromatic_lattice::bounds::{self, EisensteinResult, RuleOutcome};
use chromatic_lattice::exactlin::{hnf_modified, IntMatrix, Rat};
use chromatic_lattice::forbidden::{compute_forbidden, cone_cell_with_radius, forbidden_set};
use chromatic_lattice::lattice::{catalog, voronoi, Lattice};
use chromatic_lattice::polytope::{
    halfspace_intersection, rational_sqrt_upper, BuildOptions, HalfSpace,
};
use chromatic_lattice::search::{exhaustive_search, SplitMix64};
use chromatic_lattice::subverify::{CheckOutcome, Verifier, VerifyMethod};
use chromatic_lattice::symmetry::ReflectionGroup;

fn c5() -> IntMatrix {
    IntMatrix::from_rows(&[
        vec![-2, 1, -2, -1, 0],
        vec![-3, 1, 0, -1, -2],
        vec![0, 1, 1, -1, -3],
        vec![-2, 0, -2, 2, -2],
        vec![-2, -2, 0, 0, -2],
    ])
}

fn c7() -> IntMatrix {
    IntMatrix::from_rows(&[
        vec![0, -4, -5, -3, -4, -4, -1],
        vec![-1, -5, -10, -7, -5, -5, -4],
        vec![-2, -2, -9, -4, -5, -4, -4],
        vec![-3, -2, -5, -4, -4, -1, -3],
        vec![-1, -1, -4, -1, -3, 0, -3],
        vec![-2, 0, -1, 0, 0, 0, 0],
        vec![0, 4, 6, 4, 4, 4, 4],
    ])
}

fn c9() -> IntMatrix {
    IntMatrix::from_rows(&[
        vec![0, 0, -3, 1, 0, 0, -1, 1, 0],
        vec![1, 0, -3, 1, 1, 0, -1, 4, 1],
        vec![0, 0, -2, 1, 0, -1, -1, 1, 3],
        vec![0, 0, -3, 4, 0, 0, -1, 1, 0],
        vec![0, 3, -3, 1, 0, 0, -1, 1, 0],
        vec![3, 0, -3, 1, 0, 0, 2, 1, 0],
        vec![0, 0, -4, 2, 0, 3, -1, 2, 0],
        vec![0, 0, -3, 1, 3, 0, -1, 1, 0],
        vec![-1, 0, -3, 1, -1, 1, 1, 1, -1],
    ])
}

fn verify_catalog(name: &str, n: Option<usize>, c: IntMatrix, expect_index: &str) {
    let lat = catalog(name, n).unwrap();
    let f = forbidden_set(&lat).unwrap();
    let v = Verifier::new(&lat, &f);
    let report = v.verify(&c, None, VerifyMethod::Auto).unwrap();
    assert!(report.is_verified(), "{name}: expected verified, got {}", report.verdict);
    assert_eq!(report.index, expect_index, "{name}: index");
}

#[test]
fn criterion_1_rank5_certificate() {
    verify_catalog("An_star_dilated", Some(5), c5(), "140");
    // Both complete checks pass on this pair.
    let lat = catalog("An_star_dilated", Some(5)).unwrap();
    let f = forbidden_set(&lat).unwrap();
    let v = Verifier::new(&lat, &f);
    assert_eq!(v.check_ii(&c5()).unwrap(), CheckOutcome::Pass);
    assert_eq!(v.check_iii(&c5()).unwrap(), CheckOutcome::Pass);
    println!("[PASS] criterion 1a: rank-5 sublattice verified with index exactly 140");
}

#[test]
fn criterion_1_rank7_certificate() {
    verify_catalog("E7_star_paper", None, c7(), "1372");
    println!("[PASS] criterion 1b: rank-7 sublattice verified with index exactly 1372");
}

/// Completes in a few minutes; kept out of the default run as the tagged
/// long job of criterion 1.
#[test]
#[ignore = "long-running: rank-9 certificate (minutes)"]
fn criterion_1_rank9_certificate() {
    verify_catalog("An_star_dilated", Some(9), c9(), "17253");
    println!("[PASS] criterion 1c: rank-9 sublattice verified with index exactly 17253");
}

#[test]
fn criterion_2_exhaustive_minima_ci() {
    let d4 = catalog("Dn", Some(4)).unwrap();
    let f = forbidden_set(&d4).unwrap();
    let out = exhaustive_search(&d4, &f, 49, None, |_| {}).unwrap();
    assert_eq!(out.minimum.as_ref().map(|m| m.index.as_str()), Some("49"));

    let a4 = catalog("An_star_dilated", Some(4)).unwrap();
    let f = forbidden_set(&a4).unwrap();
    let out = exhaustive_search(&a4, &f, 54, None, |_| {}).unwrap();
    assert_eq!(out.minimum.as_ref().map(|m| m.index.as_str()), Some("54"));
    println!("[PASS] criterion 2: exhaustive minima 49 (D4) and 54 (A4*) reproduced");
}

#[test]
#[ignore = "long-running: rank-5 exhaustive sweep to 140 (hours)"]
fn criterion_2_exhaustive_minimum_rank5() {
    let a5 = catalog("An_star_dilated", Some(5)).unwrap();
    let f = forbidden_set(&a5).unwrap();
    let out = exhaustive_search(&a5, &f, 140, None, |_| {}).unwrap();
    assert_eq!(out.minimum.as_ref().map(|m| m.index.as_str()), Some("140"));
    println!("[PASS] criterion 2 (long): exhaustive minimum 140 (A5*) reproduced");
}

#[test]
fn criterion_3_eisenstein_rule() {
    let cases: [(&str, Option<usize>, &str, Rat); 5] = [
        ("An", Some(2), "7^1 = 7", Rat::new(4, 3)),
        ("Dn", Some(4), "7^2 = 49", Rat::from_int(2)),
        ("E6_star", None, "7^3 = 343", Rat::from_int(2)),
        ("E8", None, "7^4 = 2401", Rat::from_int(2)),
        ("Leech", None, "7^12 = 13841287201", Rat::from_int(2)),
    ];
    for (name, n, expect, ratio_sq) in cases {
        let lat = catalog(name, n).unwrap();
        // Exact ratio hypothesis from catalog data.
        let p = lat.packing_radius_sq();
        let c = lat.declared_covering_sq().unwrap().clone();
        assert_eq!(&c / &p, ratio_sq, "{name}: ratio^2");
        match bounds::eisenstein_bound(&lat).unwrap() {
            RuleOutcome::Certified(cert) => {
                assert!(cert.conclusion.contains(expect), "{name}: {}", cert.conclusion)
            }
            _ => panic!("{name} must certify"),
        }
    }
    // Direct pipeline verification of the constructed multiplier for the
    // two smallest entries.
    for (name, n, idx) in [("An", Some(2), "7"), ("Dn", Some(4), "49")] {
        let lat = catalog(name, n).unwrap();
        let EisensteinResult::Certified(out) = bounds::eisenstein_bound_full(&lat).unwrap() else {
            panic!("{name} certifies");
        };
        verify_catalog(name, n, out.c_matrix, idx);
    }
    println!("[PASS] criterion 3: eisenstein rule gives 7, 49, 343, 2401, 7^12 with exact ratio checks; small ranks re-verified directly");
}

#[test]
fn criterion_4_laminated_table_and_sums() {
    let rows = bounds::laminated_table().unwrap();
    let expect: [(usize, Rat); 29] = [
        (9, Rat::new(5, 2)),
        (10, Rat::new(8, 3)),
        (11, Rat::from_int(3)),
        (12, Rat::from_int(3)),
        (13, Rat::new(13, 4)),
        (14, Rat::new(55, 16)),
        (15, Rat::new(173, 48)),
        (16, Rat::from_int(3)),
        (17, Rat::new(13, 4)),
        (18, Rat::new(55, 16)),
        (19, Rat::new(173, 48)),
        (20, Rat::new(179, 48)),
        (21, Rat::new(185, 48)),
        (22, Rat::new(379, 96)),
        (24, Rat::from_int(2)),
        (25, Rat::new(5, 2)),
        (26, Rat::new(8, 3)),
        (27, Rat::from_int(3)),
        (28, Rat::from_int(3)),
        (29, Rat::new(13, 4)),
        (30, Rat::new(55, 16)),
        (31, Rat::new(173, 48)),
        (32, Rat::from_int(3)),
        (33, Rat::new(13, 4)),
        (34, Rat::new(55, 16)),
        (35, Rat::new(173, 48)),
        (36, Rat::new(179, 48)),
        (37, Rat::new(185, 48)),
        (38, Rat::new(379, 96)),
    ];
    for (n, value) in expect {
        let row = rows.iter().find(|r| r.n == n).unwrap();
        assert_eq!(row.rho_bound_sq, value, "n = {n}");
        assert!(row.exact, "n = {n} must be exact");
    }
    // The external n = 23 bound is the single non-exact entry.
    let r23 = rows.iter().find(|r| r.n == 23).unwrap();
    assert!(!r23.exact);
    assert_eq!(r23.rho_bound_sq, Rat::new(1_936_501, 1_000_000).square());
    // Every dimension through 38 fires the 3^n flag.
    assert!(rows.iter().all(|r| r.ratio_le_2));
    assert!(rows.iter().all(|r| r.implied_bound.is_some()));

    // Dimensions 48 and 49 through the skewed-sum arithmetic.
    let cert48 =
        bounds::sum_rule_certificate("pi3", 24, 24, &Rat::from_int(2), &Rat::from_int(2)).unwrap();
    assert!(cert48.conclusion.contains("7/2"));
    assert!(cert48.conclusion.contains("3^48"));
    let cert49 =
        bounds::sum_rule_certificate("pi3", 25, 24, &Rat::new(5, 2), &Rat::from_int(2)).unwrap();
    assert!(cert49.conclusion.contains("ratio^2 <= 4"));
    assert!(cert49.conclusion.contains("3^49"));
    println!("[PASS] criterion 4: laminated table exact for 9..38, all flagged <= 2; skewed sums certify dimensions 48 and 49");
}

fn small_catalog() -> Vec<Lattice> {
    vec![
        catalog("Zn", Some(2)).unwrap(),
        catalog("Zn", Some(3)).unwrap(),
        catalog("An", Some(2)).unwrap(),
        catalog("An", Some(3)).unwrap(),
    ]
}

#[test]
fn criterion_5a_symmetry_reduction_equivalence() {
    for lat in small_catalog() {
        let with_symmetry = forbidden_set(&lat).unwrap();
        let trivial = ReflectionGroup::trivial(lat.n());
        let (cell, r_sq) = cone_cell_with_radius(&lat, &trivial).unwrap();
        let plain = compute_forbidden(&lat, &trivial, &cell, &r_sq).unwrap();
        assert_eq!(with_symmetry.f_coeff, plain.f_coeff, "{:?}", lat.name());
        assert_eq!(with_symmetry.r_sq, plain.r_sq);
    }
    println!("[PASS] criterion 5a: forbidden sets with and without symmetry reduction agree");
}

#[test]
fn criterion_5b_cell_distance_identity() {
    // dist(V, x + V)^2 = (2 dist(V1, canon(x)/2))^2 for 100 random nodes,
    // 25 per lattice; the left side uses only central symmetry of the
    // full cell, the right side the cone reduction.
    let half = Rat::new(1, 2);
    let four = Rat::from_int(4);
    let mut checked = 0;
    for lat in small_catalog() {
        let group = ReflectionGroup::from_lattice(&lat).unwrap();
        let full_cell = voronoi::voronoi_cell(&lat).unwrap();
        let (cone_cell, _) = cone_cell_with_radius(&lat, &group).unwrap();
        let mut rng = SplitMix64::new(0x5b);
        for _ in 0..25 {
            let x: Vec<i64> = (0..lat.n()).map(|_| rng.below(11) as i64 - 5).collect();
            let (_, canon) = group.canonicalize(&x, 100_000).unwrap();
            let y: Vec<Rat> = x.iter().map(|&c| Rat::from_int(c) * half.clone()).collect();
            let y_c: Vec<Rat> = canon.iter().map(|&c| Rat::from_int(c) * half.clone()).collect();
            assert_eq!(
                full_cell.dist_sq(&y) * four.clone(),
                cone_cell.dist_sq(&y_c) * four.clone(),
                "{:?} {x:?}",
                lat.name()
            );
            checked += 1;
        }
    }
    assert_eq!(checked, 100);
    println!("[PASS] criterion 5b: exact squared cell-distance identity on 100 random nodes");
}

#[test]
fn criterion_5c_complete_checks_agree() {
    // 200 random nonsingular C with |det| <= 50, spread over the four
    // small lattices; box-scan and integrality checks must return the
    // same verdict.
    let mut total = 0;
    for lat in small_catalog() {
        let f = forbidden_set(&lat).unwrap();
        let v = Verifier::new(&lat, &f);
        let n = lat.n();
        let mut rng = SplitMix64::new(0x5c + n as u64);
        let mut done = 0;
        while done < 50 {
            let entries: Vec<i64> = (0..n * n).map(|_| rng.below(7) as i64 - 3).collect();
            let rows: Vec<Vec<i64>> = entries.chunks(n).map(|r| r.to_vec()).collect();
            let c = IntMatrix::from_rows(&rows);
            let det = c.det_bigint().unwrap();
            let mag = num_traits::Signed::abs(&det);
            let min_det = if n >= 3 { 10 } else { 2 };
            if mag < num_bigint::BigInt::from(min_det) || mag > num_bigint::BigInt::from(50) {
                continue;
            }
            let a = v.check_ii(&c).unwrap();
            let b = v.check_iii(&c).unwrap();
            assert_eq!(
                matches!(a, CheckOutcome::Pass),
                matches!(b, CheckOutcome::Pass),
                "{:?} disagreement on {c:?}",
                lat.name()
            );
            done += 1;
            total += 1;
        }
    }
    assert_eq!(total, 200);
    println!("[PASS] criterion 5c: box-scan and integrality checks agree on 200 random sublattices");
}

#[test]
fn criterion_5d_grid_envelope() {
    // 50 random fat 2D polytopes: the exact distance never exceeds any
    // inside-grid sample, and the best sample converges at the grid rate
    // (slack factor from the inradius-1/sqrt2 construction; see below).
    let step = Rat::new(1, 8);
    let mut rng = SplitMix64::new(0x5d);
    for instance in 0..50 {
        let mut hs = Vec::new();
        // Random fat constraints: entries in [-2, 2], offset 2, so a ball
        // of radius 1/sqrt2 around the origin stays inside.
        for _ in 0..5 {
            let a = rng.below(5) as i64 - 2;
            let b = rng.below(5) as i64 - 2;
            if (a, b) == (0, 0) {
                continue;
            }
            hs.push(HalfSpace::new(
                vec![Rat::from_int(a), Rat::from_int(b)],
                Rat::from_int(2),
            ));
        }
        // Bounding box |x_i| <= 4.
        for j in 0..2 {
            for sign in [1i64, -1] {
                let mut nv = vec![Rat::zero(); 2];
                nv[j] = Rat::from_int(sign);
                hs.push(HalfSpace::new(nv, Rat::from_int(4)));
            }
        }
        let p = halfspace_intersection(hs, 2, BuildOptions::default()).unwrap();
        let y = vec![
            Rat::new(rng.below(25) as i64 - 12, 2),
            Rat::new(rng.below(25) as i64 - 12, 2),
        ];
        let exact = p.dist_sq(&y);
        let mut best: Option<Rat> = None;
        let mut gx = Rat::from_int(-4);
        while gx <= Rat::from_int(4) {
            let mut gy = Rat::from_int(-4);
            while gy <= Rat::from_int(4) {
                let g = vec![gx.clone(), gy.clone()];
                if p.contains(&g) {
                    let dx = &y[0] - &g[0];
                    let dy = &y[1] - &g[1];
                    let d = dx.square() + dy.square();
                    assert!(exact <= d, "instance {instance}: exact exceeds a sample");
                    best = match best {
                        None => Some(d),
                        Some(b) if d < b => Some(d),
                        keep => keep,
                    };
                }
                gy = gy + step.clone();
            }
            gx = gx + step.clone();
        }
        // Nearest grid point to the slightly-shrunk true minimizer stays
        // inside and within step * (1/sqrt2 + |p*| / inradius) of it;
        // with |p*| <= 4 sqrt2 and inradius 1/sqrt2 the slack is 7 steps.
        let best = best.expect("origin-containing polytope has inside grid points");
        let u = rational_sqrt_upper(&exact);
        let slack = &u + &(step.clone() * Rat::from_int(7));
        assert!(
            best <= slack.square(),
            "instance {instance}: best sample {best} too far above exact {exact}"
        );
    }
    println!("[PASS] criterion 5d: exact distance is a lower envelope of grid sampling at the grid rate on 50 polytopes");
}

#[test]
fn criterion_6_degenerate_and_identity_suite() {
    // Rank-1 pipeline end to end.
    let z1 = catalog("Zn", Some(1)).unwrap();
    let f = forbidden_set(&z1).unwrap();
    assert_eq!(f.f_coeff, vec![vec![-1], vec![1]]);
    let v = Verifier::new(&z1, &f);
    let two = v.verify(&IntMatrix::from_rows(&[vec![2]]), None, VerifyMethod::Auto).unwrap();
    assert!(two.is_verified());
    assert_eq!(two.index, "2");
    let one = v.verify(&IntMatrix::from_rows(&[vec![1]]), None, VerifyMethod::Auto).unwrap();
    assert_eq!(one.verdict, "refuted");

    // Hexagonal covering radius.
    let a2 = catalog("An", Some(2)).unwrap();
    assert_eq!(voronoi::covering_radius_sq(&a2).unwrap(), Rat::new(1, 3));

    // Normal-form canonicity under 100 random unimodular right factors.
    let mut rng = SplitMix64::new(0x6);
    let c = IntMatrix::from_rows(&[vec![4, 1, -3], vec![2, 7, 0], vec![-1, 2, 5]]);
    let (h, _) = hnf_modified(&c).unwrap();
    for _ in 0..100 {
        let mut u = IntMatrix::identity(3);
        for _ in 0..8 {
            let i = rng.below(3) as usize;
            let mut j = rng.below(3) as usize;
            if i == j {
                j = (j + 1) % 3;
            }
            let k = rng.below(5) as i64 - 2;
            // Column op: col_j += k * col_i.
            for r in 0..3 {
                u[(r, j)] += k * u[(r, i)];
            }
        }
        assert!(u.is_unimodular());
        let (h2, _) = hnf_modified(&c.mul(&u)).unwrap();
        assert_eq!(h, h2);
    }
    println!("[PASS] criterion 6: rank-1 pipeline, hexagon covering radius 1/3, and normal-form canonicity hold");
}
