//! The prefix-pruned triangular scan must agree with the generic
//! necessary scan on every canonical basis.

use chromatic_lattice::forbidden::forbidden_set;
use chromatic_lattice::lattice::catalog;
use chromatic_lattice::search::for_each_hnf;
use chromatic_lattice::subverify::{CheckOutcome, Verifier};

#[test]
fn triangular_scan_agrees_with_generic_scan() {
    for (name, n, max_d) in [("Zn", 2usize, 12i64), ("An", 2, 10), ("An", 3, 6)] {
        let lat = catalog(name, Some(n)).unwrap();
        let f = forbidden_set(&lat).unwrap();
        let v = Verifier::new(&lat, &f);
        for d in 1..=max_d {
            for_each_hnf(n, d, &mut |c| {
                for s in 1..=2u32 {
                    let generic = matches!(v.check_i(c, s), CheckOutcome::Witness { .. });
                    let fast = v.check_i_hits_triangular(c, s);
                    assert_eq!(generic, fast, "{name}:{n} d={d} s={s} c={c:?}");
                }
                true
            });
        }
    }
}
