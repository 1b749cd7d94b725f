//! Verifies the three bundled sublattice certificates end to end and
//! prints the resulting chromatic-number bounds with timings.
//!
//!     cargo run --release -p chromatic-lattice --example certificates [5|7|9]

use std::time::Instant;

use chromatic_lattice::exactlin::IntMatrix;
use chromatic_lattice::forbidden::forbidden_set;
use chromatic_lattice::lattice::catalog;
use chromatic_lattice::subverify::{Verifier, VerifyMethod};

fn sublattice(path: &str) -> IntMatrix {
    let text = std::fs::read_to_string(path).expect("run from the workspace root");
    chromatic_lattice::subverify::sublattice_from_json(&text).expect("valid sublattice file")
}

fn certify(name: &str, n: Option<usize>, c: IntMatrix) {
    let t = Instant::now();
    let lat = catalog(name, n).unwrap();
    let f = forbidden_set(&lat).unwrap();
    let report = Verifier::new(&lat, &f).verify(&c, None, VerifyMethod::Auto).unwrap();
    println!(
        "{:<22} |F| = {:>7}  {}  ({:?})",
        lat.name().unwrap_or(name),
        f.len(),
        report.implied_bound.as_deref().unwrap_or(&report.verdict),
        t.elapsed()
    );
    assert!(report.is_verified());
}

fn main() {
    let which = std::env::args().nth(1);
    let all = which.is_none();
    let want = |d: &str| all || which.as_deref() == Some(d);
    if want("5") {
        certify("An_star_dilated", Some(5), sublattice("repro/C5.json"));
    }
    if want("7") {
        certify("E7_star_paper", None, sublattice("repro/C7.json"));
    }
    if want("9") {
        certify("An_star_dilated", Some(9), sublattice("repro/C9.json"));
    }
}
