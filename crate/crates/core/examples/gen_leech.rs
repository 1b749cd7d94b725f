//! Regenerates the bundled Leech data file from the ternary-code
//! construction. Run from the workspace root after any change to the
//! eisenstein builders, then re-run the tests.

use chromatic_lattice::exactlin::Rat;
use chromatic_lattice::lattice::{eisenstein, Lattice};

fn main() {
    let r = eisenstein::leech().unwrap();
    let lat = Lattice::with_metadata(
        Some("Leech".to_string()),
        r.generator,
        Some(Rat::from_int(3)),
        Some(Rat::from_int(6)),
        Vec::new(),
        Some(r.j),
        true,
    )
    .unwrap();
    let json = serde_json::to_string_pretty(&lat.to_json()).unwrap();
    std::fs::write("crates/core/data/leech.json", json + "\n").unwrap();
    println!(
        "wrote crates/core/data/leech.json ({} bytes)",
        std::fs::metadata("crates/core/data/leech.json").unwrap().len()
    );
}
