//! Search for low-index verified sublattices: randomized sampling from a
//! pool of short non-forbidden nodes, column-substitution descent, and
//! exhaustive enumeration by ascending determinant.

mod hnf_enum;
mod rng;

pub use hnf_enum::{for_each_hnf, hnf_count};
pub use rng::SplitMix64;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::{IntMatrix, Rat};
use crate::forbidden::ForbiddenSet;
use crate::lattice::Lattice;
use crate::subverify::{SublatticeSpec, VerificationReport, Verifier, VerifyMethod};

/// The `n_pool` shortest non-forbidden nonzero nodes in coefficient
/// space, sorted by squared norm then lexicographically.
pub fn build_pool(lat: &Lattice, fset: &ForbiddenSet, n_pool: usize) -> Result<Vec<Vec<i64>>> {
    if n_pool < lat.n() {
        return Err(Error::InvalidInput(format!(
            "pool size {n_pool} cannot span rank {}",
            lat.n()
        )));
    }
    let mut r_sq = lat.min_norm_sq() * Rat::from_int(4);
    for _ in 0..60 {
        let nodes = lat.enumerate_in_ball(&r_sq);
        let survivors: Vec<Vec<i64>> = nodes
            .into_iter()
            .filter(|node| !fset.contains(&node.coeffs))
            .map(|node| node.coeffs)
            .collect();
        if survivors.len() >= n_pool {
            return Ok(survivors.into_iter().take(n_pool).collect());
        }
        r_sq = &r_sq * &Rat::from_int(2);
    }
    Err(Error::CapExceeded { what: "pool radius growth", cap: 60 })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RandomSearchOutcome {
    pub trials: u64,
    pub degenerate: u64,
    pub verified_found: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best: Option<VerificationReport>,
}

/// Repeated trials: draw `n` distinct pool nodes as a basis, verify, and
/// keep the minimal-index verified sublattice. Per-trial streams derive
/// from `(seed, trial)`, so the outcome is identical for any worker
/// count.
pub fn random_search(
    lat: &Lattice,
    fset: &ForbiddenSet,
    n_pool: usize,
    trials: u64,
    seed: u64,
    s: Option<u32>,
) -> Result<RandomSearchOutcome> {
    let pool = build_pool(lat, fset, n_pool)?;
    let verifier = Verifier::new(lat, fset);
    let n = lat.n();

    struct TrialHit {
        index: BigInt,
        rows: Vec<Vec<i64>>,
        report: VerificationReport,
    }

    let results: Vec<(bool, Option<TrialHit>)> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = SplitMix64::for_item(seed, trial);
            let picks = rng.sample_distinct(pool.len(), n);
            let mut c = IntMatrix::zero(n, n);
            for (col, &pick) in picks.iter().enumerate() {
                for row in 0..n {
                    c[(row, col)] = pool[pick][row];
                }
            }
            let det = c.det_bigint().expect("square");
            if det == BigInt::from(0) {
                return (true, None);
            }
            let report = verifier
                .verify(&c, s, VerifyMethod::Auto)
                .expect("nonsingular candidate");
            if report.is_verified() {
                let index = report.index.parse::<BigInt>().expect("index integer");
                (false, Some(TrialHit { index, rows: c.to_rows(), report }))
            } else {
                (false, None)
            }
        })
        .collect();

    let degenerate = results.iter().filter(|(skip, _)| *skip).count() as u64;
    let verified_found = results.iter().filter(|(_, hit)| hit.is_some()).count() as u64;
    let best = results
        .into_iter()
        .filter_map(|(_, hit)| hit)
        .min_by(|a, b| a.index.cmp(&b.index).then(a.rows.cmp(&b.rows)))
        .map(|hit| hit.report);
    Ok(RandomSearchOutcome { trials, degenerate, verified_found, best })
}

/// Cyclic column-substitution descent from a verified start: for each
/// column in turn, try every pool node and keep the verified replacement
/// with the smallest index (ties to the lexicographically smallest
/// matrix); repeat until a full pass makes no improvement.
pub fn descent(
    lat: &Lattice,
    fset: &ForbiddenSet,
    c0: &IntMatrix,
    pool: &[Vec<i64>],
    s: Option<u32>,
) -> Result<VerificationReport> {
    let verifier = Verifier::new(lat, fset);
    let start = verifier.verify(c0, s, VerifyMethod::Auto)?;
    if !start.is_verified() {
        return Err(Error::InvalidInput("descent start is not a verified sublattice".to_string()));
    }
    let n = lat.n();
    let mut current = c0.clone();
    let mut current_index = SublatticeSpec::new(current.clone())?.index;
    let mut best_report = start;
    loop {
        let mut improved = false;
        for col in 0..n {
            struct Candidate {
                index: BigInt,
                rows: Vec<Vec<i64>>,
                matrix: IntMatrix,
                report: VerificationReport,
            }
            let best: Option<Candidate> = pool
                .par_iter()
                .filter_map(|node| {
                    let mut c = current.clone();
                    for row in 0..n {
                        c[(row, col)] = node[row];
                    }
                    let det = c.det_bigint().expect("square");
                    let index = num_traits::Signed::abs(&det);
                    if index == BigInt::from(0) || index >= current_index {
                        return None;
                    }
                    let report = verifier.verify(&c, s, VerifyMethod::Auto).ok()?;
                    report.is_verified().then(|| Candidate {
                        index,
                        rows: c.to_rows(),
                        matrix: c,
                        report,
                    })
                })
                .min_by(|a, b| a.index.cmp(&b.index).then(a.rows.cmp(&b.rows)));
            if let Some(cand) = best {
                current = cand.matrix;
                current_index = cand.index;
                best_report = cand.report;
                improved = true;
            }
        }
        if !improved {
            return Ok(best_report);
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExhaustiveOutcome {
    pub searched_up_to: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minimum: Option<VerificationReport>,
}

/// Ascending-determinant sweep over every canonical sublattice basis;
/// the first verified hit is the minimum. Candidates stream in chunks so
/// large indices never materialize; chunks are verified in parallel and
/// resolved in enumeration order.
pub fn exhaustive_search(
    lat: &Lattice,
    fset: &ForbiddenSet,
    max_index: i64,
    s: Option<u32>,
    mut on_index_done: impl FnMut(i64),
) -> Result<ExhaustiveOutcome> {
    let verifier = Verifier::new(lat, fset);
    let n = lat.n();
    let s_eff = s.unwrap_or_else(|| verifier.default_s());
    let stride = n * n;
    const CHUNK: usize = 16_384;
    for d in 1..=max_index {
        // Candidates buffer flat (row-major), one stride per matrix.
        let mut buffer: Vec<i64> = Vec::with_capacity(CHUNK * stride);
        let mut found: Option<VerificationReport> = None;
        let flush = |buffer: &mut Vec<i64>| -> Option<VerificationReport> {
            // The prefix-pruned necessary scan refutes almost all
            // candidates (the canonical bases are lower triangular); only
            // the survivors pay for a complete check.
            let hit = buffer
                .par_chunks_exact(stride)
                .enumerate()
                .filter_map(|(pos, entries)| {
                    if verifier.check_i_hits_triangular_flat(entries, s_eff) {
                        return None;
                    }
                    let rows: Vec<Vec<i64>> = entries.chunks(n).map(|r| r.to_vec()).collect();
                    let c = IntMatrix::from_rows(&rows);
                    let report = verifier.verify(&c, s, VerifyMethod::Auto).ok()?;
                    report.is_verified().then_some((pos, report))
                })
                .min_by_key(|(pos, _)| *pos);
            buffer.clear();
            hit.map(|(_, report)| report)
        };
        for_each_hnf(n, d, &mut |c| {
            for i in 0..n {
                buffer.extend_from_slice(c.row(i));
            }
            if buffer.len() == CHUNK * stride {
                if let Some(report) = flush(&mut buffer) {
                    found = Some(report);
                    return false;
                }
            }
            true
        });
        if found.is_none() && !buffer.is_empty() {
            found = flush(&mut buffer);
        }
        if let Some(report) = found {
            return Ok(ExhaustiveOutcome { searched_up_to: d, minimum: Some(report) });
        }
        on_index_done(d);
    }
    Ok(ExhaustiveOutcome { searched_up_to: max_index, minimum: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forbidden::forbidden_set;
    use crate::lattice::catalog;

    #[test]
    fn z1_pool_skips_forbidden() {
        let lat = catalog("Zn", Some(1)).unwrap();
        let f = forbidden_set(&lat).unwrap();
        let pool = build_pool(&lat, &f, 2).unwrap();
        assert_eq!(pool, vec![vec![-2], vec![2]]);
        assert!(matches!(build_pool(&lat, &f, 0), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn z1_random_search_finds_two() {
        let lat = catalog("Zn", Some(1)).unwrap();
        let f = forbidden_set(&lat).unwrap();
        let out = random_search(&lat, &f, 2, 16, 7, None).unwrap();
        let best = out.best.unwrap();
        assert_eq!(best.index, "2");
    }

    #[test]
    fn random_search_is_seed_deterministic() {
        let lat = catalog("Zn", Some(2)).unwrap();
        let f = forbidden_set(&lat).unwrap();
        let a = random_search(&lat, &f, 8, 200, 123, None).unwrap();
        let b = random_search(&lat, &f, 8, 200, 123, None).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        let c = random_search(&lat, &f, 8, 200, 124, None).unwrap();
        let _ = c; // different seed may or may not differ; only equality is asserted
    }

    #[test]
    fn z1_descent_reaches_two() {
        let lat = catalog("Zn", Some(1)).unwrap();
        let f = forbidden_set(&lat).unwrap();
        let pool = build_pool(&lat, &f, 2).unwrap();
        let c0 = IntMatrix::from_rows(&[vec![4]]);
        let report = descent(&lat, &f, &c0, &pool, None).unwrap();
        assert_eq!(report.index, "2");
        // Fixed point.
        let c1 = IntMatrix::from_rows(&[vec![2]]);
        let again = descent(&lat, &f, &c1, &pool, None).unwrap();
        assert_eq!(again.index, "2");
        // Unverified start is rejected.
        assert!(descent(&lat, &f, &IntMatrix::from_rows(&[vec![1]]), &pool, None).is_err());
    }

    #[test]
    fn z1_exhaustive_minimum_two() {
        let lat = catalog("Zn", Some(1)).unwrap();
        let f = forbidden_set(&lat).unwrap();
        let out = exhaustive_search(&lat, &f, 4, None, |_| {}).unwrap();
        let m = out.minimum.unwrap();
        assert_eq!(m.index, "2");
        assert_eq!(out.searched_up_to, 2);
    }

    #[test]
    fn z2_exhaustive_minimum() {
        // For the square lattice the first verified index is 8: every
        // index-<8 sublattice hits the forbidden set.
        let lat = catalog("Zn", Some(2)).unwrap();
        let f = forbidden_set(&lat).unwrap();
        let out = exhaustive_search(&lat, &f, 9, None, |_| {}).unwrap();
        let m = out.minimum.unwrap();
        assert_eq!(m.index, "8");
    }

    #[test]
    fn a2_exhaustive_minimum_seven() {
        let lat = catalog("An", Some(2)).unwrap();
        let f = forbidden_set(&lat).unwrap();
        let out = exhaustive_search(&lat, &f, 7, None, |_| {}).unwrap();
        let m = out.minimum.unwrap();
        assert_eq!(m.index, "7");
        assert_eq!(out.searched_up_to, 7);
    }

    #[test]
    fn a2_random_search_finds_seven() {
        let lat = catalog("An", Some(2)).unwrap();
        let f = forbidden_set(&lat).unwrap();
        let out = random_search(&lat, &f, 12, 10_000, 2024, None).unwrap();
        assert_eq!(out.best.unwrap().index, "7");
    }
}
