//! Sublattice verification: decide `L' intersect F = empty` for
//! `L' = M C Z^n` by a fast necessary scan over small coefficient boxes,
//! then one of two complete checks (bounded box scan or integrality scan
//! over the forbidden set), whichever costs less. A verified sublattice
//! certifies the chromatic-number bound equal to its index.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::{inverse, IntMatrix, Rat, RatMatrix};
use crate::forbidden::ForbiddenSet;
use crate::lattice::Lattice;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SublatticeSpec {
    pub c: IntMatrix,
    pub index: BigInt,
}

impl SublatticeSpec {
    pub fn new(c: IntMatrix) -> Result<Self> {
        let det = c.det_bigint()?;
        if det.is_zero() {
            return Err(Error::Singular);
        }
        Ok(SublatticeSpec { index: det.abs(), c })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckOutcome {
    Pass,
    /// `lambda` with `C lambda = node` in the forbidden set.
    Witness { lambda: Vec<i64>, node: Vec<i64> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyMethod {
    /// The staged workflow: necessary scan, then the cheaper complete check.
    Auto,
    /// Necessary scan only; a pass is inconclusive.
    CheckIOnly,
    CheckII,
    CheckIII,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessJson {
    pub lambda: Vec<i64>,
    pub node: Vec<i64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationReport {
    pub lattice: Option<String>,
    pub lattice_hash: String,
    #[serde(rename = "C")]
    pub c: Vec<Vec<i64>>,
    pub index: String,
    pub method: String,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub implied_bound: Option<String>,
}

impl VerificationReport {
    pub fn is_verified(&self) -> bool {
        self.verdict == "verified"
    }
}

/// Holds the forbidden set in the shapes the checks need.
pub struct Verifier<'a> {
    lat: &'a Lattice,
    fset: &'a ForbiddenSet,
    members: HashSet<Vec<i64>>,
    /// The `sum >= 0` half of the forbidden set.
    half: Vec<Vec<i64>>,
    /// Per-coordinate bounding box of the forbidden set, a cheap reject
    /// before hashing.
    coord_lo: Vec<i64>,
    coord_hi: Vec<i64>,
    /// Flat scan lists for the necessary check, one per box radius,
    /// ordered by ascending norm so witnesses surface early.
    scan_cache: [std::sync::OnceLock<Vec<i64>>; 5],
    /// Prefix trie over the forbidden set, built on first use by the
    /// triangular scan.
    trie: std::sync::OnceLock<FTrie>,
}

/// Prefix trie over the (sorted) forbidden coefficient vectors: children
/// of a node are the distinct next-coordinate values. Stored as one flat
/// edge array plus per-node spans so the walk stays in contiguous memory.
struct FTrie {
    edges: Vec<(i64, u32)>,
    spans: Vec<(u32, u32)>,
    root: u32,
}

impl FTrie {
    fn build(sorted: &[Vec<i64>], n: usize) -> FTrie {
        // Each node's child edges are emitted in one burst, keeping every
        // child block contiguous.
        let mut edges: Vec<(i64, u32)> = Vec::new();
        let mut spans: Vec<(u32, u32)> = vec![(0, 0)];
        // frontier: (node id, level, lo, hi)
        let mut frontier: Vec<(u32, usize, usize, usize)> = vec![(0, 0, 0, sorted.len())];
        while let Some((node, level, lo, hi)) = frontier.pop() {
            if level == n {
                continue;
            }
            let start = edges.len() as u32;
            let mut at = lo;
            while at < hi {
                let v = sorted[at][level];
                let mut next = at + 1;
                while next < hi && sorted[next][level] == v {
                    next += 1;
                }
                let child = spans.len() as u32;
                spans.push((0, 0));
                edges.push((v, child));
                frontier.push((child, level + 1, at, next));
                at = next;
            }
            spans[node as usize] = (start, edges.len() as u32);
        }
        FTrie { edges, spans, root: 0 }
    }

    #[inline]
    fn children(&self, node: u32) -> &[(i64, u32)] {
        let (a, b) = self.spans[node as usize];
        &self.edges[a as usize..b as usize]
    }
}

impl<'a> Verifier<'a> {
    pub fn new(lat: &'a Lattice, fset: &'a ForbiddenSet) -> Self {
        let members: HashSet<Vec<i64>> = fset.f_coeff.iter().cloned().collect();
        let half: Vec<Vec<i64>> = fset
            .f_coeff
            .iter()
            .filter(|f| f.iter().sum::<i64>() >= 0)
            .cloned()
            .collect();
        let n = lat.n();
        let mut coord_lo = vec![i64::MAX; n];
        let mut coord_hi = vec![i64::MIN; n];
        for f in &fset.f_coeff {
            for (j, &x) in f.iter().enumerate() {
                coord_lo[j] = coord_lo[j].min(x);
                coord_hi[j] = coord_hi[j].max(x);
            }
        }
        Verifier {
            lat,
            fset,
            members,
            half,
            coord_lo,
            coord_hi,
            scan_cache: Default::default(),
            trie: std::sync::OnceLock::new(),
        }
    }

    pub fn forbidden(&self) -> &ForbiddenSet {
        self.fset
    }

    /// Nonzero points of the half-box `|lambda|_inf <= s`, coordinate sum
    /// nonnegative, flattened and sorted by ascending squared norm.
    fn scan_points(&self, s: u32) -> &[i64] {
        let n = self.lat.n();
        self.scan_cache[s as usize].get_or_init(|| {
            let mut pts: Vec<Vec<i64>> = Vec::new();
            scan_box(&vec![s as i64; n], &mut |lambda| {
                if lambda.iter().sum::<i64>() >= 0 && lambda.iter().any(|&x| x != 0) {
                    pts.push(lambda.to_vec());
                }
                true
            });
            pts.sort_by_key(|p| (p.iter().map(|&x| x * x).sum::<i64>(), p.clone()));
            pts.into_iter().flatten().collect()
        })
    }

    /// Necessary condition: no small combination lands in the forbidden
    /// set. Scans `|lambda_j| <= s` with nonnegative coordinate sum,
    /// shortest combinations first for the cached radii.
    pub fn check_i(&self, c: &IntMatrix, s: u32) -> CheckOutcome {
        let n = self.lat.n();
        let mut node = vec![0i64; n];
        if (s as usize) < self.scan_cache.len() {
            let pts = self.scan_points(s);
            'points: for lambda in pts.chunks_exact(n) {
                for i in 0..n {
                    let mut acc = 0i64;
                    for j in 0..n {
                        acc += c[(i, j)] * lambda[j];
                    }
                    if acc < self.coord_lo[i] || acc > self.coord_hi[i] {
                        continue 'points;
                    }
                    node[i] = acc;
                }
                if self.members.contains(node.as_slice()) {
                    return CheckOutcome::Witness { lambda: lambda.to_vec(), node };
                }
            }
            return CheckOutcome::Pass;
        }
        // Uncached radii walk the box directly.
        let mut outcome = CheckOutcome::Pass;
        scan_box(&vec![s as i64; n], &mut |lambda| {
            if lambda.iter().sum::<i64>() < 0 || lambda.iter().all(|&x| x == 0) {
                return true;
            }
            for i in 0..n {
                let mut acc = 0i64;
                for j in 0..n {
                    acc += c[(i, j)] * lambda[j];
                }
                if acc < self.coord_lo[i] || acc > self.coord_hi[i] {
                    return true;
                }
                node[i] = acc;
            }
            if self.members.contains(node.as_slice()) {
                outcome = CheckOutcome::Witness { lambda: lambda.to_vec(), node: node.clone() };
                return false;
            }
            true
        });
        outcome
    }

    /// Witness-existence form of the necessary scan for lower-triangular
    /// bases: row `i` depends only on `lambda_0..=i`, so the scan walks
    /// the forbidden set as a prefix trie and keeps only the coordinate
    /// values reachable as `base + pivot * t`, `|t| <= s`. Returns true
    /// iff some box point lands in the forbidden set; agrees with
    /// `check_i` on that question.
    pub fn check_i_hits_triangular(&self, c: &IntMatrix, s: u32) -> bool {
        let n = self.lat.n();
        debug_assert_eq!((c.rows(), c.cols()), (n, n));
        let flat: Vec<i64> = (0..n).flat_map(|i| c.row(i).to_vec()).collect();
        self.check_i_hits_triangular_flat(&flat, s)
    }

    /// Same scan over a row-major entry slice, for allocation-free bulk
    /// sweeps.
    pub fn check_i_hits_triangular_flat(&self, entries: &[i64], s: u32) -> bool {
        let n = self.lat.n();
        assert!(n <= 16, "triangular scan supports rank <= 16");
        assert!(s <= i32::MAX as u32, "scan radius too large");
        debug_assert_eq!(entries.len(), n * n);
        debug_assert!((0..n).all(|i| (i + 1..n).all(|j| entries[i * n + j] == 0)));
        let trie = self.trie.get_or_init(|| FTrie::build(&self.fset.f_coeff, n));
        let mut lambda = [0i64; 16];
        self.triangular_level(entries, s as i64, 0, trie, trie.root, &mut lambda)
    }

    fn triangular_level(
        &self,
        entries: &[i64],
        s: i64,
        level: usize,
        trie: &FTrie,
        node: u32,
        lambda: &mut [i64; 16],
    ) -> bool {
        let n = self.lat.n();
        if level == n {
            // A full match is a forbidden node; the zero vector is never
            // in the forbidden set, so lambda is automatically nonzero.
            return true;
        }
        let row = &entries[level * n..level * n + level + 1];
        let mut base = 0i64;
        for j in 0..level {
            base += row[j] * lambda[j];
        }
        let pivot = row[level];
        let kids = trie.children(node);
        if pivot == 0 {
            // Degenerate column: only the running base is reachable.
            let at = kids.partition_point(|&(v, _)| v < base);
            if let Some(&(v, child)) = kids.get(at) {
                if v == base {
                    lambda[level] = 0;
                    if self.triangular_level(entries, s, level + 1, trie, child, lambda) {
                        return true;
                    }
                }
            }
            return false;
        }
        // Only the sorted-children window base +- s*|pivot| is reachable.
        let span = s * pivot.abs();
        let lo = base - span;
        let hi = base + span;
        let start = kids.partition_point(|&(v, _)| v < lo);
        for &(v, child) in &kids[start..] {
            if v > hi {
                break;
            }
            let diff = v - base;
            if diff % pivot == 0 {
                let t = diff / pivot;
                if t.abs() <= s {
                    lambda[level] = t;
                    if self.triangular_level(entries, s, level + 1, trie, child, lambda) {
                        return true;
                    }
                }
            }
        }
        lambda[level] = 0;
        false
    }

    /// Complete box scan: any forbidden node of the sublattice has
    /// coefficients bounded by `|lambda_j| <= m_j * gamma` with `m_j` the
    /// norm of the j-th row of `C^{-1}`.
    pub fn check_ii(&self, c: &IntMatrix) -> Result<CheckOutcome> {
        let n = self.lat.n();
        let bounds = self.box_bounds(c)?;
        let mut outcome = CheckOutcome::Pass;
        let mut node = vec![0i64; n];
        scan_box(&bounds, &mut |lambda| {
            if lambda.iter().sum::<i64>() < 0 || lambda.iter().all(|&x| x == 0) {
                return true;
            }
            for i in 0..n {
                let mut acc = 0i64;
                for j in 0..n {
                    acc += c[(i, j)] * lambda[j];
                }
                if acc < self.coord_lo[i] || acc > self.coord_hi[i] {
                    return true;
                }
                node[i] = acc;
            }
            if self.members.contains(node.as_slice()) {
                outcome = CheckOutcome::Witness { lambda: lambda.to_vec(), node: node.clone() };
                return false;
            }
            true
        });
        Ok(outcome)
    }

    /// Complete integrality scan: the sublattice meets the forbidden set
    /// iff `C^{-1} f` is integral for some forbidden `f` with
    /// nonnegative sum.
    pub fn check_iii(&self, c: &IntMatrix) -> Result<CheckOutcome> {
        let (adj, det) = adjugate(c)?;
        let hit = self
            .half
            .par_iter()
            .enumerate()
            .filter_map(|(pos, f)| {
                let lambda = integral_solution(&adj, &det, f)?;
                Some((pos, lambda, f.clone()))
            })
            .min_by_key(|(pos, _, _)| *pos);
        Ok(match hit {
            Some((_, lambda, node)) => CheckOutcome::Witness { lambda, node },
            None => CheckOutcome::Pass,
        })
    }

    fn box_bounds(&self, c: &IntMatrix) -> Result<Vec<i64>> {
        let n = self.lat.n();
        let (adj, det) = adjugate(c)?;
        let det_sq = Rat::from_big(&det * &det, BigInt::from(1));
        let mut bounds = Vec::with_capacity(n);
        for j in 0..n {
            let row_norm_sq: BigInt =
                adj.row(j).iter().map(|x| x * x).sum();
            // m_j^2 * gamma^2 exactly.
            let m_sq = Rat::from_big(row_norm_sq, BigInt::from(1)) / det_sq.clone();
            let bound_sq = m_sq * self.fset.gamma_sq.clone();
            bounds.push(floor_sqrt_i64(&bound_sq));
        }
        Ok(bounds)
    }

    /// Exact cost comparison: full box volume against half the forbidden
    /// set, choosing the smaller complete check.
    fn cheaper_complete(&self, c: &IntMatrix) -> Result<VerifyMethod> {
        let bounds = self.box_bounds(c)?;
        let mut volume = BigInt::from(1);
        for b in bounds {
            volume *= BigInt::from(2 * b + 1);
        }
        Ok(if volume <= BigInt::from(self.half.len()) {
            VerifyMethod::CheckII
        } else {
            VerifyMethod::CheckIII
        })
    }

    pub fn default_s(&self) -> u32 {
        if self.lat.n() == 5 {
            2
        } else {
            1
        }
    }

    pub fn verify(&self, c: &IntMatrix, s: Option<u32>, method: VerifyMethod) -> Result<VerificationReport> {
        // The scans run in i64; magnitudes anywhere near this limit are
        // far outside the domain of meaningful sublattice bases.
        let n = self.lat.n() as i64;
        if c.max_abs() > i64::MAX / (64 * n.max(1)) {
            return Err(Error::InvalidInput("sublattice entries too large".to_string()));
        }
        let spec = SublatticeSpec::new(c.clone())?;
        let s = s.unwrap_or_else(|| self.default_s());
        let stage1 = self.check_i(c, s);
        if let CheckOutcome::Witness { lambda, node } = stage1 {
            return Ok(self.report(&spec, format!("check_i(s={s})"), "refuted", Some((lambda, node))));
        }
        let complete = match method {
            VerifyMethod::CheckIOnly => {
                return Ok(self.report(&spec, format!("check_i(s={s})"), "inconclusive", None));
            }
            VerifyMethod::CheckII => VerifyMethod::CheckII,
            VerifyMethod::CheckIII => VerifyMethod::CheckIII,
            VerifyMethod::Auto => self.cheaper_complete(c)?,
        };
        let (name, outcome) = match complete {
            VerifyMethod::CheckII => ("check_ii", self.check_ii(c)?),
            VerifyMethod::CheckIII => ("check_iii", self.check_iii(c)?),
            _ => unreachable!(),
        };
        Ok(match outcome {
            CheckOutcome::Pass => self.report(&spec, name.to_string(), "verified", None),
            CheckOutcome::Witness { lambda, node } => {
                self.report(&spec, name.to_string(), "refuted", Some((lambda, node)))
            }
        })
    }

    fn report(
        &self,
        spec: &SublatticeSpec,
        method: String,
        verdict: &str,
        witness: Option<(Vec<i64>, Vec<i64>)>,
    ) -> VerificationReport {
        let implied_bound = (verdict == "verified")
            .then(|| format!("chi(E^{}) <= {}", self.lat.n(), spec.index));
        VerificationReport {
            lattice: self.lat.name().map(|s| s.to_string()),
            lattice_hash: self.lat.content_hash(),
            c: spec.c.to_rows(),
            index: spec.index.to_string(),
            method,
            verdict: verdict.to_string(),
            witness: witness.map(|(lambda, node)| WitnessJson { lambda, node }),
            implied_bound,
        }
    }
}

/// `(adj, det)` with `adj = det * C^{-1}`, all integer.
pub fn adjugate(c: &IntMatrix) -> Result<(IntMatrix, BigInt)> {
    let det = c.det_bigint()?;
    if det.is_zero() {
        return Err(Error::Singular);
    }
    let inv = inverse(&RatMatrix::from_int_rows(&c.to_rows()))?;
    let det_rat = Rat::from_big(det.clone(), BigInt::from(1));
    let n = c.rows();
    let mut adj = IntMatrix::zero(n, n);
    for i in 0..n {
        for j in 0..n {
            let e = inv.at(i, j) * &det_rat;
            adj[(i, j)] = e
                .to_i64()
                .ok_or_else(|| Error::InvalidInput("adjugate entry exceeds i64".to_string()))?;
        }
    }
    Ok((adj, det))
}

/// Largest integer `t` with `t^2 <= x`, for nonnegative `x`.
fn floor_sqrt_i64(x: &Rat) -> i64 {
    assert!(!x.is_negative());
    let num = x.numer();
    let den = x.denom();
    let mut t: BigInt = num_integer::Roots::sqrt(&(num / den));
    while (&t + 1) * (&t + 1) * den <= num.clone() {
        t += 1;
    }
    while &t * &t * den > num.clone() {
        t -= 1;
    }
    i64::try_from(t).expect("box bound fits i64")
}

/// `C^{-1} f` when integral, via `adj * f = det * lambda`.
fn integral_solution(adj: &IntMatrix, det: &BigInt, f: &[i64]) -> Option<Vec<i64>> {
    let det_i: i128 = i128::try_from(det.clone()).ok()?;
    let n = adj.rows();
    let mut lambda = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc: i128 = 0;
        for j in 0..n {
            acc += adj[(i, j)] as i128 * f[j] as i128;
        }
        if acc % det_i != 0 {
            return None;
        }
        lambda.push(i64::try_from(acc / det_i).expect("solution fits i64"));
    }
    Some(lambda)
}

/// Lexicographic scan of the integer box `prod [-b_j, b_j]`; the visitor
/// returns false to stop.
fn scan_box(bounds: &[i64], visit: &mut impl FnMut(&[i64]) -> bool) {
    let n = bounds.len();
    let mut lambda: Vec<i64> = bounds.iter().map(|b| -b).collect();
    loop {
        if !visit(&lambda) {
            return;
        }
        let mut k = n;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            if lambda[k] < bounds[k] {
                lambda[k] += 1;
                for (x, b) in lambda.iter_mut().zip(bounds).skip(k + 1) {
                    *x = -b;
                }
                break;
            }
        }
    }
}

/// Parses `{ "C": [[...]] }`.
pub fn sublattice_from_json(text: &str) -> Result<IntMatrix> {
    #[derive(Deserialize)]
    struct CJson {
        #[serde(rename = "C")]
        c: Vec<Vec<i64>>,
    }
    let parsed: CJson =
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("sublattice json: {e}")))?;
    if parsed.c.is_empty() || parsed.c.iter().any(|r| r.len() != parsed.c.len()) {
        return Err(Error::InvalidInput("sublattice matrix must be square".to_string()));
    }
    Ok(IntMatrix::from_rows(&parsed.c))
}
