//! The covering-radius recursion for laminated lattices: with packing
//! radius 1 throughout, `rho_{n+1}^2 <= pi_n / 4 + rho_n^2`, anchored at
//! dimensions with exactly known covering radii. Every dimension whose
//! bound stays at or below 4 certifies a `3^n` coloring through the
//! dilation rule.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::Rat;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LaminatedInput {
    pub n: usize,
    /// Exactly known squared covering radius (anchor).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_sq: Option<Rat>,
    /// Layer spacing consumed by the step `n -> n+1`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pi: Option<Rat>,
    /// External non-exact bound on the (unsquared) ratio.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_decimal: Option<Rat>,
    pub source: String,
}

#[derive(Deserialize)]
struct DataFile {
    #[allow(dead_code)]
    comment: String,
    rows: Vec<LaminatedInput>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LaminatedRow {
    pub n: usize,
    /// Squared covering-packing ratio (equals the squared covering
    /// radius at packing radius 1); an upper bound on chained rows.
    pub rho_bound_sq: Rat,
    /// Whether the value is an exact rational datum or chain output from
    /// exact data, as opposed to an external decimal.
    pub exact: bool,
    /// True when the row is an anchor rather than a recursion output.
    pub anchor: bool,
    /// `rho <= 2`, which certifies `3^n` colors.
    pub ratio_le_2: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub implied_bound: Option<String>,
}

pub fn builtin_inputs() -> Vec<LaminatedInput> {
    let text = include_str!("../../data/laminated.json");
    let file: DataFile = serde_json::from_str(text).expect("bundled laminated data parses");
    file.rows
}

/// Runs the recursion over `lo..=hi`, anchoring wherever an exact datum
/// exists and otherwise consuming the previous row's `pi`.
pub fn laminated_chain(inputs: &[LaminatedInput], lo: usize, hi: usize) -> Result<Vec<LaminatedRow>> {
    let find = |n: usize| inputs.iter().find(|r| r.n == n);
    let mut rows: Vec<LaminatedRow> = Vec::new();
    let mut prev: Option<(Rat, bool)> = None;
    for n in lo..=hi {
        let input = find(n);
        let (rho_sq, exact, anchor) = if let Some(h) = input.and_then(|r| r.h_sq.clone()) {
            (h, true, true)
        } else if let Some(dec) = input.and_then(|r| r.bound_decimal.clone()) {
            (dec.square(), false, true)
        } else {
            let (prev_sq, prev_exact) =
                prev.clone().ok_or_else(|| Error::MissingData(format!("no anchor before n = {n}")))?;
            let pi_prev = find(n - 1)
                .and_then(|r| r.pi.clone())
                .ok_or_else(|| Error::MissingData(format!("pi value for n = {}", n - 1)))?;
            (pi_prev * Rat::new(1, 4) + prev_sq, prev_exact, false)
        };
        let ratio_le_2 = rho_sq <= Rat::from_int(4);
        let implied_bound = ratio_le_2.then(|| {
            let mut acc = BigInt::from(1);
            for _ in 0..n {
                acc *= 3;
            }
            format!("chi(E^{n}) <= 3^{n} = {acc}")
        });
        rows.push(LaminatedRow { n, rho_bound_sq: rho_sq.clone(), exact, anchor, ratio_le_2, implied_bound });
        prev = Some((rho_sq, exact));
    }
    Ok(rows)
}

/// The bundled table over dimensions 9 through 38.
pub fn laminated_table() -> Result<Vec<LaminatedRow>> {
    laminated_chain(&builtin_inputs(), 9, 38)
}
