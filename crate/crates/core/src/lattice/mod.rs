//! Lattice representation, point enumeration in balls, relevant vectors,
//! and packing radius. Geometry lives in the n-dimensional coefficient
//! chart `x = M u` with the Gram matrix as inner product, so every value
//! stays rational; radii are always squared.

mod catalog;
pub mod eisenstein;
pub mod voronoi;

pub use catalog::catalog;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::{
    determinant, dot, inverse, pseudoinverse, IntMatrix, Rat, RatMatrix, RatVector,
};

/// A lattice `M Z^n` with `M` an `m x n` rational matrix of rank `n`.
#[derive(Clone, Debug)]
pub struct Lattice {
    name: Option<String>,
    generator: RatMatrix,
    gram: RatMatrix,
    gram_inv: RatMatrix,
    ldl: Ldl,
    declared_covering_sq: Option<Rat>,
    declared_min_sq: Option<Rat>,
    reflections: Vec<RatVector>,
    eisenstein_j: Option<IntMatrix>,
    /// Catalog metadata is trusted and cell geometry refused (Leech).
    metadata_only: bool,
}

/// A lattice node: integer coefficients and squared norm. The ambient
/// point is `Lattice::point`, materialized only where needed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeNode {
    pub coeffs: Vec<i64>,
    pub norm_sq: Rat,
}

/// Exact `G = L D L^T` factorization of an SPD rational matrix,
/// `L` unit lower triangular.
#[derive(Clone, Debug)]
struct Ldl {
    l: RatMatrix,
    d: Vec<Rat>,
}

fn ldl_decompose(g: &RatMatrix) -> Result<Ldl> {
    let n = g.rows();
    let mut l = RatMatrix::identity(n);
    let mut d = vec![Rat::zero(); n];
    for j in 0..n {
        let mut dj = g.at(j, j).clone();
        for k in 0..j {
            dj -= &(&(l.at(j, k) * l.at(j, k)) * &d[k]);
        }
        if !dj.is_positive() {
            return Err(Error::InvalidStructure(
                "gram matrix is not positive definite".to_string(),
            ));
        }
        for i in (j + 1)..n {
            let mut v = g.at(i, j).clone();
            for k in 0..j {
                v -= &(&(l.at(i, k) * l.at(j, k)) * &d[k]);
            }
            *l.at_mut(i, j) = v / dj.clone();
        }
        d[j] = dj;
    }
    Ok(Ldl { l, d })
}

impl Lattice {
    pub fn new(name: Option<String>, generator: RatMatrix) -> Result<Self> {
        Self::with_metadata(name, generator, None, None, Vec::new(), None, false)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn with_metadata(
        name: Option<String>,
        generator: RatMatrix,
        declared_covering_sq: Option<Rat>,
        declared_min_sq: Option<Rat>,
        reflections: Vec<RatVector>,
        eisenstein_j: Option<IntMatrix>,
        metadata_only: bool,
    ) -> Result<Self> {
        let gram = generator.gram();
        let gram_inv = inverse(&gram).map_err(|_| Error::RankDeficient)?;
        let ldl = ldl_decompose(&gram)?;
        let lat = Lattice {
            name,
            generator,
            gram,
            gram_inv,
            ldl,
            declared_covering_sq,
            declared_min_sq,
            reflections,
            eisenstein_j,
            metadata_only,
        };
        for w in &lat.reflections {
            lat.chart_reflection(w)?;
        }
        if let Some(j) = &lat.eisenstein_j {
            lat.check_eisenstein(j)?;
        }
        Ok(lat)
    }

    /// Number of lattice coordinates (rank).
    pub fn n(&self) -> usize {
        self.generator.cols()
    }

    /// Ambient dimension.
    pub fn m(&self) -> usize {
        self.generator.rows()
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn generator(&self) -> &RatMatrix {
        &self.generator
    }

    pub fn gram(&self) -> &RatMatrix {
        &self.gram
    }

    pub fn gram_inv(&self) -> &RatMatrix {
        &self.gram_inv
    }

    pub fn reflections(&self) -> &[RatVector] {
        &self.reflections
    }

    pub fn eisenstein_j(&self) -> Option<&IntMatrix> {
        self.eisenstein_j.as_ref()
    }

    pub fn has_eisenstein(&self) -> bool {
        self.eisenstein_j.is_some()
    }

    pub fn metadata_only(&self) -> bool {
        self.metadata_only
    }

    pub fn declared_covering_sq(&self) -> Option<&Rat> {
        self.declared_covering_sq.as_ref()
    }

    pub fn declared_min_sq(&self) -> Option<&Rat> {
        self.declared_min_sq.as_ref()
    }

    /// Squared Gram norm of a coefficient vector.
    pub fn norm_sq(&self, coeffs: &[i64]) -> Rat {
        let n = self.n();
        assert_eq!(coeffs.len(), n);
        let mut acc = Rat::zero();
        for i in 0..n {
            if coeffs[i] == 0 {
                continue;
            }
            for j in 0..n {
                if coeffs[j] == 0 {
                    continue;
                }
                acc += &(self.gram.at(i, j) * &Rat::from_int(coeffs[i] * coeffs[j]));
            }
        }
        acc
    }

    /// Gram inner product of two chart vectors.
    pub fn inner(&self, a: &[Rat], b: &[Rat]) -> Rat {
        dot(a, &self.gram.mul_vec(b))
    }

    pub fn chart_norm_sq(&self, a: &[Rat]) -> Rat {
        self.inner(a, a)
    }

    pub fn node(&self, coeffs: Vec<i64>) -> LatticeNode {
        let norm_sq = self.norm_sq(&coeffs);
        LatticeNode { coeffs, norm_sq }
    }

    /// Ambient coordinates `M * coeffs` of a node.
    pub fn point(&self, node: &LatticeNode) -> RatVector {
        let rat_coeffs: RatVector = node.coeffs.iter().map(|&c| Rat::from_int(c)).collect();
        self.generator.mul_vec(&rat_coeffs)
    }

    /// All nonzero nodes with `norm_sq <= r_sq`, sorted by (norm, coeffs).
    /// Coefficients are boxed per coordinate by the dual bound
    /// `lambda_j^2 <= (G^{-1})_jj * r_sq`; subtrees are cut early with the
    /// exact LDL partial sums, which does not change the output.
    pub fn enumerate_in_ball(&self, r_sq: &Rat) -> Vec<LatticeNode> {
        let n = self.n();
        if !r_sq.is_positive() {
            return Vec::new();
        }
        let mut out: Vec<LatticeNode> = Vec::new();
        let mut coeffs = vec![0i64; n];
        // contrib[j] = sum_{k > j} L[k][j] * lambda_k
        let mut contrib = vec![Rat::zero(); n];
        self.enumerate_level(n, r_sq, &mut coeffs, &mut contrib, &Rat::zero(), &mut out);
        out.sort_by(|a, b| a.norm_sq.cmp(&b.norm_sq).then(a.coeffs.cmp(&b.coeffs)));
        out
    }

    fn enumerate_level(
        &self,
        level: usize,
        r_sq: &Rat,
        coeffs: &mut Vec<i64>,
        contrib: &mut Vec<Rat>,
        spent: &Rat,
        out: &mut Vec<LatticeNode>,
    ) {
        if level == 0 {
            if coeffs.iter().any(|&c| c != 0) {
                // The accumulated LDL sum is the exact squared norm.
                out.push(LatticeNode { coeffs: coeffs.clone(), norm_sq: spent.clone() });
            }
            return;
        }
        let j = level - 1;
        let c = contrib[j].clone();
        let dj = &self.ldl.d[j];
        let budget = r_sq - spent;
        // Scan integers outward from the rational center -c.
        let center = (-&c).round_half_up();
        let center: i64 = i64::try_from(center).expect("enumeration center overflow");
        for dir in 0..2 {
            let mut t = if dir == 0 { center } else { center - 1 };
            loop {
                let shifted = Rat::from_int(t) + &c;
                let term = dj * &shifted.square();
                if term > budget {
                    break;
                }
                coeffs[j] = t;
                // Fixing lambda_j feeds L[j][i] * lambda_j into levels i < j.
                for i in 0..j {
                    let delta = self.ldl.l.at(j, i) * &Rat::from_int(t);
                    contrib[i] += &delta;
                }
                let spent2 = spent + &term;
                self.enumerate_level(j, r_sq, coeffs, contrib, &spent2, out);
                for i in 0..j {
                    let delta = self.ldl.l.at(j, i) * &Rat::from_int(t);
                    contrib[i] -= &delta;
                }
                coeffs[j] = 0;
                if dir == 0 {
                    t += 1;
                } else {
                    t -= 1;
                }
            }
        }
    }

    /// Squared minimal nonzero norm.
    pub fn min_norm_sq(&self) -> Rat {
        if self.metadata_only {
            return self
                .declared_min_sq
                .clone()
                .expect("metadata-only lattice must declare its minimum");
        }
        let seed = (0..self.n())
            .map(|i| self.gram.at(i, i).clone())
            .min()
            .expect("nonempty gram diagonal");
        let nodes = self.enumerate_in_ball(&seed);
        let computed = nodes.first().expect("basis vector inside seed ball").norm_sq.clone();
        if let Some(declared) = &self.declared_min_sq {
            assert_eq!(
                &computed, declared,
                "declared minimal norm disagrees with enumeration"
            );
        }
        computed
    }

    /// Packing radius squared: (minimal norm)^2 / 4.
    pub fn packing_radius_sq(&self) -> Rat {
        self.min_norm_sq() * Rat::new(1, 4)
    }

    /// Chart reflection data for an ambient normal `w`: the linear
    /// functional `d = M^T w` (so `x . w >= 0` reads `d . u >= 0`) and the
    /// integer coefficient-space matrix of the reflection.
    pub fn chart_reflection(&self, w: &RatVector) -> Result<ChartReflection> {
        if w.len() != self.m() {
            return Err(Error::InvalidInput("reflection normal has wrong dimension".into()));
        }
        let pinv = pseudoinverse(&self.generator)?;
        let w_coeff = pinv.mul_vec(w); // M^+ w
        // w must lie in the column space of M.
        let back = self.generator.mul_vec(&w_coeff);
        if &back != w {
            return Err(Error::InvalidStructure(
                "reflection normal is outside the lattice span".to_string(),
            ));
        }
        let functional: RatVector = self.generator.transpose().mul_vec(w);
        let w_norm_sq = dot(w, w);
        if w_norm_sq.is_zero() {
            return Err(Error::InvalidStructure("zero reflection normal".to_string()));
        }
        // S = I - (2/(w.w)) (M^+ w) (M^T w)^T, must be an integer matrix.
        let scale = Rat::from_int(2) / w_norm_sq;
        let n = self.n();
        let mut s = RatMatrix::identity(n);
        for i in 0..n {
            for j in 0..n {
                let delta = &(&w_coeff[i] * &functional[j]) * &scale;
                *s.at_mut(i, j) -= &delta;
            }
        }
        let mut mat = IntMatrix::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                let e = s.at(i, j);
                let v = e.to_i64().ok_or_else(|| {
                    Error::InvalidStructure("reflection does not preserve the lattice".to_string())
                })?;
                mat[(i, j)] = v;
            }
        }
        // Isometry in the chart: S^T G S = G.
        let s_rat = RatMatrix::from_int_rows(&mat.to_rows());
        if s_rat.transpose().mul(&self.gram).mul(&s_rat) != self.gram {
            return Err(Error::InvalidStructure(
                "reflection does not preserve the gram form".to_string(),
            ));
        }
        Ok(ChartReflection { functional, matrix: mat })
    }

    fn check_eisenstein(&self, j: &IntMatrix) -> Result<()> {
        let n = self.n();
        if j.rows() != n || j.cols() != n || !n.is_multiple_of(2) {
            return Err(Error::InvalidStructure("eisenstein map has wrong shape".to_string()));
        }
        // J^2 + J + I = 0 (order 3, no nonzero fixed points).
        let j2 = j.mul(j);
        for a in 0..n {
            for b in 0..n {
                let expect = if a == b { -1 } else { 0 };
                if j2[(a, b)] + j[(a, b)] != expect {
                    return Err(Error::InvalidStructure(
                        "eisenstein map fails J^2 + J + I = 0".to_string(),
                    ));
                }
            }
        }
        // J^T G J = G.
        let jr = RatMatrix::from_int_rows(&j.to_rows());
        if jr.transpose().mul(&self.gram).mul(&jr) != self.gram {
            return Err(Error::InvalidStructure(
                "eisenstein map does not preserve the gram form".to_string(),
            ));
        }
        Ok(())
    }

    /// The minimal facet-defining vector set of the Voronoi cell:
    /// `v` is relevant iff `{v, -v}` are the unique minima of the coset
    /// `v + 2L`. `covering_sq_bound` must be an upper bound on the squared
    /// covering radius.
    pub fn relevant_vectors_with_bound(&self, covering_sq_bound: &Rat) -> Result<Vec<LatticeNode>> {
        let n = self.n();
        let r_sq = covering_sq_bound * &Rat::from_int(4);
        let nodes = self.enumerate_in_ball(&r_sq);
        let mut by_coset: BTreeMap<Vec<u8>, Vec<&LatticeNode>> = BTreeMap::new();
        for node in &nodes {
            let key: Vec<u8> = node.coeffs.iter().map(|&c| (c.rem_euclid(2)) as u8).collect();
            if key.iter().all(|&b| b == 0) {
                continue;
            }
            by_coset.entry(key).or_default().push(node);
        }
        if by_coset.len() != (1usize << n) - 1 {
            return Err(Error::InvalidStructure(
                "covering bound too small: some cosets of 2L have no candidate".to_string(),
            ));
        }
        let mut relevant = Vec::new();
        for group in by_coset.values() {
            let min = group.iter().map(|nd| &nd.norm_sq).min().unwrap().clone();
            let achievers: Vec<&&LatticeNode> =
                group.iter().filter(|nd| nd.norm_sq == min).collect();
            if achievers.len() == 2 {
                relevant.push((*achievers[0]).clone());
                relevant.push((*achievers[1]).clone());
            }
        }
        relevant.sort_by(|a, b| a.norm_sq.cmp(&b.norm_sq).then(a.coeffs.cmp(&b.coeffs)));
        Ok(relevant)
    }

    /// Stable identity for caches, over the exact generator entries.
    pub fn content_hash(&self) -> String {
        let mut text = String::new();
        text.push_str(&format!("{}x{};", self.m(), self.n()));
        for i in 0..self.m() {
            for j in 0..self.n() {
                text.push_str(&self.generator.at(i, j).to_string());
                text.push(',');
            }
        }
        format!("{:016x}", fnv1a64(text.as_bytes()))
    }

    pub fn det_gram(&self) -> Rat {
        determinant(&self.gram).expect("gram is square")
    }
}

/// Chart data of one ambient reflection.
#[derive(Clone, Debug)]
pub struct ChartReflection {
    /// Linear functional `M^T w`; the half-space `x . w >= 0` is
    /// `functional . u >= 0` in the chart.
    pub functional: RatVector,
    /// Integer coefficient-space matrix of the reflection.
    pub matrix: IntMatrix,
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

/// JSON schema for lattices.
#[derive(Serialize, Deserialize)]
pub struct LatticeJson {
    pub name: Option<String>,
    pub m: usize,
    pub n: usize,
    pub generator: Vec<Vec<Rat>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub covering_radius_sq: Option<Rat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_norm_sq: Option<Rat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reflections: Option<Vec<Vec<Rat>>>,
    #[serde(rename = "eisenstein_J", skip_serializing_if = "Option::is_none")]
    pub eisenstein_j: Option<Vec<Vec<i64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metadata_only: Option<bool>,
}

impl Lattice {
    pub fn to_json(&self) -> LatticeJson {
        LatticeJson {
            name: self.name.clone(),
            m: self.m(),
            n: self.n(),
            generator: self.generator.to_rows(),
            covering_radius_sq: self.declared_covering_sq.clone(),
            min_norm_sq: self.declared_min_sq.clone(),
            reflections: if self.reflections.is_empty() {
                None
            } else {
                Some(self.reflections.clone())
            },
            eisenstein_j: self.eisenstein_j.as_ref().map(|j| j.to_rows()),
            metadata_only: if self.metadata_only { Some(true) } else { None },
        }
    }

    pub fn from_json(j: LatticeJson) -> Result<Self> {
        if j.generator.len() != j.m || j.generator.iter().any(|row| row.len() != j.n) {
            return Err(Error::InvalidInput("generator shape disagrees with m, n".to_string()));
        }
        Lattice::with_metadata(
            j.name,
            RatMatrix::from_rows(j.generator),
            j.covering_radius_sq,
            j.min_norm_sq,
            j.reflections.unwrap_or_default(),
            j.eisenstein_j.map(|rows| IntMatrix::from_rows(&rows)),
            j.metadata_only.unwrap_or(false),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z2_enumeration() {
        let l = catalog("Zn", Some(2)).unwrap();
        let nodes = l.enumerate_in_ball(&Rat::one());
        assert_eq!(nodes.len(), 4);
        let nodes = l.enumerate_in_ball(&Rat::from_int(2));
        assert_eq!(nodes.len(), 8);
        // Closed under negation, norms within the bound.
        for node in &nodes {
            assert!(node.norm_sq <= Rat::from_int(2));
            let neg: Vec<i64> = node.coeffs.iter().map(|c| -c).collect();
            assert!(nodes.iter().any(|m| m.coeffs == neg));
        }
    }

    #[test]
    fn a2_enumeration_matches_brute_force() {
        let l = catalog("An", Some(2)).unwrap();
        let mut brute = 0;
        for a in -3i64..=3 {
            for b in -3i64..=3 {
                if (a, b) == (0, 0) {
                    continue;
                }
                if l.norm_sq(&[a, b]) <= Rat::one() {
                    brute += 1;
                }
            }
        }
        let nodes = l.enumerate_in_ball(&Rat::one());
        assert_eq!(nodes.len(), brute);
        assert_eq!(nodes.len(), 6);
    }

    #[test]
    fn packing_radii() {
        assert_eq!(catalog("Zn", Some(3)).unwrap().packing_radius_sq(), Rat::new(1, 4));
        assert_eq!(catalog("Dn", Some(4)).unwrap().packing_radius_sq(), Rat::new(1, 2));
        assert_eq!(
            catalog("An_star_dilated", Some(5)).unwrap().packing_radius_sq(),
            Rat::new(15, 2)
        );
    }

    #[test]
    fn relevant_vectors_small() {
        let z2 = catalog("Zn", Some(2)).unwrap();
        let rel = z2.relevant_vectors_with_bound(&Rat::new(1, 2)).unwrap();
        assert_eq!(rel.len(), 4);

        let a2 = catalog("An", Some(2)).unwrap();
        let rel = a2.relevant_vectors_with_bound(&Rat::new(1, 3)).unwrap();
        assert_eq!(rel.len(), 6);

        let d4 = catalog("Dn", Some(4)).unwrap();
        let rel = d4.relevant_vectors_with_bound(&Rat::one()).unwrap();
        assert_eq!(rel.len(), 24);
    }

    #[test]
    fn json_round_trip() {
        let l = catalog("An_star_dilated", Some(3)).unwrap();
        let s = serde_json::to_string(&l.to_json()).unwrap();
        let back = Lattice::from_json(serde_json::from_str(&s).unwrap()).unwrap();
        assert_eq!(back.gram(), l.gram());
        assert_eq!(back.content_hash(), l.content_hash());
    }
}
