//! Finite reflection-group machinery: breadth-first group closure, the
//! fundamental cone, greedy canonicalization of points into the cone,
//! and orbit expansion of node sets. Elements act on the coefficient
//! chart as integer matrices preserving the Gram form, so membership
//! checks stay exact and fast.

use std::collections::{HashSet, VecDeque};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use crate::error::{Error, Result};
use crate::exactlin::{dot, inverse, IntMatrix, Rat, RatMatrix, RatVector};
use crate::lattice::Lattice;

pub const DEFAULT_CLOSURE_CAP: usize = 1_000_000;
pub const DEFAULT_CANON_CAP: usize = 1_000_000;

#[derive(Debug, Clone)]
pub struct ReflectionGroup {
    n: usize,
    generators: Vec<IntMatrix>,
    /// Chart functionals of the cone: `K = {u : f . u >= 0 for all f}`.
    cone: Vec<RatVector>,
    /// Same functionals cleared to integers (signs preserved).
    cone_int: Vec<Vec<i64>>,
    elements: OnceLock<Vec<IntMatrix>>,
}

impl ReflectionGroup {
    /// Group generated by the lattice's cataloged reflection normals;
    /// trivial when none are present. Verifies that the cone has a
    /// strictly feasible point.
    pub fn from_lattice(lat: &Lattice) -> Result<Self> {
        let mut generators = Vec::new();
        let mut cone = Vec::new();
        for w in lat.reflections() {
            let r = lat.chart_reflection(w)?;
            generators.push(r.matrix);
            cone.push(r.functional);
        }
        Self::from_parts(lat.n(), generators, cone)
    }

    pub fn trivial(n: usize) -> Self {
        Self::from_parts(n, Vec::new(), Vec::new()).expect("trivial group is valid")
    }

    /// Group from explicit chart generators and cone functionals, e.g. a
    /// hand-picked reflection subset. Checks strict cone feasibility.
    pub fn from_parts(n: usize, generators: Vec<IntMatrix>, cone: Vec<RatVector>) -> Result<Self> {
        Self::assemble(n, generators, cone)
    }

    fn assemble(n: usize, generators: Vec<IntMatrix>, cone: Vec<RatVector>) -> Result<Self> {
        if !cone.is_empty() {
            strictly_feasible_point(n, &cone)?;
        }
        let cone_int = cone
            .iter()
            .map(|f| {
                let lcm = f.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                f.iter()
                    .map(|x| {
                        let v: BigInt = x.numer() * (&lcm / x.denom());
                        i64::try_from(v).expect("cone functional exceeds i64")
                    })
                    .collect()
            })
            .collect();
        Ok(ReflectionGroup { n, generators, cone, cone_int, elements: OnceLock::new() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[IntMatrix] {
        &self.generators
    }

    pub fn cone_normals(&self) -> &[RatVector] {
        &self.cone
    }

    pub fn is_trivial(&self) -> bool {
        self.generators.is_empty()
    }

    /// Full element list by breadth-first closure under multiplication,
    /// deduplicated by exact equality. Errors past `cap`.
    pub fn close(&self, cap: usize) -> Result<&[IntMatrix]> {
        if let Some(els) = self.elements.get() {
            return Ok(els);
        }
        let identity = IntMatrix::identity(self.n);
        let mut seen: HashSet<IntMatrix> = HashSet::new();
        seen.insert(identity.clone());
        let mut queue: VecDeque<IntMatrix> = VecDeque::new();
        queue.push_back(identity);
        let mut order: Vec<IntMatrix> = Vec::new();
        while let Some(g) = queue.pop_front() {
            order.push(g.clone());
            for s in &self.generators {
                let next = s.mul(&g);
                if seen.insert(next.clone()) {
                    if seen.len() > cap {
                        return Err(Error::CapExceeded { what: "reflection group closure", cap });
                    }
                    queue.push_back(next);
                }
            }
        }
        Ok(self.elements.get_or_init(|| order))
    }

    pub fn order(&self, cap: usize) -> Result<usize> {
        Ok(self.close(cap)?.len())
    }

    /// Cone membership of an integer coefficient vector.
    pub fn cone_contains(&self, x: &[i64]) -> bool {
        self.cone_int.iter().all(|f| int_dot(f, x) >= 0)
    }

    /// Greedy reduction into the cone: while some wall functional is
    /// negative, reflect. Returns the composed group element and the
    /// reduced vector.
    pub fn canonicalize(&self, x: &[i64], cap: usize) -> Result<(IntMatrix, Vec<i64>)> {
        let mut g = IntMatrix::identity(self.n);
        let mut v = x.to_vec();
        for _ in 0..=cap {
            let Some(w) = self.cone_int.iter().position(|f| int_dot(f, &v) < 0) else {
                return Ok((g, v));
            };
            v = self.generators[w].mul_vec(&v);
            g = self.generators[w].mul(&g);
        }
        Err(Error::CapExceeded { what: "canonicalization steps (invalid reflection set)", cap })
    }

    /// Orbit of one vector by generator-closure; never materializes the
    /// group.
    pub fn orbit(&self, x: &[i64]) -> Vec<Vec<i64>> {
        let mut seen: HashSet<Vec<i64>> = HashSet::new();
        seen.insert(x.to_vec());
        let mut queue: VecDeque<Vec<i64>> = VecDeque::new();
        queue.push_back(x.to_vec());
        while let Some(v) = queue.pop_front() {
            for s in &self.generators {
                let next = s.mul_vec(&v);
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
        let mut out: Vec<Vec<i64>> = seen.into_iter().collect();
        out.sort();
        out
    }

    /// Union of the orbits of a node set, deduplicated and sorted.
    pub fn orbit_expand(&self, set: &[Vec<i64>]) -> Vec<Vec<i64>> {
        let mut seen: HashSet<Vec<i64>> = HashSet::new();
        let mut queue: VecDeque<Vec<i64>> = VecDeque::new();
        for x in set {
            if seen.insert(x.clone()) {
                queue.push_back(x.clone());
            }
        }
        while let Some(v) = queue.pop_front() {
            for s in &self.generators {
                let next = s.mul_vec(&v);
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
        let mut out: Vec<Vec<i64>> = seen.into_iter().collect();
        out.sort();
        out
    }

    /// A rational point with every wall functional strictly positive.
    pub fn interior_point(&self, n: usize) -> Result<RatVector> {
        if self.cone.is_empty() {
            return Ok(vec![Rat::zero(); n]);
        }
        strictly_feasible_point(n, &self.cone)
    }
}

fn int_dot(a: &[i64], b: &[i64]) -> i128 {
    a.iter().zip(b).map(|(&x, &y)| x as i128 * y as i128).sum()
}

/// Finds a rational point with every wall functional strictly positive:
/// prescribe positive slacks on a maximal independent wall subset and
/// minimum-norm-solve, trying a small family of slack patterns for
/// dependent systems.
fn strictly_feasible_point(n: usize, cone: &[RatVector]) -> Result<RatVector> {
    let mut independent: Vec<RatVector> = Vec::new();
    for f in cone {
        let mut trial = independent.clone();
        trial.push(f.clone());
        if RatMatrix::from_rows(trial.clone()).rank() == trial.len() {
            independent = trial;
        }
    }
    let k = independent.len();
    let d = RatMatrix::from_rows(independent);
    let core = inverse(&d.mul(&d.transpose())).expect("independent rows");
    let lift = d.transpose().mul(&core);
    let mut targets: Vec<Vec<Rat>> = vec![vec![Rat::one(); k]];
    for boost in 0..k {
        let mut t = vec![Rat::one(); k];
        t[boost] = Rat::from_int(k as i64 + 1);
        targets.push(t);
    }
    for t in targets {
        let u = lift.mul_vec(&t);
        if cone.iter().all(|f| dot(f, &u).is_positive()) {
            debug_assert_eq!(u.len(), n);
            return Ok(u);
        }
    }
    Err(Error::InvalidStructure(
        "could not certify a nonempty cone interior for the supplied reflections".to_string(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::catalog;

    #[test]
    fn single_swap_in_z2() {
        // One mirror through e1 - e2: order 2.
        let lat = catalog("Zn", Some(2)).unwrap();
        let refl = lat.chart_reflection(&vec![Rat::one(), Rat::from_int(-1)]).unwrap();
        let g = ReflectionGroup::from_parts(2, vec![refl.matrix], vec![refl.functional]).unwrap();
        assert_eq!(g.order(100).unwrap(), 2);
    }

    #[test]
    fn symmetric_group_order() {
        // Adjacent transposition mirrors in Z^3 close to S3.
        let lat = catalog("Zn", Some(3)).unwrap();
        let mut gens = Vec::new();
        let mut cone = Vec::new();
        for w in [
            vec![Rat::one(), Rat::from_int(-1), Rat::zero()],
            vec![Rat::zero(), Rat::one(), Rat::from_int(-1)],
        ] {
            let r = lat.chart_reflection(&w).unwrap();
            gens.push(r.matrix);
            cone.push(r.functional);
        }
        let g = ReflectionGroup::from_parts(3, gens, cone).unwrap();
        assert_eq!(g.order(100).unwrap(), 6);
    }

    #[test]
    fn trivial_group() {
        let g = ReflectionGroup::trivial(3);
        assert_eq!(g.order(10).unwrap(), 1);
        assert!(g.cone_contains(&[-5, 0, 3]));
        let (e, v) = g.canonicalize(&[-5, 0, 3], 10).unwrap();
        assert_eq!(e, IntMatrix::identity(3));
        assert_eq!(v, vec![-5, 0, 3]);
    }

    #[test]
    fn canonicalize_sorts_under_permutation_cone() {
        let lat = catalog("Zn", Some(3)).unwrap();
        let g = ReflectionGroup::from_lattice(&lat).unwrap();
        // Full hyperoctahedral cone: x1 >= x2 >= x3 >= 0.
        let (elem, v) = g.canonicalize(&[1, 3, 2], 1000).unwrap();
        assert_eq!(v, vec![3, 2, 1]);
        assert_eq!(elem.mul_vec(&[1, 3, 2]), vec![3, 2, 1]);
        // Idempotent.
        let (_, v2) = g.canonicalize(&v, 1000).unwrap();
        assert_eq!(v2, v);
        // Sign-flip case.
        let (_, v3) = g.canonicalize(&[-1, 0, 0], 1000).unwrap();
        assert_eq!(v3, vec![1, 0, 0]);
    }

    #[test]
    fn group_elements_preserve_gram() {
        let lat = catalog("An", Some(2)).unwrap();
        let g = ReflectionGroup::from_lattice(&lat).unwrap();
        assert_eq!(g.order(100).unwrap(), 12);
        for e in g.close(100).unwrap() {
            let m = RatMatrix::from_int_rows(&e.to_rows());
            assert_eq!(&m.transpose().mul(lat.gram()).mul(&m), lat.gram());
        }
    }

    #[test]
    fn orbit_sizes_divide_group_order() {
        let lat = catalog("Zn", Some(3)).unwrap();
        let g = ReflectionGroup::from_lattice(&lat).unwrap();
        let order = g.order(100).unwrap();
        assert_eq!(order, 48);
        for x in [[3i64, 2, 1], [1, 1, 0], [0, 0, 0], [2, 2, 2]] {
            let orbit = g.orbit(&x);
            assert_eq!(order % orbit.len(), 0);
        }
        assert_eq!(g.orbit(&[0, 0, 0]).len(), 1);
        assert_eq!(g.orbit(&[3, 2, 1]).len(), 48);
    }

    #[test]
    fn hyperoctahedral_orbit_expand() {
        let lat = catalog("Zn", Some(2)).unwrap();
        let g = ReflectionGroup::from_lattice(&lat).unwrap();
        let f = g.orbit_expand(&[vec![1, 0], vec![1, 1]]);
        assert_eq!(f.len(), 8);
        // Closed under negation and coordinate swap.
        for v in &f {
            assert!(f.contains(&vec![-v[0], -v[1]]));
            assert!(f.contains(&vec![v[1], v[0]]));
        }
    }
}
