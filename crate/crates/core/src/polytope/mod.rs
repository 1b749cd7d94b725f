//! Exact convex polytope engine: half-space intersection to vertices by
//! incremental cutting, face enumeration from vertex-facet incidence, and
//! exact squared point-to-polytope distance via face projections. All
//! coordinates are rational; distances use a caller-supplied SPD metric
//! (the coefficient-chart Gram matrix), identity by default.

use std::sync::OnceLock;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::{dot, inverse, Rat, RatMatrix, RatVector, vec_add, vec_scale, vec_sub};

/// Constraint `normal . x <= offset`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfSpace {
    pub normal: RatVector,
    pub offset: Rat,
}

impl HalfSpace {
    pub fn new(normal: RatVector, offset: Rat) -> Self {
        assert!(normal.iter().any(|x| !x.is_zero()), "zero normal");
        HalfSpace { normal, offset }
    }

    fn eval(&self, x: &[Rat]) -> Rat {
        dot(&self.normal, x) - self.offset.clone()
    }
}

#[derive(Clone, Debug)]
pub struct Polytope {
    ambient_dim: usize,
    metric: RatMatrix,
    halfspaces: Vec<HalfSpace>,
    vertices: Vec<RatVector>,
    incidence: Vec<Vec<usize>>,
    redundant: Vec<usize>,
    faces: OnceLock<Vec<Face>>,
}

/// A nonempty face, identified by the maximal set of constraints tight on
/// all of it.
#[derive(Clone, Debug)]
pub struct Face {
    pub tight_set: Vec<usize>,
    /// A vertex of the face (any affine-hull point works for the
    /// projection formula).
    pub anchor: RatVector,
    /// Basis of the face's direction space, as matrix columns.
    pub basis: RatMatrix,
    pub dim: usize,
    /// Metric projector onto anchor + range(basis); zero matrix for
    /// vertices.
    projector: RatMatrix,
}

pub struct BuildOptions {
    pub metric: Option<RatMatrix>,
    /// Per-coordinate seed box bound; must strictly contain the polytope
    /// if given. Grown automatically otherwise.
    pub initial_box: Option<Vec<Rat>>,
    pub max_grow: u32,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { metric: None, initial_box: None, max_grow: 40 }
    }
}

/// Smallest rational `>= sqrt(x)` with the same denominator flavor.
pub fn rational_sqrt_upper(x: &Rat) -> Rat {
    assert!(!x.is_negative());
    if x.is_zero() {
        return Rat::zero();
    }
    // sqrt(p/q) = sqrt(pq)/q <= (isqrt(pq) + 1)/q.
    let pq: BigInt = x.numer() * x.denom();
    Rat::from_big(num_integer::Roots::sqrt(&pq) + 1, x.denom().clone())
}

/// Exact vertex enumeration of a bounded intersection of half-spaces.
pub fn halfspace_intersection(
    halfspaces: Vec<HalfSpace>,
    ambient_dim: usize,
    options: BuildOptions,
) -> Result<Polytope> {
    if ambient_dim == 0 || ambient_dim > 16 {
        return Err(Error::CapExceeded { what: "polytope ambient dimension", cap: 16 });
    }
    for h in &halfspaces {
        if h.normal.len() != ambient_dim {
            return Err(Error::InvalidInput("half-space dimension mismatch".to_string()));
        }
    }
    let metric = options.metric.unwrap_or_else(|| RatMatrix::identity(ambient_dim));
    let mut box_bounds = options.initial_box.clone().unwrap_or_else(|| {
        let total = halfspaces.iter().fold(Rat::one(), |acc, h| acc + h.offset.abs());
        vec![total; ambient_dim]
    });
    for _ in 0..=options.max_grow {
        match cut_from_box(&halfspaces, ambient_dim, &box_bounds) {
            Ok(CutOutcome::Bounded { vertices }) => {
                return finish(halfspaces, ambient_dim, metric, vertices);
            }
            Ok(CutOutcome::TouchesBox) => {
                for b in box_bounds.iter_mut() {
                    *b = &*b * &Rat::from_int(4);
                }
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::Unbounded)
}

enum CutOutcome {
    Bounded { vertices: Vec<RatVector> },
    TouchesBox,
}

struct Working {
    dim: usize,
    constraints: Vec<HalfSpace>,
    artificial: usize, // first `artificial` constraints are the box
    vertices: Vec<RatVector>,
    tight: Vec<Vec<usize>>,
}

impl Working {
    fn recompute_tight(&mut self) {
        self.tight = self
            .vertices
            .iter()
            .map(|v| {
                self.constraints
                    .iter()
                    .enumerate()
                    .filter(|(_, h)| h.eval(v).is_zero())
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect();
    }

    fn adjacent(&self, a: usize, b: usize) -> bool {
        let common: Vec<usize> =
            self.tight[a].iter().filter(|i| self.tight[b].contains(i)).copied().collect();
        if common.len() < self.dim - 1 {
            return false;
        }
        let rows: Vec<Vec<Rat>> =
            common.iter().map(|&i| self.constraints[i].normal.clone()).collect();
        RatMatrix::from_rows(rows).rank() == self.dim - 1
    }
}

fn cut_from_box(
    halfspaces: &[HalfSpace],
    dim: usize,
    box_bounds: &[Rat],
) -> Result<CutOutcome> {
    // Box constraints +-e_j . x <= b_j, then the real constraints.
    let mut constraints: Vec<HalfSpace> = Vec::with_capacity(2 * dim + halfspaces.len());
    for j in 0..dim {
        for sign in [1i64, -1] {
            let mut normal = vec![Rat::zero(); dim];
            normal[j] = Rat::from_int(sign);
            constraints.push(HalfSpace::new(normal, box_bounds[j].clone()));
        }
    }
    let artificial = constraints.len();

    // Seed cube vertices.
    let mut vertices: Vec<RatVector> = Vec::with_capacity(1 << dim);
    for mask in 0u32..(1 << dim) {
        let v: RatVector = (0..dim)
            .map(|j| {
                if mask >> j & 1 == 1 {
                    box_bounds[j].clone()
                } else {
                    -&box_bounds[j]
                }
            })
            .collect();
        vertices.push(v);
    }
    let mut w = Working { dim, constraints, artificial, vertices, tight: Vec::new() };
    w.recompute_tight();

    // Insert remaining constraints, fewest violated vertices first.
    let mut pending: Vec<usize> = Vec::new();
    for h in halfspaces {
        w.constraints.push(h.clone());
        pending.push(w.constraints.len() - 1);
    }
    while !pending.is_empty() {
        let (pick, _) = pending
            .iter()
            .enumerate()
            .map(|(slot, &ci)| {
                let violated = w
                    .vertices
                    .iter()
                    .filter(|v| w.constraints[ci].eval(v).is_positive())
                    .count();
                (slot, violated)
            })
            .min_by_key(|&(slot, violated)| (violated, slot))
            .expect("pending nonempty");
        let ci = pending.remove(pick);
        apply_cut(&mut w, ci)?;
        if w.vertices.is_empty() {
            return Err(Error::InvalidInput(
                "half-space intersection is empty or lower-dimensional".to_string(),
            ));
        }
    }

    // Any vertex tight on a box facet means the box clipped the true set.
    let touches = w.tight.iter().flatten().any(|&i| i < w.artificial);
    if touches {
        return Ok(CutOutcome::TouchesBox);
    }
    Ok(CutOutcome::Bounded { vertices: w.vertices })
}

fn apply_cut(w: &mut Working, ci: usize) -> Result<()> {
    let signs: Vec<Rat> = w.vertices.iter().map(|v| w.constraints[ci].eval(v)).collect();
    if signs.iter().all(|s| !s.is_positive()) {
        w.recompute_tight();
        return Ok(());
    }
    let mut new_vertices: Vec<RatVector> = Vec::new();
    for a in 0..w.vertices.len() {
        if !signs[a].is_negative() {
            continue;
        }
        for b in 0..w.vertices.len() {
            if !signs[b].is_positive() || !w.adjacent(a, b) {
                continue;
            }
            // Point where the edge crosses the hyperplane.
            let t = -&signs[a] / (&signs[b] - &signs[a]);
            let dir = vec_sub(&w.vertices[b], &w.vertices[a]);
            let p = vec_add(&w.vertices[a], &vec_scale(&dir, &t));
            if !new_vertices.contains(&p) {
                new_vertices.push(p);
            }
        }
    }
    let mut kept: Vec<RatVector> = Vec::new();
    for (v, s) in w.vertices.drain(..).zip(signs) {
        if !s.is_positive() {
            kept.push(v);
        }
    }
    for p in new_vertices {
        if !kept.contains(&p) {
            kept.push(p);
        }
    }
    w.vertices = kept;
    w.recompute_tight();
    Ok(())
}

fn finish(
    halfspaces: Vec<HalfSpace>,
    ambient_dim: usize,
    metric: RatMatrix,
    mut vertices: Vec<RatVector>,
) -> Result<Polytope> {
    vertices.sort();
    let incidence: Vec<Vec<usize>> = vertices
        .iter()
        .map(|v| {
            halfspaces
                .iter()
                .enumerate()
                .filter(|(_, h)| h.eval(v).is_zero())
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    let redundant: Vec<usize> = (0..halfspaces.len())
        .filter(|i| !incidence.iter().any(|t| t.contains(i)))
        .collect();
    Ok(Polytope {
        ambient_dim,
        metric,
        halfspaces,
        vertices,
        incidence,
        redundant,
        faces: OnceLock::new(),
    })
}

impl Polytope {
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn metric(&self) -> &RatMatrix {
        &self.metric
    }

    pub fn halfspaces(&self) -> &[HalfSpace] {
        &self.halfspaces
    }

    pub fn vertices(&self) -> &[RatVector] {
        &self.vertices
    }

    pub fn incidence(&self) -> &[Vec<usize>] {
        &self.incidence
    }

    /// Input half-spaces with no tight vertex; removing them leaves the
    /// vertex set unchanged.
    pub fn redundant(&self) -> &[usize] {
        &self.redundant
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        self.halfspaces.iter().all(|h| !h.eval(x).is_positive())
    }

    /// Squared metric norm of the farthest vertex.
    pub fn circumradius_sq(&self) -> Rat {
        self.vertices
            .iter()
            .map(|v| dot(v, &self.metric.mul_vec(v)))
            .max()
            .expect("polytope has vertices")
    }

    /// Every nonempty face of every dimension, as canonical maximal tight
    /// sets closed under intersection, with exact affine data.
    pub fn faces(&self) -> &[Face] {
        self.faces.get_or_init(|| self.enumerate_faces())
    }

    fn enumerate_faces(&self) -> Vec<Face> {
        use std::collections::BTreeSet;
        let mut keys: BTreeSet<Vec<usize>> = self.incidence.iter().cloned().collect();
        loop {
            let snapshot: Vec<Vec<usize>> = keys.iter().cloned().collect();
            let before = keys.len();
            for i in 0..snapshot.len() {
                for j in (i + 1)..snapshot.len() {
                    let meet: Vec<usize> = snapshot[i]
                        .iter()
                        .filter(|x| snapshot[j].contains(x))
                        .copied()
                        .collect();
                    keys.insert(meet);
                }
            }
            if keys.len() == before {
                break;
            }
        }
        keys.into_iter().map(|tight| self.face_from_tight(tight)).collect()
    }

    fn face_from_tight(&self, tight: Vec<usize>) -> Face {
        let anchor_idx = (0..self.vertices.len())
            .find(|&v| tight.iter().all(|i| self.incidence[v].contains(i)))
            .expect("face key built from vertex tight sets");
        let anchor = self.vertices[anchor_idx].clone();
        let basis = nullspace_basis(
            self.ambient_dim,
            &tight.iter().map(|&i| self.halfspaces[i].normal.clone()).collect::<Vec<_>>(),
        );
        let dim = basis.cols();
        let projector = if dim == 0 {
            RatMatrix::zero(self.ambient_dim, self.ambient_dim)
        } else {
            // P = A (A^T G A)^{-1} A^T G, metric-orthogonal projection
            // onto the direction space.
            let at_g = basis.transpose().mul(&self.metric);
            let core = inverse(&at_g.mul(&basis)).expect("direction gram nonsingular");
            basis.mul(&core).mul(&at_g)
        };
        Face { tight_set: tight, anchor, basis, dim, projector }
    }

    /// Exact squared metric distance from `y` to the polytope; zero iff
    /// `y` is a member. Minimum over faces of the distance to the metric
    /// projection onto the face's affine hull, kept only when the
    /// projection lands inside the polytope.
    pub fn dist_sq(&self, y: &[Rat]) -> Rat {
        self.dist_general(y, None).expect("some face projection is feasible")
    }

    /// `dist_sq(y) < bound`, short-circuiting as soon as any feasible
    /// face projection is close enough.
    pub fn dist_sq_less_than(&self, y: &[Rat], bound: &Rat) -> bool {
        match self.dist_general(y, Some(bound)) {
            Some(d) => &d < bound,
            None => true, // short-circuited below the bound
        }
    }

    fn dist_general(&self, y: &[Rat], early_below: Option<&Rat>) -> Option<Rat> {
        let mut best: Option<Rat> = None;
        for face in self.faces() {
            let rel = vec_sub(y, &face.anchor);
            let p = if face.dim == 0 {
                face.anchor.clone()
            } else {
                vec_add(&face.anchor, &face.projector.mul_vec(&rel))
            };
            if !self.contains(&p) {
                continue;
            }
            let diff = vec_sub(y, &p);
            let d = dot(&diff, &self.metric.mul_vec(&diff));
            if let Some(bound) = early_below {
                if &d < bound {
                    return None;
                }
            }
            best = match best {
                None => Some(d),
                Some(b) if d < b => Some(d),
                keep => keep,
            };
        }
        best
    }

    pub fn to_json(&self) -> PolytopeJson {
        PolytopeJson {
            ambient_dim: self.ambient_dim,
            halfspaces: self
                .halfspaces
                .iter()
                .map(|h| HalfSpaceJson { z: h.normal.clone(), c: h.offset.clone() })
                .collect(),
            vertices: self.vertices.clone(),
            incidence: self.incidence.clone(),
            redundant: self.redundant.clone(),
        }
    }
}

/// Basis of `{d : row . d = 0 for all rows}` as matrix columns.
fn nullspace_basis(dim: usize, rows: &[RatVector]) -> RatMatrix {
    let mut m = RatMatrix::from_rows(if rows.is_empty() {
        vec![vec![Rat::zero(); dim]]
    } else {
        rows.to_vec()
    });
    let nrows = m.rows();
    let mut pivots: Vec<usize> = Vec::new();
    let mut rank = 0usize;
    for col in 0..dim {
        let Some(p) = (rank..nrows).find(|&i| !m.at(i, col).is_zero()) else { continue };
        for j in 0..dim {
            let tmp = m.at(rank, j).clone();
            *m.at_mut(rank, j) = m.at(p, j).clone();
            *m.at_mut(p, j) = tmp;
        }
        let pivot = m.at(rank, col).clone();
        for j in 0..dim {
            let v = m.at(rank, j) / &pivot;
            *m.at_mut(rank, j) = v;
        }
        for i in 0..nrows {
            if i == rank || m.at(i, col).is_zero() {
                continue;
            }
            let f = m.at(i, col).clone();
            for j in 0..dim {
                let delta = m.at(rank, j) * &f;
                *m.at_mut(i, j) -= &delta;
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == nrows {
            break;
        }
    }
    let free: Vec<usize> = (0..dim).filter(|c| !pivots.contains(c)).collect();
    let mut basis = RatMatrix::zero(dim, free.len());
    for (k, &fc) in free.iter().enumerate() {
        *basis.at_mut(fc, k) = Rat::one();
        for (r, &pc) in pivots.iter().enumerate() {
            *basis.at_mut(pc, k) = -m.at(r, fc);
        }
    }
    basis
}

#[derive(Serialize, Deserialize)]
pub struct HalfSpaceJson {
    pub z: RatVector,
    pub c: Rat,
}

#[derive(Serialize, Deserialize)]
pub struct PolytopeJson {
    pub ambient_dim: usize,
    pub halfspaces: Vec<HalfSpaceJson>,
    pub vertices: Vec<RatVector>,
    pub incidence: Vec<Vec<usize>>,
    pub redundant: Vec<usize>,
}
