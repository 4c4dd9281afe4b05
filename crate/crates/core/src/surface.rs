//! Closed triangulated surfaces, their validation, and the admissibility test
//! for target curvatures.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{domain, Error, Result};
use crate::scalar::{lit, Real};

/// Largest vertex count for which [`check_admissible`] enumerates subsets.
pub const MAX_ENUMERATION_VERTICES: usize = 25;

/// A violation of the closed-surface invariants, with its location.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Defect {
    NoFaces,
    VertexOutOfRange { face: usize, vertex: usize },
    RepeatedVertex { face: usize },
    EdgeFaceCount { edge: [usize; 2], count: usize },
    IsolatedVertex { vertex: usize },
    LinkNotCycle { vertex: usize },
    Disconnected { components: usize },
}

impl fmt::Display for Defect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Defect::NoFaces => write!(f, "triangulation has no faces"),
            Defect::VertexOutOfRange { face, vertex } => {
                write!(
                    f,
                    "face {face} references vertex {vertex}, which is out of range"
                )
            }
            Defect::RepeatedVertex { face } => write!(f, "face {face} repeats a vertex"),
            Defect::EdgeFaceCount { edge, count } => write!(
                f,
                "edge ({}, {}) lies in {count} faces instead of 2",
                edge[0], edge[1]
            ),
            Defect::IsolatedVertex { vertex } => write!(f, "vertex {vertex} lies in no face"),
            Defect::LinkNotCycle { vertex } => {
                write!(f, "link of vertex {vertex} is not a single closed cycle")
            }
            Defect::Disconnected { components } => {
                write!(f, "surface has {components} connected components")
            }
        }
    }
}

/// Vertex count and face triples of a closed surface, with derived edges and
/// incidences. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct Triangulation {
    num_vertices: usize,
    faces: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
    edge_faces: Vec<Vec<usize>>,
    vertex_faces: Vec<Vec<usize>>,
}

impl Triangulation {
    /// Builds a triangulation and rejects it if [`Triangulation::validate`]
    /// finds any defect.
    pub fn new(num_vertices: usize, faces: Vec<[usize; 3]>) -> Result<Self> {
        let t = Self::unchecked(num_vertices, faces);
        let defects = t.validate();
        if defects.is_empty() {
            Ok(t)
        } else {
            Err(Error::InvalidTriangulation(defects))
        }
    }

    /// Builds the derived structures without validating. Faces with
    /// out-of-range vertices are kept but contribute no incidences.
    pub fn unchecked(num_vertices: usize, faces: Vec<[usize; 3]>) -> Self {
        let mut vertex_faces = vec![Vec::new(); num_vertices];
        let mut edge_map: BTreeMap<[usize; 2], Vec<usize>> = BTreeMap::new();
        for (fi, f) in faces.iter().enumerate() {
            if f.iter().any(|&v| v >= num_vertices) {
                continue;
            }
            for (c, &v) in f.iter().enumerate() {
                if !f[..c].contains(&v) {
                    vertex_faces[v].push(fi);
                }
            }
            for c in 0..3 {
                let (a, b) = (f[c], f[(c + 1) % 3]);
                if a != b {
                    edge_map.entry([a.min(b), a.max(b)]).or_default().push(fi);
                }
            }
        }
        let (edges, edge_faces) = edge_map.into_iter().unzip();
        Triangulation {
            num_vertices,
            faces,
            edges,
            edge_faces,
            vertex_faces,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    /// Sorted unordered vertex pairs, each stored as `[min, max]`.
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    /// Faces containing `v`, in increasing order.
    pub fn vertex_faces(&self, v: usize) -> &[usize] {
        &self.vertex_faces[v]
    }

    pub fn face_degree(&self, v: usize) -> usize {
        self.vertex_faces[v].len()
    }

    /// Every violation of the closed-surface invariants.
    pub fn validate(&self) -> Vec<Defect> {
        let mut defects = Vec::new();
        if self.faces.is_empty() {
            defects.push(Defect::NoFaces);
        }
        for (fi, f) in self.faces.iter().enumerate() {
            for &v in f {
                if v >= self.num_vertices {
                    defects.push(Defect::VertexOutOfRange {
                        face: fi,
                        vertex: v,
                    });
                }
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                defects.push(Defect::RepeatedVertex { face: fi });
            }
        }
        for (e, fs) in self.edges.iter().zip(&self.edge_faces) {
            if fs.len() != 2 {
                defects.push(Defect::EdgeFaceCount {
                    edge: *e,
                    count: fs.len(),
                });
            }
        }
        for v in 0..self.num_vertices {
            if self.vertex_faces[v].is_empty() {
                defects.push(Defect::IsolatedVertex { vertex: v });
            } else if !self.link_is_cycle(v) {
                defects.push(Defect::LinkNotCycle { vertex: v });
            }
        }
        let components = self.face_components();
        if components > 1 {
            defects.push(Defect::Disconnected { components });
        }
        defects
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    fn link_is_cycle(&self, v: usize) -> bool {
        let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &fi in &self.vertex_faces[v] {
            let f = self.faces[fi];
            let others: Vec<usize> = f.iter().copied().filter(|&w| w != v).collect();
            if others.len() != 2 || others[0] == others[1] {
                return false;
            }
            adj.entry(others[0]).or_default().push(others[1]);
            adj.entry(others[1]).or_default().push(others[0]);
        }
        if adj.values().any(|n| n.len() != 2) {
            return false;
        }
        let start = *adj.keys().next().unwrap();
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(w) = stack.pop() {
            for &n in &adj[&w] {
                if seen.insert(n) {
                    stack.push(n);
                }
            }
        }
        seen.len() == adj.len()
    }

    /// Number of connected components of the face-adjacency graph.
    fn face_components(&self) -> usize {
        let n = self.faces.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for fs in &self.edge_faces {
            for w in fs.windows(2) {
                let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
                parent[a] = b;
            }
        }
        (0..n).filter(|&i| find(&mut parent, i) == i).count()
    }

    /// `|F_I|`: faces with at least one vertex in `subset`.
    pub fn faces_incident(&self, subset: &[usize]) -> Result<usize> {
        let mut hit = vec![false; self.faces.len()];
        for &v in subset {
            if v >= self.num_vertices {
                return domain(format!(
                    "vertex {v} out of range for {} vertices",
                    self.num_vertices
                ));
            }
            for &fi in &self.vertex_faces[v] {
                hit[fi] = true;
            }
        }
        Ok(hit.into_iter().filter(|&h| h).count())
    }

    /// `|V| − |E| + |F|`.
    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    /// Same surface with vertex `v` renamed to `perm[v]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.num_vertices];
        if perm.len() != self.num_vertices
            || perm
                .iter()
                .any(|&p| p >= self.num_vertices || std::mem::replace(&mut seen[p], true))
        {
            return domain("relabeling is not a permutation of the vertices");
        }
        let faces = self.faces.iter().map(|f| f.map(|v| perm[v])).collect();
        Ok(Self::unchecked(self.num_vertices, faces))
    }

    pub fn tetrahedron() -> Self {
        Self::unchecked(4, vec![[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]])
    }

    pub fn octahedron() -> Self {
        // poles 0 and 5, equator 1..=4
        Self::bipyramid(4).relabeled(&[0, 5, 1, 2, 3, 4]).unwrap()
    }

    /// Two apexes over an `n`-gon: apexes are `0` and `1`, the equator
    /// `2..n+2`.
    pub fn bipyramid(n: usize) -> Self {
        assert!(n >= 3, "bipyramid needs at least a triangle");
        let mut faces = Vec::with_capacity(2 * n);
        for i in 0..n {
            let (a, b) = (2 + i, 2 + (i + 1) % n);
            faces.push([0, a, b]);
            faces.push([1, b, a]);
        }
        Self::unchecked(n + 2, faces)
    }

    pub fn icosahedron() -> Self {
        // vertex 0 on top, 1..=5 upper ring, 6..=10 lower ring, 11 at the bottom
        let mut faces = Vec::with_capacity(20);
        for i in 0..5 {
            let (u, un) = (1 + i, 1 + (i + 1) % 5);
            let (l, ln) = (6 + i, 6 + (i + 1) % 5);
            faces.push([0, u, un]);
            faces.push([u, l, un]);
            faces.push([un, l, ln]);
            faces.push([11, ln, l]);
        }
        Self::unchecked(12, faces)
    }

    /// `m × n` grid on the torus, each square split along a diagonal.
    pub fn torus_grid(m: usize, n: usize) -> Self {
        assert!(m >= 3 && n >= 3, "torus grid needs at least 3 × 3");
        let id = |i: usize, j: usize| (i % m) * n + (j % n);
        let mut faces = Vec::with_capacity(2 * m * n);
        for i in 0..m {
            for j in 0..n {
                let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
                faces.push([a, b, c]);
                faces.push([a, c, d]);
            }
        }
        Self::unchecked(m * n, faces)
    }

    /// Connected sum: removes face `fa` of `a` and face `fb` of `b` and joins
    /// the two holes by a triangulated tube. Vertices of `b` are shifted by
    /// `a.num_vertices()`.
    pub fn connected_sum(a: &Self, fa: usize, b: &Self, fb: usize) -> Self {
        let shift = a.num_vertices;
        let mut faces: Vec<[usize; 3]> = a
            .faces
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != fa)
            .map(|(_, f)| *f)
            .collect();
        faces.extend(
            b.faces
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != fb)
                .map(|(_, f)| f.map(|v| v + shift)),
        );
        let p = a.faces[fa];
        let q = b.faces[fb].map(|v| v + shift);
        for i in 0..3 {
            let j = (i + 1) % 3;
            faces.push([p[i], p[j], q[i]]);
            faces.push([p[j], q[j], q[i]]);
        }
        Self::unchecked(a.num_vertices + b.num_vertices, faces)
    }
}

/// Positive target total geodesic curvature per vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct TargetCurvature<T> {
    values: Vec<T>,
}

impl<T: Real> TargetCurvature<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, &v)| !(v > T::zero()) || !v.is_finite())
        {
            return domain(format!(
                "target curvature at vertex {i} must be positive, got {v}"
            ));
        }
        Ok(TargetCurvature { values })
    }

    pub fn uniform(n: usize, value: T) -> Result<Self> {
        Self::new(vec![value; n])
    }

    pub fn as_slice(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Outcome of the subset test `Σ_{i∈I} L̂ᵢ < π·|F_I|`.
#[derive(Clone, Debug, PartialEq)]
pub enum Admissibility<T> {
    /// Every subset passes; `tightest` attains the smallest margin
    /// `π|F_I| − Σ_{i∈I} L̂ᵢ`.
    Admissible { margin: T, tightest: Vec<usize> },
    /// `witness` maximizes `Σ_{i∈I} L̂ᵢ − π|F_I| = excess ≥ 0`.
    Violated { witness: Vec<usize>, excess: T },
}

impl<T> Admissibility<T> {
    pub fn is_admissible(&self) -> bool {
        matches!(self, Admissibility::Admissible { .. })
    }
}

fn mask_to_vec(mask: u32) -> Vec<usize> {
    (0..32).filter(|&b| mask >> b & 1 == 1).collect()
}

/// Is subset `a` preferred over `b` on a tie: fewer elements first, then the
/// lexicographically smaller sorted index list.
fn preferred(a: u32, b: u32) -> bool {
    match a.count_ones().cmp(&b.count_ones()) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => {
            let diff = a ^ b;
            diff != 0 && a & (diff & diff.wrapping_neg()) != 0
        }
    }
}

/// Decides whether `targets` lies in the admissible polytope by enumerating
/// all nonempty vertex subsets in Gray-code order.
pub fn check_admissible<T: Real>(
    tri: &Triangulation,
    targets: &TargetCurvature<T>,
) -> Result<Admissibility<T>> {
    let n = tri.num_vertices();
    if targets.len() != n {
        return domain(format!(
            "expected {n} target curvatures, got {}",
            targets.len()
        ));
    }
    if n > MAX_ENUMERATION_VERTICES {
        return Err(Error::Capacity {
            got: n,
            max: MAX_ENUMERATION_VERTICES,
        });
    }
    let l = targets.as_slice();
    let pi = T::PI();
    let scale = l
        .iter()
        .fold(pi * lit(tri.num_faces() as f64), |a, &x| a + x);
    let tie = scale * lit(1e-12);
    // Recompute margins exactly near the running optimum so that drift in the
    // incremental sum cannot pick the wrong subset.
    let guard = scale * lit::<T>(1e-9).max(T::epsilon() * lit(64.0));
    let exact = |mask: u32| {
        let sum = mask_to_vec(mask)
            .into_iter()
            .fold(T::zero(), |a, i| a + l[i]);
        let mut hit = 0usize;
        for f in tri.faces() {
            if f.iter().any(|&v| mask >> v & 1 == 1) {
                hit += 1;
            }
        }
        pi * lit(hit as f64) - sum
    };

    let mut cover = vec![0u8; tri.num_faces()];
    let mut covered = 0usize;
    let mut sum = T::zero();
    let mut mask = 0u32;
    let mut best_mask = 0u32;
    let mut best = T::infinity();
    for step in 1u64..(1u64 << n) {
        let v = step.trailing_zeros() as usize;
        let adding = mask >> v & 1 == 0;
        mask ^= 1 << v;
        for &fi in tri.vertex_faces(v) {
            if adding {
                if cover[fi] == 0 {
                    covered += 1;
                }
                cover[fi] += 1;
            } else {
                cover[fi] -= 1;
                if cover[fi] == 0 {
                    covered -= 1;
                }
            }
        }
        sum = if adding { sum + l[v] } else { sum - l[v] };
        let approx = pi * lit(covered as f64) - sum;
        if approx > best + guard {
            continue;
        }
        let margin = exact(mask);
        if margin < best - tie || (margin <= best + tie && preferred(mask, best_mask)) {
            best = margin;
            best_mask = mask;
        }
    }
    Ok(if best > T::zero() {
        Admissibility::Admissible {
            margin: best,
            tightest: mask_to_vec(best_mask),
        }
    } else {
        Admissibility::Violated {
            witness: mask_to_vec(best_mask),
            excess: -best,
        }
    })
}
