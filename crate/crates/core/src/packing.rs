//! Surface-level assembly: per-vertex total curvatures, their Jacobian, and
//! the convex potential.

use crate::error::{domain, Result};
use crate::linalg::SparseMatrix;
use crate::quadrature::gauss_legendre_composite;
use crate::scalar::Real;
use crate::surface::{TargetCurvature, Triangulation};
use crate::tangency::{face_jacobian, solve_face, FaceGeometry};

/// Panels used by [`potential_value`] on every straight segment.
pub const POTENTIAL_PANELS: usize = 64;

/// Log-curvatures `Kᵢ = ln kᵢ`, one per vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct PackingState<T> {
    k_log: Vec<T>,
}

impl<T: Real> PackingState<T> {
    pub fn new(k_log: Vec<T>) -> Result<Self> {
        if let Some(i) = k_log.iter().position(|x| !x.is_finite()) {
            return domain(format!("log-curvature at vertex {i} is not finite"));
        }
        Ok(PackingState { k_log })
    }

    /// All curvatures equal to 1 (every vertex a horocycle).
    pub fn zeros(n: usize) -> Self {
        PackingState {
            k_log: vec![T::zero(); n],
        }
    }

    pub fn from_curvatures(k: &[T]) -> Result<Self> {
        if let Some(i) = k.iter().position(|&x| !(x > T::zero())) {
            return domain(format!("curvature at vertex {i} must be positive"));
        }
        Self::new(k.iter().map(|x| x.ln()).collect())
    }

    pub fn as_slice(&self) -> &[T] {
        &self.k_log
    }

    pub fn into_vec(self) -> Vec<T> {
        self.k_log
    }

    pub fn len(&self) -> usize {
        self.k_log.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k_log.is_empty()
    }

    pub fn curvatures(&self) -> Vec<T> {
        self.k_log.iter().map(|x| x.exp()).collect()
    }

    fn face_curvatures(&self, f: [usize; 3]) -> [T; 3] {
        f.map(|v| self.k_log[v].exp())
    }
}

/// Total curvatures per vertex together with the solved faces.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureReport<T> {
    pub l: Vec<T>,
    pub faces: Vec<FaceGeometry<T>>,
    pub total_area: T,
}

fn check_dims<T>(tri: &Triangulation, state: &PackingState<T>) -> Result<()> {
    if state.k_log.len() != tri.num_vertices() {
        return domain(format!(
            "state has {} entries for {} vertices",
            state.k_log.len(),
            tri.num_vertices()
        ));
    }
    Ok(())
}

/// `Lᵢ = Σ_{faces ∋ i} Lᵢ^{jk}`, summed in face order.
pub fn vertex_curvatures<T: Real>(
    tri: &Triangulation,
    state: &PackingState<T>,
) -> Result<CurvatureReport<T>> {
    check_dims(tri, state)?;
    let mut l = vec![T::zero(); tri.num_vertices()];
    let mut faces = Vec::with_capacity(tri.num_faces());
    let mut total_area = T::zero();
    for &f in tri.faces() {
        let g = solve_face(state.face_curvatures(f))?;
        for (c, &v) in f.iter().enumerate() {
            l[v] = l[v] + g.corners[c].total_curvature;
        }
        total_area = total_area + g.area;
        faces.push(g);
    }
    Ok(CurvatureReport {
        l,
        faces,
        total_area,
    })
}

/// `Mᵢⱼ = ∂Lᵢ/∂Kⱼ`, assembled from the face Jacobians.
pub fn global_jacobian<T: Real>(
    tri: &Triangulation,
    state: &PackingState<T>,
) -> Result<SparseMatrix<T>> {
    check_dims(tri, state)?;
    let mut triplets = Vec::with_capacity(9 * tri.num_faces());
    for &f in tri.faces() {
        let j = face_jacobian(state.face_curvatures(f))?;
        for a in 0..3 {
            for b in 0..3 {
                triplets.push((f[a], f[b], j[a][b]));
            }
        }
    }
    Ok(SparseMatrix::from_triplets(tri.num_vertices(), triplets))
}

/// `∇Φ = L − L̂`.
pub fn phi_gradient<T: Real>(
    tri: &Triangulation,
    state: &PackingState<T>,
    targets: &TargetCurvature<T>,
) -> Result<Vec<T>> {
    if targets.len() != tri.num_vertices() {
        return domain(format!(
            "{} targets for {} vertices",
            targets.len(),
            tri.num_vertices()
        ));
    }
    let report = vertex_curvatures(tri, state)?;
    Ok(report
        .l
        .iter()
        .zip(targets.as_slice())
        .map(|(&l, &t)| l - t)
        .collect())
}

fn segment_integral<T: Real>(tri: &Triangulation, from: &[T], to: &[T]) -> Result<T> {
    let delta: Vec<T> = to.iter().zip(from).map(|(&b, &a)| b - a).collect();
    let mut failure = None;
    let value = gauss_legendre_composite(
        |t: T| {
            let point = from.iter().zip(&delta).map(|(&a, &d)| a + d * t).collect();
            match vertex_curvatures(tri, &PackingState { k_log: point }) {
                Ok(r) => {
                    r.l.iter()
                        .zip(&delta)
                        .fold(T::zero(), |s, (&l, &d)| s + l * d)
                }
                Err(e) => {
                    failure.get_or_insert(e);
                    T::nan()
                }
            }
        },
        T::zero(),
        T::one(),
        POTENTIAL_PANELS,
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(value),
    }
}

/// `Φ(K) − Φ(K_ref)`: the line integral of `Σ Lᵢ dKᵢ` along the straight
/// segment from `reference` to `state`, minus `Σ L̂ᵢ (Kᵢ − K_ref,ᵢ)`.
pub fn potential_value<T: Real>(
    tri: &Triangulation,
    state: &PackingState<T>,
    reference: &PackingState<T>,
    targets: &TargetCurvature<T>,
) -> Result<T> {
    potential_along_path(tri, &[reference.clone(), state.clone()], targets)
}

/// Same difference of potentials, integrated along the polygonal path through
/// `waypoints` (first is the reference, last the evaluation point).
pub fn potential_along_path<T: Real>(
    tri: &Triangulation,
    waypoints: &[PackingState<T>],
    targets: &TargetCurvature<T>,
) -> Result<T> {
    let (Some(first), Some(last)) = (waypoints.first(), waypoints.last()) else {
        return domain("path needs at least one point");
    };
    for w in waypoints {
        check_dims(tri, w)?;
    }
    if targets.len() != tri.num_vertices() {
        return domain("target length does not match the vertex count");
    }
    let mut w = T::zero();
    for pair in waypoints.windows(2) {
        w = w + segment_integral(tri, &pair[0].k_log, &pair[1].k_log)?;
    }
    let linear = targets
        .as_slice()
        .iter()
        .zip(last.k_log.iter().zip(&first.k_log))
        .fold(T::zero(), |s, (&t, (&b, &a))| s + t * (b - a));
    Ok(w - linear)
}
