//! Three mutually externally tangent generalized circles.
//!
//! [`solve_face`] computes, for curvatures `(k1, k2, k3)`, the arc of every
//! curve between its two tangency points together with its total geodesic
//! curvature `L = l·k`, the generalized angle (centre angle for circles, axis
//! segment for hypercycles) and the area of the curvilinear interstice,
//! `π − L1 − L2 − L3`.
//!
//! Faces without horocycles go through the polygon of centres and axes
//! (triangle, quadrilateral, pentagon or hexagon). Faces with a horocycle are
//! read off the explicit half-plane embedding built by [`realize_face`].

mod embed;

pub use embed::{realize_face, EmbeddedCurve, EmbeddedFace};

use crate::error::{domain, Result};
use crate::hyptrig::{
    circle_triangle_angles, curvature_to_radius, pentagon_geometry, quadrilateral_geometry,
    solve_hexagon, CurveKind, GeneralizedRadius,
};
use crate::scalar::{lit, Real};

/// A circle, horocycle or hypercycle of geodesic curvature `k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneralizedCircle<T> {
    pub k: T,
    pub kind: CurveKind,
    pub radius: GeneralizedRadius<T>,
}

impl<T: Real> GeneralizedCircle<T> {
    pub fn new(k: T) -> Result<Self> {
        let radius = curvature_to_radius(k)?;
        Ok(GeneralizedCircle {
            k,
            kind: CurveKind::of(k),
            radius,
        })
    }

    pub fn r(&self) -> T {
        self.radius.value()
    }
}

/// Distance between centres (or axes) of two tangent generalized circles;
/// infinite as soon as one of them is a horocycle.
pub fn edge_length<T: Real>(a: &GeneralizedCircle<T>, b: &GeneralizedCircle<T>) -> T {
    if a.kind == CurveKind::Horocycle || b.kind == CurveKind::Horocycle {
        T::infinity()
    } else {
        a.r() + b.r()
    }
}

/// Which polygon underlies a face.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FaceCase {
    /// Three circles: triangle of centres.
    Triangle,
    /// Two circles and a hypercycle.
    Quadrilateral,
    /// One circle and two hypercycles.
    Pentagon,
    /// Three hypercycles: right-angled hexagon.
    Hexagon,
    /// At least one horocycle; some polygon vertices are ideal.
    Ideal,
}

/// Data attached to one corner of a face.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Corner<T> {
    pub circle: GeneralizedCircle<T>,
    /// Centre angle (circle) or axis segment (hypercycle); none for horocycles.
    pub gen_angle: Option<T>,
    pub arc_length: T,
    pub total_curvature: T,
    /// Area between the arc and the polygon corner: circular sector, strip
    /// over the axis segment, or horocyclic sector.
    pub sector_area: T,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FaceGeometry<T> {
    pub case: FaceCase,
    pub corners: [Corner<T>; 3],
    /// Area of the interstice bounded by the three arcs, `π − ΣL`.
    pub area: T,
    /// Area of the underlying polygon, `π − Σ(circle-corner angles)`.
    pub polygon_area: T,
    /// `edge_lengths[i]` joins corners `i+1` and `i+2` (mod 3).
    pub edge_lengths: [T; 3],
}

impl<T: Real> FaceGeometry<T> {
    pub fn total_curvatures(&self) -> [T; 3] {
        self.corners.map(|c| c.total_curvature)
    }

    pub fn arc_lengths(&self) -> [T; 3] {
        self.corners.map(|c| c.arc_length)
    }

    /// Interstice area recomputed as polygon area minus the corner sectors.
    pub fn area_from_polygon(&self) -> T {
        self.corners
            .iter()
            .fold(self.polygon_area, |acc, c| acc - c.sector_area)
    }
}

/// Solves the configuration of three mutually tangent generalized circles.
pub fn solve_face<T: Real>(k: [T; 3]) -> Result<FaceGeometry<T>> {
    let circles = [
        GeneralizedCircle::new(k[0])?,
        GeneralizedCircle::new(k[1])?,
        GeneralizedCircle::new(k[2])?,
    ];
    let kinds = circles.map(|c| c.kind);
    if kinds.contains(&CurveKind::Horocycle) {
        return ideal_face(circles);
    }
    let r = circles.map(|c| c.r());
    let hyper: Vec<usize> = (0..3)
        .filter(|&i| kinds[i] == CurveKind::Hypercycle)
        .collect();
    let mut angles = [T::zero(); 3];
    let case = match hyper.len() {
        0 => {
            angles = circle_triangle_angles(r);
            FaceCase::Triangle
        }
        1 => {
            let h = hyper[0];
            let (a, b) = ((h + 1) % 3, (h + 2) % 3);
            let q = quadrilateral_geometry(r[a] + r[h], r[a] + r[b], r[b] + r[h])?;
            angles[a] = q.angle_first;
            angles[b] = q.angle_third;
            angles[h] = q.axis;
            FaceCase::Quadrilateral
        }
        2 => {
            let c = (0..3).find(|&i| kinds[i] == CurveKind::Circle).unwrap();
            let (h1, h2) = (hyper[0], hyper[1]);
            let p = pentagon_geometry(r[c] + r[h1], r[c] + r[h2], r[h1] + r[h2])?;
            angles[c] = p.apex_angle;
            angles[h1] = p.axis_first;
            angles[h2] = p.axis_second;
            FaceCase::Pentagon
        }
        _ => {
            let s = solve_hexagon([r[1] + r[2], r[2] + r[0], r[0] + r[1]])?;
            angles = s;
            FaceCase::Hexagon
        }
    };
    let corners = [0, 1, 2].map(|i| corner_from_angle(circles[i], angles[i]));
    Ok(assemble(case, circles, corners))
}

fn corner_from_angle<T: Real>(circle: GeneralizedCircle<T>, angle: T) -> Corner<T> {
    let r = circle.r();
    match circle.kind {
        CurveKind::Circle => {
            let l = angle * r.sinh();
            let big = angle * r.cosh();
            Corner {
                circle,
                gen_angle: Some(angle),
                arc_length: l,
                total_curvature: big,
                sector_area: big - angle,
            }
        }
        CurveKind::Hypercycle => {
            let big = angle * r.sinh();
            Corner {
                circle,
                gen_angle: Some(angle),
                arc_length: angle * r.cosh(),
                total_curvature: big,
                sector_area: big,
            }
        }
        CurveKind::Horocycle => horocycle_corner(circle, angle),
    }
}

fn horocycle_corner<T: Real>(circle: GeneralizedCircle<T>, length: T) -> Corner<T> {
    Corner {
        circle,
        gen_angle: None,
        arc_length: length,
        total_curvature: length,
        sector_area: length,
    }
}

fn assemble<T: Real>(
    case: FaceCase,
    circles: [GeneralizedCircle<T>; 3],
    corners: [Corner<T>; 3],
) -> FaceGeometry<T> {
    let pi = T::PI();
    let area = corners.iter().fold(pi, |acc, c| acc - c.total_curvature);
    let polygon_area = corners
        .iter()
        .filter(|c| c.circle.kind == CurveKind::Circle)
        .fold(pi, |acc, c| acc - c.gen_angle.unwrap_or_else(T::zero));
    let edge_lengths = [
        edge_length(&circles[1], &circles[2]),
        edge_length(&circles[2], &circles[0]),
        edge_length(&circles[0], &circles[1]),
    ];
    FaceGeometry {
        case,
        corners,
        area,
        polygon_area,
        edge_lengths,
    }
}

fn ideal_face<T: Real>(circles: [GeneralizedCircle<T>; 3]) -> Result<FaceGeometry<T>> {
    let emb = realize_face(circles.map(|c| c.k))?;
    let corners = [0, 1, 2].map(|i| {
        let c = circles[i];
        match c.kind {
            CurveKind::Circle => corner_from_angle(c, emb.circle_angle(i)),
            CurveKind::Hypercycle => corner_from_angle(c, emb.axis_segment(i)),
            CurveKind::Horocycle => horocycle_corner(c, emb.horocycle_arc(i)),
        }
    });
    Ok(assemble(FaceCase::Ideal, circles, corners))
}

/// `J[i][j] = ∂Lᵢ/∂Sⱼ` with `S = ln k`, by central differences with step
/// `1e-6·max(1, |Sⱼ|)` (coarser for single precision).
pub fn face_jacobian<T: Real>(k: [T; 3]) -> Result<[[T; 3]; 3]> {
    if k.iter().any(|&x| !(x > T::zero())) {
        return domain(format!("curvatures must be positive, got {k:?}"));
    }
    let s = k.map(|x| x.ln());
    let base = lit::<T>(1e-6).max(T::epsilon().cbrt() * lit(0.1));
    let mut jac = [[T::zero(); 3]; 3];
    for j in 0..3 {
        let h = base * T::one().max(s[j].abs());
        let mut plus = s;
        let mut minus = s;
        plus[j] = s[j] + h;
        minus[j] = s[j] - h;
        let lp = solve_face(plus.map(|x| x.exp()))?.total_curvatures();
        let lm = solve_face(minus.map(|x| x.exp()))?.total_curvatures();
        let width = plus[j] - minus[j];
        for i in 0..3 {
            jac[i][j] = (lp[i] - lm[i]) / width;
        }
    }
    Ok(jac)
}
