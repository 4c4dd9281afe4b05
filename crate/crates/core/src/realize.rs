//! Geometry of a solved packing: vertex classes, cone angles, cusps, geodesic
//! boundary lengths, the Gauss–Bonnet audit, and SVG pictures of single faces.

use std::fmt::Write as _;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::hyptrig::CurveKind;
use crate::packing::{vertex_curvatures, CurvatureReport, PackingState};
use crate::scalar::{lit, to_f64, Real};
use crate::surface::Triangulation;
use crate::tangency::{realize_face, EmbeddedCurve};

/// Default tolerance for deciding `k = 1`.
pub const CLASS_TOLERANCE: f64 = 1e-9;

/// What a vertex becomes on the realized surface.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexClass {
    /// `k < 1`: hypercycle, the vertex opens into a geodesic boundary circle.
    Boundary,
    /// `k = 1`: horocycle, the vertex becomes a cusp.
    Cusp,
    /// `k > 1`: circle, the vertex is a cone point.
    Cone,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Classification {
    pub classes: Vec<VertexClass>,
    pub boundary: Vec<usize>,
    pub cusps: Vec<usize>,
    pub cones: Vec<usize>,
}

impl Classification {
    pub fn class(&self, v: usize) -> VertexClass {
        self.classes[v]
    }
}

/// Splits vertices by `k < 1 − tol`, `|k − 1| ≤ tol`, `k > 1 + tol`.
pub fn classify<T: Real>(k: &[T], tol: T) -> Classification {
    let mut c = Classification::default();
    for (i, &x) in k.iter().enumerate() {
        let class = if (x - T::one()).abs() <= tol {
            c.cusps.push(i);
            VertexClass::Cusp
        } else if x < T::one() {
            c.boundary.push(i);
            VertexClass::Boundary
        } else {
            c.cones.push(i);
            VertexClass::Cone
        };
        c.classes.push(class);
    }
    c
}

/// Sum of the generalized angles at `v` over its incident faces.
fn corner_angle_sum<T: Real>(tri: &Triangulation, report: &CurvatureReport<T>, v: usize) -> T {
    tri.vertex_faces(v).iter().fold(T::zero(), |acc, &fi| {
        let c = tri.faces()[fi].iter().position(|&w| w == v).unwrap();
        acc + report.faces[fi].corners[c]
            .gen_angle
            .unwrap_or_else(T::zero)
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConeData<T> {
    /// Total angle `Θ` around the vertex.
    pub angle: T,
    /// Discrete Gaussian curvature `2π − Θ`.
    pub curvature: T,
}

/// Cone angle at a circle vertex.
pub fn cone_data<T: Real>(
    tri: &Triangulation,
    state: &PackingState<T>,
    v: usize,
) -> Result<ConeData<T>> {
    let report = vertex_curvatures(tri, state)?;
    cone_from_report(tri, state, &report, v)
}

fn cone_from_report<T: Real>(
    tri: &Triangulation,
    state: &PackingState<T>,
    report: &CurvatureReport<T>,
    v: usize,
) -> Result<ConeData<T>> {
    let k = state.as_slice()[v].exp();
    if CurveKind::of(k) != CurveKind::Circle {
        return domain(format!("vertex {v} has k = {k}, not a circle"));
    }
    let angle = corner_angle_sum(tri, report, v);
    Ok(ConeData {
        angle,
        curvature: T::PI() + T::PI() - angle,
    })
}

/// Length of the geodesic boundary circle at a hypercycle vertex: the sum of
/// its axis segments.
pub fn boundary_length<T: Real>(
    tri: &Triangulation,
    state: &PackingState<T>,
    v: usize,
) -> Result<T> {
    let report = vertex_curvatures(tri, state)?;
    boundary_from_report(tri, state, &report, v)
}

fn boundary_from_report<T: Real>(
    tri: &Triangulation,
    state: &PackingState<T>,
    report: &CurvatureReport<T>,
    v: usize,
) -> Result<T> {
    let k = state.as_slice()[v].exp();
    if CurveKind::of(k) != CurveKind::Hypercycle {
        return domain(format!("vertex {v} has k = {k}, not a hypercycle"));
    }
    Ok(corner_angle_sum(tri, report, v))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussBonnetAudit<T> {
    /// `Σ_f (π − Σ cone-corner angles of f)`.
    pub total_area: T,
    /// `χ(S) − |boundary| − |cusps|`.
    pub chi_realized: i64,
    /// `Σ_{cones} (2π − Θ_v)`.
    pub curvature_sum: T,
    /// `|total_area + 2π·chi_realized − curvature_sum|`.
    pub residual: T,
}

fn audit_from_report<T: Real>(
    tri: &Triangulation,
    report: &CurvatureReport<T>,
    classes: &Classification,
) -> GaussBonnetAudit<T> {
    let pi = T::PI();
    let two_pi = pi + pi;
    let mut total_area = T::zero();
    let mut cone_angles = vec![T::zero(); tri.num_vertices()];
    for (fi, f) in tri.faces().iter().enumerate() {
        let mut area = pi;
        for (c, &v) in f.iter().enumerate() {
            if classes.class(v) == VertexClass::Cone {
                let theta = report.faces[fi].corners[c]
                    .gen_angle
                    .unwrap_or_else(T::zero);
                area = area - theta;
                cone_angles[v] = cone_angles[v] + theta;
            }
        }
        total_area = total_area + area;
    }
    let curvature_sum = classes
        .cones
        .iter()
        .fold(T::zero(), |a, &v| a + two_pi - cone_angles[v]);
    let chi_realized =
        tri.euler_characteristic() - classes.boundary.len() as i64 - classes.cusps.len() as i64;
    let chi: T = lit(chi_realized as f64);
    GaussBonnetAudit {
        total_area,
        chi_realized,
        curvature_sum,
        residual: (total_area + two_pi * chi - curvature_sum).abs(),
    }
}

/// Gauss–Bonnet identity on the surface obtained by opening boundary vertices
/// and puncturing cusps.
pub fn gauss_bonnet_audit<T: Real>(
    tri: &Triangulation,
    state: &PackingState<T>,
    class_tol: T,
) -> Result<GaussBonnetAudit<T>> {
    let report = vertex_curvatures(tri, state)?;
    let classes = classify(&state.curvatures(), class_tol);
    Ok(audit_from_report(tri, &report, &classes))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VertexRecord<T> {
    pub index: usize,
    pub k: T,
    pub class: VertexClass,
    #[serde(rename = "L")]
    pub total_curvature: T,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cone_angle: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gaussian_curvature: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary_length: Option<T>,
    pub cusp: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RealizedMetric<T> {
    pub vertices: Vec<VertexRecord<T>>,
    pub classification: Classification,
    pub chi_surface: i64,
    pub audit: GaussBonnetAudit<T>,
    /// Sum of the interstice areas `π − L₁ − L₂ − L₃`.
    pub interstice_area: T,
}

/// Classifies vertices and computes every per-vertex and global quantity.
pub fn realize<T: Real>(
    tri: &Triangulation,
    state: &PackingState<T>,
    class_tol: T,
) -> Result<RealizedMetric<T>> {
    let report = vertex_curvatures(tri, state)?;
    let k = state.curvatures();
    let classes = classify(&k, class_tol);
    let mut vertices = Vec::with_capacity(k.len());
    for v in 0..k.len() {
        let class = classes.class(v);
        let mut rec = VertexRecord {
            index: v,
            k: k[v],
            class,
            total_curvature: report.l[v],
            cone_angle: None,
            gaussian_curvature: None,
            boundary_length: None,
            cusp: class == VertexClass::Cusp,
        };
        match class {
            VertexClass::Cone => {
                let c = cone_from_report(tri, state, &report, v)?;
                rec.cone_angle = Some(c.angle);
                rec.gaussian_curvature = Some(c.curvature);
            }
            VertexClass::Boundary => {
                rec.boundary_length = Some(boundary_from_report(tri, state, &report, v)?);
            }
            VertexClass::Cusp => {}
        }
        vertices.push(rec);
    }
    Ok(RealizedMetric {
        vertices,
        chi_surface: tri.euler_characteristic(),
        audit: audit_from_report(tri, &report, &classes),
        interstice_area: report.total_area,
        classification: classes,
    })
}

/// A curve of the face picture in the Poincaré disk.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DiskCurve<T> {
    Circle {
        center: [T; 2],
        radius: T,
    },
    /// Image passing through the pole of the disk map: a straight line.
    Line {
        point: [T; 2],
        direction: [T; 2],
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiskPicture<T> {
    pub curves: [DiskCurve<T>; 3],
    /// `tangency[i]` is where curves `i+1` and `i+2` touch.
    pub tangency: [[T; 2]; 3],
}

/// `z ↦ i(z − i)/(z + i)`: sends the tangency point of curves 0 and 1 to the
/// origin and keeps their common tangent vertical.
fn to_disk<T: Real>(z: Complex<T>) -> Complex<T> {
    let i = Complex::new(T::zero(), T::one());
    i * (z - i) / (z + i)
}

fn circumcircle<T: Real>(p: [Complex<T>; 3]) -> DiskCurve<T> {
    let (a, b, c) = (p[0], p[1], p[2]);
    let two = lit::<T>(2.0);
    let d = two * (a.re * (b.im - c.im) + b.re * (c.im - a.im) + c.re * (a.im - b.im));
    let scale = a.norm().max(b.norm()).max(c.norm()).max(T::one());
    if d.abs() <= lit::<T>(1e-12) * scale * scale {
        let dir = b - a;
        let n = dir.norm();
        return DiskCurve::Line {
            point: [a.re, a.im],
            direction: [dir.re / n, dir.im / n],
        };
    }
    let (na, nb, nc) = (a.norm_sqr(), b.norm_sqr(), c.norm_sqr());
    let ux = (na * (b.im - c.im) + nb * (c.im - a.im) + nc * (a.im - b.im)) / d;
    let uy = (na * (c.re - b.re) + nb * (a.re - c.re) + nc * (b.re - a.re)) / d;
    let center = Complex::new(ux, uy);
    DiskCurve::Circle {
        center: [ux, uy],
        radius: (a - center).norm(),
    }
}

/// The configuration of curvatures `k` drawn in the Poincaré disk.
pub fn disk_picture<T: Real>(k: [T; 3]) -> Result<DiskPicture<T>> {
    let emb = realize_face(k)?;
    let pole = Complex::new(T::zero(), -T::one());
    let curves = emb.curves.map(|c| {
        let pts: Vec<Complex<T>> = match c {
            EmbeddedCurve::Line { height } => [-T::one(), T::zero(), T::one()]
                .iter()
                .map(|&x| Complex::new(x, height))
                .collect(),
            EmbeddedCurve::Circle { center, radius } => (0..6)
                .map(|j| {
                    let phi = lit::<T>(j as f64) * T::PI() / lit(3.0);
                    Complex::new(
                        center[0] + radius * phi.cos(),
                        center[1] + radius * phi.sin(),
                    )
                })
                .filter(|z| (*z - pole).norm() > lit::<T>(1e-6))
                .take(3)
                .collect(),
        };
        circumcircle([to_disk(pts[0]), to_disk(pts[1]), to_disk(pts[2])])
    });
    let tangency = emb.tangency.map(|p| {
        let w = to_disk(Complex::new(p[0], p[1]));
        [w.re, w.im]
    });
    Ok(DiskPicture { curves, tangency })
}

/// Appearance of [`render_face_svg`] output.
#[derive(Clone, Debug, PartialEq)]
pub struct SvgOptions {
    /// Width and height in pixels.
    pub size: u32,
    pub stroke_width: f64,
    pub show_tangency: bool,
    pub colors: [String; 3],
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions {
            size: 512,
            stroke_width: 1.5,
            show_tangency: true,
            colors: ["#1f77b4".into(), "#d62728".into(), "#2ca02c".into()],
        }
    }
}

/// SVG 1.1 picture of the face with curvatures `k` in the Poincaré disk.
pub fn render_face_svg<T: Real>(k: [T; 3], options: &SvgOptions) -> Result<String> {
    let pic = disk_picture(k)?;
    let half = f64::from(options.size) / 2.0;
    // disk of radius 0.45·size centred in the canvas, y axis pointing up
    let scale = 0.9 * half;
    let px = |p: [T; 2]| (half + scale * to_f64(p[0]), half - scale * to_f64(p[1]));
    let mut s = String::new();
    let n = options.size;
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{n}" height="{n}" viewBox="0 0 {n} {n}">"#
    );
    let _ = writeln!(
        s,
        r#"  <defs><clipPath id="disk"><circle cx="{half:.6}" cy="{half:.6}" r="{scale:.6}"/></clipPath></defs>"#
    );
    let _ = writeln!(s, r#"  <rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"  <circle cx="{half:.6}" cy="{half:.6}" r="{scale:.6}" fill="none" stroke="black" stroke-width="{:.3}"/>"#,
        options.stroke_width
    );
    let _ = writeln!(
        s,
        r#"  <g clip-path="url(#disk)" fill="none" stroke-width="{:.3}">"#,
        options.stroke_width
    );
    for (i, c) in pic.curves.iter().enumerate() {
        let color = &options.colors[i % 3];
        match *c {
            DiskCurve::Circle { center, radius } => {
                let (cx, cy) = px(center);
                let _ = writeln!(
                    s,
                    r#"    <circle cx="{cx:.6}" cy="{cy:.6}" r="{:.6}" stroke="{color}"/>"#,
                    scale * to_f64(radius)
                );
            }
            DiskCurve::Line { point, direction } => {
                let (x0, y0) = px(point);
                let (dx, dy) = (to_f64(direction[0]), -to_f64(direction[1]));
                let l = 4.0 * scale;
                let _ = writeln!(
                    s,
                    r#"    <line x1="{:.6}" y1="{:.6}" x2="{:.6}" y2="{:.6}" stroke="{color}"/>"#,
                    x0 - l * dx,
                    y0 - l * dy,
                    x0 + l * dx,
                    y0 + l * dy
                );
            }
        }
    }
    let _ = writeln!(s, "  </g>");
    if options.show_tangency {
        for p in pic.tangency {
            let (x, y) = px(p);
            let _ = writeln!(
                s,
                r#"  <circle cx="{x:.6}" cy="{y:.6}" r="3" fill="black"/>"#
            );
        }
    }
    let _ = writeln!(s, "</svg>");
    Ok(s)
}
