//! Generalized hyperbolic circle packings on closed triangulated surfaces.
//!
//! A packing assigns a geodesic curvature `k > 0` to every vertex. Vertices
//! with `k > 1` carry circles (cone points), `k = 1` horocycles (cusps) and
//! `k < 1` hypercycles (geodesic boundary components). Given a target total
//! geodesic curvature per vertex, [`flow::solve`] integrates the combinatorial
//! Ricci flow `dK/dt = -(L(K) - L_hat)` in log-curvature coordinates, finishing
//! with damped Newton steps on the convex potential, and [`realize`] turns the
//! result into cone angles, cusps, boundary lengths and a Gauss–Bonnet audit.
//!
//! The numerical core is generic over the scalar type ([`Real`], implemented
//! for `f32` and `f64`). The `*F64` aliases below name the common concrete
//! instantiations.

pub mod error;
pub mod flow;
pub mod hyptrig;
pub mod io;
pub mod linalg;
pub mod packing;
pub mod quadrature;
pub mod realize;
pub mod scalar;
pub mod surface;
pub mod tangency;

pub use error::{Error, Result};
pub use scalar::Real;
pub use surface::{Defect, TargetCurvature, Triangulation};

pub type GeneralizedCircleF64 = tangency::GeneralizedCircle<f64>;
pub type FaceGeometryF64 = tangency::FaceGeometry<f64>;
pub type FaceGeometryF32 = tangency::FaceGeometry<f32>;
pub type EmbeddedFaceF64 = tangency::EmbeddedFace<f64>;
pub type PackingStateF64 = packing::PackingState<f64>;
pub type PackingStateF32 = packing::PackingState<f32>;
pub type CurvatureReportF64 = packing::CurvatureReport<f64>;
pub type FlowConfigF64 = flow::FlowConfig<f64>;
pub type FlowTraceF64 = flow::FlowTrace<f64>;
pub type SolveOutcomeF64 = flow::SolveOutcome<f64>;
pub type RealizedMetricF64 = realize::RealizedMetric<f64>;
pub type TargetCurvatureF64 = TargetCurvature<f64>;
