//! Explicit upper half-plane picture of a three-curve configuration.
//!
//! Every generalized circle of curvature `k` is a Euclidean circle whose
//! centre height divided by its radius equals `k`: fully inside the half-plane
//! for a circle, tangent to the real axis for a horocycle, crossing it for a
//! hypercycle (whose region contains its axis). A horocycle centred at infinity
//! is a horizontal line.
//!
//! Normalization: the first two curves touch at `i` with the vertical common
//! tangent `Re z = 0`; curve 0 sits to the left, curve 1 to the right, curve 2
//! below the tangency point.

use num_complex::Complex;

use crate::error::{domain, Error, Result};
use crate::hyptrig::{curvature_to_radius, CurveKind};
use crate::quadrature::integrate_adaptive;
use crate::scalar::{lit, Real};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EmbeddedCurve<T> {
    Circle {
        center: [T; 2],
        radius: T,
    },
    /// Horocycle through `∞`: the line `y = height`.
    Line {
        height: T,
    },
}

impl<T: Real> EmbeddedCurve<T> {
    /// Geodesic curvature read off the picture: centre height over radius.
    pub fn curvature(&self) -> T {
        match *self {
            EmbeddedCurve::Circle { center, radius } => center[1] / radius,
            EmbeddedCurve::Line { .. } => T::one(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EmbeddedFace<T> {
    pub curvatures: [T; 3],
    pub curves: [EmbeddedCurve<T>; 3],
    /// `tangency[i]` is where curves `i+1` and `i+2` (mod 3) touch.
    pub tangency: [[T; 2]; 3],
}

/// Builds the half-plane configuration of three mutually tangent curves with
/// curvatures `k`.
pub fn realize_face<T: Real>(k: [T; 3]) -> Result<EmbeddedFace<T>> {
    if k.iter().any(|&x| !(x > T::zero()) || !x.is_finite()) {
        return domain(format!("curvatures must be positive and finite, got {k:?}"));
    }
    let one = T::one();
    let two = lit::<T>(2.0);
    let four = lit::<T>(4.0);
    let (u1, u2) = (one / k[0], one / k[1]);
    let c0 = [-u1, one];
    let c1 = [u2, one];
    // Third circle: centre (c·ρ, k3·ρ) with c = (u1-u2)/(u1+u2) and 1/ρ the
    // larger root of σ² - 2Bσ + A = 0.
    let sum = u1 + u2;
    let c = (u1 - u2) / sum;
    let p = u1 * u2 / sum;
    let b = two * p + k[2];
    let disc = four * p * p + four * k[2] * p + four * p / sum;
    let sigma = b + disc.sqrt();
    let rho = one / sigma;
    let c2 = [c * rho, k[2] * rho];
    let curves = [
        EmbeddedCurve::Circle {
            center: c0,
            radius: u1,
        },
        EmbeddedCurve::Circle {
            center: c1,
            radius: u2,
        },
        EmbeddedCurve::Circle {
            center: c2,
            radius: rho,
        },
    ];
    let centers = [c0, c1, c2];
    let radii = [u1, u2, rho];
    let mut tangency = [[T::zero(); 2]; 3];
    for i in 0..3 {
        let (a, b) = ((i + 1) % 3, (i + 2) % 3);
        let dx = centers[b][0] - centers[a][0];
        let dy = centers[b][1] - centers[a][1];
        let dist = dx.hypot(dy);
        let gap = (dist - radii[a] - radii[b]).abs();
        if !(gap <= lit::<T>(1e-9) * (radii[a] + radii[b])) {
            return Err(Error::InfeasibleGeometry(format!(
                "tangency chain failed to close for {k:?} (gap {gap})"
            )));
        }
        let t = radii[a] / (radii[a] + radii[b]);
        tangency[i] = [centers[a][0] + dx * t, centers[a][1] + dy * t];
    }
    tangency[2] = [T::zero(), one];
    Ok(EmbeddedFace {
        curvatures: k,
        curves,
        tangency,
    })
}

fn sinh_half_distance<T: Real>(p: [T; 2], q: [T; 2]) -> T {
    let d = (p[0] - q[0]).hypot(p[1] - q[1]);
    d / (lit::<T>(2.0) * (p[1] * q[1]).sqrt())
}

impl<T: Real> EmbeddedFace<T> {
    /// Endpoints of the arc of curve `i`: its tangency points with `i+1` and
    /// `i+2`.
    pub fn arc_endpoints(&self, i: usize) -> ([T; 2], [T; 2]) {
        (self.tangency[(i + 2) % 3], self.tangency[(i + 1) % 3])
    }

    fn kind(&self, i: usize) -> CurveKind {
        CurveKind::of(self.curvatures[i])
    }

    fn radius(&self, i: usize) -> T {
        curvature_to_radius(self.curvatures[i])
            .map(|r| r.value())
            .unwrap_or_else(|_| T::nan())
    }

    /// Hyperbolic centre angle subtended by the arc of circle `i`.
    pub fn circle_angle(&self, i: usize) -> T {
        let EmbeddedCurve::Circle { center, radius } = self.curves[i] else {
            return T::nan();
        };
        let k = self.curvatures[i];
        let height = radius * ((k - T::one()) * (k + T::one())).sqrt();
        let hc = Complex::new(center[0], height);
        let to_disk = |p: [T; 2]| {
            let z = Complex::new(p[0], p[1]);
            (z - hc) / (z - hc.conj())
        };
        let (p, q) = self.arc_endpoints(i);
        let w = to_disk(p) * to_disk(q).conj();
        w.im.atan2(w.re).abs()
    }

    /// Length of the axis segment under the arc of hypercycle `i`.
    pub fn axis_segment(&self, i: usize) -> T {
        let (p, q) = self.arc_endpoints(i);
        let sh = sinh_half_distance(p, q) / self.radius(i).cosh();
        lit::<T>(2.0) * sh.asinh()
    }

    /// Arc length of horocycle `i`: `2·sinh(δ/2)` for chord length `δ`.
    pub fn horocycle_arc(&self, i: usize) -> T {
        let (p, q) = self.arc_endpoints(i);
        lit::<T>(2.0) * sinh_half_distance(p, q)
    }

    /// Hyperbolic length of the arc of curve `i` between its tangency points,
    /// in closed form.
    pub fn arc_length(&self, i: usize) -> T {
        let r = self.radius(i);
        match self.kind(i) {
            CurveKind::Circle => self.circle_angle(i) * r.sinh(),
            CurveKind::Hypercycle => self.axis_segment(i) * r.cosh(),
            CurveKind::Horocycle => self.horocycle_arc(i),
        }
    }

    /// Same arc length by adaptive quadrature of `|dz| / y` along the
    /// Euclidean arc.
    pub fn arc_length_quadrature(&self, i: usize, tol: T) -> T {
        let (p, q) = self.arc_endpoints(i);
        match self.curves[i] {
            EmbeddedCurve::Line { height } => (q[0] - p[0]).abs() / height,
            EmbeddedCurve::Circle { center, radius } => {
                let (a, b) = minor_arc(center, p, q);
                let f = |phi: T| radius / (center[1] + radius * phi.sin());
                integrate_adaptive(f, a.min(b), a.max(b), tol)
            }
        }
    }

    /// Hyperbolic area of the interstice, `∮ dx / y` around its boundary.
    pub fn interstice_area_quadrature(&self, tol: T) -> T {
        let third = tol / lit(3.0);
        let mut total = T::zero();
        for i in 0..3 {
            let (p, q) = self.arc_endpoints(i);
            total = total
                + match self.curves[i] {
                    EmbeddedCurve::Line { height } => (q[0] - p[0]) / height,
                    EmbeddedCurve::Circle { center, radius } => {
                        let (a, b) = minor_arc(center, p, q);
                        let f = |phi: T| -radius * phi.sin() / (center[1] + radius * phi.sin());
                        let v = integrate_adaptive(f, a.min(b), a.max(b), third);
                        if b >= a {
                            v
                        } else {
                            -v
                        }
                    }
                };
        }
        total.abs()
    }
}

/// Polar angles of `p` and `q` about `center`, unwrapped so that they span
/// the shorter arc.
fn minor_arc<T: Real>(center: [T; 2], p: [T; 2], q: [T; 2]) -> (T, T) {
    let a = (p[1] - center[1]).atan2(p[0] - center[0]);
    let mut b = (q[1] - center[1]).atan2(q[0] - center[0]);
    let pi = T::PI();
    let two_pi = pi + pi;
    while b - a > pi {
        b = b - two_pi;
    }
    while a - b > pi {
        b = b + two_pi;
    }
    (a, b)
}
