//! Hyperbolic trigonometry kernel.
//!
//! Curvature/radius conversions for circles, horocycles and hypercycles, and
//! solvers for the right-angled polygons that appear when three generalized
//! circles are mutually tangent: the triangle of three centres, the
//! quadrilateral with two adjacent right angles, the pentagon with four right
//! angles and the right-angled hexagon.
//!
//! All lengths are hyperbolic (curvature −1), all angles in radians.

use crate::error::{domain, Error, Result};
use crate::scalar::{acosh_1p, acoth, atanh, lit, Real};

/// `|k - 1|` below this is treated as exactly 1 (a horocycle).
pub const KIND_TOLERANCE: f64 = 1e-12;

/// Which kind of generalized circle a curvature describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CurveKind {
    /// `k > 1`, radius `arccoth k`.
    Circle,
    /// `k = 1`, infinite radius.
    Horocycle,
    /// `k < 1`, distance `arctanh k` from its axis.
    Hypercycle,
}

impl CurveKind {
    pub fn of<T: Real>(k: T) -> CurveKind {
        let d = k - T::one();
        if d.abs() < lit(KIND_TOLERANCE) {
            CurveKind::Horocycle
        } else if d > T::zero() {
            CurveKind::Circle
        } else {
            CurveKind::Hypercycle
        }
    }
}

/// Radius of a circle, distance to the axis of a hypercycle, or `+inf` for a
/// horocycle.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct GeneralizedRadius<T>(T);

impl<T: Real> GeneralizedRadius<T> {
    pub fn new(value: T) -> Result<Self> {
        if value > T::zero() {
            Ok(GeneralizedRadius(value))
        } else {
            domain(format!("generalized radius must be positive, got {value}"))
        }
    }

    pub fn infinite() -> Self {
        GeneralizedRadius(T::infinity())
    }

    pub fn value(self) -> T {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }
}

/// `k = coth r` for circles, `k = tanh r` for hypercycles, `r = inf` at `k = 1`.
pub fn curvature_to_radius<T: Real>(k: T) -> Result<GeneralizedRadius<T>> {
    if !(k > T::zero()) || !k.is_finite() {
        return domain(format!("curvature must be positive and finite, got {k}"));
    }
    Ok(match CurveKind::of(k) {
        CurveKind::Circle => GeneralizedRadius(acoth(k)),
        CurveKind::Horocycle => GeneralizedRadius::infinite(),
        CurveKind::Hypercycle => GeneralizedRadius(atanh(k)),
    })
}

/// Inverse of [`curvature_to_radius`]; the kind disambiguates circle from
/// hypercycle.
pub fn radius_to_curvature<T: Real>(r: GeneralizedRadius<T>, kind: CurveKind) -> Result<T> {
    let two = lit::<T>(2.0);
    match (kind, r.is_infinite()) {
        (CurveKind::Horocycle, true) => Ok(T::one()),
        (CurveKind::Circle, false) => Ok(T::one() + two / (two * r.0).exp_m1()),
        (CurveKind::Hypercycle, false) => Ok(r.0.tanh()),
        _ => domain(format!("radius {} is inconsistent with {kind:?}", r.0)),
    }
}

/// Angles of the hyperbolic triangle with side lengths `d`; `θ[i]` is
/// opposite `d[i]`.
///
/// Uses the half-angle form of the cosine law,
/// `tan²(θᵢ/2) = sinh(s−dⱼ)·sinh(s−dₖ) / (sinh s · sinh(s−dᵢ))`.
pub fn triangle_angles<T: Real>(d: [T; 3]) -> Result<[T; 3]> {
    if d.iter().any(|&x| !(x > T::zero()) || !x.is_finite()) {
        return domain("triangle sides must be positive and finite");
    }
    let half = lit::<T>(0.5);
    // s - d_i
    let excess = [
        (d[1] + d[2] - d[0]) * half,
        (d[2] + d[0] - d[1]) * half,
        (d[0] + d[1] - d[2]) * half,
    ];
    if excess.iter().any(|&e| !(e > T::zero())) {
        return Err(Error::InfeasibleGeometry(format!(
            "sides {:?} violate the triangle inequality",
            d
        )));
    }
    let s = (d[0] + d[1] + d[2]) * half;
    Ok(half_angle_triangle(s, excess))
}

/// Angles at the centres of three mutually tangent circles with radii `r`
/// (sides `rⱼ + rₖ`), computed without forming the sides.
pub fn circle_triangle_angles<T: Real>(r: [T; 3]) -> [T; 3] {
    half_angle_triangle(r[0] + r[1] + r[2], r)
}

fn half_angle_triangle<T: Real>(s: T, excess: [T; 3]) -> [T; 3] {
    let two = lit::<T>(2.0);
    let sh = excess.map(|e| e.sinh());
    let ss = s.sinh();
    let mut out = [T::zero(); 3];
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let t2 = (sh[j] / ss) * (sh[k] / sh[i]);
        out[i] = two * t2.sqrt().atan();
    }
    out
}

/// Split point `x` and perpendicular height `y` of a polygon decomposition,
/// with the relative residuals of the two defining equations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolygonSolution<T> {
    pub x: T,
    /// Remainder of the split side, computed without cancellation when small.
    pub rest: T,
    pub y: T,
    pub residuals: [T; 2],
}

/// Which leg of the quadrilateral carries the split point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadrilateralBranch {
    /// `l1 >= l3`: `x` is measured along the `l1` leg from the axis.
    SplitFirst,
    /// `l1 < l3`: roles of `l1` and `l3` mirrored.
    SplitThird,
}

/// Quadrilateral with two adjacent right angles at the ends of the "axis"
/// side. `l1` and `l3` are the legs perpendicular to the axis, `l2` the side
/// facing it.
///
/// For `l1 >= l3` finds `x ∈ (0, l1)` with
/// `sinh l3 = sinh x · cosh y` and `cosh l2 = cosh(l1 − x) · cosh y`: the
/// perpendicular of length `y` from the top of the `l3` leg lands on the `l1`
/// leg at distance `x` from the axis. For `l1 < l3` the legs swap roles.
pub fn solve_quadrilateral<T: Real>(
    l1: T,
    l2: T,
    l3: T,
) -> Result<(PolygonSolution<T>, QuadrilateralBranch)> {
    check_lengths(&[l1, l2, l3])?;
    if l1 >= l3 {
        Ok((
            quadrilateral_core(l1, l2, l3)?,
            QuadrilateralBranch::SplitFirst,
        ))
    } else {
        Ok((
            quadrilateral_core(l3, l2, l1)?,
            QuadrilateralBranch::SplitThird,
        ))
    }
}

/// `long >= short`; returns the split of the long leg.
fn quadrilateral_core<T: Real>(long: T, top: T, short: T) -> Result<PolygonSolution<T>> {
    // f(x) = sinh x / cosh(long - x) rises from 0 to sinh(long).
    let target = short.sinh().ln() - top.cosh().ln();
    if !(target < long.sinh().ln()) {
        return Err(Error::InfeasibleGeometry(format!(
            "no quadrilateral with legs {long}, {short} and top {top}"
        )));
    }
    let h = |x: T| x.sinh().ln() - (long - x).cosh().ln() - target;
    let dh_du = |x: T| x * (T::one() / x.tanh() + (long - x).tanh());
    let x = monotone_root(h, dh_du, long)?;
    if !(x < short && long - x < top) {
        return Err(Error::InfeasibleGeometry(format!(
            "quadrilateral split x = {x} outside the admissible range"
        )));
    }
    // cosh y - 1 = (sinh short - sinh x) / sinh x, factored to avoid cancellation.
    let two = lit::<T>(2.0);
    let m = two * ((short + x) / two).cosh() * ((short - x) / two).sinh() / x.sinh();
    let y = acosh_1p(m);
    let cy = T::one() + m;
    let residuals = [
        (x.sinh() * cy - short.sinh()).abs() / short.sinh(),
        ((long - x).cosh() * cy - top.cosh()).abs() / top.cosh(),
    ];
    Ok(PolygonSolution {
        x,
        rest: long - x,
        y,
        residuals,
    })
}

/// Angles and axis segment of the quadrilateral of [`solve_quadrilateral`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadrilateralGeometry<T> {
    pub solution: PolygonSolution<T>,
    pub branch: QuadrilateralBranch,
    /// Interior angle at the top of the `l1` leg.
    pub angle_first: T,
    /// Interior angle at the top of the `l3` leg.
    pub angle_third: T,
    /// Length of the side between the two right angles.
    pub axis: T,
}

pub fn quadrilateral_geometry<T: Real>(l1: T, l2: T, l3: T) -> Result<QuadrilateralGeometry<T>> {
    let (sol, branch) = solve_quadrilateral(l1, l2, l3)?;
    let (long, short) = match branch {
        QuadrilateralBranch::SplitFirst => (l1, l3),
        QuadrilateralBranch::SplitThird => (l3, l1),
    };
    let PolygonSolution { x, y, .. } = sol;
    let (sy, ty) = (y.sinh(), y.tanh());
    // Right triangle cut off by the perpendicular, right angle at the foot.
    let at_long = ty.atan2((long - x).sinh());
    let tri_at_short = (long - x).tanh().atan2(sy);
    // Lambert quadrilateral (three right angles) below the perpendicular.
    let axis = (sy / short.cosh()).asinh();
    let lambert = (x.cosh() / short.cosh()).atan2(x.sinh() * axis.sinh());
    let at_short = lambert + tri_at_short;
    let (angle_first, angle_third) = match branch {
        QuadrilateralBranch::SplitFirst => (at_long, at_short),
        QuadrilateralBranch::SplitThird => (at_short, at_long),
    };
    Ok(QuadrilateralGeometry {
        solution: sol,
        branch,
        angle_first,
        angle_third,
        axis,
    })
}

/// Pentagon with four right angles. `l3` is the middle of the three sides
/// with right angles at both ends; `l1` and `l2` are the sides adjacent to
/// the non-right angle.
///
/// Finds `x ∈ (0, l3)` with `sinh l1 / sinh x = sinh l2 / sinh(l3 − x) = cosh y`.
pub fn solve_pentagon<T: Real>(l1: T, l2: T, l3: T) -> Result<PolygonSolution<T>> {
    check_lengths(&[l1, l2, l3])?;
    // Solve for the shorter of the two parts so that both are accurate.
    let (x, rest) = if l1 <= l2 {
        let x = pentagon_root(l1, l2, l3)?;
        (x, l3 - x)
    } else {
        let rest = pentagon_root(l2, l1, l3)?;
        (l3 - rest, rest)
    };
    if !(x < l1 && rest < l2) {
        return Err(Error::InfeasibleGeometry(format!(
            "pentagon split x = {x} gives cosh y <= 1 for sides ({l1}, {l2}, {l3})"
        )));
    }
    let two = lit::<T>(2.0);
    let m = if l1 <= l2 {
        two * ((l1 + x) / two).cosh() * ((l1 - x) / two).sinh() / x.sinh()
    } else {
        two * ((l2 + rest) / two).cosh() * ((l2 - rest) / two).sinh() / rest.sinh()
    };
    let y = acosh_1p(m);
    let cy = T::one() + m;
    let residuals = [
        (x.sinh() * cy - l1.sinh()).abs() / l1.sinh(),
        (rest.sinh() * cy - l2.sinh()).abs() / l2.sinh(),
    ];
    Ok(PolygonSolution {
        x,
        rest,
        y,
        residuals,
    })
}

/// Root of `sinh x / sinh(l3 − x) = sinh l1 / sinh l2` in `(0, l3)`.
fn pentagon_root<T: Real>(l1: T, l2: T, l3: T) -> Result<T> {
    // g(x) = sinh x / sinh(l3 - x) rises from 0 to +inf.
    let target = l1.sinh().ln() - l2.sinh().ln();
    let h = |x: T| x.sinh().ln() - (l3 - x).sinh().ln() - target;
    let dh_du = |x: T| x * (T::one() / x.tanh() + T::one() / (l3 - x).tanh());
    monotone_root(h, dh_du, l3)
}

/// Angle and axis segments of the pentagon of [`solve_pentagon`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PentagonGeometry<T> {
    pub solution: PolygonSolution<T>,
    /// The non-right interior angle (between the `l1` and `l2` sides).
    pub apex_angle: T,
    /// Right-angled side adjacent to `l1` (opposite `l2`).
    pub axis_first: T,
    /// Right-angled side adjacent to `l2`.
    pub axis_second: T,
}

pub fn pentagon_geometry<T: Real>(l1: T, l2: T, l3: T) -> Result<PentagonGeometry<T>> {
    let sol = solve_pentagon(l1, l2, l3)?;
    let PolygonSolution { x, rest: x2, y, .. } = sol;
    let sy = y.sinh();
    let axis_first = (sy / l1.cosh()).asinh();
    let axis_second = (sy / l2.cosh()).asinh();
    let phi1 = (x.cosh() / l1.cosh()).atan2(x.sinh() * axis_first.sinh());
    let phi2 = (x2.cosh() / l2.cosh()).atan2(x2.sinh() * axis_second.sinh());
    Ok(PentagonGeometry {
        solution: sol,
        apex_angle: phi1 + phi2,
        axis_first,
        axis_second,
    })
}

/// Right-angled hexagon with alternate sides `d`; returns the remaining
/// sides, `s[i]` opposite `d[i]`:
/// `cosh sᵢ = (cosh dᵢ + cosh dⱼ cosh dₖ) / (sinh dⱼ sinh dₖ)`.
pub fn solve_hexagon<T: Real>(d: [T; 3]) -> Result<[T; 3]> {
    check_lengths(&d)?;
    let mut s = [T::zero(); 3];
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        // cosh s - 1 = (cosh d_i + cosh(d_j - d_k)) / (sinh d_j sinh d_k)
        let m = (d[i].cosh() + (d[j] - d[k]).cosh()) / (d[j].sinh() * d[k].sinh());
        s[i] = acosh_1p(m);
    }
    Ok(s)
}

/// Length of the horocycle segment cut out by a geodesic crossing it at
/// angle `alpha`.
pub fn horocycle_chord<T: Real>(alpha: T) -> Result<T> {
    if !(alpha > T::zero() && alpha < T::FRAC_PI_2()) {
        return domain(format!(
            "intersection angle must lie in (0, π/2), got {alpha}"
        ));
    }
    Ok(lit::<T>(2.0) * alpha.tan())
}

/// First arc of an orthogonal bigon: an angle for circles and hypercycles, a
/// plain length for a horocycle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BigonArc<T> {
    Angle(T),
    HorocycleLength(T),
}

/// Two arcs of curvatures `k1 > 0` and `k2 > 1` meeting at right angles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bigon<T> {
    pub first: BigonArc<T>,
    pub theta2: T,
    pub l1: T,
    pub l2: T,
    pub dl1_dk2: T,
    pub dl2_dk1: T,
}

pub fn bigon_kernel<T: Real>(k1: T, k2: T) -> Result<Bigon<T>> {
    if !(k2 > T::one()) {
        return domain(format!("bigon needs k2 > 1, got {k2}"));
    }
    if !(k1 > T::zero()) {
        return domain(format!("bigon needs k1 > 0, got {k1}"));
    }
    let one = T::one();
    let two = lit::<T>(2.0);
    let arccot = |z: T| one.atan2(z);
    let s2 = (k2 * k2 - one).sqrt();
    let theta2 = two * arccot(k1 / s2);
    let l2 = theta2 / s2;
    let (first, l1) = match CurveKind::of(k1) {
        CurveKind::Circle => {
            let s1 = (k1 * k1 - one).sqrt();
            let t = two * arccot(k2 / s1);
            (BigonArc::Angle(t), t / s1)
        }
        CurveKind::Hypercycle => {
            let s1 = (one - k1 * k1).sqrt();
            let t = two * acoth(k2 / s1);
            (BigonArc::Angle(t), t / s1)
        }
        CurveKind::Horocycle => (BigonArc::HorocycleLength(two / k2), two / k2),
    };
    let partial = two / (one - k1 * k1 - k2 * k2);
    Ok(Bigon {
        first,
        theta2,
        l1,
        l2,
        dl1_dk2: partial,
        dl2_dk1: partial,
    })
}

fn check_lengths<T: Real>(l: &[T]) -> Result<()> {
    if l.iter().all(|&x| x > T::zero() && x.is_finite()) {
        Ok(())
    } else {
        domain(format!(
            "polygon side lengths must be positive and finite: {l:?}"
        ))
    }
}

/// Root of a strictly increasing `h` on `(0, upper)` with `h(0+) < 0 < h(upper)`.
///
/// Bisection down to a bracket of relative width 1e-3, then Newton in
/// `u = ln x` (so tiny roots converge as fast as large ones), falling back to
/// bisection whenever a Newton iterate leaves the bracket.
fn monotone_root<T: Real>(h: impl Fn(T) -> T, dh_du: impl Fn(T) -> T, upper: T) -> Result<T> {
    let half = lit::<T>(0.5);
    let (mut lo, mut hi) = (T::zero(), upper);
    let coarse = upper * lit(1e-3);
    while hi - lo > coarse {
        let mid = (lo + hi) * half;
        if h(mid) > T::zero() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut x = (lo + hi) * half;
    let eps = T::epsilon() * lit(4.0);
    for _ in 0..400 {
        let fx = h(x);
        if fx == T::zero() {
            return Ok(x);
        }
        if fx > T::zero() {
            hi = x;
        } else {
            lo = x;
        }
        let mut next = (x.ln() - fx / dh_du(x)).exp();
        if !(next > lo && next < hi) {
            next = (lo + hi) * half;
        }
        if (next - x).abs() <= eps * x || hi - lo <= eps * hi {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::InfeasibleGeometry(
        "polygon root finder did not converge".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn radius_examples() {
        let half_ln3 = 0.5 * 3f64.ln();
        assert_relative_eq!(
            curvature_to_radius(2.0).unwrap().value(),
            half_ln3,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            curvature_to_radius(0.5).unwrap().value(),
            half_ln3,
            max_relative = 1e-15
        );
        assert!(curvature_to_radius(1.0).unwrap().is_infinite());
        assert!(curvature_to_radius(1.0 + 1e-13).unwrap().is_infinite());
        assert!(curvature_to_radius(0.0).is_err());
        assert!(curvature_to_radius(-1.0).is_err());
        assert!(curvature_to_radius(f64::NAN).is_err());
    }

    #[test]
    fn radius_round_trip_is_tight() {
        let mut worst = 0.0f64;
        for i in 0..=2400 {
            let k = 10f64.powf(-6.0 + 12.0 * i as f64 / 2400.0);
            if (k - 1.0).abs() < 1e-9 {
                continue;
            }
            let kind = CurveKind::of(k);
            let r = curvature_to_radius(k).unwrap();
            let back = radius_to_curvature(r, kind).unwrap();
            worst = worst.max(((back - k) / k).abs());
        }
        // near-1 values too
        for &k in &[1.0f64 + 1e-9, 1.0 - 1e-9, 1.0 + 1e-6, 1.0 - 1e-6] {
            let r = curvature_to_radius(k).unwrap();
            let back = radius_to_curvature(r, CurveKind::of(k)).unwrap();
            worst = worst.max(((back - k) / k).abs());
        }
        assert!(worst <= 1e-14, "worst relative round-trip error {worst:e}");
    }

    #[test]
    fn radius_kind_mismatch_is_rejected() {
        let r = GeneralizedRadius::new(0.3).unwrap();
        assert!(radius_to_curvature(r, CurveKind::Horocycle).is_err());
        assert!(
            radius_to_curvature(GeneralizedRadius::<f64>::infinite(), CurveKind::Circle).is_err()
        );
        assert!(GeneralizedRadius::new(0.0).is_err());
    }

    #[test]
    fn equilateral_triangle_matches_cosine_law() {
        // cosh d = 5/3 -> cos θ = cosh d / (cosh d + 1) = 5/8
        let d = (5.0f64 / 3.0).acosh();
        let th = triangle_angles([d, d, d]).unwrap();
        for t in th {
            assert_relative_eq!(t, (5.0f64 / 8.0).acos(), max_relative = 1e-14);
        }
        assert_relative_eq!(th[0], 0.8956647938578649, max_relative = 1e-12);
    }

    #[test]
    fn triangle_inequality_violation_is_infeasible() {
        assert!(matches!(
            triangle_angles([3.0, 1.0, 1.0]),
            Err(Error::InfeasibleGeometry(_))
        ));
        assert!(matches!(
            triangle_angles([1.0, 0.0, 1.0]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn thin_triangle_angle_vanishes() {
        let th = triangle_angles([1e-4, 10.0, 10.0]).unwrap();
        assert!(th[0] < 1e-3);
    }

    #[test]
    fn quadrilateral_unit_sides() {
        // frozen from an independent bisection on sinh x = tanh 1 · cosh(1 - x)
        let (sol, branch) = solve_quadrilateral(1.0, 1.0, 1.0).unwrap();
        assert_eq!(branch, QuadrilateralBranch::SplitFirst);
        assert_relative_eq!(sol.x, 0.725249300149888, max_relative = 1e-12);
        assert_relative_eq!(sol.y, 0.950355204822480, max_relative = 1e-12);
        assert!(sol.residuals.iter().all(|&r| r < 1e-12));
        assert!(1.0 > sol.x && 1.0 > 1.0 - sol.x);
    }

    #[test]
    fn quadrilateral_closed_form_root() {
        // sinh x cosh l2 = sinh l3 cosh(l1 - x) expands to a closed form for tanh x
        for &(l1, l2, l3) in &[
            (1.3f64, 1.1, 0.6),
            (0.4, 0.9, 0.7),
            (8.0, 9.0, 1.5),
            (2e-6, 0.55, 0.55),
        ] {
            let (sol, branch) = solve_quadrilateral(l1, l2, l3).unwrap();
            let (long, short) = if l1 >= l3 { (l1, l3) } else { (l3, l1) };
            assert_eq!(branch == QuadrilateralBranch::SplitFirst, l1 >= l3);
            let tx: f64 = short.sinh() * long.cosh() / (l2.cosh() + long.sinh() * short.sinh());
            assert_relative_eq!(sol.x, tx.atanh(), max_relative = 1e-12);
        }
    }

    #[test]
    fn quadrilateral_mirror_swaps_angles() {
        let a = quadrilateral_geometry(1.4, 1.9, 0.8).unwrap();
        let b = quadrilateral_geometry(0.8, 1.9, 1.4).unwrap();
        assert_eq!(b.branch, QuadrilateralBranch::SplitThird);
        assert_relative_eq!(a.angle_first, b.angle_third, max_relative = 1e-13);
        assert_relative_eq!(a.angle_third, b.angle_first, max_relative = 1e-13);
        assert_relative_eq!(a.axis, b.axis, max_relative = 1e-13);
    }

    #[test]
    fn quadrilateral_without_solution_is_infeasible() {
        // legs far longer than the top side cannot close up
        assert!(matches!(
            solve_quadrilateral(1.0, 0.1, 5.0),
            Err(Error::InfeasibleGeometry(_))
        ));
    }

    #[test]
    fn pentagon_symmetric_root() {
        let sol = solve_pentagon(1.0f64, 1.0, 1.0).unwrap();
        assert_relative_eq!(sol.x, 0.5, max_relative = 1e-13);
        assert_relative_eq!(sol.y.cosh(), 2.2552519304127616, max_relative = 1e-12);
        let sol = solve_pentagon(0.7, 0.7, 1.2).unwrap();
        assert_relative_eq!(sol.x, 0.6, max_relative = 1e-13);
    }

    #[test]
    fn pentagon_closed_form_root() {
        for &(l1, l2, l3) in &[(0.9f64, 0.6, 1.1), (3.0, 0.2, 3.1), (1e-7, 0.5, 0.5)] {
            let sol = solve_pentagon(l1, l2, l3).unwrap();
            let tx: f64 = l1.sinh() * l3.sinh() / (l2.sinh() + l1.sinh() * l3.cosh());
            assert_relative_eq!(sol.x, tx.atanh(), max_relative = 1e-12);
            assert!(sol.x < l1 && l3 - sol.x < l2);
        }
    }

    #[test]
    fn pentagon_with_long_middle_side_is_infeasible() {
        assert!(matches!(
            solve_pentagon(0.3, 0.3, 2.0),
            Err(Error::InfeasibleGeometry(_))
        ));
    }

    #[test]
    fn hexagon_examples() {
        let s = solve_hexagon([1.0f64, 1.0, 1.0]).unwrap();
        for v in s {
            assert_relative_eq!(v.cosh(), 2.841347188415585, max_relative = 1e-13);
            assert_relative_eq!(v, 1.704912832358014, max_relative = 1e-13);
        }
        for &r in &[0.05f64, 0.3, 1.0, 4.0] {
            let s = solve_hexagon([2.0 * r; 3]).unwrap();
            let c = (2.0 * r).cosh();
            assert_relative_eq!(s[0].cosh(), c / (c - 1.0), max_relative = 1e-12);
        }
        let s = solve_hexagon([0.4, 1.1, 2.3]).unwrap();
        let p = solve_hexagon([2.3, 0.4, 1.1]).unwrap();
        assert_relative_eq!(s[0], p[1], max_relative = 1e-14);
        assert_relative_eq!(s[1], p[2], max_relative = 1e-14);
        assert_relative_eq!(s[2], p[0], max_relative = 1e-14);
    }

    #[test]
    fn horocycle_chord_examples() {
        assert_relative_eq!(
            horocycle_chord(std::f64::consts::FRAC_PI_4).unwrap(),
            2.0,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            horocycle_chord(std::f64::consts::FRAC_PI_3).unwrap(),
            3.4641016151377544,
            max_relative = 1e-14
        );
        assert!(horocycle_chord(1e-12).unwrap() < 1e-11);
        assert!(horocycle_chord(std::f64::consts::FRAC_PI_2).is_err());
        assert!(horocycle_chord(0.0).is_err());
    }

    #[test]
    fn bigon_horocycle_case() {
        let b = bigon_kernel(1.0, 2.0).unwrap();
        assert_eq!(b.first, BigonArc::HorocycleLength(1.0));
        assert_relative_eq!(b.dl1_dk2, -0.5, max_relative = 1e-15);
        assert!(bigon_kernel(0.5, 1.0).is_err());
        assert!(bigon_kernel(0.0, 2.0).is_err());
    }

    #[test]
    fn bigon_partials_match_finite_differences() {
        for &(k1, k2) in &[(3.0f64, 1.5), (0.4, 2.5), (1.7, 4.0), (0.05, 1.1)] {
            let b = bigon_kernel(k1, k2).unwrap();
            assert!((b.dl1_dk2 - b.dl2_dk1).abs() <= 1e-10);
            let h = 1e-6;
            let fd12 = (bigon_kernel(k1, k2 + h).unwrap().l1
                - bigon_kernel(k1, k2 - h).unwrap().l1)
                / (2.0 * h);
            let fd21 = (bigon_kernel(k1 + h, k2).unwrap().l2
                - bigon_kernel(k1 - h, k2).unwrap().l2)
                / (2.0 * h);
            assert_relative_eq!(fd12, b.dl1_dk2, max_relative = 1e-6);
            assert_relative_eq!(fd21, b.dl2_dk1, max_relative = 1e-6);
        }
    }

    #[test]
    fn bigon_is_continuous_through_horocycle() {
        let k2 = 2.0f64;
        for &e in &[1e-6f64, -1e-6] {
            let b = bigon_kernel(1.0 + e, k2).unwrap();
            assert!((b.dl2_dk1 + 2.0 / (k2 * k2)).abs() < 1e-5);
            assert!((b.l1 - 2.0 / k2).abs() < 1e-5);
        }
    }

    #[test]
    fn single_precision_kernel() {
        let th = circle_triangle_angles([0.5493061f32; 3]);
        assert!((th[0] - 0.89566475f32).abs() < 1e-5);
        let sol = solve_pentagon(1.0f32, 1.0, 1.0).unwrap();
        assert!((sol.x - 0.5).abs() < 1e-5);
    }

    fn radii() -> impl Strategy<Value = [f64; 3]> {
        prop::array::uniform3(-4.0f64..2.5).prop_map(|a| a.map(|e| 10f64.powf(e)))
    }

    proptest! {
        #[test]
        fn triangle_has_angle_deficit(r in radii()) {
            let d = [r[1] + r[2], r[2] + r[0], r[0] + r[1]];
            let th = triangle_angles(d).unwrap();
            prop_assert!(th.iter().all(|&t| t > 0.0 && t < std::f64::consts::PI));
            prop_assert!(th.iter().sum::<f64>() < std::f64::consts::PI);
            let direct = circle_triangle_angles(r);
            for i in 0..3 {
                prop_assert!((th[i] - direct[i]).abs() <= 1e-9 * (1.0 + th[i]));
            }
        }

        #[test]
        fn quadrilateral_residuals_and_bounds(r in radii()) {
            let (l1, l2, l3) = (r[1] + r[2], r[0] + r[2], r[0] + r[1]);
            let (sol, branch) = solve_quadrilateral(l1, l2, l3).unwrap();
            prop_assert!(sol.residuals.iter().all(|&e| e < 1e-12), "{:?}", sol);
            let (long, short) = match branch {
                QuadrilateralBranch::SplitFirst => (l1, l3),
                QuadrilateralBranch::SplitThird => (l3, l1),
            };
            prop_assert!(sol.x > 0.0 && sol.x < long);
            prop_assert!(short > sol.x && l2 > long - sol.x);
            let g = quadrilateral_geometry(l1, l2, l3).unwrap();
            let area = std::f64::consts::PI - g.angle_first - g.angle_third;
            prop_assert!(area > 0.0 && g.axis > 0.0);
        }

        #[test]
        fn pentagon_residuals_and_bounds(r in radii()) {
            let (l1, l2, l3) = (r[1] + r[2], r[0] + r[2], r[0] + r[1]);
            let sol = solve_pentagon(l1, l2, l3).unwrap();
            prop_assert!(sol.residuals.iter().all(|&e| e < 1e-12), "{:?}", sol);
            prop_assert!(sol.x < l1 && l3 - sol.x < l2);
            let swapped = solve_pentagon(l2, l1, l3).unwrap();
            prop_assert!((swapped.x - (l3 - sol.x)).abs() <= 1e-10 * l3.max(1.0));
        }
    }
}
