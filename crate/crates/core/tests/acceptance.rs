//! Acceptance suite: one pass/fail line per criterion, written straight to
//! stderr so it shows up without `--nocapture`.

use std::f64::consts::PI;
use std::io::Write;
use std::time::{Duration, Instant};

use gcpack::flow::{solve, FlowConfig, FlowStatus};
use gcpack::packing::{
    global_jacobian, potential_along_path, potential_value, vertex_curvatures, PackingState,
};
use gcpack::realize::{realize, VertexClass};
use gcpack::surface::{check_admissible, Admissibility};
use gcpack::tangency::{face_jacobian, solve_face};
use gcpack::{TargetCurvature, Triangulation};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(limit: Duration, took: Duration, what: &str) -> Result<(), String> {
    ensure(
        took < limit,
        format!("{what} took {took:?}, limit {limit:?}"),
    )
}

/// Hyperbolic length of `|dz| / y` along the circle `center + ρ e^{iφ}`
/// between two polar angles, by composite Simpson on 20000 panels.
fn circle_arc_length(center: [f64; 2], rho: f64, a: f64, b: f64) -> f64 {
    let n = 20_000;
    let h = (b - a) / n as f64;
    let f = |phi: f64| rho / (center[1] + rho * phi.sin());
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    (s * h / 3.0).abs()
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let reps = 1000;
    let mut face = solve_face([1.0f64, 1.0, 1.0]).map_err(|e| e.to_string())?;
    for _ in 1..reps {
        face = solve_face([1.0f64, 1.0, 1.0]).map_err(|e| e.to_string())?;
    }
    let per_call = start.elapsed() / reps;
    // ideal points 0, 1, ∞: horocycles y = 1, |z − i/2| = 1/2, |z − 1 − i/2| = 1/2,
    // touching at i, 1 + i and (1 + i)/2
    let oracle = [
        1.0, // along y = 1 from x = 0 to x = 1
        circle_arc_length([0.0, 0.5], 0.5, PI / 2.0, 0.0),
        circle_arc_length([1.0, 0.5], 0.5, PI / 2.0, PI),
    ];
    let oracle_area = PI - oracle.iter().sum::<f64>();
    for i in 0..3 {
        let l = face.corners[i].total_curvature;
        ensure((l - 1.0).abs() < 1e-9, format!("L[{i}] = {l}"))?;
        ensure(
            (l - oracle[i]).abs() < 1e-9,
            format!("L[{i}] = {l} vs half-plane {}", oracle[i]),
        )?;
    }
    ensure(
        (face.area - (PI - 3.0)).abs() < 1e-9,
        format!("area {}", face.area),
    )?;
    ensure(
        (face.area - oracle_area).abs() < 1e-9,
        "area differs from half-plane oracle",
    )?;
    within(Duration::from_millis(1), per_call, "solve_face(1,1,1)")?;
    Ok(format!(
        "L = {:?}, area = {:.12}, {per_call:?}/call",
        face.total_curvatures(),
        face.area
    ))
}

fn criterion_2() -> Check {
    let face = solve_face([2.0f64, 2.0, 2.0]).map_err(|e| e.to_string())?;
    // cosine law for the equilateral triangle of side 2r, r = arccoth 2
    let r = 0.5 * 3f64.ln();
    let d = 2.0 * r;
    let cos_theta = (d.cosh() * d.cosh() - d.cosh()) / (d.sinh() * d.sinh());
    let theta = cos_theta.acos();
    ensure((cos_theta - 5.0 / 8.0).abs() < 1e-15, "cosine law")?;
    let expected = (5.0f64 / 8.0).acos() * 2.0 / 3f64.sqrt();
    ensure((theta * r.cosh() - expected).abs() < 1e-14, "θ cosh r")?;
    let mut worst = 0.0f64;
    for c in face.corners {
        worst = worst.max((c.total_curvature - expected).abs());
    }
    ensure(worst < 1e-12, format!("max |L − expected| = {worst:e}"))?;
    // interstice = triangle (π − 3θ) minus three sectors θ(cosh r − 1)
    let by_sectors = PI - 3.0 * theta - 3.0 * theta * (r.cosh() - 1.0);
    let from_l = PI - face.total_curvatures().iter().sum::<f64>();
    ensure((face.area - from_l).abs() < 1e-12, "area ≠ π − ΣL")?;
    ensure(
        (face.area - by_sectors).abs() < 1e-12,
        "area ≠ polygon minus sectors",
    )?;
    Ok(format!(
        "L = {:.15}, |ΔL| = {worst:.1e}, area = {:.15}",
        face.corners[0].total_curvature, face.area
    ))
}

fn criterion_3() -> Check {
    let start = Instant::now();
    let mut rng = rand::rngs::StdRng::seed_from_u64(20240301);
    let mut worst_ratio = 0.0f64;
    for n in 0..500 {
        let k = [0; 3].map(|_| rng.gen_range(0.1f64..10.0));
        let j = face_jacobian(k).map_err(|e| e.to_string())?;
        let scale = j.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs()));
        for a in 0..3 {
            let mut off = 0.0;
            for b in 0..3 {
                if a == b {
                    continue;
                }
                let asym = (j[a][b] - j[b][a]).abs();
                worst_ratio = worst_ratio.max(asym / (1e-6 * (1.0 + scale)));
                ensure(
                    asym <= 1e-6 * (1.0 + scale),
                    format!("sample {n} {k:?}: asymmetry {asym:e}"),
                )?;
                ensure(
                    j[a][b] < 0.0,
                    format!("sample {n} {k:?}: J[{a}][{b}] = {}", j[a][b]),
                )?;
                off += j[a][b].abs();
            }
            ensure(
                j[a][a] > off,
                format!("sample {n} {k:?}: row {a} not dominant"),
            )?;
        }
    }
    let took = start.elapsed();
    within(Duration::from_secs(5), took, "500 Jacobians")?;
    Ok(format!(
        "worst asymmetry {:.3} of bound, {took:?}",
        worst_ratio
    ))
}

fn criterion_4() -> Check {
    let mut report = Vec::new();
    let mut failures = Vec::new();
    let mut check = |name: &str, value: f64, bound: f64| {
        report.push(format!("{name} = {value:.3e}"));
        if !(value < bound) {
            failures.push(format!("{name} = {value:.3e} ≥ {bound:e}"));
        }
    };
    let mut worst_a = 0.0f64;
    for ks in [0.5, 2.0] {
        for kt in [0.5, 2.0] {
            let f = solve_face([1e-8, ks, kt]).map_err(|e| e.to_string())?;
            worst_a = worst_a.max(f.corners[0].total_curvature);
        }
    }
    check("(i) max L_r", worst_a, 1e-4);
    let f = solve_face([1e6, 2.0, 2.0]).map_err(|e| e.to_string())?;
    check(
        "(ii) |L_r − π|",
        (f.corners[0].total_curvature - PI).abs(),
        1e-4,
    );
    let f = solve_face([1e6, 1e6, 2.0]).map_err(|e| e.to_string())?;
    check(
        "(iii) |L_r + L_s − π|",
        (f.corners[0].total_curvature + f.corners[1].total_curvature - PI).abs(),
        1e-4,
    );
    let f = solve_face([1e6, 1e6, 1e6]).map_err(|e| e.to_string())?;
    check(
        "(iv) |ΣL − π|",
        (f.total_curvatures().iter().sum::<f64>() - PI).abs(),
        1e-4,
    );
    if failures.is_empty() {
        Ok(report.join(", "))
    } else {
        Err(format!(
            "{} (all: {})",
            failures.join("; "),
            report.join(", ")
        ))
    }
}

fn criterion_5() -> Check {
    let start = Instant::now();
    let mut rng = rand::rngs::StdRng::seed_from_u64(5);
    let mut min_eig = f64::INFINITY;
    for tri in [Triangulation::tetrahedron(), Triangulation::octahedron()] {
        let n = tri.num_vertices();
        for s in 0..100 {
            let state =
                PackingState::new((0..n).map(|_| rng.gen_range(-3.0f64..3.0)).collect()).unwrap();
            let m = global_jacobian(&tri, &state).map_err(|e| e.to_string())?;
            let dense = m.to_dense();
            let scale = dense.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs()));
            let mut asym = 0.0f64;
            for i in 0..n {
                for j in 0..n {
                    asym = asym.max((dense[i][j] - dense[j][i]).abs());
                }
            }
            ensure(
                asym <= 1e-6 * (1.0 + scale),
                format!("n = {n}, sample {s}: asymmetry {asym:e}"),
            )?;
            let mat = DMatrix::from_fn(n, n, |i, j| 0.5 * (dense[i][j] + dense[j][i]));
            let eig = mat.symmetric_eigen().eigenvalues.min();
            min_eig = min_eig.min(eig);
            ensure(
                eig > 0.0,
                format!("n = {n}, sample {s}: eigenvalue {eig:e}"),
            )?;
        }
    }
    let took = start.elapsed();
    within(Duration::from_secs(10), took, "200 Hessians")?;
    Ok(format!("smallest eigenvalue {min_eig:.3e}, {took:?}"))
}

/// Symmetric tetrahedron oracle: bisection on `s(r)·sinh r = 1/3` with
/// `cosh s = cosh 2r / (cosh 2r − 1)`.
fn tetra_oracle() -> (f64, f64) {
    let g = |r: f64| {
        let c = (2.0 * r).cosh();
        (c / (c - 1.0)).acosh() * r.sinh() - 1.0 / 3.0
    };
    let (mut lo, mut hi) = (1e-6, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r = 0.5 * (lo + hi);
    let c = (2.0 * r).cosh();
    (r.tanh(), (c / (c - 1.0)).acosh())
}

fn criterion_6() -> Check {
    let tri = Triangulation::tetrahedron();
    let l_hat = TargetCurvature::uniform(4, 1.0).unwrap();
    let cfg = FlowConfig::default();
    let start = Instant::now();
    let base = solve(&tri, &l_hat, None, &cfg).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    ensure(
        base.status == FlowStatus::Converged,
        format!("status {:?}", base.status),
    )?;
    let mut rng = rand::rngs::StdRng::seed_from_u64(6);
    let mut spread = 0.0f64;
    for _ in 0..10 {
        let k0 = PackingState::new((0..4).map(|_| rng.gen_range(-1.0f64..1.0)).collect()).unwrap();
        let out = solve(&tri, &l_hat, Some(&k0), &cfg).map_err(|e| e.to_string())?;
        ensure(
            out.status == FlowStatus::Converged,
            "random start did not converge",
        )?;
        for (a, b) in out.state.as_slice().iter().zip(base.state.as_slice()) {
            spread = spread.max((a - b).abs());
        }
    }
    ensure(spread < 1e-9, format!("starts disagree by {spread:e}"))?;
    let (k_star, s_star) = tetra_oracle();
    let k = base.state.curvatures();
    let dk = k.iter().fold(0.0f64, |a, x| a.max((x - k_star).abs()));
    ensure(dk < 1e-8, format!("k = {k:?}, oracle {k_star}"))?;
    let m = realize(&tri, &base.state, 1e-9).map_err(|e| e.to_string())?;
    ensure(
        m.vertices.iter().all(|v| v.class == VertexClass::Boundary),
        "not all vertices are boundary",
    )?;
    let faces = vertex_curvatures(&tri, &base.state).map_err(|e| e.to_string())?;
    for f in &faces.faces {
        ensure((f.polygon_area - PI).abs() < 1e-12, "hexagon area ≠ π")?;
    }
    ensure(
        (m.audit.total_area - 4.0 * PI).abs() < 1e-10,
        "total area ≠ 4π",
    )?;
    ensure(m.audit.chi_realized == -2, "χ(S_I) ≠ −2")?;
    ensure(
        m.audit.residual < 1e-10,
        format!("audit residual {:e}", m.audit.residual),
    )?;
    for v in &m.vertices {
        let len = v.boundary_length.unwrap();
        ensure(
            (len - 3.0 * s_star).abs() < 1e-7,
            format!("boundary length {len}"),
        )?;
    }
    within(Duration::from_secs(1), took, "tetrahedron solve")?;
    Ok(format!(
        "k = {:.13} (oracle {k_star:.13}), start spread {spread:.1e}, audit {:.1e}, {took:?}",
        k[0], m.audit.residual
    ))
}

fn criterion_7() -> Check {
    let tri = Triangulation::tetrahedron();
    let mut notes = Vec::new();
    for (targets, expected) in [
        (vec![10.0f64, 1.0, 1.0, 1.0], vec![0usize]),
        (vec![3.2; 4], vec![0, 1, 2, 3]),
    ] {
        let l_hat = TargetCurvature::new(targets.clone()).unwrap();
        match check_admissible(&tri, &l_hat).map_err(|e| e.to_string())? {
            Admissibility::Violated { witness, .. } => ensure(
                witness == expected,
                format!("{targets:?}: witness {witness:?}"),
            )?,
            other => return Err(format!("{targets:?}: {other:?}")),
        }
        let gated = solve(&tri, &l_hat, None, &FlowConfig::default()).map_err(|e| e.to_string())?;
        ensure(
            gated.status == FlowStatus::Infeasible && gated.witness == Some(expected.clone()),
            "gate",
        )?;
        let raw = FlowConfig {
            check_admissibility: false,
            max_steps: 20_000,
            ..FlowConfig::default()
        };
        let out = solve(&tri, &l_hat, None, &raw).map_err(|e| e.to_string())?;
        ensure(
            out.status != FlowStatus::Converged,
            format!("{targets:?}: raw flow converged"),
        )?;
        let kmax = out
            .state
            .as_slice()
            .iter()
            .fold(0.0f64, |a, x| a.max(x.abs()));
        notes.push(format!(
            "{expected:?} → raw flow {:?} at max|K| = {kmax:.1}",
            out.status
        ));
    }
    Ok(notes.join("; "))
}

fn criterion_8() -> Check {
    let tri = Triangulation::tetrahedron();
    let l_hat = TargetCurvature::uniform(4, 1.0).unwrap();
    let cfg = FlowConfig {
        newton: false,
        ..FlowConfig::default()
    };
    let out = solve(&tri, &l_hat, None, &cfg).map_err(|e| e.to_string())?;
    ensure(
        out.status == FlowStatus::Converged,
        format!("status {:?}", out.status),
    )?;
    let rate = out.trace.rate.ok_or("no rate estimate")?;
    ensure(rate.lambda > 0.0, format!("λ̂ = {}", rate.lambda))?;
    ensure(rate.r_squared > 0.99, format!("R² = {}", rate.r_squared))?;
    Ok(format!(
        "λ̂ = {:.6}, R² = {:.6} over {} samples",
        rate.lambda, rate.r_squared, rate.samples
    ))
}

fn criterion_9() -> Check {
    let tri = Triangulation::tetrahedron();
    let l_hat = TargetCurvature::uniform(4, 1.0).unwrap();
    let mut rng = rand::rngs::StdRng::seed_from_u64(9);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let mut draw =
            || PackingState::new((0..4).map(|_| rng.gen_range(-2.0f64..2.0)).collect()).unwrap();
        let (a, b, via1, via2) = (draw(), draw(), draw(), draw());
        let direct = potential_value(&tri, &b, &a, &l_hat).map_err(|e| e.to_string())?;
        let bent =
            potential_along_path(&tri, &[a, via1, via2, b], &l_hat).map_err(|e| e.to_string())?;
        worst = worst.max((direct - bent).abs());
    }
    ensure(worst < 1e-8, format!("paths disagree by {worst:e}"))?;
    Ok(format!("max path difference {worst:.2e}"))
}

fn criterion_10() -> Check {
    let tri = Triangulation::octahedron();
    let l_hat = TargetCurvature::new(vec![12.0, 1.0, 1.0, 1.0, 1.0, 1.0]).unwrap();
    // brute-force subset sums
    for mask in 1u32..64 {
        let set: Vec<usize> = (0..6).filter(|i| mask >> i & 1 == 1).collect();
        let sum: f64 = set.iter().map(|&i| l_hat.as_slice()[i]).sum();
        let faces = tri
            .faces()
            .iter()
            .filter(|f| f.iter().any(|v| set.contains(v)))
            .count();
        ensure(sum < PI * faces as f64, format!("subset {set:?} violates"))?;
    }
    let start = Instant::now();
    let out = solve(&tri, &l_hat, None, &FlowConfig::default()).map_err(|e| e.to_string())?;
    let m = realize(&tri, &out.state, 1e-9).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    ensure(
        out.status == FlowStatus::Converged,
        format!("status {:?}", out.status),
    )?;
    ensure(
        m.vertices[0].class == VertexClass::Cone,
        format!("vertex 0 is {:?}", m.vertices[0].class),
    )?;
    ensure(
        m.audit.residual < 1e-8,
        format!("audit residual {:e}", m.audit.residual),
    )?;
    within(Duration::from_secs(2), took, "octahedron solve")?;
    let classes: Vec<VertexClass> = m.vertices.iter().map(|v| v.class).collect();
    Ok(format!(
        "k0 = {:.6}, classes {classes:?}, audit {:.1e}, {took:?}",
        m.vertices[0].k, m.audit.residual
    ))
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("three-horocycle face", criterion_1),
        ("symmetric circle face", criterion_2),
        ("face Jacobian symmetry and dominance", criterion_3),
        ("limit suite", criterion_4),
        ("global Hessian SPD", criterion_5),
        ("tetrahedron end-to-end", criterion_6),
        ("feasibility gate", criterion_7),
        ("exponential convergence", criterion_8),
        ("potential path independence", criterion_9),
        ("mixed-kind octahedron", criterion_10),
    ];
    let mut failed = Vec::new();
    let mut err = std::io::stderr().lock();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let result = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let line = match &result {
            Ok(detail) => format!("acceptance {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed.push(i + 1);
                format!("acceptance {:>2} FAIL  {name}: {detail}", i + 1)
            }
        };
        let _ = writeln!(err, "{line}");
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
