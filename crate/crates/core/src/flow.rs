//! Combinatorial Ricci flow `dK/dt = −(L(K) − L̂)` and the Newton finish.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::linalg::solve_spd;
use crate::packing::{global_jacobian, phi_gradient, PackingState};
use crate::scalar::{lit, to_f64, tol, Real};
use crate::surface::{check_admissible, Admissibility, TargetCurvature, Triangulation};

/// Time stepping scheme for the flow.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stepper {
    /// Dormand–Prince 5(4) with error control.
    #[default]
    Adaptive,
    /// Classical Runge–Kutta with a fixed step.
    Rk4,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowConfig<T> {
    /// Stop when `max |Lᵢ − L̂ᵢ|` drops below this.
    pub residual_tol: T,
    pub max_time: T,
    pub max_steps: usize,
    pub stepper: Stepper,
    /// Residual max-norm below which Newton takes over.
    pub newton_switch_tol: T,
    /// Initial Newton step fraction, in `(0, 1]`.
    pub newton_damping: T,
    pub newton: bool,
    pub max_newton_iterations: usize,
    /// Run the subset test before flowing (only possible up to 25 vertices).
    pub check_admissibility: bool,
    /// Per-step local error bound (max-norm) for the adaptive stepper.
    pub step_tol: T,
    pub initial_step: T,
    pub max_step: T,
    /// Step size of the fixed RK4 stepper.
    pub rk4_step: T,
    /// `|Kᵢ|` beyond which the run is declared divergent.
    pub divergence_bound: T,
}

impl<T: Real> Default for FlowConfig<T> {
    fn default() -> Self {
        FlowConfig {
            residual_tol: tol(1e-10, 256.0),
            max_time: lit(1e4),
            max_steps: 200_000,
            stepper: Stepper::Adaptive,
            newton_switch_tol: lit(1e-3),
            newton_damping: T::one(),
            newton: true,
            max_newton_iterations: 50,
            check_admissibility: true,
            step_tol: tol(1e-8, 64.0),
            initial_step: lit(0.01),
            max_step: lit(10.0),
            rk4_step: lit(0.02),
            divergence_bound: lit(30.0),
        }
    }
}

impl<T: Real> FlowConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("residual_tol", self.residual_tol),
            ("max_time", self.max_time),
            ("newton_switch_tol", self.newton_switch_tol),
            ("step_tol", self.step_tol),
            ("initial_step", self.initial_step),
            ("max_step", self.max_step),
            ("rk4_step", self.rk4_step),
            ("divergence_bound", self.divergence_bound),
        ];
        for (name, v) in positive {
            if !(v > T::zero()) || !v.is_finite() {
                return domain(format!("{name} must be positive and finite, got {v}"));
            }
        }
        if self.newton_switch_tol <= self.residual_tol {
            return domain("newton_switch_tol must exceed residual_tol");
        }
        if !(self.newton_damping > T::zero() && self.newton_damping <= T::one()) {
            return domain("newton_damping must lie in (0, 1]");
        }
        Ok(())
    }
}

/// One accepted flow step.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowSample<T> {
    pub t: T,
    pub k_log: Vec<T>,
    pub residual_max: T,
    pub residual_2norm: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NewtonSample<T> {
    pub iteration: usize,
    pub step_fraction: T,
    pub residual_max: T,
    pub residual_2norm: T,
}

/// Least-squares fit `ln ‖L − L̂‖₂ ≈ c − λ t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateEstimate {
    pub lambda: f64,
    pub r_squared: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct FlowTrace<T> {
    pub samples: Vec<FlowSample<T>>,
    pub newton: Vec<NewtonSample<T>>,
    pub rate: Option<RateEstimate>,
    pub rejected_steps: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FlowStatus {
    Converged,
    MaxStepsExceeded,
    Infeasible,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOutcome<T> {
    pub state: PackingState<T>,
    pub trace: FlowTrace<T>,
    pub status: FlowStatus,
    /// Violating subset when the admissibility test rejected the targets.
    pub witness: Option<Vec<usize>>,
    pub residual_max: T,
}

fn velocity<T: Real>(tri: &Triangulation, targets: &TargetCurvature<T>, k: &[T]) -> Result<Vec<T>> {
    let g = phi_gradient(tri, &PackingState::new(k.to_vec())?, targets)?;
    Ok(g.into_iter().map(|x| -x).collect())
}

fn norms<T: Real>(v: &[T]) -> (T, T) {
    let max = v.iter().fold(T::zero(), |a, x| a.max(x.abs()));
    let two = v.iter().fold(T::zero(), |a, &x| a + x * x).sqrt();
    (max, two)
}

fn axpy<T: Real>(y: &[T], h: T, terms: &[(f64, &Vec<T>)]) -> Vec<T> {
    (0..y.len())
        .map(|i| {
            let s = terms
                .iter()
                .fold(T::zero(), |a, &(c, k)| a + lit::<T>(c) * k[i]);
            y[i] + h * s
        })
        .collect()
}

/// One Dormand–Prince step from `k` with precomputed velocity `v0`; returns
/// the fifth-order state, the max-norm error estimate and the velocity at the
/// new state.
fn dopri_step<T: Real>(
    tri: &Triangulation,
    targets: &TargetCurvature<T>,
    k: &[T],
    v0: &Vec<T>,
    h: T,
) -> Result<(Vec<T>, T, Vec<T>)> {
    let f = |y: Vec<T>| velocity(tri, targets, &y);
    let k2 = f(axpy(k, h, &[(1.0 / 5.0, v0)]))?;
    let k3 = f(axpy(k, h, &[(3.0 / 40.0, v0), (9.0 / 40.0, &k2)]))?;
    let k4 = f(axpy(
        k,
        h,
        &[(44.0 / 45.0, v0), (-56.0 / 15.0, &k2), (32.0 / 9.0, &k3)],
    ))?;
    let k5 = f(axpy(
        k,
        h,
        &[
            (19372.0 / 6561.0, v0),
            (-25360.0 / 2187.0, &k2),
            (64448.0 / 6561.0, &k3),
            (-212.0 / 729.0, &k4),
        ],
    ))?;
    let k6 = f(axpy(
        k,
        h,
        &[
            (9017.0 / 3168.0, v0),
            (-355.0 / 33.0, &k2),
            (46732.0 / 5247.0, &k3),
            (49.0 / 176.0, &k4),
            (-5103.0 / 18656.0, &k5),
        ],
    ))?;
    let y5 = axpy(
        k,
        h,
        &[
            (35.0 / 384.0, v0),
            (500.0 / 1113.0, &k3),
            (125.0 / 192.0, &k4),
            (-2187.0 / 6784.0, &k5),
            (11.0 / 84.0, &k6),
        ],
    );
    let k7 = f(y5.clone())?;
    let err = axpy(
        &vec![T::zero(); k.len()],
        h,
        &[
            (71.0 / 57600.0, v0),
            (-71.0 / 16695.0, &k3),
            (71.0 / 1920.0, &k4),
            (-17253.0 / 339200.0, &k5),
            (22.0 / 525.0, &k6),
            (-1.0 / 40.0, &k7),
        ],
    );
    Ok((y5, norms(&err).0, k7))
}

/// One embedded Dormand–Prince 5(4) step of size `h`; returns the new state
/// and the max-norm local error estimate.
pub fn flow_step<T: Real>(
    tri: &Triangulation,
    state: &PackingState<T>,
    targets: &TargetCurvature<T>,
    h: T,
) -> Result<(PackingState<T>, T)> {
    if !(h > T::zero()) {
        return domain(format!("step size must be positive, got {h}"));
    }
    let v0 = velocity(tri, targets, state.as_slice())?;
    let (y, err, _) = dopri_step(tri, targets, state.as_slice(), &v0, h)?;
    Ok((PackingState::new(y)?, err))
}

/// One classical fourth-order Runge–Kutta step of size `h`.
pub fn rk4_step<T: Real>(
    tri: &Triangulation,
    state: &PackingState<T>,
    targets: &TargetCurvature<T>,
    h: T,
) -> Result<PackingState<T>> {
    let k = state.as_slice();
    let f = |y: Vec<T>| velocity(tri, targets, &y);
    let k1 = f(k.to_vec())?;
    let k2 = f(axpy(k, h, &[(0.5, &k1)]))?;
    let k3 = f(axpy(k, h, &[(0.5, &k2)]))?;
    let k4 = f(axpy(k, h, &[(1.0, &k3)]))?;
    PackingState::new(axpy(
        k,
        h,
        &[
            (1.0 / 6.0, &k1),
            (1.0 / 3.0, &k2),
            (1.0 / 3.0, &k3),
            (1.0 / 6.0, &k4),
        ],
    ))
}

/// Fits the exponential decay of the residual 2-norm over the samples whose
/// max-norm lies in `(10·residual_tol, newton_switch_tol)`. Needs at least 10.
pub fn rate_estimate<T: Real>(
    trace: &FlowTrace<T>,
    residual_tol: T,
    newton_switch_tol: T,
) -> Option<RateEstimate> {
    let lo = residual_tol * lit(10.0);
    let pts: Vec<(f64, f64)> = trace
        .samples
        .iter()
        .filter(|s| s.residual_max > lo && s.residual_max < newton_switch_tol)
        .map(|s| (to_f64(s.t), to_f64(s.residual_2norm).ln()))
        .collect();
    if pts.len() < 10 {
        return None;
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let stt: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let sty: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if stt <= 0.0 || syy <= 0.0 {
        return None;
    }
    let slope = sty / stt;
    Some(RateEstimate {
        lambda: -slope,
        r_squared: sty * sty / (stt * syy),
        samples: pts.len(),
    })
}

/// Integrates the flow from `initial` (all `K = 0` when absent) until the
/// residual max-norm drops below `config.residual_tol`, finishing with damped
/// Newton iterations once it is below `config.newton_switch_tol`.
pub fn solve<T: Real>(
    tri: &Triangulation,
    targets: &TargetCurvature<T>,
    initial: Option<&PackingState<T>>,
    config: &FlowConfig<T>,
) -> Result<SolveOutcome<T>> {
    config.validate()?;
    let n = tri.num_vertices();
    if targets.len() != n {
        return domain(format!("{} targets for {n} vertices", targets.len()));
    }
    let start = match initial {
        Some(s) if s.len() != n => {
            return domain(format!(
                "initial state has {} entries for {n} vertices",
                s.len()
            ))
        }
        Some(s) => s.clone(),
        None => PackingState::zeros(n),
    };
    if config.check_admissibility {
        match check_admissible(tri, targets) {
            Ok(Admissibility::Violated { witness, .. }) => {
                return Ok(SolveOutcome {
                    residual_max: T::nan(),
                    state: start,
                    trace: FlowTrace::default(),
                    status: FlowStatus::Infeasible,
                    witness: Some(witness),
                });
            }
            Ok(Admissibility::Admissible { .. }) | Err(Error::Capacity { .. }) => {}
            Err(e) => return Err(e),
        }
    }

    let mut trace = FlowTrace::default();
    let mut k = start.into_vec();
    let mut v = velocity(tri, targets, &k)?;
    let (mut res_max, mut res_2) = norms(&v);
    let mut t = T::zero();
    trace.samples.push(FlowSample {
        t,
        k_log: k.clone(),
        residual_max: res_max,
        residual_2norm: res_2,
    });
    let mut h = match config.stepper {
        Stepper::Adaptive => config.initial_step,
        Stepper::Rk4 => config.rk4_step,
    };
    let underflow = lit::<T>(1e-14);
    let slack = lit::<T>(1e-12);
    let mut steps = 0usize;
    let mut newton_allowed = config.newton;

    let status = loop {
        if res_max < config.residual_tol {
            break FlowStatus::Converged;
        }
        if newton_allowed && res_max < config.newton_switch_tol {
            match newton(tri, targets, &mut k, config, &mut trace)? {
                true => {
                    res_max = norms(&velocity(tri, targets, &k)?).0;
                    break FlowStatus::Converged;
                }
                false => {
                    // stalled: go back to flowing from the best Newton iterate
                    newton_allowed = false;
                    v = velocity(tri, targets, &k)?;
                    (res_max, res_2) = norms(&v);
                    continue;
                }
            }
        }
        if k.iter().any(|x| x.abs() > config.divergence_bound) {
            break FlowStatus::Infeasible;
        }
        if steps >= config.max_steps || t >= config.max_time {
            break FlowStatus::MaxStepsExceeded;
        }
        if h < underflow {
            return Err(Error::Stiffness {
                time: to_f64(t),
                step: to_f64(h),
                residual: to_f64(res_max),
                state: k.iter().map(|&x| to_f64(x)).collect(),
            });
        }
        let trial = match config.stepper {
            Stepper::Adaptive => {
                dopri_step(tri, targets, &k, &v, h).map(|(y, err, vy)| (y, Some(err), Some(vy)))
            }
            Stepper::Rk4 => rk4_step(tri, &PackingState::new(k.clone())?, targets, h)
                .map(|s| (s.into_vec(), None, None)),
        };
        let accepted = match trial {
            Ok((y, err, vy)) if err.is_none_or(|e| e < config.step_tol) => {
                let vy = match vy {
                    Some(vy) => Ok(vy),
                    None => velocity(tri, targets, &y),
                };
                match vy {
                    Ok(vy) => {
                        let (m, two) = norms(&vy);
                        // Lyapunov guard: ‖L − L̂‖₂ must not grow along the flow
                        (two <= res_2 * (T::one() + slack) + slack).then_some((y, vy, m, two, err))
                    }
                    Err(_) => None,
                }
            }
            _ => None,
        };
        match accepted {
            Some((y, vy, m, two, err)) => {
                t = t + h;
                steps += 1;
                k = y;
                v = vy;
                res_max = m;
                res_2 = two;
                trace.samples.push(FlowSample {
                    t,
                    k_log: k.clone(),
                    residual_max: res_max,
                    residual_2norm: res_2,
                });
                if let Some(err) = err {
                    let grow = if err > T::zero() {
                        (lit::<T>(0.9) * (config.step_tol / err).powf(lit(0.2))).min(lit(5.0))
                    } else {
                        lit(5.0)
                    };
                    h = (h * grow.max(T::one())).min(config.max_step);
                }
            }
            None => {
                trace.rejected_steps += 1;
                h = h * lit(0.5);
            }
        }
    };
    trace.rate = rate_estimate(&trace, config.residual_tol, config.newton_switch_tol);
    Ok(SolveOutcome {
        state: PackingState::new(k)?,
        trace,
        status,
        witness: None,
        residual_max: res_max,
    })
}

/// Damped Newton on `Φ`; returns whether the residual tolerance was reached.
/// `k` is left at the last accepted iterate.
fn newton<T: Real>(
    tri: &Triangulation,
    targets: &TargetCurvature<T>,
    k: &mut Vec<T>,
    config: &FlowConfig<T>,
    trace: &mut FlowTrace<T>,
) -> Result<bool> {
    let mut g: Vec<T> = velocity(tri, targets, k)?.into_iter().map(|x| -x).collect();
    let (mut gmax, mut g2) = norms(&g);
    let min_fraction = lit::<T>(1e-10);
    for iteration in 1..=config.max_newton_iterations {
        if gmax < config.residual_tol {
            return Ok(true);
        }
        let m = global_jacobian(tri, &PackingState::new(k.clone())?)?.symmetrized();
        let d = solve_spd(&m, &g)?;
        let mut alpha = config.newton_damping;
        let accepted = loop {
            let trial: Vec<T> = k.iter().zip(&d).map(|(&x, &dx)| x - alpha * dx).collect();
            if let Ok(vt) = velocity(tri, targets, &trial) {
                let (tm, t2) = norms(&vt);
                if t2 < g2 * (T::one() - lit::<T>(1e-4) * alpha) || tm < config.residual_tol {
                    break Some((trial, vt, tm, t2));
                }
            }
            alpha = alpha * lit(0.5);
            if alpha < min_fraction {
                break None;
            }
        };
        let Some((trial, vt, tm, t2)) = accepted else {
            return Ok(false);
        };
        *k = trial;
        g = vt.into_iter().map(|x| -x).collect();
        gmax = tm;
        g2 = t2;
        trace.newton.push(NewtonSample {
            iteration,
            step_fraction: alpha,
            residual_max: gmax,
            residual_2norm: g2,
        });
    }
    Ok(gmax < config.residual_tol)
}

/// Writes accepted flow steps as comma-separated rows
/// `t,residual_max,residual_2norm,K_0,…`, preceded by a `# num_vertices=N`
/// line and a header row.
pub fn write_trajectory_csv<T: Real, W: Write>(
    trace: &FlowTrace<T>,
    num_vertices: usize,
    mut out: W,
) -> std::io::Result<()> {
    writeln!(out, "# num_vertices={num_vertices}")?;
    let mut header = String::from("t,residual_max,residual_2norm");
    for i in 0..num_vertices {
        header.push_str(&format!(",K_{i}"));
    }
    writeln!(out, "{header}")?;
    for s in &trace.samples {
        let mut row = format!(
            "{:e},{:e},{:e}",
            to_f64(s.t),
            to_f64(s.residual_max),
            to_f64(s.residual_2norm)
        );
        for &x in &s.k_log {
            row.push_str(&format!(",{:e}", to_f64(x)));
        }
        writeln!(out, "{row}")?;
    }
    Ok(())
}
