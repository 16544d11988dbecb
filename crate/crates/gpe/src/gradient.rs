//! Feasible gradient method on the unit sphere.
//!
//! Iterates stay exactly on the sphere: the update moves along the
//! curvilinear path
//!
//! ```text
//! Y(tau) = (I + tau A(X))^{-1} (I - tau A(X)) X,
//! A(X) = G X^* - X G^*,
//! ```
//!
//! a Cayley transform of the skew-Hermitian projected-gradient operator.
//! `Y(tau)` has the closed form `alpha(tau) X + beta(tau) G` with scalar
//! coefficients, so no linear solve is ever performed. Step sizes come
//! from the Barzilai-Borwein secant formulas, safeguarded by a
//! nonmonotone backtracking search against the running reference value
//! `C^(k)`; a monotone Armijo variant is available. The stopping test is
//! `max_j |X^(k+1)_j - X^(k)_j| / tau <= eps0`.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::field::{self, Field};
use crate::observables::observables_into_report;
use crate::problem::{DiscreteProblem, Objective, StateVector};
use crate::report::{SolveReport, StopReason, TraceRecord};

/// Parameters of the feasible gradient method.
#[derive(Debug, Clone)]
pub struct GradParams {
    /// Memory of the nonmonotone reference value, in `(0, 1)`.
    pub eta: f64,
    /// Sufficient-decrease constant, in `(0, 1)`.
    pub rho1: f64,
    /// Backtracking factor, in `(0, 1)`.
    pub backtrack: f64,
    /// Stopping tolerance on `|X^(k+1) - X^(k)|_inf / tau`.
    pub eps0: f64,
    /// Iteration cap.
    pub max_iters: usize,
    /// Lower safeguard for Barzilai-Borwein steps.
    pub tau_min: f64,
    /// Upper safeguard for Barzilai-Borwein steps.
    pub tau_max: f64,
    /// Use the monotone Armijo condition instead of the nonmonotone one.
    pub monotone: bool,
    /// Line-search failure threshold.
    pub max_backtracks: usize,
    /// Optional extra stop on the residual norm (used for Newton
    /// subproblems, which are solved to low accuracy).
    pub residual_stop: Option<f64>,
    /// Whether exhausting the line search is an error. Outer solves
    /// propagate it; warm starts and model subproblems instead stop at
    /// the current iterate, which only means the iterate is already as
    /// good as the search can resolve.
    pub fail_on_search_exhaustion: bool,
}

impl Default for GradParams {
    fn default() -> Self {
        Self {
            eta: 0.85,
            rho1: 1e-4,
            backtrack: 0.5,
            eps0: 1e-6,
            max_iters: 2000,
            tau_min: 1e-10,
            tau_max: 1e10,
            monotone: false,
            max_backtracks: 50,
            residual_stop: None,
            fail_on_search_exhaustion: true,
        }
    }
}

/// Which Barzilai-Borwein formula to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BbVariant {
    /// `tau = Re<S,S> / |Re<S,W>|`.
    First,
    /// `tau = |Re<S,W>| / Re<W,W>`.
    Second,
}

/// Lagrange multiplier `theta = Re(X^* G)` and projected-gradient
/// residual `R = A(X) X = G (X^* X) - X (G^* X)`, evaluated without
/// forming the `M x M` operator.
pub fn multiplier_and_residual<T: Field>(x: &[T], g: &[T]) -> (f64, Vec<T>) {
    let theta = field::re_dot(x, g);
    let nx = field::norm_sqr(x);
    let gx = field::cdot(g, x);
    let r = g
        .iter()
        .zip(x)
        .map(|(&gj, &xj)| gj.scale(nx).sub(xj.mul_c(gx)))
        .collect();
    (theta, r)
}

/// Closed-form feasible point `Y(tau) = alpha(tau) X + beta(tau) G` of
/// the Cayley update. The scalar `X^* G` enters through its real part,
/// which keeps the coefficients real for complex fields; `|Y|_2 = |X|_2`
/// holds identically. The denominator is at least 1 by Cauchy-Schwarz.
pub fn feasible_point<T: Field>(x: &[T], g: &[T], tau: f64) -> Vec<T> {
    let s = field::re_dot(x, g);
    let nx = field::norm_sqr(x);
    let ng = field::norm_sqr(g);
    let t2 = tau * tau;
    // |X|^2 |G|^2 - Re(X^* G)^2 >= 0 by Cauchy-Schwarz; roundoff can leave
    // a tiny negative, which enormous safeguarded steps would amplify
    let gap = nx * ng - s * s;
    assert!(
        gap >= -1e-10 * (nx * ng + 1.0),
        "Cayley denominator gap {gap} violates the Cauchy-Schwarz bound"
    );
    let denom = 1.0 + t2 * gap.max(0.0);
    let a = ((1.0 + tau * s) * (1.0 + tau * s) - t2 * nx * ng) / denom;
    let b = -2.0 * tau * nx / denom;
    let mut y = vec![T::ZERO; x.len()];
    field::lin_comb(&mut y, a, x, b, g);
    y
}

/// Barzilai-Borwein step from the secant pair `S = X^(k) - X^(k-1)`,
/// `W = R^(k) - R^(k-1)`. Non-finite values are reset to `tau_max`;
/// otherwise the step is clamped to `[tau_min, tau_max]`.
pub fn bb_step<T: Field>(
    s: &[T],
    w: &[T],
    variant: BbVariant,
    tau_min: f64,
    tau_max: f64,
) -> f64 {
    let sw = field::re_dot(s, w).abs();
    let raw = match variant {
        BbVariant::First => field::norm_sqr(s) / sw,
        BbVariant::Second => sw / field::norm_sqr(w),
    };
    if raw.is_finite() {
        raw.clamp(tau_min, tau_max)
    } else {
        tau_max
    }
}

/// Accepted point of the curvilinear backtracking search.
#[derive(Debug, Clone)]
pub struct SearchOutcome<T: Field> {
    /// Accepted iterate `Y(tau)`.
    pub x: Vec<T>,
    /// Objective value at the accepted iterate.
    pub f: f64,
    /// Gradient at the accepted iterate.
    pub g: Vec<T>,
    /// Accepted step.
    pub tau: f64,
    /// Number of rejected trial steps.
    pub backtracks: usize,
    /// Objective evaluations spent.
    pub evals: usize,
}

/// Backtracking search along the curvilinear path: accepts the first
/// `tau = (1/2) tau0 * backtrack^m` with
/// `F(Y(tau)) <= f_ref - rho1 * tau * |R|^2`, where `f_ref` is the
/// nonmonotone reference value `C^(k)` (or `F(X^(k))` in monotone mode).
pub fn curvilinear_search<T: Field, O: Objective<T> + ?Sized>(
    obj: &O,
    x: &[T],
    g: &[T],
    f_ref: f64,
    residual_sqr: f64,
    tau0: f64,
    params: &GradParams,
) -> Result<SearchOutcome<T>> {
    let mut tau = 0.5 * tau0;
    let mut evals = 0;
    for m in 0..=params.max_backtracks {
        let y = feasible_point(x, g, tau);
        let mut gy = vec![T::ZERO; y.len()];
        let fy = obj.value_grad(&y, &mut gy);
        evals += 1;
        if !fy.is_finite() {
            let max_abs = y.iter().map(|v| v.abs_sqr().sqrt()).fold(0.0, f64::max);
            return Err(Error::NumericalOverflow {
                iteration: 0,
                energy: fy,
                max_abs,
            });
        }
        if fy <= f_ref - params.rho1 * tau * residual_sqr {
            return Ok(SearchOutcome {
                x: y,
                f: fy,
                g: gy,
                tau,
                backtracks: m,
                evals,
            });
        }
        tau *= params.backtrack;
    }
    Err(Error::StepFailure {
        backtracks: params.max_backtracks,
        residual: residual_sqr.sqrt(),
    })
}

/// Full result of a generic sphere-constrained minimization run.
#[derive(Debug, Clone)]
pub(crate) struct MinimizeOutcome<T: Field> {
    pub x: Vec<T>,
    pub f: f64,
    pub g: Vec<T>,
    pub theta: f64,
    pub residual_norm: f64,
    pub iterations: usize,
    pub nfe: usize,
    pub converged: bool,
    pub stop: StopReason,
    pub trace: Vec<TraceRecord>,
    /// Lowest objective value seen and where it was attained (includes
    /// the starting point).
    pub best_f: f64,
    pub best_x: Vec<T>,
}

/// Runs the feasible gradient method on an arbitrary objective from a
/// unit-norm starting vector.
pub(crate) fn minimize<T: Field, O: Objective<T> + ?Sized>(
    obj: &O,
    x0: Vec<T>,
    params: &GradParams,
) -> Result<MinimizeOutcome<T>> {
    assert_eq!(x0.len(), obj.len());
    let mut x = x0;
    let mut g = vec![T::ZERO; x.len()];
    let mut f = obj.value_grad(&x, &mut g);
    let mut nfe = 1;
    if !f.is_finite() {
        return Err(Error::NumericalOverflow {
            iteration: 0,
            energy: f,
            max_abs: x.iter().map(|v| v.abs_sqr().sqrt()).fold(0.0, f64::max),
        });
    }
    let (mut theta, mut r) = multiplier_and_residual(&x, &g);
    let mut rn2 = field::norm_sqr(&r);
    let mut best_f = f;
    let mut best_x = x.clone();
    let mut c_ref = f;
    let mut q_ref = 1.0;
    let mut secant: Option<(Vec<T>, Vec<T>)> = None;
    let mut tau2_history: Vec<f64> = Vec::new();
    let mut tau_prev = 0.0f64;
    let mut trace = Vec::new();
    let mut converged = false;
    let mut stop = StopReason::IterationCap;
    let mut iterations = 0;

    for k in 0..params.max_iters {
        if let Some(target) = params.residual_stop {
            if rn2.sqrt() <= target {
                converged = true;
                stop = StopReason::Converged;
                break;
            }
        }
        let tau0 = match &secant {
            None => (1e-2f64).min(1.0 / (field::norm(&g) + 1.0)),
            Some((s, w)) => {
                let mode = std::env::var("GPE_BB").unwrap_or_default();
                if let Some(kappa) = mode.strip_prefix("abbmin") {
                    let kappa: f64 = kappa.parse().unwrap_or(0.5);
                    let t1 = bb_step(s, w, BbVariant::First, params.tau_min, params.tau_max);
                    let t2 = bb_step(s, w, BbVariant::Second, params.tau_min, params.tau_max);
                    tau2_history.push(t2);
                    let look = tau2_history.len().saturating_sub(5);
                    if t2 / t1 < kappa {
                        tau2_history[look..].iter().cloned().fold(f64::INFINITY, f64::min)
                    } else { t1 }
                } else if let Some(q) = mode.strip_prefix("cyc") {
                    let q: usize = q.parse().unwrap_or(2);
                    if (k - 1) % q == 0 || tau_prev == 0.0 {
                        bb_step(s, w, BbVariant::First, params.tau_min, params.tau_max)
                    } else { tau_prev }
                } else if let Some(kappa) = mode.strip_prefix("abb") {
                    let kappa: f64 = kappa.parse().unwrap_or(0.5);
                    let t1 = bb_step(s, w, BbVariant::First, params.tau_min, params.tau_max);
                    let t2 = bb_step(s, w, BbVariant::Second, params.tau_min, params.tau_max);
                    if t2 / t1 < kappa { t2 } else { t1 }
                } else {
                    let variant = match mode.as_str() {
                        "first" => BbVariant::First,
                        "second" => BbVariant::Second,
                        "flip" => if k % 2 == 0 { BbVariant::First } else { BbVariant::Second },
                        "cycle" => if (k / 4) % 2 == 0 { BbVariant::First } else { BbVariant::Second },
                        _ => if k % 2 == 1 { BbVariant::First } else { BbVariant::Second },
                    };
                    bb_step(s, w, variant, params.tau_min, params.tau_max)
                }
            }
        };
        tau_prev = tau0;
        let f_ref = if params.monotone { f } else { c_ref };
        let step = match curvilinear_search(obj, &x, &g, f_ref, rn2, tau0, params) {
            Ok(step) => step,
            Err(Error::StepFailure { .. }) if !params.fail_on_search_exhaustion => {
                stop = StopReason::SearchFloor;
                break;
            }
            Err(Error::NumericalOverflow {
                energy, max_abs, ..
            }) => {
                return Err(Error::NumericalOverflow {
                    iteration: k,
                    energy,
                    max_abs,
                })
            }
            Err(other) => return Err(other),
        };
        nfe += step.evals;

        let mut x_new = step.x;
        if (field::norm_sqr(&x_new) - 1.0).abs() > 1e-14 {
            let n = field::norm(&x_new);
            field::scale_in_place(&mut x_new, 1.0 / n);
        }
        let diff = field::inf_norm_diff(&x_new, &x);
        let s_new: Vec<T> = x_new.iter().zip(&x).map(|(&a, &b)| a.sub(b)).collect();
        let (theta_new, r_new) = multiplier_and_residual(&x_new, &step.g);
        let w_new: Vec<T> = if std::env::var("GPE_W").as_deref() == Ok("grad") {
            step.g.iter().zip(&g).map(|(&a, &b)| a.sub(b)).collect()
        } else {
            r_new.iter().zip(&r).map(|(&a, &b)| a.sub(b)).collect()
        };

        x = x_new;
        f = step.f;
        g = step.g;
        theta = theta_new;
        r = r_new;
        rn2 = field::norm_sqr(&r);
        secant = Some((s_new, w_new));
        iterations = k + 1;

        // C^(k+1) = (eta Q^(k) C^(k) + F^(k+1)) / Q^(k+1), Q^(k+1) = eta Q^(k) + 1
        q_ref = params.eta * q_ref + 1.0;
        c_ref = ((q_ref - 1.0) * c_ref + f) / q_ref;
        if f < best_f {
            best_f = f;
            best_x = x.clone();
        }
        trace.push(TraceRecord {
            level: 0,
            iteration: k + 1,
            energy: f,
            residual: rn2.sqrt(),
            step: step.tau,
            backtracks: step.backtracks,
            ratio: None,
            accepted: true,
        });
        let crit_tau = if std::env::var("GPE_CRIT").as_deref() == Ok("bb") {
            tau0
        } else {
            step.tau
        };
        if diff / crit_tau <= params.eps0 {
            converged = true;
            stop = StopReason::Converged;
            break;
        }
    }
    if let (Some(target), false) = (params.residual_stop, converged) {
        if rn2.sqrt() <= target {
            converged = true;
            stop = StopReason::Converged;
        }
    }

    Ok(MinimizeOutcome {
        x,
        f,
        g,
        theta,
        residual_norm: rn2.sqrt(),
        iterations,
        nfe,
        converged,
        stop,
        trace,
        best_f,
        best_x,
    })
}

/// Minimizes the discretized energy with the feasible gradient method
/// (Barzilai-Borwein steps alternating between the two formulas,
/// nonmonotone line search) and returns the state with its report.
pub fn gradient_descent<T: Field>(
    problem: &DiscreteProblem<T>,
    x0: &StateVector<T>,
    params: &GradParams,
) -> Result<(StateVector<T>, SolveReport)> {
    let start = Instant::now();
    let out = minimize(problem, x0.as_slice().to_vec(), params)?;
    let x = StateVector::new(out.x.clone())?;
    let mut report = SolveReport {
        residual_norm: out.residual_norm,
        theta: out.theta,
        iterations: out.iterations,
        nfe: out.nfe,
        converged: out.converged,
        stop: out.stop,
        trace: out.trace,
        wall_seconds: start.elapsed().as_secs_f64(),
        ..SolveReport::default()
    };
    observables_into_report(problem, &x, out.f, &mut report);
    Ok((x, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn gradient_parallel_to_x_is_stationary() {
        let x = vec![0.6, 0.8];
        let g = vec![1.2, 1.6]; // G = 2X
        let (theta, r) = multiplier_and_residual(&x, &g);
        assert!((theta - 2.0).abs() < 1e-15);
        assert!(field::norm(&r) < 1e-15);
    }

    #[test]
    fn orthogonal_gradient_residual() {
        let x = vec![1.0, 0.0];
        let g = vec![0.0, 1.0];
        let (theta, r) = multiplier_and_residual(&x, &g);
        assert_eq!(theta, 0.0);
        assert_eq!(r, vec![0.0, 1.0]);
    }

    #[test]
    fn feasible_point_identity_at_zero() {
        let x = vec![0.6, 0.8];
        let g = vec![-0.3, 1.1];
        let y = feasible_point(&x, &g, 0.0);
        assert_eq!(y, x);
    }

    #[test]
    fn feasible_point_unit_step_flips_to_gradient() {
        // X = e1, G = e2, tau = 1: alpha = 0, beta = -1, Y = -e2
        let y = feasible_point(&[1.0, 0.0], &[0.0, 1.0], 1.0);
        assert!((y[0]).abs() < 1e-15);
        assert!((y[1] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn feasible_point_preserves_norm_for_complex_data() {
        let x = vec![
            Complex64::new(0.5, 0.5),
            Complex64::new(0.5, -0.5),
        ];
        let g = vec![Complex64::new(0.3, -1.0), Complex64::new(-0.2, 0.9)];
        for tau in [1e-3, 0.1, 1.0, 10.0] {
            let y = feasible_point(&x, &g, tau);
            assert!((field::norm_sqr(&y) - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn bb_steps_from_scaled_secants() {
        let s = vec![1.0, -2.0, 0.5];
        let w1 = s.clone();
        assert_eq!(bb_step(&s, &w1, BbVariant::First, 1e-10, 1e10), 1.0);
        assert_eq!(bb_step(&s, &w1, BbVariant::Second, 1e-10, 1e10), 1.0);
        let w2: Vec<f64> = s.iter().map(|v| 2.0 * v).collect();
        assert_eq!(bb_step(&s, &w2, BbVariant::First, 1e-10, 1e10), 0.5);
        assert_eq!(bb_step(&s, &w2, BbVariant::Second, 1e-10, 1e10), 0.5);
    }

    #[test]
    fn bb_step_resets_unbounded_to_tau_max() {
        let s = vec![1.0, 0.0];
        let w = vec![0.0, 0.0];
        assert_eq!(bb_step(&s, &w, BbVariant::First, 1e-10, 1e10), 1e10);
        assert_eq!(bb_step(&s, &w, BbVariant::Second, 1e-10, 1e10), 1e10);
    }

    /// Rayleigh-quotient toy objective F(X) = X^T diag(1, 3) X.
    struct Quadratic;
    impl Objective<f64> for Quadratic {
        fn len(&self) -> usize {
            2
        }
        fn value_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
            grad[0] = 2.0 * x[0];
            grad[1] = 6.0 * x[1];
            x[0] * x[0] + 3.0 * x[1] * x[1]
        }
    }

    #[test]
    fn descent_direction_needs_no_backtracking_for_small_steps() {
        let x = [0.8, 0.6];
        let mut g = [0.0; 2];
        let f = Quadratic.value_grad(&x, &mut g);
        let (_, r) = multiplier_and_residual(&x, &g);
        let rn2 = field::norm_sqr(&r);
        let out =
            curvilinear_search(&Quadratic, &x, &g, f, rn2, 1e-3, &GradParams::default()).unwrap();
        assert_eq!(out.backtracks, 0);
        assert!(out.f < f);
    }

    #[test]
    fn quadratic_on_sphere_converges_to_smallest_eigenvector() {
        let x0 = vec![0.8, 0.6];
        let params = GradParams {
            eps0: 1e-12,
            max_iters: 500,
            ..GradParams::default()
        };
        let out = minimize(&Quadratic, x0, &params).unwrap();
        assert!(out.converged);
        assert!((out.f - 1.0).abs() < 1e-10);
        assert!(out.x[1].abs() < 1e-5);
        assert!((field::norm_sqr(&out.x) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn monotone_mode_decreases_every_iteration() {
        let params = GradParams {
            monotone: true,
            eps0: 1e-10,
            max_iters: 200,
            ..GradParams::default()
        };
        let out = minimize(&Quadratic, vec![0.6, 0.8], &params).unwrap();
        let mut prev = f64::INFINITY;
        for rec in &out.trace {
            assert!(rec.energy <= prev + 1e-15);
            prev = rec.energy;
        }
        assert!(out.converged);
    }
}
