//! Regularized Newton method and cascadic multigrid.
//!
//! Around the current iterate `X^(k)` the energy is replaced by its
//! second-order Taylor expansion plus a proximal term,
//!
//! ```text
//! W(X) = (1/2) X^* A X
//!      + 4 alpha sum_j |Xk_j|^2 Re(conj(Xk_j) (X_j - Xk_j))
//!      + 2 alpha sum_j [ |Xk_j|^2 |X_j - Xk_j|^2
//!                        + 2 Re(conj(Xk_j) (X_j - Xk_j))^2 ]
//!      + (delta/2) |X - Xk|^2,
//! ```
//!
//! where `A` is the full Hermitian operator of the unified objective
//! (kinetic, potential and rotation terms). The sphere-constrained model
//! minimization is a trust-region subproblem, solved to low accuracy by
//! the feasible gradient method. Acceptance and the regularization
//! parameter `delta` follow the standard trust-region ratio
//! `rho = actual reduction / predicted reduction`: very successful steps
//! halve `delta`, merely successful steps scale it by `gamma1`, rejected
//! steps by `gamma2`. The outer loop stops when consecutive accepted
//! iterates satisfy `|X^(k+1) - X^(k)|_inf <= delta_stop`.
//!
//! The cascadic driver solves on the coarsest grid first and spectrally
//! (or linearly, for finite differences) prolongs each solution as the
//! initial guess on the next finer grid.

use std::time::Instant;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{self, Field};
use crate::gradient::{minimize, GradParams};
use crate::grid::Grid;
use crate::observables::observables_into_report;
use crate::problem::{DiscreteProblem, Flavor, Objective, StateVector};
use crate::report::{SolveReport, StopReason, TraceRecord};
use crate::transforms::{FourierTransform, SineTransform};

/// Parameters of the regularized Newton method.
#[derive(Debug, Clone)]
pub struct NewtonParams {
    /// Acceptance threshold: steps with `rho >= eta1` are taken.
    pub eta1: f64,
    /// Very-successful threshold: steps with `rho > eta2` shrink `delta`.
    pub eta2: f64,
    /// Growth factor for merely successful steps (`1 < gamma1`).
    pub gamma1: f64,
    /// Growth factor for rejected steps (`gamma1 <= gamma2`).
    pub gamma2: f64,
    /// Initial regularization; `None` selects `max(1, |G(X^(1))|_2)`.
    pub delta0: Option<f64>,
    /// Stopping tolerance on `|X^(k+1) - X^(k)|_inf` over accepted steps.
    pub delta_stop: f64,
    /// Gradient-method iterations of the warm start.
    pub k_init: usize,
    /// Iteration cap of each subproblem solve.
    pub k_sub: usize,
    /// Outer iteration cap.
    pub k_newton: usize,
    /// Parameters shared with the inner gradient runs.
    pub grad: GradParams,
}

impl Default for NewtonParams {
    fn default() -> Self {
        Self {
            eta1: 0.01,
            eta2: 0.9,
            gamma1: 2.0,
            gamma2: 4.0,
            delta0: None,
            delta_stop: 1e-8,
            k_init: 100,
            k_sub: 200,
            k_newton: 500,
            grad: GradParams::default(),
        }
    }
}

/// Quadratic-plus-proximal model of the energy around an anchor state.
pub struct NewtonModel<'a, T: Field> {
    problem: &'a DiscreteProblem<T>,
    anchor: Vec<T>,
    anchor_abs2: Vec<f64>,
    delta: f64,
}

impl<'a, T: Field> NewtonModel<'a, T> {
    /// Builds the model `W` at `anchor` with regularization `delta`.
    pub fn new(problem: &'a DiscreteProblem<T>, anchor: &[T], delta: f64) -> Self {
        assert_eq!(anchor.len(), problem.unknowns());
        Self {
            problem,
            anchor_abs2: anchor.iter().map(|v| v.abs_sqr()).collect(),
            anchor: anchor.to_vec(),
            delta,
        }
    }

    /// Current regularization parameter.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Model value `W(x)`.
    pub fn value(&self, x: &[T]) -> f64 {
        let mut g = vec![T::ZERO; x.len()];
        self.value_grad(x, &mut g)
    }

    /// Model gradient in the `Re(D^* G)` convention.
    pub fn gradient(&self, x: &[T]) -> Vec<T> {
        let mut g = vec![T::ZERO; x.len()];
        self.value_grad(x, &mut g);
        g
    }
}

impl<T: Field> Objective<T> for NewtonModel<'_, T> {
    fn len(&self) -> usize {
        self.problem.unknowns()
    }

    fn value_grad(&self, x: &[T], grad: &mut [T]) -> f64 {
        self.problem.apply_h(x, grad);
        // grad currently holds H x, so re_dot gives (1/2) X^* A X
        let quad = field::re_dot(x, grad);
        let alpha = self.problem.alpha();
        let mut linear = 0.0;
        let mut mixed = 0.0;
        let mut prox = 0.0;
        for j in 0..x.len() {
            let d = x[j].sub(self.anchor[j]);
            let rj = self.anchor[j].re_inner(d);
            let a2 = self.anchor_abs2[j];
            let dd = d.abs_sqr();
            linear += a2 * rj;
            mixed += a2 * dd + 2.0 * rj * rj;
            prox += dd;
            grad[j] = grad[j]
                .scale(2.0)
                .add(x[j].scale(4.0 * alpha * a2))
                .add(self.anchor[j].scale(8.0 * alpha * rj))
                .add(d.scale(self.delta));
        }
        quad + 4.0 * alpha * linear + 2.0 * alpha * mixed + 0.5 * self.delta * prox
    }
}

/// Solves the sphere-constrained model minimization from `x_start` with
/// the feasible gradient method, stopping at `residual_target` or after
/// `k_sub` iterations. The returned point never increases the model value
/// relative to `x_start`: if the nonmonotone run ends above it, the best
/// iterate seen is returned instead.
pub fn solve_subproblem<T: Field>(
    model: &NewtonModel<'_, T>,
    x_start: &[T],
    params: &GradParams,
) -> Result<(Vec<T>, f64, usize)> {
    let out = minimize(model, x_start.to_vec(), params)?;
    if out.f <= out.best_f {
        Ok((out.x, out.f, out.iterations))
    } else {
        Ok((out.best_x, out.best_f, out.iterations))
    }
}

/// Trust-region ratio `(F(Z) - F(X)) / (W(Z) - W(X))`, or `None` when the
/// predicted reduction is below roundoff and the ratio is meaningless.
pub fn tr_ratio(f_z: f64, f_x: f64, w_z: f64, w_x: f64) -> Option<f64> {
    let pred = w_z - w_x;
    if pred.abs() <= 1e-16 * w_x.abs().max(1.0) {
        None
    } else {
        Some((f_z - f_x) / pred)
    }
}

/// Regularization update: very successful steps halve `delta` (floored),
/// merely successful steps scale by `gamma1`, failures by `gamma2`.
pub fn update_regularization(delta: f64, rho: f64, params: &NewtonParams) -> f64 {
    if rho > params.eta2 {
        (0.5 * delta).max(1e-12)
    } else if rho >= params.eta1 {
        params.gamma1 * delta
    } else {
        params.gamma2 * delta
    }
}

/// Minimizes the discretized energy with the regularized Newton method:
/// a gradient warm start, then trust-region controlled model steps.
pub fn newton_solve<T: Field>(
    problem: &DiscreteProblem<T>,
    x0: &StateVector<T>,
    params: &NewtonParams,
) -> Result<(StateVector<T>, SolveReport)> {
    let start = Instant::now();
    let mut warm_params = params.grad.clone();
    warm_params.max_iters = params.k_init;
    warm_params.fail_on_search_exhaustion = false;
    let warm = minimize(problem, x0.as_slice().to_vec(), &warm_params)?;

    let mut x = warm.x;
    let mut f = warm.f;
    let mut g = warm.g;
    let mut theta = warm.theta;
    let mut residual_norm = warm.residual_norm;
    let mut nfe = warm.nfe;
    let mut trace = warm.trace;
    let mut delta = params
        .delta0
        .unwrap_or_else(|| field::norm(&g).max(1.0));

    let mut sub_params = params.grad.clone();
    sub_params.max_iters = params.k_sub;
    sub_params.eps0 = 0.0;
    sub_params.monotone = false;
    sub_params.fail_on_search_exhaustion = false;

    let mut converged = false;
    let mut iterations = 0;
    let mut rejected = 0;

    for k in 1..=params.k_newton {
        iterations = k;
        let model = NewtonModel::new(problem, &x, delta);
        let w_x = model.value(&x);
        sub_params.residual_stop =
            Some((1e-2 * residual_norm).max(1e-8 * field::norm(&g)));
        let (z, w_z, sub_iters) = solve_subproblem(&model, &x, &sub_params)?;

        let mut gz = vec![T::ZERO; z.len()];
        let f_z = problem.value_grad(&z, &mut gz);
        nfe += 1;
        if !f_z.is_finite() {
            return Err(Error::NumericalOverflow {
                iteration: k,
                energy: f_z,
                max_abs: z.iter().map(|v| v.abs_sqr().sqrt()).fold(0.0, f64::max),
            });
        }

        let rho = match tr_ratio(f_z, f, w_z, w_x) {
            Some(r) => r,
            None => {
                if (f_z - f).abs() <= 1e-14 * f.abs().max(1.0) {
                    // model and objective both stagnate: nothing left to gain
                    converged = true;
                    trace.push(TraceRecord {
                        level: 0,
                        iteration: k,
                        energy: f,
                        residual: residual_norm,
                        step: delta,
                        backtracks: sub_iters,
                        ratio: None,
                        accepted: false,
                    });
                    break;
                }
                f64::NEG_INFINITY
            }
        };

        let accepted = rho >= params.eta1;
        if accepted {
            let mut x_new = z;
            if (field::norm_sqr(&x_new) - 1.0).abs() > 1e-14 {
                let n = field::norm(&x_new);
                field::scale_in_place(&mut x_new, 1.0 / n);
            }
            let diff = field::inf_norm_diff(&x_new, &x);
            x = x_new;
            f = f_z;
            g = gz;
            let (t, r) = crate::gradient::multiplier_and_residual(&x, &g);
            theta = t;
            residual_norm = field::norm(&r);
            trace.push(TraceRecord {
                level: 0,
                iteration: k,
                energy: f,
                residual: residual_norm,
                step: delta,
                backtracks: sub_iters,
                ratio: Some(rho),
                accepted: true,
            });
            delta = update_regularization(delta, rho, params);
            if diff <= params.delta_stop {
                converged = true;
                break;
            }
        } else {
            rejected += 1;
            trace.push(TraceRecord {
                level: 0,
                iteration: k,
                energy: f,
                residual: residual_norm,
                step: delta,
                backtracks: sub_iters,
                ratio: Some(rho),
                accepted: false,
            });
            delta = update_regularization(delta, rho, params);
        }
    }

    let state = StateVector::new(x)?;
    let mut report = SolveReport {
        residual_norm,
        theta,
        iterations,
        nfe,
        converged,
        stop: if converged {
            StopReason::Converged
        } else {
            StopReason::IterationCap
        },
        rejected_steps: rejected,
        trace,
        wall_seconds: start.elapsed().as_secs_f64(),
        ..SolveReport::default()
    };
    observables_into_report(problem, &state, f, &mut report);
    Ok((state, report))
}

/// Prolongs a state from a grid to its uniform refinement: linear
/// interpolation of the grid function for the finite difference flavor,
/// spectral zero-padding for the sine and Fourier flavors. The result is
/// renormalized to unit norm (interpolation is linear, so the grid
/// function's overall scaling drops out).
pub fn prolong<T: Field>(
    x: &StateVector<T>,
    coarse: &Grid,
    fine: &Grid,
    flavor: Flavor,
) -> Result<StateVector<T>> {
    if coarse.domain() != fine.domain() {
        return Err(Error::GridMismatch(
            "prolongation requires matching domains".into(),
        ));
    }
    let doubled: Vec<usize> = coarse.intervals_all().iter().map(|&n| 2 * n).collect();
    if fine.intervals_all() != doubled.as_slice() {
        return Err(Error::GridMismatch(format!(
            "prolongation requires the uniform refinement: got {:?} from {:?}",
            fine.intervals_all(),
            coarse.intervals_all()
        )));
    }
    let values = match flavor {
        Flavor::FiniteDifference => prolong_linear(x.as_slice(), coarse),
        Flavor::SineSpectral => prolong_sine(x.as_slice(), coarse),
        Flavor::FourierSpectral => prolong_fourier(x.as_slice(), coarse),
    };
    StateVector::normalized(values)
}

/// Dirichlet bi/trilinear interpolation, one axis at a time.
fn prolong_linear<T: Field>(data: &[T], coarse: &Grid) -> Vec<T> {
    let mut shape = coarse.shape();
    let mut cur = data.to_vec();
    for axis in 0..coarse.dim() {
        let m_in = shape[axis];
        let m_out = 2 * m_in + 1;
        cur = map_axis(&cur, &shape, axis, m_out, T::ZERO, |line, out| {
            // interior values with implicit zero boundary
            let at = |j: isize| -> T {
                if j >= 1 && (j as usize) <= line.len() {
                    line[j as usize - 1]
                } else {
                    T::ZERO
                }
            };
            for (i, o) in out.iter_mut().enumerate() {
                let jf = i as isize + 1;
                *o = if jf % 2 == 0 {
                    at(jf / 2)
                } else {
                    at((jf - 1) / 2).add(at((jf + 1) / 2)).scale(0.5)
                };
            }
        });
        shape[axis] = m_out;
    }
    cur
}

/// Sine zero-padding: resolved modes carry over unchanged, so coarse
/// nodal values are reproduced exactly.
fn prolong_sine<T: Field>(data: &[T], coarse: &Grid) -> Vec<T> {
    let mut shape = coarse.shape();
    let mut cur: Vec<Complex64> = data.iter().map(|v| v.to_complex()).collect();
    for axis in 0..coarse.dim() {
        let n = coarse.intervals(axis);
        let extent = coarse.domain().extent(axis);
        let t_coarse = SineTransform::new(n, extent);
        let t_fine = SineTransform::new(2 * n, extent);
        let mut scratch =
            vec![Complex64::new(0.0, 0.0); t_coarse.scratch_len().max(t_fine.scratch_len())];
        let fwd_scale = 2.0 / n as f64;
        cur = map_axis(&cur, &shape, axis, 2 * n - 1, Complex64::new(0.0, 0.0), |line, out| {
            let mut coeff = line.to_vec();
            t_coarse.sine_sum_complex(&mut coeff, &mut scratch);
            for (o, c) in out.iter_mut().zip(coeff.iter()) {
                *o = c * fwd_scale;
            }
            for o in out.iter_mut().skip(n - 1) {
                *o = Complex64::new(0.0, 0.0);
            }
            t_fine.sine_sum_complex(out, &mut scratch);
        });
        shape[axis] = 2 * n - 1;
    }
    cur.into_iter().map(T::from_complex_lossy).collect()
}

/// Fourier zero-padding; the unmatched `-N/2` mode keeps its frequency on
/// the finer grid.
fn prolong_fourier<T: Field>(data: &[T], coarse: &Grid) -> Vec<T> {
    let mut shape = coarse.shape();
    let mut cur: Vec<Complex64> = data.iter().map(|v| v.to_complex()).collect();
    for axis in 0..coarse.dim() {
        let n = coarse.intervals(axis);
        let extent = coarse.domain().extent(axis);
        let t_coarse = FourierTransform::new(n, extent);
        let t_fine = FourierTransform::new(2 * n, extent);
        let mut scratch =
            vec![Complex64::new(0.0, 0.0); t_coarse.scratch_len().max(t_fine.scratch_len())];
        cur = map_axis(&cur, &shape, axis, 2 * n, Complex64::new(0.0, 0.0), |line, out| {
            let mut coeff = line.to_vec();
            t_coarse.forward_in_place(&mut coeff, &mut scratch);
            for o in out.iter_mut() {
                *o = Complex64::new(0.0, 0.0);
            }
            for (i, &c) in coeff.iter().enumerate() {
                let dst = if i < n / 2 { i } else { i + n };
                out[dst] = c;
            }
            t_fine.inverse_in_place(out, &mut scratch);
        });
        shape[axis] = 2 * n;
    }
    cur.into_iter().map(T::from_complex_lossy).collect()
}

/// Applies `f` to every line along `axis`, changing that axis's length
/// from `shape[axis]` to `new_len`.
fn map_axis<S: Copy>(
    data: &[S],
    shape: &[usize],
    axis: usize,
    new_len: usize,
    zero: S,
    mut f: impl FnMut(&[S], &mut [S]),
) -> Vec<S> {
    let m_in = shape[axis];
    let inner: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let mut out = vec![zero; outer * new_len * inner];
    let mut line_in = vec![zero; m_in];
    let mut line_out = vec![zero; new_len];
    for o in 0..outer {
        for i in 0..inner {
            for j in 0..m_in {
                line_in[j] = data[(o * m_in + j) * inner + i];
            }
            f(&line_in, &mut line_out);
            for (j, &v) in line_out.iter().enumerate() {
                out[(o * new_len + j) * inner + i] = v;
            }
        }
    }
    out
}

/// Cascadic multigrid: solve on the coarsest grid, prolong, re-solve,
/// repeating over `levels` grids. `build` constructs the discretized
/// problem on each grid.
pub fn cascadic_solve<T: Field>(
    build: impl Fn(&Grid) -> Result<DiscreteProblem<T>>,
    coarsest: Grid,
    levels: usize,
    x0: &StateVector<T>,
    params: &NewtonParams,
) -> Result<(StateVector<T>, SolveReport)> {
    if levels == 0 {
        return Err(Error::Config("cascadic solve needs at least one level".into()));
    }
    let start = Instant::now();
    let mut grid = coarsest;
    let mut problem = build(&grid)?;
    if x0.len() != problem.unknowns() {
        return Err(Error::GridMismatch(format!(
            "initial state has {} entries, the coarsest grid has {} unknowns",
            x0.len(),
            problem.unknowns()
        )));
    }
    let mut x = x0.clone();
    let mut level_reports: Vec<SolveReport> = Vec::with_capacity(levels);
    for level in 0..levels {
        if level > 0 {
            let fine = grid.refine();
            x = prolong(&x, &grid, &fine, problem.flavor())?;
            grid = fine;
            problem = build(&grid)?;
        }
        let (x_next, mut rep) = newton_solve(&problem, &x, params)?;
        for rec in &mut rep.trace {
            rec.level = level;
        }
        x = x_next;
        level_reports.push(rep);
    }
    let last = level_reports.last().expect("levels >= 1");
    let mut report = SolveReport {
        energy: last.energy,
        chemical_potential: last.chemical_potential,
        rms: last.rms.clone(),
        max_density: last.max_density,
        residual_norm: last.residual_norm,
        theta: last.theta,
        iterations: last.iterations,
        nfe: level_reports.iter().map(|r| r.nfe).sum(),
        wall_seconds: start.elapsed().as_secs_f64(),
        converged: last.converged,
        stop: last.stop,
        rejected_steps: level_reports.iter().map(|r| r.rejected_steps).sum(),
        trace: level_reports.iter().flat_map(|r| r.trace.clone()).collect(),
        levels: Vec::new(),
    };
    report.levels = level_reports;
    Ok((x, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{BoundaryKind, Domain};
    use crate::potential::Potential;

    #[test]
    fn regularization_update_rules() {
        let p = NewtonParams::default();
        assert_eq!(update_regularization(1.0, 0.95, &p), 0.5);
        assert_eq!(update_regularization(1.0, 0.5, &p), 2.0);
        assert_eq!(update_regularization(1.0, p.eta1, &p), 2.0); // boundary: accepted
        assert_eq!(update_regularization(1.0, -1.0, &p), 4.0);
        assert_eq!(update_regularization(1.0, f64::NEG_INFINITY, &p), 4.0);
        assert_eq!(update_regularization(1e-12, 0.99, &p), 1e-12); // floor
    }

    #[test]
    fn ratio_simple_cases() {
        assert_eq!(tr_ratio(2.0, 2.0, 1.0, 3.0), Some(0.0));
        assert_eq!(tr_ratio(1.0, 3.0, 1.0, 3.0), Some(1.0));
        assert_eq!(tr_ratio(1.0, 3.0, 3.0, 3.0), None); // stagnant model
    }

    #[test]
    fn model_value_at_anchor_is_pure_quadratic() {
        let g = Grid::build(
            Domain::new(&[(-4.0, 4.0)], BoundaryKind::Dirichlet).unwrap(),
            &[8],
        )
        .unwrap();
        let p = DiscreteProblem::sine_spectral(
            g,
            Potential::Harmonic { gammas: vec![1.0] },
            5.0,
        )
        .unwrap();
        let x = crate::init::initial_state(&crate::init::InitKind::ThomasFermi, &p).unwrap();
        let model = NewtonModel::new(&p, x.as_slice(), 0.3);
        let mut hx = vec![0.0; x.len()];
        p.apply_h(x.as_slice(), &mut hx);
        let expect = field::re_dot(x.as_slice(), &hx);
        assert!((model.value(x.as_slice()) - expect).abs() < 1e-13);
    }

    #[test]
    fn model_gradient_at_anchor_equals_energy_gradient() {
        let g = Grid::build(
            Domain::new(&[(-4.0, 4.0)], BoundaryKind::Dirichlet).unwrap(),
            &[8],
        )
        .unwrap();
        let p = DiscreteProblem::sine_spectral(
            g,
            Potential::Harmonic { gammas: vec![1.0] },
            5.0,
        )
        .unwrap();
        let x = crate::init::initial_state(&crate::init::InitKind::ThomasFermi, &p).unwrap();
        let model = NewtonModel::new(&p, x.as_slice(), 0.7);
        let gm = model.gradient(x.as_slice());
        let (_, ge) = p.evaluate(&x).unwrap();
        for (a, b) in gm.iter().zip(&ge) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn prolong_constant_periodic_state() {
        let d = Domain::new(&[(-2.0, 2.0), (-2.0, 2.0)], BoundaryKind::Periodic).unwrap();
        let g = Grid::build(d, &[8, 8]).unwrap();
        let f = g.refine();
        let c = Complex64::new(1.0 / 8.0, 0.0);
        let x = StateVector::new(vec![c; 64]).unwrap();
        let y = prolong(&x, &g, &f, Flavor::FourierSpectral).unwrap();
        let expect = 1.0 / 16.0;
        for &v in y.as_slice() {
            assert!((v - Complex64::new(expect, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn prolong_single_sine_mode_is_exact() {
        let d = Domain::new(&[(0.0, 4.0)], BoundaryKind::Dirichlet).unwrap();
        let g = Grid::build(d, &[8]).unwrap();
        let fgrid = g.refine();
        let raw: Vec<f64> = g
            .node_coordinates(0)
            .iter()
            .map(|&x| (std::f64::consts::PI * x / 4.0).sin())
            .collect();
        let x = StateVector::normalized(raw).unwrap();
        let y = prolong(&x, &g, &fgrid, Flavor::SineSpectral).unwrap();
        let fine_raw: Vec<f64> = fgrid
            .node_coordinates(0)
            .iter()
            .map(|&x| (std::f64::consts::PI * x / 4.0).sin())
            .collect();
        let fine = StateVector::normalized(fine_raw).unwrap();
        assert!(field::inf_norm_diff(y.as_slice(), fine.as_slice()) < 1e-13);
    }

    #[test]
    fn prolong_rejects_mismatched_grids() {
        let d = Domain::new(&[(0.0, 4.0)], BoundaryKind::Dirichlet).unwrap();
        let g = Grid::build(d.clone(), &[8]).unwrap();
        let other = Grid::build(d, &[24]).unwrap();
        let x = StateVector::normalized(vec![1.0; 7]).unwrap();
        assert!(prolong(&x, &g, &other, Flavor::SineSpectral).is_err());
    }
}
