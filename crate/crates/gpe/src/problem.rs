//! Discretized Gross-Pitaevskii energy functionals.
//!
//! All three spatial discretizations reduce to the same algebraic shape.
//! With `Phi` the grid function, `v` the potential samples and `H` the
//! flavor-specific Hermitian operator `-(1/2)Laplacian + V - Omega L_z`,
//! the discrete energy and its gradient are
//!
//! ```text
//! E_h(Phi) = vol * ( <Phi, H Phi> + (beta/2) sum_j |phi_j|^4 ),
//! G_h(Phi) = 2 vol * ( H Phi + beta |Phi|^2 Phi ),
//! ```
//!
//! where `vol` is the cell volume and `<.,.>` the Euclidean inner product
//! over the unknowns. Rescaling to `X = sqrt(vol) * Phi` turns the
//! weighted constraint `|Phi|_h = 1` into the plain unit sphere
//! `|X|_2 = 1` and the energy into the unified objective
//!
//! ```text
//! F(X) = <X, H X> + alpha * sum_j |X_j|^4,      alpha = beta / (2 vol),
//! grad F(X) = 2 H X + 4 alpha |X|^2 X,
//! ```
//!
//! with directional derivatives `Re(D^* grad F)`. The solvers operate
//! exclusively on this form.
//!
//! `H` is applied matrix-free: a 3/5/7-point stencil for the finite
//! difference flavor, and dimension-by-dimension fast transforms for the
//! sine and Fourier flavors. No matrix is ever assembled outside of test
//! oracles.

use std::cell::RefCell;
use std::marker::PhantomData;

use ndarray::{ArrayView, ArrayViewMut, Axis, IxDyn, Zip};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{self, Field};
use crate::grid::{BoundaryKind, Grid};
use crate::potential::Potential;
use crate::transforms::{FourierTransform, SineTransform};

/// Spatial discretization flavor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    /// Second-order finite differences, Dirichlet boundary.
    FiniteDifference,
    /// Sine pseudospectral, Dirichlet boundary.
    SineSpectral,
    /// Fourier pseudospectral, periodic boundary; the only flavor that
    /// supports rotation.
    FourierSpectral,
}

impl Flavor {
    /// CLI/file tag of the flavor.
    pub fn tag(self) -> &'static str {
        match self {
            Flavor::FiniteDifference => "fd",
            Flavor::SineSpectral => "sp",
            Flavor::FourierSpectral => "fp",
        }
    }
}

/// A unit-norm coefficient vector on the discrete sphere,
/// `X = sqrt(cell volume) * Phi`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T: Field> {
    data: Vec<T>,
}

impl<T: Field> StateVector<T> {
    /// Largest accepted `| |X|_2^2 - 1 |` when adopting a vector as-is.
    pub const NORM_TOLERANCE: f64 = 1e-10;

    /// Adopts a vector that is already unit norm to within
    /// [`Self::NORM_TOLERANCE`].
    pub fn new(data: Vec<T>) -> Result<Self> {
        let err = (field::norm_sqr(&data) - 1.0).abs();
        if !err.is_finite() || err > Self::NORM_TOLERANCE {
            return Err(Error::Normalization {
                norm_error: err,
                tolerance: Self::NORM_TOLERANCE,
            });
        }
        Ok(Self { data })
    }

    /// Rescales a vector to unit norm.
    pub fn normalized(mut data: Vec<T>) -> Result<Self> {
        let n = field::norm(&data);
        if !n.is_finite() || n == 0.0 {
            return Err(Error::Normalization {
                norm_error: f64::INFINITY,
                tolerance: Self::NORM_TOLERANCE,
            });
        }
        field::scale_in_place(&mut data, 1.0 / n);
        Ok(Self { data })
    }

    /// Entries of the state.
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    /// Number of entries.
    pub fn len(&self) -> usize {
        self.data.len()
    }

    /// True for the empty state (never produced by constructors).
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// `| |X|_2^2 - 1 |`.
    pub fn norm_error(&self) -> f64 {
        (field::norm_sqr(&self.data) - 1.0).abs()
    }

    /// Consumes the state, returning its entries.
    pub fn into_inner(self) -> Vec<T> {
        self.data
    }
}

/// An objective `F` over vectors in `C^M` (or `R^M`) with gradient in the
/// `Re(D^* G)` convention. Implemented by [`DiscreteProblem`] and by the
/// regularized Newton model.
pub trait Objective<T: Field>: Sync {
    /// Number of unknowns.
    fn len(&self) -> usize;
    /// Writes the gradient into `grad` and returns the value. Defined on
    /// all of space, not just the unit sphere.
    fn value_grad(&self, x: &[T], grad: &mut [T]) -> f64;
}

struct SineAxis {
    transform: SineTransform,
    /// Per-mode factor `(2/N) * lambda_l^2 / 2`, folding the forward
    /// normalization into the kinetic symbol.
    kinetic: Vec<f64>,
}

struct FourierAxis {
    transform: FourierTransform,
    /// `lambda_p^2 / 2` in FFT index order.
    kinetic: Vec<f64>,
    /// `lambda_p` in FFT index order.
    freq: Vec<f64>,
    /// Rotation weight of each lane along this axis (signed Omega times
    /// the companion coordinate), in row-major order of the remaining
    /// axes. All zeros without rotation.
    lane_weights: Vec<f64>,
}

enum Operator {
    FiniteDifference,
    Sine(Vec<SineAxis>),
    Fourier(Vec<FourierAxis>),
}

/// A discretized energy functional: grid, flavor, interaction strength
/// `beta`, angular velocity `omega` and cached potential samples.
///
/// The scalar type is `f64` for the real flavors (finite difference,
/// sine) and [`Complex64`] for the Fourier flavor.
pub struct DiscreteProblem<T: Field> {
    grid: Grid,
    flavor: Flavor,
    beta: f64,
    omega: f64,
    potential: Potential,
    v: Vec<f64>,
    alpha: f64,
    op: Operator,
    _field: PhantomData<T>,
}

impl DiscreteProblem<f64> {
    /// Finite difference discretization on a Dirichlet grid.
    pub fn finite_difference(grid: Grid, potential: Potential, beta: f64) -> Result<Self> {
        if grid.domain().bc() != BoundaryKind::Dirichlet {
            return Err(Error::Config(
                "finite differences require a Dirichlet grid".into(),
            ));
        }
        Self::build(grid, Flavor::FiniteDifference, potential, beta, 0.0)
    }

    /// Sine pseudospectral discretization on a Dirichlet grid with even
    /// interval counts.
    pub fn sine_spectral(grid: Grid, potential: Potential, beta: f64) -> Result<Self> {
        if grid.domain().bc() != BoundaryKind::Dirichlet {
            return Err(Error::Config(
                "the sine pseudospectral flavor requires a Dirichlet grid".into(),
            ));
        }
        for d in 0..grid.dim() {
            if grid.intervals(d) % 2 != 0 {
                return Err(Error::Config(format!(
                    "the sine pseudospectral flavor requires even interval counts, \
                     got {} along dimension {d}",
                    grid.intervals(d)
                )));
            }
        }
        Self::build(grid, Flavor::SineSpectral, potential, beta, 0.0)
    }
}

impl DiscreteProblem<Complex64> {
    /// Fourier pseudospectral discretization on a periodic grid,
    /// optionally rotating with angular velocity `omega` about the z-axis.
    pub fn fourier_spectral(
        grid: Grid,
        potential: Potential,
        beta: f64,
        omega: f64,
    ) -> Result<Self> {
        if grid.domain().bc() != BoundaryKind::Periodic {
            return Err(Error::Config(
                "the Fourier pseudospectral flavor requires a periodic grid".into(),
            ));
        }
        if omega != 0.0 && grid.dim() < 2 {
            return Err(Error::Config(
                "rotation requires a 2D or 3D domain".into(),
            ));
        }
        Self::build(grid, Flavor::FourierSpectral, potential, beta, omega)
    }
}

impl<T: Field> DiscreteProblem<T> {
    fn build(
        grid: Grid,
        flavor: Flavor,
        potential: Potential,
        beta: f64,
        omega: f64,
    ) -> Result<Self> {
        let v = potential.sample(&grid)?;
        let alpha = beta / (2.0 * grid.cell_volume());
        let op = match flavor {
            Flavor::FiniteDifference => Operator::FiniteDifference,
            Flavor::SineSpectral => {
                let axes = (0..grid.dim())
                    .map(|d| {
                        let t = SineTransform::new(grid.intervals(d), grid.domain().extent(d));
                        let s = 2.0 / grid.intervals(d) as f64;
                        let kinetic = t
                            .eigenvalues()
                            .iter()
                            .map(|&l| s * 0.5 * l * l)
                            .collect();
                        SineAxis {
                            transform: t,
                            kinetic,
                        }
                    })
                    .collect();
                Operator::Sine(axes)
            }
            Flavor::FourierSpectral => {
                let axes = (0..grid.dim())
                    .map(|d| {
                        let t = FourierTransform::new(grid.intervals(d), grid.domain().extent(d));
                        let freq = t.frequencies();
                        let kinetic = freq.iter().map(|&l| 0.5 * l * l).collect();
                        // L_z couples the x-modes to +Omega*y and the
                        // y-modes to -Omega*x.
                        let coupling = match (omega != 0.0, d) {
                            (true, 0) => Some((omega, 1)),
                            (true, 1) => Some((-omega, 0)),
                            _ => None,
                        };
                        FourierAxis {
                            lane_weights: lane_weights(&grid, d, coupling),
                            transform: t,
                            kinetic,
                            freq,
                        }
                    })
                    .collect();
                Operator::Fourier(axes)
            }
        };
        Ok(Self {
            grid,
            flavor,
            beta,
            omega,
            potential,
            v,
            alpha,
            op,
            _field: PhantomData,
        })
    }

    /// The grid the problem is discretized on.
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Discretization flavor.
    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    /// Interaction strength `beta`.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Angular velocity `Omega`.
    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// The trapping potential.
    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    /// Cached potential samples at the grid unknowns.
    pub fn potential_samples(&self) -> &[f64] {
        &self.v
    }

    /// Quartic coefficient `alpha = beta / (2 vol)` of the unified
    /// objective.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Number of unknowns `M`.
    pub fn unknowns(&self) -> usize {
        self.grid.len()
    }

    /// Whether states carry an imaginary part.
    pub fn is_complex(&self) -> bool {
        T::IS_COMPLEX
    }

    /// Applies the Hermitian operator `H = -(1/2)Laplacian + V - Omega L_z`
    /// to `x`, writing into `out`. Scaling-free: the same operator serves
    /// grid functions and rescaled states.
    pub fn apply_h(&self, x: &[T], out: &mut [T]) {
        assert_eq!(x.len(), self.unknowns());
        assert_eq!(out.len(), self.unknowns());
        for ((o, &xi), &vi) in out.iter_mut().zip(x).zip(&self.v) {
            *o = xi.scale(vi);
        }
        let shape = self.grid.shape();
        let xs = ArrayView::from_shape(IxDyn(&shape), x).expect("shape matches length");
        let mut os = ArrayViewMut::from_shape(IxDyn(&shape), out).expect("shape matches length");
        match &self.op {
            Operator::FiniteDifference => {
                for d in 0..self.grid.dim() {
                    let inv2 = 1.0 / (2.0 * self.grid.spacing(d) * self.grid.spacing(d));
                    Zip::from(os.lanes_mut(Axis(d)))
                        .and(xs.lanes(Axis(d)))
                        .par_for_each(|mut ol, xl| {
                            let m = xl.len();
                            for j in 0..m {
                                let left = if j > 0 { xl[j - 1] } else { T::ZERO };
                                let right = if j + 1 < m { xl[j + 1] } else { T::ZERO };
                                let lap = xl[j].scale(2.0).sub(left).sub(right);
                                ol[j] = ol[j].add(lap.scale(inv2));
                            }
                        });
                }
            }
            Operator::Sine(axes) => {
                for (d, ax) in axes.iter().enumerate() {
                    let m = ax.transform.intervals() - 1;
                    let need = m + ax.transform.scratch_len();
                    Zip::from(os.lanes_mut(Axis(d)))
                        .and(xs.lanes(Axis(d)))
                        .par_for_each(|mut ol, xl| {
                            with_scratch(need, |s| {
                                let (vals, rest) = s.split_at_mut(m);
                                for (v, &xj) in vals.iter_mut().zip(xl.iter()) {
                                    *v = xj.to_complex();
                                }
                                ax.transform.sine_sum_complex(vals, rest);
                                for (v, &k) in vals.iter_mut().zip(&ax.kinetic) {
                                    *v *= k;
                                }
                                ax.transform.sine_sum_complex(vals, rest);
                                for (o, &v) in ol.iter_mut().zip(vals.iter()) {
                                    *o = o.add(T::from_complex_lossy(v));
                                }
                            });
                        });
                }
            }
            Operator::Fourier(axes) => {
                for (d, ax) in axes.iter().enumerate() {
                    let n = ax.transform.len();
                    let need = n + ax.transform.scratch_len();
                    let mut lane_shape = shape.clone();
                    lane_shape.remove(d);
                    let ws = ArrayView::from_shape(IxDyn(&lane_shape), &ax.lane_weights)
                        .expect("one weight per lane");
                    Zip::from(os.lanes_mut(Axis(d)))
                        .and(xs.lanes(Axis(d)))
                        .and(ws)
                        .par_for_each(|mut ol, xl, &w| {
                            with_scratch(need, |s| {
                                let (vals, rest) = s.split_at_mut(n);
                                for (v, &xj) in vals.iter_mut().zip(xl.iter()) {
                                    *v = xj.to_complex();
                                }
                                ax.transform.forward_in_place(vals, rest);
                                for i in 0..n {
                                    vals[i] *= ax.kinetic[i] + w * ax.freq[i];
                                }
                                ax.transform.inverse_in_place(vals, rest);
                                for (o, &v) in ol.iter_mut().zip(vals.iter()) {
                                    *o = o.add(T::from_complex_lossy(v));
                                }
                            });
                        });
                }
            }
        }
    }

    /// Discrete energy `E_h(Phi)` of a grid function.
    pub fn energy(&self, phi: &[T]) -> f64 {
        let mut h = vec![T::ZERO; phi.len()];
        self.apply_h(phi, &mut h);
        let quad = field::re_dot(phi, &h);
        let quart: f64 = phi.iter().map(|&p| {
            let a = p.abs_sqr();
            a * a
        }).sum();
        self.grid.cell_volume() * (quad + 0.5 * self.beta * quart)
    }

    /// Gradient `G_h = 2 vol (H Phi + beta |Phi|^2 Phi)` of the discrete
    /// energy with respect to the grid function, in the `Re(D^* G)`
    /// convention.
    pub fn energy_gradient(&self, phi: &[T]) -> Vec<T> {
        let mut h = vec![T::ZERO; phi.len()];
        self.apply_h(phi, &mut h);
        let s = 2.0 * self.grid.cell_volume();
        h.iter()
            .zip(phi)
            .map(|(&hj, &pj)| hj.add(pj.scale(self.beta * pj.abs_sqr())).scale(s))
            .collect()
    }

    /// Rescales a grid function with unit weighted norm into a unit-norm
    /// state `X = sqrt(vol) * Phi`, returning the state and the quartic
    /// coefficient `alpha`.
    pub fn to_unified(&self, phi: &[T]) -> Result<(StateVector<T>, f64)> {
        let s = self.grid.cell_volume().sqrt();
        let x: Vec<T> = phi.iter().map(|&p| p.scale(s)).collect();
        Ok((StateVector::new(x)?, self.alpha))
    }

    /// Recovers a grid function `Phi = X / sqrt(vol)` from a state.
    pub fn from_unified(&self, x: &StateVector<T>) -> Vec<T> {
        let s = 1.0 / self.grid.cell_volume().sqrt();
        x.as_slice().iter().map(|&v| v.scale(s)).collect()
    }

    /// Evaluates the unified objective and its gradient at a state, with
    /// a shared transform pass. Fails on non-finite results.
    pub fn evaluate(&self, x: &StateVector<T>) -> Result<(f64, Vec<T>)> {
        let mut g = vec![T::ZERO; x.len()];
        let f = self.value_grad(x.as_slice(), &mut g);
        if !f.is_finite() {
            let max_abs = x
                .as_slice()
                .iter()
                .map(|v| v.abs_sqr().sqrt())
                .fold(0.0, f64::max);
            return Err(Error::NumericalOverflow {
                iteration: 0,
                energy: f,
                max_abs,
            });
        }
        Ok((f, g))
    }

    /// Chemical potential `mu = F + alpha sum_j |X_j|^4`, the Lagrange
    /// multiplier of the norm constraint.
    pub fn chemical_potential(&self, x: &StateVector<T>) -> f64 {
        let mut g = vec![T::ZERO; x.len()];
        let f = self.value_grad(x.as_slice(), &mut g);
        f + self.alpha * quartic_sum(x.as_slice())
    }
}

impl<T: Field> Objective<T> for DiscreteProblem<T> {
    fn len(&self) -> usize {
        self.unknowns()
    }

    fn value_grad(&self, x: &[T], grad: &mut [T]) -> f64 {
        self.apply_h(x, grad);
        let quad = field::re_dot(x, grad);
        let quart = quartic_sum(x);
        for (g, &xj) in grad.iter_mut().zip(x) {
            *g = g.scale(2.0).add(xj.scale(4.0 * self.alpha * xj.abs_sqr()));
        }
        quad + self.alpha * quart
    }
}

/// Rotation weight of every transform lane along `axis`: zero without
/// coupling, otherwise the signed angular velocity times the coordinate
/// of the companion axis, laid out in row-major order of the remaining
/// axes.
fn lane_weights(grid: &Grid, axis: usize, coupling: Option<(f64, usize)>) -> Vec<f64> {
    let shape = grid.shape();
    let lanes: usize = shape
        .iter()
        .enumerate()
        .filter(|&(d, _)| d != axis)
        .map(|(_, &n)| n)
        .product();
    let Some((sign, companion)) = coupling else {
        return vec![0.0; lanes];
    };
    let coords = grid.node_coordinates(companion);
    let pos = if companion < axis { companion } else { companion - 1 };
    let remaining: Vec<usize> = shape
        .iter()
        .enumerate()
        .filter(|&(d, _)| d != axis)
        .map(|(_, &n)| n)
        .collect();
    let stride: usize = remaining[pos + 1..].iter().product();
    (0..lanes)
        .map(|l| sign * coords[(l / stride) % remaining[pos]])
        .collect()
}

/// `sum_j |x_j|^4`.
pub(crate) fn quartic_sum<T: Field>(x: &[T]) -> f64 {
    crate::field::block_sum(x.len(), |j| {
        let a = x[j].abs_sqr();
        a * a
    })
}

thread_local! {
    static SCRATCH: RefCell<Vec<Complex64>> = const { RefCell::new(Vec::new()) };
}

fn with_scratch<R>(len: usize, f: impl FnOnce(&mut [Complex64]) -> R) -> R {
    SCRATCH.with(|cell| {
        let mut buf = cell.borrow_mut();
        if buf.len() < len {
            buf.resize(len, Complex64::new(0.0, 0.0));
        }
        f(&mut buf[..len])
    })
}
