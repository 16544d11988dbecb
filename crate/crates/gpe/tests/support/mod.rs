//! Shared helpers for the oracle test suites: slow reference transforms,
//! dense operator assemblies and finite-difference derivatives. Everything
//! here is written directly from the defining formulas, independent of the
//! fast paths it checks.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gpe::field::{self, Field};
use gpe::grid::Grid;
use gpe::problem::{DiscreteProblem, Objective};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_real(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

pub fn random_complex(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

pub fn random_unit<T: Field>(rng: &mut ChaCha8Rng, n: usize) -> Vec<T> {
    let mut v: Vec<T> = (0..n)
        .map(|_| {
            let re = rng.gen_range(-1.0..1.0);
            if T::IS_COMPLEX {
                T::from_complex_lossy(Complex64::new(re, rng.gen_range(-1.0..1.0)))
            } else {
                T::from_re(re)
            }
        })
        .collect();
    let nrm = field::norm(&v);
    field::scale_in_place(&mut v, 1.0 / nrm);
    v
}

/// O(N^2) sine transform: `(2/N) sum_j phi_j sin(j l pi / N)`.
pub fn slow_dst_forward(phi: &[f64], n: usize) -> Vec<f64> {
    (1..n)
        .map(|l| {
            let s: f64 = phi
                .iter()
                .enumerate()
                .map(|(idx, &p)| {
                    let j = idx + 1;
                    p * (j as f64 * l as f64 * std::f64::consts::PI / n as f64).sin()
                })
                .sum();
            2.0 / n as f64 * s
        })
        .collect()
}

/// O(N^2) inverse sine transform: `sum_l c_l sin(j l pi / N)`.
pub fn slow_dst_inverse(coeff: &[f64], n: usize) -> Vec<f64> {
    (1..n)
        .map(|j| {
            coeff
                .iter()
                .enumerate()
                .map(|(idx, &c)| {
                    let l = idx + 1;
                    c * (j as f64 * l as f64 * std::f64::consts::PI / n as f64).sin()
                })
                .sum()
        })
        .collect()
}

/// O(N^2) Fourier transform with the 1/N factor, FFT index order.
pub fn slow_dft_forward(vals: &[Complex64]) -> Vec<Complex64> {
    let n = vals.len();
    (0..n)
        .map(|p| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, &v) in vals.iter().enumerate() {
                let arg = -2.0 * std::f64::consts::PI * (j * p) as f64 / n as f64;
                acc += v * Complex64::new(0.0, arg).exp();
            }
            acc / n as f64
        })
        .collect()
}

/// O(N^2) inverse Fourier transform, no normalization factor.
pub fn slow_dft_inverse(coeff: &[Complex64]) -> Vec<Complex64> {
    let n = coeff.len();
    (0..n)
        .map(|j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (p, &c) in coeff.iter().enumerate() {
                let arg = 2.0 * std::f64::consts::PI * (j * p) as f64 / n as f64;
                acc += c * Complex64::new(0.0, arg).exp();
            }
            acc
        })
        .collect()
}

/// Dense 1D finite difference operator `A = -(1/2) D2 + V` assembled from
/// the tridiagonal stencil.
pub fn dense_fd_matrix_1d(grid: &Grid, v: &[f64]) -> DMatrix<f64> {
    let m = grid.len();
    let h = grid.spacing(0);
    let mut a = DMatrix::zeros(m, m);
    for j in 0..m {
        a[(j, j)] = 1.0 / (h * h) + v[j];
        if j + 1 < m {
            a[(j, j + 1)] = -0.5 / (h * h);
            a[(j + 1, j)] = -0.5 / (h * h);
        }
    }
    a
}

/// Dense 2D finite difference operator as the dimension-wise sum of 1D
/// stencils plus the potential diagonal.
pub fn dense_fd_matrix_2d(grid: &Grid, v: &[f64]) -> DMatrix<f64> {
    let (m0, m1) = (grid.unknowns(0), grid.unknowns(1));
    let m = m0 * m1;
    let (h0, h1) = (grid.spacing(0), grid.spacing(1));
    let mut a = DMatrix::zeros(m, m);
    let idx = |j: usize, k: usize| j * m1 + k;
    for j in 0..m0 {
        for k in 0..m1 {
            let row = idx(j, k);
            a[(row, row)] = 1.0 / (h0 * h0) + 1.0 / (h1 * h1) + v[row];
            if j + 1 < m0 {
                a[(row, idx(j + 1, k))] = -0.5 / (h0 * h0);
                a[(idx(j + 1, k), row)] = -0.5 / (h0 * h0);
            }
            if k + 1 < m1 {
                a[(row, idx(j, k + 1))] = -0.5 / (h1 * h1);
                a[(idx(j, k + 1), row)] = -0.5 / (h1 * h1);
            }
        }
    }
    a
}

/// Dense 1D sine pseudospectral operator `B = (1/N) C Lambda C + V` with
/// `C_jl = sin(j l pi / N)` and `Lambda_ll = (pi l / (b-a))^2`.
pub fn dense_sp_matrix_1d(grid: &Grid, v: &[f64]) -> DMatrix<f64> {
    let n = grid.intervals(0);
    let m = n - 1;
    let extent = grid.domain().extent(0);
    let c = DMatrix::from_fn(m, m, |j, l| {
        (((j + 1) * (l + 1)) as f64 * std::f64::consts::PI / n as f64).sin()
    });
    let lambda = DMatrix::from_fn(m, m, |j, l| {
        if j == l {
            let lam = std::f64::consts::PI * (l + 1) as f64 / extent;
            lam * lam
        } else {
            0.0
        }
    });
    let mut b = &c * lambda * &c / n as f64;
    for j in 0..m {
        b[(j, j)] += v[j];
    }
    b
}

/// Direct evaluation of the 2D Fourier pseudospectral energy: spectral
/// sums per dimension (with the slow transforms) plus pointwise potential
/// and quartic terms, uniform weights `h1 h2` over `j,k = 0..N-1`.
pub fn fp_energy_brute_2d(
    grid: &Grid,
    v: &[f64],
    beta: f64,
    omega: f64,
    phi: &[Complex64],
) -> f64 {
    let (n1, n2) = (grid.intervals(0), grid.intervals(1));
    let vol = grid.cell_volume();
    let xs = grid.node_coordinates(0);
    let ys = grid.node_coordinates(1);
    let ext1 = grid.domain().extent(0);
    let ext2 = grid.domain().extent(1);
    let freq = |i: usize, n: usize, ext: f64| {
        let p = if i < n / 2 { i as i64 } else { i as i64 - n as i64 };
        2.0 * std::f64::consts::PI * p as f64 / ext
    };
    let mut kinetic = 0.0;
    // transform in x for every fixed k
    for k in 0..n2 {
        let line: Vec<Complex64> = (0..n1).map(|j| phi[j * n2 + k]).collect();
        let coeff = slow_dft_forward(&line);
        for (i, &c) in coeff.iter().enumerate() {
            let lam = freq(i, n1, ext1);
            kinetic += n1 as f64 * (0.5 * lam * lam + ys[k] * lam * omega) * c.norm_sqr();
        }
    }
    // transform in y for every fixed j
    for j in 0..n1 {
        let line: Vec<Complex64> = (0..n2).map(|k| phi[j * n2 + k]).collect();
        let coeff = slow_dft_forward(&line);
        for (i, &c) in coeff.iter().enumerate() {
            let eta = freq(i, n2, ext2);
            kinetic += n2 as f64 * (0.5 * eta * eta - xs[j] * eta * omega) * c.norm_sqr();
        }
    }
    let pointwise: f64 = phi
        .iter()
        .zip(v)
        .map(|(&p, &vj)| vj * p.norm_sqr() + 0.5 * beta * p.norm_sqr() * p.norm_sqr())
        .sum();
    vol * (kinetic + pointwise)
}

/// Dense Hermitian matrix of the unified quadratic operator `A = 2H`,
/// assembled column by column through `apply_h` (the operator is
/// complex-linear, so real basis vectors determine every column).
pub fn dense_unified_operator<T: Field>(p: &DiscreteProblem<T>) -> DMatrix<Complex64> {
    let m = p.unknowns();
    let mut a = DMatrix::zeros(m, m);
    for col in 0..m {
        let mut e = vec![T::ZERO; m];
        e[col] = T::from_re(1.0);
        let mut h = vec![T::ZERO; m];
        p.apply_h(&e, &mut h);
        for row in 0..m {
            a[(row, col)] = h[row].to_complex() * 2.0;
        }
    }
    a
}

/// Central finite difference of an objective along a direction.
pub fn directional_difference<T: Field, O: Objective<T>>(
    obj: &O,
    x: &[T],
    d: &[T],
    eps: f64,
) -> f64 {
    let mut plus = x.to_vec();
    let mut minus = x.to_vec();
    for j in 0..x.len() {
        plus[j] = plus[j].add(d[j].scale(eps));
        minus[j] = minus[j].sub(d[j].scale(eps));
    }
    let mut scratch = vec![T::ZERO; x.len()];
    let fp = obj.value_grad(&plus, &mut scratch);
    let fm = obj.value_grad(&minus, &mut scratch);
    (fp - fm) / (2.0 * eps)
}

/// Second central difference `(F(x+eps d) - 2 F(x) + F(x-eps d)) / eps^2`.
pub fn second_directional_difference<T: Field, O: Objective<T>>(
    obj: &O,
    x: &[T],
    d: &[T],
    eps: f64,
) -> f64 {
    let mut plus = x.to_vec();
    let mut minus = x.to_vec();
    for j in 0..x.len() {
        plus[j] = plus[j].add(d[j].scale(eps));
        minus[j] = minus[j].sub(d[j].scale(eps));
    }
    let mut scratch = vec![T::ZERO; x.len()];
    let fp = obj.value_grad(&plus, &mut scratch);
    let f0 = obj.value_grad(x, &mut scratch);
    let fm = obj.value_grad(&minus, &mut scratch);
    (fp - 2.0 * f0 + fm) / (eps * eps)
}

/// Relative agreement of the analytic directional derivative with its
/// central-difference estimate.
pub fn gradient_check<T: Field, O: Objective<T>>(
    obj: &O,
    x: &[T],
    dirs: usize,
    seed: u64,
) -> f64 {
    let mut r = rng(seed);
    let mut grad = vec![T::ZERO; x.len()];
    obj.value_grad(x, &mut grad);
    let mut worst: f64 = 0.0;
    for _ in 0..dirs {
        let d: Vec<T> = random_unit(&mut r, x.len());
        let analytic = field::re_dot(&d, &grad);
        let numeric = directional_difference(obj, x, &d, 1e-5);
        worst = worst.max((analytic - numeric).abs() / analytic.abs().max(1.0));
    }
    worst
}
