//! Physical observables of a computed state.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{self, Field};
use crate::problem::{quartic_sum, DiscreteProblem, StateVector};

/// Root-mean-square width along `axis`:
/// `sqrt( sum_j vol * coord_j^2 |phi_j|^2 ) = sqrt( sum_j coord_j^2 |X_j|^2 )`.
pub fn rms<T: Field>(p: &DiscreteProblem<T>, x: &StateVector<T>, axis: usize) -> Result<f64> {
    if axis >= p.grid().dim() {
        return Err(Error::Config(format!(
            "rms axis {axis} out of range for a {}D problem",
            p.grid().dim()
        )));
    }
    let mut acc = 0.0;
    for (flat, &v) in x.as_slice().iter().enumerate() {
        let c = p.grid().axis_coordinate(axis, flat);
        acc += c * c * v.abs_sqr();
    }
    Ok(acc.sqrt())
}

/// Density `|phi_j|^2 = |X_j|^2 / vol` in grid-function scaling; its
/// weighted sum over the grid is 1 for a unit-norm state.
pub fn density<T: Field>(p: &DiscreteProblem<T>, x: &StateVector<T>) -> Vec<f64> {
    let inv_vol = 1.0 / p.grid().cell_volume();
    x.as_slice().iter().map(|&v| v.abs_sqr() * inv_vol).collect()
}

/// `max_j |phi_j|^2`.
pub fn max_density<T: Field>(p: &DiscreteProblem<T>, x: &StateVector<T>) -> f64 {
    density(p, x).into_iter().fold(0.0, f64::max)
}

/// Result of a sampled second-order stationarity probe.
#[derive(Debug, Clone)]
pub struct ProbeReport {
    /// Lagrange multiplier `theta = Re(X^* G)` at the probed state.
    pub theta: f64,
    /// Minimum sampled curvature `Hess F[D,D] - theta D^* D` over unit
    /// tangent directions.
    pub min_curvature: f64,
    /// Number of sampled directions.
    pub directions: usize,
    /// RNG seed used to draw the directions.
    pub seed: u64,
}

/// Curvature `Hess F(X)[D,D] - theta D^* D` of the constrained problem
/// along a direction.
pub fn curvature_along<T: Field>(
    p: &DiscreteProblem<T>,
    x: &StateVector<T>,
    theta: f64,
    dir: &[T],
) -> f64 {
    let mut hd = vec![T::ZERO; dir.len()];
    p.apply_h(dir, &mut hd);
    let mut quartic = 0.0;
    for (&xj, &dj) in x.as_slice().iter().zip(dir) {
        let rj = xj.re_inner(dj);
        quartic += xj.abs_sqr() * dj.abs_sqr() + 2.0 * rj * rj;
    }
    2.0 * field::re_dot(dir, &hd) + 4.0 * p.alpha() * quartic - theta * field::norm_sqr(dir)
}

/// Samples `n_dirs` random unit tangent directions (`X^* D = 0`) with a
/// fixed seed and reports the minimum curvature. A second-order point
/// satisfies `min >= 0` up to roundoff; a converged ground state is
/// expected to report `min >= -1e-6`.
pub fn second_order_probe<T: Field>(
    p: &DiscreteProblem<T>,
    x: &StateVector<T>,
    n_dirs: usize,
    seed: u64,
) -> Result<ProbeReport> {
    let (_, g) = p.evaluate(x)?;
    let theta = field::re_dot(x.as_slice(), &g);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_curv = f64::INFINITY;
    for _ in 0..n_dirs {
        let mut d: Vec<T> = (0..x.len())
            .map(|_| {
                let re: f64 = rng.gen_range(-1.0..1.0);
                if T::IS_COMPLEX {
                    let im: f64 = rng.gen_range(-1.0..1.0);
                    T::from_complex_lossy(num_complex::Complex64::new(re, im))
                } else {
                    T::from_re(re)
                }
            })
            .collect();
        // project onto the tangent set X^* D = 0
        let ip = field::cdot(x.as_slice(), &d);
        for (dj, &xj) in d.iter_mut().zip(x.as_slice()) {
            *dj = dj.sub(xj.mul_c(ip));
        }
        let n = field::norm(&d);
        if n == 0.0 {
            continue;
        }
        field::scale_in_place(&mut d, 1.0 / n);
        min_curv = min_curv.min(curvature_along(p, x, theta, &d));
    }
    Ok(ProbeReport {
        theta,
        min_curvature: min_curv,
        directions: n_dirs,
        seed,
    })
}

/// Fills the observable fields of a report from a converged state.
pub(crate) fn observables_into_report<T: Field>(
    p: &DiscreteProblem<T>,
    x: &StateVector<T>,
    energy: f64,
    report: &mut crate::report::SolveReport,
) {
    report.energy = energy;
    report.chemical_potential = energy + p.alpha() * quartic_sum(x.as_slice());
    report.rms = (0..p.grid().dim())
        .map(|a| rms(p, x, a).expect("axis in range"))
        .collect();
    report.max_density = max_density(p, x);
}
