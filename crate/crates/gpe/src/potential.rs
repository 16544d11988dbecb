//! Trapping potentials.

use crate::error::{Error, Result};
use crate::grid::Grid;

/// External trapping potential `V(x)`, dimensionless.
#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    /// Harmonic trap `V = (1/2) sum_i gamma_i^2 x_i^2`.
    Harmonic { gammas: Vec<f64> },
    /// Harmonic trap plus an optical lattice,
    /// `V = (1/2) sum_i gamma_i^2 x_i^2 + A sum_i sin^2(pi x_i / L)`.
    HarmonicLattice {
        gammas: Vec<f64>,
        amplitude: f64,
        period: f64,
    },
    /// Harmonic trap plus a Gaussian stirrer beam,
    /// `V = (1/2)(x^2 + gamma_y^2 y^2 + gamma_z^2 z^2) + w0 exp(-delta((x-r0)^2 + y^2))`.
    HarmonicStirrer {
        gamma_y: f64,
        gamma_z: f64,
        omega0: f64,
        delta: f64,
        r0: f64,
    },
    /// Arbitrary node samples in the grid's row-major unknown order.
    Custom { samples: Vec<f64> },
}

impl Potential {
    /// Evaluates the potential at a point (closed-form kinds only).
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Potential::Harmonic { gammas } => harmonic(gammas, x),
            Potential::HarmonicLattice {
                gammas,
                amplitude,
                period,
            } => {
                let lattice: f64 = x
                    .iter()
                    .map(|&xi| (std::f64::consts::PI * xi / period).sin().powi(2))
                    .sum();
                harmonic(gammas, x) + amplitude * lattice
            }
            Potential::HarmonicStirrer {
                gamma_y,
                gamma_z,
                omega0,
                delta,
                r0,
            } => {
                let mut v = 0.5 * x[0] * x[0];
                if x.len() > 1 {
                    v += 0.5 * gamma_y * gamma_y * x[1] * x[1];
                }
                if x.len() > 2 {
                    v += 0.5 * gamma_z * gamma_z * x[2] * x[2];
                }
                let y = if x.len() > 1 { x[1] } else { 0.0 };
                v + omega0 * (-delta * ((x[0] - r0).powi(2) + y * y)).exp()
            }
            Potential::Custom { .. } => {
                panic!("custom potentials are defined only by their samples")
            }
        }
    }

    /// Samples the potential at every grid unknown.
    pub fn sample(&self, grid: &Grid) -> Result<Vec<f64>> {
        self.validate(grid.dim())?;
        let v = match self {
            Potential::Custom { samples } => {
                if samples.len() != grid.len() {
                    return Err(Error::Config(format!(
                        "custom potential has {} samples, grid has {} unknowns",
                        samples.len(),
                        grid.len()
                    )));
                }
                samples.clone()
            }
            _ => {
                let mut v = vec![0.0; grid.len()];
                grid.for_each_node(|flat, p| v[flat] = self.eval(p));
                v
            }
        };
        if let Some(bad) = v.iter().find(|x| !x.is_finite()) {
            return Err(Error::Config(format!(
                "potential is not finite at a grid node (value {bad})"
            )));
        }
        Ok(v)
    }

    /// Harmonic trap frequencies `(gamma_x, gamma_y, gamma_z)` padded with
    /// ones, as used by the Thomas-Fermi chemical potential.
    pub fn harmonic_gammas(&self, dim: usize) -> Vec<f64> {
        let mut g = vec![1.0; dim];
        match self {
            Potential::Harmonic { gammas } | Potential::HarmonicLattice { gammas, .. } => {
                for (d, &gd) in gammas.iter().take(dim).enumerate() {
                    g[d] = gd;
                }
            }
            Potential::HarmonicStirrer { gamma_y, gamma_z, .. } => {
                if dim > 1 {
                    g[1] = *gamma_y;
                }
                if dim > 2 {
                    g[2] = *gamma_z;
                }
            }
            Potential::Custom { .. } => {}
        }
        g
    }

    fn validate(&self, dim: usize) -> Result<()> {
        match self {
            Potential::Harmonic { gammas } | Potential::HarmonicLattice { gammas, .. } => {
                if gammas.len() != dim {
                    return Err(Error::Config(format!(
                        "potential has {} trap frequencies, grid has {} dimensions",
                        gammas.len(),
                        dim
                    )));
                }
                if gammas.iter().any(|&g| g <= 0.0) {
                    return Err(Error::Config(
                        "harmonic trap frequencies must be positive".into(),
                    ));
                }
                if let Potential::HarmonicLattice { period, .. } = self {
                    if *period <= 0.0 {
                        return Err(Error::Config("lattice period must be positive".into()));
                    }
                }
                Ok(())
            }
            Potential::HarmonicStirrer {
                gamma_y, gamma_z, ..
            } => {
                if *gamma_y <= 0.0 || *gamma_z <= 0.0 {
                    return Err(Error::Config(
                        "harmonic trap frequencies must be positive".into(),
                    ));
                }
                Ok(())
            }
            Potential::Custom { .. } => Ok(()),
        }
    }
}

fn harmonic(gammas: &[f64], x: &[f64]) -> f64 {
    0.5 * gammas
        .iter()
        .zip(x)
        .map(|(&g, &xi)| g * g * xi * xi)
        .sum::<f64>()
}
