//! Initial data for the solvers.
//!
//! For strong repulsion the Thomas-Fermi profile is the standard choice;
//! for rotating problems the Gaussian/vortex family below seeds different
//! basins, and asymmetric Gaussian-times-polynomial seeds select excited
//! states of symmetric traps. Every constructor returns a discretely
//! renormalized unit-norm state.

use std::path::PathBuf;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::io;
use crate::problem::{DiscreteProblem, StateVector};

/// Available initial-state constructors.
#[derive(Debug, Clone, PartialEq)]
pub enum InitKind {
    /// Thomas-Fermi profile `sqrt(max(mu_TF - V, 0)/beta)`.
    ThomasFermi,
    /// Isotropic Gaussian `pi^(-d/4) exp(-|x|^2/2)`.
    GaussianA,
    /// Vortex-carrying Gaussian `(x + i y)/sqrt(pi) exp(-(x^2+y^2)/2)`.
    VortexB,
    /// Complex conjugate of [`InitKind::VortexB`].
    VortexBbar,
    /// Normalized mean of the Gaussian and the vortex ansatz.
    MixC,
    /// Complex conjugate of [`InitKind::MixC`].
    MixCbar,
    /// Normalized mixture `(1-Omega) phi_a + Omega phi_b`.
    OmegaMixD,
    /// Complex conjugate of [`InitKind::OmegaMixD`].
    OmegaMixDbar,
    /// Odd-in-x seed `sqrt(2) x pi^(-d/4) exp(-|x|^2/2)`.
    ExcitedX,
    /// Odd-in-y seed.
    ExcitedY,
    /// Odd-in-both seed `2 x y / sqrt(pi) exp(-(x^2+y^2)/2)` (2D).
    ExcitedXY,
    /// A state stored in the grid-data format.
    FromFile(PathBuf),
}

impl InitKind {
    /// Canonical configuration tag.
    pub fn tag(&self) -> &'static str {
        match self {
            InitKind::ThomasFermi => "tf",
            InitKind::GaussianA => "a",
            InitKind::VortexB => "b",
            InitKind::VortexBbar => "bbar",
            InitKind::MixC => "c",
            InitKind::MixCbar => "cbar",
            InitKind::OmegaMixD => "d",
            InitKind::OmegaMixDbar => "dbar",
            InitKind::ExcitedX => "excited_x",
            InitKind::ExcitedY => "excited_y",
            InitKind::ExcitedXY => "excited_xy",
            InitKind::FromFile(_) => "file",
        }
    }

    fn needs_complex(&self) -> bool {
        matches!(
            self,
            InitKind::VortexB
                | InitKind::VortexBbar
                | InitKind::MixC
                | InitKind::MixCbar
                | InitKind::OmegaMixD
                | InitKind::OmegaMixDbar
        )
    }

    fn min_dim(&self) -> usize {
        match self {
            InitKind::VortexB
            | InitKind::VortexBbar
            | InitKind::MixC
            | InitKind::MixCbar
            | InitKind::OmegaMixD
            | InitKind::OmegaMixDbar
            | InitKind::ExcitedY
            | InitKind::ExcitedXY => 2,
            _ => 1,
        }
    }
}

/// Thomas-Fermi chemical potential for a harmonic trap with unit
/// `gamma_x`:
/// `1/2 (3 beta / 2)^(2/3)` in 1D, `(beta gamma_y / pi)^(1/2)` in 2D and
/// `1/2 (15 beta gamma_y gamma_z / (4 pi))^(2/5)` in 3D.
pub fn thomas_fermi_mu(beta: f64, gammas: &[f64]) -> f64 {
    match gammas.len() {
        1 => 0.5 * (1.5 * beta).powf(2.0 / 3.0),
        2 => (beta * gammas[1] / std::f64::consts::PI).sqrt(),
        _ => 0.5 * (15.0 * beta * gammas[1] * gammas[2] / (4.0 * std::f64::consts::PI)).powf(0.4),
    }
}

/// Thomas-Fermi initial state: samples
/// `sqrt(max(mu_TF - V(x), 0) / beta)` at the cached potential values and
/// renormalizes. The kinetic energy of this profile is unreliable (the
/// profile has kinks); only the normalization is guaranteed.
pub fn thomas_fermi<T: Field>(p: &DiscreteProblem<T>) -> Result<StateVector<T>> {
    if p.beta() <= 0.0 {
        return Err(Error::Config(
            "the Thomas-Fermi profile needs beta > 0; use the Gaussian ansatz instead".into(),
        ));
    }
    let gammas = p.potential().harmonic_gammas(p.grid().dim());
    let mu = thomas_fermi_mu(p.beta(), &gammas);
    let data: Vec<T> = p
        .potential_samples()
        .iter()
        .map(|&v| T::from_re(((mu - v).max(0.0) / p.beta()).sqrt()))
        .collect();
    StateVector::normalized(data)
}

/// Builds the requested initial state on the problem's grid.
pub fn initial_state<T: Field>(kind: &InitKind, p: &DiscreteProblem<T>) -> Result<StateVector<T>> {
    if kind.needs_complex() && !T::IS_COMPLEX {
        return Err(Error::Config(format!(
            "initial data '{}' is complex-valued and needs a complex field kind",
            kind.tag()
        )));
    }
    if p.grid().dim() < kind.min_dim() {
        return Err(Error::Config(format!(
            "initial data '{}' needs at least {} dimensions",
            kind.tag(),
            kind.min_dim()
        )));
    }
    let omega = p.omega();
    match kind {
        InitKind::ThomasFermi => thomas_fermi(p),
        InitKind::GaussianA => sample(p, gaussian_a),
        InitKind::VortexB => sample(p, vortex_b),
        InitKind::VortexBbar => sample(p, |x| vortex_b(x).conj()),
        InitKind::MixC => sample(p, |x| 0.5 * (gaussian_a(x) + vortex_b(x))),
        InitKind::MixCbar => sample(p, |x| (0.5 * (gaussian_a(x) + vortex_b(x))).conj()),
        InitKind::OmegaMixD => sample(p, |x| {
            (1.0 - omega) * gaussian_a(x) + omega * vortex_b(x)
        }),
        InitKind::OmegaMixDbar => sample(p, |x| {
            ((1.0 - omega) * gaussian_a(x) + omega * vortex_b(x)).conj()
        }),
        InitKind::ExcitedX => sample(p, |x| gaussian_a(x) * 2f64.sqrt() * x[0]),
        InitKind::ExcitedY => sample(p, |x| gaussian_a(x) * 2f64.sqrt() * x[1]),
        InitKind::ExcitedXY => sample(p, |x| gaussian_a(x) * 2.0 * x[0] * x[1]),
        InitKind::FromFile(path) => from_file(p, path),
    }
}

fn gaussian_a(x: &[f64]) -> Complex64 {
    let r2: f64 = x.iter().map(|&c| c * c).sum();
    let norm = std::f64::consts::PI.powf(-(x.len() as f64) / 4.0);
    Complex64::new(norm * (-r2 / 2.0).exp(), 0.0)
}

fn vortex_b(x: &[f64]) -> Complex64 {
    Complex64::new(x[0], x[1]) * gaussian_a(x)
}

fn sample<T: Field>(
    p: &DiscreteProblem<T>,
    f: impl Fn(&[f64]) -> Complex64,
) -> Result<StateVector<T>> {
    let mut data = vec![T::ZERO; p.unknowns()];
    let mut bad = false;
    p.grid().for_each_node(|flat, point| {
        match T::try_from_complex(f(point)) {
            Some(v) => data[flat] = v,
            None => bad = true,
        }
    });
    if bad {
        return Err(Error::Config(
            "initial data is complex-valued and needs a complex field kind".into(),
        ));
    }
    StateVector::normalized(data)
}

fn from_file<T: Field>(p: &DiscreteProblem<T>, path: &PathBuf) -> Result<StateVector<T>> {
    let (grid, data) = io::read_state(path)?;
    if grid != *p.grid() {
        return Err(Error::GridMismatch(format!(
            "state file grid {:?} does not match the problem grid {:?}",
            grid.intervals_all(),
            p.grid().intervals_all()
        )));
    }
    let values: Vec<T> = match data {
        io::FieldData::Real(v) => v.into_iter().map(T::from_re).collect(),
        io::FieldData::Complex(v) => {
            let mut out = Vec::with_capacity(v.len());
            for z in v {
                out.push(T::try_from_complex(z).ok_or_else(|| {
                    Error::Config(
                        "state file holds complex data but the problem field is real".into(),
                    )
                })?);
            }
            out
        }
    };
    StateVector::normalized(values)
}
