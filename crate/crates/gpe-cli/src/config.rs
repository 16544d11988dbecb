//! Flat `key = value` run configuration.
//!
//! The format is dotted sections in plain text, one assignment per line,
//! `#` to end of line is a comment. Keys under `result.` are ignored on
//! input, which lets a written report be fed back as a config. Every
//! effective value (including defaults) is echoed into reports, so a run
//! is reproducible from its own output.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use gpe::gradient::GradParams;
use gpe::newton::NewtonParams;
use gpe::{BoundaryKind, Error, Flavor, InitKind, Potential, Result};

/// Solver selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Gradient,
    Newton,
    Cascadic,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::Gradient => "gradient",
            Method::Newton => "newton",
            Method::Cascadic => "cascadic",
        }
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub bounds: Vec<(f64, f64)>,
    pub bc: BoundaryKind,
    pub grid_n: Vec<usize>,
    pub flavor: Flavor,
    pub beta: f64,
    pub omega: f64,
    pub potential: Potential,
    pub init: InitKind,
    pub method: Method,
    pub levels: usize,
    pub grad: GradParams,
    pub newton: NewtonParams,
    pub probe_directions: usize,
    pub seed: u64,
    pub compare_kinds: Vec<InitKind>,
    pub study_meshes: Vec<usize>,
    pub study_reference: Option<usize>,
}

impl RunConfig {
    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    /// Builds the grid described by the configuration.
    pub fn grid(&self) -> Result<gpe::Grid> {
        gpe::Grid::build(gpe::Domain::new(&self.bounds, self.bc)?, &self.grid_n)
    }

    /// Canonical `key = value` echo of every effective setting.
    pub fn echo(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = Vec::new();
        let mut push = |k: &str, v: String| out.push((k.to_string(), v));
        push(
            "domain.bounds",
            self.bounds
                .iter()
                .flat_map(|&(a, b)| [a, b])
                .map(fmt_f64)
                .collect::<Vec<_>>()
                .join(" "),
        );
        push(
            "domain.bc",
            match self.bc {
                BoundaryKind::Dirichlet => "dirichlet".into(),
                BoundaryKind::Periodic => "periodic".into(),
            },
        );
        push(
            "grid.n",
            self.grid_n
                .iter()
                .map(|n| n.to_string())
                .collect::<Vec<_>>()
                .join(" "),
        );
        push("problem.flavor", self.flavor.tag().into());
        push("problem.beta", fmt_f64(self.beta));
        push("problem.omega", fmt_f64(self.omega));
        match &self.potential {
            Potential::Harmonic { gammas } => {
                push("potential.kind", "harmonic".into());
                push("potential.gamma", join_f64(gammas));
            }
            Potential::HarmonicLattice {
                gammas,
                amplitude,
                period,
            } => {
                push("potential.kind", "harmonic_lattice".into());
                push("potential.gamma", join_f64(gammas));
                push("potential.amplitude", fmt_f64(*amplitude));
                push("potential.period", fmt_f64(*period));
            }
            Potential::HarmonicStirrer {
                gamma_y,
                gamma_z,
                omega0,
                delta,
                r0,
            } => {
                push("potential.kind", "harmonic_stirrer".into());
                push("potential.gamma_y", fmt_f64(*gamma_y));
                push("potential.gamma_z", fmt_f64(*gamma_z));
                push("potential.omega0", fmt_f64(*omega0));
                push("potential.delta", fmt_f64(*delta));
                push("potential.r0", fmt_f64(*r0));
            }
            Potential::Custom { .. } => push("potential.kind", "custom".into()),
        }
        push("init.kind", self.init.tag().into());
        if let InitKind::FromFile(p) = &self.init {
            push("init.path", p.display().to_string());
        }
        push("solver.method", self.method.tag().into());
        push("solver.levels", self.levels.to_string());
        push("solver.eps0", fmt_f64(self.grad.eps0));
        push("solver.max_iters", self.grad.max_iters.to_string());
        push("solver.eta", fmt_f64(self.grad.eta));
        push("solver.rho1", fmt_f64(self.grad.rho1));
        push("solver.backtrack", fmt_f64(self.grad.backtrack));
        push("solver.tau_min", fmt_f64(self.grad.tau_min));
        push("solver.tau_max", fmt_f64(self.grad.tau_max));
        push("solver.monotone", self.grad.monotone.to_string());
        push("solver.delta_stop", fmt_f64(self.newton.delta_stop));
        push("solver.k_init", self.newton.k_init.to_string());
        push("solver.k_sub", self.newton.k_sub.to_string());
        push("solver.k_newton", self.newton.k_newton.to_string());
        push("solver.eta1", fmt_f64(self.newton.eta1));
        push("solver.eta2", fmt_f64(self.newton.eta2));
        push("solver.gamma1", fmt_f64(self.newton.gamma1));
        push("solver.gamma2", fmt_f64(self.newton.gamma2));
        if let Some(d0) = self.newton.delta0 {
            push("solver.delta0", fmt_f64(d0));
        }
        push("probe.directions", self.probe_directions.to_string());
        push("seed", self.seed.to_string());
        if !self.compare_kinds.is_empty() {
            push(
                "compare.kinds",
                self.compare_kinds
                    .iter()
                    .map(|k| k.tag().to_string())
                    .collect::<Vec<_>>()
                    .join(" "),
            );
        }
        if !self.study_meshes.is_empty() {
            push(
                "study.meshes",
                self.study_meshes
                    .iter()
                    .map(|n| n.to_string())
                    .collect::<Vec<_>>()
                    .join(" "),
            );
        }
        if let Some(r) = self.study_reference {
            push("study.reference", r.to_string());
        }
        out
    }
}

/// Shortest-roundtrip float formatting, re-parseable by `str::parse`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn join_f64(vs: &[f64]) -> String {
    vs.iter().map(|&v| fmt_f64(v)).collect::<Vec<_>>().join(" ")
}

/// Parses the flat text format, tracking consumed keys to reject typos.
pub struct RawConfig {
    values: BTreeMap<String, String>,
    consumed: BTreeSet<String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "line {}: expected 'key = value', got '{raw}'",
                    lineno + 1
                )));
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() {
                return Err(Error::Config(format!("line {}: empty key", lineno + 1)));
            }
            if values.insert(key.clone(), value).is_some() {
                return Err(Error::Config(format!(
                    "line {}: duplicate key '{key}'",
                    lineno + 1
                )));
            }
        }
        Ok(Self {
            values,
            consumed: BTreeSet::new(),
        })
    }

    fn get(&mut self, key: &str) -> Option<String> {
        let v = self.values.get(key).cloned();
        if v.is_some() {
            self.consumed.insert(key.to_string());
        }
        v
    }

    fn f64_or(&mut self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::Config(format!("{key}: '{v}' is not a number"))),
        }
    }

    fn usize_or(&mut self, key: &str, default: usize) -> Result<usize> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::Config(format!("{key}: '{v}' is not an integer"))),
        }
    }

    fn bool_or(&mut self, key: &str, default: bool) -> Result<bool> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => match v.as_str() {
                "true" | "1" | "yes" => Ok(true),
                "false" | "0" | "no" => Ok(false),
                _ => Err(Error::Config(format!("{key}: '{v}' is not a boolean"))),
            },
        }
    }

    fn f64_list(&mut self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .split_whitespace()
                .map(|tok| {
                    tok.parse()
                        .map_err(|_| Error::Config(format!("{key}: '{tok}' is not a number")))
                })
                .collect::<Result<Vec<f64>>>()
                .map(Some),
        }
    }

    fn usize_list(&mut self, key: &str) -> Result<Option<Vec<usize>>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .split_whitespace()
                .map(|tok| {
                    tok.parse()
                        .map_err(|_| Error::Config(format!("{key}: '{tok}' is not an integer")))
                })
                .collect::<Result<Vec<usize>>>()
                .map(Some),
        }
    }

    /// Resolves the typed configuration and rejects unknown keys.
    pub fn resolve(mut self) -> Result<RunConfig> {
        let flavor = match self
            .get("problem.flavor")
            .ok_or_else(|| Error::Config("problem.flavor is required (fd | sp | fp)".into()))?
            .as_str()
        {
            "fd" => Flavor::FiniteDifference,
            "sp" => Flavor::SineSpectral,
            "fp" => Flavor::FourierSpectral,
            other => {
                return Err(Error::Config(format!(
                    "problem.flavor: unknown flavor '{other}' (fd | sp | fp)"
                )))
            }
        };
        let bounds_flat = self
            .f64_list("domain.bounds")?
            .ok_or_else(|| Error::Config("domain.bounds is required (a1 b1 [a2 b2 ...])".into()))?;
        if bounds_flat.len() % 2 != 0 || bounds_flat.is_empty() || bounds_flat.len() > 6 {
            return Err(Error::Config(
                "domain.bounds needs one (a, b) pair per dimension".into(),
            ));
        }
        let bounds: Vec<(f64, f64)> = bounds_flat.chunks(2).map(|c| (c[0], c[1])).collect();
        let dim = bounds.len();
        let bc = match self.get("domain.bc").as_deref() {
            None => match flavor {
                Flavor::FourierSpectral => BoundaryKind::Periodic,
                _ => BoundaryKind::Dirichlet,
            },
            Some("dirichlet") => BoundaryKind::Dirichlet,
            Some("periodic") => BoundaryKind::Periodic,
            Some(other) => {
                return Err(Error::Config(format!(
                    "domain.bc: unknown boundary kind '{other}'"
                )))
            }
        };
        let grid_n = match self.usize_list("grid.n")? {
            Some(ns) if ns.len() == dim => ns,
            Some(ns) if ns.len() == 1 => vec![ns[0]; dim],
            Some(ns) => {
                return Err(Error::Config(format!(
                    "grid.n has {} entries for a {dim}D domain",
                    ns.len()
                )))
            }
            None => return Err(Error::Config("grid.n is required".into())),
        };
        let beta = self.f64_or("problem.beta", 0.0)?;
        let omega = self.f64_or("problem.omega", 0.0)?;

        let potential = match self
            .get("potential.kind")
            .unwrap_or_else(|| "harmonic".into())
            .as_str()
        {
            "harmonic" => Potential::Harmonic {
                gammas: self
                    .f64_list("potential.gamma")?
                    .unwrap_or_else(|| vec![1.0; dim]),
            },
            "harmonic_lattice" => Potential::HarmonicLattice {
                gammas: self
                    .f64_list("potential.gamma")?
                    .unwrap_or_else(|| vec![1.0; dim]),
                amplitude: self.f64_or("potential.amplitude", 0.0)?,
                period: self.f64_or("potential.period", 4.0)?,
            },
            "harmonic_stirrer" => Potential::HarmonicStirrer {
                gamma_y: self.f64_or("potential.gamma_y", 1.0)?,
                gamma_z: self.f64_or("potential.gamma_z", 1.0)?,
                omega0: self.f64_or("potential.omega0", 0.0)?,
                delta: self.f64_or("potential.delta", 1.0)?,
                r0: self.f64_or("potential.r0", 0.0)?,
            },
            other => {
                return Err(Error::Config(format!(
                    "potential.kind: unknown kind '{other}'"
                )))
            }
        };

        let init_tag = self.get("init.kind").unwrap_or_else(|| "tf".into());
        let init = if init_tag == "file" {
            let path = self
                .get("init.path")
                .ok_or_else(|| Error::Config("init.kind = file needs init.path".into()))?;
            InitKind::FromFile(PathBuf::from(path))
        } else {
            parse_init_kind(&init_tag)?
        };

        let method = match self
            .get("solver.method")
            .unwrap_or_else(|| "gradient".into())
            .as_str()
        {
            "gradient" => Method::Gradient,
            "newton" => Method::Newton,
            "cascadic" => Method::Cascadic,
            other => {
                return Err(Error::Config(format!(
                    "solver.method: unknown method '{other}'"
                )))
            }
        };

        let grad = GradParams {
            eps0: self.f64_or("solver.eps0", 1e-6)?,
            max_iters: self.usize_or("solver.max_iters", 2000)?,
            eta: self.f64_or("solver.eta", 0.85)?,
            rho1: self.f64_or("solver.rho1", 1e-4)?,
            backtrack: self.f64_or("solver.backtrack", 0.5)?,
            tau_min: self.f64_or("solver.tau_min", 1e-10)?,
            tau_max: self.f64_or("solver.tau_max", 1e10)?,
            monotone: self.bool_or("solver.monotone", false)?,
            ..GradParams::default()
        };
        let newton = NewtonParams {
            delta_stop: self.f64_or("solver.delta_stop", 1e-8)?,
            k_init: self.usize_or("solver.k_init", 100)?,
            k_sub: self.usize_or("solver.k_sub", 200)?,
            k_newton: self.usize_or("solver.k_newton", 500)?,
            eta1: self.f64_or("solver.eta1", 0.01)?,
            eta2: self.f64_or("solver.eta2", 0.9)?,
            gamma1: self.f64_or("solver.gamma1", 2.0)?,
            gamma2: self.f64_or("solver.gamma2", 4.0)?,
            delta0: self.get("solver.delta0").map(|v| v.parse()).transpose()
                .map_err(|_| Error::Config("solver.delta0 is not a number".into()))?,
            grad: grad.clone(),
        };

        let compare_kinds = match self.get("compare.kinds") {
            None => Vec::new(),
            Some(list) => list
                .split_whitespace()
                .map(parse_init_kind)
                .collect::<Result<Vec<_>>>()?,
        };

        let cfg = RunConfig {
            bounds,
            bc,
            grid_n,
            flavor,
            beta,
            omega,
            potential,
            init,
            method,
            levels: self.usize_or("solver.levels", 1)?,
            grad,
            newton,
            probe_directions: self.usize_or("probe.directions", 0)?,
            seed: self.usize_or("seed", 0)? as u64,
            compare_kinds,
            study_meshes: self.usize_list("study.meshes")?.unwrap_or_default(),
            study_reference: self.usize_list("study.reference")?.map(|v| v[0]),
        };

        let unknown: Vec<String> = self
            .values
            .keys()
            .filter(|k| !self.consumed.contains(*k) && !k.starts_with("result."))
            .cloned()
            .collect();
        if !unknown.is_empty() {
            return Err(Error::Config(format!(
                "unknown configuration keys: {}",
                unknown.join(", ")
            )));
        }

        validate(&cfg)?;
        Ok(cfg)
    }
}

fn parse_init_kind(tag: &str) -> Result<InitKind> {
    Ok(match tag {
        "tf" | "thomas_fermi" => InitKind::ThomasFermi,
        "a" | "gaussian" => InitKind::GaussianA,
        "b" | "vortex" => InitKind::VortexB,
        "bbar" => InitKind::VortexBbar,
        "c" => InitKind::MixC,
        "cbar" => InitKind::MixCbar,
        "d" => InitKind::OmegaMixD,
        "dbar" => InitKind::OmegaMixDbar,
        "excited_x" => InitKind::ExcitedX,
        "excited_y" => InitKind::ExcitedY,
        "excited_xy" => InitKind::ExcitedXY,
        other => {
            return Err(Error::Config(format!(
                "init kind '{other}' is not one of tf a b bbar c cbar d dbar \
                 excited_x excited_y excited_xy file"
            )))
        }
    })
}

fn validate(cfg: &RunConfig) -> Result<()> {
    match cfg.flavor {
        Flavor::FourierSpectral => {
            if cfg.bc != BoundaryKind::Periodic {
                return Err(Error::Config(
                    "problem.flavor = fp requires domain.bc = periodic".into(),
                ));
            }
        }
        _ => {
            if cfg.bc != BoundaryKind::Dirichlet {
                return Err(Error::Config(
                    "fd and sp flavors require domain.bc = dirichlet".into(),
                ));
            }
            if cfg.omega != 0.0 {
                return Err(Error::Config(
                    "rotation (problem.omega != 0) requires problem.flavor = fp".into(),
                ));
            }
        }
    }
    if cfg.levels == 0 {
        return Err(Error::Config("solver.levels must be at least 1".into()));
    }
    Ok(())
}
