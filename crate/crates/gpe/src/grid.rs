//! Computational domains and uniform tensor-product grids.
//!
//! A [`Domain`] is a box `(a_1,b_1) x ... x (a_d,b_d)` with either
//! homogeneous Dirichlet or periodic boundary semantics. A [`Grid`]
//! partitions each edge into `N_i` equal intervals of length
//! `h_i = (b_i - a_i)/N_i`.
//!
//! Unknown layout:
//! - Dirichlet grids store only the interior nodes `x_j = a + j h`,
//!   `j = 1..N-1`; the boundary values are identically zero.
//! - Periodic grids store nodes `j = 0..N-1`, with node `N` identified
//!   with node `0`.
//!
//! Grid counts are interval counts everywhere in this crate: a "`2^8`
//! mesh" has `2^8` intervals per dimension, hence `2^8 - 1` interior
//! Dirichlet unknowns (some references count nodes including the
//! boundary, i.e. `2^8 + 1`).

use crate::error::{Error, Result};

/// Boundary semantics of a computational domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    /// Homogeneous Dirichlet: the grid function vanishes on the boundary.
    Dirichlet,
    /// Periodic identification of opposite faces.
    Periodic,
}

/// A rectangular computational domain in 1, 2 or 3 dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    bounds: Vec<(f64, f64)>,
    bc: BoundaryKind,
}

impl Domain {
    /// Builds a domain from per-dimension bounds `(a_i, b_i)`.
    pub fn new(bounds: &[(f64, f64)], bc: BoundaryKind) -> Result<Self> {
        if bounds.is_empty() || bounds.len() > 3 {
            return Err(Error::Config(format!(
                "domain dimension must be 1, 2 or 3, got {}",
                bounds.len()
            )));
        }
        for (d, &(a, b)) in bounds.iter().enumerate() {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(Error::Config(format!(
                    "domain bounds along dimension {d} must satisfy a < b, got ({a}, {b})"
                )));
            }
        }
        Ok(Self {
            bounds: bounds.to_vec(),
            bc,
        })
    }

    /// Number of spatial dimensions.
    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    /// Bounds `(a_i, b_i)` of dimension `d`.
    pub fn bounds(&self, d: usize) -> (f64, f64) {
        self.bounds[d]
    }

    /// Edge length `b_i - a_i` of dimension `d`.
    pub fn extent(&self, d: usize) -> f64 {
        let (a, b) = self.bounds[d];
        b - a
    }

    /// Boundary semantics.
    pub fn bc(&self) -> BoundaryKind {
        self.bc
    }
}

/// A uniform tensor-product grid over a [`Domain`].
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    domain: Domain,
    intervals: Vec<usize>,
    spacing: Vec<f64>,
}

impl Grid {
    /// Builds a grid with `intervals[i]` equal subintervals along
    /// dimension `i`.
    ///
    /// Periodic grids require even interval counts so that the Fourier
    /// index range `-N/2..N/2-1` is well defined.
    pub fn build(domain: Domain, intervals: &[usize]) -> Result<Self> {
        if intervals.len() != domain.dim() {
            return Err(Error::Config(format!(
                "expected {} interval counts, got {}",
                domain.dim(),
                intervals.len()
            )));
        }
        for (d, &n) in intervals.iter().enumerate() {
            if n < 2 {
                return Err(Error::Config(format!(
                    "dimension {d} needs at least 2 intervals, got {n}"
                )));
            }
            if domain.bc() == BoundaryKind::Periodic && n % 2 != 0 {
                return Err(Error::Config(format!(
                    "periodic grids require even interval counts, got {n} along dimension {d}"
                )));
            }
        }
        let spacing = intervals
            .iter()
            .enumerate()
            .map(|(d, &n)| domain.extent(d) / n as f64)
            .collect();
        Ok(Self {
            domain,
            intervals: intervals.to_vec(),
            spacing,
        })
    }

    /// The underlying domain.
    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// Number of spatial dimensions.
    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// Interval count `N_i` along dimension `d`.
    pub fn intervals(&self, d: usize) -> usize {
        self.intervals[d]
    }

    /// All interval counts.
    pub fn intervals_all(&self) -> &[usize] {
        &self.intervals
    }

    /// Mesh size `h_i = (b_i - a_i)/N_i`.
    pub fn spacing(&self, d: usize) -> f64 {
        self.spacing[d]
    }

    /// Number of unknowns along dimension `d`: `N_i - 1` for Dirichlet
    /// grids, `N_i` for periodic grids.
    pub fn unknowns(&self, d: usize) -> usize {
        match self.domain.bc() {
            BoundaryKind::Dirichlet => self.intervals[d] - 1,
            BoundaryKind::Periodic => self.intervals[d],
        }
    }

    /// Per-dimension unknown counts.
    pub fn shape(&self) -> Vec<usize> {
        (0..self.dim()).map(|d| self.unknowns(d)).collect()
    }

    /// Total number of unknowns.
    pub fn len(&self) -> usize {
        (0..self.dim()).map(|d| self.unknowns(d)).product()
    }

    /// True when the grid has no unknowns (never the case for valid grids).
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cell volume `prod_i h_i`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    /// Coordinates of the unknowns along dimension `d`, in increasing
    /// order: `a + j h` with `j = 1..N-1` (Dirichlet) or `j = 0..N-1`
    /// (periodic).
    pub fn node_coordinates(&self, d: usize) -> Vec<f64> {
        let (a, _) = self.domain.bounds(d);
        let h = self.spacing[d];
        match self.domain.bc() {
            BoundaryKind::Dirichlet => (1..self.intervals[d]).map(|j| a + j as f64 * h).collect(),
            BoundaryKind::Periodic => (0..self.intervals[d]).map(|j| a + j as f64 * h).collect(),
        }
    }

    /// The uniformly refined grid: every interval count doubles, the
    /// domain is unchanged, and the refined node set contains the coarse
    /// node set.
    pub fn refine(&self) -> Grid {
        let doubled: Vec<usize> = self.intervals.iter().map(|&n| 2 * n).collect();
        Grid::build(self.domain.clone(), &doubled).expect("doubling preserves validity")
    }

    /// Visits every unknown in row-major order (first dimension slowest)
    /// together with its coordinates.
    pub fn for_each_node(&self, mut f: impl FnMut(usize, &[f64])) {
        let coords: Vec<Vec<f64>> = (0..self.dim()).map(|d| self.node_coordinates(d)).collect();
        let shape = self.shape();
        let mut idx = vec![0usize; self.dim()];
        let mut point = vec![0.0; self.dim()];
        for flat in 0..self.len() {
            let mut rem = flat;
            for d in (0..self.dim()).rev() {
                idx[d] = rem % shape[d];
                rem /= shape[d];
            }
            for d in 0..self.dim() {
                point[d] = coords[d][idx[d]];
            }
            f(flat, &point);
        }
    }

    /// Coordinate along `axis` of the unknown at flat index `flat`.
    pub fn axis_coordinate(&self, axis: usize, flat: usize) -> f64 {
        let shape = self.shape();
        let stride: usize = shape[axis + 1..].iter().product();
        let j = (flat / stride) % shape[axis];
        let (a, _) = self.domain.bounds(axis);
        let h = self.spacing[axis];
        match self.domain.bc() {
            BoundaryKind::Dirichlet => a + (j + 1) as f64 * h,
            BoundaryKind::Periodic => a + j as f64 * h,
        }
    }
}
