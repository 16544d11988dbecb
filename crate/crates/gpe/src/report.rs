//! Solve reports and iteration traces.

/// One row of a solver trace.
///
/// Gradient iterations record the accepted step size in `step` and the
/// number of line-search backtracks in `backtracks`; Newton iterations
/// record the regularization parameter in `step`, the subproblem
/// iteration count in `backtracks` and the trust-region ratio in `ratio`.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    /// Multigrid level (0 on a single grid).
    pub level: usize,
    /// Iteration counter within the solver run.
    pub iteration: usize,
    /// Objective value after the iteration.
    pub energy: f64,
    /// Projected-gradient residual norm after the iteration.
    pub residual: f64,
    /// Accepted step size, or the regularization parameter for Newton
    /// iterations.
    pub step: f64,
    /// Line-search backtracks, or subproblem iterations for Newton.
    pub backtracks: usize,
    /// Trust-region ratio of a Newton iteration.
    pub ratio: Option<f64>,
    /// Whether the trial point was accepted.
    pub accepted: bool,
}

/// Why a solver run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StopReason {
    /// The displacement (or residual) stopping test fired.
    Converged,
    /// The line search could no longer resolve a decrease; the iterate
    /// sits at the floating-point floor of the objective.
    SearchFloor,
    /// The iteration budget ran out first.
    #[default]
    IterationCap,
}

/// Summary of a completed solve.
#[derive(Debug, Clone, Default)]
pub struct SolveReport {
    /// Final energy in the grid-function scaling.
    pub energy: f64,
    /// Chemical potential `mu = E + (beta/2) integral |phi|^4`.
    pub chemical_potential: f64,
    /// Root-mean-square widths, one per axis.
    pub rms: Vec<f64>,
    /// Maximum density `max_j |phi_j|^2`.
    pub max_density: f64,
    /// Final projected-gradient residual norm.
    pub residual_norm: f64,
    /// Lagrange multiplier `theta = Re(X^* G)`.
    pub theta: f64,
    /// Iterations performed (on the finest mesh for cascadic solves).
    pub iterations: usize,
    /// Objective evaluations (summed over levels for cascadic solves).
    pub nfe: usize,
    /// Wall-clock seconds.
    pub wall_seconds: f64,
    /// Whether the stopping criterion was met within the iteration budget.
    pub converged: bool,
    /// How the run ended.
    pub stop: StopReason,
    /// Rejected Newton trial steps.
    pub rejected_steps: usize,
    /// Per-level reports of a cascadic solve, coarsest first.
    pub levels: Vec<SolveReport>,
    /// Per-iteration trace.
    pub trace: Vec<TraceRecord>,
}
