use gpe::gradient::{gradient_descent, GradParams};
use gpe::grid::{BoundaryKind, Domain, Grid};
use gpe::init::{initial_state, InitKind};
use gpe::potential::Potential;
use gpe::problem::DiscreteProblem;

fn main() {
    let n = 128usize;
    let d = Domain::new(&[(-8.0, 8.0); 3], BoundaryKind::Dirichlet).unwrap();
    let g = Grid::build(d, &[n, n, n]).unwrap();
    let pot = Potential::HarmonicLattice { gammas: vec![1.0; 3], amplitude: 50.0, period: 4.0 };
    let p = DiscreteProblem::sine_spectral(g, pot, 100.0).unwrap();
    let x0 = initial_state(&InitKind::ThomasFermi, &p).unwrap();
    let (_, rep) = gradient_descent(&p, &x0, &GradParams::default()).unwrap();
    println!("iters={}", rep.iterations);
    // count iterations by residual decade and find first crossing times
    for r in rep.trace.iter().take(40) {
        println!("k={} F={:.9} res={:.3e} tau={:.3e} m={}", r.iteration, r.energy, r.residual, r.step, r.backtracks);
    }
}
