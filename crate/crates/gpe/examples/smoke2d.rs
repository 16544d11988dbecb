use gpe::grid::{BoundaryKind, Domain, Grid};
use gpe::init::{initial_state, InitKind};
use gpe::newton::{cascadic_solve, NewtonParams};
use gpe::potential::Potential;
use gpe::problem::DiscreteProblem;

fn main() {
    let beta = 500.0;
    let omega = 0.5;
    let d = Domain::new(&[(-10.0, 10.0), (-10.0, 10.0)], BoundaryKind::Periodic).unwrap();
    let coarse = Grid::build(d, &[16, 16]).unwrap();
    let build = |g: &Grid| {
        DiscreteProblem::fourier_spectral(
            g.clone(),
            Potential::Harmonic { gammas: vec![1.0, 1.0] },
            beta,
            omega,
        )
    };
    let p0 = build(&coarse).unwrap();
    let x0 = initial_state(&InitKind::VortexBbar, &p0).unwrap();
    let params = NewtonParams::default();
    let t = std::time::Instant::now();
    let (_, rep) = cascadic_solve(build, coarse, 4, &x0, &params).unwrap();
    println!("cascadic 2^4->2^7, beta=500, omega=0.5, init bbar:");
    println!("E = {:.6} (expect 8.0197 +- 1e-2)", rep.energy);
    println!("mu = {:.6}, rms = ({:.4},{:.4})", rep.chemical_potential, rep.rms[0], rep.rms[1]);
    println!("finest iters={} nfe_total={} rejected={} conv={} t={:?}",
             rep.iterations, rep.nfe, rep.rejected_steps, rep.converged, t.elapsed());
    for (l, lr) in rep.levels.iter().enumerate() {
        println!("  level {l}: E={:.6} iters={} rejected={} conv={}", lr.energy, lr.iterations, lr.rejected_steps, lr.converged);
    }
}
