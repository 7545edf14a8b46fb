use num_complex::Complex64 as C64;
use tiltspace::fock::DensityOperator;
use tiltspace::grid::Grid2D;
use tiltspace::observable::{generating_operator, phase_space_density};
use tiltspace::optics::TiltAngle;
use tiltspace::quadrature::limit_rhs_density;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4};

fn main() {
    let d = 60;
    let grid = Grid2D::square(-5.0, 5.0, 41).unwrap();
    let rho_specs: Vec<(&str, DensityOperator)> = vec![
        ("coh(1+0.5i)", DensityOperator::coherent(C64::new(1.0, 0.5), d).unwrap()),
        ("fock2", DensityOperator::fock(2, d).unwrap()),
    ];
    let sigma_specs: Vec<(&str, DensityOperator)> = vec![
        ("vac", DensityOperator::vacuum(d)),
        ("fock1", DensityOperator::fock(1, d).unwrap()),
        ("coh(0.8)", DensityOperator::coherent(C64::new(0.8, 0.0), d).unwrap()),
        ("th(0.5)", DensityOperator::thermal(0.5, d).unwrap()),
    ];
    let t0 = std::time::Instant::now();
    let mut worst_overall: f64 = 0.0;
    for theta in [FRAC_PI_2, FRAC_PI_4, 3.0 * FRAC_PI_4, -FRAC_PI_3] {
        let tilt = TiltAngle::new(theta).unwrap();
        for (sn, sigma) in &sigma_specs {
            let gen = generating_operator(sigma, tilt).unwrap();
            for (rn, rho) in &rho_specs {
                let lhs = phase_space_density(rho, &gen, &grid).unwrap();
                let rhs = limit_rhs_density(rho, sigma, theta, &grid).unwrap();
                let sup = lhs.max_abs_diff(&rhs);
                worst_overall = worst_overall.max(sup);
                println!("θ={theta:+.3} σ={sn:9} ρ={rn:12} sup={sup:.2e}");
            }
        }
    }
    println!("WORST = {worst_overall:.3e}, total time {:?}", t0.elapsed());
}
