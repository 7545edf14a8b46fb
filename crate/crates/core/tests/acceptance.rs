//! Acceptance suite: one test per release gate, each printing a PASS line
//! with the measured figure next to its threshold.
//!
//! Run with `cargo test -p tiltspace --test acceptance -- --nocapture`.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI};

use tiltspace::eightport::{
    binomial_counting_kernel, compare_to_limit, joint_statistics, NetworkConfig,
};
use tiltspace::fock::{
    coherent_state, number_operator, DensityOperator, StateVector,
};
use tiltspace::grid::{Density1D, Grid1D, Grid2D};
use tiltspace::linalg::{hermitian_eigh, identity, max_abs_diff, max_abs_diff_block};
use tiltspace::observable::{
    efficiency_kernel, generating_operator, margin_measures, phase_space_density,
    phase_space_density_at, smeared_generator, weyl_transform_support, EfficiencyQuad,
    GeneratingOperator,
};
use tiltspace::optics::{
    dilation, tilt_conjugator, tilted_weyl, PhaseSpacePoint, TiltAngle, WeylEngine,
};
use tiltspace::quadrature::{
    convolve_axis, convolve_density, limit_rhs_density, quadrature_density,
};
use tiltspace::tomography::{
    build_forward_map, fidelity_pure, reconstruct, trace_distance,
};

fn report(criterion: usize, name: &str, measured: f64, threshold: f64) {
    let verdict = if measured <= threshold { "PASS" } else { "FAIL" };
    println!(
        "[criterion {criterion:2}] {name}: {verdict} (measured {measured:.3e}, threshold {threshold:.1e})"
    );
    assert!(
        measured <= threshold,
        "criterion {criterion} '{name}': {measured:.3e} exceeds {threshold:.1e}"
    );
}

fn report_bool(criterion: usize, name: &str, ok: bool, detail: &str) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    println!("[criterion {criterion:2}] {name}: {verdict} ({detail})");
    assert!(ok, "criterion {criterion} '{name}': {detail}");
}

fn test_states(d: usize) -> (Vec<(&'static str, DensityOperator)>, Vec<(&'static str, DensityOperator)>) {
    let sigmas = vec![
        ("vacuum", DensityOperator::vacuum(d)),
        ("fock1", DensityOperator::fock(1, d).unwrap()),
        ("coherent(0.8)", DensityOperator::coherent(C64::new(0.8, 0.0), d).unwrap()),
        ("thermal(0.5)", DensityOperator::thermal(0.5, d).unwrap()),
    ];
    let rhos = vec![
        ("coherent(1+0.5i)", DensityOperator::coherent(C64::new(1.0, 0.5), d).unwrap()),
        ("fock2", DensityOperator::fock(2, d).unwrap()),
    ];
    (sigmas, rhos)
}

/// 1. The analytic generating-operator density equals the two-mode limit
/// statistics for every tilt and parameter state in the matrix.
#[test]
fn criterion_1_limit_equality() {
    let d = 60;
    let grid = Grid2D::square(-5.0, 5.0, 41).unwrap();
    let (sigmas, rhos) = test_states(d);
    let mut worst: f64 = 0.0;
    for theta in [FRAC_PI_2, FRAC_PI_4, 3.0 * FRAC_PI_4, -FRAC_PI_3] {
        let tilt = TiltAngle::new(theta).unwrap();
        for (s_name, sigma) in &sigmas {
            let gen = generating_operator(sigma, tilt).unwrap();
            for (r_name, rho) in &rhos {
                let analytic = phase_space_density(rho, &gen, &grid).unwrap();
                let simulated = limit_rhs_density(rho, sigma, theta, &grid).unwrap();
                let sup = analytic.max_abs_diff(&simulated);
                worst = worst.max(sup);
                println!(
                    "  θ = {theta:+.4}, σ = {s_name:14}, ρ = {r_name:16}: sup {sup:.2e}"
                );
            }
        }
    }
    report(1, "high-amplitude limit equality, 32 combinations", worst, 1e-5);
}

/// 2. At θ = π/2 the generating operator is the conjugated parameter state
/// and the tilt conjugator collapses to the identity.
#[test]
fn criterion_2_quarter_turn_reduction() {
    let d = 40;
    let tilt = TiltAngle::new(FRAC_PI_2).unwrap();
    let mut worst: f64 = 0.0;
    for sigma in [
        DensityOperator::coherent(C64::new(0.5, 0.7), d).unwrap(),
        DensityOperator::fock(3, d).unwrap(),
        DensityOperator::thermal(0.8, d).unwrap(),
    ] {
        let gen = generating_operator(&sigma, tilt).unwrap();
        worst = worst.max(max_abs_diff(
            &gen.s().matrix().view(),
            &sigma.conjugated().matrix().view(),
        ));
    }
    for theta in [FRAC_PI_2, -FRAC_PI_2] {
        let v = tilt_conjugator(&TiltAngle::new(theta).unwrap(), d);
        worst = worst.max(max_abs_diff(&v.view(), &identity(d).view()));
    }
    report(2, "θ = π/2 reduces to the conjugated parameter state", worst, 1e-10);
}

/// 3. Tilted-Weyl conjugation translates the density; standard-Weyl
/// conjugation shifts it through the tilt map instead, which differs.
#[test]
fn criterion_3_covariance_and_its_failure() {
    let d = 60;
    let tilt = TiltAngle::new(FRAC_PI_4).unwrap();
    let gen = generating_operator(&DensityOperator::vacuum(d), tilt).unwrap();
    let rho = DensityOperator::coherent(C64::new(0.3, 0.2), d).unwrap();
    let engine = WeylEngine::new(d);
    let probes: Vec<PhaseSpacePoint> = [
        (0.0, 0.0),
        (0.8, -0.3),
        (-0.5, 0.6),
        (1.2, 0.9),
        (-1.0, -0.7),
        (0.4, 1.3),
        (1.6, -1.1),
        (-1.4, 0.2),
        (0.9, 0.8),
    ]
    .iter()
    .map(|&(q, p)| PhaseSpacePoint::new(q, p))
    .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let (a, b) = (2.0 * rng.random::<f64>() - 1.0, 2.0 * rng.random::<f64>() - 1.0);
        let moved = rho.conjugate_by(&engine.tilted(&tilt, a, b).view());
        let lhs = phase_space_density_at(&moved, &gen, &probes).unwrap();
        let shifted: Vec<PhaseSpacePoint> = probes
            .iter()
            .map(|pt| PhaseSpacePoint::new(pt.q - a, pt.p - b))
            .collect();
        let rhs = phase_space_density_at(&rho, &gen, &shifted).unwrap();
        for (x, y) in lhs.iter().zip(rhs.iter()) {
            worst = worst.max((x - y).abs());
        }
    }
    report(3, "tilted covariance at 5 random displacements", worst, 1e-6);

    // standard Weyl conjugation shifts by f_θ(a, b) = (a, a·cosθ + b·sinθ)
    let (a, b) = (1.0, 0.0);
    let moved = rho.conjugate_by(&engine.weyl(a, b).view());
    let lhs = phase_space_density_at(&moved, &gen, &probes).unwrap();
    let tilt_shift = tilt.forward(PhaseSpacePoint::new(a, b));
    let through_map: Vec<PhaseSpacePoint> = probes
        .iter()
        .map(|pt| PhaseSpacePoint::new(pt.q - tilt_shift.q, pt.p - tilt_shift.p))
        .collect();
    let rhs_map = phase_space_density_at(&rho, &gen, &through_map).unwrap();
    let mut tilt_shift_err: f64 = 0.0;
    for (x, y) in lhs.iter().zip(rhs_map.iter()) {
        tilt_shift_err = tilt_shift_err.max((x - y).abs());
    }
    report(3, "standard-Weyl conjugation shifts through the tilt map", tilt_shift_err, 1e-6);

    let naive: Vec<PhaseSpacePoint> = probes
        .iter()
        .map(|pt| PhaseSpacePoint::new(pt.q - a, pt.p - b))
        .collect();
    let rhs_naive = phase_space_density_at(&rho, &gen, &naive).unwrap();
    let naive_gap = lhs
        .iter()
        .zip(rhs_naive.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    report_bool(
        3,
        "plain translation measurably fails at θ = π/4",
        naive_gap > 1e-3,
        &format!("translation mismatch {naive_gap:.3e} > 1e-3"),
    );
}

/// 4. Pushforward: the tilted density is the standard one through the
/// inverse tilt map with the 1/|sinθ| Jacobian.
#[test]
fn criterion_4_pushforward_relation() {
    let d = 50;
    let s = DensityOperator::coherent(C64::new(0.4, -0.2), d).unwrap();
    let rho = DensityOperator::coherent(C64::new(0.8, 0.1), d).unwrap();
    let std_tilt = TiltAngle::new(FRAC_PI_2).unwrap();
    let pts: Vec<PhaseSpacePoint> = (-3..=3)
        .flat_map(|i| (-3..=3).map(move |j| PhaseSpacePoint::new(0.9 * i as f64, 0.9 * j as f64)))
        .collect();
    let mut worst: f64 = 0.0;
    for theta in [FRAC_PI_4, -FRAC_PI_3] {
        let tilt = TiltAngle::new(theta).unwrap();
        let tilted = phase_space_density_at(
            &rho,
            &GeneratingOperator::from_parts(s.clone(), tilt),
            &pts,
        )
        .unwrap();
        let mapped: Vec<PhaseSpacePoint> = pts.iter().map(|&pt| tilt.inverse(pt)).collect();
        let standard = phase_space_density_at(
            &rho,
            &GeneratingOperator::from_parts(s.clone(), std_tilt),
            &mapped,
        )
        .unwrap();
        for (t, s_val) in tilted.iter().zip(standard.iter()) {
            worst = worst.max((t - s_val / tilt.sin_theta().abs()).abs());
        }
    }
    report(4, "tilt pushforward with Jacobian, θ ∈ {π/4, −π/3}", worst, 1e-9);
}

/// 5. The finite-amplitude histograms converge to the analytic limit as
/// the oscillator grows.
#[test]
fn criterion_5_finite_amplitude_convergence() {
    let theta = FRAC_PI_4;
    let tilt = TiltAngle::new(theta).unwrap();
    let d_sim = 16;
    let d_analytic = 60;
    let sigma = DensityOperator::vacuum(d_sim);
    let rho = DensityOperator::vacuum(d_sim);
    let gen = generating_operator(&DensityOperator::vacuum(d_analytic), tilt).unwrap();
    let rho_a = DensityOperator::vacuum(d_analytic);

    let mut tvs = Vec::new();
    for z in [1.0, 2.0, 3.0] {
        let cfg = NetworkConfig::recommended(tilt, C64::new(z, 0.0), d_sim).unwrap();
        let hist = joint_statistics(&rho, &sigma, &cfg).unwrap();
        let grid = hist.aligned_grid(5.0).unwrap();
        let limit = phase_space_density(&rho_a, &gen, &grid).unwrap();
        let tv = compare_to_limit(&hist, &limit).unwrap();
        println!("  |z| = {z}: TV = {tv:.4}");
        tvs.push(tv);
    }
    report_bool(
        5,
        "total variation decreases along |z| = 1, 2, 3",
        tvs[0] > tvs[1] && tvs[1] > tvs[2],
        &format!("TV sequence {:.4} > {:.4} > {:.4}", tvs[0], tvs[1], tvs[2]),
    );
    report(5, "TV at |z| = 3", tvs[2], 0.1);
}

/// 6. Cartesian margins of the analytic density are the smeared
/// quadratures.
#[test]
fn criterion_6_margins_are_smeared_quadratures() {
    let d = 70;
    let grid = Grid2D::square(-7.0, 7.0, 113).unwrap();
    let rho = DensityOperator::coherent(C64::new(0.7, 0.2), d).unwrap();
    let mut worst: f64 = 0.0;
    for theta in [FRAC_PI_2, FRAC_PI_4] {
        let tilt = TiltAngle::new(theta).unwrap();
        for sigma in [DensityOperator::vacuum(d), DensityOperator::fock(1, d).unwrap()] {
            let gen = generating_operator(&sigma, tilt).unwrap();
            let density = phase_space_density(&rho, &gen, &grid).unwrap();
            let (mu, mu_theta) = margin_measures(&gen, &grid.x).unwrap();

            let q_rho = quadrature_density(&rho, 0.0, &grid.x).unwrap();
            let conv_x = convolve_density(&mu, &q_rho).unwrap();
            let l1_x = window_l1(&density.marginal_x(), &conv_x);

            let qt_rho = quadrature_density(&rho, theta, &grid.y).unwrap();
            let conv_y = convolve_density(&mu_theta, &qt_rho).unwrap();
            let l1_y = window_l1(&density.marginal_y(), &conv_y);

            println!(
                "  θ = {theta:.4}, σ occupation {:.1}: L1(x) = {l1_x:.2e}, L1(y) = {l1_y:.2e}",
                sigma.expectation(&number_operator(d).view()).re
            );
            worst = worst.max(l1_x).max(l1_y);
        }
    }
    report(6, "margins equal convolved quadratures", worst, 1e-5);
}

/// L1 distance between a margin and a convolution restricted to the
/// margin's window (the convolution grid extends past it).
fn window_l1(margin: &Density1D, convolved: &Density1D) -> f64 {
    let grid = margin.grid();
    let start = ((grid.min() - convolved.grid().min()) / grid.spacing()).round() as usize;
    let w = grid.trapezoid_weights();
    (0..grid.count())
        .map(|k| w[k] * (margin.values()[k] - convolved.values()[start + k]).abs())
        .sum()
}

/// 7. Closed-form anchors: the dilation's vacuum element, the Husimi
/// density, and the zero circle of the mixed generator's Weyl transform.
#[test]
fn criterion_7_closed_form_anchors() {
    let d = 40;
    let mut worst: f64 = 0.0;
    for theta in [FRAC_PI_6, FRAC_PI_3, -2.0 * FRAC_PI_3] {
        let tilt = TiltAngle::new(theta).unwrap();
        let a = dilation(&tilt, d);
        worst = worst.max((a[(0, 0)].re - tilt.sin_theta().abs().sqrt()).abs());
    }
    report(7, "⟨0|A_θ|0⟩ = √|sinθ| for θ ∈ {π/6, π/3, −2π/3}", worst, 1e-8);

    let d = 50;
    let tilt = TiltAngle::new(FRAC_PI_2).unwrap();
    let gen = generating_operator(&DensityOperator::vacuum(d), tilt).unwrap();
    let grid = Grid2D::square(-4.0, 4.0, 41).unwrap();
    let husimi = phase_space_density(&DensityOperator::vacuum(d), &gen, &grid).unwrap();
    let mut err: f64 = 0.0;
    for (i, q) in grid.x.points().iter().enumerate() {
        for (j, p) in grid.y.points().iter().enumerate() {
            let expect = (-(q * q + p * p) / 2.0).exp() / (2.0 * PI);
            err = err.max((husimi.values()[(i, j)] - expect).abs());
        }
    }
    report(7, "vacuum-generator density is the Husimi Gaussian", err, 1e-8);

    let mut mixed: Array2<C64> = Array2::zeros((d, d));
    mixed[(0, 0)] = C64::new(0.5, 0.0);
    mixed[(1, 1)] = C64::new(0.5, 0.0);
    let s = DensityOperator::from_matrix(mixed).unwrap();
    let fine = Grid2D::square(-3.0, 3.0, 61).unwrap();
    let support = weyl_transform_support(&s, &fine, 0.02).unwrap();
    let cell = fine.x.spacing();
    let mut max_radial_gap: f64 = 0.0;
    for &(i, j) in support.flagged() {
        let r = (fine.x.point(i).powi(2) + fine.y.point(j).powi(2)).sqrt();
        max_radial_gap = max_radial_gap.max((r - 2.0).abs());
    }
    report_bool(
        7,
        "Weyl-transform zero circle at radius 2 located within one cell",
        !support.flagged().is_empty() && max_radial_gap <= cell * std::f64::consts::SQRT_2,
        &format!(
            "{} flags, worst radial gap {max_radial_gap:.3} vs cell diagonal {:.3}",
            support.flagged().len(),
            cell * std::f64::consts::SQRT_2
        ),
    );
}

/// 8. Detector inefficiency: identity at ε = 1, Gaussian convolution at
/// ε = 1/2, and the binomial counting kernel's exact completeness and
/// scaled mean.
#[test]
fn criterion_8_efficiency_smearing() {
    let d = 40;
    let tilt = TiltAngle::new(FRAC_PI_4).unwrap();
    let gen = generating_operator(&DensityOperator::vacuum(d), tilt).unwrap();

    let ideal = smeared_generator(&gen, &EfficiencyQuad::ideal(), 21).unwrap();
    let identity_err = max_abs_diff(&ideal.s().matrix().view(), &gen.s().matrix().view());
    report(8, "ε = (1,1,1,1) smearing is the identity", identity_err, 1e-12);

    // half-efficiency smearing equals convolving the density with the
    // Gaussian noise kernel on both axes
    let eff = EfficiencyQuad::new(0.5, 0.5, 0.5, 0.5).unwrap();
    let smeared = smeared_generator(&gen, &eff, 21).unwrap();
    let rho = DensityOperator::coherent(C64::new(0.6, 0.1), d).unwrap();
    let grid = Grid2D::square(-6.0, 6.0, 97).unwrap();
    let direct = phase_space_density(&rho, &smeared, &grid).unwrap();

    let base = phase_space_density(&rho, &gen, &grid).unwrap();
    let kernel_grid = Grid1D::new(-6.0, 6.0, 97).unwrap();
    let kx = efficiency_kernel(0.5, 0.5, &kernel_grid).unwrap();
    let ky = efficiency_kernel(0.5, 0.5, &kernel_grid).unwrap();
    let conv = convolve_axis(&ky, &convolve_axis(&kx, &base, ndarray::Axis(0)).unwrap(), ndarray::Axis(1))
        .unwrap();
    // compare on the original window
    let off_x = ((grid.x.min() - conv.grid().x.min()) / grid.x.spacing()).round() as usize;
    let off_y = ((grid.y.min() - conv.grid().y.min()) / grid.y.spacing()).round() as usize;
    let wx = grid.x.trapezoid_weights();
    let wy = grid.y.trapezoid_weights();
    let mut l1 = 0.0;
    for i in 0..grid.x.count() {
        for j in 0..grid.y.count() {
            let diff = (direct.values()[(i, j)] - conv.values()[(off_x + i, off_y + j)]).abs();
            l1 += wx[i] * wy[j] * diff;
        }
    }
    report(8, "half-efficiency density equals Gaussian-convolved density (L1)", l1, 1e-4);

    // binomial number POVM: exact completeness, detected mean ε·⟨N⟩
    let d = 45;
    let eps = 0.62;
    let kernel = binomial_counting_kernel(d, eps);
    let completeness = (0..d)
        .map(|m| ((0..d).map(|n| kernel[(m, n)]).sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max);
    report(8, "binomial counting kernel completeness", completeness, 1e-12);

    let probe = DensityOperator::coherent(C64::new(1.1, 0.4), d).unwrap();
    let mut detected_mean = 0.0;
    for n in 0..d {
        let p: f64 = (0..d).map(|m| kernel[(m, n)] * probe.matrix()[(m, m)].re).sum();
        detected_mean += n as f64 * p;
    }
    let n_mean = probe.expectation(&number_operator(d).view()).re;
    report(8, "detected mean is ε·⟨N⟩", (detected_mean - eps * n_mean).abs(), 1e-8);
}

/// 9. Tomography round trips and the informational equivalence of tilts.
#[test]
fn criterion_9_tomography() {
    let d = 6;
    let grid = Grid2D::square(-5.0, 5.0, 41).unwrap();
    let tilt_half = TiltAngle::new(FRAC_PI_2).unwrap();
    let tilt_quarter = TiltAngle::new(FRAC_PI_4).unwrap();
    let gen_half = generating_operator(&DensityOperator::vacuum(d), tilt_half).unwrap();
    let gen_quarter = generating_operator(&DensityOperator::vacuum(d), tilt_quarter).unwrap();
    let map_half = build_forward_map(&gen_half, &grid).unwrap();
    let map_quarter = build_forward_map(&gen_quarter, &grid).unwrap();

    // pure coherent round trip
    let psi_full = coherent_state(C64::new(0.7, 0.0), 30).unwrap();
    let psi = StateVector::new(Array1::from_iter(
        psi_full.amplitudes().iter().take(d).cloned(),
    ));
    let rho = DensityOperator::from_pure(&psi);
    let shaped = |m: &tiltspace::tomography::ForwardMap, r: &DensityOperator| {
        Array2::from_shape_vec(grid.shape(), m.apply(r).to_vec()).unwrap()
    };
    let rec = reconstruct(&shaped(&map_half, &rho), &map_half).unwrap();
    let fidelity = fidelity_pure(&psi, &rec.rho);
    report_bool(
        9,
        "noiseless coherent round trip",
        fidelity >= 0.99,
        &format!("fidelity {fidelity:.6} ≥ 0.99, residual {:.2e}, rank {}", rec.residual, rec.rank),
    );

    // fixed-seed rank-2 mixed state round trip
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut rand_unit = |d: usize| {
        let v: Array1<C64> = Array1::from_iter(
            (0..d).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)),
        );
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        v.mapv(|c| c / norm)
    };
    let v1 = rand_unit(d);
    let raw = rand_unit(d);
    let overlap: C64 = v1.iter().zip(raw.iter()).map(|(a, b)| a.conj() * b).sum();
    let v2 = {
        let adj = &raw - &v1.mapv(|c| c * overlap);
        let norm = adj.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        adj.mapv(|c| c / norm)
    };
    let mut mat: Array2<C64> = Array2::zeros((d, d));
    for i in 0..d {
        for j in 0..d {
            mat[(i, j)] = 0.6 * v1[i] * v1[j].conj() + 0.4 * v2[i] * v2[j].conj();
        }
    }
    let mixed = DensityOperator::from_matrix(mat).unwrap();
    let rec = reconstruct(&shaped(&map_half, &mixed), &map_half).unwrap();
    let dist = trace_distance(&mixed, &rec.rho).unwrap();
    report(9, "noiseless rank-2 round trip (trace distance)", dist, 0.01);

    // informational equivalence: both tilts reconstruct the same state
    let rec_half = reconstruct(&shaped(&map_half, &rho), &map_half).unwrap();
    let rec_quarter = reconstruct(&shaped(&map_quarter, &rho), &map_quarter).unwrap();
    let gap = trace_distance(&rec_half.rho, &rec_quarter.rho).unwrap();
    report(9, "tilts π/2 and π/4 reconstruct the same state", gap, 0.02);
}

/// 10. The tilted Weyl operators satisfy the projective multiplication law
/// with cocycle e^{i(qp′−pq′)/(2sinθ)}.
#[test]
fn criterion_10_projective_representation() {
    let d = 60;
    let tilt = TiltAngle::new(FRAC_PI_4).unwrap();
    let engine = WeylEngine::new(d);
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let (q, p, q2, p2) = (
            1.5 * rng.random::<f64>() - 0.75,
            1.5 * rng.random::<f64>() - 0.75,
            1.5 * rng.random::<f64>() - 0.75,
            1.5 * rng.random::<f64>() - 0.75,
        );
        let lhs = engine.tilted(&tilt, q + q2, p + p2);
        let cocycle = C64::from_polar(1.0, (q * p2 - p * q2) / (2.0 * tilt.sin_theta()));
        let rhs = engine
            .tilted(&tilt, q, p)
            .dot(&engine.tilted(&tilt, q2, p2))
            .mapv(|c| c * cocycle);
        worst = worst.max(max_abs_diff_block(&lhs.view(), &rhs.view(), d / 2));
    }
    let _ = tilted_weyl(&tilt, 0.1, 0.2, 8); // exercise the one-off constructor too
    let (vals, _) = hermitian_eigh(&engine.tilted(&tilt, 0.3, 0.4)).unwrap();
    assert!(vals.iter().all(|v| v.is_finite()));
    report(10, "projective law with tilted cocycle, 10 random pairs", worst, 1e-7);
}
