//! Optimality of the closed-form report against the brute-force oracles on
//! random instances in two and three dimensions. The lattice oracle is the
//! authority; projected descent is the cross-check.

use misinfo_core::belief::{Covariance, Population, ViewerProfile};
use misinfo_core::linalg::{Matrix, Vector};
use misinfo_core::oracle::{brute_force_report, projected_descent_report};
use misinfo_core::reporter::{optimal_report, population_moments};
use misinfo_core::simulation::{draw_rng, sample_unit_sphere};
use rand::Rng;

/// Random SPD matrix with eigenvalues in [0.2, 3.0]: random orthogonal basis
/// from QR-free Givens composition in 2-d, or a rotation pair in 3-d.
fn random_spd(rng: &mut impl Rng, dim: usize) -> Matrix {
    let eigs: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.2..3.0)).collect();
    let mut basis = Matrix::identity(dim);
    // Compose plane rotations over every axis pair.
    for i in 0..dim {
        for j in (i + 1)..dim {
            let theta: f64 = rng.gen_range(0.0..std::f64::consts::PI);
            let (s, c) = theta.sin_cos();
            let mut g = Matrix::identity(dim);
            g[(i, i)] = c;
            g[(j, j)] = c;
            g[(i, j)] = -s;
            g[(j, i)] = s;
            basis = basis.matmul(&g);
        }
    }
    basis.matmul(&Matrix::diag(&eigs)).matmul(&basis.transpose())
}

fn random_instance(seed: u64, index: u64, dim: usize, eps_hi: f64) -> (Population, Vector, Vector, f64) {
    let mut rng = draw_rng(seed, index);
    let viewers: Vec<ViewerProfile> = (0..4)
        .map(|_| {
            let scale = rng.gen_range(0.0..1.5);
            let mu = sample_unit_sphere(&mut rng, dim).scale(scale);
            let sigma = Covariance::new(random_spd(&mut rng, dim)).unwrap();
            let sigma_s = Covariance::new(random_spd(&mut rng, dim)).unwrap();
            ViewerProfile::new(mu, sigma, sigma_s).unwrap()
        })
        .collect();
    let pop = Population::new(viewers).unwrap();
    let x_s = sample_unit_sphere(&mut rng, dim);
    let x_t = sample_unit_sphere(&mut rng, dim);
    let eps = rng.gen_range(0.1..eps_hi);
    (pop, x_s, x_t, eps)
}

#[test]
fn closed_form_is_optimal_in_two_dimensions() {
    for i in 0..60u64 {
        let (pop, x_s, x_t, eps) = random_instance(2202, i, 2, 2.0);
        let m = population_moments(&pop).unwrap();
        let design = optimal_report(&m, &x_s, &x_t, eps).unwrap();
        let grid = brute_force_report(&pop, &x_s, &x_t, eps, 1e-3).unwrap();
        let descent = projected_descent_report(&pop, &x_s, &x_t, eps).unwrap();
        assert!(
            (design.objective - grid.objective).abs() <= 1e-4,
            "instance {i}: design {} vs grid {}",
            design.objective,
            grid.objective
        );
        assert!(
            (design.objective - descent.objective).abs() <= 1e-4,
            "instance {i}: design {} vs descent {}",
            design.objective,
            descent.objective
        );
    }
}

#[test]
fn closed_form_is_optimal_in_three_dimensions() {
    // Coarser lattice in 3-d keeps the point count tractable; the boundary
    // projection keeps the objective error quadratic in the resolution.
    for i in 0..12u64 {
        let (pop, x_s, x_t, eps) = random_instance(3303, i, 3, 0.4);
        let m = population_moments(&pop).unwrap();
        let design = optimal_report(&m, &x_s, &x_t, eps).unwrap();
        let grid = brute_force_report(&pop, &x_s, &x_t, eps, 4e-3).unwrap();
        let descent = projected_descent_report(&pop, &x_s, &x_t, eps).unwrap();
        assert!(
            (design.objective - grid.objective).abs() <= 1e-4,
            "instance {i}: design {} vs grid {}",
            design.objective,
            grid.objective
        );
        assert!(
            (design.objective - descent.objective).abs() <= 1e-4,
            "instance {i}: design {} vs descent {}",
            design.objective,
            descent.objective
        );
    }
}
