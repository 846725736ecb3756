//! Property tests for the model invariants: gain identity, MAP equivalence,
//! limit behaviour, multiplier monotonicity, KKT conditions, and the ergodic
//! residual identity.

use misinfo_core::belief::{
    conveyance_distance, gain_matrices, population_conveyance, Covariance, Population,
    ViewerProfile, SYMMETRY_TOL,
};
use misinfo_core::linalg::{Matrix, Vector};
use misinfo_core::policy::is_admissible;
use misinfo_core::reporter::{
    ergodic_unconstrained_report, optimal_report, population_moments, report_for_lambda,
};
use proptest::prelude::*;

/// 2x2 SPD matrix with the given eigenvalues, rotated by `theta`.
fn rotated_spd(eig1: f64, eig2: f64, theta: f64) -> Matrix {
    let (s, c) = theta.sin_cos();
    let r = Matrix::from_rows(2, vec![c, -s, s, c]).unwrap();
    r.matmul(&Matrix::diag(&[eig1, eig2])).matmul(&r.transpose())
}

fn covariance(eig1: f64, eig2: f64, theta: f64) -> Covariance {
    Covariance::new(rotated_spd(eig1, eig2, theta)).unwrap()
}

prop_compose! {
    fn arb_covariance(lo: f64, hi: f64)
        (e1 in lo..hi, e2 in lo..hi, th in 0.0..core::f64::consts::PI)
        -> Covariance
    {
        covariance(e1, e2, th)
    }
}

prop_compose! {
    fn arb_vec2(scale: f64)(a in -1.0..1.0f64, b in -1.0..1.0f64) -> Vector {
        Vector::from_slice(&[a * scale, b * scale])
    }
}

/// Maximizer of the explicit Gaussian log-posterior, found numerically by a
/// finite-difference Newton step. Second differences of a quadratic are
/// exact, so this is an independent route to the MAP point that never uses
/// the gain-matrix formulas.
fn map_by_numerical_maximization(
    sigma: &Matrix,
    sigma_s: &Matrix,
    mu: &Vector,
    y: &Vector,
) -> Vector {
    fn inv2(m: &Matrix) -> Matrix {
        let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
        Matrix::from_rows(
            2,
            vec![
                m[(1, 1)] / det,
                -m[(0, 1)] / det,
                -m[(1, 0)] / det,
                m[(0, 0)] / det,
            ],
        )
        .unwrap()
    }
    let si = inv2(sigma);
    let ssi = inv2(sigma_s);
    let log_post = |x: &Vector| -> f64 {
        let dp = x.sub(mu);
        let dl = x.sub(y);
        -dp.dot(&si.matvec(&dp)) - dl.dot(&ssi.matvec(&dl))
    };

    let h = 0.5;
    let at = |a: f64, b: f64| log_post(&Vector::from_slice(&[a, b]));
    let f0 = at(0.0, 0.0);
    let gx = (at(h, 0.0) - at(-h, 0.0)) / (2.0 * h);
    let gy = (at(0.0, h) - at(0.0, -h)) / (2.0 * h);
    let hxx = (at(h, 0.0) - 2.0 * f0 + at(-h, 0.0)) / (h * h);
    let hyy = (at(0.0, h) - 2.0 * f0 + at(0.0, -h)) / (h * h);
    let hxy = (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4.0 * h * h);

    // Newton step from the origin: x* = -H^-1 g, exact for a quadratic.
    let det = hxx * hyy - hxy * hxy;
    Vector::from_slice(&[
        -(hyy * gx - hxy * gy) / det,
        -(hxx * gy - hxy * gx) / det,
    ])
}

proptest! {
    #[test]
    fn gain_identity_holds(
        sigma in arb_covariance(0.05, 20.0),
        sigma_s in arb_covariance(0.05, 20.0),
    ) {
        let (a, b) = gain_matrices(&sigma, &sigma_s).unwrap();
        prop_assert!(a.add(&b).max_abs_diff(&Matrix::identity(2)) < SYMMETRY_TOL);
    }

    #[test]
    fn posterior_matches_numerical_map(
        sigma in arb_covariance(0.2, 3.0),
        sigma_s in arb_covariance(0.2, 3.0),
        mu in arb_vec2(2.0),
        y in arb_vec2(2.0),
    ) {
        let profile = ViewerProfile::new(mu.clone(), sigma.clone(), sigma_s.clone()).unwrap();
        let zeta = profile.posterior_belief(&y).unwrap();
        let oracle = map_by_numerical_maximization(sigma.matrix(), sigma_s.matrix(), &mu, &y);
        prop_assert!(zeta.max_abs_diff(&oracle) < 1e-6);
    }

    #[test]
    fn perfect_credibility_adopts_the_report(
        sigma in arb_covariance(0.2, 3.0),
        mu in arb_vec2(2.0),
        y in arb_vec2(2.0),
    ) {
        let trusting = Covariance::scaled_identity(2, 1e-8).unwrap();
        let profile = ViewerProfile::new(mu, sigma, trusting).unwrap();
        let zeta = profile.posterior_belief(&y).unwrap();
        prop_assert!(zeta.max_abs_diff(&y) < 1e-6);
    }

    #[test]
    fn closed_mind_keeps_the_prior(
        sigma_s in arb_covariance(0.2, 3.0),
        mu in arb_vec2(2.0),
        y in arb_vec2(2.0),
    ) {
        let certain = Covariance::scaled_identity(2, 1e-8).unwrap();
        let profile = ViewerProfile::new(mu.clone(), certain, sigma_s).unwrap();
        let zeta = profile.posterior_belief(&y).unwrap();
        prop_assert!(zeta.max_abs_diff(&mu) < 1e-6);
    }

    #[test]
    fn conveyance_is_a_metric_restriction(a in arb_vec2(2.0), b in arb_vec2(2.0)) {
        let d_ab = conveyance_distance(&a, &b).unwrap();
        let d_ba = conveyance_distance(&b, &a).unwrap();
        prop_assert!(d_ab >= 0.0);
        prop_assert_eq!(d_ab, d_ba);
        prop_assert_eq!(conveyance_distance(&a, &a).unwrap(), 0.0);
        if a != b {
            prop_assert!(d_ab > 0.0);
        }
    }

    #[test]
    fn report_distance_is_non_increasing_in_lambda(
        sigma in arb_covariance(0.2, 3.0),
        sigma_s in arb_covariance(0.2, 3.0),
        mus in proptest::collection::vec(arb_vec2(1.0), 1..6),
        x_s in arb_vec2(1.0),
        x_t in arb_vec2(1.0),
    ) {
        let pop = Population::ergodic(&sigma, &sigma_s, mus).unwrap();
        let m = population_moments(&pop).unwrap();
        let mut last = f64::INFINITY;
        for lambda in [0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 32.0, 128.0] {
            let y = report_for_lambda(&m, &x_s, &x_t, lambda).unwrap();
            let d = y.distance(&x_t);
            prop_assert!(d <= last + 1e-12);
            last = d;
        }
    }

    #[test]
    fn binding_designs_satisfy_kkt_and_admissibility(
        sigma in arb_covariance(0.2, 3.0),
        sigma_s in arb_covariance(0.2, 3.0),
        mus in proptest::collection::vec(arb_vec2(1.0), 1..6),
        x_s in arb_vec2(1.0),
        x_t in arb_vec2(1.0),
        epsilon in 0.1..2.0f64,
    ) {
        let pop = Population::ergodic(&sigma, &sigma_s, mus).unwrap();
        let m = population_moments(&pop).unwrap();
        let d = optimal_report(&m, &x_s, &x_t, epsilon).unwrap();

        // The designed report always passes the filter it was designed for.
        prop_assert!(is_admissible(&d.y_star, &x_t, epsilon));

        if d.binding {
            prop_assert!((d.y_star.distance(&x_t) - epsilon).abs() < 1e-6);
            // Lagrangian gradient vanishes at (y*, lambda*).
            let grad = m.a2().matvec(&d.y_star)
                .add(m.abmu())
                .sub(&m.at().matvec(&x_s))
                .add(&d.y_star.sub(&x_t).scale(d.lambda_star))
                .scale(2.0);
            prop_assert!(grad.norm() < 1e-6);
        } else {
            prop_assert_eq!(d.lambda_star, 0.0);
        }
    }

    #[test]
    fn ergodic_identity_and_source_invariant_residuals(
        sigma in arb_covariance(0.2, 3.0),
        sigma_s in arb_covariance(0.2, 3.0),
        mus in proptest::collection::vec(arb_vec2(1.0), 2..8),
        x_s in arb_vec2(1.0),
        x_s2 in arb_vec2(1.0),
    ) {
        let pop = Population::ergodic(&sigma, &sigma_s, mus).unwrap();
        let mu_bar = pop.mean_belief();
        let m = population_moments(&pop).unwrap();
        let x_t = Vector::zeros(2);

        // Closed form equals the general path at lambda = 0.
        let y0 = report_for_lambda(&m, &x_s, &x_t, 0.0).unwrap();
        let closed = ergodic_unconstrained_report(&sigma, &sigma_s, &mu_bar, &x_s).unwrap();
        prop_assert!(y0.max_abs_diff(&closed) < 1e-8);

        // Residuals are B(mu_i - mu_bar), independent of the source.
        let (_, gain_b) = gain_matrices(&sigma, &sigma_s).unwrap();
        let y0_other = report_for_lambda(&m, &x_s2, &x_t, 0.0).unwrap();
        for v in pop.viewers() {
            let residual = v.posterior_belief(&y0).unwrap().sub(&x_s);
            let expected = gain_b.matvec(&v.mu().sub(&mu_bar));
            prop_assert!(residual.max_abs_diff(&expected) < 1e-8);

            let residual_other = v.posterior_belief(&y0_other).unwrap().sub(&x_s2);
            prop_assert!(residual.max_abs_diff(&residual_other) < 1e-8);
        }

        // Hence the unconstrained conveyance does not depend on the source.
        let (c1, _) = population_conveyance(&pop, &x_s, &y0).unwrap();
        let (c2, _) = population_conveyance(&pop, &x_s2, &y0_other).unwrap();
        prop_assert!((c1 - c2).abs() < 1e-8);
    }
}
