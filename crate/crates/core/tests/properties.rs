//! Cross-module invariants exercised on seeded random inputs: factorization
//! residuals, fidelity symmetries, dual-route identities, round trips, and
//! the closed-form agreements of the discriminability measure.

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qsd_core::discriminability::{
    discriminability, equal_prior_closed_form, fidelity_for_permutation,
    normalized_discriminability, two_state_closed_form, PermStrategy,
};
use qsd_core::exec;
use qsd_core::matrix::{
    cholesky_lower, fidelity, fidelity_2x2, hermitian_eig, max_abs_entry, sqrt_psd, ul_factor,
    C64, ComplexMatrix, HermitianMatrix,
};
use qsd_core::perm::{factorial, identity, permutation_from_index};
use qsd_core::problem::{
    dual_coefficients, random_problem, two_state_family, DiscriminationProblem, GramMatrix,
    Priors, StateSet,
};
use qsd_core::tolerances::{CLAMP_TOL, TOL_RANK};
use qsd_core::transform::{
    associated_pair, gs_coefficients, inverse_parametrization, t_matrix_direct,
};

fn ginibre(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.sample(rand_distr::StandardNormal), rng.sample(rand_distr::StandardNormal))
    })
}

/// Positive definite with spectrum bounded away from zero.
fn random_pd(n: usize, rng: &mut ChaCha8Rng) -> HermitianMatrix {
    let x = ginibre(n, rng);
    let m = &x * x.adjoint() + ComplexMatrix::identity(n, n).scale(0.1);
    HermitianMatrix::new(m).unwrap()
}

/// Full-rank density matrix: conditioned Wishart, normalized to unit trace.
fn random_density(n: usize, rng: &mut ChaCha8Rng) -> HermitianMatrix {
    let x = ginibre(n, rng);
    let m = &x * x.adjoint() + ComplexMatrix::identity(n, n).scale(0.05);
    let trace: f64 = (0..n).map(|i| m[(i, i)].re).sum();
    HermitianMatrix::new(m.unscale(trace)).unwrap()
}

fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    ginibre(n, rng).qr().q()
}

fn random_permutation(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut p = identity(n);
    p.shuffle(rng);
    p
}

#[test]
fn factorization_residuals_stay_relative() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..300 {
        let n = 1 + trial % 8;
        let m = random_pd(n, &mut rng);
        let norm = m.matrix().norm();

        let l = cholesky_lower(&m, TOL_RANK).unwrap();
        assert!((&l * l.adjoint() - m.matrix()).norm() <= 1e-10 * norm, "chol, n={n}");

        let b = ul_factor(&m, TOL_RANK).unwrap();
        assert!((b.matrix() * b.matrix().adjoint() - m.matrix()).norm() <= 1e-10 * norm, "ul, n={n}");

        let s = sqrt_psd(&m, CLAMP_TOL).unwrap();
        assert!((s.matrix() * s.matrix() - m.matrix()).norm() <= 1e-10 * norm, "sqrt, n={n}");
    }
}

#[test]
fn eigendecomposition_reconstructs_and_orders() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for trial in 0..200 {
        let n = 1 + trial % 8;
        let m = HermitianMatrix::new(ginibre(n, &mut rng)).unwrap();
        let (vals, vecs) = hermitian_eig(&m).unwrap();
        assert!(vals.windows(2).all(|w| w[0] <= w[1]), "ascending, n={n}");
        assert!((vecs.adjoint() * &vecs - ComplexMatrix::identity(n, n)).norm() <= 1e-12 * n as f64);
        let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            n,
            vals.iter().map(|&v| C64::new(v, 0.0)),
        ));
        let residual = (&vecs * diag * vecs.adjoint() - m.matrix()).norm();
        assert!(residual <= 1e-10 * m.matrix().norm().max(1.0), "residual, n={n}");
    }
}

#[test]
fn unit_trace_pd_spectra_behave() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for trial in 0..100 {
        let n = 2 + trial % 5;
        let rho = random_density(n, &mut rng);
        let (vals, _) = hermitian_eig(&rho).unwrap();
        assert!(vals.iter().all(|&v| v > 0.0));
        assert!((vals.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn fidelity_is_symmetric_and_unitarily_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for trial in 0..100 {
        let n = 2 + trial % 5;
        let rho = random_density(n, &mut rng);
        let sigma = random_density(n, &mut rng);
        let f1 = fidelity(&rho, &sigma).unwrap();
        let f2 = fidelity(&sigma, &rho).unwrap();
        assert!((f1 - f2).abs() <= 1e-10, "symmetry, n={n}: {f1} vs {f2}");
        assert!((0.0..=1.0).contains(&f1));

        let u = random_unitary(n, &mut rng);
        let rho_u = HermitianMatrix::new(&u * rho.matrix() * u.adjoint()).unwrap();
        let sigma_u = HermitianMatrix::new(&u * sigma.matrix() * u.adjoint()).unwrap();
        let f3 = fidelity(&rho_u, &sigma_u).unwrap();
        assert!((f1 - f3).abs() <= 1e-10, "unitary invariance, n={n}: {f1} vs {f3}");
    }
}

#[test]
fn two_by_two_fidelity_matches_general_kernel() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..300 {
        let rho = random_density(2, &mut rng);
        let sigma = random_density(2, &mut rng);
        let general = fidelity(&rho, &sigma).unwrap();
        let closed = fidelity_2x2(&rho, &sigma).unwrap();
        assert!((general - closed).abs() <= 1e-12, "{general} vs {closed}");
    }
}

#[test]
fn fidelity_against_maximally_mixed_is_trace_of_root() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    for trial in 0..60 {
        let n = 2 + trial % 5;
        let rho = random_density(n, &mut rng);
        let mixed = HermitianMatrix::from_real_diagonal(&vec![1.0 / n as f64; n]);
        let f = fidelity(&rho, &mixed).unwrap();
        let tr = sqrt_psd(&rho, CLAMP_TOL).unwrap().trace_real();
        assert!((f - tr * tr / n as f64).abs() <= 1e-12);
    }
}

/// The same matrix T^(N)† diag(η_p) T^(N), built once from the triangular
/// route (Cholesky + back-substitution) and once from the dual coefficients
/// K = G⁻¹ (LU inversion): ρ_T is proportional to the prior-weighted sum of
/// dual-state projectors, and the two routes share no factorization code.
#[test]
fn dual_route_reproduces_the_pair_and_its_trace() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for trial in 0..70 {
        let n = 2 + trial % 7;
        let p = random_problem(n, n + 1, 3000 + trial as u64).unwrap();
        let perm = random_permutation(n, &mut rng);
        let eta = ComplexMatrix::from_fn(n, n, |i, j| {
            if i == j { C64::new(p.priors()[perm[i]], 0.0) } else { C64::new(0.0, 0.0) }
        });

        let t = t_matrix_direct(p.gram(), TOL_RANK).unwrap();
        let m1 = t.matrix().adjoint() * &eta * t.matrix();

        let a = gs_coefficients(p.gram(), TOL_RANK).unwrap();
        let k = dual_coefficients(p.gram()).unwrap();
        let ak = a.matrix() * &k;
        let m2 = &ak * &eta * ak.adjoint();

        assert!(max_abs_entry(&(&m1 - &m2)) <= 1e-10, "dual route, n={n}");

        let lhs: f64 = (0..n).map(|i| m1[(i, i)].re).sum();
        let rhs: f64 = (0..n).map(|i| p.priors()[perm[i]] * k[(i, i)].re).sum();
        assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs(), "trace identity, n={n}");
    }
}

#[test]
fn round_trip_problem_to_density_and_back() {
    for trial in 0..100u64 {
        let n = 2 + (trial as usize) % 5;
        let p = random_problem(n, n, 4000 + trial).unwrap();
        let pair = associated_pair(&p, &identity(n), TOL_RANK).unwrap();
        let q = inverse_parametrization(&pair.rho_t, TOL_RANK).unwrap();
        assert!(max_abs_entry(&(q.gram().matrix() - p.gram().matrix())) <= 1e-8, "gram, n={n}");
        for (a, b) in q.priors().iter().zip(p.priors()) {
            assert!((a - b).abs() <= 1e-8, "priors, n={n}");
        }
    }
}

#[test]
fn round_trip_density_to_problem_and_back() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    for trial in 0..100 {
        let n = 2 + trial % 5;
        let rho = random_density(n, &mut rng);
        let p = inverse_parametrization(&rho, TOL_RANK).unwrap();
        let pair = associated_pair(&p, &identity(n), TOL_RANK).unwrap();
        assert!(max_abs_entry(&(pair.rho_t.matrix() - rho.matrix())) <= 1e-8, "n={n}");
    }
}

#[test]
fn pair_approaches_diagonal_as_overlap_vanishes() {
    let mut last = f64::INFINITY;
    for k in (0..=9).rev() {
        let gamma = 0.1 * k as f64;
        let p = two_state_family(C64::new(gamma, 0.0), 0.4).unwrap();
        let pair = associated_pair(&p, &identity(2), TOL_RANK).unwrap();
        let dev = max_abs_entry(&(pair.rho_t.matrix() - pair.eta_matrix().matrix()));
        assert!(dev <= last + 1e-15, "gamma={gamma}: deviation not shrinking");
        assert!(dev <= 2.0 * gamma + 1e-14, "gamma={gamma}: deviation {dev}");
        last = dev;
    }
    assert!(last < 1e-14);
}

#[test]
fn discriminability_bounds_and_orthonormal_maximum() {
    for trial in 0..100u64 {
        let n = 2 + (trial as usize) % 5;
        let p = random_problem(n, n + 1, 5000 + trial).unwrap();
        let r = discriminability(&p, &PermStrategy::default(), TOL_RANK).unwrap();
        assert!(r.value >= 1.0 / n as f64 - 1e-10);
        assert!(r.value <= 1.0 + 1e-10);
        assert!((0.0..=1.0).contains(&r.normalized));
    }
    let orthonormal = DiscriminationProblem::from_gram(
        GramMatrix::new(HermitianMatrix::identity(4)),
        Priors::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap(),
    )
    .unwrap();
    let r = discriminability(&orthonormal, &PermStrategy::default(), TOL_RANK).unwrap();
    assert!((r.value - 1.0).abs() <= 1e-10);
}

#[test]
fn uniform_priors_minimize_discriminability() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for trial in 0..10u64 {
        let n = 2 + (trial as usize) % 4;
        let gram = random_problem(n, n, 6000 + trial).unwrap().gram().clone();
        let uniform = DiscriminationProblem::from_gram(gram.clone(), Priors::uniform(n)).unwrap();
        let d_uniform = discriminability(&uniform, &PermStrategy::default(), TOL_RANK).unwrap().value;
        for _ in 0..30 {
            let draws: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(rand_distr::Exp1)).collect();
            let total: f64 = draws.iter().sum();
            let priors = Priors::new(draws.into_iter().map(|x| x / total).collect()).unwrap();
            let p = DiscriminationProblem::from_gram(gram.clone(), priors).unwrap();
            let d = discriminability(&p, &PermStrategy::default(), TOL_RANK).unwrap().value;
            assert!(d >= d_uniform - 1e-10, "n={n}: D={d} below uniform {d_uniform}");
        }
    }
}

#[test]
fn exact_search_agrees_with_two_state_closed_form() {
    for i in 1..19 {
        let eta1 = 0.05 * i as f64;
        for j in 0..20 {
            let gamma = 0.05 * j as f64;
            let p = two_state_family(C64::new(gamma, 0.0), eta1).unwrap();
            let d = discriminability(&p, &PermStrategy::default(), TOL_RANK).unwrap().value;
            let cf = two_state_closed_form(eta1, C64::new(gamma, 0.0)).unwrap();
            assert!((d - cf).abs() <= 1e-10, "eta1={eta1} gamma={gamma}: {d} vs {cf}");
        }
    }
}

#[test]
fn equal_prior_identity_holds_for_uniform_priors() {
    for trial in 0..50u64 {
        let n = 2 + (trial as usize) % 5;
        let gram = random_problem(n, n, 7000 + trial).unwrap().gram().clone();
        let p = DiscriminationProblem::from_gram(gram, Priors::uniform(n)).unwrap();
        let d = discriminability(&p, &PermStrategy::default(), TOL_RANK).unwrap().value;
        let cf = equal_prior_closed_form(&p, TOL_RANK).unwrap();
        assert!((d - cf).abs() <= 1e-10, "n={n}: {d} vs {cf}");
    }
}

#[test]
fn discriminability_is_invariant_under_global_unitaries() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for trial in 0..20u64 {
        let n = 2 + (trial as usize) % 4;
        let d_ambient = n + 2;
        let p = random_problem(n, d_ambient, 8000 + trial).unwrap();
        let d1 = discriminability(&p, &PermStrategy::default(), TOL_RANK).unwrap().value;

        let u = random_unitary(d_ambient, &mut rng);
        let rotated = StateSet::new(&u * p.states().unwrap().matrix()).unwrap();
        let q = DiscriminationProblem::from_states(
            rotated,
            Priors::new(p.priors().to_vec()).unwrap(),
        )
        .unwrap();
        let d2 = discriminability(&q, &PermStrategy::default(), TOL_RANK).unwrap().value;
        assert!((d1 - d2).abs() <= 1e-10, "n={n}: {d1} vs {d2}");
    }
}

#[test]
fn two_state_discriminability_decreases_with_overlap() {
    let mut last = f64::INFINITY;
    for k in 0..40 {
        let gamma = 0.025 * k as f64;
        let p = two_state_family(C64::new(gamma, 0.0), 0.5).unwrap();
        let d = discriminability(&p, &PermStrategy::default(), TOL_RANK).unwrap().value;
        assert!(d < last, "gamma={gamma}: not strictly decreasing");
        last = d;
    }
}

#[test]
fn rescaled_two_state_curve_dominates_unambiguous_baseline() {
    for k in 1..100 {
        let gamma = 0.01 * k as f64;
        let p = two_state_family(C64::new(gamma, 0.0), 0.5).unwrap();
        let d = discriminability(&p, &PermStrategy::default(), TOL_RANK).unwrap().value;
        let rescaled = 2.0 * d - 1.0;
        let expected = (1.0 - gamma * gamma).sqrt();
        assert!((rescaled - expected).abs() <= 1e-10, "gamma={gamma}");
        assert!(rescaled > 1.0 - gamma, "gamma={gamma}: dominance fails");
    }
}

/// The exact search must not depend on how the permutation batch is
/// scheduled: the parallel and sequential map produce the same values, and
/// single evaluations reproduce the listed per-permutation fidelities
/// bitwise.
#[test]
fn permutation_search_is_schedule_independent() {
    // n = 5 puts the batch (120 permutations) over the parallel threshold.
    for n in [4usize, 5] {
        let p = random_problem(n, n + 1, 99).unwrap();
        let total = factorial(n);
        let f = |idx: usize| {
            fidelity_for_permutation(&p, &permutation_from_index(idx, n), TOL_RANK).unwrap()
        };
        let par = exec::map_indexed(total, f);
        let seq = exec::map_indexed_seq(total, f);
        assert_eq!(par, seq);

        let r1 = discriminability(&p, &PermStrategy::default(), TOL_RANK).unwrap();
        let r2 = discriminability(&p, &PermStrategy::default(), TOL_RANK).unwrap();
        assert_eq!(r1.value.to_bits(), r2.value.to_bits());
        assert_eq!(r1.argmax_permutation, r2.argmax_permutation);
        if let Some(per) = &r1.fidelity_per_permutation {
            for (idx, (perm, val)) in per.iter().enumerate() {
                assert_eq!(perm, &permutation_from_index(idx, n));
                assert_eq!(val.to_bits(), par[idx].to_bits());
            }
        }
    }
}

fn density_2x2(p: f64, r: f64, phase: f64) -> HermitianMatrix {
    let z = C64::from_polar(r * (p * (1.0 - p)).sqrt(), phase);
    HermitianMatrix::new(ComplexMatrix::from_row_slice(2, 2, &[
        C64::new(p, 0.0), z,
        z.conj(), C64::new(1.0 - p, 0.0),
    ]))
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn prop_two_state_closed_form_stays_in_bounds(
        eta1 in 0.01f64..0.99,
        gamma in 0.0f64..0.99,
    ) {
        let d = two_state_closed_form(eta1, C64::new(gamma, 0.0)).unwrap();
        prop_assert!(d >= 0.5 - 1e-12);
        prop_assert!(d <= 1.0 + 1e-12);
    }

    #[test]
    fn prop_fidelity_of_qubit_densities_is_symmetric(
        p in 0.01f64..0.99,
        q in 0.01f64..0.99,
        r1 in 0.0f64..0.95,
        r2 in 0.0f64..0.95,
        ph1 in 0.0f64..std::f64::consts::TAU,
        ph2 in 0.0f64..std::f64::consts::TAU,
    ) {
        let rho = density_2x2(p, r1, ph1);
        let sigma = density_2x2(q, r2, ph2);
        let f12 = fidelity(&rho, &sigma).unwrap();
        let f21 = fidelity(&sigma, &rho).unwrap();
        prop_assert!((f12 - f21).abs() <= 1e-10);
        prop_assert!((f12 - fidelity_2x2(&rho, &sigma).unwrap()).abs() <= 1e-12);
        prop_assert!((0.0..=1.0).contains(&f12));
    }

    #[test]
    fn prop_normalization_is_affine_and_bounded(
        n in 2usize..7,
        t in 0.0f64..=1.0,
    ) {
        let lo = 1.0 / n as f64;
        let d = lo + t * (1.0 - lo);
        let norm = normalized_discriminability(d, n).unwrap();
        prop_assert!((0.0..=1.0).contains(&norm));
        prop_assert!((norm - (n as f64 * d - 1.0) / (n as f64 - 1.0)).abs() <= 1e-12);
    }
}
