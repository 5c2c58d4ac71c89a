//! Randomized invariants. Each case draws a seed and builds its inputs from
//! the crate's deterministic generators, so shrinking reports a seed.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

use dilation::contraction::{self, Contraction, RationalMatrixFunction};
use dilation::cp::{self, StinespringSpace};
use dilation::kernel::{self, FiniteKernel};
use dilation::linalg::{self, ONE};
use dilation::random;
use dilation::subnormal::{self, CommutingTuple, SemigroupWord};
use dilation::tower::{self, UcpMap};
use dilation::{povm, ComplexMatrix, ComplexVector, Tolerance};

fn tol() -> Tolerance {
    Tolerance::default()
}

fn config() -> ProptestConfig {
    ProptestConfig { cases: 48, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    // linear algebra

    #[test]
    fn shifted_hermitian_is_psd(seed in any::<u64>(), n in 1usize..8, margin in 1e-3f64..1.0) {
        let h = random::hermitian(&mut random::rng(seed), n);
        let shifted = &h + linalg::identity(n).scale(linalg::operator_norm(&h) * (1.0 + margin));
        prop_assert!(linalg::is_psd(&shifted, &tol()).unwrap().is_psd);
    }

    #[test]
    fn gram_factor_round_trip(seed in any::<u64>(), m in 1usize..=12, rank_seed in any::<usize>()) {
        let rank = 1 + rank_seed % m;
        let g = random::psd(&mut random::rng(seed), m, rank);
        let f = linalg::gram_factor(&g, &tol()).unwrap();
        prop_assert_eq!(f.rank, rank);
        prop_assert!(linalg::max_abs(&(f.factor.adjoint() * &f.factor - &g)) <= 1e-9 * (1.0 + linalg::max_abs(&g)));
    }

    #[test]
    fn sqrt_of_projection_is_itself(seed in any::<u64>(), n in 1usize..8, rank_seed in any::<usize>()) {
        let mut rng = random::rng(seed);
        let k = 1 + rank_seed % n;
        let q = random::unitary(&mut rng, n).columns(0, k).into_owned();
        let p = &q * q.adjoint();
        let root = linalg::sqrt_psd(&p, &tol()).unwrap();
        prop_assert!(linalg::max_abs(&(root - &p)) <= 1e-9);
    }

    #[test]
    fn operator_norm_is_submultiplicative(seed in any::<u64>(), n in 1usize..7) {
        let mut rng = random::rng(seed);
        let (a, b) = (random::matrix(&mut rng, n, n), random::matrix(&mut rng, n, n));
        prop_assert!(linalg::operator_norm(&(&a * &b)) <= linalg::operator_norm(&a) * linalg::operator_norm(&b) + 1e-9);
    }

    // kernels

    #[test]
    fn continuity_identity(seed in any::<u64>(), m in 1usize..=8) {
        let mut rng = random::rng(seed);
        let rank = rng.random_range(1..=m);
        let k = FiniteKernel::from_gram(random::psd(&mut rng, m, rank)).unwrap();
        let e = kernel::build_embedding(&k, &tol()).unwrap();
        for x in 0..m {
            for y in 0..m {
                let lhs = (e.feature(x) - e.feature(y)).norm_squared();
                let rhs = (k.value(x, x) + k.value(y, y) - k.value(x, y) - k.value(y, x)).re;
                prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + linalg::max_abs(k.gram())));
            }
        }
    }

    #[test]
    fn minimal_feature_maps_are_isomorphic(seed in any::<u64>(), m in 1usize..=8) {
        let mut rng = random::rng(seed);
        let rank = rng.random_range(1..=m);
        let k = FiniteKernel::from_gram(random::psd(&mut rng, m, rank)).unwrap();
        let e1 = kernel::build_embedding(&k, &tol()).unwrap();
        let mut e2 = e1.clone();
        e2.features = random::unitary(&mut rng, e1.dim()) * &e1.features;
        let u = kernel::embedding_isomorphism(&e1, &e2, &tol()).unwrap();
        prop_assert!(linalg::unitarity_residual(&u) <= 1e-9);
        prop_assert!(linalg::max_abs(&(&u * &e1.features - &e2.features)) <= 1e-8);
    }

    #[test]
    fn exp_kernel_is_valid(seed in any::<u64>(), m in 1usize..=6, dim in 1usize..=3) {
        let mut rng = random::rng(seed);
        let vs: Vec<ComplexVector> = (0..m).map(|_| random::vector(&mut rng, dim).scale(0.7)).collect();
        let k = kernel::exp_kernel(&vs).unwrap();
        prop_assert!(kernel::validate_kernel(&k, &tol()).unwrap().is_positive);
    }

    // completely positive maps

    #[test]
    fn representation_laws(seed in any::<u64>(), d in 1usize..=3, n in 1usize..=3) {
        let mut rng = random::rng(seed);
        let count = rng.random_range(1..=d * n);
        let phi = random::cp_map(&mut rng, d, n, count);
        let pair = cp::stinespring(&phi, &tol()).unwrap();
        prop_assert!(pair.representation_residual() <= 1e-9);
        let unit: ComplexMatrix = (0..d).map(|p| pair.rep_unit(p, p).clone()).sum();
        prop_assert!(linalg::distance(&unit, &linalg::identity(pair.k_dim())) <= 1e-9);
    }

    #[test]
    fn critical_estimate(seed in any::<u64>(), d in 1usize..=3, n in 1usize..=2) {
        let mut rng = random::rng(seed);
        let count = rng.random_range(1..=d * n);
        let phi = random::cp_map(&mut rng, d, n, count);
        let space = StinespringSpace::new(&phi);
        let a = random::matrix(&mut rng, d, d);
        let zeta = random::vector(&mut rng, space.dim());
        let moved = space.left_mul(&a) * &zeta;
        let lhs = space.form(&moved, &moved).re;
        let rhs = linalg::operator_norm(&a).powi(2) * space.form(&zeta, &zeta).re;
        prop_assert!(lhs <= rhs + 1e-9 * (1.0 + rhs.abs()));
    }

    #[test]
    fn cp_maps_compose_and_add(seed in any::<u64>(), d in 1usize..=3, n in 1usize..=3) {
        let mut rng = random::rng(seed);
        let phi = random::cp_map(&mut rng, d, n, 2);
        let psi = random::cp_map(&mut rng, d, n, 1);
        let chi = random::cp_map(&mut rng, n, d, 2);
        prop_assert!(cp::is_completely_positive(&phi.add(&psi).unwrap(), &tol()).is_cp);
        prop_assert!(cp::is_completely_positive(&phi.then(&chi).unwrap(), &tol()).is_cp);
    }

    #[test]
    fn choi_round_trip(seed in any::<u64>(), d in 1usize..=3, n in 1usize..=3) {
        let phi = random::hermiticity_preserving(&mut random::rng(seed), d, n, 0.0);
        let back = cp::map_of_choi(phi.choi(), d, n).unwrap();
        prop_assert!(phi.distance(&back) == 0.0);
    }

    // POVMs

    #[test]
    fn naimark_additivity_and_probabilities(seed in any::<u64>(), n in 1usize..=4, k in 1usize..=5) {
        let mut rng = random::rng(seed);
        let p = random::povm(&mut rng, n, k);
        let dil = povm::naimark_dilate(&p, &tol()).unwrap();
        let subset: Vec<usize> = (0..k).filter(|_| rng.random_bool(0.5)).collect();
        let q = subset.iter().fold(linalg::zeros(dil.k_dim(), dil.k_dim()), |acc, &i| acc + &dil.projections[i]);
        let e = p.measure(&subset);
        prop_assert!(linalg::max_abs(&(dil.v.adjoint() * q * &dil.v - e)) <= k as f64 * 1e-9);
        let xi = random::vector(&mut rng, n).normalize();
        for (effect, proj) in p.effects().iter().zip(&dil.projections) {
            let prob = linalg::inner(&(effect * &xi), &xi).re;
            prop_assert!((prob - (proj * &dil.v * &xi).norm_squared()).abs() <= 1e-9);
        }
        let gens = dil.generators();
        prop_assert_eq!(linalg::span_basis(&gens, &tol()).ncols(), dil.k_dim());
    }

    // contractions

    #[test]
    fn halmos_is_unitary(seed in any::<u64>(), n in 1usize..=8) {
        let a = random::contraction(&mut random::rng(seed), n);
        let c = Contraction::new(a, &tol()).unwrap();
        prop_assert!(linalg::unitarity_residual(&contraction::halmos_dilate(&c)) <= 1e-9);
        prop_assert!(c.intertwining_residual() <= 1e-9);
    }

    #[test]
    fn rational_evaluation_is_multiplicative(seed in any::<u64>(), n in 1usize..=4) {
        let mut rng = random::rng(seed);
        let a = random::contraction(&mut rng, n).scale(0.5);
        let (p1, p2) = (random::polynomial(&mut rng, 3), random::polynomial(&mut rng, 2));
        // denominators with roots of modulus 2, away from the spectrum
        let (r1, r2) = (Complex64::from_polar(2.0, rng.random_range(0.0..6.3)), Complex64::from_polar(2.0, rng.random_range(0.0..6.3)));
        let (q1, q2) = (vec![-r1, ONE], vec![-r2, ONE]);
        let f = RationalMatrixFunction::scalar(&p1, &q1).unwrap();
        let g = RationalMatrixFunction::scalar(&p2, &q2).unwrap();
        let fg = RationalMatrixFunction::scalar(&convolve(&p1, &p2), &convolve(&q1, &q2)).unwrap();
        let fa = contraction::eval_rational_matrix(&f, &a, &tol()).unwrap().value;
        let ga = contraction::eval_rational_matrix(&g, &a, &tol()).unwrap().value;
        let fga = contraction::eval_rational_matrix(&fg, &a, &tol()).unwrap().value;
        let scale = 1.0 + linalg::operator_norm(&fa) * linalg::operator_norm(&ga);
        prop_assert!(linalg::max_abs(&(&fa * &ga - &fga)) <= 1e-9 * scale);
        prop_assert!(linalg::max_abs(&(&fa * &ga - &ga * &fa)) <= 1e-9 * scale);
    }

    #[test]
    fn disk_is_complete_spectral_set(seed in any::<u64>(), n in 1usize..=3, s in 1usize..=3) {
        let mut rng = random::rng(seed);
        let a = random::contraction(&mut rng, n);
        let coeffs: Vec<ComplexMatrix> = (0..=3).map(|_| random::matrix(&mut rng, s, s)).collect();
        let f = RationalMatrixFunction::matrix_polynomial(coeffs).unwrap();
        let report = contraction::complete_spectral_check(&a, &contraction::unit_circle(512), &[f], &tol()).unwrap();
        prop_assert!(!report.any_violation());
    }

    // commuting tuples

    #[test]
    fn hyponormal_failure_implies_bram_failure(seed in any::<u64>(), n in 2usize..=4) {
        let a = random::matrix(&mut random::rng(seed), n, n);
        let t = CommutingTuple::single(a.clone(), &tol()).unwrap();
        let words = vec![SemigroupWord(vec![0]), SemigroupWord(vec![1])];
        if !subnormal::hyponormal_check(&a, &tol()).unwrap().is_hyponormal {
            prop_assert!(!subnormal::bram_test(&t, &words, &tol()).unwrap().passes);
        }
    }

    #[test]
    fn more_words_never_rescue_a_failure(seed in any::<u64>(), n in 1usize..=3, degree in 1usize..=3) {
        let a = random::matrix(&mut random::rng(seed), n, n);
        let t = CommutingTuple::single(a, &tol()).unwrap();
        let small = subnormal::bram_test(&t, &subnormal::words_up_to(1, degree), &tol()).unwrap();
        let large = subnormal::bram_test(&t, &subnormal::words_up_to(1, degree + 1), &tol()).unwrap();
        prop_assert!(small.passes || !large.passes);
        prop_assert!(large.min_eigenvalue <= small.min_eigenvalue + 1e-9 * (1.0 + linalg::max_abs(&large.block_matrix)));
    }

    // UCP tower

    #[test]
    fn tower_semigroup_and_isometries(seed in any::<u64>(), n in 2usize..=3, count in 1usize..=2) {
        let u: UcpMap = random::ucp(&mut random::rng(seed), n, count);
        let t = tower::build_tower(&u, 3, &tol()).unwrap();
        for k in 0..=3 {
            prop_assert!(linalg::isometry_residual(&t.iota(k)) <= 1e-9);
        }
        for (j, k) in [(1, 1), (1, 2), (2, 1)] {
            for p in 0..n {
                for q in 0..n {
                    let a = linalg::matrix_unit(n, p, q);
                    let composed = u.iterate(&u.iterate(&a, k), j);
                    prop_assert!(linalg::max_abs(&(t.moment(j + k, &a) - composed)) <= 1e-9);
                }
            }
        }
        let ladder = tower::projection_ladder(&t, &tol()).unwrap();
        prop_assert!(ladder.is_increasing(&tol()));
    }
}

fn convolve(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}
