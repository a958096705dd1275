use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

use chainring::density::cartan_quadratic_form;
use chainring::modcount::{enum_types_of_length, shape_from_type, SubmoduleCounter};
use chainring::qseries::{
    gaussian_binomial, gaussian_binomial_int, pochhammer_finite, q_multinomial,
};
use chainring::sim::{
    is_rect_unimodular, matrix_type, row_span, sample_matrix, sample_matrix_with, stream_rng,
};
use chainring::{ChainRingSpec, ConcreteRing, ExactRatio, RingMatrix};

fn ratio(n: i64, d: i64) -> ExactRatio {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn prime_power() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 4, 5, 7, 8, 9, 11])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gaussian_symmetry_and_reflection(q in prime_power(), n in 0u64..=25, k_frac in 0.0f64..=1.0) {
        let k = (k_frac * n as f64).round() as u64;
        let base = ratio(q as i64, 1);
        let g = gaussian_binomial(n, k as i64, &base);
        prop_assert_eq!(&g, &gaussian_binomial(n, (n - k) as i64, &base));
        let power = BigRational::from_integer(BigInt::from(q).pow(((n - k) * k) as u32));
        prop_assert_eq!(&g, &(power * gaussian_binomial(n, k as i64, &ratio(1, q as i64))));
        prop_assert_eq!(g, BigRational::from_integer(BigInt::from(gaussian_binomial_int(n, k as i64, &BigUint::from(q)))));
    }

    #[test]
    fn gaussian_pascal_rule(q in prime_power(), n in 1u64..=25, k in 1i64..=24) {
        prop_assume!(k <= n as i64);
        let qb = BigUint::from(q);
        let lhs = gaussian_binomial_int(n, k, &qb);
        let rhs = gaussian_binomial_int(n - 1, k - 1, &qb) + qb.pow(k as u32) * gaussian_binomial_int(n - 1, k, &qb);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn gaussian_sandwich_lower(q in prime_power(), n in 0u64..=30, k_frac in 0.0f64..=1.0) {
        let k = (k_frac * n as f64).round() as u64;
        let g = gaussian_binomial_int(n, k as i64, &BigUint::from(q));
        prop_assert!(g >= BigUint::from(q).pow(((n - k) * k) as u32));
    }

    #[test]
    fn pochhammer_splits(num in 1i64..6, den in 2i64..12, m in 0u64..10, r in 0u64..10) {
        let a = ratio(num, den + num);
        let q = ratio(1, den);
        let shifted = &a * num_traits::pow(q.clone(), m as usize);
        prop_assert_eq!(
            pochhammer_finite(&a, &q, m + r),
            pochhammer_finite(&a, &q, m) * pochhammer_finite(&shifted, &q, r)
        );
    }

    #[test]
    fn single_step_multinomial_is_gaussian(q in prime_power(), n in 0u64..=20, ell_frac in 0.0f64..=1.0) {
        let ell = (ell_frac * n as f64).round() as i64;
        let base = ratio(q as i64, 1);
        prop_assert_eq!(q_multinomial(n, ell, 1, &base).unwrap(), gaussian_binomial(n, ell, &base));
    }

    #[test]
    fn quadratic_form_is_positive_definite(s in 2usize..=8, seed in any::<u64>()) {
        let mut x = seed;
        let kvec: Vec<u64> = (0..s - 1).map(|_| { x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407); (x >> 60) % 9 }).collect();
        let v = cartan_quadratic_form(&kvec, s).unwrap();
        if kvec.iter().all(|&k| k == 0) {
            prop_assert!(v.is_zero());
        } else {
            prop_assert!(v > ExactRatio::zero());
        }
    }

    #[test]
    fn length_counts_are_dual(q in prop::sample::select(vec![2u64, 3, 4]), s in 1usize..=3, n in 1u64..=6, ell_frac in 0.0f64..=1.0) {
        let ring = ChainRingSpec::new(q, s).unwrap();
        let top = n * s as u64;
        let ell = (ell_frac * top as f64).round() as u64;
        let counter = SubmoduleCounter::new(n, ring);
        let total = counter.total_by_length(ell).unwrap();
        prop_assert_eq!(&total, &counter.total_by_length(top - ell).unwrap());
        let mut by_type = BigUint::zero();
        for t in enum_types_of_length(s, n, ell) {
            let c = counter.count_by_type(&t).unwrap();
            prop_assert_eq!(&c, &counter.count_by_shape(&shape_from_type(&t)).unwrap());
            by_type += c;
        }
        prop_assert_eq!(total, by_type);
    }

    #[test]
    fn span_order_matches_type_length(p in prop::sample::select(vec![2u64, 3]), s in 1usize..=3, m in 1usize..=3, n in 1usize..=3, seed in any::<u64>()) {
        let ring = ConcreteRing::new(p, s).unwrap();
        let mat = sample_matrix(m, n, ring, seed, 0);
        let t = matrix_type(&mat);
        prop_assert!(t.rank() <= m.min(n) as u64);
        let span = row_span(&mat).unwrap();
        prop_assert_eq!(BigUint::from(span.len()), BigUint::from(p).pow(t.length() as u32));
    }
}

/// Samples until a square matrix is invertible.
fn invertible(n: usize, ring: ConcreteRing, rng: &mut impl rand::Rng) -> RingMatrix {
    loop {
        let u = sample_matrix_with(n, n, ring, rng);
        if is_rect_unimodular(&u).unwrap() {
            return u;
        }
    }
}

#[test]
fn type_is_invariant_under_row_and_column_operations() {
    for (p, s) in [(2u64, 2usize), (2, 3), (3, 2)] {
        let ring = ConcreteRing::new(p, s).unwrap();
        let mut rng = stream_rng(11, p * 10 + s as u64);
        for trial in 0..1000u64 {
            let (m, n) = (1 + (trial % 3) as usize, 1 + (trial / 3 % 3) as usize);
            let mat = sample_matrix(m, n, ring, 5, trial);
            let left = invertible(m, ring, &mut rng);
            let right = invertible(n, ring, &mut rng);
            let t = matrix_type(&mat);
            assert_eq!(
                t,
                matrix_type(&left.mul(&mat).unwrap()),
                "left action, trial {trial}"
            );
            assert_eq!(
                t,
                matrix_type(&mat.mul(&right).unwrap()),
                "right action, trial {trial}"
            );
        }
    }
}

#[test]
fn sampled_entries_are_uniform() {
    let ring = ConcreteRing::new(3, 2).unwrap();
    let mut hist = [0u64; 9];
    let trials = 2000u64;
    for t in 0..trials {
        for &e in sample_matrix(4, 4, ring, 99, t).entries() {
            hist[e as usize] += 1;
        }
    }
    let expected = (trials * 16) as f64 / 9.0;
    let chi2: f64 = hist
        .iter()
        .map(|&o| (o as f64 - expected).powi(2) / expected)
        .sum();
    // 8 degrees of freedom; 26.1 is the 0.1% critical value
    assert!(chi2 < 26.1, "chi-square {chi2} for histogram {hist:?}");
}

#[test]
fn identity_is_free_of_full_rank() {
    let ring = ConcreteRing::new(2, 3).unwrap();
    let t = matrix_type(&RingMatrix::identity(ring, 3));
    assert!(t.is_free());
    assert_eq!(t.rank(), 3);
}
