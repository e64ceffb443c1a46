use std::collections::BTreeMap;
use std::f64::consts::PI;

use hqi_core::linalg::SquareMatrix;
use hqi_core::moments::*;
use hqi_core::scalar::{ratio, Rational};
use hqi_core::special_fn::{enumerate_indices, laguerre_coefficients, MultiIndex};
use hqi_core::{Error, Scalar};
use nalgebra::DMatrix;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CHOICES: [(i64, i64); 7] = [(-1, 1), (-1, 2), (-1, 4), (0, 1), (1, 4), (1, 2), (1, 1)];

fn random_q(rng: &mut ChaCha8Rng, n: usize, order: u32) -> QPolynomial<Rational> {
    let set = enumerate_indices(n, order - 1).unwrap();
    let coeffs: Vec<_> = set
        .iter()
        .skip(1)
        .map(|g| {
            let (p, q) = CHOICES[rng.gen_range(0..CHOICES.len())];
            (g.clone(), ratio(p, q))
        })
        .collect();
    QPolynomial::new(n, order, coeffs).unwrap()
}

fn q_strategy() -> impl Strategy<Value = QPolynomial<Rational>> {
    (1usize..=3, 2u32..=6)
        .prop_filter("keep the index set small", |(n, big_n)| *n < 3 || *big_n <= 5)
        .prop_flat_map(|(n, big_n)| {
            let len = enumerate_indices(n, big_n - 1).unwrap().len();
            (Just(n), Just(big_n), prop::collection::vec(0..CHOICES.len(), len))
        })
        .prop_map(|(n, big_n, picks)| {
            let set = enumerate_indices(n, big_n - 1).unwrap();
            let coeffs: Vec<_> = set
                .iter()
                .zip(picks)
                .skip(1)
                .map(|(g, i)| (g.clone(), ratio(CHOICES[i].0, CHOICES[i].1)))
                .collect();
            QPolynomial::new(n, big_n, coeffs).unwrap()
        })
}

#[test]
fn identity_q_gives_identity_matrix() {
    let q = QPolynomial::<Rational>::identity(2, 4).unwrap();
    let m = build_moment_matrix(&q);
    let (a, inv) = m.dense();
    for i in 0..m.size() {
        for j in 0..m.size() {
            let e = if i == j { Rational::one() } else { Rational::zero() };
            assert_eq!(a[i][j], e);
            assert_eq!(inv[i][j], e);
        }
    }
}

#[test]
fn one_dimensional_inverse_row() {
    let (a1, a2, a3) = (ratio(1, 3), ratio(-2, 5), ratio(3, 7));
    let q = QPolynomial::one_dim(4, &[a1.clone(), a2.clone(), a3.clone()]).unwrap();
    let row = build_moment_matrix(&q).inverse_first_row().to_vec();
    assert_eq!(row[1], -a1.clone());
    assert_eq!(row[2], &a1 * &a1 - &a2);
    assert_eq!(row[3], -(&a1 * &a1 * &a1) + ratio(2, 1) * &a1 * &a2 - a3);
}

// First row of A^{-1} = Taylor coefficients of 1/Q, by the reciprocal recurrence.
#[test]
fn inverse_row_is_reciprocal_series() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for order in 2..=7 {
        let tail: Vec<Rational> = (1..order)
            .map(|_| {
                let (p, q) = CHOICES[rng.gen_range(0..7)];
                ratio(p, q)
            })
            .collect();
        let q = QPolynomial::one_dim(order, &tail).unwrap();
        let mut a = vec![Rational::one()];
        a.extend(tail.iter().cloned());
        let mut b = vec![Rational::one()];
        for k in 1..order as usize {
            let s = (1..=k).fold(Rational::zero(), |acc, j| acc + &a[j] * &b[k - j]);
            b.push(-s);
        }
        assert_eq!(build_moment_matrix(&q).inverse_first_row(), &b[..]);
    }
}

#[test]
fn lu_oracle_random_two_dimensional() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let q = random_q(&mut rng, 2, 4).to_scalar::<f64>();
        let m = build_moment_matrix(&q);
        let k = m.size();
        let (a, inv) = m.dense();
        let dense = DMatrix::from_fn(k, k, |i, j| a[i][j]);
        let lu_inv = dense.clone().lu().try_inverse().unwrap();
        let ours = DMatrix::from_fn(k, k, |i, j| inv[i][j]);
        assert!((&lu_inv - &ours).amax() < 1e-13);
        assert!((&dense * &ours - DMatrix::identity(k, k)).amax() < 1e-13);
        for i in 0..k {
            assert_eq!(a[i][i], 1.0);
            for j in 0..i {
                assert_eq!(a[i][j], 0.0);
            }
        }
        assert!((dense.determinant() - 1.0).abs() < 1e-13);
    }
}

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut s = f(a) + f(b);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

#[test]
fn gaussian_moment_examples() {
    assert_eq!(gaussian_moment(&MultiIndex::zeros(2)), Rational::one());
    assert_eq!(gaussian_moment(&MultiIndex::from([2])), ratio(1, 2));
    assert_eq!(gaussian_moment(&MultiIndex::from([3, 2])), Rational::zero());
    let g = |k: i32| simpson(|x| x.powi(k) * (-x * x).exp() / PI.sqrt(), -10.0, 10.0, 20_000);
    let quad = g(4) * g(2);
    let exact = gaussian_moment(&MultiIndex::from([4, 2])).as_f64();
    assert!((quad - exact).abs() < 1e-10, "{quad} vs {exact}");
}

#[test]
fn target_moment_examples() {
    let q = QPolynomial::<Rational>::identity(2, 4).unwrap();
    for (alpha, m) in target_moments(&q) {
        let e = if alpha.is_zero() { Rational::one() } else { Rational::zero() };
        assert_eq!(m, e);
    }
    let q = QPolynomial::one_dim(2, &[ratio(1, 2)]).unwrap();
    let t: BTreeMap<_, _> = target_moments(&q).into_iter().collect();
    assert_eq!(t[&MultiIndex::from([1])], ratio(-1, 2));
}

#[test]
fn targets_solve_the_moment_system() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let q = random_q(&mut rng, 2, 3);
        let t: BTreeMap<_, _> = target_moments(&q).into_iter().collect();
        for beta in t.keys() {
            let mut s = Rational::zero();
            for alpha in t.keys() {
                if let Some(g) = beta.checked_sub(alpha) {
                    s += q.coefficient(&g) * &t[alpha] / Rational::from_integer(alpha.factorial());
                }
            }
            let e = if beta.is_zero() { Rational::one() } else { Rational::zero() };
            assert_eq!(s, e, "β = {beta}");
        }
    }
}

#[test]
fn example_generators() {
    let q = QPolynomial::new(
        2,
        2,
        [(MultiIndex::from([1, 0]), 0.25), (MultiIndex::from([0, 1]), -0.5)],
    )
    .unwrap();
    let g = build_hermite_generator(&q);
    for x in [[0.3f64, -0.2], [-1.0, 0.7]] {
        let expect = (1.0 - 2.0 * (0.25 * x[0] - 0.5 * x[1])) * (-(x[0] * x[0] + x[1] * x[1])).exp() / PI;
        assert!((g.eval(&x).unwrap() - expect).abs() < 1e-15);
    }
    let q = QPolynomial::one_dim(4, &[0.0, -0.25, 0.0]).unwrap();
    let g = build_hermite_generator(&q);
    for x in [-0.8f64, 0.1, 1.4] {
        let expect = (-x * x).exp() / PI.sqrt();
        assert!((g.eval(&[x]).unwrap() - expect).abs() < 1e-15);
    }
}

fn laguerre_poly(n: usize, m: u32) -> Vec<Rational> {
    laguerre_coefficients(m - 1, &ratio(n as i64, 2)).unwrap()
}

#[test]
fn laguerre_pointwise() {
    for n in 1..=3usize {
        for m in 1..=3u32 {
            let q = QPolynomial::<Rational>::identity(n, 2 * m).unwrap();
            let g = build_hermite_generator(&q).to_real::<f64>();
            let c: Vec<f64> = laguerre_poly(n, m).iter().map(|v| v.as_f64()).collect();
            for &r in &[0.0, 0.35, 0.9, 1.7] {
                let x: Vec<f64> = (0..n).map(|j| r * (1.0 + j as f64) / n as f64).collect();
                let y: f64 = x.iter().map(|v| v * v).sum();
                let lag: f64 = c.iter().enumerate().map(|(i, v)| v * y.powi(i as i32)).sum();
                let expect = PI.powf(-(n as f64) / 2.0) * lag * (-y).exp();
                let got = g.eval(&x).unwrap();
                assert!((got - expect).abs() < 1e-13, "n={n} M={m} r={r}");
            }
        }
    }
}

// Expands L(|x|²) into monomials through the multinomial theorem.
fn laguerre_monomials(n: usize, m: u32) -> BTreeMap<MultiIndex, Rational> {
    let mut out = BTreeMap::new();
    for (k, c) in laguerre_poly(n, m).into_iter().enumerate() {
        for gamma in enumerate_indices(n, k as u32).unwrap().iter().filter(|g| g.order() == k as u32) {
            let multinom = Rational::from_integer(MultiIndex::from(vec![k as u32]).factorial())
                / Rational::from_integer(gamma.factorial());
            let v = &c * multinom;
            if !v.is_zero() {
                out.insert(gamma.scale(2), v);
            }
        }
    }
    out
}

#[test]
fn laguerre_coefficient_level() {
    for n in 1..=3usize {
        for m in 1..=4u32 {
            let q = QPolynomial::<Rational>::identity(n, 2 * m).unwrap();
            let got = build_hermite_generator(&q).monomial_coefficients();
            assert_eq!(got, laguerre_monomials(n, m), "n={n} M={m}");
        }
    }
}

#[test]
fn radial_q_has_even_generator() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let n = rng.gen_range(1..=3usize);
        let order = rng.gen_range(2..=6u32);
        let set = enumerate_indices(n, order - 1).unwrap();
        let coeffs: Vec<_> = set
            .iter()
            .skip(1)
            .filter(|g| g.all_even())
            .map(|g| {
                let (p, q) = CHOICES[rng.gen_range(0..7)];
                (g.clone(), ratio(p, q))
            })
            .collect();
        let q = QPolynomial::new(n, order, coeffs).unwrap();
        let g = build_hermite_generator(&q);
        for (beta, _) in g.coefficients() {
            assert!(beta.all_even(), "odd coefficient {beta}");
        }
    }
}

#[test]
fn plain_gaussian_report() {
    let q = QPolynomial::<Rational>::identity(1, 4).unwrap();
    let g = GeneratingFunction::<Rational>::gaussian(1);
    let r = verify_moment_conditions(&g, &q, 1e-10).unwrap();
    assert!(!r.passed);
    let worst = r.worst().unwrap();
    assert_eq!(worst.0, MultiIndex::from([2]));
    assert_eq!(worst.1, 0.25);

    for n in 1..=3usize {
        for m in 1..=3u32 {
            let q = QPolynomial::<Rational>::laplacian(n, m).unwrap();
            let r = verify_moment_conditions(&GeneratingFunction::gaussian(n), &q, 0.0).unwrap();
            assert!(r.exact && r.passed, "n={n} M={m}");
        }
    }
}

// Moments of the generator by Simpson quadrature in one and two dimensions.
#[test]
fn closed_form_moments_match_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..4 {
        let q = random_q(&mut rng, 1, 6);
        let g = build_hermite_generator(&q).to_real::<f64>();
        let closed = generator_moments(&g, 5).unwrap();
        for (alpha, mu) in closed {
            let k = alpha.exponents()[0] as i32;
            let quad = simpson(|x| x.powi(k) * g.eval(&[x]).unwrap(), -12.0, 12.0, 8000);
            assert!((quad - mu.as_f64()).abs() < 1e-10 * mu.as_f64().abs().max(1.0), "{alpha}");
        }
    }
    let q = random_q(&mut rng, 2, 3);
    let g = build_hermite_generator(&q).to_real::<f64>();
    for (alpha, mu) in generator_moments(&g, 2).unwrap() {
        let e = alpha.exponents();
        let quad = simpson(
            |x| {
                simpson(
                    |y| x.powi(e[0] as i32) * y.powi(e[1] as i32) * g.eval(&[x, y]).unwrap(),
                    -9.0,
                    9.0,
                    600,
                )
            },
            -9.0,
            9.0,
            600,
        );
        assert!((quad - mu.as_f64()).abs() < 1e-10, "{alpha}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn constructed_generators_pass(q in q_strategy()) {
        let g = build_hermite_generator(&q);
        let r = verify_moment_conditions(&g, &q, 1e-10).unwrap();
        prop_assert!(r.exact);
        let qf = q.to_scalar::<f64>();
        let gf = build_hermite_generator(&qf);
        let r = verify_moment_conditions(&gf, &qf, 1e-10).unwrap();
        prop_assert!(r.passed, "max residual {}", r.max_abs);
        let normalization = generator_moments(&gf, 0).unwrap()[0].1.as_f64();
        prop_assert!((normalization - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unit_triangular_inverse(q in q_strategy()) {
        let m = build_moment_matrix(&q);
        let (a, inv) = m.dense();
        let k = m.size();
        for i in 0..k {
            for j in 0..k {
                let s = (0..k).fold(Rational::zero(), |acc, l| acc + &a[i][l] * &inv[l][j]);
                prop_assert_eq!(s, if i == j { Rational::one() } else { Rational::zero() });
            }
        }
    }
}

#[test]
fn general_generator_matches_hermite() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..10 {
        let q = random_q(&mut rng, 2, 3).to_scalar::<f64>();
        let table = gaussian_reciprocal_table(2, 2).unwrap();
        let e = build_general_generator(&q, &table).unwrap();
        let a = e.to_gaussian_generator();
        let b = build_hermite_generator(&q);
        for beta in enumerate_indices(2, 2).unwrap().iter() {
            assert!((a.coefficient(beta) - b.coefficient(beta)).abs() < 1e-12);
        }
    }
    let q = QPolynomial::<Rational>::identity(1, 4).unwrap();
    let e = build_general_generator(&q, &gaussian_reciprocal_table(1, 3).unwrap()).unwrap();
    // η (1 − ∂²/4) with η = π^{-1/2} e^{−x²} is π^{-1/2} e^{−x²}(3/2 − x²)
    let x = 0.6f64;
    let eta = |b: &MultiIndex, x: &[f64]| {
        let t = x[0];
        let base = (-t * t).exp() / PI.sqrt();
        match b.order() {
            0 => base,
            2 => (4.0 * t * t - 2.0) * base,
            _ => unreachable!(),
        }
    };
    let ef: DerivativeExpansion<f64> = build_general_generator(
        &QPolynomial::<f64>::identity(1, 4).unwrap(),
        &gaussian_reciprocal_table(1, 3).unwrap(),
    )
    .unwrap();
    let v = ef.eval_with(&[x], eta);
    assert!((v - (1.5 - x * x) * (-x * x).exp() / PI.sqrt()).abs() < 1e-15);
    assert_eq!(e.coefficients().count(), 2);
}

#[test]
fn anisotropy_validation() {
    let b = SquareMatrix::from_rows(&[vec![2.0, 0.5, 0.0], vec![0.5, 1.0, 0.2], vec![0.0, 0.2, 3.0]]).unwrap();
    let g = GeneratingFunction::<f64>::gaussian(3).with_anisotropy(b.clone()).unwrap();
    let a = g.anisotropy().unwrap();
    let c = a.factor();
    assert!(c.transpose().mul(c).mul(&b).max_abs_diff(&SquareMatrix::identity(3)) < 1e-12);
    assert!((a.det_factor() - b.determinant().powf(-0.5)).abs() < 1e-14);
    let bad = SquareMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]]).unwrap();
    assert_eq!(
        GeneratingFunction::<f64>::gaussian(2).with_anisotropy(bad).unwrap_err(),
        Error::NotPositiveDefinite
    );
    let rec = g.to_record();
    assert_eq!(rec["n"], 3);
    assert_eq!(rec["B"][1][2], 0.2);
}

#[test]
fn generator_record() {
    let q = QPolynomial::<Rational>::identity(1, 4).unwrap();
    let rec = build_hermite_generator(&q).to_record();
    assert_eq!(rec["N"], 4);
    assert_eq!(rec["coefficients"][0]["beta"], "(0)");
    assert_eq!(rec["coefficients"][1]["exact"], "-1/4");
}
