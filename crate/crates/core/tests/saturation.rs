use std::f64::consts::PI;

use hqi_core::linalg::SquareMatrix;
use hqi_core::moments::{build_hermite_generator, GeneratingFunction, QPolynomial};
use hqi_core::saturation::*;
use hqi_core::scalar::{ratio, Rational};
use hqi_core::special_fn::{enumerate_indices, MultiIndex};
use hqi_core::testfn::{ExpCos, Monomial, TestFunction};
use hqi_core::{HermiteData, QIConfig, Window};
use hqi_core::interpolant::{evaluate_harmonic_qi, sample_on_window, Channel};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn poisson_identity_sample() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in 1..=2usize {
        for &d in &[1.0, 2.0, 3.0, 5.0] {
            for beta in enumerate_indices(n, 5).unwrap().iter() {
                for _ in 0..4 {
                    let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
                    let f = sigma_series(beta, &x, d, 1e-16).unwrap();
                    let g = sigma_direct(beta, &x, d, 1e-18).unwrap();
                    assert!((f.value - g).abs() < 1e-12, "β={beta} D={d}: {} vs {g}", f.value);
                    assert!(f.imag.abs() <= 1e-14 * f.value.abs().max(1e-300) || f.imag.abs() < 1e-30);
                }
            }
        }
    }
}

// σ_β = (−1)^{|β|} D^{|β|/2} ∂^β σ_0, by central differences of the series.
#[test]
fn derivative_relation() {
    let d = 1.0;
    let x = [0.23, -0.41];
    let s0 = |y: &[f64]| sigma_beta(&MultiIndex::zeros(2), y, d).unwrap();
    let step = 1e-4;
    for j in 0..2 {
        let mut p = x;
        let mut m = x;
        p[j] += step;
        m[j] -= step;
        let fd = (s0(&p) - s0(&m)) / (2.0 * step);
        let s = sigma_beta(&MultiIndex::axis(2, j, 1), &x, d).unwrap();
        assert!((s + d.sqrt() * fd).abs() < 1e-6 * s.abs(), "axis {j}");
        let fd2 = (s0(&p) - 2.0 * s0(&x) + s0(&m)) / (step * step);
        let s2 = sigma_beta(&MultiIndex::axis(2, j, 2), &x, d).unwrap();
        assert!((s2 - d * fd2).abs() < 1e-5 * s2.abs().max(1e-4));
    }
}

proptest! {
    #[test]
    fn unit_periodicity(x in -3.0f64..3.0, y in -3.0f64..3.0, k in -4i32..4, b in 0u32..4) {
        let beta = MultiIndex::from([b, 1]);
        let a = sigma_beta(&beta, &[x, y], 2.0).unwrap();
        let s = sigma_beta(&beta, &[x + k as f64, y - k as f64], 2.0).unwrap();
        prop_assert!((a - s).abs() < 1e-20 + 1e-9 * a.abs());
    }
}

#[test]
fn amplitude_at_d2() {
    let (amp, _) = sigma_amplitude(&MultiIndex::zeros(1), 2.0, 64).unwrap();
    // Σ_{m≠0} e^{−2π²m²} by direct summation
    let oracle: f64 = (1..6).map(|m| 2.0 * (-2.0 * PI * PI * (m * m) as f64).exp()).sum();
    assert!((amp / oracle - 1.0).abs() < 1e-12);
    assert!((amp / 5.4e-9 - 1.0).abs() < 0.01);
}

fn simpson<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, panels: usize) -> Complex64 {
    let h = (b - a) / panels as f64;
    let mut s = f(a) + f(b);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += f(a + i as f64 * h) * w;
    }
    s * (h / 3.0)
}

// ∂^α ℱℋ(λ) = ∫ (−2πix)^α ℋ(x) e^{−2πixλ} dx, by quadrature.
#[test]
fn fourier_transform_by_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let q = QPolynomial::one_dim(4, &[0.25, -0.5, 0.125]).unwrap();
    let g = build_hermite_generator(&q);
    for _ in 0..20 {
        let lam: f64 = rng.gen_range(-1.5..1.5);
        for a in 0..=3u32 {
            let quad = simpson(
                |x| {
                    let factor = Complex64::new(0.0, -2.0 * PI * x).powu(a);
                    factor * g.eval(&[x]).unwrap() * Complex64::from_polar(1.0, -2.0 * PI * x * lam)
                },
                -12.0,
                12.0,
                6000,
            );
            let closed = fourier_generator_derivative(&g, &MultiIndex::from([a]), &[lam]).unwrap();
            assert!((quad - closed).norm() < 1e-11, "λ={lam} α={a}");
        }
    }
    // 2-D: ℱ of the tensor Gaussian is e^{−π²|λ|²}
    let g2 = GeneratingFunction::<f64>::gaussian(2);
    let v = fourier_generator(&g2, &[0.3, -0.2]).unwrap();
    assert!((v.re - (-PI * PI * 0.13f64).exp()).abs() < 1e-15 && v.im.abs() < 1e-15);
}

#[test]
fn affine_constant_table() {
    assert_eq!(affine_constant(&MultiIndex::from([0, 0])), Rational::from_integer(1.into()));
    assert_eq!(affine_constant(&MultiIndex::from([2, 0])), ratio(1, 2));
    assert_eq!(affine_constant(&MultiIndex::from([2, 2])), ratio(1, 4));
    assert_eq!(affine_constant(&MultiIndex::from([4, 0])), ratio(3, 4));
    assert_eq!(affine_constant(&MultiIndex::from([1, 1])), Rational::from_integer(0.into()));
    // equals the Gaussian moment of y^α
    for alpha in enumerate_indices(2, 6).unwrap().iter() {
        assert_eq!(affine_constant(alpha), hqi_core::moments::gaussian_moment(alpha));
    }
}

#[test]
fn affine_poisson_identity() {
    let b = SquareMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
    let g = GeneratingFunction::<f64>::gaussian(2).with_anisotropy(b).unwrap();
    let c = g.anisotropy().unwrap().factor().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for &d in &[1.0, 2.0, 3.0] {
        for alpha in enumerate_indices(2, 3).unwrap().iter() {
            let xi = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let f = sigma_affine(alpha, &xi, d, &c, 1e-16).unwrap();
            let direct = sigma_affine_direct(alpha, &xi, d, &c, 1e-18).unwrap();
            assert!((f.value() - direct).abs() < 1e-12, "α={alpha} D={d}");
            assert!(f.imag.abs() < 1e-14);
        }
    }
    // C = I: the affine sum of α = 0 is 1 + σ_0
    let id = SquareMatrix::identity(2);
    let xi = [0.3f64, 0.6];
    let f = sigma_affine(&MultiIndex::zeros(2), &xi, 2.0, &id, 1e-16).unwrap();
    let s = sigma_beta(&MultiIndex::zeros(2), &xi, 2.0).unwrap();
    assert!((f.oscillatory - s).abs() < 1e-22);
}

#[test]
fn epsilon_decreases_with_d() {
    let q = QPolynomial::<Rational>::identity(1, 4).unwrap();
    let g = build_hermite_generator(&q).to_real::<f64>();
    let qf = q.to_scalar::<f64>();
    let mut last = f64::INFINITY;
    for &d in &[1.0, 1.5, 2.0, 3.0, 4.0] {
        let b = epsilon_bound(&g, &qf, d).unwrap();
        assert!(b.epsilon < last);
        last = b.epsilon;
    }
}

#[test]
fn epsilon_for_plain_gaussian() {
    // ℱℋ(λ) = e^{−π²λ²}; ε_0 = Σ_{ν≠0} e^{−π²Dν²}
    let g = GeneratingFunction::<f64>::gaussian(1);
    let q = QPolynomial::<f64>::identity(1, 2).unwrap();
    let d = 2.0;
    let b = epsilon_bound(&g, &q, d).unwrap();
    let oracle: f64 = (1..8).map(|v| 2.0 * (-PI * PI * d * (v * v) as f64).exp()).sum();
    assert!((b.per_alpha[0].1 / oracle - 1.0).abs() < 1e-12);
    // ε_1 = (2π)^{-1} Σ |2π²λ e^{−π²λ²}|, λ = √D ν
    let e1: f64 = (1..8)
        .map(|v| {
            let l = d.sqrt() * v as f64;
            2.0 * 2.0 * PI * PI * l * (-PI * PI * l * l).exp() / (2.0 * PI)
        })
        .sum();
    assert!((b.per_alpha[1].1 / e1 - 1.0).abs() < 1e-12);
    assert_eq!(b.combinations.len(), 2);
    assert!((b.floor(0.1, |_| 1.0) - (b.combinations[0].1 + 0.1 * d.sqrt() * b.combinations[1].1)).abs() < 1e-25);
}

#[test]
fn polynomial_prediction_forms_agree() {
    // for a polynomial the Taylor truncation is exact
    let u = Monomial { dim: 2, degree: 3, scale: 0.5 };
    for &(h, d) in &[(0.125, 2.0), (0.25, 1.5)] {
        let p = predict_harmonic_saturation(&u, &[0.3, -0.2], h, d, 3, 1e-18).unwrap();
        assert!((p.full - p.truncated).abs() < 1e-12 * p.full.abs(), "{p:?}");
        assert!(p.full_imag.abs() < 1e-12 * p.full.abs());
    }
    let err = predict_harmonic_saturation(&NoExtension, &[0.0], 0.1, 2.0, 2, 1e-16);
    assert!(err.is_err());
}

struct NoExtension;

impl TestFunction for NoExtension {
    fn dim(&self) -> usize {
        1
    }
    fn partial(&self, _beta: &MultiIndex, x: &[f64]) -> f64 {
        x[0]
    }
}

fn sample<F: TestFunction>(u: &F, window: &Window, h: f64) -> HermiteData<f64> {
    sample_on_window(|_: &Channel, x: &[f64]| Some(u.value(x)), window, h, &[Channel::value(u.dim())]).unwrap()
}

#[test]
fn harmonic_prediction_matches_measurement() {
    let h = 0.125;
    let d = 2.0;
    let window = Window::covering(h, &[(-4.0, 4.0), (-4.0, 4.0)]).unwrap();
    let data = sample(&ExpCos, &window, h);
    let cfg = QIConfig::new(h, d, 2).unwrap();
    for x in [[0.1, 0.2], [-0.33, 0.47], [0.5, -0.5]] {
        let measured = evaluate_harmonic_qi(&data, &cfg, &x, None).unwrap().value - ExpCos.value(&x);
        let p = predict_harmonic_saturation(&ExpCos, &x, h, d, 8, 1e-18).unwrap();
        assert!((measured - p.full).abs() < 1e-3 * p.full.abs().max(1e-9), "{measured} vs {}", p.full);
        assert!((p.full - p.truncated).abs() < 1e-2 * p.full.abs().max(1e-9));
    }
}
