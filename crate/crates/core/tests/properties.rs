mod common;

use std::sync::Arc;

use common::*;
use mred_core::denoise::{
    estimate_lipschitz, ConvNetConfig, DctSoftThreshold, Denoiser, FdJacobianWrapper, LipschitzMethod, RandomConvNet,
    ScaledDenoiser,
};
use mred_core::forward::{add_noise_at_snr, adjoint_mismatch, realized_snr_db, NoiseSpec};
use mred_core::imaging::{convolve2d_periodic, dct2_orthonormal, pgm, ImageGrid, Kernel2D, RngState, Shape};
use proptest::prelude::*;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn grid(shape: Shape, seed: u64) -> ImageGrid<f64> {
    ImageGrid::new(shape, RngState::new(seed).gaussian_vec(shape.len())).unwrap()
}

fn smooth_denoisers(shape: Shape, seed: u64) -> Vec<Arc<dyn Denoiser<f64>>> {
    vec![
        identity(shape.len()),
        smoother(shape, 0.5),
        Arc::new(DctSoftThreshold::new(shape, 0.1, 0.1).unwrap()),
        Arc::new(ScaledDenoiser::new(smoother(shape, 0.5), 1.7).unwrap()),
        Arc::new(RandomConvNet::new(shape, ConvNetConfig { layers: 3, channels: 2, weight_scale: 1.2, seed }).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn convolution_is_linear_with_flipped_adjoint(
        h in 5usize..12, w in 5usize..12, ksize in prop::sample::select(vec![1usize, 3, 5]),
        seed in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0,
    ) {
        let shape = Shape::new(h, w);
        let k = Kernel2D::new(ksize, RngState::new(seed).gaussian_vec(ksize * ksize)).unwrap();
        let x = grid(shape, seed ^ 1);
        let z = grid(shape, seed ^ 2);
        let combo = ImageGrid::new(
            shape,
            x.values().iter().zip(z.values()).map(|(p, q)| a * p + b * q).collect(),
        ).unwrap();
        let lhs = convolve2d_periodic(&combo, &k).unwrap();
        let cx = convolve2d_periodic(&x, &k).unwrap();
        let cz = convolve2d_periodic(&z, &k).unwrap();
        for i in 0..shape.len() {
            let want = a * cx.values()[i] + b * cz.values()[i];
            prop_assert!((lhs.values()[i] - want).abs() <= 1e-12 * (1.0 + want.abs()) * 10.0);
        }
        let u = grid(shape, seed ^ 3);
        let back = convolve2d_periodic(&u, &k.flipped()).unwrap();
        let l = dot(cx.values(), u.values());
        let r = dot(x.values(), back.values());
        prop_assert!((l - r).abs() <= 1e-10 * (1.0 + l.abs()));
    }

    #[test]
    fn dct_preserves_inner_products(h in 1usize..10, w in 1usize..10, seed in any::<u64>()) {
        let shape = Shape::new(h, w);
        let x = grid(shape, seed);
        let z = grid(shape, seed.wrapping_add(1));
        let l = dot(dct2_orthonormal(&x).values(), dct2_orthonormal(&z).values());
        let r = dot(x.values(), z.values());
        prop_assert!((l - r).abs() <= 1e-10);
    }

    #[test]
    fn pgm_sixteen_bit_round_trip(h in 1usize..9, w in 1usize..9, seed in any::<u64>()) {
        let shape = Shape::new(h, w);
        let img = ImageGrid::new(shape, RngState::new(seed).uniform_vec(shape.len())).unwrap();
        let back: ImageGrid<f64> = pgm::decode(&pgm::encode(&img, 16).unwrap()).unwrap();
        for (a, b) in img.values().iter().zip(back.values()) {
            prop_assert!((a - b).abs() <= 1.0 / 65535.0);
        }
    }

    #[test]
    fn residual_vjp_is_linear_in_v(seed in any::<u64>(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let shape = Shape::new(6, 6);
        let mut rng = RngState::new(seed);
        let x: Vec<f64> = rng.uniform_vec(36);
        let v1: Vec<f64> = rng.gaussian_vec(36);
        let v2: Vec<f64> = rng.gaussian_vec(36);
        let combo: Vec<f64> = v1.iter().zip(&v2).map(|(p, q)| a * p + b * q).collect();
        for d in smooth_denoisers(shape, seed) {
            let lhs = d.residual_vjp(&x, &combo).unwrap();
            let r1 = d.residual_vjp(&x, &v1).unwrap();
            let r2 = d.residual_vjp(&x, &v2).unwrap();
            for i in 0..36 {
                let want = a * r1[i] + b * r2[i];
                prop_assert!((lhs[i] - want).abs() <= 1e-10 * (1.0 + want.abs()), "{}", d.label());
            }
        }
    }

    #[test]
    fn symmetric_jacobians_give_self_adjoint_vjps(seed in any::<u64>()) {
        let shape = Shape::new(6, 6);
        let mut rng = RngState::new(seed);
        let x: Vec<f64> = rng.uniform_vec(36);
        let u: Vec<f64> = rng.gaussian_vec(36);
        let v: Vec<f64> = rng.gaussian_vec(36);
        for d in smooth_denoisers(shape, seed).into_iter().filter(|d| d.flags().symmetric_jacobian) {
            let l = dot(&d.residual_vjp(&x, &u).unwrap(), &v);
            let r = dot(&u, &d.residual_vjp(&x, &v).unwrap());
            prop_assert!((l - r).abs() <= 1e-8, "{}", d.label());
        }
    }

    #[test]
    fn cs_rows_are_orthonormal(n in 4usize..40, frac in 0.05f64..0.95, seed in any::<u64>()) {
        let m = ((n as f64 * frac) as usize).clamp(1, n - 1);
        let op = cs_op(m, n, seed);
        let mut rng = RngState::new(seed ^ 7);
        let u: Vec<f64> = rng.gaussian_vec(m);
        let aat_u = op.forward(&op.adjoint(&u).unwrap()).unwrap();
        for (p, q) in aat_u.iter().zip(&u) {
            prop_assert!((p - q).abs() <= 1e-10 * (1.0 + q.abs()));
        }
        let v: Vec<f64> = rng.gaussian_vec(n);
        prop_assert!(adjoint_mismatch(op.as_ref(), &v, &u).unwrap() <= 1e-10);
    }

    #[test]
    fn noise_hits_requested_snr(snr in -10.0f64..60.0, seed in any::<u64>()) {
        let op = deblur_op(Shape::new(8, 8), 3, 0.8);
        let x: Vec<f64> = RngState::new(seed).uniform_vec(64);
        let (y, e) = add_noise_at_snr(op.as_ref(), &x, &NoiseSpec { input_snr_db: snr, seed }).unwrap();
        let clean = op.forward(&x).unwrap();
        prop_assert!((realized_snr_db(&clean, &e) - snr).abs() <= 1e-10);
        for i in 0..64 {
            prop_assert_eq!(y[i], clean[i] + e[i]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn pairwise_sampling_never_exceeds_power_iteration(seed in any::<u64>()) {
        let shape = Shape::new(8, 8);
        for d in smooth_denoisers(shape, seed) {
            let power = estimate_lipschitz(d.as_ref(), LipschitzMethod::JacobianPowerIteration, 3, 300, &mut RngState::new(seed)).unwrap();
            let pair = estimate_lipschitz(d.as_ref(), LipschitzMethod::PairwiseRatioSampling, 3, 0, &mut RngState::new(seed)).unwrap();
            prop_assert!(pair.value <= power.value + 1e-6, "{}: {} > {}", d.label(), pair.value, power.value);
        }
    }
}

#[test]
fn nonexpansive_and_expansive_presets_are_certified() {
    let shape = Shape::new(16, 16);
    let nonexpansive: Vec<Arc<dyn Denoiser<f64>>> =
        vec![smoother(shape, 1.0), Arc::new(DctSoftThreshold::new(shape, 0.05, 0.05).unwrap())];
    for d in nonexpansive {
        let est =
            estimate_lipschitz(d.as_ref(), LipschitzMethod::JacobianPowerIteration, 3, 500, &mut RngState::new(3))
                .unwrap();
        assert!(est.value <= 1.0 + 1e-6, "{}: {}", d.label(), est.value);
    }
    let expansive: Vec<Arc<dyn Denoiser<f64>>> = vec![
        Arc::new(ScaledDenoiser::new(smoother(shape, 1.0), 3.0).unwrap()),
        Arc::new(RandomConvNet::new(shape, ConvNetConfig { layers: 2, channels: 4, weight_scale: 1.0, seed: 11 }).unwrap()),
    ];
    for d in expansive {
        let est =
            estimate_lipschitz(d.as_ref(), LipschitzMethod::JacobianPowerIteration, 3, 500, &mut RngState::new(3))
                .unwrap();
        assert!(est.value >= 1.2, "{}: {}", d.label(), est.value);
    }
}

#[test]
fn fd_wrapper_tracks_analytic_vjps() {
    let shape = Shape::new(8, 8);
    let mut rng = RngState::new(5);
    let x: Vec<f64> = rng.uniform_vec(64);
    let v: Vec<f64> = rng.gaussian_vec(64);
    let bases: Vec<(Arc<dyn Denoiser<f64>>, f64)> = vec![
        (smoother(shape, 0.5), 1e-6),
        (Arc::new(DctSoftThreshold::new(shape, 0.1, 0.1).unwrap()), 1e-6),
        (
            Arc::new(
                RandomConvNet::new(shape, ConvNetConfig { layers: 2, channels: 3, weight_scale: 1.0, seed: 2 }).unwrap(),
            ),
            1e-4,
        ),
    ];
    for (base, tol) in bases {
        let wrapped = FdJacobianWrapper::new(base.clone(), 1e-5).unwrap();
        let want = base.residual_vjp(&x, &v).unwrap();
        let got = wrapped.residual_vjp(&x, &v).unwrap();
        assert!(rel_err(&got, &want) <= tol, "{}: {:e}", base.label(), rel_err(&got, &want));
        assert!(wrapped.residual_vjp(&x, &[0.0; 64]).unwrap().iter().all(|&g| g == 0.0));
    }
}
