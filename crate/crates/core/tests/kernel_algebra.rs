use proptest::prelude::*;
use sonin_core::kernel::{
    laplace_transform, series_convolve, solve_associated_pair, solve_third_kernel, Kernel,
    KernelSeries, KernelTriple, Truncation,
};
use sonin_core::special::gamma;
use sonin_core::Error;

fn power(mu: f64) -> KernelSeries {
    KernelSeries::new(mu, vec![1.0]).unwrap()
}

fn tempered_coeffs(rho: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let mut term = 1.0;
    for k in 0..n {
        out.push(term);
        term *= -rho / (k + 1) as f64;
    }
    out
}

#[test]
fn kernel_values_at_reference_points() {
    let v = Kernel::power_law(0.5).unwrap().evaluate(1.0).unwrap();
    assert!((v - 0.564_189_583_547_756_3).abs() < 1e-15);
    let v = Kernel::tempered(0.5, 1.0).unwrap().evaluate(1.0).unwrap();
    assert!((v - 0.207_553_748_710_297_8).abs() < 1e-15);
    // (0.5)^(-1/2)·J_{-1/2}(1) = √2·√(2/π)·cos 1
    let v = Kernel::bessel_kappa(0.5).unwrap().evaluate(0.25).unwrap();
    let want = 2f64.sqrt() * (2.0 / std::f64::consts::PI).sqrt() * 1f64.cos();
    assert!((v - want).abs() < 1e-13, "{v} vs {want}");
}

#[test]
fn h0_has_no_pointwise_value() {
    assert_eq!(Kernel::H0.evaluate(1.0), Err(Error::NotEvaluable));
}

#[test]
fn power_series_convolve_to_power_series() {
    let c = series_convolve(&power(0.3), &power(0.4)).unwrap();
    assert!((c.mu() - 0.7).abs() < 1e-15);
    assert_eq!(c.coeffs(), [1.0]);
    let c = series_convolve(&power(0.5), &power(0.5)).unwrap();
    assert_eq!((c.mu(), c.coeffs()), (1.0, &[1.0][..]));
}

#[test]
fn linear_factor_picks_up_beta_ratio() {
    let a = KernelSeries::new(0.3, vec![1.0, 1.0]).unwrap();
    let c = series_convolve(&a, &power(0.7)).unwrap();
    assert_eq!(c.coeffs()[0], 1.0);
    assert!((c.coeffs()[1] - 0.3).abs() < 1e-14, "{:?}", c.coeffs());
    // independent check by quadrature: ∫₀^1 (s^{-0.7}+s^{0.3})(1-s)^{-0.3} ds/(Γ(0.3)Γ(0.7)) at t=1
    let n = 200_000;
    let mut acc = 0.0;
    for i in 0..n {
        // substitution s = u^{1/0.3} removes the left singularity
        let u = (i as f64 + 0.5) / n as f64;
        let s = u.powf(1.0 / 0.3);
        let ds = s / (0.3 * u);
        let f = (s.powf(-0.7) + s.powf(0.3)) * (1.0 - s).powf(-0.3);
        acc += f * ds / n as f64;
    }
    let direct = acc / (gamma(0.3).unwrap() * gamma(0.7).unwrap());
    assert!((direct - c.evaluate(1.0)).abs() < 2e-3, "{direct} vs {}", c.evaluate(1.0));
}

#[test]
fn order_above_two_overflows() {
    let e = series_convolve(&power(1.5), &power(0.8)).unwrap_err();
    assert!(matches!(e, Error::OrderOverflow(_)));
}

#[test]
fn power_pair_is_exact() {
    let k = solve_associated_pair(&power(0.3)).unwrap();
    assert!((k.mu() - 0.7).abs() < 1e-15);
    assert_eq!(k.coeffs(), [1.0]);
    assert_eq!(k.truncation(), Truncation::Exact);
}

#[test]
fn zero_leading_coefficient_is_rejected() {
    let s = KernelSeries::new(0.5, vec![0.0, 1.0]).unwrap();
    assert_eq!(solve_associated_pair(&s), Err(Error::ZeroLeadingCoefficient));
}

#[test]
fn third_kernel_of_power_triples() {
    for (a, g, want) in [(0.5, 0.25, 0.25), (0.3, 0.4, 0.3)] {
        let k2 = solve_third_kernel(&power(a), &power(g)).unwrap();
        assert!((k2.mu() - want).abs() < 1e-15);
        assert_eq!(k2.coeffs(), [1.0]);
    }
    assert!(matches!(
        solve_third_kernel(&power(0.6), &power(0.4)),
        Err(Error::OrderOverflow(_))
    ));
}

#[test]
fn tempered_third_kernel_closes_the_triple() {
    let kappa = KernelSeries::truncated(0.4, tempered_coeffs(1.0, 12)).unwrap();
    let k2 = solve_third_kernel(&kappa, &power(0.3)).unwrap();
    let all = series_convolve(&series_convolve(&kappa, &power(0.3)).unwrap(), &k2).unwrap();
    assert!((all.mu() - 1.0).abs() < 1e-15);
    assert!((all.coeffs()[0] - 1.0).abs() < 1e-10);
    for c in &all.coeffs()[1..] {
        assert!(c.abs() < 1e-10, "{:?}", all.coeffs());
    }
}

#[test]
fn catalog_series_match_direct_evaluation() {
    let cases = [
        Kernel::tempered(0.5, 1.0).unwrap(),
        Kernel::tempered_associated(0.5, 1.0).unwrap(),
        Kernel::bessel_kappa(0.5).unwrap(),
        Kernel::bessel_k(0.3).unwrap(),
    ];
    for k in &cases {
        let s = k.to_series(24).unwrap();
        for t in [0.1, 0.7, 1.5] {
            let a = k.evaluate(t).unwrap();
            let b = s.evaluate(t);
            assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0), "{k} at {t}: {a} vs {b}");
        }
    }
    assert!(matches!(
        Kernel::ml_kappa(0.25, 0.75).unwrap().to_series(8),
        Err(Error::NotSeries(_))
    ));
}

#[test]
fn laplace_examples() {
    let v = laplace_transform(&Kernel::power_law(0.5).unwrap(), 2.0).unwrap();
    assert!((v - 0.707_106_781_186_547_5).abs() < 1e-15);
    assert_eq!(laplace_transform(&Kernel::H1, 4.0).unwrap(), 0.25);
    let v = laplace_transform(&Kernel::bessel_kappa(0.5).unwrap(), 1.0).unwrap();
    assert!((v - (-1f64).exp()).abs() < 1e-8);
}

#[test]
fn bessel_pair_with_h0_has_unit_laplace_product() {
    let p = 1.0;
    let prod = laplace_transform(&Kernel::bessel_kappa(0.5).unwrap(), p).unwrap()
        * laplace_transform(&Kernel::bessel_k(0.5).unwrap(), p).unwrap()
        * laplace_transform(&Kernel::H0, p).unwrap();
    assert!((prod - 1.0).abs() < 1e-10);
}

fn series_strategy(max_mu: f64) -> impl Strategy<Value = KernelSeries> {
    (0.05..max_mu, prop::collection::vec(-2.0..2.0f64, 1..10))
        .prop_map(|(mu, c)| KernelSeries::truncated(mu, c).unwrap())
}

fn kappa_strategy() -> impl Strategy<Value = KernelSeries> {
    (0.05..0.95f64, 0.3..2.0f64, prop::collection::vec(-1.0..1.0f64, 0..12)).prop_map(
        |(mu, a0, rest)| {
            let mut c = vec![a0];
            c.extend(rest);
            KernelSeries::truncated(mu, c).unwrap()
        },
    )
}

fn max_diff(a: &KernelSeries, b: &KernelSeries) -> f64 {
    assert_eq!(a.coeffs().len(), b.coeffs().len());
    a.coeffs()
        .iter()
        .zip(b.coeffs())
        .map(|(x, y)| (x - y).abs() / x.abs().max(1.0))
        .fold(0.0, f64::max)
}

proptest! {
    #[test]
    fn convolution_commutes(a in series_strategy(1.0), b in series_strategy(1.0)) {
        let ab = series_convolve(&a, &b).unwrap();
        let ba = series_convolve(&b, &a).unwrap();
        prop_assert!((ab.mu() - ba.mu()).abs() < 1e-15);
        prop_assert!(max_diff(&ab, &ba) <= 1e-13);
    }

    #[test]
    fn convolution_associates(
        a in series_strategy(0.66),
        b in series_strategy(0.66),
        c in series_strategy(0.66),
    ) {
        let left = series_convolve(&series_convolve(&a, &b).unwrap(), &c).unwrap();
        let right = series_convolve(&a, &series_convolve(&b, &c).unwrap()).unwrap();
        prop_assert!(max_diff(&left, &right) <= 1e-12);
    }

    #[test]
    fn associated_pair_closes(kappa in kappa_strategy()) {
        let k = solve_associated_pair(&kappa).unwrap();
        let one = series_convolve(&kappa, &k).unwrap();
        prop_assert!((one.mu() - 1.0).abs() < 1e-15);
        prop_assert!((one.coeffs()[0] - 1.0).abs() < 1e-12);
        for c in &one.coeffs()[1..] {
            prop_assert!(c.abs() < 1e-12, "{:?}", one.coeffs());
        }
    }

    #[test]
    fn third_kernel_closes(
        (a, g) in (0.05..0.6f64).prop_flat_map(|a| (Just(a), 0.05..(0.95 - a))),
        rho in 0.0..2.0f64,
    ) {
        let kappa = KernelSeries::truncated(a, tempered_coeffs(rho, 12)).unwrap();
        let k1 = power(g);
        let k2 = solve_third_kernel(&kappa, &k1).unwrap();
        let one = series_convolve(&series_convolve(&kappa, &k1).unwrap(), &k2).unwrap();
        prop_assert!((one.mu() - 1.0).abs() < 1e-14);
        prop_assert!((one.coeffs()[0] - 1.0).abs() < 1e-10);
        for c in &one.coeffs()[1..] {
            prop_assert!(c.abs() < 1e-10);
        }
    }

    #[test]
    fn power_triples_have_unit_laplace_product(
        (a, g) in (0.05..0.9f64).prop_flat_map(|a| (Just(a), 0.01..(0.99 - a))),
    ) {
        let t = KernelTriple::power(a, g).unwrap();
        for p in [1.0, 2.0, 5.0] {
            let prod = laplace_transform(&t.kappa, p).unwrap()
                * laplace_transform(&t.k1, p).unwrap()
                * laplace_transform(&t.k2, p).unwrap();
            prop_assert!((prod - 1.0 / p).abs() <= 1e-8);
        }
    }
}
