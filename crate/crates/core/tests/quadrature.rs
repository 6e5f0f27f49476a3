use proptest::prelude::*;
use sonin_core::kernel::Kernel;
use sonin_core::quadrature::{
    convolve, cumulative_integral, differentiate, GaussRule, Grid, GridFunction, Input,
    TestFunction,
};
use sonin_core::special::{gamma, mittag_leffler};
use sonin_core::Error;

fn h(beta: f64, t: f64) -> f64 {
    t.powf(beta - 1.0) / gamma(beta).unwrap()
}

fn max_err(g: &GridFunction, from: f64, want: impl Fn(f64) -> f64) -> f64 {
    let nodes = g.grid().nodes();
    (0..nodes.len())
        .filter(|&i| nodes[i] >= from)
        .map(|i| (g.value(i) - want(nodes[i])).abs())
        .fold(0.0, f64::max)
}

#[test]
fn grid_nodes_follow_the_grading() {
    let g = Grid::new(16, 2.0, 2.0).unwrap();
    assert_eq!(g.len(), 16);
    assert_eq!(*g.nodes().last().unwrap(), 2.0);
    assert!((g.nodes()[3] - 2.0 * (4.0f64 / 16.0).powi(2)).abs() < 1e-15);
    assert_eq!(Grid::new(7, 1.0, 1.0).unwrap_err(), Error::GridTooCoarse(7));
    assert!(matches!(Grid::new(16, 0.5, 1.0), Err(Error::Grid(_))));
}

#[test]
fn gauss_rules_integrate_polynomials_exactly() {
    let r = GaussRule::legendre(8);
    let s: f64 = r.on_interval(0.0, 2.0).map(|(x, w)| w * x.powi(15)).sum();
    assert!((s - 2f64.powi(16) / 16.0).abs() < 1e-10);
    // ∫₀¹ x^{-1/2} x² dx = 2/5
    let r = GaussRule::jacobi(6, 0.0, -0.5);
    let s: f64 = r.on_interval(0.0, 1.0).map(|(x, w)| w * x * x).sum();
    assert!((s - 0.4).abs() < 1e-14, "{s}");
}

#[test]
fn power_law_against_one_and_t() {
    let g = Grid::new(64, 2.0, 2.0).unwrap();
    for alpha in [0.2, 0.5, 0.9] {
        let k = Kernel::power_law(alpha).unwrap();
        let r = convolve(&k, Input::Function(&TestFunction::constant(1.0)), &g).unwrap();
        assert!(max_err(&r, 0.0, |t| h(alpha + 1.0, t)) < 1e-13);
    }
    let k = Kernel::power_law(0.5).unwrap();
    let r = convolve(&k, Input::Function(&TestFunction::monomial(1.0, 1)), &g).unwrap();
    assert!(max_err(&r, 0.0, |t| h(2.5, t)) < 1e-13);
}

#[test]
fn bessel_pair_is_one_on_the_window() {
    let g = Grid::new(512, 2.0, 2.0).unwrap();
    let r = convolve(
        &Kernel::bessel_kappa(0.5).unwrap(),
        Input::Kernel(&Kernel::bessel_k(0.5).unwrap()),
        &g,
    )
    .unwrap();
    assert!(max_err(&r, 0.05, |_| 1.0) < 1e-6);
}

#[test]
fn h0_is_the_identity() {
    let g = Grid::new(32, 2.0, 2.0).unwrap();
    let f = TestFunction::exp();
    let r = convolve(&Kernel::H0, Input::Function(&f), &g).unwrap();
    assert_eq!(r.values(), f.sample(&g).unwrap().values());
    assert_eq!(
        convolve(&Kernel::H0, Input::Kernel(&Kernel::H0), &g).unwrap_err(),
        Error::NotEvaluable
    );
}

#[test]
fn cumulative_integral_examples() {
    let g = Grid::new(64, 2.0, 2.0).unwrap();
    let one = TestFunction::constant(1.0).sample(&g).unwrap();
    assert!(max_err(&cumulative_integral(&one).unwrap(), 0.0, |t| t) < 1e-14);
    let half = TestFunction::power_law(0.5).sample(&g).unwrap();
    let r = cumulative_integral(&half).unwrap();
    assert!(max_err(&r, 0.0, |t| h(1.5, t)) < 1e-13);
    let g = Grid::new(512, 2.0, 2.0).unwrap();
    let e = TestFunction::exp().sample(&g).unwrap();
    let r = cumulative_integral(&e).unwrap();
    assert!(max_err(&r, 0.0, |t| t.exp() - 1.0) < 1e-8);
}

#[test]
fn differentiate_examples() {
    let g = Grid::new(64, 2.0, 2.0).unwrap();
    let t = TestFunction::monomial(1.0, 1).sample(&g).unwrap();
    assert!(max_err(&differentiate(&t).unwrap(), 0.0, |_| 1.0) < 1e-12);
    let t2 = TestFunction::monomial(1.0, 2).sample(&g).unwrap();
    assert!(max_err(&differentiate(&t2).unwrap(), 0.0, |t| 2.0 * t) < 1e-10);
    let g = Grid::new(1024, 1.0, 2.0).unwrap();
    let s = TestFunction::new(f64::sin).sample(&g).unwrap();
    assert!(max_err(&differentiate(&s).unwrap(), 0.0, f64::cos) < 1e-5);
}

#[test]
fn singular_factor_is_differentiated_exactly() {
    let g = Grid::new(64, 2.0, 2.0).unwrap();
    let f = TestFunction::power_law(1.5).sample(&g).unwrap();
    let d = differentiate(&f).unwrap();
    assert!((d.exponent() + 0.5).abs() < 1e-15);
    assert!(max_err(&d, 0.0, |t| h(0.5, t)) < 1e-12);
    let bad = TestFunction::power_law(0.5).sample(&g).unwrap();
    assert!(matches!(differentiate(&bad), Err(Error::NonIntegrable(_))));
}

#[test]
fn index_law_on_the_grid() {
    let g = Grid::new(512, 2.0, 2.0).unwrap();
    let f = TestFunction::exp();
    let inner = convolve(&Kernel::power_law(0.4).unwrap(), Input::Function(&f), &g).unwrap();
    let twice = convolve(&Kernel::power_law(0.3).unwrap(), Input::Samples(&inner), &g).unwrap();
    let once = convolve(&Kernel::power_law(0.7).unwrap(), Input::Function(&f), &g).unwrap();
    let d = twice.sub(&once).unwrap();
    assert!(max_err(&d, 0.0, |_| 0.0) < 1e-6);
    assert!(max_err(&once, 0.0, |t| t.powf(0.7) * mittag_leffler(1.0, 1.7, t).unwrap()) < 1e-10);
}

#[test]
fn refinement_shrinks_the_error_of_sampled_inputs() {
    // h_α * e^t = t^α E_{1,1+α}(t) with e^t given only at the nodes
    let err = |n: usize| {
        let g = Grid::new(n, 2.0, 2.0).unwrap();
        let e = TestFunction::exp().sample(&g).unwrap();
        let r = convolve(&Kernel::power_law(0.5).unwrap(), Input::Samples(&e), &g).unwrap();
        max_err(&r, 0.0, |t| t.sqrt() * mittag_leffler(1.0, 1.5, t).unwrap())
    };
    let (e16, e32, e64) = (err(16), err(32), err(64));
    assert!(e16 / e32 >= 3.0, "{e16:e} {e32:e}");
    assert!(e32 / e64 >= 3.0, "{e32:e} {e64:e}");
}

#[test]
fn mismatched_grids_are_rejected() {
    let a = TestFunction::exp().sample(&Grid::new(16, 2.0, 2.0).unwrap()).unwrap();
    let g = Grid::new(32, 2.0, 2.0).unwrap();
    assert_eq!(
        convolve(&Kernel::power_law(0.5).unwrap(), Input::Samples(&a), &g).unwrap_err(),
        Error::GridMismatch
    );
}

#[test]
fn csv_round_trip_keeps_fifteen_digits() {
    let g = Grid::new(64, 2.0, 2.0).unwrap();
    let f = TestFunction::power_law(0.7).sample(&g).unwrap();
    let text = f.to_csv_string();
    assert!(text.starts_with("t,value\n"));
    let back = GridFunction::read_csv(text.as_bytes(), f.exponent()).unwrap();
    assert_eq!(back.grid().nodes(), g.nodes());
    for (a, b) in f.values().iter().zip(back.values()) {
        assert!((a - b).abs() <= 1e-14 * a.abs(), "{a} {b}");
    }
    assert!(matches!(
        GridFunction::read_csv("t,value\n1,x\n".as_bytes(), 0.0),
        Err(Error::Csv(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn convolution_is_linear(a in -3.0..3.0f64, b in -3.0..3.0f64, alpha in 0.1..0.95f64) {
        let g = Grid::new(64, 2.0, 2.0).unwrap();
        let k = Kernel::power_law(alpha).unwrap();
        let f = TestFunction::exp().sample(&g).unwrap();
        let s = TestFunction::new(f64::sin).sample(&g).unwrap();
        let mix = f.combine(a, &s, b).unwrap();
        let lhs = convolve(&k, Input::Samples(&mix), &g).unwrap();
        let kf = convolve(&k, Input::Samples(&f), &g).unwrap();
        let ks = convolve(&k, Input::Samples(&s), &g).unwrap();
        let rhs = kf.combine(a, &ks, b).unwrap();
        for i in 0..g.len() {
            let scale = 1.0f64.max(lhs.value(i).abs());
            prop_assert!((lhs.value(i) - rhs.value(i)).abs() <= 1e-12 * scale);
        }
    }
}
