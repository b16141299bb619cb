use proptest::prelude::*;
use subhardy::boundary::{d_cc_halfspace, d_eucl_torus, d_gauge_halfspace, Torus};
use subhardy::group::{CylCoords, HeisenbergPoint};
use subhardy::horizontal::*;

const H: f64 = 1e-5;
/// Step for second differences: at `1e-5` rounding alone costs about
/// `4ε|d|/h² ≈ 1e-5` relative.
const H2: f64 = 1e-4;

/// First partials at step `H`, second partials at step `H2`.
fn fd<F: Fn(f64, f64) -> subhardy::Result<f64>>(f: F, r: f64, t: f64) -> HorizontalDerivs<f64> {
    let a = fd_cyl_derivs(&f, r, t, H).unwrap();
    let b = fd_cyl_derivs(&f, r, t, H2).unwrap();
    HorizontalDerivs { d_r: a.d_r, d_t: a.d_t, ..b }
}

/// Relative agreement of each partial, relative to `max(|closed form|, |d|)`:
/// second differences lose `ε|d|/h²` to rounding, so the field value sets the
/// floor of the scale.
fn agree(cf: &HorizontalDerivs<f64>, fd: &HorizontalDerivs<f64>, d: f64, tol: f64) -> Result<(), String> {
    let pairs = [
        ("d_r", cf.d_r, fd.d_r),
        ("d_t", cf.d_t, fd.d_t),
        ("d_rr", cf.d_rr, fd.d_rr),
        ("d_tt", cf.d_tt, fd.d_tt),
        ("d_rt", cf.d_rt, fd.d_rt),
    ];
    for (name, a, b) in pairs {
        if (a - b).abs() > tol * a.abs().max(d.abs()) {
            return Err(format!("{name}: closed {a} vs fd {b}"));
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn gauge_derivs_match_fd(r in 0.2..3.0f64, t in 0.05..3.0f64) {
        let cf = gauge_derivs(r, t).unwrap().derivs;
        let fd = fd(d_gauge_halfspace, r, t);
        let d = d_gauge_halfspace(r, t).unwrap();
        prop_assert!(agree(&cf, &fd, d, 1e-5).is_ok(), "{:?}", agree(&cf, &fd, d, 1e-5));
    }

    #[test]
    fn cc_derivs_match_fd(r in 0.2..3.0f64, t in 0.05..3.0f64) {
        let (_, cf, _) = cc_derivs(r, t).unwrap();
        let fd = fd(d_cc_halfspace, r, t);
        let d = d_cc_halfspace(r, t).unwrap();
        prop_assert!(agree(&cf, &fd, d, 1e-5).is_ok(), "{:?}", agree(&cf, &fd, d, 1e-5));
    }

    #[test]
    fn torus_derivs_match_fd(q in 0.2..0.9f64, th in 0.0..std::f64::consts::TAU) {
        let torus = Torus::new(3.0f64, 1.0, 1).unwrap();
        let (r, t) = (3.0 + q * th.cos(), q * th.sin());
        let f = |r: f64, t: f64| d_eucl_torus(&torus, &CylCoords::rt(r, t)?);
        let cf = torus_derivs(&torus, r, t).unwrap();
        let fd = fd(f, r, t);
        prop_assert!(agree(&cf, &fd, f(r, t).unwrap(), 1e-5).is_ok());
    }

    #[test]
    fn plap_assembly_matches_closed_form(r in 0.05..5.0f64, t in 0.01..5.0f64, p in 1.1..4.0f64, n in 1usize..4) {
        let g = gauge_derivs(r, t).unwrap();
        let asm = p_laplacian_cyl(&g.derivs, g.a_r, g.a_t, r, n, p).unwrap();
        let cf = closed_form_plap_gauge(r, t, n, p).unwrap();
        prop_assert!((asm.value - cf).abs() <= 1e-10 * cf.abs(), "{} vs {}", asm.value, cf);
        prop_assert!(cf < 0.0);
        prop_assert!((asm.a - g.a).abs() <= 1e-12);
    }

    #[test]
    fn p_two_is_the_sub_laplacian(r in 0.05..5.0f64, t in 0.01..5.0f64, n in 1usize..4) {
        let g = gauge_derivs(r, t).unwrap();
        let rep = p_laplacian_cyl(&g.derivs, g.a_r, g.a_t, r, n, 2.0).unwrap();
        prop_assert_eq!(rep.value, horizontal_laplacian_cyl(&g.derivs, r, n).unwrap());
    }

    #[test]
    fn cc_eikonal_and_bound(r in 1e-3..10.0f64, t in 1e-3..10.0f64, n in 1usize..4) {
        let c = cc_halfspace_laplacian(r, t, n).unwrap();
        prop_assert!((c.grad_sq - 1.0).abs() <= 1e-12);
        prop_assert!(c.exact <= 0.0);
        // equal for n = 1; the two expressions round differently for small φ
        prop_assert!(c.bound >= c.exact - 1e-6 * c.exact.abs());
    }

    #[test]
    fn fd_gradient_of_gauge_distance(x in -2.0..2.0f64, y in -2.0..2.0f64, t in 0.1..3.0f64) {
        prop_assume!(x * x + y * y > 0.05);
        let xi = HeisenbergPoint::h1(x, y, t);
        let grad = fd_horizontal_gradient(|p: &HeisenbergPoint<f64>| d_gauge_halfspace(p.r(), p.t()), &xi, H).unwrap();
        let a = grad.iter().map(|v| v * v).sum::<f64>();
        let g = gauge_derivs(xi.r(), t).unwrap();
        prop_assert!((a - g.a).abs() <= 1e-6);
    }
}

#[test]
fn spec_values() {
    let d = |d_r, d_t| HorizontalDerivs { d_r, d_t, ..Default::default() };
    assert_eq!(horizontal_gradient_sq_cyl(&d(1.0, 0.0), 0.3), 1.0);
    assert_eq!(horizontal_gradient_sq_cyl(&d(0.0, 1.0), 0.5), 1.0);
    let torus = Torus::new(3.0f64, 1.0, 1).unwrap();
    let tg = torus_derivs(&torus, 4.0, 0.0).unwrap();
    assert_eq!(horizontal_gradient_sq_cyl(&tg, 4.0), 1.0);
    // u = r²
    let u = HorizontalDerivs::<f64> { d_r: 2.0 * 1.7, d_rr: 2.0, ..Default::default() };
    assert!((horizontal_laplacian_cyl(&u, 1.7, 3).unwrap() - 12.0).abs() < 1e-12);
    let t35 = torus_derivs(&torus, 3.5, 0.0).unwrap();
    assert!((horizontal_laplacian_cyl(&t35, 3.5, 1).unwrap() + 98.285_714_285_714_28).abs() < 1e-9);
    assert!(horizontal_laplacian_cyl(&t35, 0.0, 1).is_err());

    let g = gauge_derivs(1.0f64, 3.0).unwrap();
    assert_eq!((g.s, g.g, g.g_r, g.g_t), (1.0, 2.0, -4.0, 2.0));
    assert!((g.a - 2f64.powf(-0.5)).abs() < 1e-14);
    let v = closed_form_plap_gauge(1.0f64, 3.0, 1, 2.0).unwrap();
    assert!((v + 2f64.powf(-0.75)).abs() < 1e-12);
    assert!(closed_form_plap_gauge(1.0f64, 1e-8, 1, 2.0).unwrap().abs() < 1e-7);
    assert!(closed_form_plap_gauge(-1.0, 1.0, 1, 2.0).is_err());

    let fd = fd_horizontal_gradient(|p: &HeisenbergPoint<f64>| Ok(p.t()), &HeisenbergPoint::h1(1.0, 0.0, 0.0), H).unwrap();
    assert!((fd[0]).abs() < 1e-9 && (fd[1] + 2.0).abs() < 1e-9);
    let fx = fd_horizontal_gradient(|p: &HeisenbergPoint<f64>| Ok(p.x()[0]), &HeisenbergPoint::h1(0.3, 0.2, 0.1), H).unwrap();
    assert!((fx[0] - 1.0).abs() < 1e-9 && fx[1].abs() < 1e-9);
    let fg = fd_horizontal_gradient(|p: &HeisenbergPoint<f64>| d_gauge_halfspace(p.r(), p.t()), &HeisenbergPoint::h1(1.0, 0.0, 3.0), H).unwrap();
    assert!((fg.iter().map(|v| v * v).sum::<f64>() - 2f64.powf(-0.5)).abs() < 1e-6);

    let c = cc_halfspace_laplacian(1.0f64, std::f64::consts::FRAC_PI_2 + 1.0, 1).unwrap();
    assert!((c.derivs.d_r + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-14);
}

#[test]
fn plap_singular_set_is_an_error() {
    let zero = HorizontalDerivs::default();
    assert!(p_laplacian_cyl(&zero, 0.0, 0.0, 1.0, 1, 3.0).is_err());
}

#[test]
fn torus_w_sign_matches_assembly() {
    let torus = Torus::new(3.0f64, 1.0, 1).unwrap();
    for &(r, t) in &[(3.0, 0.4), (3.5, 0.2), (2.4, -0.3), (3.2, 0.7)] {
        for &p in &[2.0f64, 3.0, 1.5] {
            let tw = torus_w(p, 1, &torus, r, t).unwrap();
            let d = torus_derivs(&torus, r, t).unwrap();
            let a = horizontal_gradient_sq_cyl(&d, r);
            let (a_r, a_t) = gradient_sq_partials(&d, r);
            let v = p_laplacian_cyl(&d, a_r, a_t, r, 1, p).unwrap().value;
            assert_eq!(v.signum(), -tw.w.signum(), "r={r} t={t} p={p}");
            let dd = (r - 3.0f64).powi(2) + t * t;
            let rebuilt = -a.powf((p - 4.0) / 2.0) * dd.powf(-2.5) * tw.w;
            assert!((rebuilt - v).abs() <= 1e-10 * v.abs(), "{rebuilt} vs {v}");
        }
    }
    let on_core = torus_w(3.0, 1, &torus, 3.0, 0.5).unwrap();
    assert_eq!(on_core.c0, 0.0);
    let flat = torus_w(2.0, 1, &torus, 3.6, 0.0).unwrap();
    assert!((flat.w * 3.6 - flat.c0).abs() < 1e-12);
    assert!(torus_w(2.0, 1, &torus, 3.0, 0.0).is_err());
}

#[test]
fn beta_values_and_certificates() {
    for n in 1..=3 {
        assert_eq!(beta_constant(2.0, n).unwrap().beta, 2.0 * n as f64);
    }
    let b3 = beta_constant(3.0, 1).unwrap();
    assert_eq!((b3.beta, b3.case), (3.0, BetaCase::AboveThreshold));
    assert_eq!(beta_constant(1.5, 1).unwrap().beta, 3.0);
    assert!(beta_constant(1.0, 1).is_err());
    assert!((p0_threshold(1).unwrap() - 3f64.sqrt()).abs() < 1e-12);
    assert!((p0_threshold(2).unwrap() - (22f64.sqrt() - 3.0)).abs() < 1e-12);
    for n in 1..=10 {
        let p0 = p0_threshold(n).unwrap();
        assert!(p0 > 1.5 && p0 < 2.0);
    }
    // observed, not asserted by theory: β ≥ 2n along a p sweep
    let mut min_excess = f64::INFINITY;
    for n in 1..=3 {
        for k in 1..200 {
            let p = 1.0 + k as f64 * 0.02;
            min_excess = min_excess.min(beta_constant(p, n).unwrap().beta - 2.0 * n as f64);
        }
    }
    println!("min β − 2n over the sweep: {min_excess}");

    let pass = torus_certificate(2.0, 1, 10.0, 1.0, 200).unwrap();
    assert!(pass.pass && pass.condition_i && pass.condition_ii);
    let fail = torus_certificate(2.0, 1, 1.5, 1.0, 50).unwrap();
    assert!(!fail.pass && !fail.condition_ii);
    assert!(fail.reasons.iter().any(|r| r.contains("condition (ii)")));
    let p3 = torus_certificate(3.0, 1, 3.01, 1.0, 200).unwrap();
    assert!(p3.condition_i && p3.condition_ii);
    println!("p=3 R=3.01 certificate: pass={} worst_relative={}", p3.pass, p3.worst_relative);
}

#[test]
fn gauge_grid_scans() {
    let grid = GridSpec { r_min: 0.1, r_max: 5.0, t_min: 0.1, t_max: 5.0, size: 200 };
    assert!(gauge_sign_scan(grid, 2, 2.5).unwrap().pass);
    assert!(cc_sign_scan(grid, 1).unwrap().pass);
}
