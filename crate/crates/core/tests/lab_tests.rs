use subhardy::boundary::{d_cc_halfspace, d_gauge_halfspace, Metric};
use subhardy::group::{dilate, GroupElement, HeisenbergPoint, StepTwoGroup};
use subhardy::lab::*;

fn halfspace() -> QuotientDomain {
    QuotientDomain::halfspace(1)
}

#[test]
fn quotient_examples() {
    let q = QuadratureSpec::default();
    let g = hardy_quotient(&halfspace(), Metric::Gauge, 2.0, &TestFunctionSpec::new(0.1), &q).unwrap();
    assert!(g.converged);
    assert!(g.quotient >= 0.25 && g.quotient <= 0.41, "{g:?}");
    assert_eq!(g.quotient, g.numerator / g.denominator);
    assert!(g.numerator > 0.0 && g.denominator > 0.0);
    assert_eq!(g.target, 0.25);

    let c = hardy_quotient(&halfspace(), Metric::Cc, 2.0, &TestFunctionSpec::new(0.1), &q).unwrap();
    assert!(c.quotient >= 0.25 - 1e-3, "{c:?}");

    let t = hardy_quotient(
        &QuotientDomain::torus(1, 10.0, 1.0),
        Metric::Euclidean,
        2.0,
        &TestFunctionSpec::torus(0.1),
        &q,
    )
    .unwrap();
    assert!(t.quotient >= 0.25 - 1e-3, "{t:?}");
}

#[test]
fn other_exponents_stay_above_the_constant() {
    let q = QuadratureSpec { size: 200, ..Default::default() };
    for &(p, n) in &[(1.5, 1), (3.0, 1), (3.0, 2), (2.5, 2)] {
        for metric in [Metric::Gauge, Metric::Cc] {
            let rep = hardy_quotient(&QuotientDomain::halfspace(n), metric, p, &TestFunctionSpec::new(0.1), &q).unwrap();
            assert!(rep.quotient >= rep.target - 2.0 * rep.est_error, "{rep:?}");
            assert!(rep.quotient <= u_ceiling(p, 0.1) + 0.05, "{rep:?}");
        }
    }
}

#[test]
fn sweep_brackets() {
    let sweep = epsilon_sweep(
        &halfspace(),
        Metric::Gauge,
        2.0,
        &[0.2, 0.1, 0.05],
        &TestFunctionSpec::new(0.2),
        &QuadratureSpec::default(),
        0.05,
    )
    .unwrap();
    assert!(sweep.decreasing && sweep.above_floor && sweep.below_ceiling, "{sweep:?}");
    for (rep, gap) in sweep.reports.iter().zip(&sweep.gaps) {
        assert!(*gap <= (0.5 + rep.eps).powi(2) - 0.25 + 0.05);
    }
}

#[test]
fn invalid_configurations() {
    let q = QuadratureSpec::default();
    let u = TestFunctionSpec::new(0.1);
    assert!(hardy_quotient(&halfspace(), Metric::Gauge, 1.0, &u, &q).is_err());
    let bad = TestFunctionSpec { cutoff_inner: 0.9, cutoff_outer: 0.5, ..u };
    assert!(hardy_quotient(&halfspace(), Metric::Gauge, 2.0, &bad, &q).is_err());
    let coarse = QuadratureSpec { size: 2, ..q };
    assert!(hardy_quotient(&halfspace(), Metric::Gauge, 2.0, &u, &coarse).is_err());
    assert!(uncertainty_check(&halfspace(), Metric::Euclidean, &u, &q).is_err());
}

#[test]
fn non_convergence_is_flagged() {
    let q = QuadratureSpec { size: 50, max_error: 1e-3 };
    let rep = hardy_quotient(&halfspace(), Metric::Gauge, 2.0, &TestFunctionSpec::new(0.0), &q).unwrap();
    assert!(!rep.converged, "{rep:?}");
    let coarse = QuadratureSpec { size: 4, max_error: 1e-6 };
    let rep = hardy_quotient(&halfspace(), Metric::Gauge, 2.0, &TestFunctionSpec::new(0.1), &coarse).unwrap();
    assert!(!rep.converged && rep.est_error > 1e-6, "{rep:?}");
}

#[test]
fn uncertainty_principle() {
    let q = QuadratureSpec::default();
    for metric in [Metric::Gauge, Metric::Cc] {
        let u = TestFunctionSpec::new(0.1);
        let a = uncertainty_check(&halfspace(), metric, &u, &q).unwrap();
        assert!(a.ratio >= 1.0 - 1e-3, "{a:?}");
        let b = uncertainty_check(&halfspace(), metric, &TestFunctionSpec { amplitude: 3.0, ..u }, &q).unwrap();
        assert!((a.ratio - b.ratio).abs() <= 1e-12 * a.ratio);
    }
}

#[test]
fn thread_count_does_not_change_quotients() {
    let q = QuadratureSpec { size: 120, ..Default::default() };
    let run = || hardy_quotient(&halfspace(), Metric::Cc, 2.0, &TestFunctionSpec::new(0.1), &q).unwrap();
    let a = run();
    let b = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(run);
    let c = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap().install(run);
    assert_eq!(a.quotient.to_bits(), b.quotient.to_bits());
    assert_eq!(a.quotient.to_bits(), c.quotient.to_bits());
}

#[test]
fn collar_mass_diverges() {
    let masses: Vec<f64> = [1e-2, 1e-3, 1e-4, 1e-5]
        .iter()
        .map(|&d| torus_collar_mass(1, 10.0, 1.0, 0.0, d, 200).unwrap())
        .collect();
    assert!(masses.windows(2).all(|w| w[1] > w[0] + 100.0), "{masses:?}");
}

#[test]
fn cube_sampling_has_no_violations() {
    let s = cube_concavity_sampling(100_000, 7, 0.5).unwrap();
    assert_eq!(s.samples, 100_000);
    assert!(s.evaluated > 10_000);
    assert_eq!(s.violations, 0, "{s:?}");
    assert!(s.worst_margin >= -1e-12);
    assert_eq!(s, cube_concavity_sampling(100_000, 7, 0.5).unwrap());
}

#[test]
fn h_concavity_direct_example() {
    let group = StepTwoGroup::heisenberg(1);
    let cube = subhardy::Polytope::unit_cube(1);
    let dist = |g: &GroupElement<f64>| -> subhardy::Result<Option<f64>> {
        let p = group.to_heisenberg(g)?;
        Ok(Some(cube.distance(&p, Metric::Euclidean)?))
    };
    let g = GroupElement::new(vec![0.5, 0.5], vec![0.5]);
    let s = h_concavity_sample(&group, dist, &g, &[0.2, 0.0], 0.5).unwrap().unwrap();
    assert!(s.margin >= 0.0);
}

#[test]
fn counterexample_scales_linearly() {
    let ts = [1e-2, 1e-3, 1e-4];
    let mut margins = Vec::new();
    for &t in &ts {
        let rep = h_concavity_counterexample_search(t).unwrap();
        assert!(rep.found, "{rep:?}");
        let g = StepTwoGroup::heisenberg(1);
        let a = GroupElement::new(rep.best.xi[..2].to_vec(), rep.best.xi[2..].to_vec());
        let b = GroupElement::new(rep.best.xi_prime[..2].to_vec(), rep.best.xi_prime[2..].to_vec());
        assert!(g.in_horizontal_plane(&a, &b, 1e-12).unwrap());
        margins.push(rep.best.margin);
    }
    let slope = log_log_slope(&ts, &margins).unwrap();
    assert!((slope - 1.0).abs() < 0.05, "slope {slope}");
    // the r = 1, a = 2 configuration is close to t/24
    let t = 1e-3;
    let d = |r: f64| d_gauge_halfspace(r, t).unwrap();
    let margin = 0.5 * (d(1.0) + d(2.0)) - d(1.5);
    assert!((margin - t / 24.0).abs() < 1e-3 * t);
}

#[test]
fn lipschitz_probe_is_bounded_and_scale_stable() {
    let d_gauge = |p: &HeisenbergPoint<f64>| d_gauge_halfspace(p.r(), p.t());
    let region = [(-0.5, 0.5), (-0.5, 0.5), (1e-6, 1.0)];
    let rep = lipschitz_probe(d_gauge, Metric::Gauge, &region, 10_000, 1).unwrap();
    assert!(rep.max_ratio.is_finite() && rep.max_ratio > 0.0);
    println!("gauge Lipschitz ratio over {} pairs: {}", rep.pairs, rep.max_ratio);
    let d_cc = |p: &HeisenbergPoint<f64>| d_cc_halfspace(p.r(), p.t());
    let cc = lipschitz_probe(d_cc, Metric::Cc, &region, 10_000, 1).unwrap();
    assert!(cc.max_ratio.is_finite());
    assert_eq!(rep, lipschitz_probe(d_gauge, Metric::Gauge, &region, 10_000, 1).unwrap());

    let (g, gp) = rep.argmax.clone().unwrap();
    let pt = |v: &[f64]| HeisenbergPoint::h1(v[0], v[1], v[2]);
    let base = lipschitz_ratio(d_gauge, Metric::Gauge, &pt(&g), &pt(&gp)).unwrap().unwrap();
    for &lam in &[0.01, 0.5, 7.0] {
        let scaled = lipschitz_ratio(
            d_gauge,
            Metric::Gauge,
            &dilate(&pt(&g), lam).unwrap(),
            &dilate(&pt(&gp), lam).unwrap(),
        )
        .unwrap()
        .unwrap();
        assert!((scaled - base).abs() <= 1e-9 * base);
    }
}
