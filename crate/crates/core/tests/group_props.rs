use proptest::prelude::*;
use subhardy::group::{dilate, inverse, multiply, GroupElement, HeisenbergPoint, SquareMatrix, StepTwoGroup};

fn coord() -> impl Strategy<Value = f64> {
    -5.0..5.0f64
}

fn point(n: usize) -> impl Strategy<Value = HeisenbergPoint<f64>> {
    (
        proptest::collection::vec(coord(), n),
        proptest::collection::vec(coord(), n),
        coord(),
    )
        .prop_map(|(x, y, t)| HeisenbergPoint::new(x, y, t).unwrap())
}

fn close(a: &HeisenbergPoint<f64>, b: &HeisenbergPoint<f64>, tol: f64) -> bool {
    a.approx_eq(b, tol)
}

/// A step-two group with `m = 3` and two random skew matrices.
fn random_group() -> impl Strategy<Value = StepTwoGroup<f64>> {
    proptest::collection::vec(-2.0..2.0f64, 6).prop_map(|c| {
        let skew = |a: f64, b: f64, d: f64| {
            SquareMatrix::from_rows(vec![vec![0.0, a, b], vec![-a, 0.0, d], vec![-b, -d, 0.0]]).unwrap()
        };
        StepTwoGroup::new(3, 5, vec![skew(c[0], c[1], c[2]), skew(c[3], c[4], c[5])]).unwrap()
    })
}

fn element(m: usize, k: usize) -> impl Strategy<Value = GroupElement<f64>> {
    (proptest::collection::vec(coord(), m), proptest::collection::vec(coord(), k))
        .prop_map(|(a, b)| GroupElement::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn heisenberg_associativity(a in point(2), b in point(2), c in point(2)) {
        let l = multiply(&multiply(&a, &b).unwrap(), &c).unwrap();
        let r = multiply(&a, &multiply(&b, &c).unwrap()).unwrap();
        prop_assert!(close(&l, &r, 1e-12 * 100.0));
    }

    #[test]
    fn inverse_axioms(a in point(1)) {
        let e = multiply(&a, &inverse(&a)).unwrap();
        prop_assert!(close(&e, &HeisenbergPoint::identity(1), 0.0));
        prop_assert_eq!(inverse(&inverse(&a)), a);
    }

    #[test]
    fn dilation_is_an_automorphism(a in point(2), b in point(2), lam in 0.1..5.0f64) {
        let l = dilate(&multiply(&a, &b).unwrap(), lam).unwrap();
        let r = multiply(&dilate(&a, lam).unwrap(), &dilate(&b, lam).unwrap()).unwrap();
        prop_assert!(close(&l, &r, 1e-10));
        let back = dilate(&dilate(&a, lam).unwrap(), 1.0 / lam).unwrap();
        prop_assert!(close(&back, &a, 1e-12 * 10.0));
    }

    #[test]
    fn step_two_encoding_matches_heisenberg(a in point(2), b in point(2)) {
        let g = StepTwoGroup::heisenberg(2);
        let ga = g.from_heisenberg(&a).unwrap();
        let gb = g.from_heisenberg(&b).unwrap();
        let prod = g.to_heisenberg(&g.multiply(&ga, &gb).unwrap()).unwrap();
        prop_assert!(close(&prod, &multiply(&a, &b).unwrap(), 1e-12));
        let inv = g.to_heisenberg(&g.inverse(&ga).unwrap()).unwrap();
        prop_assert!(close(&inv, &inverse(&a), 1e-12));
    }

    #[test]
    fn step_two_associativity(g in random_group(), a in element(3, 2), b in element(3, 2), c in element(3, 2)) {
        let l = g.multiply(&g.multiply(&a, &b).unwrap(), &c).unwrap();
        let r = g.multiply(&a, &g.multiply(&b, &c).unwrap()).unwrap();
        prop_assert!(l.approx_eq(&r, 1e-12 * 100.0));
        let e = g.multiply(&a, &g.inverse(&a).unwrap()).unwrap();
        prop_assert!(e.approx_eq(&g.identity(), 1e-12 * 100.0));
    }

    #[test]
    fn horizontal_construction_is_in_plane(g in random_group(), a in element(3, 2), v in proptest::collection::vec(coord(), 3), lam in 0.0..=1.0f64) {
        let gp = g.horizontal_point(&a, &v).unwrap();
        prop_assert!(g.in_horizontal_plane(&a, &gp, 1e-12).unwrap());
        // on H_g the anisotropic combination is the Euclidean one
        let gl = g.convex_combination(&a, &gp, lam).unwrap();
        let lerp = GroupElement::lerp(&a, &gp, lam);
        prop_assert!(gl.approx_eq(&lerp, 1e-12 * 100.0));
    }
}

#[test]
fn spec_examples() {
    let p = HeisenbergPoint::h1;
    assert_eq!(multiply(&p(1.0, 0.0, 0.0), &p(0.0, 1.0, 0.0)).unwrap(), p(1.0, 1.0, 2.0));
    assert_eq!(inverse(&p(1.0, 2.0, 3.0)), p(-1.0, -2.0, -3.0));
    assert_eq!(dilate(&p(1.0, 1.0, 1.0), 2.0).unwrap(), p(2.0, 2.0, 4.0));
    assert!(dilate(&p(1.0, 1.0, 1.0), 0.0).is_err());
    assert!(multiply(&HeisenbergPoint::<f64>::identity(1), &HeisenbergPoint::identity(2)).is_err());

    let g = StepTwoGroup::heisenberg(1);
    let g0 = GroupElement::new(vec![1.0, 0.0], vec![0.0]);
    let gp = g.horizontal_point(&g0, &[1.0, 1.0]).unwrap();
    assert_eq!(gp, GroupElement::new(vec![2.0, 1.0], vec![2.0]));
    assert!(g.in_horizontal_plane(&g0, &gp, 1e-12).unwrap());
    assert!(g.in_horizontal_plane(&g0, &g0, 0.0).unwrap());
    let off = GroupElement::new(vec![1.0, 0.0], vec![1.0]);
    assert!(!g.in_horizontal_plane(&g0, &off, 1e-12).unwrap());
    // off the plane the anisotropic combination is not the Euclidean one
    let mid = g.convex_combination(&g0, &off, 0.5).unwrap();
    let lerp = GroupElement::lerp(&g0, &off, 0.5);
    assert!(!mid.approx_eq(&lerp, 1e-3));
    assert_eq!(g.convex_combination(&g0, &gp, 0.0).unwrap(), g0);
    assert!(g.convex_combination(&g0, &gp, 1.0).unwrap().approx_eq(&gp, 1e-15));
    assert!(g.convex_combination(&g0, &gp, 1.5).is_err());
}

#[test]
fn f32_points_work() {
    let a = subhardy::Point32::h1(1.0, 0.0, 0.0);
    let b = subhardy::Point32::h1(0.0, 1.0, 0.0);
    assert_eq!(multiply(&a, &b).unwrap().t(), 2.0f32);
}
