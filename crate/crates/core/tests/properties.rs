use std::f64::consts::TAU;

use nuclear_range::linalg::{
    build_state, c64, mat2, symmetric_eig2, Mat2, PureState2, RealSym2, C64,
};
use nuclear_range::ranges::{
    conic_implicit, curve_point, nearest_on_curve, nuclear_curve, nuclear_curve_hermitian,
    numerical_range_boundary, sample_curve, support_function, CurveKind, NuclearCurve,
};
use proptest::prelude::*;

const CASES: u32 = 1000;

fn entry() -> impl Strategy<Value = f64> {
    -2.0..2.0f64
}

fn complex_mat() -> impl Strategy<Value = Mat2> {
    prop::array::uniform8(entry()).prop_map(|v| {
        mat2([
            [c64(v[0], v[1]), c64(v[2], v[3])],
            [c64(v[4], v[5]), c64(v[6], v[7])],
        ])
    })
}

fn real_sym() -> impl Strategy<Value = RealSym2> {
    prop::array::uniform3(entry()).prop_map(|[a, b, c]| RealSym2::new(a, b, c))
}

/// `Z` with its spectral interval, `λ` inside it and a curve parameter.
fn admissible() -> impl Strategy<Value = (Mat2, RealSym2, f64, f64)> {
    (complex_mat(), real_sym(), 0.0..1.0f64, 0.0..TAU).prop_map(|(a, z, t, phi)| {
        let (lo, hi) = symmetric_eig2(&z).eigenvalues();
        (a, z, lo + t * (hi - lo), phi)
    })
}

fn hermitian(v: [f64; 4]) -> Mat2 {
    mat2([
        [c64(v[0], 0.0), c64(v[1], v[2])],
        [c64(v[1], -v[2]), c64(v[3], 0.0)],
    ])
}

fn random_state(theta_cos: f64, phi: f64) -> PureState2 {
    PureState2::bloch(theta_cos.clamp(-1.0, 1.0).acos(), phi)
}

fn drawn(c: &NuclearCurve) -> bool {
    !matches!(c.kind, CurveKind::Empty | CurveKind::FullRange)
}

/// Largest distance from samples of `x` to the curve `y`, both ways.
fn curve_hausdorff(x: &NuclearCurve, y: &NuclearCurve) -> f64 {
    let one_way = |p: &NuclearCurve, q: &NuclearCurve| {
        sample_curve(p, 256)
            .values()
            .into_iter()
            .map(|z| nearest_on_curve(q, z, 1024).unwrap().1)
            .fold(0.0, f64::max)
    };
    one_way(x, y).max(one_way(y, x))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn master_identity((a, z, lambda, phi) in admissible()) {
        let c = nuclear_curve(&a, &z, lambda);
        prop_assume!(drawn(&c));
        let psi = build_state(c.eig.rotation_angle, c.theta, phi);
        prop_assert!((psi.expectation(&z.to_mat2()) - c64(lambda, 0.0)).norm() <= 1e-10);
        prop_assert!((psi.expectation(&a) - curve_point(&c, phi).unwrap()).norm() <= 1e-10);
    }

    #[test]
    fn discriminant_and_implicit_form((a, z, lambda, _phi) in admissible()) {
        let c = nuclear_curve(&a, &z, lambda);
        prop_assume!(matches!(c.kind, CurveKind::Ellipse | CurveKind::Circle));
        let conic = conic_implicit(&c).unwrap();
        let det = c.q.im * c.r.re - c.q.re * c.r.im;
        let want = -4.0 / (det * det);
        prop_assert!(conic.discriminant() < 0.0);
        prop_assert!((conic.discriminant() - want).abs() <= 1e-9 * want.abs());
        for k in 0..64 {
            let z = curve_point(&c, TAU * k as f64 / 64.0).unwrap();
            prop_assert!(conic.eval(z).abs() <= 1e-9);
        }
    }

    #[test]
    fn curve_stays_inside_numerical_range((a, z, lambda, _phi) in admissible()) {
        let c = nuclear_curve(&a, &z, lambda);
        prop_assume!(drawn(&c));
        for v in sample_curve(&c, 32).values() {
            for k in 0..64 {
                let theta = TAU * k as f64 / 64.0;
                let proj = (v * C64::from_polar(1.0, -theta)).re;
                prop_assert!(proj <= support_function(&a, theta) + 1e-9);
            }
        }
    }

    #[test]
    fn n1_zero_constraint_is_full_range(a in complex_mat()) {
        let c = nuclear_curve(&a, &RealSym2::zero(), 0.0);
        prop_assert_eq!(c.kind, CurveKind::FullRange);
        prop_assert_eq!(sample_curve(&c, 64).values(), numerical_range_boundary(&a, 64).values());
    }

    #[test]
    fn n2_positive_definite_is_empty(a in complex_mat(), x in prop::array::uniform4(entry())) {
        let xm = nalgebra::Matrix2::new(x[0], x[1], x[2], x[3]);
        prop_assume!(xm.determinant().abs() > 1e-3);
        let p = xm.transpose() * xm + nalgebra::Matrix2::identity() * 1e-6;
        let z = RealSym2::from_entries(p[(0, 0)], p[(0, 1)], p[(1, 1)]);
        prop_assert_eq!(nuclear_curve(&a, &z, 0.0).kind, CurveKind::Empty);
    }

    #[test]
    fn n4_sign_of_constraint_is_irrelevant(a in complex_mat(), z in real_sym()) {
        let (x, y) = (nuclear_curve(&a, &z, 0.0), nuclear_curve(&a, &z.scaled(-1.0), 0.0));
        prop_assert_eq!(x.kind == CurveKind::Empty, y.kind == CurveKind::Empty);
        prop_assume!(drawn(&x) && drawn(&y));
        prop_assert!(curve_hausdorff(&x, &y) <= 1e-9);
    }

    #[test]
    fn n5_swap_symmetry(x in real_sym(), y in real_sym()) {
        let diff = RealSym2::new(x.a - y.a, x.b - y.b, x.c - y.c);
        let u = nuclear_curve(&x.to_mat2(), &diff, 0.0);
        let v = nuclear_curve(&y.to_mat2(), &diff.scaled(-1.0), 0.0);
        prop_assert_eq!(u.kind == CurveKind::Empty, v.kind == CurveKind::Empty);
        prop_assume!(drawn(&u) && drawn(&v));
        prop_assert!(curve_hausdorff(&u, &v) <= 1e-9);
    }

    #[test]
    fn n6_adding_the_constraint_changes_nothing(
        a in complex_mat(), z in real_sym(), s in entry(), phi in 0.0..TAU
    ) {
        let shifted = a + z.to_mat2() * c64(s, 0.0);
        let (x, y) = (nuclear_curve(&a, &z, 0.0), nuclear_curve(&shifted, &z, 0.0));
        prop_assume!(drawn(&x));
        let gap = (curve_point(&x, phi).unwrap() - curve_point(&y, phi).unwrap()).norm();
        prop_assert!(gap <= 1e-9);
    }

    #[test]
    fn n7_traceless_constraint_is_nonempty(a in complex_mat(), d in entry(), b in entry()) {
        let z = RealSym2::new(d, b, -d);
        prop_assert_ne!(nuclear_curve(&a, &z, 0.0).kind, CurveKind::Empty);
    }

    #[test]
    fn n8_discriminant_is_negative((a, z, lambda, _phi) in admissible()) {
        let c = nuclear_curve(&a, &z, lambda);
        prop_assume!(matches!(c.kind, CurveKind::Ellipse | CurveKind::Circle));
        prop_assert!(conic_implicit(&c).unwrap().discriminant() < 0.0);
    }

    #[test]
    fn n9_indefinite_constraint_is_nonempty(a in complex_mat(), z in real_sym()) {
        let (lo, hi) = symmetric_eig2(&z).eigenvalues();
        prop_assume!(lo < 0.0 && hi > 0.0);
        prop_assert_ne!(nuclear_curve(&a, &z, 0.0).kind, CurveKind::Empty);
    }

    #[test]
    fn n10_every_state_lies_on_its_curve(
        a in complex_mat(), zv in prop::array::uniform4(entry()),
        cos_theta in -1.0..1.0f64, phi in 0.0..TAU
    ) {
        let z = hermitian(zv);
        let psi = random_state(cos_theta, phi);
        let lambda = psi.expectation(&z).re;
        let (c, _) = nuclear_curve_hermitian(&a, &z, lambda).unwrap();
        let target = psi.expectation(&a);
        let d = match c.kind {
            CurveKind::FullRange => 0.0,
            _ => nearest_on_curve(&c, target, 1024).unwrap().1,
        };
        prop_assert!(d <= 1e-8, "distance {d}");
    }

    #[test]
    fn p1_affine_covariance(a in complex_mat(), s in 0.01..2.0f64, t in prop::array::uniform2(entry())) {
        let t = c64(t[0], t[1]);
        let moved = a * c64(s, 0.0) + Mat2::identity() * t;
        for k in 0..64 {
            let theta = TAU * k as f64 / 64.0;
            let want = s * support_function(&a, theta) + (t * C64::from_polar(1.0, -theta)).re;
            prop_assert!((support_function(&moved, theta) - want).abs() <= 1e-9);
        }
    }

    #[test]
    fn p2_unitary_invariance(a in complex_mat(), angles in prop::array::uniform3(0.0..TAU)) {
        let [th, ph, ch] = angles;
        let (s, c) = (0.5 * th).sin_cos();
        let u = mat2([
            [c64(c, 0.0), -C64::from_polar(s, ch)],
            [C64::from_polar(s, ph), C64::from_polar(c, ph + ch)],
        ]);
        prop_assert!((u * u.adjoint() - Mat2::identity()).norm() < 1e-14);
        let b = u.adjoint() * a * u;
        for k in 0..64 {
            let theta = TAU * k as f64 / 64.0;
            prop_assert!((support_function(&a, theta) - support_function(&b, theta)).abs() <= 1e-9);
        }
    }
}
