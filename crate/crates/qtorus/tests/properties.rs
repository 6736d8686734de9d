//! Randomized algebra-law properties of the twisted product, involution,
//! trace, derivations and Fourier coefficients.

use num_complex::Complex64;
use num_rational::Rational64;
use proptest::prelude::*;

use qtorus::algebra::{
    adjoint, derive, fourier_coeff, l2_norm, trace, twisted_mul, DeformationMatrix,
    ThetaValue, TorusPolynomial,
};

fn theta_value() -> impl Strategy<Value = ThetaValue> {
    prop_oneof![
        (0i64..13, 1i64..13).prop_map(|(p, q)| ThetaValue::Rational(Rational64::new(p, q))),
        (0.0f64..1.0).prop_map(ThetaValue::Float),
    ]
}

fn deformation(d: usize) -> impl Strategy<Value = DeformationMatrix> {
    prop::collection::vec(theta_value(), d * (d - 1) / 2)
        .prop_map(move |upper| DeformationMatrix::from_upper_triangle(d, upper).unwrap())
}

fn poly(d: usize) -> impl Strategy<Value = TorusPolynomial> {
    prop::collection::vec(
        (
            prop::collection::vec(-5i64..=5, d),
            -1.0f64..1.0,
            -1.0f64..1.0,
        ),
        1..5,
    )
    .prop_map(move |terms| {
        let mut p = TorusPolynomial::zero(d);
        for (alpha, re, im) in terms {
            p.add_term(alpha, Complex64::new(re, im));
        }
        p
    })
}

/// (theta, a, b, c) over d in {2, 3}.
fn algebra_case() -> impl Strategy<
    Value = (
        DeformationMatrix,
        TorusPolynomial,
        TorusPolynomial,
        TorusPolynomial,
    ),
> {
    prop_oneof![
        (deformation(2), poly(2), poly(2), poly(2)),
        (deformation(3), poly(3), poly(3), poly(3)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn associativity((th, a, b, c) in algebra_case()) {
        let left = twisted_mul(&twisted_mul(&a, &b, &th).unwrap(), &c, &th).unwrap();
        let right = twisted_mul(&a, &twisted_mul(&b, &c, &th).unwrap(), &th).unwrap();
        prop_assert!(left.max_coeff_distance(&right) < 1e-12);
    }

    #[test]
    fn theta_zero_reduces_to_convolution(a in poly(2), b in poly(2)) {
        let th = DeformationMatrix::commutative(2);
        let prod = twisted_mul(&a, &b, &th).unwrap();
        let mut oracle = TorusPolynomial::zero(2);
        for (x, cx) in a.terms() {
            for (y, cy) in b.terms() {
                oracle.add_term(vec![x[0] + y[0], x[1] + y[1]], cx * cy);
            }
        }
        prop_assert_eq!(prod, oracle);
    }

    #[test]
    fn involution_and_antihomomorphism((th, a, b, _c) in algebra_case()) {
        let twice = adjoint(&adjoint(&a, &th).unwrap(), &th).unwrap();
        prop_assert!(twice.max_coeff_distance(&a) < 1e-12);

        let lhs = adjoint(&twisted_mul(&a, &b, &th).unwrap(), &th).unwrap();
        let rhs = twisted_mul(
            &adjoint(&b, &th).unwrap(),
            &adjoint(&a, &th).unwrap(),
            &th,
        )
        .unwrap();
        prop_assert!(lhs.max_coeff_distance(&rhs) < 1e-12);
    }

    #[test]
    fn traciality((th, a, b, _c) in algebra_case()) {
        let tab = trace(&twisted_mul(&a, &b, &th).unwrap());
        let tba = trace(&twisted_mul(&b, &a, &th).unwrap());
        prop_assert!((tab - tba).norm() < 1e-12);
    }

    #[test]
    fn trace_positivity((th, a, _b, _c) in algebra_case()) {
        let taa = trace(&twisted_mul(&adjoint(&a, &th).unwrap(), &a, &th).unwrap());
        let sum: f64 = a.terms().map(|(_, c)| c.norm_sqr()).sum();
        prop_assert!((taa - Complex64::new(sum, 0.0)).norm() < 1e-12);
        prop_assert!(taa.re >= -1e-12);
        prop_assert!((l2_norm(&a) - sum.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn leibniz_and_commuting_derivations((th, a, b, _c) in algebra_case(), axis_pick in 0usize..3) {
        let d = a.dim();
        let axis = axis_pick % d;
        let lhs = derive(&twisted_mul(&a, &b, &th).unwrap(), axis).unwrap();
        let rhs = twisted_mul(&derive(&a, axis).unwrap(), &b, &th)
            .unwrap()
            .add(&twisted_mul(&a, &derive(&b, axis).unwrap(), &th).unwrap())
            .unwrap();
        prop_assert!(lhs.max_coeff_distance(&rhs) < 1e-10);

        let other = (axis + 1) % d;
        let d12 = derive(&derive(&a, axis).unwrap(), other).unwrap();
        let d21 = derive(&derive(&a, other).unwrap(), axis).unwrap();
        prop_assert!(d12.max_coeff_distance(&d21) < 1e-12);

        prop_assert!(trace(&derive(&a, axis).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn fourier_round_trip((th, a, _b, _c) in algebra_case()) {
        for (alpha, c) in a.terms() {
            let got = fourier_coeff(&a, alpha, &th).unwrap();
            prop_assert!((got - c).norm() < 1e-12);
        }
        // off-support index reads back zero
        let off = vec![97; a.dim()];
        prop_assert!(fourier_coeff(&a, &off, &th).unwrap().norm() < 1e-12);
    }
}
