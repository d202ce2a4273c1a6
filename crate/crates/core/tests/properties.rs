//! Property tests for the coefficient algebra and its invariants.

use anosovq_core::cat::{
    build_cat_coefficient_map, classify_inner, CatSystem, DerivationClass, RATIONALITY_TOL,
};
use anosovq_core::hull::{flow, FrequencyVector, HullPoint};
use anosovq_core::weyl::{
    apply_pullback, apply_pushforward, commutator_norm, symplectic_deviation, symplectic_form,
    Direction, SymplecticMatrix, WeylLabel,
};
use proptest::prelude::*;

fn coeff() -> impl Strategy<Value = f64> {
    prop_oneof![
        (-1e3..1e3f64),
        (-1.0..1.0f64),
        Just(0.0),
        Just(1.0),
        Just(-1.0),
    ]
}

/// Independent re-implementation of the bilinear form, summing in the
/// opposite block order.
fn sigma_reference(a: &Direction, b: &Direction) -> f64 {
    let mut acc = 0.0;
    for i in (0..a.n()).rev() {
        acc -= a.alpha_p()[i] * b.alpha_x()[i];
        acc += a.alpha_x()[i] * b.alpha_p()[i];
    }
    acc
}

/// Random symplectic 2×2 matrix as a product of shears and rotations.
fn symplectic_product() -> impl Strategy<Value = SymplecticMatrix> {
    proptest::collection::vec((-2.0..2.0f64, 0u8..3), 1..6).prop_map(|factors| {
        let mut m = [[1.0, 0.0], [0.0, 1.0]];
        for (p, kind) in factors {
            let f = match kind {
                0 => [[1.0, 0.0], [p, 1.0]],          // lower shear
                1 => [[1.0, p], [0.0, 1.0]],          // upper shear
                _ => [[p.cos(), -p.sin()], [p.sin(), p.cos()]], // rotation
            };
            m = [
                [
                    f[0][0] * m[0][0] + f[0][1] * m[1][0],
                    f[0][0] * m[0][1] + f[0][1] * m[1][1],
                ],
                [
                    f[1][0] * m[0][0] + f[1][1] * m[1][0],
                    f[1][0] * m[0][1] + f[1][1] * m[1][1],
                ],
            ];
        }
        SymplecticMatrix::new_unchecked(1, vec![m[0][0], m[0][1], m[1][0], m[1][1]]).unwrap()
    })
}

proptest! {
    #[test]
    fn form_is_antisymmetric(
        ax in coeff(), ap in coeff(), bx in coeff(), bp in coeff()
    ) {
        let a = Direction::scalar(ax, ap).unwrap();
        let b = Direction::scalar(bx, bp).unwrap();
        let ab = symplectic_form(&a, &b).unwrap();
        let ba = symplectic_form(&b, &a).unwrap();
        prop_assert!((ab + ba).abs() <= 1e-12 * (1.0 + ab.abs()));
    }

    #[test]
    fn commutator_norm_matches_reference(
        ax in coeff(), ap in coeff(), bx in coeff(), bp in coeff()
    ) {
        let a = Direction::scalar(ax, ap).unwrap();
        let beta = WeylLabel::scalar(bx, bp).unwrap();
        let direct = commutator_norm(&a, &beta).unwrap();
        let reference = sigma_reference(&a, beta.as_direction()).abs();
        prop_assert!((direct - reference).abs() <= 1e-9 * (1.0 + reference));
    }

    #[test]
    fn commutator_norm_is_bitwise_the_form_magnitude(
        ax in coeff(), ap in coeff(), bx in coeff(), bp in coeff()
    ) {
        let a = Direction::scalar(ax, ap).unwrap();
        let beta = WeylLabel::scalar(bx, bp).unwrap();
        let direct = commutator_norm(&a, &beta).unwrap();
        let form = symplectic_form(&a, beta.as_direction()).unwrap().abs();
        prop_assert_eq!(direct.to_bits(), form.to_bits());
    }

    #[test]
    fn pullback_preserves_the_form(
        f in symplectic_product(),
        ax in -10.0..10.0f64, ap in -10.0..10.0f64,
        bx in -10.0..10.0f64, bp in -10.0..10.0f64,
    ) {
        prop_assume!(symplectic_deviation(&f) <= 1e-10);
        let a = Direction::scalar(ax, ap).unwrap();
        let b = Direction::scalar(bx, bp).unwrap();
        let before = symplectic_form(&a, &b).unwrap();
        let after = symplectic_form(
            &apply_pullback(&f, &a).unwrap(),
            &apply_pullback(&f, &b).unwrap(),
        ).unwrap();
        let scale = f.entries().iter().fold(1.0f64, |m, v| m.max(v.abs()));
        prop_assert!((before - after).abs() <= 1e-8 * scale * scale * (1.0 + before.abs()));
    }

    #[test]
    fn pushforward_inverts_pullback(
        f in symplectic_product(),
        ax in -10.0..10.0f64, ap in -10.0..10.0f64,
    ) {
        let a = Direction::scalar(ax, ap).unwrap();
        let round = apply_pushforward(&f, &apply_pullback(&f, &a).unwrap()).unwrap();
        let scale = f.entries().iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let tol = 1e-10 * scale * scale * (1.0 + a.norm());
        prop_assert!((round.alpha_x()[0] - ax).abs() <= tol);
        prop_assert!((round.alpha_p()[0] - ap).abs() <= tol);
    }

    #[test]
    fn flow_is_additive(
        th in proptest::collection::vec(-10.0..10.0f64, 1..4),
        om in proptest::collection::vec(-3.0..3.0f64, 1..4),
        s in -50.0..50.0f64,
        t in -50.0..50.0f64,
    ) {
        let d = th.len().min(om.len());
        let theta = HullPoint::new(th[..d].to_vec()).unwrap();
        let omega = FrequencyVector::new(om[..d].to_vec()).unwrap();
        let two_step = flow(&flow(&theta, s, &omega).unwrap(), t, &omega).unwrap();
        let one_step = flow(&theta, s + t, &omega).unwrap();
        prop_assert!(two_step.distance(&one_step) <= 1e-9);
    }

    #[test]
    fn cat_map_preserves_the_two_dof_form(
        x0 in -5.0..5.0f64, x1 in -5.0..5.0f64, p0 in -5.0..5.0f64, p1 in -5.0..5.0f64,
        y0 in -5.0..5.0f64, y1 in -5.0..5.0f64, q0 in -5.0..5.0f64, q1 in -5.0..5.0f64,
        t_kick in 0.0..4.0f64,
    ) {
        let sys = CatSystem::new(t_kick).unwrap();
        let map = build_cat_coefficient_map(&sys);
        let a = Direction::new(vec![x0, x1], vec![p0, p1]).unwrap();
        let b = Direction::new(vec![y0, y1], vec![q0, q1]).unwrap();
        let before = symplectic_form(&a, &b).unwrap();
        let after = symplectic_form(
            &map.apply_direction(&a).unwrap(),
            &map.apply_direction(&b).unwrap(),
        ).unwrap();
        prop_assert!((before - after).abs() <= 1e-12 * (1.0 + before.abs()) * (1.0 + t_kick) * 100.0);
    }

    #[test]
    fn small_rationals_classify_inner(p in 1i64..400, q in 1i64..400, scale in 0.1..50.0f64) {
        let a = Direction::new(
            vec![scale * p as f64, scale * q as f64],
            vec![0.3, -0.7],
        ).unwrap();
        prop_assert_eq!(
            classify_inner(&a, RATIONALITY_TOL).unwrap(),
            DerivationClass::Inner
        );
    }

    #[test]
    fn quadratic_irrationals_classify_outer(
        k in 2u32..30,
        scale in 0.1..50.0f64,
    ) {
        let root = (k as f64).sqrt();
        prop_assume!((root - root.round()).abs() > 1e-9);
        let a = Direction::new(vec![scale, scale * root], vec![0.0, 0.0]).unwrap();
        prop_assert_eq!(
            classify_inner(&a, RATIONALITY_TOL).unwrap(),
            DerivationClass::Outer
        );
    }
}
