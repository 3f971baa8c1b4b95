use std::f64::consts::PI;
use std::sync::OnceLock;

use lqdlab::complexpoly::RationalFn;
use lqdlab::lqd::*;
use lqdlab::verify::*;
use lqdlab::C64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn singular_instances() -> &'static [LQDInstance] {
    static CELL: OnceLock<Vec<LQDInstance>> = OnceLock::new();
    CELL.get_or_init(|| {
        use FamilyKind::*;
        let b = FamilySpec::new;
        [
            FamilySpec { r: Some(1.5), ..b(NullDisk) },
            FamilySpec { w0: Some(c(1.0, 0.0)), alpha: Some(c(0.7, 0.0)), q: Some(c(0.5, 0.0)), ..b(OneptBoundedSingular) },
            FamilySpec { alpha: Some(c(1.0, 0.0)), c: Some(0.1), q: Some(c(-2.0, 0.0)), ..b(MonomialSingularK2) },
            FamilySpec { alpha: Some(c(1.0, 0.0)), c: Some(0.5), z0: Some(c(-2.0, 0.0)), ..b(Constant) },
        ]
        .iter()
        .map(|s| build_family(s).unwrap())
        .collect()
    })
}

fn one_point_singular(q: f64) -> LQDInstance {
    build_family(&FamilySpec {
        w0: Some(c(1.0, 0.0)),
        alpha: Some(c(0.7, 0.0)),
        q: Some(c(q, 0.0)),
        ..FamilySpec::new(FamilyKind::OneptBoundedSingular)
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    /// Test functions vanish at 0, so a charge term q'/w is invisible.
    #[test]
    fn charge_term_is_invisible(k in 0usize..4, re in -5.0f64..5.0, im in -5.0f64..5.0) {
        let inst = &singular_instances()[k];
        let battery = default_battery(&inst.map);
        let base = quadrature_residual(&inst.map, &inst.quad.h, &battery, 512).unwrap();
        let shifted = inst.quad.h.add(&RationalFn::pole(c(re, im), c(0.0, 0.0), 1));
        let r = quadrature_residual(&inst.map, &shifted, &battery, 512).unwrap();
        prop_assert!((r - base).abs() < 1e-9, "{} vs {}", r, base);
    }

    #[test]
    fn bounded_one_point_verifies(rho in 0.2f64..3.0, th in 0.0f64..(2.0 * PI), alpha in 0.3f64..9.5) {
        let s = FamilySpec {
            w0: Some(C64::from_polar(rho, th)),
            alpha: Some(c(alpha, 0.0)),
            ..FamilySpec::new(FamilyKind::OneptBoundedNonsingular)
        };
        let inst = build_family(&s).unwrap();
        let r = verify_quadrature(&inst, &default_battery(&inst.map), 1024, 1e-8).unwrap();
        prop_assert!(r.pass, "residual {}", r.residual);
    }

    #[test]
    fn scaling_preserves_quadrature(rho in 0.3f64..3.0, th in 0.0f64..(2.0 * PI), x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let base = &singular_instances()[1];
        let a = C64::from_polar(rho, th);
        let s = transform(base, Transform::Scale(a)).unwrap();
        let r = verify_quadrature(&s, &default_battery(&s.map), 512, 1e-8).unwrap();
        prop_assert!(r.pass, "residual {}", r.residual);
        let w = c(x, y) / a + c(3.0, 0.0) / a;
        let lhs = s.quad.h.eval(w).unwrap();
        let rhs = a * base.quad.h.eval(a * w).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-12 * (1.0 + rhs.norm()));
        prop_assert!((s.quad.q - base.quad.q + a.norm_sqr().ln()).norm() < 1e-12);
    }

    #[test]
    fn lambda_max_depends_on_relative_angle(rho in 0.0f64..0.9, th in -PI..PI, arg in -PI..PI, turn in -PI..PI) {
        let z0 = C64::from_polar(rho, th);
        let (a, _) = lambda_max(z0, arg).unwrap();
        let (b, _) = lambda_max(z0 * C64::from_polar(1.0, turn), arg - turn).unwrap();
        prop_assert!((a - b).abs() < 1e-9, "{} vs {}", a, b);
        prop_assert!(a > 0.0);
    }

    #[test]
    fn square_root_h_relation(q in -1.3f64..2.2, x in -1.0f64..1.0, y in -1.0f64..1.0) {
        let base = one_point_singular(q);
        let p = transform(&base, Transform::PowerRoot(2)).unwrap();
        let w = c(x, y) * 3.0;
        prop_assume!((w * w - c(1.0, 0.0)).norm() > 1e-3);
        let lhs = p.quad.h.eval(w).unwrap();
        let rhs = w * base.quad.h.eval(w * w).unwrap() / 2.0;
        prop_assert!((lhs - rhs).norm() < 1e-12 * (1.0 + rhs.norm()));
        prop_assert!((p.quad.q - base.quad.q / 2.0).norm() < 1e-12);
    }
}

#[test]
fn residual_decreases_with_resolution() {
    // near the double-point threshold the boundary is hard to resolve
    let s = FamilySpec {
        w0: Some(c(0.25, 0.0)),
        alpha: Some(c(9.5, 0.0)),
        ..FamilySpec::new(FamilyKind::OneptBoundedNonsingular)
    };
    let inst = build_family(&s).unwrap();
    let battery = default_battery(&inst.map);
    let rs: Vec<f64> =
        [256, 512, 1024, 2048].iter().map(|&n| quadrature_residual(&inst.map, &inst.quad.h, &battery, n).unwrap()).collect();
    for pair in rs.windows(2) {
        assert!(pair[1] <= pair[0].max(1e-12), "{rs:?}");
    }
    assert!(rs[3] < 1e-10, "{rs:?}");
}
