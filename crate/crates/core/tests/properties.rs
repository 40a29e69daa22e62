use proptest::prelude::*;
use selflink_core::diagram::combinatorial_linking;
use selflink_core::framing::{add_twists, pushoff, so3_lift_class, twist_integral, LIFT_SAMPLES};
use selflink_core::invariant::default_oracle_direction;
use selflink_core::quadrature::writhe_integral;
use selflink_core::*;

fn wobbly() -> impl Strategy<Value = Curve> {
    (0.0..0.3f64, -0.4..0.4f64, 1i64..5).prop_map(|(radial, amplitude, mode)| {
        Curve::perturbed_circle(1.0, radial, amplitude, mode).unwrap()
    })
}

fn sl(curve: &Curve, framing: &Framing, n: usize) -> f64 {
    writhe_integral(curve, &QuadratureConfig::with_n(n)).unwrap().value + twist_integral(framing, n).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn self_linking_is_integer_and_matches_pushoff(c in wobbly(), k in -3i64..=3) {
        let f = add_twists(&FramingRule::Projection(Vec3::z()).apply(&c).unwrap(), k);
        let x = sl(&c, &f, 256);
        prop_assert!((x - x.round()).abs() < 1e-3, "sl_real = {x}");
        let p = pushoff(&c, &f, 0.01, 1024).unwrap();
        let lk = combinatorial_linking(&c, &p, default_oracle_direction(), 1024).unwrap();
        prop_assert_eq!(lk, x.round() as i64);
    }

    #[test]
    fn twists_shift_self_linking(c in wobbly(), k in -3i64..=3) {
        let f = FramingRule::Projection(Vec3::new(0.2, 0.1, 1.0)).apply(&c).unwrap();
        let gap = sl(&c, &add_twists(&f, k), 256) - sl(&c, &f, 256);
        prop_assert!((gap - k as f64).abs() < 1e-6);
    }

    #[test]
    fn odd_twists_flip_lift_class(c in wobbly(), k in -3i64..=3) {
        let f = FramingRule::Projection(Vec3::z()).apply(&c).unwrap();
        let base = so3_lift_class(&f, LIFT_SAMPLES).unwrap();
        let twisted = so3_lift_class(&add_twists(&f, k), LIFT_SAMPLES).unwrap();
        prop_assert_eq!(twisted, if k % 2 == 0 { base } else { base.flipped() });
    }

    #[test]
    fn writhe_ignores_parametrization_and_flips_under_mirror(c in wobbly(), shift in 0.0..1.0f64) {
        let cfg = QuadratureConfig::with_n(256);
        let w = writhe_integral(&c, &cfg).unwrap().value;
        let shifted = writhe_integral(&c.shifted(shift), &cfg).unwrap().value;
        let reversed = writhe_integral(&c.reversed(), &cfg).unwrap().value;
        let mirrored = writhe_integral(&c.mirrored(), &cfg).unwrap().value;
        prop_assert!((w - shifted).abs() < 1e-6);
        prop_assert!((w - reversed).abs() < 1e-10);
        prop_assert!((w + mirrored).abs() < 1e-10);
    }

    #[test]
    fn parallel_and_reference_sums_agree(c in wobbly()) {
        let par = QuadratureConfig::with_n(128);
        let seq = QuadratureConfig { parallel: false, ..par };
        let a = writhe_integral(&c, &par).unwrap().value;
        let b = writhe_integral(&c, &seq).unwrap().value;
        prop_assert!((a - b).abs() < 1e-12);
    }
}
