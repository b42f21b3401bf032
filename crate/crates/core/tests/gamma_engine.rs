use qgamma::gammaengine::{gamma_asym, plan_with_n, predicted_error_log10, signed_error, AsymMethod};

fn log10_abs(x: &qgamma::HpReal) -> f64 {
    let u = x.abs().upper();
    if u.is_zero() {
        f64::NEG_INFINITY
    } else {
        u.to_f64().log10()
    }
}

#[test]
fn measured_error_within_prediction() {
    let grid: [(AsymMethod, u64, &[u32]); 6] = [
        (AsymMethod::Base2M4, 2, &[2, 3, 4, 5]),
        (AsymMethod::Base2M2, 2, &[2, 3, 4, 5, 6]),
        (AsymMethod::Base2M1, 2, &[2, 3, 4, 5, 6]),
        (AsymMethod::Base3, 3, &[2, 3, 4]),
        (AsymMethod::BaseQ, 3, &[2, 3, 4]),
        (AsymMethod::BaseQ, 4, &[2, 3]),
    ];
    for (method, q, ns) in grid {
        for &n in ns {
            let plan = plan_with_n(method, q, n, 60).unwrap();
            let r = gamma_asym(&plan).unwrap();
            let e = signed_error(&r).unwrap();
            let measured = log10_abs(&e);
            // The O(·) terms carry constants up to 6 (base 2) or q (base q).
            let slack = (6f64).log10();
            assert!(
                measured <= predicted_error_log10(method, plan.q, n, plan.m) + slack,
                "{method:?} q={q} n={n}: measured {measured}, predicted {}",
                plan.predicted_error_log10
            );
            assert!(r.value.overlaps(&qgamma::linforms::reference_gamma(plan.work_bits).unwrap()));
        }
    }
}

#[test]
fn log_formula_error_positive_and_bounded() {
    for n in 5..=20u32 {
        let plan = plan_with_n(AsymMethod::Base2Log, 2, n, 12).unwrap();
        let r = gamma_asym(&plan).unwrap();
        let e = signed_error(&r).unwrap();
        let bound = qgamma::HpReal::from_i64(64, 1).mul_pow2(1 - n as i32);
        assert!(e.is_certainly_positive() && e.certainly_lt(&bound), "n={n}");
    }
}
