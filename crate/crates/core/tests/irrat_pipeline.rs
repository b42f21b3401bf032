use qgamma::irrat::{
    rationality_criterion_check, rationality_criterion_check_base3, reassembled_frac, test_base2, test_base3,
    ThresholdKind,
};

#[test]
fn base2_certificates_reassemble() {
    for n in 4..=8u32 {
        let c = test_base2(n, 1 << n, ThresholdKind::Eq25).unwrap();
        assert!(c.passed, "n={n}");
        assert_eq!(c.frac.len(), 11, "n={n}");
        let r = reassembled_frac(n, 1 << n).unwrap();
        assert!((&r - &c.frac_value).abs().upper().to_f64() < 1e-9, "n={n}");
    }
}

#[test]
fn base3_certificates() {
    for n in 2..=3u32 {
        let c = test_base3(n).unwrap();
        assert!(c.passed && c.kind == "base3_thm8", "n={n}");
    }
}

#[test]
fn criterion_window_endpoints() {
    for n in 3..=6u32 {
        for m in [1u32 << (n - 1), 1 << n, 1 << (n + 1)] {
            let r = rationality_criterion_check(n, m).unwrap();
            assert!(r.d_i_in_unit_interval && r.unequal, "n={n} m={m}");
        }
    }
    assert!(rationality_criterion_check(5, 15).is_err());
    let r = rationality_criterion_check_base3(3).unwrap();
    assert!(r.d_i_in_unit_interval && r.unequal);
}

#[test]
fn certificate_json_is_reproducible() {
    let a = serde_json::to_string(&test_base2(6, 64, ThresholdKind::Eq25).unwrap()).unwrap();
    let b = serde_json::to_string(&test_base2(6, 64, ThresholdKind::Eq25).unwrap()).unwrap();
    assert_eq!(a, b);
    let keys: Vec<String> = serde_json::from_str::<serde_json::Value>(&a)
        .unwrap()
        .as_object()
        .unwrap()
        .keys()
        .cloned()
        .collect();
    assert_eq!(
        keys,
        [
            "base",
            "n",
            "m",
            "d_bitlen",
            "frac",
            "threshold",
            "kind",
            "passed",
            "excluded",
            "denominator_lower_bound",
            "work_bits"
        ]
    );
}
