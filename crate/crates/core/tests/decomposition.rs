use proptest::prelude::*;
use qgamma::linforms::{
    decompose_base2, decompose_base3, decompose_baseq, i_base2_oracle, i_base2_oracle_blocked, i_base3_oracle,
    i_baseq_oracle, i_baseq_oracle_blocked,
};
use qgamma::numerics::PrecisionPlan;
use qgamma::numtheory::lcm_upto;
use rug::Integer;

fn close(a: &qgamma::HpReal, b: &qgamma::HpReal, tol: f64) -> bool {
    (a - b).abs().upper().to_f64() < tol
}

#[test]
fn base2_grid_matches_oracle() {
    let plan = PrecisionPlan::for_bits(200);
    for n in 2..=6u32 {
        for m in [1u32, 1 << (n - 1), 1 << n, 1 << (n + 1)] {
            let d = decompose_base2(n, m, &plan).unwrap();
            let o = i_base2_oracle(n, m, &plan).unwrap();
            assert!(close(d.residual.as_ref().unwrap(), &o, 1e-30), "n={n} m={m}");
            assert!(d.l_integral, "n={n} m={m}");
        }
    }
}

#[test]
fn base3_grid_matches_oracle_with_recursion_constant() {
    let plan = PrecisionPlan::for_bits(200);
    for n in 2..=3u32 {
        for k in 1..=2u32 {
            let d = decompose_base3(n, k, &plan).unwrap();
            let o = i_base3_oracle(n, 6 * k, &plan).unwrap();
            assert!(close(d.residual.as_ref().unwrap(), &o, 1e-30), "n={n} k={k}");
            // a_{0,k} = 2(1 − (−27)^k) sits at the front of the coefficient table.
            let a0 = Integer::from(2) * (Integer::from(1) - Integer::from(Integer::i_pow_u(-27, k)));
            assert_eq!(d.coeff_table[0], a0, "k={k}");
        }
    }
}

#[test]
fn baseq_grid_matches_both_oracles() {
    let plan = PrecisionPlan::for_bits(200);
    for q in 2..=4u64 {
        for n in 2..=3u32 {
            for m in 1..=4u32 {
                let d = decompose_baseq(q, n, m, &plan).unwrap();
                let r = d.residual.as_ref().unwrap();
                let o = i_baseq_oracle(q, n, m, &plan).unwrap();
                assert!(close(r, &o, 1e-30), "q={q} n={n} m={m}");
                let b = i_baseq_oracle_blocked(q, n, m, &plan, q).unwrap();
                assert!(close(r, &b, 1e-30), "blocked q={q} n={n} m={m}");
            }
        }
    }
}

#[test]
fn a_part_clears_with_lcm() {
    let plan = PrecisionPlan::for_bits(128);
    for n in 2..=4u32 {
        let d = decompose_base2(n, 1 << n, &plan).unwrap();
        let a = d.a_part.exact().expect("exact A");
        let dl = lcm_upto(1 << n).value;
        assert_eq!(*(a.clone() * dl).denom(), 1, "n={n}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn base2_identity_random(n in 2u32..5, frac in 0.0f64..1.0) {
        let m = 1 + (frac * f64::from((2u32 << n) - 1)) as u32;
        let plan = PrecisionPlan::for_bits(160);
        let d = decompose_base2(n, m, &plan).unwrap();
        let o = i_base2_oracle_blocked(n, m, &plan).unwrap();
        let r = d.residual.unwrap();
        prop_assert!(r.is_certainly_positive());
        prop_assert!(close(&r, &o, 1e-40));
    }

    #[test]
    fn baseq_residual_positive(q in 2u64..6, n in 1u32..3, m in 1u32..5) {
        let plan = PrecisionPlan::for_bits(160);
        let d = decompose_baseq(q, n, m, &plan).unwrap();
        prop_assert!(d.residual.unwrap().is_certainly_positive());
    }
}
