//! Acceptance criteria, one PASS/FAIL line each. The long Sebah
//! reproduction (criterion 8) runs only with `--ignored`,
//! `--include-ignored`, or `QGAMMA_SEBAH=1`.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rug::{Integer, Rational};

use qgamma::boundscheck;
use qgamma::cli::{suite_chi, suite_identities};
use qgamma::gammaengine::{gamma_asym, plan_with_n, signed_error, AsymMethod};
use qgamma::irrat::{
    rationality_criterion_check, rationality_criterion_check_base3, reassembled_frac, test_base2, test_base3,
    ThresholdKind,
};
use qgamma::linforms::{decompose_base3, i_base3_oracle, reference_gamma};
use qgamma::numerics::PrecisionPlan;
use qgamma::numtheory::{lcm_upto, pow};
use qgamma::qpoly::{a_coeffs, chi_sequence, qk_polynomial, IntPolynomial};
use qgamma::series::baseq_accel_term;
use qgamma::HpReal;

const GAMMA_50: &str = "0.57721566490153286060651209008240243104215933593992";

type Outcome = Result<String, String>;

fn check(cond: bool, ok: impl Into<String>, fail: impl Into<String>) -> Outcome {
    if cond {
        Ok(ok.into())
    } else {
        Err(fail.into())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn c1_gamma_digits() -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_qgamma"))
        .args(["gamma", "--digits", "50", "--method", "gosper"])
        .output()
        .map_err(err)?;
    let got = String::from_utf8_lossy(&out.stdout).trim().to_string();
    check(out.status.success() && got == GAMMA_50, got.clone(), format!("printed {got:?}"))
}

fn c2_lcm() -> Outcome {
    let small = [(4u64, 12u64), (8, 840), (16, 720720)];
    for (n, v) in small {
        let d = lcm_upto(n).value;
        if d != v {
            return Err(format!("d_{n} = {d}, expected {v}"));
        }
    }
    for big_n in 1..=1000u32 {
        let d = lcm_upto(2 * u64::from(big_n)).value;
        if d >= Integer::from(1) << (3 * big_n) {
            return Err(format!("d_{} >= 8^{big_n}", 2 * big_n));
        }
    }
    Ok("d_4=12, d_8=840, d_16=720720; d_2N < 8^N for N <= 1000".into())
}

fn c3_chi() -> Outcome {
    let recs = suite_chi().map_err(err)?;
    if let Some(r) = recs.iter().find(|r| !r.passed) {
        return Err(format!("{} {}", r.check, r.params));
    }
    // The q = 2 weight turns the accelerated series into Gosper's, termwise.
    let chi = chi_sequence(2, 31).map_err(err)?;
    for nu in 1..=6u32 {
        for k in 0..=30u32 {
            let t = baseq_accel_term(2, nu, k, &chi[k as usize]);
            let gosper = Rational::from((Integer::from(1), (Integer::from(1) << (nu + k + 1)) * (pow(2, nu) + k).binomial(k)));
            if t != gosper {
                return Err(format!("q=2 term nu={nu} k={k} differs from Gosper's"));
            }
        }
    }
    Ok("chi integral for q<=8, k<=60; chi_3 (signed) and chi_4 closed forms; q=2 termwise".into())
}

fn c4_identities() -> Outcome {
    let recs = suite_identities().map_err(err)?;
    let worst = recs
        .iter()
        .map(|r| r.value.parse::<f64>().unwrap_or(f64::INFINITY))
        .fold(0.0f64, f64::max);
    match recs.iter().find(|r| !r.passed) {
        Some(r) => Err(format!("{} {} diff {}", r.check, r.params, r.value)),
        None => Ok(format!("{} identities, max |I_oracle - (cγ+L-A)| = {worst:.2e} < 1e-30", recs.len())),
    }
}

fn c5_asymptotic() -> Outcome {
    let p = plan_with_n(AsymMethod::Base2M2, 2, 6, 72).map_err(err)?;
    let r = gamma_asym(&p).map_err(err)?;
    let e = signed_error(&r).map_err(err)?;
    let bound = HpReal::from_rational(128, &Rational::from((pow(2, 64), pow(27, 64))));
    let g = reference_gamma(p.work_bits).map_err(err)?;
    let digits70 = r.estimate.to_fixed(70).map_err(err)?;
    if digits70 != g.to_fixed(70).map_err(err)? || !e.abs().certainly_lt(&bound) {
        return Err(format!("eq28 n=6: error {}", e.to_sci(4)));
    }
    for n in 5..=20u32 {
        let p = plan_with_n(AsymMethod::Base2Log, 2, n, 12).map_err(err)?;
        let e = signed_error(&gamma_asym(&p).map_err(err)?).map_err(err)?;
        let lim = HpReal::from_i64(64, 1).mul_pow2(1 - n as i32);
        if !(e.is_certainly_positive() && e.certainly_lt(&lim)) {
            return Err(format!("eq30 n={n}: error {}", e.to_sci(4)));
        }
    }
    for q in 2..=4u64 {
        for n in 2..=3u32 {
            let p = plan_with_n(AsymMethod::BaseQ, q, n, 40).map_err(err)?;
            let e = signed_error(&gamma_asym(&p).map_err(err)?).map_err(err)?;
            // δ < q/(2eq)^m, evaluated directly.
            let two_e_q = HpReal::euler_e(192).mul_i64(2 * q as i64);
            let lim = HpReal::from_i64(192, q as i64).div(&two_e_q.pow_u(p.m)).map_err(err)?;
            if !(e.is_certainly_positive() && e.certainly_lt(&lim)) {
                return Err(format!("theorem 9 q={q} n={n}: delta {}", e.to_sci(4)));
            }
        }
    }
    Ok(format!("eq28 n=6 error {} (70 digits); eq30 n=5..20 in (0, 2^(1-n)); delta windows q=2..4, n=2..3", e.to_sci(3)))
}

fn c6_bounds() -> Outcome {
    let recs = boundscheck::run_suite().map_err(err)?;
    if let Some(r) = recs.iter().find(|r| !r.passed) {
        return Err(format!("{} {} value {}", r.check, r.params, r.value));
    }
    let get = |name: &str| recs.iter().find(|r| r.check == name).map(|r| r.value.clone()).unwrap_or_default();
    Ok(format!(
        "{} checks; r0={} x3={} half_log_f3={}",
        recs.len(),
        get("r0"),
        get("x3"),
        get("half_log_f3")
    ))
}

fn c7_irrat() -> Outcome {
    let mut fracs = Vec::new();
    for n in 4..=8u32 {
        let c = test_base2(n, 1 << n, ThresholdKind::Eq25).map_err(err)?;
        if !c.passed || c.frac.len() != 11 {
            return Err(format!("base 2 n={n}: {:?}", c.frac));
        }
        let r = reassembled_frac(n, 1 << n).map_err(err)?;
        let gap = (&r - &c.frac_value).abs().upper().to_f64();
        if gap >= 1e-9 {
            return Err(format!("base 2 n={n}: reassembly gap {gap:e}"));
        }
        fracs.push(c.frac);
    }
    for n in 2..=3u32 {
        let c = test_base3(n).map_err(err)?;
        if !c.passed || c.frac.len() != 11 {
            return Err(format!("base 3 n={n}: {:?}", c.frac));
        }
        fracs.push(c.frac);
    }
    let mut cells = 0;
    for n in 2..=8u32 {
        for m in (1u32 << (n - 1))..=(1u32 << (n + 1)) {
            let r = rationality_criterion_check(n, m).map_err(err)?;
            if !r.d_i_in_unit_interval {
                return Err(format!("0 < dI < 1 fails at n={n} m={m}: {}", r.d_i));
            }
            cells += 1;
        }
    }
    for n in 2..=3u32 {
        let r = rationality_criterion_check_base3(n).map_err(err)?;
        if !r.d_i_in_unit_interval {
            return Err(format!("0 < dI < 1 fails for base 3 n={n}"));
        }
    }
    Ok(format!("fracs {}; 0<dI<1 on {cells} window cells", fracs.join(" ")))
}

fn c8_sebah() -> Outcome {
    let c = test_base2(12, 4096, ThresholdKind::Simplified5Power).map_err(err)?;
    check(
        c.frac == "0.178346164" && c.passed && c.denominator_lower_bound == Some(4099),
        format!("frac {} -> |b| >= {}", c.frac, c.denominator_lower_bound.unwrap_or(0)),
        format!("frac {} lower bound {:?}", c.frac, c.denominator_lower_bound),
    )
}

fn c9_a0() -> Outcome {
    let tri = IntPolynomial::from_i64(&[1, 1, 1]);
    for k in 1..=5u32 {
        let lhs = IntPolynomial::one_minus_x().pow(6 * k);
        let c = IntPolynomial::constant(Integer::from(Integer::i_pow_u(-3, 3 * k)));
        let rest = &(&lhs - &(&qk_polynomial(k) * &tri)) - &c;
        if !rest.is_zero() {
            return Err(format!("polynomial identity fails at k={k}"));
        }
        let a0 = Integer::from(2) * (Integer::from(1) - Integer::from(Integer::i_pow_u(-27, k)));
        if a_coeffs(k)[0] != a0 {
            return Err(format!("a_0,{k} = {} != 2(1-(-27)^k)", a_coeffs(k)[0]));
        }
    }
    let plan = PrecisionPlan::for_bits(200);
    let tol = HpReal::from_rational(64, &Rational::from((1, Integer::from(Integer::u_pow_u(10, 30)))));
    for n in 2..=3u32 {
        for k in 1..=2u32 {
            let d = decompose_base3(n, k, &plan).map_err(err)?;
            let o = i_base3_oracle(n, 6 * k, &plan).map_err(err)?;
            let diff = (d.residual.as_ref().expect("residual") - &o).abs();
            if !HpReal::exact(diff.upper()).certainly_lt(&tol) || d.coeff_table[0] != a_coeffs(k)[0] {
                return Err(format!("base-3 identity fails at n={n} k={k}"));
            }
        }
    }
    Ok("identity exact for k<=5; a_0,k = 2(1-(-27)^k) (56 at k=1); base-3 identities < 1e-30".into())
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let opt_in = args.iter().any(|a| a == "--ignored" || a == "--include-ignored")
        || std::env::var("QGAMMA_SEBAH").is_ok_and(|v| v == "1");
    // Listing mode used by `cargo test -- --list`.
    if args.iter().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let criteria: [(u32, &str, Duration, fn() -> Outcome, bool); 9] = [
        (1, "gamma 50 digits (gosper)", Duration::from_secs(10), c1_gamma_digits, true),
        (2, "lcm values and d_2N < 8^N", Duration::from_secs(5), c2_lcm, true),
        (3, "chi integrality and closed forms", Duration::from_secs(30), c3_chi, true),
        (4, "decomposition identities < 1e-30 at 200 bits", Duration::from_secs(300), c4_identities, true),
        (5, "asymptotic formulas", Duration::from_secs(120), c5_asymptotic, true),
        (6, "bounds suite", Duration::from_secs(120), c6_bounds, true),
        (7, "irrationality pipeline", Duration::from_secs(300), c7_irrat, true),
        (8, "Sebah n=12 reproduction", Duration::from_secs(3600), c8_sebah, opt_in),
        (9, "a_0,k resolution", Duration::from_secs(60), c9_a0, true),
    ];
    let mut failed = 0;
    for (id, name, budget, f, enabled) in criteria {
        if !enabled {
            println!("SKIP criterion {id}: {name} (opt in with --ignored or QGAMMA_SEBAH=1)");
            continue;
        }
        let t = Instant::now();
        let res = f();
        let dt = t.elapsed();
        let res = match res {
            Ok(msg) if dt > budget => Err(format!("{msg}; took {dt:.1?}, budget {budget:?}")),
            other => other,
        };
        match res {
            Ok(msg) => println!("PASS criterion {id}: {name} [{dt:.2?}] {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {id}: {name} [{dt:.2?}] {msg}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
