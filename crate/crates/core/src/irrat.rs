//! Fractional-part irrationality tests: if `{d·L}` exceeds a bound that
//! dominates `d·I`, no divisor of the excluded product can be a denominator
//! of γ.

use rug::{Integer, Rational};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linforms::{
    i_base2_oracle, i_base3_oracle, l_form_base2, l_form_base3, parts_base2, reference_gamma, LForm,
};
use crate::numerics::{fractional_part, with_retry, HpReal, PrecisionPlan};
use crate::numtheory::{lcm_upto, pow, LcmTable};

/// Certified decimals reported for `{d·L}`.
pub const FRAC_DIGITS: u32 = 9;

const THRESHOLD_PREC: u32 = 192;

/// Which bound `{d·L}` is compared against.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdKind {
    /// `6 (128/729)^{2^{n−1}}`, `m = 2^n`.
    Eq25,
    /// `5^{−2^{n−1}}`, `m = 2^n`, `n > 1`.
    #[serde(rename = "simplified_5power")]
    Simplified5Power,
    /// `8^{2^{n−1}} · 6 · ρ(r)^m` with `r = 2^{n+1}/m`.
    Eq26,
    /// `3 (3/4)^{3^{n+1}}`, base 3 with `m = 3^n − 3`.
    #[serde(rename = "base3_thm8")]
    Base3Thm8,
    /// `e^{(1+ε) 2^n} ρ(r)^m`; conditional on `d_N < e^{(1+ε)N}`.
    EpsRefined { eps: f64 },
}

impl ThresholdKind {
    pub fn name(&self) -> &'static str {
        match self {
            ThresholdKind::Eq25 => "eq25",
            ThresholdKind::Simplified5Power => "simplified_5power",
            ThresholdKind::Eq26 => "eq26",
            ThresholdKind::Base3Thm8 => "base3_thm8",
            ThresholdKind::EpsRefined { .. } => "eps_refined",
        }
    }

    pub fn parse(s: &str, eps: Option<f64>) -> Result<Self> {
        Ok(match s {
            "eq25" => ThresholdKind::Eq25,
            "simplified_5power" | "5power" => ThresholdKind::Simplified5Power,
            "eq26" => ThresholdKind::Eq26,
            "base3_thm8" => ThresholdKind::Base3Thm8,
            "eps_refined" => ThresholdKind::EpsRefined {
                eps: eps.ok_or_else(|| Error::Domain("eps_refined needs an epsilon".into()))?,
            },
            other => return Err(Error::Domain(format!("unknown threshold kind {other:?}"))),
        })
    }
}

/// Outcome of one test. Key order of the JSON form is fixed.
#[derive(Clone, Debug, Serialize)]
pub struct IrrationalityCertificate {
    pub base: u64,
    pub n: u32,
    pub m: u32,
    pub d_bitlen: u32,
    pub frac: String,
    pub threshold: String,
    pub kind: String,
    pub passed: bool,
    /// The product none of whose divisors can be γ's denominator; set on pass.
    pub excluded: Option<String>,
    pub denominator_lower_bound: Option<u64>,
    pub work_bits: u32,
    #[serde(skip)]
    pub frac_value: HpReal,
    #[serde(skip)]
    pub threshold_value: HpReal,
}

fn rational_pow(num: u64, den: u64, e: u32) -> Rational {
    Rational::from((pow(num, e), pow(den, e)))
}

/// `ρ(r)^m = (r^r/(r+1)^{r+1})^m`, exactly when `r` is an integer.
fn rho_pow(r: &Rational, m: u32) -> Result<HpReal> {
    if *r.denom() == 1 {
        let ri = r.numer().to_u64().ok_or_else(|| Error::Range("r too large".into()))?;
        let ru = u32::try_from(ri).map_err(|_| Error::Range("r too large".into()))?;
        let xm = Rational::from((pow(ri, ru * m), pow(ri + 1, (ru + 1) * m)));
        return Ok(HpReal::from_rational(THRESHOLD_PREC, &xm));
    }
    let p = THRESHOLD_PREC;
    let rr = HpReal::from_rational(p, r);
    let r1 = HpReal::from_rational(p, &Rational::from(r + 1u32));
    let l = &rr.mul(&rr.ln()?) - &r1.mul(&r1.ln()?);
    Ok(l.mul_integer(&Integer::from(m)).exp())
}

/// The threshold for `kind` at `(base, n, m)`.
pub fn threshold(kind: ThresholdKind, n: u32, m: u32) -> Result<HpReal> {
    let p = THRESHOLD_PREC;
    let half = || 1u32.checked_shl(n.saturating_sub(1)).filter(|_| n >= 1 && n < 32);
    let e = |x: Option<u32>| x.ok_or_else(|| Error::Range(format!("n = {n} out of range")));
    match kind {
        ThresholdKind::Eq25 => {
            let h = e(half())?;
            let r = rational_pow(128, 729, h) * 6u32;
            Ok(HpReal::from_rational(p, &r))
        }
        ThresholdKind::Simplified5Power => {
            let h = e(half())?;
            Ok(HpReal::from_rational(p, &Rational::from((1, pow(5, h)))))
        }
        ThresholdKind::Eq26 => {
            let h = e(half())?;
            let r = Rational::from((Integer::from(2u32) << n, Integer::from(m)));
            let lead = HpReal::from_integer(p, &(pow(8, h) * 6u32));
            Ok(lead.mul(&rho_pow(&r, m)?))
        }
        ThresholdKind::EpsRefined { eps } => {
            if !(eps > 0.0) {
                return Err(Error::Domain("eps must be positive".into()));
            }
            let r = Rational::from((Integer::from(2u32) << n, Integer::from(m)));
            let x = HpReal::from_f64(p, (1.0 + eps) * f64::from(1u32 << n.min(31)));
            Ok(x.exp().mul(&rho_pow(&r, m)?))
        }
        ThresholdKind::Base3Thm8 => {
            let e3 = 3u32.checked_pow(n + 1).ok_or_else(|| Error::Range(format!("n = {n} out of range")))?;
            let r = rational_pow(3, 4, e3) * 3u32;
            Ok(HpReal::from_rational(p, &r))
        }
    }
}

/// `v_p(x)` for `x ≠ 0`.
fn valuation(x: u64, p: u64) -> u32 {
    let mut k = 0;
    let mut x = x;
    while x % p == 0 {
        x /= p;
        k += 1;
    }
    k
}

/// The smallest integer above `top` that does not divide `p^{extra} · d_top`,
/// decided from the prime-power factorization of `d_top`.
pub fn denominator_lower_bound(d: &LcmTable, p: u64, extra: u32) -> u64 {
    let divides = |mut x: u64| -> bool {
        for &(pr, e) in &d.prime_powers {
            if pr * pr > x {
                break;
            }
            let v = valuation(x, pr);
            let allowed = e + if pr == p { extra } else { 0 };
            if v > allowed {
                return false;
            }
            for _ in 0..v {
                x /= pr;
            }
        }
        // Whatever remains is 1 or a prime.
        x == 1 || (x <= d.n) || (x == p && extra > 0)
    };
    let mut candidate = d.n + 1;
    while divides(candidate) {
        candidate += 1;
    }
    candidate
}

fn frac_of(form: &LForm, d: &Integer) -> Result<(HpReal, u32)> {
    let scaled = form.scaled(d);
    let base = 33 + (f64::from(FRAC_DIGITS + 2) * std::f64::consts::LOG2_10).ceil() as u32;
    with_retry(&PrecisionPlan::for_bits(base), |plan| {
        let v = scaled.evaluate(plan.work_bits)?;
        let f = fractional_part(&v)?;
        f.to_fixed(FRAC_DIGITS)?;
        Ok((f, plan.work_bits))
    })
}

fn certify(
    base: u64,
    n: u32,
    m: u32,
    kind: ThresholdKind,
    form: &LForm,
    d: &LcmTable,
) -> Result<IrrationalityCertificate> {
    let (f, abs) = frac_of(form, &d.value)?;
    let t = threshold(kind, n, m)?;
    let passed = if t.certainly_lt(&f) {
        true
    } else if f.certainly_lt(&t) {
        false
    } else {
        return Err(Error::UncertainDigits { digits: FRAC_DIGITS });
    };
    let top = d.n;
    let (excluded, bound) = if passed {
        (
            Some(format!("{base}^{top}*d_{top}")),
            Some(denominator_lower_bound(d, base, u32::try_from(top).unwrap_or(u32::MAX))),
        )
    } else {
        (None, None)
    };
    Ok(IrrationalityCertificate {
        base,
        n,
        m,
        d_bitlen: d.value.significant_bits(),
        frac: f.to_fixed(FRAC_DIGITS)?,
        threshold: t.to_sci(10),
        kind: kind.name().to_string(),
        passed,
        excluded,
        denominator_lower_bound: bound,
        work_bits: d.value.significant_bits() + abs,
        frac_value: f,
        threshold_value: t,
    })
}

fn check_window(n: u32, m: u32) -> Result<()> {
    if !(1..=24).contains(&n) {
        return Err(Error::Range(format!("n = {n} outside 1..=24")));
    }
    let lo = 1u64 << (n - 1);
    let hi = 1u64 << (n + 1);
    if u64::from(m) < lo || u64::from(m) > hi {
        return Err(Error::Range(format!("need 2^(n-1) <= m <= 2^(n+1) (n={n}, m={m})")));
    }
    Ok(())
}

/// The base-2 test on `{d_{2^n} L_{n,m}}`.
pub fn test_base2(n: u32, m: u32, kind: ThresholdKind) -> Result<IrrationalityCertificate> {
    check_window(n, m)?;
    match kind {
        ThresholdKind::Eq25 | ThresholdKind::Simplified5Power if m != 1 << n => {
            return Err(Error::Range(format!("{} needs m = 2^n", kind.name())));
        }
        ThresholdKind::Simplified5Power if n < 2 => {
            return Err(Error::Range("simplified_5power needs n > 1".into()));
        }
        ThresholdKind::Base3Thm8 => return Err(Error::Domain("base3_thm8 is a base-3 kind".into())),
        _ => {}
    }
    let d = lcm_upto(1 << n);
    certify(2, n, m, kind, &l_form_base2(n, m), &d)
}

fn base3_k(n: u32) -> Result<u32> {
    if !(2..=9).contains(&n) {
        return Err(Error::Range(format!("base-3 test needs 2 <= n <= 9 (n = {n})")));
    }
    Ok((3u32.pow(n) - 3) / 6)
}

/// The base-3 test on `{d_{3^n} L_{n,3^n−3,3}}`.
pub fn test_base3(n: u32) -> Result<IrrationalityCertificate> {
    let k = base3_k(n)?;
    let d = lcm_upto(3u64.pow(n));
    certify(3, n, 6 * k, ThresholdKind::Base3Thm8, &l_form_base3(n, k), &d)
}

/// Both sides of the rationality criterion at one `(n, m)`.
#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub base: u64,
    pub n: u32,
    pub m: u32,
    /// `{d·L}`.
    pub frac_dl: String,
    /// `d·I`.
    pub d_i: String,
    /// `0 < d·I < 1`, certified.
    pub d_i_in_unit_interval: bool,
    /// `{d·L} ≠ d·I`, certified.
    pub unequal: bool,
}

fn criterion(base: u64, n: u32, m: u32, form: &LForm, d: &Integer, di: HpReal) -> Result<CriterionReport> {
    let (f, _) = frac_of(form, d)?;
    let one = HpReal::from_i64(di.prec(), 1);
    Ok(CriterionReport {
        base,
        n,
        m,
        frac_dl: f.to_fixed(FRAC_DIGITS)?,
        d_i: di.to_sci(12),
        d_i_in_unit_interval: di.is_certainly_positive() && di.certainly_lt(&one),
        unequal: !f.overlaps(&di),
    })
}

/// Base 2: `{d_{2^n} L_{n,m}}` against `d_{2^n} I_{n,m}` inside the window
/// `2^{n−1} ≤ m ≤ 2^{n+1}`.
pub fn rationality_criterion_check(n: u32, m: u32) -> Result<CriterionReport> {
    check_window(n, m)?;
    let d = lcm_upto(1 << n).value;
    // I > ρ(r)^{m+1}/(2r(m+1)) with r = 2^{n+1}/m; size the precision from it.
    let r = f64::from(2u32 << n) / f64::from(m);
    let log2_rho = (r * r.ln() - (r + 1.0) * (r + 1.0).ln()) / std::f64::consts::LN_2;
    let tiny = (-(f64::from(m) + 1.0) * log2_rho + (2.0 * r * (f64::from(m) + 1.0)).log2()).ceil() as u32;
    let plan = PrecisionPlan::for_bits(d.significant_bits() + tiny + 64);
    let di = i_base2_oracle(n, m, &plan)?.mul_integer(&d);
    criterion(2, n, m, &l_form_base2(n, m), &d, di)
}

/// Base 3: `{d_{3^n} L_{n,3^n−3,3}}` against `d_{3^n} I_{n,3^n−3,3}`.
pub fn rationality_criterion_check_base3(n: u32) -> Result<CriterionReport> {
    let k = base3_k(n)?;
    let d = lcm_upto(3u64.pow(n)).value;
    // I > (27/256)^m/(40m + 90).
    let m = f64::from(6 * k);
    let tiny = (m * (256f64 / 27.0).log2() + (40.0 * m + 90.0).log2()).ceil() as u32;
    let plan = PrecisionPlan::for_bits(d.significant_bits() + tiny + 64);
    let di = i_base3_oracle(n, 6 * k, &plan)?.mul_integer(&d);
    criterion(3, n, 6 * k, &l_form_base3(n, k), &d, di)
}

/// `{d I − d 2^m γ_ref + d A}`: the fractional part of `d L` rebuilt from the
/// residual oracle, the reference γ and the exact `A` (base 2, `2^n ≤ 256`).
pub fn reassembled_frac(n: u32, m: u32) -> Result<HpReal> {
    check_window(n, m)?;
    let d = lcm_upto(1 << n).value;
    let abs = d.significant_bits() + m + 64;
    let plan = PrecisionPlan::for_bits(abs);
    let parts = parts_base2(n, m, &PrecisionPlan::for_bits(8))?;
    let a = parts
        .a_part
        .exact()
        .ok_or_else(|| Error::Range("reassembly needs an exact A (2^n <= 256)".into()))?
        .clone();
    let i = i_base2_oracle(n, m, &plan)?;
    let g = reference_gamma(abs + m)?;
    let prec = abs + m + 64;
    let da = HpReal::from_rational(prec, &Rational::from(&a * &d));
    let dcg = g.with_prec(prec).mul_integer(&Integer::from(pow(2, m) * &d));
    let x = &(&i.with_prec(prec).mul_integer(&d) - &dcg) + &da;
    fractional_part(&x)
}
