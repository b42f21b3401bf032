//! Mechanical checks of the analytic bounds: the beta-integral bounds, the
//! residual sandwiches, `ρ(r)`, the constant `r₀`, the maximizer `x_q` of
//! `f_q`, and the empirical decay rates of the residuals.

use rug::{Integer, Rational};
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::linforms::{i_base2_oracle, i_base3_oracle, i_baseq_oracle, i_baseq_oracle_blocked, i_sigma_oracle};
use crate::numerics::{HpReal, PrecisionPlan};
use crate::numtheory::{binomial, pow};
use crate::qpoly::f_poly;
use crate::series::BASEQ_ACCEL_MAX_Q;

const PREC: u32 = 192;

/// One check: `lower < value < upper` (either bound may be absent).
#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub check: String,
    pub params: serde_json::Value,
    pub lower: Option<String>,
    pub value: String,
    pub upper: Option<String>,
    pub passed: bool,
}

impl CheckRecord {
    fn between(
        check: &str,
        params: serde_json::Value,
        lower: Option<&HpReal>,
        value: &HpReal,
        upper: Option<&HpReal>,
    ) -> Self {
        let ok_lo = lower.is_none_or(|l| l.certainly_lt(value));
        let ok_hi = upper.is_none_or(|u| value.certainly_lt(u));
        CheckRecord {
            check: check.to_string(),
            params,
            lower: lower.map(|l| l.to_sci(12)),
            value: value.to_sci(12),
            upper: upper.map(|u| u.to_sci(12)),
            passed: ok_lo && ok_hi,
        }
    }
}

fn hp(r: &Rational) -> HpReal {
    HpReal::from_rational(PREC, r)
}

/// `ρ(r) = r^r/(r+1)^{r+1}`; exact for integer `r`.
pub fn rho(r: &Rational, prec: u32) -> Result<HpReal> {
    rho_pow(r, 1, prec)
}

/// `ρ(r)^m`; exact for integer `r`.
pub fn rho_pow(r: &Rational, m: u32, prec: u32) -> Result<HpReal> {
    if *r <= 0 {
        return Err(Error::Domain("rho needs r > 0".into()));
    }
    if *r.denom() == 1 {
        let ri = r.numer().to_u32().ok_or_else(|| Error::Range("r too large".into()))?;
        let x = Rational::from((pow(u64::from(ri), ri * m), pow(u64::from(ri) + 1, (ri + 1) * m)));
        return Ok(HpReal::from_rational(prec, &x));
    }
    let rr = HpReal::from_rational(prec, r);
    let r1 = HpReal::from_rational(prec, &Rational::from(r + 1u32));
    let l = &rr.mul(&rr.ln()?) - &r1.mul(&r1.ln()?);
    Ok(l.mul_integer(&Integer::from(m)).exp())
}

/// `log ρ(r)^{2/r} + 1 = (2/r)(r log r − (r+1) log(r+1)) + 1`.
fn r0_excess(r: &HpReal) -> Result<HpReal> {
    let one = HpReal::from_i64(r.prec(), 1);
    let r1 = r + &one;
    let l = &r.mul(&r.ln()?) - &r1.mul(&r1.ln()?);
    Ok(&l.mul_i64(2).div(r)? + &one)
}

/// The root `r₀` of `ρ(r)^{2/r} = 1/e` in `[4, 8]`, by bisection to
/// `2^{−bits/2}`.
pub fn solve_r0(bits: u32) -> Result<HpReal> {
    let prec = bits + 32;
    let mut lo = rug::Float::with_val(prec, 4);
    let mut hi = rug::Float::with_val(prec, 8);
    let at = |x: &rug::Float| r0_excess(&HpReal::exact(x.clone()));
    if !(at(&lo)?.is_certainly_negative() && at(&hi)?.is_certainly_positive()) {
        return Err(Error::Domain("no sign change on [4, 8]".into()));
    }
    let tol = crate::numerics::pow2(-i64::from(bits / 2));
    while rug::Float::with_val(prec, &hi - &lo) > tol {
        let mid = rug::Float::with_val(prec, &lo + &hi) / 2u32;
        let v = at(&mid)?;
        if v.is_certainly_negative() {
            lo = mid;
        } else if v.is_certainly_positive() {
            hi = mid;
        } else {
            lo = rug::Float::with_val(prec, &mid - &tol);
            hi = rug::Float::with_val(prec, &mid + &tol);
            break;
        }
    }
    let center = rug::Float::with_val(prec, &lo + &hi) / 2u32;
    let half = crate::numerics::up(&rug::Float::with_val(prec, &hi - &lo) / 2u32);
    Ok(HpReal::new(center, half))
}

/// `x_q` and `f_q(x_q) = max_{[0,1]} (q − F_q(x)) x^{q(q−1)}`.
#[derive(Clone, Debug, Serialize)]
pub struct Maximizer {
    pub q: u64,
    pub x_q: HpReal,
    pub f_q: HpReal,
}

/// `f_q'(x)/x^{q(q−1)−1} = q(q−1)² − Σ_{ν=1}^{q−1} (q(q−1)+ν) x^ν`.
fn deriv_factor(q: u64, x: &Rational) -> Rational {
    let mut s = Rational::from(q * (q - 1) * (q - 1));
    let mut xp = Rational::from(1);
    for nu in 1..q {
        xp *= x;
        s -= Rational::from(&xp * (q * (q - 1) + nu));
    }
    s
}

fn f_q(q: u64, x: &Rational) -> Rational {
    let fx = f_poly(q).eval(x);
    let e = u32::try_from(q * (q - 1)).expect("q too large");
    let xp = Rational::from((Integer::from(int_pow(x.numer(), e)), Integer::from(int_pow(x.denom(), e))));
    (Rational::from(q) - fx) * xp
}

fn int_pow(b: &Integer, e: u32) -> Integer {
    use rug::ops::Pow;
    Integer::from(b.pow(e))
}

/// Bisection for `x_q` on exact dyadic rationals to `2^{−bits/2}`, plus an
/// enclosure of `f_q(x_q)`.
pub fn x_q_maximizer(q: u64, bits: u32) -> Result<Maximizer> {
    if !(2..=64).contains(&q) {
        return Err(Error::Domain(format!("q = {q} outside 2..=64")));
    }
    let mut lo = Rational::from(0);
    let mut hi = Rational::from(1);
    if !(deriv_factor(q, &lo) > 0 && deriv_factor(q, &hi) < 0) {
        return Err(Error::Domain("no sign change on (0, 1)".into()));
    }
    for _ in 0..bits / 2 {
        let mid = Rational::from(&lo + &hi) / 2u32;
        if deriv_factor(q, &mid) > 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let prec = bits + 32;
    let width = Rational::from(&hi - &lo);
    let x = HpReal::from_rational(prec, &(Rational::from(&lo + &hi) / 2u32))
        .widen(&HpReal::from_rational(64, &(width.clone() / 2u32)).upper());
    // f_q(x_q) ≥ max(f(lo), f(hi)) and exceeds it by at most max|f'|·width,
    // with |f'| ≤ Σ |coefficients|·degree ≤ q · q(q+1).
    let (fl, fh) = (f_q(q, &lo), f_q(q, &hi));
    let base = if fl > fh { fl } else { fh };
    let slope = Rational::from(q * q * (q + 1));
    let top = Rational::from(&base + &(slope * &width));
    let mid = Rational::from(&base + &top) / 2u32;
    let half = Rational::from(&top - &base) / 2u32;
    let f = HpReal::from_rational(prec, &mid).widen(&HpReal::from_rational(64, &half).upper());
    Ok(Maximizer { q, x_q: x, f_q: f })
}

/// Checks `1/((q+1)e) < f_q(x_q) < 1/(2e)`.
pub fn check_fq_bounds(q: u64) -> Result<CheckRecord> {
    let mx = x_q_maximizer(q, 128)?;
    let e = HpReal::euler_e(PREC);
    let lower = HpReal::from_i64(PREC, 1).div(&e.mul_i64(q as i64 + 1))?;
    let upper = HpReal::from_i64(PREC, 1).div(&e.mul_i64(2))?;
    Ok(CheckRecord::between("fq_bounds", json!({"q": q}), Some(&lower), &mx.f_q, Some(&upper)))
}

/// Beta-integral sandwich bounds at `(m, r)`.
#[derive(Clone, Debug, Serialize)]
pub struct BetaReport {
    pub m: u32,
    pub r: String,
    pub integral: String,
    pub lower: String,
    pub integral_exceeds_lower: bool,
    pub pointwise_bound: String,
    pub pointwise_max_on_grid: String,
    pub pointwise_holds: bool,
}

/// `∫_0^1 x^{rm−1}(1−x)^m dx = (1/(rm)) Π_{j=1}^m (1 + rm/j)^{−1}` exactly,
/// compared with `(1/(rm)) ρ(r)^m`; the pointwise bound
/// `x^{rm−1}(1−x)^m < 4ρ(r)^m` is sampled on `x = i/1001`. Requires `rm`
/// to be an integer.
pub fn check_beta_bounds(m: u32, r: &Rational) -> Result<BetaReport> {
    if m == 0 || *r < 1 {
        return Err(Error::Domain("need m >= 1 and r >= 1".into()));
    }
    let rm = Rational::from(r * m);
    if *rm.denom() != 1 {
        return Err(Error::Domain("r*m must be an integer".into()));
    }
    let rmi = rm.numer().to_u32().ok_or_else(|| Error::Range("r*m too large".into()))?;
    let mut integral = Rational::from((1, rmi));
    for j in 1..=m {
        integral *= Rational::from((j, j + rmi));
    }
    let rho_m = rho_pow(r, m, PREC)?;
    let lower = rho_m.div_u64(u64::from(rmi));
    let ih = hp(&integral);
    let bound = rho_m.mul_i64(4);
    let mut best = Rational::new();
    for i in 1..=1000u32 {
        let x = Rational::from((i, 1001));
        let one_minus = Rational::from(1) - &x;
        let v = Rational::from((
            Integer::from(int_pow(x.numer(), rmi - 1) * int_pow(one_minus.numer(), m)),
            Integer::from(int_pow(x.denom(), rmi - 1) * int_pow(one_minus.denom(), m)),
        ));
        if v > best {
            best = v;
        }
    }
    let bh = hp(&best);
    Ok(BetaReport {
        m,
        r: r.to_string(),
        integral: ih.to_sci(12),
        lower: lower.to_sci(12),
        integral_exceeds_lower: lower.certainly_lt(&ih),
        pointwise_bound: bound.to_sci(12),
        pointwise_max_on_grid: bh.to_sci(12),
        pointwise_holds: bh.certainly_lt(&bound),
    })
}

/// `1/(m C(2m, m))`, the `r = 1` integral in closed form.
pub fn beta_r1_closed_form(m: u32) -> Rational {
    Rational::from((1, binomial(2 * u64::from(m), u64::from(m)) * m))
}

/// Which residual sandwich to check.
#[derive(Clone, Debug, PartialEq)]
pub enum Sandwich {
    /// `m = ⌊2^{n+1}/r⌋`, `1 ≤ r ≤ 2^{n+1}`.
    Base2 { n: u32, r: Rational },
    /// `m = 3^n − 3`.
    Base3 { n: u32 },
    /// `m = (q^n − 1)/(q − 1)`.
    BaseQ { q: u64, n: u32 },
}

fn oracle_bits(lower_log2: f64) -> u32 {
    (-lower_log2).max(0.0).ceil() as u32 + 64
}

/// Computes the residual from its oracle and checks the sandwich.
pub fn check_sandwich(s: &Sandwich) -> Result<CheckRecord> {
    match s {
        Sandwich::Base2 { n, r } => {
            let top = Rational::from(Integer::from(2u32) << *n);
            if *r < 1 || *r > top {
                return Err(Error::Range(format!("need 1 <= r <= 2^(n+1) (n={n}, r={r})")));
            }
            let m = Rational::from(&top / r).floor().numer().to_u32().expect("small m");
            let upper = rho_pow(r, m, PREC)?.mul_i64(6);
            let denom = Rational::from(r * 2u32) * (m + 1);
            let lower = rho_pow(r, m + 1, PREC)?.mul_rational(&Rational::from(denom.recip_ref()));
            let bits = oracle_bits(lower.to_f64().log2().max(-1e9));
            let i = i_base2_oracle(*n, m, &PrecisionPlan::for_bits(bits))?;
            Ok(CheckRecord::between(
                "sandwich_base2",
                json!({"n": n, "r": r.to_string(), "m": m}),
                Some(&lower),
                &i,
                Some(&upper),
            ))
        }
        Sandwich::Base3 { n } => {
            if *n == 0 || *n > 8 {
                return Err(Error::Range(format!("base-3 sandwich needs 1 <= n <= 8 (n = {n})")));
            }
            let m = 3u32.pow(*n) - 3;
            let ratio = Rational::from((27, 256));
            let rm = hp(&Rational::from((pow(27, m), pow(256, m))));
            let upper = rm.mul_i64(3);
            let lower = rm.div_u64(40 * u64::from(m) + 90);
            let bits = oracle_bits(f64::from(m) * ratio.to_f64().log2() - 12.0);
            let i = i_base3_oracle(*n, m, &PrecisionPlan::for_bits(bits))?;
            Ok(CheckRecord::between("sandwich_base3", json!({"n": n, "m": m}), Some(&lower), &i, Some(&upper)))
        }
        Sandwich::BaseQ { q, n } => {
            if !(2..=64).contains(q) || *n == 0 || (*q as f64).powi(*n as i32) > 1e6 {
                return Err(Error::Range(format!("base-q sandwich out of range (q={q}, n={n})")));
            }
            let m = u32::try_from((q.pow(*n) - 1) / (q - 1)).expect("small m");
            let e2 = HpReal::euler_e(PREC).mul_i64(2);
            let upper = HpReal::from_i64(PREC, *q as i64).div(&e2.pow_u(m))?;
            // I' > ((q−1)/2) ∫ f_q^m x^{q−1} ≥ tiny; size the precision from f_q ≥ 1/((q+1)e).
            let lower_log2 = -f64::from(m) * (((*q + 1) as f64) * std::f64::consts::E).log2() - 16.0;
            let plan = PrecisionPlan::for_bits(oracle_bits(lower_log2));
            let i = if *q <= BASEQ_ACCEL_MAX_Q {
                i_baseq_oracle(*q, *n, m, &plan)?
            } else {
                i_baseq_oracle_blocked(*q, *n, m, &plan, *q)?
            };
            let zero = HpReal::zero(PREC);
            Ok(CheckRecord::between(
                "sandwich_baseq",
                json!({"q": q, "n": n, "m": m}),
                Some(&zero),
                &i,
                Some(&upper),
            ))
        }
    }
}

/// Decay-rate families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RateFamily {
    /// `log I_{n,⌊2^{n+1}/r⌋} / m → r log r − (r+1) log(r+1)`.
    Base2,
    /// `log I_{n,q^n,q} / q^n → q log q − (q+1) log(q+1)`.
    Base2General,
    /// `log I_{n,3^n−3,3} / 3^n → 3 log 3 − 4 log 4`.
    Base3,
    /// `log I'_{n,m,q} / m → log f_q(x_q)`, `m = (q^n−1)/(q−1)`.
    Baseq,
}

#[derive(Clone, Debug, Serialize)]
pub struct RateReport {
    pub family: RateFamily,
    /// `r` for `base2`, `q` for the base-q families.
    pub param: u64,
    pub n_grid: Vec<u32>,
    pub empirical: Vec<f64>,
    pub theoretical: f64,
    pub converging: bool,
    /// `log I'/q^n` at each grid point (`baseq` only).
    pub per_q_pow_n: Option<Vec<f64>>,
    /// The limit of `log I'/q^n`, i.e. `log f_q(x_q)/(q−1)` (`baseq` only).
    pub limit_per_q_pow_n: Option<f64>,
    /// Whether that limit exceeds −1 (`baseq`, `q ≥ 3`); finite `n` may not.
    pub limit_above_minus_one: Option<bool>,
}

fn xlogx_rate(r: f64) -> f64 {
    r * r.ln() - (r + 1.0) * (r + 1.0).ln()
}

fn log_of(i: &HpReal) -> Result<f64> {
    if !i.is_certainly_positive() {
        return Err(Error::UncertainDigits { digits: 0 });
    }
    Ok(i.ln()?.to_f64())
}

/// Empirical `log I / normalizer` along `n_grid`. `param` is `r` for
/// [`RateFamily::Base2`] and `q` otherwise (ignored for `Base3`).
pub fn empirical_rate(family: RateFamily, n_grid: &[u32], param: u64) -> Result<RateReport> {
    if n_grid.is_empty() {
        return Err(Error::Domain("empty n grid".into()));
    }
    let mut empirical = Vec::new();
    let mut above = Vec::new();
    let theoretical = match family {
        RateFamily::Base2 => xlogx_rate(param as f64),
        RateFamily::Base2General => xlogx_rate(param as f64),
        RateFamily::Base3 => xlogx_rate(3.0),
        RateFamily::Baseq => x_q_maximizer(param, 128)?.f_q.ln()?.to_f64(),
    };
    for &n in n_grid {
        let (norm, i) = match family {
            RateFamily::Base2 => {
                let r = param.max(1);
                let m = u32::try_from((2u64 << n) / r).map_err(|_| Error::Range("m too large".into()))?;
                let bits = (f64::from(m) * -theoretical / std::f64::consts::LN_2) as u32 + 96;
                let i = i_base2_oracle(n, m, &PrecisionPlan::for_bits(bits))?;
                (f64::from(m), i)
            }
            RateFamily::Base2General => {
                let m = u32::try_from(param.pow(n)).map_err(|_| Error::Range("m too large".into()))?;
                let bits = (f64::from(m) * -theoretical / std::f64::consts::LN_2) as u32 + 96;
                let i = i_sigma_oracle(param, n, m, &PrecisionPlan::for_bits(bits))?;
                (f64::from(m), i)
            }
            RateFamily::Base3 => {
                let m = 3u32.pow(n) - 3;
                let bits = (f64::from(m) * -theoretical / std::f64::consts::LN_2) as u32 + 96;
                let i = i_base3_oracle(n, m, &PrecisionPlan::for_bits(bits))?;
                (f64::from(3u32.pow(n)), i)
            }
            RateFamily::Baseq => {
                let m = u32::try_from((param.pow(n) - 1) / (param - 1)).map_err(|_| Error::Range("m too large".into()))?;
                let bits = (f64::from(m) * ((param + 1) as f64 * std::f64::consts::E).log2()) as u32 + 96;
                let plan = PrecisionPlan::for_bits(bits);
                let i = if param <= BASEQ_ACCEL_MAX_Q {
                    i_baseq_oracle(param, n, m, &plan)?
                } else {
                    i_baseq_oracle_blocked(param, n, m, &plan, param)?
                };
                (f64::from(m), i)
            }
        };
        let l = log_of(&i)?;
        empirical.push(l / norm);
        if family == RateFamily::Baseq {
            above.push(l / (param.pow(n) as f64));
        }
    }
    let is_q = family == RateFamily::Baseq;
    let limit = is_q.then(|| theoretical / (param - 1) as f64);
    let first = (empirical[0] - theoretical).abs();
    let last = (empirical[empirical.len() - 1] - theoretical).abs();
    Ok(RateReport {
        family,
        param,
        n_grid: n_grid.to_vec(),
        empirical,
        theoretical,
        converging: last < first,
        per_q_pow_n: is_q.then_some(above),
        limit_per_q_pow_n: limit,
        limit_above_minus_one: limit.filter(|_| param >= 3).map(|l| l > -1.0),
    })
}

/// The standard bounds suite: beta bounds, sandwiches, `r₀`, `x_q`, `f_q`.
pub fn run_suite() -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for m in 1..=20u32 {
        for r in [1u32, 2, 4] {
            let b = check_beta_bounds(m, &Rational::from(r))?;
            out.push(CheckRecord {
                check: "beta_bounds".into(),
                params: json!({"m": m, "r": r}),
                lower: Some(b.lower.clone()),
                value: b.integral.clone(),
                upper: Some(b.pointwise_bound.clone()),
                passed: b.integral_exceeds_lower && b.pointwise_holds,
            });
        }
    }
    for n in 2..=6u32 {
        for r in [1u32, 2, 4] {
            out.push(check_sandwich(&Sandwich::Base2 { n, r: Rational::from(r) })?);
        }
    }
    for n in 1..=3 {
        out.push(check_sandwich(&Sandwich::Base3 { n })?);
    }
    for q in 2..=5u64 {
        for n in 1..=3 {
            out.push(check_sandwich(&Sandwich::BaseQ { q, n })?);
        }
    }
    let r0 = solve_r0(128)?;
    out.push(CheckRecord {
        check: "r0".into(),
        params: json!({}),
        lower: None,
        value: r0.to_fixed(10).unwrap_or_else(|_| r0.to_sci(14)),
        upper: None,
        passed: r0.to_fixed(10).map(|s| s == "5.6213305349").unwrap_or(false),
    });
    let x3 = x_q_maximizer(3, 128)?;
    out.push(CheckRecord {
        check: "x3".into(),
        params: json!({"q": 3}),
        lower: None,
        value: x3.x_q.to_fixed(8)?,
        upper: None,
        passed: x3.x_q.to_fixed(8)? == "0.86304075",
    });
    let half_log = x3.f_q.ln()?.div_u64(2);
    out.push(CheckRecord {
        check: "half_log_f3".into(),
        params: json!({"q": 3}),
        lower: None,
        value: half_log.to_fixed(8)?,
        upper: None,
        passed: half_log.to_fixed(8)? == "-0.90997390",
    });
    for q in 2..=20 {
        out.push(check_fq_bounds(q)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho_values() {
        let a = rho(&Rational::from(1), PREC).unwrap();
        assert!(a.overlaps(&hp(&Rational::from((1, 4)))));
        let b = rho(&Rational::from(4), PREC).unwrap();
        assert!(b.overlaps(&hp(&Rational::from((256, 3125)))));
        // Non-integer r goes through exp/log and must agree with the exact path.
        let c = rho_pow(&Rational::from((5, 2)), 3, PREC).unwrap();
        let exact = Rational::from((5, 2)).to_f64().powf(2.5) / 3.5f64.powf(3.5);
        assert!((c.to_f64() - exact.powi(3)).abs() < 1e-15);
    }

    #[test]
    fn rho_power_increasing_and_below_inv_e() {
        let inv_e = HpReal::from_i64(PREC, 1).div(&HpReal::euler_e(PREC)).unwrap();
        let mut prev: Option<HpReal> = None;
        for i in 1..=80u32 {
            let r = Rational::from((i, 10));
            let v = rho(&r, PREC).unwrap().ln().unwrap().mul_rational(&Rational::from((20, i))).exp();
            if let Some(p) = &prev {
                assert!(p.certainly_lt(&v), "r = {r}");
            }
            if i <= 56 {
                assert!(v.certainly_lt(&inv_e), "r = {r}");
            }
            prev = Some(v);
        }
    }

    #[test]
    fn r0_value_and_residual() {
        let r0 = solve_r0(128).unwrap();
        assert_eq!(r0.to_fixed(10).unwrap(), "5.6213305349");
        let x = r0_excess(&HpReal::exact(r0.value().clone())).unwrap();
        // |ρ^{2/r} − 1/e| = (1/e)|e^x − 1| ≤ |x| for small x.
        assert!(x.abs_upper() < 1e-20);
    }

    #[test]
    fn maximizers() {
        let m2 = x_q_maximizer(2, 128).unwrap();
        assert!(m2.x_q.overlaps(&hp(&Rational::from((2, 3)))));
        assert!(m2.f_q.overlaps(&hp(&Rational::from((4, 27)))));
        let m3 = x_q_maximizer(3, 128).unwrap();
        assert_eq!(m3.x_q.to_fixed(8).unwrap(), "0.86304075");
        assert_eq!(m3.f_q.ln().unwrap().div_u64(2).to_fixed(8).unwrap(), "-0.90997390");
        let two_e = HpReal::from_i64(PREC, 1).div(&HpReal::euler_e(PREC).mul_i64(2)).unwrap();
        let m20 = x_q_maximizer(20, 128).unwrap();
        let d3 = (&two_e - &m3.f_q).abs();
        let d20 = (&two_e - &m20.f_q).abs();
        assert!(d20.certainly_lt(&d3));
    }

    #[test]
    fn fq_bounds_hold() {
        for q in 2..=20 {
            assert!(check_fq_bounds(q).unwrap().passed, "q = {q}");
        }
    }

    #[test]
    fn beta_bounds_grid() {
        for m in 1..=20u32 {
            for r in [1u32, 2, 4] {
                let b = check_beta_bounds(m, &Rational::from(r)).unwrap();
                assert!(b.integral_exceeds_lower && b.pointwise_holds, "m={m} r={r}");
            }
            let mut integral = Rational::from((1, m));
            for j in 1..=m {
                integral *= Rational::from((j, j + m));
            }
            assert_eq!(integral, beta_r1_closed_form(m));
        }
        let b = check_beta_bounds(1, &Rational::from(1)).unwrap();
        assert!(b.integral.starts_with("5.0000"));
    }

    #[test]
    fn sandwiches() {
        assert!(check_sandwich(&Sandwich::Base2 { n: 4, r: Rational::from(2) }).unwrap().passed);
        assert!(check_sandwich(&Sandwich::Base2 { n: 3, r: Rational::from((5, 2)) }).unwrap().passed);
        assert!(check_sandwich(&Sandwich::Base3 { n: 2 }).unwrap().passed);
        assert!(check_sandwich(&Sandwich::BaseQ { q: 3, n: 2 }).unwrap().passed);
        assert!(check_sandwich(&Sandwich::BaseQ { q: 7, n: 2 }).unwrap().passed);
    }

    #[test]
    fn rates() {
        let b2 = empirical_rate(RateFamily::Base2, &[3, 4, 5, 6], 1).unwrap();
        assert!(b2.converging, "{b2:?}");
        assert!((b2.theoretical - (0.25f64).ln()).abs() < 1e-12);
        let b3 = empirical_rate(RateFamily::Base3, &[2, 3], 3).unwrap();
        assert!(b3.converging && (b3.theoretical + 2.24934057).abs() < 1e-8, "{b3:?}");
        let g = empirical_rate(RateFamily::Base2General, &[1, 2, 3], 3).unwrap();
        assert!(g.converging, "{g:?}");
        for q in [3u64, 4] {
            let r = empirical_rate(RateFamily::Baseq, &[2, 3, 4], q).unwrap();
            assert!(r.converging && r.limit_above_minus_one.unwrap(), "q = {q}");
            let per = r.per_q_pow_n.unwrap();
            assert!(per.windows(2).all(|w| w[0] < w[1]), "q = {q}");
        }
    }

    #[test]
    fn suite_passes() {
        let v = run_suite().unwrap();
        let failed: Vec<_> = v.iter().filter(|r| !r.passed).collect();
        assert!(failed.is_empty(), "{failed:?}");
    }
}
