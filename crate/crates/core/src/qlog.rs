//! The q-logarithm `ln_q(1+z) = Σ_{ν≥1} (−1)^{ν−1} z^ν / (q^ν − 1)`.
//!
//! Three routes: the defining series, the accelerated formula
//! `ln_q(1+z) = z Σ_{ν=1}^{N} 1/(q^ν + z) + ln_q(1 + z/q^N)` (the remainder
//! is again a q-logarithm, of a tiny argument), and the tail identity
//! `Σ_{ν>n} 1/(q^ν + k) = (1/k) ln_q(1 + k/q^n)`.

use rug::float::Round;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::numerics::{mul_up, down, up, Accumulator, HpReal, PrecisionPlan};
use crate::numtheory::pow;

/// Input to the q-logarithm routines.
#[derive(Clone, Debug)]
pub struct QLogRequest {
    pub q: u64,
    pub z: Rational,
    pub plan: PrecisionPlan,
}

impl QLogRequest {
    pub fn new(q: u64, z: Rational, plan: PrecisionPlan) -> Result<Self> {
        if q < 2 {
            return Err(Error::Domain(format!("q-logarithm base must be >= 2, got {q}")));
        }
        if Rational::from(z.abs_ref()) >= q {
            return Err(Error::Domain(format!("|z| = |{z}| must be below q = {q}")));
        }
        Ok(QLogRequest { q, z, plan })
    }
}

/// Extra bits covering the size of the largest summand `|z|/(q − |z|)`.
fn magnitude_boost(q: u64, z: &Rational) -> u32 {
    let az = Rational::from(z.abs_ref());
    let gap = Rational::from(q) - &az;
    let ratio = (az / gap).to_f64();
    if ratio > 1.0 {
        ratio.log2().ceil() as u32 + 2
    } else {
        2
    }
}

/// `Σ_{ν≥1} (−1)^{ν−1} w^ν / (q^ν − 1)` for `|w| < q`, with `w` given to
/// relative accuracy one ulp. Truncated once the geometric tail drops below
/// `2^-target_bits`; the tail bound is included in the error.
fn defining_series(q: u64, w: &Float, target_bits: u32, prec: u32) -> HpReal {
    let mut acc = Accumulator::new(prec);
    if w.is_zero() {
        return acc.finish();
    }
    // r = |w|/q, rounded up so the tail estimate is an upper bound.
    let r = up(&up(w.abs_ref()) / q);
    assert!(r < 1, "defining series needs |w| < q");
    let lr = r.to_f64().log2();
    let geo = up(1u32 / &down(1u32 - &r));
    let qfac = up(&Float::with_val(64, q) / (q - 1));
    let head = (qfac.to_f64().log2() + geo.to_f64().log2()) as f64;
    let need = -(f64::from(target_bits)) - 1.0 - head;
    let n_terms = if lr < 0.0 {
        ((need / lr).ceil().max(1.0) as u64).max(1)
    } else {
        1
    };
    let neg_w = Float::with_val(prec, -w);
    let mut p = Float::with_val(prec, 1u32);
    let mut qpow = Integer::from(1);
    for nu in 1..=n_terms {
        p *= &neg_w;
        qpow *= q;
        let den = Integer::from(&qpow - 1u32);
        let term = Float::with_val(prec, &p / &den);
        acc.sub_rel(&term, 2 * nu as u32 + 2);
    }
    // Tail: Σ_{ν>N} |w|^ν/(q^ν−1) ≤ r^{N+1} · q/(q−1) / (1 − r).
    let rn = Float::with_val_round(64, r.pow_ref_u(n_terms + 1), Round::Up).0;
    let tail = mul_up(&mul_up(&rn, &qfac), &geo);
    acc.add_err(&tail);
    acc.finish()
}

trait RationalPow {
    fn pow_ref_i(&self, k: u32) -> Rational;
}

impl RationalPow for Rational {
    fn pow_ref_i(&self, k: u32) -> Rational {
        use rug::ops::Pow;
        Rational::from(self.pow(k))
    }
}

trait PowU {
    fn pow_ref_u(&self, k: u64) -> Float;
}

impl PowU for Float {
    fn pow_ref_u(&self, k: u64) -> Float {
        use rug::ops::Pow;
        let k = u32::try_from(k).expect("exponent too large");
        Float::with_val_round(self.prec(), self.pow(k), Round::Up).0
    }
}

fn rational_to_float(prec: u32, z: &Rational) -> Float {
    Float::with_val(prec, z)
}

/// `ln_q(1+z)` by its defining series.
pub fn qlog_series(req: &QLogRequest) -> HpReal {
    let prec = req.plan.prec() + magnitude_boost(req.q, &req.z);
    let w = rational_to_float(prec, &req.z);
    defining_series(req.q, &w, req.plan.work_bits, prec)
}

/// `ln_q(1+z)` by the accelerated formula: `N ≈ sqrt(P / log2 q)` direct
/// terms `z/(q^ν + z)` plus the remainder `ln_q(1 + z/q^N)`, summed by its
/// own (fast) series.
pub fn qlog_accel(req: &QLogRequest) -> HpReal {
    let q = req.q;
    let prec = req.plan.prec() + magnitude_boost(q, &req.z);
    if req.z == 0 {
        return HpReal::zero(prec);
    }
    let target = req.plan.work_bits;
    let lq = (q as f64).log2();
    let n_direct = ((f64::from(target) / lq).sqrt().ceil() as u32).max(1);
    let (a, b) = (req.z.numer(), req.z.denom());
    let a_prec = prec.max(a.significant_bits());
    let af = Float::with_val(a_prec, a);
    let mut acc = Accumulator::new(prec);
    let mut qpow = Integer::from(1);
    for _ in 1..=n_direct {
        qpow *= q;
        let den = Integer::from(b * &qpow) + a;
        let term = Float::with_val(prec, &af / &den);
        acc.add_rel(&term, 1);
    }
    let w = Float::with_val(prec, Rational::from((a.clone(), Integer::from(b * &qpow))));
    let rem = defining_series(q, &w, target + 1, prec);
    acc.add_hp(&rem);
    acc.finish()
}

/// `Σ_{ν>n} 1/(q^ν + k)`: the closed form `1/(q^n (q−1))` for `k = 0`, and
/// `(1/k) ln_q(1 + k/q^n)` otherwise. Requires `0 ≤ k < q^{n+1}`.
pub fn tail_sum(q: u64, n: u32, k: &Integer, plan: &PrecisionPlan) -> Result<HpReal> {
    if q < 2 {
        return Err(Error::Domain("base must be >= 2".into()));
    }
    if *k < 0 {
        return Err(Error::Domain(format!("k = {k} must be non-negative")));
    }
    let qn = pow(q, n);
    if *k >= Integer::from(&qn * q) {
        return Err(Error::Domain(format!("k = {k} must be below q^(n+1)")));
    }
    if *k == 0 {
        let r = Rational::from((Integer::from(1), qn * (q - 1)));
        return Ok(HpReal::from_rational(plan.prec(), &r));
    }
    // Scale the plan so the 1/k division keeps the absolute target.
    let req = QLogRequest::new(q, Rational::from((k.clone(), qn)), *plan)?;
    Ok(qlog_accel(&req).div_integer(k))
}

/// `ln_q(1+z)` for a rational base `q > 1`, by the defining series in exact
/// rational arithmetic. Used only to observe the `q → 1⁺` limit
/// `(q−1) ln_q(1+z) → log(1+z)`; requires `|z| < 1`.
pub fn qlog_series_rational_base(q: &Rational, z: &Rational, plan: &PrecisionPlan) -> Result<HpReal> {
    if *q <= 1 {
        return Err(Error::Domain("rational base must exceed 1".into()));
    }
    let az = Rational::from(z.abs_ref());
    if az >= 1 {
        return Err(Error::Domain("rational-base series requires |z| < 1".into()));
    }
    let prec = plan.prec();
    if *z == 0 {
        return Ok(HpReal::zero(prec));
    }
    let qm1 = Rational::from(q - 1u32);
    // Term bound |z|^ν / (ν (q−1)) since q^ν − 1 ≥ ν (q−1); tail after N:
    // |z|^{N+1} / ((N+1)(q−1)(1−|z|)).
    let lz = az.to_f64().log2();
    let extra = -(qm1.to_f64().log2()) - (1.0 - az.to_f64()).log2();
    let n_terms = (((-(f64::from(plan.work_bits)) - 1.0 - extra) / lz).ceil().max(1.0)) as u32;
    let mut acc = Accumulator::new(prec);
    // s = (−1)^{ν−1} z^ν
    let mut s = z.clone();
    let mut qp = q.clone();
    let neg_z = Rational::from(-z);
    for _ in 1..=n_terms {
        let t = Rational::from(&s / Rational::from(&qp - 1u32));
        acc.add_rel(&Float::with_val(prec, &t), 1);
        s *= &neg_z;
        qp *= q;
    }
    let tail = Rational::from(az.pow_ref_i(n_terms + 1))
        / (Rational::from(n_terms + 1) * &qm1 * (Rational::from(1) - &az));
    acc.add_err(&up(&tail));
    Ok(acc.finish())
}
