//! Precision contract shared by every approximate computation.
//!
//! [`HpReal`] is an MPFR float paired with an a-priori bound on its absolute
//! error. Every operation propagates the input bounds and adds one ulp of the
//! result whenever MPFR reports an inexact rounding, so the bound always
//! dominates the true deviation. The bound itself is kept at 64 bits and is
//! always rounded upward.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use rug::float::{Constant, Round};
use rug::ops::AssignRound;
use rug::{Float, Integer, Rational};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Precision of error bounds.
pub(crate) const ERR_PREC: u32 = 64;

/// Retries allowed by [`with_retry`] before giving up.
pub const MAX_RETRIES: u32 = 4;

const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// Upward-rounded 64-bit evaluation, used for every error-bound computation.
pub(crate) fn up<T>(src: T) -> Float
where
    Float: AssignRound<T, Round = Round, Ordering = Ordering>,
{
    Float::with_val_round(ERR_PREC, src, Round::Up).0
}

/// Downward-rounded 64-bit evaluation.
pub(crate) fn down<T>(src: T) -> Float
where
    Float: AssignRound<T, Round = Round, Ordering = Ordering>,
{
    Float::with_val_round(ERR_PREC, src, Round::Down).0
}

// rug evaluates `owned ⊕ x` and `x ⊕ owned` eagerly with round-to-nearest,
// so directed-rounding helpers must only ever see borrowed operands.

pub(crate) fn add_up(a: &Float, b: &Float) -> Float {
    up(a + b)
}

pub(crate) fn mul_up(a: &Float, b: &Float) -> Float {
    up(a * b)
}

/// Round-to-nearest at `prec`, returning the value and the rounding error
/// bound (zero when MPFR reports an exact result).
pub(crate) fn nearest<T>(prec: u32, src: T) -> (Float, Float)
where
    Float: AssignRound<T, Round = Round, Ordering = Ordering>,
{
    let (v, ord) = Float::with_val_round(prec, src, Round::Nearest);
    let e = if ord == Ordering::Equal {
        Float::new(ERR_PREC)
    } else {
        ulp(&v)
    };
    (v, e)
}

/// One unit in the last place of `x` at its own precision; zero for zero.
pub(crate) fn ulp(x: &Float) -> Float {
    match x.get_exp() {
        Some(e) => pow2(i64::from(e) - i64::from(x.prec())),
        None => Float::new(ERR_PREC),
    }
}

/// `2^e` as a 64-bit float (exact).
pub(crate) fn pow2(e: i64) -> Float {
    let e = i32::try_from(e).expect("binary exponent out of range");
    Float::with_val(ERR_PREC, 1u32) << e
}

/// Real number with an explicit working precision and absolute error bound.
#[derive(Clone, Debug)]
pub struct HpReal {
    value: Float,
    err: Float,
}

impl HpReal {
    /// Builds a value from a center and an error bound. Negative or
    /// non-finite bounds are rejected.
    pub fn new(value: Float, err: Float) -> Self {
        assert!(
            err.is_finite() && !err.is_sign_negative() || err.is_zero(),
            "error bound must be finite and non-negative"
        );
        let err = up(&err);
        HpReal { value, err }
    }

    pub fn exact(value: Float) -> Self {
        HpReal {
            value,
            err: Float::new(ERR_PREC),
        }
    }

    pub fn zero(prec: u32) -> Self {
        Self::exact(Float::new(prec))
    }

    pub fn from_integer(prec: u32, n: &Integer) -> Self {
        let (v, e) = nearest(prec, n);
        HpReal { value: v, err: e }
    }

    pub fn from_i64(prec: u32, n: i64) -> Self {
        let (v, e) = nearest(prec, n);
        HpReal { value: v, err: e }
    }

    pub fn from_rational(prec: u32, r: &Rational) -> Self {
        let (v, e) = nearest(prec, r);
        HpReal { value: v, err: e }
    }

    /// Exact conversion of a finite `f64` (the precision is raised to 53
    /// bits if needed so nothing is lost).
    pub fn from_f64(prec: u32, x: f64) -> Self {
        assert!(x.is_finite());
        Self::exact(Float::with_val(prec.max(53), x))
    }

    pub fn pi(prec: u32) -> Self {
        let (v, e) = nearest(prec, Constant::Pi);
        HpReal { value: v, err: e }
    }

    pub fn ln2(prec: u32) -> Self {
        let (v, e) = nearest(prec, Constant::Log2);
        HpReal { value: v, err: e }
    }

    /// Natural logarithm of a positive integer.
    pub fn ln_u64(prec: u32, n: u64) -> Self {
        assert!(n > 0, "logarithm of zero");
        if n == 1 {
            return Self::zero(prec);
        }
        let x = Float::with_val(prec.max(64), n);
        let (v, e) = nearest(prec, x.ln_ref());
        HpReal { value: v, err: e }
    }

    /// Euler's number `e`.
    pub fn euler_e(prec: u32) -> Self {
        Self::exact(Float::with_val(prec, 1u32)).exp()
    }

    pub fn value(&self) -> &Float {
        &self.value
    }

    pub fn err(&self) -> &Float {
        &self.err
    }

    pub fn prec(&self) -> u32 {
        self.value.prec()
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    /// True when the error bound is zero.
    pub fn is_exact(&self) -> bool {
        self.err.is_zero()
    }

    /// Upper bound on `|x|` (64 bits, rounded up).
    pub fn abs_upper(&self) -> Float {
        add_up(&self.err, &up(self.value.abs_ref()))
    }

    /// Lower end of the enclosing interval, at precision `prec + 64`.
    pub fn lower(&self) -> Float {
        Float::with_val_round(self.prec() + 64, &self.value - &self.err, Round::Down).0
    }

    /// Upper end of the enclosing interval, at precision `prec + 64`.
    pub fn upper(&self) -> Float {
        Float::with_val_round(self.prec() + 64, &self.value + &self.err, Round::Up).0
    }

    /// `x > 0` holds for every point of the enclosure.
    pub fn is_certainly_positive(&self) -> bool {
        self.lower() > 0
    }

    pub fn is_certainly_negative(&self) -> bool {
        self.upper() < 0
    }

    /// Every point of `self` is below every point of `other`.
    pub fn certainly_lt(&self, other: &HpReal) -> bool {
        self.upper() < other.lower()
    }

    /// The two enclosures intersect, i.e. `|a - b| <= err_a + err_b`.
    pub fn overlaps(&self, other: &HpReal) -> bool {
        let p = self.prec().max(other.prec()) + 64;
        let diff = Float::with_val(p, &self.value - &other.value).abs();
        let tol = up(&self.err + &other.err);
        // The subtraction above may round; give it one ulp of slack.
        diff <= add_up(&tol, &ulp(&diff))
    }

    /// `|self - other|` is below `tol` for every pair of points in the two
    /// enclosures.
    pub fn certainly_within(&self, other: &HpReal, tol: &Float) -> bool {
        let p = self.prec().max(other.prec()) + 64;
        let diff = Float::with_val_round(p, &self.value - &other.value, Round::Up).0.abs();
        let total = add_up(&diff, &add_up(&self.err, &other.err));
        total < *tol
    }

    /// Enlarges the error bound by `extra`.
    pub fn widen(mut self, extra: &Float) -> Self {
        assert!(!extra.is_sign_negative() || extra.is_zero());
        self.err = up(&self.err + extra);
        self
    }

    /// Re-rounds the center to `prec` bits.
    pub fn with_prec(&self, prec: u32) -> Self {
        let (v, e) = nearest(prec, &self.value);
        HpReal {
            value: v,
            err: add_up(&self.err, &e),
        }
    }

    fn out_prec(&self, other: &HpReal) -> u32 {
        self.prec().max(other.prec())
    }

    pub fn abs(&self) -> Self {
        HpReal {
            value: self.value.clone().abs(),
            err: self.err.clone(),
        }
    }

    pub fn mul(&self, other: &HpReal) -> Self {
        let (v, round) = nearest(self.out_prec(other), &self.value * &other.value);
        let a = up(self.value.abs_ref());
        let b = up(other.value.abs_ref());
        let prop = add_up(&mul_up(&a, &other.err), &mul_up(&b, &self.err));
        let prop = add_up(&prop, &mul_up(&self.err, &other.err));
        HpReal {
            value: v,
            err: add_up(&prop, &round),
        }
    }

    /// Quotient; fails when the divisor's enclosure contains zero.
    pub fn div(&self, other: &HpReal) -> Result<Self> {
        let b = down(other.value.abs_ref());
        if b <= other.err {
            return Err(Error::Domain("division by an interval containing zero".into()));
        }
        let (v, round) = nearest(self.out_prec(other), &self.value / &other.value);
        let a = up(self.value.abs_ref());
        let num = add_up(&mul_up(&a, &other.err), &mul_up(&up(other.value.abs_ref()), &self.err));
        let den = down(&b * &down(&b - &other.err));
        let prop = up(&num / &den);
        Ok(HpReal {
            value: v,
            err: add_up(&prop, &round),
        })
    }

    pub fn mul_integer(&self, n: &Integer) -> Self {
        let (v, round) = nearest(self.prec(), &self.value * n);
        let prop = mul_up(&self.err, &up(&Integer::from(n.abs_ref())));
        HpReal {
            value: v,
            err: add_up(&prop, &round),
        }
    }

    pub fn mul_i64(&self, n: i64) -> Self {
        self.mul_integer(&Integer::from(n))
    }

    pub fn div_integer(&self, n: &Integer) -> Self {
        assert!(*n != 0, "division by zero");
        let (v, round) = nearest(self.prec(), &self.value / n);
        let prop = up(&self.err / &down(&Integer::from(n.abs_ref())));
        HpReal {
            value: v,
            err: add_up(&prop, &round),
        }
    }

    pub fn div_u64(&self, n: u64) -> Self {
        self.div_integer(&Integer::from(n))
    }

    pub fn mul_rational(&self, r: &Rational) -> Self {
        let (v, round) = nearest(self.prec(), &self.value * r);
        let prop = mul_up(&self.err, &up(&Rational::from(r.abs_ref())));
        HpReal {
            value: v,
            err: add_up(&prop, &round),
        }
    }

    /// Exact scaling by `2^k`.
    pub fn mul_pow2(&self, k: i32) -> Self {
        HpReal {
            value: self.value.clone() << k,
            err: self.err.clone() << k,
        }
    }

    /// Natural logarithm; the enclosure must be strictly positive.
    pub fn ln(&self) -> Result<Self> {
        let lo = down(&self.value - &self.err);
        if lo <= 0 {
            return Err(Error::Domain("logarithm of a non-positive enclosure".into()));
        }
        let (v, round) = nearest(self.prec(), self.value.ln_ref());
        let prop = up(&self.err / &lo);
        Ok(HpReal {
            value: v,
            err: add_up(&prop, &round),
        })
    }

    pub fn exp(&self) -> Self {
        let (v, round) = nearest(self.prec(), self.value.exp_ref());
        let ev = up(add_up(&self.value, &self.err).exp_ref());
        let grow = up(self.err.exp_m1_ref());
        let prop = up(&ev * &grow);
        HpReal {
            value: v,
            err: add_up(&prop, &round),
        }
    }

    pub fn cos(&self) -> Self {
        let (v, round) = nearest(self.prec(), self.value.cos_ref());
        HpReal {
            value: v,
            err: add_up(&self.err, &round),
        }
    }

    pub fn sin(&self) -> Self {
        let (v, round) = nearest(self.prec(), self.value.sin_ref());
        HpReal {
            value: v,
            err: add_up(&self.err, &round),
        }
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    /// `x^k` by repeated squaring.
    pub fn pow_u(&self, mut k: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::exact(Float::with_val(self.prec(), 1u32));
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.square();
            }
        }
        acc
    }

    /// Base-2 exponent of the error bound (`err < 2^e`), `None` when exact.
    pub fn err_exp2(&self) -> Option<i32> {
        self.err.get_exp()
    }

    /// Decimal digits after the point that the error bound certifies.
    pub fn certified_digits(&self) -> u32 {
        match self.err.get_exp() {
            None => self.prec(),
            Some(e) if e >= 0 => 0,
            Some(e) => ((-f64::from(e)) / LOG2_10).floor() as u32,
        }
    }

    /// Prints `digits` decimals, truncated toward zero. Only succeeds when
    /// `err < 10^-(digits+2)` and both ends of the enclosure truncate to the
    /// same string, so every printed digit is correct.
    pub fn to_fixed(&self, digits: u32) -> Result<String> {
        let gate = Float::with_val(ERR_PREC, 10u32).pow_ref_i(-(digits as i32 + 2));
        if self.err >= gate {
            return Err(Error::UncertainDigits { digits });
        }
        let scale = Integer::from(Integer::u_pow_u(10, digits));
        let p = self.prec() + 64 + scale.significant_bits();
        let lo = Float::with_val(p, self.lower() * &scale);
        let hi = Float::with_val(p, self.upper() * &scale);
        let tlo = lo.trunc().to_integer().expect("finite");
        let thi = hi.trunc().to_integer().expect("finite");
        if tlo != thi {
            return Err(Error::UncertainDigits { digits });
        }
        Ok(format_scaled(&tlo, digits))
    }

    /// Scientific notation `d.ddde±k` with `sig` significant digits
    /// (display only; not certified).
    pub fn to_sci(&self, sig: usize) -> String {
        float_to_sci(&self.value, sig)
    }

    /// Decimal rendering sized to the error bound: every printed digit is
    /// significant against `err`, plus two extra.
    pub fn to_decimal(&self) -> String {
        if self.value.is_zero() {
            return "0".to_string();
        }
        let vexp = i64::from(self.value.get_exp().unwrap_or(0));
        let bits = match self.err.get_exp() {
            Some(e) => (vexp - i64::from(e)).max(1),
            None => i64::from(self.prec()),
        };
        let sig = ((bits as f64) / LOG2_10).ceil() as usize + 2;
        float_to_sci(&self.value, sig.clamp(3, 100_000))
    }
}

fn format_scaled(t: &Integer, digits: u32) -> String {
    let neg = *t < 0;
    let s = t.clone().abs().to_string();
    let d = digits as usize;
    let s = if s.len() <= d {
        format!("{}{}", "0".repeat(d + 1 - s.len()), s)
    } else {
        s
    };
    let (int, frac) = s.split_at(s.len() - d);
    let sign = if neg { "-" } else { "" };
    if d == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

/// `d.ddde±k` formatting of an MPFR float.
pub(crate) fn float_to_sci(x: &Float, sig: usize) -> String {
    if x.is_zero() {
        return format!("0.{}e0", "0".repeat(sig.saturating_sub(1)));
    }
    let (neg, digits, exp) = x.to_sign_string_exp(10, Some(sig.max(1)));
    let exp = exp.unwrap_or(0) - 1;
    let (head, tail) = digits.split_at(1);
    let sign = if neg { "-" } else { "" };
    if tail.is_empty() {
        format!("{sign}{head}e{exp}")
    } else {
        format!("{sign}{head}.{tail}e{exp}")
    }
}

trait PowI {
    fn pow_ref_i(&self, k: i32) -> Float;
}

impl PowI for Float {
    fn pow_ref_i(&self, k: i32) -> Float {
        use rug::ops::Pow;
        Float::with_val_round(self.prec(), self.pow(k), Round::Down).0
    }
}

impl fmt::Display for HpReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ± {}", self.to_decimal(), float_to_sci(&self.err, 3))
    }
}

impl Serialize for HpReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("HpReal", 2)?;
        st.serialize_field("value", &self.to_decimal())?;
        st.serialize_field("err_exp2", &self.err_exp2())?;
        st.end()
    }
}

impl Add<&HpReal> for &HpReal {
    type Output = HpReal;
    fn add(self, other: &HpReal) -> HpReal {
        let (v, round) = nearest(self.out_prec(other), &self.value + &other.value);
        HpReal {
            value: v,
            err: add_up(&add_up(&self.err, &other.err), &round),
        }
    }
}

impl Sub<&HpReal> for &HpReal {
    type Output = HpReal;
    fn sub(self, other: &HpReal) -> HpReal {
        let (v, round) = nearest(self.out_prec(other), &self.value - &other.value);
        HpReal {
            value: v,
            err: add_up(&add_up(&self.err, &other.err), &round),
        }
    }
}

impl Neg for &HpReal {
    type Output = HpReal;
    fn neg(self) -> HpReal {
        HpReal {
            value: -self.value.clone(),
            err: self.err.clone(),
        }
    }
}

impl Neg for HpReal {
    type Output = HpReal;
    fn neg(self) -> HpReal {
        HpReal {
            value: -self.value,
            err: self.err,
        }
    }
}

/// Sums values in the order given; the order is part of the determinism
/// contract.
pub fn sum_ordered<'a, I>(prec: u32, items: I) -> HpReal
where
    I: IntoIterator<Item = &'a HpReal>,
{
    items
        .into_iter()
        .fold(HpReal::zero(prec), |acc, x| &acc + x)
}

/// Working-precision plan for one computation.
///
/// `work_bits` is the absolute accuracy target: series are truncated once
/// their tail drops below `2^-work_bits`. Arithmetic runs at
/// [`PrecisionPlan::prec`] bits (`work_bits + guard_bits`), raised further by
/// callers that know about magnitude or cancellation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PrecisionPlan {
    pub target_digits: u32,
    pub work_bits: u32,
    pub guard_bits: u32,
    pub term_count_hint: u64,
}

impl PrecisionPlan {
    fn guard_for(hint: u64) -> u32 {
        32 + (64 - (hint.max(2) - 1).leading_zeros())
    }

    pub fn for_digits(digits: u32) -> Self {
        Self::for_digits_with_terms(digits, 2)
    }

    pub fn for_digits_with_terms(digits: u32, term_count_hint: u64) -> Self {
        let guard_bits = Self::guard_for(term_count_hint);
        let work_bits = (f64::from(digits) * LOG2_10).ceil() as u32 + guard_bits;
        PrecisionPlan {
            target_digits: digits,
            work_bits,
            guard_bits,
            term_count_hint,
        }
    }

    /// Plan with an explicit bit budget; the digit target is derived from it.
    pub fn for_bits(work_bits: u32) -> Self {
        let guard_bits = Self::guard_for(2);
        let target_digits =
            (f64::from(work_bits.saturating_sub(guard_bits)) / LOG2_10).floor() as u32;
        PrecisionPlan {
            target_digits,
            work_bits: work_bits.max(guard_bits + 1),
            guard_bits,
            term_count_hint: 2,
        }
    }

    pub fn with_term_hint(mut self, hint: u64) -> Self {
        let g = Self::guard_for(hint);
        if g > self.guard_bits {
            self.work_bits += g - self.guard_bits;
            self.guard_bits = g;
        }
        self.term_count_hint = hint;
        self
    }

    /// Same plan with twice the working bits.
    pub fn doubled(&self) -> Self {
        PrecisionPlan {
            work_bits: self.work_bits * 2,
            ..*self
        }
    }

    /// MPFR precision for arithmetic under this plan.
    pub fn prec(&self) -> u32 {
        self.work_bits + self.guard_bits
    }

    /// `2^-work_bits`, the truncation target.
    pub fn epsilon(&self) -> Float {
        pow2(-i64::from(self.work_bits))
    }

    pub fn is_consistent(&self) -> bool {
        let need = (f64::from(self.target_digits) * LOG2_10).ceil() as u32 + self.guard_bits;
        self.work_bits >= need && self.guard_bits >= Self::guard_for(self.term_count_hint)
    }
}

/// Runs `f`, doubling the working precision on precision-related failures,
/// at most [`MAX_RETRIES`] times.
pub fn with_retry<T>(
    plan: &PrecisionPlan,
    mut f: impl FnMut(&PrecisionPlan) -> Result<T>,
) -> Result<T> {
    let mut p = *plan;
    let mut attempt = 0;
    loop {
        match f(&p) {
            Err(e) if e.wants_more_precision() => {
                if attempt == MAX_RETRIES {
                    return Err(Error::PrecisionExhausted {
                        retries: MAX_RETRIES,
                        work_bits: p.work_bits,
                    });
                }
                attempt += 1;
                p = p.doubled();
            }
            other => return other,
        }
    }
}

/// `x - floor(x)`. Fails with [`Error::AmbiguousFloor`] when the enclosure
/// reaches an integer (or its error is not below 1/4), since the floor is
/// then not determined.
pub fn fractional_part(x: &HpReal) -> Result<HpReal> {
    if x.err >= 0.25 {
        return Err(Error::AmbiguousFloor);
    }
    let fl = Float::with_val(x.prec(), x.value.floor_ref());
    let (frac, round) = nearest(x.prec(), &x.value - &fl);
    if !x.err.is_zero() {
        let down_dist = frac.clone();
        let up_dist = Float::with_val(x.prec(), 1u32 - &frac);
        let dist = if down_dist < up_dist { down_dist } else { up_dist };
        if dist <= up(&x.err + &round) {
            return Err(Error::AmbiguousFloor);
        }
    }
    Ok(HpReal {
        value: frac,
        err: add_up(&x.err, &round),
    })
}

/// Nearest integer to `x`, certified: succeeds only when the whole
/// enclosure lies within `slack` of that integer.
pub fn round_to_integer_checked(x: &HpReal, slack: &HpReal) -> Result<Integer> {
    if slack.upper() >= 0.5 {
        return Err(Error::Domain("rounding slack must be below 1/2".into()));
    }
    let n = x
        .value
        .clone()
        .round()
        .to_integer()
        .ok_or_else(|| Error::Domain("cannot round a non-finite value".into()))?;
    let p = x.prec() + 64;
    let dist = Float::with_val_round(p, &x.value - &n, Round::Up).0.abs();
    let total = up(&dist + &x.err);
    if total <= slack.lower() {
        Ok(n)
    } else {
        Err(Error::NotNearInteger {
            value: x.to_sci(20),
        })
    }
}

/// Running sum with rigorous error accounting, for hot series loops where
/// building an [`HpReal`] per term would be wasteful.
///
/// Terms are supplied either with a relative error measured in units of
/// `2^(1-prec)` ([`Accumulator::add_rel`]) or as full [`HpReal`]s.
pub(crate) struct Accumulator {
    prec: u32,
    sum: Float,
    abs_total: Float,
    weighted_rel: Float,
    abs_err: Float,
    ops: u64,
}

impl Accumulator {
    pub(crate) fn new(prec: u32) -> Self {
        Accumulator {
            prec,
            sum: Float::new(prec),
            abs_total: Float::new(ERR_PREC),
            weighted_rel: Float::new(ERR_PREC),
            abs_err: Float::new(ERR_PREC),
            ops: 0,
        }
    }

    /// Adds a term known to relative accuracy `rel_ulps * 2^(1-prec)`.
    pub(crate) fn add_rel(&mut self, term: &Float, rel_ulps: u32) {
        self.sum += term;
        self.ops += 1;
        let a = up(term.abs_ref());
        self.abs_total = up(&self.abs_total + &a);
        if rel_ulps > 0 {
            self.weighted_rel = add_up(&self.weighted_rel, &up(&a * rel_ulps));
        }
    }

    pub(crate) fn sub_rel(&mut self, term: &Float, rel_ulps: u32) {
        let neg = Float::with_val(term.prec(), -term);
        self.add_rel(&neg, rel_ulps);
    }

    pub(crate) fn add_hp(&mut self, term: &HpReal) {
        self.add_rel(&term.value, 0);
        self.abs_err = up(&self.abs_err + &term.err);
    }

    /// Adds an absolute error contribution (e.g. a truncated tail).
    pub(crate) fn add_err(&mut self, e: &Float) {
        self.abs_err = up(&self.abs_err + e);
    }

    pub(crate) fn finish(self) -> HpReal {
        let unit = pow2(1 - i64::from(self.prec));
        // Factor 2 covers the difference between computed and true term sizes.
        let term_err = up(&mul_up(&self.weighted_rel, &unit) * 2u32);
        let sum_err = up(&mul_up(&self.abs_total, &unit) * (self.ops + 1));
        let err = add_up(&add_up(&term_err, &sum_err), &self.abs_err);
        HpReal {
            value: self.sum,
            err,
        }
    }
}
