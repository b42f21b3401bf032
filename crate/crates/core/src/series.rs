//! Series for Euler's constant: Vacca (base 2 and base q), the double
//! series, Gosper's accelerated series, the base-q accelerated series with
//! `χ_q` weights, and the generalized constants `γ_{j,q}`.

use rayon::prelude::*;
use rug::float::Constant;
use rug::{Float, Integer, Rational};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{mul_up, pow2, up, Accumulator, HpReal, PrecisionPlan};
use crate::numtheory::{floor_log, pow, sigma};
use crate::qpoly::{chi_growth, chi_sequence};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesMethod {
    Vacca,
    Double,
    Gosper,
    BaseqVacca,
    BaseqAccel,
    GammaJq,
}

/// A truncated series value. `value.err` already contains `tail_bound`.
#[derive(Clone, Debug, Serialize)]
pub struct SeriesEstimate {
    pub value: HpReal,
    pub terms_used: u64,
    pub tail_bound: HpReal,
    pub method: SeriesMethod,
}

fn estimate(acc: Accumulator, tail: Float, terms: u64, method: SeriesMethod) -> SeriesEstimate {
    let mut acc = acc;
    acc.add_err(&tail);
    SeriesEstimate {
        value: acc.finish(),
        terms_used: terms,
        tail_bound: HpReal::exact(tail),
        method,
    }
}

fn partial_prec(n: u64) -> u32 {
    96 + (64 - n.leading_zeros())
}

/// `Σ_{n=1}^{N} (−1)^n ⌊log₂ n⌋ / n`, with `N` rounded up to even so the
/// alternating terms pair off. Tail bound `(⌊log₂ N⌋ + 2)/N`.
pub fn vacca_partial(n: u64) -> SeriesEstimate {
    assert!(n >= 1);
    let n = n + (n & 1);
    let prec = partial_prec(n);
    let mut acc = Accumulator::new(prec);
    for k in 2..=n {
        let l = floor_log(2, k);
        let t = Float::with_val(prec, Float::with_val(prec, l) / k);
        if k % 2 == 0 {
            acc.add_rel(&t, 1);
        } else {
            acc.sub_rel(&t, 1);
        }
    }
    let tail = up(&Float::with_val(64, floor_log(2, n) + 2) / n);
    estimate(acc, tail, n, SeriesMethod::Vacca)
}

/// `Σ_{ν≥1} Σ_{κ≥0} (−1)^κ/(2^ν + κ)` restricted to `2^ν + κ ≤ N` (N even).
/// This truncation has exactly the Vacca tail.
pub fn double_partial(n: u64) -> SeriesEstimate {
    assert!(n >= 1);
    let n = n + (n & 1);
    let prec = partial_prec(n);
    let mut acc = Accumulator::new(prec);
    let mut terms = 0;
    let mut base = 2u64;
    while base <= n {
        for kappa in 0..=(n - base) {
            let t = Float::with_val(prec, Float::with_val(prec, 1u32) / (base + kappa));
            if kappa % 2 == 0 {
                acc.add_rel(&t, 1);
            } else {
                acc.sub_rel(&t, 1);
            }
            terms += 1;
        }
        base *= 2;
    }
    let tail = up(&Float::with_val(64, floor_log(2, n) + 2) / n);
    estimate(acc, tail, terms, SeriesMethod::Double)
}

/// `Σ_{n=1}^{N} σ_{n,q} ⌊log_q n⌋ / n` with `N` rounded up to a multiple of
/// `q` (whole σ-blocks). Tail bound `q (⌊log_q N⌋ + 5) / N`.
pub fn baseq_vacca_partial(q: u64, n: u64) -> Result<SeriesEstimate> {
    if q < 2 || n < 1 {
        return Err(Error::Domain("need q >= 2 and N >= 1".into()));
    }
    let n = n.div_ceil(q) * q;
    let prec = partial_prec(n);
    let mut acc = Accumulator::new(prec);
    for k in q..=n {
        let l = floor_log(q, k);
        let t = Float::with_val(prec, Float::with_val(prec, u64::from(l) * sigma(k, q).unsigned_abs()) / k);
        if sigma(k, q) > 0 {
            acc.add_rel(&t, 1);
        } else {
            acc.sub_rel(&t, 1);
        }
    }
    let tail = up(&Float::with_val(64, q * (u64::from(floor_log(q, n)) + 5)) / n);
    Ok(estimate(acc, tail, n, SeriesMethod::BaseqVacca))
}

/// Outer term `Σ_{κ=1}^{ν−1} 1/C(2^{ν−κ}+κ, κ)` of Gosper's series, exactly.
pub fn gosper_inner_exact(nu: u32) -> Rational {
    let mut s = Rational::new();
    for kappa in 1..nu {
        let n = (Integer::from(1) << (nu - kappa)) + kappa;
        s += Rational::from((Integer::from(1), n.binomial(kappa)));
    }
    s
}

/// Lower bound on `log₂ C(2^s + κ, κ)`, from `C ≥ (2^s/κ)^κ` and
/// `C ≥ (1 + κ/2^s)^{2^s}`.
fn log2_binom_lower(s: u32, kappa: u32) -> f64 {
    let k = f64::from(kappa);
    let a = k * (f64::from(s) - k.log2());
    let b = if s <= 60 {
        let n = (s as f64).exp2();
        n * (1.0 + k / n).log2()
    } else {
        0.0
    };
    a.max(b)
}

/// Gosper's outer term `2^{−(ν+1)} Σ_κ 1/C(2^{ν−κ}+κ, κ)` at precision
/// `prec`. Summands provably below `2^{−(cut_bits+ν+1)}` are skipped and
/// charged to the error bound.
pub fn gosper_outer_term(nu: u32, prec: u32, cut_bits: u32) -> HpReal {
    let mut acc = Accumulator::new(prec);
    let mut skipped = 0u32;
    for kappa in 1..nu {
        let s = nu - kappa;
        if log2_binom_lower(s, kappa) > f64::from(cut_bits) + 2.0 {
            skipped += 1;
            continue;
        }
        let n = (Integer::from(1) << s) + kappa;
        let c = n.binomial(kappa);
        let t = Float::with_val(prec, Float::with_val(prec, 1u32) / &c);
        acc.add_rel(&t, 1);
    }
    acc.add_err(&up(&pow2(-i64::from(cut_bits)) * skipped));
    acc.finish().mul_pow2(-(nu as i32 + 1))
}

/// Gosper's series `γ = 1/2 + Σ_{ν≥2} 2^{−(ν+1)} Σ_{κ=1}^{ν−1} 1/C(2^{ν−κ}+κ, κ)`.
/// The outer sum stops at the first `V` with `(V+2)/2^{V+1} < 2^{−work_bits−1}`.
pub fn gosper_gamma(plan: &PrecisionPlan) -> SeriesEstimate {
    let w = plan.work_bits;
    let prec = plan.prec() + 8;
    let mut v = 2u32;
    while f64::from(v + 2).log2() - f64::from(v + 1) >= -f64::from(w) - 1.0 {
        v += 1;
    }
    let cut = w + 8;
    let terms: Vec<HpReal> = (2..=v)
        .into_par_iter()
        .map(|nu| gosper_outer_term(nu, prec, cut))
        .collect();
    let mut acc = Accumulator::new(prec);
    acc.add_rel(&Float::with_val(prec, 0.5), 0);
    for t in &terms {
        acc.add_hp(t);
    }
    let tail = Float::with_val(64, v + 2) << -(v as i32 + 1);
    estimate(acc, tail, u64::from(v), SeriesMethod::Gosper)
}

/// `ρ_q = 1/(2 sin(π/q))`, the per-k contraction of the accelerated series.
pub fn rho_q(q: u64) -> f64 {
    chi_growth(q) / q as f64
}

/// Largest base for which [`baseq_accel_gamma`] converges geometrically.
pub const BASEQ_ACCEL_MAX_Q: u64 = 5;

/// One summand `(−1)^k χ_q(k) / (q^{ν+k+1} C(q^ν+k, k))`, exactly.
pub fn baseq_accel_term(q: u64, nu: u32, k: u32, chi_k: &Integer) -> Rational {
    let c = pow(q, nu) + k;
    let den = pow(q, nu + k + 1) * c.binomial(k);
    let mut r = Rational::from((chi_k.clone(), den));
    if k % 2 == 1 {
        r = -r;
    }
    r
}

/// `log₂(2^a + b)` without overflowing for large `a`.
fn log2_add(a: f64, b: f64) -> f64 {
    if a > 60.0 {
        a + (b / a.exp2()).ln_1p() / std::f64::consts::LN_2
    } else {
        (a.exp2() + b).log2()
    }
}

/// Inner cut for outer index ν: the number of k-terms needed, and `log₂` of
/// the remaining tail bound.
fn baseq_inner_cut(q: u64, nu: u32, target: f64) -> (u32, f64) {
    let lq = (q as f64).log2();
    let lg = chi_growth(q).log2();
    let rho = rho_q(q);
    let lgeo = -(1.0 - rho).log2();
    let lc = f64::from(nu) * lq; // log2 q^ν
    let mut lbin = 0.0;
    let mut k = 0u32;
    loop {
        // bound for index k+1
        let kk = f64::from(k + 1);
        let lb_next = lbin + log2_add(lc, kk) - kk.log2();
        let b = ((q - 1) as f64).log2() + (kk + 1.0) * lg - (f64::from(nu) + kk + 1.0) * lq - lb_next + lgeo;
        if b < target {
            return (k + 1, b);
        }
        lbin = lb_next;
        k += 1;
    }
}

/// The base-q accelerated series
/// `γ = Σ_{ν≥1} Σ_{k≥0} (−1)^k χ_q(k) / (q^{ν+k+1} C(q^ν+k, k))`.
///
/// The inner sum contracts by `ρ_q = 1/(2 sin(π/q))` per step, which is
/// below 1 only for `q ≤ 5`; larger bases are rejected.
pub fn baseq_accel_gamma(q: u64, plan: &PrecisionPlan) -> Result<SeriesEstimate> {
    if !(2..=BASEQ_ACCEL_MAX_Q).contains(&q) {
        return Err(Error::Domain(format!(
            "accelerated base-q series converges geometrically only for 2 <= q <= {BASEQ_ACCEL_MAX_Q}"
        )));
    }
    let w = plan.work_bits;
    let prec = plan.prec() + 8;
    let rho = rho_q(q);
    let lq = (q as f64).log2();
    // Outer tail ρ/((1−ρ) q^V) < 2^{−w−1}.
    let lhead = (rho / (1.0 - rho)).log2();
    let v = (((f64::from(w) + 1.0 + lhead) / lq).ceil().max(1.0)) as u32;
    let target = -f64::from(w) - 2.0 - f64::from(v).log2();
    let cuts: Vec<(u32, f64)> = (1..=v).map(|nu| baseq_inner_cut(q, nu, target)).collect();
    let kmax = cuts.iter().map(|c| c.0).max().unwrap_or(1) as usize;
    let chi = chi_sequence(q, kmax + 1)?;
    let parts: Vec<(HpReal, u64)> = (1..=v)
        .into_par_iter()
        .map(|nu| {
            let (kcut, ltail) = cuts[(nu - 1) as usize];
            let mut acc = Accumulator::new(prec);
            let c = pow(q, nu);
            let mut binom = Integer::from(1);
            let mut qp = pow(q, nu + 1);
            for k in 0..kcut {
                if k > 0 {
                    binom *= Integer::from(&c + k);
                    binom /= k;
                    qp *= q;
                }
                let x = &chi[k as usize];
                let xf = Float::with_val(prec.max(x.significant_bits()), x);
                let den = Integer::from(&binom * &qp);
                let t = Float::with_val(prec, &xf / &den);
                if k % 2 == 0 {
                    acc.add_rel(&t, 1);
                } else {
                    acc.sub_rel(&t, 1);
                }
            }
            acc.add_err(&pow2(ltail.ceil() as i64 + 2));
            (acc.finish(), u64::from(kcut))
        })
        .collect();
    let mut acc = Accumulator::new(prec);
    let mut terms = 0;
    for (p, n) in &parts {
        acc.add_hp(p);
        terms += n;
    }
    // 1.001 absorbs the f64 rounding of ρ.
    let outer = mul_up(&Float::with_val(64, rho / (1.0 - rho) * 1.001), &Float::with_val(64, q).pow_neg(v));
    Ok(estimate(acc, outer, terms, SeriesMethod::BaseqAccel))
}

trait PowNeg {
    fn pow_neg(&self, e: u32) -> Float;
}

impl PowNeg for Float {
    fn pow_neg(&self, e: u32) -> Float {
        use rug::ops::Pow;
        let p: Float = Float::with_val(64, self.pow(e));
        up(1u32 / &p)
    }
}

/// Generalized Euler constant `γ_{j,q} = Σ_{ν≥1} Σ_{t≥0} σ_t / (q^ν + j + t)`.
///
/// Each inner sum is evaluated as whole σ-blocks (`offset_blocks` explicit
/// blocks of `q` terms) plus the closed-form remainder
/// `Σ_{t≥T} σ_t/(c+t) = −(1/q) Σ_{r<q} σ_r ψ((c+T+r)/q)`. The outer sum
/// stops once its tail bound `q^{−V}` drops below `2^{−work_bits−1}`.
pub fn gamma_jq(q: u64, j: u64, plan: &PrecisionPlan) -> Result<SeriesEstimate> {
    gamma_jq_with_offset(q, j, plan, 1)
}

/// [`gamma_jq`] with an explicit number of leading σ-blocks.
pub fn gamma_jq_with_offset(
    q: u64,
    j: u64,
    plan: &PrecisionPlan,
    offset_blocks: u64,
) -> Result<SeriesEstimate> {
    if q < 2 || j >= q {
        return Err(Error::Domain(format!("need q >= 2 and 0 <= j < q (q={q}, j={j})")));
    }
    let w = plan.work_bits;
    let lq = (q as f64).log2();
    let v = ((f64::from(w) + 1.0) / lq).ceil().max(1.0) as u32;
    let t_explicit = offset_blocks * q;
    let parts: Vec<HpReal> = (1..=v)
        .into_par_iter()
        .map(|nu| {
            let boost = 8 + (64 - u64::from(nu).leading_zeros()) + (64 - q.leading_zeros());
            let prec = plan.prec() + boost;
            let c = pow(q, nu) + j;
            let mut acc = Accumulator::new(prec);
            for t in 0..t_explicit {
                let den = Integer::from(&c + t);
                let x = Float::with_val(prec, Float::with_val(prec, sigma(t, q)) / &den);
                acc.add_rel(&x, 1);
            }
            let weights: Vec<Integer> = (0..q).map(|r| Integer::from(sigma(r, q))).collect();
            let start = Integer::from(&c + t_explicit);
            let tail = periodic_tail(&weights, &start, q, prec);
            acc.add_hp(&tail);
            acc.finish()
        })
        .collect();
    let prec = plan.prec() + 8;
    let mut acc = Accumulator::new(prec);
    for p in &parts {
        acc.add_hp(p);
    }
    let outer = up(Float::with_val(64, q).pow_neg(v));
    Ok(estimate(
        acc,
        outer,
        u64::from(v) * (t_explicit + q),
        SeriesMethod::GammaJq,
    ))
}

/// `Σ_{t≥0} w_{t mod q} / (start + t)` for a zero-sum weight period `w`
/// (`start ≥ q`), in closed form: `−(1/q) Σ_{r<q} w_r ψ((start + r)/q)`.
pub(crate) fn periodic_tail(weights: &[Integer], start: &Integer, q: u64, prec: u32) -> HpReal {
    assert_eq!(weights.len() as u64, q);
    assert!(weights.iter().fold(Integer::new(), |a, w| a + w) == 0, "weights must sum to zero");
    assert!(*start >= q);
    let mut acc = Accumulator::new(prec);
    for (r, w) in weights.iter().enumerate() {
        if *w == 0 {
            continue;
        }
        let num = Integer::from(start + r as u64);
        let arg = Float::with_val(prec, Float::with_val(prec.max(num.significant_bits()), &num) / q);
        let psi = Float::with_val(prec, arg.digamma_ref());
        let scaled = Float::with_val(prec, &psi * w);
        acc.add_rel(&scaled, 2);
        // The argument carries ≤ 1 ulp of relative error and a|ψ'(a)| ≤ 2
        // for a ≥ 1.
        acc.add_err(&mul_up(&pow2(3 - i64::from(prec)), &up(&Integer::from(w.abs_ref()))));
    }
    -acc.finish().div_u64(q)
}

/// Euler's constant from MPFR, used only as an independent reference.
pub fn mpfr_euler(prec: u32) -> HpReal {
    let v = Float::with_val(prec, Constant::Euler);
    let e = crate::numerics::ulp(&v);
    HpReal::new(v, e)
}
