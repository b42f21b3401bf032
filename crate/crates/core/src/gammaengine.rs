//! γ from the asymptotic formulas `γ ≈ (A − L)/c`, with the parameters chosen
//! from each formula's error term and the result widened by the rigorous
//! bound on the discarded residual `I/c`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linforms::{parts_base2, parts_base3, parts_baseq, reference_gamma, LinearFormDecomposition};
use crate::numerics::{pow2, HpReal, PrecisionPlan};

/// Which asymptotic formula to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AsymMethod {
    /// `m = 2^{n+1}`, error `O(2^{−6·2^n})`.
    #[serde(rename = "base2_m4")]
    Base2M4,
    /// `m = 2^n`, error `O((2/27)^{2^n})`.
    #[serde(rename = "base2_m2")]
    Base2M2,
    /// `m = 2^{n−1}`, error `O((128/3125)^{2^{n−1}})`.
    #[serde(rename = "base2_m1")]
    Base2M1,
    /// `γ = A_{n,1}/2 − n log 2 + O(2^{−n})`.
    #[serde(rename = "base2_log")]
    Base2Log,
    /// Base 3 with `m = 3^n − 3`.
    #[serde(rename = "base3")]
    Base3,
    /// Base q with `m = (q^n − 1)/(q − 1)`.
    #[serde(rename = "baseq")]
    BaseQ,
}

impl AsymMethod {
    pub const ALL: [AsymMethod; 6] = [
        AsymMethod::Base2M4,
        AsymMethod::Base2M2,
        AsymMethod::Base2M1,
        AsymMethod::Base2Log,
        AsymMethod::Base3,
        AsymMethod::BaseQ,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AsymMethod::Base2M4 => "base2_m4",
            AsymMethod::Base2M2 => "base2_m2",
            AsymMethod::Base2M1 => "base2_m1",
            AsymMethod::Base2Log => "base2_log",
            AsymMethod::Base3 => "base3",
            AsymMethod::BaseQ => "baseq",
        }
    }

    fn min_n(self) -> u32 {
        match self {
            AsymMethod::Base2M4 | AsymMethod::Base2Log => 0,
            AsymMethod::Base2M2 | AsymMethod::Base2M1 | AsymMethod::BaseQ => 1,
            AsymMethod::Base3 => 2,
        }
    }
}

/// Parameters for one asymptotic evaluation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GammaPlan {
    pub method: AsymMethod,
    pub q: u64,
    pub n: u32,
    pub m: u32,
    pub digits: u32,
    pub predicted_error_log10: f64,
    /// Absolute accuracy target (bits) for `L` and `A`.
    pub work_bits: u32,
}

/// The estimate `(A − L)/c` together with the residual bound folded into its
/// error.
#[derive(Clone, Debug, Serialize)]
pub struct AsymResult {
    pub plan: GammaPlan,
    /// Encloses γ: the estimate widened by the residual bound.
    pub value: HpReal,
    /// `(A − L)/c` with its rounding error only.
    pub estimate: HpReal,
    /// `log2` of the rigorous bound on `|γ − (A − L)/c|`.
    pub truncation_log2: f64,
}

/// Caps on the work a plan may request: q-logarithms in `L` and terms in `A`.
const MAX_QLOGS: u64 = 1 << 17;
const MAX_A_TERMS: f64 = 33_554_432.0;

fn log10_2() -> f64 {
    std::f64::consts::LOG10_2
}

/// `m` for the method at level `n`.
pub fn m_for(method: AsymMethod, q: u64, n: u32) -> Result<u32> {
    if n < method.min_n() {
        return Err(Error::Plan(format!("{} needs n >= {}", method.name(), method.min_n())));
    }
    let too_big = || Error::Plan(format!("{} with n = {n} is out of range", method.name()));
    let m = match method {
        AsymMethod::Base2M4 => 1u64.checked_shl(n + 1).filter(|_| n < 40),
        AsymMethod::Base2M2 => 1u64.checked_shl(n).filter(|_| n < 40),
        AsymMethod::Base2M1 => 1u64.checked_shl(n - 1).filter(|_| n < 40),
        AsymMethod::Base2Log => Some(1),
        AsymMethod::Base3 => 3u64.checked_pow(n).map(|p| p - 3),
        AsymMethod::BaseQ => {
            if !(2..=64).contains(&q) {
                return Err(Error::Plan(format!("baseq needs 2 <= q <= 64 (q = {q})")));
            }
            q.checked_pow(n).map(|p| (p - 1) / (q - 1))
        }
    };
    m.and_then(|m| u32::try_from(m).ok()).ok_or_else(too_big)
}

fn base_of(method: AsymMethod, q: u64) -> u64 {
    match method {
        AsymMethod::Base3 => 3,
        AsymMethod::BaseQ => q,
        _ => 2,
    }
}

/// `log10` of the formula's stated error term.
pub fn predicted_error_log10(method: AsymMethod, q: u64, n: u32, m: u32) -> f64 {
    let p2 = 2f64.powi(n as i32);
    match method {
        AsymMethod::Base2M4 => -6.0 * p2 * log10_2(),
        AsymMethod::Base2M2 => p2 * (2.0f64 / 27.0).log10(),
        AsymMethod::Base2M1 => p2 / 2.0 * (128.0f64 / 3125.0).log10(),
        AsymMethod::Base2Log => -f64::from(n) * log10_2(),
        AsymMethod::Base3 => 3f64.powi(n as i32) * (3f64.powf(2.5) / 64.0).log10(),
        AsymMethod::BaseQ => {
            let q = q as f64;
            q.log10() - f64::from(m) * (2.0 * std::f64::consts::E * q).log10()
        }
    }
}

/// `log2` of a rigorous upper bound on `|I/c|`, from the residual sandwiches:
/// `I_{n,m} < 6 ρ(r)^m` (`r = 2^{n+1}/m`), `I_{n,1} < 2^{−n+1}`,
/// `I_{n,m,3} < 3 (27/256)^m`, `I' < q/(2e)^m`.
pub fn truncation_bound_log2(method: AsymMethod, q: u64, n: u32, m: u32) -> f64 {
    let mf = f64::from(m);
    let rho = |r: f64| r * r.log2() - (r + 1.0) * (r + 1.0).log2();
    let raw = match method {
        AsymMethod::Base2M4 => 6f64.log2() + mf * rho(1.0) - mf,
        AsymMethod::Base2M2 => 6f64.log2() + mf * rho(2.0) - mf,
        AsymMethod::Base2M1 => 6f64.log2() + mf * rho(4.0) - mf,
        // I_{n,1} < 2^{−n+1}, halved by c = 2.
        AsymMethod::Base2Log => -f64::from(n),
        AsymMethod::Base3 => 3f64.log2() + mf * (27.0f64 / 256.0).log2() - mf / 2.0 * 3f64.log2(),
        AsymMethod::BaseQ => {
            let q = q as f64;
            q.log2() - mf * (2.0 * std::f64::consts::E).log2() - mf * q.log2()
        }
    };
    // Headroom for the f64 evaluation.
    raw + 1e-9 * raw.abs() + 1e-9
}

fn feasible(method: AsymMethod, q: u64, n: u32, m: u32) -> bool {
    let b = base_of(method, q);
    let qlogs = u64::from(m) * (b - 1);
    qlogs <= MAX_QLOGS && (b as f64).powi(n as i32) <= MAX_A_TERMS
}

/// A plan at an explicit level `n`, provisioned for `digits` decimals.
pub fn plan_with_n(method: AsymMethod, q: u64, n: u32, digits: u32) -> Result<GammaPlan> {
    let m = m_for(method, q, n)?;
    let q = base_of(method, q);
    if !feasible(method, q, n, m) {
        return Err(Error::Plan(format!("{} at n = {n} exceeds the work caps", method.name())));
    }
    let coeff_bits = (f64::from(m) * (q as f64).log2()).ceil() as u32;
    let work_bits = (f64::from(digits + 4) / log10_2()).ceil() as u32 + coeff_bits + 8;
    Ok(GammaPlan {
        method,
        q,
        n,
        m,
        digits,
        predicted_error_log10: predicted_error_log10(method, q, n, m),
        work_bits,
    })
}

/// The smallest `n` whose predicted error is below `10^{−D−2}` and whose
/// rigorous residual bound is below half of that, so the result certifies.
pub fn plan_for_digits(digits: u32, method: AsymMethod, q: u64) -> Result<GammaPlan> {
    if digits == 0 {
        return Err(Error::Plan("digits must be >= 1".into()));
    }
    let target = -f64::from(digits) - 2.0;
    let mut n = method.min_n();
    loop {
        let m = m_for(method, q, n)?;
        if !feasible(method, base_of(method, q), n, m) {
            return Err(Error::Plan(format!(
                "{} cannot reach {digits} digits within the work caps",
                method.name()
            )));
        }
        let pred = predicted_error_log10(method, base_of(method, q), n, m);
        let proof = truncation_bound_log2(method, base_of(method, q), n, m) * log10_2();
        if pred < target && proof < target - 2f64.log10() {
            return plan_with_n(method, q, n, digits);
        }
        n += 1;
    }
}

fn parts(plan: &GammaPlan) -> Result<LinearFormDecomposition> {
    let dp = PrecisionPlan::for_bits(plan.work_bits);
    match plan.method {
        AsymMethod::Base3 => parts_base3(plan.n, plan.m / 6, &dp),
        AsymMethod::BaseQ => parts_baseq(plan.q, plan.n, plan.m, &dp),
        _ => parts_base2(plan.n, plan.m, &dp),
    }
}

/// `(A − L)/c`, its error widened by the residual bound.
pub fn gamma_asym(plan: &GammaPlan) -> Result<AsymResult> {
    if plan.method == AsymMethod::Base3 && plan.m % 6 != 0 {
        return Err(Error::Plan(format!("base3 needs m = 3^n - 3 divisible by 6 (m = {})", plan.m)));
    }
    let d = parts(plan)?;
    let prec = d.l_part.prec() + 16;
    let diff = &d.a_part.to_hp(prec) - &d.l_part;
    let est = diff.div_integer(&d.gamma_coeff);
    let t = truncation_bound_log2(plan.method, plan.q, plan.n, plan.m);
    let bound = pow2(t.ceil() as i64);
    Ok(AsymResult {
        plan: plan.clone(),
        value: est.clone().widen(&bound),
        estimate: est,
        truncation_log2: t,
    })
}

/// The signed error `γ_ref − (A − L)/c` of a result, with γ_ref from the
/// reference series at higher precision.
pub fn signed_error(result: &AsymResult) -> Result<HpReal> {
    let g = reference_gamma(result.plan.work_bits + 16)?;
    Ok(&g - &result.estimate)
}

/// `(−1)^{n−1} = (−1)^{3k}` for `6k = 3^n − 3`.
pub fn base3_sign_identity(n: u32) -> bool {
    let k = (3u64.pow(n) - 3) / 6;
    (n - 1) % 2 == (3 * k % 2) as u32
}
