//! Exact integer polynomials and the integer weight sequences built from
//! them: `F_q`, `G_q`, the base-3 recursion `Q_k`, the coefficient vectors
//! `a_{j,k}` and `b_{l,m,q}`, and the weights `χ_q(k)`.

use std::ops::{Add, Mul, Sub};

use rug::float::Constant;
use rug::{Float, Integer, Rational};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{mul_up, pow2, round_to_integer_checked, up, HpReal, ERR_PREC};
use crate::numtheory::binomial;

/// Dense polynomial with big-integer coefficients, ascending degree.
/// Trailing zeros are trimmed, so the zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct IntPolynomial {
    coeffs: Vec<Integer>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<Integer>) -> Self {
        while coeffs.last().is_some_and(|c| *c == 0) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&v| Integer::from(v)).collect())
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: impl Into<Integer>) -> Self {
        Self::new(vec![c.into()])
    }

    /// `1 − x`.
    pub fn one_minus_x() -> Self {
        Self::from_i64(&[1, -1])
    }

    pub fn coeffs(&self) -> &[Integer] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> Integer {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    /// Coefficients padded with zeros to exactly `len` entries.
    pub fn padded(&self, len: usize) -> Vec<Integer> {
        assert!(len >= self.coeffs.len());
        let mut v = self.coeffs.clone();
        v.resize(len, Integer::new());
        v
    }

    pub fn scale(&self, c: &Integer) -> Self {
        Self::new(self.coeffs.iter().map(|a| Integer::from(a * c)).collect())
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = Self::constant(1);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    pub fn eval_integer(&self, x: &Integer) -> Integer {
        let mut acc = Integer::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    /// Exact quotient by `d`, or `None` when the division leaves a remainder
    /// or is not integral.
    pub fn div_exact(&self, d: &IntPolynomial) -> Option<IntPolynomial> {
        let dd = d.degree()?;
        if self.is_zero() {
            return Some(Self::zero());
        }
        let n = self.degree()?;
        if n < dd {
            return None;
        }
        let lead = &d.coeffs[dd];
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Integer::new(); n - dd + 1];
        for i in (0..=n - dd).rev() {
            let c = &rem[i + dd];
            if !c.is_divisible(lead) {
                return None;
            }
            let qc = Integer::from(c / lead);
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[i + j] -= Integer::from(&qc * dc);
            }
            quot[i] = qc;
        }
        if rem.iter().any(|c| *c != 0) {
            return None;
        }
        Some(Self::new(quot))
    }
}

impl Add for &IntPolynomial {
    type Output = IntPolynomial;
    fn add(self, o: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(o.coeffs.len());
        IntPolynomial::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &IntPolynomial {
    type Output = IntPolynomial;
    fn sub(self, o: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(o.coeffs.len());
        IntPolynomial::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Mul for &IntPolynomial {
    type Output = IntPolynomial;
    fn mul(self, o: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || o.is_zero() {
            return IntPolynomial::zero();
        }
        let mut out = vec![Integer::new(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += Integer::from(a * b);
            }
        }
        IntPolynomial::new(out)
    }
}

/// `F_q(x) = 1 + x + … + x^{q−1}`.
pub fn f_poly(q: u64) -> IntPolynomial {
    assert!(q >= 2);
    IntPolynomial::new(vec![Integer::from(1); q as usize])
}

/// `G_q(x) = (q − F_q(x)) / (1 − x)`.
pub fn g_poly(q: u64) -> IntPolynomial {
    let num = &IntPolynomial::constant(q) - &f_poly(q);
    num.div_exact(&IntPolynomial::one_minus_x())
        .expect("q - F_q vanishes at x = 1")
}

/// The base-3 polynomials: `Q_0 = 0`,
/// `Q_{k+1} = (1−x)^6 Q_k + (−27)^k (28 − 34x + 21x² − 7x³ + x⁴)`.
pub fn qk_polynomial(k: u32) -> IntPolynomial {
    let step = IntPolynomial::one_minus_x().pow(6);
    let base = IntPolynomial::from_i64(&[28, -34, 21, -7, 1]);
    let mut q = IntPolynomial::zero();
    for i in 0..k {
        let c = Integer::from(Integer::i_pow_u(-27, i));
        q = &(&step * &q) + &base.scale(&c);
    }
    q
}

/// `a_{0,k}, …, a_{6k−1,k}`: coefficients of `(2 + x) Q_k(x)`.
pub fn a_coeffs(k: u32) -> Vec<Integer> {
    assert!(k >= 1);
    let p = &IntPolynomial::from_i64(&[2, 1]) * &qk_polynomial(k);
    p.padded(6 * k as usize)
}

/// The polynomial `G_q(x) Σ_{j=1}^m (−1)^j C(m,j) q^{m−j} F_q(x)^{j−1}`.
pub fn b_polynomial(q: u64, m: u32) -> IntPolynomial {
    assert!(q >= 2 && m >= 1);
    let f = f_poly(q);
    let mut sum = IntPolynomial::zero();
    let mut fpow = IntPolynomial::constant(1);
    for j in 1..=m {
        let mut c = binomial(u64::from(m), u64::from(j)) * crate::numtheory::pow(q, m - j);
        if j % 2 == 1 {
            c = -c;
        }
        sum = &sum + &fpow.scale(&c);
        fpow = &fpow * &f;
    }
    &g_poly(q) * &sum
}

/// `b_{0,m,q}, …, b_{m(q−1)−1,m,q}`.
pub fn b_coeffs(q: u64, m: u32) -> Vec<Integer> {
    b_polynomial(q, m).padded(m as usize * (q as usize - 1))
}

/// One certified value `χ_q(k)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChiWeight {
    pub q: u64,
    pub k: u64,
    #[serde(serialize_with = "ser_int")]
    pub value: Integer,
}

fn ser_int<S: serde::Serializer>(v: &Integer, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// `q / (2 sin(π/q))`, the growth rate of `|χ_q(k)|`.
pub fn chi_growth(q: u64) -> f64 {
    q as f64 / (2.0 * (std::f64::consts::PI / q as f64).sin())
}

/// `(q−1) (q / (2 sin(π/q)))^{k+1}`, an upper bound on `|χ_q(k)|`.
pub fn chi_bound(q: u64, k: u64) -> f64 {
    (q - 1) as f64 * chi_growth(q).powf(k as f64 + 1.0)
}

#[derive(Clone)]
struct Cx {
    re: Float,
    im: Float,
}

impl Cx {
    fn one(p: u32) -> Self {
        Cx {
            re: Float::with_val(p, 1u32),
            im: Float::new(p),
        }
    }

    fn mul(&self, o: &Cx) -> Cx {
        let p = self.re.prec();
        let re = Float::with_val(p, &self.re * &o.re) - Float::with_val(p, &self.im * &o.im);
        let im = Float::with_val(p, &self.re * &o.im) + Float::with_val(p, &self.im * &o.re);
        Cx { re, im }
    }

    fn add(&self, o: &Cx) -> Cx {
        Cx {
            re: Float::with_val(self.re.prec(), &self.re + &o.re),
            im: Float::with_val(self.re.prec(), &self.im + &o.im),
        }
    }

    fn pow(&self, mut e: u64) -> (Cx, u32) {
        let mut acc = Cx::one(self.re.prec());
        let mut base = self.clone();
        let mut muls = 0;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
                muls += 1;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
                muls += 1;
            }
        }
        (acc, muls)
    }
}

/// `e^{2πi·t/q}`.
fn root_of_unity(p: u32, q: u64, t: u64) -> Cx {
    let angle = Float::with_val(p, Constant::Pi) * 2u32 * (t % q) / q;
    Cx {
        re: Float::with_val(p, angle.cos_ref()),
        im: Float::with_val(p, angle.sin_ref()),
    }
}

fn chi_precision(q: u64, k: u64) -> u32 {
    let lq = 64 - (q - 1).leading_zeros() as u64;
    let spec = 64 + (k + 1) * lq + 32;
    let growth = (chi_bound(q, k).log2().ceil().max(0.0)) as u64 + 96;
    spec.max(growth) as u32
}

/// `χ_q(k)` evaluated with the primitive root `e^{2πi·t/q}` (`gcd(t, q) = 1`).
pub fn chi_with_root(q: u64, k: u64, t: u64) -> Result<ChiWeight> {
    if q < 2 {
        return Err(Error::Domain("chi requires q >= 2".into()));
    }
    if Integer::from(t).gcd(&Integer::from(q)) != 1 {
        return Err(Error::Domain(format!("{t} is not coprime to {q}")));
    }
    let mut p = chi_precision(q, k);
    for _ in 0..4 {
        match chi_at_precision(q, k, t, p) {
            Err(Error::IntegralityFailure { .. }) => p *= 2,
            other => return other,
        }
    }
    chi_at_precision(q, k, t, p)
}

fn chi_at_precision(q: u64, k: u64, t: u64, p: u32) -> Result<ChiWeight> {
    let roots: Vec<Cx> = (0..q).map(|j| root_of_unity(p, q, j * t)).collect();
    let one = Cx::one(p);
    let factors: Vec<Cx> = roots
        .iter()
        .map(|r| Cx {
            re: Float::with_val(p, &one.re - &r.re),
            im: Float::with_val(p, -&r.im),
        })
        .collect();
    let mut total = Cx {
        re: Float::new(p),
        im: Float::new(p),
    };
    let mut muls = 0u32;
    for l in 1..q {
        let mut prod = Cx::one(p);
        for j in 1..q {
            if j != l {
                prod = prod.mul(&factors[j as usize]);
            }
        }
        let (pw, m1) = prod.pow(k + 1);
        let (rot, m2) = roots[l as usize].pow(k);
        total = total.add(&rot.mul(&pw));
        muls = muls.max((q - 2) as u32 + m1 + m2 + 1);
    }
    // Each complex product perturbs relative accuracy by at most 4 ulps;
    // inputs start within 2 ulps. Terms are bounded by the growth bound.
    let mag = up(chi_bound(q, k) * 1.01 + 1.0);
    let rel = up(&pow2(2 - i64::from(p)) * (4 * (muls + q as u32) + 8));
    let err = up(&mul_up(&mag, &rel) * 2u32);
    let x = HpReal::new(total.re, err);
    let slack = HpReal::from_f64(ERR_PREC, 1e-6);
    match round_to_integer_checked(&x, &slack) {
        Ok(v) if total.im.clone().abs() < 1e-6 => Ok(ChiWeight { q, k, value: v }),
        _ => Err(Error::IntegralityFailure {
            what: format!("chi_{q}({k})"),
        }),
    }
}

/// `χ_q(k) = Σ_{l=1}^{q−1} ε^{kl} Π_{j≠l} (1 − ε^j)^{k+1}`, `ε = e^{2πi/q}`,
/// certified to be an integer.
pub fn chi(q: u64, k: u64) -> Result<ChiWeight> {
    chi_with_root(q, k, 1)
}

/// `3^{(k+1)/2} · 2cos(π(k−1)/6)`, evaluated exactly (for odd `k` the cosine
/// is rational, for even `k` it is `±√3/2` or 0). This is the signed weight
/// `(−1)^k χ_3(k)` of the accelerated series, not `χ_3(k)` itself.
pub fn chi3_closed_form(k: u64) -> Integer {
    let j = (k + 11) % 12;
    let e = u32::try_from(k / 2).expect("k too large");
    if k % 2 == 1 {
        let two_cos = [2i32, 1, -1, -2, -1, 1][(j / 2) as usize];
        crate::numtheory::pow(3, e + 1) * two_cos
    } else {
        let s = [1i32, 0, -1, -1, 0, 1][(j / 2) as usize];
        crate::numtheory::pow(3, e + 1) * s
    }
}

/// `χ_4(k) = 2^{3(k+1)/2+1} cos(π(3k+1)/4) + (−1)^k 2^{k+1}`, exactly.
pub fn chi4_closed_form(k: u64) -> Integer {
    let j = (3 * k + 1) % 8;
    let kk = u32::try_from(k).expect("k too large");
    let first = if k % 2 == 1 {
        let c = [1i32, 0, -1, 0][(j / 2) as usize];
        (Integer::from(1) << (3 * (kk + 1) / 2 + 1)) * c
    } else {
        let s = [1i32, -1, -1, 1][(j / 2) as usize];
        (Integer::from(1) << ((3 * kk + 4) / 2)) * s
    };
    let second = Integer::from(1) << (kk + 1);
    if k % 2 == 0 {
        first + second
    } else {
        first - second
    }
}

/// Integer recurrence satisfied by `χ_q`: the ratios `qε^l/(1−ε^l)` are the
/// roots of `((q + r)^q − r^q)/q²`, so
/// `χ(k+q−1) = −Σ_{i=0}^{q−2} C(q,i) q^{q−i−2} χ(k+i)`.
pub fn chi_recurrence(q: u64) -> Vec<Integer> {
    (0..q - 1)
        .map(|i| -(binomial(q, i) * crate::numtheory::pow(q, (q - i - 2) as u32)))
        .collect()
}

/// `χ_q(0), …, χ_q(count−1)`: the first `q−1` values are certified by
/// complex evaluation, the rest follow exactly from the recurrence.
pub fn chi_sequence(q: u64, count: usize) -> Result<Vec<Integer>> {
    let order = (q - 1) as usize;
    let mut out = Vec::with_capacity(count.max(order));
    for k in 0..order.min(count) {
        out.push(chi(q, k as u64)?.value);
    }
    let rec = chi_recurrence(q);
    while out.len() < count {
        let base = out.len() - order;
        let mut v = Integer::new();
        for (i, c) in rec.iter().enumerate() {
            v += Integer::from(c * &out[base + i]);
        }
        out.push(v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> Vec<Integer> {
        v.iter().map(|&x| Integer::from(x)).collect()
    }

    #[test]
    fn f_and_g() {
        assert_eq!(f_poly(2).coeffs(), ints(&[1, 1]).as_slice());
        assert_eq!(g_poly(2).coeffs(), ints(&[1]).as_slice());
        assert_eq!(f_poly(3).coeffs(), ints(&[1, 1, 1]).as_slice());
        assert_eq!(g_poly(3).coeffs(), ints(&[2, 1]).as_slice());
        for q in 2..=10 {
            let lhs = &(&IntPolynomial::one_minus_x() * &g_poly(q)) + &f_poly(q);
            assert_eq!(lhs, IntPolynomial::constant(q));
        }
    }

    #[test]
    fn qk_small() {
        assert!(qk_polynomial(0).is_zero());
        assert_eq!(qk_polynomial(1).coeffs(), ints(&[28, -34, 21, -7, 1]).as_slice());
    }

    #[test]
    fn qk_identity() {
        let tri = IntPolynomial::from_i64(&[1, 1, 1]);
        for k in 1..=5u32 {
            let lhs = IntPolynomial::one_minus_x().pow(6 * k);
            let c = IntPolynomial::constant(Integer::from(Integer::i_pow_u(-3, 3 * k)));
            let rest = &(&lhs - &(&qk_polynomial(k) * &tri)) - &c;
            assert!(rest.is_zero(), "k = {k}");
        }
    }

    #[test]
    fn a_coefficients() {
        let a = a_coeffs(1);
        assert_eq!(a.len(), 6);
        assert_eq!(a[0], 56);
        assert_eq!(a[1], -40);
        for k in 1..=6u32 {
            let a = a_coeffs(k);
            assert_eq!(a.len(), 6 * k as usize);
            let expect = Integer::from(2) * (Integer::from(1) - Integer::from(Integer::i_pow_u(-27, k)));
            assert_eq!(a[0], expect);
        }
    }

    #[test]
    fn b_coefficients() {
        for q in 2..=5u64 {
            for m in 1..=6u32 {
                let b = b_coeffs(q, m);
                assert_eq!(b.len(), m as usize * (q as usize - 1));
                let qm1 = Integer::from(q - 1);
                let expect = Integer::from(&qm1 * (crate::numtheory::pow(q - 1, m) - crate::numtheory::pow(q, m)));
                assert_eq!(b[0], expect, "q={q} m={m}");
            }
        }
    }

    #[test]
    fn b_polynomial_q2_identity() {
        for m in 1..=8u32 {
            let b = b_polynomial(2, m);
            let rhs = &IntPolynomial::one_minus_x().pow(m) - &IntPolynomial::constant(Integer::from(1) << m);
            for x in [Rational::from(0), Rational::from((1, 2)), Rational::from(1)] {
                let lhs = b.eval(&x) * f_poly(2).eval(&x);
                assert_eq!(lhs, rhs.eval(&x));
            }
        }
    }

    #[test]
    fn chi_base2() {
        for k in 0..=20u64 {
            let v = chi(2, k).unwrap().value;
            assert_eq!(v, if k % 2 == 0 { 1 } else { -1 });
        }
    }

    #[test]
    fn chi_base3_sign() {
        assert_eq!(chi(3, 0).unwrap().value, 3);
        assert_eq!(chi(3, 1).unwrap().value, -6);
        assert_eq!(chi(3, 2).unwrap().value, 9);
    }

    #[test]
    fn chi_closed_forms() {
        for k in 0..=30u64 {
            let signed = if k % 2 == 0 { chi(3, k).unwrap().value } else { -chi(3, k).unwrap().value };
            assert_eq!(signed, chi3_closed_form(k), "k={k}");
            assert_eq!(chi(4, k).unwrap().value, chi4_closed_form(k), "k={k}");
            let f3 = 3f64.powf((k as f64 + 1.0) / 2.0) * 2.0 * (std::f64::consts::PI * (k as f64 - 1.0) / 6.0).cos();
            let scale3 = 3f64.powf((k as f64 + 1.0) / 2.0);
            assert!((chi3_closed_form(k).to_f64() - f3).abs() <= 1e-9 * scale3);
            let f4 = 2f64.powf(1.5 * (k as f64 + 1.0) + 1.0)
                * (std::f64::consts::PI * (3.0 * k as f64 + 1.0) / 4.0).cos()
                + (-1f64).powi(k as i32) * 2f64.powi(k as i32 + 1);
            let scale4 = 2f64.powf(1.5 * (k as f64 + 1.0) + 1.0);
            assert!((chi4_closed_form(k).to_f64() - f4).abs() <= 1e-9 * scale4);
        }
    }

    #[test]
    fn chi_bound_holds() {
        for q in 2..=8u64 {
            for k in [0u64, 5, 20, 40] {
                let v = chi(q, k).unwrap().value;
                assert!(v.to_f64().abs() <= chi_bound(q, k) * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn chi_growth_rate() {
        // For moderate k the root is inflated by the (q−1)·g prefactor, so
        // the finite-k statement is |χ|^{1/k} ≤ g·((q−1)g)^{1/k}; the limit
        // g itself is approached for large k.
        for q in 2..=8u64 {
            let g = chi_growth(q);
            let seq = chi_sequence(q, 1061).unwrap();
            for k in 10..=60usize {
                let v = seq[k].to_f64().abs();
                let cap = g * ((q - 1) as f64 * g).powf(1.0 / k as f64);
                assert!(v.powf(1.0 / k as f64) <= cap * (1.0 + 1e-12), "q={q} k={k}");
            }
            for k in 1000..=1060usize {
                let (m, e) = seq[k].to_f64_exp();
                if m == 0.0 {
                    continue;
                }
                let root = ((m.abs().ln() + e as f64 * std::f64::consts::LN_2) / k as f64).exp();
                assert!(root < g + 0.1, "q={q} k={k}");
            }
        }
    }

    #[test]
    fn chi_root_independence() {
        for q in 2..=8u64 {
            for t in 1..q {
                if Integer::from(t).gcd(&Integer::from(q)) != 1 {
                    continue;
                }
                for k in 0..=12u64 {
                    assert_eq!(chi_with_root(q, k, t).unwrap(), chi(q, k).unwrap());
                }
            }
        }
    }

    #[test]
    fn recurrence_matches_direct() {
        for q in 2..=8u64 {
            let seq = chi_sequence(q, 40).unwrap();
            for (k, v) in seq.iter().enumerate() {
                assert_eq!(*v, chi(q, k as u64).unwrap().value, "q={q} k={k}");
            }
        }
    }

    #[test]
    fn reciprocal_identity() {
        // 1/(1−ε^l) = (1/q) Π_{j≠l} (1 − ε^j)
        for q in 2..=8u64 {
            let p = 200;
            let roots: Vec<Cx> = (0..q).map(|j| root_of_unity(p, q, j)).collect();
            for l in 1..q {
                let mut prod = Cx::one(p);
                for j in 1..q {
                    if j != l {
                        let f = Cx {
                            re: Float::with_val(p, 1u32 - &roots[j as usize].re),
                            im: Float::with_val(p, -&roots[j as usize].im),
                        };
                        prod = prod.mul(&f);
                    }
                }
                let d = Cx {
                    re: Float::with_val(p, 1u32 - &roots[l as usize].re),
                    im: Float::with_val(p, -&roots[l as usize].im),
                };
                // (1 − ε^l) · Π = q
                let one = d.mul(&prod);
                assert!((one.re.to_f64() - q as f64).abs() < 1e-40);
                assert!(one.im.to_f64().abs() < 1e-40);
            }
        }
    }

    proptest! {
        #[test]
        fn mul_is_evaluation_homomorphism(a in prop::collection::vec(-50i64..50, 0..8),
                                          b in prop::collection::vec(-50i64..50, 0..8),
                                          x in -5i64..5) {
            let pa = IntPolynomial::from_i64(&a);
            let pb = IntPolynomial::from_i64(&b);
            let xi = Integer::from(x);
            prop_assert_eq!((&pa * &pb).eval_integer(&xi), pa.eval_integer(&xi) * pb.eval_integer(&xi));
            if !pb.is_zero() {
                prop_assert_eq!((&pa * &pb).div_exact(&pb), Some(pa.clone()));
            }
        }

        #[test]
        fn b_identity_general(q in 2u64..7, m in 1u32..6, num in -4i32..5) {
            // b(x) F(x) = G(x) ((q − F)^m − q^m)
            let x = Rational::from((num, 3));
            let f = f_poly(q).eval(&x);
            let g = g_poly(q).eval(&x);
            let qr = Rational::from(q);
            let lhs = b_polynomial(q, m).eval(&x) * &f;
            let diff = Rational::from(&qr - &f);
            let rhs = g * (Rational::from(rug::ops::Pow::pow(diff, m)) - Rational::from(rug::ops::Pow::pow(qr, m)));
            prop_assert_eq!(lhs, rhs);
        }
    }
}
