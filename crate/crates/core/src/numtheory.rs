//! Exact integer utilities: `d_N = lcm(1..N)`, binomials, the Vacca-type
//! weights `σ_{n,q}` and exact floor logarithms.

use std::sync::OnceLock;

use rug::Integer;
use serde::Serialize;

/// `d_N = lcm(1, …, N)` together with its prime-power factorization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LcmTable {
    pub n: u64,
    #[serde(serialize_with = "ser_integer")]
    pub value: Integer,
    pub prime_powers: Vec<(u64, u32)>,
}

fn ser_integer<S: serde::Serializer>(v: &Integer, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl LcmTable {
    /// True when `k` divides `d_N`.
    pub fn divisible_by(&self, k: &Integer) -> bool {
        self.value.is_divisible(k)
    }
}

/// Primes `≤ limit`, by the sieve of Eratosthenes.
pub fn primes_upto(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

const SHARED_SIEVE: u64 = 1 << 16;

fn shared_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_upto(SHARED_SIEVE))
}

/// `d_N`, built from the prime powers `p^⌊log_p N⌋`.
pub fn lcm_upto(n: u64) -> LcmTable {
    assert!(n >= 1, "lcm_upto requires N >= 1");
    let owned;
    let primes: &[u64] = if n <= SHARED_SIEVE {
        shared_primes()
    } else {
        owned = primes_upto(n);
        &owned
    };
    let mut prime_powers = Vec::new();
    let mut factors = Vec::new();
    for &p in primes.iter().take_while(|&&p| p <= n) {
        let e = floor_log(p, n);
        prime_powers.push((p, e));
        factors.push(pow(p, e));
    }
    LcmTable {
        n,
        value: product_tree(factors),
        prime_powers,
    }
}

fn product_tree(mut v: Vec<Integer>) -> Integer {
    if v.is_empty() {
        return Integer::from(1);
    }
    while v.len() > 1 {
        let mut next = Vec::with_capacity(v.len().div_ceil(2));
        let mut it = v.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(a * b),
                None => next.push(a),
            }
        }
        v = next;
    }
    v.pop().unwrap()
}

/// `d_N` by folding pairwise lcms; slow, kept as an independent oracle.
pub fn lcm_fold(n: u64) -> Integer {
    (1..=n).fold(Integer::from(1), |acc, k| acc.lcm(&Integer::from(k)))
}

/// `C(n, k)` exactly.
pub fn binomial(n: u64, k: u64) -> Integer {
    if k > n {
        return Integer::new();
    }
    Integer::from(Integer::binomial_u(n as u32, k as u32))
}

/// `σ_{n,q}`: `q − 1` when `q | n`, otherwise `−1`. Also defined at
/// `n = 0` (`σ_0 = q − 1`), where it is the constant coefficient of
/// `q/(1−x^q) − 1/(1−x)`.
pub fn sigma(n: u64, q: u64) -> i64 {
    assert!(q >= 2);
    if n % q == 0 {
        q as i64 - 1
    } else {
        -1
    }
}

/// Largest `e` with `q^e ≤ n`, by exact integer comparison.
pub fn floor_log(q: u64, n: u64) -> u32 {
    assert!(q >= 2 && n >= 1);
    let mut e = 0;
    let mut p: u128 = q as u128;
    while p <= n as u128 {
        e += 1;
        p *= q as u128;
    }
    e
}

/// [`floor_log`] for big arguments.
pub fn floor_log_big(q: u64, n: &Integer) -> u32 {
    assert!(q >= 2 && *n >= 1);
    let mut e = 0;
    let mut p = Integer::from(q);
    while p <= *n {
        e += 1;
        p *= q;
    }
    e
}

/// `q^e` as a big integer.
pub fn pow(q: u64, e: u32) -> Integer {
    Integer::from(Integer::u_pow_u(q as u32, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_lcms() {
        assert_eq!(lcm_upto(1).value, 1);
        assert_eq!(lcm_upto(4).value, 12);
        assert_eq!(lcm_upto(8).value, 840);
        assert_eq!(lcm_upto(16).value, 720720);
        assert_eq!(lcm_upto(16).prime_powers[0], (2, 4));
    }

    #[test]
    fn big_lcm_matches_fold() {
        let a = lcm_upto(4096);
        let b = lcm_fold(4096);
        assert_eq!(a.value.significant_bits(), b.significant_bits());
        assert_eq!(a.value, b);
    }

    #[test]
    fn lcm_ratio_is_one_or_prime() {
        let primes = primes_upto(2000);
        let mut prev = lcm_upto(1).value;
        for n in 2..=2000u64 {
            let cur = lcm_upto(n).value;
            let r = Integer::from(&cur / &prev);
            assert!(r == 1 || primes.binary_search(&r.to_u64().unwrap()).is_ok());
            prev = cur;
        }
    }

    #[test]
    fn lcm_growth_bound() {
        for n in 1..=1000u64 {
            let d = lcm_upto(2 * n).value;
            assert!(d < pow(8, n as u32), "n = {n}");
        }
    }

    #[test]
    fn sigma_values() {
        assert_eq!(sigma(3, 3), 2);
        assert_eq!(sigma(1, 3), -1);
        assert_eq!(sigma(4, 2), 1);
    }

    #[test]
    fn floor_log_values() {
        assert_eq!(floor_log(2, 1), 0);
        assert_eq!(floor_log(2, 7), 2);
        assert_eq!(floor_log(3, 9), 2);
        for q in 2..=10u64 {
            for e in 1..=40u32 {
                let Some(qe) = q.checked_pow(e) else { break };
                assert_eq!(floor_log(q, qe), e);
                assert_eq!(floor_log(q, qe - 1), e - 1);
                assert_eq!(floor_log_big(q, &Integer::from(qe)), e);
            }
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(10, 3), 120);
        assert_eq!(binomial(3, 5), 0);
    }

    proptest! {
        #[test]
        fn sigma_sums_to_zero_over_blocks(start in 1u64..100_000, q in 2u64..50) {
            let s: i64 = (start..start + q).map(|n| sigma(n, q)).sum();
            prop_assert_eq!(s, 0);
        }

        #[test]
        fn lcm_divisible_by_all(n in 1u64..300) {
            let d = lcm_upto(n);
            for k in 1..=n {
                prop_assert!(d.divisible_by(&Integer::from(k)));
            }
        }
    }
}
