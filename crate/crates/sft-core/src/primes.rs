//! Prime generation, coprime modulus selection and row-count bounds.
//!
//! The `s_j` moduli are the first `K` primes no smaller than `k/ε`. The
//! smaller `t_i` moduli used by tensor plans are the first `λ` primes.

use alloc::format;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Primes below `limit`, by the sieve of Eratosthenes.
pub fn sieve(limit: usize) -> Vec<u64> {
    if limit < 3 {
        return Vec::new();
    }
    let mut composite = alloc::vec![false; limit];
    let mut out = Vec::new();
    for i in 2..limit {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j < limit {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// The first `count` primes, starting at 2.
pub fn first_primes(count: usize) -> Vec<u64> {
    if count == 0 {
        return Vec::new();
    }
    // p_n < n (ln n + ln ln n) for n >= 6.
    let n = count.max(6) as f64;
    let limit = (n * (libm::log(n) + libm::log(libm::log(n)))) as usize + 2;
    let mut primes = sieve(limit);
    primes.truncate(count);
    primes
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin over the full `u64` range.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for p in WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    'witness: for a in WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime `>= n`.
pub fn next_prime(n: u64) -> u64 {
    let mut p = n.max(2);
    while !is_prime(p) {
        p += 1;
    }
    p
}

/// Largest `L` with `base^L <= n`, computed exactly.
pub fn floor_log(base: u64, n: u64) -> u32 {
    assert!(base >= 2, "floor_log needs base >= 2");
    let mut power: u128 = 1;
    let mut l = 0;
    while power * base as u128 <= n as u128 {
        power *= base as u128;
        l += 1;
    }
    l
}

/// Ceiling of a positive real with a small guard against representation error.
pub(crate) fn guarded_ceil(x: f64) -> u64 {
    libm::ceil(x - 1e-12) as u64
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

pub fn pairwise_coprime(values: &[u64]) -> bool {
    values
        .iter()
        .enumerate()
        .all(|(i, &a)| values[i + 1..].iter().all(|&b| gcd(a, b) == 1))
}

/// The `s_j` moduli of a measurement plan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SModuli {
    values: Vec<u64>,
    k: u64,
    epsilon_inv: u64,
    c: u64,
    n: u64,
}

impl SModuli {
    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn s1(&self) -> u64 {
        self.values[0]
    }

    /// Number of moduli, `K`.
    pub fn count(&self) -> usize {
        self.values.len()
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn epsilon_inv(&self) -> u64 {
        self.epsilon_inv
    }

    /// `k/ε`.
    pub fn ratio(&self) -> u64 {
        self.k * self.epsilon_inv
    }

    pub fn c(&self) -> u64 {
        self.c
    }

    pub fn bandwidth(&self) -> u64 {
        self.n
    }

    /// `m = Σ s_j`.
    pub fn row_sum(&self) -> u64 {
        self.values.iter().sum()
    }

    /// True when `k/ε + K >= N`, the regime in which the row-count analysis
    /// no longer applies. Callers may want to warn.
    pub fn exceeds_band(&self) -> bool {
        self.ratio() + self.count() as u64 >= self.n
    }
}

fn check_parameters(k: u64, epsilon_inv: u64, n: u64, c: u64) -> Result<u64> {
    let ratio = k
        .checked_mul(epsilon_inv)
        .ok_or_else(|| Error::Overflow(format!("k/ε = {k}·{epsilon_inv}")))?;
    if ratio < 2 {
        return Err(Error::Domain(format!("k/ε = {ratio} must be at least 2")));
    }
    if n <= ratio {
        return Err(Error::Domain(format!("bandwidth {n} must exceed k/ε = {ratio}")));
    }
    if n > i64::MAX as u64 {
        return Err(Error::Overflow(format!("bandwidth {n} exceeds the signed 64-bit range")));
    }
    if c < 2 {
        return Err(Error::Domain(format!("c = {c} must be at least 2")));
    }
    Ok(ratio)
}

/// `K = c·(k/ε)·⌊log_{k/ε} N⌋ + 1`.
pub fn modulus_count(k: u64, epsilon_inv: u64, n: u64, c: u64) -> Result<usize> {
    let ratio = check_parameters(k, epsilon_inv, n, c)?;
    Ok((c * ratio * floor_log(ratio, n) as u64 + 1) as usize)
}

/// The first `K` primes `>= k/ε`.
pub fn select_s_moduli(k: u64, epsilon_inv: u64, n: u64, c: u64) -> Result<SModuli> {
    select_s_moduli_from(k, epsilon_inv, n, c, k.saturating_mul(epsilon_inv))
}

/// As [`select_s_moduli`], but starting the prime run at `floor` instead of
/// `k/ε`. `K` is unchanged; `floor` must be at least `k/ε`.
pub fn select_s_moduli_from(k: u64, epsilon_inv: u64, n: u64, c: u64, floor: u64) -> Result<SModuli> {
    let count = modulus_count(k, epsilon_inv, n, c)?;
    if floor < k * epsilon_inv {
        return Err(Error::Domain(format!("floor {floor} is below k/ε")));
    }
    let mut values = Vec::with_capacity(count);
    let mut p = next_prime(floor);
    while values.len() < count {
        values.push(p);
        p = next_prime(p + 1);
    }
    Ok(SModuli { values, k, epsilon_inv, c, n })
}

/// The `t_i` moduli of a tensor plan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TModuli {
    values: Vec<u64>,
}

impl TModuli {
    /// Hand-picked `t_i`: ascending, each at least 2, pairwise coprime.
    pub fn new(values: Vec<u64>) -> Result<Self> {
        if values.is_empty() || values[0] < 2 || values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("t moduli must be ascending and at least 2".into()));
        }
        if !pairwise_coprime(&values) {
            return Err(Error::Domain("t moduli are not pairwise coprime".into()));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn lambda(&self) -> usize {
        self.values.len()
    }

    /// `m̃ = 1 + Σ t_i`.
    pub fn row_count(&self) -> u64 {
        1 + self.values.iter().sum::<u64>()
    }
}

/// `λ = ⌈3·ln(N/s1) / ln ln(N/s1)⌉`; requires `N/s1 > e`.
pub fn lambda_for(n: u64, s1: u64) -> Result<usize> {
    let x = n as f64 / s1 as f64;
    if x <= core::f64::consts::E {
        return Err(Error::Infeasible(format!("N/s1 = {x} is too small for the λ rule")));
    }
    let lx = libm::log(x);
    Ok(guarded_ceil(3.0 * lx / libm::log(lx)) as usize)
}

/// Checks `N/3 >= s1 > λ(ln λ + ln ln λ)` for the `λ` implied by `s1`.
pub fn t_hypothesis_holds(n: u64, s1: u64) -> bool {
    if 3 * s1 > n {
        return false;
    }
    match lambda_for(n, s1) {
        Ok(lambda) => {
            let l = lambda as f64;
            s1 as f64 > l * (libm::log(l) + libm::log(libm::log(l)))
        }
        Err(_) => false,
    }
}

/// The first `λ` primes, validated against `s`.
pub fn select_t_moduli(n: u64, s: &SModuli) -> Result<TModuli> {
    let s1 = s.s1();
    if !t_hypothesis_holds(n, s1) {
        return Err(Error::Infeasible(format!(
            "s1 = {s1} does not satisfy N/3 >= s1 > λ(ln λ + ln ln λ) for N = {n}"
        )));
    }
    let lambda = lambda_for(n, s1)?;
    let values = first_primes(lambda);
    let largest = *values.last().expect("λ >= 1");
    if largest >= s1 {
        return Err(Error::Infeasible(format!("t_λ = {largest} is not below s1 = {s1}")));
    }
    let mut product: u128 = 1;
    for &t in &values {
        product = product.saturating_mul(t as u128);
    }
    if product * (s1 as u128) < n as u128 {
        return Err(Error::Infeasible(format!("∏ t_i = {product} is below N/s1")));
    }
    if values.iter().any(|&t| s.values().iter().any(|&v| gcd(t, v) != 1)) {
        return Err(Error::Infeasible("t moduli share a factor with the s moduli".into()));
    }
    Ok(TModuli { values })
}

/// Smallest prime `>= k/ε` for which the `t_i` construction is feasible.
pub fn tensor_s1_floor(k: u64, epsilon_inv: u64, n: u64) -> Result<u64> {
    check_parameters(k, epsilon_inv, n, 2)?;
    let mut p = next_prime(k * epsilon_inv);
    while 3 * p <= n {
        if t_hypothesis_holds(n, p) {
            return Ok(p);
        }
        p = next_prime(p + 1);
    }
    Err(Error::Infeasible(format!(
        "no prime s1 >= k/ε = {} admits t moduli for N = {n}",
        k * epsilon_inv
    )))
}

/// Closed-form upper bound on `m = Σ s_j` for [`select_s_moduli`].
pub fn predicted_row_bound(k: u64, epsilon_inv: u64, n: u64, c: u64) -> Result<u64> {
    let ratio = check_parameters(k, epsilon_inv, n, c)?;
    let l = floor_log(ratio, n) as f64;
    let r = ratio as f64;
    let c = c as f64 + 1.89;
    let bound = 0.75 * c * c * r * r * l * l * libm::log(c * r * l);
    Ok(libm::ceil(bound) as u64)
}

/// Bounds on the prime-counting function `π(n)`.
///
/// At and above 599 the pair is `n/ln n·(1 + 0.992/ln n)` and
/// `n/ln n·(1 + 1.2762/ln n)`. Below 599 both entries are the exact count.
pub fn prime_counting_bounds(n: u64) -> (f64, f64) {
    if n < 599 {
        let exact = sieve(n as usize + 1).len() as f64;
        return (exact, exact);
    }
    let x = n as f64;
    let ln = libm::log(x);
    (x / ln * (1.0 + 0.992 / ln), x / ln * (1.0 + 1.2762 / ln))
}

/// Upper bound on `m̃ = 1 + Σ t_i` for the `t_i` chosen from `s1`.
pub fn t_row_bound(n: u64, s1: u64) -> Result<f64> {
    let lambda = lambda_for(n, s1)? as f64;
    Ok(0.75 * (lambda + 1.0) * (lambda + 1.0) * libm::log(lambda + 1.0) + 1.0)
}

/// Bound on distinct samples for the deterministic flat algorithm with `c = 4`.
pub fn flat_sample_bound(k: u64, epsilon_inv: u64, n: u64) -> Result<f64> {
    let ratio = check_parameters(k, epsilon_inv, n, 2)?;
    let kl = (ratio * floor_log(ratio, n) as u64) as f64;
    Ok(26.02 * kl * kl * libm::log(5.89 * kl))
}

/// Bound on distinct samples for the randomized flat algorithm.
pub fn randomized_flat_sample_bound(k: u64, epsilon_inv: u64, n: u64, sigma: f64) -> Result<f64> {
    let ratio = check_parameters(k, epsilon_inv, n, 2)?;
    let draws = libm::ceil(21.0 * libm::log(n as f64 / (1.0 - sigma)));
    let kl = (ratio * floor_log(ratio, n) as u64) as f64;
    let y = 15.89 * kl;
    Ok(draws * y * (libm::log(y) + libm::log(libm::log(y))))
}

/// Bound on distinct samples for the deterministic tensor algorithm.
pub fn tensor_sample_bound(k: u64, epsilon_inv: u64, n: u64) -> Result<f64> {
    let ratio = check_parameters(k, epsilon_inv, n, 2)?;
    let kl = (ratio * floor_log(ratio, n) as u64) as f64;
    let x = n as f64 / ratio as f64;
    let lx = libm::log(x);
    let lambda = guarded_ceil(3.0 * lx / libm::log(lx)) as f64;
    let tensor = (lambda + 1.0) * (lambda + 1.0) * libm::log(lambda + 1.0) + 4.0 / 3.0;
    Ok(19.52 * kl * kl * libm::log(5.89 * kl) * tensor)
}
