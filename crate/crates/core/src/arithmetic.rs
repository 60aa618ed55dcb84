//! Prime generation, the von Mangoldt function, modular arithmetic, and
//! compensated floating-point accumulation.
//!
//! Everything downstream indexes its sums by prime powers, so the sieve is the
//! load-bearing piece: it is segmented (memory O(sqrt(limit) + segment)) and the
//! resulting [`PrimeTable`] is immutable and freely shareable across workers.

use crate::error::{Error, Result};

/// Largest supported sieve limit.
pub const MAX_SIEVE_LIMIT: u64 = 1_000_000_000;

const SEGMENT_SIZE: usize = 1 << 18;

/// Ascending table of all primes up to a fixed limit.
#[derive(Debug, Clone)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeTable {
    /// Sieve all primes `<= limit` with a segmented sieve of Eratosthenes.
    pub fn sieve(limit: u64) -> Result<Self> {
        if limit > MAX_SIEVE_LIMIT {
            return Err(Error::Capacity(format!(
                "sieve limit {limit} exceeds supported maximum {MAX_SIEVE_LIMIT}"
            )));
        }
        if limit < 2 {
            return Ok(Self {
                limit,
                primes: Vec::new(),
            });
        }

        // Base primes up to sqrt(limit), by a plain sieve.
        let root = (limit as f64).sqrt() as u64 + 1;
        let mut base_flags = vec![true; root as usize + 1];
        base_flags[0] = false;
        if root >= 1 {
            base_flags[1] = false;
        }
        let mut i = 2u64;
        while i * i <= root {
            if base_flags[i as usize] {
                let mut j = i * i;
                while j <= root {
                    base_flags[j as usize] = false;
                    j += i;
                }
            }
            i += 1;
        }
        let base: Vec<u64> = (2..=root).filter(|&n| base_flags[n as usize]).collect();

        let estimate = if limit > 100 {
            let x = limit as f64;
            (x / x.ln() * 1.15) as usize
        } else {
            32
        };
        let mut primes = Vec::with_capacity(estimate);
        for &p in &base {
            if p <= limit {
                primes.push(p);
            }
        }

        // Sieve segments [low, high) above the base range.
        let mut flags = vec![true; SEGMENT_SIZE];
        let mut low = root + 1;
        while low <= limit {
            let high = (low + SEGMENT_SIZE as u64 - 1).min(limit);
            let len = (high - low + 1) as usize;
            flags[..len].fill(true);
            for &p in &base {
                if p * p > high {
                    break;
                }
                let mut start = low.div_ceil(p) * p;
                if start < p * p {
                    start = p * p;
                }
                let mut j = start;
                while j <= high {
                    flags[(j - low) as usize] = false;
                    j += p;
                }
            }
            for (off, &is_prime) in flags[..len].iter().enumerate() {
                if is_prime {
                    primes.push(low + off as u64);
                }
            }
            low = high + 1;
        }

        Ok(Self { limit, primes })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn count(&self) -> usize {
        self.primes.len()
    }

    /// Slice of primes `<= x` (x may be below the table limit).
    pub fn upto(&self, x: u64) -> &[u64] {
        let end = self.primes.partition_point(|&p| p <= x);
        &self.primes[..end]
    }

    /// Membership test by binary search.
    pub fn is_prime(&self, n: u64) -> bool {
        n <= self.limit && self.primes.binary_search(&n).is_ok()
    }
}

/// von Mangoldt function: `log p` if `n = p^k` for a prime p and k >= 1, else 0.
pub fn von_mangoldt(n: u64) -> f64 {
    match factor_prime_power(n) {
        Some((p, _)) => (p as f64).ln(),
        None => 0.0,
    }
}

/// Decompose `n` as `p^k` with p prime, k >= 1, or return None.
pub fn factor_prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let p = smallest_prime_factor(n);
    let mut m = n;
    let mut k = 0u32;
    while m.is_multiple_of(p) {
        m /= p;
        k += 1;
    }
    if m == 1 {
        Some((p, k))
    } else {
        None
    }
}

fn smallest_prime_factor(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return d;
        }
        d += 2;
    }
    n
}

/// Primality by trial division; intended for small inputs such as conductors.
pub fn is_prime_u64(n: u64) -> bool {
    n >= 2 && smallest_prime_factor(n) == n
}

pub fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn pow_mod(base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let mut result = 1u128;
    let mut b = (base % modulus) as u128;
    let m = modulus as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    result as u64
}

/// Least k >= 1 with `a^k = 1 (mod m)`; requires gcd(a, m) = 1.
pub fn multiplicative_order(a: i64, m: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::Domain("multiplicative order modulo 0".into()));
    }
    let a = a.rem_euclid(m as i64) as u64;
    if gcd(a, m) != 1 {
        return Err(Error::Domain(format!(
            "multiplicative order of {a} mod {m}: arguments are not coprime"
        )));
    }
    if m == 1 {
        return Ok(1);
    }
    let mut cur = a % m;
    for k in 1..=m {
        if cur == 1 {
            return Ok(k);
        }
        cur = (cur as u128 * a as u128 % m as u128) as u64;
    }
    unreachable!("order of a unit divides phi(m) <= m")
}

/// Neumaier-compensated accumulator: reduction error stays near one ulp of the
/// final sum regardless of term count or ordering.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.comp += (self.sum - t) + value;
        } else {
            self.comp += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Componentwise compensated accumulation of complex terms.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl CompensatedComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: num_complex::Complex64) {
        self.re.add(value.re);
        self.im.add(value.im);
    }

    pub fn value(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.value(), self.im.value())
    }
}
