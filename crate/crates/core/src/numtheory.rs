//! Integer helpers: modular exponentiation, primality, trial-division
//! factorization and multiplicative orders. All values fit in `u64`.

use serde::{Deserialize, Serialize};

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `base^exp mod m`; by convention everything is `0` modulo `1`.
pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    let mut b = base % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for the full `u64` range.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &SMALL {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime-power decomposition of a positive integer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    pub n_value: u64,
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn of(n: u64) -> Self {
        assert!(n > 0, "cannot factor zero");
        let mut factors = Vec::new();
        let mut rest = n;
        let mut push = |p: u64, rest: &mut u64| {
            let mut e = 0;
            while *rest % p == 0 {
                *rest /= p;
                e += 1;
            }
            if e > 0 {
                factors.push((p, e));
            }
        };
        push(2, &mut rest);
        let mut p = 3u64;
        while p.saturating_mul(p) <= rest {
            if is_prime(rest) {
                break;
            }
            push(p, &mut rest);
            p += 2;
        }
        if rest > 1 {
            factors.push((rest, 1));
        }
        factors.sort_unstable();
        Factorization { n_value: n, factors }
    }

    pub fn product(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| p.pow(e))
            .product()
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Euler's totient of `n_value`.
    pub fn totient(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| (p - 1) * p.pow(e - 1))
            .product()
    }
}

/// Multiplicative order of `a` modulo `m`, or `None` if `gcd(a, m) != 1`.
/// Modulo 1 every residue has order 1.
pub fn multiplicative_order(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(1);
    }
    if gcd(a % m, m) != 1 {
        return None;
    }
    let phi = Factorization::of(m).totient();
    let mut order = phi;
    for p in Factorization::of(phi).primes() {
        while order % p == 0 && pow_mod(a, order / p, m) == 1 {
            order /= p;
        }
    }
    Some(order)
}
