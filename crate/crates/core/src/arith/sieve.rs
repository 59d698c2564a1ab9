use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// von Mangoldt table on [2, limit], keeping the (p, k) structure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimePowerTable {
    limit: u64,
    /// base prime of m if m = p^k, else 0
    base: Vec<u32>,
    exponent: Vec<u8>,
    /// log p, filled once per prime and shared by its powers
    lambda: Vec<f64>,
}

/// Linear sieve for the von Mangoldt function on [2, limit].
pub fn lambda_sieve(limit: u64) -> Result<PrimePowerTable> {
    if limit < 2 {
        return Err(Error::InvalidConfig(format!("sieve limit {limit} must be >= 2")));
    }
    if limit > u32::MAX as u64 {
        return Err(Error::InvalidConfig(format!("sieve limit {limit} too large")));
    }
    let len = limit as usize + 1;
    let mut spf = vec![0u32; len];
    let mut primes: Vec<u32> = Vec::new();
    for i in 2..len {
        if spf[i] == 0 {
            spf[i] = i as u32;
            primes.push(i as u32);
        }
        let si = spf[i];
        for &p in &primes {
            let q = i * p as usize;
            if p > si || q >= len {
                break;
            }
            spf[q] = p;
        }
    }
    let mut base = vec![0u32; len];
    let mut exponent = vec![0u8; len];
    let mut lambda = vec![0.0f64; len];
    for m in 2..len {
        let p = spf[m] as usize;
        if p == m {
            base[m] = p as u32;
            exponent[m] = 1;
            lambda[m] = (p as f64).ln();
        } else {
            let r = m / p;
            if base[r] as usize == p {
                base[m] = p as u32;
                exponent[m] = exponent[r] + 1;
                lambda[m] = lambda[p];
            }
        }
    }
    Ok(PrimePowerTable { limit, base, exponent, lambda })
}

impl PrimePowerTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Lambda(m); 0 outside [2, limit] or off prime powers.
    pub fn lambda(&self, m: u64) -> f64 {
        if m < 2 || m > self.limit {
            0.0
        } else {
            self.lambda[m as usize]
        }
    }

    /// (p, k) with m = p^k.
    pub fn prime_power(&self, m: u64) -> Option<(u64, u32)> {
        if m < 2 || m > self.limit || self.base[m as usize] == 0 {
            None
        } else {
            Some((self.base[m as usize] as u64, self.exponent[m as usize] as u32))
        }
    }

    /// Primes up to the limit, ascending.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        (2..=self.limit).filter(|&m| self.exponent[m as usize] == 1)
    }
}
