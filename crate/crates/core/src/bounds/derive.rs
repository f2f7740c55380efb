//! Turning a constant `c3` with `s(C_p^3) <= c3·p` for large primes into an
//! integer `b` with `s(C_n^3) <= b(n-1) + 1` for every `n`.
//!
//! Primes are split at some prime `t`. Below `t` the bound
//! `s(C_p^3) <= p^3 + p - 1` is used, and `p^3 + p - 2 = (p-1)(p^2+p+2)`
//! makes the requirement exactly `b >= p^2 + p + 2`. From `t` on,
//! `c3·p < b(p-1) + 1` is needed, i.e. `b > c3 + (c3-1)/(p-1)`, which is
//! tightest at `p = t`. The small-prime requirement grows with `t` while
//! the large-prime one shrinks, so the scan stops once the former alone
//! exceeds the best `b` found. All arithmetic is exact.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primes::next_prime;

/// Primes beyond this are not scanned.
pub const SPLIT_SEARCH_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct A3Derivation {
    /// `b` with `s(C_n^3) <= b(n-1) + 1`.
    pub s_coeff: u64,
    /// `b - 1`, giving `η(C_n^3) <= (b-1)(n-1) + 1`.
    pub eta_coeff: u64,
    /// First prime handled by the `c3` bound.
    pub split_prime: u64,
    /// Largest prime handled by the cubic bound; `None` when the split is
    /// at 2.
    pub last_small_prime: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DeriveOptions {
    /// Evaluate only the split at this prime.
    pub force_split: Option<u64>,
}

/// Smallest integer `b` with `b >= p^2 + p + 2`.
fn small_requirement(p: u64) -> u64 {
    p * p + p + 2
}

/// Smallest integer `b` with `c3·t < b(t-1) + 1`.
pub fn large_requirement(c3: &BigRational, t: u64) -> u64 {
    let t_r = BigRational::from_integer(t.into());
    let x = (c3 * &t_r - BigRational::one()) / (t_r - BigRational::one());
    let f: BigInt = x.numer().div_floor(x.denom());
    (f + 1u32).to_u64().expect("requirement fits in u64")
}

pub fn derive_a3(c3: &BigRational, options: &DeriveOptions) -> Result<A3Derivation> {
    if c3 <= &BigRational::from_integer(3.into()) {
        return Err(Error::invalid(format!("c3 must exceed 3, got {c3}")));
    }
    if let Some(t) = options.force_split {
        if !crate::primes::is_prime(t) {
            return Err(Error::invalid(format!("forced split {t} is not prime")));
        }
        let last_small = (t > 2).then(|| prev_prime(t));
        let small = last_small.map_or(0, small_requirement);
        let s_coeff = small.max(large_requirement(c3, t));
        return Ok(A3Derivation {
            s_coeff,
            eta_coeff: s_coeff - 1,
            split_prime: t,
            last_small_prime: last_small,
        });
    }
    let mut best: Option<A3Derivation> = None;
    let mut last_small: Option<u64> = None;
    let mut t = 2;
    loop {
        let small = last_small.map_or(0, small_requirement);
        if let Some(b) = &best {
            if small >= b.s_coeff {
                return Ok(best.expect("checked"));
            }
        }
        if t > SPLIT_SEARCH_CAP {
            return Err(Error::DerivationFailed(format!(
                "no optimal split found among primes up to {SPLIT_SEARCH_CAP}"
            )));
        }
        let b = small.max(large_requirement(c3, t));
        // strict: ties keep the smaller split
        if best.as_ref().is_none_or(|cur| b < cur.s_coeff) {
            best = Some(A3Derivation {
                s_coeff: b,
                eta_coeff: b - 1,
                split_prime: t,
                last_small_prime: last_small,
            });
        }
        last_small = Some(t);
        t = next_prime(t);
    }
}

fn prev_prime(t: u64) -> u64 {
    (2..t).rev().find(|&q| crate::primes::is_prime(q)).expect("t > 2")
}

/// Checks both defining inequalities for every prime `p <= limit`:
/// `p^3 + p - 1 <= b(p-1) + 1` up to the last small prime and
/// `c3·p < b(p-1) + 1` from the split prime on. Returns the first failing
/// prime.
pub fn check_derivation(d: &A3Derivation, c3: &BigRational, limit: u64) -> std::result::Result<(), u64> {
    let b = d.s_coeff as u128;
    for p in crate::primes::primes_up_to(limit) {
        let rhs = b * (p as u128 - 1) + 1;
        if d.last_small_prime.is_some_and(|q| p <= q) {
            let p = p as u128;
            if p * p * p + p - 1 > rhs {
                return Err(p as u64);
            }
        }
        if p >= d.split_prime {
            let lhs = c3 * BigRational::from_integer(p.into());
            if lhs >= BigRational::from_integer(rhs.into()) {
                return Err(p);
            }
        }
    }
    Ok(())
}
