//! Closed-form bounds on zero-sum invariants and the constants behind them.
//!
//! Integer bounds are exact. Real-valued bounds are evaluated in `f64` and
//! nudged up by one ulp after each rounding step, so they stay valid upper
//! bounds; [`alon_dubiner_c_enclosure`] gives a certified rational
//! enclosure when that is not enough.

mod derive;
pub mod interval;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupDescriptor;
use crate::primes::omega;
use interval::Interval;

pub use derive::{check_derivation, derive_a3, large_requirement, A3Derivation, DeriveOptions, SPLIT_SEARCH_CAP};

/// Best proven constant `a_3` with `η(C_n^3) <= a_3(n-1) + 1`.
pub const PROVEN_A3: u64 = 20369;
/// Value of `a_3` expected if `η(C_n^3) = 8n - 7` holds for every `n`.
pub const CONJECTURAL_A3: u64 = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundValue {
    Integer(u128),
    /// A real number; `rounded_up` when the stored `f64` was rounded
    /// towards `+∞`.
    Real { value: f64, rounded_up: bool },
}

impl BoundValue {
    pub fn as_f64(&self) -> f64 {
        match self {
            BoundValue::Integer(n) => *n as f64,
            BoundValue::Real { value, .. } => *value,
        }
    }
}

impl fmt::Display for BoundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundValue::Integer(n) => write!(f, "{n}"),
            BoundValue::Real { value, .. } => write!(f, "{value:.6}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub inputs: BTreeMap<String, String>,
    pub value: BoundValue,
    pub exact: bool,
    /// The formula evaluated, in plain text.
    pub formula_ref: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl BoundReport {
    fn new(name: &str, value: BoundValue, formula: &str) -> Self {
        let exact = matches!(value, BoundValue::Integer(_));
        BoundReport {
            name: name.to_string(),
            inputs: BTreeMap::new(),
            value,
            exact,
            formula_ref: formula.to_string(),
            note: None,
        }
    }

    fn input(mut self, key: &str, value: impl ToString) -> Self {
        self.inputs.insert(key.to_string(), value.to_string());
        self
    }

    fn with_note(mut self, note: &str) -> Self {
        self.note = Some(note.to_string());
        self
    }
}

/// Parses a plain decimal such as `20233.005` into an exact rational.
pub fn parse_decimal(s: &str) -> Result<BigRational> {
    let bad = || Error::invalid(format!("not a decimal number: {s:?}"));
    let t = s.trim();
    let (neg, t) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let (int, frac) = t.split_once('.').unwrap_or((t, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let numer: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| bad())? };
    let denom = BigInt::from(10u32).pow(frac.len() as u32);
    let x = BigRational::new(numer, denom);
    Ok(if neg { -x } else { x })
}

fn up(x: f64) -> f64 {
    x.next_up()
}

/// `a·b` rounded towards `+∞`; exact products are left alone.
fn mul_up(a: f64, b: f64) -> f64 {
    let p = a * b;
    if a.mul_add(b, -p) > 0.0 {
        p.next_up()
    } else {
        p
    }
}

/// `a + b` rounded towards `+∞`, using the exact rounding error of the sum.
fn add_up(a: f64, b: f64) -> f64 {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    if err > 0.0 {
        s.next_up()
    } else {
        s
    }
}

/// `D*(G) = 1 + Σ (n_i - 1)`.
pub fn d_star(group: &GroupDescriptor) -> u128 {
    1 + group.factors().iter().map(|&n| n - 1).sum::<u128>()
}

/// `exp(G)·(1 + ln(|G|/exp(G)))`, an upper bound for `D(G)`, rounded up.
pub fn log_upper_bound(group: &GroupDescriptor) -> Result<f64> {
    if group.is_trivial() {
        return Err(Error::invalid("the logarithmic bound needs a non-trivial group"));
    }
    let exp = group.exponent();
    let ratio = group.order() / exp;
    if ratio == 1 {
        return Ok(exp as f64);
    }
    let l = add_up(up((ratio as f64).ln()), 1.0);
    Ok(mul_up(l, exp as f64))
}

/// `c(r) = 256 r (log2 r + 5) c(r-1) + (r + 1)` with `c(1) = 2`; entries of
/// `overrides` replace `c(k)` before later terms use it.
pub fn alon_dubiner_c(r: u32, overrides: &BTreeMap<u32, f64>) -> Result<f64> {
    check_overrides(r, overrides.keys())?;
    let mut c = 2.0f64;
    for k in 1..=r {
        if k > 1 {
            let kf = k as f64;
            let log = if k.is_power_of_two() { k.trailing_zeros() as f64 } else { up(kf.log2()) };
            let factor = mul_up(mul_up(256.0, kf), add_up(log, 5.0));
            c = add_up(mul_up(factor, c), kf + 1.0);
        }
        if let Some(&v) = overrides.get(&k) {
            c = v;
        }
    }
    Ok(c)
}

/// Rational enclosure of the same recursion, with `log2` enclosed to about
/// sixty digits.
pub fn alon_dubiner_c_enclosure(r: u32, overrides: &BTreeMap<u32, BigRational>) -> Result<Interval> {
    check_overrides(r, overrides.keys())?;
    let mut c = Interval::int(2);
    for k in 1..=r {
        if k > 1 {
            let factor = Interval::int(256 * k as i64).mul(&interval::log2_int(k as u64).add(&Interval::int(5)));
            c = factor.mul(&c).add(&Interval::int(k as i64 + 1));
        }
        if let Some(v) = overrides.get(&k) {
            c = Interval::point(v.clone());
        }
    }
    Ok(c)
}

fn check_overrides<'a>(r: u32, keys: impl Iterator<Item = &'a u32>) -> Result<()> {
    if r == 0 {
        return Err(Error::invalid("c(r) is defined for r >= 1"));
    }
    for &k in keys {
        if k == 0 || k > r {
            return Err(Error::invalid(format!("override index {k} outside 1..={r}")));
        }
    }
    Ok(())
}

/// `|G| + exp(G) - 1`, an upper bound for `s(G)`.
pub fn gao_yang_s_bound(group: &GroupDescriptor) -> u128 {
    group.order() + group.exponent() - 1
}

/// `Σ_{i=1}^{r} (b_{r+1-i} - b_{r-i}) n_i - b_r + 1` with `b_0 = 0`. Valid
/// as an upper bound for `s(G)` when each `s(C_p^i) <= b_i(p-1) + 1` for
/// every prime `p` dividing the exponent; that hypothesis is not checked.
pub fn eegkr_s_bound(group: &GroupDescriptor, b: &[u128]) -> Result<u128> {
    let n = group.factors();
    let r = n.len();
    if b.len() != r {
        return Err(Error::invalid(format!(
            "need {r} coefficients for a rank {r} group, got {}",
            b.len()
        )));
    }
    if r == 0 {
        return Ok(1);
    }
    let coef = |i: usize| -> i128 { if i == 0 { 0 } else { b[i - 1] as i128 } };
    let mut total: i128 = 0;
    for i in 1..=r {
        let d = coef(r + 1 - i) - coef(r - i);
        total = d
            .checked_mul(n[i - 1] as i128)
            .and_then(|x| total.checked_add(x))
            .ok_or_else(|| Error::invalid("bound overflows"))?;
    }
    let v = total - coef(r) + 1;
    u128::try_from(v).map_err(|_| Error::invalid(format!("coefficients {b:?} give a negative bound")))
}

fn check_chain(n: &[u128]) -> Result<()> {
    if n[0] <= 1 {
        return Err(Error::invalid(format!("n1 must exceed 1, got {}", n[0])));
    }
    for w in n.windows(2) {
        if w[1] % w[0] != 0 {
            return Err(Error::invalid(format!("{} does not divide {}", w[0], w[1])));
        }
    }
    Ok(())
}

/// The rank-3 bound, via `D(G) <= D_{D(H)}(G/H)` with
/// `H = C_{n2/n1} ⊕ C_{n3/n1}` and `G/H = C_{n1}^3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MainBound {
    pub value: u128,
    /// `D(H) = n2/n1 + n3/n1 - 1`.
    pub d_h: u128,
    pub a3: u128,
}

pub fn main_bound(n1: u128, n2: u128, n3: u128, a3: u128) -> Result<MainBound> {
    check_chain(&[n1, n2, n3])?;
    let overflow = || Error::invalid("bound overflows");
    let (k2, k3) = (n2 / n1, n3 / n1);
    let d_h = k2 + k3 - 1;
    // D_k(C_n1^3) <= n1(k-1) + η(C_n1^3) <= n1(k-1) + a3(n1-1) + 1
    let value = n1
        .checked_mul(k2 + k3 - 2)
        .and_then(|x| x.checked_add(a3.checked_mul(n1 - 1)?))
        .and_then(|x| x.checked_add(1))
        .ok_or_else(overflow)?;
    let second = main_bound_direct(n1, n2, n3, a3).ok_or_else(overflow)?;
    assert_eq!(value, second, "the two forms of the rank-3 bound disagree");
    Ok(MainBound { value, d_h, a3 })
}

/// `(n1-1) + (n2-1) + (n3-1) + 1 + (a3-3)(n1-1)`, written without
/// subtracting below zero.
pub fn main_bound_direct(n1: u128, n2: u128, n3: u128, a3: u128) -> Option<u128> {
    let base = (n1 - 1).checked_add(n2 - 1)?.checked_add(n3 - 1)?.checked_add(1)?;
    if a3 >= 3 {
        base.checked_add((a3 - 3).checked_mul(n1 - 1)?)
    } else {
        base.checked_sub((3 - a3) * (n1 - 1))
    }
}

/// Smallest real `n3` past which the rank-3 bound with `a3` beats the
/// logarithmic bound on `C_{n1} ⊕ C_{n2} ⊕ C_{n3}`:
/// `((a3-2)(n1-1) + n2 - 1) / (ln n1 + ln n2)`.
pub fn crossover_threshold_with(n1: u128, n2: u128, a3: u128) -> Result<f64> {
    if n1 <= 1 {
        return Err(Error::invalid(format!("n1 must exceed 1, got {n1}")));
    }
    if n2 % n1 != 0 {
        return Err(Error::invalid(format!("{n1} does not divide {n2}")));
    }
    if a3 < 2 {
        return Err(Error::invalid("a3 must be at least 2"));
    }
    let num = ((a3 - 2) * (n1 - 1) + n2 - 1) as f64;
    let den = (n1 as f64).ln() + (n2 as f64).ln();
    Ok(up(num / den.next_down()))
}

pub fn crossover_threshold(n1: u128, n2: u128) -> Result<f64> {
    crossover_threshold_with(n1, n2, PROVEN_A3 as u128)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub rank3_bound: u128,
    pub log_bound: f64,
    /// The rank-3 bound is strictly smaller.
    pub rank3_wins: bool,
}

pub fn compare_with_log_bound(n1: u128, n2: u128, n3: u128, a3: u128) -> Result<Comparison> {
    let m = main_bound(n1, n2, n3, a3)?;
    let g = GroupDescriptor::new(vec![n1, n2, n3])?;
    let log_bound = log_upper_bound(&g)?;
    Ok(Comparison {
        rank3_bound: m.value,
        log_bound,
        rank3_wins: (m.value as f64) < log_bound,
    })
}

/// `min(a3, 3^ω(n))·(n-1) + 1`, an upper bound for `D(C_n^3)`.
pub fn corollary_bound_with(n: u128, a3: u128) -> Result<u128> {
    if n < 2 {
        return Err(Error::invalid(format!("n must be at least 2, got {n}")));
    }
    let w = omega(n);
    let three_pow = 3u128.checked_pow(w).unwrap_or(u128::MAX);
    a3.min(three_pow)
        .checked_mul(n - 1)
        .and_then(|x| x.checked_add(1))
        .ok_or_else(|| Error::invalid("bound overflows"))
}

pub fn corollary_bound(n: u128) -> Result<u128> {
    corollary_bound_with(n, PROVEN_A3 as u128)
}

/// `[D*, D* + 5(n1-1)]`, the conjectured range of `D(G)` in rank 3.
pub fn conjecture_window(n1: u128, n2: u128, n3: u128) -> Result<(u128, u128)> {
    check_chain(&[n1, n2, n3])?;
    let lo = n1 + n2 + n3 - 2;
    Ok((lo, lo + 5 * (n1 - 1)))
}

/// `2^r - 1`, the smallest value the best constant `a_r` could take.
pub fn a_r_lower_bound(r: u32) -> u128 {
    (1u128 << r) - 1
}

/// Certifies `c(3) < limit` for `c(2) = 4` using the rational enclosure.
pub fn certify_c3_below(limit: &BigRational) -> Result<bool> {
    let mut ov = BTreeMap::new();
    ov.insert(2, BigRational::from_integer(4.into()));
    Ok(&alon_dubiner_c_enclosure(3, &ov)?.hi < limit)
}

/// Every bound that applies to `group`, for side-by-side display.
pub fn applicable_bounds(group: &GroupDescriptor, a3: u64, a3_conjectural: bool) -> Vec<BoundReport> {
    let lit = group.to_string();
    let mut out = vec![BoundReport::new("D*", BoundValue::Integer(d_star(group)), "1 + sum(n_i - 1)")
        .input("group", &lit)
        .with_note("lower bound for D(G)")];
    if let Ok(v) = log_upper_bound(group) {
        out.push(
            BoundReport::new(
                "log-bound",
                BoundValue::Real {
                    value: v,
                    rounded_up: true,
                },
                "exp(G)(1 + ln(|G|/exp(G)))",
            )
            .input("group", &lit)
            .with_note("upper bound for D(G); natural logarithm"),
        );
    }
    if !group.is_trivial() {
        out.push(
            BoundReport::new("gao-yang-s", BoundValue::Integer(gao_yang_s_bound(group)), "|G| + exp(G) - 1")
                .input("group", &lit)
                .with_note("upper bound for s(G)"),
        );
    }
    let n = group.factors();
    let conj_note = if a3_conjectural {
        "upper bound for D(G); a3 is CONJECTURAL"
    } else {
        "upper bound for D(G)"
    };
    if n.len() == 3 {
        if let Ok(m) = main_bound(n[0], n[1], n[2], a3 as u128) {
            out.push(
                BoundReport::new(
                    "rank3",
                    BoundValue::Integer(m.value),
                    "(n1-1)+(n2-1)+(n3-1)+1+(a3-3)(n1-1)",
                )
                .input("group", &lit)
                .input("a3", a3)
                .input("D(H)", m.d_h)
                .with_note(conj_note),
            );
        }
        if let Ok((lo, hi)) = conjecture_window(n[0], n[1], n[2]) {
            out.push(
                BoundReport::new("conjectured-upper", BoundValue::Integer(hi), "D* + 5(n1-1)")
                    .input("group", &lit)
                    .input("D*", lo)
                    .with_note("conjectured, not proven"),
            );
        }
        if n[0] == n[2] {
            if let Ok(v) = corollary_bound_with(n[0], a3 as u128) {
                out.push(
                    BoundReport::new("rank3-elementary", BoundValue::Integer(v), "min(a3, 3^omega(n))(n-1)+1")
                        .input("n", n[0])
                        .input("a3", a3)
                        .with_note(conj_note),
                );
            }
        }
    }
    out
}
