//! Rational interval arithmetic for certifying real-valued bounds.
//!
//! Only non-negative intervals are needed. Endpoints are kept as exact
//! rationals and rounded outward to a fixed number of decimal digits after
//! every operation so their size stays bounded.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Decimal digits kept by outward rounding.
pub const DIGITS: u32 = 60;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: BigRational,
    pub hi: BigRational,
}

fn scale() -> BigInt {
    BigInt::from(10u32).pow(DIGITS)
}

fn round_down(x: &BigRational) -> BigRational {
    let s = scale();
    let n = (x.numer() * &s).div_floor(x.denom());
    BigRational::new(n, s)
}

fn round_up(x: &BigRational) -> BigRational {
    let s = scale();
    let n = (x.numer() * &s).div_ceil(x.denom());
    BigRational::new(n, s)
}

impl Interval {
    pub fn point(x: BigRational) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn int(n: i64) -> Self {
        Interval::point(BigRational::from_integer(n.into()))
    }

    fn new(lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(lo <= hi);
        debug_assert!(!lo.is_negative());
        Interval {
            lo: round_down(&lo),
            hi: round_up(&hi),
        }
    }

    pub fn add(&self, o: &Interval) -> Interval {
        Interval::new(&self.lo + &o.lo, &self.hi + &o.hi)
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        Interval::new(&self.lo * &o.lo, &self.hi * &o.hi)
    }

    /// Requires `o.lo > 0`.
    pub fn div(&self, o: &Interval) -> Interval {
        assert!(o.lo.is_positive(), "division by an interval touching zero");
        Interval::new(&self.lo / &o.hi, &self.hi / &o.lo)
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }
}

/// `atanh(z) = Σ z^(2j+1)/(2j+1)` for rational `0 <= z <= 1/3`, enclosed
/// by the partial sum and the geometric tail bound
/// `z^(2N+3) / ((2N+3)(1 - z²))`.
fn atanh(z: &BigRational) -> Interval {
    assert!(!z.is_negative() && z * BigRational::from_integer(3.into()) <= BigRational::one());
    if z.is_zero() {
        return Interval::int(0);
    }
    let eps = BigRational::new(BigInt::one(), scale() * BigInt::from(1000u32));
    let z2 = z * z;
    let one_minus = BigRational::one() - &z2;
    let mut power = z.clone();
    let mut sum = BigRational::zero();
    let mut k = 1u64;
    loop {
        sum += &power / BigRational::from_integer(k.into());
        power *= &z2;
        k += 2;
        let tail = &power / (BigRational::from_integer(k.into()) * &one_minus);
        if tail < eps {
            return Interval::new(sum.clone(), sum + tail);
        }
    }
}

/// Enclosure of `ln 2 = 2 atanh(1/3)`.
pub fn ln2() -> Interval {
    let a = atanh(&BigRational::new(1.into(), 3.into()));
    a.add(&a)
}

/// Enclosure of `ln x` for an integer `x >= 1`: write `x = 2^e·m` with
/// `1 <= m < 2`, so `ln x = e ln 2 + 2 atanh((m-1)/(m+1))`.
pub fn ln_int(x: u64) -> Interval {
    assert!(x >= 1);
    let e = 63 - x.leading_zeros();
    let m = BigRational::new(x.into(), BigInt::one() << e as usize);
    let z = (&m - BigRational::one()) / (&m + BigRational::one());
    let a = atanh(&z);
    Interval::int(e as i64).mul(&ln2()).add(&a.add(&a))
}

/// Enclosure of `log2 x` for an integer `x >= 1`.
pub fn log2_int(x: u64) -> Interval {
    if x.is_power_of_two() {
        return Interval::int(x.trailing_zeros() as i64);
    }
    ln_int(x).div(&ln2())
}
