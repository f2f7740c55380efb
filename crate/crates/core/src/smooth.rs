//! Finding products of smooth integers that are perfect `n`-th powers.
//!
//! An integer smooth over a base of `r` primes maps to its exponent vector
//! reduced mod `n`, an element of `C_n^r`. A product is an `n`-th power
//! exactly when the corresponding elements sum to zero, so any `D(C_n^r)`
//! smooth integers contain such a product.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::bounds::{corollary_bound, log_upper_bound, BoundReport, BoundValue};
use crate::error::{Error, Result};
use crate::group::{GroupDescriptor, ZSequence};
use crate::primes::is_prime;
use crate::reach::{find_shortest_zero_sum, find_zero_sum};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorBase {
    primes: Vec<u64>,
}

impl FactorBase {
    /// Primes must be strictly increasing.
    pub fn new(primes: Vec<u64>) -> Result<Self> {
        if primes.is_empty() {
            return Err(Error::invalid("factor base is empty"));
        }
        for &p in &primes {
            if !is_prime(p) {
                return Err(Error::invalid(format!("{p} is not prime")));
            }
        }
        if primes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("factor base must be strictly increasing"));
        }
        Ok(FactorBase { primes })
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }
}

impl std::str::FromStr for FactorBase {
    type Err = Error;

    /// Comma-separated primes, e.g. `2,3,5`.
    fn from_str(s: &str) -> Result<Self> {
        let primes = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::invalid(format!("bad prime {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        FactorBase::new(primes)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmoothRelation {
    pub value: BigUint,
    pub exponents: Vec<u64>,
    /// `exponents` reduced mod `n`.
    pub residues: Vec<u64>,
}

impl SmoothRelation {
    pub fn new(value: BigUint, base: &FactorBase, n: u64) -> Result<Option<Self>> {
        let Some(exponents) = factor_over_base(&value, base)? else {
            return Ok(None);
        };
        let residues = exponents.iter().map(|e| e % n).collect();
        Ok(Some(SmoothRelation {
            value,
            exponents,
            residues,
        }))
    }
}

/// Exponent vector of `x` over `base`, or `None` if `x` has another prime
/// factor.
pub fn factor_over_base(x: &BigUint, base: &FactorBase) -> Result<Option<Vec<u64>>> {
    if x.is_zero() {
        return Err(Error::invalid("0 has no factorization"));
    }
    let mut rest = x.clone();
    let mut exps = Vec::with_capacity(base.len());
    for &p in base.primes() {
        let p = BigUint::from(p);
        let mut e = 0;
        loop {
            let (q, r) = rest.div_rem(&p);
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        exps.push(e);
    }
    Ok(rest.is_one().then_some(exps))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerProduct {
    /// Ascending indices into the input list.
    pub indices: Vec<usize>,
    pub product: BigUint,
    /// `root^n == product`.
    pub root: BigUint,
}

/// A non-empty set of inputs whose product is a perfect `n`-th power, if
/// one exists. With `minimal`, the set has the fewest possible elements.
pub fn find_power_product(xs: &[BigUint], base: &FactorBase, n: u64, minimal: bool) -> Result<Option<PowerProduct>> {
    if n < 2 {
        return Err(Error::invalid(format!("n must be at least 2, got {n}")));
    }
    let mut relations = Vec::with_capacity(xs.len());
    for (i, x) in xs.iter().enumerate() {
        match SmoothRelation::new(x.clone(), base, n)? {
            Some(rel) => relations.push(rel),
            None => {
                return Err(Error::NotSmooth {
                    index: i,
                    value: x.to_string(),
                })
            }
        }
    }
    if xs.is_empty() {
        return Ok(None);
    }
    let group = GroupDescriptor::elementary(n as u128, base.len())?;
    let seq = relations
        .iter()
        .map(|rel| {
            let coords: Vec<i128> = rel.residues.iter().map(|&e| e as i128).collect();
            group.element(&coords)
        })
        .collect::<Result<ZSequence>>()?;
    let found = if minimal {
        find_shortest_zero_sum(&seq, &group)?
    } else {
        find_zero_sum(&seq, &group, (1, seq.len()))?
    };
    let Some(indices) = found else {
        return Ok(None);
    };
    let mut totals = vec![0u64; base.len()];
    let mut product = BigUint::one();
    for &i in &indices {
        product *= &relations[i].value;
        for (t, e) in totals.iter_mut().zip(&relations[i].exponents) {
            *t += e;
        }
    }
    let mut root = BigUint::one();
    for (&p, &e) in base.primes().iter().zip(&totals) {
        assert_eq!(e % n, 0, "zero-sum witness must give exponents divisible by n");
        root *= BigUint::from(p).pow((e / n) as u32);
    }
    assert_eq!(root.pow(n as u32), product, "root does not reproduce the product");
    Ok(Some(PowerProduct { indices, product, root }))
}

/// `true` if `x` is a perfect `n`-th power, checked by exact root
/// extraction.
pub fn is_perfect_power(x: &BigUint, n: u32) -> bool {
    let r = x.nth_root(n);
    &r.pow(n) == x
}

/// How many `r`-smooth integers guarantee an `n`-th power product, i.e. a
/// bound on `D(C_n^r)`: exact for `r <= 2`, the rank-3 corollary for
/// `r = 3`, the logarithmic bound beyond.
pub fn guarantee_length(n: u64, r: usize) -> Result<BoundReport> {
    if n < 2 {
        return Err(Error::invalid(format!("n must be at least 2, got {n}")));
    }
    if r == 0 {
        return Err(Error::invalid("the factor base must have at least one prime"));
    }
    let n128 = n as u128;
    let (value, formula, note) = match r {
        1 => (BoundValue::Integer(n128), "n", "exact: D(C_n)"),
        2 => (BoundValue::Integer(2 * n128 - 1), "2n - 1", "exact: D(C_n^2)"),
        3 => (
            BoundValue::Integer(corollary_bound(n128)?),
            "min(20369, 3^omega(n))(n-1)+1",
            "upper bound for D(C_n^3)",
        ),
        _ => {
            let g = GroupDescriptor::elementary(n128, r)?;
            (
                BoundValue::Real {
                    value: log_upper_bound(&g)?,
                    rounded_up: true,
                },
                "exp(G)(1 + ln(|G|/exp(G)))",
                "upper bound for D(C_n^r)",
            )
        }
    };
    let exact = matches!(value, BoundValue::Integer(_));
    Ok(BoundReport {
        name: "smooth-guarantee".to_string(),
        inputs: [("n".to_string(), n.to_string()), ("r".to_string(), r.to_string())].into(),
        value,
        exact,
        formula_ref: formula.to_string(),
        note: Some(note.to_string()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(s: &str) -> FactorBase {
        s.parse().unwrap()
    }

    fn nums(xs: &[u64]) -> Vec<BigUint> {
        xs.iter().map(|&x| BigUint::from(x)).collect()
    }

    #[test]
    fn factoring_examples() {
        let b = base("2,3");
        assert_eq!(factor_over_base(&BigUint::from(72u32), &b).unwrap(), Some(vec![3, 2]));
        assert_eq!(factor_over_base(&BigUint::from(10u32), &b).unwrap(), None);
        assert_eq!(factor_over_base(&BigUint::from(1u32), &b).unwrap(), Some(vec![0, 0]));
        assert!(factor_over_base(&BigUint::zero(), &b).is_err());
    }

    #[test]
    fn factor_base_validation() {
        assert!("2,3,5".parse::<FactorBase>().is_ok());
        assert!("2,4".parse::<FactorBase>().is_err());
        assert!("3,2".parse::<FactorBase>().is_err());
        assert!("2,2".parse::<FactorBase>().is_err());
        assert!("".parse::<FactorBase>().is_err());
    }

    #[test]
    fn power_product_examples() {
        let r = find_power_product(&nums(&[6, 6]), &base("2,3"), 2, false).unwrap().unwrap();
        assert_eq!(r.indices, vec![0, 1]);
        assert_eq!(r.product, BigUint::from(36u32));
        assert_eq!(r.root, BigUint::from(6u32));

        let r = find_power_product(&nums(&[2, 3, 6]), &base("2,3"), 2, false).unwrap().unwrap();
        assert_eq!(r.indices, vec![0, 1, 2]);
        assert_eq!(r.product, BigUint::from(36u32));

        assert_eq!(find_power_product(&nums(&[2, 3, 5]), &base("2,3,5"), 2, false).unwrap(), None);
    }

    #[test]
    fn minimal_witness() {
        // 2·3·6 = 36 and 4 alone is a square
        let r = find_power_product(&nums(&[2, 3, 6, 4]), &base("2,3"), 2, true).unwrap().unwrap();
        assert_eq!(r.indices, vec![3]);
    }

    #[test]
    fn power_product_errors() {
        match find_power_product(&nums(&[2, 7]), &base("2,3"), 2, false) {
            Err(Error::NotSmooth { index, .. }) => assert_eq!(index, 1),
            other => panic!("{other:?}"),
        }
        assert!(find_power_product(&nums(&[2]), &base("2"), 1, false).is_err());
    }

    #[test]
    fn cubes() {
        let r = find_power_product(&nums(&[2, 4, 3]), &base("2,3"), 3, false).unwrap().unwrap();
        assert_eq!(r.indices, vec![0, 1]);
        assert_eq!(r.root, BigUint::from(2u32));
        assert!(is_perfect_power(&r.product, 3));
    }

    #[test]
    fn guarantee_examples() {
        assert_eq!(guarantee_length(2, 3).unwrap().value, BoundValue::Integer(4));
        assert_eq!(guarantee_length(2, 1).unwrap().value, BoundValue::Integer(2));
        assert_eq!(guarantee_length(6, 3).unwrap().value, BoundValue::Integer(46));
        assert_eq!(guarantee_length(5, 2).unwrap().value, BoundValue::Integer(9));
        assert!(!guarantee_length(2, 4).unwrap().exact);
    }
}
