//! Finite abelian groups in invariant-factor form, their elements, and
//! sequences (multisets) over them.
//!
//! A group is stored as its invariant factors `n_1 | n_2 | ... | n_r`, each
//! at least 2. The empty factor list is the trivial group. Elements are
//! residue vectors with `coords[i]` in `[0, n_i)`, and every element has a
//! mixed-radix rank in `[0, |G|)` with coordinate 0 least significant. The
//! rank order is the fixed total order used by every search in this crate.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u128>", into = "Vec<u128>")]
pub struct GroupDescriptor {
    factors: Vec<u128>,
}

impl GroupDescriptor {
    /// Builds a descriptor from factors that already form a divisibility
    /// chain of integers `>= 2`.
    pub fn new(factors: Vec<u128>) -> Result<Self> {
        if let Some(&bad) = factors.iter().find(|&&n| n < 2) {
            return Err(Error::invalid(format!(
                "invariant factor {bad} must be at least 2"
            )));
        }
        for w in factors.windows(2) {
            if w[1] % w[0] != 0 {
                return Err(Error::invalid(format!(
                    "invariant factors must form a divisibility chain, but {} does not divide {}",
                    w[0], w[1]
                )));
            }
        }
        let g = GroupDescriptor { factors };
        g.checked_order()?;
        Ok(g)
    }

    pub fn trivial() -> Self {
        GroupDescriptor { factors: Vec::new() }
    }

    pub fn cyclic(n: u128) -> Result<Self> {
        canonicalize(&[n as i128])
    }

    /// `C_n^r`.
    pub fn elementary(n: u128, r: usize) -> Result<Self> {
        canonicalize(&vec![n as i128; r])
    }

    pub fn factors(&self) -> &[u128] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn order(&self) -> u128 {
        self.factors.iter().product()
    }

    fn checked_order(&self) -> Result<u128> {
        self.factors
            .iter()
            .try_fold(1u128, |acc, &n| acc.checked_mul(n))
            .ok_or_else(|| Error::invalid("group order does not fit in 128 bits"))
    }

    pub fn exponent(&self) -> u128 {
        self.factors.last().copied().unwrap_or(1)
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            coords: vec![0; self.rank()],
        }
    }

    /// Element with the given coordinates, reduced modulo each factor.
    pub fn element(&self, coords: &[i128]) -> Result<GroupElement> {
        if coords.len() != self.rank() {
            return Err(Error::invalid(format!(
                "element has {} coordinates but the group has rank {}",
                coords.len(),
                self.rank()
            )));
        }
        let coords = coords
            .iter()
            .zip(&self.factors)
            .map(|(&c, &n)| c.rem_euclid(n as i128) as u128)
            .collect();
        Ok(GroupElement { coords })
    }

    /// The `i`-th standard generator (1 in coordinate `i`).
    pub fn basis(&self, i: usize) -> GroupElement {
        let mut coords = vec![0; self.rank()];
        coords[i] = 1;
        GroupElement { coords }
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        g.coords.len() == self.rank() && g.coords.iter().zip(&self.factors).all(|(&c, &n)| c < n)
    }

    pub(crate) fn check(&self, g: &GroupElement) -> Result<()> {
        if self.contains(g) {
            Ok(())
        } else {
            Err(Error::invalid(format!("element {g} does not belong to {self}")))
        }
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let coords = a
            .coords
            .iter()
            .zip(&b.coords)
            .zip(&self.factors)
            .map(|((&x, &y), &n)| add_mod(x, y, n))
            .collect();
        GroupElement { coords }
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        let coords = a
            .coords
            .iter()
            .zip(&self.factors)
            .map(|(&x, &n)| if x == 0 { 0 } else { n - x })
            .collect();
        GroupElement { coords }
    }

    pub fn scale(&self, a: &GroupElement, k: u128) -> GroupElement {
        let coords = a
            .coords
            .iter()
            .zip(&self.factors)
            .map(|(&x, &n)| mul_mod(x, k % n, n))
            .collect();
        GroupElement { coords }
    }

    /// Order of `g` in the group: the lcm of the coordinate orders.
    pub fn element_order(&self, g: &GroupElement) -> u128 {
        g.coords
            .iter()
            .zip(&self.factors)
            .fold(1, |acc, (&c, &n)| acc.lcm(&(n / n.gcd(&c))))
    }

    /// Mixed-radix rank with coordinate 0 least significant.
    pub fn rank_of(&self, g: &GroupElement) -> u128 {
        let mut rank = 0u128;
        for (&c, &n) in g.coords.iter().zip(&self.factors).rev() {
            rank = rank * n + c;
        }
        rank
    }

    pub fn unrank(&self, mut rank: u128) -> GroupElement {
        let coords = self
            .factors
            .iter()
            .map(|&n| {
                let c = rank % n;
                rank /= n;
                c
            })
            .collect();
        GroupElement { coords }
    }

    /// All elements in rank order. Only sensible for small groups.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order()).map(move |r| self.unrank(r))
    }

    /// Subgroups of the form `⊕ (n_i/h_i)·C_{n_i} ≅ ⊕ C_{h_i}` for every
    /// choice of divisors `h_i | n_i`, paired with the corresponding quotient
    /// `⊕ C_{n_i/h_i}`. Both sides are returned canonicalized. The trivial
    /// subgroup and the whole group are included.
    pub fn coordinate_splits(&self) -> Vec<(GroupDescriptor, GroupDescriptor)> {
        let divisor_lists: Vec<Vec<u128>> = self.factors.iter().map(|&n| divisors(n)).collect();
        let mut out = Vec::new();
        let mut choice = vec![0usize; self.rank()];
        loop {
            let sub: Vec<i128> = choice
                .iter()
                .zip(&divisor_lists)
                .map(|(&i, ds)| ds[i] as i128)
                .collect();
            let quo: Vec<i128> = sub
                .iter()
                .zip(&self.factors)
                .map(|(&h, &n)| (n as i128) / h)
                .collect();
            // Factors of a valid group always canonicalize.
            out.push((
                canonicalize(&sub).expect("divisor of a valid factor"),
                canonicalize(&quo).expect("divisor of a valid factor"),
            ));
            // odometer
            let mut i = 0;
            loop {
                if i == choice.len() {
                    out.sort();
                    out.dedup();
                    return out;
                }
                choice[i] += 1;
                if choice[i] < divisor_lists[i].len() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
        }
    }
}

fn divisors(n: u128) -> Vec<u128> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u128;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

fn add_mod(x: u128, y: u128, n: u128) -> u128 {
    let (s, overflow) = x.overflowing_add(y);
    if overflow || s >= n {
        s.wrapping_sub(n)
    } else {
        s
    }
}

fn mul_mod(mut x: u128, mut k: u128, n: u128) -> u128 {
    if let Some(p) = x.checked_mul(k) {
        return p % n;
    }
    let mut acc = 0;
    while k > 0 {
        if k & 1 == 1 {
            acc = add_mod(acc, x, n);
        }
        x = add_mod(x, x, n);
        k >>= 1;
    }
    acc
}

/// Invariant-factor form of `C_{m_1} ⊕ ... ⊕ C_{m_k}`.
///
/// Factors equal to 1 are dropped and pairs are replaced by
/// `(gcd, lcm)` until the divisibility chain holds; the product is unchanged.
pub fn canonicalize(moduli: &[i128]) -> Result<GroupDescriptor> {
    if let Some(&bad) = moduli.iter().find(|&&m| m <= 0) {
        return Err(Error::invalid(format!("modulus {bad} must be positive")));
    }
    let mut f: Vec<u128> = moduli.iter().map(|&m| m as u128).filter(|&m| m > 1).collect();
    f.iter()
        .try_fold(1u128, |acc, &n| acc.checked_mul(n))
        .ok_or_else(|| Error::invalid("group order does not fit in 128 bits"))?;
    // After the inner loop for `i`, f[i] divides every later entry; gcd
    // steps only shrink f[i], so earlier entries keep dividing later ones.
    for i in 0..f.len() {
        for j in i + 1..f.len() {
            let (a, b) = (f[i], f[j]);
            let g = a.gcd(&b);
            f[i] = g;
            f[j] = a / g * b;
        }
    }
    f.retain(|&n| n > 1);
    Ok(GroupDescriptor { factors: f })
}

impl TryFrom<Vec<u128>> for GroupDescriptor {
    type Error = Error;
    fn try_from(v: Vec<u128>) -> Result<Self> {
        GroupDescriptor::new(v)
    }
}

impl From<GroupDescriptor> for Vec<u128> {
    fn from(g: GroupDescriptor) -> Self {
        g.factors
    }
}

/// The group literal: comma-separated invariant factors, `1` for the
/// trivial group.
impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.factors.iter().map(|n| n.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Parses `"n1,n2,...,nr"` and canonicalizes, so `"4,2"` and `"2,4"` give
/// the same group.
impl FromStr for GroupDescriptor {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::invalid("empty group literal"));
        }
        let moduli = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<i128>()
                    .map_err(|_| Error::invalid(format!("bad modulus {:?} in group literal", t.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        canonicalize(&moduli)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement {
    coords: Vec<u128>,
}

impl GroupElement {
    pub fn coords(&self) -> &[u128] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A finite sequence over a group. Order is presentation only; every
/// invariant computed here treats it as a multiset.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ZSequence {
    elements: Vec<GroupElement>,
}

impl ZSequence {
    pub fn new(elements: Vec<GroupElement>) -> Self {
        ZSequence { elements }
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn push(&mut self, g: GroupElement) {
        self.elements.push(g);
    }

    /// Multiplicity of `g`.
    pub fn count(&self, g: &GroupElement) -> usize {
        self.elements.iter().filter(|&e| e == g).count()
    }

    pub fn restrict(&self, indices: &[usize]) -> ZSequence {
        ZSequence {
            elements: indices.iter().map(|&i| self.elements[i].clone()).collect(),
        }
    }

    /// Sequence-file form: one element per line, coordinates comma-separated.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.elements {
            let parts: Vec<String> = e.coords.iter().map(|c| c.to_string()).collect();
            if parts.is_empty() {
                out.push('0');
            } else {
                out.push_str(&parts.join(","));
            }
            out.push('\n');
        }
        out
    }

    /// Parses the sequence-file form. `#` starts a comment; blank lines are
    /// ignored. Over the trivial group each element is written `0`.
    pub fn parse(text: &str, group: &GroupDescriptor) -> Result<Self> {
        let mut elements = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let coords = line
                .split(',')
                .map(|t| {
                    t.trim().parse::<i128>().map_err(|_| {
                        Error::invalid(format!("line {}: bad coordinate {:?}", lineno + 1, t.trim()))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let coords = if group.is_trivial() && coords == [0] { Vec::new() } else { coords };
            let e = group
                .element(&coords)
                .map_err(|e| Error::invalid(format!("line {}: {e}", lineno + 1)))?;
            elements.push(e);
        }
        Ok(ZSequence { elements })
    }
}

impl FromIterator<GroupElement> for ZSequence {
    fn from_iter<I: IntoIterator<Item = GroupElement>>(iter: I) -> Self {
        ZSequence {
            elements: iter.into_iter().collect(),
        }
    }
}

/// `σ(S)`, the coordinatewise modular sum.
pub fn sigma(seq: &ZSequence, group: &GroupDescriptor) -> Result<GroupElement> {
    let mut acc = group.identity();
    for g in seq.elements() {
        group.check(g)?;
        acc = group.add(&acc, g);
    }
    Ok(acc)
}
