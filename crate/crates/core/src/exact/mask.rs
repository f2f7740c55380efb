//! Bit-parallel arithmetic on subsets of a group of order at most 128.
//!
//! A subset is a `u128` indexed by mixed-radix rank. Translating a subset by
//! a group element is a composition of per-coordinate rotations, each of
//! which is two masked shifts.

use crate::error::{Error, Result};
use crate::group::GroupDescriptor;

pub(crate) const MAX_ORDER: u128 = 128;

#[derive(Debug, Clone, Copy)]
struct Rotation {
    stay: u128,
    up: u32,
    down: u32,
}

#[derive(Debug, Clone)]
pub(crate) struct MaskGroup {
    pub order: usize,
    pub exp: usize,
    full: u128,
    rotations: Vec<Vec<Rotation>>,
    /// `neg_mult[y][k]` is the rank of `-k·y`, for `k` in `[0, exp]`.
    neg_mult: Vec<Vec<u8>>,
    pub elem_order: Vec<usize>,
}

impl MaskGroup {
    pub fn new(group: &GroupDescriptor) -> Result<Self> {
        if group.order() > MAX_ORDER {
            return Err(Error::invalid(format!(
                "group {group} has order {} but exact search supports order at most {MAX_ORDER}",
                group.order()
            )));
        }
        let order = group.order() as usize;
        let exp = group.exponent() as usize;
        let full = if order == 128 { u128::MAX } else { (1u128 << order) - 1 };
        let factors: Vec<usize> = group.factors().iter().map(|&n| n as usize).collect();
        let mut strides = Vec::with_capacity(factors.len());
        let mut s = 1usize;
        for &n in &factors {
            strides.push(s);
            s *= n;
        }
        // stay[i][a]: ranks whose coordinate i is below n_i - a
        let mut stay_masks: Vec<Vec<u128>> = factors.iter().map(|&n| vec![0u128; n]).collect();
        for r in 0..order {
            for (i, &n) in factors.iter().enumerate() {
                let c = (r / strides[i]) % n;
                for a in 1..n {
                    if c < n - a {
                        stay_masks[i][a] |= 1u128 << r;
                    }
                }
            }
        }
        let mut rotations = Vec::with_capacity(order);
        let mut neg_mult = Vec::with_capacity(order);
        let mut elem_order = Vec::with_capacity(order);
        for y in 0..order {
            let e = group.unrank(y as u128);
            let rots = e
                .coords()
                .iter()
                .enumerate()
                .filter(|&(_, &a)| a != 0)
                .map(|(i, &a)| {
                    let a = a as usize;
                    Rotation {
                        stay: stay_masks[i][a],
                        up: (a * strides[i]) as u32,
                        down: ((factors[i] - a) * strides[i]) as u32,
                    }
                })
                .collect();
            rotations.push(rots);
            let neg = group.neg(&e);
            neg_mult.push(
                (0..=exp)
                    .map(|k| group.rank_of(&group.scale(&neg, k as u128)) as u8)
                    .collect(),
            );
            elem_order.push(group.element_order(&e) as usize);
        }
        Ok(MaskGroup {
            order,
            exp,
            full,
            rotations,
            neg_mult,
            elem_order,
        })
    }

    /// `{x + y : x ∈ set}`.
    #[inline]
    pub fn translate(&self, mut set: u128, y: usize) -> u128 {
        for r in &self.rotations[y] {
            let stay = set & r.stay;
            let wrap = set & !r.stay & self.full;
            set = (stay << r.up) | (wrap >> r.down);
        }
        set
    }

    #[inline]
    pub fn neg_mult(&self, y: usize, k: usize) -> usize {
        self.neg_mult[y][k] as usize
    }

    #[cfg(test)]
    pub fn full(&self) -> u128 {
        self.full
    }
}

#[inline]
pub(crate) fn has(set: u128, r: usize) -> bool {
    set >> r & 1 == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn translation_matches_group_addition() {
        for lit in ["1", "7", "2,4", "3,6", "2,2,2", "2,2,8", "4,4,8", "2,2,2,2,2,2,2"] {
            let g: GroupDescriptor = lit.parse().unwrap();
            let mg = MaskGroup::new(&g).unwrap();
            for y in 0..mg.order {
                let ey = g.unrank(y as u128);
                for x in 0..mg.order {
                    let ex = g.unrank(x as u128);
                    let expect = g.rank_of(&g.add(&ex, &ey)) as usize;
                    assert_eq!(mg.translate(1u128 << x, y), 1u128 << expect, "{lit}: {x}+{y}");
                }
                // a full set maps onto itself
                assert_eq!(mg.translate(mg.full(), y), mg.full());
            }
        }
    }

    #[test]
    fn negated_multiples() {
        let g: GroupDescriptor = "2,6".parse().unwrap();
        let mg = MaskGroup::new(&g).unwrap();
        let y = g.rank_of(&g.element(&[1, 1]).unwrap()) as usize;
        assert_eq!(mg.neg_mult(y, 0), 0);
        assert_eq!(mg.neg_mult(y, 1), g.rank_of(&g.element(&[1, 5]).unwrap()) as usize);
        assert_eq!(mg.neg_mult(y, 6), 0);
        assert_eq!(mg.elem_order[y], 6);
    }

    #[test]
    fn rejects_large_groups() {
        let g: GroupDescriptor = "256".parse().unwrap();
        assert!(MaskGroup::new(&g).is_err());
    }
}
