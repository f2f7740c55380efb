//! Naive reference implementations used to cross-check the library.
//!
//! Everything here works on element indices with a precomputed addition
//! table and decides zero-sum questions by plain subset enumeration.

#![allow(dead_code)]

use zerosum_core::{GroupDescriptor, ZSequence};

pub struct Table {
    pub group: GroupDescriptor,
    pub order: usize,
    pub exp: usize,
    pub add: Vec<Vec<usize>>,
}

impl Table {
    pub fn new(group: &GroupDescriptor) -> Self {
        let elems: Vec<_> = group.elements().collect();
        let order = elems.len();
        let add = elems
            .iter()
            .map(|a| elems.iter().map(|b| group.rank_of(&group.add(a, b)) as usize).collect())
            .collect();
        Table {
            group: group.clone(),
            order,
            exp: group.exponent() as usize,
            add,
        }
    }

    pub fn to_seq(&self, idx: &[usize]) -> ZSequence {
        idx.iter().map(|&i| self.group.unrank(i as u128)).collect()
    }

    pub fn from_seq(&self, s: &ZSequence) -> Vec<usize> {
        s.elements().iter().map(|g| self.group.rank_of(g) as usize).collect()
    }

    fn sum(&self, seq: &[usize], mask: u64) -> usize {
        let mut acc = 0;
        for (i, &x) in seq.iter().enumerate() {
            if mask >> i & 1 == 1 {
                acc = self.add[acc][x];
            }
        }
        acc
    }

    /// Some non-empty subset with zero sum and size in `[lo, hi]`.
    pub fn has_zero_sum(&self, seq: &[usize], lo: usize, hi: usize) -> bool {
        (1u64..1 << seq.len()).any(|mask| {
            let k = mask.count_ones() as usize;
            k >= lo && k <= hi && self.sum(seq, mask) == 0
        })
    }

    /// Same, restricted to subsets containing the last element.
    fn has_zero_sum_with_last(&self, seq: &[usize], lo: usize, hi: usize) -> bool {
        let n = seq.len();
        let last = 1u64 << (n - 1);
        (0u64..last).any(|m| {
            let mask = m | last;
            let k = mask.count_ones() as usize;
            k >= lo && k <= hi && self.sum(seq, mask) == 0
        })
    }

    /// `m` disjoint non-empty zero-sum subsets, by labelling every element
    /// with a block number or "unused".
    pub fn has_disjoint(&self, seq: &[usize], m: usize) -> bool {
        let n = seq.len();
        if n < m {
            return false;
        }
        let total = (m + 1).pow(n as u32);
        (0..total).any(|mut code| {
            let mut sums = vec![0usize; m + 1];
            let mut sizes = vec![0usize; m + 1];
            for &x in seq {
                let b = code % (m + 1);
                code /= m + 1;
                sums[b] = self.add[sums[b]][x];
                sizes[b] += 1;
            }
            (1..=m).all(|b| sizes[b] > 0 && sums[b] == 0)
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub enum Naive {
    Davenport,
    Eta,
    Egz,
    Dm(usize),
}

/// `1 +` the longest sequence avoiding the pattern, with the
/// lexicographically least longest sequence, by depth-first search over
/// non-decreasing index sequences (every pattern here is inherited by
/// subsequences, so only avoiding prefixes need extending).
pub fn naive_invariant(t: &Table, kind: Naive) -> (usize, Vec<usize>) {
    let mut seq = Vec::new();
    let mut best = Vec::new();
    extend(t, kind, &mut seq, 0, &mut best);
    (best.len() + 1, best)
}

fn avoids_with_last(t: &Table, kind: Naive, seq: &[usize]) -> bool {
    match kind {
        Naive::Davenport => !t.has_zero_sum_with_last(seq, 1, seq.len()),
        Naive::Eta => !t.has_zero_sum_with_last(seq, 1, t.exp),
        Naive::Egz => !t.has_zero_sum_with_last(seq, t.exp, t.exp),
        Naive::Dm(m) => !t.has_disjoint(seq, m),
    }
}

fn extend(t: &Table, kind: Naive, seq: &mut Vec<usize>, start: usize, best: &mut Vec<usize>) {
    if seq.len() > best.len() {
        *best = seq.clone();
    }
    for y in start..t.order {
        seq.push(y);
        if avoids_with_last(t, kind, seq) {
            extend(t, kind, seq, y, best);
        }
        seq.pop();
    }
}

/// Whether `seq` avoids the pattern, checked from scratch.
pub fn naive_avoids(t: &Table, kind: Naive, seq: &[usize]) -> bool {
    match kind {
        Naive::Davenport => !t.has_zero_sum(seq, 1, seq.len()),
        Naive::Eta => !t.has_zero_sum(seq, 1, t.exp),
        Naive::Egz => !t.has_zero_sum(seq, t.exp, t.exp),
        Naive::Dm(m) => !t.has_disjoint(seq, m),
    }
}

/// Every invariant-factor chain with order in `[2, max_order]`.
pub fn groups_up_to(max_order: u128) -> Vec<GroupDescriptor> {
    fn rec(prefix: &mut Vec<u128>, order: u128, max: u128, out: &mut Vec<GroupDescriptor>) {
        if !prefix.is_empty() {
            out.push(GroupDescriptor::new(prefix.clone()).unwrap());
        }
        let lo = prefix.last().copied().unwrap_or(2);
        let mut n = lo;
        while order * n <= max {
            if prefix.is_empty() || n % lo == 0 {
                prefix.push(n);
                rec(prefix, order * n, max, out);
                prefix.pop();
            }
            n += 1;
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), 1, max_order, &mut out);
    out.sort_by_key(|g| (g.order(), g.factors().to_vec()));
    out
}
