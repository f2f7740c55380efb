//! Deciding whether a sequence contains `m` pairwise disjoint non-empty
//! zero-sum subsequences.
//!
//! Sequences are multiplicity vectors over a fixed list of element types.
//! Let `x` be the first type present. Either `x` lies in none of the `m`
//! subsequences (drop one copy and recurse), or it lies in one of them,
//! which may be taken minimal and therefore of length at most `|G|`; that
//! block is removed and `m - 1` more are sought in the rest. Results are
//! memoized on `(multiplicities, m)`.

use std::collections::HashMap;

use crate::group::{GroupDescriptor, GroupElement};

pub(crate) struct DisjointChecker {
    group: GroupDescriptor,
    types: Vec<GroupElement>,
    max_block: usize,
    memo: HashMap<(Vec<u8>, usize), bool>,
}

impl DisjointChecker {
    pub fn new(group: &GroupDescriptor, types: Vec<GroupElement>) -> Self {
        let max_block = usize::try_from(group.order()).unwrap_or(usize::MAX);
        DisjointChecker {
            group: group.clone(),
            types,
            max_block,
            memo: HashMap::new(),
        }
    }

    pub fn types(&self) -> &[GroupElement] {
        &self.types
    }

    pub fn has(&mut self, counts: &[u8], m: usize) -> bool {
        if m == 0 {
            return true;
        }
        let total: usize = counts.iter().map(|&c| c as usize).sum();
        if total < m {
            return false;
        }
        let key = (counts.to_vec(), m);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let v = self.first_block(counts, m).is_some();
        self.memo.insert(key, v);
        v
    }

    /// The decomposition as `m` multiplicity vectors, when one exists.
    pub fn decompose(&mut self, counts: &[u8], m: usize) -> Option<Vec<Vec<u8>>> {
        if !self.has(counts, m) {
            return None;
        }
        let mut rest = counts.to_vec();
        let mut blocks = Vec::with_capacity(m);
        for left in (1..=m).rev() {
            let block = self.first_block(&rest, left)?;
            for (r, b) in rest.iter_mut().zip(&block) {
                *r -= b;
            }
            blocks.push(block);
        }
        Some(blocks)
    }

    /// A zero-sum block `B` with `rest - B` still holding `m - 1` disjoint
    /// zero-sums.
    fn first_block(&mut self, counts: &[u8], m: usize) -> Option<Vec<u8>> {
        let x = counts.iter().position(|&c| c > 0)?;
        let mut without = counts.to_vec();
        without[x] -= 1;
        if self.has(&without, m) {
            // `x` unused: any block found in `without` also works here
            return self.first_block(&without, m);
        }
        let target = self.group.neg(&self.types[x]);
        let mut takes = vec![0u8; counts.len()];
        let limit = self.max_block.saturating_sub(1);
        let mut found = None;
        let zero = self.group.identity();
        let mut walk = Walk {
            avail: &without,
            target: &target,
            limit,
            m,
        };
        walk.run(self, 0, zero, 0, &mut takes, &mut found);
        found.map(|mut block: Vec<u8>| {
            block[x] += 1;
            block
        })
    }
}

/// Enumerates sub-multisets of `avail` summing to `target`, larger
/// multiplicities first, stopping at the first one whose complement still
/// holds `m - 1` disjoint zero-sums.
struct Walk<'a> {
    avail: &'a [u8],
    target: &'a GroupElement,
    limit: usize,
    m: usize,
}

impl Walk<'_> {
    fn run(
        &mut self,
        chk: &mut DisjointChecker,
        i: usize,
        sum: GroupElement,
        len: usize,
        takes: &mut Vec<u8>,
        found: &mut Option<Vec<u8>>,
    ) {
        if i == self.avail.len() {
            if &sum == self.target {
                let rest: Vec<u8> = self.avail.iter().zip(takes.iter()).map(|(&a, &t)| a - t).collect();
                if chk.has(&rest, self.m - 1) {
                    *found = Some(takes.clone());
                }
            }
            return;
        }
        let max_take = (self.avail[i] as usize).min(self.limit - len);
        let mut sums = Vec::with_capacity(max_take + 1);
        sums.push(sum);
        for t in 0..max_take {
            let next = chk.group.add(&sums[t], &chk.types[i]);
            sums.push(next);
        }
        for take in (0..=max_take).rev() {
            takes[i] = take as u8;
            self.run(chk, i + 1, sums[take].clone(), len + take, takes, found);
            if found.is_some() {
                return;
            }
        }
        takes[i] = 0;
    }
}
