//! Reachable subsequence sums with witness back-pointers.
//!
//! A [`ReachState`] tracks, for a growing sequence, which group elements are
//! sums of subsequences, either stratified by subsequence length or split
//! only into "empty" and "non-empty". Elements are identified by their
//! mixed-radix rank. Small groups use dense bitsets; very large ones (as in
//! the smooth-number application with many primes) fall back to hash sets.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::group::{GroupDescriptor, GroupElement, ZSequence};

const DENSE_LIMIT: u64 = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layering {
    /// Layer 0 is `{0}`; layer 1 holds sums of all non-empty subsequences.
    Unstratified,
    /// Layer `l` holds sums of subsequences of exactly `l` elements,
    /// for `l` in `[0, max_len]`.
    Stratified { max_len: usize },
}

#[derive(Debug, Clone)]
enum SumSet {
    Dense(Vec<u64>),
    Sparse(HashSet<u64>),
}

impl SumSet {
    fn empty(order: u64) -> Self {
        if order <= DENSE_LIMIT {
            SumSet::Dense(vec![0; order.div_ceil(64) as usize])
        } else {
            SumSet::Sparse(HashSet::new())
        }
    }

    fn contains(&self, r: u64) -> bool {
        match self {
            SumSet::Dense(w) => w[(r / 64) as usize] >> (r % 64) & 1 == 1,
            SumSet::Sparse(s) => s.contains(&r),
        }
    }

    /// Returns true if `r` was not present.
    fn insert(&mut self, r: u64) -> bool {
        match self {
            SumSet::Dense(w) => {
                let word = &mut w[(r / 64) as usize];
                let bit = 1u64 << (r % 64);
                let fresh = *word & bit == 0;
                *word |= bit;
                fresh
            }
            SumSet::Sparse(s) => s.insert(r),
        }
    }

    fn ranks(&self) -> Vec<u64> {
        match self {
            SumSet::Dense(w) => {
                let mut out = Vec::new();
                for (i, &word) in w.iter().enumerate() {
                    let mut bits = word;
                    while bits != 0 {
                        let b = bits.trailing_zeros() as u64;
                        out.push(i as u64 * 64 + b);
                        bits &= bits - 1;
                    }
                }
                out
            }
            SumSet::Sparse(s) => {
                let mut v: Vec<u64> = s.iter().copied().collect();
                v.sort_unstable();
                v
            }
        }
    }

    fn len(&self) -> usize {
        match self {
            SumSet::Dense(w) => w.iter().map(|x| x.count_ones() as usize).sum(),
            SumSet::Sparse(s) => s.len(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Step {
    element: usize,
    pred_layer: usize,
    pred_rank: u64,
}

#[derive(Debug, Clone)]
pub struct ReachState {
    group: GroupDescriptor,
    radix: Vec<u64>,
    layering: Layering,
    layers: Vec<SumSet>,
    witness: Option<HashMap<(usize, u64), Step>>,
    pushed: usize,
}

impl ReachState {
    pub fn new(group: &GroupDescriptor, layering: Layering, with_witness: bool) -> Result<Self> {
        let order = u64::try_from(group.order())
            .map_err(|_| Error::invalid(format!("group {group} is too large for a reach state")))?;
        let nlayers = match layering {
            Layering::Unstratified => 2,
            Layering::Stratified { max_len } => max_len + 1,
        };
        let mut layers: Vec<SumSet> = (0..nlayers).map(|_| SumSet::empty(order)).collect();
        layers[0].insert(0);
        Ok(ReachState {
            group: group.clone(),
            radix: group.factors().iter().map(|&n| n as u64).collect(),
            layering,
            layers,
            witness: with_witness.then(HashMap::new),
            pushed: 0,
        })
    }

    pub fn layering(&self) -> Layering {
        self.layering
    }

    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn pushed(&self) -> usize {
        self.pushed
    }

    fn add_rank(&self, mut x: u64, g: &[u64]) -> u64 {
        let mut out = 0u64;
        let mut stride = 1u64;
        for (&n, &gc) in self.radix.iter().zip(g) {
            let c = x % n;
            x /= n;
            let s = c + gc;
            out += if s >= n { s - n } else { s } * stride;
            stride = stride.wrapping_mul(n);
        }
        out
    }

    /// Appends `g` to the underlying sequence.
    pub fn push(&mut self, g: &GroupElement) -> Result<()> {
        self.group.check(g)?;
        let gc: Vec<u64> = g.coords().iter().map(|&c| c as u64).collect();
        let index = self.pushed;
        // (target layer, source layer) pairs, processed so every source is
        // read before it is modified
        let moves: Vec<(usize, usize)> = match self.layering {
            Layering::Unstratified => vec![(1, 1), (1, 0)],
            Layering::Stratified { max_len } => (1..=max_len).rev().map(|l| (l, l - 1)).collect(),
        };
        let mut pending: Vec<(usize, usize, Vec<u64>)> = Vec::new();
        for &(to, from) in &moves {
            pending.push((to, from, self.layers[from].ranks()));
        }
        for (to, from, sources) in pending {
            for x in sources {
                let y = self.add_rank(x, &gc);
                if self.layers[to].insert(y) {
                    if let Some(w) = self.witness.as_mut() {
                        w.insert(
                            (to, y),
                            Step {
                                element: index,
                                pred_layer: from,
                                pred_rank: x,
                            },
                        );
                    }
                }
            }
        }
        self.pushed += 1;
        Ok(())
    }

    pub fn contains(&self, layer: usize, g: &GroupElement) -> bool {
        layer < self.layers.len() && self.layers[layer].contains(self.group.rank_of(g) as u64)
    }

    pub fn contains_rank(&self, layer: usize, rank: u64) -> bool {
        layer < self.layers.len() && self.layers[layer].contains(rank)
    }

    pub fn layer_len(&self, layer: usize) -> usize {
        self.layers[layer].len()
    }

    pub fn layer_elements(&self, layer: usize) -> Vec<GroupElement> {
        self.layers[layer]
            .ranks()
            .into_iter()
            .map(|r| self.group.unrank(r as u128))
            .collect()
    }

    /// Indices (ascending) of a subsequence whose sum is `g` and which lies
    /// in `layer`. Requires witness tracking.
    pub fn witness(&self, layer: usize, g: &GroupElement) -> Option<Vec<usize>> {
        let steps = self.witness.as_ref()?;
        let mut rank = self.group.rank_of(g) as u64;
        if !self.contains_rank(layer, rank) {
            return None;
        }
        let mut layer = layer;
        let mut out = Vec::new();
        while layer != 0 {
            let step = steps.get(&(layer, rank))?;
            out.push(step.element);
            layer = step.pred_layer;
            rank = step.pred_rank;
        }
        out.reverse();
        Some(out)
    }
}

/// A non-empty subsequence of `seq` with zero sum and length in `[lo, hi]`.
///
/// Returns ascending indices, or `None` when no such subsequence exists.
pub fn find_zero_sum(
    seq: &ZSequence,
    group: &GroupDescriptor,
    window: (usize, usize),
) -> Result<Option<Vec<usize>>> {
    let (lo, hi) = window;
    if lo == 0 || lo > hi || hi > seq.len() {
        return Err(Error::invalid(format!(
            "length window [{lo}, {hi}] is not inside [1, {}]",
            seq.len()
        )));
    }
    let zero = group.identity();
    let layering = if lo == 1 && hi == seq.len() {
        Layering::Unstratified
    } else {
        Layering::Stratified { max_len: hi }
    };
    let mut state = ReachState::new(group, layering, true)?;
    for g in seq.elements() {
        state.push(g)?;
        let hit = match layering {
            Layering::Unstratified => state.contains(1, &zero).then_some(1),
            Layering::Stratified { .. } => (lo..=hi).find(|&l| state.contains(l, &zero)),
        };
        if let Some(l) = hit {
            return Ok(state.witness(l, &zero));
        }
    }
    Ok(None)
}

/// Shortest non-empty zero-sum subsequence, if any.
pub fn find_shortest_zero_sum(seq: &ZSequence, group: &GroupDescriptor) -> Result<Option<Vec<usize>>> {
    if seq.is_empty() {
        return Ok(None);
    }
    let zero = group.identity();
    let mut state = ReachState::new(group, Layering::Stratified { max_len: seq.len() }, true)?;
    for g in seq.elements() {
        state.push(g)?;
    }
    Ok((1..=seq.len())
        .find(|&l| state.contains(l, &zero))
        .and_then(|l| state.witness(l, &zero)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::sigma;
    use proptest::prelude::*;

    fn seq(g: &GroupDescriptor, rows: &[&[i128]]) -> ZSequence {
        rows.iter().map(|r| g.element(r).unwrap()).collect()
    }

    #[test]
    fn layer_zero_is_identity() {
        let g: GroupDescriptor = "2,4".parse().unwrap();
        let st = ReachState::new(&g, Layering::Stratified { max_len: 3 }, false).unwrap();
        assert_eq!(st.layer_elements(0), vec![g.identity()]);
        assert_eq!(st.layer_len(1), 0);
    }

    #[test]
    fn cyclic_three_ones() {
        let g: GroupDescriptor = "3".parse().unwrap();
        let s = seq(&g, &[&[1], &[1], &[1]]);
        assert_eq!(find_zero_sum(&s, &g, (1, 3)).unwrap(), Some(vec![0, 1, 2]));
    }

    #[test]
    fn c4_no_zero_sum() {
        let g: GroupDescriptor = "4".parse().unwrap();
        let s = seq(&g, &[&[1], &[2]]);
        assert_eq!(find_zero_sum(&s, &g, (1, 2)).unwrap(), None);
    }

    #[test]
    fn klein_window() {
        let g: GroupDescriptor = "2,2".parse().unwrap();
        let s = seq(&g, &[&[1, 0], &[0, 1], &[1, 1]]);
        assert_eq!(find_zero_sum(&s, &g, (1, 2)).unwrap(), None);
        assert_eq!(find_zero_sum(&s, &g, (1, 3)).unwrap(), Some(vec![0, 1, 2]));
        assert_eq!(find_zero_sum(&s, &g, (3, 3)).unwrap(), Some(vec![0, 1, 2]));
    }

    #[test]
    fn window_errors() {
        let g: GroupDescriptor = "3".parse().unwrap();
        let s = seq(&g, &[&[1], &[1]]);
        assert!(find_zero_sum(&s, &g, (0, 2)).is_err());
        assert!(find_zero_sum(&s, &g, (2, 1)).is_err());
        assert!(find_zero_sum(&s, &g, (1, 3)).is_err());
        assert!(find_zero_sum(&ZSequence::default(), &g, (1, 1)).is_err());
    }

    #[test]
    fn exact_length_window_skips_shorter_zero_sums() {
        let g: GroupDescriptor = "4".parse().unwrap();
        // 2+2 = 0 (length 2) but the window asks for length 4 exactly
        let s = seq(&g, &[&[2], &[2], &[1], &[3]]);
        let w = find_zero_sum(&s, &g, (4, 4)).unwrap().unwrap();
        assert_eq!(w.len(), 4);
        let s = seq(&g, &[&[2], &[2], &[1], &[1]]);
        assert_eq!(find_zero_sum(&s, &g, (4, 4)).unwrap(), None);
    }

    #[test]
    fn shortest_witness() {
        let g: GroupDescriptor = "6".parse().unwrap();
        let s = seq(&g, &[&[1], &[1], &[1], &[1], &[1], &[3], &[3]]);
        assert_eq!(find_shortest_zero_sum(&s, &g).unwrap(), Some(vec![5, 6]));
    }

    #[test]
    fn sparse_storage_matches_dense_semantics() {
        // order 2^27 > DENSE_LIMIT; only a few elements so the reach set stays small
        let g = GroupDescriptor::elementary(2, 27).unwrap();
        let mut rows = Vec::new();
        for i in 0..12 {
            let mut c = vec![0i128; 27];
            c[i] = 1;
            rows.push(g.element(&c).unwrap());
        }
        let s = ZSequence::new(rows.clone());
        assert_eq!(find_zero_sum(&s, &g, (1, 12)).unwrap(), None);
        let mut c = vec![0i128; 27];
        c[1..12].iter_mut().for_each(|x| *x = 1);
        rows.push(g.element(&c).unwrap());
        let s = ZSequence::new(rows);
        let w = find_zero_sum(&s, &g, (1, 13)).unwrap().unwrap();
        assert!(sigma(&s.restrict(&w), &g).unwrap().is_zero());
        assert_eq!(w.len(), 12);
        assert_eq!(find_zero_sum(&s, &g, (1, 11)).unwrap(), None);
    }

    fn brute(s: &ZSequence, g: &GroupDescriptor, lo: usize, hi: usize) -> bool {
        let n = s.len();
        (1u32..1 << n).any(|mask| {
            let idx: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            idx.len() >= lo && idx.len() <= hi && sigma(&s.restrict(&idx), g).unwrap().is_zero()
        })
    }

    fn group_and_seq() -> impl Strategy<Value = (GroupDescriptor, ZSequence, usize, usize)> {
        let groups = prop_oneof![
            Just("2"), Just("5"), Just("7"), Just("2,2"), Just("2,4"), Just("3,3"), Just("2,2,2"), Just("2,6")
        ];
        (groups, 1usize..=10).prop_flat_map(|(lit, len)| {
            let g: GroupDescriptor = lit.parse().unwrap();
            let order = g.order();
            (
                Just(g),
                proptest::collection::vec(0..order, len),
                1..=len,
                1..=len,
            )
                .prop_map(|(g, ranks, a, b)| {
                    let s: ZSequence = ranks.into_iter().map(|r| g.unrank(r)).collect();
                    (g, s, a.min(b), a.max(b))
                })
        })
    }

    proptest! {
        #[test]
        fn witness_is_valid_and_none_is_exact((g, s, lo, hi) in group_and_seq()) {
            match find_zero_sum(&s, &g, (lo, hi)).unwrap() {
                Some(idx) => {
                    prop_assert!(!idx.is_empty());
                    prop_assert!(idx.len() >= lo && idx.len() <= hi);
                    prop_assert!(idx.windows(2).all(|w| w[0] < w[1]));
                    prop_assert!(sigma(&s.restrict(&idx), &g).unwrap().is_zero());
                }
                None => prop_assert!(!brute(&s, &g, lo, hi)),
            }
        }

        #[test]
        fn push_is_monotone_and_chains_reconstruct((g, s, _lo, _hi) in group_and_seq()) {
            let max_len = s.len();
            let mut st = ReachState::new(&g, Layering::Stratified { max_len }, true).unwrap();
            let mut before: Vec<Vec<GroupElement>> = Vec::new();
            for e in s.elements() {
                st.push(e).unwrap();
                for (l, prev) in before.iter().enumerate() {
                    for x in prev {
                        prop_assert!(st.contains(l, x));
                    }
                }
                before = (0..=max_len).map(|l| st.layer_elements(l)).collect();
            }
            for l in 0..=max_len {
                for x in st.layer_elements(l) {
                    let idx = st.witness(l, &x).unwrap();
                    prop_assert_eq!(idx.len(), l);
                    prop_assert_eq!(sigma(&s.restrict(&idx), &g).unwrap(), x);
                }
            }
        }
    }
}
