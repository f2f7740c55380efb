//! Depth-first search for the longest sequence avoiding a zero-sum pattern.
//!
//! Sequences are enumerated as non-decreasing lists of element ranks, so the
//! traversal is in lexicographic order and the first sequence found at the
//! final maximum length is the lexicographically least one. Each node keeps
//! a layered reach state (sums of subsequences by length) as `u128` masks.
//!
//! Two prunes apply. A child is dropped as soon as its reach state exhibits
//! the forbidden zero-sum. A node is dropped when its depth plus an
//! optimistic count of further elements cannot reach the current target;
//! the count sums, over every element still allowed, the number of extra
//! copies that element alone could add without a forbidden zero-sum.

use std::time::Instant;

use super::mask::{has, MaskGroup};
use super::Budget;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Pattern {
    /// Any non-empty zero-sum.
    Any,
    /// A zero-sum of length in `[1, exp]`.
    Short,
    /// A zero-sum of length exactly `exp`.
    ExactExp,
}

pub(crate) struct Outcome {
    pub best: Option<Vec<usize>>,
    pub nodes: u64,
    pub exhausted: bool,
    pub capped: bool,
}

pub(crate) struct SearchParams {
    pub pattern: Pattern,
    /// Only sequences at least this long are of interest.
    pub min_len: usize,
    /// No valid sequence is longer than this.
    pub max_len: usize,
    /// For `ExactExp`: every multiplicity is at most the multiplicity of the
    /// identity (valid because translating a sequence preserves the pattern).
    pub normalize_translation: bool,
}

struct Dfs<'a> {
    mg: &'a MaskGroup,
    pattern: Pattern,
    layers: usize,
    // layer states for every depth, flattened
    stack: Vec<u128>,
    seq: Vec<usize>,
    target: usize,
    max_len: usize,
    normalize: bool,
    best: Option<Vec<usize>>,
    nodes: u64,
    budget: Budget,
    started: Instant,
    stopped: bool,
    out_of_budget: bool,
    capped: bool,
}

pub(crate) fn run(mg: &MaskGroup, params: &SearchParams, budget: &Budget) -> Outcome {
    let layers = match params.pattern {
        Pattern::Any => 2,
        Pattern::Short | Pattern::ExactExp => mg.exp + 1,
    };
    let depth_cap = params.max_len + 1;
    let mut dfs = Dfs {
        mg,
        pattern: params.pattern,
        layers,
        stack: vec![0; layers * (depth_cap + 1)],
        seq: Vec::with_capacity(depth_cap),
        target: params.min_len,
        max_len: params.max_len,
        normalize: params.normalize_translation && params.pattern == Pattern::ExactExp,
        best: None,
        nodes: 0,
        budget: budget.clone(),
        started: Instant::now(),
        stopped: false,
        out_of_budget: false,
        capped: false,
    };
    dfs.stack[0] = 1; // layer 0 = {identity}
    if dfs.target <= dfs.max_len {
        dfs.visit(0);
    } else {
        dfs.capped = true;
    }
    Outcome {
        best: dfs.best,
        nodes: dfs.nodes,
        exhausted: !dfs.out_of_budget,
        capped: dfs.capped,
    }
}

impl Dfs<'_> {
    fn first_type(&self) -> usize {
        match self.pattern {
            Pattern::ExactExp => 0,
            // the identity alone is a forbidden zero-sum
            Pattern::Any | Pattern::Short => 1,
        }
    }

    fn visit(&mut self, depth: usize) {
        self.nodes += 1;
        if self.nodes > self.budget.max_nodes || (self.nodes & 0xffff == 0 && !self.within_budget()) {
            self.out_of_budget = true;
            self.stopped = true;
            return;
        }
        if depth >= self.target {
            self.best = Some(self.seq.clone());
            self.target = depth + 1;
            if self.target > self.max_len {
                self.capped = true;
                self.stopped = true;
                return;
            }
        }
        let last = self.seq.last().copied();
        let start = last.unwrap_or_else(|| self.first_type());
        let run = self.seq.iter().rev().take_while(|&&y| Some(y) == last).count();
        let zero_count = self.seq.iter().take_while(|&&y| y == 0).count();
        let normalized = (self.normalize && last.is_some_and(|y| y != 0)).then_some((zero_count, run));

        if depth + self.optimistic(depth, start, normalized) < self.target {
            return;
        }
        for y in start..self.mg.order {
            if self.stopped {
                return;
            }
            if normalized.is_some() {
                let used = if y == start { run } else { 0 };
                if used >= zero_count {
                    continue;
                }
            }
            if !self.push_child(depth, y) {
                continue;
            }
            self.seq.push(y);
            self.visit(depth + 1);
            self.seq.pop();
        }
    }

    fn push_child(&mut self, depth: usize, y: usize) -> bool {
        let (cur, next) = self.stack.split_at_mut((depth + 1) * self.layers);
        push(
            self.mg,
            self.pattern,
            &cur[depth * self.layers..],
            &mut next[..self.layers],
            y,
            depth,
        )
    }

    fn within_budget(&self) -> bool {
        self.nodes < self.budget.max_nodes && self.started.elapsed() < self.budget.max_time
    }

    /// Upper bound on how many more elements (all of rank `>= start`) any
    /// valid extension can have.
    fn optimistic(&self, depth: usize, start: usize, normalized: Option<(usize, usize)>) -> usize {
        let l = &self.stack[depth * self.layers..(depth + 1) * self.layers];
        let mg = self.mg;
        let n = mg.exp;
        let mut total = 0usize;
        let bound = match self.pattern {
            Pattern::Any => {
                let forbidden = l[0] | l[1];
                for y in start..mg.order {
                    // terminates: -ord(y)·y = 0 is forbidden
                    let mut k = 1;
                    while !has(forbidden, mg.neg_mult(y, k)) {
                        k += 1;
                    }
                    total += k - 1;
                }
                let sums = l[1].count_ones() as usize;
                total.min(mg.order - 1 - sums)
            }
            Pattern::Short => {
                // prefix[j] = layers 0..=j
                let mut prefix = [0u128; 130];
                let mut acc = 0;
                for (j, &x) in l.iter().enumerate() {
                    acc |= x;
                    prefix[j] = acc;
                }
                for y in start..mg.order {
                    let mut k = 1;
                    while k <= n && !has(prefix[n - k], mg.neg_mult(y, k)) {
                        k += 1;
                    }
                    total += k - 1;
                }
                total
            }
            Pattern::ExactExp => {
                for y in start..mg.order {
                    let mut k = 1;
                    while k <= n && !has(l[n - k], mg.neg_mult(y, k)) {
                        k += 1;
                    }
                    let mut c = k - 1;
                    if let Some((zeros, run)) = normalized {
                        let used = if y == start { run } else { 0 };
                        c = c.min(zeros.saturating_sub(used));
                    }
                    total += c;
                }
                total
            }
        };
        bound.min(self.max_len.saturating_sub(depth))
    }
}

/// Writes the reach state after appending `y` into `next`; returns false if
/// the forbidden pattern appears.
#[inline]
fn push(mg: &MaskGroup, pattern: Pattern, cur: &[u128], next: &mut [u128], y: usize, depth: usize) -> bool {
    match pattern {
        Pattern::Any => {
            let sums = cur[1] | mg.translate(cur[1] | 1, y);
            next[0] = 1;
            next[1] = sums;
            !has(sums, 0)
        }
        Pattern::Short | Pattern::ExactExp => {
            let n = mg.exp;
            let top = n.min(depth + 1);
            next[0] = cur[0];
            for l in 1..=top {
                next[l] = cur[l] | mg.translate(cur[l - 1], y);
            }
            for x in next.iter_mut().take(n + 1).skip(top + 1) {
                *x = 0;
            }
            match pattern {
                Pattern::ExactExp => !has(next[n], 0),
                _ => !next[1..=top].iter().any(|&x| has(x, 0)),
            }
        }
    }
}
