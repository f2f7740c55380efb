//! Exact values of `D(G)`, `η(G)`, `s(G)` and `D_m(G)` for small groups.
//!
//! Every invariant here is `1 +` the length of a longest sequence avoiding
//! some zero-sum pattern, so each computation is a search for such a
//! sequence. The search seeds its target with an explicit construction and
//! stops either when the whole tree is exhausted or when it reaches a length
//! that a proven upper bound forbids exceeding. [`UpperBoundProof`] records
//! which of the two closed the search.
//!
//! Upper bounds used (all off under [`Solver::exhaustive_only`]):
//! * `s(G) <= |G| + exp(G) - 1` and the consequence `η(G) <= |G|`;
//! * for a subgroup `H` with `exp(H)·exp(G/H) = exp(G)`,
//!   `s(G) <= (s(H) - 1)·exp(G/H) + s(G/H)` and the same shape for `η`
//!   (extract blocks that vanish in `G/H`, then combine block sums in `H`);
//! * `D_m(G) <= exp(G)·(m - 1) + η(G)`.

mod disjoint;
mod mask;
mod record;
mod search;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::bounds::d_star;
use crate::error::{Error, Result};
use crate::group::{GroupDescriptor, GroupElement, ZSequence};
use disjoint::DisjointChecker;
use mask::MaskGroup;
use search::{Pattern, SearchParams};

pub use record::{ResultCache, ResultRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InvariantKind {
    Davenport,
    Eta,
    Egz,
    /// The `m`-th Davenport constant.
    Dm(u32),
}

impl InvariantKind {
    /// Short name used in records: `D`, `eta`, `s`, `Dm`.
    pub fn name(&self) -> &'static str {
        match self {
            InvariantKind::Davenport => "D",
            InvariantKind::Eta => "eta",
            InvariantKind::Egz => "s",
            InvariantKind::Dm(_) => "Dm",
        }
    }

    pub fn m(&self) -> Option<u32> {
        match self {
            InvariantKind::Dm(m) => Some(*m),
            _ => None,
        }
    }

    pub fn from_parts(name: &str, m: Option<u32>) -> Result<Self> {
        match (name, m) {
            ("D", None) => Ok(InvariantKind::Davenport),
            ("eta", None) => Ok(InvariantKind::Eta),
            ("s", None) => Ok(InvariantKind::Egz),
            ("Dm", Some(m)) if m >= 1 => Ok(InvariantKind::Dm(m)),
            ("Dm", _) => Err(Error::invalid("Dm needs m >= 1")),
            _ => Err(Error::invalid(format!("unknown invariant {name:?}"))),
        }
    }
}

impl fmt::Display for InvariantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvariantKind::Dm(m) => write!(f, "D_{m}"),
            k => write!(f, "{}", k.name()),
        }
    }
}

/// Accepts `D`, `eta`, `s`, and `D_<m>`.
impl FromStr for InvariantKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if let Some(m) = s.strip_prefix("D_") {
            let m = m
                .parse::<u32>()
                .map_err(|_| Error::invalid(format!("bad m in {s:?}")))?;
            return InvariantKind::from_parts("Dm", Some(m));
        }
        InvariantKind::from_parts(s, None)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Budget {
    pub max_nodes: u64,
    pub max_time: Duration,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_nodes: 100_000_000,
            max_time: Duration::from_secs(60),
        }
    }
}

/// How the upper half of an exact value was established.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum UpperBoundProof {
    /// The search tree was exhausted.
    Exhaustive,
    /// The search reached `bound`, which `reason` shows cannot be exceeded.
    Bound { bound: u64, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantResult {
    pub group: GroupDescriptor,
    pub kind: InvariantKind,
    pub value: u64,
    /// A sequence of length `value - 1` avoiding the defining pattern; the
    /// lexicographically least one in rank order.
    pub certificate: ZSequence,
    pub nodes_explored: u64,
    pub elapsed: Duration,
    pub upper_bound: UpperBoundProof,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Cap {
    max_len: usize,
    source: Option<(u64, &'static str)>,
}

/// Computes exact invariants, memoizing results so bounds for larger groups
/// can reuse values of their subgroups and quotients.
#[derive(Debug, Clone)]
pub struct Solver {
    budget: Budget,
    use_bounds: bool,
    memo: HashMap<(GroupDescriptor, InvariantKind), InvariantResult>,
    // shared by the searches of one top-level `solve`, including those
    // for subgroups and quotients
    deadline: Option<Instant>,
}

impl Solver {
    pub fn new(budget: Budget) -> Self {
        Solver {
            budget,
            use_bounds: true,
            memo: HashMap::new(),
            deadline: None,
        }
    }

    /// Disables every proven upper bound, so each value is closed by
    /// exhausting the search tree. Only practical for tiny groups.
    pub fn exhaustive_only(mut self) -> Self {
        self.use_bounds = false;
        self
    }

    pub fn budget(&self) -> &Budget {
        &self.budget
    }

    /// The time limit covers the whole call, including searches for
    /// subgroups and quotients; the node limit applies to each search.
    pub fn solve(&mut self, group: &GroupDescriptor, kind: InvariantKind) -> Result<InvariantResult> {
        if self.deadline.is_some() {
            return self.solve_inner(group, kind);
        }
        self.deadline = Some(Instant::now() + self.budget.max_time);
        let out = self.solve_inner(group, kind);
        self.deadline = None;
        out
    }

    fn search_budget(&self) -> Budget {
        let left = self
            .deadline
            .map_or(self.budget.max_time, |d| d.saturating_duration_since(Instant::now()));
        Budget {
            max_nodes: self.budget.max_nodes,
            max_time: left,
        }
    }

    fn solve_inner(&mut self, group: &GroupDescriptor, kind: InvariantKind) -> Result<InvariantResult> {
        if let Some(r) = self.memo.get(&(group.clone(), kind)) {
            return Ok(r.clone());
        }
        let result = match kind {
            InvariantKind::Davenport | InvariantKind::Eta | InvariantKind::Egz => self.pattern_search(group, kind)?,
            InvariantKind::Dm(1) => {
                let mut r = self.solve(group, InvariantKind::Davenport)?;
                r.kind = kind;
                r
            }
            InvariantKind::Dm(0) => return Err(Error::invalid("m must be at least 1")),
            InvariantKind::Dm(m) => self.dm_search(group, m as usize)?,
        };
        self.memo.insert((group.clone(), kind), result.clone());
        Ok(result)
    }

    fn pattern_search(&mut self, group: &GroupDescriptor, kind: InvariantKind) -> Result<InvariantResult> {
        let started = Instant::now();
        let mg = MaskGroup::new(group)?;
        let exp = mg.exp;
        let dstar_len = (d_star(group) - 1) as usize;
        let (pattern, seed, cap) = match kind {
            InvariantKind::Davenport => (
                Pattern::Any,
                dstar_len,
                Cap {
                    max_len: mg.order - 1,
                    source: None,
                },
            ),
            InvariantKind::Eta => (Pattern::Short, dstar_len, self.eta_cap(group, &mg)),
            InvariantKind::Egz => (Pattern::ExactExp, exp - 1 + dstar_len, self.egz_cap(group, &mg)),
            InvariantKind::Dm(_) => unreachable!(),
        };
        let params = SearchParams {
            pattern,
            min_len: seed.min(cap.max_len),
            max_len: cap.max_len,
            normalize_translation: true,
        };
        let out = search::run(&mg, &params, &self.search_budget());
        if !out.exhausted {
            return Err(Error::BudgetExhausted {
                best_lower_bound: out.best.map_or(seed, |b| b.len()) as u64 + 1,
                nodes: out.nodes,
            });
        }
        let best = out.best.expect("the seed construction has length min_len");
        let upper_bound = match (out.capped, cap.source) {
            (true, Some((bound, reason))) => UpperBoundProof::Bound {
                bound,
                reason: reason.to_string(),
            },
            _ => UpperBoundProof::Exhaustive,
        };
        Ok(InvariantResult {
            group: group.clone(),
            kind,
            value: best.len() as u64 + 1,
            certificate: best.iter().map(|&r| group.unrank(r as u128)).collect(),
            nodes_explored: out.nodes,
            elapsed: started.elapsed(),
            upper_bound,
        })
    }

    /// Longest conceivable sequence for the `η` search.
    fn eta_cap(&mut self, group: &GroupDescriptor, mg: &MaskGroup) -> Cap {
        // every element y can appear at most ord(y) - 1 times
        let trivial: usize = mg.elem_order.iter().map(|&o| o - 1).sum();
        let mut cap = Cap {
            max_len: trivial,
            source: None,
        };
        if !self.use_bounds {
            return cap;
        }
        tighten(&mut cap, mg.order as u64, "eta(G) <= |G|");
        if let Some(b) = self.composition_bound(group, InvariantKind::Eta) {
            tighten(&mut cap, b, "eta(G) <= (eta(H)-1)exp(G/H) + eta(G/H)");
        }
        cap
    }

    fn egz_cap(&mut self, group: &GroupDescriptor, mg: &MaskGroup) -> Cap {
        let mut cap = Cap {
            max_len: mg.order * (mg.exp - 1),
            source: None,
        };
        if !self.use_bounds {
            return cap;
        }
        tighten(&mut cap, (mg.order + mg.exp - 1) as u64, "s(G) <= |G| + exp(G) - 1");
        if let Some(b) = self.composition_bound(group, InvariantKind::Egz) {
            tighten(&mut cap, b, "s(G) <= (s(H)-1)exp(G/H) + s(G/H)");
        }
        cap
    }

    /// Best bound `(K(H) - 1)·exp(G/H) + K(G/H)` over coordinate subgroups
    /// `H` with `exp(H)·exp(G/H) = exp(G)`. Splits whose parts cannot be
    /// solved within budget are skipped.
    fn composition_bound(&mut self, group: &GroupDescriptor, kind: InvariantKind) -> Option<u64> {
        let mut best: Option<u64> = None;
        for (sub, quo) in group.coordinate_splits() {
            if sub.is_trivial() || quo.is_trivial() || sub.exponent() * quo.exponent() != group.exponent() {
                continue;
            }
            let (Ok(h), Ok(q)) = (self.solve(&sub, kind), self.solve(&quo, kind)) else {
                continue;
            };
            let bound = (h.value - 1) * quo.exponent() as u64 + q.value;
            best = Some(best.map_or(bound, |b| b.min(bound)));
        }
        best
    }

    fn dm_search(&mut self, group: &GroupDescriptor, m: usize) -> Result<InvariantResult> {
        let started = Instant::now();
        let mg = MaskGroup::new(group)?;
        let elements: Vec<GroupElement> = group.elements().collect();
        // m·ord(y) copies of y always hold m disjoint zero-sums
        let mult_cap: Vec<usize> = mg.elem_order.iter().map(|&o| m * o - 1).collect();
        let mut cap = Cap {
            max_len: mult_cap.iter().sum(),
            source: None,
        };
        if self.use_bounds {
            if let Ok(eta) = self.solve(group, InvariantKind::Eta) {
                let bound = mg.exp as u64 * (m as u64 - 1) + eta.value;
                tighten(&mut cap, bound, "D_m(G) <= exp(G)(m-1) + eta(G)");
            }
        }
        let mut dfs = DmSearch {
            checker: DisjointChecker::new(group, elements),
            m,
            mult_cap,
            counts: vec![0; mg.order],
            seq: Vec::new(),
            target: 0,
            max_len: cap.max_len,
            best: None,
            nodes: 0,
            budget: self.search_budget(),
            started,
            stopped: false,
            out_of_budget: false,
            capped: false,
        };
        dfs.visit();
        let nodes = dfs.nodes;
        let best = dfs.best.clone();
        if dfs.out_of_budget {
            return Err(Error::BudgetExhausted {
                best_lower_bound: best.map_or(1, |b| b.len() as u64 + 1),
                nodes,
            });
        }
        let best = best.expect("the empty sequence is always admissible");
        let upper_bound = match (dfs.capped, cap.source) {
            (true, Some((bound, reason))) => UpperBoundProof::Bound {
                bound,
                reason: reason.to_string(),
            },
            _ => UpperBoundProof::Exhaustive,
        };
        Ok(InvariantResult {
            group: group.clone(),
            kind: InvariantKind::Dm(m as u32),
            value: best.len() as u64 + 1,
            certificate: best.iter().map(|&r| group.unrank(r as u128)).collect(),
            nodes_explored: nodes,
            elapsed: started.elapsed(),
            upper_bound,
        })
    }
}

/// `bound` is an upper bound on the invariant, so sequences are at most
/// `bound - 1` long.
fn tighten(cap: &mut Cap, bound: u64, reason: &'static str) {
    let len = bound.saturating_sub(1) as usize;
    if len < cap.max_len {
        cap.max_len = len;
        cap.source = Some((bound, reason));
    }
}

struct DmSearch {
    checker: DisjointChecker,
    m: usize,
    mult_cap: Vec<usize>,
    counts: Vec<u8>,
    seq: Vec<usize>,
    target: usize,
    max_len: usize,
    best: Option<Vec<usize>>,
    nodes: u64,
    budget: Budget,
    started: Instant,
    stopped: bool,
    out_of_budget: bool,
    capped: bool,
}

impl DmSearch {
    fn visit(&mut self) {
        self.nodes += 1;
        if self.nodes > self.budget.max_nodes
            || (self.nodes & 0xfff == 0 && self.started.elapsed() >= self.budget.max_time)
        {
            self.out_of_budget = true;
            self.stopped = true;
            return;
        }
        let depth = self.seq.len();
        if depth >= self.target {
            self.best = Some(self.seq.clone());
            self.target = depth + 1;
            if self.target > self.max_len {
                self.capped = true;
                self.stopped = true;
                return;
            }
        }
        let start = self.seq.last().copied().unwrap_or(0);
        let optimistic: usize = (start..self.counts.len())
            .map(|y| self.mult_cap[y] - self.counts[y] as usize)
            .sum();
        if depth + optimistic.min(self.max_len - depth) < self.target {
            return;
        }
        for y in start..self.counts.len() {
            if self.stopped {
                return;
            }
            if self.counts[y] as usize >= self.mult_cap[y] {
                continue;
            }
            self.counts[y] += 1;
            if !self.checker.has(&self.counts, self.m) {
                self.seq.push(y);
                self.visit();
                self.seq.pop();
            }
            self.counts[y] -= 1;
        }
    }
}

/// `D(G)` with the default solver settings.
pub fn exact_davenport(group: &GroupDescriptor, budget: &Budget) -> Result<InvariantResult> {
    Solver::new(budget.clone()).solve(group, InvariantKind::Davenport)
}

pub fn exact_eta(group: &GroupDescriptor, budget: &Budget) -> Result<InvariantResult> {
    Solver::new(budget.clone()).solve(group, InvariantKind::Eta)
}

pub fn exact_s(group: &GroupDescriptor, budget: &Budget) -> Result<InvariantResult> {
    Solver::new(budget.clone()).solve(group, InvariantKind::Egz)
}

pub fn exact_dm(group: &GroupDescriptor, m: u32, budget: &Budget) -> Result<InvariantResult> {
    if m == 0 {
        return Err(Error::invalid("m must be at least 1"));
    }
    Solver::new(budget.clone()).solve(group, InvariantKind::Dm(m))
}

/// `m` pairwise disjoint non-empty zero-sum subsequences of `seq`, as
/// ascending index lists, or `None` if there are fewer than `m`.
pub fn has_m_disjoint_zero_sums(
    seq: &ZSequence,
    group: &GroupDescriptor,
    m: usize,
) -> Result<Option<Vec<Vec<usize>>>> {
    if m == 0 {
        return Err(Error::invalid("m must be at least 1"));
    }
    for g in seq.elements() {
        if !group.contains(g) {
            return Err(Error::invalid(format!("element {g} does not belong to {group}")));
        }
    }
    let mut types: Vec<GroupElement> = seq.elements().to_vec();
    types.sort_by_key(|g| group.rank_of(g));
    types.dedup();
    if seq.len() > u8::MAX as usize {
        return Err(Error::invalid("sequence too long for the disjoint zero-sum checker"));
    }
    let counts: Vec<u8> = types.iter().map(|t| seq.count(t) as u8).collect();
    let mut checker = DisjointChecker::new(group, types);
    let Some(blocks) = checker.decompose(&counts, m) else {
        return Ok(None);
    };
    // hand out concrete indices for each block's multiplicities
    let mut pool: Vec<Vec<usize>> = vec![Vec::new(); checker.types().len()];
    for (i, g) in seq.elements().iter().enumerate() {
        let t = checker.types().iter().position(|t| t == g).expect("type present");
        pool[t].push(i);
    }
    for p in &mut pool {
        p.reverse();
    }
    let mut out = Vec::with_capacity(m);
    for block in blocks {
        let mut idx = Vec::new();
        for (t, &c) in block.iter().enumerate() {
            for _ in 0..c {
                idx.push(pool[t].pop().expect("block within multiplicities"));
            }
        }
        idx.sort_unstable();
        out.push(idx);
    }
    Ok(Some(out))
}

/// Whether `seq` avoids the pattern defining `kind` (so a sequence of that
/// length shows the invariant exceeds it).
pub fn avoids_pattern(seq: &ZSequence, group: &GroupDescriptor, kind: InvariantKind) -> Result<bool> {
    use crate::reach::find_zero_sum;
    if seq.is_empty() {
        return Ok(true);
    }
    let exp = group.exponent() as usize;
    let len = seq.len();
    Ok(match kind {
        InvariantKind::Davenport => find_zero_sum(seq, group, (1, len))?.is_none(),
        InvariantKind::Eta => find_zero_sum(seq, group, (1, exp.min(len)))?.is_none(),
        InvariantKind::Egz => exp > len || find_zero_sum(seq, group, (exp, exp))?.is_none(),
        InvariantKind::Dm(m) => has_m_disjoint_zero_sums(seq, group, m as usize)?.is_none(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> GroupDescriptor {
        s.parse().unwrap()
    }

    fn solve(lit: &str, kind: InvariantKind) -> InvariantResult {
        Solver::new(Budget::default()).solve(&g(lit), kind).unwrap()
    }

    #[test]
    fn davenport_examples() {
        assert_eq!(solve("6", InvariantKind::Davenport).value, 6);
        assert_eq!(solve("2,4", InvariantKind::Davenport).value, 5);
        assert_eq!(solve("2,2,2", InvariantKind::Davenport).value, 4);
        assert_eq!(solve("1", InvariantKind::Davenport).value, 1);
    }

    #[test]
    fn eta_examples() {
        assert_eq!(solve("3", InvariantKind::Eta).value, 3);
        assert_eq!(solve("2,2", InvariantKind::Eta).value, 4);
        assert_eq!(solve("3,3", InvariantKind::Eta).value, 7);
    }

    #[test]
    fn egz_examples() {
        assert_eq!(solve("3", InvariantKind::Egz).value, 5);
        assert_eq!(solve("2,2", InvariantKind::Egz).value, 5);
        assert_eq!(solve("3,3", InvariantKind::Egz).value, 9);
        assert_eq!(solve("1", InvariantKind::Egz).value, 1);
    }

    #[test]
    fn dm_examples() {
        assert_eq!(solve("2,4", InvariantKind::Dm(1)).value, 5);
        assert_eq!(solve("2", InvariantKind::Dm(2)).value, 4);
        let r = solve("3", InvariantKind::Dm(2));
        assert_eq!(r.value, 6);
        let one = g("3").element(&[1]).unwrap();
        assert_eq!(r.certificate, ZSequence::new(vec![one; 5]));
    }

    #[test]
    fn certificates_are_lexicographically_least() {
        // C_6: 1^5 is the least zero-sum-free sequence of length 5
        let r = solve("6", InvariantKind::Davenport);
        let one = g("6").element(&[1]).unwrap();
        assert_eq!(r.certificate, ZSequence::new(vec![one; 5]));
        // s(C_3): 0^2 1^2
        let r = solve("3", InvariantKind::Egz);
        let c3 = g("3");
        let want: ZSequence = [0, 0, 1, 1].iter().map(|&c| c3.element(&[c]).unwrap()).collect();
        assert_eq!(r.certificate, want);
    }

    #[test]
    fn disjoint_examples() {
        let c2 = g("2");
        let zero = c2.identity();
        let s = ZSequence::new(vec![zero.clone(), zero]);
        assert_eq!(has_m_disjoint_zero_sums(&s, &c2, 2).unwrap(), Some(vec![vec![0], vec![1]]));

        let c3 = g("3");
        let one = c3.element(&[1]).unwrap();
        let s5 = ZSequence::new(vec![one.clone(); 5]);
        assert_eq!(has_m_disjoint_zero_sums(&s5, &c3, 2).unwrap(), None);
        let s6 = ZSequence::new(vec![one; 6]);
        let w = has_m_disjoint_zero_sums(&s6, &c3, 2).unwrap().unwrap();
        assert_eq!(w.len(), 2);
        let mut all: Vec<usize> = w.concat();
        all.sort_unstable();
        all.dedup();
        assert_eq!(all.len(), 6);
    }

    #[test]
    fn disjoint_rejects_foreign_elements() {
        let s = ZSequence::new(vec![g("5").element(&[1]).unwrap()]);
        assert!(has_m_disjoint_zero_sums(&s, &g("2,2"), 1).is_err());
        assert!(has_m_disjoint_zero_sums(&s, &g("5"), 0).is_err());
    }

    #[test]
    fn budget_exhaustion_reports_lower_bound() {
        let tiny = Budget {
            max_nodes: 1,
            max_time: Duration::from_secs(60),
        };
        // exhaustive search so no known bound closes it early
        let err = Solver::new(tiny).exhaustive_only().solve(&g("3,3,3"), InvariantKind::Davenport);
        match err {
            Err(Error::BudgetExhausted { best_lower_bound, .. }) => assert!(best_lower_bound >= 2),
            other => panic!("expected budget exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("D".parse::<InvariantKind>().unwrap(), InvariantKind::Davenport);
        assert_eq!("eta".parse::<InvariantKind>().unwrap(), InvariantKind::Eta);
        assert_eq!("s".parse::<InvariantKind>().unwrap(), InvariantKind::Egz);
        assert_eq!("D_3".parse::<InvariantKind>().unwrap(), InvariantKind::Dm(3));
        assert!("D_0".parse::<InvariantKind>().is_err());
        assert!("x".parse::<InvariantKind>().is_err());
        assert_eq!(InvariantKind::Dm(2).to_string(), "D_2");
    }
}
