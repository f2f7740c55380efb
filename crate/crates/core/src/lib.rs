//! Zero-sum invariants of finite abelian groups.
//!
//! * [`group`]: groups in invariant-factor form, elements and sequences.
//! * [`reach`]: subset-sum reachability and zero-sum witness search.
//! * [`exact`]: exact `D(G)`, `η(G)`, `s(G)` and `D_m(G)` for small groups.
//! * [`bounds`]: closed-form bounds and the constants they depend on.
//! * [`smooth`]: perfect-power products of smooth integers.

pub mod bounds;
pub mod error;
pub mod exact;
pub mod group;
pub mod primes;
pub mod reach;
pub mod smooth;

pub use error::{Error, Result};
pub use exact::{
    exact_davenport, exact_dm, exact_eta, exact_s, has_m_disjoint_zero_sums, Budget, InvariantKind, InvariantResult,
    Solver, UpperBoundProof,
};
pub use group::{canonicalize, sigma, GroupDescriptor, GroupElement, ZSequence};
pub use reach::{find_shortest_zero_sum, find_zero_sum, Layering, ReachState};
