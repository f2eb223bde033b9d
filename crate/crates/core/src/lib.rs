//! Simulated quantum query algorithms for approximate k-mismatch matching.
//!
//! The crate models the query complexity of a gap Hamming-distance decider
//! built on quantum counting, a bounded-error weak search on top of it, and
//! the resulting matcher, all on a classical simulator with two backends:
//! a dense statevector and closed-form outcome distributions.

pub mod analytic;
pub mod backend;
pub mod decider;
pub mod error;
pub mod harness;
pub mod matcher;
pub mod oracles;
pub mod par;
pub mod qsearch;
pub mod statevector;
pub mod types;
pub mod weak_search;

pub use backend::{BackendHandle, BackendKind, SearchSource};
pub use decider::{approx_bounded_hamming_decider, compute_alpha, compute_beta, compute_m, DeciderParams};
pub use error::{Error, Result};
pub use matcher::{approx_bounded_dist_matching, position_decider, MatchReport, MatcherConfig};
pub use oracles::{hamming_distance, Distance, TrichotomyLabel};
pub use par::ExecMode;
pub use qsearch::{qsearch_prime, QSearchConfig};
pub use types::{validate_instance, CountEstimate, Epsilon, MatchInstance, QueryCounter, RngSeed, TrialRng};
pub use weak_search::{weak_search, BoundedErrorDecider, WeakSearchConfig};
