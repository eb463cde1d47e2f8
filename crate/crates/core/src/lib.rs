//! Exact arithmetic for quantum cluster seeds.
//!
//! A seed is a compatible pair `(B̃, Λ)` together with cluster variables
//! written as quantum Laurent polynomials over the initial quantum torus.
//! Mutation computes new variables by exact division inside the torus, so
//! the Laurent property is checked rather than assumed.
//!
//! ```
//! use qcluster::{IntMatrix, QuantumSeed};
//!
//! let b = IntMatrix::from_rows(&[[0], [1]]).unwrap();
//! let lambda = IntMatrix::from_rows(&[[0, -1], [1, 0]]).unwrap();
//! let seed = QuantumSeed::from_matrices(b, lambda).unwrap();
//! let mu = seed.mutate(0).unwrap();
//! assert_eq!(mu.vars()[0].to_string(), "q^(-1/2)*X1^(-1)*X2 + X1^(-1)");
//! assert_eq!(mu.mutate(0).unwrap(), seed);
//! ```
//!
//! Indices are 0-based throughout the library. Mutation words in files,
//! reports and on the command line are 1-based (see [`MutationWord`]).

pub mod centralizer;
pub mod classical;
pub mod duplicate;
pub mod explore;
pub mod io;
mod lattice;
pub mod matrix;
pub mod qcoeff;
pub mod seed;
pub mod torus;

pub use centralizer::{centralizer_report, joint_centralizer_basis, CentralizerReport};
pub use classical::{poisson_bracket, Laurent};
pub use duplicate::{doubled_lambda, duplicate_seed, DuplicatedSeed};
pub use explore::{
    check_total_sign_coherence, explore, explore_seeds, periodicity_scan, Counterexample, Exploration, ExplorationReport,
    ExploreError, ExploreOptions, MutationWord, Periodicity, Violation,
};
pub use io::{load_seed, save_seed, seed_digest, BcdFile, FormatError, SeedFile};
pub use matrix::{
    check_compatible, check_compatible_rational, is_principal, is_sign_coherent, lambda_from_bcd, mutate_matrix,
    skew_symmetrizer, Diagonal, IntMatrix, MatrixError, RationalMatrix, Sign,
};
pub use qcoeff::{HalfInteger, QCoefficient};
pub use seed::{recover_lambda, ExchangeData, QuantumSeed, SeedError};
pub use torus::{ExponentVector, QuantumLaurent, Torus, TorusError};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/torus.md")]
    mod torus {}
    #[doc = include_str!("../../../book/src/compatible-pairs.md")]
    mod compatible_pairs {}
    #[doc = include_str!("../../../book/src/mutation.md")]
    mod mutation {}
    #[doc = include_str!("../../../book/src/integrability.md")]
    mod integrability {}
    #[doc = include_str!("../../../book/src/exploration.md")]
    mod exploration {}
    #[doc = include_str!("../../../book/src/duplication.md")]
    mod duplication {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
