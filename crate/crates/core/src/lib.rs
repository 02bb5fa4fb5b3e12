//! Construction, exact verification, bounds and exhaustive search for
//! almost affinely disjoint (AAD) and almost sparse (AS) families of
//! `k`-dimensional subspaces of `F_q^n`, plus the batch codes built from them.
//!
//! The layers build on each other:
//!
//! - [`gf`]: arithmetic in `GF(p^m)` with a designated primitive element.
//! - [`matgf`]: dense matrices and RREF over a field.
//! - [`subspace`]: canonical subspaces, cosets and Grassmannian enumeration.
//! - [`family`]: partial-spread checks and the exact `L` parameters with witnesses.
//! - [`constructions`]: the Reed-Solomon, parity-check and random builders; bounds.
//! - [`search`]: branch-and-bound and greedy search for maximal AAD families.
//! - [`batch`]: systematic batch codes from AAD families.
//! - [`cli`]: the `subspace-forge` command surface.

pub mod batch;
pub mod cli;
pub mod constructions;
pub mod family;
pub mod gf;
pub mod matgf;
pub mod search;
pub mod subspace;

pub use constructions::{
    bound_theorem1, bound_theorem1_no_spread, build_code_based_family, build_random_family,
    build_rs_family, theorem3_l, RandomParams, RsCode,
};
pub use family::{
    check_partial_spread, check_relations, compute_l_aad, compute_l_as, coset_hits, verify_family,
    verify_theorem1, Family, VerificationReport, VerifyOptions,
};
pub use gf::{Elem, Field};
pub use matgf::Matrix;
pub use subspace::{enumerate_subspaces, gaussian_binomial, AffineCoset, Subspace};
