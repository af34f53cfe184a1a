//! Exact arithmetic for translational tilings of finite cyclic groups.
//!
//! A tiling of Z_N is a pair of sets with A ⊕ B = Z_N: every element is a
//! sum a + b in exactly one way. Everything here runs on exact integer
//! arithmetic — mask polynomials, cyclotomic divisors, and bitset searches
//! — so every verdict is a proof, not a float inequality.
//!
//! The pieces:
//!
//! - [`numth`]: factorization, divisors, prime-power sets, CRT.
//! - [`poly`]: dense integer polynomials with exact division.
//! - [`cyclo`]: cyclotomic polynomials Φ_d and divisor signatures — the
//!   set of d | N with Φ_d dividing a set's mask polynomial.
//! - [`zset`]: residue sets in Z_N, tiling verification, periodicity.
//! - [`cm`]: the two tiling conditions on a set's spectrum; sufficiency
//!   gives a decision procedure for one-shot "does this tile?" queries.
//! - [`fillout`]: complete complement search by the fill-out recursion.
//! - [`classify`]: the full classification of non-periodic tilings of Z_N,
//!   partition by partition.
//! - [`lowerbound`]: an explicit exponential family of non-periodic
//!   tilings of Z_{30pq}.

pub mod classify;
pub mod cm;
pub mod cyclo;
pub mod error;
pub mod fillout;
pub mod lowerbound;
pub mod numth;
pub mod poly;
pub mod zset;

pub use classify::{
    admits_nonperiodic_pair, classify, ClassificationReport, ClassifyConfig, JsonReport,
    Partition, PartitionReport, PartitionStatus, TileClass,
};
pub use cm::{decide_tiles_z, decide_tiles_zn, CmReport, Verdict};
pub use cyclo::{cyclotomic, signature, DivisorSignature, SigEngine};
pub use error::{Error, Result};
pub use fillout::{explore, explore_with, nonperiodic_orbits, FillOutConfig, MemoMode};
pub use lowerbound::{perturbed_complement, rectangle_tile, sample_complements, PerturbationSpec};
pub use numth::{divisors, factorize, PrimePowerSet};
pub use poly::IntPoly;
pub use zset::{verify_tiling, ResidueSet};
