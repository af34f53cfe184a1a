//! An explicit exponential family of non-periodic tilings.
//!
//! For distinct primes p, q ∉ {2, 3, 5}, the group Z_{30pq} splits as
//! Z_{3p} × Z_{5q} × Z_2. A 3×5 rectangle in the first two coordinates
//! tiles it together with a two-layer grid of rectangle origins, and the
//! grid tolerates perturbation: each row of the lower layer may slide
//! horizontally by 0, 1, or 2, and one column of the upper layer may slide
//! vertically by 1 through 4, without breaking the tiling. Distinct
//! perturbations give distinct complements, and restricting the row slides
//! to the first ⌈q/2⌉ rows (not all zero) rules every period out, so the
//! construction yields more than 3^(q/2) non-periodic tilings of Z_{30pq}
//! — exponentially many in the modulus.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numth;
use crate::zset::ResidueSet;

/// Largest modulus 30pq the construction will build.
pub const MAX_LOWERBOUND_N: u64 = 100_000;

/// Validate p and q and return the modulus 30pq.
fn modulus_for(p: u64, q: u64) -> Result<u64> {
    for v in [p, q] {
        let f = numth::factorize(v)?;
        if f.factors() != [(v, 1)] {
            return Err(Error::domain(format!("lower bound: {v} is not prime")));
        }
        if matches!(v, 2 | 3 | 5) {
            return Err(Error::domain(
                "lower bound: p and q must avoid the primes 2, 3, 5",
            ));
        }
    }
    if p == q {
        return Err(Error::domain("lower bound: p and q must be distinct"));
    }
    let n = 30 * p * q;
    if n > MAX_LOWERBOUND_N {
        return Err(Error::domain(format!(
            "lower bound: 30pq = {n} exceeds {MAX_LOWERBOUND_N}"
        )));
    }
    Ok(n)
}

fn embed(p: u64, q: u64, x: u64, y: u64, z: u64) -> u64 {
    numth::crt_combine(&[3 * p, 5 * q, 2], &[x as i64, y as i64, z as i64])
        .expect("3p, 5q, 2 are pairwise coprime and residues are reduced")
}

/// The 15-element rectangle {0,1,2} × {0,…,4} × {0} under the isomorphism
/// Z_{30pq} ≅ Z_{3p} × Z_{5q} × Z_2.
pub fn rectangle_tile(p: u64, q: u64) -> Result<ResidueSet> {
    let n = modulus_for(p, q)?;
    let mut members = Vec::with_capacity(15);
    for i in 0..3 {
        for j in 0..5 {
            members.push(embed(p, q, i, j, 0));
        }
    }
    let set = ResidueSet::from_members(n, &members)?;
    debug_assert_eq!(set.len(), 15);
    Ok(set)
}

/// How one copy of the origin grid is perturbed. Row j of the lower layer
/// slides right by `row_shifts[j]` (rows past ⌈q/2⌉ stay fixed); column
/// `column_index` of the upper layer slides up by `column_shift`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PerturbationSpec {
    /// Which upper-layer column slides; in [0, p).
    pub column_index: u64,
    /// How far it slides; in [1, 5).
    pub column_shift: u64,
    /// Lower-layer row slides, each in [0, 3), not all zero; exactly
    /// ⌈q/2⌉ entries.
    pub row_shifts: Vec<u64>,
}

impl PerturbationSpec {
    pub fn validate(&self, p: u64, q: u64) -> Result<()> {
        modulus_for(p, q)?;
        if self.column_index >= p {
            return Err(Error::domain(format!(
                "perturbation: column index {} out of range for p = {p}",
                self.column_index
            )));
        }
        if !(1..5).contains(&self.column_shift) {
            return Err(Error::domain(format!(
                "perturbation: column shift {} must be 1..4",
                self.column_shift
            )));
        }
        let rows = (q + 1) / 2;
        if self.row_shifts.len() as u64 != rows {
            return Err(Error::domain(format!(
                "perturbation: expected {rows} row shifts, got {}",
                self.row_shifts.len()
            )));
        }
        if self.row_shifts.iter().any(|&s| s >= 3) {
            return Err(Error::domain("perturbation: row shifts must be 0, 1, or 2"));
        }
        if self.row_shifts.iter().all(|&s| s == 0) {
            return Err(Error::domain(
                "perturbation: row shifts must not all be zero",
            ));
        }
        Ok(())
    }
}

/// The perturbed complement of the rectangle: 2pq rectangle origins, one
/// per (column, row) on each layer. Rows of the lower layer slide
/// horizontally, so each row still tiles its strip; the chosen upper
/// column slides vertically likewise. The result tiles with the rectangle
/// for every spec and is non-periodic for every valid one.
pub fn perturbed_complement(p: u64, q: u64, spec: &PerturbationSpec) -> Result<ResidueSet> {
    let n = modulus_for(p, q)?;
    spec.validate(p, q)?;
    let rows = ((q + 1) / 2) as usize;
    let mut members = Vec::with_capacity((2 * p * q) as usize);
    for i in 0..p {
        let tau = if i == spec.column_index {
            spec.column_shift
        } else {
            0
        };
        for j in 0..q {
            let sigma = if (j as usize) < rows {
                spec.row_shifts[j as usize]
            } else {
                0
            };
            members.push(embed(p, q, (3 * i + sigma) % (3 * p), 5 * j, 0));
            members.push(embed(p, q, 3 * i, (5 * j + tau) % (5 * q), 1));
        }
    }
    let set = ResidueSet::from_members(n, &members)?;
    if set.len() as u64 != 2 * p * q {
        return Err(Error::domain(
            "perturbation: origin grid collided (bug)".to_string(),
        ));
    }
    Ok(set)
}

/// How many valid perturbation specs exist: p · 4 · (3^⌈q/2⌉ − 1),
/// saturating at u64::MAX.
pub fn total_specs(p: u64, q: u64) -> Result<u64> {
    modulus_for(p, q)?;
    let mut pow = 1u128;
    for _ in 0..(q + 1) / 2 {
        pow = pow.saturating_mul(3);
        if pow > u64::MAX as u128 {
            return Ok(u64::MAX);
        }
    }
    Ok((p as u128)
        .saturating_mul(4)
        .saturating_mul(pow - 1)
        .min(u64::MAX as u128) as u64)
}

/// Draw `count` distinct perturbation specs (seeded, reproducible) and
/// build their complements. Errors if more specs are requested than exist.
pub fn sample_complements(
    p: u64,
    q: u64,
    count: usize,
    seed: u64,
) -> Result<Vec<(PerturbationSpec, ResidueSet)>> {
    modulus_for(p, q)?;
    if count as u64 > total_specs(p, q)? {
        return Err(Error::domain(format!(
            "lower bound: only {} distinct perturbations exist",
            total_specs(p, q)?
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = ((q + 1) / 2) as usize;
    let mut seen: HashSet<PerturbationSpec> = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let spec = PerturbationSpec {
            column_index: rng.gen_range(0..p),
            column_shift: rng.gen_range(1..5),
            row_shifts: loop {
                let shifts: Vec<u64> = (0..rows).map(|_| rng.gen_range(0..3)).collect();
                if shifts.iter().any(|&s| s != 0) {
                    break shifts;
                }
            },
        };
        if seen.insert(spec.clone()) {
            let complement = perturbed_complement(p, q, &spec)?;
            out.push((spec, complement));
        }
    }
    Ok(out)
}
