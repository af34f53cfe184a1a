//! Cyclotomic polynomials and cyclotomic divisibility of set masks.
//!
//! Everything downstream — tiling verification by signatures, the tiling
//! conditions, the classification — reduces to one primitive: does Φ_d
//! divide the mask polynomial A(X) = Σ_{a ∈ A} X^a? That check is exact
//! integer arithmetic throughout; no roots of unity are ever approximated.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::numth::{self, split_prime_power, PrimePowerSet};
use crate::poly::IntPoly;
use crate::zset::ResidueSet;

/// Ceiling for cyclotomic indices; keeps worst-case intermediate degrees
/// (σ(n) for the Möbius product) comfortably bounded.
pub const MAX_CYCLOTOMIC_INDEX: u64 = 100_000;

/// The n-th cyclotomic polynomial Φ_n, computed once and cached for the
/// life of the process (results are shared, so clones are cheap).
///
/// Uses the Möbius inversion of X^n − 1 = ∏_{d|n} Φ_d: multiply the
/// binomials X^{n/d} − 1 with μ(d) = 1, then exactly divide by those with
/// μ(d) = −1. The division cannot fail; a failure would mean broken
/// arithmetic, so it panics rather than returning an error.
pub fn cyclotomic(n: u64) -> Result<Arc<IntPoly>> {
    if n == 0 {
        return Err(Error::domain("cyclotomic: index must be positive"));
    }
    if n > MAX_CYCLOTOMIC_INDEX {
        return Err(Error::domain(format!(
            "cyclotomic: index {n} exceeds the supported bound {MAX_CYCLOTOMIC_INDEX}"
        )));
    }
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(hit) = cache.read().unwrap().get(&n) {
        return Ok(Arc::clone(hit));
    }
    let computed = Arc::new(compute_cyclotomic(n)?);
    let mut guard = cache.write().unwrap();
    Ok(Arc::clone(
        guard.entry(n).or_insert(computed),
    ))
}

static CACHE: OnceLock<RwLock<HashMap<u64, Arc<IntPoly>>>> = OnceLock::new();

/// Drop all cached cyclotomic polynomials. Only useful for memory and
/// benchmark hygiene; correctness never depends on the cache state.
pub fn clear_cache() {
    if let Some(cache) = CACHE.get() {
        cache.write().unwrap().clear();
    }
}

fn compute_cyclotomic(n: u64) -> Result<IntPoly> {
    let mut numerator = IntPoly::one();
    let mut denominator = IntPoly::one();
    for d in numth::divisors(n)? {
        let binomial = IntPoly::x_pow_minus_one((n / d) as usize);
        match numth::mobius(d)? {
            1 => numerator = numerator.multiply(&binomial)?,
            -1 => denominator = denominator.multiply(&binomial)?,
            _ => {}
        }
    }
    let phi = numerator
        .exact_divide(&denominator)?
        .expect("Mobius product is exactly divisible");
    debug_assert_eq!(
        phi.degree(),
        Some(numth::factorize(n)?.phi() as usize),
        "deg Φ_{n} must be φ({n})"
    );
    Ok(phi)
}

/// Φ_s(1): p when s is a power of the prime p, otherwise 1 (s ≥ 2).
///
/// Computed from the factorization of s; the polynomial evaluation route
/// serves as an independent oracle in tests.
pub fn phi_at_one(s: u64) -> Result<u64> {
    if s < 2 {
        return Err(Error::domain("phi_at_one: defined for s >= 2"));
    }
    Ok(match split_prime_power(s)? {
        Some((p, _)) => p,
        None => 1,
    })
}

/// Does Φ_d divide the mask of A? (d ≥ 2.)
///
/// The mask is first folded mod X^d − 1 — legitimate because Φ_d divides
/// X^d − 1 — then divided by Φ_d. This makes the check O(d · |A|)-ish
/// instead of degree-of-mask sized.
pub fn divides_mask(d: u64, a: &ResidueSet) -> Result<bool> {
    if d < 2 {
        return Err(Error::domain("divides_mask: d must be at least 2"));
    }
    let folded: Vec<u64> = a.iter().map(|m| m % d).collect();
    let mask = IntPoly::mask(&folded)?;
    mask.divisible_by(cyclotomic(d)?.as_ref())
}

/// The divisor signature of a nonempty A ⊆ Z_N: every divisor d ≥ 2 of N
/// with Φ_d | A(X). This is an exact encoding of which Fourier coefficients
/// of the indicator of A vanish.
pub fn signature(a: &ResidueSet) -> Result<DivisorSignature> {
    if a.is_empty() {
        return Err(Error::domain("signature: empty set"));
    }
    let n = a.modulus();
    let mut members = Vec::new();
    for d in numth::divisors(n)? {
        if d >= 2 && divides_mask(d, a)? {
            members.push(d);
        }
    }
    DivisorSignature::new(n, members)
}

/// A set of divisors d ≥ 2 of a fixed modulus N: the zero set of a mask in
/// cyclotomic terms. Displayed as a comma list, ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DivisorSignature {
    modulus: u64,
    members: Vec<u64>,
}

impl DivisorSignature {
    /// Validates every member: a divisor of `modulus`, at least 2.
    pub fn new(modulus: u64, members: impl IntoIterator<Item = u64>) -> Result<Self> {
        if modulus == 0 || modulus > numth::MAX_N {
            return Err(Error::domain(format!(
                "DivisorSignature: bad modulus {modulus}"
            )));
        }
        let mut members: Vec<u64> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        for &d in &members {
            if d < 2 || modulus % d != 0 {
                return Err(Error::domain(format!(
                    "DivisorSignature: {d} is not a divisor >= 2 of {modulus}"
                )));
            }
        }
        Ok(DivisorSignature { modulus, members })
    }

    pub fn empty(modulus: u64) -> Result<Self> {
        DivisorSignature::new(modulus, [])
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Member divisors, ascending.
    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, d: u64) -> bool {
        self.members.binary_search(&d).is_ok()
    }

    pub fn is_subset(&self, other: &DivisorSignature) -> bool {
        self.members.iter().all(|&d| other.contains(d))
    }

    /// Union within the same modulus.
    pub fn union(&self, other: &DivisorSignature) -> Result<DivisorSignature> {
        if self.modulus != other.modulus {
            return Err(Error::domain(format!(
                "DivisorSignature::union: mismatched moduli {} and {}",
                self.modulus, other.modulus
            )));
        }
        let mut members = self.members.clone();
        members.extend_from_slice(&other.members);
        DivisorSignature::new(self.modulus, members)
    }

    /// Divisors d ≥ 2 of N that are *not* in this signature.
    pub fn complement_within_divisors(&self) -> Vec<u64> {
        numth::divisors(self.modulus)
            .expect("modulus validated at construction")
            .into_iter()
            .filter(|&d| d >= 2 && !self.contains(d))
            .collect()
    }

    /// The prime-power members — the spectrum part of the signature.
    pub fn prime_power_part(&self) -> PrimePowerSet {
        PrimePowerSet::new(
            self.members
                .iter()
                .copied()
                .filter(|&d| split_prime_power(d).unwrap().is_some()),
        )
        .expect("filtered to prime powers")
    }
}

impl fmt::Display for DivisorSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for d in &self.members {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
            first = false;
        }
        Ok(())
    }
}

/// Batch signature computations against one modulus.
///
/// `classify` tests cyclotomic divisibility for millions of candidate sets;
/// going through `IntPoly` each time would thrash allocations. This engine
/// pre-extracts each Φ_d as (degree, sparse lower terms) and reuses one
/// scratch buffer: fold the members mod d, run a synthetic division in
/// place, and look at the remainder. Arithmetic stays checked — a verdict
/// produced by wrapped arithmetic would be worse than a crash.
pub struct SigEngine {
    n: u64,
    nontrivial: Vec<u64>,
    /// Per divisor: (deg Φ_d, nonzero lower terms of Φ_d as (exponent, coeff)).
    terms: Vec<(usize, Vec<(usize, i64)>)>,
    scratch: Vec<i64>,
}

impl SigEngine {
    pub fn new(n: u64) -> Result<Self> {
        let nontrivial: Vec<u64> = numth::divisors(n)?
            .into_iter()
            .filter(|&d| d >= 2)
            .collect();
        let mut terms = Vec::with_capacity(nontrivial.len());
        for &d in &nontrivial {
            let phi = cyclotomic(d)?;
            let deg = phi.degree().expect("cyclotomic polynomials are nonzero");
            let lower: Vec<(usize, i64)> = phi.coeffs()[..deg]
                .iter()
                .enumerate()
                .filter(|&(_, &c)| c != 0)
                .map(|(i, &c)| (i, c))
                .collect();
            terms.push((deg, lower));
        }
        Ok(SigEngine {
            n,
            nontrivial,
            terms,
            scratch: vec![0; n as usize],
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Divisors d ≥ 2 of n, ascending; `signature_bits` bit i refers to
    /// `nontrivial()[i]`.
    pub fn nontrivial(&self) -> &[u64] {
        &self.nontrivial
    }

    pub fn index_of(&self, d: u64) -> Option<usize> {
        self.nontrivial.binary_search(&d).ok()
    }

    /// Does Φ_{d} | Σ X^m for the divisor at `idx`? Members are residues
    /// mod n (n itself is fine too; they are folded further mod d anyway).
    pub fn divides(&mut self, idx: usize, members: &[u64]) -> Result<bool> {
        let d = self.nontrivial[idx] as usize;
        let (deg, ref lower) = self.terms[idx];
        let scratch = &mut self.scratch[..d];
        scratch.fill(0);
        for &m in members {
            scratch[m as usize % d] += 1;
        }
        // Synthetic division by the monic Φ_d, top down; quotient digits
        // land where the dividend was, the low `deg` slots end up holding
        // the remainder.
        for i in (deg..d).rev() {
            let q = scratch[i];
            if q == 0 {
                continue;
            }
            for &(j, c) in lower {
                let sub = q.checked_mul(c).ok_or(Error::Overflow("SigEngine"))?;
                let slot = &mut scratch[i - deg + j];
                *slot = slot.checked_sub(sub).ok_or(Error::Overflow("SigEngine"))?;
            }
        }
        Ok(scratch[..deg].iter().all(|&c| c == 0))
    }

    /// Full signature as a bitmask over `nontrivial()`. Only usable when n
    /// has at most 64 nontrivial divisors, which covers every modulus
    /// classification handles.
    pub fn signature_bits(&mut self, members: &[u64]) -> Result<u64> {
        assert!(self.nontrivial.len() <= 64, "too many divisors for a bitmask");
        let mut bits = 0u64;
        for idx in 0..self.nontrivial.len() {
            if self.divides(idx, members)? {
                bits |= 1 << idx;
            }
        }
        Ok(bits)
    }

    /// Reconstruct a `DivisorSignature` from `signature_bits` output.
    pub fn signature_from_bits(&self, bits: u64) -> DivisorSignature {
        DivisorSignature::new(
            self.n,
            self.nontrivial
                .iter()
                .enumerate()
                .filter(|&(i, _)| bits >> i & 1 == 1)
                .map(|(_, &d)| d),
        )
        .expect("divisors of n are valid members")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomics() {
        assert_eq!(cyclotomic(1).unwrap().coeffs(), &[-1, 1]);
        assert_eq!(cyclotomic(2).unwrap().coeffs(), &[1, 1]);
        assert_eq!(cyclotomic(3).unwrap().coeffs(), &[1, 1, 1]);
        assert_eq!(cyclotomic(4).unwrap().coeffs(), &[1, 0, 1]);
        assert_eq!(cyclotomic(9).unwrap().coeffs(), &[1, 0, 0, 1, 0, 0, 1]);
        assert_eq!(cyclotomic(12).unwrap().coeffs(), &[1, 0, -1, 0, 1]);
        assert!(cyclotomic(0).is_err());
    }

    #[test]
    fn cyclotomic_cache_shares_results() {
        let a = cyclotomic(144).unwrap();
        let b = cyclotomic(144).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }

    #[test]
    fn phi_105_has_coefficient_minus_two() {
        // The smallest index with a coefficient outside {-1, 0, 1}.
        let phi = cyclotomic(105).unwrap();
        assert_eq!(phi.coeff(7), -2);
        assert_eq!(phi.degree(), Some(48));
    }

    #[test]
    fn products_reconstruct_x_n_minus_one() {
        for n in [1u64, 2, 9, 12, 30, 144] {
            let mut prod = IntPoly::one();
            for d in numth::divisors(n).unwrap() {
                prod = prod.multiply(&cyclotomic(d).unwrap()).unwrap();
            }
            assert_eq!(prod, IntPoly::x_pow_minus_one(n as usize), "n = {n}");
        }
    }

    #[test]
    fn phi_at_one_examples() {
        assert_eq!(phi_at_one(8).unwrap(), 2);
        assert_eq!(phi_at_one(9).unwrap(), 3);
        assert_eq!(phi_at_one(12).unwrap(), 1);
        assert_eq!(phi_at_one(2).unwrap(), 2);
        assert!(phi_at_one(1).is_err());
    }

    #[test]
    fn phi_at_one_matches_polynomial_evaluation() {
        for s in 2u64..=200 {
            assert_eq!(
                phi_at_one(s).unwrap(),
                cyclotomic(s).unwrap().eval_at_one().unwrap() as u64,
                "s = {s}"
            );
        }
    }

    #[test]
    fn divides_mask_examples() {
        let a = ResidueSet::from_members(10, &[0, 1, 2, 5, 6, 7]).unwrap();
        assert!(divides_mask(2, &a).unwrap());
        assert!(!divides_mask(6, &a).unwrap());
        assert!(divides_mask(1, &a).is_err());
        // The full set's mask folds to d copies of everything: divisible by
        // every Φ_d with d | N.
        let full = ResidueSet::full(12).unwrap();
        for d in [2u64, 3, 4, 6, 12] {
            assert!(divides_mask(d, &full).unwrap());
        }
    }

    #[test]
    fn signature_examples() {
        // A known non-periodic tile of Z_144 with signature
        // {3,4,6,12,24,36,48}.
        let b = ResidueSet::parse(144, "0,32,58,90,112,122").unwrap();
        assert_eq!(
            signature(&b).unwrap().members(),
            &[3, 4, 6, 12, 24, 36, 48]
        );
        // The full set carries every divisor; a singleton carries none.
        let full = signature(&ResidueSet::full(36).unwrap()).unwrap();
        assert_eq!(full.members(), &[2, 3, 4, 6, 9, 12, 18, 36]);
        let single = signature(&ResidueSet::from_members(36, &[7]).unwrap()).unwrap();
        assert!(single.is_empty());
        assert!(signature(&ResidueSet::empty(6).unwrap()).is_err());
    }

    #[test]
    fn signature_is_translation_invariant() {
        let a = ResidueSet::from_members(24, &[0, 3, 5, 14, 17]).unwrap();
        let sig = signature(&a).unwrap();
        for t in 0..24 {
            assert_eq!(signature(&a.translate(t)).unwrap(), sig);
        }
    }

    #[test]
    fn signature_agrees_with_symbolic_division() {
        // Independent route: build the unfolded mask as an IntPoly, reduce
        // mod X^N - 1, and exact-divide by Φ_d.
        for (n, members) in [
            (12u64, vec![0u64, 1, 2, 6, 7, 8]),
            (18, vec![0, 5, 6, 11, 12, 17]),
            (36, vec![0, 4, 8, 9, 13, 17]),
        ] {
            let a = ResidueSet::from_members(n, &members).unwrap();
            let sig = signature(&a).unwrap();
            let mask = IntPoly::mask(&members)
                .unwrap()
                .reduce_cyclic(n as usize)
                .unwrap();
            for d in numth::divisors(n).unwrap() {
                if d < 2 {
                    continue;
                }
                let direct = mask.divisible_by(&cyclotomic(d).unwrap()).unwrap();
                assert_eq!(sig.contains(d), direct, "n = {n}, d = {d}");
            }
        }
    }

    #[test]
    fn divisor_signature_validation_and_ops() {
        assert!(DivisorSignature::new(12, [5]).is_err());
        assert!(DivisorSignature::new(12, [1]).is_err());
        let s = DivisorSignature::new(12, [6, 2, 6]).unwrap();
        assert_eq!(s.members(), &[2, 6]);
        assert_eq!(s.to_string(), "2,6");
        let t = DivisorSignature::new(12, [3, 12]).unwrap();
        assert_eq!(s.union(&t).unwrap().members(), &[2, 3, 6, 12]);
        assert!(s.union(&DivisorSignature::empty(6).unwrap()).is_err());
        assert_eq!(s.complement_within_divisors(), vec![3, 4, 12]);
        assert!(s.is_subset(&s.union(&t).unwrap()));
        let pp = DivisorSignature::new(144, [2, 6, 9, 16, 24])
            .unwrap()
            .prime_power_part();
        assert_eq!(pp.elements(), &[2, 9, 16]);
    }

    #[test]
    fn engine_matches_signature() {
        let mut engine = SigEngine::new(144).unwrap();
        for literal in [
            "0,32,58,90,112,122",
            "0,1,2,3",
            "0,48,96",
            "0,17,20,23,28,29,40,48,53,59,65,68,76,88,89,95,96,101,116,124,125,131,136,137",
        ] {
            let a = ResidueSet::parse(144, literal).unwrap();
            let bits = engine.signature_bits(&a.members()).unwrap();
            assert_eq!(engine.signature_from_bits(bits), signature(&a).unwrap());
        }
    }
}
