//! Subsets of Z_N as bit vectors, plus the tiling-flavoured operations on
//! them: translation, canonical orbit representatives, least periods, and
//! exact verification that two sets tile by translation.
//!
//! The text form of a set is a comma-separated, strictly ascending list of
//! residues, e.g. `0,32,58,90,112,122`; `parse` and `Display` round-trip it.

use std::cmp::Ordering;
use std::fmt;

use crate::cyclo::DivisorSignature;
use crate::error::{Error, Result};
use crate::numth::{self, MAX_N};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ResidueSet {
    n: u32,
    words: Vec<u64>,
}

fn word_count(n: u32) -> usize {
    (n as usize + 63) / 64
}

impl ResidueSet {
    fn check_modulus(n: u64) -> Result<u32> {
        if n == 0 {
            return Err(Error::domain("ResidueSet: modulus must be positive"));
        }
        if n > MAX_N {
            return Err(Error::domain(format!(
                "ResidueSet: modulus {n} exceeds 2^31"
            )));
        }
        Ok(n as u32)
    }

    /// The empty subset of Z_n.
    pub fn empty(n: u64) -> Result<Self> {
        let n = Self::check_modulus(n)?;
        Ok(ResidueSet {
            n,
            words: vec![0; word_count(n)],
        })
    }

    /// All of Z_n.
    pub fn full(n: u64) -> Result<Self> {
        let mut s = Self::empty(n)?;
        for r in 0..n {
            s.set_bit(r as u32);
        }
        Ok(s)
    }

    /// Build from residues; order and repetition are irrelevant (it is a
    /// set), but every residue must lie in [0, n).
    pub fn from_members(n: u64, members: &[u64]) -> Result<Self> {
        let mut s = Self::empty(n)?;
        for &m in members {
            if m >= n {
                return Err(Error::domain(format!(
                    "ResidueSet: residue {m} out of range for Z_{n}"
                )));
            }
            s.set_bit(m as u32);
        }
        Ok(s)
    }

    /// Parse the set-literal format: strictly ascending residues joined by
    /// commas, no whitespace. The empty string is the empty set.
    pub fn parse(n: u64, literal: &str) -> Result<Self> {
        if literal.is_empty() {
            return Self::empty(n);
        }
        let mut members = Vec::new();
        let mut prev: Option<u64> = None;
        for token in literal.split(',') {
            let value: u64 = token.parse().map_err(|_| {
                Error::domain(format!("set literal: bad residue {token:?}"))
            })?;
            if prev.is_some_and(|p| p >= value) {
                return Err(Error::domain(format!(
                    "set literal: residues must be strictly ascending at {value}"
                )));
            }
            prev = Some(value);
            members.push(value);
        }
        Self::from_members(n, &members)
    }

    fn set_bit(&mut self, r: u32) {
        self.words[(r / 64) as usize] |= 1u64 << (r % 64);
    }

    /// The modulus N.
    pub fn modulus(&self) -> u64 {
        self.n as u64
    }

    pub fn contains(&self, r: u64) -> bool {
        r < self.n as u64 && self.words[(r / 64) as usize] >> (r % 64) & 1 == 1
    }

    /// Cardinality.
    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Members ascending.
    pub fn members(&self) -> Vec<u64> {
        self.iter().collect()
    }

    /// Iterate members ascending.
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            std::iter::successors(Some(w), |&w| Some(w & w.wrapping_sub(1)))
                .take_while(|&w| w != 0)
                .map(move |w| i as u64 * 64 + w.trailing_zeros() as u64)
        })
    }

    /// The translate A + t (elementwise, mod N).
    pub fn translate(&self, t: u64) -> Self {
        let n = self.n as u64;
        let t = t % n;
        let mut out = ResidueSet {
            n: self.n,
            words: vec![0; self.words.len()],
        };
        for m in self.iter() {
            let shifted = (m + t) % n;
            out.set_bit(shifted as u32);
        }
        out
    }

    /// Z_N \ A.
    pub fn complement(&self) -> Self {
        let mut out = ResidueSet {
            n: self.n,
            words: self.words.iter().map(|w| !w).collect(),
        };
        let tail = self.n as usize % 64;
        if tail != 0 {
            *out.words.last_mut().unwrap() &= (1u64 << tail) - 1;
        }
        out
    }

    pub fn is_disjoint(&self, other: &ResidueSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & b == 0)
    }

    /// Order sets of equal cardinality by their ascending member lists.
    /// The first differing bit decides: whichever set contains it is the
    /// smaller one.
    pub(crate) fn cmp_members(&self, other: &ResidueSet) -> Ordering {
        debug_assert_eq!(self.n, other.n);
        debug_assert_eq!(self.len(), other.len());
        for (a, b) in self.words.iter().zip(&other.words) {
            let diff = a ^ b;
            if diff != 0 {
                let low = diff.trailing_zeros();
                return if a >> low & 1 == 1 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                };
            }
        }
        Ordering::Equal
    }

    /// The lexicographically smallest translate of A (comparing ascending
    /// member lists). Every canonical set contains 0. Errors on the empty
    /// set, which has no distinguished translate.
    pub fn canonical_translate(&self) -> Result<Self> {
        if self.is_empty() {
            return Err(Error::domain(
                "canonical_translate: empty set has no canonical form",
            ));
        }
        let n = self.n as u64;
        let mut best: Option<ResidueSet> = None;
        for m in self.iter() {
            let candidate = self.translate(n - m);
            match &best {
                Some(b) if candidate.cmp_members(b) != Ordering::Less => {}
                _ => best = Some(candidate),
            }
        }
        Ok(best.unwrap())
    }

    /// The least g with A + g = A. Periods of A form a group generated by a
    /// divisor of N, so this is the smallest divisor that fixes A. N itself
    /// means "non-periodic"; anything smaller is a proper period. Errors on
    /// the empty set.
    pub fn least_period(&self) -> Result<u64> {
        if self.is_empty() {
            return Err(Error::domain("least_period: empty set"));
        }
        let n = self.n as u64;
        for g in numth::divisors(n)? {
            if g == n || self.translate(g) == *self {
                return Ok(g);
            }
        }
        unreachable!("n itself is always a period")
    }

}

impl fmt::Display for ResidueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for m in self.iter() {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{m}")?;
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for ResidueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ResidueSet(Z_{}: {})", self.n, self)
    }
}

/// Does A ⊕ B = Z_N, i.e. does every residue have exactly one representation
/// a + b? Checked directly by accumulating the translates A + b and flagging
/// any overlap. Mismatched moduli are a domain error.
pub fn verify_tiling(a: &ResidueSet, b: &ResidueSet) -> Result<bool> {
    if a.modulus() != b.modulus() {
        return Err(Error::domain(format!(
            "verify_tiling: mismatched moduli {} and {}",
            a.modulus(),
            b.modulus()
        )));
    }
    let mut covered = vec![0u64; a.words.len()];
    for y in b.iter() {
        let shifted = a.translate(y);
        for (acc, w) in covered.iter_mut().zip(&shifted.words) {
            if *acc & w != 0 {
                return Ok(false);
            }
            *acc |= w;
        }
    }
    Ok(covered == ResidueSet::full(a.modulus())?.words)
}

/// Is A periodic, judging only from its divisor signature? A is a-periodic
/// exactly when Φ_d | A for every divisor d of N not dividing a, so the
/// least period is the lcm of the divisors *missing* from the signature,
/// and A is periodic iff that lcm is proper.
pub fn is_periodic_by_signature(sig: &DivisorSignature) -> bool {
    period_from_signature(sig) < sig.modulus()
}

/// The least period any set with this signature can have (and, by the same
/// cyclotomic argument, the least period every such set does have).
pub fn period_from_signature(sig: &DivisorSignature) -> u64 {
    let n = sig.modulus();
    let mut lcm = 1u64;
    for d in numth::divisors(n).expect("modulus validated at construction") {
        if d >= 2 && !sig.contains(d) {
            lcm = lcm / numth::gcd(lcm, d) * d;
        }
    }
    lcm
}

/// The cyclotomic tiling criterion: A ⊕ B = Z_N holds exactly when
/// |A| · |B| = N and every divisor d ≥ 2 of N lies in at least one of the
/// two signatures. Both signatures must share a modulus.
pub fn signatures_cover(
    sig_a: &DivisorSignature,
    sig_b: &DivisorSignature,
    card_a: u64,
    card_b: u64,
) -> Result<bool> {
    if sig_a.modulus() != sig_b.modulus() {
        return Err(Error::domain(format!(
            "signatures_cover: mismatched moduli {} and {}",
            sig_a.modulus(),
            sig_b.modulus()
        )));
    }
    let n = sig_a.modulus();
    let product = card_a
        .checked_mul(card_b)
        .ok_or(Error::Overflow("signatures_cover"))?;
    if product != n {
        return Ok(false);
    }
    Ok(numth::divisors(n)?
        .iter()
        .all(|&d| d < 2 || sig_a.contains(d) || sig_b.contains(d)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rs(n: u64, members: &[u64]) -> ResidueSet {
        ResidueSet::from_members(n, members).unwrap()
    }

    #[test]
    fn construction_and_membership() {
        let a = rs(12, &[0, 3, 9]);
        assert_eq!(a.len(), 3);
        assert!(a.contains(9));
        assert!(!a.contains(1));
        assert_eq!(a.members(), vec![0, 3, 9]);
        assert!(ResidueSet::from_members(12, &[12]).is_err());
        assert!(ResidueSet::empty(0).is_err());
    }

    #[test]
    fn parse_is_strict() {
        assert_eq!(ResidueSet::parse(144, "0,32,58").unwrap().members(), vec![0, 32, 58]);
        assert_eq!(ResidueSet::parse(5, "").unwrap().len(), 0);
        assert!(ResidueSet::parse(144, "0,32,32").is_err());
        assert!(ResidueSet::parse(144, "32,0").is_err());
        assert!(ResidueSet::parse(144, "0, 32").is_err());
        assert!(ResidueSet::parse(144, "0,32,").is_err());
        assert!(ResidueSet::parse(10, "0,99").is_err());
    }

    #[test]
    fn display_round_trips() {
        for literal in ["", "0", "0,32,58,90,112,122"] {
            assert_eq!(ResidueSet::parse(144, literal).unwrap().to_string(), literal);
        }
    }

    #[test]
    fn translate_wraps() {
        let a = rs(12, &[0, 3, 9]);
        assert_eq!(a.translate(5).members(), vec![2, 5, 8]);
        assert_eq!(a.translate(12), a);
        assert_eq!(a.translate(0), a);
    }

    #[test]
    fn complement_and_disjointness() {
        let a = rs(6, &[0, 2, 4]);
        assert_eq!(a.complement().members(), vec![1, 3, 5]);
        assert!(a.is_disjoint(&a.complement()));
        assert_eq!(ResidueSet::full(70).unwrap().complement().len(), 0);
    }

    #[test]
    fn canonical_translate_examples() {
        // {1,2} in Z_4: the translate {0,1} is smallest.
        assert_eq!(rs(4, &[1, 2]).canonical_translate().unwrap().members(), vec![0, 1]);
        // {0,3,9} in Z_12: translates are {0,3,9}, {0,6,9}, {0,3,6};
        // the member-list order picks {0,3,6}.
        assert_eq!(
            rs(12, &[0, 3, 9]).canonical_translate().unwrap().members(),
            vec![0, 3, 6]
        );
        assert!(ResidueSet::empty(4).unwrap().canonical_translate().is_err());
    }

    #[test]
    fn canonical_translate_is_idempotent_and_orbit_constant() {
        let a = rs(30, &[4, 11, 17, 29]);
        let canon = a.canonical_translate().unwrap();
        assert_eq!(canon.canonical_translate().unwrap(), canon);
        for t in 0..30 {
            assert_eq!(a.translate(t).canonical_translate().unwrap(), canon);
        }
        assert!(canon.contains(0));
    }

    #[test]
    fn least_period_examples() {
        assert_eq!(rs(144, &[0, 72]).least_period().unwrap(), 72);
        assert_eq!(ResidueSet::full(144).unwrap().least_period().unwrap(), 1);
        assert_eq!(rs(12, &[0, 1]).least_period().unwrap(), 12);
        assert_eq!(rs(12, &[0, 3, 6, 9]).least_period().unwrap(), 3);
    }

    #[test]
    fn verify_tiling_examples() {
        let a = rs(4, &[0, 1]);
        assert!(verify_tiling(&a, &rs(4, &[0, 2])).unwrap());
        assert!(!verify_tiling(&a, &rs(4, &[0, 1])).unwrap());
        // Overlap and under-coverage both fail.
        assert!(!verify_tiling(&rs(4, &[0, 2]), &rs(4, &[0])).unwrap());
        assert!(verify_tiling(&ResidueSet::full(1).unwrap(), &rs(1, &[0])).unwrap());
        assert!(verify_tiling(&a, &rs(6, &[0, 2])).is_err());
    }

    #[test]
    fn tiling_is_translation_invariant() {
        let a = rs(12, &[0, 1, 6, 7]);
        let b = rs(12, &[0, 2, 4]);
        assert!(verify_tiling(&a, &b).unwrap());
        for s in 0..12 {
            for t in 0..12 {
                assert!(verify_tiling(&a.translate(s), &b.translate(t)).unwrap());
            }
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_set(n: u64) -> impl Strategy<Value = ResidueSet> {
            proptest::collection::btree_set(0..n, 1..=(n as usize).min(12))
                .prop_map(move |s| {
                    let members: Vec<u64> = s.into_iter().collect();
                    ResidueSet::from_members(n, &members).unwrap()
                })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn canonicalization_properties(a in arb_set(36), t in 0u64..36) {
                let canon = a.canonical_translate().unwrap();
                prop_assert!(canon.contains(0));
                prop_assert_eq!(a.translate(t).canonical_translate().unwrap(), canon.clone());
                prop_assert_eq!(canon.canonical_translate().unwrap(), canon);
            }

            #[test]
            fn least_period_divides_modulus(a in arb_set(48)) {
                let p = a.least_period().unwrap();
                prop_assert_eq!(48 % p, 0);
                prop_assert_eq!(a.translate(p), a);
            }
        }
    }
}
