//! Elementary number theory: factorization, divisors, the Möbius function,
//! prime-power decompositions, and CRT recombination.
//!
//! All inputs are bounded by 2^31 at the API boundary; internal arithmetic is
//! 64-bit with checked overflow where products can grow.

use crate::error::{Error, Result};

/// Largest modulus accepted anywhere in the crate.
pub const MAX_N: u64 = 1 << 31;

/// A positive integer together with its prime factorization, kept as
/// `(prime, exponent)` pairs with primes ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// The factored integer.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// `(prime, exponent)` pairs, primes ascending. Empty exactly when n = 1.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// Distinct primes, ascending.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Number of distinct prime factors.
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    /// Exponent of `p` in n (zero when p does not divide n).
    pub fn exponent_of(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }

    /// Euler's totient of n.
    pub fn phi(&self) -> u64 {
        self.factors
            .iter()
            .fold(1u64, |acc, &(p, e)| acc * (p - 1) * p.pow(e - 1))
    }
}

/// Factor `n` by trial division.
///
/// Errors when `n` is zero or exceeds 2^31. Trial division is ample for that
/// range and keeps the arithmetic transparently exact.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::domain("factorize: n must be positive"));
    }
    if n > MAX_N {
        return Err(Error::domain(format!("factorize: n = {n} exceeds 2^31")));
    }
    let mut rest = n;
    let mut factors = Vec::new();
    let mut p = 2u64;
    while p * p <= rest {
        if rest % p == 0 {
            let mut e = 0u32;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        factors.push((rest, 1));
    }
    Ok(Factorization { n, factors })
}

/// All divisors of `n`, ascending. `divisors(1) = [1]`.
pub fn divisors(n: u64) -> Result<Vec<u64>> {
    let f = factorize(n)?;
    let mut out = vec![1u64];
    for &(p, e) in f.factors() {
        let prev = out.clone();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            out.extend(prev.iter().map(|d| d * pk));
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Möbius function: 0 if `n` has a squared prime factor, otherwise
/// (-1)^(number of prime factors).
pub fn mobius(n: u64) -> Result<i32> {
    let f = factorize(n)?;
    if f.factors().iter().any(|&(_, e)| e > 1) {
        return Ok(0);
    }
    Ok(if f.omega() % 2 == 0 { 1 } else { -1 })
}

/// The set of prime powers dividing a modulus: for N = ∏ p_i^{a_i} this is
/// every p_i^b with 1 ≤ b ≤ a_i. Elements are ascending and deduplicated.
///
/// The same type doubles as the "spectrum" of a tile mask and as one side of
/// a classification partition, where membership is sparse.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PrimePowerSet {
    elements: Vec<u64>,
}

impl PrimePowerSet {
    /// Build from arbitrary prime powers; rejects anything that is not a
    /// prime power (1 included). Input order is irrelevant.
    pub fn new(elements: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut elements: Vec<u64> = elements.into_iter().collect();
        for &s in &elements {
            if split_prime_power(s)?.is_none() {
                return Err(Error::domain(format!(
                    "PrimePowerSet: {s} is not a prime power"
                )));
            }
        }
        elements.sort_unstable();
        elements.dedup();
        Ok(PrimePowerSet { elements })
    }

    pub fn empty() -> Self {
        PrimePowerSet::default()
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, s: u64) -> bool {
        self.elements.binary_search(&s).is_ok()
    }

    pub fn is_subset(&self, other: &PrimePowerSet) -> bool {
        self.elements.iter().all(|&s| other.contains(s))
    }

    /// Elements as `(prime, exponent)` pairs, in element order.
    pub fn split(&self) -> Vec<(u64, u32)> {
        self.elements
            .iter()
            .map(|&s| split_prime_power(s).unwrap().unwrap())
            .collect()
    }

    /// Distinct base primes, ascending.
    pub fn base_primes(&self) -> Vec<u64> {
        let mut ps: Vec<u64> = self.split().iter().map(|&(p, _)| p).collect();
        ps.sort_unstable();
        ps.dedup();
        ps
    }

    /// Product of the base primes, one factor per element (with
    /// multiplicity): for {2, 4, 3} this is 2 · 2 · 3 = 12.
    pub fn prime_product(&self) -> Result<u64> {
        let mut acc = 1u64;
        for (p, _) in self.split() {
            acc = acc
                .checked_mul(p)
                .ok_or(Error::Overflow("prime_product"))?;
        }
        Ok(acc)
    }

    /// Least common multiple of the elements; 1 for the empty set.
    pub fn lcm(&self) -> u64 {
        let mut by_prime: Vec<(u64, u32)> = Vec::new();
        for (p, e) in self.split() {
            match by_prime.iter_mut().find(|(q, _)| *q == p) {
                Some((_, m)) => *m = (*m).max(e),
                None => by_prime.push((p, e)),
            }
        }
        by_prime.iter().fold(1u64, |acc, &(p, e)| acc * p.pow(e))
    }

    /// Set difference.
    pub fn difference(&self, other: &PrimePowerSet) -> PrimePowerSet {
        PrimePowerSet {
            elements: self
                .elements
                .iter()
                .copied()
                .filter(|s| !other.contains(*s))
                .collect(),
        }
    }
}

/// `(p, a)` when `s = p^a` with a ≥ 1, `None` otherwise (so 1 maps to None).
pub fn split_prime_power(s: u64) -> Result<Option<(u64, u32)>> {
    let f = factorize(s)?;
    match f.factors() {
        [(p, e)] => Ok(Some((*p, *e))),
        _ => Ok(None),
    }
}

/// Prime powers dividing `n`: the full ladder p^1, ..., p^a for every prime
/// factor. `prime_powers(1)` is empty.
pub fn prime_powers(n: u64) -> Result<PrimePowerSet> {
    let f = factorize(n)?;
    let mut elements = Vec::new();
    for &(p, e) in f.factors() {
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            elements.push(pk);
        }
    }
    elements.sort_unstable();
    Ok(PrimePowerSet { elements })
}

/// Solve the simultaneous congruences x ≡ residues[i] (mod moduli[i]) for
/// pairwise coprime moduli; returns the unique solution in [0, ∏ moduli).
///
/// Residues may be any integers; they are reduced into range. Errors on
/// empty input, non-coprime moduli, a zero modulus, or a product that
/// overflows the 2^31 bound.
pub fn crt_combine(moduli: &[u64], residues: &[i64]) -> Result<u64> {
    if moduli.is_empty() || moduli.len() != residues.len() {
        return Err(Error::domain(
            "crt_combine: need equally many moduli and residues, at least one",
        ));
    }
    let mut modulus = 1u64;
    for &m in moduli {
        if m == 0 {
            return Err(Error::domain("crt_combine: zero modulus"));
        }
        modulus = modulus
            .checked_mul(m)
            .filter(|&prod| prod <= MAX_N)
            .ok_or(Error::Overflow("crt_combine modulus product"))?;
    }
    for i in 0..moduli.len() {
        for j in i + 1..moduli.len() {
            if gcd(moduli[i], moduli[j]) != 1 {
                return Err(Error::domain(format!(
                    "crt_combine: moduli {} and {} are not coprime",
                    moduli[i], moduli[j]
                )));
            }
        }
    }
    // Incremental Garner-style combination; every intermediate fits in i128.
    let mut x = 0i128;
    let mut m_acc = 1i128;
    for (&m, &r) in moduli.iter().zip(residues) {
        let m = m as i128;
        let r = ((r as i128 % m) + m) % m;
        // Solve x + m_acc * t ≡ r (mod m).
        let delta = ((r - x % m) % m + m) % m;
        let inv = mod_inverse(m_acc.rem_euclid(m) as u64, m as u64)
            .expect("moduli verified pairwise coprime");
        let t = (delta * inv as i128) % m;
        x += m_acc * t;
        m_acc *= m;
    }
    Ok(x.rem_euclid(m_acc) as u64)
}

/// Greatest common divisor (gcd(0, n) = n).
pub fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Inverse of `a` modulo `m`, when it exists.
fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(144).unwrap().factors(), &[(2, 4), (3, 2)]);
        assert_eq!(factorize(1).unwrap().factors(), &[]);
        assert_eq!(
            factorize(2310).unwrap().factors(),
            &[(2, 1), (3, 1), (5, 1), (7, 1), (11, 1)]
        );
        assert!(factorize(0).is_err());
        assert!(factorize((1 << 31) + 1).is_err());
    }

    #[test]
    fn divisor_lists() {
        assert_eq!(divisors(12).unwrap(), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(1).unwrap(), vec![1]);
        let d144 = divisors(144).unwrap();
        assert_eq!(d144.len(), 15);
        assert_eq!(
            d144,
            vec![1, 2, 3, 4, 6, 8, 9, 12, 16, 18, 24, 36, 48, 72, 144]
        );
    }

    #[test]
    fn mobius_values() {
        assert_eq!(mobius(1).unwrap(), 1);
        assert_eq!(mobius(2).unwrap(), -1);
        assert_eq!(mobius(4).unwrap(), 0);
        assert_eq!(mobius(6).unwrap(), 1);
        assert_eq!(mobius(30).unwrap(), -1);
    }

    #[test]
    fn mobius_sums_to_zero_over_divisors() {
        // Σ_{d | n} μ(d) = [n = 1], spot-checked across a spread of n.
        for n in (1u64..=3000).chain([9999, 360360, 999983]) {
            let total: i32 = divisors(n)
                .unwrap()
                .iter()
                .map(|&d| mobius(d).unwrap())
                .sum();
            assert_eq!(total, i32::from(n == 1), "n = {n}");
        }
    }

    #[test]
    fn prime_power_ladders() {
        assert_eq!(
            prime_powers(144).unwrap().elements(),
            &[2, 3, 4, 8, 9, 16]
        );
        assert!(prime_powers(1).unwrap().is_empty());
        assert_eq!(prime_powers(30).unwrap().elements(), &[2, 3, 5]);
    }

    #[test]
    fn prime_powers_reconstruct_the_modulus() {
        // Taking the maximal power of each base prime recovers n.
        for n in [2u64, 12, 144, 720, 2310, 65536, 99991] {
            let pp = prime_powers(n).unwrap();
            assert_eq!(pp.lcm(), n);
            // One base-prime factor per ladder element multiplies back to n.
            assert_eq!(pp.prime_product().unwrap(), n);
        }
    }

    #[test]
    fn prime_power_set_rejects_composites() {
        assert!(PrimePowerSet::new([6]).is_err());
        assert!(PrimePowerSet::new([1]).is_err());
        let s = PrimePowerSet::new([9, 2, 4]).unwrap();
        assert_eq!(s.elements(), &[2, 4, 9]);
        assert_eq!(s.prime_product().unwrap(), 12);
        assert_eq!(s.lcm(), 36);
        assert_eq!(s.base_primes(), vec![2, 3]);
    }

    #[test]
    fn crt_examples() {
        assert_eq!(crt_combine(&[3, 4], &[2, 3]).unwrap(), 11);
        assert_eq!(crt_combine(&[21, 55, 2], &[1, 4, 1]).unwrap(), 169);
        assert!(crt_combine(&[4, 6], &[1, 1]).is_err());
        assert!(crt_combine(&[], &[]).is_err());
    }

    #[test]
    fn crt_handles_negative_residues() {
        assert_eq!(crt_combine(&[3, 4], &[-1, -1]).unwrap(), 11);
        assert_eq!(crt_combine(&[5], &[-13]).unwrap(), 2);
    }

    #[test]
    fn crt_is_a_bijection_on_small_products() {
        for moduli in [&[3u64, 4][..], &[5, 7, 8], &[16, 625]] {
            let product: u64 = moduli.iter().product();
            let mut seen = vec![false; product as usize];
            for x in 0..product {
                let residues: Vec<i64> =
                    moduli.iter().map(|&m| (x % m) as i64).collect();
                let back = crt_combine(moduli, &residues).unwrap();
                assert_eq!(back, x);
                assert!(!seen[back as usize]);
                seen[back as usize] = true;
            }
        }
    }
}
