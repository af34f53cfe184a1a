//! Classification of the non-periodic translational tilings of Z_N.
//!
//! In any tiling A ⊕ B = Z_N, the prime powers dividing N split exactly
//! between the spectra of the two factors, so the classification walks all
//! partitions {H, Hc} of those prime powers and, for each, enumerates the
//! tiles whose spectrum part is exactly H:
//!
//!   1. enumerate the 2^(k−1) partitions;
//!   2. discard partitions that cannot support a tiling with both sides
//!      non-periodic: each side must be able to leave a full-power divisor
//!      of every prime out of its signature, beyond what its closure under
//!      coprime products forces in, and no divisor may be left out of both
//!      signatures at once;
//!   3. enumerate one side: tiles live in Z_L, L = lcm(H), as complements
//!      of a universal tile there, and lift to Z_N in all (N/L)^(|C|−1)
//!      ways; group the non-periodic survivors into classes by signature
//!      (two tiles with equal signatures tile with exactly the same
//!      partners, so classes are the right unit of bookkeeping);
//!   4. drop classes whose signature already forces every complement to be
//!      periodic;
//!   5. fill out one representative per surviving class to find all its
//!      complements, keep the non-periodic orbits, classify those by
//!      signature too, and record which class pairs actually tile;
//!   6. partitions on the skip list (resolved by an external argument) are
//!      only reported, never searched, unless explicitly forced.
//!
//! Everything is deterministic: partition order, class order, and members
//! within a class are all canonically sorted.

use std::collections::{HashMap, HashSet};

use crate::cyclo::{self, DivisorSignature, SigEngine};
use crate::error::{Error, Result};
use crate::fillout::{self, FillOutConfig, MemoMode};
use crate::numth::{self, PrimePowerSet};
use crate::zset::{self, ResidueSet};

/// Largest modulus `classify` accepts; beyond this the search is not
/// dimensioned sensibly anyway.
pub const MAX_CLASSIFY_N: u64 = 4096;

/// An unordered split of the prime powers of N into two sides, stored with
/// the side containing the smallest prime power first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    h: PrimePowerSet,
    hc: PrimePowerSet,
}

impl Partition {
    /// Build from one side; the other is the complement within the prime
    /// powers of n. The given side may be either one.
    pub fn new(n: u64, side: &PrimePowerSet) -> Result<Self> {
        let pp = numth::prime_powers(n)?;
        if !side.is_subset(&pp) {
            return Err(Error::domain(format!(
                "Partition: side is not a subset of the prime powers of {n}"
            )));
        }
        let other = pp.difference(side);
        let smallest = pp.elements().first().copied().ok_or_else(|| {
            Error::domain("Partition: modulus must have at least one prime factor")
        })?;
        let (h, hc) = if side.contains(smallest) {
            (side.clone(), other)
        } else {
            (other, side.clone())
        };
        Ok(Partition { h, hc })
    }

    pub fn h(&self) -> &PrimePowerSet {
        &self.h
    }

    pub fn hc(&self) -> &PrimePowerSet {
        &self.hc
    }

    /// Both sides, first the one holding the smallest prime power.
    pub fn sides(&self) -> [&PrimePowerSet; 2] {
        [&self.h, &self.hc]
    }

    pub fn matches_side(&self, side: &PrimePowerSet) -> bool {
        self.h == *side || self.hc == *side
    }
}

/// All partitions of the prime powers of n, in a fixed deterministic order
/// (subsets through the smallest prime power, by ascending bitmask over the
/// remaining prime powers). For k prime powers there are 2^(k−1).
pub fn enumerate_partitions(n: u64) -> Result<Vec<Partition>> {
    let pp = numth::prime_powers(n)?;
    let elements = pp.elements();
    if elements.is_empty() {
        return Err(Error::domain(
            "enumerate_partitions: modulus must have at least one prime factor",
        ));
    }
    let rest = &elements[1..];
    let mut out = Vec::with_capacity(1 << rest.len());
    for mask in 0u32..1 << rest.len() {
        let mut side = vec![elements[0]];
        side.extend(
            rest.iter()
                .enumerate()
                .filter(|&(i, _)| mask >> i & 1 == 1)
                .map(|(_, &s)| s),
        );
        out.push(Partition::new(n, &PrimePowerSet::new(side)?)?);
    }
    Ok(out)
}

/// Close a side under coprime products: every product of one chosen power
/// per distinct base prime (at least one factor). Each product divides n,
/// so the result is a divisor signature — the divisors any tile with
/// spectrum part ⊇ h must carry, by the second tiling condition.
pub fn t2_closure(h: &PrimePowerSet, n: u64) -> Result<DivisorSignature> {
    if !h.is_subset(&numth::prime_powers(n)?) {
        return Err(Error::domain(format!(
            "t2_closure: side is not a subset of the prime powers of {n}"
        )));
    }
    let mut ladders: Vec<(u64, Vec<u64>)> = Vec::new();
    for (&s, (p, _)) in h.elements().iter().zip(h.split()) {
        match ladders.iter_mut().find(|(q, _)| *q == p) {
            Some((_, l)) => l.push(s),
            None => ladders.push((p, vec![s])),
        }
    }
    let mut products = vec![1u64];
    for (_, ladder) in &ladders {
        let prev = products.clone();
        for &s in ladder {
            products.extend(prev.iter().map(|&q| q * s));
        }
    }
    DivisorSignature::new(n, products.into_iter().filter(|&q| q > 1))
}

/// Would every set whose signature contains `known` be periodic? Adding
/// divisors only shrinks the set of missing ones, so this is the same
/// criterion as periodicity-by-signature on `known` itself.
pub fn forces_periodic(known: &DivisorSignature) -> bool {
    zset::is_periodic_by_signature(known)
}

/// Can this partition support a tiling with both factors non-periodic?
///
/// A factor is non-periodic exactly when, for every prime p of n, some
/// divisor carrying the full power of p stays out of its signature. The
/// candidates per side and prime are the full-power divisors the side is
/// not already forced to carry (its own prime powers plus, when the side's
/// cardinality has at most two distinct primes, the coprime-product
/// closure). A divisor kept out of both signatures would be covered by
/// neither, which no tiling allows, so the two sides' picks must not
/// collide. The pools are tiny, so a direct backtracking search settles
/// feasibility.
pub fn admits_nonperiodic_pair(partition: &Partition, n: u64) -> Result<bool> {
    let mut forced = Vec::with_capacity(2);
    for side in partition.sides() {
        forced.push(if side_prime_count(side) <= 2 {
            t2_closure(side, n)?
        } else {
            DivisorSignature::new(n, side.elements().iter().copied())?
        });
    }
    let divisor_list = numth::divisors(n)?;
    let mut pools: Vec<(usize, Vec<u64>)> = Vec::new();
    for (side, forced) in forced.iter().enumerate() {
        for &(p, e) in numth::factorize(n)?.factors() {
            let full = p.pow(e);
            let pool: Vec<u64> = divisor_list
                .iter()
                .copied()
                .filter(|&d| d % full == 0 && !forced.contains(d))
                .collect();
            if pool.is_empty() {
                return Ok(false);
            }
            pools.push((side, pool));
        }
    }

    fn search(pools: &[(usize, Vec<u64>)], idx: usize, chosen: &mut [Vec<u64>; 2]) -> bool {
        let Some((side, pool)) = pools.get(idx) else {
            return true;
        };
        for &d in pool {
            if chosen[1 - *side].contains(&d) {
                continue;
            }
            let fresh = !chosen[*side].contains(&d);
            if fresh {
                chosen[*side].push(d);
            }
            if search(pools, idx + 1, chosen) {
                return true;
            }
            if fresh {
                chosen[*side].pop();
            }
        }
        false
    }
    Ok(search(&pools, 0, &mut [Vec::new(), Vec::new()]))
}

/// The universal complement for a side h in Z_L (L = lcm(h)): the direct
/// sum of digit sets {0, e, ..., (p−1)e} with e = (L / p^(A_p)) · p^(a−1),
/// one per prime power p^a of L outside h. Any tile of Z_L whose spectrum
/// contains h (with matching cardinality L / ∏ Φ_h(1)) tiles with it, which
/// is what makes its complement list a complete base-tile inventory.
pub fn universal_complement(h: &PrimePowerSet, l: u64) -> Result<ResidueSet> {
    if h.is_empty() {
        return Err(Error::domain("universal_complement: empty side"));
    }
    if h.lcm() != l {
        return Err(Error::domain(format!(
            "universal_complement: lcm of the side is {}, not {l}",
            h.lcm()
        )));
    }
    let lf = numth::factorize(l)?;
    let mut members = vec![0u64];
    for (&s, (p, a)) in numth::prime_powers(l)?
        .elements()
        .iter()
        .zip(numth::prime_powers(l)?.split())
    {
        if h.contains(s) {
            continue;
        }
        let e = l / p.pow(lf.exponent_of(p)) * p.pow(a - 1);
        let mut next = Vec::with_capacity(members.len() * p as usize);
        for digit in 0..p {
            next.extend(members.iter().map(|&m| (m + digit * e) % l));
        }
        next.sort_unstable();
        if next.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::domain(
                "universal_complement: digit construction collided (bug)",
            ));
        }
        members = next;
    }
    let u = ResidueSet::from_members(l, &members)?;
    // Guard the universality claim itself: the complement's signature must
    // cover every divisor of L outside the closure of h.
    let sig = cyclo::signature(&u)?;
    let closure = t2_closure(h, l)?;
    for d in numth::divisors(l)? {
        if d >= 2 && !closure.contains(d) && !sig.contains(d) {
            return Err(Error::domain(format!(
                "universal_complement: divisor {d} is covered by neither side (bug)"
            )));
        }
    }
    Ok(u)
}

/// All tiles of Z_L (containing 0) whose spectrum part within L covers h:
/// the complements of the universal complement.
pub fn base_tiles(h: &PrimePowerSet, l: u64) -> Result<Vec<ResidueSet>> {
    base_tiles_with(h, l, &FillOutConfig::default())
}

fn base_tiles_with(
    h: &PrimePowerSet,
    l: u64,
    config: &FillOutConfig,
) -> Result<Vec<ResidueSet>> {
    let u = universal_complement(h, l)?;
    let bases = fillout::explore_with(&u, config)?;
    for c in &bases {
        for &s in h.elements() {
            if !cyclo::divides_mask(s, c)? {
                return Err(Error::domain(format!(
                    "base_tiles: complement {c} misses the required divisor {s} (bug)"
                )));
            }
        }
    }
    Ok(bases)
}

/// Lift a base tile C ⊆ Z_L to Z_N: every set {c + L·k_c : c ∈ C} with the
/// offset of 0 pinned to 0. Yields (N/L)^(|C|−1) sets in odometer order.
pub fn lift_tiles(c: &ResidueSet, n: u64) -> Result<LiftIter> {
    let l = c.modulus();
    if n % l != 0 || n > numth::MAX_N {
        return Err(Error::domain(format!(
            "lift_tiles: {l} does not divide {n} (or {n} out of range)"
        )));
    }
    if !c.contains(0) {
        return Err(Error::domain("lift_tiles: base tile must contain 0"));
    }
    Ok(LiftIter {
        base: c.members(),
        l,
        n,
        q: n / l,
        digits: vec![0; c.len().saturating_sub(1)],
        done: c.is_empty(),
    })
}

/// Iterator over the lifts of a base tile; see [`lift_tiles`].
pub struct LiftIter {
    base: Vec<u64>,
    l: u64,
    n: u64,
    q: u64,
    digits: Vec<u64>,
    done: bool,
}

impl Iterator for LiftIter {
    type Item = ResidueSet;

    fn next(&mut self) -> Option<ResidueSet> {
        if self.done {
            return None;
        }
        let members: Vec<u64> = std::iter::once(self.base[0])
            .chain(
                self.base[1..]
                    .iter()
                    .zip(&self.digits)
                    .map(|(&c, &k)| c + self.l * k),
            )
            .collect();
        // Odometer increment, last digit fastest.
        let mut i = self.digits.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.digits[i] += 1;
            if self.digits[i] < self.q {
                break;
            }
            self.digits[i] = 0;
        }
        if self.q == 1 {
            self.done = true;
        }
        Some(
            ResidueSet::from_members(self.n, &members)
                .expect("lifted members stay below n"),
        )
    }
}

/// A translation-equivalence class of tiles: common signature, common
/// cardinality, all canonical orbit representatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TileClass {
    pub signature: DivisorSignature,
    pub cardinality: u64,
    /// Canonical (0-containing, lexicographically least) representatives of
    /// each orbit, sorted.
    pub members: Vec<ResidueSet>,
    /// Whether the signature forces periodicity; grouped outputs drop
    /// periodic classes, so this is false for everything reported.
    pub periodic: bool,
}

impl TileClass {
    pub fn orbit_count(&self) -> usize {
        self.members.len()
    }

    pub fn representative(&self) -> &ResidueSet {
        &self.members[0]
    }
}

/// Group tiles into classes: canonicalize orbits, bucket by signature, drop
/// any tile whose prime-power signature part is not exactly `h` (it belongs
/// to a different partition) and any class whose signature is periodic.
/// Classes are sorted by signature, members within a class canonically.
pub fn group_into_classes(
    tiles: &[ResidueSet],
    h: &PrimePowerSet,
    n: u64,
) -> Result<Vec<TileClass>> {
    let mut buckets: HashMap<Vec<u64>, HashSet<ResidueSet>> = HashMap::new();
    for tile in tiles {
        if tile.modulus() != n {
            return Err(Error::domain(format!(
                "group_into_classes: tile modulus {} != {n}",
                tile.modulus()
            )));
        }
        let sig = cyclo::signature(tile)?;
        if sig.prime_power_part() != *h {
            continue;
        }
        if zset::is_periodic_by_signature(&sig) {
            continue;
        }
        buckets
            .entry(sig.members().to_vec())
            .or_default()
            .insert(tile.canonical_translate()?);
    }
    let mut classes = Vec::with_capacity(buckets.len());
    for (members, orbit_set) in buckets {
        let sig = DivisorSignature::new(n, members)?;
        let mut orbits: Vec<ResidueSet> = orbit_set.into_iter().collect();
        orbits.sort_by(|a, b| a.cmp_members(b));
        classes.push(TileClass {
            cardinality: orbits[0].len() as u64,
            signature: sig,
            members: orbits,
            periodic: false,
        });
    }
    classes.sort_by(|a, b| a.signature.members().cmp(b.signature.members()));
    Ok(classes)
}

/// Why a partition produced no class pairs — or that it did.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum PartitionStatus {
    /// The closure of one side already forces that side periodic.
    DiscardedStep2,
    /// The pipeline ran and found no non-periodic tiling pair.
    NoSurvivingClasses,
    /// At least one non-periodic class pair was found.
    Classified,
    /// On the skip list; not searched.
    SkippedExceptional,
}

/// Everything found for one partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionReport {
    pub partition: Partition,
    pub status: PartitionStatus,
    /// Classes on the h side that participate in at least one pair.
    pub a_classes: Vec<TileClass>,
    /// Classes on the hc side, likewise.
    pub b_classes: Vec<TileClass>,
    /// coverage[i][j]: does a_classes[i] tile with b_classes[j]?
    pub coverage: Vec<Vec<bool>>,
    /// Σ over covered pairs of orbit_count(a) × orbit_count(b).
    pub nonperiodic_pairs: u64,
    /// For skipped partitions, the recorded justification.
    pub skip_justification: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassificationReport {
    pub n: u64,
    pub partitions: Vec<PartitionReport>,
}

impl ClassificationReport {
    /// Total non-periodic tiling pairs across all partitions.
    pub fn total_pairs(&self) -> u64 {
        self.partitions.iter().map(|p| p.nonperiodic_pairs).sum()
    }
}

/// One skip-list entry: a partition, identified by either side, and the
/// argument for skipping it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkipEntry {
    pub side: PrimePowerSet,
    pub justification: String,
}

/// Parse a skip list: one entry per line, `side | justification`, with the
/// side as comma-separated prime powers. Blank lines and `#` comments are
/// ignored.
pub fn parse_skip_list(text: &str) -> Result<Vec<SkipEntry>> {
    let mut entries = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (side, justification) = line.split_once('|').ok_or_else(|| {
            Error::domain(format!("skip list: missing '|' in {line:?}"))
        })?;
        let mut powers = Vec::new();
        for token in side.trim().split(',') {
            powers.push(token.trim().parse::<u64>().map_err(|_| {
                Error::domain(format!("skip list: bad prime power {token:?}"))
            })?);
        }
        entries.push(SkipEntry {
            side: PrimePowerSet::new(powers)?,
            justification: justification.trim().to_string(),
        });
    }
    Ok(entries)
}

/// The built-in skip list. For N = 144 the partition {2,4,8,16} | {3,9} is
/// settled by a subgroup argument instead of search: in Z_{p^a q^b} one
/// factor of any tiling lies inside pZ_N or qZ_N; a 16-element factor
/// inside 3Z_144 ≅ Z_48 is forced periodic (Z_48 admits only periodic
/// tilings), and a 9-element factor inside 2Z_144 ≅ Z_72 likewise (the
/// non-periodic tilings of Z_72 use cardinalities 6 and 12). Searching it
/// directly would mean 16^8 lifts of the one 9-element base tile.
pub fn default_skip_list(n: u64) -> Vec<SkipEntry> {
    if n == 144 {
        vec![SkipEntry {
            side: PrimePowerSet::new([2, 4, 8, 16]).expect("prime powers"),
            justification: "one factor must lie in 2Z or 3Z, reducing to Z_72 or Z_48, \
                            and neither admits a non-periodic tiling with these cardinalities"
                .to_string(),
        }]
    } else {
        Vec::new()
    }
}

#[derive(Debug, Clone)]
pub struct ClassifyConfig {
    /// Worker threads across partitions; 1 = fully sequential.
    pub threads: usize,
    pub skip_list: Vec<SkipEntry>,
    /// Search skip-listed partitions anyway.
    pub force_exceptional: bool,
    /// Run moduli outside the supported prime structure anyway.
    pub force_unsupported: bool,
}

impl ClassifyConfig {
    pub fn for_modulus(n: u64) -> Self {
        ClassifyConfig {
            threads: 1,
            skip_list: default_skip_list(n),
            force_exceptional: false,
            force_unsupported: false,
        }
    }
}

/// Classify all non-periodic tilings of Z_n. See the module docs for the
/// pipeline; the report lists every partition in enumeration order.
pub fn classify(n: u64, config: &ClassifyConfig) -> Result<ClassificationReport> {
    if n < 2 || n > MAX_CLASSIFY_N {
        return Err(Error::domain(format!(
            "classify: n must be in [2, {MAX_CLASSIFY_N}], got {n}"
        )));
    }
    let f = numth::factorize(n)?;
    let supported = match f.omega() {
        0 | 1 | 2 => true,
        // With three primes the theory needs one of them to first power.
        3 => f.factors().iter().any(|&(_, e)| e == 1),
        _ => false,
    };
    if !supported && !config.force_unsupported {
        return Err(Error::Unsupported(format!(
            "classify: {n} needs at most two distinct primes, or three with one \
             to the first power; pass force_unsupported to try anyway"
        )));
    }
    let partitions = enumerate_partitions(n)?;
    let reports: Vec<Result<PartitionReport>> = if config.threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build()
            .map_err(|e| Error::domain(format!("classify: thread pool: {e}")))?;
        pool.install(|| {
            use rayon::prelude::*;
            partitions
                .par_iter()
                .map(|p| classify_partition(n, p, config))
                .collect()
        })
    } else {
        partitions
            .iter()
            .map(|p| classify_partition(n, p, config))
            .collect()
    };
    Ok(ClassificationReport {
        n,
        partitions: reports.into_iter().collect::<Result<Vec<_>>>()?,
    })
}

fn empty_report(
    partition: &Partition,
    status: PartitionStatus,
    justification: Option<String>,
) -> PartitionReport {
    PartitionReport {
        partition: partition.clone(),
        status,
        a_classes: Vec::new(),
        b_classes: Vec::new(),
        coverage: Vec::new(),
        nonperiodic_pairs: 0,
        skip_justification: justification,
    }
}

/// How many distinct base primes a side's cardinality has.
fn side_prime_count(side: &PrimePowerSet) -> usize {
    side.base_primes().len()
}

/// The lift-count cost (N/L)^(card−1) used to pick the cheaper side.
fn side_cost(side: &PrimePowerSet, n: u64) -> Result<u128> {
    let l = if side.is_empty() { 1 } else { side.lcm() };
    let card = side.prime_product()?;
    let ratio = (n / l) as u128;
    let mut cost = 1u128;
    for _ in 1..card {
        cost = cost.saturating_mul(ratio);
    }
    Ok(cost)
}

fn classify_partition(
    n: u64,
    partition: &Partition,
    config: &ClassifyConfig,
) -> Result<PartitionReport> {
    // Step 2: discard partitions whose forced divisors leave no room for a
    // tiling with both factors non-periodic.
    if !admits_nonperiodic_pair(partition, n)? {
        return Ok(empty_report(partition, PartitionStatus::DiscardedStep2, None));
    }
    // An empty side leaves the other side with cardinality n: its only
    // tile is Z_n itself, which is periodic. (For two-prime moduli step 2
    // already caught this; a three-prime full side escapes the closure
    // rule.)
    if partition.h().is_empty() || partition.hc().is_empty() {
        return Ok(empty_report(
            partition,
            PartitionStatus::NoSurvivingClasses,
            None,
        ));
    }
    if let Some(entry) = config
        .skip_list
        .iter()
        .find(|e| partition.matches_side(&e.side))
    {
        if !config.force_exceptional {
            return Ok(empty_report(
                partition,
                PartitionStatus::SkippedExceptional,
                Some(entry.justification.clone()),
            ));
        }
    }

    // Pick the enumeration side: the cheapest eligible one (a side whose
    // cardinality has three distinct primes lacks the closure guarantee the
    // completeness argument rests on, so it is never enumerated). The lift
    // count (N/L)^(card−1) alone is a bad proxy — a side with few lifts per
    // base can have hundreds of thousands of bases — so enumerate the base
    // tiles of every eligible side and compare realized candidate counts.
    let eligible: Vec<&PrimePowerSet> = partition
        .sides()
        .into_iter()
        .filter(|s| !s.is_empty() && side_prime_count(s) <= 2)
        .collect();
    if eligible.is_empty() {
        // For supported moduli one side always has at most two distinct
        // primes; this is reachable only under force_unsupported.
        return Err(Error::Unsupported(format!(
            "classify: no enumerable side in partition of {n}"
        )));
    }
    // These internal fill-outs run without the memo: sibling subtrees cover
    // the same first uncovered element with overlapping copies, so no state
    // ever repeats and the memo could only burn memory (a property the
    // fill-out tests pin down).
    let fill_config = FillOutConfig {
        memo: MemoMode::Disabled,
        threads: 1,
    };
    let (seed, l, bases) = {
        let mut best: Option<(&PrimePowerSet, u64, Vec<ResidueSet>, u128)> = None;
        for side in eligible {
            let l = side.lcm();
            let side_bases = base_tiles_with(side, l, &fill_config)?;
            let cost = (side_bases.len() as u128)
                .saturating_mul(side_cost(side, n)?);
            let better = match &best {
                None => true,
                Some((_, bl, _, bc)) => (cost, l) < (*bc, *bl),
            };
            if better {
                best = Some((side, l, side_bases, cost));
            }
        }
        let (side, l, bases, _) = best.unwrap();
        (side, l, bases)
    };
    let mut engine = SigEngine::new(n)?;
    let a_classes = enumerate_side_classes(&mut engine, n, seed, &bases, l)?;

    // Step 4: a surviving class must leave its complements room to be
    // non-periodic; the complement's forced divisors are everything the
    // class signature lacks.
    let survivors: Vec<&TileClass> = a_classes
        .iter()
        .filter(|class| {
            let forced = DivisorSignature::new(n, class.signature.complement_within_divisors())
                .expect("divisors of n");
            !forces_periodic(&forced)
        })
        .collect();

    // Step 5: fill out one representative per surviving class; every class
    // member is a translate-of-signature twin, so one representative's
    // complement list covers the whole class. Complements stream through
    // the periodicity filter one at a time — materializing them first can
    // cost gigabytes on branchy representatives.
    let mut b_pool: HashSet<ResidueSet> = HashSet::new();
    for class in &survivors {
        let rep = class.representative();
        let mut sink_err: Option<Error> = None;
        let mut scratch: Vec<u64> = Vec::new();
        fillout::explore_streaming(rep, &fill_config, &mut |members: &[u32]| {
            if sink_err.is_some() {
                return;
            }
            scratch.clear();
            scratch.extend(members.iter().map(|&m| m as u64));
            let kept = ResidueSet::from_members(n, &scratch)
                .and_then(|b| Ok((b.least_period()? == n).then_some(b)))
                .and_then(|b| b.map(|b| b.canonical_translate()).transpose());
            match kept {
                Ok(Some(b)) => {
                    b_pool.insert(b);
                }
                Ok(None) => {}
                Err(e) => sink_err = Some(e),
            }
        })?;
        if let Some(e) = sink_err {
            return Err(e);
        }
    }
    let b_list: Vec<ResidueSet> = b_pool.into_iter().collect();
    let other = partition.sides().into_iter().find(|s| *s != seed).unwrap();
    let b_classes = group_into_classes(&b_list, other, n)?;
    for class in &b_classes {
        if class.signature.prime_power_part() != *other {
            return Err(Error::domain(
                "classify: complement landed in the wrong partition (bug)".to_string(),
            ));
        }
    }

    // Coverage: signatures decide, and a representative pair double-checks
    // each cell both ways.
    let mut kept_a: Vec<TileClass> = Vec::new();
    let mut coverage: Vec<Vec<bool>> = Vec::new();
    for class in &survivors {
        let mut row = Vec::with_capacity(b_classes.len());
        for b in &b_classes {
            let covers = zset::signatures_cover(
                &class.signature,
                &b.signature,
                class.cardinality,
                b.cardinality,
            )?;
            let verified =
                zset::verify_tiling(class.representative(), b.representative())?;
            if covers != verified {
                return Err(Error::domain(
                    "classify: signature coverage disagrees with direct verification (bug)"
                        .to_string(),
                ));
            }
            if covers {
                check_subgroup_containment(n, class.representative(), b.representative())?;
            }
            row.push(covers);
        }
        if row.iter().any(|&c| c) {
            kept_a.push((*class).clone());
            coverage.push(row);
        }
    }
    // Every reported complement class must pair with something.
    for (j, b) in b_classes.iter().enumerate() {
        if !coverage.iter().any(|row| row[j]) {
            return Err(Error::domain(format!(
                "classify: complement class {} pairs with nothing (bug)",
                b.signature
            )));
        }
    }
    let pairs: u64 = coverage
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .filter(|&(_, &c)| c)
                .map(|(j, _)| kept_a[i].orbit_count() as u64 * b_classes[j].orbit_count() as u64)
                .sum::<u64>()
        })
        .sum();

    // Keep the reported a side aligned with the stored partition order: if
    // the enumerated side was hc, swap roles so a_classes always means "the
    // h side".
    let (a_final, b_final, coverage, status) = {
        let status = if pairs > 0 {
            PartitionStatus::Classified
        } else {
            PartitionStatus::NoSurvivingClasses
        };
        if seed == partition.h() {
            (kept_a, b_classes, coverage, status)
        } else {
            let transposed: Vec<Vec<bool>> = (0..b_classes.len())
                .map(|j| coverage.iter().map(|row| row[j]).collect())
                .collect();
            (b_classes, kept_a, transposed, status)
        }
    };
    Ok(PartitionReport {
        partition: partition.clone(),
        status,
        a_classes: a_final,
        b_classes: b_final,
        coverage,
        nonperiodic_pairs: pairs,
        skip_justification: None,
    })
}

/// For two-prime moduli, any tiling has one factor inside a proper
/// subgroup: with representatives containing 0, one side lies in pZ_N or
/// qZ_N. A violation would mean the pipeline produced an impossible pair.
fn check_subgroup_containment(n: u64, a: &ResidueSet, b: &ResidueSet) -> Result<()> {
    let primes: Vec<u64> = numth::factorize(n)?.primes().collect();
    if primes.len() != 2 {
        return Ok(());
    }
    for &p in &primes {
        for side in [a, b] {
            if side.iter().all(|m| m % p == 0) {
                return Ok(());
            }
        }
    }
    Err(Error::domain(format!(
        "classify: tiling pair {a} / {b} has no factor in a proper subgroup (bug)"
    )))
}

/// Enumerate all non-periodic tile classes on the seed side: lift every
/// base tile from Z_L to Z_N, test only the divisors that lifting can
/// change (everything dividing L folds back to the base), filter to
/// prime-power part exactly `seed`, and group survivors by signature.
fn enumerate_side_classes(
    engine: &mut SigEngine,
    n: u64,
    seed: &PrimePowerSet,
    bases: &[ResidueSet],
    l: u64,
) -> Result<Vec<TileClass>> {
    let nontrivial = engine.nontrivial().to_vec();
    assert!(nontrivial.len() <= 64);
    let idx_bit = |d: u64| -> u64 { 1 << engine.index_of(d).expect("divisor of n") };
    let pp_mask: u64 = numth::prime_powers(n)?
        .elements()
        .iter()
        .map(|&s| idx_bit(s))
        .sum();
    let seed_bits: u64 = seed.elements().iter().map(|&s| idx_bit(s)).sum();

    // Divisors that lifting can change, prime powers first so a wrong
    // spectrum kills a lift after as few divisions as possible.
    let mut variable: Vec<usize> = (0..nontrivial.len())
        .filter(|&i| l % nontrivial[i] != 0)
        .collect();
    variable.sort_by_key(|&i| (pp_mask >> i & 1 == 0, nontrivial[i]));

    let q = n / l;
    let mut period_cache: HashMap<u64, bool> = HashMap::new();
    let is_periodic = |bits: u64, cache: &mut HashMap<u64, bool>| -> bool {
        *cache.entry(bits).or_insert_with(|| {
            let mut lcm = 1u64;
            for (i, &d) in nontrivial.iter().enumerate() {
                if bits >> i & 1 == 0 {
                    lcm = lcm / numth::gcd(lcm, d) * d;
                }
            }
            lcm < n
        })
    };
    let mut buckets: HashMap<u64, HashSet<ResidueSet>> = HashMap::new();

    for base in bases {
        // The base fixes every divisor of L. Its prime-power part there
        // must already be exactly the seed; otherwise no lift can recover.
        let base_members = base.members();
        let mut base_bits = 0u64;
        for (i, &d) in nontrivial.iter().enumerate() {
            if l % d == 0 && engine.divides(i, &base_members)? {
                base_bits |= 1 << i;
            }
        }
        let l_pp = pp_mask_of_l(&nontrivial, l, pp_mask);
        if base_bits & l_pp != seed_bits & l_pp {
            continue;
        }

        // Odometer over the lift digits, last digit fastest.
        let m = base_members.len();
        let mut digits = vec![0u64; m.saturating_sub(1)];
        let mut members = base_members.clone();
        loop {
            let mut bits = base_bits;
            let mut rejected = false;
            for &i in &variable {
                let hit = engine.divides(i, &members)?;
                if hit {
                    bits |= 1 << i;
                }
                if pp_mask >> i & 1 == 1 && hit != (seed_bits >> i & 1 == 1) {
                    rejected = true;
                    break;
                }
            }
            if !rejected && !is_periodic(bits, &mut period_cache) {
                let set = ResidueSet::from_members(n, &members)?;
                buckets
                    .entry(bits)
                    .or_default()
                    .insert(set.canonical_translate()?);
            }
            // Advance the odometer.
            let mut i = digits.len();
            let mut overflow = true;
            while i > 0 {
                i -= 1;
                digits[i] += 1;
                if digits[i] < q {
                    members[i + 1] = base_members[i + 1] + l * digits[i];
                    overflow = false;
                    break;
                }
                digits[i] = 0;
                members[i + 1] = base_members[i + 1];
            }
            if overflow {
                break;
            }
        }
    }

    let mut classes = Vec::with_capacity(buckets.len());
    for (bits, orbit_set) in buckets {
        let sig = engine.signature_from_bits(bits);
        let mut orbits: Vec<ResidueSet> = orbit_set.into_iter().collect();
        orbits.sort_by(|a, b| a.cmp_members(b));
        classes.push(TileClass {
            cardinality: orbits[0].len() as u64,
            signature: sig,
            members: orbits,
            periodic: false,
        });
    }
    classes.sort_by(|a, b| a.signature.members().cmp(b.signature.members()));
    Ok(classes)
}

/// Bits (within the nontrivial-divisor indexing) of prime powers dividing l.
fn pp_mask_of_l(nontrivial: &[u64], l: u64, pp_mask: u64) -> u64 {
    let mut bits = 0u64;
    for (i, &d) in nontrivial.iter().enumerate() {
        if pp_mask >> i & 1 == 1 && l % d == 0 {
            bits |= 1 << i;
        }
    }
    bits
}

// --- JSON projection -------------------------------------------------------

/// The on-disk form of a [`ClassificationReport`]: orbit counts and one
/// representative per class rather than full member lists.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct JsonReport {
    pub n: u64,
    pub partitions: Vec<JsonPartition>,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct JsonPartition {
    #[serde(rename = "H")]
    pub h: Vec<u64>,
    #[serde(rename = "Hc")]
    pub hc: Vec<u64>,
    pub status: PartitionStatus,
    pub a_classes: Vec<JsonClass>,
    pub b_classes: Vec<JsonClass>,
    pub coverage: Vec<Vec<bool>>,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct JsonClass {
    pub signature: Vec<u64>,
    pub cardinality: u64,
    pub orbit_count: u64,
    pub representative: String,
}

impl From<&TileClass> for JsonClass {
    fn from(c: &TileClass) -> JsonClass {
        JsonClass {
            signature: c.signature.members().to_vec(),
            cardinality: c.cardinality,
            orbit_count: c.orbit_count() as u64,
            representative: c.representative().to_string(),
        }
    }
}

impl From<&ClassificationReport> for JsonReport {
    fn from(r: &ClassificationReport) -> JsonReport {
        JsonReport {
            n: r.n,
            partitions: r
                .partitions
                .iter()
                .map(|p| JsonPartition {
                    h: p.partition.h().elements().to_vec(),
                    hc: p.partition.hc().elements().to_vec(),
                    status: p.status,
                    a_classes: p.a_classes.iter().map(JsonClass::from).collect(),
                    b_classes: p.b_classes.iter().map(JsonClass::from).collect(),
                    coverage: p.coverage.clone(),
                })
                .collect(),
        }
    }
}
