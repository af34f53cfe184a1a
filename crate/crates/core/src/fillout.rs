//! The fill-out search: given a tile A ⊆ Z_N containing 0, enumerate every
//! complement B (with 0 ∈ B) such that A ⊕ B = Z_N.
//!
//! The recursion maintains a packing P (the translates placed so far,
//! always containing 0). At each node it ranks every uncovered element x by
//! the number r(x) of admissible copies of A that could still cover it; if
//! any x has r(x) = 0 the branch is dead, otherwise it branches on all
//! admissible copies covering the lowest-ranked x (ties broken toward
//! smaller x). Branching always targets a single element that every
//! completion must cover, so the search finds each complement exactly once.
//!
//! A memo of visited packings is kept (configurable, with a hard byte cap).
//! Distinct branches place distinct copies over the same contested element,
//! so a packing is in fact never reached twice — the memo is a safety net,
//! not a pruning device — and `MemoMode::Disabled` provably returns the
//! same output while using no memory; a property test pins that down.

use std::collections::HashSet;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::zset::ResidueSet;

/// Largest modulus the exploration tables are willing to allocate for
/// (the per-translate bitmask tables are quadratic in N).
pub const MAX_EXPLORE_N: u64 = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MemoMode {
    /// Remember every visited packing, erroring hard once the stored key
    /// bytes pass `cap_bytes`. Branches are never dropped to save space.
    Exact { cap_bytes: usize },
    /// Keep no memo at all.
    Disabled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FillOutConfig {
    pub memo: MemoMode,
    /// Worker threads for exploring the root's subtrees; 1 = sequential.
    /// The output is identical either way.
    pub threads: usize,
}

impl Default for FillOutConfig {
    fn default() -> Self {
        FillOutConfig {
            memo: MemoMode::Exact {
                cap_bytes: 1 << 31,
            },
            threads: 1,
        }
    }
}

/// One row of a rank table: an uncovered element, how many admissible
/// copies of A could cover it, and the translates y of those copies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankEntry {
    pub x: u64,
    pub rank: usize,
    pub candidates: Vec<u64>,
}

/// All uncovered elements ranked ascending by (rank, x). The head entry is
/// what the recursion branches on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankTable {
    pub entries: Vec<RankEntry>,
}

/// Rank every element of Z_N \ covered by how many translates A + y both
/// contain it and avoid `covered`. `covered` is meant to be a disjoint
/// union of translates of A mid-search, but any subset is accepted.
pub fn rank(a: &ResidueSet, covered: &ResidueSet) -> Result<RankTable> {
    if a.modulus() != covered.modulus() {
        return Err(Error::domain(format!(
            "rank: mismatched moduli {} and {}",
            a.modulus(),
            covered.modulus()
        )));
    }
    if a.is_empty() {
        return Err(Error::domain("rank: empty tile"));
    }
    let n = a.modulus();
    let members = a.members();
    let mut entries = Vec::new();
    for x in 0..n {
        if covered.contains(x) {
            continue;
        }
        let mut candidates: Vec<u64> = members
            .iter()
            .map(|&m| (x + n - m) % n)
            .filter(|&y| a.translate(y).is_disjoint(covered))
            .collect();
        candidates.sort_unstable();
        entries.push(RankEntry {
            x,
            rank: candidates.len(),
            candidates,
        });
    }
    entries.sort_by_key(|e| (e.rank, e.x));
    Ok(RankTable { entries })
}

/// Precomputed per-modulus bitmask tables, shared read-only by workers.
struct Tables {
    n: usize,
    words: usize,
    full: Vec<u64>,
    /// translates[y] = bits of A + y.
    translates: Vec<u64>,
    /// forbid[y] = translates that would overlap A + y.
    forbid: Vec<u64>,
    /// xcover[x] = translates containing x.
    xcover: Vec<u64>,
}

impl Tables {
    fn build(a: &ResidueSet) -> Tables {
        let n = a.modulus() as usize;
        let words = (n + 63) / 64;
        let members = a.members();
        let mut full = vec![0u64; words];
        for x in 0..n {
            full[x / 64] |= 1 << (x % 64);
        }
        let mut translates = vec![0u64; n * words];
        let mut xcover = vec![0u64; n * words];
        for y in 0..n {
            for &m in &members {
                let bit = (m as usize + y) % n;
                translates[y * words + bit / 64] |= 1 << (bit % 64);
            }
        }
        for x in 0..n {
            for &m in &members {
                let y = (x + n - m as usize) % n;
                xcover[x * words + y / 64] |= 1 << (y % 64);
            }
        }
        // Difference set of A: placing a copy at y rules out exactly the
        // translates y + δ for δ in A − A.
        let mut deltas = vec![0u64; words];
        for &m1 in &members {
            for &m2 in &members {
                let d = (m1 as usize + n - m2 as usize) % n;
                deltas[d / 64] |= 1 << (d % 64);
            }
        }
        let mut forbid = vec![0u64; n * words];
        let delta_list: Vec<usize> = (0..n).filter(|&d| deltas[d / 64] >> (d % 64) & 1 == 1).collect();
        for y in 0..n {
            for &d in &delta_list {
                let bit = (y + d) % n;
                forbid[y * words + bit / 64] |= 1 << (bit % 64);
            }
        }
        Tables {
            n,
            words,
            full,
            translates,
            forbid,
            xcover,
        }
    }
}

/// The memo, in whatever sharing mode the caller picked. Keys are the
/// packing bitmask; accounting charges the stored key bytes against the cap.
enum Memo<'a> {
    Off,
    Local {
        seen: HashSet<Box<[u64]>>,
        used: usize,
        cap: usize,
    },
    Shared {
        seen: &'a Mutex<HashSet<Box<[u64]>>>,
        used: &'a AtomicUsize,
        cap: usize,
    },
}

impl Memo<'_> {
    /// Record a packing; Ok(true) on first visit, Ok(false) on a repeat.
    fn mark(&mut self, key: &[u64]) -> Result<bool> {
        let bytes = std::mem::size_of_val(key);
        match self {
            Memo::Off => Ok(true),
            Memo::Local { seen, used, cap } => {
                if !seen.insert(key.into()) {
                    return Ok(false);
                }
                *used += bytes;
                if *used > *cap {
                    return Err(Error::MemoCapacity {
                        used: *used,
                        cap: *cap,
                    });
                }
                Ok(true)
            }
            Memo::Shared { seen, used, cap } => {
                if !seen.lock().unwrap().insert(key.into()) {
                    return Ok(false);
                }
                let total = used.fetch_add(bytes, AtomicOrdering::Relaxed) + bytes;
                if total > *cap {
                    return Err(Error::MemoCapacity {
                        used: total,
                        cap: *cap,
                    });
                }
                Ok(true)
            }
        }
    }
}

/// Per-worker search state: one slot of each bitmask per recursion depth.
struct State {
    covered: Vec<u64>,
    admissible: Vec<u64>,
    cands: Vec<u64>,
    pmask: Vec<u64>,
    p: Vec<u32>,
}

impl State {
    fn new(t: &Tables, depth_cap: usize) -> State {
        let len = depth_cap * t.words;
        State {
            covered: vec![0; len],
            admissible: vec![0; len],
            cands: vec![0; len],
            pmask: vec![0; len],
            p: Vec::new(),
        }
    }
}

fn for_each_bit(words: &[u64], mut f: impl FnMut(usize)) {
    for (i, &w) in words.iter().enumerate() {
        let mut w = w;
        while w != 0 {
            f(i * 64 + w.trailing_zeros() as usize);
            w &= w - 1;
        }
    }
}

/// Extend the packing at `slot` until every completion is emitted.
fn recurse<F: FnMut(&[u32])>(
    t: &Tables,
    st: &mut State,
    memo: &mut Memo<'_>,
    slot: usize,
    sink: &mut F,
) -> Result<()> {
    let w = t.words;
    let off = slot * w;
    if !memo.mark(&st.pmask[off..off + w])? {
        return Ok(());
    }
    if st.covered[off..off + w] == t.full[..] {
        let mut members = st.p.clone();
        members.sort_unstable();
        sink(&members);
        return Ok(());
    }
    // Rank pass: find the uncovered x with fewest admissible covers,
    // smallest x first. Any x with none at all kills the branch, so the
    // scan cannot stop early at rank 1.
    let mut best_x = usize::MAX;
    let mut best_r = usize::MAX;
    for i in 0..w {
        let mut unc = !st.covered[off + i] & t.full[i];
        while unc != 0 {
            let x = i * 64 + unc.trailing_zeros() as usize;
            unc &= unc - 1;
            let base = x * w;
            let mut r = 0usize;
            for j in 0..w {
                r += (st.admissible[off + j] & t.xcover[base + j]).count_ones() as usize;
            }
            if r == 0 {
                return Ok(());
            }
            if r < best_r {
                best_r = r;
                best_x = x;
            }
        }
    }
    debug_assert!(best_x < t.n);
    let base = best_x * w;
    for j in 0..w {
        st.cands[off + j] = st.admissible[off + j] & t.xcover[base + j];
    }
    let mut ys: Vec<usize> = Vec::with_capacity(best_r);
    for_each_bit(&st.cands[off..off + w], |y| ys.push(y));
    for y in ys {
        descend(t, st, slot, y);
        st.p.push(y as u32);
        let result = recurse(t, st, memo, slot + 1, sink);
        st.p.pop();
        result?;
    }
    Ok(())
}

/// Write the child masks for placing a copy at y into slot + 1.
fn descend(t: &Tables, st: &mut State, slot: usize, y: usize) {
    let w = t.words;
    let off = slot * w;
    let ybase = y * w;
    let (head, tail) = st.covered.split_at_mut(off + w);
    tail[..w]
        .iter_mut()
        .zip(&head[off..])
        .zip(&t.translates[ybase..ybase + w])
        .for_each(|((c, &p), &tr)| *c = p | tr);
    let (head, tail) = st.admissible.split_at_mut(off + w);
    tail[..w]
        .iter_mut()
        .zip(&head[off..])
        .zip(&t.forbid[ybase..ybase + w])
        .for_each(|((a, &p), &f)| *a = p & !f);
    let (head, tail) = st.pmask.split_at_mut(off + w);
    tail[..w].iter_mut().zip(&head[off..]).for_each(|(m, &p)| *m = p);
    tail[y / 64] |= 1 << (y % 64);
}

/// Seed slot 0 of a state with the packing {0}.
fn seed_root(t: &Tables, st: &mut State) {
    let w = t.words;
    st.covered[..w].copy_from_slice(&t.translates[..w]);
    for j in 0..w {
        st.admissible[j] = t.full[j] & !t.forbid[j];
    }
    st.pmask[..w].fill(0);
    st.pmask[0] = 1;
    st.p.clear();
    st.p.push(0);
}

/// Enumerate all complements of A in Z_N with the default configuration.
pub fn explore(a: &ResidueSet) -> Result<Vec<ResidueSet>> {
    explore_with(a, &FillOutConfig::default())
}

/// Enumerate all complements of A in Z_N: every B with 0 ∈ B and
/// A ⊕ B = Z_N, as a lexicographically sorted list. Requires 0 ∈ A;
/// returns empty immediately when |A| does not divide N.
pub fn explore_with(a: &ResidueSet, config: &FillOutConfig) -> Result<Vec<ResidueSet>> {
    let n = a.modulus();
    let mut out: Vec<Vec<u32>> = Vec::new();
    explore_streaming(a, config, &mut |members: &[u32]| {
        out.push(members.to_vec());
    })?;
    out.sort_unstable();
    out.iter()
        .map(|m| {
            let members: Vec<u64> = m.iter().map(|&x| x as u64).collect();
            ResidueSet::from_members(n, &members)
        })
        .collect()
}

/// The engine behind `explore_with`: complements are handed to `sink` as
/// sorted member lists, in search order (callers needing the canonical
/// lexicographic order sort afterwards).
pub(crate) fn explore_streaming(
    a: &ResidueSet,
    config: &FillOutConfig,
    mut sink: &mut dyn FnMut(&[u32]),
) -> Result<()> {
    let n = a.modulus();
    if !a.contains(0) {
        return Err(Error::domain("explore: tile must contain 0"));
    }
    if n > MAX_EXPLORE_N {
        return Err(Error::domain(format!(
            "explore: modulus {n} exceeds the supported bound {MAX_EXPLORE_N}"
        )));
    }
    if n % a.len() as u64 != 0 {
        return Ok(());
    }
    let t = Tables::build(a);
    let depth_cap = t.n / a.len() + 2;
    if config.threads > 1 {
        return explore_parallel(&t, config, depth_cap, sink);
    }
    let mut memo = match config.memo {
        MemoMode::Disabled => Memo::Off,
        MemoMode::Exact { cap_bytes } => Memo::Local {
            seen: HashSet::new(),
            used: 0,
            cap: cap_bytes,
        },
    };
    let mut st = State::new(&t, depth_cap);
    seed_root(&t, &mut st);
    recurse(&t, &mut st, &mut memo, 0, &mut sink)
}

/// Parallel variant: the root's children are explored as independent
/// sequential subtrees on a scoped pool, sharing one memo. Each subtree's
/// complements are collected separately and concatenated in branch order,
/// so the merged stream matches the sequential one.
fn explore_parallel(
    t: &Tables,
    config: &FillOutConfig,
    depth_cap: usize,
    sink: &mut dyn FnMut(&[u32]),
) -> Result<()> {
    use rayon::prelude::*;

    let shared_seen = Mutex::new(HashSet::new());
    let shared_used = AtomicUsize::new(0);
    let make_memo = || match config.memo {
        MemoMode::Disabled => Memo::Off,
        MemoMode::Exact { cap_bytes } => Memo::Shared {
            seen: &shared_seen,
            used: &shared_used,
            cap: cap_bytes,
        },
    };

    // Process the root node by hand: memo, completeness check, branch list.
    let w = t.words;
    let mut root = State::new(t, depth_cap);
    seed_root(t, &mut root);
    let mut memo = make_memo();
    if !memo.mark(&root.pmask[..w])? {
        return Ok(());
    }
    if root.covered[..w] == t.full[..] {
        sink(&[0]);
        return Ok(());
    }
    let mut best_x = usize::MAX;
    let mut best_r = usize::MAX;
    for i in 0..w {
        let mut unc = !root.covered[i] & t.full[i];
        while unc != 0 {
            let x = i * 64 + unc.trailing_zeros() as usize;
            unc &= unc - 1;
            let mut r = 0usize;
            for j in 0..w {
                r += (root.admissible[j] & t.xcover[x * w + j]).count_ones() as usize;
            }
            if r == 0 {
                return Ok(());
            }
            if r < best_r {
                best_r = r;
                best_x = x;
            }
        }
    }
    let mut ys: Vec<usize> = Vec::new();
    for j in 0..w {
        let mut c = root.admissible[j] & t.xcover[best_x * w + j];
        while c != 0 {
            ys.push(j * 64 + c.trailing_zeros() as usize);
            c &= c - 1;
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| Error::domain(format!("explore: thread pool: {e}")))?;
    let branch_results: Vec<Result<Vec<Vec<u32>>>> = pool.install(|| {
        ys.par_iter()
            .map(|&y| {
                let mut st = State::new(t, depth_cap);
                seed_root(t, &mut st);
                descend(t, &mut st, 0, y);
                // Shift the child into slot 0 so each worker's stacks are
                // self-contained.
                st.covered.copy_within(w..2 * w, 0);
                st.admissible.copy_within(w..2 * w, 0);
                st.pmask.copy_within(w..2 * w, 0);
                st.p = vec![0, y as u32];
                let mut memo = make_memo();
                let mut found: Vec<Vec<u32>> = Vec::new();
                recurse(t, &mut st, &mut memo, 0, &mut |members: &[u32]| {
                    found.push(members.to_vec())
                })?;
                Ok(found)
            })
            .collect()
    });
    for branch in branch_results {
        for members in branch? {
            sink(&members);
        }
    }
    Ok(())
}

/// Filter a batch of sets down to the non-periodic ones (least period = N)
/// and collapse translation orbits to canonical representatives, sorted.
pub fn nonperiodic_orbits(sets: &[ResidueSet]) -> Result<Vec<ResidueSet>> {
    let Some(first) = sets.first() else {
        return Ok(Vec::new());
    };
    let n = first.modulus();
    let mut orbits: HashSet<ResidueSet> = HashSet::new();
    for s in sets {
        if s.modulus() != n {
            return Err(Error::domain(format!(
                "nonperiodic_orbits: mixed moduli {} and {}",
                n,
                s.modulus()
            )));
        }
        if s.least_period()? == n {
            orbits.insert(s.canonical_translate()?);
        }
    }
    let mut out: Vec<ResidueSet> = orbits.into_iter().collect();
    out.sort_by(|x, y| x.cmp_members(y));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rs(n: u64, members: &[u64]) -> ResidueSet {
        ResidueSet::from_members(n, members).unwrap()
    }

    fn members_of(sets: &[ResidueSet]) -> Vec<Vec<u64>> {
        sets.iter().map(|s| s.members()).collect()
    }

    #[test]
    fn rank_example() {
        // A = {0,1} in Z_4 with the copy at 0 placed: both 2 and 3 are only
        // coverable by the copy at 2.
        let table = rank(&rs(4, &[0, 1]), &rs(4, &[0, 1])).unwrap();
        assert_eq!(table.entries.len(), 2);
        assert_eq!(
            (table.entries[0].x, table.entries[0].rank, table.entries[0].candidates.clone()),
            (2, 1, vec![2])
        );
        assert_eq!(
            (table.entries[1].x, table.entries[1].rank, table.entries[1].candidates.clone()),
            (3, 1, vec![2])
        );
    }

    #[test]
    fn rank_of_fully_covered_is_empty() {
        let table = rank(&rs(6, &[0, 3]), &ResidueSet::full(6).unwrap()).unwrap();
        assert!(table.entries.is_empty());
    }

    #[test]
    fn rank_detects_dead_elements() {
        // A = {0,1} in Z_4, copies at 0 and... covered {0,1,2}: element 3
        // can only be covered by copies at 2 or 3, both overlapping.
        let table = rank(&rs(4, &[0, 1]), &rs(4, &[0, 1, 2])).unwrap();
        assert_eq!(table.entries[0].x, 3);
        assert_eq!(table.entries[0].rank, 0);
    }

    #[test]
    fn explore_tiny_examples() {
        assert_eq!(members_of(&explore(&rs(4, &[0, 1])).unwrap()), vec![vec![0, 2]]);
        assert_eq!(
            members_of(&explore(&rs(4, &[0, 2])).unwrap()),
            vec![vec![0, 1], vec![0, 3]]
        );
        // |A| does not divide N.
        assert!(explore(&rs(9, &[0, 1])).unwrap().is_empty());
        // A = {0}: the only complement is all of Z_N.
        assert_eq!(
            members_of(&explore(&rs(3, &[0])).unwrap()),
            vec![vec![0, 1, 2]]
        );
        // The full set's only complement is {0}.
        assert_eq!(
            members_of(&explore(&ResidueSet::full(5).unwrap()).unwrap()),
            vec![vec![0]]
        );
        assert!(explore(&rs(4, &[1, 2])).is_err());
    }

    #[test]
    fn explore_outputs_verify() {
        let a = rs(12, &[0, 1, 6, 7]);
        let found = explore(&a).unwrap();
        assert!(!found.is_empty());
        for b in &found {
            assert!(crate::zset::verify_tiling(&a, b).unwrap());
            assert!(b.contains(0));
        }
    }

    #[test]
    fn explore_is_deterministic_and_memo_insensitive() {
        let a = rs(24, &[0, 2, 7, 9]);
        let with_memo = explore(&a).unwrap();
        let no_memo = explore_with(
            &a,
            &FillOutConfig {
                memo: MemoMode::Disabled,
                threads: 1,
            },
        )
        .unwrap();
        assert_eq!(with_memo, no_memo);
        assert_eq!(with_memo, explore(&a).unwrap());
    }

    #[test]
    fn parallel_matches_sequential() {
        for members in [&[0u64, 1, 6, 7][..], &[0, 3], &[0]] {
            let a = rs(12, members);
            let seq = explore(&a).unwrap();
            let par = explore_with(
                &a,
                &FillOutConfig {
                    memo: MemoMode::Exact { cap_bytes: 1 << 31 },
                    threads: 3,
                },
            )
            .unwrap();
            assert_eq!(seq, par, "A = {members:?}");
        }
    }

    #[test]
    fn memo_cap_is_a_hard_error() {
        let a = rs(24, &[0, 1, 2, 3]);
        let result = explore_with(
            &a,
            &FillOutConfig {
                memo: MemoMode::Exact { cap_bytes: 8 },
                threads: 1,
            },
        );
        assert!(matches!(result, Err(Error::MemoCapacity { .. })));
    }

    #[test]
    fn nonperiodic_orbit_filtering() {
        let sets = [rs(4, &[0, 2]), rs(4, &[0, 1]), rs(4, &[0, 3])];
        // {0,2} has period 2; {0,1} and {0,3} are one orbit.
        assert_eq!(
            members_of(&nonperiodic_orbits(&sets).unwrap()),
            vec![vec![0, 1]]
        );
        assert!(nonperiodic_orbits(&[]).unwrap().is_empty());
        assert!(nonperiodic_orbits(&[rs(4, &[0]), rs(6, &[0])]).is_err());
    }

    #[test]
    fn explore_respects_translation_closure() {
        // If B is a complement then so is every translate; the ones
        // containing 0 must all be in the output.
        let a = rs(18, &[0, 1, 2]);
        let found = explore(&a).unwrap();
        for b in &found {
            for t in b.members() {
                let shifted = b.translate(18 - t);
                assert!(found.contains(&shifted));
            }
        }
    }
}
