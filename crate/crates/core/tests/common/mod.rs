//! Shared test oracles, deliberately dumber than the library: plain
//! depth-first search over boolean arrays, no ranking heuristic, no
//! bitsets, no memo. Slow and obviously correct is the point.

#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use tiling_core::zset::ResidueSet;

/// Every complement of `a` in Z_n that contains 0 (the fill-out's
/// normalization), by branching on the smallest uncovered element. Each
/// complement must cover that element with exactly one translate, so the
/// branches partition the solution set: every complement appears exactly
/// once, with no deduplication step. The search itself enumerates all
/// complements; the 0 ∈ B convention is applied as a final filter.
pub fn oracle_complements(a: &ResidueSet) -> Vec<ResidueSet> {
    let n = a.modulus() as usize;
    let members: Vec<usize> = a.members().iter().map(|&m| m as usize).collect();
    let mut out: Vec<Vec<u64>> = Vec::new();
    if members.is_empty() || n % members.len() != 0 {
        return Vec::new();
    }
    let mut covered = vec![false; n];
    let mut chosen: Vec<u64> = Vec::new();
    dfs(&members, n, &mut covered, &mut chosen, &mut out);
    let mut sets: Vec<ResidueSet> = out
        .into_iter()
        .filter(|ms| ms.contains(&0))
        .map(|ms| ResidueSet::from_members(a.modulus(), &ms).expect("oracle members in range"))
        .collect();
    sets.sort_by(|x, y| x.members().cmp(&y.members()));
    sets
}

fn dfs(
    a: &[usize],
    n: usize,
    covered: &mut [bool],
    chosen: &mut Vec<u64>,
    out: &mut Vec<Vec<u64>>,
) {
    let x = match covered.iter().position(|&c| !c) {
        None => {
            let mut solution = chosen.clone();
            solution.sort_unstable();
            out.push(solution);
            return;
        }
        Some(x) => x,
    };
    for &ai in a {
        let y = (x + n - ai % n) % n;
        if a.iter().all(|&aj| !covered[(aj + y) % n]) {
            for &aj in a {
                covered[(aj + y) % n] = true;
            }
            chosen.push(y as u64);
            dfs(a, n, covered, chosen, out);
            chosen.pop();
            for &aj in a {
                covered[(aj + y) % n] = false;
            }
        }
    }
}

/// Does `a` tile Z_n at all? Same search, stopping at the first success.
pub fn oracle_tiles(a: &ResidueSet) -> bool {
    let n = a.modulus() as usize;
    let members: Vec<usize> = a.members().iter().map(|&m| m as usize).collect();
    if members.is_empty() || n % members.len() != 0 {
        return false;
    }
    let mut covered = vec![false; n];
    dfs_any(&members, n, &mut covered)
}

fn dfs_any(a: &[usize], n: usize, covered: &mut [bool]) -> bool {
    let x = match covered.iter().position(|&c| !c) {
        None => return true,
        Some(x) => x,
    };
    for &ai in a {
        let y = (x + n - ai % n) % n;
        if a.iter().all(|&aj| !covered[(aj + y) % n]) {
            for &aj in a {
                covered[(aj + y) % n] = true;
            }
            if dfs_any(a, n, covered) {
                return true;
            }
            for &aj in a {
                covered[(aj + y) % n] = false;
            }
        }
    }
    false
}

/// A uniformly random k-subset of Z_n containing 0.
pub fn random_set(n: u64, k: usize, rng: &mut impl Rng) -> ResidueSet {
    let mut pool: Vec<u64> = (1..n).collect();
    pool.shuffle(rng);
    let mut members = vec![0u64];
    members.extend(pool.into_iter().take(k - 1));
    ResidueSet::from_members(n, &members).expect("members below n")
}

/// A random complete-digit-set tile of Z_n: order the prime factors into a
/// random mixed-radix chain, pick a random subset of positions, and take
/// all digit combinations there. Such sets always tile (the complement is
/// the digit set of the remaining positions), giving a guaranteed-tile
/// generator that owes nothing to the code under test.
pub fn random_digit_tile(n: u64, rng: &mut impl Rng) -> ResidueSet {
    let mut radices: Vec<u64> = Vec::new();
    let mut m = n;
    let mut p = 2;
    while m > 1 {
        while m % p == 0 {
            radices.push(p);
            m /= p;
        }
        p += 1;
    }
    radices.shuffle(rng);
    let mut weights = Vec::with_capacity(radices.len());
    let mut w = 1u64;
    for &r in &radices {
        weights.push(w);
        w *= r;
    }
    let chosen: Vec<usize> = (0..radices.len()).filter(|_| rng.gen_bool(0.5)).collect();
    let mut members = vec![0u64];
    for &i in &chosen {
        let mut next = Vec::with_capacity(members.len() * radices[i] as usize);
        for d in 0..radices[i] {
            next.extend(members.iter().map(|&x| x + d * weights[i]));
        }
        members = next;
    }
    // Translate a random member onto 0: tiling is translation invariant
    // but the digit construction is not, so this stretches the shapes a
    // little while keeping 0 ∈ A (which the fill-out requires).
    let pivot = members[rng.gen_range(0..members.len())];
    let translated: Vec<u64> = members.iter().map(|&x| (x + n - pivot) % n).collect();
    ResidueSet::from_members(n, &translated).expect("members below n")
}
