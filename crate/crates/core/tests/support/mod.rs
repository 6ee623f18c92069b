#![allow(dead_code)]

use efl_core::dynamics::CellMap;
use efl_core::externology::{Tail, Tower};
use efl_core::{Atom, AtomId, AtomSet, CellId, FiniteSpace};
use proptest::prelude::*;

/// Random poset on `n ≤ 10` atoms: pair `(i, j)`, `i < j`, is a face relation when its bit is set.
pub fn space_strategy(max: usize) -> impl Strategy<Value = FiniteSpace> {
    (1..=max).prop_flat_map(|n| {
        proptest::collection::vec(proptest::bool::weighted(0.3), n * (n - 1) / 2).prop_map(move |bits| poset(n, &bits))
    })
}

pub fn poset(n: usize, bits: &[bool]) -> FiniteSpace {
    let atoms = (0..n).map(|i| Atom::new(format!("a{i}"), None)).collect();
    let mut rel = Vec::new();
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            if bits[k] {
                rel.push((AtomId(i as u32), AtomId(j as u32)));
            }
            k += 1;
        }
    }
    FiniteSpace::from_order(atoms, &rel).expect("forward edges are acyclic")
}

/// Subset of the atoms from a bit mask (bits past the space size are ignored).
pub fn subset(space: &FiniteSpace, mask: &[bool]) -> AtomSet {
    space.set_of(space.atoms().filter(|a| mask.get(a.index()).copied().unwrap_or(false)))
}

/// Decreasing chain of open sets starting at `X`, carved from random masks.
pub fn tower_from_masks(space: &FiniteSpace, masks: &[Vec<bool>], shrink: bool) -> Tower {
    let mut levels = vec![space.all()];
    for m in masks {
        let prev = levels.last().unwrap().clone();
        let next = space.interior(&prev.intersection(&subset(space, m)));
        if shrink && next.is_empty() {
            break;
        }
        levels.push(next);
    }
    if shrink {
        if levels.last().unwrap().is_empty() {
            levels.pop();
        }
        if levels.is_empty() {
            levels.push(space.all());
        }
        Tower::new(levels, Tail::ShrinksToEmpty)
    } else {
        let last = levels.last().unwrap().clone();
        if levels.len() > 1 {
            levels.push(last);
        }
        Tower::new(levels, Tail::Stabilized)
    }
}

pub fn masks_strategy(levels: usize) -> impl Strategy<Value = Vec<Vec<bool>>> {
    proptest::collection::vec(proptest::collection::vec(proptest::bool::weighted(0.7), 10), 1..=levels)
}

/// Random multivalued map on `n` cells from per-cell image masks and exit flags.
pub fn map_from_bits(n: usize, images: &[u16], exits: &[bool]) -> CellMap {
    let imgs = (0..n)
        .map(|c| (0..n).filter(|&d| images[c] >> d & 1 == 1).map(|d| CellId(d as u32)).collect())
        .collect();
    CellMap::new(imgs, exits[..n].to_vec()).expect("in range")
}

pub fn map_bits_strategy() -> impl Strategy<Value = (Vec<u16>, Vec<bool>)> {
    (
        proptest::collection::vec(any::<u16>().prop_map(|b| b & (b >> 3) & (b >> 7)), 16),
        proptest::collection::vec(proptest::bool::weighted(0.15), 16),
    )
}

/// Components by breadth-first search over comparability inside `s`.
pub fn bfs_components(space: &FiniteSpace, s: &AtomSet) -> Vec<AtomSet> {
    let mut seen = space.none();
    let mut out = Vec::new();
    for x in s {
        if seen.contains(x) {
            continue;
        }
        let mut comp = space.none();
        let mut queue = std::collections::VecDeque::from([x]);
        seen.insert(x);
        while let Some(y) = queue.pop_front() {
            comp.insert(y);
            for z in s {
                let comparable = space.min_open(y).contains(z) || space.min_open(z).contains(y);
                if comparable && !seen.contains(z) {
                    seen.insert(z);
                    queue.push_back(z);
                }
            }
        }
        out.push(comp);
    }
    out
}

/// `⋂ₙ mapⁿ(R)` from the cells reachable from `c`, iterated literally.
pub fn omega_fixpoint(map: &CellMap, c: CellId) -> Vec<bool> {
    let n = map.len();
    let mut reach = vec![false; n];
    reach[c.index()] = true;
    loop {
        let mut next = reach.clone();
        for d in 0..n {
            if reach[d] {
                for e in map.successors(CellId(d as u32)) {
                    next[e.index()] = true;
                }
            }
        }
        if next == reach {
            break;
        }
        reach = next;
    }
    let mut t = reach;
    loop {
        let mut next = vec![false; n];
        for d in 0..n {
            if t[d] {
                for e in map.successors(CellId(d as u32)) {
                    next[e.index()] = true;
                }
            }
        }
        if next == t {
            return t;
        }
        t = next;
    }
}

pub fn cells_of(mask: &[bool]) -> Vec<CellId> {
    mask.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| CellId(i as u32)).collect()
}

/// Threads of components through all levels, enumerated from the top.
pub fn count_threads(space: &FiniteSpace, tower: &Tower) -> usize {
    let comps: Vec<Vec<AtomSet>> = tower.levels().iter().map(|l| bfs_components(space, l)).collect();
    fn go(comps: &[Vec<AtomSet>], k: usize, cur: &AtomSet) -> usize {
        if k == comps.len() {
            return 1;
        }
        comps[k].iter().filter(|c| c.is_subset(cur)).map(|c| go(comps, k + 1, c)).sum()
    }
    comps[0].iter().map(|c| go(&comps, 1, c)).sum()
}
