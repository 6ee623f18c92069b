use super::CellMap;
use crate::error::{Error, Result};
use crate::externology::{Tail, Tower};
use crate::space::{AtomSet, CellId, FiniteSpace};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AbsorbingCertificate {
    /// Per cell, an upper bound on the steps any walk spends before entering U.
    EntryBounds(Vec<u32>),
    /// An edge leaving U.
    Escapes { from: CellId, to: CellId },
    /// A directed cycle avoiding U.
    CycleOutside(Vec<CellId>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RExteriorCheck {
    pub is_exterior: bool,
    pub certificate: AbsorbingCertificate,
}

impl RExteriorCheck {
    pub fn max_entry_time(&self) -> Option<u32> {
        match &self.certificate {
            AbsorbingCertificate::EntryBounds(b) => Some(b.iter().copied().max().unwrap_or(0)),
            _ => None,
        }
    }
}

/// Decides whether the open set `u` absorbs every forward walk.
///
/// `u` must be forward invariant (Exit edges are ignored) and the cells
/// outside it must not carry a directed cycle.
pub fn is_r_exterior(space: &FiniteSpace, map: &CellMap, u: &AtomSet) -> Result<RExteriorCheck> {
    if let Some(a) = space.first_non_open(u) {
        return Err(Error::NotOpen(a));
    }
    let n = map.len();
    let inside: Vec<bool> = (0..n).map(|c| u.contains(space.top_atom(CellId(c as u32)))).collect();
    for c in map.cells().filter(|c| inside[c.index()]) {
        if let Some(&d) = map.successors(c).iter().find(|d| !inside[d.index()]) {
            return Ok(RExteriorCheck {
                is_exterior: false,
                certificate: AbsorbingCertificate::Escapes { from: c, to: d },
            });
        }
    }

    // Kahn-style peeling of the outside subgraph from its sinks.
    let pred = map.predecessors();
    let mut pending: Vec<usize> = (0..n)
        .map(|c| {
            if inside[c] {
                0
            } else {
                map.successors(CellId(c as u32)).iter().filter(|d| !inside[d.index()]).count()
            }
        })
        .collect();
    let mut bound = vec![0u32; n];
    let mut done = inside.clone();
    let mut ready: Vec<usize> = (0..n).filter(|&c| !inside[c] && pending[c] == 0).collect();
    while let Some(c) = ready.pop() {
        bound[c] = 1 + map
            .successors(CellId(c as u32))
            .iter()
            .map(|d| bound[d.index()])
            .max()
            .unwrap_or(0);
        done[c] = true;
        for p in &pred[c] {
            let p = p.index();
            if !inside[p] {
                pending[p] -= 1;
                if pending[p] == 0 {
                    ready.push(p);
                }
            }
        }
    }

    match done.iter().position(|&d| !d) {
        None => Ok(RExteriorCheck {
            is_exterior: true,
            certificate: AbsorbingCertificate::EntryBounds(bound),
        }),
        Some(start) => {
            // every unpeeled cell has an unpeeled successor, so following them must loop
            let mut order = vec![usize::MAX; n];
            let mut path = Vec::new();
            let mut c = start;
            while order[c] == usize::MAX {
                order[c] = path.len();
                path.push(CellId(c as u32));
                c = map
                    .successors(CellId(c as u32))
                    .iter()
                    .find(|d| !done[d.index()])
                    .expect("unpeeled cells keep an unpeeled successor")
                    .index();
            }
            let mut cycle = path.split_off(order[c]);
            let rot = cycle.iter().enumerate().min_by_key(|(_, c)| **c).map(|(i, _)| i).unwrap_or(0);
            cycle.rotate_left(rot);
            Ok(RExteriorCheck {
                is_exterior: false,
                certificate: AbsorbingCertificate::CycleOutside(cycle),
            })
        }
    }
}

/// Canonical absorbing chain `E_k = open_hull(map^k(all top cells))`.
///
/// Stops at the first fixpoint (tail `Stabilized`, fixpoint level repeated
/// unless it is the first level) or when the next image is empty (tail
/// `ShrinksToEmpty`, only nonempty levels kept). Reaching `max_depth` map
/// applications without either is treated as stabilization.
pub fn r_exterior_tower(space: &FiniteSpace, map: &CellMap, max_depth: usize) -> Tower {
    let max_depth = max_depth.max(1);
    let mut current = vec![true; map.len()];
    let mut levels = vec![space.all()];
    for _ in 0..max_depth {
        let next = map.image(&current);
        if next == current {
            if levels.len() > 1 {
                levels.push(levels.last().expect("nonempty").clone());
            }
            return Tower::new(levels, Tail::Stabilized);
        }
        if !next.iter().any(|&b| b) {
            return Tower::new(levels, Tail::ShrinksToEmpty);
        }
        levels.push(hull_of_mask(space, &next));
        current = next;
    }
    levels.push(levels.last().expect("nonempty").clone());
    Tower::new(levels, Tail::Stabilized)
}

/// Default depth for [`r_exterior_tower`]: enough to reach any fixpoint.
pub fn default_depth(map: &CellMap) -> usize {
    map.len() + 1
}

fn hull_of_mask(space: &FiniteSpace, mask: &[bool]) -> AtomSet {
    let tops = space.cells_to_atoms(super::mask_to_cells(mask));
    space.open_hull(&tops)
}

/// Reversed map: edges transposed, cells without preimage exit.
pub fn reverse(map: &CellMap) -> CellMap {
    let images = map.predecessors();
    let exits = images.iter().map(Vec::is_empty).collect();
    CellMap::new(images, exits).expect("transposed edges stay in range")
}
