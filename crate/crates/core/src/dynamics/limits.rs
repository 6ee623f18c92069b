use super::graph::Condensation;
use super::{cells_to_mask, mask_to_cells, CellMap};
use crate::error::{Error, Result};
use crate::space::{AtomId, AtomSet, CellId, FiniteSpace};

/// Recurrence structure of a cell map.
///
/// ω(c), the fixpoint of `T ← map(T)` started from the cells reachable
/// from `c`, equals the set of cells reachable from some cyclic strongly
/// connected component that `c` reaches: those are exactly the cells with
/// arbitrarily long paths from the reachable set. Everything here is
/// computed on the component DAG in linear time.
#[derive(Clone, Debug)]
pub struct Recurrence {
    dag: Condensation,
}

impl Recurrence {
    pub fn new(map: &CellMap) -> Self {
        Recurrence {
            dag: Condensation::new(map),
        }
    }

    pub fn condensation(&self) -> &Condensation {
        &self.dag
    }

    /// ω(c) as a cell mask.
    pub fn omega(&self, map: &CellMap, c: CellId) -> Vec<bool> {
        let reach = map.forward_closure(&cells_to_mask(map.len(), &[c]));
        let seeds: Vec<bool> = (0..map.len())
            .map(|d| reach[d] && self.dag.is_cyclic(self.dag.component_of(CellId(d as u32))))
            .collect();
        map.forward_closure(&seeds)
    }

    /// Union of all ω(c).
    pub fn omega_global(&self, map: &CellMap) -> Vec<bool> {
        let seeds: Vec<bool> = (0..map.len())
            .map(|d| self.dag.is_cyclic(self.dag.component_of(CellId(d as u32))))
            .collect();
        map.forward_closure(&seeds)
    }

    /// Per cell: (ω(c) ≠ ∅, ω(c) ∩ M ≠ ∅, ω(c) ⊆ M).
    fn omega_vs(&self, map: &CellMap, m: &[bool]) -> Vec<(bool, bool, bool)> {
        let dag = &self.dag;
        // downstream of a component: reaches M / stays within M
        let down = dag.fold_up(|s, succ: &[&(bool, bool)]| {
            let here_hit = dag.members(s).iter().any(|c| m[c.index()]);
            let here_in = dag.members(s).iter().all(|c| m[c.index()]);
            (
                here_hit || succ.iter().any(|x| x.0),
                here_in && succ.iter().all(|x| x.1),
            )
        });
        // over cyclic components reachable from s: any / hits M / all inside M
        let verdict = dag.fold_up(|s, succ: &[&(bool, bool, bool)]| {
            let mut acc = if dag.is_cyclic(s) {
                (true, down[s].0, down[s].1)
            } else {
                (false, false, true)
            };
            for x in succ {
                acc = (acc.0 || x.0, acc.1 || x.1, acc.2 && x.2);
            }
            acc
        });
        (0..map.len())
            .map(|c| verdict[dag.component_of(CellId(c as u32))])
            .collect()
    }
}

fn require_top(space: &FiniteSpace, a: AtomId) -> Result<CellId> {
    space.cell_of(a).ok_or(Error::NotATopCell(a))
}

/// ω-limit of the top cell `c`, as atoms.
pub fn omega_limit(space: &FiniteSpace, map: &CellMap, c: AtomId) -> Result<AtomSet> {
    let cell = require_top(space, c)?;
    let omega = Recurrence::new(map).omega(map, cell);
    Ok(space.cells_to_atoms(mask_to_cells(&omega)))
}

pub fn omega_global(space: &FiniteSpace, map: &CellMap) -> AtomSet {
    let omega = Recurrence::new(map).omega_global(map);
    space.cells_to_atoms(mask_to_cells(&omega))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellClasses {
    /// `c ∈ map(c)`.
    pub critical: Vec<CellId>,
    /// Cells on a directed cycle.
    pub periodic: Vec<CellId>,
    /// `c ∈ ω(c)`.
    pub poisson: Vec<CellId>,
    pub omega: Vec<CellId>,
}

pub fn classify_cells(map: &CellMap) -> CellClasses {
    let rec = Recurrence::new(map);
    let dag = rec.condensation();
    let critical = map.cells().filter(|&c| map.successors(c).contains(&c)).collect();
    let periodic: Vec<CellId> = map.cells().filter(|&c| dag.is_cyclic(dag.component_of(c))).collect();
    // c ∈ ω(c) iff c can return to itself, i.e. c lies in a cyclic component
    let poisson = periodic.clone();
    CellClasses {
        critical,
        periodic,
        poisson,
        omega: mask_to_cells(&rec.omega_global(map)),
    }
}

/// Cells of `a` with both an infinite forward walk and an infinite
/// backward chain inside `a`, found by repeated trimming.
pub fn invariant_hull(map: &CellMap, a: &[CellId]) -> Vec<CellId> {
    let mut inside = cells_to_mask(map.len(), a);
    let pred = map.predecessors();
    loop {
        let mut changed = false;
        for c in map.cells() {
            if !inside[c.index()] {
                continue;
            }
            let fwd = map.successors(c).iter().any(|d| inside[d.index()]);
            let bwd = pred[c.index()].iter().any(|d| inside[d.index()]);
            if !fwd || !bwd {
                inside[c.index()] = false;
                changed = true;
            }
        }
        if !changed {
            return mask_to_cells(&inside);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttractionReport {
    /// `{c | ω(c) ∩ M ≠ ∅}`.
    pub weak_region: Vec<CellId>,
    /// `{c | ω(c) ≠ ∅, ω(c) ⊆ M}`.
    pub strong_region: Vec<CellId>,
    pub is_weak_attractor: bool,
    pub is_attractor: bool,
    pub is_global_weak: bool,
    pub is_global: bool,
}

/// Regions of (weak) attraction of `m`.
///
/// A region counts as a neighborhood of `m` when it contains `m` and every
/// top cell sharing a face with `m`.
pub fn attraction_analysis(space: &FiniteSpace, map: &CellMap, m: &[CellId]) -> AttractionReport {
    let mask = cells_to_mask(map.len(), m);
    let verdicts = Recurrence::new(map).omega_vs(map, &mask);
    let weak: Vec<bool> = verdicts.iter().map(|v| v.1).collect();
    let strong: Vec<bool> = verdicts.iter().map(|v| v.0 && v.2).collect();

    let mut nbhd = mask.clone();
    for &c in m {
        for d in space.adjacent_cells(c) {
            nbhd[d.index()] = true;
        }
    }
    let covers = |region: &[bool]| !m.is_empty() && nbhd.iter().zip(region).all(|(&n, &r)| !n || r);
    let everything = |region: &[bool]| region.iter().all(|&r| r);
    AttractionReport {
        is_weak_attractor: covers(&weak),
        is_attractor: covers(&strong),
        is_global_weak: covers(&weak) && everything(&weak),
        is_global: covers(&strong) && everything(&strong),
        weak_region: mask_to_cells(&weak),
        strong_region: mask_to_cells(&strong),
    }
}


#[cfg(test)]
mod tests {
    use super::oracle::omega_fixpoint;
    use super::*;
    use crate::gallery;

    fn cells(space: &FiniteSpace, labels: &[&str]) -> Vec<CellId> {
        labels.iter().map(|l| space.cell(l).unwrap()).collect()
    }

    #[test]
    fn line5shift_omega() {
        let f = gallery::line5shift();
        let map = f.map.as_ref().unwrap();
        let w = omega_limit(&f.space, map, f.space.find("c0").unwrap()).unwrap();
        assert_eq!(w, f.space.set_by_labels(&["c4"]));
        let w = omega_limit(&f.space, map, f.space.find("c4").unwrap()).unwrap();
        assert_eq!(w, f.space.set_by_labels(&["c4"]));
        assert_eq!(
            omega_limit(&f.space, map, f.space.find("f01").unwrap()),
            Err(Error::NotATopCell(f.space.find("f01").unwrap()))
        );
    }

    #[test]
    fn twosinks_omega() {
        let f = gallery::twosinks();
        let map = f.map.as_ref().unwrap();
        let w = omega_limit(&f.space, map, f.space.find("c2").unwrap()).unwrap();
        assert_eq!(w, f.space.set_by_labels(&["c0", "c4"]));
    }

    #[test]
    fn omega_matches_fixpoint_on_gallery() {
        for f in gallery::all_fixtures() {
            let Some(map) = f.map.as_ref() else { continue };
            if map.len() > 300 {
                continue;
            }
            let rec = Recurrence::new(map);
            for c in map.cells() {
                assert_eq!(rec.omega(map, c), omega_fixpoint(map, c), "{} cell {c}", f.name);
            }
        }
    }

    #[test]
    fn classes() {
        let f = gallery::line5shift();
        let cl = classify_cells(f.map.as_ref().unwrap());
        let c4 = cells(&f.space, &["c4"]);
        assert_eq!((&cl.critical, &cl.periodic, &cl.poisson), (&c4, &c4, &c4));

        let f = gallery::cycle3();
        let cl = classify_cells(f.map.as_ref().unwrap());
        assert!(cl.critical.is_empty());
        assert_eq!(cl.periodic, cells(&f.space, &["c0", "c1", "c2"]));
        assert_eq!(cl.poisson, cl.periodic);

        let f = gallery::morse_circle(8).unwrap();
        let cl = classify_cells(f.map.as_ref().unwrap());
        assert_eq!(cl.critical, cells(&f.space, &["M", "m"]));
        assert_eq!(cl.periodic, cl.critical);
        assert_eq!(cl.poisson, cl.critical);
    }

    #[test]
    fn hull_trims_transients() {
        let f = gallery::twosinks();
        let map = f.map.as_ref().unwrap();
        let all: Vec<CellId> = map.cells().collect();
        assert_eq!(invariant_hull(map, &all), cells(&f.space, &["c0", "c4"]));
        let f = gallery::cycle3();
        let map = f.map.as_ref().unwrap();
        let all: Vec<CellId> = map.cells().collect();
        assert_eq!(invariant_hull(map, &all), all);
    }

    #[test]
    fn attraction_examples() {
        let f = gallery::line5shift();
        let r = attraction_analysis(&f.space, f.map.as_ref().unwrap(), &cells(&f.space, &["c4"]));
        assert!(r.is_global && r.is_global_weak && r.is_attractor);

        let f = gallery::twosinks();
        let map = f.map.as_ref().unwrap();
        let r = attraction_analysis(&f.space, map, &cells(&f.space, &["c0"]));
        assert!(r.is_attractor && !r.is_global);
        assert_eq!(r.strong_region, cells(&f.space, &["c0", "c1"]));
        assert_eq!(r.weak_region, cells(&f.space, &["c0", "c1", "c2"]));

        let r = attraction_analysis(&f.space, map, &cells(&f.space, &["c2"]));
        assert!(!r.is_weak_attractor && !r.is_attractor);
        assert!(r.weak_region.is_empty());
    }
}
