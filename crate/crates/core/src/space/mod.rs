//! Finite T₀ spaces given by minimal open neighborhoods.
//!
//! A finite T₀ space is the same thing as a finite poset: `y ∈ U_x` reads
//! "x is a face of y". Open sets are up-sets, closed sets are down-sets, and
//! the maximal atoms (those with `U_x = {x}`) are the top cells on which
//! dynamics is defined.

mod atomset;
pub(crate) mod grid;
mod unionfind;

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

pub use atomset::AtomSet;
pub use grid::{build_grid_space, Boundary};
pub use unionfind::UnionFind;

/// Index of an atom in its owning space.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct AtomId(pub u32);

impl AtomId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for AtomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Index of a top cell (maximal atom) in top-cell order.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CellId(pub u32);

impl CellId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cell{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom {
    pub label: String,
    pub dim: Option<u8>,
}

impl Atom {
    pub fn new(label: impl Into<String>, dim: Option<u8>) -> Self {
        Atom {
            label: label.into(),
            dim,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HullMode {
    Interior,
    Closure,
    OpenHull,
}

/// Blocks of a partition, ordered by least atom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    blocks: Vec<AtomSet>,
    block_of: Vec<Option<u32>>,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> &[AtomSet] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &AtomSet {
        &self.blocks[i]
    }

    pub fn block_of(&self, a: AtomId) -> Option<usize> {
        self.block_of.get(a.index()).copied().flatten().map(|b| b as usize)
    }

    /// The least atom of block `i`, which serves as its label.
    pub fn label(&self, i: usize) -> AtomId {
        self.blocks[i].first().expect("blocks are nonempty")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Saturation {
    pub is_saturated: bool,
    pub saturation: AtomSet,
}

#[derive(Clone, Debug)]
pub struct FiniteSpace {
    atoms: Vec<Atom>,
    min_open: Vec<AtomSet>,
    /// `lower[y]` lists every x with `y ∈ U_x`.
    lower: Vec<Vec<AtomId>>,
    tops: Vec<AtomId>,
    cell_of: Vec<Option<CellId>>,
    by_label: HashMap<String, AtomId>,
}

impl FiniteSpace {
    /// Builds a space from its minimal-open-neighborhood table, checking the
    /// T₀ space axioms.
    pub fn from_min_opens(atoms: Vec<Atom>, min_open: Vec<AtomSet>) -> Result<Self> {
        let n = atoms.len();
        if n == 0 {
            return Err(Error::EmptySpace);
        }
        if min_open.len() != n {
            return Err(Error::InvalidSpace(format!(
                "{} atoms but {} neighborhoods",
                n,
                min_open.len()
            )));
        }
        let mut by_label = HashMap::with_capacity(n);
        for (i, atom) in atoms.iter().enumerate() {
            if by_label.insert(atom.label.clone(), AtomId(i as u32)).is_some() {
                return Err(Error::InvalidSpace(format!("duplicate label `{}`", atom.label)));
            }
        }
        for (i, u) in min_open.iter().enumerate() {
            let x = AtomId(i as u32);
            if u.universe() != n {
                return Err(Error::InvalidSpace(format!("neighborhood of {} has wrong universe", atoms[i].label)));
            }
            if !u.contains(x) {
                return Err(Error::InvalidSpace(format!("{} not in its own neighborhood", atoms[i].label)));
            }
            for y in u {
                if !min_open[y.index()].is_subset(u) {
                    return Err(Error::InvalidSpace(format!(
                        "incoherent neighborhoods: {} ∈ U({}) but U({}) ⊄ U({})",
                        atoms[y.index()].label,
                        atoms[i].label,
                        atoms[y.index()].label,
                        atoms[i].label
                    )));
                }
                if y != x && min_open[y.index()] == *u {
                    return Err(Error::InvalidSpace(format!(
                        "not T0: {} and {} share a minimal neighborhood",
                        atoms[i].label,
                        atoms[y.index()].label
                    )));
                }
            }
        }
        let mut lower = vec![Vec::new(); n];
        for (i, u) in min_open.iter().enumerate() {
            for y in u {
                lower[y.index()].push(AtomId(i as u32));
            }
        }
        let mut tops = Vec::new();
        let mut cell_of = vec![None; n];
        for (i, u) in min_open.iter().enumerate() {
            if u.len() == 1 {
                cell_of[i] = Some(CellId(tops.len() as u32));
                tops.push(AtomId(i as u32));
            }
        }
        Ok(FiniteSpace {
            atoms,
            min_open,
            lower,
            tops,
            cell_of,
            by_label,
        })
    }

    /// Builds a space from a partial order given by pairs `(face, coface)`;
    /// the order is closed transitively.
    pub fn from_order(atoms: Vec<Atom>, relations: &[(AtomId, AtomId)]) -> Result<Self> {
        let n = atoms.len();
        let mut up = vec![Vec::new(); n];
        for &(a, b) in relations {
            if a.index() >= n || b.index() >= n {
                return Err(Error::InvalidSpace(format!("relation ({a}, {b}) out of range")));
            }
            if a != b {
                up[a.index()].push(b);
            }
        }
        let mut min_open = Vec::with_capacity(n);
        for x in 0..n {
            let mut seen = AtomSet::empty(n);
            let mut stack = vec![AtomId(x as u32)];
            seen.insert(AtomId(x as u32));
            while let Some(y) = stack.pop() {
                for &z in &up[y.index()] {
                    if z.index() == x {
                        return Err(Error::InvalidSpace(format!(
                            "order relation has a cycle through {}",
                            atoms[x].label
                        )));
                    }
                    if seen.insert(z) {
                        stack.push(z);
                    }
                }
            }
            min_open.push(seen);
        }
        Self::from_min_opens(atoms, min_open)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> impl ExactSizeIterator<Item = AtomId> + '_ {
        (0..self.atoms.len() as u32).map(AtomId)
    }

    pub fn atom(&self, a: AtomId) -> &Atom {
        &self.atoms[a.index()]
    }

    pub fn label(&self, a: AtomId) -> &str {
        &self.atoms[a.index()].label
    }

    pub fn find(&self, label: &str) -> Option<AtomId> {
        self.by_label.get(label).copied()
    }

    /// Minimal open neighborhood `U_x`.
    pub fn min_open(&self, a: AtomId) -> &AtomSet {
        &self.min_open[a.index()]
    }

    /// Atoms having `a` in their minimal neighborhood (the faces of `a`, itself included).
    pub fn faces_of(&self, a: AtomId) -> &[AtomId] {
        &self.lower[a.index()]
    }

    pub fn tops(&self) -> &[AtomId] {
        &self.tops
    }

    pub fn num_tops(&self) -> usize {
        self.tops.len()
    }

    pub fn top_atom(&self, c: CellId) -> AtomId {
        self.tops[c.index()]
    }

    pub fn cell_of(&self, a: AtomId) -> Option<CellId> {
        self.cell_of[a.index()]
    }

    pub fn cell(&self, label: &str) -> Option<CellId> {
        self.find(label).and_then(|a| self.cell_of(a))
    }

    pub fn cell_label(&self, c: CellId) -> &str {
        self.label(self.top_atom(c))
    }

    pub fn all(&self) -> AtomSet {
        AtomSet::full(self.len())
    }

    pub fn none(&self) -> AtomSet {
        AtomSet::empty(self.len())
    }

    pub fn set_of<I: IntoIterator<Item = AtomId>>(&self, atoms: I) -> AtomSet {
        AtomSet::from_atoms(self.len(), atoms)
    }

    /// Set from labels; panics on an unknown label (fixture and test convenience).
    pub fn set_by_labels(&self, labels: &[&str]) -> AtomSet {
        self.set_of(labels.iter().map(|l| {
            self.find(l)
                .unwrap_or_else(|| panic!("unknown atom label `{l}`"))
        }))
    }

    pub fn cells_to_atoms<I: IntoIterator<Item = CellId>>(&self, cells: I) -> AtomSet {
        self.set_of(cells.into_iter().map(|c| self.top_atom(c)))
    }

    /// Top cells contained in `s`, in cell order.
    pub fn cells_in(&self, s: &AtomSet) -> Vec<CellId> {
        s.iter().filter_map(|a| self.cell_of(a)).collect()
    }

    pub fn labels_of(&self, s: &AtomSet) -> Vec<String> {
        s.iter().map(|a| self.label(a).to_owned()).collect()
    }

    pub fn hull(&self, s: &AtomSet, mode: HullMode) -> AtomSet {
        match mode {
            HullMode::Interior => self.interior(s),
            HullMode::Closure => self.closure(s),
            HullMode::OpenHull => self.open_hull(s),
        }
    }

    /// `{x | U_x ∩ S ≠ ∅}`.
    pub fn closure(&self, s: &AtomSet) -> AtomSet {
        let mut out = self.none();
        for y in s {
            for &x in &self.lower[y.index()] {
                out.insert(x);
            }
        }
        out
    }

    /// `{x ∈ S | U_x ⊆ S}`.
    pub fn interior(&self, s: &AtomSet) -> AtomSet {
        self.set_of(s.iter().filter(|&x| self.min_open[x.index()].is_subset(s)))
    }

    pub fn open_hull(&self, s: &AtomSet) -> AtomSet {
        self.interior(&self.closure(s))
    }

    /// Union of the minimal neighborhoods of `s`: the smallest open set containing it.
    pub fn star(&self, s: &AtomSet) -> AtomSet {
        let mut out = self.none();
        for x in s {
            out.union_with(&self.min_open[x.index()]);
        }
        out
    }

    pub fn is_open(&self, s: &AtomSet) -> bool {
        self.first_non_open(s).is_none()
    }

    /// An atom of `s` whose minimal neighborhood escapes `s`, if any.
    pub fn first_non_open(&self, s: &AtomSet) -> Option<AtomId> {
        s.iter().find(|&x| !self.min_open[x.index()].is_subset(s))
    }

    pub fn is_closed(&self, s: &AtomSet) -> bool {
        self.closure(s) == *s
    }

    /// Connected components of the subspace `s`.
    ///
    /// Two atoms are adjacent when comparable; in a finite space this
    /// connectivity coincides with path-connectivity.
    pub fn components(&self, s: &AtomSet) -> Partition {
        let n = self.len();
        let mut uf = UnionFind::new(n);
        for x in s {
            for y in &self.min_open[x.index()] {
                if s.contains(y) {
                    uf.union(x.index(), y.index());
                }
            }
        }
        let mut root_block: HashMap<usize, u32> = HashMap::new();
        let mut blocks: Vec<AtomSet> = Vec::new();
        let mut block_of = vec![None; n];
        for x in s {
            let root = uf.find(x.index());
            let b = *root_block.entry(root).or_insert_with(|| {
                blocks.push(AtomSet::empty(n));
                (blocks.len() - 1) as u32
            });
            blocks[b as usize].insert(x);
            block_of[x.index()] = Some(b);
        }
        Partition { blocks, block_of }
    }

    /// Union of the components of `e` meeting `s`.
    pub fn saturate(&self, s: &AtomSet, e: &AtomSet) -> Result<Saturation> {
        if let Some(a) = s.difference(e).first() {
            return Err(Error::NotASubset(a));
        }
        let parts = self.components(e);
        let mut saturation = self.none();
        let mut hit = vec![false; parts.len()];
        for x in s {
            let b = parts.block_of(x).expect("s ⊆ e");
            if !hit[b] {
                hit[b] = true;
                saturation.union_with(parts.block(b));
            }
        }
        Ok(Saturation {
            is_saturated: saturation == *s,
            saturation,
        })
    }

    /// Top cells sharing at least one face with `c` (excluding `c`).
    pub fn adjacent_cells(&self, c: CellId) -> Vec<CellId> {
        let t = self.top_atom(c);
        let mut out = Vec::new();
        let mut seen = self.none();
        seen.insert(t);
        for &f in &self.lower[t.index()] {
            for y in &self.min_open[f.index()] {
                if let Some(d) = self.cell_of(y) {
                    if seen.insert(y) {
                        out.push(d);
                    }
                }
            }
        }
        out.sort();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ray5() -> FiniteSpace {
        build_grid_space(&[5], &[0, 1, 2, 3, 4], Boundary::Open).unwrap()
    }

    #[test]
    fn ray5_hulls() {
        let x = ray5();
        assert_eq!(x.closure(&x.set_by_labels(&["c0"])), x.set_by_labels(&["c0", "f01"]));
        let s = x.set_by_labels(&["c0", "f01", "c1"]);
        assert_eq!(x.interior(&s), s);
        let t = x.set_by_labels(&["c0", "c2"]);
        assert_eq!(x.hull(&t, HullMode::OpenHull), t);
    }

    #[test]
    fn ray5_components() {
        let x = ray5();
        let tops = x.cells_to_atoms((0..5).map(CellId));
        assert_eq!(x.components(&x.open_hull(&tops)).len(), 1);
        let p = x.components(&x.set_by_labels(&["c0", "c2"]));
        assert_eq!(p.len(), 2);
        assert_eq!(x.label(p.label(0)), "c0");
        assert!(x.components(&x.none()).is_empty());
    }

    #[test]
    fn saturation_examples() {
        let x = ray5();
        let e = x.open_hull(&x.set_by_labels(&["c0", "c1"]));
        let sat = x.saturate(&x.set_by_labels(&["c0"]), &e).unwrap();
        assert!(!sat.is_saturated);
        assert_eq!(sat.saturation, e);
        assert!(x.saturate(&e, &e).unwrap().is_saturated);
        let empty = x.saturate(&x.none(), &x.none()).unwrap();
        assert!(empty.is_saturated && empty.saturation.is_empty());
        assert_eq!(
            x.saturate(&x.set_by_labels(&["c4"]), &e),
            Err(Error::NotASubset(x.find("c4").unwrap()))
        );
    }

    #[test]
    fn axioms_are_checked() {
        let atoms = vec![Atom::new("a", None), Atom::new("b", None)];
        let u = |xs: &[u32]| AtomSet::from_atoms(2, xs.iter().map(|&i| AtomId(i)));
        assert!(FiniteSpace::from_min_opens(atoms.clone(), vec![u(&[0, 1]), u(&[0, 1])]).is_err());
        assert!(FiniteSpace::from_min_opens(atoms.clone(), vec![u(&[1]), u(&[1])]).is_err());
        let ok = FiniteSpace::from_min_opens(atoms.clone(), vec![u(&[0, 1]), u(&[1])]).unwrap();
        assert_eq!(ok.tops(), &[AtomId(1)]);
        assert!(FiniteSpace::from_order(atoms, &[(AtomId(0), AtomId(1)), (AtomId(1), AtomId(0))]).is_err());
    }

    #[test]
    fn adjacency_of_cells() {
        let x = ray5();
        assert_eq!(x.adjacent_cells(CellId(2)), vec![CellId(1), CellId(3)]);
        assert_eq!(x.adjacent_cells(CellId(0)), vec![CellId(1)]);
    }
}
