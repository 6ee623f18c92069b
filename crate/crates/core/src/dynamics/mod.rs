//! Discrete-time dynamics on top cells.
//!
//! A [`CellMap`] assigns to each top cell a set of image cells and, possibly,
//! the `Exit` marker meaning "some orbit leaves the modelled window". It is
//! the time-discretized stand-in for a flow.

mod exterior;
mod graph;
mod limits;
mod trajectory;

use std::fmt;

use crate::error::{Error, Result};
use crate::space::{CellId, FiniteSpace};

pub use exterior::{default_depth, is_r_exterior, r_exterior_tower, reverse, AbsorbingCertificate, RExteriorCheck};
pub(crate) use trajectory::omega0_with;
pub use graph::Condensation;
pub use limits::{
    attraction_analysis, classify_cells, invariant_hull, omega_global, omega_limit, AttractionReport,
    CellClasses, Recurrence,
};
pub use trajectory::{basin_decomposition, omega0_end, sample_walk, Basins, OrbitSample};

#[derive(Clone, PartialEq, Eq)]
pub struct CellMap {
    images: Vec<Vec<CellId>>,
    exits: Vec<bool>,
}

impl CellMap {
    /// Builds a map from per-cell images and exit flags.
    ///
    /// Images are sorted and deduplicated; a cell without images is given
    /// the exit marker, so every cell has at least one way to continue.
    pub fn new(mut images: Vec<Vec<CellId>>, mut exits: Vec<bool>) -> Result<Self> {
        let n = images.len();
        if exits.len() != n {
            return Err(Error::InvalidMap(format!("{} image lists but {} exit flags", n, exits.len())));
        }
        for (c, imgs) in images.iter_mut().enumerate() {
            imgs.sort_unstable();
            imgs.dedup();
            if let Some(bad) = imgs.iter().find(|d| d.index() >= n) {
                return Err(Error::InvalidMap(format!("cell {c} maps to {bad}, outside {n} cells")));
            }
            if imgs.is_empty() {
                exits[c] = true;
            }
        }
        Ok(CellMap { images, exits })
    }

    /// Checks that the map is defined on exactly the top cells of `space`.
    pub fn for_space(space: &FiniteSpace, images: Vec<Vec<CellId>>, exits: Vec<bool>) -> Result<Self> {
        if images.len() != space.num_tops() {
            return Err(Error::InvalidMap(format!(
                "map has {} cells but the space has {} top cells",
                images.len(),
                space.num_tops()
            )));
        }
        Self::new(images, exits)
    }

    /// Single-valued map; `None` means Exit.
    pub fn from_fn(n: usize, f: impl Fn(CellId) -> Option<CellId>) -> Self {
        let mut images = Vec::with_capacity(n);
        let mut exits = Vec::with_capacity(n);
        for c in 0..n {
            match f(CellId(c as u32)) {
                Some(d) => {
                    images.push(vec![d]);
                    exits.push(false);
                }
                None => {
                    images.push(Vec::new());
                    exits.push(true);
                }
            }
        }
        CellMap::new(images, exits).expect("from_fn images are in range")
    }

    /// Map given by cell labels; `"exit"` in an image list marks Exit.
    pub fn from_labels(space: &FiniteSpace, table: &[(&str, &[&str])]) -> Result<Self> {
        let n = space.num_tops();
        let mut images = vec![Vec::new(); n];
        let mut exits = vec![false; n];
        let cell = |l: &str| {
            space
                .cell(l)
                .ok_or_else(|| Error::InvalidMap(format!("`{l}` is not a top cell")))
        };
        for (src, dsts) in table {
            let c = cell(src)?;
            for d in *dsts {
                if *d == "exit" {
                    exits[c.index()] = true;
                } else {
                    images[c.index()].push(cell(d)?);
                }
            }
        }
        Self::new(images, exits)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, Some)
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn cells(&self) -> impl ExactSizeIterator<Item = CellId> {
        (0..self.images.len() as u32).map(CellId)
    }

    pub fn successors(&self, c: CellId) -> &[CellId] {
        &self.images[c.index()]
    }

    pub fn exits(&self, c: CellId) -> bool {
        self.exits[c.index()]
    }

    pub fn is_single_valued(&self) -> bool {
        self.images
            .iter()
            .zip(&self.exits)
            .all(|(imgs, &exit)| imgs.len() + usize::from(exit) == 1)
    }

    /// Every non-Exit edge `(c, d)` in order.
    pub fn edges(&self) -> impl Iterator<Item = (CellId, CellId)> + '_ {
        self.images
            .iter()
            .enumerate()
            .flat_map(|(c, imgs)| imgs.iter().map(move |&d| (CellId(c as u32), d)))
    }

    pub fn predecessors(&self) -> Vec<Vec<CellId>> {
        let mut pred = vec![Vec::new(); self.len()];
        for (c, d) in self.edges() {
            pred[d.index()].push(c);
        }
        pred
    }

    /// Image of a cell mask (Exit contributes nothing).
    pub fn image(&self, cells: &[bool]) -> Vec<bool> {
        let mut out = vec![false; self.len()];
        for (c, &inside) in cells.iter().enumerate() {
            if inside {
                for d in &self.images[c] {
                    out[d.index()] = true;
                }
            }
        }
        out
    }

    /// Cells reachable from `start` in zero or more steps.
    pub fn forward_closure(&self, start: &[bool]) -> Vec<bool> {
        let mut seen = start.to_vec();
        let mut stack: Vec<usize> = (0..self.len()).filter(|&c| seen[c]).collect();
        while let Some(c) = stack.pop() {
            for d in &self.images[c] {
                if !seen[d.index()] {
                    seen[d.index()] = true;
                    stack.push(d.index());
                }
            }
        }
        seen
    }
}

impl fmt::Debug for CellMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for c in 0..self.len() {
            let mut imgs: Vec<String> = self.images[c].iter().map(|d| d.0.to_string()).collect();
            if self.exits[c] {
                imgs.push("exit".into());
            }
            m.entry(&c, &imgs.join(","));
        }
        m.finish()
    }
}

pub(crate) fn mask_to_cells(mask: &[bool]) -> Vec<CellId> {
    mask.iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(c, _)| CellId(c as u32))
        .collect()
}

pub(crate) fn cells_to_mask(n: usize, cells: &[CellId]) -> Vec<bool> {
    let mut mask = vec![false; n];
    for c in cells {
        mask[c.index()] = true;
    }
    mask
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_images_become_exit() {
        let m = CellMap::new(vec![vec![CellId(1)], vec![]], vec![false, false]).unwrap();
        assert!(m.exits(CellId(1)));
        assert!(m.is_single_valued());
        assert!(CellMap::new(vec![vec![CellId(3)]], vec![false]).is_err());
    }

    #[test]
    fn closure_and_image() {
        let m = CellMap::from_fn(4, |c| (c.0 < 3).then(|| CellId(c.0 + 1)));
        assert_eq!(m.image(&[true, false, false, false]), vec![false, true, false, false]);
        assert_eq!(m.forward_closure(&[false, true, false, false]), vec![false, true, true, true]);
        assert_eq!(m.predecessors()[2], vec![CellId(1)]);
    }
}
