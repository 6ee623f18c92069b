use std::collections::{BTreeSet, HashMap};

use super::{Atom, AtomId, AtomSet, FiniteSpace};
use crate::error::{Error, Result};

/// Whether faces on the outer boundary of the grid box are kept.
///
/// `Closed` keeps every face of every active top cell. `Open` drops faces
/// lying on the box boundary, modelling an open window such as a ray or the
/// domain of an ODE whose orbits may leave the box.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Boundary {
    #[default]
    Open,
    Closed,
}

/// Face poset of a cubical grid restricted to the faces of `active` cells.
///
/// Faces are addressed by doubled coordinates (odd = interval, even = vertex)
/// and ordered row-major on them, last axis fastest. Top cells are labelled
/// `c{linear index}`; in one dimension vertices are `f{left}{right}`.
pub fn build_grid_space(cell_counts: &[usize], active: &[usize], boundary: Boundary) -> Result<FiniteSpace> {
    if cell_counts.is_empty() {
        return Err(Error::DegenerateGrid("grid needs at least one axis".into()));
    }
    if let Some(axis) = cell_counts.iter().position(|&n| n == 0) {
        return Err(Error::DegenerateGrid(format!("axis {axis} has no cells")));
    }
    if active.is_empty() {
        return Err(Error::EmptySpace);
    }
    let total: usize = cell_counts.iter().product();
    let d = cell_counts.len();

    let mut faces: BTreeSet<Vec<usize>> = BTreeSet::new();
    for &lin in active {
        if lin >= total {
            return Err(Error::DegenerateGrid(format!("active cell {lin} outside grid of {total}")));
        }
        let multi = unravel(lin, cell_counts);
        // every face: per axis choose 2i, 2i+1 or 2i+2
        for code in 0..3usize.pow(d as u32) {
            let mut c = code;
            let mut face = Vec::with_capacity(d);
            for &i in &multi {
                face.push(2 * i + c % 3);
                c /= 3;
            }
            if boundary == Boundary::Open && on_box_boundary(&face, cell_counts) {
                continue;
            }
            faces.insert(face);
        }
    }

    let coords: Vec<Vec<usize>> = faces.into_iter().collect();
    let index: HashMap<&[usize], u32> = coords.iter().enumerate().map(|(i, f)| (f.as_slice(), i as u32)).collect();
    let n = coords.len();

    let atoms: Vec<Atom> = coords
        .iter()
        .map(|f| {
            let dim = f.iter().filter(|&&x| x % 2 == 1).count() as u8;
            Atom::new(face_label(f, cell_counts), Some(dim))
        })
        .collect();

    let mut min_open = Vec::with_capacity(n);
    let mut probe = Vec::with_capacity(d);
    for f in &coords {
        let even: Vec<usize> = (0..d).filter(|&a| f[a] % 2 == 0).collect();
        let mut u = AtomSet::empty(n);
        for code in 0..3usize.pow(even.len() as u32) {
            probe.clear();
            probe.extend_from_slice(f);
            let mut c = code;
            let mut valid = true;
            for &a in &even {
                match c % 3 {
                    0 => {}
                    1 => probe[a] += 1,
                    _ => {
                        if probe[a] == 0 {
                            valid = false;
                        } else {
                            probe[a] -= 1;
                        }
                    }
                }
                c /= 3;
            }
            if valid {
                if let Some(&j) = index.get(probe.as_slice()) {
                    u.insert(AtomId(j));
                }
            }
        }
        min_open.push(u);
    }
    FiniteSpace::from_min_opens(atoms, min_open)
}

/// Row-major (last axis fastest) multi-index of a linear cell index.
pub(crate) fn unravel(mut lin: usize, counts: &[usize]) -> Vec<usize> {
    let mut out = vec![0; counts.len()];
    for a in (0..counts.len()).rev() {
        out[a] = lin % counts[a];
        lin /= counts[a];
    }
    out
}

fn on_box_boundary(face: &[usize], counts: &[usize]) -> bool {
    face.iter().zip(counts).any(|(&x, &n)| x == 0 || x == 2 * n)
}

fn face_label(face: &[usize], counts: &[usize]) -> String {
    if face.iter().all(|x| x % 2 == 1) {
        let mut lin = 0;
        for (&x, &n) in face.iter().zip(counts) {
            lin = lin * n + x / 2;
        }
        return format!("c{lin}");
    }
    if face.len() == 1 {
        let v = face[0] / 2;
        return match (v, v == counts[0]) {
            (0, _) => "f_0".to_string(),
            (_, true) => format!("f{}_", v - 1),
            _ if v < 10 => format!("f{}{}", v - 1, v),
            _ => format!("f{}_{}", v - 1, v),
        };
    }
    let parts: Vec<String> = face.iter().map(|x| x.to_string()).collect();
    format!("f[{}]", parts.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Counts doubled-coordinate tuples that are faces of some active cell by
    /// scanning the whole doubled lattice.
    fn face_count_oracle(counts: &[usize], active: &[usize], boundary: Boundary) -> usize {
        let dims: Vec<usize> = counts.iter().map(|n| 2 * n + 1).collect();
        let total: usize = dims.iter().product();
        let cells: Vec<Vec<usize>> = active.iter().map(|&a| unravel(a, counts)).collect();
        (0..total)
            .filter(|&lin| {
                let f = unravel(lin, &dims);
                if boundary == Boundary::Open && on_box_boundary(&f, counts) {
                    return false;
                }
                cells
                    .iter()
                    .any(|c| f.iter().zip(c).all(|(&x, &i)| x >= 2 * i && x <= 2 * i + 2))
            })
            .count()
    }

    #[test]
    fn two_cells_in_a_row() {
        let x = build_grid_space(&[2], &[0, 1], Boundary::Open).unwrap();
        assert_eq!(x.len(), 3);
        let labels: Vec<_> = x.atoms().map(|a| x.label(a).to_string()).collect();
        assert_eq!(labels, ["c0", "f01", "c1"]);
        assert_eq!(*x.min_open(x.find("f01").unwrap()), x.set_by_labels(&["f01", "c0", "c1"]));
    }

    #[test]
    fn ray_of_five() {
        let x = build_grid_space(&[5], &[0, 1, 2, 3, 4], Boundary::Open).unwrap();
        assert_eq!(x.len(), face_count_oracle(&[5], &[0, 1, 2, 3, 4], Boundary::Open));
        assert_eq!(x.len(), 9);
        assert_eq!(x.num_tops(), 5);
    }

    #[test]
    fn two_squares() {
        let x = build_grid_space(&[2, 1], &[0, 1], Boundary::Closed).unwrap();
        assert_eq!(x.len(), face_count_oracle(&[2, 1], &[0, 1], Boundary::Closed));
        assert_eq!(x.len(), 15);
        let by_dim = |d| x.atoms().filter(|&a| x.atom(a).dim == Some(d)).count();
        assert_eq!((by_dim(2), by_dim(1), by_dim(0)), (2, 7, 6));
    }

    #[test]
    fn sparse_active_sets_match_oracle() {
        let counts = [4, 3];
        let active = [0, 2, 5, 11];
        for b in [Boundary::Open, Boundary::Closed] {
            let x = build_grid_space(&counts, &active, b).unwrap();
            assert_eq!(x.len(), face_count_oracle(&counts, &active, b));
            assert_eq!(x.num_tops(), active.len());
        }
    }

    #[test]
    fn errors() {
        assert_eq!(build_grid_space(&[3], &[], Boundary::Open).unwrap_err(), Error::EmptySpace);
        assert!(matches!(build_grid_space(&[], &[0], Boundary::Open), Err(Error::DegenerateGrid(_))));
        assert!(matches!(build_grid_space(&[2], &[5], Boundary::Open), Err(Error::DegenerateGrid(_))));
    }
}
