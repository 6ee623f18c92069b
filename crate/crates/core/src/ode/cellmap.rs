use rayon::prelude::*;

use super::field::{time_tau_map, ApproxParams, VectorField};
use crate::dynamics::CellMap;
use crate::error::{Error, Result};
use crate::space::grid::unravel;
use crate::space::{build_grid_space, Boundary, CellId, FiniteSpace};

/// Axis-aligned box split into a regular grid of cells.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub resolution: Vec<usize>,
}

impl GridSpec {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, resolution: Vec<usize>) -> Self {
        GridSpec { lower, upper, resolution }
    }

    pub fn square(lo: f64, hi: f64, res: usize) -> Self {
        GridSpec::new(vec![lo, lo], vec![hi, hi], vec![res, res])
    }

    pub fn dim(&self) -> usize {
        self.resolution.len()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        if d == 0 || d > 3 {
            return Err(Error::DegenerateGrid(format!("{d} axes; supported are 1 to 3")));
        }
        if self.lower.len() != d || self.upper.len() != d {
            return Err(Error::DegenerateGrid("bounds and resolution differ in length".into()));
        }
        for a in 0..d {
            if self.resolution[a] < 2 {
                return Err(Error::DegenerateGrid(format!("axis {a} needs at least 2 cells")));
            }
            if !(self.lower[a].is_finite() && self.upper[a].is_finite() && self.lower[a] < self.upper[a]) {
                return Err(Error::DegenerateGrid(format!("axis {a} has an empty or non-finite range")));
            }
        }
        Ok(())
    }

    pub fn cell_width(&self, axis: usize) -> f64 {
        (self.upper[axis] - self.lower[axis]) / self.resolution[axis] as f64
    }

    pub fn diagonal(&self) -> f64 {
        (0..self.dim()).map(|a| self.cell_width(a).powi(2)).sum::<f64>().sqrt()
    }

    pub fn num_cells(&self) -> usize {
        self.resolution.iter().product()
    }

    /// Grid line `i` on `axis`; shared by both cells meeting there.
    fn coord(&self, axis: usize, i: usize) -> f64 {
        if i == self.resolution[axis] {
            self.upper[axis]
        } else {
            self.lower[axis] + i as f64 * self.cell_width(axis)
        }
    }

    /// Lower corner of the cell with multi-index `idx`.
    fn corner(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter().enumerate().map(|(a, &i)| self.coord(a, i)).collect()
    }

    fn upper_corner(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter().enumerate().map(|(a, &i)| self.coord(a, i + 1)).collect()
    }

    pub fn center(&self, idx: &[usize]) -> Vec<f64> {
        self.corner(idx)
            .iter()
            .enumerate()
            .map(|(a, x)| x + 0.5 * self.cell_width(a))
            .collect()
    }

    fn linear(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.resolution).fold(0, |acc, (&i, &n)| acc * n + i)
    }

    fn inside(&self, p: &[f64]) -> bool {
        p.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(x, (lo, hi))| lo <= x && x <= hi)
    }

    /// Corners and center of a cell.
    pub fn samples(&self, idx: &[usize]) -> Vec<Vec<f64>> {
        let d = self.dim();
        let mut out = Vec::with_capacity((1 << d) + 1);
        for mask in 0..(1usize << d) {
            out.push((0..d).map(|a| self.coord(a, idx[a] + (mask >> a & 1))).collect());
        }
        out.push(self.center(idx));
        out
    }
}

/// Outer approximation of the time-τ map on the grid's cells.
///
/// Each cell is sampled at its corners and center and the samples are
/// integrated. A cell `j` is an image of `c` when the convex hull of the
/// integrated samples meets the interior of `j`, or when `j`'s center lies
/// within `bloat` of that hull. A sample leaving the box marks Exit.
pub fn build_cell_map(field: &VectorField, grid: &GridSpec, params: &ApproxParams) -> Result<(FiniteSpace, CellMap)> {
    grid.validate()?;
    params.validate()?;
    if field.dim() != grid.dim() {
        return Err(Error::DegenerateGrid(format!(
            "field has dimension {} but grid has {} axes",
            field.dim(),
            grid.dim()
        )));
    }
    let bloat = params.bloat.unwrap_or(0.1 * grid.diagonal());
    let n = grid.num_cells();
    let rows: Vec<(Vec<CellId>, bool)> = (0..n)
        .into_par_iter()
        .map(|lin| cell_images(field, grid, params, bloat, lin))
        .collect::<Result<_>>()?;
    let (images, exits) = rows.into_iter().unzip();

    let active: Vec<usize> = (0..n).collect();
    let space = build_grid_space(&grid.resolution, &active, Boundary::Open)?;
    let map = CellMap::for_space(&space, images, exits)?;
    Ok((space, map))
}

fn cell_images(
    field: &VectorField,
    grid: &GridSpec,
    params: &ApproxParams,
    bloat: f64,
    lin: usize,
) -> Result<(Vec<CellId>, bool)> {
    let idx = unravel(lin, &grid.resolution);
    let mut pts = Vec::new();
    let mut exit = false;
    for s in grid.samples(&idx) {
        let p = time_tau_map(field, params, &s)?;
        if grid.inside(&p) {
            pts.push(p);
        } else {
            exit = true;
        }
    }
    if pts.is_empty() {
        return Ok((Vec::new(), true));
    }
    let hull = Hull::new(&pts);
    let d = grid.dim();

    // candidate cells: bounding box of the hull grown by the bloat
    let mut ranges = Vec::with_capacity(d);
    for a in 0..d {
        let lo = pts.iter().map(|p| p[a]).fold(f64::INFINITY, f64::min) - bloat;
        let hi = pts.iter().map(|p| p[a]).fold(f64::NEG_INFINITY, f64::max) + bloat;
        let w = grid.cell_width(a);
        let to_idx = |x: f64| ((x - grid.lower[a]) / w).floor().clamp(0.0, (grid.resolution[a] - 1) as f64) as usize;
        ranges.push((to_idx(lo), to_idx(hi)));
    }
    let mut out = Vec::new();
    let mut cur: Vec<usize> = ranges.iter().map(|r| r.0).collect();
    loop {
        let lo = grid.corner(&cur);
        let hi = grid.upper_corner(&cur);
        let center = grid.center(&cur);
        if hull.meets_open_box(&lo, &hi) || hull.distance(&center) <= bloat {
            out.push(CellId(grid.linear(&cur) as u32));
        }
        // odometer over the candidate ranges, last axis fastest
        let mut a = d;
        loop {
            if a == 0 {
                out.sort_unstable();
                return Ok((out, exit));
            }
            a -= 1;
            if cur[a] < ranges[a].1 {
                cur[a] += 1;
                break;
            }
            cur[a] = ranges[a].0;
        }
    }
}

/// Convex hull of integrated samples: an interval, a polygon, or (in three
/// dimensions) a bounding box.
#[derive(Clone, Debug)]
enum Hull {
    Interval(f64, f64),
    Polygon(Vec<[f64; 2]>),
    Box(Vec<f64>, Vec<f64>),
}

impl Hull {
    fn new(pts: &[Vec<f64>]) -> Self {
        match pts[0].len() {
            1 => {
                let lo = pts.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
                let hi = pts.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
                Hull::Interval(lo, hi)
            }
            2 => Hull::Polygon(convex_hull(pts.iter().map(|p| [p[0], p[1]]).collect())),
            d => {
                let lo = (0..d).map(|a| pts.iter().map(|p| p[a]).fold(f64::INFINITY, f64::min)).collect();
                let hi = (0..d).map(|a| pts.iter().map(|p| p[a]).fold(f64::NEG_INFINITY, f64::max)).collect();
                Hull::Box(lo, hi)
            }
        }
    }

    /// Whether the hull meets the open box `(lo, hi)`.
    fn meets_open_box(&self, lo: &[f64], hi: &[f64]) -> bool {
        match self {
            Hull::Interval(a, b) => *a < hi[0] && *b > lo[0],
            Hull::Box(a, b) => (0..a.len()).all(|i| a[i] < hi[i] && b[i] > lo[i]),
            Hull::Polygon(poly) => {
                // separating axis test; touching counts as separated since the box is open
                let xs = (poly.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min), poly.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max));
                let ys = (poly.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min), poly.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max));
                if xs.1 <= lo[0] || xs.0 >= hi[0] || ys.1 <= lo[1] || ys.0 >= hi[1] {
                    return false;
                }
                let corners = [[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]];
                let m = poly.len();
                for i in 0..m {
                    let p = poly[i];
                    let q = poly[(i + 1) % m];
                    let normal = [q[1] - p[1], p[0] - q[0]];
                    if normal == [0.0, 0.0] {
                        continue;
                    }
                    let proj = |v: &[f64; 2]| v[0] * normal[0] + v[1] * normal[1];
                    let (pmin, pmax) = poly.iter().map(proj).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
                    let (bmin, bmax) = corners.iter().map(proj).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
                    if pmax <= bmin || bmax <= pmin {
                        return false;
                    }
                }
                true
            }
        }
    }

    fn distance(&self, x: &[f64]) -> f64 {
        match self {
            Hull::Interval(a, b) => (a - x[0]).max(x[0] - b).max(0.0),
            Hull::Box(a, b) => (0..a.len())
                .map(|i| (a[i] - x[i]).max(x[i] - b[i]).max(0.0).powi(2))
                .sum::<f64>()
                .sqrt(),
            Hull::Polygon(poly) => {
                let p = [x[0], x[1]];
                if poly.len() >= 3 && contains(poly, p) {
                    return 0.0;
                }
                let m = poly.len();
                (0..m)
                    .map(|i| segment_distance(p, poly[i], poly[(i + 1) % m]))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Andrew's monotone chain, counter-clockwise, collinear points dropped.
fn convex_hull(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn contains(poly: &[[f64; 2]], p: [f64; 2]) -> bool {
    let m = poly.len();
    (0..m).all(|i| cross(poly[i], poly[(i + 1) % m], p) >= 0.0)
}

fn segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p[0] - a[0]) * ab[0] + (p[1] - a[1]) * ab[1]) / len2).clamp(0.0, 1.0)
    };
    ((p[0] - a[0] - t * ab[0]).powi(2) + (p[1] - a[1] - t * ab[1]).powi(2)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::classify_cells;

    #[test]
    fn decay_on_four_cells() {
        // cells [-1,-.5], [-.5,0], [0,.5], [.5,1]; e^{-1} ≈ 0.368
        let f = VectorField::linear(vec![vec![-1.0]]).unwrap();
        let g = GridSpec::new(vec![-1.0], vec![1.0], vec![4]);
        let (_, map) = build_cell_map(&f, &g, &ApproxParams::new(1.0, 50).with_bloat(0.0)).unwrap();
        // corners ±1 → ±0.368, ±0.5 → ±0.184: images stay in the inner cells
        assert_eq!(map.successors(CellId(0)), &[CellId(1)]);
        assert_eq!(map.successors(CellId(3)), &[CellId(2)]);
        assert_eq!(map.successors(CellId(1)), &[CellId(1)]);
        assert_eq!(map.successors(CellId(2)), &[CellId(2)]);
        assert!(map.cells().all(|c| !map.exits(c)));
    }

    #[test]
    fn zero_field_gives_identity() {
        for d in 1..=3 {
            let f = VectorField::linear(vec![vec![0.0; d]; d]).unwrap();
            let g = GridSpec::new(vec![0.0; d], vec![1.0; d], vec![4; d]);
            for bloat in [0.0, 0.05, 0.124] {
                let (_, map) = build_cell_map(&f, &g, &ApproxParams::new(1.0, 4).with_bloat(bloat)).unwrap();
                assert_eq!(map, CellMap::identity(g.num_cells()), "d={d} bloat={bloat}");
            }
        }
    }

    #[test]
    fn larger_bloat_gives_superset() {
        let f = VectorField::RadialCycle;
        let g = GridSpec::square(-2.0, 2.0, 12);
        let mut prev: Option<CellMap> = None;
        for bloat in [0.0, 0.05, 0.2, 0.6] {
            let (_, map) = build_cell_map(&f, &g, &ApproxParams::new(0.5, 10).with_bloat(bloat)).unwrap();
            if let Some(p) = &prev {
                for c in map.cells() {
                    assert!(p.successors(c).iter().all(|d| map.successors(c).contains(d)));
                }
            }
            prev = Some(map);
        }
    }

    #[test]
    fn radial_cycle_has_critical_origin() {
        let g = GridSpec::square(-2.0, 2.0, 32);
        let (space, map) = build_cell_map(&VectorField::RadialCycle, &g, &ApproxParams::new(0.5, 20)).unwrap();
        let cl = classify_cells(&map);
        // the four cells around the origin
        let origin: Vec<CellId> = [(15, 15), (15, 16), (16, 15), (16, 16)]
            .iter()
            .map(|&(i, j)| CellId((i * 32 + j) as u32))
            .collect();
        assert!(origin.iter().any(|c| cl.critical.contains(c)), "{:?}", cl.critical);
        // cycles run around the unit circle
        let near_circle = cl
            .periodic
            .iter()
            .filter(|c| {
                let p = g.center(&unravel(c.index(), &g.resolution));
                (p[0].hypot(p[1]) - 1.0).abs() < 0.2
            })
            .count();
        assert!(near_circle >= 16, "{near_circle}");
        assert_eq!(space.num_tops(), 1024);
    }

    #[test]
    fn hull_geometry() {
        let h = convex_hull(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5]]);
        assert_eq!(h.len(), 4);
        let hull = Hull::Polygon(h);
        assert!(hull.meets_open_box(&[0.5, 0.5], &[2.0, 2.0]));
        assert!(!hull.meets_open_box(&[1.0, 0.0], &[2.0, 1.0]));
        assert_eq!(hull.distance(&[0.5, 0.5]), 0.0);
        assert!((hull.distance(&[2.0, 0.5]) - 1.0).abs() < 1e-12);
        let seg = Hull::Polygon(convex_hull(vec![[0.0, 0.0], [1.0, 1.0]]));
        assert!(seg.meets_open_box(&[0.0, 0.0], &[1.0, 1.0]));
        assert!(!seg.meets_open_box(&[0.5, 0.0], &[1.0, 0.4]));
    }
}
