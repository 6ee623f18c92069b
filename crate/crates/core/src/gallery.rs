//! Named fixtures: small spaces with maps and/or towers.

use crate::dynamics::CellMap;
use crate::error::{Error, Result};
use crate::externology::{Tail, Tower};
use crate::ode::{build_cell_map, ApproxParams, GridSpec, Polynomial, VectorField};
use crate::space::{build_grid_space, Atom, AtomId, Boundary, CellId, FiniteSpace};

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: String,
    pub space: FiniteSpace,
    pub map: Option<CellMap>,
    /// Explicit tower; fixtures with a map otherwise use the map's absorbing tower.
    pub tower: Option<Tower>,
}

/// Fixture names with their parameter, if any, and its default.
pub const NAMES: [(&str, Option<(&str, usize)>); 9] = [
    ("ray5", None),
    ("ray5shift", None),
    ("line5shift", None),
    ("twosinks", None),
    ("cycle3", None),
    ("bintree", Some(("depth", 2))),
    ("morse-circle", Some(("cells", 8))),
    ("limit-cycle-grid", Some(("resolution", 32))),
    ("double-well", Some(("resolution", 24))),
];

pub fn names() -> Vec<&'static str> {
    NAMES.iter().map(|(n, _)| *n).collect()
}

/// Looks up a fixture; `param` overrides the default parameter.
pub fn gallery(name: &str, param: Option<usize>) -> Result<Fixture> {
    let (_, p) = NAMES
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::UnknownFixture(name.to_string()))?;
    let value = match (p, param) {
        (Some(_), Some(v)) => v,
        (Some((_, d)), None) => *d,
        (None, Some(_)) => {
            return Err(Error::UnknownFixture(format!("{name} takes no parameter")));
        }
        (None, None) => 0,
    };
    match name {
        "ray5" => Ok(ray5()),
        "ray5shift" => Ok(ray5shift()),
        "line5shift" => Ok(line5shift()),
        "twosinks" => Ok(twosinks()),
        "cycle3" => Ok(cycle3()),
        "bintree" => bintree(value),
        "morse-circle" => morse_circle(value),
        "limit-cycle-grid" => limit_cycle_grid(value),
        "double-well" => double_well(value),
        _ => unreachable!("names are checked above"),
    }
}

/// Every fixture at its default parameter plus a few variants.
pub fn all_fixtures() -> Vec<Fixture> {
    let mut out: Vec<Fixture> = names()
        .into_iter()
        .map(|n| gallery(n, None).expect("default fixtures build"))
        .collect();
    out.push(morse_circle(16).expect("valid"));
    out.push(bintree(3).expect("valid"));
    out
}

fn row(n: usize) -> FiniteSpace {
    let active: Vec<usize> = (0..n).collect();
    build_grid_space(&[n], &active, Boundary::Open).expect("nonempty row")
}

fn fixture(name: &str, space: FiniteSpace, map: Option<CellMap>, tower: Option<Tower>) -> Fixture {
    Fixture {
        name: name.to_string(),
        space,
        map,
        tower,
    }
}

/// Open row of five cells with the tower `open_hull({c_k..c4})`, shrinking to empty.
pub fn ray5() -> Fixture {
    let space = row(5);
    let levels = (0..4)
        .map(|k| {
            let tops = space.cells_to_atoms((k..5).map(CellId));
            space.open_hull(&tops)
        })
        .collect();
    let tower = Tower::new(levels, Tail::ShrinksToEmpty);
    fixture("ray5", space, None, Some(tower))
}

/// Shift to the right, leaving the window from the last cell.
pub fn ray5shift() -> Fixture {
    let map = CellMap::from_fn(5, |c| (c.0 < 4).then(|| CellId(c.0 + 1)));
    fixture("ray5shift", row(5), Some(map), None)
}

/// Shift to the right, fixing the last cell.
pub fn line5shift() -> Fixture {
    let map = CellMap::from_fn(5, |c| Some(CellId((c.0 + 1).min(4))));
    fixture("line5shift", row(5), Some(map), None)
}

/// Two sinks at the ends, the middle cell splitting both ways.
pub fn twosinks() -> Fixture {
    let space = row(5);
    let map = CellMap::from_labels(
        &space,
        &[
            ("c0", &["c0"]),
            ("c1", &["c0"]),
            ("c2", &["c1", "c3"]),
            ("c3", &["c4"]),
            ("c4", &["c4"]),
        ],
    )
    .expect("valid labels");
    fixture("twosinks", space, Some(map), None)
}

/// Circle subdivided into `n` arcs `c_i` and `n` vertices `v_i`, where `v_i`
/// joins `c_i` and `c_{i+1}`. Atoms alternate `c0, v0, c1, v1, …`.
pub fn circle(n: usize, cell_label: impl Fn(usize) -> String) -> Result<FiniteSpace> {
    if n < 2 {
        return Err(Error::InvalidSpace("a circle needs at least 2 arcs".into()));
    }
    let mut atoms = Vec::with_capacity(2 * n);
    for i in 0..n {
        atoms.push(Atom::new(cell_label(i), Some(1)));
        atoms.push(Atom::new(format!("v{i}"), Some(0)));
    }
    let cell = |i: usize| AtomId((2 * (i % n)) as u32);
    let mut rel = Vec::with_capacity(2 * n);
    for i in 0..n {
        let v = AtomId((2 * i + 1) as u32);
        rel.push((v, cell(i)));
        rel.push((v, cell(i + 1)));
    }
    FiniteSpace::from_order(atoms, &rel)
}

/// Rotation of a three-arc circle.
pub fn cycle3() -> Fixture {
    let space = circle(3, |i| format!("c{i}")).expect("valid circle");
    let map = CellMap::from_fn(3, |c| Some(CellId((c.0 + 1) % 3)));
    fixture("cycle3", space, Some(map), None)
}

/// Binary tree of depth `d + 1` hanging from a stem edge `e0`, edges being
/// the top cells, with the tower of open hulls of the edges at depth ≥ k
/// (shrinking to empty): `2^d` ends.
pub fn bintree(d: usize) -> Result<Fixture> {
    if !(1..=12).contains(&d) {
        return Err(Error::InvalidSpace(format!("bintree depth {d} outside 1..=12")));
    }
    // heap numbering: vertex 0 is the root, children of i are 2i+1, 2i+2;
    // edge e_i joins vertex i to its parent (e0 is the stem above the root)
    let nv = (1usize << (d + 2)) - 1;
    let edge = |i: usize| AtomId((2 * i) as u32);
    let vertex = |i: usize| AtomId((2 * i + 1) as u32);
    let mut atoms = Vec::with_capacity(2 * nv);
    for i in 0..nv {
        atoms.push(Atom::new(format!("e{i}"), Some(1)));
        atoms.push(Atom::new(format!("v{i}"), Some(0)));
    }
    let mut rel = vec![(vertex(0), edge(0))];
    for i in 1..nv {
        rel.push((vertex(i), edge(i)));
        rel.push((vertex((i - 1) / 2), edge(i)));
    }
    let space = FiniteSpace::from_order(atoms, &rel)?;
    let depth = |mut i: usize| {
        let mut k = 0;
        while i > 0 {
            i = (i - 1) / 2;
            k += 1;
        }
        k
    };
    let mut levels = vec![space.all()];
    for k in 1..=d {
        let edges = space.set_of((0..nv).filter(|&i| depth(i) >= k).map(edge));
        levels.push(space.open_hull(&edges));
    }
    let tower = Tower::new(levels, Tail::ShrinksToEmpty);
    Ok(fixture(&format!("bintree-{d}"), space, None, Some(tower)))
}

/// Gradient-like flow on a circle of `n` arcs: everything runs from the
/// maximum arc `M` (= arc 0) to the minimum arc `m` (= arc n/2).
pub fn morse_circle(n: usize) -> Result<Fixture> {
    if n < 4 || n % 2 == 1 {
        return Err(Error::InvalidSpace(format!("morse-circle needs an even n ≥ 4, got {n}")));
    }
    let half = n / 2;
    let space = circle(n, |i| match i {
        0 => "M".to_string(),
        i if i == half => "m".to_string(),
        i => format!("c{i}"),
    })?;
    let map = CellMap::from_fn(n, |c| {
        let i = c.index();
        Some(CellId(match i {
            0 => 0,
            i if i < half => i + 1,
            i if i == half => half,
            i => i - 1,
        } as u32))
    });
    Ok(fixture(&format!("morse-circle-{n}"), space, Some(map), None))
}

/// Radial field with a repelling origin and an attracting unit circle on
/// `[−2, 2]²`, time step 0.5.
pub fn limit_cycle_grid(res: usize) -> Result<Fixture> {
    let grid = GridSpec::square(-2.0, 2.0, res);
    let (space, map) = build_cell_map(&VectorField::RadialCycle, &grid, &ApproxParams::new(0.5, 20))?;
    Ok(fixture(&format!("limit-cycle-grid-{res}"), space, Some(map), None))
}

/// Gradient descent of `(x² − 1)² + y²` on `[−2, 2]²`, time step 0.25.
pub fn double_well(res: usize) -> Result<Fixture> {
    let grid = GridSpec::square(-2.0, 2.0, res);
    let height = Polynomial::parse("(x^2 - 1)^2 + y^2").expect("valid polynomial");
    let field = VectorField::gradient_descent(height, 2)?;
    let (space, map) = build_cell_map(&field, &grid, &ApproxParams::new(0.25, 20))?;
    Ok(fixture(&format!("double-well-{res}"), space, Some(map), None))
}
