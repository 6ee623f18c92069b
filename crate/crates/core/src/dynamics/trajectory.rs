use rand::Rng;

use super::graph::Condensation;
use super::CellMap;
use crate::error::{Error, Result};
use crate::externology::{default_min_tail, end_space, EndPoint, EndSpace, Tower};
use crate::space::{AtomId, CellId, FiniteSpace};

/// A finite walk along map edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitSample {
    pub start: CellId,
    /// Visited cells, starting with `start`.
    pub walk: Vec<CellId>,
    /// The walk stopped because it took an Exit option.
    pub exited: bool,
}

impl OrbitSample {
    /// Checks that consecutive cells are joined by map edges.
    pub fn new(map: &CellMap, walk: Vec<CellId>, exited: bool) -> Result<Self> {
        let Some(&start) = walk.first() else {
            return Err(Error::InvalidMap("empty walk".into()));
        };
        if let Some(w) = walk.windows(2).find(|w| !map.successors(w[0]).contains(&w[1])) {
            return Err(Error::InvalidMap(format!("no edge {} -> {}", w[0], w[1])));
        }
        if exited && !map.exits(*walk.last().expect("nonempty")) {
            return Err(Error::InvalidMap("walk exits from a cell without Exit".into()));
        }
        Ok(OrbitSample { start, walk, exited })
    }

    pub fn atoms(&self, space: &FiniteSpace) -> Vec<AtomId> {
        self.walk.iter().map(|&c| space.top_atom(c)).collect()
    }

    /// Settled-suffix length used when reading the walk as a net.
    pub fn min_tail(&self) -> usize {
        if self.exited {
            1
        } else {
            default_min_tail(self.walk.len())
        }
    }
}

/// Random walk of at most `steps` transitions, choosing uniformly among the
/// images of the current cell and its Exit marker.
pub fn sample_walk<R: Rng + ?Sized>(map: &CellMap, start: CellId, steps: usize, rng: &mut R) -> OrbitSample {
    let mut walk = vec![start];
    let mut c = start;
    for _ in 0..steps {
        let imgs = map.successors(c);
        let options = imgs.len() + usize::from(map.exits(c));
        let pick = rng.gen_range(0..options);
        if pick == imgs.len() {
            return OrbitSample { start, walk, exited: true };
        }
        c = imgs[pick];
        walk.push(c);
    }
    OrbitSample { start, walk, exited: false }
}

/// End selected by the tail of a walk, one tail component per level.
pub fn omega0_end(space: &FiniteSpace, tower: &Tower, walk: &OrbitSample) -> Result<EndPoint> {
    let ends = end_space(space, tower)?;
    omega0_with(space, tower, &ends, walk)
}

pub(crate) fn omega0_with(space: &FiniteSpace, tower: &Tower, ends: &EndSpace, walk: &OrbitSample) -> Result<EndPoint> {
    let seq = walk.atoms(space);
    let class = ends.classify_net(tower, &seq, walk.min_tail());
    match class.branch {
        Some(b) => Ok(b),
        None => Err(Error::InsufficientHorizon {
            level: ends.unsettled_level(&class, seq.len(), walk.min_tail()).unwrap_or(0),
        }),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Basins {
    /// Cells all of whose maximal walks select the end, per end.
    pub basins: Vec<Vec<CellId>>,
    /// Cells with walks selecting different ends, or no end at all.
    pub ambiguous: Vec<CellId>,
}

/// Sorts cells by the ends their maximal walks can select.
///
/// A maximal walk either takes an Exit option (selecting the end whose
/// last-level component holds that cell) or eventually circulates in one
/// cyclic strongly connected component (selecting an end when that
/// component lies in a single last-level component).
pub fn basin_decomposition(space: &FiniteSpace, map: &CellMap, tower: &Tower) -> Result<Basins> {
    let ends = end_space(space, tower)?;
    const NONE: usize = usize::MAX;
    let end_of = |c: CellId| ends.end_containing(space.top_atom(c)).unwrap_or(NONE);

    let dag = Condensation::new(map);
    let reach = dag.fold_up(|s, succ: &[&Vec<usize>]| {
        let members = dag.members(s);
        let mut out: Vec<usize> = members.iter().filter(|&&c| map.exits(c)).map(|&c| end_of(c)).collect();
        if dag.is_cyclic(s) {
            let first = end_of(members[0]);
            out.push(if members.iter().all(|&c| end_of(c) == first) { first } else { NONE });
        }
        for v in succ {
            out.extend_from_slice(v);
        }
        out.sort_unstable();
        out.dedup();
        out
    });

    let mut basins = vec![Vec::new(); ends.len()];
    let mut ambiguous = Vec::new();
    for c in map.cells() {
        match reach[dag.component_of(c)].as_slice() {
            [a] if *a != NONE => basins[*a].push(c),
            _ => ambiguous.push(c),
        }
    }
    Ok(Basins { basins, ambiguous })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{default_depth, r_exterior_tower};
    use crate::gallery;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn walk(f: &gallery::Fixture, labels: &[&str]) -> OrbitSample {
        let cells = labels.iter().map(|l| f.space.cell(l).unwrap()).collect();
        OrbitSample::new(f.map.as_ref().unwrap(), cells, false).unwrap()
    }

    fn tower(f: &gallery::Fixture) -> Tower {
        let map = f.map.as_ref().unwrap();
        r_exterior_tower(&f.space, map, default_depth(map))
    }

    #[test]
    fn walks_follow_edges() {
        let f = gallery::twosinks();
        let map = f.map.as_ref().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let w = sample_walk(map, f.space.cell("c2").unwrap(), 6, &mut rng);
            assert_eq!(w.walk.len(), 7);
            assert!(OrbitSample::new(map, w.walk.clone(), w.exited).is_ok());
        }
        let f = gallery::ray5shift();
        let w = sample_walk(f.map.as_ref().unwrap(), CellId(0), 100, &mut rng);
        assert!(w.exited);
        assert_eq!(w.walk.len(), 5);
        assert!(OrbitSample::new(f.map.as_ref().unwrap(), vec![CellId(0), CellId(2)], false).is_err());
    }

    #[test]
    fn twosinks_ends() {
        let f = gallery::twosinks();
        let t = tower(&f);
        let left = omega0_end(&f.space, &t, &walk(&f, &["c2", "c1", "c0", "c0"])).unwrap();
        let right = omega0_end(&f.space, &t, &walk(&f, &["c2", "c3", "c4", "c4"])).unwrap();
        assert_eq!(left.last(), 0);
        assert_eq!(right.last(), 1);
        assert!(matches!(
            omega0_end(&f.space, &t, &walk(&f, &["c2", "c1"])),
            Err(Error::InsufficientHorizon { .. })
        ));
    }

    #[test]
    fn line5shift_end() {
        let f = gallery::line5shift();
        let t = tower(&f);
        let w = walk(&f, &["c0", "c1", "c2", "c3", "c4", "c4", "c4", "c4", "c4", "c4"]);
        assert_eq!(omega0_end(&f.space, &t, &w).unwrap().last(), 0);
        let b = basin_decomposition(&f.space, f.map.as_ref().unwrap(), &t).unwrap();
        assert_eq!(b.basins, vec![(0..5).map(CellId).collect::<Vec<_>>()]);
        assert!(b.ambiguous.is_empty());
    }

    #[test]
    fn basins() {
        let f = gallery::twosinks();
        let b = basin_decomposition(&f.space, f.map.as_ref().unwrap(), &tower(&f)).unwrap();
        let cells = |ls: &[&str]| ls.iter().map(|l| f.space.cell(l).unwrap()).collect::<Vec<_>>();
        assert_eq!(b.basins, vec![cells(&["c0", "c1"]), cells(&["c3", "c4"])]);
        assert_eq!(b.ambiguous, cells(&["c2"]));

        let f = gallery::morse_circle(8).unwrap();
        let b = basin_decomposition(&f.space, f.map.as_ref().unwrap(), &tower(&f)).unwrap();
        let m = f.space.cell("m").unwrap();
        let big = f.space.cell("M").unwrap();
        let ends = end_space(&f.space, &tower(&f)).unwrap();
        let end_m = ends.end_containing(f.space.top_atom(m)).unwrap();
        let end_big = ends.end_containing(f.space.top_atom(big)).unwrap();
        assert_eq!(b.basins[end_big], vec![big]);
        assert_eq!(b.basins[end_m].len(), 7);
        assert!(!b.basins[end_m].contains(&big));
        assert!(b.ambiguous.is_empty());
    }
}
