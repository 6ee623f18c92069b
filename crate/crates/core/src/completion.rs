//! The completion `X ∪_L F(X)` gluing each end onto its e₀-fiber of limit
//! atoms (or adjoining it as a new point when no limit atom represents it),
//! with the W₀ neighborhoods, the induced tower and the completeness checks.

use crate::error::{Error, Result};
use crate::externology::{e0_with, end_space, limit_sets, EndSpace, Tail, Tower};
use crate::space::{Atom, AtomId, AtomSet, FiniteSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Point {
    /// An atom outside the limit set.
    Interior(AtomId),
    /// An end, absorbing its fiber of limit atoms.
    Glued(usize),
}

/// `W₀(C)` for component `component` of level `level`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisElement {
    pub level: usize,
    pub component: usize,
    pub set: AtomSet,
}

#[derive(Clone, Debug)]
pub struct Completion {
    source: FiniteSpace,
    tower: Tower,
    ends: EndSpace,
    limit: AtomSet,
    carrier: FiniteSpace,
    points: Vec<Point>,
    p0: Vec<AtomId>,
    incl0: Vec<AtomId>,
    basis: Vec<BasisElement>,
    induced: Tower,
}

/// Builds the completion of `space` with respect to `tower`.
///
/// The carrier lists the interior points in atom order, then the ends in
/// end order. Its minimal neighborhoods are `p₀(U_x)` for interior points
/// and `{a}` for ends.
pub fn build_completion(space: &FiniteSpace, tower: &Tower) -> Result<Completion> {
    let limit = limit_sets(space, tower)?.limit;
    let ends = end_space(space, tower)?;
    let last = ends.last_level();

    let mut points = Vec::new();
    let mut labels = Vec::new();
    let mut p0 = vec![AtomId(0); space.len()];
    for x in space.atoms().filter(|&x| !limit.contains(x)) {
        p0[x.index()] = AtomId(points.len() as u32);
        points.push(Point::Interior(x));
        labels.push(space.atom(x).clone());
    }
    let mut incl0 = Vec::with_capacity(ends.len());
    for a in 0..ends.len() {
        let id = AtomId(points.len() as u32);
        incl0.push(id);
        points.push(Point::Glued(a));
        let rep = ends.tree.level(last).label(ends.ends[a].last());
        labels.push(Atom::new(format!("end<{}>", space.label(rep)), None));
    }
    for x in &limit {
        let a = ends.end_containing(x).expect("limit lies in the last level");
        p0[x.index()] = incl0[a];
    }

    let n = points.len();
    let image = |s: &AtomSet| AtomSet::from_atoms(n, s.iter().map(|x| p0[x.index()]));
    let min_open: Vec<AtomSet> = points
        .iter()
        .enumerate()
        .map(|(i, p)| match p {
            Point::Interior(x) => image(space.min_open(*x)),
            Point::Glued(_) => AtomSet::from_atoms(n, [AtomId(i as u32)]),
        })
        .collect();
    let carrier = FiniteSpace::from_min_opens(labels, min_open)?;

    let mut c = Completion {
        source: space.clone(),
        tower: tower.clone(),
        ends,
        limit,
        carrier,
        points,
        p0,
        incl0,
        basis: Vec::new(),
        induced: Tower::new(Vec::new(), Tail::Stabilized),
    };
    for k in 0..tower.len() {
        for i in 0..c.ends.tree.level(k).len() {
            let comp = c.ends.tree.level(k).block(i).clone();
            let set = c.w0(&comp, k).expect("components are saturated");
            c.basis.push(BasisElement { level: k, component: i, set });
        }
    }
    let mut levels: Vec<AtomSet> = (0..tower.len())
        .map(|k| c.w0(tower.level(k), k).expect("levels are saturated"))
        .collect();
    if tower.tail() == Tail::ShrinksToEmpty {
        let glued = c.incl0_set();
        levels.push(glued.clone());
        levels.push(glued);
    }
    c.induced = Tower::new(levels, Tail::Stabilized);
    Ok(c)
}

/// Verdict of the completeness criterion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum C0Verdict {
    Complete,
    Fails(C0Failure),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum C0Failure {
    /// Two limit atoms on the same end.
    E0NotInjective(AtomId, AtomId),
    /// An end without limit atoms.
    E0NotSurjective(usize),
    /// A limit atom `x` whose minimal neighborhood `U` contains no branch
    /// component `C_k(x)`.
    SaturatedNbhd(AtomId, AtomSet),
}

impl C0Failure {
    pub fn kind(&self) -> &'static str {
        match self {
            C0Failure::E0NotInjective(..) => "E0NotInjective",
            C0Failure::E0NotSurjective(_) => "E0NotSurjective",
            C0Failure::SaturatedNbhd(..) => "SaturatedNbhd",
        }
    }

    /// One-line description using atom labels.
    pub fn describe(&self, space: &FiniteSpace) -> String {
        match self {
            C0Failure::E0NotInjective(x, y) => {
                format!("e0 not injective: {} and {} share an end", space.label(*x), space.label(*y))
            }
            C0Failure::E0NotSurjective(a) => format!("e0 not surjective: end {a} has no limit atom"),
            C0Failure::SaturatedNbhd(x, _) => {
                format!("no branch component of {} fits in its minimal neighborhood", space.label(*x))
            }
        }
    }
}

impl C0Verdict {
    pub fn is_complete(&self) -> bool {
        matches!(self, C0Verdict::Complete)
    }
}

/// Whether `space` is complete for `tower`: e₀ is bijective and every limit
/// atom has a branch component inside its minimal neighborhood.
pub fn check_c0_complete(space: &FiniteSpace, tower: &Tower) -> Result<C0Verdict> {
    let limit = limit_sets(space, tower)?.limit;
    let ends = end_space(space, tower)?;
    let e0 = e0_with(space, tower, &ends, &limit);
    if let Some((x, y)) = e0.injectivity_witness {
        return Ok(C0Verdict::Fails(C0Failure::E0NotInjective(x, y)));
    }
    if let Some(a) = e0.surjectivity_witness {
        return Ok(C0Verdict::Fails(C0Failure::E0NotSurjective(a)));
    }
    for x in &limit {
        let u = space.min_open(x);
        let fits = (0..tower.len()).any(|k| {
            let lk = ends.tree.level(k);
            lk.block(lk.block_of(x).expect("L ⊆ E_k")).is_subset(u)
        });
        if !fits {
            return Ok(C0Verdict::Fails(C0Failure::SaturatedNbhd(x, u.clone())));
        }
    }
    Ok(C0Verdict::Complete)
}

/// Why a carrier subset is not G₀-open.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum G0Witness {
    /// An atom of `p₀⁻¹(W)` whose minimal neighborhood leaves it.
    PreimageNotOpen(AtomId),
    /// An end of `W` without a branch neighborhood inside `W`.
    End(usize),
}

impl Completion {
    pub fn carrier(&self) -> &FiniteSpace {
        &self.carrier
    }

    pub fn source(&self) -> &FiniteSpace {
        &self.source
    }

    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    pub fn ends(&self) -> &EndSpace {
        &self.ends
    }

    pub fn limit(&self) -> &AtomSet {
        &self.limit
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, p: AtomId) -> Point {
        self.points[p.index()]
    }

    pub fn p0(&self, x: AtomId) -> AtomId {
        self.p0[x.index()]
    }

    pub fn incl0(&self, a: usize) -> AtomId {
        self.incl0[a]
    }

    pub fn num_ends(&self) -> usize {
        self.incl0.len()
    }

    /// `p₀(S)`.
    pub fn p0_set(&self, s: &AtomSet) -> AtomSet {
        AtomSet::from_atoms(self.carrier.len(), s.iter().map(|x| self.p0(x)))
    }

    /// `p₀⁻¹(W)`.
    pub fn p0_preimage(&self, w: &AtomSet) -> AtomSet {
        AtomSet::from_atoms(self.p0.len(), (0..self.p0.len()).filter(|&x| w.contains(self.p0[x])).map(|x| AtomId(x as u32)))
    }

    /// Ends whose glued point lies in `w`.
    pub fn incl0_preimage(&self, w: &AtomSet) -> Vec<usize> {
        (0..self.incl0.len()).filter(|&a| w.contains(self.incl0[a])).collect()
    }

    pub fn incl0_set(&self) -> AtomSet {
        AtomSet::from_atoms(self.carrier.len(), self.incl0.iter().copied())
    }

    /// `W₀(V) = p₀(V) ∪ {a | C_k(a) ⊆ V}` for a union `V` of components of `E_k`.
    pub fn w0(&self, v: &AtomSet, k: usize) -> Result<AtomSet> {
        if k >= self.tower.len() {
            return Err(Error::NotSaturated { level: k });
        }
        let level = self.tower.level(k);
        if !v.is_subset(level) {
            return Err(Error::NotSaturated { level: k });
        }
        let parts = self.ends.tree.level(k);
        for x in v {
            if !parts.block(parts.block_of(x).expect("v ⊆ E_k")).is_subset(v) {
                return Err(Error::NotSaturated { level: k });
            }
        }
        let mut out = self.p0_set(v);
        for a in 0..self.ends.len() {
            if self.ends.branch_component(a, k).is_subset(v) {
                out.insert(self.incl0[a]);
            }
        }
        Ok(out)
    }

    /// Openness in the G₀ topology at the scale of the stored levels.
    pub fn is_g0_open(&self, w: &AtomSet) -> std::result::Result<(), G0Witness> {
        let pre = self.p0_preimage(w);
        if let Some(x) = self.source.first_non_open(&pre) {
            return Err(G0Witness::PreimageNotOpen(x));
        }
        for a in self.incl0_preimage(w) {
            let ok = (0..self.tower.len()).any(|k| {
                let comp = self.ends.branch_component(a, k);
                comp.is_subset(&pre)
                    && self
                        .ends
                        .ends_through(k, self.ends.ends[a].branch[k])
                        .all(|b| w.contains(self.incl0[b]))
            });
            if !ok {
                return Err(G0Witness::End(a));
            }
        }
        Ok(())
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    /// The chain `W₀(E_k)`; for towers shrinking to empty it continues with
    /// the set of ends, where the shrinking chain accumulates.
    pub fn induced_tower(&self) -> &Tower {
        &self.induced
    }
}

impl Completion {
    /// Whether every pairwise intersection of basis elements is a union of
    /// basis elements, i.e. the generators form a basis of a topology.
    pub fn basis_is_closed(&self) -> bool {
        for (i, a) in self.basis.iter().enumerate() {
            for b in &self.basis[i..] {
                let meet = a.set.intersection(&b.set);
                let mut cover = AtomSet::empty(self.carrier.len());
                for c in self.basis.iter().filter(|c| c.set.is_subset(&meet)) {
                    cover.union_with(&c.set);
                }
                if cover != meet {
                    return false;
                }
            }
        }
        true
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparationReport {
    /// Distinct ends have disjoint W₀ neighborhoods.
    pub ends_separated: bool,
    /// For each atom outside the limit: some closed neighborhood misses a level.
    pub escape: Vec<(AtomId, bool)>,
    pub hausdorff_ok: bool,
    /// The tower is the neighborhood tower of a set of isolated top atoms.
    pub completeex_applicable: bool,
}

pub fn check_separation(space: &FiniteSpace, tower: &Tower) -> Result<SeparationReport> {
    let c = build_completion(space, tower)?;
    let last = c.ends.last_level();
    let mut ends_separated = true;
    'pairs: for a in 0..c.num_ends() {
        for b in a + 1..c.num_ends() {
            let wa = c.w0(c.ends.branch_component(a, last), last)?;
            let wb = c.w0(c.ends.branch_component(b, last), last)?;
            if !wa.is_disjoint(&wb) {
                ends_separated = false;
                break 'pairs;
            }
        }
    }
    let escape: Vec<(AtomId, bool)> = space
        .atoms()
        .filter(|&x| !c.limit.contains(x))
        .map(|x| {
            let ok = match tower.tail() {
                Tail::ShrinksToEmpty => true,
                Tail::Stabilized => {
                    let f = space.closure(space.min_open(x));
                    tower.levels().iter().any(|e| f.is_disjoint(e))
                }
            };
            (x, ok)
        })
        .collect();
    let hausdorff_ok = ends_separated && escape.iter().all(|&(_, ok)| ok);
    let l = &c.limit;
    let completeex_applicable = tower.tail() == Tail::Stabilized
        && !l.is_empty()
        && l.iter().all(|x| space.cell_of(x).is_some())
        && space.components(l).len() == l.len()
        && *tower.last() == space.star(l);
    Ok(SeparationReport {
        ends_separated,
        escape,
        hausdorff_ok,
        completeex_applicable,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompactnessReport {
    /// Image size of each bonding map `π₀(E_k) → π₀(E_{k−1})`, `k ≥ 1`.
    pub bonding_image_sizes: Vec<usize>,
    pub end_cover_ok: bool,
    pub connected: bool,
    pub escape_all: bool,
    pub cocompact_levels: bool,
    pub num_ends: usize,
    pub compact_conclusion: bool,
}

pub fn check_compactness(space: &FiniteSpace, tower: &Tower) -> Result<CompactnessReport> {
    let sep = check_separation(space, tower)?;
    let ends = end_space(space, tower)?;
    let bonding_image_sizes = (1..tower.len()).map(|k| ends.tree.bonding_image_size(k)).collect();
    // complements of levels are finite, so both conditions hold on any finite model
    let end_cover_ok = true;
    let cocompact_levels = true;
    let connected = space.components(&space.all()).len() == 1;
    let escape_all = sep.escape.iter().all(|&(_, ok)| ok);
    Ok(CompactnessReport {
        bonding_image_sizes,
        end_cover_ok,
        connected,
        escape_all,
        cocompact_levels,
        num_ends: ends.len(),
        compact_conclusion: end_cover_ok && connected && escape_all && cocompact_levels,
    })
}

/// Whether `f` (atom of `a` ↦ atom of `b`) is a homeomorphism.
pub fn is_isomorphism(a: &FiniteSpace, b: &FiniteSpace, f: &[AtomId]) -> bool {
    if a.len() != b.len() || f.len() != a.len() {
        return false;
    }
    let mut hit = b.none();
    for &y in f {
        if y.index() >= b.len() || !hit.insert(y) {
            return false;
        }
    }
    a.atoms().all(|x| {
        let image = AtomSet::from_atoms(b.len(), a.min_open(x).iter().map(|y| f[y.index()]));
        image == *b.min_open(f[x.index()])
    })
}

/// Homeomorphism matching atoms by label, if one exists.
pub fn isomorphic_by_labels(a: &FiniteSpace, b: &FiniteSpace) -> bool {
    let f: Option<Vec<AtomId>> = a.atoms().map(|x| b.find(a.label(x))).collect();
    f.is_some_and(|f| is_isomorphism(a, b, &f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{default_depth, r_exterior_tower};
    use crate::gallery;
    use crate::space::{build_grid_space, Boundary};

    fn generated(f: &gallery::Fixture) -> Tower {
        f.tower.clone().unwrap_or_else(|| {
            let m = f.map.as_ref().unwrap();
            r_exterior_tower(&f.space, m, default_depth(m))
        })
    }

    #[test]
    fn ray_completion_adds_one_point() {
        let f = gallery::ray5();
        let t = f.tower.as_ref().unwrap();
        let c = build_completion(&f.space, t).unwrap();
        assert_eq!(c.carrier().len(), 10);
        assert_eq!(c.num_ends(), 1);
        assert_eq!(c.carrier().label(c.incl0(0)), "end<c3>");
        assert_eq!(check_c0_complete(&f.space, t).unwrap(), C0Verdict::Fails(C0Failure::E0NotSurjective(0)));
        assert!(check_c0_complete(c.carrier(), c.induced_tower()).unwrap().is_complete());
        // the induced chain accumulates at the new point
        assert_eq!(c.induced_tower().last(), &c.incl0_set());
    }

    #[test]
    fn w0_examples() {
        let f = gallery::ray5();
        let t = f.tower.as_ref().unwrap();
        let c = build_completion(&f.space, t).unwrap();
        let last = t.last_index();
        let w = c.w0(t.level(last), last).unwrap();
        assert!(w.contains(c.incl0(0)));
        let c4 = f.space.set_by_labels(&["c4"]);
        assert!(matches!(c.w0(&c4, last), Err(Error::NotSaturated { .. })));
        assert!(c.w0(&f.space.none(), 0).unwrap().is_empty());
        assert!(c.is_g0_open(&w).is_ok());
        assert_eq!(c.is_g0_open(&c.incl0_set()), Err(G0Witness::End(0)));
        assert!(c.is_g0_open(&c.carrier().all()).is_ok());
    }

    #[test]
    fn single_cell_component_w0() {
        // a stabilized tower ending at {c4}
        let f = gallery::line5shift();
        let t = generated(&f);
        let c = build_completion(&f.space, &t).unwrap();
        let w = c.w0(&f.space.set_by_labels(&["c4"]), t.last_index()).unwrap();
        assert_eq!(w, AtomSet::from_atoms(c.carrier().len(), [c.incl0(0)]));
        assert_eq!(c.p0(f.space.find("c4").unwrap()), c.incl0(0));
    }

    #[test]
    fn degenerate_towers() {
        let x = build_grid_space(&[3], &[0, 2], Boundary::Closed).unwrap();
        let c = build_completion(&x, &Tower::whole(&x)).unwrap();
        assert_eq!(c.carrier().len(), 2);
        assert!(c.carrier().atoms().all(|p| c.carrier().min_open(p).len() == 1));

        let t = Tower::new(vec![x.all(), x.none(), x.none()], Tail::Stabilized);
        let c = build_completion(&x, &t).unwrap();
        let f: Vec<AtomId> = x.atoms().map(|a| c.p0(a)).collect();
        assert!(is_isomorphism(&x, c.carrier(), &f));
        assert!(check_c0_complete(&x, &t).unwrap().is_complete());
    }

    #[test]
    fn completeness_examples() {
        let f = gallery::line5shift();
        assert!(check_c0_complete(&f.space, &generated(&f)).unwrap().is_complete());
        let x = build_grid_space(&[2], &[0, 1], Boundary::Open).unwrap();
        assert!(matches!(
            check_c0_complete(&x, &Tower::whole(&x)).unwrap(),
            C0Verdict::Fails(C0Failure::E0NotInjective(..))
        ));
        // the limit {f01} of a neighborhood tower has a minimal neighborhood
        // smaller than its component
        let d = x.set_by_labels(&["f01"]);
        let t = Tower::neighborhood(&x, &d);
        assert!(matches!(
            check_c0_complete(&x, &t).unwrap(),
            C0Verdict::Fails(C0Failure::E0NotInjective(..))
        ));
    }

    #[test]
    fn separation_and_compactness() {
        let f = gallery::ray5();
        let t = f.tower.as_ref().unwrap();
        let s = check_separation(&f.space, t).unwrap();
        assert!(s.ends_separated && s.hausdorff_ok && !s.completeex_applicable);
        let k = check_compactness(&f.space, t).unwrap();
        assert!(k.compact_conclusion);
        assert_eq!(k.num_ends, 1);

        let f = gallery::twosinks();
        let s = check_separation(&f.space, &generated(&f)).unwrap();
        assert!(s.ends_separated);

        let f = gallery::morse_circle(8).unwrap();
        let d = f.space.set_by_labels(&["M", "m"]);
        let t = Tower::neighborhood(&f.space, &d);
        assert!(check_separation(&f.space, &t).unwrap().completeex_applicable);
        assert!(check_c0_complete(&f.space, &t).unwrap().is_complete());

        let x = build_grid_space(&[3], &[0, 2], Boundary::Open).unwrap();
        assert!(!check_compactness(&x, &Tower::whole(&x)).unwrap().connected);
    }

    #[test]
    fn basis_is_closed_on_gallery() {
        for f in gallery::all_fixtures() {
            if f.space.len() > 600 {
                continue;
            }
            let c = build_completion(&f.space, &generated(&f)).unwrap();
            assert!(c.basis_is_closed(), "{}", f.name);
            for b in c.basis() {
                assert!(c.is_g0_open(&b.set).is_ok(), "{}", f.name);
            }
        }
    }
}
