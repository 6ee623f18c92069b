//! Towers of open sets, limit sets, the component tree and the end space.
//!
//! A [`Tower`] `E₀ ⊇ E₁ ⊇ … ⊇ E_{N−1}` is a chain base of an externology.
//! Its tail declaration says what happens past the stored levels: either the
//! chain has reached a fixpoint, or it keeps shrinking and its intersection
//! is empty (the ray-like case, where ends exist without limit points).
//! Beyond the stored levels the bonding maps between component sets are
//! taken to be bijections, so ends correspond to the components of the last
//! stored level.

use crate::error::{Error, Result};
use crate::space::{AtomId, AtomSet, FiniteSpace, Partition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Tail {
    /// The last stored level is the fixpoint of the chain.
    Stabilized,
    /// The chain keeps shrinking past the stored levels and its intersection is empty.
    ShrinksToEmpty,
}

impl Tail {
    pub fn as_str(self) -> &'static str {
        match self {
            Tail::Stabilized => "stabilized",
            Tail::ShrinksToEmpty => "shrinks-to-empty",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tower {
    levels: Vec<AtomSet>,
    tail: Tail,
}

impl Tower {
    /// Wraps levels without checking them; see [`validate_tower`].
    pub fn new(levels: Vec<AtomSet>, tail: Tail) -> Self {
        Tower { levels, tail }
    }

    /// The trivial externology `{X}`.
    pub fn whole(space: &FiniteSpace) -> Self {
        Tower::new(vec![space.all()], Tail::Stabilized)
    }

    /// Chain base of the open neighborhoods of `d`: `[X, star(d), star(d)]`.
    pub fn neighborhood(space: &FiniteSpace, d: &AtomSet) -> Self {
        let star = space.star(d);
        Tower::new(vec![space.all(), star.clone(), star], Tail::Stabilized)
    }

    pub fn levels(&self) -> &[AtomSet] {
        &self.levels
    }

    pub fn level(&self, k: usize) -> &AtomSet {
        &self.levels[k]
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn last(&self) -> &AtomSet {
        self.levels.last().expect("validated towers are nonempty")
    }

    pub fn last_index(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    /// First level equal to its successor, for stabilized towers.
    pub fn stabilized_at(&self) -> Option<usize> {
        match self.tail {
            Tail::ShrinksToEmpty => None,
            Tail::Stabilized => Some(
                self.levels
                    .windows(2)
                    .position(|w| w[0] == w[1])
                    .unwrap_or(self.levels.len() - 1),
            ),
        }
    }

    pub(crate) fn ensure_valid(&self, space: &FiniteSpace) -> Result<()> {
        let diagnostics = validate_tower(space, self);
        if diagnostics.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidTower(diagnostics))
        }
    }
}

/// One diagnostic per violated tower invariant; empty means valid.
pub fn validate_tower(space: &FiniteSpace, tower: &Tower) -> Vec<String> {
    let mut out = Vec::new();
    if tower.levels.is_empty() {
        out.push("tower has no levels".to_string());
        return out;
    }
    for (k, level) in tower.levels.iter().enumerate() {
        if level.universe() != space.len() {
            out.push(format!("level {k} is not a subset of this space"));
            continue;
        }
        if let Some(a) = space.first_non_open(level) {
            out.push(format!("level {k} not open (at atom {})", space.label(a)));
        }
        if k > 0 && level.universe() == tower.levels[k - 1].universe() && !level.is_subset(&tower.levels[k - 1]) {
            out.push(format!("level {k} not contained in level {}", k - 1));
        }
    }
    let n = tower.levels.len();
    if tower.tail == Tail::Stabilized && n > 1 && tower.levels[n - 1] != tower.levels[n - 2] {
        out.push(format!(
            "tail is stabilized but level {} differs from level {}",
            n - 1,
            n - 2
        ));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitSets {
    /// `L = ⋂ E_k`.
    pub limit: AtomSet,
    /// `L̄ = ⋂ closure(E_k)`.
    pub bar_limit: AtomSet,
}

pub fn limit_sets(space: &FiniteSpace, tower: &Tower) -> Result<LimitSets> {
    tower.ensure_valid(space)?;
    Ok(match tower.tail {
        Tail::ShrinksToEmpty => LimitSets {
            limit: space.none(),
            bar_limit: space.none(),
        },
        Tail::Stabilized => {
            let mut bar_limit = space.all();
            for level in &tower.levels {
                bar_limit.intersect_with(&space.closure(level));
            }
            LimitSets {
                limit: tower.last().clone(),
                bar_limit,
            }
        }
    })
}

/// Component partitions of every level, with the bonding (parent) maps.
#[derive(Clone, Debug)]
pub struct ComponentTree {
    levels: Vec<Partition>,
    parents: Vec<Vec<usize>>,
}

impl ComponentTree {
    pub fn build(space: &FiniteSpace, tower: &Tower) -> Self {
        let levels: Vec<Partition> = tower.levels.iter().map(|e| space.components(e)).collect();
        let mut parents = vec![Vec::new()];
        for k in 1..levels.len() {
            let above = &levels[k - 1];
            parents.push(
                (0..levels[k].len())
                    .map(|i| {
                        above
                            .block_of(levels[k].label(i))
                            .expect("levels are decreasing")
                    })
                    .collect(),
            );
        }
        ComponentTree { levels, parents }
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, k: usize) -> &Partition {
        &self.levels[k]
    }

    pub fn levels(&self) -> &[Partition] {
        &self.levels
    }

    /// Bonding map image of component `i` of level `k` in level `k − 1`.
    pub fn parent(&self, k: usize, i: usize) -> Option<usize> {
        (k > 0).then(|| self.parents[k][i])
    }

    /// Image of component `i` of level `k` under the composite bonding map to level `j ≤ k`.
    pub fn ancestor(&self, k: usize, mut i: usize, j: usize) -> usize {
        assert!(j <= k);
        for level in (j + 1..=k).rev() {
            i = self.parents[level][i];
        }
        i
    }

    /// Number of distinct level-(k−1) components hit by level-k components.
    pub fn bonding_image_size(&self, k: usize) -> usize {
        let mut hit: Vec<usize> = self.parents[k].clone();
        hit.sort_unstable();
        hit.dedup();
        hit.len()
    }
}

/// A coherent thread of components, one per level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndPoint {
    pub branch: Vec<usize>,
}

impl EndPoint {
    pub fn last(&self) -> usize {
        *self.branch.last().expect("branches are nonempty")
    }
}

#[derive(Clone, Debug)]
pub struct EndSpace {
    pub tree: ComponentTree,
    pub ends: Vec<EndPoint>,
}

impl EndSpace {
    pub fn len(&self) -> usize {
        self.ends.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ends.is_empty()
    }

    pub fn last_level(&self) -> usize {
        self.tree.depth() - 1
    }

    /// End whose last-level component is `i`.
    pub fn end_of_last_component(&self, i: usize) -> usize {
        // ends are enumerated in last-level component order
        i
    }

    /// Atoms of the level-`k` component on the branch of end `a`.
    pub fn branch_component(&self, a: usize, k: usize) -> &AtomSet {
        self.tree.level(k).block(self.ends[a].branch[k])
    }

    /// Ends whose branch passes through component `i` of level `k`.
    pub fn ends_through(&self, k: usize, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.ends
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.branch[k] == i)
            .map(|(a, _)| a)
    }

    /// End whose last-level component contains `x`, if `x` lies in the last level.
    pub fn end_containing(&self, x: AtomId) -> Option<usize> {
        self.tree
            .level(self.last_level())
            .block_of(x)
            .map(|i| self.end_of_last_component(i))
    }

    /// Classifies a finite atom sequence as an ε-net / π₀-ε-net.
    ///
    /// "Eventually" means: from some index to the end of the sample, with the
    /// settled suffix at least `min_tail` samples long.
    pub fn classify_net(&self, tower: &Tower, seq: &[AtomId], min_tail: usize) -> NetClass {
        let depth = tower.len();
        let mut class = NetClass {
            eps_net: false,
            pi0_net: false,
            branch: None,
            end: None,
            entry: vec![None; depth],
            component_entry: vec![None; depth],
        };
        let Some(&last) = seq.last() else {
            return class;
        };
        let min_tail = min_tail.max(1);
        let settled = |entry: Option<usize>| entry.is_some_and(|i| seq.len() - i >= min_tail);
        let mut eps = true;
        let mut pi0 = true;
        let mut branch = Vec::with_capacity(depth);
        for k in 0..depth {
            let level = tower.level(k);
            class.entry[k] = suffix_entry(seq, |x| level.contains(x));
            eps &= settled(class.entry[k]);
            match self.tree.level(k).block_of(last) {
                Some(ci) => {
                    let comp = self.tree.level(k).block(ci);
                    class.component_entry[k] = suffix_entry(seq, |x| comp.contains(x));
                    pi0 &= settled(class.component_entry[k]);
                    branch.push(ci);
                }
                None => pi0 = false,
            }
        }
        class.eps_net = eps;
        class.pi0_net = eps && pi0;
        if class.pi0_net {
            class.end = Some(self.end_of_last_component(*branch.last().expect("depth ≥ 1")));
            class.branch = Some(EndPoint { branch });
        }
        class
    }

    /// First level at which `classify_net` fails to settle, if any.
    pub fn unsettled_level(&self, class: &NetClass, seq_len: usize, min_tail: usize) -> Option<usize> {
        let min_tail = min_tail.max(1);
        class
            .component_entry
            .iter()
            .position(|e| !e.is_some_and(|i| seq_len - i >= min_tail))
    }
}

/// Smallest index from which every sample satisfies `pred`; `None` if the last one fails.
fn suffix_entry(seq: &[AtomId], pred: impl Fn(AtomId) -> bool) -> Option<usize> {
    let mut i = seq.len();
    while i > 0 && pred(seq[i - 1]) {
        i -= 1;
    }
    (i < seq.len()).then_some(i)
}

pub fn end_space(space: &FiniteSpace, tower: &Tower) -> Result<EndSpace> {
    tower.ensure_valid(space)?;
    let tree = ComponentTree::build(space, tower);
    let last = tree.depth() - 1;
    let ends = (0..tree.level(last).len())
        .map(|i| {
            let mut branch: Vec<usize> = (0..=last).map(|j| tree.ancestor(last, i, j)).collect();
            branch.shrink_to_fit();
            EndPoint { branch }
        })
        .collect();
    Ok(EndSpace { tree, ends })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct E0Analysis {
    pub limit: AtomSet,
    /// `(x, e0(x))` for every limit atom, in atom order.
    pub e0: Vec<(AtomId, usize)>,
    pub injective: bool,
    /// Two limit atoms sharing an end.
    pub injectivity_witness: Option<(AtomId, AtomId)>,
    pub surjective: bool,
    /// An end whose branch misses the limit.
    pub surjectivity_witness: Option<usize>,
    /// e₀-component of each end.
    pub fibers: Vec<AtomSet>,
}

impl E0Analysis {
    pub fn bijective(&self) -> bool {
        self.injective && self.surjective
    }
}

pub fn e0_analysis(space: &FiniteSpace, tower: &Tower) -> Result<E0Analysis> {
    let limits = limit_sets(space, tower)?;
    let ends = end_space(space, tower)?;
    Ok(e0_with(space, tower, &ends, &limits.limit))
}

pub(crate) fn e0_with(space: &FiniteSpace, tower: &Tower, ends: &EndSpace, limit: &AtomSet) -> E0Analysis {
    let mut fibers = vec![space.none(); ends.len()];
    let mut e0 = Vec::new();
    let mut injectivity_witness = None;
    for x in limit {
        let a = ends.end_containing(x).expect("L lies in every level");
        fibers[a].insert(x);
        e0.push((x, a));
        if injectivity_witness.is_none() {
            let mut thread = limit.clone();
            for k in 0..tower.len() {
                let lk = ends.tree.level(k);
                thread.intersect_with(lk.block(lk.block_of(x).expect("L ⊆ E_k")));
            }
            if let Some(y) = thread.iter().find(|&y| y != x) {
                injectivity_witness = Some((x.min(y), x.max(y)));
            }
        }
    }
    let surjectivity_witness = fibers.iter().position(AtomSet::is_empty);
    E0Analysis {
        limit: limit.clone(),
        e0,
        injective: injectivity_witness.is_none(),
        injectivity_witness,
        surjective: surjectivity_witness.is_none(),
        surjectivity_witness,
        fibers,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetClass {
    pub eps_net: bool,
    pub pi0_net: bool,
    pub branch: Option<EndPoint>,
    pub end: Option<usize>,
    /// Per level, the index from which the sample stays in the level.
    pub entry: Vec<Option<usize>>,
    /// Per level, the index from which the sample stays in one component.
    pub component_entry: Vec<Option<usize>>,
}

/// Default settled-suffix length: half the sample.
pub fn default_min_tail(len: usize) -> usize {
    (len / 2).max(1)
}

pub fn classify_net(space: &FiniteSpace, tower: &Tower, seq: &[AtomId]) -> Result<NetClass> {
    let ends = end_space(space, tower)?;
    Ok(ends.classify_net(tower, seq, default_min_tail(seq.len())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;
    use crate::space::{build_grid_space, Boundary};

    #[test]
    fn ray5_tower_is_valid_and_empty_limit() {
        let f = gallery::ray5();
        let (x, t) = (&f.space, f.tower.as_ref().unwrap());
        assert!(validate_tower(x, t).is_empty());
        let lim = limit_sets(x, t).unwrap();
        assert!(lim.limit.is_empty() && lim.bar_limit.is_empty());
        assert_eq!(end_space(x, t).unwrap().len(), 1);
    }

    #[test]
    fn reversed_levels_are_diagnosed() {
        let f = gallery::ray5();
        let mut levels = f.tower.unwrap().levels().to_vec();
        levels.reverse();
        let d = validate_tower(&f.space, &Tower::new(levels, Tail::ShrinksToEmpty));
        assert!(d.iter().any(|m| m == "level 1 not contained in level 0"), "{d:?}");
    }

    #[test]
    fn non_open_level_is_diagnosed() {
        let x = build_grid_space(&[5], &[0, 1, 2, 3, 4], Boundary::Open).unwrap();
        let t = Tower::new(vec![x.set_by_labels(&["f01"])], Tail::Stabilized);
        let d = validate_tower(&x, &t);
        assert_eq!(d.len(), 1);
        assert!(d[0].starts_with("level 0 not open"));
        assert!(matches!(limit_sets(&x, &t), Err(Error::InvalidTower(_))));
    }

    #[test]
    fn whole_tower_limits() {
        let x = build_grid_space(&[3], &[0, 1, 2], Boundary::Open).unwrap();
        let lim = limit_sets(&x, &Tower::whole(&x)).unwrap();
        assert_eq!(lim.limit, x.all());
        assert_eq!(lim.bar_limit, x.all());
    }

    #[test]
    fn interval_e0_not_injective() {
        let x = build_grid_space(&[2], &[0, 1], Boundary::Open).unwrap();
        let e = e0_analysis(&x, &Tower::whole(&x)).unwrap();
        assert_eq!(e.limit.len(), 3);
        assert!(!e.injective);
        assert_eq!(e.injectivity_witness, Some((AtomId(0), AtomId(1))));
        assert!(e.surjective);
    }

    #[test]
    fn ray5_e0_not_surjective() {
        let f = gallery::ray5();
        let e = e0_analysis(&f.space, f.tower.as_ref().unwrap()).unwrap();
        assert!(e.limit.is_empty());
        assert!(e.injective);
        assert!(!e.surjective);
        assert_eq!(e.surjectivity_witness, Some(0));
    }

    #[test]
    fn ray5_nets() {
        let f = gallery::ray5();
        let (x, t) = (&f.space, f.tower.as_ref().unwrap());
        let seq: Vec<AtomId> = ["c0", "c1", "c2", "c3", "c4", "c4"]
            .iter()
            .map(|l| x.find(l).unwrap())
            .collect();
        let c = classify_net(x, t, &seq).unwrap();
        assert!(c.pi0_net);
        assert_eq!(c.end, Some(0));
        assert_eq!(c.entry, vec![Some(0), Some(1), Some(2), Some(3)]);

        let alt: Vec<AtomId> = (0..8).map(|i| x.find(if i % 2 == 0 { "c0" } else { "c4" }).unwrap()).collect();
        let c = classify_net(x, t, &alt).unwrap();
        assert!(!c.eps_net && !c.pi0_net);
    }

    #[test]
    fn empty_sequence_is_no_net() {
        let f = gallery::ray5();
        let c = classify_net(&f.space, f.tower.as_ref().unwrap(), &[]).unwrap();
        assert!(!c.eps_net && c.branch.is_none());
    }
}
