//! Completions of cell-map flows and the checks relating completeness to
//! the dynamics.

use crate::completion::{build_completion, check_c0_complete, isomorphic_by_labels, C0Verdict, Completion, Point};
use crate::dynamics::{
    attraction_analysis, basin_decomposition, classify_cells, omega0_with, r_exterior_tower, reverse, AttractionReport,
    CellMap, OrbitSample,
};
use crate::error::Result;
use crate::externology::{end_space, limit_sets, EndPoint, Tail, Tower};
use crate::space::{AtomSet, CellId, FiniteSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Forward time.
    Right,
    /// Backward time: the tower comes from the reversed map.
    Left,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Right => "r",
            Direction::Left => "l",
        }
    }
}

#[derive(Clone, Debug)]
pub struct FlowCompletion {
    pub direction: Direction,
    pub completion: Completion,
    /// Map on the top cells of the carrier.
    pub map: CellMap,
}

impl FlowCompletion {
    pub fn tower(&self) -> &Tower {
        self.completion.tower()
    }

    /// Carrier cell of a top cell of the original space.
    pub fn p0_cell(&self, space: &FiniteSpace, c: CellId) -> CellId {
        self.completion
            .carrier()
            .cell_of(self.completion.p0(space.top_atom(c)))
            .expect("p0 sends top cells to top cells")
    }

    pub fn end_cell(&self, a: usize) -> CellId {
        self.completion
            .carrier()
            .cell_of(self.completion.incl0(a))
            .expect("glued ends are top cells")
    }
}

/// Absorbing tower of `map` in the given direction.
pub fn flow_tower(space: &FiniteSpace, map: &CellMap, direction: Direction, max_depth: usize) -> Tower {
    match direction {
        Direction::Right => r_exterior_tower(space, map, max_depth),
        Direction::Left => r_exterior_tower(space, &reverse(map), max_depth),
    }
}

/// Completes the flow and induces the map on the carrier: interior cells
/// follow `p₀ ∘ map`, Exit stays Exit, and ends are fixed.
pub fn complete_flow(space: &FiniteSpace, map: &CellMap, direction: Direction, max_depth: usize) -> Result<FlowCompletion> {
    let tower = flow_tower(space, map, direction, max_depth);
    let completion = build_completion(space, &tower)?;
    let carrier = completion.carrier();
    let mut images = vec![Vec::new(); carrier.num_tops()];
    let mut exits = vec![false; carrier.num_tops()];
    for (i, &t) in carrier.tops().iter().enumerate() {
        match completion.point(t) {
            Point::Glued(_) => images[i].push(CellId(i as u32)),
            Point::Interior(x) => {
                let c = space.cell_of(x).expect("interior tops come from tops");
                for &d in map.successors(c) {
                    images[i].push(carrier.cell_of(completion.p0(space.top_atom(d))).expect("top"));
                }
                exits[i] = map.exits(c);
            }
        }
    }
    let induced = CellMap::for_space(carrier, images, exits)?;
    Ok(FlowCompletion {
        direction,
        completion,
        map: induced,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Convergence {
    pub is_pi0_net: bool,
    pub end: usize,
    pub branch: EndPoint,
    pub converges: bool,
    /// Per level, the index from which the walk stays in `p₀⁻¹(W₀(C_k))`.
    pub witness_levels: Vec<Option<usize>>,
}

/// Convergence of `p₀` of a walk to its end in the completion: the walk must
/// eventually stay in every minimal basis neighborhood `W₀(C_k(a))` of the end.
pub fn orbit_convergence(space: &FiniteSpace, tower: &Tower, walk: &OrbitSample) -> Result<Convergence> {
    let completion = build_completion(space, tower)?;
    convergence_in(&completion, space, walk)
}

pub(crate) fn convergence_in(completion: &Completion, space: &FiniteSpace, walk: &OrbitSample) -> Result<Convergence> {
    let ends = completion.ends();
    let tower = completion.tower();
    let branch = omega0_with(space, tower, ends, walk)?;
    let end = branch.last();
    let image: Vec<_> = walk.walk.iter().map(|&c| completion.p0(space.top_atom(c))).collect();
    let min_tail = walk.min_tail();
    let mut witness_levels = Vec::with_capacity(tower.len());
    let mut converges = true;
    for k in 0..tower.len() {
        let nbhd = completion.w0(ends.branch_component(end, k), k)?;
        let mut i = image.len();
        while i > 0 && nbhd.contains(image[i - 1]) {
            i -= 1;
        }
        let entry = (i < image.len()).then_some(i);
        converges &= entry.is_some_and(|i| image.len() - i >= min_tail);
        witness_levels.push(entry);
    }
    let class = ends.classify_net(tower, &walk.atoms(space), min_tail);
    Ok(Convergence {
        is_pi0_net: class.pi0_net,
        end,
        branch,
        converges,
        witness_levels,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowCompletenessReport {
    pub tower: Tower,
    pub verdict: C0Verdict,
    pub num_ends: usize,
    pub critical: Vec<CellId>,
    pub periodic: Vec<CellId>,
    pub poisson: Vec<CellId>,
    pub omega: Vec<CellId>,
    /// `closure(Ω)` as atoms.
    pub omega_closure: AtomSet,
    pub limit: AtomSet,
    pub bar_limit: AtomSet,
    pub limit_eq_critical: bool,
    pub critical_eq_periodic: bool,
    /// `C = closure(Ω)` compared on top cells.
    pub critical_eq_omega_closure: bool,
    pub bar_limit_eq_omega_closure: bool,
    pub stone: bool,
    pub stone_note: Option<String>,
    pub chain_ok: bool,
    pub limit_attraction: AttractionReport,
    /// `complete ⇔ (C = closure(Ω) ∧ stone)`.
    pub consistent: bool,
    pub reasons: Vec<String>,
}

impl FlowCompletenessReport {
    pub fn complete(&self) -> bool {
        self.verdict.is_complete()
    }
}

fn subset(a: &[CellId], b: &[CellId]) -> bool {
    a.iter().all(|c| b.binary_search(c).is_ok())
}

/// Completeness of the absorbing tower of `map` against its recurrence
/// structure, with the profinite ("Stone") surrogate for the end space.
pub fn flow_completeness_report(space: &FiniteSpace, map: &CellMap, max_depth: usize) -> Result<FlowCompletenessReport> {
    let tower = r_exterior_tower(space, map, max_depth);
    let verdict = check_c0_complete(space, &tower)?;
    let limits = limit_sets(space, &tower)?;
    let ends = end_space(space, &tower)?;
    let classes = classify_cells(map);

    let omega_atoms = space.cells_to_atoms(classes.omega.iter().copied());
    let omega_closure = space.closure(&omega_atoms);
    let omega_closure_tops = space.cells_in(&omega_closure);
    let limit_cells = space.cells_in(&limits.limit);

    let limit_parts = space.components(&limits.limit);
    let multi_cell = limit_parts.blocks().iter().any(|b| b.len() > 1);
    let last = ends.last_level();
    let bonding_bijective = match tower.tail() {
        Tail::Stabilized if last > 0 => {
            let tree = &ends.tree;
            tree.bonding_image_size(last) == tree.level(last).len() && tree.level(last).len() == tree.level(last - 1).len()
        }
        Tail::Stabilized => true,
        Tail::ShrinksToEmpty => false,
    };
    let stone = ends.len() == limit_parts.len() && bonding_bijective && !multi_cell;
    let stone_note = match () {
        _ if stone => None,
        _ if multi_cell => Some("stone: false (multi-cell component)".to_string()),
        _ if ends.len() != limit_parts.len() => Some(format!(
            "stone: false ({} ends but {} limit components)",
            ends.len(),
            limit_parts.len()
        )),
        _ => Some("stone: false (bonding maps not bijective at stabilization)".to_string()),
    };

    let chain_ok = subset(&classes.critical, &classes.periodic)
        && subset(&classes.periodic, &classes.poisson)
        && subset(&classes.poisson, &classes.omega)
        && subset(&classes.omega, &omega_closure_tops);
    let critical_eq_omega_closure = classes.critical == omega_closure_tops;
    let limit_attraction = attraction_analysis(space, map, &limit_cells);

    let mut reasons = Vec::new();
    if let C0Verdict::Fails(f) = &verdict {
        reasons.push(f.describe(space));
    }
    if !critical_eq_omega_closure {
        reasons.push("C != cl(Omega)".to_string());
    }
    if let Some(note) = &stone_note {
        reasons.push(note.clone());
    }
    Ok(FlowCompletenessReport {
        num_ends: ends.len(),
        limit_eq_critical: limits.limit == space.cells_to_atoms(classes.critical.iter().copied()),
        critical_eq_periodic: classes.critical == classes.periodic,
        critical_eq_omega_closure,
        bar_limit_eq_omega_closure: limits.bar_limit == omega_closure,
        consistent: verdict.is_complete() == (critical_eq_omega_closure && stone),
        tower,
        verdict,
        critical: classes.critical,
        periodic: classes.periodic,
        poisson: classes.poisson,
        omega: classes.omega,
        omega_closure,
        limit: limits.limit,
        bar_limit: limits.bar_limit,
        stone,
        stone_note,
        chain_ok,
        limit_attraction,
        reasons,
    })
}

/// Dynamical role of a set of cells under a map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    /// Attracts under the map.
    Attractor,
    /// Attracts under the reversed map.
    Repeller,
    Both,
    Neither,
}

impl Role {
    fn of(space: &FiniteSpace, map: &CellMap, rev: &CellMap, cells: &[CellId]) -> Role {
        let fwd = attraction_analysis(space, map, cells).is_attractor;
        let bwd = attraction_analysis(space, rev, cells).is_attractor;
        match (fwd, bwd) {
            (true, true) => Role::Both,
            (true, false) => Role::Attractor,
            (false, true) => Role::Repeller,
            (false, false) => Role::Neither,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Role::Attractor => "attractor",
            Role::Repeller => "repeller",
            Role::Both => "attractor-repeller",
            Role::Neither => "neither",
        }
    }
}

/// Roles of one end's limit cells under the map and its reversal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndRole {
    pub cells: Vec<CellId>,
    pub forward: Role,
    pub reversed: Role,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualityReport {
    /// Left completion of `map` and right completion of `reverse(map)` agree.
    pub carrier_isomorphic: bool,
    pub reverse_involutive: bool,
    pub right_limit: Vec<CellId>,
    pub left_limit: Vec<CellId>,
    /// The right limit attracts under `map`.
    pub right_limit_attracts: bool,
    /// Every cell is reachable from the right limit under `reverse(map)`.
    pub right_limit_is_source_reversed: bool,
    /// Per right-tower end.
    pub roles: Vec<EndRole>,
    /// Basin sizes per right-tower end under `map` and under `reverse(map)`.
    pub basin_sizes_forward: Vec<usize>,
    pub basin_sizes_reversed: Vec<usize>,
    pub ambiguous_forward: usize,
    pub ambiguous_reversed: usize,
}

pub fn duality_check(space: &FiniteSpace, map: &CellMap, max_depth: usize) -> Result<DualityReport> {
    let rev = reverse(map);
    let left = complete_flow(space, map, Direction::Left, max_depth)?;
    let right_of_rev = complete_flow(space, &rev, Direction::Right, max_depth)?;
    let carrier_isomorphic = isomorphic_by_labels(left.completion.carrier(), right_of_rev.completion.carrier())
        && left.tower() == right_of_rev.tower();
    let reverse_involutive = reverse(&rev).edges().eq(map.edges());

    let right_tower = flow_tower(space, map, Direction::Right, max_depth);
    let right_limit_atoms = limit_sets(space, &right_tower)?.limit;
    let right_limit = space.cells_in(&right_limit_atoms);
    let left_limit = space.cells_in(&limit_sets(space, left.tower())?.limit);
    let right_limit_attracts = attraction_analysis(space, map, &right_limit).is_attractor;
    let mut seeds = vec![false; map.len()];
    for c in &right_limit {
        seeds[c.index()] = true;
    }
    let right_limit_is_source_reversed = !right_limit.is_empty() && rev.forward_closure(&seeds).iter().all(|&b| b);

    let ends = end_space(space, &right_tower)?;
    let roles = (0..ends.len())
        .map(|a| {
            let comp = ends.branch_component(a, ends.last_level());
            let cells = space.cells_in(&comp.intersection(&right_limit_atoms));
            EndRole {
                forward: Role::of(space, map, &rev, &cells),
                reversed: Role::of(space, &rev, map, &cells),
                cells,
            }
        })
        .collect();

    let fwd = basin_decomposition(space, map, &right_tower)?;
    let bwd = basin_decomposition(space, &rev, &right_tower)?;
    Ok(DualityReport {
        carrier_isomorphic,
        reverse_involutive,
        right_limit,
        left_limit,
        right_limit_attracts,
        right_limit_is_source_reversed,
        roles,
        basin_sizes_forward: fwd.basins.iter().map(Vec::len).collect(),
        basin_sizes_reversed: bwd.basins.iter().map(Vec::len).collect(),
        ambiguous_forward: fwd.ambiguous.len(),
        ambiguous_reversed: bwd.ambiguous.len(),
    })
}
