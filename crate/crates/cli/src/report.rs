//! JSON reports. Every check result carries a `theorem` tag naming the
//! statement it tests; floats are rounded to six decimals.

use std::path::Path;

use efl_core::completion::{
    build_completion, check_c0_complete, check_compactness, check_separation, C0Verdict,
};
use efl_core::dynamics::{
    basin_decomposition, default_depth, omega0_end, r_exterior_tower, sample_walk, CellMap, OrbitSample,
};
use efl_core::externology::{e0_analysis, end_space, limit_sets, Tower};
use efl_core::flow::{duality_check, flow_completeness_report, orbit_convergence};
use efl_core::gallery;
use efl_core::ode::{build_cell_map, AnalysisConfig};
use efl_core::{AtomSet, CellId, Error, FiniteSpace, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

pub const SCHEMA: &str = "efl-report/1";

/// Checks that need a cell map rather than just a tower.
pub const NEEDS_MAP: [&str; 3] = ["thm66", "basins", "duality"];

const DEFAULT_WALKS: usize = 20;

pub struct Context {
    pub name: String,
    source: Value,
    pub space: FiniteSpace,
    pub map: Option<CellMap>,
    pub tower: Tower,
    depth: usize,
    seed: u64,
    walks: usize,
}

fn fixed(x: f64) -> Value {
    json!((x * 1e6).round() / 1e6)
}

fn labels(space: &FiniteSpace, s: &AtomSet) -> Vec<String> {
    space.labels_of(s)
}

fn cell_labels(space: &FiniteSpace, cells: &[CellId]) -> Vec<String> {
    cells.iter().map(|&c| space.cell_label(c).to_string()).collect()
}

impl Context {
    pub fn from_fixture(name: &str, n: Option<usize>, depth: Option<usize>, seed: Option<u64>) -> Result<Self> {
        let f = gallery::gallery(name, n)?;
        let param = gallery::NAMES
            .iter()
            .find(|(m, _)| *m == name)
            .and_then(|(_, p)| p.map(|(key, d)| (key, n.unwrap_or(d))));
        let mut source = json!({ "kind": "gallery", "name": name });
        if let Some((key, v)) = param {
            source[key] = json!(v);
        }
        Ok(Self::assemble(f.name, source, f.space, f.map, f.tower, depth, seed.unwrap_or(0), DEFAULT_WALKS))
    }

    /// Loads a config and builds its cell map; also returns its checks.
    pub fn from_config(path: &Path, depth: Option<usize>, seed: Option<u64>) -> Result<(Self, Vec<String>)> {
        let cfg = AnalysisConfig::from_path(path)?;
        let (space, map) = build_cell_map(&cfg.field, &cfg.grid, &cfg.approx)?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "config".into());
        let source = json!({
            "kind": "config",
            "name": name,
            "field": cfg.field.family(),
            "dim": cfg.field.dim(),
            "lower": cfg.grid.lower.iter().map(|&x| fixed(x)).collect::<Vec<_>>(),
            "upper": cfg.grid.upper.iter().map(|&x| fixed(x)).collect::<Vec<_>>(),
            "resolution": cfg.grid.resolution,
            "tau": fixed(cfg.approx.tau),
            "substeps": cfg.approx.substeps,
            "bloat": cfg.approx.bloat.map(fixed),
        });
        let depth = depth.or(cfg.analysis.depth);
        let seed = seed.unwrap_or(cfg.analysis.seed);
        let ctx = Self::assemble(name, source, space, Some(map), None, depth, seed, cfg.analysis.walks);
        Ok((ctx, cfg.analysis.checks))
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        name: String,
        source: Value,
        space: FiniteSpace,
        map: Option<CellMap>,
        tower: Option<Tower>,
        depth: Option<usize>,
        seed: u64,
        walks: usize,
    ) -> Self {
        let depth = depth.unwrap_or_else(|| map.as_ref().map_or(1, default_depth));
        let tower = tower.unwrap_or_else(|| r_exterior_tower(&space, map.as_ref().expect("fixtures have a map or a tower"), depth));
        Context {
            name,
            source,
            space,
            map,
            tower,
            depth,
            seed,
            walks,
        }
    }

    fn map(&self) -> &CellMap {
        self.map.as_ref().expect("callers check NEEDS_MAP")
    }

    pub fn document(&self, results: Vec<(&str, Value)>) -> Value {
        let mut out = serde_json::Map::new();
        for (k, v) in results {
            out.insert(k.to_string(), v);
        }
        json!({
            "schema": SCHEMA,
            "fixture": self.source,
            "space": { "atoms": self.space.len(), "tops": self.space.num_tops() },
            "tower": {
                "levels": self.tower.levels().iter().map(AtomSet::len).collect::<Vec<_>>(),
                "tail": self.tower.tail().as_str(),
            },
            "results": out,
        })
    }

    pub fn check(&self, name: &str) -> Result<Value> {
        match name {
            "ends" => self.ends(),
            "limits" => self.limits(),
            "complete" => self.complete(),
            "thm66" => self.thm66(),
            "separation" => self.separation(),
            "compactness" => self.compactness(),
            "basins" => self.basins(),
            "duality" => self.duality(),
            other => Err(Error::Config {
                key: "analysis.checks".into(),
                message: format!("unknown check `{other}`"),
            }),
        }
    }

    fn ends(&self) -> Result<Value> {
        let ends = end_space(&self.space, &self.tower)?;
        let last = ends.last_level();
        let list: Vec<Value> = (0..ends.len())
            .map(|a| {
                json!({
                    "index": a,
                    "branch": ends.ends[a].branch,
                    "component": labels(&self.space, ends.branch_component(a, last)),
                })
            })
            .collect();
        Ok(json!({
            "theorem": "end-space-inverse-limit",
            "count": ends.len(),
            "components_per_level": ends.tree.levels().iter().map(|p| p.len()).collect::<Vec<_>>(),
            "bonding_image_sizes": (1..ends.tree.depth()).map(|k| ends.tree.bonding_image_size(k)).collect::<Vec<_>>(),
            "ends": list,
        }))
    }

    fn limits(&self) -> Result<Value> {
        let l = limit_sets(&self.space, &self.tower)?;
        let e = e0_analysis(&self.space, &self.tower)?;
        let sp = &self.space;
        Ok(json!({
            "theorem": "limit-space-e0",
            "limit": labels(sp, &l.limit),
            "bar_limit": labels(sp, &l.bar_limit),
            "e0": {
                "injective": e.injective,
                "injectivity_witness": e.injectivity_witness.map(|(x, y)| [sp.label(x), sp.label(y)]),
                "surjective": e.surjective,
                "surjectivity_witness": e.surjectivity_witness,
                "fibers": e.fibers.iter().map(|f| labels(sp, f)).collect::<Vec<_>>(),
            },
        }))
    }

    fn complete(&self) -> Result<Value> {
        let verdict = check_c0_complete(&self.space, &self.tower)?;
        let c = build_completion(&self.space, &self.tower)?;
        let recheck = check_c0_complete(c.carrier(), c.induced_tower())?;
        let glued: Vec<&str> = (0..c.num_ends()).map(|a| c.carrier().label(c.incl0(a))).collect();
        Ok(json!({
            "theorem": "c0-completeness",
            "complete": verdict.is_complete(),
            "failure": verdict_json(&self.space, &verdict),
            "completion": {
                "points": c.carrier().len(),
                "interior_points": c.carrier().len() - c.num_ends(),
                "ends_added": c.num_ends(),
                "glued": glued,
                "limit_removed": labels(&self.space, c.limit()),
                "basis_size": c.basis().len(),
                "basis_closed_under_intersection": c.basis_is_closed(),
                "completion_is_complete": recheck.is_complete(),
            },
        }))
    }

    fn thm66(&self) -> Result<Value> {
        let sp = &self.space;
        let r = flow_completeness_report(sp, self.map(), self.depth)?;
        let a = &r.limit_attraction;
        Ok(json!({
            "theorem": "flow-completeness-stone-limit",
            "complete": r.complete(),
            "failure": verdict_json(sp, &r.verdict),
            "stone": r.stone,
            "stone_note": r.stone_note,
            "ends": r.num_ends,
            "critical": cell_labels(sp, &r.critical),
            "periodic": r.periodic.len(),
            "poisson": r.poisson.len(),
            "omega": r.omega.len(),
            "omega_closure_atoms": r.omega_closure.len(),
            "limit_atoms": r.limit.len(),
            "bar_limit_atoms": r.bar_limit.len(),
            "limit_eq_critical": r.limit_eq_critical,
            "critical_eq_periodic": r.critical_eq_periodic,
            "critical_eq_omega_closure": r.critical_eq_omega_closure,
            "bar_limit_eq_omega_closure": r.bar_limit_eq_omega_closure,
            "inclusion_chain": r.chain_ok,
            "limit_attraction": {
                "weak_region": a.weak_region.len(),
                "strong_region": a.strong_region.len(),
                "weak_attractor": a.is_weak_attractor,
                "attractor": a.is_attractor,
                "global_weak": a.is_global_weak,
                "global": a.is_global,
            },
            "consistent": r.consistent,
            "reasons": r.reasons,
        }))
    }

    fn separation(&self) -> Result<Value> {
        let s = check_separation(&self.space, &self.tower)?;
        let stuck: Vec<&str> = s.escape.iter().filter(|e| !e.1).map(|e| self.space.label(e.0)).collect();
        Ok(json!({
            "theorem": "completion-hausdorff",
            "ends_separated": s.ends_separated,
            "escape_failures": stuck,
            "hausdorff": s.hausdorff_ok,
            "closed_discrete_limit_applicable": s.completeex_applicable,
        }))
    }

    fn compactness(&self) -> Result<Value> {
        let k = check_compactness(&self.space, &self.tower)?;
        Ok(json!({
            "theorem": "completion-compact",
            "bonding_image_sizes": k.bonding_image_sizes,
            "end_cover": k.end_cover_ok,
            "connected": k.connected,
            "escape_all": k.escape_all,
            "cocompact_levels": k.cocompact_levels,
            "ends": k.num_ends,
            "compact": k.compact_conclusion,
        }))
    }

    fn basins(&self) -> Result<Value> {
        let sp = &self.space;
        let map = self.map();
        let b = basin_decomposition(sp, map, &self.tower)?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let steps = 4 * map.len();
        let walks: Vec<Value> = (0..self.walks)
            .map(|i| {
                let start = CellId((i % map.len()) as u32);
                let w = sample_walk(map, start, steps, &mut rng);
                let end = omega0_end(sp, &self.tower, &w).map(|e| e.last());
                json!({
                    "start": sp.cell_label(start),
                    "length": w.walk.len(),
                    "exited": w.exited,
                    "end": end.as_ref().ok(),
                    "error": end.err().map(|e| e.kind()),
                })
            })
            .collect();
        Ok(json!({
            "theorem": "trajectory-end-basins",
            "seed": self.seed,
            "basins": b.basins.iter().map(|c| cell_labels(sp, c)).collect::<Vec<_>>(),
            "ambiguous": cell_labels(sp, &b.ambiguous),
            "walks": walks,
        }))
    }

    fn duality(&self) -> Result<Value> {
        let sp = &self.space;
        let d = duality_check(sp, self.map(), self.depth)?;
        let roles: Vec<Value> = d
            .roles
            .iter()
            .map(|r| json!({ "cells": cell_labels(sp, &r.cells), "forward": r.forward.as_str(), "reversed": r.reversed.as_str() }))
            .collect();
        Ok(json!({
            "theorem": "reversed-flow-duality",
            "carrier_isomorphic": d.carrier_isomorphic,
            "reverse_involutive": d.reverse_involutive,
            "right_limit": cell_labels(sp, &d.right_limit),
            "left_limit": cell_labels(sp, &d.left_limit),
            "right_limit_attracts": d.right_limit_attracts,
            "right_limit_is_source_reversed": d.right_limit_is_source_reversed,
            "roles": roles,
            "basin_sizes_forward": d.basin_sizes_forward,
            "basin_sizes_reversed": d.basin_sizes_reversed,
            "ambiguous_forward": d.ambiguous_forward,
            "ambiguous_reversed": d.ambiguous_reversed,
        }))
    }

    pub fn orbit(&self, start: CellId, steps: usize) -> Result<Value> {
        let sp = &self.space;
        let Some(map) = &self.map else {
            return Err(Error::InvalidMap(format!("{} has no map to walk", self.name)));
        };
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let w: OrbitSample = sample_walk(map, start, steps, &mut rng);
        let conv = orbit_convergence(sp, &self.tower, &w)?;
        Ok(json!({
            "theorem": "orbit-pi0-net",
            "seed": self.seed,
            "walk": cell_labels(sp, &w.walk),
            "exited": w.exited,
            "end": conv.end,
            "branch": conv.branch.branch,
            "pi0_net": conv.is_pi0_net,
            "converges": conv.converges,
        }))
    }
}

fn verdict_json(space: &FiniteSpace, v: &C0Verdict) -> Value {
    match v {
        C0Verdict::Complete => Value::Null,
        C0Verdict::Fails(f) => json!({ "kind": f.kind(), "reason": f.describe(space) }),
    }
}
