//! Graphviz exports.

use std::fmt::Write;

use efl_core::dynamics::{classify_cells, CellMap};
use efl_core::externology::{end_space, Tower};
use efl_core::{FiniteSpace, Result};

/// Components of every level as nodes, bonding maps as edges, and one
/// `end*` node per end hanging off its last-level component.
pub fn component_tree(space: &FiniteSpace, tower: &Tower) -> Result<String> {
    let ends = end_space(space, tower)?;
    let tree = &ends.tree;
    let mut s = String::from("digraph ends {\n  rankdir=TB;\n  node [shape=box];\n");
    for k in 0..tree.depth() {
        for (i, block) in tree.level(k).blocks().iter().enumerate() {
            let rep = space.label(tree.level(k).label(i));
            writeln!(s, "  L{k}_{i} [label=\"E{k}: {rep} ({})\"];", block.len()).unwrap();
            if let Some(p) = tree.parent(k, i) {
                writeln!(s, "  L{}_{p} -> L{k}_{i};", k - 1).unwrap();
            }
        }
    }
    let last = ends.last_level();
    for (a, e) in ends.ends.iter().enumerate() {
        writeln!(s, "  end{a} [shape=doublecircle, label=\"end {a}\"];").unwrap();
        writeln!(s, "  L{last}_{} -> end{a} [style=dashed];", e.last()).unwrap();
    }
    s.push_str("}\n");
    Ok(s)
}

/// Top cells and their images; critical cells are boxes, Exit goes to a
/// single `exit` node.
pub fn dynamics(space: &FiniteSpace, map: &CellMap) -> String {
    let critical = classify_cells(map).critical;
    let mut s = String::from("digraph dynamics {\n");
    for c in map.cells() {
        let shape = if critical.binary_search(&c).is_ok() { "box" } else { "ellipse" };
        writeln!(s, "  n{} [label=\"{}\", shape={shape}];", c.0, space.cell_label(c)).unwrap();
    }
    let mut any_exit = false;
    for c in map.cells() {
        for d in map.successors(c) {
            writeln!(s, "  n{} -> n{};", c.0, d.0).unwrap();
        }
        if map.exits(c) {
            any_exit = true;
            writeln!(s, "  n{} -> exit;", c.0).unwrap();
        }
    }
    if any_exit {
        s.push_str("  exit [shape=point];\n");
    }
    s.push_str("}\n");
    s
}
