use super::CellMap;
use crate::space::CellId;

/// Strongly connected components of a cell map, in reverse topological
/// order (every edge goes from a component to one with a smaller or equal index).
#[derive(Clone, Debug)]
pub struct Condensation {
    component: Vec<u32>,
    members: Vec<Vec<CellId>>,
    cyclic: Vec<bool>,
    successors: Vec<Vec<u32>>,
}

impl Condensation {
    /// Iterative Tarjan.
    pub fn new(map: &CellMap) -> Self {
        const UNSEEN: u32 = u32::MAX;
        let n = map.len();
        let mut index = vec![UNSEEN; n];
        let mut low = vec![0u32; n];
        let mut on_stack = vec![false; n];
        let mut stack: Vec<u32> = Vec::new();
        let mut component = vec![UNSEEN; n];
        let mut members: Vec<Vec<CellId>> = Vec::new();
        let mut next = 0u32;
        // (node, position in its successor list)
        let mut call: Vec<(u32, usize)> = Vec::new();

        for root in 0..n as u32 {
            if index[root as usize] != UNSEEN {
                continue;
            }
            call.push((root, 0));
            index[root as usize] = next;
            low[root as usize] = next;
            next += 1;
            stack.push(root);
            on_stack[root as usize] = true;

            while let Some(&mut (v, ref mut pos)) = call.last_mut() {
                let succ = map.successors(CellId(v));
                if *pos < succ.len() {
                    let w = succ[*pos].0;
                    *pos += 1;
                    if index[w as usize] == UNSEEN {
                        index[w as usize] = next;
                        low[w as usize] = next;
                        next += 1;
                        stack.push(w);
                        on_stack[w as usize] = true;
                        call.push((w, 0));
                    } else if on_stack[w as usize] {
                        low[v as usize] = low[v as usize].min(index[w as usize]);
                    }
                    continue;
                }
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent as usize] = low[parent as usize].min(low[v as usize]);
                }
                if low[v as usize] == index[v as usize] {
                    let id = members.len() as u32;
                    let mut block = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w as usize] = false;
                        component[w as usize] = id;
                        block.push(CellId(w));
                        if w == v {
                            break;
                        }
                    }
                    block.sort_unstable();
                    members.push(block);
                }
            }
        }

        let mut cyclic = vec![false; members.len()];
        let mut successors = vec![Vec::new(); members.len()];
        for (c, d) in map.edges() {
            let (a, b) = (component[c.index()], component[d.index()]);
            if a == b {
                cyclic[a as usize] = true;
            } else {
                successors[a as usize].push(b);
            }
        }
        for s in successors.iter_mut() {
            s.sort_unstable();
            s.dedup();
        }
        Condensation {
            component,
            members,
            cyclic,
            successors,
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn component_of(&self, c: CellId) -> usize {
        self.component[c.index()] as usize
    }

    pub fn members(&self, s: usize) -> &[CellId] {
        &self.members[s]
    }

    /// Whether component `s` carries a cycle (a self-loop counts).
    pub fn is_cyclic(&self, s: usize) -> bool {
        self.cyclic[s]
    }

    pub fn successors(&self, s: usize) -> impl Iterator<Item = usize> + '_ {
        self.successors[s].iter().map(|&t| t as usize)
    }

    /// Evaluates a bottom-up recurrence over the component DAG: `f(s, results
    /// of successors)` is called after all successors of `s` are done.
    pub fn fold_up<T: Clone>(&self, mut f: impl FnMut(usize, &[&T]) -> T) -> Vec<T> {
        let mut out: Vec<T> = Vec::with_capacity(self.len());
        for s in 0..self.len() {
            let succ: Vec<&T> = self.successors[s].iter().map(|&t| &out[t as usize]).collect();
            let value = f(s, &succ);
            out.push(value);
        }
        out
    }
}
