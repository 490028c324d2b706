//! Shared graph helpers: Tarjan's strongly connected components.

/// Tarjan SCC on an adjacency list. Components are returned in reverse
/// topological order (every edge between components points from a later to an
/// earlier entry of the result).
pub fn tarjan_scc(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut state = Tarjan {
        index: 0,
        stack: Vec::new(),
        on_stack: vec![false; n],
        idx: vec![usize::MAX; n],
        low: vec![0; n],
        comps: Vec::new(),
    };
    for v in 0..n {
        if state.idx[v] == usize::MAX {
            state.visit(v, adj);
        }
    }
    state.comps
}

struct Tarjan {
    index: usize,
    stack: Vec<usize>,
    on_stack: Vec<bool>,
    idx: Vec<usize>,
    low: Vec<usize>,
    comps: Vec<Vec<usize>>,
}

impl Tarjan {
    // Iterative to keep deep product graphs off the call stack.
    fn visit(&mut self, root: usize, adj: &[Vec<usize>]) {
        let mut work: Vec<(usize, usize)> = vec![(root, 0)];
        while let Some(&mut (v, ref mut ei)) = work.last_mut() {
            if *ei == 0 {
                self.idx[v] = self.index;
                self.low[v] = self.index;
                self.index += 1;
                self.stack.push(v);
                self.on_stack[v] = true;
            }
            if *ei < adj[v].len() {
                let w = adj[v][*ei];
                *ei += 1;
                if self.idx[w] == usize::MAX {
                    work.push((w, 0));
                } else if self.on_stack[w] {
                    self.low[v] = self.low[v].min(self.idx[w]);
                }
            } else {
                work.pop();
                if let Some(&(parent, _)) = work.last() {
                    self.low[parent] = self.low[parent].min(self.low[v]);
                }
                if self.low[v] == self.idx[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = self.stack.pop().expect("tarjan stack underflow");
                        self.on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    self.comps.push(comp);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_cycles_and_a_bridge() {
        // 0 <-> 1 -> 2 <-> 3, 4 isolated
        let adj = vec![vec![1], vec![0, 2], vec![3], vec![2], vec![]];
        let mut comps = tarjan_scc(&adj);
        comps.sort();
        assert_eq!(comps, vec![vec![0, 1], vec![2, 3], vec![4]]);
    }

    #[test]
    fn reverse_topological_order() {
        let adj = vec![vec![1], vec![2], vec![]];
        let comps = tarjan_scc(&adj);
        assert_eq!(comps, vec![vec![2], vec![1], vec![0]]);
    }
}
