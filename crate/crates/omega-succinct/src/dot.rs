//! DOT rendering of automata (exchange format only; HOA is authoritative).

use crate::automaton::Automaton;

pub fn to_dot(a: &Automaton, name: &str) -> String {
    let mut out = format!("digraph \"{name}\" {{\n  rankdir=LR;\n  init [shape=point];\n");
    for q in 0..a.num_states() {
        let shape = if a.finals.contains(&q) {
            "doublecircle"
        } else {
            "circle"
        };
        out.push_str(&format!("  q{q} [shape={shape}, label=\"{q}\"];\n"));
    }
    out.push_str(&format!("  init -> q{};\n", a.initial));
    for q in 0..a.num_states() {
        // Merge parallel edges into one label per target.
        let mut per_target: std::collections::BTreeMap<usize, Vec<char>> =
            std::collections::BTreeMap::new();
        for s in 0..a.alphabet.len() {
            for &t in a.successors(q, s) {
                per_target.entry(t).or_default().push(a.alphabet.symbol(s));
            }
        }
        for (t, labels) in per_target {
            let label: String = labels
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(",");
            out.push_str(&format!("  q{q} -> q{t} [label=\"{label}\"];\n"));
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use crate::families;

    #[test]
    fn gn_dot_has_one_node_per_state() {
        let g3 = families::build_gn(3).unwrap();
        let dot = super::to_dot(&g3, "gn");
        assert_eq!(dot.matches("shape=circle").count() + dot.matches("shape=doublecircle").count(), 5);
    }
}
