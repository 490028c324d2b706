//! Determinization, completion, minimization and boolean operations for
//! finite-word automata.
//!
//! Index layouts are deterministic so that structural equality is meaningful:
//! subset construction numbers subsets in BFS discovery order (symbols
//! processed in alphabet order), completion appends the sink as the last
//! state, minimization numbers blocks by BFS from the initial block, and the
//! product constructions use row-major `(i1, i2)` layout.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::alphabet::Word;
use crate::automaton::{AcceptanceMode, Automaton};
use crate::error::{Error, Result};

/// Standard subset construction, restricted to the reachable subsets.
///
/// The empty subset is never materialized: transitions whose image is empty
/// are left blocking, so the result is deterministic but not necessarily
/// complete. A subset is final iff it contains a final state of the input.
pub fn subset_construction(a: &Automaton) -> Result<Automaton> {
    if a.mode != AcceptanceMode::Finite {
        return Err(Error::contract(
            "subset construction is defined for finite acceptance mode",
        ));
    }
    let k = a.alphabet.len();
    let start: BTreeSet<usize> = BTreeSet::from([a.initial]);
    let mut index: BTreeMap<BTreeSet<usize>, usize> = BTreeMap::new();
    let mut order: Vec<BTreeSet<usize>> = Vec::new();
    let mut edges: Vec<Vec<Option<usize>>> = Vec::new();
    index.insert(start.clone(), 0);
    order.push(start);
    let mut head = 0;
    while head < order.len() {
        let current = order[head].clone();
        let mut row = vec![None; k];
        for s in 0..k {
            let mut image = BTreeSet::new();
            for &q in &current {
                image.extend(a.successors(q, s).iter().copied());
            }
            if image.is_empty() {
                continue;
            }
            let next = *index.entry(image.clone()).or_insert_with(|| {
                order.push(image);
                order.len() - 1
            });
            row[s] = Some(next);
        }
        edges.push(row);
        head += 1;
    }

    let finals: Vec<usize> = order
        .iter()
        .enumerate()
        .filter(|(_, set)| set.iter().any(|q| a.finals.contains(q)))
        .map(|(i, _)| i)
        .collect();
    let mut out = Automaton::new(
        a.alphabet.clone(),
        order.len(),
        0,
        finals,
        AcceptanceMode::Finite,
    )?;
    for (i, row) in edges.iter().enumerate() {
        for (s, target) in row.iter().enumerate() {
            if let Some(t) = target {
                out.add_edge(i, a.alphabet.symbol(s), *t)?;
            }
        }
    }
    Ok(out)
}

/// Make the transition map total by routing every blocking pair to a fresh
/// non-final sink. A complete input is returned unchanged. The language is
/// preserved in both acceptance modes.
pub fn complete_with_sink(a: &Automaton) -> Automaton {
    if a.is_complete() {
        return a.clone();
    }
    let n = a.num_states();
    let sink = n;
    let mut out = Automaton::new(
        a.alphabet.clone(),
        n + 1,
        a.initial,
        a.finals.iter().copied(),
        a.mode,
    )
    .expect("completion preserves validity");
    for q in 0..n {
        for s in 0..a.alphabet.len() {
            let targets = a.successors(q, s);
            if targets.is_empty() {
                out.add_edge(q, a.alphabet.symbol(s), sink).unwrap();
            } else {
                for &t in targets {
                    out.add_edge(q, a.alphabet.symbol(s), t).unwrap();
                }
            }
        }
    }
    for s in 0..a.alphabet.len() {
        out.add_edge(sink, a.alphabet.symbol(s), sink).unwrap();
    }
    out
}

fn require_dfa(a: &Automaton, op: &str) -> Result<()> {
    if a.mode != AcceptanceMode::Finite {
        return Err(Error::contract(format!("{op} requires finite acceptance mode")));
    }
    if !a.is_deterministic() {
        return Err(Error::contract(format!("{op} requires a deterministic automaton")));
    }
    if !a.is_complete() {
        return Err(Error::contract(format!(
            "{op} requires a complete automaton (apply sink completion first)"
        )));
    }
    Ok(())
}

/// Hopcroft partition refinement. The result is the canonical minimal DFA of
/// the input's language; states are numbered by BFS from the initial block.
pub fn hopcroft_minimize(d: &Automaton) -> Result<Automaton> {
    require_dfa(d, "minimization")?;
    let k = d.alphabet.len();
    let reachable = d.reachable_states();

    // Restrict to the reachable part before refining.
    let reach: Vec<usize> = reachable.iter().copied().collect();
    let dense: BTreeMap<usize, usize> = reach.iter().enumerate().map(|(i, &q)| (q, i)).collect();
    let m = reach.len();
    let mut preds: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); k]; m];
    let mut succ: Vec<Vec<usize>> = vec![vec![0; k]; m];
    for (i, &q) in reach.iter().enumerate() {
        for s in 0..k {
            let t = dense[&d.step(q, s).expect("complete dfa")];
            succ[i][s] = t;
            preds[t][s].push(i);
        }
    }
    let finals: BTreeSet<usize> = reach
        .iter()
        .enumerate()
        .filter(|(_, q)| d.finals.contains(q))
        .map(|(i, _)| i)
        .collect();

    let mut block_of: Vec<usize> = (0..m)
        .map(|i| if finals.contains(&i) { 0 } else { 1 })
        .collect();
    let mut blocks: Vec<BTreeSet<usize>> = vec![
        finals.clone(),
        (0..m).filter(|i| !finals.contains(i)).collect(),
    ];
    blocks.retain(|b| !b.is_empty());
    if blocks.len() == 1 {
        block_of.iter_mut().for_each(|b| *b = 0);
    } else {
        for (bi, b) in blocks.iter().enumerate() {
            for &q in b {
                block_of[q] = bi;
            }
        }
    }

    let mut worklist: VecDeque<(usize, usize)> = VecDeque::new();
    for s in 0..k {
        for bi in 0..blocks.len() {
            worklist.push_back((bi, s));
        }
    }
    while let Some((bi, s)) = worklist.pop_front() {
        let splitter: Vec<usize> = blocks[bi].iter().copied().collect();
        let mut incoming: BTreeSet<usize> = BTreeSet::new();
        for &q in &splitter {
            incoming.extend(preds[q][s].iter().copied());
        }
        // Group the predecessors by their current block and split.
        let mut touched: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for &p in &incoming {
            touched.entry(block_of[p]).or_default().insert(p);
        }
        for (b, inside) in touched {
            if inside.len() == blocks[b].len() {
                continue;
            }
            let outside: BTreeSet<usize> =
                blocks[b].difference(&inside).copied().collect();
            let new_idx = blocks.len();
            let (small, large) = if inside.len() <= outside.len() {
                (inside, outside)
            } else {
                (outside, inside)
            };
            blocks[b] = large;
            for &q in &small {
                block_of[q] = new_idx;
            }
            blocks.push(small);
            for s2 in 0..k {
                worklist.push_back((new_idx, s2));
            }
        }
    }

    // Renumber blocks by BFS from the initial block, symbols in order.
    let init_block = block_of[dense[&d.initial]];
    let mut new_idx: Vec<Option<usize>> = vec![None; blocks.len()];
    let mut bfs: Vec<usize> = vec![init_block];
    new_idx[init_block] = Some(0);
    let mut head = 0;
    while head < bfs.len() {
        let b = bfs[head];
        head += 1;
        let rep = *blocks[b].iter().next().unwrap();
        for s in 0..k {
            let tb = block_of[succ[rep][s]];
            if new_idx[tb].is_none() {
                new_idx[tb] = Some(bfs.len());
                bfs.push(tb);
            }
        }
    }
    debug_assert_eq!(bfs.len(), blocks.len(), "all blocks reachable");

    let mut out = Automaton::new(
        d.alphabet.clone(),
        bfs.len(),
        0,
        bfs.iter()
            .enumerate()
            .filter(|(_, &b)| blocks[b].iter().any(|q| finals.contains(q)))
            .map(|(i, _)| i),
        AcceptanceMode::Finite,
    )?;
    for (i, &b) in bfs.iter().enumerate() {
        let rep = *blocks[b].iter().next().unwrap();
        for s in 0..k {
            let t = new_idx[block_of[succ[rep][s]]].unwrap();
            out.add_edge(i, d.alphabet.symbol(s), t)?;
        }
    }
    Ok(out)
}

/// Language equivalence of two complete DFAs over the same alphabet.
///
/// On inequivalence, returns a shortest distinguishing word (the
/// lexicographically least among the shortest, per the alphabet order):
/// breadth-first search over the pair graph for a pair that is final in
/// exactly one automaton.
pub fn dfa_equivalent(d1: &Automaton, d2: &Automaton) -> Result<(bool, Option<Word>)> {
    require_dfa(d1, "equivalence")?;
    require_dfa(d2, "equivalence")?;
    if d1.alphabet != d2.alphabet {
        return Err(Error::input("equivalence requires a common alphabet"));
    }
    let k = d1.alphabet.len();
    let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut queue: VecDeque<((usize, usize), Word)> = VecDeque::new();
    let start = (d1.initial, d2.initial);
    seen.insert(start);
    queue.push_back((start, Vec::new()));
    while let Some(((q1, q2), word)) = queue.pop_front() {
        if d1.finals.contains(&q1) != d2.finals.contains(&q2) {
            return Ok((false, Some(word)));
        }
        for s in 0..k {
            let t = (d1.step(q1, s).unwrap(), d2.step(q2, s).unwrap());
            if seen.insert(t) {
                let mut w = word.clone();
                w.push(d1.alphabet.symbol(s));
                queue.push_back((t, w));
            }
        }
    }
    Ok((true, None))
}

/// Unpruned product DFA with conjunctive finals; the state count is exactly
/// `|d1| · |d2|` with row-major layout.
pub fn intersect_dfa(d1: &Automaton, d2: &Automaton) -> Result<Automaton> {
    require_dfa(d1, "intersection")?;
    require_dfa(d2, "intersection")?;
    if d1.alphabet != d2.alphabet {
        return Err(Error::input("intersection requires a common alphabet"));
    }
    let (n1, n2) = (d1.num_states(), d2.num_states());
    let idx = |q1: usize, q2: usize| q1 * n2 + q2;
    let finals = (0..n1)
        .flat_map(|q1| (0..n2).map(move |q2| (q1, q2)))
        .filter(|(q1, q2)| d1.finals.contains(q1) && d2.finals.contains(q2))
        .map(|(q1, q2)| idx(q1, q2));
    let mut out = Automaton::new(
        d1.alphabet.clone(),
        n1 * n2,
        idx(d1.initial, d2.initial),
        finals,
        AcceptanceMode::Finite,
    )?;
    for q1 in 0..n1 {
        for q2 in 0..n2 {
            for s in 0..d1.alphabet.len() {
                let t = idx(d1.step(q1, s).unwrap(), d2.step(q2, s).unwrap());
                out.add_edge(idx(q1, q2), d1.alphabet.symbol(s), t)?;
            }
        }
    }
    Ok(out)
}

/// Complement of a complete DFA: flip the final set.
pub fn complement_dfa(d: &Automaton) -> Result<Automaton> {
    require_dfa(d, "complementation")?;
    let mut out = d.clone();
    out.finals = (0..d.num_states())
        .filter(|q| !d.finals.contains(q))
        .collect();
    Ok(out)
}

/// Emptiness of a finite-word automaton: no final state reachable.
pub fn dfa_is_empty(d: &Automaton) -> bool {
    d.reachable_states().iter().all(|q| !d.finals.contains(q))
}
