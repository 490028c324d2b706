//! Büchi-specific constructions: blocking-edge redirection (`loopify`),
//! two-phase intersection, emptiness with lasso witnesses, a bounded lasso
//! equivalence oracle, and subset determinization for automata whose
//! acceptance is prefix-determined (safety and reachability shapes).

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::alphabet::Word;
use crate::automaton::{AcceptanceMode, Automaton, LassoWord};
use crate::dfa;
use crate::error::{Error, Result};
use crate::graph;

/// Redirect every blocking pair `(q, σ)` to the initial state and switch to
/// Büchi acceptance. Finals are unchanged. The result is complete whenever
/// the alphabet is nonempty.
///
/// Applied to the chain NFA `A_n` this yields exactly `G_n`; applied to the
/// determinization `B_n` it yields the complete DBA `D_n`.
pub fn loopify(a: &Automaton) -> Automaton {
    let mut out = Automaton::new(
        a.alphabet.clone(),
        a.num_states(),
        a.initial,
        a.finals.iter().copied(),
        AcceptanceMode::Buchi,
    )
    .expect("loopify preserves validity");
    for q in 0..a.num_states() {
        for s in 0..a.alphabet.len() {
            let targets = a.successors(q, s);
            if targets.is_empty() {
                out.add_edge(q, a.alphabet.symbol(s), a.initial).unwrap();
            } else {
                for &t in targets {
                    out.add_edge(q, a.alphabet.symbol(s), t).unwrap();
                }
            }
        }
    }
    out
}

/// Two-phase Büchi intersection over the full state space
/// `Q1 × Q2 × {1, 2}`.
///
/// Phase 1 waits for a final state of the first automaton; the outgoing
/// transition of such a state flips to phase 2, which waits for a final
/// state of the second automaton and flips back. The accepting states are
/// the phase-2-to-1 flip states, so an accepting run is fair for both
/// components. State layout: `(q1 * |Q2| + q2) * 2 + (phase - 1)`.
pub fn intersect_nba(a1: &Automaton, a2: &Automaton) -> Result<Automaton> {
    if a1.mode != AcceptanceMode::Buchi || a2.mode != AcceptanceMode::Buchi {
        return Err(Error::contract("intersection requires Büchi mode"));
    }
    if a1.alphabet != a2.alphabet {
        return Err(Error::input("intersection requires a common alphabet"));
    }
    let (n1, n2) = (a1.num_states(), a2.num_states());
    let idx = |q1: usize, q2: usize, phase: usize| (q1 * n2 + q2) * 2 + (phase - 1);
    let finals = (0..n1)
        .flat_map(|q1| (0..n2).map(move |q2| (q1, q2)))
        .filter(|(_, q2)| a2.finals.contains(q2))
        .map(|(q1, q2)| idx(q1, q2, 2));
    let mut out = Automaton::new(
        a1.alphabet.clone(),
        n1 * n2 * 2,
        idx(a1.initial, a2.initial, 1),
        finals,
        AcceptanceMode::Buchi,
    )?;
    for q1 in 0..n1 {
        for q2 in 0..n2 {
            for phase in 1..=2 {
                let next_phase = match phase {
                    1 if a1.finals.contains(&q1) => 2,
                    2 if a2.finals.contains(&q2) => 1,
                    p => p,
                };
                for s in 0..a1.alphabet.len() {
                    for &t1 in a1.successors(q1, s) {
                        for &t2 in a2.successors(q2, s) {
                            out.add_edge(
                                idx(q1, q2, phase),
                                a1.alphabet.symbol(s),
                                idx(t1, t2, next_phase),
                            )?;
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// An accepting lasso together with its state path: `stem_states` runs from
/// the initial state to the anchor (a final state on a cycle), and
/// `cycle_states` runs from the anchor back to itself. Both paths include
/// their endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LassoPath {
    pub stem_states: Vec<usize>,
    pub stem: Word,
    pub cycle_states: Vec<usize>,
    pub cycle: Word,
}

impl LassoPath {
    pub fn word(&self) -> LassoWord {
        LassoWord {
            stem: self.stem.clone(),
            cycle: self.cycle.clone(),
        }
    }
}

/// Büchi emptiness via SCC analysis: the language is nonempty iff a
/// reachable cycle contains a final state. On nonemptiness the witness lasso
/// has a shortest stem to such a final state and a shortest cycle back to it
/// (ties broken by the alphabet order).
pub fn is_empty_buchi(a: &Automaton) -> Result<(bool, Option<LassoWord>)> {
    let path = accepting_lasso(a)?;
    Ok((path.is_none(), path.map(|p| p.word())))
}

/// Find an accepting lasso with its state path, or `None` when the language
/// is empty.
pub fn accepting_lasso(a: &Automaton) -> Result<Option<LassoPath>> {
    if a.mode != AcceptanceMode::Buchi {
        return Err(Error::contract("emptiness check requires Büchi mode"));
    }
    let n = a.num_states();
    let k = a.alphabet.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for q in 0..n {
        for s in 0..k {
            for &t in a.successors(q, s) {
                adj[q].push(t);
            }
        }
    }
    let reachable = a.reachable_states();
    let sccs = graph::tarjan_scc(&adj);
    let mut on_cycle: BTreeSet<usize> = BTreeSet::new();
    for comp in &sccs {
        let internal = comp.len() > 1 || adj[comp[0]].contains(&comp[0]);
        if internal {
            on_cycle.extend(comp.iter().copied());
        }
    }

    // Candidate anchors: reachable final states lying on a cycle.
    let stems = shortest_paths_from(a, a.initial);
    let mut best: Option<(usize, Word)> = None;
    for &f in &a.finals {
        if !reachable.contains(&f) || !on_cycle.contains(&f) {
            continue;
        }
        let stem = stems[f].clone().expect("reachable state has a stem").1;
        let better = match &best {
            None => true,
            Some((_, w)) => stem.len() < w.len() || (stem.len() == w.len() && stem < *w),
        };
        if better {
            best = Some((f, stem));
        }
    }
    let Some((anchor, stem)) = best else {
        return Ok(None);
    };
    let stem_states = decode_path(&stems, a.initial, anchor);
    let (cycle_states, cycle) =
        shortest_cycle_through(a, anchor).expect("state on cycle has a cycle");
    Ok(Some(LassoPath {
        stem_states,
        stem,
        cycle_states,
        cycle,
    }))
}

/// Shortest (then lexicographically least) words from `source`, with parent
/// links for path reconstruction. Entry `t` holds `(parent-and-letter, word)`.
fn shortest_paths_from(a: &Automaton, source: usize) -> Vec<Option<(Option<(usize, char)>, Word)>> {
    let mut info: Vec<Option<(Option<(usize, char)>, Word)>> = vec![None; a.num_states()];
    info[source] = Some((None, Vec::new()));
    let mut queue = VecDeque::from([source]);
    while let Some(q) = queue.pop_front() {
        let base = info[q].clone().unwrap().1;
        for s in 0..a.alphabet.len() {
            for &t in a.successors(q, s) {
                if info[t].is_none() {
                    let mut w = base.clone();
                    w.push(a.alphabet.symbol(s));
                    info[t] = Some((Some((q, a.alphabet.symbol(s))), w));
                    queue.push_back(t);
                }
            }
        }
    }
    info
}

fn decode_path(
    info: &[Option<(Option<(usize, char)>, Word)>],
    source: usize,
    target: usize,
) -> Vec<usize> {
    let mut states = vec![target];
    let mut cur = target;
    while cur != source {
        let (p, _) = info[cur].as_ref().unwrap().0.expect("path exists");
        states.push(p);
        cur = p;
    }
    states.reverse();
    states
}

/// Shortest nonempty word (with its state path) leading from `state` back to
/// itself.
fn shortest_cycle_through(a: &Automaton, state: usize) -> Option<(Vec<usize>, Word)> {
    // BFS where the first step is forced to leave via an edge; parents are
    // recorded per visited state.
    let mut parent: Vec<Option<(usize, char)>> = vec![None; a.num_states()];
    let mut first_step: Option<char> = None;
    let mut queue: VecDeque<usize> = VecDeque::new();
    for s in 0..a.alphabet.len() {
        for &t in a.successors(state, s) {
            let c = a.alphabet.symbol(s);
            if t == state {
                return Some((vec![state, state], vec![c]));
            }
            if parent[t].is_none() && t != state {
                parent[t] = Some((state, c));
                if first_step.is_none() {
                    first_step = Some(c);
                }
                queue.push_back(t);
            }
        }
    }
    while let Some(q) = queue.pop_front() {
        for s in 0..a.alphabet.len() {
            for &t in a.successors(q, s) {
                let c = a.alphabet.symbol(s);
                if t == state {
                    // Reconstruct q's path from `state`, then close the loop.
                    let mut states = vec![q];
                    let mut letters = vec![c];
                    let mut cur = q;
                    while cur != state {
                        let (p, lc) = parent[cur].unwrap();
                        states.push(p);
                        letters.push(lc);
                        cur = p;
                    }
                    states.reverse();
                    letters.reverse();
                    states.push(state);
                    return Some((states, letters));
                }
                if parent[t].is_none() {
                    parent[t] = Some((q, c));
                    queue.push_back(t);
                }
            }
        }
    }
    None
}

/// Default exploration bound for the lasso oracle: a small-model heuristic,
/// not a proof.
pub fn default_lasso_bound(a1: &Automaton, a2: &Automaton) -> usize {
    2 * a1.num_states().max(a2.num_states()) + 2
}

/// A set of states as packed 64-bit blocks.
type Mask = Vec<u64>;

fn mask_new(n: usize) -> Mask {
    vec![0; n.div_ceil(64)]
}

fn mask_set(m: &mut Mask, i: usize) {
    m[i / 64] |= 1 << (i % 64);
}

fn mask_intersects(a: &Mask, b: &Mask) -> bool {
    a.iter().zip(b).any(|(x, y)| x & y != 0)
}

/// Bounded lasso equivalence: check that the two Büchi automata agree on
/// every ultimately periodic word `u · v^ω` with `|u| ≤ bound` and
/// `1 ≤ |v| ≤ bound`. Returns the first disagreement (cycles enumerated by
/// length then lexicographically; stems in BFS discovery order).
///
/// This is an oracle standing in for full NBA equivalence, which is out of
/// scope.
pub fn buchi_equiv_on_lassos(
    a1: &Automaton,
    a2: &Automaton,
    bound: usize,
) -> Result<(bool, Option<LassoWord>)> {
    if a1.mode != AcceptanceMode::Buchi || a2.mode != AcceptanceMode::Buchi {
        return Err(Error::contract("lasso equivalence requires Büchi mode"));
    }
    if a1.alphabet != a2.alphabet {
        return Err(Error::input("lasso equivalence requires a common alphabet"));
    }
    if bound < 1 {
        return Err(Error::input("lasso bound must be at least 1"));
    }

    // A lasso u·v^ω is accepted iff some state reachable on u can start an
    // accepting run on v^ω. Group stems by the pair of reachable-state sets
    // and precompute, per cycle word v, the set of states from which v^ω has
    // an accepting run.
    let classes = stem_classes(a1, a2, bound);
    let alphabet = a1.alphabet.clone();
    let mut cycle = vec![0usize; 1];
    loop {
        let word: Word = cycle.iter().map(|&s| alphabet.symbol(s)).collect();
        let acc1 = cycle_acceptance_profile(a1, &cycle);
        let acc2 = cycle_acceptance_profile(a2, &cycle);
        for (m1, m2, stem) in &classes {
            if mask_intersects(m1, &acc1) != mask_intersects(m2, &acc2) {
                return Ok((
                    false,
                    Some(LassoWord {
                        stem: stem.clone(),
                        cycle: word,
                    }),
                ));
            }
        }
        if !advance(&mut cycle, alphabet.len(), bound) {
            break;
        }
    }
    Ok((true, None))
}

fn advance(word: &mut Vec<usize>, base: usize, max_len: usize) -> bool {
    for pos in (0..word.len()).rev() {
        if word[pos] + 1 < base {
            word[pos] += 1;
            for w in word.iter_mut().skip(pos + 1) {
                *w = 0;
            }
            return true;
        }
    }
    if word.len() < max_len {
        *word = vec![0; word.len() + 1];
        return true;
    }
    false
}

/// All distinct pairs (reachable set in a1, reachable set in a2) over stems
/// of length at most `bound`, with the first stem (BFS order) producing each
/// pair.
fn stem_classes(a1: &Automaton, a2: &Automaton, bound: usize) -> Vec<(Mask, Mask, Word)> {
    let step = |a: &Automaton, mask: &Mask, s: usize| -> Mask {
        let mut out = mask_new(a.num_states());
        for q in 0..a.num_states() {
            if mask[q / 64] & (1 << (q % 64)) != 0 {
                for &t in a.successors(q, s) {
                    mask_set(&mut out, t);
                }
            }
        }
        out
    };
    let mut start1 = mask_new(a1.num_states());
    mask_set(&mut start1, a1.initial);
    let mut start2 = mask_new(a2.num_states());
    mask_set(&mut start2, a2.initial);
    let start = (start1, start2);
    let mut seen: BTreeMap<(Mask, Mask), Word> = BTreeMap::new();
    seen.insert(start.clone(), Vec::new());
    let mut result = vec![(start.0.clone(), start.1.clone(), Vec::new())];
    let mut layer: Vec<(Mask, Mask, Word)> = result.clone();
    for _ in 0..bound {
        let mut next = Vec::new();
        for (m1, m2, stem) in &layer {
            for s in 0..a1.alphabet.len() {
                let pair = (step(a1, m1, s), step(a2, m2, s));
                if !seen.contains_key(&pair) {
                    let mut w = stem.clone();
                    w.push(a1.alphabet.symbol(s));
                    seen.insert(pair.clone(), w.clone());
                    result.push((pair.0.clone(), pair.1.clone(), w.clone()));
                    next.push((pair.0, pair.1, w));
                }
            }
        }
        if next.is_empty() {
            break;
        }
        layer = next;
    }
    result
}

/// Mask of states from which the periodic word `v^ω` has an accepting run,
/// computed on the (state, position) unrolling of one period.
fn cycle_acceptance_profile(a: &Automaton, cycle: &[usize]) -> Mask {
    let n = a.num_states();
    let p = cycle.len();
    let vid = |q: usize, i: usize| q * p + i;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n * p];
    for q in 0..n {
        for i in 0..p {
            for &t in a.successors(q, cycle[i]) {
                adj[vid(q, i)].push(vid(t, (i + 1) % p));
            }
        }
    }
    let sccs = graph::tarjan_scc(&adj);
    // Mark vertices in accepting cycles, then everything that can reach one.
    let mut good = vec![false; n * p];
    for comp in &sccs {
        let internal = comp.len() > 1 || adj[comp[0]].contains(&comp[0]);
        if internal && comp.iter().any(|&v| a.finals.contains(&(v / p))) {
            for &v in comp {
                good[v] = true;
            }
        }
    }
    // tarjan_scc returns sinks first, so successors are always settled
    // before the components pointing at them.
    for comp in &sccs {
        let any = comp.iter().any(|&v| good[v] || adj[v].iter().any(|&w| good[w]));
        if any {
            for &v in comp {
                good[v] = true;
            }
        }
    }
    let mut mask = mask_new(n);
    for q in 0..n {
        if good[vid(q, 0)] {
            mask_set(&mut mask, q);
        }
    }
    mask
}

/// Subset determinization for Büchi automata whose acceptance is determined
/// by finite prefixes: safety automata (all states final; acceptance = some
/// infinite run exists) and reachability automata (acceptance = some run
/// reaches the final sink). The result is a complete DBA: subsets are final
/// iff they intersect the input's finals, blocked images go to a non-final
/// sink.
///
/// Not meaningful for general NBAs.
pub fn determinize_prefix_language(a: &Automaton) -> Result<Automaton> {
    if a.mode != AcceptanceMode::Buchi {
        return Err(Error::contract("prefix determinization expects Büchi input"));
    }
    if !a.is_safety() && !a.is_reachability() {
        return Err(Error::contract(
            "prefix determinization requires a safety or reachability automaton",
        ));
    }
    let as_finite = Automaton::new(
        a.alphabet.clone(),
        a.num_states(),
        a.initial,
        a.finals.iter().copied(),
        AcceptanceMode::Finite,
    )
    .and_then(|mut f| {
        for q in 0..a.num_states() {
            for s in 0..a.alphabet.len() {
                for &t in a.successors(q, s) {
                    f.add_edge(q, a.alphabet.symbol(s), t)?;
                }
            }
        }
        Ok(f)
    })?;
    let det = dfa::complete_with_sink(&dfa::subset_construction(&as_finite)?);
    let mut out = Automaton::new(
        det.alphabet.clone(),
        det.num_states(),
        det.initial,
        det.finals.iter().copied(),
        AcceptanceMode::Buchi,
    )?;
    for q in 0..det.num_states() {
        for s in 0..det.alphabet.len() {
            for &t in det.successors(q, s) {
                out.add_edge(q, det.alphabet.symbol(s), t)?;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;

    #[test]
    fn loopify_an_is_gn() {
        for n in 1..=5 {
            let g = loopify(&families::build_an(n).unwrap());
            assert_eq!(g, families::build_gn(n).unwrap());
        }
    }

    #[test]
    fn loopify_output_complete() {
        for n in 1..=5 {
            assert!(loopify(&families::build_an(n).unwrap()).is_complete());
            assert!(loopify(&families::build_bn(n).unwrap()).is_complete());
        }
    }

    #[test]
    fn loopify_of_complete_automaton_keeps_graph() {
        let d = families::build_dn(2).unwrap();
        let again = loopify(&d);
        assert_eq!(d, again);
    }

    #[test]
    fn gn_nonempty_with_consistent_witness() {
        for n in 1..=4 {
            let g = families::build_gn(n).unwrap();
            let (empty, witness) = is_empty_buchi(&g).unwrap();
            assert!(!empty);
            let w = witness.unwrap();
            assert!(g.accepts_lasso(&w).unwrap(), "witness {w} not accepted");
        }
    }

    #[test]
    fn no_finals_means_empty() {
        let mut a = Automaton::new(
            crate::alphabet::Alphabet::standard(),
            2,
            0,
            [],
            AcceptanceMode::Buchi,
        )
        .unwrap();
        a.add_edge(0, '0', 1).unwrap();
        a.add_edge(1, '0', 0).unwrap();
        let (empty, w) = is_empty_buchi(&a).unwrap();
        assert!(empty);
        assert!(w.is_none());
    }

    #[test]
    fn self_intersection_equivalent_on_bounded_lassos() {
        let g1 = families::build_gn(1).unwrap();
        let both = intersect_nba(&g1, &g1).unwrap();
        let (eq, w) = buchi_equiv_on_lassos(&g1, &both, 6).unwrap();
        assert!(eq, "disagreement {:?}", w);
    }

    #[test]
    fn rerooted_sn_states_have_disjoint_languages() {
        for n in 2..=4 {
            let s = families::build_sn(n).unwrap();
            let i = intersect_nba(&s.rerooted(1).unwrap(), &s.rerooted(2).unwrap()).unwrap();
            let (empty, _) = is_empty_buchi(&i).unwrap();
            assert!(empty);
        }
    }

    #[test]
    fn g1_and_s1_have_disjoint_languages() {
        // The language of G_1 needs infinitely many '$'-terminated hits,
        // while S_1 words have at most one; their intersection is empty.
        let g1 = families::build_gn(1).unwrap();
        let s1 = dfa::complete_with_sink(&families::build_sn(1).unwrap());
        let i = intersect_nba(&g1, &s1).unwrap();
        let (empty, w) = is_empty_buchi(&i).unwrap();
        assert!(empty, "unexpected witness {:?}", w);
    }

    #[test]
    fn dn_equivalent_to_gn_on_bounded_lassos() {
        for n in 1..=3 {
            let g = families::build_gn(n).unwrap();
            let d = families::build_dn(n).unwrap();
            let (eq, w) = buchi_equiv_on_lassos(&g, &d, 2 * n + 2).unwrap();
            assert!(eq, "n={n}, disagreement {:?}", w);
        }
    }

    #[test]
    fn g1_differs_from_s1_with_concrete_lasso() {
        let g1 = families::build_gn(1).unwrap();
        let s1 = dfa::complete_with_sink(&families::build_sn(1).unwrap());
        let (eq, w) = buchi_equiv_on_lassos(&g1, &s1, 3).unwrap();
        assert!(!eq);
        let lasso = w.unwrap();
        assert_ne!(
            g1.accepts_lasso(&lasso).unwrap(),
            s1.accepts_lasso(&lasso).unwrap()
        );
    }

    #[test]
    fn bad_bound_rejected() {
        let g1 = families::build_gn(1).unwrap();
        assert!(buchi_equiv_on_lassos(&g1, &g1, 0).is_err());
    }

    #[test]
    fn lasso_oracle_matches_direct_acceptance() {
        // Cross-check the bitmask engine against accepts_lasso on every
        // lasso up to a small bound.
        let a = families::build_rn(2).unwrap();
        let b = families::build_rn_prime(2).unwrap();
        let alphabet = a.alphabet.clone();
        let words = |len: usize| -> Vec<Word> {
            let mut out: Vec<Word> = vec![Vec::new()];
            for _ in 0..len {
                out = out
                    .into_iter()
                    .flat_map(|w| {
                        alphabet.symbols().iter().map(move |&c| {
                            let mut v = w.clone();
                            v.push(c);
                            v
                        })
                    })
                    .collect();
            }
            out
        };
        let mut mismatch = None;
        'outer: for sl in 0..=2 {
            for ll in 1..=2 {
                for stem in words(sl) {
                    for cycle in words(ll) {
                        let l = LassoWord {
                            stem: stem.clone(),
                            cycle: cycle.clone(),
                        };
                        if a.accepts_lasso(&l).unwrap() != b.accepts_lasso(&l).unwrap() {
                            mismatch = Some(l);
                            break 'outer;
                        }
                    }
                }
            }
        }
        let (eq, w) = buchi_equiv_on_lassos(&a, &b, 2).unwrap();
        assert_eq!(eq, mismatch.is_none(), "oracle vs direct: {:?} / {:?}", w, mismatch);
    }

    #[test]
    fn prefix_determinization_of_sn_matches_on_lassos() {
        for n in 1..=3 {
            let s = families::build_sn(n).unwrap();
            let d = determinize_prefix_language(&s).unwrap();
            assert!(d.is_deterministic() && d.is_complete());
            let (eq, w) = buchi_equiv_on_lassos(&s, &d, 2 * n + 3).unwrap();
            assert!(eq, "n={n}, disagreement {:?}", w);
        }
    }

    #[test]
    fn prefix_determinization_of_rn_matches_on_lassos() {
        for n in 1..=3 {
            let r = families::build_rn(n).unwrap();
            let d = determinize_prefix_language(&r).unwrap();
            assert!(d.is_deterministic() && d.is_complete());
            let (eq, w) = buchi_equiv_on_lassos(&r, &d, 2 * n + 3).unwrap();
            assert!(eq, "n={n}, disagreement {:?}", w);
        }
    }
}
