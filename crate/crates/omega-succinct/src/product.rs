//! The MDP × NBA product and exact optimal satisfaction probabilities.
//!
//! A product action pairs a base action with a choice function that fixes,
//! for every label the bundle can emit, which automaton successor to take.
//! The choice is made per emitted letter (the automaton reads the letter
//! before branching), so a deterministic automaton yields exactly one
//! product action per base action and the product of a chain with a DBA is
//! again a chain. Mass emitted on a letter the automaton cannot read at all
//! (`δ(q, σ) = ∅`) is lost: it becomes a bundle deficit, i.e. an implicit
//! transition to the rejecting sink.
//!
//! The syntactic value is the optimal probability of satisfying the Büchi
//! condition in this product, computed by the standard reduction: decompose
//! into maximal end components, keep those containing an accepting product
//! state, and maximize reachability of their union.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::{One, Zero};

use crate::automaton::{AcceptanceMode, Automaton};
use crate::error::{Error, Result};
use crate::graph;
use crate::linalg;
use crate::mdp::{mc_language_probability, LabelledMdp, MdpTransition, Rational};

/// A product action: one base action plus the chosen automaton successor per
/// emitted label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductAction {
    pub base_action: usize,
    pub choices: BTreeMap<char, usize>,
}

/// The reachable part of an MDP × NBA product.
#[derive(Debug, Clone)]
pub struct ProductMdp {
    /// Numeric transition structure over the product states.
    pub mdp: LabelledMdp,
    /// `F×`: product states whose automaton component is final (states whose
    /// chain component is the rejecting sink are excluded).
    pub accepting: BTreeSet<usize>,
    /// Product index → (model state, automaton state).
    pub provenance: Vec<(usize, usize)>,
    /// Descriptor of each product action, aligned with `mdp`'s action lists.
    pub actions: Vec<Vec<ProductAction>>,
}

/// A positional strategy on a product (or any MDP): one chosen action index
/// per state, `None` for states without actions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositionalStrategy(pub Vec<Option<usize>>);

/// Build the reachable product of an MDP and a Büchi automaton over the same
/// alphabet. The initial product state has index 0.
pub fn build_product(m: &LabelledMdp, aut: &Automaton) -> Result<ProductMdp> {
    if aut.mode != AcceptanceMode::Buchi {
        return Err(Error::contract("product requires a Büchi automaton"));
    }
    if m.alphabet != aut.alphabet {
        return Err(Error::input("model and automaton alphabets differ"));
    }

    let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut provenance: Vec<(usize, usize)> = Vec::new();
    let mut pending: VecDeque<usize> = VecDeque::new();
    let mut staged: Vec<Vec<(ProductAction, Vec<MdpTransition>)>> = Vec::new();

    let mut intern = |key: (usize, usize),
                      provenance: &mut Vec<(usize, usize)>,
                      staged: &mut Vec<Vec<(ProductAction, Vec<MdpTransition>)>>,
                      pending: &mut VecDeque<usize>|
     -> usize {
        if let Some(&i) = index.get(&key) {
            return i;
        }
        let i = provenance.len();
        index.insert(key, i);
        provenance.push(key);
        staged.push(Vec::new());
        pending.push_back(i);
        i
    };

    intern(
        (m.initial, aut.initial),
        &mut provenance,
        &mut staged,
        &mut pending,
    );
    while let Some(pi) = pending.pop_front() {
        let (s, q) = provenance[pi];
        for (a, bundle) in m.bundles(s).iter().enumerate() {
            // Labels this bundle can emit and the automaton can read.
            let mut labels: Vec<char> = Vec::new();
            for t in bundle {
                let sym = aut.alphabet.require(t.label)?;
                if !aut.successors(q, sym).is_empty() && !labels.contains(&t.label) {
                    labels.push(t.label);
                }
            }
            labels.sort_by_key(|&c| aut.alphabet.index_of(c));
            if labels.is_empty() {
                // Every emission blocks the automaton: the whole bundle is a
                // dead end and yields no product action.
                continue;
            }
            let options: Vec<Vec<usize>> = labels
                .iter()
                .map(|&c| {
                    aut.successors(q, aut.alphabet.index_of(c).unwrap())
                        .iter()
                        .copied()
                        .collect()
                })
                .collect();
            // Odometer over the choice space, lowest successor indices first.
            let mut pick = vec![0usize; labels.len()];
            let mut exhausted = false;
            while !exhausted {
                let choices: BTreeMap<char, usize> = labels
                    .iter()
                    .enumerate()
                    .map(|(k, &c)| (c, options[k][pick[k]]))
                    .collect();
                let mut transitions = Vec::new();
                for t in bundle {
                    if let Some(&q2) = choices.get(&t.label) {
                        let target = intern(
                            (t.target, q2),
                            &mut provenance,
                            &mut staged,
                            &mut pending,
                        );
                        transitions.push(MdpTransition {
                            prob: t.prob.clone(),
                            label: t.label,
                            target,
                        });
                    }
                }
                staged[pi].push((
                    ProductAction {
                        base_action: a,
                        choices,
                    },
                    transitions,
                ));
                // Advance the odometer; stop after it wraps.
                exhausted = true;
                for pos in (0..pick.len()).rev() {
                    if pick[pos] + 1 < options[pos].len() {
                        pick[pos] += 1;
                        pick.iter_mut().skip(pos + 1).for_each(|p| *p = 0);
                        exhausted = false;
                        break;
                    } else {
                        pick[pos] = 0;
                    }
                }
            }
        }
    }

    let mut mdp = LabelledMdp::new(m.alphabet.clone(), provenance.len(), 0)?;
    let mut actions: Vec<Vec<ProductAction>> = vec![Vec::new(); provenance.len()];
    for (pi, acts) in staged.into_iter().enumerate() {
        for (descriptor, transitions) in acts {
            mdp.add_action(pi, transitions)?;
            actions[pi].push(descriptor);
        }
    }
    let accepting = provenance
        .iter()
        .enumerate()
        .filter(|(_, (s, q))| aut.finals.contains(q) && m.reject != Some(*s))
        .map(|(i, _)| i)
        .collect();
    Ok(ProductMdp {
        mdp,
        accepting,
        provenance,
        actions,
    })
}

/// A maximal end component: its states and, per state, the actions that stay
/// inside it with full probability mass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mec {
    pub states: BTreeSet<usize>,
    pub actions: BTreeMap<usize, Vec<usize>>,
}

/// Maximal end components by the standard iterative SCC pruning. An action
/// is admissible inside a candidate set iff it has no deficit and all its
/// targets stay in the set; states without admissible actions are pruned.
pub fn mec_decomposition(m: &LabelledMdp) -> Vec<Mec> {
    let one = Rational::one();
    let mut result: Vec<Mec> = Vec::new();
    let mut work: Vec<BTreeSet<usize>> = vec![(0..m.num_states()).collect()];
    while let Some(candidate) = work.pop() {
        if candidate.is_empty() {
            continue;
        }
        let admissible = |s: usize, inside: &BTreeSet<usize>| -> Vec<usize> {
            (0..m.num_actions(s))
                .filter(|&a| {
                    m.bundle_total(s, a) == one
                        && m.bundles(s)[a].iter().all(|t| inside.contains(&t.target))
                })
                .collect()
        };
        let live: BTreeSet<usize> = candidate
            .iter()
            .copied()
            .filter(|&s| !admissible(s, &candidate).is_empty())
            .collect();
        if live != candidate {
            work.push(live);
            continue;
        }
        // Dense SCC pass over the candidate.
        let order: Vec<usize> = candidate.iter().copied().collect();
        let pos: BTreeMap<usize, usize> = order.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); order.len()];
        for (i, &s) in order.iter().enumerate() {
            for a in admissible(s, &candidate) {
                for t in &m.bundles(s)[a] {
                    adj[i].push(pos[&t.target]);
                }
            }
        }
        let sccs = graph::tarjan_scc(&adj);
        if sccs.len() == 1 {
            let states = candidate;
            let actions = states
                .iter()
                .map(|&s| (s, admissible(s, &states)))
                .collect();
            result.push(Mec { states, actions });
        } else {
            for comp in sccs {
                work.push(comp.into_iter().map(|i| order[i]).collect());
            }
        }
    }
    result.sort_by_key(|mec| *mec.states.iter().next().unwrap());
    result
}

/// The end components that contain an accepting product state.
pub fn accepting_mecs(p: &ProductMdp) -> Vec<Mec> {
    mec_decomposition(&p.mdp)
        .into_iter()
        .filter(|mec| mec.states.iter().any(|s| p.accepting.contains(s)))
        .collect()
}

/// Exact optimal reachability probabilities and an optimal positional
/// strategy.
///
/// Graph precomputation first zeroes the states from which the target is
/// unreachable under every strategy; policy iteration then alternates exact
/// least-fixpoint evaluation (a rational linear solve restricted to the
/// states that reach the target under the current policy) with greedy
/// improvement until no switch strictly increases a value. Ties prefer the
/// lowest action index; the initial policy picks the first action.
pub fn max_reach_probability(
    m: &LabelledMdp,
    target: &BTreeSet<usize>,
) -> Result<(Vec<Rational>, PositionalStrategy)> {
    let n = m.num_states();
    if target.iter().any(|&t| t >= n) {
        return Err(Error::input("target state out of range"));
    }
    let mut policy: Vec<Option<usize>> = (0..n)
        .map(|s| if m.num_actions(s) > 0 { Some(0) } else { None })
        .collect();
    let mut values = vec![Rational::zero(); n];
    for &t in target {
        values[t] = Rational::one();
    }

    // Zero set: complement of backward reachability from the target.
    let mut pred: Vec<Vec<usize>> = vec![Vec::new(); n];
    for s in 0..n {
        for bundle in m.bundles(s) {
            for t in bundle {
                pred[t.target].push(s);
            }
        }
    }
    let mut can_reach = vec![false; n];
    let mut queue: VecDeque<usize> = target.iter().copied().collect();
    for &t in target {
        can_reach[t] = true;
    }
    while let Some(v) = queue.pop_front() {
        for &p in &pred[v] {
            if !can_reach[p] {
                can_reach[p] = true;
                queue.push_back(p);
            }
        }
    }
    let solve_states: Vec<usize> = (0..n)
        .filter(|&s| can_reach[s] && !target.contains(&s) && policy[s].is_some())
        .collect();

    let mut rounds = 0usize;
    loop {
        rounds += 1;
        if rounds > 10_000 {
            return Err(Error::contract("policy iteration failed to converge"));
        }
        // Least-fixpoint evaluation of the current policy.
        let mut reach_pi = vec![false; n];
        for &t in target {
            reach_pi[t] = true;
        }
        // Policy-restricted predecessor walk.
        let mut pred_pi: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &s in &solve_states {
            let a = policy[s].unwrap();
            for t in &m.bundles(s)[a] {
                pred_pi[t.target].push(s);
            }
        }
        let mut q2: VecDeque<usize> = target.iter().copied().collect();
        while let Some(v) = q2.pop_front() {
            for &p in &pred_pi[v] {
                if !reach_pi[p] {
                    reach_pi[p] = true;
                    q2.push_back(p);
                }
            }
        }
        let sys: Vec<usize> = solve_states
            .iter()
            .copied()
            .filter(|&s| reach_pi[s])
            .collect();
        let pos: BTreeMap<usize, usize> = sys.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let mut equations = Vec::with_capacity(sys.len());
        for &s in &sys {
            let mut coefs = Vec::new();
            let mut b = Rational::zero();
            for t in &m.bundles(s)[policy[s].unwrap()] {
                if target.contains(&t.target) {
                    b += &t.prob;
                } else if let Some(&j) = pos.get(&t.target) {
                    coefs.push((j, t.prob.clone()));
                }
                // Targets outside the system have value 0 under this policy.
            }
            equations.push((coefs, b));
        }
        let x = linalg::solve_hitting(equations)?;
        for &s in &solve_states {
            values[s] = Rational::zero();
        }
        for (i, &s) in sys.iter().enumerate() {
            values[s] = x[i].clone();
        }

        // Greedy improvement.
        let mut changed = false;
        for &s in &solve_states {
            let mut best: Option<(Rational, usize)> = None;
            for a in 0..m.num_actions(s) {
                let q_val = m.bundles(s)[a]
                    .iter()
                    .fold(Rational::zero(), |acc, t| acc + &t.prob * &values[t.target]);
                let better = match &best {
                    None => true,
                    Some((bq, _)) => q_val > *bq,
                };
                if better {
                    best = Some((q_val, a));
                }
            }
            let (best_q, best_a) = best.expect("solve states have actions");
            if best_q > values[s] {
                policy[s] = Some(best_a);
                changed = true;
            }
        }
        if !changed {
            return Ok((values, PositionalStrategy(policy)));
        }
    }
}

/// Evaluate a fixed positional strategy for reachability of `target` (least
/// fixpoint). Used as an independent soundness check of optimal strategies.
pub fn evaluate_strategy(
    m: &LabelledMdp,
    strategy: &PositionalStrategy,
    target: &BTreeSet<usize>,
) -> Result<Vec<Rational>> {
    let n = m.num_states();
    let mut reach = vec![false; n];
    let mut pred: Vec<Vec<usize>> = vec![Vec::new(); n];
    for s in 0..n {
        if target.contains(&s) {
            continue;
        }
        if let Some(a) = strategy.0[s] {
            for t in &m.bundles(s)[a] {
                pred[t.target].push(s);
            }
        }
    }
    let mut queue: VecDeque<usize> = target.iter().copied().collect();
    for &t in target {
        reach[t] = true;
    }
    while let Some(v) = queue.pop_front() {
        for &p in &pred[v] {
            if !reach[p] {
                reach[p] = true;
                queue.push_back(p);
            }
        }
    }
    let sys: Vec<usize> = (0..n)
        .filter(|&s| reach[s] && !target.contains(&s))
        .collect();
    let pos: BTreeMap<usize, usize> = sys.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let mut equations = Vec::with_capacity(sys.len());
    for &s in &sys {
        let mut coefs = Vec::new();
        let mut b = Rational::zero();
        for t in &m.bundles(s)[strategy.0[s].unwrap()] {
            if target.contains(&t.target) {
                b += &t.prob;
            } else if let Some(&j) = pos.get(&t.target) {
                coefs.push((j, t.prob.clone()));
            }
        }
        equations.push((coefs, b));
    }
    let x = linalg::solve_hitting(equations)?;
    let mut values = vec![Rational::zero(); n];
    for &t in target {
        values[t] = Rational::one();
    }
    for (i, &s) in sys.iter().enumerate() {
        values[s] = x[i].clone();
    }
    Ok(values)
}

/// Alternative product with blind commitment: an action pairs a base action
/// with a single automaton successor `q'`, chosen before the emitted letter
/// is seen; mass emitted on any letter `σ` with `q' ∉ δ(q, σ)` is lost.
///
/// This is the action structure the published product figure draws, and
/// [`psyn_committed`] reproduces the published worked-example value under
/// it. It makes deterministic automata lose mass wherever a bundle's labels
/// lead to different successors, so the letter-informed [`build_product`]
/// (under which deterministic automata attain the semantic value and the
/// guessing family is good for MDPs) is the primary construction; this one
/// is kept for comparison.
pub fn build_product_committed(m: &LabelledMdp, aut: &Automaton) -> Result<ProductMdp> {
    if aut.mode != AcceptanceMode::Buchi {
        return Err(Error::contract("product requires a Büchi automaton"));
    }
    if m.alphabet != aut.alphabet {
        return Err(Error::input("model and automaton alphabets differ"));
    }
    let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut provenance: Vec<(usize, usize)> = Vec::new();
    let mut staged: Vec<Vec<(ProductAction, Vec<MdpTransition>)>> = Vec::new();
    let mut pending: VecDeque<usize> = VecDeque::new();
    index.insert((m.initial, aut.initial), 0);
    provenance.push((m.initial, aut.initial));
    staged.push(Vec::new());
    pending.push_back(0);
    while let Some(pi) = pending.pop_front() {
        let (s, q) = provenance[pi];
        for (a, bundle) in m.bundles(s).iter().enumerate() {
            // Candidate commitments: any successor of q on some emitted label.
            let mut candidates: Vec<usize> = Vec::new();
            for t in bundle {
                let sym = aut.alphabet.require(t.label)?;
                for &q2 in aut.successors(q, sym) {
                    if !candidates.contains(&q2) {
                        candidates.push(q2);
                    }
                }
            }
            candidates.sort_unstable();
            for q2 in candidates {
                let mut transitions = Vec::new();
                let mut choices = BTreeMap::new();
                for t in bundle {
                    let sym = aut.alphabet.index_of(t.label).unwrap();
                    if aut.successors(q, sym).contains(&q2) {
                        choices.insert(t.label, q2);
                        let key = (t.target, q2);
                        let target = match index.get(&key) {
                            Some(&i) => i,
                            None => {
                                let i = provenance.len();
                                index.insert(key, i);
                                provenance.push(key);
                                staged.push(Vec::new());
                                pending.push_back(i);
                                i
                            }
                        };
                        transitions.push(MdpTransition {
                            prob: t.prob.clone(),
                            label: t.label,
                            target,
                        });
                    }
                }
                staged[pi].push((
                    ProductAction {
                        base_action: a,
                        choices,
                    },
                    transitions,
                ));
            }
        }
    }
    let mut mdp = LabelledMdp::new(m.alphabet.clone(), provenance.len(), 0)?;
    let mut actions: Vec<Vec<ProductAction>> = vec![Vec::new(); provenance.len()];
    for (pi, acts) in staged.into_iter().enumerate() {
        for (descriptor, transitions) in acts {
            mdp.add_action(pi, transitions)?;
            actions[pi].push(descriptor);
        }
    }
    let accepting = provenance
        .iter()
        .enumerate()
        .filter(|(_, (s, q))| aut.finals.contains(q) && m.reject != Some(*s))
        .map(|(i, _)| i)
        .collect();
    Ok(ProductMdp {
        mdp,
        accepting,
        provenance,
        actions,
    })
}

/// The optimal Büchi value under blind commitment (see
/// [`build_product_committed`]).
pub fn psyn_committed(m: &LabelledMdp, aut: &Automaton) -> Result<Rational> {
    let product = build_product_committed(m, aut)?;
    let target: BTreeSet<usize> = mec_decomposition(&product.mdp)
        .into_iter()
        .filter(|mec| mec.states.iter().any(|s| product.accepting.contains(s)))
        .flat_map(|mec| mec.states.into_iter())
        .collect();
    let (values, _) = max_reach_probability(&product.mdp, &target)?;
    Ok(values[0].clone())
}

/// Everything `psyn` computes, for reporting.
pub struct PsynOutcome {
    pub value: Rational,
    pub product: ProductMdp,
    pub accepting_mecs: Vec<Mec>,
    pub values: Vec<Rational>,
    pub strategy: PositionalStrategy,
}

/// Optimal syntactic satisfaction probability: maximal probability of an
/// accepting run in the product, via accepting end components and optimal
/// reachability.
pub fn psyn_full(m: &LabelledMdp, aut: &Automaton) -> Result<PsynOutcome> {
    let product = build_product(m, aut)?;
    let mecs = accepting_mecs(&product);
    let target: BTreeSet<usize> = mecs.iter().flat_map(|mec| mec.states.iter().copied()).collect();
    let (values, strategy) = max_reach_probability(&product.mdp, &target)?;
    Ok(PsynOutcome {
        value: values[0].clone(),
        product,
        accepting_mecs: mecs,
        values,
        strategy,
    })
}

pub fn psyn(m: &LabelledMdp, aut: &Automaton) -> Result<Rational> {
    Ok(psyn_full(m, aut)?.value)
}

/// Semantic satisfaction probability of a chain through a caller-supplied
/// language-equivalent deterministic complete Büchi automaton. Equivalence
/// with the original NBA cannot be verified in general; callers check it on
/// bounded lassos and record the assumption.
pub fn psem(m: &LabelledMdp, equivalent_dba: &Automaton) -> Result<Rational> {
    mc_language_probability(m, equivalent_dba)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;
    use crate::mdp::{build_random_mc, build_sigma_mc, example_chain, rational_from};

    #[test]
    fn example_product_reachable_states() {
        let chain = example_chain();
        let s1 = families::build_sn(1).unwrap();
        let p = build_product(&chain, &s1).unwrap();
        // (s0,q0), (s1,q0), (s1,q1), (sf,q1) — rejecting dead mass is
        // implicit, so no sink pairs appear.
        let mut pairs = p.provenance.clone();
        pairs.sort();
        assert_eq!(pairs, vec![(0, 0), (1, 0), (1, 1), (2, 1)]);
        // S_1 is a safety automaton: every product state is accepting.
        assert_eq!(p.accepting.len(), 4);
    }

    #[test]
    fn product_with_one_state_automaton_mirrors_model() {
        let chain = example_chain();
        let mut one = Automaton::new(
            chain.alphabet.clone(),
            1,
            0,
            [0],
            AcceptanceMode::Buchi,
        )
        .unwrap();
        for &c in ['0', '1', '$'].iter() {
            one.add_edge(0, c, 0).unwrap();
        }
        let p = build_product(&chain, &one).unwrap();
        assert_eq!(p.mdp.num_states(), chain.num_states());
        for s in 0..chain.num_states() {
            assert_eq!(p.mdp.num_actions(s), chain.num_actions(s));
        }
    }

    #[test]
    fn chain_times_dba_is_chain() {
        let chain = build_sigma_mc(2, &[true, false]).unwrap();
        let dba = families::build_dn(2).unwrap();
        let p = build_product(&chain, &dba).unwrap();
        assert!(p.mdp.is_markov_chain());
    }

    #[test]
    fn example_product_has_single_accepting_mec() {
        let chain = example_chain();
        let s1 = families::build_sn(1).unwrap();
        let p = build_product(&chain, &s1).unwrap();
        let mecs = accepting_mecs(&p);
        assert_eq!(mecs.len(), 1);
        let states: Vec<(usize, usize)> = mecs[0]
            .states
            .iter()
            .map(|&i| p.provenance[i])
            .collect();
        assert_eq!(states, vec![(2, 1)]); // (s_f, q_1) with its $ self-loop
    }

    #[test]
    fn chain_mecs_are_bsccs() {
        let chain = build_sigma_mc(3, &[true, true, false]).unwrap();
        let mecs = mec_decomposition(&chain);
        // The only BSCC of a σ-chain is the absorbing $ state.
        assert_eq!(mecs.len(), 1);
        assert_eq!(
            mecs[0].states.iter().copied().collect::<Vec<_>>(),
            vec![chain.num_states() - 1]
        );
    }

    #[test]
    fn mecs_are_closed_and_strongly_connected() {
        let chain = example_chain();
        let g1 = families::build_gn(1).unwrap();
        let p = build_product(&chain, &g1).unwrap();
        for mec in mec_decomposition(&p.mdp) {
            for (&s, actions) in &mec.actions {
                assert!(!actions.is_empty());
                for &a in actions {
                    assert_eq!(p.mdp.bundle_total(s, a), Rational::one());
                    for t in &p.mdp.bundles(s)[a] {
                        assert!(mec.states.contains(&t.target));
                    }
                }
            }
        }
    }

    #[test]
    fn reach_all_states_is_one() {
        let chain = example_chain();
        let target: BTreeSet<usize> = (0..chain.num_states()).collect();
        let (values, _) = max_reach_probability(&chain, &target).unwrap();
        assert!(values.iter().all(|v| v.is_one()));
    }

    #[test]
    fn reach_empty_target_is_zero() {
        let chain = example_chain();
        let (values, _) = max_reach_probability(&chain, &BTreeSet::new()).unwrap();
        assert!(values.iter().all(|v| v.is_zero()));
    }

    #[test]
    fn example_product_reach_value_at_confirm_state() {
        // Hand-derived: from (s_1, q_1) the only move keeps the $-mass,
        // x = 1/2 · 1, so the value is 1/2.
        let chain = example_chain();
        let s1 = families::build_sn(1).unwrap();
        let p = build_product(&chain, &s1).unwrap();
        let target: BTreeSet<usize> = accepting_mecs(&p)
            .iter()
            .flat_map(|m| m.states.iter().copied())
            .collect();
        let (values, strategy) = max_reach_probability(&p.mdp, &target).unwrap();
        let idx = p.provenance.iter().position(|&pq| pq == (1, 1)).unwrap();
        assert_eq!(values[idx], rational_from(1, 2));

        // Optimality certificate: one Bellman step leaves the values fixed.
        for s in 0..p.mdp.num_states() {
            if target.contains(&s) || p.mdp.num_actions(s) == 0 {
                continue;
            }
            let best = (0..p.mdp.num_actions(s))
                .map(|a| {
                    p.mdp.bundles(s)[a]
                        .iter()
                        .fold(Rational::zero(), |acc, t| acc + &t.prob * &values[t.target])
                })
                .max()
                .unwrap();
            assert_eq!(best, values[s], "Bellman step moved state {s}");
        }

        // Strategy soundness: evaluating the returned strategy reproduces
        // the optimal values.
        let eval = evaluate_strategy(&p.mdp, &strategy, &target).unwrap();
        assert_eq!(eval, values);
    }

    #[test]
    fn psyn_of_example_chain_against_s1() {
        // Letter-informed resolution, solved by hand: at (s_1, q_0) the best
        // choice maps the 1-emission to q_1 and keeps the 0-emission at q_0:
        // x = 1/4·x + 1/4·(1/2)  =>  x = 1/6.
        let value = psyn(&example_chain(), &families::build_sn(1).unwrap()).unwrap();
        assert_eq!(value, rational_from(1, 6));
    }

    #[test]
    fn committed_product_matches_drawn_example() {
        // Under blind commitment the (s_1, q_0) state has one action per
        // committed successor; the q_1-commitment keeps only the 1-emission,
        // and the optimum drops to 1/4 · 1/2 = 1/8.
        let chain = example_chain();
        let s1 = families::build_sn(1).unwrap();
        let p = build_product_committed(&chain, &s1).unwrap();
        let at = p.provenance.iter().position(|&pq| pq == (1, 0)).unwrap();
        assert_eq!(p.mdp.num_actions(at), 2);
        let jump = p.actions[at]
            .iter()
            .position(|a| a.choices.get(&'1') == Some(&1))
            .unwrap();
        let bundle = &p.mdp.bundles(at)[jump];
        assert_eq!(bundle.len(), 1);
        assert_eq!(bundle[0].label, '1');
        assert_eq!(bundle[0].prob, rational_from(1, 4));

        let value = psyn_committed(&chain, &s1).unwrap();
        assert_eq!(value, rational_from(1, 8));
    }

    #[test]
    fn committed_resolution_breaks_deterministic_attainment() {
        // The reason commitment is not the primary semantics: even a
        // deterministic automaton loses mass at branching bundles, so the
        // syntactic value falls below the semantic one.
        let chain = build_sigma_mc(1, &[true]).unwrap();
        let dba = families::build_sn_dba(1).unwrap();
        let committed = psyn_committed(&chain, &dba).unwrap();
        let semantic = mc_language_probability(&chain, &dba).unwrap();
        assert!(committed < semantic, "{committed} vs {semantic}");
        assert_eq!(psyn(&chain, &dba).unwrap(), semantic);
    }

    #[test]
    fn psyn_of_deterministic_automaton_equals_language_probability() {
        for n in 1..=3 {
            let dba = families::build_sn_dba(n).unwrap();
            for bits in 0..(1u32 << n) {
                let sigma: Vec<bool> = (0..n).map(|i| bits >> (n - 1 - i) & 1 == 1).collect();
                let chain = build_sigma_mc(n, &sigma).unwrap();
                assert_eq!(
                    psyn(&chain, &dba).unwrap(),
                    mc_language_probability(&chain, &dba).unwrap(),
                    "n={n} bits={bits:b}"
                );
            }
        }
    }

    #[test]
    fn psyn_never_exceeds_psem() {
        let alphabet = crate::alphabet::Alphabet::standard();
        for seed in 0..8 {
            let chain = build_random_mc(seed, 3, &alphabet, 0.7).unwrap();
            let syn = psyn(&chain, &families::build_gn(1).unwrap()).unwrap();
            let sem = psem(&chain, &families::build_dn(1).unwrap()).unwrap();
            assert!(syn <= sem, "seed {seed}: {syn} > {sem}");
        }
    }

    #[test]
    fn gn_matches_dn_on_random_chains() {
        let alphabet = crate::alphabet::Alphabet::standard();
        for seed in 0..6 {
            let chain = build_random_mc(seed, 2 + (seed as usize % 3), &alphabet, 0.8).unwrap();
            let syn = psyn(&chain, &families::build_gn(1).unwrap()).unwrap();
            let sem = psem(&chain, &families::build_dn(1).unwrap()).unwrap();
            assert_eq!(syn, sem, "seed {seed}");
        }
    }

    #[test]
    fn psem_equals_psyn_for_same_deterministic_automaton() {
        let chain = example_chain();
        let dba = families::build_dn(1).unwrap();
        assert_eq!(
            psem(&chain, &dba).unwrap(),
            psyn(&chain, &dba).unwrap()
        );
    }
}
