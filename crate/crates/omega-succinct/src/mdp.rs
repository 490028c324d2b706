//! Transition-labelled Markov decision processes and chains with exact
//! rational probabilities.
//!
//! A state's action bundles are lists of `(probability, label, target)`
//! triples. Per bundle the probabilities may sum to less than one: the
//! deficit is an implicit transition to an absorbing reject state, which
//! [`LabelledMdp::with_explicit_deficit`] materializes. Runs that fall into
//! the reject state are never accepting, whatever the automaton does, so the
//! reject state is flagged and excluded from acceptance everywhere.

use std::collections::{BTreeSet, VecDeque};

use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::alphabet::Alphabet;
use crate::automaton::{AcceptanceMode, Automaton};
use crate::error::{Error, Result};
use crate::graph;
use crate::linalg;

/// The sole numeric type of the probability engine: an always-normalized
/// arbitrary-precision rational with positive denominator.
pub type Rational = num_rational::BigRational;

/// Parse "num/den" (or a bare integer) into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let parse_int = |t: &str| {
        t.trim()
            .parse::<num_bigint::BigInt>()
            .map_err(|_| Error::input(format!("bad rational component '{t}'")))
    };
    let r = match s.split_once('/') {
        Some((num, den)) => {
            let den = parse_int(den)?;
            if den.is_zero() {
                return Err(Error::input("rational denominator is zero"));
            }
            Rational::new(parse_int(num)?, den)
        }
        None => Rational::from_integer(parse_int(s)?),
    };
    Ok(r)
}

/// Render a rational as the canonical "num/den" (or bare integer) string.
pub fn rational_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_from(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

/// One probabilistic outcome of an action bundle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MdpTransition {
    pub prob: Rational,
    pub label: char,
    pub target: usize,
}

/// A finite run prefix: states interleaved with the chosen action indices
/// and emitted labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MdpRun {
    pub states: Vec<usize>,
    pub actions: Vec<usize>,
    pub labels: Vec<char>,
}

impl MdpRun {
    /// Every step must exist with positive probability.
    pub fn is_run_of(&self, m: &LabelledMdp) -> bool {
        if self.states.len() != self.actions.len() + 1 || self.actions.len() != self.labels.len() {
            return false;
        }
        self.actions.iter().enumerate().all(|(i, &a)| {
            m.bundles(self.states[i]).get(a).is_some_and(|bundle| {
                bundle.iter().any(|t| {
                    t.label == self.labels[i] && t.target == self.states[i + 1] && t.prob > Rational::zero()
                })
            })
        })
    }
}

/// A transition-labelled MDP with dense state indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelledMdp {
    pub alphabet: Alphabet,
    pub initial: usize,
    /// `trans[state][action]` is that action's bundle of outcomes.
    trans: Vec<Vec<Vec<MdpTransition>>>,
    /// Designated absorbing reject state, if materialized.
    pub reject: Option<usize>,
}

impl LabelledMdp {
    pub fn new(alphabet: Alphabet, num_states: usize, initial: usize) -> Result<Self> {
        if initial >= num_states {
            return Err(Error::input("initial state out of range"));
        }
        Ok(LabelledMdp {
            alphabet,
            initial,
            trans: vec![Vec::new(); num_states],
            reject: None,
        })
    }

    pub fn num_states(&self) -> usize {
        self.trans.len()
    }

    pub fn num_actions(&self, state: usize) -> usize {
        self.trans[state].len()
    }

    pub fn bundles(&self, state: usize) -> &[Vec<MdpTransition>] {
        &self.trans[state]
    }

    /// Append an action bundle to a state, validating targets, labels and the
    /// subdistribution constraint. Returns the action index.
    pub fn add_action(&mut self, state: usize, bundle: Vec<MdpTransition>) -> Result<usize> {
        if state >= self.num_states() {
            return Err(Error::input("state out of range"));
        }
        let mut total = Rational::zero();
        for t in &bundle {
            if t.target >= self.num_states() {
                return Err(Error::input("transition target out of range"));
            }
            self.alphabet.require(t.label)?;
            if t.prob <= Rational::zero() {
                return Err(Error::input("transition probabilities must be positive"));
            }
            total += &t.prob;
        }
        if total > Rational::one() {
            return Err(Error::input("action bundle probabilities exceed 1"));
        }
        self.trans[state].push(bundle);
        Ok(self.trans[state].len() - 1)
    }

    /// Exactly one action everywhere.
    pub fn is_markov_chain(&self) -> bool {
        self.trans.iter().all(|acts| acts.len() == 1)
    }

    pub fn bundle_total(&self, state: usize, action: usize) -> Rational {
        self.trans[state][action]
            .iter()
            .fold(Rational::zero(), |acc, t| acc + &t.prob)
    }

    /// States reachable from the initial state through any action.
    pub fn reachable_states(&self) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([self.initial]);
        let mut queue = VecDeque::from([self.initial]);
        while let Some(s) = queue.pop_front() {
            for bundle in &self.trans[s] {
                for t in bundle {
                    if seen.insert(t.target) {
                        queue.push_back(t.target);
                    }
                }
            }
        }
        seen
    }

    /// Route every bundle deficit to one designated absorbing reject state
    /// (labelled with the first alphabet symbol). Idempotent; an MDP without
    /// deficits is returned unchanged.
    pub fn with_explicit_deficit(&self) -> LabelledMdp {
        let one = Rational::one();
        let has_deficit = (0..self.num_states()).any(|s| {
            (0..self.num_actions(s)).any(|a| self.bundle_total(s, a) < one)
        });
        if !has_deficit {
            return self.clone();
        }
        let mut out = self.clone();
        let reject = match out.reject {
            Some(r) => r,
            None => {
                out.trans.push(Vec::new());
                let r = out.trans.len() - 1;
                out.reject = Some(r);
                let fixed = out.alphabet.symbol(0);
                out.trans[r].push(vec![MdpTransition {
                    prob: Rational::one(),
                    label: fixed,
                    target: r,
                }]);
                r
            }
        };
        let fixed = out.alphabet.symbol(0);
        for s in 0..out.num_states() {
            for a in 0..out.num_actions(s) {
                let total = out.bundle_total(s, a);
                if total < one {
                    let deficit = &one - &total;
                    out.trans[s][a].push(MdpTransition {
                        prob: deficit,
                        label: fixed,
                        target: reject,
                    });
                }
            }
        }
        out
    }
}

/// The parameterized chain family: a deterministic label sequence
/// `σ_1 … σ_n`, then a state emitting bits with probability 1/4 each and `$`
/// with probability 1/2, then an absorbing `$` state. States `s_0..s_n`
/// then `s_f`.
pub fn build_sigma_mc(n: usize, sigma: &[bool]) -> Result<LabelledMdp> {
    if n < 1 {
        return Err(Error::input("chain parameter n must be at least 1"));
    }
    if sigma.len() != n {
        return Err(Error::input(format!(
            "bit vector has length {}, expected {n}",
            sigma.len()
        )));
    }
    let mut m = LabelledMdp::new(Alphabet::standard(), n + 2, 0)?;
    for (i, &bit) in sigma.iter().enumerate() {
        m.add_action(
            i,
            vec![MdpTransition {
                prob: Rational::one(),
                label: if bit { '1' } else { '0' },
                target: i + 1,
            }],
        )?;
    }
    let sf = n + 1;
    m.add_action(
        n,
        vec![
            MdpTransition {
                prob: rational_from(1, 4),
                label: '0',
                target: n,
            },
            MdpTransition {
                prob: rational_from(1, 4),
                label: '1',
                target: n,
            },
            MdpTransition {
                prob: rational_from(1, 2),
                label: '$',
                target: sf,
            },
        ],
    )?;
    m.add_action(
        sf,
        vec![MdpTransition {
            prob: Rational::one(),
            label: '$',
            target: sf,
        }],
    )?;
    Ok(m)
}

/// The worked-example chain: `build_sigma_mc(1, [0])` — one deterministic
/// `0`, then coin-flip bits and a fair stop.
pub fn example_chain() -> LabelledMdp {
    build_sigma_mc(1, &[false]).expect("static parameters")
}

/// Seed-determined random Markov chain over `{0,1,$}` with full rows (each
/// row sums to exactly 1) and every state reachable from the initial state.
/// Draws are rejected and retried until reachability holds, so identical
/// seeds give structurally identical chains.
pub fn build_random_mc(
    seed: u64,
    state_count: usize,
    alphabet: &Alphabet,
    density: f64,
) -> Result<LabelledMdp> {
    if state_count < 1 {
        return Err(Error::input("state count must be at least 1"));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::input("density must lie in (0, 1]"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _attempt in 0..10_000 {
        let mut m = LabelledMdp::new(alphabet.clone(), state_count, 0)?;
        for s in 0..state_count {
            let mut picks: Vec<(char, usize)> = Vec::new();
            for &label in alphabet.symbols() {
                for target in 0..state_count {
                    if rng.gen_bool(density) {
                        picks.push((label, target));
                    }
                }
            }
            if picks.is_empty() {
                let label = alphabet.symbol(rng.gen_range(0..alphabet.len()));
                picks.push((label, rng.gen_range(0..state_count)));
            }
            let weights: Vec<i64> = picks.iter().map(|_| rng.gen_range(1..=4)).collect();
            let total: i64 = weights.iter().sum();
            let bundle = picks
                .into_iter()
                .zip(weights)
                .map(|((label, target), w)| MdpTransition {
                    prob: rational_from(w, total),
                    label,
                    target,
                })
                .collect();
            m.add_action(s, bundle)?;
        }
        if m.reachable_states().len() == state_count {
            return Ok(m);
        }
    }
    Err(Error::input(
        "could not draw a fully reachable chain with these parameters",
    ))
}

/// Exact probability that the label sequence of a Markov chain lies in the
/// language of a deterministic complete Büchi automaton.
///
/// Builds the synchronous product chain, finds its bottom SCCs, calls a BSCC
/// accepting iff it contains a product state whose automaton component is
/// final (and whose chain component is not the reject state), and solves the
/// hitting-probability system exactly.
pub fn mc_language_probability(mc: &LabelledMdp, dba: &Automaton) -> Result<Rational> {
    if !mc.is_markov_chain() {
        return Err(Error::contract("language probability requires a Markov chain"));
    }
    if dba.mode != AcceptanceMode::Buchi || !dba.is_deterministic() || !dba.is_complete() {
        return Err(Error::contract(
            "language probability requires a deterministic complete Büchi automaton",
        ));
    }
    if mc.alphabet != dba.alphabet {
        return Err(Error::input("chain and automaton alphabets differ"));
    }
    let m = mc.with_explicit_deficit();

    // Reachable product states (s, q); the product of a chain with a DBA is
    // again a chain.
    let mut index: std::collections::BTreeMap<(usize, usize), usize> =
        std::collections::BTreeMap::new();
    let mut states: Vec<(usize, usize)> = Vec::new();
    let mut rows: Vec<Vec<(Rational, usize)>> = Vec::new();
    let start = (m.initial, dba.initial);
    index.insert(start, 0);
    states.push(start);
    let mut head = 0;
    while head < states.len() {
        let (s, q) = states[head];
        let mut row = Vec::new();
        for t in &m.bundles(s)[0] {
            let sym = dba.alphabet.require(t.label)?;
            let q2 = dba.step(q, sym).expect("complete dba");
            let key = (t.target, q2);
            let next = match index.get(&key) {
                Some(&i) => i,
                None => {
                    let i = states.len();
                    index.insert(key, i);
                    states.push(key);
                    i
                }
            };
            row.push((t.prob.clone(), next));
        }
        rows.push(row);
        head += 1;
    }

    let n = states.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (v, row) in rows.iter().enumerate() {
        for (_, t) in row {
            adj[v].push(*t);
        }
    }
    let sccs = graph::tarjan_scc(&adj);
    let mut comp_of = vec![0usize; n];
    for (ci, comp) in sccs.iter().enumerate() {
        for &v in comp {
            comp_of[v] = ci;
        }
    }
    // Bottom = no edge leaves the component.
    let mut bottom = vec![true; sccs.len()];
    for (v, row) in adj.iter().enumerate() {
        for &t in row {
            if comp_of[t] != comp_of[v] {
                bottom[comp_of[v]] = false;
            }
        }
    }
    let accepting_state = |v: usize| {
        let (s, q) = states[v];
        dba.finals.contains(&q) && m.reject != Some(s)
    };
    let mut status: Vec<Option<bool>> = vec![None; n]; // Some(true)=hit, Some(false)=miss
    for (ci, comp) in sccs.iter().enumerate() {
        if bottom[ci] {
            let acc = comp.iter().any(|&v| accepting_state(v));
            for &v in comp {
                status[v] = Some(acc);
            }
        }
    }

    // Transient states reachable only: restrict the solve to states with an
    // undecided status.
    let transient: Vec<usize> = (0..n).filter(|&v| status[v].is_none()).collect();
    if transient.is_empty() {
        return Ok(if status[0] == Some(true) {
            Rational::one()
        } else {
            Rational::zero()
        });
    }
    let pos: std::collections::BTreeMap<usize, usize> =
        transient.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut equations = Vec::with_capacity(transient.len());
    for &v in &transient {
        let mut coefs = Vec::new();
        let mut b = Rational::zero();
        for (p, t) in &rows[v] {
            match status[*t] {
                Some(true) => b += p,
                Some(false) => {}
                None => coefs.push((pos[t], p.clone())),
            }
        }
        equations.push((coefs, b));
    }
    let x = linalg::solve_hitting(equations)?;
    Ok(match status[0] {
        Some(true) => Rational::one(),
        Some(false) => Rational::zero(),
        None => x[pos[&0]].clone(),
    })
}

// --- JSON schema -----------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct MdpJsonTransition {
    from: usize,
    action: usize,
    prob: String,
    label: char,
    to: usize,
}

#[derive(Serialize, Deserialize)]
struct MdpJson {
    states: usize,
    initial: usize,
    alphabet: Vec<char>,
    transitions: Vec<MdpJsonTransition>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reject: Option<usize>,
}

/// Serialize to the documented JSON schema. Probabilities are "num/den"
/// strings, so a serialize/parse round trip is bit-exact.
pub fn to_json(m: &LabelledMdp) -> String {
    let mut transitions = Vec::new();
    for s in 0..m.num_states() {
        for (a, bundle) in m.bundles(s).iter().enumerate() {
            for t in bundle {
                transitions.push(MdpJsonTransition {
                    from: s,
                    action: a,
                    prob: rational_string(&t.prob),
                    label: t.label,
                    to: t.target,
                });
            }
        }
    }
    let doc = MdpJson {
        states: m.num_states(),
        initial: m.initial,
        alphabet: m.alphabet.symbols().to_vec(),
        transitions,
        reject: m.reject,
    };
    serde_json::to_string_pretty(&doc).expect("static schema")
}

pub fn from_json(text: &str) -> Result<LabelledMdp> {
    let doc: MdpJson =
        serde_json::from_str(text).map_err(|e| Error::input(format!("bad MDP JSON: {e}")))?;
    let alphabet = Alphabet::new(doc.alphabet)?;
    let mut m = LabelledMdp::new(alphabet, doc.states, doc.initial)?;
    // Group by (from, action); actions must be dense per state.
    let mut grouped: std::collections::BTreeMap<(usize, usize), Vec<MdpTransition>> =
        std::collections::BTreeMap::new();
    for t in doc.transitions {
        grouped.entry((t.from, t.action)).or_default().push(MdpTransition {
            prob: parse_rational(&t.prob)?,
            label: t.label,
            target: t.to,
        });
    }
    for ((from, action), bundle) in grouped {
        if action != m.num_actions(from) {
            return Err(Error::input(format!(
                "action indices for state {from} are not dense"
            )));
        }
        m.add_action(from, bundle)?;
    }
    if let Some(r) = doc.reject {
        if r >= m.num_states() {
            return Err(Error::input("reject state out of range"));
        }
        m.reject = Some(r);
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;

    #[test]
    fn sigma_chain_shape() {
        let m = build_sigma_mc(1, &[false]).unwrap();
        assert!(m.is_markov_chain());
        assert_eq!(m.num_states(), 3);
        assert_eq!(m.bundle_total(1, 0), Rational::one());
        assert_eq!(m.bundles(0)[0][0].label, '0');
        assert!(build_sigma_mc(2, &[true]).is_err());
    }

    #[test]
    fn example_chain_is_sigma_zero() {
        assert_eq!(example_chain(), build_sigma_mc(1, &[false]).unwrap());
    }

    #[test]
    fn random_chain_is_reproducible_and_stochastic() {
        let alphabet = Alphabet::standard();
        let a = build_random_mc(7, 4, &alphabet, 0.5).unwrap();
        let b = build_random_mc(7, 4, &alphabet, 0.5).unwrap();
        assert_eq!(a, b);
        for s in 0..a.num_states() {
            assert_eq!(a.bundle_total(s, 0), Rational::one());
        }
        assert_eq!(a.reachable_states().len(), a.num_states());
    }

    #[test]
    fn language_probability_of_example_chain_through_sn_dba() {
        let chain = example_chain();
        let dba = families::build_sn_dba(1).unwrap();
        let p = mc_language_probability(&chain, &dba).unwrap();
        assert_eq!(p, rational_from(1, 4));
    }

    #[test]
    fn sigma_family_formula() {
        for n in 1..=4 {
            let dba = families::build_sn_dba(n).unwrap();
            for bits in 0..(1u32 << n) {
                let sigma: Vec<bool> = (0..n).map(|i| bits >> (n - 1 - i) & 1 == 1).collect();
                let chain = build_sigma_mc(n, &sigma).unwrap();
                let p = mc_language_probability(&chain, &dba).unwrap();
                let mut expected = Rational::new(1.into(), (num_bigint::BigInt::from(1) << (n + 1)).into());
                for (i, &b) in sigma.iter().enumerate() {
                    if b {
                        expected += Rational::new(
                            1.into(),
                            (num_bigint::BigInt::from(1) << (i + 1)).into(),
                        );
                    }
                }
                assert_eq!(p, expected, "n={n}, bits={bits:b}");
            }
        }
    }

    #[test]
    fn sigma_family_values_pairwise_distinct() {
        // Exhaustive digit-uniqueness up to n = 10, straight off the formula.
        for n in 1..=10usize {
            let mut seen = std::collections::BTreeSet::new();
            for bits in 0..(1u64 << n) {
                let mut v = Rational::new(1.into(), (num_bigint::BigInt::from(1) << (n + 1)).into());
                for i in 0..n {
                    if bits >> (n - 1 - i) & 1 == 1 {
                        v += Rational::new(1.into(), (num_bigint::BigInt::from(1) << (i + 1)).into());
                    }
                }
                assert!(seen.insert(v), "duplicate value at n={n}");
            }
        }
    }

    #[test]
    fn unreachable_finals_probability_zero() {
        let chain = example_chain();
        let mut dba = families::build_sn_dba(1).unwrap();
        dba.finals.clear();
        let p = mc_language_probability(&chain, &dba).unwrap();
        assert!(p.is_zero());
    }

    #[test]
    fn nondeterministic_witness_is_contract_error() {
        let chain = example_chain();
        let s1 = families::build_sn(1).unwrap();
        assert!(mc_language_probability(&chain, &s1).is_err());
    }

    #[test]
    fn explicit_deficit_does_not_change_probability() {
        // A substochastic chain: half the mass at state 0 vanishes.
        let mut m = LabelledMdp::new(Alphabet::standard(), 2, 0).unwrap();
        m.add_action(
            0,
            vec![MdpTransition {
                prob: rational_from(1, 2),
                label: '1',
                target: 1,
            }],
        )
        .unwrap();
        m.add_action(
            1,
            vec![MdpTransition {
                prob: Rational::one(),
                label: '$',
                target: 1,
            }],
        )
        .unwrap();
        let dba = families::build_sn_dba(1).unwrap();
        let implicit = mc_language_probability(&m, &dba).unwrap();
        let explicit = mc_language_probability(&m.with_explicit_deficit(), &dba).unwrap();
        assert_eq!(implicit, explicit);
        assert_eq!(implicit, rational_from(1, 2));
    }

    #[test]
    fn rational_sum_is_associativity_independent() {
        let a = rational_from(1, 3);
        let b = rational_from(1, 6);
        let c = rational_from(1, 2);
        assert_eq!((&a + &b) + &c, &a + &(&b + &c));
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let m = build_sigma_mc(2, &[true, false]).unwrap();
        let text = to_json(&m);
        let back = from_json(&text).unwrap();
        assert_eq!(m, back);
    }

    /// Finite-horizon oracle: propagate the exact state distribution of the
    /// product chain for `depth` steps and accumulate the mass absorbed in
    /// accepting BSCCs. This enumerates cylinder sets without sharing any
    /// code with the linear solve.
    fn absorbed_accepting_mass(mc: &LabelledMdp, dba: &Automaton, depth: usize) -> Rational {
        let m = mc.with_explicit_deficit();
        // Distribution over (s, q).
        let mut dist: std::collections::BTreeMap<(usize, usize), Rational> =
            std::collections::BTreeMap::new();
        dist.insert((m.initial, dba.initial), Rational::one());
        let mut absorbed = Rational::zero();
        for _ in 0..depth {
            let mut next: std::collections::BTreeMap<(usize, usize), Rational> =
                std::collections::BTreeMap::new();
            for ((s, q), mass) in dist {
                // Absorbing accepting self-pair: (s,q) whose single bundle
                // loops to itself with probability 1 and q final.
                let bundle = &m.bundles(s)[0];
                let self_loop = bundle.len() == 1
                    && bundle[0].target == s
                    && dba.step(q, dba.alphabet.index_of(bundle[0].label).unwrap()) == Some(q);
                if self_loop && dba.finals.contains(&q) && m.reject != Some(s) {
                    absorbed += mass;
                    continue;
                }
                for t in bundle {
                    let q2 = dba.step(q, dba.alphabet.index_of(t.label).unwrap()).unwrap();
                    *next.entry((t.target, q2)).or_insert_with(Rational::zero) +=
                        &t.prob * &mass;
                }
            }
            dist = next;
        }
        absorbed
    }

    #[test]
    fn exact_value_matches_depth_bounded_enumeration() {
        let chain = example_chain();
        let dba = families::build_sn_dba(1).unwrap();
        let exact = mc_language_probability(&chain, &dba).unwrap();
        let lower = absorbed_accepting_mass(&chain, &dba, 20);
        let gap = &exact - &lower;
        assert!(gap >= Rational::zero());
        assert!(gap <= rational_from(1, 1024), "gap {gap} too large");
    }
}
