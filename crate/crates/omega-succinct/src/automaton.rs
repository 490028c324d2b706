use std::collections::{BTreeSet, VecDeque};

use crate::alphabet::{word_string, Alphabet, Word};
use crate::error::{Error, Result};
use crate::graph;

/// Whether a run is judged on its last state (finite words) or on the set of
/// states it visits infinitely often (Büchi).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcceptanceMode {
    Finite,
    Buchi,
}

/// An ultimately periodic ω-word `stem · cycle^ω`. The cycle is nonempty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LassoWord {
    pub stem: Word,
    pub cycle: Word,
}

impl LassoWord {
    pub fn new(stem: Word, cycle: Word) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::input("lasso cycle must be nonempty"));
        }
        Ok(LassoWord { stem, cycle })
    }

    pub fn parse(alphabet: &Alphabet, stem: &str, cycle: &str) -> Result<Self> {
        Self::new(alphabet.word(stem)?, alphabet.word(cycle)?)
    }
}

impl std::fmt::Display for LassoWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}({})^ω",
            word_string(&self.stem),
            word_string(&self.cycle)
        )
    }
}

/// A finite run: the visited states interleaved with the letters read.
/// `states` has exactly one more entry than `letters`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteRun {
    pub states: Vec<usize>,
    pub letters: Word,
}

impl FiniteRun {
    /// Check that consecutive triples respect the transition relation of `a`.
    pub fn is_run_of(&self, a: &Automaton) -> bool {
        if self.states.len() != self.letters.len() + 1 {
            return false;
        }
        self.letters.iter().enumerate().all(|(i, &c)| {
            a.alphabet
                .index_of(c)
                .map(|s| a.successors(self.states[i], s).contains(&self.states[i + 1]))
                .unwrap_or(false)
        })
    }
}

/// A nondeterministic word automaton with dense state indices `0..n`.
///
/// The transition map is total: `δ(q, σ)` is a (possibly empty) set for every
/// state and symbol. An empty set means the automaton blocks; there is no
/// notion of an "absent" entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    pub alphabet: Alphabet,
    pub initial: usize,
    pub finals: BTreeSet<usize>,
    pub mode: AcceptanceMode,
    delta: Vec<Vec<BTreeSet<usize>>>,
}

impl Automaton {
    pub fn new(
        alphabet: Alphabet,
        num_states: usize,
        initial: usize,
        finals: impl IntoIterator<Item = usize>,
        mode: AcceptanceMode,
    ) -> Result<Self> {
        if initial >= num_states {
            return Err(Error::input("initial state out of range"));
        }
        let finals: BTreeSet<usize> = finals.into_iter().collect();
        if finals.iter().any(|&q| q >= num_states) {
            return Err(Error::input("final state out of range"));
        }
        let k = alphabet.len();
        Ok(Automaton {
            alphabet,
            initial,
            finals,
            mode,
            delta: vec![vec![BTreeSet::new(); k]; num_states],
        })
    }

    pub fn num_states(&self) -> usize {
        self.delta.len()
    }

    pub fn add_edge(&mut self, from: usize, symbol: char, to: usize) -> Result<()> {
        let s = self.alphabet.require(symbol)?;
        if from >= self.num_states() || to >= self.num_states() {
            return Err(Error::input("transition endpoint out of range"));
        }
        self.delta[from][s].insert(to);
        Ok(())
    }

    pub fn successors(&self, state: usize, symbol_idx: usize) -> &BTreeSet<usize> {
        &self.delta[state][symbol_idx]
    }

    pub fn successors_on(&self, state: usize, letter: char) -> Result<&BTreeSet<usize>> {
        Ok(&self.delta[state][self.alphabet.require(letter)?])
    }

    /// Number of transition triples `(q, σ, q')`.
    pub fn triple_count(&self) -> usize {
        self.delta
            .iter()
            .map(|row| row.iter().map(|t| t.len()).sum::<usize>())
            .sum()
    }

    /// The same automaton with a different initial state.
    pub fn rerooted(&self, state: usize) -> Result<Automaton> {
        if state >= self.num_states() {
            return Err(Error::input("reroot state out of range"));
        }
        let mut a = self.clone();
        a.initial = state;
        Ok(a)
    }

    pub fn is_deterministic(&self) -> bool {
        self.delta
            .iter()
            .all(|row| row.iter().all(|t| t.len() <= 1))
    }

    pub fn is_complete(&self) -> bool {
        self.delta
            .iter()
            .all(|row| row.iter().all(|t| !t.is_empty()))
    }

    /// All states are final, so every run is accepting.
    pub fn is_safety(&self) -> bool {
        self.finals.len() == self.num_states()
    }

    /// Exactly one final state, and it is a sink looping to itself on every
    /// symbol.
    pub fn is_reachability(&self) -> bool {
        if self.finals.len() != 1 {
            return false;
        }
        let f = *self.finals.iter().next().unwrap();
        self.delta[f]
            .iter()
            .all(|t| t.len() == 1 && t.contains(&f))
    }

    /// For deterministic automata: the unique successor, if any.
    pub fn step(&self, state: usize, symbol_idx: usize) -> Option<usize> {
        self.delta[state][symbol_idx].iter().next().copied()
    }

    /// For deterministic automata: run a word from `state`, returning the end
    /// state or `None` if the run blocks.
    pub fn run_word(&self, state: usize, word: &[char]) -> Result<Option<usize>> {
        let mut q = state;
        for &c in word {
            let s = self.alphabet.require(c)?;
            match self.step(q, s) {
                Some(next) => q = next,
                None => return Ok(None),
            }
        }
        Ok(Some(q))
    }

    /// States reachable from the initial state. Used to normalize
    /// constructions so that no dead states linger.
    pub fn reachable_states(&self) -> BTreeSet<usize> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        seen.insert(self.initial);
        queue.push_back(self.initial);
        while let Some(q) = queue.pop_front() {
            for row in &self.delta[q] {
                for &t in row {
                    if seen.insert(t) {
                        queue.push_back(t);
                    }
                }
            }
        }
        seen
    }

    /// Finite-word acceptance by forward subset simulation: true iff some run
    /// on `w` ends in a final state.
    pub fn accepts_finite(&self, word: &[char]) -> Result<bool> {
        if self.mode != AcceptanceMode::Finite {
            return Err(Error::contract(
                "finite-word acceptance requires finite acceptance mode",
            ));
        }
        let mut current: BTreeSet<usize> = BTreeSet::from([self.initial]);
        for &c in word {
            let s = self.alphabet.require(c)?;
            let mut next = BTreeSet::new();
            for &q in &current {
                next.extend(self.delta[q][s].iter().copied());
            }
            current = next;
            if current.is_empty() {
                return Ok(false);
            }
        }
        Ok(current.iter().any(|q| self.finals.contains(q)))
    }

    /// Büchi acceptance of an ultimately periodic word.
    ///
    /// Explores the finite graph of (state, position-in-lasso) pairs; the
    /// word is accepted iff a cycle containing a final-state vertex is
    /// reachable. Positions in the stem cannot lie on cycles, so any such
    /// cycle sits inside the cycle section.
    pub fn accepts_lasso(&self, lasso: &LassoWord) -> Result<bool> {
        if self.mode != AcceptanceMode::Buchi {
            return Err(Error::contract(
                "lasso acceptance requires Büchi acceptance mode",
            ));
        }
        if lasso.cycle.is_empty() {
            return Err(Error::input("lasso cycle must be nonempty"));
        }
        let stem: Vec<usize> = lasso
            .stem
            .iter()
            .map(|&c| self.alphabet.require(c))
            .collect::<Result<_>>()?;
        let cycle: Vec<usize> = lasso
            .cycle
            .iter()
            .map(|&c| self.alphabet.require(c))
            .collect::<Result<_>>()?;

        let period = stem.len() + cycle.len();
        let n = self.num_states();
        let vertex = |q: usize, pos: usize| q * period + pos;
        let letter_at = |pos: usize| {
            if pos < stem.len() {
                stem[pos]
            } else {
                cycle[pos - stem.len()]
            }
        };
        let next_pos = |pos: usize| {
            if pos + 1 < period {
                pos + 1
            } else {
                stem.len()
            }
        };

        // Reachable part of the (state, position) graph.
        let mut seen = vec![false; n * period];
        let start = vertex(self.initial, 0);
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        let mut edges: Vec<Vec<usize>> = vec![Vec::new(); n * period];
        while let Some(v) = queue.pop_front() {
            let (q, pos) = (v / period, v % period);
            let np = next_pos(pos);
            for &t in &self.delta[q][letter_at(pos)] {
                let w = vertex(t, np);
                edges[v].push(w);
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }

        let sccs = graph::tarjan_scc(&edges);
        for comp in &sccs {
            if !seen[comp[0]] {
                continue;
            }
            let has_internal_edge = comp.len() > 1
                || edges[comp[0]].contains(&comp[0]);
            if !has_internal_edge {
                continue;
            }
            if comp
                .iter()
                .any(|&v| seen[v] && self.finals.contains(&(v / period)))
            {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;

    #[test]
    fn an_accepts_defining_words() {
        let a1 = families::build_an(1).unwrap();
        assert!(a1.accepts_finite(&a1.alphabet.word("1$").unwrap()).unwrap());
        let a2 = families::build_an(2).unwrap();
        assert!(a2.accepts_finite(&a2.alphabet.word("10$").unwrap()).unwrap());
        assert!(!a2.accepts_finite(&a2.alphabet.word("01$").unwrap()).unwrap());
        assert!(!a2.accepts_finite(&a2.alphabet.word("00$").unwrap()).unwrap());
    }

    #[test]
    fn unknown_letter_is_input_error() {
        let a1 = families::build_an(1).unwrap();
        assert!(a1.accepts_finite(&['x']).is_err());
    }

    #[test]
    fn lasso_acceptance_on_g1_and_s1() {
        let g1 = families::build_gn(1).unwrap();
        let alph = g1.alphabet.clone();
        let l = LassoWord::parse(&alph, "", "1$").unwrap();
        assert!(g1.accepts_lasso(&l).unwrap());

        let s1 = families::build_sn(1).unwrap();
        assert!(s1
            .accepts_lasso(&LassoWord::parse(&alph, "1", "$").unwrap())
            .unwrap());
        assert!(!s1
            .accepts_lasso(&LassoWord::parse(&alph, "0", "$").unwrap())
            .unwrap());
    }

    #[test]
    fn gn_rejects_dollar_free_words() {
        for n in 1..=4 {
            let g = families::build_gn(n).unwrap();
            let l = LassoWord::parse(&g.alphabet.clone(), "", "0").unwrap();
            assert!(!g.accepts_lasso(&l).unwrap());
        }
    }

    #[test]
    fn empty_cycle_rejected() {
        let g1 = families::build_gn(1).unwrap();
        let bad = LassoWord {
            stem: vec!['1'],
            cycle: vec![],
        };
        assert!(g1.accepts_lasso(&bad).is_err());
    }

    #[test]
    fn reachability_covers_all_family_states() {
        for n in 1..=6 {
            let a = families::build_an(n).unwrap();
            assert_eq!(a.reachable_states().len(), a.num_states());
            let r = families::build_rn_prime(n).unwrap();
            assert_eq!(r.reachable_states().len(), r.num_states());
        }
    }

    #[test]
    fn unreachable_state_excluded() {
        let mut a = Automaton::new(Alphabet::standard(), 3, 0, [2], AcceptanceMode::Finite).unwrap();
        a.add_edge(0, '0', 2).unwrap();
        a.add_edge(1, '1', 2).unwrap(); // state 1 has no predecessors
        let reach = a.reachable_states();
        assert!(reach.contains(&0) && reach.contains(&2) && !reach.contains(&1));
    }
}
