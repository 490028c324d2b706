//! Constructors for the concrete automaton families.
//!
//! All families live over the standard alphabet `{0, 1, $}` even when some
//! symbol is never read, so that products and equivalence checks always have
//! a common alphabet. State layouts are fixed: the chain states `q_0..q_n`
//! take indices `0..n` and the extra final state (where present) takes index
//! `n + 1`, which keeps structural-equality tests deterministic.
//!
//! Language summary, writing `#` for the position of a letter counted
//! backwards from the first `$`:
//!
//! * `A_n`, `B_n` (finite words): the n-th letter before the final `$` is 1.
//! * `Γ_n` DFA (finite words): that letter is 0.
//! * `G_n`, `D_n` (ω-words): infinitely many such hits.
//! * `R_n`, `R_n'` (ω-words): some `$` occurs and the n-th letter before the
//!   first `$` is 1.
//! * `S_n` (ω-words): either no `$` at all, or a 1 followed by only `$`s.
//! * `C_n` (finite words): at least n leading bits, then bits, then one `$`.

use crate::alphabet::Alphabet;
use crate::automaton::{AcceptanceMode, Automaton};
use crate::buchi;
use crate::dfa;
use crate::error::{Error, Result};

fn check_n(n: usize) -> Result<()> {
    if n < 1 {
        return Err(Error::input("family parameter n must be at least 1"));
    }
    Ok(())
}

/// The (n+2)-state NFA whose finite-word language is "the n-th letter before
/// the final `$` is 1". States: `q_0..q_n` then `f`.
pub fn build_an(n: usize) -> Result<Automaton> {
    check_n(n)?;
    let f = n + 1;
    let mut a = Automaton::new(Alphabet::standard(), n + 2, 0, [f], AcceptanceMode::Finite)?;
    a.add_edge(0, '0', 0)?;
    a.add_edge(0, '1', 0)?;
    a.add_edge(0, '1', 1)?;
    for i in 1..n {
        a.add_edge(i, '0', i + 1)?;
        a.add_edge(i, '1', i + 1)?;
    }
    a.add_edge(n, '$', f)?;
    Ok(a)
}

/// The (n+1)-state NFA for "the n-th to the last letter is 1" over bits
/// only: like `A_n` but `q_n` is final and has no outgoing transitions.
pub fn build_an_prime(n: usize) -> Result<Automaton> {
    check_n(n)?;
    let mut a = Automaton::new(Alphabet::standard(), n + 1, 0, [n], AcceptanceMode::Finite)?;
    a.add_edge(0, '0', 0)?;
    a.add_edge(0, '1', 0)?;
    a.add_edge(0, '1', 1)?;
    for i in 1..n {
        a.add_edge(i, '0', i + 1)?;
        a.add_edge(i, '1', i + 1)?;
    }
    Ok(a)
}

/// The (n+2)-state NBA accepting ω-words with infinitely many `1·bits^(n−1)·$`
/// hits: `A_n` with every blocking pair redirected to `q_0` (3n+7 transition
/// triples).
pub fn build_gn(n: usize) -> Result<Automaton> {
    check_n(n)?;
    let f = n + 1;
    let mut g = Automaton::new(Alphabet::standard(), n + 2, 0, [f], AcceptanceMode::Buchi)?;
    g.add_edge(0, '0', 0)?;
    g.add_edge(0, '1', 0)?;
    g.add_edge(0, '1', 1)?;
    g.add_edge(0, '$', 0)?;
    for i in 1..n {
        g.add_edge(i, '0', i + 1)?;
        g.add_edge(i, '1', i + 1)?;
        g.add_edge(i, '$', 0)?;
    }
    g.add_edge(n, '0', 0)?;
    g.add_edge(n, '1', 0)?;
    g.add_edge(n, '$', f)?;
    g.add_edge(f, '0', 0)?;
    g.add_edge(f, '1', 0)?;
    g.add_edge(f, '$', 0)?;
    Ok(g)
}

/// Deterministic finite-word automaton for the language of `A_n`: the subset
/// construction of `A_n'` plus a fresh final state `f` (last index) fed by
/// `$`-transitions from every accepting subset. `f` has no outgoing
/// transitions.
pub fn build_bn(n: usize) -> Result<Automaton> {
    check_n(n)?;
    let det = dfa::subset_construction(&build_an_prime(n)?)?;
    let f = det.num_states();
    let mut b = Automaton::new(
        det.alphabet.clone(),
        f + 1,
        det.initial,
        [f],
        AcceptanceMode::Finite,
    )?;
    for q in 0..det.num_states() {
        for s in 0..det.alphabet.len() {
            for &t in det.successors(q, s) {
                b.add_edge(q, det.alphabet.symbol(s), t)?;
            }
        }
        if det.finals.contains(&q) {
            b.add_edge(q, '$', f)?;
        }
    }
    Ok(b)
}

/// The complete DBA for the ω-language of `G_n`, obtained from `B_n` the same
/// way `G_n` is obtained from `A_n`.
pub fn build_dn(n: usize) -> Result<Automaton> {
    Ok(buchi::loopify(&build_bn(n)?))
}

/// The (n+2)-state reachability NBA (single final sink, 2n+5 triples) for
/// ω-words whose n-th letter before the first `$` is 1.
pub fn build_rn(n: usize) -> Result<Automaton> {
    check_n(n)?;
    let f = n + 1;
    let mut r = Automaton::new(Alphabet::standard(), n + 2, 0, [f], AcceptanceMode::Buchi)?;
    r.add_edge(0, '0', 0)?;
    r.add_edge(0, '1', 0)?;
    r.add_edge(0, '1', 1)?;
    for i in 1..n {
        r.add_edge(i, '0', i + 1)?;
        r.add_edge(i, '1', i + 1)?;
    }
    r.add_edge(n, '$', f)?;
    r.add_edge(f, '0', f)?;
    r.add_edge(f, '1', f)?;
    r.add_edge(f, '$', f)?;
    Ok(r)
}

/// The (n+1)-state safety NBA (all states final) for ω-words that contain
/// either no `$`, or a 1 followed by only `$`s.
pub fn build_sn(n: usize) -> Result<Automaton> {
    check_n(n)?;
    let mut s = Automaton::new(
        Alphabet::standard(),
        n + 1,
        0,
        0..=n,
        AcceptanceMode::Buchi,
    )?;
    s.add_edge(0, '0', 0)?;
    s.add_edge(0, '1', 0)?;
    s.add_edge(0, '1', 1)?;
    for i in 1..n {
        s.add_edge(i, '0', i + 1)?;
        s.add_edge(i, '1', i + 1)?;
    }
    s.add_edge(n, '$', n)?;
    Ok(s)
}

/// The (n+2)-state separating NBA for the language of `R_n` (3(n+2)
/// triples). `q_n` fans out on `$` to every chain state and to `f`; `f`
/// loops on bits and can re-enter the chain on a 0. Finals are `q_n` and
/// `f`.
pub fn build_rn_prime(n: usize) -> Result<Automaton> {
    check_n(n)?;
    let f = n + 1;
    let mut r = Automaton::new(
        Alphabet::standard(),
        n + 2,
        0,
        [n, f],
        AcceptanceMode::Buchi,
    )?;
    r.add_edge(0, '0', 0)?;
    r.add_edge(0, '1', 0)?;
    r.add_edge(0, '1', 1)?;
    for i in 1..n {
        r.add_edge(i, '0', i + 1)?;
        r.add_edge(i, '1', i + 1)?;
    }
    for t in 0..=n {
        r.add_edge(n, '$', t)?;
    }
    r.add_edge(n, '$', f)?;
    r.add_edge(f, '0', f)?;
    r.add_edge(f, '0', 1)?;
    r.add_edge(f, '1', f)?;
    Ok(r)
}

/// The (n+2)-state DFA for "at least n bits, then bits, then a single `$`".
pub fn build_cn(n: usize) -> Result<Automaton> {
    check_n(n)?;
    let f = n + 1;
    let mut c = Automaton::new(Alphabet::standard(), n + 2, 0, [f], AcceptanceMode::Finite)?;
    for i in 0..n {
        c.add_edge(i, '0', i + 1)?;
        c.add_edge(i, '1', i + 1)?;
    }
    c.add_edge(n, '0', n)?;
    c.add_edge(n, '1', n)?;
    c.add_edge(n, '$', f)?;
    Ok(c)
}

/// Deterministic automaton for the complement-side witness language: words
/// whose n-th letter before the final `$` is 0. Built by subset
/// construction from the evident NFA.
pub fn build_gamma_dfa(n: usize) -> Result<Automaton> {
    check_n(n)?;
    let f = n + 1;
    let mut nfa = Automaton::new(Alphabet::standard(), n + 2, 0, [f], AcceptanceMode::Finite)?;
    nfa.add_edge(0, '0', 0)?;
    nfa.add_edge(0, '1', 0)?;
    nfa.add_edge(0, '0', 1)?;
    for i in 1..n {
        nfa.add_edge(i, '0', i + 1)?;
        nfa.add_edge(i, '1', i + 1)?;
    }
    nfa.add_edge(n, '$', f)?;
    dfa::subset_construction(&nfa)
}

/// Complete DBA for the language of `S_n`, via prefix determinization.
pub fn build_sn_dba(n: usize) -> Result<Automaton> {
    buchi::determinize_prefix_language(&build_sn(n)?)
}

/// Complete DBA for the language of `R_n`, via prefix determinization.
pub fn build_rn_dba(n: usize) -> Result<Automaton> {
    buchi::determinize_prefix_language(&build_rn(n)?)
}

/// Generate a family by CLI name.
pub fn by_name(name: &str, n: usize) -> Result<Automaton> {
    match name {
        "an" => build_an(n),
        "an-prime" => build_an_prime(n),
        "gn" => build_gn(n),
        "bn" => build_bn(n),
        "dn" => build_dn(n),
        "rn" => build_rn(n),
        "sn" => build_sn(n),
        "rn-prime" => build_rn_prime(n),
        "cn" => build_cn(n),
        "gamma" => build_gamma_dfa(n),
        "sn-dba" => build_sn_dba(n),
        "rn-dba" => build_rn_dba(n),
        other => Err(Error::input(format!(
            "unknown family '{other}' (expected one of an, an-prime, gn, bn, dn, rn, sn, rn-prime, cn, gamma, sn-dba, rn-dba)"
        ))),
    }
}

pub const FAMILY_NAMES: &[&str] = &[
    "an", "an-prime", "gn", "bn", "dn", "rn", "sn", "rn-prime", "cn", "gamma", "sn-dba", "rn-dba",
];
