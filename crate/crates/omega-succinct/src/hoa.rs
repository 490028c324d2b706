//! A conservative subset of the HOA v1 text format.
//!
//! One atomic proposition per alphabet symbol; every edge is labelled with a
//! single proposition index `[i]` meaning "symbol i". Büchi automata carry
//! `acc-name: Buchi` with `Acceptance: 1 Inf(0)`; finite-word automata carry
//! `acc-name: none` with the same acceptance line, and the final set is
//! still acceptance set 0. Emission is canonical (states ascending, symbols
//! in alphabet order, targets ascending), so serialize → parse is the
//! identity on the structure, indices and edge order included.

use crate::alphabet::Alphabet;
use crate::automaton::{AcceptanceMode, Automaton};
use crate::error::{Error, Result};

pub fn to_hoa(a: &Automaton, name: Option<&str>) -> String {
    let mut out = String::new();
    out.push_str("HOA: v1\n");
    if let Some(n) = name {
        out.push_str(&format!("name: \"{n}\"\n"));
    }
    out.push_str(&format!("States: {}\n", a.num_states()));
    out.push_str(&format!("Start: {}\n", a.initial));
    out.push_str(&format!(
        "AP: {}{}\n",
        a.alphabet.len(),
        a.alphabet
            .symbols()
            .iter()
            .map(|c| format!(" \"{c}\""))
            .collect::<String>()
    ));
    out.push_str("Acceptance: 1 Inf(0)\n");
    out.push_str(match a.mode {
        AcceptanceMode::Buchi => "acc-name: Buchi\n",
        AcceptanceMode::Finite => "acc-name: none\n",
    });
    out.push_str("--BODY--\n");
    for q in 0..a.num_states() {
        if a.finals.contains(&q) {
            out.push_str(&format!("State: {q} {{0}}\n"));
        } else {
            out.push_str(&format!("State: {q}\n"));
        }
        for s in 0..a.alphabet.len() {
            for &t in a.successors(q, s) {
                out.push_str(&format!("[{s}] {t}\n"));
            }
        }
    }
    out.push_str("--END--\n");
    out
}

pub fn parse_hoa(text: &str) -> Result<Automaton> {
    let mut states: Option<usize> = None;
    let mut start: Option<usize> = None;
    let mut symbols: Option<Vec<char>> = None;
    let mut mode: Option<AcceptanceMode> = None;
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());

    let header_err = |msg: &str| Error::input(format!("bad HOA header: {msg}"));
    loop {
        let line = lines
            .next()
            .ok_or_else(|| header_err("missing --BODY--"))?;
        if line == "--BODY--" {
            break;
        }
        if let Some(rest) = line.strip_prefix("HOA:") {
            if rest.trim() != "v1" {
                return Err(header_err("only HOA v1 is supported"));
            }
        } else if let Some(rest) = line.strip_prefix("States:") {
            states = Some(
                rest.trim()
                    .parse()
                    .map_err(|_| header_err("unparsable States"))?,
            );
        } else if let Some(rest) = line.strip_prefix("Start:") {
            start = Some(
                rest.trim()
                    .parse()
                    .map_err(|_| header_err("unparsable Start"))?,
            );
        } else if let Some(rest) = line.strip_prefix("AP:") {
            let mut parts = rest.trim().split_whitespace();
            let count: usize = parts
                .next()
                .ok_or_else(|| header_err("empty AP"))?
                .parse()
                .map_err(|_| header_err("unparsable AP count"))?;
            let mut syms = Vec::new();
            for part in parts {
                let unquoted = part
                    .strip_prefix('"')
                    .and_then(|p| p.strip_suffix('"'))
                    .ok_or_else(|| header_err("AP names must be quoted"))?;
                let mut chars = unquoted.chars();
                let c = chars.next().ok_or_else(|| header_err("empty AP name"))?;
                if chars.next().is_some() {
                    return Err(header_err("AP names must be single symbols"));
                }
                syms.push(c);
            }
            if syms.len() != count {
                return Err(header_err("AP count does not match names"));
            }
            symbols = Some(syms);
        } else if let Some(rest) = line.strip_prefix("acc-name:") {
            mode = Some(match rest.trim() {
                "Buchi" => AcceptanceMode::Buchi,
                "none" => AcceptanceMode::Finite,
                other => return Err(header_err(&format!("unsupported acc-name '{other}'"))),
            });
        } else if line.starts_with("Acceptance:") || line.starts_with("name:") {
            // Fixed by construction; tolerated on input.
        } else {
            return Err(header_err(&format!("unsupported header line '{line}'")));
        }
    }

    let states = states.ok_or_else(|| header_err("missing States"))?;
    let start = start.ok_or_else(|| header_err("missing Start"))?;
    let symbols = symbols.ok_or_else(|| header_err("missing AP"))?;
    let mode = mode.ok_or_else(|| header_err("missing acc-name"))?;
    let alphabet = Alphabet::new(symbols)?;

    let mut finals = Vec::new();
    let mut edges: Vec<(usize, usize, usize)> = Vec::new();
    let mut current: Option<usize> = None;
    for line in lines {
        if line == "--END--" {
            break;
        }
        if let Some(rest) = line.strip_prefix("State:") {
            let rest = rest.trim();
            let (num_part, marker) = match rest.split_once(' ') {
                Some((n, m)) => (n, Some(m.trim())),
                None => (rest, None),
            };
            let q: usize = num_part
                .parse()
                .map_err(|_| Error::input(format!("bad state line '{line}'")))?;
            if let Some(m) = marker {
                if m == "{0}" {
                    finals.push(q);
                } else {
                    return Err(Error::input(format!("bad acceptance marker '{m}'")));
                }
            }
            current = Some(q);
        } else if let Some(rest) = line.strip_prefix('[') {
            let q = current.ok_or_else(|| Error::input("edge before any State line"))?;
            let (label, target) = rest
                .split_once(']')
                .ok_or_else(|| Error::input(format!("bad edge line '{line}'")))?;
            let s: usize = label
                .trim()
                .parse()
                .map_err(|_| Error::input(format!("bad edge label '{line}'")))?;
            if s >= alphabet.len() {
                return Err(Error::input(format!("edge label out of range '{line}'")));
            }
            let t: usize = target
                .trim()
                .parse()
                .map_err(|_| Error::input(format!("bad edge target '{line}'")))?;
            edges.push((q, s, t));
        } else {
            return Err(Error::input(format!("unsupported body line '{line}'")));
        }
    }

    let mut a = Automaton::new(alphabet, states, start, finals, mode)?;
    for (q, s, t) in edges {
        let sym = a.alphabet.symbol(s);
        a.add_edge(q, sym, t)?;
    }
    Ok(a)
}
