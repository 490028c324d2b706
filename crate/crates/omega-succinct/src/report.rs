//! The reproduction suite: every headline check as a library function, with
//! JSON-serializable results and a one-line-per-check human summary.
//!
//! All probability comparisons are exact — the engine is rational
//! throughout, so there is no tolerance anywhere. Reports carry only exact
//! rational strings and integers; wall-clock timing goes to the human
//! summary, never into the JSON, so reports are byte-stable across runs.

use serde::Serialize;

use crate::automaton::LassoWord;
use crate::buchi;
use crate::dfa;
use crate::error::Result;
use crate::families;
use crate::marking;
use crate::mdp::{example_chain, rational_from, rational_string};
use crate::product::{psem, psyn};
use crate::props::{self, LanguageFlavor};

#[derive(Debug, Clone, Serialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Assertion {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Assertion {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: String,
    pub passed: bool,
    pub assertions: Vec<Assertion>,
}

impl CriterionResult {
    fn collect(id: usize, name: &str, assertions: Vec<Assertion>) -> Self {
        let passed = assertions.iter().all(|a| a.passed);
        CriterionResult {
            id,
            name: name.to_string(),
            passed,
            assertions,
        }
    }

    pub fn summary_line(&self) -> String {
        let mark = if self.passed { "PASS" } else { "FAIL" };
        format!("criterion {}: {} — {}", self.id, mark, self.name)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FullReport {
    pub version: String,
    pub max_n: usize,
    pub criteria: Vec<CriterionResult>,
    pub all_passed: bool,
}

/// Criterion 1: the worked-example chain yields the published values — the
/// semantic value 1/4 through a deterministic automaton for the safety
/// language, and the syntactic value 1/8 for the safety NBA itself.
pub fn criterion_1() -> Result<CriterionResult> {
    let chain = example_chain();
    let mut assertions = Vec::new();

    let sem = psem(&chain, &families::build_sn_dba(1)?)?;
    let expected_sem = rational_from(1, 4);
    assertions.push(Assertion::new(
        "semantic value of the example chain is 1/4",
        sem == expected_sem,
        format!("computed {}", rational_string(&sem)),
    ));

    let s1 = families::build_sn(1)?;
    let syn = psyn(&chain, &s1)?;
    let expected_syn = rational_from(1, 8);
    // Under letter-informed resolution the optimum is 1/6 (the 0-mass is
    // retained and retried); 1/8 is reached only if committing to the jump
    // also discards the 0-mass, which is the blind-commitment product.
    let committed = crate::product::psyn_committed(&chain, &s1)?;
    assertions.push(Assertion::new(
        "syntactic value of the example chain is 1/8",
        syn == expected_syn,
        format!(
            "computed {} with letter-informed resolution ({} under blind commitment)",
            rational_string(&syn),
            rational_string(&committed)
        ),
    ));

    Ok(CriterionResult::collect(
        1,
        "worked-example chain values",
        assertions,
    ))
}

/// Criterion 2: determinizing and minimizing the chain NFA blows up to at
/// least 2^n states, for n up to 5. Exact sizes are logged.
pub fn criterion_2(max_n: usize) -> Result<CriterionResult> {
    let mut assertions = Vec::new();
    for n in 1..=max_n.min(5) {
        let det = dfa::subset_construction(&families::build_an(n)?)?;
        let min = dfa::hopcroft_minimize(&dfa::complete_with_sink(&det))?;
        assertions.push(Assertion::new(
            format!("minimal DFA for n={n} has at least 2^{n} states"),
            min.num_states() >= (1 << n),
            format!("exact size {}", min.num_states()),
        ));
    }
    Ok(CriterionResult::collect(
        2,
        "deterministic blow-up of the chain NFA",
        assertions,
    ))
}

/// The curated lasso set: accepted words embed a `1·bits^(n-1)·$` hit in
/// the cycle; rejected words are `$`-free, stop hitting, or only ever place
/// a 0 at the decisive position.
fn curated_lassos(n: usize) -> Vec<(LassoWord, bool)> {
    let hit = |mid: char| -> Vec<char> {
        let mut w = vec!['1'];
        w.extend(std::iter::repeat(mid).take(n - 1));
        w.push('$');
        w
    };
    let zeros_dollar = |k: usize| -> Vec<char> {
        let mut w = vec!['0'; k];
        w.push('$');
        w
    };
    let mut set = vec![
        (LassoWord { stem: vec![], cycle: hit('0') }, true),
        (LassoWord { stem: vec![], cycle: hit('1') }, true),
        (
            LassoWord {
                stem: vec!['0', '1', '1', '0'],
                cycle: hit('0'),
            },
            true,
        ),
        (
            LassoWord {
                stem: vec![],
                cycle: {
                    let mut w = hit('0');
                    w.extend_from_slice(&['0', '$']);
                    w
                },
            },
            true,
        ),
        // Rejections.
        (LassoWord { stem: vec![], cycle: vec!['0'] }, false),
        (LassoWord { stem: vec!['1'], cycle: vec!['1', '0'] }, false),
        (LassoWord { stem: hit('0'), cycle: vec!['0'] }, false),
        (LassoWord { stem: vec![], cycle: zeros_dollar(n) }, false),
        (LassoWord { stem: vec![], cycle: zeros_dollar(n - 1) }, false),
    ];
    set.dedup();
    set
}

/// Criterion 3: the loopified determinization is complete (n ≤ 5), and the
/// guessing NBA decides the curated lasso set correctly (n ≤ 4); the DBA
/// agrees with it on that set.
pub fn criterion_3(max_n: usize) -> Result<CriterionResult> {
    let mut assertions = Vec::new();
    for n in 1..=max_n.min(5) {
        let d = families::build_dn(n)?;
        assertions.push(Assertion::new(
            format!("DBA for n={n} is complete"),
            d.is_complete(),
            format!("{} states", d.num_states()),
        ));
    }
    for n in 1..=max_n.min(4) {
        let g = families::build_gn(n)?;
        let d = families::build_dn(n)?;
        for (lasso, expected) in curated_lassos(n) {
            let got = g.accepts_lasso(&lasso)?;
            assertions.push(Assertion::new(
                format!("n={n}: guessing NBA on {lasso}"),
                got == expected,
                format!("expected {expected}, got {got}"),
            ));
            let via_dba = d.accepts_lasso(&lasso)?;
            assertions.push(Assertion::new(
                format!("n={n}: DBA agrees on {lasso}"),
                via_dba == expected,
                format!("expected {expected}, got {via_dba}"),
            ));
        }
    }
    Ok(CriterionResult::collect(
        3,
        "completeness and curated lasso verdicts",
        assertions,
    ))
}

/// Criterion 4: on seeded random chains the syntactic value of the guessing
/// NBA exactly equals the semantic value of its deterministic counterpart —
/// 50 seeds at n=1, 20 at n=2, 10 at n=3.
pub fn criterion_4(max_n: usize, seed_base: u64) -> Result<CriterionResult> {
    let mut assertions = Vec::new();
    for (n, count) in [(1usize, 50u64), (2, 20), (3, 10)] {
        if n > max_n {
            continue;
        }
        let seeds: Vec<u64> = (seed_base..seed_base + count).collect();
        let report = props::gfm_spot_check(n, &seeds)?;
        let failures: Vec<String> = report
            .rows
            .iter()
            .filter(|r| !r.equal)
            .map(|r| format!("seed {}: psyn {} ≠ psem {}", r.seed, r.psyn, r.psem))
            .collect();
        assertions.push(Assertion::new(
            format!("n={n}: {count} random chains give exact equality"),
            report.all_equal,
            if failures.is_empty() {
                "all equal".to_string()
            } else {
                failures.join("; ")
            },
        ));
    }
    Ok(CriterionResult::collect(
        4,
        "good-for-MDPs spot check on random chains",
        assertions,
    ))
}

/// Criterion 5: the marking suite for n ≤ 5 — closure after phase 2 and at
/// termination, an unmarked state exists, structural and enumerated Γ
/// rejection, a universal state whose gated language recovers the base
/// language, and both size bounds.
pub fn criterion_5(max_n: usize) -> Result<CriterionResult> {
    let mut assertions = Vec::new();
    for n in 1..=max_n.min(5) {
        let report = marking::marking_bound_report(n)?;
        assertions.push(Assertion::new(
            format!("n={n}: unmarked closure after phase 2"),
            report.closure_after_phase2,
            "",
        ));
        assertions.push(Assertion::new(
            format!("n={n}: unmarked closure at termination"),
            report.closure_at_end,
            "",
        ));
        assertions.push(Assertion::new(
            format!("n={n}: at least one state unmarked"),
            report.some_state_unmarked,
            format!("{} unmarked", report.unmarked.len()),
        ));
        assertions.push(Assertion::new(
            format!("n={n}: no marked state Γ-reachable from the collapse"),
            report.gamma_rejection_structural,
            "structural product check",
        ));
        assertions.push(Assertion::new(
            format!(
                "n={n}: collapse rejects every Γ word up to length {}",
                report.gamma_rejection_enumerated_to
            ),
            report.gamma_rejection_enumerated,
            "exhaustive enumeration",
        ));
        assertions.push(Assertion::new(
            format!("n={n}: a universal state exists"),
            report.universal_state.is_some(),
            format!("state {:?}", report.universal_state),
        ));
        assertions.push(Assertion::new(
            format!("n={n}: gated universal language equals the base language"),
            report.intersection_recovers_language,
            "",
        ));
        assertions.push(Assertion::new(
            format!("n={n}: collapse size meets 2^n/(n+2)"),
            report.p_size_meets_bound,
            format!("{} vs {}", report.p_size, report.lower_bound),
        ));
        assertions.push(Assertion::new(
            format!("n={n}: DBA size meets 2^n/(n+2)"),
            report.dba_meets_bound,
            format!("{} vs {}", report.dba_states, report.lower_bound),
        ));
    }
    Ok(CriterionResult::collect(
        5,
        "marking algorithm suite",
        assertions,
    ))
}

/// Criterion 6: the 2^n-chain experiment for n ≤ 8 — every chain value
/// matches the closed form and the values are pairwise distinct, the
/// deterministic safety candidate attains them all and pairs the branching
/// state with 2^n distinct automaton states, while the small safety and
/// reachability NBAs each fall short somewhere.
pub fn criterion_6(max_n: usize) -> Result<CriterionResult> {
    let mut assertions = Vec::new();
    for n in 1..=max_n.min(8) {
        let det = families::build_sn_dba(n)?;
        let det_report = props::gfm_lower_bound_experiment(n, &det, LanguageFlavor::Safety)?;
        // Semantic values were cross-checked against the closed form inside
        // the experiment; distinctness is checked here.
        let mut values: Vec<&String> = det_report.rows.iter().map(|r| &r.semantic).collect();
        values.sort();
        values.dedup();
        assertions.push(Assertion::new(
            format!("n={n}: 2^{n} semantic values match the closed form and are distinct"),
            values.len() == det_report.rows.len(),
            format!("{} distinct of {}", values.len(), det_report.rows.len()),
        ));
        assertions.push(Assertion::new(
            format!("n={n}: deterministic candidate attains every value"),
            det_report.attained_all,
            format!("{} shortfalls", det_report.shortfall_count),
        ));
        assertions.push(Assertion::new(
            format!("n={n}: branching state paired with 2^{n} distinct automaton states"),
            det_report.pairings_distinct == Some(true),
            format!("{:?}", det_report.pairings_distinct),
        ));

        let sn = families::build_sn(n)?;
        let sn_report = props::gfm_lower_bound_experiment(n, &sn, LanguageFlavor::Safety)?;
        assertions.push(Assertion::new(
            format!("n={n}: safety NBA falls short on some chain"),
            sn_report.shortfall_count > 0,
            format!("{} shortfalls", sn_report.shortfall_count),
        ));

        let rn = families::build_rn(n)?;
        let rn_report = props::gfm_lower_bound_experiment(n, &rn, LanguageFlavor::Reach)?;
        assertions.push(Assertion::new(
            format!("n={n}: reachability NBA falls short on some chain"),
            rn_report.shortfall_count > 0,
            format!("{} shortfalls", rn_report.shortfall_count),
        ));
    }
    Ok(CriterionResult::collect(
        6,
        "2^n lower-bound experiment on the chain family",
        assertions,
    ))
}

/// Criterion 7: the classification and ambiguity properties of the small
/// families for n ≤ 5, the bounded-lasso equivalence of the two
/// reachability-language automata, and the two drawn single-n claims.
pub fn criterion_7(max_n: usize) -> Result<CriterionResult> {
    let mut assertions = Vec::new();
    for n in 1..=max_n.min(5) {
        let s = families::build_sn(n)?;
        assertions.push(Assertion::new(
            format!("n={n}: safety NBA is strongly unambiguous"),
            props::is_strongly_unambiguous(&s)?.0,
            "",
        ));
        assertions.push(Assertion::new(
            format!("n={n}: safety NBA is separating"),
            props::is_separating(&s)?.0,
            "",
        ));
        assertions.push(Assertion::new(
            format!("n={n}: safety predicate holds"),
            s.is_safety(),
            "",
        ));

        let r = families::build_rn(n)?;
        assertions.push(Assertion::new(
            format!("n={n}: reachability NBA is unambiguous"),
            props::is_unambiguous(&r)?.0,
            "",
        ));
        assertions.push(Assertion::new(
            format!("n={n}: reachability predicate holds"),
            r.is_reachability(),
            "",
        ));

        let rp = families::build_rn_prime(n)?;
        assertions.push(Assertion::new(
            format!("n={n}: separating variant is separating"),
            props::is_separating(&rp)?.0,
            "",
        ));
        let (eq, counter) = buchi::buchi_equiv_on_lassos(&r, &rp, 2 * n + 3)?;
        assertions.push(Assertion::new(
            format!("n={n}: both reachability-language automata agree on lassos"),
            eq,
            counter
                .map(|l| format!("disagree on {l}"))
                .unwrap_or_default(),
        ));
    }
    let g1 = families::build_gn(1)?;
    assertions.push(Assertion::new(
        "guessing NBA at n=1 is ambiguous",
        !props::is_unambiguous(&g1)?.0,
        "",
    ));
    assertions.push(Assertion::new(
        "guessing NBA at n=1 is not separating",
        !props::is_separating(&g1)?.0,
        "",
    ));
    let s1 = families::build_sn(1)?;
    assertions.push(Assertion::new(
        "safety NBA at n=1 is separating and unambiguous",
        props::is_separating(&s1)?.0 && props::is_unambiguous(&s1)?.0,
        "",
    ));
    Ok(CriterionResult::collect(
        7,
        "ambiguity, separation and classification properties",
        assertions,
    ))
}

/// Criterion 8: structural state/transition counts for n ≤ 10. The safety
/// family's transition count is reported (letter-granular triples give
/// 2n+2, versus the coarser published count of 2n) but deliberately not
/// asserted against either convention.
pub fn criterion_8(max_n: usize) -> Result<CriterionResult> {
    let mut assertions = Vec::new();
    let mut sn_note = String::new();
    for n in 1..=max_n.min(10) {
        let g = families::build_gn(n)?;
        assertions.push(Assertion::new(
            format!("n={n}: guessing NBA has n+2 states and 3n+7 triples"),
            g.num_states() == n + 2 && g.triple_count() == 3 * n + 7,
            format!("{} states, {} triples", g.num_states(), g.triple_count()),
        ));
        let r = families::build_rn(n)?;
        assertions.push(Assertion::new(
            format!("n={n}: reachability NBA has n+2 states and 2n+5 triples"),
            r.num_states() == n + 2 && r.triple_count() == 2 * n + 5,
            format!("{} states, {} triples", r.num_states(), r.triple_count()),
        ));
        let rp = families::build_rn_prime(n)?;
        assertions.push(Assertion::new(
            format!("n={n}: separating variant has n+2 states and 3n+6 triples"),
            rp.num_states() == n + 2 && rp.triple_count() == 3 * n + 6,
            format!("{} states, {} triples", rp.num_states(), rp.triple_count()),
        ));
        let s = families::build_sn(n)?;
        assertions.push(Assertion::new(
            format!("n={n}: safety NBA has n+1 states"),
            s.num_states() == n + 1,
            format!("{} states", s.num_states()),
        ));
        sn_note = format!(
            "safety NBA transition count at n={n}: {} letter-granular triples (published coarse count: {}); reported, not asserted",
            s.triple_count(),
            2 * n
        );
        let c = families::build_cn(n)?;
        assertions.push(Assertion::new(
            format!("n={n}: length-gate DFA has n+2 states"),
            c.num_states() == n + 2,
            format!("{} states", c.num_states()),
        ));
    }
    assertions.push(Assertion::new(
        "safety NBA transition-count discrepancy reported",
        true,
        sn_note,
    ));
    Ok(CriterionResult::collect(
        8,
        "structural state and transition counts",
        assertions,
    ))
}

/// Criterion 9: what is documented rather than reproduced. The asymptotic
/// gap against good-for-games automata rests on an externally published
/// quadratic bound and is recorded here only; the search for minimal
/// good-for-MDPs automata is replaced by the value-distinctness certificate
/// of criterion 6, whose presence this criterion re-checks at a small size.
pub fn criterion_9() -> Result<CriterionResult> {
    let det = families::build_sn_dba(2)?;
    let report = props::gfm_lower_bound_experiment(2, &det, LanguageFlavor::Safety)?;
    let assertions = vec![
        Assertion::new(
            "good-for-games gap documented, not measured",
            true,
            "the gap to good-for-games automata follows from the published quadratic \
             relation between those automata and deterministic ones; no procedure for \
             deciding the good-for-games property is implemented",
        ),
        Assertion::new(
            "minimal-automaton search replaced by the distinctness certificate",
            report.attained_all && report.pairings_distinct == Some(true),
            "value-distinctness certificate re-checked at n=2",
        ),
    ];
    Ok(CriterionResult::collect(
        9,
        "documented substitutions",
        assertions,
    ))
}

/// Run every criterion, capped by `max_n` where a criterion is a family
/// sweep. Each criterion keeps its own stated ceiling.
pub fn reproduce_all(max_n: usize, seed_base: u64) -> Result<FullReport> {
    let criteria = vec![
        criterion_1()?,
        criterion_2(max_n)?,
        criterion_3(max_n)?,
        criterion_4(max_n, seed_base)?,
        criterion_5(max_n)?,
        criterion_6(max_n)?,
        criterion_7(max_n)?,
        criterion_8(max_n.max(10))?,
        criterion_9()?,
    ];
    let all_passed = criteria.iter().all(|c| c.passed);
    Ok(FullReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        max_n,
        criteria,
        all_passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curated_set_is_well_formed() {
        for n in 1..=4 {
            for (lasso, _) in curated_lassos(n) {
                assert!(!lasso.cycle.is_empty());
            }
        }
    }

    #[test]
    fn structural_counts_pass() {
        let c = criterion_8(10).unwrap();
        assert!(c.passed, "{:#?}", c.assertions);
    }

    #[test]
    fn documentation_criterion_passes() {
        assert!(criterion_9().unwrap().passed);
    }
}
