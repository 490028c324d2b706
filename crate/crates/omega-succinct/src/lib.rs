//! Finite-word and Büchi automata with exact probabilistic model checking.
//!
//! The crate has three layers:
//!
//! * automata machinery: [`Automaton`] plus determinization, minimization,
//!   equivalence, Büchi intersection/emptiness and a bounded lasso oracle
//!   (modules [`automaton`], [`dfa`], [`buchi`]);
//! * exact probabilistic models: labelled Markov chains and MDPs over
//!   arbitrary-precision rationals, the MDP×NBA product, maximal end
//!   components, and optimal reachability by policy iteration (modules
//!   [`mdp`], [`product`]);
//! * experiment drivers: the state-marking lower-bound construction for
//!   deterministic Büchi automata, ambiguity/separation checkers, and the
//!   good-for-MDPs succinctness experiments (modules [`marking`], [`props`],
//!   [`report`]).
//!
//! Concrete automaton families (`A_n`, `G_n`, `B_n`, `D_n`, `R_n`, `S_n`,
//! `R_n'`, `C_n`, and the `Γ_n` DFA) live in [`families`]. Everything is a
//! pure function of immutable inputs; values can be shared freely across
//! threads.
//!
//! See the `examples/` directory for a runnable tour of each capability; the
//! `omega-succinct` binary exposes the same functionality as subcommands.

pub mod alphabet;
pub mod automaton;
pub mod buchi;
pub mod cli;
pub mod dfa;
pub mod dot;
pub mod error;
pub mod families;
pub mod graph;
pub mod hoa;
pub mod linalg;
pub mod marking;
pub mod mdp;
pub mod product;
pub mod props;
pub mod report;

pub use alphabet::{Alphabet, Word};
pub use automaton::{AcceptanceMode, Automaton, FiniteRun, LassoWord};
pub use error::{Error, Result};
pub use mdp::{LabelledMdp, Rational};
pub use product::{ProductMdp, PositionalStrategy};
