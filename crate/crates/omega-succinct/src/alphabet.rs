use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A finite word, stored as the symbols themselves.
pub type Word = Vec<char>;

/// An ordered finite alphabet of distinct symbols.
///
/// The declared order is fixed and is used for every lexicographic
/// tie-break in the crate (shortest-then-lexicographically-least witness
/// rules, canonical edge emission order, and so on).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    symbols: Vec<char>,
}

impl Alphabet {
    pub fn new(symbols: Vec<char>) -> Result<Self> {
        for (i, a) in symbols.iter().enumerate() {
            if symbols[i + 1..].contains(a) {
                return Err(Error::input(format!("duplicate symbol '{a}' in alphabet")));
            }
        }
        if symbols.is_empty() {
            return Err(Error::input("alphabet must be nonempty"));
        }
        Ok(Alphabet { symbols })
    }

    /// The three-symbol alphabet `0 < 1 < $` used by every concrete family.
    pub fn standard() -> Self {
        Alphabet {
            symbols: vec!['0', '1', '$'],
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    pub fn symbol(&self, idx: usize) -> char {
        self.symbols[idx]
    }

    pub fn index_of(&self, c: char) -> Option<usize> {
        self.symbols.iter().position(|&s| s == c)
    }

    /// Index of a symbol, or an input error naming the offending letter.
    pub fn require(&self, c: char) -> Result<usize> {
        self.index_of(c)
            .ok_or_else(|| Error::input(format!("letter '{c}' is not in the alphabet")))
    }

    /// Parse a word, validating every letter.
    pub fn word(&self, s: &str) -> Result<Word> {
        let w: Word = s.chars().collect();
        for &c in &w {
            self.require(c)?;
        }
        Ok(w)
    }
}

/// Render a word for messages and reports; the empty word prints as `ε`.
pub fn word_string(w: &[char]) -> String {
    if w.is_empty() {
        "ε".to_string()
    } else {
        w.iter().collect()
    }
}
