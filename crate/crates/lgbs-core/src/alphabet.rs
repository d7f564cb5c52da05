//! Alphabets, symbols and words.

use crate::error::{LgbsError, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A symbol, stored as an index into its [`Alphabet`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Sym(pub u16);

impl fmt::Debug for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.0)
    }
}

/// A finite word over an alphabet.
pub type Word = Vec<Sym>;

/// Ordered finite set of distinct symbol names.  Symbol order is fixed at
/// construction and drives every deterministic ordering downstream.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(LgbsError::InvalidAlphabet("alphabet is empty".into()));
        }
        if names.len() > u16::MAX as usize {
            return Err(LgbsError::InvalidAlphabet("alphabet too large".into()));
        }
        for (i, a) in names.iter().enumerate() {
            if a.is_empty() {
                return Err(LgbsError::InvalidAlphabet("empty symbol name".into()));
            }
            if names[..i].contains(a) {
                return Err(LgbsError::InvalidAlphabet(format!("duplicate symbol {a:?}")));
            }
        }
        Ok(Alphabet { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn syms(&self) -> impl Iterator<Item = Sym> + Clone {
        (0..self.names.len() as u16).map(Sym)
    }

    pub fn name(&self, s: Sym) -> &str {
        &self.names[s.0 as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn lookup(&self, name: &str) -> Option<Sym> {
        self.names.iter().position(|n| n == name).map(|i| Sym(i as u16))
    }

    /// True when every symbol name is a single character, so words can be
    /// rendered as plain strings.
    pub fn single_char(&self) -> bool {
        self.names.iter().all(|n| n.chars().count() == 1)
    }

    /// Render a word; single-char alphabets concatenate, others join with `.`.
    pub fn format_word(&self, w: &[Sym]) -> String {
        if w.is_empty() {
            return "ε".to_string();
        }
        let sep = if self.single_char() { "" } else { "." };
        w.iter().map(|&s| self.name(s)).collect::<Vec<_>>().join(sep)
    }

    /// Parse a word given either as a string (single-char alphabets) or as a
    /// `.`-separated list of symbol names.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        if text.is_empty() || text == "ε" {
            return Ok(Vec::new());
        }
        let parts: Vec<String> = if self.single_char() && !text.contains('.') {
            text.chars().map(|c| c.to_string()).collect()
        } else {
            text.split('.').map(|s| s.to_string()).collect()
        };
        parts
            .iter()
            .map(|p| {
                self.lookup(p)
                    .ok_or_else(|| LgbsError::Parse(format!("unknown symbol {p:?} in word {text:?}")))
            })
            .collect()
    }
}

impl TryFrom<Vec<String>> for Alphabet {
    type Error = LgbsError;
    fn try_from(v: Vec<String>) -> Result<Self> {
        Alphabet::new(v)
    }
}

impl From<Alphabet> for Vec<String> {
    fn from(a: Alphabet) -> Vec<String> {
        a.names
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_empty() {
        assert!(Alphabet::new(["0", "1", "0"]).is_err());
        assert!(Alphabet::new(Vec::<String>::new()).is_err());
        assert!(Alphabet::new(["a", ""]).is_err());
    }

    #[test]
    fn word_round_trip() {
        let a = Alphabet::new(["0", "1"]).unwrap();
        let w = a.parse_word("0110").unwrap();
        assert_eq!(a.format_word(&w), "0110");
        assert_eq!(a.parse_word("ε").unwrap(), Vec::<Sym>::new());

        let b = Alphabet::new(["aa", "b"]).unwrap();
        let w = b.parse_word("aa.b.aa").unwrap();
        assert_eq!(b.format_word(&w), "aa.b.aa");
    }
}
