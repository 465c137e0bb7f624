//! Plain-text inputs. A corpus holds one whitespace-tokenized sentence per
//! line; blank lines and lines starting with `#` are ignored. A text
//! document is a single token stream whose utterances end at sentence-final
//! punctuation.

use std::path::Path;

use crate::format::{read, LoadError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sentence {
    /// 1-based position among the corpus sentences.
    pub id: usize,
    pub tokens: Vec<String>,
}

impl Sentence {
    pub fn token_refs(&self) -> Vec<&str> {
        self.tokens.iter().map(String::as_str).collect()
    }
}

pub fn parse_corpus(text: &str) -> Vec<Sentence> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .enumerate()
        .map(|(i, l)| Sentence {
            id: i + 1,
            tokens: tokenize(l),
        })
        .collect()
}

pub fn load_corpus(path: &Path) -> Result<Vec<Sentence>, LoadError> {
    Ok(parse_corpus(&read(path)?))
}

pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace().map(String::from).collect()
}

/// Tokens of a text document, comment lines dropped.
pub fn load_text(path: &Path) -> Result<Vec<String>, LoadError> {
    let text = read(path)?;
    Ok(text
        .lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .flat_map(tokenize)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_skip_comments_and_blanks() {
        let c = parse_corpus("# header\nZenon sells printers\n\n  the printer appeared  \n");
        assert_eq!(c.len(), 2);
        assert_eq!(c[1].id, 2);
        assert_eq!(c[1].tokens, ["the", "printer", "appeared"]);
    }
}
