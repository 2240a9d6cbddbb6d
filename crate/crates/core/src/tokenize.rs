//! Rule-based lowercasing tokenizer.
//!
//! The line is lowercased, then split into maximal runs of word characters
//! (alphanumerics and `_`) and runs of one repeated punctuation character.
//! Whitespace separates tokens and never appears inside one.

use alloc::string::String;
use alloc::vec::Vec;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Class {
    Space,
    Word,
    Punct(char),
}

fn classify(c: char) -> Class {
    if c.is_whitespace() {
        Class::Space
    } else if c.is_alphanumeric() || c == '_' {
        Class::Word
    } else {
        Class::Punct(c)
    }
}

/// Lowercase `text` and split it into word and punctuation tokens.
///
/// ```
/// assert_eq!(
///     nws_core::tokenize("U.S.-Japan trade, again!"),
///     ["u", ".", "s", ".", "-", "japan", "trade", ",", "again", "!"],
/// );
/// ```
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut current_class = Class::Space;
    for c in text.chars().flat_map(char::to_lowercase) {
        let class = classify(c);
        if class != current_class && !current.is_empty() {
            tokens.push(core::mem::take(&mut current));
        }
        if class != Class::Space {
            current.push(c);
        }
        current_class = class;
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}
