//! Edit trees and string distances.
//!
//! An edit tree describes how to turn a source string into a target string.
//! The tree is built by finding the longest common substring of the two
//! strings, keeping it as a copied middle part and recursing into the pairs of
//! prefixes and suffixes around it. A pair without any common character becomes
//! a substitution leaf. Interior nodes only store the lengths of the source
//! prefix and suffix, so a tree learned from one word pair can be applied to
//! other words.
//!
//! All lengths and offsets count Unicode scalar values, not bytes.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Position and length of a longest common substring, in characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LcsMatch {
    pub start_a: usize,
    pub start_b: usize,
    pub len: usize,
}

/// Longest common substring of `a` and `b`.
///
/// Among several longest matches the one starting leftmost in `a` wins, then
/// leftmost in `b`. With no common character the result is `(0, 0, 0)`.
pub fn lcs(a: &str, b: &str) -> LcsMatch {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    lcs_chars(&a, &b)
}

fn lcs_chars(a: &[char], b: &[char]) -> LcsMatch {
    let mut best = LcsMatch {
        start_a: 0,
        start_b: 0,
        len: 0,
    };
    // run[j + 1] = length of the common run ending at a[i], b[j].
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        for (j, cb) in b.iter().enumerate() {
            cur[j + 1] = if ca == cb { prev[j] + 1 } else { 0 };
            // Scanning end positions in (i, j) order and replacing only on a
            // strictly longer run keeps the smallest start_a, then start_b.
            if cur[j + 1] > best.len {
                best = LcsMatch {
                    start_a: i + 1 - cur[j + 1],
                    start_b: j + 1 - cur[j + 1],
                    len: cur[j + 1],
                };
            }
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    best
}

/// Unit-cost Levenshtein distance over characters.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    levenshtein_chars(&a, &b)
}

pub(crate) fn levenshtein_chars(a: &[char], b: &[char]) -> usize {
    let prefix = a.iter().zip(b).take_while(|(x, y)| x == y).count();
    let (a, b) = (&a[prefix..], &b[prefix..]);
    let suffix = a
        .iter()
        .rev()
        .zip(b.iter().rev())
        .take_while(|(x, y)| x == y)
        .count();
    let (a, b) = (&a[..a.len() - suffix], &b[..b.len() - suffix]);
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }

    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = diag + usize::from(ca != cb);
            diag = row[j + 1];
            row[j + 1] = sub.min(row[j] + 1).min(diag + 1);
        }
    }
    row[b.len()]
}

/// A transformation from a source string to a target string.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EditTree {
    /// Copies the source between `prefix_len` leading and `suffix_len` trailing
    /// characters; the prefix and suffix are rewritten by the children. An
    /// absent child stands for the empty-to-empty pair.
    Interior {
        prefix_len: usize,
        suffix_len: usize,
        left: Option<Box<EditTree>>,
        right: Option<Box<EditTree>>,
    },
    /// Replaces exactly `source` with `target`.
    Substitution { source: String, target: String },
}

impl EditTree {
    /// Edit tree that rewrites `source` into `target`.
    pub fn build(source: &str, target: &str) -> Self {
        let s: Vec<char> = source.chars().collect();
        let t: Vec<char> = target.chars().collect();
        build_chars(&s, &t)
    }

    pub fn substitution(source: &str, target: &str) -> Self {
        EditTree::Substitution {
            source: source.into(),
            target: target.into(),
        }
    }

    pub fn interior(
        prefix_len: usize,
        suffix_len: usize,
        left: Option<EditTree>,
        right: Option<EditTree>,
    ) -> Self {
        EditTree::Interior {
            prefix_len,
            suffix_len,
            left: left.map(Box::new),
            right: right.map(Box::new),
        }
    }

    /// Applies the tree to `source`; `None` when the tree does not fit it.
    pub fn apply(&self, source: &str) -> Option<String> {
        let s: Vec<char> = source.chars().collect();
        let mut out = String::new();
        self.apply_chars(&s, &mut out).then_some(out)
    }

    fn apply_chars(&self, s: &[char], out: &mut String) -> bool {
        match self {
            EditTree::Substitution { source, target } => {
                if source.chars().eq(s.iter().copied()) {
                    out.push_str(target);
                    true
                } else {
                    false
                }
            }
            EditTree::Interior {
                prefix_len,
                suffix_len,
                left,
                right,
            } => {
                if s.len() < prefix_len + suffix_len {
                    return false;
                }
                let (pre, rest) = s.split_at(*prefix_len);
                let (mid, suf) = rest.split_at(rest.len() - suffix_len);
                apply_child(left.as_deref(), pre, out) && {
                    out.extend(mid);
                    apply_child(right.as_deref(), suf, out)
                }
            }
        }
    }

    /// Injective textual encoding, e.g. `node(4,1,node(0,2,ε,sub(ge,)),sub(t,en))`.
    ///
    /// Inside `sub(..)` the characters `\ , ( ) ε` are escaped with a backslash
    /// and tab, newline and carriage return are written as `\t`, `\n`, `\r`.
    pub fn canonical_key(&self) -> String {
        let mut out = String::new();
        self.write_key(&mut out);
        out
    }

    fn write_key(&self, out: &mut String) {
        match self {
            EditTree::Substitution { source, target } => {
                out.push_str("sub(");
                escape_into(source, out);
                out.push(',');
                escape_into(target, out);
                out.push(')');
            }
            EditTree::Interior {
                prefix_len,
                suffix_len,
                left,
                right,
            } => {
                use core::fmt::Write;
                let _ = write!(out, "node({prefix_len},{suffix_len},");
                match left {
                    Some(t) => t.write_key(out),
                    None => out.push(EMPTY),
                }
                out.push(',');
                match right {
                    Some(t) => t.write_key(out),
                    None => out.push(EMPTY),
                }
                out.push(')');
            }
        }
    }

    /// Parses a key produced by [`EditTree::canonical_key`].
    pub fn from_key(key: &str) -> Result<Self, KeyError> {
        let chars: Vec<char> = key.chars().collect();
        let mut p = KeyParser { chars: &chars, pos: 0 };
        let tree = p.tree()?;
        if p.pos != chars.len() {
            return Err(p.error("trailing input"));
        }
        Ok(tree)
    }
}

impl fmt::Display for EditTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_key())
    }
}

fn apply_child(child: Option<&EditTree>, s: &[char], out: &mut String) -> bool {
    match child {
        Some(t) => t.apply_chars(s, out),
        None => s.is_empty(),
    }
}

fn build_chars(s: &[char], t: &[char]) -> EditTree {
    let m = lcs_chars(s, t);
    if m.len == 0 {
        return EditTree::Substitution {
            source: s.iter().collect(),
            target: t.iter().collect(),
        };
    }
    let child = |a: &[char], b: &[char]| {
        (!a.is_empty() || !b.is_empty()).then(|| Box::new(build_chars(a, b)))
    };
    EditTree::Interior {
        prefix_len: m.start_a,
        suffix_len: s.len() - m.start_a - m.len,
        left: child(&s[..m.start_a], &t[..m.start_b]),
        right: child(&s[m.start_a + m.len..], &t[m.start_b + m.len..]),
    }
}

const EMPTY: char = 'ε';

fn escape_into(s: &str, out: &mut String) {
    for c in s.chars() {
        match c {
            '\\' | ',' | '(' | ')' | EMPTY => {
                out.push('\\');
                out.push(c);
            }
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            _ => out.push(c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyError {
    pub position: usize,
    pub message: &'static str,
}

impl fmt::Display for KeyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "bad edit tree key at char {}: {}", self.position, self.message)
    }
}

impl core::error::Error for KeyError {}

struct KeyParser<'a> {
    chars: &'a [char],
    pos: usize,
}

impl KeyParser<'_> {
    fn error(&self, message: &'static str) -> KeyError {
        KeyError {
            position: self.pos,
            message,
        }
    }

    fn eat(&mut self, lit: &str) -> Result<(), KeyError> {
        for c in lit.chars() {
            if self.chars.get(self.pos) != Some(&c) {
                return Err(self.error("unexpected character"));
            }
            self.pos += 1;
        }
        Ok(())
    }

    fn peek_is(&self, lit: &str) -> bool {
        lit.chars()
            .enumerate()
            .all(|(i, c)| self.chars.get(self.pos + i) == Some(&c))
    }

    fn tree(&mut self) -> Result<EditTree, KeyError> {
        if self.peek_is("sub(") {
            self.eat("sub(")?;
            let source = self.text()?;
            self.eat(",")?;
            let target = self.text()?;
            self.eat(")")?;
            Ok(EditTree::Substitution { source, target })
        } else if self.peek_is("node(") {
            self.eat("node(")?;
            let prefix_len = self.number()?;
            self.eat(",")?;
            let suffix_len = self.number()?;
            self.eat(",")?;
            let left = self.child()?;
            self.eat(",")?;
            let right = self.child()?;
            self.eat(")")?;
            Ok(EditTree::Interior {
                prefix_len,
                suffix_len,
                left,
                right,
            })
        } else {
            Err(self.error("expected sub( or node("))
        }
    }

    fn child(&mut self) -> Result<Option<Box<EditTree>>, KeyError> {
        if self.chars.get(self.pos) == Some(&EMPTY) {
            self.pos += 1;
            Ok(None)
        } else {
            self.tree().map(|t| Some(Box::new(t)))
        }
    }

    fn number(&mut self) -> Result<usize, KeyError> {
        let start = self.pos;
        let mut n: usize = 0;
        while let Some(d) = self.chars.get(self.pos).and_then(|c| c.to_digit(10)) {
            n = n
                .checked_mul(10)
                .and_then(|n| n.checked_add(d as usize))
                .ok_or_else(|| self.error("number overflow"))?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("expected number"));
        }
        Ok(n)
    }

    fn text(&mut self) -> Result<String, KeyError> {
        let mut s = String::new();
        loop {
            match self.chars.get(self.pos) {
                None => return Err(self.error("unterminated substitution")),
                Some(',') | Some(')') => return Ok(s),
                Some('(') | Some(&EMPTY) => return Err(self.error("unescaped delimiter")),
                Some('\\') => {
                    self.pos += 1;
                    let c = match self.chars.get(self.pos) {
                        Some('t') => '\t',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some(&c @ ('\\' | ',' | '(' | ')' | EMPTY)) => c,
                        _ => return Err(self.error("bad escape")),
                    };
                    s.push(c);
                    self.pos += 1;
                }
                Some(&c) => {
                    s.push(c);
                    self.pos += 1;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abgesagt() -> EditTree {
        EditTree::interior(
            4,
            1,
            Some(EditTree::interior(
                0,
                2,
                None,
                Some(EditTree::substitution("ge", "")),
            )),
            Some(EditTree::substitution("t", "en")),
        )
    }

    #[test]
    fn lcs_examples() {
        assert_eq!(
            lcs("abgesagt", "absagen"),
            LcsMatch {
                start_a: 4,
                start_b: 2,
                len: 3
            }
        );
        assert_eq!(
            lcs("x", "x"),
            LcsMatch {
                start_a: 0,
                start_b: 0,
                len: 1
            }
        );
        assert_eq!(
            lcs("ab", "cd"),
            LcsMatch {
                start_a: 0,
                start_b: 0,
                len: 0
            }
        );
    }

    #[test]
    fn lcs_tie_breaking() {
        // "ab" and "cd" both have length 2; "ab" starts first in a.
        let m = lcs("abxcd", "cdyab");
        assert_eq!((m.start_a, m.start_b, m.len), (0, 3, 2));
        // Same start in a, two places in b.
        let m = lcs("ab", "abab");
        assert_eq!((m.start_a, m.start_b, m.len), (0, 0, 2));
    }

    #[test]
    fn build_abgesagt() {
        let t = EditTree::build("abgesagt", "absagen");
        assert_eq!(t, abgesagt());
        assert_eq!(t.canonical_key(), "node(4,1,node(0,2,ε,sub(ge,)),sub(t,en))");
    }

    #[test]
    fn build_prefix_ge() {
        let t = EditTree::build("steuert", "gesteuert");
        assert_eq!(
            t,
            EditTree::interior(0, 0, Some(EditTree::substitution("", "ge")), None)
        );
        assert_eq!(t.apply("holt").as_deref(), Some("geholt"));
    }

    #[test]
    fn build_identity() {
        let t = EditTree::build("haus", "haus");
        assert_eq!(t, EditTree::interior(0, 0, None, None));
        assert_eq!(t.canonical_key(), "node(0,0,ε,ε)");
    }

    #[test]
    fn apply_examples() {
        assert_eq!(abgesagt().apply("abgesagt").as_deref(), Some("absagen"));
        assert_eq!(abgesagt().apply("abgefragt").as_deref(), Some("abfragen"));
        assert_eq!(EditTree::substitution("t", "en").apply("x"), None);
        // Too short for the stored prefix and suffix.
        assert_eq!(abgesagt().apply("abg"), None);
        // The copied middle of the left child is free, its suffix is not.
        assert_eq!(abgesagt().apply("xygesagt").as_deref(), Some("xysagen"));
        assert_eq!(abgesagt().apply("xyzesagt"), None);
    }

    #[test]
    fn substitution_for_disjoint_strings() {
        assert_eq!(EditTree::build("ab", "cd"), EditTree::substitution("ab", "cd"));
        assert_eq!(EditTree::build("", ""), EditTree::substitution("", ""));
        assert_eq!(EditTree::build("", "").apply("").as_deref(), Some(""));
    }

    #[test]
    fn levenshtein_examples() {
        assert_eq!(levenshtein("zirkle", "zirkele"), 1);
        assert_eq!(levenshtein("a", "a"), 0);
        assert_eq!(levenshtein("kitten", "sitting"), 3);
        assert_eq!(levenshtein("", "abc"), 3);
        assert_eq!(levenshtein("häng", "hang"), 1);
    }

    #[test]
    fn keys() {
        assert_eq!(EditTree::substitution("t", "en").canonical_key(), "sub(t,en)");
        let tricky = EditTree::substitution("a,b", "(ε)\\\t");
        let key = tricky.canonical_key();
        assert_eq!(key, "sub(a\\,b,\\(\\ε\\)\\\\\\t)");
        assert_eq!(EditTree::from_key(&key).unwrap(), tricky);
        assert_ne!(
            EditTree::substitution("a", "b,").canonical_key(),
            EditTree::substitution("a,b", "").canonical_key()
        );
        assert_eq!(
            EditTree::from_key("node(4,1,node(0,2,ε,sub(ge,)),sub(t,en))").unwrap(),
            abgesagt()
        );
    }

    #[test]
    fn bad_keys() {
        for k in ["", "sub(a,b", "node(1,2,ε)", "node(x,0,ε,ε)", "sub(a,b)x", "sub(a\\q,b)"] {
            assert!(EditTree::from_key(k).is_err(), "{k}");
        }
    }
}
