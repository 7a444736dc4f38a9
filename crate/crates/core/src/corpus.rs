//! Reinflection samples, vocabularies and the sequence encodings fed to the
//! encoder-decoder.
//!
//! An input sequence is the start symbol, the source subtags (prefixed `IN=`),
//! the target subtags (prefixed `OUT=`), the characters of the source form and
//! the end symbol. An output sequence is the start symbol, the characters of the
//! target form and the end symbol.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// Start-of-word symbol.
pub const START: &str = "<w>";
/// End-of-word symbol.
pub const END: &str = "</w>";
/// Placeholder for tokens never seen while building the vocabulary.
pub const UNK: &str = "<unk>";

/// Id of [`START`] on both sides of every vocabulary.
pub const START_ID: usize = 0;
/// Id of [`END`] on both sides of every vocabulary.
pub const END_ID: usize = 1;
/// Id of [`UNK`] on both sides of every vocabulary.
pub const UNK_ID: usize = 2;

const SPECIALS: [&str; 3] = [START, END, UNK];

/// Delimiter between subtags in raw dataset tags.
pub const SUBTAG_DELIMITER: char = ',';

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CorpusError {
    MalformedTag { raw: String },
    FieldCount { line: usize, found: usize },
    EmptyForm { line: usize },
    EmptyCorpus,
    EmptyOutputForm,
    DuplicateToken { token: String },
    MissingSpecial { expected: &'static str, found: String },
    InvalidToken { token: String },
}

impl fmt::Display for CorpusError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorpusError::MalformedTag { raw } => write!(f, "malformed tag {raw:?}"),
            CorpusError::FieldCount { line, found } => write!(
                f,
                "line {line}: expected 3 or 4 tab-separated fields, found {found}"
            ),
            CorpusError::EmptyForm { line } => write!(f, "line {line}: empty word form"),
            CorpusError::EmptyCorpus => write!(f, "corpus is empty"),
            CorpusError::EmptyOutputForm => write!(f, "cannot encode an empty output form"),
            CorpusError::DuplicateToken { token } => write!(f, "duplicate token {token:?}"),
            CorpusError::MissingSpecial { expected, found } => {
                write!(f, "expected special token {expected:?}, found {found:?}")
            }
            CorpusError::InvalidToken { token } => write!(f, "invalid token {token:?}"),
        }
    }
}

impl core::error::Error for CorpusError {}

/// Which tag a subtag belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    In,
    Out,
}

impl Side {
    pub fn prefix(self) -> &'static str {
        match self {
            Side::In => "IN",
            Side::Out => "OUT",
        }
    }
}

/// Splits a raw tag such as `pos=ADJ,case=GEN` into side-prefixed subtag
/// tokens, e.g. `IN=pos=ADJ`, `IN=case=GEN`. Order is preserved.
pub fn parse_tag(raw: &str, side: Side) -> Result<Vec<String>, CorpusError> {
    if raw.is_empty() {
        return Err(CorpusError::MalformedTag { raw: raw.to_string() });
    }
    raw.split(SUBTAG_DELIMITER)
        .map(|subtag| {
            if subtag.is_empty() || subtag.contains(char::is_whitespace) {
                Err(CorpusError::MalformedTag { raw: raw.to_string() })
            } else {
                Ok(format!("{}={}", side.prefix(), subtag))
            }
        })
        .collect()
}

/// One reinflection instance: source form and tag, target tag, and (except at
/// prediction time) the target form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sample {
    source_tag: String,
    source_form: String,
    target_tag: String,
    target_form: Option<String>,
}

impl Sample {
    pub fn new(
        source_form: &str,
        source_tag: &str,
        target_tag: &str,
        target_form: Option<&str>,
    ) -> Result<Self, CorpusError> {
        Self::checked(source_form, source_tag, target_tag, target_form, 0)
    }

    fn checked(
        source_form: &str,
        source_tag: &str,
        target_tag: &str,
        target_form: Option<&str>,
        line: usize,
    ) -> Result<Self, CorpusError> {
        parse_tag(source_tag, Side::In)?;
        parse_tag(target_tag, Side::Out)?;
        if source_form.is_empty() || target_form.is_some_and(str::is_empty) {
            return Err(CorpusError::EmptyForm { line });
        }
        Ok(Sample {
            source_tag: source_tag.to_string(),
            source_form: source_form.to_string(),
            target_tag: target_tag.to_string(),
            target_form: target_form.map(ToString::to_string),
        })
    }

    pub fn source_form(&self) -> &str {
        &self.source_form
    }

    pub fn source_tag(&self) -> &str {
        &self.source_tag
    }

    pub fn target_tag(&self) -> &str {
        &self.target_tag
    }

    pub fn target_form(&self) -> Option<&str> {
        self.target_form.as_deref()
    }

    pub fn tag_pair(&self) -> (String, String) {
        (self.source_tag.clone(), self.target_tag.clone())
    }

    pub fn has_pair(&self, pair: &(String, String)) -> bool {
        self.source_tag == pair.0 && self.target_tag == pair.1
    }

    /// Copy of the sample with the gold form replaced.
    pub fn with_target(&self, target_form: Option<&str>) -> Result<Self, CorpusError> {
        Self::new(&self.source_form, &self.source_tag, &self.target_tag, target_form)
    }
}

/// An ordered list of samples together with the set of tag pairs they cover.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    samples: Vec<Sample>,
    tag_pairs: BTreeSet<(String, String)>,
}

impl Corpus {
    pub fn new(samples: Vec<Sample>) -> Self {
        let tag_pairs = samples.iter().map(Sample::tag_pair).collect();
        Corpus { samples, tag_pairs }
    }

    /// Parses `source_tag \t source_form \t target_tag [\t target_form]` lines.
    /// Blank lines are skipped; line numbers in errors are 1-based.
    pub fn parse_tsv(text: &str) -> Result<Self, CorpusError> {
        let mut samples = Vec::new();
        for (i, raw_line) in text.split('\n').enumerate() {
            let line = raw_line.strip_suffix('\r').unwrap_or(raw_line);
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let (source_tag, source_form, target_tag, target_form) = match fields[..] {
                [a, b, c] => (a, b, c, None),
                [a, b, c, d] => (a, b, c, Some(d)),
                _ => {
                    return Err(CorpusError::FieldCount {
                        line: i + 1,
                        found: fields.len(),
                    })
                }
            };
            samples.push(Sample::checked(
                source_form,
                source_tag,
                target_tag,
                target_form,
                i + 1,
            )?);
        }
        Ok(Corpus::new(samples))
    }

    /// Renders the corpus in the format read by [`Corpus::parse_tsv`].
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for s in &self.samples {
            out.push_str(&s.source_tag);
            out.push('\t');
            out.push_str(&s.source_form);
            out.push('\t');
            out.push_str(&s.target_tag);
            if let Some(t) = &s.target_form {
                out.push('\t');
                out.push_str(t);
            }
            out.push('\n');
        }
        out
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Sample> {
        self.samples
    }

    pub fn tag_pairs(&self) -> &BTreeSet<(String, String)> {
        &self.tag_pairs
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Indices of the samples belonging to `pair`, in corpus order.
    pub fn pair_indices(&self, pair: &(String, String)) -> Vec<usize> {
        self.samples
            .iter()
            .enumerate()
            .filter(|(_, s)| s.has_pair(pair))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn has_golds(&self) -> bool {
        self.samples.iter().all(|s| s.target_form.is_some())
    }
}

/// Dense ids for one side of the vocabulary. Ids 0..3 are the specials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenTable {
    tokens: Vec<String>,
    ids: BTreeMap<String, usize>,
}

impl TokenTable {
    fn from_sorted(rest: BTreeSet<String>) -> Self {
        let tokens: Vec<String> = SPECIALS
            .iter()
            .map(|s| s.to_string())
            .chain(rest)
            .collect();
        let ids = tokens.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
        TokenTable { tokens, ids }
    }

    fn from_list(tokens: Vec<String>) -> Result<Self, CorpusError> {
        for (i, expected) in SPECIALS.iter().enumerate() {
            match tokens.get(i) {
                Some(t) if t == expected => {}
                other => {
                    return Err(CorpusError::MissingSpecial {
                        expected,
                        found: other.cloned().unwrap_or_default(),
                    })
                }
            }
        }
        let mut ids = BTreeMap::new();
        for (i, t) in tokens.iter().enumerate() {
            if t.is_empty() {
                return Err(CorpusError::InvalidToken { token: t.clone() });
            }
            if ids.insert(t.clone(), i).is_some() {
                return Err(CorpusError::DuplicateToken { token: t.clone() });
            }
        }
        Ok(TokenTable { tokens, ids })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn id(&self, token: &str) -> Option<usize> {
        self.ids.get(token).copied()
    }

    pub fn id_or_unk(&self, token: &str) -> usize {
        self.id(token).unwrap_or(UNK_ID)
    }

    pub fn token(&self, id: usize) -> Option<&str> {
        self.tokens.get(id).map(String::as_str)
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }
}

/// Output-side decoding result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodedForm {
    pub text: String,
    /// Whether an end symbol was reached before the sequence ran out.
    pub terminated: bool,
    /// Number of UNK ids dropped from the text.
    pub unknown: usize,
}

/// Input and output token tables built from a training corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    input: TokenTable,
    output: TokenTable,
}

impl Vocabulary {
    /// Specials first, then every source subtag, target subtag and character
    /// seen in the corpus, in lexicographic order.
    pub fn build(corpus: &Corpus) -> Result<Self, CorpusError> {
        if corpus.is_empty() {
            return Err(CorpusError::EmptyCorpus);
        }
        let mut chars = BTreeSet::new();
        let mut subtags = BTreeSet::new();
        for s in corpus.samples() {
            chars.extend(s.source_form.chars().map(String::from));
            if let Some(t) = &s.target_form {
                chars.extend(t.chars().map(String::from));
            }
            subtags.extend(parse_tag(&s.source_tag, Side::In)?);
            subtags.extend(parse_tag(&s.target_tag, Side::Out)?);
        }
        let mut input = chars.clone();
        input.extend(subtags);
        Ok(Vocabulary {
            input: TokenTable::from_sorted(input),
            output: TokenTable::from_sorted(chars),
        })
    }

    /// Rebuilds a vocabulary from serialized token lists.
    pub fn from_tokens(input: Vec<String>, output: Vec<String>) -> Result<Self, CorpusError> {
        let input = TokenTable::from_list(input)?;
        let output = TokenTable::from_list(output)?;
        for t in &output.tokens()[SPECIALS.len()..] {
            if t.chars().count() != 1 {
                return Err(CorpusError::InvalidToken { token: t.clone() });
            }
        }
        Ok(Vocabulary { input, output })
    }

    pub fn input(&self) -> &TokenTable {
        &self.input
    }

    pub fn output(&self) -> &TokenTable {
        &self.output
    }

    /// Token strings of the encoded input, before id lookup.
    pub fn input_tokens(sample: &Sample) -> Vec<String> {
        let mut tokens = Vec::with_capacity(sample.source_form.len() + 8);
        tokens.push(START.to_string());
        // Sample construction validated both tags.
        tokens.extend(parse_tag(&sample.source_tag, Side::In).unwrap_or_default());
        tokens.extend(parse_tag(&sample.target_tag, Side::Out).unwrap_or_default());
        tokens.extend(sample.source_form.chars().map(String::from));
        tokens.push(END.to_string());
        tokens
    }

    pub fn encode_input(&self, sample: &Sample) -> Vec<usize> {
        Self::input_tokens(sample)
            .iter()
            .map(|t| self.input.id_or_unk(t))
            .collect()
    }

    pub fn encode_output(&self, form: &str) -> Result<Vec<usize>, CorpusError> {
        if form.is_empty() {
            return Err(CorpusError::EmptyOutputForm);
        }
        let mut ids = Vec::with_capacity(form.len() + 2);
        ids.push(START_ID);
        let mut buf = [0u8; 4];
        ids.extend(
            form.chars()
                .map(|c| self.output.id_or_unk(c.encode_utf8(&mut buf))),
        );
        ids.push(END_ID);
        Ok(ids)
    }

    /// Maps output ids back to characters. A leading start symbol is skipped,
    /// decoding stops at the first end symbol, and UNK or out-of-range ids are
    /// dropped and counted.
    pub fn decode_output(&self, ids: &[usize]) -> DecodedForm {
        let mut text = String::new();
        let mut terminated = false;
        let mut unknown = 0;
        for &id in ids {
            match id {
                START_ID => {}
                END_ID => {
                    terminated = true;
                    break;
                }
                _ => match self.output.token(id) {
                    Some(t) if id != UNK_ID => text.push_str(t),
                    _ => unknown += 1,
                },
            }
        }
        DecodedForm {
            text,
            terminated,
            unknown,
        }
    }
}
