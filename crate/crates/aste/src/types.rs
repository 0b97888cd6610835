//! Core domain types: sentiment polarity, word spans, and triplets.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Sentiment polarity of a triplet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sentiment {
    Pos,
    Neu,
    Neg,
}

impl Sentiment {
    pub const ALL: [Sentiment; 3] = [Sentiment::Pos, Sentiment::Neu, Sentiment::Neg];

    /// The string form used by the benchmark files (`'POS'`, `'NEU'`, `'NEG'`).
    pub fn as_str(self) -> &'static str {
        match self {
            Sentiment::Pos => "POS",
            Sentiment::Neu => "NEU",
            Sentiment::Neg => "NEG",
        }
    }

    pub fn from_str_opt(s: &str) -> Option<Sentiment> {
        match s {
            "POS" => Some(Sentiment::Pos),
            "NEU" => Some(Sentiment::Neu),
            "NEG" => Some(Sentiment::Neg),
            _ => None,
        }
    }

    /// Lowercase English word, as used in LLM prompts and outputs.
    pub fn as_word(self) -> &'static str {
        match self {
            Sentiment::Pos => "positive",
            Sentiment::Neu => "neutral",
            Sentiment::Neg => "negative",
        }
    }
}

impl fmt::Display for Sentiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A contiguous word span, inclusive on both ends.
///
/// Indices are 0-based word positions; `start <= end` always holds and both
/// point inside the sentence once the span is attached to one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    /// Builds a span, panicking if `start > end`. Use [`Span::try_new`] for
    /// fallible construction from untrusted input.
    pub fn new(start: usize, end: usize) -> Span {
        assert!(start <= end, "span start {start} > end {end}");
        Span { start, end }
    }

    pub fn try_new(start: usize, end: usize) -> Option<Span> {
        (start <= end).then_some(Span { start, end })
    }

    /// Number of words covered.
    pub fn len(self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(self) -> bool {
        false // spans are non-empty by construction
    }

    pub fn contains(self, word: usize) -> bool {
        self.start <= word && word <= self.end
    }

    pub fn overlaps(self, other: Span) -> bool {
        self.start <= other.end && other.start <= self.end
    }

    /// True when every index is a valid word position for a sentence of `n` words.
    pub fn in_bounds(self, n: usize) -> bool {
        self.end < n
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        self.start..=self.end
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.start, self.end)
    }
}

/// An (aspect, opinion, sentiment) extraction target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Triplet {
    pub aspect: Span,
    pub opinion: Span,
    pub sentiment: Sentiment,
}

impl Triplet {
    pub fn new(aspect: Span, opinion: Span, sentiment: Sentiment) -> Triplet {
        Triplet {
            aspect,
            opinion,
            sentiment,
        }
    }

    /// Sort key used wherever triplets must be processed deterministically.
    pub fn lex_key(&self) -> (usize, usize, usize, usize) {
        (
            self.aspect.start,
            self.opinion.start,
            self.aspect.end,
            self.opinion.end,
        )
    }

    pub fn in_bounds(&self, n: usize) -> bool {
        self.aspect.in_bounds(n) && self.opinion.in_bounds(n)
    }
}

impl fmt::Display for Triplet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.aspect, self.opinion, self.sentiment)
    }
}

/// Shorthand used heavily in tests: `triplet((1, 2), (4, 4), Sentiment::Pos)`.
pub fn triplet(aspect: (usize, usize), opinion: (usize, usize), sentiment: Sentiment) -> Triplet {
    Triplet::new(
        Span::new(aspect.0, aspect.1),
        Span::new(opinion.0, opinion.1),
        sentiment,
    )
}
