//! The minimal 5-label table-filling codec.
//!
//! A sentence of `n` words is tagged with an `n x n` matrix over
//! `{NULL, CTD, POS, NEU, NEG}`. Rows are aspect candidates, columns are
//! opinion candidates. A triplet occupies the rectangle
//! `rows[aspect] x cols[opinion]`: its top-left cell carries the sentiment
//! (the "beginning" tag, which both locates the triplet and classifies it)
//! and every other cell of the rectangle carries `CTD` ("continued").
//! Decoding scans for beginning tags and walks down/right while it sees
//! `CTD`, so a well-formed matrix maps back to exactly the input set.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::types::{Sentiment, Span, Triplet};

/// Cell label of the tagging matrix. Exactly five values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TagLabel {
    Null,
    Ctd,
    Pos,
    Neu,
    Neg,
}

impl TagLabel {
    pub const ALL: [TagLabel; 5] = [
        TagLabel::Null,
        TagLabel::Ctd,
        TagLabel::Pos,
        TagLabel::Neu,
        TagLabel::Neg,
    ];

    /// Index on the model's label axis (NULL, CTD, POS, NEU, NEG).
    pub fn index(self) -> usize {
        match self {
            TagLabel::Null => 0,
            TagLabel::Ctd => 1,
            TagLabel::Pos => 2,
            TagLabel::Neu => 3,
            TagLabel::Neg => 4,
        }
    }

    pub fn from_index(i: usize) -> Option<TagLabel> {
        TagLabel::ALL.get(i).copied()
    }

    /// One-letter token used by the matrix dump format.
    pub fn token(self) -> &'static str {
        match self {
            TagLabel::Null => "N",
            TagLabel::Ctd => "C",
            TagLabel::Pos => "P",
            TagLabel::Neu => "U",
            TagLabel::Neg => "G",
        }
    }

    pub fn from_token(t: &str) -> Option<TagLabel> {
        match t {
            "N" => Some(TagLabel::Null),
            "C" => Some(TagLabel::Ctd),
            "P" => Some(TagLabel::Pos),
            "U" => Some(TagLabel::Neu),
            "G" => Some(TagLabel::Neg),
            _ => None,
        }
    }

    pub fn sentiment(self) -> Option<Sentiment> {
        match self {
            TagLabel::Pos => Some(Sentiment::Pos),
            TagLabel::Neu => Some(Sentiment::Neu),
            TagLabel::Neg => Some(Sentiment::Neg),
            _ => None,
        }
    }

    pub fn from_sentiment(s: Sentiment) -> TagLabel {
        match s {
            Sentiment::Pos => TagLabel::Pos,
            Sentiment::Neu => TagLabel::Neu,
            Sentiment::Neg => TagLabel::Neg,
        }
    }
}

/// Square `n x n` grid of [`TagLabel`]s, row-major. The full matrix is
/// addressable: both triangles carry information.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagMatrix {
    n: usize,
    cells: Vec<TagLabel>,
}

impl TagMatrix {
    pub fn null(n: usize) -> TagMatrix {
        TagMatrix {
            n,
            cells: vec![TagLabel::Null; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> TagLabel {
        self.cells[row * self.n + col]
    }

    pub fn set(&mut self, row: usize, col: usize, label: TagLabel) {
        self.cells[row * self.n + col] = label;
    }

    pub fn cells(&self) -> &[TagLabel] {
        &self.cells
    }

    /// Label indices in row-major order, as consumed by the training loop.
    pub fn label_ids(&self) -> Vec<usize> {
        self.cells.iter().map(|l| l.index()).collect()
    }

    /// Builds a matrix from row-major label indices (e.g. an argmax grid).
    pub fn from_label_ids(n: usize, ids: &[usize]) -> Option<TagMatrix> {
        if ids.len() != n * n {
            return None;
        }
        let cells = ids
            .iter()
            .map(|&i| TagLabel::from_index(i))
            .collect::<Option<Vec<_>>>()?;
        Some(TagMatrix { n, cells })
    }
}

/// Errors raised by [`encode_triplets`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("cell ({row},{col}) would need both {existing:?} and {attempted:?}: triplet set is not representable")]
    Collision {
        row: usize,
        col: usize,
        existing: TagLabel,
        attempted: TagLabel,
    },
    #[error("span {span} out of bounds for sentence of {n} words")]
    OutOfBounds { span: Span, n: usize },
}

fn sorted_triplets(triplets: &BTreeSet<Triplet>) -> Vec<Triplet> {
    let mut v: Vec<Triplet> = triplets.iter().copied().collect();
    v.sort_by_key(Triplet::lex_key);
    v
}

fn check_bounds(triplets: &BTreeSet<Triplet>, n: usize) -> Result<(), CodecError> {
    for t in triplets {
        for span in [t.aspect, t.opinion] {
            if !span.in_bounds(n) {
                return Err(CodecError::OutOfBounds { span, n });
            }
        }
    }
    Ok(())
}

/// Writes the triplet set into a fresh tagging matrix.
///
/// Strict: any cell that would need two different labels aborts with
/// [`CodecError::Collision`], signalling a triplet set this scheme cannot
/// represent. Two triplets may share CTD cells without conflict.
pub fn encode_triplets(triplets: &BTreeSet<Triplet>, n: usize) -> Result<TagMatrix, CodecError> {
    check_bounds(triplets, n)?;
    let mut m = TagMatrix::null(n);
    for t in sorted_triplets(triplets) {
        for row in t.aspect.indices() {
            for col in t.opinion.indices() {
                let label = if row == t.aspect.start && col == t.opinion.start {
                    TagLabel::from_sentiment(t.sentiment)
                } else {
                    TagLabel::Ctd
                };
                let existing = m.get(row, col);
                if existing != TagLabel::Null && existing != label {
                    return Err(CodecError::Collision {
                        row,
                        col,
                        existing,
                        attempted: label,
                    });
                }
                m.set(row, col, label);
            }
        }
    }
    Ok(m)
}

/// A label overwrite performed by the lenient encoder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Overwrite {
    pub row: usize,
    pub col: usize,
    pub kept: TagLabel,
    pub dropped: TagLabel,
}

/// Lenient variant for ingesting gold sets the scheme cannot represent:
/// sentiment beats CTD, and among sentiments the last writer in lexicographic
/// triplet order wins. Every overwrite is reported back to the caller.
pub fn encode_triplets_lenient(
    triplets: &BTreeSet<Triplet>,
    n: usize,
) -> Result<(TagMatrix, Vec<Overwrite>), CodecError> {
    check_bounds(triplets, n)?;
    let mut m = TagMatrix::null(n);
    let mut overwrites = Vec::new();
    for t in sorted_triplets(triplets) {
        for row in t.aspect.indices() {
            for col in t.opinion.indices() {
                let label = if row == t.aspect.start && col == t.opinion.start {
                    TagLabel::from_sentiment(t.sentiment)
                } else {
                    TagLabel::Ctd
                };
                let existing = m.get(row, col);
                if existing == TagLabel::Null || existing == label {
                    m.set(row, col, label);
                    continue;
                }
                // CTD never displaces a sentiment; a sentiment displaces
                // anything already present.
                if label == TagLabel::Ctd {
                    overwrites.push(Overwrite {
                        row,
                        col,
                        kept: existing,
                        dropped: label,
                    });
                } else {
                    overwrites.push(Overwrite {
                        row,
                        col,
                        kept: label,
                        dropped: existing,
                    });
                    m.set(row, col, label);
                }
            }
        }
    }
    Ok((m, overwrites))
}

/// Reads triplets back out of a matrix. Total on arbitrary matrices.
///
/// Row-major scan: each sentiment cell `(i, j)` starts a triplet; the aspect
/// end extends downward through `CTD` cells in column `j` and the opinion end
/// extends rightward through `CTD` cells in row `i`. Rectangle interiors are
/// never inspected.
pub fn decode_matrix(m: &TagMatrix) -> Vec<Triplet> {
    let n = m.n();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let Some(sentiment) = m.get(i, j).sentiment() else {
                continue;
            };
            let mut a_end = i;
            while a_end + 1 < n && m.get(a_end + 1, j) == TagLabel::Ctd {
                a_end += 1;
            }
            let mut o_end = j;
            while o_end + 1 < n && m.get(i, o_end + 1) == TagLabel::Ctd {
                o_end += 1;
            }
            out.push(Triplet::new(
                Span::new(i, a_end),
                Span::new(j, o_end),
                sentiment,
            ));
        }
    }
    out
}

pub fn decode_matrix_set(m: &TagMatrix) -> BTreeSet<Triplet> {
    decode_matrix(m).into_iter().collect()
}

/// Outcome of [`validate_wellformed`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WellFormed {
    Ok,
    /// Strict encoding failed outright.
    Collision(CodecError),
    /// Encoding succeeded but the round trip disagrees with the input.
    Mismatch {
        missing: BTreeSet<Triplet>,
        spurious: BTreeSet<Triplet>,
    },
}

impl WellFormed {
    pub fn is_ok(&self) -> bool {
        matches!(self, WellFormed::Ok)
    }
}

/// A triplet set is well-formed exactly when strict encoding succeeds and
/// decoding the result reproduces the input set.
pub fn validate_wellformed(triplets: &BTreeSet<Triplet>, n: usize) -> WellFormed {
    let m = match encode_triplets(triplets, n) {
        Ok(m) => m,
        Err(e) => return WellFormed::Collision(e),
    };
    let decoded = decode_matrix_set(&m);
    if &decoded == triplets {
        WellFormed::Ok
    } else {
        WellFormed::Mismatch {
            missing: triplets.difference(&decoded).copied().collect(),
            spurious: decoded.difference(triplets).copied().collect(),
        }
    }
}

/// Fraction of `(triplet set, n)` items whose gold annotation survives the
/// encode/decode round trip. 1.0 on an empty input.
pub fn scheme_fidelity<'a, I>(items: I) -> f64
where
    I: IntoIterator<Item = (&'a BTreeSet<Triplet>, usize)>,
{
    let mut total = 0usize;
    let mut ok = 0usize;
    for (triplets, n) in items {
        total += 1;
        if validate_wellformed(triplets, n).is_ok() {
            ok += 1;
        }
    }
    if total == 0 {
        1.0
    } else {
        ok as f64 / total as f64
    }
}

impl fmt::Display for TagMatrix {
    /// Dump format: header `n=<int>`, then one line per row with
    /// single-space-separated tokens N/C/P/U/G.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n={}", self.n)?;
        for row in 0..self.n {
            for col in 0..self.n {
                if col > 0 {
                    f.write_str(" ")?;
                }
                f.write_str(self.get(row, col).token())?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad matrix dump at line {line}: {reason}")]
pub struct DumpParseError {
    pub line: usize,
    pub reason: String,
}

impl FromStr for TagMatrix {
    type Err = DumpParseError;

    fn from_str(s: &str) -> Result<TagMatrix, DumpParseError> {
        let mut lines = s.lines();
        let header = lines.next().ok_or_else(|| DumpParseError {
            line: 1,
            reason: "empty dump".into(),
        })?;
        let n: usize = header
            .strip_prefix("n=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| DumpParseError {
                line: 1,
                reason: format!("expected `n=<int>`, got `{header}`"),
            })?;
        let mut m = TagMatrix::null(n);
        for row in 0..n {
            let line = lines.next().ok_or_else(|| DumpParseError {
                line: row + 2,
                reason: format!("expected {n} rows"),
            })?;
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() != n {
                return Err(DumpParseError {
                    line: row + 2,
                    reason: format!("expected {n} cells, got {}", tokens.len()),
                });
            }
            for (col, tok) in tokens.iter().enumerate() {
                let label = TagLabel::from_token(tok).ok_or_else(|| DumpParseError {
                    line: row + 2,
                    reason: format!("unknown cell token `{tok}`"),
                })?;
                m.set(row, col, label);
            }
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::triplet;

    /// "The battery life is good , but the camera is mediocre ." with the two
    /// ground-truth triplets; 12 words under hand tokenization.
    pub(crate) fn intro_example() -> (BTreeSet<Triplet>, usize) {
        let set = BTreeSet::from([
            triplet((1, 2), (4, 4), Sentiment::Pos),
            triplet((8, 8), (10, 10), Sentiment::Neu),
        ]);
        (set, 12)
    }

    #[test]
    fn encode_intro_example() {
        let (set, n) = intro_example();
        let m = encode_triplets(&set, n).unwrap();
        assert_eq!(m.get(1, 4), TagLabel::Pos);
        assert_eq!(m.get(2, 4), TagLabel::Ctd);
        assert_eq!(m.get(8, 10), TagLabel::Neu);
        let touched = [(1, 4), (2, 4), (8, 10)];
        for i in 0..n {
            for j in 0..n {
                if !touched.contains(&(i, j)) {
                    assert_eq!(m.get(i, j), TagLabel::Null, "cell ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn encode_empty_set_is_all_null() {
        let m = encode_triplets(&BTreeSet::new(), 4).unwrap();
        assert!(m.cells().iter().all(|&c| c == TagLabel::Null));
        assert_eq!(m.n(), 4);
    }

    #[test]
    fn encode_collision_reported_at_first_conflicting_cell() {
        let set = BTreeSet::from([
            triplet((0, 1), (2, 2), Sentiment::Pos),
            triplet((1, 1), (2, 2), Sentiment::Neg),
        ]);
        let err = encode_triplets(&set, 3).unwrap_err();
        assert_eq!(
            err,
            CodecError::Collision {
                row: 1,
                col: 2,
                existing: TagLabel::Ctd,
                attempted: TagLabel::Neg,
            }
        );
    }

    #[test]
    fn encode_out_of_bounds() {
        let set = BTreeSet::from([triplet((0, 0), (3, 3), Sentiment::Pos)]);
        assert!(matches!(
            encode_triplets(&set, 3),
            Err(CodecError::OutOfBounds { .. })
        ));
    }

    #[test]
    fn lenient_encode_lets_sentiment_beat_ctd() {
        let set = BTreeSet::from([
            triplet((0, 1), (2, 2), Sentiment::Pos),
            triplet((1, 1), (2, 2), Sentiment::Neg),
        ]);
        let (m, overwrites) = encode_triplets_lenient(&set, 3).unwrap();
        assert_eq!(m.get(1, 2), TagLabel::Neg);
        assert_eq!(m.get(0, 2), TagLabel::Pos);
        assert_eq!(overwrites.len(), 1);
        assert_eq!(overwrites[0].kept, TagLabel::Neg);
        assert_eq!(overwrites[0].dropped, TagLabel::Ctd);
    }

    #[test]
    fn decode_intro_example_round_trips() {
        let (set, n) = intro_example();
        let m = encode_triplets(&set, n).unwrap();
        assert_eq!(decode_matrix_set(&m), set);
    }

    #[test]
    fn decode_all_null_is_empty() {
        assert!(decode_matrix(&TagMatrix::null(6)).is_empty());
    }

    #[test]
    fn decode_one_aspect_two_opinions() {
        let mut m = TagMatrix::null(5);
        m.set(0, 2, TagLabel::Pos);
        m.set(0, 4, TagLabel::Neg);
        let got = decode_matrix_set(&m);
        let want = BTreeSet::from([
            triplet((0, 0), (2, 2), Sentiment::Pos),
            triplet((0, 0), (4, 4), Sentiment::Neg),
        ]);
        assert_eq!(got, want);
    }

    #[test]
    fn decode_scan_order_is_row_major() {
        let mut m = TagMatrix::null(3);
        m.set(2, 0, TagLabel::Pos);
        m.set(0, 1, TagLabel::Neg);
        let got = decode_matrix(&m);
        assert_eq!(got[0].aspect.start, 0);
        assert_eq!(got[1].aspect.start, 2);
    }

    #[test]
    fn validate_intro_example_ok() {
        let (set, n) = intro_example();
        assert!(validate_wellformed(&set, n).is_ok());
    }

    #[test]
    fn validate_collision_set() {
        let set = BTreeSet::from([
            triplet((0, 1), (2, 2), Sentiment::Pos),
            triplet((1, 1), (2, 2), Sentiment::Neg),
        ]);
        match validate_wellformed(&set, 3) {
            WellFormed::Collision(CodecError::Collision { row: 1, col: 2, .. }) => {}
            other => panic!("expected collision at (1,2), got {other:?}"),
        }
    }

    #[test]
    fn validate_begin_tag_inside_column_walk() {
        // The second beginning tag lands where the first rectangle needs CTD,
        // so strict encoding already rejects the set.
        let set = BTreeSet::from([
            triplet((0, 1), (0, 0), Sentiment::Pos),
            triplet((1, 1), (0, 0), Sentiment::Neg),
        ]);
        match validate_wellformed(&set, 2) {
            WellFormed::Collision(CodecError::Collision { row: 1, col: 0, .. }) => {}
            other => panic!("expected collision at (1,0), got {other:?}"),
        }
    }

    #[test]
    fn fidelity_counts_wellformed_fraction() {
        let (ok_set, n) = intro_example();
        let bad = BTreeSet::from([
            triplet((0, 1), (2, 2), Sentiment::Pos),
            triplet((1, 1), (2, 2), Sentiment::Neg),
        ]);
        let items = [
            (&ok_set, n),
            (&ok_set, n),
            (&ok_set, n),
            (&bad, 3usize),
        ];
        assert_eq!(scheme_fidelity(items.iter().map(|(s, n)| (*s, *n))), 0.75);
        let all_ok = [(&ok_set, n), (&ok_set, n), (&ok_set, n)];
        assert_eq!(scheme_fidelity(all_ok.iter().map(|(s, n)| (*s, *n))), 1.0);
    }

    #[test]
    fn dump_format_round_trips_and_matches_layout() {
        let mut m = TagMatrix::null(2);
        m.set(0, 1, TagLabel::Pos);
        m.set(1, 0, TagLabel::Ctd);
        let dump = m.to_string();
        assert_eq!(dump, "n=2\nN P\nC N\n");
        let parsed: TagMatrix = dump.parse().unwrap();
        assert_eq!(parsed, m);
    }

    #[test]
    fn dump_parse_rejects_garbage() {
        assert!("".parse::<TagMatrix>().is_err());
        assert!("n=2\nN P\nC X\n".parse::<TagMatrix>().is_err());
        assert!("n=2\nN P\n".parse::<TagMatrix>().is_err());
    }

    #[test]
    fn encode_is_deterministic() {
        let (set, n) = intro_example();
        let a = encode_triplets(&set, n).unwrap();
        let b = encode_triplets(&set, n).unwrap();
        assert_eq!(a, b);
    }
}
