//! Corpus ingestion: plain-text loading, tokenization, token counting and
//! rank-frequency tables.
//!
//! The pipeline is `load_text` → `tokenize` → `count_tokens` → `rank`, after
//! which a table can be split into stopword / non-stopword parts with
//! [`partition`]. All steps are pure over their inputs; tables are immutable
//! once built and safe to share across threads.

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stoplists::StopwordList;

/// How raw text is turned into tokens.
///
/// The defaults lowercase everything, split on any non-letter except an
/// apostrophe with letters on both sides (so `aren't` survives as one token,
/// matching the contracted forms in the snowball stopword list), and keep
/// tokens of any length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizationRules {
    pub lowercase: bool,
    pub strip_punctuation: bool,
    pub keep_internal_apostrophes: bool,
    pub min_token_length: usize,
}

impl Default for TokenizationRules {
    fn default() -> Self {
        TokenizationRules {
            lowercase: true,
            strip_punctuation: true,
            keep_internal_apostrophes: true,
            min_token_length: 1,
        }
    }
}

/// Token counts per word type, before ranking.
#[derive(Debug, Clone, Default)]
pub struct TokenCountTable {
    entries: HashMap<String, u64>,
    total_tokens: u64,
}

impl TokenCountTable {
    pub fn count(&self, word: &str) -> u64 {
        self.entries.get(word).copied().unwrap_or(0)
    }

    /// Sum of all counts.
    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    /// Number of distinct word types.
    pub fn total_types(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.entries.iter().map(|(w, &c)| (w.as_str(), c))
    }
}

/// One row of a rank-frequency table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankRecord {
    pub rank: u32,
    pub word: String,
    pub count: u64,
}

/// Word types ordered by descending token count, ranks `1..=r_max`.
///
/// Invariants (enforced on construction): ranks are exactly `1..=r_max`
/// with no gaps, and counts never increase with rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankFrequencyTable {
    records: Vec<RankRecord>,
}

impl RankFrequencyTable {
    /// Builds a table from records, validating the rank and ordering
    /// invariants.
    pub fn from_records(records: Vec<RankRecord>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyTable);
        }
        for (i, rec) in records.iter().enumerate() {
            if rec.rank as usize != i + 1 {
                return Err(Error::InvalidInput(format!(
                    "rank {} at position {} (ranks must be 1..=n with no gaps)",
                    rec.rank,
                    i + 1
                )));
            }
            if rec.count == 0 {
                return Err(Error::InvalidInput(format!(
                    "word `{}` has count 0",
                    rec.word
                )));
            }
            if i > 0 && records[i - 1].count < rec.count {
                return Err(Error::InvalidInput(format!(
                    "count increases from rank {} to {}",
                    i,
                    i + 1
                )));
            }
        }
        Ok(RankFrequencyTable { records })
    }

    pub fn records(&self) -> &[RankRecord] {
        &self.records
    }

    /// Highest rank, equal to the number of records.
    pub fn r_max(&self) -> u32 {
        self.records.len() as u32
    }

    /// Record at `rank` (1-based).
    pub fn record(&self, rank: u32) -> Option<&RankRecord> {
        self.records.get(rank as usize - 1)
    }

    /// Writes the table as CSV with header `rank,word,count`.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for rec in &self.records {
            w.serialize(rec).map_err(into_io)?;
        }
        w.flush()
    }

    /// Reads a table from a `rank,word,count` CSV file.
    pub fn read_csv_path(path: &Path) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
        let mut records = Vec::new();
        for rec in reader.deserialize() {
            let rec: RankRecord = rec.map_err(|e| Error::csv(path, e))?;
            records.push(rec);
        }
        Self::from_records(records)
    }

    /// JSON array of `{rank, word, count}` records.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.records).expect("rank records serialize")
    }
}

/// Pairs of (original rank, subset rank) for the words retained by a
/// partition or a simulated selection.
///
/// Both columns are strictly increasing and `r_new <= r` holds pairwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankMapping {
    pairs: Vec<(u32, u32)>,
}

impl RankMapping {
    pub fn new(pairs: Vec<(u32, u32)>) -> Result<Self> {
        for (i, &(r, r_new)) in pairs.iter().enumerate() {
            if r_new > r || r_new == 0 {
                return Err(Error::InvalidInput(format!(
                    "mapping pair ({r}, {r_new}) violates 1 <= r_new <= r"
                )));
            }
            if i > 0 && (pairs[i - 1].0 >= r || pairs[i - 1].1 >= r_new) {
                return Err(Error::InvalidInput(format!(
                    "mapping not strictly increasing at pair ({r}, {r_new})"
                )));
            }
        }
        Ok(RankMapping { pairs })
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Writes the mapping as CSV with header `r,r_new`.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["r", "r_new"]).map_err(into_io)?;
        for &(r, r_new) in &self.pairs {
            w.write_record([r.to_string(), r_new.to_string()])
               .map_err(into_io)?;
        }
        w.flush()
    }

    /// Reads a mapping from an `r,r_new` CSV file.
    pub fn read_csv_path(path: &Path) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
        let mut pairs = Vec::new();
        for rec in reader.deserialize() {
            let (r, r_new): (u32, u32) = rec.map_err(|e| Error::csv(path, e))?;
            pairs.push((r, r_new));
        }
        Self::new(pairs)
    }
}

fn into_io(e: csv::Error) -> std::io::Error {
    std::io::Error::new(std::io::ErrorKind::Other, e)
}

/// Reads a UTF-8 text file, optionally trimming Project-Gutenberg-style
/// boilerplate.
///
/// Stripping only happens when both a `*** START OF ...` and a matching
/// `*** END OF ...` marker line are found in order; otherwise the text is
/// returned whole, so non-Gutenberg files pass through untouched.
pub fn load_text(path: &Path, strip_boilerplate: bool) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = String::from_utf8(bytes).map_err(|_| Error::Encoding { path: path.into() })?;
    if strip_boilerplate {
        Ok(strip_gutenberg_boilerplate(&text).to_owned())
    } else {
        Ok(text)
    }
}

/// Returns the text between Gutenberg start/end marker lines, or the whole
/// text when the pair is absent or out of order.
pub fn strip_gutenberg_boilerplate(text: &str) -> &str {
    let mut start = None;
    let mut end = None;
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let trimmed = line.trim_start();
        if start.is_none() && trimmed.starts_with("*** START OF") {
            start = Some(offset + line.len());
        } else if start.is_some() && trimmed.starts_with("*** END OF") {
            end = Some(offset);
            break;
        }
        offset += line.len();
    }
    match (start, end) {
        (Some(s), Some(e)) if s <= e => &text[s..e],
        _ => text,
    }
}

/// Splits text into tokens according to `rules`. Total function: any input
/// yields a (possibly empty) token list, in text order.
pub fn tokenize(text: &str, rules: &TokenizationRules) -> Vec<String> {
    let mut tokens = Vec::new();
    if rules.strip_punctuation {
        let chars: Vec<char> = text.chars().collect();
        let mut current = String::new();
        for (i, &c) in chars.iter().enumerate() {
            let keep = c.is_alphabetic()
                || (c == '\''
                    && rules.keep_internal_apostrophes
                    && i > 0
                    && chars[i - 1].is_alphabetic()
                    && chars.get(i + 1).is_some_and(|n| n.is_alphabetic()));
            if keep {
                current.push(c);
            } else if !current.is_empty() {
                tokens.push(std::mem::take(&mut current));
            }
        }
        if !current.is_empty() {
            tokens.push(current);
        }
    } else {
        tokens.extend(text.split_whitespace().map(str::to_owned));
    }
    tokens.retain(|t| t.chars().count() >= rules.min_token_length);
    if rules.lowercase {
        for t in &mut tokens {
            if t.chars().any(char::is_uppercase) {
                *t = t.to_lowercase();
            }
        }
    }
    tokens
}

/// Counts occurrences per word type.
pub fn count_tokens(tokens: Vec<String>) -> TokenCountTable {
    let mut entries: HashMap<String, u64> = HashMap::new();
    let mut total = 0u64;
    for tok in tokens {
        *entries.entry(tok).or_insert(0) += 1;
        total += 1;
    }
    TokenCountTable {
        entries,
        total_tokens: total,
    }
}

/// Ranks a count table from the most to the least frequent word.
///
/// Ties are broken by ascending lexicographic word order so that ranking is
/// deterministic.
pub fn rank(table: TokenCountTable) -> Result<RankFrequencyTable> {
    if table.is_empty() {
        return Err(Error::EmptyTable);
    }
    let mut items: Vec<(String, u64)> = table.entries.into_iter().collect();
    items.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let records = items
        .into_iter()
        .enumerate()
        .map(|(i, (word, count))| RankRecord {
            rank: i as u32 + 1,
            word,
            count,
        })
        .collect();
    Ok(RankFrequencyTable { records })
}

/// Convenience pipeline: tokenize, count and rank in one call.
pub fn rank_frequency_from_text(text: &str, rules: &TokenizationRules) -> Result<RankFrequencyTable> {
    rank(count_tokens(tokenize(text, rules)))
}

/// Result of splitting a table into stopword and non-stopword parts.
#[derive(Debug, Clone)]
pub struct Partitioned {
    pub stopwords: Option<RankFrequencyTable>,
    pub non_stopwords: Option<RankFrequencyTable>,
    pub stopword_mapping: RankMapping,
    pub non_stopword_mapping: RankMapping,
}

/// Splits `table` into the words contained in `list` and the rest.
///
/// Each part is re-ranked `1..=len` preserving the original order, and each
/// mapping pairs every retained word's original rank with its new rank. A
/// part that ends up empty is `None` (an empty rank-frequency table is not
/// representable).
pub fn partition(table: &RankFrequencyTable, list: &StopwordList) -> Partitioned {
    let mut stop = Vec::new();
    let mut rest = Vec::new();
    let mut stop_pairs = Vec::new();
    let mut rest_pairs = Vec::new();
    for rec in table.records() {
        if list.contains(&rec.word) {
            stop_pairs.push((rec.rank, stop.len() as u32 + 1));
            stop.push(RankRecord {
                rank: stop.len() as u32 + 1,
                word: rec.word.clone(),
                count: rec.count,
            });
        } else {
            rest_pairs.push((rec.rank, rest.len() as u32 + 1));
            rest.push(RankRecord {
                rank: rest.len() as u32 + 1,
                word: rec.word.clone(),
                count: rec.count,
            });
        }
    }
    Partitioned {
        stopwords: (!stop.is_empty()).then(|| RankFrequencyTable { records: stop }),
        non_stopwords: (!rest.is_empty()).then(|| RankFrequencyTable { records: rest }),
        stopword_mapping: RankMapping { pairs: stop_pairs },
        non_stopword_mapping: RankMapping { pairs: rest_pairs },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stoplists;

    fn table_of(entries: &[(&str, u64)]) -> RankFrequencyTable {
        let records = entries
            .iter()
            .enumerate()
            .map(|(i, &(word, count))| RankRecord {
                rank: i as u32 + 1,
                word: word.to_owned(),
                count,
            })
            .collect();
        RankFrequencyTable::from_records(records).unwrap()
    }

    #[test]
    fn load_text_passthrough_without_markers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.txt");
        std::fs::write(&path, "The whale.").unwrap();
        assert_eq!(load_text(&path, false).unwrap(), "The whale.");
        assert_eq!(load_text(&path, true).unwrap(), "The whale.");
    }

    #[test]
    fn load_text_strips_between_markers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.txt");
        std::fs::write(
            &path,
            "header junk\n*** START OF THE PROJECT GUTENBERG EBOOK X ***\nbody text\n*** END OF THE PROJECT GUTENBERG EBOOK X ***\nlicense junk\n",
        )
        .unwrap();
        assert_eq!(load_text(&path, true).unwrap(), "body text\n");
    }

    #[test]
    fn load_text_start_marker_only_is_passthrough() {
        let text = "*** START OF THE PROJECT GUTENBERG EBOOK X ***\nbody";
        assert_eq!(strip_gutenberg_boilerplate(text), text);
        let text2 = "*** END OF ***\nearly end, no start";
        assert_eq!(strip_gutenberg_boilerplate(text2), text2);
    }

    #[test]
    fn load_text_reports_missing_file_with_path() {
        let err = load_text(Path::new("/nonexistent/x.txt"), false).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/x.txt"));
    }

    #[test]
    fn load_text_rejects_invalid_utf8() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.txt");
        std::fs::write(&path, [0xffu8, 0xfe, 0x41]).unwrap();
        let err = load_text(&path, false).unwrap_err();
        assert!(matches!(err, Error::Encoding { .. }));
        assert!(err.to_string().contains("bad.txt"));
    }

    #[test]
    fn tokenize_lowercases_and_strips_punctuation() {
        let toks = tokenize("The whale, the Whale!", &TokenizationRules::default());
        assert_eq!(toks, ["the", "whale", "the", "whale"]);
    }

    #[test]
    fn tokenize_keeps_internal_apostrophes() {
        let toks = tokenize("don't stop", &TokenizationRules::default());
        assert_eq!(toks, ["don't", "stop"]);
        // Leading/trailing quotes are not internal.
        let toks = tokenize("'tis 'quoted' rock'", &TokenizationRules::default());
        assert_eq!(toks, ["tis", "quoted", "rock"]);
    }

    #[test]
    fn tokenize_empty_input() {
        assert!(tokenize("", &TokenizationRules::default()).is_empty());
    }

    #[test]
    fn tokenize_without_apostrophe_flag_splits_contractions() {
        let rules = TokenizationRules {
            keep_internal_apostrophes: false,
            ..TokenizationRules::default()
        };
        assert_eq!(tokenize("don't", &rules), ["don", "t"]);
    }

    #[test]
    fn tokenize_min_length_filters() {
        let rules = TokenizationRules {
            min_token_length: 2,
            ..TokenizationRules::default()
        };
        assert_eq!(tokenize("a to sea", &rules), ["to", "sea"]);
    }

    #[test]
    fn count_tokens_basic() {
        let t = count_tokens(vec!["the".into(), "whale".into(), "the".into()]);
        assert_eq!(t.count("the"), 2);
        assert_eq!(t.count("whale"), 1);
        assert_eq!(t.total_tokens(), 3);
        assert_eq!(t.total_types(), 2);
    }

    #[test]
    fn count_tokens_empty() {
        let t = count_tokens(vec![]);
        assert_eq!(t.total_tokens(), 0);
        assert_eq!(t.total_types(), 0);
    }

    #[test]
    fn count_tokens_order_independent() {
        let a = count_tokens(vec!["x".into(), "y".into(), "x".into()]);
        let b = count_tokens(vec!["y".into(), "x".into(), "x".into()]);
        assert_eq!(a.count("x"), b.count("x"));
        assert_eq!(a.count("y"), b.count("y"));
        assert_eq!(a.total_tokens(), b.total_tokens());
    }

    #[test]
    fn rank_breaks_ties_lexicographically() {
        let mut counts = TokenCountTable::default();
        counts.entries =
            HashMap::from([("a".into(), 5), ("b".into(), 5), ("c".into(), 2)]);
        counts.total_tokens = 12;
        let table = rank(counts).unwrap();
        let rows: Vec<(u32, &str, u64)> = table
            .records()
            .iter()
            .map(|r| (r.rank, r.word.as_str(), r.count))
            .collect();
        assert_eq!(rows, [(1, "a", 5), (2, "b", 5), (3, "c", 2)]);
    }

    #[test]
    fn rank_singleton() {
        let table = rank(count_tokens(vec!["x".into()])).unwrap();
        assert_eq!(table.r_max(), 1);
        assert_eq!(table.record(1).unwrap().count, 1);
    }

    #[test]
    fn rank_empty_errors() {
        assert!(matches!(rank(count_tokens(vec![])), Err(Error::EmptyTable)));
    }

    #[test]
    fn rank_preserves_synthetic_generation_order() {
        // Counts round(20000 / r^1.07) for r = 1..=100: ranking the generated
        // words must reproduce the generation order, checked by direct scan.
        let mut counts = TokenCountTable::default();
        for r in 1..=100u32 {
            let c = (20000.0 / (r as f64).powf(1.07)).round() as u64;
            counts.entries.insert(format!("w{r:03}"), c);
            counts.total_tokens += c;
        }
        let table = rank(counts).unwrap();
        for (i, rec) in table.records().iter().enumerate() {
            assert_eq!(rec.word, format!("w{:03}", i + 1));
            if i > 0 {
                assert!(table.records()[i - 1].count >= rec.count);
            }
        }
    }

    #[test]
    fn partition_example() {
        let table = table_of(&[("the", 10), ("whale", 4), ("of", 3)]);
        let list = stoplists::StopwordList::from_words("x", ["the", "of"]);
        let parts = partition(&table, &list);
        let stop = parts.stopwords.unwrap();
        assert_eq!(
            stop.records()
                .iter()
                .map(|r| (r.rank, r.word.as_str(), r.count))
                .collect::<Vec<_>>(),
            [(1, "the", 10), (2, "of", 3)]
        );
        assert_eq!(parts.stopword_mapping.pairs(), [(1, 1), (3, 2)]);
        let rest = parts.non_stopwords.unwrap();
        assert_eq!(rest.records()[0].word, "whale");
        assert_eq!(parts.non_stopword_mapping.pairs(), [(2, 1)]);
    }

    #[test]
    fn partition_empty_list_is_identity() {
        let table = table_of(&[("the", 10), ("whale", 4)]);
        let empty = stoplists::StopwordList::from_words("none", [] as [&str; 0]);
        let parts = partition(&table, &empty);
        assert!(parts.stopwords.is_none());
        assert!(parts.stopword_mapping.is_empty());
        assert_eq!(parts.non_stopwords.unwrap(), table);
        assert_eq!(parts.non_stopword_mapping.pairs(), [(1, 1), (2, 2)]);
    }

    #[test]
    fn partition_full_list_mirrors_identity_case() {
        let table = table_of(&[("the", 10), ("whale", 4)]);
        let all = stoplists::StopwordList::from_words("all", ["the", "whale"]);
        let parts = partition(&table, &all);
        assert!(parts.non_stopwords.is_none());
        assert_eq!(parts.stopwords.unwrap(), table);
        assert_eq!(parts.stopword_mapping.pairs(), [(1, 1), (2, 2)]);
    }

    #[test]
    fn partition_sizes_and_mapping_invariants() {
        let table = table_of(&[("a", 9), ("b", 7), ("c", 7), ("d", 2), ("e", 1)]);
        let list = stoplists::StopwordList::from_words("x", ["b", "e"]);
        let parts = partition(&table, &list);
        let n_stop = parts.stopwords.as_ref().map_or(0, |t| t.r_max());
        let n_rest = parts.non_stopwords.as_ref().map_or(0, |t| t.r_max());
        assert_eq!(n_stop + n_rest, table.r_max());
        for m in [&parts.stopword_mapping, &parts.non_stopword_mapping] {
            for &(r, r_new) in m.pairs() {
                assert!(r_new <= r);
            }
        }
    }

    #[test]
    fn mapping_rejects_invalid_pairs() {
        assert!(RankMapping::new(vec![(1, 2)]).is_err());
        assert!(RankMapping::new(vec![(3, 1), (2, 2)]).is_err());
        assert!(RankMapping::new(vec![(3, 2), (4, 2)]).is_err());
        assert!(RankMapping::new(vec![(1, 1), (5, 3)]).is_ok());
    }

    #[test]
    fn table_csv_round_trip() {
        let table = table_of(&[("the", 10), ("of", 3)]);
        let mut buf = Vec::new();
        table.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("rank,word,count\n"));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        std::fs::write(&path, buf).unwrap();
        assert_eq!(RankFrequencyTable::read_csv_path(&path).unwrap(), table);
    }

    #[test]
    fn from_records_rejects_broken_invariants() {
        let bad_gap = vec![RankRecord {
            rank: 2,
            word: "x".into(),
            count: 1,
        }];
        assert!(RankFrequencyTable::from_records(bad_gap).is_err());
        let bad_order = vec![
            RankRecord {
                rank: 1,
                word: "x".into(),
                count: 1,
            },
            RankRecord {
                rank: 2,
                word: "y".into(),
                count: 5,
            },
        ];
        assert!(RankFrequencyTable::from_records(bad_order).is_err());
    }
}
