//! Stopword lists: the three bundled English lists plus set algebra and
//! file I/O for user-supplied lists.
//!
//! The bundled data lives under `data/` in this crate and is compiled in.
//! Setting the `RANKFREQ_STOPLIST_DIR` environment variable makes
//! [`bundled`] read `<dir>/<name>.txt` instead, so the lists can be swapped
//! without rebuilding.

use std::collections::BTreeSet;
use std::path::Path;

use crate::error::{Error, Result};

/// Environment variable overriding where bundled lists are loaded from.
pub const STOPLIST_DIR_ENV: &str = "RANKFREQ_STOPLIST_DIR";

/// Names accepted by [`bundled`].
pub const BUNDLED_NAMES: [&str; 3] = ["common123", "spacy305", "snowball175"];

const COMMON123: &str = include_str!("../data/common123.txt");
const SPACY305: &str = include_str!("../data/spacy305.txt");
const SNOWBALL175: &str = include_str!("../data/snowball175.txt");

/// A named set of normalized (lowercase, trimmed) stopwords.
///
/// Equality ignores the name: two lists are equal when their word sets are.
#[derive(Debug, Clone)]
pub struct StopwordList {
    name: String,
    words: BTreeSet<String>,
}

impl PartialEq for StopwordList {
    fn eq(&self, other: &Self) -> bool {
        self.words == other.words
    }
}

impl Eq for StopwordList {}

impl StopwordList {
    pub fn from_words<I, S>(name: &str, words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let words = words
            .into_iter()
            .map(|w| w.as_ref().trim().to_lowercase())
            .filter(|w| !w.is_empty())
            .collect();
        StopwordList {
            name: name.to_owned(),
            words,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    /// Words in sorted order.
    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }
}

fn parse_list(name: &str, content: &str) -> StopwordList {
    StopwordList::from_words(
        name,
        content
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#')),
    )
}

/// Returns one of the three bundled lists by name.
pub fn bundled(name: &str) -> Result<StopwordList> {
    let content = match name {
        "common123" => COMMON123,
        "spacy305" => SPACY305,
        "snowball175" => SNOWBALL175,
        other => return Err(Error::UnknownStoplist(other.to_owned())),
    };
    if let Ok(dir) = std::env::var(STOPLIST_DIR_ENV) {
        let path = Path::new(&dir).join(format!("{name}.txt"));
        if path.is_file() {
            let mut list = load_list(&path)?;
            list.name = name.to_owned();
            return Ok(list);
        }
    }
    Ok(parse_list(name, content))
}

/// Set intersection; the result is named after both operands.
pub fn intersect(a: &StopwordList, b: &StopwordList) -> StopwordList {
    StopwordList {
        name: format!("({}&{})", a.name, b.name),
        words: a.words.intersection(&b.words).cloned().collect(),
    }
}

/// Set difference `a \ b`.
pub fn difference(a: &StopwordList, b: &StopwordList) -> StopwordList {
    StopwordList {
        name: format!("({}-{})", a.name, b.name),
        words: a.words.difference(&b.words).cloned().collect(),
    }
}

/// Set union.
pub fn union(a: &StopwordList, b: &StopwordList) -> StopwordList {
    StopwordList {
        name: format!("({}|{})", a.name, b.name),
        words: a.words.union(&b.words).cloned().collect(),
    }
}

/// Loads a list from a UTF-8 file with one word per line. Blank lines and
/// lines starting with `#` are ignored; words are lowercased and trimmed.
/// The list is named after the file stem.
pub fn load_list(path: &Path) -> Result<StopwordList> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let content =
        String::from_utf8(bytes).map_err(|_| Error::Encoding { path: path.into() })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "stoplist".to_owned());
    Ok(parse_list(&name, &content))
}

/// Saves a list, one word per line in sorted order, with the list name in a
/// leading comment. `load_list(save_list(x))` reproduces the word set.
pub fn save_list(list: &StopwordList, path: &Path) -> Result<()> {
    let mut out = format!("# {}\n", list.name);
    for w in list.iter() {
        out.push_str(w);
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_sizes_match_their_names() {
        assert_eq!(bundled("common123").unwrap().len(), 123);
        assert_eq!(bundled("spacy305").unwrap().len(), 305);
        assert_eq!(bundled("snowball175").unwrap().len(), 175);
    }

    #[test]
    fn unknown_bundled_name_errors() {
        assert!(matches!(
            bundled("nltk"),
            Err(Error::UnknownStoplist(_))
        ));
    }

    #[test]
    fn common_is_subset_of_spacy() {
        let common = bundled("common123").unwrap();
        let spacy = bundled("spacy305").unwrap();
        assert!(common.iter().all(|w| spacy.contains(w)));
        assert_eq!(intersect(&common, &spacy).len(), 123);
        assert_eq!(difference(&spacy, &common).len(), 182);
    }

    #[test]
    fn snowball_only_non_contracted_words() {
        let common = bundled("common123").unwrap();
        let spacy = bundled("spacy305").unwrap();
        let snowball = bundled("snowball175").unwrap();
        let only = difference(&snowball, &union(&common, &spacy));
        let non_contracted: Vec<&str> =
            only.iter().filter(|w| !w.contains('\'')).collect();
        assert_eq!(non_contracted, ["having", "ought", "theirs"]);
    }

    #[test]
    fn intersect_is_idempotent_and_absorbs_empty() {
        let x = bundled("common123").unwrap();
        let empty = StopwordList::from_words("empty", [] as [&str; 0]);
        assert_eq!(intersect(&x, &x), x);
        assert!(intersect(&x, &empty).is_empty());
        assert!(difference(&x, &x).is_empty());
    }

    #[test]
    fn cardinality_identity() {
        // |a ∩ b| + |a \ b| = |a|
        let a = bundled("snowball175").unwrap();
        let b = bundled("spacy305").unwrap();
        assert_eq!(intersect(&a, &b).len() + difference(&a, &b).len(), a.len());
        let c = StopwordList::from_words("c", ["the", "zzz"]);
        assert_eq!(intersect(&a, &c).len() + difference(&a, &c).len(), a.len());
    }

    #[test]
    fn load_parses_comments_and_blanks() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("l.txt");
        std::fs::write(&path, "# comment\nthe\n\n  OF  \n").unwrap();
        let list = load_list(&path).unwrap();
        assert_eq!(list.len(), 2);
        assert!(list.contains("the") && list.contains("of"));
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("common.txt");
        let original = bundled("common123").unwrap();
        save_list(&original, &path).unwrap();
        let reloaded = load_list(&path).unwrap();
        assert_eq!(reloaded, original);
    }

    #[test]
    fn simple_file_parses() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.txt");
        std::fs::write(&path, "the\nof\n").unwrap();
        let list = load_list(&path).unwrap();
        assert_eq!(list.len(), 2);
        assert_eq!(list.name(), "s");
    }
}
