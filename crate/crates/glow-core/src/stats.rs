//! Corpus-level statistics: document frequencies, idf, and average lengths.
//!
//! idf uses the natural log throughout: `idf = ln((N - df + 0.5) / (df + 0.5))`.
//! The stats file records the log base in its header so external tooling can
//! check its assumptions.
//!
//! A word occurring in any field of a document counts once toward that
//! document's df. Word splitting is [`crate::tokenizer::split_words`], so
//! weights and tokens always align.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use crate::corpus::{CorpusDocument, FieldConfig};
use crate::error::{GlowError, Result};
use crate::fsio;
use crate::tokenizer::split_words;

/// Natural-log idf of a word seen in `df` of `n` documents.
pub fn idf(n: u64, df: u64) -> f64 {
    ((n as f64 - df as f64 + 0.5) / (df as f64 + 0.5)).ln()
}

/// idf assigned to a word never seen in the corpus (df = 0).
pub fn unseen_idf(n: u64) -> f64 {
    ((n as f64 + 0.5) / 0.5).ln()
}

/// Immutable corpus statistics; safe to share across threads once built.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusStatistics {
    doc_count: u64,
    df: BTreeMap<String, u64>,
    idf: BTreeMap<String, f64>,
    avg_field_len: BTreeMap<String, f64>,
    avg_query_len: f64,
}

impl CorpusStatistics {
    /// Assemble from parts, enforcing the type invariants.
    pub fn from_parts(
        doc_count: u64,
        df: BTreeMap<String, u64>,
        idf: BTreeMap<String, f64>,
        avg_field_len: BTreeMap<String, f64>,
        avg_query_len: f64,
    ) -> Result<Self> {
        if doc_count == 0 {
            return Err(GlowError::Data("doc_count must be positive".into()));
        }
        if df.len() != idf.len() || df.keys().ne(idf.keys()) {
            return Err(GlowError::Data("df and idf must cover the same words".into()));
        }
        for (word, &d) in &df {
            if d == 0 || d > doc_count {
                return Err(GlowError::Data(format!(
                    "word '{word}': df {d} outside (0, {doc_count}]"
                )));
            }
            if !idf[word].is_finite() {
                return Err(GlowError::Data(format!("word '{word}': non-finite idf")));
            }
        }
        if !(avg_query_len > 0.0) {
            return Err(GlowError::Data("avg_query_len must be positive".into()));
        }
        for (field, &l) in &avg_field_len {
            if !(l > 0.0) {
                return Err(GlowError::Data(format!(
                    "field '{field}': avg length must be positive"
                )));
            }
        }
        Ok(CorpusStatistics {
            doc_count,
            df,
            idf,
            avg_field_len,
            avg_query_len,
        })
    }

    pub fn doc_count(&self) -> u64 {
        self.doc_count
    }

    pub fn df(&self, word: &str) -> u64 {
        self.df.get(word).copied().unwrap_or(0)
    }

    /// idf of `word`, using the unseen-word value when it never occurred.
    pub fn idf(&self, word: &str) -> f64 {
        self.idf
            .get(word)
            .copied()
            .unwrap_or_else(|| unseen_idf(self.doc_count))
    }

    pub fn words(&self) -> impl Iterator<Item = (&str, u64, f64)> {
        self.df
            .iter()
            .map(|(w, &d)| (w.as_str(), d, self.idf[w]))
    }

    pub fn word_count(&self) -> usize {
        self.df.len()
    }

    /// Average word count of `field` across the corpus.
    pub fn avg_field_len(&self, field: &str) -> Option<f64> {
        self.avg_field_len.get(field).copied()
    }

    pub fn avg_query_len(&self) -> f64 {
        self.avg_query_len
    }

    /// Sum of the per-field average lengths: the average whole-document
    /// length when every document carries the same field set.
    pub fn avg_doc_len(&self) -> f64 {
        self.avg_field_len.values().sum()
    }
}

/// Accumulator for one shard of the corpus. Merging is commutative and
/// associative, so sharded ingestion reduces deterministically.
#[derive(Debug, Default, Clone)]
pub struct StatsAccumulator {
    doc_count: u64,
    df: BTreeMap<String, u64>,
    field_word_total: BTreeMap<String, u64>,
}

impl StatsAccumulator {
    pub fn add_document(&mut self, doc: &CorpusDocument, field_configs: &[FieldConfig]) {
        self.doc_count += 1;
        let mut seen = BTreeSet::new();
        for fc in field_configs {
            let words = split_words(doc.field_text(&fc.name));
            *self.field_word_total.entry(fc.name.clone()).or_default() += words.len() as u64;
            for word in words {
                seen.insert(word);
            }
        }
        for word in seen {
            *self.df.entry(word).or_default() += 1;
        }
    }

    pub fn merge(&mut self, other: StatsAccumulator) {
        self.doc_count += other.doc_count;
        for (w, c) in other.df {
            *self.df.entry(w).or_default() += c;
        }
        for (f, c) in other.field_word_total {
            *self.field_word_total.entry(f).or_default() += c;
        }
    }

    /// Finish the build. `n_override`, when set, replaces the actual corpus
    /// size as the N of the idf formula (it must not be smaller than the
    /// corpus, or df could exceed N).
    pub fn finish(self, queries: &[String], n_override: Option<u64>) -> Result<CorpusStatistics> {
        if self.doc_count == 0 {
            return Err(GlowError::Data("empty corpus".into()));
        }
        if queries.is_empty() {
            return Err(GlowError::Data("empty query stream".into()));
        }
        let n = match n_override {
            Some(n) if n < self.doc_count => {
                return Err(GlowError::Config(format!(
                    "doc-count override {n} is smaller than the corpus ({})",
                    self.doc_count
                )));
            }
            Some(n) => n,
            None => self.doc_count,
        };
        let idf_map: BTreeMap<String, f64> =
            self.df.iter().map(|(w, &d)| (w.clone(), idf(n, d))).collect();
        let avg_field_len: BTreeMap<String, f64> = self
            .field_word_total
            .iter()
            .map(|(f, &total)| (f.clone(), total as f64 / self.doc_count as f64))
            .filter(|(_, l)| *l > 0.0)
            .collect();
        let total_query_words: u64 = queries
            .iter()
            .map(|q| split_words(q).len() as u64)
            .sum();
        let avg_query_len = total_query_words as f64 / queries.len() as f64;
        if !(avg_query_len > 0.0) {
            return Err(GlowError::Data(
                "queries contain no words; avg query length would be zero".into(),
            ));
        }
        CorpusStatistics::from_parts(n, self.df, idf_map, avg_field_len, avg_query_len)
    }
}

/// Compute global statistics over a corpus and a query log.
pub fn build_stats(
    corpus: impl IntoIterator<Item = CorpusDocument>,
    queries: &[String],
    field_configs: &[FieldConfig],
    n_override: Option<u64>,
) -> Result<CorpusStatistics> {
    let mut acc = StatsAccumulator::default();
    for doc in corpus {
        acc.add_document(&doc, field_configs);
    }
    acc.finish(queries, n_override)
}

const STATS_HEADER_PREFIX: &str = "#glow-stats\tv1\tlog=ln\tN=";

/// Write the stats file: a header line carrying N and the log-base marker,
/// metadata lines for the average lengths, then one `word<TAB>df<TAB>idf`
/// record per word. Floats are printed with 17 significant digits so the
/// round trip is bit-exact.
pub fn save_stats(stats: &CorpusStatistics, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str(&format!("{STATS_HEADER_PREFIX}{}\n", stats.doc_count));
    out.push_str(&format!("#avg_query_len\t{:.16e}\n", stats.avg_query_len));
    for (field, len) in &stats.avg_field_len {
        out.push_str(&format!("#avg_field_len\t{field}\t{len:.16e}\n"));
    }
    for (word, df, idf) in stats.words() {
        out.push_str(&format!("{word}\t{df}\t{idf:.16e}\n"));
    }
    fsio::atomic_write(path, out.as_bytes())
}

/// Load a stats file written by [`save_stats`]. Malformed lines fail hard,
/// naming the offending line.
pub fn load_stats(path: &Path) -> Result<CorpusStatistics> {
    let contents = fsio::read_to_string(path)?;
    let mut lines = contents.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| GlowError::parse(path, 1, "empty stats file"))?;
    let doc_count: u64 = header
        .strip_prefix(STATS_HEADER_PREFIX)
        .ok_or_else(|| {
            GlowError::parse(
                path,
                1,
                format!("bad header; expected '{STATS_HEADER_PREFIX}<N>'"),
            )
        })?
        .parse()
        .map_err(|e| GlowError::parse(path, 1, format!("bad N in header: {e}")))?;

    let mut avg_query_len = None;
    let mut avg_field_len = BTreeMap::new();
    let mut df = BTreeMap::new();
    let mut idf_map = BTreeMap::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("#avg_query_len\t") {
            avg_query_len = Some(rest.parse::<f64>().map_err(|e| {
                GlowError::parse(path, line_no, format!("bad avg_query_len: {e}"))
            })?);
            continue;
        }
        if let Some(rest) = line.strip_prefix("#avg_field_len\t") {
            let (field, value) = rest.split_once('\t').ok_or_else(|| {
                GlowError::parse(path, line_no, "expected '#avg_field_len<TAB>field<TAB>value'")
            })?;
            let value: f64 = value.parse().map_err(|e| {
                GlowError::parse(path, line_no, format!("bad avg_field_len value: {e}"))
            })?;
            avg_field_len.insert(field.to_string(), value);
            continue;
        }
        if line.starts_with('#') {
            return Err(GlowError::parse(path, line_no, "unknown metadata line"));
        }
        let mut parts = line.split('\t');
        let (word, df_s, idf_s) = match (parts.next(), parts.next(), parts.next(), parts.next()) {
            (Some(w), Some(d), Some(i), None) => (w, d, i),
            _ => {
                return Err(GlowError::parse(
                    path,
                    line_no,
                    "expected 'word<TAB>df<TAB>idf'",
                ))
            }
        };
        let df_v: u64 = df_s
            .parse()
            .map_err(|e| GlowError::parse(path, line_no, format!("non-numeric df: {e}")))?;
        let idf_v: f64 = idf_s
            .parse()
            .map_err(|e| GlowError::parse(path, line_no, format!("non-numeric idf: {e}")))?;
        // stored idf must be consistent with the formula (tolerating float
        // printing slack, not recomputation drift)
        let expect = idf(doc_count, df_v);
        if (idf_v - expect).abs() > 1e-9 * expect.abs().max(1.0) {
            return Err(GlowError::parse(
                path,
                line_no,
                format!("idf {idf_v} inconsistent with df {df_v} and N {doc_count} (expected {expect})"),
            ));
        }
        if df.insert(word.to_string(), df_v).is_some() {
            return Err(GlowError::parse(
                path,
                line_no,
                format!("duplicate word '{word}'"),
            ));
        }
        idf_map.insert(word.to_string(), idf_v);
    }
    let avg_query_len =
        avg_query_len.ok_or_else(|| GlowError::parse(path, 1, "missing #avg_query_len line"))?;
    CorpusStatistics::from_parts(doc_count, df, idf_map, avg_field_len, avg_query_len)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::default_field_configs;
    use proptest::prelude::*;

    fn doc(id: &str, title: &str, url: &str) -> CorpusDocument {
        CorpusDocument::new(id, &[("title", title), ("url", url)])
    }

    fn queries(qs: &[&str]) -> Vec<String> {
        qs.iter().map(|q| q.to_string()).collect()
    }

    #[test]
    fn idf_midpoint_is_zero() {
        // N=100, df=50: log(50.5/50.5) = 0
        assert_eq!(idf(100, 50), 0.0);
    }

    #[test]
    fn idf_matches_calculator_oracle() {
        // ln(91.5/9.5), frozen from an independent calculator
        assert!((idf(100, 9) - 2.265_047_173_674_980_7).abs() < 1e-12);
        // paper-scale N override; ln(99_999_991.5/9.5)
        assert!((idf(100_000_000, 9) - 16.169_388_860_345_865).abs() < 1e-12);
    }

    #[test]
    fn idf_negative_for_ubiquitous_words_is_permitted() {
        let stats = build_stats(
            vec![doc("a", "apple pie", ""), doc("b", "apple tart", "")],
            &queries(&["apple"]),
            &default_field_configs(),
            None,
        )
        .unwrap();
        // df = N = 2: ln(0.5/2.5) < 0
        assert!(stats.idf("apple") < 0.0);
    }

    #[test]
    fn df_counts_documents_not_occurrences() {
        let stats = build_stats(
            vec![doc("a", "apple apple apple", "apple"), doc("b", "pear", "")],
            &queries(&["apple pear"]),
            &default_field_configs(),
            None,
        )
        .unwrap();
        assert_eq!(stats.df("apple"), 1);
        assert_eq!(stats.df("pear"), 1);
    }

    #[test]
    fn averages_count_words_per_field_and_query() {
        let stats = build_stats(
            vec![doc("a", "one two three", "x"), doc("b", "one", "")],
            &queries(&["a b", "c d e f"]),
            &default_field_configs(),
            None,
        )
        .unwrap();
        assert_eq!(stats.avg_field_len("title"), Some(2.0));
        assert_eq!(stats.avg_field_len("url"), Some(0.5));
        // fields with no words anywhere are absent rather than zero
        assert_eq!(stats.avg_field_len("anchor"), None);
        assert_eq!(stats.avg_query_len(), 3.0);
    }

    #[test]
    fn empty_corpus_or_queries_hard_error() {
        let err = build_stats(vec![], &queries(&["q"]), &default_field_configs(), None);
        assert!(err.is_err());
        let err = build_stats(
            vec![doc("a", "t", "")],
            &[],
            &default_field_configs(),
            None,
        );
        assert!(err.is_err());
    }

    #[test]
    fn n_override_changes_idf_scale() {
        let docs = || {
            (0..100).map(|i| {
                let title = if i < 9 { "rare common" } else { "common" };
                doc(&format!("d{i}"), title, "")
            })
        };
        let plain = build_stats(docs(), &queries(&["rare"]), &default_field_configs(), None)
            .unwrap();
        assert!((plain.idf("rare") - 2.265_047_173_674_980_7).abs() < 1e-12);
        let overridden = build_stats(
            docs(),
            &queries(&["rare"]),
            &default_field_configs(),
            Some(100_000_000),
        )
        .unwrap();
        assert!((overridden.idf("rare") - 16.169_388_860_345_865).abs() < 1e-12);
        assert_eq!(overridden.doc_count(), 100_000_000);
        // an override smaller than the corpus is rejected
        assert!(build_stats(docs(), &queries(&["q"]), &default_field_configs(), Some(10)).is_err());
    }

    #[test]
    fn unseen_word_idf_uses_df_zero_form() {
        let stats = build_stats(
            (0..100).map(|i| doc(&format!("d{i}"), "common", "")),
            &queries(&["common"]),
            &default_field_configs(),
            None,
        )
        .unwrap();
        assert!((stats.idf("nevermind") - ((100.5f64 / 0.5).ln())).abs() < 1e-15);
    }

    #[test]
    fn ingestion_order_does_not_matter() {
        let mk = |i: usize| doc(&format!("d{i}"), &format!("word{} shared", i % 3), "u v");
        let forward: Vec<_> = (0..12).map(mk).collect();
        let mut backward = forward.clone();
        backward.reverse();
        let q = queries(&["shared word0"]);
        let a = build_stats(forward, &q, &default_field_configs(), None).unwrap();
        let b = build_stats(backward, &q, &default_field_configs(), None).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sharded_merge_equals_single_pass() {
        let docs: Vec<_> = (0..10)
            .map(|i| doc(&format!("d{i}"), &format!("w{}", i % 4), "base"))
            .collect();
        let fc = default_field_configs();
        let q = queries(&["w0"]);
        let mut one = StatsAccumulator::default();
        for d in &docs {
            one.add_document(d, &fc);
        }
        let mut left = StatsAccumulator::default();
        let mut right = StatsAccumulator::default();
        for d in &docs[..4] {
            left.add_document(d, &fc);
        }
        for d in &docs[4..] {
            right.add_document(d, &fc);
        }
        left.merge(right);
        assert_eq!(
            one.finish(&q, None).unwrap(),
            left.finish(&q, None).unwrap()
        );
    }

    #[test]
    fn stats_file_round_trip_is_identity() {
        let stats = build_stats(
            (0..100).map(|i| {
                let title = if i < 9 { "rare filler" } else { "filler" };
                doc(&format!("d{i}"), title, "site page")
            }),
            &queries(&["rare filler", "site"]),
            &default_field_configs(),
            None,
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("stats.tsv");
        save_stats(&stats, &path).unwrap();
        let loaded = load_stats(&path).unwrap();
        assert_eq!(stats, loaded);
        // idf of the df=9 word survives the trip bit-exactly
        assert_eq!(
            loaded.idf("rare").to_bits(),
            stats.idf("rare").to_bits()
        );
    }

    #[test]
    fn malformed_stats_file_names_the_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("stats.tsv");
        std::fs::write(
            &path,
            format!("{STATS_HEADER_PREFIX}10\n#avg_query_len\t2.0e0\nword\tnotanumber\t1.0\n"),
        )
        .unwrap();
        let err = load_stats(&path).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains(":3") && msg.contains("non-numeric df"), "{msg}");
    }

    proptest! {
        /// idf is strictly decreasing in df for fixed N.
        #[test]
        fn idf_strictly_decreasing_in_df(n in 2u64..10_000, df in 1u64..9_999) {
            prop_assume!(df < n);
            prop_assert!(idf(n, df) > idf(n, df + 1));
        }
    }
}
