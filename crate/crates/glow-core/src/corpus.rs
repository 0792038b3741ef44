//! Multi-field documents, field configuration, and the corpus/query file formats.
//!
//! A corpus file holds one JSON record per line with a `doc_id` key and one
//! key per configured field; missing fields are treated as empty text. A
//! query file holds one UTF-8 query per line (blank lines are skipped).

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{GlowError, Result};
use crate::fsio;

/// Per-field knobs: truncation budget and the BM25F field weight / length
/// normalization pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldConfig {
    pub name: String,
    /// Token budget for this field's segment in the combined representation.
    pub max_tokens: usize,
    /// Field weight (relevance saturation knob).
    pub field_weight: f64,
    /// Field length normalization in [0, 1].
    pub length_norm: f64,
}

impl FieldConfig {
    pub fn new(name: &str, max_tokens: usize, field_weight: f64, length_norm: f64) -> Self {
        FieldConfig {
            name: name.to_string(),
            max_tokens,
            field_weight,
            length_norm,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() {
            return Err(GlowError::Config("field name must be nonempty".into()));
        }
        if self.max_tokens < 1 {
            return Err(GlowError::Config(format!(
                "field '{}': max_tokens must be >= 1",
                self.name
            )));
        }
        if !(self.field_weight >= 0.0) {
            return Err(GlowError::Config(format!(
                "field '{}': field_weight must be >= 0",
                self.name
            )));
        }
        if !(0.0..=1.0).contains(&self.length_norm) {
            return Err(GlowError::Config(format!(
                "field '{}': length_norm must be in [0, 1]",
                self.name
            )));
        }
        Ok(())
    }
}

/// The default four-field web-document layout used by the bundled fixtures.
pub fn default_field_configs() -> Vec<FieldConfig> {
    vec![
        FieldConfig::new("anchor", 20, 1.5, 0.75),
        FieldConfig::new("title", 20, 2.0, 0.75),
        FieldConfig::new("url", 20, 1.0, 0.75),
        FieldConfig::new("clicked_query", 68, 1.0, 0.75),
    ]
}

/// One document: a unique id plus named text fields.
///
/// Fields absent from the underlying record are represented as empty text,
/// never omitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusDocument {
    pub doc_id: String,
    pub fields: BTreeMap<String, String>,
}

impl CorpusDocument {
    pub fn new(doc_id: &str, fields: &[(&str, &str)]) -> Self {
        CorpusDocument {
            doc_id: doc_id.to_string(),
            fields: fields
                .iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
        }
    }

    /// Text of `field`, or empty text when the field is missing.
    pub fn field_text(&self, field: &str) -> &str {
        self.fields.get(field).map(String::as_str).unwrap_or("")
    }
}

/// Parse one corpus line. Exposed for streamed ingestion.
fn parse_corpus_line(
    path: &Path,
    line_no: usize,
    line: &str,
    field_names: &[&str],
) -> Result<CorpusDocument> {
    let value: serde_json::Value = serde_json::from_str(line)
        .map_err(|e| GlowError::parse(path, line_no, format!("invalid JSON record: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| GlowError::parse(path, line_no, "record is not a JSON object"))?;
    let doc_id = obj
        .get("doc_id")
        .and_then(|v| v.as_str())
        .ok_or_else(|| GlowError::parse(path, line_no, "missing string key 'doc_id'"))?;
    if doc_id.is_empty() {
        return Err(GlowError::parse(path, line_no, "doc_id must be nonempty"));
    }
    let mut fields = BTreeMap::new();
    for (key, val) in obj {
        if key == "doc_id" {
            continue;
        }
        if !field_names.contains(&key.as_str()) {
            return Err(GlowError::parse(
                path,
                line_no,
                format!("unknown field '{key}' (configured fields: {field_names:?})"),
            ));
        }
        let text = val.as_str().ok_or_else(|| {
            GlowError::parse(path, line_no, format!("field '{key}' is not a string"))
        })?;
        fields.insert(key.clone(), text.to_string());
    }
    // Materialize missing fields as empty text.
    for name in field_names {
        fields.entry(name.to_string()).or_default();
    }
    Ok(CorpusDocument {
        doc_id: doc_id.to_string(),
        fields,
    })
}

/// Load a JSON-lines corpus file, enforcing doc_id uniqueness.
pub fn load_corpus(path: &Path, field_configs: &[FieldConfig]) -> Result<Vec<CorpusDocument>> {
    let field_names: Vec<&str> = field_configs.iter().map(|f| f.name.as_str()).collect();
    let contents = fsio::read_to_string(path)?;
    let mut docs = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for (idx, line) in contents.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let doc = parse_corpus_line(path, idx + 1, line, &field_names)?;
        if !seen.insert(doc.doc_id.clone()) {
            return Err(GlowError::parse(
                path,
                idx + 1,
                format!("duplicate doc_id '{}'", doc.doc_id),
            ));
        }
        docs.push(doc);
    }
    Ok(docs)
}

/// Write a corpus back out as JSON lines, fields in `field_configs` order.
pub fn save_corpus(
    path: &Path,
    docs: &[CorpusDocument],
    field_configs: &[FieldConfig],
) -> Result<()> {
    let mut out = String::new();
    for doc in docs {
        let mut record = serde_json::Map::new();
        record.insert("doc_id".into(), serde_json::Value::String(doc.doc_id.clone()));
        for fc in field_configs {
            record.insert(
                fc.name.clone(),
                serde_json::Value::String(doc.field_text(&fc.name).to_string()),
            );
        }
        out.push_str(&serde_json::Value::Object(record).to_string());
        out.push('\n');
    }
    fsio::atomic_write(path, out.as_bytes())
}

/// Load a plain-text query file: one query per line, blank lines skipped.
pub fn load_queries(path: &Path) -> Result<Vec<String>> {
    let contents = fsio::read_to_string(path)?;
    Ok(contents
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.to_string())
        .collect())
}

/// Load an eval query file: `query_id<TAB>query text` per line.
pub fn load_eval_queries(path: &Path) -> Result<Vec<(String, String)>> {
    let contents = fsio::read_to_string(path)?;
    let mut out = Vec::new();
    for (idx, line) in contents.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (qid, text) = line.split_once('\t').ok_or_else(|| {
            GlowError::parse(path, idx + 1, "expected 'query_id<TAB>query text'")
        })?;
        if qid.is_empty() {
            return Err(GlowError::parse(path, idx + 1, "query_id must be nonempty"));
        }
        out.push((qid.to_string(), text.to_string()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn configs() -> Vec<FieldConfig> {
        default_field_configs()
    }

    #[test]
    fn corpus_round_trip_and_missing_fields() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.jsonl");
        let docs = vec![
            CorpusDocument::new("d1", &[("title", "sodium levels"), ("url", "a b")]),
            CorpusDocument::new("d2", &[("anchor", "x")]),
        ];
        save_corpus(&path, &docs, &configs()).unwrap();
        let loaded = load_corpus(&path, &configs()).unwrap();
        assert_eq!(loaded.len(), 2);
        // missing fields come back as empty text, not absent
        assert_eq!(loaded[0].field_text("anchor"), "");
        assert_eq!(loaded[0].field_text("title"), "sodium levels");
        assert_eq!(loaded[1].fields.len(), 4);
    }

    #[test]
    fn duplicate_doc_id_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.jsonl");
        std::fs::write(
            &path,
            "{\"doc_id\":\"d1\",\"title\":\"a\"}\n{\"doc_id\":\"d1\",\"title\":\"b\"}\n",
        )
        .unwrap();
        let err = load_corpus(&path, &configs()).unwrap_err();
        assert!(err.to_string().contains("duplicate doc_id"), "{err}");
        assert!(err.to_string().contains(":2"), "line number missing: {err}");
    }

    #[test]
    fn unknown_field_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.jsonl");
        std::fs::write(&path, "{\"doc_id\":\"d1\",\"body\":\"a\"}\n").unwrap();
        let err = load_corpus(&path, &configs()).unwrap_err();
        assert!(err.to_string().contains("unknown field 'body'"), "{err}");
    }

    #[test]
    fn field_config_validation() {
        assert!(FieldConfig::new("t", 0, 1.0, 0.5).validate().is_err());
        assert!(FieldConfig::new("t", 5, -1.0, 0.5).validate().is_err());
        assert!(FieldConfig::new("t", 5, 1.0, 1.5).validate().is_err());
        assert!(FieldConfig::new("t", 5, 0.0, 1.0).validate().is_ok());
    }
}
