//! Word splitting and greedy longest-match subword tokenization.
//!
//! Splitting keeps the word -> token mapping around because downstream
//! weighting assigns one weight per word and replicates it over that word's
//! subword tokens.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{GlowError, Result};
use crate::fsio;

pub const PAD: &str = "[PAD]";
pub const UNK: &str = "[UNK]";
pub const CLS: &str = "[CLS]";
pub const SEP: &str = "[SEP]";

/// Continuation marker carried by every non-initial piece of a word.
pub const CONTINUATION: &str = "##";

/// Split raw text into words: lowercase, split on Unicode whitespace, strip
/// leading/trailing non-alphanumeric characters. Total and deterministic;
/// tokens that strip to nothing are dropped.
pub fn split_words(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| {
            w.to_lowercase()
                .trim_matches(|c: char| !c.is_alphanumeric())
                .to_string()
        })
        .filter(|w| !w.is_empty())
        .collect()
}

/// Subword vocabulary: dense ids, the four special tokens, and the
/// continuation prefix.
#[derive(Debug, Clone)]
pub struct SubwordVocab {
    token_to_id: BTreeMap<String, u32>,
    id_to_token: Vec<String>,
    pad_id: u32,
    unk_id: u32,
    cls_id: u32,
    sep_id: u32,
}

impl SubwordVocab {
    /// Build from the full token list; `tokens[i]` gets id `i`. The special
    /// tokens must appear first, in the fixed order [PAD], [UNK], [CLS], [SEP].
    pub fn from_tokens(tokens: Vec<String>) -> Result<Self> {
        let expected = [PAD, UNK, CLS, SEP];
        if tokens.len() < expected.len() {
            return Err(GlowError::Data(format!(
                "vocab too small: {} tokens, need the {} special tokens first",
                tokens.len(),
                expected.len()
            )));
        }
        for (i, want) in expected.iter().enumerate() {
            if tokens[i] != *want {
                return Err(GlowError::Data(format!(
                    "vocab line {} must be '{}', found '{}'",
                    i + 1,
                    want,
                    tokens[i]
                )));
            }
        }
        let mut token_to_id = BTreeMap::new();
        for (i, tok) in tokens.iter().enumerate() {
            if token_to_id.insert(tok.clone(), i as u32).is_some() {
                return Err(GlowError::Data(format!(
                    "duplicate vocab token '{tok}' at line {}",
                    i + 1
                )));
            }
        }
        Ok(SubwordVocab {
            token_to_id,
            id_to_token: tokens,
            pad_id: 0,
            unk_id: 1,
            cls_id: 2,
            sep_id: 3,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let contents = fsio::read_to_string(path)?;
        let tokens: Vec<String> = contents.lines().map(|l| l.to_string()).collect();
        Self::from_tokens(tokens).map_err(|e| match e {
            GlowError::Data(msg) => GlowError::Data(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        for tok in &self.id_to_token {
            out.push_str(tok);
            out.push('\n');
        }
        fsio::atomic_write(path, out.as_bytes())
    }

    pub fn len(&self) -> usize {
        self.id_to_token.len()
    }

    pub fn is_empty(&self) -> bool {
        self.id_to_token.is_empty()
    }

    pub fn id_of(&self, token: &str) -> Option<u32> {
        self.token_to_id.get(token).copied()
    }

    /// Token string for `id`; panics on an out-of-range id.
    pub fn token_of(&self, id: u32) -> &str {
        &self.id_to_token[id as usize]
    }

    pub fn pad_id(&self) -> u32 {
        self.pad_id
    }
    pub fn unk_id(&self) -> u32 {
        self.unk_id
    }
    pub fn cls_id(&self) -> u32 {
        self.cls_id
    }
    pub fn sep_id(&self) -> u32 {
        self.sep_id
    }
}

/// Tokenized text with the word -> token alignment preserved.
///
/// `word_index[t]` is the index into `words` of the word that produced token
/// `t`; tokens of one word are contiguous.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenizedText {
    pub words: Vec<String>,
    pub tokens: Vec<u32>,
    pub word_index: Vec<usize>,
}

/// Greedy longest-match-first segmentation of one (nonempty, lowercased)
/// word. Falls back to a single [UNK] when any remainder has no matching
/// piece; otherwise the concatenation of the emitted pieces (continuation
/// marker stripped) reconstructs the word.
pub fn subword_tokenize(word: &str, vocab: &SubwordVocab) -> Vec<u32> {
    debug_assert!(!word.is_empty());
    let mut pieces = Vec::new();
    let mut start = 0;
    while start < word.len() {
        let mut end = word.len();
        let mut matched = None;
        while end > start {
            if word.is_char_boundary(end) {
                let candidate = if start == 0 {
                    word[start..end].to_string()
                } else {
                    format!("{CONTINUATION}{}", &word[start..end])
                };
                if let Some(id) = vocab.id_of(&candidate) {
                    matched = Some((id, end));
                    break;
                }
            }
            end -= 1;
        }
        match matched {
            Some((id, new_start)) => {
                pieces.push(id);
                start = new_start;
            }
            None => return vec![vocab.unk_id()],
        }
    }
    pieces
}

/// Split `text` into words and each word into subword tokens.
pub fn tokenize(text: &str, vocab: &SubwordVocab) -> TokenizedText {
    let words = split_words(text);
    let mut tokens = Vec::new();
    let mut word_index = Vec::new();
    for (wi, word) in words.iter().enumerate() {
        for id in subword_tokenize(word, vocab) {
            tokens.push(id);
            word_index.push(wi);
        }
    }
    TokenizedText {
        words,
        tokens,
        word_index,
    }
}

/// Common suffix pieces included by the desk-scale vocab builder.
const SUFFIX_PIECES: &[&str] = &["s", "es", "ed", "ing", "er", "est", "ly", "ion"];

/// Deterministic desk-scale vocabulary builder: the four special tokens,
/// then every distinct word of the supplied texts (sorted), then common
/// suffix pieces, then every distinct character both bare and as a
/// continuation piece. Character pieces keep unseen words tokenizable
/// without falling back to [UNK].
pub fn build_vocab<'a>(texts: impl IntoIterator<Item = &'a str>) -> SubwordVocab {
    let mut words = std::collections::BTreeSet::new();
    let mut chars = std::collections::BTreeSet::new();
    for text in texts {
        for word in split_words(text) {
            for c in word.chars() {
                chars.insert(c);
            }
            words.insert(word);
        }
    }
    let mut tokens: Vec<String> = vec![PAD.into(), UNK.into(), CLS.into(), SEP.into()];
    let mut push_unique = |tokens: &mut Vec<String>, tok: String| {
        if !tokens.contains(&tok) {
            tokens.push(tok);
        }
    };
    for w in &words {
        push_unique(&mut tokens, w.clone());
    }
    for s in SUFFIX_PIECES {
        push_unique(&mut tokens, format!("{CONTINUATION}{s}"));
    }
    for c in &chars {
        push_unique(&mut tokens, c.to_string());
        push_unique(&mut tokens, format!("{CONTINUATION}{c}"));
    }
    SubwordVocab::from_tokens(tokens).expect("builder emits specials first by construction")
}
