//! Fixed per-token embedding vectors.
//!
//! The scorer consumes frozen token vectors rather than running an encoder.
//! Two sources are supported: a seeded hash of the token string (so equal
//! tokens share a vector and the pair product can capture lexical match),
//! and a file of precomputed vectors with one per-document block and one
//! line per token.

use std::collections::HashMap;

use crate::corpus::Document;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub enum EmbeddingProvider {
    /// Deterministic pseudo-random vector per token string.
    Hashed { dim: usize, seed: u64 },
    /// Vectors loaded from a file, per document and token position.
    File(FileEmbeddings),
}

#[derive(Debug, Clone)]
pub struct FileEmbeddings {
    dim: usize,
    docs: HashMap<String, Vec<Vec<f64>>>,
}

impl EmbeddingProvider {
    pub fn hashed(dim: usize, seed: u64) -> Self {
        EmbeddingProvider::Hashed { dim, seed }
    }

    /// Parse the embedding file format:
    ///
    /// ```text
    /// #doc <doc_id>
    /// <v_1> ... <v_D>      one line per token, in token order
    /// ```
    pub fn from_file_str(text: &str) -> Result<Self> {
        let mut docs: HashMap<String, Vec<Vec<f64>>> = HashMap::new();
        let mut current: Option<String> = None;
        let mut dim: Option<usize> = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(id) = line.strip_prefix("#doc") {
                let id = id.trim().to_string();
                if id.is_empty() {
                    return Err(Error::parse("<embeddings>", lineno + 1, "missing doc id"));
                }
                docs.entry(id.clone()).or_default();
                current = Some(id);
                continue;
            }
            let Some(doc_id) = &current else {
                return Err(Error::parse(
                    "<embeddings>",
                    lineno + 1,
                    "vector line before any #doc header",
                ));
            };
            let vec: Vec<f64> = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<f64>().map_err(|_| {
                        Error::parse("<embeddings>", lineno + 1, format!("bad float: {t}"))
                    })
                })
                .collect::<Result<_>>()?;
            if vec.iter().any(|v| !v.is_finite()) {
                return Err(Error::parse("<embeddings>", lineno + 1, "non-finite vector value"));
            }
            match dim {
                None => dim = Some(vec.len()),
                Some(d) if d != vec.len() => {
                    return Err(Error::parse(
                        "<embeddings>",
                        lineno + 1,
                        format!("vector width {} differs from {d}", vec.len()),
                    ));
                }
                _ => {}
            }
            docs.get_mut(doc_id).unwrap().push(vec);
        }
        let dim = dim.ok_or_else(|| Error::Model("embedding file holds no vectors".into()))?;
        Ok(EmbeddingProvider::File(FileEmbeddings { dim, docs }))
    }

    pub fn dim(&self) -> usize {
        match self {
            EmbeddingProvider::Hashed { dim, .. } => *dim,
            EmbeddingProvider::File(f) => f.dim,
        }
    }

    /// Write the vector for `doc`'s token at `tok` into `out`.
    pub fn token_vector(&self, doc: &Document, tok: usize, out: &mut [f64]) -> Result<()> {
        debug_assert_eq!(out.len(), self.dim());
        match self {
            EmbeddingProvider::Hashed { dim, seed } => {
                hashed_vector(&doc.tokens[tok], *seed, *dim, out);
                Ok(())
            }
            EmbeddingProvider::File(f) => {
                let vectors = f.docs.get(&doc.doc_id).ok_or_else(|| {
                    Error::Model(format!("no embeddings for document {}", doc.doc_id))
                })?;
                let v = vectors.get(tok).ok_or_else(|| {
                    Error::Model(format!(
                        "no embedding for token {tok} ({:?}) in {}",
                        doc.tokens[tok], doc.doc_id
                    ))
                })?;
                out.copy_from_slice(v);
                Ok(())
            }
        }
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform components in [-sqrt(3/D), sqrt(3/D)], so the expected squared
/// norm of a vector is 1.
fn hashed_vector(token: &str, seed: u64, dim: usize, out: &mut [f64]) {
    let mut state = fnv1a(token.as_bytes()) ^ seed.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    let scale = (3.0 / dim as f64).sqrt();
    for slot in out.iter_mut() {
        let bits = splitmix64(&mut state);
        let unit = (bits >> 11) as f64 / (1u64 << 53) as f64; // [0, 1)
        *slot = (2.0 * unit - 1.0) * scale;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_doc(tokens: &[&str]) -> Document {
        Document {
            doc_id: "emb#0".into(),
            tokens: tokens.iter().map(|s| s.to_string()).collect(),
            sentence_index: vec![0; tokens.len()],
            mentions: vec![],
            gold_chains: vec![],
            ne_spans: vec![],
        }
    }

    #[test]
    fn hashed_is_deterministic_and_token_keyed() {
        let p = EmbeddingProvider::hashed(16, 42);
        let doc = tiny_doc(&["alpha", "beta", "alpha"]);
        let mut a = vec![0.0; 16];
        let mut b = vec![0.0; 16];
        p.token_vector(&doc, 0, &mut a).unwrap();
        p.token_vector(&doc, 2, &mut b).unwrap();
        assert_eq!(a, b, "same token string shares a vector");
        p.token_vector(&doc, 1, &mut b).unwrap();
        assert_ne!(a, b);
        // Different seed, different vectors.
        let q = EmbeddingProvider::hashed(16, 43);
        q.token_vector(&doc, 0, &mut b).unwrap();
        assert_ne!(a, b);
        assert!(a.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn file_backed_lookup_and_errors() {
        let text = "#doc emb#0\n1 2 3\n4 5 6\n#doc other#0\n7 8 9\n";
        let p = EmbeddingProvider::from_file_str(text).unwrap();
        assert_eq!(p.dim(), 3);
        let doc = tiny_doc(&["a", "b", "c"]);
        let mut v = vec![0.0; 3];
        p.token_vector(&doc, 1, &mut v).unwrap();
        assert_eq!(v, vec![4.0, 5.0, 6.0]);
        let err = p.token_vector(&doc, 2, &mut v).unwrap_err();
        assert!(err.to_string().contains("token 2"), "{err}");
        let missing = tiny_doc(&["a"]);
        let missing = Document { doc_id: "absent#0".into(), ..missing };
        assert!(p.token_vector(&missing, 0, &mut v).is_err());
    }

    #[test]
    fn ragged_width_is_rejected() {
        assert!(EmbeddingProvider::from_file_str("#doc d\n1 2\n1 2 3\n").is_err());
    }
}
