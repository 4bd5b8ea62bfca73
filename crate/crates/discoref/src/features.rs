//! Per-pair features: surface distances, discourse-tree structure, and
//! mention types.
//!
//! For an ordered mention pair `(m_i, m_j)` with `i < j` (so `m_j` is the
//! anaphor), the full feature set is
//!
//! - `d_m`  — mention-index distance `j - i`
//! - `d_s`  — sentence distance between the mentions' start tokens
//! - `width_i`, `width_j` — span lengths in tokens
//! - `d_lca` — edges from the anaphor's EDU leaf up to the lowest common
//!   ancestor of both mentions' leaves (measured on the anaphor side)
//! - `lc_lca` — sentences covered by the LCA's subtree
//! - `wc_lca` — tokens covered by the LCA's subtree
//! - `type_j` — the anaphor's mention type
//!
//! A mention maps to the EDU leaf containing its start token; mentions that
//! cross an EDU boundary follow their start token.

use crate::corpus::{Document, Mention};
use crate::error::{Error, Result};
use crate::rst::{lca, node_stats, NodeId, RstTree};

/// Mention type, checked in this order: pronoun list membership, then the
/// named-entity layer (or, for documents without one, a capitalized
/// non-sentence-initial token), then the catch-all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MentionType {
    Pronoun,
    NamedEntity,
    OtherNp,
}

impl MentionType {
    pub const COUNT: usize = 3;

    pub fn index(self) -> usize {
        match self {
            MentionType::Pronoun => 0,
            MentionType::NamedEntity => 1,
            MentionType::OtherNp => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            MentionType::Pronoun => "PRONOUN",
            MentionType::NamedEntity => "NAMED_ENTITY",
            MentionType::OtherNp => "OTHER_NP",
        }
    }
}

/// Personal, possessive, and reflexive pronouns, plus demonstratives and
/// wh-pronouns used as full mentions. Matched case-insensitively against the
/// whole mention string.
pub const PRONOUNS: &[&str] = &[
    "i", "me", "my", "mine", "myself", "we", "us", "our", "ours", "ourselves", "you", "your",
    "yours", "yourself", "yourselves", "he", "him", "his", "himself", "she", "her", "hers",
    "herself", "it", "its", "itself", "they", "them", "their", "theirs", "themselves", "this",
    "that", "these", "those", "who", "whom", "whose", "which",
];

pub fn is_pronoun(text: &str) -> bool {
    let lower = text.to_lowercase();
    PRONOUNS.contains(&lower.as_str())
}

/// All features for one ordered mention pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairFeatures {
    pub d_m: usize,
    pub d_s: usize,
    pub width_i: usize,
    pub width_j: usize,
    pub d_lca: usize,
    pub lc_lca: usize,
    pub wc_lca: usize,
    pub type_j: MentionType,
}

impl PairFeatures {
    /// Compute the full feature set for `(m_i, m_j)` with `i < j`.
    pub fn compute(
        doc: &Document,
        tree: &RstTree,
        m_i: &Mention,
        m_j: &Mention,
    ) -> Result<PairFeatures> {
        let (d_m, d_s, width_i, width_j) = pair_base_features(doc, m_i, m_j)?;
        let (d_lca, lc_lca, wc_lca) = discourse_features(doc, tree, m_i, m_j)?;
        Ok(PairFeatures {
            d_m,
            d_s,
            width_i,
            width_j,
            d_lca,
            lc_lca,
            wc_lca,
            type_j: mention_type(doc, m_j),
        })
    }
}

/// The EDU leaf a mention belongs to: the leaf containing its start token.
pub fn mention_edu(tree: &RstTree, m: &Mention) -> NodeId {
    tree.leaf_at_token(m.start_tok)
        .expect("aligned tree has a leaf for every document token")
}

fn check_tree_doc(doc: &Document, tree: &RstTree) -> Result<()> {
    let covered = tree.node(tree.root).token_count();
    if tree.doc_id != doc.doc_id || covered != doc.token_count() {
        return Err(Error::alignment(
            &doc.doc_id,
            format!(
                "tree {} covering {covered} tokens does not match document with {} tokens",
                tree.doc_id,
                doc.token_count()
            ),
        ));
    }
    Ok(())
}

/// `(d_lca, lc_lca, wc_lca)` for an ordered pair. `d_lca` is measured from
/// the anaphor's leaf (`m_j`) up to the LCA; the coverage counts come from
/// the LCA's subtree and are symmetric in the pair.
pub fn discourse_features(
    doc: &Document,
    tree: &RstTree,
    m_i: &Mention,
    m_j: &Mention,
) -> Result<(usize, usize, usize)> {
    check_tree_doc(doc, tree)?;
    let a = mention_edu(tree, m_i);
    let b = mention_edu(tree, m_j);
    let n = lca(tree, a, b)?;
    let d_lca = tree.depth(b) - tree.depth(n);
    let (_, wc, lc) = {
        let (leaves, tokens, sentences) = node_stats(tree, n, doc);
        (leaves, tokens, sentences)
    };
    Ok((d_lca, lc, wc))
}

/// `(d_m, d_s, width_i, width_j)` for an ordered pair; errors unless `i < j`.
pub fn pair_base_features(
    doc: &Document,
    m_i: &Mention,
    m_j: &Mention,
) -> Result<(usize, usize, usize, usize)> {
    if m_i.id >= m_j.id {
        return Err(Error::Eval(format!(
            "pair features need i < j, got i={} j={}",
            m_i.id, m_j.id
        )));
    }
    let d_m = m_j.id - m_i.id;
    let d_s = doc.sentence_index[m_j.start_tok] - doc.sentence_index[m_i.start_tok];
    Ok((d_m, d_s, m_i.width(), m_j.width()))
}

/// Classify one mention. The NE layer is used when the document has one;
/// otherwise a capitalized token that does not open its sentence counts as
/// named-entity evidence.
pub fn mention_type(doc: &Document, m: &Mention) -> MentionType {
    if is_pronoun(&m.text) {
        return MentionType::Pronoun;
    }
    let has_ne_layer = !doc.ne_spans.is_empty();
    let is_ne = if has_ne_layer {
        doc.ne_spans
            .iter()
            .any(|s| s.start_tok < m.end_tok && m.start_tok < s.end_tok)
    } else {
        (m.start_tok..m.end_tok).any(|t| {
            let capitalized = doc.tokens[t].chars().next().is_some_and(|c| c.is_uppercase());
            let sentence_initial =
                t == 0 || doc.sentence_index[t - 1] != doc.sentence_index[t];
            capitalized && !sentence_initial
        })
    };
    if is_ne {
        MentionType::NamedEntity
    } else {
        MentionType::OtherNp
    }
}

// ---------------------------------------------------------------------------
// Bucketing
// ---------------------------------------------------------------------------

/// Monotone threshold bucketing: `bucket(v)` = number of thresholds `<= v`,
/// so values below the first threshold land in bucket 0 and values at or
/// beyond the last threshold land in the final bucket.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BucketScheme {
    pub name: &'static str,
    pub thresholds: Vec<usize>,
}

impl BucketScheme {
    pub fn new(name: &'static str, thresholds: Vec<usize>) -> Self {
        debug_assert!(thresholds.windows(2).all(|w| w[0] < w[1]), "thresholds must ascend");
        BucketScheme { name, thresholds }
    }

    pub fn bucket(&self, value: usize) -> usize {
        self.thresholds.partition_point(|&t| t <= value)
    }

    pub fn num_buckets(&self) -> usize {
        self.thresholds.len() + 1
    }

    /// For `d_m` and `d_s`.
    pub fn distance() -> Self {
        BucketScheme::new("distance", vec![1, 2, 3, 4, 5, 8, 16, 32, 64])
    }

    /// For `d_lca`: identity buckets capped at 30.
    pub fn lca_distance() -> Self {
        BucketScheme::new("lca_distance", (1..=30).collect())
    }

    /// For `lc_lca` and `wc_lca`.
    pub fn coverage() -> Self {
        BucketScheme::new("coverage", vec![1, 2, 4, 8, 16, 32, 64, 128, 256])
    }

    /// For span widths inside mention representations.
    pub fn width() -> Self {
        BucketScheme::new("width", vec![1, 2, 3, 4, 5, 8, 16, 32])
    }
}

/// Standalone form of [`BucketScheme::bucket`].
pub fn bucket(value: usize, scheme: &BucketScheme) -> usize {
    scheme.bucket(value)
}
