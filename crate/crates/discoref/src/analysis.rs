//! Mention-type analysis: closest-antecedent pair extraction, pair
//! categories, and the distribution of `d_lca` per category.
//!
//! For every mention with at least one earlier same-chain mention, exactly
//! one pair is extracted: the anaphor and its closest prior chain member, so
//! no other supporting mention of the chain lies between the two. Pairs are
//! then grouped by what the anaphor is (pronoun, named-entity-bearing, or
//! plain NP with no lexical overlap) given a non-pronoun antecedent.

use std::collections::BTreeMap;

use crate::corpus::{Corpus, Document, MentionId};
use crate::error::{Error, Result};
use crate::features::{discourse_features, is_pronoun, mention_type, MentionType, PRONOUNS};
use crate::rst::RstTree;

/// Category of an (antecedent, anaphor) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PairCategory {
    /// Anaphor is a pronoun, antecedent is not.
    PrpN,
    /// Anaphor contains a named entity, antecedent is not a pronoun.
    NeN,
    /// Anaphor is a plain NP, antecedent is not a pronoun, and the two share
    /// no content token.
    NpN,
    Other,
}

impl PairCategory {
    pub const ALL: [PairCategory; 4] =
        [PairCategory::PrpN, PairCategory::NeN, PairCategory::NpN, PairCategory::Other];

    pub fn label(self) -> &'static str {
        match self {
            PairCategory::PrpN => "PRP-N",
            PairCategory::NeN => "NE-N",
            PairCategory::NpN => "NP-N",
            PairCategory::Other => "OTHER",
        }
    }
}

/// One closest-antecedent pair with its category and tree distance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelevantPair {
    pub doc_id: String,
    pub i: MentionId,
    pub j: MentionId,
    pub category: PairCategory,
    pub d_lca: usize,
}

/// Articles and common prepositions ignored by the lexical-overlap check, on
/// top of the pronoun list.
const STOP_WORDS: &[&str] = &[
    "a", "an", "the", "of", "in", "on", "at", "by", "for", "with", "to", "from", "as", "into",
    "over", "under", "about",
];

fn content_tokens(doc: &Document, m: &crate::corpus::Mention) -> Vec<String> {
    doc.tokens[m.start_tok..m.end_tok]
        .iter()
        .map(|t| t.to_lowercase())
        .filter(|t| !STOP_WORDS.contains(&t.as_str()) && !PRONOUNS.contains(&t.as_str()))
        .collect()
}

/// Assign a category to the pair `(m_i, m_j)`, `i < j`.
pub fn categorize(doc: &Document, i: MentionId, j: MentionId) -> PairCategory {
    let (m_i, m_j) = (&doc.mentions[i], &doc.mentions[j]);
    let antecedent_is_pronoun = is_pronoun(&m_i.text);
    match mention_type(doc, m_j) {
        MentionType::Pronoun if !antecedent_is_pronoun => PairCategory::PrpN,
        MentionType::NamedEntity if !antecedent_is_pronoun => PairCategory::NeN,
        MentionType::OtherNp if !antecedent_is_pronoun => {
            let a = content_tokens(doc, m_i);
            let b = content_tokens(doc, m_j);
            if a.iter().any(|t| b.contains(t)) {
                PairCategory::Other
            } else {
                PairCategory::NpN
            }
        }
        _ => PairCategory::Other,
    }
}

/// Extract one pair per anaphor: its closest prior same-chain mention.
pub fn relevant_pairs(doc: &Document, tree: &RstTree) -> Result<Vec<RelevantPair>> {
    let mut chain_of = vec![None; doc.mentions.len()];
    for (idx, chain) in doc.gold_chains.iter().enumerate() {
        for &m in &chain.mention_ids {
            chain_of[m] = Some(idx);
        }
    }
    let mut pairs = Vec::new();
    for j in 0..doc.mentions.len() {
        let Some(chain) = chain_of[j] else { continue };
        let closest = (0..j).rev().find(|&i| chain_of[i] == Some(chain));
        let Some(i) = closest else { continue };
        let (d_lca, _, _) =
            discourse_features(doc, tree, &doc.mentions[i], &doc.mentions[j])?;
        pairs.push(RelevantPair {
            doc_id: doc.doc_id.clone(),
            i,
            j,
            category: categorize(doc, i, j),
            d_lca,
        });
    }
    Ok(pairs)
}

/// One histogram row: within `category`, the share of pairs at exactly
/// `d_lca` and at or below it.
#[derive(Debug, Clone, PartialEq)]
pub struct HistRow {
    pub category: PairCategory,
    pub d_lca: usize,
    pub count: usize,
    pub fraction: f64,
    pub cum_fraction: f64,
}

/// Per-category `d_lca` distribution over a corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct DlcaHistogram {
    pub rows: Vec<HistRow>,
    /// Deepest leaf over all binarized trees in the corpus.
    pub max_tree_depth: usize,
    totals: BTreeMap<PairCategory, usize>,
}

impl DlcaHistogram {
    pub fn total(&self, category: PairCategory) -> usize {
        self.totals.get(&category).copied().unwrap_or(0)
    }

    /// Median `d_lca` within a category (mean of the two middle values for
    /// even counts).
    pub fn median(&self, category: PairCategory) -> Option<f64> {
        let total = self.total(category);
        if total == 0 {
            return None;
        }
        let positions = if total % 2 == 1 {
            [total / 2, total / 2]
        } else {
            [total / 2 - 1, total / 2]
        };
        let mut found = [None, None];
        let mut seen = 0usize;
        for row in self.rows.iter().filter(|r| r.category == category) {
            let lo = seen;
            seen += row.count;
            for (k, &p) in positions.iter().enumerate() {
                if found[k].is_none() && p >= lo && p < seen {
                    found[k] = Some(row.d_lca as f64);
                }
            }
        }
        Some((found[0]? + found[1]?) / 2.0)
    }

    /// Share of pairs in `category` with `d_lca` strictly below `limit`.
    pub fn fraction_below(&self, category: PairCategory, limit: usize) -> f64 {
        let total = self.total(category);
        if total == 0 {
            return 0.0;
        }
        let below: usize = self
            .rows
            .iter()
            .filter(|r| r.category == category && r.d_lca < limit)
            .map(|r| r.count)
            .sum();
        below as f64 / total as f64
    }

    /// CSV with header `category,d_lca,count,fraction,cum_fraction`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("category,d_lca,count,fraction,cum_fraction\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{:.6},{:.6}\n",
                r.category.label(),
                r.d_lca,
                r.count,
                r.fraction,
                r.cum_fraction
            ));
        }
        out
    }
}

/// Build the per-category `d_lca` histogram for a corpus. `trees[i]` must be
/// the tree for `corpus.documents[i]`; `filter` restricts the rows to one
/// category.
pub fn dlca_histogram(
    corpus: &Corpus,
    trees: &[RstTree],
    filter: Option<PairCategory>,
) -> Result<DlcaHistogram> {
    let by_id: BTreeMap<&str, &RstTree> =
        trees.iter().map(|t| (t.doc_id.as_str(), t)).collect();
    let missing: Vec<&str> = corpus
        .documents
        .iter()
        .filter(|d| !by_id.contains_key(d.doc_id.as_str()))
        .map(|d| d.doc_id.as_str())
        .collect();
    if !missing.is_empty() {
        return Err(Error::Eval(format!("missing trees for documents: {}", missing.join(", "))));
    }

    let mut counts: BTreeMap<(PairCategory, usize), usize> = BTreeMap::new();
    let mut totals: BTreeMap<PairCategory, usize> = BTreeMap::new();
    let mut max_tree_depth = 0usize;
    for doc in &corpus.documents {
        let tree = by_id[doc.doc_id.as_str()];
        max_tree_depth = max_tree_depth.max(tree.max_leaf_depth());
        for pair in relevant_pairs(doc, tree)? {
            if filter.is_some_and(|f| f != pair.category) {
                continue;
            }
            *counts.entry((pair.category, pair.d_lca)).or_insert(0) += 1;
            *totals.entry(pair.category).or_insert(0) += 1;
        }
    }

    let mut rows = Vec::new();
    for category in PairCategory::ALL {
        let total = totals.get(&category).copied().unwrap_or(0);
        if total == 0 {
            continue;
        }
        let mut cum = 0usize;
        for (&(cat, d_lca), &count) in counts.iter().filter(|((c, _), _)| *c == category) {
            cum += count;
            rows.push(HistRow {
                category: cat,
                d_lca,
                count,
                fraction: count as f64 / total as f64,
                cum_fraction: cum as f64 / total as f64,
            });
        }
    }
    Ok(DlcaHistogram { rows, max_tree_depth, totals })
}
