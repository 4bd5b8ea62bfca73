//! Mention-ranking marginal likelihood over antecedent candidates.
//!
//! For each anaphor `j`, the candidate set is the previous `min(j, K)`
//! mentions plus a dummy antecedent with fixed score 0. With `GOLD(j)` the
//! prior same-chain mentions inside that window (or the dummy when there are
//! none), the document loss is
//!
//! ```text
//! loss = - sum_j log( sum_{a in GOLD(j)} P(a | j) )
//! ```
//!
//! with `P` the softmax over the dummy and all candidates.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Document, MentionId};
use crate::error::{Error, Result};
use crate::features::PairFeatures;
use crate::rst::RstTree;
use crate::scorer::network::{self, PairBuckets, Trace};
use crate::scorer::params::{Schemes, ScorerParams};
use crate::scorer::provider::EmbeddingProvider;

/// Dropout applied after FC1 during training. The mask stream is fully
/// determined by `seed`, so repeated evaluations (e.g. for finite
/// differences) see identical masks.
#[derive(Debug, Clone, Copy)]
pub struct DropoutSpec {
    pub rate: f64,
    pub seed: u64,
}

/// A document preprocessed for scoring: fixed mention vectors, bucketed pair
/// features for every candidate window, and gold chain membership.
#[derive(Debug, Clone)]
pub struct PreparedDoc {
    pub doc_id: String,
    pub n_mentions: usize,
    /// Per mention: `[v_first; v_last; v_mean]` (3D values).
    fixed: Vec<Vec<f64>>,
    width_bucket: Vec<usize>,
    chain_of: Vec<Option<usize>>,
    /// `window_start[j] = max(0, j - K)`.
    window_start: Vec<usize>,
    /// `feats[j][c - window_start[j]]` holds the buckets for pair `(c, j)`.
    feats: Vec<Vec<PairBuckets>>,
}

impl PreparedDoc {
    pub fn candidates(&self, j: usize) -> std::ops::Range<usize> {
        self.window_start[j]..j
    }

    pub fn gold_antecedents(&self, j: usize) -> Vec<MentionId> {
        self.candidates(j)
            .filter(|&c| self.chain_of[c].is_some() && self.chain_of[c] == self.chain_of[j])
            .collect()
    }
}

/// Precompute everything the trainer needs for one document.
pub fn prepare_document(
    provider: &EmbeddingProvider,
    doc: &Document,
    tree: &RstTree,
    max_antecedents: usize,
) -> Result<PreparedDoc> {
    let schemes = Schemes::standard();
    let d = provider.dim();
    let n = doc.mentions.len();

    let mut fixed = Vec::with_capacity(n);
    let mut width_bucket = Vec::with_capacity(n);
    let mut buf = vec![0.0; d];
    for m in &doc.mentions {
        let mut v = vec![0.0; 3 * d];
        provider.token_vector(doc, m.start_tok, &mut buf)?;
        v[0..d].copy_from_slice(&buf);
        provider.token_vector(doc, m.end_tok - 1, &mut buf)?;
        v[d..2 * d].copy_from_slice(&buf);
        for t in m.start_tok..m.end_tok {
            provider.token_vector(doc, t, &mut buf)?;
            for k in 0..d {
                v[2 * d + k] += buf[k];
            }
        }
        let inv = 1.0 / m.width() as f64;
        for k in 0..d {
            v[2 * d + k] *= inv;
        }
        fixed.push(v);
        width_bucket.push(schemes.width.bucket(m.width()));
    }

    let mut chain_of = vec![None; n];
    for (idx, chain) in doc.gold_chains.iter().enumerate() {
        for &m in &chain.mention_ids {
            chain_of[m] = Some(idx);
        }
    }

    let mut window_start = Vec::with_capacity(n);
    let mut feats = Vec::with_capacity(n);
    for j in 0..n {
        let start = j.saturating_sub(max_antecedents);
        window_start.push(start);
        let mut row = Vec::with_capacity(j - start);
        for c in start..j {
            let f = PairFeatures::compute(doc, tree, &doc.mentions[c], &doc.mentions[j])?;
            row.push(PairBuckets {
                dm: schemes.dm.bucket(f.d_m),
                ds: schemes.ds.bucket(f.d_s),
                dlca: schemes.dlca.bucket(f.d_lca),
                lc: schemes.lc.bucket(f.lc_lca),
                wc: schemes.wc.bucket(f.wc_lca),
                type_j: f.type_j.index(),
                width_i: width_bucket[c],
                width_j: width_bucket[j],
            });
        }
        feats.push(row);
    }

    Ok(PreparedDoc {
        doc_id: doc.doc_id.clone(),
        n_mentions: n,
        fixed,
        width_bucket,
        chain_of,
        window_start,
        feats,
    })
}

fn pair_trace(
    params: &ScorerParams,
    prep: &PreparedDoc,
    c: usize,
    j: usize,
    drop_scale: Option<Vec<f64>>,
) -> Trace {
    let repr_i = network::mention_repr_from_parts(params, &prep.fixed[c], prep.width_bucket[c]);
    let repr_j = network::mention_repr_from_parts(params, &prep.fixed[j], prep.width_bucket[j]);
    let buckets = &prep.feats[j][c - prep.window_start[j]];
    let x = network::assemble(params, &repr_i, &repr_j, buckets);
    network::forward(params, x, drop_scale)
}

fn drop_scale_for(rng: &mut ChaCha8Rng, rate: f64, h1: usize) -> Option<Vec<f64>> {
    if rate <= 0.0 {
        return None;
    }
    let keep = 1.0 / (1.0 - rate);
    Some((0..h1).map(|_| if rng.gen::<f64>() < rate { 0.0 } else { keep }).collect())
}

/// log(exp(0) + sum exp(scores)): the dummy is always part of the
/// normalizer.
fn logsumexp_with_dummy(scores: &[f64]) -> f64 {
    let m = scores.iter().copied().fold(0.0f64, f64::max);
    let sum: f64 = (-m).exp() + scores.iter().map(|s| (s - m).exp()).sum::<f64>();
    m + sum.ln()
}

fn logsumexp(scores: &[f64]) -> f64 {
    let m = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = scores.iter().map(|s| (s - m).exp()).sum();
    m + sum.ln()
}

fn run_document(
    params: &ScorerParams,
    prep: &PreparedDoc,
    dropout: Option<&DropoutSpec>,
    mut grad: Option<&mut ScorerParams>,
) -> Result<f64> {
    if prep.n_mentions == 0 {
        return Err(Error::Model(format!("document {} has no mentions", prep.doc_id)));
    }
    let mut mask_rng = dropout.map(|spec| (ChaCha8Rng::seed_from_u64(spec.seed), spec.rate));
    let h1 = params.dims.hidden1;
    let mut loss = 0.0;

    for j in 0..prep.n_mentions {
        let window = prep.candidates(j);
        let mut traces: Vec<Trace> = Vec::with_capacity(window.len());
        for c in window.clone() {
            let scale = mask_rng
                .as_mut()
                .and_then(|(rng, rate)| drop_scale_for(rng, *rate, h1));
            traces.push(pair_trace(params, prep, c, j, scale));
        }
        let scores: Vec<f64> = traces.iter().map(|t| t.score).collect();
        let gold: Vec<usize> = prep
            .gold_antecedents(j)
            .iter()
            .map(|&c| c - prep.window_start[j])
            .collect();

        let lse_all = logsumexp_with_dummy(&scores);
        let lse_gold = if gold.is_empty() {
            0.0 // only the dummy, whose score is 0
        } else {
            logsumexp(&gold.iter().map(|&g| scores[g]).collect::<Vec<_>>())
        };
        loss += lse_all - lse_gold;

        if let Some(g) = grad.as_deref_mut() {
            let gold_mask: Vec<bool> = {
                let mut mask = vec![false; scores.len()];
                for &idx in &gold {
                    mask[idx] = true;
                }
                mask
            };
            for (idx, trace) in traces.iter().enumerate() {
                let p_all = (scores[idx] - lse_all).exp();
                let p_gold = if gold_mask[idx] { (scores[idx] - lse_gold).exp() } else { 0.0 };
                let coeff = p_all - p_gold;
                let c = prep.window_start[j] + idx;
                let buckets = &prep.feats[j][idx];
                let _ = c;
                network::backward(params, trace, coeff, buckets, g);
            }
        }
    }
    Ok(loss)
}

/// Document loss under the current parameters. Dropout is applied only when
/// a spec is given (training); inference is deterministic.
pub fn doc_loss(
    params: &ScorerParams,
    prep: &PreparedDoc,
    dropout: Option<&DropoutSpec>,
) -> Result<f64> {
    run_document(params, prep, dropout, None)
}

/// Loss plus its exact gradient with respect to every parameter block.
pub fn doc_grad(
    params: &ScorerParams,
    prep: &PreparedDoc,
    dropout: Option<&DropoutSpec>,
) -> Result<(f64, ScorerParams)> {
    let mut grad = params.zeros_like();
    let loss = run_document(params, prep, dropout, Some(&mut grad))?;
    Ok((loss, grad))
}

/// Candidate scores per anaphor, inference mode (no dropout).
pub fn score_document(params: &ScorerParams, prep: &PreparedDoc) -> Vec<Vec<(MentionId, f64)>> {
    (0..prep.n_mentions)
        .map(|j| {
            prep.candidates(j)
                .map(|c| (c, pair_trace(params, prep, c, j, None).score))
                .collect()
        })
        .collect()
}

/// Softmax over the dummy and all candidates for one anaphor; used by the
/// probability-normalization checks.
pub fn candidate_probabilities(scores: &[f64]) -> Vec<f64> {
    let lse = logsumexp_with_dummy(scores);
    let mut probs = Vec::with_capacity(scores.len() + 1);
    probs.push((-lse).exp()); // dummy
    probs.extend(scores.iter().map(|s| (s - lse).exp()));
    probs
}
