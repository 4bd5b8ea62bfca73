//! The trainable mention-pair scorer.
//!
//! A mention's representation concatenates its first, last, and mean token
//! vectors (from a fixed [`EmbeddingProvider`]) with a trainable width-bucket
//! embedding. Two representations, their elementwise product, and the
//! bucketed pair-feature embeddings feed a two-layer rectified network with
//! a scalar output; training maximizes the marginal likelihood of each
//! anaphor's gold antecedents against a dummy antecedent fixed at score 0.

mod checkpoint;
mod loss;
mod network;
mod params;
mod provider;
mod train;

pub use checkpoint::{load_text as load_checkpoint, save_text as save_checkpoint};
pub use loss::{
    candidate_probabilities, doc_grad, doc_loss, prepare_document, score_document, DropoutSpec,
    PreparedDoc,
};
pub use network::PairBuckets;
pub use params::{FeatureToggles, Schemes, ScorerDims, ScorerParams, Table};
pub use provider::EmbeddingProvider;
pub use train::{
    evaluate_documents, predict_document, train, EpochStats, TrainConfig, TrainHistory,
};

use crate::corpus::{Document, Mention};
use crate::error::{Error, Result};
use crate::features::PairFeatures;

/// Materialize one mention representation: `[v_first; v_last; v_mean;
/// width_embedding]`, of length `3 * provider.dim() + feat_embed`.
pub fn mention_repr(
    provider: &EmbeddingProvider,
    params: &ScorerParams,
    doc: &Document,
    m: &Mention,
) -> Result<Vec<f64>> {
    let d = provider.dim();
    if d != params.dims.embed_dim {
        return Err(Error::Model(format!(
            "provider dim {d} does not match scorer embed_dim {}",
            params.dims.embed_dim
        )));
    }
    let mut fixed = vec![0.0; 3 * d];
    let mut buf = vec![0.0; d];
    provider.token_vector(doc, m.start_tok, &mut buf)?;
    fixed[0..d].copy_from_slice(&buf);
    provider.token_vector(doc, m.end_tok - 1, &mut buf)?;
    fixed[d..2 * d].copy_from_slice(&buf);
    for t in m.start_tok..m.end_tok {
        provider.token_vector(doc, t, &mut buf)?;
        for k in 0..d {
            fixed[2 * d + k] += buf[k];
        }
    }
    let inv = 1.0 / m.width() as f64;
    for v in &mut fixed[2 * d..] {
        *v *= inv;
    }
    let schemes = Schemes::standard();
    Ok(network::mention_repr_from_parts(
        params,
        &fixed,
        schemes.width.bucket(m.width()),
    ))
}

/// Score one pair from materialized representations and raw pair features,
/// in inference mode (no dropout). Deterministic.
pub fn pair_score(
    params: &ScorerParams,
    repr_i: &[f64],
    repr_j: &[f64],
    feats: &PairFeatures,
) -> Result<f64> {
    let r = params.dims.repr_dim();
    if repr_i.len() != r || repr_j.len() != r {
        return Err(Error::Model(format!(
            "representation width {} / {} does not match expected {r}",
            repr_i.len(),
            repr_j.len()
        )));
    }
    let schemes = Schemes::standard();
    let buckets = PairBuckets {
        dm: schemes.dm.bucket(feats.d_m),
        ds: schemes.ds.bucket(feats.d_s),
        dlca: schemes.dlca.bucket(feats.d_lca),
        lc: schemes.lc.bucket(feats.lc_lca),
        wc: schemes.wc.bucket(feats.wc_lca),
        type_j: feats.type_j.index(),
        width_i: schemes.width.bucket(feats.width_i),
        width_j: schemes.width.bucket(feats.width_j),
    };
    let x = network::assemble(params, repr_i, repr_j, &buckets);
    Ok(network::forward(params, x, None).score)
}

#[cfg(test)]
mod tests;
