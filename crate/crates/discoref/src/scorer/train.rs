//! Gradient-descent training with early stopping on dev average F1.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::Document;
use crate::decoder::{links_to_clusters, select_antecedents, Clustering};
use crate::error::{Error, Result};
use crate::metrics;
use crate::rst::RstTree;
use crate::scorer::loss::{doc_grad, prepare_document, score_document, DropoutSpec, PreparedDoc};
use crate::scorer::params::{FeatureToggles, ScorerDims, ScorerParams};
use crate::scorer::provider::EmbeddingProvider;

/// Training hyperparameters. The optimizer is plain gradient descent with a
/// constant learning rate; each document is one update, with the gradient
/// scaled by the document's mention count so step sizes are comparable
/// across document lengths.
#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub max_epochs: usize,
    pub dropout: f64,
    pub max_antecedents: usize,
    pub seed: u64,
    /// Epochs without a dev improvement before stopping.
    pub patience: usize,
    pub toggles: FeatureToggles,
    pub dims: ScorerDims,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.2,
            max_epochs: 100,
            dropout: 0.2,
            max_antecedents: 50,
            seed: 0,
            patience: 10,
            toggles: FeatureToggles::full(),
            dims: ScorerDims::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    /// Mean per-document loss over the epoch.
    pub train_loss: f64,
    pub dev_avg_f1: f64,
}

/// Per-epoch record of one training run. `initial_dev_f1` is the dev score
/// of the freshly initialized parameters, before any update.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainHistory {
    pub initial_dev_f1: f64,
    pub epochs: Vec<EpochStats>,
    /// Epoch whose parameters were kept (0 = the initial parameters).
    pub best_epoch: usize,
}

/// Decode one prepared document into clusters.
pub fn predict_document(params: &ScorerParams, prep: &PreparedDoc) -> Result<Clustering> {
    let scores = score_document(params, prep);
    let links = select_antecedents(&scores);
    links_to_clusters(&links, prep.n_mentions)
}

/// Average F1 of predictions against gold over a set of documents,
/// micro-aggregated.
pub fn evaluate_documents(
    params: &ScorerParams,
    docs: &[(&Document, PreparedDoc)],
) -> Result<f64> {
    let mut pairs = Vec::with_capacity(docs.len());
    for (doc, prep) in docs {
        let pred = predict_document(params, prep)?;
        pairs.push((doc.gold_clustering(), pred));
    }
    let report = metrics::evaluate_corpus(pairs.iter().map(|(g, p)| (g, p)))?;
    Ok(report.avg_f1)
}

fn mix_seed(seed: u64, epoch: usize, doc: usize) -> u64 {
    let mut z = seed ^ (epoch as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
        ^ (doc as u64).wrapping_mul(0xc2b2_ae3d_27d4_eb4f);
    z = (z ^ (z >> 33)).wrapping_mul(0xff51_afd7_ed55_8ccd);
    z ^ (z >> 33)
}

/// Train on `train_docs`, keeping the parameters that score best on
/// `dev_docs`. Fully deterministic given the config seed: document order per
/// epoch and all dropout masks derive from it.
pub fn train(
    train_docs: &[(&Document, &RstTree)],
    dev_docs: &[(&Document, &RstTree)],
    provider: &EmbeddingProvider,
    config: &TrainConfig,
) -> Result<(ScorerParams, TrainHistory)> {
    if train_docs.is_empty() || dev_docs.is_empty() {
        return Err(Error::Config("train and dev splits must be non-empty".into()));
    }
    let mut dims = config.dims;
    dims.embed_dim = provider.dim();

    let prepare_all = |docs: &[(&Document, &RstTree)]| -> Result<Vec<PreparedDoc>> {
        docs.iter()
            .map(|(doc, tree)| prepare_document(provider, doc, tree, config.max_antecedents))
            .collect()
    };
    let train_prep = prepare_all(train_docs)?;
    let dev_prep: Vec<(&Document, PreparedDoc)> = dev_docs
        .iter()
        .map(|(doc, tree)| {
            prepare_document(provider, doc, tree, config.max_antecedents).map(|p| (*doc, p))
        })
        .collect::<Result<_>>()?;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut params = ScorerParams::init(dims, config.toggles, &mut rng);

    let initial_dev_f1 = evaluate_documents(&params, &dev_prep)?;
    let mut best = (initial_dev_f1, params.clone(), 0usize);
    let mut history = TrainHistory { initial_dev_f1, epochs: Vec::new(), best_epoch: 0 };
    let mut stale = 0usize;

    let mut order: Vec<usize> = (0..train_prep.len()).collect();
    for epoch in 1..=config.max_epochs {
        // Fresh shuffled order per epoch from the run RNG stream.
        for i in (1..order.len()).rev() {
            let j = rand::Rng::gen_range(&mut rng, 0..=i);
            order.swap(i, j);
        }

        let mut epoch_loss = 0.0;
        let mut scored_docs = 0usize;
        for &idx in &order {
            let prep = &train_prep[idx];
            if prep.n_mentions == 0 {
                continue;
            }
            let dropout = (config.dropout > 0.0).then(|| DropoutSpec {
                rate: config.dropout,
                seed: mix_seed(config.seed, epoch, idx),
            });
            let (loss, grad) = doc_grad(&params, prep, dropout.as_ref())?;
            let scale = -config.learning_rate / prep.n_mentions as f64;
            params.axpy(scale, &grad);
            epoch_loss += loss;
            scored_docs += 1;
        }
        if !params.all_finite() {
            return Err(Error::Model(format!(
                "parameters diverged at epoch {epoch}; lower the learning rate"
            )));
        }

        let dev_avg_f1 = evaluate_documents(&params, &dev_prep)?;
        history.epochs.push(EpochStats {
            epoch,
            train_loss: epoch_loss / scored_docs.max(1) as f64,
            dev_avg_f1,
        });

        if dev_avg_f1 > best.0 {
            best = (dev_avg_f1, params.clone(), epoch);
            stale = 0;
        } else {
            stale += 1;
            if stale > config.patience {
                break;
            }
        }
    }

    history.best_epoch = best.2;
    Ok((best.1, history))
}
