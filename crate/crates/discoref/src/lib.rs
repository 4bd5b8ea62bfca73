//! Coreference resolution over discourse structure.
//!
//! `discoref` links gold mentions into entity clusters with a mention-ranking
//! pair scorer whose input combines surface features (mention distance,
//! sentence distance, span widths, token embeddings) with structural features
//! read off a binarized RST tree of the document: the distance from the
//! anaphor's discourse unit to the lowest common ancestor of both mentions'
//! units, and the sentence/token coverage of that ancestor's subtree. The
//! anaphor's mention type (pronoun, named entity, other NP) is a further
//! input, letting the scorer weigh tree locality differently per type.
//!
//! The crate covers the whole desk-scale pipeline:
//!
//! - [`corpus`] — CoNLL-style corpus reader/writer with gold chains
//! - [`rst`] — RST tree parsing, binarization, and structural queries
//! - [`features`] — per-pair feature extraction and bucketing
//! - [`scorer`] — trainable pair scorer with exact gradients
//! - [`decoder`] — best-antecedent decoding into clusters
//! - [`metrics`] — MUC, B³, CEAF, average F1, significance testing
//! - [`analysis`] — mention-type categories and `d_lca` distributions
//! - [`synth`] — deterministic synthetic corpora with controllable tree locality
//! - [`experiment`] — preset grids (baseline vs. discourse variants) over seeds

pub mod analysis;
pub mod corpus;
pub mod decoder;
pub mod error;
pub mod experiment;
pub mod features;
pub mod metrics;
pub mod rst;
pub mod scorer;
pub mod synth;

pub use error::{Error, Result};
