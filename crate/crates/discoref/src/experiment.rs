//! Preset grids over seeds: train each model variant on a shared synthetic
//! corpus, score the held-out test split, and compare variants against the
//! baseline with a one-tailed t-test.

use rayon::prelude::*;

use crate::corpus::{Corpus, Document};
use crate::error::{Error, Result};
use crate::metrics::{t_test_one_tailed, t_test_paired_one_tailed};
use crate::rst::RstTree;
use crate::scorer::{
    evaluate_documents, prepare_document, predict_document, train, EmbeddingProvider,
    FeatureToggles, TrainConfig,
};
use crate::synth::SynthConfig;

/// A named feature configuration, one table row of the ablation grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Preset {
    pub name: String,
    pub toggles: FeatureToggles,
}

impl Preset {
    pub fn new(name: &str, toggles: FeatureToggles) -> Self {
        Preset { name: name.to_string(), toggles }
    }

    pub fn by_name(name: &str) -> Result<Preset> {
        standard_presets()
            .into_iter()
            .find(|p| p.name == name)
            .ok_or_else(|| Error::Config(format!("unknown preset: {name}")))
    }
}

/// The full grid: baseline, each feature group alone, combined, and the
/// combined model without sentence distance.
pub fn standard_presets() -> Vec<Preset> {
    vec![
        Preset::new("baseline", FeatureToggles::baseline()),
        Preset::new(
            "+type",
            FeatureToggles { use_disc: false, use_type: true, use_ds: true },
        ),
        Preset::new(
            "+disc",
            FeatureToggles { use_disc: true, use_type: false, use_ds: true },
        ),
        Preset::new("+disc+type", FeatureToggles::full()),
        Preset::new(
            "+disc+type-ds",
            FeatureToggles { use_disc: true, use_type: true, use_ds: false },
        ),
    ]
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub synth: SynthConfig,
    pub n_train: usize,
    pub n_dev: usize,
    pub n_test: usize,
    pub seeds: Vec<u64>,
    pub train: TrainConfig,
    pub embed_dim: usize,
    pub embed_seed: u64,
    pub presets: Vec<Preset>,
    /// Pair runs by seed in the significance test instead of Welch's test.
    pub paired_test: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let n_train = 200;
        let n_dev = 20;
        let n_test = 40;
        ExperimentConfig {
            synth: SynthConfig { n_docs: n_train + n_dev + n_test, ..SynthConfig::default() },
            n_train,
            n_dev,
            n_test,
            seeds: vec![11, 22, 33, 44, 55],
            train: TrainConfig {
                learning_rate: 0.5,
                max_epochs: 12,
                patience: 4,
                ..TrainConfig::default()
            },
            embed_dim: 32,
            embed_seed: 1_234_567,
            presets: standard_presets(),
            paired_test: false,
        }
    }
}

/// One (preset, seed) training run.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub preset: String,
    pub seed: u64,
    pub test_avg_f1: f64,
    pub best_dev_f1: f64,
    pub best_epoch: usize,
    pub epochs_run: usize,
}

/// Per-preset aggregate over seeds.
#[derive(Debug, Clone)]
pub struct PresetSummary {
    pub name: String,
    /// `(seed, test avg F1)` in seed order.
    pub per_seed: Vec<(u64, f64)>,
    pub mean_avg_f1: f64,
    /// One-tailed p for H1: this preset beats the baseline; `None` for the
    /// baseline row itself.
    pub p_vs_baseline: Option<f64>,
    /// p < 0.01, the paper's marking threshold.
    pub significant: bool,
}

impl PresetSummary {
    pub fn scores(&self) -> Vec<f64> {
        self.per_seed.iter().map(|&(_, s)| s).collect()
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentSummary {
    pub presets: Vec<PresetSummary>,
    pub runs: Vec<RunResult>,
}

impl ExperimentSummary {
    pub fn preset(&self, name: &str) -> Option<&PresetSummary> {
        self.presets.iter().find(|p| p.name == name)
    }

    /// Aligned text table, scores in points (x100).
    pub fn format_table(&self) -> String {
        let mut out = String::new();
        let seed_headers: Vec<String> = self
            .presets
            .first()
            .map(|p| p.per_seed.iter().map(|(s, _)| format!("seed {s}")).collect())
            .unwrap_or_default();
        out.push_str(&format!("{:<16} {:>8}", "preset", "mean"));
        for h in &seed_headers {
            out.push_str(&format!(" {h:>9}"));
        }
        out.push_str(&format!(" {:>10} {:>5}\n", "p vs base", "sig"));
        for p in &self.presets {
            out.push_str(&format!("{:<16} {:>8.2}", p.name, 100.0 * p.mean_avg_f1));
            for &(_, s) in &p.per_seed {
                out.push_str(&format!(" {:>9.2}", 100.0 * s));
            }
            match p.p_vs_baseline {
                Some(pv) => out.push_str(&format!(
                    " {:>10.4} {:>5}\n",
                    pv,
                    if p.significant { "*" } else { "" }
                )),
                None => out.push_str(&format!(" {:>10} {:>5}\n", "-", "")),
            }
        }
        out
    }

    /// CSV with one row per (preset, seed) and per-preset aggregates.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("preset,seed,test_avg_f1,mean_avg_f1,p_vs_baseline\n");
        for p in &self.presets {
            for &(seed, score) in &p.per_seed {
                out.push_str(&format!(
                    "{},{},{:.6},{:.6},{}\n",
                    p.name,
                    seed,
                    score,
                    p.mean_avg_f1,
                    p.p_vs_baseline.map_or("-".to_string(), |v| format!("{v:.6}")),
                ));
            }
        }
        out
    }
}

/// Split a corpus and its aligned trees into train/dev/test document slices.
pub fn split_corpus<'a>(
    corpus: &'a Corpus,
    trees: &'a [RstTree],
    n_train: usize,
    n_dev: usize,
    n_test: usize,
) -> Result<(
    Vec<(&'a Document, &'a RstTree)>,
    Vec<(&'a Document, &'a RstTree)>,
    Vec<(&'a Document, &'a RstTree)>,
)> {
    let total = n_train + n_dev + n_test;
    if corpus.documents.len() < total || trees.len() != corpus.documents.len() {
        return Err(Error::Config(format!(
            "need {total} documents with trees, have {}",
            corpus.documents.len()
        )));
    }
    let paired: Vec<(&Document, &RstTree)> =
        corpus.documents.iter().zip(trees.iter()).collect();
    Ok((
        paired[..n_train].to_vec(),
        paired[n_train..n_train + n_dev].to_vec(),
        paired[n_train + n_dev..total].to_vec(),
    ))
}

/// Train one preset for one seed and score it on the test split.
pub fn run_single(
    cfg: &ExperimentConfig,
    preset: &Preset,
    seed: u64,
    train_docs: &[(&Document, &RstTree)],
    dev_docs: &[(&Document, &RstTree)],
    test_docs: &[(&Document, &RstTree)],
    provider: &EmbeddingProvider,
) -> Result<RunResult> {
    let train_cfg = TrainConfig { toggles: preset.toggles, seed, ..cfg.train.clone() };
    let (params, history) = train(train_docs, dev_docs, provider, &train_cfg)?;
    let test_prep: Vec<(&Document, crate::scorer::PreparedDoc)> = test_docs
        .iter()
        .map(|(doc, tree)| {
            prepare_document(provider, doc, tree, train_cfg.max_antecedents).map(|p| (*doc, p))
        })
        .collect::<Result<_>>()?;
    let test_avg_f1 = evaluate_documents(&params, &test_prep)?;
    let best_dev_f1 = history
        .epochs
        .iter()
        .map(|e| e.dev_avg_f1)
        .fold(history.initial_dev_f1, f64::max);
    Ok(RunResult {
        preset: preset.name.clone(),
        seed,
        test_avg_f1,
        best_dev_f1,
        best_epoch: history.best_epoch,
        epochs_run: history.epochs.len(),
    })
}

/// Run the whole grid on a freshly generated corpus. Runs execute in
/// parallel; results are assembled in (preset, seed) order, so the summary
/// is deterministic.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentSummary> {
    if cfg.seeds.is_empty() {
        return Err(Error::Config("experiment needs at least one seed".into()));
    }
    let synth_cfg = SynthConfig {
        n_docs: cfg.n_train + cfg.n_dev + cfg.n_test,
        ..cfg.synth.clone()
    };
    let (corpus, trees) = crate::synth::generate(&synth_cfg)?;
    let (train_docs, dev_docs, test_docs) =
        split_corpus(&corpus, &trees, cfg.n_train, cfg.n_dev, cfg.n_test)?;
    let provider = EmbeddingProvider::hashed(cfg.embed_dim, cfg.embed_seed);

    let jobs: Vec<(usize, u64)> = cfg
        .presets
        .iter()
        .enumerate()
        .flat_map(|(pi, _)| cfg.seeds.iter().map(move |&s| (pi, s)))
        .collect();
    let mut runs: Vec<RunResult> = jobs
        .par_iter()
        .map(|&(pi, seed)| {
            run_single(
                cfg,
                &cfg.presets[pi],
                seed,
                &train_docs,
                &dev_docs,
                &test_docs,
                &provider,
            )
        })
        .collect::<Result<_>>()?;
    runs.sort_by_key(|r| {
        let pi = cfg.presets.iter().position(|p| p.name == r.preset).unwrap_or(usize::MAX);
        let si = cfg.seeds.iter().position(|&s| s == r.seed).unwrap_or(usize::MAX);
        (pi, si)
    });

    let baseline_scores: Option<Vec<f64>> = cfg
        .presets
        .iter()
        .position(|p| p.name == "baseline")
        .map(|pi| {
            cfg.seeds
                .iter()
                .map(|&s| {
                    runs.iter()
                        .find(|r| r.preset == cfg.presets[pi].name && r.seed == s)
                        .map(|r| r.test_avg_f1)
                        .unwrap_or(f64::NAN)
                })
                .collect()
        });

    let mut presets = Vec::new();
    for preset in &cfg.presets {
        let per_seed: Vec<(u64, f64)> = cfg
            .seeds
            .iter()
            .map(|&s| {
                let score = runs
                    .iter()
                    .find(|r| r.preset == preset.name && r.seed == s)
                    .map(|r| r.test_avg_f1)
                    .unwrap_or(f64::NAN);
                (s, score)
            })
            .collect();
        let scores: Vec<f64> = per_seed.iter().map(|&(_, s)| s).collect();
        let mean_avg_f1 = scores.iter().sum::<f64>() / scores.len() as f64;
        let p_vs_baseline = match (&baseline_scores, preset.name.as_str()) {
            (Some(base), name) if name != "baseline" && base.len() >= 2 => {
                let p = if cfg.paired_test {
                    t_test_paired_one_tailed(&scores, base)?.1
                } else {
                    t_test_one_tailed(&scores, base)?.1
                };
                Some(p)
            }
            _ => None,
        };
        presets.push(PresetSummary {
            name: preset.name.clone(),
            per_seed,
            mean_avg_f1,
            significant: p_vs_baseline.is_some_and(|p| p < 0.01),
            p_vs_baseline,
        });
    }
    Ok(ExperimentSummary { presets, runs })
}

/// Convenience for scoring one preset's predictions outside the grid.
pub fn predict_corpus(
    params: &crate::scorer::ScorerParams,
    provider: &EmbeddingProvider,
    docs: &[(&Document, &RstTree)],
    max_antecedents: usize,
) -> Result<Vec<crate::decoder::Clustering>> {
    docs.iter()
        .map(|(doc, tree)| {
            let prep = prepare_document(provider, doc, tree, max_antecedents)?;
            predict_document(params, &prep)
        })
        .collect()
}
