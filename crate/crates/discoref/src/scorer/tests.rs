use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::*;
use crate::corpus::{CorefChain, Document, Mention};
use crate::features::MentionType;
use crate::rst::{binarize, parse_rst, RstTree};

fn tiny_dims() -> ScorerDims {
    ScorerDims { embed_dim: 3, feat_embed: 2, hidden1: 4, hidden2: 3 }
}

/// 12-token document over four EDUs ((e0 e1)(e2 e3)), two sentences, four
/// single-token mentions, chain layout chosen by the caller.
fn toy_doc(chains: &[&[usize]]) -> (Document, RstTree) {
    let tokens: Vec<String> = (0..12).map(|i| format!("w{i}")).collect();
    let sentence_index: Vec<usize> = (0..12).map(|i| usize::from(i >= 6)).collect();
    let mention_starts = [0usize, 3, 6, 9];
    let mentions: Vec<Mention> = mention_starts
        .iter()
        .enumerate()
        .map(|(id, &s)| Mention { id, start_tok: s, end_tok: s + 1, text: tokens[s].clone() })
        .collect();
    let gold_chains = chains
        .iter()
        .enumerate()
        .map(|(chain_id, ms)| CorefChain { chain_id, mention_ids: ms.to_vec() })
        .collect();
    let doc = Document {
        doc_id: "toy#0".into(),
        tokens,
        sentence_index,
        mentions,
        gold_chains,
        ne_spans: vec![],
    };
    let sexpr = "(node Elab (node Joint (edu 0 0 3) (edu 1 3 6)) \
                 (node Joint (edu 2 6 9) (edu 3 9 12)))";
    let tree = binarize(&parse_rst(sexpr, &doc).unwrap());
    (doc, tree)
}

// --- mention_repr ----------------------------------------------------------

#[test]
fn single_token_mention_repeats_vector() {
    let (doc, _) = toy_doc(&[&[0, 1, 2, 3]]);
    let provider = EmbeddingProvider::hashed(6, 7);
    let params = ScorerParams::zeros(ScorerDims::with_embed_dim(6), FeatureToggles::full());
    let r = mention_repr(&provider, &params, &doc, &doc.mentions[0]).unwrap();
    let d = 6;
    assert_eq!(r[0..d], r[d..2 * d]);
    assert_eq!(r[0..d], r[2 * d..3 * d]);
    assert_eq!(r.len(), 3 * d + 20);
}

#[test]
fn hashed_repr_is_stable_across_runs() {
    let (doc, _) = toy_doc(&[&[0, 1]]);
    let params = ScorerParams::zeros(ScorerDims::with_embed_dim(8), FeatureToggles::full());
    let a = mention_repr(&EmbeddingProvider::hashed(8, 5), &params, &doc, &doc.mentions[1])
        .unwrap();
    let b = mention_repr(&EmbeddingProvider::hashed(8, 5), &params, &doc, &doc.mentions[1])
        .unwrap();
    assert_eq!(a, b);
}

#[test]
fn file_backed_mean_is_componentwise_average() {
    // Two-token mention over known vectors u and w.
    let text = "#doc toy#0\n1 0 2\n3 4 -2\n0 0 0\n0 0 0\n0 0 0\n0 0 0\n\
                0 0 0\n0 0 0\n0 0 0\n0 0 0\n0 0 0\n0 0 0\n";
    let provider = EmbeddingProvider::from_file_str(text).unwrap();
    let (mut doc, _) = toy_doc(&[&[0]]);
    doc.mentions = vec![Mention { id: 0, start_tok: 0, end_tok: 2, text: "w0 w1".into() }];
    let params = ScorerParams::zeros(ScorerDims::with_embed_dim(3), FeatureToggles::full());
    let r = mention_repr(&provider, &params, &doc, &doc.mentions[0]).unwrap();
    assert_eq!(&r[0..3], &[1.0, 0.0, 2.0]); // first
    assert_eq!(&r[3..6], &[3.0, 4.0, -2.0]); // last
    assert_eq!(&r[6..9], &[2.0, 2.0, 0.0]); // mean = (u + w) / 2
}

// --- pair_score -------------------------------------------------------------

fn any_feats() -> crate::features::PairFeatures {
    crate::features::PairFeatures {
        d_m: 1,
        d_s: 0,
        width_i: 1,
        width_j: 1,
        d_lca: 2,
        lc_lca: 1,
        wc_lca: 5,
        type_j: MentionType::OtherNp,
    }
}

#[test]
fn all_zero_params_score_zero() {
    let dims = tiny_dims();
    let params = ScorerParams::zeros(dims, FeatureToggles::full());
    let r = vec![0.3; dims.repr_dim()];
    assert_eq!(pair_score(&params, &r, &r, &any_feats()).unwrap(), 0.0);
}

#[test]
fn score_matches_hand_executed_forward_pass() {
    // D = 1, E = 1, two 2-unit layers; every constant below is also used in
    // the straight-line oracle.
    let dims = ScorerDims { embed_dim: 1, feat_embed: 1, hidden1: 2, hidden2: 2 };
    let mut p = ScorerParams::zeros(dims, FeatureToggles::full());
    p.emb_dm.row_mut(1)[0] = 0.7; // d_m = 1
    p.emb_ds.row_mut(0)[0] = -0.3; // d_s = 0
    p.emb_dlca.row_mut(2)[0] = 0.4; // d_lca = 2
    p.emb_lc.row_mut(1)[0] = 0.2; // lc = 1
    p.emb_wc.row_mut(3)[0] = -0.6; // wc = 5 -> bucket 3
    p.emb_type.row_mut(2)[0] = 0.9; // OTHER_NP
    for v in p.fc1_w.row_mut(0) {
        *v = 0.1;
    }
    for v in p.fc1_w.row_mut(1) {
        *v = -0.05;
    }
    p.fc1_b = vec![0.05, 0.2];
    p.fc2_w.row_mut(0).copy_from_slice(&[0.5, 1.0]);
    p.fc2_w.row_mut(1).copy_from_slice(&[-1.0, 0.3]);
    p.fc2_b = vec![0.1, -0.2];
    p.out_w = vec![2.0, 1.0];
    p.out_b = 0.25;

    let repr_i = [1.0, 2.0, 3.0, 0.5];
    let repr_j = [-1.0, 1.0, 0.5, 2.0];
    let got = pair_score(&p, &repr_i, &repr_j, &any_feats()).unwrap();

    // Straight-line oracle.
    let sum_i: f64 = 1.0 + 2.0 + 3.0 + 0.5;
    let sum_j: f64 = -1.0 + 1.0 + 0.5 + 2.0;
    let sum_prod: f64 = 1.0 * -1.0 + 2.0 * 1.0 + 3.0 * 0.5 + 0.5 * 2.0;
    let sum_feats: f64 = 0.7 - 0.3 + 0.4 + 0.2 - 0.6 + 0.9;
    let s: f64 = sum_i + sum_j + sum_prod + sum_feats;
    let z1_0 = 0.1 * s + 0.05;
    let z1_1 = -0.05 * s + 0.2;
    let a1 = [z1_0.max(0.0), z1_1.max(0.0)];
    let z2_0 = 0.5 * a1[0] + 1.0 * a1[1] + 0.1;
    let z2_1 = -1.0 * a1[0] + 0.3 * a1[1] - 0.2;
    let a2 = [z2_0.max(0.0), z2_1.max(0.0)];
    let want = 2.0 * a2[0] + 1.0 * a2[1] + 0.25;

    assert!((got - want).abs() < 1e-12, "got {got}, want {want}");
    assert!((want - 1.88).abs() < 1e-12, "hand trace says 1.88");
}

#[test]
fn disabled_features_do_not_affect_score() {
    let dims = tiny_dims();
    let mut rng = StdRng::seed_from_u64(3);

    let no_disc = FeatureToggles { use_disc: false, use_type: true, use_ds: true };
    let params = ScorerParams::init(dims, no_disc, &mut rng);
    let r_i: Vec<f64> = (0..dims.repr_dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let r_j: Vec<f64> = (0..dims.repr_dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut a = any_feats();
    let mut b = any_feats();
    // Permute the discourse triple.
    b.d_lca = 9;
    b.lc_lca = 5;
    b.wc_lca = 200;
    assert_eq!(
        pair_score(&params, &r_i, &r_j, &a).unwrap(),
        pair_score(&params, &r_i, &r_j, &b).unwrap()
    );

    let no_type = FeatureToggles { use_disc: true, use_type: false, use_ds: true };
    let params = ScorerParams::init(dims, no_type, &mut rng);
    b = a;
    b.type_j = MentionType::Pronoun;
    assert_eq!(
        pair_score(&params, &r_i, &r_j, &a).unwrap(),
        pair_score(&params, &r_i, &r_j, &b).unwrap()
    );

    let no_ds = FeatureToggles { use_disc: true, use_type: true, use_ds: false };
    let params = ScorerParams::init(dims, no_ds, &mut rng);
    b = a;
    b.d_s = 40;
    assert_eq!(
        pair_score(&params, &r_i, &r_j, &a).unwrap(),
        pair_score(&params, &r_i, &r_j, &b).unwrap()
    );
    // With d_s enabled the same change does move the score.
    a.d_s = 0;
    let params = ScorerParams::init(dims, FeatureToggles::full(), &mut rng);
    assert_ne!(
        pair_score(&params, &r_i, &r_j, &a).unwrap(),
        pair_score(&params, &r_i, &r_j, &b).unwrap()
    );
}

#[test]
fn shape_mismatch_is_error() {
    let params = ScorerParams::zeros(tiny_dims(), FeatureToggles::full());
    let short = vec![0.0; 3];
    assert!(pair_score(&params, &short, &short, &any_feats()).is_err());
}

// --- doc_loss ----------------------------------------------------------------

fn prep(doc: &Document, tree: &RstTree, d: usize) -> PreparedDoc {
    let provider = EmbeddingProvider::hashed(d, 11);
    prepare_document(&provider, doc, tree, 50).unwrap()
}

#[test]
fn single_mention_document_has_zero_loss() {
    let (mut doc, tree) = toy_doc(&[&[0]]);
    doc.mentions.truncate(1);
    let params = ScorerParams::zeros(tiny_dims(), FeatureToggles::full());
    let p = prep(&doc, &tree, 3);
    assert_eq!(doc_loss(&params, &p, None).unwrap(), 0.0);
}

#[test]
fn two_mentions_same_chain_zero_params() {
    let (mut doc, tree) = toy_doc(&[&[0, 1]]);
    doc.mentions.truncate(2);
    let params = ScorerParams::zeros(tiny_dims(), FeatureToggles::full());
    let p = prep(&doc, &tree, 3);
    let loss = doc_loss(&params, &p, None).unwrap();
    assert!((loss - 0.5f64.ln().abs()).abs() < 1e-12, "loss = {loss}");
}

#[test]
fn three_mentions_hand_enumerated_softmax() {
    // Chains {0,2} and {1}. With all-zero parameters every pair scores 0:
    //   j=0: only the dummy, no loss.
    //   j=1: no prior same-chain mention, GOLD = {dummy}; two options,
    //        contribution -ln(1/2).
    //   j=2: GOLD = {m0} among {dummy, m0, m1}; contribution -ln(1/3).
    let (mut doc, tree) = toy_doc(&[&[0, 2], &[1]]);
    doc.mentions.truncate(3);
    doc.gold_chains = vec![
        CorefChain { chain_id: 0, mention_ids: vec![0, 2] },
        CorefChain { chain_id: 1, mention_ids: vec![1] },
    ];
    let params = ScorerParams::zeros(tiny_dims(), FeatureToggles::full());
    let p = prep(&doc, &tree, 3);
    let loss = doc_loss(&params, &p, None).unwrap();
    let want = 2f64.ln() + 3f64.ln();
    assert!((loss - want).abs() < 1e-12, "loss = {loss}, want {want}");
}

#[test]
fn empty_document_is_error() {
    let (mut doc, tree) = toy_doc(&[]);
    doc.mentions.clear();
    doc.gold_chains.clear();
    let params = ScorerParams::zeros(tiny_dims(), FeatureToggles::full());
    let p = prep(&doc, &tree, 3);
    assert!(doc_loss(&params, &p, None).is_err());
}

#[test]
fn candidate_probabilities_sum_to_one() {
    let mut rng = StdRng::seed_from_u64(8);
    for _ in 0..50 {
        let n = rng.gen_range(0..12);
        let scores: Vec<f64> = (0..n).map(|_| rng.gen_range(-30.0..30.0)).collect();
        let probs = candidate_probabilities(&scores);
        assert_eq!(probs.len(), n + 1);
        let total: f64 = probs.iter().sum();
        assert!((total - 1.0).abs() < 1e-9, "sum = {total}");
    }
}

// --- gradients -----------------------------------------------------------------

fn fd_max_rel_err(
    params: &ScorerParams,
    p: &PreparedDoc,
    dropout: Option<&DropoutSpec>,
) -> f64 {
    let (_, analytic) = doc_grad(params, p, dropout).unwrap();
    let h = 1e-4;
    let mut max_rel = 0.0f64;
    let n_blocks = params.blocks().len();
    for b in 0..n_blocks {
        let len = params.blocks()[b].1.len();
        for k in 0..len {
            let mut plus = params.clone();
            plus.blocks_mut()[b].1[k] += h;
            let lp = doc_loss(&plus, p, dropout).unwrap();
            let mut minus = params.clone();
            minus.blocks_mut()[b].1[k] -= h;
            let lm = doc_loss(&minus, p, dropout).unwrap();
            let fd = (lp - lm) / (2.0 * h);
            let a = analytic.blocks()[b].1[k];
            let rel = (a - fd).abs() / a.abs().max(fd.abs()).max(1e-6);
            max_rel = max_rel.max(rel);
        }
    }
    max_rel
}

#[test]
fn gradient_matches_finite_differences() {
    let mut rng = StdRng::seed_from_u64(21);
    let (doc, tree) = toy_doc(&[&[0, 2, 3], &[1]]);
    let p = prep(&doc, &tree, 3);
    for trial in 0..3 {
        let params =
            ScorerParams::init(tiny_dims(), FeatureToggles::full(), &mut rng);
        let err = fd_max_rel_err(&params, &p, None);
        assert!(err < 1e-3, "trial {trial}: max rel err {err}");
    }
}

#[test]
fn probe_gradient_failure() {
    let mut rng = StdRng::seed_from_u64(21);
    let (doc, tree) = toy_doc(&[&[0, 2, 3], &[1]]);
    let p = prep(&doc, &tree, 3);
    for trial in 0..3 {
        let params = ScorerParams::init(tiny_dims(), FeatureToggles::full(), &mut rng);
        let helper_err = fd_max_rel_err(&params, &p, None);
        eprintln!("trial {trial}: helper says {helper_err}");
        let (_, analytic) = doc_grad(&params, &p, None).unwrap();
        let h = 1e-4;
        let n_blocks = params.blocks().len();
        for b in 0..n_blocks {
            let len = params.blocks()[b].1.len();
            for k in 0..len {
                let mut plus = params.clone();
                plus.blocks_mut()[b].1[k] += h;
                let lp = doc_loss(&plus, &p, None).unwrap();
                let mut minus = params.clone();
                minus.blocks_mut()[b].1[k] -= h;
                let lm = doc_loss(&minus, &p, None).unwrap();
                let fd = (lp - lm) / (2.0 * h);
                let a = analytic.blocks()[b].1[k];
                let rel = (a - fd).abs() / a.abs().max(fd.abs()).max(1e-6);
                if rel > 1e-3 {
                    eprintln!(
                        "trial {trial} block {} idx {k}: analytic {a:.9e} fd {fd:.9e} rel {rel:.3}",
                        params.blocks()[b].0
                    );
                }
            }
        }
    }
}

#[test]
fn gradient_matches_finite_differences_with_dropout() {
    // The mask stream is seeded, so both FD evaluations see the same masks.
    let mut rng = StdRng::seed_from_u64(33);
    let (doc, tree) = toy_doc(&[&[0, 1, 2, 3]]);
    let p = prep(&doc, &tree, 3);
    let params = ScorerParams::init(tiny_dims(), FeatureToggles::full(), &mut rng);
    let spec = DropoutSpec { rate: 0.5, seed: 99 };
    let err = fd_max_rel_err(&params, &p, Some(&spec));
    assert!(err < 1e-3, "max rel err {err}");
}

#[test]
fn zero_loss_document_has_zero_gradient() {
    let (mut doc, tree) = toy_doc(&[&[0]]);
    doc.mentions.truncate(1);
    let mut rng = StdRng::seed_from_u64(2);
    let params = ScorerParams::init(tiny_dims(), FeatureToggles::full(), &mut rng);
    let p = prep(&doc, &tree, 3);
    let (loss, grad) = doc_grad(&params, &p, None).unwrap();
    assert_eq!(loss, 0.0);
    for (name, block) in grad.blocks() {
        assert!(block.iter().all(|&v| v == 0.0), "nonzero grad in {name}");
    }
}

#[test]
fn untouched_embedding_rows_get_zero_gradient() {
    let (doc, tree) = toy_doc(&[&[0, 1, 2, 3]]);
    let mut rng = StdRng::seed_from_u64(4);
    let params = ScorerParams::init(tiny_dims(), FeatureToggles::full(), &mut rng);
    let p = prep(&doc, &tree, 3);
    let (_, grad) = doc_grad(&params, &p, None).unwrap();
    // d_lca values in this toy document are 0..=2, so rows 10+ of the
    // 31-row d_lca table are never touched.
    for row in 10..grad.emb_dlca.rows {
        assert!(grad.emb_dlca.row(row).iter().all(|&v| v == 0.0));
    }
    // d_m is at most 3.
    for row in 4..grad.emb_dm.rows {
        assert!(grad.emb_dm.row(row).iter().all(|&v| v == 0.0));
    }
}

// --- training -------------------------------------------------------------------

fn toy_corpus(n: usize) -> Vec<(Document, RstTree)> {
    (0..n)
        .map(|k| {
            let chains: Vec<Vec<usize>> =
                if k % 2 == 0 { vec![vec![0, 2], vec![1, 3]] } else { vec![vec![0, 1, 3], vec![2]] };
            let chain_refs: Vec<&[usize]> = chains.iter().map(|c| c.as_slice()).collect();
            let (mut doc, tree) = toy_doc(&chain_refs);
            doc.doc_id = format!("toy{k}#0");
            let tree = RstTree { doc_id: doc.doc_id.clone(), ..tree };
            (doc, tree)
        })
        .collect()
}

#[test]
fn zero_learning_rate_leaves_params_at_init() {
    let corpus = toy_corpus(4);
    let pairs: Vec<(&Document, &RstTree)> = corpus.iter().map(|(d, t)| (d, t)).collect();
    let provider = EmbeddingProvider::hashed(3, 1);
    let config = TrainConfig {
        learning_rate: 0.0,
        max_epochs: 3,
        dropout: 0.2,
        seed: 5,
        patience: 10,
        dims: tiny_dims(),
        ..TrainConfig::default()
    };
    let (params, history) = train(&pairs[..3], &pairs[3..], &provider, &config).unwrap();
    let mut rng = ChaChaSeeded::seed(5);
    let init = ScorerParams::init(
        ScorerDims { embed_dim: 3, ..tiny_dims() },
        config.toggles,
        &mut rng.0,
    );
    assert_eq!(params, init);
    assert_eq!(history.epochs.len(), 3);
    for e in &history.epochs {
        assert_eq!(e.dev_avg_f1, history.initial_dev_f1);
    }
}

struct ChaChaSeeded(rand_chacha::ChaCha8Rng);
impl ChaChaSeeded {
    fn seed(s: u64) -> Self {
        use rand_chacha::rand_core::SeedableRng;
        ChaChaSeeded(rand_chacha::ChaCha8Rng::seed_from_u64(s))
    }
}

#[test]
fn same_seed_gives_identical_history() {
    let corpus = toy_corpus(5);
    let pairs: Vec<(&Document, &RstTree)> = corpus.iter().map(|(d, t)| (d, t)).collect();
    let provider = EmbeddingProvider::hashed(3, 1);
    let config = TrainConfig {
        learning_rate: 0.1,
        max_epochs: 4,
        seed: 77,
        dims: tiny_dims(),
        ..TrainConfig::default()
    };
    let (p1, h1) = train(&pairs[..4], &pairs[4..], &provider, &config).unwrap();
    let (p2, h2) = train(&pairs[..4], &pairs[4..], &provider, &config).unwrap();
    assert_eq!(h1, h2);
    assert_eq!(p1, p2);
    let other = TrainConfig { seed: 78, ..config };
    let (_, h3) = train(&pairs[..4], &pairs[4..], &provider, &other).unwrap();
    assert_ne!(h1, h3);
}

#[test]
fn empty_split_is_error() {
    let corpus = toy_corpus(2);
    let pairs: Vec<(&Document, &RstTree)> = corpus.iter().map(|(d, t)| (d, t)).collect();
    let provider = EmbeddingProvider::hashed(3, 1);
    let config = TrainConfig { dims: tiny_dims(), ..TrainConfig::default() };
    assert!(train(&[], &pairs, &provider, &config).is_err());
    assert!(train(&pairs, &[], &provider, &config).is_err());
}

#[test]
fn training_reduces_loss_on_toy_corpus() {
    let corpus = toy_corpus(6);
    let pairs: Vec<(&Document, &RstTree)> = corpus.iter().map(|(d, t)| (d, t)).collect();
    let provider = EmbeddingProvider::hashed(3, 1);
    let config = TrainConfig {
        learning_rate: 0.3,
        max_epochs: 30,
        dropout: 0.0,
        seed: 13,
        patience: 30,
        dims: tiny_dims(),
        ..TrainConfig::default()
    };
    let (_, history) = train(&pairs[..5], &pairs[5..], &provider, &config).unwrap();
    let first = history.epochs.first().unwrap().train_loss;
    let last = history.epochs.last().unwrap().train_loss;
    assert!(last < first, "loss did not drop: {first} -> {last}");
}
