//! Scorer parameters: bucketed feature embeddings and the fully-connected
//! stack.

use rand::Rng;

use crate::features::{BucketScheme, MentionType};

/// Which optional feature groups enter the pair vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureToggles {
    /// The discourse block: `d_lca`, `lc_lca`, `wc_lca`.
    pub use_disc: bool,
    /// The anaphor's mention type.
    pub use_type: bool,
    /// Sentence distance `d_s`.
    pub use_ds: bool,
}

impl FeatureToggles {
    pub fn baseline() -> Self {
        FeatureToggles { use_disc: false, use_type: false, use_ds: true }
    }

    pub fn full() -> Self {
        FeatureToggles { use_disc: true, use_type: true, use_ds: true }
    }
}

impl Default for FeatureToggles {
    fn default() -> Self {
        FeatureToggles::full()
    }
}

/// Layer and embedding widths. `embed_dim` is the token-vector width from
/// the provider; the rest default to the reference sizes (feature embeddings
/// of 20, two 150-unit layers).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScorerDims {
    pub embed_dim: usize,
    pub feat_embed: usize,
    pub hidden1: usize,
    pub hidden2: usize,
}

impl ScorerDims {
    pub fn with_embed_dim(embed_dim: usize) -> Self {
        ScorerDims { embed_dim, feat_embed: 20, hidden1: 150, hidden2: 150 }
    }

    /// Width of one mention representation: `[v_first; v_last; v_mean;
    /// width_embedding]`.
    pub fn repr_dim(&self) -> usize {
        3 * self.embed_dim + self.feat_embed
    }

    /// Width of the assembled pair vector under `toggles`.
    pub fn input_dim(&self, toggles: &FeatureToggles) -> usize {
        let mut feature_slots = 1; // d_m is always present
        if toggles.use_ds {
            feature_slots += 1;
        }
        if toggles.use_disc {
            feature_slots += 3;
        }
        if toggles.use_type {
            feature_slots += 1;
        }
        3 * self.repr_dim() + feature_slots * self.feat_embed
    }
}

impl Default for ScorerDims {
    fn default() -> Self {
        ScorerDims::with_embed_dim(32)
    }
}

/// The bucketing schemes the scorer's embedding tables are sized for.
#[derive(Debug, Clone)]
pub struct Schemes {
    pub dm: BucketScheme,
    pub ds: BucketScheme,
    pub dlca: BucketScheme,
    pub lc: BucketScheme,
    pub wc: BucketScheme,
    pub width: BucketScheme,
}

impl Schemes {
    pub fn standard() -> Self {
        Schemes {
            dm: BucketScheme::distance(),
            ds: BucketScheme::distance(),
            dlca: BucketScheme::lca_distance(),
            lc: BucketScheme::coverage(),
            wc: BucketScheme::coverage(),
            width: BucketScheme::width(),
        }
    }
}

/// A dense row-major matrix; also used for embedding tables (one row per
/// bucket).
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Table {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Table { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }
}

/// All trainable parameters of the pair scorer.
///
/// Every embedding table exists regardless of the toggles so checkpoints
/// keep a stable shape per configuration; toggled-off tables simply never
/// enter the assembled input (and therefore never receive gradient).
#[derive(Debug, Clone, PartialEq)]
pub struct ScorerParams {
    pub dims: ScorerDims,
    pub toggles: FeatureToggles,
    pub emb_dm: Table,
    pub emb_ds: Table,
    pub emb_dlca: Table,
    pub emb_lc: Table,
    pub emb_wc: Table,
    pub emb_width: Table,
    pub emb_type: Table,
    pub fc1_w: Table,
    pub fc1_b: Vec<f64>,
    pub fc2_w: Table,
    pub fc2_b: Vec<f64>,
    pub out_w: Vec<f64>,
    pub out_b: f64,
}

impl ScorerParams {
    /// All parameters zero.
    pub fn zeros(dims: ScorerDims, toggles: FeatureToggles) -> Self {
        let schemes = Schemes::standard();
        let e = dims.feat_embed;
        let input = dims.input_dim(&toggles);
        ScorerParams {
            dims,
            toggles,
            emb_dm: Table::zeros(schemes.dm.num_buckets(), e),
            emb_ds: Table::zeros(schemes.ds.num_buckets(), e),
            emb_dlca: Table::zeros(schemes.dlca.num_buckets(), e),
            emb_lc: Table::zeros(schemes.lc.num_buckets(), e),
            emb_wc: Table::zeros(schemes.wc.num_buckets(), e),
            emb_width: Table::zeros(schemes.width.num_buckets(), e),
            emb_type: Table::zeros(MentionType::COUNT, e),
            fc1_w: Table::zeros(dims.hidden1, input),
            fc1_b: vec![0.0; dims.hidden1],
            fc2_w: Table::zeros(dims.hidden2, dims.hidden1),
            fc2_b: vec![0.0; dims.hidden2],
            out_w: vec![0.0; dims.hidden2],
            out_b: 0.0,
        }
    }

    /// Uniform init in [-0.1, 0.1] from the given RNG.
    pub fn init<R: Rng>(dims: ScorerDims, toggles: FeatureToggles, rng: &mut R) -> Self {
        let mut p = ScorerParams::zeros(dims, toggles);
        for (_, block) in p.blocks_mut() {
            for v in block {
                *v = rng.gen_range(-0.1..=0.1);
            }
        }
        p
    }

    pub fn zeros_like(&self) -> Self {
        ScorerParams::zeros(self.dims, self.toggles)
    }

    /// Named parameter blocks, in a fixed order.
    pub fn blocks(&self) -> Vec<(&'static str, &[f64])> {
        vec![
            ("emb_dm", &self.emb_dm.data),
            ("emb_ds", &self.emb_ds.data),
            ("emb_dlca", &self.emb_dlca.data),
            ("emb_lc", &self.emb_lc.data),
            ("emb_wc", &self.emb_wc.data),
            ("emb_width", &self.emb_width.data),
            ("emb_type", &self.emb_type.data),
            ("fc1_w", &self.fc1_w.data),
            ("fc1_b", &self.fc1_b),
            ("fc2_w", &self.fc2_w.data),
            ("fc2_b", &self.fc2_b),
            ("out_w", &self.out_w),
            ("out_b", std::slice::from_ref(&self.out_b)),
        ]
    }

    pub fn blocks_mut(&mut self) -> Vec<(&'static str, &mut [f64])> {
        vec![
            ("emb_dm", &mut self.emb_dm.data[..]),
            ("emb_ds", &mut self.emb_ds.data[..]),
            ("emb_dlca", &mut self.emb_dlca.data[..]),
            ("emb_lc", &mut self.emb_lc.data[..]),
            ("emb_wc", &mut self.emb_wc.data[..]),
            ("emb_width", &mut self.emb_width.data[..]),
            ("emb_type", &mut self.emb_type.data[..]),
            ("fc1_w", &mut self.fc1_w.data[..]),
            ("fc1_b", &mut self.fc1_b[..]),
            ("fc2_w", &mut self.fc2_w.data[..]),
            ("fc2_b", &mut self.fc2_b[..]),
            ("out_w", &mut self.out_w[..]),
            ("out_b", std::slice::from_mut(&mut self.out_b)),
        ]
    }

    /// `self += alpha * other`, blockwise.
    pub fn axpy(&mut self, alpha: f64, other: &ScorerParams) {
        let other_blocks: Vec<&[f64]> = other.blocks().into_iter().map(|(_, b)| b).collect();
        for ((_, mine), theirs) in self.blocks_mut().into_iter().zip(other_blocks) {
            for (m, t) in mine.iter_mut().zip(theirs) {
                *m += alpha * t;
            }
        }
    }

    pub fn num_params(&self) -> usize {
        self.blocks().iter().map(|(_, b)| b.len()).sum()
    }

    pub fn all_finite(&self) -> bool {
        self.blocks().iter().all(|(_, b)| b.iter().all(|v| v.is_finite()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn input_dim_tracks_toggles() {
        let dims = ScorerDims::with_embed_dim(32);
        let full = dims.input_dim(&FeatureToggles::full());
        let baseline = dims.input_dim(&FeatureToggles::baseline());
        // Full has four extra 20-wide slots: d_lca, lc, wc, type.
        assert_eq!(full - baseline, 4 * 20);
        let repr = dims.repr_dim();
        assert_eq!(baseline, 3 * repr + 2 * 20);
    }

    #[test]
    fn init_is_seeded_and_bounded() {
        let dims = ScorerDims::with_embed_dim(8);
        let a = ScorerParams::init(dims, FeatureToggles::full(), &mut StdRng::seed_from_u64(1));
        let b = ScorerParams::init(dims, FeatureToggles::full(), &mut StdRng::seed_from_u64(1));
        assert_eq!(a, b);
        for (_, block) in a.blocks() {
            assert!(block.iter().all(|v| v.abs() <= 0.1));
        }
        let c = ScorerParams::init(dims, FeatureToggles::full(), &mut StdRng::seed_from_u64(2));
        assert_ne!(a, c);
    }

    #[test]
    fn axpy_updates_all_blocks() {
        let dims = ScorerDims { embed_dim: 4, feat_embed: 3, hidden1: 5, hidden2: 4 };
        let mut a = ScorerParams::zeros(dims, FeatureToggles::full());
        let b = ScorerParams::init(dims, FeatureToggles::full(), &mut StdRng::seed_from_u64(3));
        a.axpy(2.0, &b);
        for ((_, x), (_, y)) in a.blocks().into_iter().zip(b.blocks()) {
            for (xi, yi) in x.iter().zip(y) {
                assert!((xi - 2.0 * yi).abs() < 1e-15);
            }
        }
    }
}
