//! Forward and backward passes for one mention pair.
//!
//! The assembled input is
//!
//! ```text
//! x = [ repr_i | repr_j | repr_i (.) repr_j | E(d_m) | E(d_s)?
//!       | E(d_lca)? E(lc_lca)? E(wc_lca)? | E(type_j)? ]
//! ```
//!
//! where each mention representation is `[v_first; v_last; v_mean;
//! width_embedding]` and optional blocks follow the parameter toggles. The
//! stack is FC1 -> rectifier -> (inverted dropout in training) -> FC2 ->
//! rectifier -> scalar projection.

use crate::scorer::params::{ScorerParams, Table};

/// Bucketed feature ids for one pair, plus the width buckets that live
/// inside the mention representations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairBuckets {
    pub dm: usize,
    pub ds: usize,
    pub dlca: usize,
    pub lc: usize,
    pub wc: usize,
    pub type_j: usize,
    pub width_i: usize,
    pub width_j: usize,
}

// --- small dense kernels -------------------------------------------------

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for k in 0..chunks {
        let i = 4 * k;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut s = acc[0] + acc[1] + acc[2] + acc[3];
    for i in 4 * chunks..a.len() {
        s += a[i] * b[i];
    }
    s
}

fn axpy(out: &mut [f64], alpha: f64, x: &[f64]) {
    for (o, v) in out.iter_mut().zip(x) {
        *o += alpha * v;
    }
}

/// out = W x + b
fn affine(w: &Table, b: &[f64], x: &[f64], out: &mut [f64]) {
    for r in 0..w.rows {
        out[r] = dot(w.row(r), x) + b[r];
    }
}

/// out += W^T dz
fn matvec_t_add(w: &Table, dz: &[f64], out: &mut [f64]) {
    for r in 0..w.rows {
        let d = dz[r];
        if d != 0.0 {
            axpy(out, d, w.row(r));
        }
    }
}

/// gw += dz (outer) x
fn outer_add(gw: &mut Table, dz: &[f64], x: &[f64]) {
    for r in 0..gw.rows {
        let d = dz[r];
        if d != 0.0 {
            axpy(gw.row_mut(r), d, x);
        }
    }
}

// --- assembly -------------------------------------------------------------

/// Build the pair input from two materialized mention representations.
pub(crate) fn assemble(
    params: &ScorerParams,
    repr_i: &[f64],
    repr_j: &[f64],
    buckets: &PairBuckets,
) -> Vec<f64> {
    let r = params.dims.repr_dim();
    debug_assert_eq!(repr_i.len(), r);
    debug_assert_eq!(repr_j.len(), r);
    let mut x = Vec::with_capacity(params.dims.input_dim(&params.toggles));
    x.extend_from_slice(repr_i);
    x.extend_from_slice(repr_j);
    for k in 0..r {
        x.push(repr_i[k] * repr_j[k]);
    }
    x.extend_from_slice(params.emb_dm.row(buckets.dm));
    if params.toggles.use_ds {
        x.extend_from_slice(params.emb_ds.row(buckets.ds));
    }
    if params.toggles.use_disc {
        x.extend_from_slice(params.emb_dlca.row(buckets.dlca));
        x.extend_from_slice(params.emb_lc.row(buckets.lc));
        x.extend_from_slice(params.emb_wc.row(buckets.wc));
    }
    if params.toggles.use_type {
        x.extend_from_slice(params.emb_type.row(buckets.type_j));
    }
    debug_assert_eq!(x.len(), params.dims.input_dim(&params.toggles));
    x
}

/// Materialize a mention representation from its fixed token-vector part and
/// width bucket.
pub(crate) fn mention_repr_from_parts(
    params: &ScorerParams,
    fixed: &[f64],
    width_bucket: usize,
) -> Vec<f64> {
    debug_assert_eq!(fixed.len(), 3 * params.dims.embed_dim);
    let mut repr = Vec::with_capacity(params.dims.repr_dim());
    repr.extend_from_slice(fixed);
    repr.extend_from_slice(params.emb_width.row(width_bucket));
    repr
}

// --- forward / backward ----------------------------------------------------

/// Activations kept for the backward pass. `a1` is post-rectifier and
/// post-dropout.
pub(crate) struct Trace {
    pub x: Vec<f64>,
    pub z1: Vec<f64>,
    pub a1: Vec<f64>,
    pub z2: Vec<f64>,
    pub a2: Vec<f64>,
    pub drop_scale: Option<Vec<f64>>,
    pub score: f64,
}

/// Run the stack. `drop_scale`, when given, holds the per-unit inverted
/// dropout multiplier (0 for dropped units, 1/(1-rate) otherwise).
pub(crate) fn forward(params: &ScorerParams, x: Vec<f64>, drop_scale: Option<Vec<f64>>) -> Trace {
    let h1 = params.dims.hidden1;
    let h2 = params.dims.hidden2;
    let mut z1 = vec![0.0; h1];
    affine(&params.fc1_w, &params.fc1_b, &x, &mut z1);
    let mut a1: Vec<f64> = z1.iter().map(|&z| z.max(0.0)).collect();
    if let Some(scale) = &drop_scale {
        for (a, s) in a1.iter_mut().zip(scale) {
            *a *= s;
        }
    }
    let mut z2 = vec![0.0; h2];
    affine(&params.fc2_w, &params.fc2_b, &a1, &mut z2);
    let a2: Vec<f64> = z2.iter().map(|&z| z.max(0.0)).collect();
    let score = dot(&params.out_w, &a2) + params.out_b;
    Trace { x, z1, a1, z2, a2, drop_scale, score }
}

/// Accumulate `coeff * d(score)/d(params)` into `grad`.
pub(crate) fn backward(
    params: &ScorerParams,
    trace: &Trace,
    coeff: f64,
    buckets: &PairBuckets,
    grad: &mut ScorerParams,
) {
    if coeff == 0.0 {
        return;
    }
    let h1 = params.dims.hidden1;

    grad.out_b += coeff;
    axpy(&mut grad.out_w, coeff, &trace.a2);

    let dz2: Vec<f64> = trace
        .z2
        .iter()
        .zip(&params.out_w)
        .map(|(&z, &w)| if z > 0.0 { coeff * w } else { 0.0 })
        .collect();
    axpy(&mut grad.fc2_b, 1.0, &dz2);
    outer_add(&mut grad.fc2_w, &dz2, &trace.a1);

    let mut da1 = vec![0.0; h1];
    matvec_t_add(&params.fc2_w, &dz2, &mut da1);
    if let Some(scale) = &trace.drop_scale {
        for (d, s) in da1.iter_mut().zip(scale) {
            *d *= s;
        }
    }
    let dz1: Vec<f64> = trace
        .z1
        .iter()
        .zip(&da1)
        .map(|(&z, &d)| if z > 0.0 { d } else { 0.0 })
        .collect();
    axpy(&mut grad.fc1_b, 1.0, &dz1);
    outer_add(&mut grad.fc1_w, &dz1, &trace.x);

    let mut dx = vec![0.0; trace.x.len()];
    matvec_t_add(&params.fc1_w, &dz1, &mut dx);
    route_input_grad(params, trace, &dx, buckets, grad);
}

/// Send the input gradient into the embedding tables it came from. The
/// token-vector parts of the representations are fixed, so only the width
/// slices and the trailing feature slots carry parameter gradient. The
/// elementwise-product block contributes through both representations.
fn route_input_grad(
    params: &ScorerParams,
    trace: &Trace,
    dx: &[f64],
    buckets: &PairBuckets,
    grad: &mut ScorerParams,
) {
    let r = params.dims.repr_dim();
    let e = params.dims.feat_embed;
    let fixed = 3 * params.dims.embed_dim;
    let (repr_i, repr_j) = (&trace.x[0..r], &trace.x[r..2 * r]);
    let dprod = &dx[2 * r..3 * r];

    {
        let gw = grad.emb_width.row_mut(buckets.width_i);
        for k in 0..e {
            gw[k] += dx[fixed + k] + dprod[fixed + k] * repr_j[fixed + k];
        }
    }
    {
        let gw = grad.emb_width.row_mut(buckets.width_j);
        for k in 0..e {
            gw[k] += dx[r + fixed + k] + dprod[fixed + k] * repr_i[fixed + k];
        }
    }

    let mut off = 3 * r;
    axpy(grad.emb_dm.row_mut(buckets.dm), 1.0, &dx[off..off + e]);
    off += e;
    if params.toggles.use_ds {
        axpy(grad.emb_ds.row_mut(buckets.ds), 1.0, &dx[off..off + e]);
        off += e;
    }
    if params.toggles.use_disc {
        axpy(grad.emb_dlca.row_mut(buckets.dlca), 1.0, &dx[off..off + e]);
        off += e;
        axpy(grad.emb_lc.row_mut(buckets.lc), 1.0, &dx[off..off + e]);
        off += e;
        axpy(grad.emb_wc.row_mut(buckets.wc), 1.0, &dx[off..off + e]);
        off += e;
    }
    if params.toggles.use_type {
        axpy(grad.emb_type.row_mut(buckets.type_j), 1.0, &dx[off..off + e]);
        off += e;
    }
    debug_assert_eq!(off, dx.len());
}
