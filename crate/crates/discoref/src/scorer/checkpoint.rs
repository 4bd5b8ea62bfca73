//! Textual parameter checkpoints: a versioned header with all shapes, then
//! one row-major value line per block. `f64` values round-trip exactly
//! through their shortest decimal form.

use crate::error::{Error, Result};
use crate::scorer::params::{FeatureToggles, ScorerDims, ScorerParams};

const MAGIC: &str = "discoref-params v1";

pub fn save_text(params: &ScorerParams) -> String {
    let mut out = String::new();
    out.push_str(MAGIC);
    out.push('\n');
    out.push_str(&format!(
        "embed_dim {}\nfeat_embed {}\nhidden1 {}\nhidden2 {}\n",
        params.dims.embed_dim, params.dims.feat_embed, params.dims.hidden1, params.dims.hidden2
    ));
    out.push_str(&format!(
        "use_disc {}\nuse_type {}\nuse_ds {}\n",
        u8::from(params.toggles.use_disc),
        u8::from(params.toggles.use_type),
        u8::from(params.toggles.use_ds)
    ));
    for (name, block) in params.blocks() {
        out.push_str(&format!("block {name} {}\n", block.len()));
        let mut first = true;
        for v in block {
            if !first {
                out.push(' ');
            }
            out.push_str(&format!("{v}"));
            first = false;
        }
        out.push('\n');
    }
    out
}

pub fn load_text(text: &str) -> Result<ScorerParams> {
    let mut lines = text.lines();
    let bad = |msg: &str| Error::Model(format!("checkpoint: {msg}"));
    if lines.next().map(str::trim) != Some(MAGIC) {
        return Err(bad("missing or unsupported header"));
    }

    let mut read_kv = |key: &str| -> Result<usize> {
        let line = lines.next().ok_or_else(|| bad("truncated header"))?;
        let (k, v) = line.split_once(' ').ok_or_else(|| bad("malformed header line"))?;
        if k != key {
            return Err(bad(&format!("expected key {key}, got {k}")));
        }
        v.trim().parse().map_err(|_| bad(&format!("bad value for {key}")))
    };
    let dims = ScorerDims {
        embed_dim: read_kv("embed_dim")?,
        feat_embed: read_kv("feat_embed")?,
        hidden1: read_kv("hidden1")?,
        hidden2: read_kv("hidden2")?,
    };
    let toggles = FeatureToggles {
        use_disc: read_kv("use_disc")? != 0,
        use_type: read_kv("use_type")? != 0,
        use_ds: read_kv("use_ds")? != 0,
    };

    let mut params = ScorerParams::zeros(dims, toggles);
    for (name, block) in params.blocks_mut() {
        let header = lines.next().ok_or_else(|| bad("missing block header"))?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some("block") || parts.next() != Some(name) {
            return Err(bad(&format!("expected block {name}, got: {header}")));
        }
        let len: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("bad block length"))?;
        if len != block.len() {
            return Err(bad(&format!(
                "block {name} has {len} values but shape needs {}",
                block.len()
            )));
        }
        let values = lines.next().ok_or_else(|| bad("missing block values"))?;
        let mut count = 0usize;
        for (slot, tok) in block.iter_mut().zip(values.split_whitespace()) {
            *slot = tok
                .parse()
                .map_err(|_| bad(&format!("bad float in block {name}: {tok}")))?;
            count += 1;
        }
        if count != len {
            return Err(bad(&format!("block {name}: expected {len} values, got {count}")));
        }
    }
    if !params.all_finite() {
        return Err(bad("non-finite parameter value"));
    }
    Ok(params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn round_trip_is_bit_exact() {
        let dims = ScorerDims { embed_dim: 5, feat_embed: 4, hidden1: 6, hidden2: 3 };
        let params = ScorerParams::init(
            dims,
            FeatureToggles { use_disc: true, use_type: false, use_ds: true },
            &mut StdRng::seed_from_u64(9),
        );
        let text = save_text(&params);
        let loaded = load_text(&text).unwrap();
        assert_eq!(params, loaded);
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let dims = ScorerDims { embed_dim: 2, feat_embed: 2, hidden1: 2, hidden2: 2 };
        let params = ScorerParams::zeros(dims, FeatureToggles::full());
        let text = save_text(&params).replace("hidden1 2", "hidden1 3");
        assert!(load_text(&text).is_err());
    }

    #[test]
    fn bad_magic_is_rejected() {
        assert!(load_text("something else\n").is_err());
    }
}
