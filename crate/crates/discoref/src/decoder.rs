//! Best-antecedent decoding: pairwise scores to entity clusters.

use crate::corpus::MentionId;
use crate::error::{Error, Result};

/// A partition of a document's mentions into entity clusters.
///
/// Clusters are disjoint; singleton clusters are permitted. Member lists are
/// sorted and clusters are ordered by their first member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clustering {
    pub clusters: Vec<Vec<MentionId>>,
}

impl Clustering {
    pub fn new(mut clusters: Vec<Vec<MentionId>>) -> Self {
        for c in &mut clusters {
            c.sort_unstable();
        }
        clusters.sort_by_key(|c| c.first().copied());
        Clustering { clusters }
    }

    /// Drop singleton clusters (OntoNotes-style emission).
    pub fn without_singletons(&self) -> Clustering {
        Clustering {
            clusters: self.clusters.iter().filter(|c| c.len() > 1).cloned().collect(),
        }
    }

    /// All mention ids covered by some cluster, sorted.
    pub fn covered(&self) -> Vec<MentionId> {
        let mut ids: Vec<MentionId> = self.clusters.iter().flatten().copied().collect();
        ids.sort_unstable();
        ids
    }
}

/// An antecedent decision per anaphor: `links[j] = Some(i)` links mention `j`
/// back to mention `i < j`; `None` means the dummy antecedent won.
pub type Links = Vec<Option<MentionId>>;

/// Pick each anaphor's best-scoring candidate, linking only when its score
/// beats the dummy's fixed score of 0. Ties and non-positive maxima go to the
/// dummy. Among equal-scoring candidates the earliest wins.
///
/// `scores[j]` holds `(candidate id, score)` pairs for anaphor `j`; every
/// candidate must precede `j` in mention order.
pub fn select_antecedents(scores: &[Vec<(MentionId, f64)>]) -> Links {
    scores
        .iter()
        .enumerate()
        .map(|(j, cands)| {
            let mut best: Option<(MentionId, f64)> = None;
            for &(c, s) in cands {
                debug_assert!(c < j, "candidate {c} does not precede anaphor {j}");
                match best {
                    Some((_, bs)) if s <= bs => {}
                    _ => best = Some((c, s)),
                }
            }
            match best {
                Some((c, s)) if s > 0.0 => Some(c),
                _ => None,
            }
        })
        .collect()
}

/// Union links into clusters; unlinked mentions become singletons.
pub fn links_to_clusters(links: &Links, n_mentions: usize) -> Result<Clustering> {
    if links.len() > n_mentions {
        return Err(Error::Eval(format!(
            "{} links for {} mentions",
            links.len(),
            n_mentions
        )));
    }
    let mut uf = UnionFind::new(n_mentions);
    for (j, link) in links.iter().enumerate() {
        if let Some(i) = *link {
            if i >= j {
                return Err(Error::Eval(format!(
                    "link {j} -> {i} points forward in mention order"
                )));
            }
            uf.union(i, j);
        }
    }
    let mut groups: Vec<Vec<MentionId>> = vec![Vec::new(); n_mentions];
    for m in 0..n_mentions {
        groups[uf.find(m)].push(m);
    }
    Ok(Clustering::new(groups.into_iter().filter(|g| !g.is_empty()).collect()))
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            let grandparent = self.parent[self.parent[x]];
            self.parent[x] = grandparent;
            x = grandparent;
        }
        x
    }

    fn union(&mut self, x: usize, y: usize) {
        let (mut a, mut b) = (self.find(x), self.find(y));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}
