//! Coreference evaluation: MUC, B³, CEAF (mention- and entity-based), the
//! average F1 over MUC/B³/CEAFe, and a one-tailed t-test for comparing
//! per-seed score samples.
//!
//! Corpus-level scores are micro-aggregated: each metric's numerators and
//! denominators are summed over documents before the final ratio, matching
//! the reference scorer's behavior. Both partitions must cover the same
//! mention universe; use [`complete_with_singletons`] first when a prediction
//! file had its singletons dropped.

use std::collections::{BTreeMap, HashMap};

use crate::corpus::MentionId;
use crate::decoder::Clustering;
use crate::error::{Error, Result};

/// Precision / recall / F1 triple, all in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PRF {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl PRF {
    fn from_fractions(rn: f64, rd: f64, pn: f64, pd: f64) -> PRF {
        let recall = if rd > 0.0 { rn / rd } else { 0.0 };
        let precision = if pd > 0.0 { pn / pd } else { 0.0 };
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        PRF { precision, recall, f1 }
    }
}

/// Summable per-document metric components.
#[derive(Debug, Clone, Copy, Default)]
pub struct MetricCounts {
    muc_rn: f64,
    muc_rd: f64,
    muc_pn: f64,
    muc_pd: f64,
    b3_r_sum: f64,
    b3_p_sum: f64,
    n_mentions: f64,
    ceafe_phi: f64,
    ceafe_gold: f64,
    ceafe_pred: f64,
    ceafm_phi: f64,
}

impl MetricCounts {
    /// Components for one document's gold/pred partition pair.
    pub fn compute(gold: &Clustering, pred: &Clustering) -> Result<MetricCounts> {
        let gold_of = membership(gold, "gold")?;
        let pred_of = membership(pred, "pred")?;
        check_universe(&gold_of, &pred_of)?;
        let n = gold_of.len() as f64;

        // Cluster-pair intersection sizes, indexed (gold cluster, pred cluster).
        let mut inter: HashMap<(usize, usize), usize> = HashMap::new();
        for (m, &g) in &gold_of {
            inter
                .entry((g, pred_of[m]))
                .and_modify(|c| *c += 1)
                .or_insert(1);
        }

        let muc_half = |from: &[Vec<MentionId>], to_of: &BTreeMap<MentionId, usize>| {
            let mut num = 0.0;
            let mut den = 0.0;
            for cluster in from {
                let mut parts = std::collections::HashSet::new();
                for m in cluster {
                    parts.insert(to_of[m]);
                }
                num += (cluster.len() - parts.len()) as f64;
                den += (cluster.len() - 1) as f64;
            }
            (num, den)
        };
        let (muc_rn, muc_rd) = muc_half(&gold.clusters, &pred_of);
        let (muc_pn, muc_pd) = muc_half(&pred.clusters, &gold_of);

        let mut b3_r_sum = 0.0;
        let mut b3_p_sum = 0.0;
        for (m, &g) in &gold_of {
            let p = pred_of[m];
            let overlap = inter[&(g, p)] as f64;
            b3_r_sum += overlap / gold.clusters[g].len() as f64;
            b3_p_sum += overlap / pred.clusters[p].len() as f64;
        }

        let phi4 = |g: usize, p: usize, count: usize| {
            2.0 * count as f64 / (gold.clusters[g].len() + pred.clusters[p].len()) as f64
        };
        let ceafe_phi = best_alignment(gold.clusters.len(), pred.clusters.len(), |g, p| {
            inter.get(&(g, p)).map_or(0.0, |&c| phi4(g, p, c))
        });
        let ceafm_phi = best_alignment(gold.clusters.len(), pred.clusters.len(), |g, p| {
            inter.get(&(g, p)).map_or(0.0, |&c| c as f64)
        });

        Ok(MetricCounts {
            muc_rn,
            muc_rd,
            muc_pn,
            muc_pd,
            b3_r_sum,
            b3_p_sum,
            n_mentions: n,
            ceafe_phi,
            ceafe_gold: gold.clusters.len() as f64,
            ceafe_pred: pred.clusters.len() as f64,
            ceafm_phi,
        })
    }

    pub fn add(&mut self, other: &MetricCounts) {
        self.muc_rn += other.muc_rn;
        self.muc_rd += other.muc_rd;
        self.muc_pn += other.muc_pn;
        self.muc_pd += other.muc_pd;
        self.b3_r_sum += other.b3_r_sum;
        self.b3_p_sum += other.b3_p_sum;
        self.n_mentions += other.n_mentions;
        self.ceafe_phi += other.ceafe_phi;
        self.ceafe_gold += other.ceafe_gold;
        self.ceafe_pred += other.ceafe_pred;
        self.ceafm_phi += other.ceafm_phi;
    }

    pub fn muc(&self) -> PRF {
        PRF::from_fractions(self.muc_rn, self.muc_rd, self.muc_pn, self.muc_pd)
    }

    pub fn b_cubed(&self) -> PRF {
        PRF::from_fractions(self.b3_r_sum, self.n_mentions, self.b3_p_sum, self.n_mentions)
    }

    pub fn ceaf_e(&self) -> PRF {
        PRF::from_fractions(self.ceafe_phi, self.ceafe_gold, self.ceafe_phi, self.ceafe_pred)
    }

    pub fn ceaf_m(&self) -> PRF {
        PRF::from_fractions(self.ceafm_phi, self.n_mentions, self.ceafm_phi, self.n_mentions)
    }

    pub fn report(&self) -> EvalReport {
        let muc = self.muc();
        let b_cubed = self.b_cubed();
        let ceaf_e = self.ceaf_e();
        let ceaf_m = self.ceaf_m();
        let avg_f1 = avg_f1(&muc, &b_cubed, &ceaf_e);
        EvalReport { muc, b_cubed, ceaf_e, ceaf_m, avg_f1 }
    }
}

// Sorted maps keep the floating-point reductions below in a fixed order, so
// equal inputs give bit-equal scores run to run.
fn membership(c: &Clustering, side: &str) -> Result<BTreeMap<MentionId, usize>> {
    let mut of = BTreeMap::new();
    for (idx, cluster) in c.clusters.iter().enumerate() {
        if cluster.is_empty() {
            return Err(Error::Eval(format!("empty cluster in {side} partition")));
        }
        for &m in cluster {
            if of.insert(m, idx).is_some() {
                return Err(Error::Eval(format!(
                    "mention {m} appears twice in {side} partition"
                )));
            }
        }
    }
    Ok(of)
}

fn check_universe(
    gold: &BTreeMap<MentionId, usize>,
    pred: &BTreeMap<MentionId, usize>,
) -> Result<()> {
    if gold.len() != pred.len() || gold.keys().any(|m| !pred.contains_key(m)) {
        return Err(Error::Eval(
            "gold and predicted partitions cover different mention universes".into(),
        ));
    }
    Ok(())
}

/// Per-metric scores plus their average. CEAFm is reported but excluded from
/// `avg_f1`, which follows the CoNLL convention of averaging MUC, B³, CEAFe.
#[derive(Debug, Clone, Copy)]
pub struct EvalReport {
    pub muc: PRF,
    pub b_cubed: PRF,
    pub ceaf_e: PRF,
    pub ceaf_m: PRF,
    pub avg_f1: f64,
}

pub fn avg_f1(muc: &PRF, b_cubed: &PRF, ceaf_e: &PRF) -> f64 {
    (muc.f1 + b_cubed.f1 + ceaf_e.f1) / 3.0
}

pub fn muc(gold: &Clustering, pred: &Clustering) -> Result<PRF> {
    Ok(MetricCounts::compute(gold, pred)?.muc())
}

pub fn b_cubed(gold: &Clustering, pred: &Clustering) -> Result<PRF> {
    Ok(MetricCounts::compute(gold, pred)?.b_cubed())
}

pub fn ceaf_e(gold: &Clustering, pred: &Clustering) -> Result<PRF> {
    Ok(MetricCounts::compute(gold, pred)?.ceaf_e())
}

pub fn ceaf_m(gold: &Clustering, pred: &Clustering) -> Result<PRF> {
    Ok(MetricCounts::compute(gold, pred)?.ceaf_m())
}

/// Score one document pair.
pub fn evaluate(gold: &Clustering, pred: &Clustering) -> Result<EvalReport> {
    Ok(MetricCounts::compute(gold, pred)?.report())
}

/// Micro-aggregate over documents.
pub fn evaluate_corpus<'a, I>(pairs: I) -> Result<EvalReport>
where
    I: IntoIterator<Item = (&'a Clustering, &'a Clustering)>,
{
    let mut total = MetricCounts::default();
    for (gold, pred) in pairs {
        total.add(&MetricCounts::compute(gold, pred)?);
    }
    Ok(total.report())
}

/// Extend a partition with singleton clusters so it covers `universe`.
pub fn complete_with_singletons(c: &Clustering, universe: &[MentionId]) -> Clustering {
    let covered: std::collections::HashSet<MentionId> = c.covered().into_iter().collect();
    let mut clusters = c.clusters.clone();
    for &m in universe {
        if !covered.contains(&m) {
            clusters.push(vec![m]);
        }
    }
    Clustering::new(clusters)
}

// ---------------------------------------------------------------------------
// Optimal one-to-one cluster alignment (Hungarian algorithm)
// ---------------------------------------------------------------------------

/// Maximum total similarity over one-to-one alignments of gold and pred
/// clusters. `sim(g, p)` is the similarity of gold cluster `g` and pred
/// cluster `p`.
fn best_alignment<F: Fn(usize, usize) -> f64>(n_gold: usize, n_pred: usize, sim: F) -> f64 {
    if n_gold == 0 || n_pred == 0 {
        return 0.0;
    }
    // Minimize negated similarity with rows on the smaller side.
    let (rows, cols, flip) =
        if n_gold <= n_pred { (n_gold, n_pred, false) } else { (n_pred, n_gold, true) };
    let cost: Vec<Vec<f64>> = (0..rows)
        .map(|r| {
            (0..cols)
                .map(|c| if flip { -sim(c, r) } else { -sim(r, c) })
                .collect()
        })
        .collect();
    let assignment = hungarian_min(&cost);
    assignment
        .iter()
        .enumerate()
        .map(|(r, &c)| -cost[r][c])
        .sum()
}

/// Minimum-cost assignment of every row to a distinct column (`rows <=
/// cols`), via the potentials formulation. Returns the column chosen for
/// each row.
fn hungarian_min(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    let m = cost[0].len();
    assert!(n <= m, "hungarian_min needs rows <= cols");

    // 1-indexed potentials; row index n is the virtual "no row" marker.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; m + 1];
    let mut matched_row = vec![n; m + 1];
    let mut way = vec![0usize; m + 1];

    for i in 0..n {
        matched_row[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=m {
                if !used[j] {
                    let cur = cost[i0][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == n {
                break;
            }
        }
        // Augment along the found path.
        while j0 != 0 {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
        }
    }

    let mut assign = vec![0usize; n];
    for j in 1..=m {
        if matched_row[j] < n {
            assign[matched_row[j]] = j - 1;
        }
    }
    assign
}

// ---------------------------------------------------------------------------
// Significance testing
// ---------------------------------------------------------------------------

/// Welch's unequal-variance t-test, one-tailed for H1: mean(a) > mean(b).
/// Returns `(t, p)`.
pub fn t_test_one_tailed(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::Eval("t-test needs at least 2 scores per sample".into()));
    }
    let (ma, va, na) = mean_var(a);
    let (mb, vb, nb) = mean_var(b);
    let se2 = va / na + vb / nb;
    if se2 == 0.0 {
        // Zero variance on both sides: degenerate samples.
        return Ok(if ma == mb {
            (0.0, 0.5)
        } else if ma > mb {
            (f64::INFINITY, 0.0)
        } else {
            (f64::NEG_INFINITY, 1.0)
        });
    }
    let t = (ma - mb) / se2.sqrt();
    let df = se2 * se2
        / ((va / na) * (va / na) / (na - 1.0) + (vb / nb) * (vb / nb) / (nb - 1.0));
    Ok((t, student_t_sf(t, df)))
}

/// Paired one-tailed t-test over per-seed differences, for runs matched by
/// seed. Same H1 as [`t_test_one_tailed`].
pub fn t_test_paired_one_tailed(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    if a.len() != b.len() {
        return Err(Error::Eval("paired t-test needs equal-length samples".into()));
    }
    if a.len() < 2 {
        return Err(Error::Eval("t-test needs at least 2 scores per sample".into()));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let (md, vd, n) = mean_var(&diffs);
    if vd == 0.0 {
        return Ok(if md == 0.0 {
            (0.0, 0.5)
        } else if md > 0.0 {
            (f64::INFINITY, 0.0)
        } else {
            (f64::NEG_INFINITY, 1.0)
        });
    }
    let t = md / (vd / n).sqrt();
    Ok((t, student_t_sf(t, n - 1.0)))
}

fn mean_var(xs: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var, n)
}

/// P(T > t) for Student's t with `df` degrees of freedom, via the
/// regularized incomplete beta function.
pub fn student_t_sf(t: f64, df: f64) -> f64 {
    if !t.is_finite() {
        return if t > 0.0 { 0.0 } else { 1.0 };
    }
    let x = df / (df + t * t);
    let half = 0.5 * incomplete_beta(0.5 * df, 0.5, x);
    if t >= 0.0 { half } else { 1.0 - half }
}

/// ln Γ(x) for x > 0 (Lanczos approximation).
fn ln_gamma(x: f64) -> f64 {
    const COEFFS: [f64; 6] = [
        76.18009172947146,
        -86.50532032941677,
        24.01409824083091,
        -1.231739572450155,
        0.1208650973866179e-2,
        -0.5395239384953e-5,
    ];
    let y = x;
    let tmp = x + 5.5;
    let tmp = tmp - (x + 0.5) * tmp.ln();
    let mut ser = 1.000000000190015;
    let mut y = y;
    for c in COEFFS {
        y += 1.0;
        ser += c / y;
    }
    -tmp + (2.5066282746310005 * ser / x).ln()
}

/// Regularized incomplete beta I_x(a, b) by continued fraction.
pub fn incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let front =
        (ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln()).exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, 1.0 - x) / b
    }
}

/// Continued fraction for the incomplete beta (modified Lentz's method).
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const MAX_ITER: usize = 300;
    const EPS: f64 = 1e-15;
    const TINY: f64 = 1e-300;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn clustering(groups: &[&[usize]]) -> Clustering {
        Clustering::new(groups.iter().map(|g| g.to_vec()).collect())
    }

    #[test]
    fn perfect_match_is_ones() {
        let gold = clustering(&[&[0, 1, 2], &[3, 4]]);
        let r = evaluate(&gold, &gold).unwrap();
        for prf in [r.muc, r.b_cubed, r.ceaf_e, r.ceaf_m] {
            assert!((prf.precision - 1.0).abs() < 1e-12);
            assert!((prf.recall - 1.0).abs() < 1e-12);
            assert!((prf.f1 - 1.0).abs() < 1e-12);
        }
        assert!((r.avg_f1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn worked_example_gold_abc_pred_ab_c() {
        let gold = clustering(&[&[0, 1, 2]]);
        let pred = clustering(&[&[0, 1], &[2]]);

        let m = muc(&gold, &pred).unwrap();
        assert!((m.recall - 0.5).abs() < 1e-12);
        assert!((m.precision - 1.0).abs() < 1e-12);
        assert!((m.f1 - 2.0 / 3.0).abs() < 1e-12);

        let b = b_cubed(&gold, &pred).unwrap();
        assert!((b.precision - 1.0).abs() < 1e-12);
        assert!((b.recall - 5.0 / 9.0).abs() < 1e-12);
        assert!((b.f1 - 5.0 / 7.0).abs() < 1e-12);

        let c = ceaf_e(&gold, &pred).unwrap();
        assert!((c.recall - 0.8).abs() < 1e-12);
        assert!((c.precision - 0.4).abs() < 1e-12);
        assert!((c.f1 - 8.0 / 15.0).abs() < 1e-12);

        // Mean of the three F1 values above.
        let avg = avg_f1(&m, &b, &c);
        assert!((avg - (2.0 / 3.0 + 5.0 / 7.0 + 8.0 / 15.0) / 3.0).abs() < 1e-12);
        assert!((avg - 0.638095238095238).abs() < 1e-12);
    }

    #[test]
    fn all_singletons_muc_is_zero() {
        let gold = clustering(&[&[0], &[1], &[2]]);
        let m = muc(&gold, &gold).unwrap();
        assert_eq!((m.precision, m.recall, m.f1), (0.0, 0.0, 0.0));
        // The mention-based metrics still give full credit.
        assert!((b_cubed(&gold, &gold).unwrap().f1 - 1.0).abs() < 1e-12);
        assert!((ceaf_e(&gold, &gold).unwrap().f1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn b3_giant_cluster_against_singletons() {
        let n = 7usize;
        let gold = Clustering::new((0..n).map(|m| vec![m]).collect());
        let pred = Clustering::new(vec![(0..n).collect()]);
        let b = b_cubed(&gold, &pred).unwrap();
        assert!((b.recall - 1.0).abs() < 1e-12);
        assert!((b.precision - 1.0 / n as f64).abs() < 1e-12);
    }

    #[test]
    fn differing_universes_are_error() {
        let gold = clustering(&[&[0, 1]]);
        let pred = clustering(&[&[0, 2]]);
        assert!(muc(&gold, &pred).is_err());
    }

    #[test]
    fn singleton_completion_restores_universe() {
        let gold = clustering(&[&[0, 1], &[2], &[3]]);
        let pred = clustering(&[&[0, 1]]);
        let completed = complete_with_singletons(&pred, &[0, 1, 2, 3]);
        assert_eq!(completed.covered(), vec![0, 1, 2, 3]);
        let r = evaluate(&gold, &completed).unwrap();
        assert!((r.avg_f1 - 1.0).abs() < 1e-12);
    }

    // Brute-force alignment oracle: try every injection of the smaller
    // cluster list into the larger.
    fn best_alignment_bruteforce(sim: &[Vec<f64>]) -> f64 {
        let rows = sim.len();
        let cols = if rows == 0 { 0 } else { sim[0].len() };
        if rows == 0 || cols == 0 {
            return 0.0;
        }
        if rows > cols {
            let t: Vec<Vec<f64>> =
                (0..cols).map(|c| (0..rows).map(|r| sim[r][c]).collect()).collect();
            return best_alignment_bruteforce(&t);
        }
        fn rec(sim: &[Vec<f64>], row: usize, used: &mut [bool]) -> f64 {
            if row == sim.len() {
                return 0.0;
            }
            let mut best = f64::NEG_INFINITY;
            for c in 0..used.len() {
                if !used[c] {
                    used[c] = true;
                    let v = sim[row][c] + rec(sim, row + 1, used);
                    used[c] = false;
                    best = best.max(v);
                }
            }
            best
        }
        rec(sim, 0, &mut vec![false; cols])
    }

    fn random_partition(n: usize, rng: &mut StdRng) -> Clustering {
        let k = rng.gen_range(1..=n);
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); k];
        for m in 0..n {
            groups[rng.gen_range(0..k)].push(m);
        }
        Clustering::new(groups.into_iter().filter(|g| !g.is_empty()).collect())
    }

    #[test]
    fn hungarian_matches_bruteforce_on_random_matrices() {
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..300 {
            let rows = rng.gen_range(1..=5);
            let cols = rng.gen_range(rows..=6);
            let sim: Vec<Vec<f64>> = (0..rows)
                .map(|_| (0..cols).map(|_| rng.gen_range(0.0..4.0)).collect())
                .collect();
            let got = best_alignment(rows, cols, |r, c| sim[r][c]);
            let want = best_alignment_bruteforce(&sim);
            assert!((got - want).abs() < 1e-9, "got {got}, want {want} for {sim:?}");
        }
    }

    #[test]
    fn ceafe_alignment_matches_permutation_oracle_on_small_partitions() {
        let mut rng = StdRng::seed_from_u64(17);
        for _ in 0..200 {
            let n = rng.gen_range(1..=6);
            let gold = random_partition(n, &mut rng);
            let pred = random_partition(n, &mut rng);
            let counts = MetricCounts::compute(&gold, &pred).unwrap();
            let sim: Vec<Vec<f64>> = gold
                .clusters
                .iter()
                .map(|g| {
                    pred.clusters
                        .iter()
                        .map(|p| {
                            let overlap = g.iter().filter(|m| p.contains(m)).count() as f64;
                            2.0 * overlap / (g.len() + p.len()) as f64
                        })
                        .collect()
                })
                .collect();
            let want = best_alignment_bruteforce(&sim);
            assert!((counts.ceafe_phi - want).abs() < 1e-9);
        }
    }

    #[test]
    fn precision_recall_swap_symmetry() {
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..200 {
            let n = rng.gen_range(2..=10);
            let a = random_partition(n, &mut rng);
            let b = random_partition(n, &mut rng);
            let ab = evaluate(&a, &b).unwrap();
            let ba = evaluate(&b, &a).unwrap();
            for (x, y) in [
                (ab.muc, ba.muc),
                (ab.b_cubed, ba.b_cubed),
                (ab.ceaf_e, ba.ceaf_e),
                (ab.ceaf_m, ba.ceaf_m),
            ] {
                assert!((x.precision - y.recall).abs() < 1e-12);
                assert!((x.recall - y.precision).abs() < 1e-12);
                assert!((x.f1 - y.f1).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn corpus_aggregation_is_micro() {
        let gold1 = clustering(&[&[0, 1, 2]]);
        let pred1 = clustering(&[&[0, 1], &[2]]);
        let gold2 = clustering(&[&[0, 1]]);
        let pred2 = clustering(&[&[0, 1]]);
        let r = evaluate_corpus([(&gold1, &pred1), (&gold2, &pred2)]).unwrap();
        // MUC recall: (3-2 + 2-1) / (2 + 1) = 2/3.
        assert!((r.muc.recall - 2.0 / 3.0).abs() < 1e-12);
        assert!((r.muc.precision - 1.0).abs() < 1e-12);
    }

    // --- significance tests ---

    #[test]
    fn identical_samples_give_half() {
        let a = [1.0, 2.0, 3.0];
        let (t, p) = t_test_one_tailed(&a, &a).unwrap();
        assert!((t - 0.0).abs() < 1e-12);
        assert!((p - 0.5).abs() < 1e-12);
    }

    #[test]
    fn large_separation_is_significant() {
        let b = [1.0, 1.001, 0.999, 1.0, 1.0005];
        let a: Vec<f64> = b.iter().map(|x| x + 10.0).collect();
        let (_, p) = t_test_one_tailed(&a, &b).unwrap();
        assert!(p < 0.01, "p = {p}");
    }

    #[test]
    fn degenerate_zero_variance_cases() {
        let a = [2.0, 2.0, 2.0];
        let b = [2.0, 2.0, 2.0];
        assert_eq!(t_test_one_tailed(&a, &b).unwrap(), (0.0, 0.5));
        let c = [3.0, 3.0, 3.0];
        let (t, p) = t_test_one_tailed(&c, &b).unwrap();
        assert!(t.is_infinite() && p == 0.0);
    }

    #[test]
    fn too_small_samples_are_error() {
        assert!(t_test_one_tailed(&[1.0], &[1.0, 2.0]).is_err());
        assert!(t_test_paired_one_tailed(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn sf_matches_closed_forms() {
        // df = 1 is the Cauchy distribution: P(T > 1) = 1/4.
        assert!((student_t_sf(1.0, 1.0) - 0.25).abs() < 1e-10);
        // df = 2 has the closed form P(T > t) = 1/2 - t / (2 sqrt(t^2 + 2)).
        let t = 1.0;
        let want = 0.5 - t / (2.0 * (t * t + 2.0f64).sqrt());
        assert!((student_t_sf(t, 2.0) - want).abs() < 1e-10);
        // Symmetry.
        assert!((student_t_sf(-1.3, 5.0) + student_t_sf(1.3, 5.0) - 1.0).abs() < 1e-12);
    }

    /// Numerical-integration oracle for P(T > t): Simpson's rule over the
    /// unnormalized t density, normalized by its own integral, with no use
    /// of gamma or beta functions.
    fn t_sf_oracle(t: f64, df: f64) -> f64 {
        let pdf = |x: f64| (1.0 + x * x / df).powf(-(df + 1.0) / 2.0);
        let simpson = |lo: f64, hi: f64, steps: usize| {
            let h = (hi - lo) / steps as f64;
            let mut acc = pdf(lo) + pdf(hi);
            for k in 1..steps {
                let x = lo + k as f64 * h;
                acc += pdf(x) * if k % 2 == 1 { 4.0 } else { 2.0 };
            }
            acc * h / 3.0
        };
        let bound = 400.0;
        let z = simpson(-bound, bound, 800_000);
        let upper = if t >= bound { 0.0 } else { simpson(t, bound, 800_000) };
        upper / z
    }

    #[test]
    fn welch_p_matches_integration_oracle() {
        let a = [86.5, 86.6, 86.4, 86.5, 86.6];
        let b = [85.8, 85.7, 85.9, 85.8, 85.8];
        let (t, p) = t_test_one_tailed(&a, &b).unwrap();
        assert!(t > 0.0);
        // Recompute Welch df independently for the oracle.
        let (ma, va, na) = mean_var(&a);
        let (mb, vb, nb) = mean_var(&b);
        let se2 = va / na + vb / nb;
        let df =
            se2 * se2 / ((va / na) * (va / na) / (na - 1.0) + (vb / nb) * (vb / nb) / (nb - 1.0));
        let t_direct = (ma - mb) / se2.sqrt();
        assert!((t - t_direct).abs() < 1e-12);
        let want = t_sf_oracle(t_direct, df);
        assert!(p > 0.0 && p < 0.01);
        assert!(
            (p - want).abs() <= 1e-10 + 1e-4 * want.abs(),
            "p = {p}, oracle = {want}"
        );
        // A few more (t, df) points against the oracle.
        for (tv, dfv) in [(0.5, 3.0), (2.1, 7.4), (-1.7, 4.2), (3.3, 9.0)] {
            let got = student_t_sf(tv, dfv);
            let want = t_sf_oracle(tv, dfv);
            assert!(
                (got - want).abs() <= 1e-8 + 1e-6 * want.abs(),
                "sf({tv}, {dfv}) = {got}, oracle = {want}"
            );
        }
    }

    #[test]
    fn paired_test_on_matched_seeds() {
        let a = [0.86, 0.87, 0.85, 0.88, 0.86];
        let b = [0.85, 0.86, 0.84, 0.86, 0.85];
        let (t, p) = t_test_paired_one_tailed(&a, &b).unwrap();
        assert!(t > 0.0 && p < 0.05);
    }
}
