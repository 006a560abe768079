//! Support estimation and multiscale active classification on metric data.
//!
//! The pipeline uses only pairwise distances and the positive kernel
//! `Psi_n = Phi_n^2` of [`crate::trig`]:
//!
//! 1. score every point by its average kernel affinity to the data and prune
//!    everything below a fraction of the best score (support estimation);
//! 2. grow a graph scale eta, connect surviving points closer than eta, and
//!    in each sufficiently large component either query the label of the
//!    highest-scoring point or extend the labels already queried — unless
//!    queried labels disagree, in which case the component is left alone at
//!    that scale (cautious extension);
//! 3. stop when one component holds every surviving point, then fill in all
//!    remaining labels by k-nearest-neighbor vote.
//!
//! Label information enters only through an [`Oracle`], so the number of
//! ground-truth lookups (the query budget) is observable and small.

use crate::error::{Error, Result};
use crate::trig::TrigKernel;

use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;

use std::collections::BTreeMap;
use std::f64::consts::PI;

// ---------------------------------------------------------------------------
// Union-find
// ---------------------------------------------------------------------------

/// Disjoint-set forest with union by rank and path compression.
#[derive(Debug, Clone)]
pub struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSet {
    /// Creates `len` singleton sets.
    pub fn new(len: usize) -> Self {
        Self {
            parent: (0..len).collect(),
            rank: vec![0; len],
        }
    }

    /// Representative of the set containing `i`, compressing the path.
    pub fn find(&mut self, i: usize) -> usize {
        let mut root = i;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = i;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    /// Merges the sets containing `a` and `b`.
    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }

    /// The raw parent array (post path-compression state).
    pub fn parents(&self) -> &[usize] {
        &self.parent
    }
}

// ---------------------------------------------------------------------------
// Metric cloud
// ---------------------------------------------------------------------------

/// A finite metric space: M points with precomputed pairwise distances,
/// normalized so that the diameter is at most pi (the kernel's domain).
#[derive(Debug, Clone)]
pub struct MetricCloud {
    dist: Array2<f64>,
    diameter: f64,
}

impl MetricCloud {
    /// Builds a cloud from raw feature rows under the Euclidean metric,
    /// rescaling all distances by pi / diameter so the diameter becomes
    /// exactly pi (a cloud of identical points keeps diameter 0).
    pub fn from_euclidean(rows: ArrayView2<'_, f64>) -> Result<Self> {
        let m = rows.nrows();
        if m == 0 {
            return Err(Error::InvalidArgument("cloud needs at least one point".into()));
        }
        let mut dist = Array2::zeros((m, m));
        let mut diameter = 0.0_f64;
        for i in 0..m {
            for j in (i + 1)..m {
                let d = rows
                    .row(i)
                    .iter()
                    .zip(rows.row(j))
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                dist[(i, j)] = d;
                dist[(j, i)] = d;
                diameter = diameter.max(d);
            }
        }
        if diameter > 0.0 {
            let scale = PI / diameter;
            dist.mapv_inplace(|d| d * scale);
            diameter = PI;
        }
        Ok(Self { dist, diameter })
    }

    /// Builds a cloud from unit vectors with the geodesic (arccos of dot
    /// product) metric; distances are already within [0, pi].
    pub fn from_unit_sphere(rows: ArrayView2<'_, f64>) -> Result<Self> {
        let m = rows.nrows();
        if m == 0 {
            return Err(Error::InvalidArgument("cloud needs at least one point".into()));
        }
        for (i, row) in rows.rows().into_iter().enumerate() {
            let norm = row.dot(&row).sqrt();
            if (norm - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidArgument(format!(
                    "row {i} has norm {norm}, expected a unit vector"
                )));
            }
        }
        let mut dist = Array2::zeros((m, m));
        let mut diameter = 0.0_f64;
        for i in 0..m {
            for j in (i + 1)..m {
                let dot: f64 = rows.row(i).dot(&rows.row(j)).clamp(-1.0, 1.0);
                let d = dot.acos();
                dist[(i, j)] = d;
                dist[(j, i)] = d;
                diameter = diameter.max(d);
            }
        }
        Ok(Self { dist, diameter })
    }

    /// Wraps an explicit distance matrix (symmetric, zero diagonal, entries
    /// in [0, pi]); no rescaling is applied.
    pub fn from_distances(dist: Array2<f64>) -> Result<Self> {
        let m = dist.nrows();
        if m == 0 || dist.ncols() != m {
            return Err(Error::InvalidArgument(format!(
                "distance matrix must be square and nonempty, got {m} x {}",
                dist.ncols()
            )));
        }
        let mut diameter = 0.0_f64;
        for i in 0..m {
            if dist[(i, i)] != 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "distance matrix diagonal entry ({i},{i}) is {}",
                    dist[(i, i)]
                )));
            }
            for j in (i + 1)..m {
                let d = dist[(i, j)];
                if !(d >= 0.0) || (d - dist[(j, i)]).abs() > 1e-12 {
                    return Err(Error::InvalidArgument(format!(
                        "distance matrix is not symmetric nonnegative at ({i},{j})"
                    )));
                }
                if d > PI + 1e-12 {
                    return Err(Error::InvalidArgument(format!(
                        "distance {d} at ({i},{j}) exceeds pi; rescale first"
                    )));
                }
                diameter = diameter.max(d);
            }
        }
        Ok(Self { dist, diameter })
    }

    /// Number of points M.
    pub fn len(&self) -> usize {
        self.dist.nrows()
    }

    /// Whether the cloud is empty (never true for a constructed value).
    pub fn is_empty(&self) -> bool {
        self.dist.nrows() == 0
    }

    /// The distance between points `i` and `j`.
    pub fn rho(&self, i: usize, j: usize) -> f64 {
        self.dist[(i, j)]
    }

    /// The largest pairwise distance.
    pub fn diameter(&self) -> f64 {
        self.diameter
    }
}

// ---------------------------------------------------------------------------
// Support estimation
// ---------------------------------------------------------------------------

/// The full kernel affinity matrix `Psi_n(rho(x_i, x_j))`, assembled once in
/// parallel and reused across all graph scales.
pub fn psi_matrix(cloud: &MetricCloud, kernel: &TrigKernel) -> Array2<f64> {
    let m = cloud.len();
    let mut data = vec![0.0; m * m];
    data.par_chunks_mut(m).enumerate().for_each(|(i, row)| {
        for (j, slot) in row.iter_mut().enumerate() {
            *slot = kernel.psi(cloud.rho(i, j));
        }
    });
    Array2::from_shape_vec((m, m), data).expect("shape m*m by construction")
}

/// Support scores `score_i = (1/M) sum_j Psi_n(rho(x_i, x_j))`.
///
/// The j = i term is included, so every score is strictly positive; points
/// deep inside dense regions score highest.
pub fn support_scores(cloud: &MetricCloud, n: usize) -> Result<Vec<f64>> {
    let kernel = TrigKernel::new(n)?;
    let psi = psi_matrix(cloud, &kernel);
    let m = cloud.len() as f64;
    Ok(psi.rows().into_iter().map(|r| r.sum() / m).collect())
}

/// Indices whose score reaches `theta` times the maximum score, ascending.
///
/// `theta` must lie in (0, 1]; the argmax always qualifies, so the set is
/// never empty.
pub fn threshold_set(scores: &[f64], theta: f64) -> Result<Vec<usize>> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "threshold must lie in (0, 1], got {theta}"
        )));
    }
    if scores.is_empty() {
        return Err(Error::InvalidArgument("no scores to threshold".into()));
    }
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok((0..scores.len())
        .filter(|&i| scores[i] >= theta * max)
        .collect())
}

/// Connected components of the eta-neighborhood graph over `members`
/// (edges where `rho < eta`, strictly), filtered to size >= `min_size`.
///
/// Components are returned with ascending member indices, ordered by their
/// smallest member.
pub fn components_at_eta(
    cloud: &MetricCloud,
    members: &[usize],
    eta: f64,
    min_size: usize,
) -> Vec<Vec<usize>> {
    let mut sets = DisjointSet::new(cloud.len());
    for (a, &i) in members.iter().enumerate() {
        for &j in &members[(a + 1)..] {
            if cloud.rho(i, j) < eta {
                sets.union(i, j);
            }
        }
    }
    let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut sorted = members.to_vec();
    sorted.sort_unstable();
    for &i in &sorted {
        by_root.entry(sets.find(i)).or_default().push(i);
    }
    let mut comps: Vec<Vec<usize>> = by_root
        .into_values()
        .filter(|c| c.len() >= min_size)
        .collect();
    comps.sort_by_key(|c| c[0]);
    comps
}

// ---------------------------------------------------------------------------
// Oracle
// ---------------------------------------------------------------------------

/// Source of ground-truth labels, charged per distinct point queried.
pub trait Oracle {
    /// The label of point `index`.
    fn query(&mut self, index: usize) -> Result<usize>;

    /// Number of distinct points queried so far.
    fn queries(&self) -> usize;
}

/// An [`Oracle`] backed by a label vector.
#[derive(Debug, Clone)]
pub struct SliceOracle {
    labels: Vec<usize>,
    queried: std::collections::BTreeSet<usize>,
}

impl SliceOracle {
    /// Wraps a full ground-truth labeling.
    pub fn new(labels: Vec<usize>) -> Self {
        Self {
            labels,
            queried: Default::default(),
        }
    }

    /// The wrapped labels (for scoring outside the query budget).
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }
}

impl Oracle for SliceOracle {
    fn query(&mut self, index: usize) -> Result<usize> {
        let &label = self.labels.get(index).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "oracle query index {index} out of range (have {})",
                self.labels.len()
            ))
        })?;
        self.queried.insert(index);
        Ok(label)
    }

    fn queries(&self) -> usize {
        self.queried.len()
    }
}

// ---------------------------------------------------------------------------
// The classifier
// ---------------------------------------------------------------------------

/// Hyperparameters of the multiscale active classifier.
#[derive(Debug, Clone, Copy)]
pub struct MascConfig {
    /// Kernel degree for the support scores.
    pub n: usize,
    /// Support-pruning threshold, in (0, 1).
    pub theta: f64,
    /// First graph scale.
    pub eta_start: f64,
    /// Scale increment per level.
    pub eta_step: f64,
    /// Minimum component size considered at each level.
    pub min_size: usize,
    /// Neighbor count for the final label completion.
    pub k_neighbors: usize,
    /// Run seed, echoed into reports. The classifier itself is
    /// deterministic; the seed drives dataset generation upstream.
    pub seed: u64,
}

impl MascConfig {
    /// Validates all positivity constraints.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("kernel degree must be >= 1".into()));
        }
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "threshold must lie in (0, 1), got {}",
                self.theta
            )));
        }
        if !(self.eta_start > 0.0) || !(self.eta_step > 0.0) {
            return Err(Error::InvalidArgument(
                "eta start and step must be positive".into(),
            ));
        }
        if self.min_size == 0 || self.k_neighbors == 0 {
            return Err(Error::InvalidArgument(
                "component size and neighbor count must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// One label lookup in the run ledger.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueryEvent {
    /// Graph scale at which the query was issued.
    pub eta: f64,
    /// Queried point.
    pub index: usize,
    /// Label the oracle returned.
    pub label: usize,
}

/// State of one graph level, kept for diagnostics and invariant checks.
#[derive(Debug, Clone)]
pub struct EtaSnapshot {
    /// The scale of this level.
    pub eta: f64,
    /// Size-filtered components at this scale.
    pub components: Vec<Vec<usize>>,
    /// Points queried at this level.
    pub new_queries: Vec<usize>,
    /// Positions (into `components`) whose queried labels conflicted; those
    /// components received no labels at this level.
    pub conflicted: Vec<usize>,
    /// Main label state after the level (None = not yet labeled).
    pub labels: Vec<Option<usize>>,
    /// Cumulative query count after the level.
    pub query_total: usize,
    /// `labels` completed by k-NN without touching the main state — the
    /// "accuracy if we stopped now" view.
    pub completed_labels: Vec<usize>,
}

/// Mutable state of a classifier run.
#[derive(Debug, Clone)]
pub struct MascState {
    support_flags: Vec<bool>,
    support: Vec<usize>,
    labels: Vec<Option<usize>>,
    ledger: Vec<QueryEvent>,
    eta: f64,
    parents: Vec<usize>,
}

impl MascState {
    /// Whether point `i` survived support pruning.
    pub fn in_support(&self, i: usize) -> bool {
        self.support_flags[i]
    }

    /// Indices that survived support pruning, ascending.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// Per-point label state (None = unlabeled before completion).
    pub fn labels(&self) -> &[Option<usize>] {
        &self.labels
    }

    /// All queries in issue order.
    pub fn ledger(&self) -> &[QueryEvent] {
        &self.ledger
    }

    /// The last graph scale processed.
    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Union-find parent array of the last processed level.
    pub fn parents(&self) -> &[usize] {
        &self.parents
    }
}

/// Result of a full classifier run.
#[derive(Debug, Clone)]
pub struct MascRun {
    /// Final label for every point (after k-NN completion).
    pub labels: Vec<usize>,
    /// Final mutable state (support set, ledger, pre-completion labels).
    pub state: MascState,
    /// One snapshot per processed graph level.
    pub history: Vec<EtaSnapshot>,
}

/// Runs the multiscale active classifier.
///
/// Support pruning and the per-component query targets both use
/// leave-one-out scores `(sum_j Psi - Psi(0)) / M`: the self term is an
/// additive constant that would otherwise let isolated points ride on their
/// own kernel peak, inflating both the support set and the query budget.
///
/// Per level, each size-filtered component is handled cautiously: a
/// component with no queried member queries its highest-scoring point and
/// takes that label; one whose queried members agree takes their common
/// label; one with disagreeing queried members is left untouched at this
/// level (the next, finer look at it comes after its parts separate or the
/// run ends). The loop stops once a single component holds the entire
/// support set (that level is still processed) or the scale outgrows the
/// diameter. If the size filter never admitted any component, the single
/// highest-scoring support point is queried so completion has a label to
/// propagate. Unlabeled points then receive k-NN majority labels.
pub fn masc_run(
    cloud: &MetricCloud,
    oracle: &mut dyn Oracle,
    cfg: &MascConfig,
) -> Result<MascRun> {
    cfg.validate()?;
    let m = cloud.len();
    let kernel = TrigKernel::new(cfg.n)?;
    let psi = psi_matrix(cloud, &kernel);
    let psi0 = kernel.psi(0.0);
    let scores: Vec<f64> = psi
        .rows()
        .into_iter()
        .map(|r| (r.sum() - psi0) / m as f64)
        .collect();

    let smax = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let support: Vec<usize> = (0..m).filter(|&i| scores[i] >= cfg.theta * smax).collect();
    let mut support_flags = vec![false; m];
    for &i in &support {
        support_flags[i] = true;
    }

    let mut labels: Vec<Option<usize>> = vec![None; m];
    let mut ledger: Vec<QueryEvent> = Vec::new();
    let mut queried_flags = vec![false; m];
    let mut history: Vec<EtaSnapshot> = Vec::new();
    let mut eta = cfg.eta_start;
    let mut parents;

    loop {
        let comps = components_at_eta(cloud, &support, eta, cfg.min_size);
        {
            // Record the union-find forest of this level.
            let mut sets = DisjointSet::new(m);
            for (a, &i) in support.iter().enumerate() {
                for &j in &support[(a + 1)..] {
                    if cloud.rho(i, j) < eta {
                        sets.union(i, j);
                    }
                }
            }
            for i in 0..m {
                sets.find(i);
            }
            parents = sets.parents().to_vec();
        }
        let unified = comps.len() == 1 && comps[0].len() == support.len();

        let mut new_queries = Vec::new();
        let mut conflicted = Vec::new();
        for (ci, comp) in comps.iter().enumerate() {
            let queried: Vec<usize> = comp.iter().cloned().filter(|&i| queried_flags[i]).collect();
            if queried.is_empty() {
                // Fresh component: query its mode (highest leave-one-out
                // score, smallest index on ties).
                let &target = comp
                    .iter()
                    .reduce(|best, i| if scores[*i] > scores[*best] { i } else { best })
                    .expect("component is nonempty");
                let label = oracle.query(target)?;
                queried_flags[target] = true;
                ledger.push(QueryEvent {
                    eta,
                    index: target,
                    label,
                });
                new_queries.push(target);
                for &i in comp {
                    labels[i] = Some(label);
                }
            } else {
                let first = ledgered_label(&ledger, queried[0]);
                if queried[1..]
                    .iter()
                    .all(|&i| ledgered_label(&ledger, i) == first)
                {
                    for &i in comp {
                        labels[i] = Some(first);
                    }
                } else {
                    conflicted.push(ci);
                }
            }
        }

        let completed_labels = complete_by_knn(cloud, &labels, cfg.k_neighbors)?;
        history.push(EtaSnapshot {
            eta,
            components: comps,
            new_queries,
            conflicted,
            labels: labels.clone(),
            query_total: ledger.len(),
            completed_labels,
        });

        if unified {
            break;
        }
        eta += cfg.eta_step;
        if eta > cloud.diameter() + cfg.eta_step {
            break;
        }
    }

    if ledger.is_empty() {
        // The size filter admitted nothing at any scale; fall back to one
        // query at the overall support mode.
        let &target = support
            .iter()
            .reduce(|best, i| if scores[*i] > scores[*best] { i } else { best })
            .expect("threshold set is never empty");
        let label = oracle.query(target)?;
        ledger.push(QueryEvent {
            eta,
            index: target,
            label,
        });
        labels[target] = Some(label);
    }

    let final_labels = complete_by_knn(cloud, &labels, cfg.k_neighbors)?;
    Ok(MascRun {
        labels: final_labels,
        state: MascState {
            support_flags,
            support,
            labels,
            ledger,
            eta,
            parents,
        },
        history,
    })
}

fn ledgered_label(ledger: &[QueryEvent], index: usize) -> usize {
    ledger
        .iter()
        .find(|e| e.index == index)
        .expect("queried flag implies a ledger entry")
        .label
}

fn complete_by_knn(
    cloud: &MetricCloud,
    labels: &[Option<usize>],
    k: usize,
) -> Result<Vec<usize>> {
    let labeled: Vec<(usize, usize)> = labels
        .iter()
        .enumerate()
        .filter_map(|(i, l)| l.map(|l| (i, l)))
        .collect();
    if labeled.is_empty() {
        // Pre-query snapshot: nothing to propagate yet.
        return Ok(vec![usize::MAX; labels.len()]);
    }
    let unlabeled: Vec<usize> = (0..labels.len()).filter(|&i| labels[i].is_none()).collect();
    let filled = knn_extend(cloud, &labeled, &unlabeled, k)?;
    let mut out: Vec<usize> = labels.iter().map(|l| l.unwrap_or(usize::MAX)).collect();
    for (&i, &l) in unlabeled.iter().zip(&filled) {
        out[i] = l;
    }
    Ok(out)
}

/// Labels each point of `unlabeled` by majority vote among its `k` nearest
/// labeled points; ties (in both distance and vote count) resolve toward
/// the smaller index / smaller label, making the result deterministic.
pub fn knn_extend(
    cloud: &MetricCloud,
    labeled: &[(usize, usize)],
    unlabeled: &[usize],
    k: usize,
) -> Result<Vec<usize>> {
    if labeled.is_empty() && !unlabeled.is_empty() {
        return Err(Error::InvalidArgument(
            "k-NN extension needs at least one labeled point".into(),
        ));
    }
    Ok(unlabeled
        .iter()
        .map(|&i| {
            let mut near: Vec<(f64, usize, usize)> = labeled
                .iter()
                .map(|&(j, l)| (cloud.rho(i, j), j, l))
                .collect();
            near.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let mut votes: BTreeMap<usize, usize> = BTreeMap::new();
            for &(_, _, l) in near.iter().take(k) {
                *votes.entry(l).or_insert(0) += 1;
            }
            // Ascending label order + strict improvement = smallest label
            // wins ties.
            let (mut best_label, mut best_count) = (0, 0);
            for (&l, &c) in &votes {
                if c > best_count {
                    best_label = l;
                    best_count = c;
                }
            }
            best_label
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Cluster scoring
// ---------------------------------------------------------------------------

/// Size-weighted F-score of a predicted partition against ground truth.
///
/// Per predicted cluster C the score is the best harmonic-mean overlap
/// `max_k 2 |C intersect L_k| / (|C| + |L_k|)` over true clusters L_k; the
/// aggregate weights each cluster by its size. Invariant under renaming of
/// cluster identities on either side.
pub fn f_score(predicted: &[Vec<usize>], truth: &[Vec<usize>]) -> Result<f64> {
    if predicted.is_empty() || truth.is_empty() {
        return Err(Error::InvalidArgument(
            "F-score needs nonempty partitions".into(),
        ));
    }
    if predicted.iter().chain(truth).any(|c| c.is_empty()) {
        return Err(Error::InvalidArgument(
            "F-score partitions must not contain empty clusters".into(),
        ));
    }
    let truth_sets: Vec<std::collections::HashSet<usize>> = truth
        .iter()
        .map(|c| c.iter().cloned().collect())
        .collect();
    let mut weighted = 0.0;
    let mut total = 0.0;
    for c in predicted {
        let best = truth_sets
            .iter()
            .zip(truth)
            .map(|(set, l)| {
                let overlap = c.iter().filter(|i| set.contains(i)).count();
                2.0 * overlap as f64 / (c.len() + l.len()) as f64
            })
            .fold(0.0_f64, f64::max);
        weighted += c.len() as f64 * best;
        total += c.len() as f64;
    }
    Ok(weighted / total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    /// Points on a line, as a 1-column matrix.
    fn line_cloud(xs: &[f64]) -> MetricCloud {
        let rows = Array2::from_shape_vec((xs.len(), 1), xs.to_vec()).unwrap();
        MetricCloud::from_euclidean(rows.view()).unwrap()
    }

    /// Explicit distances from 1-D coordinates, without rescaling.
    fn raw_line_cloud(xs: &[f64]) -> MetricCloud {
        let m = xs.len();
        let mut d = Array2::zeros((m, m));
        for i in 0..m {
            for j in 0..m {
                d[(i, j)] = (xs[i] - xs[j]).abs();
            }
        }
        MetricCloud::from_distances(d).unwrap()
    }

    #[test]
    fn union_find_basics() {
        let mut s = DisjointSet::new(5);
        s.union(0, 1);
        s.union(3, 4);
        assert_eq!(s.find(0), s.find(1));
        assert_ne!(s.find(1), s.find(3));
        s.union(1, 3);
        assert_eq!(s.find(0), s.find(4));
        assert_ne!(s.find(2), s.find(0));
    }

    #[test]
    fn euclidean_cloud_rescales_to_pi() {
        let c = line_cloud(&[0.0, 1.0, 10.0]);
        assert!((c.diameter() - PI).abs() < 1e-12);
        assert!((c.rho(0, 2) - PI).abs() < 1e-12);
        assert!((c.rho(0, 1) - PI / 10.0).abs() < 1e-12);
        assert_eq!(c.rho(1, 1), 0.0);
    }

    #[test]
    fn sphere_cloud_uses_geodesics() {
        let rows = array![[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]];
        let c = MetricCloud::from_unit_sphere(rows.view()).unwrap();
        assert!((c.rho(0, 1) - PI / 2.0).abs() < 1e-12);
        assert!((c.rho(0, 2) - PI).abs() < 1e-12);
        let bad = array![[1.0, 1.0]];
        assert!(MetricCloud::from_unit_sphere(bad.view()).is_err());
    }

    #[test]
    fn distance_matrix_validation() {
        assert!(MetricCloud::from_distances(array![[0.0, 1.0], [1.0, 0.0]]).is_ok());
        assert!(MetricCloud::from_distances(array![[0.0, 1.0], [2.0, 0.0]]).is_err());
        assert!(MetricCloud::from_distances(array![[0.1]]).is_err());
        assert!(MetricCloud::from_distances(array![[0.0, 4.0], [4.0, 0.0]]).is_err());
    }

    #[test]
    fn support_score_of_single_and_duplicate_points() {
        let kernel = TrigKernel::new(8).unwrap();
        let single = MetricCloud::from_distances(Array2::zeros((1, 1))).unwrap();
        let s = support_scores(&single, 8).unwrap();
        assert!((s[0] - kernel.psi(0.0)).abs() < 1e-12);

        let dup = MetricCloud::from_distances(Array2::zeros((2, 2))).unwrap();
        let s = support_scores(&dup, 8).unwrap();
        for v in s {
            assert!((v - kernel.psi(0.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn outlier_scores_below_cluster() {
        // 50 tightly packed points and one point at the far end of the
        // rescaled diameter.
        let mut xs: Vec<f64> = (0..50).map(|i| i as f64 * 0.001).collect();
        xs.push(10.0);
        let cloud = line_cloud(&xs);
        let s = support_scores(&cloud, 32).unwrap();
        let cluster_mean = s[..50].iter().sum::<f64>() / 50.0;
        assert!(
            s[50] < 0.6 * cluster_mean,
            "outlier {} vs cluster mean {cluster_mean}",
            s[50]
        );
        // Theta = 0.7 prunes the outlier but keeps the cluster.
        let kept = threshold_set(&s, 0.7).unwrap();
        assert_eq!(kept, (0..50).collect::<Vec<_>>());
    }

    #[test]
    fn threshold_set_boundaries() {
        let scores = vec![0.2, 1.0, 0.5, 1.0];
        assert_eq!(threshold_set(&scores, 1e-12).unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(threshold_set(&scores, 1.0).unwrap(), vec![1, 3]);
        assert!(threshold_set(&scores, 0.0).is_err());
        assert!(threshold_set(&scores, 1.1).is_err());
        assert!(threshold_set(&[], 0.5).is_err());
    }

    #[test]
    fn threshold_sets_nest() {
        let scores: Vec<f64> = (0..40).map(|i| ((i * 7919) % 100) as f64 / 100.0 + 0.01).collect();
        let mut prev = threshold_set(&scores, 0.1).unwrap();
        for t in [0.3, 0.5, 0.7, 0.9] {
            let cur = threshold_set(&scores, t).unwrap();
            assert!(cur.iter().all(|i| prev.contains(i)), "theta {t}");
            prev = cur;
        }
    }

    #[test]
    fn component_extremes() {
        let cloud = raw_line_cloud(&[0.0, 1.0, 2.0, 3.0]);
        // Below the minimum positive distance: all singletons.
        let comps = components_at_eta(&cloud, &[0, 1, 2, 3], 0.5, 1);
        assert_eq!(comps.len(), 4);
        // Above the diameter: one component.
        let comps = components_at_eta(&cloud, &[0, 1, 2, 3], 3.1, 1);
        assert_eq!(comps, vec![vec![0, 1, 2, 3]]);
    }

    #[test]
    fn two_blobs_resolve_at_the_right_scale() {
        let mut xs: Vec<f64> = (0..20).map(|i| i as f64 * 0.005).collect();
        xs.extend((0..20).map(|i| 0.6 + i as f64 * 0.005));
        let cloud = raw_line_cloud(&xs);
        let members: Vec<usize> = (0..40).collect();
        let comps = components_at_eta(&cloud, &members, 0.2, 5);
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0], (0..20).collect::<Vec<_>>());
        assert_eq!(comps[1], (20..40).collect::<Vec<_>>());
    }

    #[test]
    fn components_nest_in_eta() {
        let xs: Vec<f64> = vec![0.0, 0.1, 0.25, 0.9, 1.0, 1.6, 2.0, 2.05];
        let cloud = raw_line_cloud(&xs);
        let members: Vec<usize> = (0..xs.len()).collect();
        let mut prev = components_at_eta(&cloud, &members, 0.05, 1);
        for eta in [0.12, 0.3, 0.5, 0.8, 2.5] {
            let cur = components_at_eta(&cloud, &members, eta, 1);
            for small in &prev {
                assert!(
                    cur.iter()
                        .any(|big| small.iter().all(|i| big.contains(i))),
                    "eta {eta}: {small:?} not inside any of {cur:?}"
                );
            }
            prev = cur;
        }
    }

    #[test]
    fn oracle_counts_distinct_queries() {
        let mut o = SliceOracle::new(vec![5, 6, 7]);
        assert_eq!(o.query(1).unwrap(), 6);
        assert_eq!(o.query(1).unwrap(), 6);
        assert_eq!(o.query(2).unwrap(), 7);
        assert_eq!(o.queries(), 2);
        assert!(o.query(9).is_err());
    }

    #[test]
    fn knn_rules() {
        let cloud = raw_line_cloud(&[0.0, 1.0, 2.0, 1.2]);
        // Nearest labeled point wins at k = 1.
        let got = knn_extend(&cloud, &[(0, 8), (2, 9)], &[3], 1).unwrap();
        assert_eq!(got, vec![9]);
        // Equidistant 'A'/'B' pair at k = 2: smaller label wins.
        let cloud = raw_line_cloud(&[0.0, 2.0, 1.0]);
        let got = knn_extend(&cloud, &[(0, 4), (1, 3)], &[2], 2).unwrap();
        assert_eq!(got, vec![3]);
        // Majority at k = 3.
        let cloud = raw_line_cloud(&[0.0, 0.1, 3.0, 1.0]);
        let got = knn_extend(&cloud, &[(0, 1), (1, 1), (2, 0)], &[3], 3).unwrap();
        assert_eq!(got, vec![1]);
        // No labeled points is a contract violation.
        assert!(knn_extend(&cloud, &[], &[3], 1).is_err());
    }

    #[test]
    fn f_score_examples() {
        let truth = vec![(0..64).collect::<Vec<_>>(), (64..128).collect::<Vec<_>>()];
        assert_eq!(f_score(&truth, &truth).unwrap(), 1.0);
        // One predicted cluster swallowing both equal true clusters: 2/3.
        let merged = vec![(0..128).collect::<Vec<_>>()];
        assert_eq!(f_score(&merged, &truth).unwrap(), 2.0 / 3.0);
        // Disjoint prediction contributes zero.
        let disjoint = vec![vec![500, 501]];
        assert_eq!(f_score(&disjoint, &truth).unwrap(), 0.0);
        // Relabeling the true clusters changes nothing.
        let relabeled = vec![truth[1].clone(), truth[0].clone()];
        assert_eq!(f_score(&truth, &relabeled).unwrap(), 1.0);
        assert!(f_score(&[], &truth).is_err());
        assert!(f_score(&truth, &[vec![]]).is_err());
    }

    fn blob_config() -> MascConfig {
        MascConfig {
            n: 16,
            theta: 0.1,
            eta_start: 0.2,
            eta_step: 0.2,
            min_size: 3,
            k_neighbors: 3,
            seed: 0,
        }
    }

    #[test]
    fn single_class_needs_one_query() {
        let xs: Vec<f64> = (0..30).map(|i| i as f64 * 0.01).collect();
        let cloud = line_cloud(&xs);
        let mut oracle = SliceOracle::new(vec![7; 30]);
        let run = masc_run(&cloud, &mut oracle, &blob_config()).unwrap();
        assert_eq!(run.state.ledger().len(), 1);
        assert_eq!(oracle.queries(), 1);
        assert!(run.labels.iter().all(|&l| l == 7));
    }

    #[test]
    fn two_blobs_need_two_queries() {
        let mut xs: Vec<f64> = (0..25).map(|i| i as f64 * 0.01).collect();
        xs.extend((0..25).map(|i| 2.0 + i as f64 * 0.01));
        let cloud = line_cloud(&xs);
        let truth: Vec<usize> = (0..50).map(|i| usize::from(i >= 25)).collect();
        let mut oracle = SliceOracle::new(truth.clone());
        let cfg = MascConfig {
            eta_start: 0.1,
            eta_step: 0.1,
            ..blob_config()
        };
        let run = masc_run(&cloud, &mut oracle, &cfg).unwrap();
        assert_eq!(run.state.ledger().len(), 2);
        assert_eq!(run.labels, truth);
        // The final level sees one unified, conflicted component.
        let last = run.history.last().unwrap();
        assert_eq!(last.components.len(), 1);
        assert_eq!(last.conflicted, vec![0]);
    }

    #[test]
    fn oversized_start_scale_degenerates_to_one_query() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64 * 0.3).collect();
        let cloud = line_cloud(&xs);
        let mut oracle = SliceOracle::new(vec![2; 20]);
        let cfg = MascConfig {
            eta_start: 4.0,
            ..blob_config()
        };
        let run = masc_run(&cloud, &mut oracle, &cfg).unwrap();
        assert_eq!(run.history.len(), 1);
        assert_eq!(run.state.ledger().len(), 1);
        assert!(run.labels.iter().all(|&l| l == 2));
    }

    #[test]
    fn undersized_components_fall_back_to_one_query() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let cloud = line_cloud(&xs);
        let mut oracle = SliceOracle::new(vec![3; 10]);
        let cfg = MascConfig {
            min_size: 15, // larger than the dataset
            ..blob_config()
        };
        let run = masc_run(&cloud, &mut oracle, &cfg).unwrap();
        assert_eq!(run.state.ledger().len(), 1);
        assert!(run.labels.iter().all(|&l| l == 3));
    }

    #[test]
    fn runs_are_deterministic() {
        let mut xs: Vec<f64> = (0..30).map(|i| i as f64 * 0.02).collect();
        xs.extend((0..30).map(|i| 1.5 + i as f64 * 0.02));
        let cloud = line_cloud(&xs);
        let truth: Vec<usize> = (0..60).map(|i| usize::from(i >= 30)).collect();
        let cfg = MascConfig {
            eta_start: 0.05,
            eta_step: 0.05,
            ..blob_config()
        };
        let mut o1 = SliceOracle::new(truth.clone());
        let mut o2 = SliceOracle::new(truth);
        let r1 = masc_run(&cloud, &mut o1, &cfg).unwrap();
        let r2 = masc_run(&cloud, &mut o2, &cfg).unwrap();
        assert_eq!(r1.labels, r2.labels);
        assert_eq!(r1.state.ledger(), r2.state.ledger());
        assert_eq!(r1.history.len(), r2.history.len());
    }

    #[test]
    fn config_validation() {
        let ok = blob_config();
        assert!(ok.validate().is_ok());
        assert!(MascConfig { n: 0, ..ok }.validate().is_err());
        assert!(MascConfig { theta: 1.0, ..ok }.validate().is_err());
        assert!(MascConfig { eta_step: 0.0, ..ok }.validate().is_err());
        assert!(MascConfig { min_size: 0, ..ok }.validate().is_err());
        assert!(MascConfig { k_neighbors: 0, ..ok }.validate().is_err());
    }
}
