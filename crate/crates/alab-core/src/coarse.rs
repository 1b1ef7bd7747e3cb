//! Finite metric spaces, Vietoris-Rips complexes, inclusion-induced
//! component maps, H1 rank over F2, weighted Cayley metrics, and
//! filtration probes.
//!
//! A Vietoris-Rips filtration of a finite space can only ever give
//! evidence about coarse connectivity, never the invariant itself; the
//! probe verdicts here are phrased per scale schedule for that reason.

use std::collections::{BinaryHeap, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::places::Rational;

#[derive(Debug, Error, PartialEq)]
pub enum CoarseError {
    #[error("distance matrix must be square and symmetric with zero diagonal")]
    BadMetric,
    #[error("metric violates the triangle inequality on ({0}, {1}, {2})")]
    TriangleViolation(usize, usize, usize),
    #[error("scales must satisfy r <= s")]
    BadScales,
    #[error("max_dim must be 0, 1 or 2")]
    BadMaxDim,
    #[error("negative scale")]
    NegativeScale,
    #[error("generator stages must be ascending and symmetric")]
    BadStages,
    #[error("budget exceeded: distance is at least {lower_bound}")]
    BudgetExceeded { lower_bound: u64 },
}

/// A finite metric space: indexed points plus a symmetric distance
/// matrix. The triangle inequality is checked on construction,
/// exhaustively for small spaces and on sampled triples otherwise.
#[derive(Clone, Debug)]
pub struct FiniteMetricSpace {
    pub labels: Vec<String>,
    dist: Vec<f64>,
    n: usize,
}

impl FiniteMetricSpace {
    pub fn new(labels: Vec<String>, dist_matrix: Vec<Vec<f64>>) -> Result<Self, CoarseError> {
        let n = labels.len();
        if dist_matrix.len() != n || dist_matrix.iter().any(|r| r.len() != n) {
            return Err(CoarseError::BadMetric);
        }
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            if dist_matrix[i][i] != 0.0 {
                return Err(CoarseError::BadMetric);
            }
            for j in 0..n {
                let d = dist_matrix[i][j];
                if d < 0.0 || (dist_matrix[j][i] - d).abs() > 1e-12 {
                    return Err(CoarseError::BadMetric);
                }
                dist[i * n + j] = d;
            }
        }
        let space = FiniteMetricSpace { labels, dist, n };
        space.check_triangles()?;
        Ok(space)
    }

    pub fn from_points<T, F>(points: &[T], label: impl Fn(&T) -> String, d: F) -> Result<Self, CoarseError>
    where
        F: Fn(&T, &T) -> f64,
    {
        let labels = points.iter().map(&label).collect();
        let matrix: Vec<Vec<f64>> = points
            .iter()
            .map(|a| points.iter().map(|b| d(a, b)).collect())
            .collect();
        FiniteMetricSpace::new(labels, matrix)
    }

    fn check_triangles(&self) -> Result<(), CoarseError> {
        let n = self.n;
        let check = |i: usize, j: usize, k: usize| {
            if self.dist(i, j) > self.dist(i, k) + self.dist(k, j) + 1e-9 {
                Err(CoarseError::TriangleViolation(i, j, k))
            } else {
                Ok(())
            }
        };
        if n <= 40 {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        check(i, j, k)?;
                    }
                }
            }
        } else {
            // sampled triples, deterministic linear congruential walk
            let mut x = 0x9e3779b97f4a7c15u64;
            for _ in 0..2000 {
                x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let i = (x >> 33) as usize % n;
                x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let j = (x >> 33) as usize % n;
                x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let k = (x >> 33) as usize % n;
                check(i, j, k)?;
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// Product space on the cartesian point set with the max metric.
    pub fn product(&self, other: &FiniteMetricSpace) -> FiniteMetricSpace {
        let mut labels = Vec::with_capacity(self.n * other.n);
        for a in &self.labels {
            for b in &other.labels {
                labels.push(format!("{a}|{b}"));
            }
        }
        let n = self.n * other.n;
        let mut dist = vec![0.0; n * n];
        for i1 in 0..self.n {
            for j1 in 0..other.n {
                for i2 in 0..self.n {
                    for j2 in 0..other.n {
                        let d = self.dist(i1, i2).max(other.dist(j1, j2));
                        dist[(i1 * other.n + j1) * n + (i2 * other.n + j2)] = d;
                    }
                }
            }
        }
        FiniteMetricSpace { labels, dist, n }
    }
}

/// Union-find over point indices.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != x {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.rank[ra] < self.rank[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        if self.rank[ra] == self.rank[rb] {
            self.rank[ra] += 1;
        }
    }

    /// Compact labeling: component ids numbered by first appearance.
    pub fn labeling(&mut self) -> (Vec<usize>, usize) {
        let n = self.parent.len();
        let mut ids = HashMap::new();
        let mut labels = Vec::with_capacity(n);
        for i in 0..n {
            let root = self.find(i);
            let next = ids.len();
            labels.push(*ids.entry(root).or_insert(next));
        }
        (labels, ids.len())
    }
}

/// The simplices of a Vietoris-Rips complex at one scale, listed by
/// dimension up to max_dim <= 2, in lexicographic vertex order.
#[derive(Clone, Debug, Serialize)]
pub struct VRComplex {
    pub scale: f64,
    pub max_dim: usize,
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
    pub triangles: Vec<(usize, usize, usize)>,
}

pub fn vr_complex(
    space: &FiniteMetricSpace,
    r: f64,
    max_dim: usize,
) -> Result<VRComplex, CoarseError> {
    if r < 0.0 {
        return Err(CoarseError::NegativeScale);
    }
    if max_dim > 2 {
        return Err(CoarseError::BadMaxDim);
    }
    let n = space.len();
    let mut edges = Vec::new();
    if max_dim >= 1 {
        for i in 0..n {
            for j in (i + 1)..n {
                if space.dist(i, j) <= r {
                    edges.push((i, j));
                }
            }
        }
    }
    let mut triangles = Vec::new();
    if max_dim >= 2 {
        for i in 0..n {
            for j in (i + 1)..n {
                if space.dist(i, j) > r {
                    continue;
                }
                for k in (j + 1)..n {
                    if space.dist(i, k) <= r && space.dist(j, k) <= r {
                        triangles.push((i, j, k));
                    }
                }
            }
        }
    }
    Ok(VRComplex {
        scale: r,
        max_dim,
        vertices: n,
        edges,
        triangles,
    })
}

/// Component labeling of the VR 1-skeleton at scale r.
pub fn components(space: &FiniteMetricSpace, r: f64) -> Result<(Vec<usize>, usize), CoarseError> {
    components_of_subset(space, &(0..space.len()).collect::<Vec<_>>(), r)
}

fn components_of_subset(
    space: &FiniteMetricSpace,
    subset: &[usize],
    r: f64,
) -> Result<(Vec<usize>, usize), CoarseError> {
    if r < 0.0 {
        return Err(CoarseError::NegativeScale);
    }
    let mut uf = UnionFind::new(subset.len());
    for (a, &i) in subset.iter().enumerate() {
        for (b, &j) in subset.iter().enumerate().skip(a + 1) {
            if space.dist(i, j) <= r {
                uf.union(a, b);
            }
        }
    }
    Ok(uf.labeling())
}

/// How an induced map on components behaves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MapClass {
    /// image is a single component
    Trivial,
    /// injective but not constant
    Injective,
    Neither,
}

/// The map pi0(VR_r) -> pi0(VR_s) induced by inclusion, r <= s.
#[derive(Clone, Debug, Serialize)]
pub struct ComponentMap {
    pub source_count: usize,
    pub target_count: usize,
    /// component id at scale r -> component id at scale s
    pub map: Vec<usize>,
    pub class: MapClass,
}

fn classify_map(map: &[usize]) -> MapClass {
    let mut image = map.to_vec();
    image.sort_unstable();
    image.dedup();
    if image.len() <= 1 {
        MapClass::Trivial
    } else if image.len() == map.len() {
        MapClass::Injective
    } else {
        MapClass::Neither
    }
}

pub fn component_map(
    space: &FiniteMetricSpace,
    r: f64,
    s: f64,
) -> Result<ComponentMap, CoarseError> {
    if r > s {
        return Err(CoarseError::BadScales);
    }
    let (at_r, count_r) = components(space, r)?;
    let (at_s, count_s) = components(space, s)?;
    let mut map = vec![usize::MAX; count_r];
    for i in 0..space.len() {
        map[at_r[i]] = at_s[i];
    }
    let class = classify_map(&map);
    Ok(ComponentMap {
        source_count: count_r,
        target_count: count_s,
        map,
        class,
    })
}

// --- F2 linear algebra on boundary matrices ---

/// Rank over F2 of a sparse 0/1 matrix given as rows of column indices.
fn f2_rank(rows: &[Vec<usize>], cols: usize) -> usize {
    let words = cols.div_ceil(64);
    let mut basis: Vec<Vec<u64>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    let mut rank = 0;
    for row in rows {
        let mut bits = vec![0u64; words];
        for &c in row {
            bits[c / 64] ^= 1u64 << (c % 64);
        }
        while let Some(lead) = bits
            .iter()
            .enumerate()
            .find_map(|(w, &x)| (x != 0).then(|| w * 64 + x.trailing_zeros() as usize))
        {
            if let Some(pos) = pivots.iter().position(|&p| p == lead) {
                for (b, r) in bits.iter_mut().zip(&basis[pos]) {
                    *b ^= r;
                }
            } else {
                pivots.push(lead);
                basis.push(bits);
                rank += 1;
                break;
            }
        }
    }
    rank
}

/// Rank of the edge boundary matrix over F2.
pub fn rank_d1(complex: &VRComplex) -> usize {
    let rows: Vec<Vec<usize>> = complex.edges.iter().map(|&(i, j)| vec![i, j]).collect();
    f2_rank(&rows, complex.vertices)
}

/// dim H1(complex; F2) = dim ker d1 - rank d2.
pub fn h1_rank(complex: &VRComplex) -> usize {
    let edge_index: HashMap<(usize, usize), usize> = complex
        .edges
        .iter()
        .copied()
        .enumerate()
        .map(|(k, e)| (e, k))
        .collect();
    let d1_rank = rank_d1(complex);
    let cycle_dim = complex.edges.len() - d1_rank;
    let d2_rows: Vec<Vec<usize>> = complex
        .triangles
        .iter()
        .map(|&(i, j, k)| {
            vec![edge_index[&(i, j)], edge_index[&(i, k)], edge_index[&(j, k)]]
        })
        .collect();
    let d2_rank = f2_rank(&d2_rows, complex.edges.len());
    cycle_dim - d2_rank
}

/// Point set A x B with the max metric.
pub fn product_space(a: &FiniteMetricSpace, b: &FiniteMetricSpace) -> FiniteMetricSpace {
    a.product(b)
}

// --- weighted Cayley metric ---

/// Shortest weighted word length between two elements of an abelian
/// group of rationals, where a step by a generator first appearing in
/// stage l costs l. Uniform-cost search, capped by a cost budget.
pub fn weighted_cayley_distance(
    stages: &[Vec<Rational>],
    g: &Rational,
    h: &Rational,
    budget: u64,
) -> Result<u64, CoarseError> {
    // stage l (1-based) contributes the generators not already present
    let mut steps: Vec<(Rational, u64)> = Vec::new();
    let mut seen: Vec<Rational> = Vec::new();
    for (idx, stage) in stages.iter().enumerate() {
        for gen in stage {
            if gen.is_zero() {
                return Err(CoarseError::BadStages);
            }
            if !stage.iter().any(|other| *other == -gen) {
                return Err(CoarseError::BadStages);
            }
        }
        if idx > 0 {
            for prev in &stages[idx - 1] {
                if !stage.iter().any(|g| g == prev) {
                    return Err(CoarseError::BadStages);
                }
            }
        }
        for gen in stage {
            if !seen.contains(gen) {
                seen.push(gen.clone());
                steps.push((gen.clone(), (idx + 1) as u64));
            }
        }
    }
    let target = h - g;
    let zero = Rational::zero();
    let mut best: HashMap<Rational, u64> = HashMap::new();
    let mut heap: BinaryHeap<(std::cmp::Reverse<u64>, Rational)> = BinaryHeap::new();
    best.insert(zero.clone(), 0);
    heap.push((std::cmp::Reverse(0), zero));
    let mut frontier_low = 0u64;
    while let Some((std::cmp::Reverse(cost), point)) = heap.pop() {
        if best.get(&point).is_some_and(|&c| c < cost) {
            continue;
        }
        if point == target {
            return Ok(cost);
        }
        frontier_low = cost;
        for (gen, w) in &steps {
            let next_cost = cost + w;
            if next_cost > budget {
                continue;
            }
            let next = &point + gen;
            if best.get(&next).is_none_or(|&c| next_cost < c) {
                best.insert(next.clone(), next_cost);
                heap.push((std::cmp::Reverse(next_cost), next));
            }
        }
    }
    Err(CoarseError::BudgetExceeded {
        lower_bound: frontier_low,
    })
}

// --- filtration probes ---

/// Per-scale component data along a scale schedule, with the induced
/// maps between consecutive scales.
///
/// A finite schedule can only give evidence about the essential
/// triviality of the full filtration, never decide it; the summary
/// wording keeps that explicit.
#[derive(Clone, Debug, Serialize)]
pub struct ScaleProbe {
    pub schedule: Vec<f64>,
    pub component_counts: Vec<usize>,
    pub steps: Vec<MapClass>,
    /// every scheduled stage maps trivially into some later stage
    pub trivial_within_schedule: bool,
    /// "trivial up to scale R" or "persistent obstruction up to scale R"
    pub summary: String,
}

pub fn probe_schedule(
    space: &FiniteMetricSpace,
    schedule: &[f64],
) -> Result<ScaleProbe, CoarseError> {
    if schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CoarseError::BadScales);
    }
    let mut counts = Vec::new();
    for &r in schedule {
        counts.push(components(space, r)?.1);
    }
    let mut steps = Vec::new();
    for w in schedule.windows(2) {
        steps.push(component_map(space, w[0], w[1])?.class);
    }
    let mut trivial = true;
    for (i, &r) in schedule.iter().enumerate() {
        let absorbed = schedule[i..]
            .iter()
            .any(|&s| component_map(space, r, s).map(|m| m.class == MapClass::Trivial) == Ok(true));
        trivial &= absorbed;
    }
    let top = schedule.last().copied().unwrap_or(0.0);
    let summary = if trivial {
        format!("trivial up to scale {top}")
    } else {
        format!("persistent obstruction up to scale {top}")
    };
    Ok(ScaleProbe {
        schedule: schedule.to_vec(),
        component_counts: counts,
        steps,
        trivial_within_schedule: trivial,
        summary,
    })
}

/// Verdict of comparing two ascending filtrations of subsets of a common
/// point list.
#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceVerdict {
    pub interleaved: bool,
    /// for each stage of A, the least index of a stage of B containing it
    pub a_into_b: Vec<Option<usize>>,
    pub b_into_a: Vec<Option<usize>>,
    /// triviality of the step maps of A and of B at aligned indices,
    /// at the probing scale
    pub aligned_steps: Vec<(MapClass, MapClass)>,
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.contains(x))
}

/// Mutual-interleaving check plus matched component-map verdicts at a
/// fixed probing scale.
pub fn filtration_equivalence_probe(
    space: &FiniteMetricSpace,
    fa: &[Vec<usize>],
    fb: &[Vec<usize>],
    r: f64,
) -> Result<EquivalenceVerdict, CoarseError> {
    let a_into_b: Vec<Option<usize>> = fa
        .iter()
        .map(|a| fb.iter().position(|b| is_subset(a, b)))
        .collect();
    let b_into_a: Vec<Option<usize>> = fb
        .iter()
        .map(|b| fa.iter().position(|a| is_subset(b, a)))
        .collect();
    let interleaved =
        a_into_b.iter().all(Option::is_some) && b_into_a.iter().all(Option::is_some);
    let mut aligned_steps = Vec::new();
    if interleaved {
        let subset_step = |cur: &[usize], next: &[usize]| -> Result<MapClass, CoarseError> {
            let (cur_labels, cur_count) = components_of_subset(space, cur, r)?;
            let (next_labels, _) = components_of_subset(space, next, r)?;
            let mut map = vec![usize::MAX; cur_count];
            for (pos, &pt) in cur.iter().enumerate() {
                let target_pos = next.iter().position(|&q| q == pt).expect("ascending");
                map[cur_labels[pos]] = next_labels[target_pos];
            }
            Ok(classify_map(&map))
        };
        for (i, j) in a_into_b.iter().map(|x| x.unwrap()).enumerate() {
            if i + 1 < fa.len() && j + 1 < fb.len() {
                aligned_steps.push((
                    subset_step(&fa[i], &fa[i + 1])?,
                    subset_step(&fb[j], &fb[j + 1])?,
                ));
            }
        }
    }
    Ok(EquivalenceVerdict {
        interleaved,
        a_into_b,
        b_into_a,
        aligned_steps,
    })
}
