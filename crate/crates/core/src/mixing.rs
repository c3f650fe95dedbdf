//! Pseudo-randomness statistics: neighborhood variance, edge discrepancy,
//! and exact counts of colored stars and colored pattern copies.
//!
//! The two inequalities certified here, for an n-vertex graph of valency d
//! whose nontrivial eigenvalues are bounded by λ:
//!
//!   Σ_{v∈V} (|N_B(v)| − (d/n)|B|)²  ≤  (λ²/n)|B|(n−|B|)
//!   |e(B,C) − (d/n)|B||C||          ≤  λ√(|B||C|)
//!
//! where e(B,C) counts ordered pairs. Counting routines work over any
//! [`Coloring`] whose classes are regular; stars use the identity
//! Σ_{v∈E_0} Π_i |N^{r_i}_{E_i}(v)| and copies use pruned backtracking over
//! an explicit pattern graph. All counts are ordered-tuple counts: carrier
//! vertices may coincide unless the pattern joins them by an edge.

use crate::graph::{EuclideanGraph, NormColoring};
use crate::rng::SplitMix64;
use crate::{Caps, Count};
use rayon::prelude::*;
use serde::Serialize;
use std::sync::atomic::{AtomicU64, Ordering};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MixingError {
    #[error("vertex {v} is out of range (n = {n})")]
    VertexOutOfRange { v: u32, n: usize },
    #[error("color {c} is out of range ({count} colors)")]
    ColorOutOfRange { c: usize, count: usize },
    #[error("need one leaf set per star color: {sets} sets vs {colors} colors")]
    StarShape { sets: usize, colors: usize },
    #[error("pattern edge ({i},{j}) is not i < j < s = {s}")]
    BadEdge { i: usize, j: usize, s: usize },
    #[error("pattern has duplicate edge ({i},{j})")]
    DuplicateEdge { i: usize, j: usize },
    #[error("need one carrier set per pattern vertex: {sets} sets vs s = {s}")]
    CarrierShape { sets: usize, s: usize },
    #[error("work cap {cap} exhausted after {spent} tuple tests; use the sampled mode")]
    WorkCap { spent: u64, cap: u64 },
}

/// Plain bit set over vertex indices.
#[derive(Debug, Clone)]
pub struct BitSet {
    words: Vec<u64>,
    len: usize,
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        BitSet { words: vec![0; (len + 63) / 64], len }
    }

    pub fn from_members(members: &[u32], len: usize) -> Self {
        let mut b = BitSet::new(len);
        for &m in members {
            b.set(m as usize);
        }
        b
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }
}

/// A set of vertices, stored as sorted distinct indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VertexSet {
    pub members: Vec<u32>,
}

impl VertexSet {
    pub fn new(mut members: Vec<u32>) -> Self {
        members.sort_unstable();
        members.dedup();
        VertexSet { members }
    }

    pub fn full(n: usize) -> Self {
        VertexSet { members: (0..n as u32).collect() }
    }

    pub fn random(n: usize, size: usize, rng: &mut SplitMix64) -> Self {
        VertexSet { members: rng.subset(n as u64, size) }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn bitset(&self, n: usize) -> BitSet {
        BitSet::from_members(&self.members, n)
    }

    fn check(&self, n: usize) -> Result<(), MixingError> {
        match self.members.last() {
            Some(&v) if v as usize >= n => Err(MixingError::VertexOutOfRange { v, n }),
            _ => Ok(()),
        }
    }
}

/// A regular graph that can count neighbors inside a vertex set, with a
/// certified bound on its nontrivial eigenvalues.
pub trait RegularGraph: Sync {
    fn n(&self) -> usize;
    fn valency(&self) -> u64;
    /// Certified bound λ on |nontrivial eigenvalues|.
    fn lambda(&self) -> f64;
    fn count_neighbors_in(&self, v: usize, set: &BitSet) -> u64;
}

impl RegularGraph for EuclideanGraph {
    fn n(&self) -> usize {
        EuclideanGraph::n(self) as usize
    }

    fn valency(&self) -> u64 {
        EuclideanGraph::valency(self)
    }

    fn lambda(&self) -> f64 {
        self.lambda_bound()
    }

    fn count_neighbors_in(&self, v: usize, set: &BitSet) -> u64 {
        let mut cnt = 0;
        self.for_each_neighbor(v as u64, |w| {
            if set.contains(w as usize) {
                cnt += 1;
            }
        });
        cnt
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VarianceReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Σ_{v∈V} (|N_B(v)| − (d/n)|B|)² against (λ²/n)|B|(n−|B|).
pub fn neighborhood_variance(g: &impl RegularGraph, b: &VertexSet) -> Result<VarianceReport, MixingError> {
    b.check(g.n())?;
    let n = g.n() as f64;
    let mean = g.valency() as f64 / n * b.len() as f64;
    let mask = b.bitset(g.n());
    let lhs: f64 = (0..g.n())
        .map(|v| {
            let dev = g.count_neighbors_in(v, &mask) as f64 - mean;
            dev * dev
        })
        .sum();
    let lam = g.lambda();
    let rhs = lam * lam / n * b.len() as f64 * (n - b.len() as f64);
    Ok(VarianceReport { lhs, rhs, holds: lhs <= rhs * (1.0 + 1e-12) + 1e-9 })
}

#[derive(Debug, Clone, Serialize)]
pub struct DiscrepancyReport {
    pub edges: Count,
    pub expected: f64,
    pub deviation: f64,
    pub bound: f64,
    pub holds: bool,
}

/// e(B,C) over ordered pairs against (d/n)|B||C| ± λ√(|B||C|).
pub fn edge_discrepancy(
    g: &impl RegularGraph,
    b: &VertexSet,
    c: &VertexSet,
) -> Result<DiscrepancyReport, MixingError> {
    b.check(g.n())?;
    c.check(g.n())?;
    let cmask = c.bitset(g.n());
    let edges: u64 = b.members.iter().map(|&u| g.count_neighbors_in(u as usize, &cmask)).sum();
    let n = g.n() as f64;
    let expected = g.valency() as f64 / n * b.len() as f64 * c.len() as f64;
    let deviation = (edges as f64 - expected).abs();
    let bound = g.lambda() * (b.len() as f64 * c.len() as f64).sqrt();
    Ok(DiscrepancyReport {
        edges: Count(edges as u128),
        expected,
        deviation,
        bound,
        holds: deviation <= bound * (1.0 + 1e-12) + 1e-9,
    })
}

/// An edge coloring of the complete graph on n vertices whose color classes
/// are regular.
pub trait Coloring: Sync {
    fn n(&self) -> usize;
    fn color_count(&self) -> usize;
    /// Color of the pair {u, v}, u ≠ v.
    fn color(&self, u: usize, v: usize) -> usize;
    /// Exact valency of a color class.
    fn color_valency(&self, c: usize) -> u64;
    /// Mean class valency (n−1)/colors: the d in predicted counts.
    fn nominal_valency(&self) -> f64;
    /// Certified eigenvalue bound shared by every class.
    fn lambda_bound(&self) -> f64;
}

impl Coloring for NormColoring {
    fn n(&self) -> usize {
        NormColoring::n(self)
    }

    fn color_count(&self) -> usize {
        NormColoring::color_count(self)
    }

    fn color(&self, u: usize, v: usize) -> usize {
        NormColoring::color(self, u, v)
    }

    fn color_valency(&self, c: usize) -> u64 {
        NormColoring::color_valency(self, c)
    }

    fn nominal_valency(&self) -> f64 {
        NormColoring::nominal_valency(self)
    }

    fn lambda_bound(&self) -> f64 {
        NormColoring::lambda_bound(self)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CountReport {
    pub exact_count: Count,
    /// Π|E_i| · (d/n)^{edges} with d the nominal valency.
    pub predicted: f64,
    pub relative_deviation: f64,
    /// Whether the counting theorem's size hypotheses hold at constant 1.
    pub hypothesis_satisfied: bool,
    /// Smallest lhs/rhs ratio over the hypothesis constraints.
    pub hypothesis_ratio: f64,
}

fn finish_report(exact: u128, predicted: f64, ratio: f64) -> CountReport {
    let relative_deviation = if predicted > 0.0 {
        (exact as f64 - predicted).abs() / predicted
    } else if exact == 0 {
        0.0
    } else {
        f64::INFINITY
    };
    CountReport {
        exact_count: Count(exact),
        predicted,
        relative_deviation,
        hypothesis_satisfied: ratio >= 1.0,
        hypothesis_ratio: ratio,
    }
}

fn check_colors(coloring: &impl Coloring, colors: &[usize]) -> Result<(), MixingError> {
    for &c in colors {
        if c >= coloring.color_count() {
            return Err(MixingError::ColorOutOfRange { c, count: coloring.color_count() });
        }
    }
    Ok(())
}

/// Number of stars with center in `center`, leaf i in `leaves[i]`, and the
/// center-to-leaf-i pair colored `colors[i]`. Leaves are ordered and may
/// coincide when their colors agree; the identity behind the count is
/// exact = Σ_{v∈E_0} Π_i |N^{r_i}_{E_i}(v)|.
pub fn count_colored_stars(
    coloring: &impl Coloring,
    center: &VertexSet,
    leaves: &[VertexSet],
    colors: &[usize],
    caps: &Caps,
) -> Result<CountReport, MixingError> {
    let per_center = star_counts_per_center(coloring, center, leaves, colors, caps)?;
    let exact: u128 = per_center.iter().sum();
    let n = coloring.n() as f64;
    let k = colors.len();
    let density = coloring.nominal_valency() / n;
    let mut predicted = center.len() as f64 * density.powi(k as i32);
    for set in leaves {
        predicted *= set.len() as f64;
    }
    let ratio = star_hypothesis_ratio(coloring, center, leaves);
    Ok(finish_report(exact, predicted, ratio))
}

/// Per-center star counts Π_i |N^{r_i}_{E_i}(v)|, in `center` order.
pub fn star_counts_per_center(
    coloring: &impl Coloring,
    center: &VertexSet,
    leaves: &[VertexSet],
    colors: &[usize],
    caps: &Caps,
) -> Result<Vec<u128>, MixingError> {
    if leaves.len() != colors.len() || colors.is_empty() {
        return Err(MixingError::StarShape { sets: leaves.len(), colors: colors.len() });
    }
    check_colors(coloring, colors)?;
    center.check(coloring.n())?;
    for l in leaves {
        l.check(coloring.n())?;
    }
    let work: u64 =
        center.len() as u64 * leaves.iter().map(|l| l.len() as u64).sum::<u64>();
    if work > caps.work {
        return Err(MixingError::WorkCap { spent: work, cap: caps.work });
    }
    Ok(center
        .members
        .par_iter()
        .map(|&v| {
            let v = v as usize;
            let mut prod: u128 = 1;
            for (set, &c) in leaves.iter().zip(colors) {
                let cnt = set
                    .members
                    .iter()
                    .filter(|&&u| u as usize != v && coloring.color(v, u as usize) == c)
                    .count();
                prod *= cnt as u128;
                if prod == 0 {
                    break;
                }
            }
            prod
        })
        .collect())
}

/// Smallest ratio over the star-counting hypotheses, at constant 1:
/// |E_0|²·Π_{i∈I}|E_i| ≥ ((n/d)λ)^{2|I|} for every I with |I| ≥ 2, and
/// |E_0||E_i| ≥ ((n/d)λ)² for every i.
fn star_hypothesis_ratio(coloring: &impl Coloring, center: &VertexSet, leaves: &[VertexSet]) -> f64 {
    let n = coloring.n() as f64;
    let scale = n / coloring.nominal_valency() * coloring.lambda_bound();
    let e0 = center.len() as f64;
    let mut min_ratio = f64::INFINITY;
    for mask in 0u32..1 << leaves.len() {
        let size = mask.count_ones();
        if size < 2 {
            continue;
        }
        let mut lhs = e0 * e0;
        for (i, set) in leaves.iter().enumerate() {
            if mask >> i & 1 == 1 {
                lhs *= set.len() as f64;
            }
        }
        min_ratio = min_ratio.min(lhs / scale.powi(2 * size as i32));
    }
    for set in leaves {
        min_ratio = min_ratio.min(e0 * set.len() as f64 / (scale * scale));
    }
    min_ratio
}

/// A pattern: s vertices, edges (i, j, color) with i < j, at most one edge
/// per pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PatternGraph {
    pub s: usize,
    pub edges: Vec<(usize, usize, usize)>,
}

impl PatternGraph {
    pub fn new(s: usize, edges: Vec<(usize, usize, usize)>) -> Result<Self, MixingError> {
        let mut seen = std::collections::BTreeSet::new();
        for &(i, j, _) in &edges {
            if !(i < j && j < s) {
                return Err(MixingError::BadEdge { i, j, s });
            }
            if !seen.insert((i, j)) {
                return Err(MixingError::DuplicateEdge { i, j });
            }
        }
        Ok(PatternGraph { s, edges })
    }

    /// The k-star with the given leaf colors: center 0, leaf i at vertex i+1.
    pub fn star(colors: &[usize]) -> Self {
        PatternGraph {
            s: colors.len() + 1,
            edges: colors.iter().enumerate().map(|(i, &c)| (0, i + 1, c)).collect(),
        }
    }

    /// The complete pattern on s vertices; `colors[e]` in the order
    /// (0,1), (0,2), .., (0,s−1), (1,2), ...
    pub fn complete(s: usize, colors: &[usize]) -> Self {
        assert_eq!(colors.len(), s * (s - 1) / 2);
        let mut edges = Vec::new();
        let mut e = 0;
        for i in 0..s {
            for j in i + 1..s {
                edges.push((i, j, colors[e]));
                e += 1;
            }
        }
        PatternGraph { s, edges }
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.s];
        for &(i, j, _) in &self.edges {
            deg[i] += 1;
            deg[j] += 1;
        }
        deg
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    /// Color-preserving automorphism count, by brute force over the s!
    /// vertex permutations (patterns here are tiny).
    pub fn automorphisms(&self) -> u64 {
        let mut edge_set = std::collections::BTreeSet::new();
        for &(i, j, c) in &self.edges {
            edge_set.insert((i, j, c));
        }
        let mut perm: Vec<usize> = (0..self.s).collect();
        let mut count = 0u64;
        loop {
            let ok = self.edges.iter().all(|&(i, j, c)| {
                let (a, b) = (perm[i].min(perm[j]), perm[i].max(perm[j]));
                edge_set.contains(&(a, b, c))
            });
            if ok {
                count += 1;
            }
            if !next_permutation(&mut perm) {
                break;
            }
        }
        count
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let Some(i) = (0..n - 1).rev().find(|&i| p[i] < p[i + 1]) else {
        return false;
    };
    let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).unwrap();
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

/// Exact number of tuples (x_0..x_{s−1}) with x_v ∈ sets[v] and, for every
/// pattern edge (i,j,c), x_i ≠ x_j and color(x_i,x_j) = c. Backtracking
/// assigns vertices in decreasing pattern degree; the work counter charges
/// one unit per candidate inspected and errors past the cap.
pub fn count_colored_copies(
    coloring: &impl Coloring,
    pattern: &PatternGraph,
    sets: &[VertexSet],
    caps: &Caps,
) -> Result<CountReport, MixingError> {
    if sets.len() != pattern.s {
        return Err(MixingError::CarrierShape { sets: sets.len(), s: pattern.s });
    }
    check_colors(coloring, &pattern.edges.iter().map(|&(_, _, c)| c).collect::<Vec<_>>())?;
    for s in sets {
        s.check(coloring.n())?;
    }

    // Assignment order: decreasing degree, ties by index.
    let mut order: Vec<usize> = (0..pattern.s).collect();
    let deg = pattern.degrees();
    order.sort_by_key(|&v| (std::cmp::Reverse(deg[v]), v));
    let pos_of: Vec<usize> = {
        let mut p = vec![0; pattern.s];
        for (t, &v) in order.iter().enumerate() {
            p[v] = t;
        }
        p
    };
    // For the vertex at order position t: constraints against already
    // placed pattern neighbors, as (earlier position, color).
    let mut constraints: Vec<Vec<(usize, usize)>> = vec![Vec::new(); pattern.s];
    for &(i, j, c) in &pattern.edges {
        let (pi, pj) = (pos_of[i], pos_of[j]);
        let (early, late) = (pi.min(pj), pi.max(pj));
        constraints[late].push((early, c));
    }

    let work = AtomicU64::new(0);
    let exact = if pattern.s == 0 {
        1u128
    } else {
        let first = &sets[order[0]];
        work.fetch_add(first.len() as u64, Ordering::Relaxed);
        let sub: Result<Vec<u128>, MixingError> = first
            .members
            .par_iter()
            .map(|&x0| {
                let mut assigned = vec![0u32; pattern.s];
                assigned[0] = x0;
                descend(coloring, sets, &order, &constraints, &mut assigned, 1, caps, &work)
            })
            .collect();
        sub?.into_iter().sum()
    };

    let n = coloring.n() as f64;
    let density = coloring.nominal_valency() / n;
    let mut predicted = density.powi(pattern.edges.len() as i32);
    for set in sets {
        predicted *= set.len() as f64;
    }
    // Theorem hypothesis for copy counts: |E_i| ≥ λ(n/d)^Δ for every carrier.
    let scale = coloring.lambda_bound()
        * (n / coloring.nominal_valency()).powi(pattern.max_degree() as i32);
    let ratio = sets
        .iter()
        .map(|s| s.len() as f64 / scale)
        .fold(f64::INFINITY, f64::min);
    Ok(finish_report(exact, predicted, ratio))
}

#[allow(clippy::too_many_arguments)]
fn descend(
    coloring: &impl Coloring,
    sets: &[VertexSet],
    order: &[usize],
    constraints: &[Vec<(usize, usize)>],
    assigned: &mut Vec<u32>,
    t: usize,
    caps: &Caps,
    work: &AtomicU64,
) -> Result<u128, MixingError> {
    if t == order.len() {
        return Ok(1);
    }
    let set = &sets[order[t]];
    let spent = work.fetch_add(set.len() as u64, Ordering::Relaxed) + set.len() as u64;
    if spent > caps.work {
        return Err(MixingError::WorkCap { spent, cap: caps.work });
    }
    let cons = &constraints[t];
    let mut total = 0u128;
    'cand: for &x in &set.members {
        for &(early, c) in cons {
            let placed = assigned[early];
            if placed == x || coloring.color(placed as usize, x as usize) != c {
                continue 'cand;
            }
        }
        assigned[t] = x;
        total += descend(coloring, sets, order, constraints, assigned, t + 1, caps, work)?;
    }
    Ok(total)
}

#[derive(Debug, Clone, Serialize)]
pub struct SampledCount {
    pub estimate: f64,
    pub std_error: f64,
    pub hits: Count,
    pub samples: Count,
    pub workers: usize,
    pub seed: u64,
}

/// Unbiased estimate of the copy count from uniform tuple samples: each
/// worker draws from its own substream, so the result depends only on
/// (seed, workers, samples).
pub fn sample_colored_copies(
    coloring: &impl Coloring,
    pattern: &PatternGraph,
    sets: &[VertexSet],
    samples: u64,
    seed: u64,
    workers: usize,
) -> Result<SampledCount, MixingError> {
    if sets.len() != pattern.s {
        return Err(MixingError::CarrierShape { sets: sets.len(), s: pattern.s });
    }
    for s in sets {
        s.check(coloring.n())?;
        if s.is_empty() {
            return Ok(SampledCount {
                estimate: 0.0,
                std_error: 0.0,
                hits: Count(0),
                samples: Count(samples as u128),
                workers,
                seed,
            });
        }
    }
    let workers = workers.max(1);
    let shares: Vec<u64> =
        (0..workers as u64).map(|w| samples / workers as u64 + u64::from(w < samples % workers as u64)).collect();
    let hits: u64 = shares
        .par_iter()
        .enumerate()
        .map(|(w, &share)| {
            let mut rng = SplitMix64::substream(seed, w as u64);
            let mut hit = 0u64;
            let mut tuple = vec![0u32; pattern.s];
            for _ in 0..share {
                for (v, set) in sets.iter().enumerate() {
                    tuple[v] = set.members[rng.below(set.members.len() as u64) as usize];
                }
                let ok = pattern.edges.iter().all(|&(i, j, c)| {
                    tuple[i] != tuple[j]
                        && coloring.color(tuple[i] as usize, tuple[j] as usize) == c
                });
                if ok {
                    hit += 1;
                }
            }
            hit
        })
        .sum();
    let space: f64 = sets.iter().map(|s| s.len() as f64).product();
    let p = hits as f64 / samples as f64;
    Ok(SampledCount {
        estimate: p * space,
        std_error: (p * (1.0 - p) / samples as f64).sqrt() * space,
        hits: Count(hits as u128),
        samples: Count(samples as u128),
        workers,
        seed,
    })
}

/// Copies divided by the pattern's automorphism count. Only approximate
/// when carrier sets overlap, since a tuple's automorphic images need not
/// stay inside the carriers; documented convenience, not used by any check.
pub fn copies_up_to_automorphism(report: &CountReport, pattern: &PatternGraph) -> f64 {
    report.exact_count.0 as f64 / pattern.automorphisms() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::geometry::Space;
    use crate::graph::build_graph;

    fn coloring(q: u64, d: usize) -> NormColoring {
        let space = Space::new(Field::new(q, 1).unwrap(), d).unwrap();
        NormColoring::new(&space, &Caps::default()).unwrap()
    }

    // Oracle: stars and copies by plain nested loops, no pruning.
    fn naive_star_count(
        col: &NormColoring,
        center: &VertexSet,
        leaves: &[VertexSet],
        colors: &[usize],
    ) -> u128 {
        let mut total = 0u128;
        for &v in &center.members {
            let mut prod = 1u128;
            for (set, &c) in leaves.iter().zip(colors) {
                prod *= set
                    .members
                    .iter()
                    .filter(|&&u| u != v && col.color(v as usize, u as usize) == c)
                    .count() as u128;
            }
            total += prod;
        }
        total
    }

    fn naive_copy_count(col: &NormColoring, pattern: &PatternGraph, sets: &[VertexSet]) -> u128 {
        fn rec(
            col: &NormColoring,
            pattern: &PatternGraph,
            sets: &[VertexSet],
            tuple: &mut Vec<u32>,
        ) -> u128 {
            let v = tuple.len();
            if v == pattern.s {
                let ok = pattern.edges.iter().all(|&(i, j, c)| {
                    tuple[i] != tuple[j]
                        && col.color(tuple[i] as usize, tuple[j] as usize) == c
                });
                return ok as u128;
            }
            let mut t = 0;
            for &x in &sets[v].members {
                tuple.push(x);
                t += rec(col, pattern, sets, tuple);
                tuple.pop();
            }
            t
        }
        rec(col, pattern, sets, &mut Vec::new())
    }

    #[test]
    fn variance_and_discrepancy_hold_on_seeded_subsets() {
        let caps = Caps::default();
        for (q, d) in [(3u64, 2usize), (5, 2)] {
            let space = Space::new(Field::new(q, 1).unwrap(), d).unwrap();
            let mut rng = SplitMix64::new(101);
            for a in 0..q {
                let g = build_graph(&space, a, &caps).unwrap();
                for _ in 0..20 {
                    let b = VertexSet::random(
                        g.n() as usize,
                        1 + rng.below(g.n() - 1) as usize,
                        &mut rng,
                    );
                    let c = VertexSet::random(
                        g.n() as usize,
                        1 + rng.below(g.n() - 1) as usize,
                        &mut rng,
                    );
                    assert!(neighborhood_variance(&g, &b).unwrap().holds, "q={q} d={d} a={a}");
                    assert!(edge_discrepancy(&g, &b, &c).unwrap().holds, "q={q} d={d} a={a}");
                }
            }
        }
    }

    #[test]
    fn variance_is_zero_on_the_full_set() {
        let space = Space::new(Field::new(3, 1).unwrap(), 2).unwrap();
        let g = build_graph(&space, 1, &Caps::default()).unwrap();
        let rep = neighborhood_variance(&g, &VertexSet::full(9)).unwrap();
        assert_eq!(rep.lhs, 0.0);
        assert!(rep.holds);
    }

    #[test]
    fn discrepancy_counts_ordered_pairs_exactly() {
        let col = coloring(3, 2);
        let space = Space::new(Field::new(3, 1).unwrap(), 2).unwrap();
        let g = build_graph(&space, 1, &Caps::default()).unwrap();
        let b = VertexSet::new(vec![0, 1, 2, 3]);
        let c = VertexSet::new(vec![2, 3, 4, 5, 6]);
        let rep = edge_discrepancy(&g, &b, &c).unwrap();
        // Independent count through the copies machinery: a single edge.
        let pat = PatternGraph::new(2, vec![(0, 1, 1)]).unwrap();
        let copies =
            count_colored_copies(&col, &pat, &[b, c], &Caps::default()).unwrap();
        assert_eq!(rep.edges, copies.exact_count);
    }

    #[test]
    fn full_space_star_count_is_the_analytic_identity() {
        for (q, d, colors) in [(3u64, 2usize, vec![1usize, 2]), (3, 3, vec![1, 1, 2])] {
            let col = coloring(q, d);
            let n = col.n();
            let full = VertexSet::full(n);
            let leaves = vec![full.clone(); colors.len()];
            let rep =
                count_colored_stars(&col, &full, &leaves, &colors, &Caps::default()).unwrap();
            let expect: u128 = colors
                .iter()
                .fold(n as u128, |acc, &c| acc * col.color_valency(c) as u128);
            assert_eq!(rep.exact_count.0, expect, "q={q} d={d}");
        }
    }

    #[test]
    fn stars_and_copies_match_the_naive_oracle() {
        let col = coloring(3, 2);
        let mut rng = SplitMix64::new(7);
        for trial in 0..30 {
            let k = 1 + (trial % 3) as usize;
            let colors: Vec<usize> = (0..k).map(|_| rng.below(3) as usize).collect();
            let center = VertexSet::random(9, 1 + rng.below(8) as usize, &mut rng);
            let leaves: Vec<VertexSet> = (0..k)
                .map(|_| VertexSet::random(9, 1 + rng.below(8) as usize, &mut rng))
                .collect();
            let stars =
                count_colored_stars(&col, &center, &leaves, &colors, &Caps::default()).unwrap();
            let oracle = naive_star_count(&col, &center, &leaves, &colors);
            assert_eq!(stars.exact_count.0, oracle, "trial {trial}");

            let mut sets = vec![center];
            sets.extend(leaves);
            let pat = PatternGraph::star(&colors);
            let copies = count_colored_copies(&col, &pat, &sets, &Caps::default()).unwrap();
            assert_eq!(copies.exact_count.0, oracle, "trial {trial}");
        }
    }

    #[test]
    fn copies_match_oracle_on_triangle_patterns() {
        let col = coloring(5, 2);
        let mut rng = SplitMix64::new(99);
        for trial in 0..10 {
            let colors: Vec<usize> = (0..3).map(|_| rng.below(5) as usize).collect();
            let pat = PatternGraph::complete(3, &colors);
            let sets: Vec<VertexSet> = (0..3)
                .map(|_| VertexSet::random(25, 4 + rng.below(10) as usize, &mut rng))
                .collect();
            let fast = count_colored_copies(&col, &pat, &sets, &Caps::default()).unwrap();
            let slow = naive_copy_count(&col, &pat, &sets);
            assert_eq!(fast.exact_count.0, slow, "trial {trial} colors {colors:?}");
        }
    }

    #[test]
    fn adjacent_pattern_vertices_must_differ() {
        // A monochromatic triangle in color 0 at q=3,d=2: color 0 has
        // valency 0, so no triangles; without the x_i != x_j rule the
        // degenerate triple (x,x,x) would sneak in via color(x,x) = 0.
        let col = coloring(3, 2);
        let pat = PatternGraph::complete(3, &[0, 0, 0]);
        let full = VertexSet::full(9);
        let rep =
            count_colored_copies(&col, &pat, &[full.clone(), full.clone(), full], &Caps::default())
                .unwrap();
        assert_eq!(rep.exact_count.0, 0);
    }

    #[test]
    fn sampling_agrees_with_exact_on_a_dense_instance() {
        let col = coloring(3, 2);
        let pat = PatternGraph::star(&[1, 2]);
        let sets: Vec<VertexSet> = vec![VertexSet::full(9); 3];
        let exact = count_colored_copies(&col, &pat, &sets, &Caps::default()).unwrap();
        let sampled = sample_colored_copies(&col, &pat, &sets, 200_000, 5, 4).unwrap();
        let err = (sampled.estimate - exact.exact_count.0 as f64).abs();
        assert!(err <= 5.0 * sampled.std_error + 1e-9, "err {err} se {}", sampled.std_error);
        // Same seed, same workers: identical result.
        let again = sample_colored_copies(&col, &pat, &sets, 200_000, 5, 4).unwrap();
        assert_eq!(sampled.hits, again.hits);
    }

    #[test]
    fn work_cap_trips() {
        let col = coloring(3, 2);
        let pat = PatternGraph::star(&[1, 1, 1]);
        let sets = vec![VertexSet::full(9); 4];
        let tight = Caps { enumeration: 1 << 20, work: 50 };
        assert!(matches!(
            count_colored_copies(&col, &pat, &sets, &tight),
            Err(MixingError::WorkCap { .. })
        ));
        assert!(matches!(
            count_colored_stars(&col, &sets[0], &sets[1..], &[1, 1, 1], &tight),
            Err(MixingError::WorkCap { .. })
        ));
    }

    #[test]
    fn pattern_validation_and_automorphisms() {
        assert!(matches!(
            PatternGraph::new(3, vec![(1, 1, 0)]),
            Err(MixingError::BadEdge { .. })
        ));
        assert!(matches!(
            PatternGraph::new(3, vec![(0, 1, 0), (0, 1, 2)]),
            Err(MixingError::DuplicateEdge { .. })
        ));
        assert_eq!(PatternGraph::complete(3, &[1, 1, 1]).automorphisms(), 6);
        assert_eq!(PatternGraph::complete(3, &[1, 1, 2]).automorphisms(), 2);
        assert_eq!(PatternGraph::star(&[1, 2]).automorphisms(), 1);
        assert_eq!(PatternGraph::star(&[1, 1]).automorphisms(), 2);
        let pat = PatternGraph::complete(3, &[1, 1, 1]);
        let col = coloring(3, 2);
        let full = VertexSet::full(9);
        let rep = count_colored_copies(&col, &pat, &[full.clone(), full.clone(), full], &Caps::default()).unwrap();
        let per_aut = copies_up_to_automorphism(&rep, &pat);
        assert!((per_aut - rep.exact_count.0 as f64 / 6.0).abs() < 1e-12);
    }
}
