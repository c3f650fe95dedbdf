//! Congruence classes of point tuples: edge-norm vectors, an exhaustive
//! isometry oracle at small sizes, the census of realized classes over a
//! point set, and the staged construction that routes sphere subsets
//! through the line scheme to count colored complete subgraphs.
//!
//! A (k+1)-tuple is nondegenerate when its difference vectors from the
//! first point have rank k. The census counts distinct edge-norm vectors
//! of nondegenerate tuples only; degenerate tuples are tallied separately,
//! never folded into the class count. Edge norms classify nondegenerate
//! tuples up to translation and special orthogonal maps, which is what
//! makes the census a congruence count rather than a plain invariant count.

use crate::field::{Elem, Field, FieldError};
use crate::geometry::{
    self, enumerate_orthogonal, sphere_size_formula, GeometryError, Space,
};
use crate::graph::{GraphError, NormColoring};
use crate::mixing::{
    count_colored_copies, count_colored_stars, star_counts_per_center, Coloring, CountReport,
    MixingError, PatternGraph, VertexSet,
};
use crate::rng::SplitMix64;
use crate::scheme::{build_omega, scheme_report, SchemeError};
use crate::{Caps, Count};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashSet;
use thiserror::Error;

/// Coordinate buffers in the census are fixed-size; dimensions beyond this
/// would need a different layout.
const MAX_DIM: usize = 8;

#[derive(Debug, Error)]
pub enum SimplexError {
    #[error("tuple needs at least two points, got {0}")]
    TooShort(usize),
    #[error("tuples have different lengths: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("degenerate tuple where a nondegenerate one is required")]
    Degenerate,
    #[error("no admissible tuple found in {0} attempts")]
    SampleExhausted(u64),
    #[error("exact census of {tuples} tuples exceeds the work cap {cap}; use the sampled mode")]
    ExactCap { tuples: u128, cap: u64 },
    #[error("q^{pairs} congruence classes overflow the packed key space")]
    ClassSpaceOverflow { pairs: usize },
    #[error("dimension {d} cannot host rank-{k} tuples")]
    DimensionTooSmall { d: usize, k: usize },
    #[error("dimension {d} exceeds the census coordinate buffer ({max})")]
    DimensionTooLarge { d: usize, max: usize },
    #[error("k must be at least {min} here, got {got}")]
    KTooSmall { got: usize, min: usize },
    #[error("expected dimension {expected} for this k, got {got}")]
    WrongDimension { expected: usize, got: usize },
    #[error("star type needs {expected} entries, got {got}")]
    TypeLength { got: usize, expected: usize },
    #[error("star type entry {0} is not a nonzero square")]
    NotASquare(Elem),
    #[error("the point set is empty")]
    EmptySet,
    #[error("{patterns} colored patterns is past the per-run limit {max}")]
    TooManyPatterns { patterns: usize, max: usize },
    #[error("unit point {0} missed the line table")]
    LineLookup(u64),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Mixing(#[from] MixingError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
}

/// The C(k+1,2) pairwise norms ‖x_i − x_j‖ of a (k+1)-tuple, stored
/// row-major: (1,2), (1,3), .., (1,k+1), (2,3), ...
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct EdgeNormVector {
    pub k: usize,
    pub entries: Vec<Elem>,
}

impl EdgeNormVector {
    pub fn pair_count(&self) -> usize {
        self.entries.len()
    }
}

/// Edge-norm vector of a tuple of point indices.
pub fn edge_norm_vector(space: &Space, tuple: &[u64]) -> Result<EdgeNormVector, SimplexError> {
    if tuple.len() < 2 {
        return Err(SimplexError::TooShort(tuple.len()));
    }
    let pts: Vec<Vec<Elem>> = tuple.iter().map(|&p| space.decode(p)).collect();
    let mut entries = Vec::with_capacity(tuple.len() * (tuple.len() - 1) / 2);
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            entries.push(space.norm(&space.sub_points(&pts[i], &pts[j])));
        }
    }
    Ok(EdgeNormVector { k: tuple.len() - 1, entries })
}

/// Nondegeneracy of a tuple of point indices: difference vectors from the
/// first point have full rank.
pub fn tuple_nondegenerate(space: &Space, tuple: &[u64]) -> Result<bool, SimplexError> {
    let pts: Vec<Vec<Elem>> = tuple.iter().map(|&p| space.decode(p)).collect();
    Ok(geometry::is_nondegenerate(space, &pts)?)
}

/// Rank of the Gram matrix of the difference vectors. Full rank means the
/// form restricted to the tuple's span is nondegenerate, the regime where
/// edge norms decide congruence.
pub fn difference_gram_rank(space: &Space, tuple: &[u64]) -> Result<usize, SimplexError> {
    if tuple.len() < 2 {
        return Err(SimplexError::TooShort(tuple.len()));
    }
    let pts: Vec<Vec<Elem>> = tuple.iter().map(|&p| space.decode(p)).collect();
    let diffs: Vec<Vec<Elem>> =
        pts[1..].iter().map(|p| space.sub_points(p, &pts[0])).collect();
    let gram: Vec<Vec<Elem>> = diffs
        .iter()
        .map(|u| diffs.iter().map(|v| space.dot(u, v)).collect())
        .collect();
    Ok(geometry::rank(space.field(), &gram))
}

/// Rejection-samples a nondegenerate (k+1)-tuple; with `gram_nondegenerate`
/// the difference Gram matrix must be full rank too.
pub fn sample_simplex(
    space: &Space,
    k: usize,
    rng: &mut SplitMix64,
    gram_nondegenerate: bool,
) -> Result<Vec<u64>, SimplexError> {
    if k == 0 || k > space.d() {
        return Err(SimplexError::DimensionTooSmall { d: space.d(), k });
    }
    const ATTEMPTS: u64 = 1_000_000;
    for _ in 0..ATTEMPTS {
        let tuple: Vec<u64> = (0..=k).map(|_| rng.below(space.n())).collect();
        if !tuple_nondegenerate(space, &tuple)? {
            continue;
        }
        if gram_nondegenerate && difference_gram_rank(space, &tuple)? != k {
            continue;
        }
        return Ok(tuple);
    }
    Err(SimplexError::SampleExhausted(ATTEMPTS))
}

/// Decides whether some τ and special orthogonal O send one tuple to the
/// other, point by point, by exhausting the group. Both tuples must be
/// nondegenerate; the search itself is the oracle, no invariant shortcut.
pub fn verify_congruence_lemma(
    space: &Space,
    p: &[u64],
    p2: &[u64],
    caps: &Caps,
) -> Result<bool, SimplexError> {
    if p.len() != p2.len() {
        return Err(SimplexError::LengthMismatch(p.len(), p2.len()));
    }
    if p.len() < 2 {
        return Err(SimplexError::TooShort(p.len()));
    }
    if !tuple_nondegenerate(space, p)? || !tuple_nondegenerate(space, p2)? {
        return Err(SimplexError::Degenerate);
    }
    let f = space.field();
    let a: Vec<Vec<Elem>> = p.iter().map(|&x| space.decode(x)).collect();
    let b: Vec<Vec<Elem>> = p2.iter().map(|&x| space.decode(x)).collect();
    for o in enumerate_orthogonal(space, true, caps)? {
        let tau = space.sub_points(&b[0], &o.apply(f, &a[0]));
        let matches = a
            .iter()
            .zip(&b)
            .all(|(x, y)| space.add_points(&o.apply(f, x), &tau) == *y);
        if matches {
            return Ok(true);
        }
    }
    Ok(false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CensusMode {
    Exact,
    Sampled,
}

/// Outcome of a census: the set of realized edge-norm vectors over
/// nondegenerate tuples, exact or as a certified lower bound.
#[derive(Debug, Clone, Serialize)]
pub struct CensusResult {
    pub q: u64,
    pub d: usize,
    pub k: usize,
    pub e_size: u64,
    pub mode: CensusMode,
    /// Number of distinct realized vectors (= realized.len()).
    pub count: u64,
    pub realized: Vec<EdgeNormVector>,
    /// q^C(k+1,2), the class space the count is measured against.
    pub class_space: Count,
    /// count / class_space: the measured constant c.
    pub lower_bound_fraction: f64,
    /// Exact mode: full tallies over all |E|^{k+1} tuples. Sampled mode:
    /// tallies over the drawn tuples.
    pub nondegenerate_tuples: Count,
    pub degenerate_tuples: Count,
    pub sample_size: Option<u64>,
    pub workers: usize,
    pub seed: Option<u64>,
}

struct Tables {
    q: usize,
    sub: Vec<u32>,
    mul: Vec<u32>,
    inv: Vec<u32>,
}

impl Tables {
    fn new(f: &Field) -> Tables {
        let q = f.q() as usize;
        let sub = (0..q * q).map(|i| f.sub((i / q) as Elem, (i % q) as Elem) as u32).collect();
        let mul = (0..q * q).map(|i| f.mul((i / q) as Elem, (i % q) as Elem) as u32).collect();
        let inv = (0..q)
            .map(|a| if a == 0 { 0 } else { f.inv(a as Elem).expect("unit") as u32 })
            .collect();
        Tables { q, sub, mul, inv }
    }

    #[inline]
    fn sub(&self, a: u32, b: u32) -> u32 {
        self.sub[a as usize * self.q + b as usize]
    }

    #[inline]
    fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[a as usize * self.q + b as usize]
    }
}

/// Incremental row-reduced basis over F_q. Each inserted row is reduced
/// against the stored pivots, so a vector extends the basis iff it is
/// outside the current span.
#[derive(Clone, Default)]
struct RankTracker {
    rows: Vec<[u32; MAX_DIM]>,
    pivots: Vec<usize>,
}

impl RankTracker {
    fn extend(&mut self, mut v: [u32; MAX_DIM], d: usize, t: &Tables) -> bool {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = v[p];
            if c != 0 {
                for i in 0..d {
                    v[i] = t.sub(v[i], t.mul(c, row[i]));
                }
            }
        }
        let Some(p) = (0..d).find(|&i| v[i] != 0) else {
            return false;
        };
        let ci = t.inv[v[p] as usize];
        for x in v.iter_mut().take(d) {
            *x = t.mul(ci, *x);
        }
        self.rows.push(v);
        self.pivots.push(p);
        true
    }
}

struct CensusCtx<'a> {
    space: &'a Space,
    coloring: NormColoring,
    tables: Tables,
    k: usize,
    /// powers[r] = |E|^r, for degenerate-completion accounting.
    powers: Vec<u128>,
}

impl CensusCtx<'_> {
    fn build<'a>(
        space: &'a Space,
        e: &[u64],
        k: usize,
        caps: &Caps,
    ) -> Result<(CensusCtx<'a>, Vec<u32>), SimplexError> {
        if k == 0 || k > space.d() {
            return Err(SimplexError::DimensionTooSmall { d: space.d(), k });
        }
        if space.d() > MAX_DIM {
            return Err(SimplexError::DimensionTooLarge { d: space.d(), max: MAX_DIM });
        }
        let mut e: Vec<u32> = e.iter().map(|&x| x as u32).collect();
        e.sort_unstable();
        e.dedup();
        let coloring = NormColoring::new(space, caps)?;
        let tables = Tables::new(space.field());
        let mut powers = vec![1u128; k + 2];
        for r in 1..=k + 1 {
            powers[r] = powers[r - 1].saturating_mul(e.len() as u128);
        }
        Ok((CensusCtx { space, coloring, tables, k, powers }, e))
    }

    #[inline]
    fn diff(&self, x: u32, y: u32) -> [u32; MAX_DIM] {
        let d = self.space.d();
        let table = self.coloring.point_table();
        let (cx, cy) = (table.coords_of(x as usize), table.coords_of(y as usize));
        let mut v = [0u32; MAX_DIM];
        for i in 0..d {
            v[i] = self.tables.sub(cx[i], cy[i]);
        }
        v
    }

    fn pack(&self, chosen: &[u32]) -> u128 {
        let q = self.space.q() as u128;
        let mut key = 0u128;
        for i in 0..chosen.len() {
            for j in i + 1..chosen.len() {
                key = key * q + self.coloring.color(chosen[i] as usize, chosen[j] as usize) as u128;
            }
        }
        key
    }

    fn rank_ok(&self, tuple: &[u32]) -> bool {
        let d = self.space.d();
        let mut tracker = RankTracker::default();
        tuple[1..].iter().all(|&x| tracker.extend(self.diff(x, tuple[0]), d, &self.tables))
    }

    fn descend(&self, e: &[u32], chosen: &mut Vec<u32>, tracker: &RankTracker, st: &mut TupleState) {
        let level = chosen.len();
        let d = self.space.d();
        for &x in e {
            let mut tr = tracker.clone();
            if tr.extend(self.diff(x, chosen[0]), d, &self.tables) {
                chosen.push(x);
                if level + 1 == self.k + 1 {
                    st.nondegenerate += 1;
                    st.set.insert(self.pack(chosen));
                } else {
                    self.descend(e, chosen, &tr, st);
                }
                chosen.pop();
            } else {
                // Every completion of this prefix is degenerate.
                st.degenerate += self.powers[self.k - level];
            }
        }
    }

    fn result(
        &self,
        mode: CensusMode,
        set: HashSet<u128>,
        st_nondeg: u128,
        st_degen: u128,
        e_size: u64,
        sample_size: Option<u64>,
        workers: usize,
        seed: Option<u64>,
    ) -> Result<CensusResult, SimplexError> {
        let q = self.space.q();
        let pairs = self.k * (self.k + 1) / 2;
        let class_space = (q as u128)
            .checked_pow(pairs as u32)
            .ok_or(SimplexError::ClassSpaceOverflow { pairs })?;
        let mut keys: Vec<u128> = set.into_iter().collect();
        keys.sort_unstable();
        let realized: Vec<EdgeNormVector> =
            keys.iter().map(|&key| unpack_env(key, q, self.k)).collect();
        Ok(CensusResult {
            q,
            d: self.space.d(),
            k: self.k,
            e_size,
            mode,
            count: realized.len() as u64,
            realized,
            class_space: Count(class_space),
            lower_bound_fraction: keys.len() as f64 / class_space as f64,
            nondegenerate_tuples: Count(st_nondeg),
            degenerate_tuples: Count(st_degen),
            sample_size,
            workers,
            seed,
        })
    }
}

fn unpack_env(mut key: u128, q: u64, k: usize) -> EdgeNormVector {
    let mut entries = vec![0 as Elem; k * (k + 1) / 2];
    for slot in entries.iter_mut().rev() {
        *slot = (key % q as u128) as Elem;
        key /= q as u128;
    }
    EdgeNormVector { k, entries }
}

#[derive(Default)]
struct TupleState {
    set: HashSet<u128>,
    nondegenerate: u128,
    degenerate: u128,
}

impl TupleState {
    fn merge(mut a: TupleState, b: TupleState) -> TupleState {
        if a.set.len() < b.set.len() {
            return TupleState::merge(b, a);
        }
        a.set.extend(b.set);
        a.nondegenerate += b.nondegenerate;
        a.degenerate += b.degenerate;
        a
    }
}

/// Exact census: every (k+1)-tuple from E, with degenerate prefixes pruned
/// (a prefix whose difference vectors are dependent cannot complete to a
/// nondegenerate tuple, so its remaining slots are counted wholesale).
pub fn census_exact(
    space: &Space,
    e: &[u64],
    k: usize,
    caps: &Caps,
) -> Result<CensusResult, SimplexError> {
    let (ctx, e) = CensusCtx::build(space, e, k, caps)?;
    let tuples = ctx.powers[k + 1];
    if tuples > caps.work as u128 {
        return Err(SimplexError::ExactCap { tuples, cap: caps.work });
    }
    let st = e
        .par_iter()
        .fold(TupleState::default, |mut st, &x1| {
            let mut chosen = vec![x1];
            ctx.descend(&e, &mut chosen, &RankTracker::default(), &mut st);
            st
        })
        .reduce(TupleState::default, TupleState::merge);
    debug_assert_eq!(st.nondegenerate + st.degenerate, tuples, "tuple accounting");
    ctx.result(
        CensusMode::Exact,
        st.set,
        st.nondegenerate,
        st.degenerate,
        e.len() as u64,
        None,
        rayon::current_num_threads(),
        None,
    )
}

/// Sampled census: `samples` tuples drawn uniformly with replacement,
/// nondegenerate ones contributing their edge-norm vectors. The realized
/// set is a certified lower bound on the exact census, monotone in the
/// budget for a fixed seed, and a pure function of (seed, workers).
pub fn census_sampled(
    space: &Space,
    e: &[u64],
    k: usize,
    samples: u64,
    seed: u64,
    workers: usize,
    caps: &Caps,
) -> Result<CensusResult, SimplexError> {
    let (ctx, e) = CensusCtx::build(space, e, k, caps)?;
    if e.is_empty() {
        return Err(SimplexError::EmptySet);
    }
    let workers = workers.max(1);
    let m = e.len() as u64;
    let st = (0..workers as u64)
        .into_par_iter()
        .map(|w| {
            let share = samples / workers as u64 + u64::from(w < samples % workers as u64);
            let mut rng = SplitMix64::substream(seed, w);
            let mut st = TupleState::default();
            let mut tuple = vec![0u32; k + 1];
            for _ in 0..share {
                for slot in tuple.iter_mut() {
                    *slot = e[rng.below(m) as usize];
                }
                if ctx.rank_ok(&tuple) {
                    st.nondegenerate += 1;
                    st.set.insert(ctx.pack(&tuple));
                } else {
                    st.degenerate += 1;
                }
            }
            st
        })
        .reduce(TupleState::default, TupleState::merge);
    ctx.result(
        CensusMode::Sampled,
        st.set,
        st.nondegenerate,
        st.degenerate,
        e.len() as u64,
        Some(samples),
        workers,
        Some(seed),
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct MainTheoremReport {
    pub q: u64,
    pub k: usize,
    pub d: usize,
    pub space_size: u64,
    pub e_size: u64,
    pub density_requested: f64,
    /// |E| / q^{2k−1−1/(2k)}; the counting regime starts at 1.
    pub hypothesis_ratio: f64,
    pub hypothesis_met: bool,
    pub census_count: u64,
    pub class_space: Count,
    /// census_count / class_space.
    pub measured_c: f64,
    pub nondegenerate_draws: Count,
    pub degenerate_draws: Count,
    pub sample_size: u64,
    pub workers: usize,
    pub seed: u64,
}

/// Desk-scale run of the class-count statement: sample E of the requested
/// density from F_q^{2k−1}, run the sampled census, and report the measured
/// constant against the density hypothesis.
pub fn main_theorem_experiment(
    q: u64,
    k: usize,
    density: f64,
    samples: u64,
    seed: u64,
    workers: usize,
    caps: &Caps,
) -> Result<MainTheoremReport, SimplexError> {
    if k < 3 {
        return Err(SimplexError::KTooSmall { got: k, min: 3 });
    }
    let d = 2 * k - 1;
    let field = Field::from_order(q)?;
    let space = Space::new(field, d)?;
    let n = space.n();
    let e_size = ((density * n as f64).round() as u64).clamp(1, n);
    // The set draw uses a substream no census worker can reach.
    let mut set_rng = SplitMix64::substream(seed, u64::MAX);
    let e: Vec<u64> = set_rng.subset(n, e_size as usize).into_iter().map(u64::from).collect();
    let census = census_sampled(&space, &e, k, samples, seed, workers, caps)?;
    let exponent = (2 * k - 1) as f64 - 1.0 / (2 * k) as f64;
    let hypothesis_ratio = e_size as f64 / (q as f64).powf(exponent);
    Ok(MainTheoremReport {
        q,
        k,
        d,
        space_size: n,
        e_size,
        density_requested: density,
        hypothesis_ratio,
        hypothesis_met: hypothesis_ratio >= 1.0,
        census_count: census.count,
        class_space: census.class_space,
        measured_c: census.lower_bound_fraction,
        nondegenerate_draws: census.nondegenerate_tuples,
        degenerate_draws: census.degenerate_tuples,
        sample_size: samples,
        workers,
        seed,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelineReport {
    pub q: u64,
    pub d: usize,
    pub k: usize,
    pub e_size: u64,
    pub star_type: Vec<Elem>,
    /// Star count over all centers, with prediction and hypothesis flags.
    pub stars: CountReport,
    /// n · Π per-color valencies, when E is the full space.
    pub full_space_identity: Option<Count>,
    pub center: u64,
    pub center_star_count: Count,
    /// Mean star count per center; the chosen center must reach it.
    pub pigeonhole_mean: f64,
    pub e_sizes: Vec<u64>,
    pub sphere_sizes: Vec<Count>,
    pub on_sphere_ok: bool,
    pub unit_norm_ok: bool,
    pub e_prime_sizes: Vec<u64>,
    /// 2|E'_i| ≥ |E_i| for every i: at most two unit points per line.
    pub half_ok: bool,
    pub omega_size: usize,
    pub scheme_lambda: f64,
    /// Colored-K_k counts across E'_2..E'_{k+1}, one per color pattern,
    /// pattern index read little-endian in the scheme's colors.
    pub pattern_counts: Vec<Count>,
    pub end_total: Count,
    pub end_min: Count,
    pub positive: bool,
    pub seed: u64,
}

const MAX_PATTERNS: usize = 65_536;

/// Replays the staged construction: count stars of the given type in E,
/// take the best center, slice E into the spheres around it, rescale each
/// slice to the unit sphere, pass to lines of the scheme, and count every
/// colored complete pattern across the line sets.
pub fn proof_pipeline(
    space: &Space,
    e: &[u64],
    k: usize,
    star_type: &[Elem],
    seed: u64,
    caps: &Caps,
) -> Result<PipelineReport, SimplexError> {
    if k < 2 {
        return Err(SimplexError::KTooSmall { got: k, min: 2 });
    }
    if space.d() != 2 * k - 1 {
        return Err(SimplexError::WrongDimension { expected: 2 * k - 1, got: space.d() });
    }
    if star_type.len() != k {
        return Err(SimplexError::TypeLength { got: star_type.len(), expected: k });
    }
    let f = space.field().clone();
    for &a in star_type {
        if f.chi(a) != 1 {
            return Err(SimplexError::NotASquare(a));
        }
    }

    let mut members: Vec<u32> = e.iter().map(|&x| x as u32).collect();
    members.sort_unstable();
    members.dedup();
    if members.is_empty() {
        return Err(SimplexError::EmptySet);
    }
    let eset = VertexSet { members };
    let e_size = eset.len() as u64;

    let coloring = NormColoring::new(space, caps)?;
    let colors: Vec<usize> = star_type.iter().map(|&a| a as usize).collect();
    let leaves = vec![eset.clone(); k];
    let stars = count_colored_stars(&coloring, &eset, &leaves, &colors, caps)?;
    let per_center = star_counts_per_center(&coloring, &eset, &leaves, &colors, caps)?;

    let full_space_identity = (e_size == space.n()).then(|| {
        let mut v = space.n() as u128;
        for &c in &colors {
            v *= coloring.color_valency(c) as u128;
        }
        Count(v)
    });

    // Argmax center; members are sorted, so ties fall to the smallest index.
    let best = per_center
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .expect("nonempty set");
    let center = eset.members[best.0] as u64;
    let center_star_count = *best.1;
    let pigeonhole_mean = stars.exact_count.0 as f64 / e_size as f64;
    debug_assert!(center_star_count as f64 >= pigeonhole_mean - 1e-9);

    let scheme = build_omega(space, caps)?;
    let srep = scheme_report(&scheme)?;
    let scheme_lambda = srep.max_lambda();

    let center_coords = space.decode(center);
    let mut e_sizes = Vec::with_capacity(k);
    let mut sphere_sizes = Vec::with_capacity(k);
    let mut e_prime: Vec<VertexSet> = Vec::with_capacity(k);
    let mut e_prime_sizes = Vec::with_capacity(k);
    let mut on_sphere_ok = true;
    let mut unit_norm_ok = true;
    let mut half_ok = true;
    for (i, &a) in star_type.iter().enumerate() {
        let slice: Vec<u32> = eset
            .members
            .iter()
            .copied()
            .filter(|&v| {
                v as u64 != center && coloring.color(center as usize, v as usize) == colors[i]
            })
            .collect();
        let s = f.sqrt(a).expect("type entries are squares");
        let si = f.inv(s)?;
        let mut lines: Vec<u32> = Vec::with_capacity(slice.len());
        for &v in &slice {
            let shifted = space.sub_points(&space.decode(v as u64), &center_coords);
            on_sphere_ok &= space.norm(&shifted) == a;
            let unit = space.scale_point(si, &shifted);
            unit_norm_ok &= space.norm(&unit) == 1;
            let idx = space.encode(&unit);
            lines.push(scheme.line_of(idx).ok_or(SimplexError::LineLookup(idx))?);
        }
        let prime = VertexSet::new(lines);
        half_ok &= 2 * prime.len() as u64 >= slice.len() as u64;
        e_sizes.push(slice.len() as u64);
        sphere_sizes.push(Count(sphere_size_formula(&f, space.d(), a)));
        e_prime_sizes.push(prime.len() as u64);
        e_prime.push(prime);
    }

    let scol = scheme.coloring(scheme_lambda);
    let palette = scol.color_count();
    let edge_slots = k * (k - 1) / 2;
    let patterns = palette.checked_pow(edge_slots as u32).filter(|&p| p <= MAX_PATTERNS).ok_or(
        SimplexError::TooManyPatterns {
            patterns: palette.pow(edge_slots.min(8) as u32),
            max: MAX_PATTERNS,
        },
    )?;
    let mut pattern_counts = Vec::with_capacity(patterns);
    let mut end_total = 0u128;
    let mut end_min = u128::MAX;
    for pi in 0..patterns {
        let mut digits = Vec::with_capacity(edge_slots);
        let mut rest = pi;
        for _ in 0..edge_slots {
            digits.push(rest % palette);
            rest /= palette;
        }
        let pat = PatternGraph::complete(k, &digits);
        let rep = count_colored_copies(&scol, &pat, &e_prime, caps)?;
        end_total += rep.exact_count.0;
        end_min = end_min.min(rep.exact_count.0);
        pattern_counts.push(rep.exact_count);
    }

    Ok(PipelineReport {
        q: space.q(),
        d: space.d(),
        k,
        e_size,
        star_type: star_type.to_vec(),
        stars,
        full_space_identity,
        center,
        center_star_count: Count(center_star_count),
        pigeonhole_mean,
        e_sizes,
        sphere_sizes,
        on_sphere_ok,
        unit_norm_ok,
        e_prime_sizes,
        half_ok,
        omega_size: scheme.len(),
        scheme_lambda,
        pattern_counts,
        end_total: Count(end_total),
        end_min: Count(end_min),
        positive: end_total > 0,
        seed,
    })
}
