//! The acceptance suite: ten checks that exercise every layer of the
//! library against independent oracles, closed forms, and pinned values.
//! Each criterion reports one pass/fail line; tolerances and pinned
//! constants live here, in code, not in config.
//!
//! The quick profile caps field sizes at 5 and sampling budgets at 10^6;
//! the full profile runs the grids as stated on each criterion. Results
//! contain no timing, so a criterion's record is byte-stable; wall times
//! go to stderr.

use ffs_core::field::{Elem, Field};
use ffs_core::geometry::{enumerate_orthogonal, is_nondegenerate, sphere, sphere_size_formula, Space};
use ffs_core::graph::{build_graph, check_ramanujan_bound, NormColoring};
use ffs_core::mixing::{
    count_colored_copies, count_colored_stars, edge_discrepancy, neighborhood_variance,
    PatternGraph, VertexSet,
};
use ffs_core::rng::SplitMix64;
use ffs_core::scheme::{build_omega, scheme_report, verify_distance_relation};
use ffs_core::simplex::{
    census_exact, census_sampled, edge_norm_vector, proof_pipeline, sample_simplex,
    verify_congruence_lemma, EdgeNormVector,
};
use ffs_core::spectra::multiset_close;
use ffs_core::Caps;
use serde::Serialize;
use std::collections::HashSet;
use std::time::Instant;

const SPECTRUM_TOL: f64 = 1e-6;
const SCHEME_C_TOL: f64 = 1e-6;

/// Sampled-census golden value: q=3, k=3, full F_3^5, budget 10^7,
/// seed 1, 4 sampling workers. The budget saturates: an exhaustive
/// 243^4 scan realizes the same 715 classes, which is 3^6 minus the
/// zero matrix minus the 13 rank-one classes representing the
/// nonsquare, the classes no embedded triple can produce.
const GOLDEN_SAMPLED_COUNT: u64 = 715;

/// Measured spectral constants max|λ|/q^{3/2} per relation at d=5, in
/// relation order R_1, R_2, ..; frozen from the first run.
const PINNED_SCHEME_C_Q3: [f64; 2] = [0.76980035892, 0.57735026919];
const PINNED_SCHEME_C_Q5: [f64; 3] = [1.2521980674, 0.894427191, 0.894427191];
const PINNED_SCHEME_C_Q7: [f64; 4] =
    [1.83582744033, 1.29045142984, 1.06904496765, 0.912486956834];

const PINNED_OMEGA_SIZES: [(u64, usize); 3] = [(3, 45), (5, 325), (7, 1225)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    Quick,
    Full,
}

impl Profile {
    pub fn name(self) -> &'static str {
        match self {
            Profile::Quick => "quick",
            Profile::Full => "full",
        }
    }

    fn qs(self, all: &[u64]) -> Vec<u64> {
        all.iter().copied().filter(|&q| self == Profile::Full || q <= 5).collect()
    }

    fn budget(self, full: u64) -> u64 {
        match self {
            Profile::Quick => full.min(1_000_000),
            Profile::Full => full,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub pass: bool,
    pub summary: String,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "criterion {:2} {:<26} {}  {}",
            self.id,
            self.name,
            if self.pass { "PASS" } else { "FAIL" },
            self.summary
        )
    }
}

const CRITERIA: [(&str, fn(Profile) -> CriterionResult); 10] = [
    ("sphere-formula", c1_sphere_formula),
    ("spectrum-cross-validation", c2_spectrum),
    ("ramanujan-bound", c3_ramanujan),
    ("mixing-inequalities", c4_mixing),
    ("star-copy-oracle", c5_star_copy_oracle),
    ("star-concentration", c6_concentration),
    ("congruence-lemma", c7_congruence),
    ("scheme-construction", c8_scheme),
    ("main-theorem-census", c9_census),
    ("pipeline-consistency", c10_pipeline),
];

pub fn count() -> u32 {
    CRITERIA.len() as u32
}

/// Run criterion `id` (1-based). Wall time goes to stderr, never into the
/// result, so records stay byte-stable across runs.
pub fn run_one(id: u32, profile: Profile) -> Option<CriterionResult> {
    let idx = (id as usize).checked_sub(1)?;
    let &(name, f) = CRITERIA.get(idx)?;
    let started = Instant::now();
    let r = f(profile);
    eprintln!("criterion {:2} {:<26} {} ms", id, name, started.elapsed().as_millis());
    Some(r)
}

pub fn run_all(profile: Profile) -> Vec<CriterionResult> {
    (1..=count()).map(|id| run_one(id, profile).expect("id in range")).collect()
}

fn result(id: u32, name: &'static str, pass: bool, summary: String) -> CriterionResult {
    CriterionResult { id, name, pass, summary }
}

fn space(q: u64, d: usize) -> Space {
    Space::new(Field::from_order(q).expect("odd prime power"), d).expect("dimension")
}

/// 1. Closed-form sphere sizes equal exhaustive scans on the whole grid.
fn c1_sphere_formula(profile: Profile) -> CriterionResult {
    let caps = Caps::default();
    let mut cases = 0u32;
    let mut failures = Vec::new();
    for q in profile.qs(&[3, 5, 7, 9]) {
        for d in 2..=5 {
            let sp = space(q, d);
            for t in 0..q {
                cases += 1;
                let scanned = sphere(&sp, t, &caps).expect("within caps").points.len() as u128;
                let predicted = sphere_size_formula(sp.field(), d, t);
                if scanned != predicted {
                    failures.push(format!("q={q} d={d} t={t}: scan {scanned} formula {predicted}"));
                }
            }
        }
    }
    let pass = failures.is_empty();
    let summary = if pass {
        format!("{cases} cases, formula matches scan exactly")
    } else {
        format!("{} of {cases} cases disagree: {}", failures.len(), failures.join("; "))
    };
    result(1, "sphere-formula", pass, summary)
}

/// 2. Character-sum spectra equal dense eigendecompositions as multisets.
fn c2_spectrum(_profile: Profile) -> CriterionResult {
    let caps = Caps::default();
    let mut cases = 0u32;
    let mut failures = Vec::new();
    for q in [3u64, 5] {
        for d in [2usize, 3] {
            let sp = space(q, d);
            for a in 0..q {
                cases += 1;
                let g = build_graph(&sp, a, &caps).expect("small graph");
                let close = multiset_close(
                    &g.character_eigenvalues_sorted().expect("character"),
                    &g.dense_eigenvalues_sorted().expect("dense"),
                    SPECTRUM_TOL,
                );
                if !close {
                    failures.push(format!("q={q} d={d} a={a}"));
                }
            }
        }
    }
    let pass = failures.is_empty();
    let summary = if pass {
        format!("{cases} spectra agree within {SPECTRUM_TOL:.0e}")
    } else {
        format!("disagree at: {}", failures.join(", "))
    };
    result(2, "spectrum-cross-validation", pass, summary)
}

/// 3. Every nontrivial eigenvalue obeys |λ| ≤ 2q^{(d−1)/2} on the grid.
fn c3_ramanujan(profile: Profile) -> CriterionResult {
    let caps = Caps::default();
    let mut cases = 0u32;
    let mut violations = Vec::new();
    for q in profile.qs(&[3, 5, 7]) {
        for d in 2..=5 {
            let sp = space(q, d);
            for a in 0..q {
                cases += 1;
                let g = build_graph(&sp, a, &caps).expect("within caps");
                let rep = g.character_spectrum().expect("character");
                let (holds, _) = check_ramanujan_bound(&rep);
                if !holds {
                    violations.push(format!(
                        "q={q} d={d} a={a}: max|λ|={:.4} > bound {:.4}",
                        rep.max_nontrivial_abs, rep.bound
                    ));
                }
            }
        }
    }
    let pass = violations.is_empty();
    let summary = if pass {
        format!("{cases} graphs inside the bound")
    } else {
        format!("{} of {cases} graphs violate: {}", violations.len(), violations.join("; "))
    };
    result(3, "ramanujan-bound", pass, summary)
}

/// 4. Variance and discrepancy inequalities hold on seeded random subsets.
fn c4_mixing(_profile: Profile) -> CriterionResult {
    let caps = Caps::default();
    let trials = 100u32;
    let mut checked = 0u64;
    let mut violations = 0u64;
    let mut counter = 0u64;
    for q in [3u64, 5] {
        for d in [2usize, 3] {
            let sp = space(q, d);
            for a in 0..q {
                let g = build_graph(&sp, a, &caps).expect("small graph");
                let n = g.n() as usize;
                for _ in 0..trials {
                    counter += 1;
                    let mut rng = SplitMix64::substream(4, counter);
                    let b =
                        VertexSet::random(n, 1 + rng.below(n as u64 - 1) as usize, &mut rng);
                    let c =
                        VertexSet::random(n, 1 + rng.below(n as u64 - 1) as usize, &mut rng);
                    checked += 2;
                    if !neighborhood_variance(&g, &b).expect("valid subset").holds {
                        violations += 1;
                    }
                    if !edge_discrepancy(&g, &b, &c).expect("valid subsets").holds {
                        violations += 1;
                    }
                }
            }
        }
    }
    let pass = violations == 0;
    result(
        4,
        "mixing-inequalities",
        pass,
        format!("{checked} inequality checks, {violations} violations"),
    )
}

fn naive_star_count(
    coloring: &NormColoring,
    center: &VertexSet,
    leaves: &[VertexSet],
    colors: &[usize],
) -> u128 {
    fn descend(
        coloring: &NormColoring,
        v: usize,
        leaves: &[VertexSet],
        colors: &[usize],
        depth: usize,
    ) -> u128 {
        if depth == leaves.len() {
            return 1;
        }
        let mut total = 0u128;
        for &x in &leaves[depth].members {
            let x = x as usize;
            if x != v && coloring.color(v, x) == colors[depth] {
                total += descend(coloring, v, leaves, colors, depth + 1);
            }
        }
        total
    }
    center
        .members
        .iter()
        .map(|&v| descend(coloring, v as usize, leaves, colors, 0))
        .sum()
}

/// 5. Star counter, copy counter on star patterns, and a naive nested-loop
/// oracle agree exactly on seeded instances.
fn c5_star_copy_oracle(_profile: Profile) -> CriterionResult {
    let caps = Caps::default();
    let shapes = [(3u64, 2usize), (3, 3), (3, 4), (3, 5), (5, 2), (5, 3)];
    let mut failures = Vec::new();
    for instance in 0..50u64 {
        let (q, d) = shapes[instance as usize % shapes.len()];
        let k = 1 + instance as usize % 3;
        let sp = space(q, d);
        let coloring = NormColoring::new(&sp, &caps).expect("table");
        let n = sp.n() as usize;
        let mut rng = SplitMix64::substream(5, instance);
        let size = |rng: &mut SplitMix64| 1 + rng.below(24.min(n as u64 - 1)) as usize;
        let center = VertexSet::random(n, size(&mut rng), &mut rng);
        let leaves: Vec<VertexSet> =
            (0..k).map(|_| VertexSet::random(n, size(&mut rng), &mut rng)).collect();
        let colors: Vec<usize> = (0..k).map(|_| rng.below(q) as usize).collect();

        let stars = count_colored_stars(&coloring, &center, &leaves, &colors, &caps)
            .expect("within caps")
            .exact_count
            .0;
        let mut sets = vec![center.clone()];
        sets.extend(leaves.iter().cloned());
        let copies = count_colored_copies(&coloring, &PatternGraph::star(&colors), &sets, &caps)
            .expect("within caps")
            .exact_count
            .0;
        let naive = naive_star_count(&coloring, &center, &leaves, &colors);
        if stars != copies || stars != naive {
            failures.push(format!(
                "instance {instance} (q={q} d={d} k={k}): stars {stars} copies {copies} naive {naive}"
            ));
        }
    }
    let pass = failures.is_empty();
    let summary = if pass {
        "50 instances, three counters agree exactly".to_string()
    } else {
        failures.join("; ")
    };
    result(5, "star-copy-oracle", pass, summary)
}

/// 6. Full-space star counts match the product identity, and the relative
/// deviation of dense-subset counts from the prediction shrinks as q grows.
fn c6_concentration(profile: Profile) -> CriterionResult {
    let caps = Caps::default();
    let colors = [1usize, 1, 1];
    let mut identity_failures = Vec::new();
    let mut deviations = Vec::new();
    for q in profile.qs(&[3, 5, 7]) {
        let sp = space(q, 5);
        let coloring = NormColoring::new(&sp, &caps).expect("table");
        let n = sp.n() as usize;

        let full = VertexSet::full(n);
        let leaves = vec![full.clone(); 3];
        let stars = count_colored_stars(&coloring, &full, &leaves, &colors, &caps)
            .expect("within caps");
        let mut expected = n as u128;
        for &c in &colors {
            expected *= coloring.color_valency(c) as u128;
        }
        if stars.exact_count.0 != expected {
            identity_failures.push(format!(
                "q={q}: count {} != n·Πvalency {expected}",
                stars.exact_count.0
            ));
        }

        let mut rng = SplitMix64::substream(6, q);
        let dense = VertexSet::random(n, n / 2, &mut rng);
        let dense_leaves = vec![dense.clone(); 3];
        let rep = count_colored_stars(&coloring, &dense, &dense_leaves, &colors, &caps)
            .expect("within caps");
        deviations.push((q, rep.relative_deviation));
    }
    let monotone = deviations.windows(2).all(|w| w[1].1 < w[0].1);
    let pass = identity_failures.is_empty() && monotone;
    let dev_str = deviations
        .iter()
        .map(|(q, dev)| format!("q={q}: {dev:.4}"))
        .collect::<Vec<_>>()
        .join(", ");
    let summary = if pass {
        format!("identity exact; deviation decreasing ({dev_str})")
    } else if !identity_failures.is_empty() {
        identity_failures.join("; ")
    } else {
        format!("deviation not decreasing: {dev_str}")
    };
    result(6, "star-concentration", pass, summary)
}

/// 7. Edge-norm equality and exhaustive isometry search agree on seeded
/// tuple pairs with nondegenerate difference Gram matrices, k = d − 1.
fn c7_congruence(_profile: Profile) -> CriterionResult {
    let caps = Caps::default();
    let configs = [(2usize, 3u64), (2, 5), (3, 3)];
    let mut checked = 0u32;
    let mut failures = Vec::new();
    for (ci, &(d, q)) in configs.iter().enumerate() {
        let sp = space(q, d);
        let f = sp.field().clone();
        let k = d - 1;
        let maps = enumerate_orthogonal(&sp, true, &caps).expect("small group");
        for pair in 0..200u64 {
            checked += 1;
            let mut rng = SplitMix64::substream(7, (ci as u64) << 32 | pair);
            let a = sample_simplex(&sp, k, &mut rng, true).expect("samplable");
            let b = if pair % 2 == 0 {
                let o = &maps[rng.below(maps.len() as u64) as usize];
                let shift = sp.decode(rng.below(sp.n()));
                a.iter()
                    .map(|&x| sp.encode(&sp.add_points(&o.apply(&f, &sp.decode(x)), &shift)))
                    .collect::<Vec<u64>>()
            } else {
                sample_simplex(&sp, k, &mut rng, true).expect("samplable")
            };
            let env_equal =
                edge_norm_vector(&sp, &a).unwrap() == edge_norm_vector(&sp, &b).unwrap();
            let congruent = verify_congruence_lemma(&sp, &a, &b, &caps).expect("search ran");
            if env_equal != congruent || (pair % 2 == 0 && !congruent) {
                failures.push(format!("d={d} q={q} pair={pair}"));
            }
        }
    }
    let pass = failures.is_empty();
    let summary = if pass {
        format!("{checked} pairs, predicates agree on all")
    } else {
        format!("disagree at: {}", failures.join(", "))
    };
    result(7, "congruence-lemma", pass, summary)
}

/// 8. The line scheme at d=5 has the pinned sizes, partitions correctly,
/// satisfies the distance relation, and reproduces its spectral constants.
fn c8_scheme(profile: Profile) -> CriterionResult {
    let caps = Caps::default();
    let mut failures = Vec::new();
    let mut measured = Vec::new();
    for q in profile.qs(&[3, 5, 7]) {
        let pinned_c: &[f64] = match q {
            3 => &PINNED_SCHEME_C_Q3,
            5 => &PINNED_SCHEME_C_Q5,
            _ => &PINNED_SCHEME_C_Q7,
        };
        let sp = space(q, 5);
        let scheme = match build_omega(&sp, &caps) {
            Ok(s) => s,
            Err(e) => {
                failures.push(format!("q={q}: construction failed: {e}"));
                continue;
            }
        };
        let expected = PINNED_OMEGA_SIZES.iter().find(|&&(pq, _)| pq == q).map(|&(_, s)| s);
        if Some(scheme.len()) != expected {
            failures.push(format!("q={q}: |Ω|={} expected {expected:?}", scheme.len()));
        }
        let report = match scheme_report(&scheme) {
            Ok(r) => r,
            Err(e) => {
                failures.push(format!("q={q}: spectra failed: {e}"));
                continue;
            }
        };
        if !report.partition_ok || !report.symmetry_ok {
            failures.push(format!(
                "q={q}: partition_ok={} symmetry_ok={}",
                report.partition_ok, report.symmetry_ok
            ));
        }
        let distance = verify_distance_relation(&scheme);
        if !distance.ok {
            failures.push(format!("q={q}: distance relation violated"));
        }
        if report.relations.len() != pinned_c.len() {
            failures.push(format!(
                "q={q}: {} relations, pinned {}",
                report.relations.len(),
                pinned_c.len()
            ));
        } else {
            for (rel, &pin) in report.relations.iter().zip(pinned_c) {
                measured.push(format!("q={q} l={}: c={:.9}", rel.l, rel.measured_c));
                if (rel.measured_c - pin).abs() > SCHEME_C_TOL {
                    failures.push(format!(
                        "q={q} l={}: measured c {:.9} drifted from pinned {:.9}",
                        rel.l, rel.measured_c, pin
                    ));
                }
            }
        }
    }
    let pass = failures.is_empty();
    let summary =
        if pass { format!("sizes, partition, distance, c pins hold ({})", measured.join("; ")) } else { failures.join("; ") };
    result(8, "scheme-construction", pass, summary)
}

/// 9. The sampled census over the full F_3^5 reproduces its golden count,
/// and the pruned exact census matches a naive scan on a small point set.
fn c9_census(profile: Profile) -> CriterionResult {
    let caps = Caps::default();
    let sp = space(3, 5);
    let e: Vec<u64> = (0..sp.n()).collect();
    let budget = profile.budget(10_000_000);
    let sampled =
        census_sampled(&sp, &e, 3, budget, 1, 4, &caps).expect("sampling runs");
    let mut failures = Vec::new();
    if sampled.count == 0 || sampled.count > 729 {
        failures.push(format!("sampled count {} outside (0, 729]", sampled.count));
    }
    match profile {
        Profile::Full => {
            if sampled.count != GOLDEN_SAMPLED_COUNT {
                failures.push(format!(
                    "sampled count {} != golden {GOLDEN_SAMPLED_COUNT}",
                    sampled.count
                ));
            }
        }
        Profile::Quick => {
            // A prefix of the full-budget stream can only see fewer classes.
            if sampled.count > GOLDEN_SAMPLED_COUNT {
                failures.push(format!(
                    "sampled count {} exceeds golden {GOLDEN_SAMPLED_COUNT}",
                    sampled.count
                ));
            }
        }
    }

    let points = match profile {
        Profile::Full => 60,
        Profile::Quick => 30,
    };
    let mut rng = SplitMix64::substream(9, u64::MAX);
    let small: Vec<u64> = rng.subset(sp.n(), points).into_iter().map(u64::from).collect();
    let exact = census_exact(&sp, &small, 3, &caps).expect("within caps");
    let mut seen: HashSet<EdgeNormVector> = HashSet::new();
    let mut nondeg = 0u128;
    for &a in &small {
        for &b in &small {
            for &c in &small {
                for &t in &small {
                    let tuple: Vec<Vec<Elem>> =
                        [a, b, c, t].iter().map(|&x| sp.decode(x)).collect();
                    if is_nondegenerate(&sp, &tuple).expect("shape ok") {
                        nondeg += 1;
                        seen.insert(edge_norm_vector(&sp, &[a, b, c, t]).unwrap());
                    }
                }
            }
        }
    }
    let census_set: HashSet<EdgeNormVector> = exact.realized.iter().cloned().collect();
    if census_set != seen || exact.nondegenerate_tuples.0 != nondeg {
        failures.push(format!(
            "{points}-point census: pruned {} classes / {} tuples, naive {} / {nondeg}",
            exact.count,
            exact.nondegenerate_tuples.0,
            seen.len()
        ));
    }
    let pass = failures.is_empty();
    let summary = if pass {
        format!(
            "sampled census found {} classes (budget {budget}), measured c {:.6}; {points}-point exact census matches naive scan",
            sampled.count, sampled.lower_bound_fraction
        )
    } else {
        failures.join("; ")
    };
    result(9, "main-theorem-census", pass, summary)
}

/// 10. The staged construction at q=5, k=3 on the full space keeps every
/// intermediate invariant and ends with a positive count.
fn c10_pipeline(_profile: Profile) -> CriterionResult {
    let caps = Caps::default();
    let sp = space(5, 5);
    let e: Vec<u64> = (0..sp.n()).collect();
    let rep = match proof_pipeline(&sp, &e, 3, &[1, 1, 1], 10, &caps) {
        Ok(r) => r,
        Err(err) => return result(10, "pipeline-consistency", false, format!("failed: {err}")),
    };
    let mut failures = Vec::new();
    if !rep.on_sphere_ok {
        failures.push("a sphere slice left its sphere".to_string());
    }
    if !rep.unit_norm_ok {
        failures.push("a rescaled point missed the unit sphere".to_string());
    }
    if !rep.half_ok {
        failures.push("2|E'_i| >= |E_i| failed".to_string());
    }
    for (i, (&es, ss)) in rep.e_sizes.iter().zip(&rep.sphere_sizes).enumerate() {
        if u128::from(es) != ss.0 {
            failures.push(format!("slice {i} has {es} points, sphere holds {}", ss.0));
        }
    }
    if !rep.positive {
        failures.push("end count is zero".to_string());
    }
    let pass = failures.is_empty();
    let summary = if pass {
        format!(
            "|E_i|={:?}, |E'_i|={:?}, end count {} over {} patterns",
            rep.e_sizes,
            rep.e_prime_sizes,
            rep.end_total.0,
            rep.pattern_counts.len()
        )
    } else {
        failures.join("; ")
    };
    result(10, "pipeline-consistency", pass, summary)
}
