//! The association scheme on square-type anisotropic lines of F_q^d, d odd.
//!
//! Ω collects the 1-dimensional subspaces spanned by points of nonzero
//! square norm. Each such line carries exactly two unit points ±u; the
//! stored representative is the one with the smaller canonical index, and
//! every derived quantity is computed from the value set over both sign
//! choices so nothing depends on which of ±u was kept.
//!
//! Distinct lines [U], [V] with unit representatives fall into one of
//! (q+1)/2 relations, read off the pair {‖U+V‖, ‖U−V‖}:
//!
//!   R_1           0 is in the set (some U±V isotropic)
//!   R_{(q+1)/2}   both values are 2 (U ⊥ V)
//!   R_l           2 + α_l is in the set, α_l = 2ν^{1−l}, 2 ≤ l ≤ (q−1)/2
//!
//! Since ‖U+V‖ + ‖U−V‖ = 4, the classes are exhaustive and disjoint; the
//! classifier nevertheless scans all candidates and reports a construction
//! bug instead of guessing if no or several relations match.

use crate::field::Elem;
use crate::geometry::{GeometryError, Space};
use crate::mixing::{BitSet, Coloring, RegularGraph};
use crate::spectra;
use crate::Caps;
use nalgebra::DMatrix;
use serde::Serialize;
use std::collections::HashMap;
use thiserror::Error;

/// Dense relation matrices and spectra cap out here.
pub const MAX_LINES: usize = 4096;

const EIG_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum SchemeError {
    #[error("the line scheme needs odd dimension, got d = {0}")]
    EvenDimension(usize),
    #[error("{lines} lines exceed the dense relation cap {cap}")]
    TooLarge { lines: usize, cap: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("lines {i} and {j} with value set {{{s1}, {s2}}} match no relation")]
    NoRelation { i: usize, j: usize, s1: Elem, s2: Elem },
    #[error("lines {i} and {j} match relations {first} and {second}")]
    AmbiguousRelation { i: usize, j: usize, first: u8, second: u8 },
    #[error("relation {l} is irregular: line {line} has degree {found}, line 0 has {expected}")]
    Irregular { l: u8, line: usize, found: u64, expected: u64 },
    #[error("relation {l}: largest eigenvalue {top} does not match valency {valency}")]
    TrivialEigenvalue { l: u8, top: f64, valency: u64 },
}

/// The scheme: line representatives, the full relation matrix, and the
/// per-relation valencies, all fixed at build time.
#[derive(Debug, Clone)]
pub struct OmegaScheme {
    space: Space,
    reps: Vec<u64>,
    coords: Vec<u32>,
    rel: Vec<u8>,
    valencies: Vec<u64>,
    alphas: Vec<Option<Elem>>,
    line_index: HashMap<u64, u32>,
}

/// Enumerates Ω and classifies every pair of lines.
///
/// Lines are found projectively: each is visited once through its unique
/// spanning point with first nonzero coordinate 1, kept when its norm is a
/// nonzero square, and rescaled by 1/√norm to a unit point.
pub fn build_omega(space: &Space, caps: &Caps) -> Result<OmegaScheme, SchemeError> {
    let d = space.d();
    if d % 2 == 0 {
        return Err(SchemeError::EvenDimension(d));
    }
    let f = space.field().clone();
    let q = f.q();
    let table = space.point_table(caps)?;

    let chi: Vec<i32> = (0..q).map(|a| f.chi(a)).collect();
    let mut reps: Vec<u64> = Vec::new();
    for idx in 0..table.len() {
        let coords = table.coords_of(idx);
        let Some(first) = coords.iter().position(|&c| c != 0) else {
            continue;
        };
        if coords[first] != 1 {
            continue;
        }
        let t = table.norms[idx] as Elem;
        if chi[t as usize] != 1 {
            continue;
        }
        let s = f.sqrt(t).expect("square norm has a root");
        let si = f.inv(s).expect("nonzero");
        let unit: Vec<Elem> = coords.iter().map(|&c| f.mul(c as Elem, si)).collect();
        let u = space.encode(&unit);
        let nu = space.encode(&space.neg_point(&unit));
        reps.push(u.min(nu));
    }
    reps.sort_unstable();
    debug_assert!(reps.windows(2).all(|w| w[0] < w[1]), "one projective point per line");

    let lines = reps.len();
    if lines > MAX_LINES {
        return Err(SchemeError::TooLarge { lines, cap: MAX_LINES });
    }

    let mut coords = vec![0u32; lines * d];
    let mut line_index = HashMap::with_capacity(2 * lines);
    for (i, &r) in reps.iter().enumerate() {
        let c = space.decode(r);
        for (slot, &x) in coords[i * d..(i + 1) * d].iter_mut().zip(&c) {
            *slot = x as u32;
        }
        line_index.insert(r, i as u32);
        line_index.insert(space.encode(&space.neg_point(&c)), i as u32);
    }

    // α_l and the matching targets 2 + α_l for the middle relations.
    let rel_count = ((q + 1) / 2) as usize;
    let two = f.from_int(2);
    let nu_inv = f.inv(f.nu()).expect("generator is a unit");
    let mut alphas: Vec<Option<Elem>> = vec![None; rel_count];
    let mut targets: Vec<(u8, Elem)> = Vec::new();
    for l in 2..=((q - 1) / 2) {
        let alpha = f.mul(two, f.pow(nu_inv, l - 1));
        alphas[l as usize - 1] = Some(alpha);
        targets.push((l as u8, f.add(two, alpha)));
    }

    let add: Vec<u32> = (0..q * q).map(|i| f.add(i / q, i % q) as u32).collect();
    let sub: Vec<u32> = (0..q * q).map(|i| f.sub(i / q, i % q) as u32).collect();
    let sq: Vec<u32> = (0..q).map(|a| f.sq(a) as u32).collect();
    let qq = q as usize;
    let pair_norms = |i: usize, j: usize| -> (Elem, Elem) {
        let (u, v) = (&coords[i * d..(i + 1) * d], &coords[j * d..(j + 1) * d]);
        let (mut s1, mut s2) = (0u32, 0u32);
        for (&a, &b) in u.iter().zip(v) {
            s1 = add[s1 as usize * qq + sq[add[a as usize * qq + b as usize] as usize] as usize];
            s2 = add[s2 as usize * qq + sq[sub[a as usize * qq + b as usize] as usize] as usize];
        }
        (s1 as Elem, s2 as Elem)
    };

    let mut rel = vec![0u8; lines * lines];
    for i in 0..lines {
        for j in i + 1..lines {
            let (s1, s2) = pair_norms(i, j);
            debug_assert_eq!(f.add(s1, s2), f.from_int(4), "unit reps: ‖U+V‖ + ‖U−V‖ = 4");
            let l = if s1 == 0 || s2 == 0 {
                1u8
            } else if s1 == two && s2 == two {
                rel_count as u8
            } else {
                let mut found: Option<u8> = None;
                for &(l, target) in &targets {
                    if s1 == target || s2 == target {
                        if let Some(first) = found {
                            return Err(SchemeError::AmbiguousRelation {
                                i,
                                j,
                                first,
                                second: l,
                            });
                        }
                        found = Some(l);
                    }
                }
                found.ok_or(SchemeError::NoRelation { i, j, s1, s2 })?
            };
            rel[i * lines + j] = l;
            rel[j * lines + i] = l;
        }
    }

    // Regularity, relation by relation, against line 0's degrees.
    let mut valencies = vec![0u64; rel_count];
    for &r in &rel[..lines] {
        if r != 0 {
            valencies[r as usize - 1] += 1;
        }
    }
    for line in 1..lines {
        let mut deg = vec![0u64; rel_count];
        for &r in &rel[line * lines..(line + 1) * lines] {
            if r != 0 {
                deg[r as usize - 1] += 1;
            }
        }
        for (l, (&found, &expected)) in deg.iter().zip(&valencies).enumerate() {
            if found != expected {
                return Err(SchemeError::Irregular { l: l as u8 + 1, line, found, expected });
            }
        }
    }

    Ok(OmegaScheme { space: space.clone(), reps, coords, rel, valencies, alphas, line_index })
}

impl OmegaScheme {
    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    /// Number of non-identity relations, (q+1)/2.
    pub fn relation_count(&self) -> usize {
        self.valencies.len()
    }

    /// Canonical unit representative of line i.
    pub fn rep(&self, i: usize) -> u64 {
        self.reps[i]
    }

    pub fn reps(&self) -> &[u64] {
        &self.reps
    }

    pub fn rep_coords(&self, i: usize) -> &[u32] {
        let d = self.space.d();
        &self.coords[i * d..(i + 1) * d]
    }

    /// Relation of a pair of lines; 0 is the identity.
    #[inline]
    pub fn relation(&self, i: usize, j: usize) -> u8 {
        self.rel[i * self.reps.len() + j]
    }

    pub fn valency(&self, l: u8) -> u64 {
        self.valencies[l as usize - 1]
    }

    /// α_l for the middle relations, None for l = 1 and l = (q+1)/2.
    pub fn alpha(&self, l: u8) -> Option<Elem> {
        self.alphas[l as usize - 1]
    }

    /// The line through a point, if the point lies on one of Ω's lines as
    /// a unit vector.
    pub fn line_of(&self, point: u64) -> Option<u32> {
        self.line_index.get(&point).copied()
    }

    /// |Ω| measured against its q^{d−1}/2 magnitude.
    pub fn size_ratio(&self) -> f64 {
        let scale = (self.space.q() as f64).powi(self.space.d() as i32 - 1) / 2.0;
        self.reps.len() as f64 / scale
    }

    /// One relation as a plain regular graph; λ from a spectrum report.
    pub fn relation_graph(&self, l: u8, lambda: f64) -> SchemeRelationGraph<'_> {
        SchemeRelationGraph { scheme: self, l, lambda }
    }

    /// The (q+1)/2-coloring of pairs of lines; λ bounds every class.
    pub fn coloring(&self, lambda: f64) -> SchemeColoring<'_> {
        SchemeColoring { scheme: self, lambda }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RelationReport {
    pub l: u8,
    pub alpha: Option<Elem>,
    pub valency: u64,
    pub max_nontrivial_abs: f64,
    /// max_nontrivial_abs / q^{(d−2)/2}: the measured spectral constant.
    pub measured_c: f64,
    /// valency / q^{d−2}: the measured valency constant.
    pub density_k: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SchemeReport {
    pub q: u64,
    pub d: usize,
    pub omega_size: usize,
    pub size_ratio: f64,
    pub relations: Vec<RelationReport>,
    pub partition_ok: bool,
    pub symmetry_ok: bool,
}

impl SchemeReport {
    /// Largest nontrivial |eigenvalue| over all relations: the certified
    /// λ for mixing statistics on the scheme.
    pub fn max_lambda(&self) -> f64 {
        self.relations.iter().map(|r| r.max_nontrivial_abs).fold(0.0, f64::max)
    }
}

/// Dense spectral report over every relation graph. The trivial eigenvalue
/// of each must equal its valency; the remaining extremes are measured
/// against q^{(d−2)/2}.
pub fn scheme_report(scheme: &OmegaScheme) -> Result<SchemeReport, SchemeError> {
    let n = scheme.len();
    let q = scheme.space.q();
    let d = scheme.space.d();

    let mut symmetry_ok = true;
    let mut partition_ok = true;
    for i in 0..n {
        for j in 0..n {
            let r = scheme.relation(i, j);
            symmetry_ok &= r == scheme.relation(j, i);
            partition_ok &= (r == 0) == (i == j) && (r as usize) <= scheme.relation_count();
        }
    }
    partition_ok &= scheme.valencies.iter().sum::<u64>() == n as u64 - 1;

    let half_power = (q as f64).powf((d as f64 - 2.0) / 2.0);
    let full_power = (q as f64).powi(d as i32 - 2);
    let mut relations = Vec::new();
    for l in 1..=scheme.relation_count() as u8 {
        let mut adj = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if scheme.relation(i, j) == l {
                    adj[(i, j)] = 1.0;
                }
            }
        }
        let eigs = spectra::symmetric_eigenvalues(adj);
        let valency = scheme.valency(l);
        let top = *eigs.last().expect("nonempty spectrum");
        if (top - valency as f64).abs() > EIG_TOL {
            return Err(SchemeError::TrivialEigenvalue { l, top, valency });
        }
        let max_nontrivial_abs = eigs[..n - 1]
            .iter()
            .map(|e| e.abs())
            .fold(0.0, f64::max);
        relations.push(RelationReport {
            l,
            alpha: scheme.alpha(l),
            valency,
            max_nontrivial_abs,
            measured_c: max_nontrivial_abs / half_power,
            density_k: valency as f64 / full_power,
        });
    }

    Ok(SchemeReport {
        q,
        d,
        omega_size: n,
        size_ratio: scheme.size_ratio(),
        relations,
        partition_ok,
        symmetry_ok,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DistanceViolation {
    pub i: usize,
    pub j: usize,
    pub l: u8,
    pub values: (Elem, Elem),
}

#[derive(Debug, Clone, Serialize)]
pub struct DistanceReport {
    pub checked_pairs: u64,
    pub ok: bool,
    pub violations: Vec<DistanceViolation>,
}

/// For every pair in a middle relation R_l, both ‖U+V‖ and ‖U−V‖ must lie
/// in {2+α_l, 2−α_l}. Vacuous at q = 3, where no middle relation exists.
pub fn verify_distance_relation(scheme: &OmegaScheme) -> DistanceReport {
    let f = scheme.space.field();
    let two = f.from_int(2);
    let n = scheme.len();
    let mut checked = 0u64;
    let mut violations = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let l = scheme.relation(i, j);
            let Some(alpha) = scheme.alpha(l) else {
                continue;
            };
            checked += 1;
            let (u, v) = (scheme.rep_coords(i), scheme.rep_coords(j));
            let plus: Vec<Elem> =
                u.iter().zip(v).map(|(&a, &b)| f.add(a as Elem, b as Elem)).collect();
            let minus: Vec<Elem> =
                u.iter().zip(v).map(|(&a, &b)| f.sub(a as Elem, b as Elem)).collect();
            let s1 = scheme.space.norm(&plus);
            let s2 = scheme.space.norm(&minus);
            let hi = f.add(two, alpha);
            let lo = f.sub(two, alpha);
            let member = |s: Elem| s == hi || s == lo;
            if !(member(s1) && member(s2)) && violations.len() < 16 {
                violations.push(DistanceViolation { i, j, l, values: (s1, s2) });
            }
        }
    }
    DistanceReport { checked_pairs: checked, ok: violations.is_empty(), violations }
}

/// A single relation viewed as a regular graph on the lines.
pub struct SchemeRelationGraph<'a> {
    scheme: &'a OmegaScheme,
    l: u8,
    lambda: f64,
}

impl RegularGraph for SchemeRelationGraph<'_> {
    fn n(&self) -> usize {
        self.scheme.len()
    }

    fn valency(&self) -> u64 {
        self.scheme.valency(self.l)
    }

    fn lambda(&self) -> f64 {
        self.lambda
    }

    fn count_neighbors_in(&self, v: usize, set: &BitSet) -> u64 {
        let n = self.scheme.len();
        let row = &self.scheme.rel[v * n..(v + 1) * n];
        let mut cnt = 0;
        for (w, &r) in row.iter().enumerate() {
            if r == self.l && set.contains(w) {
                cnt += 1;
            }
        }
        cnt
    }
}

/// The scheme's pair coloring: color l−1 for relation R_l.
pub struct SchemeColoring<'a> {
    scheme: &'a OmegaScheme,
    lambda: f64,
}

impl Coloring for SchemeColoring<'_> {
    fn n(&self) -> usize {
        self.scheme.len()
    }

    fn color_count(&self) -> usize {
        self.scheme.relation_count()
    }

    fn color(&self, u: usize, v: usize) -> usize {
        debug_assert_ne!(u, v);
        self.scheme.relation(u, v) as usize - 1
    }

    fn color_valency(&self, c: usize) -> u64 {
        self.scheme.valencies[c]
    }

    fn nominal_valency(&self) -> f64 {
        (self.scheme.len() as f64 - 1.0) / self.scheme.relation_count() as f64
    }

    fn lambda_bound(&self) -> f64 {
        self.lambda
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::geometry::{sphere, sphere_size_formula};
    use crate::mixing::{
        count_colored_stars, edge_discrepancy, neighborhood_variance, VertexSet,
    };
    use crate::rng::SplitMix64;

    fn scheme(q: u64, d: usize) -> OmegaScheme {
        let f = Field::from_order(q).unwrap();
        let space = Space::new(f, d).unwrap();
        build_omega(&space, &Caps::default()).unwrap()
    }

    #[test]
    fn frozen_sizes() {
        assert_eq!(scheme(3, 3).len(), 3);
        assert_eq!(scheme(3, 5).len(), 45);
        assert_eq!(scheme(5, 5).len(), 325);
        assert_eq!(scheme(7, 5).len(), 1225);
    }

    #[test]
    fn size_is_half_the_unit_sphere() {
        for (q, d) in [(3u64, 3usize), (5, 3), (7, 3), (3, 5), (5, 5), (9, 3)] {
            let f = Field::from_order(q).unwrap();
            let expect = sphere_size_formula(&f, d, 1) / 2;
            assert_eq!(scheme(q, d).len() as u128, expect, "q={q} d={d}");
        }
    }

    #[test]
    fn representatives_are_canonical_unit_points() {
        let om = scheme(5, 3);
        let space = om.space().clone();
        for i in 0..om.len() {
            let c = space.decode(om.rep(i));
            assert_eq!(space.norm(&c), 1);
            let neg = space.encode(&space.neg_point(&c));
            assert!(om.rep(i) < neg, "kept the larger of ±u");
            assert_eq!(om.line_of(om.rep(i)), Some(i as u32));
            assert_eq!(om.line_of(neg), Some(i as u32));
        }
    }

    #[test]
    fn every_unit_point_lies_on_exactly_one_line() {
        let om = scheme(3, 5);
        let unit = sphere(om.space(), 1, &Caps::default()).unwrap();
        assert_eq!(unit.points.len(), 2 * om.len());
        for &p in &unit.points {
            assert!(om.line_of(p).is_some());
        }
        assert_eq!(om.line_of(0), None);
    }

    #[test]
    fn relations_partition_and_are_symmetric() {
        for (q, d) in [(3u64, 5usize), (5, 3), (7, 3)] {
            let om = scheme(q, d);
            let n = om.len();
            let mut per_relation = vec![0u64; om.relation_count()];
            for i in 0..n {
                assert_eq!(om.relation(i, i), 0);
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let r = om.relation(i, j);
                    assert!(r >= 1 && r as usize <= om.relation_count(), "q={q} d={d}");
                    assert_eq!(r, om.relation(j, i));
                    per_relation[r as usize - 1] += 1;
                }
            }
            assert_eq!(per_relation.iter().sum::<u64>(), (n * (n - 1)) as u64);
            for (l0, &pairs) in per_relation.iter().enumerate() {
                assert_eq!(pairs, om.valency(l0 as u8 + 1) * n as u64);
            }
        }
    }

    #[test]
    fn q3_pairs_split_between_isotropic_and_orthogonal() {
        let om = scheme(3, 5);
        assert_eq!(om.relation_count(), 2);
        assert_eq!(om.alpha(1), None);
        assert_eq!(om.alpha(2), None);
        assert_eq!(om.valency(1) + om.valency(2), 44);
    }

    #[test]
    fn sum_of_pair_norms_is_four() {
        let om = scheme(5, 3);
        let space = om.space();
        let f = space.field();
        for i in 0..om.len() {
            for j in 0..om.len() {
                if i == j {
                    continue;
                }
                let u = space.decode(om.rep(i));
                let v = space.decode(om.rep(j));
                let s1 = space.norm(&space.add_points(&u, &v));
                let s2 = space.norm(&space.sub_points(&u, &v));
                assert_eq!(f.add(s1, s2), f.from_int(4));
            }
        }
    }

    #[test]
    fn classification_ignores_the_sign_choice() {
        let om = scheme(5, 3);
        let space = om.space();
        let f = space.field();
        let two = f.from_int(2);
        for i in 0..om.len() {
            for j in i + 1..om.len() {
                let u = space.decode(om.rep(i));
                // Flip U's sign: the value set {‖U+V‖, ‖U−V‖} must swap in
                // place and land in the same relation.
                let v = space.decode(om.rep(j));
                let nu = space.neg_point(&u);
                let s1 = space.norm(&space.add_points(&nu, &v));
                let s2 = space.norm(&space.sub_points(&nu, &v));
                let l = om.relation(i, j);
                match l {
                    1 => assert!(s1 == 0 || s2 == 0),
                    l if l as usize == om.relation_count() => {
                        assert!(s1 == two && s2 == two)
                    }
                    _ => {
                        let t = f.add(two, om.alpha(l).unwrap());
                        assert!(s1 == t || s2 == t);
                    }
                }
            }
        }
    }

    #[test]
    fn report_spectra_and_constants() {
        let om = scheme(3, 5);
        let rep = scheme_report(&om).unwrap();
        assert_eq!(rep.omega_size, 45);
        assert!(rep.partition_ok && rep.symmetry_ok);
        assert_eq!(rep.relations.len(), 2);
        for r in &rep.relations {
            // d=5: the measured constant stays near 2, well under 4.
            assert!(r.measured_c < 4.0, "relation {} c = {}", r.l, r.measured_c);
            assert!(r.max_nontrivial_abs < r.valency as f64);
        }
        assert!(rep.max_lambda() > 0.0);
    }

    #[test]
    fn report_catches_q5_alphas() {
        let om = scheme(5, 5);
        // ν = 2 in F_5, so α_2 = 2·2^{−1} = 1.
        assert_eq!(om.alpha(2), Some(1));
        let rep = scheme_report(&om).unwrap();
        assert_eq!(rep.relations.len(), 3);
        assert_eq!(rep.relations[1].alpha, Some(1));
        for r in &rep.relations {
            assert!(r.measured_c < 4.0);
        }
    }

    #[test]
    fn distance_relation_membership() {
        // q=3: no middle relations, vacuously fine.
        let rep3 = verify_distance_relation(&scheme(3, 5));
        assert!(rep3.ok);
        assert_eq!(rep3.checked_pairs, 0);

        for (q, d) in [(5u64, 3usize), (5, 5), (7, 3)] {
            let rep = verify_distance_relation(&scheme(q, d));
            assert!(rep.ok, "q={q} d={d}: {:?}", rep.violations);
            assert!(rep.checked_pairs > 0);
        }
    }

    #[test]
    fn size_ratio_tightens_with_q() {
        let mut gaps = Vec::new();
        for q in [3u64, 5, 7, 9] {
            gaps.push((scheme(q, 5).size_ratio() - 1.0).abs());
        }
        for w in gaps.windows(2) {
            assert!(w[1] < w[0], "ratio gaps not shrinking: {gaps:?}");
        }
    }

    #[test]
    fn relation_graphs_mix_like_expanders() {
        let om = scheme(3, 5);
        let rep = scheme_report(&om).unwrap();
        let mut rng = SplitMix64::new(21);
        for r in &rep.relations {
            let g = om.relation_graph(r.l, r.max_nontrivial_abs);
            for _ in 0..20 {
                let b = VertexSet::random(45, 1 + rng.below(44) as usize, &mut rng);
                let c = VertexSet::random(45, 1 + rng.below(44) as usize, &mut rng);
                assert!(neighborhood_variance(&g, &b).unwrap().holds);
                assert!(edge_discrepancy(&g, &b, &c).unwrap().holds);
            }
        }
    }

    #[test]
    fn scheme_coloring_supports_star_counts() {
        let om = scheme(3, 5);
        let rep = scheme_report(&om).unwrap();
        let col = om.coloring(rep.max_lambda());
        let full = VertexSet::full(45);
        for c in 0..col.color_count() {
            let out = count_colored_stars(&col, &full, &[full.clone()], &[c], &Caps::default())
                .unwrap();
            assert_eq!(out.exact_count.0, 45 * om.valency(c as u8 + 1) as u128);
        }
    }

    #[test]
    fn rejects_even_dimension_and_oversize() {
        let f = Field::new(3, 1).unwrap();
        let space = Space::new(f, 4).unwrap();
        assert!(matches!(
            build_omega(&space, &Caps::default()),
            Err(SchemeError::EvenDimension(4))
        ));

        let f11 = Field::new(11, 1).unwrap();
        let space11 = Space::new(f11, 5).unwrap();
        assert!(matches!(
            build_omega(&space11, &Caps::default()),
            Err(SchemeError::TooLarge { lines: 7381, cap: MAX_LINES })
        ));
    }
}
