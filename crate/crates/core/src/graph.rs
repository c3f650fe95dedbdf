//! The Euclidean graphs G_q(a) on F_q^d and the norm coloring.
//!
//! G_q(a) is the Cayley graph on the additive group of F_q^d whose
//! connection set is the punctured sphere S_a ∖ {0}; the set is symmetric
//! (S_a = −S_a), so the graph is undirected and |a|-regular with valency
//! |S_a| minus one exactly when a = 0. The norm coloring assigns the pair
//! {x, y} the color ||x − y||, so color class a is G_q(a).
//!
//! Spectra come from two independent routes. The character route evaluates,
//! for every frequency m, λ_m = Σ_{s ∈ S} ψ(m·s) with ψ(t) =
//! e^{2πi·Tr(t)/p}; these are all eigenvalues of any Cayley graph on an
//! abelian group, listed with the right multiplicity as m runs over the
//! whole space. The dense route diagonalizes the adjacency matrix. Both are
//! compared as multisets in tests and in the acceptance suite.

use crate::field::Elem;
use crate::geometry::{sphere, GeometryError, PointTable, Space};
use crate::spectra;
use crate::Caps;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::TAU;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("dense spectrum is gated to n <= {max}, graph has n = {n}")]
    DenseTooLarge { n: u64, max: u64 },
    #[error("character sum at m = {m} has imaginary residual {imag:e} (tolerance {tol:e})")]
    ImaginaryResidual { m: u64, imag: f64, tol: f64 },
}

/// Residual tolerance for the imaginary part of character sums, which are
/// exactly real for a symmetric connection set.
pub const IMAG_TOL: f64 = 1e-9;

/// Dense eigensolves are quadratic in memory; this keeps them at desk scale.
pub const DENSE_MAX_N: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumMethod {
    CharacterSum,
    Dense,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub q: u64,
    pub d: usize,
    pub a: Elem,
    pub n: u64,
    pub valency: u64,
    /// (value, multiplicity), ascending; multiplicities sum to n.
    pub eigenvalues: Vec<(f64, usize)>,
    pub trivial_eigenvalue: f64,
    pub max_nontrivial_abs: f64,
    /// 2·q^{(d−1)/2}.
    pub bound: f64,
    pub method: SpectrumMethod,
}

/// True iff every eigenvalue other than the trivial one is within the bound
/// (plus a hair of floating slack); also returns the margin
/// bound − max_nontrivial_abs.
pub fn check_ramanujan_bound(report: &SpectrumReport) -> (bool, f64) {
    let margin = report.bound - report.max_nontrivial_abs;
    (margin >= -IMAG_TOL, margin)
}

pub struct EuclideanGraph {
    space: Space,
    a: Elem,
    /// Connection set as sorted point indices, origin excluded.
    connection: Vec<u64>,
    /// Flat coordinates of the connection set (d per entry).
    conn_coords: Vec<u32>,
    /// Membership bitmap over point indices.
    conn_mask: Vec<u64>,
}

pub fn build_graph(space: &Space, a: Elem, caps: &Caps) -> Result<EuclideanGraph, GraphError> {
    let s = sphere(space, a, caps)?;
    let connection: Vec<u64> = s.points.into_iter().filter(|&p| p != 0).collect();
    let d = space.d();
    let mut conn_coords = Vec::with_capacity(connection.len() * d);
    for &p in &connection {
        conn_coords.extend(space.decode(p).iter().map(|&c| c as u32));
    }
    let mut conn_mask = vec![0u64; (space.n() as usize + 63) / 64];
    for &p in &connection {
        conn_mask[(p / 64) as usize] |= 1 << (p % 64);
    }
    Ok(EuclideanGraph { space: space.clone(), a, connection, conn_coords, conn_mask })
}

impl EuclideanGraph {
    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn a(&self) -> Elem {
        self.a
    }

    pub fn n(&self) -> u64 {
        self.space.n()
    }

    pub fn valency(&self) -> u64 {
        self.connection.len() as u64
    }

    pub fn connection(&self) -> &[u64] {
        &self.connection
    }

    /// The certified eigenvalue bound 2·q^{(d−1)/2}.
    pub fn lambda_bound(&self) -> f64 {
        2.0 * (self.space.q() as f64).powf((self.space.d() as f64 - 1.0) / 2.0)
    }

    pub fn is_edge(&self, u: u64, v: u64) -> bool {
        if u == v {
            return false;
        }
        let diff = self.space.encode(&self.space.sub_points(
            &self.space.decode(u),
            &self.space.decode(v),
        ));
        self.conn_mask[(diff / 64) as usize] >> (diff % 64) & 1 == 1
    }

    /// Calls `f` with every neighbor v + s of v.
    pub fn for_each_neighbor(&self, v: u64, mut f: impl FnMut(u64)) {
        let space = &self.space;
        let field = space.field();
        let d = space.d();
        let vc = space.decode(v);
        let mut w = vec![0u64; d];
        for s in self.conn_coords.chunks_exact(d) {
            for i in 0..d {
                w[i] = field.add(vc[i], s[i] as u64);
            }
            f(space.encode(&w));
        }
    }

    /// λ_m = Σ_{s ∈ S} ψ(m·s) for every m, by table-driven dot products.
    /// Errors if any sum's imaginary part exceeds [`IMAG_TOL`].
    pub fn character_spectrum(&self) -> Result<SpectrumReport, GraphError> {
        let space = &self.space;
        let field = space.field();
        let (q, d, n) = (space.q() as usize, space.d(), space.n() as usize);
        let p = field.p();

        let psi: Vec<Complex64> = (0..q as u64)
            .map(|t| {
                let angle = TAU * field.trace(t) as f64 / p as f64;
                Complex64::new(angle.cos(), angle.sin())
            })
            .collect();
        let mul: Vec<u32> =
            (0..(q * q) as u64).map(|i| field.mul(i / q as u64, i % q as u64) as u32).collect();
        let add: Vec<u32> =
            (0..(q * q) as u64).map(|i| field.add(i / q as u64, i % q as u64) as u32).collect();

        let conn = &self.conn_coords;
        let lambdas: Vec<(f64, f64)> = (0..n as u64)
            .into_par_iter()
            .map(|m| {
                let mc: Vec<usize> =
                    space.decode(m).iter().map(|&c| c as usize * q).collect();
                let mut hist = vec![0u32; q];
                for s in conn.chunks_exact(d) {
                    let mut acc = 0u32;
                    for i in 0..d {
                        acc = add[acc as usize * q + mul[mc[i] + s[i] as usize] as usize];
                    }
                    hist[acc as usize] += 1;
                }
                let mut z = Complex64::new(0.0, 0.0);
                for t in 0..q {
                    if hist[t] != 0 {
                        z += psi[t] * hist[t] as f64;
                    }
                }
                (z.re, z.im)
            })
            .collect();

        for (m, &(_, im)) in lambdas.iter().enumerate() {
            if im.abs() > IMAG_TOL {
                return Err(GraphError::ImaginaryResidual { m: m as u64, imag: im, tol: IMAG_TOL });
            }
        }
        let values: Vec<f64> = lambdas.iter().map(|&(re, _)| re).collect();
        let trivial = values[0];
        debug_assert!((trivial - self.valency() as f64).abs() <= IMAG_TOL);
        let max_nontrivial_abs =
            values[1..].iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let mut sorted = values;
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(SpectrumReport {
            q: space.q(),
            d,
            a: self.a,
            n: n as u64,
            valency: self.valency(),
            eigenvalues: spectra::group_multiplicities(&sorted, IMAG_TOL),
            trivial_eigenvalue: trivial,
            max_nontrivial_abs,
            bound: self.lambda_bound(),
            method: SpectrumMethod::CharacterSum,
        })
    }

    /// Full adjacency matrix eigensolve; the oracle for the character route.
    pub fn dense_spectrum(&self) -> Result<SpectrumReport, GraphError> {
        let n = self.space.n();
        if n > DENSE_MAX_N {
            return Err(GraphError::DenseTooLarge { n, max: DENSE_MAX_N });
        }
        let n = n as usize;
        let mut mat = nalgebra::DMatrix::<f64>::zeros(n, n);
        for v in 0..n as u64 {
            self.for_each_neighbor(v, |w| {
                mat[(v as usize, w as usize)] = 1.0;
            });
        }
        debug_assert_eq!(mat.clone(), mat.transpose());
        let sorted = spectra::symmetric_eigenvalues(mat);
        // One copy of the valency is the trivial eigenvalue; the rest are
        // the nontrivial spectrum. For a regular graph the valency is the
        // largest eigenvalue.
        let trivial = *sorted.last().expect("n >= 1");
        let max_nontrivial_abs =
            sorted[..n - 1].iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        Ok(SpectrumReport {
            q: self.space.q(),
            d: self.space.d(),
            a: self.a,
            n: n as u64,
            valency: self.valency(),
            eigenvalues: spectra::group_multiplicities(&sorted, 1e-6),
            trivial_eigenvalue: trivial,
            max_nontrivial_abs,
            bound: self.lambda_bound(),
            method: SpectrumMethod::Dense,
        })
    }

    /// Raw sorted eigenvalue list (no grouping), for multiset comparisons.
    pub fn character_eigenvalues_sorted(&self) -> Result<Vec<f64>, GraphError> {
        let rep = self.character_spectrum()?;
        Ok(ungroup(&rep.eigenvalues))
    }

    pub fn dense_eigenvalues_sorted(&self) -> Result<Vec<f64>, GraphError> {
        let rep = self.dense_spectrum()?;
        Ok(ungroup(&rep.eigenvalues))
    }
}

fn ungroup(groups: &[(f64, usize)]) -> Vec<f64> {
    groups.iter().flat_map(|&(v, m)| std::iter::repeat(v).take(m)).collect()
}

/// The norm coloring of F_q^d: ordered pairs x ≠ y get color ||x − y||.
/// Color classes partition the pairs and class a is exactly G_q(a).
pub struct NormColoring {
    space: Space,
    table: PointTable,
    /// q×q field ops flattened for the hot path.
    sub: Vec<u32>,
    sq_add: (Vec<u32>, Vec<u32>),
    valencies: Vec<u64>,
}

impl NormColoring {
    pub fn new(space: &Space, caps: &Caps) -> Result<NormColoring, GraphError> {
        let table = space.point_table(caps)?;
        let field = space.field();
        let q = space.q();
        let sub: Vec<u32> = (0..q * q).map(|i| field.sub(i / q, i % q) as u32).collect();
        let sq: Vec<u32> = (0..q).map(|a| field.sq(a) as u32).collect();
        let add: Vec<u32> = (0..q * q).map(|i| field.add(i / q, i % q) as u32).collect();
        let mut counts = vec![0u64; q as usize];
        for &nm in &table.norms {
            counts[nm as usize] += 1;
        }
        counts[0] -= 1; // the origin is not a neighbor of anything
        Ok(NormColoring { space: space.clone(), table, sub, sq_add: (sq, add), valencies: counts })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn n(&self) -> usize {
        self.table.len()
    }

    pub fn color_count(&self) -> usize {
        self.space.q() as usize
    }

    /// ||u − v|| by table lookups; u ≠ v required only in the sense that the
    /// diagonal color 0 is never a pair color.
    #[inline]
    pub fn color(&self, u: usize, v: usize) -> usize {
        let d = self.table.d;
        let q = self.space.q() as usize;
        let (uc, vc) = (self.table.coords_of(u), self.table.coords_of(v));
        let (sq, add) = (&self.sq_add.0, &self.sq_add.1);
        let mut acc = 0u32;
        for i in 0..d {
            let diff = self.sub[uc[i] as usize * q + vc[i] as usize];
            acc = add[acc as usize * q + sq[diff as usize] as usize];
        }
        acc as usize
    }

    /// |S_a| − [a = 0]: the valency of color class a.
    pub fn color_valency(&self, a: usize) -> u64 {
        self.valencies[a]
    }

    /// Mean class valency (n−1)/q, the nominal valency of the coloring.
    pub fn nominal_valency(&self) -> f64 {
        (self.n() as f64 - 1.0) / self.color_count() as f64
    }

    /// The common certified bound for every class.
    pub fn lambda_bound(&self) -> f64 {
        2.0 * (self.space.q() as f64).powf((self.space.d() as f64 - 1.0) / 2.0)
    }

    pub fn point_table(&self) -> &PointTable {
        &self.table
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::geometry::sphere_size_formula;

    fn graph(q: u64, d: usize, a: Elem) -> EuclideanGraph {
        let space = Space::new(Field::new(q, 1).unwrap(), d).unwrap();
        build_graph(&space, a, &Caps::default()).unwrap()
    }

    #[test]
    fn frozen_valencies() {
        assert_eq!(graph(3, 2, 1).valency(), 4);
        assert_eq!(graph(3, 2, 0).valency(), 0);
        assert_eq!(graph(3, 3, 0).valency(), 8);
    }

    #[test]
    fn valency_matches_formula() {
        for q in [3u64, 5] {
            for d in [2usize, 3] {
                let f = Field::new(q, 1).unwrap();
                for a in 0..q {
                    let g = graph(q, d, a);
                    let expect =
                        sphere_size_formula(&f, d, a) - if a == 0 { 1 } else { 0 };
                    assert_eq!(g.valency() as u128, expect, "q={q} d={d} a={a}");
                }
            }
        }
    }

    #[test]
    fn frozen_spectrum_g3_1_d2() {
        let g = graph(3, 2, 1);
        let rep = g.character_spectrum().unwrap();
        let expect = [(-2.0, 4usize), (1.0, 4), (4.0, 1)];
        assert_eq!(rep.eigenvalues.len(), 3);
        for ((v, m), (ev, em)) in rep.eigenvalues.iter().zip(expect) {
            assert!((v - ev).abs() < 1e-9);
            assert_eq!(*m, em);
        }
        assert_eq!(rep.trivial_eigenvalue, 4.0);
        assert!((rep.max_nontrivial_abs - 2.0).abs() < 1e-9);
        let (ok, margin) = check_ramanujan_bound(&rep);
        assert!(ok);
        assert!((margin - (2.0 * 3.0f64.sqrt() - 2.0)).abs() < 1e-9);
    }

    #[test]
    fn character_and_dense_spectra_agree() {
        for (q, d) in [(3u64, 2usize), (5, 2), (3, 3)] {
            for a in 0..q {
                let g = graph(q, d, a);
                let c = g.character_eigenvalues_sorted().unwrap();
                let dn = g.dense_eigenvalues_sorted().unwrap();
                assert!(
                    spectra::multiset_close(&c, &dn, 1e-6),
                    "q={q} d={d} a={a}\nchar:  {c:?}\ndense: {dn:?}"
                );
            }
        }
    }

    #[test]
    fn eigenvalue_moment_identities() {
        // Σλ = 0 (no loops, a ≠ 0) and Σλ² = n·valency (edge count both ways).
        for a in 1..5u64 {
            let g = graph(5, 2, a);
            let vals = g.character_eigenvalues_sorted().unwrap();
            let sum: f64 = vals.iter().sum();
            let sq: f64 = vals.iter().map(|v| v * v).sum();
            assert!(sum.abs() < 1e-6, "a={a} sum={sum}");
            assert!(
                (sq - (g.n() * g.valency()) as f64).abs() < 1e-6,
                "a={a} sum sq={sq}"
            );
        }
    }

    #[test]
    fn empty_graph_spectrum_is_zero() {
        let g = graph(3, 2, 0);
        let rep = g.character_spectrum().unwrap();
        assert_eq!(rep.eigenvalues, vec![(0.0, 9)]);
        assert!(check_ramanujan_bound(&rep).0);
    }

    #[test]
    fn edges_and_neighbors_are_consistent() {
        let g = graph(5, 2, 2);
        let mut degree = vec![0u64; g.n() as usize];
        for v in 0..g.n() {
            let mut cnt = 0;
            g.for_each_neighbor(v, |w| {
                assert!(g.is_edge(v, w));
                assert!(g.is_edge(w, v), "symmetric");
                assert_ne!(v, w);
                cnt += 1;
            });
            degree[v as usize] = cnt;
            assert_eq!(cnt, g.valency());
        }
    }

    #[test]
    fn norm_coloring_matches_graphs() {
        let space = Space::new(Field::new(3, 1).unwrap(), 2).unwrap();
        let caps = Caps::default();
        let col = NormColoring::new(&space, &caps).unwrap();
        for a in 0..3u64 {
            let g = build_graph(&space, a, &caps).unwrap();
            assert_eq!(col.color_valency(a as usize), g.valency());
            for u in 0..9usize {
                for v in 0..9usize {
                    if u == v {
                        continue;
                    }
                    assert_eq!(
                        col.color(u, v) == a as usize,
                        g.is_edge(u as u64, v as u64),
                        "a={a} u={u} v={v}"
                    );
                }
            }
        }
        assert!((col.nominal_valency() - 8.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn dense_gate() {
        let space = Space::new(Field::new(3, 1).unwrap(), 8).unwrap();
        let g = build_graph(&space, 1, &Caps { enumeration: 1 << 20, work: 1 }).unwrap();
        assert!(matches!(g.dense_spectrum(), Err(GraphError::DenseTooLarge { .. })));
    }
}
