//! Points, spheres and isometries of F_q^d with the norm ||x|| = Σ x_i².
//!
//! Points are canonical indices in [0, q^d): digit i of the index in base q
//! is the canonical index of coordinate i. Spheres S_t = { x : ||x|| = t }
//! are enumerated exactly, by a straight scan for d ≤ 4 and by
//! meet-in-the-middle on coordinate halves above that; their sizes also come
//! from a closed form in the quadratic character, and tests require the two
//! to agree everywhere.

use crate::field::{Elem, Field};
use crate::rng::SplitMix64;
use crate::Caps;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("q^d does not fit in 64 bits (q = {q}, d = {d})")]
    SpaceTooLarge { q: u64, d: usize },
    #[error("enumeration needs {needed} points but the cap is {cap}; use the closed-form size instead")]
    EnumerationCap { needed: u64, cap: u64 },
    #[error("point has {got} coordinates, expected {expected}")]
    PointDimension { expected: usize, got: usize },
    #[error("orthogonal enumeration is gated to d in {{2,3}} and q <= 7 (got q = {q}, d = {d})")]
    OrthogonalUnsupported { q: u64, d: usize },
    #[error("tuple of {points} points in dimension {d}: need 2 <= points <= d+1")]
    BadTupleSize { points: usize, d: usize },
}

/// F_q^d with point index codecs and coordinate arithmetic.
#[derive(Clone, Debug)]
pub struct Space {
    field: Field,
    d: usize,
    n: u64,
}

impl Space {
    pub fn new(field: Field, d: usize) -> Result<Space, GeometryError> {
        if d == 0 {
            return Err(GeometryError::ZeroDimension);
        }
        let q = field.q();
        let mut n: u64 = 1;
        for _ in 0..d {
            n = n
                .checked_mul(q)
                .ok_or(GeometryError::SpaceTooLarge { q, d })?;
        }
        Ok(Space { field, d, n })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn q(&self) -> u64 {
        self.field.q()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of points q^d.
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn decode(&self, mut idx: u64) -> Vec<Elem> {
        debug_assert!(idx < self.n);
        let q = self.q();
        let mut out = Vec::with_capacity(self.d);
        for _ in 0..self.d {
            out.push(idx % q);
            idx /= q;
        }
        out
    }

    pub fn encode(&self, coords: &[Elem]) -> u64 {
        debug_assert_eq!(coords.len(), self.d);
        let q = self.q();
        let mut idx = 0u64;
        for &c in coords.iter().rev() {
            debug_assert!(c < q);
            idx = idx * q + c;
        }
        idx
    }

    pub fn norm(&self, coords: &[Elem]) -> Elem {
        let f = &self.field;
        coords.iter().fold(0, |acc, &c| f.add(acc, f.sq(c)))
    }

    pub fn dot(&self, x: &[Elem], y: &[Elem]) -> Elem {
        let f = &self.field;
        x.iter().zip(y).fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
    }

    pub fn sub_points(&self, x: &[Elem], y: &[Elem]) -> Vec<Elem> {
        x.iter().zip(y).map(|(&a, &b)| self.field.sub(a, b)).collect()
    }

    pub fn add_points(&self, x: &[Elem], y: &[Elem]) -> Vec<Elem> {
        x.iter().zip(y).map(|(&a, &b)| self.field.add(a, b)).collect()
    }

    pub fn scale_point(&self, c: Elem, x: &[Elem]) -> Vec<Elem> {
        x.iter().map(|&a| self.field.mul(c, a)).collect()
    }

    pub fn neg_point(&self, x: &[Elem]) -> Vec<Elem> {
        x.iter().map(|&a| self.field.neg(a)).collect()
    }

    pub fn random_point(&self, rng: &mut SplitMix64) -> Vec<Elem> {
        (0..self.d).map(|_| rng.below(self.q())).collect()
    }

    /// Decoded coordinates and norms of every point, for hot loops.
    pub fn point_table(&self, caps: &Caps) -> Result<PointTable, GeometryError> {
        if self.n > caps.enumeration {
            return Err(GeometryError::EnumerationCap { needed: self.n, cap: caps.enumeration });
        }
        let (n, d, q) = (self.n as usize, self.d, self.q());
        let f = &self.field;
        let sq: Vec<u32> = (0..q).map(|a| f.sq(a) as u32).collect();
        let add: Vec<u32> = (0..q * q).map(|i| f.add(i / q, i % q) as u32).collect();
        let mut coords = vec![0u32; n * d];
        let mut norms = vec![0u32; n];
        let mut digits = vec![0u32; d];
        for idx in 0..n {
            coords[idx * d..(idx + 1) * d].copy_from_slice(&digits);
            let mut nm = 0u32;
            for &c in &digits {
                nm = add[(nm as u64 * q + sq[c as usize] as u64) as usize];
            }
            norms[idx] = nm;
            // Odometer increment in base q.
            for digit in digits.iter_mut() {
                *digit += 1;
                if *digit as u64 == q {
                    *digit = 0;
                } else {
                    break;
                }
            }
        }
        Ok(PointTable { d, coords, norms })
    }
}

/// Flat per-point data: `coords_of(i)` are the digit coordinates of point i,
/// `norms[i]` its norm.
pub struct PointTable {
    pub d: usize,
    coords: Vec<u32>,
    pub norms: Vec<u32>,
}

impl PointTable {
    #[inline]
    pub fn coords_of(&self, idx: usize) -> &[u32] {
        &self.coords[idx * self.d..(idx + 1) * self.d]
    }

    pub fn len(&self) -> usize {
        self.norms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.norms.is_empty()
    }
}

/// The sphere { x : ||x|| = t }, with points listed as sorted indices.
#[derive(Debug, Clone)]
pub struct Sphere {
    pub t: Elem,
    pub points: Vec<u64>,
}

impl Sphere {
    pub fn size(&self) -> u64 {
        self.points.len() as u64
    }
}

/// Exhaustive enumeration of S_t. Straight scan for d ≤ 4; for d > 4 the
/// coordinate halves are enumerated separately, bucketed by norm, and glued
/// along t = t₁ + t₂, which costs O(q^⌈d/2⌉ + |S_t|) instead of O(q^d).
pub fn sphere(space: &Space, t: Elem, caps: &Caps) -> Result<Sphere, GeometryError> {
    if space.n() > caps.enumeration {
        return Err(GeometryError::EnumerationCap { needed: space.n(), cap: caps.enumeration });
    }
    let q = space.q();
    let mut points: Vec<u64>;
    if space.d() <= 4 {
        points = Vec::new();
        let mut coords = vec![0u64; space.d()];
        for idx in 0..space.n() {
            if space.norm(&coords) == t {
                points.push(idx);
            }
            for c in coords.iter_mut() {
                *c += 1;
                if *c == q {
                    *c = 0;
                } else {
                    break;
                }
            }
            let _ = idx;
        }
    } else {
        let d1 = space.d() / 2;
        let lo = Space::new(space.field().clone(), d1).expect("half fits");
        let hi = Space::new(space.field().clone(), space.d() - d1).expect("half fits");
        let bucket = |sp: &Space| -> Vec<Vec<u64>> {
            let mut b: Vec<Vec<u64>> = vec![Vec::new(); q as usize];
            for idx in 0..sp.n() {
                b[sp.norm(&sp.decode(idx)) as usize].push(idx);
            }
            b
        };
        let (blo, bhi) = (bucket(&lo), bucket(&hi));
        let stride = lo.n();
        points = Vec::new();
        for t1 in 0..q {
            let t2 = space.field().sub(t, t1);
            for &a in &blo[t1 as usize] {
                for &b in &bhi[t2 as usize] {
                    points.push(a + b * stride);
                }
            }
        }
        points.sort_unstable();
    }
    Ok(Sphere { t, points })
}

/// Closed-form |S_t|, exact for every odd q. The four cases, with
/// χ the quadratic character extended by χ(0) = 0:
///
///   d odd,  t ≠ 0:  q^{d−1} + χ((−1)^{(d−1)/2} t) · q^{(d−1)/2}
///   d odd,  t = 0:  q^{d−1}
///   d even, t ≠ 0:  q^{d−1} − χ((−1)^{d/2}) · q^{(d−2)/2}
///   d even, t = 0:  q^{d−1} + χ((−1)^{d/2}) · (q−1) · q^{(d−2)/2}
pub fn sphere_size_formula(field: &Field, d: usize, t: Elem) -> u128 {
    assert!(d >= 1);
    let q = field.q() as u128;
    let pow = |k: usize| -> u128 { (0..k).fold(1u128, |acc, _| acc * q) };
    let sign_pow = |k: usize| -> Elem {
        if k % 2 == 0 {
            field.one()
        } else {
            field.minus_one()
        }
    };
    let main = pow(d - 1);
    let v: i128 = if d % 2 == 1 {
        if t == 0 {
            main as i128
        } else {
            let chi = field.chi(field.mul(sign_pow((d - 1) / 2), t)) as i128;
            main as i128 + chi * pow((d - 1) / 2) as i128
        }
    } else {
        let chi = field.chi(sign_pow(d / 2)) as i128;
        if t == 0 {
            main as i128 + chi * (q as i128 - 1) * pow((d - 2) / 2) as i128
        } else {
            main as i128 - chi * pow((d - 2) / 2) as i128
        }
    };
    debug_assert!(v >= 0);
    v as u128
}

/// A d×d matrix M with MᵀM = I, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthogonalMatrix {
    pub d: usize,
    pub entries: Vec<Elem>,
    pub det: Elem,
}

impl OrthogonalMatrix {
    pub fn apply(&self, field: &Field, x: &[Elem]) -> Vec<Elem> {
        assert_eq!(x.len(), self.d);
        (0..self.d)
            .map(|i| {
                (0..self.d).fold(0, |acc, j| {
                    field.add(acc, field.mul(self.entries[i * self.d + j], x[j]))
                })
            })
            .collect()
    }

    pub fn is_special(&self) -> bool {
        self.det == 1
    }
}

fn det2(f: &Field, m: &[Elem]) -> Elem {
    f.sub(f.mul(m[0], m[3]), f.mul(m[1], m[2]))
}

fn det3(f: &Field, m: &[Elem]) -> Elem {
    let a = f.mul(m[0], f.sub(f.mul(m[4], m[8]), f.mul(m[5], m[7])));
    let b = f.mul(m[1], f.sub(f.mul(m[3], m[8]), f.mul(m[5], m[6])));
    let c = f.mul(m[2], f.sub(f.mul(m[3], m[7]), f.mul(m[4], m[6])));
    f.add(f.sub(a, b), c)
}

/// Every orthogonal (or special orthogonal) d×d matrix, built by extending
/// orthonormal column frames: column j ranges over unit-sphere points
/// orthogonal to all earlier columns. Gated to d ∈ {2,3}, q ≤ 7, where the
/// groups are small enough to hold whole.
pub fn enumerate_orthogonal(
    space: &Space,
    special: bool,
    caps: &Caps,
) -> Result<Vec<OrthogonalMatrix>, GeometryError> {
    let (q, d) = (space.q(), space.d());
    if !(d == 2 || d == 3) || q > 7 {
        return Err(GeometryError::OrthogonalUnsupported { q, d });
    }
    let unit: Vec<Vec<Elem>> =
        sphere(space, 1, caps)?.points.iter().map(|&i| space.decode(i)).collect();
    let f = space.field();
    let mut out = Vec::new();
    let mut cols: Vec<&Vec<Elem>> = Vec::with_capacity(d);
    fn extend<'a>(
        space: &Space,
        unit: &'a [Vec<Elem>],
        cols: &mut Vec<&'a Vec<Elem>>,
        out: &mut Vec<Vec<&'a Vec<Elem>>>,
    ) {
        if cols.len() == space.d() {
            out.push(cols.clone());
            return;
        }
        'cand: for c in unit {
            for prev in cols.iter() {
                if space.dot(c, prev) != 0 {
                    continue 'cand;
                }
            }
            cols.push(c);
            extend(space, unit, cols, out);
            cols.pop();
        }
    }
    let mut frames = Vec::new();
    extend(space, &unit, &mut cols, &mut frames);
    for frame in frames {
        let mut entries = vec![0; d * d];
        for (j, col) in frame.iter().enumerate() {
            for i in 0..d {
                entries[i * d + j] = col[i];
            }
        }
        let det = if d == 2 { det2(f, &entries) } else { det3(f, &entries) };
        debug_assert!(det == 1 || det == f.minus_one());
        if special && det != 1 {
            continue;
        }
        out.push(OrthogonalMatrix { d, entries, det });
    }
    Ok(out)
}

/// Rank of a set of vectors over F_q by Gaussian elimination.
pub fn rank(field: &Field, rows: &[Vec<Elem>]) -> usize {
    let mut mat: Vec<Vec<Elem>> = rows.to_vec();
    let width = mat.first().map_or(0, |r| r.len());
    let mut r = 0;
    for col in 0..width {
        let Some(pivot) = (r..mat.len()).find(|&i| mat[i][col] != 0) else {
            continue;
        };
        mat.swap(r, pivot);
        let inv = field.inv(mat[r][col]).expect("pivot nonzero");
        for i in 0..mat.len() {
            if i != r && mat[i][col] != 0 {
                let factor = field.mul(mat[i][col], inv);
                for c in col..width {
                    let sub = field.mul(factor, mat[r][c]);
                    mat[i][c] = field.sub(mat[i][c], sub);
                }
            }
        }
        r += 1;
        if r == mat.len() {
            break;
        }
    }
    r
}

/// A (k+1)-point tuple is nondegenerate when its k difference vectors from
/// the first point have full rank k. Requires 2 ≤ points ≤ d+1 and matching
/// coordinate lengths.
pub fn is_nondegenerate(space: &Space, tuple: &[Vec<Elem>]) -> Result<bool, GeometryError> {
    let k = tuple.len().saturating_sub(1);
    if tuple.len() < 2 || k > space.d() {
        return Err(GeometryError::BadTupleSize { points: tuple.len(), d: space.d() });
    }
    for p in tuple {
        if p.len() != space.d() {
            return Err(GeometryError::PointDimension { expected: space.d(), got: p.len() });
        }
    }
    let diffs: Vec<Vec<Elem>> =
        tuple[1..].iter().map(|p| space.sub_points(p, &tuple[0])).collect();
    Ok(rank(space.field(), &diffs) == k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    fn space(p: u64, e: u32, d: usize) -> Space {
        Space::new(Field::new(p, e).unwrap(), d).unwrap()
    }

    #[test]
    fn frozen_sphere_sizes() {
        let caps = Caps::default();
        assert_eq!(sphere(&space(3, 1, 2), 0, &caps).unwrap().size(), 1);
        assert_eq!(sphere(&space(3, 1, 3), 1, &caps).unwrap().size(), 6);
        assert_eq!(sphere(&space(3, 1, 3), 0, &caps).unwrap().size(), 9);
        let f3 = Field::new(3, 1).unwrap();
        let f5 = Field::new(5, 1).unwrap();
        assert_eq!(sphere_size_formula(&f3, 3, 1), 6);
        assert_eq!(sphere_size_formula(&f3, 2, 1), 4);
        assert_eq!(sphere_size_formula(&f5, 2, 0), 9);
    }

    #[test]
    fn formula_matches_scan_and_spheres_partition() {
        let caps = Caps::default();
        for (p, e) in [(3u64, 1u32), (5, 1), (3, 2)] {
            for d in 2..=3 {
                let sp = space(p, e, d);
                let mut total = 0u64;
                for t in 0..sp.q() {
                    let s = sphere(&sp, t, &caps).unwrap();
                    assert_eq!(
                        s.size() as u128,
                        sphere_size_formula(sp.field(), d, t),
                        "q={} d={d} t={t}",
                        sp.q()
                    );
                    total += s.size();
                }
                assert_eq!(total, sp.n());
            }
        }
    }

    #[test]
    fn meet_in_the_middle_agrees_with_scan() {
        let caps = Caps::default();
        let sp = space(3, 1, 5);
        for t in 0..3 {
            let fast = sphere(&sp, t, &caps).unwrap();
            let mut slow: Vec<u64> =
                (0..sp.n()).filter(|&i| sp.norm(&sp.decode(i)) == t).collect();
            slow.sort_unstable();
            assert_eq!(fast.points, slow, "t={t}");
            assert!(fast.points.windows(2).all(|w| w[0] < w[1]), "sorted, distinct");
        }
    }

    #[test]
    fn point_table_matches_decode() {
        let sp = space(5, 1, 3);
        let tab = sp.point_table(&Caps::default()).unwrap();
        for idx in 0..sp.n() {
            let coords = sp.decode(idx);
            let flat: Vec<u64> =
                tab.coords_of(idx as usize).iter().map(|&c| c as u64).collect();
            assert_eq!(coords, flat);
            assert_eq!(tab.norms[idx as usize] as u64, sp.norm(&coords));
        }
    }

    #[test]
    fn encode_decode_roundtrip() {
        let sp = space(3, 2, 3);
        for idx in (0..sp.n()).step_by(7) {
            assert_eq!(sp.encode(&sp.decode(idx)), idx);
        }
    }

    #[test]
    fn special_orthogonal_group_sizes() {
        let caps = Caps::default();
        for p in [3u64, 5, 7] {
            let sp = space(p, 1, 2);
            let f = sp.field().clone();
            let so2 = enumerate_orthogonal(&sp, true, &caps).unwrap();
            let expect = (p as i64 - f.chi(f.minus_one()) as i64) as usize;
            assert_eq!(so2.len(), expect, "SO_2(F_{p})");
            let o2 = enumerate_orthogonal(&sp, false, &caps).unwrap();
            assert_eq!(o2.len(), 2 * expect, "O_2(F_{p})");
        }
        // |SO_3(F_q)| = q(q²−1).
        let sp3 = space(3, 1, 3);
        assert_eq!(enumerate_orthogonal(&sp3, true, &Caps::default()).unwrap().len(), 24);
        assert!(matches!(
            enumerate_orthogonal(&space(3, 1, 4), true, &caps),
            Err(GeometryError::OrthogonalUnsupported { .. })
        ));
    }

    #[test]
    fn orthogonal_matrices_are_orthogonal_and_preserve_norms() {
        let caps = Caps::default();
        let sp = space(5, 1, 2);
        let f = sp.field();
        let all = enumerate_orthogonal(&sp, false, &caps).unwrap();
        for m in &all {
            // MᵀM = I, checked entry by entry from columns.
            for a in 0..sp.d() {
                for b in 0..sp.d() {
                    let col_a: Vec<Elem> = (0..sp.d()).map(|i| m.entries[i * 2 + a]).collect();
                    let col_b: Vec<Elem> = (0..sp.d()).map(|i| m.entries[i * 2 + b]).collect();
                    let expect = if a == b { 1 } else { 0 };
                    assert_eq!(sp.dot(&col_a, &col_b), expect);
                }
            }
        }
        let mut rng = crate::rng::SplitMix64::new(11);
        for _ in 0..200 {
            let x = sp.random_point(&mut rng);
            let m = &all[rng.below(all.len() as u64) as usize];
            assert_eq!(sp.norm(&m.apply(f, &x)), sp.norm(&x));
        }
    }

    #[test]
    fn nondegeneracy_frozen_examples_and_invariance() {
        let caps = Caps::default();
        let sp2 = space(3, 1, 2);
        assert!(is_nondegenerate(&sp2, &[vec![0, 0], vec![1, 0], vec![0, 1]]).unwrap());
        let sp3 = space(3, 1, 3);
        assert!(!is_nondegenerate(&sp3, &[vec![0, 0, 0], vec![1, 1, 0], vec![2, 2, 0]]).unwrap());
        assert!(is_nondegenerate(&sp3, &[vec![0, 0, 0], vec![0, 0, 1]]).unwrap());
        assert!(matches!(
            is_nondegenerate(&sp2, &[vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]),
            Err(GeometryError::BadTupleSize { .. })
        ));
        assert!(matches!(
            is_nondegenerate(&sp2, &[vec![0, 0], vec![1, 0, 0]]),
            Err(GeometryError::PointDimension { .. })
        ));

        // Rank is preserved by translations and orthogonal maps.
        let all = enumerate_orthogonal(&sp3, false, &caps).unwrap();
        let mut rng = crate::rng::SplitMix64::new(23);
        for _ in 0..100 {
            let tuple: Vec<Vec<Elem>> = (0..3).map(|_| sp3.random_point(&mut rng)).collect();
            let before = is_nondegenerate(&sp3, &tuple).unwrap();
            let tau = sp3.random_point(&mut rng);
            let m = &all[rng.below(all.len() as u64) as usize];
            let moved: Vec<Vec<Elem>> = tuple
                .iter()
                .map(|p| sp3.add_points(&m.apply(sp3.field(), p), &tau))
                .collect();
            assert_eq!(is_nondegenerate(&sp3, &moved).unwrap(), before);
        }
    }

    #[test]
    fn rank_basics() {
        let f = Field::new(5, 1).unwrap();
        assert_eq!(rank(&f, &[vec![0, 0, 0]]), 0);
        // Scalar multiples of (1,2,3) collapse to one dimension.
        assert_eq!(rank(&f, &[vec![1, 2, 3], vec![2, 4, 1], vec![3, 1, 4]]), 1);
        // Third row is the sum of the first two, which are independent.
        assert_eq!(rank(&f, &[vec![1, 2, 3], vec![0, 1, 1], vec![1, 3, 4]]), 2);
        assert_eq!(rank(&f, &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]), 3);
    }

    #[test]
    fn caps_are_enforced() {
        let sp = space(3, 1, 5);
        let caps = Caps { enumeration: 100, work: 1_000 };
        assert!(matches!(
            sphere(&sp, 1, &caps),
            Err(GeometryError::EnumerationCap { needed: 243, cap: 100 })
        ));
    }
}
