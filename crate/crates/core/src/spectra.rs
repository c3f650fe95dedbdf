//! Dense symmetric eigensolves and spectrum comparisons.
//!
//! The dense path is the oracle for the character-sum path, so it stays
//! deliberately plain: build the full adjacency matrix, run nalgebra's
//! symmetric eigensolver, sort. Comparisons treat spectra as multisets of
//! reals: sort both and compare pointwise within a tolerance.

use nalgebra::DMatrix;

/// Eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues(mat: DMatrix<f64>) -> Vec<f64> {
    let mut vals: Vec<f64> = mat.symmetric_eigen().eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals
}

/// Multiset equality within `tol`: both sorted ascending, compared slotwise.
pub fn multiset_close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

/// Collapse a sorted list into (value, multiplicity) groups, where values
/// within `tol` of the group's first member are merged. The reported value
/// is the group mean.
pub fn group_multiplicities(sorted: &[f64], tol: f64) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let start = sorted[i];
        let mut j = i;
        let mut sum = 0.0;
        while j < sorted.len() && (sorted[j] - start).abs() <= tol {
            sum += sorted[j];
            j += 1;
        }
        out.push((sum / (j - i) as f64, j - i));
        i = j;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    #[test]
    fn eigenvalues_of_a_path_graph() {
        // P_3 adjacency has spectrum {−√2, 0, √2}.
        let m = dmatrix![0.0, 1.0, 0.0; 1.0, 0.0, 1.0; 0.0, 1.0, 0.0];
        let vals = symmetric_eigenvalues(m);
        let expect = [-(2.0f64).sqrt(), 0.0, (2.0f64).sqrt()];
        assert!(multiset_close(&vals, &expect, 1e-12), "{vals:?}");
    }

    #[test]
    fn grouping_and_comparison() {
        let vals = [1.0, 1.0 + 1e-9, 2.0, 3.0, 3.0, 3.0];
        let groups = group_multiplicities(&vals, 1e-6);
        assert_eq!(groups.len(), 3);
        assert_eq!(groups[0].1, 2);
        assert_eq!(groups[1], (2.0, 1));
        assert_eq!(groups[2].1, 3);
        assert!(!multiset_close(&[1.0, 2.0], &[1.0], 1.0));
        assert!(!multiset_close(&[1.0, 2.0], &[1.0, 2.1], 1e-3));
    }
}
