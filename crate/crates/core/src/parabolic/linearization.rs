//! The matrix I + (p−2)(a⊗a)/|a|² that governs the linearized flux of the p-Laplacian.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LinearizationMatrix {
    pub dim: usize,
    /// Row-major N×N entries.
    pub entries: Vec<Vec<f64>>,
}

impl LinearizationMatrix {
    /// ⟨A ξ, ξ⟩
    pub fn quadratic_form(&self, xi: &[f64]) -> f64 {
        self.entries
            .iter()
            .zip(xi)
            .map(|(row, x)| x * row.iter().zip(xi).map(|(a, y)| a * y).sum::<f64>())
            .sum()
    }
}

/// Eigenvalue p − 1 along a and 1 on its orthogonal complement.
pub fn linearization_matrix(a: &[f64], p: f64) -> Result<LinearizationMatrix> {
    let norm2: f64 = a.iter().map(|x| x * x).sum();
    if !(norm2 > 0.0) {
        return Err(Error::SingularDirection);
    }
    if !(p > 1.0) {
        return Err(Error::InvalidParameter(format!("p = {p} must exceed 1")));
    }
    let dim = a.len();
    let entries = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| {
                    let delta = if i == j { 1.0 } else { 0.0 };
                    delta + (p - 2.0) * (a[i] * a[j]) / norm2
                })
                .collect()
        })
        .collect();
    Ok(LinearizationMatrix { dim, entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinate_directions() {
        let m = linearization_matrix(&[1.0, 0.0], 3.0).unwrap();
        assert_eq!(m.entries, vec![vec![2.0, 0.0], vec![0.0, 1.0]]);
        let m = linearization_matrix(&[0.0, 1.0], 1.5).unwrap();
        assert_eq!(m.entries, vec![vec![1.0, 0.0], vec![0.0, 0.5]]);
        assert!(matches!(
            linearization_matrix(&[0.0, 0.0], 3.0),
            Err(Error::SingularDirection)
        ));
    }

    #[test]
    fn symmetric() {
        let m = linearization_matrix(&[0.3, -1.2, 2.0], 2.7).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m.entries[i][j], m.entries[j][i]);
            }
        }
    }
}
