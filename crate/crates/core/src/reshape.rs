//! Vectorization and Kronecker products.
//!
//! `vec` stacks columns (column-major). With that convention
//! `vec(A C B^T) = (B ⊗ A) vec(C)`. Stacking rows instead (`vec_rows`, equal
//! to `vec` of the transpose) gives `vec_rows(A C B^T) = (A ⊗ B) vec_rows(C)`,
//! which is the ordering under which a bipartite table `p_AB` flattens to
//! `Σ p(i, j) e_i ⊗ e_j`.

use nalgebra::{DMatrix, DVector};

use crate::error::{DiscordError, Result};

/// Column-major vectorization.
pub fn vec(m: &DMatrix<f64>) -> DVector<f64> {
    // nalgebra stores matrices column-major
    DVector::from_column_slice(m.as_slice())
}

/// Row-major vectorization, `vec(m^T)`.
pub fn vec_rows(m: &DMatrix<f64>) -> DVector<f64> {
    vec(&m.transpose())
}

/// Inverse of [`vec`].
pub fn unvec(v: &DVector<f64>, rows: usize, cols: usize) -> Result<DMatrix<f64>> {
    if v.len() != rows * cols {
        return Err(DiscordError::SizeMismatch {
            len: v.len(),
            rows,
            cols,
        });
    }
    Ok(DMatrix::from_column_slice(rows, cols, v.as_slice()))
}

/// Inverse of [`vec_rows`].
pub fn unvec_rows(v: &DVector<f64>, rows: usize, cols: usize) -> Result<DMatrix<f64>> {
    if v.len() != rows * cols {
        return Err(DiscordError::SizeMismatch {
            len: v.len(),
            rows,
            cols,
        });
    }
    Ok(DMatrix::from_row_slice(rows, cols, v.as_slice()))
}

/// Kronecker product `a ⊗ b`; block `(i, j)` is `a[(i, j)] * b`.
pub fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = DMatrix::zeros(ar * br, ac * bc);
    for j in 0..ac {
        for i in 0..ar {
            let s = a[(i, j)];
            if s == 0.0 {
                continue;
            }
            for l in 0..bc {
                for k in 0..br {
                    out[(i * br + k, j * bc + l)] = s * b[(k, l)];
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2(a: f64, b: f64, c: f64, d: f64) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[a, b, c, d])
    }

    #[test]
    fn vec_is_column_major() {
        assert_eq!(vec(&m2(1.0, 2.0, 3.0, 4.0)).as_slice(), &[1.0, 3.0, 2.0, 4.0]);
        assert_eq!(vec(&DMatrix::identity(2, 2)).as_slice(), &[1.0, 0.0, 0.0, 1.0]);
        assert_eq!(vec(&DMatrix::from_element(1, 1, 7.5)).as_slice(), &[7.5]);
        assert_eq!(vec_rows(&m2(1.0, 2.0, 3.0, 4.0)).as_slice(), &[1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn unvec_inverts() {
        let v = DVector::from_vec(vec![1.0, 3.0, 2.0, 4.0]);
        assert_eq!(unvec(&v, 2, 2).unwrap(), m2(1.0, 2.0, 3.0, 4.0));
        let v = DVector::from_vec(vec![1.0, 0.0, 0.0, 1.0]);
        assert_eq!(unvec(&v, 2, 2).unwrap(), DMatrix::identity(2, 2));
        let r = DMatrix::from_fn(3, 5, |i, j| (i * 7 + j * 3) as f64 * 0.37 - 1.0);
        assert_eq!(unvec(&vec(&r), 3, 5).unwrap(), r);
        assert_eq!(unvec_rows(&vec_rows(&r), 3, 5).unwrap(), r);
        assert!(matches!(unvec(&v, 3, 2), Err(DiscordError::SizeMismatch { .. })));
        assert!(unvec_rows(&v, 1, 3).is_err());
    }

    #[test]
    fn kron_matches_nalgebra() {
        let a = DMatrix::from_fn(2, 3, |i, j| (i + 2 * j) as f64 - 1.5);
        let b = DMatrix::from_fn(3, 2, |i, j| (3 * i) as f64 * 0.5 - j as f64);
        assert_eq!(kron(&a, &b), a.kronecker(&b));
    }

    #[test]
    fn identity_kron_is_block_diagonal() {
        let m = m2(0.9, 0.2, 0.1, 0.8);
        let k = kron(&DMatrix::identity(2, 2), &m);
        let mut expect = DMatrix::zeros(4, 4);
        expect.view_mut((0, 0), (2, 2)).copy_from(&m);
        expect.view_mut((2, 2), (2, 2)).copy_from(&m);
        assert_eq!(k, expect);
    }

    #[test]
    fn kron_of_column_stochastic_is_column_stochastic() {
        let a = m2(0.9, 0.2, 0.1, 0.8);
        let b = DMatrix::from_row_slice(3, 3, &[0.5, 0.0, 0.3, 0.25, 1.0, 0.3, 0.25, 0.0, 0.4]);
        let k = kron(&a, &b);
        for c in k.column_iter() {
            assert!((c.sum() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn vectorization_identities() {
        let a = m2(0.3, -1.2, 2.0, 0.7);
        let b = m2(1.1, 0.4, -0.6, 2.5);
        let c = m2(-0.2, 0.9, 1.3, 0.05);
        let d = &a * &c * b.transpose();
        let col = &kron(&b, &a) * vec(&c) - vec(&d);
        let row = &kron(&a, &b) * vec_rows(&c) - vec_rows(&d);
        assert!(col.amax() < 1e-12);
        assert!(row.amax() < 1e-12);
        // the same ordering with column stacking is a different identity
        let mixed = &kron(&a, &b) * vec(&c) - vec(&d);
        assert!(mixed.amax() > 1e-3);
    }
}
