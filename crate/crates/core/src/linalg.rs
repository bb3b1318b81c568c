//! Spectral-norm and eigenvalue helpers. Dense singular-value decomposition
//! is used up to 4000x4000-equivalent sizes; beyond that a deterministic
//! power iteration on the Gram matrix takes over (tolerance 1e-9, capped at
//! 1e5 iterations).

use nalgebra::{DMatrix, DVector};

const SVD_ENTRY_LIMIT: usize = 4000 * 4000;
pub const POWER_TOL: f64 = 1e-9;
pub const POWER_MAX_ITERS: usize = 100_000;

/// Largest singular value of a dense real matrix.
pub fn spectral_norm(a: &DMatrix<f64>) -> f64 {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0.0;
    }
    if a.nrows() * a.ncols() <= SVD_ENTRY_LIMIT {
        // try_svd may fail only on NaN/Inf input; norms of finite matrices
        // always converge here
        a.clone().svd(false, false).singular_values.max()
    } else {
        power_iteration_norm(a)
    }
}

/// Deterministic power iteration for the top singular value, operating on
/// whichever Gram matrix (A^T A or A A^T) is smaller.
pub fn power_iteration_norm(a: &DMatrix<f64>) -> f64 {
    let (rows, cols) = (a.nrows(), a.ncols());
    let dim = cols.min(rows);
    let tall = cols <= rows;
    // fixed pseudo-random start vector so results are reproducible
    let mut v = DVector::from_iterator(
        dim,
        (0..dim).map(|i| {
            let x = (i as f64 + 1.0) * 0.754_877_666_246_693; // frac(golden-ratio multiples)
            (x - x.floor()) - 0.5 + 1e-3
        }),
    );
    let nv = v.norm();
    if nv == 0.0 {
        return 0.0;
    }
    v /= nv;
    let mut lambda_prev = 0.0f64;
    for _ in 0..POWER_MAX_ITERS {
        // w = Gram * v without forming the Gram matrix
        let w = if tall { a.transpose() * (a * &v) } else { a * (a.transpose() * &v) };
        let lambda = w.norm();
        if lambda == 0.0 {
            return 0.0;
        }
        v = w / lambda;
        if (lambda - lambda_prev).abs() <= POWER_TOL * lambda.max(1.0) {
            return lambda.sqrt();
        }
        lambda_prev = lambda;
    }
    lambda_prev.sqrt()
}

/// Eigenvalues of a symmetric matrix, descending.
pub fn symmetric_eigenvalues(a: &DMatrix<f64>) -> Vec<f64> {
    let sym = nalgebra::SymmetricEigen::new(a.clone());
    let mut ev: Vec<f64> = sym.eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| y.partial_cmp(x).unwrap());
    ev
}

/// Entrywise (Hadamard) product.
pub fn hadamard(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    assert_eq!(a.shape(), b.shape(), "hadamard product needs equal shapes");
    a.component_mul(b)
}
