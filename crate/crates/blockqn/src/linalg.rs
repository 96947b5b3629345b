//! Dense symmetric linear-algebra kernels: Cholesky with breakdown detection,
//! symmetric pseudoinverse, generalized-eigenvalue bounds, seeded Gaussian
//! direction blocks, and greedy basis selection.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Relative eigenvalue cutoff for pseudoinverses: eigenvalues with
/// |lambda| <= PINV_TOL * max|lambda| are treated as zero.
pub const PINV_TOL: f64 = 1e-12;

/// Dense symmetric d x d matrix. Symmetry is enforced at construction by
/// averaging with the transpose, so accumulated floating-point asymmetry
/// cannot leak into downstream eigen/factorization routines.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    m: DMatrix<f64>,
}

impl SymMatrix {
    /// Builds from an arbitrary square matrix, symmetrizing via (M + M^T)/2.
    pub fn from_matrix(m: DMatrix<f64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "SymMatrix requires a square matrix");
        assert!(m.nrows() >= 1, "SymMatrix requires dim >= 1");
        let sym = (&m + m.transpose()) * 0.5;
        SymMatrix { m: sym }
    }

    pub fn identity(d: usize) -> Self {
        SymMatrix {
            m: DMatrix::identity(d, d),
        }
    }

    pub fn scaled_identity(d: usize, c: f64) -> Self {
        SymMatrix {
            m: DMatrix::identity(d, d) * c,
        }
    }

    pub fn from_diagonal(diag: &DVector<f64>) -> Self {
        SymMatrix {
            m: DMatrix::from_diagonal(diag),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.m
    }

    pub fn diagonal(&self) -> DVector<f64> {
        self.m.diagonal()
    }

    pub fn trace(&self) -> f64 {
        self.m.trace()
    }

    /// Largest absolute eigenvalue (spectral norm), via symmetric eigen.
    pub fn spectral_norm(&self) -> f64 {
        self.m
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .fold(0.0, |acc, &l| acc.max(l.abs()))
    }
}

/// d x k block of probe directions (Gaussian sketch or greedy basis columns).
#[derive(Clone, Debug, PartialEq)]
pub struct DirectionBlock {
    u: DMatrix<f64>,
}

impl DirectionBlock {
    pub fn from_matrix(u: DMatrix<f64>) -> Result<Self> {
        if u.ncols() < 1 || u.ncols() > u.nrows() {
            return Err(Error::InvalidConfig(format!(
                "direction block must have 1 <= k <= d, got d = {}, k = {}",
                u.nrows(),
                u.ncols()
            )));
        }
        Ok(DirectionBlock { u })
    }

    /// Standard-basis columns e_{i} for the given indices.
    pub fn basis(d: usize, indices: &[usize]) -> Result<Self> {
        let mut u = DMatrix::zeros(d, indices.len());
        for (col, &i) in indices.iter().enumerate() {
            if i >= d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    actual: i,
                });
            }
            u[(i, col)] = 1.0;
        }
        DirectionBlock::from_matrix(u)
    }

    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    pub fn width(&self) -> usize {
        self.u.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.u
    }
}

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
#[derive(Clone, Debug)]
pub struct SpdFactor {
    l: DMatrix<f64>,
}

/// Cholesky factorization with explicit breakdown detection: a pivot at or
/// below `1e-12 * max diagonal` raises `NotPositiveDefinite` instead of
/// producing NaNs, which is how estimator corruption is detected upstream.
pub fn cholesky(m: &SymMatrix) -> Result<SpdFactor> {
    let d = m.dim();
    let a = m.matrix();
    let max_diag = a.diagonal().iter().fold(0.0_f64, |acc, &x| acc.max(x));
    let tol = 1e-12 * max_diag.max(f64::MIN_POSITIVE);
    let mut l = DMatrix::<f64>::zeros(d, d);
    for j in 0..d {
        let mut pivot = a[(j, j)];
        for k in 0..j {
            pivot -= l[(j, k)] * l[(j, k)];
        }
        if !(pivot > tol) {
            return Err(Error::NotPositiveDefinite { index: j, pivot });
        }
        let ljj = pivot.sqrt();
        l[(j, j)] = ljj;
        for i in (j + 1)..d {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / ljj;
        }
    }
    Ok(SpdFactor { l })
}

impl SpdFactor {
    pub fn dim(&self) -> usize {
        self.l.nrows()
    }

    /// The lower-triangular factor L with L L^T = M.
    pub fn lower(&self) -> &DMatrix<f64> {
        &self.l
    }

    /// Solves M x = rhs for a single right-hand side.
    pub fn solve_vec(&self, rhs: &DVector<f64>) -> Result<DVector<f64>> {
        if rhs.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: rhs.len(),
            });
        }
        let mut y = rhs.clone();
        self.l.solve_lower_triangular_mut(&mut y);
        self.l.tr_solve_lower_triangular_mut(&mut y);
        Ok(y)
    }

    /// Solves M X = rhs for a d x k block of right-hand sides.
    pub fn solve_block(&self, rhs: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if rhs.nrows() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: rhs.nrows(),
            });
        }
        let mut y = rhs.clone();
        self.l.solve_lower_triangular_mut(&mut y);
        self.l.tr_solve_lower_triangular_mut(&mut y);
        Ok(y)
    }

    /// L^{-1} rhs (forward substitution only).
    pub fn forward_solve(&self, rhs: &DMatrix<f64>) -> DMatrix<f64> {
        let mut y = rhs.clone();
        self.l.solve_lower_triangular_mut(&mut y);
        y
    }

    /// Rebuilds L L^T.
    pub fn reconstruct(&self) -> SymMatrix {
        SymMatrix::from_matrix(&self.l * self.l.transpose())
    }

    /// Explicit inverse (L^{-T} L^{-1}); intended for small matrices.
    pub fn inverse(&self) -> SymMatrix {
        let d = self.dim();
        let mut inv = DMatrix::<f64>::identity(d, d);
        self.l.solve_lower_triangular_mut(&mut inv);
        self.l.tr_solve_lower_triangular_mut(&mut inv);
        SymMatrix::from_matrix(inv)
    }

    /// L^{-1} as a dense lower-triangular matrix. Satisfies
    /// (L^{-1})^T (L^{-1}) = M^{-1}, the factor layout used by the
    /// inverse-factor update.
    pub fn inverse_lower(&self) -> DMatrix<f64> {
        let d = self.dim();
        let mut inv = DMatrix::<f64>::identity(d, d);
        self.l.solve_lower_triangular_mut(&mut inv);
        inv
    }
}

/// Moore-Penrose pseudoinverse of a small symmetric matrix via symmetric
/// eigendecomposition, zeroing eigenvalues with |lambda| <= tol * max|lambda|.
/// The zero matrix maps to the zero matrix.
pub fn pinv_small(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    assert_eq!(m.nrows(), m.ncols(), "pinv_small requires a square matrix");
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let max_abs = eig
        .eigenvalues
        .iter()
        .fold(0.0_f64, |acc, &l| acc.max(l.abs()));
    if max_abs == 0.0 {
        return DMatrix::zeros(m.nrows(), m.ncols());
    }
    let cutoff = tol * max_abs;
    let inv_eigs = eig
        .eigenvalues
        .map(|l| if l.abs() <= cutoff { 0.0 } else { 1.0 / l });
    let v = &eig.eigenvectors;
    let p = v * DMatrix::from_diagonal(&inv_eigs) * v.transpose();
    (&p + p.transpose()) * 0.5
}

/// Extreme generalized eigenvalues of the pencil (g, h) with h SPD, i.e. the
/// (min, max) eigenvalues of h^{-1/2} g h^{-1/2}. `h <= g` in the Loewner
/// order iff the returned min is >= 1 (up to rounding).
pub fn loewner_bounds(g: &SymMatrix, h: &SymMatrix) -> Result<(f64, f64)> {
    if g.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            actual: g.dim(),
        });
    }
    let f = cholesky(h)?;
    // W = L^{-1} G L^{-T}, same spectrum as h^{-1/2} g h^{-1/2}.
    let z = f.forward_solve(g.matrix());
    let w = f.forward_solve(&z.transpose());
    let w = (&w + w.transpose()) * 0.5;
    let eig = w.symmetric_eigen();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &l in eig.eigenvalues.iter() {
        lo = lo.min(l);
        hi = hi.max(l);
    }
    Ok((lo, hi))
}

/// d x k block with i.i.d. standard normal entries drawn from the caller's
/// generator; repeated calls with the same generator state are bit-identical.
pub fn gaussian_block<R: Rng + ?Sized>(d: usize, k: usize, rng: &mut R) -> DirectionBlock {
    assert!(k >= 1 && k <= d, "gaussian_block requires 1 <= k <= d");
    // Column-major fill keeps the draw order independent of storage layout.
    let mut u = DMatrix::<f64>::zeros(d, k);
    for j in 0..k {
        for i in 0..d {
            u[(i, j)] = rng.sample(StandardNormal);
        }
    }
    DirectionBlock { u }
}

/// Indices of the k largest entries, ties broken by lowest index first.
pub fn top_k_indices(values: &[f64], k: usize) -> Vec<usize> {
    assert!(k >= 1 && k <= values.len());
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| {
        values[b]
            .partial_cmp(&values[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    idx.truncate(k);
    idx
}

/// Basis columns e_{i_1}..e_{i_k} for the k largest diagonal entries of r,
/// ties broken by lowest index first.
pub fn top_k_diag_basis(r: &SymMatrix, k: usize) -> DirectionBlock {
    let diag: Vec<f64> = r.diagonal().iter().copied().collect();
    let idx = top_k_indices(&diag, k);
    DirectionBlock::basis(r.dim(), &idx).expect("indices in range by construction")
}
