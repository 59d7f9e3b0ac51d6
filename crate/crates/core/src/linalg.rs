//! Dense covariance-matrix numerics for at most six quadratures.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::metrics::ModePair;

/// Quadrature labelling of a covariance matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ordering {
    /// (q_x, p_x, X_c, Y_c, X_w, Y_w)
    Tripartite,
    /// Two modes, first then second mode of the pair.
    Pair(ModePair),
    /// Unlabelled n×n matrix.
    Generic(usize),
}

impl Ordering {
    pub fn dim(&self) -> usize {
        match self {
            Ordering::Tripartite => 6,
            Ordering::Pair(_) => 4,
            Ordering::Generic(n) => *n,
        }
    }

    pub fn labels(&self) -> Vec<String> {
        match self {
            Ordering::Tripartite => ["q_x", "p_x", "X_c", "Y_c", "X_w", "Y_w"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            Ordering::Pair(pair) => {
                let (a, b) = pair.mode_quadratures();
                [a.0, a.1, b.0, b.1].iter().map(|s| s.to_string()).collect()
            }
            Ordering::Generic(n) => (0..*n).map(|k| format!("u{k}")).collect(),
        }
    }
}

/// Symmetric covariance matrix plus its quadrature ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceState {
    matrix: DMatrix<f64>,
    ordering: Ordering,
}

impl CovarianceState {
    /// Symmetrizes `matrix`; fails if it is not square, not finite, or does not match `ordering`.
    pub fn new(matrix: DMatrix<f64>, ordering: Ordering) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() != ordering.dim() {
            return Err(Error::Domain(format!(
                "covariance matrix is {}x{}, ordering expects {}x{}",
                matrix.nrows(),
                matrix.ncols(),
                ordering.dim(),
                ordering.dim()
            )));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("covariance matrix has non-finite entries".into()));
        }
        Ok(CovarianceState {
            matrix: symmetrize(&matrix),
            ordering,
        })
    }

    /// Unlabelled state of whatever size `matrix` has.
    pub fn generic(matrix: DMatrix<f64>) -> Result<Self> {
        let n = matrix.nrows();
        Self::new(matrix, Ordering::Generic(n))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn ordering(&self) -> Ordering {
        self.ordering
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn with_ordering(self, ordering: Ordering) -> Result<Self> {
        Self::new(self.matrix, ordering)
    }
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// Largest real part over the eigenvalues of `a`.
pub fn spectral_abscissa(a: &DMatrix<f64>) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::Domain("spectral abscissa needs a square matrix".into()));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("matrix has non-finite entries".into()));
    }
    let schur = nalgebra::linalg::Schur::try_new(a.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("eigenvalue iteration did not converge".into()))?;
    let eig = schur.complex_eigenvalues();
    Ok(eig.iter().fold(f64::NEG_INFINITY, |acc, z| acc.max(z.re)))
}

pub fn is_hurwitz(a: &DMatrix<f64>) -> Result<bool> {
    Ok(spectral_abscissa(a)? < 0.0)
}

/// max |A·V + V·Aᵀ + D|
pub fn lyapunov_residual(a: &DMatrix<f64>, v: &DMatrix<f64>, d: &DMatrix<f64>) -> f64 {
    max_abs(&(a * v + v * a.transpose() + d))
}

/// Stationary covariance: solves A·V + V·Aᵀ + D = 0 for Hurwitz A.
///
/// The n²-dimensional Kronecker system is solved by LU with one step of
/// iterative refinement; the result is labelled [`Ordering::Generic`].
pub fn solve_lyapunov(a: &DMatrix<f64>, d: &DMatrix<f64>) -> Result<CovarianceState> {
    let n = a.nrows();
    if !a.is_square() || d.shape() != (n, n) {
        return Err(Error::Domain(format!(
            "drift {:?} and diffusion {:?} must be square and of equal size",
            a.shape(),
            d.shape()
        )));
    }
    let abscissa = spectral_abscissa(a)?;
    if abscissa >= 0.0 {
        return Err(Error::Unstable { abscissa });
    }

    let eye = DMatrix::<f64>::identity(n, n);
    let op = eye.kronecker(a) + a.kronecker(&eye);
    let lu = op.lu();
    let solve = |rhs: &DMatrix<f64>| -> Result<DMatrix<f64>> {
        let b = DVector::from_column_slice(rhs.as_slice()) * -1.0;
        let x = lu
            .solve(&b)
            .ok_or_else(|| Error::Numerical("Lyapunov operator is singular".into()))?;
        Ok(DMatrix::from_column_slice(n, n, x.as_slice()))
    };

    let mut v = symmetrize(&solve(d)?);
    let r = a * &v + &v * a.transpose() + d;
    let dv = symmetrize(&solve(&r)?);
    let refined = &v + dv;
    if lyapunov_residual(a, &refined, d) <= lyapunov_residual(a, &v, d) {
        v = refined;
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numerical("Lyapunov solution is not finite".into()));
    }
    CovarianceState::generic(v)
}

/// The symplectic form Ω = ⊕ [[0, 1], [−1, 0]] on `modes` modes.
pub fn symplectic_form(modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * modes, 2 * modes);
    for k in 0..modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// Symplectic eigenvalues of an even-dimensional covariance matrix, ascending.
///
/// Computed as the moduli of the eigenvalues of Ω·V, which come in ± i·ν pairs.
pub fn symplectic_eigenvalues(v: &CovarianceState) -> Result<Vec<f64>> {
    let n = v.dim();
    if !n.is_multiple_of(2) {
        return Err(Error::Domain(format!("symplectic spectrum needs even dimension, got {n}")));
    }
    let m = symplectic_form(n / 2) * v.matrix();
    let schur = nalgebra::linalg::Schur::try_new(m, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("eigenvalue iteration did not converge".into()))?;
    let mut moduli: Vec<f64> = schur.complex_eigenvalues().iter().map(|z| z.norm()).collect();
    moduli.sort_by(f64::total_cmp);
    Ok(moduli
        .chunks(2)
        .map(|pair| 0.5 * (pair[0] + pair[1]))
        .collect())
}
