//! Two-mode blocks, the Simon–Peres–Horodecki witness and physicality.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, Matrix2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{symplectic_eigenvalues, CovarianceState, Ordering};

pub const PHYSICALITY_TOL: f64 = 1e-9;

/// Offsets of each mode's quadrature pair in the tripartite ordering.
pub const MR_OFFSET: usize = 0;
pub const OC_OFFSET: usize = 2;
pub const MC_OFFSET: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModePair {
    #[serde(rename = "oc-mc")]
    OcMc,
    #[serde(rename = "oc-mr")]
    OcMr,
    #[serde(rename = "mr-mc")]
    MrMc,
}

impl ModePair {
    pub const ALL: [ModePair; 3] = [ModePair::OcMc, ModePair::OcMr, ModePair::MrMc];

    pub fn label(self) -> &'static str {
        match self {
            ModePair::OcMc => "oc-mc",
            ModePair::OcMr => "oc-mr",
            ModePair::MrMc => "mr-mc",
        }
    }

    /// Tripartite offsets of the (first, second) mode.
    pub fn offsets(self) -> (usize, usize) {
        match self {
            ModePair::OcMc => (OC_OFFSET, MC_OFFSET),
            ModePair::OcMr => (OC_OFFSET, MR_OFFSET),
            ModePair::MrMc => (MR_OFFSET, MC_OFFSET),
        }
    }

    /// True when the second mode is the microwave cavity, the mode channels act on.
    pub fn second_is_microwave(self) -> bool {
        self.offsets().1 == MC_OFFSET
    }

    pub(crate) fn mode_quadratures(self) -> ((&'static str, &'static str), (&'static str, &'static str)) {
        let q = |off| match off {
            MR_OFFSET => ("q_x", "p_x"),
            OC_OFFSET => ("X_c", "Y_c"),
            _ => ("X_w", "Y_w"),
        };
        let (a, b) = self.offsets();
        (q(a), q(b))
    }
}

impl fmt::Display for ModePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ModePair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModePair::ALL
            .into_iter()
            .find(|p| p.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Domain(format!("unknown mode pair '{s}' (expected oc-mc, oc-mr or mr-mc)")))
    }
}

/// V = [[A, C], [Cᵀ, B]] for a two-mode covariance matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockDecomposition {
    pub block_a: Matrix2<f64>,
    pub block_b: Matrix2<f64>,
    pub block_c: Matrix2<f64>,
}

impl BlockDecomposition {
    pub fn of(v: &CovarianceState) -> Result<Self> {
        if v.dim() != 4 {
            return Err(Error::Domain(format!("two-mode blocks need a 4x4 matrix, got {0}x{0}", v.dim())));
        }
        let m = v.matrix();
        Ok(BlockDecomposition {
            block_a: m.fixed_view::<2, 2>(0, 0).into_owned(),
            block_b: m.fixed_view::<2, 2>(2, 2).into_owned(),
            block_c: m.fixed_view::<2, 2>(0, 2).into_owned(),
        })
    }

    pub fn assemble(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(4, 4);
        m.fixed_view_mut::<2, 2>(0, 0).copy_from(&self.block_a);
        m.fixed_view_mut::<2, 2>(2, 2).copy_from(&self.block_b);
        m.fixed_view_mut::<2, 2>(0, 2).copy_from(&self.block_c);
        m.fixed_view_mut::<2, 2>(2, 0).copy_from(&self.block_c.transpose());
        m
    }

    pub fn lambda(&self) -> f64 {
        let j = Matrix2::new(0.0, 1.0, -1.0, 0.0);
        let (a, b, c) = (&self.block_a, &self.block_b, &self.block_c);
        let (det_a, det_b, det_c) = (a.determinant(), b.determinant(), c.determinant());
        let chain = a * j * c * j * b * j * c.transpose() * j;
        det_a * det_b + (0.25 - det_c.abs()).powi(2) - chain.trace() - 0.25 * (det_a + det_b)
    }
}

/// Picks the 4×4 covariance matrix of `pair` out of a tripartite state.
pub fn extract_pair_cm(v6: &CovarianceState, pair: ModePair) -> Result<CovarianceState> {
    if v6.ordering() != Ordering::Tripartite {
        return Err(Error::Domain(format!(
            "pair extraction needs the tripartite ordering, got {:?}",
            v6.ordering()
        )));
    }
    let (a, b) = pair.offsets();
    let idx = [a, a + 1, b, b + 1];
    let m = v6.matrix();
    let sub = DMatrix::from_fn(4, 4, |r, c| m[(idx[r], idx[c])]);
    CovarianceState::new(sub, Ordering::Pair(pair))
}

/// Simon–Peres–Horodecki functional; negative means entangled.
pub fn sph_lambda(v4: &CovarianceState) -> Result<f64> {
    Ok(BlockDecomposition::of(v4)?.lambda())
}

pub fn min_symplectic_eigenvalue(v: &CovarianceState) -> Result<f64> {
    Ok(symplectic_eigenvalues(v)?.into_iter().fold(f64::INFINITY, f64::min))
}

/// Smallest symplectic eigenvalue is at least 1/2 (up to 1e-9).
pub fn is_physical(v: &CovarianceState) -> bool {
    matches!(min_symplectic_eigenvalue(v), Ok(nu) if nu >= 0.5 - PHYSICALITY_TOL)
}

/// Flips the sign of the second mode's Y quadrature (partial transpose).
pub fn partial_transpose(v4: &CovarianceState) -> Result<CovarianceState> {
    if v4.dim() != 4 {
        return Err(Error::Domain("partial transpose needs a 4x4 matrix".into()));
    }
    let flip = DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&[1.0, 1.0, 1.0, -1.0]));
    CovarianceState::new(&flip * v4.matrix() * &flip, v4.ordering())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair_state(m: DMatrix<f64>) -> CovarianceState {
        CovarianceState::generic(m).unwrap()
    }

    fn tms(r: f64) -> CovarianceState {
        let (ch, sh) = ((2.0 * r).cosh() / 2.0, (2.0 * r).sinh() / 2.0);
        pair_state(DMatrix::from_row_slice(
            4,
            4,
            &[
                ch, 0.0, sh, 0.0, //
                0.0, ch, 0.0, -sh, //
                sh, 0.0, ch, 0.0, //
                0.0, -sh, 0.0, ch,
            ],
        ))
    }

    #[test]
    fn vacuum_lambda_is_zero() {
        let v = pair_state(DMatrix::identity(4, 4) * 0.5);
        assert!(sph_lambda(&v).unwrap().abs() < 1e-15);
        assert!(is_physical(&v));
    }

    #[test]
    fn squeezed_lambda_closed_form() {
        // reference values from 40-digit arithmetic
        for (r, want) in [
            (0.1, -0.010134046479806851),
            (0.5, -0.34527446138545393),
            (1.0, -3.2885291045020608),
        ] {
            let got = sph_lambda(&tms(r)).unwrap();
            assert!((got - want).abs() < 1e-12, "r={r}: {got} vs {want}");
            assert!((got - (1.0 - (4.0 * r).cosh()) / 8.0).abs() < 1e-12);
        }
    }

    #[test]
    fn thermal_product_lambda() {
        for v in [0.5, 1.0, 5.0] {
            let s = pair_state(DMatrix::identity(4, 4) * v);
            let want = (v * v - 0.25f64).powi(2);
            assert!((sph_lambda(&s).unwrap() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn sub_vacuum_is_unphysical() {
        assert!(!is_physical(&pair_state(DMatrix::identity(4, 4) * 0.4)));
    }

    #[test]
    fn squeezed_states_are_pure() {
        for r in [0.1, 0.5, 1.0] {
            for nu in symplectic_eigenvalues(&tms(r)).unwrap() {
                assert!((nu - 0.5).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn block_diagonal_state_has_zero_cross_block() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]));
        let v6 = CovarianceState::new(m, Ordering::Tripartite).unwrap();
        let v4 = extract_pair_cm(&v6, ModePair::OcMc).unwrap();
        let blocks = BlockDecomposition::of(&v4).unwrap();
        assert_eq!(blocks.block_c, Matrix2::zeros());
        assert_eq!(blocks.block_a, Matrix2::new(3.0, 0.0, 0.0, 4.0));
        assert_eq!(blocks.block_b, Matrix2::new(5.0, 0.0, 0.0, 6.0));
    }

    #[test]
    fn pair_labels_round_trip() {
        for p in ModePair::ALL {
            assert_eq!(p.label().parse::<ModePair>().unwrap(), p);
        }
        assert!(matches!("oc-oc".parse::<ModePair>(), Err(Error::Domain(_))));
    }

    #[test]
    fn extraction_needs_tripartite_ordering() {
        let v = CovarianceState::generic(DMatrix::identity(6, 6)).unwrap();
        assert!(extract_pair_cm(&v, ModePair::OcMc).is_err());
    }
}
