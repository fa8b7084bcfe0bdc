//! f-mutual information of variable pairs, the variable-indexed f-MI
//! matrix, and positive-semidefiniteness testing.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dist::{JointDistribution, PairwiseJoint};
use crate::error::{Error, Result};
use crate::generators::Generator;

/// Symmetry and eigendecomposition report for a symmetric matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelReport {
    pub matrix: Vec<Vec<f64>>,
    /// Nondecreasing.
    pub eigenvalues: Vec<f64>,
    pub min_eigenvalue: f64,
    pub psd: bool,
    /// Unit vector attaining the minimal Rayleigh quotient.
    pub witness: Vec<f64>,
    pub tolerance: f64,
}

pub fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

pub fn rows_to_matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::ShapeMismatch("matrix rows must be square".into()));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// `I_f(X;Y) = D_f(P_XY || P_X x P_Y)` over the atoms with positive product
/// marginal; `f(0)` covers atoms where the joint vanishes.
pub fn f_mutual_information(pair: &PairwiseJoint, f: &dyn Generator) -> Result<f64> {
    let (nx, ny) = pair.joint().shape();
    let mut total = 0.0;
    for x in 0..nx {
        for y in 0..ny {
            let q = pair.left_marginal()[x] * pair.right_marginal()[y];
            if q <= 0.0 {
                continue;
            }
            let p = pair.joint()[(x, y)];
            let t = p / q;
            let val = f.eval(t).map_err(|e| {
                if t == 0.0 {
                    Error::InfiniteDivergence(format!(
                        "{}: f(0) infinite at atom ({x},{y})",
                        f.name()
                    ))
                } else {
                    e
                }
            })?;
            total += q * val;
        }
    }
    Ok(total)
}

/// The f-MI matrix `M_il = I_f(X_i; X_l)`, each unordered pair computed once.
pub fn mi_matrix(j: &JointDistribution, f: &dyn Generator) -> Result<DMatrix<f64>> {
    let n = j.n_vars();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for l in i..n {
            let pair = j.pairwise_joint(i, l)?;
            let v = f_mutual_information(&pair, f).map_err(|e| match e {
                Error::InfiniteDivergence(msg) => {
                    Error::InfiniteDivergence(format!("pair ({i},{l}): {msg}"))
                }
                other => other,
            })?;
            m[(i, l)] = v;
            m[(l, i)] = v;
        }
    }
    Ok(m)
}

/// Default PSD tolerance: relative to the spectral radius, with a floor for
/// the zero matrix.
pub fn default_psd_tolerance(spectral_radius: f64) -> f64 {
    (1e-8 * spectral_radius).max(1e-12)
}

/// Symmetric eigendecomposition with an explicit convergence threshold.
///
/// The default `symmetric_eigen` can return eigenvectors that do not match
/// their eigenvalues on matrices with highly degenerate spectra (rank-one
/// plus identity blocks); a 1e-14 threshold with a generous iteration cap
/// avoids that, with the default as fallback.
pub(crate) fn robust_symmetric_eigen(
    sym: &DMatrix<f64>,
) -> nalgebra::SymmetricEigen<f64, nalgebra::Dyn> {
    sym.clone()
        .try_symmetric_eigen(1e-14, 10_000)
        .unwrap_or_else(|| sym.clone().symmetric_eigen())
}

/// Full symmetric eigendecomposition and PSD verdict.
///
/// The input must be symmetric within 1e-10; it is exactly symmetrized
/// before the decomposition so a symmetric-specific solver applies.
pub fn psd_check(m: &DMatrix<f64>, tau: Option<f64>) -> Result<KernelReport> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::ShapeMismatch(format!(
            "matrix is {}x{}",
            n,
            m.ncols()
        )));
    }
    let mut asym = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            asym = asym.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    if asym > 1e-10 {
        return Err(Error::NotSymmetric(asym));
    }
    let sym = DMatrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]));
    let eig = robust_symmetric_eigen(&sym);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let min_eigenvalue = eigenvalues[0];
    let mut witness: DVector<f64> = eig.eigenvectors.column(order[0]).into();
    witness /= witness.norm();

    let spectral_radius = eigenvalues
        .iter()
        .fold(0.0f64, |acc, &l| acc.max(l.abs()));
    let tolerance = tau.unwrap_or_else(|| default_psd_tolerance(spectral_radius));

    let rayleigh = (witness.transpose() * &sym * &witness)[(0, 0)];
    debug_assert!(
        (rayleigh - min_eigenvalue).abs() <= 1e-8 * min_eigenvalue.abs().max(1.0),
        "witness Rayleigh quotient {rayleigh} vs eigenvalue {min_eigenvalue}"
    );

    Ok(KernelReport {
        matrix: matrix_to_rows(&sym),
        eigenvalues: eigenvalues.clone(),
        min_eigenvalue,
        psd: min_eigenvalue >= -tolerance,
        witness: witness.iter().copied().collect(),
        tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{ChiSquared, Kl, Monomial, Registry};

    fn dependent_pair() -> PairwiseJoint {
        PairwiseJoint::new(DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 0.5])).unwrap()
    }

    fn independent_pair() -> PairwiseJoint {
        PairwiseJoint::new(DMatrix::from_row_slice(2, 2, &[0.25; 4])).unwrap()
    }

    #[test]
    fn independent_pair_zero_for_all_generators() {
        for f in Registry::standard().catalog() {
            let v = f_mutual_information(&independent_pair(), f.as_ref()).unwrap();
            assert!(v.abs() < 1e-12, "{}: {v}", f.name());
        }
    }

    #[test]
    fn dependent_pair_chi2_is_one() {
        let v = f_mutual_information(&dependent_pair(), &ChiSquared).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dependent_pair_kl_is_ln2() {
        let v = f_mutual_information(&dependent_pair(), &Kl).unwrap();
        assert!((v - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn infinite_divergence_on_vanishing_joint() {
        let f = crate::generators::ReverseKl;
        let err = f_mutual_information(&dependent_pair(), &f).unwrap_err();
        assert!(matches!(err, Error::InfiniteDivergence(_)));
    }

    #[test]
    fn mi_matrix_dependent_binary_chi2() {
        let j = JointDistribution::new(vec![2, 2], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let m = mi_matrix(&j, &ChiSquared).unwrap();
        for i in 0..2 {
            for l in 0..2 {
                assert!((m[(i, l)] - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mi_matrix_independent_vanishes_off_diagonal() {
        let j = JointDistribution::new(vec![2, 2, 2], vec![0.125; 8]).unwrap();
        let m = mi_matrix(&j, &Kl).unwrap();
        for i in 0..3 {
            for l in 0..3 {
                if i == l {
                    // self-pair: I(X;X) = H(X) = ln 2 for a uniform bit
                    assert!((m[(i, l)] - std::f64::consts::LN_2).abs() < 1e-12);
                } else {
                    assert!(m[(i, l)].abs() < 1e-12);
                }
            }
        }
        assert!(psd_check(&m, None).unwrap().psd);
    }

    #[test]
    fn mi_symmetric_in_arguments() {
        let j = JointDistribution::new(
            vec![2, 3],
            vec![0.1, 0.2, 0.05, 0.15, 0.3, 0.2],
        )
        .unwrap();
        let a = f_mutual_information(&j.pairwise_joint(0, 1).unwrap(), &Kl).unwrap();
        let b = f_mutual_information(&j.pairwise_joint(1, 0).unwrap(), &Kl).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn mi_nonnegative_for_monomials_even() {
        let j = JointDistribution::new(
            vec![2, 3],
            vec![0.1, 0.2, 0.05, 0.15, 0.3, 0.2],
        )
        .unwrap();
        let pair = j.pairwise_joint(0, 1).unwrap();
        for m in [2usize, 4, 6] {
            let v = f_mutual_information(&pair, &Monomial::new(m)).unwrap();
            assert!(v >= -1e-12);
        }
    }

    #[test]
    fn psd_check_identity() {
        let report = psd_check(&DMatrix::identity(4, 4), None).unwrap();
        assert!(report.psd);
        assert!((report.min_eigenvalue - 1.0).abs() < 1e-12);
    }

    #[test]
    fn psd_check_paper_kernel_indefinite() {
        // K_{1/3} = (1/9) circulant(1, sqrt2/2, 0, sqrt2/2)
        let s = std::f64::consts::SQRT_2 / 2.0 / 9.0;
        let d = 1.0 / 9.0;
        let k = DMatrix::from_row_slice(
            4,
            4,
            &[d, s, 0.0, s, s, d, s, 0.0, 0.0, s, d, s, s, 0.0, s, d],
        );
        let report = psd_check(&k, None).unwrap();
        assert!(!report.psd);
        let expected = (1.0 - std::f64::consts::SQRT_2) / 9.0;
        assert!((report.min_eigenvalue - expected).abs() < 1e-12);
        assert!((report.min_eigenvalue + 0.046).abs() < 1e-3);
    }

    #[test]
    fn psd_check_diagonal_third() {
        let m = DMatrix::from_diagonal(&DVector::from_element(4, 1.0 / 3.0));
        let report = psd_check(&m, None).unwrap();
        assert!(report.psd);
        assert!(report.eigenvalues.iter().all(|l| (l - 1.0 / 3.0).abs() < 1e-12));
    }

    #[test]
    fn psd_check_rejects_asymmetric() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.2, 1.0]);
        assert!(matches!(psd_check(&m, None), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn witness_attains_min_eigenvalue() {
        let s = std::f64::consts::SQRT_2 / 2.0 / 9.0;
        let d = 1.0 / 9.0;
        let k = DMatrix::from_row_slice(
            4,
            4,
            &[d, s, 0.0, s, s, d, s, 0.0, 0.0, s, d, s, s, 0.0, s, d],
        );
        let report = psd_check(&k, None).unwrap();
        let w = DVector::from_vec(report.witness.clone());
        let quad = (w.transpose() * &k * &w)[(0, 0)];
        assert!((quad - report.min_eigenvalue).abs() <= 1e-8 * report.min_eigenvalue.abs().max(1.0));
    }
}
