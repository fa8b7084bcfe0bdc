//! The sufficiency direction: monomial f-MI via the centered-indicator
//! correlation identity, and the Gram-matrix check for monomial generators.
//!
//! The feature vectors over i.i.d. replica blocks are never materialized;
//! the expectation identity reduces every inner product to a finite sum over
//! the pairwise table.

use crate::dist::{JointDistribution, PairwiseJoint};
use crate::error::{Error, Result};
use crate::fmi::{psd_check, KernelReport};
use nalgebra::DMatrix;

/// Correlations of centered, scaled indicators:
/// `C(a,b) = (p(a,b) - p_X(a) p_Y(b)) / sqrt(p_X(a) p_Y(b))`.
#[derive(Debug, Clone)]
pub struct CenteredCorrelation {
    table: DMatrix<f64>,
    left: Vec<f64>,
    right: Vec<f64>,
}

impl CenteredCorrelation {
    pub fn table(&self) -> &DMatrix<f64> {
        &self.table
    }

    pub fn left_marginal(&self) -> &[f64] {
        &self.left
    }

    pub fn right_marginal(&self) -> &[f64] {
        &self.right
    }
}

/// Build the centered-correlation table of a pairwise joint.
///
/// Symbols with zero marginal probability carry no mass on either side and
/// are excluded from the table's support; their rows/columns are zero.
pub fn centered_correlation(pair: &PairwiseJoint) -> Result<CenteredCorrelation> {
    let (nx, ny) = pair.joint().shape();
    let left = pair.left_marginal().to_vec();
    let right = pair.right_marginal().to_vec();
    let mut table = DMatrix::zeros(nx, ny);
    for x in 0..nx {
        for y in 0..ny {
            let q = left[x] * right[y];
            if q > 0.0 {
                table[(x, y)] = (pair.joint()[(x, y)] - q) / q.sqrt();
            }
        }
    }
    Ok(CenteredCorrelation { table, left, right })
}

/// `I_{f_m}` with `f_m(t) = (t-1)^m` through the replica Gram identity:
/// `sum_{a,b} C(a,b)^m / (p_X(a) p_Y(b))^{m/2 - 1}`.
///
/// For odd `m` this is a signed quantity; no nonnegativity is implied.
pub fn monomial_mi(pair: &PairwiseJoint, m: usize) -> Result<f64> {
    if m < 2 {
        return Err(Error::Domain(format!("monomial order {m} must be >= 2")));
    }
    let corr = centered_correlation(pair)?;
    let (nx, ny) = corr.table.shape();
    let expo = m as f64 / 2.0 - 1.0;
    let mut total = 0.0;
    for x in 0..nx {
        for y in 0..ny {
            let q = corr.left[x] * corr.right[y];
            if q > 0.0 {
                total += corr.table[(x, y)].powi(m as i32) / q.powf(expo);
            }
        }
    }
    Ok(total)
}

/// Assemble `M^(m)_il = I_{f_m}(X_i; X_l)` via the Gram identity and test
/// PSD-ness. A `psd = false` report on valid input signals an implementation
/// bug or tolerance breach, not a mathematical possibility.
pub fn verify_gram_psd(
    j: &JointDistribution,
    m: usize,
    tau: Option<f64>,
) -> Result<KernelReport> {
    let n = j.n_vars();
    let mut matrix = DMatrix::zeros(n, n);
    for i in 0..n {
        for l in i..n {
            let v = monomial_mi(&j.pairwise_joint(i, l)?, m)?;
            matrix[(i, l)] = v;
            matrix[(l, i)] = v;
        }
    }
    psd_check(&matrix, tau)
}

/// Truncated Taylor mixture `sum_{m=2}^{M} a_m I_{f_m}` with a geometric
/// bound on the omitted tail.
///
/// `coeffs[0]` is `a_2`. Every ratio deviation on the pair's support must
/// stay inside the convergence radius `eta`. The tail bound uses
/// `sup_m |a_m| eta^m` as the scale of the unseen coefficients, which is the
/// natural bound available from a truncated convergent series.
pub fn mixture_mi(pair: &PairwiseJoint, coeffs: &[f64], eta: f64) -> Result<(f64, f64)> {
    let delta = pair.max_ratio_deviation();
    if delta >= eta {
        return Err(Error::RadiusExceeded {
            deviation: delta,
            radius: eta,
        });
    }
    let mut value = 0.0;
    let mut scale = 0.0f64;
    for (k, &a) in coeffs.iter().enumerate() {
        let m = k + 2;
        if a != 0.0 {
            value += a * monomial_mi(pair, m)?;
        }
        scale = scale.max(a.abs() * eta.powi(m as i32));
    }
    let top = coeffs.len() + 1; // highest order included
    let q = delta / eta;
    let tail = scale * q.powi(top as i32 + 1) / (1.0 - q);
    Ok((value, tail))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fmi::f_mutual_information;
    use crate::generators::{Generator, Kl, Monomial};
    use nalgebra::DMatrix;

    fn dependent_pair() -> PairwiseJoint {
        PairwiseJoint::new(DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 0.5])).unwrap()
    }

    fn independent_pair() -> PairwiseJoint {
        PairwiseJoint::new(DMatrix::from_row_slice(2, 2, &[0.25; 4])).unwrap()
    }

    #[test]
    fn centered_correlation_independent_zero() {
        let c = centered_correlation(&independent_pair()).unwrap();
        assert!(c.table().iter().all(|&v| v.abs() < 1e-15));
    }

    #[test]
    fn centered_correlation_dependent_half_matrix() {
        let c = centered_correlation(&dependent_pair()).unwrap();
        assert!((c.table()[(0, 0)] - 0.5).abs() < 1e-15);
        assert!((c.table()[(0, 1)] + 0.5).abs() < 1e-15);
        assert!((c.table()[(1, 0)] + 0.5).abs() < 1e-15);
        assert!((c.table()[(1, 1)] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn centering_weighted_sums_vanish() {
        let pair = PairwiseJoint::new(DMatrix::from_row_slice(
            2,
            3,
            &[0.1, 0.2, 0.05, 0.15, 0.3, 0.2],
        ))
        .unwrap();
        let c = centered_correlation(&pair).unwrap();
        for b in 0..3 {
            let s: f64 = (0..2)
                .map(|a| c.left_marginal()[a].sqrt() * c.table()[(a, b)])
                .sum();
            assert!(s.abs() < 1e-12);
        }
        for a in 0..2 {
            let s: f64 = (0..3)
                .map(|b| c.right_marginal()[b].sqrt() * c.table()[(a, b)])
                .sum();
            assert!(s.abs() < 1e-12);
        }
    }

    #[test]
    fn monomial_examples() {
        assert!((monomial_mi(&dependent_pair(), 2).unwrap() - 1.0).abs() < 1e-12);
        assert!(monomial_mi(&independent_pair(), 5).unwrap().abs() < 1e-14);
        assert!(monomial_mi(&dependent_pair(), 3).unwrap().abs() < 1e-14);
    }

    #[test]
    fn gram_identity_matches_direct_route() {
        let pair = PairwiseJoint::new(DMatrix::from_row_slice(
            2,
            3,
            &[0.1, 0.2, 0.05, 0.15, 0.3, 0.2],
        ))
        .unwrap();
        for m in 2..=6 {
            let via_gram = monomial_mi(&pair, m).unwrap();
            let direct = f_mutual_information(&pair, &Monomial::new(m)).unwrap();
            assert!(
                (via_gram - direct).abs() < 1e-10,
                "m={m}: {via_gram} vs {direct}"
            );
        }
    }

    #[test]
    fn linear_term_vanishes_exactly() {
        let pair = PairwiseJoint::new(DMatrix::from_row_slice(
            2,
            3,
            &[0.1, 0.2, 0.05, 0.15, 0.3, 0.2],
        ))
        .unwrap();
        let mut s = 0.0;
        for a in 0..2 {
            for b in 0..3 {
                s += pair.joint()[(a, b)] - pair.left_marginal()[a] * pair.right_marginal()[b];
            }
        }
        assert!(s.abs() < 1e-14);
    }

    #[test]
    fn verify_gram_psd_on_fixed_joints() {
        let j = JointDistribution::new(vec![2, 2], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        for m in 2..=4 {
            assert!(verify_gram_psd(&j, m, None).unwrap().psd);
        }
        let indep = JointDistribution::new(vec![2, 2, 2], vec![0.125; 8]).unwrap();
        let report = verify_gram_psd(&indep, 3, None).unwrap();
        assert!(report.psd);
        assert!(report.eigenvalues.iter().all(|l| l.abs() < 1e-12));
    }

    #[test]
    fn mixture_single_chi2_term() {
        let pair = dependent_pair();
        let (v, _) = mixture_mi(&pair, &[1.0], 2.5).unwrap();
        assert!((v - monomial_mi(&pair, 2).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn mixture_zero_coeffs() {
        let (v, tail) = mixture_mi(&independent_pair(), &[0.0, 0.0, 0.0], 1.0).unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(tail, 0.0);
    }

    #[test]
    fn mixture_kl_matches_direct_on_weak_pair() {
        // a weakly dependent pair: delta* well below 0.1
        let eps = 0.02;
        let pair = PairwiseJoint::new(DMatrix::from_row_slice(
            2,
            2,
            &[0.25 + eps, 0.25 - eps, 0.25 - eps, 0.25 + eps],
        ))
        .unwrap();
        assert!(pair.max_ratio_deviation() <= 0.1);
        let coeffs: Vec<f64> = (2..=12).map(|m| Kl.taylor(m).unwrap()).collect();
        let (v, _) = mixture_mi(&pair, &coeffs, 0.5).unwrap();
        let direct = f_mutual_information(&pair, &Kl).unwrap();
        assert!((v - direct).abs() < 1e-9, "{v} vs {direct}");
    }

    #[test]
    fn mixture_rejects_radius_breach() {
        let err = mixture_mi(&dependent_pair(), &[1.0], 0.5).unwrap_err();
        assert!(matches!(err, Error::RadiusExceeded { .. }));
    }
}
