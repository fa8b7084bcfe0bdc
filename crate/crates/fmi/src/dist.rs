//! Finite discrete joint distributions, pairwise marginals, and the
//! pairwise weak-dependence radius.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for normalization and marginal-consistency checks.
pub const PROB_TOL: f64 = 1e-12;

/// Explicit probability table over `n` finite-alphabet variables.
///
/// Stored dense in row-major order (last variable fastest). Intended for
/// verification scale (up to ~16 binary variables); larger constructions go
/// through closed-form pairwise joints instead.
#[derive(Debug, Clone)]
pub struct JointDistribution {
    alphabet_sizes: Vec<usize>,
    probs: Vec<f64>,
}

/// JSON wire format: omitted atoms have probability 0.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistributionSpec {
    pub alphabet_sizes: Vec<usize>,
    pub atoms: Vec<AtomSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AtomSpec {
    pub x: Vec<usize>,
    pub p: f64,
}

impl JointDistribution {
    /// Build from a dense table and validate both invariants.
    pub fn new(alphabet_sizes: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        if alphabet_sizes.is_empty() || alphabet_sizes.contains(&0) {
            return Err(Error::ShapeMismatch(
                "alphabet sizes must be positive and nonempty".into(),
            ));
        }
        let total: usize = alphabet_sizes.iter().product();
        if probs.len() != total {
            return Err(Error::ShapeMismatch(format!(
                "table has {} entries, expected {}",
                probs.len(),
                total
            )));
        }
        let j = Self {
            alphabet_sizes,
            probs,
        };
        j.validate()?;
        Ok(j)
    }

    /// Build from the sparse atom list of the JSON format.
    pub fn from_spec(spec: &DistributionSpec) -> Result<Self> {
        let n = spec.alphabet_sizes.len();
        if n == 0 || spec.alphabet_sizes.contains(&0) {
            return Err(Error::ShapeMismatch(
                "alphabet sizes must be positive and nonempty".into(),
            ));
        }
        let total: usize = spec.alphabet_sizes.iter().product();
        let mut probs = vec![0.0; total];
        for atom in &spec.atoms {
            if atom.x.len() != n {
                return Err(Error::ShapeMismatch(format!(
                    "atom {:?} has {} indices, expected {}",
                    atom.x,
                    atom.x.len(),
                    n
                )));
            }
            let mut idx = 0usize;
            for (d, &xi) in atom.x.iter().enumerate() {
                if xi >= spec.alphabet_sizes[d] {
                    return Err(Error::IndexOutOfRange {
                        index: xi,
                        len: spec.alphabet_sizes[d],
                    });
                }
                idx = idx * spec.alphabet_sizes[d] + xi;
            }
            probs[idx] += atom.p;
        }
        Self::new(spec.alphabet_sizes.clone(), probs)
    }

    /// Sparse atom list (nonzero atoms only) for JSON output.
    pub fn to_spec(&self) -> DistributionSpec {
        let atoms = self
            .atoms()
            .filter(|(_, p)| *p != 0.0)
            .map(|(x, p)| AtomSpec { x, p })
            .collect();
        DistributionSpec {
            alphabet_sizes: self.alphabet_sizes.clone(),
            atoms,
        }
    }

    /// Check normalization and nonnegativity.
    pub fn validate(&self) -> Result<()> {
        for (i, &p) in self.probs.iter().enumerate() {
            if p < 0.0 {
                return Err(Error::NegativeProbability {
                    p,
                    atom: self.unravel(i),
                });
            }
        }
        let sum: f64 = self.probs.iter().sum();
        if (sum - 1.0).abs() > PROB_TOL {
            return Err(Error::Normalization { sum, tol: PROB_TOL });
        }
        Ok(())
    }

    pub fn n_vars(&self) -> usize {
        self.alphabet_sizes.len()
    }

    pub fn alphabet_sizes(&self) -> &[usize] {
        &self.alphabet_sizes
    }

    fn unravel(&self, mut idx: usize) -> Vec<usize> {
        let n = self.n_vars();
        let mut atom = vec![0; n];
        for d in (0..n).rev() {
            atom[d] = idx % self.alphabet_sizes[d];
            idx /= self.alphabet_sizes[d];
        }
        atom
    }

    /// Iterate `(atom, probability)` over the full table.
    pub fn atoms(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(|(i, &p)| (self.unravel(i), p))
    }

    /// Marginal distribution of variable `i`.
    pub fn marginal(&self, i: usize) -> Result<Vec<f64>> {
        let n = self.n_vars();
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, len: n });
        }
        let mut m = vec![0.0; self.alphabet_sizes[i]];
        for (atom, p) in self.atoms() {
            m[atom[i]] += p;
        }
        Ok(m)
    }

    /// Marginalize onto coordinates `(i, l)`.
    ///
    /// `i == l` is allowed and yields the diagonal self-pair joint
    /// `p(x, y) = p_X(x) 1{x = y}`.
    pub fn pairwise_joint(&self, i: usize, l: usize) -> Result<PairwiseJoint> {
        let n = self.n_vars();
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, len: n });
        }
        if l >= n {
            return Err(Error::IndexOutOfRange { index: l, len: n });
        }
        let (si, sl) = (self.alphabet_sizes[i], self.alphabet_sizes[l]);
        let mut joint = DMatrix::zeros(si, sl);
        if i == l {
            for (atom, p) in self.atoms() {
                joint[(atom[i], atom[i])] += p;
            }
        } else {
            for (atom, p) in self.atoms() {
                joint[(atom[i], atom[l])] += p;
            }
        }
        PairwiseJoint::new(joint)
    }

    /// Maximal pairwise ratio deviation `max |r_ij(x, y) - 1|` over all
    /// pairs `i != l` and atoms with positive product marginal.
    ///
    /// The family is delta-pairwise-weakly-dependent for every delta above
    /// the returned value.
    pub fn weak_dependence_radius(&self) -> Result<f64> {
        let n = self.n_vars();
        let mut worst = 0.0f64;
        for i in 0..n {
            for l in (i + 1)..n {
                let pair = self.pairwise_joint(i, l)?;
                worst = worst.max(pair.max_ratio_deviation());
            }
        }
        Ok(worst)
    }
}

/// A two-variable joint table with its marginals.
///
/// Construction enforces support consistency: `p(x, y) > 0` implies both
/// marginals are positive, so every joint-to-product ratio on the support is
/// well-defined.
#[derive(Debug, Clone)]
pub struct PairwiseJoint {
    joint: DMatrix<f64>,
    left: Vec<f64>,
    right: Vec<f64>,
}

impl PairwiseJoint {
    pub fn new(joint: DMatrix<f64>) -> Result<Self> {
        let (nx, ny) = joint.shape();
        if nx == 0 || ny == 0 {
            return Err(Error::ShapeMismatch("empty pairwise table".into()));
        }
        let mut left = vec![0.0; nx];
        let mut right = vec![0.0; ny];
        for x in 0..nx {
            for y in 0..ny {
                let p = joint[(x, y)];
                if p < -PROB_TOL {
                    return Err(Error::NegativeProbability {
                        p,
                        atom: vec![x, y],
                    });
                }
                left[x] += p;
                right[y] += p;
            }
        }
        // support consistency is automatic for a nonnegative table: a positive
        // entry forces positive row and column sums
        Ok(Self { joint, left, right })
    }

    pub fn joint(&self) -> &DMatrix<f64> {
        &self.joint
    }

    pub fn left_marginal(&self) -> &[f64] {
        &self.left
    }

    pub fn right_marginal(&self) -> &[f64] {
        &self.right
    }

    /// Joint-to-product ratios `r(x, y) = p(x, y) / (p_X(x) p_Y(y))`.
    ///
    /// Entries where the product marginal vanishes are `None`.
    pub fn ratio_table(&self) -> Vec<Vec<Option<f64>>> {
        let (nx, ny) = self.joint.shape();
        (0..nx)
            .map(|x| {
                (0..ny)
                    .map(|y| {
                        let q = self.left[x] * self.right[y];
                        (q > 0.0).then(|| self.joint[(x, y)] / q)
                    })
                    .collect()
            })
            .collect()
    }

    /// `max |r(x, y) - 1|` over atoms with positive product marginal.
    pub fn max_ratio_deviation(&self) -> f64 {
        self.ratio_table()
            .iter()
            .flatten()
            .flatten()
            .fold(0.0f64, |acc, r| acc.max((r - 1.0).abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform_pair() -> JointDistribution {
        JointDistribution::new(vec![2, 2], vec![0.25; 4]).unwrap()
    }

    /// X = Y uniform on {0, 1}.
    fn dependent_pair() -> JointDistribution {
        JointDistribution::new(vec![2, 2], vec![0.5, 0.0, 0.0, 0.5]).unwrap()
    }

    #[test]
    fn validate_uniform_ok() {
        uniform_pair().validate().unwrap();
    }

    #[test]
    fn validate_rejects_bad_sum() {
        let err = JointDistribution::new(vec![2, 2], vec![0.25, 0.25, 0.25, 0.249]).unwrap_err();
        assert!(matches!(err, Error::Normalization { .. }));
    }

    #[test]
    fn validate_rejects_negative() {
        let err = JointDistribution::new(vec![2], vec![1.1, -0.1]).unwrap_err();
        assert!(matches!(err, Error::NegativeProbability { .. }));
    }

    #[test]
    fn pairwise_dependent_is_diagonal() {
        let pair = dependent_pair().pairwise_joint(0, 1).unwrap();
        assert_eq!(pair.joint()[(0, 0)], 0.5);
        assert_eq!(pair.joint()[(1, 1)], 0.5);
        assert_eq!(pair.joint()[(0, 1)], 0.0);
    }

    #[test]
    fn self_pair_is_diagonal_marginal() {
        let pair = uniform_pair().pairwise_joint(0, 0).unwrap();
        assert_eq!(pair.joint()[(0, 0)], 0.5);
        assert_eq!(pair.joint()[(1, 1)], 0.5);
        assert_eq!(pair.joint()[(0, 1)], 0.0);
    }

    #[test]
    fn three_var_independent_marginalizes_to_product() {
        let j = JointDistribution::new(vec![2, 2, 2], vec![0.125; 8]).unwrap();
        let pair = j.pairwise_joint(0, 2).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                assert!((pair.joint()[(x, y)] - 0.25).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn ratios_independent_all_one() {
        let pair = uniform_pair().pairwise_joint(0, 1).unwrap();
        for row in pair.ratio_table() {
            for r in row.into_iter().flatten() {
                assert!((r - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn ratios_dependent_two_and_zero() {
        let pair = dependent_pair().pairwise_joint(0, 1).unwrap();
        let rt = pair.ratio_table();
        assert!((rt[0][0].unwrap() - 2.0).abs() < 1e-15);
        assert!((rt[0][1].unwrap() - 0.0).abs() < 1e-15);
    }

    #[test]
    fn weak_dependence_radius_examples() {
        assert!(uniform_pair().weak_dependence_radius().unwrap() < 1e-15);
        let d = dependent_pair().weak_dependence_radius().unwrap();
        assert!((d - 1.0).abs() < 1e-15);
    }

    #[test]
    fn marginal_consistency() {
        let j = JointDistribution::new(
            vec![2, 3],
            vec![0.1, 0.2, 0.05, 0.15, 0.3, 0.2],
        )
        .unwrap();
        let pair = j.pairwise_joint(0, 1).unwrap();
        let direct = j.marginal(0).unwrap();
        for (x, &d) in direct.iter().enumerate() {
            assert!((pair.left_marginal()[x] - d).abs() < PROB_TOL);
        }
    }

    #[test]
    fn spec_roundtrip() {
        let j = dependent_pair();
        let spec = j.to_spec();
        let back = JointDistribution::from_spec(&spec).unwrap();
        assert_eq!(back.probs, j.probs);
    }

    #[test]
    fn spec_rejects_out_of_range_symbol() {
        let spec = DistributionSpec {
            alphabet_sizes: vec![2],
            atoms: vec![AtomSpec { x: vec![2], p: 1.0 }],
        };
        assert!(matches!(
            JointDistribution::from_spec(&spec).unwrap_err(),
            Error::IndexOutOfRange { .. }
        ));
    }
}
