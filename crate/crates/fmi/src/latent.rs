//! The biased one-hot coupling model: binary variables driven by a shared
//! uniform +-one-hot latent, closed-form pairwise joints, the three-point
//! kernel, and the bias-only diagonal value.
//!
//! Binary symbols are `{-1, +1}` internally; at the distribution boundary
//! `+1` maps to index 0 and `-1` to index 1.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dist::{JointDistribution, PairwiseJoint};
use crate::error::{Error, Result};
use crate::generators::Generator;

/// Slack for the admissibility check; the paper-reproduction preset is tight.
const ADMISSIBILITY_SLACK: f64 = 1e-12;

/// Name of the paper-reproduction preset.
pub const PAPER_PRESET: &str = "paper-tvd-relu-4";

/// Bias `a`, latent dimension `k`, and loading vectors `u_i` with
/// `|a| + ||u_i||_inf <= 1` (coordinatewise guarantee that every conditional
/// probability stays in `[0, 1]`).
#[derive(Debug, Clone)]
pub struct LatentFamily {
    a: f64,
    k: usize,
    loadings: Vec<Vec<f64>>,
}

/// JSON wire format for a latent family.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilySpec {
    pub a: f64,
    pub k: usize,
    pub loadings: Vec<Vec<f64>>,
}

impl LatentFamily {
    pub fn new(a: f64, k: usize, loadings: Vec<Vec<f64>>) -> Result<Self> {
        if !(-1.0..=1.0).contains(&a) || a.abs() >= 1.0 {
            return Err(Error::Inadmissible(format!("bias {a} outside (-1, 1)")));
        }
        if k == 0 {
            return Err(Error::Inadmissible("latent dimension must be >= 1".into()));
        }
        if loadings.is_empty() {
            return Err(Error::Inadmissible("family needs at least one variable".into()));
        }
        for (i, u) in loadings.iter().enumerate() {
            if u.len() != k {
                return Err(Error::ShapeMismatch(format!(
                    "loading {i} has dimension {}, expected {k}",
                    u.len()
                )));
            }
            let linf = u.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()));
            if a.abs() + linf > 1.0 + ADMISSIBILITY_SLACK {
                return Err(Error::Inadmissible(format!(
                    "|a| + ||u_{i}||_inf = {} > 1",
                    a.abs() + linf
                )));
            }
        }
        Ok(Self { a, k, loadings })
    }

    pub fn from_spec(spec: &FamilySpec) -> Result<Self> {
        Self::new(spec.a, spec.k, spec.loadings.clone())
    }

    pub fn to_spec(&self) -> FamilySpec {
        FamilySpec {
            a: self.a,
            k: self.k,
            loadings: self.loadings.clone(),
        }
    }

    /// The worked four-variable example: bias 1/3, the printed loadings
    /// rescaled by sqrt(2) into latent dimension k = 2 so that `rho_ij`
    /// equals the printed inner products exactly.
    pub fn paper_preset() -> Self {
        let a = 1.0 / 3.0;
        let g = 2.0 / 3.0;
        let h = std::f64::consts::FRAC_1_SQRT_2 * g;
        let loadings = vec![
            vec![g, 0.0],
            vec![h, h],
            vec![0.0, g],
            vec![-h, h],
        ];
        Self::new(a, 2, loadings).expect("paper preset is admissible")
    }

    pub fn bias(&self) -> f64 {
        self.a
    }

    pub fn latent_dim(&self) -> usize {
        self.k
    }

    pub fn loadings(&self) -> &[Vec<f64>] {
        &self.loadings
    }

    pub fn n(&self) -> usize {
        self.loadings.len()
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.n() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.n(),
            });
        }
        Ok(())
    }

    /// `rho_ij = (1/k) <u_i, u_j>`.
    pub fn rho(&self, i: usize, j: usize) -> Result<f64> {
        self.check_index(i)?;
        self.check_index(j)?;
        let dot: f64 = self.loadings[i]
            .iter()
            .zip(&self.loadings[j])
            .map(|(x, y)| x * y)
            .sum();
        Ok(dot / self.k as f64)
    }

    fn joint_from_rho(&self, rho: f64) -> Result<PairwiseJoint> {
        let a = self.a;
        // indices: 0 -> y = +1, 1 -> y = -1
        let y = [1.0, -1.0];
        let mut table = DMatrix::zeros(2, 2);
        for (xi, &yi) in y.iter().enumerate() {
            for (xj, &yj) in y.iter().enumerate() {
                table[(xi, xj)] =
                    0.25 * (1.0 + a * (yi + yj) + (a * a + rho) * yi * yj);
            }
        }
        PairwiseJoint::new(table)
    }

    /// Closed-form 2x2 joint of `(Y_i, Y_j)`, `i != j`:
    /// `P(y_i, y_j) = (1 + a(y_i + y_j) + (a^2 + rho_ij) y_i y_j) / 4`.
    pub fn pairwise_joint_closed_form(&self, i: usize, j: usize) -> Result<PairwiseJoint> {
        if i == j {
            return Err(Error::Domain(
                "closed-form pairwise joint needs distinct variables; the self-pair is the diagonal"
                    .into(),
            ));
        }
        let rho = self.rho(i, j)?;
        self.joint_from_rho(rho)
    }

    /// Joint of two distinct replica-indexed variables `(Y_i^(r), Y_j^(s))`.
    ///
    /// Replicas are conditionally independent given the shared latents, so
    /// the joint depends only on `rho_ij` (including `i = j` with `r != s`,
    /// which uses `rho_ii`).
    pub fn replica_pairwise_joint(
        &self,
        first: (usize, usize),
        second: (usize, usize),
    ) -> Result<PairwiseJoint> {
        if first == second {
            return Err(Error::Domain(
                "replica pair must consist of two distinct replica-indexed variables".into(),
            ));
        }
        let rho = self.rho(first.0, second.0)?;
        self.joint_from_rho(rho)
    }

    /// Brute-force oracle: the explicit joint over `(Y_1, ..., Y_n)` obtained
    /// by summing over the `2k` equiprobable latent atoms.
    pub fn enumerate_full_joint(&self) -> Result<JointDistribution> {
        let n = self.n();
        if n > 16 {
            return Err(Error::TooLarge {
                atoms: 1usize << n,
                limit: 1 << 16,
            });
        }
        let atoms = 1usize << n;
        let mut probs = vec![0.0; atoms];
        let latent_weight = 1.0 / (2 * self.k) as f64;
        for coord in 0..self.k {
            for sign in [1.0, -1.0] {
                for (idx, p) in probs.iter_mut().enumerate() {
                    let mut prob = latent_weight;
                    for i in 0..n {
                        // bit 0 of the highest variable is the last index;
                        // index 0 <-> y = +1
                        let bit = (idx >> (n - 1 - i)) & 1;
                        let y = if bit == 0 { 1.0 } else { -1.0 };
                        let eta = sign * self.loadings[i][coord];
                        prob *= 0.5 * (1.0 + y * (self.a + eta));
                    }
                    *p += prob;
                }
            }
        }
        JointDistribution::new(vec![2; n], probs)
    }

    /// `delta* = max_{i != j} max_{y_i, y_j} |rho_ij y_i y_j| / ((1 + a y_i)(1 + a y_j))`.
    pub fn dependence_radius(&self) -> f64 {
        let n = self.n();
        let a = self.a;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                let rho = self.rho(i, j).expect("indices in range");
                for yi in [1.0, -1.0] {
                    for yj in [1.0, -1.0] {
                        let denom = (1.0 + a * yi) * (1.0 + a * yj);
                        if denom > 0.0 {
                            worst = worst.max((rho / denom).abs());
                        }
                    }
                }
            }
        }
        worst
    }

    /// Uniform rescaling of all loadings.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let loadings = self
            .loadings
            .iter()
            .map(|u| u.iter().map(|x| x * factor).collect())
            .collect();
        Self::new(self.a, self.k, loadings)
    }
}

/// The three-point kernel
/// `H_a(z) = (1+a)^2/4 f(1 + z/(1+a)^2) + (1-a)^2/4 f(1 + z/(1-a)^2)
///          + (1-a^2)/2 f(1 - z/(1-a^2))`.
pub fn kernel_value(f: &dyn Generator, a: f64, z: f64) -> Result<f64> {
    let up = (1.0 + a) * (1.0 + a);
    let um = (1.0 - a) * (1.0 - a);
    let cross = 1.0 - a * a;
    let t1 = 1.0 + z / up;
    let t2 = 1.0 + z / um;
    let t3 = 1.0 - z / cross;
    Ok(up / 4.0 * f.eval(t1)? + um / 4.0 * f.eval(t2)? + cross / 2.0 * f.eval(t3)?)
}

/// Diagonal value `d_a = (1+a)^2/4 f(2/(1+a)) + (1-a)^2/4 f(2/(1-a))
/// + (1-a^2)/2 f(0)`; depends only on the bias.
pub fn diagonal_value(f: &dyn Generator, a: f64) -> Result<f64> {
    let f0 = f
        .f_zero()
        .ok_or_else(|| Error::InfiniteDivergence(format!("{}: f(0) infinite", f.name())))?;
    let up = (1.0 + a) * (1.0 + a);
    let um = (1.0 - a) * (1.0 - a);
    Ok(up / 4.0 * f.eval(2.0 / (1.0 + a))?
        + um / 4.0 * f.eval(2.0 / (1.0 - a))?
        + (1.0 - a * a) / 2.0 * f0)
}
