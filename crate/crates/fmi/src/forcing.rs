//! Replica forcing: the kernel matrix `K_a`, diagonal correction `Delta_a`,
//! the block matrix `B_R = J_R (x) K + I_R (x) Delta`, its spectrum by block
//! diagonalization, and the minimal replica count forcing indefiniteness.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmi::psd_check;
use crate::generators::Generator;
use crate::latent::{diagonal_value, kernel_value, FamilySpec, LatentFamily};

/// Tolerance below which a Delta diagonal entry counts as negative.
pub const DELTA_TOL: f64 = 1e-10;

/// Kernel matrix and diagonal correction of a latent family, bundled with a
/// replica count.
#[derive(Debug, Clone)]
pub struct ReplicaBlock {
    pub kernel: DMatrix<f64>,
    /// Diagonal entries of Delta.
    pub delta: DVector<f64>,
    pub replicas: usize,
}

impl ReplicaBlock {
    pub fn new(
        f: &dyn Generator,
        fam: &LatentFamily,
        replicas: usize,
    ) -> Result<Self> {
        let kernel = kernel_matrix(f, fam)?;
        let delta = delta_matrix(f, fam)?;
        for (i, &d) in delta.iter().enumerate() {
            if d < -DELTA_TOL {
                return Err(Error::DeltaNotPsd { index: i, value: d });
            }
        }
        Ok(Self {
            kernel,
            delta,
            replicas,
        })
    }

    pub fn assemble(&self) -> Result<DMatrix<f64>> {
        assemble_block(&self.kernel, &self.delta, self.replicas)
    }
}

/// `K[i][j] = H_a(rho_ij)`, diagonal included at `rho_ii`.
pub fn kernel_matrix(f: &dyn Generator, fam: &LatentFamily) -> Result<DMatrix<f64>> {
    let n = fam.n();
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = kernel_value(f, fam.bias(), fam.rho(i, j)?)?;
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    Ok(k)
}

/// Diagonal of `Delta_a`: `d_a - H_a(rho_ii)` per variable.
pub fn delta_matrix(f: &dyn Generator, fam: &LatentFamily) -> Result<DVector<f64>> {
    let d_a = diagonal_value(f, fam.bias())?;
    let n = fam.n();
    let mut delta = DVector::zeros(n);
    for i in 0..n {
        delta[i] = d_a - kernel_value(f, fam.bias(), fam.rho(i, i)?)?;
    }
    Ok(delta)
}

/// Explicit Kronecker assembly of `B_R = J_R (x) K + I_R (x) Delta`.
pub fn assemble_block(
    k: &DMatrix<f64>,
    delta: &DVector<f64>,
    replicas: usize,
) -> Result<DMatrix<f64>> {
    let n = k.nrows();
    if k.ncols() != n {
        return Err(Error::ShapeMismatch(format!(
            "kernel is {}x{}",
            n,
            k.ncols()
        )));
    }
    if delta.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "delta has {} entries, kernel is {n}x{n}",
            delta.len()
        )));
    }
    if replicas == 0 {
        return Err(Error::ShapeMismatch("replica count must be >= 1".into()));
    }
    let size = replicas * n;
    let mut b = DMatrix::zeros(size, size);
    for r in 0..replicas {
        for s in 0..replicas {
            for i in 0..n {
                for j in 0..n {
                    let mut v = k[(i, j)];
                    if r == s && i == j {
                        v += delta[i];
                    }
                    b[(r * n + i, s * n + j)] = v;
                }
            }
        }
    }
    Ok(b)
}

/// Spectrum of `B_R` via block diagonalization: the eigenvalues of
/// `R K + Delta` together with `R - 1` copies of the eigenvalues of `Delta`.
/// Sorted nondecreasing.
pub fn block_spectrum(
    k: &DMatrix<f64>,
    delta: &DVector<f64>,
    replicas: usize,
) -> Result<Vec<f64>> {
    let n = k.nrows();
    if delta.len() != n || k.ncols() != n {
        return Err(Error::ShapeMismatch("kernel/delta dimensions differ".into()));
    }
    if replicas == 0 {
        return Err(Error::ShapeMismatch("replica count must be >= 1".into()));
    }
    let top = k * replicas as f64 + DMatrix::from_diagonal(delta);
    let mut eigenvalues: Vec<f64> = crate::fmi::robust_symmetric_eigen(&top)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    for _ in 1..replicas {
        eigenvalues.extend(delta.iter().copied());
    }
    eigenvalues.sort_by(f64::total_cmp);
    Ok(eigenvalues)
}

/// Outcome of the replica scan: the smallest forcing count, the negative
/// direction, and its quadratic form on the assembled block.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForcingResult {
    pub r_min: usize,
    /// Unit vector in `R^{R_min n}`.
    pub witness: Vec<f64>,
    pub quadratic_form: f64,
}

/// Smallest `R <= r_max` such that `R K + Delta` has an eigenvalue below the
/// PSD tolerance; `None` when `K` is numerically PSD or the budget runs out.
///
/// Once `R K + Delta` is indefinite it stays indefinite for larger `R`
/// (the witness direction has a negative `K` quadratic form), so the upward
/// scan finds the true minimum. The result is certified by explicit
/// eigendecomposition at `R_min` and `R_min - 1`.
pub fn min_replicas_for_indefiniteness(
    k: &DMatrix<f64>,
    delta: &DVector<f64>,
    r_max: usize,
) -> Result<Option<ForcingResult>> {
    let n = k.nrows();
    for (i, &d) in delta.iter().enumerate() {
        if d < -DELTA_TOL {
            return Err(Error::DeltaNotPsd { index: i, value: d });
        }
    }
    let k_report = psd_check(k, None)?;
    if k_report.psd {
        return Ok(None);
    }
    // Rayleigh bound from the minimal eigenvector of K gives an upper bound
    // on R_min; the scan below locates the exact transition.
    let v = DVector::from_vec(k_report.witness.clone());
    let vk = k_report.min_eigenvalue;
    let vd: f64 = v.iter().zip(delta.iter()).map(|(x, d)| x * x * d).sum();
    let bound = (vd / -vk).ceil() as usize + 1;

    for r in 1..=r_max.min(bound.max(1)) {
        let top = k * r as f64 + DMatrix::from_diagonal(delta);
        let report = psd_check(&top, None)?;
        if !report.psd {
            // certify by full block eigendecomposition at R and R - 1
            let full = psd_check(&assemble_block(k, delta, r)?, None)?;
            if full.psd {
                continue;
            }
            if r > 1 {
                let below = psd_check(&assemble_block(k, delta, r - 1)?, None)?;
                debug_assert!(below.psd, "transition at R={r} not sharp");
            }
            // lift the top-block witness: v = (1/sqrt(R)) 1_R (x) w
            let w = DVector::from_vec(report.witness.clone());
            let scale = 1.0 / (r as f64).sqrt();
            let mut witness = Vec::with_capacity(r * n);
            for _ in 0..r {
                witness.extend(w.iter().map(|x| x * scale));
            }
            let wv = DVector::from_vec(witness.clone());
            let b = assemble_block(k, delta, r)?;
            let quadratic_form = (wv.transpose() * &b * &wv)[(0, 0)];
            return Ok(Some(ForcingResult {
                r_min: r,
                witness,
                quadratic_form,
            }));
        }
    }
    Ok(None)
}

/// A certified counterexample: the family, the replica count, and the
/// negative direction of the assembled block matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CounterexampleCertificate {
    pub family: FamilySpec,
    pub generator: String,
    #[serde(rename = "R")]
    pub replicas: usize,
    pub witness: Vec<f64>,
    pub quadratic_form: f64,
    pub delta_star: f64,
    pub provenance: String,
}
