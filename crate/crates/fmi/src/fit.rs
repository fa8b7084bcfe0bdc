//! Polynomial least-squares fitting on Chebyshev grids.
//!
//! Shared by the numeric Taylor path of the generator catalog and by the
//! empirical kernel-coefficient oracle. High-order difference stencils lose
//! all precision past order ~6 in double precision, so coefficients are
//! extracted from a least-squares fit in a Chebyshev basis instead.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct PolyFit {
    /// Monomial coefficients in `(x - center)`, degree 0 upward.
    pub coeffs: Vec<f64>,
    /// Root-mean-square residual of the fit at the grid points.
    pub rms_residual: f64,
}

/// Chebyshev points of the first kind on `[-1, 1]`.
fn cheb_nodes(n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| ((2 * j + 1) as f64 * std::f64::consts::PI / (2 * n) as f64).cos())
        .collect()
}

/// Coefficient vectors of the Chebyshev polynomials `T_0 .. T_degree` in the
/// monomial basis.
fn cheb_to_monomial(degree: usize) -> Vec<Vec<f64>> {
    let mut polys: Vec<Vec<f64>> = Vec::with_capacity(degree + 1);
    polys.push(vec![1.0]);
    if degree >= 1 {
        polys.push(vec![0.0, 1.0]);
    }
    for k in 2..=degree {
        let mut next = vec![0.0; k + 1];
        for (i, &c) in polys[k - 1].iter().enumerate() {
            next[i + 1] += 2.0 * c;
        }
        for (i, &c) in polys[k - 2].iter().enumerate() {
            next[i] -= c;
        }
        polys.push(next);
    }
    polys
}

/// Least-squares fit of `f` by a degree-`degree` polynomial on the interval
/// `[center - halfwidth, center + halfwidth]`, sampled at `2 (degree + 1)`
/// Chebyshev points. Returns monomial coefficients in `(x - center)`.
pub fn polyfit<F>(f: F, center: f64, halfwidth: f64, degree: usize) -> Result<PolyFit>
where
    F: Fn(f64) -> Result<f64>,
{
    let n_nodes = 2 * (degree + 1);
    let nodes = cheb_nodes(n_nodes);
    let mut values = Vec::with_capacity(n_nodes);
    for &s in &nodes {
        values.push(f(center + halfwidth * s)?);
    }

    let mut basis = DMatrix::zeros(n_nodes, degree + 1);
    for (row, &s) in nodes.iter().enumerate() {
        let mut t_prev = 1.0;
        let mut t_cur = s;
        basis[(row, 0)] = 1.0;
        if degree >= 1 {
            basis[(row, 1)] = s;
        }
        for k in 2..=degree {
            let t_next = 2.0 * s * t_cur - t_prev;
            basis[(row, k)] = t_next;
            t_prev = t_cur;
            t_cur = t_next;
        }
    }

    let rhs = DVector::from_vec(values.clone());
    let svd = basis.clone().svd(true, true);
    let cheb_coeffs = svd
        .solve(&rhs, 1e-300)
        .map_err(|e| Error::Domain(format!("least-squares solve failed: {e}")))?;

    let residual = &basis * &cheb_coeffs - &rhs;
    let rms_residual = (residual.norm_squared() / n_nodes as f64).sqrt();

    // Chebyshev -> monomial in the scaled variable, then undo the scaling.
    let table = cheb_to_monomial(degree);
    let mut mono = vec![0.0; degree + 1];
    for (k, poly) in table.iter().enumerate() {
        for (i, &c) in poly.iter().enumerate() {
            mono[i] += cheb_coeffs[k] * c;
        }
    }
    for (m, c) in mono.iter_mut().enumerate() {
        *c /= halfwidth.powi(m as i32);
    }

    Ok(PolyFit {
        coeffs: mono,
        rms_residual,
    })
}
