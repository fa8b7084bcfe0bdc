//! The coefficient-transfer analysis: the multiplier `T_m(a)` linking Taylor
//! coefficients of the generator at 1 to power-series coefficients of the
//! three-point kernel, its positivity, and an independent polynomial-fit
//! oracle for the kernel coefficients.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::polyfit;
use crate::generators::{taylor_at_one, Generator};
use crate::latent::kernel_value;

/// `T_m(a) = ((1+a)^{2-2m} + (1-a)^{2-2m}) / 4 - (a^2 - 1)^{1-m} / 2`
/// for `m >= 2`; `T_0 = T_1 = 0` (order 0 also vanishes through `f(1) = 0`,
/// since the three-point weights sum to 1).
pub fn transfer(m: usize, a: f64) -> f64 {
    if m < 2 {
        return 0.0;
    }
    let e = 2 - 2 * m as i32;
    let first = 0.25 * ((1.0 + a).powi(e) + (1.0 - a).powi(e));
    let second = 0.5 * (a * a - 1.0).powi(1 - m as i32);
    first - second
}

/// Positivity report for `T_m(a)` over an order range and bias grid, checked
/// through the reduced form
/// `(uv)^{m-1} T_m = (r^k + r^{-k}) / 4 - (-1)^k / 2` with `u = 1+a`,
/// `v = 1-a`, `r = u/v`, `k = m-1`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PositivityReport {
    pub all_positive: bool,
    /// `(m, a, reduced value)` for any failures.
    pub violations: Vec<(usize, f64, f64)>,
    pub m_max: usize,
}

pub fn verify_transfer_positivity(m_max: usize, a_grid: &[f64]) -> PositivityReport {
    assert!(m_max >= 2);
    let mut violations = Vec::new();
    for m in 2..=m_max {
        let k = m - 1;
        for &a in a_grid {
            let r = (1.0 + a) / (1.0 - a);
            let reduced =
                0.25 * (r.powi(k as i32) + r.powi(-(k as i32))) - 0.5 * (-1.0f64).powi(k as i32);
            if reduced <= 0.0 {
                violations.push((m, a, reduced));
            }
        }
    }
    PositivityReport {
        all_positive: violations.is_empty(),
        violations,
        m_max,
    }
}

/// Predicted kernel coefficients `d_m(a) = T_m(a) a_m` from the generator's
/// Taylor coefficients at 1 (`d_0 = d_1 = 0`).
pub fn predicted_coefficients(f: &dyn Generator, a: f64, m_max: usize) -> Result<Vec<f64>> {
    let tc = taylor_at_one(f, m_max)?;
    Ok((0..=tc.order())
        .map(|m| transfer(m, a) * tc.coeffs[m])
        .collect())
}

/// Polynomial fit of the kernel `z -> H_a(z)` on the disc
/// `|z| <= 0.8 (1 - |a|)^2`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmpiricalFit {
    pub coeffs: Vec<f64>,
    /// Per-coefficient error bars from cross-fit disagreement.
    pub errors: Vec<f64>,
    pub rms_residual: f64,
    /// Set when the degree-M residual stays large: the signature of a
    /// non-analytic kernel (total variation, ReLU).
    pub non_polynomial: bool,
}

/// Independent numerical oracle for the kernel coefficients: least-squares
/// polynomial fit of `kernel_value(f, a, .)` on a Chebyshev grid.
pub fn empirical_coefficients(
    f: &dyn Generator,
    a: f64,
    m_max: usize,
) -> Result<EmpiricalFit> {
    let radius = 0.8 * (1.0 - a.abs()).powi(2);
    // high-degree fit for the values; lower-degree and shrunk-disc fits
    // bound the truncation error
    let degree = (m_max + 8).max(24);
    let main = polyfit(|z| kernel_value(f, a, z), 0.0, radius, degree)?;
    let alt_degree = polyfit(|z| kernel_value(f, a, z), 0.0, radius, degree - 4)?;
    let alt_radius = polyfit(|z| kernel_value(f, a, z), 0.0, 0.85 * radius, degree)?;

    let scale = main
        .coeffs
        .iter()
        .take(m_max + 1)
        .fold(0.0f64, |acc, c| acc.max(c.abs()));

    let mut coeffs = Vec::with_capacity(m_max + 1);
    let mut errors = Vec::with_capacity(m_max + 1);
    for m in 0..=m_max {
        let v = main.coeffs[m];
        let spread = (alt_degree.coeffs[m] - v)
            .abs()
            .max((alt_radius.coeffs[m] - v).abs());
        coeffs.push(v);
        errors.push(2.0 * spread + 1e-12 * (1.0 + scale));
    }

    // residual of a plain degree-M fit detects kinked kernels
    let low = polyfit(|z| kernel_value(f, a, z), 0.0, radius, m_max)?;
    let kernel_scale = {
        let probe = kernel_value(f, a, radius)?
            .abs()
            .max(kernel_value(f, a, -radius)?.abs());
        probe.max(1e-300)
    };
    let non_polynomial = low.rms_residual / kernel_scale > 1e-3;

    if !non_polynomial {
        for (m, (&c, &e)) in coeffs.iter().zip(errors.iter()).enumerate() {
            if e > c.abs().max(1e-6) && e > 1e-2 * scale.max(1e-12) {
                return Err(Error::NumericUnstable { order: m, err: e });
            }
        }
    }

    Ok(EmpiricalFit {
        coeffs,
        errors,
        rms_residual: main.rms_residual,
        non_polynomial,
    })
}

/// Side-by-side table of predicted and empirically fitted kernel
/// coefficients at a fixed bias.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoefficientTable {
    pub a: f64,
    pub m_max: usize,
    pub transfer: Vec<f64>,
    pub predicted: Vec<f64>,
    pub empirical: Vec<f64>,
    pub empirical_errors: Vec<f64>,
    pub gaps: Vec<f64>,
    pub non_polynomial: bool,
}

pub fn coefficient_table(f: &dyn Generator, a: f64, m_max: usize) -> Result<CoefficientTable> {
    let predicted = predicted_coefficients(f, a, m_max)?;
    let fit = empirical_coefficients(f, a, m_max)?;
    let m_top = m_max.min(predicted.len() - 1);
    let transfer_vals: Vec<f64> = (0..=m_top).map(|m| transfer(m, a)).collect();
    let gaps = (0..=m_top)
        .map(|m| (predicted[m] - fit.coeffs[m]).abs())
        .collect();
    Ok(CoefficientTable {
        a,
        m_max: m_top,
        transfer: transfer_vals,
        predicted: predicted[..=m_top].to_vec(),
        empirical: fit.coeffs[..=m_top].to_vec(),
        empirical_errors: fit.errors[..=m_top].to_vec(),
        gaps,
        non_polynomial: fit.non_polynomial,
    })
}
