//! The standard generator catalog.

use super::{Analyticity, Generator};
use crate::error::{Error, Result};

/// Kullback-Leibler: `f(t) = t ln t`.
///
/// Taylor at 1: `a_1 = 1`, `a_m = (-1)^m / (m(m-1))` for `m >= 2`.
pub struct Kl;

impl Generator for Kl {
    fn name(&self) -> String {
        "kl".into()
    }

    fn eval_positive(&self, t: f64) -> Result<f64> {
        Ok(t * t.ln())
    }

    fn f_zero(&self) -> Option<f64> {
        Some(0.0)
    }

    fn taylor(&self, m: usize) -> Option<f64> {
        Some(match m {
            0 => 0.0,
            1 => 1.0,
            _ => {
                let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
                sign / (m as f64 * (m as f64 - 1.0))
            }
        })
    }

    fn analytic_at_one(&self) -> Analyticity {
        Analyticity::Yes
    }

    fn radius(&self) -> Option<f64> {
        Some(1.0)
    }
}

/// Reverse KL: `f(t) = -ln t`. `f(0)` is infinite.
pub struct ReverseKl;

impl Generator for ReverseKl {
    fn name(&self) -> String {
        "reverse-kl".into()
    }

    fn eval_positive(&self, t: f64) -> Result<f64> {
        Ok(-t.ln())
    }

    fn f_zero(&self) -> Option<f64> {
        None
    }

    fn taylor(&self, m: usize) -> Option<f64> {
        // -ln(1+u) = sum_{m>=1} (-1)^m u^m / m
        Some(match m {
            0 => 0.0,
            _ => {
                let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
                sign / m as f64
            }
        })
    }

    fn analytic_at_one(&self) -> Analyticity {
        Analyticity::Yes
    }

    fn radius(&self) -> Option<f64> {
        Some(1.0)
    }
}

/// Chi-squared: `f(t) = (t - 1)^2`.
pub struct ChiSquared;

impl Generator for ChiSquared {
    fn name(&self) -> String {
        "chi2".into()
    }

    fn eval_positive(&self, t: f64) -> Result<f64> {
        Ok((t - 1.0) * (t - 1.0))
    }

    fn f_zero(&self) -> Option<f64> {
        Some(1.0)
    }

    fn taylor(&self, m: usize) -> Option<f64> {
        Some(if m == 2 { 1.0 } else { 0.0 })
    }

    fn analytic_at_one(&self) -> Analyticity {
        Analyticity::Yes
    }

    fn radius(&self) -> Option<f64> {
        Some(f64::INFINITY)
    }
}

/// Jensen-Shannon: `f(t) = (t ln t - (t+1) ln((t+1)/2)) / 2`.
///
/// Taylor at 1: `a_m = (-1)^m (1 - 2^{1-m}) / (2 m (m-1))` for `m >= 2`.
pub struct JensenShannon;

impl Generator for JensenShannon {
    fn name(&self) -> String {
        "js".into()
    }

    fn eval_positive(&self, t: f64) -> Result<f64> {
        Ok(0.5 * (t * t.ln() - (t + 1.0) * ((t + 1.0) / 2.0).ln()))
    }

    fn f_zero(&self) -> Option<f64> {
        Some(0.5 * std::f64::consts::LN_2)
    }

    fn taylor(&self, m: usize) -> Option<f64> {
        Some(match m {
            0 | 1 => 0.0,
            _ => {
                let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
                let mf = m as f64;
                sign * (1.0 - (2.0f64).powi(1 - m as i32)) / (2.0 * mf * (mf - 1.0))
            }
        })
    }

    fn analytic_at_one(&self) -> Analyticity {
        Analyticity::Yes
    }

    fn radius(&self) -> Option<f64> {
        Some(1.0)
    }
}

/// Total variation: `f(t) = |t - 1| / 2`. Not differentiable at 1.
pub struct TotalVariation;

impl Generator for TotalVariation {
    fn name(&self) -> String {
        "tv".into()
    }

    fn eval_positive(&self, t: f64) -> Result<f64> {
        Ok(0.5 * (t - 1.0).abs())
    }

    fn f_zero(&self) -> Option<f64> {
        Some(0.5)
    }

    fn analytic_at_one(&self) -> Analyticity {
        Analyticity::No
    }
}

/// ReLU generator: `f(t) = max(0, t - 1)`. Not differentiable at 1.
pub struct Relu;

impl Generator for Relu {
    fn name(&self) -> String {
        "relu".into()
    }

    fn eval_positive(&self, t: f64) -> Result<f64> {
        Ok((t - 1.0).max(0.0))
    }

    fn f_zero(&self) -> Option<f64> {
        Some(0.0)
    }

    fn analytic_at_one(&self) -> Analyticity {
        Analyticity::No
    }
}

/// `f(t) = cosh(t - 1) - 1`: entire, `a_{2m} = 1/(2m)!`, odd coefficients 0.
pub struct CoshGenerator;

impl Generator for CoshGenerator {
    fn name(&self) -> String {
        "cosh".into()
    }

    fn eval_positive(&self, t: f64) -> Result<f64> {
        Ok((t - 1.0).cosh() - 1.0)
    }

    fn f_zero(&self) -> Option<f64> {
        Some(1.0f64.cosh() - 1.0)
    }

    fn taylor(&self, m: usize) -> Option<f64> {
        if m == 0 || m % 2 == 1 {
            return Some(0.0);
        }
        let mut fact = 1.0f64;
        for i in 2..=m {
            fact *= i as f64;
        }
        Some(1.0 / fact)
    }

    fn analytic_at_one(&self) -> Analyticity {
        Analyticity::Yes
    }

    fn radius(&self) -> Option<f64> {
        Some(f64::INFINITY)
    }
}

/// Cressie-Read power divergence:
/// `f_a(t) = (t^a - 1 - a(t - 1)) / (a(a - 1))`, `a` outside `{0, 1}`.
///
/// Normalized so `f(1) = 0` and `f'(1) = 0`; `alpha = 2` gives `(t-1)^2 / 2`.
pub struct CressieRead {
    alpha: f64,
}

impl CressieRead {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha == 0.0 || alpha == 1.0 {
            return Err(Error::Domain(
                "cressie-read alpha must be outside {0, 1} (limits are reverse-kl and kl)".into(),
            ));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

impl Generator for CressieRead {
    fn name(&self) -> String {
        format!("cressie-read({})", self.alpha)
    }

    fn eval_positive(&self, t: f64) -> Result<f64> {
        let a = self.alpha;
        Ok((t.powf(a) - 1.0 - a * (t - 1.0)) / (a * (a - 1.0)))
    }

    fn f_zero(&self) -> Option<f64> {
        // t^alpha -> 0 only for alpha > 0
        (self.alpha > 0.0).then(|| 1.0 / self.alpha)
    }

    fn taylor(&self, m: usize) -> Option<f64> {
        // binomial series: t^a = sum_m C(a, m) (t-1)^m
        let a = self.alpha;
        Some(match m {
            0 | 1 => 0.0,
            _ => {
                let mut binom = 1.0f64;
                for i in 0..m {
                    binom *= (a - i as f64) / (i as f64 + 1.0);
                }
                binom / (a * (a - 1.0))
            }
        })
    }

    fn analytic_at_one(&self) -> Analyticity {
        Analyticity::Yes
    }

    fn radius(&self) -> Option<f64> {
        Some(1.0)
    }
}

/// Monomial generator `f_m(t) = (t - 1)^m`.
///
/// Convex only for even `m`; odd monomials are used as termwise generators
/// inside Taylor mixtures, not as divergences in their own right.
pub struct Monomial {
    m: usize,
}

impl Monomial {
    pub fn new(m: usize) -> Self {
        assert!(m >= 2, "monomial order must be >= 2");
        Self { m }
    }

    pub fn order(&self) -> usize {
        self.m
    }
}

impl Generator for Monomial {
    fn name(&self) -> String {
        format!("monomial({})", self.m)
    }

    fn eval_positive(&self, t: f64) -> Result<f64> {
        Ok((t - 1.0).powi(self.m as i32))
    }

    fn f_zero(&self) -> Option<f64> {
        Some((-1.0f64).powi(self.m as i32))
    }

    fn taylor(&self, m: usize) -> Option<f64> {
        Some(if m == self.m { 1.0 } else { 0.0 })
    }

    fn analytic_at_one(&self) -> Analyticity {
        Analyticity::Yes
    }

    fn radius(&self) -> Option<f64> {
        Some(f64::INFINITY)
    }
}

/// User-supplied power series `f(t) = sum_m a_m (t - 1)^m` on
/// `|t - 1| < radius`. Requires `a_0 = 0`; arguments outside the closed
/// disc are rejected.
pub struct PowerSeries {
    coeffs: Vec<f64>,
    radius: f64,
}

impl PowerSeries {
    pub fn new(coeffs: Vec<f64>, radius: f64) -> Result<Self> {
        if coeffs.first().is_some_and(|a0| a0.abs() > 1e-12) {
            return Err(Error::Domain("power series must have a_0 = 0".into()));
        }
        if radius.is_nan() || radius <= 0.0 {
            return Err(Error::Domain("power series radius must be positive".into()));
        }
        Ok(Self { coeffs, radius })
    }
}

impl Generator for PowerSeries {
    fn name(&self) -> String {
        "power-series".into()
    }

    fn eval_positive(&self, t: f64) -> Result<f64> {
        let u = t - 1.0;
        if u.abs() > self.radius {
            return Err(Error::Domain(format!(
                "power series evaluated at t={t}, outside |t-1| <= {}",
                self.radius
            )));
        }
        // Horner
        Ok(self
            .coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, &a| acc * u + a))
    }

    fn f_zero(&self) -> Option<f64> {
        (self.radius >= 1.0)
            .then(|| self.coeffs.iter().rev().fold(0.0, |acc, &a| -acc + a))
    }

    fn taylor(&self, m: usize) -> Option<f64> {
        Some(self.coeffs.get(m).copied().unwrap_or(0.0))
    }

    fn analytic_at_one(&self) -> Analyticity {
        Analyticity::Yes
    }

    fn radius(&self) -> Option<f64> {
        Some(self.radius)
    }
}
