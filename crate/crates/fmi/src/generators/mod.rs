//! f-divergence generators behind a common trait, plus a name-indexed
//! registry so algorithm variants can be selected at runtime.

mod catalog;
mod numeric;

pub use catalog::{
    ChiSquared, CoshGenerator, CressieRead, JensenShannon, Kl, Monomial, PowerSeries, Relu,
    ReverseKl, TotalVariation,
};
pub use numeric::{
    classify, default_tol, kink_gap, taylor_at_one, ConeVerdict, TaylorCoeffs, VerdictKind,
};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Whether the generator is known analytic at `t = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Analyticity {
    Yes,
    No,
    Unknown,
}

/// An f-divergence generator: convex on `(0, inf)` with `f(1) = 0`.
///
/// `f_zero` is the boundary value `lim_{t -> 0+} f(t)`; `None` means the
/// limit is infinite. `taylor(m)` returns the closed-form Taylor coefficient
/// `a_m = f^(m)(1) / m!` when one is available.
pub trait Generator: Send + Sync {
    fn name(&self) -> String;

    /// Evaluate `f(t)`. `t = 0` returns the boundary value when finite.
    fn eval(&self, t: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(Error::Domain(format!(
                "{}: argument {t} is negative",
                self.name()
            )));
        }
        if t == 0.0 {
            return self.f_zero().ok_or_else(|| {
                Error::Domain(format!("{}: f(0) is infinite", self.name()))
            });
        }
        self.eval_positive(t)
    }

    /// Evaluate at `t > 0`.
    fn eval_positive(&self, t: f64) -> Result<f64>;

    /// Boundary value `f(0)`; `None` when infinite.
    fn f_zero(&self) -> Option<f64>;

    /// Closed-form Taylor coefficient at `t = 1`, when known.
    fn taylor(&self, _m: usize) -> Option<f64> {
        None
    }

    fn analytic_at_one(&self) -> Analyticity;

    /// Convergence radius of the Taylor expansion at 1, when known.
    fn radius(&self) -> Option<f64> {
        None
    }
}

/// JSON generator spec:
/// `{"name":"kl"}` | `{"name":"cressie-read","alpha":2.0}` |
/// `{"name":"power-series","coeffs":[0,0,1],"radius":1.0}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
}

impl GeneratorSpec {
    pub fn named(name: &str) -> Self {
        Self {
            name: name.to_string(),
            alpha: None,
            coeffs: None,
            radius: None,
        }
    }

    /// Parse either a bare catalog name or an inline JSON spec.
    pub fn parse(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        if trimmed.starts_with('{') {
            Ok(serde_json::from_str(trimmed)?)
        } else {
            Ok(Self::named(trimmed))
        }
    }
}

type Builder = fn(&GeneratorSpec) -> Result<Box<dyn Generator>>;

/// Name-indexed registry of generator builders.
pub struct Registry {
    builders: BTreeMap<&'static str, Builder>,
}

impl Registry {
    /// The standard catalog.
    pub fn standard() -> Self {
        let mut builders: BTreeMap<&'static str, Builder> = BTreeMap::new();
        builders.insert("kl", |_| Ok(Box::new(Kl)));
        builders.insert("reverse-kl", |_| Ok(Box::new(ReverseKl)));
        builders.insert("chi2", |_| Ok(Box::new(ChiSquared)));
        builders.insert("js", |_| Ok(Box::new(JensenShannon)));
        builders.insert("tv", |_| Ok(Box::new(TotalVariation)));
        builders.insert("relu", |_| Ok(Box::new(Relu)));
        builders.insert("cosh", |_| Ok(Box::new(CoshGenerator)));
        builders.insert("cressie-read", |spec| {
            let alpha = spec.alpha.ok_or_else(|| {
                Error::Domain("cressie-read requires an alpha parameter".into())
            })?;
            Ok(Box::new(CressieRead::new(alpha)?))
        });
        builders.insert("power-series", |spec| {
            let coeffs = spec.coeffs.clone().ok_or_else(|| {
                Error::Domain("power-series requires a coefficient list".into())
            })?;
            let radius = spec.radius.ok_or_else(|| {
                Error::Domain("power-series requires a convergence radius".into())
            })?;
            Ok(Box::new(PowerSeries::new(coeffs, radius)?))
        });
        Self { builders }
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.builders.keys().copied().collect()
    }

    pub fn build(&self, spec: &GeneratorSpec) -> Result<Box<dyn Generator>> {
        let builder = self
            .builders
            .get(spec.name.as_str())
            .ok_or_else(|| Error::UnknownGenerator(spec.name.clone()))?;
        builder(spec)
    }

    /// Parse a name or inline JSON spec and build the generator.
    pub fn build_from_str(&self, s: &str) -> Result<Box<dyn Generator>> {
        self.build(&GeneratorSpec::parse(s)?)
    }

    /// Every parameter-free catalog generator (`cressie-read` instantiated
    /// at alpha = 2, `power-series` at the chi-squared coefficients).
    pub fn catalog(&self) -> Vec<Box<dyn Generator>> {
        self.builders
            .keys()
            .map(|name| {
                let mut spec = GeneratorSpec::named(name);
                if *name == "cressie-read" {
                    spec.alpha = Some(2.0);
                }
                if *name == "power-series" {
                    spec.coeffs = Some(vec![0.0, 0.0, 1.0]);
                    spec.radius = Some(10.0);
                }
                self.build(&spec).expect("catalog entry must build")
            })
            .collect()
    }
}

impl Default for Registry {
    fn default() -> Self {
        Self::standard()
    }
}
