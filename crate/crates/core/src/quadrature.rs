//! Composite Gauss-Legendre quadrature for complex-valued integrands.
//!
//! Every Fourier coefficient and kernel moment in the crate that has no
//! closed form goes through [`Quadrature::integrate`]. The interval is split
//! into equal panels, each integrated with the same Gauss-Legendre rule; the
//! panel count doubles until two successive estimates agree.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig {
    pub nodes_per_panel: usize,
    pub panels: usize,
    pub abs_tol: f64,
    /// Upper bound on the panel count reached by doubling.
    pub max_panels: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            nodes_per_panel: 64,
            panels: 8,
            abs_tol: 1e-12,
            max_panels: 1024,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nodes_per_panel == 0 || self.panels == 0 {
            return Err(Error::Config(
                "quadrature needs at least one node and one panel".into(),
            ));
        }
        if self.max_panels < self.panels {
            return Err(Error::Config("max_panels must be >= panels".into()));
        }
        if !(self.abs_tol.is_finite() && self.abs_tol > 0.0) {
            return Err(Error::Config("abs_tol must be positive and finite".into()));
        }
        Ok(())
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    /// Computes the `n`-point rule by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let nt = T::from_usize(n).unwrap();
        let two = T::lit(2.0);
        let eps = T::epsilon() * T::lit(4.0);
        for i in 0..n.div_ceil(2) {
            // Chebyshev-like starting guess for the i-th largest root.
            let mut x =
                (T::PI() * (T::from_usize(i).unwrap() + T::lit(0.75)) / (nt + T::lit(0.5))).cos();
            let mut dp = T::one();
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= eps {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != T::zero() {
                dp = d;
            }
            let w = two / ((T::one() - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = T::zero();
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Single-panel integral over `[a, b]`.
    pub fn integrate<F>(&self, a: T, b: T, mut f: F) -> Complex<T>
    where
        F: FnMut(T) -> Complex<T>,
    {
        let half = (b - a) / T::lit(2.0);
        let mid = (a + b) / T::lit(2.0);
        let mut acc = Complex::new(T::zero(), T::zero());
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += f(mid + half * x) * w;
        }
        acc * half
    }
}

fn legendre_with_derivative<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for k in 2..=n {
        let kt = T::from_usize(k).unwrap();
        let p2 = ((T::lit(2.0) * kt - T::one()) * x * p1 - (kt - T::one()) * p0) / kt;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { T::one() } else { p1 };
    let nt = T::from_usize(n).unwrap();
    let d = nt * (x * p - p0) / (x * x - T::one());
    (p, d)
}

/// Composite rule with adaptive panel doubling.
#[derive(Debug, Clone)]
pub struct Quadrature<T> {
    rule: GaussLegendre<T>,
    config: QuadratureConfig,
}

impl<T: Real> Quadrature<T> {
    pub fn new(config: QuadratureConfig) -> Self {
        Self {
            rule: GaussLegendre::new(config.nodes_per_panel.max(1)),
            config,
        }
    }

    pub fn config(&self) -> &QuadratureConfig {
        &self.config
    }

    /// Integral over `[a, b]` with a fixed number of equal panels.
    pub fn integrate_panels<F>(&self, a: T, b: T, panels: usize, mut f: F) -> Complex<T>
    where
        F: FnMut(T) -> Complex<T>,
    {
        let width = (b - a) / T::from_usize(panels).unwrap();
        let mut acc = Complex::new(T::zero(), T::zero());
        for p in 0..panels {
            let lo = a + width * T::from_usize(p).unwrap();
            let hi = if p + 1 == panels { b } else { lo + width };
            acc += self.rule.integrate(lo, hi, &mut f);
        }
        acc
    }

    /// Integral over `[a, b]`, doubling the panel count until successive
    /// estimates differ by less than the configured tolerance.
    pub fn integrate<F>(&self, a: T, b: T, mut f: F) -> Result<Complex<T>>
    where
        F: FnMut(T) -> Complex<T>,
    {
        let mut panels = self.config.panels.max(1);
        let mut previous = self.integrate_panels(a, b, panels, &mut f);
        loop {
            panels *= 2;
            let current = self.integrate_panels(a, b, panels, &mut f);
            let residual = (current - previous).norm().as_f64();
            let scale = current.norm().as_f64().max(1.0);
            let tolerance = self
                .config
                .abs_tol
                .max(64.0 * T::epsilon().as_f64() * scale);
            if residual <= tolerance {
                return Ok(current);
            }
            if panels * 2 > self.config.max_panels {
                return Err(Error::Quadrature {
                    residual,
                    tolerance,
                });
            }
            previous = current;
        }
    }

    /// `(1 / 2 pi) * integral over [-pi, pi]`, the normalized circle average.
    pub fn circle_average<F>(&self, f: F) -> Result<Complex<T>>
    where
        F: FnMut(T) -> Complex<T>,
    {
        let pi = T::PI();
        Ok(self.integrate(-pi, pi, f)? / (T::lit(2.0) * pi))
    }
}

impl<T: Real> Default for Quadrature<T> {
    fn default() -> Self {
        Self::new(QuadratureConfig::default())
    }
}
