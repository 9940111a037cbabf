//! Ordering kernels `K(sigma, lambda)` and their structural conditions.
//!
//! The kernel selects the operator ordering of the quantization map. The two
//! built-in kernels (Weyl, `K = 1`, and symmetric, `K = cos(sigma lambda / 2)`)
//! carry closed-form moments; user kernels are integrated numerically.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::Quadrature;
use crate::scalar::{half_integer_sinc, Real};

/// A real number restricted to the half-integers, stored as twice its value.
///
/// Kernel moments are evaluated at `m = (j + k) / 2 - n`, which is always a
/// half-integer; keeping it exact lets the closed forms return exact zeros.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInteger(i64);

impl HalfInteger {
    pub const fn from_twice(twice: i64) -> Self {
        Self(twice)
    }

    pub const fn from_int(m: i64) -> Self {
        Self(2 * m)
    }

    /// `(j + k) / 2 - n`.
    pub const fn midpoint_offset(j: i64, k: i64, n: i64) -> Self {
        Self(j + k - 2 * n)
    }

    pub const fn twice(self) -> i64 {
        self.0
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn value<T: Real>(self) -> T {
        T::from_int(self.0) / T::lit(2.0)
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum KernelKind {
    Weyl,
    Symmetric,
    Custom,
}

type KernelFn<T> = dyn Fn(T, T) -> Complex<T> + Send + Sync;

#[derive(Clone)]
pub struct KernelSpec<T> {
    name: String,
    kind: KernelKind,
    product_form: bool,
    eval: Arc<KernelFn<T>>,
}

impl<T> fmt::Debug for KernelSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KernelSpec")
            .field("name", &self.name)
            .field("product_form", &self.product_form)
            .finish_non_exhaustive()
    }
}

impl<T: Real> KernelSpec<T> {
    /// Weyl ordering, `K = 1`.
    pub fn weyl() -> Self {
        Self {
            name: "weyl".into(),
            kind: KernelKind::Weyl,
            product_form: true,
            eval: Arc::new(|_, _| Complex::new(T::one(), T::zero())),
        }
    }

    /// Symmetric ordering, `K = cos(sigma lambda / 2)`.
    pub fn symmetric() -> Self {
        Self {
            name: "symmetric".into(),
            kind: KernelKind::Symmetric,
            product_form: true,
            eval: Arc::new(|s: T, l: T| Complex::new((s * l / T::lit(2.0)).cos(), T::zero())),
        }
    }

    /// A user kernel. Its moments are always computed by quadrature.
    pub fn custom<F>(name: impl Into<String>, product_form: bool, f: F) -> Self
    where
        F: Fn(T, T) -> Complex<T> + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            kind: KernelKind::Custom,
            product_form,
            eval: Arc::new(f),
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "weyl" => Ok(Self::weyl()),
            "symmetric" => Ok(Self::symmetric()),
            other => Err(Error::Config(format!(
                "unknown kernel `{other}` (expected `weyl` or `symmetric`)"
            ))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_product_form(&self) -> bool {
        self.product_form
    }

    pub fn is_builtin(&self) -> bool {
        self.kind != KernelKind::Custom
    }

    pub fn is_weyl(&self) -> bool {
        self.kind == KernelKind::Weyl
    }

    pub fn is_symmetric(&self) -> bool {
        self.kind == KernelKind::Symmetric
    }

    /// Raw evaluation without the domain check.
    pub fn evaluate(&self, sigma: T, lambda: T) -> Complex<T> {
        (self.eval)(sigma, lambda)
    }
}

/// `K(sigma, lambda)` for `sigma` in `[-pi, pi]`.
pub fn eval_kernel<T: Real>(kernel: &KernelSpec<T>, sigma: T, lambda: T) -> Result<Complex<T>> {
    let pi = T::PI();
    if !(sigma >= -pi && sigma <= pi) {
        return Err(Error::Domain(format!("sigma = {sigma} outside [-pi, pi]")));
    }
    Ok(kernel.evaluate(sigma, lambda))
}

/// `(1/2pi) * integral_{-pi}^{pi} K(sigma, l) exp(i sigma m) d sigma`.
///
/// Closed forms for the built-in kernels, quadrature otherwise.
pub fn kernel_moment<T: Real>(
    kernel: &KernelSpec<T>,
    l: i64,
    m: HalfInteger,
    quad: &Quadrature<T>,
) -> Result<Complex<T>> {
    match kernel.kind {
        KernelKind::Weyl => Ok(Complex::new(half_integer_sinc(m.twice()), T::zero())),
        KernelKind::Symmetric => {
            // cos(sigma l / 2) e^{i sigma m} = (e^{i sigma (m + l/2)} + e^{i sigma (m - l/2)}) / 2
            let v = (half_integer_sinc::<T>(m.twice() + l) + half_integer_sinc::<T>(m.twice() - l))
                / T::lit(2.0);
            Ok(Complex::new(v, T::zero()))
        }
        KernelKind::Custom => kernel_moment_quadrature(kernel, l, m, quad),
    }
}

/// Generic quadrature path of [`kernel_moment`], used for every kernel.
pub fn kernel_moment_quadrature<T: Real>(
    kernel: &KernelSpec<T>,
    l: i64,
    m: HalfInteger,
    quad: &Quadrature<T>,
) -> Result<Complex<T>> {
    let lt = T::from_int(l);
    let mt = m.value::<T>();
    quad.circle_average(|s| kernel.evaluate(s, lt) * Complex::from_polar(T::one(), s * mt))
}

/// Sampling grid for [`validate_kernel`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationGrid {
    /// Number of equally spaced sigma samples on `[-pi, pi]`, endpoints included.
    pub sigma_points: usize,
    /// Integer lambda samples cover `[-l_max, l_max]`.
    pub l_max: i64,
}

impl Default for ValidationGrid {
    fn default() -> Self {
        Self {
            sigma_points: 33,
            l_max: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionCheck {
    pub condition: &'static str,
    pub applicable: bool,
    pub passed: bool,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub kernel: String,
    pub tolerance: f64,
    pub checks: Vec<ConditionCheck>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks
            .iter()
            .filter(|c| c.applicable)
            .all(|c| c.passed)
    }

    pub fn check(&self, condition: &str) -> Option<&ConditionCheck> {
        self.checks.iter().find(|c| c.condition == condition)
    }
}

/// Condition names used in [`ValidationReport`].
pub mod conditions {
    pub const FINITE: &str = "finite";
    pub const REALITY: &str = "reality";
    pub const THETA_ONLY: &str = "theta_only";
    pub const L_ONLY: &str = "l_only";
    pub const PRODUCT_FORM: &str = "product_form";
    pub const UNIT_AT_ZERO: &str = "product_unit_at_zero";
    pub const PRODUCT_REAL: &str = "product_real";
}

/// Checks the structural kernel conditions on a grid.
///
/// Failures are recorded in the report, never returned as errors. Product-form
/// conditions are marked not applicable for kernels that do not declare
/// product form.
pub fn validate_kernel<T: Real>(
    kernel: &KernelSpec<T>,
    grid: ValidationGrid,
    tol: f64,
) -> Result<ValidationReport> {
    if grid.sigma_points < 2 || grid.l_max < 0 {
        return Err(Error::Config(
            "validation grid needs >= 2 sigma points and l_max >= 0".into(),
        ));
    }
    let pi = T::PI();
    let step = T::lit(2.0) * pi / T::from_usize(grid.sigma_points - 1).unwrap();
    let sigmas: Vec<T> = (0..grid.sigma_points)
        .map(|i| {
            if i + 1 == grid.sigma_points {
                pi
            } else {
                -pi + step * T::from_usize(i).unwrap()
            }
        })
        .collect();
    let ls: Vec<i64> = (-grid.l_max..=grid.l_max).collect();
    let one = Complex::new(T::one(), T::zero());
    let k = |s: T, l: i64| kernel.evaluate(s, T::from_int(l));

    let mut finite = true;
    let mut reality = 0.0f64;
    let mut product_form = 0.0f64;
    let mut product_real = 0.0f64;
    for &s in &sigmas {
        for &l in &ls {
            let v = k(s, l);
            finite &= v.re.is_finite() && v.im.is_finite();
            reality = reality.max((k(-s, -l).conj() - v).norm().as_f64());
            product_real = product_real.max(v.im.abs().as_f64());
            if l != 0 {
                // same product sigma * lambda at half the angle
                let w = kernel.evaluate(s / T::lit(2.0), T::from_int(2 * l));
                product_form = product_form.max((w - v).norm().as_f64());
            }
        }
    }
    let theta_only = ls
        .iter()
        .map(|&l| (k(T::zero(), l) - one).norm().as_f64())
        .fold(0.0, f64::max);
    let l_only = sigmas
        .iter()
        .map(|&s| (k(s, 0) - one).norm().as_f64())
        .fold(0.0, f64::max);
    let unit_at_zero = (kernel.evaluate(T::zero(), T::zero()) - one)
        .norm()
        .as_f64();

    let pf = kernel.is_product_form();
    let mk = |condition, applicable: bool, dev: f64| ConditionCheck {
        condition,
        applicable,
        passed: dev.is_finite() && dev <= tol,
        max_deviation: dev,
    };
    let checks = vec![
        ConditionCheck {
            condition: conditions::FINITE,
            applicable: true,
            passed: finite,
            max_deviation: 0.0,
        },
        mk(conditions::REALITY, true, reality),
        mk(conditions::THETA_ONLY, true, theta_only),
        mk(conditions::L_ONLY, true, l_only),
        mk(conditions::PRODUCT_FORM, pf, product_form),
        mk(conditions::UNIT_AT_ZERO, pf, unit_at_zero),
        mk(conditions::PRODUCT_REAL, pf, product_real),
    ];
    Ok(ValidationReport {
        kernel: kernel.name().to_string(),
        tolerance: tol,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn quad() -> Quadrature<f64> {
        Quadrature::default()
    }

    #[test]
    fn eval_examples() {
        let w = KernelSpec::<f64>::weyl();
        assert_eq!(eval_kernel(&w, 1.3, 7.0).unwrap(), Complex::new(1.0, 0.0));
        let s = KernelSpec::<f64>::symmetric();
        assert_eq!(eval_kernel(&s, 0.0, 5.0).unwrap(), Complex::new(1.0, 0.0));
        assert!((eval_kernel(&s, PI, 1.0).unwrap() - Complex::new(0.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn eval_rejects_sigma_outside_period() {
        let w = KernelSpec::<f64>::weyl();
        assert!(matches!(eval_kernel(&w, 3.2, 0.0), Err(Error::Domain(_))));
        assert!(matches!(
            eval_kernel(&w, f64::NAN, 0.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn unknown_kernel_name_is_config_error() {
        assert!(matches!(
            KernelSpec::<f64>::by_name("normal"),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn moment_examples() {
        let q = quad();
        let w = KernelSpec::<f64>::weyl();
        assert_eq!(
            kernel_moment(&w, 3, HalfInteger::from_int(0), &q)
                .unwrap()
                .re,
            1.0
        );
        assert_eq!(
            kernel_moment(&w, 3, HalfInteger::from_int(2), &q)
                .unwrap()
                .re,
            0.0
        );
        let half = kernel_moment(&w, 1, HalfInteger::from_twice(1), &q).unwrap();
        assert!((half.re - std::f64::consts::FRAC_2_PI).abs() < 1e-15);
        let s = KernelSpec::<f64>::symmetric();
        assert_eq!(
            kernel_moment(&s, 2, HalfInteger::from_int(1), &q)
                .unwrap()
                .re,
            0.5
        );
    }

    #[test]
    fn moment_examples_by_quadrature() {
        let q = quad();
        let w = KernelSpec::<f64>::weyl();
        let half = kernel_moment_quadrature(&w, 1, HalfInteger::from_twice(1), &q).unwrap();
        assert!((half.re - 2.0 / PI).abs() < 1e-13 && half.im.abs() < 1e-13);
        let s = KernelSpec::<f64>::symmetric();
        let v = kernel_moment_quadrature(&s, 2, HalfInteger::from_int(1), &q).unwrap();
        assert!((v - Complex::new(0.5, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn analytic_and_quadrature_moments_agree() {
        let q = quad();
        for kernel in [KernelSpec::<f64>::weyl(), KernelSpec::symmetric()] {
            for l in -10..=10 {
                for twice in -10..=10 {
                    let m = HalfInteger::from_twice(twice);
                    let a = kernel_moment(&kernel, l, m, &q).unwrap();
                    let b = kernel_moment_quadrature(&kernel, l, m, &q).unwrap();
                    assert!(
                        (a - b).norm() < 1e-10,
                        "{} l={l} m={m}: {a} vs {b}",
                        kernel.name()
                    );
                }
            }
        }
    }

    #[test]
    fn zero_l_moment_is_kronecker_delta() {
        let q = quad();
        for kernel in [KernelSpec::<f64>::weyl(), KernelSpec::symmetric()] {
            for m in -5..=5 {
                let v = kernel_moment(&kernel, 0, HalfInteger::from_int(m), &q).unwrap();
                let expected = if m == 0 { 1.0 } else { 0.0 };
                assert!((v.re - expected).abs() < 1e-12 && v.im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn builtin_kernels_validate() {
        for kernel in [KernelSpec::<f64>::weyl(), KernelSpec::symmetric()] {
            let r = validate_kernel(&kernel, ValidationGrid::default(), 1e-12).unwrap();
            assert!(r.all_passed(), "{r:?}");
            for c in &r.checks {
                assert!(c.max_deviation < 1e-12);
            }
        }
        let r =
            validate_kernel(&KernelSpec::<f64>::weyl(), ValidationGrid::default(), 1e-12).unwrap();
        assert!(r.checks.iter().all(|c| c.max_deviation == 0.0));
    }

    #[test]
    fn imaginary_counter_kernel_fails_reality() {
        let k =
            KernelSpec::<f64>::custom("one_plus_i_product", true, |s, l| Complex::new(1.0, s * l));
        let r = validate_kernel(&k, ValidationGrid::default(), 1e-12).unwrap();
        assert!(!r.all_passed());
        assert!(!r.check(conditions::PRODUCT_REAL).unwrap().passed);
        assert!(!r.check(conditions::REALITY).unwrap().passed);
        assert!(r.check(conditions::THETA_ONLY).unwrap().passed);
        assert!(r.check(conditions::L_ONLY).unwrap().passed);
    }

    #[test]
    fn non_product_kernel_skips_product_checks() {
        let k = KernelSpec::<f64>::custom("sigma_shift", false, |s, l| {
            Complex::new((s * (l + 1.0) / 2.0).cos(), 0.0)
        });
        let r = validate_kernel(&k, ValidationGrid::default(), 1e-12).unwrap();
        assert!(!r.check(conditions::PRODUCT_FORM).unwrap().applicable);
        assert!(!r.check(conditions::L_ONLY).unwrap().passed);
    }

    #[test]
    fn half_integer_display() {
        assert_eq!(HalfInteger::from_twice(3).to_string(), "3/2");
        assert_eq!(HalfInteger::midpoint_offset(1, 1, 0).to_string(), "1");
    }
}
