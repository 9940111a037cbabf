//! The angle operator family `Theta_N[K]` and its kernel-independent limit
//! `<j|Theta|k> = i (-1)^(j-k) / (j - k)`.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{kernel_moment, HalfInteger, KernelSpec};
use crate::matrix::{ComplexMatrix, NormEstimate, StateVector};
use crate::observable::AngularProfile;
use crate::quantizer::{theta_only_apply, QuantizerConfig};
use crate::scalar::Real;

/// N-ladder used by convergence reports.
pub const CONVERGENCE_LADDER: [i64; 5] = [2, 8, 32, 128, 512];

/// `i (-1)^(j-k) / (j - k)` off the diagonal, `0` on it.
pub fn angle_limit_element<T: Real>(j: i64, k: i64) -> Complex<T> {
    AngularProfile::Angle.coefficient(j - k)
}

pub fn angle_limit_matrix<T: Real>(lo: i64, hi: i64) -> Result<ComplexMatrix<T>> {
    ComplexMatrix::from_fn(lo, hi, angle_limit_element)
}

/// `sin(sigma (N + 1/2)) / sin(sigma / 2)`, equal to `2N + 1` at `sigma = 0`.
pub fn dirichlet_kernel<T: Real>(sigma: T, n_max: i64) -> T {
    let denom = (sigma / T::lit(2.0)).sin();
    if denom == T::zero() {
        return T::from_int(2 * n_max + 1);
    }
    (sigma * (T::from_int(n_max) + T::lit(0.5))).sin() / denom
}

/// `Theta_N[K]` through the `n`-sum of kernel moments.
pub fn angle_operator<T: Real>(
    kernel: &KernelSpec<T>,
    config: &QuantizerConfig<T>,
) -> Result<ComplexMatrix<T>> {
    theta_only_apply(|l| Ok(angle_limit_element(l, 0)), kernel, config)
}

/// `Theta_N[K]` through the Dirichlet-kernel integral
/// `i (-1)^(j-k)/(j-k) (1/2pi) int K(sigma, j-k) D_N(sigma) e^{i sigma (j+k)/2} dsigma`.
pub fn angle_operator_dirichlet<T: Real>(
    kernel: &KernelSpec<T>,
    config: &QuantizerConfig<T>,
) -> Result<ComplexMatrix<T>> {
    let n_max = config.n_max();
    let quad = config.quadrature();
    ComplexMatrix::try_from_fn_par(-n_max, n_max, |j, k| {
        if j == k {
            return Ok(Complex::new(T::zero(), T::zero()));
        }
        let l = T::from_int(j - k);
        let half_sum = T::from_int(j + k) / T::lit(2.0);
        let integral = quad.circle_average(|s| {
            kernel.evaluate(s, l) * Complex::from_polar(dirichlet_kernel(s, n_max), s * half_sum)
        })?;
        Ok(angle_limit_element::<T>(j, k) * integral)
    })
}

/// A single entry of `Theta_N[K]` in `O(N)` kernel moments.
pub fn angle_operator_entry<T: Real>(
    kernel: &KernelSpec<T>,
    j: i64,
    k: i64,
    config: &QuantizerConfig<T>,
) -> Result<Complex<T>> {
    let n_max = config.n_max();
    if j.abs() > n_max || k.abs() > n_max {
        return Err(Error::Range(format!(
            "({j}, {k}) outside [-{n_max}, {n_max}]"
        )));
    }
    if j == k {
        return Ok(Complex::new(T::zero(), T::zero()));
    }
    let mut sum = Complex::new(T::zero(), T::zero());
    for n in -n_max..=n_max {
        sum += kernel_moment(
            kernel,
            j - k,
            HalfInteger::midpoint_offset(j, k, n),
            config.quadrature(),
        )?;
    }
    Ok(angle_limit_element::<T>(j, k) * sum)
}

/// `|| A |k> ||`.
pub fn column_norm<T: Real>(matrix: &ComplexMatrix<T>, k: i64) -> Result<T> {
    let basis = StateVector::basis(k, matrix.lo(), matrix.hi())?;
    Ok(matrix.apply(&basis)?.norm())
}

#[derive(Debug, Clone, Serialize)]
pub struct AngleOperatorReport<T> {
    pub n_max: i64,
    pub kernel: String,
    #[serde(skip)]
    pub matrix: ComplexMatrix<T>,
    /// Largest entrywise distance from the limit matrix on `[-N, N]`.
    pub max_limit_deviation: f64,
    pub hermiticity_defect: f64,
    /// `|| Theta_N |0> ||`, which tends to `pi / sqrt(3)`.
    pub column_norm_zero: f64,
    /// Truncated operator norm, whose limit is `pi`.
    pub spectral_norm: Option<NormEstimate>,
}

/// Builds `Theta_N[K]` and its diagnostics. The spectral norm is optional:
/// power iteration converges slowly for large `N`.
pub fn angle_operator_report<T: Real>(
    kernel: &KernelSpec<T>,
    config: &QuantizerConfig<T>,
    spectral_norm_iterations: Option<usize>,
) -> Result<AngleOperatorReport<T>> {
    let n_max = config.n_max();
    let matrix = angle_operator(kernel, config)?;
    let limit = angle_limit_matrix(-n_max, n_max)?;
    let spectral_norm =
        spectral_norm_iterations.map(|it| matrix.spectral_norm_estimate_with(1e-10, it));
    Ok(AngleOperatorReport {
        n_max,
        kernel: kernel.name().to_string(),
        max_limit_deviation: matrix.max_abs_diff(&limit)?.as_f64(),
        hermiticity_defect: matrix.hermiticity_defect().as_f64(),
        column_norm_zero: column_norm(&matrix, 0)?.as_f64(),
        spectral_norm,
        matrix,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n_max: i64,
    pub j: i64,
    pub k: i64,
    pub re: f64,
    pub im: f64,
    pub limit_re: f64,
    pub limit_im: f64,
    pub deviation: f64,
}

/// Entries of `Theta_N[K]` along an N-ladder, with their distance from the
/// limit. Entries outside `[-N, N]` at a given rung are skipped.
pub fn angle_convergence<T: Real>(
    kernel: &KernelSpec<T>,
    entries: &[(i64, i64)],
    ladder: &[i64],
    config: &QuantizerConfig<T>,
) -> Result<Vec<ConvergenceRow>> {
    let mut rows = Vec::new();
    for &n_max in ladder {
        let cfg = config.with_n_max(n_max)?;
        for &(j, k) in entries {
            if j.abs() > n_max || k.abs() > n_max {
                continue;
            }
            let v = angle_operator_entry(kernel, j, k, &cfg)?;
            let lim = angle_limit_element::<T>(j, k);
            rows.push(ConvergenceRow {
                n_max,
                j,
                k,
                re: v.re.as_f64(),
                im: v.im.as_f64(),
                limit_re: lim.re.as_f64(),
                limit_im: lim.im.as_f64(),
                deviation: (v - lim).norm().as_f64(),
            });
        }
    }
    Ok(rows)
}

/// `2 sum_{j=1}^{N} 1/j^2`, the squared norm of the zeroth column of the
/// truncated limit matrix.
pub fn column_norm_zero_squared_series(n_max: i64) -> f64 {
    2.0 * (1..=n_max)
        .rev()
        .map(|j| 1.0 / (j as f64 * j as f64))
        .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observable::ClassicalObservable;
    use crate::quantizer::weyl_apply_closed_weyl;
    use std::f64::consts::PI;

    fn cfg(n: i64) -> QuantizerConfig<f64> {
        QuantizerConfig::new(n, 1.0).unwrap()
    }

    #[test]
    fn limit_examples() {
        assert_eq!(angle_limit_element::<f64>(1, 0), Complex::new(0.0, -1.0));
        assert_eq!(angle_limit_element::<f64>(4, 4), Complex::new(0.0, 0.0));
        assert_eq!(angle_limit_element::<f64>(3, 1), Complex::new(0.0, 0.5));
    }

    #[test]
    fn dirichlet_examples() {
        assert_eq!(dirichlet_kernel(0.0f64, 5), 11.0);
        assert!((dirichlet_kernel(PI, 1) + 1.0).abs() < 1e-15);
        let q = crate::quadrature::Quadrature::<f64>::default();
        for n in [0, 1, 4, 9] {
            let avg = q
                .circle_average(|s| Complex::new(dirichlet_kernel(s, n), 0.0))
                .unwrap();
            assert!((avg.re - 1.0).abs() < 1e-12, "N={n}");
        }
    }

    #[test]
    fn dirichlet_matches_exponential_sum() {
        for &s in &[1e-9, 0.3, -1.1, 2.9] {
            let n = 6;
            let direct: f64 = (-n..=n).map(|m| (s * m as f64).cos()).sum();
            assert!((dirichlet_kernel(s, n) - direct).abs() < 1e-11);
        }
    }

    #[test]
    fn symmetric_kernel_is_exactly_the_limit() {
        let m = angle_operator(&KernelSpec::<f64>::symmetric(), &cfg(3)).unwrap();
        assert_eq!(m, angle_limit_matrix(-3, 3).unwrap());
    }

    #[test]
    fn weyl_kernel_entries() {
        let m = angle_operator(&KernelSpec::<f64>::weyl(), &cfg(2)).unwrap();
        assert!((m.get(1, 0).im + 0.976_150_317_630_291_5).abs() < 1e-14);
        assert!(m.get(1, 0).re.abs() < 1e-15);
        assert_eq!(m.get(2, 0), Complex::new(0.0, 0.5));
        for j in -2..=2 {
            assert_eq!(m.get(j, j), Complex::new(0.0, 0.0));
        }
        let closed = weyl_apply_closed_weyl(&ClassicalObservable::angle(), &cfg(2)).unwrap();
        assert!(m.max_abs_diff(&closed).unwrap() < 1e-14);
    }

    #[test]
    fn dirichlet_path_matches_n_sum() {
        for kernel in [KernelSpec::<f64>::weyl(), KernelSpec::symmetric()] {
            for n in [1, 3, 6] {
                let a = angle_operator(&kernel, &cfg(n)).unwrap();
                let b = angle_operator_dirichlet(&kernel, &cfg(n)).unwrap();
                assert!(
                    a.max_abs_diff(&b).unwrap() < 1e-10,
                    "{} N={n}",
                    kernel.name()
                );
            }
        }
    }

    #[test]
    fn single_entries_match_matrix() {
        let kernel = KernelSpec::<f64>::weyl();
        let m = angle_operator(&kernel, &cfg(5)).unwrap();
        for (j, k) in [(1, 0), (3, -2), (-5, 5), (2, 2)] {
            let e = angle_operator_entry(&kernel, j, k, &cfg(5)).unwrap();
            assert!((e - m.get(j, k)).norm() < 1e-14);
        }
        assert!(angle_operator_entry(&kernel, 6, 0, &cfg(5)).is_err());
    }

    #[test]
    fn column_norm_series() {
        let m = angle_operator(&KernelSpec::<f64>::symmetric(), &cfg(20)).unwrap();
        let norm = column_norm(&m, 0).unwrap();
        assert!((norm * norm - column_norm_zero_squared_series(20)).abs() < 1e-13);
    }

    #[test]
    fn report_fields() {
        let r =
            angle_operator_report(&KernelSpec::<f64>::symmetric(), &cfg(4), Some(2000)).unwrap();
        assert_eq!(r.max_limit_deviation, 0.0);
        assert_eq!(r.hermiticity_defect, 0.0);
        let sn = r.spectral_norm.unwrap();
        assert!(sn.value > r.column_norm_zero && sn.value < PI);
    }
}
