//! Restricted Stratonovich-Weyl quantizer on `H_N = span{|k>}_{k=-N}^{N}` and
//! the restricted generalized Weyl application `f -> f_N[K]`.
//!
//! Matrix entries factor into an angular Fourier coefficient of `f` and a
//! kernel moment:
//!
//! ```text
//! <j| f_N[K] |k> = sum_{n=-N}^{N} c_f(j-k, n) * M_K(j-k, (j+k)/2 - n)
//! ```
//!
//! with `c_f(l, n) = (1/2pi) int f(Theta, n hbar) e^{-i l Theta} dTheta` and
//! `M_K(l, m) = (1/2pi) int K(sigma, l) e^{i sigma m} dsigma`. Both factors are
//! tabulated once per build, so a matrix costs `O(N^2)` integrals.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::{kernel_moment, HalfInteger, KernelSpec};
use crate::matrix::ComplexMatrix;
use crate::observable::{fourier_coefficient, ClassicalObservable};
use crate::quadrature::{Quadrature, QuadratureConfig};
use crate::scalar::{parity_sign, Real};

/// Truncation `N`, `hbar` and the quadrature used for non-closed-form integrals.
#[derive(Debug, Clone)]
pub struct QuantizerConfig<T> {
    n_max: i64,
    hbar: T,
    quad: Quadrature<T>,
}

impl<T: Real> QuantizerConfig<T> {
    pub fn new(n_max: i64, hbar: T) -> Result<Self> {
        Self::with_quadrature(n_max, hbar, QuadratureConfig::default())
    }

    pub fn with_quadrature(n_max: i64, hbar: T, quadrature: QuadratureConfig) -> Result<Self> {
        if n_max < 0 {
            return Err(Error::Config(format!(
                "truncation N = {n_max} must be >= 0"
            )));
        }
        if !(hbar.is_finite() && hbar > T::zero()) {
            return Err(Error::Config(format!(
                "hbar = {hbar} must be positive and finite"
            )));
        }
        quadrature.validate()?;
        Ok(Self {
            n_max,
            hbar,
            quad: Quadrature::new(quadrature),
        })
    }

    pub fn n_max(&self) -> i64 {
        self.n_max
    }

    pub fn hbar(&self) -> T {
        self.hbar
    }

    pub fn quadrature(&self) -> &Quadrature<T> {
        &self.quad
    }

    /// Same settings at a different truncation.
    pub fn with_n_max(&self, n_max: i64) -> Result<Self> {
        if n_max < 0 {
            return Err(Error::Config(format!(
                "truncation N = {n_max} must be >= 0"
            )));
        }
        Ok(Self {
            n_max,
            ..self.clone()
        })
    }
}

/// Kernel moments `M_K(l, m)` for `|l| <= 2N`, `|2m| <= 4N`.
pub(crate) struct MomentTable<T> {
    n_max: i64,
    width: usize,
    data: Vec<Complex<T>>,
}

/// `M_K(l, t/2)` for `t` in `[-4N, 4N]`, indexed by `t + 4N`.
fn moment_row<T: Real>(
    kernel: &KernelSpec<T>,
    l: i64,
    n_max: i64,
    quad: &Quadrature<T>,
) -> Result<Vec<Complex<T>>> {
    (-4 * n_max..=4 * n_max)
        .map(|twice| {
            // j + k and j - k share parity; other cells are never read
            if (twice - l).rem_euclid(2) != 0 {
                Ok(Complex::new(T::zero(), T::zero()))
            } else {
                kernel_moment(kernel, l, HalfInteger::from_twice(twice), quad)
            }
        })
        .collect()
}

/// `sum_{n=-N}^{N} M_K(l, s/2 - n)` for every `s` with `|s| <= 2N` and
/// `s = l (mod 2)`, indexed by `s + 2N` (other cells are left zero).
///
/// `moment(t)` supplies `M_K(l, t/2)`; only `t = l (mod 2)` is requested.
/// Running sums over `2m = s - 2n`, which steps by 2.
fn n_sums_with<T, F>(l: i64, n: i64, mut moment: F) -> Result<Vec<Complex<T>>>
where
    T: Real,
    F: FnMut(i64) -> Result<Complex<T>>,
{
    let zero = Complex::new(T::zero(), T::zero());
    let parity = l.rem_euclid(2);
    let start = -4 * n + parity;
    // prefix[i] = sum of M(l, t/2) for t = start, start + 2, ... (i terms)
    let count = ((4 * n - start) / 2 + 1) as usize;
    let mut prefix = Vec::with_capacity(count + 1);
    let mut acc = zero;
    prefix.push(acc);
    for i in 0..count {
        acc += moment(start + 2 * i as i64)?;
        prefix.push(acc);
    }
    let mut out = vec![zero; (4 * n + 1) as usize];
    let mut s = -2 * n + parity;
    while s <= 2 * n {
        // n runs over [-N, N], so 2m runs over [s - 2N, s + 2N]
        let lo = ((s - 2 * n - start) / 2) as usize;
        let hi = ((s + 2 * n - start) / 2) as usize;
        out[(s + 2 * n) as usize] = prefix[hi + 1] - prefix[lo];
        s += 2;
    }
    Ok(out)
}

impl<T: Real> MomentTable<T> {
    pub(crate) fn build(kernel: &KernelSpec<T>, n_max: i64, quad: &Quadrature<T>) -> Result<Self> {
        let width = (8 * n_max + 1) as usize;
        let rows: Vec<Result<Vec<Complex<T>>>> = (-2 * n_max..=2 * n_max)
            .into_par_iter()
            .map(|l| moment_row(kernel, l, n_max, quad))
            .collect();
        let mut data = Vec::with_capacity(width * (4 * n_max + 1) as usize);
        for row in rows {
            data.extend(row?);
        }
        Ok(Self { n_max, width, data })
    }

    #[inline]
    pub(crate) fn get(&self, l: i64, twice_m: i64) -> Complex<T> {
        let row = (l + 2 * self.n_max) as usize;
        let col = (twice_m + 4 * self.n_max) as usize;
        self.data[row * self.width + col]
    }

    /// `sum_{n=-N}^{N} M_K(l, s/2 - n)` for every `s` with `|s| <= 2N`, indexed by `s + 2N`.
    #[cfg(test)]
    pub(crate) fn n_sums(&self, l: i64) -> Vec<Complex<T>> {
        n_sums_with(l, self.n_max, |t| Ok(self.get(l, t))).expect("table lookups are infallible")
    }
}

fn check_theta<T: Real>(theta: T) -> Result<()> {
    let pi = T::PI();
    if !(theta >= -pi && theta < pi) {
        return Err(Error::Domain(format!("Theta = {theta} outside [-pi, pi)")));
    }
    Ok(())
}

/// `U_N(sigma, l) = sum_k exp(i sigma (k + l/2)) |k + l><k|` over admissible `k`.
pub fn restricted_u<T: Real>(sigma: T, l: i64, n_max: i64) -> Result<ComplexMatrix<T>> {
    if n_max < 0 {
        return Err(Error::Config(format!(
            "truncation N = {n_max} must be >= 0"
        )));
    }
    if l.abs() > n_max {
        return Err(Error::Range(format!(
            "|l| = {} exceeds N = {n_max}",
            l.abs()
        )));
    }
    let mut u = ComplexMatrix::zeros(-n_max, n_max)?;
    let half_l = T::from_int(l) / T::lit(2.0);
    for k in -n_max..=n_max {
        if (-n_max..=n_max).contains(&(k + l)) {
            u.set(
                k + l,
                k,
                Complex::from_polar(T::one(), sigma * (T::from_int(k) + half_l)),
            );
        }
    }
    Ok(u)
}

/// The restricted GSW quantizer `Omega_N[K](Theta, n)`.
pub fn restricted_quantizer<T: Real>(
    kernel: &KernelSpec<T>,
    theta: T,
    n: i64,
    config: &QuantizerConfig<T>,
) -> Result<ComplexMatrix<T>> {
    let n_max = config.n_max;
    if n.abs() > n_max {
        return Err(Error::Range(format!(
            "|n| = {} exceeds N = {n_max}",
            n.abs()
        )));
    }
    check_theta(theta)?;
    let moments = MomentTable::build(kernel, n_max, &config.quad)?;
    ComplexMatrix::from_fn(-n_max, n_max, |j, k| {
        let l = j - k;
        Complex::from_polar(T::one(), -T::from_int(l) * theta) * moments.get(l, j + k - 2 * n)
    })
}

/// Fourier coefficients `c_f(l, n)` for `|l| <= 2N`, `|n| <= N`.
struct CoefficientTable<T> {
    n_max: i64,
    data: Vec<Complex<T>>,
}

impl<T: Real> CoefficientTable<T> {
    fn build(f: &ClassicalObservable<T>, config: &QuantizerConfig<T>) -> Result<Self> {
        let n_max = config.n_max;
        let rows: Vec<Result<Vec<Complex<T>>>> = (-2 * n_max..=2 * n_max)
            .into_par_iter()
            .map(|l| {
                if f.theta_only() {
                    let c = fourier_coefficient(f, l, 0, config.hbar, &config.quad)?;
                    Ok(vec![c; (2 * n_max + 1) as usize])
                } else {
                    (-n_max..=n_max)
                        .map(|n| fourier_coefficient(f, l, n, config.hbar, &config.quad))
                        .collect()
                }
            })
            .collect();
        let mut data = Vec::new();
        for row in rows {
            data.extend(row?);
        }
        Ok(Self { n_max, data })
    }

    #[inline]
    fn get(&self, l: i64, n: i64) -> Complex<T> {
        let width = (2 * self.n_max + 1) as usize;
        self.data[(l + 2 * self.n_max) as usize * width + (n + self.n_max) as usize]
    }
}

/// Builds a matrix whose entry is `coefficient(j - k) * sum_n M_K(j - k, (j+k)/2 - n)`,
/// the form taken by `f_N[K]` when `f` depends on `Theta` only.
pub(crate) fn theta_only_apply<T, F>(
    coefficient: F,
    kernel: &KernelSpec<T>,
    config: &QuantizerConfig<T>,
) -> Result<ComplexMatrix<T>>
where
    T: Real,
    F: Fn(i64) -> Result<Complex<T>> + Sync,
{
    let n_max = config.n_max;
    let per_l = (-2 * n_max..=2 * n_max)
        .into_par_iter()
        .map(|l| {
            let c = coefficient(l)?;
            let sums = if c.re == T::zero() && c.im == T::zero() {
                Vec::new()
            } else {
                n_sums_with(l, n_max, |t| {
                    kernel_moment(kernel, l, HalfInteger::from_twice(t), &config.quad)
                })?
            };
            Ok((c, sums))
        })
        .collect::<Result<Vec<_>>>()?;
    ComplexMatrix::from_fn(-n_max, n_max, |j, k| {
        let (c, sums) = &per_l[(j - k + 2 * n_max) as usize];
        if c.re == T::zero() && c.im == T::zero() {
            return Complex::new(T::zero(), T::zero());
        }
        c * sums[(j + k + 2 * n_max) as usize]
    })
}

/// Restricted generalized Weyl application `f_N[K]` through the factorized
/// `n`-sum.
pub fn weyl_apply<T: Real>(
    f: &ClassicalObservable<T>,
    kernel: &KernelSpec<T>,
    config: &QuantizerConfig<T>,
) -> Result<ComplexMatrix<T>> {
    if f.theta_only() {
        return theta_only_apply(
            |l| fourier_coefficient(f, l, 0, config.hbar, &config.quad),
            kernel,
            config,
        );
    }
    let n_max = config.n_max;
    let moments = MomentTable::build(kernel, n_max, &config.quad)?;
    let coeffs = CoefficientTable::build(f, config)?;
    ComplexMatrix::try_from_fn_par(-n_max, n_max, |j, k| {
        let l = j - k;
        let mut acc = Complex::new(T::zero(), T::zero());
        for n in -n_max..=n_max {
            acc += coeffs.get(l, n) * moments.get(l, j + k - 2 * n);
        }
        Ok(acc)
    })
}

/// Closed form for Weyl ordering (`K = 1`).
///
/// Even `j + k`: the Fourier coefficient at the midpoint momentum
/// `(j + k) hbar / 2`. Odd `j + k`:
/// `(2/pi) sum_n (-1)^((j+k-1)/2 - n) / (j + k - 2n) * c_f(j - k, n)`.
pub fn weyl_apply_closed_weyl<T: Real>(
    f: &ClassicalObservable<T>,
    config: &QuantizerConfig<T>,
) -> Result<ComplexMatrix<T>> {
    let n_max = config.n_max;
    let (hbar, quad) = (config.hbar, &config.quad);
    ComplexMatrix::try_from_fn_par(-n_max, n_max, |j, k| {
        let (s, l) = (j + k, j - k);
        if s % 2 == 0 {
            return fourier_coefficient(f, l, s / 2, hbar, quad);
        }
        let mut acc = Complex::new(T::zero(), T::zero());
        for n in -n_max..=n_max {
            let w = parity_sign::<T>((s - 1) / 2 - n) / T::from_int(s - 2 * n);
            acc += fourier_coefficient(f, l, n, hbar, quad)? * w;
        }
        Ok(acc * (T::lit(2.0) / T::PI()))
    })
}

/// Closed form for symmetric ordering (`K = cos(sigma lambda / 2)`):
/// `(c_f(j - k, j) + c_f(j - k, k)) / 2`.
pub fn weyl_apply_closed_symmetric<T: Real>(
    f: &ClassicalObservable<T>,
    config: &QuantizerConfig<T>,
) -> Result<ComplexMatrix<T>> {
    let n_max = config.n_max;
    let (hbar, quad) = (config.hbar, &config.quad);
    ComplexMatrix::try_from_fn_par(-n_max, n_max, |j, k| {
        let l = j - k;
        let a = fourier_coefficient(f, l, j, hbar, quad)?;
        let b = fourier_coefficient(f, l, k, hbar, quad)?;
        Ok((a + b) / T::lit(2.0))
    })
}

/// `max |sum_n (1/2pi) int Omega_N[K](Theta, n) dTheta - 1|`, entrywise.
///
/// The `Theta` integral of `Omega_N` is the application of `f = 1`, so this
/// is the distance of `1_N[K]` from the identity on `H_N`.
pub fn resolution_of_identity_defect<T: Real>(
    kernel: &KernelSpec<T>,
    config: &QuantizerConfig<T>,
) -> Result<T> {
    let n_max = config.n_max;
    let resolved = weyl_apply(&ClassicalObservable::unity(), kernel, config)?;
    resolved.max_abs_diff(&ComplexMatrix::identity(-n_max, n_max)?)
}
