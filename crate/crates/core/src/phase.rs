//! Quantum phase of the oscillator seen through the circle.
//!
//! Number states `|n_>` (`n >= 0`) embed into `L^2(S^1)` as `|n>`; the
//! Naimark projection `Pi` compresses circle operators back onto the
//! non-negative indices. Under this map the phase is `Phi = -Theta`, the
//! Garrison-Wong operator at `Phi_0 = -pi` is the compression of `-Theta`,
//! and the phase POV measure
//!
//! ```text
//! <psi| M_0(X) |psi> = (1/2pi) int_X | sum_n c_n e^{-i n phi} |^2 dphi
//! ```
//!
//! reproduces Pegg-Barnett statistics in the `s -> infinity` limit.

use std::path::Path;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{format_float, write_text, ComplexMatrix, StateVector};
use crate::observable::PhaseFunction;
use crate::quadrature::Quadrature;
use crate::scalar::{integer_phase, Real};

/// Oscillator state `sum_{n=0}^{s} c_n |n_>`.
#[derive(Debug, Clone, PartialEq)]
pub struct NumberStateVector<T> {
    coeffs: Vec<Complex<T>>,
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    s: usize,
    coefficients: Vec<[f64; 2]>,
}

impl<T: Real> NumberStateVector<T> {
    /// Wraps coefficients `c_0..c_s` without normalizing.
    pub fn new(coeffs: Vec<Complex<T>>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Dimension("number state needs at least c_0".into()));
        }
        if coeffs
            .iter()
            .any(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::Domain("state coefficients must be finite".into()));
        }
        Ok(Self { coeffs })
    }

    /// Wraps and normalizes.
    pub fn normalized(coeffs: Vec<Complex<T>>) -> Result<Self> {
        let v = Self::new(coeffs)?;
        let n = v.norm();
        if n == T::zero() {
            return Err(Error::Domain("cannot normalize the zero vector".into()));
        }
        Ok(Self {
            coeffs: v.coeffs.into_iter().map(|z| z / n).collect(),
        })
    }

    /// `|n_>` in the space truncated at `s`.
    pub fn number(n: usize, s: usize) -> Result<Self> {
        if n > s {
            return Err(Error::Range(format!("n = {n} exceeds truncation s = {s}")));
        }
        let mut coeffs = vec![Complex::new(T::zero(), T::zero()); s + 1];
        coeffs[n] = Complex::new(T::one(), T::zero());
        Ok(Self { coeffs })
    }

    /// Truncation `s`: the largest stored index.
    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficients(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn get(&self, n: usize) -> Complex<T> {
        self.coeffs
            .get(n)
            .copied()
            .unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
    }

    pub fn norm(&self) -> T {
        self.coeffs
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt()
    }

    /// Number distribution `|c_n|^2`.
    pub fn number_probabilities(&self) -> Vec<T> {
        self.coeffs.iter().map(|z| z.norm_sqr()).collect()
    }

    /// `(<N>, Delta N)`.
    pub fn number_moments(&self) -> (T, T) {
        let p = self.number_probabilities();
        let mean = p
            .iter()
            .enumerate()
            .map(|(n, &w)| w * T::from_usize(n).unwrap())
            .fold(T::zero(), |a, b| a + b);
        let var = p
            .iter()
            .enumerate()
            .map(|(n, &w)| {
                let d = T::from_usize(n).unwrap() - mean;
                w * d * d
            })
            .fold(T::zero(), |a, b| a + b);
        (mean, var.max(T::zero()).sqrt())
    }

    /// `sum_n (-1)^n c_n`.
    pub fn alternating_sum(&self) -> Complex<T> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, &c)| if n % 2 == 0 { c } else { -c })
            .fold(Complex::new(T::zero(), T::zero()), |a, b| a + b)
    }

    /// `sum_n c_n e^{-i n phi}`, the amplitude behind the POV density.
    pub fn phase_amplitude(&self, phi: T) -> Complex<T> {
        // Horner in z = e^{-i phi}
        let z = Complex::from_polar(T::one(), -phi);
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(T::zero(), T::zero()), |acc, &c| acc * z + c)
    }

    /// `{"s": int, "coefficients": [[re, im], ...]}`.
    pub fn to_json_string(&self) -> String {
        let coeffs: Vec<String> = self
            .coeffs
            .iter()
            .map(|z| {
                format!(
                    "[{}, {}]",
                    format_float(z.re.as_f64()),
                    format_float(z.im.as_f64())
                )
            })
            .collect();
        format!(
            "{{\"s\": {}, \"coefficients\": [{}]}}\n",
            self.truncation(),
            coeffs.join(", ")
        )
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: StateJson = serde_json::from_str(text)?;
        if raw.coefficients.len() != raw.s + 1 {
            return Err(Error::Format(format!(
                "state file declares s = {} but carries {} coefficients",
                raw.s,
                raw.coefficients.len()
            )));
        }
        Self::new(
            raw.coefficients
                .into_iter()
                .map(|[re, im]| Complex::new(T::lit(re), T::lit(im)))
                .collect(),
        )
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        write_text(path, &self.to_json_string())
    }
}

/// `J: sum c_n |n_> -> sum c_n |n>`, as a circle state over `[-s, s]` whose
/// negative-index coefficients are zero.
pub fn embed<T: Real>(psi: &NumberStateVector<T>) -> StateVector<T> {
    let s = psi.truncation() as i64;
    let zero = Complex::new(T::zero(), T::zero());
    let coeffs = (-s..=s)
        .map(|k| if k < 0 { zero } else { psi.get(k as usize) })
        .collect();
    StateVector::new(-s, coeffs).expect("non-empty finite coefficients")
}

/// `Pi A Pi`: the block of `A` on non-negative indices.
pub fn naimark_compress<T: Real>(a: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    if a.lo() > 0 || a.hi() < 0 {
        return Err(Error::Range(format!(
            "operator range [{}, {}] does not contain index 0",
            a.lo(),
            a.hi()
        )));
    }
    a.submatrix(0, a.hi())
}

/// `<j_| Phi_GW |k_>`: `Phi_0 + pi` on the diagonal, `e^{i(j-k)Phi_0} / (i(j-k))` off it.
pub fn gw_phase_element<T: Real>(j: i64, k: i64, phi0: T) -> Complex<T> {
    if j == k {
        return Complex::new(phi0 + T::PI(), T::zero());
    }
    let d = j - k;
    // 1 / (i d) = -i / d
    integer_phase(d, phi0) * Complex::new(T::zero(), -T::one() / T::from_int(d))
}

/// Garrison-Wong phase operator truncated to `[0, s]`.
pub fn gw_phase_matrix<T: Real>(s: usize, phi0: T) -> Result<ComplexMatrix<T>> {
    ComplexMatrix::from_fn(0, s as i64, |j, k| gw_phase_element(j, k, phi0))
}

/// `Phi_m = Phi_0 + 2 m pi / (s + 1)`, `m = 0..=s`.
pub fn pb_phases<T: Real>(s: usize, phi0: T) -> Vec<T> {
    let step = T::lit(2.0) * T::PI() / T::from_usize(s + 1).unwrap();
    (0..=s)
        .map(|m| phi0 + step * T::from_usize(m).unwrap())
        .collect()
}

/// Pegg-Barnett phase state `|Phi_m> = (s+1)^{-1/2} sum_n e^{i n Phi_m} |n_>`.
pub fn pb_phase_state<T: Real>(m: usize, s: usize, phi0: T) -> Result<NumberStateVector<T>> {
    if m > s {
        return Err(Error::Range(format!("phase index m = {m} exceeds s = {s}")));
    }
    let phi = pb_phases(s, phi0)[m];
    let norm = T::from_usize(s + 1).unwrap().sqrt().recip();
    NumberStateVector::new(
        (0..=s)
            .map(|n| Complex::from_polar(norm, T::from_usize(n).unwrap() * phi))
            .collect(),
    )
}

/// `<j_| Phi_PB |k_>` at truncation `s`: `Phi_0 + s pi/(s+1)` on the diagonal and
/// `(2pi/(s+1)) e^{i(j-k)Phi_0} / (e^{2 pi i (j-k)/(s+1)} - 1)` off it.
pub fn pb_phase_element<T: Real>(j: i64, k: i64, s: usize, phi0: T) -> Complex<T> {
    let s1 = T::from_usize(s + 1).unwrap();
    if j == k {
        return Complex::new(phi0 + T::from_usize(s).unwrap() * T::PI() / s1, T::zero());
    }
    let two_pi = T::lit(2.0) * T::PI();
    let d = j - k;
    let denom = Complex::from_polar(T::one(), two_pi * T::from_int(d) / s1)
        - Complex::new(T::one(), T::zero());
    integer_phase(d, phi0) * (two_pi / s1) / denom
}

/// Explicit matrix form of the PB phase operator on `[0, s]`.
pub fn pb_phase_matrix<T: Real>(s: usize, phi0: T) -> Result<ComplexMatrix<T>> {
    ComplexMatrix::from_fn(0, s as i64, |j, k| pb_phase_element(j, k, s, phi0))
}

/// PB phase operator from its spectral decomposition `sum_m Phi_m |Phi_m><Phi_m|`.
pub fn pb_phase_matrix_spectral<T: Real>(s: usize, phi0: T) -> Result<ComplexMatrix<T>> {
    let phases = pb_phases(s, phi0);
    let states: Vec<NumberStateVector<T>> = (0..=s)
        .map(|m| pb_phase_state(m, s, phi0))
        .collect::<Result<_>>()?;
    ComplexMatrix::from_fn(0, s as i64, |j, k| {
        phases
            .iter()
            .zip(&states)
            .map(|(&phi, st)| st.get(j as usize) * st.get(k as usize).conj() * phi)
            .fold(Complex::new(T::zero(), T::zero()), |a, b| a + b)
    })
}

/// `<Phi_m|psi>` for `m = 0..=s`.
pub fn pb_amplitudes<T: Real>(
    psi: &NumberStateVector<T>,
    s: usize,
    phi0: T,
) -> Result<Vec<Complex<T>>> {
    if psi.truncation() > s {
        return Err(Error::Range(format!(
            "state truncation {} exceeds PB space truncation {s}",
            psi.truncation()
        )));
    }
    let norm = T::from_usize(s + 1).unwrap().sqrt().recip();
    Ok(pb_phases(s, phi0)
        .into_par_iter()
        .map(|phi| psi.phase_amplitude(phi) * norm)
        .collect())
}

/// Probability distribution of the PB phase at finite `s`.
pub fn pb_distribution<T: Real>(
    psi: &NumberStateVector<T>,
    s: usize,
    phi0: T,
) -> Result<PhaseDistribution<T>> {
    let probabilities = pb_amplitudes(psi, s, phi0)?
        .into_iter()
        .map(|a| a.norm_sqr())
        .collect();
    Ok(PhaseDistribution::Discrete {
        phi0,
        points: pb_phases(s, phi0),
        probabilities,
    })
}

/// `sum_m g(Phi_m) |<Phi_m|psi>|^2` at truncation `s`: the PB expectation
/// before the `s -> infinity` limit.
pub fn pb_expectation<T: Real>(
    g: &PhaseFunction<T>,
    psi: &NumberStateVector<T>,
    s: usize,
    phi0: T,
) -> Result<Complex<T>> {
    let dist = pb_distribution(psi, s, phi0)?;
    Ok(dist.expectation(|phi| g.evaluate(phi)))
}

/// POV density `(1/2pi) |sum_n c_n e^{-i n phi}|^2`.
pub fn pov_density<T: Real>(psi: &NumberStateVector<T>, phi: T) -> T {
    psi.phase_amplitude(phi).norm_sqr() / (T::lit(2.0) * T::PI())
}

/// POV density sampled at the midpoints of `grid` equal cells of `[Phi_0, Phi_0 + 2pi)`.
pub fn pov_distribution<T: Real>(
    psi: &NumberStateVector<T>,
    grid: usize,
    phi0: T,
) -> Result<PhaseDistribution<T>> {
    if grid == 0 {
        return Err(Error::Config(
            "density grid needs at least one point".into(),
        ));
    }
    let cell = T::lit(2.0) * T::PI() / T::from_usize(grid).unwrap();
    let points: Vec<T> = (0..grid)
        .map(|i| phi0 + cell * (T::from_usize(i).unwrap() + T::lit(0.5)))
        .collect();
    let density = points
        .par_iter()
        .map(|&phi| pov_density(psi, phi))
        .collect();
    Ok(PhaseDistribution::Density {
        phi0,
        cell,
        points,
        density,
    })
}

/// `<psi| M_0([a, b)) |psi>` by the closed double sum
/// `(1/2pi) sum_{j,k} conj(c_j) c_k int_a^b e^{i(j-k)phi} dphi`.
pub fn pov_probability<T: Real>(a: T, b: T, psi: &NumberStateVector<T>) -> Result<T> {
    let pi = T::PI();
    if !(a >= -pi && a < b && b <= pi) {
        return Err(Error::Domain(format!(
            "interval [{a}, {b}) is not inside [-pi, pi) with a < b"
        )));
    }
    let c = psi.coefficients();
    let mut total = Complex::new(T::zero(), T::zero());
    for (j, &cj) in c.iter().enumerate() {
        for (k, &ck) in c.iter().enumerate() {
            let d = j as i64 - k as i64;
            let integral = if d == 0 {
                Complex::new(b - a, T::zero())
            } else {
                let dt = T::from_int(d);
                (Complex::from_polar(T::one(), dt * b) - Complex::from_polar(T::one(), dt * a))
                    / Complex::new(T::zero(), dt)
            };
            total += cj.conj() * ck * integral;
        }
    }
    Ok(total.re / (T::lit(2.0) * pi))
}

/// `(1/2pi) int_{Phi_0}^{Phi_0 + 2pi} g(Phi) e^{i d Phi} dPhi`, the `(j, k)`
/// entry (`d = j - k`) of the circle operator quantizing `g(-Theta)`.
pub fn phase_coefficient<T: Real>(
    g: &PhaseFunction<T>,
    d: i64,
    phi0: T,
    quad: &Quadrature<T>,
) -> Result<Complex<T>> {
    if let Some(profile) = g.profile() {
        if phi0 == -T::PI() {
            return Ok(profile.coefficient(-d));
        }
    }
    let dt = T::from_int(d);
    let two_pi = T::lit(2.0) * T::PI();
    Ok(quad.integrate(phi0, phi0 + two_pi, |phi| {
        g.evaluate(phi) * Complex::from_polar(T::one(), dt * phi)
    })? / two_pi)
}

/// `Pi g_hat Pi` on `[0, s]`.
pub fn compressed_phase_operator<T: Real>(
    g: &PhaseFunction<T>,
    s: usize,
    phi0: T,
    quad: &Quadrature<T>,
) -> Result<ComplexMatrix<T>> {
    let s = s as i64;
    let coeffs: Vec<Complex<T>> = (-s..=s)
        .map(|d| phase_coefficient(g, d, phi0, quad))
        .collect::<Result<_>>()?;
    ComplexMatrix::from_fn(0, s, |j, k| coeffs[(j - k + s) as usize])
}

/// `<g>` in `psi` by quadrature of `g` against the POV density over
/// `[Phi_0, Phi_0 + 2pi)`.
pub fn phase_expectation<T: Real>(
    g: &PhaseFunction<T>,
    psi: &NumberStateVector<T>,
    phi0: T,
    quad: &Quadrature<T>,
) -> Result<Complex<T>> {
    let two_pi = T::lit(2.0) * T::PI();
    quad.integrate(phi0, phi0 + two_pi, |phi| {
        g.evaluate(phi) * pov_density(psi, phi)
    })
}

/// `<g>` in `psi` as `<psi| Pi g_hat Pi |psi>`.
pub fn phase_expectation_matrix<T: Real>(
    g: &PhaseFunction<T>,
    psi: &NumberStateVector<T>,
    phi0: T,
    quad: &Quadrature<T>,
) -> Result<Complex<T>> {
    let s = psi.truncation();
    let op = compressed_phase_operator(g, s, phi0, quad)?;
    let as_state = StateVector::new(0, psi.coefficients().to_vec())?;
    op.expectation(&as_state)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseMethod {
    /// Direct use of the GW operator truncated at `s`.
    GwTruncated,
    /// Pegg-Barnett distribution at finite `s`.
    PbFinite,
    /// POV measure, independent of `s`.
    Pov,
}

impl std::str::FromStr for PhaseMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gw" | "gw-truncated" => Ok(Self::GwTruncated),
            "pb" | "pb-finite" => Ok(Self::PbFinite),
            "pov" => Ok(Self::Pov),
            other => Err(Error::Config(format!(
                "unknown phase method `{other}` (gw, pb, pov)"
            ))),
        }
    }
}

/// Phase variance of the number state `|n_>` under the chosen formalism.
pub fn number_state_phase_variance<T: Real>(
    method: PhaseMethod,
    n: usize,
    s: usize,
    phi0: T,
    quad: &Quadrature<T>,
) -> Result<T> {
    if n > s {
        return Err(Error::Range(format!("n = {n} exceeds truncation s = {s}")));
    }
    match method {
        PhaseMethod::GwTruncated => {
            // column Phi|n_> of the truncated operator
            let column: Vec<Complex<T>> = (0..=s as i64)
                .map(|j| gw_phase_element(j, n as i64, phi0))
                .collect();
            let mean = column[n].re;
            let second = column
                .iter()
                .map(|z| z.norm_sqr())
                .fold(T::zero(), |a, b| a + b);
            Ok(second - mean * mean)
        }
        PhaseMethod::PbFinite => {
            let psi = NumberStateVector::number(n, n)?;
            Ok(pb_distribution(&psi, s, phi0)?.variance())
        }
        PhaseMethod::Pov => {
            let psi = NumberStateVector::number(n, n)?;
            let mean = phase_expectation(&PhaseFunction::phase(), &psi, phi0, quad)?.re;
            let second = phase_expectation(&PhaseFunction::phase_squared(), &psi, phi0, quad)?.re;
            Ok(second - mean * mean)
        }
    }
}

/// `sum_{k=1}^{n} 1/k^2 + sum_{k=1}^{s-n} 1/k^2`: the truncated GW variance of
/// `|n_>` summed as a series over the squared off-diagonal matrix elements.
pub fn gw_variance_series(n: usize, s: usize) -> f64 {
    let tail = |m: usize| {
        (1..=m)
            .rev()
            .map(|k| 1.0 / (k as f64 * k as f64))
            .sum::<f64>()
    };
    tail(n) + tail(s.saturating_sub(n))
}

/// `pi^2/6 + sum_{k=1}^{n} 1/k`, the closed form sometimes quoted for the GW
/// number-state variance. It disagrees with the matrix elements for
/// `n >= 1` (the correct series has `1/k^2`); kept for comparison reports.
pub fn gw_variance_quoted_formula(n: usize) -> f64 {
    std::f64::consts::PI.powi(2) / 6.0 + (1..=n).map(|k| 1.0 / k as f64).sum::<f64>()
}

/// A phase distribution on the window `[Phi_0, Phi_0 + 2pi)`.
#[derive(Debug, Clone, PartialEq)]
pub enum PhaseDistribution<T> {
    Discrete {
        phi0: T,
        points: Vec<T>,
        probabilities: Vec<T>,
    },
    /// Density samples at cell midpoints, each cell of width `cell`.
    Density {
        phi0: T,
        cell: T,
        points: Vec<T>,
        density: Vec<T>,
    },
}

impl<T: Real> PhaseDistribution<T> {
    pub fn reference_phase(&self) -> T {
        match self {
            Self::Discrete { phi0, .. } | Self::Density { phi0, .. } => *phi0,
        }
    }

    pub fn points(&self) -> &[T] {
        match self {
            Self::Discrete { points, .. } | Self::Density { points, .. } => points,
        }
    }

    /// Probability weight carried by each point.
    pub fn weights(&self) -> Vec<T> {
        match self {
            Self::Discrete { probabilities, .. } => probabilities.clone(),
            Self::Density { cell, density, .. } => density.iter().map(|&d| d * *cell).collect(),
        }
    }

    pub fn expectation<F>(&self, f: F) -> Complex<T>
    where
        F: Fn(T) -> Complex<T>,
    {
        self.points()
            .iter()
            .zip(self.weights())
            .map(|(&p, w)| f(p) * w)
            .fold(Complex::new(T::zero(), T::zero()), |a, b| a + b)
    }

    pub fn total_probability(&self) -> T {
        self.weights().into_iter().fold(T::zero(), |a, b| a + b)
    }

    /// Smallest probability or density value.
    pub fn min_value(&self) -> T {
        match self {
            Self::Discrete { probabilities, .. } => {
                probabilities.iter().copied().fold(T::infinity(), T::min)
            }
            Self::Density { density, .. } => density.iter().copied().fold(T::infinity(), T::min),
        }
    }

    pub fn mean(&self) -> T {
        self.expectation(|p| Complex::new(p, T::zero())).re
    }

    pub fn variance(&self) -> T {
        let mean = self.mean();
        self.expectation(|p| {
            let d = p - mean;
            Complex::new(d * d, T::zero())
        })
        .re
    }

    /// CSV `phi,value` where value is a probability (discrete) or a density.
    pub fn to_csv_string(&self) -> String {
        let (header, values): (&str, Vec<T>) = match self {
            Self::Discrete { probabilities, .. } => ("phi,probability", probabilities.clone()),
            Self::Density { density, .. } => ("phi,density", density.clone()),
        };
        let mut out = format!("{header}\n");
        for (&p, v) in self.points().iter().zip(values) {
            out.push_str(&format!(
                "{},{}\n",
                format_float(p.as_f64()),
                format_float(v.as_f64())
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angle::angle_limit_matrix;
    use crate::matrix::angular_momentum_matrix;
    use std::f64::consts::PI;

    type C = Complex<f64>;

    fn c(re: f64, im: f64) -> C {
        Complex::new(re, im)
    }

    fn q() -> Quadrature<f64> {
        Quadrature::default()
    }

    fn plus() -> NumberStateVector<f64> {
        NumberStateVector::normalized(vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap()
    }

    #[test]
    fn embed_examples() {
        let zero = NumberStateVector::<f64>::number(0, 0).unwrap();
        let e = embed(&zero);
        assert_eq!(e.get(0), c(1.0, 0.0));
        let e = embed(&plus());
        assert_eq!((e.lo(), e.hi()), (-1, 1));
        assert_eq!(e.get(-1), c(0.0, 0.0));
        assert_eq!(e.get(1), plus().get(1));
        assert_eq!(e.norm(), plus().norm());
    }

    #[test]
    fn naimark_examples() {
        let n_max = 4;
        let gw = gw_phase_matrix::<f64>(n_max as usize, -PI).unwrap();
        let compressed =
            naimark_compress(&angle_limit_matrix::<f64>(-n_max, n_max).unwrap().neg()).unwrap();
        assert_eq!(compressed, gw);
        let l = angular_momentum_matrix::<f64>(n_max, 1.0).unwrap();
        let number = naimark_compress(&l).unwrap();
        for j in 0..=n_max {
            assert_eq!(number.get(j, j), c(j as f64, 0.0));
        }
        let id = naimark_compress(&ComplexMatrix::<f64>::identity(-2, 2).unwrap()).unwrap();
        assert_eq!(id, ComplexMatrix::identity(0, 2).unwrap());
        assert!(naimark_compress(&ComplexMatrix::<f64>::identity(1, 2).unwrap()).is_err());
    }

    #[test]
    fn gw_examples() {
        assert_eq!(
            gw_phase_matrix::<f64>(0, -PI).unwrap().get(0, 0),
            c(0.0, 0.0)
        );
        let m = gw_phase_matrix::<f64>(1, -PI).unwrap();
        assert_eq!(m.get(1, 0), c(0.0, 1.0));
        assert_eq!(m.get(0, 1), c(0.0, -1.0));
        assert_eq!(m.hermiticity_defect(), 0.0);
        let m = gw_phase_matrix::<f64>(6, 0.37).unwrap();
        assert!(m.hermiticity_defect() < 1e-15);
    }

    #[test]
    fn pb_states_are_orthonormal() {
        let s = 6;
        let states: Vec<_> = (0..=s)
            .map(|m| pb_phase_state::<f64>(m, s, -PI).unwrap())
            .collect();
        for (a, sa) in states.iter().enumerate() {
            for (b, sb) in states.iter().enumerate() {
                let ip: C = sa
                    .coefficients()
                    .iter()
                    .zip(sb.coefficients())
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((ip - c(expected, 0.0)).norm() < 1e-12);
            }
        }
        assert!(matches!(
            pb_phase_state::<f64>(7, 6, -PI),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn pb_matrix_examples() {
        assert_eq!(pb_phases::<f64>(1, -PI), vec![-PI, 0.0]);
        let m = pb_phase_matrix::<f64>(1, -PI).unwrap();
        assert!((m.get(0, 0).re + PI / 2.0).abs() < 1e-15);
        // eigenvalues of a 2x2 Hermitian matrix
        let (a, d, b) = (m.get(0, 0).re, m.get(1, 1).re, m.get(0, 1).norm());
        let mid = (a + d) / 2.0;
        let r = (((a - d) / 2.0).powi(2) + b * b).sqrt();
        assert!((mid - r + PI).abs() < 1e-14 && (mid + r).abs() < 1e-14);
    }

    #[test]
    fn pb_spectral_and_explicit_forms_agree() {
        for s in [1, 2, 5, 9] {
            for phi0 in [-PI, 0.3] {
                let a = pb_phase_matrix::<f64>(s, phi0).unwrap();
                let b = pb_phase_matrix_spectral::<f64>(s, phi0).unwrap();
                assert!(a.max_abs_diff(&b).unwrap() < 1e-12, "s={s} phi0={phi0}");
                assert!(a.hermiticity_defect() < 1e-13);
            }
        }
    }

    #[test]
    fn pov_probability_examples() {
        let n3 = NumberStateVector::<f64>::number(3, 5).unwrap();
        assert!((pov_probability(-1.0, 2.0, &n3).unwrap() - 3.0 / (2.0 * PI)).abs() < 1e-15);
        assert!((pov_probability(-PI, PI, &plus()).unwrap() - 1.0).abs() < 1e-15);
        assert!((pov_probability(0.0, PI, &plus()).unwrap() - 0.5).abs() < 1e-15);
        assert!(
            (pov_probability(-PI / 2.0, PI / 2.0, &plus()).unwrap() - (0.5 + 1.0 / PI)).abs()
                < 1e-15
        );
        assert!(matches!(
            pov_probability(1.0, 0.5, &plus()),
            Err(Error::Domain(_))
        ));
        assert!(pov_probability(-4.0, 0.5, &plus()).is_err());
    }

    #[test]
    fn pov_probability_matches_density_quadrature() {
        let psi =
            NumberStateVector::normalized(vec![c(0.3, 0.1), c(-0.2, 0.7), c(0.5, -0.4)]).unwrap();
        let direct = q()
            .integrate(-0.4, 2.2, |p| c(pov_density(&psi, p), 0.0))
            .unwrap()
            .re;
        assert!((pov_probability(-0.4, 2.2, &psi).unwrap() - direct).abs() < 1e-13);
    }

    #[test]
    fn phase_expectation_examples() {
        let n2 = NumberStateVector::<f64>::number(2, 4).unwrap();
        let one = phase_expectation(&PhaseFunction::unity(), &plus(), -PI, &q()).unwrap();
        assert!((one - c(1.0, 0.0)).norm() < 1e-13);
        let mean = phase_expectation(&PhaseFunction::phase(), &n2, -PI, &q()).unwrap();
        assert!(mean.norm() < 1e-13);
        let sq = phase_expectation(&PhaseFunction::phase_squared(), &n2, -PI, &q()).unwrap();
        assert!((sq.re - PI * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn phase_expectation_paths_agree() {
        let psi = NumberStateVector::normalized(vec![
            c(0.3, 0.1),
            c(-0.2, 0.7),
            c(0.5, -0.4),
            c(0.1, 0.1),
        ])
        .unwrap();
        for g in [
            PhaseFunction::phase(),
            PhaseFunction::phase_squared(),
            PhaseFunction::cos_phase(),
            PhaseFunction::sin_phase(),
        ] {
            for phi0 in [-PI, -1.0] {
                let a = phase_expectation(&g, &psi, phi0, &q()).unwrap();
                let b = phase_expectation_matrix(&g, &psi, phi0, &q()).unwrap();
                assert!(
                    (a - b).norm() < 1e-8,
                    "{} phi0={phi0}: {a} vs {b}",
                    g.name()
                );
            }
        }
    }

    #[test]
    fn phase_mean_is_minus_angle_mean() {
        let psi =
            NumberStateVector::normalized(vec![c(0.3, 0.1), c(-0.2, 0.7), c(0.5, -0.4)]).unwrap();
        let circle = embed(&psi);
        let theta = angle_limit_matrix::<f64>(-2, 2).unwrap();
        let angle_mean = theta.expectation(&circle).unwrap();
        let phase_mean = phase_expectation(&PhaseFunction::phase(), &psi, -PI, &q()).unwrap();
        assert!((phase_mean + angle_mean).norm() < 1e-12);
    }

    #[test]
    fn variance_examples() {
        let v = number_state_phase_variance::<f64>(PhaseMethod::PbFinite, 0, 1, -PI, &q()).unwrap();
        assert!((v - PI * PI / 4.0).abs() < 1e-12);
        let v = number_state_phase_variance::<f64>(PhaseMethod::Pov, 3, 3, -PI, &q()).unwrap();
        assert!((v - PI * PI / 3.0).abs() < 1e-12);
        let v =
            number_state_phase_variance::<f64>(PhaseMethod::GwTruncated, 0, 3, -PI, &q()).unwrap();
        assert!((v - (1.0 + 0.25 + 1.0 / 9.0)).abs() < 1e-15);
        assert!(
            number_state_phase_variance::<f64>(PhaseMethod::GwTruncated, 4, 3, -PI, &q()).is_err()
        );
    }

    #[test]
    fn gw_variance_is_independent_of_reference_phase() {
        let a =
            number_state_phase_variance::<f64>(PhaseMethod::GwTruncated, 2, 40, -PI, &q()).unwrap();
        let b =
            number_state_phase_variance::<f64>(PhaseMethod::GwTruncated, 2, 40, 0.8, &q()).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert!((a - gw_variance_series(2, 40)).abs() < 1e-12);
    }

    #[test]
    fn pb_finite_variance_closed_form() {
        // uniform on s+1 points: pi^2 s (s + 2) / (3 (s + 1)^2)
        for s in [1usize, 2, 7, 30] {
            let v =
                number_state_phase_variance::<f64>(PhaseMethod::PbFinite, 0, s, -PI, &q()).unwrap();
            let sf = s as f64;
            assert!((v - PI * PI * sf * (sf + 2.0) / (3.0 * (sf + 1.0).powi(2))).abs() < 1e-12);
        }
    }

    #[test]
    fn distributions_normalize() {
        let psi =
            NumberStateVector::normalized(vec![c(0.3, 0.1), c(-0.2, 0.7), c(0.5, -0.4)]).unwrap();
        let d = pov_distribution(&psi, 64, -PI).unwrap();
        assert!((d.total_probability() - 1.0).abs() < 1e-13);
        assert!(d.min_value() >= -1e-12);
        let p = pb_distribution(&psi, 17, -PI).unwrap();
        assert!((p.total_probability() - 1.0).abs() < 1e-13);
        assert!(pb_distribution(&psi, 1, -PI).is_err());
    }

    #[test]
    fn state_json_round_trip_and_validation() {
        let psi = NumberStateVector::normalized(vec![c(0.3, 0.1), c(-0.2, 0.7)]).unwrap();
        let back = NumberStateVector::<f64>::from_json_str(&psi.to_json_string()).unwrap();
        assert_eq!(back, psi);
        let bad = NumberStateVector::<f64>::from_json_str("{\"s\": 2, \"coefficients\": [[1, 0]]}");
        assert!(matches!(bad, Err(Error::Format(_))));
    }

    #[test]
    fn phase_method_parsing() {
        assert_eq!(
            "gw".parse::<PhaseMethod>().unwrap(),
            PhaseMethod::GwTruncated
        );
        assert_eq!("pb".parse::<PhaseMethod>().unwrap(), PhaseMethod::PbFinite);
        assert!("xy".parse::<PhaseMethod>().is_err());
    }
}
