//! Dense complex matrices and state vectors over explicit integer index
//! ranges `[lo, hi]`.
//!
//! Indices are always the physical basis labels (`-N..=N` for circle
//! operators, `0..=s` for number-basis operators). Offsets into storage are
//! computed in exactly one place, [`ComplexMatrix::offset`].

use std::io::Write;
use std::path::Path;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<T> {
    lo: i64,
    hi: i64,
    entries: Vec<Complex<T>>,
}

fn check_range(lo: i64, hi: i64) -> Result<usize> {
    if lo > hi {
        return Err(Error::Dimension(format!("empty index range [{lo}, {hi}]")));
    }
    Ok((hi - lo + 1) as usize)
}

impl<T: Real> ComplexMatrix<T> {
    pub fn zeros(lo: i64, hi: i64) -> Result<Self> {
        let dim = check_range(lo, hi)?;
        Ok(Self {
            lo,
            hi,
            entries: vec![Complex::new(T::zero(), T::zero()); dim * dim],
        })
    }

    pub fn identity(lo: i64, hi: i64) -> Result<Self> {
        let mut m = Self::zeros(lo, hi)?;
        for j in lo..=hi {
            m.set(j, j, Complex::new(T::one(), T::zero()));
        }
        Ok(m)
    }

    /// Row-major entries over `[lo, hi]^2`.
    pub fn from_entries(lo: i64, hi: i64, entries: Vec<Complex<T>>) -> Result<Self> {
        let dim = check_range(lo, hi)?;
        if entries.len() != dim * dim {
            return Err(Error::Dimension(format!(
                "{} entries for a {dim}x{dim} matrix",
                entries.len()
            )));
        }
        if entries
            .iter()
            .any(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::Domain("matrix entries must be finite".into()));
        }
        Ok(Self { lo, hi, entries })
    }

    pub fn from_fn<F>(lo: i64, hi: i64, mut f: F) -> Result<Self>
    where
        F: FnMut(i64, i64) -> Complex<T>,
    {
        let dim = check_range(lo, hi)?;
        let mut entries = Vec::with_capacity(dim * dim);
        for j in lo..=hi {
            for k in lo..=hi {
                entries.push(f(j, k));
            }
        }
        Ok(Self { lo, hi, entries })
    }

    /// Like [`from_fn`](Self::from_fn), rows built in parallel. The first
    /// error in row order is returned.
    pub fn try_from_fn_par<F>(lo: i64, hi: i64, f: F) -> Result<Self>
    where
        F: Fn(i64, i64) -> Result<Complex<T>> + Sync,
    {
        let dim = check_range(lo, hi)?;
        let rows: Vec<Result<Vec<Complex<T>>>> = (lo..=hi)
            .into_par_iter()
            .map(|j| (lo..=hi).map(|k| f(j, k)).collect())
            .collect();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            entries.extend(row?);
        }
        Ok(Self { lo, hi, entries })
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn dim(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn contains(&self, j: i64) -> bool {
        (self.lo..=self.hi).contains(&j)
    }

    #[inline]
    fn offset(&self, j: i64, k: i64) -> usize {
        debug_assert!(
            self.contains(j) && self.contains(k),
            "({j},{k}) outside [{}, {}]",
            self.lo,
            self.hi
        );
        (j - self.lo) as usize * self.dim() + (k - self.lo) as usize
    }

    /// Entry `<j|A|k>`. Panics outside the index range.
    #[inline]
    pub fn get(&self, j: i64, k: i64) -> Complex<T> {
        assert!(
            self.contains(j) && self.contains(k),
            "({j},{k}) outside [{}, {}]",
            self.lo,
            self.hi
        );
        self.entries[self.offset(j, k)]
    }

    pub fn try_get(&self, j: i64, k: i64) -> Option<Complex<T>> {
        (self.contains(j) && self.contains(k)).then(|| self.entries[self.offset(j, k)])
    }

    #[inline]
    pub fn set(&mut self, j: i64, k: i64, v: Complex<T>) {
        assert!(
            self.contains(j) && self.contains(k),
            "({j},{k}) outside [{}, {}]",
            self.lo,
            self.hi
        );
        let o = self.offset(j, k);
        self.entries[o] = v;
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.entries
    }

    pub fn row(&self, j: i64) -> &[Complex<T>] {
        let start = self.offset(j, self.lo);
        &self.entries[start..start + self.dim()]
    }

    fn same_range(&self, other: &Self) -> Result<()> {
        if self.lo != other.lo || self.hi != other.hi {
            return Err(Error::Dimension(format!(
                "index ranges [{}, {}] and [{}, {}] differ",
                self.lo, self.hi, other.lo, other.hi
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_range(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            lo: self.lo,
            hi: self.hi,
            entries,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_range(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            lo: self.lo,
            hi: self.hi,
            entries,
        })
    }

    pub fn scale(&self, factor: Complex<T>) -> Self {
        Self {
            lo: self.lo,
            hi: self.hi,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            lo: self.lo,
            hi: self.hi,
            entries: self.entries.iter().map(|z| -z).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        let mut out = self.clone();
        for j in self.lo..=self.hi {
            for k in self.lo..=self.hi {
                out.set(j, k, self.get(k, j).conj());
            }
        }
        out
    }

    /// Matrix product over a shared index range.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_range(other)?;
        let dim = self.dim();
        let rows: Vec<Vec<Complex<T>>> = self
            .entries
            .par_chunks(dim)
            .map(|row| {
                let mut out = vec![Complex::new(T::zero(), T::zero()); dim];
                for (p, &a) in row.iter().enumerate() {
                    if a.re == T::zero() && a.im == T::zero() {
                        continue;
                    }
                    let brow = &other.entries[p * dim..(p + 1) * dim];
                    for (o, &b) in out.iter_mut().zip(brow) {
                        *o += a * b;
                    }
                }
                out
            })
            .collect();
        Ok(Self {
            lo: self.lo,
            hi: self.hi,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Block `[lo, hi]^2` of this matrix.
    pub fn submatrix(&self, lo: i64, hi: i64) -> Result<Self> {
        check_range(lo, hi)?;
        if lo < self.lo || hi > self.hi {
            return Err(Error::Range(format!(
                "[{lo}, {hi}] not inside [{}, {}]",
                self.lo, self.hi
            )));
        }
        Self::from_fn(lo, hi, |j, k| self.get(j, k))
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.same_range(other)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max))
    }

    pub fn max_abs(&self) -> T {
        self.entries
            .iter()
            .map(|z| z.norm())
            .fold(T::zero(), T::max)
    }

    /// `max_{j,k} |A[j,k] - conj(A[k,j])|`.
    pub fn hermiticity_defect(&self) -> T {
        let mut worst = T::zero();
        for j in self.lo..=self.hi {
            for k in j..=self.hi {
                worst = worst.max((self.get(j, k) - self.get(k, j).conj()).norm());
            }
        }
        worst
    }

    pub fn trace(&self) -> Complex<T> {
        (self.lo..=self.hi)
            .map(|j| self.get(j, j))
            .fold(Complex::new(T::zero(), T::zero()), |a, b| a + b)
    }

    fn check_state(&self, psi: &StateVector<T>) -> Result<()> {
        if psi.lo < self.lo || psi.hi > self.hi {
            return Err(Error::Dimension(format!(
                "state range [{}, {}] not inside operator range [{}, {}]",
                psi.lo, psi.hi, self.lo, self.hi
            )));
        }
        Ok(())
    }

    /// `A |psi>` as a vector over the operator's full range.
    pub fn apply(&self, psi: &StateVector<T>) -> Result<StateVector<T>> {
        self.check_state(psi)?;
        let coeffs = (self.lo..=self.hi)
            .into_par_iter()
            .map(|j| {
                (psi.lo..=psi.hi)
                    .map(|k| self.get(j, k) * psi.get(k))
                    .fold(Complex::new(T::zero(), T::zero()), |a, b| a + b)
            })
            .collect();
        Ok(StateVector {
            lo: self.lo,
            hi: self.hi,
            coeffs,
        })
    }

    /// `<psi|A|psi>`.
    pub fn expectation(&self, psi: &StateVector<T>) -> Result<Complex<T>> {
        let a_psi = self.apply(psi)?;
        Ok(psi.inner(&a_psi))
    }

    /// Largest singular value by power iteration on `A^dagger A`.
    pub fn spectral_norm_estimate(&self) -> NormEstimate {
        self.spectral_norm_estimate_with(1e-10, 10_000)
    }

    pub fn spectral_norm_estimate_with(&self, rel_tol: f64, max_iter: usize) -> NormEstimate {
        let dim = self.dim();
        // fixed, non-symmetric seed so no eigenvector is missed by parity
        let mut v: Vec<Complex<T>> = (0..dim)
            .map(|i| {
                let x = T::from_usize(i).unwrap();
                Complex::new(
                    T::one() + T::lit(0.37) * (x * T::lit(0.71)).sin(),
                    T::lit(0.5) * (x * T::lit(1.3)).cos(),
                )
            })
            .collect();
        normalize_in_place(&mut v);
        let adjoint = self.adjoint();
        let mut estimate = T::zero();
        for iter in 1..=max_iter {
            let w = matvec(&adjoint.entries, &matvec(&self.entries, &v, dim), dim);
            // Rayleigh quotient <v, A^dag A v> with |v| = 1
            let rq = v
                .iter()
                .zip(&w)
                .map(|(a, b)| (a.conj() * b).re)
                .fold(T::zero(), |x, y| x + y);
            let next = rq.max(T::zero()).sqrt();
            let norm_w = w
                .iter()
                .map(|z| z.norm_sqr())
                .fold(T::zero(), |x, y| x + y)
                .sqrt();
            if norm_w == T::zero() {
                return NormEstimate {
                    value: 0.0,
                    iterations: iter,
                    converged: true,
                };
            }
            v = w.into_iter().map(|z| z / norm_w).collect();
            let change = (next - estimate).abs().as_f64();
            estimate = next;
            if iter > 1 && change <= rel_tol * estimate.as_f64().max(f64::MIN_POSITIVE) {
                return NormEstimate {
                    value: estimate.as_f64(),
                    iterations: iter,
                    converged: true,
                };
            }
        }
        NormEstimate {
            value: estimate.as_f64(),
            iterations: max_iter,
            converged: false,
        }
    }
}

fn matvec<T: Real>(entries: &[Complex<T>], v: &[Complex<T>], dim: usize) -> Vec<Complex<T>> {
    entries
        .par_chunks(dim)
        .map(|row| {
            row.iter()
                .zip(v)
                .map(|(a, b)| a * b)
                .fold(Complex::new(T::zero(), T::zero()), |x, y| x + y)
        })
        .collect()
}

fn normalize_in_place<T: Real>(v: &mut [Complex<T>]) {
    let n = v
        .iter()
        .map(|z| z.norm_sqr())
        .fold(T::zero(), |a, b| a + b)
        .sqrt();
    if n > T::zero() {
        for z in v {
            *z /= n;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormEstimate {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// `L = diag(k hbar)` on `[-N, N]`.
pub fn angular_momentum_matrix<T: Real>(n_max: i64, hbar: T) -> Result<ComplexMatrix<T>> {
    let mut m = ComplexMatrix::zeros(-n_max, n_max)?;
    for k in -n_max..=n_max {
        m.set(k, k, Complex::new(T::from_int(k) * hbar, T::zero()));
    }
    Ok(m)
}

/// Truncation of `exp(i n Theta)`: `|k> -> |k + n>` when both indices lie
/// in `[-N, N]`; other columns are zero.
pub fn shift_matrix<T: Real>(n: i64, n_max: i64) -> Result<ComplexMatrix<T>> {
    if n.abs() > 2 * n_max {
        return Err(Error::Range(format!(
            "|n| = {} exceeds 2N = {}",
            n.abs(),
            2 * n_max
        )));
    }
    let mut m = ComplexMatrix::zeros(-n_max, n_max)?;
    for k in -n_max..=n_max {
        if (-n_max..=n_max).contains(&(k + n)) {
            m.set(k + n, k, Complex::new(T::one(), T::zero()));
        }
    }
    Ok(m)
}

/// Complex coefficients `c_k` over an index range.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    lo: i64,
    hi: i64,
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    pub fn new(lo: i64, coeffs: Vec<Complex<T>>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Dimension(
                "state needs at least one coefficient".into(),
            ));
        }
        if coeffs
            .iter()
            .any(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::Domain("state coefficients must be finite".into()));
        }
        let hi = lo + coeffs.len() as i64 - 1;
        Ok(Self { lo, hi, coeffs })
    }

    /// Basis vector `|k>` padded to `[lo, hi]`.
    pub fn basis(k: i64, lo: i64, hi: i64) -> Result<Self> {
        let dim = check_range(lo, hi)?;
        if !(lo..=hi).contains(&k) {
            return Err(Error::Range(format!(
                "basis index {k} outside [{lo}, {hi}]"
            )));
        }
        let mut coeffs = vec![Complex::new(T::zero(), T::zero()); dim];
        coeffs[(k - lo) as usize] = Complex::new(T::one(), T::zero());
        Ok(Self { lo, hi, coeffs })
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn coefficients(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    /// `c_k`, zero outside the stored range.
    pub fn get(&self, k: i64) -> Complex<T> {
        if (self.lo..=self.hi).contains(&k) {
            self.coeffs[(k - self.lo) as usize]
        } else {
            Complex::new(T::zero(), T::zero())
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex<T>)> + '_ {
        (self.lo..=self.hi).zip(self.coeffs.iter().copied())
    }

    pub fn norm(&self) -> T {
        self.coeffs
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == T::zero() {
            return Err(Error::Domain("cannot normalize the zero vector".into()));
        }
        Ok(Self {
            lo: self.lo,
            hi: self.hi,
            coeffs: self.coeffs.iter().map(|z| z / n).collect(),
        })
    }

    /// `<self|other>`, conjugate-linear in `self`, over the overlap of ranges.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo..=hi)
            .map(|k| self.get(k).conj() * other.get(k))
            .fold(Complex::new(T::zero(), T::zero()), |a, b| a + b)
    }

    /// Same coefficients over a wider range.
    pub fn padded(&self, lo: i64, hi: i64) -> Result<Self> {
        if lo > self.lo || hi < self.hi {
            return Err(Error::Range(format!(
                "[{lo}, {hi}] does not contain [{}, {}]",
                self.lo, self.hi
            )));
        }
        Ok(Self {
            lo,
            hi,
            coeffs: (lo..=hi).map(|k| self.get(k)).collect(),
        })
    }
}

/// Fixed 17-significant-digit float formatting used by every export.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Deserialize)]
struct MatrixJson {
    lo: i64,
    hi: i64,
    entries: Vec<[f64; 2]>,
}

impl<T: Real> ComplexMatrix<T> {
    /// `{"lo": .., "hi": .., "entries": [[re, im], ...]}`, row-major.
    pub fn to_json_string(&self) -> String {
        let mut s = String::with_capacity(32 + self.entries.len() * 52);
        s.push_str(&format!(
            "{{\"lo\": {}, \"hi\": {}, \"entries\": [",
            self.lo, self.hi
        ));
        for (i, z) in self.entries.iter().enumerate() {
            if i > 0 {
                s.push_str(", ");
            }
            s.push('[');
            s.push_str(&format_float(z.re.as_f64()));
            s.push_str(", ");
            s.push_str(&format_float(z.im.as_f64()));
            s.push(']');
        }
        s.push_str("]}\n");
        s
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: MatrixJson = serde_json::from_str(text)?;
        let entries = raw
            .entries
            .into_iter()
            .map(|[re, im]| Complex::new(T::lit(re), T::lit(im)))
            .collect();
        Self::from_entries(raw.lo, raw.hi, entries)
    }

    /// CSV with header `j,k,re,im`, row-major.
    pub fn to_csv_string(&self) -> String {
        let mut s = String::from("j,k,re,im\n");
        for j in self.lo..=self.hi {
            for k in self.lo..=self.hi {
                let z = self.get(j, k);
                s.push_str(&format!(
                    "{j},{k},{},{}\n",
                    format_float(z.re.as_f64()),
                    format_float(z.im.as_f64())
                ));
            }
        }
        s
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        write_text(path, &self.to_json_string())
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        write_text(path, &self.to_csv_string())
    }
}

#[derive(Deserialize)]
struct StateJson {
    lo: i64,
    coefficients: Vec<[f64; 2]>,
}

impl<T: Real> StateVector<T> {
    /// `{"lo": .., "coefficients": [[re, im], ...]}`.
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
            "{{\"lo\": {}, \"coefficients\": [{}]}}\n",
            self.lo,
            coeffs.join(", ")
        )
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: StateJson = serde_json::from_str(text)?;
        Self::new(
            raw.lo,
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

pub(crate) fn write_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(text.as_bytes())?;
    Ok(())
}
