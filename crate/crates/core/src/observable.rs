//! Classical observables `f(Theta, L)` on the cylinder and their angular
//! Fourier coefficients at quantized momenta `L = n hbar`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::quadrature::Quadrature;
use crate::scalar::{parity_sign, Real};

/// Angular factors with closed-form Fourier coefficients on `[-pi, pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngularProfile {
    Unity,
    Angle,
    AngleSquared,
    Cos(i64),
    Sin(i64),
}

impl AngularProfile {
    pub fn evaluate<T: Real>(self, theta: T) -> T {
        match self {
            Self::Unity => T::one(),
            Self::Angle => theta,
            Self::AngleSquared => theta * theta,
            Self::Cos(k) => (T::from_int(k) * theta).cos(),
            Self::Sin(k) => (T::from_int(k) * theta).sin(),
        }
    }

    /// `(1/2pi) * integral_{-pi}^{pi} a(Theta) exp(-i l Theta) dTheta`.
    pub fn coefficient<T: Real>(self, l: i64) -> Complex<T> {
        let zero = T::zero();
        let half = T::lit(0.5);
        match self {
            Self::Unity => Complex::new(if l == 0 { T::one() } else { zero }, zero),
            Self::Angle => {
                if l == 0 {
                    Complex::new(zero, zero)
                } else {
                    Complex::new(zero, parity_sign::<T>(l) / T::from_int(l))
                }
            }
            Self::AngleSquared => {
                if l == 0 {
                    Complex::new(T::PI() * T::PI() / T::lit(3.0), zero)
                } else {
                    let lt = T::from_int(l);
                    Complex::new(T::lit(2.0) * parity_sign::<T>(l) / (lt * lt), zero)
                }
            }
            Self::Cos(k) => {
                let mut v = zero;
                if l == k {
                    v += half;
                }
                if l == -k {
                    v += half;
                }
                Complex::new(v, zero)
            }
            Self::Sin(k) => {
                // sin(k t) = (e^{ikt} - e^{-ikt}) / 2i
                let mut v = zero;
                if l == k {
                    v -= half;
                }
                if l == -k {
                    v += half;
                }
                Complex::new(zero, v)
            }
        }
    }
}

/// `f(Theta, L) = a(s Theta) L^p`, with `s = -1` for phase pullbacks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Separable {
    angular: AngularProfile,
    momentum_power: u32,
    reflected: bool,
}

type ObservableFn<T> = dyn Fn(T, T) -> Complex<T> + Send + Sync;
type PhaseFn<T> = dyn Fn(T) -> Complex<T> + Send + Sync;

/// A function `g(Phi)` of the phase alone.
#[derive(Clone)]
pub struct PhaseFunction<T> {
    name: String,
    is_real: bool,
    profile: Option<AngularProfile>,
    eval: Arc<PhaseFn<T>>,
}

impl<T> fmt::Debug for PhaseFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PhaseFunction")
            .field("name", &self.name)
            .field("profile", &self.profile)
            .finish_non_exhaustive()
    }
}

impl<T: Real> PhaseFunction<T> {
    fn from_profile(name: &str, profile: AngularProfile) -> Self {
        Self {
            name: name.into(),
            is_real: true,
            profile: Some(profile),
            eval: Arc::new(move |p| Complex::new(profile.evaluate(p), T::zero())),
        }
    }

    pub fn unity() -> Self {
        Self::from_profile("unity", AngularProfile::Unity)
    }

    /// The identity `g(Phi) = Phi`.
    pub fn phase() -> Self {
        Self::from_profile("phase", AngularProfile::Angle)
    }

    pub fn phase_squared() -> Self {
        Self::from_profile("phase_squared", AngularProfile::AngleSquared)
    }

    pub fn cos_phase() -> Self {
        Self::from_profile("cos_phase", AngularProfile::Cos(1))
    }

    pub fn sin_phase() -> Self {
        Self::from_profile("sin_phase", AngularProfile::Sin(1))
    }

    pub fn custom<F>(name: impl Into<String>, is_real: bool, f: F) -> Self
    where
        F: Fn(T) -> Complex<T> + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            is_real,
            profile: None,
            eval: Arc::new(f),
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "unity" => Ok(Self::unity()),
            "phase" | "identity" => Ok(Self::phase()),
            "phase_squared" => Ok(Self::phase_squared()),
            "cos_phase" => Ok(Self::cos_phase()),
            "sin_phase" => Ok(Self::sin_phase()),
            other => Err(Error::Config(format!("unknown phase function `{other}`"))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_real(&self) -> bool {
        self.is_real
    }

    pub fn evaluate(&self, phi: T) -> Complex<T> {
        (self.eval)(phi)
    }

    /// Closed-form coefficients exist only on the window `[-pi, pi)`.
    pub(crate) fn profile(&self) -> Option<AngularProfile> {
        self.profile
    }
}

/// A classical observable on `S^1 x R^1`.
#[derive(Clone)]
pub struct ClassicalObservable<T> {
    name: String,
    theta_only: bool,
    l_only: bool,
    is_real: bool,
    separable: Option<Separable>,
    eval: Arc<ObservableFn<T>>,
}

impl<T> fmt::Debug for ClassicalObservable<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClassicalObservable")
            .field("name", &self.name)
            .field("theta_only", &self.theta_only)
            .field("l_only", &self.l_only)
            .field("is_real", &self.is_real)
            .finish_non_exhaustive()
    }
}

/// Optional parameters for [`make_builtin`].
#[derive(Debug, Clone, Default)]
pub struct ObservableParams<T> {
    /// Harmonic for `cos_angle` / `sin_angle` (default 1).
    pub frequency: Option<i64>,
    /// Exponent for `momentum_power` (default 1).
    pub power: Option<u32>,
    /// Phase function pulled back by `phase_pullback` (default identity).
    pub phase: Option<PhaseFunction<T>>,
}

/// Names accepted by [`make_builtin`].
pub const BUILTIN_OBSERVABLES: &[&str] = &[
    "angle",
    "momentum",
    "angle_squared",
    "unity",
    "cos_angle",
    "sin_angle",
    "angle_times_momentum",
    "momentum_power",
    "phase_pullback",
];

impl<T: Real> ClassicalObservable<T> {
    fn separable(
        name: String,
        angular: AngularProfile,
        momentum_power: u32,
        reflected: bool,
    ) -> Self {
        let theta_only = momentum_power == 0;
        let l_only = angular == AngularProfile::Unity;
        let sign = if reflected { -T::one() } else { T::one() };
        Self {
            name,
            theta_only,
            l_only,
            is_real: true,
            separable: Some(Separable {
                angular,
                momentum_power,
                reflected,
            }),
            eval: Arc::new(move |theta: T, l: T| {
                let v = angular.evaluate(sign * theta) * l.powi(momentum_power as i32);
                Complex::new(v, T::zero())
            }),
        }
    }

    pub fn custom<F>(
        name: impl Into<String>,
        theta_only: bool,
        l_only: bool,
        is_real: bool,
        f: F,
    ) -> Self
    where
        F: Fn(T, T) -> Complex<T> + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            theta_only,
            l_only,
            is_real,
            separable: None,
            eval: Arc::new(f),
        }
    }

    pub fn angle() -> Self {
        Self::separable("angle".into(), AngularProfile::Angle, 0, false)
    }

    pub fn momentum() -> Self {
        Self::separable("momentum".into(), AngularProfile::Unity, 1, false)
    }

    pub fn momentum_power(p: u32) -> Self {
        Self::separable(
            format!("momentum_power({p})"),
            AngularProfile::Unity,
            p,
            false,
        )
    }

    pub fn angle_squared() -> Self {
        Self::separable(
            "angle_squared".into(),
            AngularProfile::AngleSquared,
            0,
            false,
        )
    }

    pub fn unity() -> Self {
        Self::separable("unity".into(), AngularProfile::Unity, 0, false)
    }

    pub fn cos_angle(k: i64) -> Self {
        Self::separable(format!("cos_angle({k})"), AngularProfile::Cos(k), 0, false)
    }

    pub fn sin_angle(k: i64) -> Self {
        Self::separable(format!("sin_angle({k})"), AngularProfile::Sin(k), 0, false)
    }

    /// `f = L * Theta`.
    pub fn angle_times_momentum() -> Self {
        Self::separable(
            "angle_times_momentum".into(),
            AngularProfile::Angle,
            1,
            false,
        )
    }

    /// `f(Theta, L) = g(-Theta)`: a phase observable carried to the circle.
    pub fn phase_pullback(g: PhaseFunction<T>) -> Self {
        let name = format!("phase_pullback({})", g.name());
        match g.profile() {
            Some(profile) => {
                let mut f = Self::separable(name, profile, 0, true);
                f.is_real = g.is_real();
                f
            }
            None => Self {
                name,
                theta_only: true,
                l_only: false,
                is_real: g.is_real(),
                separable: None,
                eval: Arc::new(move |theta: T, _| g.evaluate(-theta)),
            },
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn theta_only(&self) -> bool {
        self.theta_only
    }

    pub fn l_only(&self) -> bool {
        self.l_only
    }

    pub fn is_real(&self) -> bool {
        self.is_real
    }

    pub fn has_closed_form(&self) -> bool {
        self.separable.is_some()
    }

    pub fn evaluate(&self, theta: T, l: T) -> Complex<T> {
        (self.eval)(theta, l)
    }
}

/// Builds one of [`BUILTIN_OBSERVABLES`].
pub fn make_builtin<T: Real>(
    name: &str,
    params: &ObservableParams<T>,
) -> Result<ClassicalObservable<T>> {
    let freq = params.frequency.unwrap_or(1);
    Ok(match name {
        "angle" => ClassicalObservable::angle(),
        "momentum" => ClassicalObservable::momentum(),
        "angle_squared" => ClassicalObservable::angle_squared(),
        "unity" => ClassicalObservable::unity(),
        "cos_angle" => ClassicalObservable::cos_angle(freq),
        "sin_angle" => ClassicalObservable::sin_angle(freq),
        "angle_times_momentum" => ClassicalObservable::angle_times_momentum(),
        "momentum_power" => ClassicalObservable::momentum_power(params.power.unwrap_or(1)),
        "phase_pullback" => ClassicalObservable::phase_pullback(
            params.phase.clone().unwrap_or_else(PhaseFunction::phase),
        ),
        other => {
            return Err(Error::Config(format!(
                "unknown observable `{other}` (expected one of {})",
                BUILTIN_OBSERVABLES.join(", ")
            )))
        }
    })
}

/// `(1/2pi) * integral_{-pi}^{pi} f(Theta, n hbar) exp(-i l Theta) dTheta`.
pub fn fourier_coefficient<T: Real>(
    f: &ClassicalObservable<T>,
    l: i64,
    n: i64,
    hbar: T,
    quad: &Quadrature<T>,
) -> Result<Complex<T>> {
    match f.separable {
        Some(s) => {
            let a = s.angular.coefficient::<T>(if s.reflected { -l } else { l });
            Ok(a * (T::from_int(n) * hbar).powi(s.momentum_power as i32))
        }
        None => fourier_coefficient_quadrature(f, l, n, hbar, quad),
    }
}

/// Quadrature path of [`fourier_coefficient`]. Panels end at `+-pi`, so
/// observables with a jump across the period boundary stay smooth per panel.
pub fn fourier_coefficient_quadrature<T: Real>(
    f: &ClassicalObservable<T>,
    l: i64,
    n: i64,
    hbar: T,
    quad: &Quadrature<T>,
) -> Result<Complex<T>> {
    let momentum = T::from_int(n) * hbar;
    let lt = T::from_int(l);
    quad.circle_average(|theta| {
        f.evaluate(theta, momentum) * Complex::from_polar(T::one(), -lt * theta)
    })
}
