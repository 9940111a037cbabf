//! Uncertainty relations on the circle and for the oscillator phase.
//!
//! For a state `Psi(Theta) = sum_k c_k e^{ik Theta} / sqrt(2pi)` with
//! `<Theta> = 0`,
//!
//! ```text
//! Delta Theta * Delta L >= (hbar/2) |1 - 2pi |Psi(pi)|^2|,
//! ```
//!
//! with `Psi(pi) = sum_k (-1)^k c_k / sqrt(2pi)`. The analogous phase-number
//! relation `Delta Phi * Delta N >= (1/2) |1 - |sum_n (-1)^n c_n|^2|` is an
//! open conjecture; it is evaluated and counted here, never enforced.
//!
//! Random batches use ChaCha8 (`rand_chacha`): state `i` of a batch with
//! seed `seed` draws from `ChaCha8Rng::seed_from_u64(seed)` on stream `i`,
//! so results do not depend on thread scheduling.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::angle::angle_limit_element;
use crate::error::{Error, Result};
use crate::matrix::{format_float, StateVector};
use crate::observable::PhaseFunction;
use crate::phase::{pb_distribution, phase_expectation_matrix, NumberStateVector};
use crate::quadrature::Quadrature;
use crate::scalar::{parity_sign, Real};

/// Default `|<Theta>|` threshold below which a state counts as centered.
pub const DEFAULT_CENTERING_TOL: f64 = 1e-8;

/// Relative slack when comparing the two sides of an inequality.
const SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    AngleMomentum,
    PhaseNumber,
}

impl Relation {
    fn label(self) -> &'static str {
        match self {
            Self::AngleMomentum => "angle-momentum",
            Self::PhaseNumber => "phase-number",
        }
    }
}

/// One evaluation of an uncertainty relation.
///
/// For [`Relation::AngleMomentum`] the angle/momentum fields hold `Theta`
/// and `L`, and `boundary_weight` is `|Psi(pi)|^2`. For
/// [`Relation::PhaseNumber`] they hold `Phi` and `N`, and `boundary_weight`
/// is `|sum_n (-1)^n c_n|^2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UncertaintyReport {
    pub relation: Relation,
    pub mean_angle: f64,
    pub delta_angle: f64,
    pub delta_momentum: f64,
    pub boundary_weight: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
    /// The state was not centered, so the relation was not tested.
    pub precondition_violated: bool,
    pub conjecture: bool,
}

impl UncertaintyReport {
    pub fn margin(&self) -> f64 {
        self.lhs - self.rhs
    }

    /// A tested state that fails the inequality.
    pub fn is_violation(&self) -> bool {
        !self.precondition_violated && !self.satisfied
    }

    pub const CSV_HEADER: &'static str =
        "relation,mean_angle,delta_angle,delta_momentum,boundary_weight,lhs,rhs,margin,satisfied,precondition_violated,conjecture";

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.relation.label(),
            format_float(self.mean_angle),
            format_float(self.delta_angle),
            format_float(self.delta_momentum),
            format_float(self.boundary_weight),
            format_float(self.lhs),
            format_float(self.rhs),
            format_float(self.margin()),
            self.satisfied,
            self.precondition_violated,
            self.conjecture
        )
    }
}

pub fn reports_to_csv(reports: &[UncertaintyReport]) -> String {
    let mut out = format!("{}\n", UncertaintyReport::CSV_HEADER);
    for r in reports {
        out.push_str(&r.to_csv_row());
        out.push('\n');
    }
    out
}

/// `(<Theta>, Delta Theta, Delta L)` for a circle state supported in `[-N, N]`.
///
/// `Theta^2` uses its own Fourier entries (`pi^2/3` on the diagonal,
/// `2(-1)^d/d^2` off it), so no truncation bias enters `<Theta^2>`.
pub fn circle_dispersions<T: Real>(psi: &StateVector<T>, n_max: i64, hbar: T) -> Result<(T, T, T)> {
    if psi.lo() < -n_max || psi.hi() > n_max {
        return Err(Error::Dimension(format!(
            "state range [{}, {}] exceeds [-{n_max}, {n_max}]",
            psi.lo(),
            psi.hi()
        )));
    }
    let c = psi.coefficients();
    let norm2 = c.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b);
    let mut mean = T::zero();
    let mut second = norm2 * T::PI() * T::PI() / T::lit(3.0);
    for (a, &ca) in c.iter().enumerate() {
        for (b, &cb) in c.iter().enumerate().skip(a + 1) {
            let d = a as i64 - b as i64;
            let pair = ca.conj() * cb;
            // both (a, b) and (b, a) terms: 2 Re(conj(c_a) c_b X_ab)
            mean += T::lit(2.0) * (pair * angle_limit_element::<T>(d, 0)).re;
            let dt = T::from_int(d);
            second += T::lit(4.0) * parity_sign::<T>(d) * pair.re / (dt * dt);
        }
    }
    let mean = mean / norm2;
    let second = second / norm2;
    let delta_theta = (second - mean * mean).max(T::zero()).sqrt();

    let mut l1 = T::zero();
    let mut l2 = T::zero();
    for (k, z) in psi.iter() {
        let l = hbar * T::from_int(k);
        l1 += z.norm_sqr() * l;
        l2 += z.norm_sqr() * l * l;
    }
    let l1 = l1 / norm2;
    let l2 = l2 / norm2;
    let delta_l = (l2 - l1 * l1).max(T::zero()).sqrt();
    Ok((mean, delta_theta, delta_l))
}

/// `Psi(pi) = sum_k (-1)^k c_k / sqrt(2pi)`.
pub fn boundary_amplitude<T: Real>(psi: &StateVector<T>) -> Complex<T> {
    let sum = psi
        .iter()
        .map(|(k, z)| z * parity_sign::<T>(k))
        .fold(Complex::new(T::zero(), T::zero()), |a, b| a + b);
    sum / (T::lit(2.0) * T::PI()).sqrt()
}

fn satisfied(lhs: f64, rhs: f64) -> bool {
    lhs >= rhs - SLACK * rhs.abs().max(1.0)
}

/// Tests the angle-momentum relation; states with `|<Theta>| > centering_tol`
/// come back flagged `precondition_violated` instead of being tested.
pub fn check_theta_l_uncertainty<T: Real>(
    psi: &StateVector<T>,
    n_max: i64,
    hbar: T,
    centering_tol: T,
) -> Result<UncertaintyReport> {
    let (mean, dt, dl) = circle_dispersions(psi, n_max, hbar)?;
    let weight = boundary_amplitude(psi).norm_sqr().as_f64();
    let lhs = (dt * dl).as_f64();
    let rhs = 0.5 * hbar.as_f64() * (1.0 - 2.0 * std::f64::consts::PI * weight).abs();
    let precondition_violated = mean.abs() > centering_tol;
    Ok(UncertaintyReport {
        relation: Relation::AngleMomentum,
        mean_angle: mean.as_f64(),
        delta_angle: dt.as_f64(),
        delta_momentum: dl.as_f64(),
        boundary_weight: weight,
        lhs,
        rhs,
        satisfied: !precondition_violated && satisfied(lhs, rhs),
        precondition_violated,
        conjecture: false,
    })
}

/// Where `Delta Phi` comes from in the phase-number experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseSource {
    /// The POV measure on `[-pi, pi)`.
    Pov,
    /// The Pegg-Barnett distribution at truncation `s`.
    PbFinite(usize),
}

/// Evaluates the conjectured phase-number relation for `psi`. The report is
/// flagged `conjecture: true`; `satisfied` records the outcome only.
pub fn conjecture_phase_number_experiment<T: Real>(
    psi: &NumberStateVector<T>,
    source: PhaseSource,
    quad: &Quadrature<T>,
) -> Result<UncertaintyReport> {
    let phi0 = -T::PI();
    let (mean, delta_phi) = match source {
        PhaseSource::Pov => {
            let norm2 = psi.norm() * psi.norm();
            let m = phase_expectation_matrix(&PhaseFunction::phase(), psi, phi0, quad)?.re / norm2;
            let m2 = phase_expectation_matrix(&PhaseFunction::phase_squared(), psi, phi0, quad)?.re
                / norm2;
            (m, (m2 - m * m).max(T::zero()).sqrt())
        }
        PhaseSource::PbFinite(s) => {
            let dist = pb_distribution(psi, s, phi0)?;
            (dist.mean(), dist.variance().max(T::zero()).sqrt())
        }
    };
    let (_, delta_n) = psi.number_moments();
    let weight = psi.alternating_sum().norm_sqr().as_f64();
    let lhs = (delta_phi * delta_n).as_f64();
    let rhs = 0.5 * (1.0 - weight).abs();
    Ok(UncertaintyReport {
        relation: Relation::PhaseNumber,
        mean_angle: mean.as_f64(),
        delta_angle: delta_phi.as_f64(),
        delta_momentum: delta_n.as_f64(),
        boundary_weight: weight,
        lhs,
        rhs,
        satisfied: satisfied(lhs, rhs),
        precondition_violated: false,
        conjecture: true,
    })
}

/// RNG for state `index` of a batch seeded with `seed`.
pub fn state_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn gaussian_complex<R: Rng>(rng: &mut R) -> Complex<f64> {
    Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Random unit circle state over `[-N, N]`: complex Gaussian coefficients on
/// a random window of at most 13 consecutive indices, or (one draw in four)
/// a reflection-symmetric state `c_{-k} = c_k` on `[-h, h]`.
pub fn random_circle_state<R: Rng>(rng: &mut R, n_max: i64) -> StateVector<f64> {
    let n_max = n_max.max(0);
    let half = rng.random_range(0..=n_max.min(6));
    let mut coeffs = vec![Complex::new(0.0, 0.0); (2 * n_max + 1) as usize];
    if rng.random_range(0..4) == 0 {
        for k in 0..=half {
            let z = gaussian_complex(rng);
            coeffs[(n_max + k) as usize] = z;
            coeffs[(n_max - k) as usize] = z;
        }
    } else {
        let centre = rng.random_range(-n_max..=n_max);
        for k in (centre - half).max(-n_max)..=(centre + half).min(n_max) {
            coeffs[(n_max + k) as usize] = gaussian_complex(rng);
        }
    }
    StateVector::new(-n_max, coeffs)
        .and_then(|v| v.normalized())
        .expect("Gaussian draw is nonzero with probability one")
}

/// Rotates `psi` (`c_k -> c_k e^{-ik alpha}`, i.e. `Psi(Theta) -> Psi(Theta - alpha)`)
/// so that `<Theta> = 0`, or returns `None` if no rotation reaches
/// `|<Theta>| <= tol`.
///
/// `<Theta>` as a function of `alpha` is continuous and averages to zero over
/// a full turn, so it changes sign unless it only touches zero; a sign
/// change on a 64-point scan is refined by bisection.
pub fn center_state(psi: &StateVector<f64>, n_max: i64, tol: f64) -> Option<StateVector<f64>> {
    let rotate = |alpha: f64| {
        let coeffs = psi
            .iter()
            .map(|(k, z)| z * Complex::from_polar(1.0, -(k as f64) * alpha))
            .collect();
        StateVector::new(psi.lo(), coeffs).expect("same shape")
    };
    let mean = |alpha: f64| {
        circle_dispersions(&rotate(alpha), n_max, 1.0)
            .map(|d| d.0)
            .unwrap_or(f64::NAN)
    };
    let accept = |alpha: f64| {
        let m = mean(alpha);
        (m.abs() <= tol).then(|| rotate(alpha))
    };
    if let Some(v) = accept(0.0) {
        return Some(v);
    }
    const SCAN: usize = 64;
    let step = 2.0 * std::f64::consts::PI / SCAN as f64;
    let values: Vec<f64> = (0..=SCAN).map(|i| mean(i as f64 * step)).collect();
    let bracket = (0..SCAN).find(|&i| values[i].signum() != values[i + 1].signum());
    let Some(i) = bracket else {
        let best = (0..SCAN).min_by(|&a, &b| values[a].abs().total_cmp(&values[b].abs()))?;
        return accept(best as f64 * step);
    };
    let (mut a, mut b) = (i as f64 * step, (i + 1) as f64 * step);
    let mut fa = values[i];
    for _ in 0..80 {
        let mid = 0.5 * (a + b);
        let fm = mean(mid);
        if fm == 0.0 || fm.abs() <= tol * 1e-3 {
            return accept(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    accept(0.5 * (a + b))
}

/// Draws random circle states until one can be centered to `tol`, giving up
/// after `max_attempts`. Returns the state and the number of rejected draws.
pub fn random_centered_circle_state<R: Rng>(
    rng: &mut R,
    n_max: i64,
    tol: f64,
    max_attempts: usize,
) -> Option<(StateVector<f64>, usize)> {
    (0..max_attempts).find_map(|attempt| {
        let raw = random_circle_state(rng, n_max);
        center_state(&raw, n_max, tol).map(|v| (v, attempt))
    })
}

/// Random unit oscillator state with truncation drawn from `1..=s_max`.
pub fn random_number_state<R: Rng>(rng: &mut R, s_max: usize) -> NumberStateVector<f64> {
    let s = rng.random_range(1..=s_max.max(1));
    let coeffs = (0..=s).map(|_| gaussian_complex(rng)).collect();
    NumberStateVector::normalized(coeffs).expect("Gaussian draw is nonzero with probability one")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchSummary {
    pub seed: u64,
    pub tested: usize,
    /// Random draws discarded because they could not be centered.
    pub rejected_draws: usize,
    pub violations: usize,
    pub min_margin: f64,
}

impl BatchSummary {
    fn from_reports(seed: u64, reports: &[UncertaintyReport], rejected_draws: usize) -> Self {
        Self {
            seed,
            tested: reports.iter().filter(|r| !r.precondition_violated).count(),
            rejected_draws,
            violations: reports.iter().filter(|r| r.is_violation()).count(),
            min_margin: reports
                .iter()
                .map(UncertaintyReport::margin)
                .fold(f64::INFINITY, f64::min),
        }
    }
}

const MAX_CENTERING_ATTEMPTS: usize = 64;

/// `count` centered random circle states on `[-N, N]`, each tested against
/// the angle-momentum relation.
pub fn theta_l_batch(
    count: usize,
    seed: u64,
    n_max: i64,
    hbar: f64,
    centering_tol: f64,
) -> Result<(Vec<UncertaintyReport>, BatchSummary)> {
    let results: Vec<(UncertaintyReport, usize)> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = state_rng(seed, i as u64);
            let (psi, rejected) = random_centered_circle_state(
                &mut rng,
                n_max,
                centering_tol,
                MAX_CENTERING_ATTEMPTS,
            )
            .ok_or_else(|| {
                Error::Config(format!(
                    "state {i}: no centered draw in {MAX_CENTERING_ATTEMPTS} attempts"
                ))
            })?;
            Ok((
                check_theta_l_uncertainty(&psi, n_max, hbar, centering_tol)?,
                rejected,
            ))
        })
        .collect::<Result<_>>()?;
    let rejected = results.iter().map(|r| r.1).sum();
    let reports: Vec<_> = results.into_iter().map(|r| r.0).collect();
    let summary = BatchSummary::from_reports(seed, &reports, rejected);
    Ok((reports, summary))
}

/// `count` random oscillator states (truncation up to `s_max`) run through
/// the phase-number experiment.
pub fn conjecture_batch(
    count: usize,
    seed: u64,
    s_max: usize,
    source: PhaseSource,
    quad: &Quadrature<f64>,
) -> Result<(Vec<UncertaintyReport>, BatchSummary)> {
    let reports: Vec<UncertaintyReport> = (0..count)
        .into_par_iter()
        .map(|i| {
            let psi = random_number_state(&mut state_rng(seed, i as u64), s_max);
            conjecture_phase_number_experiment(&psi, source, quad)
        })
        .collect::<Result<_>>()?;
    let summary = BatchSummary::from_reports(seed, &reports, 0);
    Ok((reports, summary))
}
