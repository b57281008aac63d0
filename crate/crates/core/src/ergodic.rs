//! Statistical quantities: Lyapunov exponents averaged over saddle points of
//! `Fix(fⁿ)`, the proportionality fit of `G⁺` against `G⁻` along a curve and
//! the reversor check `G⁺∘σ = G⁻`.

use nalgebra::{DMatrix, DVector};
use num_complex::{Complex, Complex64};
use serde::Serialize;
use thiserror::Error;

use crate::automorphism::PolyAuto;
use crate::green::{Green, GreenError};
use crate::numeric::{NumMap, Point};
use crate::periodic::{fixed_points_of_iterate, PeriodicError, PointType};
use crate::scalar::{rat_int, Real, ToReal};
use crate::UPoly;

pub const MIN_SAMPLES: usize = 50;
pub const MIN_SIGNAL: usize = 10;
/// Samples with either Green value below `NOISE_FACTOR · tol` are dropped.
pub const NOISE_FACTOR: f64 = 10.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ErgodicError {
    #[error("no saddle points of period dividing {0}")]
    NoSaddles(u32),
    #[error("at least {MIN_SAMPLES} samples are required, got {0}")]
    TooFewSamples(usize),
    #[error("only {0} samples clear the noise floor, {MIN_SIGNAL} required")]
    InsufficientSignal(usize),
    #[error(transparent)]
    Periodic(#[from] PeriodicError),
    #[error(transparent)]
    Green(#[from] GreenError),
}

/// Compensated (Neumaier) sum, so aggregates do not depend on summation
/// order beyond the last bit.
fn neumaier(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for x in xs {
        let t = s + x;
        c += if s.abs() >= x.abs() { (s - t) + x } else { (x - t) + s };
        s = t;
    }
    s + c
}

#[derive(Clone, Debug, Serialize)]
pub struct LyapunovEstimate {
    pub chi_u: f64,
    pub chi_s: f64,
    pub n_orbits: usize,
    pub period: u32,
    pub stderr: f64,
    /// Largest `|log|u| + log|s| − p log|Jac||` over the saddle orbits.
    pub identity_error: f64,
}

/// Exponents averaged over the saddle points of `Fix(fⁿ)`, each point
/// contributing `(1/p) log|multiplier|` for its exact period `p`.
pub fn lyapunov_from_periodic(f: &PolyAuto, n: u32) -> Result<LyapunovEstimate, ErgodicError> {
    let pts = fixed_points_of_iterate(f, n)?;
    let log_jac = f.jacobian().to_real::<f64>().abs().ln();
    let saddles: Vec<_> = pts.iter().filter(|p| p.kind == PointType::Saddle).collect();
    if saddles.is_empty() {
        return Err(ErgodicError::NoSaddles(n));
    }
    let mut us = Vec::new();
    let mut ss = Vec::new();
    let mut identity_error: f64 = 0.0;
    let mut orbit_weight = 0.0;
    for p in &saddles {
        let k = p.exact_period as f64;
        let lu = p.multipliers[0].norm().ln();
        let ls = p.multipliers[1].norm().ln();
        identity_error = identity_error.max((lu + ls - k * log_jac).abs());
        us.push(lu / k);
        ss.push(ls / k);
        orbit_weight += 1.0 / k;
    }
    let m = us.len() as f64;
    let chi_u = neumaier(us.iter().copied()) / m;
    let chi_s = neumaier(ss.iter().copied()) / m;
    let n_orbits = orbit_weight.round().max(1.0) as usize;
    let var = neumaier(us.iter().map(|u| (u - chi_u).powi(2))) / (m - 1.0).max(1.0);
    Ok(LyapunovEstimate { chi_u, chi_s, n_orbits, period: n, stderr: (var / n_orbits as f64).sqrt(), identity_error })
}

/// Van der Corput radical inverse, the coordinates of a Halton sequence.
fn halton(mut i: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    i += 1;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Polynomial curve `t ↦ (x(t), y(t))`.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    pub x: UPoly,
    pub y: UPoly,
    /// Center `t∞` of the logarithmic term of the harmonic correction.
    pub log_center: Complex64,
}

impl Curve {
    pub fn new(x: UPoly, y: UPoly) -> Self {
        Curve { x, y, log_center: Complex64::new(0.0, 0.0) }
    }

    /// `t ↦ (t, t)`.
    pub fn diagonal() -> Self {
        let t = UPoly::new(vec![rat_int(0), rat_int(1)]);
        Curve::new(t.clone(), t)
    }

    /// `t ↦ (a + b t, c + d t)`.
    pub fn line(a: i64, b: i64, c: i64, d: i64) -> Self {
        Curve::new(UPoly::new(vec![rat_int(a), rat_int(b)]), UPoly::new(vec![rat_int(c), rat_int(d)]))
    }

    pub fn eval<T: Real>(&self, t: Complex<T>) -> Point<T> {
        let h = |p: &UPoly| {
            p.coeffs().iter().rev().fold(Complex::<T>::new(T::zero(), T::zero()), |acc, c| acc * t + c.to_real::<T>())
        };
        [h(&self.x), h(&self.y)]
    }
}

/// Annulus `inner ≤ |t| ≤ outer` of curve parameters, sampled with a
/// Halton sequence uniformly in area.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Annulus {
    pub inner: f64,
    pub outer: f64,
}

impl Annulus {
    pub fn sample(&self, count: usize) -> Vec<Complex64> {
        (0..count)
            .map(|i| {
                let (a, b) = (self.inner * self.inner, self.outer * self.outer);
                let r = (a + halton(i, 2) * (b - a)).sqrt();
                Complex64::from_polar(r, std::f64::consts::TAU * halton(i, 3))
            })
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProportionalityReport {
    pub alpha_hat: f64,
    /// Max absolute error of the fit with the harmonic correction.
    pub residual_norm: f64,
    pub sample_count: usize,
    pub total_samples: usize,
    /// Coefficients of `1, Re t, Im t, log|t − t∞|`.
    pub harmonic: [f64; 4],
    /// Fit `G⁺ = α G⁻` without correction.
    pub raw_alpha: f64,
    pub raw_residual: f64,
    /// `|α|` difference between fits on the even and odd samples.
    pub alpha_spread: f64,
    /// Largest `|G⁺ − G⁻|` over the retained samples.
    pub max_gap: f64,
}

impl ProportionalityReport {
    /// The fit supports `G⁺ = G⁻ + H` on the curve.
    pub fn consistent(&self, tol: f64) -> bool {
        (0.98..=1.02).contains(&self.alpha_hat) && self.residual_norm <= 5.0 * tol && self.alpha_spread <= 0.02
    }
}

fn fit(rows: &[(f64, f64, Complex64)], center: Complex64) -> (DVector<f64>, f64) {
    let m = rows.len();
    let a = DMatrix::from_fn(m, 5, |i, j| {
        let (_, gm, t) = rows[i];
        match j {
            0 => gm,
            1 => 1.0,
            2 => t.re,
            3 => t.im,
            _ => (t - center).norm().ln(),
        }
    });
    let b = DVector::from_iterator(m, rows.iter().map(|r| r.0));
    let x = a.clone().svd(true, true).solve(&b, 1e-14).unwrap_or_else(|_| DVector::zeros(5));
    let res = (&a * &x - &b).amax();
    (x, res)
}

/// Least-squares fit of `G⁺` against `G⁻` along the curve with a small
/// harmonic correction.
pub fn proportionality_test<T: Real>(
    green: &Green<T>,
    curve: &Curve,
    domain: Annulus,
    samples: usize,
    tol: T,
) -> Result<ProportionalityReport, ErgodicError> {
    if samples < MIN_SAMPLES {
        return Err(ErgodicError::TooFewSamples(samples));
    }
    let floor = NOISE_FACTOR * tol.to_f64().unwrap_or(0.0);
    let ts = domain.sample(samples);
    let mut rows = Vec::new();
    for &t in &ts {
        let tt = Complex::new(T::lit(t.re), T::lit(t.im));
        let p = curve.eval(tt);
        let (Ok(gp), Ok(gm)) = (green.green_plus(&p, tol), green.green_minus(&p, tol)) else {
            continue;
        };
        let (gp, gm) = (gp.value.to_f64().unwrap_or(0.0), gm.value.to_f64().unwrap_or(0.0));
        if gp > floor && gm > floor {
            rows.push((gp, gm, t));
        }
    }
    if rows.len() < MIN_SIGNAL {
        return Err(ErgodicError::InsufficientSignal(rows.len()));
    }
    let (x, residual_norm) = fit(&rows, curve.log_center);
    let even: Vec<_> = rows.iter().step_by(2).copied().collect();
    let odd: Vec<_> = rows.iter().skip(1).step_by(2).copied().collect();
    let alpha_spread = if odd.len() >= 5 {
        (fit(&even, curve.log_center).0[0] - fit(&odd, curve.log_center).0[0]).abs()
    } else {
        f64::INFINITY
    };
    let raw_alpha = neumaier(rows.iter().map(|r| r.0 * r.1)) / neumaier(rows.iter().map(|r| r.1 * r.1));
    let raw_residual = rows.iter().map(|r| (r.0 - raw_alpha * r.1).abs()).fold(0.0, f64::max);
    let max_gap = rows.iter().map(|r| (r.0 - r.1).abs()).fold(0.0, f64::max);
    Ok(ProportionalityReport {
        alpha_hat: x[0],
        residual_norm,
        sample_count: rows.len(),
        total_samples: samples,
        harmonic: [x[1], x[2], x[3], x[4]],
        raw_alpha,
        raw_residual,
        alpha_spread,
        max_gap,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SigmaReport {
    pub max_deviation: f64,
    /// Largest sum of the two error bounds at a sample.
    pub max_bound: f64,
    /// Samples where the deviation exceeds the matched bounds.
    pub violations: usize,
    pub samples_used: usize,
}

/// `max |G⁺(σ(p)) − G⁻(p)|` over Halton points of the box `|Re|, |Im| ≤ r`
/// in both coordinates.
pub fn sigma_conjugacy_check<T: Real>(
    green: &Green<T>,
    sigma: &PolyAuto,
    samples: usize,
    r: f64,
    tol: T,
) -> SigmaReport {
    let s = NumMap::<T>::new(sigma.forward());
    let c = |i: usize, b: usize| T::lit(r * (2.0 * halton(i, b) - 1.0));
    let mut out = SigmaReport { max_deviation: 0.0, max_bound: 0.0, violations: 0, samples_used: 0 };
    for i in 0..samples {
        let p = [Complex::new(c(i, 2), c(i, 3)), Complex::new(c(i, 5), c(i, 7))];
        let (Ok(a), Ok(b)) = (green.green_plus(&s.apply(&p), tol), green.green_minus(&p, tol)) else {
            continue;
        };
        let dev = (a.value - b.value).abs().to_f64().unwrap_or(f64::INFINITY);
        let bound = (a.error_bound + b.error_bound).to_f64().unwrap_or(f64::INFINITY);
        out.max_deviation = out.max_deviation.max(dev);
        out.max_bound = out.max_bound.max(bound);
        if dev > bound {
            out.violations += 1;
        }
        out.samples_used += 1;
    }
    out
}
