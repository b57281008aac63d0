//! Complex root isolation for exact univariate polynomials.
//!
//! Multiplicities come from the exact square-free decomposition. Each
//! square-free factor is rescaled by a power of two, its companion matrix is
//! diagonalized in double precision, and the eigenvalues are refined by
//! Aberth sweeps followed by a per-root Newton polish.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::univar::UnivarPoly;
use super::PolyError;
use crate::scalar::{ln_abs_rational, rational_to_f64, Rational, Real};

/// Default relative residual accepted after polishing.
pub const DEFAULT_POLISH_TOL: f64 = 1e-12;
/// Newton iteration cap per root.
pub const MAX_POLISH_ITER: usize = 100;
const MAX_ABERTH_SWEEPS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexRoot {
    pub value: Complex64,
    pub multiplicity: u32,
    /// `|g(value)| / sum_i |g_i| |value|^i` for the square-free factor `g`
    /// carrying this root.
    pub residual: f64,
}

/// All complex roots of `q` with multiplicity, sorted by `(re, im)`.
pub fn complex_roots(q: &UnivarPoly<Rational>, tol: f64) -> Result<Vec<ComplexRoot>, PolyError> {
    if q.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let (_, parts) = q.square_free_decomposition();
    let mut out = Vec::new();
    for (g, k) in parts {
        for (z, residual) in square_free_roots(&g, tol)? {
            out.push(ComplexRoot { value: z, multiplicity: k, residual });
        }
    }
    sort_roots(&mut out);
    Ok(out)
}

pub fn sort_roots(roots: &mut [ComplexRoot]) {
    roots.sort_by(|a, b| a.value.re.total_cmp(&b.value.re).then(a.value.im.total_cmp(&b.value.im)));
}

/// Roots of a monic square-free polynomial, each with its relative residual.
pub fn square_free_roots(g: &UnivarPoly<Rational>, tol: f64) -> Result<Vec<(Complex64, f64)>, PolyError> {
    let g = g.monic();
    let n = g.degree();
    if n <= 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        let z = Complex64::new(rational_to_f64(&(-g.coeff(0))), 0.0);
        return Ok(vec![(z, 0.0)]);
    }
    let n = n as usize;
    let (scale, h) = balanced(&g);
    let mut zs = companion_eigenvalues(&h).unwrap_or_else(|| circle_start(n));
    aberth(&h, &mut zs);
    let mut out = Vec::with_capacity(n);
    for z0 in zs {
        let (z, res) = newton_polish(&h, z0, tol).ok_or_else(|| PolyError::NonConvergence {
            degree: n,
            root: Complex64::new(z0.re * scale, z0.im * scale),
        })?;
        out.push((z * scale, res));
    }
    Ok(out)
}

/// Rescale `g(t)` to `h(z) = g(s z) / s^n` with `s` a power of two near the
/// root radius, returning `(s, coefficients of h)`.
fn balanced(g: &UnivarPoly<Rational>) -> (f64, Vec<Complex64>) {
    let n = g.degree() as usize;
    let mut log_radius = f64::NEG_INFINITY;
    for i in 0..n {
        let c = g.coeff(i);
        if !c.is_zero() {
            log_radius = log_radius.max(ln_abs_rational(&c) / (n - i) as f64);
        }
    }
    let k = if log_radius.is_finite() { (log_radius / std::f64::consts::LN_2).round() as i64 } else { 0 };
    let two = Rational::from_integer(BigInt::from(2));
    let s = if k >= 0 { two.pow(k as i32) } else { Rational::one() / two.pow((-k) as i32) };
    let mut coeffs = Vec::with_capacity(n + 1);
    let mut spow = Rational::one();
    let sn = s.pow(n as i32);
    for i in 0..=n {
        let c = g.coeff(i) * spow.clone() / sn.clone();
        coeffs.push(Complex64::new(rational_to_f64(&c), 0.0));
        spow *= s.clone();
    }
    let scale = if k.abs() < 1000 { 2f64.powi(k as i32) } else { rational_to_f64(&s) };
    (scale, coeffs)
}

fn companion_eigenvalues(h: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = h.len() - 1;
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        m[(i, n - 1)] = -h[i].re / h[n].re;
    }
    let schur = nalgebra::linalg::Schur::try_new(m, f64::EPSILON, 10_000)?;
    let ev = schur.complex_eigenvalues();
    let v: Vec<Complex64> = ev.iter().map(|c| Complex64::new(c.re, c.im)).collect();
    if v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Some(v)
    } else {
        None
    }
}

fn circle_start(n: usize) -> Vec<Complex64> {
    (0..n).map(|k| Complex64::from_polar(1.0, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / n as f64)).collect()
}

/// Horner evaluation of `h` and `h'` plus the absolute scale
/// `sum |h_i| |z|^i`.
pub fn horner(h: &[Complex64], z: Complex64) -> (Complex64, Complex64, f64) {
    let mut p = Complex64::zero();
    let mut dp = Complex64::zero();
    let mut sc = 0.0;
    let az = z.norm();
    for c in h.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
        sc = sc * az + c.norm();
    }
    (p, dp, sc)
}

fn aberth(h: &[Complex64], zs: &mut [Complex64]) {
    let n = zs.len();
    for _ in 0..MAX_ABERTH_SWEEPS {
        let mut max_step: f64 = 0.0;
        for k in 0..n {
            let (p, dp, sc) = horner(h, zs[k]);
            if p.norm() <= 4.0 * f64::EPSILON * sc * n as f64 {
                continue;
            }
            let ratio = p / dp;
            let mut s = Complex64::zero();
            for j in 0..n {
                if j != k {
                    s += (zs[k] - zs[j]).inv();
                }
            }
            let w = ratio / (Complex64::one() - ratio * s);
            if w.re.is_finite() && w.im.is_finite() {
                zs[k] -= w;
                max_step = max_step.max(w.norm() / zs[k].norm().max(1e-300));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
}

/// Simultaneous Aberth refinement of all roots of `h` (lowest degree
/// first) in any precision, starting from `zs`. Stops once every relative
/// step is below `tol`.
pub fn aberth_refine<T: Real>(h: &[Complex<T>], zs: &mut [Complex<T>], tol: T, max_sweeps: usize) {
    let newton = |z: Complex<T>| {
        let (p, dp) =
            h.iter().rev().fold((Complex::<T>::zero(), Complex::<T>::zero()), |(p, dp), &c| (p * z + c, dp * z + p));
        (p, dp)
    };
    aberth_with(zs, newton, tol, max_sweeps);
}

/// Aberth iteration for a function given by `(g(z), g'(z))`, which need not
/// come from coefficients. Returns the number of sweeps used.
pub fn aberth_with<T: Real>(
    zs: &mut [Complex<T>],
    eval: impl Fn(Complex<T>) -> (Complex<T>, Complex<T>),
    tol: T,
    max_sweeps: usize,
) -> usize {
    let n = zs.len();
    for sweep in 0..max_sweeps {
        let mut max_step = T::zero();
        for k in 0..n {
            let z = zs[k];
            let (p, dp) = eval(z);
            if p.norm() == T::zero() {
                continue;
            }
            let ratio = p / dp;
            let mut s = Complex::<T>::zero();
            for (j, w) in zs.iter().enumerate() {
                if j != k {
                    s = s + Complex::<T>::one() / (z - w);
                }
            }
            let w = ratio / (Complex::<T>::one() - ratio * s);
            if w.re.is_finite() && w.im.is_finite() {
                zs[k] = z - w;
                max_step = max_step.max(w.norm() / zs[k].norm().max(T::one()));
            }
        }
        if max_step < tol {
            return sweep + 1;
        }
    }
    max_sweeps
}

/// Roots of a polynomial with complex coefficients (lowest degree first),
/// by Aberth iteration from a circle. No multiplicity detection.
pub(crate) fn complex_coeff_roots(h: &[Complex64]) -> Vec<Complex64> {
    let mut h = h.to_vec();
    while h.last().is_some_and(|c| c.norm() == 0.0) {
        h.pop();
    }
    if h.len() < 2 {
        return Vec::new();
    }
    let lead = *h.last().unwrap();
    let h: Vec<Complex64> = h.iter().map(|c| c / lead).collect();
    let n = h.len() - 1;
    let radius = (0..n).map(|i| h[i].norm().powf(1.0 / (n - i) as f64)).fold(0.0, f64::max).max(1e-300);
    let mut zs: Vec<Complex64> = circle_start(n).into_iter().map(|z| z * radius).collect();
    aberth(&h, &mut zs);
    zs.into_iter().map(|z| newton_polish(&h, z, DEFAULT_POLISH_TOL).map_or(z, |(w, _)| w)).collect()
}

/// Newton iteration until the relative residual drops below `tol`.
pub(crate) fn newton_polish(h: &[Complex64], mut z: Complex64, tol: f64) -> Option<(Complex64, f64)> {
    for _ in 0..=MAX_POLISH_ITER {
        let (p, dp, sc) = horner(h, z);
        let res = if sc > 0.0 { p.norm() / sc } else { 0.0 };
        if res < tol {
            return Some((z, res));
        }
        if dp.norm() == 0.0 {
            return None;
        }
        z -= p / dp;
    }
    None
}

/// Rational numbers close to `v` with denominator at most `max_den`, found by
/// continued fractions. Used to spot rational roots that can then be
/// verified exactly.
pub fn rational_candidate(v: f64, max_den: i64) -> Option<Rational> {
    if !v.is_finite() || v.abs() > 1e15 {
        return None;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut x = v;
    for _ in 0..64 {
        let a = x.floor();
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = x - a;
        if frac.abs() < 1e-12 || ((h1 as f64) / (k1 as f64) - v).abs() < 1e-14 * v.abs().max(1.0) {
            break;
        }
        x = 1.0 / frac;
    }
    if k1 == 0 {
        return None;
    }
    let r = Rational::new(BigInt::from(h1), BigInt::from(k1));
    ((rational_to_f64(&r) - v).abs() <= 1e-9 * v.abs().max(1.0)).then_some(r)
}

/// Exact rational root check.
pub fn is_exact_root(q: &UnivarPoly<Rational>, r: &Rational) -> bool {
    q.eval(r).is_zero()
}
