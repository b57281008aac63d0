//! Green functions `G⁺`, `G⁻` and `G = max(G⁺, G⁻)` of Hénon-type maps with
//! error bounds, the filtration `V, V⁺, V⁻`, escape certificates and grid
//! rendering.
//!
//! Everything is computed in regular coordinates `q = K⁻¹ p`, where `K` is
//! the conjugator of the regular form. With `H = h_1 ∘ … ∘ h_k`,
//! `h_i = (a_i y, x + P_i(y))`, the escape region is
//! `V⁺ = {|y| >= max(|x|, R)}`. On `V⁺` the second coordinate grows like
//! `log|y'| = d_i log|y| + log|lead P_i| + O(|y|^{1-d_i})`, and summing the
//! leading-coefficient terms gives the correction `c / (d - 1)` used below.
//! `G⁻` is `G⁺` of `σ H⁻¹ σ` with `σ = (y, x)`, which is again a
//! composition of generalized Hénon maps.

use num_complex::Complex;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::automorphism::{to_regular_form, AffineMap, AutoError, HenonFactor, PolyAuto, RegularForm};
use crate::numeric::Point;
use crate::polyalg::UnivarPoly;
use crate::scalar::{Rational, Real, ToReal};

/// Doubling attempts when the filtration radius fails verification.
pub const MAX_RADIUS_DOUBLINGS: u32 = 20;
/// Default iteration cap for Green evaluations.
pub const DEFAULT_MAX_ITER: usize = 2000;
const SWEEP: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GreenError {
    #[error("the map is not of Henon type")]
    NotHenonType,
    #[error("Green functions are only supported for affine conjugators to regular form")]
    NonAffineConjugator,
    #[error("filtration radius failed verification after {0} doublings")]
    VerificationFailed(u32),
    #[error("no certificate after {iterations} iterations")]
    MaxIterations { iterations: usize, value: f64, error_bound: f64 },
    #[error("tolerance must be positive")]
    BadTolerance,
}

impl From<AutoError> for GreenError {
    fn from(_: AutoError) -> Self {
        GreenError::NotHenonType
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GreenValue<T> {
    pub value: T,
    pub error_bound: T,
    pub iterations: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Escape {
    BoundedSoFar,
    EscapesForward,
    EscapesBackward,
    EscapesBoth,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EscapeStatus {
    pub status: Escape,
    /// Step at which the forward orbit entered `V⁺`, or, failing that, the
    /// backward orbit entered `V⁻`. Zero for `BoundedSoFar`.
    pub certificate_n: usize,
}

/// Filtration radius with the measured expansion constant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Filtration<T> {
    pub radius: T,
    /// Twice the largest observed `|log|y∘H|/d - log|y||` on the sweep,
    /// over both `V⁺` and `V⁻`.
    pub expansion_constant: T,
    pub doublings: u32,
    /// The radius passed the sampled sweep; not a proof.
    pub runtime_verified: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Which {
    Plus,
    Minus,
    Max,
}

/// One factor `(a y, x + p(y))` in floating point.
#[derive(Clone, Debug)]
struct NumFactor<T> {
    a: T,
    p: Vec<T>,
    deg: i32,
    lead: T,
    /// `1 + sum_{j < deg} |p_j|`
    lower: T,
}

impl<T: Real> NumFactor<T> {
    fn new(h: &HenonFactor) -> Self {
        let p: Vec<T> = h.p.coeffs().iter().map(|c| c.to_real::<T>()).collect();
        let deg = h.p.degree() as i32;
        let lead = p[deg as usize].abs();
        let lower = T::one() + p[..deg as usize].iter().fold(T::zero(), |s, c| s + c.abs());
        NumFactor { a: h.a.to_real(), p, deg, lead, lower }
    }

    fn apply(&self, q: &Point<T>) -> Point<T> {
        let y = q[1];
        let py = self.p.iter().rev().fold(Complex::zero(), |acc, &c| acc * y + c);
        [y * self.a, q[0] + py]
    }

    /// Relative size of the non-leading part of `x + p(y)` when
    /// `|x| <= |y|` and `|y| >= rho >= 1`.
    fn eps_bar(&self, rho: T) -> T {
        self.lower / (self.lead * rho.powi(self.deg - 1))
    }
}

/// Composition of generalized Hénon maps in floating point.
#[derive(Clone, Debug)]
struct NumRegular<T> {
    /// Composition order: the last factor is applied first.
    factors: Vec<NumFactor<T>>,
    degree: T,
    /// `sum_i log|lead_i| * prod_{j applied after i} d_j`
    log_correction: T,
}

impl<T: Real> NumRegular<T> {
    fn new(hs: &[HenonFactor]) -> Self {
        let factors: Vec<NumFactor<T>> = hs.iter().map(NumFactor::new).collect();
        let mut c = T::zero();
        for f in factors.iter().rev() {
            c = c * T::lit(f.deg as f64) + f.lead.ln();
        }
        let degree = factors.iter().fold(T::one(), |d, f| d * T::lit(f.deg as f64));
        NumRegular { factors, degree, log_correction: c }
    }

    fn apply(&self, q: &Point<T>) -> Point<T> {
        self.factors.iter().rev().fold(*q, |p, f| f.apply(&p))
    }

    /// Bound on `|log|y(Hq)| - d log|y(q)| - c|` for `q ∈ V⁺` with
    /// `|y(q)| >= rho`. Infinite when the estimate does not apply.
    fn step_error(&self, rho: T) -> T {
        let mut rho = rho;
        let mut err = T::zero();
        for f in self.factors.iter().rev() {
            let e = f.eps_bar(rho);
            if !(e < T::one()) {
                return T::infinity();
            }
            err = err * T::lit(f.deg as f64) - (T::one() - e).ln();
            rho = f.lead * rho.powi(f.deg) * (T::one() - e);
        }
        err
    }

    /// Analytic conditions making `V⁺` forward invariant factor by factor.
    fn radius_ok(&self, r: T) -> bool {
        let half = T::lit(0.5);
        self.factors.iter().all(|f| {
            let e = f.eps_bar(r);
            e <= half && f.lead * r.powi(f.deg) * (T::one() - e) >= f.a.abs().max(T::one()) * r
        })
    }

    /// Initial radius from the coefficient sizes.
    fn initial_radius(&self) -> T {
        self.factors
            .iter()
            .map(|f| {
                let total = f.p.iter().fold(f.a.abs(), |s, c| s + c.abs());
                (T::lit(2.0) * (T::one() + total) / f.lead).max(T::one())
            })
            .fold(T::one(), T::max)
    }
}

fn in_plus<T: Real>(q: &Point<T>, r: T) -> bool {
    let ay = q[1].norm();
    ay >= r && ay >= q[0].norm()
}

fn in_box<T: Real>(q: &Point<T>, r: T) -> bool {
    q[0].norm() <= r && q[1].norm() <= r
}

/// Sample the boundary `|y| = r` of `V⁺`: invariance and the log defect.
fn sweep<T: Real>(h: &NumRegular<T>, r: T) -> Option<T> {
    let tau = T::lit(std::f64::consts::TAU);
    let n = SWEEP;
    let mut defect = T::zero();
    for i in 0..n {
        let y = Complex::from_polar(r, tau * T::lit(i as f64 / n as f64));
        for j in 0..n {
            // 8 radii × 8 angles in the disk |x| <= r
            let rad = r * T::lit(((j / 8) as f64 + 1.0) / 8.0);
            let x = Complex::from_polar(rad, tau * T::lit(((j % 8) as f64 + 0.5) / 8.0));
            let q = [x, y];
            let img = h.apply(&q);
            if !in_plus(&img, r) {
                return None;
            }
            let d = (img[1].norm().ln() / h.degree - r.ln()).abs();
            defect = defect.max(d);
        }
    }
    Some(defect)
}

/// Green functions of a Hénon-type map.
#[derive(Clone, Debug)]
pub struct Green<T> {
    plus: NumRegular<T>,
    minus: NumRegular<T>,
    /// `K⁻¹` as a real 2×2 matrix and translation.
    to_regular: ([[T; 2]; 2], [T; 2]),
    filtration: Filtration<T>,
    /// Upper bounds for `G⁺` and `G⁻` on the box `V`.
    box_bound: (T, T),
    pub max_iter: usize,
}

/// `σ h⁻¹ σ = (y / a, x - p(y / a))` for `h = (a y, x + p(y))`.
fn reversed_factor(h: &HenonFactor) -> HenonFactor {
    let inv_a = Rational::one() / h.a.clone();
    let p = -&h.p.compose(&UnivarPoly::monomial(inv_a.clone(), 1));
    HenonFactor { a: inv_a, p }
}

impl<T: Real> Green<T> {
    pub fn new(f: &PolyAuto) -> Result<Self, GreenError> {
        let rf = to_regular_form(f)?;
        Self::from_regular(&rf)
    }

    pub fn from_regular(rf: &RegularForm) -> Result<Self, GreenError> {
        let k_inv = AffineMap::from_map(rf.conjugator.inverse_map()).ok_or(GreenError::NonAffineConjugator)?;
        let m = &k_inv.matrix;
        let to_regular = (
            [[m[0][0].to_real(), m[0][1].to_real()], [m[1][0].to_real(), m[1][1].to_real()]],
            [k_inv.translation[0].to_real(), k_inv.translation[1].to_real()],
        );
        let plus = NumRegular::new(&rf.factors);
        let rev: Vec<HenonFactor> = rf.factors.iter().rev().map(reversed_factor).collect();
        let minus = NumRegular::new(&rev);
        let filtration = Self::verify_radius(&plus, &minus)?;
        let r = filtration.radius;
        let d1 = plus.degree - T::one();
        let bound = |h: &NumRegular<T>| r.ln() + (h.log_correction + h.step_error(r)).max(T::zero()) / d1;
        let box_bound = (bound(&plus), bound(&minus));
        Ok(Green { plus, minus, to_regular, filtration, box_bound, max_iter: DEFAULT_MAX_ITER })
    }

    fn verify_radius(plus: &NumRegular<T>, minus: &NumRegular<T>) -> Result<Filtration<T>, GreenError> {
        let mut r = plus.initial_radius().max(minus.initial_radius());
        for doublings in 0..=MAX_RADIUS_DOUBLINGS {
            if plus.radius_ok(r) && minus.radius_ok(r) {
                if let (Some(a), Some(b)) = (sweep(plus, r), sweep(minus, r)) {
                    let c0 = (T::lit(2.0) * a.max(b)).max(T::eps());
                    return Ok(Filtration { radius: r, expansion_constant: c0, doublings, runtime_verified: true });
                }
            }
            r = r * T::lit(2.0);
        }
        Err(GreenError::VerificationFailed(MAX_RADIUS_DOUBLINGS))
    }

    pub fn filtration(&self) -> &Filtration<T> {
        &self.filtration
    }

    pub fn degree(&self) -> T {
        self.plus.degree
    }

    /// Regular coordinates `K⁻¹ p`.
    pub fn to_regular(&self, p: &Point<T>) -> Point<T> {
        let (m, t) = &self.to_regular;
        [p[0] * m[0][0] + p[1] * m[0][1] + t[0], p[0] * m[1][0] + p[1] * m[1][1] + t[1]]
    }

    fn escape_rate(&self, h: &NumRegular<T>, box_bound: T, q: Point<T>, tol: T) -> Result<GreenValue<T>, GreenError> {
        if !(tol > T::zero()) {
            return Err(GreenError::BadTolerance);
        }
        let r = self.filtration.radius;
        let d = h.degree;
        let d1 = d - T::one();
        // overflow guard: stop refining before |y|^d leaves the exponent range
        let big = T::max_value().ln() / (T::lit(2.0) * d);
        let mut q = q;
        let mut scale = T::one();
        let mut best = T::infinity();
        for n in 0..=self.max_iter {
            if in_plus(&q, r) {
                let ly = q[1].norm().ln();
                let err = scale * h.step_error(q[1].norm()) / d1;
                if err <= tol || ly > big {
                    let value = (scale * (ly + h.log_correction / d1)).max(T::zero());
                    return Ok(GreenValue { value, error_bound: err, iterations: n });
                }
            } else if in_box(&q, r) {
                let b = scale * box_bound;
                best = best.min(b);
                if b <= tol {
                    return Ok(GreenValue { value: T::zero(), error_bound: b, iterations: n });
                }
            }
            if n == self.max_iter {
                break;
            }
            q = h.apply(&q);
            if !(q[0].norm().is_finite() && q[1].norm().is_finite()) {
                break;
            }
            scale = scale / d;
        }
        let fallback = if best.is_finite() { best } else { self.filtration.expansion_constant };
        Err(GreenError::MaxIterations {
            iterations: self.max_iter,
            value: 0.0,
            error_bound: fallback.to_f64().unwrap_or(f64::INFINITY),
        })
    }

    pub fn green_plus(&self, p: &Point<T>, tol: T) -> Result<GreenValue<T>, GreenError> {
        self.escape_rate(&self.plus, self.box_bound.0, self.to_regular(p), tol)
    }

    pub fn green_minus(&self, p: &Point<T>, tol: T) -> Result<GreenValue<T>, GreenError> {
        let q = self.to_regular(p);
        self.escape_rate(&self.minus, self.box_bound.1, [q[1], q[0]], tol)
    }

    /// `G = max(G⁺, G⁻)`.
    pub fn green_max(&self, p: &Point<T>, tol: T) -> Result<GreenValue<T>, GreenError> {
        let a = self.green_plus(p, tol)?;
        let b = self.green_minus(p, tol)?;
        Ok(GreenValue {
            value: a.value.max(b.value),
            error_bound: a.error_bound.max(b.error_bound),
            iterations: a.iterations.max(b.iterations),
        })
    }

    pub fn eval(&self, which: Which, p: &Point<T>, tol: T) -> Result<GreenValue<T>, GreenError> {
        match which {
            Which::Plus => self.green_plus(p, tol),
            Which::Minus => self.green_minus(p, tol),
            Which::Max => self.green_max(p, tol),
        }
    }

    fn first_entry(&self, h: &NumRegular<T>, mut q: Point<T>, n_max: usize) -> Option<usize> {
        let r = self.filtration.radius;
        for n in 0..=n_max {
            if in_plus(&q, r) {
                return Some(n);
            }
            if n < n_max {
                q = h.apply(&q);
            }
        }
        None
    }

    pub fn escape_status(&self, p: &Point<T>, n_max: usize) -> EscapeStatus {
        let q = self.to_regular(p);
        let fwd = self.first_entry(&self.plus, q, n_max);
        let bwd = self.first_entry(&self.minus, [q[1], q[0]], n_max);
        let (status, certificate_n) = match (fwd, bwd) {
            (Some(a), Some(_)) => (Escape::EscapesBoth, a),
            (Some(a), None) => (Escape::EscapesForward, a),
            (None, Some(b)) => (Escape::EscapesBackward, b),
            (None, None) => (Escape::BoundedSoFar, 0),
        };
        EscapeStatus { status, certificate_n }
    }

    /// Green values at cell centers of a real window `[x0, x1] × [y0, y1]`,
    /// row-major with row 0 at `y1`. Cells that fail to certify carry their
    /// conservative fallback value 0.
    pub fn render_grid(&self, window: [T; 4], res: (usize, usize), which: Which, tol: T) -> Vec<T> {
        let (w, h) = res;
        let [x0, x1, y0, y1] = window;
        let dx = (x1 - x0) / T::lit(w as f64);
        let dy = (y1 - y0) / T::lit(h as f64);
        let half = T::lit(0.5);
        (0..w * h)
            .into_par_iter()
            .map(|k| {
                let (row, col) = (k / w, k % w);
                let x = x0 + dx * (T::lit(col as f64) + half);
                let y = y1 - dy * (T::lit(row as f64) + half);
                let p = [Complex::new(x, T::zero()), Complex::new(y, T::zero())];
                self.eval(which, &p, tol).map(|g| g.value).unwrap_or(T::zero())
            })
            .collect()
    }
}

/// Filtration of a regular form.
pub fn filtration<T: Real>(rf: &RegularForm) -> Result<Filtration<T>, GreenError> {
    let plus = NumRegular::<T>::new(&rf.factors);
    let rev: Vec<HenonFactor> = rf.factors.iter().rev().map(reversed_factor).collect();
    Green::<T>::verify_radius(&plus, &NumRegular::new(&rev))
}

pub fn green_plus<T: Real>(g: &Green<T>, p: &Point<T>, tol: T) -> Result<GreenValue<T>, GreenError> {
    g.green_plus(p, tol)
}

pub fn green_minus<T: Real>(g: &Green<T>, p: &Point<T>, tol: T) -> Result<GreenValue<T>, GreenError> {
    g.green_minus(p, tol)
}

pub fn green_max<T: Real>(g: &Green<T>, p: &Point<T>, tol: T) -> Result<GreenValue<T>, GreenError> {
    g.green_max(p, tol)
}

pub fn escape_status<T: Real>(g: &Green<T>, p: &Point<T>, n_max: usize) -> EscapeStatus {
    g.escape_status(p, n_max)
}

pub fn render_grid<T: Real>(g: &Green<T>, window: [T; 4], res: (usize, usize), which: Which, tol: T) -> Vec<T> {
    g.render_grid(window, res, which, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automorphism::{make_auto, PolyMap};
    use crate::numeric::NumAuto;
    use crate::polyalg::BivarPoly;
    use crate::scalar::rat_int;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn quad() -> PolyAuto {
        let (x, y) = (BivarPoly::<Rational>::x(), BivarPoly::<Rational>::y());
        make_auto(PolyMap::new(&x.pow(2) - &y, x.clone()), PolyMap::new(y.clone(), &y.pow(2) - &x)).unwrap()
    }

    fn pt(a: f64, b: f64) -> Point<f64> {
        [Complex64::new(a, 0.0), Complex64::new(b, 0.0)]
    }

    #[test]
    fn regular_example_radius() {
        let f = PolyAuto::henon(&rat_int(1), &UnivarPoly::monomial(rat_int(1), 2)).unwrap();
        let fil = filtration::<f64>(&to_regular_form(&f).unwrap()).unwrap();
        assert!(fil.radius <= 8.0, "{fil:?}");
        let big =
            PolyAuto::henon(&rat_int(1), &UnivarPoly::new(vec![rat_int(1_000_000), rat_int(0), rat_int(1)])).unwrap();
        let fil_big = filtration::<f64>(&to_regular_form(&big).unwrap()).unwrap();
        assert!(fil_big.radius >= fil.radius);
    }

    #[test]
    fn fixed_point_is_zero() {
        let g = Green::<f64>::new(&quad()).unwrap();
        let v = g.green_plus(&pt(0.0, 0.0), 1e-8).unwrap();
        assert_eq!(v.value, 0.0);
        assert!(v.error_bound <= 1e-8);
        assert_eq!(g.escape_status(&pt(0.0, 0.0), 50).status, Escape::BoundedSoFar);
    }

    #[test]
    fn functional_equation_and_growth() {
        let f = quad();
        let g = Green::<f64>::new(&f).unwrap();
        let num = NumAuto::<f64>::new(&f);
        let p = pt(10.0, 0.0);
        let a = g.green_plus(&p, 1e-10).unwrap();
        let b = g.green_plus(&num.forward.apply(&p), 1e-10).unwrap();
        assert!((b.value - 2.0 * a.value).abs() <= 2.0 * a.error_bound + b.error_bound + 1e-9);
        let far = g.green_plus(&pt(1e6, 0.0), 1e-8).unwrap();
        assert!((far.value - 1e6f64.ln()).abs() <= 1.0);
        let s = g.escape_status(&pt(1e6, 0.0), 10);
        assert!(matches!(s.status, Escape::EscapesForward | Escape::EscapesBoth));
        assert!(s.certificate_n <= 2);
    }

    #[test]
    fn functional_equation_random_points() {
        let f = quad();
        let g = Green::<f64>::new(&f).unwrap();
        let num = NumAuto::<f64>::new(&f);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let p = [
                Complex64::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)),
                Complex64::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)),
            ];
            let (Ok(a), Ok(b)) = (g.green_plus(&p, 1e-8), g.green_plus(&num.forward.apply(&p), 1e-8)) else {
                continue;
            };
            assert!((b.value - 2.0 * a.value).abs() <= 2.0 * a.error_bound + b.error_bound + 1e-9);
            let (am, bm) = (g.green_minus(&p, 1e-8).unwrap(), g.green_minus(&num.inverse.apply(&p), 1e-8).unwrap());
            assert!((bm.value - 2.0 * am.value).abs() <= 2.0 * am.error_bound + bm.error_bound + 1e-9);
        }
    }

    #[test]
    fn reversible_symmetry() {
        let g = Green::<f64>::new(&quad()).unwrap();
        for t in [-5.0, -1.3, 0.7, 2.5, 40.0] {
            let p = pt(t, 0.3 * t + 1.0);
            let a = g.green_plus(&[p[1], p[0]], 1e-9).unwrap().value;
            let b = g.green_minus(&p, 1e-9).unwrap().value;
            assert!((a - b).abs() <= 2e-9, "{t}: {a} vs {b}");
        }
    }

    #[test]
    fn single_precision_agrees() {
        let f = quad();
        let g64 = Green::<f64>::new(&f).unwrap();
        let g32 = Green::<f32>::new(&f).unwrap();
        let a = g64.green_plus(&pt(3.0, 1.0), 1e-6).unwrap().value;
        let b = g32.green_plus(&[Complex::new(3.0f32, 0.0), Complex::new(1.0f32, 0.0)], 1e-4).unwrap().value;
        assert!((a - b as f64).abs() < 1e-3);
    }

    #[test]
    fn render_is_deterministic() {
        let g = Green::<f64>::new(&quad()).unwrap();
        let a = g.render_grid([-3.0, 3.0, -3.0, 3.0], (16, 12), Which::Max, 1e-6);
        let b = g.render_grid([-3.0, 3.0, -3.0, 3.0], (16, 12), Which::Max, 1e-6);
        assert_eq!(a.len(), 16 * 12);
        assert_eq!(a, b);
    }
}
