//! Floating point evaluation of exact polynomial maps at complex points.

use num_complex::Complex;
use num_traits::Zero;

use crate::automorphism::{PolyAuto, PolyMap};
use crate::polyalg::BivarPoly;
use crate::scalar::{Rational, Real, ToReal};

/// A point of `C²`.
pub type Point<T> = [Complex<T>; 2];

/// Max norm of a point of `C²`.
pub fn norm_max<T: Real>(p: &Point<T>) -> T {
    p[0].norm().max(p[1].norm())
}

/// `log⁺ ‖p‖` with `log⁺ 0 = 0`.
pub fn log_plus<T: Real>(p: &Point<T>) -> T {
    let n = norm_max(p);
    if n > T::one() {
        n.ln()
    } else {
        T::zero()
    }
}

/// Dense-in-`x` Horner layout of a bivariate polynomial with real
/// coefficients: `rows[i]` holds the coefficients of `x^i` as a polynomial
/// in `y`, lowest degree first.
#[derive(Clone, Debug)]
pub struct NumPoly<T> {
    rows: Vec<Vec<T>>,
}

impl<T: Real> NumPoly<T> {
    pub fn new(p: &BivarPoly<Rational>) -> Self {
        let dx = p.degree_x().max(0) as usize;
        let mut rows = vec![Vec::new(); dx + 1];
        for (&(i, j), c) in p.terms() {
            let row = &mut rows[i as usize];
            if row.len() <= j as usize {
                row.resize(j as usize + 1, T::zero());
            }
            row[j as usize] = c.to_real::<T>();
        }
        NumPoly { rows }
    }

    fn horner_y(row: &[T], y: Complex<T>) -> Complex<T> {
        row.iter().rev().fold(Complex::zero(), |acc, &c| acc * y + c)
    }

    pub fn eval(&self, x: Complex<T>, y: Complex<T>) -> Complex<T> {
        self.rows.iter().rev().fold(Complex::zero(), |acc, row| acc * x + Self::horner_y(row, y))
    }

    /// Composition with a pair of power series, truncated to their length.
    pub fn eval_series(&self, x: &[Complex<T>], y: &[Complex<T>]) -> Vec<Complex<T>> {
        let len = x.len();
        let mut acc = vec![Complex::zero(); len];
        for row in self.rows.iter().rev() {
            let mut r = vec![Complex::zero(); len];
            for &c in row.iter().rev() {
                r = series_mul(&r, y, len);
                r[0] = r[0] + c;
            }
            acc = series_mul(&acc, x, len);
            for (a, b) in acc.iter_mut().zip(r) {
                *a = *a + b;
            }
        }
        acc
    }

    /// Value and both partial derivatives.
    pub fn eval_grad(&self, x: Complex<T>, y: Complex<T>) -> (Complex<T>, Complex<T>, Complex<T>) {
        let mut v = Complex::zero();
        let mut vx = Complex::zero();
        let mut vy = Complex::zero();
        for row in self.rows.iter().rev() {
            let (r, ry) =
                row.iter().rev().fold((Complex::zero(), Complex::zero()), |(p, dp), &c| (p * y + c, dp * y + p));
            vx = vx * x + v;
            v = v * x + r;
            vy = vy * x + ry;
        }
        (v, vx, vy)
    }
}

/// Numerical form of an exact polynomial map.
#[derive(Clone, Debug)]
pub struct NumMap<T> {
    pub x: NumPoly<T>,
    pub y: NumPoly<T>,
}

impl<T: Real> NumMap<T> {
    pub fn new(m: &PolyMap<Rational>) -> Self {
        NumMap { x: NumPoly::new(&m.x), y: NumPoly::new(&m.y) }
    }

    pub fn apply(&self, p: &Point<T>) -> Point<T> {
        [self.x.eval(p[0], p[1]), self.y.eval(p[0], p[1])]
    }

    /// Value and Jacobian matrix `[[∂x/∂x, ∂x/∂y], [∂y/∂x, ∂y/∂y]]`.
    pub fn apply_jac(&self, p: &Point<T>) -> (Point<T>, [[Complex<T>; 2]; 2]) {
        let (a, ax, ay) = self.x.eval_grad(p[0], p[1]);
        let (b, bx, by) = self.y.eval_grad(p[0], p[1]);
        ([a, b], [[ax, ay], [bx, by]])
    }
}

impl<T: Real> NumMap<T> {
    /// Image of a power-series curve, truncated to its length.
    pub fn apply_series(&self, p: &[Vec<Complex<T>>; 2]) -> [Vec<Complex<T>>; 2] {
        [self.x.eval_series(&p[0], &p[1]), self.y.eval_series(&p[0], &p[1])]
    }
}

/// Product of two power series keeping the first `len` terms.
pub fn series_mul<T: Real>(a: &[Complex<T>], b: &[Complex<T>], len: usize) -> Vec<Complex<T>> {
    let mut out = vec![Complex::zero(); len];
    for (i, &ai) in a.iter().enumerate().take(len) {
        if ai.is_zero() {
            continue;
        }
        for (j, &bj) in b.iter().enumerate().take(len - i) {
            out[i + j] = out[i + j] + ai * bj;
        }
    }
    out
}

/// Forward and inverse numerical maps of an automorphism.
#[derive(Clone, Debug)]
pub struct NumAuto<T> {
    pub forward: NumMap<T>,
    pub inverse: NumMap<T>,
}

impl<T: Real> NumAuto<T> {
    pub fn new(f: &PolyAuto) -> Self {
        NumAuto { forward: NumMap::new(f.forward()), inverse: NumMap::new(f.inverse_map()) }
    }

    /// `f^n(p)` for `n >= 0`, `f^{-n}` otherwise.
    pub fn iterate(&self, p: &Point<T>, n: i64) -> Point<T> {
        let m = if n >= 0 { &self.forward } else { &self.inverse };
        (0..n.unsigned_abs()).fold(*p, |q, _| m.apply(&q))
    }
}

pub fn mat_mul<T: Real>(a: &[[Complex<T>; 2]; 2], b: &[[Complex<T>; 2]; 2]) -> [[Complex<T>; 2]; 2] {
    let mut m = [[Complex::zero(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    m
}

/// Eigenvalues of a complex 2×2 matrix, ordered by decreasing modulus.
pub fn eig2<T: Real>(m: &[[Complex<T>; 2]; 2]) -> (Complex<T>, Complex<T>) {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let two = T::lit(2.0);
    let disc = (tr * tr - det * T::lit(4.0)).sqrt();
    let l1 = (tr + disc) / two;
    let l2 = (tr - disc) / two;
    // recompute the small root from the product to avoid cancellation
    let (mut big, _) = if l1.norm() >= l2.norm() { (l1, l2) } else { (l2, l1) };
    // the complex square root may be less accurate than the arithmetic in
    // extended precision; polish on the characteristic polynomial
    for _ in 0..2 {
        let p = big * big - tr * big + det;
        let dp = big * two - tr;
        if dp.norm() > T::zero() {
            big = big - p / dp;
        }
    }
    let small = if big.norm() > T::zero() { det / big } else { Complex::zero() };
    (big, small)
}
