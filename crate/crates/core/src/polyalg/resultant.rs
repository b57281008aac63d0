//! Resultants of bivariate polynomials with respect to `y`, computed by the
//! subresultant remainder sequence over `Q[x]`.

use super::bivar::BivarPoly;
use super::univar::UnivarPoly;
use super::PolyError;
use crate::scalar::Rational;

type QX = UnivarPoly<Rational>;

/// Polynomial in `y` with coefficients in `Q[x]`, lowest degree first,
/// trimmed so the last entry is nonzero.
#[derive(Clone, Debug)]
struct YPoly(Vec<QX>);

impl YPoly {
    fn new(mut v: Vec<QX>) -> Self {
        while v.last().is_some_and(|c| c.is_zero()) {
            v.pop();
        }
        YPoly(v)
    }

    fn degree(&self) -> i64 {
        self.0.len() as i64 - 1
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn leading(&self) -> QX {
        self.0.last().cloned().unwrap_or_else(QX::zero)
    }

    fn scale(&self, c: &QX) -> Self {
        YPoly::new(self.0.iter().map(|a| a * c).collect())
    }

    fn div_scalar(&self, c: &QX) -> Self {
        YPoly::new(self.0.iter().map(|a| a.div_exact(c)).collect())
    }

    fn pseudo_rem(&self, d: &YPoly) -> YPoly {
        let dn = d.degree();
        let lc = d.leading();
        let mut r = self.0.clone();
        let mut e = self.degree() - dn + 1;
        while r.len() as i64 > dn && !r.is_empty() {
            let top = r.last().unwrap().clone();
            let shift = r.len() - 1 - dn as usize;
            for c in r.iter_mut() {
                *c = &*c * &lc;
            }
            for (i, dc) in d.0.iter().enumerate() {
                let t = &top * dc;
                r[shift + i] = &r[shift + i] - &t;
            }
            debug_assert!(r.last().unwrap().is_zero());
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
            e -= 1;
        }
        let mut f = QX::one();
        for _ in 0..e.max(0) {
            f = &f * &lc;
        }
        YPoly::new(r).scale(&f)
    }
}

/// Output of the subresultant sequence: the resultant together with the
/// degree-one member of the sequence, when one occurs.
#[derive(Clone, Debug)]
pub struct Elimination {
    pub resultant: QX,
    /// `(s11, s10)` such that `s11(x) * y + s10(x)` is proportional to the
    /// first subresultant.
    pub linear: Option<(QX, QX)>,
}

/// Resultant of `p` and `q` as polynomials in `y` over `Q[x]`.
pub fn resultant_y(p: &BivarPoly<Rational>, q: &BivarPoly<Rational>) -> Result<QX, PolyError> {
    Ok(eliminate_y(p, q)?.resultant)
}

/// Like [`resultant_y`], also returning the linear subresultant used to
/// recover `y` at a root.
pub fn eliminate_y(p: &BivarPoly<Rational>, q: &BivarPoly<Rational>) -> Result<Elimination, PolyError> {
    let a = YPoly::new(p.coeffs_in_y());
    let b = YPoly::new(q.coeffs_in_y());
    if a.degree() <= 0 && b.degree() <= 0 {
        return Err(PolyError::BothConstantInY);
    }
    if a.is_zero() || b.is_zero() {
        return Ok(Elimination { resultant: QX::zero(), linear: None });
    }
    // res(constant c, B) = c^deg B
    if a.degree() == 0 {
        return Ok(Elimination { resultant: a.leading().pow(b.degree() as u32), linear: None });
    }
    if b.degree() == 0 {
        return Ok(Elimination { resultant: b.leading().pow(a.degree() as u32), linear: None });
    }
    Ok(subresultant(a, b))
}

fn subresultant(mut a: YPoly, mut b: YPoly) -> Elimination {
    let mut negate = false;
    if a.degree() < b.degree() {
        if a.degree() * b.degree() % 2 == 1 {
            negate = true;
        }
        std::mem::swap(&mut a, &mut b);
    }
    let mut linear = None;
    if b.degree() == 1 {
        linear = Some((b.0[1].clone(), b.0[0].clone()));
    }
    let mut g = QX::one();
    let mut h = QX::one();
    loop {
        let delta = (a.degree() - b.degree()) as u32;
        if a.degree() % 2 == 1 && b.degree() % 2 == 1 {
            negate = !negate;
        }
        let r = a.pseudo_rem(&b);
        a = b;
        b = r.div_scalar(&(&g * &h.pow(delta)));
        g = a.leading();
        // h <- h^(1 - delta) * g^delta
        h = if delta == 0 { h } else { g.pow(delta).div_exact(&h.pow(delta - 1)) };
        if b.is_zero() {
            return Elimination { resultant: QX::zero(), linear };
        }
        if b.degree() == 1 {
            linear = Some((b.0[1].clone(), b.0[0].clone()));
        }
        if b.degree() == 0 {
            break;
        }
    }
    let da = a.degree() as u32;
    // h <- h^(1 - deg a) * lc(b)^deg a
    let res = if da == 0 { h } else { b.leading().pow(da).div_exact(&h.pow(da - 1)) };
    let res = if negate { -&res } else { res };
    Elimination { resultant: res, linear }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat_int, Rational};
    use num_traits::{One, Zero};

    type P = BivarPoly<Rational>;

    fn c(v: i64) -> P {
        P::constant(rat_int(v))
    }

    /// Determinant of the Sylvester matrix, by exact Gaussian elimination over
    /// Q(x) evaluated at an integer x. Independent of the sequence above.
    fn sylvester_at(p: &P, q: &P, x: i64) -> Rational {
        let a = p.specialize_x(&rat_int(x));
        let b = q.specialize_x(&rat_int(x));
        let (m, n) = (p.degree_y() as usize, q.degree_y() as usize);
        let size = m + n;
        let mut mat = vec![vec![Rational::zero(); size]; size];
        for r in 0..n {
            for k in 0..=m {
                mat[r][r + k] = a.coeff(m - k);
            }
        }
        for r in 0..m {
            for k in 0..=n {
                mat[n + r][r + k] = b.coeff(n - k);
            }
        }
        let mut det = Rational::one();
        for col in 0..size {
            let Some(piv) = (col..size).find(|&r| !mat[r][col].is_zero()) else {
                return Rational::zero();
            };
            if piv != col {
                mat.swap(piv, col);
                det = -det;
            }
            det *= mat[col][col].clone();
            for r in col + 1..size {
                let f = mat[r][col].clone() / mat[col][col].clone();
                for k in col..size {
                    let v = mat[col][k].clone() * f.clone();
                    mat[r][k] -= v;
                }
            }
        }
        det
    }

    #[test]
    fn linear_elimination() {
        let (x, y) = (P::x(), P::y());
        let r = resultant_y(&(&y - &x), &(&y - &c(2))).unwrap();
        // proportional to x - 2
        assert_eq!(r.degree(), 1);
        assert!(r.eval(&rat_int(2)).is_zero());
        let r = resultant_y(&y, &(&y - &x.pow(2))).unwrap();
        assert_eq!(r.monic(), UnivarPoly::new(vec![rat_int(0), rat_int(0), rat_int(1)]));
    }

    #[test]
    fn quadratic_henon_fixed_points() {
        // f = (x^2 - y, x): f1 - x and f2 - y
        let (x, y) = (P::x(), P::y());
        let p = &(&x.pow(2) - &y) - &x;
        let q = &x - &y;
        let r = resultant_y(&p, &q).unwrap();
        assert_eq!(r.monic(), UnivarPoly::new(vec![rat_int(0), rat_int(-2), rat_int(1)]));
    }

    #[test]
    fn both_constant_is_error() {
        let x = P::x();
        assert_eq!(resultant_y(&x, &(&x + &c(1))).unwrap_err(), PolyError::BothConstantInY);
    }

    #[test]
    fn agrees_with_sylvester_determinant() {
        let (x, y) = (P::x(), P::y());
        let p = &(&(&y.pow(3) * &x) + &(&c(2) * &y)) - &x.pow(2);
        let q = &(&y.pow(2) - &(&c(3) * &(&x * &y))) + &(&x.pow(3) + &c(1));
        let r = resultant_y(&p, &q).unwrap();
        for t in -3..=3 {
            assert_eq!(r.eval(&rat_int(t)), sylvester_at(&p, &q, t), "x = {t}");
        }
    }
}
