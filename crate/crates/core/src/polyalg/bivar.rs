use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::univar::UnivarPoly;
use crate::scalar::Coeff;

/// Sparse polynomial in `x` and `y`, keyed by exponent pair `(i, j)` for the
/// monomial `x^i y^j`. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BivarPoly<C> {
    terms: BTreeMap<(u32, u32), C>,
}

impl<C: Coeff> BivarPoly<C> {
    pub fn zero() -> Self {
        BivarPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    pub fn constant(c: C) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn x() -> Self {
        Self::monomial(C::one(), 1, 0)
    }

    pub fn y() -> Self {
        Self::monomial(C::one(), 0, 1)
    }

    pub fn monomial(c: C, i: u32, j: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((i, j), c);
        }
        BivarPoly { terms }
    }

    pub fn from_terms(it: impl IntoIterator<Item = ((u32, u32), C)>) -> Self {
        let mut p = Self::zero();
        for ((i, j), c) in it {
            p.add_term(i, j, c);
        }
        p
    }

    /// `P(x)` lifted to a bivariate polynomial.
    pub fn from_univar_x(p: &UnivarPoly<C>) -> Self {
        Self::from_terms(p.coeffs().iter().enumerate().map(|(k, c)| ((k as u32, 0), c.clone())))
    }

    /// `P(y)` lifted to a bivariate polynomial.
    pub fn from_univar_y(p: &UnivarPoly<C>) -> Self {
        Self::from_terms(p.coeffs().iter().enumerate().map(|(k, c)| ((0, k as u32), c.clone())))
    }

    pub fn add_term(&mut self, i: u32, j: u32, c: C) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry((i, j)).or_insert_with(C::zero);
        *e = e.clone() + c;
        if e.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, i: u32, j: u32) -> C {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(C::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree; `-1` for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.terms.keys().map(|&(i, j)| (i + j) as i64).max().unwrap_or(-1)
    }

    pub fn degree_x(&self) -> i64 {
        self.terms.keys().map(|&(i, _)| i as i64).max().unwrap_or(-1)
    }

    pub fn degree_y(&self) -> i64 {
        self.terms.keys().map(|&(_, j)| j as i64).max().unwrap_or(-1)
    }

    /// The constant value, if the polynomial is constant (zero included).
    pub fn as_constant(&self) -> Option<C> {
        match self.degree() {
            -1 => Some(C::zero()),
            0 => Some(self.coeff(0, 0)),
            _ => None,
        }
    }

    /// Homogeneous component of top total degree.
    pub fn top_form(&self) -> Self {
        let d = self.degree();
        Self::from_terms(self.terms.iter().filter(|(&(i, j), _)| (i + j) as i64 == d).map(|(k, c)| (*k, c.clone())))
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, v)| (*k, v.clone() * c.clone())))
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `p(u(x,y), v(x,y))`.
    pub fn compose2(&self, u: &Self, v: &Self) -> Self {
        // Horner in x over polynomials in y, with cached powers of v.
        let dy = self.degree_y().max(0) as usize;
        let mut vpow = Vec::with_capacity(dy + 1);
        vpow.push(Self::one());
        for k in 1..=dy {
            let next = &vpow[k - 1] * v;
            vpow.push(next);
        }
        let dx = self.degree_x();
        if dx < 0 {
            return Self::zero();
        }
        let mut rows: Vec<Self> = vec![Self::zero(); dx as usize + 1];
        for (&(i, j), c) in &self.terms {
            rows[i as usize] = &rows[i as usize] + &vpow[j as usize].scale(c);
        }
        let mut acc = Self::zero();
        for row in rows.iter().rev() {
            acc = &(&acc * u) + row;
        }
        acc
    }

    /// Exchange the roles of `x` and `y`.
    pub fn swap_xy(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(&(i, j), c)| ((j, i), c.clone())))
    }

    pub fn d_dx(&self) -> Self {
        Self::from_terms(
            self.terms.iter().filter(|(&(i, _), _)| i > 0).map(|(&(i, j), c)| ((i - 1, j), c.clone() * nat::<C>(i))),
        )
    }

    pub fn d_dy(&self) -> Self {
        Self::from_terms(
            self.terms.iter().filter(|(&(_, j), _)| j > 0).map(|(&(i, j), c)| ((i, j - 1), c.clone() * nat::<C>(j))),
        )
    }

    /// Evaluate at a point, with coefficients first mapped into the point's
    /// ring.
    pub fn eval_with<T: Coeff>(&self, x: &T, y: &T, lift: impl Fn(&C) -> T) -> T {
        let dx = self.degree_x().max(0) as usize;
        let dy = self.degree_y().max(0) as usize;
        let mut xp = Vec::with_capacity(dx + 1);
        let mut yp = Vec::with_capacity(dy + 1);
        xp.push(T::one());
        yp.push(T::one());
        for k in 1..=dx {
            xp.push(xp[k - 1].clone() * x.clone());
        }
        for k in 1..=dy {
            yp.push(yp[k - 1].clone() * y.clone());
        }
        let mut acc = T::zero();
        for (&(i, j), c) in &self.terms {
            acc = acc + lift(c) * xp[i as usize].clone() * yp[j as usize].clone();
        }
        acc
    }

    pub fn eval(&self, x: &C, y: &C) -> C {
        self.eval_with(x, y, |c| c.clone())
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> BivarPoly<D> {
        BivarPoly::from_terms(self.terms.iter().map(|(k, c)| (*k, f(c))))
    }

    /// View as a polynomial in `y` whose coefficients are polynomials in `x`.
    /// Entry `j` is the coefficient of `y^j`.
    pub fn coeffs_in_y(&self) -> Vec<UnivarPoly<C>> {
        let dy = self.degree_y();
        if dy < 0 {
            return Vec::new();
        }
        let dx = self.degree_x().max(0) as usize;
        let mut rows = vec![vec![C::zero(); dx + 1]; dy as usize + 1];
        for (&(i, j), c) in &self.terms {
            rows[j as usize][i as usize] = c.clone();
        }
        rows.into_iter().map(UnivarPoly::new).collect()
    }

    /// Substitute `x = t` (a constant) leaving a polynomial in `y`.
    pub fn specialize_x(&self, t: &C) -> UnivarPoly<C> {
        let rows = self.coeffs_in_y();
        UnivarPoly::new(rows.iter().map(|r| r.eval(t)).collect())
    }

    /// Substitute `y = t` leaving a polynomial in `x`.
    pub fn specialize_y(&self, t: &C) -> UnivarPoly<C> {
        self.swap_xy().specialize_x(t)
    }

    /// Leading coefficient in `x`, as a polynomial in `y`.
    pub fn leading_coeff_in_x(&self) -> UnivarPoly<C> {
        let d = self.degree_x();
        if d < 0 {
            return UnivarPoly::zero();
        }
        UnivarPoly::new({
            let dy = self.degree_y().max(0) as usize;
            let mut v = vec![C::zero(); dy + 1];
            for (&(i, j), c) in &self.terms {
                if i as i64 == d {
                    v[j as usize] = c.clone();
                }
            }
            v
        })
    }
}

fn nat<C: Coeff>(k: u32) -> C {
    let mut c = C::zero();
    for _ in 0..k {
        c = c + C::one();
    }
    c
}

impl<C: Coeff> Add for &BivarPoly<C> {
    type Output = BivarPoly<C>;
    fn add(self, rhs: Self) -> BivarPoly<C> {
        let mut out = self.clone();
        for (&(i, j), c) in &rhs.terms {
            out.add_term(i, j, c.clone());
        }
        out
    }
}

impl<C: Coeff> Sub for &BivarPoly<C> {
    type Output = BivarPoly<C>;
    fn sub(self, rhs: Self) -> BivarPoly<C> {
        let mut out = self.clone();
        for (&(i, j), c) in &rhs.terms {
            out.add_term(i, j, -c.clone());
        }
        out
    }
}

impl<C: Coeff> Mul for &BivarPoly<C> {
    type Output = BivarPoly<C>;
    fn mul(self, rhs: Self) -> BivarPoly<C> {
        let mut acc: BTreeMap<(u32, u32), C> = BTreeMap::new();
        for (&(i1, j1), a) in &self.terms {
            for (&(i2, j2), b) in &rhs.terms {
                let e = acc.entry((i1 + i2, j1 + j2)).or_insert_with(C::zero);
                *e = e.clone() + a.clone() * b.clone();
            }
        }
        acc.retain(|_, c| !c.is_zero());
        BivarPoly { terms: acc }
    }
}

impl<C: Coeff> Neg for &BivarPoly<C> {
    type Output = BivarPoly<C>;
    fn neg(self) -> BivarPoly<C> {
        self.map(|c| -c.clone())
    }
}

impl<C: Coeff + fmt::Display> fmt::Display for BivarPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(i, j), c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            match i {
                0 => {}
                1 => write!(f, "*x")?,
                _ => write!(f, "*x^{i}")?,
            }
            match j {
                0 => {}
                1 => write!(f, "*y")?,
                _ => write!(f, "*y^{j}")?,
            }
        }
        Ok(())
    }
}

impl<C: Coeff> fmt::Debug for BivarPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

impl<C: Coeff> Default for BivarPoly<C> {
    fn default() -> Self {
        Self::zero()
    }
}
