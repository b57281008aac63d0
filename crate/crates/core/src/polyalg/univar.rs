use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::scalar::{Coeff, Rational};

/// Dense univariate polynomial, lowest degree first.
///
/// The coefficient vector never ends in a zero, so the zero polynomial is the
/// empty vector and has degree `-1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UnivarPoly<C> {
    coeffs: Vec<C>,
}

impl<C: Coeff> UnivarPoly<C> {
    pub fn new(mut coeffs: Vec<C>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UnivarPoly { coeffs }
    }

    pub fn zero() -> Self {
        UnivarPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    pub fn constant(c: C) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial `t`.
    pub fn var() -> Self {
        Self::new(vec![C::zero(), C::one()])
    }

    pub fn monomial(c: C, k: usize) -> Self {
        let mut v = vec![C::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    /// Coefficient of `t^k`, zero past the end.
    pub fn coeff(&self, k: usize) -> C {
        self.coeffs.get(k).cloned().unwrap_or_else(C::zero)
    }

    pub fn degree(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> C {
        self.coeffs.last().cloned().unwrap_or_else(C::zero)
    }

    pub fn eval(&self, t: &C) -> C {
        let mut acc = C::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t.clone() + c.clone();
        }
        acc
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    pub fn derivative(&self) -> Self {
        let mut out = Vec::with_capacity(self.coeffs.len().saturating_sub(1));
        let mut k = C::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                out.push(c.clone() * k.clone());
            }
            k = k + C::one();
        }
        Self::new(out)
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

    /// `self(inner(t))` by Horner.
    pub fn compose(&self, inner: &Self) -> Self {
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * inner) + &Self::constant(c.clone());
        }
        acc
    }

    /// Euclidean division; the leading coefficient of `d` must be a unit.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let dn = d.coeffs.len() - 1;
        let lc = d.leading();
        let mut r = self.coeffs.clone();
        if r.len() <= dn {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![C::zero(); r.len() - dn];
        for k in (0..q.len()).rev() {
            let c = r[k + dn].clone() / lc.clone();
            if !c.is_zero() {
                for (i, dc) in d.coeffs.iter().enumerate() {
                    r[k + i] = r[k + i].clone() - c.clone() * dc.clone();
                }
            }
            q[k] = c;
        }
        r.truncate(dn);
        (Self::new(q), Self::new(r))
    }

    /// Pseudo-remainder `lc(d)^(deg self - deg d + 1) * self mod d`.
    pub fn pseudo_rem(&self, d: &Self) -> Self {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let dn = d.degree();
        let mut r = self.clone();
        if r.degree() < dn {
            return r;
        }
        let lc = d.leading();
        let mut e = self.degree() - dn + 1;
        while !r.is_zero() && r.degree() >= dn {
            let shift = (r.degree() - dn) as usize;
            let t = Self::monomial(r.leading(), shift);
            r = &r.scale(&lc) - &(&t * d);
            e -= 1;
        }
        let mut f = C::one();
        for _ in 0..e {
            f = f * lc.clone();
        }
        r.scale(&f)
    }

    /// Makes the leading coefficient one (field coefficients only).
    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = C::one() / self.leading();
        self.scale(&inv)
    }

    /// Monic gcd by the Euclidean algorithm (field coefficients).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> UnivarPoly<D> {
        UnivarPoly::new(self.coeffs.iter().map(f).collect())
    }
}

impl UnivarPoly<Rational> {
    /// Scales to an integer polynomial with content one and positive leading
    /// coefficient. Returns the primitive part; the zero polynomial maps to
    /// itself.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut den = BigInt::one();
        for c in &self.coeffs {
            den = den.lcm(c.denom());
        }
        let ints: Vec<BigInt> = self.coeffs.iter().map(|c| (c * &den).to_integer()).collect();
        let mut g = BigInt::zero();
        for c in &ints {
            g = g.gcd(c);
        }
        if ints.last().unwrap().is_negative() {
            g = -g;
        }
        Self::new(ints.into_iter().map(|c| Rational::from_integer(c / &g)).collect())
    }

    /// Gcd computed through a primitive remainder sequence over the integers,
    /// which keeps coefficient growth in check. Result is monic.
    pub fn gcd_rational(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        let (mut a, mut b) = (self.primitive_part(), other.primitive_part());
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b);
            a = b;
            b = r.primitive_part();
        }
        a.monic()
    }

    /// Exact quotient; panics if the division leaves a remainder.
    pub fn div_exact(&self, d: &Self) -> Self {
        let (q, r) = self.div_rem(d);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Square-free decomposition `self = c * prod_k g_k^k` (Yun's algorithm).
    ///
    /// Returns `(c, [(g_k, k)])` with every `g_k` monic, square-free,
    /// pairwise coprime and non-constant.
    pub fn square_free_decomposition(&self) -> (Rational, Vec<(Self, u32)>) {
        assert!(!self.is_zero(), "square-free decomposition of zero");
        let c = self.leading();
        let f = self.monic();
        let mut out = Vec::new();
        if f.degree() == 0 {
            return (c, out);
        }
        let fp = f.derivative();
        let a0 = f.gcd_rational(&fp);
        let mut b = f.div_exact(&a0);
        let mut cpoly = fp.div_exact(&a0);
        let mut d = &cpoly - &b.derivative();
        let mut k = 1u32;
        loop {
            let a = b.gcd_rational(&d);
            if a.degree() > 0 {
                out.push((a.clone(), k));
            }
            b = b.div_exact(&a);
            if b.degree() <= 0 {
                break;
            }
            cpoly = d.div_exact(&a);
            d = &cpoly - &b.derivative();
            k += 1;
        }
        (c, out)
    }

    /// Square-free part, monic.
    pub fn square_free_part(&self) -> Self {
        let (_, parts) = self.square_free_decomposition();
        parts.into_iter().fold(Self::one(), |acc, (g, _)| &acc * &g)
    }
}

impl<C: Coeff> Add for &UnivarPoly<C> {
    type Output = UnivarPoly<C>;
    fn add(self, rhs: Self) -> UnivarPoly<C> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UnivarPoly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<C: Coeff> Sub for &UnivarPoly<C> {
    type Output = UnivarPoly<C>;
    fn sub(self, rhs: Self) -> UnivarPoly<C> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UnivarPoly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl<C: Coeff> Mul for &UnivarPoly<C> {
    type Output = UnivarPoly<C>;
    fn mul(self, rhs: Self) -> UnivarPoly<C> {
        if self.is_zero() || rhs.is_zero() {
            return UnivarPoly::zero();
        }
        let mut out = vec![C::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        UnivarPoly::new(out)
    }
}

impl<C: Coeff> Neg for &UnivarPoly<C> {
    type Output = UnivarPoly<C>;
    fn neg(self) -> UnivarPoly<C> {
        UnivarPoly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

impl<C: Coeff + fmt::Display> fmt::Display for UnivarPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*t")?,
                _ => write!(f, "({c})*t^{k}")?,
            }
        }
        Ok(())
    }
}

impl<C: Coeff> fmt::Debug for UnivarPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("UnivarPoly").field(&self.coeffs).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};

    fn p(cs: &[i64]) -> UnivarPoly<Rational> {
        UnivarPoly::new(cs.iter().map(|&c| rat_int(c)).collect())
    }

    #[test]
    fn zero_degree_convention() {
        assert_eq!(UnivarPoly::<Rational>::zero().degree(), -1);
        assert_eq!(p(&[0, 0, 0]).degree(), -1);
        assert_eq!(p(&[3]).degree(), 0);
    }

    #[test]
    fn division_and_gcd() {
        // (t-1)(t-2) and (t-1)(t+5)
        let a = p(&[2, -3, 1]);
        let b = p(&[-5, 4, 1]);
        assert_eq!(a.gcd(&b), p(&[-1, 1]));
        assert_eq!(a.gcd_rational(&b), p(&[-1, 1]));
        let (q, r) = a.div_rem(&p(&[-1, 1]));
        assert_eq!(q, p(&[-2, 1]));
        assert!(r.is_zero());
    }

    #[test]
    fn square_free_of_t4_minus_2t3() {
        // t^3 (t - 2)
        let f = p(&[0, 0, 0, -2, 1]);
        let (c, parts) = f.square_free_decomposition();
        assert_eq!(c, rat_int(1));
        assert_eq!(parts, vec![(p(&[-2, 1]), 1), (p(&[0, 1]), 3)]);
    }

    #[test]
    fn square_free_recomposes() {
        let f = &(&p(&[1, 1]).pow(4) * &p(&[-3, 0, 1]).pow(2)) * &p(&[7, 0, 0, 2]);
        let f = f.scale(&rat(-5, 3));
        let (c, parts) = f.square_free_decomposition();
        let mut back = UnivarPoly::constant(c);
        for (g, k) in &parts {
            back = &back * &g.pow(*k);
        }
        assert_eq!(back, f);
        assert_eq!(parts.iter().map(|(g, k)| g.degree() * *k as i64).sum::<i64>(), f.degree());
    }

    #[test]
    fn compose_and_pseudo_rem() {
        let f = p(&[0, 0, 1]);
        let g = p(&[1, 1]);
        assert_eq!(f.compose(&g), p(&[1, 2, 1]));
        let a = p(&[1, 0, 0, 3]);
        let b = p(&[1, 2]);
        let r = a.pseudo_rem(&b);
        // 2^3 * a mod b is a constant: 8 * a(-1/2) = 8 - 3 = 5
        assert_eq!(r, p(&[5]));
    }
}
