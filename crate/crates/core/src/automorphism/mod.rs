//! Polynomial automorphisms of the plane over Q.

mod affine;
mod jung;
mod regular;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::polyalg::{BivarPoly, UnivarPoly};
use crate::scalar::{Coeff, Rational};
use num_traits::{One, Zero};

pub use affine::AffineMap;
pub use jung::{jung_decompose, JungFactor, JungWord};
pub use regular::{to_regular_form, HenonFactor, RegularForm};

type Poly = BivarPoly<Rational>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AutoError {
    #[error("the given inverse does not invert the forward map")]
    NotInverse,
    #[error("the Jacobian determinant is not a nonzero constant")]
    NonConstantJacobian,
    #[error("the map is not of Henon type")]
    NotHenonType,
    #[error("affine matrix is singular")]
    SingularAffine,
    #[error("elementary factor with a = 0")]
    DegenerateElementary,
}

/// A pair of polynomials read as the map `(x, y) -> (x(x,y), y(x,y))`.
#[derive(Clone, PartialEq, Debug)]
pub struct PolyMap<C: Coeff> {
    pub x: BivarPoly<C>,
    pub y: BivarPoly<C>,
}

impl<C: Coeff> PolyMap<C> {
    pub fn new(x: BivarPoly<C>, y: BivarPoly<C>) -> Self {
        PolyMap { x, y }
    }

    pub fn identity() -> Self {
        PolyMap::new(BivarPoly::x(), BivarPoly::y())
    }

    /// `(y, x)`.
    pub fn swap() -> Self {
        PolyMap::new(BivarPoly::y(), BivarPoly::x())
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Self) -> Self {
        PolyMap::new(self.x.compose2(&inner.x, &inner.y), self.y.compose2(&inner.x, &inner.y))
    }

    /// Maximum of the component degrees.
    pub fn degree(&self) -> i64 {
        self.x.degree().max(self.y.degree())
    }

    /// Determinant of the Jacobian matrix.
    pub fn jacobian_det(&self) -> BivarPoly<C> {
        &(&self.x.d_dx() * &self.y.d_dy()) - &(&self.x.d_dy() * &self.y.d_dx())
    }

    pub fn eval(&self, x: &C, y: &C) -> (C, C) {
        (self.x.eval(x, y), self.y.eval(x, y))
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D + Copy) -> PolyMap<D> {
        PolyMap::new(self.x.map(f), self.y.map(f))
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }
}

impl Serialize for PolyMap<Rational> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        (&self.x, &self.y).serialize(s)
    }
}

impl<'de> Deserialize<'de> for PolyMap<Rational> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let (x, y) = <(Poly, Poly)>::deserialize(d)?;
        Ok(PolyMap::new(x, y))
    }
}

/// A polynomial automorphism together with its verified inverse.
#[derive(Clone, PartialEq, Debug)]
pub struct PolyAuto {
    forward: PolyMap<Rational>,
    inverse: PolyMap<Rational>,
    degree: u32,
    jacobian: Rational,
}

/// Validate `forward` against `inverse` exactly and compute the Jacobian.
pub fn make_auto(forward: PolyMap<Rational>, inverse: PolyMap<Rational>) -> Result<PolyAuto, AutoError> {
    if forward.degree() < 1 || inverse.degree() < 1 {
        return Err(AutoError::NotInverse);
    }
    if !forward.compose(&inverse).is_identity() || !inverse.compose(&forward).is_identity() {
        return Err(AutoError::NotInverse);
    }
    let jacobian = match forward.jacobian_det().as_constant() {
        Some(j) if !j.is_zero() => j,
        _ => return Err(AutoError::NonConstantJacobian),
    };
    Ok(PolyAuto::trusted(forward, inverse, jacobian))
}

impl PolyAuto {
    fn trusted(forward: PolyMap<Rational>, inverse: PolyMap<Rational>, jacobian: Rational) -> Self {
        let degree = forward.degree() as u32;
        PolyAuto { forward, inverse, degree, jacobian }
    }

    pub fn identity() -> Self {
        PolyAuto::trusted(PolyMap::identity(), PolyMap::identity(), Rational::one())
    }

    pub fn swap() -> Self {
        PolyAuto::trusted(PolyMap::swap(), PolyMap::swap(), -Rational::one())
    }

    /// `(x, y) -> (a x + b, y + p(x))`.
    pub fn elementary(a: &Rational, b: &Rational, p: &UnivarPoly<Rational>) -> Result<Self, AutoError> {
        JungFactor::elementary(a.clone(), b.clone(), p.clone())?;
        Ok(JungFactor::Elementary { a: a.clone(), b: b.clone(), p: p.clone() }.to_auto())
    }

    /// `(x, y) -> (a y, x + p(y))`.
    pub fn henon(a: &Rational, p: &UnivarPoly<Rational>) -> Result<Self, AutoError> {
        HenonFactor::new(a.clone(), p.clone()).map(|h| h.to_auto())
    }

    pub fn forward(&self) -> &PolyMap<Rational> {
        &self.forward
    }

    pub fn inverse_map(&self) -> &PolyMap<Rational> {
        &self.inverse
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn jacobian(&self) -> &Rational {
        &self.jacobian
    }

    pub fn inverse(&self) -> PolyAuto {
        PolyAuto::trusted(self.inverse.clone(), self.forward.clone(), Rational::one() / self.jacobian.clone())
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &PolyAuto) -> PolyAuto {
        PolyAuto::trusted(
            self.forward.compose(&inner.forward),
            inner.inverse.compose(&self.inverse),
            self.jacobian.clone() * inner.jacobian.clone(),
        )
    }

    /// Integer power; negative exponents iterate the inverse.
    pub fn pow(&self, n: i64) -> PolyAuto {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut b = base;
        let mut acc = PolyAuto::identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.compose(&b);
            }
        }
        acc
    }

    /// `phi⁻¹ ∘ self ∘ phi`.
    pub fn conjugate_by(&self, phi: &PolyAuto) -> PolyAuto {
        phi.inverse().compose(self).compose(phi)
    }

    pub fn is_affine(&self) -> bool {
        self.degree == 1
    }

    /// Apply the forward map to a rational point.
    pub fn apply(&self, p: &(Rational, Rational)) -> (Rational, Rational) {
        self.forward.eval(&p.0, &p.1)
    }

    pub fn apply_inverse(&self, p: &(Rational, Rational)) -> (Rational, Rational) {
        self.inverse.eval(&p.0, &p.1)
    }

    /// All coefficients of the forward and inverse components.
    pub fn coefficients(&self) -> impl Iterator<Item = &Rational> {
        [&self.forward.x, &self.forward.y, &self.inverse.x, &self.inverse.y]
            .into_iter()
            .flat_map(|p| p.terms().map(|(_, c)| c))
    }
}

/// The constant determinant of `Df`.
pub fn jacobian(f: &PolyAuto) -> Rational {
    f.jacobian.clone()
}

/// Furter's criterion: `deg(f∘f) > deg f`. The degree of `f∘f` is read off
/// its normalized Jung word, which avoids composing the polynomials.
pub fn is_henon_type(f: &PolyAuto) -> bool {
    f.degree >= 2 && is_henon_word(&jung_decompose(f))
}

/// Furter's criterion on a word.
pub fn is_henon_word(w: &JungWord) -> bool {
    let w = w.normalize();
    w.then(&w).degree() > w.degree()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AutoJson {
    forward: PolyMap<Rational>,
    inverse: PolyMap<Rational>,
}

impl Serialize for PolyAuto {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        AutoJson { forward: self.forward.clone(), inverse: self.inverse.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PolyAuto {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = AutoJson::deserialize(d)?;
        make_auto(j.forward, j.inverse).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};

    fn x() -> Poly {
        Poly::x()
    }
    fn y() -> Poly {
        Poly::y()
    }

    pub(crate) fn quad_henon() -> PolyAuto {
        let f = PolyMap::new(&x().pow(2) - &y(), x());
        let g = PolyMap::new(y(), &y().pow(2) - &x());
        make_auto(f, g).unwrap()
    }

    #[test]
    fn construction_examples() {
        let s = make_auto(PolyMap::swap(), PolyMap::swap()).unwrap();
        assert_eq!(*s.jacobian(), rat_int(-1));
        let f = quad_henon();
        assert_eq!(*f.jacobian(), rat_int(1));
        assert_eq!(f.degree(), 2);
        let bad = make_auto(PolyMap::new(x().pow(2), y()), PolyMap::identity());
        assert_eq!(bad.unwrap_err(), AutoError::NotInverse);
    }

    #[test]
    fn jacobian_of_henon_factor() {
        let a = rat(3, 2);
        let h = PolyAuto::henon(&a, &UnivarPoly::new(vec![rat_int(1), rat_int(0), rat_int(2)])).unwrap();
        assert_eq!(jacobian(&h), -a);
    }

    #[test]
    fn furter_examples() {
        let f = PolyAuto::henon(&rat_int(1), &UnivarPoly::monomial(rat_int(1), 2)).unwrap();
        assert!(is_henon_type(&f));
        let e = PolyAuto::elementary(&rat_int(1), &rat_int(0), &UnivarPoly::monomial(rat_int(1), 2)).unwrap();
        assert!(!is_henon_type(&e));
        assert!(!is_henon_type(&PolyAuto::swap()));
    }

    #[test]
    fn furter_by_words_matches_composition() {
        let f = quad_henon();
        let phi = AffineMap::new([[rat_int(1), rat_int(2)], [rat_int(0), rat_int(1)]], [rat_int(3), rat_int(0)])
            .unwrap()
            .to_auto();
        for g in [f.clone(), f.conjugate_by(&phi), phi.clone(), f.compose(&phi)] {
            let by_poly = g.degree() >= 2 && g.forward().compose(g.forward()).degree() > g.degree() as i64;
            assert_eq!(is_henon_type(&g), by_poly);
        }
    }

    #[test]
    fn powers_and_inverse() {
        let f = quad_henon();
        assert_eq!(f.pow(3).degree(), 8);
        assert!(f.pow(-2).compose(&f.pow(2)).forward().is_identity());
        assert_eq!(*f.pow(-1).forward(), *f.inverse_map());
    }

    #[test]
    fn json_roundtrip_and_validation() {
        let f = quad_henon();
        let s = serde_json::to_string(&f).unwrap();
        let back: PolyAuto = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        let bad = s.replace("\"-1/1\"", "\"-2/1\"");
        assert!(serde_json::from_str::<PolyAuto>(&bad).is_err());
    }
}
