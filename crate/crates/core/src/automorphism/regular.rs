//! Conjugation of a Hénon-type map to a composition of generalized Hénon
//! maps `(x, y) -> (a y, x + P(y))`.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{is_henon_type, AffineMap, AutoError, JungFactor, PolyAuto, PolyMap};
use crate::amalgam::{cyclic_reduce, AmalgamWord};
use crate::polyalg::{BivarPoly, UnivarPoly};
use crate::scalar::Rational;

type QX = UnivarPoly<Rational>;

/// `(x, y) -> (a y, x + p(y))` with `deg p >= 2`.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct HenonFactor {
    #[serde(with = "crate::serde_util::rational")]
    pub a: Rational,
    #[serde(with = "crate::serde_util::univar")]
    pub p: QX,
}

impl HenonFactor {
    pub fn new(a: Rational, p: QX) -> Result<Self, AutoError> {
        if a.is_zero() || p.degree() < 2 {
            return Err(AutoError::NotHenonType);
        }
        Ok(HenonFactor { a, p })
    }

    pub fn degree(&self) -> u32 {
        self.p.degree() as u32
    }

    pub fn to_map(&self) -> PolyMap<Rational> {
        PolyMap::new(BivarPoly::monomial(self.a.clone(), 0, 1), &BivarPoly::x() + &BivarPoly::from_univar_y(&self.p))
    }

    /// Inverse `(X, Y) -> (Y - p(X/a), X/a)`.
    pub fn inverse_map(&self) -> PolyMap<Rational> {
        let xa = BivarPoly::monomial(Rational::one() / self.a.clone(), 1, 0);
        let p_of = BivarPoly::from_univar_x(&self.p.compose(&QX::monomial(Rational::one() / self.a.clone(), 1)));
        PolyMap::new(&BivarPoly::y() - &p_of, xa)
    }

    pub fn to_auto(&self) -> PolyAuto {
        PolyAuto::trusted(self.to_map(), self.inverse_map(), -self.a.clone())
    }
}

/// `conjugator⁻¹ ∘ f ∘ conjugator = factors[0] ∘ factors[1] ∘ …`.
#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct RegularForm {
    pub conjugator: PolyAuto,
    pub factors: Vec<HenonFactor>,
}

impl RegularForm {
    /// The composed regular map.
    pub fn map(&self) -> PolyAuto {
        self.factors.iter().fold(PolyAuto::identity(), |acc, h| acc.compose(&h.to_auto()))
    }

    pub fn degree(&self) -> u32 {
        self.factors.iter().map(HenonFactor::degree).product()
    }

    /// Regular form of an already regular composition.
    pub fn from_factors(factors: Vec<HenonFactor>) -> Self {
        RegularForm { conjugator: PolyAuto::identity(), factors }
    }
}

/// Write a non-triangular affine map as `b ∘ swap ∘ c` with `b`, `c`
/// triangular.
fn bruhat(a: &AffineMap) -> (AffineMap, AffineMap) {
    let m = &a.matrix;
    let delta = -m[1][1].clone() / m[0][1].clone();
    let (o, z) = (Rational::one(), Rational::zero());
    let b_inv =
        AffineMap { matrix: [[o.clone(), z.clone()], [delta.clone(), o.clone()]], translation: Default::default() };
    let b = AffineMap { matrix: [[o.clone(), z.clone()], [-delta, o]], translation: [z.clone(), z] };
    let c = AffineMap::swap().compose(&b_inv).compose(a);
    debug_assert!(c.is_triangular());
    (b, c)
}

/// Coefficients `(α, β, γ, Q)` of a triangular map `(αx + β, γy + Q(x))`.
fn triangular_parts(t: &PolyMap<Rational>) -> (Rational, Rational, Rational, QX) {
    let alpha = t.x.coeff(1, 0);
    let beta = t.x.coeff(0, 0);
    let gamma = t.y.coeff(0, 1);
    let dx = t.y.degree_x().max(0) as usize;
    let q = QX::new((0..=dx).map(|i| t.y.coeff(i as u32, 0)).collect());
    debug_assert_eq!(t.x.degree_y().max(0), 0);
    debug_assert!(t.y.terms().all(|(&(i, j), _)| j == 0 || (i, j) == (0, 1)));
    (alpha, beta, gamma, q)
}

/// Conjugate a Hénon-type map to regular form. The conjugator is the first
/// one produced by cyclic reduction of the Jung word; no canonical choice is
/// claimed.
pub fn to_regular_form(f: &PolyAuto) -> Result<RegularForm, AutoError> {
    if !is_henon_type(f) {
        return Err(AutoError::NotHenonType);
    }
    let (c_word, reduced) = cyclic_reduce(&AmalgamWord::from_auto(f));
    let fs = &reduced.word.factors;
    let conj_c = c_word.recompose();
    // fs = [E1, a1, E2, a2, …, Ek, ak]
    let k = fs.len() / 2;
    if fs.len() != 2 * k || k == 0 {
        return Err(AutoError::NotHenonType);
    }
    let mut es = Vec::with_capacity(k);
    let mut bs = Vec::with_capacity(k);
    let mut cs = Vec::with_capacity(k);
    for i in 0..k {
        es.push(fs[2 * i].to_map());
        let JungFactor::Affine(a) = &fs[2 * i + 1] else {
            return Err(AutoError::NotHenonType);
        };
        let (b, c) = bruhat(a);
        bs.push(b);
        cs.push(c);
    }
    // T_i = c_{i-1} ∘ E_i ∘ b_i, so that the word equals c_k⁻¹ ∘ (T_1 τ) ∘ … ∘ (T_k τ) ∘ c_k
    let mut parts = Vec::with_capacity(k);
    for i in 0..k {
        let prev = &cs[(i + k - 1) % k];
        let t = prev.to_map().compose(&es[i]).compose(&bs[i].to_map());
        parts.push(triangular_parts(&t));
    }
    let mut factors = Vec::with_capacity(k);
    for i in 0..k {
        let (alpha, _, gamma, q) = &parts[i];
        let (_, beta_next, gamma_next, _) = &parts[(i + 1) % k];
        let scaled = q.compose(&QX::monomial(gamma_next.clone(), 1)).scale(&(Rational::one() / gamma.clone()));
        let p = &scaled + &QX::constant(beta_next.clone());
        factors.push(HenonFactor::new(alpha.clone() * gamma_next.clone(), p)?);
    }
    let (_, beta1, gamma1, _) = &parts[0];
    let z = Rational::zero();
    let d0 = AffineMap {
        matrix: [[Rational::one(), z.clone()], [z.clone(), gamma1.clone()]],
        translation: [beta1.clone(), z],
    };
    let conjugator = conj_c.compose(&cs[k - 1].inverse().to_auto()).compose(&d0.to_auto());
    let rf = RegularForm { conjugator, factors };
    if f.conjugate_by(&rf.conjugator) != rf.map() {
        return Err(AutoError::NotHenonType);
    }
    Ok(rf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};

    fn y2() -> QX {
        QX::monomial(rat_int(1), 2)
    }

    #[test]
    fn already_regular() {
        let f = PolyAuto::henon(&rat_int(1), &y2()).unwrap();
        let rf = to_regular_form(&f).unwrap();
        assert!(rf.conjugator.forward().is_identity());
        assert_eq!(rf.factors, vec![HenonFactor::new(rat_int(1), y2()).unwrap()]);
    }

    #[test]
    fn quadratic_reversible_map() {
        let x = BivarPoly::<Rational>::x();
        let y = BivarPoly::<Rational>::y();
        let f =
            super::super::make_auto(PolyMap::new(&x.pow(2) - &y, x.clone()), PolyMap::new(y.clone(), &y.pow(2) - &x))
                .unwrap();
        let rf = to_regular_form(&f).unwrap();
        assert_eq!(rf.factors.len(), 1);
        assert_eq!(rf.factors[0].a, rat_int(-1));
        assert_eq!(f.conjugate_by(&rf.conjugator), rf.map());
    }

    #[test]
    fn affine_conjugate_recovered() {
        let phi = AffineMap::new([[rat_int(2), rat_int(1)], [rat(1, 3), rat_int(-1)]], [rat_int(1), rat_int(5)])
            .unwrap()
            .to_auto();
        let h = PolyAuto::henon(&rat(3, 2), &QX::new(vec![rat_int(1), rat_int(0), rat_int(2), rat_int(-1)])).unwrap();
        let f = h.conjugate_by(&phi.inverse());
        let rf = to_regular_form(&f).unwrap();
        let g = rf.map();
        assert_eq!(f.conjugate_by(&rf.conjugator), g);
        assert_eq!(g.pow(2).degree(), 9);
        assert_eq!(g.pow(3).degree(), 27);
    }

    #[test]
    fn composite_of_two_factors() {
        let h1 = PolyAuto::henon(&rat_int(2), &y2()).unwrap();
        let h2 = PolyAuto::henon(&rat_int(-1), &QX::monomial(rat_int(1), 3)).unwrap();
        let phi = AffineMap::new([[rat_int(1), rat_int(1)], [rat_int(0), rat_int(1)]], [rat_int(0), rat_int(1)])
            .unwrap()
            .to_auto();
        let f = h1.compose(&h2).conjugate_by(&phi);
        let rf = to_regular_form(&f).unwrap();
        assert_eq!(rf.degree(), 6);
        assert_eq!(rf.map().pow(2).degree(), 36);
    }

    #[test]
    fn elementary_rejected() {
        let e = PolyAuto::elementary(&rat_int(1), &rat_int(0), &y2()).unwrap();
        assert_eq!(to_regular_form(&e).unwrap_err(), AutoError::NotHenonType);
    }
}
