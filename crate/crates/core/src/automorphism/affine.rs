use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{AutoError, PolyAuto, PolyMap};
use crate::polyalg::BivarPoly;
use crate::scalar::Rational;

/// `(x, y) -> M (x, y) + t`.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct AffineMap {
    #[serde(with = "rational_matrix")]
    pub matrix: [[Rational; 2]; 2],
    #[serde(with = "crate::serde_util::rational_pair")]
    pub translation: [Rational; 2],
}

impl AffineMap {
    pub fn new(matrix: [[Rational; 2]; 2], translation: [Rational; 2]) -> Result<Self, AutoError> {
        let a = AffineMap { matrix, translation };
        if a.det().is_zero() {
            return Err(AutoError::SingularAffine);
        }
        Ok(a)
    }

    pub fn identity() -> Self {
        let (o, z) = (Rational::one(), Rational::zero());
        AffineMap { matrix: [[o.clone(), z.clone()], [z.clone(), o]], translation: [z.clone(), z] }
    }

    pub fn swap() -> Self {
        let (o, z) = (Rational::one(), Rational::zero());
        AffineMap { matrix: [[z.clone(), o.clone()], [o, z.clone()]], translation: [z.clone(), z] }
    }

    /// Read an affine map off a polynomial pair of degree at most one.
    pub fn from_map(m: &PolyMap<Rational>) -> Option<Self> {
        if m.degree() > 1 {
            return None;
        }
        let row = |p: &BivarPoly<Rational>| [p.coeff(1, 0), p.coeff(0, 1)];
        AffineMap::new([row(&m.x), row(&m.y)], [m.x.coeff(0, 0), m.y.coeff(0, 0)]).ok()
    }

    pub fn det(&self) -> Rational {
        let m = &self.matrix;
        m[0][0].clone() * m[1][1].clone() - m[0][1].clone() * m[1][0].clone()
    }

    /// First coordinate depends on `x` only, so the map is also elementary.
    pub fn is_triangular(&self) -> bool {
        self.matrix[0][1].is_zero()
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &AffineMap) -> AffineMap {
        let (a, b) = (&self.matrix, &inner.matrix);
        let mut m: [[Rational; 2]; 2] = Default::default();
        let mut t: [Rational; 2] = Default::default();
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = a[i][0].clone() * b[0][j].clone() + a[i][1].clone() * b[1][j].clone();
            }
            t[i] = a[i][0].clone() * inner.translation[0].clone()
                + a[i][1].clone() * inner.translation[1].clone()
                + self.translation[i].clone();
        }
        AffineMap { matrix: m, translation: t }
    }

    pub fn inverse(&self) -> AffineMap {
        let d = self.det();
        let m = &self.matrix;
        let inv = [
            [m[1][1].clone() / d.clone(), -m[0][1].clone() / d.clone()],
            [-m[1][0].clone() / d.clone(), m[0][0].clone() / d.clone()],
        ];
        let t = &self.translation;
        let ti = [
            -(inv[0][0].clone() * t[0].clone() + inv[0][1].clone() * t[1].clone()),
            -(inv[1][0].clone() * t[0].clone() + inv[1][1].clone() * t[1].clone()),
        ];
        AffineMap { matrix: inv, translation: ti }
    }

    pub fn to_map(&self) -> PolyMap<Rational> {
        let comp = |i: usize| {
            BivarPoly::from_terms([
                ((1, 0), self.matrix[i][0].clone()),
                ((0, 1), self.matrix[i][1].clone()),
                ((0, 0), self.translation[i].clone()),
            ])
        };
        PolyMap::new(comp(0), comp(1))
    }

    pub fn to_auto(&self) -> PolyAuto {
        PolyAuto::trusted(self.to_map(), self.inverse().to_map(), self.det())
    }

    pub fn apply(&self, p: &[Rational; 2]) -> [Rational; 2] {
        let m = &self.matrix;
        [
            m[0][0].clone() * p[0].clone() + m[0][1].clone() * p[1].clone() + self.translation[0].clone(),
            m[1][0].clone() * p[0].clone() + m[1][1].clone() * p[1].clone() + self.translation[1].clone(),
        ]
    }
}

mod rational_matrix {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Row(#[serde(with = "crate::serde_util::rational_pair")] [Rational; 2]);

    pub fn serialize<S: Serializer>(m: &[[Rational; 2]; 2], s: S) -> Result<S::Ok, S::Error> {
        [Row(m[0].clone()), Row(m[1].clone())].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[[Rational; 2]; 2], D::Error> {
        let [Row(a), Row(b)] = <[Row; 2]>::deserialize(d)?;
        Ok([a, b])
    }
}
