//! Jung decomposition into alternating affine and elementary factors.
//!
//! Words are read left to right as compositions: `[F0, F1, F2]` is the map
//! `F0 ∘ F1 ∘ F2`. The normal form keeps every elementary factor as
//! `(x, y + P(x))` with `P` free of constant and linear terms, and every
//! affine factor strictly between two elementary ones outside `A ∩ E`.
//! Triangular affine factors may survive only at the two ends.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{AffineMap, AutoError, PolyAuto, PolyMap};
use crate::polyalg::{BivarPoly, UnivarPoly};
use crate::scalar::Rational;

type QX = UnivarPoly<Rational>;

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum JungFactor {
    Affine(AffineMap),
    /// `(x, y) -> (a x + b, y + p(x))`.
    Elementary {
        #[serde(with = "crate::serde_util::rational")]
        a: Rational,
        #[serde(with = "crate::serde_util::rational")]
        b: Rational,
        #[serde(with = "crate::serde_util::univar")]
        p: QX,
    },
}

/// `(u - b) / a` as a polynomial in `u`.
fn affine_preimage(a: &Rational, b: &Rational) -> QX {
    QX::new(vec![-b.clone() / a.clone(), Rational::one() / a.clone()])
}

impl JungFactor {
    pub fn elementary(a: Rational, b: Rational, p: QX) -> Result<Self, AutoError> {
        if a.is_zero() {
            return Err(AutoError::DegenerateElementary);
        }
        Ok(JungFactor::Elementary { a, b, p })
    }

    fn shear(p: QX) -> Self {
        JungFactor::Elementary { a: Rational::one(), b: Rational::zero(), p }
    }

    pub fn is_affine(&self) -> bool {
        matches!(self, JungFactor::Affine(_))
    }

    /// Membership in `A ∩ E`.
    pub fn is_triangular_affine(&self) -> bool {
        match self {
            JungFactor::Affine(m) => m.is_triangular(),
            JungFactor::Elementary { p, .. } => p.degree() <= 1,
        }
    }

    pub fn to_map(&self) -> PolyMap<Rational> {
        match self {
            JungFactor::Affine(m) => m.to_map(),
            JungFactor::Elementary { a, b, p } => PolyMap::new(
                BivarPoly::from_terms([((1, 0), a.clone()), ((0, 0), b.clone())]),
                &BivarPoly::y() + &BivarPoly::from_univar_x(p),
            ),
        }
    }

    pub fn inverse(&self) -> JungFactor {
        match self {
            JungFactor::Affine(m) => JungFactor::Affine(m.inverse()),
            JungFactor::Elementary { a, b, p } => JungFactor::Elementary {
                a: Rational::one() / a.clone(),
                b: -b.clone() / a.clone(),
                p: -&p.compose(&affine_preimage(a, b)),
            },
        }
    }

    pub fn to_auto(&self) -> PolyAuto {
        let jac = match self {
            JungFactor::Affine(m) => m.det(),
            JungFactor::Elementary { a, .. } => a.clone(),
        };
        PolyAuto::trusted(self.to_map(), self.inverse().to_map(), jac)
    }
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct JungWord {
    pub factors: Vec<JungFactor>,
}

#[derive(Clone, PartialEq, Debug)]
enum Item {
    A(AffineMap),
    E(QX),
}

impl JungWord {
    pub fn new(factors: Vec<JungFactor>) -> Self {
        JungWord { factors }
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Exact composition of all factors.
    pub fn recompose(&self) -> PolyAuto {
        self.factors.iter().fold(PolyAuto::identity(), |acc, f| acc.compose(&f.to_auto()))
    }

    pub fn inverse(&self) -> JungWord {
        JungWord::new(self.factors.iter().rev().map(JungFactor::inverse).collect())
    }

    /// `self ∘ other`, normalized.
    pub fn then(&self, other: &JungWord) -> JungWord {
        let mut f = self.factors.clone();
        f.extend(other.factors.iter().cloned());
        JungWord::new(f).normalize()
    }

    /// Degree of the recomposed map, read off a normalized word as the
    /// product of the elementary degrees.
    pub fn degree(&self) -> u64 {
        self.factors
            .iter()
            .map(|f| match f {
                JungFactor::Elementary { p, .. } => p.degree().max(1) as u64,
                JungFactor::Affine(_) => 1,
            })
            .product()
    }

    /// Rewrite into the normal form described in the module docs. The
    /// recomposition is unchanged.
    pub fn normalize(&self) -> JungWord {
        let mut items = Vec::new();
        for f in &self.factors {
            match f {
                JungFactor::Affine(m) => items.push(Item::A(m.clone())),
                JungFactor::Elementary { a, b, p } => {
                    if a.is_one() && b.is_zero() {
                        items.push(Item::E(p.clone()));
                    } else {
                        // (ax+b, y+p(x)) = (x, y+p((x-b)/a)) ∘ (ax+b, y)
                        items.push(Item::E(p.compose(&affine_preimage(a, b))));
                        let z = Rational::zero();
                        items.push(Item::A(AffineMap {
                            matrix: [[a.clone(), z.clone()], [z.clone(), Rational::one()]],
                            translation: [b.clone(), z],
                        }));
                    }
                }
            }
        }
        while normalize_step(&mut items) {}
        if items.is_empty() {
            items.push(Item::A(AffineMap::identity()));
        }
        JungWord::new(
            items
                .into_iter()
                .map(|it| match it {
                    Item::A(m) => JungFactor::Affine(m),
                    Item::E(p) => JungFactor::shear(p),
                })
                .collect(),
        )
    }
}

fn split_low(p: &QX) -> (Rational, Rational, QX) {
    let c = p.coeffs();
    let mut hi = c.to_vec();
    for v in hi.iter_mut().take(2) {
        *v = Rational::zero();
    }
    (p.coeff(0), p.coeff(1), QX::new(hi))
}

/// Apply one rewrite rule; false once none applies.
fn normalize_step(items: &mut Vec<Item>) -> bool {
    let n = items.len();
    for i in 0..n {
        match &items[i] {
            Item::A(m) if m.is_identity() => {
                items.remove(i);
                return true;
            }
            Item::E(p) if p.is_zero() => {
                items.remove(i);
                return true;
            }
            _ => {}
        }
        if i + 1 < n {
            let merged = match (&items[i], &items[i + 1]) {
                (Item::A(a), Item::A(b)) => Some(Item::A(a.compose(b))),
                (Item::E(p), Item::E(q)) => Some(Item::E(p + q)),
                _ => None,
            };
            if let Some(m) = merged {
                items[i] = m;
                items.remove(i + 1);
                return true;
            }
        }
        if let Item::E(p) = &items[i] {
            if p.degree() >= 0 && (!p.coeff(0).is_zero() || !p.coeff(1).is_zero()) {
                let (c0, c1, hi) = split_low(p);
                let (o, z) = (Rational::one(), Rational::zero());
                let m = AffineMap { matrix: [[o.clone(), z.clone()], [c1, o]], translation: [z, c0] };
                items[i] = Item::E(hi);
                items.insert(i, Item::A(m));
                return true;
            }
        }
        if i >= 1 && i + 1 < n {
            if let (Item::E(_), Item::A(t), Item::E(q)) = (&items[i - 1], &items[i], &items[i + 1]) {
                if t.is_triangular() {
                    let (e, n_map) = push_through(t, q);
                    items[i] = Item::E(e);
                    items[i + 1] = Item::A(n_map);
                    return true;
                }
            }
        }
    }
    false
}

/// For triangular `t = (αx+β, γy+δx+ε)`: `t ∘ (x, y+q(x)) = (x, y+r(x)) ∘ (αx+β, γy)`.
fn push_through(t: &AffineMap, q: &QX) -> (QX, AffineMap) {
    let (alpha, beta) = (&t.matrix[0][0], &t.translation[0]);
    let (delta, gamma, eps) = (&t.matrix[1][0], &t.matrix[1][1], &t.translation[1]);
    let pre = affine_preimage(alpha, beta);
    let r = &(&q.compose(&pre).scale(gamma) + &pre.scale(delta)) + &QX::constant(eps.clone());
    let z = Rational::zero();
    let n =
        AffineMap { matrix: [[alpha.clone(), z.clone()], [z.clone(), gamma.clone()]], translation: [beta.clone(), z] };
    (r, n)
}

/// Coefficient `c` with `t1 = c * t2`, for proportional homogeneous forms.
fn proportionality(t1: &BivarPoly<Rational>, t2: &BivarPoly<Rational>) -> Rational {
    let (&(i, j), c2) = t2.terms().next().expect("nonzero form");
    let c = t1.coeff(i, j) / c2.clone();
    assert!(*t1 == t2.scale(&c), "top forms of an automorphism are proportional");
    c
}

/// Jung decomposition of `f`, normalized. The degree of the first
/// coordinate is reduced against the second until the map is affine; on a
/// tie the first coordinate is reduced by an affine shear, which leaves the
/// second coordinate strictly ahead so the next step swaps.
pub fn jung_decompose(f: &PolyAuto) -> JungWord {
    let mut g = f.forward().clone();
    let mut left = Vec::new();
    let swap = JungFactor::Affine(AffineMap::swap());
    while g.degree() > 1 {
        let (d1, d2) = (g.x.degree(), g.y.degree());
        if d1 < d2 {
            g = PolyMap::new(g.y, g.x);
            left.push(swap.clone());
            continue;
        }
        let (t1, t2) = (g.x.top_form(), g.y.top_form());
        if d1 == d2 {
            let c = proportionality(&t1, &t2);
            g.x = &g.x - &g.y.scale(&c);
            let (o, z) = (Rational::one(), Rational::zero());
            left.push(JungFactor::Affine(AffineMap {
                matrix: [[o.clone(), c], [z.clone(), o]],
                translation: [z.clone(), z],
            }));
        } else {
            assert!(d2 >= 1 && d1 % d2 == 0, "degrees of an automorphism divide");
            let k = (d1 / d2) as u32;
            let c = proportionality(&t1, &t2.pow(k));
            g.x = &g.x - &g.y.pow(k).scale(&c);
            // (x + c y^k, y) = swap ∘ (x, y + c x^k) ∘ swap
            left.push(swap.clone());
            left.push(JungFactor::shear(QX::monomial(c, k as usize)));
            left.push(swap.clone());
        }
    }
    left.push(JungFactor::Affine(AffineMap::from_map(&g).expect("invertible affine remainder")));
    JungWord::new(left).normalize()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};
    use proptest::prelude::*;

    fn henon_x2() -> PolyAuto {
        PolyAuto::henon(&rat_int(1), &QX::monomial(rat_int(1), 2)).unwrap()
    }

    fn is_alternating(w: &JungWord) -> bool {
        w.factors.windows(2).all(|p| p[0].is_affine() != p[1].is_affine())
    }

    fn inner_affines_nontriangular(w: &JungWord) -> bool {
        let n = w.len();
        (1..n.saturating_sub(1)).all(|i| match &w.factors[i] {
            JungFactor::Affine(m) => !m.is_triangular(),
            JungFactor::Elementary { .. } => true,
        })
    }

    #[test]
    fn henon_word() {
        let f = henon_x2();
        let w = jung_decompose(&f);
        assert_eq!(w.len(), 2);
        assert!(!w.factors[0].is_affine());
        assert_eq!(w.factors[1], JungFactor::Affine(AffineMap::swap()));
        assert_eq!(w.recompose(), f);
    }

    #[test]
    fn affine_is_single_factor() {
        let a = AffineMap::new([[rat(1, 2), rat_int(3)], [rat_int(-1), rat_int(2)]], [rat_int(1), rat(-5, 7)]).unwrap();
        let w = jung_decompose(&a.to_auto());
        assert_eq!(w.factors, vec![JungFactor::Affine(a)]);
    }

    #[test]
    fn equal_degree_components() {
        // (x + y^2 ... ) with equal-degree coordinates after an affine mix
        let mix =
            AffineMap::new([[rat_int(1), rat_int(1)], [rat_int(2), rat_int(3)]], Default::default()).unwrap().to_auto();
        let f = mix.compose(&henon_x2());
        assert_eq!(f.forward().x.degree(), f.forward().y.degree());
        let w = jung_decompose(&f);
        assert_eq!(w.recompose(), f);
        assert!(is_alternating(&w));
    }

    #[test]
    fn elementary_factor_json() {
        let e = JungFactor::elementary(rat_int(2), rat(1, 3), QX::monomial(rat_int(1), 3)).unwrap();
        let s = serde_json::to_string(&e).unwrap();
        assert_eq!(s, r#"{"kind":"elementary","a":"2/1","b":"1/3","p":["0/1","0/1","0/1","1/1"]}"#);
        assert_eq!(serde_json::from_str::<JungFactor>(&s).unwrap(), e);
        assert!(JungFactor::elementary(rat_int(0), rat_int(0), QX::zero()).is_err());
    }

    pub(crate) fn small_rat() -> impl Strategy<Value = Rational> {
        (-4i64..=4, 1i64..=3).prop_map(|(n, d)| rat(n, d))
    }

    pub(crate) fn factor_strategy() -> impl Strategy<Value = JungFactor> {
        let affine = (proptest::array::uniform4(small_rat()), small_rat(), small_rat())
            .prop_filter_map("singular", |([a, b, c, d], t0, t1)| {
                AffineMap::new([[a, b], [c, d]], [t0, t1]).ok().map(JungFactor::Affine)
            });
        let elem = (small_rat(), small_rat(), proptest::collection::vec(small_rat(), 0..4))
            .prop_filter_map("a = 0", |(a, b, p)| JungFactor::elementary(a, b, QX::new(p)).ok());
        prop_oneof![affine, elem]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn roundtrip(word in proptest::collection::vec(factor_strategy(), 1..5)) {
            let f = JungWord::new(word).recompose();
            let w = jung_decompose(&f);
            prop_assert_eq!(w.recompose(), f.clone());
            prop_assert_eq!(w.degree(), f.degree() as u64);
            prop_assert!(is_alternating(&w));
            prop_assert!(inner_affines_nontriangular(&w));
            for fac in &w.factors {
                if let JungFactor::Elementary { a, b, p } = fac {
                    prop_assert!(a.is_one() && b.is_zero());
                    prop_assert!(p.coeff(0).is_zero() && p.coeff(1).is_zero());
                }
            }
        }

        #[test]
        fn normalize_preserves_map(word in proptest::collection::vec(factor_strategy(), 1..6)) {
            let w = JungWord::new(word);
            prop_assert_eq!(w.normalize().recompose(), w.recompose());
        }
    }
}
