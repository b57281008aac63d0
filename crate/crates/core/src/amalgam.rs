//! Reduced words in the amalgam `A *_{A∩E} E`, translation lengths on the
//! Bass-Serre tree, ping-pong composites and common iterates.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::automorphism::{is_henon_type, is_henon_word, jung_decompose, JungFactor, JungWord, PolyAuto};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AmalgamError {
    #[error("the map is not of Henon type")]
    NotHenonType,
}

/// A normalized word with its cyclic-reduction flag. Triangular affine
/// factors at either end lie in `A ∩ E` and are ignored when comparing the
/// kinds of the first and last factors.
#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct AmalgamWord {
    pub word: JungWord,
    pub cyclically_reduced: bool,
}

/// Index range of the word with boundary factors from `A ∩ E` stripped.
fn core_range(w: &JungWord) -> (usize, usize) {
    let f = &w.factors;
    let mut lo = 0;
    let mut hi = f.len();
    if hi > 0 && f[0].is_triangular_affine() {
        lo = 1;
    }
    if hi > lo && f[hi - 1].is_triangular_affine() {
        hi -= 1;
    }
    (lo, hi)
}

impl AmalgamWord {
    pub fn new(word: &JungWord) -> Self {
        let word = word.normalize();
        let (lo, hi) = core_range(&word);
        let cyclically_reduced = hi - lo <= 1 || word.factors[lo].is_affine() != word.factors[hi - 1].is_affine();
        AmalgamWord { word, cyclically_reduced }
    }

    pub fn from_auto(f: &PolyAuto) -> Self {
        AmalgamWord::new(&jung_decompose(f))
    }

    /// Number of factors outside `A ∩ E` at the boundary.
    pub fn core_len(&self) -> usize {
        let (lo, hi) = core_range(&self.word);
        hi - lo
    }
}

/// Conjugate `w` to a cyclically reduced word: returns `(c, r)` with
/// `w = c ∘ r ∘ c⁻¹`.
pub fn cyclic_reduce(w: &AmalgamWord) -> (JungWord, AmalgamWord) {
    let mut cur = w.word.normalize();
    let mut conj: Vec<JungFactor> = Vec::new();
    // every rotation either shortens the word or happens at most twice in a row
    let cap = 4 * cur.len() + 8;
    for _ in 0..cap {
        let f = &cur.factors;
        if f.len() <= 1 {
            break;
        }
        let (lo, hi) = core_range(&cur);
        if lo == 0 {
            if hi <= 1 {
                break;
            }
            if !f[0].is_affine() && f[hi - 1].is_affine() {
                break;
            }
        }
        // w = a ∘ rest  ~  rest ∘ a
        let a = f[0].clone();
        let mut rest = f[1..].to_vec();
        rest.push(a.clone());
        conj.push(a);
        cur = JungWord::new(rest).normalize();
    }
    let reduced = AmalgamWord::new(&cur);
    (JungWord::new(conj).normalize(), reduced)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum TreeKind {
    Elliptic,
    Hyperbolic,
}

#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct TreeClassification {
    pub kind: TreeKind,
    pub translation_length: u64,
    pub reduced_word: JungWord,
}

/// Factor count of the cyclically reduced word, or 0 when it is conjugate
/// into `A` or `E`.
pub fn translation_length(w: &AmalgamWord) -> u64 {
    let (_, r) = cyclic_reduce(w);
    let n = r.core_len();
    if n >= 2 {
        n as u64
    } else {
        0
    }
}

pub fn classify(f: &PolyAuto) -> TreeClassification {
    let w = AmalgamWord::from_auto(f);
    let (_, r) = cyclic_reduce(&w);
    let n = r.core_len();
    let (kind, len) = if n >= 2 { (TreeKind::Hyperbolic, n as u64) } else { (TreeKind::Elliptic, 0) };
    TreeClassification { kind, translation_length: len, reduced_word: r.word }
}

/// `(f^N ∘ g^N, f^{2N} ∘ g^{2N})`, both checked to be of Hénon type.
pub fn ping_pong_pair(f: &PolyAuto, g: &PolyAuto, n: u32) -> Result<(PolyAuto, PolyAuto), AmalgamError> {
    if !is_henon_type(f) || !is_henon_type(g) {
        return Err(AmalgamError::NotHenonType);
    }
    let n = n.max(1) as i64;
    let mut fp = Powers::new(f);
    let mut gp = Powers::new(g);
    let w1 = fp.word(n).then(gp.word(n));
    let w2 = fp.word(2 * n).then(gp.word(2 * n));
    if !is_henon_word(&w1) || !is_henon_word(&w2) {
        return Err(AmalgamError::NotHenonType);
    }
    Ok((w1.recompose(), w2.recompose()))
}

/// Powers of a map kept as normalized words; polynomials are only formed
/// on demand.
struct Powers {
    word: JungWord,
    inv: JungWord,
    words: HashMap<i64, JungWord>,
    maps: HashMap<i64, PolyAuto>,
}

impl Powers {
    fn new(f: &PolyAuto) -> Self {
        let word = jung_decompose(f);
        let inv = word.inverse().normalize();
        Powers { word, inv, words: HashMap::new(), maps: HashMap::new() }
    }

    fn word(&mut self, n: i64) -> &JungWord {
        if !self.words.contains_key(&n) {
            let step = if n > 0 { self.word.clone() } else { self.inv.clone() };
            let w = if n.abs() == 1 { step } else { self.word(n - n.signum()).then(&step) };
            self.words.insert(n, w);
        }
        &self.words[&n]
    }

    fn map(&mut self, n: i64) -> &PolyAuto {
        if !self.maps.contains_key(&n) {
            let m = self.word(n).recompose();
            self.maps.insert(n, m);
        }
        &self.maps[&n]
    }
}

/// Smallest `(|n|, |m|)` in lexicographic order with `f^n = g^m`, where
/// `1 <= |n|, |m| <= bound`. The sign of `n` is normalized to positive, so
/// `g = f^{-2}` yields `(2, -1)`. Degrees are compared first, using the
/// Jung words of the powers.
pub fn common_iterate(f: &PolyAuto, g: &PolyAuto, bound: u32) -> Option<(i64, i64)> {
    let b = bound as i64;
    let mut fp = Powers::new(f);
    let mut gp = Powers::new(g);
    for n in 1..=b {
        let fd = fp.word(n).degree();
        for m in 1..=b {
            for m in [m, -m] {
                if gp.word(m).degree() != fd {
                    continue;
                }
                let gm = gp.map(m).forward().clone();
                if *fp.map(n).forward() == gm {
                    return Some((n, m));
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automorphism::AffineMap;
    use crate::polyalg::UnivarPoly;
    use crate::scalar::{rat, rat_int};

    fn henon(k: usize) -> PolyAuto {
        PolyAuto::henon(&rat_int(1), &UnivarPoly::monomial(rat_int(1), k)).unwrap()
    }

    fn shear_x2() -> JungFactor {
        JungFactor::elementary(rat_int(1), rat_int(0), UnivarPoly::monomial(rat_int(1), 2)).unwrap()
    }

    fn generic_affine() -> AffineMap {
        AffineMap::new([[rat_int(1), rat_int(2)], [rat_int(1), rat_int(3)]], [rat(1, 2), rat_int(-1)]).unwrap()
    }

    #[test]
    fn conjugate_of_elementary_reduces_to_elementary() {
        let a = generic_affine();
        let w = JungWord::new(vec![JungFactor::Affine(a.clone()), shear_x2(), JungFactor::Affine(a.inverse())]);
        let aw = AmalgamWord::new(&w);
        assert!(!aw.cyclically_reduced);
        let (c, r) = cyclic_reduce(&aw);
        assert!(r.cyclically_reduced);
        assert_eq!(r.core_len(), 1);
        assert_eq!(c.then(&r.word).then(&c.inverse()).recompose(), w.recompose());
        assert_eq!(translation_length(&aw), 0);
    }

    #[test]
    fn alternating_pair_is_reduced() {
        let w = JungWord::new(vec![shear_x2(), JungFactor::Affine(generic_affine())]);
        let aw = AmalgamWord::new(&w);
        assert!(aw.cyclically_reduced);
        assert_eq!(translation_length(&aw), 2);
    }

    #[test]
    fn affine_sandwich() {
        let a1 = generic_affine();
        let a2 = AffineMap::swap();
        let w = JungWord::new(vec![JungFactor::Affine(a1.clone()), shear_x2(), JungFactor::Affine(a2.clone())]);
        let (c, r) = cyclic_reduce(&AmalgamWord::new(&w));
        assert_eq!(r.core_len(), 2);
        assert_eq!(c.then(&r.word).then(&c.inverse()).recompose(), w.recompose());
    }

    #[test]
    fn classification_examples() {
        let f = henon(2);
        let c = classify(&f);
        assert_eq!((c.kind, c.translation_length), (TreeKind::Hyperbolic, 2));
        assert_eq!(classify(&f.pow(2)).translation_length, 4);
        let t = AffineMap::new([[rat_int(1), rat_int(0)], [rat_int(0), rat_int(1)]], [rat_int(1), rat_int(0)])
            .unwrap()
            .to_auto();
        let c = classify(&t);
        assert_eq!((c.kind, c.translation_length), (TreeKind::Elliptic, 0));
    }

    #[test]
    fn translation_length_scales_with_powers() {
        let phi = generic_affine().to_auto();
        let f = henon(2).conjugate_by(&phi);
        let base = classify(&f).translation_length;
        assert_eq!(base, 2);
        for n in -3i64..=3 {
            assert_eq!(classify(&f.pow(n)).translation_length, n.unsigned_abs() * base, "n = {n}");
        }
    }

    #[test]
    fn ping_pong_examples() {
        let (f, g) = (henon(2), henon(3));
        let (h1, h2) = ping_pong_pair(&f, &g, 1).unwrap();
        assert!(is_henon_type(&h1) && is_henon_type(&h2));
        let (h1, h2) = ping_pong_pair(&f, &f, 1).unwrap();
        assert_eq!(h2, h1.pow(2));
        let affine = AffineMap::swap().to_auto();
        assert_eq!(ping_pong_pair(&f, &affine, 1).unwrap_err(), AmalgamError::NotHenonType);
    }

    #[test]
    fn common_iterate_examples() {
        let f = henon(2);
        assert_eq!(common_iterate(&f.pow(3), &f, 4), Some((1, 3)));
        assert_eq!(common_iterate(&f, &f.pow(3), 4), Some((3, 1)));
        assert_eq!(common_iterate(&f, &f.pow(-2), 4), Some((2, -1)));
        assert_eq!(common_iterate(&f, &henon(3), 3), None);
    }
}
