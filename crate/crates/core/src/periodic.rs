//! Periodic points by exact elimination, their multipliers, and reversible
//! maps `(P(x) - y, x)` with the diagonal intersections `Δ ∩ fⁿ(Δ)`.
//!
//! In regular form `H = h_1 ∘ … ∘ h_k`, `h_i = (a_i y, x + P_i(y))`, an orbit
//! is determined by the sequence of second coordinates, which obeys
//! `y_{j+1} = a_{j-1} y_{j-1} + P_j(y_j)` (the factor used at step `j`
//! cycles through `h_k, …, h_1`). Taking `(y_0, y_1)` as unknowns, running
//! the recurrence forward to `y_{m+1}` and backward to `y_{m-N}` with
//! `N = nk`, `m = ⌈N/2⌉`, and equating gives two equations whose degrees
//! multiply to `dⁿ`. Their resultant is a univariate polynomial of degree
//! `dⁿ` whose square-free decomposition carries the multiplicities.

use std::cmp::Ordering;

use num_complex::{Complex, Complex64};
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::automorphism::{make_auto, to_regular_form, AutoError, PolyAuto, PolyMap, RegularForm};
use crate::numeric::{eig2, mat_mul, NumMap, Point};
use crate::polyalg::{
    aberth_refine, aberth_with, complex_coeff_roots, eliminate_y, rational_candidate, square_free_roots, BivarPoly,
    PolyError, UnivarPoly, DEFAULT_POLISH_TOL,
};
use crate::scalar::{rat, Hi, Rational, Real, ToReal};

type QX = UnivarPoly<Rational>;
type Poly = BivarPoly<Rational>;
type CHi = Complex<Hi>;

/// Largest admissible Bézout number `dⁿ`.
pub const MAX_COUNT: u64 = 10_000;
/// Relative tolerance for `‖f^e(p) - p‖` when deciding the exact period.
pub const PERIOD_TOL: f64 = 1e-9;
/// Points closer than this after polishing are merged.
pub const DEDUP_DIST: f64 = 1e-8;
/// Relative margin around `|λ| = 1` for the type tag.
pub const UNIT_MARGIN: f64 = 1e-9;
const SHEARS: [(i64, i64); 8] = [(0, 1), (1, 1), (-1, 1), (2, 1), (1, 2), (-2, 1), (3, 1), (-1, 3)];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PeriodicError {
    #[error("the map is not of Henon type")]
    NotHenonType,
    #[error("d^n = {0} exceeds the cap")]
    TooLarge(u64),
    #[error("period must be at least 1")]
    ZeroPeriod,
    #[error("elimination degenerated for every tried projection")]
    EliminationDegenerate,
    #[error(transparent)]
    Roots(#[from] PolyError),
    #[error("point is not periodic: residual {0}")]
    NotPeriodic(f64),
    #[error("point is not on the diagonal")]
    NotOnDiagonal,
    #[error("polynomial degree must be at least 2")]
    DegreeTooSmall,
    #[error("sigma is not a reversing involution for f")]
    NotReversible,
    #[error("diagonal intersections need the reversor (y, x)")]
    UnsupportedReversor,
}

impl From<AutoError> for PeriodicError {
    fn from(_: AutoError) -> Self {
        PeriodicError::NotHenonType
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointType {
    Saddle,
    Sink,
    Source,
    Indifferent,
}

#[derive(Clone, Debug, Serialize)]
pub struct PeriodicPoint {
    pub point: [Complex64; 2],
    pub period_dividing: u32,
    pub exact_period: u32,
    pub multiplicity: u32,
    /// Eigenvalues `(u, s)` of `D(f^exact_period)`, `|u| >= |s|`.
    pub multipliers: [Complex64; 2],
    #[serde(rename = "type")]
    pub kind: PointType,
    /// `‖fⁿ(p) - p‖` evaluated in double-double arithmetic.
    pub residual: f64,
    #[serde(skip)]
    hp: Point<Hi>,
}

impl PeriodicPoint {
    /// The point to double-double precision.
    pub fn point_hi(&self) -> Point<Hi> {
        self.hp
    }
}

/// A saddle periodic point with `|u| > 1 > |s|`.
#[derive(Clone, Debug, Serialize)]
pub struct SaddleData {
    pub base: PeriodicPoint,
    pub u: Complex64,
    pub s: Complex64,
}

impl SaddleData {
    pub fn new(base: PeriodicPoint) -> Option<Self> {
        let [u, s] = base.multipliers;
        (u.norm() > 1.0 && s.norm() < 1.0).then_some(SaddleData { base, u, s })
    }

    pub fn period(&self) -> u32 {
        self.base.exact_period
    }
}

fn lo(z: CHi) -> Complex64 {
    Complex64::new(z.re.hi(), z.im.hi())
}

fn up(z: Complex64) -> CHi {
    Complex::new(Hi::from(z.re), Hi::from(z.im))
}

fn dist(a: &Point<Hi>, b: &Point<Hi>) -> Hi {
    (a[0] - b[0]).norm().max((a[1] - b[1]).norm())
}

fn size(p: &Point<Hi>) -> Hi {
    p[0].norm().max(p[1].norm())
}

fn horner_hi(cs: &[CHi], z: CHi) -> (CHi, CHi) {
    cs.iter().rev().fold((CHi::zero(), CHi::zero()), |(p, dp), &c| (p * z + c, dp * z + p))
}

fn hi_coeffs(q: &QX) -> Vec<CHi> {
    q.coeffs().iter().map(|c| Complex::new(c.to_real::<Hi>(), Hi::zero())).collect()
}

/// Roots of a square-free `g` in double-double precision.
fn square_free_roots_hi(g: &QX) -> Result<Vec<CHi>, PolyError> {
    let cs = hi_coeffs(g);
    let mut zs: Vec<CHi> = square_free_roots(g, DEFAULT_POLISH_TOL)?.into_iter().map(|(z, _)| up(z)).collect();
    aberth_refine(&cs, &mut zs, Hi::lit(1e-30), 100);
    Ok(zs)
}

/// Newton steps on `q` in double-double precision from a double estimate.
fn refine_root(cs: &[CHi], z: Complex64) -> CHi {
    let mut z = up(z);
    for _ in 0..8 {
        let (p, dp) = horner_hi(cs, z);
        if dp.norm() == Hi::zero() {
            break;
        }
        let step = p / dp;
        z -= step;
        if step.norm() <= Hi::lit(1e-31) * z.norm().max(Hi::one()) {
            break;
        }
    }
    z
}

/// Complex roots of `q` with multiplicities, refined to double-double.
fn roots_hi(q: &QX) -> Result<Vec<(CHi, u32)>, PolyError> {
    if q.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let (_, parts) = q.square_free_decomposition();
    let mut out = Vec::new();
    for (g, k) in parts {
        out.extend(square_free_roots_hi(&g)?.into_iter().map(|z| (z, k)));
    }
    Ok(out)
}

/// `p(y)` for a univariate `p` and a bivariate argument.
fn apply_univar(p: &QX, y: &Poly) -> Poly {
    p.coeffs().iter().rev().fold(Poly::zero(), |acc, c| &(&acc * y) + &Poly::constant(c.clone()))
}

/// The two period equations in the unknowns `(s, t)` with
/// `y_0 = s - λ t`, `y_1 = t`.
fn period_equations(rf: &RegularForm, n: u32, lambda: &Rational) -> (Poly, Poly) {
    let k = rf.factors.len() as i64;
    let big_n = n as i64 * k;
    let m = (big_n + 1) / 2;
    let factor = |j: i64| &rf.factors[(k - 1 - j.rem_euclid(k)) as usize];
    let lo_idx = m - big_n;
    let hi_idx = m + 1;
    let off = (-lo_idx) as usize;
    let mut ys: Vec<Option<Poly>> = vec![None; (hi_idx - lo_idx + 1) as usize];
    let t = Poly::y();
    ys[off] = Some(&Poly::x() - &t.scale(lambda));
    ys[off + 1] = Some(t);
    for j in 1..hi_idx {
        let prev = ys[off + j as usize - 1].as_ref().unwrap();
        let cur = ys[off + j as usize].as_ref().unwrap();
        let next = &prev.scale(&factor(j - 1).a) + &apply_univar(&factor(j).p, cur);
        ys[off + j as usize + 1] = Some(next);
    }
    for j in (lo_idx + 1..=0).rev() {
        let nxt = ys[(off as i64 + j + 1) as usize].as_ref().unwrap();
        let cur = ys[(off as i64 + j) as usize].as_ref().unwrap();
        let inv_a = Rational::one() / factor(j - 1).a.clone();
        let prev = (nxt - &apply_univar(&factor(j).p, cur)).scale(&inv_a);
        ys[(off as i64 + j - 1) as usize] = Some(prev);
    }
    let y = |i: i64| ys[(off as i64 + i) as usize].as_ref().unwrap();
    (y(m) - y(m - big_n), y(m + 1) - y(m + 1 - big_n))
}

/// Second unknown `t` over each root `s` of one square-free part of the
/// resultant, or `None` when some fiber holds several points.
fn recover_fiber(g: &QX, f: &Poly, h: &Poly, linear: Option<&(QX, QX)>) -> Result<Option<Vec<(CHi, CHi)>>, PolyError> {
    if let Some((s11, s10)) = linear.filter(|(s11, _)| g.gcd_rational(s11).degree() == 0) {
        let (a, b) = (hi_coeffs(s11), hi_coeffs(s10));
        let zs = square_free_roots_hi(g)?;
        return Ok(Some(zs.into_iter().map(|s| (s, -horner_hi(&b, s).0 / horner_hi(&a, s).0)).collect()));
    }
    if g.degree() == 1 {
        // rational fiber: exact gcd of the specialized equations
        let s0 = -g.coeff(0) / g.coeff(1);
        let common = f.specialize_x(&s0).gcd_rational(&h.specialize_x(&s0)).square_free_part();
        if common.degree() != 1 {
            return Ok(None);
        }
        let t0 = -common.coeff(0) / common.coeff(1);
        let c = |r: &Rational| Complex::new(r.to_real::<Hi>(), Hi::zero());
        return Ok(Some(vec![(c(&s0), c(&t0))]));
    }
    // algebraic fibers: common roots of the specialized equations, found
    // numerically; a fiber with more than one point rejects this projection
    let rows_f: Vec<Vec<CHi>> = f.coeffs_in_y().iter().map(hi_coeffs).collect();
    let rows_h: Vec<Vec<CHi>> = h.coeffs_in_y().iter().map(hi_coeffs).collect();
    let at = |rows: &[Vec<CHi>], s: CHi| -> Vec<CHi> { rows.iter().map(|r| horner_hi(r, s).0).collect() };
    let mut out = Vec::new();
    for s in square_free_roots_hi(g)? {
        let fs = at(&rows_f, s);
        let hs = at(&rows_h, s);
        let mut common: Vec<CHi> = Vec::new();
        for t in complex_coeff_roots(&fs.iter().map(|c| lo(*c)).collect::<Vec<_>>()) {
            let t = refine_root(&fs, t);
            let scale = hs.iter().rev().fold(Hi::zero(), |acc, c| acc * t.norm() + c.norm());
            if horner_hi(&hs, t).0.norm() > Hi::lit(1e-10) * scale.max(Hi::one()) {
                continue;
            }
            if !common.iter().any(|c| (*c - t).norm() <= Hi::lit(1e-6) * t.norm().max(Hi::one())) {
                common.push(t);
            }
        }
        if common.len() != 1 {
            return Ok(None);
        }
        out.push((s, common[0]));
    }
    Ok(Some(out))
}

/// Points of `Fix(Hⁿ)` in regular coordinates with multiplicities.
fn regular_fixed_points(rf: &RegularForm, n: u32) -> Result<Vec<(Point<Hi>, u32)>, PeriodicError> {
    let count = (rf.degree() as u64).saturating_pow(n);
    let p0 = &rf.factors.last().expect("regular forms are nonempty").p;
    let p0_hi = hi_coeffs(p0);
    'shear: for &(num, den) in &SHEARS {
        let lambda = rat(num, den);
        let (f, g) = period_equations(rf, n, &lambda);
        let Ok(el) = eliminate_y(&f, &g) else { continue };
        if el.resultant.degree() != count as i64 {
            continue;
        }
        let (_, parts) = el.resultant.square_free_decomposition();
        let lam = Hi::lit(num as f64) / Hi::lit(den as f64);
        let mut pts = Vec::with_capacity(count as usize);
        for (part, k) in &parts {
            let Some(st) = recover_fiber(part, &f, &g, el.linear.as_ref())? else { continue 'shear };
            for (s, t) in st {
                let y0 = s - t * lam;
                let x0 = t - horner_hi(&p0_hi, y0).0;
                pts.push(([x0, y0], *k));
            }
        }
        return Ok(pts);
    }
    Err(PeriodicError::EliminationDegenerate)
}

/// `fⁿ(p)` and `D(fⁿ)(p)`.
fn iterate_jac(map: &NumMap<Hi>, p: &Point<Hi>, n: u32) -> (Point<Hi>, [[CHi; 2]; 2]) {
    let one = CHi::one();
    let zero = CHi::zero();
    let mut m = [[one, zero], [zero, one]];
    let mut q = *p;
    for _ in 0..n {
        let (q2, j) = map.apply_jac(&q);
        m = mat_mul(&j, &m);
        q = q2;
    }
    (q, m)
}

fn iterate(map: &NumMap<Hi>, p: &Point<Hi>, n: u32) -> Point<Hi> {
    (0..n).fold(*p, |q, _| map.apply(&q))
}

fn residual(map: &NumMap<Hi>, p: &Point<Hi>, n: u32) -> Hi {
    dist(&iterate(map, p, n), p)
}

/// Newton on `fⁿ(p) - p`, keeping only steps that lower the residual.
fn polish(map: &NumMap<Hi>, p: Point<Hi>, n: u32) -> (Point<Hi>, Hi) {
    let mut p = p;
    let mut res = residual(map, &p, n);
    for _ in 0..30 {
        if res == Hi::zero() {
            break;
        }
        let (q, m) = iterate_jac(map, &p, n);
        let g = [q[0] - p[0], q[1] - p[1]];
        let (a, b, c, d) = (m[0][0] - CHi::one(), m[0][1], m[1][0], m[1][1] - CHi::one());
        let det = a * d - b * c;
        if det.norm() == Hi::zero() {
            break;
        }
        let cand = [p[0] - (d * g[0] - b * g[1]) / det, p[1] - (a * g[1] - c * g[0]) / det];
        let r = residual(map, &cand, n);
        if r < res {
            p = cand;
            res = r;
        } else {
            break;
        }
    }
    (p, res)
}

/// Exact check of `f^e(p) = p` when `p` looks rational.
fn exact_rational_period(f: &PolyAuto, p: &Point<Hi>, n: u32) -> Option<u32> {
    let near_real = |z: &CHi| z.im.abs() <= Hi::lit(1e-20) * z.re.abs().max(Hi::one());
    if !near_real(&p[0]) || !near_real(&p[1]) {
        return None;
    }
    let x = rational_candidate(p[0].re.hi(), 1 << 20)?;
    let y = rational_candidate(p[1].re.hi(), 1 << 20)?;
    let start = (x, y);
    let mut q = start.clone();
    for e in 1..=n {
        q = f.apply(&q);
        if q == start {
            return n.is_multiple_of(e).then_some(e);
        }
    }
    None
}

fn exact_period(f: &PolyAuto, map: &NumMap<Hi>, p: &Point<Hi>, n: u32) -> u32 {
    if let Some(e) = exact_rational_period(f, p, n) {
        return e;
    }
    let tol = Hi::lit(PERIOD_TOL) * size(p).max(Hi::one());
    (1..n).filter(|e| n.is_multiple_of(*e)).find(|&e| residual(map, p, e) <= tol).unwrap_or(n)
}

fn point_type(u: f64, s: f64) -> PointType {
    let (hi, lo) = (1.0 + UNIT_MARGIN, 1.0 - UNIT_MARGIN);
    if u > hi && s < lo {
        PointType::Saddle
    } else if u < lo {
        PointType::Sink
    } else if s > hi {
        PointType::Source
    } else {
        PointType::Indifferent
    }
}

/// Eigenvalues of `D(f^e)(p)`. The smaller one is taken as `Jac^e / u`,
/// which is exact in the determinant.
fn multipliers(f: &PolyAuto, map: &NumMap<Hi>, p: &Point<Hi>, e: u32) -> (Complex64, Complex64) {
    let (_, m) = iterate_jac(map, p, e);
    let (big, _) = eig2(&m);
    let jac: Hi = f.jacobian().to_real();
    let det = Complex::new(jac.powi(e as i32), Hi::zero());
    (lo(big), lo(det / big))
}

fn describe(f: &PolyAuto, map: &NumMap<Hi>, p: Point<Hi>, n: u32, multiplicity: u32) -> PeriodicPoint {
    let e = exact_period(f, map, &p, n);
    let (u, s) = multipliers(f, map, &p, e);
    PeriodicPoint {
        point: [lo(p[0]), lo(p[1])],
        period_dividing: n,
        exact_period: e,
        multiplicity,
        multipliers: [u, s],
        kind: point_type(u.norm(), s.norm()),
        residual: residual(map, &p, n).hi(),
        hp: p,
    }
}

fn cmp_point(a: &[Complex64; 2], b: &[Complex64; 2]) -> Ordering {
    a[0].re
        .total_cmp(&b[0].re)
        .then(a[0].im.total_cmp(&b[0].im))
        .then(a[1].re.total_cmp(&b[1].re))
        .then(a[1].im.total_cmp(&b[1].im))
}

/// Merge points closer than [`DEDUP_DIST`], summing multiplicities, and
/// sort by `(Re, Im)` of the coordinates.
fn dedup(mut pts: Vec<(Point<Hi>, u32)>) -> Vec<(Point<Hi>, u32)> {
    pts.sort_by(|a, b| cmp_point(&[lo(a.0[0]), lo(a.0[1])], &[lo(b.0[0]), lo(b.0[1])]));
    let tol = Hi::lit(DEDUP_DIST);
    let mut out: Vec<(Point<Hi>, u32)> = Vec::with_capacity(pts.len());
    for (p, k) in pts {
        let hit = out
            .iter_mut()
            .rev()
            .take_while(|(q, _)| (p[0].re - q[0].re).abs() <= tol)
            .find(|(q, _)| dist(&p, q) <= tol);
        match hit {
            Some((_, m)) => *m += k,
            None => out.push((p, k)),
        }
    }
    out
}

fn check_count(d: u32, n: u32) -> Result<u64, PeriodicError> {
    if n == 0 {
        return Err(PeriodicError::ZeroPeriod);
    }
    let count = (d as u64).checked_pow(n).unwrap_or(u64::MAX);
    if count > MAX_COUNT {
        return Err(PeriodicError::TooLarge(count));
    }
    Ok(count)
}

/// All solutions of `fⁿ(p) = p`, with multiplicities summing to `dⁿ`,
/// sorted by `(Re, Im)`.
pub fn fixed_points_of_iterate(f: &PolyAuto, n: u32) -> Result<Vec<PeriodicPoint>, PeriodicError> {
    let rf = to_regular_form(f)?;
    check_count(rf.degree(), n)?;
    let conj = NumMap::<Hi>::new(rf.conjugator.forward());
    let map = NumMap::<Hi>::new(f.forward());
    let raw = regular_fixed_points(&rf, n)?;
    let polished: Vec<(Point<Hi>, u32)> =
        raw.into_par_iter().map(|(q, k)| (polish(&map, conj.apply(&q), n).0, k)).collect();
    let pts = dedup(polished);
    Ok(pts.into_par_iter().map(|(p, k)| describe(f, &map, p, n, k)).collect())
}

/// Multipliers and type of a point with `‖fⁿ(p) - p‖ <= tol·max(1, ‖p‖)`.
/// The multiplicity field is set to 1.
pub fn classify_point(f: &PolyAuto, p: &[Complex64; 2], n: u32, tol: f64) -> Result<PeriodicPoint, PeriodicError> {
    if n == 0 {
        return Err(PeriodicError::ZeroPeriod);
    }
    let map = NumMap::<Hi>::new(f.forward());
    let p = [up(p[0]), up(p[1])];
    let r = residual(&map, &p, n);
    if r > Hi::lit(tol) * size(&p).max(Hi::one()) {
        return Err(PeriodicError::NotPeriodic(r.hi()));
    }
    Ok(describe(f, &map, p, n, 1))
}

/// `f` together with an involution `sigma` such that `σ⁻¹ f σ = f⁻¹`.
#[derive(Clone, Debug, Serialize)]
pub struct ReversiblePair {
    pub f: PolyAuto,
    pub sigma: PolyAuto,
}

impl ReversiblePair {
    /// Checks both identities exactly.
    pub fn new(f: PolyAuto, sigma: PolyAuto) -> Result<Self, PeriodicError> {
        let involution = sigma.compose(&sigma).forward().is_identity();
        if !involution || f.conjugate_by(&sigma).forward() != f.inverse_map() {
            return Err(PeriodicError::NotReversible);
        }
        Ok(ReversiblePair { f, sigma })
    }
}

/// `f = (P(x) - y, x)` with reversor `σ = (y, x)`.
pub fn make_reversible(p: &QX) -> Result<ReversiblePair, PeriodicError> {
    if p.degree() < 2 {
        return Err(PeriodicError::DegreeTooSmall);
    }
    let (x, y) = (Poly::x(), Poly::y());
    let px = Poly::from_univar_x(p);
    let py = Poly::from_univar_y(p);
    let f = make_auto(PolyMap::new(&px - &y, x.clone()), PolyMap::new(y.clone(), &py - &x))?;
    ReversiblePair::new(f, PolyAuto::swap())
}

#[derive(Clone, Debug, Serialize)]
pub struct DiagonalPoint {
    /// `fⁿ(t, t)`, a point of `Δ ∩ fⁿ(Δ)`.
    pub point: [Complex64; 2],
    pub parameter: Complex64,
    pub multiplicity: u32,
    /// `‖f^{2n}(p) - p‖` in double-double arithmetic.
    pub residual: f64,
    #[serde(skip)]
    hp: Point<Hi>,
}

impl DiagonalPoint {
    pub fn point_hi(&self) -> Point<Hi> {
        self.hp
    }
}

/// `fⁿ(t, t) = (A(t), B(t))` exactly.
pub fn diagonal_image(f: &PolyAuto, n: u32) -> (QX, QX) {
    let fx = f.forward();
    let t = Poly::x();
    let (mut a, mut b) = (t.clone(), t);
    for _ in 0..n {
        let na = fx.x.compose2(&a, &b);
        let nb = fx.y.compose2(&a, &b);
        (a, b) = (na, nb);
    }
    let zero = Rational::zero();
    (a.specialize_y(&zero), b.specialize_y(&zero))
}

/// `(h, h')` at `t` for `h(t) = x - y` of `fⁿ(t, t)`, by iterating the map.
fn diagonal_eval<T: Real>(map: &NumMap<T>, n: u32, t: Complex<T>) -> (Complex<T>, Complex<T>) {
    let mut p = [t, t];
    let mut v = [Complex::<T>::one(), Complex::<T>::one()];
    for _ in 0..n {
        let (q, j) = map.apply_jac(&p);
        v = [j[0][0] * v[0] + j[0][1] * v[1], j[1][0] * v[0] + j[1][1] * v[1]];
        p = q;
    }
    (p[0] - p[1], v[0] - v[1])
}

/// Roots of the diagonal polynomial with multiplicities. The largest
/// square-free part has huge coefficients, so it is refined through the
/// orbit rather than its coefficients.
fn diagonal_roots(rp: &ReversiblePair, n: u32, h: &QX) -> Result<Vec<(CHi, u32)>, PeriodicError> {
    if h.is_zero() {
        return Err(PolyError::ZeroPolynomial.into());
    }
    let (_, parts) = h.square_free_decomposition();
    let big = (0..parts.len()).max_by_key(|&i| parts[i].0.degree()).ok_or(PeriodicError::NotOnDiagonal)?;
    let mut out = Vec::new();
    let mut others: Vec<(Vec<CHi>, u32)> = Vec::new();
    for (i, (g, k)) in parts.iter().enumerate() {
        if i != big {
            out.extend(square_free_roots_hi(g)?.into_iter().map(|z| (z, *k)));
            others.push((hi_coeffs(g), *k));
        }
    }
    let (g, kb) = &parts[big];
    let others64: Vec<(Vec<Complex64>, u32)> =
        others.iter().map(|(cs, k)| (cs.iter().map(|c| lo(*c)).collect(), *k)).collect();
    let map64 = NumMap::<f64>::new(rp.f.forward());
    let map = NumMap::<Hi>::new(rp.f.forward());
    let mut z64: Vec<Complex64> = square_free_roots(g, DEFAULT_POLISH_TOL)?.into_iter().map(|(z, _)| z).collect();
    let kb64 = *kb as f64;
    aberth_with(
        &mut z64,
        |t| {
            let (v, dv) = diagonal_eval(&map64, n, t);
            let mut ld = dv / v;
            for (cs, k) in &others64 {
                let (p, dp) = horner_d(cs, t);
                ld -= dp / p * (*k as f64);
            }
            (Complex64::one(), ld / kb64)
        },
        1e-15,
        5000,
    );
    let mut zs: Vec<CHi> = z64.into_iter().map(up).collect();
    let kbh = Hi::lit(*kb as f64);
    aberth_with(
        &mut zs,
        |t| {
            let (v, dv) = diagonal_eval(&map, n, t);
            let mut ld = dv / v;
            for (cs, k) in &others {
                let (p, dp) = horner_d(cs, t);
                ld -= dp / p * Hi::lit(*k as f64);
            }
            (CHi::one(), ld / kbh)
        },
        Hi::lit(1e-30),
        200,
    );
    out.extend(zs.into_iter().map(|z| (z, *kb)));
    Ok(out)
}

fn horner_d<T: Real>(cs: &[Complex<T>], z: Complex<T>) -> (Complex<T>, Complex<T>) {
    cs.iter().rev().fold((Complex::<T>::zero(), Complex::<T>::zero()), |(p, dp), &c| (p * z + c, dp * z + p))
}

fn diagonal_polynomial(rp: &ReversiblePair, n: u32) -> Result<QX, PeriodicError> {
    if rp.sigma != PolyAuto::swap() {
        return Err(PeriodicError::UnsupportedReversor);
    }
    check_count(rp.f.degree(), n)?;
    let (a, b) = diagonal_image(&rp.f, n);
    Ok(&a - &b)
}

/// Points of `Δ ∩ fⁿ(Δ)` with multiplicities (summing to `dⁿ`), sorted by
/// `(Re, Im)`.
pub fn diagonal_intersections(rp: &ReversiblePair, n: u32) -> Result<Vec<DiagonalPoint>, PeriodicError> {
    let h = diagonal_polynomial(rp, n)?;
    let map = NumMap::<Hi>::new(rp.f.forward());
    let mut out: Vec<DiagonalPoint> = diagonal_roots(rp, n, &h)?
        .into_par_iter()
        .map(|(t, k)| {
            let p = iterate(&map, &[t, t], n);
            DiagonalPoint {
                point: [lo(p[0]), lo(p[1])],
                parameter: lo(t),
                multiplicity: k,
                residual: residual(&map, &p, 2 * n).hi(),
                hp: p,
            }
        })
        .collect();
    out.sort_by(|a, b| cmp_point(&a.point, &b.point));
    Ok(out)
}

/// Intersection multiplicity of `Δ` and `fⁿ(Δ)` at a fixed point `p ∈ Δ`,
/// for each `n` in the range.
pub fn multiplicity_boundedness_probe(
    rp: &ReversiblePair,
    p: &[Complex64; 2],
    ns: impl IntoIterator<Item = u32>,
) -> Result<Vec<u32>, PeriodicError> {
    let [x, y] = *p;
    if (x - y).norm() > 1e-9 * x.norm().max(1.0) {
        return Err(PeriodicError::NotOnDiagonal);
    }
    classify_point(&rp.f, p, 1, 1e-9)?;
    let exact = (x.im == 0.0).then(|| rational_candidate(x.re, 1 << 20)).flatten();
    ns.into_iter()
        .map(|n| {
            let h = diagonal_polynomial(rp, n)?;
            if let Some(r) = exact.as_ref().filter(|r| h.eval(r).is_zero()) {
                let lin = QX::new(vec![-r.clone(), Rational::one()]);
                let (mut q, mut k) = (h, 0);
                while !q.is_zero() && q.eval(r).is_zero() {
                    q = q.div_exact(&lin);
                    k += 1;
                }
                return Ok(k);
            }
            let roots = roots_hi(&h)?;
            Ok(roots.iter().filter(|(t, _)| (lo(*t) - x).norm() <= 1e-6 * x.norm().max(1.0)).map(|&(_, k)| k).sum())
        })
        .collect()
}
