//! Places of ℚ, the product formula, naive heights and the dynamical height
//! of rational points. Finite places only ever see exact valuations of exact
//! rational orbits.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::automorphism::{is_henon_type, PolyAuto};
use crate::green::{Green, Which};
use crate::scalar::{ln_abs_bigint, ln_abs_rational, rational_to_f64};
use crate::Rational;

/// Default cap on the size of exact orbit coordinates.
pub const DEFAULT_MEMORY_CAP: usize = 64 << 20;
/// Extra exact steps used for the finite places of the place sum.
const PLACE_SUM_EXTRA: u32 = 4;
const GREEN_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HeightError {
    #[error("the map is not of Henon type")]
    NotHenonType,
    #[error("exact orbit exceeded the memory cap after {0} steps")]
    OverflowHorizon(u32),
}

/// A place of ℚ.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PlaceQ {
    Archimedean,
    Prime(BigUint),
}

impl PlaceQ {
    pub fn prime(p: u64) -> Self {
        PlaceQ::Prime(BigUint::from(p))
    }
}

impl fmt::Display for PlaceQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlaceQ::Archimedean => write!(f, "inf"),
            PlaceQ::Prime(p) => write!(f, "{p}"),
        }
    }
}

impl Serialize for PlaceQ {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `v_p(n)` for `n ≠ 0`.
fn int_valuation(n: &BigInt, p: &BigUint) -> i64 {
    if n.is_zero() {
        return 0;
    }
    let mut m = n.magnitude().clone();
    if *p == BigUint::from(2u32) {
        return m.trailing_zeros().unwrap_or(0) as i64;
    }
    let mut e = 0;
    loop {
        let (q, r) = m.div_rem(p);
        if !r.is_zero() {
            return e;
        }
        m = q;
        e += 1;
    }
}

/// p-adic valuation of a nonzero rational; `None` for zero.
pub fn valuation(x: &Rational, p: &BigUint) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    Some(int_valuation(x.numer(), p) - int_valuation(x.denom(), p))
}

/// Normalized `|x|_v`, with `|p|_p = 1/p`.
pub fn abs_at_place(x: &Rational, v: &PlaceQ) -> f64 {
    match v {
        PlaceQ::Archimedean => rational_to_f64(x).abs(),
        PlaceQ::Prime(p) => match valuation(x, p) {
            None => 0.0,
            Some(e) => p.to_f64().unwrap_or(f64::INFINITY).powi(-(e as i32)),
        },
    }
}

/// Prime factorization of a positive integer.
pub fn factorize(n: &BigUint) -> BTreeMap<BigUint, u32> {
    if n.is_zero() || n.is_one() {
        return BTreeMap::new();
    }
    let (found, rest) = num_prime::nt_funcs::factors(n.clone(), None);
    let mut out: BTreeMap<BigUint, u32> = found.into_iter().map(|(p, e)| (p, e as u32)).collect();
    // partial factorizations only arise for very large inputs; remaining
    // cofactors are kept as opaque "primes"
    for c in rest.unwrap_or_default() {
        *out.entry(c).or_default() += 1;
    }
    out
}

/// Exact `Σ c_p log p`, keyed by prime.
pub type LogCombo = BTreeMap<BigUint, i64>;

fn add_combo(acc: &mut LogCombo, other: &LogCombo) {
    for (p, c) in other {
        let e = acc.entry(p.clone()).or_default();
        *e += c;
        if *e == 0 {
            acc.remove(p);
        }
    }
}

/// `log|x|_v` as an exact integer combination of logs of primes.
pub fn log_abs_exact(x: &Rational, v: &PlaceQ) -> Option<LogCombo> {
    if x.is_zero() {
        return None;
    }
    Some(match v {
        PlaceQ::Archimedean => {
            let mut out = LogCombo::new();
            for (p, e) in factorize(x.numer().magnitude()) {
                out.insert(p, e as i64);
            }
            for (p, e) in factorize(x.denom().magnitude()) {
                add_combo(&mut out, &LogCombo::from([(p, -(e as i64))]));
            }
            out
        }
        PlaceQ::Prime(p) => match valuation(x, p)? {
            0 => LogCombo::new(),
            e => LogCombo::from([(p.clone(), -e)]),
        },
    })
}

/// Places where `|x|_v ≠ 1`.
pub fn nontrivial_places(x: &Rational) -> Vec<PlaceQ> {
    let mut out = vec![PlaceQ::Archimedean];
    let mut ps: Vec<BigUint> = factorize(x.numer().magnitude()).into_keys().collect();
    ps.extend(factorize(x.denom().magnitude()).into_keys());
    ps.sort();
    out.extend(ps.into_iter().map(PlaceQ::Prime));
    out
}

/// `Σ_v log|x|_v` in exact bookkeeping; empty for every nonzero `x`.
pub fn product_formula_residual(x: &Rational) -> Option<LogCombo> {
    let mut acc = LogCombo::new();
    for v in nontrivial_places(x) {
        add_combo(&mut acc, &log_abs_exact(x, &v)?);
    }
    Some(acc)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeightValue {
    pub value: f64,
    pub error_bound: f64,
    pub local_contributions: BTreeMap<PlaceQ, f64>,
}

impl HeightValue {
    fn from_parts(local_contributions: BTreeMap<PlaceQ, f64>, error_bound: f64) -> Self {
        let value = local_contributions.values().sum();
        HeightValue { value, error_bound, local_contributions }
    }

    fn zero() -> Self {
        HeightValue { value: 0.0, error_bound: 0.0, local_contributions: BTreeMap::new() }
    }
}

/// `log⁺ max_i |x_i|_v`.
fn log_plus_at(x: &[Rational], v: &PlaceQ) -> f64 {
    match v {
        PlaceQ::Archimedean => x.iter().filter(|c| !c.is_zero()).map(ln_abs_rational).fold(0.0, f64::max),
        PlaceQ::Prime(p) => {
            let worst = x.iter().filter_map(|c| valuation(c, p)).min().unwrap_or(0);
            (-worst).max(0) as f64 * p.to_f64().unwrap_or(f64::INFINITY).ln()
        }
    }
}

fn lcm_denominator(x: &[Rational]) -> BigInt {
    x.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()))
}

/// Primes where some coordinate has `|x_i|_p > 1`, with `known` primes
/// divided out before factoring the rest of the common denominator.
fn denominator_primes(x: &[Rational], known: &[BigUint]) -> Vec<BigUint> {
    let mut m = lcm_denominator(x).magnitude().clone();
    let mut out = Vec::new();
    for p in known {
        if m.is_multiple_of(p) {
            out.push(p.clone());
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
    }
    out.extend(factorize(&m).into_keys());
    out.sort();
    out.dedup();
    out
}

fn naive_height_over(x: &[Rational], known: &[BigUint]) -> HeightValue {
    let mut local = BTreeMap::new();
    local.insert(PlaceQ::Archimedean, log_plus_at(x, &PlaceQ::Archimedean));
    for p in denominator_primes(x, known) {
        let v = PlaceQ::Prime(p);
        let h = log_plus_at(x, &v);
        local.insert(v, h);
    }
    HeightValue::from_parts(local, 0.0)
}

/// Weil height `Σ_v log⁺ max_i |x_i|_v` of a rational point of affine space.
pub fn naive_height(x: &[Rational]) -> HeightValue {
    naive_height_over(x, &[])
}

/// `Π_v max(1, max_i |x_i|_v)` assembled place by place in exact arithmetic.
pub fn multiplicative_height(x: &[Rational]) -> Rational {
    let inf = x.iter().map(|c| c.abs()).fold(Rational::one(), |a, b| if b > a { b } else { a });
    let mut h = inf;
    for p in denominator_primes(x, &[]) {
        let worst = x.iter().filter_map(|c| valuation(c, &p)).min().unwrap_or(0);
        let pp = BigInt::from_biguint(Sign::Plus, p);
        h *= Rational::from_integer(num_traits::pow(pp, (-worst).max(0) as usize));
    }
    h
}

/// Closed form `max(|a_1|, …, |a_k|, c)` where `x = (a_1/c, …, a_k/c)` in
/// lowest terms; the naive height is its logarithm.
pub fn lcm_height(x: &[Rational]) -> BigInt {
    let c = lcm_denominator(x);
    x.iter().map(|q| (q.numer() * (&c / q.denom())).abs()).fold(c.clone(), |a, b| if b > a { b } else { a })
}

/// Options for exact orbit computations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HeightOptions {
    /// Bytes allowed for the coordinates of one orbit point.
    pub memory_cap: usize,
}

impl Default for HeightOptions {
    fn default() -> Self {
        HeightOptions { memory_cap: DEFAULT_MEMORY_CAP }
    }
}

type QPoint = (Rational, Rational);

fn point_bytes(q: &QPoint) -> usize {
    [q.0.numer(), q.0.denom(), q.1.numer(), q.1.denom()].iter().map(|n| n.bits() as usize / 8 + 1).sum()
}

/// Exact orbit `q_0 = p, …, q_n` under `f` (or `f⁻¹`), stopping early when
/// it closes up.
struct Orbit {
    points: Vec<QPoint>,
    period: Option<usize>,
}

fn exact_orbit(f: &PolyAuto, p: &QPoint, n: u32, backward: bool, opts: HeightOptions) -> Result<Orbit, HeightError> {
    let mut points = vec![p.clone()];
    for k in 1..=n {
        let q = points.last().unwrap();
        let next = if backward { f.apply_inverse(q) } else { f.apply(q) };
        if next == *p {
            return Ok(Orbit { points, period: Some(k as usize) });
        }
        if point_bytes(&next) > opts.memory_cap {
            return Err(HeightError::OverflowHorizon(k - 1));
        }
        points.push(next);
    }
    Ok(Orbit { points, period: None })
}

/// Places that can carry a nonzero local Green function: ∞ and the primes
/// dividing a denominator of `p` or of a coefficient of `f` or `f⁻¹`.
pub fn support_places(f: &PolyAuto, p: &QPoint) -> Vec<PlaceQ> {
    let mut den = lcm_denominator(&[p.0.clone(), p.1.clone()]);
    for c in f.coefficients() {
        den = den.lcm(c.denom());
    }
    let mut out = vec![PlaceQ::Archimedean];
    out.extend(factorize(den.magnitude()).into_keys().map(PlaceQ::Prime));
    out
}

fn support_primes(places: &[PlaceQ]) -> Vec<BigUint> {
    places
        .iter()
        .filter_map(|v| match v {
            PlaceQ::Prime(p) => Some(p.clone()),
            PlaceQ::Archimedean => None,
        })
        .collect()
}

fn log_plus_point(q: &QPoint, v: &PlaceQ) -> f64 {
    log_plus_at(&[q.0.clone(), q.1.clone()], v)
}

/// Largest `|L_{k+1} − d L_k|` along an orbit, `L_k = log⁺‖q_k‖_v`.
fn step_defect(orbit: &Orbit, v: &PlaceQ, d: f64) -> f64 {
    let ls: Vec<f64> = orbit.points.iter().map(|q| log_plus_point(q, v)).collect();
    ls.windows(2).map(|w| (w[1] - d * w[0]).abs()).fold(0.0, f64::max)
}

/// `d^{-n} log⁺‖f^{±n}(p)‖_v` in exact arithmetic. Zero outside the support
/// set and on periodic points.
pub fn local_green(
    f: &PolyAuto,
    p: &QPoint,
    v: &PlaceQ,
    n: u32,
    which: Which,
    opts: HeightOptions,
) -> Result<f64, HeightError> {
    if !is_henon_type(f) {
        return Err(HeightError::NotHenonType);
    }
    if !support_places(f, p).contains(v) {
        return Ok(0.0);
    }
    let d = f.degree() as f64;
    let one = |backward: bool| -> Result<f64, HeightError> {
        let orbit = exact_orbit(f, p, n, backward, opts)?;
        if orbit.period.is_some() {
            return Ok(0.0);
        }
        Ok(log_plus_point(orbit.points.last().unwrap(), v) / d.powi(n as i32))
    };
    Ok(match which {
        Which::Plus => one(false)?,
        Which::Minus => one(true)?,
        Which::Max => one(false)?.max(one(true)?),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DynHeight {
    pub n: u32,
    /// `d^{-n} h_naive(fⁿ(p), f⁻ⁿ(p))`, split by place.
    pub lee: HeightValue,
    /// `Σ_v max(G⁺_v, G⁻_v)` with the archimedean term from the Green
    /// function evaluator.
    pub place_sum: HeightValue,
    pub gap: f64,
    pub agree: bool,
    /// Constant `C` of the bound `C d^{-n} / (d − 1)`.
    pub constant: f64,
    /// `Σ_v d^{-n} log⁺‖fⁿ(p)‖_v` and `Σ_v d^{-n} log⁺‖f⁻ⁿ(p)‖_v`.
    pub plus: f64,
    pub minus: f64,
    /// Exact period when the orbit closes up; the height is then 0.
    pub period: Option<usize>,
}

impl DynHeight {
    /// Certified lower bound from the Lee estimate.
    pub fn lower_bound(&self) -> f64 {
        (self.lee.value - self.lee.error_bound).max(0.0)
    }
}

/// Dynamical height through Lee's limit, with the place-by-place sum as an
/// independent second route.
pub fn dyn_height(f: &PolyAuto, p: &QPoint, n: u32, opts: HeightOptions) -> Result<DynHeight, HeightError> {
    if !is_henon_type(f) {
        return Err(HeightError::NotHenonType);
    }
    let d = f.degree() as f64;
    let fwd = exact_orbit(f, p, n, false, opts)?;
    if let Some(k) = fwd.period {
        return Ok(DynHeight {
            n,
            lee: HeightValue::zero(),
            place_sum: HeightValue::zero(),
            gap: 0.0,
            agree: true,
            constant: 0.0,
            plus: 0.0,
            minus: 0.0,
            period: Some(k),
        });
    }
    let bwd = exact_orbit(f, p, n, true, opts)?;
    let places = support_places(f, p);
    let primes = support_primes(&places);
    let green = Green::<f64>::new(f).ok();
    let filtration_c = green.as_ref().map(|g| d * g.filtration().expansion_constant).unwrap_or(0.0);

    let scale = d.powi(n as i32);
    let (qf, qb) = (fwd.points.last().unwrap(), bwd.points.last().unwrap());
    let phi = [qf.0.clone(), qf.1.clone(), qb.0.clone(), qb.1.clone()];
    let raw = naive_height_over(&phi, &primes);
    let constant =
        places.iter().map(|v| step_defect(&fwd, v, d).max(step_defect(&bwd, v, d))).fold(filtration_c, f64::max);
    let tail = |m: u32| constant / ((d - 1.0) * d.powi(m as i32));
    let plus = places.iter().map(|v| log_plus_point(qf, v)).sum::<f64>() / scale;
    let minus = places.iter().map(|v| log_plus_point(qb, v)).sum::<f64>() / scale;
    let lee =
        HeightValue::from_parts(raw.local_contributions.into_iter().map(|(v, h)| (v, h / scale)).collect(), tail(n));

    let mut local = BTreeMap::new();
    let mut bound = 0.0;
    for v in &places {
        let arch = match (v, &green) {
            (PlaceQ::Archimedean, Some(g)) => {
                let x = [Complex64::new(rational_to_f64(&p.0), 0.0), Complex64::new(rational_to_f64(&p.1), 0.0)];
                match (g.green_plus(&x, GREEN_TOL), g.green_minus(&x, GREEN_TOL)) {
                    (Ok(a), Ok(b)) => Some((a.value.max(b.value), a.error_bound.max(b.error_bound) + 1e-12)),
                    _ => None,
                }
            }
            _ => None,
        };
        let (g, e) = match arch {
            Some(ge) => ge,
            None => {
                // deeper exact horizon, falling back to n under the cap
                let deep = n + PLACE_SUM_EXTRA;
                let m = [deep, n].into_iter().find(|&m| local_green(f, p, v, m, Which::Max, opts).is_ok()).unwrap_or(n);
                (local_green(f, p, v, m, Which::Max, opts)?, tail(m))
            }
        };
        local.insert(v.clone(), g);
        bound += e;
    }
    let place_sum = HeightValue::from_parts(local, bound);
    let gap = (lee.value - place_sum.value).abs();
    let agree = gap <= lee.error_bound + place_sum.error_bound;
    Ok(DynHeight { n, lee, place_sum, gap, agree, constant, plus, minus, period: None })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Periodicity {
    Periodic { period: usize },
    PositiveHeight { lower_bound: f64 },
    Undecided { estimate: f64, error_bound: f64 },
}

/// Decides periodicity from an exact cycle or a positive height bound
/// within `n_max` steps.
pub fn periodicity_from_height(
    f: &PolyAuto,
    p: &QPoint,
    threshold: f64,
    n_max: u32,
    opts: HeightOptions,
) -> Result<Periodicity, HeightError> {
    let mut n = n_max;
    let h = loop {
        match dyn_height(f, p, n, opts) {
            Ok(h) => break h,
            Err(HeightError::OverflowHorizon(k)) if k < n && k > 0 => n = k,
            Err(e) => return Err(e),
        }
    };
    Ok(match h.period {
        Some(period) => Periodicity::Periodic { period },
        None if h.lower_bound() > threshold => Periodicity::PositiveHeight { lower_bound: h.lower_bound() },
        None => Periodicity::Undecided { estimate: h.lee.value, error_bound: h.lee.error_bound },
    })
}

/// `log max(|a_i|, c)` of [`lcm_height`] in floating point.
pub fn lcm_height_ln(x: &[Rational]) -> f64 {
    ln_abs_bigint(&lcm_height(x))
}
