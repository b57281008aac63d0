//! Local dynamics at a saddle cycle: power series of the stable and unstable
//! manifolds, Green functions restricted to them, Hölder exponents of those
//! restrictions and the renormalization probe in adapted coordinates.
//!
//! For a saddle of period `k` everything is expressed for `g = f^k`.

use num_complex::Complex;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automorphism::PolyAuto;
use crate::green::{Green, GreenError, GreenValue, Which};
use crate::numeric::{eig2, mat_mul, norm_max, NumAuto, Point};
use crate::periodic::SaddleData;
use crate::scalar::{Hi, Real};

/// `|λᵏ − μ|` below this is treated as a resonance.
pub const RESONANCE_TOL: f64 = 1e-12;
pub const DEFAULT_ORDER: usize = 20;
/// Angles sampled per circle in the Hölder regression.
pub const HOLDER_ANGLES: usize = 256;
pub const MIN_RADII: usize = 8;
const RADIUS_SAMPLES: usize = 32;
const NEWTON_STEPS: usize = 60;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LocalError {
    #[error("resonance at order {0}: |lambda^k - mu| is below threshold")]
    Resonance(usize),
    #[error("series order must be at least 1")]
    BadOrder,
    #[error("|zeta| = {0} exceeds the validated radius {1}")]
    OutsideRadius(f64, f64),
    #[error("every sampled value is below the noise floor")]
    DegenerateData,
    #[error("at least {MIN_RADII} radii are required, got {0}")]
    TooFewRadii(usize),
    #[error("orbit left the adapted chart at step {0}")]
    ChartOverflow(u32),
    #[error(transparent)]
    Green(#[from] GreenError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Stable,
    Unstable,
}

type Mat<T> = [[Complex<T>; 2]; 2];

fn from_hi<T: Real>(h: Hi) -> T {
    T::lit(h.hi()) + T::lit(h.lo())
}

fn f64_of<T: Real>(v: T) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

fn norm2<T: Real>(p: &Point<T>) -> T {
    (p[0].norm_sqr() + p[1].norm_sqr()).sqrt()
}

/// `f^period` with its inverse.
#[derive(Clone, Debug)]
struct Cycle<T> {
    auto: NumAuto<T>,
    period: u32,
}

impl<T: Real> Cycle<T> {
    fn new(f: &PolyAuto, period: u32) -> Self {
        Cycle { auto: NumAuto::new(f), period: period.max(1) }
    }

    fn forward(&self, p: &Point<T>) -> Point<T> {
        self.auto.iterate(p, self.period as i64)
    }

    fn jac(&self, p: &Point<T>) -> (Point<T>, Mat<T>) {
        let one = Complex::<T>::one();
        let zero = Complex::<T>::zero();
        let mut m = [[one, zero], [zero, one]];
        let mut q = *p;
        for _ in 0..self.period {
            let (q2, j) = self.auto.forward.apply_jac(&q);
            m = mat_mul(&j, &m);
            q = q2;
        }
        (q, m)
    }

    fn series(&self, s: &[Vec<Complex<T>>; 2]) -> [Vec<Complex<T>>; 2] {
        (0..self.period).fold(s.clone(), |acc, _| self.auto.forward.apply_series(&acc))
    }
}

fn solve2<T: Real>(a: &Mat<T>, r: &Point<T>) -> Point<T> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    [(a[1][1] * r[0] - a[0][1] * r[1]) / det, (a[0][0] * r[1] - a[1][0] * r[0]) / det]
}

/// Unit eigenvector of `j` for `lam`, phase fixed so its largest entry is
/// real and positive.
fn eigvec<T: Real>(j: &Mat<T>, lam: Complex<T>) -> Point<T> {
    let a = [j[0][1], lam - j[0][0]];
    let b = [lam - j[1][1], j[1][0]];
    let v = if norm2(&a) >= norm2(&b) { a } else { b };
    let big = if v[0].norm_sqr() >= v[1].norm_sqr() { v[0] } else { v[1] };
    // not Complex::norm: hypot is only double accurate for double-double
    let phase = big / Complex::from(big.norm_sqr().sqrt());
    let n = norm2(&v);
    [v[0] / phase / n, v[1] / phase / n]
}

/// Power series `φ(ζ) = base + Σ c_k ζᵏ` of an invariant manifold with
/// `g(φ(ζ)) = φ(λζ)`.
#[derive(Clone, Debug, Serialize)]
pub struct ManifoldSeries<T> {
    pub side: Side,
    pub eigenvalue: Complex<T>,
    /// The other multiplier of the cycle.
    pub other: Complex<T>,
    pub base: Point<T>,
    /// `c_1, …, c_N`.
    pub coefficients: Vec<Point<T>>,
    pub order: usize,
    pub period: u32,
    /// Largest coefficient of `g∘φ − φ(λ·)` through order `N`, relative to
    /// the size of the terms.
    pub residual: T,
    /// Radius on which the sampled functional-equation residual stays small.
    pub radius: T,
}

impl<T: Real> ManifoldSeries<T> {
    pub fn eval(&self, z: Complex<T>) -> Point<T> {
        let mut acc = [Complex::<T>::zero(); 2];
        for c in self.coefficients.iter().rev() {
            acc = [(acc[0] + c[0]) * z, (acc[1] + c[1]) * z];
        }
        [acc[0] + self.base[0], acc[1] + self.base[1]]
    }

    pub fn derivative(&self, z: Complex<T>) -> Point<T> {
        let mut acc = [Complex::<T>::zero(); 2];
        for (k, c) in self.coefficients.iter().enumerate().rev() {
            let kk = T::lit((k + 1) as f64);
            acc = [acc[0] * z + c[0] * kk, acc[1] * z + c[1] * kk];
        }
        acc
    }

    /// `φ(ζ)` for any `ζ`: pull `ζ` into the validated disk with the
    /// functional equation and push the point back with the map.
    pub fn eval_global(&self, auto: &NumAuto<T>, z: Complex<T>) -> Point<T> {
        let shrink = match self.side {
            Side::Unstable => Complex::<T>::one() / self.eigenvalue,
            Side::Stable => self.eigenvalue,
        };
        let mut w = z;
        let mut m = 0i64;
        while w.norm() > self.radius && m < 100_000 {
            w = w * shrink;
            m += 1;
        }
        let steps = m * self.period as i64;
        let p = self.eval(w);
        match self.side {
            Side::Unstable => auto.iterate(&p, steps),
            Side::Stable => auto.iterate(&p, -steps),
        }
    }

    fn sampled_residual(&self, cyc: &Cycle<T>, r: T) -> T {
        (0..RADIUS_SAMPLES)
            .map(|k| {
                let th = T::lit(std::f64::consts::TAU * k as f64 / RADIUS_SAMPLES as f64);
                let z = Complex::from_polar(r, th);
                let a = cyc.forward(&self.eval(z));
                let b = self.eval(z * self.eigenvalue);
                norm_max(&[a[0] - b[0], a[1] - b[1]])
            })
            .fold(T::zero(), |m, v| if v.is_nan() { T::infinity() } else { m.max(v) })
    }

    /// Largest `k` for which `‖g^k(φ(ζ)) − base‖` can be resolved in this
    /// precision: rounding in the expanding direction grows like
    /// `ε |other|^k` against a signal `|ζ| |λ|^k`.
    pub fn contraction_horizon(&self, z: T) -> u32 {
        let ratio = (self.other.norm() / self.eigenvalue.norm()).ln();
        let budget = (z * T::lit(1e-3) / T::eps()).ln();
        if ratio <= T::zero() || budget <= T::zero() {
            return 0;
        }
        f64_of(budget / ratio).floor().max(0.0) as u32
    }
}

/// Power series of the stable or unstable manifold of a saddle cycle,
/// solved order by order from the functional equation.
pub fn manifold_series<T: Real>(
    f: &PolyAuto,
    saddle: &SaddleData,
    side: Side,
    order: usize,
) -> Result<ManifoldSeries<T>, LocalError> {
    if order == 0 {
        return Err(LocalError::BadOrder);
    }
    let cyc = Cycle::<T>::new(f, saddle.period());
    let hp = saddle.base.point_hi();
    let base: Point<T> =
        [Complex::new(from_hi(hp[0].re), from_hi(hp[0].im)), Complex::new(from_hi(hp[1].re), from_hi(hp[1].im))];
    let (_, j) = cyc.jac(&base);
    let (big, small) = eig2(&j);
    let (lam, mu) = match side {
        Side::Unstable => (big, small),
        Side::Stable => (small, big),
    };
    let v = eigvec(&j, lam);
    let mut phi = [vec![base[0], v[0]], vec![base[1], v[1]]];
    let mut lk = lam;
    for k in 2..=order {
        lk = lk * lam;
        if (lk - mu).norm() < T::lit(RESONANCE_TOL) {
            return Err(LocalError::Resonance(k));
        }
        phi[0].push(Complex::zero());
        phi[1].push(Complex::zero());
        let img = cyc.series(&phi);
        let a = [[j[0][0] - lk, j[0][1]], [j[1][0], j[1][1] - lk]];
        let c = solve2(&a, &[-img[0][k], -img[1][k]]);
        phi[0][k] = c[0];
        phi[1][k] = c[1];
    }
    let img = cyc.series(&phi);
    let mut scale = T::one();
    let mut worst = T::zero();
    let mut lk = Complex::<T>::one();
    for k in 1..=order {
        lk = lk * lam;
        let c = [phi[0][k], phi[1][k]];
        scale = scale.max(lk.norm() * norm_max(&c));
        worst = worst.max(norm_max(&[img[0][k] - lk * c[0], img[1][k] - lk * c[1]]));
    }
    let mut ms = ManifoldSeries {
        side,
        eigenvalue: lam,
        other: mu,
        base,
        coefficients: (1..=order).map(|k| [phi[0][k], phi[1][k]]).collect(),
        order,
        period: cyc.period,
        residual: worst / scale,
        radius: T::zero(),
    };
    let tol = T::lit(1e-10).max(T::eps() * T::lit(1e3)) * (T::one() + norm_max(&base));
    let mut r = T::lit(4.0);
    let floor = T::lit(1e-6);
    while r > floor && !(ms.sampled_residual(&cyc, r) <= tol) {
        r = r / T::lit(2.0);
    }
    ms.radius = r;
    Ok(ms)
}

fn which(side: Side) -> Which {
    match side {
        Side::Unstable => Which::Plus,
        Side::Stable => Which::Minus,
    }
}

/// `G⁺∘φ_u` or `G⁻∘φ_s` at a parameter inside the validated disk.
pub fn green_on_manifold<T: Real>(
    green: &Green<T>,
    ms: &ManifoldSeries<T>,
    z: Complex<T>,
    tol: T,
) -> Result<GreenValue<T>, LocalError> {
    if z.norm() > ms.radius {
        return Err(LocalError::OutsideRadius(f64_of(z.norm()), f64_of(ms.radius)));
    }
    Ok(green.eval(which(ms.side), &ms.eval(z), tol)?)
}

/// Sup of the manifold Green function on the circle `|ζ| = r`. Samples
/// that fail to certify count as 0.
fn circle_sup<T: Real>(green: &Green<T>, auto: &NumAuto<T>, ms: &ManifoldSeries<T>, r: T, tol: T) -> T {
    (0..HOLDER_ANGLES)
        .into_par_iter()
        .map(|k| {
            let th = T::lit(std::f64::consts::TAU * k as f64 / HOLDER_ANGLES as f64);
            let p = ms.eval_global(auto, Complex::from_polar(r, th));
            green.eval(which(ms.side), &p, tol).map(|g| g.value).unwrap_or(T::zero())
        })
        .reduce(T::zero, |a, b| a.max(b))
}

#[derive(Clone, Debug, Serialize)]
pub struct HolderEstimate {
    pub exponent: f64,
    pub intercept: f64,
    pub r_range: (f64, f64),
    /// Root mean square residual of the fit in log space.
    pub regression_residual: f64,
    pub predicted: f64,
    pub radii_used: usize,
    /// Largest radii discarded because their residual dominated the fit.
    pub dropped: usize,
    /// `(r, sup_{|ζ|=r} g)` for every radius given.
    pub samples: Vec<(f64, f64)>,
}

/// `r_max · 2^{-j}` for `j = 0 … count-1`.
pub fn dyadic_radii<T: Real>(r_max: T, count: usize) -> Vec<T> {
    (0..count).map(|j| r_max / T::lit(2f64.powi(j as i32))).collect()
}

fn least_squares(pts: &[(f64, f64)]) -> (f64, f64, Vec<f64>) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let res = pts.iter().map(|p| p.1 - icpt - slope * p.0).collect();
    (slope, icpt, res)
}

/// Regression exponent of `log sup_{|ζ|≤r} g(ζ)` against `log r`, where `g`
/// is `G⁺` along the unstable manifold or `G⁻` along the stable one.
pub fn holder_exponent<T: Real>(
    f: &PolyAuto,
    saddle: &SaddleData,
    side: Side,
    radii: &[T],
    tol: T,
) -> Result<HolderEstimate, LocalError> {
    if radii.len() < MIN_RADII {
        return Err(LocalError::TooFewRadii(radii.len()));
    }
    let green = Green::<T>::new(f)?;
    let auto = NumAuto::<T>::new(f);
    let ms = manifold_series::<T>(f, saddle, side, DEFAULT_ORDER)?;
    // g is subharmonic in ζ, so the sup over the disk is attained on the circle
    let samples: Vec<(f64, f64)> =
        radii.iter().map(|&r| (f64_of(r), f64_of(circle_sup(&green, &auto, &ms, r, tol)))).collect();
    let floor = 10.0 * f64_of(tol);
    let mut pts: Vec<(f64, f64)> = samples.iter().filter(|s| s.1 > floor).map(|s| (s.0.ln(), s.1.ln())).collect();
    if pts.len() < MIN_RADII {
        return Err(LocalError::DegenerateData);
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (mut slope, mut icpt, mut res) = least_squares(&pts);
    let mut dropped = 0;
    let ssr: f64 = res.iter().map(|r| r * r).sum();
    let top: f64 = res[res.len() - 2..].iter().map(|r| r * r).sum();
    if pts.len() >= MIN_RADII + 2 && top > 0.5 * ssr {
        pts.truncate(pts.len() - 2);
        (slope, icpt, res) = least_squares(&pts);
        dropped = 2;
    }
    let rms = (res.iter().map(|r| r * r).sum::<f64>() / res.len() as f64).sqrt();
    let k = ms.period as f64;
    let d = f.degree() as f64;
    let rate = match side {
        Side::Unstable => f64_of(ms.eigenvalue.norm()).ln(),
        Side::Stable => -f64_of(ms.eigenvalue.norm()).ln(),
    };
    Ok(HolderEstimate {
        exponent: slope,
        intercept: icpt,
        r_range: (pts[0].0.exp(), pts[pts.len() - 1].0.exp()),
        regression_residual: rms,
        predicted: k * d.ln() / rate,
        radii_used: pts.len(),
        dropped,
        samples,
    })
}

/// Finite-order adapted coordinates at a saddle cycle: `Φ(ξ, η) = φ_u(ξ) +
/// φ_s(η) − base` straightens both manifolds and makes `g` linear along
/// them; the rescaling `ξ' = ξ ψ(η)` with `ψ(η) = Π a₁(sʲη)/u` makes the
/// `ξ`-multiplier equal to `u` along the whole stable axis.
#[derive(Clone, Debug)]
pub struct AdaptedChart<T> {
    pub unstable: ManifoldSeries<T>,
    pub stable: ManifoldSeries<T>,
    pub radius: T,
    cycle: Cycle<T>,
}

impl<T: Real> AdaptedChart<T> {
    pub fn new(f: &PolyAuto, saddle: &SaddleData, order: usize) -> Result<Self, LocalError> {
        let unstable = manifold_series::<T>(f, saddle, Side::Unstable, order)?;
        let stable = manifold_series::<T>(f, saddle, Side::Stable, order)?;
        let radius = unstable.radius.min(stable.radius);
        Ok(AdaptedChart { unstable, stable, radius, cycle: Cycle::new(f, saddle.period()) })
    }

    pub fn order(&self) -> usize {
        self.unstable.order
    }

    fn phi(&self, xi: Complex<T>, eta: Complex<T>) -> Point<T> {
        let a = self.unstable.eval(xi);
        let b = self.stable.eval(eta);
        let o = self.unstable.base;
        [a[0] + b[0] - o[0], a[1] + b[1] - o[1]]
    }

    fn dphi(&self, xi: Complex<T>, eta: Complex<T>) -> Mat<T> {
        let a = self.unstable.derivative(xi);
        let b = self.stable.derivative(eta);
        [[a[0], b[0]], [a[1], b[1]]]
    }

    /// Unnormalized chart coordinates of `p` by Newton from `guess`.
    fn invert(&self, p: &Point<T>, guess: (Complex<T>, Complex<T>)) -> Option<(Complex<T>, Complex<T>)> {
        let (mut xi, mut eta) = guess;
        let tol = T::eps() * T::lit(64.0);
        for _ in 0..NEWTON_STEPS {
            let q = self.phi(xi, eta);
            let r = [q[0] - p[0], q[1] - p[1]];
            let step = solve2(&self.dphi(xi, eta), &r);
            xi = xi - step[0];
            eta = eta - step[1];
            if !(xi.norm() <= self.radius && eta.norm() <= self.radius) {
                return None;
            }
            if norm_max(&step) <= tol * (T::one() + xi.norm().max(eta.norm())) {
                let q = self.phi(xi, eta);
                let r = norm_max(&[q[0] - p[0], q[1] - p[1]]);
                return (r <= T::lit(1e3) * T::eps() * (T::one() + norm_max(p))).then_some((xi, eta));
            }
        }
        None
    }

    /// Multiplier of `g` in the `ξ` direction at `(0, η)`.
    fn a1(&self, eta: Complex<T>) -> Complex<T> {
        let (_, j) = self.cycle.jac(&self.phi(Complex::zero(), eta));
        let c = self.unstable.coefficients[0];
        let col = [j[0][0] * c[0] + j[0][1] * c[1], j[1][0] * c[0] + j[1][1] * c[1]];
        solve2(&self.dphi(Complex::zero(), eta * self.stable.eigenvalue), &col)[0]
    }

    pub fn psi(&self, eta: Complex<T>) -> Complex<T> {
        let u = self.unstable.eigenvalue;
        let s = self.stable.eigenvalue;
        let mut prod = Complex::<T>::one();
        let mut e = eta;
        for _ in 0..400 {
            let fct = self.a1(e) / u;
            prod = prod * fct;
            if (fct - Complex::one()).norm() <= T::eps() {
                break;
            }
            e = e * s;
        }
        prod
    }

    /// Point with adapted coordinates `(ξ', η)`.
    pub fn to_point(&self, xi: Complex<T>, eta: Complex<T>) -> Point<T> {
        self.phi(xi / self.psi(eta), eta)
    }

    /// Adapted coordinates of `p`, or `None` outside the chart.
    pub fn coords(&self, p: &Point<T>, guess: (Complex<T>, Complex<T>)) -> Option<(Complex<T>, Complex<T>)> {
        let (xi, eta) = self.invert(p, guess)?;
        Some((xi * self.psi(eta), eta))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RenormRow {
    pub x: f64,
    pub y0: f64,
    pub n: u32,
    /// Adapted-coordinate distance from `gⁿ(x/uⁿ, y₀)` to the linear
    /// model `(x, sⁿ y₀)`.
    pub deviation: f64,
    /// Distance to `(x, 0)`.
    pub distance: f64,
    /// `n ρⁿ`.
    pub envelope: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RenormTable {
    pub rows: Vec<RenormRow>,
    pub rho: f64,
    pub chart_order: usize,
    pub chart_radius: f64,
    /// Chart round-trip roundoff; deviations below it are not resolved.
    pub noise_floor: f64,
}

impl RenormTable {
    /// Smallest `K` with `deviation ≤ K n ρⁿ` on the rows with `1 ≤ n ≤ n_fit`.
    pub fn fit_constant(&self, n_fit: u32) -> f64 {
        self.rows.iter().filter(|r| r.n >= 1 && r.n <= n_fit).map(|r| r.deviation / r.envelope).fold(0.0, f64::max)
    }

    pub fn within_envelope(&self, k: f64) -> bool {
        self.rows.iter().all(|r| r.deviation <= k * r.envelope + self.noise_floor)
    }

    /// Deviations strictly decrease in `n` for `n ≥ n0` at every grid point.
    pub fn monotone_beyond(&self, n0: u32) -> bool {
        let mut rows: Vec<&RenormRow> = self.rows.iter().filter(|r| r.n >= n0).collect();
        rows.sort_by(|a, b| (a.x, a.y0, a.n).partial_cmp(&(b.x, b.y0, b.n)).unwrap());
        rows.windows(2).all(|w| w[0].x != w[1].x || w[0].y0 != w[1].y0 || w[1].deviation < w[0].deviation)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,y0,n,deviation,distance,envelope\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{:.17e},{:.17e},{},{:.17e},{:.17e},{:.17e}\n",
                r.x, r.y0, r.n, r.deviation, r.distance, r.envelope
            ));
        }
        s
    }
}

/// `gⁿ(x/uⁿ, y₀)` in adapted coordinates compared with `(x, 0)` over the
/// grid `xs × y0s × ns`.
pub fn renorm_probe<T: Real>(
    f: &PolyAuto,
    saddle: &SaddleData,
    xs: &[T],
    y0s: &[T],
    ns: &[u32],
    order: usize,
) -> Result<RenormTable, LocalError> {
    let chart = AdaptedChart::<T>::new(f, saddle, order)?;
    let u = chart.unstable.eigenvalue;
    let s = chart.stable.eigenvalue;
    let rho = (T::one() / u.norm()).max(s.norm());
    let grid: Vec<(T, T, u32)> =
        xs.iter().flat_map(|&x| y0s.iter().flat_map(move |&y| ns.iter().map(move |&n| (x, y, n)))).collect();
    let rows: Result<Vec<RenormRow>, LocalError> = grid
        .par_iter()
        .map(|&(x, y0, n)| {
            if x.abs() > chart.radius || y0.abs() > chart.radius {
                return Err(LocalError::ChartOverflow(0));
            }
            let (xc, yc) = (Complex::from(x), Complex::from(y0));
            let xi0 = xc / u.powu(n);
            let mut p = chart.to_point(xi0, yc);
            let mut cur = (xi0 / chart.psi(yc), yc);
            for step in 1..=n {
                p = chart.cycle.forward(&p);
                cur = chart.invert(&p, (cur.0 * u, cur.1 * s)).ok_or(LocalError::ChartOverflow(step))?;
            }
            let xi = cur.0 * chart.psi(cur.1);
            let dx = (xi - xc).norm();
            let deviation = dx.max((cur.1 - yc * s.powu(n)).norm());
            let distance = dx.max(cur.1.norm());
            Ok(RenormRow {
                x: f64_of(x),
                y0: f64_of(y0),
                n,
                deviation: f64_of(deviation),
                distance: f64_of(distance),
                envelope: n as f64 * f64_of(rho).powi(n as i32),
            })
        })
        .collect();
    Ok(RenormTable {
        rows: rows?,
        rho: f64_of(rho),
        chart_order: chart.order(),
        chart_radius: f64_of(chart.radius),
        noise_floor: 64.0 * f64_of(T::eps() * chart.radius),
    })
}

/// `‖g^k(φ_s(ζ)) − base‖` for `k = 0 … k_max`.
pub fn orbit_distances<T: Real>(f: &PolyAuto, ms: &ManifoldSeries<T>, z: Complex<T>, k_max: u32) -> Vec<T> {
    let cyc = Cycle::<T>::new(f, ms.period);
    let mut p = ms.eval(z);
    let mut out = Vec::with_capacity(k_max as usize + 1);
    for k in 0..=k_max {
        if k > 0 {
            p = cyc.forward(&p);
        }
        out.push(norm_max(&[p[0] - ms.base[0], p[1] - ms.base[1]]));
    }
    out
}
