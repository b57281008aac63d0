//! `henon-lab`: command-line frontend for the henon-lab library.

mod error;
mod output;
mod spec;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use henon_lab::amalgam::{classify, common_iterate};
use henon_lab::automorphism::{is_henon_type, jung_decompose, to_regular_form};
use henon_lab::ergodic::{lyapunov_from_periodic, proportionality_test, sigma_conjugacy_check, Annulus, Curve};
use henon_lab::green::{Green, Which};
use henon_lab::heights::{dyn_height, periodicity_from_height, HeightOptions};
use henon_lab::localdyn::{dyadic_radii, holder_exponent, Side};
use henon_lab::periodic::{diagonal_intersections, fixed_points_of_iterate, PointType, SaddleData};
use henon_lab::scalar::{format_rational, parse_rational};
use henon_lab::Rational;
use num_complex::Complex64;
use serde_json::json;

use error::CliError;
use spec::MapSpec;

const DEFAULT_TOL: f64 = 1e-10;
const DEFAULT_MAX_ITER: usize = 2000;

#[derive(Parser)]
#[command(name = "henon-lab", version, about = "Hénon-type polynomial automorphisms of the plane")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Common {
    /// Tolerance for Green evaluations and fits (overrides the spec file).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Iteration cap for Green evaluations (overrides the spec file).
    #[arg(long, global = true)]
    max_iter: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Jung decomposition and Bass–Serre classification.
    Decompose { spec: PathBuf },
    /// Green functions.
    #[command(subcommand)]
    Green(GreenCmd),
    /// Points of Fix(fⁿ) with multiplicities and multipliers.
    Periodic {
        spec: PathBuf,
        #[arg(long)]
        n: u32,
    },
    /// Diagonal intersections Δ ∩ fⁿ(Δ) of a reversible map.
    Reversible {
        spec: PathBuf,
        #[arg(long)]
        n: u32,
    },
    /// Lyapunov exponents averaged over saddle points of Fix(fⁿ).
    Lyapunov {
        spec: PathBuf,
        #[arg(long)]
        period: u32,
    },
    /// Hölder exponent of the Green function along a saddle manifold.
    Holder {
        spec: PathBuf,
        #[arg(long, default_value_t = 0)]
        saddle_index: usize,
        #[arg(long, value_enum, default_value = "unstable")]
        side: SideArg,
        /// Period used to search for saddles.
        #[arg(long, default_value_t = 1)]
        period: u32,
        #[arg(long, default_value_t = 1.0)]
        r_max: f64,
        #[arg(long, default_value_t = 12)]
        radii: usize,
    },
    /// Fit G⁺ against G⁻ along a curve.
    Proportionality {
        spec: PathBuf,
        /// `diagonal` or `line:a,b,c,d` for t ↦ (a + b t, c + d t).
        #[arg(long, default_value = "diagonal")]
        curve: String,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0.5)]
        inner: f64,
        #[arg(long, default_value_t = 3.0)]
        outer: f64,
    },
    /// Dynamical height of a rational point.
    Height {
        spec: PathBuf,
        /// `x,y` with rationals written `num/den` or as integers.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value_t = 10)]
        n: u32,
        #[arg(long, default_value_t = 0.01)]
        threshold: f64,
    },
    /// Group-theoretic queries.
    #[command(subcommand)]
    Group(GroupCmd),
}

#[derive(Subcommand)]
enum GreenCmd {
    /// G⁺, G⁻ and the escape status at one point.
    Eval {
        spec: PathBuf,
        /// `x,y` (real) or `xr,xi,yr,yi`.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Grayscale PPM of a Green function on a real window.
    Render {
        spec: PathBuf,
        /// `xmin,xmax,ymin,ymax`.
        #[arg(long, allow_hyphen_values = true, default_value = "-3,3,-3,3")]
        window: String,
        /// `WIDTHxHEIGHT`.
        #[arg(long, default_value = "256x256")]
        res: String,
        #[arg(long, value_enum, default_value = "max")]
        which: WhichArg,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum GroupCmd {
    /// Smallest (n, m) with fⁿ = gᵐ.
    CommonIterate {
        spec_a: PathBuf,
        spec_b: PathBuf,
        #[arg(long, default_value_t = 3)]
        bound: u32,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Stable,
    Unstable,
}

#[derive(Clone, Copy, ValueEnum)]
enum WhichArg {
    Plus,
    Minus,
    Max,
}

impl From<WhichArg> for Which {
    fn from(w: WhichArg) -> Self {
        match w {
            WhichArg::Plus => Which::Plus,
            WhichArg::Minus => Which::Minus,
            WhichArg::Max => Which::Max,
        }
    }
}

struct Settings {
    tol: f64,
    max_iter: usize,
}

impl Settings {
    fn new(common: Common, spec: &MapSpec) -> Result<Self, CliError> {
        let tol = common.tol.or(spec.tolerances.tol).unwrap_or(DEFAULT_TOL);
        let max_iter = common.max_iter.or(spec.tolerances.max_iter).unwrap_or(DEFAULT_MAX_ITER);
        if !(tol > 0.0) {
            return Err(CliError::Usage(format!("--tol must be positive, got {tol}")));
        }
        if max_iter == 0 {
            return Err(CliError::Usage("--max-iter must be positive".into()));
        }
        Ok(Settings { tol, max_iter })
    }

    fn green(&self, spec: &MapSpec) -> Result<Green<f64>, CliError> {
        let mut g = Green::<f64>::new(&spec.map).map_err(CliError::compute)?;
        g.max_iter = self.max_iter;
        Ok(g)
    }
}

fn parse_floats(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("{what}: not a number: {t:?}"))))
        .collect()
}

fn parse_point(s: &str) -> Result<[Complex64; 2], CliError> {
    match parse_floats(s, "--point")?.as_slice() {
        [x, y] => Ok([Complex64::new(*x, 0.0), Complex64::new(*y, 0.0)]),
        [xr, xi, yr, yi] => Ok([Complex64::new(*xr, *xi), Complex64::new(*yr, *yi)]),
        _ => Err(CliError::Usage("--point expects 2 or 4 comma-separated numbers".into())),
    }
}

fn parse_rational_point(s: &str) -> Result<(Rational, Rational), CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    let [a, b] = parts.as_slice() else {
        return Err(CliError::Usage("--point expects two rationals `x,y`".into()));
    };
    let p = |t: &str| parse_rational(t).ok_or_else(|| CliError::Usage(format!("--point: not a rational: {t:?}")));
    Ok((p(a)?, p(b)?))
}

fn parse_curve(s: &str) -> Result<Curve, CliError> {
    if s == "diagonal" {
        return Ok(Curve::diagonal());
    }
    let bad = || CliError::Usage(format!("--curve: expected `diagonal` or `line:a,b,c,d`, got {s:?}"));
    let rest = s.strip_prefix("line:").ok_or_else(bad)?;
    let v: Vec<i64> = rest.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?;
    match v.as_slice() {
        [a, b, c, d] => Ok(Curve::line(*a, *b, *c, *d)),
        _ => Err(bad()),
    }
}

fn header(spec: &MapSpec, s: &Settings) -> serde_json::Value {
    json!({"map": spec.name, "seed": spec.seed, "tol": s.tol, "max_iter": s.max_iter})
}

fn with_header(spec: &MapSpec, s: &Settings, body: serde_json::Value) -> serde_json::Value {
    let mut h = header(spec, s);
    if let (Some(h), serde_json::Value::Object(b)) = (h.as_object_mut(), body) {
        h.extend(b);
    }
    h
}

fn load(path: &Path, common: Common) -> Result<(MapSpec, Settings), CliError> {
    let spec = spec::load(path)?;
    let s = Settings::new(common, &spec)?;
    Ok((spec, s))
}

fn run(cli: Cli) -> Result<serde_json::Value, CliError> {
    let common = cli.common;
    match cli.command {
        Command::Decompose { spec } => {
            let (spec, s) = load(&spec, common)?;
            let word = jung_decompose(&spec.map);
            let henon = is_henon_type(&spec.map);
            let regular = if henon { to_regular_form(&spec.map).ok() } else { None };
            Ok(with_header(
                &spec,
                &s,
                json!({
                    "degree": spec.map.degree(),
                    "jacobian": format_rational(spec.map.jacobian()),
                    "jung_word": output::to_value(&word.normalize())?,
                    "henon_type": henon,
                    "classification": output::to_value(&classify(&spec.map))?,
                    "regular_form": output::to_value(&regular)?,
                }),
            ))
        }
        Command::Green(GreenCmd::Eval { spec, point }) => {
            let (spec, s) = load(&spec, common)?;
            let p = parse_point(&point)?;
            let g = s.green(&spec)?;
            let plus = g.green_plus(&p, s.tol).map_err(CliError::compute)?;
            let minus = g.green_minus(&p, s.tol).map_err(CliError::compute)?;
            let escape = g.escape_status(&p, s.max_iter);
            Ok(with_header(
                &spec,
                &s,
                json!({
                    "point": output::to_value(&p)?,
                    "green_plus": output::to_value(&plus)?,
                    "green_minus": output::to_value(&minus)?,
                    "escape": output::to_value(&escape)?,
                    "filtration": output::to_value(g.filtration())?,
                }),
            ))
        }
        Command::Green(GreenCmd::Render { spec, window, res, which, out }) => {
            let (spec, s) = load(&spec, common)?;
            let w = parse_floats(&window, "--window")?;
            let [x0, x1, y0, y1] = w[..] else {
                return Err(CliError::Usage("--window expects xmin,xmax,ymin,ymax".into()));
            };
            if !(x1 > x0 && y1 > y0) {
                return Err(CliError::Usage("--window must have xmin < xmax and ymin < ymax".into()));
            }
            let (width, height) = res
                .split_once('x')
                .and_then(|(a, b)| Some((a.parse::<usize>().ok()?, b.parse::<usize>().ok()?)))
                .filter(|&(a, b)| a > 0 && b > 0)
                .ok_or_else(|| CliError::Usage(format!("--res expects WIDTHxHEIGHT, got {res:?}")))?;
            let g = s.green(&spec)?;
            let grid = g.render_grid([x0, x1, y0, y1], (width, height), which.into(), s.tol);
            let mut bytes = format!("P5\n{width} {height}\n255\n").into_bytes();
            bytes.extend(grid.iter().map(|&v| (255.0 * v / (1.0 + v)).round().clamp(0.0, 255.0) as u8));
            let io = |e: std::io::Error| CliError::Io { path: out.display().to_string(), message: e.to_string() };
            std::fs::write(&out, &bytes).map_err(io)?;
            let max = grid.iter().copied().fold(0.0, f64::max);
            let sidecar = with_header(
                &spec,
                &s,
                json!({
                    "image": out.display().to_string(),
                    "window": [x0, x1, y0, y1],
                    "resolution": [width, height],
                    "which": format!("{:?}", Which::from(which)).to_lowercase(),
                    "gray_level": "round(255 * g / (1 + g))",
                    "max_value": max,
                }),
            );
            let mut side = out.clone().into_os_string();
            side.push(".json");
            std::fs::write(PathBuf::from(&side), output::render(&sidecar)? + "\n").map_err(io)?;
            Ok(sidecar)
        }
        Command::Periodic { spec, n } => {
            let (spec, s) = load(&spec, common)?;
            let pts = fixed_points_of_iterate(&spec.map, n).map_err(CliError::compute)?;
            let total: u64 = pts.iter().map(|p| p.multiplicity as u64).sum();
            Ok(with_header(
                &spec,
                &s,
                json!({
                    "n": n,
                    "bezout": (spec.map.degree() as u64).pow(n),
                    "total_multiplicity": total,
                    "distinct": pts.len(),
                    "points": output::to_value(&pts)?,
                }),
            ))
        }
        Command::Reversible { spec, n } => {
            let path = spec.display().to_string();
            let (spec, s) = load(&spec, common)?;
            let rp = spec.reversible.as_ref().ok_or_else(|| CliError::Spec {
                path,
                field: "reversible".into(),
                message: "this subcommand needs a `reversible` spec".into(),
            })?;
            let pts = diagonal_intersections(rp, n).map_err(CliError::compute)?;
            let total: u64 = pts.iter().map(|p| p.multiplicity as u64).sum();
            let worst = pts.iter().map(|p| p.residual).fold(0.0, f64::max);
            Ok(with_header(
                &spec,
                &s,
                json!({
                    "n": n,
                    "sigma_f_sigma_is_inverse": true,
                    "bezout": (spec.map.degree() as u64).pow(n),
                    "total_multiplicity": total,
                    "distinct": pts.len(),
                    "max_residual": worst,
                    "points": output::to_value(&pts)?,
                }),
            ))
        }
        Command::Lyapunov { spec, period } => {
            let (spec, s) = load(&spec, common)?;
            let l = lyapunov_from_periodic(&spec.map, period).map_err(CliError::compute)?;
            Ok(with_header(&spec, &s, output::to_value(&l)?))
        }
        Command::Holder { spec, saddle_index, side, period, r_max, radii } => {
            let (spec, s) = load(&spec, common)?;
            let saddles: Vec<SaddleData> = fixed_points_of_iterate(&spec.map, period)
                .map_err(CliError::compute)?
                .into_iter()
                .filter(|p| p.kind == PointType::Saddle && p.exact_period == period)
                .filter_map(SaddleData::new)
                .collect();
            let count = saddles.len();
            let saddle = saddles.into_iter().nth(saddle_index).ok_or_else(|| {
                CliError::Usage(format!("--saddle-index {saddle_index}: only {count} saddles of period {period}"))
            })?;
            let side = match side {
                SideArg::Stable => Side::Stable,
                SideArg::Unstable => Side::Unstable,
            };
            let est = holder_exponent(&spec.map, &saddle, side, &dyadic_radii(r_max, radii), s.tol)
                .map_err(CliError::compute)?;
            Ok(with_header(
                &spec,
                &s,
                json!({"saddle": output::to_value(&saddle)?, "side": output::to_value(&side)?, "estimate": output::to_value(&est)?}),
            ))
        }
        Command::Proportionality { spec, curve, samples, inner, outer } => {
            let (spec, s) = load(&spec, common)?;
            let c = parse_curve(&curve)?;
            if !(0.0 <= inner && inner < outer) {
                return Err(CliError::Usage("--inner and --outer must satisfy 0 <= inner < outer".into()));
            }
            let g = s.green(&spec)?;
            let r =
                proportionality_test(&g, &c, Annulus { inner, outer }, samples, s.tol).map_err(CliError::compute)?;
            let sigma = spec.reversible.as_ref().map(|rp| sigma_conjugacy_check(&g, &rp.sigma, samples, outer, s.tol));
            Ok(with_header(
                &spec,
                &s,
                json!({
                    "curve": curve,
                    "annulus": [inner, outer],
                    "report": output::to_value(&r)?,
                    "consistent": r.consistent(s.tol),
                    "sigma_check": output::to_value(&sigma)?,
                }),
            ))
        }
        Command::Height { spec, point, n, threshold } => {
            let (spec, s) = load(&spec, common)?;
            let p = parse_rational_point(&point)?;
            let opts = HeightOptions::default();
            let h = dyn_height(&spec.map, &p, n, opts).map_err(CliError::compute)?;
            let verdict = periodicity_from_height(&spec.map, &p, threshold, n, opts).map_err(CliError::compute)?;
            let contributions: Vec<_> =
                h.lee.local_contributions.iter().map(|(v, x)| json!({"place": v.to_string(), "value": x})).collect();
            Ok(with_header(
                &spec,
                &s,
                json!({
                    "point": [format_rational(&p.0), format_rational(&p.1)],
                    "value": h.lee.value,
                    "error_bound": h.lee.error_bound,
                    "contributions": contributions,
                    "n_used": n,
                    "place_sum": output::to_value(&h.place_sum)?,
                    "gap": h.gap,
                    "agree": h.agree,
                    "plus": h.plus,
                    "minus": h.minus,
                    "period": h.period,
                    "verdict": output::to_value(&verdict)?,
                }),
            ))
        }
        Command::Group(GroupCmd::CommonIterate { spec_a, spec_b, bound }) => {
            let (a, s) = load(&spec_a, common)?;
            let b = spec::load(&spec_b)?;
            let r = common_iterate(&a.map, &b.map, bound);
            Ok(json!({
                "maps": [a.name, b.name],
                "bound": bound,
                "tol": s.tol,
                "max_iter": s.max_iter,
                "common_iterate": r.map(|(n, m)| json!({"n": n, "m": m})),
            }))
        }
    }
}

fn init_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("HENON_LAB_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Usage(format!("HENON_LAB_THREADS must be a positive integer, got {v:?}")))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(CliError::compute)?;
    }
    Ok(())
}

fn fail(e: CliError) -> ExitCode {
    let _ = writeln!(std::io::stderr(), "{}", e.to_json());
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(CliError::Usage(e.to_string().trim().to_string())),
    };
    if let Err(e) = init_threads() {
        return fail(e);
    }
    match run(cli).and_then(|v| output::render(&v)) {
        Ok(s) => {
            let _ = writeln!(std::io::stdout(), "{s}");
            ExitCode::SUCCESS
        }
        Err(e) => fail(e),
    }
}
