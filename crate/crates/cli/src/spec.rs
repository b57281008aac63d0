//! Map specification files.

use std::path::Path;

use henon_lab::automorphism::{PolyAuto, PolyMap};
use henon_lab::periodic::{make_reversible, ReversiblePair};
use henon_lab::scalar::parse_rational;
use henon_lab::UPoly;
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
}

/// Wire form: either `forward` and `inverse` component pairs, or
/// `reversible` with the coefficients of `P` (lowest degree first) for the
/// pair `f = (P(x) − y, x)`, `σ = (y, x)`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    description: Option<String>,
    #[serde(default)]
    forward: Option<PolyMap<henon_lab::Rational>>,
    #[serde(default)]
    inverse: Option<PolyMap<henon_lab::Rational>>,
    #[serde(default)]
    reversible: Option<Vec<String>>,
    #[serde(default)]
    power: Option<i64>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    tolerances: Tolerances,
}

pub struct MapSpec {
    pub name: String,
    pub map: PolyAuto,
    pub reversible: Option<ReversiblePair>,
    pub seed: u64,
    pub tolerances: Tolerances,
}

fn spec_err(path: &Path, field: &str, message: impl Into<String>) -> CliError {
    CliError::Spec { path: path.display().to_string(), field: field.to_string(), message: message.into() }
}

pub fn load(path: &Path) -> Result<MapSpec, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })?;
    let mut de = serde_json::Deserializer::from_str(&text);
    let raw: RawSpec = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let inner = e.inner();
        CliError::Parse {
            path: path.display().to_string(),
            field: match e.path().to_string() {
                p if p == "?" => ".".into(),
                p => p,
            },
            line: inner.line(),
            column: inner.column(),
            message: inner.to_string(),
        }
    })?;
    let (map, reversible) = match (raw.forward, raw.inverse, raw.reversible) {
        (Some(f), Some(g), None) => {
            let m = henon_lab::automorphism::make_auto(f, g).map_err(|e| spec_err(path, "forward", e.to_string()))?;
            (m, None)
        }
        (None, None, Some(cs)) => {
            let mut coeffs = Vec::with_capacity(cs.len());
            for (k, c) in cs.iter().enumerate() {
                coeffs
                    .push(parse_rational(c).ok_or_else(|| {
                        spec_err(path, &format!("reversible[{k}]"), format!("not a rational: {c:?}"))
                    })?);
            }
            let rp = make_reversible(&UPoly::new(coeffs)).map_err(|e| spec_err(path, "reversible", e.to_string()))?;
            (rp.f.clone(), Some(rp))
        }
        _ => return Err(spec_err(path, ".", "expected either `forward` and `inverse`, or `reversible`")),
    };
    let (map, reversible) = match raw.power {
        None | Some(1) => (map, reversible),
        Some(0) => return Err(spec_err(path, "power", "must be nonzero")),
        Some(n) => (map.pow(n), None),
    };
    let _ = raw.description;
    Ok(MapSpec {
        name: raw
            .name
            .unwrap_or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()),
        map,
        reversible,
        seed: raw.seed.unwrap_or(0),
        tolerances: raw.tolerances,
    })
}
