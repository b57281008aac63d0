//! JSON emission with every float at 17 significant digits.

use std::str::FromStr;

use serde::Serialize;
use serde_json::{Number, Value};

use crate::error::CliError;

pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn normalize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => match n.as_f64() {
            Some(x) if x.is_finite() => Value::Number(Number::from_str(&fmt17(x)).expect("valid float literal")),
            _ => Value::Null,
        },
        Value::Array(a) => Value::Array(a.into_iter().map(normalize).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, normalize(v))).collect()),
        other => other,
    }
}

pub fn to_value<T: Serialize>(v: &T) -> Result<Value, CliError> {
    serde_json::to_value(v).map(normalize).map_err(CliError::compute)
}

pub fn render<T: Serialize>(v: &T) -> Result<String, CliError> {
    let v = to_value(v)?;
    serde_json::to_string_pretty(&v).map_err(CliError::compute)
}
