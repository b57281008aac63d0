use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{BivarPoly, PolyError};
use crate::scalar::{format_rational, parse_rational, Rational};

/// Wire form of a polynomial: `{"terms": [{"i": 2, "j": 0, "c": "1/1"}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyJson {
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub i: u32,
    pub j: u32,
    pub c: String,
}

impl From<&BivarPoly<Rational>> for PolyJson {
    fn from(p: &BivarPoly<Rational>) -> Self {
        PolyJson { terms: p.terms().map(|(&(i, j), c)| TermJson { i, j, c: format_rational(c) }).collect() }
    }
}

impl TryFrom<&PolyJson> for BivarPoly<Rational> {
    type Error = PolyError;

    fn try_from(p: &PolyJson) -> Result<Self, PolyError> {
        let mut out = BivarPoly::zero();
        for (k, t) in p.terms.iter().enumerate() {
            let c = parse_rational(&t.c)
                .ok_or_else(|| PolyError::Parse(format!("terms[{k}].c: not a rational: {:?}", t.c)))?;
            out.add_term(t.i, t.j, c);
        }
        Ok(out)
    }
}

impl Serialize for BivarPoly<Rational> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PolyJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for BivarPoly<Rational> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = PolyJson::deserialize(d)?;
        BivarPoly::try_from(&j).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn wire_format() {
        let p = &BivarPoly::monomial(rat(3, 2), 2, 0) - &BivarPoly::y();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"terms":[{"i":0,"j":1,"c":"-1/1"},{"i":2,"j":0,"c":"3/2"}]}"#);
        let back: BivarPoly<Rational> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn rejects_bad_coefficient() {
        let r: Result<BivarPoly<Rational>, _> = serde_json::from_str(r#"{"terms":[{"i":0,"j":1,"c":"0.5"}]}"#);
        assert!(r.unwrap_err().to_string().contains("terms[0].c"));
    }
}
