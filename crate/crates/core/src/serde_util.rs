//! Serde adapters writing exact rationals as `"num/den"` strings.

pub mod rational {
    use crate::scalar::{format_rational, parse_rational, Rational};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).ok_or_else(|| D::Error::custom(format!("not a rational: {s:?}")))
    }
}

pub mod rational_pair {
    use crate::scalar::{format_rational, parse_rational, Rational};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational; 2], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(format_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[Rational; 2], D::Error> {
        let [a, b] = <[String; 2]>::deserialize(d)?;
        let p = |s: &str| parse_rational(s).ok_or_else(|| D::Error::custom(format!("not a rational: {s:?}")));
        Ok([p(&a)?, p(&b)?])
    }
}

/// Univariate polynomial as its coefficient list, lowest degree first.
pub mod univar {
    use crate::polyalg::UnivarPoly;
    use crate::scalar::{format_rational, parse_rational, Rational};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(p: &UnivarPoly<Rational>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(p.coeffs().iter().map(format_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<UnivarPoly<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        let mut cs = Vec::with_capacity(v.len());
        for (k, s) in v.iter().enumerate() {
            cs.push(parse_rational(s).ok_or_else(|| D::Error::custom(format!("[{k}]: not a rational: {s:?}")))?);
        }
        Ok(UnivarPoly::new(cs))
    }
}
