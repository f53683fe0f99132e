//! Serde adapter writing exact rationals as `"p/q"` strings.

use rug::Rational;
use serde::{Deserialize, Deserializer, Serializer};

pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
    let text = String::deserialize(d)?;
    text.trim().parse::<Rational>().map_err(serde::de::Error::custom)
}
