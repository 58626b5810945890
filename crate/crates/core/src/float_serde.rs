//! JSON has no NaN or infinities. Finite values are written as numbers and
//! non-finite ones as the strings `"NaN"`, `"Infinity"` and `"-Infinity"`;
//! `null` reads back as NaN.

use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy)]
struct F(f64);

impl Serialize for F {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v = self.0;
        if v.is_finite() {
            s.serialize_f64(v)
        } else if v.is_nan() {
            s.serialize_str("NaN")
        } else if v > 0.0 {
            s.serialize_str("Infinity")
        } else {
            s.serialize_str("-Infinity")
        }
    }
}

impl<'de> Deserialize<'de> for F {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<F, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = F;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a number, null, or one of \"NaN\", \"Infinity\", \"-Infinity\"")
            }
            fn visit_f64<E>(self, v: f64) -> Result<F, E> {
                Ok(F(v))
            }
            fn visit_i64<E>(self, v: i64) -> Result<F, E> {
                Ok(F(v as f64))
            }
            fn visit_u64<E>(self, v: u64) -> Result<F, E> {
                Ok(F(v as f64))
            }
            fn visit_unit<E>(self) -> Result<F, E> {
                Ok(F(f64::NAN))
            }
            fn visit_none<E>(self) -> Result<F, E> {
                Ok(F(f64::NAN))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<F, E> {
                match v {
                    "NaN" => Ok(F(f64::NAN)),
                    "Infinity" => Ok(F(f64::INFINITY)),
                    "-Infinity" => Ok(F(f64::NEG_INFINITY)),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(V)
    }
}

pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    F(*v).serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    F::deserialize(d).map(|f| f.0)
}

pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|&x| F(x)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Vec::<F>::deserialize(d).map(|v| v.into_iter().map(|f| f.0).collect())
    }
}

pub mod option {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        v.map(F).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Option::<F>::deserialize(d).map(|v| v.map(|f| f.0))
    }
}

pub mod matrix {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<Vec<Vec<f64>>>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref()
            .map(|m| m.iter().map(|row| row.iter().map(|&x| F(x)).collect::<Vec<_>>()).collect::<Vec<_>>())
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<Vec<f64>>>, D::Error> {
        Option::<Vec<Vec<F>>>::deserialize(d)
            .map(|m| m.map(|m| m.into_iter().map(|row| row.into_iter().map(|f| f.0).collect()).collect()))
    }
}
