//! Serde adapters writing big integers as decimal strings.

use num_bigint::{BigInt, BigUint};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serializer};

pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(values: &[BigInt], ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_seq(values.iter().map(|v| v.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<BigInt>, D::Error> {
        let raw = Vec::<String>::deserialize(de)?;
        raw.iter()
            .map(|s| s.trim().parse::<BigInt>().map_err(D::Error::custom))
            .collect()
    }
}

pub mod int {
    use super::*;

    pub fn serialize<S: Serializer>(value: &BigInt, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&value.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<BigInt, D::Error> {
        String::deserialize(de)?.trim().parse().map_err(D::Error::custom)
    }
}

pub mod uint {
    use super::*;

    pub fn serialize<S: Serializer>(value: &BigUint, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&value.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<BigUint, D::Error> {
        String::deserialize(de)?.trim().parse().map_err(D::Error::custom)
    }
}

pub mod opt_int {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Option<BigInt>, ser: S) -> Result<S::Ok, S::Error> {
        match value {
            Some(v) => ser.serialize_some(&v.to_string()),
            None => ser.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Option<BigInt>, D::Error> {
        Option::<String>::deserialize(de)?
            .map(|s| s.trim().parse().map_err(D::Error::custom))
            .transpose()
    }
}
