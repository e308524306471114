//! JSON conventions: complex numbers travel as `[re, im]` pairs.

use crate::scalar::C64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub fn to_pair(z: &C64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn from_pair(p: [f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

/// Use with `#[serde(with = "complex_vec")]` on `Vec<C64>` fields.
pub mod complex_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(to_pair).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<C64>, D::Error> {
        Ok(Vec::<[f64; 2]>::deserialize(d)?
            .into_iter()
            .map(from_pair)
            .collect())
    }
}

/// Use with `#[serde(with = "complex_mat")]` on `Vec<Vec<C64>>` fields.
pub mod complex_mat {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Vec<C64>], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|row| row.iter().map(to_pair).collect::<Vec<_>>())
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<C64>>, D::Error> {
        Ok(Vec::<Vec<[f64; 2]>>::deserialize(d)?
            .into_iter()
            .map(|row| row.into_iter().map(from_pair).collect())
            .collect())
    }
}
