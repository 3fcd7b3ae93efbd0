//! Command-line and config-file value syntax.
//!
//! Scalars accept an optional SI prefix and unit: `70uT`, `2.14s`, `4uW`,
//! `80nm`, `1.66GHz`, `inf`. Units are informational and are not checked
//! against the parameter. Grids accept `start:stop:count`,
//! `start:stop:count:log`, or a comma-separated list.

use std::fmt;
use std::str::FromStr;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

const UNITS: &[&str] = &[
    "T", "s", "Hz", "W", "m", "D", "rad/s", "cm-1", "cm^-1", "/cm", "K", "eV", "V",
];

fn prefix_exponent(c: char) -> Option<i32> {
    Some(match c {
        'f' => -15,
        'p' => -12,
        'n' => -9,
        'u' | 'µ' | 'μ' => -6,
        'm' => -3,
        'k' => 3,
        'M' => 6,
        'G' => 9,
        'T' => 12,
        _ => return None,
    })
}

pub fn parse_scalar(text: &str) -> Result<f64, String> {
    let s = text.trim();
    match s.to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" => return Ok(f64::INFINITY),
        "-inf" | "-infinity" => return Ok(f64::NEG_INFINITY),
        _ => {}
    }
    let (number, value, rest) = (1..=s.len())
        .rev()
        .filter(|&i| s.is_char_boundary(i))
        .find_map(|i| s[..i].parse::<f64>().ok().map(|v| (&s[..i], v, s[i..].trim())))
        .ok_or_else(|| format!("'{text}' is not a number"))?;
    if !value.is_finite() {
        return Err(format!("'{text}' is not a finite number"));
    }
    if rest.is_empty() || UNITS.contains(&rest) {
        return Ok(value);
    }
    let mut chars = rest.chars();
    let first = chars.next().unwrap_or(' ');
    let unit = chars.as_str();
    match prefix_exponent(first) {
        // shifting the decimal exponent keeps `200u` exactly equal to `200e-6`
        Some(exp) if unit.is_empty() || UNITS.contains(&unit) => match number.split_once(['e', 'E']) {
            Some((m, e)) => {
                let e: i32 = e.parse().map_err(|_| format!("'{text}' is not a number"))?;
                Ok(format!("{m}e{}", e + exp).parse().expect("valid float syntax"))
            }
            None => Ok(format!("{number}e{exp}").parse().expect("valid float syntax")),
        },
        _ => Err(format!("'{text}': unrecognised unit suffix '{rest}'")),
    }
}

/// A real number that may be written with an SI suffix or as `inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantity(pub f64);

impl FromStr for Quantity {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        parse_scalar(s).map(Quantity)
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for Quantity {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(self.0)
        } else if self.0 > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }
}

struct QuantityVisitor;

impl Visitor<'_> for QuantityVisitor {
    type Value = Quantity;
    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a number or a string such as \"70uT\"")
    }
    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Quantity, E> {
        Ok(Quantity(v))
    }
    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Quantity, E> {
        Ok(Quantity(v as f64))
    }
    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Quantity, E> {
        Ok(Quantity(v as f64))
    }
    fn visit_str<E: de::Error>(self, v: &str) -> Result<Quantity, E> {
        v.parse().map_err(E::custom)
    }
}

impl<'de> Deserialize<'de> for Quantity {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        d.deserialize_any(QuantityVisitor)
    }
}

/// A list of sample points, kept together with the text it was parsed from.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    spec: String,
    values: Vec<f64>,
}

impl Grid {
    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

impl FromStr for Grid {
    type Err = String;
    fn from_str(text: &str) -> Result<Self, String> {
        let s = text.trim();
        let values = if s.contains(':') {
            let parts: Vec<&str> = s.split(':').collect();
            let log = match parts.len() {
                3 => false,
                4 if parts[3].trim() == "log" => true,
                _ => return Err(format!("'{text}': expected start:stop:count or start:stop:count:log")),
            };
            let a = parse_scalar(parts[0])?;
            let b = parse_scalar(parts[1])?;
            let n: usize = parts[2]
                .trim()
                .parse()
                .map_err(|_| format!("'{text}': count must be a positive integer"))?;
            if n == 0 {
                return Err(format!("'{text}': count must be at least 1"));
            }
            if log && (a <= 0.0 || b <= 0.0) {
                return Err(format!("'{text}': log grids need positive bounds"));
            }
            (0..n)
                .map(|i| {
                    let f = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
                    if log {
                        (a.ln() + (b.ln() - a.ln()) * f).exp()
                    } else {
                        a + (b - a) * f
                    }
                })
                .collect()
        } else {
            s.split(',').map(parse_scalar).collect::<Result<Vec<_>, _>>()?
        };
        Ok(Grid { spec: s.to_string(), values })
    }
}

impl Serialize for Grid {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.spec)
    }
}

impl<'de> Deserialize<'de> for Grid {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            List(Vec<Quantity>),
        }
        match Raw::deserialize(d)? {
            Raw::Text(t) => t.parse().map_err(de::Error::custom),
            Raw::List(v) => {
                let spec = v.iter().map(|q| q.0.to_string()).collect::<Vec<_>>().join(",");
                Ok(Grid { spec, values: v.into_iter().map(|q| q.0).collect() })
            }
        }
    }
}

/// Comma-separated non-negative integers, e.g. `1,2,4,8`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntList(pub Vec<usize>);

impl FromStr for IntList {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|_| format!("'{p}' is not a non-negative integer")))
            .collect::<Result<Vec<_>, _>>()
            .map(IntList)
    }
}

impl Serialize for IntList {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntList {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            List(Vec<usize>),
        }
        match Raw::deserialize(d)? {
            Raw::Text(t) => t.parse().map_err(de::Error::custom),
            Raw::List(v) => Ok(IntList(v)),
        }
    }
}
