//! Typed scalar values held by data-property assertions.

use std::cmp::Ordering;
use std::fmt;

use chrono::NaiveDate;
use serde::{Serialize, Serializer};

use crate::ontology::Range;

#[derive(Debug, Clone)]
pub enum Scalar {
    Str(String),
    Float(f64),
    Int(i64),
    Bool(bool),
    Date(NaiveDate),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("`{text}` is not a valid {range}")]
pub struct ScalarError {
    pub text: String,
    pub range: Range,
}

pub const DATE_FORMAT: &str = "%Y-%m-%d";

/// Strict ISO-8601 calendar date, `YYYY-MM-DD`.
pub fn parse_date(text: &str) -> Option<NaiveDate> {
    let b = text.as_bytes();
    if b.len() != 10 || b[4] != b'-' || b[7] != b'-' {
        return None;
    }
    NaiveDate::parse_from_str(text, DATE_FORMAT).ok()
}

impl Scalar {
    /// Parses `text` under a declared range.
    pub fn parse(range: Range, text: &str) -> Result<Scalar, ScalarError> {
        let err = || ScalarError {
            text: text.to_string(),
            range,
        };
        Ok(match range {
            Range::String => Scalar::Str(text.to_string()),
            Range::Float => {
                let v: f64 = text.parse().map_err(|_| err())?;
                if !v.is_finite() {
                    return Err(err());
                }
                Scalar::Float(v)
            }
            Range::Int => Scalar::Int(text.parse().map_err(|_| err())?),
            Range::Bool => match text.to_ascii_lowercase().as_str() {
                "true" => Scalar::Bool(true),
                "false" => Scalar::Bool(false),
                _ => return Err(err()),
            },
            Range::Date => Scalar::Date(parse_date(text).ok_or_else(err)?),
        })
    }

    pub fn range(&self) -> Range {
        match self {
            Scalar::Str(_) => Range::String,
            Scalar::Float(_) => Range::Float,
            Scalar::Int(_) => Range::Int,
            Scalar::Bool(_) => Range::Bool,
            Scalar::Date(_) => Range::Date,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Scalar::Float(v) => Some(*v),
            Scalar::Int(v) => Some(*v as f64),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Scalar::Str(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_date(&self) -> Option<NaiveDate> {
        match self {
            Scalar::Date(d) => Some(*d),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Scalar::Bool(b) => Some(*b),
            _ => None,
        }
    }

    /// Lexical form; `Scalar::parse(self.range(), &self.lexical())` restores it.
    pub fn lexical(&self) -> String {
        self.to_string()
    }

    fn rank(&self) -> u8 {
        match self {
            Scalar::Str(_) => 0,
            Scalar::Float(_) => 1,
            Scalar::Int(_) => 2,
            Scalar::Bool(_) => 3,
            Scalar::Date(_) => 4,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Str(s) => f.write_str(s),
            Scalar::Float(v) => write!(f, "{v}"),
            Scalar::Int(v) => write!(f, "{v}"),
            Scalar::Bool(v) => write!(f, "{v}"),
            Scalar::Date(d) => write!(f, "{}", d.format(DATE_FORMAT)),
        }
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Scalar {}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Scalar::Str(a), Scalar::Str(b)) => a.cmp(b),
            (Scalar::Float(a), Scalar::Float(b)) => a.total_cmp(b),
            (Scalar::Int(a), Scalar::Int(b)) => a.cmp(b),
            (Scalar::Bool(a), Scalar::Bool(b)) => a.cmp(b),
            (Scalar::Date(a), Scalar::Date(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl std::hash::Hash for Scalar {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.rank().hash(state);
        match self {
            Scalar::Str(s) => s.hash(state),
            Scalar::Float(v) => v.to_bits().hash(state),
            Scalar::Int(v) => v.hash(state),
            Scalar::Bool(v) => v.hash(state),
            Scalar::Date(d) => d.hash(state),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Scalar::Str(v) => s.serialize_str(v),
            Scalar::Float(v) => s.serialize_f64(*v),
            Scalar::Int(v) => s.serialize_i64(*v),
            Scalar::Bool(v) => s.serialize_bool(*v),
            Scalar::Date(d) => s.collect_str(&d.format(DATE_FORMAT)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_each_range() {
        assert_eq!(Scalar::parse(Range::Float, "1.25").unwrap(), Scalar::Float(1.25));
        assert_eq!(Scalar::parse(Range::Int, "-3").unwrap(), Scalar::Int(-3));
        assert_eq!(Scalar::parse(Range::Bool, "TRUE").unwrap(), Scalar::Bool(true));
        assert_eq!(
            Scalar::parse(Range::Date, "2010-05-01").unwrap().to_string(),
            "2010-05-01"
        );
        assert!(Scalar::parse(Range::Float, "abc").is_err());
        assert!(Scalar::parse(Range::Float, "inf").is_err());
        assert!(Scalar::parse(Range::Int, "1.5").is_err());
        assert!(Scalar::parse(Range::Date, "2010-5-1").is_err());
        assert!(Scalar::parse(Range::Date, "05/01/2010").is_err());
        assert!(Scalar::parse(Range::Date, "2010-02-30").is_err());
    }

    proptest! {
        #[test]
        fn float_lexical_round_trip(v in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let s = Scalar::Float(v);
            prop_assert_eq!(Scalar::parse(Range::Float, &s.lexical()).unwrap(), s);
        }
    }
}
