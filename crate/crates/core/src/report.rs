use std::collections::BTreeMap;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::exact::PiRational;

/// How an identity was checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

/// One side of an identity: exact in exact mode, a double in float mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SideValue {
    Exact(PiRational),
    Float(f64),
}

impl SideValue {
    pub fn as_exact(&self) -> Option<&PiRational> {
        match self {
            SideValue::Exact(v) => Some(v),
            SideValue::Float(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            SideValue::Exact(v) => v.to_f64(),
            SideValue::Float(x) => *x,
        }
    }
}

impl From<PiRational> for SideValue {
    fn from(v: PiRational) -> Self {
        SideValue::Exact(v)
    }
}

/// Values of a formula exactly as printed, kept next to its corrected form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PrintedForm {
    pub lhs: PiRational,
    pub rhs: PiRational,
    pub holds: bool,
    pub description: String,
}

/// Outcome of checking one identity at one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IdentityReport {
    pub identity_name: String,
    pub parameters: BTreeMap<String, String>,
    pub lhs: SideValue,
    pub rhs: SideValue,
    pub verified: bool,
    pub mode: Mode,
    #[serde(with = "duration_seconds", rename = "elapsedSeconds")]
    pub elapsed: Duration,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub printed_form: Option<PrintedForm>,
}

impl IdentityReport {
    /// Exact-mode report; `verified` is exact equality of the two sides.
    pub fn exact(
        name: &str,
        parameters: BTreeMap<String, String>,
        lhs: PiRational,
        rhs: PiRational,
        elapsed: Duration,
    ) -> Self {
        let verified = lhs == rhs;
        IdentityReport {
            identity_name: name.to_string(),
            parameters,
            lhs: lhs.into(),
            rhs: rhs.into(),
            verified,
            mode: Mode::Exact,
            elapsed,
            notes: Vec::new(),
            printed_form: None,
        }
    }

    /// The printed form failed, i.e. this report carries a counterexample.
    pub fn has_counterexample(&self) -> bool {
        self.printed_form.as_ref().is_some_and(|p| !p.holds)
    }
}

/// Build a parameter map from `(name, value)` pairs.
pub fn params<I, K, V>(pairs: I) -> BTreeMap<String, String>
where
    I: IntoIterator<Item = (K, V)>,
    K: Into<String>,
    V: ToString,
{
    pairs
        .into_iter()
        .map(|(k, v)| (k.into(), v.to_string()))
        .collect()
}

mod duration_seconds {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let secs = f64::deserialize(d)?;
        Ok(Duration::from_secs_f64(secs.max(0.0)))
    }
}
