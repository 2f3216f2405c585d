//! Time grids: `"logspace:a:b:n"`, a comma list, or a JSON array.

use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, Debug, PartialEq)]
pub enum TimeSpec {
    /// `n` log-spaced points from `a` to `b`; both endpoints are exact.
    Logspace {
        a: f64,
        b: f64,
        n: usize,
    },
    List(Vec<f64>),
}

impl TimeSpec {
    pub fn values(&self) -> Result<Vec<f64>, String> {
        match *self {
            TimeSpec::List(ref v) => Ok(v.clone()),
            TimeSpec::Logspace { a, b, n } => {
                if !(a > 0.0) || !(b >= a) || !b.is_finite() {
                    return Err(format!("logspace needs 0 < a <= b < inf, got a = {a}, b = {b}"));
                }
                Ok(logspace(a, b, n))
            }
        }
    }
}

/// Endpoints are copied rather than recomputed: `a·(b/a)^1` can miss `b` by
/// an ulp, which matters for thresholds like `t ≥ 8r²`.
pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|k| match k {
                0 => a,
                k if k == n - 1 => b,
                k => a * (b / a).powf(k as f64 / (n - 1) as f64),
            })
            .collect(),
    }
}

impl FromStr for TimeSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("logspace:") {
            let parts: Vec<&str> = rest.split(':').collect();
            let [a, b, n] = parts[..] else {
                return Err(format!("expected logspace:a:b:n, got `{s}`"));
            };
            let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("bad number `{v}`: {e}"));
            let n = n.trim().parse::<usize>().map_err(|e| format!("bad point count `{n}`: {e}"))?;
            return Ok(TimeSpec::Logspace { a: num(a)?, b: num(b)?, n });
        }
        if s.is_empty() {
            return Ok(TimeSpec::List(Vec::new()));
        }
        s.split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|e| format!("bad time `{v}`: {e}")))
            .collect::<Result<_, _>>()
            .map(TimeSpec::List)
    }
}

impl std::fmt::Display for TimeSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TimeSpec::Logspace { a, b, n } => write!(f, "logspace:{a}:{b}:{n}"),
            TimeSpec::List(v) => {
                let parts: Vec<String> = v.iter().map(f64::to_string).collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

impl Serialize for TimeSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            TimeSpec::List(v) => v.serialize(s),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for TimeSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            List(Vec<f64>),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::List(v) => Ok(TimeSpec::List(v)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}
