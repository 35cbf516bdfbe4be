//! Reading tangents, family specs, points and the config file.

use std::fs;
use std::io::Read;
use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;
use serde_json::Value;
use symcar::caratheodory::Config;
use symcar::families::FamilySpec;
use symcar::symdisc::{make_tangent, GPoint, GTangent, TangentSpec};

use crate::CliError;

/// Inline text, `@path` for a file, or `-` for stdin.
pub fn read_source(arg: &str) -> Result<String, CliError> {
    if arg == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else if let Some(path) = arg.strip_prefix('@') {
        fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {path}: {e}")))
    } else {
        Ok(arg.to_string())
    }
}

/// `"re,im"` or `"re"` as a complex number.
pub fn parse_complex(s: &str) -> Option<Complex64> {
    let mut parts = s.split(',').map(|p| p.trim().parse::<f64>());
    let re = parts.next()?.ok()?;
    let im = match parts.next() {
        Some(p) => p.ok()?,
        None => 0.0,
    };
    if parts.next().is_some() {
        return None;
    }
    Some(Complex64::new(re, im))
}

/// Replace every string of the form `"re,im"` by `[re, im]`, so that complex
/// entries in JSON input may use either spelling.
fn normalize(v: &mut Value) {
    match v {
        Value::String(s) => {
            if s.contains(',') {
                if let Some(z) = parse_complex(s) {
                    *v = serde_json::json!([z.re, z.im]);
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(normalize),
        Value::Object(map) => map.values_mut().for_each(normalize),
        _ => {}
    }
}

fn parse_json(text: &str) -> Result<Value, CliError> {
    let mut v: Value = serde_json::from_str(text).map_err(|e| CliError::Usage(format!("malformed JSON: {e}")))?;
    normalize(&mut v);
    Ok(v)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPoint {
    s1: Complex64,
    s2: Complex64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTangent {
    base: RawPoint,
    vec: [Complex64; 2],
}

/// Either an explicit `{"base": {"s1", "s2"}, "vec": [v1, v2]}` or a
/// constructor spec tagged with `"kind"`.
pub fn parse_tangent(text: &str) -> Result<GTangent, CliError> {
    tangent_from_value(parse_json(text)?)
}

fn tangent_from_value(v: Value) -> Result<GTangent, CliError> {
    if v.get("kind").is_some() {
        let spec: TangentSpec = serde_json::from_value(v).map_err(|e| CliError::Usage(format!("bad tangent spec: {e}")))?;
        return Ok(make_tangent(&spec)?);
    }
    let raw: RawTangent = serde_json::from_value(v).map_err(|e| CliError::Usage(format!("bad tangent: {e}")))?;
    let base = GPoint::new(raw.base.s1, raw.base.s2)?;
    Ok(GTangent::new(base, raw.vec))
}

/// The `delta` of a balanced spec goes through [`parse_tangent`] rules, so it
/// may also be a tangent spec, and a base outside `G` is a domain error.
pub fn parse_family(text: &str) -> Result<FamilySpec, CliError> {
    let mut v = parse_json(text)?;
    if let Some(delta) = v.get_mut("delta") {
        let t = tangent_from_value(delta.take())?;
        *delta = serde_json::to_value(t).expect("tangent serializes");
    }
    serde_json::from_value(v).map_err(|e| CliError::Usage(format!("bad family spec: {e}")))
}

/// A point of `C^2`: `"a,b;c,d"`, a JSON pair `[[a,b],[c,d]]` or `{"s1":..,"s2":..}`.
pub fn parse_point(s: &str) -> Result<[Complex64; 2], CliError> {
    let bad = || CliError::Usage(format!("bad point {s:?}: expected \"re,im;re,im\" or JSON"));
    let t = s.trim();
    if t.starts_with('[') || t.starts_with('{') {
        let v = parse_json(t)?;
        if let Ok(p) = serde_json::from_value::<[Complex64; 2]>(v.clone()) {
            return Ok(p);
        }
        let p: RawPoint = serde_json::from_value(v).map_err(|_| bad())?;
        return Ok([p.s1, p.s2]);
    }
    let (a, b) = t.split_once(';').ok_or_else(bad)?;
    Ok([parse_complex(a).ok_or_else(bad)?, parse_complex(b).ok_or_else(bad)?])
}

pub fn load_config(path: &Path) -> Result<Config, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_spellings() {
        assert_eq!(parse_complex("1.5,-2"), Some(Complex64::new(1.5, -2.0)));
        assert_eq!(parse_complex("0.25"), Some(Complex64::new(0.25, 0.0)));
        assert_eq!(parse_complex("a,b"), None);
        assert_eq!(parse_complex("1,2,3"), None);
    }

    #[test]
    fn tangent_forms_agree() {
        let a = parse_tangent(r#"{"base":{"s1":[0.5,0],"s2":[0,0]},"vec":[[1,0],[0,1]]}"#).unwrap();
        let b = parse_tangent(r#"{"base":{"s1":"0.5,0","s2":"0,0"},"vec":["1,0","0,1"]}"#).unwrap();
        assert_eq!(a, b);
        let r = parse_tangent(r#"{"kind":"royal","z":[0,0],"c":[1,0]}"#).unwrap();
        assert_eq!(r.vec[0], Complex64::new(2.0, 0.0));
    }

    #[test]
    fn tangent_errors_are_classified() {
        assert!(matches!(parse_tangent("{"), Err(CliError::Usage(_))));
        assert!(matches!(parse_tangent(r#"{"base":{"s1":[0,0]},"vec":[[1,0],[0,0]]}"#), Err(CliError::Usage(_))));
        let outside = r#"{"base":{"s1":[3,0],"s2":[0,0]},"vec":[[1,0],[0,0]]}"#;
        assert!(matches!(parse_tangent(outside), Err(CliError::Lib(symcar::Error::Domain(_)))));
    }

    #[test]
    fn point_forms() {
        let want = [Complex64::new(0.0, 0.0), Complex64::new(-0.5, 0.0)];
        assert_eq!(parse_point("0,0;-0.5,0").unwrap(), want);
        assert_eq!(parse_point("0;-0.5").unwrap(), want);
        assert_eq!(parse_point("[[0,0],[-0.5,0]]").unwrap(), want);
        assert_eq!(parse_point(r#"{"s1":"0,0","s2":[-0.5,0]}"#).unwrap(), want);
        assert!(parse_point("0,0").is_err());
    }
}
