//! Argument parsing helpers: points, coefficient files, and the
//! three-way function specifier (catalog name, generator spec, file).

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use num_complex::Complex64;
use serde_json::Value;

use dfz_core::catalog::{CatalogFunction, CatalogName};
use dfz_core::operator::AnalyticInput;
use dfz_core::schwarz::SchwarzFunction;
use dfz_core::series::TaylorSeries;

/// Parse "re,im" or a bare real into a point.
pub fn parse_point(text: &str) -> Result<Complex64> {
    let text = text.trim();
    match text.split_once(',') {
        Some((re, im)) => {
            let re: f64 = re.trim().parse().map_err(|e| anyhow!("real part: {e}"))?;
            let im: f64 = im.trim().parse().map_err(|e| anyhow!("imaginary part: {e}"))?;
            Ok(Complex64::new(re, im))
        }
        None => {
            let re: f64 = text.parse().map_err(|e| anyhow!("point {text:?}: {e}"))?;
            Ok(Complex64::new(re, 0.0))
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    F,
    P,
}

fn coeffs_from_json(v: &Value) -> Result<TaylorSeries> {
    let arr = v.as_array().ok_or_else(|| anyhow!("expected an array of coefficients"))?;
    let mut coeffs = Vec::with_capacity(arr.len());
    for (k, entry) in arr.iter().enumerate() {
        let c = match entry {
            Value::Number(n) => Complex64::new(
                n.as_f64().ok_or_else(|| anyhow!("coefficient {k} is not finite"))?,
                0.0,
            ),
            Value::Array(pair) if pair.len() == 2 => {
                let re = pair[0].as_f64().ok_or_else(|| anyhow!("coefficient {k}: bad real part"))?;
                let im = pair[1].as_f64().ok_or_else(|| anyhow!("coefficient {k}: bad imaginary part"))?;
                Complex64::new(re, im)
            }
            _ => bail!("coefficient {k}: expected a number or [re, im]"),
        };
        coeffs.push(c);
    }
    if coeffs.is_empty() {
        bail!("the coefficient list is empty");
    }
    Ok(TaylorSeries::new(coeffs))
}

/// Read a coefficient file: a bare JSON array is an f-series; an object
/// carries the series under an "f" or "p" key.
pub fn load_series_file(path: &Path) -> Result<(SeriesKind, TaylorSeries)> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading coefficient file {}", path.display()))?;
    let doc: Value = serde_json::from_str(&text)
        .with_context(|| format!("parsing {} as JSON", path.display()))?;
    match &doc {
        Value::Array(_) => Ok((SeriesKind::F, coeffs_from_json(&doc)?)),
        Value::Object(map) => {
            if let Some(v) = map.get("f") {
                Ok((SeriesKind::F, coeffs_from_json(v)?))
            } else if let Some(v) = map.get("p") {
                Ok((SeriesKind::P, coeffs_from_json(v)?))
            } else {
                bail!("coefficient object needs an \"f\" or \"p\" key")
            }
        }
        _ => bail!("expected a JSON array or object of coefficients"),
    }
}

/// Resolve a --function argument: catalog name first, then generator
/// spec (anything with a colon), then a coefficient file on disk.
pub fn resolve_function(spec: &str) -> Result<AnalyticInput> {
    if let Some(name) = CatalogName::parse(spec) {
        return Ok(AnalyticInput::catalog(CatalogFunction::new(name)));
    }
    if spec.contains(':') {
        let phi = SchwarzFunction::parse_spec(spec)
            .with_context(|| format!("parsing {spec:?} as a generator spec"))?;
        return Ok(AnalyticInput::from_phi(phi));
    }
    let path = Path::new(spec);
    if path.exists() {
        let (kind, series) = load_series_file(path)?;
        return Ok(match kind {
            SeriesKind::F => AnalyticInput::from_f_series(series)?,
            SeriesKind::P => AnalyticInput::from_p_series(series)?,
        });
    }
    bail!(
        "cannot resolve {spec:?}: not a catalog name (k, f1, f2, f3), \
         not a generator spec, and no such file"
    )
}
