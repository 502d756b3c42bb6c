//! Canonical region JSON and fixed-precision float formatting.
//!
//! ```json
//! {"shape": "empty"}
//! {"shape": "disk", "center": [0.2, 0.1], "radius": 0.3}
//! {"shape": "annulus", "inner": 0.3, "outer": 0.6}
//! {"shape": "ellipse", "semi_x": 0.6, "semi_y": 0.4}
//! {"shape": "cardioid", "a": 0.2, "b": 0.3}
//! {"shape": "half_disk", "radius": 0.8}
//! {"shape": "triangle", "a": 0.5}
//! {"shape": "polygon", "vertices": [[0.1, 0.0], [0.0, 0.2], [-0.1, 0.0]]}
//! {"shape": "fourier", "components": [{"role": "outer", "terms": [[1, 0.4, 0.0]]}],
//!  "anchor": [0.0, 0.0], "holes": []}
//! ```
//!
//! `center` defaults to the origin. Unknown fields are rejected.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ComponentRole, CustomBoundary, Region};
use crate::scalar::{lit, to_f64, Real};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum RegionSpec {
    Empty,
    Disk {
        #[serde(default)]
        center: [f64; 2],
        radius: f64,
    },
    Annulus { inner: f64, outer: f64 },
    Ellipse { semi_x: f64, semi_y: f64 },
    Cardioid { a: f64, b: f64 },
    HalfDisk { radius: f64 },
    /// Equilateral triangle with vertices `a`, `aω`, `aω²`.
    Triangle { a: f64 },
    Polygon { vertices: Vec<[f64; 2]> },
    Fourier {
        components: Vec<FourierComponent>,
        anchor: [f64; 2],
        #[serde(default)]
        holes: Vec<FourierHole>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierComponent {
    pub role: ComponentRole,
    /// `[k, re c_k, im c_k]` for `z(t) = Σ c_k e^{2πikt}`.
    pub terms: Vec<(i64, f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierHole {
    pub center: [f64; 2],
    pub radius: f64,
}

fn c<T: Real>(p: [f64; 2]) -> Complex<T> {
    Complex::new(lit(p[0]), lit(p[1]))
}

impl RegionSpec {
    pub fn to_region<T: Real>(&self) -> Result<Region<T>> {
        match self {
            RegionSpec::Empty => Ok(Region::Empty),
            RegionSpec::Disk { center, radius } => Region::disk(c(*center), lit(*radius)),
            RegionSpec::Annulus { inner, outer } => Region::annulus(lit(*inner), lit(*outer)),
            RegionSpec::Ellipse { semi_x, semi_y } => Region::ellipse(lit(*semi_x), lit(*semi_y)),
            RegionSpec::Cardioid { a, b } => Region::cardioid(lit(*a), lit(*b)),
            RegionSpec::HalfDisk { radius } => Region::half_disk(lit(*radius)),
            RegionSpec::Triangle { a } => Region::equilateral_triangle(lit(*a)),
            RegionSpec::Polygon { vertices } => Region::polygon(vertices.iter().map(|&v| c(v)).collect()),
            RegionSpec::Fourier { components, anchor, holes } => {
                if components.is_empty() {
                    return Err(Error::InvalidRegion("fourier region needs a component".into()));
                }
                let comps = components
                    .iter()
                    .map(|fc| (fc.terms.iter().map(|&(k, re, im)| (k, c([re, im]))).collect(), fc.role))
                    .collect();
                let holes = holes.iter().map(|h| (c(h.center), lit(h.radius))).collect();
                let r = Region::Custom(CustomBoundary::fourier(comps, c(*anchor), holes));
                r.validate()?;
                Ok(r)
            }
        }
    }

    /// Inverse of [`RegionSpec::to_region`]; `None` for opaque custom regions.
    pub fn from_region<T: Real>(region: &Region<T>) -> Option<Self> {
        let p = |z: Complex<T>| [to_f64(z.re), to_f64(z.im)];
        Some(match region {
            Region::Empty => RegionSpec::Empty,
            Region::Disk { center, radius } => RegionSpec::Disk { center: p(*center), radius: to_f64(*radius) },
            Region::Annulus { inner, outer } => RegionSpec::Annulus { inner: to_f64(*inner), outer: to_f64(*outer) },
            Region::Ellipse { semi_x, semi_y } => RegionSpec::Ellipse { semi_x: to_f64(*semi_x), semi_y: to_f64(*semi_y) },
            Region::Cardioid { a, b } => RegionSpec::Cardioid { a: to_f64(*a), b: to_f64(*b) },
            Region::HalfDisk { radius } => RegionSpec::HalfDisk { radius: to_f64(*radius) },
            Region::Polygon { vertices } => RegionSpec::Polygon { vertices: vertices.iter().map(|&v| p(v)).collect() },
            Region::Custom(_) => return None,
        })
    }
}

pub fn parse_region<T: Real>(json: &str) -> Result<Region<T>> {
    let spec: RegionSpec =
        serde_json::from_str(json).map_err(|e| Error::InvalidRegion(format!("region JSON: {e}")))?;
    spec.to_region()
}

/// `x` with 17 significant digits, so that `f64` values round-trip exactly.
pub fn format_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// CSV with a header row; every float printed by [`format_f64`].
pub fn csv_table(header: &[&str], rows: &[Vec<f64>]) -> Result<String> {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        if row.len() != header.len() {
            return Err(Error::InvalidArgument(format!("row has {} fields, header {}", row.len(), header.len())));
        }
        let cells: Vec<String> = row.iter().map(|&x| format_f64(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_shape() {
        for js in [
            r#"{"shape":"empty"}"#,
            r#"{"shape":"disk","radius":0.5}"#,
            r#"{"shape":"disk","center":[0.2,0.1],"radius":0.3}"#,
            r#"{"shape":"annulus","inner":0.3,"outer":0.6}"#,
            r#"{"shape":"ellipse","semi_x":0.6,"semi_y":0.4}"#,
            r#"{"shape":"cardioid","a":0.2,"b":0.3}"#,
            r#"{"shape":"half_disk","radius":0.8}"#,
            r#"{"shape":"triangle","a":0.5}"#,
            r#"{"shape":"polygon","vertices":[[0.3,0.0],[0.0,0.3],[-0.3,0.0],[0.0,-0.3]]}"#,
            r#"{"shape":"fourier","components":[{"role":"outer","terms":[[1,0.4,0.0],[2,0.05,0.0]]}],"anchor":[0.0,0.0]}"#,
        ] {
            let r: Region<f64> = parse_region(js).unwrap_or_else(|e| panic!("{js}: {e}"));
            if let Some(spec) = RegionSpec::from_region(&r) {
                let back = serde_json::to_string(&spec).unwrap();
                let again: RegionSpec = serde_json::from_str(&back).unwrap();
                assert_eq!(spec, again);
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_region::<f64>(r#"{"shape":"disk","radius":0.5,"color":1}"#).is_err());
        assert!(parse_region::<f64>(r#"{"shape":"blob"}"#).is_err());
        assert!(parse_region::<f64>(r#"{"shape":"annulus","inner":0.6,"outer":0.3}"#).is_err());
        // accepted, but flagged as leaving the unit disk
        assert!(!parse_region::<f64>(r#"{"shape":"disk","radius":1.5}"#).unwrap().fits_in_unit_disk());
    }

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, -1.0 / 3.0, 6.02e23, 5e-324, 0.0] {
            let s = format_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(format_f64(0.75), "7.5000000000000000e-1");
    }
}
