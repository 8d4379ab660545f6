//! CSV encodings of profiles, radii, point clouds and sampled geodesics.
//! Floats use Rust's shortest round-trip formatting so equal runs give
//! identical bytes.

use crate::error::{GeoError, Result};
use crate::geodesic::GeodesicSegment;
use crate::lens::WProfile;
use crate::manifold::{ManifoldModel, ManifoldPoint};
use crate::radii::RadiiReport;
use crate::sets::PointCloud;

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| GeoError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| GeoError::Io(e.to_string()))
}

fn coord_headers(prefix: &str, n: usize) -> impl Iterator<Item = String> + '_ {
    (0..n).map(move |i| format!("{prefix}{i}"))
}

/// Columns `t, w, slack, witness_a_*, witness_b_*, nested_after_T`.
pub fn profile_csv(p: &WProfile) -> Result<String> {
    let n = p.pair.manifold().coord_len();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = vec!["t".into(), "w".into(), "slack".into()];
    header.extend(coord_headers("witness_a_", n));
    header.extend(coord_headers("witness_b_", n));
    header.push("nested_after_T".into());
    w.write_record(&header)?;
    for i in 0..p.grid.len() {
        let mut row = vec![p.grid[i].to_string(), p.w[i].to_string(), p.slack[i].to_string()];
        row.extend(p.witnesses[i].0.coords.iter().map(|c| c.to_string()));
        row.extend(p.witnesses[i].1.coords.iter().map(|c| c.to_string()));
        row.push(if p.nested()[i] { "1" } else { "0" }.into());
        w.write_record(&row)?;
    }
    finish(w)
}

/// One row of a profile CSV read back.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileRow {
    pub t: f64,
    pub w: f64,
    pub slack: f64,
    pub witness_a: Vec<f64>,
    pub witness_b: Vec<f64>,
    pub nested: bool,
}

fn parse(s: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| GeoError::Io(format!("not a number: {s:?}")))
}

pub fn read_profile_csv(text: &str) -> Result<Vec<ProfileRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let width = r.headers()?.len();
    if width < 4 || (width - 4) % 2 != 0 {
        return Err(GeoError::Io(format!("unexpected profile header width {width}")));
    }
    let n = (width - 4) / 2;
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let f: Vec<&str> = rec.iter().collect();
        rows.push(ProfileRow {
            t: parse(f[0])?,
            w: parse(f[1])?,
            slack: parse(f[2])?,
            witness_a: f[3..3 + n].iter().map(|s| parse(s)).collect::<Result<_>>()?,
            witness_b: f[3 + n..3 + 2 * n].iter().map(|s| parse(s)).collect::<Result<_>>()?,
            nested: f[3 + 2 * n].trim() == "1",
        });
    }
    Ok(rows)
}

/// Columns `quantity, value, provenance`.
pub fn radii_csv(r: &RadiiReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["quantity", "value", "provenance"])?;
    for (name, e) in r.entries() {
        w.write_record([name.to_string(), e.radius.to_string(), e.provenance_label()])?;
    }
    finish(w)
}

/// One point per row, columns `x0, x1, ...`.
pub fn cloud_csv(c: &PointCloud) -> Result<String> {
    let n = c.points()[0].coords.len();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(coord_headers("x", n))?;
    for p in c.points() {
        w.write_record(p.coords.iter().map(|x| x.to_string()))?;
    }
    finish(w)
}

pub fn read_cloud_csv(text: &str, fill_radius: f64) -> Result<PointCloud> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let n = r.headers()?.len();
    let mut points = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        if rec.len() != n {
            return Err(GeoError::DimensionMismatch { expected: n, got: rec.len() });
        }
        points.push(ManifoldPoint::new(rec.iter().map(parse).collect::<Result<_>>()?));
    }
    PointCloud::new(points, fill_radius)
}

/// Columns `t, x0, x1, ...`; closed-form segments are evaluated at
/// `samples + 1` equally spaced parameters.
pub fn geodesic_csv(m: &ManifoldModel, g: &GeodesicSegment, samples: usize) -> Result<String> {
    let curve = g.to_curve(m, samples)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["t".to_string()];
    header.extend(coord_headers("x", m.coord_len()));
    w.write_record(&header)?;
    for (t, p) in curve.t.iter().zip(&curve.points) {
        let mut row = vec![t.to_string()];
        row.extend(p.coords.iter().map(|x| x.to_string()));
        w.write_record(&row)?;
    }
    finish(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cloud_round_trip() {
        let c = PointCloud::new(vec![ManifoldPoint::new(vec![0.1, -2.5]), ManifoldPoint::new(vec![1e-17, 3.0])], 0.5)
            .unwrap();
        let text = cloud_csv(&c).unwrap();
        assert!(text.starts_with("x0,x1\n"));
        assert_eq!(read_cloud_csv(&text, 0.5).unwrap(), c);
    }

    #[test]
    fn ragged_cloud_is_rejected() {
        assert!(read_cloud_csv("x0,x1\n1,2\n3\n", 0.0).is_err());
    }

    #[test]
    fn geodesic_rows_include_the_parameter() {
        let m = ManifoldModel::euclidean(2).unwrap();
        let g = GeodesicSegment::new(&m, &m.base_direction(), 1.0).unwrap();
        let text = geodesic_csv(&m, &g, 4).unwrap();
        assert_eq!(text.lines().nth(2), Some("0.25,0.25,0"));
    }
}
