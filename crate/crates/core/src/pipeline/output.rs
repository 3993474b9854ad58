//! Artifact writers: field and contour CSV, plain-text report, SVG figure.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so a
//! rerun of the same configuration reproduces the files byte for byte.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::elliptic::ScalarField;
use crate::geometry::Region;
use crate::quasiconcavity::Witness;
use crate::{Error, Point, Result};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source: std::io::Error::other(e.to_string()),
    }
}

/// A header record `nx,ny,h,origin_x,origin_y` and its values, then one row
/// `i,j,x,y,value,interior` per grid node. Non-interior nodes carry the
/// boundary value of their component.
pub fn write_field_csv(path: &Path, u: &ScalarField) -> Result<()> {
    let d = u.domain();
    let mut w = csv::WriterBuilder::new()
        .flexible(true)
        .from_path(path)
        .map_err(|e| csv_err(path, e))?;
    let o = d.origin();
    let rows: [Vec<String>; 3] = [
        ["nx", "ny", "h", "origin_x", "origin_y"].map(String::from).to_vec(),
        vec![
            d.nx().to_string(),
            d.ny().to_string(),
            d.h().to_string(),
            o.x.to_string(),
            o.y.to_string(),
        ],
        ["i", "j", "x", "y", "value", "interior"].map(String::from).to_vec(),
    ];
    for r in &rows {
        w.write_record(r).map_err(|e| csv_err(path, e))?;
    }
    let bc = u.boundary();
    for j in 0..d.ny() {
        for i in 0..d.nx() {
            let p = d.point_at(i, j);
            let (value, interior) = match d.region(i, j) {
                Region::Interior => (u.at(i, j).expect("interior"), 1),
                Region::Exterior => (bc.outer, 0),
                Region::Hole => (bc.inner, 0),
            };
            w.write_record([
                i.to_string(),
                j.to_string(),
                p.x.to_string(),
                p.y.to_string(),
                value.to_string(),
                interior.to_string(),
            ])
            .map_err(|e| csv_err(path, e))?;
        }
    }
    w.flush().map_err(io_err(path))
}

/// Contours at one or more levels.
#[derive(Clone, Debug)]
pub struct ContourSet {
    pub lambda: f64,
    pub contours: Vec<Vec<Point>>,
}

/// Rows `contour,vertex,x,y,lambda`; contour ids run across all levels.
pub fn write_contours_csv(path: &Path, sets: &[ContourSet]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(["contour", "vertex", "x", "y", "lambda"])
        .map_err(|e| csv_err(path, e))?;
    let mut id = 0usize;
    for set in sets {
        for c in &set.contours {
            for (k, p) in c.iter().enumerate() {
                w.write_record([
                    id.to_string(),
                    k.to_string(),
                    p.x.to_string(),
                    p.y.to_string(),
                    set.lambda.to_string(),
                ])
                .map_err(|e| csv_err(path, e))?;
            }
            id += 1;
        }
    }
    w.flush().map_err(io_err(path))
}

/// Writes a CSV table with a header row.
pub fn write_table_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for r in rows {
        w.write_record(r).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(io_err(path))
}

fn colour(t: f64) -> String {
    // dark blue -> teal -> yellow
    const STOPS: [(f64, [f64; 3]); 4] = [
        (0.0, [68.0, 1.0, 84.0]),
        (0.35, [49.0, 104.0, 142.0]),
        (0.7, [53.0, 183.0, 121.0]),
        (1.0, [253.0, 231.0, 37.0]),
    ];
    let t = t.clamp(0.0, 1.0);
    let k = STOPS.iter().position(|s| s.0 >= t).unwrap_or(3).max(1);
    let (t0, c0) = STOPS[k - 1];
    let (t1, c1) = STOPS[k];
    let s = (t - t0) / (t1 - t0);
    let c: Vec<u8> = (0..3)
        .map(|i| (c0[i] + s * (c1[i] - c0[i])).round() as u8)
        .collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

/// Heat map of `u` on its interior nodes with contours and witness markers.
pub fn write_svg(
    path: &Path,
    u: &ScalarField,
    contours: &[ContourSet],
    witnesses: &[Witness],
) -> Result<()> {
    let d = u.domain();
    let o = d.origin();
    let (w_units, h_units) = ((d.nx() - 1) as f64 * d.h(), (d.ny() - 1) as f64 * d.h());
    let scale = 900.0 / w_units.max(h_units);
    let (wpx, hpx) = (w_units * scale + 20.0, h_units * scale + 20.0);
    let sx = |x: f64| (x - o.x) * scale + 10.0;
    let sy = |y: f64| hpx - ((y - o.y) * scale + 10.0);
    let (lo, hi) = (u.min().min(0.0), u.max());
    let span = if hi > lo { hi - lo } else { 1.0 };
    // at most ~300 cells across
    let stride = (d.nx().max(d.ny()) / 300).max(1);
    let cell = stride as f64 * d.h() * scale;

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{wpx:.0}\" height=\"{hpx:.0}\" viewBox=\"0 0 {wpx:.1} {hpx:.1}\">"
    );
    let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let _ = writeln!(s, "<g shape-rendering=\"crispEdges\">");
    for j in (0..d.ny()).step_by(stride) {
        for i in (0..d.nx()).step_by(stride) {
            if let Some(v) = u.at(i, j) {
                let p = d.point_at(i, j);
                let _ = writeln!(
                    s,
                    "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{}\"/>",
                    sx(p.x) - 0.5 * cell,
                    sy(p.y) - 0.5 * cell,
                    cell,
                    cell,
                    colour((v - lo) / span)
                );
            }
        }
    }
    let _ = writeln!(s, "</g>");
    for set in contours {
        for c in &set.contours {
            let pts: Vec<String> = c
                .iter()
                .chain(c.first())
                .map(|p| format!("{:.2},{:.2}", sx(p.x), sy(p.y)))
                .collect();
            let _ = writeln!(
                s,
                "<polyline points=\"{}\" fill=\"none\" stroke=\"white\" stroke-width=\"1\"><title>lambda = {}</title></polyline>",
                pts.join(" "),
                set.lambda
            );
        }
    }
    for w in witnesses {
        let _ = writeln!(
            s,
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"red\" stroke-dasharray=\"4 3\"/>",
            sx(w.p.x),
            sy(w.p.y),
            sx(w.r.x),
            sy(w.r.y)
        );
        for (p, fill) in [(w.p, "red"), (w.r, "red"), (w.q, "black")] {
            let _ = writeln!(
                s,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"{fill}\" stroke=\"white\"/>",
                sx(p.x),
                sy(p.y)
            );
        }
    }
    let _ = writeln!(s, "</svg>");
    write_text(path, &s)
}

/// Creates `dir` (and parents) and returns it.
pub fn ensure_dir(dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    Ok(dir.to_path_buf())
}
