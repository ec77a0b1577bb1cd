//! Text documents for surfaces, loops and sub-unions, plus SVG output.
//!
//! Every rational is written as a `"p/q"` (or `"p"`) string so nothing passes
//! through floating point. Keys are emitted in sorted order, which makes the
//! output byte-deterministic.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{GeomError, Point, Rect, RectiLoop};
use crate::scalar::Scalar;
use crate::surface::{SubUnion, Surface, SurfaceError, SurfacePoint};

pub const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported document version {0}, expected {VERSION}")]
    Version(u32),
    #[error("not an exact rational: {0:?}")]
    Rational(String),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseDocument {
    pub rect: usize,
    pub x: String,
    pub y: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceDocument {
    pub base: BaseDocument,
    pub glue: Vec<[usize; 2]>,
    #[serde(default)]
    pub open: bool,
    pub rects: Vec<[String; 4]>,
    pub version: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoopDocument {
    pub version: u32,
    pub vertices: Vec<[String; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceDocument {
    pub host: usize,
    pub rect: [String; 4],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubUnionDocument {
    #[serde(default)]
    pub open: bool,
    pub pieces: Vec<PieceDocument>,
    pub version: u32,
}

/// Canonical text of a scalar: lowest terms, `"p"` for integers.
pub fn format_scalar<T: Scalar>(x: &T) -> String {
    x.to_big().to_string()
}

pub fn parse_scalar<T: Scalar>(text: &str) -> Result<T, IoError> {
    T::parse(text).ok_or_else(|| IoError::Rational(text.to_string()))
}

fn check_version(v: u32) -> Result<(), IoError> {
    if v == VERSION {
        Ok(())
    } else {
        Err(IoError::Version(v))
    }
}

fn rect_strings<T: Scalar>(r: &Rect<T>) -> [String; 4] {
    r.to_bounds().map(|v| format_scalar(&v))
}

fn parse_rect<T: Scalar>(b: &[String; 4]) -> Result<Rect<T>, IoError> {
    let [a, b, c, d] = b;
    Ok(Rect::new(parse_scalar(a)?, parse_scalar(b)?, parse_scalar(c)?, parse_scalar(d)?)?)
}

impl SurfaceDocument {
    pub fn from_surface<T: Scalar>(s: &Surface<T>) -> Self {
        let base = s.base();
        SurfaceDocument {
            base: BaseDocument {
                rect: base.rect,
                x: format_scalar(&base.point.x),
                y: format_scalar(&base.point.y),
            },
            glue: s.glue().iter().map(|&(i, j)| [i, j]).collect(),
            open: s.is_open(),
            rects: s.rects().iter().map(rect_strings).collect(),
            version: VERSION,
        }
    }

    /// Structural parse only; the result may fail validation.
    pub fn to_raw_surface<T: Scalar>(&self) -> Result<Surface<T>, IoError> {
        check_version(self.version)?;
        let rects = self.rects.iter().map(parse_rect).collect::<Result<Vec<_>, _>>()?;
        let base = SurfacePoint::new(
            self.base.rect,
            Point::new(parse_scalar(&self.base.x)?, parse_scalar(&self.base.y)?),
        );
        Ok(Surface::new(rects, self.glue.iter().map(|&[i, j]| (i, j)), base, self.open)?)
    }

    pub fn to_surface<T: Scalar>(&self) -> Result<Surface<T>, IoError> {
        Ok(self.to_raw_surface()?.into_valid()?)
    }
}

impl LoopDocument {
    pub fn from_loop<T: Scalar>(l: &RectiLoop<T>) -> Self {
        LoopDocument {
            version: VERSION,
            vertices: l.vertices().iter().map(|p| [format_scalar(&p.x), format_scalar(&p.y)]).collect(),
        }
    }

    pub fn to_loop<T: Scalar>(&self) -> Result<RectiLoop<T>, IoError> {
        check_version(self.version)?;
        let vs = self
            .vertices
            .iter()
            .map(|[x, y]| Ok(Point::new(parse_scalar(x)?, parse_scalar(y)?)))
            .collect::<Result<Vec<_>, IoError>>()?;
        Ok(RectiLoop::new(vs)?)
    }
}

impl SubUnionDocument {
    pub fn from_subunion<T: Scalar>(k: &SubUnion<T>) -> Self {
        SubUnionDocument {
            open: k.open,
            pieces: k.pieces.iter().map(|(h, r)| PieceDocument { host: *h, rect: rect_strings(r) }).collect(),
            version: VERSION,
        }
    }

    pub fn to_subunion<T: Scalar>(&self) -> Result<SubUnion<T>, IoError> {
        check_version(self.version)?;
        let pieces = self
            .pieces
            .iter()
            .map(|p| Ok((p.host, parse_rect(&p.rect)?)))
            .collect::<Result<Vec<_>, IoError>>()?;
        Ok(SubUnion::new(pieces, self.open))
    }
}

fn to_text<D: Serialize>(doc: &D) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents always serialize");
    s.push('\n');
    s
}

pub fn print_surface<T: Scalar>(s: &Surface<T>) -> String {
    to_text(&SurfaceDocument::from_surface(s))
}

/// Parse and validate a surface document.
pub fn parse_surface<T: Scalar>(text: &str) -> Result<Surface<T>, IoError> {
    serde_json::from_str::<SurfaceDocument>(text)?.to_surface()
}

pub fn print_loop<T: Scalar>(l: &RectiLoop<T>) -> String {
    to_text(&LoopDocument::from_loop(l))
}

pub fn parse_loop<T: Scalar>(text: &str) -> Result<RectiLoop<T>, IoError> {
    serde_json::from_str::<LoopDocument>(text)?.to_loop()
}

pub fn print_subunion<T: Scalar>(k: &SubUnion<T>) -> String {
    to_text(&SubUnionDocument::from_subunion(k))
}

pub fn parse_subunion<T: Scalar>(text: &str) -> Result<SubUnion<T>, IoError> {
    serde_json::from_str::<SubUnionDocument>(text)?.to_subunion()
}

/// Developed picture of a surface: one translucent square per face sheet,
/// so overlapping sheets darken, one polygon per boundary loop, and a dot at
/// the basepoint. The y axis points up.
pub fn render_svg<T: Scalar>(s: &Surface<T>) -> String {
    let c = s.complex();
    let grid = c.grid();
    let (xs, ys) = (grid.xs(), grid.ys());
    let (x0, x1) = (xs[0].to_f64(), xs[xs.len() - 1].to_f64());
    let (y0, y1) = (ys[0].to_f64(), ys[ys.len() - 1].to_f64());
    let scale = 400.0 / (x1 - x0).max(y1 - y0);
    let pad = 10.0;
    let px = |x: f64| pad + (x - x0) * scale;
    let py = |y: f64| pad + (y1 - y) * scale;

    let mut sheets: BTreeMap<_, usize> = BTreeMap::new();
    for id in c.faces() {
        *sheets.entry(c.class(id).cell).or_default() += 1;
    }
    let most = sheets.values().copied().max().unwrap_or(1) as f64;

    let mut out = String::new();
    let (w, h) = (2.0 * pad + (x1 - x0) * scale, 2.0 * pad + (y1 - y0) * scale);
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.2}" height="{h:.2}">"#);
    for (cell, n) in &sheets {
        let [a, b, lo, hi] = grid.footprint(cell).map(|v| v.to_f64());
        let _ = writeln!(
            out,
            r##"  <rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="#3060c0" fill-opacity="{:.3}" data-sheets="{n}"/>"##,
            px(a),
            py(hi),
            (b - a) * scale,
            (hi - lo) * scale,
            0.8 * *n as f64 / most,
        );
    }
    for l in s.loops().unwrap_or_default() {
        let pts: Vec<String> =
            l.vertices().iter().map(|p| format!("{:.3},{:.3}", px(p.x.to_f64()), py(p.y.to_f64()))).collect();
        let _ = writeln!(out, r#"  <polygon points="{}" fill="none" stroke="black" stroke-width="1.5"/>"#, pts.join(" "));
    }
    if let Ok(b) = s.dev(s.base()) {
        let _ = writeln!(
            out,
            r#"  <circle cx="{:.3}" cy="{:.3}" r="3" fill="red"/>"#,
            px(b.x.to_f64()),
            py(b.y.to_f64())
        );
    }
    out.push_str("</svg>\n");
    out
}
