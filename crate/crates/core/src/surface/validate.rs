use std::fmt;

use crate::scalar::Scalar;

use super::complex::{CellComplex, VertexKind};
use super::Surface;

/// One reason a glued rectangle family fails to be a legal planar piece.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    BaseOutside,
    /// The glued rectangles do not even touch.
    GlueWithoutContact(usize, usize),
    Disconnected(usize),
    /// More than one face on the same side of an edge at the given point.
    BranchEdge(String),
    /// A full turn of the wrong angle around a vertex.
    ConePoint(String),
    /// Faces at a vertex split into separate fans, so boundary curves touch.
    BoundaryTouching(String),
    /// The boundary folds back on itself at the tip of a slit.
    SlitTip(String),
    NonPlanar(i64),
    OpenBaseOnBoundary,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BaseOutside => write!(f, "basepoint lies outside its rectangle"),
            Violation::GlueWithoutContact(i, j) => {
                write!(f, "rectangles {i} and {j} are glued but do not touch")
            }
            Violation::Disconnected(k) => write!(f, "disconnected: {k} components"),
            Violation::BranchEdge(at) => write!(f, "branch along the edge through {at}"),
            Violation::ConePoint(at) => write!(f, "cone point at {at}"),
            Violation::BoundaryTouching(at) => write!(f, "boundary curves touch at {at}"),
            Violation::SlitTip(at) => write!(f, "boundary folds back at {at}"),
            Violation::NonPlanar(g) => write!(f, "not planar: genus {g}"),
            Violation::OpenBaseOnBoundary => write!(f, "open surface with basepoint on the boundary"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Local manifold checks shared by validation and boundary tracing.
pub(crate) fn local_violations<T: Scalar>(c: &CellComplex<T>) -> Vec<Violation> {
    let mut out = Vec::new();
    for e in c.edges() {
        let cell = c.class(e).cell;
        let faces = c.faces_around(e);
        let below = faces
            .iter()
            .filter(|&&f| {
                let fc = c.class(f).cell;
                fc.hx < cell.hx || fc.hy < cell.hy
            })
            .count();
        if below > 1 || faces.len() - below > 1 {
            out.push(Violation::BranchEdge(format!("{}", c.sample(e))));
        }
    }
    if !out.is_empty() {
        return out;
    }
    for v in c.vertices() {
        let at = || format!("{}", c.sample(v));
        match c.vertex_kind(v) {
            VertexKind::Interior => {}
            VertexKind::Fan(n) if n <= 3 => {}
            VertexKind::Fan(_) => out.push(Violation::SlitTip(at())),
            VertexKind::Cone(_) => out.push(Violation::ConePoint(at())),
            VertexKind::Pinched => out.push(Violation::BoundaryTouching(at())),
        }
    }
    out
}

pub(crate) fn validate<T: Scalar>(s: &Surface<T>) -> ValidationReport {
    let mut violations = Vec::new();
    let base = s.base();
    if !s.rects()[base.rect].contains(&base.point) {
        violations.push(Violation::BaseOutside);
    }
    for &(i, j) in s.glue() {
        if !s.rects()[i].touches(&s.rects()[j]) {
            violations.push(Violation::GlueWithoutContact(i, j));
        }
    }
    let c = s.complex();
    let k = c.components();
    if k != 1 {
        violations.push(Violation::Disconnected(k));
    }
    let local = local_violations(c);
    let manifold = local.is_empty();
    violations.extend(local);
    if manifold && k == 1 {
        let b = super::boundary::trace(c).len() as i64;
        let doubled_genus = 2 - c.euler_characteristic() - b;
        if doubled_genus != 0 {
            violations.push(Violation::NonPlanar(doubled_genus / 2));
        }
    }
    if s.is_open() && violations.is_empty() {
        if let Some(id) = c.locate(base.rect, &base.point) {
            if c.is_boundary(id) {
                violations.push(Violation::OpenBaseOnBoundary);
            }
        }
    }
    ValidationReport { violations }
}
