//! Planar pieces presented as glued rational rectangles.
//!
//! A [`Surface`] is a finite family of closed rectangles (their developed
//! images), a set of glue pairs and a basepoint anchor. Gluing `{i, j}`
//! identifies the two copies of every point of `rects[i] ∩ rects[j]`; the
//! quotient is computed cell by cell in a [`CellComplex`].

mod boundary;
mod build;
mod complex;
mod subunion;
mod validate;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::geom::{Grid, Point, Rect, RectiLoop};
use crate::scalar::Scalar;

pub use boundary::BoundaryLoop;
pub use build::{assemble, repair_butterflies, simplify, AssembleError};
pub use complex::{CellClass, CellComplex, ClassId, VertexKind};
pub use subunion::{Placement, SubUnion};
pub use validate::{ValidationReport, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurfaceError {
    #[error("a surface needs at least one rectangle")]
    Empty,
    #[error("glue pair ({0}, {1}) refers to a missing rectangle")]
    GlueIndex(usize, usize),
    #[error("rectangle {0} is glued to itself")]
    SelfGlue(usize),
    #[error("basepoint refers to missing rectangle {0}")]
    BaseIndex(usize),
    #[error("invalid surface: {0}")]
    Invalid(ValidationReport),
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("inconsistent encoding: {0}")]
    InconsistentEncoding(String),
    #[error("invalid sub-union: {0}")]
    InvalidSubUnion(String),
}

/// A point of a surface, named by a rectangle copy containing it and its
/// developed coordinates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SurfacePoint<T> {
    pub rect: usize,
    pub point: Point<T>,
}

impl<T: Scalar> SurfacePoint<T> {
    pub fn new(rect: usize, point: Point<T>) -> Self {
        SurfacePoint { rect, point }
    }
}

impl<T: fmt::Debug> fmt::Debug for SurfacePoint<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}@{}", self.point, self.rect)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Classification {
    Disk,
    PuncturedDisk(usize),
    NotAPlanarPiece,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::Disk => f.write_str("disk"),
            Classification::PuncturedDisk(k) => write!(f, "punctured disk ({k} holes)"),
            Classification::NotAPlanarPiece => f.write_str("not a planar piece"),
        }
    }
}

/// The `(rects, glue, S)` presentation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Encoding<T> {
    pub rects: Vec<Rect<T>>,
    pub glue: BTreeSet<(usize, usize)>,
    pub base_set: BTreeSet<usize>,
}

/// Isomorphism invariant used to bucket surfaces before pairwise checks.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Fingerprint<T> {
    open: bool,
    chi: i64,
    area: T,
    loops: Vec<RectiLoop<T>>,
}

#[derive(Clone)]
pub struct Surface<T> {
    rects: Vec<Rect<T>>,
    glue: BTreeSet<(usize, usize)>,
    base: SurfacePoint<T>,
    open: bool,
    complex: CellComplex<T>,
    report: ValidationReport,
}

impl<T: Scalar> Surface<T> {
    /// Build from structurally sound data. The result may still violate the
    /// surface invariants; see [`Surface::report`] and [`Surface::checked`].
    pub fn new(
        rects: Vec<Rect<T>>,
        glue: impl IntoIterator<Item = (usize, usize)>,
        base: SurfacePoint<T>,
        open: bool,
    ) -> Result<Self, SurfaceError> {
        if rects.is_empty() {
            return Err(SurfaceError::Empty);
        }
        let n = rects.len();
        let mut set = BTreeSet::new();
        for (i, j) in glue {
            if i >= n || j >= n {
                return Err(SurfaceError::GlueIndex(i, j));
            }
            if i == j {
                return Err(SurfaceError::SelfGlue(i));
            }
            set.insert((i.min(j), i.max(j)));
        }
        if base.rect >= n {
            return Err(SurfaceError::BaseIndex(base.rect));
        }
        let grid = Grid::from_rects(&rects);
        let complex = CellComplex::build(&rects, &set, grid);
        let mut s = Surface { rects, glue: set, base, open, complex, report: ValidationReport::default() };
        s.report = validate::validate(&s);
        Ok(s)
    }

    /// Like [`Surface::new`] but rejects surfaces that fail validation.
    pub fn checked(
        rects: Vec<Rect<T>>,
        glue: impl IntoIterator<Item = (usize, usize)>,
        base: SurfacePoint<T>,
        open: bool,
    ) -> Result<Self, SurfaceError> {
        Surface::new(rects, glue, base, open)?.into_valid()
    }

    /// A single closed rectangle with the given basepoint.
    pub fn rectangle(r: Rect<T>, base: Point<T>) -> Result<Self, SurfaceError> {
        Surface::checked(vec![r], [], SurfacePoint::new(0, base), false)
    }

    pub fn into_valid(self) -> Result<Self, SurfaceError> {
        if self.report.is_valid() {
            Ok(self)
        } else {
            Err(SurfaceError::Invalid(self.report))
        }
    }

    fn require_valid(&self) -> Result<(), SurfaceError> {
        if self.report.is_valid() {
            Ok(())
        } else {
            Err(SurfaceError::Invalid(self.report.clone()))
        }
    }

    pub fn rects(&self) -> &[Rect<T>] {
        &self.rects
    }

    pub fn glue(&self) -> &BTreeSet<(usize, usize)> {
        &self.glue
    }

    pub fn is_glued(&self, i: usize, j: usize) -> bool {
        self.glue.contains(&(i.min(j), i.max(j)))
    }

    pub fn base(&self) -> &SurfacePoint<T> {
        &self.base
    }

    pub fn is_open(&self) -> bool {
        self.open
    }

    pub fn complex(&self) -> &CellComplex<T> {
        &self.complex
    }

    pub fn report(&self) -> &ValidationReport {
        &self.report
    }

    pub fn is_valid(&self) -> bool {
        self.report.is_valid()
    }

    /// Same data with the open flag replaced.
    pub fn with_open(&self, open: bool) -> Result<Self, SurfaceError> {
        Surface::new(self.rects.clone(), self.glue.iter().copied(), self.base.clone(), open)
    }

    /// Same surface with the basepoint moved (no translation).
    pub fn with_base(&self, base: SurfacePoint<T>) -> Result<Self, SurfaceError> {
        Surface::new(self.rects.clone(), self.glue.iter().copied(), base, self.open)
    }

    pub fn translate(&self, v: &Point<T>) -> Self {
        Surface::new(
            self.rects.iter().map(|r| r.translate(v)).collect(),
            self.glue.iter().copied(),
            SurfacePoint::new(self.base.rect, self.base.point.add(v)),
            self.open,
        )
        .expect("translation keeps structure")
    }

    /// Translate so the basepoint develops to the origin.
    pub fn normalize(&self) -> Self {
        if self.base.point.is_origin() {
            return self.clone();
        }
        self.translate(&self.base.point.neg())
    }

    pub fn is_normalized(&self) -> bool {
        self.base.point.is_origin()
    }

    /// Class of the point, if it names a point of the surface.
    pub fn class_of(&self, p: &SurfacePoint<T>) -> Result<ClassId, SurfaceError> {
        let rect = self
            .rects
            .get(p.rect)
            .ok_or_else(|| SurfaceError::InvalidPoint(format!("no rectangle {}", p.rect)))?;
        if !rect.contains(&p.point) {
            return Err(SurfaceError::InvalidPoint(format!("{} is outside rectangle {}", p.point, p.rect)));
        }
        let id = self.complex.locate(p.rect, &p.point).expect("point of a rectangle has a cell");
        if self.open && self.complex.is_boundary(id) {
            return Err(SurfaceError::InvalidPoint(format!("{} lies on the boundary of an open surface", p.point)));
        }
        Ok(id)
    }

    pub fn base_class(&self) -> ClassId {
        self.complex.locate(self.base.rect, &self.base.point).expect("basepoint lies in its rectangle")
    }

    /// Developed image of a point.
    pub fn dev(&self, p: &SurfacePoint<T>) -> Result<Point<T>, SurfaceError> {
        self.class_of(p)?;
        Ok(p.point.clone())
    }

    /// Whether two names denote the same point.
    pub fn same_point(&self, p: &SurfacePoint<T>, q: &SurfacePoint<T>) -> Result<bool, SurfaceError> {
        Ok(p.point == q.point && self.class_of(p)? == self.class_of(q)?)
    }

    /// A surface point naming the given class at the given developed location.
    pub fn point_in_class(&self, id: ClassId, point: Point<T>) -> SurfacePoint<T> {
        SurfacePoint::new(self.complex.class(id).members[0], point)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.complex.euler_characteristic()
    }

    /// Boundary components, surface on the left.
    pub fn boundary_loops(&self) -> Result<Vec<BoundaryLoop<T>>, SurfaceError> {
        self.require_valid()?;
        Ok(boundary::trace(&self.complex))
    }

    pub fn loops(&self) -> Result<Vec<RectiLoop<T>>, SurfaceError> {
        Ok(self.boundary_loops()?.into_iter().map(|l| l.curve).collect())
    }

    pub fn classify(&self) -> Classification {
        if !self.is_valid() {
            return Classification::NotAPlanarPiece;
        }
        let chi = self.euler_characteristic();
        let b = boundary::trace(&self.complex).len() as i64;
        match (chi, b) {
            (1, 1) => Classification::Disk,
            (c, b) if c < 1 && b == 2 - c => Classification::PuncturedDisk((1 - c) as usize),
            _ => Classification::NotAPlanarPiece,
        }
    }

    /// Sum of face areas (each sheet counted).
    pub fn area(&self) -> T {
        let c = &self.complex;
        c.faces().fold(T::zero(), |acc, f| {
            let [x0, x1, y0, y1] = c.footprint(f);
            acc + (x1 - x0) * (y1 - y0)
        })
    }

    pub fn fingerprint(&self) -> Fingerprint<T> {
        let shift = self.base.point.neg();
        let mut loops: Vec<RectiLoop<T>> = boundary::trace(&self.complex)
            .into_iter()
            .map(|l| l.curve.translate(&shift).canonical())
            .collect();
        loops.sort_by(|a, b| a.vertices().cmp(b.vertices()));
        Fingerprint { open: self.open, chi: self.euler_characteristic(), area: self.area(), loops }
    }

    pub fn encode(&self) -> Encoding<T> {
        let base_set = self.complex.class(self.base_class()).members.iter().copied().collect();
        Encoding { rects: self.rects.clone(), glue: self.glue.clone(), base_set }
    }

    /// Rebuild from `(rects, glue, S)` and the developed basepoint.
    pub fn decode(enc: &Encoding<T>, base_dev: Point<T>, open: bool) -> Result<Self, SurfaceError> {
        let first = *enc
            .base_set
            .iter()
            .next()
            .ok_or_else(|| SurfaceError::InconsistentEncoding("empty base set".into()))?;
        let s = Surface::new(enc.rects.clone(), enc.glue.iter().copied(), SurfacePoint::new(first, base_dev), open)
            .map_err(|e| SurfaceError::InconsistentEncoding(e.to_string()))?;
        if !s.is_valid() {
            return Err(SurfaceError::InconsistentEncoding(s.report.to_string()));
        }
        if s.encode().base_set != enc.base_set {
            return Err(SurfaceError::InconsistentEncoding(
                "base set differs from the rectangles containing the basepoint".into(),
            ));
        }
        Ok(s)
    }

    /// The closed rectangle union presented by a subset of rectangles, with
    /// the glue restricted to it. Indices are renumbered in the given order.
    pub fn restrict(&self, keep: &[usize], base_rect: usize) -> Result<Self, SurfaceError> {
        let pos = |i: usize| keep.iter().position(|&k| k == i);
        let glue = self.glue.iter().filter_map(|&(i, j)| Some((pos(i)?, pos(j)?)));
        let b = pos(base_rect).ok_or(SurfaceError::BaseIndex(base_rect))?;
        Surface::new(
            keep.iter().map(|&i| self.rects[i].clone()).collect(),
            glue.collect::<Vec<_>>(),
            SurfacePoint::new(b, self.base.point.clone()),
            self.open,
        )
    }
}

impl<T: fmt::Debug> fmt::Debug for Surface<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Surface")
            .field("rects", &self.rects)
            .field("glue", &self.glue)
            .field("base", &self.base)
            .field("open", &self.open)
            .finish()
    }
}

pub fn validate<T: Scalar>(s: &Surface<T>) -> ValidationReport {
    s.report.clone()
}
