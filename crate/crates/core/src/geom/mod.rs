//! Exact plane primitives: points, closed axis-parallel rectangles, the grid
//! refinement they induce, and closed rectilinear loops.

mod arrangement;
mod grid;
mod rectiloop;

use std::fmt;

use thiserror::Error;

use crate::scalar::Scalar;

pub use arrangement::{overlay, ArrEdge, ArrFace, Arrangement};
pub use grid::{Cell, Grid};
pub use rectiloop::{Direction, RectiLoop};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeomError {
    #[error("degenerate rectangle: need x_lo < x_hi and y_lo < y_hi")]
    DegenerateRect,
    #[error("invalid rectilinear loop: {0}")]
    InvalidLoop(&'static str),
    #[error("point lies on the curve")]
    PointOnCurve,
    #[error("the loop winds negatively around some face")]
    NegativeWinding,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Point { x, y }
    }

    pub fn origin() -> Self {
        Point::new(T::zero(), T::zero())
    }

    pub fn add(&self, other: &Point<T>) -> Point<T> {
        Point::new(
            self.x.clone() + other.x.clone(),
            self.y.clone() + other.y.clone(),
        )
    }

    pub fn sub(&self, other: &Point<T>) -> Point<T> {
        Point::new(
            self.x.clone() - other.x.clone(),
            self.y.clone() - other.y.clone(),
        )
    }

    pub fn neg(&self) -> Point<T> {
        Point::new(-self.x.clone(), -self.y.clone())
    }

    pub fn scale(&self, k: &T) -> Point<T> {
        Point::new(self.x.clone() * k.clone(), self.y.clone() * k.clone())
    }

    /// Squared Euclidean distance.
    pub fn dist2(&self, other: &Point<T>) -> T {
        let d = self.sub(other);
        d.x.clone() * d.x + d.y.clone() * d.y
    }

    pub fn norm2(&self) -> T {
        self.x.clone() * self.x.clone() + self.y.clone() * self.y.clone()
    }

    pub fn is_origin(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }
}

impl<T: fmt::Debug> fmt::Debug for Point<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, {:?})", self.x, self.y)
    }
}

impl<T: fmt::Display> fmt::Display for Point<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A closed rectangle `[x_lo, x_hi] x [y_lo, y_hi]` with positive width and height.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rect<T> {
    x_lo: T,
    x_hi: T,
    y_lo: T,
    y_hi: T,
}

impl<T: Scalar> Rect<T> {
    pub fn new(x_lo: T, x_hi: T, y_lo: T, y_hi: T) -> Result<Self, GeomError> {
        if x_lo < x_hi && y_lo < y_hi {
            Ok(Rect {
                x_lo,
                x_hi,
                y_lo,
                y_hi,
            })
        } else {
            Err(GeomError::DegenerateRect)
        }
    }

    /// Integer corners; panics on degenerate input. Handy in tests and samples.
    pub fn ints(x_lo: i64, x_hi: i64, y_lo: i64, y_hi: i64) -> Self {
        Rect::new(
            T::from_int(x_lo),
            T::from_int(x_hi),
            T::from_int(y_lo),
            T::from_int(y_hi),
        )
        .expect("degenerate integer rectangle")
    }

    pub fn x_lo(&self) -> &T {
        &self.x_lo
    }
    pub fn x_hi(&self) -> &T {
        &self.x_hi
    }
    pub fn y_lo(&self) -> &T {
        &self.y_lo
    }
    pub fn y_hi(&self) -> &T {
        &self.y_hi
    }

    pub fn width(&self) -> T {
        self.x_hi.clone() - self.x_lo.clone()
    }

    pub fn height(&self) -> T {
        self.y_hi.clone() - self.y_lo.clone()
    }

    pub fn area(&self) -> T {
        self.width() * self.height()
    }

    pub fn center(&self) -> Point<T> {
        Point::new(
            (self.x_lo.clone() + self.x_hi.clone()) * T::half(),
            (self.y_lo.clone() + self.y_hi.clone()) * T::half(),
        )
    }

    pub fn contains(&self, p: &Point<T>) -> bool {
        self.x_lo <= p.x && p.x <= self.x_hi && self.y_lo <= p.y && p.y <= self.y_hi
    }

    pub fn contains_open(&self, p: &Point<T>) -> bool {
        self.x_lo < p.x && p.x < self.x_hi && self.y_lo < p.y && p.y < self.y_hi
    }

    pub fn contains_rect(&self, other: &Rect<T>) -> bool {
        self.x_lo <= other.x_lo
            && other.x_hi <= self.x_hi
            && self.y_lo <= other.y_lo
            && other.y_hi <= self.y_hi
    }

    /// Whether the closed rectangles share at least one point.
    pub fn touches(&self, other: &Rect<T>) -> bool {
        self.x_lo <= other.x_hi
            && other.x_lo <= self.x_hi
            && self.y_lo <= other.y_hi
            && other.y_lo <= self.y_hi
    }

    /// Whether the intersection has nonempty interior.
    pub fn overlaps(&self, other: &Rect<T>) -> bool {
        self.x_lo < other.x_hi
            && other.x_lo < self.x_hi
            && self.y_lo < other.y_hi
            && other.y_lo < self.y_hi
    }

    /// Intersection bounds `[x_lo, x_hi, y_lo, y_hi]`, possibly degenerate.
    pub fn meet_bounds(&self, other: &Rect<T>) -> Option<[T; 4]> {
        if !self.touches(other) {
            return None;
        }
        Some([
            self.x_lo.clone().max(other.x_lo.clone()),
            self.x_hi.clone().min(other.x_hi.clone()),
            self.y_lo.clone().max(other.y_lo.clone()),
            self.y_hi.clone().min(other.y_hi.clone()),
        ])
    }

    /// Whether the closed rectangle `[b0,b1]x[b2,b3]` (possibly degenerate) lies in `self`.
    pub fn contains_bounds(&self, b: &[T; 4]) -> bool {
        self.x_lo <= b[0] && b[1] <= self.x_hi && self.y_lo <= b[2] && b[3] <= self.y_hi
    }

    pub fn translate(&self, v: &Point<T>) -> Rect<T> {
        Rect {
            x_lo: self.x_lo.clone() + v.x.clone(),
            x_hi: self.x_hi.clone() + v.x.clone(),
            y_lo: self.y_lo.clone() + v.y.clone(),
            y_hi: self.y_hi.clone() + v.y.clone(),
        }
    }

    /// Grow by `d` on every side.
    pub fn inflate(&self, d: &T) -> Rect<T> {
        Rect {
            x_lo: self.x_lo.clone() - d.clone(),
            x_hi: self.x_hi.clone() + d.clone(),
            y_lo: self.y_lo.clone() - d.clone(),
            y_hi: self.y_hi.clone() + d.clone(),
        }
    }

    /// The point of the closed rectangle nearest to `p`.
    pub fn nearest(&self, p: &Point<T>) -> Point<T> {
        Point::new(
            p.x.clone().max(self.x_lo.clone()).min(self.x_hi.clone()),
            p.y.clone().max(self.y_lo.clone()).min(self.y_hi.clone()),
        )
    }

    /// Smallest rectangle containing both.
    pub fn hull(&self, other: &Rect<T>) -> Rect<T> {
        Rect {
            x_lo: self.x_lo.clone().min(other.x_lo.clone()),
            x_hi: self.x_hi.clone().max(other.x_hi.clone()),
            y_lo: self.y_lo.clone().min(other.y_lo.clone()),
            y_hi: self.y_hi.clone().max(other.y_hi.clone()),
        }
    }

    /// Corners counter-clockwise from the lower left.
    pub fn corners(&self) -> [Point<T>; 4] {
        [
            Point::new(self.x_lo.clone(), self.y_lo.clone()),
            Point::new(self.x_hi.clone(), self.y_lo.clone()),
            Point::new(self.x_hi.clone(), self.y_hi.clone()),
            Point::new(self.x_lo.clone(), self.y_hi.clone()),
        ]
    }

    pub fn to_bounds(&self) -> [T; 4] {
        [
            self.x_lo.clone(),
            self.x_hi.clone(),
            self.y_lo.clone(),
            self.y_hi.clone(),
        ]
    }
}

impl<T: fmt::Debug> fmt::Debug for Rect<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{:?},{:?}]x[{:?},{:?}]",
            self.x_lo, self.x_hi, self.y_lo, self.y_hi
        )
    }
}

pub fn winding_number<T: Scalar>(l: &RectiLoop<T>, p: &Point<T>) -> Result<i64, GeomError> {
    l.winding_number(p)
}

pub fn loop_region_decomposition<T: Scalar>(
    l: &RectiLoop<T>,
) -> Result<Vec<(Rect<T>, u32)>, GeomError> {
    l.region_decomposition()
}

/// Twice the signed area of a closed polygon (shoelace).
pub fn shoelace2<T: Scalar>(vertices: &[Point<T>]) -> T {
    let n = vertices.len();
    let mut acc = T::zero();
    for i in 0..n {
        let a = &vertices[i];
        let b = &vertices[(i + 1) % n];
        acc = acc + a.x.clone() * b.y.clone() - b.x.clone() * a.y.clone();
    }
    acc
}
