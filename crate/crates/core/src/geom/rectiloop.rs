use std::fmt;

use crate::scalar::Scalar;

use super::{shoelace2, GeomError, Grid, Point, Rect};

/// Axis direction of a loop edge.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Direction {
    East,
    North,
    West,
    South,
}

impl Direction {
    pub fn between<T: Scalar>(a: &Point<T>, b: &Point<T>) -> Option<Direction> {
        match (a.x == b.x, a.y == b.y) {
            (true, false) => Some(if b.y > a.y {
                Direction::North
            } else {
                Direction::South
            }),
            (false, true) => Some(if b.x > a.x {
                Direction::East
            } else {
                Direction::West
            }),
            _ => None,
        }
    }

    pub fn is_horizontal(self) -> bool {
        matches!(self, Direction::East | Direction::West)
    }

    /// Quarter turns counter-clockwise from `self` to `next` (in -1..=1 for
    /// alternating edges).
    pub fn turn(self, next: Direction) -> i32 {
        let idx = |d: Direction| -> i32 {
            match d {
                Direction::East => 0,
                Direction::North => 1,
                Direction::West => 2,
                Direction::South => 3,
            }
        };
        match (idx(next) - idx(self)).rem_euclid(4) {
            0 => 0,
            1 => 1,
            2 => 2,
            _ => -1,
        }
    }
}

/// A closed rectilinear curve given by its corners in traversal order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RectiLoop<T> {
    vertices: Vec<Point<T>>,
}

impl<T: Scalar> RectiLoop<T> {
    pub fn new(vertices: Vec<Point<T>>) -> Result<Self, GeomError> {
        let n = vertices.len();
        if n < 4 {
            return Err(GeomError::InvalidLoop("fewer than four corners"));
        }
        if n % 2 == 1 {
            return Err(GeomError::InvalidLoop("odd number of corners"));
        }
        let mut prev: Option<Direction> = None;
        for i in 0..n {
            let d = Direction::between(&vertices[i], &vertices[(i + 1) % n]).ok_or(
                GeomError::InvalidLoop("edge is not axis-parallel or has zero length"),
            )?;
            if let Some(p) = prev {
                if p.is_horizontal() == d.is_horizontal() {
                    return Err(GeomError::InvalidLoop("edge directions do not alternate"));
                }
            }
            prev = Some(d);
        }
        Ok(RectiLoop { vertices })
    }

    /// Loop through integer corners; panics on invalid input.
    pub fn ints(corners: &[(i64, i64)]) -> Self {
        RectiLoop::new(
            corners
                .iter()
                .map(|&(x, y)| Point::new(T::from_int(x), T::from_int(y)))
                .collect(),
        )
        .expect("invalid integer loop")
    }

    /// Counter-clockwise boundary of a rectangle starting at its lower-left corner.
    pub fn rect(r: &Rect<T>) -> Self {
        RectiLoop {
            vertices: r.corners().to_vec(),
        }
    }

    pub fn vertices(&self) -> &[Point<T>] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = (&Point<T>, &Point<T>)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (&self.vertices[i], &self.vertices[(i + 1) % n]))
    }

    pub fn directions(&self) -> Vec<Direction> {
        self.edges()
            .map(|(a, b)| Direction::between(a, b).expect("validated"))
            .collect()
    }

    /// Total turning divided by a full turn.
    pub fn turning_number(&self) -> i32 {
        let d = self.directions();
        let n = d.len();
        (0..n).map(|i| d[i].turn(d[(i + 1) % n])).sum::<i32>() / 4
    }

    /// Twice the signed enclosed area.
    pub fn signed_area2(&self) -> T {
        shoelace2(&self.vertices)
    }

    pub fn signed_area(&self) -> T {
        self.signed_area2() * T::half()
    }

    pub fn reversed(&self) -> Self {
        let mut v = self.vertices.clone();
        v.reverse();
        RectiLoop { vertices: v }
    }

    /// Same curve starting `k` corners later.
    pub fn rotated(&self, k: usize) -> Self {
        let mut v = self.vertices.clone();
        let n = v.len();
        v.rotate_left(k % n);
        RectiLoop { vertices: v }
    }

    pub fn translate(&self, v: &Point<T>) -> Self {
        RectiLoop {
            vertices: self.vertices.iter().map(|p| p.add(v)).collect(),
        }
    }

    /// Apply a corner map that keeps edges axis-parallel.
    pub fn map_vertices(&self, f: impl Fn(&Point<T>) -> Point<T>) -> Self {
        RectiLoop {
            vertices: self.vertices.iter().map(f).collect(),
        }
    }

    /// Rotation starting at the lexicographically smallest vertex sequence;
    /// equal for cyclically equal loops.
    pub fn canonical(&self) -> Self {
        let n = self.vertices.len();
        (0..n)
            .map(|k| self.rotated(k))
            .min_by(|a, b| a.vertices.cmp(&b.vertices))
            .expect("nonempty")
    }

    /// Whether `other` is a cyclic rotation of `self` (same orientation).
    pub fn cyclically_equal(&self, other: &RectiLoop<T>) -> bool {
        self.len() == other.len() && self.canonical() == other.canonical()
    }

    /// Whether `p` lies on the trace.
    pub fn on_curve(&self, p: &Point<T>) -> bool {
        self.edges().any(|(a, b)| {
            let (x0, x1) = minmax(&a.x, &b.x);
            let (y0, y1) = minmax(&a.y, &b.y);
            x0 <= &p.x && &p.x <= x1 && y0 <= &p.y && &p.y <= y1
        })
    }

    /// Signed winding number by a ray towards +x. Vertical edges count on the
    /// half-open span `[y_min, y_max)` so corners are never double counted.
    pub fn winding_number(&self, p: &Point<T>) -> Result<i64, GeomError> {
        if self.on_curve(p) {
            return Err(GeomError::PointOnCurve);
        }
        let mut w = 0;
        for (a, b) in self.edges() {
            if a.x != b.x || a.x <= p.x {
                continue;
            }
            let (lo, hi) = minmax(&a.y, &b.y);
            if lo <= &p.y && &p.y < hi {
                w += if b.y > a.y { 1 } else { -1 };
            }
        }
        Ok(w)
    }

    /// Grid faces of the bounded complement with their winding numbers.
    pub fn region_decomposition(&self) -> Result<Vec<(Rect<T>, u32)>, GeomError> {
        let grid = Grid::new(
            self.vertices.iter().map(|p| p.x.clone()),
            self.vertices.iter().map(|p| p.y.clone()),
        );
        let mut out = Vec::new();
        for c in grid.cells().filter(|c| c.is_face()) {
            let w = self.winding_number(&grid.sample(&c))?;
            if w < 0 {
                return Err(GeomError::NegativeWinding);
            }
            if w > 0 {
                out.push((grid.face_rect(&c), w as u32));
            }
        }
        Ok(out)
    }
}

fn minmax<'a, T: Ord>(a: &'a T, b: &'a T) -> (&'a T, &'a T) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl<T: fmt::Debug> fmt::Debug for RectiLoop<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Loop[")?;
        for (i, p) in self.vertices.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{:?}", p)?;
        }
        f.write_str("]")
    }
}
