use std::collections::BTreeSet;

use crate::scalar::Scalar;

use super::{Point, Rect};

/// A cell of a grid in half-index coordinates.
///
/// Along each axis an even index `2i` is the grid line `coords[i]` and an odd
/// index `2i + 1` is the open gap between lines `i` and `i + 1`. A face has
/// both indices odd, a vertex both even.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Cell {
    pub hx: usize,
    pub hy: usize,
}

impl Cell {
    pub fn new(hx: usize, hy: usize) -> Self {
        Cell { hx, hy }
    }

    pub fn dim(&self) -> usize {
        (self.hx & 1) + (self.hy & 1)
    }

    pub fn is_face(&self) -> bool {
        self.dim() == 2
    }

    pub fn is_edge(&self) -> bool {
        self.dim() == 1
    }

    pub fn is_vertex(&self) -> bool {
        self.dim() == 0
    }

    /// Edge parallel to the x axis.
    pub fn is_horizontal_edge(&self) -> bool {
        self.hx & 1 == 1 && self.hy & 1 == 0
    }

    /// Whether `other` lies in the closure of `self` (including `self`).
    pub fn closure_contains(&self, other: &Cell) -> bool {
        fn slot(a: usize, b: usize) -> bool {
            if a & 1 == 1 {
                b + 1 >= a && b <= a + 1
            } else {
                a == b
            }
        }
        slot(self.hx, other.hx) && slot(self.hy, other.hy)
    }

    /// Proper faces of the closure.
    pub fn boundary(&self) -> Vec<Cell> {
        let xs = closure_slots(self.hx);
        let ys = closure_slots(self.hy);
        let mut out = Vec::with_capacity(8);
        for &x in &xs {
            for &y in &ys {
                let c = Cell::new(x, y);
                if c != *self {
                    out.push(c);
                }
            }
        }
        out
    }

    /// Cells whose closure contains `self` (excluding `self`), clipped to a
    /// grid with `nx` by `ny` half-indices.
    pub fn cofaces(&self, nx: usize, ny: usize) -> Vec<Cell> {
        let xs = coface_slots(self.hx, nx);
        let ys = coface_slots(self.hy, ny);
        let mut out = Vec::with_capacity(8);
        for &x in &xs {
            for &y in &ys {
                let c = Cell::new(x, y);
                if c != *self {
                    out.push(c);
                }
            }
        }
        out
    }
}

fn closure_slots(h: usize) -> Vec<usize> {
    if h & 1 == 1 {
        vec![h - 1, h, h + 1]
    } else {
        vec![h]
    }
}

fn coface_slots(h: usize, n: usize) -> Vec<usize> {
    let mut v = vec![h];
    if h & 1 == 0 {
        if h > 0 {
            v.push(h - 1);
        }
        if h + 1 < n {
            v.push(h + 1);
        }
    }
    v
}

/// The refinement of the plane by finitely many vertical and horizontal lines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grid<T> {
    xs: Vec<T>,
    ys: Vec<T>,
}

impl<T: Scalar> Grid<T> {
    pub fn new(xs: impl IntoIterator<Item = T>, ys: impl IntoIterator<Item = T>) -> Self {
        let xs: BTreeSet<T> = xs.into_iter().collect();
        let ys: BTreeSet<T> = ys.into_iter().collect();
        Grid {
            xs: xs.into_iter().collect(),
            ys: ys.into_iter().collect(),
        }
    }

    /// The grid through every rectangle side.
    pub fn from_rects<'a>(rects: impl IntoIterator<Item = &'a Rect<T>>) -> Self {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for r in rects {
            xs.push(r.x_lo().clone());
            xs.push(r.x_hi().clone());
            ys.push(r.y_lo().clone());
            ys.push(r.y_hi().clone());
        }
        Grid::new(xs, ys)
    }

    pub fn merged(&self, other: &Grid<T>) -> Grid<T> {
        Grid::new(
            self.xs.iter().chain(&other.xs).cloned(),
            self.ys.iter().chain(&other.ys).cloned(),
        )
    }

    pub fn xs(&self) -> &[T] {
        &self.xs
    }

    pub fn ys(&self) -> &[T] {
        &self.ys
    }

    /// Number of half-indices along x.
    pub fn nx(&self) -> usize {
        (2 * self.xs.len()).saturating_sub(1)
    }

    pub fn ny(&self) -> usize {
        (2 * self.ys.len()).saturating_sub(1)
    }

    fn locate_in(coords: &[T], v: &T) -> Option<usize> {
        match coords.binary_search(v) {
            Ok(i) => Some(2 * i),
            Err(k) if k > 0 && k < coords.len() => Some(2 * k - 1),
            Err(_) => None,
        }
    }

    pub fn locate(&self, p: &Point<T>) -> Option<Cell> {
        Some(Cell::new(
            Self::locate_in(&self.xs, &p.x)?,
            Self::locate_in(&self.ys, &p.y)?,
        ))
    }

    /// Exact line index of a coordinate.
    pub fn line_x(&self, v: &T) -> Option<usize> {
        self.xs.binary_search(v).ok()
    }

    pub fn line_y(&self, v: &T) -> Option<usize> {
        self.ys.binary_search(v).ok()
    }

    /// Half-index ranges `[hx0, hx1] x [hy0, hy1]` covered by a closed rectangle
    /// whose sides are grid lines.
    pub fn span(&self, r: &Rect<T>) -> Option<(usize, usize, usize, usize)> {
        Some((
            2 * self.line_x(r.x_lo())?,
            2 * self.line_x(r.x_hi())?,
            2 * self.line_y(r.y_lo())?,
            2 * self.line_y(r.y_hi())?,
        ))
    }

    fn slot_range(coords: &[T], h: usize) -> (T, T) {
        if h & 1 == 0 {
            (coords[h / 2].clone(), coords[h / 2].clone())
        } else {
            (coords[h / 2].clone(), coords[h / 2 + 1].clone())
        }
    }

    /// Closed footprint bounds `[x_lo, x_hi, y_lo, y_hi]` of a cell (degenerate
    /// for edges and vertices).
    pub fn footprint(&self, c: &Cell) -> [T; 4] {
        let (x0, x1) = Self::slot_range(&self.xs, c.hx);
        let (y0, y1) = Self::slot_range(&self.ys, c.hy);
        [x0, x1, y0, y1]
    }

    /// A point in the relative interior of the cell.
    pub fn sample(&self, c: &Cell) -> Point<T> {
        let [x0, x1, y0, y1] = self.footprint(c);
        Point::new((x0 + x1) * T::half(), (y0 + y1) * T::half())
    }

    /// Face footprint as a rectangle.
    pub fn face_rect(&self, c: &Cell) -> Rect<T> {
        let [x0, x1, y0, y1] = self.footprint(c);
        Rect::new(x0, x1, y0, y1).expect("faces have positive extent")
    }

    /// Smallest positive gap between consecutive lines on either axis.
    pub fn min_gap(&self) -> Option<T> {
        self.xs
            .windows(2)
            .chain(self.ys.windows(2))
            .map(|w| w[1].clone() - w[0].clone())
            .min()
    }

    /// Every cell of the grid, faces included, in a fixed order.
    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        let nx = self.nx();
        let ny = self.ny();
        (0..nx).flat_map(move |hx| (0..ny).map(move |hy| Cell::new(hx, hy)))
    }
}
